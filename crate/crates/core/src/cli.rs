//! The `lm` command-line front end.
//!
//! Exit codes: 0 success or decision reached, 1 trap / law expectation not
//! met / undecided run, 2 usage or parse error. `--porcelain` switches output
//! to line-delimited `key=value` records.

use std::collections::HashMap;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::domain::{grid_value, value_map, BoundaryPolicy, LmValue, NumericContext, DEFAULT_ENUMERATION_CAP};
use crate::error::{BoundaryError, Error};
use crate::expr::{self, EvalMode, FuncDef, GridEnv};
use crate::laws::{self, CheckOptions, Law, LawReport};
use crate::q88::{Q88Op, Q88Trap, RoundingMode, Q88};
use crate::rational::{format_rational, parse_rational};
use crate::vm::{self, Program, RunOutcome, Step, VmState};

const SHOWN_COUNTEREXAMPLES: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "lm", version, about = "Bounded grid arithmetic, Q8.8 trap arithmetic, law checks and a finite-state VM")]
pub struct Cli {
    /// Emit line-delimited key=value records.
    #[arg(long, global = true)]
    porcelain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Saturate,
    Trap,
}

impl From<PolicyArg> for BoundaryPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Saturate => BoundaryPolicy::Saturate,
            PolicyArg::Trap => BoundaryPolicy::Trap,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    End,
    Step,
}

impl From<ModeArg> for EvalMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::End => EvalMode::SnapAtEnd,
            ModeArg::Step => EvalMode::SnapEachStep,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoundArg {
    Truncate,
    Symmetric,
}

impl From<RoundArg> for RoundingMode {
    fn from(r: RoundArg) -> Self {
        match r {
            RoundArg::Truncate => RoundingMode::Truncate,
            RoundArg::Symmetric => RoundingMode::SymmetricRound,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Q88OpArg {
    Add,
    Mul,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VmAction {
    Run,
    Decide,
    Size,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Map a rational onto the grid.
    #[command(allow_negative_numbers = true)]
    Map {
        #[arg(long)]
        bits: u32,
        /// Integer, decimal (0.3) or fraction (3/10).
        #[arg(allow_hyphen_values = true)]
        value: String,
    },
    /// Evaluate an expression with grid-valued bindings (name=value).
    #[command(allow_negative_numbers = true)]
    Eval {
        #[arg(long)]
        bits: u32,
        #[arg(long, value_enum, default_value = "saturate")]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value = "end")]
        mode: ModeArg,
        /// Print both snap-at-end and snap-each-step results.
        #[arg(long)]
        compare_modes: bool,
        #[arg(allow_hyphen_values = true)]
        expression: String,
        bindings: Vec<String>,
    },
    /// Exhaustively check algebraic laws.
    Laws {
        #[arg(long)]
        bits: u32,
        /// Restrict to one law (repeatable): commutativity, associativity,
        /// distributivity, cancellation.
        #[arg(long)]
        only: Vec<String>,
        /// Largest admissible number of operand tuples.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Q8.8 fixed-point arithmetic with trap on overflow.
    #[command(allow_negative_numbers = true)]
    Q88 {
        #[arg(value_enum)]
        op: Q88OpArg,
        #[arg(long, value_enum, default_value = "truncate")]
        round: RoundArg,
        /// Read operands as raw 16-bit words instead of decimals.
        #[arg(long)]
        raw: bool,
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// Mapped derivative, and optionally the grid finite difference.
    #[command(allow_negative_numbers = true)]
    Deriv {
        #[arg(long)]
        bits: u32,
        #[arg(allow_hyphen_values = true)]
        function: String,
        /// Grid point to evaluate at.
        #[arg(allow_hyphen_values = true)]
        point: Option<String>,
        /// Tabulate over grid numerators `from .. from+count`.
        #[arg(long)]
        sweep: bool,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<i64>,
        #[arg(long)]
        count: Option<u64>,
        /// Also show the naive grid finite difference.
        #[arg(long)]
        naive: bool,
    },
    /// Run a VM program, decide its termination, or size its state space.
    Vm {
        #[arg(value_enum)]
        action: VmAction,
        file: std::path::PathBuf,
        /// Initial register numerator, e.g. `--reg r0=-1` (repeatable).
        #[arg(long = "reg", allow_hyphen_values = true)]
        regs: Vec<String>,
        /// Step budget: required for `decide` on large programs; limit for `run`.
        #[arg(long)]
        budget: Option<u64>,
    },
}

/// Failure categories mapped onto exit codes.
enum Failure {
    Trap(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Boundary(b) => Failure::Trap(b.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<i32, Failure>;

pub fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code as u8)
}

/// Parses `args` and executes the command, writing to `out` and `err`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut ctx = Session { out, err, porcelain: cli.porcelain };
    let result = ctx.dispatch(cli.command);
    match result {
        Ok(code) => code,
        Err(Failure::Trap(msg)) => {
            let _ = writeln!(ctx.err, "trap: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            2
        }
    }
}

struct Session<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    porcelain: bool,
}

macro_rules! emit {
    ($w:expr, $($arg:tt)*) => {
        writeln!($w, $($arg)*).map_err(|e| Failure::Usage(e.to_string()))?
    };
}

fn context(bits: u32) -> Result<NumericContext, Failure> {
    Ok(NumericContext::new(bits)?)
}

fn parse_grid_point(ctx: NumericContext, text: &str) -> Result<LmValue, Failure> {
    let x = parse_rational(text)?;
    grid_value(ctx, &x).ok_or_else(|| {
        Failure::Usage(format!("`{text}` is not a grid point of N_{} (multiples of 1/{} up to ±{})", ctx.m(), ctx.m(), ctx.m()))
    })
}

impl Session<'_> {
    fn dispatch(&mut self, cmd: Command) -> CmdResult {
        match cmd {
            Command::Map { bits, value } => self.map(bits, &value),
            Command::Eval { bits, policy, mode, compare_modes, expression, bindings } => {
                self.eval(bits, policy.into(), mode.into(), compare_modes, &expression, &bindings)
            }
            Command::Laws { bits, only, cap } => self.laws(bits, &only, cap),
            Command::Q88 { op, round, raw, lhs, rhs } => self.q88(op, round.into(), raw, &lhs, &rhs),
            Command::Deriv { bits, function, point, sweep, from, count, naive } => {
                self.deriv(bits, &function, point.as_deref(), sweep, from, count, naive)
            }
            Command::Vm { action, file, regs, budget } => self.vm(action, &file, &regs, budget),
        }
    }

    fn map(&mut self, bits: u32, value: &str) -> CmdResult {
        let ctx = context(bits)?;
        let x = parse_rational(value)?;
        let v = value_map(ctx, &x);
        let bound = crate::rational::int(ctx.m());
        let status = if x > bound || x < -bound {
            "saturated"
        } else if v.to_rational() == x {
            "exact"
        } else {
            "quantized"
        };
        if self.porcelain {
            emit!(self.out, "value={v} status={status}");
        } else {
            emit!(self.out, "{v} ({status})");
        }
        Ok(0)
    }

    fn eval(
        &mut self,
        bits: u32,
        policy: BoundaryPolicy,
        mode: EvalMode,
        compare: bool,
        src: &str,
        bindings: &[String],
    ) -> CmdResult {
        let ctx = context(bits)?;
        let e = expr::parse_expr(src)?;
        let mut env = GridEnv::new();
        for b in bindings {
            let (name, value) =
                b.split_once('=').ok_or_else(|| Failure::Usage(format!("binding `{b}` is not name=value")))?;
            env.insert(name.trim().to_string(), parse_grid_point(ctx, value.trim())?);
        }
        let modes: Vec<EvalMode> = if compare { vec![EvalMode::SnapAtEnd, EvalMode::SnapEachStep] } else { vec![mode] };
        let mut code = 0;
        for m in modes {
            let (tag, label) = match m {
                EvalMode::SnapAtEnd => ("end", "snap-at-end"),
                EvalMode::SnapEachStep => ("step", "snap-each-step"),
            };
            match expr::eval_mapped(ctx, policy, m, &e, &env) {
                Ok(v) => match (self.porcelain, compare) {
                    (true, _) => emit!(self.out, "mode={tag} value={v}"),
                    (false, true) => emit!(self.out, "{label}: {v}"),
                    (false, false) => emit!(self.out, "{v}"),
                },
                Err(Error::Boundary(b)) => {
                    self.report_trap(Some(tag), &b)?;
                    code = 1;
                }
                Err(other) => return Err(other.into()),
            }
        }
        Ok(code)
    }

    fn report_trap(&mut self, mode: Option<&str>, b: &BoundaryError) -> Result<(), Failure> {
        if self.porcelain {
            let prefix = mode.map(|m| format!("mode={m} ")).unwrap_or_default();
            emit!(self.out, "{prefix}error=trap op={} value={} bound={}", b.operation, format_rational(&b.value), b.bound);
        }
        emit!(self.err, "trap: {b}");
        Ok(())
    }

    fn laws(&mut self, bits: u32, only: &[String], cap: u64) -> CmdResult {
        let ctx = context(bits)?;
        let selected: Vec<Law> = if only.is_empty() {
            Law::ALL.to_vec()
        } else {
            only.iter()
                .map(|name| Law::from_name(name).ok_or_else(|| Failure::Usage(format!("unknown law `{name}`"))))
                .collect::<Result<_, _>>()?
        };
        let opts = CheckOptions { cap, max_counterexamples: None };
        let mut all_met = true;
        for law in selected {
            let report = laws::check_law(ctx, law, opts)?;
            all_met &= report.meets_expectation();
            self.print_report(&report)?;
        }
        Ok(if all_met { 0 } else { 1 })
    }

    fn print_report(&mut self, r: &LawReport) -> Result<(), Failure> {
        let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
        let expectation = if r.meets_expectation() { "met" } else { "not-met" };
        let operands = |c: &laws::Counterexample| c.operands.iter().map(|v| v.to_string()).collect::<Vec<_>>();
        if self.porcelain {
            emit!(
                self.out,
                "record=law law={} m={} universe={} universal={} in_range={} in_range_universe={} counterexamples={} expectation={}",
                r.law,
                r.context.m(),
                r.universe,
                verdict(r.holds_universally),
                verdict(r.in_range_holds),
                r.in_range_universe,
                r.counterexample_count,
                expectation
            );
            for c in &r.counterexamples {
                emit!(
                    self.out,
                    "record=counterexample law={} op={} operands={} left={} right={} in_range={}",
                    r.law,
                    c.op,
                    operands(c).join(","),
                    c.left,
                    c.right,
                    c.in_range
                );
            }
            return Ok(());
        }
        emit!(self.out, "{} (M={}, {} tuples)", r.law, r.context.m(), r.universe);
        emit!(self.out, "  universal: {} ({} counterexamples)", verdict(r.holds_universally), r.counterexample_count);
        emit!(self.out, "  in-range:  {} ({} tuples)", verdict(r.in_range_holds), r.in_range_universe);
        let mut shown: Vec<&laws::Counterexample> = Vec::new();
        if let Some(c) = &r.canonical {
            shown.push(c);
        }
        for c in &r.counterexamples {
            if shown.len() >= SHOWN_COUNTEREXAMPLES {
                break;
            }
            if Some(c) != r.canonical.as_ref() {
                shown.push(c);
            }
        }
        for c in shown {
            let op = if r.law == Law::Commutativity { format!(" [{}]", c.op) } else { String::new() };
            emit!(self.out, "  ({}){op}: left {}, right {}", operands(c).join(", "), c.left, c.right);
        }
        if r.counterexample_count as usize > SHOWN_COUNTEREXAMPLES {
            emit!(self.out, "  ... {} more", r.counterexample_count as usize - SHOWN_COUNTEREXAMPLES);
        }
        emit!(self.out, "  expectation: {expectation}");
        Ok(())
    }

    fn q88_operand(&mut self, text: &str, raw: bool) -> Result<Q88, Failure> {
        if raw {
            let r: i16 = text.parse().map_err(|_| Failure::Usage(format!("`{text}` is not a 16-bit raw word")))?;
            return Ok(Q88::from_raw(r));
        }
        let x = parse_rational(text)?;
        let q = Q88::from_rational(&x).map_err(|t| Failure::Trap(t.to_string()))?;
        if !Q88::is_exact(&x) {
            emit!(self.err, "note: {text} is not a multiple of 1/256; floored to {q}");
        }
        Ok(q)
    }

    fn q88(&mut self, op: Q88OpArg, mode: RoundingMode, raw: bool, lhs: &str, rhs: &str) -> CmdResult {
        let x = self.q88_operand(lhs, raw)?;
        let y = self.q88_operand(rhs, raw)?;
        let op = match op {
            Q88OpArg::Add => Q88Op::Add,
            Q88OpArg::Mul => Q88Op::Mul,
        };
        match x.apply(op, y, mode) {
            Ok(r) => {
                if self.porcelain {
                    emit!(self.out, "value={} raw={}", r.decimal(), r.raw());
                } else {
                    emit!(self.out, "{r}");
                }
                Ok(0)
            }
            Err(Q88Trap { operation, wide }) => {
                if self.porcelain {
                    emit!(self.out, "error=trap op={operation} wide={wide}");
                }
                emit!(self.err, "trap: {}", Q88Trap { operation, wide });
                Ok(1)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn deriv(
        &mut self,
        bits: u32,
        src: &str,
        point: Option<&str>,
        sweep: bool,
        from: Option<i64>,
        count: Option<u64>,
        naive: bool,
    ) -> CmdResult {
        let ctx = context(bits)?;
        let body = expr::parse_expr(src)?;
        let vars = body.free_vars();
        if vars.len() > 1 {
            return Err(Failure::Usage(format!("function must have one variable, found {vars:?}")));
        }
        let param = vars.into_iter().next().unwrap_or_else(|| "x".to_string());
        let f = FuncDef::new(param, body)?;
        expr::derivative_symbolic(&f)?;

        if sweep {
            let start = from.unwrap_or(0);
            let count = count.unwrap_or(ctx.m() as u64 + 1);
            let mut zeros = 0u64;
            if !self.porcelain {
                emit!(self.out, "{:>14} {:>14} {:>14}", "x", "mapped", "naive");
            }
            for i in 0..count {
                let x = ctx.value(start + i as i64)?;
                let mapped = expr::mapped_derivative(ctx, &f, x)?;
                let diff = self.naive_cell(ctx, &f, x)?;
                if diff.as_deref() == Some(format!("0/{}", ctx.m()).as_str()) {
                    zeros += 1;
                }
                let diff = diff.unwrap_or_else(|| "edge".into());
                if self.porcelain {
                    emit!(self.out, "x={x} mapped={mapped} naive={diff}");
                } else {
                    emit!(self.out, "{:>14} {:>14} {diff:>14}", x.to_string(), mapped.to_string());
                }
            }
            if self.porcelain {
                emit!(self.out, "record=summary points={count} naive_zeros={zeros}");
            } else {
                emit!(self.out, "naive zeros: {zeros} of {count}");
            }
            return Ok(0);
        }

        let point = point.ok_or_else(|| Failure::Usage("give a point or --sweep".into()))?;
        let x = parse_grid_point(ctx, point)?;
        let mapped = expr::mapped_derivative(ctx, &f, x)?;
        let value = format_rational(&mapped.to_rational());
        let naive_cell = if naive { Some(self.naive_cell(ctx, &f, x)?.unwrap_or_else(|| "edge".into())) } else { None };
        if self.porcelain {
            let extra = naive_cell.map(|d| format!(" naive={d}")).unwrap_or_default();
            emit!(self.out, "x={x} mapped={mapped} mapped_value={value}{extra}");
        } else {
            emit!(self.out, "mapped {mapped} ({value})");
            if let Some(d) = naive_cell {
                emit!(self.out, "naive  {d}");
            }
        }
        Ok(0)
    }

    /// Grid finite difference, or `None` at the upper edge.
    fn naive_cell(&mut self, ctx: NumericContext, f: &FuncDef, x: LmValue) -> Result<Option<String>, Failure> {
        match expr::grid_finite_difference(ctx, f, x) {
            Ok(v) => Ok(Some(v.to_string())),
            Err(Error::Boundary(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn vm(&mut self, action: VmAction, file: &std::path::Path, regs: &[String], budget: Option<u64>) -> CmdResult {
        let src = std::fs::read_to_string(file)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
        let p = Program::parse(&src)?;
        let init = initial_state(&p, regs)?;
        match action {
            VmAction::Size => {
                let size = vm::state_space_size(&p);
                if self.porcelain {
                    emit!(self.out, "states={size}");
                } else {
                    emit!(self.out, "{size}");
                }
                Ok(0)
            }
            VmAction::Decide => match vm::decide_termination(&p, &init, budget) {
                Ok(outcome) => {
                    self.print_outcome(&outcome, false)?;
                    Ok(0)
                }
                Err(Error::BudgetExhausted(n)) => {
                    if self.porcelain {
                        emit!(self.out, "outcome=undecided steps={n}");
                    } else {
                        emit!(self.out, "UNDECIDED steps={n}");
                    }
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            },
            VmAction::Run => {
                let limit = budget.unwrap_or(1_000_000);
                let mut state = init;
                for t in 1..=limit {
                    match vm::step(&p, &state) {
                        Ok(Step::Next(s)) => state = s,
                        Ok(Step::Halt) => {
                            self.print_outcome(&RunOutcome::Halted { steps: t, last: state }, true)?;
                            return Ok(0);
                        }
                        Err(cause) => {
                            self.print_outcome(&RunOutcome::Trapped { steps: t, cause }, true)?;
                            return Ok(1);
                        }
                    }
                }
                if self.porcelain {
                    emit!(self.out, "outcome=running steps={limit} pc={} regs={}", state.pc, join(&state.regs));
                } else {
                    emit!(self.out, "RUNNING steps={limit} {state}");
                }
                Ok(1)
            }
        }
    }

    /// `with_state` appends the final machine state to a HALTED line.
    fn print_outcome(&mut self, outcome: &RunOutcome, with_state: bool) -> Result<(), Failure> {
        if !self.porcelain {
            match outcome {
                RunOutcome::Halted { steps, last } if with_state => emit!(self.out, "HALTED steps={steps} {last}"),
                other => emit!(self.out, "{other}"),
            }
            return Ok(());
        }
        match outcome {
            RunOutcome::Halted { steps, last } => {
                emit!(self.out, "outcome=halted steps={steps} pc={} regs={}", last.pc, join(&last.regs))
            }
            RunOutcome::Cycle { prefix_len, period } => {
                emit!(self.out, "outcome=cycle prefix={prefix_len} period={period}")
            }
            RunOutcome::Trapped { steps, cause } => emit!(
                self.out,
                "outcome=trapped steps={steps} op={} value={} bound={}",
                cause.operation,
                format_rational(&cause.value),
                cause.bound
            ),
        }
        Ok(())
    }
}

fn join(ks: &[i64]) -> String {
    ks.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn initial_state(p: &Program, regs: &[String]) -> Result<VmState, Failure> {
    let mut assigned: HashMap<usize, i64> = HashMap::new();
    for r in regs {
        let bad = || Failure::Usage(format!("register assignment `{r}` is not rN=k"));
        let (name, k) = r.split_once('=').ok_or_else(bad)?;
        let idx: usize = name.trim().strip_prefix('r').and_then(|n| n.parse().ok()).ok_or_else(bad)?;
        let k: i64 = k.trim().parse().map_err(|_| bad())?;
        if idx >= p.regs() {
            return Err(Failure::Usage(format!("register r{idx} out of range (R={})", p.regs())));
        }
        assigned.insert(idx, k);
    }
    let init: Vec<i64> = (0..p.regs()).map(|i| assigned.get(&i).copied().unwrap_or(0)).collect();
    Ok(VmState::with_registers(p, &init)?)
}
