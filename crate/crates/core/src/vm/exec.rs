use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use crate::domain::{lm_add, lm_mul, LmValue};
use crate::error::{BoundaryError, Error, Result};
use crate::vm::program::{Instr, Program};

/// Default limit on `|Σ|` for an uncapped decision run.
pub const DEFAULT_STATE_SPACE_CAP: u64 = 100_000_000;

/// One element of `Σ`: the program counter and the register numerators.
/// `pc == program.len()` is the halt index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VmState {
    pub pc: usize,
    pub regs: Vec<i64>,
}

impl VmState {
    /// All registers zero, pc 0.
    pub fn zeroed(p: &Program) -> Self {
        Self { pc: 0, regs: vec![0; p.regs()] }
    }

    /// pc 0 with the given register numerators; missing registers are zero.
    pub fn with_registers(p: &Program, init: &[i64]) -> Result<Self> {
        if init.len() > p.regs() {
            return Err(Error::InvalidProgram(format!(
                "{} initial registers given, program has {}",
                init.len(),
                p.regs()
            )));
        }
        let mut regs = vec![0; p.regs()];
        for (slot, &k) in regs.iter_mut().zip(init) {
            LmValue::new(p.context(), k)?;
            *slot = k;
        }
        Ok(Self { pc: 0, regs })
    }
}

impl fmt::Display for VmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pc={} regs=", self.pc)?;
        for (i, k) in self.regs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Next(VmState),
    Halt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    /// `steps` transitions were taken, the last of which produced HALT from `last`.
    Halted { steps: u64, last: VmState },
    /// The state reached after `prefix_len` steps recurs every `period` steps.
    Cycle { prefix_len: u64, period: u64 },
    /// The `steps`-th transition violated the boundary under the trap policy.
    Trapped { steps: u64, cause: BoundaryError },
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunOutcome::Halted { steps, .. } => write!(f, "HALTED steps={steps}"),
            RunOutcome::Cycle { prefix_len, period } => write!(f, "CYCLE prefix={prefix_len} period={period}"),
            RunOutcome::Trapped { steps, cause } => write!(f, "TRAPPED steps={steps} ({cause})"),
        }
    }
}

/// The transition function `δ : Σ → Σ ∪ {HALT}`.
pub fn step(p: &Program, s: &VmState) -> Result<Step, BoundaryError> {
    let Some(&ins) = p.instrs().get(s.pc) else {
        return Ok(Step::Halt);
    };
    let ctx = p.context();
    let val = |r: usize| LmValue::new(ctx, s.regs[r]).expect("registers hold grid numerators");
    let mut next = s.clone();
    next.pc = s.pc + 1;
    let lift = |r: Result<LmValue>| -> Result<i64, BoundaryError> {
        match r {
            Ok(v) => Ok(v.numerator()),
            Err(Error::Boundary(b)) => Err(b),
            Err(other) => unreachable!("single-context arithmetic failed: {other}"),
        }
    };
    match ins {
        Instr::LoadI(d, k) => next.regs[d] = k,
        Instr::Mov(d, src) => next.regs[d] = s.regs[src],
        Instr::Neg(d, src) => next.regs[d] = -s.regs[src],
        Instr::Add(d, a, b) => next.regs[d] = lift(lm_add(p.policy(), val(a), val(b)))?,
        Instr::Mul(d, a, b) => next.regs[d] = lift(lm_mul(p.policy(), val(a), val(b)))?,
        Instr::Jmp(t) => next.pc = t,
        Instr::Jsgn(r, neg, zero, pos) => {
            next.pc = match s.regs[r].signum() {
                -1 => neg,
                0 => zero,
                _ => pos,
            }
        }
        Instr::Halt => return Ok(Step::Halt),
    }
    Ok(Step::Next(next))
}

/// `|Σ| = (|instructions| + 1) · (2M² + 1)^R`.
pub fn state_space_size(p: &Program) -> BigUint {
    let per_reg = BigUint::from(p.context().domain_len());
    BigUint::from(p.len() + 1) * num_traits::pow(per_reg, p.regs())
}

/// Decides whether execution from `init` halts, traps, or cycles, using the
/// default state-space cap.
pub fn decide_termination(p: &Program, init: &VmState, step_budget: Option<u64>) -> Result<RunOutcome> {
    decide_termination_capped(p, init, step_budget, DEFAULT_STATE_SPACE_CAP)
}

/// Simulates from `init`, recording every visited state exactly, until HALT,
/// a trap, or the first revisit. Without a budget, `|Σ|` must not exceed
/// `state_cap`, and a decision is then guaranteed within `|Σ| + 1` steps.
/// With a budget, the run stops with [`Error::BudgetExhausted`] after that
/// many undecided steps.
pub fn decide_termination_capped(
    p: &Program,
    init: &VmState,
    step_budget: Option<u64>,
    state_cap: u64,
) -> Result<RunOutcome> {
    check_state(p, init)?;
    let limit = match step_budget {
        Some(b) => b,
        None => {
            let size = state_space_size(p);
            if size > BigUint::from(state_cap) {
                return Err(Error::CapExceeded {
                    what: "state space",
                    size: u128::try_from(&size).unwrap_or(u128::MAX),
                    cap: state_cap as u128,
                });
            }
            u64::try_from(&size).expect("below cap") + 1
        }
    };
    let mut seen: HashMap<VmState, u64> = HashMap::new();
    let mut state = init.clone();
    let mut t = 0u64;
    loop {
        if let Some(&first) = seen.get(&state) {
            return Ok(RunOutcome::Cycle { prefix_len: first, period: t - first });
        }
        if t >= limit {
            return Err(Error::BudgetExhausted(limit));
        }
        let next = step(p, &state);
        t += 1;
        match next {
            Ok(Step::Halt) => return Ok(RunOutcome::Halted { steps: t, last: state }),
            Err(cause) => return Ok(RunOutcome::Trapped { steps: t, cause }),
            Ok(Step::Next(n)) => {
                seen.insert(std::mem::replace(&mut state, n), t - 1);
            }
        }
    }
}

/// Plain simulation without cycle detection: runs until HALT or a trap, or
/// fails with [`Error::BudgetExhausted`] after `max_steps` transitions.
pub fn run(p: &Program, init: &VmState, max_steps: u64) -> Result<(RunOutcome, VmState)> {
    check_state(p, init)?;
    let mut state = init.clone();
    for t in 1..=max_steps {
        match step(p, &state) {
            Ok(Step::Halt) => return Ok((RunOutcome::Halted { steps: t, last: state.clone() }, state)),
            Err(cause) => return Ok((RunOutcome::Trapped { steps: t, cause }, state)),
            Ok(Step::Next(n)) => state = n,
        }
    }
    Err(Error::BudgetExhausted(max_steps))
}

/// The state after exactly `n` transitions, or `None` if execution halted or
/// trapped first.
pub fn state_after(p: &Program, init: &VmState, n: u64) -> Option<VmState> {
    let mut state = init.clone();
    for _ in 0..n {
        match step(p, &state) {
            Ok(Step::Next(s)) => state = s,
            _ => return None,
        }
    }
    Some(state)
}

fn check_state(p: &Program, s: &VmState) -> Result<()> {
    if s.pc > p.len() || s.regs.len() != p.regs() {
        return Err(Error::InvalidProgram(format!("state {s} does not fit the program")));
    }
    for &k in &s.regs {
        LmValue::new(p.context(), k)?;
    }
    Ok(())
}
