//! C ABI over `lm-core`.
//!
//! Every entry point returns an [`LmStatus`]; results come back through out
//! pointers. On failure a message is kept per thread and can be fetched with
//! [`lm_last_error_message`]. Sets, functions and programs are opaque heap
//! handles released with their `_free` function. Grid values cross the
//! boundary as `(bits, k)` with value `k / (2^bits - 1)`.
//!
//! No call unwinds into C: panics are caught and reported as
//! [`LmStatus::Panic`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lm_core::expr::{self, FuncDef};
use lm_core::laws::{self, CheckOptions, Law};
use lm_core::q88::{Q88Trap, RoundingMode, Q88};
use lm_core::rational::{parse_rational, ratio};
use lm_core::vm::{self, Program, RunOutcome, VmState};
use lm_core::{BoundaryPolicy, BoundedSet, Error, LmValue, NumericContext};
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    Null = 1,
    InvalidArg = 2,
    /// A value left `[-M, M]` under the trap policy, or stepped off the grid.
    Boundary = 3,
    /// A set would exceed `M^2` elements.
    Cardinality = 4,
    Parse = 5,
    DivZero = 6,
    /// Derivative requested outside the polynomial fragment.
    Fragment = 7,
    /// Q8.8 result outside 16 bits.
    Trap = 8,
    /// An enumeration or state space is above the configured cap.
    Cap = 9,
    /// A step budget ran out before a decision.
    Budget = 10,
    ContextMismatch = 11,
    /// A result does not fit the C output type.
    Overflow = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmPolicy {
    Saturate = 0,
    Trap = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmRounding {
    Truncate = 0,
    Symmetric = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmLaw {
    Commutativity = 0,
    Associativity = 1,
    Distributivity = 2,
    Cancellation = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmOutcomeKind {
    Halted = 0,
    Cycle = 1,
    Trapped = 2,
}

/// Result of [`lm_program_decide`]. `steps` is set for halted and trapped
/// runs; `prefix` and `period` for cycles.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LmOutcome {
    pub kind: u32,
    pub steps: u64,
    pub prefix: u64,
    pub period: u64,
}

/// Summary of one exhaustive law check. `canonical` holds the numerators of
/// the `(M, M, -M)` associativity witness when `has_canonical` is set.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LmLawSummary {
    pub universe: u64,
    pub in_range_universe: u64,
    pub counterexample_count: u64,
    pub holds_universally: bool,
    pub in_range_holds: bool,
    pub meets_expectation: bool,
    pub has_canonical: bool,
    pub canonical: [i64; 3],
}

/// Opaque cardinality-bounded set.
pub struct LmSet(BoundedSet);

/// Opaque one-variable function.
pub struct LmFunction(FuncDef);

/// Opaque VM program.
pub struct LmProgram(Program);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(LmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidBits { .. } | Error::NumeratorOutOfRange { .. } => LmStatus::InvalidArg,
            Error::UnboundVariable(_) | Error::FreeVariable { .. } | Error::InvalidProgram(_) => LmStatus::InvalidArg,
            Error::ContextMismatch { .. } => LmStatus::ContextMismatch,
            Error::CapExceeded { .. } => LmStatus::Cap,
            Error::Boundary(_) => LmStatus::Boundary,
            Error::Cardinality(_) => LmStatus::Cardinality,
            Error::DivisionByZero => LmStatus::DivZero,
            Error::NonDifferentiableFragment(_) => LmStatus::Fragment,
            Error::BudgetExhausted(_) => LmStatus::Budget,
            Error::Parse(_) => LmStatus::Parse,
        };
        Fail(status, e.to_string())
    }
}

impl From<Q88Trap> for Fail {
    fn from(t: Q88Trap) -> Self {
        Fail(LmStatus::Trap, t.to_string())
    }
}

fn fail<T>(status: LmStatus, msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail(status, msg.into()))
}

/// Runs `f`, translating errors and panics into a status and the
/// thread-local message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            LmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LmStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail(LmStatus::Null, "null output pointer".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail(LmStatus::Null, "null handle".into()))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return fail(LmStatus::Null, "null string");
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(LmStatus::InvalidArg, "string is not UTF-8".into()))
}

fn ctx(bits: u32) -> Result<NumericContext, Fail> {
    Ok(NumericContext::new(bits)?)
}

fn policy(p: u32) -> Result<BoundaryPolicy, Fail> {
    match p {
        0 => Ok(BoundaryPolicy::Saturate),
        1 => Ok(BoundaryPolicy::Trap),
        _ => fail(LmStatus::InvalidArg, format!("unknown policy {p}")),
    }
}

fn value(c: NumericContext, k: i64) -> Result<LmValue, Fail> {
    Ok(c.value(k)?)
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Copy of the last error message on this thread, or null if the last call
/// succeeded. Release with [`lm_string_free`].
#[no_mangle]
pub extern "C" fn lm_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|c| c.clone().into_raw()).unwrap_or(ptr::null_mut()))
}

#[no_mangle]
pub unsafe extern "C" fn lm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static name of a status code, `"UNKNOWN"` for anything else.
#[no_mangle]
pub extern "C" fn lm_status_name(status: u32) -> *const c_char {
    const NAMES: [&CStr; 14] = [
        c"OK",
        c"NULL",
        c"INVALID_ARG",
        c"BOUNDARY",
        c"CARDINALITY",
        c"PARSE",
        c"DIV_ZERO",
        c"FRAGMENT",
        c"TRAP",
        c"CAP",
        c"BUDGET",
        c"CONTEXT_MISMATCH",
        c"OVERFLOW",
        c"PANIC",
    ];
    let s = NAMES.get(status as usize).copied().unwrap_or(c"UNKNOWN");
    s.as_ptr()
}

// ---- grid values -------------------------------------------------------

/// `M = 2^bits - 1`.
#[no_mangle]
pub unsafe extern "C" fn lm_context_m(bits: u32, out_m: *mut i64) -> LmStatus {
    guard(|| {
        *out(out_m)? = ctx(bits)?.m();
        Ok(())
    })
}

/// Maps `num/den` onto the grid; writes the numerator over `M`.
#[no_mangle]
pub unsafe extern "C" fn lm_value_map(bits: u32, num: i64, den: i64, out_k: *mut i64) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        if den == 0 {
            return fail(LmStatus::DivZero, "zero denominator");
        }
        *out(out_k)? = lm_core::value_map(c, &ratio(num, den)).numerator();
        Ok(())
    })
}

/// Like [`lm_value_map`] for a literal such as `"0.3"`, `"-3/10"` or `"7"`.
#[no_mangle]
pub unsafe extern "C" fn lm_value_map_str(bits: u32, literal: *const c_char, out_k: *mut i64) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        let x = parse_rational(text(literal)?)?;
        *out(out_k)? = lm_core::value_map(c, &x).numerator();
        Ok(())
    })
}

/// Whether `num/den` is a grid point.
#[no_mangle]
pub unsafe extern "C" fn lm_in_grid(bits: u32, num: i64, den: i64, out_flag: *mut bool) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        if den == 0 {
            return fail(LmStatus::DivZero, "zero denominator");
        }
        *out(out_flag)? = lm_core::in_grid(c, &ratio(num, den));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_add(bits: u32, policy_: u32, a: i64, b: i64, out_k: *mut i64) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        *out(out_k)? = lm_core::lm_add(policy(policy_)?, value(c, a)?, value(c, b)?)?.numerator();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_mul(bits: u32, policy_: u32, a: i64, b: i64, out_k: *mut i64) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        *out(out_k)? = lm_core::lm_mul(policy(policy_)?, value(c, a)?, value(c, b)?)?.numerator();
        Ok(())
    })
}

// ---- sets ------------------------------------------------------------------

#[no_mangle]
pub unsafe extern "C" fn lm_set_new(bits: u32, out_set: *mut *mut LmSet) -> LmStatus {
    guard(|| {
        let slot = out(out_set)?;
        *slot = Box::into_raw(Box::new(LmSet(BoundedSet::new(ctx(bits)?))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_set_free(set: *mut LmSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Inserts `k/M` in place. On a cardinality violation the set is unchanged.
#[no_mangle]
pub unsafe extern "C" fn lm_set_insert(set: *mut LmSet, k: i64) -> LmStatus {
    guard(|| {
        let s = out(set)?;
        let v = value(s.0.context(), k)?;
        s.0 = s.0.insert(v)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_set_contains(set: *const LmSet, k: i64, out_flag: *mut bool) -> LmStatus {
    guard(|| {
        let s = handle(set)?;
        *out(out_flag)? = s.0.contains(value(s.0.context(), k)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_set_card(set: *const LmSet, out_card: *mut u64) -> LmStatus {
    guard(|| {
        *out(out_card)? = handle(set)?.0.card();
        Ok(())
    })
}

/// Maximum cardinality, `M^2`.
#[no_mangle]
pub unsafe extern "C" fn lm_set_capacity(set: *const LmSet, out_cap: *mut u64) -> LmStatus {
    guard(|| {
        *out(out_cap)? = handle(set)?.0.capacity();
        Ok(())
    })
}

/// New handle holding `a ∪ b`.
#[no_mangle]
pub unsafe extern "C" fn lm_set_union(a: *const LmSet, b: *const LmSet, out_set: *mut *mut LmSet) -> LmStatus {
    guard(|| {
        let u = handle(a)?.0.union(&handle(b)?.0)?;
        *out(out_set)? = Box::into_raw(Box::new(LmSet(u)));
        Ok(())
    })
}

/// New handle holding `a ∩ b`.
#[no_mangle]
pub unsafe extern "C" fn lm_set_intersect(a: *const LmSet, b: *const LmSet, out_set: *mut *mut LmSet) -> LmStatus {
    guard(|| {
        let i = handle(a)?.0.intersect(&handle(b)?.0)?;
        *out(out_set)? = Box::into_raw(Box::new(LmSet(i)));
        Ok(())
    })
}

// ---- functions ---------------------------------------------------------

/// Parses a one-variable function body such as `"0.3*x"`. The variable is
/// whichever single name occurs; a constant body takes `x`.
#[no_mangle]
pub unsafe extern "C" fn lm_function_parse(body: *const c_char, out_fn: *mut *mut LmFunction) -> LmStatus {
    guard(|| {
        let e = expr::parse_expr(text(body)?)?;
        let vars = e.free_vars();
        if vars.len() > 1 {
            return fail(LmStatus::InvalidArg, format!("expected one variable, found {}", vars.len()));
        }
        let param = vars.into_iter().next().unwrap_or_else(|| "x".into());
        let f = FuncDef::new(param, e)?;
        *out(out_fn)? = Box::into_raw(Box::new(LmFunction(f)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_function_free(f: *mut LmFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `f^M(k/M)`: exact evaluation mapped once onto the grid.
#[no_mangle]
pub unsafe extern "C" fn lm_function_eval(
    f: *const LmFunction,
    bits: u32,
    policy_: u32,
    k: i64,
    out_k: *mut i64,
) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        let mapped = expr::map_function(c, policy(policy_)?, &handle(f)?.0);
        *out(out_k)? = mapped.apply(value(c, k)?)?.numerator();
        Ok(())
    })
}

/// Grid value of the exact derivative at `k/M`.
#[no_mangle]
pub unsafe extern "C" fn lm_function_mapped_derivative(
    f: *const LmFunction,
    bits: u32,
    k: i64,
    out_k: *mut i64,
) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        *out(out_k)? = expr::mapped_derivative(c, &handle(f)?.0, value(c, k)?)?.numerator();
        Ok(())
    })
}

/// Naive grid difference quotient `(f^M(x + 1/M) - f^M(x)) * M` at `k/M`.
#[no_mangle]
pub unsafe extern "C" fn lm_function_finite_difference(
    f: *const LmFunction,
    bits: u32,
    k: i64,
    out_k: *mut i64,
) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        *out(out_k)? = expr::grid_finite_difference(c, &handle(f)?.0, value(c, k)?)?.numerator();
        Ok(())
    })
}

// ---- Q8.8 ------------------------------------------------------------------

#[no_mangle]
pub unsafe extern "C" fn lm_q88_add(a: i16, b: i16, out_raw: *mut i16) -> LmStatus {
    guard(|| {
        *out(out_raw)? = Q88::from_raw(a).add(Q88::from_raw(b))?.raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_q88_mul(a: i16, b: i16, rounding: u32, out_raw: *mut i16) -> LmStatus {
    guard(|| {
        let mode = match rounding {
            0 => RoundingMode::Truncate,
            1 => RoundingMode::SymmetricRound,
            _ => return fail(LmStatus::InvalidArg, format!("unknown rounding {rounding}")),
        };
        *out(out_raw)? = Q88::from_raw(a).mul(Q88::from_raw(b), mode)?.raw();
        Ok(())
    })
}

/// Raw word for `floor(256 * num/den)`; traps outside 16 bits.
#[no_mangle]
pub unsafe extern "C" fn lm_q88_from_ratio(num: i64, den: i64, out_raw: *mut i16) -> LmStatus {
    guard(|| {
        if den == 0 {
            return fail(LmStatus::DivZero, "zero denominator");
        }
        *out(out_raw)? = Q88::from_rational(&ratio(num, den))?.raw();
        Ok(())
    })
}

// ---- laws ------------------------------------------------------------------

/// Exhaustive check of one law; `cap` bounds the operand-tuple count
/// (0 selects the default).
#[no_mangle]
pub unsafe extern "C" fn lm_check_law(bits: u32, law: u32, cap: u64, out_summary: *mut LmLawSummary) -> LmStatus {
    guard(|| {
        let c = ctx(bits)?;
        let law = match law {
            0 => Law::Commutativity,
            1 => Law::AssociativityAdd,
            2 => Law::Distributivity,
            3 => Law::Cancellation,
            _ => return fail(LmStatus::InvalidArg, format!("unknown law {law}")),
        };
        let mut opts = CheckOptions { max_counterexamples: Some(0), ..CheckOptions::default() };
        if cap != 0 {
            opts.cap = cap;
        }
        let slot = out(out_summary)?;
        let r = laws::check_law(c, law, opts)?;
        let mut s = LmLawSummary {
            universe: r.universe,
            in_range_universe: r.in_range_universe,
            counterexample_count: r.counterexample_count,
            holds_universally: r.holds_universally,
            in_range_holds: r.in_range_holds,
            meets_expectation: r.meets_expectation(),
            ..LmLawSummary::default()
        };
        if let Some(ce) = &r.canonical {
            s.has_canonical = true;
            for (dst, v) in s.canonical.iter_mut().zip(&ce.operands) {
                *dst = v.numerator();
            }
        }
        *slot = s;
        Ok(())
    })
}

// ---- VM --------------------------------------------------------------------

/// Parses a program in the text format (`#bits`, `#regs`, optional
/// `#policy`, one instruction per line).
#[no_mangle]
pub unsafe extern "C" fn lm_program_parse(src: *const c_char, out_prog: *mut *mut LmProgram) -> LmStatus {
    guard(|| {
        let p = Program::parse(text(src)?)?;
        *out(out_prog)? = Box::into_raw(Box::new(LmProgram(p)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lm_program_free(p: *mut LmProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

#[no_mangle]
pub unsafe extern "C" fn lm_program_regs(p: *const LmProgram, out_regs: *mut usize) -> LmStatus {
    guard(|| {
        *out(out_regs)? = handle(p)?.0.regs();
        Ok(())
    })
}

/// `|Σ| = (len + 1) * (2 M^2 + 1)^R`. `OVERFLOW` when it needs more than
/// 64 bits.
#[no_mangle]
pub unsafe extern "C" fn lm_program_state_space(p: *const LmProgram, out_size: *mut u64) -> LmStatus {
    guard(|| {
        let size = vm::state_space_size(&handle(p)?.0);
        match size.to_u64() {
            Some(n) => {
                *out(out_size)? = n;
                Ok(())
            }
            None => fail(LmStatus::Overflow, format!("state space {size} does not fit 64 bits")),
        }
    })
}

/// Decides termination from `pc = 0` with the given register numerators
/// (`regs` may be null when `nregs` is 0; registers past `nregs` start at zero). `budget` 0
/// means no budget.
#[no_mangle]
pub unsafe extern "C" fn lm_program_decide(
    p: *const LmProgram,
    regs: *const i64,
    nregs: usize,
    budget: u64,
    out_outcome: *mut LmOutcome,
) -> LmStatus {
    guard(|| {
        let prog = &handle(p)?.0;
        let init = if nregs == 0 {
            VmState::zeroed(prog)
        } else {
            if regs.is_null() {
                return fail(LmStatus::Null, "null register array");
            }
            VmState::with_registers(prog, std::slice::from_raw_parts(regs, nregs))?
        };
        let slot = out(out_outcome)?;
        let outcome = vm::decide_termination(prog, &init, (budget != 0).then_some(budget))?;
        *slot = match outcome {
            RunOutcome::Halted { steps, .. } => LmOutcome { kind: LmOutcomeKind::Halted as u32, steps, ..Default::default() },
            RunOutcome::Cycle { prefix_len, period } => LmOutcome {
                kind: LmOutcomeKind::Cycle as u32,
                prefix: prefix_len,
                period,
                ..Default::default()
            },
            RunOutcome::Trapped { steps, .. } => {
                LmOutcome { kind: LmOutcomeKind::Trapped as u32, steps, ..Default::default() }
            }
        };
        Ok(())
    })
}

/// Renders `k/M` as text. Release with [`lm_string_free`]; null on error.
#[no_mangle]
pub extern "C" fn lm_value_to_string(bits: u32, k: i64) -> *mut c_char {
    match NumericContext::new(bits).and_then(|c| c.value(k)) {
        Ok(v) => into_c_string(v.to_string()),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}
