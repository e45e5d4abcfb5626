//! A register machine over grid values. Its state space is finite, so a run
//! that never stops must revisit a state; [`decide_termination`] finds the
//! outcome by exact cycle detection.

mod exec;
mod program;

pub use exec::{
    decide_termination, decide_termination_capped, run, state_after, state_space_size, step, RunOutcome, Step,
    VmState, DEFAULT_STATE_SPACE_CAP,
};
pub use program::{Instr, Program, Reg};
