use std::fmt;

use crate::domain::{BoundaryPolicy, NumericContext};
use crate::error::{Error, Result};

pub type Reg = usize;

/// Jump targets are instruction indices; a target equal to the program
/// length means "halt".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instr {
    /// `rd := k/M`
    LoadI(Reg, i64),
    Mov(Reg, Reg),
    Add(Reg, Reg, Reg),
    Mul(Reg, Reg, Reg),
    Neg(Reg, Reg),
    Jmp(usize),
    /// Branch to the first, second or third target when the register is
    /// negative, zero or positive.
    Jsgn(Reg, usize, usize, usize),
    Halt,
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Instr::LoadI(r, k) => write!(f, "LOADI r{r}, {k}"),
            Instr::Mov(d, s) => write!(f, "MOV r{d}, r{s}"),
            Instr::Add(d, a, b) => write!(f, "ADD r{d}, r{a}, r{b}"),
            Instr::Mul(d, a, b) => write!(f, "MUL r{d}, r{a}, r{b}"),
            Instr::Neg(d, s) => write!(f, "NEG r{d}, r{s}"),
            Instr::Jmp(t) => write!(f, "JMP {t}"),
            Instr::Jsgn(r, n, z, p) => write!(f, "JSGN r{r}, {n}, {z}, {p}"),
            Instr::Halt => f.write_str("HALT"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    instrs: Vec<Instr>,
    regs: usize,
    ctx: NumericContext,
    policy: BoundaryPolicy,
}

impl Program {
    pub fn new(instrs: Vec<Instr>, regs: usize, ctx: NumericContext, policy: BoundaryPolicy) -> Result<Self> {
        if regs == 0 {
            return Err(Error::InvalidProgram("register count must be at least 1".into()));
        }
        let len = instrs.len();
        let bad = |pc: usize, why: String| Error::InvalidProgram(format!("instruction {pc}: {why}"));
        for (pc, ins) in instrs.iter().enumerate() {
            let (reg_list, targets): (&[Reg], &[usize]) = match ins {
                Instr::LoadI(r, _) => (std::slice::from_ref(r), &[]),
                Instr::Mov(d, s) | Instr::Neg(d, s) => (&[*d, *s][..], &[]),
                Instr::Add(d, a, b) | Instr::Mul(d, a, b) => (&[*d, *a, *b][..], &[]),
                Instr::Jmp(t) => (&[], std::slice::from_ref(t)),
                Instr::Jsgn(r, n, z, p) => (std::slice::from_ref(r), &[*n, *z, *p][..]),
                Instr::Halt => (&[], &[]),
            };
            if let Some(r) = reg_list.iter().find(|&&r| r >= regs) {
                return Err(bad(pc, format!("register r{r} out of range (R={regs})")));
            }
            if let Some(t) = targets.iter().find(|&&t| t > len) {
                return Err(bad(pc, format!("jump target {t} beyond program end {len}")));
            }
            if let Instr::LoadI(_, k) = ins {
                if k.unsigned_abs() > ctx.m_squared() as u64 {
                    return Err(bad(pc, format!("constant {k} outside +/-{}", ctx.m_squared())));
                }
            }
        }
        Ok(Self { instrs, regs, ctx, policy })
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn regs(&self) -> usize {
        self.regs
    }

    pub fn context(&self) -> NumericContext {
        self.ctx
    }

    pub fn policy(&self) -> BoundaryPolicy {
        self.policy
    }

    /// Parses the text program format:
    ///
    /// ```text
    /// #bits 1
    /// #regs 2
    /// #policy saturate      ; optional, default saturate
    /// ADD r0, r0, r1        ; one instruction per line
    /// JMP 0
    /// ```
    pub fn parse(src: &str) -> Result<Self> {
        let mut bits = None;
        let mut regs = None;
        let mut policy = BoundaryPolicy::Saturate;
        let mut raw = Vec::new();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.split(';').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |why: &str| Error::Parse(format!("line {}: {why}: `{line}`", lineno + 1));
            if let Some(header) = line.strip_prefix('#') {
                let mut parts = header.split_whitespace();
                let key = parts.next().ok_or_else(|| err("empty header"))?;
                let value = parts.next().ok_or_else(|| err("header without value"))?;
                if parts.next().is_some() {
                    return Err(err("trailing header tokens"));
                }
                match key {
                    "bits" => bits = Some(value.parse::<u32>().map_err(|_| err("bad bit count"))?),
                    "regs" => regs = Some(value.parse::<usize>().map_err(|_| err("bad register count"))?),
                    "policy" => {
                        policy = match value {
                            "saturate" => BoundaryPolicy::Saturate,
                            "trap" => BoundaryPolicy::Trap,
                            _ => return Err(err("policy must be saturate or trap")),
                        }
                    }
                    _ => return Err(err("unknown header")),
                }
                continue;
            }
            raw.push(parse_instr(line).map_err(|why| err(&why))?);
        }
        let bits = bits.ok_or_else(|| Error::Parse("missing `#bits` header".into()))?;
        let regs = regs.ok_or_else(|| Error::Parse("missing `#regs` header".into()))?;
        Program::new(raw, regs, NumericContext::new(bits)?, policy)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "#bits {}", self.ctx.bits())?;
        writeln!(f, "#regs {}", self.regs)?;
        let policy = match self.policy {
            BoundaryPolicy::Saturate => "saturate",
            BoundaryPolicy::Trap => "trap",
        };
        writeln!(f, "#policy {policy}")?;
        for ins in &self.instrs {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

fn parse_instr(line: &str) -> std::result::Result<Instr, String> {
    let (op, rest) = match line.split_once(char::is_whitespace) {
        Some((op, rest)) => (op, rest.trim()),
        None => (line, ""),
    };
    let args: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(',').map(str::trim).collect() };
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{op} takes {n} operand(s), got {}", args.len()))
        }
    };
    let reg = |s: &str| -> std::result::Result<Reg, String> {
        s.strip_prefix('r')
            .or_else(|| s.strip_prefix('R'))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| format!("expected register, got `{s}`"))
    };
    let target = |s: &str| s.parse::<usize>().map_err(|_| format!("expected instruction index, got `{s}`"));
    match op.to_ascii_uppercase().as_str() {
        "LOADI" => {
            want(2)?;
            let k = args[1].parse::<i64>().map_err(|_| format!("expected integer numerator, got `{}`", args[1]))?;
            Ok(Instr::LoadI(reg(args[0])?, k))
        }
        "MOV" => {
            want(2)?;
            Ok(Instr::Mov(reg(args[0])?, reg(args[1])?))
        }
        "NEG" => {
            want(2)?;
            Ok(Instr::Neg(reg(args[0])?, reg(args[1])?))
        }
        "ADD" => {
            want(3)?;
            Ok(Instr::Add(reg(args[0])?, reg(args[1])?, reg(args[2])?))
        }
        "MUL" => {
            want(3)?;
            Ok(Instr::Mul(reg(args[0])?, reg(args[1])?, reg(args[2])?))
        }
        "JMP" => {
            want(1)?;
            Ok(Instr::Jmp(target(args[0])?))
        }
        "JSGN" => {
            want(4)?;
            Ok(Instr::Jsgn(reg(args[0])?, target(args[1])?, target(args[2])?, target(args[3])?))
        }
        "HALT" => {
            want(0)?;
            Ok(Instr::Halt)
        }
        other => Err(format!("unknown opcode `{other}`")),
    }
}
