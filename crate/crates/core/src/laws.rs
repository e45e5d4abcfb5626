//! Exhaustive checks of algebraic laws over the grid, split into two tiers:
//! every operand tuple, and the in-range tuples whose intermediate classical
//! results all stay on the grid.
//!
//! `⊕` and `⊗` here are the closed binary operators, so every application
//! maps immediately (the snap-each-step reading). That is where boundary
//! counterexamples live; snap-at-end composition is covered by the
//! expression module instead.

use std::fmt;

use rayon::prelude::*;

use crate::domain::{enumerate_domain, lm_add, lm_mul, BoundaryPolicy, LmValue, NumericContext, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Law {
    Commutativity,
    AssociativityAdd,
    Distributivity,
    Cancellation,
}

impl Law {
    pub const ALL: [Law; 4] = [Law::Commutativity, Law::AssociativityAdd, Law::Distributivity, Law::Cancellation];

    pub fn name(self) -> &'static str {
        match self {
            Law::Commutativity => "commutativity",
            Law::AssociativityAdd => "associativity",
            Law::Distributivity => "distributivity",
            Law::Cancellation => "cancellation",
        }
    }

    pub fn from_name(name: &str) -> Option<Law> {
        Law::ALL.into_iter().find(|l| l.name() == name)
    }

    fn arity(self) -> u32 {
        match self {
            Law::Commutativity => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A violating operand tuple. `left` and `right` are the two sides the law
/// claims equal: `x⊕y`/`y⊕x` (or `⊗`, see `op`) for commutativity, the two
/// groupings for associativity and distributivity, and `y`/`z` for
/// cancellation (whose premise `x⊕y = x⊕z` held).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Counterexample {
    pub operands: Vec<LmValue>,
    pub left: LmValue,
    pub right: LmValue,
    pub op: &'static str,
    pub in_range: bool,
}

impl Counterexample {
    fn sort_key(&self) -> Vec<i64> {
        self.operands.iter().map(LmValue::numerator).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub law: Law,
    pub context: NumericContext,
    /// Number of operand tuples examined.
    pub universe: u64,
    /// Number of tuples in the in-range tier.
    pub in_range_universe: u64,
    pub holds_universally: bool,
    pub in_range_holds: bool,
    pub counterexample_count: u64,
    /// Sorted by operand numerators; truncated to the configured maximum.
    pub counterexamples: Vec<Counterexample>,
    /// For associativity, the `(M, M, -M)` triple when it is a counterexample.
    pub canonical: Option<Counterexample>,
}

impl LawReport {
    /// Whether the report shows what the theory predicts for this law.
    pub fn meets_expectation(&self) -> bool {
        match self.law {
            Law::Commutativity => self.holds_universally && self.in_range_holds,
            Law::AssociativityAdd => self.in_range_holds && self.canonical.is_some(),
            Law::Distributivity => self.in_range_holds,
            Law::Cancellation => self.in_range_holds && self.counterexample_count > 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Largest admissible number of operand tuples.
    pub cap: u64,
    /// Keep at most this many counterexamples (all are still counted).
    pub max_counterexamples: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_ENUMERATION_CAP, max_counterexamples: None }
    }
}

pub fn check_commutativity(ctx: NumericContext) -> Result<LawReport> {
    check_law(ctx, Law::Commutativity, CheckOptions::default())
}

pub fn check_associativity_add(ctx: NumericContext) -> Result<LawReport> {
    check_law(ctx, Law::AssociativityAdd, CheckOptions::default())
}

pub fn check_distributivity(ctx: NumericContext) -> Result<LawReport> {
    check_law(ctx, Law::Distributivity, CheckOptions::default())
}

pub fn check_cancellation(ctx: NumericContext) -> Result<LawReport> {
    check_law(ctx, Law::Cancellation, CheckOptions::default())
}

const SAT: BoundaryPolicy = BoundaryPolicy::Saturate;

fn add(x: LmValue, y: LmValue) -> LmValue {
    lm_add(SAT, x, y).expect("same context")
}

fn mul(x: LmValue, y: LmValue) -> LmValue {
    lm_mul(SAT, x, y).expect("same context")
}

/// Grid membership of classical results, on numerators: a sum of grid
/// points is `(a+b)/M`; a product is `ab/M^2`, on the grid iff `M | ab`.
struct Grid {
    m: i128,
    m2: i128,
    m3: i128,
}

impl Grid {
    fn new(ctx: NumericContext) -> Self {
        let m = ctx.m() as i128;
        Self { m, m2: m * m, m3: m * m * m }
    }

    fn sum_in(&self, ks: &[i64]) -> bool {
        ks.iter().map(|&k| k as i128).sum::<i128>().abs() <= self.m2
    }

    /// `product` is the numerator over `M^2`.
    fn product_in(&self, product: i128) -> bool {
        product % self.m == 0 && product.abs() <= self.m3
    }
}

/// Evaluates one tuple into the equalities the law claims, as
/// `(left, right, op, in_range)`. Empty when the law's premise does not hold.
fn evaluate(law: Law, grid: &Grid, ops: &[LmValue]) -> Vec<(LmValue, LmValue, &'static str, bool)> {
    match law {
        Law::Commutativity => {
            let (x, y) = (ops[0], ops[1]);
            let (a, b) = (x.numerator(), y.numerator());
            let in_add = grid.sum_in(&[a, b]);
            let in_mul = grid.product_in(a as i128 * b as i128);
            vec![(add(x, y), add(y, x), "add", in_add), (mul(x, y), mul(y, x), "mul", in_mul)]
        }
        Law::AssociativityAdd => {
            let (x, y, z) = (ops[0], ops[1], ops[2]);
            let in_range = in_range_tier(law, grid, ops);
            vec![(add(add(x, y), z), add(x, add(y, z)), "add", in_range)]
        }
        Law::Distributivity => {
            let (x, y, z) = (ops[0], ops[1], ops[2]);
            let in_range = in_range_tier(law, grid, ops);
            vec![(mul(x, add(y, z)), add(mul(x, y), mul(x, z)), "mul", in_range)]
        }
        Law::Cancellation => {
            let (x, y, z) = (ops[0], ops[1], ops[2]);
            if y == z || add(x, y) != add(x, z) {
                return Vec::new();
            }
            let in_range = in_range_tier(law, grid, ops);
            // premise held and y != z: always a violation
            vec![(y, z, "add", in_range)]
        }
    }
}

fn in_range_tier(law: Law, grid: &Grid, ops: &[LmValue]) -> bool {
    let ks: Vec<i64> = ops.iter().map(LmValue::numerator).collect();
    match law {
        Law::Commutativity => true,
        Law::AssociativityAdd => grid.sum_in(&ks[..2]) && grid.sum_in(&ks[1..]) && grid.sum_in(&ks),
        Law::Distributivity => {
            let (a, b, c) = (ks[0] as i128, ks[1] as i128, ks[2] as i128);
            // y + z is an intermediate result too, so it must also be on the grid.
            (b + c).abs() <= grid.m2 && grid.product_in(a * (b + c)) && grid.product_in(a * b) && grid.product_in(a * c)
        }
        Law::Cancellation => grid.sum_in(&[ks[0], ks[1]]) && grid.sum_in(&[ks[0], ks[2]]),
    }
}

#[derive(Default)]
struct Partial {
    in_range_universe: u64,
    count: u64,
    in_range_violations: u64,
    found: Vec<Counterexample>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.in_range_universe += other.in_range_universe;
        self.count += other.count;
        self.in_range_violations += other.in_range_violations;
        self.found.extend(other.found);
        self
    }
}

/// Exhaustively checks `law` over every operand tuple of `ctx`'s grid.
/// Outer operands are split across threads; the merged counterexample list is
/// sorted by operand numerators, so reports are deterministic.
pub fn check_law(ctx: NumericContext, law: Law, opts: CheckOptions) -> Result<LawReport> {
    let domain = enumerate_domain(ctx, opts.cap)?;
    let n = domain.len() as u128;
    let universe = n.pow(law.arity());
    if universe > opts.cap as u128 {
        return Err(Error::CapExceeded { what: "operand tuple space", size: universe, cap: opts.cap as u128 });
    }
    let grid = Grid::new(ctx);
    let partial = domain
        .par_iter()
        .map(|&x| {
            let mut acc = Partial::default();
            let mut visit = |ops: &[LmValue]| {
                if in_range_tier(law, &grid, ops) {
                    acc.in_range_universe += 1;
                }
                for (left, right, op, in_range) in evaluate(law, &grid, ops) {
                    if left == right {
                        continue;
                    }
                    acc.count += 1;
                    if in_range {
                        acc.in_range_violations += 1;
                    }
                    acc.found.push(Counterexample { operands: ops.to_vec(), left, right, op, in_range });
                }
            };
            for &y in &domain {
                if law.arity() == 2 {
                    visit(&[x, y]);
                } else {
                    for &z in &domain {
                        visit(&[x, y, z]);
                    }
                }
            }
            acc
        })
        .reduce(Partial::default, Partial::merge);

    let mut found = partial.found;
    found.sort_by_key(|c| (c.sort_key(), c.op));
    let canonical = match law {
        Law::AssociativityAdd => {
            let key = vec![ctx.m_squared(), ctx.m_squared(), -ctx.m_squared()];
            found.iter().find(|c| c.sort_key() == key).cloned()
        }
        _ => None,
    };
    if let Some(max) = opts.max_counterexamples {
        found.truncate(max);
    }
    Ok(LawReport {
        law,
        context: ctx,
        universe: universe as u64,
        in_range_universe: partial.in_range_universe,
        holds_universally: partial.count == 0,
        in_range_holds: partial.in_range_violations == 0,
        counterexample_count: partial.count,
        counterexamples: found,
        canonical,
    })
}

/// Re-evaluates a counterexample through the arithmetic primitives and
/// confirms it still violates `law`.
pub fn replay(law: Law, c: &Counterexample) -> bool {
    let o = &c.operands;
    let (left, right) = match (law, c.op) {
        (Law::Commutativity, "add") => (add(o[0], o[1]), add(o[1], o[0])),
        (Law::Commutativity, _) => (mul(o[0], o[1]), mul(o[1], o[0])),
        (Law::AssociativityAdd, _) => (add(add(o[0], o[1]), o[2]), add(o[0], add(o[1], o[2]))),
        (Law::Distributivity, _) => (mul(o[0], add(o[1], o[2])), add(mul(o[0], o[1]), mul(o[0], o[2]))),
        (Law::Cancellation, _) => {
            if add(o[0], o[1]) != add(o[0], o[2]) {
                return false;
            }
            (o[1], o[2])
        }
    };
    left == c.left && right == c.right && left != right
}
