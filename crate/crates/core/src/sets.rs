//! Finite sets of grid values whose cardinality never exceeds `M^2`.

use std::collections::BTreeSet;
use std::fmt;

use crate::domain::{LmValue, NumericContext};
use crate::error::{CardinalityError, Error, Result};

/// An immutable set of grid values with capacity `M^2`. Elements are kept by
/// numerator, so iteration is ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundedSet {
    ctx: NumericContext,
    elems: BTreeSet<i64>,
}

impl BoundedSet {
    pub fn new(ctx: NumericContext) -> Self {
        Self { ctx, elems: BTreeSet::new() }
    }

    pub fn context(&self) -> NumericContext {
        self.ctx
    }

    pub fn capacity(&self) -> u64 {
        self.ctx.m_squared() as u64
    }

    pub fn card(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, v: LmValue) -> bool {
        v.context() == self.ctx && self.elems.contains(&v.numerator())
    }

    pub fn iter(&self) -> impl Iterator<Item = LmValue> + '_ {
        self.elems.iter().map(move |&k| self.ctx.value(k).expect("members are grid values"))
    }

    pub fn insert(&self, v: LmValue) -> Result<BoundedSet> {
        self.check_context(v.context())?;
        if self.elems.contains(&v.numerator()) {
            return Ok(self.clone());
        }
        if self.card() + 1 > self.capacity() {
            return Err(CardinalityError { attempted: self.card() + 1, capacity: self.capacity() }.into());
        }
        let mut elems = self.elems.clone();
        elems.insert(v.numerator());
        Ok(Self { ctx: self.ctx, elems })
    }

    pub fn union(&self, other: &BoundedSet) -> Result<BoundedSet> {
        self.check_context(other.ctx)?;
        let elems: BTreeSet<i64> = self.elems.union(&other.elems).copied().collect();
        if elems.len() as u64 > self.capacity() {
            return Err(CardinalityError { attempted: elems.len() as u64, capacity: self.capacity() }.into());
        }
        Ok(Self { ctx: self.ctx, elems })
    }

    pub fn intersect(&self, other: &BoundedSet) -> Result<BoundedSet> {
        self.check_context(other.ctx)?;
        let elems = self.elems.intersection(&other.elems).copied().collect();
        Ok(Self { ctx: self.ctx, elems })
    }

    /// Builds a set from values, failing on the first insert past capacity.
    pub fn from_values(ctx: NumericContext, values: impl IntoIterator<Item = LmValue>) -> Result<Self> {
        values.into_iter().try_fold(Self::new(ctx), |s, v| s.insert(v))
    }

    fn check_context(&self, other: NumericContext) -> Result<()> {
        if other != self.ctx {
            return Err(Error::ContextMismatch { left: self.ctx.m(), right: other.m() });
        }
        Ok(())
    }
}

impl fmt::Display for BoundedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}/{}", k, self.ctx.m())?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(bits: u32) -> NumericContext {
        NumericContext::new(bits).unwrap()
    }

    fn set(c: NumericContext, ks: &[i64]) -> BoundedSet {
        BoundedSet::from_values(c, ks.iter().map(|&k| c.value(k).unwrap())).unwrap()
    }

    #[test]
    fn capacity_is_m_squared() {
        assert_eq!(BoundedSet::new(ctx(1)).capacity(), 1);
        assert_eq!(BoundedSet::new(ctx(2)).capacity(), 9);
        assert_eq!(BoundedSet::new(ctx(8)).capacity(), 65025);
        assert!(BoundedSet::new(ctx(2)).is_empty());
    }

    #[test]
    fn insert_is_idempotent_and_bounded() {
        let c = ctx(1);
        let s = BoundedSet::new(c).insert(c.zero()).unwrap();
        assert_eq!(s.to_string(), "{0/1}");
        let again = s.insert(c.zero()).unwrap();
        assert_eq!(again, s);
        let err = s.insert(c.unit()).unwrap_err();
        assert_eq!(err, Error::Cardinality(CardinalityError { attempted: 2, capacity: 1 }));
    }

    #[test]
    fn union_dedups_and_checks_capacity() {
        let c = ctx(2);
        let u = set(c, &[0, 1]).union(&set(c, &[1, 2])).unwrap();
        assert_eq!(u.to_string(), "{0/3, 1/3, 2/3}");
        let empty = BoundedSet::new(c);
        assert_eq!(empty.union(&empty).unwrap(), empty);
        let c1 = ctx(1);
        assert!(matches!(set(c1, &[0]).union(&set(c1, &[1])), Err(Error::Cardinality(_))));
    }

    #[test]
    fn intersect_and_card() {
        let c = ctx(2);
        let i = set(c, &[0, 3]).intersect(&set(c, &[3])).unwrap();
        assert_eq!(i.to_string(), "{3/3}");
        assert_eq!(BoundedSet::new(c).card(), 0);
        let full = set(c, &(-9..0).collect::<Vec<_>>());
        assert_eq!(full.card(), 9);
    }

    #[test]
    fn contexts_do_not_mix() {
        let s = BoundedSet::new(ctx(2));
        assert!(matches!(s.insert(ctx(1).zero()), Err(Error::ContextMismatch { .. })));
        assert!(s.union(&BoundedSet::new(ctx(3))).is_err());
        assert!(!s.contains(ctx(1).zero()));
    }

    #[test]
    fn iteration_is_ascending() {
        let c = ctx(2);
        let s = set(c, &[5, -3, 0, 9]);
        let ks: Vec<i64> = s.iter().map(|v| v.numerator()).collect();
        assert_eq!(ks, vec![-3, 0, 5, 9]);
    }
}
