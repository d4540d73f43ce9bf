//! Extended-real costs: exact non-negative rationals plus an absorbing infinity.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::relation::{Label, Var};

/// A cost value: a finite exact rational or `Infinite`.
///
/// `Infinite` absorbs under addition and compares greater than every finite
/// value, so forbidden labels can be priced out without a big-M constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendedCost {
    Finite(BigRational),
    Infinite,
}

impl ExtendedCost {
    pub fn zero() -> Self {
        ExtendedCost::Finite(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        ExtendedCost::Finite(BigRational::from_integer(n.into()))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedCost::Infinite)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            ExtendedCost::Finite(r) => Some(r),
            ExtendedCost::Infinite => None,
        }
    }
}

impl fmt::Display for ExtendedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCost::Finite(r) => write!(f, "{r}"),
            ExtendedCost::Infinite => write!(f, "inf"),
        }
    }
}

impl PartialOrd for ExtendedCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedCost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => a.cmp(b),
            (ExtendedCost::Finite(_), ExtendedCost::Infinite) => Ordering::Less,
            (ExtendedCost::Infinite, ExtendedCost::Finite(_)) => Ordering::Greater,
            (ExtendedCost::Infinite, ExtendedCost::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for ExtendedCost {
    type Output = ExtendedCost;

    fn add(self, rhs: ExtendedCost) -> ExtendedCost {
        match (self, rhs) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => ExtendedCost::Finite(a + b),
            _ => ExtendedCost::Infinite,
        }
    }
}

impl<'a> Add<&'a ExtendedCost> for ExtendedCost {
    type Output = ExtendedCost;

    fn add(self, rhs: &'a ExtendedCost) -> ExtendedCost {
        match (self, rhs) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => ExtendedCost::Finite(a + b),
            _ => ExtendedCost::Infinite,
        }
    }
}

/// Per-(variable, label) costs for an instance; finite entries are `>= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    num_vars: usize,
    domain_size: usize,
    entries: Vec<ExtendedCost>,
}

impl CostMatrix {
    pub fn new_zero(num_vars: usize, domain_size: usize) -> Self {
        CostMatrix {
            num_vars,
            domain_size,
            entries: vec![ExtendedCost::zero(); num_vars * domain_size],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn get(&self, var: Var, label: Label) -> &ExtendedCost {
        &self.entries[var * self.domain_size + label]
    }

    pub fn set(&mut self, var: Var, label: Label, cost: ExtendedCost) -> Result<()> {
        if let ExtendedCost::Finite(r) = &cost {
            if r.is_negative() {
                return Err(Error::NegativeCost { var, label });
            }
        }
        self.entries[var * self.domain_size + label] = cost;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, Label, &ExtendedCost)> {
        let d = self.domain_size;
        self.entries
            .iter()
            .enumerate()
            .map(move |(i, c)| (i / d, i % d, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(n: i64) -> ExtendedCost {
        ExtendedCost::from_integer(n)
    }

    #[test]
    fn infinity_absorbs_and_dominates() {
        assert_eq!(fin(3) + fin(4), fin(7));
        assert_eq!(fin(3) + ExtendedCost::Infinite, ExtendedCost::Infinite);
        assert_eq!(ExtendedCost::Infinite + fin(3), ExtendedCost::Infinite);
        assert!(fin(1_000_000) < ExtendedCost::Infinite);
        assert_eq!(
            ExtendedCost::Infinite.cmp(&ExtendedCost::Infinite),
            Ordering::Equal
        );
        assert!(fin(2) < fin(3));
    }

    #[test]
    fn matrix_rejects_negative_entries() {
        let mut m = CostMatrix::new_zero(2, 2);
        assert!(m.set(0, 1, fin(5)).is_ok());
        assert_eq!(
            m.set(1, 0, fin(-1)),
            Err(Error::NegativeCost { var: 1, label: 0 })
        );
        assert_eq!(m.get(0, 1), &fin(5));
        assert!(m.set(1, 1, ExtendedCost::Infinite).is_ok());
    }
}
