//! Finite domains, explicit relations, and constraint languages.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A domain label, always in `0..domain.size()`.
pub type Label = usize;
/// A variable, identified by its position in the instance's variable list.
pub type Var = usize;

/// The finite domain `{0, .., size-1}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Domain {
    size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyDomain);
        }
        Ok(Domain { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        0..self.size
    }
}

/// A relation of fixed arity stored as a sorted, duplicate-free tuple set.
///
/// Binary relations additionally carry a `|D| x |D|` membership bitmap so that
/// the consistency loops get O(1) lookups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    domain: Domain,
    arity: usize,
    tuples: Vec<Vec<Label>>,
    pair_bits: Option<Vec<bool>>,
}

impl Relation {
    pub fn new(domain: Domain, arity: usize, mut tuples: Vec<Vec<Label>>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ParamOutOfRange(String::from(
                "relation arity must be positive",
            )));
        }
        for t in &tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            for &x in t {
                if x >= domain.size() {
                    return Err(Error::LabelOutOfRange {
                        label: x,
                        domain_size: domain.size(),
                    });
                }
            }
        }
        tuples.sort();
        tuples.dedup();
        let pair_bits = (arity == 2).then(|| {
            let d = domain.size();
            let mut bits = vec![false; d * d];
            for t in &tuples {
                bits[t[0] * d + t[1]] = true;
            }
            bits
        });
        Ok(Relation {
            domain,
            arity,
            tuples,
            pair_bits,
        })
    }

    pub fn full(domain: Domain, arity: usize) -> Self {
        let mut tuples = Vec::new();
        let mut current = vec![0; arity];
        loop {
            tuples.push(current.clone());
            let mut i = arity;
            loop {
                if i == 0 {
                    return Relation::new(domain, arity, tuples).expect("full relation is valid");
                }
                i -= 1;
                current[i] += 1;
                if current[i] < domain.size() {
                    break;
                }
                current[i] = 0;
            }
        }
    }

    pub fn empty(domain: Domain, arity: usize) -> Self {
        Relation::new(domain, arity, Vec::new()).expect("empty relation is valid")
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<Label>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Label]) -> bool {
        if tuple.len() != self.arity {
            return false;
        }
        if let Some(bits) = &self.pair_bits {
            return bits[tuple[0] * self.domain.size() + tuple[1]];
        }
        self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok()
    }

    /// Projection onto the given coordinate positions (0-based).
    pub fn projection(&self, coords: &[usize]) -> Result<Relation> {
        for &c in coords {
            if c >= self.arity {
                return Err(Error::ParamOutOfRange(String::from(
                    "projection coordinate out of range",
                )));
            }
        }
        let tuples = self
            .tuples
            .iter()
            .map(|t| coords.iter().map(|&c| t[c]).collect())
            .collect();
        Relation::new(self.domain, coords.len(), tuples)
    }

    /// No two coordinates are forced equal: for every pair of positions some
    /// tuple separates them.
    pub fn is_irreducible(&self) -> bool {
        for i in 0..self.arity {
            for j in i + 1..self.arity {
                if !self.tuples.iter().any(|t| t[i] != t[j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// A named, finite set of relations over one shared domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintLanguage {
    domain: Domain,
    relations: BTreeMap<String, Relation>,
}

impl ConstraintLanguage {
    pub fn new(domain: Domain) -> Self {
        ConstraintLanguage {
            domain,
            relations: BTreeMap::new(),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn insert(&mut self, name: impl Into<String>, relation: Relation) -> Result<()> {
        let name = name.into();
        if relation.domain() != self.domain {
            return Err(Error::DomainMismatch {
                left: self.domain.size(),
                right: relation.domain().size(),
            });
        }
        if self.relations.contains_key(&name) {
            return Err(Error::DuplicateRelation(name));
        }
        self.relations.insert(name, relation);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Relation)> {
        self.relations.iter()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }
}

/// A dense binary relation over `{0,..,d-1}^2`, the working form used by the
/// consistency machinery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRel {
    d: usize,
    bits: Vec<bool>,
}

impl BinaryRel {
    pub fn empty(d: usize) -> Self {
        BinaryRel {
            d,
            bits: vec![false; d * d],
        }
    }

    pub fn full(d: usize) -> Self {
        BinaryRel {
            d,
            bits: vec![true; d * d],
        }
    }

    pub fn from_relation(rel: &Relation) -> Result<Self> {
        if rel.arity() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: rel.arity(),
            });
        }
        let mut out = BinaryRel::empty(rel.domain().size());
        for t in rel.tuples() {
            out.set(t[0], t[1], true);
        }
        Ok(out)
    }

    pub fn product(left: &BTreeSet<Label>, right: &BTreeSet<Label>, d: usize) -> Self {
        let mut out = BinaryRel::empty(d);
        for &a in left {
            for &b in right {
                out.set(a, b, true);
            }
        }
        out
    }

    pub fn domain_size(&self) -> usize {
        self.d
    }

    pub fn contains(&self, a: Label, b: Label) -> bool {
        self.bits[a * self.d + b]
    }

    pub fn set(&mut self, a: Label, b: Label, value: bool) {
        self.bits[a * self.d + b] = value;
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pairs in row-major (lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = (Label, Label)> + '_ {
        let d = self.d;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / d, i % d))
    }

    pub fn transpose(&self) -> Self {
        let mut out = BinaryRel::empty(self.d);
        for (a, b) in self.iter() {
            out.set(b, a, true);
        }
        out
    }

    pub fn intersect(&mut self, other: &BinaryRel) {
        for (x, y) in self.bits.iter_mut().zip(other.bits.iter()) {
            *x = *x && *y;
        }
    }

    pub fn proj_first(&self) -> BTreeSet<Label> {
        self.iter().map(|(a, _)| a).collect()
    }

    pub fn proj_second(&self) -> BTreeSet<Label> {
        self.iter().map(|(_, b)| b).collect()
    }

    pub fn row(&self, a: Label) -> BTreeSet<Label> {
        (0..self.d).filter(|&b| self.contains(a, b)).collect()
    }

    pub fn to_relation(&self, domain: Domain) -> Relation {
        let tuples = self.iter().map(|(a, b)| vec![a, b]).collect();
        Relation::new(domain, 2, tuples).expect("bitmap entries are in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_construction_validates_and_canonicalizes() {
        let d = Domain::new(2).unwrap();
        let r = Relation::new(d, 2, vec![vec![1, 1], vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(r.tuples(), &[vec![0, 1], vec![1, 1]]);
        assert!(r.contains(&[0, 1]));
        assert!(!r.contains(&[0, 0]));
        assert!(Relation::new(d, 2, vec![vec![0, 2]]).is_err());
        assert!(Relation::new(d, 2, vec![vec![0]]).is_err());
        assert!(Domain::new(0).is_err());
    }

    #[test]
    fn full_relation_has_every_tuple() {
        let d = Domain::new(3).unwrap();
        let r = Relation::full(d, 2);
        assert_eq!(r.len(), 9);
        let r3 = Relation::full(d, 3);
        assert_eq!(r3.len(), 27);
        assert!(r3.contains(&[2, 0, 1]));
    }

    #[test]
    fn projection_deduplicates() {
        let d = Domain::new(2).unwrap();
        // Even-parity triples.
        let r = Relation::new(
            d,
            3,
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        )
        .unwrap();
        let p = r.projection(&[0, 1]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p, Relation::full(d, 2));
    }

    #[test]
    fn binary_rel_round_trips_and_transposes() {
        let d = Domain::new(3).unwrap();
        let r = Relation::new(d, 2, vec![vec![0, 1], vec![2, 0]]).unwrap();
        let b = BinaryRel::from_relation(&r).unwrap();
        assert_eq!(b.to_relation(d), r);
        let t = b.transpose();
        assert!(t.contains(1, 0));
        assert!(t.contains(0, 2));
        assert_eq!(t.len(), 2);
        assert_eq!(b.proj_first(), BTreeSet::from([0, 2]));
        assert_eq!(b.proj_second(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn language_enforces_shared_domain_and_unique_names() {
        let d2 = Domain::new(2).unwrap();
        let d3 = Domain::new(3).unwrap();
        let mut lang = ConstraintLanguage::new(d2);
        lang.insert("eq", Relation::new(d2, 2, vec![vec![0, 0], vec![1, 1]]).unwrap())
            .unwrap();
        assert!(matches!(
            lang.insert("eq", Relation::full(d2, 1)),
            Err(Error::DuplicateRelation(_))
        ));
        assert!(matches!(
            lang.insert("other", Relation::full(d3, 1)),
            Err(Error::DomainMismatch { .. })
        ));
    }
}
