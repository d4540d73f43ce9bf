//! Finite operations as explicit tables, preservation checking, and a
//! backtracking search for near-unanimity polymorphisms.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::relation::{ConstraintLanguage, Domain, Label, Relation};

/// A k-ary operation `D^k -> D` stored as a total table.
///
/// The table is indexed in lexicographic input order with the first argument
/// most significant, which keeps searches and comparisons deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    domain: Domain,
    arity: usize,
    table: Vec<Label>,
}

impl Operation {
    pub fn new(domain: Domain, arity: usize, table: Vec<Label>) -> Result<Self> {
        let expected = table_size(domain, arity)?;
        if table.len() != expected {
            return Err(Error::ParamOutOfRange(format!(
                "operation table has {} entries, expected {}",
                table.len(),
                expected
            )));
        }
        for &out in &table {
            if out >= domain.size() {
                return Err(Error::LabelOutOfRange {
                    label: out,
                    domain_size: domain.size(),
                });
            }
        }
        Ok(Operation {
            domain,
            arity,
            table,
        })
    }

    /// Builds the table from a function.
    pub fn from_fn(domain: Domain, arity: usize, f: impl Fn(&[Label]) -> Label) -> Result<Self> {
        let size = table_size(domain, arity)?;
        let mut table = Vec::with_capacity(size);
        let mut args = vec![0; arity];
        loop {
            table.push(f(&args));
            if !increment(&mut args, domain.size()) {
                break;
            }
        }
        Operation::new(domain, arity, table)
    }

    pub fn projection(domain: Domain, arity: usize, coordinate: usize) -> Result<Self> {
        if coordinate >= arity {
            return Err(Error::ParamOutOfRange(String::from(
                "projection coordinate out of range",
            )));
        }
        Operation::from_fn(domain, arity, |args| args[coordinate])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Label] {
        &self.table
    }

    pub fn apply(&self, args: &[Label]) -> Label {
        debug_assert_eq!(args.len(), self.arity);
        let d = self.domain.size();
        let mut index = 0;
        for &a in args {
            index = index * d + a;
        }
        self.table[index]
    }

    /// All inputs in lexicographic order.
    pub fn inputs(&self) -> impl Iterator<Item = Vec<Label>> + '_ {
        let d = self.domain.size();
        let arity = self.arity;
        let mut args = Some(vec![0; arity]);
        core::iter::from_fn(move || {
            let current = args.clone()?;
            let mut next = current.clone();
            args = increment(&mut next, d).then_some(next);
            Some(current)
        })
    }
}

fn table_size(domain: Domain, arity: usize) -> Result<usize> {
    if arity == 0 {
        return Err(Error::ParamOutOfRange(String::from(
            "operation arity must be positive",
        )));
    }
    let mut size: usize = 1;
    for _ in 0..arity {
        size = size.checked_mul(domain.size()).ok_or_else(|| {
            Error::ParamOutOfRange(String::from("operation table too large to materialize"))
        })?;
    }
    Ok(size)
}

/// Odometer step in lexicographic order; false when wrapped around.
fn increment(args: &mut [Label], d: usize) -> bool {
    for slot in args.iter_mut().rev() {
        *slot += 1;
        if *slot < d {
            return true;
        }
        *slot = 0;
    }
    false
}

/// The majority-or-first ternary operation: returns the repeated value when
/// one exists, otherwise its first argument.
pub fn dual_discriminator(domain: Domain) -> Operation {
    Operation::from_fn(domain, 3, |args| majority(args).unwrap_or(args[0]))
        .expect("ternary table over a valid domain")
}

fn majority(args: &[Label]) -> Option<Label> {
    args.iter()
        .find(|&&candidate| args.iter().filter(|&&x| x == candidate).count() * 2 > args.len())
        .copied()
}

/// Named operations accepted across the crate and the CLI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedOp {
    /// Ternary: `x3` if `x1 = x2`, `x2` if `x1 = x3`, else `x1`.
    Switching,
    /// k-ary: `x1` on any repeated input, `xk` on pairwise distinct inputs.
    /// Requires `2 <= k <= |D| - 1`.
    NearProjection { k: usize },
    /// (|D|-1)-ary: `x1` on any repeated input; on pairwise distinct inputs
    /// the unique label missing from the arguments.
    MissingElement,
    /// n-ary over `{0,1}`: 1 when at least `p` arguments are 1.
    Threshold { p: usize, n: usize },
    /// Ternary over `{0,1,2}`: the majority value when one exists, else the
    /// wildcard label 2.
    MajorityElseWildcard,
}

pub fn named_operation(name: &NamedOp, domain: Domain) -> Result<Operation> {
    let d = domain.size();
    match *name {
        NamedOp::Switching => Operation::from_fn(domain, 3, |a| {
            if a[0] == a[1] {
                a[2]
            } else if a[0] == a[2] {
                a[1]
            } else {
                a[0]
            }
        }),
        NamedOp::NearProjection { k } => {
            if k < 2 || k + 1 > d {
                return Err(Error::ParamOutOfRange(format!(
                    "near projection needs 2 <= k <= |D|-1, got k={k} over |D|={d}"
                )));
            }
            Operation::from_fn(domain, k, |a| {
                if pairwise_distinct(a) {
                    a[k - 1]
                } else {
                    a[0]
                }
            })
        }
        NamedOp::MissingElement => {
            if d < 2 {
                return Err(Error::ParamOutOfRange(String::from(
                    "missing-element operation needs |D| >= 2",
                )));
            }
            Operation::from_fn(domain, d - 1, |a| {
                if pairwise_distinct(a) {
                    // |D|-1 distinct arguments leave exactly one label unused.
                    domain
                        .labels()
                        .find(|x| !a.contains(x))
                        .expect("one label is missing")
                } else {
                    a[0]
                }
            })
        }
        NamedOp::Threshold { p, n } => {
            if d != 2 {
                return Err(Error::ParamOutOfRange(String::from(
                    "threshold operations are Boolean (|D| = 2)",
                )));
            }
            if n == 0 || p == 0 || p > n {
                return Err(Error::ParamOutOfRange(format!(
                    "threshold needs 1 <= p <= n, got p={p}, n={n}"
                )));
            }
            Operation::from_fn(domain, n, |a| {
                usize::from(a.iter().filter(|&&x| x == 1).count() >= p)
            })
        }
        NamedOp::MajorityElseWildcard => {
            if d != 3 {
                return Err(Error::ParamOutOfRange(String::from(
                    "majority-else-wildcard is defined over |D| = 3",
                )));
            }
            Operation::from_fn(domain, 3, |a| majority(a).unwrap_or(2))
        }
    }
}

fn pairwise_distinct(args: &[Label]) -> bool {
    args.iter()
        .enumerate()
        .all(|(i, x)| args[i + 1..].iter().all(|y| y != x))
}

/// Output is always among the inputs.
pub fn is_conservative(op: &Operation) -> bool {
    op.inputs().all(|args| args.contains(&op.apply(&args)))
}

/// Near-unanimity: whenever all but one argument equal `a`, the output is `a`.
pub fn is_nu(op: &Operation) -> Result<bool> {
    if op.arity() < 3 {
        return Err(Error::ParamOutOfRange(String::from(
            "near-unanimity requires arity >= 3",
        )));
    }
    let d = op.domain().size();
    let mut args = vec![0; op.arity()];
    for a in 0..d {
        for b in 0..d {
            for i in 0..op.arity() {
                args.fill(a);
                args[i] = b;
                if op.apply(&args) != a {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Evidence that an operation fails to preserve a relation: `rows` are tuples
/// of the relation whose coordinatewise image `violating` is not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationWitness {
    pub relation: Relation,
    pub rows: Vec<Vec<Label>>,
    pub violating: Vec<Label>,
}

impl PreservationWitness {
    /// Re-derives the witness: rows in the relation, image out of it.
    pub fn verify(&self, op: &Operation) -> bool {
        if self.rows.len() != op.arity() {
            return false;
        }
        if !self.rows.iter().all(|r| self.relation.contains(r)) {
            return false;
        }
        let image: Vec<Label> = (0..self.relation.arity())
            .map(|i| {
                let column: Vec<Label> = self.rows.iter().map(|r| r[i]).collect();
                op.apply(&column)
            })
            .collect();
        image == self.violating && !self.relation.contains(&image)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preservation {
    Preserved,
    Violated(PreservationWitness),
}

impl Preservation {
    pub fn is_preserved(&self) -> bool {
        matches!(self, Preservation::Preserved)
    }
}

/// Exhaustive preservation check: every choice of `arity` relation rows must
/// map coordinatewise back into the relation. Returns the first violation in
/// lexicographic row-index order.
pub fn preserves(op: &Operation, rel: &Relation) -> Result<Preservation> {
    if op.domain() != rel.domain() {
        return Err(Error::DomainMismatch {
            left: op.domain().size(),
            right: rel.domain().size(),
        });
    }
    let rows = rel.tuples();
    if rows.is_empty() {
        return Ok(Preservation::Preserved);
    }
    let k = op.arity();
    let mut choice = vec![0usize; k];
    let mut column = vec![0; k];
    loop {
        let mut image = Vec::with_capacity(rel.arity());
        for i in 0..rel.arity() {
            for (slot, &row) in column.iter_mut().zip(choice.iter()) {
                *slot = rows[row][i];
            }
            image.push(op.apply(&column));
        }
        if !rel.contains(&image) {
            return Ok(Preservation::Violated(PreservationWitness {
                relation: rel.clone(),
                rows: choice.iter().map(|&r| rows[r].clone()).collect(),
                violating: image,
            }));
        }
        if !increment(&mut choice, rows.len()) {
            return Ok(Preservation::Preserved);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LanguagePreservation {
    Preserved,
    Violated {
        relation: String,
        witness: PreservationWitness,
    },
}

impl LanguagePreservation {
    pub fn is_preserved(&self) -> bool {
        matches!(self, LanguagePreservation::Preserved)
    }
}

pub fn preserves_language(op: &Operation, lang: &ConstraintLanguage) -> Result<LanguagePreservation> {
    for (name, rel) in lang.iter() {
        if let Preservation::Violated(witness) = preserves(op, rel)? {
            return Ok(LanguagePreservation::Violated {
                relation: name.clone(),
                witness,
            });
        }
    }
    Ok(LanguagePreservation::Preserved)
}

/// Searches for a k-ary near-unanimity polymorphism of `lang`.
///
/// Near-unanimous inputs have forced outputs, so the search backtracks over
/// the remaining cells in lexicographic input order, trying labels in
/// ascending order (restricted to the input's own labels when
/// `conservative_only`). The first table found in that order is returned;
/// `None` means the searched class contains no NU polymorphism of this arity.
pub fn nu_search(
    lang: &ConstraintLanguage,
    arity: usize,
    conservative_only: bool,
    budget: u64,
) -> Result<Option<Operation>> {
    if arity < 3 {
        return Err(Error::ParamOutOfRange(String::from(
            "near-unanimity requires arity >= 3",
        )));
    }
    let domain = lang.domain();
    let d = domain.size();
    let size = table_size(domain, arity)?;

    // Forced cells first: any input with >= arity-1 equal entries.
    let mut table: Vec<Option<Label>> = vec![None; size];
    let mut free_cells: Vec<(usize, Vec<Label>)> = Vec::new();
    let mut args = vec![0; arity];
    let mut index = 0;
    loop {
        match near_unanimous_value(&args) {
            Some(a) => table[index] = Some(a),
            None => {
                let candidates: Vec<Label> = if conservative_only {
                    let mut c = args.clone();
                    c.sort_unstable();
                    c.dedup();
                    c
                } else {
                    (0..d).collect()
                };
                free_cells.push((index, candidates));
            }
        }
        index += 1;
        if !increment(&mut args, d) {
            break;
        }
    }

    let mut space: u128 = 1;
    for (_, candidates) in &free_cells {
        space = space.saturating_mul(candidates.len() as u128);
    }
    if space > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: space,
            budget,
        });
    }

    let relations: Vec<&Relation> = lang.iter().map(|(_, r)| r).collect();
    if search(&mut table, &free_cells, 0, &relations, domain, arity) {
        let table = table.into_iter().map(|c| c.expect("table is total")).collect();
        let op = Operation::new(domain, arity, table)?;
        debug_assert!(is_nu(&op)?);
        Ok(Some(op))
    } else {
        Ok(None)
    }
}

fn near_unanimous_value(args: &[Label]) -> Option<Label> {
    let k = args.len();
    args.iter()
        .take(2)
        .find(|&&candidate| args.iter().filter(|&&x| x == candidate).count() >= k - 1)
        .copied()
}

fn search(
    table: &mut Vec<Option<Label>>,
    free_cells: &[(usize, Vec<Label>)],
    depth: usize,
    relations: &[&Relation],
    domain: Domain,
    arity: usize,
) -> bool {
    if violates_some_relation(table, relations, domain, arity) {
        return false;
    }
    let Some((cell, candidates)) = free_cells.get(depth) else {
        return true;
    };
    for &label in candidates {
        table[*cell] = Some(label);
        if search(table, free_cells, depth + 1, relations, domain, arity) {
            return true;
        }
    }
    table[*cell] = None;
    false
}

/// Partial preservation check: only row choices whose full image is already
/// determined can refute the partial table.
fn violates_some_relation(
    table: &[Option<Label>],
    relations: &[&Relation],
    domain: Domain,
    arity: usize,
) -> bool {
    let d = domain.size();
    for rel in relations {
        let rows = rel.tuples();
        if rows.is_empty() {
            continue;
        }
        let mut choice = vec![0usize; arity];
        'outer: loop {
            let mut image = Vec::with_capacity(rel.arity());
            for i in 0..rel.arity() {
                let mut index = 0;
                for &row in &choice {
                    index = index * d + rows[row][i];
                }
                match table[index] {
                    Some(out) => image.push(out),
                    None => {
                        if !increment(&mut choice, rows.len()) {
                            break 'outer;
                        }
                        continue 'outer;
                    }
                }
            }
            if !rel.contains(&image) {
                return true;
            }
            if !increment(&mut choice, rows.len()) {
                break;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DEFAULT_BUDGET;
    use crate::reduce::{not_all_zero_relation, wildcard_neq_relation};
    use alloc::string::ToString;

    fn d(n: usize) -> Domain {
        Domain::new(n).unwrap()
    }

    #[test]
    fn dual_discriminator_table() {
        let op = dual_discriminator(d(4));
        assert_eq!(op.apply(&[0, 0, 1]), 0);
        assert_eq!(op.apply(&[1, 2, 3]), 1);
        assert_eq!(op.apply(&[2, 2, 2]), 2);
        assert_eq!(op.apply(&[3, 1, 3]), 3);
        for n in 1..=5 {
            let op = dual_discriminator(d(n));
            assert!(is_conservative(&op));
            assert!(is_nu(&op).unwrap());
        }
    }

    #[test]
    fn named_operation_tables() {
        let s = named_operation(&NamedOp::Switching, d(3)).unwrap();
        assert_eq!(s.apply(&[0, 0, 1]), 1); // x3 when x1 = x2
        assert_eq!(s.apply(&[0, 1, 0]), 1); // x2 when x1 = x3
        assert_eq!(s.apply(&[0, 1, 2]), 0); // x1 otherwise

        let r3 = named_operation(&NamedOp::MissingElement, d(3)).unwrap();
        assert_eq!(r3.arity(), 2);
        assert_eq!(r3.apply(&[0, 1]), 2);
        assert_eq!(r3.apply(&[1, 1]), 1);

        let th = named_operation(&NamedOp::Threshold { p: 2, n: 3 }, d(2)).unwrap();
        assert_eq!(th.apply(&[1, 0, 0]), 0);
        assert_eq!(th.apply(&[1, 1, 0]), 1);
        // Over {0,1} the 2-of-3 threshold is exactly the dual discriminator.
        assert_eq!(th, dual_discriminator(d(2)));
        assert!(is_nu(&named_operation(&NamedOp::Threshold { p: 2, n: 4 }, d(2)).unwrap()).unwrap());

        let lk = named_operation(&NamedOp::NearProjection { k: 2 }, d(4)).unwrap();
        assert_eq!(lk.apply(&[1, 3]), 3);
        assert_eq!(lk.apply(&[1, 1]), 1);

        assert!(named_operation(&NamedOp::NearProjection { k: 3 }, d(3)).is_err());
        assert!(named_operation(&NamedOp::Threshold { p: 2, n: 3 }, d(3)).is_err());
        assert!(named_operation(&NamedOp::Threshold { p: 4, n: 3 }, d(2)).is_err());
    }

    #[test]
    fn conservativity() {
        assert!(is_conservative(&dual_discriminator(d(3))));
        let claim = named_operation(&NamedOp::MajorityElseWildcard, d(3)).unwrap();
        // When no majority exists the arguments exhaust {0,1,2}, so the
        // wildcard output 2 is still one of them.
        assert!(is_conservative(&claim));
        let const0 = Operation::from_fn(d(2), 1, |_| 0).unwrap();
        assert!(!is_conservative(&const0));
    }

    #[test]
    fn nu_examples() {
        assert!(is_nu(&dual_discriminator(d(3))).unwrap());
        let proj = Operation::projection(d(2), 3, 0).unwrap();
        assert!(!is_nu(&proj).unwrap());
        assert!(is_nu(&Operation::projection(d(2), 2, 0).unwrap()).is_err());
    }

    #[test]
    fn projections_preserve_everything() {
        let rel = wildcard_neq_relation();
        for i in 0..3 {
            let proj = Operation::projection(d(3), 3, i).unwrap();
            assert!(preserves(&proj, &rel).unwrap().is_preserved());
        }
    }

    #[test]
    fn wildcard_majority_preserves_wildcard_neq() {
        let claim = named_operation(&NamedOp::MajorityElseWildcard, d(3)).unwrap();
        assert!(preserves(&claim, &wildcard_neq_relation()).unwrap().is_preserved());
    }

    #[test]
    fn dual_discriminator_violates_wildcard_neq() {
        let rel = wildcard_neq_relation();
        let dd = dual_discriminator(d(3));
        match preserves(&dd, &rel).unwrap() {
            Preservation::Violated(w) => {
                assert!(w.verify(&dd));
                // The named witness is one concrete violation; check it too.
                let named = PreservationWitness {
                    relation: rel.clone(),
                    rows: vec![vec![0, 1], vec![1, 0], vec![1, 2]],
                    violating: vec![1, 1],
                };
                assert!(named.verify(&dd));
            }
            Preservation::Preserved => panic!("expected a violation"),
        }
    }

    #[test]
    fn dual_discriminator_violates_mod3_sum() {
        // x + y + z = 0 over Z_3.
        let rel = crate::reduce::linear_triple_relation(3, 1, 1, 1).unwrap();
        let dd = dual_discriminator(d(3));
        match preserves(&dd, &rel).unwrap() {
            Preservation::Violated(w) => {
                assert!(w.verify(&dd));
                let named = PreservationWitness {
                    relation: rel.clone(),
                    rows: vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 1, 1]],
                    violating: vec![0, 1, 1],
                };
                assert!(named.verify(&dd));
            }
            Preservation::Preserved => panic!("expected a violation"),
        }
    }

    #[test]
    fn language_preservation_and_vacuous_case() {
        let dom = d(2);
        let mut lang = ConstraintLanguage::new(dom);
        // A couple of 2-SAT style relations: OR and implication.
        lang.insert(
            "or",
            Relation::new(dom, 2, vec![vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap(),
        )
        .unwrap();
        lang.insert(
            "imp",
            Relation::new(dom, 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap(),
        )
        .unwrap();
        let dd = dual_discriminator(dom);
        assert!(preserves_language(&dd, &lang).unwrap().is_preserved());

        let empty = ConstraintLanguage::new(dom);
        let anything = Operation::from_fn(dom, 1, |a| 1 - a[0]).unwrap();
        assert!(preserves_language(&anything, &empty).unwrap().is_preserved());

        let mut z3 = ConstraintLanguage::new(d(3));
        z3.insert("sum0", crate::reduce::linear_triple_relation(3, 1, 1, 1).unwrap())
            .unwrap();
        match preserves_language(&dual_discriminator(d(3)), &z3).unwrap() {
            LanguagePreservation::Violated { relation, witness } => {
                assert_eq!(relation, "sum0".to_string());
                assert!(witness.verify(&dual_discriminator(d(3))));
            }
            LanguagePreservation::Preserved => panic!("expected a violation"),
        }
    }

    #[test]
    fn nu_search_finds_threshold_and_proves_absence() {
        let dom = d(2);
        let mut lang = ConstraintLanguage::new(dom);
        lang.insert("r3", not_all_zero_relation(3).unwrap()).unwrap();

        // No ternary NU polymorphism: rows (1,0,0), (0,1,0), (0,0,1) force
        // the all-zero image.
        assert_eq!(nu_search(&lang, 3, false, DEFAULT_BUDGET).unwrap(), None);

        // Arity 4 admits exactly the 2-of-4 threshold.
        let found = nu_search(&lang, 4, false, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(
            found,
            named_operation(&NamedOp::Threshold { p: 2, n: 4 }, dom).unwrap()
        );
        assert!(is_nu(&found).unwrap());
        assert!(preserves_language(&found, &lang).unwrap().is_preserved());

        // Everything preserves the full binary relation.
        let mut full = ConstraintLanguage::new(dom);
        full.insert("all", Relation::full(dom, 2)).unwrap();
        let any = nu_search(&full, 3, true, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(is_nu(&any).unwrap());

        // Budget guard returns an error distinct from None.
        assert!(matches!(
            nu_search(&lang, 4, false, 2),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
