//! Dense two-phase simplex over exact rationals.
//!
//! Solves `min c'x  s.t.  Ax = b, x >= 0` with Bland's anti-cycling rule, so
//! runs terminate and identical inputs produce identical optimal points.
//! Sized for the relaxations this crate builds (at most a few thousand
//! variables); no sparse or revised machinery.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An equality-form LP: rows of `(sparse coefficients, rhs)`.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub num_vars: usize,
    pub objective: Vec<BigRational>,
    pub rows: Vec<(Vec<(usize, BigRational)>, BigRational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimplexOutcome {
    Optimal {
        point: Vec<BigRational>,
        value: BigRational,
        /// Column of the basic variable per surviving row.
        basis: Vec<usize>,
        /// Indices of the original rows that survived redundancy elimination.
        kept_rows: Vec<usize>,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `rows x (cols + 1)`; the last entry of each row is the rhs.
    rows: Vec<Vec<BigRational>>,
    /// Reduced-cost row; last entry is the negated objective value.
    obj: Vec<BigRational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &BigRational {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pivot = self.rows[r][c].clone();
        debug_assert!(!pivot.is_zero());
        if !pivot.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x /= &pivot;
                }
            }
        }
        // Only columns where the pivot row is nonzero change in elimination.
        let touched: Vec<usize> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, _)| j)
            .collect();
        let pivot_row = core::mem::take(&mut self.rows[r]);
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = core::mem::replace(&mut self.rows[i][c], BigRational::zero());
            for &j in &touched {
                if j == c {
                    continue;
                }
                let delta = &factor * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
        }
        if !self.obj[c].is_zero() {
            let factor = core::mem::replace(&mut self.obj[c], BigRational::zero());
            for &j in &touched {
                if j == c {
                    continue;
                }
                let delta = &factor * &pivot_row[j];
                self.obj[j] -= delta;
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Bland's rule: enter the lowest-index improving column, leave on the
    /// minimum ratio with ties broken by lowest basic variable index.
    /// Returns false at optimality; None-pivot columns signal unboundedness.
    fn run(&mut self, active_cols: usize) -> Result<(), ()> {
        loop {
            let Some(entering) = (0..active_cols).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut leaving: Option<(usize, BigRational)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][entering].is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / &self.rows[r][entering];
                let better = match &leaving {
                    None => true,
                    Some((best_row, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[r] < self.basis[*best_row])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, entering),
                None => return Err(()),
            }
        }
    }
}

pub fn solve(lp: &StandardLp) -> SimplexOutcome {
    let n = lp.num_vars;
    let m = lp.rows.len();
    let cols = n + m; // artificial variable per row

    let mut rows = Vec::with_capacity(m);
    for (i, (coeffs, rhs)) in lp.rows.iter().enumerate() {
        let mut row = vec![BigRational::zero(); cols + 1];
        let flip = rhs.is_negative();
        for (j, a) in coeffs {
            let value = if flip { -a } else { a.clone() };
            row[*j] += value;
        }
        row[cols] = if flip { -rhs } else { rhs.clone() };
        row[n + i] = BigRational::one();
        rows.push(row);
    }

    // Phase 1: minimize the artificial total, starting from the artificial basis.
    let mut obj = vec![BigRational::zero(); cols + 1];
    for row in &rows {
        for (j, slot) in obj.iter_mut().enumerate().take(n) {
            *slot -= &row[j];
        }
        obj[cols] -= &row[cols];
    }
    let mut tableau = Tableau {
        rows,
        obj,
        basis: (n..n + m).collect(),
        cols,
    };
    tableau
        .run(n)
        .expect("phase 1 objective is bounded below by zero");
    if tableau.obj[cols].is_negative() {
        return SimplexOutcome::Infeasible;
    }

    // Pivot basic artificials out; rows with no real coefficient are redundant.
    let mut kept_rows: Vec<usize> = (0..m).collect();
    let mut r = 0;
    while r < tableau.rows.len() {
        if tableau.basis[r] >= n {
            match (0..n).find(|&j| !tableau.rows[r][j].is_zero()) {
                Some(j) => tableau.pivot(r, j),
                None => {
                    tableau.rows.remove(r);
                    tableau.basis.remove(r);
                    kept_rows.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2: real objective, artificial columns retired.
    let mut obj = vec![BigRational::zero(); cols + 1];
    obj[..n].clone_from_slice(&lp.objective);
    for (r, &basic) in tableau.basis.iter().enumerate() {
        if obj[basic].is_zero() {
            continue;
        }
        let factor = core::mem::replace(&mut obj[basic], BigRational::zero());
        for j in 0..=cols {
            if j == basic {
                continue;
            }
            let delta = &factor * &tableau.rows[r][j];
            obj[j] -= delta;
        }
    }
    tableau.obj = obj;
    if tableau.run(n).is_err() {
        return SimplexOutcome::Unbounded;
    }

    let mut point = vec![BigRational::zero(); n];
    for (r, &basic) in tableau.basis.iter().enumerate() {
        if basic < n {
            point[basic] = tableau.rhs(r).clone();
        }
    }
    let value = lp
        .objective
        .iter()
        .zip(point.iter())
        .map(|(c, x)| c * x)
        .fold(BigRational::zero(), |acc, t| acc + t);
    SimplexOutcome::Optimal {
        point,
        value,
        basis: tableau.basis.clone(),
        kept_rows,
    }
}

/// Independent optimality certificate: feasibility of the point plus dual
/// feasibility of the prices derived from the final basis. Solves
/// `B' y = c_B` by Gaussian elimination rather than trusting the tableau.
pub fn verify_optimal(
    lp: &StandardLp,
    point: &[BigRational],
    value: &BigRational,
    basis: &[usize],
    kept_rows: &[usize],
) -> bool {
    if point.len() != lp.num_vars || basis.len() != kept_rows.len() {
        return false;
    }
    if point.iter().any(|x| x.is_negative()) {
        return false;
    }
    for (coeffs, rhs) in &lp.rows {
        let lhs = coeffs
            .iter()
            .map(|(j, a)| a * &point[*j])
            .fold(BigRational::zero(), |acc, t| acc + t);
        if &lhs != rhs {
            return false;
        }
    }
    let objective = lp
        .objective
        .iter()
        .zip(point.iter())
        .map(|(c, x)| c * x)
        .fold(BigRational::zero(), |acc, t| acc + t);
    if &objective != value {
        return false;
    }

    // Dense columns of the kept rows; the basis never keeps an artificial
    // column once redundancy elimination has run.
    if basis.iter().any(|&j| j >= lp.num_vars) {
        return false;
    }
    let m = kept_rows.len();
    let column = |j: usize| -> Vec<BigRational> {
        kept_rows
            .iter()
            .map(|&r| {
                lp.rows[r]
                    .0
                    .iter()
                    .filter(|(col, _)| *col == j)
                    .map(|(_, a)| a.clone())
                    .fold(BigRational::zero(), |acc, t| acc + t)
            })
            .collect()
    };

    // Solve B' y = c_B: one equation per basic column.
    let mut dual: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for &j in basis {
        let mut eq = column(j);
        eq.push(lp.objective[j].clone());
        dual.push(eq);
    }
    let Some(y) = gaussian_solve(dual) else {
        return false;
    };

    // Reduced costs of every real column must be non-negative.
    for j in 0..lp.num_vars {
        let col = column(j);
        let priced = col
            .iter()
            .zip(y.iter())
            .map(|(a, yi)| a * yi)
            .fold(BigRational::zero(), |acc, t| acc + t);
        if (&lp.objective[j] - &priced).is_negative() {
            return false;
        }
    }
    true
}

/// Solves a square rational system given as rows `[a_0 .. a_{n-1} | b]`.
fn gaussian_solve(mut system: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = system.len();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !system[r][col].is_zero())?;
        system.swap(col, pivot_row);
        let pivot = system[col][col].clone();
        for x in system[col].iter_mut() {
            *x /= &pivot;
        }
        for r in 0..n {
            if r == col || system[r][col].is_zero() {
                continue;
            }
            let factor = system[r][col].clone();
            for j in col..=n {
                let delta = &factor * &system[col][j];
                system[r][j] -= delta;
            }
        }
    }
    Some(system.into_iter().map(|row| row[row.len() - 1].clone()).collect())
}
