//! Shared helpers for the integration suites: independent brute-force
//! oracles and small deterministic generators. Everything here is test-only
//! and deliberately avoids the production solver paths it is used to check.

#![allow(dead_code)]

use mccsp_core::minimal::{binarize, make_23_minimal, BinaryInstance};
use mccsp_core::reduce::{Hypergraph, LinearCode, WeightedGraph};
use mccsp_core::relation::BinaryRel;
use mccsp_core::{CostMatrix, Domain, ExtendedCost, Instance, Rational};

use std::collections::BTreeSet;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Standard preparation path: validated binarization followed by the fixpoint.
pub fn pipeline(instance: &Instance) -> BinaryInstance {
    make_23_minimal(&binarize(instance, true).expect("instances here are 2-decomposable"))
}

/// Tiny deterministic PRNG for test-side sampling (splitmix64).
pub struct TestRng {
    state: u64,
}

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            return true;
        }
        if p <= 0.0 {
            return false;
        }
        (self.next_u64() >> 11) < (p * (1u64 << 53) as f64) as u64
    }
}

/// Minimum total weight of monochromatic edges over all 2-colorings.
pub fn min_uncut_brute(graph: &WeightedGraph) -> Rational {
    let n = graph.num_vertices;
    let mut best: Option<Rational> = None;
    for mask in 0u64..(1 << n) {
        let mut uncut = rat(0);
        for (u, v, w) in &graph.edges {
            if (mask >> u) & 1 == (mask >> v) & 1 {
                uncut += w;
            }
        }
        if best.as_ref().is_none_or(|b| &uncut < b) {
            best = Some(uncut);
        }
    }
    best.unwrap_or_else(|| rat(0))
}

/// Exact optimum of the instance produced by `min_uncut_to_csp`, computed by
/// structure-aware brute force: enumerate all vertex labelings over {0,1,2};
/// for fixed endpoints each edge's two relay variables are independent of the
/// rest, so their cheapest feasible pair is minimized locally.
pub fn uncut_instance_opt(graph: &WeightedGraph) -> Rational {
    let n = graph.num_vertices;
    let in_wneq = |x: usize, y: usize| x != y || x == 2;
    let total: Rational = graph
        .edges
        .iter()
        .map(|(_, _, w)| w.clone())
        .fold(rat(0), |acc, w| acc + w);
    let vertex_wildcard_cost = if total > rat(1) { total } else { rat(1) };

    let mut labels = vec![0usize; n];
    let mut best: Option<Rational> = None;
    loop {
        let mut cost = rat(0);
        for &l in &labels {
            if l == 2 {
                cost += &vertex_wildcard_cost;
            }
        }
        for (u, v, w) in &graph.edges {
            let (x, y) = (labels[*u], labels[*v]);
            let mut edge_best: Option<Rational> = None;
            for za in 0..3 {
                for zb in 0..3 {
                    if in_wneq(x, za) && in_wneq(za, zb) && in_wneq(zb, y) {
                        let mut c = rat(0);
                        if za == 2 {
                            c += w;
                        }
                        if zb == 2 {
                            c += w;
                        }
                        if edge_best.as_ref().is_none_or(|b| &c < b) {
                            edge_best = Some(c);
                        }
                    }
                }
            }
            cost += edge_best.expect("the wildcard relation always allows relays");
        }
        if best.as_ref().is_none_or(|b| &cost < b) {
            best = Some(cost);
        }

        let mut i = n;
        loop {
            if i == 0 {
                return best.unwrap_or_else(|| rat(0));
            }
            i -= 1;
            labels[i] += 1;
            if labels[i] < 3 {
                break;
            }
            labels[i] = 0;
        }
    }
}

/// Minimum weight of a vertex set hitting every hyperedge.
pub fn hypergraph_cover_brute(h: &Hypergraph) -> Option<Rational> {
    let n = h.num_vertices;
    let mut best: Option<Rational> = None;
    'mask: for mask in 0u64..(1 << n) {
        for edge in &h.edges {
            if edge.iter().all(|&v| (mask >> v) & 1 == 0) {
                continue 'mask;
            }
        }
        let weight = (0..n)
            .filter(|&v| (mask >> v) & 1 == 1)
            .map(|v| h.weights[v].clone())
            .fold(rat(0), |acc, w| acc + w);
        if best.as_ref().is_none_or(|b| &weight < b) {
            best = Some(weight);
        }
    }
    best
}

/// Minimum Hamming distance from the target to any vector in the kernel.
pub fn nearest_codeword_brute(code: &LinearCode) -> Option<u64> {
    let p = code.p;
    let n = code.target.len();
    let mut y = vec![0u64; n];
    let mut best: Option<u64> = None;
    loop {
        let in_kernel = code.matrix.iter().all(|row| {
            row.iter()
                .zip(y.iter())
                .map(|(a, x)| a * x % p)
                .sum::<u64>()
                % p
                == 0
        });
        if in_kernel {
            let dist = y
                .iter()
                .zip(code.target.iter())
                .filter(|(a, b)| a != b)
                .count() as u64;
            if best.is_none_or(|b| dist < b) {
                best = Some(dist);
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            y[i] += 1;
            if y[i] < p {
                break;
            }
            y[i] = 0;
        }
    }
}

/// A random binary instance with arbitrary (not necessarily preserved) unary
/// sets and pair relations; pair density and domain size are parameters.
pub fn random_binary_instance(
    rng: &mut TestRng,
    domain_size: usize,
    num_vars: usize,
    density: f64,
) -> BinaryInstance {
    let domain = Domain::new(domain_size).unwrap();
    let variables = (0..num_vars).map(|i| format!("x{i}")).collect();
    let mut bi =
        BinaryInstance::new(domain, variables, CostMatrix::new_zero(num_vars, domain_size))
            .unwrap();
    for v in 0..num_vars {
        // Bias towards larger sets, never empty.
        let mut set: BTreeSet<usize> = (0..domain_size).filter(|_| rng.chance(0.8)).collect();
        if set.is_empty() {
            set.insert(rng.below(domain_size));
        }
        bi.set_unary(v, set);
    }
    for u in 0..num_vars {
        for v in u + 1..num_vars {
            if !rng.chance(density) {
                continue;
            }
            let mut rel = BinaryRel::empty(domain_size);
            for a in 0..domain_size {
                for b in 0..domain_size {
                    if rng.chance(0.65) {
                        rel.set(a, b, true);
                    }
                }
            }
            bi.set_pair(u, v, rel);
        }
    }
    bi
}

/// Evaluates an assignment's finite cost against an instance, panicking on
/// non-satisfying or infinite-cost assignments.
pub fn finite_cost(instance: &Instance, assignment: &mccsp_core::Assignment) -> Rational {
    let eval = instance.evaluate(assignment).expect("well-formed");
    assert!(eval.satisfying, "assignment must satisfy the instance");
    match eval.cost {
        ExtendedCost::Finite(r) => r,
        ExtendedCost::Infinite => panic!("assignment has infinite cost"),
    }
}
