//! File formats: instance/language/operation JSON, graph/hypergraph/code
//! text inputs, and the plain-text LP dump.
//!
//! Costs are exact: decimal strings are converted to rationals digit by
//! digit, `"n/d"` strings parse as fractions, and `"inf"` is the absorbing
//! infinite cost. Serialization always emits canonical rational strings, so
//! `parse(serialize(instance)) == instance`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use mccsp_core::blp::{LpProblem, LpVarName};
use mccsp_core::greedy::GreedyResult;
use mccsp_core::poly::Operation;
use mccsp_core::reduce::{Hypergraph, LinearCode, WeightedGraph};
use mccsp_core::{
    Assignment, Constraint, ConstraintLanguage, CostMatrix, Domain, ExtendedCost, Instance,
    Relation,
};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] mccsp_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type IoResult<T> = Result<T, IoError>;

pub fn parse_rational(text: &str) -> IoResult<BigRational> {
    let t = text.trim();
    let bad = |_| IoError::Parse(format!("`{t}` is not a rational number"));
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(bad)?;
        let den: BigInt = den.trim().parse().map_err(bad)?;
        if den.is_zero() {
            return Err(IoError::Parse(format!("`{t}` divides by zero")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(IoError::Parse(format!("`{t}` is not a decimal number")));
        }
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start().trim_start_matches('-');
        let whole_value: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(bad)?
        };
        let frac_value: BigInt = frac.parse().map_err(bad)?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mut numerator = whole_value * &scale + frac_value;
        if negative {
            numerator = -numerator;
        }
        return Ok(BigRational::new(numerator, scale));
    }
    let n: BigInt = t.parse().map_err(bad)?;
    Ok(BigRational::from_integer(n))
}

pub fn parse_cost(text: &str) -> IoResult<ExtendedCost> {
    if text.trim() == "inf" {
        return Ok(ExtendedCost::Infinite);
    }
    Ok(ExtendedCost::Finite(parse_rational(text)?))
}

pub fn format_cost(cost: &ExtendedCost) -> String {
    match cost {
        ExtendedCost::Finite(r) => r.to_string(),
        ExtendedCost::Infinite => "inf".to_string(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RelationJson {
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConstraintJson {
    rel: String,
    scope: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CostValue {
    Int(i64),
    Text(String),
    // Catch-all so lossy JSON floats get a pointed message.
    Other(serde::de::IgnoredAny),
}

#[derive(Debug, Deserialize)]
struct InstanceJson {
    domain_size: usize,
    #[serde(default)]
    variables: Vec<String>,
    #[serde(default)]
    relations: BTreeMap<String, RelationJson>,
    #[serde(default)]
    constraints: Vec<ConstraintJson>,
    #[serde(default)]
    costs: BTreeMap<String, Vec<CostValue>>,
}

fn language_from_parts(
    domain_size: usize,
    relations: BTreeMap<String, RelationJson>,
) -> IoResult<ConstraintLanguage> {
    let domain = Domain::new(domain_size)?;
    let mut lang = ConstraintLanguage::new(domain);
    for (name, rel) in relations {
        lang.insert(name, Relation::new(domain, rel.arity, rel.tuples)?)?;
    }
    Ok(lang)
}

pub fn instance_from_str(text: &str) -> IoResult<Instance> {
    let json: InstanceJson = serde_json::from_str(text)?;
    let lang = language_from_parts(json.domain_size, json.relations)?;
    let index_of: BTreeMap<&str, usize> = json
        .variables
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i))
        .collect();
    let mut constraints = Vec::new();
    for c in &json.constraints {
        let scope = c
            .scope
            .iter()
            .map(|name| {
                index_of
                    .get(name.as_str())
                    .copied()
                    .ok_or_else(|| IoError::Parse(format!("undeclared variable `{name}` in a scope")))
            })
            .collect::<IoResult<Vec<usize>>>()?;
        constraints.push(Constraint {
            relation: c.rel.clone(),
            scope,
        });
    }
    let mut costs = CostMatrix::new_zero(json.variables.len(), json.domain_size);
    for (name, entries) in &json.costs {
        let Some(&var) = index_of.get(name.as_str()) else {
            return Err(IoError::Parse(format!(
                "costs reference undeclared variable `{name}`"
            )));
        };
        if entries.len() != json.domain_size {
            return Err(IoError::Parse(format!(
                "variable `{name}` lists {} costs, expected {}",
                entries.len(),
                json.domain_size
            )));
        }
        for (label, value) in entries.iter().enumerate() {
            let cost = match value {
                CostValue::Int(n) => ExtendedCost::Finite(BigRational::from_integer((*n).into())),
                CostValue::Text(s) => parse_cost(s)?,
                CostValue::Other(_) => {
                    return Err(IoError::Parse(format!(
                        "cost {label} of `{name}` must be an integer or a string; write decimals as strings for exactness"
                    )))
                }
            };
            costs.set(var, label, cost)?;
        }
    }
    Ok(Instance::new(lang, json.variables, constraints, costs)?)
}

pub fn language_from_str(text: &str) -> IoResult<ConstraintLanguage> {
    let json: InstanceJson = serde_json::from_str(text)?;
    language_from_parts(json.domain_size, json.relations)
}

pub fn instance_to_string(instance: &Instance) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        domain_size: usize,
        variables: &'a [String],
        relations: BTreeMap<&'a String, RelationJson>,
        constraints: Vec<ConstraintJson>,
        costs: BTreeMap<&'a String, Vec<String>>,
    }
    let relations = instance
        .language
        .iter()
        .map(|(name, rel)| {
            (
                name,
                RelationJson {
                    arity: rel.arity(),
                    tuples: rel.tuples().to_vec(),
                },
            )
        })
        .collect();
    let constraints = instance
        .constraints
        .iter()
        .map(|c| ConstraintJson {
            rel: c.relation.clone(),
            scope: c
                .scope
                .iter()
                .map(|&v| instance.variables[v].clone())
                .collect(),
        })
        .collect();
    let mut costs = BTreeMap::new();
    let d = instance.domain().size();
    for (v, name) in instance.variables.iter().enumerate() {
        let entries: Vec<&ExtendedCost> = (0..d).map(|a| instance.costs.get(v, a)).collect();
        let all_zero = entries.iter().all(|c| **c == ExtendedCost::zero());
        if !all_zero {
            costs.insert(name, entries.into_iter().map(format_cost).collect());
        }
    }
    let out = Out {
        domain_size: d,
        variables: &instance.variables,
        relations,
        constraints,
        costs,
    };
    serde_json::to_string_pretty(&out).expect("instances serialize")
}

#[derive(Debug, Serialize, Deserialize)]
struct OperationJson {
    arity: usize,
    domain_size: usize,
    table: BTreeMap<String, usize>,
}

pub fn operation_from_str(text: &str) -> IoResult<Operation> {
    let json: OperationJson = serde_json::from_str(text)?;
    let domain = Domain::new(json.domain_size)?;
    let mut entries = BTreeMap::new();
    for (key, value) in &json.table {
        let args = key
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| IoError::Parse(format!("bad table key `{key}`")))
            })
            .collect::<IoResult<Vec<usize>>>()?;
        if args.len() != json.arity {
            return Err(IoError::Parse(format!(
                "table key `{key}` has {} entries, arity is {}",
                args.len(),
                json.arity
            )));
        }
        entries.insert(args, *value);
    }
    let expected = (json.domain_size as u128).pow(json.arity as u32);
    if entries.len() as u128 != expected {
        return Err(IoError::Parse(format!(
            "operation table has {} entries, expected {expected}",
            entries.len()
        )));
    }
    let op = Operation::from_fn(domain, json.arity, |args| entries[args]);
    Ok(op?)
}

pub fn operation_to_string(op: &Operation) -> String {
    let table: BTreeMap<String, usize> = op
        .inputs()
        .map(|args| {
            let key = args
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",");
            (key, op.apply(&args))
        })
        .collect();
    let json = OperationJson {
        arity: op.arity(),
        domain_size: op.domain().size(),
        table,
    };
    serde_json::to_string_pretty(&json).expect("operations serialize")
}

pub fn assignment_to_json(instance: &Instance, assignment: &Assignment) -> serde_json::Value {
    let map: BTreeMap<&String, usize> = instance
        .variables
        .iter()
        .zip(assignment.labels().iter().copied())
        .collect();
    serde_json::to_value(map).expect("assignments serialize")
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

/// Edge-list text: header `n m`, then `u v [w]` per edge (weight defaults to 1).
pub fn graph_from_str(text: &str) -> IoResult<WeightedGraph> {
    let mut lines = numbered_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| IoError::Parse("empty graph file".to_string()))?;
    let mut parts = header.split_whitespace();
    let n: usize = parse_token(parts.next(), line_no, "vertex count")?;
    let m: usize = parse_token(parts.next(), line_no, "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| IoError::Parse(format!("expected {m} edges, file ended early")))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(IoError::Parse(format!("line {line_no}: expected `u v [w]`")));
        }
        let u: usize = parse_token(Some(tokens[0]), line_no, "endpoint")?;
        let v: usize = parse_token(Some(tokens[1]), line_no, "endpoint")?;
        let w = match tokens.get(2) {
            Some(t) => parse_rational(t)?,
            None => BigRational::one(),
        };
        edges.push((u, v, w));
    }
    Ok(WeightedGraph::new(n, edges)?)
}

/// Hypergraph text: header `n m`, one line of `n` vertex weights, then `m`
/// lines of vertex indices (all the same length).
pub fn hypergraph_from_str(text: &str) -> IoResult<Hypergraph> {
    let mut lines = numbered_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| IoError::Parse("empty hypergraph file".to_string()))?;
    let mut parts = header.split_whitespace();
    let n: usize = parse_token(parts.next(), line_no, "vertex count")?;
    let m: usize = parse_token(parts.next(), line_no, "edge count")?;
    let (line_no, weight_line) = lines
        .next()
        .ok_or_else(|| IoError::Parse("missing vertex weight line".to_string()))?;
    let weights = weight_line
        .split_whitespace()
        .map(parse_rational)
        .collect::<IoResult<Vec<BigRational>>>()?;
    if weights.len() != n {
        return Err(IoError::Parse(format!(
            "line {line_no}: expected {n} vertex weights, found {}",
            weights.len()
        )));
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| IoError::Parse(format!("expected {m} hyperedges, file ended early")))?;
        let edge = line
            .split_whitespace()
            .map(|t| parse_token(Some(t), line_no, "vertex"))
            .collect::<IoResult<Vec<usize>>>()?;
        edges.push(edge);
    }
    Ok(Hypergraph::new(n, edges, weights)?)
}

/// Code text: header `p m n`, then the `m x n` parity-check matrix row by
/// row, then the length-`n` target vector.
pub fn code_from_str(text: &str) -> IoResult<LinearCode> {
    let mut lines = numbered_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| IoError::Parse("empty code file".to_string()))?;
    let mut parts = header.split_whitespace();
    let p: u64 = parse_token(parts.next(), line_no, "field size")?;
    let m: usize = parse_token(parts.next(), line_no, "row count")?;
    let n: usize = parse_token(parts.next(), line_no, "column count")?;
    let mut read_row = |what: &str| -> IoResult<Vec<u64>> {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| IoError::Parse(format!("missing {what}")))?;
        let row = line
            .split_whitespace()
            .map(|t| parse_token(Some(t), line_no, what))
            .collect::<IoResult<Vec<u64>>>()?;
        if row.len() != n {
            return Err(IoError::Parse(format!(
                "line {line_no}: expected {n} entries, found {}",
                row.len()
            )));
        }
        Ok(row)
    };
    let matrix = (0..m)
        .map(|_| read_row("matrix row"))
        .collect::<IoResult<Vec<Vec<u64>>>>()?;
    let target = read_row("target vector")?;
    Ok(LinearCode::new(p, matrix, target)?)
}

fn parse_token<T: std::str::FromStr>(
    token: Option<&str>,
    line_no: usize,
    what: &str,
) -> IoResult<T> {
    token
        .ok_or_else(|| IoError::Parse(format!("line {line_no}: missing {what}")))?
        .parse()
        .map_err(|_| IoError::Parse(format!("line {line_no}: bad {what}")))
}

fn lp_var_name(name: &LpVarName, variables: &[String]) -> String {
    match name {
        LpVarName::Marginal { var, label } => format!("p({},{label})", variables[*var]),
        LpVarName::TupleWeight { constraint, tuple } => format!("q({constraint},t{tuple})"),
    }
}

/// One objective line, then one `lhs = rhs` line per equality row, with
/// exact rational coefficients.
pub fn lp_to_string(problem: &LpProblem, variables: &[String]) -> String {
    let mut out = String::new();
    let term = |coeff: &BigRational, index: usize| {
        format!("{coeff}*{}", lp_var_name(&problem.names[index], variables))
    };
    let objective = problem
        .lp
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| term(c, j))
        .collect::<Vec<_>>()
        .join(" + ");
    out.push_str("minimize ");
    out.push_str(if objective.is_empty() { "0" } else { &objective });
    out.push_str("\nsubject to\n");
    for (coeffs, rhs) in &problem.lp.rows {
        let lhs = coeffs
            .iter()
            .map(|(j, c)| term(c, *j))
            .collect::<Vec<_>>()
            .join(" + ");
        out.push_str(&format!("{lhs} = {rhs}\n"));
    }
    out
}

/// Trace JSON: per iteration the chosen variable and label, every label's
/// fixed set, price, and distribution, and the sparse decrease applied.
pub fn trace_to_json(instance_vars: &[String], result: &GreedyResult) -> serde_json::Value {
    let iterations: Vec<serde_json::Value> = result
        .trace
        .iter()
        .map(|step| {
            let options: Vec<serde_json::Value> = step
                .options
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "label": o.label,
                        "fixed": o.fixed.iter().map(|(v, b)| {
                            serde_json::json!([instance_vars[*v], b])
                        }).collect::<Vec<_>>(),
                        "cost": o.cost.to_string(),
                        "distribution": o.distribution.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let delta: Vec<serde_json::Value> = step
                .delta
                .iter()
                .filter(|(_, _, r)| !r.is_zero())
                .map(|(v, a, r)| serde_json::json!([instance_vars[v], a, r.to_string()]))
                .collect();
            serde_json::json!({
                "variable": instance_vars[step.variable],
                "chosen": step.chosen,
                "options": options,
                "delta": delta,
            })
        })
        .collect();
    serde_json::json!({ "iterations": iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_is_exact() {
        assert_eq!(
            parse_rational("5").unwrap(),
            BigRational::from_integer(5.into())
        );
        assert_eq!(
            parse_rational("2/3").unwrap(),
            BigRational::new(2.into(), 3.into())
        );
        assert_eq!(
            parse_rational("1.25").unwrap(),
            BigRational::new(5.into(), 4.into())
        );
        assert_eq!(
            parse_rational("-0.5").unwrap(),
            BigRational::new((-1).into(), 2.into())
        );
        assert_eq!(
            parse_rational(".5").unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(matches!(parse_cost("inf").unwrap(), ExtendedCost::Infinite));
    }

    #[test]
    fn instance_round_trip() {
        let text = r#"{
            "domain_size": 2,
            "variables": ["x", "y"],
            "relations": {"or": {"arity": 2, "tuples": [[0,1],[1,0],[1,1]]}},
            "constraints": [{"rel": "or", "scope": ["x", "y"]}],
            "costs": {"x": ["0", "3"], "y": ["0", "1"]}
        }"#;
        let instance = instance_from_str(text).unwrap();
        assert_eq!(instance.num_vars(), 2);
        let serialized = instance_to_string(&instance);
        let reparsed = instance_from_str(&serialized).unwrap();
        assert_eq!(instance, reparsed);
    }

    #[test]
    fn floats_are_rejected_with_guidance() {
        let text = r#"{
            "domain_size": 2,
            "variables": ["x"],
            "relations": {},
            "constraints": [],
            "costs": {"x": [0, 2.5]}
        }"#;
        let err = instance_from_str(text).unwrap_err();
        assert!(err.to_string().contains("strings"), "{err}");
    }

    #[test]
    fn scope_and_cost_names_must_be_declared() {
        let text = r#"{
            "domain_size": 2,
            "variables": ["x"],
            "relations": {"any": {"arity": 1, "tuples": [[0],[1]]}},
            "constraints": [{"rel": "any", "scope": ["ghost"]}],
            "costs": {}
        }"#;
        assert!(instance_from_str(text).is_err());
    }

    #[test]
    fn operation_round_trip() {
        let d = Domain::new(2).unwrap();
        let op = mccsp_core::poly::dual_discriminator(d);
        let text = operation_to_string(&op);
        assert_eq!(operation_from_str(&text).unwrap(), op);
    }

    #[test]
    fn graph_parsing() {
        let g = graph_from_str("3 2\n0 1 1/2\n1 2\n").unwrap();
        assert_eq!(g.num_vertices, 3);
        assert_eq!(g.edges[0].2, BigRational::new(1.into(), 2.into()));
        assert_eq!(g.edges[1].2, BigRational::one());
        assert!(graph_from_str("2 1\n0 0\n").is_err());
    }
}
