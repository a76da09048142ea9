//! Simultaneous eigenfunction tables for the two spherical operators on the
//! truncated rank-3 class set, in exact rational arithmetic.
//!
//! Each interior vertex of either operator graph contributes one linear
//! relation between a table and its weighted neighbor sum. The value at every
//! class is determined by the two eigenvalues and the value at the trivial
//! class; `solve_eigenform` walks the explicit recursion and
//! `solve_by_elimination` solves the full relation system independently, so
//! the two must agree entry for entry.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::traits::{One, Zero};
use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::bundles::{enumerate_pbun, ProjectiveType};
use crate::error::{Error, Result};
use crate::exact::{self, SparseRow};
use crate::hecke::{apply_hecke, build_graph};

/// Eigenvalue pair (lambda_1, lambda_2), exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPair {
    pub lambda1: BigRational,
    pub lambda2: BigRational,
}

impl EigenPair {
    pub fn new(lambda1: BigRational, lambda2: BigRational) -> Self {
        EigenPair { lambda1, lambda2 }
    }

    pub fn from_strs(l1: &str, l2: &str) -> Result<Self> {
        Ok(EigenPair::new(parse_rational(l1)?, parse_rational(l2)?))
    }

    pub fn from_i64(l1: i64, l2: i64) -> Self {
        EigenPair::new(
            BigRational::from_integer(BigInt::from(l1)),
            BigRational::from_integer(BigInt::from(l2)),
        )
    }
}

/// Finite value table on the classes with gaps bounded by `bound`, with
/// exact rational entries. Tables produced by the solvers cover the full
/// truncation; the operator action restricts to interior vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormTable {
    pub q0: u64,
    pub bound: i64,
    pub values: BTreeMap<ProjectiveType, BigRational>,
}

impl FormTable {
    pub fn constant(q0: u64, bound: i64, value: BigRational) -> Self {
        let values = enumerate_pbun(3, bound).into_iter().map(|p| (p, value.clone())).collect();
        FormTable { q0, bound, values }
    }

    pub fn value(&self, p: &ProjectiveType) -> Result<&BigRational> {
        self.values.get(p).ok_or_else(|| Error::MissingValue(p.to_string()))
    }

    pub fn covers_full_truncation(&self) -> bool {
        enumerate_pbun(3, self.bound).iter().all(|p| self.values.contains_key(p))
    }
}

/// Parses an exact rational literal: optional sign, digits, optional /digits.
/// Floating point forms are rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidRational(s.to_string());
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid = |t: &str, allow_sign: bool| {
        let t = t.trim();
        if t.is_empty() {
            return false;
        }
        let body = if allow_sign { t.strip_prefix('-').unwrap_or(t) } else { t };
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num_str, true) || !valid(den_str, false) {
        return Err(bad());
    }
    let num: BigInt = num_str.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den_str.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `p/q`, or `p` when integral.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn big(q0: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(q0))
}

/// Solves for the unique table with the given eigenvalues and value `f0` at
/// the trivial class, walking vertices in increasing (g2, g1) order. Each
/// step divides only by q+1 or q^2+q+1, so the recursion is total for
/// q0 >= 2.
pub fn solve_eigenform(pair: &EigenPair, q0: u64, bound: i64, f0: &BigRational) -> FormTable {
    assert!(bound >= 1);
    let q = big(q0);
    let q2 = &q * &q;
    let q21 = &(&q2 + &q) + &BigRational::one(); // q^2+q+1
    let qq = &q2 + &q; // q^2+q
    let q1 = &q + &BigRational::one(); // q+1
    let l1 = &pair.lambda1;
    let l2 = &pair.lambda2;

    let mut order = enumerate_pbun(3, bound);
    order.sort_by_key(|p| (p.gaps()[1], p.gaps()[0]));

    let mut f: BTreeMap<ProjectiveType, BigRational> = BTreeMap::new();
    let at = |f: &BTreeMap<ProjectiveType, BigRational>, g1: i64, g2: i64| -> BigRational {
        f[&ProjectiveType::from_gaps(vec![g1, g2])].clone()
    };
    for v in order {
        let (g1, g2) = (v.gaps()[0], v.gaps()[1]);
        let value = match (g1, g2) {
            (0, 0) => f0.clone(),
            (0, 1) => l2 * f0 / &q21,
            (1, 1) => l1 * f0 / &q21,
            // row of the second operator at e(0, d-1):
            // l2 f(0,d-1) = (q^2+q) f(1,d-1) + f(0,d)
            (0, d) => l2 * at(&f, 0, d - 1) - &qq * at(&f, 1, d - 1),
            // row of the first operator at e(0, d-1):
            // l1 f(0,d-1) = q^2 f(0,d-2) + (q+1) f(1,d)
            (1, d) => (l1 * at(&f, 0, d - 1) - &q2 * at(&f, 0, d - 2)) / &q1,
            // row of the first operator at e(d-1, d-1):
            // l1 f(d-1,d-1) = (q^2+q) f(d-2,d-1) + f(d,d)
            (a, b) if a == b => l1 * at(&f, a - 1, a - 1) - &qq * at(&f, a - 2, a - 1),
            // row of the first operator at e(g1-1, g2-1):
            // l1 f(g1-1,g2-1) = q^2 f(g1-1,g2-2) + q f(g1-2,g2-1) + f(g1,g2)
            (a, b) => l1 * at(&f, a - 1, b - 1) - &q2 * at(&f, a - 1, b - 2) - &q * at(&f, a - 2, b - 1),
        };
        f.insert(v, value);
    }
    FormTable { q0, bound, values: f }
}

/// All interior relation rows of both operator graphs at the truncation:
/// sum of w(v->u) f(u) - lambda_r f(v) = 0, over the vertex index space.
pub fn hecke_relation_rows(
    pair: &EigenPair,
    q0: u64,
    bound: i64,
) -> Result<(Vec<SparseRow>, Vec<ProjectiveType>)> {
    let vertices = enumerate_pbun(3, bound);
    let index: BTreeMap<&ProjectiveType, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut rows = Vec::new();
    for r in [1u8, 2] {
        let g = build_graph(r, bound)?;
        let lambda = if r == 1 { &pair.lambda1 } else { &pair.lambda2 };
        for v in g.interior_vertices() {
            let mut row: SparseRow = Vec::new();
            for e in g.edges_from(v) {
                let m = BigRational::from_integer(e.weight.eval(q0)?);
                row.push((index[&e.dst], m));
            }
            row.push((index[v], -lambda.clone()));
            rows.push(row);
        }
    }
    Ok((rows, vertices))
}

/// Independent check of the recursion: solves the sparse rational system of
/// every in-truncation relation with f pinned at the trivial class. The
/// solution must be unique; a singular system is a hard failure.
pub fn solve_by_elimination(
    pair: &EigenPair,
    q0: u64,
    bound: i64,
    f0: &BigRational,
) -> Result<FormTable> {
    let (mut rows, vertices) = hecke_relation_rows(pair, q0, bound)?;
    let mut rhs = vec![BigRational::zero(); rows.len()];
    let trivial = ProjectiveType::from_gaps(vec![0, 0]);
    let pin = vertices.iter().position(|v| *v == trivial).expect("trivial class in range");
    rows.push(vec![(pin, BigRational::one())]);
    rhs.push(f0.clone());
    let x = exact::solve_unique(&rows, &rhs, vertices.len())?;
    let values = vertices.into_iter().zip(x).collect();
    Ok(FormTable { q0, bound, values })
}

/// Nullity of the homogeneous relation system, optionally augmented with
/// extra rows (used for the one-dimensionality witness and the toroidal
/// intersection check).
pub fn relation_nullity(
    pair: &EigenPair,
    q0: u64,
    bound: i64,
    extra_rows: &[SparseRow],
) -> Result<usize> {
    let (mut rows, vertices) = hecke_relation_rows(pair, q0, bound)?;
    rows.extend_from_slice(extra_rows);
    Ok(exact::nullity(&rows, vertices.len()))
}

/// Outcome of checking a table against both eigenvalue relations on all
/// interior vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub checked: usize,
    pub violations: Vec<(u8, ProjectiveType)>,
}

impl RelationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies (Phi_r f)(v) = lambda_r f(v) exactly on every interior vertex of
/// both operator graphs at the table's truncation.
pub fn verify_hecke_relations(f: &FormTable, pair: &EigenPair) -> Result<RelationReport> {
    let mut checked = 0;
    let mut violations = Vec::new();
    for r in [1u8, 2] {
        let g = build_graph(r, f.bound)?;
        let lambda = if r == 1 { &pair.lambda1 } else { &pair.lambda2 };
        let image = apply_hecke(&g, f, f.q0)?;
        for v in g.interior_vertices() {
            checked += 1;
            if image.values[v] != lambda * &f.values[v] {
                violations.push((r, v.clone()));
            }
        }
    }
    Ok(RelationReport { checked, violations })
}

/// Serialized table shape: exact rational strings, one entry per class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormValue {
    #[serde(rename = "type")]
    pub ty: Vec<i64>,
    pub value: String,
}

/// File form of a table together with the eigenvalue pair it solves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormTableFile {
    pub q0: u64,
    pub bound: i64,
    pub lambda: Vec<String>,
    pub values: Vec<FormValue>,
}

impl FormTableFile {
    pub fn from_table(table: &FormTable, pair: &EigenPair) -> Self {
        FormTableFile {
            q0: table.q0,
            bound: table.bound,
            lambda: vec![format_rational(&pair.lambda1), format_rational(&pair.lambda2)],
            values: table
                .values
                .iter()
                .map(|(p, v)| FormValue { ty: p.gaps().to_vec(), value: format_rational(v) })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<(FormTable, EigenPair)> {
        if self.lambda.len() != 2 {
            return Err(Error::InvalidRational(format!("lambda list of length {}", self.lambda.len())));
        }
        let pair = EigenPair::from_strs(&self.lambda[0], &self.lambda[1])?;
        let mut values = BTreeMap::new();
        for fv in &self.values {
            let p = ProjectiveType::from_gaps(fv.ty.clone());
            values.insert(p, parse_rational(&fv.value)?);
        }
        Ok((FormTable { q0: self.q0, bound: self.bound, values }, pair))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pt(v: &[i64]) -> ProjectiveType {
        ProjectiveType::from_gaps(v.to_vec())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    pub(crate) fn random_pair(rng: &mut StdRng) -> EigenPair {
        EigenPair::new(
            rat(rng.gen_range(-9..=9), rng.gen_range(1..=9)),
            rat(rng.gen_range(-9..=9), rng.gen_range(1..=9)),
        )
    }

    #[test]
    fn first_layer_values() {
        let pair = EigenPair::from_strs("3/2", "5").unwrap();
        let f0 = rat(1, 1);
        let t = solve_eigenform(&pair, 2, 3, &f0);
        // the trivial-class rows divide by q^2+q+1 = 7
        assert_eq!(t.values[&pt(&[1, 1])], &pair.lambda1 * &f0 / rat(7, 1));
        assert_eq!(t.values[&pt(&[0, 1])], &pair.lambda2 * &f0 / rat(7, 1));
        assert_eq!(t.values[&pt(&[0, 0])], f0);
    }

    #[test]
    fn constant_table_has_the_row_sum_eigenvalues() {
        for q0 in [2u64, 3, 4] {
            let total = rat((q0 * q0 + q0 + 1) as i64, 1);
            let pair = EigenPair::new(total.clone(), total.clone());
            let c = rat(5, 3);
            let t = solve_eigenform(&pair, q0, 6, &c);
            for v in enumerate_pbun(3, 6) {
                assert_eq!(t.values[&v], c, "q0={q0} v={v}");
            }
            let report = verify_hecke_relations(&t, &pair).unwrap();
            assert!(report.is_clean());
        }
    }

    #[test]
    fn lambda_zero_regression_table() {
        // derived with the elimination solver and frozen
        let pair = EigenPair::from_i64(0, 0);
        let t = solve_eigenform(&pair, 2, 2, &rat(1, 1));
        assert_eq!(t.values[&pt(&[0, 0])], rat(1, 1));
        assert_eq!(t.values[&pt(&[0, 1])], rat(0, 1));
        assert_eq!(t.values[&pt(&[0, 2])], rat(0, 1));
        assert_eq!(t.values[&pt(&[1, 1])], rat(0, 1));
        assert_eq!(t.values[&pt(&[1, 2])], rat(-4, 3));
        assert_eq!(t.values[&pt(&[2, 2])], rat(0, 1));
        let e = solve_by_elimination(&pair, 2, 2, &rat(1, 1)).unwrap();
        assert_eq!(t, e);
    }

    #[test]
    fn recursion_matches_elimination_on_random_pairs() {
        let mut rng = StdRng::seed_from_u64(42);
        for i in 0..10 {
            let pair = random_pair(&mut rng);
            let q0 = [2u64, 3, 4][i % 3];
            let bound = 2 + (i as i64 % 4);
            let f0 = rat(rng.gen_range(-5..=5), rng.gen_range(1..=5));
            let a = solve_eigenform(&pair, q0, bound, &f0);
            let b = solve_by_elimination(&pair, q0, bound, &f0).unwrap();
            assert_eq!(a, b, "pair {pair:?} q0={q0} bound={bound}");
        }
    }

    #[test]
    fn zero_start_gives_zero_table() {
        let pair = EigenPair::from_i64(4, -7);
        let t = solve_by_elimination(&pair, 3, 4, &rat(0, 1)).unwrap();
        assert!(t.values.values().all(|v| v.is_zero()));
    }

    #[test]
    fn linearity_in_f0() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..5 {
            let pair = random_pair(&mut rng);
            let c = rat(rng.gen_range(-7..=7), rng.gen_range(1..=7));
            let base = solve_eigenform(&pair, 3, 4, &rat(1, 1));
            let scaled = solve_eigenform(&pair, 3, 4, &c);
            for (v, val) in &base.values {
                assert_eq!(scaled.values[v], val * &c);
            }
        }
    }

    #[test]
    fn scaling_lambda_is_not_scaling_the_table() {
        let pair = EigenPair::from_i64(2, 3);
        let doubled = EigenPair::from_i64(4, 6);
        let a = solve_eigenform(&pair, 2, 3, &rat(1, 1));
        let b = solve_eigenform(&doubled, 2, 3, &rat(1, 1));
        assert_ne!(a, b);
    }

    #[test]
    fn relations_hold_at_wide_truncation() {
        let pair = EigenPair::from_strs("-2/3", "7/5").unwrap();
        for q0 in [2u64, 3] {
            let t = solve_eigenform(&pair, q0, 8, &rat(1, 1));
            let report = verify_hecke_relations(&t, &pair).unwrap();
            assert_eq!(report.violations, vec![], "q0={q0}");
            assert!(report.checked > 0);
        }
    }

    #[test]
    fn perturbation_breaks_a_relation() {
        let pair = EigenPair::from_i64(1, 1);
        let mut t = solve_eigenform(&pair, 2, 4, &rat(1, 1));
        let v = pt(&[0, 1]);
        let bumped = &t.values[&v] + &rat(1, 1);
        t.values.insert(v, bumped);
        let report = verify_hecke_relations(&t, &pair).unwrap();
        assert!(!report.is_clean());
    }

    #[test]
    fn zero_table_satisfies_everything() {
        let pair = EigenPair::from_i64(9, -4);
        let t = FormTable::constant(2, 4, rat(0, 1));
        assert!(verify_hecke_relations(&t, &pair).unwrap().is_clean());
    }

    #[test]
    fn unpinned_system_has_a_line_of_solutions() {
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..5 {
            let pair = random_pair(&mut rng);
            assert_eq!(relation_nullity(&pair, 2, 4, &[]).unwrap(), 1);
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-5").unwrap(), rat(-5, 1));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("2/-3").is_err());
        assert_eq!(format_rational(&rat(-3, 2)), "-3/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
    }

    #[test]
    fn table_file_round_trip() {
        let pair = EigenPair::from_strs("3/2", "5").unwrap();
        let t = solve_eigenform(&pair, 2, 3, &rat(1, 1));
        let file = FormTableFile::from_table(&t, &pair);
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: FormTableFile = serde_json::from_str(&json).unwrap();
        let (t2, pair2) = parsed.to_table().unwrap();
        assert_eq!(t, t2);
        assert_eq!(pair, pair2);
    }
}
