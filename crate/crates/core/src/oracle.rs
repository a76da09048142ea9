//! Brute-force neighbor counts over small prime fields, independent of the
//! closed-form rules: enumerate the fiber subspaces at the rational point
//! t = 0, compute the twisted section counts of each kernel subsheaf, and
//! recover its splitting type from the h^0 profile.

use std::collections::BTreeMap;

use num::traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundles::{canonical_projective, enumerate_pbun, splitting_from_h0_profile, ProjectiveType, SplittingType};
use crate::error::{Error, Result};
use crate::hecke::phi_neighbors;
use crate::linalg_fq::{enumerate_subspaces, FqMatrix, Subspace};
use crate::qpoly::QPoly;

/// Neighbor multiplicities of one source class at one prime, keyed by the
/// normalized class of the kernel subsheaf. The counts total the number of
/// subspaces enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborCount {
    pub src: ProjectiveType,
    pub counts: BTreeMap<ProjectiveType, u64>,
    pub q0: u64,
    pub r: usize,
}

/// Splitting type of the subsheaf of sections whose value at t = 0 lies in
/// W. Sections of the k-th twist of O(d) are the polynomials of degree at
/// most d + k, and evaluation at 0 reads the constant coefficient, so each
/// twisted section count is a corank computation against the functionals
/// cutting out W.
pub fn kernel_splitting(s: &SplittingType, w: &Subspace, q0: u64) -> Result<SplittingType> {
    let n = s.rank();
    if w.ambient() != n {
        return Err(Error::DimensionMismatch(format!(
            "subspace of F^{} against rank {n}",
            w.ambient()
        )));
    }
    if w.p() != q0 {
        return Err(Error::DimensionMismatch(format!(
            "subspace over F_{} evaluated at q0 = {q0}",
            w.p()
        )));
    }
    let r = n - w.dim();
    if r == 0 {
        return Err(Error::DimensionMismatch("subspace must be proper".into()));
    }
    let constraints = w.annihilator();
    let degrees = s.degrees();
    let m = degrees.iter().map(|d| d.abs()).max().unwrap();
    // zero regime needs k <= -(max degree) - 1; saturation needs
    // k >= -(min kernel degree), and kernel degrees only drop by at most r
    let k_min = -(m + 2);
    let k_max = m + n as i64 + 2;
    let mut profile = BTreeMap::new();
    for k in k_min..=k_max {
        let active: Vec<usize> = (0..n).filter(|&i| degrees[i] + k >= 0).collect();
        let total = s.h0(k);
        let restricted: Vec<Vec<u64>> = (0..constraints.rows())
            .map(|i| active.iter().map(|&j| constraints.get(i, j)).collect())
            .collect();
        let rank = if active.is_empty() {
            0
        } else {
            FqMatrix::from_rows(q0, &restricted)?.rank()
        };
        profile.insert(k, total - rank as i64);
    }
    let kernel = splitting_from_h0_profile(&profile, n)?;
    debug_assert_eq!(kernel.degree(), s.degree() - r as i64);
    Ok(kernel)
}

/// Neighbor counts for a splitting-type representative: one kernel class per
/// subspace of dimension n - r. Counts depend only on the class of `s`.
pub fn splitting_neighbor_counts(
    s: &SplittingType,
    r: usize,
    q0: u64,
) -> Result<BTreeMap<ProjectiveType, u64>> {
    let n = s.rank();
    assert!(r >= 1 && r <= n, "operator index out of range");
    let mut counts = BTreeMap::new();
    for w in enumerate_subspaces(q0, n, n - r)? {
        let kernel = kernel_splitting(s, &w, q0)?;
        *counts.entry(canonical_projective(&kernel)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Brute-force neighbor multiplicities of a class under the r-th operator.
pub fn neighbor_oracle(p: &ProjectiveType, r: usize, q0: u64) -> Result<NeighborCount> {
    let counts = splitting_neighbor_counts(&p.to_splitting(), r, q0)?;
    Ok(NeighborCount { src: p.clone(), counts, q0, r })
}

/// One disagreement between the closed-form rule row and the brute-force
/// counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleMismatch {
    pub vertex: ProjectiveType,
    pub r: u8,
    pub q0: u64,
    pub expected: Vec<CountEntry>,
    pub got: Vec<CountEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEntry {
    #[serde(rename = "type")]
    pub ty: Vec<i64>,
    pub count: u64,
}

fn to_entries(counts: &BTreeMap<ProjectiveType, u64>) -> Vec<CountEntry> {
    counts
        .iter()
        .map(|(p, &c)| CountEntry { ty: p.gaps().to_vec(), count: c })
        .collect()
}

/// Cross-validation report: every (vertex, operator, prime) cell checked and
/// the list of mismatches, expected to be empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checked: usize,
    pub mismatches: Vec<RuleMismatch>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Certifies the closed-form rule tables against the subspace enumeration
/// for every class with gaps bounded by `bound`, both operators, and every
/// listed prime.
pub fn verify_rules(bound: i64, primes: &[u64]) -> Result<VerifyReport> {
    let vertices = enumerate_pbun(3, bound);
    let mut cells = Vec::new();
    for v in &vertices {
        for r in [1u8, 2] {
            for &q0 in primes {
                cells.push((v.clone(), r, q0));
            }
        }
    }
    let results: Vec<Result<Option<RuleMismatch>>> = cells
        .par_iter()
        .map(|(v, r, q0)| {
            let expected: BTreeMap<ProjectiveType, u64> = phi_neighbors(*r, v)?
                .into_iter()
                .map(|(t, m)| {
                    let count = m
                        .eval(*q0)?
                        .to_u64()
                        .ok_or_else(|| Error::InstanceTooLarge("multiplicity exceeds u64".into()))?;
                    Ok((t, count))
                })
                .collect::<Result<_>>()?;
            let got = splitting_neighbor_counts(&v.to_splitting(), *r as usize, *q0)?;
            if expected == got {
                Ok(None)
            } else {
                Ok(Some(RuleMismatch {
                    vertex: v.clone(),
                    r: *r,
                    q0: *q0,
                    expected: to_entries(&expected),
                    got: to_entries(&got),
                }))
            }
        })
        .collect();
    let mut mismatches = Vec::new();
    for res in results {
        if let Some(m) = res? {
            mismatches.push(m);
        }
    }
    mismatches.sort_by(|a, b| (&a.vertex, a.r, a.q0).cmp(&(&b.vertex, b.r, b.q0)));
    Ok(VerifyReport { checked: cells.len(), mismatches })
}

/// Sanity identity: the counts must total the number of enumerated
/// subspaces, i.e. the Gaussian binomial at q0.
pub fn counts_total_is_subspace_count(c: &NeighborCount) -> bool {
    let n = c.src.rank();
    let expect = QPoly::gaussian_binomial(n, n - c.r).eval_unchecked(c.q0);
    let total: u64 = c.counts.values().sum();
    num::BigInt::from(total) == expect
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg_fq::Subspace;

    fn pt(v: &[i64]) -> ProjectiveType {
        ProjectiveType::from_gaps(v.to_vec())
    }

    fn st(v: &[i64]) -> SplittingType {
        SplittingType::new(v.to_vec())
    }

    #[test]
    fn kernel_splitting_examples() {
        // trivial rank 3, any plane: one constant survives per plane direction
        for w in enumerate_subspaces(2, 3, 2).unwrap() {
            assert_eq!(kernel_splitting(&st(&[0, 0, 0]), &w, 2).unwrap(), st(&[-1, 0, 0]));
        }
        for w in enumerate_subspaces(3, 3, 2).unwrap() {
            assert_eq!(kernel_splitting(&st(&[0, 0, 0]), &w, 3).unwrap(), st(&[-1, 0, 0]));
        }
        // rank 2, first-coordinate line: kills one constant
        let line = Subspace::from_span(FqMatrix::from_rows(2, &[vec![1, 0]]).unwrap());
        assert_eq!(kernel_splitting(&st(&[0, 0]), &line, 2).unwrap(), st(&[-1, 0]));
        // rank 2, zero subspace: both components lose their value at 0
        let zero = Subspace::zero(2, 2).unwrap();
        let k = kernel_splitting(&st(&[0, 1]), &zero, 2).unwrap();
        assert_eq!(k, st(&[-1, 0]));
        assert_eq!(st(&[-1, 0]).h0(0), 1);
        assert_eq!(st(&[-1, 0]).h0(-1), 0);
    }

    #[test]
    fn kernel_splitting_guards() {
        let w = Subspace::zero(2, 2).unwrap();
        assert!(matches!(
            kernel_splitting(&st(&[0, 0, 0]), &w, 2),
            Err(Error::DimensionMismatch(_))
        ));
        let w3 = Subspace::full(3, 3).unwrap();
        assert!(matches!(
            kernel_splitting(&st(&[0, 0, 0]), &w3, 2),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn degree_bookkeeping() {
        for p in enumerate_pbun(3, 3) {
            let s = p.to_splitting();
            for r in 1..=3usize {
                for w in enumerate_subspaces(2, 3, 3 - r).unwrap() {
                    let k = kernel_splitting(&s, &w, 2).unwrap();
                    assert_eq!(k.degree(), s.degree() - r as i64);
                }
            }
        }
    }

    #[test]
    fn trivial_class_counts() {
        let c = neighbor_oracle(&pt(&[0, 0]), 2, 2).unwrap();
        assert_eq!(c.counts, [(pt(&[0, 1]), 7)].into_iter().collect());
        let c = neighbor_oracle(&pt(&[0, 0]), 1, 3).unwrap();
        assert_eq!(c.counts, [(pt(&[1, 1]), 13)].into_iter().collect());
    }

    #[test]
    fn top_heavy_class_counts() {
        // e(0,d) under the first operator at q0 = 3: q^2 subspaces drop the
        // top section, q+1 keep it
        let c = neighbor_oracle(&pt(&[0, 2]), 1, 3).unwrap();
        assert_eq!(
            c.counts,
            [(pt(&[0, 1]), 9), (pt(&[1, 3]), 4)].into_iter().collect()
        );
        // e(1,2) under the second operator at q0 = 2
        let c = neighbor_oracle(&pt(&[1, 2]), 2, 2).unwrap();
        assert_eq!(
            c.counts,
            [(pt(&[2, 2]), 2), (pt(&[0, 1]), 4), (pt(&[1, 3]), 1)]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn rank_two_counts_match_the_classical_ray() {
        // rank-2 class O + O(d): one line (the top fiber) raises the gap,
        // the q others lower it
        for q0 in [2u64, 3, 5] {
            for d in 1..=3 {
                let counts = splitting_neighbor_counts(&st(&[0, d]), 1, q0).unwrap();
                let expect: BTreeMap<ProjectiveType, u64> =
                    [(pt(&[d + 1]), 1), (pt(&[d - 1]), q0)].into_iter().collect();
                assert_eq!(counts, expect, "q0={q0} d={d}");
            }
            let origin = splitting_neighbor_counts(&st(&[0, 0]), 1, q0).unwrap();
            assert_eq!(origin, [(pt(&[1]), q0 + 1)].into_iter().collect());
        }
    }

    #[test]
    fn full_twist_oracle_is_the_identity_loop() {
        for p in [pt(&[0, 0]), pt(&[1, 2]), pt(&[0, 3])] {
            let c = neighbor_oracle(&p, 3, 2).unwrap();
            assert_eq!(c.counts, [(p.clone(), 1)].into_iter().collect());
        }
    }

    #[test]
    fn totals_match_subspace_counts() {
        for p in enumerate_pbun(3, 2) {
            for r in 1..=3usize {
                for q0 in [2u64, 3] {
                    let c = neighbor_oracle(&p, r, q0).unwrap();
                    assert!(counts_total_is_subspace_count(&c), "p={p} r={r} q0={q0}");
                }
            }
        }
    }

    #[test]
    fn counts_are_class_invariants() {
        // two shift representatives of the same class give the same counts
        let a = st(&[0, 1, 3]);
        let b = st(&[-2, -1, 1]);
        for r in 1..=2usize {
            for q0 in [2u64, 3] {
                assert_eq!(
                    splitting_neighbor_counts(&a, r, q0).unwrap(),
                    splitting_neighbor_counts(&b, r, q0).unwrap()
                );
            }
        }
    }

    #[test]
    fn smallest_verification_run_is_clean() {
        let report = verify_rules(1, &[2]).unwrap();
        assert_eq!(report.checked, 6);
        assert!(report.is_clean(), "{:?}", report.mismatches);
    }

    #[test]
    fn verification_report_serializes() {
        let report = verify_rules(1, &[2]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(v["checked"], 6);
        assert_eq!(v["mismatches"], serde_json::json!([]));
    }
}
