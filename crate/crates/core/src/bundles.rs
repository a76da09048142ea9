//! Splitting types of vector bundles on the projective line and their
//! twist-normalized classes.
//!
//! Every rank-n bundle on P^1 splits as O(d_1) + ... + O(d_n), so a sorted
//! integer vector is a complete isomorphism invariant; tensoring by a line
//! bundle shifts all degrees, so the class modulo line bundles is the sorted
//! gap vector (d_2 - d_1, ..., d_n - d_1). Section counts h^0 determine a
//! splitting type through first differences, which is how the brute-force
//! modules recover splitting types without ever decomposing a sheaf.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted degree vector (d_1 <= ... <= d_n) of a split bundle on P^1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct SplittingType {
    degrees: Vec<i64>,
}

impl SplittingType {
    pub fn new(mut degrees: Vec<i64>) -> Self {
        assert!(!degrees.is_empty(), "splitting type needs rank >= 1");
        degrees.sort_unstable();
        SplittingType { degrees }
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// Total degree, invariant under permutation of the summands.
    pub fn degree(&self) -> i64 {
        self.degrees.iter().sum()
    }

    pub fn shifted(&self, c: i64) -> SplittingType {
        SplittingType::new(self.degrees.iter().map(|d| d + c).collect())
    }

    /// h^0 of the k-th twist: sum of max(0, d_i + k + 1).
    pub fn h0(&self, k: i64) -> i64 {
        self.degrees.iter().map(|d| (d + k + 1).max(0)).sum()
    }

    pub fn h0_profile(&self, k_min: i64, k_max: i64) -> BTreeMap<i64, i64> {
        (k_min..=k_max).map(|k| (k, self.h0(k))).collect()
    }
}

impl TryFrom<Vec<i64>> for SplittingType {
    type Error = String;
    fn try_from(v: Vec<i64>) -> std::result::Result<Self, String> {
        if v.is_empty() {
            return Err("splitting type needs rank >= 1".into());
        }
        Ok(SplittingType::new(v))
    }
}

impl From<SplittingType> for Vec<i64> {
    fn from(s: SplittingType) -> Vec<i64> {
        s.degrees
    }
}

/// Bundle class modulo line bundle twists: the sorted non-negative gap vector
/// of a splitting type with smallest degree shifted to 0. Structural equality
/// of gap vectors is equality of classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct ProjectiveType {
    gaps: Vec<i64>,
}

impl ProjectiveType {
    pub fn from_gaps(mut gaps: Vec<i64>) -> Self {
        assert!(gaps.iter().all(|&g| g >= 0), "gaps must be non-negative");
        gaps.sort_unstable();
        ProjectiveType { gaps }
    }

    pub fn gaps(&self) -> &[i64] {
        &self.gaps
    }

    pub fn rank(&self) -> usize {
        self.gaps.len() + 1
    }

    /// Largest gap; 0 for the rank-1 class.
    pub fn max_gap(&self) -> i64 {
        self.gaps.last().copied().unwrap_or(0)
    }

    /// The representative with smallest degree 0.
    pub fn to_splitting(&self) -> SplittingType {
        let mut degrees = Vec::with_capacity(self.rank());
        degrees.push(0);
        degrees.extend_from_slice(&self.gaps);
        SplittingType::new(degrees)
    }

    /// Class of the dual bundle. Involution.
    pub fn dualize(&self) -> ProjectiveType {
        let negated: Vec<i64> = self.to_splitting().degrees().iter().map(|d| -d).collect();
        canonical_projective(&SplittingType::new(negated))
    }
}

impl TryFrom<Vec<i64>> for ProjectiveType {
    type Error = String;
    fn try_from(v: Vec<i64>) -> std::result::Result<Self, String> {
        if v.iter().any(|&g| g < 0) {
            return Err("gaps must be non-negative".into());
        }
        Ok(ProjectiveType::from_gaps(v))
    }
}

impl From<ProjectiveType> for Vec<i64> {
    fn from(p: ProjectiveType) -> Vec<i64> {
        p.gaps
    }
}

impl fmt::Display for ProjectiveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.gaps.iter().map(|g| g.to_string()).collect();
        write!(f, "e({})", body.join(","))
    }
}

/// Normalizes a splitting type to its class: shift so the smallest degree is
/// 0 and record the remaining degrees as gaps. Idempotent on normalized input.
pub fn canonical_projective(s: &SplittingType) -> ProjectiveType {
    let d1 = s.degrees()[0];
    ProjectiveType::from_gaps(s.degrees()[1..].iter().map(|d| d - d1).collect())
}

/// All classes of rank n with every gap at most `bound`, in lexicographic
/// order of the gap vector. There are C(bound + n - 1, n - 1) of them.
pub fn enumerate_pbun(n: usize, bound: i64) -> Vec<ProjectiveType> {
    assert!(n >= 1 && bound >= 0);
    let mut out = Vec::new();
    let mut gaps = vec![0i64; n - 1];
    fn rec(out: &mut Vec<ProjectiveType>, gaps: &mut Vec<i64>, pos: usize, lo: i64, bound: i64) {
        if pos == gaps.len() {
            out.push(ProjectiveType::from_gaps(gaps.clone()));
            return;
        }
        for g in lo..=bound {
            gaps[pos] = g;
            rec(out, gaps, pos + 1, g, bound);
        }
    }
    rec(&mut out, &mut gaps, 0, 0, bound);
    out
}

/// Recovers the unique splitting type whose h^0 profile matches the given
/// one. The profile must cover a contiguous twist range that starts in the
/// zero regime (h^0 = 0) and ends saturated (first difference = n).
///
/// The first difference h^0(k) - h^0(k-1) counts the components with
/// d_i >= -k, so the second differences read off the degree multiset.
pub fn splitting_from_h0_profile(profile: &BTreeMap<i64, i64>, n: usize) -> Result<SplittingType> {
    if profile.len() < 2 {
        return Err(Error::ProfileInconsistent("profile needs at least two twists".into()));
    }
    let k_min = *profile.keys().next().unwrap();
    let k_max = *profile.keys().last().unwrap();
    if profile.len() as i64 != k_max - k_min + 1 {
        return Err(Error::ProfileInconsistent("twist range not contiguous".into()));
    }
    if profile[&k_min] != 0 {
        return Err(Error::ProfileInconsistent(format!(
            "profile({k_min}) = {} but the range must start at 0",
            profile[&k_min]
        )));
    }
    let mut degrees = Vec::with_capacity(n);
    let mut prev_count = 0i64;
    for k in (k_min + 1)..=k_max {
        let count = profile[&k] - profile[&(k - 1)];
        if count < prev_count || count > n as i64 {
            return Err(Error::ProfileInconsistent(format!(
                "first differences not monotone within [0, {n}] at twist {k}"
            )));
        }
        for _ in 0..(count - prev_count) {
            degrees.push(-k);
        }
        prev_count = count;
    }
    if prev_count != n as i64 {
        return Err(Error::ProfileInconsistent(format!(
            "profile not saturated: final first difference {prev_count} != rank {n}"
        )));
    }
    Ok(SplittingType::new(degrees))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn st(v: &[i64]) -> SplittingType {
        SplittingType::new(v.to_vec())
    }

    fn pt(v: &[i64]) -> ProjectiveType {
        ProjectiveType::from_gaps(v.to_vec())
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(canonical_projective(&st(&[3, 1, 2])), pt(&[1, 2]));
        assert_eq!(canonical_projective(&st(&[5, 5, 5])), pt(&[0, 0]));
        assert_eq!(canonical_projective(&st(&[-2, 0, 1])), pt(&[2, 3]));
    }

    #[test]
    fn normalization_is_idempotent() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..500 {
            let n = rng.gen_range(1..=4);
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-20..=20)).collect();
            let p = canonical_projective(&st(&v));
            assert_eq!(canonical_projective(&p.to_splitting()), p);
        }
    }

    #[test]
    fn shift_classes_agree() {
        let s = st(&[-1, 0, 4]);
        assert_eq!(canonical_projective(&s), canonical_projective(&s.shifted(7)));
        assert_eq!(canonical_projective(&s), canonical_projective(&s.shifted(-3)));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_pbun(3, 1),
            vec![pt(&[0, 0]), pt(&[0, 1]), pt(&[1, 1])]
        );
        assert_eq!(
            enumerate_pbun(3, 2),
            vec![
                pt(&[0, 0]),
                pt(&[0, 1]),
                pt(&[0, 2]),
                pt(&[1, 1]),
                pt(&[1, 2]),
                pt(&[2, 2])
            ]
        );
        assert_eq!(
            enumerate_pbun(2, 3),
            vec![pt(&[0]), pt(&[1]), pt(&[2]), pt(&[3])]
        );
        assert_eq!(enumerate_pbun(1, 5).len(), 1);
    }

    #[test]
    fn enumeration_count_matches_binomial() {
        for d in 0..=20 {
            let expect = (d + 1) * (d + 2) / 2;
            assert_eq!(enumerate_pbun(3, d).len() as i64, expect, "bound {d}");
        }
    }

    #[test]
    fn h0_examples() {
        assert_eq!(st(&[-1]).h0(0), 0);
        assert_eq!(st(&[0, 2]).h0(0), 4);
        assert_eq!(st(&[0, 1, 1]).h0(-1), 2);
    }

    #[test]
    fn profile_round_trip_exhaustive() {
        // every rank-3 splitting with entries in [-5, 5], profile on [-7, 7]
        for a in -5..=5 {
            for b in a..=5 {
                for c in b..=5 {
                    let s = st(&[a, b, c]);
                    let profile = s.h0_profile(-7, 7);
                    let back = splitting_from_h0_profile(&profile, 3).unwrap();
                    assert_eq!(back, s);
                }
            }
        }
        // rank 2 example from a plain round trip
        let s = st(&[0, 2]);
        let back = splitting_from_h0_profile(&s.h0_profile(-3, 1), 2).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn profile_jump_example() {
        // differences (0,1,1,3,3) over successive twists pin (0,2,2)
        let s = st(&[0, 2, 2]);
        let profile = s.h0_profile(-5, 2);
        assert_eq!(splitting_from_h0_profile(&profile, 3).unwrap(), s);
        // brute-force uniqueness over a box of candidates
        let mut matches = 0;
        for a in -3..=3 {
            for b in a..=3 {
                for c in b..=3 {
                    if st(&[a, b, c]).h0_profile(-5, 2) == profile {
                        matches += 1;
                    }
                }
            }
        }
        assert_eq!(matches, 1);
    }

    #[test]
    fn constant_profile_gives_constant_type() {
        let s = st(&[2, 2, 2]);
        assert_eq!(splitting_from_h0_profile(&s.h0_profile(-6, 2), 3).unwrap(), s);
    }

    #[test]
    fn profile_errors() {
        let mut bad = BTreeMap::new();
        bad.insert(0, 1);
        bad.insert(1, 0); // decreasing differences
        bad.insert(-1, 0);
        assert!(matches!(
            splitting_from_h0_profile(&bad, 2),
            Err(Error::ProfileInconsistent(_))
        ));
        let unsaturated = st(&[0, 0]).h0_profile(-3, -1);
        assert!(matches!(
            splitting_from_h0_profile(&unsaturated, 2),
            Err(Error::ProfileInconsistent(_))
        ));
    }

    #[test]
    fn dualize_examples_and_involution() {
        assert_eq!(pt(&[2, 2]).dualize(), pt(&[0, 2]));
        assert_eq!(pt(&[0, 2]).dualize(), pt(&[2, 2]));
        assert_eq!(pt(&[1, 3]).dualize(), pt(&[2, 3]));
        for p in enumerate_pbun(3, 10) {
            assert_eq!(p.dualize().dualize(), p);
        }
    }

    #[test]
    fn display_and_serde() {
        assert_eq!(pt(&[1, 2]).to_string(), "e(1,2)");
        let json = serde_json::to_string(&pt(&[1, 2])).unwrap();
        assert_eq!(json, "[1,2]");
        let back: ProjectiveType = serde_json::from_str(&json).unwrap();
        assert_eq!(back, pt(&[1, 2]));
        let s_json = serde_json::to_string(&st(&[-1, 0, 2])).unwrap();
        assert_eq!(s_json, "[-1,0,2]");
        assert!(serde_json::from_str::<ProjectiveType>("[-1,0]").is_err());
    }
}
