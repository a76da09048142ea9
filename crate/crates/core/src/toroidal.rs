//! The toroidal functional for the constant cubic extension: pushforward of
//! line bundles along the degree-3 scalar extension of the line, the finite
//! coset sum it induces on value tables, and the intersection check with the
//! eigenfunction spaces.
//!
//! The coset sum has a single term: the pushforward of every line bundle is
//! projectively trivial, and the two Picard groups are identified by the
//! degree map, so deciding vanishing of the functional reduces to reading
//! the table at the trivial class. The positive measure constant in front is
//! never computed; it cannot affect vanishing.

use num::rational::BigRational;
use num::traits::Zero;
use serde::Serialize;

use crate::bundles::{canonical_projective, splitting_from_h0_profile, ProjectiveType};
use crate::eigenform::{relation_nullity, solve_eigenform, EigenPair, FormTable};
use crate::error::{Error, Result};
use crate::exact::SparseRow;

/// Result of evaluating the coset sum on a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToroidalReport {
    pub coset_count: usize,
    pub representatives: Vec<i64>,
    pub images: Vec<ProjectiveType>,
    #[serde(with = "rational_string")]
    pub sum: BigRational,
}

mod rational_string {
    use num::rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::eigenform::format_rational(r))
    }
}

/// Class of the pushforward of a degree-m line bundle along the constant
/// cubic extension. The pushforward has rank 3 and twisted section counts
/// 3 * max(0, m + k + 1), which force the splitting (m, m, m): the class is
/// always trivial.
pub fn pushforward_line(m: i64) -> ProjectiveType {
    let bound = m.abs() + 2;
    let profile = (-bound..=bound).map(|k| (k, 3 * (m + k + 1).max(0))).collect();
    let splitting = splitting_from_h0_profile(&profile, 3).expect("profile is saturated by construction");
    debug_assert_eq!(splitting.degrees(), [m, m, m]);
    canonical_projective(&splitting)
}

fn upstairs_degree(e: u64) -> u64 {
    // a degree-e point splits upstairs into gcd(e,3) points, each of
    // residue degree lcm(e,3)/3 over the extended constants
    let gcd = {
        let (mut a, mut b) = (e, 3u64);
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    let lcm = e / gcd * 3;
    gcd * (lcm / 3)
}

/// Number of line-bundle cosets downstairs-pullbacks carve out upstairs.
/// Pulling back preserves degree pointwise, so the degree maps identify both
/// groups and there is a single coset.
pub fn picard_coset_count() -> usize {
    for e in 1..=12u64 {
        assert_eq!(upstairs_degree(e), e);
    }
    1
}

/// Evaluates the coset sum on a table: a single term, the value at the
/// image of the trivial line bundle.
pub fn toroidal_sum(f: &FormTable) -> Result<ToroidalReport> {
    let coset_count = picard_coset_count();
    let representatives = vec![0i64];
    let images: Vec<ProjectiveType> = representatives.iter().map(|&m| pushforward_line(m)).collect();
    let mut sum = BigRational::zero();
    for image in &images {
        sum += f
            .values
            .get(image)
            .ok_or_else(|| Error::MissingValue(image.to_string()))?;
    }
    Ok(ToroidalReport { coset_count, representatives, images, sum })
}

/// Outcome of intersecting the vanishing condition with an eigenvalue pair's
/// solution space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IntersectionVerdict {
    TrivialIntersection,
    Nontrivial { nullity: usize },
}

/// Checks that no nonzero table satisfies both eigenvalue relations and the
/// vanishing of the coset sum: the solved table with base value 1 has
/// nonzero sum, and pinning the sum to zero drops the relation system's
/// nullity from one to zero.
pub fn toroidal_eigen_intersection(pair: &EigenPair, q0: u64, bound: i64) -> Result<IntersectionVerdict> {
    let table = solve_eigenform(pair, q0, bound, &BigRational::from_integer(1.into()));
    let report = toroidal_sum(&table)?;
    if report.sum.is_zero() {
        return Ok(IntersectionVerdict::Nontrivial { nullity: 1 });
    }
    let trivial = ProjectiveType::from_gaps(vec![0, 0]);
    let pin_index = crate::bundles::enumerate_pbun(3, bound)
        .iter()
        .position(|v| *v == trivial)
        .expect("trivial class in range");
    let extra: Vec<SparseRow> = vec![vec![(pin_index, BigRational::from_integer(1.into()))]];
    let nullity = relation_nullity(pair, q0, bound, &extra)?;
    if nullity == 0 {
        Ok(IntersectionVerdict::TrivialIntersection)
    } else {
        Ok(IntersectionVerdict::Nontrivial { nullity })
    }
}
