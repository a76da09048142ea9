//! Extension groups between split bundles, explicit extension classes as
//! transition-matrix cocycles, section counts of the resulting bundles, and
//! the cusp-vanishing linear systems built from extension sums.
//!
//! Section convention: a bundle is presented by an invertible Laurent
//! transition matrix T(t); a global section of the k-th twist is a pair of
//! polynomial vectors (s0(t), sinf(u)) with s0(t) = t^k T(t) sinf(1/t), and
//! O(d) has transition t^d, so h^0(O(d)) = d + 1 with monomial basis
//! 1, ..., t^d. In the block presentation [[t^l, B], [0, t^k]] of an
//! extension of O(k) by O(l), the slot B is well defined modulo
//! t^k F[t] + t^l F[1/t], so the classes are spanned by the monomials t^e
//! with l + 1 <= e <= k - 1; there are max(0, k - l - 1) of them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::rational::BigRational;
use num::traits::Zero;
use num::BigInt;
use serde::Serialize;

use crate::bundles::{canonical_projective, enumerate_pbun, splitting_from_h0_profile, ProjectiveType, SplittingType};
use crate::eigenform::FormTable;
use crate::error::{Error, Result};
use crate::exact::{self, SparseRow};
use crate::linalg_fq::FqMatrix;

/// Laurent polynomial over F_p: coefficient of t^(lo + i) at index i. The
/// zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<u64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { lo: 0, coeffs: Vec::new() }
    }

    pub fn monomial(e: i64, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            LaurentPoly { lo: e, coeffs: vec![c] }
        }
    }

    fn normalize(mut self, p: u64) -> Self {
        for c in self.coeffs.iter_mut() {
            *c %= p;
        }
        while self.coeffs.first().is_some_and(|&c| c == 0) {
            self.coeffs.remove(0);
            self.lo += 1;
        }
        while self.coeffs.last().is_some_and(|&c| c == 0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.lo)
        }
    }

    pub fn max_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.lo + self.coeffs.len() as i64 - 1)
        }
    }

    pub fn coeff(&self, e: i64) -> u64 {
        if self.is_zero() || e < self.lo || e >= self.lo + self.coeffs.len() as i64 {
            0
        } else {
            self.coeffs[(e - self.lo) as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.lo + i as i64, c))
    }

    fn add(&self, other: &LaurentPoly, p: u64) -> LaurentPoly {
        if self.is_zero() {
            return other.clone().normalize(p);
        }
        if other.is_zero() {
            return self.clone().normalize(p);
        }
        let lo = self.lo.min(other.lo);
        let hi = self.max_exp().unwrap().max(other.max_exp().unwrap());
        let mut coeffs = vec![0u64; (hi - lo + 1) as usize];
        for (e, c) in self.terms().chain(other.terms()) {
            let idx = (e - lo) as usize;
            coeffs[idx] = (coeffs[idx] + c) % p;
        }
        LaurentPoly { lo, coeffs }.normalize(p)
    }

    fn mul(&self, other: &LaurentPoly, p: u64) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let lo = self.lo + other.lo;
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = (coeffs[i + j] + a * b) % p;
            }
        }
        LaurentPoly { lo, coeffs }.normalize(p)
    }

    fn scale(&self, c: u64, p: u64) -> LaurentPoly {
        let mut out = self.clone();
        for v in out.coeffs.iter_mut() {
            *v = *v * c % p;
        }
        out.normalize(p)
    }
}

/// Square Laurent transition matrix over F_q0 presenting a bundle; the
/// determinant must be a unit (nonzero scalar times a monomial).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionBundle {
    q0: u64,
    mat: Vec<Vec<LaurentPoly>>,
}

impl TransitionBundle {
    pub fn from_matrix(q0: u64, mat: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        if !crate::qpoly::is_prime(q0) {
            return Err(Error::ModulusNotPrime(q0));
        }
        let n = mat.len();
        assert!(n > 0 && mat.iter().all(|r| r.len() == n), "matrix must be square");
        Ok(TransitionBundle { q0, mat })
    }

    pub fn diagonal(q0: u64, degrees: &[i64]) -> Result<Self> {
        let n = degrees.len();
        let mut mat = vec![vec![LaurentPoly::zero(); n]; n];
        for (i, &d) in degrees.iter().enumerate() {
            mat[i][i] = LaurentPoly::monomial(d, 1);
        }
        Self::from_matrix(q0, mat)
    }

    /// Block-triangular presentation of an extension of the quotient by the
    /// sub: [[diag(t^l), B], [0, diag(t^k)]].
    pub fn extension(sub: &SplittingType, quotient: &SplittingType, cocycle: &[Vec<LaurentPoly>], q0: u64) -> Result<Self> {
        let s = sub.rank();
        let r = quotient.rank();
        assert_eq!(cocycle.len(), s);
        assert!(cocycle.iter().all(|row| row.len() == r));
        let n = s + r;
        let mut mat = vec![vec![LaurentPoly::zero(); n]; n];
        for (j, &l) in sub.degrees().iter().enumerate() {
            mat[j][j] = LaurentPoly::monomial(l, 1);
        }
        for (i, &k) in quotient.degrees().iter().enumerate() {
            mat[s + i][s + i] = LaurentPoly::monomial(k, 1);
        }
        for (j, row) in cocycle.iter().enumerate() {
            for (i, b) in row.iter().enumerate() {
                mat[j][s + i] = b.clone().normalize(q0);
            }
        }
        Self::from_matrix(q0, mat)
    }

    pub fn size(&self) -> usize {
        self.mat.len()
    }

    pub fn det(&self) -> LaurentPoly {
        fn det_rec(mat: &[Vec<LaurentPoly>], p: u64) -> LaurentPoly {
            let n = mat.len();
            if n == 1 {
                return mat[0][0].clone();
            }
            let mut acc = LaurentPoly::zero();
            for (i, row) in mat.iter().enumerate() {
                if row[0].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<LaurentPoly>> = mat
                    .iter()
                    .enumerate()
                    .filter(|(ri, _)| *ri != i)
                    .map(|(_, r)| r[1..].to_vec())
                    .collect();
                let mut term = row[0].mul(&det_rec(&minor, p), p);
                if i % 2 == 1 {
                    term = term.scale(p - 1, p);
                }
                acc = acc.add(&term, p);
            }
            acc
        }
        det_rec(&self.mat, self.q0)
    }

    fn upper_triangular_monomial_diag(&self) -> Option<Vec<i64>> {
        let n = self.size();
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..i {
                if !self.mat[i][j].is_zero() {
                    return None;
                }
            }
            if self.mat[i][i].coeffs.len() != 1 {
                return None;
            }
            diag.push(self.mat[i][i].lo);
        }
        Some(diag)
    }

    /// Degree caps on the sinf components such that every global section of
    /// the k-th twist satisfies them. For a triangular matrix with monomial
    /// diagonal t^(d_c), back-substitution gives per-component caps; the
    /// general case uses deg det + k - (n-1) * (most negative entry
    /// exponent), which bounds the adjugate solve.
    fn section_caps(&self, k: i64) -> Result<Vec<i64>> {
        let n = self.size();
        if let Some(diag) = self.upper_triangular_monomial_diag() {
            let mut caps = vec![0i64; n];
            for c in (0..n).rev() {
                let mut cap = k + diag[c];
                for c2 in (c + 1)..n {
                    if self.mat[c][c2].is_zero() || caps[c2] < 0 {
                        continue;
                    }
                    cap = cap.max(caps[c2] + diag[c] - self.mat[c][c2].min_exp().unwrap());
                }
                caps[c] = cap;
            }
            return Ok(caps);
        }
        let det = self.det();
        if det.coeffs.len() != 1 {
            return Err(Error::SingularTransition);
        }
        let delta = det.lo;
        let min_exp = self
            .mat
            .iter()
            .flatten()
            .filter_map(|e| e.min_exp())
            .min()
            .unwrap_or(0)
            .min(0);
        let cap = delta + k - (n as i64 - 1) * min_exp;
        Ok(vec![cap; n])
    }

    /// Dimension of the space of global sections of the k-th twist, by exact
    /// rank computation on the polynomiality constraints.
    pub fn h0(&self, k: i64) -> Result<usize> {
        let p = self.q0;
        let n = self.size();
        let caps = self.section_caps(k)?;
        let sizes: Vec<usize> = caps.iter().map(|&c| (c + 1).max(0) as usize).collect();
        let mut offsets = vec![0usize; n];
        let mut total = 0usize;
        for c in 0..n {
            offsets[c] = total;
            total += sizes[c];
        }
        if total == 0 {
            return Ok(0);
        }
        if total > 20_000 {
            return Err(Error::TruncationOverflow(format!("{total} section unknowns")));
        }
        // negative-exponent coefficients of t^k T(t) sinf(1/t) must vanish
        let mut row_index: BTreeMap<(usize, i64), usize> = BTreeMap::new();
        let mut entries: Vec<(usize, usize, u64)> = Vec::new();
        for (ri, row) in self.mat.iter().enumerate() {
            for (cj, entry) in row.iter().enumerate() {
                for (e, a) in entry.terms() {
                    for m in 0..sizes[cj] as i64 {
                        let nu = k + e - m;
                        if nu < 0 {
                            let next = row_index.len();
                            let idx = *row_index.entry((ri, nu)).or_insert(next);
                            entries.push((idx, offsets[cj] + m as usize, a));
                        }
                    }
                }
            }
        }
        let nrows = row_index.len();
        if nrows == 0 {
            return Ok(total);
        }
        if nrows > 20_000 {
            return Err(Error::TruncationOverflow(format!("{nrows} constraint rows")));
        }
        let mut m = FqMatrix::zeros(p, nrows, total)?;
        for (r, c, a) in entries {
            let v = (m.get(r, c) + a) % p;
            m.set(r, c, v);
        }
        Ok(total - m.rank())
    }
}

/// Dimension of the extension group of the quotient by the sub:
/// sum over components of max(0, k_i - l_j - 1).
pub fn ext_dim(quotient: &SplittingType, sub: &SplittingType) -> usize {
    let mut dim = 0i64;
    for &k in quotient.degrees() {
        for &l in sub.degrees() {
            dim += (k - l - 1).max(0);
        }
    }
    dim as usize
}

/// Extension class of the quotient by the sub, given by a cocycle matrix
/// B[j][i] with monomial support in [l_j + 1, k_i - 1]. The zero cocycle is
/// the split extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    pub quotient: SplittingType,
    pub sub: SplittingType,
    pub q0: u64,
    pub cocycle: Vec<Vec<LaurentPoly>>,
}

impl ExtClass {
    pub fn zero(quotient: SplittingType, sub: SplittingType, q0: u64) -> Self {
        let rows = sub.rank();
        let cols = quotient.rank();
        ExtClass { quotient, sub, q0, cocycle: vec![vec![LaurentPoly::zero(); cols]; rows] }
    }

    pub fn new(
        quotient: SplittingType,
        sub: SplittingType,
        q0: u64,
        cocycle: Vec<Vec<LaurentPoly>>,
    ) -> Result<Self> {
        assert_eq!(cocycle.len(), sub.rank());
        assert!(cocycle.iter().all(|r| r.len() == quotient.rank()));
        for (j, &l) in sub.degrees().iter().enumerate() {
            for (i, &k) in quotient.degrees().iter().enumerate() {
                let b = &cocycle[j][i];
                if b.is_zero() {
                    continue;
                }
                let (lo, hi) = (l + 1, k - 1);
                if b.min_exp().unwrap() < lo || b.max_exp().unwrap() > hi {
                    return Err(Error::IllegalCocycleSupport(format!(
                        "entry ({j},{i}) outside [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(ExtClass { quotient, sub, q0, cocycle })
    }

    pub fn is_split(&self) -> bool {
        self.cocycle.iter().flatten().all(|b| b.is_zero())
    }
}

/// Legal cocycle monomial slots for the pair, in deterministic order. Their
/// number equals ext_dim.
pub fn cocycle_positions(quotient: &SplittingType, sub: &SplittingType) -> Vec<(usize, usize, i64)> {
    let mut out = Vec::new();
    for (j, &l) in sub.degrees().iter().enumerate() {
        for (i, &k) in quotient.degrees().iter().enumerate() {
            for e in (l + 1)..=(k - 1) {
                out.push((j, i, e));
            }
        }
    }
    out
}

fn class_from_coeffs(
    quotient: &SplittingType,
    sub: &SplittingType,
    q0: u64,
    positions: &[(usize, usize, i64)],
    coeffs: &[u64],
) -> ExtClass {
    let mut c = ExtClass::zero(quotient.clone(), sub.clone(), q0);
    for (&(j, i, e), &a) in positions.iter().zip(coeffs) {
        if a != 0 {
            c.cocycle[j][i] = c.cocycle[j][i].add(&LaurentPoly::monomial(e, a), q0);
        }
    }
    c
}

/// Splitting type of the middle term of an extension class, recovered from
/// the h^0 profile of its block transition matrix. The total degree is the
/// sum of the two endpoint degrees.
pub fn middle_splitting(c: &ExtClass) -> Result<SplittingType> {
    let n = c.sub.rank() + c.quotient.rank();
    if c.is_split() {
        let mut degrees = c.sub.degrees().to_vec();
        degrees.extend_from_slice(c.quotient.degrees());
        return Ok(SplittingType::new(degrees));
    }
    let bundle = TransitionBundle::extension(&c.sub, &c.quotient, &c.cocycle, c.q0)?;
    let m = c
        .sub
        .degrees()
        .iter()
        .chain(c.quotient.degrees())
        .map(|d| d.abs())
        .max()
        .unwrap();
    let mut profile = BTreeMap::new();
    for k in -(m + 2)..=(m + 2) {
        profile.insert(k, bundle.h0(k)? as i64);
    }
    let splitting = splitting_from_h0_profile(&profile, n)?;
    debug_assert_eq!(splitting.degree(), c.sub.degree() + c.quotient.degree());
    Ok(splitting)
}

/// Class of the middle term of an extension class.
pub fn middle_term(c: &ExtClass) -> Result<ProjectiveType> {
    Ok(canonical_projective(&middle_splitting(c)?))
}

fn normalize_ray(coeffs: &[u64], q0: u64) -> Vec<u64> {
    let Some(first) = coeffs.iter().find(|&&c| c != 0) else {
        return coeffs.to_vec();
    };
    // scale so the leading coefficient is 1; scalar multiples of a cocycle
    // have isomorphic middle terms
    let mut inv = 1u64;
    let mut base = *first % q0;
    let mut e = q0 - 2;
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * base % q0;
        }
        base = base * base % q0;
        e >>= 1;
    }
    coeffs.iter().map(|&c| c * inv % q0).collect()
}

fn middle_terms_with_counts(
    quotient: &SplittingType,
    sub: &SplittingType,
    q0: u64,
) -> Result<BTreeMap<ProjectiveType, u64>> {
    let positions = cocycle_positions(quotient, sub);
    let dim = positions.len() as u32;
    let total = (q0 as u128).checked_pow(dim).filter(|&t| t <= 1_000_000).ok_or_else(|| {
        Error::InstanceTooLarge(format!("{q0}^{dim} extension classes"))
    })?;
    let mut memo: HashMap<Vec<u64>, ProjectiveType> = HashMap::new();
    let mut counts = BTreeMap::new();
    let mut coeffs = vec![0u64; positions.len()];
    for step in 0..total {
        if step > 0 {
            for slot in coeffs.iter_mut() {
                *slot += 1;
                if *slot < q0 {
                    break;
                }
                *slot = 0;
            }
        }
        let key = normalize_ray(&coeffs, q0);
        let class = match memo.get(&key) {
            Some(c) => c.clone(),
            None => {
                let c = middle_term(&class_from_coeffs(quotient, sub, q0, &positions, &key))?;
                memo.insert(key, c.clone());
                c
            }
        };
        *counts.entry(class).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Sum of the table over the middle terms of every extension class of the
/// quotient by the sub (all q0^ext_dim cocycles, not classes up to scalar).
pub fn cuspidal_sum(
    table: &FormTable,
    quotient: &SplittingType,
    sub: &SplittingType,
    q0: u64,
) -> Result<BigRational> {
    let counts = middle_terms_with_counts(quotient, sub, q0)?;
    let mut acc = BigRational::zero();
    for (class, count) in counts {
        let value = table.values.get(&class).ok_or_else(|| {
            Error::TruncationTooSmall(format!("middle term {class} outside the table"))
        })?;
        acc += value * BigRational::from_integer(BigInt::from(count));
    }
    Ok(acc)
}

/// Splits a class into its lowest component and the rest. The extension
/// group of the lowest piece by the rest is trivial, so any table with
/// vanishing extension sums vanishes at the class itself.
pub fn cusp_vanishing_certificate(p: &ProjectiveType) -> (SplittingType, SplittingType) {
    let s = p.to_splitting();
    assert!(s.rank() >= 2, "certificate needs rank >= 2");
    let quotient = SplittingType::new(vec![s.degrees()[0]]);
    let sub = SplittingType::new(s.degrees()[1..].to_vec());
    debug_assert_eq!(ext_dim(&quotient, &sub), 0);
    (quotient, sub)
}

/// Shape of the cusp-vanishing linear system at a truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspReport {
    pub bound: i64,
    pub q0: u64,
    pub certificate_rows: usize,
    pub extra_rows: usize,
    pub dimension: usize,
}

/// Builds the vanishing system from the per-vertex certificates plus every
/// decomposition pair small enough to enumerate (at most 16 cocycles), and
/// returns its solution-space dimension.
pub fn cusp_space_report(bound: i64, q0: u64) -> Result<CuspReport> {
    let vertices = enumerate_pbun(3, bound);
    let index: BTreeMap<&ProjectiveType, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut rows: Vec<SparseRow> = Vec::new();
    let mut certificate_rows = 0;
    for v in &vertices {
        let (quotient, sub) = cusp_vanishing_certificate(v);
        debug_assert_eq!(ext_dim(&quotient, &sub), 0);
        // the single split class is v itself
        debug_assert_eq!(
            middle_term(&ExtClass::zero(quotient, sub, q0)).unwrap(),
            *v
        );
        rows.push(vec![(index[v], BigRational::from_integer(1.into()))]);
        certificate_rows += 1;
    }
    let mut seen: BTreeSet<(Vec<i64>, Vec<i64>)> = BTreeSet::new();
    let mut extra_rows = 0;
    for v in &vertices {
        let degrees = v.to_splitting().degrees().to_vec();
        for mask in 1u32..(1 << degrees.len()) - 1 {
            let quot: Vec<i64> = (0..degrees.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| degrees[i])
                .collect();
            let sub: Vec<i64> = (0..degrees.len())
                .filter(|i| mask & (1 << i) == 0)
                .map(|i| degrees[i])
                .collect();
            let quotient = SplittingType::new(quot);
            let sub = SplittingType::new(sub);
            let dim = ext_dim(&quotient, &sub) as u32;
            if dim == 0 {
                continue; // single split term, already covered per vertex
            }
            if (q0 as u128).pow(dim) > 16 {
                continue;
            }
            let key = (quotient.degrees().to_vec(), sub.degrees().to_vec());
            if !seen.insert(key) {
                continue;
            }
            let counts = middle_terms_with_counts(&quotient, &sub, q0)?;
            let mut row: SparseRow = Vec::new();
            for (class, count) in counts {
                let idx = *index.get(&class).ok_or_else(|| {
                    Error::TruncationTooSmall(format!("middle term {class} outside the truncation"))
                })?;
                row.push((idx, BigRational::from_integer(BigInt::from(count))));
            }
            rows.push(row);
            extra_rows += 1;
        }
    }
    let dimension = exact::nullity(&rows, vertices.len());
    Ok(CuspReport { bound, q0, certificate_rows, extra_rows, dimension })
}

/// Dimension of the space of tables with vanishing extension sums; the
/// certificates force it to zero.
pub fn cusp_space_dimension(bound: i64, q0: u64) -> Result<usize> {
    Ok(cusp_space_report(bound, q0)?.dimension)
}
