//! Dense exact linear algebra over prime fields F_p, plus enumeration of all
//! k-dimensional subspaces of F_p^n through reduced row-echelon patterns.

use num::traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::qpoly::{is_prime, QPoly};

fn ensure_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::ModulusNotPrime(p))
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p
    let mut base = a % p;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Row-major matrix over F_p with all entries reduced mod p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FqMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self> {
        ensure_prime(p)?;
        Ok(FqMatrix { p, rows, cols, data: vec![0; rows * cols] })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Result<Self> {
        ensure_prime(p)?;
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| x % p)).collect();
        Ok(FqMatrix { p, rows: rows.len(), cols: ncols, data })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a * b) % self.p)
            })
            .collect()
    }

    /// Gauss-Jordan in place; returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, pr * self.cols + j);
                }
            }
            let inv = inv_mod(self.get(r, c), p);
            for j in c..self.cols {
                let v = self.get(r, j) * inv % p;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let f = self.get(i, c);
                    for j in c..self.cols {
                        let v = (self.get(i, j) + (p - f) * self.get(r, j)) % p;
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> FqMatrix {
        let mut m = self.clone();
        m.rref_in_place();
        m
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Right kernel {x : Mx = 0} as a canonical subspace.
    pub fn kernel(&self) -> Subspace {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![0u64; self.cols];
            v[f] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                let coeff = m.get(ri, f);
                if coeff != 0 {
                    v[pc] = self.p - coeff;
                }
            }
            basis.push(v);
        }
        if basis.is_empty() {
            return Subspace::zero_unchecked(self.p, self.cols);
        }
        Subspace::from_span(FqMatrix::from_rows(self.p, &basis).expect("prime checked"))
    }

    /// One solution of Mx = rhs, if consistent.
    pub fn solve(&self, rhs: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = FqMatrix::zeros(self.p, self.rows, self.cols + 1).expect("prime checked");
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, rhs[i]);
        }
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(ri, self.cols);
        }
        Some(x)
    }
}

/// Subspace of F_p^n represented by its reduced row-echelon basis with no
/// zero rows; equality of subspaces is structural equality of this form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: FqMatrix,
}

impl Subspace {
    pub fn from_span(m: FqMatrix) -> Subspace {
        let mut r = m.clone();
        let pivots = r.rref_in_place();
        let rank = pivots.len();
        let rows: Vec<Vec<u64>> = (0..rank).map(|i| r.row(i).to_vec()).collect();
        let basis = if rows.is_empty() {
            FqMatrix { p: m.p, rows: 0, cols: m.cols, data: Vec::new() }
        } else {
            FqMatrix::from_rows(m.p, &rows).expect("prime checked")
        };
        Subspace { basis }
    }

    fn zero_unchecked(p: u64, ambient: usize) -> Subspace {
        Subspace { basis: FqMatrix { p, rows: 0, cols: ambient, data: Vec::new() } }
    }

    pub fn zero(p: u64, ambient: usize) -> Result<Subspace> {
        ensure_prime(p)?;
        Ok(Self::zero_unchecked(p, ambient))
    }

    pub fn full(p: u64, ambient: usize) -> Result<Subspace> {
        Ok(Subspace { basis: FqMatrix::identity(p, ambient)? })
    }

    pub fn p(&self) -> u64 {
        self.basis.p
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &FqMatrix {
        &self.basis
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.ambient());
        let p = self.p();
        let mut v: Vec<u64> = v.iter().map(|&x| x % p).collect();
        for i in 0..self.basis.rows {
            let pivot = self.basis.row(i).iter().position(|&x| x != 0).expect("no zero rows");
            let f = v[pivot];
            if f != 0 {
                for j in 0..v.len() {
                    v[j] = (v[j] + (p - f) * self.basis.get(i, j)) % p;
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    /// Matrix C with ker C = this subspace: the rows are a basis of the
    /// functionals vanishing on it. Used to impose membership linearly.
    pub fn annihilator(&self) -> FqMatrix {
        if self.dim() == 0 {
            return FqMatrix::identity(self.p(), self.ambient()).expect("prime checked");
        }
        let k = self.basis.kernel();
        k.basis
    }

    pub fn all_vectors(&self) -> Vec<Vec<u64>> {
        let p = self.p();
        let d = self.dim();
        let total = (p as u128).pow(d as u32) as usize;
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut v = vec![0u64; self.ambient()];
            for r in 0..d {
                let c = (idx as u64) % p;
                idx /= p as usize;
                if c != 0 {
                    for j in 0..v.len() {
                        v[j] = (v[j] + c * self.basis.get(r, j)) % p;
                    }
                }
            }
            out.push(v);
        }
        out
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize, n: usize, k: usize) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            rec(out, cur, c + 1, n, k);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, n, k);
    out
}

/// Every k-dimensional subspace of F_p^n exactly once, via reduced
/// row-echelon patterns: choose pivot columns, then fill the free entries.
/// Guarded by the actual enumeration size.
pub fn enumerate_subspaces(p: u64, n: usize, k: usize) -> Result<Vec<Subspace>> {
    ensure_prime(p)?;
    assert!(k <= n, "subspace dimension exceeds ambient");
    let count = QPoly::gaussian_binomial(n, k).eval_unchecked(p);
    let count = count
        .to_u64()
        .filter(|&c| c <= 100_000_000)
        .ok_or_else(|| Error::InstanceTooLarge(format!("{count} subspaces of dim {k} in F_{p}^{n}")))?;
    let mut out = Vec::with_capacity(count as usize);
    for pivots in combinations(n, k) {
        // free slots: to the right of the row's pivot, skipping later pivots
        let mut free = Vec::new();
        for (i, &c) in pivots.iter().enumerate() {
            for j in (c + 1)..n {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        let total = (p as u128).pow(free.len() as u32);
        let mut counter = vec![0u64; free.len()];
        for step in 0..total {
            let mut m = FqMatrix::zeros(p, k, n)?;
            for (i, &c) in pivots.iter().enumerate() {
                m.set(i, c, 1);
            }
            for (&(i, j), &v) in free.iter().zip(counter.iter()) {
                m.set(i, j, v);
            }
            out.push(Subspace { basis: m });
            if step + 1 < total {
                for slot in counter.iter_mut() {
                    *slot += 1;
                    if *slot < p {
                        break;
                    }
                    *slot = 0;
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}
