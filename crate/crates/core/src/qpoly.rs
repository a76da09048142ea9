//! Integer polynomials in the formal field-cardinality symbol `q`.
//!
//! Edge multiplicities of the operator graphs are polynomials in q, and the
//! identities they satisfy hold coefficientwise, so tests can assert
//! polynomial equality instead of equality at sampled prime powers.

use std::fmt;
use std::ops::{Add, Mul};

use num::bigint::BigInt;
use num::traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Polynomial in q with arbitrary-precision integer coefficients, stored
/// lowest degree first with trailing zeros stripped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPoly {
    coeffs: Vec<BigInt>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![BigInt::from(c)])
    }

    /// The monomial q.
    pub fn q() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Coefficients, lowest degree first, canonical form.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Exact evaluation at a prime power q0 >= 2.
    pub fn eval(&self, q0: u64) -> Result<BigInt> {
        if !is_prime_power(q0) {
            return Err(Error::NotPrimePower(q0));
        }
        Ok(self.eval_unchecked(q0))
    }

    pub(crate) fn eval_unchecked(&self, q0: u64) -> BigInt {
        let q = BigInt::from(q0);
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &q + c;
        }
        acc
    }

    /// Gaussian binomial [n choose r]_q via the q-Pascal recurrence
    /// [n r] = [n-1 r-1] + q^r [n-1 r].
    pub fn gaussian_binomial(n: usize, r: usize) -> QPoly {
        assert!(r <= n, "gaussian binomial needs 0 <= r <= n");
        let mut row: Vec<QPoly> = vec![QPoly::one()];
        for _ in 1..=n {
            let mut next = vec![QPoly::one()];
            for j in 1..row.len() {
                next.push(&row[j - 1] + &row[j].mul_monomial(j as i64));
            }
            next.push(QPoly::one());
            row = next;
        }
        row[r].clone()
    }

    fn mul_monomial(&self, e: i64) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); e as usize];
        coeffs.extend(self.coeffs.iter().cloned());
        QPoly::new(coeffs)
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            out.push(a + b);
        }
        QPoly::new(out)
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }
}

impl fmt::Display for QPoly {
    /// Renders like `q^2+q+1`, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let one = BigInt::one();
        let minus_one = -BigInt::one();
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first && c > &BigInt::zero() {
                write!(f, "+")?;
            }
            let unit_coeff = c == &one || c == &minus_one;
            if c == &minus_one && e > 0 {
                write!(f, "-")?;
            } else if !unit_coeff || e == 0 {
                write!(f, "{c}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{e}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for QPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<i64> = self
            .coeffs
            .iter()
            .map(|c| i64::try_from(c).map_err(|_| serde::ser::Error::custom("coefficient exceeds i64")))
            .collect::<std::result::Result<_, S::Error>>()?;
        coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coeffs = Vec::<i64>::deserialize(deserializer)?;
        Ok(QPoly::from_i64(&coeffs))
    }
}

/// Trial-division primality test; the moduli in scope are tiny.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime-power test by trial factorization up to 10^6. Inputs above 10^12
/// with no small factor are rejected rather than misclassified.
pub fn is_prime_power(q0: u64) -> bool {
    if q0 < 2 {
        return false;
    }
    let mut p = 0u64;
    let mut d = 2u64;
    while d <= 1_000_000 && d.saturating_mul(d) <= q0 {
        if q0 % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        // No factor below the trial bound: q0 is prime iff it is below the
        // bound squared.
        return q0 <= 1_000_000_000_000;
    }
    let mut m = q0;
    while m % p == 0 {
        m /= p;
    }
    m == 1
}
