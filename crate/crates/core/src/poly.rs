//! Integer polynomials, cyclotomic polynomials and the exponent matrices that
//! define the fill-out Laurent maps.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numtheory::{divisors, euler_totient};
use crate::{Error, Result};

/// Dense polynomial over the integers, constant term first.
///
/// Always normalized: no trailing zero coefficients, so the zero polynomial has
/// an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `t^d - 1`.
    pub fn x_pow_minus_one(d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[0] = -BigInt::one();
        coeffs[d] += BigInt::one();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = core::mem::take(&mut rem[i + dd]);
            if q.is_zero() {
                continue;
            }
            for (j, c) in divisor.coeffs[..dd].iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Evaluates at a complex point (coefficients rounded to `f64`).
    pub fn eval_complex(&self, z: num_complex::Complex64) -> num_complex::Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| {
                acc * z + c.to_f64().unwrap_or(f64::NAN)
            })
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let unit = mag.is_one();
            match deg {
                0 => write!(f, "{mag}")?,
                1 if unit => f.write_str("t")?,
                1 => write!(f, "{mag}t")?,
                _ if unit => write!(f, "t^{deg}")?,
                _ => write!(f, "{mag}t^{deg}")?,
            }
        }
        Ok(())
    }
}

/// Memo table for cyclotomic polynomials.
///
/// Owned by the caller; share it behind a lock if several threads need one.
#[derive(Debug, Default, Clone)]
pub struct CyclotomicTable {
    memo: BTreeMap<u64, IntPolynomial>,
}

impl CyclotomicTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `Phi_d = (t^d - 1) / prod_{e | d, e < d} Phi_e`, each division exact.
    pub fn get(&mut self, d: u64) -> &IntPolynomial {
        assert!(d >= 1, "cyclotomic index must be positive");
        if !self.memo.contains_key(&d) {
            let mut acc = IntPolynomial::x_pow_minus_one(d as usize);
            for e in divisors(d) {
                if e == d {
                    break;
                }
                let phi_e = self.get(e).clone();
                let (q, r) = acc.div_rem_monic(&phi_e);
                assert!(r.is_zero(), "Phi_{e} does not divide t^{d} - 1 exactly");
                acc = q;
            }
            self.memo.insert(d, acc);
        }
        &self.memo[&d]
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }
}

/// The `d`th cyclotomic polynomial, computed with a fresh memo table.
pub fn cyclotomic(d: u64) -> Result<IntPolynomial> {
    if d == 0 {
        return Err(Error::NotPositive { what: "d" });
    }
    Ok(CyclotomicTable::new().get(d).clone())
}

/// Coefficients `b[k][j]` of `t^k mod Phi_d(t)` for `0 <= k < d`, `0 <= j < phi(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMatrix {
    d: u64,
    phi_d: usize,
    rows: Vec<Vec<i64>>,
}

impl ExponentMatrix {
    pub fn d(&self) -> u64 {
        self.d
    }

    /// Column count, `phi(d)`.
    pub fn phi_d(&self) -> usize {
        self.phi_d
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &[i64] {
        &self.rows[k]
    }
}

pub fn exponent_matrix(d: u64) -> Result<ExponentMatrix> {
    exponent_matrix_with(&mut CyclotomicTable::new(), d)
}

/// As [`exponent_matrix`], reusing a caller-owned cyclotomic memo.
pub fn exponent_matrix_with(table: &mut CyclotomicTable, d: u64) -> Result<ExponentMatrix> {
    if d == 0 {
        return Err(Error::NotPositive { what: "d" });
    }
    let phi = table.get(d).clone();
    let width = phi.degree().expect("cyclotomic polynomials are nonzero");
    debug_assert_eq!(width as u64, euler_totient(d));

    let to_row = |v: &[BigInt]| -> Result<Vec<i64>> {
        v.iter()
            .map(|c| c.to_i64().ok_or(Error::Overflow { d }))
            .collect()
    };

    let mut current = vec![BigInt::zero(); width];
    current[0] = BigInt::one();
    let mut rows = Vec::with_capacity(d as usize);
    rows.push(to_row(&current)?);
    for _ in 1..d {
        // multiply by t, then replace t^width by -(Phi_d - t^width)
        let top = current.pop().expect("width >= 1");
        current.insert(0, BigInt::zero());
        if !top.is_zero() {
            for (c, p) in current.iter_mut().zip(phi.coeffs()) {
                *c -= &top * p;
            }
        }
        rows.push(to_row(&current)?);
    }
    Ok(ExponentMatrix {
        d,
        phi_d: width,
        rows,
    })
}
