//! Exact arithmetic with k-th roots of unity.
//!
//! [`CycloScalar`] is a single power of `omega = e^{2 pi i / k}` (or zero).
//! [`CycloSum`] is an element of `Z[omega]`, kept reduced modulo the k-th
//! cyclotomic polynomial so equality is decided on integer coefficients.

use std::fmt;
use std::ops::{Add, Mul};

use crate::numerics::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    k: u32,
    exponent: u32,
    zero: bool,
}

impl CycloScalar {
    /// `omega^exponent`, exponent taken mod `k`.
    pub fn root(k: u32, exponent: u64) -> Self {
        assert!(k >= 1, "root order must be positive");
        Self {
            k,
            exponent: (exponent % u64::from(k)) as u32,
            zero: false,
        }
    }

    pub fn one(k: u32) -> Self {
        Self::root(k, 0)
    }

    pub fn zero(k: u32) -> Self {
        assert!(k >= 1, "root order must be positive");
        Self {
            k,
            exponent: 0,
            zero: true,
        }
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    /// `None` for the zero element.
    pub fn exponent(&self) -> Option<u32> {
        (!self.zero).then_some(self.exponent)
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// 0 or 1.
    pub fn modulus(&self) -> u32 {
        u32::from(!self.zero)
    }

    pub fn pow(self, e: u64) -> Self {
        if self.zero {
            return if e == 0 { Self::one(self.k) } else { self };
        }
        let k = u64::from(self.k);
        Self::root(self.k, (u64::from(self.exponent) * (e % k)) % k)
    }

    pub fn to_complex(&self) -> Scalar {
        if self.zero {
            return Scalar::new(0.0, 0.0);
        }
        // quarter turns are exact
        if (4 * self.exponent).is_multiple_of(self.k) {
            return match 4 * self.exponent / self.k {
                0 => Scalar::new(1.0, 0.0),
                1 => Scalar::new(0.0, 1.0),
                2 => Scalar::new(-1.0, 0.0),
                _ => Scalar::new(0.0, -1.0),
            };
        }
        let angle = std::f64::consts::TAU * f64::from(self.exponent) / f64::from(self.k);
        Scalar::from_polar(1.0, angle)
    }
}

impl Mul for CycloScalar {
    type Output = CycloScalar;

    fn mul(self, rhs: CycloScalar) -> CycloScalar {
        assert_eq!(self.k, rhs.k, "roots of unity of different orders");
        if self.zero || rhs.zero {
            return Self::zero(self.k);
        }
        Self::root(self.k, u64::from(self.exponent) + u64::from(rhs.exponent))
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent() {
            None => write!(f, "0"),
            Some(0) => write!(f, "1"),
            Some(e) => write!(f, "w{}^{}", self.k, e),
        }
    }
}

/// Integer coefficients of the k-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(k: u32) -> Vec<i64> {
    assert!(k >= 1);
    // x^k - 1 divided by every Phi_d with d a proper divisor of k.
    let mut poly = vec![0_i64; k as usize + 1];
    poly[0] = -1;
    poly[k as usize] = 1;
    for d in (1..k).filter(|&d| k.is_multiple_of(d)) {
        let (q, r) = divide_monic(&poly, &cyclotomic_polynomial(d));
        debug_assert!(r.iter().all(|&c| c == 0));
        poly = q;
    }
    poly
}

fn divide_monic(num: &[i64], den: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1);
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return (vec![0], rem);
    }
    let mut quot = vec![0_i64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dd] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i - dd + j] -= c * dc;
        }
    }
    rem.truncate(dd);
    (quot, rem)
}

/// Element of `Z[omega_k]` in the power basis `1, omega, .., omega^{phi(k)-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycloSum {
    k: u32,
    coeffs: Vec<i64>,
}

impl CycloSum {
    pub fn zero(k: u32) -> Self {
        let deg = cyclotomic_polynomial(k).len() - 1;
        Self {
            k,
            coeffs: vec![0; deg],
        }
    }

    /// `sum_e counts[e] * omega^e` for `e` in `0..k`.
    pub fn from_counts(k: u32, counts: &[i64]) -> Self {
        assert_eq!(counts.len(), k as usize, "one count per exponent");
        let (_, rem) = divide_monic(counts, &cyclotomic_polynomial(k));
        let mut coeffs = rem;
        let deg = cyclotomic_polynomial(k).len() - 1;
        coeffs.resize(deg, 0);
        Self { k, coeffs }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The value as an integer when it lies in `Z`.
    pub fn as_integer(&self) -> Option<i64> {
        match self.coeffs.split_first() {
            None => Some(0),
            Some((&c0, rest)) => rest.iter().all(|&c| c == 0).then_some(c0),
        }
    }

    pub fn to_complex(&self) -> Scalar {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(e, &c)| CycloScalar::root(self.k, e as u64).to_complex() * c as f64)
            .sum()
    }
}

impl Add for &CycloSum {
    type Output = CycloSum;

    fn add(self, rhs: &CycloSum) -> CycloSum {
        assert_eq!(self.k, rhs.k);
        CycloSum {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// `sum / denominator` with `sum` in `Z[omega]`: the value of a finite
/// average of roots of unity, held exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactAverage {
    pub sum: CycloSum,
    pub denominator: u64,
}

impl ExactAverage {
    /// Reduced `(numerator, denominator)` when the value is rational.
    pub fn as_rational(&self) -> Option<(i64, u64)> {
        let num = self.sum.as_integer()?;
        let g = gcd(num.unsigned_abs(), self.denominator).max(1);
        Some((num / g as i64, self.denominator / g))
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self.as_rational()? {
            (n, 1) => Some(n),
            _ => None,
        }
    }

    pub fn to_complex(&self) -> Scalar {
        self.sum.to_complex() / self.denominator as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
