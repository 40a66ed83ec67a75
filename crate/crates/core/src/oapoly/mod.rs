//! Orthogonally additive k-homogeneous polynomials on l_p^n.
//!
//! Such a polynomial is determined by its diagonal sequence:
//! `P(x) = sum_n c_n x_n^k` with `c_n = P(e_n)`. Its sup norm over the unit
//! ball is `||c||_{p/(p-k)}` when `k < p` and `max |c_n|` when `p <= k`.

mod additivity;
mod multilinear;
mod optimize;

pub use additivity::{
    additivity_defect, is_orthogonally_additive, AdditivityReport, AdditivityTolerances,
};
pub use multilinear::{
    diagonal_of_multilinear, extend_diagonal_functional, polarize, HomogeneousPolynomial,
    MultilinearForm, FORM_BUDGET, MAX_POLARIZATION_DEGREE,
};
pub use optimize::{
    holder_dual, maximize_diagonal_polynomial, multilinear_norm_ascent, multilinear_norm_grid,
};

use crate::error::{Error, Result};
use crate::numerics::{ensure_finite, lq_norm, phase, phase_root, Field, LpParams, Regime, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct OrthAddPolynomial {
    coeffs: Vec<Scalar>,
    params: LpParams,
}

/// A unit vector together with `|P|` there.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<Scalar>,
    pub value: f64,
}

impl OrthAddPolynomial {
    pub fn new(coeffs: Vec<Scalar>, params: LpParams) -> Result<Self> {
        ensure_finite(&coeffs)?;
        Ok(Self { coeffs, params })
    }

    pub fn from_real(coeffs: &[f64], params: LpParams) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&x| Scalar::new(x, 0.0)).collect(),
            params,
        )
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn params(&self) -> LpParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scaled(&self, lambda: Scalar) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * lambda).collect(),
            params: self.params,
        }
    }

    /// `sum_n c_n x_n^k`.
    pub fn evaluate(&self, x: &[Scalar]) -> Result<Scalar> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        ensure_finite(x)?;
        let k = self.params.k();
        Ok(self
            .coeffs
            .iter()
            .zip(x)
            .map(|(&c, &xi)| c * xi.powu(k))
            .sum())
    }

    pub fn norm_closed_form(&self) -> f64 {
        lq_norm(&self.coeffs, self.params.dual_exponent()).expect("finite coefficients")
    }

    /// A unit vector where `|P|` equals the norm.
    ///
    /// Above the degree: `|x_i| ∝ |c_i|^{1/(p-k)}` normalized in l_p, with the
    /// phase of `x_i` chosen so that `c_i x_i^k >= 0`. At or below it: the
    /// basis vector of the largest `|c_n|` (lowest index on ties).
    pub fn norm_witness(&self) -> Result<Witness> {
        let largest = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if largest == 0.0 {
            return Err(Error::ZeroPolynomial);
        }
        let n = self.dim();
        let point = match self.params.regime() {
            Regime::HighExponent => {
                let p = self.params.p();
                let k = self.params.k();
                let spread = 1.0 / (p - f64::from(k));
                let raw: Vec<f64> = self
                    .coeffs
                    .iter()
                    .map(|c| (c.norm() / largest).powf(spread))
                    .collect();
                let mags: Vec<Scalar> = raw.iter().map(|&m| Scalar::new(m, 0.0)).collect();
                let norm = lq_norm(&mags, p).expect("finite");
                self.coeffs
                    .iter()
                    .zip(&raw)
                    .map(|(&c, &m)| {
                        let turn = phase_root(phase(c).conj(), k).expect("unit scalar");
                        turn * (m / norm)
                    })
                    .collect()
            }
            Regime::LowExponent => {
                let best = self
                    .coeffs
                    .iter()
                    .position(|c| c.norm() == largest)
                    .expect("largest is attained");
                let mut e = vec![Scalar::new(0.0, 0.0); n];
                e[best] = Scalar::new(1.0, 0.0);
                e
            }
        };
        let value = self.evaluate(&point)?.norm();
        Ok(Witness { point, value })
    }

    /// Lower bound for the norm from numerical maximization over complex
    /// l_p unit vectors; deterministic in `seed`.
    pub fn norm_numeric(&self, restarts: usize, iters: usize, seed: u64) -> f64 {
        self.norm_numeric_in(Field::Complex, restarts, iters, seed)
    }

    /// As [`Self::norm_numeric`], restricted to vectors of `field`. Over the
    /// reals only real parts of the coefficients are used.
    pub fn norm_numeric_in(&self, field: Field, restarts: usize, iters: usize, seed: u64) -> f64 {
        maximize_diagonal_polynomial(
            &self.coeffs,
            self.params.k(),
            self.params.p(),
            field,
            restarts,
            iters,
            seed,
        )
    }

    /// `sum_n c_n x^{k e_n}` as a general homogeneous polynomial.
    pub fn to_homogeneous(&self) -> HomogeneousPolynomial {
        HomogeneousPolynomial::diagonal(&self.coeffs, self.params.k())
    }

    /// The associated symmetric k-linear form: diagonal, entries `c_n`.
    pub fn to_multilinear(&self) -> Result<MultilinearForm> {
        extend_diagonal_functional(&self.coeffs, self.params)
    }
}
