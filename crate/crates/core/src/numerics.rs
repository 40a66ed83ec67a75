//! Scalar and norm primitives shared by the rest of the crate.
//!
//! Scalars are complex throughout. Real data is represented with a zero
//! imaginary part; averaging with k-th roots of unity for `k >= 3` needs the
//! complex plane anyway.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Scalar = Complex64;

/// Shorthand for a real scalar.
pub fn real(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

pub fn is_finite(a: Scalar) -> bool {
    a.re.is_finite() && a.im.is_finite()
}

pub fn ensure_finite(v: &[Scalar]) -> Result<()> {
    if v.iter().all(|&a| is_finite(a)) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Scalar field an optimizer or sampler works over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Field {
    Real,
    #[default]
    Complex,
}

/// Which side of `p = k` a parameter pair sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `1 <= p <= k`: diagonals carry the l_1 norm, polynomials the l_inf norm.
    LowExponent,
    /// `k < p < inf`: diagonals carry l_{p/k}, polynomials l_{p/(p-k)}.
    HighExponent,
}

/// Space exponent `p` of l_p together with the polynomial degree `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpParams {
    p: f64,
    k: u32,
}

impl LpParams {
    /// Requires `1 <= p < inf` and `k >= 1`. Modules built on the Rademacher
    /// system tighten this to `k >= 2` on their own.
    pub fn new(p: f64, k: u32) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidParams(format!(
                "space exponent must satisfy 1 <= p < inf, got {p}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParams("degree k must be at least 1".into()));
        }
        Ok(Self { p, k })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn regime(&self) -> Regime {
        if f64::from(self.k) < self.p {
            Regime::HighExponent
        } else {
            Regime::LowExponent
        }
    }

    /// Exponent of the sequence space the tensor diagonal is isometric to:
    /// `p/k` above the degree, 1 otherwise.
    pub fn diagonal_exponent(&self) -> f64 {
        match self.regime() {
            Regime::HighExponent => self.p / f64::from(self.k),
            Regime::LowExponent => 1.0,
        }
    }

    /// Exponent of the dual sequence space, see [`conjugate_exponent`].
    pub fn dual_exponent(&self) -> f64 {
        conjugate_exponent(self.p, self.k)
    }
}

/// `p/(p-k)` when `k < p`, infinity when `p <= k`.
pub fn conjugate_exponent(p: f64, k: u32) -> f64 {
    let k = f64::from(k);
    if k < p {
        p / (p - k)
    } else {
        f64::INFINITY
    }
}

/// Hölder conjugate `q' = q/(q-1)`, with `1 <-> inf`.
pub fn holder_conjugate(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

fn check_exponent(q: f64) -> Result<()> {
    if q.is_nan() || q < 1.0 {
        Err(Error::InvalidExponent(q))
    } else {
        Ok(())
    }
}

/// l_q norm of a sequence of nonnegative magnitudes.
///
/// Sums are rescaled by the largest entry so that large exponents do not
/// overflow; `q = 1` is a plain sum and `q = inf` the maximum.
pub fn lq_norm_abs(mags: &[f64], q: f64) -> Result<f64> {
    check_exponent(q)?;
    if mags.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonFinite);
    }
    let max = mags.iter().fold(0.0_f64, |acc, &m| acc.max(m.abs()));
    if q.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    if q == 1.0 {
        return Ok(mags.iter().map(|m| m.abs()).sum());
    }
    let s: f64 = mags.iter().map(|m| (m.abs() / max).powf(q)).sum();
    Ok(max * s.powf(1.0 / q))
}

/// l_q norm of a scalar sequence; 0 for the empty sequence.
pub fn lq_norm(v: &[Scalar], q: f64) -> Result<f64> {
    ensure_finite(v)?;
    let mags: Vec<f64> = v.iter().map(|a| a.norm()).collect();
    lq_norm_abs(&mags, q)
}

/// `a/|a|`, or 1 at the origin.
pub fn phase(a: Scalar) -> Scalar {
    let r = a.norm();
    if r == 0.0 {
        Scalar::new(1.0, 0.0)
    } else {
        a / r
    }
}

/// Principal k-th root of the phase of `a`: `s^k = a/|a|`, `|s| = 1`.
///
/// The branch cut follows `arg` on `(-pi, pi]`; a negative zero imaginary
/// part is read as `+0` so `-1` maps to `e^{i pi/k}`. Returns 1 at the origin.
pub fn phase_root(a: Scalar, k: u32) -> Result<Scalar> {
    if k == 0 {
        return Err(Error::InvalidParams("root order must be at least 1".into()));
    }
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    if a.norm() == 0.0 {
        return Ok(Scalar::new(1.0, 0.0));
    }
    let im = if a.im == 0.0 { 0.0 } else { a.im };
    let arg = im.atan2(a.re);
    Ok(Scalar::from_polar(1.0, arg / f64::from(k)))
}

/// Relative deviation `|a - b| / max(|a|, |b|)`, 0 when both vanish.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
