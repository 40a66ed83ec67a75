//! Orthogonal additivity of the polynomial `P(x) = phi(x, .., x)`.
//!
//! `P` is orthogonally additive iff the symmetric form vanishes on every
//! basis tuple with two distinct entries. The structural test reads that off
//! the coefficients; the behavioral test evaluates `P(x+y) - P(x) - P(y)` on
//! random disjointly supported pairs.

use super::multilinear::MultilinearForm;
use crate::numerics::{Field, Scalar};
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditivityTolerances {
    /// Off-diagonal coefficients may reach this fraction of the largest one.
    pub structural: f64,
    /// Allowed `|P(x+y) - P(x) - P(y)| / (|P(x)| + |P(y)| + 1)`.
    pub behavioral: f64,
}

impl Default for AdditivityTolerances {
    fn default() -> Self {
        Self {
            structural: 1e-12,
            behavioral: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    pub structural: bool,
    pub behavioral: bool,
    /// Largest off-diagonal coefficient of the symmetrized form, if any is nonzero.
    pub worst_index: Option<Vec<usize>>,
    /// That coefficient's modulus relative to the largest coefficient.
    pub worst_ratio: f64,
    /// Largest normalized defect seen on the sampled pairs.
    pub worst_defect: f64,
    pub samples: usize,
}

impl AdditivityReport {
    pub fn is_additive(&self) -> bool {
        self.structural && self.behavioral
    }

    pub fn checks_agree(&self) -> bool {
        self.structural == self.behavioral
    }
}

/// `|P(x+y) - P(x) - P(y)| / (|P(x)| + |P(y)| + 1)` for `P = phi(x, .., x)`.
pub fn additivity_defect(form: &MultilinearForm, x: &[Scalar], y: &[Scalar]) -> f64 {
    let sum: Vec<Scalar> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let px = form
        .evaluate_diagonal(x)
        .expect("dimension checked by caller");
    let py = form
        .evaluate_diagonal(y)
        .expect("dimension checked by caller");
    let pxy = form
        .evaluate_diagonal(&sum)
        .expect("dimension checked by caller");
    (pxy - px - py).norm() / (px.norm() + py.norm() + 1.0)
}

/// Runs both checks. Forms not flagged symmetric are symmetrized first.
pub fn is_orthogonally_additive(
    form: &MultilinearForm,
    tol: AdditivityTolerances,
    samples: usize,
    seed: u64,
) -> AdditivityReport {
    let sym;
    let form = if form.is_symmetric() {
        form
    } else {
        sym = form.symmetrize();
        &sym
    };

    let largest = form.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut worst_index = None;
    let mut worst = 0.0;
    for idx in form.indices() {
        if idx.iter().all(|&i| i == idx[0]) {
            continue;
        }
        let m = form.entry(&idx).norm();
        if m > worst {
            worst = m;
            worst_index = Some(idx);
        }
    }
    let worst_ratio = if largest == 0.0 { 0.0 } else { worst / largest };

    let mut rng = sampling::stream_rng(seed, 0);
    let mut worst_defect = 0.0_f64;
    for _ in 0..samples {
        let (x, y) = sampling::disjoint_pair(&mut rng, form.dim(), Field::Complex);
        worst_defect = worst_defect.max(additivity_defect(form, &x, &y));
    }

    AdditivityReport {
        structural: worst_ratio <= tol.structural,
        behavioral: worst_defect <= tol.behavioral,
        worst_index,
        worst_ratio,
        worst_defect,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{real, LpParams};
    use crate::oapoly::multilinear::extend_diagonal_functional;

    fn lp() -> LpParams {
        LpParams::new(3.0, 2).unwrap()
    }

    #[test]
    fn diagonal_form_is_additive() {
        let f = extend_diagonal_functional(&[real(1.0), real(1.0)], lp()).unwrap();
        let r = is_orthogonally_additive(&f, AdditivityTolerances::default(), 64, 1);
        assert!(r.is_additive());
        assert!(r.checks_agree());
        assert_eq!(r.worst_index, None);
    }

    #[test]
    fn cross_term_is_caught_by_both_checks() {
        let mut f = MultilinearForm::zeros(2, lp()).unwrap();
        f.set_entry(&[0, 1], real(1.0));
        f.set_entry(&[1, 0], real(1.0));
        let r = is_orthogonally_additive(&f, AdditivityTolerances::default(), 64, 1);
        assert!(!r.structural);
        assert!(!r.behavioral);
        assert_eq!(r.worst_index, Some(vec![0, 1]));
        // P(e1 + e2) = 2 while P(e1) + P(e2) = 0
        let e1 = [real(1.0), real(0.0)];
        let e2 = [real(0.0), real(1.0)];
        assert_eq!(additivity_defect(&f, &e1, &e2), 2.0);
    }

    #[test]
    fn unsymmetric_input_is_symmetrized() {
        let mut f = MultilinearForm::zeros(2, lp()).unwrap();
        f.set_entry(&[0, 1], real(1.0));
        f.set_entry(&[1, 0], real(-1.0));
        // antisymmetric part does not affect P
        let r = is_orthogonally_additive(&f, AdditivityTolerances::default(), 64, 1);
        assert!(r.is_additive());
    }
}
