//! Diagonal tensors `u = sum_i a_i e_i (x) ... (x) e_i` in the k-fold
//! symmetric projective tensor product of l_p.
//!
//! The projective norm of such a tensor has a closed form: `||a||_{p/k}`
//! when `k < p` and `||a||_1` when `p <= k`. This module computes it and
//! brackets it from both sides:
//!
//! * above, by the cost `sum_j w_j prod_s ||v_{j,s}||_p` of an explicit
//!   representation `u = sum_j w_j v_{j,1} (x) ... (x) v_{j,k}`. The
//!   Rademacher average supplies one; the basis expansion another.
//! * below, by `|<u, B>| / ||B||` for the diagonal k-linear form
//!   `B(x_1..x_k) = sum_i b_i x_{1,i} ... x_{k,i}`, whose norm is bounded by
//!   the generalized Hölder inequality.

use crate::error::{Error, Result};
use crate::numerics::{ensure_finite, lq_norm, phase, phase_root, LpParams, Regime, Scalar};
use crate::rademacher::{piece_count, GeneralizedRademacher};

/// Largest dense expansion (number of coefficients `n^k`) we build.
pub const DENSE_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalTensor {
    coeffs: Vec<Scalar>,
    params: LpParams,
}

/// `weight * v_1 (x) ... (x) v_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneTerm {
    pub weight: f64,
    pub slots: Vec<Vec<Scalar>>,
}

/// How coefficient phases are distributed over the slots of each averaged term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Decomposition {
    /// Every slot carries `phase_root(a_i, k) |a_i|^{1/k}`; all slots of a
    /// term are equal, so each term is a symmetric tensor.
    #[default]
    Symmetric,
    /// Slot 1 carries `phase(a_i) |a_i|^{1/k}`, the other slots `|a_i|^{1/k}`.
    SlotOneSign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualDiagonalForm {
    b: Vec<Scalar>,
    params: LpParams,
}

fn check_degree(params: &LpParams) -> Result<()> {
    if params.k() < 2 {
        return Err(Error::InvalidParams(format!(
            "tensor diagonals need k >= 2, got {}",
            params.k()
        )));
    }
    Ok(())
}

impl DiagonalTensor {
    pub fn new(coeffs: Vec<Scalar>, params: LpParams) -> Result<Self> {
        check_degree(&params)?;
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
            coeffs: self.coeffs.iter().map(|&a| a * lambda).collect(),
            params: self.params,
        }
    }

    /// Visits the `k^n` terms of the Rademacher average in piece order.
    ///
    /// Coordinate `i` is paired with `r_{i+1}`, so on piece `m` of depth `n`
    /// it picks up `omega^{d}` with `d` the `(i+1)`-th base-k digit of `m`.
    pub fn for_each_averaging_term<F>(&self, kind: Decomposition, mut visit: F) -> Result<()>
    where
        F: FnMut(&RankOneTerm),
    {
        let k = self.params.k();
        let n = self.dim();
        let pieces = piece_count(k, n as u32)?;
        let inv_k = 1.0 / f64::from(k);
        let mags: Vec<f64> = self.coeffs.iter().map(|a| a.norm().powf(inv_k)).collect();
        let lead: Vec<Scalar> = match kind {
            Decomposition::Symmetric => self
                .coeffs
                .iter()
                .zip(&mags)
                .map(|(&a, &m)| phase_root(a, k).map(|s| s * m))
                .collect::<Result<_>>()?,
            Decomposition::SlotOneSign => self
                .coeffs
                .iter()
                .zip(&mags)
                .map(|(&a, &m)| phase(a) * m)
                .collect(),
        };
        let rest: Vec<Scalar> = match kind {
            Decomposition::Symmetric => lead.clone(),
            Decomposition::SlotOneSign => mags.iter().map(|&m| Scalar::new(m, 0.0)).collect(),
        };
        let funcs: Vec<GeneralizedRademacher> = (1..=n as u32)
            .map(|level| GeneralizedRademacher::new(k, level))
            .collect::<Result<_>>()?;
        let mut term = RankOneTerm {
            weight: 1.0 / pieces as f64,
            slots: vec![vec![Scalar::new(0.0, 0.0); n]; k as usize],
        };
        for m in 0..pieces {
            for (i, r) in funcs.iter().enumerate() {
                let w = r.value_on_piece(m, n as u32).to_complex();
                term.slots[0][i] = w * lead[i];
                let tail = w * rest[i];
                for slot in term.slots.iter_mut().skip(1) {
                    slot[i] = tail;
                }
            }
            visit(&term);
        }
        Ok(())
    }

    /// The finite Rademacher average representing `u`, one term per piece.
    pub fn averaging_decomposition(&self, kind: Decomposition) -> Result<Vec<RankOneTerm>> {
        let mut terms = Vec::new();
        self.for_each_averaging_term(kind, |t| terms.push(t.clone()))?;
        Ok(terms)
    }

    /// `u = sum_i |a_i| (phase(a_i) e_i) (x) e_i (x) ... (x) e_i`.
    pub fn basis_decomposition(&self) -> Vec<RankOneTerm> {
        let n = self.dim();
        let k = self.params.k() as usize;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(i, &a)| {
                let mut unit = vec![Scalar::new(0.0, 0.0); n];
                unit[i] = Scalar::new(1.0, 0.0);
                let mut slots = vec![unit; k];
                slots[0][i] = phase(a);
                RankOneTerm {
                    weight: a.norm(),
                    slots,
                }
            })
            .collect()
    }

    /// `||a||_{p/k}` above the degree, `||a||_1` otherwise.
    pub fn pi_norm_closed_form(&self) -> f64 {
        lq_norm(&self.coeffs, self.params.diagonal_exponent())
            .expect("coefficients are finite and the exponent is >= 1")
    }

    /// Cheapest of the explicit representations we know, measured in l_p.
    ///
    /// Above the degree the Rademacher average is required (and must fit the
    /// piece budget). At or below it the basis expansion is always available
    /// and the average only competes when it fits the budget.
    pub fn pi_upper_bound(&self) -> Result<f64> {
        let p = self.params.p();
        let basis = representation_cost(&self.basis_decomposition(), p);
        let mut averaged = CompensatedSum::default();
        let streamed = self.for_each_averaging_term(Decomposition::Symmetric, |t| {
            averaged.add(term_cost(t, p));
        });
        match (self.params.regime(), streamed) {
            (_, Ok(())) => Ok(averaged.value().min(basis)),
            (Regime::LowExponent, Err(Error::BudgetExceeded { .. })) => Ok(basis),
            (_, Err(e)) => Err(e),
        }
    }

    /// The norming form: `b_i = conj(phase(a_i)) |a_i|^{p/k - 1}` above the
    /// degree, `b_i = conj(phase(a_i))` otherwise, and `b_i = 0` where `a_i = 0`.
    pub fn build_dual_form(&self) -> DualDiagonalForm {
        let p = self.params.p();
        let k = f64::from(self.params.k());
        let b = self
            .coeffs
            .iter()
            .map(|&a| {
                let r = a.norm();
                if r == 0.0 {
                    return Scalar::new(0.0, 0.0);
                }
                let ph = phase(a).conj();
                match self.params.regime() {
                    Regime::HighExponent => ph * r.powf(p / k - 1.0),
                    Regime::LowExponent => ph,
                }
            })
            .collect();
        DualDiagonalForm {
            b,
            params: self.params,
        }
    }

    /// `<u, B> = sum_i a_i b_i`.
    pub fn pair(&self, form: &DualDiagonalForm) -> Result<Scalar> {
        if form.b.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: form.b.len(),
            });
        }
        Ok(self.coeffs.iter().zip(&form.b).map(|(a, b)| a * b).sum())
    }

    /// `|<u, B>| / ||B||_bound` for the norming form `B`.
    pub fn pi_lower_bound(&self) -> f64 {
        let form = self.build_dual_form();
        let bound = form.holder_bound();
        if bound == 0.0 {
            return 0.0;
        }
        let pairing = self
            .pair(&form)
            .expect("form built from u has matching dimension");
        pairing.norm() / bound
    }
}

impl DualDiagonalForm {
    pub fn new(b: Vec<Scalar>, params: LpParams) -> Result<Self> {
        check_degree(&params)?;
        ensure_finite(&b)?;
        Ok(Self { b, params })
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.b
    }

    pub fn params(&self) -> LpParams {
        self.params
    }

    /// `B(x_1, .., x_k) = sum_i b_i x_{1,i} ... x_{k,i}`.
    pub fn evaluate(&self, args: &[&[Scalar]]) -> Result<Scalar> {
        let k = self.params.k() as usize;
        if args.len() != k {
            return Err(Error::Arity {
                expected: k,
                got: args.len(),
            });
        }
        for x in args {
            if x.len() != self.b.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.b.len(),
                    got: x.len(),
                });
            }
        }
        Ok(self
            .b
            .iter()
            .enumerate()
            .map(|(i, &b)| args.iter().fold(b, |acc, x| acc * x[i]))
            .sum())
    }

    /// `||b||_{p/(p-k)}` (`||b||_inf` when `p <= k`), an upper bound for
    /// `sup |B|` over products of l_p unit balls.
    pub fn holder_bound(&self) -> f64 {
        lq_norm(&self.b, self.params.dual_exponent()).expect("finite coefficients")
    }
}

fn term_cost(term: &RankOneTerm, p: f64) -> f64 {
    term.slots.iter().fold(term.weight, |acc, v| {
        acc * lq_norm(v, p).expect("finite slot entries")
    })
}

/// `sum_j w_j prod_s ||v_{j,s}||_p`, an upper bound for the projective norm
/// of the represented tensor.
pub fn representation_cost(terms: &[RankOneTerm], p: f64) -> f64 {
    let mut sum = CompensatedSum::default();
    for t in terms {
        sum.add(term_cost(t, p));
    }
    sum.value()
}

/// Neumaier summation. The averaging has `k^n` nearly equal terms, and a
/// plain running sum drifts by ~`k^n` ulps.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Row-major coefficients of `sum_j w_j v_{j,1} (x) ... (x) v_{j,k}` in the
/// basis `e_{i_1} (x) ... (x) e_{i_k}`.
pub fn dense_expansion(terms: &[RankOneTerm], n: usize, k: u32) -> Result<Vec<Scalar>> {
    let requested = (n as u128).checked_pow(k).unwrap_or(u128::MAX);
    if requested > u128::from(DENSE_BUDGET) {
        return Err(Error::BudgetExceeded {
            requested,
            limit: u128::from(DENSE_BUDGET),
        });
    }
    let mut out = vec![Scalar::new(0.0, 0.0); requested as usize];
    let mut acc = Vec::with_capacity(out.len());
    let mut next = Vec::with_capacity(out.len());
    for term in terms {
        if term.slots.len() != k as usize {
            return Err(Error::Arity {
                expected: k as usize,
                got: term.slots.len(),
            });
        }
        acc.clear();
        acc.push(Scalar::new(term.weight, 0.0));
        for slot in &term.slots {
            if slot.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: slot.len(),
                });
            }
            next.clear();
            next.extend(acc.iter().flat_map(|&c| slot.iter().map(move |&v| c * v)));
            std::mem::swap(&mut acc, &mut next);
        }
        for (o, v) in out.iter_mut().zip(&acc) {
            *o += v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real;

    fn params(p: f64, k: u32) -> LpParams {
        LpParams::new(p, k).unwrap()
    }

    fn diag(a: &[f64], p: f64, k: u32) -> DiagonalTensor {
        DiagonalTensor::from_real(a, params(p, k)).unwrap()
    }

    /// Dense coefficients of the diagonal tensor itself.
    fn dense_diagonal(a: &[Scalar], k: u32) -> Vec<Scalar> {
        let n = a.len();
        let mut out = vec![real(0.0); n.pow(k)];
        let stride: usize = (0..k).map(|j| n.pow(j)).sum();
        for (i, &ai) in a.iter().enumerate() {
            out[i * stride] = ai;
        }
        out
    }

    #[test]
    fn single_coefficient_average() {
        let u = diag(&[1.0], 3.0, 2);
        let terms = u.averaging_decomposition(Decomposition::Symmetric).unwrap();
        assert_eq!(terms.len(), 2);
        for t in &terms {
            assert_eq!(t.weight, 0.5);
            assert!((t.slots[0][0].norm() - 1.0).abs() < 1e-15);
            assert_eq!(t.slots[0], t.slots[1]);
        }
        assert_eq!(terms[0].slots[0][0], real(1.0));
        assert!((terms[1].slots[0][0] - real(-1.0)).norm() < 1e-15);
        let dense = dense_expansion(&terms, 1, 2).unwrap();
        assert!((dense[0] - real(1.0)).norm() < 1e-15);
    }

    #[test]
    fn two_coefficient_cancellation() {
        let u = diag(&[1.0, 1.0], 4.0, 2);
        let terms = u.averaging_decomposition(Decomposition::Symmetric).unwrap();
        assert_eq!(terms.len(), 4);
        assert!(terms.iter().all(|t| t.weight == 0.25));
        let dense = dense_expansion(&terms, 2, 2).unwrap();
        // k = 2 uses only +-1, so the cancellation is exact
        assert_eq!(dense, vec![real(1.0), real(0.0), real(0.0), real(1.0)]);
    }

    #[test]
    fn cubic_signed_reconstruction() {
        let u = diag(&[1.0, -1.0], 4.0, 3);
        for kind in [Decomposition::Symmetric, Decomposition::SlotOneSign] {
            let terms = u.averaging_decomposition(kind).unwrap();
            assert_eq!(terms.len(), 9);
            let dense = dense_expansion(&terms, 2, 3).unwrap();
            let want = dense_diagonal(u.coeffs(), 3);
            for (g, w) in dense.iter().zip(&want) {
                assert!((g - w).norm() < 1e-12, "{kind:?}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn symmetric_terms_have_equal_slots() {
        let u = DiagonalTensor::new(
            vec![Scalar::new(0.3, -1.2), real(-2.0), Scalar::new(0.0, 0.5)],
            params(5.0, 3),
        )
        .unwrap();
        for t in u.averaging_decomposition(Decomposition::Symmetric).unwrap() {
            assert!(t.slots.iter().all(|s| s == &t.slots[0]));
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(diag(&[1.0], 3.0, 2).pi_norm_closed_form(), 1.0);
        assert_eq!(diag(&[1.0], 1.0, 4).pi_norm_closed_form(), 1.0);
        let v = diag(&[1.0, 1.0], 4.0, 2).pi_norm_closed_form();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(diag(&[1.0, 1.0], 2.0, 2).pi_norm_closed_form(), 2.0);
    }

    #[test]
    fn upper_bounds() {
        assert!((diag(&[1.0], 3.0, 2).pi_upper_bound().unwrap() - 1.0).abs() < 1e-15);
        let u = diag(&[1.0, 1.0], 4.0, 2);
        assert!((u.pi_upper_bound().unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let u = diag(&[2.0, 1.0], 6.0, 2);
        assert!((u.pi_upper_bound().unwrap() - 9f64.cbrt()).abs() < 1e-12);
        assert!((u.pi_upper_bound().unwrap() - 2.0801).abs() < 1e-4);
    }

    #[test]
    fn low_regime_average_is_not_cheaper_than_basis() {
        let u = diag(&[3.0, 4.0, -1.0], 2.0, 2);
        let avg = representation_cost(
            &u.averaging_decomposition(Decomposition::Symmetric).unwrap(),
            2.0,
        );
        let basis = representation_cost(&u.basis_decomposition(), 2.0);
        assert_eq!(basis, 8.0);
        assert!(avg >= basis);
        assert_eq!(u.pi_upper_bound().unwrap(), 8.0);
    }

    #[test]
    fn dual_forms() {
        let f = diag(&[1.0, 1.0], 4.0, 2).build_dual_form();
        assert_eq!(f.coeffs(), &[real(1.0), real(1.0)]);
        let f = diag(&[4.0, 0.0], 4.0, 2).build_dual_form();
        assert_eq!(f.coeffs(), &[real(4.0), real(0.0)]);
        let f = diag(&[-1.0, 1.0], 2.0, 2).build_dual_form();
        assert_eq!(f.coeffs(), &[real(-1.0), real(1.0)]);
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(diag(&[1.0], 3.0, 2).pi_lower_bound(), 1.0);
        let u = diag(&[1.0, 1.0], 4.0, 2);
        let f = u.build_dual_form();
        assert_eq!(u.pair(&f).unwrap(), real(2.0));
        assert!((f.holder_bound() - 2f64.sqrt()).abs() < 1e-15);
        assert!((u.pi_lower_bound() - 2f64.sqrt()).abs() < 1e-15);
        let u = diag(&[3.0, 4.0], 2.0, 2);
        let f = u.build_dual_form();
        assert_eq!(u.pair(&f).unwrap(), real(7.0));
        assert_eq!(f.holder_bound(), 1.0);
        assert_eq!(u.pi_lower_bound(), 7.0);
        assert_eq!(diag(&[0.0, 0.0], 3.0, 2).pi_lower_bound(), 0.0);
    }

    #[test]
    fn pairings() {
        let lp = params(4.0, 2);
        let pair = |a: &[f64], b: &[f64]| {
            let u = DiagonalTensor::from_real(a, lp).unwrap();
            let f = DualDiagonalForm::new(b.iter().map(|&x| real(x)).collect(), lp).unwrap();
            u.pair(&f)
        };
        assert_eq!(pair(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), real(2.0));
        assert_eq!(pair(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), real(0.0));
        assert_eq!(pair(&[2.0, -1.0], &[1.0, 1.0]).unwrap(), real(1.0));
        assert_eq!(
            pair(&[1.0], &[1.0, 1.0]),
            Err(Error::DimensionMismatch {
                expected: 1,
                got: 2
            })
        );
    }

    #[test]
    fn form_evaluation() {
        let f = DualDiagonalForm::new(vec![real(2.0), real(-1.0)], params(3.0, 2)).unwrap();
        let x = [real(1.0), real(2.0)];
        let y = [real(3.0), real(1.0)];
        assert_eq!(f.evaluate(&[&x, &y]).unwrap(), real(4.0));
        assert!(f.evaluate(&[&x]).is_err());
    }

    #[test]
    fn budgets_and_validation() {
        let u = diag(&[1.0; 21], 3.0, 2);
        assert!(matches!(
            u.averaging_decomposition(Decomposition::Symmetric),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            u.pi_upper_bound(),
            Err(Error::BudgetExceeded { .. })
        ));
        // at or below the degree the basis expansion still gives the bound
        let u = diag(&[1.0; 21], 2.0, 2);
        assert_eq!(u.pi_upper_bound().unwrap(), 21.0);
        assert!(DiagonalTensor::from_real(&[1.0], params(3.0, 1)).is_err());
        assert!(DiagonalTensor::from_real(&[f64::NAN], params(3.0, 2)).is_err());
        assert!(matches!(
            dense_expansion(&[], 20, 4),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
