//! Generalized k-Rademacher functions on `[0, 1]`.
//!
//! `r_n` is constant on the k-adic intervals `[m/k^n, (m+1)/k^n)` and takes
//! the value `omega^d` there, `d` being the last base-k digit of `m`. For
//! `k = 2` these are the classical Rademacher functions. Breakpoints belong
//! to the interval on their right; `t = 1` belongs to the last interval.
//!
//! Products of these functions are integrated exactly: either with the
//! multiplicity rule (a level repeated `c` times averages to 1 iff `k | c`)
//! or by summing over constancy pieces in `Z[omega]`.

use std::collections::BTreeMap;

use crate::cyclo::{CycloScalar, CycloSum, ExactAverage};
use crate::error::{Error, Result};

/// Upper limit on the number of pieces a brute-force integral may visit.
pub const PIECE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneralizedRademacher {
    k: u32,
    level: u32,
}

impl GeneralizedRademacher {
    pub fn new(k: u32, level: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!(
                "Rademacher systems need k >= 2, got {k}"
            )));
        }
        if level == 0 {
            return Err(Error::InvalidLevel);
        }
        Ok(Self { k, level })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Value on piece `m` of the uniform partition into `k^depth` pieces.
    /// Requires `depth >= level`.
    pub fn value_on_piece(&self, m: u64, depth: u32) -> CycloScalar {
        debug_assert!(depth >= self.level);
        let k = u64::from(self.k);
        let digit = (m / k.pow(depth - self.level)) % k;
        CycloScalar::root(self.k, digit)
    }

    pub fn eval(&self, t: f64) -> Result<CycloScalar> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfDomain(t));
        }
        let pieces = self.piece_count()?;
        let m = ((t * pieces as f64).floor() as u64).min(pieces - 1);
        Ok(self.value_on_piece(m, self.level))
    }

    /// Evaluation at the rational point `num/den`; breakpoints are exact here.
    pub fn eval_rational(&self, num: u64, den: u64) -> Result<CycloScalar> {
        if den == 0 || num > den {
            return Err(Error::OutOfDomain(num as f64 / den as f64));
        }
        let pieces = self.piece_count()?;
        let m = (u128::from(num) * u128::from(pieces) / u128::from(den)) as u64;
        Ok(self.value_on_piece(m.min(pieces - 1), self.level))
    }

    fn piece_count(&self) -> Result<u64> {
        u64::from(self.k)
            .checked_pow(self.level)
            .ok_or(Error::BudgetExceeded {
                requested: u128::MAX,
                limit: u128::from(u64::MAX),
            })
    }
}

/// One factor `coeff * r_level(t)` of a step-function product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepFactor {
    pub level: u32,
    pub coeff: CycloScalar,
}

impl StepFactor {
    pub fn rademacher(k: u32, level: u32) -> Self {
        Self {
            level,
            coeff: CycloScalar::one(k),
        }
    }
}

/// Number of pieces `k^depth`, or an error past [`PIECE_BUDGET`].
pub fn piece_count(k: u32, depth: u32) -> Result<u64> {
    let requested = u128::from(k).checked_pow(depth).unwrap_or(u128::MAX);
    if requested > u128::from(PIECE_BUDGET) {
        return Err(Error::BudgetExceeded {
            requested,
            limit: u128::from(PIECE_BUDGET),
        });
    }
    Ok(requested as u64)
}

/// `int_0^1 prod_j coeff_j r_{level_j}(t) dt`, summed exactly over the
/// `k^depth` pieces on which the integrand is constant.
pub fn integrate_step_product(factors: &[StepFactor], k: u32, depth: u32) -> Result<ExactAverage> {
    if k < 2 {
        return Err(Error::InvalidParams(format!(
            "Rademacher systems need k >= 2, got {k}"
        )));
    }
    let mut base = CycloScalar::one(k);
    let mut funcs = Vec::with_capacity(factors.len());
    for f in factors {
        if f.coeff.order() != k {
            return Err(Error::InvalidParams(format!(
                "coefficient is a root of order {}, expected {k}",
                f.coeff.order()
            )));
        }
        base = base * f.coeff;
        funcs.push(GeneralizedRademacher::new(k, f.level)?);
    }
    if let Some(max_level) = factors.iter().map(|f| f.level).max() {
        if depth < max_level {
            return Err(Error::DepthTooSmall { depth, max_level });
        }
    }
    let pieces = piece_count(k, depth)?;
    let mut counts = vec![0_i64; k as usize];
    if let Some(e0) = base.exponent() {
        let ku = u64::from(k);
        for m in 0..pieces {
            let e = funcs.iter().fold(u64::from(e0), |acc, r| {
                acc + u64::from(r.value_on_piece(m, depth).exponent().unwrap_or(0))
            });
            counts[(e % ku) as usize] += 1;
        }
    }
    Ok(ExactAverage {
        sum: CycloSum::from_counts(k, &counts),
        denominator: pieces,
    })
}

fn check_levels(levels: &[u32], k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParams(format!(
            "Rademacher systems need k >= 2, got {k}"
        )));
    }
    if levels.len() != k as usize {
        return Err(Error::Arity {
            expected: k as usize,
            got: levels.len(),
        });
    }
    if levels.contains(&0) {
        return Err(Error::InvalidLevel);
    }
    Ok(())
}

/// `int_0^1 r_{n_1} ... r_{n_k}` by the multiplicity rule.
///
/// Levels are independent k-adic digits, so the integral factors over
/// distinct levels; a level appearing `c` times contributes
/// `(1/k) sum_d omega^{c d}`, which is 1 when `k | c` and 0 otherwise.
pub fn integrate_product(levels: &[u32], k: u32) -> Result<u8> {
    check_levels(levels, k)?;
    let mut multiplicity: BTreeMap<u32, u32> = BTreeMap::new();
    for &n in levels {
        *multiplicity.entry(n).or_default() += 1;
    }
    Ok(u8::from(multiplicity.values().all(|c| c % k == 0)))
}

/// Same integral as [`integrate_product`], by summing over all pieces.
pub fn integrate_product_by_pieces(levels: &[u32], k: u32) -> Result<ExactAverage> {
    check_levels(levels, k)?;
    let factors: Vec<StepFactor> = levels
        .iter()
        .map(|&n| StepFactor::rademacher(k, n))
        .collect();
    let depth = levels.iter().copied().max().unwrap_or(1);
    integrate_step_product(&factors, k, depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(k: u32, n: u32) -> GeneralizedRademacher {
        GeneralizedRademacher::new(k, n).unwrap()
    }

    /// Interval-by-interval construction: start from `[0,1)`, split every
    /// interval of the previous level into `k` parts and label part `j`
    /// with `alpha_j`. Endpoints are kept as integers over `k^level`.
    fn recursive_labels(k: u32, level: u32) -> Vec<(u64, u64, u32)> {
        let mut intervals = vec![(0_u64, 1_u64)];
        let mut scale = 1_u64;
        let mut labels = Vec::new();
        for _ in 0..level {
            let mut next = Vec::new();
            labels.clear();
            for &(lo, hi) in &intervals {
                let (lo, hi) = (lo * u64::from(k), hi * u64::from(k));
                let width = (hi - lo) / u64::from(k);
                for j in 0..u64::from(k) {
                    let sub = (lo + j * width, lo + (j + 1) * width);
                    next.push(sub);
                    labels.push((sub.0, sub.1, j as u32));
                }
            }
            intervals = next;
            scale *= u64::from(k);
        }
        debug_assert_eq!(labels.last().map(|l| l.1), Some(scale));
        labels
    }

    fn recursive_eval(labels: &[(u64, u64, u32)], k: u32, level: u32, num: u64, den: u64) -> u32 {
        let scale = u128::from(k).pow(level);
        for &(lo, hi, j) in labels {
            // lo/scale <= num/den < hi/scale
            let x = u128::from(num) * scale;
            if u128::from(lo) * u128::from(den) <= x && x < u128::from(hi) * u128::from(den) {
                return j;
            }
        }
        labels.last().unwrap().2
    }

    #[test]
    fn documented_values() {
        assert_eq!(r(2, 1).eval(0.3).unwrap().exponent(), Some(0));
        assert_eq!(r(2, 2).eval(0.6).unwrap().exponent(), Some(0));
        assert_eq!(r(3, 1).eval(0.5).unwrap().exponent(), Some(1));
    }

    #[test]
    fn digit_rule_matches_recursive_construction() {
        let den = 10_000_u64;
        for k in 2..=4 {
            for n in 1..=4 {
                let labels = recursive_labels(k, n);
                for num in 0..=den {
                    let want = recursive_eval(&labels, k, n, num, den);
                    let got = r(k, n).eval_rational(num, den).unwrap().exponent().unwrap();
                    assert_eq!(got, want, "k={k} n={n} t={num}/{den}");
                }
            }
        }
    }

    #[test]
    fn float_and_rational_agree_off_breakpoints() {
        for k in 2..=5 {
            for n in 1..=3 {
                for i in 0..1000_u64 {
                    let (num, den) = (2 * i + 1, 2000);
                    let t = num as f64 / den as f64;
                    assert_eq!(
                        r(k, n).eval(t).unwrap(),
                        r(k, n).eval_rational(num, den).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn breakpoints_take_right_value() {
        // t = 1/2 starts the second half at level 1
        assert_eq!(r(2, 1).eval_rational(1, 2).unwrap().exponent(), Some(1));
        assert_eq!(r(3, 1).eval_rational(1, 3).unwrap().exponent(), Some(1));
        // t = 1 sits in the last interval
        assert_eq!(r(3, 2).eval(1.0).unwrap().exponent(), Some(2));
        assert_eq!(r(3, 2).eval_rational(1, 1).unwrap().exponent(), Some(2));
    }

    #[test]
    fn classical_rademacher_for_k2() {
        for n in 1..=6_u32 {
            for i in 0..997 {
                let t = (i as f64 + 0.37) / 997.0;
                let s = (2f64.powi(n as i32) * std::f64::consts::PI * t).sin();
                if s.abs() < 1e-9 {
                    continue;
                }
                let want = if s > 0.0 { 0 } else { 1 };
                assert_eq!(r(2, n).eval(t).unwrap().exponent(), Some(want));
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert_eq!(r(2, 1).eval(1.5), Err(Error::OutOfDomain(1.5)));
        assert!(r(2, 1).eval(-0.1).is_err());
        assert!(GeneralizedRademacher::new(1, 1).is_err());
        assert_eq!(GeneralizedRademacher::new(2, 0), Err(Error::InvalidLevel));
    }

    #[test]
    fn product_integrals() {
        assert_eq!(integrate_product(&[1, 1], 2).unwrap(), 1);
        assert_eq!(integrate_product(&[1, 2], 2).unwrap(), 0);
        assert_eq!(integrate_product(&[1, 1, 2, 2], 4).unwrap(), 0);
        assert_eq!(
            integrate_product_by_pieces(&[1, 1, 2, 2], 4)
                .unwrap()
                .as_integer(),
            Some(0)
        );
        assert_eq!(
            integrate_product(&[1, 2], 3),
            Err(Error::Arity {
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn step_products() {
        let one = |k, n| StepFactor::rademacher(k, n);
        let avg = integrate_step_product(&[one(2, 1)], 2, 1).unwrap();
        assert_eq!(avg.as_integer(), Some(0));
        let avg = integrate_step_product(&[one(2, 1), one(2, 1)], 2, 1).unwrap();
        assert_eq!(avg.as_integer(), Some(1));
        let avg = integrate_step_product(&[one(3, 1), one(3, 2), one(3, 2)], 3, 2).unwrap();
        assert_eq!(avg.as_integer(), Some(0));
        // a coefficient scales the result
        let f = StepFactor {
            level: 1,
            coeff: CycloScalar::root(3, 1),
        };
        let avg = integrate_step_product(&[f, one(3, 1), one(3, 1)], 3, 2).unwrap();
        assert!((avg.to_complex() - CycloScalar::root(3, 1).to_complex()).norm() < 1e-15);
        assert_eq!(avg.as_rational(), None);
        // zero coefficient kills everything
        let z = StepFactor {
            level: 1,
            coeff: CycloScalar::zero(2),
        };
        assert!(integrate_step_product(&[z], 2, 1).unwrap().sum.is_zero());
    }

    #[test]
    fn step_product_errors() {
        let f = StepFactor::rademacher(2, 3);
        assert_eq!(
            integrate_step_product(&[f], 2, 2),
            Err(Error::DepthTooSmall {
                depth: 2,
                max_level: 3
            })
        );
        assert!(matches!(
            integrate_step_product(&[StepFactor::rademacher(2, 1)], 2, 40),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(integrate_step_product(&[StepFactor::rademacher(3, 1)], 2, 1).is_err());
    }

    #[test]
    fn unit_modulus_everywhere() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for k in 2..=6 {
            for n in 1..=5 {
                for _ in 0..1000 {
                    let t: f64 = rng.random();
                    let v = r(k, n).eval(t).unwrap();
                    assert!(!v.is_zero());
                    assert_eq!(v.modulus(), 1);
                    assert!((v.to_complex().norm() - 1.0).abs() < 1e-15);
                }
            }
        }
    }
}
