//! Dense k-linear forms on `C^n`, homogeneous polynomials, and polarization.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numerics::{ensure_finite, lq_norm, LpParams, Scalar};

/// Largest coefficient count `n^k` for a dense form.
pub const FORM_BUDGET: u64 = 100_000;

/// Largest degree [`polarize`] accepts; the formula sums `2^k` evaluations.
pub const MAX_POLARIZATION_DEGREE: u32 = 6;

/// `phi(x_1, .., x_k) = sum coeffs[i_1..i_k] x_{1,i_1} ... x_{k,i_k}`.
///
/// Coefficients are stored row-major: the last index varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearForm {
    n: usize,
    params: LpParams,
    coeffs: Vec<Scalar>,
    symmetric: bool,
}

fn dense_len(n: usize, k: u32) -> Result<usize> {
    let requested = (n as u128).checked_pow(k).unwrap_or(u128::MAX);
    if requested > u128::from(FORM_BUDGET) {
        return Err(Error::BudgetExceeded {
            requested,
            limit: u128::from(FORM_BUDGET),
        });
    }
    Ok(requested as usize)
}

/// Iterator over multi-indices in `{0..n}^k`, row-major.
struct MultiIndices {
    n: usize,
    current: Option<Vec<usize>>,
}

impl MultiIndices {
    fn new(n: usize, k: usize) -> Self {
        let current = if n == 0 && k > 0 {
            None
        } else {
            Some(vec![0; k])
        };
        Self { n, current }
    }
}

impl Iterator for MultiIndices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.n {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(out)
    }
}

impl MultilinearForm {
    pub fn new(n: usize, params: LpParams, coeffs: Vec<Scalar>) -> Result<Self> {
        let len = dense_len(n, params.k())?;
        if coeffs.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: coeffs.len(),
            });
        }
        ensure_finite(&coeffs)?;
        let mut form = Self {
            n,
            params,
            coeffs,
            symmetric: false,
        };
        form.symmetric = form.check_symmetric();
        Ok(form)
    }

    pub fn zeros(n: usize, params: LpParams) -> Result<Self> {
        let len = dense_len(n, params.k())?;
        Self::new(n, params, vec![Scalar::new(0.0, 0.0); len])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.params.k()
    }

    pub fn params(&self) -> LpParams {
        self.params
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Whether every coefficient equals all its index permutations, exactly.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> {
        MultiIndices::new(self.n, self.params.k() as usize)
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn entry(&self, index: &[usize]) -> Scalar {
        self.coeffs[self.offset(index)]
    }

    /// Sets one coefficient; the symmetry flag is recomputed.
    pub fn set_entry(&mut self, index: &[usize], value: Scalar) {
        let at = self.offset(index);
        self.coeffs[at] = value;
        self.symmetric = self.check_symmetric();
    }

    fn check_symmetric(&self) -> bool {
        self.indices().all(|idx| {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            self.entry(&idx) == self.entry(&sorted)
        })
    }

    /// Average of each coefficient over its index permutations.
    pub fn symmetrize(&self) -> Self {
        let mut orbit: HashMap<Vec<usize>, (Scalar, usize)> = HashMap::new();
        for idx in self.indices() {
            let mut key = idx.clone();
            key.sort_unstable();
            let slot = orbit.entry(key).or_insert((Scalar::new(0.0, 0.0), 0));
            slot.0 += self.entry(&idx);
            slot.1 += 1;
        }
        let coeffs = self
            .indices()
            .map(|mut idx| {
                idx.sort_unstable();
                let (sum, count) = orbit[&idx];
                sum / count as f64
            })
            .collect();
        Self {
            n: self.n,
            params: self.params,
            coeffs,
            symmetric: true,
        }
    }

    fn check_args(&self, args: &[&[Scalar]]) -> Result<()> {
        let k = self.params.k() as usize;
        if args.len() != k {
            return Err(Error::Arity {
                expected: k,
                got: args.len(),
            });
        }
        for x in args {
            if x.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: x.len(),
                });
            }
            ensure_finite(x)?;
        }
        Ok(())
    }

    /// Contracts all slots except `keep`: the vector `g` with
    /// `phi(x_1, .., y, .., x_k) = sum_i g_i y_i`.
    pub fn partial(&self, args: &[&[Scalar]], keep: usize) -> Result<Vec<Scalar>> {
        self.check_args(args)?;
        let k = self.params.k() as usize;
        let n = self.n;
        // Contract from the last slot inwards; `acc` holds the tensor over the
        // leading slots plus, once passed, the kept slot.
        let mut acc = self.coeffs.clone();
        let mut trailing = 1; // size of the kept block trailing the leading slots
        for slot in (0..k).rev() {
            if slot == keep {
                trailing = n;
                continue;
            }
            let x = args[slot];
            let lead = acc.len() / (n * trailing);
            let mut next = vec![Scalar::new(0.0, 0.0); lead * trailing];
            for a in 0..lead {
                for (i, &xi) in x.iter().enumerate() {
                    let base = (a * n + i) * trailing;
                    for t in 0..trailing {
                        next[a * trailing + t] += acc[base + t] * xi;
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, args: &[&[Scalar]]) -> Result<Scalar> {
        self.check_args(args)?;
        let g = self.partial(args, 0)?;
        Ok(g.iter().zip(args[0]).map(|(a, b)| a * b).sum())
    }

    /// `phi(x, .., x)`.
    pub fn evaluate_diagonal(&self, x: &[Scalar]) -> Result<Scalar> {
        let args = vec![x; self.params.k() as usize];
        self.evaluate(&args)
    }

    /// `(phi(e_i, .., e_i))_i`.
    pub fn diagonal(&self) -> Vec<Scalar> {
        let k = self.params.k() as usize;
        (0..self.n).map(|i| self.entry(&vec![i; k])).collect()
    }
}

/// The symmetric form equal to `f_diag` on the diagonal and zero elsewhere.
pub fn extend_diagonal_functional(f_diag: &[Scalar], params: LpParams) -> Result<MultilinearForm> {
    let mut form = MultilinearForm::zeros(f_diag.len(), params)?;
    ensure_finite(f_diag)?;
    let k = params.k() as usize;
    for (i, &v) in f_diag.iter().enumerate() {
        let at = form.offset(&vec![i; k]);
        form.coeffs[at] = v;
    }
    form.symmetric = true;
    Ok(form)
}

/// Diagonal sequence of `phi` and its norm in the dual sequence space
/// (`l_{p/(p-k)}`, or `l_inf` when `p <= k`).
pub fn diagonal_of_multilinear(form: &MultilinearForm) -> (Vec<Scalar>, f64) {
    let d = form.diagonal();
    let norm = lq_norm(&d, form.params().dual_exponent()).expect("finite coefficients");
    (d, norm)
}

/// `P(x) = sum_t c_t x^{alpha_t}` with every `|alpha_t| = degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPolynomial {
    n: usize,
    degree: u32,
    terms: Vec<(Vec<u32>, Scalar)>,
}

impl HomogeneousPolynomial {
    pub fn new(n: usize, degree: u32, terms: Vec<(Vec<u32>, Scalar)>) -> Result<Self> {
        for (alpha, c) in &terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: alpha.len(),
                });
            }
            let total: u32 = alpha.iter().sum();
            if total != degree {
                return Err(Error::InvalidParams(format!(
                    "monomial of degree {total} in a polynomial of degree {degree}"
                )));
            }
            ensure_finite(std::slice::from_ref(c))?;
        }
        Ok(Self { n, degree, terms })
    }

    /// `sum_i c_i x_i^k`.
    pub fn diagonal(coeffs: &[Scalar], degree: u32) -> Self {
        let n = coeffs.len();
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut alpha = vec![0; n];
                alpha[i] = degree;
                (alpha, c)
            })
            .collect();
        Self { n, degree, terms }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn evaluate(&self, x: &[Scalar]) -> Result<Scalar> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(alpha, c)| {
                alpha
                    .iter()
                    .zip(x)
                    .fold(*c, |acc, (&e, &xi)| acc * xi.powu(e))
            })
            .sum())
    }
}

/// The unique symmetric k-linear form with `phi(x, .., x) = P(x)`:
///
/// `phi(x_1..x_k) = 1/(2^k k!) sum_{eps in {+-1}^k} eps_1..eps_k P(sum_j eps_j x_j)`.
///
/// Only sorted multi-indices are polarized; the rest of each orbit is copied.
pub fn polarize(poly: &HomogeneousPolynomial, p: f64) -> Result<MultilinearForm> {
    let k = poly.degree();
    if k > MAX_POLARIZATION_DEGREE {
        return Err(Error::BudgetExceeded {
            requested: u128::from(k),
            limit: u128::from(MAX_POLARIZATION_DEGREE),
        });
    }
    let params = LpParams::new(p, k)?;
    let n = poly.dim();
    let mut form = MultilinearForm::zeros(n, params)?;
    let factorial: f64 = (1..=k).map(f64::from).product();
    let scale = 1.0 / (f64::from(1u32 << k) * factorial);
    let mut cache: HashMap<Vec<usize>, Scalar> = HashMap::new();
    let mut point = vec![Scalar::new(0.0, 0.0); n];
    let indices: Vec<Vec<usize>> = form.indices().collect();
    for idx in indices {
        let mut key = idx.clone();
        key.sort_unstable();
        if let Some(&v) = cache.get(&key) {
            let at = form.offset(&idx);
            form.coeffs[at] = v;
            continue;
        }
        let mut total = Scalar::new(0.0, 0.0);
        for signs in 0..(1u32 << k) {
            point.iter_mut().for_each(|c| *c = Scalar::new(0.0, 0.0));
            let mut sign = 1.0;
            for (j, &i) in key.iter().enumerate() {
                let eps = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
                sign *= eps;
                point[i] += eps;
            }
            total += poly.evaluate(&point)? * sign;
        }
        let v = total * scale;
        cache.insert(key, v);
        let at = form.offset(&idx);
        form.coeffs[at] = v;
    }
    form.symmetric = form.check_symmetric();
    Ok(form)
}
