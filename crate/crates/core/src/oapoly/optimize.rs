//! Numerical norm estimators.
//!
//! These are oracles: none of them uses the closed-form norms. Each returns
//! `|value|` at an explicit point of the product of unit spheres, so every
//! estimate is a certified lower bound for the true supremum.

use rand_chacha::ChaCha8Rng;

use super::multilinear::MultilinearForm;
use crate::error::{Error, Result};
use crate::numerics::{holder_conjugate, lq_norm, phase, phase_root, Field, Scalar};
use crate::sampling;

/// Point of the l_p unit sphere maximizing `|sum_i g_i y_i|`, and that maximum
/// `||g||_{p'}`. Over the reals `g` is read through its real part.
pub fn holder_dual(g: &[Scalar], p: f64, field: Field) -> (Vec<Scalar>, f64) {
    let g: Vec<Scalar> = match field {
        Field::Complex => g.to_vec(),
        Field::Real => g.iter().map(|v| Scalar::new(v.re, 0.0)).collect(),
    };
    let q = holder_conjugate(p);
    let norm = lq_norm(&g, q).expect("finite gradient");
    let mut y = vec![Scalar::new(0.0, 0.0); g.len()];
    if norm == 0.0 {
        return (y, 0.0);
    }
    if q.is_infinite() {
        let (best, _) = g.iter().enumerate().fold((0, -1.0), |acc, (i, v)| {
            if v.norm() > acc.1 {
                (i, v.norm())
            } else {
                acc
            }
        });
        y[best] = phase(g[best]).conj();
        return (y, norm);
    }
    for (yi, gi) in y.iter_mut().zip(&g) {
        let r = gi.norm();
        if r > 0.0 {
            *yi = phase(*gi).conj() * (r / norm).powf(q - 1.0);
        }
    }
    (y, norm)
}

fn unit_start(n: usize, p: f64, restart: usize, rng: &mut ChaCha8Rng, field: Field) -> Vec<Scalar> {
    if restart == 0 {
        // flat start: every coordinate equally weighted
        let v = (n as f64).powf(-1.0 / p);
        return vec![Scalar::new(v, 0.0); n];
    }
    sampling::random_unit_vector(rng, n, p, field)
}

/// Maximizes `|sum_i c_i x_i^k|` over the l_p unit sphere.
///
/// Each iteration first turns every coordinate so that `c_i x_i^k` points
/// along the current value `P(x)`, then replaces the moduli by the l_p point
/// dual to the gradient of the aligned polynomial. Restart 0 starts from the
/// flat vector, the others from random points; the best value is returned.
/// For `p <= k` each iteration also considers the conditional-gradient
/// vertex.
pub fn maximize_diagonal_polynomial(
    coeffs: &[Scalar],
    k: u32,
    p: f64,
    field: Field,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> f64 {
    let n = coeffs.len();
    let eval =
        |x: &[Scalar]| -> Scalar { coeffs.iter().zip(x).map(|(&c, &xi)| c * xi.powu(k)).sum() };
    let mut best = 0.0_f64;
    for restart in 0..restarts.max(1) {
        let mut rng = sampling::stream_rng(seed, restart as u64);
        let mut x = unit_start(n, p, restart, &mut rng, field);
        best = best.max(eval(&x).norm());
        let mut turns = vec![Scalar::new(1.0, 0.0); n];
        let mut weights = vec![0.0; n];
        for _ in 0..iters {
            let value = eval(&x);
            match field {
                Field::Complex => {
                    let target = phase(value);
                    for i in 0..n {
                        turns[i] = phase_root(target * phase(coeffs[i]).conj(), k)
                            .expect("finite unit scalar");
                        weights[i] = coeffs[i].norm();
                    }
                }
                Field::Real => {
                    let target = if value.re < 0.0 { -1.0 } else { 1.0 };
                    for i in 0..n {
                        let c = coeffs[i].re;
                        let s = if k % 2 == 1 && target * c < 0.0 {
                            -1.0
                        } else {
                            1.0
                        };
                        turns[i] = Scalar::new(s, 0.0);
                        weights[i] = target * c * s.powi(k as i32);
                    }
                }
            }
            let grad: Vec<Scalar> = x
                .iter()
                .zip(&weights)
                .map(|(xi, &w)| Scalar::new(w.max(0.0) * xi.norm().powi(k as i32 - 1), 0.0))
                .collect();
            let (moduli, scale) = holder_dual(&grad, p, Field::Real);
            if scale == 0.0 {
                break;
            }
            let mut next: Vec<Scalar> = moduli.iter().zip(&turns).map(|(m, t)| t * m.re).collect();
            if p <= f64::from(k) {
                // In t_i = |x_i|^p the objective is convex on the simplex, and
                // near-ties make the Hölder step a slow power method. Also
                // try the conditional-gradient vertex.
                let vertex = (0..n)
                    .filter(|&i| weights[i] > 0.0 && x[i].norm() > 0.0)
                    .max_by(|&i, &j| {
                        let score = |i: usize| weights[i] * x[i].norm().powf(f64::from(k) - p);
                        score(i).total_cmp(&score(j))
                    });
                if let Some(i) = vertex {
                    let mut e = vec![Scalar::new(0.0, 0.0); n];
                    e[i] = turns[i];
                    if eval(&e).norm() > eval(&next).norm() {
                        next = e;
                    }
                }
            }
            let moved = next
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            x = next;
            best = best.max(eval(&x).norm());
            if moved < 1e-15 {
                break;
            }
        }
    }
    best
}

fn require_real(form: &MultilinearForm) -> Result<()> {
    if form.coeffs().iter().any(|c| c.im != 0.0) {
        return Err(Error::InvalidParams(
            "real-scalar estimates need real coefficients".into(),
        ));
    }
    Ok(())
}

/// `sup |phi(x_1..x_k)|` over products of l_p unit spheres by alternating
/// maximization: each slot in turn is set to the exact maximizer given the
/// others.
pub fn multilinear_norm_ascent(
    form: &MultilinearForm,
    field: Field,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<f64> {
    if field == Field::Real {
        require_real(form)?;
    }
    let n = form.dim();
    let k = form.degree() as usize;
    let p = form.params().p();
    let mut best = 0.0_f64;
    for restart in 0..restarts.max(1) {
        let mut rng = sampling::stream_rng(seed, restart as u64);
        let mut xs: Vec<Vec<Scalar>> = (0..k)
            .map(|_| sampling::random_unit_vector(&mut rng, n, p, field))
            .collect();
        let mut last = 0.0;
        for _ in 0..iters {
            let mut value = 0.0;
            for slot in 0..k {
                let args: Vec<&[Scalar]> = xs.iter().map(Vec::as_slice).collect();
                let g = form.partial(&args, slot)?;
                let (y, v) = holder_dual(&g, p, field);
                value = v;
                if v > 0.0 {
                    xs[slot] = y;
                }
            }
            best = best.max(value);
            if value - last <= 1e-15 * value {
                break;
            }
            last = value;
        }
    }
    Ok(best)
}

fn sphere_point(angles: &[f64], n: usize, p: f64) -> Vec<Scalar> {
    let raw: Vec<f64> = match n {
        1 => vec![1.0],
        2 => vec![angles[0].cos(), angles[0].sin()],
        3 => {
            let (t, s) = (angles[0], angles[1]);
            vec![t.cos(), t.sin() * s.cos(), t.sin() * s.sin()]
        }
        _ => unreachable!("grid search covers n <= 3"),
    };
    let v: Vec<Scalar> = raw.into_iter().map(|x| Scalar::new(x, 0.0)).collect();
    let norm = lq_norm(&v, p).expect("finite");
    v.into_iter().map(|x| x / norm).collect()
}

/// Real-scalar `sup |phi|` by a dense angular grid over the first `k-1`
/// slots (the last slot is maximized exactly), followed by a pattern-search
/// polish of the best grid cells. Supports `n <= 3`.
pub fn multilinear_norm_grid(form: &MultilinearForm, max_points: usize) -> Result<f64> {
    require_real(form)?;
    let n = form.dim();
    if n == 0 {
        return Ok(0.0);
    }
    if n > 3 {
        return Err(Error::InvalidParams(format!(
            "grid search supports n <= 3, got {n}"
        )));
    }
    let k = form.degree() as usize;
    let p = form.params().p();
    let per_slot = n - 1;
    let dims = per_slot * (k - 1);
    // the last coordinate direction of an n = 3 point spans a full turn
    let ranges: Vec<f64> = (0..dims)
        .map(|d| {
            if per_slot == 2 && d % 2 == 1 {
                std::f64::consts::TAU
            } else {
                std::f64::consts::PI
            }
        })
        .collect();
    let objective = |angles: &[f64]| -> f64 {
        let mut xs: Vec<Vec<Scalar>> = (0..k - 1)
            .map(|s| sphere_point(&angles[s * per_slot..(s + 1) * per_slot], n, p))
            .collect();
        xs.push(vec![Scalar::new(0.0, 0.0); n]);
        let args: Vec<&[Scalar]> = xs.iter().map(Vec::as_slice).collect();
        let g = form.partial(&args, k - 1).expect("shapes checked");
        holder_dual(&g, p, Field::Real).1
    };
    if dims == 0 {
        return Ok(objective(&[]));
    }
    let m = ((max_points as f64).powf(1.0 / dims as f64).floor() as usize).clamp(2, 4096);
    let spacing: Vec<f64> = ranges.iter().map(|r| r / m as f64).collect();
    let mut grid: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut counter = vec![0usize; dims];
    loop {
        let angles: Vec<f64> = counter
            .iter()
            .zip(&spacing)
            .map(|(&c, &h)| c as f64 * h)
            .collect();
        grid.push((objective(&angles), angles));
        let mut pos = 0;
        while pos < dims {
            counter[pos] += 1;
            if counter[pos] < m {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
        if pos == dims {
            break;
        }
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = grid[0].0;
    for (value, start) in grid.into_iter().take(8) {
        best = best.max(pattern_search(&objective, start, value, &spacing));
    }
    Ok(best)
}

fn pattern_search<F: Fn(&[f64]) -> f64>(
    f: &F,
    mut x: Vec<f64>,
    mut fx: f64,
    spacing: &[f64],
) -> f64 {
    let mut step: Vec<f64> = spacing.to_vec();
    while step.iter().cloned().fold(0.0, f64::max) > 1e-10 {
        let mut improved = false;
        for d in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] += dir * step[d];
                let fy = f(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|h| *h *= 0.5);
        }
    }
    fx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{real, LpParams};
    use crate::oapoly::multilinear::extend_diagonal_functional;

    #[test]
    fn holder_dual_attains_conjugate_norm() {
        let g = [real(3.0), Scalar::new(0.0, -4.0)];
        let (y, v) = holder_dual(&g, 2.0, Field::Complex);
        assert!((v - 5.0).abs() < 1e-15);
        assert!((lq_norm(&y, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let s: Scalar = g.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!((s - real(5.0)).norm() < 1e-14);
        // p = 1 picks a vertex
        let (y, v) = holder_dual(&g, 1.0, Field::Complex);
        assert_eq!(v, 4.0);
        assert_eq!(y[0], real(0.0));
    }

    #[test]
    fn diagonal_maximizer_matches_known_norms() {
        let c = [real(3.0), real(4.0)];
        let v = maximize_diagonal_polynomial(&c, 2, 4.0, Field::Complex, 4, 500, 1);
        assert!((v - 5.0).abs() < 1e-9);
        let v = maximize_diagonal_polynomial(&c, 2, 2.0, Field::Complex, 4, 500, 1);
        assert!((v - 4.0).abs() < 1e-9);
        let v = maximize_diagonal_polynomial(&[real(1.0); 3], 2, 6.0, Field::Complex, 4, 500, 1);
        assert!((v - 3f64.powf(2.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn real_field_cannot_mix_signs_for_even_degree() {
        // |x1^2 - x2^2| <= max(x1^2, x2^2) <= 1 on the real l_4 ball
        let c = [real(1.0), real(-1.0)];
        let v = maximize_diagonal_polynomial(&c, 2, 4.0, Field::Real, 8, 500, 3);
        assert!((v - 1.0).abs() < 1e-9);
        let v = maximize_diagonal_polynomial(&c, 2, 4.0, Field::Complex, 8, 500, 3);
        assert!((v - 2f64.sqrt()).abs() < 1e-9);
        // odd degree: the sign can be absorbed
        let v = maximize_diagonal_polynomial(&c, 3, 6.0, Field::Real, 8, 500, 3);
        assert!((v - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn ascent_and_grid_agree_on_diagonal_forms() {
        let lp = LpParams::new(4.0, 2).unwrap();
        let f = extend_diagonal_functional(&[real(1.0), real(1.0)], lp).unwrap();
        let a = multilinear_norm_ascent(&f, Field::Real, 10, 500, 5).unwrap();
        let g = multilinear_norm_grid(&f, 100_000).unwrap();
        assert!((a - 2f64.sqrt()).abs() < 1e-9, "{a}");
        assert!((g - 2f64.sqrt()).abs() < 1e-9, "{g}");
    }

    #[test]
    fn grid_rejects_large_or_complex_forms() {
        let lp = LpParams::new(4.0, 2).unwrap();
        let f = extend_diagonal_functional(&[real(1.0); 4], lp).unwrap();
        assert!(multilinear_norm_grid(&f, 1000).is_err());
        let f = extend_diagonal_functional(&[Scalar::new(0.0, 1.0)], lp).unwrap();
        assert!(multilinear_norm_grid(&f, 1000).is_err());
        assert!(multilinear_norm_ascent(&f, Field::Real, 1, 10, 0).is_err());
    }
}
