//! Seeded random instances for tests, sweeps and optimizer restarts.
//!
//! Every generator draws from a ChaCha stream identified by `(seed, stream)`,
//! so results do not depend on how cases are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::numerics::{lq_norm, Field, LpParams, Scalar};
use crate::oapoly::MultilinearForm;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian(rng: &mut impl Rng, field: Field) -> Scalar {
    let re: f64 = rng.sample(StandardNormal);
    match field {
        Field::Real => Scalar::new(re, 0.0),
        Field::Complex => Scalar::new(re, rng.sample(StandardNormal)),
    }
}

pub fn gaussian_vector(rng: &mut impl Rng, n: usize, field: Field) -> Vec<Scalar> {
    (0..n).map(|_| gaussian(rng, field)).collect()
}

/// Gaussian direction rescaled onto the l_p unit sphere.
pub fn random_unit_vector(rng: &mut impl Rng, n: usize, p: f64, field: Field) -> Vec<Scalar> {
    loop {
        let v = gaussian_vector(rng, n, field);
        let norm = lq_norm(&v, p).expect("gaussian samples are finite");
        if norm > 0.0 || n == 0 {
            return v
                .into_iter()
                .map(|x| x / norm.max(f64::MIN_POSITIVE))
                .collect();
        }
    }
}

/// Two vectors with disjoint supports covering `0..n`: each coordinate is
/// handed to `x` or to `y` by a fair coin, values are Gaussian.
pub fn disjoint_pair(rng: &mut impl Rng, n: usize, field: Field) -> (Vec<Scalar>, Vec<Scalar>) {
    let zero = Scalar::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let mut y = vec![zero; n];
    for i in 0..n {
        let v = gaussian(rng, field);
        if rng.random_bool(0.5) {
            x[i] = v;
        } else {
            y[i] = v;
        }
    }
    (x, y)
}

/// Symmetrized Gaussian k-linear form.
pub fn random_symmetric_form(
    rng: &mut impl Rng,
    n: usize,
    params: LpParams,
    field: Field,
) -> Result<MultilinearForm> {
    let len = n.pow(params.k());
    let raw = MultilinearForm::new(n, params, gaussian_vector(rng, len, field))?;
    Ok(raw.symmetrize())
}
