//! Random tables under Poisson and multinomial sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use crate::error::{Error, Result};

/// Tolerance on `|1'p - 1|` for multinomial cell probabilities.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Generator for replicate `index` of an experiment seeded with `seed`.
///
/// Each replicate gets its own ChaCha stream, so results do not depend on
/// the order or thread in which replicates run.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_positive(v: &[f64]) -> Result<()> {
    match v.iter().enumerate().find(|(_, x)| !(**x > 0.0 && x.is_finite())) {
        Some((cell, &value)) => Err(Error::NonPositiveParameter { cell, value }),
        None => Ok(()),
    }
}

/// Independent Poisson counts with means `lambda`.
pub fn sample_poisson<R: Rng + ?Sized>(lambda: &[f64], rng: &mut R) -> Result<Vec<u64>> {
    check_positive(lambda)?;
    lambda
        .iter()
        .map(|&l| {
            let dist = Poisson::new(l).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(dist.sample(rng) as u64)
        })
        .collect()
}

/// Multinomial counts of size `n` via sequential conditional binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(n: u64, p: &[f64], rng: &mut R) -> Result<Vec<u64>> {
    check_positive(p)?;
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    let mut counts = vec![0u64; p.len()];
    let mut remaining = n;
    let mut mass = sum;
    for (i, &pi) in p.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = remaining;
            break;
        }
        let q = (pi / mass).clamp(0.0, 1.0);
        let dist = Binomial::new(remaining, q).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let x = dist.sample(rng);
        counts[i] = x;
        remaining -= x;
        mass -= pi;
    }
    Ok(counts)
}
