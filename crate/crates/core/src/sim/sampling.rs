use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};

use super::Distribution;
use crate::counts::CountsTable;
use crate::error::{Error, Result};

/// Multinomial draw of `shots` outcomes from `dist`.
///
/// Sequential conditional binomials on a ChaCha8 stream seeded with `seed`,
/// so the result depends only on `(dist, shots, seed)`.
pub fn sample_counts(dist: &Distribution, shots: u64, seed: u64) -> Result<CountsTable> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = dist.probabilities();
    let mut bins = vec![0u64; probs.len()];
    let mut remaining = shots;
    for (j, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if j + 1 == probs.len() {
            bins[j] = remaining;
            break;
        }
        // recomputed suffix mass: exactly p at the last nonzero bin
        let mass_left: f64 = probs[j..].iter().sum();
        let cond = if mass_left > 0.0 { (p / mass_left).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, cond)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(&mut rng);
        bins[j] = draw;
        remaining -= draw;
    }
    CountsTable::new(bins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass() {
        let c = sample_counts(&Distribution::delta(16, 0), 8192, 3).unwrap();
        assert_eq!(c.bins()[0], 8192);
        assert_eq!(c.total(), 8192);
    }

    #[test]
    fn deterministic_per_seed() {
        let d = Distribution::uniform(16);
        let a = sample_counts(&d, 5000, 11).unwrap();
        let b = sample_counts(&d, 5000, 11).unwrap();
        let c = sample_counts(&d, 5000, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.total(), 5000);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(sample_counts(&Distribution::uniform(2), 0, 0).is_err());
    }

    #[test]
    fn mass_on_last_bin() {
        let c = sample_counts(&Distribution::delta(4, 3), 100, 0).unwrap();
        assert_eq!(c.bins(), &[0, 0, 0, 100]);
    }
}
