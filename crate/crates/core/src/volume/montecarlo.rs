//! Hit-or-miss volume estimates by uniform sampling of the positivity box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::conditions;
use crate::error::{Error, Result};
use crate::geometry::{volume_prefactor, Dims};
use crate::regions::ClassTag;

/// Samples per independently seeded stream position.
const BATCH: u64 = 1 << 14;
/// Lower bound on the sample count.
pub const MIN_SAMPLES: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    #[serde(rename = "class")]
    pub class_tag: ClassTag,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
}

impl McEstimate {
    /// `|estimate - exact|` in units of the standard error.
    pub fn sigmas_from(&self, exact: f64) -> f64 {
        let diff = (self.estimate - exact).abs();
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff <= 1e-12 * exact.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn consistent_with(&self, exact: f64, sigmas: f64) -> bool {
        self.sigmas_from(exact) <= sigmas
    }
}

fn member(dims: Dims, class_tag: ClassTag, lambdas: &[f64]) -> bool {
    match class_tag {
        ClassTag::P => conditions::positive_necessary(dims, lambdas),
        ClassTag::CP => conditions::completely_positive(dims, lambdas),
        ClassTag::G => {
            conditions::generator_achievable(dims, lambdas)
                && conditions::completely_positive(dims, lambdas)
        }
        ClassTag::EB => {
            conditions::generator_achievable(dims, lambdas)
                && conditions::completely_positive(dims, lambdas)
                && conditions::eb_necessary(dims, lambdas)
        }
    }
}

/// Uniform sampling of `[-1/(d-1), 1]^coords`; sample `i` always uses the
/// same stream words, so the result does not depend on the thread count.
pub fn mc_volume(d: usize, n: usize, class_tag: ClassTag, samples: u64, seed: u64) -> Result<McEstimate> {
    let dims = Dims::new(d, n)?;
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples are required, got {samples}"
        )));
    }
    let coords = dims.coords();
    let lo = -1.0 / (d as f64 - 1.0);
    let width = 1.0 - lo;
    let words_per_sample = 2 * coords as u128;
    let batches = samples.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let start = b * BATCH;
            let end = (start + BATCH).min(samples);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(start as u128 * words_per_sample);
            let mut lambdas = vec![0.0f64; n + 1];
            let mut hits = 0u64;
            for _ in start..end {
                for l in lambdas.iter_mut().take(coords) {
                    *l = lo + width * rng.random::<f64>();
                }
                if member(dims, class_tag, &lambdas) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let scale = width.powi(coords as i32) * volume_prefactor(d, n)?.to_f64();
    let fraction = hits as f64 / samples as f64;
    let stderr = (fraction * (1.0 - fraction) / samples as f64).sqrt() * scale;
    Ok(McEstimate {
        class_tag,
        d,
        n,
        samples,
        seed,
        hits,
        estimate: fraction * scale,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vp_volume;

    #[test]
    fn box_sampling_is_exact() {
        let m = mc_volume(3, 4, ClassTag::P, 100_000, 1).unwrap();
        assert_eq!(m.hits, m.samples);
        assert_eq!(m.stderr, 0.0);
        assert!((m.estimate - vp_volume(3, 4).unwrap().to_f64()).abs() < 1e-12);
        assert!(m.consistent_with(0.25, 3.0));
    }

    #[test]
    fn qubit_cp() {
        let m = mc_volume(2, 3, ClassTag::CP, 200_000, 42).unwrap();
        assert!(m.consistent_with(1.0 / 3.0, 3.0), "{m:?}");
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let a = mc_volume(3, 3, ClassTag::EB, 50_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_volume(3, 3, ClassTag::EB, 50_000, 9).unwrap());
        assert_eq!(a, b);
        let c = mc_volume(3, 3, ClassTag::EB, 50_000, 10).unwrap();
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn prefix_of_longer_run() {
        // the first samples of a longer run are the samples of a shorter one
        let short = mc_volume(2, 3, ClassTag::G, BATCH, 5).unwrap();
        let long = mc_volume(2, 3, ClassTag::G, 2 * BATCH, 5).unwrap();
        assert!(long.hits >= short.hits);
    }

    #[test]
    fn rejects_small_runs() {
        assert!(mc_volume(2, 3, ClassTag::CP, 999, 0).is_err());
    }
}
