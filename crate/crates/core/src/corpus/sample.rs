//! Seeded sampling without replacement.
//!
//! The generator is SplitMix64 with its 64-bit state initialised to the seed.
//! Bounded draws use Lemire's multiply-and-reject method, and each group is
//! sampled with a partial Fisher–Yates shuffle of its entry indices. Groups
//! are visited in ascending label order from a single generator stream, so a
//! (manifest, n, seed) triple always yields the same subset on every
//! platform.

use std::collections::BTreeMap;

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::{CorpusManifest, SamplingMode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("sample size must be positive")]
    Zero,
    #[error("sample size {n} exceeds the {size} entries of dataset {dataset:?}")]
    TooLarge { n: usize, dataset: String, size: usize },
    #[error("sample size {n} exceeds the {size} manifest entries")]
    TooLargePooled { n: usize, size: usize },
}

/// Uniform draw from `0..bound`.
fn below(rng: &mut SplitMix64, bound: u64) -> u64 {
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = u128::from(rng.next_u64()) * u128::from(bound);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// Choose `n` of `len` positions, returned in ascending order.
fn choose(rng: &mut SplitMix64, len: usize, n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).collect();
    for i in 0..n {
        let j = i + below(rng, (len - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut picked = idx[..n].to_vec();
    picked.sort_unstable();
    picked
}

/// Draw `n` entries per dataset label (or `n` overall when pooled). Output
/// keeps manifest order.
pub fn sample_corpus(
    manifest: &CorpusManifest,
    n: usize,
    seed: u64,
    mode: SamplingMode,
) -> Result<CorpusManifest, SampleError> {
    if n == 0 {
        return Err(SampleError::Zero);
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut keep = vec![false; manifest.entries.len()];
    match mode {
        SamplingMode::Pooled => {
            let size = manifest.entries.len();
            if n > size {
                return Err(SampleError::TooLargePooled { n, size });
            }
            for i in choose(&mut rng, size, n) {
                keep[i] = true;
            }
        }
        SamplingMode::Stratified => {
            let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, e) in manifest.entries.iter().enumerate() {
                groups.entry(e.dataset.as_str()).or_default().push(i);
            }
            if let Some((dataset, members)) = groups.iter().find(|(_, m)| m.len() < n) {
                return Err(SampleError::TooLarge {
                    n,
                    dataset: dataset.to_string(),
                    size: members.len(),
                });
            }
            for members in groups.values() {
                for i in choose(&mut rng, members.len(), n) {
                    keep[members[i]] = true;
                }
            }
        }
    }
    Ok(CorpusManifest {
        entries: manifest
            .entries
            .iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(e, _)| e.clone())
            .collect(),
        source: manifest.source.clone(),
    })
}
