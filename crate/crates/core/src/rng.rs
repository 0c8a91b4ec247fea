//! Seeded random streams and the uniform/normal primitives every kernel uses.
//!
//! All randomness is drawn from 64-bit words through the helpers here, so a
//! kernel's consumption of the stream is fully determined by its code path.

use std::collections::VecDeque;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type ChainRng = ChaCha8Rng;

/// Named sub-streams derived from a single experiment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Data = 1,
    Shuffle = 2,
    Tuning = 3,
    BurnIn = 4,
    Chain = 5,
    Batch = 6,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChainRng {
    indexed_rng(seed, stream, 0)
}

/// Independent stream `index` within a named sub-stream.
pub fn indexed_rng(seed: u64, stream: Stream, index: u64) -> ChainRng {
    let mut rng = ChainRng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) | (index & 0xFFFF_FFFF_FFFF));
    rng
}

const TWO_POW_M52: f64 = 1.0 / (1u64 << 52) as f64;

/// Uniform draw on the open interval (0, 1); consumes one 64-bit word.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * TWO_POW_M52
}

#[inline]
pub fn uniform_in<R: RngCore + ?Sized>(rng: &mut R, l: f64, r: f64) -> f64 {
    l + (r - l) * uniform(rng)
}

#[inline]
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn standard_normal_vec<R: RngCore + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| standard_normal(rng)).collect()
}

/// The 64-bit word that [`uniform`] maps to `u` (to within 2^-52).
pub fn word_for_uniform(u: f64) -> u64 {
    assert!(u > 0.0 && u < 1.0, "scripted uniform must lie in (0, 1)");
    let k = (u / TWO_POW_M52 - 0.5)
        .round()
        .clamp(0.0, ((1u64 << 52) - 1) as f64) as u64;
    k << 12
}

/// A generator that replays a fixed script of words and then falls back to
/// a seeded stream (or panics if none was given).
#[derive(Debug, Clone)]
pub struct ScriptedRng {
    script: VecDeque<u64>,
    fallback: Option<ChainRng>,
}

impl ScriptedRng {
    pub fn from_words(words: impl IntoIterator<Item = u64>) -> Self {
        Self {
            script: words.into_iter().collect(),
            fallback: None,
        }
    }

    pub fn from_uniforms(us: &[f64]) -> Self {
        Self::from_words(us.iter().map(|&u| word_for_uniform(u)))
    }

    pub fn with_fallback(mut self, seed: u64) -> Self {
        self.fallback = Some(ChainRng::seed_from_u64(seed));
        self
    }

    pub fn remaining(&self) -> usize {
        self.script.len()
    }
}

impl RngCore for ScriptedRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        if let Some(w) = self.script.pop_front() {
            return w;
        }
        match self.fallback.as_mut() {
            Some(rng) => rng.next_u64(),
            None => panic!("scripted rng exhausted"),
        }
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let w = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&w[..chunk.len()]);
        }
    }
}
