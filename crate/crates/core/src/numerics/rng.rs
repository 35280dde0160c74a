use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Reproducible random stream keyed by `(master_seed, stream_id)`.
///
/// Backed by the ChaCha8 block function: the master seed fixes the key and
/// the stream id selects an independent 64-bit nonce, so each stream is a
/// pure counter-based sequence. Replicate `r` of a study always sees the
/// same numbers regardless of which thread runs it or in which order.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            inner,
            spare_normal: None,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw strictly inside (0, 1), on the 2^-53 grid offset by half a step.
    pub fn draw_uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    /// Standard normal draw by the Box-Muller transform; the second variate
    /// of each pair is cached and returned by the next call.
    pub fn draw_std_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.draw_uniform();
        let u2 = self.draw_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// Derives a child seed from a master seed and an index with the SplitMix64
/// finalizer. Used to give each replicate's MCMC run its own key.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z =
        master_seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
