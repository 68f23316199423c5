//! Rayleigh fading channel generation, the sparse transmit path, and
//! imperfect channel knowledge (estimation error, reciprocity mismatch).

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // needed when no std-linked dependency is in the graph
use num_traits::Float;
use rand::Rng;

use crate::spectrum::{idft_column, SensingDims, SparseFreqVector};
use crate::{CastError, Cf64, Result};

/// First `m` time-domain received samples.
pub type MeasurementVector = Vec<Cf64>;

/// Per-sample complex noise power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub variance: f64,
}

impl NoiseSpec {
    pub fn new(variance: f64) -> Result<Self> {
        if variance < 0.0 || !variance.is_finite() {
            return Err(CastError::InvalidArgument("noise variance must be >= 0"));
        }
        Ok(NoiseSpec { variance })
    }

    pub const NOISELESS: NoiseSpec = NoiseSpec { variance: 0.0 };
}

/// Frequency-domain channel gains (diagonal of the circulant channel's
/// eigenvalue matrix), unit average power per subcarrier, plus an optional
/// noisy estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: Vec<Cf64>,
    estimate: Option<Vec<Cf64>>,
}

impl ChannelRealization {
    pub fn from_gains(h: Vec<Cf64>) -> Self {
        ChannelRealization { h, estimate: None }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.h.len()
    }

    #[inline]
    pub fn gains(&self) -> &[Cf64] {
        &self.h
    }

    /// Gain of subcarrier `idx` (1-based).
    #[inline]
    pub fn gain(&self, idx: usize) -> Cf64 {
        self.h[idx - 1]
    }

    #[inline]
    pub fn estimate(&self) -> Option<&[Cf64]> {
        self.estimate.as_deref()
    }

    /// The gains the receiver believes: the estimate when present, else the
    /// true gains.
    #[inline]
    pub fn view(&self) -> &[Cf64] {
        self.estimate.as_deref().unwrap_or(&self.h)
    }
}

/// One draw of a standard circularly-symmetric complex Gaussian,
/// `CN(0, 1)`, via Box-Muller.
#[inline]
pub fn sample_cn01<R: Rng + ?Sized>(rng: &mut R) -> Cf64 {
    // open interval (0,1] to keep ln finite
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-u1.ln()).sqrt(); // magnitude for variance-1 complex sample
    let ang = 2.0 * PI * u2;
    Cf64::new(r * ang.cos(), r * ang.sin())
}

/// i.i.d. Rayleigh fading: each gain is `CN(0, 1)` so `E|h_i|^2 = 1`.
pub fn sample_channel<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ChannelRealization {
    ChannelRealization::from_gains((0..n).map(|_| sample_cn01(rng)).collect())
}

/// Applies the channel and noise to a sparse grant vector and keeps the first
/// `m` time-domain samples: `y~ = sum_{w in support} a_w h_w s_w + v~`.
pub fn transmit<R: Rng + ?Sized>(
    grant: &SparseFreqVector,
    ch: &ChannelRealization,
    noise: NoiseSpec,
    dims: SensingDims,
    rng: &mut R,
) -> Result<MeasurementVector> {
    if grant.n() != ch.n() || grant.n() != dims.n() {
        return Err(CastError::DimensionMismatch {
            what: "transmit grant/channel/dims",
            left: grant.n(),
            right: ch.n().min(dims.n()),
        });
    }
    let m = dims.m();
    let mut y = alloc::vec![Cf64::new(0.0, 0.0); m];
    for (idx, s) in grant.entries() {
        let x = ch.gain(idx) * s;
        let col = idft_column(dims, idx)?;
        for (yl, al) in y.iter_mut().zip(col) {
            *yl += al * x;
        }
    }
    if noise.variance > 0.0 {
        let sigma = noise.variance.sqrt();
        for yl in y.iter_mut() {
            *yl += sample_cn01(rng) * sigma;
        }
    }
    Ok(y)
}

/// Attaches a noisy estimate `h^ = h + e`, `e ~ CN(0, error_variance)`.
/// The true gains are untouched.
pub fn degrade_estimate<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    error_variance: f64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if error_variance < 0.0 {
        return Err(CastError::InvalidArgument("error variance must be >= 0"));
    }
    let sigma = error_variance.sqrt();
    let estimate = ch
        .h
        .iter()
        .map(|&g| if sigma > 0.0 { g + sample_cn01(rng) * sigma } else { g })
        .collect();
    Ok(ChannelRealization { h: ch.h.clone(), estimate: Some(estimate) })
}

/// Base-station-side channel view under imperfect reciprocity: the true
/// gains are replaced by `h + e`, `e ~ CN(0, mismatch_variance)`.
pub fn reciprocity_perturb<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    mismatch_variance: f64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if mismatch_variance < 0.0 {
        return Err(CastError::InvalidArgument("mismatch variance must be >= 0"));
    }
    let sigma = mismatch_variance.sqrt();
    let h = ch
        .h
        .iter()
        .map(|&g| if sigma > 0.0 { g + sample_cn01(rng) * sigma } else { g })
        .collect();
    Ok(ChannelRealization { h, estimate: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SupportSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn channel_power_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut acc = 0.0;
        let trials = 1_000_000 / 64;
        for _ in 0..trials {
            let ch = sample_channel(64, &mut rng);
            acc += ch.gains().iter().map(|g| g.norm_sqr()).sum::<f64>();
        }
        let mean = acc / (trials * 64) as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean power {mean}");
    }

    #[test]
    fn max_gain_cdf_matches_closed_form() {
        // P(max |h_i| <= r) = (1 - exp(-r^2))^n for unit-power entries
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 64;
        let r = 2.0f64;
        let trials = 20_000;
        let mut below = 0usize;
        for _ in 0..trials {
            let ch = sample_channel(n, &mut rng);
            let max = ch.gains().iter().map(|g| g.norm()).fold(0.0, f64::max);
            if max <= r {
                below += 1;
            }
        }
        let empirical = below as f64 / trials as f64;
        let closed = (1.0 - (-r * r).exp()).powi(n as i32);
        assert!((empirical - closed).abs() < 0.01, "{empirical} vs {closed}");
    }

    #[test]
    fn same_seed_same_channel() {
        let a = sample_channel(128, &mut ChaCha8Rng::seed_from_u64(7));
        let b = sample_channel(128, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }

    #[test]
    fn single_tone_noiseless_transmit() {
        let dims = SensingDims::new(16, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = sample_channel(16, &mut rng);
        let grant = SparseFreqVector::new(
            16,
            SupportSet::new(alloc::vec![5]).unwrap(),
            alloc::vec![Cf64::new(1.0, 0.0)],
        )
        .unwrap();
        let y = transmit(&grant, &ch, NoiseSpec::NOISELESS, dims, &mut rng).unwrap();
        let col = idft_column(dims, 5).unwrap();
        for (yl, al) in y.iter().zip(col) {
            assert!((yl - al * ch.gain(5)).norm() < 1e-12);
        }
    }

    #[test]
    fn sparse_transmit_matches_dense_pipeline() {
        // dense oracle: full n-point inverse transform of the channel-scaled
        // grant vector, truncated to the first m rows
        let dims = SensingDims::new(256, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = sample_channel(256, &mut rng);
        let support = SupportSet::new(alloc::vec![2, 17, 100, 255]).unwrap();
        let values: Vec<Cf64> = (0..4).map(|_| sample_cn01(&mut rng)).collect();
        let grant = SparseFreqVector::new(256, support, values).unwrap();

        let y = transmit(&grant, &ch, NoiseSpec::NOISELESS, dims, &mut rng).unwrap();

        let x: Vec<Cf64> = grant
            .to_dense()
            .iter()
            .zip(ch.gains())
            .map(|(s, h)| s * h)
            .collect();
        let scale = 1.0 / (dims.m() as f64).sqrt();
        for l in 0..dims.m() {
            let mut acc = Cf64::new(0.0, 0.0);
            for (w, xv) in x.iter().enumerate() {
                let ang = 2.0 * PI * (w * l) as f64 / 256.0;
                acc += xv * Cf64::new(ang.cos(), ang.sin());
            }
            assert!((y[l] - acc * scale).norm() < 1e-10);
        }
    }

    #[test]
    fn noise_power_accounting() {
        let dims = SensingDims::new(64, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = sample_channel(64, &mut rng);
        let grant =
            SparseFreqVector::new(64, SupportSet::empty(), Vec::new()).unwrap();
        let noise = NoiseSpec::new(0.7).unwrap();
        let trials = 20_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let y = transmit(&grant, &ch, noise, dims, &mut rng).unwrap();
            acc += y.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let mean = acc / (trials * dims.m()) as f64;
        assert!((mean - 0.7).abs() < 0.014, "noise power {mean}");
    }

    #[test]
    fn estimate_error_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ch = sample_channel(1024, &mut rng);
        let perfect = degrade_estimate(&ch, 0.0, &mut rng).unwrap();
        assert_eq!(perfect.estimate().unwrap(), ch.gains());

        let var = 0.25;
        let mut acc = 0.0;
        let reps = 100;
        for _ in 0..reps {
            let noisy = degrade_estimate(&ch, var, &mut rng).unwrap();
            acc += noisy
                .estimate()
                .unwrap()
                .iter()
                .zip(ch.gains())
                .map(|(e, h)| (e - h).norm_sqr())
                .sum::<f64>();
        }
        let mean = acc / (reps * 1024) as f64;
        assert!((mean - var).abs() / var < 0.02, "estimate error power {mean}");
        // original untouched
        let noisy = degrade_estimate(&ch, var, &mut rng).unwrap();
        assert_eq!(noisy.gains(), ch.gains());
    }
}
