//! Analytic lower bounds on the decoding success probability: the
//! first-iteration integral bound, the second-iteration noncentral-F bound,
//! and their channel-averaged product.

#[allow(unused_imports)] // needed when no std-linked dependency is in the graph
use num_traits::Float;
use rand::Rng;

use crate::channel::{sample_channel, ChannelRealization};
use crate::encoder::{select_support, symbol_amplitude};
use crate::quad::integrate;
use crate::special::{noncentral_f_cdf, reg_lower_gamma};
use crate::spectrum::{correlation_upper_bound, SensingDims, SupportSet};
use crate::{CastError, Result};

/// Which pairs enter the correlation sum of the first-iteration bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhoConvention {
    /// Sum over the k-1 support elements other than the matched index.
    #[default]
    ExcludeMatched,
    /// Literal k-term sum: the matched index contributes a first-interval
    /// term.
    IncludeMatched,
}

/// Power of the symbol amplitude in the noncentrality parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZetaConvention {
    /// `zeta = beta |h|^2`, as stated.
    #[default]
    BetaFirstPower,
    /// `zeta = beta^2 |h|^2`, the dimensionally conventional variant.
    BetaSquared,
}

/// Density used for the maximum channel magnitude inside the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxGainPdf {
    /// `N r e^{-r^2/2} (1 - e^{-r^2/2})^{N-1}`: per-entry power 2.
    #[default]
    VarianceTwo,
    /// `2 N r e^{-r^2} (1 - e^{-r^2})^{N-1}`: per-entry power 1, matching
    /// the link simulation.
    UnitPower,
}

/// Convention switches for the bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundConventions {
    pub rho: RhoConvention,
    pub zeta: ZetaConvention,
    pub pdf: MaxGainPdf,
}

/// Monte Carlo estimate of a channel-averaged bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    pub mean: f64,
    pub se: f64,
}

/// Correlation-sum parameter for a support anchored at `anchor`: each
/// counted element contributes the interval upper bound of its circular
/// distance from the anchor.
pub fn rho_of_support(
    anchor: usize,
    support: &SupportSet,
    dims: SensingDims,
    convention: RhoConvention,
) -> Result<f64> {
    if !support.contains(anchor) {
        return Err(CastError::InvalidArgument("anchor must belong to the support"));
    }
    let mut rho = 0.0;
    for w in support.iter() {
        if w == anchor {
            if convention == RhoConvention::IncludeMatched {
                rho += crate::spectrum::bound_term(dims.m(), 0);
            }
            continue;
        }
        rho += correlation_upper_bound(dims, w as i64 - anchor as i64)?;
    }
    Ok(rho)
}

fn max_gain_pdf(n: usize, r: f64, pdf: MaxGainPdf) -> f64 {
    let nf = n as f64;
    match pdf {
        MaxGainPdf::VarianceTwo => {
            let e = (-r * r / 2.0).exp();
            nf * r * e * (1.0 - e).powi(n as i32 - 1)
        }
        MaxGainPdf::UnitPower => {
            let e = (-r * r).exp();
            2.0 * nf * r * e * (1.0 - e).powi(n as i32 - 1)
        }
    }
}

/// Upper integration limit: the max-gain tail mass beyond it is below 1e-12.
fn r_max(n: usize, pdf: MaxGainPdf) -> f64 {
    // P(max > r) <= n e^{-r^2 / s} with s = 2 (variance-two) or 1
    let s = match pdf {
        MaxGainPdf::VarianceTwo => 2.0,
        MaxGainPdf::UnitPower => 1.0,
    };
    (s * ((n as f64) / 1e-12).ln()).sqrt()
}

/// First-iteration bound: the probability that the noise ball stays inside
/// the correlation margin, averaged over the maximum channel gain.
pub fn p1_lower_bound(
    dims: SensingDims,
    k: usize,
    alpha: f64,
    rho: f64,
    pdf: MaxGainPdf,
) -> Result<f64> {
    if k == 0 {
        return Err(CastError::InvalidArgument("sparsity k must be >= 1"));
    }
    if !(alpha > 0.0) || rho < 0.0 {
        return Err(CastError::InvalidArgument("need alpha > 0 and rho >= 0"));
    }
    if rho >= 1.0 {
        return Ok(0.0);
    }
    let m = dims.m();
    let c = alpha * m as f64 / (2.0 * k as f64) * (1.0 - rho) * (1.0 - rho);
    let n = dims.n();
    let upper = r_max(n, pdf);
    let value = integrate(
        |r| {
            let g = reg_lower_gamma(m as f64, c * r * r).unwrap_or(0.0);
            g * max_gain_pdf(n, r, pdf)
        },
        0.0,
        upper,
        1e-10,
    )?;
    Ok(value.clamp(0.0, 1.0))
}

/// Second-iteration bound `[1 - F(1 | 2, 2, zeta)]^{(k-1)(m-k)}`.
pub fn p2_lower_bound(k: usize, m: usize, zeta: f64) -> Result<f64> {
    if k == 0 || m <= k {
        return Err(CastError::InvalidArgument("need m > k >= 1"));
    }
    if k == 1 {
        return Ok(1.0);
    }
    let f = noncentral_f_cdf(1.0, 2.0, 2.0, zeta)?;
    Ok((1.0 - f).powi(((k - 1) * (m - k)) as i32))
}

/// Noncentrality parameter from the weakest counted support gain.
pub fn zeta_of_channel(beta: f64, min_gain_sq: f64, convention: ZetaConvention) -> f64 {
    match convention {
        ZetaConvention::BetaFirstPower => beta * min_gain_sq,
        ZetaConvention::BetaSquared => beta * beta * min_gain_sq,
    }
}

/// Bound value for one channel realization: the support is selected exactly
/// as the encoder would, then rho and zeta are read off the realization.
pub fn bound_for_channel(
    dims: SensingDims,
    k: usize,
    alpha: f64,
    conv: BoundConventions,
    ch: &ChannelRealization,
) -> Result<f64> {
    let support = select_support(dims, ch.gains(), k)?;
    let anchor = support
        .iter()
        .max_by(|&a, &b| {
            ch.gain(a).norm_sqr().partial_cmp(&ch.gain(b).norm_sqr()).unwrap()
        })
        .expect("support is non-empty");
    let rho = rho_of_support(anchor, &support, dims, conv.rho)?;
    let p1 = p1_lower_bound(dims, k, alpha, rho, conv.pdf)?;
    if k == 1 {
        return Ok(p1);
    }
    let beta = symbol_amplitude(dims, k, alpha);
    let min_gain_sq = support
        .iter()
        .filter(|&w| w != anchor)
        .map(|w| ch.gain(w).norm_sqr())
        .fold(f64::INFINITY, f64::min);
    let p2 = p2_lower_bound(k, dims.m(), zeta_of_channel(beta, min_gain_sq, conv.zeta))?;
    Ok(p1 * p2)
}

/// Channel-averaged bound from an explicit realization source.
pub fn total_bound_with<F>(
    dims: SensingDims,
    k: usize,
    alpha: f64,
    conv: BoundConventions,
    trials: usize,
    mut sampler: F,
) -> Result<BoundEstimate>
where
    F: FnMut() -> ChannelRealization,
{
    if trials == 0 {
        return Err(CastError::InvalidArgument("bound averaging needs trials >= 1"));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let v = bound_for_channel(dims, k, alpha, conv, &sampler())?;
        sum += v;
        sum_sq += v * v;
    }
    let t = trials as f64;
    let mean = sum / t;
    let var = ((sum_sq - sum * sum / t) / (t - 1.0).max(1.0)).max(0.0);
    Ok(BoundEstimate { mean, se: (var / t).sqrt() })
}

/// Channel-averaged bound over i.i.d. Rayleigh realizations.
pub fn total_bound<R: Rng + ?Sized>(
    dims: SensingDims,
    k: usize,
    alpha: f64,
    conv: BoundConventions,
    trials: usize,
    rng: &mut R,
) -> Result<BoundEstimate> {
    total_bound_with(dims, k, alpha, conv, trials, || sample_channel(dims.n(), rng))
}
