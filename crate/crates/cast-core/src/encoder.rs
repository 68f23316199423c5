//! Grant encoding: channel-aware support selection, symbol mapping, and the
//! combinatorial index carried by the choice of support.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
#[allow(unused_imports)] // needed when no std-linked dependency is in the graph
use num_traits::Float;
use rand::Rng;

use crate::spectrum::{orthogonal_index_set, SensingDims, SparseFreqVector, SupportSet};
use crate::{CastError, Cf64, Result};

/// Constellation used on the active subcarriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Qpsk,
}

impl Modulation {
    #[inline]
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
        }
    }
}

/// How the active subcarriers are picked inside the orthogonal candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Anchor on the strongest subcarrier, keep the `k` strongest candidates.
    ChannelAware,
    /// Uniformly random anchor and candidates, ignoring channel state.
    Random,
}

/// Per-subcarrier symbol amplitude for average receive SNR `alpha` (linear)
/// with unit noise power: `beta = sqrt(2 m alpha / k)`.
#[inline]
pub fn symbol_amplitude(dims: SensingDims, k: usize, snr_linear: f64) -> f64 {
    (2.0 * dims.m() as f64 * snr_linear / k as f64).sqrt()
}

/// Gray-coded unit-energy QPSK point for a bit pair: the first bit sets the
/// sign of the real part, the second the sign of the imaginary part, so
/// adjacent points differ in one bit.
#[inline]
pub fn qpsk_point(b0: bool, b1: bool) -> Cf64 {
    let re = if b0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let im = if b1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Cf64::new(re, im)
}

/// Bits carried by one grant: `k` QPSK symbols' worth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrantPayload {
    bits: Vec<bool>,
}

impl GrantPayload {
    pub fn new(bits: Vec<bool>, k: usize, modulation: Modulation) -> Result<Self> {
        if bits.len() != k * modulation.bits_per_symbol() {
            return Err(CastError::DimensionMismatch {
                what: "payload bits",
                left: bits.len(),
                right: k * modulation.bits_per_symbol(),
            });
        }
        Ok(GrantPayload { bits })
    }

    pub fn random<R: Rng + ?Sized>(k: usize, modulation: Modulation, rng: &mut R) -> Self {
        GrantPayload {
            bits: (0..k * modulation.bits_per_symbol()).map(|_| rng.gen::<bool>()).collect(),
        }
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Channel-aware rule: keep the `k` members of the system orthogonal grid
/// with the largest believed gains (lowest index on ties).
pub fn select_support(dims: SensingDims, gains: &[Cf64], k: usize) -> Result<SupportSet> {
    if gains.len() != dims.n() {
        return Err(CastError::DimensionMismatch {
            what: "gains length",
            left: gains.len(),
            right: dims.n(),
        });
    }
    if k == 0 {
        return Err(CastError::InvalidArgument("sparsity k must be >= 1"));
    }
    // The candidate set is the system-wide orthogonal grid (anchored at
    // subcarrier 1) so that the base station and every device agree on it
    // without exchanging the anchor.
    let gamma = orthogonal_index_set(dims, 1)?;
    if gamma.len() < k {
        return Err(CastError::SparsityTooLarge { k, available: gamma.len() });
    }
    let mut ranked: Vec<usize> = gamma.indices().to_vec();
    // stable sort keeps the lowest index on magnitude ties
    ranked.sort_by(|&a, &b| {
        gains[b - 1]
            .norm_sqr()
            .partial_cmp(&gains[a - 1].norm_sqr())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    ranked.truncate(k);
    SupportSet::new(ranked)
}

/// Channel-agnostic baseline: `k` subcarriers drawn uniformly from a
/// uniformly anchored orthogonal grid, so the support can land anywhere
/// among the `n` subcarriers but keeps the grid spacing the decoder expects.
pub fn select_support_random<R: Rng + ?Sized>(
    dims: SensingDims,
    k: usize,
    rng: &mut R,
) -> Result<SupportSet> {
    if k == 0 {
        return Err(CastError::InvalidArgument("sparsity k must be >= 1"));
    }
    // A uniformly random anchor places the grid anywhere among the n
    // subcarriers; the support is then k grid members chosen uniformly,
    // ignoring the channel state.
    let anchor = rng.gen_range(1..=dims.n());
    let gamma = orthogonal_index_set(dims, anchor)?;
    if k > gamma.len() {
        return Err(CastError::SparsityTooLarge { k, available: gamma.len() });
    }
    // Floyd's algorithm: uniform over combinations of grid positions
    let len = gamma.len();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for j in (len - k + 1)..=len {
        let t = rng.gen_range(1..=j);
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    let members = gamma.indices();
    SupportSet::new(chosen.into_iter().map(|pos| members[pos - 1]).collect())
}

/// Maps the payload onto the (sorted) support with amplitude `beta`.
pub fn map_bits_to_symbols(
    payload: &GrantPayload,
    k: usize,
    modulation: Modulation,
    beta: f64,
) -> Result<Vec<Cf64>> {
    if payload.bits().len() != k * modulation.bits_per_symbol() {
        return Err(CastError::DimensionMismatch {
            what: "payload bits",
            left: payload.bits().len(),
            right: k * modulation.bits_per_symbol(),
        });
    }
    Ok(match modulation {
        Modulation::Qpsk => payload
            .bits()
            .chunks(2)
            .map(|b| qpsk_point(b[0], b[1]) * beta)
            .collect(),
    })
}

/// Assembles the sparse frequency-domain grant vector.
pub fn build_grant_vector(
    dims: SensingDims,
    support: &SupportSet,
    payload: &GrantPayload,
    modulation: Modulation,
    beta: f64,
) -> Result<SparseFreqVector> {
    let symbols = map_bits_to_symbols(payload, support.len(), modulation, beta)?;
    SparseFreqVector::new(dims.n(), support.clone(), symbols)
}

/// Binomial coefficient in u128, saturating on overflow.
fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Colexicographic rank of a support among all size-k subsets of `[1..n]`:
/// with 0-based positions `c_j = w_j - 1`, the rank is `sum_j C(c_j, j)`.
pub fn support_rank(support: &SupportSet) -> u128 {
    support
        .iter()
        .enumerate()
        .map(|(j, w)| binom((w - 1) as u128, j as u128 + 1))
        .sum()
}

/// Inverse of [`support_rank`]: recovers the size-`k` subset of `[1..n]`
/// with the given colexicographic rank.
pub fn support_unrank(mut rank: u128, k: usize, n: usize) -> Result<SupportSet> {
    if binom(n as u128, k as u128) <= rank {
        return Err(CastError::IndexOutOfRange {
            what: "combination rank",
            value: rank as usize,
            limit: binom(n as u128, k as u128) as usize,
        });
    }
    let mut out = alloc::vec![0usize; k];
    let mut c = n;
    for j in (1..=k).rev() {
        // largest c with C(c, j) <= rank
        while binom(c as u128, j as u128) > rank {
            c -= 1;
        }
        out[j - 1] = c + 1;
        rank -= binom(c as u128, j as u128);
    }
    SupportSet::new(out)
}
