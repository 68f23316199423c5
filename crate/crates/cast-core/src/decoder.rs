//! Two-iteration greedy support identification with tau-close acceptance,
//! least-squares symbol estimation, and slicing.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // needed when no std-linked dependency is in the graph
use num_traits::Float;

use crate::channel::ChannelRealization;
use crate::encoder::Modulation;
use crate::fft::dft_zero_padded;
use crate::spectrum::{orthogonal_index_set, SensingDims, SupportSet};
use crate::{CastError, Cf64, Result};

/// Device-side decoding verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    /// Support matched the device's own and symbols were recovered.
    Granted,
    /// The identified support is not tau-close to the device's own support;
    /// either the grant targets another device or identification failed —
    /// the two are indistinguishable at the device.
    NotGranted,
    /// Internal diagnostics: no coherent support could be formed.
    IdentificationFailed,
    /// Support matched but symbol estimation was degenerate.
    SymbolError,
}

/// Output of the full decoding pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    pub decoded_support: SupportSet,
    pub decoded_bits: Option<Vec<bool>>,
}

#[inline]
fn correlation_direct(dims: SensingDims, y: &[Cf64], omega: usize) -> Cf64 {
    let n = dims.n() as f64;
    let scale = 1.0 / (dims.m() as f64).sqrt();
    let mut acc = Cf64::new(0.0, 0.0);
    for (l, &yl) in y.iter().enumerate() {
        let ang = -2.0 * PI * ((omega - 1) * l) as f64 / n;
        acc += yl * Cf64::new(ang.cos(), ang.sin());
    }
    acc * scale
}

/// Correlation magnitudes `|<a_w, y>|` for each candidate, by direct
/// evaluation.
pub fn matched_filter(
    y: &[Cf64],
    dims: SensingDims,
    candidates: &[usize],
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(CastError::InvalidArgument("candidate set must be non-empty"));
    }
    if y.len() != dims.m() {
        return Err(CastError::DimensionMismatch {
            what: "measurement length",
            left: y.len(),
            right: dims.m(),
        });
    }
    for &w in candidates {
        if w < 1 || w > dims.n() {
            return Err(CastError::IndexOutOfRange {
                what: "candidate index",
                value: w,
                limit: dims.n(),
            });
        }
    }
    Ok(candidates
        .iter()
        .map(|&w| correlation_direct(dims, y, w).norm())
        .collect())
}

/// Correlation magnitudes against every subcarrier; uses a length-n
/// transform of the zero-padded measurement when n is a power of two.
pub fn matched_filter_sweep(y: &[Cf64], dims: SensingDims) -> Result<Vec<f64>> {
    if y.len() != dims.m() {
        return Err(CastError::DimensionMismatch {
            what: "measurement length",
            left: y.len(),
            right: dims.m(),
        });
    }
    let scale = 1.0 / (dims.m() as f64).sqrt();
    if dims.n().is_power_of_two() {
        Ok(dft_zero_padded(y, dims.n())
            .into_iter()
            .map(|c| c.norm() * scale)
            .collect())
    } else {
        Ok((1..=dims.n())
            .map(|w| correlation_direct(dims, y, w).norm())
            .collect())
    }
}

#[inline]
fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Sum of the `k` largest squared magnitudes over the orthogonal set
/// anchored at `anchor`, with the weakest counted energy and the strongest
/// member index.
fn coset_energy(
    full: &[f64],
    dims: SensingDims,
    anchor: usize,
    k: usize,
) -> Result<(f64, f64, usize)> {
    let members = orthogonal_index_set(dims, anchor)?;
    let mut mags: Vec<(f64, usize)> =
        members.iter().map(|g| (full[g - 1] * full[g - 1], g)).collect();
    mags.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    let energy = mags.iter().take(k).map(|&(e, _)| e).sum();
    Ok((energy, mags[k - 1].0, mags[0].1))
}

/// Required advantage of the weakest counted member over the median bin
/// energy before a one-bin re-anchoring is trusted; see
/// [`identify_support_traced`].
const REANCHOR_CONFIDENCE: f64 = 150.0;

/// Two-iteration greedy identification: the strongest correlation over all
/// subcarriers anchors the candidate set; the `k-1` strongest candidates
/// complete the support. Also reports the number of correlation sweeps.
///
/// When two occupied members of the same orthogonal set are adjacent, their
/// half-spacing sidelobes can add up and pull the raw argmax to the midpoint
/// between them, which sits half a spacing off every member of the occupied
/// set. The anchor is therefore checked against the orthogonal set half a
/// spacing away, and re-anchored there when that set carries more energy
/// among its `k` strongest members.
pub fn identify_support_traced(
    y: &[Cf64],
    k: usize,
    dims: SensingDims,
) -> Result<(SupportSet, usize)> {
    if k == 0 {
        return Err(CastError::InvalidArgument("sparsity k must be >= 1"));
    }
    if k > dims.m() {
        return Err(CastError::SparsityTooLarge { k, available: dims.m() });
    }
    let mut sweeps = 0usize;

    let full = matched_filter_sweep(y, dims)?;
    sweeps += 1;
    let mut anchor = argmax_lowest(&full) + 1;
    let half = (dims.n() as f64 / dims.m() as f64 / 2.0).round() as usize;
    if half > 0 && half < dims.n() / dims.m() {
        let n = dims.n();
        // The midpoint shift corrects an argmax captured between two
        // occupied adjacent members, whose half-spacing sidelobes can add
        // up beyond the main-lobe peaks; it is safe at any SNR because the
        // competing set carries almost no energy unless the argmax really
        // sat between members.
        let (own_energy, own_weakest, _) = coset_energy(&full, dims, anchor, k)?;
        let mut best = own_energy;
        let raw = anchor;
        let shifted = (raw - 1 + half) % n + 1;
        let (alt_energy, _, alt_anchor) = coset_energy(&full, dims, shifted, k)?;
        if alt_energy > best {
            best = alt_energy;
            anchor = alt_anchor;
        }
        // A one-bin shift restores the full member margins when the argmax
        // lands on a main-lobe shoulder. Unlike the midpoint case the
        // energy gap is small, so the shift is only trusted when even the
        // weakest counted member stands clearly above the noise floor;
        // otherwise noise-scattered anchors would be silently realigned.
        let mut noise = alloc::vec![0.0f64; n];
        for (i, v) in full.iter().enumerate() {
            noise[i] = v * v;
        }
        noise.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        let floor = noise[n / 2];
        if own_weakest > REANCHOR_CONFIDENCE * floor {
            for shift in [1, n - 1] {
                let shifted = (raw - 1 + shift) % n + 1;
                let (alt_energy, _, alt_anchor) = coset_energy(&full, dims, shifted, k)?;
                if alt_energy > best {
                    best = alt_energy;
                    anchor = alt_anchor;
                }
            }
        }
    }
    if k == 1 {
        return Ok((SupportSet::new(alloc::vec![anchor])?, sweeps));
    }

    let gamma: Vec<usize> = orthogonal_index_set(dims, anchor)?
        .iter()
        .filter(|&g| g != anchor)
        .collect();
    if gamma.len() < k - 1 {
        return Err(CastError::SparsityTooLarge { k, available: gamma.len() + 1 });
    }
    // the candidate magnitudes are read back from the full sweep
    let mags: Vec<f64> = gamma.iter().map(|&g| full[g - 1]).collect();
    sweeps += 1;
    let mut order: Vec<usize> = (0..gamma.len()).collect();
    // stable sort keeps the lowest index on ties
    order.sort_by(|&a, &b| mags[b].partial_cmp(&mags[a]).unwrap_or(core::cmp::Ordering::Equal));

    let mut chosen: Vec<usize> = order[..k - 1].iter().map(|&i| gamma[i]).collect();
    chosen.push(anchor);
    Ok((SupportSet::new(chosen)?, sweeps))
}

/// [`identify_support_traced`] without the sweep counter.
pub fn identify_support(y: &[Cf64], k: usize, dims: SensingDims) -> Result<SupportSet> {
    identify_support_traced(y, k, dims).map(|(s, _)| s)
}

/// Ascending-order pairing with the inclusive window `|w^_i - w_i| <= tau-1`.
pub fn tau_close_match(decoded: &SupportSet, own: &SupportSet, tau: usize) -> Result<bool> {
    if decoded.len() != own.len() {
        return Err(CastError::DimensionMismatch {
            what: "support sizes",
            left: decoded.len(),
            right: own.len(),
        });
    }
    if tau == 0 {
        return Err(CastError::InvalidArgument("tau must be >= 1"));
    }
    Ok(decoded
        .indices()
        .iter()
        .zip(own.indices())
        .all(|(&d, &o)| d.abs_diff(o) < tau))
}

/// Replaces each matched index by the device's own; only valid after a
/// successful [`tau_close_match`].
pub fn snap_support(decoded: &SupportSet, own: &SupportSet, tau: usize) -> Result<SupportSet> {
    if !tau_close_match(decoded, own, tau)? {
        return Err(CastError::InvalidArgument("snap requires a tau-close match"));
    }
    Ok(own.clone())
}

/// Solves the k x k complex system `M u = b` in place by Gaussian
/// elimination with partial pivoting.
fn solve_dense(m: &mut [Vec<Cf64>], b: &mut [Cf64]) -> Result<()> {
    let k = b.len();
    for col in 0..k {
        let mut piv = col;
        for row in (col + 1)..k {
            if m[row][col].norm_sqr() > m[piv][col].norm_sqr() {
                piv = row;
            }
        }
        if m[piv][col].norm_sqr() < 1e-24 {
            return Err(CastError::RankDeficient);
        }
        m.swap(col, piv);
        b.swap(col, piv);
        let inv = Cf64::new(1.0, 0.0) / m[col][col];
        for row in (col + 1)..k {
            let factor = m[row][col] * inv;
            for c in col..k {
                let sub = factor * m[col][c];
                m[row][c] -= sub;
            }
            let sub = factor * b[col];
            b[row] -= sub;
        }
    }
    for col in (0..k).rev() {
        let mut acc = b[col];
        for c in (col + 1)..k {
            acc -= m[col][c] * b[c];
        }
        b[col] = acc / m[col][col];
    }
    Ok(())
}

/// Optional ridge term for LMMSE-style estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmmsePrior {
    pub noise_variance: f64,
    pub symbol_power: f64,
}

/// Least-squares symbol estimation on the overdetermined m x k system
/// `y ~= A_W Lambda_W u`, via the normal equations. With a prior, the
/// diagonal is regularized by `noise_variance / symbol_power`.
pub fn estimate_symbols(
    y: &[Cf64],
    support: &SupportSet,
    ch_view: &ChannelRealization,
    dims: SensingDims,
    prior: Option<LmmsePrior>,
) -> Result<Vec<Cf64>> {
    let k = support.len();
    if k == 0 || k >= dims.m() {
        return Err(CastError::InvalidArgument("need 0 < k < m for estimation"));
    }
    if y.len() != dims.m() || ch_view.n() != dims.n() {
        return Err(CastError::DimensionMismatch {
            what: "estimation inputs",
            left: y.len(),
            right: dims.m(),
        });
    }
    let gains = ch_view.view();
    // columns b_j = a_{w_j} h_{w_j}
    let cols: Vec<Vec<Cf64>> = support
        .iter()
        .map(|w| {
            let h = gains[w - 1];
            crate::spectrum::idft_column(dims, w).map(|c| c.into_iter().map(|a| a * h).collect())
        })
        .collect::<Result<_>>()?;

    let ridge = prior
        .map(|p| {
            if p.symbol_power <= 0.0 {
                return Err(CastError::InvalidArgument("symbol power must be > 0"));
            }
            Ok(p.noise_variance / p.symbol_power)
        })
        .transpose()?
        .unwrap_or(0.0);

    // normal equations: (B^H B + ridge I) u = B^H y
    let mut gram = alloc::vec![alloc::vec![Cf64::new(0.0, 0.0); k]; k];
    let mut rhs = alloc::vec![Cf64::new(0.0, 0.0); k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
        }
        gram[i][i] += ridge;
        rhs[i] = cols[i].iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    }
    solve_dense(&mut gram, &mut rhs)?;
    Ok(rhs)
}

/// Nearest-constellation decision per symbol; ties on an axis go to the
/// positive half-plane.
pub fn slice_symbols(symbols: &[Cf64], modulation: Modulation) -> Vec<bool> {
    match modulation {
        Modulation::Qpsk => symbols
            .iter()
            .flat_map(|s| [s.re < 0.0, s.im < 0.0])
            .collect(),
    }
}

/// Full device-side pipeline: identify, tau-close check against the
/// device's own support, snap, estimate, slice.
pub fn decode(
    y: &[Cf64],
    own_support: &SupportSet,
    ch_view: &ChannelRealization,
    dims: SensingDims,
    tau: usize,
    modulation: Modulation,
) -> Result<DecodeOutcome> {
    let k = own_support.len();
    if k == 0 {
        return Err(CastError::InvalidArgument("own support must be non-empty"));
    }
    let decoded = identify_support(y, k, dims)?;
    if !tau_close_match(&decoded, own_support, tau)? {
        return Ok(DecodeOutcome {
            status: DecodeStatus::NotGranted,
            decoded_support: decoded,
            decoded_bits: None,
        });
    }
    let snapped = snap_support(&decoded, own_support, tau)?;
    match estimate_symbols(y, &snapped, ch_view, dims, None) {
        Ok(symbols) => Ok(DecodeOutcome {
            status: DecodeStatus::Granted,
            decoded_support: snapped,
            decoded_bits: Some(slice_symbols(&symbols, modulation)),
        }),
        Err(CastError::RankDeficient) => Ok(DecodeOutcome {
            status: DecodeStatus::SymbolError,
            decoded_support: snapped,
            decoded_bits: None,
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, transmit, NoiseSpec};
    use crate::encoder::{
        build_grant_vector, select_support, symbol_amplitude, GrantPayload, Modulation,
    };
    use crate::spectrum::idft_column;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dims(n: usize, m: usize) -> SensingDims {
        SensingDims::new(n, m).unwrap()
    }

    #[test]
    fn matched_filter_unit_column() {
        let d = dims(64, 16);
        let y = idft_column(d, 12).unwrap();
        let all: Vec<usize> = (1..=64).collect();
        let mags = matched_filter(&y, d, &all).unwrap();
        assert!((mags[11] - 1.0).abs() < 1e-12);
        // Outside the main lobe the interval-wise bound caps each sidelobe;
        // inside it (|delta| < n/2m = 2) the correlation may be close to 1.
        for (i, &v) in mags.iter().enumerate() {
            let w = i + 1;
            if w == 12 {
                continue;
            }
            let delta = w as i64 - 12;
            if crate::spectrum::circular_distance(d, delta) + 1e-9 < d.main_lobe() {
                assert!(v <= 1.0 + 1e-12, "candidate {w} leak {v}");
            } else {
                let cap = crate::spectrum::correlation_upper_bound(d, delta).unwrap();
                assert!(v <= cap + 1e-12, "candidate {w} leak {v} cap {cap}");
            }
        }
    }

    #[test]
    fn matched_filter_orthogonal_zeros() {
        let d = dims(16, 4);
        let y = idft_column(d, 5).unwrap();
        let mags = matched_filter(&y, d, &[1, 9, 13]).unwrap();
        for v in mags {
            assert!(v < 1e-12);
        }
    }

    #[test]
    fn sweep_matches_direct() {
        let d = dims(256, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let y: Vec<Cf64> = (0..64).map(|_| crate::channel::sample_cn01(&mut rng)).collect();
        let sweep = matched_filter_sweep(&y, d).unwrap();
        let all: Vec<usize> = (1..=256).collect();
        let direct = matched_filter(&y, d, &all).unwrap();
        for (a, b) in sweep.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn noiseless_exact_recovery() {
        // Exactness needs the unitary geometry m = n: tight sidelobes at
        // m < n occasionally capture the anchor even without noise.
        let d = dims(256, 256);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let beta = symbol_amplitude(d, 4, 1.0);
        for _ in 0..500 {
            let ch = sample_channel(256, &mut rng);
            let support = select_support(d, ch.gains(), 4).unwrap();
            let payload = GrantPayload::random(4, Modulation::Qpsk, &mut rng);
            let grant =
                build_grant_vector(d, &support, &payload, Modulation::Qpsk, beta).unwrap();
            let y = transmit(&grant, &ch, NoiseSpec::NOISELESS, d, &mut rng).unwrap();
            let (found, sweeps) = identify_support_traced(&y, 4, d).unwrap();
            assert_eq!(found, support);
            assert_eq!(sweeps, 2);
        }
    }

    #[test]
    fn k_one_returns_argmax_in_one_sweep() {
        let d = dims(64, 16);
        let y = idft_column(d, 30).unwrap();
        let (s, sweeps) = identify_support_traced(&y, 1, d).unwrap();
        assert_eq!(s.indices(), &[30]);
        assert_eq!(sweeps, 1);
    }

    #[test]
    fn adjacent_leak_lands_on_neighbour() {
        let d = dims(256, 64);
        let a = idft_column(d, 40).unwrap();
        let b = idft_column(d, 41).unwrap();
        let y: Vec<Cf64> = a.iter().zip(&b).map(|(x, z)| x + z * 0.99).collect();
        let sweep = matched_filter_sweep(&y, d).unwrap();
        let anchor = sweep
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0
            + 1;
        assert!(anchor == 40 || anchor == 41, "anchor {anchor}");
    }

    #[test]
    fn inclusion_and_size_invariants() {
        let d = dims(256, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let y: Vec<Cf64> =
                (0..64).map(|_| crate::channel::sample_cn01(&mut rng)).collect();
            let full = matched_filter_sweep(&y, d).unwrap();
            for k in 1..=8 {
                let s = identify_support(&y, k, d).unwrap();
                assert_eq!(s.len(), k);
                // all members share one orthogonal set, and the set's
                // strongest bin is among them (the effective anchor)
                let strongest = *s
                    .indices()
                    .iter()
                    .max_by(|&&a, &&b| full[a - 1].partial_cmp(&full[b - 1]).unwrap())
                    .unwrap();
                let coset = orthogonal_index_set(d, strongest).unwrap();
                for w in s.iter() {
                    assert!(coset.contains(w), "member {w} outside the coset");
                }
                let top = coset
                    .iter()
                    .max_by(|&a, &b| full[a - 1].partial_cmp(&full[b - 1]).unwrap())
                    .unwrap();
                assert!(s.contains(top));
            }
        }
    }

    #[test]
    fn tau_close_examples() {
        let own = SupportSet::new(alloc::vec![100, 200]).unwrap();
        let hit = SupportSet::new(alloc::vec![99, 201]).unwrap();
        assert!(tau_close_match(&hit, &own, 2).unwrap());
        assert!(tau_close_match(&own, &own, 1).unwrap());
        let miss = SupportSet::new(alloc::vec![100, 202]).unwrap();
        assert!(!tau_close_match(&miss, &own, 2).unwrap());
    }

    #[test]
    fn snap_is_identity_on_own_and_idempotent() {
        let own = SupportSet::new(alloc::vec![10, 26, 42]).unwrap();
        let dec = SupportSet::new(alloc::vec![9, 26, 43]).unwrap();
        let snapped = snap_support(&dec, &own, 2).unwrap();
        assert_eq!(snapped, own);
        assert_eq!(snap_support(&snapped, &own, 2).unwrap(), own);
        let far = SupportSet::new(alloc::vec![9, 26, 50]).unwrap();
        assert!(snap_support(&far, &own, 2).is_err());
    }

    #[test]
    fn noiseless_estimation_is_exact() {
        let d = dims(256, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let ch = sample_channel(256, &mut rng);
        let support = select_support(d, ch.gains(), 5).unwrap();
        let payload = GrantPayload::random(5, Modulation::Qpsk, &mut rng);
        let beta = symbol_amplitude(d, 5, 2.0);
        let grant = build_grant_vector(d, &support, &payload, Modulation::Qpsk, beta).unwrap();
        let y = transmit(&grant, &ch, NoiseSpec::NOISELESS, d, &mut rng).unwrap();
        let est = estimate_symbols(&y, &support, &ch, d, None).unwrap();
        for (e, s) in est.iter().zip(grant.values()) {
            assert!((e - s).norm() < 1e-8);
        }
        assert_eq!(slice_symbols(&est, Modulation::Qpsk), payload.bits());
    }

    #[test]
    fn two_column_system_small() {
        let d = dims(16, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let ch = sample_channel(16, &mut rng);
        let support = SupportSet::new(alloc::vec![2, 5]).unwrap();
        let vals = alloc::vec![Cf64::new(1.3, -0.4), Cf64::new(-0.2, 0.9)];
        let grant = crate::spectrum::SparseFreqVector::new(16, support.clone(), vals.clone())
            .unwrap();
        let y = transmit(&grant, &ch, NoiseSpec::NOISELESS, d, &mut rng).unwrap();
        let est = estimate_symbols(&y, &support, &ch, d, None).unwrap();
        for (e, s) in est.iter().zip(&vals) {
            assert!((e - s).norm() < 1e-10);
        }
    }

    #[test]
    fn ls_matches_pseudo_inverse_oracle() {
        use nalgebra::{Complex, DMatrix, DVector};
        let d = dims(64, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let ch = sample_channel(64, &mut rng);
        let support = SupportSet::new(alloc::vec![3, 19, 35, 51]).unwrap();
        let y: Vec<Cf64> = (0..16).map(|_| crate::channel::sample_cn01(&mut rng)).collect();
        let est = estimate_symbols(&y, &support, &ch, d, None).unwrap();

        let mut b = DMatrix::<Complex<f64>>::zeros(16, 4);
        for (j, w) in support.iter().enumerate() {
            let col = idft_column(d, w).unwrap();
            for (i, a) in col.iter().enumerate() {
                let v = a * ch.gain(w);
                b[(i, j)] = Complex::new(v.re, v.im);
            }
        }
        let yv = DVector::from_iterator(16, y.iter().map(|v| Complex::new(v.re, v.im)));
        let pinv = b.svd(true, true).pseudo_inverse(1e-12).unwrap();
        let oracle = pinv * yv;
        for (e, o) in est.iter().zip(oracle.iter()) {
            assert!((e.re - o.re).abs() < 1e-8 && (e.im - o.im).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_gain_is_rank_deficient() {
        let d = dims(64, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let mut gains = sample_channel(64, &mut rng).gains().to_vec();
        gains[2] = Cf64::new(0.0, 0.0);
        let ch = ChannelRealization::from_gains(gains);
        let support = SupportSet::new(alloc::vec![3, 19]).unwrap();
        let y: Vec<Cf64> = (0..16).map(|_| crate::channel::sample_cn01(&mut rng)).collect();
        assert!(matches!(
            estimate_symbols(&y, &support, &ch, d, None),
            Err(CastError::RankDeficient)
        ));
    }

    #[test]
    fn slicer_boundary_goes_positive() {
        let bits = slice_symbols(&[Cf64::new(0.0, -0.5)], Modulation::Qpsk);
        assert_eq!(bits, alloc::vec![false, true]);
    }

    #[test]
    fn qpsk_ser_matches_awgn_closed_form() {
        // r = beta * point + w, w ~ CN(0,1): per-quadrature bit error
        // probability Q(beta), SER = 1 - (1 - Q(beta))^2
        use statrs::distribution::{ContinuousCDF, Normal};
        let beta = 1.5f64;
        let q = 1.0 - Normal::new(0.0, 1.0).unwrap().cdf(beta);
        let ser_theory = 1.0 - (1.0 - q) * (1.0 - q);
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let trials = 200_000;
        let mut errors = 0usize;
        for _ in 0..trials {
            let b0 = rng.gen::<bool>();
            let b1 = rng.gen::<bool>();
            let r = crate::encoder::qpsk_point(b0, b1) * beta
                + crate::channel::sample_cn01(&mut rng);
            let out = slice_symbols(&[r], Modulation::Qpsk);
            if out != alloc::vec![b0, b1] {
                errors += 1;
            }
        }
        let ser = errors as f64 / trials as f64;
        let se = (ser_theory * (1.0 - ser_theory) / trials as f64).sqrt();
        assert!(
            (ser - ser_theory).abs() < 4.0 * se + 1e-4,
            "ser {ser} vs theory {ser_theory}"
        );
    }

    #[test]
    fn decode_end_to_end() {
        let d = dims(256, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let ch = sample_channel(256, &mut rng);
        let support = select_support(d, ch.gains(), 4).unwrap();
        let payload = GrantPayload::random(4, Modulation::Qpsk, &mut rng);
        let beta = symbol_amplitude(d, 4, 1.0);
        let grant = build_grant_vector(d, &support, &payload, Modulation::Qpsk, beta).unwrap();
        let y = transmit(&grant, &ch, NoiseSpec::NOISELESS, d, &mut rng).unwrap();

        let out = decode(&y, &support, &ch, d, 2, Modulation::Qpsk).unwrap();
        assert_eq!(out.status, DecodeStatus::Granted);
        assert_eq!(out.decoded_bits.as_deref(), Some(payload.bits()));

        // the same measurement read by a device that owns a different support
        let other = SupportSet::new(alloc::vec![7, 71, 135, 199]).unwrap();
        if !tau_close_match(&support, &other, 2).unwrap() {
            let out = decode(&y, &other, &ch, d, 2, Modulation::Qpsk).unwrap();
            assert_eq!(out.status, DecodeStatus::NotGranted);
            assert!(out.decoded_bits.is_none());
        }
    }
}
