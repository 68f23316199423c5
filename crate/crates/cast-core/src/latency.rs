//! Deterministic TDD access-latency model: conventional grant-based access,
//! mini-slot access, and the sparse-grant short-buffer access, plus expected
//! latency under decoding retransmission.

use alloc::vec::Vec;
#[allow(unused_imports)] // needed when no std-linked dependency is in the graph
use num_traits::Float;

use crate::{CastError, Result};

/// Role of one subframe in the TDD pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subframe {
    Downlink,
    Special,
    Uplink,
}

/// One 10 ms radio frame: ten 1 ms subframes, 14 OFDM symbols each, with a
/// sample rate of `n` subcarriers x 15 kHz.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TddFrameConfig {
    pattern: Vec<Subframe>,
    n: usize,
}

pub const SUBFRAME_MS: f64 = 1.0;
pub const FRAME_SUBFRAMES: usize = 10;
pub const SYMBOLS_PER_SUBFRAME: usize = 14;

impl TddFrameConfig {
    /// Parses a ten-character pattern over {D, S, U}, e.g. `"DSUDDDDDDD"`.
    pub fn new(pattern: &str, n: usize) -> Result<Self> {
        if pattern.len() != FRAME_SUBFRAMES {
            return Err(CastError::InvalidArgument("TDD pattern must have 10 subframes"));
        }
        let pattern: Vec<Subframe> = pattern
            .chars()
            .map(|c| match c {
                'D' => Ok(Subframe::Downlink),
                'S' => Ok(Subframe::Special),
                'U' => Ok(Subframe::Uplink),
                _ => Err(CastError::InvalidArgument("TDD pattern chars must be D, S or U")),
            })
            .collect::<Result<_>>()?;
        if !pattern.contains(&Subframe::Uplink) {
            return Err(CastError::NoUplinkSubframe);
        }
        if n == 0 {
            return Err(CastError::InvalidArgument("subcarrier count must be >= 1"));
        }
        Ok(TddFrameConfig { pattern, n })
    }

    #[inline]
    pub fn pattern(&self) -> &[Subframe] {
        &self.pattern
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Samples per millisecond.
    #[inline]
    pub fn sample_rate_per_ms(&self) -> f64 {
        self.n as f64 * 15.0
    }

    /// Duration of one OFDM symbol (n samples) in milliseconds.
    #[inline]
    pub fn symbol_ms(&self) -> f64 {
        1.0 / 15.0
    }

    #[inline]
    fn subframe_at(&self, t_ms: f64) -> Subframe {
        let idx = (t_ms / SUBFRAME_MS).floor() as usize % FRAME_SUBFRAMES;
        self.pattern[idx]
    }

    /// Start time of the first subframe of the given role at or after `t_ms`
    /// subframe boundaries (a time strictly inside a subframe rolls forward
    /// to the next boundary).
    fn next_start(&self, role: Subframe, t_ms: f64) -> f64 {
        let mut s = (t_ms / SUBFRAME_MS).ceil();
        loop {
            if self.pattern[(s as usize) % FRAME_SUBFRAMES] == role {
                return s * SUBFRAME_MS;
            }
            s += 1.0;
        }
    }
}

/// Additive latency components, all in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyBreakdown {
    pub t_prop: f64,
    pub t_buff: f64,
    pub t_dec: f64,
    pub t_wait: f64,
}

impl LatencyBreakdown {
    /// Total access latency.
    #[inline]
    pub fn t_up(&self) -> f64 {
        self.t_prop + self.t_buff + self.t_dec + self.t_wait
    }
}

/// Timing constants of the latency model. Not all timing constants of the
/// reference systems are published; these were fitted once against the
/// published averages of the three reference systems and then frozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyCalibration {
    /// One-way propagation delay.
    pub t_prop_ms: f64,
    /// Grant decoding time for the conventional-grant sample count.
    pub t_dec_ms: f64,
    /// Offset of the grant transmission into its downlink subframe.
    pub grant_offset_ms: f64,
    /// Conventional receive buffering: one full subframe.
    pub conv_buffer_ms: f64,
    /// Mini-slot receive buffering for a 2-symbol mini-slot.
    pub minislot_buffer_ms: f64,
}

impl Default for LatencyCalibration {
    fn default() -> Self {
        LatencyCalibration {
            t_prop_ms: 0.01,
            t_dec_ms: 0.66833,
            grant_offset_ms: 0.21,
            conv_buffer_ms: 1.0,
            minislot_buffer_ms: 0.49667,
        }
    }
}

/// Time from `t_ms` to the next uplink opportunity: zero inside an uplink
/// subframe, otherwise the gap to the next uplink subframe start.
pub fn wait_to_uplink(config: &TddFrameConfig, t_ms: f64) -> Result<f64> {
    if t_ms < 0.0 || !t_ms.is_finite() {
        return Err(CastError::InvalidArgument("time must be finite and >= 0"));
    }
    if config.subframe_at(t_ms) == Subframe::Uplink {
        return Ok(0.0);
    }
    Ok(config.next_start(Subframe::Uplink, t_ms) - t_ms)
}

/// Conventional grant-based access for a packet arriving at `arrival_ms`:
/// the grant goes out in the next downlink subframe, the device buffers a
/// full subframe, decodes, then waits for an uplink subframe.
pub fn conventional_access_latency(
    config: &TddFrameConfig,
    calib: &LatencyCalibration,
    arrival_ms: f64,
) -> Result<LatencyBreakdown> {
    if arrival_ms < 0.0 || !arrival_ms.is_finite() {
        return Err(CastError::InvalidArgument("arrival must be finite and >= 0"));
    }
    let grant_start =
        config.next_start(Subframe::Downlink, arrival_ms) + calib.grant_offset_ms;
    let ready = grant_start + calib.t_prop_ms + calib.conv_buffer_ms + calib.t_dec_ms;
    let data_start = if config.subframe_at(ready) == Subframe::Uplink {
        ready
    } else {
        config.next_start(Subframe::Uplink, ready)
    };
    Ok(LatencyBreakdown {
        t_prop: calib.t_prop_ms,
        t_buff: calib.conv_buffer_ms,
        t_dec: calib.t_dec_ms,
        t_wait: data_start - ready,
    })
}

/// Arrival epochs used for averaging: one packet every two subframes.
pub const ARRIVALS_MS: [f64; 5] = [0.0, 2.0, 4.0, 6.0, 8.0];

/// Conventional access latency averaged over the standard arrival epochs.
pub fn conventional_mean_latency(
    config: &TddFrameConfig,
    calib: &LatencyCalibration,
) -> Result<f64> {
    let mut acc = 0.0;
    for &a in &ARRIVALS_MS {
        acc += conventional_access_latency(config, calib, a)?.t_up();
    }
    Ok(acc / ARRIVALS_MS.len() as f64)
}

/// Sparse-grant access: buffer only `m` samples, decode, and transmit
/// immediately — the direction flips right after the grant, so there is no
/// waiting component.
pub fn cast_access_latency(
    m: usize,
    config: &TddFrameConfig,
    calib: &LatencyCalibration,
) -> Result<LatencyBreakdown> {
    if m == 0 || m > config.n() {
        return Err(CastError::IndexOutOfRange { what: "sample count m", value: m, limit: config.n() });
    }
    Ok(LatencyBreakdown {
        t_prop: calib.t_prop_ms,
        t_buff: m as f64 / config.sample_rate_per_ms(),
        t_dec: calib.t_dec_ms,
        t_wait: 0.0,
    })
}

/// Mini-slot access: the grant occupies a 2, 4 or 7 symbol mini-slot and
/// still needs the full conventional sample count for decoding; the
/// direction flips after the grant.
pub fn minislot_access_latency(
    config: &TddFrameConfig,
    calib: &LatencyCalibration,
    minislot_symbols: usize,
) -> Result<LatencyBreakdown> {
    if !matches!(minislot_symbols, 2 | 4 | 7) {
        return Err(CastError::InvalidArgument("mini-slot length must be 2, 4 or 7 symbols"));
    }
    let t_buff =
        calib.minislot_buffer_ms + (minislot_symbols as f64 - 2.0) * config.symbol_ms();
    Ok(LatencyBreakdown {
        t_prop: calib.t_prop_ms,
        t_buff,
        t_dec: calib.t_dec_ms,
        t_wait: 0.0,
    })
}

/// Mean latency under geometric retransmission: one attempt plus
/// `retry_period` per additional attempt.
pub fn expected_latency_with_retry(
    p_success: f64,
    single_attempt: &LatencyBreakdown,
    retry_period_ms: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_success) || p_success.is_nan() {
        return Err(CastError::InvalidArgument("success probability must be in [0,1]"));
    }
    if retry_period_ms < 0.0 {
        return Err(CastError::InvalidArgument("retry period must be >= 0"));
    }
    if p_success == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(single_attempt.t_up() + retry_period_ms * (1.0 / p_success - 1.0))
}
