//! Partial-IDFT sensing model: column generation, the closed-form column
//! correlation, its interval-wise upper bound, and the orthogonal index sets
//! that both the encoder and decoder draw supports from.
//!
//! Subcarrier indices are 1-based at the API surface. The sensing matrix is
//! never materialized; columns and correlations are computed on demand.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // needed when no std-linked dependency is in the graph
use num_traits::Float;

use crate::{CastError, Cf64, Result};

/// Threshold on |correlation| for membership in a relaxed orthogonal set.
pub const EPS_ORTH: f64 = 1e-8;

/// Sensing dimensions: `n` subcarriers, first `m` time-domain samples kept.
///
/// Strict mode (`n % m == 0`) gives exactly orthogonal index sets with
/// spacing `n/m`; otherwise the relaxed construction collects the exact
/// correlation zeros, which exist at multiples of `n / gcd(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensingDims {
    n: usize,
    m: usize,
}

impl SensingDims {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 || m > n {
            return Err(CastError::InvalidArgument("require 1 <= m <= n"));
        }
        Ok(SensingDims { n, m })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Exact orthogonality spacing `n/m` is an integer.
    #[inline]
    pub fn is_strict(&self) -> bool {
        self.n % self.m == 0
    }

    /// Main-lobe half width `n/(2m)` of the correlation function.
    #[inline]
    pub fn main_lobe(&self) -> f64 {
        self.n as f64 / (2.0 * self.m as f64)
    }
}

/// Ordered set of distinct subcarrier indices in `[1..n]`.
///
/// Doubles as the granted user identity: the grant vector is nonzero exactly
/// on these positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    /// Builds a support from arbitrary order; sorts and rejects duplicates.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(CastError::InvalidArgument("duplicate support indices"));
        }
        if indices.first().is_some_and(|&i| i == 0) {
            return Err(CastError::InvalidArgument("support indices are 1-based"));
        }
        Ok(SupportSet(indices))
    }

    pub fn empty() -> Self {
        SupportSet(Vec::new())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices in ascending order.
    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

/// Frequency-domain sparse vector of length `n`, nonzero only on `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFreqVector {
    n: usize,
    support: SupportSet,
    /// One value per support index, in ascending index order.
    values: Vec<Cf64>,
}

impl SparseFreqVector {
    pub fn new(n: usize, support: SupportSet, values: Vec<Cf64>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(CastError::DimensionMismatch {
                what: "sparse vector support/values",
                left: support.len(),
                right: values.len(),
            });
        }
        if support.indices().last().is_some_and(|&i| i > n) {
            return Err(CastError::IndexOutOfRange {
                what: "support index",
                value: *support.indices().last().unwrap(),
                limit: n,
            });
        }
        Ok(SparseFreqVector { n, support, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    #[inline]
    pub fn values(&self) -> &[Cf64] {
        &self.values
    }

    /// (index, value) pairs in ascending index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Cf64)> + '_ {
        self.support.iter().zip(self.values.iter().copied())
    }

    /// Dense length-`n` expansion (test/oracle use; O(n)).
    pub fn to_dense(&self) -> Vec<Cf64> {
        let mut out = alloc::vec![Cf64::new(0.0, 0.0); self.n];
        for (idx, v) in self.entries() {
            out[idx - 1] = v;
        }
        out
    }
}

/// Column `omega` (1-based) of the partial IDFT matrix, unit 2-norm:
/// entry `l` (1-based) is `(1/sqrt(m)) exp(+j 2 pi (omega-1)(l-1) / n)`.
pub fn idft_column(dims: SensingDims, omega: usize) -> Result<Vec<Cf64>> {
    if omega == 0 || omega > dims.n {
        return Err(CastError::IndexOutOfRange { what: "omega", value: omega, limit: dims.n });
    }
    let scale = 1.0 / (dims.m as f64).sqrt();
    let step = 2.0 * PI * (omega - 1) as f64 / dims.n as f64;
    Ok((0..dims.m)
        .map(|l| {
            let ang = step * l as f64;
            Cf64::new(scale * ang.cos(), scale * ang.sin())
        })
        .collect())
}

/// Closed-form column correlation `f(delta)` between columns whose indices
/// differ by `delta`: `(1/m) |sin(pi m delta / n) / sin(pi delta / n)|`,
/// with `f(0) = 1` as the limit. Total after reduction mod `n`; symmetric
/// and periodic, `f(delta) = f(-delta) = f(n - delta)`.
pub fn column_correlation(dims: SensingDims, delta: i64) -> f64 {
    let n = dims.n as i64;
    let d = delta.rem_euclid(n);
    if d == 0 {
        return 1.0;
    }
    let m = dims.m as f64;
    let x = PI * d as f64 / dims.n as f64;
    ((m * x).sin() / x.sin()).abs() / m
}

/// Index of the interval of the main-lobe-excluded partition containing
/// `|delta|`: the smallest `i >= 0` with
/// `max(n/2m, i n/m) <= |delta| <= (i+1) n/m`.
///
/// `delta` is reduced to the circular distance; errors inside the main lobe.
pub fn interval_index(dims: SensingDims, delta: i64) -> Result<usize> {
    let d = circular_distance(dims, delta);
    let spacing = dims.n as f64 / dims.m as f64;
    if d + 1e-12 < spacing / 2.0 {
        return Err(CastError::InvalidArgument("|delta| inside the correlation main lobe"));
    }
    // smallest i with d <= (i+1) n/m
    let i = (d / spacing - 1.0).ceil().max(0.0) as usize;
    Ok(i)
}

/// Interval-wise upper bound on the column correlation:
/// `1 / (m |sin(pi (2i+1) / (2m))|)`, always `>= column_correlation(delta)`
/// outside the main lobe.
pub fn correlation_upper_bound(dims: SensingDims, delta: i64) -> Result<f64> {
    // Validity of 1/(m sin(pi(2i+1)/2m)) >= f(|delta|) needs
    // (2i+1) n / (2m) <= |delta|, i.e. i = floor(|delta| m / n - 1/2).
    // For |delta| a multiple of n/m (the orthogonal-set spacing) this is
    // exactly interval_index; off-grid it can be one interval lower, which
    // keeps the bound on the right side of the true correlation.
    let d = circular_distance(dims, delta);
    let spacing = dims.n as f64 / dims.m as f64;
    if d + 1e-12 < spacing / 2.0 {
        return Err(CastError::InvalidArgument("|delta| inside the correlation main lobe"));
    }
    let i = (d / spacing - 0.5 + 1e-12).floor().max(0.0) as usize;
    Ok(bound_term(dims.m, i))
}

/// Single bound term `1 / (m |sin(pi (2i+1) / (2m))|)`.
#[inline]
pub fn bound_term(m: usize, i: usize) -> f64 {
    let mf = m as f64;
    1.0 / (mf * (PI * (2 * i + 1) as f64 / (2.0 * mf)).sin().abs())
}

/// Circular index distance `min(d, n - d)` after reduction mod `n`.
pub fn circular_distance(dims: SensingDims, delta: i64) -> f64 {
    let n = dims.n as i64;
    let d = delta.rem_euclid(n);
    d.min(n - d) as f64
}

/// Index set of `m` (near) orthogonal columns anchored at `anchor`:
/// `{anchor + round(c * n/m) mod n : c = 0..m-1}`.
///
/// When `m` divides `n` the offsets are exact multiples of `n/m` and the set
/// has pairwise correlation 0; otherwise the rounded offsets are the nearest
/// integer grid to the orthogonality pattern `c * n/m` and the residual
/// pairwise correlation stays small. The set always has exactly `m` members
/// (rounded offsets are distinct because the spacing `n/m >= 2`).
pub fn orthogonal_index_set(dims: SensingDims, anchor: usize) -> Result<SupportSet> {
    if anchor == 0 || anchor > dims.n {
        return Err(CastError::IndexOutOfRange { what: "anchor", value: anchor, limit: dims.n });
    }
    let n = dims.n;
    let mut members = Vec::with_capacity(dims.m);
    if dims.is_strict() {
        let spacing = n / dims.m;
        for c in 0..dims.m {
            members.push((anchor - 1 + c * spacing) % n + 1);
        }
    } else {
        let spacing = n as f64 / dims.m as f64;
        for c in 0..dims.m {
            let offset = (c as f64 * spacing).round() as usize;
            members.push((anchor - 1 + offset) % n + 1);
        }
    }
    SupportSet::new(members)
}
