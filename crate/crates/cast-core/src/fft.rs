//! Minimal iterative radix-2 FFT.
//!
//! Only needed for the matched-filter sweep over all subcarriers; sizes are
//! powers of two in practice (N = 1024), everything else falls back to the
//! direct O(n^2) evaluation in the decoder.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // needed when no std-linked dependency is in the graph
use num_traits::Float;

use crate::Cf64;

/// In-place forward DFT, `X[k] = sum_l x[l] e^{-j 2 pi k l / n}`.
///
/// Panics if `buf.len()` is not a power of two.
pub fn fft_forward(buf: &mut [Cf64]) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft size must be a power of two");
    if n <= 1 {
        return;
    }

    // bit-reversal permutation
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = (i.reverse_bits() >> (usize::BITS - bits)) as usize;
        if j > i {
            buf.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let ang = -2.0 * PI / len as f64;
        let wlen = Cf64::new(ang.cos(), ang.sin());
        for start in (0..n).step_by(len) {
            let mut w = Cf64::new(1.0, 0.0);
            for off in 0..len / 2 {
                let u = buf[start + off];
                let v = buf[start + off + len / 2] * w;
                buf[start + off] = u + v;
                buf[start + off + len / 2] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}

/// Forward DFT of `x` zero-padded to length `n` (power of two).
pub fn dft_zero_padded(x: &[Cf64], n: usize) -> Vec<Cf64> {
    let mut buf = Vec::with_capacity(n);
    buf.extend_from_slice(x);
    buf.resize(n, Cf64::new(0.0, 0.0));
    fft_forward(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dft_direct(x: &[Cf64]) -> Vec<Cf64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|l| {
                        let ang = -2.0 * PI * (k * l) as f64 / n as f64;
                        x[l] * Cf64::new(ang.cos(), ang.sin())
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft() {
        let x: Vec<Cf64> = (0..64)
            .map(|i| Cf64::new((i as f64 * 0.37).sin(), (i as f64 * 1.1).cos()))
            .collect();
        let direct = dft_direct(&x);
        let mut fast = x.clone();
        fft_forward(&mut fast);
        for (a, b) in fast.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
