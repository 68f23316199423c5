//! Channel-aware sparse transmission (CAST) primitives.
//!
//! Grant signaling for low-latency TDD access: the grant rides on a small set
//! of OFDM subcarriers chosen from the mutually orthogonal columns of a
//! partial-IDFT sensing matrix, and is decoded from the first `m` time-domain
//! samples with a two-iteration greedy search. The crate also evaluates the
//! analytic success-probability lower bounds and a deterministic TDD
//! access-latency model.
//!
//! The crate is `no_std` + `alloc`; all randomness is injected through
//! `rand_core::RngCore` streams so every caller controls reproducibility.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod channel;
pub mod decoder;
pub mod encoder;
pub mod fft;
pub mod latency;
pub mod quad;
pub mod special;
pub mod spectrum;

mod error;

pub use error::CastError;

/// Complex sample type used throughout.
pub type Cf64 = num_complex::Complex<f64>;

pub type Result<T> = core::result::Result<T, CastError>;
