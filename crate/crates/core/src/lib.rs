//! Channel-optimized scalar quantization (COSQ) for two-way channels.
//!
//! Two terminals each observe one component of a correlated bivariate
//! Gaussian pair and exchange quantized descriptions over a discrete
//! memoryless two-way channel (TWC). Each terminal's decoder uses its own
//! sample as side information, both for the prior on the remote source and
//! to resolve the self-interference its own transmission causes.
//!
//! The crate is organised bottom-up:
//!
//! - [`source`]: the discretized source pair and its conditional tables.
//! - [`channel`]: binary-additive and binary-multiplying TWC kernels.
//! - [`quantizer`]: encoders, decoders, modified distortions and the
//!   optimality-condition updates.
//! - [`trainer`]: the alternating design loop, half-duplex designs and
//!   initializers (bootstrap, padding, noise annealing).
//! - [`capacity`]: constant-symbol selection for half-duplex operation.
//! - [`simulator`]: Monte Carlo end-to-end validation.

pub mod capacity;
pub mod channel;
pub mod design;
mod error;
mod par;
pub mod quantizer;
pub mod simulator;
pub mod source;
pub mod trainer;

pub use channel::{ChannelKind, IndexTuple, NoisePair, Terminal, TupleKernel, TwcKernel};
pub use error::{Error, Result};
pub use quantizer::{Codebook, DistortionReport, Partition};
pub use source::{SourceConfig, SourceGrid};
pub use trainer::{DuplexMode, TrainConfig, TrainedSystem};
