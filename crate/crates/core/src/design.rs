//! End-to-end design recipes used for the reported comparisons.
//!
//! - Half-duplex: each direction is designed on its own, starting from
//!   [`init_uniform`] and annealed along the noise schedule.
//! - Full-duplex over BA: each noise point starts from the half-duplex
//!   encoders of the same rate and noise.
//! - Full-duplex over BM: starts from half-duplex encoders of half the rate,
//!   padded with all-ones so each user's payload travels while the other
//!   sends ones, then annealed.

use crate::channel::{ChannelKind, NoisePair, Terminal, TwcKernel};
use crate::error::{Error, Result};
use crate::quantizer::DistortionReport;
use crate::source::SourceGrid;
use crate::trainer::{
    half_duplex_pair_report, init_from_half_duplex_ba, init_padding_bm, init_uniform,
    padding_half_rate, train_annealed, train_full_duplex, DuplexMode, TrainConfig, TrainedSystem,
};

/// Both directions of a half-duplex scheme at one noise point.
#[derive(Debug, Clone)]
pub struct HalfDuplexPoint {
    pub noise: NoisePair,
    /// User 1 transmitting, user 2 idle.
    pub user1: TrainedSystem,
    /// User 2 transmitting, user 1 idle.
    pub user2: TrainedSystem,
    pub report: DistortionReport,
}

impl HalfDuplexPoint {
    pub fn iterations(&self) -> usize {
        self.user1.iterations() + self.user2.iterations()
    }
}

/// Annealed half-duplex designs at `rate` bits along `cfg.anneal_schedule`.
pub fn anneal_half_duplex(
    grid: &SourceGrid,
    kind: ChannelKind,
    rate: usize,
    cfg: &TrainConfig,
) -> Result<Vec<HalfDuplexPoint>> {
    let init = init_uniform(grid, rate)?;
    let chain = |active| {
        let cfg = TrainConfig {
            mode: DuplexMode::HalfDuplex { active },
            rate_bits: rate,
            ..cfg.clone()
        };
        train_annealed(grid, kind, &cfg, (init.clone(), init.clone()))
    };
    let ones = chain(Terminal::One)?;
    let twos = chain(Terminal::Two)?;
    ones.into_iter()
        .zip(twos)
        .map(|(user1, user2)| {
            let report = half_duplex_pair_report(&user1, &user2)?;
            Ok(HalfDuplexPoint {
                noise: user1.noise,
                user1,
                user2,
                report,
            })
        })
        .collect()
}

/// Rate of the half-duplex design that seeds a full-duplex design at `rate`.
pub fn seed_rate(kind: ChannelKind, rate: usize) -> Result<usize> {
    match kind {
        ChannelKind::BinaryAdditive => Ok(rate),
        ChannelKind::BinaryMultiplying => padding_half_rate(rate),
    }
}

/// Annealed full-duplex designs at `rate` bits along `cfg.anneal_schedule`.
///
/// `seeds` are the half-duplex designs at [`seed_rate`] along the same
/// schedule; they are trained here when not supplied. Over BA every noise
/// point starts from the half-duplex encoders of that point. Over BM only the
/// first point is padded from its half-duplex design and later points start
/// from the previous full-duplex partitions.
pub fn anneal_full_duplex(
    grid: &SourceGrid,
    kind: ChannelKind,
    rate: usize,
    cfg: &TrainConfig,
    seeds: Option<&[HalfDuplexPoint]>,
) -> Result<Vec<TrainedSystem>> {
    cfg.validate()?;
    let half_rate = seed_rate(kind, rate)?;
    let owned;
    let seeds = match seeds {
        Some(s) => s,
        None => {
            owned = anneal_half_duplex(grid, kind, half_rate, cfg)?;
            &owned[..]
        }
    };
    if seeds.len() != cfg.anneal_schedule.len() {
        return Err(Error::Config(format!(
            "{} half-duplex seeds for {} noise points",
            seeds.len(),
            cfg.anneal_schedule.len()
        )));
    }
    for (seed, noise) in seeds.iter().zip(&cfg.anneal_schedule) {
        if seed.user1.rate_bits() != half_rate {
            return Err(Error::Config(format!(
                "seed design has rate {}, expected {half_rate}",
                seed.user1.rate_bits()
            )));
        }
        if seed.noise != *noise {
            return Err(Error::Config(
                "seed designs do not follow the noise schedule".into(),
            ));
        }
    }
    let cfg = TrainConfig {
        mode: DuplexMode::FullDuplex,
        rate_bits: rate,
        ..cfg.clone()
    };
    match kind {
        ChannelKind::BinaryAdditive => seeds
            .iter()
            .map(|seed| {
                let (p1, p2) = init_from_half_duplex_ba(&seed.user1, &seed.user2)?;
                let kernel = TwcKernel::new(kind, seed.noise)?;
                train_full_duplex(grid, &kernel, p1, p2, &cfg)
            })
            .collect(),
        ChannelKind::BinaryMultiplying => {
            let init = init_padding_bm(&seeds[0].user1, &seeds[0].user2)?;
            train_annealed(grid, kind, &cfg, init)
        }
    }
}
