//! Alternating design of both terminals' encoders and decoders.
//!
//! One iteration `m` does, in order:
//!
//! 1. codebooks `C^(m)` from the current partitions `P^(m)`;
//! 2. `P1^(m+1)` from `C^(m)` and `P2^(m)`;
//! 3. `P2^(m+1)` from `C^(m)` and the new `P1^(m+1)`;
//! 4. `D_(m+1)` from `P^(m+1)` and `C^(m)`.
//!
//! The loop stops once the relative decrease `(D_m - D_(m+1)) / D_m` drops
//! to the threshold, with `D_0 = inf`. Half-duplex designs freeze the idle
//! user's encoder at a constant tuple and skip its update.

use serde::{Deserialize, Serialize};

use crate::capacity::optimal_constant_symbol;
use crate::channel::{ChannelKind, IndexTuple, NoisePair, Terminal, TupleKernel, TwcKernel};
use crate::error::{Error, Result};
use crate::quantizer::{
    evaluate_distortion, update_codebooks, update_partition, Codebook, DistortionReport,
    Partition,
};
use crate::source::{SourceConfig, SourceGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DuplexMode {
    FullDuplex,
    /// Only `active` transmits; the other user sends a constant tuple.
    HalfDuplex { active: Terminal },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Relative distortion decrease at which iteration stops.
    pub stop_threshold: f64,
    pub max_iters: usize,
    pub mode: DuplexMode,
    /// Channel uses (bits) per source sample.
    pub rate_bits: usize,
    /// Noise points visited by [`train_annealed`], in order.
    pub anneal_schedule: Vec<NoisePair>,
    /// Recompute codebooks between the two encoder updates of an iteration.
    pub refresh_codebooks: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            stop_threshold: 1e-4,
            max_iters: 200,
            mode: DuplexMode::FullDuplex,
            rate_bits: 2,
            anneal_schedule: vec![NoisePair::NOISELESS],
            refresh_codebooks: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.stop_threshold > 0.0) {
            return Err(Error::Config(format!(
                "stop_threshold = {} must be positive",
                self.stop_threshold
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        IndexTuple::new(0, self.rate_bits)?;
        if self.anneal_schedule.is_empty() {
            return Err(Error::Config("anneal schedule is empty".into()));
        }
        for pair in &self.anneal_schedule {
            pair.validate()?;
        }
        for w in self.anneal_schedule.windows(2) {
            if w[1].eps1 < w[0].eps1 || w[1].eps2 < w[0].eps2 {
                return Err(Error::Config(
                    "anneal schedule noise must be nondecreasing per terminal".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SystemRole {
    FullDuplex,
    HalfDuplex { active: Terminal, idle_symbol: u8 },
}

/// Both encoders and decoders plus the settings they were trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedSystem {
    pub p1: Partition,
    pub p2: Partition,
    pub c1: Codebook,
    pub c2: Codebook,
    pub source: SourceConfig,
    pub channel: ChannelKind,
    pub noise: NoisePair,
    pub role: SystemRole,
    pub stop_threshold: f64,
    pub max_iters: usize,
    pub report: DistortionReport,
    /// Distortion after every iteration.
    pub trace: Vec<f64>,
}

impl TrainedSystem {
    pub fn rate_bits(&self) -> usize {
        self.p1.tuple_len()
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn kernel(&self) -> Result<TwcKernel> {
        TwcKernel::new(self.channel, self.noise)
    }

    /// Recomputes the distortion of the stored components on `grid`.
    pub fn evaluate(&self, grid: &SourceGrid) -> Result<DistortionReport> {
        let ch = TupleKernel::new(&self.kernel()?, self.rate_bits())?;
        evaluate_distortion(&self.p1, &self.p2, &self.c1, &self.c2, &ch, grid)
    }

    pub fn partition(&self, t: Terminal) -> &Partition {
        match t {
            Terminal::One => &self.p1,
            Terminal::Two => &self.p2,
        }
    }

    pub fn codebook(&self, t: Terminal) -> &Codebook {
        match t {
            Terminal::One => &self.c1,
            Terminal::Two => &self.c2,
        }
    }
}

struct Snapshot {
    p1: Partition,
    p2: Partition,
    c1: Codebook,
    c2: Codebook,
    report: DistortionReport,
}

fn check_init(p: &Partition, grid: &SourceGrid, len: usize) -> Result<()> {
    if p.points() != grid.points() {
        return Err(Error::Config(format!(
            "initial partition covers {} cells, grid has {}",
            p.points(),
            grid.points()
        )));
    }
    if p.tuple_len() != len {
        return Err(Error::Config(format!(
            "initial partition has rate {}, expected {len}",
            p.tuple_len()
        )));
    }
    Ok(())
}

fn run_design(
    grid: &SourceGrid,
    ch: &TupleKernel,
    mut p1: Partition,
    mut p2: Partition,
    frozen: Option<Terminal>,
    cfg: &TrainConfig,
) -> Result<(Snapshot, Vec<f64>)> {
    let mut best: Option<Snapshot> = None;
    let mut trace = Vec::new();
    let mut previous = f64::INFINITY;
    for _ in 0..cfg.max_iters {
        let (c1, c2) = update_codebooks(&p1, &p2, ch, grid)?;
        let next_p1 = if frozen == Some(Terminal::One) {
            p1.clone()
        } else {
            update_partition(Terminal::One, &p2, &c1, &c2, ch, grid)?
        };
        let (c1, c2) = if cfg.refresh_codebooks {
            update_codebooks(&next_p1, &p2, ch, grid)?
        } else {
            (c1, c2)
        };
        let next_p2 = if frozen == Some(Terminal::Two) {
            p2.clone()
        } else {
            update_partition(Terminal::Two, &next_p1, &c1, &c2, ch, grid)?
        };
        let report = evaluate_distortion(&next_p1, &next_p2, &c1, &c2, ch, grid)?;
        let d = report.distortion;
        if !d.is_finite() {
            return Err(Error::Numerical(format!("distortion became {d}")));
        }
        trace.push(d);
        if best.as_ref().is_none_or(|b| d < b.report.distortion) {
            best = Some(Snapshot {
                p1: next_p1.clone(),
                p2: next_p2.clone(),
                c1,
                c2,
                report,
            });
        }
        let decrease = if previous.is_infinite() {
            f64::INFINITY
        } else {
            (previous - d) / previous
        };
        p1 = next_p1;
        p2 = next_p2;
        previous = d;
        if decrease <= cfg.stop_threshold {
            break;
        }
    }
    Ok((best.expect("max_iters >= 1"), trace))
}

fn package(
    snap: Snapshot,
    trace: Vec<f64>,
    grid: &SourceGrid,
    kernel: &TwcKernel,
    role: SystemRole,
    cfg: &TrainConfig,
) -> TrainedSystem {
    TrainedSystem {
        p1: snap.p1,
        p2: snap.p2,
        c1: snap.c1,
        c2: snap.c2,
        source: *grid.config(),
        channel: kernel.kind(),
        noise: kernel.noise(),
        role,
        stop_threshold: cfg.stop_threshold,
        max_iters: cfg.max_iters,
        report: snap.report,
        trace,
    }
}

/// Full-duplex design from the given initial partitions.
pub fn train_full_duplex(
    grid: &SourceGrid,
    kernel: &TwcKernel,
    init_p1: Partition,
    init_p2: Partition,
    cfg: &TrainConfig,
) -> Result<TrainedSystem> {
    let len = init_p1.tuple_len();
    check_init(&init_p1, grid, len)?;
    check_init(&init_p2, grid, len)?;
    let ch = TupleKernel::new(kernel, len)?;
    let (snap, trace) = run_design(grid, &ch, init_p1, init_p2, None, cfg)?;
    Ok(package(snap, trace, grid, kernel, SystemRole::FullDuplex, cfg))
}

/// One-way design for `active` while the other user sends `(s, ..., s)`.
///
/// The decoders still condition on their local sample.
pub fn train_half_duplex(
    grid: &SourceGrid,
    kernel: &TwcKernel,
    idle_symbol: u8,
    active: Terminal,
    init: Partition,
    cfg: &TrainConfig,
) -> Result<TrainedSystem> {
    let len = init.tuple_len();
    check_init(&init, grid, len)?;
    let idle = Partition::constant(IndexTuple::constant(idle_symbol, len)?, grid.points());
    let (p1, p2) = match active {
        Terminal::One => (init, idle),
        Terminal::Two => (idle, init),
    };
    let ch = TupleKernel::new(kernel, len)?;
    let (snap, trace) = run_design(grid, &ch, p1, p2, Some(active.other()), cfg)?;
    let role = SystemRole::HalfDuplex {
        active,
        idle_symbol,
    };
    Ok(package(snap, trace, grid, kernel, role, cfg))
}

/// Contiguous equal-mass cells in increasing tuple order.
pub fn init_uniform(grid: &SourceGrid, len: usize) -> Result<Partition> {
    IndexTuple::new(0, len)?;
    let m = 1usize << len;
    let n = grid.points();
    if n < m {
        return Err(Error::Config(format!(
            "{n} grid cells cannot cover {m} tuples"
        )));
    }
    let mut cells = Vec::with_capacity(n);
    let mut below = 0.0;
    let mut prev = 0usize;
    for (j, &w) in grid.weights().iter().enumerate() {
        let mid = below + 0.5 * w;
        below += w;
        let target = ((mid * m as f64).floor() as usize).min(m - 1);
        // at most one step per cell, and enough cells left to reach m - 1
        let floor = (m + j).saturating_sub(n);
        let idx = if j == 0 { 0 } else { target.min(prev + 1) }.max(floor);
        cells.push(idx);
        prev = idx;
    }
    Partition::new(len, cells)
}

fn half_duplex_active(sys: &TrainedSystem) -> Option<Terminal> {
    match sys.role {
        SystemRole::HalfDuplex { active, .. } => Some(active),
        SystemRole::FullDuplex => None,
    }
}

fn check_hd_pair(hd1: &TrainedSystem, hd2: &TrainedSystem) -> Result<()> {
    if half_duplex_active(hd1) != Some(Terminal::One)
        || half_duplex_active(hd2) != Some(Terminal::Two)
    {
        return Err(Error::Config(
            "expected half-duplex systems with users 1 and 2 active".into(),
        ));
    }
    if hd1.rate_bits() != hd2.rate_bits() {
        return Err(Error::Config(format!(
            "half-duplex rates differ: {} vs {}",
            hd1.rate_bits(),
            hd2.rate_bits()
        )));
    }
    if hd1.p1.points() != hd2.p2.points() {
        return Err(Error::Config("half-duplex grids differ".into()));
    }
    Ok(())
}

/// Reuses the two half-duplex encoders as full-duplex starting points.
pub fn init_from_half_duplex_ba(
    hd1: &TrainedSystem,
    hd2: &TrainedSystem,
) -> Result<(Partition, Partition)> {
    check_hd_pair(hd1, hd2)?;
    Ok((hd1.p1.clone(), hd2.p2.clone()))
}

/// Doubles the rate of two half-duplex encoders by padding with all-ones:
/// user 1 sends `(1..1) ++ x`, user 2 sends `x ++ (1..1)`.
pub fn init_padding_bm(
    hd1: &TrainedSystem,
    hd2: &TrainedSystem,
) -> Result<(Partition, Partition)> {
    check_hd_pair(hd1, hd2)?;
    let half = hd1.rate_bits();
    let len = 2 * half;
    IndexTuple::new(0, len)?;
    let ones = (1usize << half) - 1;
    let p1 = hd1.p1.indices().map(|x| (ones << half) | x).collect();
    let p2 = hd2.p2.indices().map(|x| (x << half) | ones).collect();
    Ok((Partition::new(len, p1)?, Partition::new(len, p2)?))
}

/// Rejects odd target rates for the padding initializer.
pub fn padding_half_rate(rate_bits: usize) -> Result<usize> {
    if rate_bits % 2 != 0 || rate_bits == 0 {
        return Err(Error::Config(format!(
            "padding initialization needs an even rate, got {rate_bits}"
        )));
    }
    Ok(rate_bits / 2)
}

/// Trains at each noise point of `cfg.anneal_schedule`, starting from `init`
/// and then from the previous point's partitions.
///
/// In half-duplex mode only the active user's entry of `init` is used and
/// the idle symbol is re-selected at every noise point.
pub fn train_annealed(
    grid: &SourceGrid,
    kind: ChannelKind,
    cfg: &TrainConfig,
    init: (Partition, Partition),
) -> Result<Vec<TrainedSystem>> {
    cfg.validate()?;
    let mut out: Vec<TrainedSystem> = Vec::with_capacity(cfg.anneal_schedule.len());
    let (mut p1, mut p2) = init;
    for noise in &cfg.anneal_schedule {
        let kernel = TwcKernel::new(kind, *noise)?;
        let sys = match cfg.mode {
            DuplexMode::FullDuplex => train_full_duplex(grid, &kernel, p1, p2, cfg)?,
            DuplexMode::HalfDuplex { active } => {
                let idle = optimal_constant_symbol(&kernel, active.other()).symbol;
                let start = match active {
                    Terminal::One => p1,
                    Terminal::Two => p2,
                };
                train_half_duplex(grid, &kernel, idle, active, start, cfg)?
            }
        };
        p1 = sys.p1.clone();
        p2 = sys.p2.clone();
        out.push(sys);
    }
    Ok(out)
}

/// Distortion of the half-duplex scheme made of two one-way systems: each
/// contributes the error of the source it carries.
pub fn half_duplex_pair_report(
    hd1: &TrainedSystem,
    hd2: &TrainedSystem,
) -> Result<DistortionReport> {
    check_hd_pair(hd1, hd2)?;
    Ok(DistortionReport::from_errors([
        hd1.report.user_error[0],
        hd2.report.user_error[1],
    ]))
}
