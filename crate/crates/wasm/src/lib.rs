//! Browser bindings: train a small design, inspect its encoders and
//! decoders, simulate it, and plot the idle-symbol mutual information.
//!
//! Errors cross the boundary as strings so the same functions run in
//! native tests.

use twcq::capacity::{conditional_mi, optimal_constant_symbol};
use twcq::design::{anneal_full_duplex, anneal_half_duplex, HalfDuplexPoint};
use twcq::quantizer::sdr_db;
use twcq::simulator::simulate_on;
use twcq::{
    ChannelKind, Codebook, NoisePair, Partition, SourceConfig, SourceGrid, Terminal, TrainConfig,
    TrainedSystem, TwcKernel,
};
use wasm_bindgen::prelude::*;

const HALFWIDTH: f64 = 8.0;
const MAX_POINTS: usize = 1000;
const MAX_RATE: usize = 4;
const MAX_SAMPLES: usize = 2_000_000;

fn kind(channel: &str) -> Result<ChannelKind, String> {
    channel.parse().map_err(|e: twcq::Error| e.to_string())
}

fn terminal(t: u8) -> Result<Terminal, String> {
    match t {
        1 => Ok(Terminal::One),
        2 => Ok(Terminal::Two),
        _ => Err(format!("terminal must be 1 or 2, got {t}")),
    }
}

fn noise(eps1: f64, eps2: f64) -> Result<NoisePair, String> {
    NoisePair::new(eps1, eps2).map_err(|e| e.to_string())
}

enum Trained {
    Full(TrainedSystem),
    Half(HalfDuplexPoint),
}

#[wasm_bindgen]
pub struct Design {
    grid: SourceGrid,
    trained: Trained,
}

#[wasm_bindgen]
impl Design {
    /// Trains a design on a `points`-cell grid, annealing from the
    /// noiseless channel to `(eps1, eps2)`.
    #[wasm_bindgen(constructor)]
    pub fn new(
        channel: &str,
        full_duplex: bool,
        rho: f64,
        rate: usize,
        eps1: f64,
        eps2: f64,
        points: usize,
    ) -> Result<Design, String> {
        let kind = kind(channel)?;
        if !(1..=MAX_RATE).contains(&rate) {
            return Err(format!("rate must be 1..={MAX_RATE}"));
        }
        if !(2..=MAX_POINTS).contains(&points) {
            return Err(format!("points must be 2..={MAX_POINTS}"));
        }
        let target = noise(eps1, eps2)?;
        let mut schedule = vec![NoisePair::NOISELESS];
        if target != NoisePair::NOISELESS {
            schedule.push(target);
        }
        let cfg = TrainConfig {
            anneal_schedule: schedule,
            ..TrainConfig::default()
        };
        let grid = SourceGrid::build(SourceConfig::with_grid(rho, HALFWIDTH, points))
            .map_err(|e| e.to_string())?;
        let trained = if full_duplex {
            let mut chain = anneal_full_duplex(&grid, kind, rate, &cfg, None).map_err(|e| e.to_string())?;
            Trained::Full(chain.pop().expect("schedule is not empty"))
        } else {
            let mut chain = anneal_half_duplex(&grid, kind, rate, &cfg).map_err(|e| e.to_string())?;
            Trained::Half(chain.pop().expect("schedule is not empty"))
        };
        Ok(Design { grid, trained })
    }

    #[wasm_bindgen(getter)]
    pub fn sdr_db(&self) -> f64 {
        match &self.trained {
            Trained::Full(s) => s.report.sdr_db,
            Trained::Half(p) => p.report.sdr_db,
        }
    }

    #[wasm_bindgen(getter)]
    pub fn distortion(&self) -> f64 {
        match &self.trained {
            Trained::Full(s) => s.report.distortion,
            Trained::Half(p) => p.report.distortion,
        }
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        match &self.trained {
            Trained::Full(s) => s.iterations(),
            Trained::Half(p) => p.iterations(),
        }
    }

    #[wasm_bindgen(getter)]
    pub fn rate(&self) -> usize {
        self.encoder(Terminal::One).tuple_len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.grid.centers().to_vec()
    }

    /// Tuple index sent from every grid cell by terminal `t`.
    pub fn partition(&self, t: u8) -> Result<Vec<u32>, String> {
        Ok(self.encoder(terminal(t)?).indices().map(|i| i as u32).collect())
    }

    /// Estimates of the remote source at terminal `t` for received tuple
    /// `tuple`, one per local grid cell.
    pub fn codebook(&self, t: u8, tuple: usize) -> Result<Vec<f64>, String> {
        let cb = self.decoder(terminal(t)?);
        if tuple >= cb.tuples() {
            return Err(format!("tuple {tuple} out of range for {} tuples", cb.tuples()));
        }
        Ok(cb.column(tuple).to_vec())
    }

    /// Monte Carlo run of `n` source pairs through the design.
    pub fn simulate(&self, n: usize, seed: u32) -> Result<Simulation, String> {
        if !(1..=MAX_SAMPLES).contains(&n) {
            return Err(format!("samples must be 1..={MAX_SAMPLES}"));
        }
        let seed = u64::from(seed);
        let distortion = match &self.trained {
            Trained::Full(s) => simulate_on(s, &self.grid, n, seed).map_err(|e| e.to_string())?.empirical_distortion,
            Trained::Half(p) => {
                let a = simulate_on(&p.user1, &self.grid, n, seed).map_err(|e| e.to_string())?;
                let b = simulate_on(&p.user2, &self.grid, n, seed + 1).map_err(|e| e.to_string())?;
                a.empirical_user_error[0] + b.empirical_user_error[1]
            }
        };
        Ok(Simulation {
            distortion,
            sdr_db: sdr_db(distortion),
        })
    }
}

impl Design {
    fn encoder(&self, t: Terminal) -> &Partition {
        match (&self.trained, t) {
            (Trained::Full(s), t) => s.partition(t),
            (Trained::Half(p), Terminal::One) => &p.user1.p1,
            (Trained::Half(p), Terminal::Two) => &p.user2.p2,
        }
    }

    fn decoder(&self, t: Terminal) -> &Codebook {
        match (&self.trained, t) {
            (Trained::Full(s), t) => s.codebook(t),
            // terminal 1 decodes user 2's slot and vice versa
            (Trained::Half(p), Terminal::One) => &p.user2.c1,
            (Trained::Half(p), Terminal::Two) => &p.user1.c2,
        }
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct Simulation {
    pub distortion: f64,
    pub sdr_db: f64,
}

/// `I(X_active; Y | X_idle = symbol)` at `samples` evenly spaced input
/// probabilities in `[0, 1]`, with the idle user at terminal `idle`.
#[wasm_bindgen]
pub fn mi_curve(
    channel: &str,
    eps1: f64,
    eps2: f64,
    idle: u8,
    symbol: u8,
    samples: usize,
) -> Result<Vec<f64>, String> {
    if symbol > 1 {
        return Err(format!("symbol must be 0 or 1, got {symbol}"));
    }
    if samples < 2 {
        return Err("need at least 2 samples".into());
    }
    let kernel = TwcKernel::new(kind(channel)?, noise(eps1, eps2)?).map_err(|e| e.to_string())?;
    let idle = terminal(idle)?;
    Ok((0..samples)
        .map(|i| conditional_mi(&kernel, symbol, idle, i as f64 / (samples - 1) as f64))
        .collect())
}

/// `[symbol, mutual information in bits, maximizing input probability]`
/// for the best constant symbol of the idle user at terminal `idle`.
#[wasm_bindgen]
pub fn best_idle_symbol(channel: &str, eps1: f64, eps2: f64, idle: u8) -> Result<Vec<f64>, String> {
    let kernel = TwcKernel::new(kind(channel)?, noise(eps1, eps2)?).map_err(|e| e.to_string())?;
    let best = optimal_constant_symbol(&kernel, terminal(idle)?);
    Ok(vec![f64::from(best.symbol), best.mi_bits, best.input_prob])
}
