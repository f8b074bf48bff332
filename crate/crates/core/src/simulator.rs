//! Monte Carlo transmission of continuous source pairs through a trained system.
//!
//! Samples are drawn in fixed-size batches. Batch `b` takes its source draws
//! from ChaCha stream `2b` and its channel noise from stream `2b + 1` of the
//! run seed, so results do not depend on how batches are scheduled and a
//! larger `n_samples` extends a smaller run instead of reshuffling it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{sample_outputs, IndexTuple, TwcKernel};
use crate::error::{Error, Result};
use crate::par;
use crate::quantizer::sdr_db;
use crate::source::SourceGrid;
use crate::trainer::TrainedSystem;

const BATCH: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub n_samples: usize,
    pub empirical_distortion: f64,
    pub empirical_sdr_db: f64,
    /// Standard error of the mean per-sample distortion.
    pub std_error: f64,
    /// `[mean (U1 - U1^)^2, mean (U2 - U2^)^2]`
    pub empirical_user_error: [f64; 2],
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs `n_samples` source pairs with correlation `rho` through `system`
/// over `kernel`.
///
/// Each continuous sample is encoded, and decoded against its local side
/// information, through the grid cell containing it (clamped to the support).
pub fn simulate(
    system: &TrainedSystem,
    kernel: &TwcKernel,
    rho: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SimReport> {
    if n_samples == 0 {
        return Err(Error::Config("n_samples must be at least 1".into()));
    }
    if !(rho.abs() < 1.0) {
        return Err(Error::DegenerateDensity(rho.abs()));
    }
    let cfg = system.source;
    cfg.validate()?;
    let locate = CellLocator::new(cfg.grid_halfwidth, cfg.grid_points);
    let len = system.rate_bits();
    let spread = (1.0 - rho * rho).sqrt();

    let batches = n_samples.div_ceil(BATCH);
    let sums = par::map_range(batches, |b| -> Result<[f64; 4]> {
        let count = BATCH.min(n_samples - b * BATCH);
        let mut src = stream(seed, 2 * b as u64);
        let mut noise = stream(seed, 2 * b as u64 + 1);
        let mut acc = [0.0; 4];
        for _ in 0..count {
            let z1: f64 = src.sample(StandardNormal);
            let z2: f64 = src.sample(StandardNormal);
            let u1 = z1;
            let u2 = rho * z1 + spread * z2;
            let (j1, j2) = (locate.cell(u1), locate.cell(u2));
            let x1 = IndexTuple::new(system.p1.index_of(j1), len)?;
            let x2 = IndexTuple::new(system.p2.index_of(j2), len)?;
            let (y1, y2) = sample_outputs(kernel, &x1, &x2, &mut noise)?;
            let u1_hat = system.c2.decode(&y2, j2)?;
            let u2_hat = system.c1.decode(&y1, j1)?;
            let (e1, e2) = ((u1 - u1_hat).powi(2), (u2 - u2_hat).powi(2));
            let e = e1 + e2;
            acc[0] += e;
            acc[1] += e * e;
            acc[2] += e1;
            acc[3] += e2;
        }
        Ok(acc)
    });
    let mut tot = [0.0; 4];
    for part in sums {
        for (t, v) in tot.iter_mut().zip(part?) {
            *t += v;
        }
    }
    let [s, s2, s_1, s_2] = tot;
    let n = n_samples as f64;
    let mean = s / n;
    let var = if n_samples > 1 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SimReport {
        n_samples,
        empirical_distortion: mean,
        empirical_sdr_db: sdr_db(mean),
        std_error: (var / n).sqrt(),
        empirical_user_error: [s_1 / n, s_2 / n],
    })
}

/// Same cell convention as [`SourceGrid::cell_of`] without building the tables.
struct CellLocator {
    lo: f64,
    spacing: f64,
    points: usize,
}

impl CellLocator {
    fn new(halfwidth: f64, points: usize) -> Self {
        Self {
            lo: -halfwidth,
            spacing: 2.0 * halfwidth / points as f64,
            points,
        }
    }

    fn cell(&self, u: f64) -> usize {
        let pos = ((u - self.lo) / self.spacing).floor();
        if pos.is_nan() || pos < 0.0 {
            0
        } else {
            (pos as usize).min(self.points - 1)
        }
    }
}

/// Simulation against the grid's own correlation.
pub fn simulate_on(
    system: &TrainedSystem,
    grid: &SourceGrid,
    n_samples: usize,
    seed: u64,
) -> Result<SimReport> {
    simulate(system, &system.kernel()?, grid.rho(), n_samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelKind, NoisePair, Terminal};
    use crate::source::SourceConfig;
    use crate::trainer::{init_uniform, train_half_duplex, TrainConfig};

    #[test]
    fn locator_matches_grid() {
        let grid = SourceGrid::build(SourceConfig::with_grid(0.2, 3.0, 17)).unwrap();
        let loc = CellLocator::new(3.0, 17);
        for i in -400..400 {
            let u = i as f64 * 0.0173;
            assert_eq!(loc.cell(u), grid.cell_of(u));
        }
    }

    #[test]
    fn deterministic_and_rejects_empty() {
        let grid = SourceGrid::build(SourceConfig::with_grid(0.5, 8.0, 200)).unwrap();
        let kernel =
            TwcKernel::new(ChannelKind::BinaryAdditive, NoisePair::new(0.05, 0.1).unwrap()).unwrap();
        let init = init_uniform(&grid, 1).unwrap();
        let sys = train_half_duplex(&grid, &kernel, 0, Terminal::One, init, &TrainConfig::default())
            .unwrap();
        let a = simulate(&sys, &kernel, 0.5, 100_000, 9).unwrap();
        let b = simulate(&sys, &kernel, 0.5, 100_000, 9).unwrap();
        assert_eq!(a, b);
        let c = simulate(&sys, &kernel, 0.5, 100_000, 10).unwrap();
        assert_ne!(a.empirical_distortion, c.empirical_distortion);
        assert!(simulate(&sys, &kernel, 0.5, 0, 9).is_err());
        assert!(simulate(&sys, &kernel, 1.0, 10, 9).is_err());
    }
}
