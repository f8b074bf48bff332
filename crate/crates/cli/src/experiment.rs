//! Batch runs over (rho, rate pair, noise point).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use twcq::design::{anneal_full_duplex, anneal_half_duplex, HalfDuplexPoint};
use twcq::quantizer::sdr_db;
use twcq::simulator::simulate_on;
use twcq::{ChannelKind, NoisePair, SourceGrid, Terminal, TrainedSystem};

use crate::config::{ExperimentConfig, Mode};
use crate::dump::{dump_codebook, dump_partition};
use crate::error::{csv_err, io_err, CliError};
use crate::persist::save_system;

pub const TABLE_HEADER: [&str; 8] = [
    "correlation",
    "rate",
    "mode",
    "eps1",
    "eps2",
    "sdr_db_analytic",
    "sdr_db_empirical",
    "iterations",
];

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Ok {
        sdr_db_analytic: f64,
        sdr_db_empirical: Option<f64>,
        iterations: usize,
    },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub correlation: f64,
    pub rate: usize,
    /// `Mode::Half` or `Mode::Full`.
    pub mode: Mode,
    pub noise: NoisePair,
    pub outcome: RowOutcome,
}

impl TableRow {
    pub fn failed(&self) -> bool {
        matches!(self.outcome, RowOutcome::Failed(_))
    }

    fn record(&self) -> [String; 8] {
        let mode = match self.mode {
            Mode::Half => "half",
            _ => "full",
        };
        let (analytic, empirical, iterations) = match &self.outcome {
            RowOutcome::Ok {
                sdr_db_analytic,
                sdr_db_empirical,
                iterations,
            } => (
                format!("{sdr_db_analytic:.4}"),
                sdr_db_empirical.map_or(String::new(), |v| format!("{v:.4}")),
                iterations.to_string(),
            ),
            RowOutcome::Failed(_) => ("failed".into(), "failed".into(), "-1".into()),
        };
        [
            self.correlation.to_string(),
            self.rate.to_string(),
            mode.into(),
            self.noise.eps1.to_string(),
            self.noise.eps2.to_string(),
            analytic,
            empirical,
            iterations,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub rows: Vec<TableRow>,
    pub table: PathBuf,
}

impl RunSummary {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }
}

/// Trains every configured design, writes `table.csv` (and, with
/// `dump_figures`, the `figures/` and `systems/` directories) under
/// `cfg.out`.
///
/// Training failures become `failed` rows; only configuration and I/O
/// problems abort the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let train = cfg.train_config()?;
    let schedule = cfg.schedule()?;
    fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    let dumps = if cfg.dump_figures {
        let d = Dumps {
            figures: cfg.out.join("figures"),
            systems: cfg.out.join("systems"),
        };
        fs::create_dir_all(&d.figures).map_err(io_err(&d.figures))?;
        fs::create_dir_all(&d.systems).map_err(io_err(&d.systems))?;
        Some(d)
    } else {
        None
    };

    let kind = cfg.kind();
    let mut rows = Vec::new();
    for &rho in &cfg.rho {
        let grid = match SourceGrid::build(cfg.source(rho)) {
            Ok(g) => g,
            Err(e) => {
                for &[half, full] in &cfg.rates {
                    push_failed(&mut rows, cfg, rho, half, full, &schedule, &e.to_string());
                }
                continue;
            }
        };
        let mut half_cache: BTreeMap<usize, Result<Vec<HalfDuplexPoint>, String>> = BTreeMap::new();
        let mut half_designs = |rate: usize| {
            half_cache
                .entry(rate)
                .or_insert_with(|| {
                    eprintln!("rho {rho}: half-duplex {} r={rate}", kind.short_name());
                    anneal_half_duplex(&grid, kind, rate, &train).map_err(|e| e.to_string())
                })
                .clone()
        };
        for &[half, full] in &cfg.rates {
            if cfg.mode.half() {
                match half_designs(half) {
                    Ok(points) => {
                        for p in &points {
                            let row_seed = cfg.seed.wrapping_add(2 * rows.len() as u64);
                            let outcome = half_row(p, &grid, cfg.simulate, row_seed);
                            rows.push(TableRow {
                                correlation: rho,
                                rate: half,
                                mode: Mode::Half,
                                noise: p.noise,
                                outcome,
                            });
                            if let Some(d) = &dumps {
                                let stem = d.stem(kind, rho, "half", half, p.noise);
                                d.write(&p.user1, &grid, &format!("{stem}_u1"))?;
                                d.write(&p.user2, &grid, &format!("{stem}_u2"))?;
                            }
                        }
                    }
                    Err(e) => push_rows(&mut rows, rho, half, Mode::Half, &schedule, &e),
                }
            }
            if cfg.mode.full() {
                eprintln!("rho {rho}: full-duplex {} r={full}", kind.short_name());
                let designed = match kind {
                    // BA bootstraps from same-rate half-duplex designs
                    ChannelKind::BinaryAdditive => half_designs(full),
                    // BM pads half-rate designs
                    ChannelKind::BinaryMultiplying => half_designs(half),
                }
                .and_then(|seeds| {
                    anneal_full_duplex(&grid, kind, full, &train, Some(&seeds)).map_err(|e| e.to_string())
                });
                match designed {
                    Ok(systems) => {
                        for sys in &systems {
                            let row_seed = cfg.seed.wrapping_add(2 * rows.len() as u64);
                            let outcome = full_row(sys, &grid, cfg.simulate, row_seed);
                            rows.push(TableRow {
                                correlation: rho,
                                rate: full,
                                mode: Mode::Full,
                                noise: sys.noise,
                                outcome,
                            });
                            if let Some(d) = &dumps {
                                d.write(sys, &grid, &d.stem(kind, rho, "full", full, sys.noise))?;
                            }
                        }
                    }
                    Err(e) => push_rows(&mut rows, rho, full, Mode::Full, &schedule, &e),
                }
            }
        }
    }

    let table = cfg.out.join("table.csv");
    write_table(&rows, &table)?;
    Ok(RunSummary { rows, table })
}

fn half_row(p: &HalfDuplexPoint, grid: &SourceGrid, n: usize, seed: u64) -> RowOutcome {
    let empirical = if n == 0 {
        None
    } else {
        // each direction contributes the error of the user it serves
        let sims = simulate_on(&p.user1, grid, n, seed)
            .and_then(|a| Ok((a, simulate_on(&p.user2, grid, n, seed.wrapping_add(1))?)));
        match sims {
            Ok((a, b)) => Some(sdr_db(a.empirical_user_error[0] + b.empirical_user_error[1])),
            Err(e) => return RowOutcome::Failed(e.to_string()),
        }
    };
    RowOutcome::Ok {
        sdr_db_analytic: p.report.sdr_db,
        sdr_db_empirical: empirical,
        iterations: p.iterations(),
    }
}

fn full_row(sys: &TrainedSystem, grid: &SourceGrid, n: usize, seed: u64) -> RowOutcome {
    let empirical = if n == 0 {
        None
    } else {
        match simulate_on(sys, grid, n, seed) {
            Ok(s) => Some(s.empirical_sdr_db),
            Err(e) => return RowOutcome::Failed(e.to_string()),
        }
    };
    RowOutcome::Ok {
        sdr_db_analytic: sys.report.sdr_db,
        sdr_db_empirical: empirical,
        iterations: sys.iterations(),
    }
}

fn push_rows(rows: &mut Vec<TableRow>, rho: f64, rate: usize, mode: Mode, schedule: &[NoisePair], why: &str) {
    eprintln!("rho {rho} r={rate}: training failed: {why}");
    for &noise in schedule {
        rows.push(TableRow {
            correlation: rho,
            rate,
            mode,
            noise,
            outcome: RowOutcome::Failed(why.to_string()),
        });
    }
}

fn push_failed(
    rows: &mut Vec<TableRow>,
    cfg: &ExperimentConfig,
    rho: f64,
    half: usize,
    full: usize,
    schedule: &[NoisePair],
    why: &str,
) {
    if cfg.mode.half() {
        push_rows(rows, rho, half, Mode::Half, schedule, why);
    }
    if cfg.mode.full() {
        push_rows(rows, rho, full, Mode::Full, schedule, why);
    }
}

pub fn write_table(rows: &[TableRow], path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(TABLE_HEADER).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row.record()).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

struct Dumps {
    figures: PathBuf,
    systems: PathBuf,
}

impl Dumps {
    fn stem(&self, kind: ChannelKind, rho: f64, mode: &str, rate: usize, noise: NoisePair) -> String {
        format!(
            "{}_rho{rho}_{mode}_r{rate}_e{}_{}",
            kind.short_name(),
            noise.eps1,
            noise.eps2
        )
    }

    fn write(&self, sys: &TrainedSystem, grid: &SourceGrid, stem: &str) -> Result<(), CliError> {
        for (t, tag) in [(Terminal::One, "t1"), (Terminal::Two, "t2")] {
            dump_codebook(sys, t, &self.figures.join(format!("{stem}_{tag}_codebook.csv")))?;
            dump_partition(sys, t, &self.figures.join(format!("{stem}_{tag}_partition.csv")))?;
        }
        save_system(sys, grid, &self.systems.join(format!("{stem}.toml")))
    }
}
