//! Saved systems.
//!
//! A saved system is a TOML document with the sections `format`, `grid`,
//! `channel`, `role`, `training`, `partitions`, `codebooks` and `report`.
//! The grid section stores the discretization and its marginal weights, so
//! a file can be evaluated without reference to the current defaults.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use twcq::trainer::SystemRole;
use twcq::{
    ChannelKind, Codebook, DistortionReport, NoisePair, Partition, SourceConfig, SourceGrid,
    Terminal, TrainedSystem,
};

use crate::error::{io_err, CliError, LoadError};

pub const FORMAT_NAME: &str = "twcq-system";
pub const FORMAT_VERSION: i64 = 1;

const WEIGHT_SUM_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormatSection {
    name: String,
    version: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    rho: f64,
    halfwidth: f64,
    points: usize,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    kind: String,
    eps1: f64,
    eps2: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoleSection {
    /// "full" or "half"
    mode: String,
    /// Transmitting terminal (1 or 2) of a half-duplex system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    active: Option<u8>,
    /// Constant symbol of the idle terminal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    idle_symbol: Option<u8>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainingSection {
    stop_threshold: f64,
    max_iters: usize,
    trace: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionSection {
    tuple_len: usize,
    user1: Vec<usize>,
    user2: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodebookSection {
    /// Values indexed `[tuple * points + cell]`.
    user1: Vec<f64>,
    user2: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportSection {
    distortion: f64,
    sdr_db: f64,
    user_error: [f64; 2],
}

#[derive(Serialize)]
struct SavedSystem {
    format: FormatSection,
    grid: GridSection,
    channel: ChannelSection,
    role: RoleSection,
    training: TrainingSection,
    partitions: PartitionSection,
    codebooks: CodebookSection,
    report: ReportSection,
}

fn terminal_number(t: Terminal) -> u8 {
    match t {
        Terminal::One => 1,
        Terminal::Two => 2,
    }
}

/// Serializes `system` together with the marginal weights of `grid`.
pub fn system_to_string(system: &TrainedSystem, grid: &SourceGrid) -> Result<String, CliError> {
    if *grid.config() != system.source {
        return Err(CliError::Config(
            "grid does not match the system's source configuration".into(),
        ));
    }
    let role = match system.role {
        SystemRole::FullDuplex => RoleSection {
            mode: "full".into(),
            active: None,
            idle_symbol: None,
        },
        SystemRole::HalfDuplex {
            active,
            idle_symbol,
        } => RoleSection {
            mode: "half".into(),
            active: Some(terminal_number(active)),
            idle_symbol: Some(idle_symbol),
        },
    };
    let doc = SavedSystem {
        format: FormatSection {
            name: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
        },
        grid: GridSection {
            rho: system.source.rho,
            halfwidth: system.source.grid_halfwidth,
            points: system.source.grid_points,
            weights: grid.weights().to_vec(),
        },
        channel: ChannelSection {
            kind: system.channel.short_name().into(),
            eps1: system.noise.eps1,
            eps2: system.noise.eps2,
        },
        role,
        training: TrainingSection {
            stop_threshold: system.stop_threshold,
            max_iters: system.max_iters,
            trace: system.trace.clone(),
        },
        partitions: PartitionSection {
            tuple_len: system.rate_bits(),
            user1: system.p1.indices().collect(),
            user2: system.p2.indices().collect(),
        },
        codebooks: CodebookSection {
            user1: system.c1.values().to_vec(),
            user2: system.c2.values().to_vec(),
        },
        report: ReportSection {
            distortion: system.report.distortion,
            sdr_db: system.report.sdr_db,
            user_error: system.report.user_error,
        },
    };
    toml::to_string(&doc).map_err(|e| CliError::Config(format!("serializing system: {e}")))
}

pub fn save_system(system: &TrainedSystem, grid: &SourceGrid, path: &Path) -> Result<(), CliError> {
    let text = system_to_string(system, grid)?;
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn load_system(path: &Path) -> Result<TrainedSystem, CliError> {
    Ok(load_system_with_grid(path)?.0)
}

/// Loads a system together with the grid rebuilt from its own grid section.
pub fn load_system_with_grid(path: &Path) -> Result<(TrainedSystem, SourceGrid), CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(system_from_str(&text)?)
}

/// Parses and validates a saved system, rebuilding its grid to check the
/// stored weights.
pub fn system_from_str(text: &str) -> Result<(TrainedSystem, SourceGrid), LoadError> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| LoadError::Syntax(e.to_string()))?;

    let format: FormatSection = section(&doc, "format")?;
    if format.name != FORMAT_NAME {
        return Err(LoadError::Malformed {
            section: "format",
            message: format!("name `{}`", format.name),
        });
    }
    if format.version != FORMAT_VERSION {
        return Err(LoadError::Version {
            found: format.version,
            expected: FORMAT_VERSION,
        });
    }

    let g: GridSection = section(&doc, "grid")?;
    let source = SourceConfig::with_grid(g.rho, g.halfwidth, g.points);
    let grid = check_grid(source, &g.weights)?;

    let c: ChannelSection = section(&doc, "channel")?;
    let channel: ChannelKind = c.kind.parse().map_err(|e: twcq::Error| invariant("channel", e))?;
    let noise = NoisePair::new(c.eps1, c.eps2).map_err(|e| invariant("channel", e))?;

    let r: RoleSection = section(&doc, "role")?;
    let role = match (r.mode.as_str(), r.active, r.idle_symbol) {
        ("full", None, None) => SystemRole::FullDuplex,
        ("half", Some(a @ (1 | 2)), Some(s @ (0 | 1))) => SystemRole::HalfDuplex {
            active: if a == 1 { Terminal::One } else { Terminal::Two },
            idle_symbol: s,
        },
        _ => {
            return Err(invariant(
                "role",
                "expected mode = \"full\", or mode = \"half\" with active in {1, 2} and idle_symbol in {0, 1}",
            ))
        }
    };

    let t: TrainingSection = section(&doc, "training")?;
    if !(t.stop_threshold > 0.0) || t.max_iters == 0 {
        return Err(invariant("training", "stop_threshold and max_iters must be positive"));
    }
    if t.trace.iter().any(|d| !d.is_finite()) {
        return Err(invariant("training", "trace has a non-finite entry"));
    }

    let p: PartitionSection = section(&doc, "partitions")?;
    let points = source.grid_points;
    let partition = |cells: Vec<usize>, who: &str| {
        if cells.len() != points {
            return Err(invariant(
                "partitions",
                format!("{who} has {} cells, grid has {points}", cells.len()),
            ));
        }
        Partition::new(p.tuple_len, cells).map_err(|e| invariant("partitions", format!("{who}: {e}")))
    };
    let p1 = partition(p.user1, "user1")?;
    let p2 = partition(p.user2, "user2")?;

    let cb: CodebookSection = section(&doc, "codebooks")?;
    let codebook = |values: Vec<f64>, who: &str| {
        Codebook::new(p.tuple_len, points, values).map_err(|e| invariant("codebooks", format!("{who}: {e}")))
    };
    let c1 = codebook(cb.user1, "user1")?;
    let c2 = codebook(cb.user2, "user2")?;

    let rep: ReportSection = section(&doc, "report")?;
    let report = DistortionReport::from_errors(rep.user_error);
    if (report.distortion - rep.distortion).abs() > 1e-12 * rep.distortion.abs().max(1.0) {
        return Err(invariant("report", "distortion is not the sum of the user errors"));
    }

    let system = TrainedSystem {
        p1,
        p2,
        c1,
        c2,
        source,
        channel,
        noise,
        role,
        stop_threshold: t.stop_threshold,
        max_iters: t.max_iters,
        report,
        trace: t.trace,
    };
    Ok((system, grid))
}

fn section<T: DeserializeOwned>(doc: &toml::Table, name: &'static str) -> Result<T, LoadError> {
    let value = doc.get(name).ok_or(LoadError::Missing { section: name })?;
    value.clone().try_into().map_err(|e: toml::de::Error| LoadError::Malformed {
        section: name,
        message: e.message().to_string(),
    })
}

fn invariant(section: &'static str, message: impl ToString) -> LoadError {
    LoadError::Invariant {
        section,
        message: message.to_string(),
    }
}

fn check_grid(source: SourceConfig, weights: &[f64]) -> Result<SourceGrid, LoadError> {
    if weights.len() != source.grid_points {
        return Err(invariant(
            "grid",
            format!("{} weights for {} points", weights.len(), source.grid_points),
        ));
    }
    let sum: f64 = weights.iter().sum();
    if !((sum - 1.0).abs() <= WEIGHT_SUM_TOL) {
        return Err(invariant("grid", format!("weights sum to {sum}, not 1")));
    }
    let grid = SourceGrid::build(source).map_err(|e| invariant("grid", e))?;
    let worst = grid
        .weights()
        .iter()
        .zip(weights)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if worst > WEIGHT_TOL {
        return Err(invariant(
            "grid",
            format!("stored weights differ from the rebuilt grid by {worst:e}"),
        ));
    }
    Ok(grid)
}
