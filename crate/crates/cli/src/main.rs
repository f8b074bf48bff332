use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use twcq_cli::{run_experiment, Channel, ExperimentConfig, Mode};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

/// Trains half-duplex and full-duplex quantizers for two-way channels and
/// writes an SDR table.
#[derive(Debug, Parser)]
#[command(name = "twcq", version)]
struct Args {
    /// TOML experiment file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    channel: Option<Channel>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo samples per row (0 disables simulation).
    #[arg(long, value_name = "N_SAMPLES")]
    simulate: Option<usize>,
    /// Write codebook/partition dumps and saved systems.
    #[arg(long, value_enum)]
    dump_figures: Option<Toggle>,
}

impl Args {
    fn config(&self) -> Result<ExperimentConfig, twcq_cli::CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(c) = self.channel {
            cfg.channel = c;
        }
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(n) = self.simulate {
            cfg.simulate = n;
        }
        if let Some(t) = self.dump_figures {
            cfg.dump_figures = matches!(t, Toggle::On);
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let summary = args.config().and_then(|cfg| run_experiment(&cfg));
    match summary {
        Ok(s) if s.failures() == 0 => {
            println!("{} rows written to {}", s.rows.len(), s.table.display());
            ExitCode::SUCCESS
        }
        Ok(s) => {
            eprintln!(
                "{} of {} rows failed; table written to {}",
                s.failures(),
                s.rows.len(),
                s.table.display()
            );
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
