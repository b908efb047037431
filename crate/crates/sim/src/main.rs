use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use semofdm_sim::output::{to_csv, write_file};
use semofdm_sim::{
    ExperimentSpec, FIGURE_IDS, Result, Row, SimError, Stopping, SweepKind, emit_plot_script, figure, run_sweep_with,
};

/// Optical OFDM side-effect-modulation simulator.
#[derive(Parser)]
#[command(name = "semofdm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// BER against E_b(opt)/N_0.
    Ber,
    /// BER against SEM variance.
    Variance,
    /// BER against SEM normalised frequency.
    Freq,
    /// Estimator RMSE against window length L.
    Rmse,
    /// Re-run one of the predefined figures.
    Reproduce {
        /// Figure id, e.g. fig2, fig9a, fig12.
        id: String,
    },
    /// List figure ids.
    Figures,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV (sweeps; stdout if absent) or directory (reproduce).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script.
    #[arg(long, global = true)]
    plot: bool,
    /// Full-scale budget (1e3 estimates per RMSE point, 1e7+ bits per BER point).
    #[arg(long, global = true, conflicts_with = "quick")]
    full_scale: bool,
    /// Smoke-test budget.
    #[arg(long, global = true)]
    quick: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Comma-separated axis values.
    #[arg(long, global = true, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Leave the generation timestamp out of the CSV comment block.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// No progress output.
    #[arg(long, short, global = true)]
    quiet: bool,
}

impl Common {
    fn stopping(&self, from_file: Stopping) -> Stopping {
        if self.full_scale {
            Stopping::FULL
        } else if self.quick {
            Stopping::QUICK
        } else {
            from_file
        }
    }

    fn timestamp(&self) -> Option<u64> {
        if self.no_timestamp {
            return None;
        }
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    }

    fn base_spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::load(path)?,
            None => ExperimentSpec::default(),
        };
        if let Some(seed) = self.seed {
            spec.master_seed = seed;
        }
        spec.stopping = self.stopping(spec.stopping);
        Ok(spec)
    }
}

fn progress_line(quiet: bool, label: &str, i: usize, row: &Row) {
    if quiet {
        return;
    }
    let detail = match (&row.error, row.ber, row.rmse_amp) {
        (Some(e), _, _) => format!("error: {e}"),
        (None, Some(ber), _) => format!(
            "ber={ber:.3e} ({}/{}){}",
            row.errors.unwrap_or(0),
            row.bits.unwrap_or(0),
            if row.truncated { " truncated" } else { "" }
        ),
        (None, None, Some(a)) => format!("rmse_amp={a:.4e} rmse_phase={:.4}deg", row.rmse_phase.unwrap_or(0.0)),
        _ => String::new(),
    };
    eprintln!("{label}[{i}] axis={} {detail}", row.axis);
}

fn sweep(common: &Common, kind: SweepKind) -> Result<()> {
    let mut spec = common.base_spec()?;
    if spec.sweep.kind != kind {
        spec.sweep.kind = kind;
        spec.sweep.values.clear();
    }
    if let Some(v) = &common.values {
        spec.sweep.values = v.clone();
    }
    let result = run_sweep_with(&spec, |i, row| progress_line(common.quiet, "point", i, row))?;
    let csv = to_csv(&result, common.timestamp());
    match &common.out {
        Some(path) => {
            write_file(path, &csv)?;
            if common.plot {
                emit_plot_script(&result, path, &path.with_extension("gp"))?;
            }
        }
        None => {
            if common.plot {
                return Err(SimError::Spec("--plot needs --out".into()));
            }
            std::io::stdout().write_all(csv.as_bytes()).map_err(|source| SimError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 && !common.quiet {
        eprintln!("{failed} point(s) failed; see the row annotations in the CSV");
    }
    Ok(())
}

fn reproduce(common: &Common, id: &str) -> Result<()> {
    let base = common.base_spec()?;
    let fig = figure(id, base.stopping, base.master_seed)?;
    let results = fig.run(|label, i, row| progress_line(common.quiet, label, i, row))?;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let written = fig.write(&results, &dir, common.plot, common.timestamp())?;
    if !common.quiet {
        for p in written {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(SimError::Spec("--workers must be >= 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build()?;
    pool.install(|| match &cli.command {
        Command::Ber => sweep(common, SweepKind::EbN0),
        Command::Variance => sweep(common, SweepKind::SemVariance),
        Command::Freq => sweep(common, SweepKind::SemFrequency),
        Command::Rmse => sweep(common, SweepKind::RmseVsL),
        Command::Reproduce { id } => reproduce(common, id),
        Command::Figures => {
            for id in FIGURE_IDS {
                println!("{id}");
            }
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error\tkind={}\tmessage={}", e.kind(), e.to_string().replace(['\t', '\n'], " "));
            ExitCode::FAILURE
        }
    }
}
