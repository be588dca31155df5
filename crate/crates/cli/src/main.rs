use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use flashici_core::harness::{emit_plot, run_sweep, SimConfig};
use flashici_core::ldpc::generate_code;
use flashici_core::quantizer::{QuantizerBook, QuantizerRecord, DEFAULT_FINE_BINS};
use flashici_core::{DeviceParams, GrayMap, PageQuantizers};

#[derive(Parser)]
#[command(name = "flashici", version, about = "Flash ICI channel simulation and soft detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER sweep described by a TOML config and write its CSV.
    Sweep {
        config: PathBuf,
        /// Also render the results as SVG.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Render a results CSV as an SVG plot of BER against gamma_v.
    Plot {
        csv: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Design MI-optimal page read thresholds for one or more operating points.
    DesignQuantizer {
        #[arg(long, value_delimiter = ',', required = true)]
        gamma_v: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_FINE_BINS)]
        fine_bins: usize,
        /// Record file; existing entries for other points are kept.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a PEG parity-check matrix in alist format.
    GenCode {
        #[arg(long, default_value_t = 9216)]
        n: usize,
        #[arg(long, default_value_t = 0.89)]
        rate: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Sweep { config, plot } => {
            let cfg = SimConfig::load(&config)?;
            let records = run_sweep(&cfg)?;
            log::info!("wrote {} records to {}", records.len(), cfg.output.display());
            if let Some(svg) = plot {
                emit_plot(&cfg.output, &svg)?;
                log::info!("wrote {}", svg.display());
            }
        }
        Command::Plot { csv, output } => {
            let svg = output.unwrap_or_else(|| csv.with_extension("svg"));
            emit_plot(&csv, &svg)?;
            log::info!("wrote {}", svg.display());
        }
        Command::DesignQuantizer {
            gamma_v,
            alpha,
            beta,
            fine_bins,
            output,
        } => {
            let mut book = match &output {
                Some(p) if p.exists() => QuantizerBook::read(p)?,
                _ => QuantizerBook::default(),
            };
            for &a in &alpha {
                for &g in &gamma_v {
                    let params = DeviceParams::mlc(beta, g, a)?;
                    let q = PageQuantizers::design(&params, &GrayMap::mlc(), fine_bins)
                        .with_context(|| format!("designing gamma_v={g} alpha={a}"))?;
                    book.points.retain(|r| !(r.gamma_v == g && r.alpha == a && r.beta == beta));
                    book.points.push(QuantizerRecord {
                        gamma_v: g,
                        alpha: a,
                        beta,
                        lsb: q.lsb,
                        msb: q.msb,
                    });
                }
            }
            match output {
                Some(p) => book.write(&p)?,
                None => print!("{}", book.to_toml()),
            }
        }
        Command::GenCode { n, rate, seed, output } => {
            let code = generate_code(n, rate, seed)?;
            log::info!(
                "n={} k={} checks={} rate={:.4}",
                code.n(),
                code.k(),
                code.parity_check().n_rows(),
                code.rate()
            );
            match output {
                Some(p) => code.save(&p)?,
                None => print!("{}", code.to_alist()),
            }
        }
    }
    Ok(())
}
