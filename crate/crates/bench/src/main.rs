use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use toda_bench::{
    convergence_errors, emit_table, fit_order, profile_to_csv, run_benchmark, simulate, BenchmarkMatrix,
    ReferencePolicy, TableFormat,
};
use toda_core::metrics::{soliton_region_with, SolitonRegionRule};
use toda_core::spectral::{spectrum_of, DEFAULT_SPECTRAL_HALF_WIDTH};
use toda_core::{dispersive_region, IndexWindow, InitialDataKind, MethodKind, RegionKind};

#[derive(Debug, Parser)]
#[command(name = "toda", version, about = "Toda lattice time-stepper benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one initial condition and write the (n, a_n, b_n) profile.
    Simulate {
        #[arg(long)]
        id: InitialDataKind,
        #[arg(long)]
        method: MethodKind,
        #[arg(long)]
        dt: f64,
        #[arg(long = "T")]
        t_final: f64,
        /// Half-width K of the window [-K, K]; defaults to ceil(s_max T) + 200.
        #[arg(long)]
        window: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark matrix and emit the error table.
    Benchmark {
        #[arg(long, value_delimiter = ',', default_value = "midpoint,midpointqp,sv2symp,ab4,rk4,rk4qp,rkf45")]
        methods: Vec<MethodKind>,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.001")]
        dts: Vec<f64>,
        #[arg(long = "Ts", value_delimiter = ',', default_value = "100")]
        t_finals: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "NoS,PureS,double,quad,dirac")]
        ids: Vec<InitialDataKind>,
        #[arg(long, value_delimiter = ',', default_value = "soliton,dispersive")]
        regions: Vec<RegionKind>,
        /// Directory of `<id>_T<T>.csv` reference files.
        #[arg(long)]
        reference_dir: Option<PathBuf>,
        /// Step of fine-integration references; defaults to min(dts) / 10.
        #[arg(long)]
        dt_ref: Option<f64>,
        /// Use the literal soliton region [-(s + 100) T, -T].
        #[arg(long)]
        literal_soliton_region: bool,
        #[arg(long, default_value = "markdown")]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print the bound states of an initial condition with their decay rates and speeds.
    Spectrum {
        #[arg(long)]
        id: InitialDataKind,
        /// Half-width of the truncated Jacobi matrix.
        #[arg(long, default_value_t = DEFAULT_SPECTRAL_HALF_WIDTH)]
        m: u64,
    },
    /// Print the soliton and dispersive index ranges for a final time.
    Regions {
        #[arg(long = "T")]
        t_final: f64,
        /// Initial data whose fastest soliton sets the soliton region; s_max = 1 when omitted.
        #[arg(long)]
        id: Option<InitialDataKind>,
        #[arg(long)]
        literal_soliton_region: bool,
    },
    /// Estimate the order of accuracy of a method from a step sequence.
    Order {
        #[arg(long)]
        method: MethodKind,
        #[arg(long, default_value = "double")]
        id: InitialDataKind,
        #[arg(long = "T", default_value_t = 10.0)]
        t_final: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.04,0.02,0.01")]
        dts: Vec<f64>,
        /// Step of the rk4 reference; defaults to min(dts) / 10.
        #[arg(long)]
        dt_ref: Option<f64>,
    },
}

fn soliton_rule(literal: bool) -> SolitonRegionRule {
    if literal {
        SolitonRegionRule::Literal
    } else {
        SolitonRegionRule::default()
    }
}

fn min_step(dts: &[f64]) -> f64 {
    dts.iter().copied().fold(f64::INFINITY, f64::min)
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { id, method, dt, t_final, window, out } => {
            let state = simulate(&id, method, dt, t_final, window.map(IndexWindow::symmetric))?;
            write_output(out.as_ref(), &profile_to_csv(&state, &id, method, dt))
        }
        Command::Benchmark {
            methods,
            dts,
            t_finals,
            ids,
            regions,
            reference_dir,
            dt_ref,
            literal_soliton_region,
            format,
            out,
            jobs,
        } => {
            let mut matrix = BenchmarkMatrix::new(methods, dts, t_finals, ids, regions);
            if let Some(dir) = reference_dir {
                matrix.reference_policy = ReferencePolicy::ExternalDir(dir);
            }
            matrix.dt_ref = dt_ref;
            matrix.soliton_rule = soliton_rule(literal_soliton_region);
            matrix.jobs = jobs;
            let table = run_benchmark(&matrix)?;
            write_output(out.as_ref(), &emit_table(&table, format))
        }
        Command::Spectrum { id, m } => {
            let summary = spectrum_of(&id, m)?;
            println!("{id}: {} bound state(s), s_max = {:.10}", summary.bound_states.len(), summary.s_max);
            for ((lambda, kappa), speed) in summary.bound_states.iter().zip(&summary.kappas).zip(&summary.speeds) {
                println!("lambda = {lambda:+.12}  kappa = {kappa:.12}  speed = {speed:.12}");
            }
            Ok(())
        }
        Command::Regions { t_final, id, literal_soliton_region } => {
            let s_max = match id {
                Some(id) => spectrum_of(&id, DEFAULT_SPECTRAL_HALF_WIDTH)?.s_max,
                None => 1.0,
            };
            let soliton = soliton_region_with(t_final, s_max, soliton_rule(literal_soliton_region))?;
            println!("{soliton}");
            println!("{}", dispersive_region(t_final)?);
            Ok(())
        }
        Command::Order { method, id, t_final, dts, dt_ref } => {
            let dt_ref = dt_ref.unwrap_or(min_step(&dts) / 10.0);
            let points = convergence_errors(method, &id, t_final, &dts, dt_ref)?;
            for p in &points {
                println!("dt = {}  error = {:.4e}", p.dt, p.error);
            }
            println!("{method} on {id}, T = {t_final}: observed order {:.3}", fit_order(&points)?);
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
