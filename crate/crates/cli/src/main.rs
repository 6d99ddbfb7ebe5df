//! `netblow` command-line front end.

mod commands;
mod error;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use error::CliResult;

#[derive(Parser, Debug)]
#[command(name = "netblow", version, about = "Blow-up analysis of nilpotent equilibria in network systems")]
struct Cli {
    /// Compact single-line JSON.
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// System file or built-in example id.
    pub system: String,
    /// Parameter bindings, e.g. `a1=2,a2=1`; override example defaults.
    #[arg(long)]
    pub params: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Probing {
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "T", default_value_t = 500.0)]
    pub t_end: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact Jacobian spectrum at a point.
    CheckNilpotent {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        zero_tol: f64,
    },
    /// Directional blow-up chart of the field shifted to `--at`.
    Blowup {
        #[command(flatten)]
        src: Source,
        /// `node:x1:+`, `param:eps:-`, `edge:w12:+`.
        #[arg(long)]
        chart: String,
        /// `x1=1,x2=1,eps=2`.
        #[arg(long, default_value = "")]
        weights: String,
        #[arg(long)]
        desing: bool,
        /// Divide by `r^k` instead of the maximal power.
        #[arg(long)]
        divide: Option<i32>,
        /// Pins applied after division, e.g. `r=0,eps_bar=1`.
        #[arg(long)]
        restrict: Option<String>,
        #[arg(long)]
        at: Option<String>,
        /// Taylor degree for trigonometric systems.
        #[arg(long, default_value_t = 2)]
        taylor: u32,
        /// Leave every parameter symbolic.
        #[arg(long)]
        symbolic: bool,
    },
    /// Compare a node chart at `r = 0` with the linear-structure template.
    StructureReport {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        chart: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Polar blow-up of a planar field.
    Polar {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        k: i32,
        /// Weights of the parameters rescaled with `r`, e.g. `w=1`.
        #[arg(long, default_value = "")]
        param_weights: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Equilibria on the circle `r = 0` of a polar chart.
    CircleEquilibria {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        k: i32,
        #[arg(long, default_value = "")]
        param_weights: String,
        /// Values of rescaled parameters, e.g. `w_bar=-1/10`.
        #[arg(long, default_value = "")]
        bar_params: String,
        #[arg(long, default_value_t = 720)]
        grid: usize,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        #[arg(long)]
        at: Option<String>,
    },
    /// Newton search for equilibria in a box.
    Equilibria {
        #[command(flatten)]
        src: Source,
        /// `x1=-1:1,x2=-1:1`.
        #[arg(long = "box")]
        bounds: String,
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Jacobian spectrum at a given point.
    Classify {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        zero_tol: f64,
    },
    /// Integrate one trajectory.
    Simulate {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        x0: String,
        #[arg(long = "T")]
        t_end: f64,
        /// Write a CSV bundle into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a small sphere around a point and integrate.
    Probe {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        at: Option<String>,
        /// Probe relative phases `ψ_i − ψ_anchor` instead of raw phases.
        #[arg(long)]
        anchor: Option<String>,
        #[command(flatten)]
        probe: Probing,
    },
    /// Phase portrait of a planar system on a lattice of initial conditions.
    Sweep {
        #[command(flatten)]
        src: Source,
        /// `x1=-1:1:11,x2=-1:1:11`.
        #[arg(long)]
        grid: String,
        #[arg(long = "T", default_value_t = 20.0)]
        t_end: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an example's verification bundle.
    Verify {
        id: String,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// List the built-in examples.
    ListExamples,
    /// Print a system in the text format.
    Emit {
        #[command(flatten)]
        src: Source,
    },
}

/// Output of a command: a JSON report, or raw text for `emit`.
pub enum Output {
    Json(Value),
    /// Report that still exits with the verification code.
    Failed(Value),
    Text(String),
}

struct Run {
    digest: Option<String>,
    seed: Option<u64>,
}

fn dispatch(cmd: Command) -> CliResult<(Output, Run)> {
    use commands as c;
    let run = |digest: String, seed: Option<u64>| Run { digest: Some(digest), seed };
    Ok(match cmd {
        Command::CheckNilpotent { src, at, zero_tol } => {
            let (o, d) = c::check_nilpotent(&src, at.as_deref(), zero_tol)?;
            (o, run(d, None))
        }
        Command::Blowup {
            src,
            chart,
            weights,
            desing,
            divide,
            restrict,
            at,
            taylor,
            symbolic,
        } => {
            let opts = c::BlowupOpts {
                chart: &chart,
                weights: &weights,
                desing,
                divide,
                restrict: restrict.as_deref(),
                at: at.as_deref(),
                taylor,
                symbolic,
            };
            let (o, d) = c::blowup(&src, &opts)?;
            (o, run(d, None))
        }
        Command::StructureReport { src, chart, at } => {
            let (o, d) = c::structure(&src, &chart, at.as_deref())?;
            (o, run(d, None))
        }
        Command::Polar { src, k, param_weights, at } => {
            let (o, d) = c::polar(&src, k, &param_weights, at.as_deref())?;
            (o, run(d, None))
        }
        Command::CircleEquilibria {
            src,
            k,
            param_weights,
            bar_params,
            grid,
            tol,
            at,
        } => {
            let (o, d) = c::circle(&src, k, &param_weights, &bar_params, grid, tol, at.as_deref())?;
            (o, run(d, None))
        }
        Command::Equilibria { src, bounds, grid, tol } => {
            let (o, d) = c::equilibria(&src, &bounds, grid, tol)?;
            (o, run(d, None))
        }
        Command::Classify { src, at, zero_tol } => {
            let (o, d) = c::classify(&src, at.as_deref(), zero_tol)?;
            (o, run(d, None))
        }
        Command::Simulate { src, x0, t_end, out } => {
            let (o, d) = c::simulate(&src, &x0, t_end, out.as_deref())?;
            (o, run(d, None))
        }
        Command::Probe { src, at, anchor, probe } => {
            let (o, d) = c::probe(&src, at.as_deref(), &probe, anchor.as_deref())?;
            (o, run(d, Some(probe.seed)))
        }
        Command::Sweep { src, grid, t_end, out } => {
            let (o, d) = c::sweep(&src, &grid, t_end, &out)?;
            (o, run(d, None))
        }
        Command::Verify { id, seed } => (c::verify(&id, seed)?, Run { digest: None, seed: Some(seed) }),
        Command::ListExamples => (c::list_examples(), Run { digest: None, seed: None }),
        Command::Emit { src } => {
            let (o, d) = c::emit(&src)?;
            (o, run(d, None))
        }
    })
}

fn print(v: &Value, compact: bool) {
    let s = if compact {
        serde_json::to_string(v)
    } else {
        serde_json::to_string_pretty(v)
    };
    let s = s.unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"));
    let _ = writeln!(std::io::stdout(), "{s}");
}

fn attach_run(mut v: Value, run: &Run, argv: &[String], seconds: f64) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert(
            "run".into(),
            json!({
                "command": argv.join(" "),
                "input_sha256": run.digest,
                "seed": run.seed,
                "seconds": seconds,
                "version": env!("CARGO_PKG_VERSION"),
            }),
        );
    }
    v
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let start = Instant::now();
    match dispatch(cli.command) {
        Ok((Output::Text(t), _)) => {
            let _ = write!(std::io::stdout(), "{t}");
            ExitCode::SUCCESS
        }
        Ok((Output::Json(v), run)) => {
            print(&attach_run(v, &run, &argv, start.elapsed().as_secs_f64()), cli.compact);
            ExitCode::SUCCESS
        }
        Ok((Output::Failed(v), run)) => {
            print(&attach_run(v, &run, &argv, start.elapsed().as_secs_f64()), cli.compact);
            ExitCode::from(3)
        }
        Err(e) => {
            print(&e.to_json(), cli.compact);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
