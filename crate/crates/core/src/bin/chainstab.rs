use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chainstab::gain_synthesis::{expand_nested, gains_from_roots, poly_from_roots};
use chainstab::harness::scenario::parse_complex;
use chainstab::harness::{
    bounds_report, parse_scenario, render, run_scenario, template, verify_suite, HarnessError, Level, Scenario,
    VerifyOptions, EXIT_CONFIG,
};
use num_complex::Complex64;

/// Finite-time stabilization of perturbed integrator chains.
#[derive(Parser, Debug)]
#[command(name = "chainstab", version, args_conflicts_with_subcommands = true)]
struct Cli {
    /// Print a commented template scenario and exit.
    #[arg(long)]
    dump_defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario, writing its trajectory CSV and metrics JSON.
    Simulate {
        scenario: PathBuf,
        /// Also print the normalized scenario.
        #[arg(long)]
        echo: bool,
    },
    /// Nested gains placing the nominal closed-loop roots.
    SynthesizeGains {
        #[arg(long)]
        order: usize,
        /// Roots such as `-1,-2+1i,-2-1i`; defaults to -1..-r.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        roots: Vec<String>,
    },
    /// Print homogeneity constants and analytic bounds of a scenario.
    Bounds { scenario: PathBuf },
    /// Run the sampled property suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict the chain checks to one order.
        #[arg(long)]
        order: Option<usize>,
        /// Replace the preset gains, e.g. `--gains 2,-3`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gains: Option<Vec<f64>>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LevelArg {
    Quick,
    Full,
}

fn load(path: &Path) -> Result<Scenario, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.to_path_buf(), source: e })?;
    parse_scenario(&text)
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn fail(e: HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn synthesize(order: usize, roots: &[String]) -> Result<String, HarnessError> {
    let roots: Vec<Complex64> = if roots.is_empty() {
        (1..=order).map(|i| Complex64::new(-(i as f64), 0.0)).collect()
    } else {
        roots
            .iter()
            .map(|s| parse_complex(s).ok_or_else(|| HarnessError::Config(format!("--roots: cannot parse '{s}'"))))
            .collect::<Result<_, _>>()?
    };
    if roots.len() != order {
        return Err(HarnessError::Config(format!("--roots: expected {order} roots, got {}", roots.len())));
    }
    let gains = gains_from_roots(&roots)?;
    let coeffs = expand_nested(gains.as_slice())?;
    let target = poly_from_roots(&roots);
    let list = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    Ok(format!(
        "gains = {}\ncharacteristic polynomial (highest power first) = {}\nfrom roots = {}\n",
        list(gains.as_slice()),
        list(&coeffs),
        list(&target)
    ))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG as u8) } else { ExitCode::SUCCESS };
        }
    };
    if cli.dump_defaults {
        print!("{}", template());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: no subcommand given (try --help)");
        return ExitCode::from(EXIT_CONFIG as u8);
    };
    match command {
        Command::Simulate { scenario, echo } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            if echo {
                print!("{}", render(&s));
            }
            match run_scenario(&s, &base_dir(&scenario)) {
                Ok(out) => {
                    if let Some(w) = out.warning {
                        eprintln!("warning: analytic bounds unavailable: {w}");
                    }
                    println!("trajectory: {}", out.trajectory_path.display());
                    println!("metrics: {}", out.metrics_path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::SynthesizeGains { order, roots } => match synthesize(order, &roots) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Bounds { scenario } => match load(&scenario).and_then(|s| bounds_report(&s)) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { level, seed, order, gains } => {
            if let (Some(r), Some(g)) = (order, &gains) {
                if r != g.len() {
                    return fail(HarnessError::Config(format!("--gains: expected {r} values, got {}", g.len())));
                }
            }
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = verify_suite(&VerifyOptions { level, seed, order, gains });
            print!("{}", report.render());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CONFIG as u8)
            }
        }
    }
}
