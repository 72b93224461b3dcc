mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mcslab::PropId;

use crate::config::{Format, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "mcslab",
    version,
    about = "Monotone comparative statics checks for non-expected-utility preferences"
)]
struct Cli {
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, env = "MCSLAB_THREADS", default_value_t = 0)]
    threads: usize,
    /// Treat a failing or violated verdict as success, and its absence as failure.
    #[arg(long, global = true)]
    expect_violation: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Input {
    /// Embedded problem instance.
    #[arg(long)]
    preset: Option<String>,
    /// JSON run configuration; `-` reads standard input.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter grid, overriding the preset or config.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Output {
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Significant digits of CSV numbers.
    #[arg(long, default_value_t = 17)]
    digits: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the hypotheses of a proposition on grids.
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Proposition id such as P1, P3.2 or A4.
        #[arg(long)]
        prop: Option<PropId>,
    },
    /// Solve for the maximizer set at every grid parameter.
    Solve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Check that the maximizer sets increase in the strong set order.
    VerifyMcs {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Compare every pair of parameters, not only neighbours.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        x_tol: Option<f64>,
    },
    /// Compare analytic local utilities with the numeric Gateaux derivative.
    OracleCheck {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Largest accepted centered error.
        #[arg(long)]
        max_error: Option<f64>,
    },
    /// Search a parametrized family for a non-monotone maximizer path.
    Search {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Parameter range `lo:hi`, one per dimension.
        #[arg(long = "range", value_parser = parse_pair)]
        ranges: Vec<(f64, f64)>,
        /// Parameter pair `theta:theta_hat` to compare.
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(f64, f64)>,
    },
    /// Run an embedded preset end to end.
    Reproduce {
        /// Preset name; `list` prints the available ones.
        name: String,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        exhaustive: bool,
    },
    /// Run the subcommand named by the `command` field of a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Outcome of a command: the rendered report and whether it carries a
/// failing or violated verdict.
pub struct Report {
    pub text: String,
    pub violated: bool,
}

fn load(input: &Input) -> Result<RunConfig> {
    let mut cfg = match &input.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if input.preset.is_some() {
        cfg.preset = input.preset.clone();
    }
    if input.theta.is_some() {
        cfg.theta_grid = input.theta.clone();
    }
    Ok(cfg)
}

fn dispatch(command: Command) -> Result<(Report, Output, Option<String>)> {
    Ok(match command {
        Command::Check {
            input,
            output,
            prop,
        } => {
            let cfg = load(&input)?;
            let r = commands::check(&cfg, prop, output.resolve(&cfg, Format::Json))?;
            (r, output, cfg.output.and_then(|o| o.path))
        }
        Command::Solve { input, output } => {
            let cfg = load(&input)?;
            let r = commands::solve(&cfg, output.resolve(&cfg, Format::Json), output.digits)?;
            (r, output, cfg.output.and_then(|o| o.path))
        }
        Command::VerifyMcs {
            input,
            output,
            exhaustive,
            x_tol,
        } => {
            let cfg = load(&input)?;
            let r = commands::verify(
                &cfg,
                exhaustive,
                x_tol,
                output.resolve(&cfg, Format::Json),
                output.digits,
            )?;
            (r, output, cfg.output.and_then(|o| o.path))
        }
        Command::OracleCheck {
            input,
            output,
            max_error,
        } => {
            let cfg = load(&input)?;
            let r = commands::oracle_check(
                &cfg,
                max_error,
                output.resolve(&cfg, Format::Json),
                output.digits,
            )?;
            (r, output, cfg.output.and_then(|o| o.path))
        }
        Command::Search {
            input,
            output,
            budget,
            seed,
            ranges,
            pairs,
        } => {
            let cfg = load(&input)?;
            let opts = commands::SearchOpts {
                budget,
                seed,
                ranges,
                pairs,
            };
            let r = commands::search(
                &cfg,
                opts,
                output.resolve(&cfg, Format::Json),
                output.digits,
            )?;
            (r, output, cfg.output.and_then(|o| o.path))
        }
        Command::Reproduce {
            name,
            output,
            exhaustive,
        } => {
            let r = commands::reproduce(
                &name,
                exhaustive,
                output.format.unwrap_or(Format::Csv),
                output.digits,
            )?;
            (r, output, None)
        }
        Command::Run { config, output } => {
            let cfg = RunConfig::load(&config)?;
            let name = cfg
                .command
                .clone()
                .context("schema error: `command` is required by `run`")?;
            let input = Input {
                config: Some(config),
                ..Input::default()
            };
            let sub = match name.as_str() {
                "check" => Command::Check {
                    input,
                    output,
                    prop: None,
                },
                "solve" => Command::Solve { input, output },
                "verify-mcs" => Command::VerifyMcs {
                    input,
                    output,
                    exhaustive: false,
                    x_tol: None,
                },
                "oracle-check" => Command::OracleCheck {
                    input,
                    output,
                    max_error: None,
                },
                "search" => Command::Search {
                    input,
                    output,
                    budget: None,
                    seed: None,
                    ranges: vec![],
                    pairs: vec![],
                },
                "reproduce" => {
                    let name = cfg
                        .preset
                        .clone()
                        .context("schema error: `reproduce` needs a `preset`")?;
                    let format = output
                        .format
                        .or(cfg.output.as_ref().and_then(|o| o.format))
                        .unwrap_or(Format::Csv);
                    let r = commands::reproduce(
                        &name,
                        cfg.mcs.is_some_and(|m| m.exhaustive),
                        format,
                        output.digits,
                    )?;
                    return Ok((r, output, cfg.output.and_then(|o| o.path)));
                }
                other => anyhow::bail!("schema error: unknown command `{other}`"),
            };
            dispatch(sub)?
        }
    })
}

impl Output {
    fn resolve(&self, cfg: &RunConfig, default: Format) -> Format {
        self.format
            .or(cfg.output.as_ref().and_then(|o| o.format))
            .unwrap_or(default)
    }
}

fn run(cli: Cli) -> Result<bool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("starting the thread pool")?;
    let (report, output, config_path) = dispatch(cli.command)?;
    match output.output.or(config_path.map(PathBuf::from)) {
        Some(path) => std::fs::write(&path, &report.text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", report.text),
    }
    Ok(report.violated)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let expect = cli.expect_violation;
    match run(cli) {
        Ok(violated) if violated == expect => ExitCode::SUCCESS,
        Ok(violated) => {
            if expect {
                eprintln!("expected a failing or violated verdict, but every check passed");
            } else {
                debug_assert!(violated);
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
