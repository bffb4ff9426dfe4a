use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use wcg_core::experiment::{
    cmd_pos, cmd_rho, cmd_sweep, cmd_verify, render_csv, AlphaSpec, SweepSpec,
};
use wcg_core::instance::{
    canonicalize, generate_grid_network, generate_random, generate_tau_congested, parse_document,
    serialize_instance, Metadata, RandomGameParams, WeightRange,
};
use wcg_core::rational::parse_rational;
use wcg_core::{GameInstance, ProfileKind, Rational, Scheduler};

/// Exit status for a violated theoretical guarantee (operational errors exit 1).
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "wcg", version, about = "Weighted congestion game experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate rho(d), the worst-case factor of the all-ones potential.
    Rho {
        #[arg(long, default_value_t = 4)]
        d_max: u32,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Check that a gamma profile decreases on every alpha-improvement move.
    Verify {
        #[command(flatten)]
        source: Source,
        /// ones | social | pos:<delta>
        #[arg(long, default_value = "ones")]
        profile: ProfileKind,
        /// Rational, or relative to the degree: d, d+1/2.
        #[arg(long, default_value = "d")]
        alpha: AlphaSpec,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: Output,
    },
    /// Run (d+delta)-improvement dynamics from a social optimum.
    Pos {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_delta, default_value = "0")]
        delta: Rational,
        /// best-response | max-gain | round-robin | random:<seed>
        #[arg(long, default_value = "best-response")]
        scheduler: Scheduler,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: Output,
    },
    /// Exhaustive analysis of many random instances over an alpha grid.
    Sweep {
        #[command(flatten)]
        generator: RandomArgs,
        /// Base seed; trial t uses seed + t.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,d")]
        alpha: Vec<AlphaSpec>,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: Output,
    },
    /// Generate an instance document.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Rewrite an instance document in canonical form.
    Fmt {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        generator: RandomArgs,
        #[command(flatten)]
        out: Output,
    },
    Tau {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_positive_rational)]
        tau: Rational,
        #[arg(long, default_value_t = 4)]
        players: usize,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[command(flatten)]
        out: Output,
    },
    Grid {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        rows: usize,
        #[arg(long, default_value_t = 3)]
        cols: usize,
        #[arg(long, default_value_t = 3)]
        players: usize,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 5)]
        max_num: u32,
        #[arg(long, default_value_t = 3)]
        max_den: u32,
        #[arg(long, default_value_t = 64)]
        path_cap: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug, Clone)]
struct RandomArgs {
    #[arg(long, default_value_t = 3)]
    players: usize,
    #[arg(long, default_value_t = 4)]
    resources: usize,
    #[arg(long, default_value_t = 2)]
    degree: u32,
    #[arg(long, default_value_t = 2)]
    strategies: usize,
    #[arg(long, default_value_t = 2)]
    strategy_size: usize,
    #[arg(long, default_value_t = 5)]
    max_num: u32,
    #[arg(long, default_value_t = 3)]
    max_den: u32,
}

impl RandomArgs {
    fn params(&self, seed: u64) -> RandomGameParams {
        RandomGameParams {
            seed,
            players: self.players,
            resources: self.resources,
            max_degree: self.degree,
            strategy_count: self.strategies,
            strategy_size: self.strategy_size,
            weights: WeightRange {
                max_numerator: self.max_num,
                max_denominator: self.max_den,
            },
        }
    }
}

/// Exactly one of `--instance` or `--seed` (random generator).
#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "source_choice")]
struct Source {
    /// Instance document to load.
    #[arg(long, group = "source_choice")]
    instance: Option<PathBuf>,
    /// Generate a random instance with this seed instead.
    #[arg(long, group = "source_choice")]
    seed: Option<u64>,
    #[command(flatten)]
    generator: RandomArgs,
}

impl Source {
    fn load(&self) -> Result<(GameInstance, String)> {
        match (&self.instance, self.seed) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let doc =
                    parse_document(&text).with_context(|| format!("parsing {}", path.display()))?;
                let id = doc.metadata.name.clone().unwrap_or_else(|| {
                    path.file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "instance".into())
                });
                Ok((doc.instance, id))
            }
            (None, Some(seed)) => Ok((
                generate_random(&self.generator.params(seed))?,
                format!("random-seed{seed}"),
            )),
            (None, None) => bail!("pass --instance <FILE> or --seed <SEED>"),
        }
    }
}

#[derive(Args, Debug)]
struct Caps {
    /// Largest state space any exhaustive routine will enumerate.
    #[arg(long, env = "WCG_STATE_CAP", default_value_t = wcg_core::game::DEFAULT_STATE_CAP)]
    state_cap: usize,
}

#[derive(Args, Debug)]
struct Output {
    /// Write results here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Output {
    fn write(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                Ok(stdout.flush()?)
            }
        }
    }
}

fn parse_delta(text: &str) -> std::result::Result<Rational, String> {
    let delta = parse_rational(text).ok_or_else(|| format!("'{text}' is not a rational"))?;
    if delta < Rational::from_integer(0.into()) || delta > Rational::from_integer(1.into()) {
        return Err(format!("delta {text} is outside [0, 1]"));
    }
    Ok(delta)
}

fn parse_positive_rational(text: &str) -> std::result::Result<Rational, String> {
    let value = parse_rational(text).ok_or_else(|| format!("'{text}' is not a rational"))?;
    if value <= Rational::from_integer(0.into()) {
        return Err(format!("{text} must be positive"));
    }
    Ok(value)
}

fn capacity_hint(err: wcg_core::Error) -> anyhow::Error {
    let hint = matches!(err, wcg_core::Error::Capacity { .. });
    let err = anyhow::Error::new(err);
    if hint {
        err.context(
            "instance too large; raise --state-cap (or WCG_STATE_CAP) or use a smaller instance",
        )
    } else {
        err
    }
}

fn report(ok: bool, what: &str) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("guarantee violated: {what}");
        ExitCode::from(EXIT_VIOLATION)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Rho { d_max, tol, out } => {
            let table = cmd_rho(d_max, tol)?;
            out.write(&render_csv(&table.result_rows()))?;
            Ok(report(table.all_within_bound(), "rho(d) exceeds d"))
        }
        Command::Verify {
            source,
            profile,
            alpha,
            caps,
            out,
        } => {
            let (instance, id) = source.load()?;
            let alpha = alpha.resolve(instance.max_degree());
            let result = cmd_verify(&instance, &id, &profile, &alpha, caps.state_cap)
                .map_err(capacity_hint)?;
            out.write(&render_csv(&result.result_rows()))?;
            Ok(report(
                result.passed(),
                "potential did not decrease on an improvement edge",
            ))
        }
        Command::Pos {
            source,
            delta,
            scheduler,
            caps,
            out,
        } => {
            let (instance, id) = source.load()?;
            let result = cmd_pos(&instance, &id, &delta, &scheduler, caps.state_cap)
                .map_err(capacity_hint)?;
            out.write(&render_csv(&result.result_rows()))?;
            Ok(report(
                result.within_bound(),
                "ratio exceeds (d+1)/(d+delta)",
            ))
        }
        Command::Sweep {
            generator,
            seed,
            trials,
            alpha,
            caps,
            out,
        } => {
            let spec = SweepSpec {
                base: generator.params(seed),
                trials,
                alpha_grid: alpha,
                state_cap: caps.state_cap,
            };
            let result = cmd_sweep(&spec).map_err(capacity_hint)?;
            out.write(&render_csv(&result.rows))?;
            Ok(report(
                result.guaranteed_violations == 0,
                "improvement cycle at alpha >= d",
            ))
        }
        Command::Gen { kind } => {
            let (text, out) = match kind {
                GenKind::Random {
                    seed,
                    generator,
                    out,
                } => {
                    let instance = generate_random(&generator.params(seed))?;
                    let meta = Metadata {
                        name: Some(format!("random-seed{seed}")),
                        seed: Some(seed),
                        generator: Some("random".into()),
                    };
                    (serialize_instance(&instance, &meta), out)
                }
                GenKind::Tau {
                    seed,
                    tau,
                    players,
                    degree,
                    out,
                } => {
                    let instance = generate_tau_congested(seed, &tau, players, degree)?;
                    let meta = Metadata {
                        name: Some(format!("tau-seed{seed}")),
                        seed: Some(seed),
                        generator: Some(format!(
                            "tau {}",
                            wcg_core::rational::format_rational(&tau)
                        )),
                    };
                    (serialize_instance(&instance, &meta), out)
                }
                GenKind::Grid {
                    seed,
                    rows,
                    cols,
                    players,
                    degree,
                    max_num,
                    max_den,
                    path_cap,
                    out,
                } => {
                    let weights = WeightRange {
                        max_numerator: max_num,
                        max_denominator: max_den,
                    };
                    let instance = generate_grid_network(
                        seed, rows, cols, players, degree, weights, path_cap,
                    )?;
                    let meta = Metadata {
                        name: Some(format!("grid{rows}x{cols}-seed{seed}")),
                        seed: Some(seed),
                        generator: Some("grid".into()),
                    };
                    (serialize_instance(&instance, &meta), out)
                }
            };
            out.write(&text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fmt { input, out } => {
            let text = fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let canonical =
                canonicalize(&text).with_context(|| format!("parsing {}", input.display()))?;
            out.write(&canonical)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
