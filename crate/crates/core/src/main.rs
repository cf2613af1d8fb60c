//! Command-line front end: JSON config in, JSON report out.
//!
//! Exit codes: 0 = pass / no violation found, 1 = fail / violation found,
//! 2 = usage or validation error.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use holoconvex::config::{MappingConfig, RunConfig};
use holoconvex::falsifier::SearchConfig;
use holoconvex::report::Report;
use holoconvex::{criterion, falsifier, geometry, hypotheses, Error};

#[derive(Parser)]
#[command(
    name = "holoconvex",
    version,
    about = "Numerical convexity checks for normalized holomorphic mappings on p-ball domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration document (domain, mapping, point).
    #[arg(long)]
    config: PathBuf,
    /// Random samples drawn by sampling commands.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Violation threshold: J below -tol counts as a violation.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Lower edge of the sampled rho shell.
    #[arg(long = "rho-floor", default_value_t = 0.3)]
    rho_floor: f64,
    /// Search restarts (falsify).
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Minkowski functional at the configured point.
    Rho(Common),
    /// Check one of the built-in sufficient-condition systems.
    Check {
        /// Condition system: 1, 2, 3, or 4.
        theorem: u8,
        /// Coupling coordinate for system 3 (1-based; defaults to n).
        #[arg(long)]
        coupling: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo scan of the criterion over constrained samples.
    Scan(Common),
    /// Multi-start simplex search for criterion violations.
    Falsify(Common),
    /// Scan plus warm-started search under a shared budget.
    Certify(Common),
    /// Validate the coefficient bounds of one of the example families.
    ValidateExample {
        /// Example family: 1, 2, 3, or 4.
        which: u8,
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    std::process::exit(run() as i32);
}

fn run() -> u8 {
    let cli = Cli::parse();
    let started = Instant::now();
    match dispatch(&cli.command) {
        Ok((mut report, common)) => {
            report.timing_ms = started.elapsed().as_millis() as u64;
            let text = report.to_json();
            match &common.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        eprintln!("holoconvex: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("holoconvex: {e}");
            2
        }
    }
}

fn load(common: &Common) -> Result<RunConfig, Error> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", common.config.display())))?;
    RunConfig::from_json(&text)
}

fn dispatch(command: &Command) -> Result<(Report, Common), Error> {
    match command {
        Command::Rho(common) => {
            let cfg = load(common)?;
            let dom = cfg.domain()?;
            let point = cfg.point()?;
            let rho = geometry::minkowski(&dom, &point)?;
            Ok((
                Report::for_rho(cfg.domain.clone(), &rho),
                clone_common(common),
            ))
        }
        Command::Check {
            theorem,
            coupling,
            common,
        } => {
            let cfg = load(common)?;
            let dom = cfg.domain()?;
            let spec = cfg.mapping()?;
            let mapping = mapping_echo(&cfg)?;
            let check = match theorem {
                1 => hypotheses::check_theorem1(
                    &dom,
                    &spec,
                    common.samples,
                    common.seed,
                    common.threads,
                )?,
                2 => hypotheses::check_theorem2(
                    &dom,
                    &spec,
                    common.samples,
                    common.seed,
                    common.threads,
                )?,
                3 => {
                    let k = coupling.unwrap_or(dom.n());
                    hypotheses::check_theorem3(
                        &dom,
                        &spec,
                        k,
                        common.samples,
                        common.seed,
                        common.threads,
                    )?
                }
                4 => {
                    let p = dom.exponents();
                    if p.len() != 2 || p[0] != p[1] {
                        return Err(Error::InvalidConfig(
                            "system 4 is stated on the two-dimensional equal-exponent ball; \
                             use p = [q, q]"
                                .into(),
                        ));
                    }
                    dom.require_criterion_exponents()?;
                    hypotheses::check_theorem4(&spec)?
                }
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown condition system {theorem}; expected 1..=4"
                    )))
                }
            };
            Ok((
                Report::for_check("check", cfg.domain.clone(), mapping, &check),
                clone_common(common),
            ))
        }
        Command::Scan(common) => {
            let cfg = load(common)?;
            let dom = cfg.domain()?;
            let spec = cfg.mapping()?;
            let mapping = mapping_echo(&cfg)?;
            let scan = criterion::scan(
                &dom,
                &spec,
                common.samples,
                common.seed,
                common.rho_floor,
                common.tol,
                common.threads,
            )?;
            Ok((
                Report::for_scan(cfg.domain.clone(), mapping, &scan),
                clone_common(common),
            ))
        }
        Command::Falsify(common) => {
            let cfg = load(common)?;
            let dom = cfg.domain()?;
            let spec = cfg.mapping()?;
            let mapping = mapping_echo(&cfg)?;
            let search_cfg = SearchConfig {
                restarts: common.restarts,
                iterations: cfg.iterations.unwrap_or(500),
                seed: common.seed,
                rho_floor: common.rho_floor.max(1e-3),
                rho_ceiling: cfg.rho_ceiling.unwrap_or(0.95),
                simplex_tol: 1e-10,
                threads: common.threads,
            };
            let result = falsifier::minimize_j(&dom, &spec, &search_cfg)?;
            Ok((
                Report::for_falsify(
                    cfg.domain.clone(),
                    mapping,
                    common.seed,
                    common.tol,
                    &result,
                ),
                clone_common(common),
            ))
        }
        Command::Certify(common) => {
            let cfg = load(common)?;
            let dom = cfg.domain()?;
            let spec = cfg.mapping()?;
            let mapping = mapping_echo(&cfg)?;
            let campaign = falsifier::certify_campaign(
                &dom,
                &spec,
                common.samples,
                common.seed,
                common.rho_floor,
                common.tol,
                common.threads,
            )?;
            Ok((
                Report::for_certify(cfg.domain.clone(), mapping, common.seed, &campaign),
                clone_common(common),
            ))
        }
        Command::ValidateExample { which, common } => {
            let cfg = load(common)?;
            let dom = cfg.domain()?;
            let spec = cfg.mapping()?;
            let mapping = mapping_echo(&cfg)?;
            let check = match which {
                1 => hypotheses::validate_example1(&dom, &spec)?,
                2 => hypotheses::validate_example2(&dom, &spec)?,
                3 => hypotheses::validate_example3(&dom, &spec)?,
                4 => hypotheses::validate_example4(&dom, &spec)?,
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown example family {which}; expected 1..=4"
                    )))
                }
            };
            Ok((
                Report::for_check("validate-example", cfg.domain.clone(), mapping, &check),
                clone_common(common),
            ))
        }
    }
}

fn mapping_echo(cfg: &RunConfig) -> Result<MappingConfig, Error> {
    cfg.mapping
        .clone()
        .ok_or_else(|| Error::InvalidConfig("missing \"mapping\" entry".into()))
}

fn clone_common(common: &Common) -> Common {
    Common {
        config: common.config.clone(),
        samples: common.samples,
        seed: common.seed,
        tol: common.tol,
        rho_floor: common.rho_floor,
        restarts: common.restarts,
        output: common.output.clone(),
        threads: common.threads,
    }
}
