//! Command-line front end: scenario ingestion, figure/table-style sweep
//! commands, CSV emission, sample-path dumps, and the oracle suite.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 oracle
//! validation failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use linkbound::fading::{clarke_sample_path, ClarkeParams, DEFAULT_LAG0_BIAS};
use linkbound::oracle::run_validation_suite;
use linkbound::oscillator::wiener_sample_path;
use linkbound::scenario::{
    builtin_technology, load_scenario, LinkScenario, OscillatorSpec, Scenario,
};
use linkbound::snr::{
    block_snr_channel, block_snr_phase, fmt_csv, log_grid, sweep_equal_error, sweep_f0,
    sweep_matched_bandwidths, BwRule, F0SweepMode, SweepResult, SweepSeries,
};

const DEFAULT_POINTS: usize = 25;

#[derive(Parser)]
#[command(
    name = "linkbound",
    version,
    about = "Post-compensation SNR limits under oscillator phase noise and Rayleigh fading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Technology floor on the phase-noise innovation variance vs f0.
    TechFloor(TechFloorArgs),
    /// Block-average SNR after phase-noise compensation vs f0.
    SnrPn(SnrPnArgs),
    /// Block-average SNR after channel-fading compensation vs f0.
    SnrCh(SnrChArgs),
    /// Two-standard comparison report (wideband 60 GHz vs narrowband 2.4 GHz).
    Standards(StandardsArgs),
    /// Phase noise vs fading at matched bandwidths (f3dB = fD).
    Matched(MatchedArgs),
    /// Both SNR formulas on a shared estimation-error-variance grid.
    EqualError(EqualErrorArgs),
    /// Dump one phase or channel sample path as CSV.
    Paths(PathsArgs),
    /// Run the Monte-Carlo oracle suite and report pass/fail.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct TechFloorArgs {
    /// Comma-separated catalog names, e.g. "Si CMOS,GaN HEMT".
    #[arg(long, default_value = "Si CMOS,GaN HEMT")]
    tech: String,
    /// f0 grid `start[:stop[:points]]`, Hz, log-spaced.
    #[arg(long, default_value = "1e9:100e9:25")]
    f0: String,
    /// Fixed-bandwidth rule, Hz.
    #[arg(long)]
    bw_fixed: Option<f64>,
    /// Proportional-bandwidth rule, BW = ratio * f0.
    #[arg(long)]
    bw_prop: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SnrPnArgs {
    /// Scenario file (TOML). Defaults to K=100 at Es/sigma2w = 20 dB.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Use technology floors for these catalog names instead of the
    /// scenario oscillator (default when no scenario file is given:
    /// "Si CMOS,GaN HEMT").
    #[arg(long)]
    tech: Option<String>,
    #[arg(long, default_value = "1e9:100e9:25")]
    f0: String,
    #[arg(long)]
    bw_fixed: Option<f64>,
    #[arg(long)]
    bw_prop: Option<f64>,
    /// Override Es/sigma2w in dB.
    #[arg(long)]
    es_over_n0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SnrChArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Comma-separated relative velocities, km/h.
    #[arg(long, default_value = "1,50")]
    velocity: String,
    #[arg(long, default_value = "1e9:100e9:25")]
    f0: String,
    #[arg(long)]
    bw_fixed: Option<f64>,
    #[arg(long)]
    bw_prop: Option<f64>,
    #[arg(long)]
    es_over_n0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StandardsArgs {
    /// Override Es/sigma2w in dB (default 20).
    #[arg(long)]
    es_over_n0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatchedArgs {
    /// Normalized-frequency grid `start[:stop[:points]]` of fD/BW = f3dB/BW.
    #[arg(long, default_value = "1e-6:1e-2:25")]
    grid: String,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    es_over_n0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EqualErrorArgs {
    /// Error-variance grid `start[:stop[:points]]`.
    #[arg(long, default_value = "1e-8:1e2:40")]
    grid: String,
    #[arg(long)]
    es_over_n0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PathsArgs {
    /// Which impairment to draw: "phase" or "channel".
    #[arg(long)]
    kind: String,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the per-oracle default trial counts.
    #[arg(long)]
    trials: Option<u64>,
    /// Also write the summary as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Numerical(String),
    OracleFailure,
    Io(String),
}

impl From<linkbound::Error> for CliError {
    fn from(e: linkbound::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// Parses `start[:stop[:points]]` into a log-spaced grid; a bare value is a
/// single-point grid.
fn parse_grid(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{flag}: cannot parse `{s}` as a number")))
    };
    match parts.as_slice() {
        [single] => {
            let v = num(single)?;
            if v <= 0.0 {
                return usage(format!("{flag}: value must be positive"));
            }
            Ok(vec![v])
        }
        [start, stop] => log_grid(num(start)?, num(stop)?, DEFAULT_POINTS)
            .map_err(|e| CliError::Usage(format!("{flag}: {e}"))),
        [start, stop, points] => {
            let n = points
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{flag}: bad point count `{points}`")))?;
            log_grid(num(start)?, num(stop)?, n)
                .map_err(|e| CliError::Usage(format!("{flag}: {e}")))
        }
        _ => usage(format!("{flag}: expected start[:stop[:points]]")),
    }
}

fn parse_tech_list(text: &str) -> Result<Vec<linkbound::TechnologyParams>, CliError> {
    let names: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return usage("--tech: technology list is empty");
    }
    names
        .iter()
        .map(|n| builtin_technology(n).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn parse_velocities(text: &str) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    match vals {
        Ok(v) if !v.is_empty() && v.iter().all(|x| *x >= 0.0) => Ok(v),
        _ => usage("--velocity: expected comma-separated km/h values >= 0"),
    }
}

fn bw_rules(fixed: Option<f64>, prop: Option<f64>) -> Result<Vec<BwRule>, CliError> {
    let mut rules = Vec::new();
    if let Some(bw) = fixed {
        if bw <= 0.0 {
            return usage("--bw-fixed must be positive");
        }
        rules.push(BwRule::Fixed(bw));
    }
    if let Some(r) = prop {
        if r <= 0.0 {
            return usage("--bw-prop must be positive");
        }
        rules.push(BwRule::Proportional(r));
    }
    if rules.is_empty() {
        return usage("need at least one bandwidth rule (--bw-fixed and/or --bw-prop)");
    }
    Ok(rules)
}

fn load_scenario_file(path: &PathBuf) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    load_scenario(&text).map_err(|e| CliError::Usage(e.to_string()))
}

fn default_link() -> LinkScenario {
    LinkScenario::from_db(100, 20.0, 60e9, 2.16e9, 0.5).expect("valid defaults")
}

fn resolve_link(
    scenario: &Option<PathBuf>,
    es_over_n0: Option<f64>,
) -> Result<(LinkScenario, Option<OscillatorSpec>), CliError> {
    let (mut link, osc) = match scenario {
        Some(p) => {
            let s = load_scenario_file(p)?;
            (s.link, Some(s.oscillator))
        }
        None => (default_link(), None),
    };
    if let Some(db) = es_over_n0 {
        link = LinkScenario::new(
            link.block_len,
            1.0,
            10f64.powf(-db / 10.0),
            link.f0_hz,
            link.bw_hz,
            link.velocity_mps,
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok((link, osc))
}

/// `#`-prefixed provenance header: version, the exact invocation, and every
/// resolved parameter, enough to re-run the command bit-identically.
fn provenance(params: &[(&str, String)]) -> String {
    let argv: Vec<String> = std::env::args()
        .map(|a| {
            if a.contains(' ') {
                format!("\"{a}\"")
            } else {
                a
            }
        })
        .collect();
    let mut h = format!(
        "# linkbound v{}\n# command: {}\n",
        env!("CARGO_PKG_VERSION"),
        argv.join(" ")
    );
    for (k, v) in params {
        let _ = writeln!(h, "# {k} = {v}");
    }
    h
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn merge_sweeps(axis: &str, grid: &[f64], sweeps: Vec<SweepResult>) -> SweepResult {
    SweepResult {
        axis: axis.to_string(),
        grid: grid.to_vec(),
        series: sweeps
            .into_iter()
            .flat_map(|s| s.series.into_iter())
            .collect::<Vec<SweepSeries>>(),
    }
}

fn run_tech_floor(args: &TechFloorArgs) -> Result<(), CliError> {
    let techs = parse_tech_list(&args.tech)?;
    let grid = parse_grid(&args.f0, "--f0")?;
    let rules = bw_rules(args.bw_fixed, args.bw_prop)?;
    let template = default_link();
    let mut sweeps = Vec::new();
    for tech in &techs {
        for rule in &rules {
            sweeps.push(sweep_f0(
                &template,
                &grid,
                *rule,
                &F0SweepMode::FloorVariance(tech.clone()),
            )?);
        }
    }
    let merged = merge_sweeps("f0_hz", &grid, sweeps);
    require_some_points(&merged)?;
    let header = provenance(&[
        ("technologies", args.tech.clone()),
        ("f0_grid_hz", args.f0.clone()),
        ("units", "f0_hz [Hz], sigma2_zeta [rad^2]".into()),
    ]);
    emit(&args.out, &format!("{header}{}", merged.to_csv()))
}

fn run_snr_pn(args: &SnrPnArgs) -> Result<(), CliError> {
    let (link, scenario_osc) = resolve_link(&args.scenario, args.es_over_n0)?;
    let grid = parse_grid(&args.f0, "--f0")?;
    let rules = bw_rules(args.bw_fixed, args.bw_prop)?;
    // Named oscillators: technology floors from --tech, or the scenario's
    // own oscillator when a scenario file is given without --tech.
    let oscillators: Vec<(String, OscillatorSpec)> = match (&args.tech, scenario_osc) {
        (Some(t), _) => parse_tech_list(t)?
            .into_iter()
            .map(|tech| {
                let name = tech.name.to_lowercase().replace(' ', "_");
                (name, OscillatorSpec::TechnologyFloor(tech))
            })
            .collect(),
        (None, Some(osc)) => vec![("scenario_osc".to_string(), osc)],
        (None, None) => parse_tech_list("Si CMOS,GaN HEMT")?
            .into_iter()
            .map(|tech| {
                let name = tech.name.to_lowercase().replace(' ', "_");
                (name, OscillatorSpec::TechnologyFloor(tech))
            })
            .collect(),
    };
    let mut sweeps = Vec::new();
    for (name, osc) in &oscillators {
        for rule in &rules {
            let mut sweep = sweep_f0(&link, &grid, *rule, &F0SweepMode::PhaseSnr(osc.clone()))?;
            for s in &mut sweep.series {
                s.name = format!("{name}:{}", s.name);
            }
            sweeps.push(sweep);
        }
    }
    let merged = merge_sweeps("f0_hz", &grid, sweeps);
    require_some_points(&merged)?;
    let header = provenance(&[
        ("K", link.block_len.to_string()),
        ("es_over_sigma2w_db", fmt_csv(10.0 * link.snr_awgn().log10())),
        (
            "oscillators",
            oscillators.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(","),
        ),
        ("units", "f0_hz [Hz], series [dB]".into()),
    ]);
    emit(&args.out, &format!("{header}{}", merged.to_csv()))
}

/// A sweep where every point of every series failed is a numerical failure;
/// partial failures stay in the output as flagged rows.
fn require_some_points(sweep: &SweepResult) -> Result<(), CliError> {
    let first_err = sweep
        .series
        .iter()
        .flat_map(|s| s.values.iter())
        .find_map(|v| v.as_ref().err());
    let any_ok = sweep
        .series
        .iter()
        .any(|s| s.values.iter().any(|v| v.is_ok()));
    match (any_ok, first_err) {
        (false, Some(e)) => Err(CliError::Numerical(format!("every sweep point failed: {e}"))),
        _ => Ok(()),
    }
}

fn run_snr_ch(args: &SnrChArgs) -> Result<(), CliError> {
    let (link, _) = resolve_link(&args.scenario, args.es_over_n0)?;
    let velocities = parse_velocities(&args.velocity)?;
    let grid = parse_grid(&args.f0, "--f0")?;
    let rules = bw_rules(args.bw_fixed, args.bw_prop)?;
    let mut sweeps = Vec::new();
    for v_kmh in &velocities {
        let template = LinkScenario::new(
            link.block_len,
            link.es,
            link.sigma2_w,
            link.f0_hz,
            link.bw_hz,
            linkbound::scenario::kmh_to_mps(*v_kmh),
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        for rule in &rules {
            let mut sweep = sweep_f0(&template, &grid, *rule, &F0SweepMode::ChannelSnr)?;
            for s in &mut sweep.series {
                s.name = format!("v{}kmh:{}", fmt_csv(*v_kmh), s.name);
            }
            sweeps.push(sweep);
        }
    }
    let merged = merge_sweeps("f0_hz", &grid, sweeps);
    require_some_points(&merged)?;
    let header = provenance(&[
        ("K", link.block_len.to_string()),
        ("es_over_sigma2w_db", fmt_csv(10.0 * link.snr_awgn().log10())),
        ("velocities_kmh", args.velocity.clone()),
        ("lag0_bias", fmt_csv(DEFAULT_LAG0_BIAS)),
        ("units", "f0_hz [Hz], series [dB]".into()),
    ]);
    emit(&args.out, &format!("{header}{}", merged.to_csv()))
}

struct StandardRow {
    name: &'static str,
    f0_hz: f64,
    bw_hz: f64,
    ssb_level_dbc_hz: f64,
}

const STANDARDS: [StandardRow; 2] = [
    StandardRow {
        name: "IEEE 802.15.3c",
        f0_hz: 60e9,
        bw_hz: 2.16e9,
        ssb_level_dbc_hz: -95.0,
    },
    StandardRow {
        name: "IEEE 802.11b",
        f0_hz: 2.4e9,
        bw_hz: 0.02e9,
        ssb_level_dbc_hz: -115.0,
    },
];

fn run_standards(args: &StandardsArgs) -> Result<(), CliError> {
    let snr_db = args.es_over_n0.unwrap_or(20.0);
    let mut body = String::from("standard,f0_ghz,bw_ghz,snr_ch_db,snr_pn_db\n");
    for row in &STANDARDS {
        let link = LinkScenario::from_db(100, snr_db, row.f0_hz, row.bw_hz, 0.5)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let osc = OscillatorSpec::SsbPoint {
            level_dbc_hz: row.ssb_level_dbc_hz,
            offset_hz: 1e6,
        };
        let ch = block_snr_channel(&link)?;
        let pn = block_snr_phase(&link, &osc)?;
        let _ = writeln!(
            body,
            "{},{},{},{:.3},{:.3}",
            row.name,
            fmt_csv(row.f0_hz / 1e9),
            fmt_csv(row.bw_hz / 1e9),
            ch.avg_db(),
            pn.avg_db()
        );
    }
    let header = provenance(&[
        ("K", "100".into()),
        ("es_over_sigma2w_db", fmt_csv(snr_db)),
        ("v_kmh", "0.5".into()),
        ("ssb_offset_hz", "1e6".into()),
        ("lag0_bias", fmt_csv(DEFAULT_LAG0_BIAS)),
        ("units", "f0_ghz [GHz], bw_ghz [GHz], snr columns [dB]".into()),
    ]);
    emit(&args.out, &format!("{header}{body}"))
}

fn run_matched(args: &MatchedArgs) -> Result<(), CliError> {
    let (link, _) = resolve_link(&args.scenario, args.es_over_n0)?;
    let grid = parse_grid(&args.grid, "--grid")?;
    let sweep = sweep_matched_bandwidths(&grid, &link).map_err(|e| match e {
        linkbound::Error::InvalidValue { .. } => CliError::Usage(e.to_string()),
        other => CliError::Numerical(other.to_string()),
    })?;
    let header = provenance(&[
        ("K", link.block_len.to_string()),
        ("es_over_sigma2w_db", fmt_csv(10.0 * link.snr_awgn().log10())),
        ("units", "fd_over_bw [dimensionless], series [dB]".into()),
    ]);
    emit(&args.out, &format!("{header}{}", sweep.to_csv()))
}

fn run_equal_error(args: &EqualErrorArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid, "--grid")?;
    let snr_db = args.es_over_n0.unwrap_or(20.0);
    let sigma2_w = 10f64.powf(-snr_db / 10.0);
    let sweep = sweep_equal_error(&grid, 1.0, sigma2_w)?;
    let header = provenance(&[
        ("es", "1".into()),
        ("es_over_sigma2w_db", fmt_csv(snr_db)),
        ("units", "sigma2_eps [rad^2 or channel power], series [dB]".into()),
    ]);
    emit(&args.out, &format!("{header}{}", sweep.to_csv()))
}

fn run_paths(args: &PathsArgs) -> Result<(), CliError> {
    let scenario = match &args.scenario {
        Some(p) => load_scenario_file(p)?,
        None => Scenario {
            link: default_link(),
            oscillator: OscillatorSpec::SsbPoint {
                level_dbc_hz: -95.0,
                offset_hz: 1e6,
            },
        },
    };
    let link = &scenario.link;
    let body = match args.kind.as_str() {
        "phase" => {
            let q = scenario
                .oscillator
                .innovation_variance(link.f0_hz, link.bw_hz)?;
            wiener_sample_path(link.block_len, q, None, args.seed).to_csv()
        }
        "channel" => {
            let params = ClarkeParams::new(link.doppler_hz(), link.bw_hz);
            clarke_sample_path(link.block_len, &params, DEFAULT_LAG0_BIAS, args.seed)?.to_csv()
        }
        other => return usage(format!("--kind: expected phase|channel, got `{other}`")),
    };
    let header = provenance(&[
        ("kind", args.kind.clone()),
        ("K", link.block_len.to_string()),
        ("seed", args.seed.to_string()),
    ]);
    emit(&args.out, &format!("{header}{body}"))
}

fn run_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let summary = run_validation_suite(args.trials, args.seed)?;
    print!("{}", summary.to_text());
    if args.out.is_some() {
        let header = provenance(&[("seed", args.seed.to_string())]);
        emit(&args.out, &format!("{header}{}", summary.to_csv()))?;
    }
    if summary.all_pass() {
        Ok(())
    } else {
        Err(CliError::OracleFailure)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::TechFloor(a) => run_tech_floor(a),
        Command::SnrPn(a) => run_snr_pn(a),
        Command::SnrCh(a) => run_snr_ch(a),
        Command::Standards(a) => run_standards(a),
        Command::Matched(a) => run_matched(a),
        Command::EqualError(a) => run_equal_error(a),
        Command::Paths(a) => run_paths(a),
        Command::Validate(a) => run_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::OracleFailure) => {
            eprintln!("oracle validation failed (see summary above)");
            ExitCode::from(4)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(3)
        }
    }
}
