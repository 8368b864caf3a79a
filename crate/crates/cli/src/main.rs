//! `casimir`: time and distance scans of the dynamical Casimir-Polder force,
//! oracle checks of the closed forms, and figure presets.

mod preset;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use casimir_core::report::{build_report, ReportOptions};
use casimir_core::scan::{run_distance_scan, run_time_scan, BoundUnits, Exclusion, ScanResult, ScanSpec, ScanVariable};
use casimir_core::{Error, ForceModel, Scenario, ScenarioDocument, Term};
use clap::{Args, Parser, Subcommand, ValueEnum};

const VERSION: &str = env!("CASIMIR_VERSION");

#[derive(Parser)]
#[command(name = "casimir", version = VERSION, about = "Dynamical Casimir-Polder force near a perfect mirror")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Force versus time at the scenario's distance.
    TimeScan(TimeScanArgs),
    /// Force versus distance at a fixed time.
    DistanceScan(DistanceScanArgs),
    /// Compare the closed forms with the numerical oracles and emit a JSON report.
    OracleCheck(OracleCheckArgs),
    /// List, show or run the figure presets.
    Presets(PresetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    /// Time or length in the scenario's base units (s, m, cm, or arbitrary).
    Physical,
    /// Reduced coordinates a = ct/2d or x0 = 2 k0 d.
    Reduced,
}

#[derive(Args)]
struct ScanArgs {
    /// Scenario JSON document, as a file path or inline JSON.
    #[arg(long)]
    scenario: String,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1001)]
    samples: usize,
    #[arg(long, allow_negative_numbers = true)]
    min: f64,
    #[arg(long, allow_negative_numbers = true)]
    max: f64,
    #[arg(long, value_enum, default_value_t = Units::Physical)]
    units: Units,
    /// Light-cone half-width in a.
    #[arg(long, conflicts_with = "exclusion_time")]
    exclusion: Option<f64>,
    /// Light-cone half-width in the scenario's time unit.
    #[arg(long)]
    exclusion_time: Option<f64>,
}

#[derive(Args)]
struct TimeScanArgs {
    #[command(flatten)]
    scan: ScanArgs,
}

#[derive(Args)]
struct DistanceScanArgs {
    #[command(flatten)]
    scan: ScanArgs,
    /// Fixed time in the scenario's time unit.
    #[arg(long)]
    t_fixed: f64,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reduced distances of the force grid.
    #[arg(long, value_delimiter = ',')]
    x0: Option<Vec<f64>>,
    /// Reduced times of the force grid.
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<f64>>,
    /// Scenario whose x0 replaces the grid distances; combine with --t.
    #[arg(long)]
    scenario: Option<String>,
    /// Times in the scenario's unit, converted to grid values of a.
    #[arg(long, value_delimiter = ',', requires = "scenario", conflicts_with = "a")]
    t: Option<Vec<f64>>,
    /// Reduced distances of the static-force checks.
    #[arg(long, value_delimiter = ',')]
    static_x0: Option<Vec<f64>>,
    /// Cavity sizes L/d of the mode-sum study.
    #[arg(long, value_delimiter = ',', conflicts_with = "no_mode_sum")]
    mode_sum_ratios: Option<Vec<f64>>,
    /// Skip the mode-sum study.
    #[arg(long)]
    no_mode_sum: bool,
    /// Relative step of the finite-difference force.
    #[arg(long)]
    h_rel: Option<f64>,
    /// Step in the frequency parameter of the operator form.
    #[arg(long)]
    m_step: Option<f64>,
    /// Multiply a closed-form term by a factor, as name=factor.
    #[arg(long, value_parser = parse_corruption)]
    corrupt_term: Vec<(Term, f64)>,
}

#[derive(Args)]
struct PresetArgs {
    #[command(subcommand)]
    action: Option<PresetAction>,
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names.
    List,
    /// Print a preset's JSON.
    Show { name: String },
    /// Run a preset, writing one CSV per run into a directory.
    Run {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_corruption(s: &str) -> Result<(Term, f64), String> {
    let (name, factor) = s.split_once('=').ok_or("expected name=factor")?;
    let term = name.parse::<Term>().map_err(|e| {
        let names: Vec<&str> = Term::ALL.iter().map(|t| t.name()).collect();
        format!("{e}; terms: {}", names.join(", "))
    })?;
    let factor = factor.parse::<f64>().map_err(|e| format!("factor: {e}"))?;
    Ok((term, factor))
}

enum Failure {
    User(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::User(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn load_scenario(arg: &str) -> std::result::Result<Scenario, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::User(format!("cannot read scenario {arg}: {e}")))?
    };
    Ok(ScenarioDocument::from_json(&text)?.to_scenario()?)
}

fn write_output(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::User(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::User(format!("cannot write stdout: {e}"))),
    }
}

fn scan_spec(args: &ScanArgs, variable: ScanVariable) -> ScanSpec {
    let mut spec = ScanSpec::new(variable, args.min, args.max, args.samples);
    spec.units = match args.units {
        Units::Physical => BoundUnits::Physical,
        Units::Reduced => BoundUnits::Reduced,
    };
    spec.exclusion = match (args.exclusion, args.exclusion_time) {
        (Some(w), _) => Exclusion::Reduced(w),
        (None, Some(w)) => Exclusion::Time(w),
        (None, None) => Exclusion::Default,
    };
    spec
}

fn report_warnings(r: &ScanResult) {
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
}

fn time_scan(args: TimeScanArgs) -> Outcome {
    let s = load_scenario(&args.scan.scenario)?;
    let r = run_time_scan(&s, &scan_spec(&args.scan, ScanVariable::Time), &ForceModel::default())?;
    report_warnings(&r);
    write_output(args.scan.out.as_deref(), &r.to_csv(VERSION))
}

fn distance_scan(args: DistanceScanArgs) -> Outcome {
    let s = load_scenario(&args.scan.scenario)?;
    let spec = scan_spec(&args.scan, ScanVariable::Distance);
    let r = run_distance_scan(&s, &spec, args.t_fixed, &ForceModel::default())?;
    report_warnings(&r);
    write_output(args.scan.out.as_deref(), &r.to_csv(VERSION))
}

fn oracle_check(args: OracleCheckArgs) -> Outcome {
    let mut opts = ReportOptions::default();
    if let Some(v) = args.x0 {
        opts.x0_values = v;
    }
    if let Some(v) = args.a {
        opts.a_values = v;
    }
    if let Some(arg) = &args.scenario {
        let s = load_scenario(arg)?;
        opts.x0_values = vec![2.0 * s.transition_wavenumber * s.distance];
        if let Some(times) = &args.t {
            opts.a_values = times.iter().map(|&t| s.speed_of_light() * t / (2.0 * s.distance)).collect();
        }
    }
    if let Some(v) = args.static_x0 {
        opts.static_x0_values = v;
    }
    if args.no_mode_sum {
        opts.mode_sum_ratios.clear();
    } else if let Some(v) = args.mode_sum_ratios {
        opts.mode_sum_ratios = v;
    }
    if let Some(h) = args.h_rel {
        opts.h_rel = h;
    }
    if let Some(m) = args.m_step {
        opts.m_step = m;
    }
    for (term, factor) in args.corrupt_term {
        opts.model = opts.model.with_term_scale(term, factor);
    }
    let mut report = build_report(&opts)?;
    report.generator = format!("casimir {VERSION}");
    write_output(args.out.as_deref(), &(report.to_json() + "\n"))?;
    if report.numerical_failure() {
        return Err(Failure::Numerical(format!("oracle failure: {}", report.errors.join("; "))));
    }
    if !report.pass {
        let culprit = report.offending_term().unwrap_or("none identified");
        return Err(Failure::Numerical(format!("closed form disagrees with the oracles; suspect term: {culprit}")));
    }
    eprintln!("oracle check passed");
    Ok(())
}

fn presets(args: PresetArgs) -> Outcome {
    match args.action.unwrap_or(PresetAction::List) {
        PresetAction::List => {
            for (name, _) in preset::PRESETS {
                println!("{name}\t{}", preset::load(name)?.description);
            }
            Ok(())
        }
        PresetAction::Show { name } => {
            print!("{}", preset::source(&name)?);
            Ok(())
        }
        PresetAction::Run { name, out } => {
            let p = preset::load(&name)?;
            fs::create_dir_all(&out).map_err(|e| Failure::User(format!("cannot create {}: {e}", out.display())))?;
            let spec = p.scan.spec();
            for run in &p.runs {
                let s = run.scenario.to_scenario()?;
                let r = match spec.variable {
                    ScanVariable::Time => run_time_scan(&s, &spec, &ForceModel::default())?,
                    ScanVariable::Distance => {
                        let t = p.t_fixed.ok_or_else(|| Failure::User(format!("preset {name} lacks t_fixed")))?;
                        run_distance_scan(&s, &spec, t, &ForceModel::default())?
                    }
                };
                report_warnings(&r);
                let path = out.join(format!("{name}-{}.csv", run.label));
                write_output(Some(&path), &r.to_csv(VERSION))?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn init_threads() -> Outcome {
    let Ok(v) = std::env::var("CASIMIR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| Failure::User(format!("CASIMIR_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::User(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::TimeScan(a) => time_scan(a),
        Command::DistanceScan(a) => distance_scan(a),
        Command::OracleCheck(a) => oracle_check(a),
        Command::Presets(a) => presets(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
