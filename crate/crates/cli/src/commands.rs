use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use reserve_core::analysis::{bias_trace, bias_trace_many, violation_stats_at, PeriodBias, Scope};
use reserve_core::controlled_rounding::controlled_round;
use reserve_core::model::ExtensionPolicy;
use reserve_core::rational::to_f64;
use reserve_core::rng::{from_seed, replication_seeds, RNG_NAME};
use reserve_core::roster_flow::RosterSampler;
use reserve_core::solutions::{run_court, run_government, run_proposed, DepartmentOrder, RosterMode};
use reserve_core::{FairShareTable, ReservationProblem, Roster, SolutionTrace};

use crate::error::{CliError, CliResult};
use crate::io::{
    load_problem, parse_roster, parse_scheme, read_file, reservation_to_csv, trace_to_csv,
    write_file,
};
use crate::report::{CompareRecord, Metadata, PeriodReport, RunReport};
use crate::synth::{national_scheme, synthesize, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "reserve", version, about = "Seat reservations across departments and categories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Round one period's fair share table with unbiased controlled rounding.
    Round(RoundArgs),
    /// Draw a random roster whose every prefix stays within quota.
    Roster(RosterArgs),
    /// Run one multi-period solution and report its tables and violations.
    Run(RunArgs),
    /// Per-period bias distributions of all three solutions in long format.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolutionArg {
    Gov,
    Court,
    Proposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Input,
    Alpha,
}

impl From<OrderArg> for DepartmentOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Input => DepartmentOrder::Input,
            OrderArg::Alpha => DepartmentOrder::Alphabetic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Independent,
    Repeat,
}

impl From<PolicyArg> for ExtensionPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Independent => ExtensionPolicy::IndependentBlocks,
            PolicyArg::Repeat => ExtensionPolicy::RepeatBlock,
        }
    }
}

#[derive(Debug, Args)]
pub struct RoundArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long)]
    pub period: usize,
    #[arg(long)]
    pub seed: u64,
    /// Also write a JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RosterArgs {
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long)]
    pub length: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "independent")]
    pub policy: PolicyArg,
    /// Multiple of the scheme's minimal block length.
    #[arg(long)]
    pub block_length: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long, value_enum)]
    pub solution: SolutionArg,
    /// Roster file for the government and court baselines.
    #[arg(long)]
    pub roster: Option<PathBuf>,
    /// Master seed; required by the proposed solution.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "input")]
    pub order: OrderArg,
    /// Fail instead of cycling when a roster runs out.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Scheme file; defaults to the five-category national scheme with `--synthesize`.
    #[arg(long)]
    pub scheme: Option<PathBuf>,
    /// Generate a problem with 8-50 departments and 1-30 vacancies each per period.
    #[arg(long, conflicts_with = "problem")]
    pub synthesize: bool,
    /// Periods of a synthesized problem.
    #[arg(long, default_value_t = 9)]
    pub periods: usize,
    #[arg(long, default_value_t = 100)]
    pub replications: usize,
    #[arg(long)]
    pub seed: u64,
    /// Baseline roster; defaults to the floor-rule roster of one block.
    #[arg(long)]
    pub roster: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "input")]
    pub order: OrderArg,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command; returns what belongs on standard output.
pub fn execute(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Round(a) => round(a),
        Command::Roster(a) => roster(a),
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
    }
}

fn emit(output: Option<&Path>, text: String) -> CliResult<String> {
    match output {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn config(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn round(a: RoundArgs) -> CliResult<String> {
    let problem = load_problem(&a.problem, &a.scheme)?;
    let fair = FairShareTable::for_period(&problem, a.period)?;
    let table = controlled_round(&fair, &mut from_seed(a.seed));
    let report = RunReport {
        metadata: Metadata {
            command: "round".into(),
            solution: "controlled-rounding".into(),
            seed: Some(a.seed),
            rng: RNG_NAME.into(),
            config: config(&[("period", a.period.to_string())]),
        },
        periods: vec![PeriodReport::new(&problem, &fair, &table, None)?],
    };
    if let Some(path) = &a.report {
        write_file(path, &report.to_json())?;
    }
    Ok(match a.format {
        Format::Csv => reservation_to_csv(&problem, &table),
        Format::Json => report.to_json(),
    })
}

fn roster(a: RosterArgs) -> CliResult<String> {
    if a.length == 0 {
        return Err(CliError::Range("--length must be at least 1".into()));
    }
    let scheme = parse_scheme(&read_file(&a.scheme)?)?;
    let sampler = match a.block_length {
        Some(k) => RosterSampler::with_block_length(&scheme, k)?,
        None => RosterSampler::new(&scheme),
    };
    let roster = sampler.draw_roster(a.length, &mut from_seed(a.seed), a.policy.into());
    emit(a.output.as_deref(), roster.to_lines())
}

fn load_roster(path: Option<&Path>, problem: &ReservationProblem) -> CliResult<Roster> {
    match path {
        Some(p) => parse_roster(&read_file(p)?),
        None => Ok(Roster::floor_rule(
            problem.scheme(),
            problem.scheme().minimal_block_length(),
        )?),
    }
}

fn mode(strict: bool) -> RosterMode {
    if strict {
        RosterMode::Strict
    } else {
        RosterMode::Cycle
    }
}

fn run(a: RunArgs) -> CliResult<String> {
    let problem = load_problem(&a.problem, &a.scheme)?;
    let order: DepartmentOrder = a.order.into();
    let (trace, mut cfg) = match a.solution {
        SolutionArg::Gov | SolutionArg::Court => {
            let path = a.roster.as_deref().ok_or_else(|| {
                CliError::MissingDependency("--solution gov|court requires --roster".into())
            })?;
            let roster = load_roster(Some(path), &problem)?;
            let trace = if a.solution == SolutionArg::Gov {
                run_government(&problem, &roster, order, mode(a.strict))?
            } else {
                run_court(&problem, &roster, mode(a.strict))?
            };
            let mut cfg = vec![
                ("roster", path.display().to_string()),
                ("roster_mode", if a.strict { "strict" } else { "cycle" }.to_string()),
            ];
            if a.solution == SolutionArg::Gov {
                cfg.push(("order", order.label().to_string()));
            }
            (trace, cfg)
        }
        SolutionArg::Proposed => {
            let seed = a.seed.ok_or_else(|| {
                CliError::MissingDependency("--solution proposed requires --seed".into())
            })?;
            let block = problem.scheme().minimal_block_length();
            (
                run_proposed(&problem, seed)?,
                vec![("block_length", block.to_string()), ("policy", "independent-blocks".into())],
            )
        }
    };
    cfg.push(("violation_max_possible", "department: m*n, university: n".into()));
    let report = trace_report(&problem, &trace, config(&cfg))?;
    let text = match a.format {
        Format::Json => report.to_json(),
        Format::Csv => {
            let tables: Vec<_> = trace.periods().iter().map(|(_, r)| r).collect();
            trace_to_csv(&problem, &tables)
        }
    };
    emit(a.output.as_deref(), text)
}

fn trace_report(
    problem: &ReservationProblem,
    trace: &SolutionTrace,
    config: BTreeMap<String, String>,
) -> CliResult<RunReport> {
    let bias = bias_trace(trace);
    let periods = trace
        .periods()
        .iter()
        .zip(&bias)
        .map(|((fair, res), b)| PeriodReport::new(problem, fair, res, Some(b)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(RunReport {
        metadata: Metadata {
            command: "run".into(),
            solution: trace.kind().label().into(),
            seed: trace.seed(),
            rng: RNG_NAME.into(),
            config,
        },
        periods,
    })
}

/// Long-format records for one solution: box statistics, the largest
/// absolute bias and the violation rate per period and scope.
pub fn compare_records(solution: &str, traces: &[SolutionTrace]) -> Vec<CompareRecord> {
    let bias = bias_trace_many(traces);
    let mut out = Vec::new();
    for b in &bias {
        for scope in [Scope::Department, Scope::University] {
            let (summary, max_abs) = match scope {
                Scope::Department => (&b.department, &b.max_abs_department),
                Scope::University => (&b.university, &b.max_abs_university),
            };
            let mut push = |statistic: &str, value: f64| {
                out.push(CompareRecord {
                    solution: solution.into(),
                    period: b.period,
                    scope: scope.label().into(),
                    statistic: statistic.into(),
                    value,
                })
            };
            for (name, value) in summary.statistics() {
                push(name, value);
            }
            push("max_abs", to_f64(max_abs));
            push("violation_rate", violation_rate(traces, b, scope));
        }
    }
    out
}

fn violation_rate(traces: &[SolutionTrace], b: &PeriodBias, scope: Scope) -> f64 {
    let (instances, possible) = traces.iter().fold((0usize, 0usize), |(i, p), trace| {
        let (fair, res) = trace.period(b.period).expect("pooled periods exist in every trace");
        let v = violation_stats_at(fair, res, scope).expect("trace tables always match");
        (i + v.instances, p + v.max_possible)
    });
    instances as f64 / possible.max(1) as f64
}

fn compare(a: CompareArgs) -> CliResult<String> {
    let problem = if a.synthesize {
        let scheme = match &a.scheme {
            Some(path) => parse_scheme(&read_file(path)?)?,
            None => national_scheme(),
        };
        if a.periods == 0 {
            return Err(CliError::Range("--periods must be at least 1".into()));
        }
        let cfg = SynthConfig {
            periods: a.periods,
            ..SynthConfig::default()
        };
        synthesize(&cfg, scheme, a.seed)
    } else {
        let path = a.problem.as_deref().ok_or_else(|| {
            CliError::MissingDependency("compare needs --problem or --synthesize".into())
        })?;
        let scheme = a
            .scheme
            .as_deref()
            .ok_or_else(|| CliError::MissingDependency("--problem requires --scheme".into()))?;
        load_problem(path, scheme)?
    };
    if a.replications == 0 {
        return Err(CliError::Range("--replications must be at least 1".into()));
    }
    let roster = load_roster(a.roster.as_deref(), &problem)?;
    let gov = run_government(&problem, &roster, a.order.into(), mode(a.strict))?;
    let court = run_court(&problem, &roster, mode(a.strict))?;
    let proposed = replication_seeds(a.seed, a.replications)
        .par_iter()
        .map(|&s| run_proposed(&problem, s))
        .collect::<Result<Vec<_>, _>>()?;

    let mut records = compare_records("government", std::slice::from_ref(&gov));
    records.extend(compare_records("court", std::slice::from_ref(&court)));
    records.extend(compare_records("proposed", &proposed));

    let text = match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("UTF-8")
        }
        Format::Json => {
            let body = serde_json::json!({
                "metadata": Metadata {
                    command: "compare".into(),
                    solution: "government,court,proposed".into(),
                    seed: Some(a.seed),
                    rng: RNG_NAME.into(),
                    config: config(&[
                        ("replications", a.replications.to_string()),
                        ("departments", problem.department_count().to_string()),
                        ("periods", problem.periods().to_string()),
                        ("synthesized", a.synthesize.to_string()),
                        ("order", DepartmentOrder::from(a.order).label().to_string()),
                        ("violation_max_possible", "department: m*n, university: n".into()),
                    ]),
                },
                "records": records,
            });
            let mut s = serde_json::to_string_pretty(&body).expect("records serialize");
            s.push('\n');
            s
        }
    };
    emit(a.output.as_deref(), text)
}
