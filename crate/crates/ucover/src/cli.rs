//! The `ucover` command line.
//!
//! Exit codes: 0 on success (and for `--help`/`--version`), 1 when a
//! precondition or argument contract fails, 2 on resource limits and IO
//! failures, 64 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use ucover_core::bounds::{bound_report, lambda_matrix, BoundReport};
use ucover_core::covering::{default_box_window, dyadic_ladder, ProbeExperiment, TRUNCATION_CAVEAT};
use ucover_core::criteria::{
    classify_dichotomy, series_partial_diagnostics, series_rows, DichotomyVerdict, SeriesDiagnostics,
};
use ucover_core::grid::{estimate_box_dim, Membership};
use ucover_core::growth::CoverGrowthTrace;
use ucover_core::hitting::{HittingRecord, Tau};
use ucover_core::moments::{SecondMomentConfig, SecondMomentReport, WitnessTrial};
use ucover_core::stream::substream;
use ucover_core::{MeasureModel, PointSource, RadiusSchedule, SampleStream};

use crate::io::{csv_preamble, write_cell_csv, write_grid_dump, Envelope};
use crate::{parallel, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ucover", version, about = "Random covering set experiments on the d-torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Closed-form lower and upper dimension bounds for critical radii c·n^(-1/d).
    Bounds(BoundsArgs),
    /// Measure verdict and series diagnostics for a radius schedule.
    Classify(ClassifyArgs),
    /// Builds the cover grid and reports the covered fraction.
    Simulate(SimulateArgs),
    /// Box-counting dimension of the cover grid.
    Boxdim(BoxdimArgs),
    /// Hitting-time ladders and local exponent estimates at random probes.
    Hitting(HittingArgs),
    /// Greedy cover-growth traces.
    GreedyCover(GreedyArgs),
    /// Witness-set mass and energy against the second-moment bounds.
    SecondMoment(SecondMomentArgs),
    /// Spread of a statistic across seeds.
    ZeroOne(ZeroOneArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// c·n^(-alpha)
    Power,
    /// c·n^(-1/d)
    Critical,
    /// A finite list given by --values.
    Explicit,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScheduleArgs {
    #[arg(long, value_enum, default_value_t = Family::Power)]
    pub family: Family,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
}

impl ScheduleArgs {
    pub fn schedule(&self, d: usize) -> Result<RadiusSchedule> {
        Ok(match self.family {
            Family::Power => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Usage("--family power needs --alpha".into()))?;
                RadiusSchedule::power_law(self.c, alpha)?
            }
            Family::Critical => RadiusSchedule::critical(self.c, d as u32)?,
            Family::Explicit => {
                if self.values.is_empty() {
                    return Err(Error::Usage("--family explicit needs --values".into()));
                }
                RadiusSchedule::explicit(self.values.clone())?
            }
        })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MeasureArgs {
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Sample uniformly on the coordinate sub-torus of this dimension.
    #[arg(long)]
    pub support_dim: Option<usize>,
}

impl MeasureArgs {
    pub fn measure(&self) -> Result<MeasureModel> {
        Ok(match self.support_dim {
            Some(k) => MeasureModel::subtorus(k, self.d)?,
            None => MeasureModel::uniform(self.d)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipArg {
    Center,
    Touch,
}

impl From<MembershipArg> for Membership {
    fn from(m: MembershipArg) -> Self {
        match m {
            MembershipArg::Center => Membership::CellCenter,
            MembershipArg::Touch => Membership::CellTouch,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CoverArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid resolution m; the grid has 2^(m·d) cells.
    #[arg(long, default_value_t = 12)]
    pub grid_bits: u32,
    #[arg(long, default_value_t = 256)]
    pub p: u64,
    #[arg(long, default_value_t = 65536)]
    pub n_max: u64,
}

impl CoverArgs {
    fn build(&self, membership: Membership) -> Result<(ucover_core::GridCover, Vec<u64>)> {
        let measure = self.measure.measure()?;
        let schedule = self.schedule.schedule(self.measure.d)?;
        let stream = SampleStream::new(self.seed, measure)?;
        let ladder = dyadic_ladder(self.p, self.n_max)?;
        let grid = parallel::build_cover_grid(&stream, &schedule, self.p, &ladder, self.grid_bits, membership)?;
        Ok((grid, ladder))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    /// Number of series terms for the diagnostics.
    #[arg(long, default_value_t = 10_000)]
    pub n: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridFormat {
    /// Header plus little-endian u64 words.
    Bin,
    /// One row per set cell.
    Csv,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cover: CoverArgs,
    #[arg(long, value_enum, default_value_t = MembershipArg::Center)]
    pub membership: MembershipArg,
    /// Also write the grid to this file.
    #[arg(long)]
    #[serde(skip)]
    pub grid_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GridFormat::Bin)]
    pub grid_format: GridFormat,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoxdimArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cover: CoverArgs,
    #[arg(long, value_enum, default_value_t = MembershipArg::Touch)]
    pub membership: MembershipArg,
    /// Coarsest level of the fit; defaults to ceil(m/2).
    #[arg(long)]
    pub m_lo: Option<u32>,
    /// Finest level of the fit; defaults to m.
    #[arg(long)]
    pub m_hi: Option<u32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HittingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    /// Number of probes, drawn from the sampling measure.
    #[arg(long, default_value_t = 16)]
    pub probes: usize,
    #[arg(long, default_value_t = 0.25)]
    pub r_hi: f64,
    /// Ladder length; radii r_hi·2^(-j) for j < k.
    #[arg(long, default_value_t = 12)]
    pub ladder_k: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub n_max: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed of the probe stream; defaults to a substream of --seed.
    #[arg(long)]
    pub probe_seed: Option<u64>,
    /// Share of the smallest hit radii used by the estimates.
    #[arg(long, default_value_t = ucover_core::hitting::DEFAULT_WINDOW)]
    pub window: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

/// Seeds given as `a..b` (half-open) or a comma list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedList(pub Vec<u64>);

fn parse_seeds(s: &str) -> std::result::Result<SeedList, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("{e}"))?;
        if b <= a {
            return Err("empty seed range".into());
        }
        return Ok(SeedList((a..b).collect()));
    }
    s.split(',')
        .map(|v| v.trim().parse::<u64>().map_err(|e| format!("{e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(SeedList)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GreedyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub i_max: u32,
    #[arg(long, value_parser = parse_seeds, default_value = "0")]
    pub seeds: SeedList,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SecondMomentArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, default_value_t = 12)]
    pub grid_bits: u32,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Energy exponent.
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Boxdim,
    Fraction,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ZeroOneArgs {
    #[arg(long, value_enum, default_value_t = Statistic::Boxdim)]
    pub statistic: Statistic,
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 12)]
    pub grid_bits: u32,
    #[arg(long, default_value_t = 256)]
    pub p: u64,
    #[arg(long, default_value_t = 65536)]
    pub n_max: u64,
    #[arg(long)]
    pub m_lo: Option<u32>,
    #[arg(long)]
    pub m_hi: Option<u32>,
    #[arg(long, value_enum, default_value_t = MembershipArg::Touch)]
    pub membership: MembershipArg,
    #[arg(long, value_parser = parse_seeds, default_value = "0..16")]
    pub seeds: SeedList,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResults {
    pub verdict: DichotomyVerdict,
    pub diagnostics: SeriesDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResults {
    pub checkpoints: Vec<u64>,
    pub cells_set: u64,
    pub cell_count: u64,
    pub covered_fraction: f64,
    pub caveat: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCount {
    pub m: u32,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxdimResults {
    pub m_lo: u32,
    pub m_hi: u32,
    pub box_counts: Vec<BoxCount>,
    /// `None` when the grid is empty and the dimension is undefined.
    pub box_dim: Option<f64>,
    pub covered_fraction: f64,
    pub caveat: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeededTrace {
    pub seed: u64,
    pub trace: CoverGrowthTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyResults {
    /// Natural log of the spectral radius of the growth matrix.
    pub log_lambda: f64,
    pub mean_fitted_rate: f64,
    pub traces: Vec<SeededTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentResults {
    pub report: SecondMomentReport,
    pub trials: Vec<WitnessTrial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroOneResults {
    pub seeds: Vec<u64>,
    pub values: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    pub caveat: String,
}

/// Parses `args` (including the program name), runs the subcommand on a
/// pool of [`parallel::thread_count`] threads and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    let result = parallel::pool(parallel::thread_count()).and_then(|p| p.install(|| execute(&cli.command)));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ucover: {e}");
            e.exit_code()
        }
    }
}

/// Canonical JSON of a configuration: declaration field order, no
/// whitespace, output paths omitted.
pub fn canonical_config(command: &Command) -> Result<String> {
    Ok(serde_json::to_string(command)?)
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<R: Serialize>(command: &Command, out: &OutputArgs, results: &R) -> Result<()> {
    let env = Envelope::new(command, results);
    let mut w = sink(&out.output)?;
    serde_json::to_writer_pretty(&mut w, &env)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit_csv(command: &Command, out: &OutputArgs, header: &[String], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = sink(&out.output)?;
    write!(w, "{}", csv_preamble(&canonical_config(command)?))?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    for row in rows {
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

fn emit<R: Serialize>(
    command: &Command,
    out: &OutputArgs,
    results: &R,
    table: impl FnOnce() -> (Vec<String>, Vec<Vec<String>>),
) -> Result<()> {
    match out.format {
        Format::Json => emit_json(command, out, results),
        Format::Csv => {
            let (header, rows) = table();
            emit_csv(command, out, &header, rows)
        }
    }
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// Runs one parsed subcommand on the current rayon pool.
pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Bounds(a) => {
            let report: BoundReport = bound_report(a.c, a.d)?;
            emit(command, &a.out, &report, || {
                let header = strings(&[
                    "c",
                    "d",
                    "lower_bound",
                    "theta_star_lower",
                    "upper_bound",
                    "theta_star_upper",
                    "s_at_theta_star",
                    "lambda_at_theta_star",
                    "regime",
                ]);
                let theta = |t: &ucover_core::optimize::ThetaStar| match t.finite() {
                    Some(v) => v.to_string(),
                    None => "limit_at_infinity".to_string(),
                };
                let regime = serde_json::to_value(report.regime)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                let row = vec![
                    report.c.to_string(),
                    report.d.to_string(),
                    report.lower_bound.to_string(),
                    theta(&report.theta_star_lower),
                    report.upper_bound.to_string(),
                    theta(&report.theta_star_upper),
                    opt(report.s_at_theta_star),
                    opt(report.lambda_at_theta_star),
                    regime,
                ];
                (header, vec![row])
            })
        }
        Command::Classify(a) => {
            let measure = a.measure.measure()?;
            let schedule = a.schedule.schedule(a.measure.d)?;
            let verdict = classify_dichotomy(&schedule, &measure)?;
            let diagnostics = series_partial_diagnostics(&schedule, &measure, a.n)?;
            let results = ClassifyResults { verdict, diagnostics };
            match a.out.format {
                Format::Json => emit_json(command, &a.out, &results),
                Format::Csv => {
                    let rows = series_rows(&schedule, &measure, a.n)?
                        .into_iter()
                        .map(|r| {
                            vec![
                                r.n.to_string(),
                                r.term1.to_string(),
                                r.term2.to_string(),
                                opt(r.term3),
                                r.partial1.to_string(),
                                r.partial2.to_string(),
                                r.partial3.to_string(),
                            ]
                        })
                        .collect();
                    let header = strings(&["n", "term1", "term2", "term3", "partial1", "partial2", "partial3"]);
                    emit_csv(command, &a.out, &header, rows)
                }
            }
        }
        Command::Simulate(a) => {
            let (grid, checkpoints) = a.cover.build(a.membership.into())?;
            if let Some(path) = &a.grid_out {
                let w = BufWriter::new(File::create(path)?);
                match a.grid_format {
                    GridFormat::Bin => write_grid_dump(w, &grid)?,
                    GridFormat::Csv => write_cell_csv(w, &grid, &canonical_config(command)?)?,
                }
            }
            let results = SimulateResults {
                checkpoints,
                cells_set: grid.count_ones(),
                cell_count: grid.cell_count(),
                covered_fraction: grid.fraction(),
                caveat: TRUNCATION_CAVEAT.to_string(),
            };
            emit(command, &a.out, &results, || {
                (
                    strings(&["cells_set", "cell_count", "covered_fraction"]),
                    vec![vec![
                        results.cells_set.to_string(),
                        results.cell_count.to_string(),
                        results.covered_fraction.to_string(),
                    ]],
                )
            })
        }
        Command::Boxdim(a) => {
            let (dlo, dhi) = default_box_window(a.cover.grid_bits);
            let (m_lo, m_hi) = (a.m_lo.unwrap_or(dlo), a.m_hi.unwrap_or(dhi));
            let (grid, _) = a.cover.build(a.membership.into())?;
            let counts = grid.box_counts(m_lo, m_hi)?;
            let box_dim = match estimate_box_dim(&grid, m_lo, m_hi) {
                Ok(v) => Some(v),
                Err(ucover_core::Error::EmptySet) => None,
                Err(e) => return Err(e.into()),
            };
            let results = BoxdimResults {
                m_lo,
                m_hi,
                box_counts: (m_lo..=m_hi)
                    .zip(counts)
                    .map(|(m, count)| BoxCount { m, count })
                    .collect(),
                box_dim,
                covered_fraction: grid.fraction(),
                caveat: TRUNCATION_CAVEAT.to_string(),
            };
            emit(command, &a.out, &results, || {
                let rows = results
                    .box_counts
                    .iter()
                    .map(|b| vec![b.m.to_string(), b.count.to_string()])
                    .collect();
                (strings(&["m", "count"]), rows)
            })
        }
        Command::Hitting(a) => {
            let measure = a.measure.measure()?;
            if a.probes == 0 {
                return Err(ucover_core::Error::InvalidArgument {
                    name: "probes",
                    reason: "need at least one probe".into(),
                }
                .into());
            }
            let stream = SampleStream::new(a.seed, measure)?;
            let probe_stream = SampleStream::new(a.probe_seed.unwrap_or(substream(a.seed, 1)), measure)?;
            let probes: Vec<_> = (1..=a.probes as u64).map(|n| probe_stream.sample(n)).collect();
            let records: Vec<HittingRecord> =
                parallel::hitting_records(&stream, &probes, a.r_hi, a.ladder_k, a.n_max, a.window)?;
            emit(command, &a.out, &records, || hitting_table(a.measure.d, &records))
        }
        Command::GreedyCover(a) => {
            let traces = parallel::greedy_traces(&a.seeds.0, a.c, a.d, a.theta, a.l, a.i_max)?;
            let log_lambda = lambda_matrix(a.c, a.d, a.theta)?.lambda.ln();
            let mean_fitted_rate = ucover_core::stats::mean(&traces.iter().map(|t| t.fitted_rate).collect::<Vec<_>>());
            let results = GreedyResults {
                log_lambda,
                mean_fitted_rate,
                traces: a
                    .seeds
                    .0
                    .iter()
                    .zip(traces)
                    .map(|(&seed, trace)| SeededTrace { seed, trace })
                    .collect(),
            };
            emit(command, &a.out, &results, || {
                let mut rows = Vec::new();
                for st in &results.traces {
                    for (lv, pred) in st.trace.levels.iter().zip(&st.trace.predicted) {
                        rows.push(vec![
                            st.seed.to_string(),
                            lv.i.to_string(),
                            lv.n_i.to_string(),
                            lv.big_n.to_string(),
                            lv.q.to_string(),
                            pred.to_string(),
                            (lv.big_n + lv.q).to_string(),
                        ]);
                    }
                }
                (
                    strings(&["seed", "i", "n_i", "N_i", "Q_i", "predicted", "cumulative"]),
                    rows,
                )
            })
        }
        Command::SecondMoment(a) => {
            let cfg = SecondMomentConfig {
                c: a.c,
                d: a.d,
                theta: a.theta,
                l: a.l,
                q: a.q,
                m: a.grid_bits,
                trials: a.trials,
                s: a.s,
                base_seed: a.seed,
            };
            cfg.check()?;
            let trials = parallel::witness_trials(&cfg)?;
            let report = SecondMomentReport::from_trials(&cfg, &trials)?;
            let results = SecondMomentResults { report, trials };
            emit(command, &a.out, &results, || {
                let rows = results
                    .trials
                    .iter()
                    .enumerate()
                    .map(|(t, tr)| {
                        vec![
                            t.to_string(),
                            cfg.trial_seed(t as u64).to_string(),
                            tr.mass.to_string(),
                            tr.energy.to_string(),
                        ]
                    })
                    .collect();
                (strings(&["trial", "seed", "mass", "energy"]), rows)
            })
        }
        Command::ZeroOne(a) => {
            let measure = a.measure.measure()?;
            let schedule = a.schedule.schedule(a.measure.d)?;
            let (dlo, dhi) = default_box_window(a.grid_bits);
            let experiment = match a.statistic {
                Statistic::Boxdim => ProbeExperiment::BoxDim {
                    schedule,
                    measure,
                    p: a.p,
                    n_max: a.n_max,
                    m: a.grid_bits,
                    m_lo: a.m_lo.unwrap_or(dlo),
                    m_hi: a.m_hi.unwrap_or(dhi),
                    membership: a.membership.into(),
                },
                Statistic::Fraction => ProbeExperiment::CoveredFraction {
                    schedule,
                    measure,
                    p: a.p,
                    n_max: a.n_max,
                    m: a.grid_bits,
                },
            };
            let spread = parallel::probe_spread(&experiment, &a.seeds.0)?;
            let results = ZeroOneResults {
                seeds: a.seeds.0.clone(),
                values: spread.values,
                mean: spread.mean,
                std_dev: spread.std_dev,
                caveat: TRUNCATION_CAVEAT.to_string(),
            };
            emit(command, &a.out, &results, || {
                let rows = results
                    .seeds
                    .iter()
                    .zip(&results.values)
                    .map(|(s, v)| vec![s.to_string(), v.to_string()])
                    .collect();
                (strings(&["seed", "value"]), rows)
            })
        }
    }
}

/// One row per probe and radius: probe index, coordinates, ladder index,
/// radius, τ (or `n_max` when not hit), hit flag and the two estimates.
fn hitting_table(d: usize, records: &[HittingRecord]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["probe".to_string()];
    header.extend((1..=d).map(|k| format!("y{k}")));
    header.extend(strings(&["j", "r", "tau", "hit", "h_upper", "h_lower"]));
    let mut rows = Vec::new();
    for (p, rec) in records.iter().enumerate() {
        for (j, (r, tau)) in rec.radii.iter().zip(&rec.taus).enumerate() {
            let mut row = vec![p.to_string()];
            row.extend(rec.probe.coords().iter().map(f64::to_string));
            let (t, hit) = match tau {
                Tau::Hit(n) => (*n, true),
                Tau::NotHitWithin(n) => (*n, false),
            };
            row.extend([
                j.to_string(),
                r.to_string(),
                t.to_string(),
                hit.to_string(),
                opt(rec.h_upper_estimate),
                opt(rec.h_lower_estimate),
            ]);
            rows.push(row);
        }
    }
    (header, rows)
}
