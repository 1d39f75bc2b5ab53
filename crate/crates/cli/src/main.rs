mod format;
mod model;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use relimp::binary::{BinaryRegistry, BINARY_TIE_TOLERANCE};
use relimp::continuous::{covariance_curve, ContinuousOptions, LifetimeRegistry};
use relimp::lifetime::{LifetimeDistribution, LifetimeModel};
use relimp::oracle::{mc_lifetime_covariance, McConfig};
use relimp::report::rank;
use relimp::verify::{verify_binary, verify_lifetime, verify_random, CheckResult, Outcome};
use relimp::{ImportanceReport, ProbabilityVector, StructureFunction};

use format::{id_list, sig, Table, CSV_DIGITS, TABLE_DIGITS};
use model::Model;

#[derive(Parser)]
#[command(name = "relimp", version, about = "Component importance for coherent reliability systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank components of a binary model (every component has "p").
    Rank {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = BinaryMeasureArg::Cov)]
        measure: BinaryMeasureArg,
    },
    /// Rank components of a lifetime model (every component has "dist").
    RankLifetime {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = LifetimeMeasureArg::Linf)]
        measure: LifetimeMeasureArg,
        /// Add a Monte Carlo estimate column: SEED,SAMPLES.
        #[arg(long, value_name = "SEED,SAMPLES")]
        mc_check: Option<String>,
    },
    /// Covariance curve of one component, or the two-component rate sweep, as CSV.
    Curve {
        model: PathBuf,
        #[arg(long, required_unless_present = "alpha_sweep")]
        component: Option<usize>,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Upper end of the time grid; defaults to the 1e-4 tail quantile.
        #[arg(long)]
        t_max: Option<f64>,
        /// LO:HI:STEPS; component 1 gets rate alpha times the rate of component 2.
        #[arg(long, value_name = "LO:HI:STEPS", conflicts_with = "component")]
        alpha_sweep: Option<String>,
    },
    /// Run the invariant suite on a model file or on random systems.
    Verify {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        model: Option<PathBuf>,
        #[arg(long, value_name = "TRIALS")]
        random: Option<usize>,
        #[arg(long, default_value_t = 10)]
        max_components: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Birnbaum and covariance importance of the 2-out-of-3 system at four reliability vectors.
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinaryMeasureArg {
    Birnbaum,
    Ra,
    Rr,
    Cov,
    CovNorm,
    Info,
    All,
}

impl BinaryMeasureArg {
    fn key(self) -> &'static str {
        match self {
            Self::Birnbaum => "birnbaum",
            Self::Ra => "ra",
            Self::Rr => "rr",
            Self::Cov => "cov",
            Self::CovNorm => "cov-norm",
            Self::Info => "info",
            Self::All => "all",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LifetimeMeasureArg {
    L1,
    Linf,
    LinfDual,
    Natvig,
}

impl LifetimeMeasureArg {
    fn key(self) -> &'static str {
        match self {
            Self::L1 => "l1",
            Self::Linf => "linf",
            Self::LinfDual => "linf-dual",
            Self::Natvig => "natvig",
        }
    }
}

enum Failure {
    Verification,
    Input(anyhow::Error),
    Unsupported(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Unsupported(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("RELIMP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| anyhow!("RELIMP_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(command: Command) -> CmdResult {
    let mut out = io::stdout().lock();
    match command {
        Command::Rank { model, measure } => cmd_rank(&mut out, &model, measure),
        Command::RankLifetime { model, measure, mc_check } => {
            cmd_rank_lifetime(&mut out, &model, measure, mc_check.as_deref())
        }
        Command::Curve { model, component, points, t_max, alpha_sweep } => match alpha_sweep {
            Some(spec) => cmd_alpha_sweep(&mut out, &model, &spec),
            None => cmd_curve(&mut out, &model, component.expect("clap requires it"), points, t_max),
        },
        Command::Verify { model, random, max_components, seed } => match (model, random) {
            (Some(path), None) => cmd_verify_file(&mut out, &path),
            (None, Some(trials)) => report_checks(&mut out, &verify_random(trials, max_components, seed)),
            _ => unreachable!("clap enforces exactly one source"),
        },
        Command::Table => cmd_table(&mut out),
    }
}

fn io_err(e: io::Error) -> Failure {
    Failure::Input(anyhow!(e).context("writing output"))
}

fn cmd_rank(out: &mut impl Write, path: &Path, measure: BinaryMeasureArg) -> CmdResult {
    let model = Model::load(path)?;
    let p = model.binary()?;
    let sf = &model.sf;
    if let Some(v) = sf.monotone_violation() {
        return Err(anyhow!(
            "structure is not monotone: raising component {} lowers the system state; run `relimp verify`",
            v.component
        )
        .into());
    }
    warn_structure(sf);
    let registry = BinaryRegistry::default();
    let reports = match measure {
        BinaryMeasureArg::All => registry.evaluate_all(sf, p).map_err(anyhow::Error::from)?,
        one => vec![registry.evaluate(one.key(), sf, p).map_err(anyhow::Error::from)?],
    };
    write_binary_reports(out, &registry, &reports).map_err(io_err)
}

fn warn_structure(sf: &StructureFunction) {
    for w in sf.warnings() {
        eprintln!("warning: {w}");
    }
    for id in sf.irrelevant_components() {
        eprintln!("warning: component {id} is irrelevant; its importance is 0");
    }
}

fn write_binary_reports(out: &mut impl Write, registry: &BinaryRegistry, reports: &[ImportanceReport]) -> io::Result<()> {
    let n = reports[0].values.len();
    if let [r] = reports {
        writeln!(out, "measure: {}", r.measure)?;
        let mut t = Table::new(&["component", "value", "rank"]);
        let ranks = r.ranks();
        for id in 1..=n {
            t.row(vec![id.to_string(), sig(r.value(id), TABLE_DIGITS), ranks[id - 1].to_string()]);
        }
        write!(out, "{}", t.render())?;
        return writeln!(out, "ranking: {}", id_list(&r.ranking));
    }
    let keys = registry.keys();
    let header: Vec<&str> = std::iter::once("component").chain(keys.iter().copied()).collect();
    let mut t = Table::new(&header);
    for id in 1..=n {
        t.row(std::iter::once(id.to_string()).chain(reports.iter().map(|r| sig(r.value(id), TABLE_DIGITS))).collect());
    }
    write!(out, "{}", t.render())?;
    writeln!(out)?;
    let width = keys.iter().map(|k| k.len()).max().unwrap_or(0);
    for (key, r) in keys.iter().zip(reports) {
        writeln!(out, "ranking {key:<width$}  {}", id_list(&r.ranking))?;
    }
    Ok(())
}

fn parse_mc(spec: &str) -> anyhow::Result<McConfig> {
    let (seed, samples) = spec.split_once(',').ok_or_else(|| anyhow!("--mc-check expects SEED,SAMPLES, got {spec:?}"))?;
    let seed = seed.trim().parse().with_context(|| format!("--mc-check seed {seed:?}"))?;
    let samples: usize = samples.trim().parse().with_context(|| format!("--mc-check samples {samples:?}"))?;
    if samples < 2 {
        bail!("--mc-check needs at least 2 samples");
    }
    Ok(McConfig::new(seed, samples))
}

fn cmd_rank_lifetime(out: &mut impl Write, path: &Path, measure: LifetimeMeasureArg, mc: Option<&str>) -> CmdResult {
    let mc = mc.map(parse_mc).transpose()?;
    let model = Model::load(path)?;
    let m = model.lifetime()?;
    warn_structure(m.sf());
    let report = match LifetimeRegistry::default().evaluate(measure.key(), &m, &ContinuousOptions::default()) {
        Ok(r) => r,
        Err(e @ relimp::Error::NonExponential { .. }) => {
            return Err(Failure::Unsupported(anyhow!(e).context("natvig needs exponential lifetimes")))
        }
        Err(e) => return Err(anyhow!(e).into()),
    };
    let mc_report = mc.map(|cfg| mc_lifetime_covariance(&m, &cfg)).transpose().map_err(anyhow::Error::from)?;

    let mut header = vec!["component", "value", "rank"];
    if report.maximizers.is_some() {
        header.push("t*");
    }
    if mc_report.is_some() {
        header.extend(["mc", "mc_se"]);
    }
    let mut t = Table::new(&header);
    let ranks = report.ranks();
    for id in 1..=m.n() {
        let mut row = vec![id.to_string(), sig(report.value(id), TABLE_DIGITS), ranks[id - 1].to_string()];
        if let Some(at) = &report.maximizers {
            row.push(sig(at[id - 1], TABLE_DIGITS));
        }
        if let Some(mc) = &mc_report {
            let c = &mc.components[id - 1];
            let (value, se) = match measure {
                LifetimeMeasureArg::L1 => (c.covariance.value, c.covariance.std_error),
                LifetimeMeasureArg::Linf | LifetimeMeasureArg::LinfDual => (c.sup.value, c.sup.std_error),
                LifetimeMeasureArg::Natvig => {
                    let rate = m.dist(id).exponential_rate().expect("natvig succeeded");
                    (rate * c.covariance.value, rate * c.covariance.std_error)
                }
            };
            row.push(sig(value, TABLE_DIGITS));
            row.push(sig(se, TABLE_DIGITS));
        }
        t.row(row);
    }
    writeln!(out, "measure: {}", report.measure).map_err(io_err)?;
    write!(out, "{}", t.render()).map_err(io_err)?;
    writeln!(out, "ranking: {}", id_list(&report.ranking)).map_err(io_err)?;
    if matches!(measure, LifetimeMeasureArg::L1) && m.sf().is_series() && m.exponential_rates().is_ok() {
        writeln!(out, "note: L1 cannot distinguish series exponential components").map_err(io_err)?;
    }
    if let Some(mc) = &mc_report {
        writeln!(out, "mc: seed {}, {} samples", mc.config.seed, mc.config.samples).map_err(io_err)?;
    }
    Ok(())
}

fn csv_writer(out: &mut impl Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(out as &mut dyn Write)
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Input(anyhow!(e).context("writing CSV"))
}

fn cmd_curve(out: &mut impl Write, path: &Path, component: usize, points: usize, t_max: Option<f64>) -> CmdResult {
    if points < 2 {
        return Err(anyhow!("--points must be at least 2, got {points}").into());
    }
    let m = Model::load(path)?.lifetime()?;
    let hi = t_max.unwrap_or_else(|| m.horizon(1e-4));
    if !(hi.is_finite() && hi > 0.0) {
        return Err(anyhow!("--t-max must be positive and finite, got {hi}").into());
    }
    let grid: Vec<f64> = (0..points).map(|k| hi * k as f64 / (points - 1) as f64).collect();
    let curve = covariance_curve(&m, component, &grid).map_err(anyhow::Error::from)?;
    let mut w = csv_writer(out);
    w.write_record(["t", "cov"]).map_err(csv_err)?;
    for (t, c) in curve {
        w.write_record([sig(t, CSV_DIGITS), sig(c, CSV_DIGITS)]).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

fn parse_sweep(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        bail!("--alpha-sweep expects LO:HI:STEPS, got {spec:?}");
    };
    let lo: f64 = lo.trim().parse().with_context(|| format!("--alpha-sweep LO {lo:?}"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("--alpha-sweep HI {hi:?}"))?;
    let steps: usize = steps.trim().parse().with_context(|| format!("--alpha-sweep STEPS {steps:?}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        bail!("--alpha-sweep needs 0 < LO <= HI, got {lo}:{hi}");
    }
    match steps {
        0 => bail!("--alpha-sweep STEPS must be at least 1"),
        1 if lo != hi => bail!("--alpha-sweep with one step needs LO = HI"),
        1 => Ok(vec![lo]),
        _ => Ok((0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect()),
    }
}

fn cmd_alpha_sweep(out: &mut impl Write, path: &Path, spec: &str) -> CmdResult {
    let alphas = parse_sweep(spec)?;
    let m = Model::load(path)?.lifetime()?;
    if m.n() != 2 {
        return Err(anyhow!("--alpha-sweep needs exactly two components, model has {}", m.n()).into());
    }
    let rates = m.exponential_rates().context("--alpha-sweep needs exponential components")?;
    let base = rates[1];
    let opts = ContinuousOptions::default();
    let registry = LifetimeRegistry::default();
    let mut w = csv_writer(out);
    w.write_record(["alpha", "I1", "I2"]).map_err(csv_err)?;
    for alpha in alphas {
        let dists = vec![
            LifetimeDistribution::exponential(alpha * base).map_err(anyhow::Error::from)?,
            LifetimeDistribution::exponential(base).map_err(anyhow::Error::from)?,
        ];
        let swept = LifetimeModel::new(m.sf().clone(), dists).map_err(anyhow::Error::from)?;
        let r = registry.evaluate("linf", &swept, &opts).map_err(anyhow::Error::from)?;
        w.write_record([sig(alpha, CSV_DIGITS), sig(r.value(1), CSV_DIGITS), sig(r.value(2), CSV_DIGITS)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

fn cmd_verify_file(out: &mut impl Write, path: &Path) -> CmdResult {
    let model = Model::load(path)?;
    let checks = match &model.components {
        model::Components::Binary(p) => verify_binary(&model.sf, p),
        model::Components::Lifetime(_) if model.sf.is_coherent() => {
            verify_lifetime(&model.lifetime()?, &ContinuousOptions::default())
        }
        // structural checks only; lifetime checks need a coherent system
        model::Components::Lifetime(_) => {
            let half = ProbabilityVector::uniform(model.sf.n(), 0.5).map_err(anyhow::Error::from)?;
            verify_binary(&model.sf, &half)
        }
    };
    report_checks(out, &checks)
}

fn report_checks(out: &mut impl Write, checks: &[CheckResult]) -> CmdResult {
    for c in checks {
        writeln!(out, "{c}").map_err(io_err)?;
    }
    let failed = checks.iter().filter(|c| c.outcome == Outcome::Fail).count();
    if failed == 0 {
        writeln!(out, "verdict: PASS ({} checks)", checks.len()).map_err(io_err)?;
        Ok(())
    } else {
        writeln!(out, "verdict: FAIL ({failed} of {} checks failed)", checks.len()).map_err(io_err)?;
        Err(Failure::Verification)
    }
}

const TABLE_ROWS: [[f64; 3]; 4] = [[0.1, 0.2, 0.3], [0.3, 0.4, 0.5], [0.5, 0.6, 0.7], [0.7, 0.8, 0.9]];

fn cmd_table(out: &mut impl Write) -> CmdResult {
    let sf = StructureFunction::k_out_of_n(2, 3).map_err(anyhow::Error::from)?;
    let registry = BinaryRegistry::default();
    let mut t = Table::new(&["p", "measure", "I(1)", "I(2)", "I(3)", "descending", "ascending"]);
    for row in TABLE_ROWS {
        let p = ProbabilityVector::new(row.to_vec()).map_err(anyhow::Error::from)?;
        for key in ["birnbaum", "cov"] {
            let r = registry.evaluate(key, &sf, &p).map_err(anyhow::Error::from)?;
            let negated: Vec<f64> = r.values.iter().map(|v| -v).collect();
            let ascending = rank(&negated, BINARY_TIE_TOLERANCE);
            let mut cells = vec![
                row.iter().map(|x| sig(*x, TABLE_DIGITS)).collect::<Vec<_>>().join(" "),
                r.measure.clone(),
            ];
            cells.extend(r.values.iter().map(|v| sig(*v, TABLE_DIGITS)));
            cells.push(id_list(&r.ranking));
            cells.push(id_list(&ascending));
            t.row(cells);
        }
    }
    writeln!(out, "2-out-of-3 system").map_err(io_err)?;
    write!(out, "{}", t.render()).map_err(io_err)?;
    writeln!(out).map_err(io_err)?;
    writeln!(out, "descending: most important first; ascending: least important first.").map_err(io_err)?;
    writeln!(
        out,
        "Values within {BINARY_TIE_TOLERANCE:e} are tied; tied components are listed by ascending id in both orders."
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "Note: at p = (0.1, 0.2, 0.3) the Birnbaum order from most to least important is 1 2 3; a listing of 3 2 1 is the ascending order."
    )
    .map_err(io_err)
}
