//! Run configurations, job dispatch and report files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certifiers::{
    certify_associativity, certify_entropy_equation, certify_fundamental_closed,
    certify_fundamental_open, certify_hyperstable, certify_measure_sequence,
    certify_mixed_sum_form, certify_modified_entropy, certify_sum_form,
    certify_sum_form_multiplicative, hyperstability_blowup_probe, CertifyOptions, Interval,
    StabilityCertificate, StabilityConstants,
};
use crate::domains::{csv_err, GridSpec};
use crate::equations::{
    residual, Engine, EquationKind, Operands, ResidualReport, DEFAULT_PAIR_BUDGET,
    DEFAULT_SIMPLEX_BUDGET,
};
use crate::error::{Error, Result};
use crate::measures::{
    check_additivity, check_normalization, check_recursivity, check_semisymmetry3,
    check_sum_property, check_symmetry, derive_generating_defect, write_measure_csv,
    InformationMeasure,
};
use crate::models::{Alpha, BinaryFunction, Regime, ScalarFunction, TernaryFunction};

pub const SCHEMA_VERSION: u32 = 1;

/// Margins `2⁻³, …, 2⁻⁹` used when a blow-up probe is attached automatically.
pub fn default_margins() -> Vec<f64> {
    (3..=9).map(|k| 0.5f64.powi(k)).collect()
}

fn default_box() -> f64 {
    1.0
}

/// Evaluation caps; configurations above them are refused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default = "default_pair")]
    pub pair: u64,
    #[serde(default = "default_simplex")]
    pub simplex: u64,
}

fn default_pair() -> u64 {
    DEFAULT_PAIR_BUDGET as u64
}

fn default_simplex() -> u64 {
    DEFAULT_SIMPLEX_BUDGET as u64
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            pair: default_pair(),
            simplex: default_simplex(),
        }
    }
}

/// The functions a residual job applies its equation to.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Functions {
    #[serde(default)]
    pub f: Option<ScalarFunction>,
    /// Second scalar function of the two-function identities.
    #[serde(default)]
    pub phi: Option<ScalarFunction>,
    #[serde(default)]
    pub binary: Option<BinaryFunction>,
    #[serde(default)]
    pub ternary: Option<TernaryFunction>,
}

impl Functions {
    fn operands(&self) -> Result<Operands<'_>> {
        match (&self.f, &self.phi, &self.binary, &self.ternary) {
            (Some(f), Some(phi), None, None) => Ok(Operands::Pair(f, phi)),
            (Some(f), None, None, None) => Ok(Operands::Scalar(f)),
            (None, None, Some(b), None) => Ok(Operands::Binary(b)),
            (None, None, None, Some(t)) => Ok(Operands::Ternary(t)),
            _ => Err(Error::config(
                "functions",
                "give exactly one of f, binary, ternary (or f and phi for a pair)",
            )),
        }
    }
}

/// A single theorem to certify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TheoremJob {
    FundamentalOpen {
        f: ScalarFunction,
        alpha: Alpha,
        resolution: usize,
        #[serde(default)]
        epsilon_override: Option<f64>,
    },
    FundamentalClosed {
        f: ScalarFunction,
        alpha: Alpha,
        resolution: usize,
        #[serde(default)]
        epsilon_override: Option<f64>,
    },
    Hyperstable {
        f: ScalarFunction,
        alpha: Alpha,
        resolution: usize,
        #[serde(default)]
        closed: bool,
        #[serde(default)]
        epsilon_override: Option<f64>,
    },
    MeasureSequence {
        measure: InformationMeasure,
        max_level: usize,
        resolution: usize,
    },
    EntropyEquation {
        h: TernaryFunction,
        alpha: Alpha,
        resolution: usize,
        #[serde(default = "default_box")]
        box_bound: f64,
        #[serde(default)]
        epsilon_override: Option<f64>,
    },
    Associativity {
        a: BinaryFunction,
        b: BinaryFunction,
        u: Interval,
        v: Interval,
        w: Interval,
        resolution: usize,
    },
    ModifiedEntropy {
        f: TernaryFunction,
        alpha: Alpha,
        resolution: usize,
        #[serde(default = "default_box")]
        box_bound: f64,
        #[serde(default)]
        epsilon_override: Option<f64>,
    },
    SumForm {
        phi: ScalarFunction,
        n: usize,
        resolution: usize,
    },
    SumFormMultiplicative {
        g: ScalarFunction,
        n: usize,
        m: usize,
        #[serde(default)]
        alpha: Option<Alpha>,
        resolution: usize,
    },
    MixedSumForm {
        f: ScalarFunction,
        alpha: f64,
        beta: f64,
        n: usize,
        m: usize,
        resolution: usize,
    },
}

/// A smooth bump added to a swept family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub height: f64,
}

/// What an α sweep evaluates at each α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "of", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SweepTarget {
    /// K(α), T(α) and the relation gap.
    Constants,
    /// The family `a·x^α + b(1−x)^α − b` (plus an optional bump) through the
    /// certifier matching each α.
    Fundamental {
        a: f64,
        b: f64,
        resolution: usize,
        #[serde(default)]
        closed: bool,
        #[serde(default)]
        bump: Option<Bump>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Job {
    Residual {
        equation: EquationKind,
        grid: GridSpec,
        functions: Functions,
        #[serde(default)]
        target: Option<f64>,
    },
    Certify {
        certify: TheoremJob,
    },
    Measure {
        measure: InformationMeasure,
        resolution: usize,
        /// Generator of the sum property to check, if any.
        #[serde(default)]
        sum_function: Option<ScalarFunction>,
        /// Writes `measure_table.csv` for `Iₙ` at this `n`.
        #[serde(default)]
        table_n: Option<usize>,
    },
    Sweep {
        alphas: Vec<f64>,
        target: SweepTarget,
    },
    Blowup {
        f: ScalarFunction,
        alpha: Alpha,
        resolution: usize,
        #[serde(default = "default_margins")]
        margins: Vec<f64>,
    },
}

impl Job {
    pub fn kind(&self) -> &'static str {
        match self {
            Job::Residual { .. } => "residual",
            Job::Certify { .. } => "certify",
            Job::Measure { .. } => "measure",
            Job::Sweep { .. } => "sweep",
            Job::Blowup { .. } => "blowup",
        }
    }
}

/// Top-level configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Worker threads; the command line flag takes precedence.
    #[serde(default)]
    pub parallelism: Option<usize>,
    #[serde(default)]
    pub budget: Budget,
    pub job: Job,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::config("--config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!(
                    "{} is not supported (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        if self.parallelism == Some(0) {
            return Err(Error::config("parallelism", "must be at least 1"));
        }
        match &self.job {
            Job::Sweep { alphas, target } => {
                if alphas.is_empty() {
                    return Err(Error::config("job.alphas", "empty alpha grid"));
                }
                if let Some(a) = alphas.iter().find(|a| !a.is_finite()) {
                    return Err(Error::config("job.alphas", format!("{a} is not finite")));
                }
                if matches!(target, SweepTarget::Fundamental { .. }) && alphas.contains(&1.0) {
                    return Err(Error::unsupported(
                        "job.alphas",
                        "alpha = 1 is excluded from certifier sweeps (no stability constant)",
                    ));
                }
            }
            Job::Measure { measure, .. }
            | Job::Certify {
                certify: TheoremJob::MeasureSequence { measure, .. },
            } => measure.validate()?,
            _ => {}
        }
        Ok(())
    }

    fn engine(&self, dump_defects: bool) -> Engine {
        Engine {
            pair_budget: self.budget.pair as u128,
            simplex_budget: self.budget.simplex as u128,
            dump_defects,
        }
    }
}

/// Probe results attached to a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub alpha: f64,
    pub resolution: usize,
    /// `(margin, sup residual)` pairs.
    pub points: Vec<(f64, f64)>,
    /// Last residual over the first.
    pub growth: f64,
}

/// Constants at one α, as emitted by a constants sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRow {
    #[serde(flatten)]
    pub constants: StabilityConstants,
    pub relation_gap: Option<f64>,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub job: String,
    /// `ok` or `violation`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<StabilityCertificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<ResidualReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constants: Vec<ConstantsRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blowup: Vec<BlowupReport>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
}

impl Report {
    fn new(job: &Job) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            job: job.kind().to_string(),
            ..Default::default()
        }
    }

    pub fn violated(&self) -> bool {
        self.certificates.iter().any(|c| !c.satisfied)
            || self.residuals.iter().any(|r| !r.within_target())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }

    /// One row per certificate, residual or constants entry.
    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        if !self.constants.is_empty() {
            w.write_record(["alpha", "regime", "K", "T", "relation_gap"])
                .map_err(csv_err)?;
            for row in &self.constants {
                let c = &row.constants;
                w.write_record([
                    c.alpha.to_string(),
                    c.regime.to_string(),
                    opt(c.K),
                    opt(c.T),
                    opt(row.relation_gap),
                ])
                .map_err(csv_err)?;
            }
        } else if !self.certificates.is_empty() {
            w.write_record([
                "theorem",
                "alpha",
                "regime",
                "epsilon",
                "bound",
                "distance",
                "satisfied",
            ])
            .map_err(csv_err)?;
            for c in &self.certificates {
                w.write_record([
                    c.theorem.clone(),
                    opt(c.alpha),
                    c.regime.map_or(String::new(), |r| r.to_string()),
                    c.epsilon.to_string(),
                    c.bound.to_string(),
                    c.observed_distance.to_string(),
                    c.satisfied.to_string(),
                ])
                .map_err(csv_err)?;
            }
        } else {
            w.write_record([
                "equation",
                "domain",
                "resolution",
                "sup",
                "mean",
                "target",
                "within_target",
            ])
            .map_err(csv_err)?;
            for r in &self.residuals {
                w.write_record([
                    r.equation.clone(),
                    r.domain.clone(),
                    r.resolution.to_string(),
                    r.sup.to_string(),
                    r.mean.to_string(),
                    opt(r.epsilon_target),
                    r.within_target().to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    /// Per-point defects kept by the engine, tagged with their report.
    pub fn defects_csv(&self) -> Result<Option<String>> {
        let mut sources: Vec<(String, &ResidualReport)> = self
            .residuals
            .iter()
            .enumerate()
            .map(|(k, r)| (format!("residual-{k}-{}", r.equation), r))
            .collect();
        for (k, c) in self.certificates.iter().enumerate() {
            if let Some(r) = &c.residual {
                sources.push((format!("certificate-{k}-{}", c.theorem), r));
            }
        }
        if sources.iter().all(|(_, r)| r.defects.is_none()) {
            return Ok(None);
        }
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        w.write_record(["source", "coordinates...", "defect"])
            .map_err(csv_err)?;
        for (name, r) in sources {
            for (p, d) in r.defects.iter().flatten() {
                let mut rec = vec![name.clone()];
                rec.extend(p.iter().map(|v| v.to_string()));
                rec.push(d.to_string());
                w.write_record(&rec).map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        Ok(Some(
            String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))?,
        ))
    }
}

/// Command-line level settings.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub dump_defects: bool,
}

/// Result of [`run`]: the exit code plus what was produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Option<Report>,
    pub diagnostic: Option<String>,
}

fn opts(resolution: usize, epsilon_override: Option<f64>) -> CertifyOptions {
    CertifyOptions {
        resolution,
        epsilon_override,
    }
}

fn probe(
    f: &ScalarFunction,
    alpha: Alpha,
    margins: &[f64],
    resolution: usize,
    engine: &Engine,
) -> Result<BlowupReport> {
    let points = hyperstability_blowup_probe(f, alpha, margins, resolution, engine)?;
    let first = points.first().map_or(0.0, |p| p.1);
    let last = points.last().map_or(0.0, |p| p.1);
    Ok(BlowupReport {
        alpha: alpha.value(),
        resolution,
        points,
        growth: if first > 0.0 {
            last / first
        } else {
            f64::INFINITY
        },
    })
}

fn hyperstable_with_probe(
    f: &ScalarFunction,
    alpha: Alpha,
    o: &CertifyOptions,
    closed: bool,
    engine: &Engine,
    report: &mut Report,
) -> Result<()> {
    let cert = certify_hyperstable(f, alpha, o, closed, engine)?;
    if !cert.satisfied {
        let mut r = o.resolution;
        // the probe needs room below the smallest margin
        while (r as f64) * 0.5f64.powi(9) < 4.0 {
            r *= 2;
        }
        report
            .blowup
            .push(probe(f, alpha, &default_margins(), r, engine)?);
    }
    report.certificates.push(cert);
    Ok(())
}

fn certify(job: &TheoremJob, engine: &Engine, report: &mut Report) -> Result<()> {
    let cert = match job {
        TheoremJob::FundamentalOpen {
            f,
            alpha,
            resolution,
            epsilon_override,
        } => certify_fundamental_open(f, *alpha, &opts(*resolution, *epsilon_override), engine)?,
        TheoremJob::FundamentalClosed {
            f,
            alpha,
            resolution,
            epsilon_override,
        } => certify_fundamental_closed(f, *alpha, &opts(*resolution, *epsilon_override), engine)?,
        TheoremJob::Hyperstable {
            f,
            alpha,
            resolution,
            closed,
            epsilon_override,
        } => {
            return hyperstable_with_probe(
                f,
                *alpha,
                &opts(*resolution, *epsilon_override),
                *closed,
                engine,
                report,
            );
        }
        TheoremJob::MeasureSequence {
            measure,
            max_level,
            resolution,
        } => {
            let certs =
                certify_measure_sequence(measure, *max_level, &opts(*resolution, None), engine)?;
            report.certificates.extend(certs);
            return Ok(());
        }
        TheoremJob::EntropyEquation {
            h,
            alpha,
            resolution,
            box_bound,
            epsilon_override,
        } => certify_entropy_equation(
            h,
            *alpha,
            *box_bound,
            &opts(*resolution, *epsilon_override),
            engine,
        )?,
        TheoremJob::Associativity {
            a,
            b,
            u,
            v,
            w,
            resolution,
        } => certify_associativity(a, b, *u, *v, *w, *resolution, engine)?,
        TheoremJob::ModifiedEntropy {
            f,
            alpha,
            resolution,
            box_bound,
            epsilon_override,
        } => certify_modified_entropy(
            f,
            *alpha,
            *box_bound,
            &opts(*resolution, *epsilon_override),
            engine,
        )?,
        TheoremJob::SumForm { phi, n, resolution } => {
            certify_sum_form(phi, *n, *resolution, engine)?
        }
        TheoremJob::SumFormMultiplicative {
            g,
            n,
            m,
            alpha,
            resolution,
        } => certify_sum_form_multiplicative(g, *n, *m, *alpha, *resolution, engine)?,
        TheoremJob::MixedSumForm {
            f,
            alpha,
            beta,
            n,
            m,
            resolution,
        } => certify_mixed_sum_form(f, *alpha, *beta, *n, *m, *resolution, engine)?,
    };
    report.certificates.push(cert);
    Ok(())
}

fn measure_job(
    m: &InformationMeasure,
    resolution: usize,
    sum_function: Option<&ScalarFunction>,
    engine: &Engine,
    report: &mut Report,
) -> Result<()> {
    for n in 2..=m.max_n.min(4) {
        report
            .residuals
            .push(check_symmetry(m, n, resolution, engine)?);
    }
    if m.max_n >= 3 {
        report
            .residuals
            .push(check_semisymmetry3(m, resolution, engine)?);
        for n in 3..=m.max_n {
            report
                .residuals
                .push(check_recursivity(m, n, resolution, engine)?);
        }
        let (_, gen) = derive_generating_defect(m, resolution, engine)?;
        report.residuals.push(gen);
    }
    if m.max_n >= 4 {
        report
            .residuals
            .push(check_additivity(m, 2, 2, resolution, engine)?);
    }
    if let Some(f) = sum_function {
        for n in 2..=m.max_n {
            report
                .residuals
                .push(check_sum_property(m, f, n, resolution, engine)?);
        }
    }
    report
        .values
        .insert("normalization".into(), check_normalization(m)?);
    Ok(())
}

fn sweep_job(
    alphas: &[f64],
    target: &SweepTarget,
    engine: &Engine,
    report: &mut Report,
) -> Result<()> {
    for &a in alphas {
        let alpha = Alpha::new(a)?;
        match target {
            SweepTarget::Constants => {
                let constants = StabilityConstants::new(alpha, None);
                let relation_gap = constants.relation_gap();
                report.constants.push(ConstantsRow {
                    constants,
                    relation_gap,
                });
            }
            SweepTarget::Fundamental {
                a: ca,
                b: cb,
                resolution,
                closed,
                bump,
            } => {
                let mut f = ScalarFunction::power_family(*ca, *cb, a);
                if let Some(bp) = bump {
                    f = f.plus(ScalarFunction::bump(bp.center, bp.width, bp.height));
                }
                let o = CertifyOptions::at(*resolution);
                match alpha.regime() {
                    Regime::Negative => {
                        hyperstable_with_probe(&f, alpha, &o, *closed, engine, report)?
                    }
                    _ if *closed => report
                        .certificates
                        .push(certify_fundamental_closed(&f, alpha, &o, engine)?),
                    _ => report
                        .certificates
                        .push(certify_fundamental_open(&f, alpha, &o, engine)?),
                }
            }
        }
    }
    Ok(())
}

/// Runs the job on the current rayon pool and builds its report.
pub fn execute(config: &RunConfig, dump_defects: bool) -> Result<(Report, Vec<(String, String)>)> {
    config.validate()?;
    let engine = config.engine(dump_defects);
    let mut report = Report::new(&config.job);
    let mut extra = Vec::new();
    match &config.job {
        Job::Residual {
            equation,
            grid,
            functions,
            target,
        } => {
            let g = grid.build(engine.simplex_budget)?;
            let mut r = residual(equation, functions.operands()?, &g, &engine)?;
            if let Some(t) = target {
                r = r.with_target(*t);
            }
            report.residuals.push(r);
        }
        Job::Certify { certify: t } => certify(t, &engine, &mut report)?,
        Job::Measure {
            measure,
            resolution,
            sum_function,
            table_n,
        } => {
            measure_job(
                measure,
                *resolution,
                sum_function.as_ref(),
                &engine,
                &mut report,
            )?;
            if let Some(n) = table_n {
                let mut buf = Vec::new();
                write_measure_csv(measure, *n, *resolution, &engine, &mut buf)?;
                extra.push((
                    "measure_table.csv".to_string(),
                    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))?,
                ));
            }
        }
        Job::Sweep { alphas, target } => sweep_job(alphas, target, &engine, &mut report)?,
        Job::Blowup {
            f,
            alpha,
            resolution,
            margins,
        } => report
            .blowup
            .push(probe(f, *alpha, margins, *resolution, &engine)?),
    }
    report.status = if report.violated() { "violation" } else { "ok" }.to_string();
    Ok((report, extra))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::write(dir.join(name), text)
        .map_err(|e| Error::config("--out", format!("cannot write {name}: {e}")))
}

/// Writes `report.json`, `summary.csv` and, when kept, `defects.csv`.
pub fn write_outputs(dir: &Path, report: &Report, extra: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::config("--out", format!("cannot create {}: {e}", dir.display())))?;
    write_file(dir, "report.json", &report.to_json()?)?;
    write_file(dir, "summary.csv", &report.summary_csv()?)?;
    if let Some(d) = report.defects_csv()? {
        write_file(dir, "defects.csv", &d)?;
    }
    for (name, text) in extra {
        write_file(dir, name, text)?;
    }
    Ok(())
}

fn run_inner(config: &RunConfig, options: &RunOptions) -> Result<Report> {
    let threads = options
        .jobs
        .or(config.parallelism)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(Error::config("--jobs", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let (report, extra) = pool.install(|| execute(config, options.dump_defects))?;
    if let Some(dir) = &options.out_dir {
        write_outputs(dir, &report, &extra)?;
    }
    Ok(report)
}

/// Executes a configuration; exit code 0 when everything holds, 1 on a
/// violated bound or residual target, 2 on configuration errors.
pub fn run(config: &RunConfig, options: &RunOptions) -> RunOutcome {
    match run_inner(config, options) {
        Ok(report) => RunOutcome {
            exit_code: if report.violated() { 1 } else { 0 },
            report: Some(report),
            diagnostic: None,
        },
        Err(e) => RunOutcome {
            exit_code: 2,
            report: None,
            diagnostic: Some(e.to_string()),
        },
    }
}

/// Loads the file and runs it; load failures also map to exit code 2.
pub fn run_file(path: &Path, options: &RunOptions) -> RunOutcome {
    match RunConfig::load(path) {
        Ok(cfg) => run(&cfg, options),
        Err(e) => RunOutcome {
            exit_code: 2,
            report: None,
            diagnostic: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(job: &str) -> RunConfig {
        RunConfig::from_json(&format!(r#"{{"schema_version": 1, "job": {job}}}"#)).unwrap()
    }

    fn serial() -> RunOptions {
        RunOptions {
            jobs: Some(1),
            ..Default::default()
        }
    }

    #[test]
    fn certify_open_round_trip() {
        let c = cfg(
            r#"{"kind": "certify", "certify": {"theorem": "fundamental-open",
            "f": {"kind": "power-family", "a": 2, "b": 1, "alpha": 0.5}, "alpha": 0.5, "resolution": 256}}"#,
        );
        let out = run(&c, &serial());
        assert_eq!(out.exit_code, 0);
        assert!(out.report.unwrap().certificates[0].satisfied);
    }

    #[test]
    fn alpha_one_is_exit_two() {
        let c = cfg(
            r#"{"kind": "certify", "certify": {"theorem": "fundamental-open",
            "f": {"kind": "shannon-s"}, "alpha": 1, "resolution": 16}}"#,
        );
        let out = run(&c, &serial());
        assert_eq!(out.exit_code, 2);
        assert!(out.diagnostic.unwrap().contains("alpha"));
    }

    #[test]
    fn constants_sweep() {
        let c = cfg(
            r#"{"kind": "sweep", "alphas": [0.25, 0.5, 2, 3, 5], "target": {"of": "constants"}}"#,
        );
        let report = run(&c, &serial()).report.unwrap();
        assert_eq!(report.constants.len(), 5);
        let csv = report.summary_csv().unwrap();
        assert!(csv.starts_with("alpha,regime,K,T,relation_gap"));
    }

    #[test]
    fn fundamental_sweep_all_regimes() {
        let c = cfg(r#"{"kind": "sweep", "alphas": [-2, -1, 0.5, 2],
            "target": {"of": "fundamental", "a": 1, "b": 1, "resolution": 64}}"#);
        let out = run(&c, &serial());
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report.unwrap().certificates.len(), 4);
    }

    #[test]
    fn bumped_negative_sweep_attaches_probe() {
        let c = cfg(r#"{"kind": "sweep", "alphas": [-1],
            "target": {"of": "fundamental", "a": 1, "b": 1, "resolution": 64,
                       "bump": {"center": 0.3, "width": 0.1, "height": 0.001}}}"#);
        let out = run(&c, &serial());
        assert_eq!(out.exit_code, 1);
        assert_eq!(out.report.unwrap().blowup.len(), 1);
    }

    #[test]
    fn config_errors() {
        let empty = RunConfig::from_json(
            r#"{"schema_version": 1, "job": {"kind": "sweep", "alphas": [], "target": {"of": "constants"}}}"#,
        );
        assert!(matches!(empty, Err(Error::Config { .. })));
        let bad = RunConfig::from_json(
            r#"{"schema_version": 2, "job": {"kind": "sweep", "alphas": [1], "target": {"of": "constants"}}}"#,
        );
        assert!(matches!(bad, Err(Error::Config { ref field, .. }) if field == "schema_version"));
        let unknown = RunConfig::from_json(r#"{"schema_version": 1, "job": {"kind": "nope"}}"#);
        assert!(unknown.is_err());
    }

    #[test]
    fn residual_with_defect_dump() {
        let c = cfg(
            r#"{"kind": "residual", "equation": {"equation": "fundamental-parametric", "alpha": 1},
            "grid": {"kind": "triangle", "resolution": 8}, "functions": {"f": {"kind": "shannon-s"}}, "target": 1e-12}"#,
        );
        let (report, _) = execute(&c, true).unwrap();
        assert!(!report.violated());
        let d = report.defects_csv().unwrap().unwrap();
        assert!(d.lines().count() > 10);
    }

    #[test]
    fn measure_job_runs() {
        let c = cfg(r#"{"kind": "measure", "resolution": 8, "table_n": 3,
            "measure": {"alpha": 2, "generator": {"kind": "power-family", "a": -2, "b": -2, "alpha": 2}, "max_n": 4}}"#);
        let (report, extra) = execute(&c, false).unwrap();
        assert_eq!(report.status, "ok");
        assert_eq!(extra[0].0, "measure_table.csv");
    }
}
