//! Experiment orchestration for the command-line front end: resolved
//! configurations, deterministic CSV / JSON-lines report files, and the
//! runners behind each subcommand.

use std::io::Write;

use rustfft::num_complex::Complex64;
use serde_json::json;

use crate::charfn::{self, families, LimitingKind, ZoneFamily, ZoneParams};
use crate::diophantine;
use crate::error::{Error, Result};
use crate::limits::{self, DiscreteLaw, JordanWindow, ScaledSignSum, SignSumLaw};
use crate::martingale;
use crate::series::{
    Bernoulli1Fn, CoefficientTriangle, CosFn, FourierFn, LacunarySequence, NormConvention,
    PeriodicFn,
};

/// Bumped on any change to a report column set or JSON field.
pub const REPORT_SCHEMA_VERSION: &str = "1.0.0";

pub fn report_schema_version() -> &'static str {
    REPORT_SCHEMA_VERSION
}

/// Output encodings of report files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

/// Fully resolved run parameters, embedded in every report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub threads: usize,
    pub budget: u128,
    pub format: OutputFormat,
    pub out: Option<String>,
    pub schema_version: &'static str,
}

impl ExperimentConfig {
    pub fn new(subcommand: &str, params: serde_json::Value) -> Self {
        ExperimentConfig {
            subcommand: subcommand.to_string(),
            params,
            seed: 0,
            threads: 0,
            budget: diophantine::DEFAULT_BUDGET,
            format: OutputFormat::Csv,
            out: None,
            schema_version: REPORT_SCHEMA_VERSION,
        }
    }
}

/// Serializes doubles with 17 significant digits so they round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A report file (or stdout) in one of the two formats. The resolved
/// config always goes first: a `# config` comment line ahead of the CSV
/// header, or the first object of a JSON-lines stream.
pub struct ReportSink {
    out: Box<dyn Write>,
    format: OutputFormat,
    columns: Vec<&'static str>,
}

impl ReportSink {
    pub fn create(config: &ExperimentConfig, columns: Vec<&'static str>) -> Result<Self> {
        let out: Box<dyn Write> = match &config.out {
            Some(path) => Box::new(std::fs::File::create(path)?),
            None => Box::new(std::io::stdout()),
        };
        let mut sink = ReportSink { out, format: config.format, columns };
        match sink.format {
            OutputFormat::Csv => {
                writeln!(sink.out, "# config: {}", serde_json::to_string(config).unwrap())?;
                let header = sink.columns.join(",");
                writeln!(sink.out, "{header}")?;
            }
            OutputFormat::JsonLines => {
                writeln!(sink.out, "{}", serde_json::to_string(&json!({"config": config})).unwrap())?;
            }
        }
        Ok(sink)
    }

    pub fn row(&mut self, values: &[serde_json::Value]) -> Result<()> {
        debug_assert_eq!(values.len(), self.columns.len());
        match self.format {
            OutputFormat::Csv => {
                let cells: Vec<String> = values
                    .iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                writeln!(self.out, "{}", cells.join(","))?;
            }
            OutputFormat::JsonLines => {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(values)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                writeln!(self.out, "{}", serde_json::Value::Object(obj))?;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Writes a standalone JSON report (used by the verdict-style subcommands).
pub fn write_json_report(config: &ExperimentConfig, body: serde_json::Value) -> Result<()> {
    let doc = json!({ "config": config, "report": body });
    let text = serde_json::to_string_pretty(&doc).unwrap();
    match &config.out {
        Some(path) => {
            std::fs::write(path, text + "\n")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn f64_value(x: f64) -> serde_json::Value {
    serde_json::Value::String(fmt_f64(x))
}

// ---------------------------------------------------------------------------
// Shared family builders
// ---------------------------------------------------------------------------

/// Exact (or ln-factorial) law of the flat Walsh sum `n^-alpha sum r_k`.
pub fn walsh_flat_law(n: usize, alpha: f64) -> Result<DiscreteLaw> {
    DiscreteLaw::binomial_walsh(n, (n as f64).powf(-alpha))
}

/// Stratified-sampling law of a trigonometric partial sum (these have no
/// exact finite law). The top frequency is capped so the f64 phase error
/// stays below the sampling noise.
pub fn trig_monte_carlo_law(
    seq: &LacunarySequence,
    coeffs: &CoefficientTriangle,
    n: usize,
    strata: u64,
    seed: u64,
) -> Result<DiscreteLaw> {
    if seq.term_f64(n)? > libm::exp2(40.0) {
        return Err(Error::Precision(
            "frequencies beyond 2^40 cannot be sampled faithfully in f64".into(),
        ));
    }
    let row = coeffs.row(n)?;
    let ms: Vec<f64> = (1..=n).map(|k| seq.term_f64(k)).collect::<Result<_>>()?;
    let tau = 2.0 * std::f64::consts::PI;
    DiscreteLaw::monte_carlo(
        move |x| {
            let mut acc = 0.0;
            for (a, m) in row.iter().zip(&ms) {
                acc += a * (tau * m * x).cos();
            }
            acc
        },
        strata,
        seed,
    )
}

/// Periodic handle selected by the `--f` mini-language:
/// `cos`, `bernoulli`, `custom-fourier:PATH` (one `a_m [b_m]` pair per line).
pub fn parse_function_spec(spec: &str) -> Result<Box<dyn PeriodicFn>> {
    match spec {
        "cos" => Ok(Box::new(CosFn)),
        "bernoulli" => Ok(Box::new(Bernoulli1Fn)),
        other => {
            if let Some(path) = other.strip_prefix("custom-fourier:") {
                let body = std::fs::read_to_string(path)?;
                let mut cos_coeffs = Vec::new();
                let mut sin_coeffs = Vec::new();
                for line in body.lines().map(str::trim).filter(|l| !l.is_empty()) {
                    let mut parts = line.split_whitespace();
                    let a: f64 = parts
                        .next()
                        .unwrap()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad coefficient line {line:?}")))?;
                    let b: f64 = match parts.next() {
                        Some(s) => s
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad coefficient line {line:?}")))?,
                        None => 0.0,
                    };
                    cos_coeffs.push(a);
                    sin_coeffs.push(b);
                }
                Ok(Box::new(FourierFn { cos_coeffs, sin_coeffs }))
            } else {
                Err(Error::Parse(format!("unknown function spec {spec:?}")))
            }
        }
    }
}

fn parse_range(spec: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("range must be lo:hi:step, got {spec:?}")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| Error::Parse(format!("bad range {spec:?}")))?;
    let hi: f64 = parts[1].parse().map_err(|_| Error::Parse(format!("bad range {spec:?}")))?;
    let step: f64 = parts[2].parse().map_err(|_| Error::Parse(format!("bad range {spec:?}")))?;
    if !(step > 0.0 && hi >= lo) {
        return Err(Error::Parse(format!("empty range {spec:?}")));
    }
    Ok((lo, hi, step))
}

fn range_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize + 1;
    (0..count).map(|i| lo + i as f64 * step).collect()
}

fn validate_n_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Parse("empty n grid".into()));
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Parse("n grid must be strictly increasing".into()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Runners (return `true` when every verdict in the run passed)
// ---------------------------------------------------------------------------

/// `simulate`: partial-sum values on a uniform grid, or the exact law atoms
/// for Walsh sums.
pub fn run_simulate(
    config: &ExperimentConfig,
    kind: &str,
    seq_spec: &str,
    coeff_spec: &str,
    n: usize,
    points: usize,
) -> Result<bool> {
    match kind {
        "walsh" => {
            let seq = LacunarySequence::parse_spec(seq_spec, n)?;
            let coeffs = CoefficientTriangle::parse_spec(coeff_spec, NormConvention::Walsh)?;
            let step = crate::series::walsh_partial_sum(&seq, &coeffs, n)?;
            let law = limits::exact_law(&step)?;
            let mut sink = ReportSink::create(config, vec!["value", "mass"])?;
            for (v, m) in law.values().iter().zip(law.masses()) {
                sink.row(&[f64_value(*v), f64_value(*m)])?;
            }
            sink.finish()?;
        }
        "trig" | "bernoulli" => {
            let seq = LacunarySequence::parse_spec(seq_spec, n)?;
            let coeffs = CoefficientTriangle::parse_spec(
                coeff_spec,
                if kind == "trig" { NormConvention::Trig } else { NormConvention::Walsh },
            )?;
            let mut sink = ReportSink::create(config, vec!["x", "value"])?;
            for i in 0..points {
                let x = i as f64 / points as f64;
                let v = if kind == "trig" {
                    crate::series::trig_partial_sum(&seq, &coeffs, n, x)?
                } else {
                    crate::series::holder_partial_sum(&Bernoulli1Fn, &seq, &coeffs, n, x)?
                };
                sink.row(&[f64_value(x), f64_value(v)])?;
            }
            sink.finish()?;
        }
        other => return Err(Error::Parse(format!("unknown simulate kind {other:?}"))),
    }
    Ok(true)
}

/// `mgf`: residuals against the limiting function on a z (or lambda) grid.
pub fn run_mgf(
    config: &ExperimentConfig,
    kind: &str,
    seq_spec: &str,
    coeff_spec: &str,
    n: usize,
    grid_spec: &str,
    tol: f64,
) -> Result<bool> {
    let (lo, hi, step) = parse_range(grid_spec)?;
    let zs = range_points(lo, hi, step);
    let cols = vec![
        "n", "t_n", "z_re", "z_im", "phi_re", "phi_im", "residual_re", "residual_im",
        "target_psi_re", "target_psi_im", "abs_error",
    ];
    let mut sink = ReportSink::create(config, cols)?;
    let mut emit = |n: usize,
                    t_n: f64,
                    z: Complex64,
                    phi: Complex64,
                    residual: Complex64,
                    target: Complex64|
     -> Result<()> {
        sink.row(&[
            json!(n),
            f64_value(t_n),
            f64_value(z.re),
            f64_value(z.im),
            f64_value(phi.re),
            f64_value(phi.im),
            f64_value(residual.re),
            f64_value(residual.im),
            f64_value(target.re),
            f64_value(target.im),
            f64_value((residual - target).norm()),
        ])
    };
    match kind {
        "walsh" => {
            let seq = LacunarySequence::parse_spec(seq_spec, n)?;
            let coeffs = CoefficientTriangle::parse_spec(coeff_spec, NormConvention::Walsh)?;
            let t_n = coeffs.normalizer(n)?.powi(2);
            let kappa4 = coeffs.kappa4(n)?;
            for &zr in &zs {
                let z = Complex64::new(zr, 0.0);
                let log_phi = charfn::log_mgf_walsh_exact(&seq, &coeffs, n, z)?;
                let phi = log_phi.exp();
                let residual = (log_phi - z * z * (t_n / 2.0)).exp();
                let target = charfn::limiting_function(LimitingKind::Walsh { kappa4 }, z)?;
                emit(n, t_n, z, phi, residual, target)?;
            }
        }
        "bernoulli" => {
            let t_n = families::bernoulli_t_n(n);
            let scale = (n as f64).powf(-0.25);
            for &zr in &zs {
                let z = Complex64::new(zr, 0.0);
                let log_phi = charfn::log_mgf_bernoulli_exact(n, z * scale, 64)?;
                let phi = log_phi.exp();
                let residual = (log_phi - z * z * (t_n / 2.0)).exp();
                let target = charfn::limiting_function(LimitingKind::Bernoulli, z)?;
                emit(n, t_n, z, phi, residual, target)?;
            }
        }
        "trig" => {
            // lambda grid: phi_n(i lambda / A_n) against the Gaussian target.
            let seq = LacunarySequence::parse_spec(seq_spec, n)?;
            let coeffs = CoefficientTriangle::parse_spec(coeff_spec, NormConvention::Trig)?;
            let a_n = coeffs.normalizer(n)?;
            let t_n = a_n * a_n;
            for &lam in &zs {
                let z = Complex64::new(0.0, lam);
                let phi = if seq.is_dyadic_doubling() && n > 16 {
                    families::trig_doubling_scaled_char_fn(&coeffs, n, lam / a_n)?
                } else {
                    let handle =
                        charfn::SumHandle::Trig { seq: &seq, coeffs: &coeffs, n };
                    charfn::char_fn_quadrature(&handle, lam / a_n, tol)?
                };
                let target = Complex64::new((-0.5 * lam * lam).exp(), 0.0);
                emit(n, t_n, z, phi, phi, target)?;
            }
        }
        other => return Err(Error::Parse(format!("unknown mgf kind {other:?}"))),
    }
    sink.finish()?;
    Ok(true)
}

/// `count-solutions`: exhaustive counts against the closed-form bounds;
/// always a JSON report.
pub fn run_count_solutions(
    config: &ExperimentConfig,
    seq_spec: &str,
    n: usize,
    l: usize,
    r: u32,
    mode: &str,
) -> Result<bool> {
    let seq = LacunarySequence::parse_spec(seq_spec, n)?;
    let reports = match mode {
        "signed" => diophantine::count_signed_solutions(&seq, n, l, r, config.budget)?,
        "xor" => vec![diophantine::count_xor_solutions(&seq, n, l, config.budget)?],
        other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
    };
    let pass = reports.iter().all(|rep| rep.verdict().unwrap_or(true));
    // headline class: the tightest count-to-bound margin
    let headline = reports
        .iter()
        .max_by(|a, b| {
            let ra = a.max_count as f64 / a.bound.unwrap_or(f64::INFINITY);
            let rb = b.max_count as f64 / b.bound.unwrap_or(f64::INFINITY);
            ra.total_cmp(&rb)
        })
        .expect("at least one class");
    let classes: Vec<serde_json::Value> = reports
        .iter()
        .map(|rep| {
            json!({
                "class": rep.class,
                "max_count": rep.max_count,
                "zero_count": rep.zero_count,
                "bound": rep.bound,
                "verdict": rep.verdict(),
                "top_buckets": rep.top_buckets(10)
                    .iter().map(|(a, c)| json!([a.to_string(), c])).collect::<Vec<_>>(),
            })
        })
        .collect();
    write_json_report(
        config,
        json!({
            "params": {"seq": seq_spec, "n": n, "l": l, "r": r, "mode": mode, "q": seq.q()},
            "max_count": headline.max_count,
            "bound": headline.bound,
            "verdict": pass,
            "top_buckets": headline.top_buckets(10)
                .iter().map(|(a, c)| json!([a.to_string(), c])).collect::<Vec<_>>(),
            "classes": classes,
        }),
    )?;
    Ok(pass)
}

fn walsh_a_n(alpha: f64, n: usize) -> f64 {
    families::walsh_flat_a_n(alpha, n)
}

/// `llt`: weak local-limit statistics over an n grid.
#[allow(clippy::too_many_arguments)]
pub fn run_llt(
    config: &ExperimentConfig,
    kind: &str,
    seq_spec: &str,
    alpha: f64,
    n_grid: &[usize],
    window: (f64, f64),
    delta: f64,
    y: f64,
    strata: u64,
) -> Result<bool> {
    validate_n_grid(n_grid)?;
    let window = JordanWindow::interval(window.0, window.1)?;
    let target = limits::llt_target(&window);
    let mut sink =
        ReportSink::create(config, vec!["n", "a_n", "statistic", "target", "abs_error"])?;
    for &n in n_grid {
        let (a_n, stat) = match kind {
            "walsh" => {
                let law = walsh_flat_law(n, alpha)?;
                let a_n = walsh_a_n(alpha, n);
                let stat = limits::llt_statistic(&law, a_n * a_n, y, &window, delta)?;
                (a_n, stat)
            }
            "bernoulli" => {
                let law = SignSumLaw::bernoulli_sum(n, 64);
                let scale = (n as f64).powf(-0.25);
                let scaled = ScaledSignSum { law: &law, scale };
                let t_n = families::bernoulli_t_n(n);
                let stat = limits::llt_statistic(&scaled, t_n, y, &window, delta)?;
                (t_n.sqrt(), stat)
            }
            "trig" => {
                let seq = LacunarySequence::parse_spec(seq_spec, n)?;
                let coeffs = CoefficientTriangle::flat(alpha, NormConvention::Trig);
                let law = trig_monte_carlo_law(&seq, &coeffs, n, strata, config.seed)?;
                let a_n = coeffs.normalizer(n)?;
                let stat = limits::llt_statistic(&law, a_n * a_n, y, &window, delta)?;
                (a_n, stat)
            }
            other => return Err(Error::Parse(format!("unknown llt kind {other:?}"))),
        };
        sink.row(&[
            json!(n),
            f64_value(a_n),
            f64_value(stat),
            f64_value(target),
            f64_value((stat - target).abs()),
        ])?;
    }
    sink.finish()?;
    Ok(true)
}

/// `kolmogorov`: normal-distance sequence and its fitted decay slope.
#[allow(clippy::too_many_arguments)]
pub fn run_kolmogorov(
    config: &ExperimentConfig,
    kind: &str,
    seq_spec: &str,
    alpha: f64,
    n_grid: &[usize],
    slope_bound: Option<f64>,
    strata: u64,
) -> Result<bool> {
    validate_n_grid(n_grid)?;
    let mut points = Vec::new();
    let mut sink =
        ReportSink::create(config, vec!["n", "a_n", "statistic", "target", "abs_error"])?;
    for &n in n_grid {
        let (a_n, d) = match kind {
            "walsh" => {
                let a_n = walsh_a_n(alpha, n);
                let law = walsh_flat_law(n, alpha)?.scale_values(1.0 / a_n)?;
                (a_n, limits::kolmogorov_distance(&law))
            }
            "bernoulli" => {
                let law = SignSumLaw::bernoulli_sum(n, 64);
                let d = law.kolmogorov_vs_normal(2.0 / (n as f64).sqrt())?;
                (families::bernoulli_t_n(n), d)
            }
            "trig" => {
                let seq = LacunarySequence::parse_spec(seq_spec, n)?;
                let coeffs = CoefficientTriangle::flat(alpha, NormConvention::Trig);
                let a_n = coeffs.normalizer(n)?;
                let law = trig_monte_carlo_law(&seq, &coeffs, n, strata, config.seed)?
                    .scale_values(1.0 / a_n)?;
                (a_n, limits::kolmogorov_distance(&law))
            }
            other => return Err(Error::Parse(format!("unknown kolmogorov kind {other:?}"))),
        };
        points.push((a_n, d));
        sink.row(&[json!(n), f64_value(a_n), f64_value(d), f64_value(0.0), f64_value(d)])?;
    }
    sink.finish()?;
    let slope = limits::berry_esseen_rate_fit(&points)?;
    let pass = slope_bound.map(|b| slope <= b).unwrap_or(true);
    eprintln!(
        "{}",
        json!({"fitted_slope": slope, "slope_bound": slope_bound, "pass": pass})
    );
    Ok(pass)
}

/// `tails`: extended-CLT tail ratio over an n grid.
pub fn run_tails(
    config: &ExperimentConfig,
    kind: &str,
    alpha: f64,
    n_grid: &[usize],
    y: f64,
) -> Result<bool> {
    validate_n_grid(n_grid)?;
    let mut sink =
        ReportSink::create(config, vec!["n", "a_n", "statistic", "target", "abs_error"])?;
    for &n in n_grid {
        let (a_n, ratio) = match kind {
            "walsh" => {
                let a_n = walsh_a_n(alpha, n);
                let law = walsh_flat_law(n, alpha)?;
                (a_n, limits::tail_ratio_extended_clt(&law, a_n, y)?)
            }
            "bernoulli" => {
                let law = SignSumLaw::bernoulli_sum(n, 64);
                let scale = (n as f64).powf(-0.25);
                let scaled = ScaledSignSum { law: &law, scale };
                let a_n = families::bernoulli_t_n(n).sqrt();
                (a_n, limits::tail_ratio_extended_clt(&scaled, a_n, y)?)
            }
            other => return Err(Error::Parse(format!("unknown tails kind {other:?}"))),
        };
        sink.row(&[
            json!(n),
            f64_value(a_n),
            f64_value(ratio),
            f64_value(1.0),
            f64_value((ratio - 1.0).abs()),
        ])?;
    }
    sink.finish()?;
    Ok(true)
}

/// `mdp`: observed against predicted moderate-deviation tail mass.
pub fn run_mdp(
    config: &ExperimentConfig,
    kind: &str,
    alpha: f64,
    n_grid: &[usize],
    y: f64,
) -> Result<bool> {
    validate_n_grid(n_grid)?;
    let mut sink =
        ReportSink::create(config, vec!["n", "a_n", "statistic", "target", "abs_error"])?;
    for &n in n_grid {
        let (a_n, check) = match kind {
            "walsh" => {
                let a_n = walsh_a_n(alpha, n);
                let law = walsh_flat_law(n, alpha)?;
                let kappa4 = (n as f64).powf(1.0 - 4.0 * alpha);
                let psi = move |u: f64| (-u.powi(4) * kappa4 / 12.0).exp();
                (a_n, limits::moderate_deviation_check(&law, a_n, y, psi)?)
            }
            "bernoulli" => {
                let law = SignSumLaw::bernoulli_sum(n, 64);
                let scale = (n as f64).powf(-0.25);
                let scaled = ScaledSignSum { law: &law, scale };
                let a_n = families::bernoulli_t_n(n).sqrt();
                let psi = |u: f64| (-u.powi(4) / 192.0).exp();
                (a_n, limits::moderate_deviation_check(&scaled, a_n, y, psi)?)
            }
            other => return Err(Error::Parse(format!("unknown mdp kind {other:?}"))),
        };
        sink.row(&[
            json!(n),
            f64_value(a_n),
            f64_value(check.observed),
            f64_value(check.predicted),
            f64_value((check.observed - check.predicted).abs()),
        ])?;
    }
    sink.finish()?;
    Ok(true)
}

/// `martingale-check`: both sides of the remainder inequality.
pub fn run_martingale_check(
    config: &ExperimentConfig,
    f_spec: &str,
    r: u32,
    n: usize,
    depth: u32,
) -> Result<bool> {
    let f = parse_function_spec(f_spec)?;
    let check = martingale::martingale_inequality_check(f.as_ref(), r, n, depth)?;
    let pass = check.lhs <= check.rhs + check.tail_bound;
    write_json_report(
        config,
        json!({
            "f": f_spec, "r": r, "n": n, "depth": depth,
            "lhs": check.lhs, "rhs": check.rhs,
            "margin": check.margin, "tail_bound": check.tail_bound,
            "pass": pass,
        }),
    )?;
    Ok(pass)
}

/// `zone-check`: fits the control constants and applies the admissibility
/// conditions.
#[allow(clippy::too_many_arguments)]
pub fn run_zone_check(
    config: &ExperimentConfig,
    kind: &str,
    alpha: f64,
    n_grid: &[usize],
    v: f64,
    w: f64,
    gamma: f64,
    d: f64,
) -> Result<bool> {
    validate_n_grid(n_grid)?;
    let family = match kind {
        "walsh" => ZoneFamily {
            label: format!("walsh-flat({alpha})"),
            t_n: Box::new(move |n| walsh_a_n(alpha, n).powi(2)),
            residual: Box::new(move |n, lam| families::walsh_flat_zone_residual(alpha, n, lam)),
        },
        "bernoulli" => ZoneFamily {
            label: "bernoulli".into(),
            t_n: Box::new(families::bernoulli_t_n),
            residual: Box::new(|n, lam| families::bernoulli_zone_residual(n, lam, 64)),
        },
        other => return Err(Error::Parse(format!("unknown zone kind {other:?}"))),
    };
    let report =
        charfn::zone_of_control_check(&family, &ZoneParams { v, w, gamma, d }, n_grid)?;
    let pass = report.pass();
    write_json_report(config, json!({ "family": family.label, "zone": report, "pass": pass }))?;
    Ok(pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0:1:0.5").unwrap(), (0.0, 1.0, 0.5));
        let pts = range_points(-1.0, 1.0, 0.5);
        assert_eq!(pts.len(), 5);
        assert!(parse_range("1:0:0.5").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn f64_formatting_round_trips() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 2.0f64.powi(-40), 123456.789] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn function_spec_parsing() {
        assert!(parse_function_spec("cos").is_ok());
        assert!(parse_function_spec("bernoulli").is_ok());
        assert!(parse_function_spec("nonsense").is_err());
    }

    #[test]
    fn schema_version_is_stable() {
        assert_eq!(report_schema_version(), "1.0.0");
        assert_eq!(report_schema_version(), REPORT_SCHEMA_VERSION);
    }
}
