//! Command-line front end: bounded batch experiments with deterministic
//! CSV / JSON-lines reports.
//!
//! Exit status: 0 when every verdict in the run passed, 1 on any verdict
//! failure, 2 on usage or configuration errors.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use lacunary_core::experiment::{self, ExperimentConfig, OutputFormat};
use lacunary_core::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    JsonLines,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::JsonLines => OutputFormat::JsonLines,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lacunary", version, about = "Limit-theorem experiments for lacunary series")]
struct Cli {
    /// Report file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<String>,

    /// Report encoding.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Seed for sampled paths (exact paths ignore it; embedded in reports).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Enumeration budget in configurations.
    #[arg(long, global = true, default_value_t = lacunary_core::diophantine::DEFAULT_BUDGET)]
    budget: u128,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Partial-sum values on a grid, or exact law atoms for Walsh sums.
    Simulate {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        seq: String,
        #[arg(long, default_value = "unit")]
        coeff: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1024)]
        points: usize,
    },
    /// Moment generating function residuals against the limiting function.
    Mgf {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "pow:2")]
        seq: String,
        #[arg(long, default_value = "flat:0.25")]
        coeff: String,
        #[arg(long)]
        n: usize,
        /// Evaluation grid lo:hi:step (real z, or lambda for --kind trig).
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Exhaustive signed/xor solution counts against the closed-form bounds.
    CountSolutions {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value = "signed")]
        mode: String,
    },
    /// Local-limit window statistics over an n grid.
    Llt {
        #[arg(long, default_value = "walsh")]
        kind: String,
        /// Frequency sequence (used by --kind trig; the walsh/bernoulli
        /// families are pinned to their exact laws).
        #[arg(long, default_value = "pow:2")]
        seq: String,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        window_lo: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        window_hi: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y: f64,
        /// Strata for the sampled trig law (power of two).
        #[arg(long, default_value_t = 1 << 22)]
        strata: u64,
    },
    /// Kolmogorov distances from the normal and the fitted decay slope.
    Kolmogorov {
        #[arg(long, default_value = "walsh")]
        kind: String,
        /// Frequency sequence (used by --kind trig).
        #[arg(long, default_value = "pow:2")]
        seq: String,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        /// Fail (exit 1) when the fitted slope exceeds this bound.
        #[arg(long, allow_negative_numbers = true)]
        slope_bound: Option<f64>,
        /// Strata for the sampled trig law (power of two).
        #[arg(long, default_value_t = 1 << 22)]
        strata: u64,
    },
    /// Extended-CLT tail ratios.
    Tails {
        #[arg(long, default_value = "walsh")]
        kind: String,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        y: f64,
    },
    /// Moderate-deviation observed/predicted tail masses.
    Mdp {
        #[arg(long, default_value = "walsh")]
        kind: String,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
        y: f64,
    },
    /// Both sides of the dyadic remainder inequality.
    MartingaleCheck {
        #[arg(long, default_value = "cos")]
        f: String,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        depth: u32,
    },
    /// Zone-of-control constants and admissibility conditions.
    ZoneCheck {
        #[arg(long, default_value = "walsh")]
        kind: String,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 4.0)]
        v: f64,
        #[arg(long, default_value_t = 4.0)]
        w: f64,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
    },
}

fn dispatch(cli: &Cli) -> lacunary_core::Result<bool> {
    let mk = |name: &str, params: serde_json::Value| {
        let mut c = ExperimentConfig::new(name, params);
        c.seed = cli.seed;
        c.threads = cli.threads;
        c.budget = cli.budget;
        c.format = cli.format.into();
        c.out = cli.out.clone();
        c
    };
    match &cli.cmd {
        Cmd::Simulate { kind, seq, coeff, n, points } => {
            let cfg = mk(
                "simulate",
                json!({"kind": kind, "seq": seq, "coeff": coeff, "n": n, "points": points}),
            );
            experiment::run_simulate(&cfg, kind, seq, coeff, *n, *points)
        }
        Cmd::Mgf { kind, seq, coeff, n, grid, tol } => {
            let cfg = mk(
                "mgf",
                json!({"kind": kind, "seq": seq, "coeff": coeff, "n": n, "grid": grid, "tol": tol}),
            );
            experiment::run_mgf(&cfg, kind, seq, coeff, *n, grid, *tol)
        }
        Cmd::CountSolutions { seq, n, l, r, mode } => {
            let cfg = mk(
                "count-solutions",
                json!({"seq": seq, "n": n, "l": l, "r": r, "mode": mode}),
            );
            experiment::run_count_solutions(&cfg, seq, *n, *l, *r, mode)
        }
        Cmd::Llt { kind, seq, alpha, n_grid, window_lo, window_hi, delta, y, strata } => {
            let cfg = mk(
                "llt",
                json!({"kind": kind, "seq": seq, "alpha": alpha, "n_grid": n_grid,
                       "window": [window_lo, window_hi], "delta": delta, "y": y,
                       "strata": strata}),
            );
            experiment::run_llt(
                &cfg,
                kind,
                seq,
                *alpha,
                n_grid,
                (*window_lo, *window_hi),
                *delta,
                *y,
                *strata,
            )
        }
        Cmd::Kolmogorov { kind, seq, alpha, n_grid, slope_bound, strata } => {
            let cfg = mk(
                "kolmogorov",
                json!({"kind": kind, "seq": seq, "alpha": alpha, "n_grid": n_grid,
                       "slope_bound": slope_bound, "strata": strata}),
            );
            experiment::run_kolmogorov(&cfg, kind, seq, *alpha, n_grid, *slope_bound, *strata)
        }
        Cmd::Tails { kind, alpha, n_grid, y } => {
            let cfg =
                mk("tails", json!({"kind": kind, "alpha": alpha, "n_grid": n_grid, "y": y}));
            experiment::run_tails(&cfg, kind, *alpha, n_grid, *y)
        }
        Cmd::Mdp { kind, alpha, n_grid, y } => {
            let cfg = mk("mdp", json!({"kind": kind, "alpha": alpha, "n_grid": n_grid, "y": y}));
            experiment::run_mdp(&cfg, kind, *alpha, n_grid, *y)
        }
        Cmd::MartingaleCheck { f, r, n, depth } => {
            let cfg =
                mk("martingale-check", json!({"f": f, "r": r, "n": n, "depth": depth}));
            experiment::run_martingale_check(&cfg, f, *r, *n, *depth)
        }
        Cmd::ZoneCheck { kind, alpha, n_grid, v, w, gamma, d } => {
            let cfg = mk(
                "zone-check",
                json!({"kind": kind, "alpha": alpha, "n_grid": n_grid,
                       "v": v, "w": w, "gamma": gamma, "d": d}),
            );
            experiment::run_zone_check(&cfg, kind, *alpha, n_grid, *v, *w, *gamma, *d)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/version output
            let _ = e.print();
            let code = if e.use_stderr() { 2 } else { 0 };
            std::process::exit(code);
        }
    };
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .expect("rayon pool already initialized");
    }
    match dispatch(&cli) {
        Ok(true) => std::process::exit(0),
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Budget { .. } => 1,
                _ => 2,
            };
            std::process::exit(code);
        }
    }
}
