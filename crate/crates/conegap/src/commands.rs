//! The six experiment commands. Each one reads a validated [`Config`], runs
//! the corresponding computation and writes its files through a [`Writer`].

use crate::config::{Config, ConfigError, Format, KMode, KSetting};
use crate::manifest::{config_hash, output_entries, CommandEntry, RunManifest};
use crate::output::{num, opt_num, CsvTable, Writer};
use conegap_core::cone::{
    auto_k, calibrate_k, empirical_contraction, ConeCheckReport, ConeError, ConeParams, ContractionOptions,
    KCalibration, PairSet,
};
use conegap_core::domain::OMEGA;
use conegap_core::dynamics::{admissible_word_count, itinerary, DynError};
use conegap_core::rng::derive_seed;
use conegap_core::stats::{
    clt_sample, correlation_mc, correlation_series, fit_decay_window, sigma_squared, BackwardChain, CltOptions,
    CltReport, DecayFit, McEstimate, SigmaSquared, StatsError,
};
use conegap_core::transfer::{
    power_iterate, refinement_study, Grid, Measure, PowerOptions, SpectralData, TransferError, TransferOperator,
};
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Spectrum,
    Cone,
    Correlations,
    Clt,
    Entropy,
    Orbit,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Spectrum,
        Command::Cone,
        Command::Correlations,
        Command::Clt,
        Command::Entropy,
        Command::Orbit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Cone => "cone",
            Command::Correlations => "correlations",
            Command::Clt => "clt",
            Command::Entropy => "entropy",
            Command::Orbit => "orbit",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("{0}")]
    Runtime(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit status: 2 invalid config, 3 no convergence, 4 other
    /// runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::NoConvergence(_) => 3,
            RunError::Runtime(_) | RunError::Io(_) => 4,
        }
    }
}

impl From<TransferError> for RunError {
    fn from(e: TransferError) -> Self {
        match e {
            TransferError::NoConvergence { .. } => RunError::NoConvergence(e.to_string()),
            _ => RunError::Runtime(e.to_string()),
        }
    }
}

impl From<StatsError> for RunError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::NonSummable { .. } => RunError::NoConvergence(e.to_string()),
            _ => RunError::Runtime(e.to_string()),
        }
    }
}

impl From<ConeError> for RunError {
    fn from(e: ConeError) -> Self {
        RunError::Runtime(e.to_string())
    }
}

impl From<DynError> for RunError {
    fn from(e: DynError) -> Self {
        RunError::Runtime(e.to_string())
    }
}

/// Runs `cmd` with `cfg` and records the outputs in the manifest. Returns the
/// files written, manifest excluded.
pub fn run(cmd: Command, cfg: &Config) -> Result<Vec<PathBuf>, RunError> {
    let start = Instant::now();
    let hash = config_hash(cfg);
    let mut w = Writer::new(&cfg.output.dir, &hash)?;
    match cmd {
        Command::Spectrum => spectrum(cfg, &mut w)?,
        Command::Cone => cone(cfg, &mut w)?,
        Command::Correlations => correlations(cfg, &mut w)?,
        Command::Clt => clt(cfg, &mut w)?,
        Command::Entropy => entropy(cfg, &mut w)?,
        Command::Orbit => orbit(cfg, &mut w)?,
    }
    let files = w.written().to_vec();
    let mut manifest = RunManifest::load_or_default(w.dir());
    manifest.record(
        cmd.name(),
        CommandEntry {
            config_hash: hash,
            seed: cfg.run.seed,
            threads: rayon::current_num_threads(),
            wall_clock_ms: start.elapsed().as_millis(),
            outputs: output_entries(&files)?,
        },
    );
    manifest.save(w.dir())?;
    Ok(files)
}

struct Spectral {
    grid: Grid,
    op: TransferOperator,
    sd: SpectralData,
}

fn spectral(cfg: &Config) -> Result<Spectral, RunError> {
    let grid = cfg.grid();
    let op = TransferOperator::new(&grid, &cfg.potential.phi);
    let sd = power_iterate(
        &op,
        &PowerOptions {
            tol: cfg.run.tol,
            max_iter: cfg.run.max_iter,
        },
    )?;
    Ok(Spectral { grid, op, sd })
}

fn csv_wanted(cfg: &Config) -> bool {
    cfg.output.wants(Format::Csv)
}

fn json_wanted(cfg: &Config) -> bool {
    cfg.output.wants(Format::Json)
}

fn cell_table(hash: &str, grid: &Grid, value: &'static str, values: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(hash, &["index", "rect", "x", "y", value]);
    let params = *grid.params();
    for (i, v) in values.iter().enumerate() {
        let c = grid.center(i);
        t.row(vec![
            i.to_string(),
            c.rect.to_string(),
            num(c.x),
            num(c.chart_y(&params)),
            num(*v),
        ]);
    }
    t.comment("y", "chart coordinate, y - (1 + eps) on R3");
    t
}

#[derive(Serialize)]
struct LambdaReport {
    lambda: f64,
    bracket: [f64; 2],
    residual_h: f64,
    residual_nu: f64,
    iterations: usize,
    iterations_nu: usize,
    cells: usize,
    h_rect_means: [f64; 3],
    nu_rect_masses: [f64; 3],
    mu_star_rect_masses: [f64; 3],
}

fn spectrum(cfg: &Config, w: &mut Writer) -> Result<(), RunError> {
    let Spectral { grid, sd, .. } = spectral(cfg)?;
    let rows = refinement_study(
        &cfg.params(),
        &cfg.potential.phi,
        &cfg.run.refinement,
        cfg.run.tol,
        cfg.run.max_iter,
    )?;
    if json_wanted(cfg) {
        w.json(
            "lambda.json",
            &LambdaReport {
                lambda: sd.lambda,
                bracket: sd.bracket,
                residual_h: sd.residual_h,
                residual_nu: sd.residual_nu,
                iterations: sd.iterations,
                iterations_nu: sd.iterations_nu,
                cells: grid.len(),
                h_rect_means: grid.rect_means(&sd.h),
                nu_rect_masses: grid.rect_masses(&sd.nu),
                mu_star_rect_masses: grid.rect_masses(&sd.mu_star),
            },
        )?;
    }
    if csv_wanted(cfg) {
        let hash = w.hash().to_string();
        w.csv("h.csv", &cell_table(&hash, &grid, "h", &sd.h.0))?;
        let Measure(nu) = &sd.nu;
        w.csv("nu.csv", &cell_table(&hash, &grid, "mass", nu))?;
        let Measure(mu) = &sd.mu_star;
        w.csv("mu_star.csv", &cell_table(&hash, &grid, "mass", mu))?;
        let mut t = CsvTable::new(&hash, &["nx", "ny", "cells", "lambda_cell", "lambda_interpolated"]);
        for r in &rows {
            t.row(vec![
                r.nx.to_string(),
                r.ny.to_string(),
                r.cells.to_string(),
                num(r.lambda_cell),
                num(r.lambda_interpolated),
            ]);
        }
        w.csv("refinement.csv", &t)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ConeOutput {
    k_mode: &'static str,
    calibration: Option<KCalibration>,
    report: ConeCheckReport,
}

fn cone(cfg: &Config, w: &mut Writer) -> Result<(), RunError> {
    let params = cfg.params();
    let grid = cfg.cone_grid();
    let op = TransferOperator::new(&grid, &cfg.potential.phi);
    let cp = ConeParams::new(&params, 1.0, cfg.cone.delta, cfg.potential.alpha)?;
    let pairs = PairSet::new(&grid, cp.delta, cp.alpha, cfg.cone.max_pairs);
    let seed = derive_seed(cfg.run.seed, "cone");
    let (k_mode, k, calibration) = match cfg.cone.k {
        KSetting::Fixed(k) => ("fixed", k, None),
        KSetting::Mode(KMode::Heuristic) => ("heuristic", auto_k(&op, &pairs), None),
        KSetting::Mode(KMode::Auto) => {
            let cal = calibrate_k(&op, &cp, &pairs, seed)?;
            ("auto", cal.k, Some(cal))
        }
    };
    let report = empirical_contraction(
        &op,
        &cp.with_k(k),
        &pairs,
        &ContractionOptions {
            n_pairs: cfg.cone.n_pairs,
            seed,
        },
    )?;
    w.json(
        "cone.json",
        &ConeOutput {
            k_mode,
            calibration,
            report,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct FitOutput {
    fit: Option<DecayFit>,
    /// Why no fit was produced.
    reason: Option<String>,
    target_tau: f64,
}

fn correlations(cfg: &Config, w: &mut Writer) -> Result<(), RunError> {
    let params = cfg.params();
    let Spectral { grid, op, sd } = spectral(cfg)?;
    let phi = cfg.observables.phi.build(&params);
    let psi = cfg.observables.psi.build(&params);
    let series = correlation_series(&op, &sd, &phi.on_grid(&grid), &psi.on_grid(&grid), cfg.run.n_max);
    let [w0, w1] = cfg.run.fit_window;
    let (fit, reason) = match fit_decay_window(&series, (w0, w1)) {
        Ok(f) => (Some(f), None),
        Err(e @ StatsError::InsufficientData { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mc: Vec<Option<McEstimate>> = if cfg.run.mc_samples > 0 {
        let chain = BackwardChain::new(&op, &sd);
        series
            .n
            .iter()
            .map(|&n| {
                if n > cfg.run.mc_n_max {
                    return Ok(None);
                }
                let seed = derive_seed(cfg.run.seed, &format!("correlations-{n}"));
                correlation_mc(&chain, &*phi, &*psi, n, cfg.run.mc_samples, seed).map(Some)
            })
            .collect::<Result<_, _>>()?
    } else {
        vec![None; series.n.len()]
    };
    if csv_wanted(cfg) {
        let mut t = CsvTable::new(w.hash(), &["n", "c_operator", "c_mc", "stderr_mc", "escaped_mc"]);
        for (i, &n) in series.n.iter().enumerate() {
            let m = mc[i];
            t.row(vec![
                n.to_string(),
                num(series.c[i]),
                opt_num(m.map(|m| m.estimate)),
                opt_num(m.map(|m| m.stderr)),
                m.map(|m| m.escaped.to_string()).unwrap_or_default(),
            ]);
        }
        w.csv("correlations.csv", &t)?;
    }
    if json_wanted(cfg) {
        let target_tau = (5f64.sqrt() - 1.0) / (5f64.sqrt() + 1.0);
        w.json(
            "decay_fit.json",
            &FitOutput {
                fit,
                reason,
                target_tau,
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CltOutput {
    sigma_squared: SigmaSquaredSummary,
    report: CltReport,
}

#[derive(Serialize)]
struct SigmaSquaredSummary {
    sigma2: f64,
    truncation: usize,
    tail_bound: f64,
    coboundary: bool,
    mean: f64,
}

impl From<&SigmaSquared> for SigmaSquaredSummary {
    fn from(s: &SigmaSquared) -> Self {
        SigmaSquaredSummary {
            sigma2: s.sigma2,
            truncation: s.truncation,
            tail_bound: s.tail_bound,
            coboundary: s.coboundary,
            mean: s.mean,
        }
    }
}

fn clt(cfg: &Config, w: &mut Writer) -> Result<(), RunError> {
    let params = cfg.params();
    let Spectral { grid, op, sd } = spectral(cfg)?;
    let phi = cfg.observables.phi.build(&params);
    let sig = sigma_squared(&op, &sd, &phi.on_grid(&grid), cfg.run.sigma_tol)?;
    let chain = BackwardChain::new(&op, &sd);
    let mut report = clt_sample(
        &chain,
        &*phi,
        &sig,
        &CltOptions {
            n: cfg.run.clt_n,
            samples: cfg.run.clt_samples,
            seed: derive_seed(cfg.run.seed, "clt"),
            bins: cfg.run.clt_bins,
        },
    )?;
    let hist = report.histogram.take();
    if json_wanted(cfg) {
        w.json(
            "clt.json",
            &CltOutput {
                sigma_squared: (&sig).into(),
                report,
            },
        )?;
    }
    if csv_wanted(cfg) {
        let mut t = CsvTable::new(w.hash(), &["lo", "hi", "count", "expected"]);
        if let Some(h) = hist {
            for (i, c) in h.counts.iter().enumerate() {
                t.row(vec![
                    num(h.edges[i]),
                    num(h.edges[i + 1]),
                    c.to_string(),
                    num(h.expected[i]),
                ]);
            }
        }
        w.csv("clt_hist.csv", &t)?;
    }
    Ok(())
}

fn entropy(cfg: &Config, w: &mut Writer) -> Result<(), RunError> {
    let target = OMEGA.ln();
    let mut t = CsvTable::new(w.hash(), &["n", "words", "estimate", "target"]);
    for n in 1..=cfg.run.entropy_n {
        let words = admissible_word_count(n)?;
        t.row(vec![
            n.to_string(),
            words.to_string(),
            num((words as f64).ln() / n as f64),
            num(target),
        ]);
    }
    w.csv("entropy.csv", &t)?;
    Ok(())
}

fn orbit(cfg: &Config, w: &mut Writer) -> Result<(), RunError> {
    let params = cfg.params();
    let it = itinerary(&params, &cfg.run.orbit_start, cfg.run.orbit_n);
    let mut t = CsvTable::new(w.hash(), &["j", "rect", "symbol", "x", "y", "y_chart"]);
    t.comment("truncated", it.truncated);
    for (j, q) in it.orbit.iter().enumerate() {
        t.row(vec![
            j.to_string(),
            q.rect.to_string(),
            q.rect.symbol().to_string(),
            num(q.x),
            num(q.y),
            num(q.chart_y(&params)),
        ]);
    }
    w.csv("orbit.csv", &t)?;
    Ok(())
}
