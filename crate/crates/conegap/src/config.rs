//! Experiment configuration, loaded from TOML and validated in full before any
//! computation starts.

use conegap_core::domain::{ParamError, Params, QPoint, RectId};
use conegap_core::stats::{Indicator, Observable, Wave};
use conegap_core::transfer::Grid;
use conegap_core::Potential;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("[params] {0}")]
    Params(#[from] ParamError),
    #[error("[{section}] {message}")]
    Invalid { section: &'static str, message: String },
}

fn invalid(section: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        section,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub rho: f64,
    pub beta: f64,
    pub beta1: f64,
    pub sigma: f64,
    pub eps: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        let p = Params::default();
        ParamsSection {
            rho: p.rho,
            beta: p.beta,
            beta1: p.beta1,
            sigma: p.sigma,
            eps: p.eps,
        }
    }
}

/// The potential family with its parameters, plus the Hölder exponent. A
/// section without `family` means the zero potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "toml::Table")]
pub struct PotentialSection {
    pub alpha: f64,
    #[serde(flatten)]
    pub phi: Potential,
}

impl TryFrom<toml::Table> for PotentialSection {
    type Error = String;

    fn try_from(mut t: toml::Table) -> Result<Self, Self::Error> {
        let alpha = match t.remove("alpha") {
            None => default_alpha(),
            Some(v) => v
                .as_float()
                .or_else(|| v.as_integer().map(|i| i as f64))
                .ok_or("alpha must be a number")?,
        };
        let phi = if t.contains_key("family") {
            Potential::deserialize(t).map_err(|e| e.to_string())?
        } else if t.is_empty() {
            Potential::zero()
        } else {
            return Err("missing `family` (constant, linear or bump)".into());
        };
        Ok(PotentialSection { alpha, phi })
    }
}

fn default_alpha() -> f64 {
    0.5
}

impl Default for PotentialSection {
    fn default() -> Self {
        PotentialSection {
            alpha: default_alpha(),
            phi: Potential::zero(),
        }
    }
}

/// `k = "auto"` calibrates on a pilot run, `k = "heuristic"` uses the
/// seminorm ratio of `L^3 1`, and a number is used as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSetting {
    Fixed(f64),
    Mode(KMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KMode {
    Auto,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeSection {
    pub k: KSetting,
    pub delta: f64,
    pub n_pairs: usize,
    pub nx: usize,
    pub ny: usize,
    pub max_pairs: usize,
}

impl Default for ConeSection {
    fn default() -> Self {
        ConeSection {
            k: KSetting::Mode(KMode::Auto),
            delta: 0.5,
            n_pairs: 100,
            nx: 32,
            ny: 32,
            max_pairs: conegap_core::cone::MAX_PAIRS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    /// Per-rectangle `[nx, ny]`, overriding `nx` and `ny`.
    pub resolution: Option<[[usize; 2]; 3]>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            nx: 64,
            ny: 64,
            resolution: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    /// Sizes `n` of the `n x n` grids in the refinement table.
    pub refinement: Vec<usize>,
    pub n_max: usize,
    pub fit_window: [usize; 2],
    pub mc_samples: usize,
    /// Monte-Carlo correlations are computed for `n <= mc_n_max`.
    pub mc_n_max: usize,
    pub sigma_tol: f64,
    pub clt_n: usize,
    pub clt_samples: usize,
    pub clt_bins: usize,
    pub entropy_n: usize,
    pub orbit_n: usize,
    pub orbit_start: QPoint,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: 0,
            tol: 1e-10,
            max_iter: 100_000,
            refinement: vec![8, 16, 32],
            n_max: 20,
            fit_window: [2, 20],
            mc_samples: 10_000,
            mc_n_max: 5,
            sigma_tol: 1e-14,
            clt_n: 2000,
            clt_samples: 100_000,
            clt_bins: 40,
            entropy_n: 32,
            orbit_n: 40,
            orbit_start: QPoint {
                rect: RectId::R1,
                x: 0.0,
                y: 0.3,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObservableSpec {
    Indicator {
        rect: RectId,
    },
    Constant {
        c: f64,
    },
    /// `offset[r] + amp cos(wx x + wy y_hat + phase)`.
    Wave {
        amp: f64,
        wx: f64,
        wy: f64,
        phase: f64,
        offset: [f64; 3],
    },
}

impl ObservableSpec {
    pub fn build(&self, params: &Params) -> Box<dyn Observable> {
        match *self {
            ObservableSpec::Indicator { rect } => Box::new(Indicator(rect)),
            ObservableSpec::Constant { c } => Box::new(move |_: &QPoint| c),
            ObservableSpec::Wave {
                amp,
                wx,
                wy,
                phase,
                offset,
            } => Box::new(Wave {
                amp,
                wx,
                wy,
                phase,
                offset,
                eps: params.eps,
            }),
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            ObservableSpec::Indicator { .. } => true,
            ObservableSpec::Constant { c } => c.is_finite(),
            ObservableSpec::Wave {
                amp,
                wx,
                wy,
                phase,
                offset,
            } => [amp, wx, wy, phase].iter().chain(&offset).all(|v| v.is_finite()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservablesSection {
    /// The later observable in `C_n`, and the CLT observable.
    pub phi: ObservableSpec,
    pub psi: ObservableSpec,
}

impl Default for ObservablesSection {
    fn default() -> Self {
        ObservablesSection {
            phi: ObservableSpec::Indicator { rect: RectId::R1 },
            psi: ObservableSpec::Indicator { rect: RectId::R2 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputSection {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub params: ParamsSection,
    pub potential: PotentialSection,
    pub cone: ConeSection,
    pub grid: GridSection,
    pub run: RunSection,
    pub observables: ObservablesSection,
    pub output: OutputSection,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> Params {
        let s = &self.params;
        Params {
            rho: s.rho,
            beta: s.beta,
            beta1: s.beta1,
            sigma: s.sigma,
            eps: s.eps,
            ..Params::default()
        }
    }

    pub fn grid(&self) -> Grid {
        let p = self.params();
        match self.grid.resolution {
            Some(r) => Grid::new(&p, [(r[0][0], r[0][1]), (r[1][0], r[1][1]), (r[2][0], r[2][1])]),
            None => Grid::uniform(&p, self.grid.nx, self.grid.ny),
        }
    }

    pub fn cone_grid(&self) -> Grid {
        Grid::uniform(&self.params(), self.cone.nx, self.cone.ny)
    }

    /// Checks every range constraint; messages name the violated inequality.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = self.params();
        p.validate()?;

        let alpha = self.potential.alpha;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(
                "potential",
                format!("alpha = {alpha}: requires 0 < alpha <= 1"),
            ));
        }
        match &self.potential.phi {
            Potential::Constant { c } if !c.is_finite() => {
                return Err(invalid("potential", "c must be finite"));
            }
            Potential::Linear { coeffs } if coeffs.iter().flatten().any(|v| !v.is_finite()) => {
                return Err(invalid("potential", "linear coefficients must be finite"));
            }
            Potential::Bump {
                amplitude,
                center,
                exponent,
                offset,
            } => {
                if !center.is_valid(&p) {
                    return Err(invalid(
                        "potential",
                        format!("bump center ({}, {}) is not in {}", center.x, center.y, center.rect),
                    ));
                }
                if !(*exponent > 0.0 && *exponent <= 1.0) {
                    return Err(invalid(
                        "potential",
                        format!("exponent = {exponent}: requires 0 < exponent <= 1"),
                    ));
                }
                if !amplitude.is_finite() || !offset.is_finite() {
                    return Err(invalid("potential", "amplitude and offset must be finite"));
                }
            }
            _ => {}
        }

        let cone = &self.cone;
        p.check_delta(cone.delta).map_err(|e| invalid("cone", e.to_string()))?;
        if let KSetting::Fixed(k) = cone.k {
            if !(k > 0.0 && k.is_finite()) {
                return Err(invalid("cone", format!("k = {k}: requires k > 0")));
            }
        }
        if cone.n_pairs < 10 {
            return Err(invalid(
                "cone",
                format!("n_pairs = {}: requires n_pairs >= 10", cone.n_pairs),
            ));
        }
        if cone.nx < 2 || cone.ny < 2 {
            return Err(invalid("cone", "requires nx >= 2 and ny >= 2"));
        }
        if cone.max_pairs == 0 {
            return Err(invalid("cone", "requires max_pairs >= 1"));
        }

        let sizes: Vec<usize> = match self.grid.resolution {
            Some(r) => r.iter().flatten().copied().collect(),
            None => vec![self.grid.nx, self.grid.ny],
        };
        if sizes.iter().any(|&s| s < 2) {
            return Err(invalid("grid", "requires at least 2 cells per axis"));
        }

        let run = &self.run;
        if !(run.tol > 0.0) {
            return Err(invalid("run", format!("tol = {}: requires tol > 0", run.tol)));
        }
        if !(run.sigma_tol > 0.0) {
            return Err(invalid(
                "run",
                format!("sigma_tol = {}: requires sigma_tol > 0", run.sigma_tol),
            ));
        }
        if run.max_iter == 0 {
            return Err(invalid("run", "requires max_iter >= 1"));
        }
        if run.refinement.iter().any(|&s| s < 2) {
            return Err(invalid("run", "refinement sizes require n >= 2"));
        }
        let [w0, w1] = run.fit_window;
        if w0 > w1 || w1 > run.n_max {
            return Err(invalid(
                "run",
                format!("fit_window = [{w0}, {w1}]: requires n0 <= n1 <= n_max = {}", run.n_max),
            ));
        }
        if run.mc_samples != 0 && run.mc_samples < 1000 {
            return Err(invalid(
                "run",
                format!("mc_samples = {}: requires 0 (disabled) or >= 1000", run.mc_samples),
            ));
        }
        if run.clt_n == 0 {
            return Err(invalid("run", "requires clt_n >= 1"));
        }
        if run.clt_samples < 100 {
            return Err(invalid(
                "run",
                format!("clt_samples = {}: requires >= 100", run.clt_samples),
            ));
        }
        if run.clt_bins == 0 {
            return Err(invalid("run", "requires clt_bins >= 1"));
        }
        if !(1..=64).contains(&run.entropy_n) {
            return Err(invalid(
                "run",
                format!("entropy_n = {}: requires 1 <= entropy_n <= 64", run.entropy_n),
            ));
        }
        if !run.orbit_start.is_valid(&p) {
            let q = run.orbit_start;
            return Err(invalid(
                "run",
                format!("orbit_start ({}, {}) is not in {}", q.x, q.y, q.rect),
            ));
        }

        for (name, o) in [("phi", &self.observables.phi), ("psi", &self.observables.psi)] {
            if !o.is_finite() {
                return Err(invalid("observables", format!("{name} has non-finite parameters")));
            }
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output", "formats must not be empty"));
        }
        Ok(())
    }
}
