//! Run configuration. A JSON file with the same field names supplies
//! defaults; flags override it.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use euler_spectrum::evolution::EvolutionSettings;
use euler_spectrum::{Circulation, Controls, LatticeVector, ProblemInstance};

use crate::error::CliError;

/// `x,y` on the command line, `[x, y]` in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pair<T>(pub [T; 2]);

impl<T: FromStr> FromStr for Pair<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected two comma-separated numbers, got {s:?}"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<T>()
                .map_err(|_| format!("not a number: {t:?}"))
        };
        Ok(Pair([parse(a)?, parse(b)?]))
    }
}

impl<T: fmt::Display> fmt::Display for Pair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0[0], self.0[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Wavevector of the steady state, e.g. `0,2`
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<Pair<i64>>,
    /// Complex amplitude as `re,im` [default: 1,0]
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<Pair<f64>>,
    /// First truncation half-width [default: 64]
    #[arg(long)]
    pub n0: Option<usize>,
    /// Largest truncation half-width [default: 1024]
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Convergence tolerance between successive truncations [default: 1e-8]
    #[arg(long)]
    pub eig_tol: Option<f64>,
    /// Relative |Re λ| threshold for nonimaginary eigenvalues [default: 1e-6]
    #[arg(long)]
    pub classify_tol: Option<f64>,
    /// Half-width of the Fourier box [default: 16]
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<i64>,
    /// Final time of each evolution run [default: 40]
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Time step [default: largest stable step, at most t_final/100]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of random initial states [default: 3]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Seed for the initial states [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Real part of the resolvent sample line [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Imaginary parts sampled along the line [default: 0, 0.5, ..., 40]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub taus: Option<Vec<f64>>,
    /// Output format [default: json]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Indent JSON output
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub pretty: Option<bool>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            p: over.p.or(self.p),
            gamma: over.gamma.or(self.gamma),
            n0: over.n0.or(self.n0),
            n_max: over.n_max.or(self.n_max),
            eig_tol: over.eig_tol.or(self.eig_tol),
            classify_tol: over.classify_tol.or(self.classify_tol),
            k: over.k.or(self.k),
            t_final: over.t_final.or(self.t_final),
            dt: over.dt.or(self.dt),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            a: over.a.or(self.a),
            taus: over.taus.or(self.taus),
            format: over.format.or(self.format),
            output: over.output.or(self.output),
            pretty: over.pretty.or(self.pretty),
        }
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let usage = |m: &str| Err(CliError::Usage(m.to_string()));
        let Some(Pair([px, py])) = self.p else {
            return usage("p is required (--p x,y)");
        };
        if px == 0 && py == 0 {
            return usage("p must be nonzero");
        }
        let [ga, gb] = self.gamma.map_or([1.0, 0.0], |g| g.0);
        if !ga.is_finite() || !gb.is_finite() {
            return usage("gamma must be finite");
        }

        let base = Controls::default();
        let controls = Controls {
            n0: self.n0.unwrap_or(base.n0),
            n_max: self.n_max.unwrap_or(base.n_max),
            eig_tol: self.eig_tol.unwrap_or(base.eig_tol),
            classify_tol: self.classify_tol.unwrap_or(base.classify_tol),
        };
        if controls.n0 < 8 {
            return usage("n0 must be at least 8");
        }
        if controls.n_max < controls.n0 {
            return usage("n-max must be at least n0");
        }
        if !positive(controls.eig_tol) || !positive(controls.classify_tol) {
            return usage("tolerances must be positive");
        }

        let k = self.k.unwrap_or(16);
        if k < 1 {
            return usage("K must be at least 1");
        }

        let defaults = EvolutionSettings::default();
        let settings = EvolutionSettings {
            t_final: self.t_final.unwrap_or(defaults.t_final),
            dt: self.dt,
            trials: self.trials.unwrap_or(defaults.trials),
            seed: self.seed.unwrap_or(defaults.seed),
            fit_window: defaults.fit_window,
        };
        if !positive(settings.t_final) {
            return usage("t-final must be positive");
        }
        if let Some(dt) = settings.dt {
            if !positive(dt) {
                return usage("dt must be positive");
            }
        }
        if settings.trials == 0 {
            return usage("trials must be at least 1");
        }

        let a = self.a.unwrap_or(0.5);
        if a == 0.0 || !a.is_finite() {
            return usage("a must be nonzero");
        }
        let taus = self
            .taus
            .clone()
            .unwrap_or_else(|| (0..=80).map(|i| i as f64 * 0.5).collect());
        if taus.is_empty() || taus.iter().any(|t| !t.is_finite()) {
            return usage("taus must be a nonempty list of finite numbers");
        }

        let instance = ProblemInstance::with_controls(
            LatticeVector::new(px, py),
            Circulation::new(ga, gb),
            controls,
        )?;
        Ok(Resolved {
            instance,
            k,
            settings,
            a,
            taus,
            output: Output {
                format: self.format.unwrap_or_default(),
                path: self.output.clone(),
                pretty: self.pretty.unwrap_or(false),
            },
        })
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub pretty: bool,
}

/// A validated [`RunConfig`] with defaults filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub instance: ProblemInstance,
    pub k: i64,
    pub settings: EvolutionSettings,
    pub a: f64,
    pub taus: Vec<f64>,
    pub output: Output,
}
