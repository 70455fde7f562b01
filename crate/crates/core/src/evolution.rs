//! Fixed-step RK4 integration of `dω/dt = L ω` on a box of modes, growth
//! rate fits, and the growth-rate versus spectral-abscissa comparison.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::coefficients::ProblemInstance;
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::linalg::eig_dense;
use crate::operators::{build_l2d, BoxIndex, BoxOperator2D};
use crate::spectra::nonimaginary_spectrum_with;

/// Largest allowed `dt · ‖L‖`.
pub const STABILITY_GUARD: f64 = 0.5;

/// Vorticity Fourier amplitudes on the modes `0 < ‖k‖_∞ ≤ K`, in
/// [`BoxIndex`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub half_width: i64,
    pub values: Vec<Complex64>,
}

impl StateVector {
    pub fn new(half_width: i64, values: Vec<Complex64>) -> Result<Self> {
        let expected = BoxIndex::new(half_width).len();
        if values.len() != expected {
            return Err(Error::BoxMismatch {
                got: values.len(),
                expected,
            });
        }
        Ok(Self { half_width, values })
    }

    pub fn zeros(half_width: i64) -> Self {
        let n = BoxIndex::new(half_width).len();
        Self {
            half_width,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Unit-variance complex Gaussian per mode, then `ω_{−k} = conj(ω_k)`.
    pub fn random_real<R: Rng + ?Sized>(half_width: i64, rng: &mut R) -> Self {
        let index = BoxIndex::new(half_width);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut values: Vec<Complex64> = (0..index.len())
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            })
            .collect();
        for (i, &k) in index.modes().iter().enumerate() {
            if k > -k {
                let j = index.index_of(-k).expect("box is symmetric");
                values[j] = values[i].conj();
            }
        }
        Self { half_width, values }
    }

    /// `max_k |ω_{−k} − conj(ω_k)|`.
    pub fn conjugate_defect(&self) -> f64 {
        let index = BoxIndex::new(self.half_width);
        index
            .modes()
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                (self.values[index.index_of(-k).unwrap()] - self.values[i].conj()).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Largest conjugate-symmetry defect relative to `‖ω(t)‖` over the run.
    pub max_conjugate_defect: f64,
    pub final_state: StateVector,
}

impl Trajectory {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "norm"]).map_err(csv_err)?;
        for (t, n) in self.times.iter().zip(&self.norms) {
            out.write_record([format!("{t:e}"), format!("{n:e}")])
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Largest step accepted for an operator.
pub fn max_stable_dt(op: &BoxOperator2D) -> f64 {
    let bound = op.norm_bound();
    if bound == 0.0 {
        f64::INFINITY
    } else {
        STABILITY_GUARD / bound
    }
}

pub fn evolve(
    inst: &ProblemInstance,
    k: i64,
    omega0: &StateVector,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    let op = build_l2d(inst, k)?;
    evolve_operator(&op, omega0, t_final, dt)
}

/// Classical RK4 with `ceil(t_final/dt)` equal steps, recording `‖ω‖`
/// after every step.
pub fn evolve_operator(
    op: &BoxOperator2D,
    omega0: &StateVector,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    if omega0.values.len() != op.dim() {
        return Err(Error::BoxMismatch {
            got: omega0.values.len(),
            expected: op.dim(),
        });
    }
    if !(dt > 0.0 && dt.is_finite()) || !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidArgument(
            "dt must be positive and t_final nonnegative".into(),
        ));
    }
    let max_dt = max_stable_dt(op);
    if dt > max_dt {
        return Err(Error::StepTooLarge { dt, max_dt });
    }
    let norm0 = omega0.norm();
    if norm0 == 0.0 {
        return Err(Error::ZeroState);
    }
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let track_symmetry = omega0.conjugate_defect() <= 1e-15 * norm0;
    let index = &op.index;
    let mirror: Vec<usize> = index
        .modes()
        .iter()
        .map(|&k| index.index_of(-k).unwrap())
        .collect();

    let n = op.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut w = omega0.values.clone();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
    );
    let mut times = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    times.push(0.0);
    norms.push(norm0);
    let mut max_defect: f64 = 0.0;
    for step in 1..=steps {
        op.apply(&w, &mut k1);
        axpy(&w, 0.5 * h, &k1, &mut tmp);
        op.apply(&tmp, &mut k2);
        axpy(&w, 0.5 * h, &k2, &mut tmp);
        op.apply(&tmp, &mut k3);
        axpy(&w, h, &k3, &mut tmp);
        op.apply(&tmp, &mut k4);
        for i in 0..n {
            w[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if track_symmetry && norm > 0.0 {
            let d = (0..n)
                .map(|i| (w[mirror[i]] - w[i].conj()).norm())
                .fold(0.0, f64::max);
            max_defect = max_defect.max(d / norm);
        }
        times.push(if step == steps {
            t_final
        } else {
            step as f64 * h
        });
        norms.push(norm);
    }
    Ok(Trajectory {
        times,
        norms,
        max_conjugate_defect: if track_symmetry { max_defect } else { f64::NAN },
        final_state: StateVector {
            half_width: omega0.half_width,
            values: w,
        },
    })
}

fn axpy(x: &[Complex64], a: f64, y: &[Complex64], out: &mut [Complex64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

/// Minimum number of samples in a growth fit.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Least-squares slope of `log ‖ω(t)‖` over the final `fit_window`
/// fraction of the time span.
pub fn growth_rate(traj: &Trajectory, fit_window: f64) -> Result<f64> {
    if !(fit_window > 0.0 && fit_window <= 1.0) {
        return Err(Error::InvalidArgument(
            "fit window must lie in (0, 1]".into(),
        ));
    }
    let (Some(&t0), Some(&t1)) = (traj.times.first(), traj.times.last()) else {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    };
    let start = t1 - fit_window * (t1 - t0);
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.norms)
        .filter(|(&t, _)| t >= start)
        .map(|(&t, &n)| (t, n))
        .collect();
    if pts.iter().any(|&(_, n)| n <= 0.0) {
        return Err(Error::ZeroState);
    }
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "fit window holds {} samples, need {MIN_FIT_SAMPLES}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let base = pts[0].1;
    let lm = pts.iter().map(|p| (p.1 / base).ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, n) in &pts {
        sxy += (t - tm) * ((n / base).ln() - lm);
        sxx += (t - tm) * (t - tm);
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSettings {
    pub t_final: f64,
    /// Step size; `None` picks the largest stable step.
    pub dt: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub fit_window: f64,
}

impl Default for EvolutionSettings {
    fn default() -> Self {
        Self {
            t_final: 40.0,
            dt: None,
            trials: 3,
            seed: 7,
            fit_window: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub growth_rate: f64,
    pub final_norm: f64,
    pub max_conjugate_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingReport {
    pub instance: ProblemInstance,
    pub box_half_width: i64,
    pub t_final: f64,
    pub dt: f64,
    /// `max Re λ` over the converged nonimaginary eigenvalues, if any.
    pub spectral_abscissa: Option<f64>,
    /// `max Re λ` of the box operator itself.
    pub box_abscissa: f64,
    pub spectrum_converged: bool,
    pub target: f64,
    pub tolerance: f64,
    pub trials: Vec<TrialOutcome>,
    pub ok: bool,
}

impl MappingReport {
    pub fn rates(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.growth_rate).collect()
    }
}

/// Threshold for "sub-exponential" growth.
pub const FLAT_RATE: f64 = 0.01;

/// Initial state of one trial: seeded by `seed`, one ChaCha stream per trial.
pub fn trial_initial_state(k: i64, seed: u64, trial: usize) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    StateVector::random_real(k, &mut rng)
}

/// `settings.dt`, or the largest stable step capped at `t_final / 100`.
pub fn resolve_dt(op: &BoxOperator2D, settings: &EvolutionSettings) -> f64 {
    match settings.dt {
        Some(dt) => dt,
        None => max_stable_dt(op).min(settings.t_final.max(f64::MIN_POSITIVE) / 100.0),
    }
}

/// Evolves seeded random real initial states and compares their fitted
/// growth rates with the spectral abscissa.
pub fn spectral_mapping_check(
    inst: &ProblemInstance,
    k: i64,
    settings: &EvolutionSettings,
    mode: ExecMode,
) -> Result<MappingReport> {
    let spectrum = nonimaginary_spectrum_with(inst, mode)?;
    let abscissa = spectrum.spectral_abscissa();
    let op = build_l2d(inst, k)?;
    let dt = resolve_dt(&op, settings);

    let blocks = op.coupled_blocks();
    let block_abscissae = mode.map(&blocks, |b| {
        eig_dense(&op.dense_block(b))
            .map(|e| e.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
    });
    let mut box_abscissa = f64::NEG_INFINITY;
    for a in block_abscissae {
        box_abscissa = box_abscissa.max(a?);
    }

    let trial_ids: Vec<usize> = (0..settings.trials).collect();
    let trials = mode
        .map(&trial_ids, |&trial| {
            let omega0 = trial_initial_state(k, settings.seed, trial);
            let traj = evolve_operator(&op, &omega0, settings.t_final, dt)?;
            Ok(TrialOutcome {
                trial,
                growth_rate: growth_rate(&traj, settings.fit_window)?,
                final_norm: *traj.norms.last().unwrap(),
                max_conjugate_defect: traj.max_conjugate_defect,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let (target, tolerance) = match abscissa {
        Some(a) => (a.max(0.0), (0.05 * a.abs()).max(FLAT_RATE)),
        None => (0.0, FLAT_RATE),
    };
    let ok = trials.iter().all(|t| match abscissa {
        Some(_) => (t.growth_rate - target).abs() <= tolerance,
        None => t.growth_rate <= FLAT_RATE,
    });
    Ok(MappingReport {
        instance: inst.clone(),
        box_half_width: k,
        t_final: settings.t_final,
        dt,
        spectral_abscissa: abscissa,
        box_abscissa,
        spectrum_converged: spectrum.converged,
        target,
        tolerance,
        trials,
        ok,
    })
}
