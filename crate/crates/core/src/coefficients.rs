//! Scalar kernels: the interaction coefficient `A(p, q)`, the per-slice
//! coefficients `β`, `α`, `γₙ`, `δₙ`, and the physical steady state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{det2, LatticeVector, SliceDescriptor};

/// Complex vorticity amplitude `Γ = a + i b` of the steady state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Circulation(pub Complex64);

impl Circulation {
    pub fn new(a: f64, b: f64) -> Self {
        Self(Complex64::new(a, b))
    }

    pub fn a(self) -> f64 {
        self.0.re
    }

    pub fn b(self) -> f64 {
        self.0.im
    }

    pub fn abs(self) -> f64 {
        self.0.norm()
    }
}

impl From<Complex64> for Circulation {
    fn from(z: Complex64) -> Self {
        Self(z)
    }
}

/// Numerical controls shared by the spectral routines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Controls {
    /// First half-width of the symmetric window `[-N, N]`.
    pub n0: usize,
    /// Largest half-width tried before giving up on convergence.
    pub n_max: usize,
    /// Allowed movement of a nonimaginary eigenvalue between `N` and `2N`.
    pub eig_tol: f64,
    /// Relative threshold on `|Re λ|` for calling an eigenvalue nonimaginary.
    pub classify_tol: f64,
}

impl Default for Controls {
    fn default() -> Self {
        Self {
            n0: 64,
            n_max: 1024,
            eig_tol: 1e-8,
            classify_tol: 1e-6,
        }
    }
}

impl Controls {
    /// `|Re λ|` above which an eigenvalue on a slice with coefficient `β`
    /// counts as nonimaginary.
    pub fn classification_threshold(&self, beta_abs: f64) -> f64 {
        self.classify_tol.max(self.classify_tol * beta_abs)
    }
}

/// Steady state `(p, Γ)` plus numerical controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub p: LatticeVector,
    pub gamma: Circulation,
    #[serde(default)]
    pub controls: Controls,
}

impl ProblemInstance {
    pub fn new(p: LatticeVector, gamma: Circulation) -> Result<Self> {
        Self::with_controls(p, gamma, Controls::default())
    }

    pub fn with_controls(p: LatticeVector, gamma: Circulation, controls: Controls) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroDirection);
        }
        Ok(Self { p, gamma, controls })
    }

    /// Same instance with `Γ` replaced.
    pub fn with_gamma(&self, gamma: Circulation) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }
}

/// `A(p, q) = ½ (1/‖p‖² − 1/‖q‖²) det(p, q)`, zero when `p = ±q`, `p = 0`
/// or `q = 0`.
pub fn interaction_coefficient(p: LatticeVector, q: LatticeVector) -> f64 {
    if p.is_zero() || q.is_zero() || p == q || p == -q {
        return 0.0;
    }
    let (pp, qq) = (p.norm_sq(), q.norm_sq());
    // ½ (qq - pp) / (pp qq) keeps the bracket exact in integers.
    0.5 * ((qq - pp) as f64 / (pp as f64 * qq as f64)) * det2(p, q) as f64
}

/// Coefficients of one slice over a finite index range `[n_lo, n_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceCoefficients {
    pub beta: Complex64,
    pub alpha: Complex64,
    pub n_lo: i64,
    /// `γₙ` for `n = n_lo, n_lo + 1, …`.
    pub gamma_seq: Vec<f64>,
    /// `1 + γₙ`, computed from integer norms.
    pub one_plus_gamma: Vec<f64>,
    pub delta_seq: Vec<Complex64>,
}

impl SliceCoefficients {
    pub fn n_hi(&self) -> i64 {
        self.n_lo + self.gamma_seq.len() as i64 - 1
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.n_lo && n <= self.n_hi()
    }

    fn idx(&self, n: i64) -> usize {
        assert!(self.contains(n), "index {n} outside coefficient range");
        (n - self.n_lo) as usize
    }

    pub fn gamma(&self, n: i64) -> f64 {
        self.gamma_seq[self.idx(n)]
    }

    pub fn one_plus_gamma(&self, n: i64) -> f64 {
        self.one_plus_gamma[self.idx(n)]
    }

    pub fn delta(&self, n: i64) -> Complex64 {
        self.delta_seq[self.idx(n)]
    }

    pub fn beta_abs(&self) -> f64 {
        self.beta.norm()
    }

    /// Replaces every `γₙ` by zero (and `δₙ` by one), leaving `β` and `α`.
    pub fn unperturbed(&self) -> Self {
        let len = self.gamma_seq.len();
        Self {
            gamma_seq: vec![0.0; len],
            one_plus_gamma: vec![1.0; len],
            delta_seq: vec![Complex64::new(1.0, 0.0); len],
            ..self.clone()
        }
    }
}

/// `β = −det(q̂, p) Γ / (2‖p‖²)`.
pub fn beta(p: LatticeVector, qhat: LatticeVector, gamma: Circulation) -> Complex64 {
    gamma.0 * (-(det2(qhat, p) as f64) / (2.0 * p.norm_sq() as f64))
}

pub fn slice_coefficients(
    inst: &ProblemInstance,
    slice: &SliceDescriptor,
    n_range: (i64, i64),
) -> Result<SliceCoefficients> {
    let p = inst.p;
    let qhat = slice.qhat;
    if det2(qhat, p) == 0 {
        return Err(Error::CollinearSlice { qhat, p });
    }
    let (lo, hi) = n_range;
    if hi < lo {
        return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
    }
    let beta = beta(p, qhat, inst.gamma);
    let alpha = if beta.norm() > 0.0 {
        Complex64::i() * beta / beta.norm()
    } else {
        // Γ = 0: every operator vanishes, any unimodular α will do.
        Complex64::i()
    };
    let pp = p.norm_sq();
    let len = (hi - lo + 1) as usize;
    let mut gamma_seq = Vec::with_capacity(len);
    let mut one_plus_gamma = Vec::with_capacity(len);
    let mut delta_seq = Vec::with_capacity(len);
    for n in lo..=hi {
        let kk = (qhat + n * p).norm_sq();
        gamma_seq.push(-(pp as f64) / kk as f64);
        let opg = (kk - pp) as f64 / kk as f64;
        one_plus_gamma.push(opg);
        delta_seq.push(if opg >= 0.0 {
            Complex64::new(opg.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-opg).sqrt())
        });
    }
    Ok(SliceCoefficients {
        beta,
        alpha,
        n_lo: lo,
        gamma_seq,
        one_plus_gamma,
        delta_seq,
    })
}

/// Vorticity and velocity of the steady state at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyFields {
    pub omega: f64,
    pub u: f64,
    pub v: f64,
}

pub fn steady_state_fields(inst: &ProblemInstance, x: f64, y: f64) -> SteadyFields {
    let p = inst.p;
    let (a, b) = (inst.gamma.a(), inst.gamma.b());
    let phase = p.x as f64 * x + p.y as f64 * y;
    let (s, c) = phase.sin_cos();
    let pp = p.norm_sq() as f64;
    SteadyFields {
        omega: a * c - b * s,
        u: (-(p.y as f64) * a * s - p.y as f64 * b * c) / pp,
        v: (p.x as f64 * a * s + p.x as f64 * b * c) / pp,
    }
}
