//! Finite truncations of the slice operators `L_q`, `M⁰_q`, `M_q`, `B_q`,
//! the signature operators `J_q` and `Ĵ`, and the full linearized operator
//! on a box of Fourier modes.
//!
//! All truncations are Dirichlet: couplings that leave the window are
//! dropped. Slice operators are stored as three diagonals indexed by the
//! slice index `n`; the action convention is
//! `(M⁰ω)ₙ = α ωₙ₋₁ + ᾱ ωₙ₊₁`, i.e. `α` sits on the subdiagonal.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{interaction_coefficient, ProblemInstance, SliceCoefficients};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVector, SliceDescriptor};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Contiguous index range `[lo, hi]` of a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// `[-n, n]`.
    pub fn symmetric(n: usize) -> Self {
        Self {
            lo: -(n as i64),
            hi: n as i64,
        }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.lo && n <= self.hi
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Lq,
    M0,
    Mq,
    Bq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub p: LatticeVector,
    pub qhat: LatticeVector,
    pub gamma: Complex64,
    pub beta: Complex64,
}

/// Window truncation of a zero-diagonal two-diagonal infinite matrix.
///
/// `sub[i]` is entry `(lo+i+1, lo+i)`, `sup[i]` is entry `(lo+i, lo+i+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalOperator {
    pub window: Window,
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
    pub kind: OperatorKind,
    pub provenance: Option<Provenance>,
}

impl TridiagonalOperator {
    fn from_bands(
        window: Window,
        kind: OperatorKind,
        provenance: Option<Provenance>,
        mut band: impl FnMut(i64) -> (Complex64, Complex64),
    ) -> Self {
        let m = window.len();
        let (mut sub, mut sup) = (Vec::with_capacity(m - 1), Vec::with_capacity(m - 1));
        for n in window.lo..window.hi {
            let (s, u) = band(n);
            sub.push(s);
            sup.push(u);
        }
        Self {
            window,
            sub,
            diag: vec![ZERO; m],
            sup,
            kind,
            provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.window.len()
    }

    /// Entry `(i, j)` in slice indices; zero off the three diagonals.
    pub fn entry(&self, i: i64, j: i64) -> Complex64 {
        if !self.window.contains(i) || !self.window.contains(j) {
            return ZERO;
        }
        let k = (i.min(j) - self.window.lo) as usize;
        match j - i {
            0 => self.diag[k],
            -1 => self.sub[k],
            1 => self.sup[k],
            _ => ZERO,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let m = self.dim();
        let mut a = DMatrix::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = self.diag[i];
        }
        for i in 0..m.saturating_sub(1) {
            a[(i + 1, i)] = self.sub[i];
            a[(i, i + 1)] = self.sup[i];
        }
        a
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            sub: self.sup.iter().map(|z| z.conj()).collect(),
            diag: self.diag.iter().map(|z| z.conj()).collect(),
            sup: self.sub.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            sub: self.sub.iter().map(|z| z * c).collect(),
            diag: self.diag.iter().map(|z| z * c).collect(),
            sup: self.sup.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }

    /// `diag(left) · self · diag(right)`, diagonals indexed over the window.
    pub fn sandwich(&self, left: &[Complex64], right: &[Complex64]) -> Self {
        assert_eq!(left.len(), self.dim());
        assert_eq!(right.len(), self.dim());
        Self {
            sub: (0..self.sub.len())
                .map(|i| left[i + 1] * self.sub[i] * right[i])
                .collect(),
            diag: (0..self.dim())
                .map(|i| left[i] * self.diag[i] * right[i])
                .collect(),
            sup: (0..self.sup.len())
                .map(|i| left[i] * self.sup[i] * right[i + 1])
                .collect(),
            ..self.clone()
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.sub
            .iter()
            .chain(&self.diag)
            .chain(&self.sup)
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entrywise difference to `other`, which must share the window.
    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.window, other.window);
        let bands = |a: &Self| {
            a.sub
                .iter()
                .chain(&a.diag)
                .chain(&a.sup)
                .copied()
                .collect::<Vec<_>>()
        };
        bands(self)
            .iter()
            .zip(bands(other))
            .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    /// Serializes the operator for debugging and golden-file comparison.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn coeff_window_check(coeffs: &SliceCoefficients, window: Window) -> Result<()> {
    if coeffs.contains(window.lo) && coeffs.contains(window.hi) {
        Ok(())
    } else {
        Err(Error::WindowOutOfRange {
            lo: window.lo,
            hi: window.hi,
            range_lo: coeffs.n_lo,
            range_hi: coeffs.n_hi(),
        })
    }
}

pub fn build_m0(alpha: Complex64, window: Window) -> Result<TridiagonalOperator> {
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnimodular(alpha.norm()));
    }
    Ok(TridiagonalOperator::from_bands(
        window,
        OperatorKind::M0,
        None,
        |_| (alpha, alpha.conj()),
    ))
}

/// `B_q = diag(δ) M⁰ diag(δ)`.
pub fn build_bq(coeffs: &SliceCoefficients, window: Window) -> Result<TridiagonalOperator> {
    coeff_window_check(coeffs, window)?;
    let a = coeffs.alpha;
    Ok(TridiagonalOperator::from_bands(
        window,
        OperatorKind::Bq,
        None,
        |n| {
            let dd = coeffs.delta(n) * coeffs.delta(n + 1);
            (a * dd, a.conj() * dd)
        },
    ))
}

/// `M_q = M⁰ diag(1 + γₙ)`.
pub fn build_mq(coeffs: &SliceCoefficients, window: Window) -> Result<TridiagonalOperator> {
    coeff_window_check(coeffs, window)?;
    let a = coeffs.alpha;
    Ok(TridiagonalOperator::from_bands(
        window,
        OperatorKind::Mq,
        None,
        |n| {
            (
                a * coeffs.one_plus_gamma(n),
                a.conj() * coeffs.one_plus_gamma(n + 1),
            )
        },
    ))
}

/// `L_q = (Vβ − V*β̄) diag(1 + γₙ)`.
pub fn build_lq(coeffs: &SliceCoefficients, window: Window) -> Result<TridiagonalOperator> {
    coeff_window_check(coeffs, window)?;
    let b = coeffs.beta;
    Ok(TridiagonalOperator::from_bands(
        window,
        OperatorKind::Lq,
        None,
        |n| {
            (
                b * coeffs.one_plus_gamma(n),
                -b.conj() * coeffs.one_plus_gamma(n + 1),
            )
        },
    ))
}

/// Attaches `(p, q̂, Γ, β)` to a built operator.
pub fn with_provenance(
    mut op: TridiagonalOperator,
    inst: &ProblemInstance,
    slice: &SliceDescriptor,
    coeffs: &SliceCoefficients,
) -> TridiagonalOperator {
    op.provenance = Some(Provenance {
        p: inst.p,
        qhat: slice.qhat,
        gamma: inst.gamma.0,
        beta: coeffs.beta,
    });
    op
}

/// Diagonal `±1` operator over a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureOperator {
    pub window: Window,
    pub signs: Vec<i8>,
}

impl SignatureOperator {
    pub fn sign(&self, n: i64) -> i8 {
        self.signs[(n - self.window.lo) as usize]
    }

    pub fn as_complex(&self) -> Vec<Complex64> {
        self.signs
            .iter()
            .map(|&s| Complex64::new(s as f64, 0.0))
            .collect()
    }

    /// `J A J` for a tridiagonal `A` on the same window.
    pub fn conjugate(&self, a: &TridiagonalOperator) -> TridiagonalOperator {
        let j = self.as_complex();
        a.sandwich(&j, &j)
    }

    /// Number of `+1` entries.
    pub fn positive_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }
}

/// `J_q`: `+1` on the in-disk indices `[n', n'']`, `−1` elsewhere.
///
/// Fails with [`Error::NoInDiskPoints`] for slices outside the disk; use
/// [`all_negative_signature`] for those.
pub fn build_signature(slice: &SliceDescriptor, window: Window) -> Result<SignatureOperator> {
    let (lo, hi) = slice.window.ok_or(Error::NoInDiskPoints(slice.qhat))?;
    if !window.contains(lo) || !window.contains(hi) {
        return Err(Error::WindowOutOfRange {
            lo: window.lo,
            hi: window.hi,
            range_lo: lo,
            range_hi: hi,
        });
    }
    Ok(SignatureOperator {
        window,
        signs: window
            .indices()
            .map(|n| if n >= lo && n <= hi { 1 } else { -1 })
            .collect(),
    })
}

/// `J = −I`, the signature of a slice with no in-disk points.
pub fn all_negative_signature(window: Window) -> SignatureOperator {
    SignatureOperator {
        window,
        signs: vec![-1; window.len()],
    }
}

/// `Ĵ = diag((−1)ⁿ)`.
pub fn parity_signature(window: Window) -> SignatureOperator {
    SignatureOperator {
        window,
        signs: window
            .indices()
            .map(|n| if n.rem_euclid(2) == 0 { 1 } else { -1 })
            .collect(),
    }
}

/// Largest modulus of `J diag(δ) + diag(δ)*` over the window.
pub fn signature_delta_defect(j: &SignatureOperator, coeffs: &SliceCoefficients) -> f64 {
    j.window
        .indices()
        .map(|n| (coeffs.delta(n) * j.sign(n) as f64 + coeffs.delta(n).conj()).norm())
        .fold(0.0, f64::max)
}

/// Enumeration of the modes `0 < ‖k‖_∞ ≤ K` of a box, row-major in `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxIndex {
    pub half_width: i64,
    modes: Vec<LatticeVector>,
    lookup: HashMap<LatticeVector, usize>,
}

impl BoxIndex {
    pub fn new(half_width: i64) -> Self {
        let mut modes = Vec::new();
        for x in -half_width..=half_width {
            for y in -half_width..=half_width {
                let k = LatticeVector::new(x, y);
                if !k.is_zero() {
                    modes.push(k);
                }
            }
        }
        let lookup = modes.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Self {
            half_width,
            modes,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[LatticeVector] {
        &self.modes
    }

    pub fn index_of(&self, k: LatticeVector) -> Option<usize> {
        self.lookup.get(&k).copied()
    }

    pub fn mode(&self, i: usize) -> LatticeVector {
        self.modes[i]
    }
}

/// Linearized operator restricted to a box of modes, at most two nonzeros
/// per row (columns `k − p` and `k + p`).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxOperator2D {
    pub index: BoxIndex,
    pub p: LatticeVector,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl BoxOperator2D {
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map_or(ZERO, |&(_, v)| v)
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().fold(ZERO, |acc, &(j, v)| acc + v * x[j]);
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                a[(i, j)] = v;
            }
        }
        a
    }

    /// `sqrt(‖A‖₁ ‖A‖_∞)`, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let n = self.dim();
        let mut col = vec![0.0; n];
        let mut row_max: f64 = 0.0;
        for row in &self.rows {
            let mut s = 0.0;
            for &(j, v) in row {
                s += v.norm();
                col[j] += v.norm();
            }
            row_max = row_max.max(s);
        }
        let col_max = col.into_iter().fold(0.0, f64::max);
        (row_max * col_max).sqrt()
    }

    /// Connected components of the coupling graph, each sorted by index.
    ///
    /// The operator is block diagonal with respect to this partition.
    pub fn coupled_blocks(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if v != ZERO {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let mut blocks: Vec<_> = groups.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }

    /// Dense submatrix on the given (sorted) indices.
    pub fn dense_block(&self, indices: &[usize]) -> DMatrix<Complex64> {
        let pos: HashMap<usize, usize> = indices.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let m = indices.len();
        let mut a = DMatrix::zeros(m, m);
        for (r, &i) in indices.iter().enumerate() {
            for &(j, v) in &self.rows[i] {
                if let Some(&c) = pos.get(&j) {
                    a[(r, c)] = v;
                }
            }
        }
        a
    }
}

/// Builds the linearized operator on the modes `0 < ‖k‖_∞ ≤ K`:
/// row `k` holds `A(p, k−p) Γ` at column `k − p` and `A(−p, k+p) Γ̄` at
/// column `k + p`, when those modes lie in the box.
pub fn build_l2d(inst: &ProblemInstance, half_width: i64) -> Result<BoxOperator2D> {
    let p = inst.p;
    let min = p.max_norm() + 1;
    if half_width < min {
        return Err(Error::BoxTooSmall { k: half_width, min });
    }
    let index = BoxIndex::new(half_width);
    let gamma = inst.gamma.0;
    let rows = index
        .modes()
        .iter()
        .map(|&k| {
            let mut row = Vec::with_capacity(2);
            if let Some(j) = index.index_of(k - p) {
                let v = gamma * interaction_coefficient(p, k - p);
                if v != ZERO {
                    row.push((j, v));
                }
            }
            if let Some(j) = index.index_of(k + p) {
                let v = gamma.conj() * interaction_coefficient(-p, k + p);
                if v != ZERO {
                    row.push((j, v));
                }
            }
            row
        })
        .collect();
    Ok(BoxOperator2D { index, p, rows })
}

/// Skew-Hermitian part `L⁰`: the coefficients `A(±p, ·)` replaced by their
/// `D⁰` diagonal, `det(p, k)/(2‖p‖²)`.
pub fn build_l2d_unperturbed(inst: &ProblemInstance, half_width: i64) -> Result<BoxOperator2D> {
    let p = inst.p;
    let min = p.max_norm() + 1;
    if half_width < min {
        return Err(Error::BoxTooSmall { k: half_width, min });
    }
    let index = BoxIndex::new(half_width);
    let gamma = inst.gamma.0;
    let pp = p.norm_sq() as f64;
    let d0 = |k: LatticeVector| crate::lattice::det2(p, k) as f64 / (2.0 * pp);
    let rows = index
        .modes()
        .iter()
        .map(|&k| {
            let mut row = Vec::with_capacity(2);
            if let Some(j) = index.index_of(k - p) {
                row.push((j, gamma * d0(k - p)));
            }
            if let Some(j) = index.index_of(k + p) {
                row.push((j, -gamma.conj() * d0(k + p)));
            }
            row
        })
        .collect();
    Ok(BoxOperator2D { index, p, rows })
}
