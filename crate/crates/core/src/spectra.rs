//! Spectra of the slice operators and of the box operator, and the
//! structural checks built on them: nonimaginary eigenvalues against the
//! `2κ` bound, four-fold symmetry, essential-spectrum witnesses, resolvent
//! norms, and the slice decomposition of the box operator.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{slice_coefficients, ProblemInstance};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::lattice::{self, det2, LatticeVector, SliceDescriptor};
use crate::linalg::{eig_dense, largest_singular_value, match_multisets, smallest_singular_value};
use crate::operators::{build_bq, build_l2d, build_lq, BoxOperator2D, Window};

/// Tolerance for the four-fold symmetry verdict.
pub const SYMMETRY_TOL: f64 = 1e-6;

/// Agreement required between the `B_q` and `L_q` eigenvalue routes,
/// relative to `|β|`.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-8;

/// Eigenvalues of one window truncation of `L_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpectrum {
    pub slice: SliceDescriptor,
    pub window: Window,
    pub beta_abs: f64,
    /// Eigenvalues in the `λ` plane, obtained from `B_q` via `λ = −i|β| z`.
    pub eigenvalues: Vec<Complex64>,
    /// Largest distance between the `B_q` route and a direct eigensolve of
    /// `L_q`, ignoring pairs that are both numerically zero.
    pub route_mismatch: f64,
}

impl SliceSpectrum {
    pub fn routes_agree(&self) -> bool {
        self.route_mismatch <= ROUTE_AGREEMENT_TOL * self.beta_abs.max(1.0)
    }

    /// Eigenvalues with `|Re λ|` above `threshold`.
    pub fn nonimaginary(&self, threshold: f64) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|z| z.re.abs() > threshold)
            .collect()
    }
}

/// Largest distance over matched pairs of two same-size multisets,
/// skipping pairs whose ends are both below `zero_tol` in modulus.
pub fn off_zero_mismatch(a: &[Complex64], b: &[Complex64], tol: f64, zero_tol: f64) -> f64 {
    let Some(m) = match_multisets(a, b, tol) else {
        return f64::INFINITY;
    };
    m.pairs
        .iter()
        .enumerate()
        .filter(|&(i, &j)| a[i].norm() > zero_tol || b[j].norm() > zero_tol)
        .map(|(i, &j)| (a[i] - b[j]).norm())
        .fold(0.0, f64::max)
}

/// Spectrum of the `[-n, n]` truncation of `L_q`.
///
/// A collinear slice carries the zero operator and yields `{0}`.
pub fn slice_spectrum(
    inst: &ProblemInstance,
    slice: &SliceDescriptor,
    n: usize,
) -> Result<SliceSpectrum> {
    slice_spectrum_on(inst, slice, Window::symmetric(n))
}

pub fn slice_spectrum_on(
    inst: &ProblemInstance,
    slice: &SliceDescriptor,
    window: Window,
) -> Result<SliceSpectrum> {
    if det2(slice.qhat, inst.p) == 0 {
        return Ok(SliceSpectrum {
            slice: *slice,
            window,
            beta_abs: 0.0,
            eigenvalues: vec![Complex64::new(0.0, 0.0)],
            route_mismatch: 0.0,
        });
    }
    let coeffs = slice_coefficients(inst, slice, (window.lo, window.hi))?;
    let beta_abs = coeffs.beta_abs();
    let to_lambda = Complex64::new(0.0, -beta_abs);
    let from_b: Vec<Complex64> = eig_dense(&build_bq(&coeffs, window)?.to_dense())?
        .into_iter()
        .map(|z| to_lambda * z)
        .collect();
    let direct = eig_dense(&build_lq(&coeffs, window)?.to_dense())?;
    let scale = beta_abs.max(f64::MIN_POSITIVE);
    let route_mismatch =
        off_zero_mismatch(&from_b, &direct, ROUTE_AGREEMENT_TOL * scale, 1e-6 * scale);
    Ok(SliceSpectrum {
        slice: *slice,
        window,
        beta_abs,
        eigenvalues: from_b,
        route_mismatch,
    })
}

/// Per-slice outcome of the convergence ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub slice: SliceDescriptor,
    pub beta_abs: f64,
    /// Final window half-width.
    pub n: usize,
    pub converged: bool,
    /// Movement of the nonimaginary eigenvalues between the last two
    /// half-widths (infinite when their counts differ).
    pub residual: f64,
    pub route_mismatch: f64,
    /// `2 (n'' − n' + 1)`, the per-slice cap on nonimaginary eigenvalues.
    pub bound: usize,
    #[serde(with = "complex_pairs")]
    pub nonimaginary: Vec<Complex64>,
    #[serde(with = "complex_pairs")]
    pub eigenvalues: Vec<Complex64>,
}

/// A cluster of numerically equal nonimaginary eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonimaginaryEigenvalue {
    #[serde(with = "complex_pair")]
    pub value: Complex64,
    pub multiplicity: usize,
    pub qhat: LatticeVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub instance: ProblemInstance,
    pub kappa: usize,
    pub per_slice: Vec<SliceReport>,
    pub nonimaginary: Vec<NonimaginaryEigenvalue>,
    /// Number of nonimaginary eigenvalues counted with multiplicity.
    pub count: usize,
    pub bound_ok: bool,
    pub symmetry_ok: bool,
    /// Every slice converged within the window ladder.
    pub converged: bool,
}

impl SpectrumReport {
    /// `max Re λ` over the nonimaginary eigenvalues, or `None` if empty.
    pub fn spectral_abscissa(&self) -> Option<f64> {
        self.nonimaginary
            .iter()
            .map(|e| e.value.re)
            .reduce(f64::max)
    }

    pub fn nonimaginary_values(&self) -> Vec<Complex64> {
        self.nonimaginary
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect()
    }
}

/// Doubles the window of one slice until its nonimaginary eigenvalues
/// settle to within `eig_tol`.
pub fn converge_slice(inst: &ProblemInstance, slice: &SliceDescriptor) -> Result<SliceReport> {
    let controls = &inst.controls;
    let mut n = controls.n0.max(8);
    let mut prev = slice_spectrum(inst, slice, n)?;
    let threshold = controls.classification_threshold(prev.beta_abs);
    let mut residual = f64::INFINITY;
    let mut converged = false;
    while 2 * n <= controls.n_max.max(controls.n0) {
        let cur = slice_spectrum(inst, slice, 2 * n)?;
        let (a, b) = (prev.nonimaginary(threshold), cur.nonimaginary(threshold));
        residual =
            match_multisets(&a, &b, controls.eig_tol).map_or(f64::INFINITY, |m| m.max_distance);
        prev = cur;
        n *= 2;
        if residual < controls.eig_tol {
            converged = true;
            break;
        }
    }
    Ok(SliceReport {
        slice: *slice,
        beta_abs: prev.beta_abs,
        n,
        converged,
        residual,
        route_mismatch: prev.route_mismatch,
        bound: 2 * slice.in_disk_count(),
        nonimaginary: prev.nonimaginary(threshold),
        eigenvalues: prev.eigenvalues,
    })
}

pub fn nonimaginary_spectrum(inst: &ProblemInstance) -> Result<SpectrumReport> {
    nonimaginary_spectrum_with(inst, ExecMode::default())
}

pub fn nonimaginary_spectrum_with(
    inst: &ProblemInstance,
    mode: ExecMode,
) -> Result<SpectrumReport> {
    let slices = lattice::contributing_slices(inst.p)?;
    let kappa = lattice::kappa(inst.p)?;
    let per_slice = mode
        .map(&slices, |s| converge_slice(inst, s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let radius = 10.0 * inst.controls.eig_tol;
    let mut nonimaginary = Vec::new();
    for rep in &per_slice {
        for (value, multiplicity) in cluster(&rep.nonimaginary, radius) {
            nonimaginary.push(NonimaginaryEigenvalue {
                value,
                multiplicity,
                qhat: rep.slice.qhat,
            });
        }
    }
    let count = nonimaginary.iter().map(|e| e.multiplicity).sum();
    let all: Vec<Complex64> = per_slice
        .iter()
        .flat_map(|r| r.nonimaginary.iter().copied())
        .collect();
    Ok(SpectrumReport {
        instance: inst.clone(),
        kappa,
        bound_ok: count <= 2 * kappa,
        symmetry_ok: check_symmetry(&all, SYMMETRY_TOL),
        converged: per_slice.iter().all(|r| r.converged),
        per_slice,
        nonimaginary,
        count,
    })
}

/// Groups values closer than `radius` (single linkage); returns cluster
/// means and sizes.
fn cluster(values: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &z in values {
        let hits: Vec<usize> = (0..groups.len())
            .filter(|&g| groups[g].iter().any(|w| (w - z).norm() <= radius))
            .collect();
        match hits.split_first() {
            None => groups.push(vec![z]),
            Some((&first, rest)) => {
                for &g in rest.iter().rev() {
                    let moved = groups.remove(g);
                    groups[first].extend(moved);
                }
                groups[first].push(z);
            }
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().sum::<Complex64>() / g.len() as f64;
            (mean, g.len())
        })
        .collect()
}

/// Whether the multiset is invariant under `λ ↦ −λ` and `λ ↦ λ̄`.
pub fn check_symmetry(eigs: &[Complex64], tol: f64) -> bool {
    let neg: Vec<Complex64> = eigs.iter().map(|z| -z).collect();
    let conj: Vec<Complex64> = eigs.iter().map(|z| z.conj()).collect();
    let ok = |other: &[Complex64]| match_multisets(eigs, other, tol).is_some_and(|m| m.within(tol));
    ok(&neg) && ok(&conj)
}

/// The segment `i[−2|β|, 2|β|]` of the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialInterval {
    pub beta_abs: f64,
}

impl EssentialInterval {
    /// Imaginary parts of the endpoints.
    pub fn endpoints(&self) -> (f64, f64) {
        (-2.0 * self.beta_abs, 2.0 * self.beta_abs)
    }

    pub fn half_length(&self) -> f64 {
        2.0 * self.beta_abs
    }
}

pub fn essential_interval(
    inst: &ProblemInstance,
    slice: &SliceDescriptor,
) -> Result<EssentialInterval> {
    if det2(slice.qhat, inst.p) == 0 {
        return Err(Error::CollinearSlice {
            qhat: slice.qhat,
            p: inst.p,
        });
    }
    Ok(EssentialInterval {
        beta_abs: crate::coefficients::beta(inst.p, slice.qhat, inst.gamma).norm(),
    })
}

/// How well a truncated Hermitian `B_q` spectrum fills `[−2, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    /// Largest gap in `[−2, 2]` left by the eigenvalues, end gaps included.
    pub max_gap: f64,
    pub lowest: f64,
    pub highest: f64,
}

/// Gap statistics of real eigenvalues against `[−2, 2]`.
pub fn interval_coverage(values: &[f64]) -> Coverage {
    let mut v: Vec<f64> = values.iter().map(|x| x.clamp(-2.0, 2.0)).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    let (lowest, highest) = (
        values.iter().copied().fold(f64::INFINITY, f64::min),
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut max_gap: f64 = match (v.first(), v.last()) {
        (Some(&lo), Some(&hi)) => (lo + 2.0).max(2.0 - hi),
        _ => 4.0,
    };
    for w in v.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    Coverage {
        max_gap,
        lowest,
        highest,
    }
}

/// Coverage of `[−2, 2]` by the `[-n, n]` truncation of a Hermitian `B_q`
/// (a slice with no points inside the disk).
pub fn essential_coverage(
    inst: &ProblemInstance,
    slice: &SliceDescriptor,
    n: usize,
) -> Result<Coverage> {
    if slice.window.is_some() {
        return Err(Error::InvalidArgument(format!(
            "slice through {} meets the open disk, B_q is not Hermitian",
            slice.qhat
        )));
    }
    let window = Window::symmetric(n);
    let coeffs = slice_coefficients(inst, slice, (window.lo, window.hi))?;
    let eigs = eig_dense(&build_bq(&coeffs, window)?.to_dense())?;
    Ok(interval_coverage(
        &eigs.iter().map(|z| z.re).collect::<Vec<_>>(),
    ))
}

/// Resolvent norms of a box operator, computed block by block over the
/// connected components of its coupling graph.
pub struct BlockResolvent<'a> {
    op: &'a BoxOperator2D,
    blocks: Vec<Vec<usize>>,
    dense: Vec<nalgebra::DMatrix<Complex64>>,
}

impl<'a> BlockResolvent<'a> {
    pub fn new(op: &'a BoxOperator2D) -> Self {
        let blocks = op.coupled_blocks();
        let dense = blocks.iter().map(|b| op.dense_block(b)).collect();
        Self { op, blocks, dense }
    }

    pub fn operator(&self) -> &BoxOperator2D {
        self.op
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `‖(λ − A)⁻¹‖₂` restricted to the blocks selected by `keep`.
    pub fn norm_where(&self, lambda: Complex64, keep: impl Fn(&[usize]) -> bool) -> f64 {
        self.blocks
            .iter()
            .zip(&self.dense)
            .filter(|(b, _)| keep(b))
            .map(|(_, a)| {
                let m = a.nrows();
                let shifted = nalgebra::DMatrix::from_diagonal_element(m, m, lambda) - a;
                1.0 / smallest_singular_value(&shifted)
            })
            .fold(0.0, f64::max)
    }

    pub fn norm(&self, lambda: Complex64) -> f64 {
        self.norm_where(lambda, |_| true)
    }

    /// Spectral norm `‖A‖₂`.
    pub fn operator_norm(&self) -> f64 {
        self.dense
            .iter()
            .map(largest_singular_value)
            .fold(0.0, f64::max)
    }
}

/// `1/σ_min(λ − L)` at `λ = a + iτ` for each `τ`, on the box of half-width `k`.
pub fn resolvent_norm_samples(
    inst: &ProblemInstance,
    k: i64,
    a: f64,
    taus: &[f64],
) -> Result<Vec<f64>> {
    Ok(resolvent_report(inst, k, a, taus, ExecMode::default())?.samples)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventReport {
    pub instance: ProblemInstance,
    pub a: f64,
    pub box_half_width: i64,
    pub taus: Vec<f64>,
    pub samples: Vec<f64>,
    pub operator_norm: f64,
    /// Largest sample over blocks whose slice misses the open disk.
    pub outer_slice_samples: Vec<f64>,
    /// `2/|a|`, the uniform bound for slices far from the origin.
    pub outer_slice_bound: f64,
    /// Every sample with `|λ| > ‖L‖` obeys `≤ 1/(|λ| − ‖L‖)`.
    pub far_field_ok: bool,
    /// `max_{τ ≥ 20} ≤ max_{τ < 20}` (vacuous when either side is empty).
    pub tail_ok: bool,
}

pub const TAIL_SPLIT: f64 = 20.0;

pub fn resolvent_report(
    inst: &ProblemInstance,
    k: i64,
    a: f64,
    taus: &[f64],
    mode: ExecMode,
) -> Result<ResolventReport> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidArgument("a must be nonzero".into()));
    }
    let op = build_l2d(inst, k)?;
    let res = BlockResolvent::new(&op);
    let operator_norm = res.operator_norm();
    let outer = |block: &[usize]| {
        let slice =
            SliceDescriptor::containing(op.index.mode(block[0]), inst.p).expect("p is nonzero");
        slice.window.is_none()
    };
    let pairs = mode.map(taus, |&tau| {
        let lambda = Complex64::new(a, tau);
        (res.norm(lambda), res.norm_where(lambda, outer))
    });
    let samples: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let outer_slice_samples = pairs.iter().map(|p| p.1).collect();

    let far_field_ok = taus.iter().zip(&samples).all(|(&tau, &s)| {
        let modulus = Complex64::new(a, tau).norm();
        modulus <= operator_norm || s <= (1.0 + 1e-12) / (modulus - operator_norm)
    });
    let near = taus
        .iter()
        .zip(&samples)
        .filter(|(t, _)| t.abs() < TAIL_SPLIT)
        .map(|(_, &s)| s)
        .reduce(f64::max);
    let far = taus
        .iter()
        .zip(&samples)
        .filter(|(t, _)| t.abs() >= TAIL_SPLIT)
        .map(|(_, &s)| s)
        .reduce(f64::max);
    let tail_ok = match (near, far) {
        (Some(n), Some(f)) => f <= n,
        _ => true,
    };
    Ok(ResolventReport {
        instance: inst.clone(),
        a,
        box_half_width: k,
        taus: taus.to_vec(),
        samples,
        operator_norm,
        outer_slice_samples,
        outer_slice_bound: 2.0 / a.abs(),
        far_field_ok,
        tail_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceDiff {
    pub qhat: LatticeVector,
    pub window: Window,
    pub max_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub modes: usize,
    pub slices: usize,
    pub max_distance: f64,
    pub tol: f64,
    pub ok: bool,
    /// Slices sorted by their worst matched distance, largest first.
    pub worst_slices: Vec<SliceDiff>,
}

pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// Compares the eigenvalues of the box operator with the union of the
/// slice spectra, each slice truncated to its intersection with the box.
pub fn decomposition_crosscheck(inst: &ProblemInstance, k: i64) -> Result<DecompositionReport> {
    let op = build_l2d(inst, k)?;
    let full = eig_dense(&op.to_dense())?;

    let mut slices: BTreeMap<LatticeVector, (SliceDescriptor, Vec<i64>)> = BTreeMap::new();
    for &mode in op.index.modes() {
        let s = SliceDescriptor::containing(mode, inst.p)?;
        let n = shift_index(s.qhat, mode, inst.p);
        slices
            .entry(s.qhat)
            .or_insert_with(|| (s, Vec::new()))
            .1
            .push(n);
    }
    let mut union = Vec::with_capacity(full.len());
    let mut owner = Vec::with_capacity(full.len());
    let mut windows = Vec::new();
    for (s, mut ns) in slices.into_values() {
        ns.sort_unstable();
        let window = Window::new(ns[0], *ns.last().unwrap())?;
        // the collinear line skips the origin
        if !s.is_collinear() && window.len() != ns.len() {
            return Err(Error::InvalidArgument(format!(
                "box does not meet slice {} in a contiguous window",
                s.qhat
            )));
        }
        let eigs = if s.is_collinear() {
            vec![Complex64::new(0.0, 0.0); ns.len()]
        } else {
            let coeffs = slice_coefficients(inst, &s, (window.lo, window.hi))?;
            eig_dense(&build_lq(&coeffs, window)?.to_dense())?
        };
        owner.extend(std::iter::repeat_n(windows.len(), eigs.len()));
        union.extend(eigs);
        windows.push((s.qhat, window));
    }

    let m = match_multisets(&union, &full, DECOMPOSITION_TOL).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "dimension mismatch: {} vs {}",
            union.len(),
            full.len()
        ))
    })?;
    let mut per_slice = vec![0.0f64; windows.len()];
    for (i, &j) in m.pairs.iter().enumerate() {
        let d = (union[i] - full[j]).norm();
        per_slice[owner[i]] = per_slice[owner[i]].max(d);
    }
    let mut worst_slices: Vec<SliceDiff> = windows
        .iter()
        .zip(&per_slice)
        .map(|(&(qhat, window), &max_distance)| SliceDiff {
            qhat,
            window,
            max_distance,
        })
        .collect();
    worst_slices.sort_by(|a, b| b.max_distance.total_cmp(&a.max_distance));
    worst_slices.truncate(8);
    Ok(DecompositionReport {
        modes: full.len(),
        slices: windows.len(),
        max_distance: m.max_distance,
        tol: DECOMPOSITION_TOL,
        ok: m.within(DECOMPOSITION_TOL),
        worst_slices,
    })
}

/// `n` with `qhat + n p = k`.
fn shift_index(qhat: LatticeVector, k: LatticeVector, p: LatticeVector) -> i64 {
    let d = k - qhat;
    if p.x != 0 {
        d.x / p.x
    } else {
        d.y / p.y
    }
}

/// Serde adapters writing complex numbers as `[re, im]`.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

pub mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(v.into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Circulation;

    fn v(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symmetry_examples() {
        let quad = [c(1.0, 1.0), c(-1.0, -1.0), c(1.0, -1.0), c(-1.0, 1.0)];
        assert!(check_symmetry(&quad, 1e-12));
        let pair = [c(1.0, 1.0), c(-1.0, -1.0)];
        let neg: Vec<_> = pair.iter().map(|z| -z).collect();
        assert!(match_multisets(&pair, &neg, 1e-12).unwrap().within(1e-12));
        assert!(!check_symmetry(&pair, 1e-12));
        assert!(check_symmetry(&[], 1e-12));
    }

    #[test]
    fn collinear_slice_spectrum_is_zero() {
        let inst = ProblemInstance::new(v(1, 1), Circulation::new(1.0, 0.0)).unwrap();
        let s = SliceDescriptor::containing(v(3, 3), v(1, 1)).unwrap();
        let sp = slice_spectrum(&inst, &s, 8).unwrap();
        assert_eq!(sp.eigenvalues, vec![c(0.0, 0.0)]);
    }

    #[test]
    fn outer_slice_spectrum_is_imaginary() {
        let inst = ProblemInstance::new(v(1, 2), Circulation::new(0.8, -0.3)).unwrap();
        for s in lattice::enumerate_representatives(v(1, 2), 4.0).unwrap() {
            if s.window.is_some() {
                continue;
            }
            let sp = slice_spectrum(&inst, &s, 16).unwrap();
            assert!(sp.routes_agree(), "{:?}", sp.route_mismatch);
            for z in &sp.eigenvalues {
                assert!(z.re.abs() <= 1e-10 * sp.beta_abs);
            }
        }
    }

    #[test]
    fn essential_interval_examples() {
        let inst = ProblemInstance::new(v(0, 2), Circulation::new(1.0, 0.0)).unwrap();
        let s = SliceDescriptor::containing(v(1, 0), v(0, 2)).unwrap();
        let e = essential_interval(&inst, &s).unwrap();
        assert!((e.endpoints().1 - 0.5).abs() < 1e-15);
        let e2 = essential_interval(&inst.with_gamma(Circulation::new(2.0, 0.0)), &s).unwrap();
        assert!((e2.half_length() - 2.0 * e.half_length()).abs() < 1e-15);
        for m in 1..10 {
            let s = SliceDescriptor::containing(v(m, 0), v(0, 2)).unwrap();
            assert!(
                (essential_interval(&inst, &s).unwrap().beta_abs - m as f64 / 4.0).abs() < 1e-15
            );
        }
        let col = SliceDescriptor::containing(v(0, 4), v(0, 2)).unwrap();
        assert!(essential_interval(&inst, &col).is_err());
    }

    #[test]
    fn coverage_of_free_operator() {
        for m in [9usize, 31, 101] {
            let vals: Vec<f64> = (1..=m)
                .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (m as f64 + 1.0)).cos())
                .collect();
            let cov = interval_coverage(&vals);
            assert!(cov.max_gap <= 2.0 * std::f64::consts::PI / (m as f64 + 1.0));
        }
    }

    #[test]
    fn coverage_rejects_inner_slice() {
        let inst = ProblemInstance::new(v(0, 2), Circulation::new(1.0, 0.0)).unwrap();
        let s = SliceDescriptor::containing(v(1, 0), v(0, 2)).unwrap();
        assert!(essential_coverage(&inst, &s, 10).is_err());
    }

    #[test]
    fn cluster_merges_close_values() {
        let vals = [c(1.0, 0.0), c(1.0 + 1e-9, 0.0), c(2.0, 0.0)];
        let mut cl = cluster(&vals, 1e-7);
        cl.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].1, 2);
    }

    #[test]
    fn resolvent_rejects_zero_real_part() {
        let inst = ProblemInstance::new(v(0, 2), Circulation::new(1.0, 0.0)).unwrap();
        assert!(resolvent_norm_samples(&inst, 4, 0.0, &[1.0]).is_err());
    }

    #[test]
    fn resolvent_zero_operator() {
        let inst = ProblemInstance::new(v(0, 2), Circulation::new(0.0, 0.0)).unwrap();
        let taus = [0.0, 3.0, 10.0];
        let s = resolvent_norm_samples(&inst, 4, 0.5, &taus).unwrap();
        for (tau, x) in taus.iter().zip(s) {
            assert!((x - 1.0 / Complex64::new(0.5, *tau).norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn block_resolvent_matches_dense() {
        let inst = ProblemInstance::new(v(1, 1), Circulation::new(0.7, 0.4)).unwrap();
        let op = build_l2d(&inst, 4).unwrap();
        let res = BlockResolvent::new(&op);
        let dense = op.to_dense();
        let n = dense.nrows();
        for lambda in [c(0.5, 0.0), c(-0.3, 2.0), c(1.0, -7.0)] {
            let shifted = nalgebra::DMatrix::from_diagonal_element(n, n, lambda) - &dense;
            let want = 1.0 / smallest_singular_value(&shifted);
            assert!((res.norm(lambda) - want).abs() <= 1e-10 * want);
        }
        assert!((res.operator_norm() - largest_singular_value(&dense)).abs() < 1e-12);
    }
}
