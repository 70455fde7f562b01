//! Integer geometry of `Z²`: slices along `p`, their minimal-norm
//! representatives, the in-disk index windows, and the count `κ`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the integer lattice `Z²`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn norm_sq(self) -> i64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn dot(self, other: Self) -> i64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Max-norm `‖v‖_∞`.
    pub fn max_norm(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for LatticeVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for LatticeVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for LatticeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl Mul<LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, rhs: LatticeVector) -> LatticeVector {
        LatticeVector::new(self * rhs.x, self * rhs.y)
    }
}

impl From<(i64, i64)> for LatticeVector {
    fn from((x, y): (i64, i64)) -> Self {
        Self::new(x, y)
    }
}

/// A slice `{q̂ + n p : n ∈ Z}` identified by its representative.
///
/// `window` is the contiguous range of `n` with `‖q̂ + n p‖ < ‖p‖`, when
/// that set is nonempty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SliceDescriptor {
    pub qhat: LatticeVector,
    pub p: LatticeVector,
    pub window: Option<(i64, i64)>,
}

impl SliceDescriptor {
    /// Builds the descriptor of the slice containing `q`.
    pub fn containing(q: LatticeVector, p: LatticeVector) -> Result<Self> {
        let qhat = slice_representative(q, p)?;
        Ok(Self {
            qhat,
            p,
            window: in_disk_window(qhat, p),
        })
    }

    /// Lattice point `q̂ + n p`.
    pub fn point(&self, n: i64) -> LatticeVector {
        self.qhat + n * self.p
    }

    pub fn is_collinear(&self) -> bool {
        det2(self.qhat, self.p) == 0
    }

    /// Number of in-disk indices, `n'' - n' + 1`, or zero.
    pub fn in_disk_count(&self) -> usize {
        self.window.map_or(0, |(lo, hi)| (hi - lo + 1) as usize)
    }
}

pub fn det2(a: LatticeVector, b: LatticeVector) -> i64 {
    a.x * b.y - a.y * b.x
}

pub fn is_collinear(q: LatticeVector, p: LatticeVector) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroDirection);
    }
    Ok(det2(q, p) == 0)
}

/// Minimal-norm point of the slice through `q`; on a two-way tie the
/// point with the larger shift index wins.
pub fn slice_representative(q: LatticeVector, p: LatticeVector) -> Result<LatticeVector> {
    if p.is_zero() {
        return Err(Error::ZeroDirection);
    }
    Ok(q + minimizing_shift(q, p) * p)
}

/// `argmin_n ‖q + n p‖²`, largest `n` among ties.
fn minimizing_shift(q: LatticeVector, p: LatticeVector) -> i64 {
    // ‖q + n p‖² = ‖p‖² n² + 2 (q·p) n + ‖q‖² has its real minimum at
    // -(q·p)/‖p‖²; the integer minimizers are among floor and ceil of it.
    let num = -q.dot(p);
    let den = p.norm_sq();
    let lo = num.div_euclid(den);
    let mut best = lo - 1;
    let mut best_val = (q + best * p).norm_sq();
    for n in lo..=lo + 2 {
        let val = (q + n * p).norm_sq();
        if val <= best_val {
            best = n;
            best_val = val;
        }
    }
    best
}

/// Contiguous range of `n` with `‖qhat + n p‖ < ‖p‖`, assuming `qhat` is a
/// slice representative (so `n = 0` minimizes the norm).
fn in_disk_window(qhat: LatticeVector, p: LatticeVector) -> Option<(i64, i64)> {
    let r2 = p.norm_sq();
    let inside = |n: i64| (qhat + n * p).norm_sq() < r2;
    if !inside(0) {
        return None;
    }
    let mut lo = 0;
    while inside(lo - 1) {
        lo -= 1;
    }
    let mut hi = 0;
    while inside(hi + 1) {
        hi += 1;
    }
    Some((lo, hi))
}

/// Lattice points strictly inside the disk of radius `‖p‖` that are not
/// collinear with `p`, in lexicographic order.
pub fn enumerate_inner_points(p: LatticeVector) -> Result<Vec<LatticeVector>> {
    if p.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let r2 = p.norm_sq();
    let r = (r2 as f64).sqrt().ceil() as i64;
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            let v = LatticeVector::new(x, y);
            if v.norm_sq() < r2 && det2(v, p) != 0 {
                out.push(v);
            }
        }
    }
    Ok(out)
}

pub fn kappa(p: LatticeVector) -> Result<usize> {
    Ok(enumerate_inner_points(p)?.len())
}

/// Slices that meet the open disk of radius `‖p‖` away from the line
/// through `p`, sorted by `(‖q̂‖², q̂)`.
pub fn contributing_slices(p: LatticeVector) -> Result<Vec<SliceDescriptor>> {
    let mut groups: BTreeMap<(i64, LatticeVector), SliceDescriptor> = BTreeMap::new();
    for v in enumerate_inner_points(p)? {
        let slice = SliceDescriptor::containing(v, p)?;
        groups
            .entry((slice.qhat.norm_sq(), slice.qhat))
            .or_insert(slice);
    }
    Ok(groups.into_values().collect())
}

/// Distinct non-collinear representatives with `0 < ‖q̂‖ ≤ radius`.
pub fn enumerate_representatives(p: LatticeVector, radius: f64) -> Result<Vec<SliceDescriptor>> {
    if p.is_zero() {
        return Err(Error::ZeroDirection);
    }
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let r = radius.floor() as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            let v = LatticeVector::new(x, y);
            if v.is_zero() || (v.norm_sq() as f64) > r2 || det2(v, p) == 0 {
                continue;
            }
            if slice_representative(v, p)? == v {
                out.push(SliceDescriptor {
                    qhat: v,
                    p,
                    window: in_disk_window(v, p),
                });
            }
        }
    }
    out.sort_by_key(|s| (s.qhat.norm_sq(), s.qhat));
    Ok(out)
}
