//! Dense complex eigenvalues: permutation/scaling balance, Householder
//! reduction to Hessenberg form, then single-shift QR with Wilkinson and
//! exceptional shifts and Ahues–Tisseur deflation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const EXCEPTIONAL_PERIOD: usize = 10;
const EXCEPTIONAL_FACTOR: f64 = 0.75;

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Column-major square work matrix.
struct Work {
    n: usize,
    a: Vec<Complex64>,
}

impl Work {
    fn from_dense(m: &DMatrix<Complex64>) -> Self {
        Self {
            n: m.nrows(),
            a: m.as_slice().to_vec(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i + j * self.n]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.a[i + j * self.n]
    }

    fn swap_index(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = self.n;
        for c in 0..n {
            self.a.swap(i + c * n, j + c * n);
        }
        for r in 0..n {
            self.a.swap(r + i * n, r + j * n);
        }
    }

    fn submatrix(&self, lo: usize, hi: usize) -> Work {
        let m = hi + 1 - lo;
        let mut a = Vec::with_capacity(m * m);
        for j in lo..=hi {
            a.extend_from_slice(&self.a[lo + j * self.n..=hi + j * self.n]);
        }
        Work { n: m, a }
    }
}

/// All eigenvalues of a square complex matrix, with algebraic multiplicity.
///
/// Fails with [`Error::NoConvergence`] (carrying the eigenvalues found so
/// far) if the QR iteration stalls.
pub fn eig_dense(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w = Work::from_dense(m);
    let (lo, hi) = isolate(&mut w);
    let mut out: Vec<Complex64> = (0..lo).chain(hi + 1..n).map(|i| w.at(i, i)).collect();
    if lo <= hi {
        let mut core = w.submatrix(lo, hi);
        scale(&mut core);
        hessenberg(&mut core);
        match hessenberg_qr(&mut core) {
            Ok(eigs) => out.extend(eigs),
            Err(partial) => {
                out.extend(partial);
                return Err(Error::NoConvergence {
                    size: n,
                    partial: out,
                });
            }
        }
    }
    Ok(out)
}

/// Permutes rows/columns with vanishing off-diagonal parts to the ends,
/// returning the remaining active range `[lo, hi]` (empty when `lo > hi`).
fn isolate(w: &mut Work) -> (usize, usize) {
    let n = w.n;
    let mut lo = 0usize;
    let mut hi = n - 1;
    // rows with zero off-diagonal in columns lo..=hi go to the bottom
    while let Some(j) = (lo..=hi)
        .rev()
        .find(|&j| (lo..=hi).all(|c| c == j || w.at(j, c) == ZERO))
    {
        w.swap_index(j, hi);
        if hi == lo {
            return (lo + 1, lo);
        }
        hi -= 1;
    }
    // columns with zero off-diagonal in rows lo..=hi go to the top
    while let Some(j) = (lo..=hi).find(|&j| (lo..=hi).all(|r| r == j || w.at(r, j) == ZERO)) {
        w.swap_index(j, lo);
        lo += 1;
        if lo > hi {
            return (lo, hi);
        }
    }
    (lo, hi)
}

/// Diagonal similarity by powers of two that equalizes row and column norms.
fn scale(w: &mut Work) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let n = w.n;
    for _ in 0..100 {
        let mut noconv = false;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(w.at(j, i));
                    r += cabs1(w.at(i, j));
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                noconv = true;
                let g = 1.0 / f;
                for j in 0..n {
                    *w.at_mut(i, j) *= g;
                    *w.at_mut(j, i) *= f;
                }
            }
        }
        if !noconv {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity only, no
/// accumulation). Columns already in Hessenberg form are skipped.
fn hessenberg(w: &mut Work) {
    let n = w.n;
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut tmp = vec![ZERO; n];
    for k in 0..n - 2 {
        let below: f64 = (k + 2..n).map(|i| w.at(i, k).norm_sqr()).sum();
        if below == 0.0 {
            continue;
        }
        let x0 = w.at(k + 1, k);
        let xnorm = (below + x0.norm_sqr()).sqrt();
        let phase = if x0 == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + phase ‖x‖ e₁, H = I − 2 v vᴴ / (vᴴ v)
        let m = n - k - 1;
        v[0] = x0 + phase * xnorm;
        for (i, vi) in v.iter_mut().enumerate().take(m).skip(1) {
            *vi = w.at(k + 1 + i, k);
        }
        let vnorm2: f64 = v[..m].iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;
        // left: rows k+1.., columns k..
        for j in k..n {
            let col = &mut w.a[j * n + k + 1..j * n + n];
            let s: Complex64 = v[..m]
                .iter()
                .zip(col.iter())
                .map(|(vi, ci)| vi.conj() * ci)
                .sum();
            let s = s * tau;
            for (ci, vi) in col.iter_mut().zip(&v[..m]) {
                *ci -= vi * s;
            }
        }
        // right: all rows, columns k+1..
        tmp.iter_mut().for_each(|t| *t = ZERO);
        for (jj, &vj) in v.iter().enumerate().take(m) {
            let col = &w.a[(k + 1 + jj) * n..(k + 2 + jj) * n];
            for (t, c) in tmp.iter_mut().zip(col) {
                *t += c * vj;
            }
        }
        for (jj, vj) in v.iter().enumerate().take(m) {
            let vj = vj.conj() * tau;
            let col = &mut w.a[(k + 1 + jj) * n..(k + 2 + jj) * n];
            for (c, t) in col.iter_mut().zip(&tmp) {
                *c -= t * vj;
            }
        }
        *w.at_mut(k + 1, k) = -phase * xnorm;
        for i in k + 2..n {
            *w.at_mut(i, k) = ZERO;
        }
    }
}

/// `(c, s, r)` with `[c s; −s̄ c] [f; g] = [r; 0]`.
#[inline]
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64, Complex64) {
    if g == ZERO {
        return (1.0, ZERO, f);
    }
    if f == ZERO {
        let ga = g.norm();
        return (0.0, g.conj() / ga, Complex64::new(ga, 0.0));
    }
    let fa = f.norm();
    let norm = fa.hypot(g.norm());
    let fs = f / fa;
    (fa / norm, fs * g.conj() / norm, fs * norm)
}

/// Eigenvalues of an upper Hessenberg matrix. On failure returns the
/// eigenvalues deflated so far.
fn hessenberg_qr(h: &mut Work) -> std::result::Result<Vec<Complex64>, Vec<Complex64>> {
    let n = h.n;
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let itmax = 30 * n.max(10);
    let mut eigs = Vec::with_capacity(n);
    let mut kdefl = 0usize;
    let mut i = n as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut deflated = false;
        for _ in 0..=itmax {
            let mut k = iu;
            while k > l {
                let sub = h.at(k, k - 1);
                if cabs1(sub) <= smlnum {
                    break;
                }
                let mut tst = cabs1(h.at(k - 1, k - 1)) + cabs1(h.at(k, k));
                if tst == 0.0 {
                    if k >= l + 2 {
                        tst += h.at(k - 1, k - 2).re.abs();
                    }
                    if k < iu {
                        tst += h.at(k + 1, k).re.abs();
                    }
                }
                if cabs1(sub) <= ulp * tst {
                    let up = h.at(k - 1, k);
                    let ab = cabs1(sub).max(cabs1(up));
                    let ba = cabs1(sub).min(cabs1(up));
                    let d = h.at(k - 1, k - 1) - h.at(k, k);
                    let aa = cabs1(h.at(k, k)).max(cabs1(d));
                    let bb = cabs1(h.at(k, k)).min(cabs1(d));
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                *h.at_mut(l, l - 1) = ZERO;
            }
            if l >= iu {
                deflated = true;
                break;
            }
            kdefl += 1;

            let shift = if kdefl.is_multiple_of(2 * EXCEPTIONAL_PERIOD) {
                h.at(iu, iu) + EXCEPTIONAL_FACTOR * h.at(iu, iu - 1).re.abs()
            } else if kdefl.is_multiple_of(EXCEPTIONAL_PERIOD) {
                h.at(l, l) + EXCEPTIONAL_FACTOR * h.at(l + 1, l).re.abs()
            } else {
                wilkinson_shift(h, iu)
            };

            for k in l..iu {
                let (f, g) = if k == l {
                    (h.at(l, l) - shift, h.at(l + 1, l))
                } else {
                    (h.at(k, k - 1), h.at(k + 1, k - 1))
                };
                let (c, s, r) = givens(f, g);
                let first_col = if k > l {
                    *h.at_mut(k, k - 1) = r;
                    *h.at_mut(k + 1, k - 1) = ZERO;
                    k
                } else {
                    l
                };
                for j in first_col..=iu {
                    let x = h.at(k, j);
                    let y = h.at(k + 1, j);
                    *h.at_mut(k, j) = x * c + s * y;
                    *h.at_mut(k + 1, j) = -s.conj() * x + y * c;
                }
                let last_row = (k + 2).min(iu);
                let sc = s.conj();
                let nn = h.n;
                let (left, right) = h.a.split_at_mut((k + 1) * nn);
                let colk = &mut left[k * nn + l..=k * nn + last_row];
                let colk1 = &mut right[l..=last_row];
                for (x, y) in colk.iter_mut().zip(colk1.iter_mut()) {
                    let (xv, yv) = (*x, *y);
                    *x = xv * c + sc * yv;
                    *y = -s * xv + yv * c;
                }
            }
        }
        if !deflated {
            return Err(eigs);
        }
        eigs.push(h.at(iu, iu));
        kdefl = 0;
        i = iu as isize - 1;
    }
    Ok(eigs)
}

fn wilkinson_shift(h: &Work, i: usize) -> Complex64 {
    let mut t = h.at(i, i);
    let u = h.at(i - 1, i).sqrt() * h.at(i, i - 1).sqrt();
    let mut s = cabs1(u);
    if s != 0.0 {
        let x = (h.at(i - 1, i - 1) - t) * 0.5;
        let sx = cabs1(x);
        s = s.max(sx);
        let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        t -= u * (u / (x + y));
    }
    t
}
