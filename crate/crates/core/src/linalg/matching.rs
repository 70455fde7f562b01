use num_complex::Complex64;

/// Result of pairing two multisets of complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct MultisetMatch {
    /// `pairs[i] = j` pairs `a[i]` with `b[j]`.
    pub pairs: Vec<usize>,
    /// Largest paired distance.
    pub max_distance: f64,
    /// Index into `a` of the worst pair.
    pub worst: Option<usize>,
    pub used_hungarian: bool,
}

impl MultisetMatch {
    pub fn within(&self, tol: f64) -> bool {
        self.max_distance <= tol
    }
}

/// Pairs `a` with `b` (same length) by greedy nearest neighbour, falling
/// back to a minimum-cost assignment when the greedy pairing exceeds `tol`.
///
/// Returns `None` when the lengths differ.
pub fn match_multisets(a: &[Complex64], b: &[Complex64], tol: f64) -> Option<MultisetMatch> {
    if a.len() != b.len() {
        return None;
    }
    let greedy = greedy_match(a, b);
    if greedy.within(tol) || a.len() > HUNGARIAN_LIMIT {
        return Some(greedy);
    }
    let pairs = hungarian(a, b);
    let hung = summarize(a, b, pairs, true);
    Some(if hung.max_distance < greedy.max_distance {
        hung
    } else {
        greedy
    })
}

/// Beyond this size the cubic assignment is skipped.
const HUNGARIAN_LIMIT: usize = 1500;

fn summarize(
    a: &[Complex64],
    b: &[Complex64],
    pairs: Vec<usize>,
    used_hungarian: bool,
) -> MultisetMatch {
    let mut max_distance = 0.0;
    let mut worst = None;
    for (i, &j) in pairs.iter().enumerate() {
        let d = (a[i] - b[j]).norm();
        if d > max_distance || worst.is_none() {
            max_distance = d.max(max_distance);
            worst = Some(i);
        }
    }
    MultisetMatch {
        pairs,
        max_distance,
        worst,
        used_hungarian,
    }
}

fn greedy_match(a: &[Complex64], b: &[Complex64]) -> MultisetMatch {
    let n = a.len();
    let mut used = vec![false; n];
    let mut pairs = vec![0; n];
    // visit a in lexicographic order so ties resolve deterministically
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i].re
            .total_cmp(&a[j].re)
            .then(a[i].im.total_cmp(&a[j].im))
    });
    for i in order {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, bj) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (a[i] - bj).norm();
            if d < best_d || best == usize::MAX {
                best = j;
                best_d = d;
            }
        }
        used[best] = true;
        pairs[i] = best;
    }
    summarize(a, b, pairs, false)
}

/// Minimum total-distance assignment (Kuhn–Munkres with potentials).
fn hungarian(a: &[Complex64], b: &[Complex64]) -> Vec<usize> {
    let n = a.len();
    let cost = |i: usize, j: usize| (a[i] - b[j]).norm();
    // 1-based arrays; column 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut pairs = vec![0; n];
    for j in 1..=n {
        pairs[p[j] - 1] = j - 1;
    }
    pairs
}
