//! Acceptance criteria 1-12, one PASS/FAIL line each.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use euler_spectrum::coefficients::{beta, slice_coefficients};
use euler_spectrum::evolution::{spectral_mapping_check, EvolutionSettings, FLAT_RATE};
use euler_spectrum::exec::ExecMode;
use euler_spectrum::lattice::{
    contributing_slices, det2, enumerate_representatives, kappa, slice_representative,
};
use euler_spectrum::linalg::eig_dense;
use euler_spectrum::operators::{
    all_negative_signature, build_bq, build_lq, build_m0, build_mq, build_signature, Window,
};
use euler_spectrum::spectra::{
    check_symmetry, decomposition_crosscheck, essential_coverage, nonimaginary_spectrum,
    off_zero_mismatch, resolvent_report, slice_spectrum, SpectrumReport, SYMMETRY_TOL,
};
use euler_spectrum::{Circulation, Complex64, LatticeVector, ProblemInstance, SliceDescriptor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn v(x: i64, y: i64) -> LatticeVector {
    LatticeVector::new(x, y)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn inst(p: LatticeVector, g: Circulation) -> ProblemInstance {
    ProblemInstance::new(p, g).unwrap()
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const BATTERY_P: [(i64, i64); 6] = [(1, 1), (0, 2), (2, 0), (2, 1), (1, 2), (2, 2)];

fn battery_gammas() -> [Circulation; 4] {
    [
        Circulation::new(1.0, 0.0),
        Circulation::new(0.0, 1.0),
        Circulation::new(1.0, 1.0),
        Circulation::new(2.0, 0.0),
    ]
}

/// `p` with `‖p‖ ≤ 10`, `p ≠ 0`.
fn disk_of_directions() -> Vec<LatticeVector> {
    let mut out = Vec::new();
    for x in -10i64..=10 {
        for y in -10i64..=10 {
            if (x, y) != (0, 0) && x * x + y * y <= 100 {
                out.push(v(x, y));
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for p in disk_of_directions() {
        let r2 = p.x * p.x + p.y * p.y;
        let mut brute = 0usize;
        for x in -11i64..=11 {
            for y in -11i64..=11 {
                if x * x + y * y < r2 && x * p.y - y * p.x != 0 {
                    brute += 1;
                }
            }
        }
        let k = kappa(p).unwrap();
        ensure!(k == brute, "kappa{p} = {k}, brute force {brute}");
        ensure!(k.is_multiple_of(2), "kappa{p} = {k} is odd");
        let total: usize = contributing_slices(p)
            .unwrap()
            .iter()
            .map(|s| s.in_disk_count())
            .sum();
        ensure!(
            total == k,
            "window lengths at {p} sum to {total}, kappa {k}"
        );
        checked += 1;
    }
    let named = [(v(0, 1), 0), (v(1, 1), 4), (v(0, 2), 6), (v(2, 1), 12)];
    for (p, want) in named {
        ensure!(kappa(p).unwrap() == want, "kappa{p} != {want}");
    }
    Ok(format!("{checked} directions, named values 0/4/6/12"))
}

struct RandomCase {
    inst: ProblemInstance,
    slice: SliceDescriptor,
    window: Window,
}

fn random_cases(count: usize) -> Vec<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = v(rng.random_range(-3..=3), rng.random_range(-3..=3));
        if p.is_zero() {
            continue;
        }
        let q = v(rng.random_range(-8..=8), rng.random_range(-8..=8));
        if det2(q, p) == 0 {
            continue;
        }
        let g = Circulation::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let n = rng.random_range(8..=256usize);
        out.push(RandomCase {
            inst: inst(p, g),
            slice: SliceDescriptor::containing(q, p).unwrap(),
            window: Window::symmetric(n),
        });
    }
    out
}

fn criterion_2() -> Outcome {
    let cases = random_cases(50);
    let mut worst: f64 = 0.0;
    for case in &cases {
        let w = case.window;
        let coeffs = slice_coefficients(&case.inst, &case.slice, (w.lo, w.hi)).unwrap();
        let b = build_bq(&coeffs, w).unwrap();
        let m = build_mq(&coeffs, w).unwrap();
        let l = build_lq(&coeffs, w).unwrap();
        let m0 = build_m0(coeffs.alpha, w).unwrap();
        let j = if case.slice.window.is_some() {
            build_signature(&case.slice, w).unwrap()
        } else {
            all_negative_signature(w)
        };
        let delta: Vec<Complex64> = w.indices().map(|n| coeffs.delta(n)).collect();
        let opg: Vec<Complex64> = w
            .indices()
            .map(|n| c(coeffs.one_plus_gamma(n), 0.0))
            .collect();
        let ones = vec![c(1.0, 0.0); w.len()];

        let rel = |x: f64, scale: f64| x / scale.max(f64::MIN_POSITIVE);
        let e1 = rel(j.conjugate(&b).max_entry_diff(&b.adjoint()), b.max_abs());
        let e2 = rel(
            l.max_entry_diff(&m.scale(c(0.0, -coeffs.beta_abs()))),
            l.max_abs(),
        );
        let e3 = rel(b.max_entry_diff(&m0.sandwich(&delta, &delta)), b.max_abs());
        let e4 = rel(m.max_entry_diff(&m0.sandwich(&ones, &opg)), m.max_abs());
        let e = e1.max(e2).max(e3).max(e4);
        ensure!(
            e <= 1e-14,
            "p={} qhat={} N={}: JBJ {e1:.1e}, L {e2:.1e}, B {e3:.1e}, M {e4:.1e}",
            case.inst.p,
            case.slice.qhat,
            w.hi
        );
        worst = worst.max(e);
    }
    Ok(format!("50 cases, worst relative entry error {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let cases = random_cases(50);
    let results: Vec<Result<f64, String>> = ExecMode::Parallel.map(&cases, |case| {
        let w = case.window;
        let coeffs = slice_coefficients(&case.inst, &case.slice, (w.lo, w.hi)).unwrap();
        let em = eig_dense(&build_mq(&coeffs, w).unwrap().to_dense()).map_err(|e| e.to_string())?;
        let eb = eig_dense(&build_bq(&coeffs, w).unwrap().to_dense()).map_err(|e| e.to_string())?;
        let d = off_zero_mismatch(&em, &eb, 1e-8, 1e-6);
        if d <= 1e-8 {
            Ok(d)
        } else {
            Err(format!(
                "p={} qhat={} N={}: distance {d:.2e}",
                case.inst.p, case.slice.qhat, w.hi
            ))
        }
    });
    let mut worst: f64 = 0.0;
    for r in results {
        worst = worst.max(r?);
    }
    Ok(format!(
        "50 cases, worst nonzero-eigenvalue distance {worst:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    let gammas = [
        Circulation::new(1.0, 0.0),
        Circulation::new(0.3, -1.7),
        Circulation::new(0.0, 2.0),
    ];
    let mut picked = Vec::new();
    // includes boundary slices with ‖q̂‖ = ‖p‖
    for (i, &(px, py)) in [(1, 0), (0, 2), (1, 1), (2, 1), (1, 3)].iter().enumerate() {
        let p = v(px, py);
        let mut reps: Vec<SliceDescriptor> = enumerate_representatives(p, 4.0)
            .unwrap()
            .into_iter()
            .filter(|s| s.qhat.norm_sq() >= p.norm_sq())
            .collect();
        reps.truncate(4);
        for s in reps {
            picked.push((inst(p, gammas[i % gammas.len()]), s));
        }
    }
    ensure!(picked.len() >= 20, "only {} slices", picked.len());
    picked.truncate(20);
    let boundary = picked
        .iter()
        .filter(|(i, s)| s.qhat.norm_sq() == i.p.norm_sq())
        .count();
    let results: Vec<(f64, f64)> = ExecMode::Parallel.map(&picked, |(i, s)| {
        let sp = slice_spectrum(i, s, 256).unwrap();
        let re = sp
            .eigenvalues
            .iter()
            .map(|z| z.re.abs())
            .fold(0.0, f64::max);
        (re, sp.beta_abs)
    });
    let mut worst: f64 = 0.0;
    for (k, &(re, b)) in results.iter().enumerate() {
        ensure!(
            re <= 1e-10 * b,
            "slice {} of p={}: max |Re| {re:.2e}, |beta| {b}",
            picked[k].1.qhat,
            picked[k].0.p
        );
        worst = worst.max(re / b);
    }
    Ok(format!(
        "20 slices ({boundary} on the circle), worst max|Re|/|beta| {worst:.1e}"
    ))
}

fn battery() -> Vec<SpectrumReport> {
    let mut instances = Vec::new();
    for &(x, y) in &BATTERY_P {
        for g in battery_gammas() {
            instances.push(inst(v(x, y), g));
        }
    }
    instances
        .iter()
        .map(|i| nonimaginary_spectrum(i).expect("spectrum"))
        .collect()
}

fn criterion_5(reports: &[SpectrumReport]) -> Outcome {
    let mut summary = Vec::new();
    for r in reports {
        ensure!(
            r.converged,
            "p={} gamma={} did not converge",
            r.instance.p,
            r.instance.gamma.0
        );
        ensure!(
            r.bound_ok && r.count <= 2 * r.kappa,
            "p={} gamma={}: count {} > 2 kappa = {}",
            r.instance.p,
            r.instance.gamma.0,
            r.count,
            2 * r.kappa
        );
        summary.push(format!("{}:{}/{}", r.instance.p, r.count, 2 * r.kappa));
    }
    summary.dedup();
    Ok(format!(
        "24 instances converged, count/2kappa {}",
        summary.join(" ")
    ))
}

fn criterion_6(reports: &[SpectrumReport]) -> Outcome {
    let mut quads = 0;
    for r in reports {
        let vals = r.nonimaginary_values();
        ensure!(
            r.symmetry_ok && check_symmetry(&vals, SYMMETRY_TOL),
            "p={} gamma={} not symmetric",
            r.instance.p,
            r.instance.gamma.0
        );
        quads += vals.iter().filter(|z| z.re > 0.0 && z.im > 0.0).count();
    }
    Ok(format!(
        "24 instances symmetric at {SYMMETRY_TOL:e}, {quads} genuine quadruples"
    ))
}

/// Pinned constant in `max_gap ≤ C/N`.
const COVERAGE_C: f64 = 2.0 * std::f64::consts::PI;

fn criterion_7() -> Outcome {
    let cases = [
        (v(0, 2), v(3, 0), Circulation::new(1.0, 0.0)),
        (v(0, 2), v(2, 1), Circulation::new(0.0, 1.0)),
        (v(1, 1), v(2, -1), Circulation::new(1.0, 1.0)),
        (v(2, 1), v(0, 3), Circulation::new(2.0, 0.0)),
        (v(1, 0), v(0, 1), Circulation::new(1.0, 0.0)),
    ];
    let mut lines = Vec::new();
    for (p, q, g) in cases {
        let i = inst(p, g);
        let s = SliceDescriptor::containing(q, p).unwrap();
        let c100 = essential_coverage(&i, &s, 100).map_err(|e| e.to_string())?;
        let c200 = essential_coverage(&i, &s, 200).map_err(|e| e.to_string())?;
        ensure!(
            c100.max_gap <= COVERAGE_C / 100.0,
            "{q}: gap {} at N=100",
            c100.max_gap
        );
        ensure!(
            c200.max_gap <= COVERAGE_C / 200.0,
            "{q}: gap {} at N=200",
            c200.max_gap
        );
        let ratio = c200.max_gap / c100.max_gap;
        ensure!((0.4..=0.6).contains(&ratio), "{q}: gap ratio {ratio}");
        for cov in [c100, c200] {
            ensure!(
                cov.lowest >= -2.0 - 1e-12 && cov.highest <= 2.0 + 1e-12,
                "{q}: eigenvalues leave [-2, 2]"
            );
        }
        let (e100, e200) = (
            2.0 - c100.highest.max(-c100.lowest),
            2.0 - c200.highest.max(-c200.lowest),
        );
        ensure!(
            e200 <= 0.5 * e100,
            "{q}: endpoint error {e100:.2e} -> {e200:.2e}"
        );
        lines.push(format!("{q} ratio {ratio:.3}"));
    }
    Ok(format!("C = 2pi, {}", lines.join(", ")))
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    for p in [v(1, 1), v(0, 2)] {
        let r = decomposition_crosscheck(&inst(p, Circulation::new(1.0, 1.0)), 8)
            .map_err(|e| e.to_string())?;
        ensure!(
            r.ok && r.max_distance <= 1e-9,
            "p={p}: distance {:.2e}, worst {:?}",
            r.max_distance,
            r.worst_slices.first()
        );
        parts.push(format!(
            "p={p} {} modes, {} slices, {:.1e}",
            r.modes, r.slices, r.max_distance
        ));
    }
    Ok(parts.join("; "))
}

/// Converged unstable eigenvalues for `p = (0, 2)`, `Γ = 2`.
const GOLDEN_REAL: f64 = 0.522_498_479_150_74;
const GOLDEN_QUAD: (f64, f64) = (0.248_223_018_041_11, 0.351_720_764_585_45);

fn criterion_9() -> Outcome {
    let i = inst(v(0, 2), Circulation::new(2.0, 0.0));
    let mut moved: f64 = 0.0;
    let mut found_quad = false;
    let mut found_real = false;
    for s in contributing_slices(i.p).unwrap() {
        let (a, b) = (
            slice_spectrum(&i, &s, 200).unwrap(),
            slice_spectrum(&i, &s, 400).unwrap(),
        );
        let thr = i.controls.classification_threshold(a.beta_abs);
        let (na, nb) = (a.nonimaginary(thr), b.nonimaginary(thr));
        let m = euler_spectrum::linalg::match_multisets(&na, &nb, 1e-6).ok_or_else(|| {
            format!(
                "slice {}: {} vs {} nonimaginary",
                s.qhat,
                na.len(),
                nb.len()
            )
        })?;
        moved = moved.max(m.max_distance);
        if na.len() == 4 && check_symmetry(&na, 1e-9) {
            let quad = [
                c(GOLDEN_QUAD.0, GOLDEN_QUAD.1),
                c(-GOLDEN_QUAD.0, GOLDEN_QUAD.1),
                c(GOLDEN_QUAD.0, -GOLDEN_QUAD.1),
                c(-GOLDEN_QUAD.0, -GOLDEN_QUAD.1),
            ];
            found_quad |= euler_spectrum::linalg::match_multisets(&na, &quad, 1e-12)
                .is_some_and(|m| m.within(1e-12));
        }
        if na.len() == 2 {
            found_real |= na
                .iter()
                .all(|z| (z.re.abs() - GOLDEN_REAL).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }
    ensure!(moved <= 1e-6, "N=200 vs N=400 movement {moved:.2e}");
    ensure!(found_quad, "golden quadruple not found");
    ensure!(found_real, "golden real pair not found");

    let settings = EvolutionSettings {
        t_final: 40.0,
        trials: 3,
        seed: 7,
        ..EvolutionSettings::default()
    };
    let r =
        spectral_mapping_check(&i, 16, &settings, ExecMode::Parallel).map_err(|e| e.to_string())?;
    let abscissa = r.spectral_abscissa.ok_or("no nonimaginary eigenvalues")?;
    ensure!((abscissa - GOLDEN_REAL).abs() < 1e-9, "abscissa {abscissa}");
    for rate in r.rates() {
        ensure!(
            (rate - abscissa).abs() <= 0.05 * abscissa,
            "growth rate {rate} vs {abscissa}"
        );
    }
    Ok(format!(
        "movement {moved:.1e}, max Re {abscissa:.12}, K=16 rates {:?}",
        r.rates()
            .iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
    ))
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    for g in [Circulation::new(1.0, 0.0), Circulation::new(2.0, -1.0)] {
        let i = inst(v(0, 1), g);
        let rep = nonimaginary_spectrum(&i).map_err(|e| e.to_string())?;
        ensure!(
            rep.kappa == 0 && rep.nonimaginary.is_empty(),
            "gamma={}: nonempty set",
            g.0
        );
        let settings = EvolutionSettings {
            t_final: 100.0,
            trials: 3,
            seed: 11,
            ..EvolutionSettings::default()
        };
        let r = spectral_mapping_check(&i, 16, &settings, ExecMode::Parallel)
            .map_err(|e| e.to_string())?;
        let worst = r.rates().into_iter().fold(f64::NEG_INFINITY, f64::max);
        ensure!(r.ok && worst <= FLAT_RATE, "gamma={}: rate {worst}", g.0);
        parts.push(format!("gamma={} max rate {worst:.1e}", g.0));
    }
    Ok(parts.join("; "))
}

fn criterion_11() -> Outcome {
    let taus: Vec<f64> = (0..=20).map(|k| 5.0 * k as f64).collect();
    let r = resolvent_report(
        &inst(v(0, 2), Circulation::new(1.0, 0.0)),
        16,
        0.5,
        &taus,
        ExecMode::Parallel,
    )
    .map_err(|e| e.to_string())?;
    ensure!(r.far_field_ok, "far-field bound violated");
    ensure!(r.tail_ok, "tail exceeds the near samples: {:?}", r.samples);
    let near = r
        .samples
        .iter()
        .zip(&taus)
        .filter(|(_, t)| **t < 20.0)
        .map(|(s, _)| *s)
        .fold(0.0, f64::max);
    let far = r
        .samples
        .iter()
        .zip(&taus)
        .filter(|(_, t)| **t >= 20.0)
        .map(|(s, _)| *s)
        .fold(0.0, f64::max);
    let outer = r.outer_slice_samples.iter().copied().fold(0.0, f64::max);
    Ok(format!(
        "max near {near:.3}, max tail {far:.3}, |L| {:.3}; outer slices {outer:.3} vs 2/|a| = {}",
        r.operator_norm, r.outer_slice_bound
    ))
}

fn criterion_12() -> Outcome {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for &(x, y) in &BATTERY_P {
        let p = v(x, y);
        for g in battery_gammas() {
            let i = inst(p, g);
            for s in enumerate_representatives(p, 20.0).unwrap() {
                let coeffs = slice_coefficients(&i, &s, (-64, 64)).unwrap();
                let sup = coeffs.gamma_seq.iter().map(|x| x.abs()).fold(0.0, f64::max);
                let lhs = beta(p, s.qhat, g).norm() * sup;
                let rhs = g.abs() * p.norm() / 2.0 / s.qhat.norm();
                ensure!(
                    lhs <= rhs * (1.0 + 1e-12),
                    "p={p} qhat={}: {lhs} > {rhs}",
                    s.qhat
                );
                ensure!(
                    slice_representative(s.qhat, p).unwrap() == s.qhat,
                    "not a representative"
                );
                worst = worst.max(lhs / rhs);
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} (p, gamma, qhat) triples, max ratio {worst:.6}"
    ))
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if elapsed <= budget => (true, d),
        Ok(d) => (false, format!("{d}; over time budget {budget:?}")),
        Err(e) => (false, e),
    };
    println!(
        "criterion {id:>2} {:<4} {name} ({:.2}s): {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

fn main() {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= run(1, "kappa oracle", secs(1), criterion_1);
    ok &= run(2, "exact operator algebra", secs(5), criterion_2);
    ok &= run(3, "nonzero spectra of M_q and B_q", secs(120), criterion_3);
    ok &= run(
        4,
        "outer slices on the imaginary axis",
        secs(120),
        criterion_4,
    );
    let start = Instant::now();
    let reports = catch_unwind(battery).ok();
    let battery_time = start.elapsed();
    println!("battery: 24 spectra in {:.2}s", battery_time.as_secs_f64());
    let with_reports = |f: fn(&[SpectrumReport]) -> Outcome| {
        let r = reports.as_deref();
        move || match r {
            Some(r) => f(r),
            None => Err("battery computation failed".into()),
        }
    };
    ok &= run(
        5,
        "2 kappa bound",
        secs(600).saturating_sub(battery_time),
        with_reports(criterion_5),
    );
    ok &= run(
        6,
        "four-fold symmetry",
        secs(600),
        with_reports(criterion_6),
    );
    ok &= run(7, "essential spectrum coverage", secs(120), criterion_7);
    ok &= run(8, "box operator decomposition", secs(60), criterion_8);
    ok &= run(9, "instability witness", secs(300), criterion_9);
    ok &= run(10, "stability witness", secs(300), criterion_10);
    ok &= run(11, "resolvent boundedness", secs(120), criterion_11);
    ok &= run(12, "beta-gamma decay constant", secs(60), criterion_12);
    if !ok {
        std::process::exit(1);
    }
}
