use euler_spectrum::coefficients::slice_coefficients;
use euler_spectrum::operators::{build_bq, build_lq, with_provenance, TridiagonalOperator, Window};
use euler_spectrum::{Circulation, Complex64, LatticeVector, ProblemInstance, SliceDescriptor};

fn kolmogorov() -> (ProblemInstance, SliceDescriptor, Window) {
    let inst = ProblemInstance::new(LatticeVector::new(0, 2), Circulation::new(1.0, 0.0)).unwrap();
    let s = SliceDescriptor::containing(LatticeVector::new(1, 0), inst.p).unwrap();
    (inst, s, Window::symmetric(2))
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn bq_matches_golden_file() {
    let (inst, s, w) = kolmogorov();
    let c = slice_coefficients(&inst, &s, (w.lo, w.hi)).unwrap();
    let op = with_provenance(build_bq(&c, w).unwrap(), &inst, &s, &c);
    assert_eq!(op.to_json().unwrap() + "\n", golden("bq_kolmogorov.json"));

    // ‖(1, 2n)‖² = 1 + 4n², δ₋₂ = √(13/17), δ₋₁ = √(1/5), δ₀ = i√3, α = −i
    let back: TridiagonalOperator = serde_json::from_str(&golden("bq_kolmogorov.json")).unwrap();
    let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-15;
    assert!(close(
        back.entry(-1, -2),
        Complex64::new(0.0, -(13.0f64 / 85.0).sqrt())
    ));
    assert!(close(
        back.entry(0, -1),
        Complex64::new((3.0f64 / 5.0).sqrt(), 0.0)
    ));
    assert!(close(
        back.entry(-1, 0),
        Complex64::new(-(3.0f64 / 5.0).sqrt(), 0.0)
    ));
    assert_eq!(back.entry(0, 2), Complex64::new(0.0, 0.0));
}

#[test]
fn lq_matches_golden_file() {
    let (inst, s, w) = kolmogorov();
    let c = slice_coefficients(&inst, &s, (w.lo, w.hi)).unwrap();
    let op = with_provenance(build_lq(&c, w).unwrap(), &inst, &s, &c);
    assert_eq!(op.to_json().unwrap() + "\n", golden("lq_kolmogorov.json"));

    // L(n, n∓1) = ±β(1 + γ_{n∓1}), β = −1/4, γ₀ = −4, γ±₁ = −4/5
    let back: TridiagonalOperator = serde_json::from_str(&golden("lq_kolmogorov.json")).unwrap();
    let close = |a: Complex64, re: f64| (a - Complex64::new(re, 0.0)).norm() < 1e-15;
    assert!(close(back.entry(1, 0), 0.75));
    assert!(close(back.entry(-1, 0), -0.75));
    assert!(close(back.entry(0, 1), 0.05));
    assert!(close(back.entry(0, -1), -0.05));
    assert!(close(back.entry(-1, -2), -0.25 * 13.0 / 17.0));
}
