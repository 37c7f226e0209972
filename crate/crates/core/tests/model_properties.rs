use gauss_quad::GaussLegendre;
use kirchhoff_core::model::{Hypothesis, SamplingSpec, Status};
use kirchhoff_core::{validate_hypotheses, KirchhoffCoefficient, Nonlinearity};
use proptest::prelude::*;

/// Composite 20-point Gauss–Legendre rule on `panels` equal panels.
fn gl(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(20).unwrap();
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| rule.integrate(a + k as f64 * w, a + (k + 1) as f64 * w, &f))
        .sum()
}

fn builtin_coefficients() -> Vec<KirchhoffCoefficient<f64>> {
    vec![
        KirchhoffCoefficient::constant(1.0).unwrap(),
        KirchhoffCoefficient::affine(1.0, 2.0).unwrap(),
        KirchhoffCoefficient::affine(0.3, 0.05).unwrap(),
        KirchhoffCoefficient::logarithmic(),
    ]
}

fn builtin_nonlinearities() -> Vec<Nonlinearity<f64>> {
    vec![
        Nonlinearity::paper_example(1.0).unwrap(),
        Nonlinearity::paper_example(2.5).unwrap(),
        Nonlinearity::power(3.0).unwrap(),
        Nonlinearity::power(4.5).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn primitive_matches_quadrature(t in 0.0f64..100.0) {
        for coef in builtin_coefficients() {
            let exact = coef.eval_M(t).unwrap();
            let oracle = gl(0.0, t, 40, |s| coef.eval_m(s).unwrap());
            prop_assert!((exact - oracle).abs() <= 1e-10 * oracle.abs().max(1e-300),
                "{:?} t={} M={} quad={}", coef.kind(), t, exact, oracle);
        }
    }

    #[test]
    fn f_is_derivative_of_big_f(s in 1e-3f64..10.0) {
        let x = [0.1, 0.2];
        for nl in builtin_nonlinearities() {
            let step = 1e-6 * s;
            let fd = (nl.eval_F(x, s + step).unwrap() - nl.eval_F(x, s - step).unwrap()) / (2.0 * step);
            let f = nl.eval_f(x, s).unwrap();
            prop_assert!((fd - f).abs() <= 1e-6 * f.abs(), "{:?} s={} fd={} f={}", nl.kind(), s, fd, f);
        }
    }

    #[test]
    fn nonpositive_arguments_vanish(s in -50.0f64..=0.0) {
        for nl in builtin_nonlinearities() {
            prop_assert_eq!(nl.eval_f([0.0, 0.0], s).unwrap(), 0.0);
            prop_assert_eq!(nl.eval_F([0.0, 0.0], s).unwrap(), 0.0);
        }
    }

    #[test]
    fn kirchhoff_term_is_superadditive_and_increasing(t in 0.0f64..50.0, s in 0.0f64..50.0) {
        for coef in builtin_coefficients() {
            let (mt, ms, mts) = (coef.eval_M(t).unwrap(), coef.eval_M(s).unwrap(), coef.eval_M(t + s).unwrap());
            prop_assert!(mts >= mt + ms - 1e-12 * mts);
            if s > 0.0 {
                prop_assert!(mts > mt);
            }
        }
    }
}

#[test]
fn sf_minus_4f_is_increasing_and_nonnegative() {
    let nl = Nonlinearity::paper_example(1.0).unwrap();
    let x = [0.0, 0.0];
    let g = |s: f64| s * nl.eval_f(x, s).unwrap() - 4.0 * nl.eval_F(x, s).unwrap();
    let mut prev = g(0.0);
    assert_eq!(prev, 0.0);
    for k in 1..=4000 {
        let s = 20.0 * k as f64 / 4000.0;
        let v = g(s);
        assert!(v >= 0.0, "sf − 4F < 0 at s = {s}");
        assert!(v >= prev, "sf − 4F decreases at s = {s}");
        prev = v;
    }
}

#[test]
fn half_m_minus_quarter_mt_is_nonnegative() {
    for coef in [
        KirchhoffCoefficient::affine(1.0, 1.0).unwrap(),
        KirchhoffCoefficient::affine(2.0, 0.0).unwrap(),
        KirchhoffCoefficient::logarithmic(),
    ] {
        for k in 0..=2000 {
            let t = 100.0 * k as f64 / 2000.0;
            let v = 0.5 * coef.eval_M(t).unwrap() - 0.25 * coef.eval_m(t).unwrap() * t;
            assert!(v >= -1e-12 * (1.0 + t), "{:?} at t = {t}: {v}", coef.kind());
        }
    }
}

#[test]
fn reference_values() {
    let e = std::f64::consts::E;
    let nl = Nonlinearity::paper_example(1.0).unwrap();
    assert!((nl.eval_f([0.0, 0.0], 1.0).unwrap() - (4.0 * e - 1.0)).abs() < 1e-13);
    let log = KirchhoffCoefficient::logarithmic();
    assert!((log.eval_M(e - 1.0).unwrap() - e).abs() < 1e-14);
    assert_eq!(log.eval_m(0.0).unwrap(), 1.0);
    let aff = KirchhoffCoefficient::affine(1.0, 2.0).unwrap();
    assert_eq!(aff.eval_m(3.0).unwrap(), 7.0);
    assert_eq!(aff.eval_M(3.0).unwrap(), 12.0);
    let cubic = Nonlinearity::power(3.0).unwrap();
    assert_eq!(cubic.eval_f([0.0, 0.0], 2.0).unwrap(), 8.0);
    assert_eq!(cubic.eval_F([0.0, 0.0], 2.0).unwrap(), 4.0);
}

#[test]
fn validation_is_deterministic() {
    let coef = KirchhoffCoefficient::logarithmic();
    let nl = Nonlinearity::paper_example(1.0).unwrap();
    let spec = SamplingSpec::default();
    let a = validate_hypotheses(&coef, &nl, 1.0, &spec).unwrap();
    let b = validate_hypotheses(&coef, &nl, 1.0, &spec).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn builtin_instances_pass_and_counterexamples_fail() {
    let spec = SamplingSpec::default();
    let nl = Nonlinearity::paper_example(1.0).unwrap();
    for coef in [
        KirchhoffCoefficient::affine(1.0, 1.0).unwrap(),
        KirchhoffCoefficient::logarithmic(),
    ] {
        let r = validate_hypotheses(&coef, &nl, 1.0, &spec).unwrap();
        assert!(r.all_ok(), "{:?}: {:#?}", coef.kind(), r.entries);
    }

    let linear = Nonlinearity::power(1.0).unwrap();
    let r = validate_hypotheses(&KirchhoffCoefficient::affine(1.0, 0.0).unwrap(), &linear, 1.0, &spec).unwrap();
    let e = r.entry(Hypothesis::F2);
    assert_eq!(e.status, Status::Fail);
    assert!(e.witness.is_some());

    let decay = KirchhoffCoefficient::custom("decay", 1e-30, |t: f64| (-t).exp()).unwrap();
    let r = validate_hypotheses(&decay, &nl, 1.0, &spec).unwrap();
    let e = r.entry(Hypothesis::M1);
    assert_eq!(e.status, Status::Fail);
    assert_eq!(e.witness.as_ref().map(Vec::len), Some(2));
}
