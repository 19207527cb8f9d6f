mod common;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use qscalar::reference::{
    analytic_pulse_solution, diagonal_propagator_oracle, error_norm_of, fd10_reference, ScalarField,
};
use qscalar::splitting::{
    commutator_error_estimate, pulse_field, run_scenario, strang_step, trotter_step,
};
use qscalar::{BoundaryKind, Profile64, Scenario64, Splitting, State64};

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Direct image-sum quadrature of the Green-function convolution.
fn pulse_quadrature(x: f64, t: f64, u: f64, d: f64) -> f64 {
    let mut total = 0.0;
    for m in -8i32..=8 {
        let g = move |eta: f64| {
            let s = x - u * t - eta + m as f64;
            (-100.0 * (eta - 0.5) * (eta - 0.5)).exp() * (-(s * s) / (4.0 * d * t)).exp()
                / (4.0 * std::f64::consts::PI * d * t).sqrt()
        };
        let mut piece = 0.0;
        for i in 0..16 {
            let a = i as f64 / 16.0;
            piece += simpson(&g, a, a + 1.0 / 16.0, 1e-16);
        }
        total += piece;
    }
    total
}

#[test]
fn closed_form_matches_quadrature() {
    for &t in &[0.1, 0.5, 1.0] {
        for i in 0..20 {
            let x = i as f64 / 20.0;
            let a = analytic_pulse_solution(x, t, 1.0, 0.08, 1.0).unwrap();
            let q = pulse_quadrature(x, t, 1.0, 0.08);
            assert!((a - q).abs() < 1e-10, "x={x} t={t}: {a} vs {q}");
        }
    }
}

#[test]
fn closed_form_matches_quadrature_on_fine_grid() {
    for i in 0..128 {
        let x = i as f64 / 128.0;
        let a = analytic_pulse_solution(x, 1.0, 1.0, 0.08, 1.0).unwrap();
        let q = pulse_quadrature(x, 1.0, 1.0, 0.08);
        assert!((a - q).abs() < 1e-10);
    }
}

#[test]
fn closed_form_matches_fourier_series() {
    let x: Vec<f64> = (0..64).map(|i| i as f64 / 64.0).collect();
    for &(t, d) in &[(0.3, 0.01), (1.0, 0.08)] {
        let s = common::pulse_series(&x, t, 1.0, d);
        for (xi, si) in x.iter().zip(s) {
            assert_abs_diff_eq!(analytic_pulse_solution(*xi, t, 1.0, d, 1.0).unwrap(), si, epsilon = 1e-12);
        }
    }
}

#[test]
fn pulse_success_probability() {
    let v: Vec<Complex64> = common::pulse_grid(128).into_iter().map(|a| Complex64::new(a, 0.0)).collect();
    let out = diagonal_propagator_oracle(&v, BoundaryKind::Periodic, 1.0, Some(1.0), 0.08, 1.0).unwrap();
    let ratio = common::norm_sqr(&out) / common::norm_sqr(&v);
    assert!((ratio - 0.251).abs() < 0.003, "{ratio}");
}

#[test]
fn fd10_pulse_matches_analytic() {
    let mut cfg = Scenario64::new(7, 0, Profile64::uniform());
    cfg.diffusivity = 0.08;
    cfg.t_final = 1.0;
    let f0 = ScalarField::new(128, 1, 1.0, common::pulse_grid(128)).unwrap();
    let out = fd10_reference(&cfg, &f0).unwrap();
    let worst = (0..128)
        .map(|i| {
            let a = analytic_pulse_solution(i as f64 / 128.0, 1.0, 1.0, 0.08, 1.0).unwrap();
            (out.values()[i] - a).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
    assert_eq!(out.time, 1.0);
}

#[test]
fn fd10_conserves_integral() {
    for bc_y in [BoundaryKind::Periodic, BoundaryKind::Neumann] {
        let mut cfg = Scenario64::new(5, 5, Profile64::poiseuille());
        cfg.diffusivity = 0.01;
        cfg.t_final = 0.5;
        cfg.bc_y = bc_y;
        let f0 = ScalarField::from_fn(32, 32, 1.0, |x: f64, y: f64| {
            (-60.0 * (x - 0.4).powi(2)).exp() * (1.0 + 0.5 * (3.0 * y).cos()) + 0.1 * y
        })
        .unwrap();
        let out = fd10_reference(&cfg, &f0).unwrap();
        let drift = (out.sum() - f0.sum()).abs() / (32.0 * 32.0);
        assert!(drift < 1e-10 * 0.5, "{bc_y}: {drift}");
    }
}

#[test]
fn fd10_rejects_bad_parameters() {
    let mut cfg = Scenario64::new(5, 0, Profile64::uniform());
    cfg.diffusivity = -1.0;
    cfg.t_final = 0.1;
    let f0 = ScalarField::new(32, 1, 1.0, vec![1.0; 32]).unwrap();
    assert!(fd10_reference(&cfg, &f0).is_err());
    cfg.diffusivity = 0.1;
    let small = ScalarField::new(4, 1, 1.0, vec![1.0; 4]).unwrap();
    assert!(fd10_reference(&cfg, &small).is_err());
}

#[test]
fn commuting_case_is_exact_for_any_step_count() {
    let x: Vec<f64> = common::pulse_grid(64);
    let s0 = State64::encode_real(&x).unwrap();
    let v: Vec<Complex64> = x.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    let exact = diagonal_propagator_oracle(&v, BoundaryKind::Periodic, 1.0, Some(1.0), 0.05, 0.7).unwrap();
    let mut probs = Vec::new();
    for steps in [1, 2, 5, 16] {
        for splitting in [Splitting::Trotter, Splitting::Strang] {
            let mut cfg = Scenario64::new(6, 0, Profile64::uniform());
            cfg.diffusivity = 0.05;
            cfg.t_final = 0.7;
            cfg.steps = steps;
            cfg.splitting = splitting;
            let r = run_scenario(&cfg, &s0).unwrap();
            let e = error_norm_of(r.final_state.amplitudes(), &exact).unwrap();
            assert!(e < 1e-12, "steps {steps} {splitting}: {e}");
            assert!(r.error_norms["exact"] < 1e-12);
            probs.push(r.success_prob());
        }
    }
    for p in &probs {
        assert_abs_diff_eq!(*p, probs[0], epsilon = 1e-8);
    }
}

#[test]
fn single_steps_match_exact_propagator() {
    let mut cfg = Scenario64::new(4, 3, Profile64::uniform());
    cfg.diffusivity = 0.02;
    cfg.bc_y = BoundaryKind::Dirichlet;
    let field = ScalarField::from_fn(16, 8, 1.0, |x: f64, y: f64| (6.0 * x).cos() + y).unwrap();
    let s0 = field.to_state().unwrap();
    let exact = qscalar::reference::diagonal_propagator_oracle_2d(
        s0.amplitudes(),
        16,
        8,
        BoundaryKind::Dirichlet,
        1.0,
        1.0,
        0.02,
        0.3,
    )
    .unwrap();
    for s in [trotter_step(&s0, &cfg, 0.3).unwrap(), strang_step(&s0, &cfg, 0.3).unwrap()] {
        assert!(error_norm_of(s.amplitudes(), &exact).unwrap() < 1e-12);
    }
}

#[test]
fn real_input_stays_real() {
    for profile in [Profile64::couette(), Profile64::poiseuille(), Profile64::blasius()] {
        for bc_y in BoundaryKind::ALL {
            let mut cfg = Scenario64::new(5, 4, profile.clone());
            cfg.diffusivity = 0.004;
            cfg.t_final = 0.8;
            cfg.steps = 3;
            cfg.bc_y = bc_y;
            let s0 = pulse_field::<f64>(32, 16, 1.0).unwrap().to_state().unwrap();
            let r = run_scenario(&cfg, &s0).unwrap();
            let worst = r.final_state.amplitudes().iter().map(|a| a.im.abs()).fold(0.0, f64::max);
            assert!(worst < 1e-10, "{worst}");
        }
    }
}

#[test]
fn channel_commutator_exceeds_couette() {
    let field = pulse_field::<f64>(64, 64, 1.0).unwrap();
    let max_norm = |profile: Profile64| {
        let mut cfg = Scenario64::new(6, 6, profile);
        cfg.diffusivity = 1.0 / 500.0;
        let e = commutator_error_estimate(&cfg, &field).unwrap();
        e.values().iter().map(|v| v.abs()).fold(0.0, f64::max)
    };
    let couette = max_norm(Profile64::couette());
    let channel = max_norm(Profile64::poiseuille());
    assert!(channel > couette, "{channel} vs {couette}");
}

#[test]
fn run_success_matches_reference_norm_ratio() {
    let mut cfg = Scenario64::new(5, 5, Profile64::blasius());
    cfg.diffusivity = 1.0 / 200.0;
    cfg.t_final = 1.0;
    cfg.steps = 4;
    let s0 = pulse_field::<f64>(32, 32, 1.0).unwrap().to_state().unwrap();
    let r = run_scenario(&cfg, &s0).unwrap();
    let u = |y: f64| 2.0 * y - y * y;
    let setup = common::SplitSetup {
        nx: 32,
        ny: 32,
        y_basis: common::Basis::Cosine,
        u: &u,
        d: 1.0 / 200.0,
        t: 1.0,
        steps: 4,
        strang: true,
    };
    let reference = common::split_step(&setup, s0.amplitudes());
    assert_abs_diff_eq!(r.success_prob(), common::norm_sqr(&reference), epsilon = 1e-10);
    assert!(error_norm_of(r.final_state.amplitudes(), &reference).unwrap() < 1e-12);
    assert_abs_diff_eq!(r.oracle_success_prob.unwrap(), r.success_prob(), epsilon = 1e-10);
}
