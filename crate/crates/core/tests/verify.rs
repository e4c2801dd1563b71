use num_complex::Complex64;
use proptest::prelude::*;
use selberg_levy::levy::LevyTriplet;
use selberg_levy::lfunc::instance;
use selberg_levy::verify::quad::integrate_dyadic;
use selberg_levy::verify::{
    format_complex, gk68_check, integral_identity_check, kernel_self_test, nonpositivity_check, parse_complex,
    raw_residuals, real_zero_scan, IdentityOptions,
};
use selberg_levy::zeros::{central_multiplicity, find_zeros, DEFAULT_GRID_STEP};
use selberg_levy::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zeta_triplet(t: f64) -> LevyTriplet {
    let f = instance("zeta").unwrap();
    let central = central_multiplicity(&f).unwrap();
    LevyTriplet::from_zeros(&f, &find_zeros(&f, t, DEFAULT_GRID_STEP).unwrap(), &central).unwrap()
}

#[test]
fn kernel_closed_forms() {
    let r = kernel_self_test();
    assert!(r.passed);
    assert_eq!(r.rows.len(), 6);
    assert!(r.max_residual <= 1e-10);
    // ∫ t e^{−2t} = 1/4
    let v = integrate_dyadic(|t| c(t * (-2.0 * t).exp(), 0.0), 40.0, 1e-14).value;
    assert!((v.re - 0.25).abs() < 1e-13);
}

#[test]
fn identity_for_zeta_at_two_i() {
    let f = instance("zeta").unwrap();
    let r = integral_identity_check(
        &f,
        &zeta_triplet(500.0),
        &[c(0.0, 2.0)],
        40.0,
        IdentityOptions::default(),
    )
    .unwrap();
    assert!(r.passed && r.max_residual < 1e-5, "{}", r.max_residual);
    let lhs = r.rows[0].detail["lhs_quadrature"][1].as_f64().unwrap();
    let rhs = r.rows[0].detail["rhs"][1].as_f64().unwrap();
    assert!(lhs.abs() < 1e-12 && rhs.abs() < 1e-12, "both sides real at z = 2i");
}

#[test]
fn identity_residual_decays_with_height() {
    let f = instance("zeta").unwrap();
    let zs = [c(0.0, 2.0), c(1.0, 2.0), c(0.0, 3.0)];
    let reports: Vec<_> = [100.0, 200.0, 400.0]
        .iter()
        .map(|&t| integral_identity_check(&f, &zeta_triplet(t), &zs, 40.0, IdentityOptions::default()).unwrap())
        .collect();
    for w in reports.windows(2) {
        let (a, b) = (raw_residuals(&w[0]), raw_residuals(&w[1]));
        for k in 0..zs.len() {
            let ratio = b[k] / a[k];
            assert!((0.25..=1.0).contains(&ratio), "ratio {ratio}");
        }
        assert!(w[1].max_residual < w[0].max_residual);
    }
}

#[test]
fn identity_preconditions() {
    let f = instance("zeta").unwrap();
    let t = zeta_triplet(50.0);
    let opts = IdentityOptions::default();
    let err = integral_identity_check(&f, &t, &[c(0.0, 0.4)], 40.0, opts).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    assert!(integral_identity_check(&f, &t, &[c(0.0, 0.55)], 80.0, opts).is_err());
    assert!(integral_identity_check(&f, &t, &[c(0.0, 2.0)], 5.0, opts).is_err());
    let near = IdentityOptions {
        allow_near_boundary: true,
        ..opts
    };
    let r = integral_identity_check(&f, &t, &[c(0.0, 0.8)], 80.0, near).unwrap();
    assert!(r.max_residual.is_finite());
}

#[test]
fn gk68_at_two() {
    let r = gk68_check(2.0, &[0.0, 0.5, 1.0, 2.0, 5.0, 10.0], 100_000, 30).unwrap();
    assert!(r.passed);
    assert_eq!(r.rows[0].residual, 0.0);
    for row in &r.rows {
        assert!(row.detail["modulus_lhs"].as_f64().unwrap() <= 1.0);
        assert!(row.detail["raw_residual"].as_f64().unwrap() <= row.detail["tail_bound"].as_f64().unwrap());
    }
}

#[test]
fn gk68_residual_decays_with_prime_bound() {
    let ts = [0.5, 1.0, 2.0, 5.0, 10.0];
    let r: Vec<_> = [1_000, 10_000, 100_000]
        .iter()
        .map(|&p| gk68_check(2.0, &ts, p, 30).unwrap())
        .collect();
    let worst_raw = |rep| raw_residuals(rep).into_iter().fold(0.0, f64::max);
    assert!(worst_raw(&r[1]) < worst_raw(&r[0]) && worst_raw(&r[2]) < worst_raw(&r[1]));
    assert!(r[1].max_residual < r[0].max_residual && r[2].max_residual < r[1].max_residual);
}

#[test]
fn gk68_preconditions() {
    assert!(matches!(gk68_check(0.9, &[1.0], 1000, 5), Err(Error::Precondition(_))));
    assert!(matches!(gk68_check(1.0, &[1.0], 1000, 5), Err(Error::Precondition(_))));
}

#[test]
fn no_real_zeros_right_of_the_center() {
    for name in ["zeta", "cusp12", "cusp18", "cusp22", "cusp26"] {
        let f = instance(name).unwrap();
        let r = real_zero_scan(&f, 0.5, 1.0, 1e-3).unwrap();
        assert!(r.passed, "{name}");
        assert!(r.rows[0].detail["min_abs_f"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn real_zero_scan_preconditions() {
    let f = instance("cusp18").unwrap();
    assert!(matches!(
        real_zero_scan(&f, 1.0, 0.6, 1e-3),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        real_zero_scan(&f, 0.4, 1.0, 1e-3),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn real_zero_scan_across_the_pole_of_zeta() {
    let f = instance("zeta").unwrap();
    assert!(real_zero_scan(&f, 0.5, 3.0, 1e-2).unwrap().passed);
}

#[test]
fn nonpositivity_report() {
    let t = zeta_triplet(200.0);
    let r = nonpositivity_check(&t, 10_000, 100.0);
    assert!(r.passed);
    assert_eq!(r.rows.len(), 1);
    assert!(r.rows[0].detail["max_re_g"].as_f64().unwrap() <= 0.0);
    let json = serde_json::to_value(&r).unwrap();
    for key in ["name", "tolerance", "max_residual", "passed", "rows"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

proptest! {
    #[test]
    fn complex_text_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let z = c(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }
}
