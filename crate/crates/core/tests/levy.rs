use num_complex::Complex64;
use proptest::prelude::*;
use selberg_levy::levy::{char_fn, compute_bf, compute_bf_complex, g_eval, tail_mass, LevyTriplet};
use selberg_levy::lfunc::{instance, SelbergData, INSTANCE_NAMES};
use selberg_levy::zeros::{central_multiplicity, find_zeros, DEFAULT_GRID_STEP};

fn triplet(f: &SelbergData, t: f64) -> LevyTriplet {
    let central = central_multiplicity(f).unwrap();
    let zeros = find_zeros(f, t, DEFAULT_GRID_STEP).unwrap();
    LevyTriplet::from_zeros(f, &zeros, &central).unwrap()
}

fn arb_triplet() -> impl Strategy<Value = LevyTriplet> {
    (
        0u32..3,
        -2.0f64..2.0,
        prop::collection::vec((prop_oneof![-200.0f64..-0.5, 0.5f64..200.0], 1e-6f64..0.5), 0..40),
    )
        .prop_map(|(a, b0, mut atoms)| {
            atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
            LevyTriplet::new(a as f64, b0, atoms)
        })
}

#[test]
fn zeta_triplet_shape() {
    let t = triplet(&instance("zeta").unwrap(), 100.0);
    assert_eq!(t.a, 0.0);
    assert!(t.b0.abs() < 1e-8);
    assert_eq!(t.atoms.len(), 58);
    assert!(t.atoms.windows(2).all(|w| w[0].0 < w[1].0));
    for &(l, m) in &t.atoms {
        assert_eq!(m, 1.0 / (l * l));
    }
    t.validate().unwrap();
}

#[test]
fn product_triplet_is_the_sum_of_factor_triplets() {
    let z = triplet(&instance("zeta").unwrap(), 80.0);
    let c = triplet(&instance("cusp18").unwrap(), 80.0);
    let zc = triplet(&instance("zeta*cusp18").unwrap(), 80.0);
    let sum = z.combine(&c);
    assert_eq!(zc.a, sum.a);
    assert!((zc.b0 - sum.b0).abs() < 1e-14);
    assert_eq!(zc.atoms.len(), sum.atoms.len());
    for (x, y) in zc.atoms.iter().zip(&sum.atoms) {
        assert!((x.0 - y.0).abs() < 1e-7 && (x.1 - y.1).abs() <= 1e-12 * y.1);
    }
    assert!((zc.tail_mass_estimate - sum.tail_mass_estimate).abs() < 1e-12);
}

#[test]
fn drift_from_the_product_ring_matches_the_factor_sum() {
    let f = instance("zeta*cusp12").unwrap();
    let central = central_multiplicity(&f).unwrap();
    let direct = compute_bf_complex(&central).unwrap();
    let summed = compute_bf(&f, &central).unwrap();
    assert!(direct.im.abs() < 1e-10);
    assert!((direct.re - summed).abs() < 1e-8, "{direct} vs {summed}");
}

#[test]
fn nonpositivity_on_a_fine_grid() {
    for name in INSTANCE_NAMES {
        let t = triplet(&instance(name).unwrap(), 200.0);
        for i in 0..10_000 {
            let x = -100.0 + 200.0 * i as f64 / 9_999.0;
            let g = g_eval(&t, x);
            assert!(g.value.re <= g.tail_bound, "{name} at {x}: {}", g.value.re);
        }
    }
}

#[test]
fn tail_mass_decreases_with_height() {
    let f = instance("cusp22").unwrap();
    let masses: Vec<f64> = [50.0, 100.0, 200.0, 400.0].iter().map(|&t| tail_mass(&f, t)).collect();
    assert!(masses.windows(2).all(|w| w[1] < w[0]));
    // the atoms between 100 and 400 carry roughly the tail difference
    let a = triplet(&f, 400.0);
    let between: f64 = a.atoms.iter().filter(|(l, _)| l.abs() > 100.0).map(|(_, m)| m).sum();
    assert!((between - (masses[1] - masses[3])).abs() < 0.1 * between);
}

#[test]
fn gaussian_part_shows_in_the_char_fn() {
    let t = triplet(&instance("cusp18").unwrap(), 100.0);
    // |φ(t)| ≤ exp(−t²/2) once the atoms are accounted for
    for x in [0.5, 1.0, 3.0] {
        assert!(char_fn(&t, x).norm() <= (-0.5 * x * x).exp() + 1e-15);
    }
}

proptest! {
    #[test]
    fn char_fn_is_bounded_and_hermitian(t in arb_triplet(), x in -100.0f64..100.0) {
        let v = char_fn(&t, x);
        prop_assert!(v.norm() <= 1.0 + 1e-15);
        prop_assert_eq!(char_fn(&t, 0.0), Complex64::new(1.0, 0.0));
        let w = char_fn(&t, -x);
        prop_assert!((w - v.conj()).norm() <= 1e-14);
    }

    #[test]
    fn exponent_real_part_is_nonpositive(t in arb_triplet(), x in -100.0f64..100.0) {
        prop_assert!(t.exponent(x).re <= 0.0);
    }

    #[test]
    fn g_eval_and_char_fn_agree(t in arb_triplet(), x in -50.0f64..50.0) {
        prop_assert_eq!(g_eval(&t, x).value.exp(), char_fn(&t, x));
    }

    #[test]
    fn combining_adds_exponents(a in arb_triplet(), b in arb_triplet(), x in -20.0f64..20.0) {
        let c = a.combine(&b);
        let lhs = c.exponent(x);
        let rhs = a.exponent(x) + b.exponent(x);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
        prop_assert!((c.total_mass() - a.total_mass() - b.total_mass()).abs() <= 1e-12);
    }

    #[test]
    fn json_round_trip(t in arb_triplet()) {
        let text = serde_json::to_string(&t).unwrap();
        let back: LevyTriplet = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, t);
    }
}
