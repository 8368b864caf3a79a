use casimir_core::force::{dynamical_force, static_force, total_force, ForceModel, Term, Transcription};
use casimir_core::scenario::{force_scale, reduce, Scenario, UnitSystem};
use casimir_core::{static_force_first_maximum, static_force_zeros, Regime};
use proptest::prelude::*;

// Values of −∂/∂d of the energy integral, differentiated symbolically and
// evaluated at 40 digits.
const STATIC: [(f64, f64); 3] = [
    (1.0, -0.284_589_885_010_426_13),
    (2.0, -0.347_135_399_505_712_19),
    (5.0, -5.859_680_994_189_884_8),
];

const DYNAMIC: [(f64, f64, f64); 16] = [
    (1.0, 0.3, 0.320_653_895_148_134_81),
    (1.0, 0.7, 1.164_616_895_828_510_95),
    (1.0, 1.5, -0.119_502_294_621_778_60),
    (1.0, 3.0, 0.000_236_225_337_059_281_38),
    (2.0, 0.3, 0.417_528_606_573_623_17),
    (2.0, 0.7, 1.803_917_034_650_564_2),
    (2.0, 1.5, 0.022_121_536_199_275_899),
    (2.0, 3.0, -0.000_244_049_402_941_669_48),
    (5.0, 0.3, 6.007_497_836_157_776_2),
    (5.0, 0.7, 6.270_840_111_513_160_0),
    (5.0, 1.5, -0.085_755_323_495_167_115),
    (5.0, 3.0, 0.000_117_561_646_107_824_00),
    (40.0, 0.3, -3_692.614_949_328_109_9),
    (40.0, 0.7, -3_692.263_212_178_364_3),
    (40.0, 1.5, 0.020_432_288_174_144_760),
    (40.0, 3.0, -0.000_032_847_266_521_236_435),
];

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn static_reference_values() {
    for (x0, want) in STATIC {
        assert!(rel(static_force(x0).unwrap(), want) < 1e-13, "x0 = {x0}");
    }
}

#[test]
fn dynamic_reference_values() {
    for (x0, a, want) in DYNAMIC {
        let got = dynamical_force(x0, a).unwrap();
        // terms of order x0³ cancel to the small late-time values
        assert!(rel(got, want) < 1e-10 || (got - want).abs() < 1e-13, "x0 = {x0}, a = {a}: {got} vs {want}");
    }
}

#[test]
fn printed_reading_differs_from_reference() {
    let printed = ForceModel::with_transcription(Transcription::printed());
    let before = printed.dynamical_force(2.0, 0.7).unwrap();
    let after = printed.dynamical_force(2.0, 1.5).unwrap();
    assert!(rel(before, 1.803_917_034_650_564_2) > 1e-2);
    assert!(rel(after, 0.022_121_536_199_275_899) > 1e-2);
}

#[test]
fn term_breakdown_sums_to_force() {
    let m = ForceModel::default();
    let b = m.dynamic_terms(2.0, 0.7).unwrap();
    assert_eq!(b.regime, Regime::BeforeRoundTrip);
    assert_eq!(b.terms.len(), 4);
    assert!(b.get(Term::AfterCiPair).is_none());
    assert_eq!(b.sum(), m.dynamical_force(2.0, 0.7).unwrap());
    let s = m.static_terms(2.0).unwrap();
    assert_eq!(s.terms.len(), 3);
    let a = m.dynamic_terms(2.0, 1.5).unwrap();
    assert_eq!(a.regime, Regime::AfterRoundTrip);
    assert_eq!(a.terms.len(), 5);
}

#[test]
fn short_distance_static_limit() {
    // Φ_stat → −1/4 as x0 → 0
    for &x0 in &[1e-3, 1e-4] {
        assert!((static_force(x0).unwrap() + 0.25).abs() < 1e-3);
    }
}

#[test]
fn static_zeros_and_first_maximum() {
    let zeros = static_force_zeros(0.1, 20.0).unwrap();
    assert_eq!(zeros.len(), 5);
    for z in &zeros {
        assert!(static_force(*z).unwrap().abs() < 1e-8);
    }
    // Φ_stat is attractive (negative) all the way out to the first zero
    assert!(zeros[0] > 5.5 && zeros[0] < 6.0);
    for w in zeros.windows(2) {
        assert!(rel(w[1] - w[0], std::f64::consts::PI) < 0.1);
    }
    let peak = static_force_first_maximum(0.5, 20.0).unwrap().unwrap();
    assert!((peak - 7.296_454).abs() < 1e-4);
}

#[test]
fn asymptotic_decay_of_the_dynamical_force() {
    for &x0 in &[1.0, 5.0, 13.0] {
        let running_max = |lo: f64| {
            (0..=400)
                .map(|i| lo * (1.0 + i as f64 / 400.0))
                .map(|a| dynamical_force(x0, a).unwrap().abs())
                .fold(0.0, f64::max)
        };
        let m: Vec<f64> = [10.0, 50.0, 100.0].iter().map(|&a| running_max(a)).collect();
        assert!(m[0] > m[1] && m[1] > m[2], "x0 = {x0}: {m:?}");
    }
}

#[test]
fn nonzero_before_round_trip() {
    for i in 1..=10 {
        let a = 0.09 * i as f64;
        for &x0 in &[1.0, 7.27, 40.0] {
            assert!(dynamical_force(x0, a).unwrap().abs() > 1e-12);
        }
    }
}

#[test]
fn sign_oscillation_before_round_trip() {
    let totals: Vec<f64> = (1..2000)
        .map(|i| total_force(40.0, i as f64 / 2000.0).unwrap().phi_total.unwrap())
        .collect();
    let changes = totals.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
    assert!(changes >= 2);
}

#[test]
fn physical_force_scale() {
    let s = Scenario::new(2.0, 0.5, 3.0, UnitSystem::Natural).unwrap();
    let m = ForceModel::default();
    let r = m.evaluate_scenario(&s, 1.0).unwrap();
    let want = r.phi_total.unwrap() * 4.0 / 81.0;
    assert!(rel(r.physical_value.unwrap(), want) < 1e-15);
}

proptest! {
    #[test]
    fn t_zero_identity(x0 in 0.1f64..50.0) {
        let s = static_force(x0).unwrap();
        let d = dynamical_force(x0, 0.0).unwrap();
        prop_assert!((s + d).abs() <= 1e-9);
    }

    #[test]
    fn small_time_continuity(x0 in 0.1f64..50.0) {
        // Φ_total grows from zero continuously
        let t = total_force(x0, 1e-7).unwrap().phi_total.unwrap();
        prop_assert!(t.abs() < 1e-4 * (1.0 + static_force(x0).unwrap().abs()));
    }

    #[test]
    fn scale_invariance(
        mu in 0.1f64..10.0,
        k0 in 0.1f64..3.0,
        d in 0.5f64..20.0,
        frac in 0.0f64..3.0,
        lambda in 0.1f64..10.0,
    ) {
        prop_assume!((frac - 1.0).abs() > 1e-3);
        let s = Scenario::new(mu, k0, d, UnitSystem::Natural).unwrap();
        let scaled = Scenario::new(mu, k0 / lambda, d * lambda, UnitSystem::Natural).unwrap();
        let t = s.time_at(frac);
        let p = reduce(&s, t).unwrap();
        let q = reduce(&scaled, t * lambda).unwrap();
        prop_assert!(rel(q.x0, p.x0) < 1e-14 && (q.a - p.a).abs() < 1e-14 * (1.0 + p.a));
        let ratio = force_scale(&scaled).native() / force_scale(&s).native();
        prop_assert!(rel(ratio, lambda.powi(-4)) < 1e-12);
    }

    #[test]
    fn reduction_is_monotone(k0 in 0.1f64..3.0, d in 0.5f64..20.0, t in 0.0f64..50.0, grow in 1.001f64..3.0) {
        let near = Scenario::new(1.0, k0, d, UnitSystem::Natural).unwrap();
        let far = near.with_distance(d * grow).unwrap();
        let (p, q) = (reduce(&near, t).unwrap(), reduce(&far, t).unwrap());
        prop_assert!(q.x0 > p.x0);
        prop_assert!(q.a <= p.a);
    }
}
