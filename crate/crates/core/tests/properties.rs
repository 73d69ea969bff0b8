use std::f64::consts::PI;
use std::sync::LazyLock;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixjtv::asympt::{angle_sequence_colors, fit_model, satisfies_hypotheses, sign_coherent, Fit};
use sixjtv::lobachevsky::{lobachevsky, AngleSextuple};
use sixjtv::qarith::{quarter, signed_logsum, Level, Precision, SignedLog};
use sixjtv::sixj::{canonical_form, quarter_of, orbit, sixj_eval, sixj_symbol, Sextuple, SYMMETRY_GROUP};
use sixjtv::tetvol::{dilog, truncated_tet_volume, volume_from_parameters, DihedralAngles};

const LEVELS: [u32; 3] = [13, 21, 31];

/// 400 admissible sextuples per level in `LEVELS`, drawn by rejection.
static SAMPLES: LazyLock<Vec<(u32, Sextuple)>> = LazyLock::new(|| {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    for r in LEVELS {
        let l = Level::new(r as i64).unwrap();
        let mut n = 0;
        while n < 400 {
            let s = Sextuple(std::array::from_fn(|_| rng.random_range(0..r - 1)));
            if s.is_admissible(&l) {
                out.push((r, s));
                n += 1;
            }
        }
    }
    out
});

fn admissible() -> impl Strategy<Value = (Level, Sextuple)> {
    (0..SAMPLES.len()).prop_map(|i| {
        let (r, s) = SAMPLES[i];
        (Level::new(r as i64).unwrap(), s)
    })
}

fn close_log(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sixj_phase_is_a_quarter_turn((l, s) in admissible()) {
        let v = sixj_symbol(&s, &l).unwrap();
        if !v.is_zero() {
            prop_assert!(quarter_of(&v).is_some(), "{:?}", v);
        }
    }

    #[test]
    fn magnitude_is_group_invariant((l, s) in admissible(), g in 0usize..192) {
        let a = sixj_symbol(&s, &l).unwrap();
        let img = SYMMETRY_GROUP[g].apply(&s, &l);
        prop_assert!(img.is_admissible(&l));
        let b = sixj_symbol(&img, &l).unwrap();
        prop_assert_eq!(a.is_zero(), b.is_zero());
        if !a.is_zero() {
            prop_assert!(close_log(a.log_mag, b.log_mag, 1e-9));
        }
    }

    #[test]
    fn canonical_form_is_orbit_minimum((l, s) in admissible()) {
        let c = canonical_form(&s, &l);
        let o = orbit(&s, &l);
        prop_assert!(o.contains(&c));
        prop_assert_eq!(o.iter().min().copied(), Some(c));
        prop_assert_eq!(canonical_form(&c, &l), c);
    }

    #[test]
    fn extended_agrees_with_standard((l, s) in admissible()) {
        let a = sixj_eval(&s, &l, Precision::Standard).unwrap();
        let b = sixj_eval(&s, &l, Precision::extended(31)).unwrap();
        prop_assert_eq!(a.value.is_zero(), b.value.is_zero());
        if !a.value.is_zero() {
            prop_assert!(close_log(a.value.log_mag, b.value.log_mag, 1e-9));
            prop_assert!((a.value.phase - b.value.phase).norm() < 1e-9);
        }
    }

    #[test]
    fn logsum_matches_direct_sum(terms in prop::collection::vec((-30.0f64..30.0, 0i64..4), 1..12)) {
        let logs: Vec<SignedLog> = terms.iter().map(|&(m, k)| SignedLog::new(m, quarter(k))).collect();
        let direct: Complex64 = logs.iter().map(|t| t.to_complex()).sum();
        let scale = logs.iter().map(|t| t.abs()).fold(0.0, f64::max);
        if direct.norm() > 1e-6 * scale {
            let s = signed_logsum(&logs).unwrap();
            prop_assert!((s.to_complex() - direct).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn lobachevsky_odd_and_periodic(x in -10.0f64..10.0) {
        prop_assert!((lobachevsky(x + PI) - lobachevsky(x)).abs() < 1e-12);
        prop_assert!((lobachevsky(-x) + lobachevsky(x)).abs() < 1e-12);
        prop_assert!((lobachevsky(2.0 * x) - 2.0 * lobachevsky(x) - 2.0 * lobachevsky(x + PI / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn dilog_reflection(re in -3.0f64..3.0, im in 0.01f64..3.0) {
        let z = Complex64::new(re, im);
        let one = Complex64::new(1.0, 0.0);
        let lhs = dilog(z).unwrap() + dilog(one - z).unwrap();
        let rhs = PI * PI / 6.0 - z.ln() * (one - z).ln();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn dilog_conjugate(re in -3.0f64..3.0, im in 0.01f64..3.0) {
        let z = Complex64::new(re, im);
        prop_assert!((dilog(z.conj()).unwrap() - dilog(z).unwrap().conj()).norm() < 1e-13);
    }

    #[test]
    fn fit_recovers_model(l in -10.0f64..10.0, a in -20.0f64..20.0, b in -50.0f64..50.0) {
        let truth = Fit { l, a, b };
        let pts: Vec<(u32, f64)> = (5..=101).step_by(2).map(|r| (r, truth.model(r))).collect();
        let f = fit_model(&pts).unwrap();
        prop_assert!((f.l - l).abs() < 1e-9 && (f.a - a).abs() < 1e-9 && (f.b - b).abs() < 1e-9);
    }

    #[test]
    fn tetvol_conjugation_symmetry(alpha in prop::array::uniform6(0.05f64..1.0)) {
        let a = alpha.map(|x| Complex64::from_polar(1.0, x));
        let v = volume_from_parameters(&a).unwrap().volume;
        let w = volume_from_parameters(&a.map(|z| z.conj())).unwrap().volume;
        prop_assert!((v - w).abs() < 1e-9);
        prop_assert!((v - truncated_tet_volume(&DihedralAngles::new(alpha).unwrap()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn emitted_colors_meet_hypotheses(alpha in prop::array::uniform6(0.05f64..1.0), half in 10u32..60) {
        let r = 2 * half + 1;
        let l = Level::new(r as i64).unwrap();
        let theta = AngleSextuple::new(alpha.map(|a| PI + a)).unwrap();
        if let Ok(s) = angle_sequence_colors(&theta, &l) {
            prop_assert!(s.is_admissible(&l));
            prop_assert!(satisfies_hypotheses(&s, &l));
            prop_assert!(sign_coherent(&s, &l).unwrap());
        }
    }
}
