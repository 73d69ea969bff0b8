//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixjtv::asympt::{appendix_growth_check, appendix_limit, growth_series, odd_range, GrowthSeries, SeriesKind};
use sixjtv::fsl::FSLPresentation;
use sixjtv::lobachevsky::{big_l, gamma_two, lobachevsky, nu, potential_v, AngleSextuple, V3, V8};
use sixjtv::qarith::{factorial_asymptotic_residual, Level};
use sixjtv::sixj::{bound_scan, sixj_symbol, ScanOptions, Sextuple};
use sixjtv::tetvol::{richardson_limit, truncated_tet_volume, volume_from_parameters, DihedralAngles};
use sixjtv::tvstate::{seeds, tv_state_sum};

/// Frozen bound-scan constant: `max_growth(r) ≤ v8 + C log r / r` for odd `5 ≤ r ≤ 17`.
const SCAN_C: f64 = -7.47;
/// Frozen factorial constant: `|residual| ≤ C' log r` for odd `r ≤ 501`.
const FACTORIAL_C: f64 = 1.15;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn lvl(r: u32) -> Level {
    Level::new(r as i64).unwrap()
}

fn fit_of(s: &GrowthSeries) -> f64 {
    s.fit.expect("series has a fit").l
}

fn first_decrease(s: &GrowthSeries) -> Option<(u32, f64, u32, f64)> {
    s.points.windows(2).find(|w| w[1].1 <= w[0].1).map(|w| (w[0].0, w[0].1, w[1].0, w[1].1))
}

fn central_convergence() -> Outcome {
    let t = Instant::now();
    let rs = odd_range(11, 151);
    let s = growth_series(&SeriesKind::SixjCentral, &rs).unwrap();
    let elapsed = t.elapsed();
    let l = fit_of(&s);
    let inc = s.is_increasing();
    let class = |m: u32| {
        let pts: Vec<_> = s.points.iter().copied().filter(|p| p.0 % 4 == m).collect();
        fit_of(&GrowthSeries::from_points(pts, vec![]).unwrap())
    };
    let mut detail = format!(
        "L = {l:.6} (|L - v8| = {:.4}, tol 0.05), increasing = {inc}, {:.2?}; per-class L: r≡1 (mod 4) {:.6}, r≡3 (mod 4) {:.6}",
        (l - V8).abs(),
        elapsed,
        class(1),
        class(3)
    );
    if let Some((r0, g0, r1, g1)) = first_decrease(&s) {
        detail += &format!("; first decrease g({r0}) = {g0:.4} > g({r1}) = {g1:.4}");
    }
    outcome(inc && (l - V8).abs() <= 0.05 && elapsed < Duration::from_secs(10), detail)
}

fn naive_count(r: u32) -> u64 {
    let l = lvl(r);
    let mut n = 0;
    for a in 0..r - 1 {
        for b in 0..r - 1 {
            for c in 0..r - 1 {
                for d in 0..r - 1 {
                    for e in 0..r - 1 {
                        for f in 0..r - 1 {
                            n += Sextuple([a, b, c, d, e, f]).is_admissible(&l) as u64;
                        }
                    }
                }
            }
        }
    }
    n
}

fn bound_scan_criterion() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut r17 = Duration::ZERO;
    for r in odd_range(5, 17) {
        let t = Instant::now();
        let rep = bound_scan(&lvl(r), &ScanOptions::default()).unwrap();
        if r == 17 {
            r17 = t.elapsed();
        }
        let rf = r as f64;
        let bound = V8 + SCAN_C * rf.ln() / rf;
        pass &= rep.max_growth <= bound;
        parts.push(format!("r={r}: {:.6} ≤ {bound:.6}", rep.max_growth));
        if r == 5 {
            let naive = naive_count(5);
            pass &= naive == rep.count_admissible;
            parts.push(format!("count {} vs naive {naive}", rep.count_admissible));
        }
    }
    pass &= r17 < Duration::from_secs(600);
    outcome(pass, format!("C = {SCAN_C}; {}; r=17 scan {:.2?}", parts.join(", "), r17))
}

fn random_admissible(l: &Level, rng: &mut ChaCha8Rng) -> Sextuple {
    loop {
        let s = Sextuple(std::array::from_fn(|_| rng.random_range(0..l.r() - 1)));
        if s.is_admissible(l) {
            return s;
        }
    }
}

fn symmetry_identities() -> Outcome {
    let l = lvl(31);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let p = |n: u32| 29 - n;
    let (mut worst, mut mismatched, mut mag_worst) = (0.0f64, 0, 0.0f64);
    for _ in 0..1000 {
        let s = random_admissible(&l, &mut rng);
        let [a, b, c, d, e, f] = s.0;
        let v0 = sixj_symbol(&s, &l).unwrap().to_complex();
        let v1 = sixj_symbol(&Sextuple([a, b, c, p(d), p(e), p(f)]), &l).unwrap().to_complex();
        let v2 = sixj_symbol(&Sextuple([p(a), p(b), c, p(d), p(e), f]), &l).unwrap().to_complex();
        let mut bad = false;
        for v in [v1, v2] {
            let rel = (v - v0).norm() / v0.norm();
            worst = worst.max(rel);
            mag_worst = mag_worst.max((v.norm() - v0.norm()).abs() / v0.norm());
            bad |= rel > 1e-9;
        }
        mismatched += bad as u32;
    }
    outcome(
        worst <= 1e-9,
        format!(
            "max relative error {worst:.3e} (tol 1e-9); {mismatched}/1000 tuples differ by a sign; max relative magnitude error {mag_worst:.3e}"
        ),
    )
}

fn fsl_criterion() -> Outcome {
    let rs = odd_range(11, 51);
    let one = FSLPresentation::new(1, 0, vec![[1; 6]]).unwrap();
    let two = FSLPresentation::new(3, 0, vec![[1, 2, 3, 1, 2, 3], [1, 2, 3, 1, 2, 3]]).unwrap();
    let t = Instant::now();
    let s1 = growth_series(&SeriesKind::Fsl(one), &rs).unwrap();
    let t1 = t.elapsed();
    let t = Instant::now();
    let s2 = growth_series(&SeriesKind::Fsl(two), &rs).unwrap();
    let t2 = t.elapsed();
    let (l1, l2) = (fit_of(&s1), fit_of(&s2));
    let limit = Duration::from_secs(120);
    let pass = s1.is_increasing() && (l1 - 2.0 * V8).abs() <= 0.2 && (l2 - 4.0 * V8).abs() <= 0.4 && t1 < limit && t2 < limit;
    outcome(
        pass,
        format!(
            "c=1: L = {l1:.6} (gap {:.4}, tol 0.2), increasing = {}, {t1:.2?}; c=2: L = {l2:.6} (gap {:.4}, tol 0.4), {t2:.2?}",
            l1 - 2.0 * V8,
            s1.is_increasing(),
            l2 - 4.0 * V8
        ),
    )
}

/// `θ = π + α` with internal angles `α` whose vertex sums stay below `π`.
fn random_appendix_theta(rng: &mut ChaCha8Rng) -> ([f64; 6], AngleSextuple) {
    let alpha: [f64; 6] = std::array::from_fn(|_| rng.random_range(0.05..FRAC_PI_3 - 0.02));
    (alpha, AngleSextuple::new(alpha.map(|a| PI + a)).unwrap())
}

fn appendix_criterion() -> Outcome {
    let third = AngleSextuple::uniform(2.0 * PI / 3.0).unwrap();
    let lim = appendix_limit(&third).unwrap();
    let vol = truncated_tet_volume(&DihedralAngles::new([FRAC_PI_3; 6]).unwrap()).unwrap();
    let check = appendix_growth_check(&third, &odd_range(11, 201)).unwrap();
    let l = fit_of(&check.series);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (alpha, theta) = random_appendix_theta(&mut rng);
        let a = appendix_limit(&theta).unwrap();
        let v = truncated_tet_volume(&DihedralAngles::new(alpha).unwrap()).unwrap();
        worst = worst.max((a - v).abs());
    }
    let pass = (lim - V3).abs() <= 1e-9 && (vol - V3).abs() <= 1e-6 && (l - V3).abs() <= 0.05 && worst <= 1e-6;
    outcome(
        pass,
        format!(
            "appendix_limit {lim:.12} vs 3Λ(π/3) {V3:.12}; tetvol {vol:.12}; series L = {l:.6} (gap {:.4}, tol 0.05, {} points, {} incoherent); random θ max gap {worst:.3e}",
            l - V3,
            check.series.points.len(),
            check.incoherent.len()
        ),
    )
}

fn extremum_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    let mut nu_max = f64::NEG_INFINITY;
    let n = 100;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let g = |m: usize| PI * m as f64 / (n - 1) as f64;
                nu_max = nu_max.max(nu(g(i), g(j), g(k)));
            }
        }
    }
    for _ in 0..100_000 {
        nu_max = nu_max.max(nu(rng.random_range(0.0..PI), rng.random_range(0.0..PI), rng.random_range(0.0..PI)));
    }

    let mut l_max = f64::NEG_INFINITY;
    for _ in 0..1_000_000 {
        // Uniform on the simplex Σa + Σb ≤ 2π, then clipped to [0, π].
        let mut x: [f64; 8] = std::array::from_fn(|_| -rng.random::<f64>().ln());
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v = (*v / s * 2.0 * PI).min(PI));
        l_max = l_max.max(big_l([x[0], x[1], x[2], x[3]], [x[4], x[5], x[6]]));
    }
    let l_center = big_l([FRAC_PI_4; 4], [FRAC_PI_4; 3]);

    let (mut g_min, mut g_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..1_000_000 {
        let a = rng.random_range(0.0..2.0 * PI);
        let b = rng.random_range(0.0..2.0 * PI - a);
        let g = gamma_two(a, b);
        g_min = g_min.min(g);
        g_max = g_max.max(g);
    }
    let v3 = 3.0 * lobachevsky(FRAC_PI_3);

    let mut sym = 0.0f64;
    for _ in 0..100 {
        let (alpha, theta) = random_appendix_theta(&mut rng);
        let a = alpha.map(|x| Complex64::from_polar(1.0, x));
        let conj = a.map(|z| z.conj());
        let v = volume_from_parameters(&a).unwrap().volume;
        let vc = volume_from_parameters(&conj).unwrap().volume;
        let pv = potential_v(&theta).unwrap();
        let tv = truncated_tet_volume(&DihedralAngles::new(alpha).unwrap()).unwrap();
        sym = sym.max((v - vc).abs()).max((pv - tv).abs());
    }

    let pass = nu_max <= 1e-10
        && l_max <= V8 + 1e-9
        && (l_center - V8).abs() <= 1e-9
        && g_min >= -v3 - 1e-10
        && g_max <= v3 + 1e-10
        && sym <= 1e-9;
    outcome(
        pass,
        format!(
            "max ν {nu_max:.3e}; max L {l_max:.9} (v8 {V8:.9}), L(π/4) - v8 = {:.1e}; Γ ∈ [{g_min:.9}, {g_max:.9}] (±{v3:.9}); volume symmetry max gap {sym:.3e}",
            l_center - V8
        ),
    )
}

fn factorial_criterion() -> Outcome {
    let t = Instant::now();
    let mut worst = (0.0f64, 0, 0);
    for r in odd_range(3, 501) {
        let l = lvl(r);
        for n in 1..r as i64 {
            let x = factorial_asymptotic_residual(n, &l).unwrap().abs() / (r as f64).ln();
            if x > worst.0 {
                worst = (x, r, n);
            }
        }
    }
    let elapsed = t.elapsed();
    outcome(
        worst.0 <= FACTORIAL_C && elapsed < Duration::from_secs(30),
        format!("C' = {FACTORIAL_C}; max |residual|/log r = {:.6} at r={}, n={}; {elapsed:.2?}", worst.0, worst.1, worst.2),
    )
}

fn pachner_criterion() -> Outcome {
    let (a, b) = seeds::pachner_pair();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [5, 7] {
        let l = lvl(r);
        let x = tv_state_sum(&a, &l).unwrap();
        let y = tv_state_sum(&b, &l).unwrap();
        let rel = (x.value - y.value).abs() / x.value.abs();
        let res = x.imaginary_residue.max(y.imaginary_residue);
        pass &= rel <= 1e-9 && res < 1e-8;
        parts.push(format!("r={r}: {:.15} vs {:.15} (rel {rel:.1e}, residue {res:.1e})", x.value, y.value));
    }
    outcome(pass, parts.join("; "))
}

fn degenerate_criterion() -> Outcome {
    let d = DihedralAngles::new([0.0; 6]).unwrap();
    let v = richardson_limit(&d, 1e-3).unwrap().volume;
    outcome((v - V8).abs() <= 1e-4, format!("Richardson volume {v:.9} vs v8 {V8:.9} (gap {:.2e})", v - V8))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("central-color convergence", central_convergence),
        ("bound scan", bound_scan_criterion),
        ("symmetry identities", symmetry_identities),
        ("fundamental shadow links", fsl_criterion),
        ("appendix dual formula", appendix_criterion),
        ("extremum properties", extremum_criterion),
        ("factorial asymptotics", factorial_criterion),
        ("state-sum invariance", pachner_criterion),
        ("degenerate tetvol limit", degenerate_criterion),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += !o.pass as u32;
        println!("criterion {} ({name}): {} | {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() as u32 - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
