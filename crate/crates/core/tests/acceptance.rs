//! Acceptance criteria 1–10, one verdict line each.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lowres_core::dynamics::{hbar_scan, quantum_expectation, ClosedForm};
use lowres_core::entanglement::{linear_entropy_series, linear_entropy_short_time, ShortTimeMatch};
use lowres_core::fockspace::{evolve, linear_entropy, observables, reduce, DEFAULT_TAIL_EPS};
use lowres_core::model::{InitialConditions, Mode, ModelParams};
use lowres_core::numeric::linspace;
use lowres_core::resolution::{
    cat_distribution, classical_position, coarse_newton_check, commutator_indicator, default_window, fringe_visibility,
    gaussian_indicator_reference, gaussian_on_lattice, harmonic_ehrenfest, schmidt_at_resolution, Detection,
};
use lowres_core::revivals::{
    cat_coefficients, cat_state_fidelity, mixture_convergence, parseval_sum, reconstruction_residual,
};
use lowres_core::selftest;
use num_complex::Complex64;

struct Verdict {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn kerr_case() -> (ModelParams, InitialConditions) {
    let params = ModelParams { omega1: 1.0, omega2: 1.0, g1: 0.05, g2: 0.05, g: 0.02, hbar: 1.0, mass: 1.0 };
    let ics = InitialConditions::from_amplitudes(Complex64::new(2.0, 0.0), Complex64::from_polar(2.0, PI / 3.0), 1.0);
    (params, ics)
}

fn c1_oracle_equivalence() -> Verdict {
    let (p, i) = kerr_case();
    let (worst, elapsed) = timed(|| {
        single_thread(|| {
            linspace(0.0, 20.0, 50)
                .iter()
                .map(|&t| {
                    let obs = observables(&evolve(&p, &i, t, DEFAULT_TAIL_EPS).unwrap(), &p);
                    let a = quantum_expectation(&p, &i, t, Mode::One, ClosedForm::OracleCorrected);
                    let b = quantum_expectation(&p, &i, t, Mode::Two, ClosedForm::OracleCorrected);
                    [a.q - obs[0], a.p - obs[1], b.q - obs[2], b.p - obs[3]].iter().map(|d| d.abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        })
    });
    Verdict {
        id: "1",
        passed: worst < 1e-6 && elapsed < Duration::from_secs(10),
        detail: format!(
            "max |closed − oracle| = {worst:.3e} (tol 1e-6), {:.3} s single-threaded (limit 10 s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn c2_entropy_equivalence() -> Verdict {
    let (p, i) = kerr_case();
    let worst = linspace(0.0, 20.0, 50)
        .iter()
        .map(|&t| {
            let series = linear_entropy_series(&p, &i, t, DEFAULT_TAIL_EPS).unwrap();
            let oracle = linear_entropy(&reduce(&evolve(&p, &i, t, DEFAULT_TAIL_EPS).unwrap(), Mode::One));
            (series - oracle).abs()
        })
        .fold(0.0, f64::max);
    let mut matches = Vec::new();
    for k in 1..=20 {
        let t = 0.015 * k as f64;
        let exact = linear_entropy_series(&p, &i, t, DEFAULT_TAIL_EPS).unwrap();
        if exact < 1e-3 {
            matches.push(linear_entropy_short_time(&p, &i, t).matching(exact, 0.01));
        }
    }
    let z_only = !matches.is_empty() && matches.iter().all(|m| *m == ShortTimeMatch::ZForm);
    let s_only = !matches.is_empty() && matches.iter().all(|m| *m == ShortTimeMatch::SForm);
    let which = if z_only {
        "|z|-form"
    } else if s_only {
        "S-form"
    } else {
        "neither uniquely"
    };
    Verdict {
        id: "2",
        passed: worst < 1e-8 && (z_only || s_only),
        detail: format!(
            "max |series − oracle| = {worst:.3e} (tol 1e-8); short-time match over {} points with E < 1e-3: {which}",
            matches.len()
        ),
    }
}

fn c3_hbar_limit() -> Verdict {
    let p = ModelParams { omega1: 1.0, omega2: 1.0, g1: 0.01, g2: 0.01, g: 0.005, hbar: 1.0, mass: 1.0 };
    let s = 20f64;
    let i = InitialConditions { q10: s.sqrt(), p10: 0.0, q20: 0.0, p20: s.sqrt() };
    let t = 1.0;
    let hbars = [1.0, 0.1, 0.01, 0.001];
    let target = p.g1 * s * t / 2.0;
    let printed = hbar_scan(&p, &i, t, &hbars, Mode::One, ClosedForm::AsPrinted).unwrap();
    let corrected = hbar_scan(&p, &i, t, &hbars, Mode::One, ClosedForm::OracleCorrected).unwrap();
    let gaps: Vec<f64> = printed.iter().map(|r| (r.residual_angle - target).abs()).collect();
    let converging = gaps.windows(2).all(|w| w[1] < w[0]);
    let limit_ok = gaps[gaps.len() - 1] < 1e-4;

    let shorts: Vec<_> = hbars.iter().map(|&h| linear_entropy_short_time(&p.with_hbar(h), &i, t)).collect();
    let spread = |f: &dyn Fn(usize) -> f64| {
        let v: Vec<f64> = (0..shorts.len()).map(f).collect();
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        (min, (max - min) / max)
    };
    let (z_min, z_spread) = spread(&|k| shorts[k].z_form);
    let (s_min, s_spread) = spread(&|k| shorts[k].s_form);
    let floor_ok = z_min > 0.0 && s_min > 0.0 && z_spread < 1e-6 && s_spread < 1e-6;
    let series: Vec<String> = hbars
        .iter()
        .map(|&h| format!("{:.6e}", linear_entropy_series(&p.with_hbar(h), &i, t, DEFAULT_TAIL_EPS).unwrap()))
        .collect();
    let floor_limit = 1.0 - 1.0 / (1.0 + s * s * p.g * p.g * t * t).sqrt();
    Verdict {
        id: "3",
        passed: converging && limit_ok && floor_ok,
        detail: format!(
            "printed residual_angle − g₁S₁t/2 by ħ: [{}] (tol 1e-4 at smallest ħ, monotone {converging}); \
             corrected-form angles [{}]; short-time floor |z|-form {:.6e} spread {z_spread:.1e}, S-form {:.6e} spread {s_spread:.1e}; \
             exact series [{}] vs ħ→0 limit {floor_limit:.6e}",
            printed.iter().map(|r| format!("{:.3e}", r.residual_angle - target)).collect::<Vec<_>>().join(", "),
            corrected.iter().map(|r| format!("{:.3e}", r.residual_angle)).collect::<Vec<_>>().join(", "),
            shorts[0].z_form,
            shorts[0].s_form,
            series.join(", ")
        ),
    }
}

fn c4_cat_fidelity() -> Verdict {
    let p = ModelParams { g1: 0.05, g: 0.0, ..Default::default() };
    let i = InitialConditions::from_amplitudes(Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0), 1.0);
    let ((infid, parseval, recon), elapsed) = timed(|| {
        let mut infid = 0.0f64;
        let mut parseval = 0.0f64;
        let mut recon = 0.0f64;
        for (r, s) in [(1u64, 2u64), (1, 3), (3, 2)] {
            infid = infid.max(1.0 - cat_state_fidelity(&p, &i, r, s, DEFAULT_TAIL_EPS).unwrap());
            parseval = parseval.max((parseval_sum(&cat_coefficients(r, s).unwrap()) - 1.0).abs());
            recon = recon.max(reconstruction_residual(r, s, 100).unwrap());
        }
        (infid, parseval, recon)
    });
    Verdict {
        id: "4",
        passed: infid < 1e-6 && parseval < 1e-10 && recon < 1e-10 && elapsed < Duration::from_secs(5),
        detail: format!(
            "max 1 − fidelity = {infid:.3e} (tol 1e-6); Parseval {parseval:.1e}, reconstruction {recon:.1e} (tol 1e-10); {:.3} s (limit 5 s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn c5_statistical_mixture() -> Verdict {
    // S₂/ħ = 50, ħgt = 1, |z₁|² = 4
    let p = ModelParams { g: 0.1, ..Default::default() };
    let i = InitialConditions { q10: 8f64.sqrt(), p10: 0.0, q20: 50f64.sqrt(), p20: 0.0 };
    let r = mixture_convergence(&p, &i, 10.0, DEFAULT_TAIL_EPS).unwrap();
    let gap = (r.purity - r.mixture_purity).abs();
    Verdict {
        id: "5",
        passed: gap < 1e-3 && r.max_offdiag < 1e-8,
        detail: format!(
            "|purity − mixture purity| = {gap:.3e} (tol 1e-3); max off-diagonal = {:.3e} (tol 1e-8); \
             pairs with n − n′ = 6 sit 0.28 rad from 2π and keep |D| ≈ e^{{−50 sin²3}} = {:.3e}",
            r.max_offdiag,
            (-50.0 * 3f64.sin().powi(2)).exp()
        ),
    }
}

fn visibilities(q: f64, dxs: &[f64]) -> Vec<f64> {
    let w = default_window(q, 1.0);
    dxs.iter().map(|&dx| fringe_visibility(&cat_distribution(q, 1.0, 0.2, dx, 0.005).unwrap(), w).unwrap()).collect()
}

fn c6a_visibility_monotone() -> Verdict {
    let (rows, elapsed) = timed(|| (visibilities(1.0, &[0.01, 0.2, 0.5]), visibilities(3.0, &[0.01, 0.5, 3.5])));
    let mono = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    Verdict {
        id: "6 (visibility)",
        passed: mono(&rows.0) && mono(&rows.1) && elapsed < Duration::from_secs(2),
        detail: format!(
            "q=b: {:?}; q=3b: {:?}; {:.3} s (limit 2 s)",
            rows.0.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            rows.1.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
    }
}

fn c6b_coarse_panel_resolved() -> Verdict {
    let d = cat_distribution(3.0, 1.0, 0.2, 3.5, 0.005).unwrap();
    let reading = classical_position(&d, 0.05).unwrap();
    let (_, p) = d.max_bin();
    Verdict {
        id: "6 (resolved)",
        passed: matches!(reading, Detection::Resolved(_)),
        detail: format!("δx=3.5b, q=3b: {reading:?}; dominant detector holds {p:.4} of the mass (needs ≥ 0.95)"),
    }
}

fn c7_commutator_indicator() -> Verdict {
    let mut worst = 0.0f64;
    for r in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let got = commutator_indicator(&gaussian_on_lattice(1.0, r).unwrap());
        let want = gaussian_indicator_reference(1.0, r);
        worst = worst.max((got - want).abs() / want);
    }
    let fine = commutator_indicator(&gaussian_on_lattice(1.0, 0.01).unwrap());
    let coarse = commutator_indicator(&gaussian_on_lattice(1.0, 10.0).unwrap());
    Verdict {
        id: "7",
        passed: worst < 0.02 && fine >= 0.999 && coarse <= 1e-3,
        detail: format!("max relative deviation {worst:.3e} (tol 2%); δx=0.01σ → {fine:.6}; δx=10σ → {coarse:.3e}"),
    }
}

fn c8_ehrenfest_newton() -> Verdict {
    let amplitude = 2.0;
    let fine = harmonic_ehrenfest(amplitude, 1.0, 1.0, 1.0, 200, 1e-3).unwrap();
    let times = linspace(0.0, 2.0 * PI, 129);
    let coarse = coarse_newton_check(30.0, 1.0, 1.0, 10.0, &times, 0.05).unwrap();
    Verdict {
        id: "8",
        passed: fine < 1e-3 * amplitude && coarse.within_one_bin(),
        detail: format!(
            "fine residual {fine:.3e} (tol {:.1e}); coarse δx=10b: {}/{} readings resolved, max detector offset {} (tol 1), max |x_c − x_N| = {:.3}",
            1e-3 * amplitude,
            coarse.resolved,
            coarse.samples,
            coarse.max_bin_offset,
            coarse.max_deviation
        ),
    }
}

fn c9_schmidt() -> Verdict {
    let coarse = schmidt_at_resolution(0.5, 1.0, 10.0).unwrap();
    let fine = schmidt_at_resolution(0.5, 1.0, 0.1).unwrap();
    Verdict {
        id: "9",
        passed: coarse.joint_distribution_defect < 1e-9 && fine.joint_distribution_defect > 1e-3,
        detail: format!(
            "defect at 10b = {:.3e} (tol 1e-9); at 0.1b = {:.3e} (needs > 1e-3)",
            coarse.joint_distribution_defect, fine.joint_distribution_defect
        ),
    }
}

fn c10_selftest() -> Verdict {
    let (outcomes, elapsed) = timed(|| single_thread(selftest::run_all));
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    Verdict {
        id: "10",
        passed: failed.is_empty() && elapsed < Duration::from_secs(60),
        detail: format!(
            "{} checks, failed {:?}, {:.3} s single-threaded (limit 60 s)",
            outcomes.len(),
            failed,
            elapsed.as_secs_f64()
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Verdict; 11] = [
        c1_oracle_equivalence,
        c2_entropy_equivalence,
        c3_hbar_limit,
        c4_cat_fidelity,
        c5_statistical_mixture,
        c6a_visibility_monotone,
        c6b_coarse_panel_resolved,
        c7_commutator_indicator,
        c8_ehrenfest_newton,
        c9_schmidt,
        c10_selftest,
    ];
    let mut failures = 0;
    for c in criteria {
        let v = c();
        if !v.passed {
            failures += 1;
        }
        println!("criterion {}: {} | {}", v.id, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} checks failed", failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
