use std::f64::consts::PI;

use anyon_core::dimer::{build_weff, find_exceptional_point, EffectiveMatrix, WeffOptions};
use anyon_core::{AnyonParams, Conjugation, FrequencyConvention};
use nalgebra::Vector2;
use num_complex::Complex64;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = AnyonParams> {
    (0.0..=PI, -1.0..=1.0f64, 0.05..5.0f64, 0.01..1.0f64, 0.0..0.5f64).prop_map(|(theta, xi, beta, gamma, j)| {
        AnyonParams::default()
            .with_theta(theta)
            .with_xi(xi)
            .with_beta(beta)
            .with_gamma(gamma)
            .with_coupling(j)
    })
}

fn options() -> impl Strategy<Value = WeffOptions> {
    (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(maintext, analytic, stat_dephasing)| WeffOptions {
        frequency: if maintext { FrequencyConvention::Maintext } else { FrequencyConvention::Appendix },
        conjugation: if analytic { Conjugation::Analytic } else { Conjugation::Modulus },
        stat_dephasing,
    })
}

/// Largest distance between the two eigenvalue pairs under the better of
/// the two pairings.
fn pair_distance(x: &EffectiveMatrix, y: &EffectiveMatrix) -> f64 {
    let [a, b] = x.eigenvalues;
    let [c, d] = y.eigenvalues;
    let straight = (a - c).norm().max((b - d).norm());
    let crossed = (a - d).norm().max((b - c).norm());
    straight.min(crossed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigenvalues_solve_characteristic_polynomial(p in params(), o in options()) {
        let m = build_weff(&p, &o).unwrap();
        let tr = m.a() + m.d();
        let det = m.a() * m.d() - m.b() * m.c();
        let scale = 1.0 + tr.norm() + det.norm().sqrt();
        for lam in m.eigenvalues {
            prop_assert!((lam * lam - tr * lam + det).norm() <= 1e-12 * scale * scale);
        }
        prop_assert!((m.eigenvalues[0] + m.eigenvalues[1] - tr).norm() <= 1e-12 * scale);
    }
}

proptest! {
    #[test]
    fn diagonal_frequencies(p in params()) {
        let m = build_weff(&p, &WeffOptions::default()).unwrap();
        prop_assert!((m.a().im + m.omega_plus).abs() <= 1e-14);
        prop_assert!((m.d().im + m.omega_minus).abs() <= 1e-14);
    }

    #[test]
    fn correlation_sign_invariance(p in params(), o in options()) {
        let plus = build_weff(&p, &o).unwrap();
        let minus = build_weff(&p.with_xi(-p.xi), &o).unwrap();
        prop_assert!(pair_distance(&plus, &minus) <= 1e-12);
        prop_assert!((plus.b() + minus.b()).norm() <= 1e-14);
        prop_assert!((plus.c() + minus.c()).norm() <= 1e-14);
    }

    #[test]
    fn eigenvectors_swap_character(p in params()) {
        let o = WeffOptions::default();
        let plus = build_weff(&p, &o).unwrap();
        let minus = build_weff(&p.with_xi(-p.xi), &o).unwrap();
        prop_assume!(plus.condition < 1e4);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sym = Vector2::new(Complex64::new(s, 0.0), Complex64::new(s, 0.0));
        let anti = Vector2::new(Complex64::new(s, 0.0), Complex64::new(-s, 0.0));
        for (k, lam) in plus.eigenvalues.iter().enumerate() {
            let j = if (minus.eigenvalues[0] - lam).norm() <= (minus.eigenvalues[1] - lam).norm() { 0 } else { 1 };
            let v = plus.right_eigenvectors[k].normalize();
            let w = minus.right_eigenvectors[j].normalize();
            prop_assert!((sym.dotc(&v).norm() - anti.dotc(&w).norm()).abs() <= 1e-9);
            prop_assert!((anti.dotc(&v).norm() - sym.dotc(&w).norm()).abs() <= 1e-9);
            // weight on each deformed mode is unchanged
            prop_assert!((v[0].norm() - w[0].norm()).abs() <= 1e-9);
        }
    }

    #[test]
    fn dissipative_stability(p in params(), o in options()) {
        let m = build_weff(&p, &o).unwrap();
        for (lam, tau) in m.eigenvalues.iter().zip(m.lifetimes) {
            prop_assert!(lam.re <= 0.0);
            if lam.re < 0.0 {
                prop_assert!((tau - 1.0 / -lam.re).abs() <= 1e-12 * tau);
            }
        }
        let protected = p.theta == PI && p.xi.abs() == 1.0;
        if !protected {
            prop_assert!(m.eigenvalues.iter().all(|l| l.re < 0.0));
        }
    }

    #[test]
    fn decay_diagonals_ignore_correlation(p in params()) {
        let o = WeffOptions::default();
        let base = build_weff(&p.with_xi(0.0), &o).unwrap();
        prop_assert!(base.b().norm() <= 1e-14 && base.c().norm() <= 1e-14);
        for xi in [-1.0, -0.5, 0.5, 1.0] {
            let m = build_weff(&p.with_xi(xi), &o).unwrap();
            prop_assert!((m.a() - base.a()).norm() <= 1e-12);
            prop_assert!((m.d() - base.d()).norm() <= 1e-12);
        }
    }
}

#[test]
fn decoherence_free_mode_at_fermion_limit() {
    for xi in [1.0, -1.0] {
        let p = AnyonParams::default().with_theta(PI).with_xi(xi);
        let m = build_weff(&p, &WeffOptions::default()).unwrap();
        let slow = m.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(slow.abs() < 1e-14);
    }
}

#[test]
fn no_exceptional_point_without_bath() {
    let p = AnyonParams::default().with_gamma(0.0).with_xi(1.0);
    let r = find_exceptional_point(&p, (0.0, PI - 1e-3), &WeffOptions::default());
    assert!(r.is_err());
}

#[test]
fn exceptional_point_has_coalesced_eigenvectors() {
    let p = AnyonParams::default().with_xi(1.0);
    let o = WeffOptions::default();
    let ep = find_exceptional_point(&p, (0.0, PI), &o).unwrap();
    let m = build_weff(&p.with_theta(ep.theta), &o).unwrap();
    assert!(m.condition > 1e5, "condition {}", m.condition);
    let away = build_weff(&p.with_theta(ep.theta - 0.3), &o).unwrap();
    assert!(!away.near_defective() && away.condition < 1e2);
}
