mod common;

use common::{dense_solve, max_rel_err, toeplitz};
use fotune::frac::{fopid_discrete, oustaloup_ct};
use fotune::io::{data_from_csv, data_to_csv};
use fotune::lti::{
    cascade_impulse_response, closed_loop_impulse, conv_trunc, deconvolve, impulse_response,
    poly_mul, tustin, tustin_factored, ContinuousTf,
};
use fotune::objective::{itae_from_t, saturated_weight, WeightScheme};
use fotune::optimize::{pso_minimize, Bounds, PsoConfig};
use fotune::{DataRecord, FoPidParams, OustaloupConfig, Sequence};
use num_complex::Complex64;
use proptest::prelude::*;

const TS: f64 = 0.05;

/// Operators with a geometrically decaying inverse: |a_0| >= 0.1 and the tail
/// carries at most half of |a_0| in 1-norm.
fn well_conditioned(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    (
        prop_oneof![0.1f64..5.0, -5.0f64..-0.1],
        prop::collection::vec(-1.0f64..1.0, 0..max_len),
    )
        .prop_map(|(a0, tail)| {
            let l1: f64 = tail.iter().map(|v| v.abs()).sum();
            let scale = if l1 > 0.0 { 0.5 * a0.abs() / l1 } else { 0.0 };
            std::iter::once(a0)
                .chain(tail.into_iter().map(|v| v * scale))
                .collect()
        })
}

fn seq(v: Vec<f64>) -> Sequence {
    Sequence::new(v, TS).unwrap()
}

/// Stable CT transfer function built from random real poles and a zero.
fn stable_tf() -> impl Strategy<Value = ContinuousTf> {
    (
        prop::collection::vec(0.2f64..20.0, 1..5),
        -5.0f64..5.0,
        0.1f64..10.0,
    )
        .prop_map(|(poles, zero, k)| {
            let den = poles
                .iter()
                .fold(vec![1.0], |acc, p| poly_mul(&acc, &[1.0, *p]));
            ContinuousTf::new(vec![k, k * zero], den).unwrap()
        })
}

fn phi_strategy() -> impl Strategy<Value = FoPidParams> {
    (
        0.0f64..10.0,
        0.0f64..10.0,
        0.0f64..10.0,
        0.0f64..2.0,
        0.0f64..2.0,
    )
        .prop_map(|(a, b, c, l, m)| FoPidParams::new(a, b, c, l, m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deconvolution_round_trip(a in well_conditioned(200), x in prop::collection::vec(-10.0f64..10.0, 1..200)) {
        let n = a.len().min(x.len());
        let a = seq(a[..n].to_vec());
        let x = seq(x[..n].to_vec());
        let b = conv_trunc(&a, &x).unwrap();
        let back = deconvolve(&a, &b).unwrap();
        prop_assert!(max_rel_err(back.values(), x.values()) <= 1e-9);
    }

    #[test]
    fn forward_substitution_matches_dense_solver(a in well_conditioned(120), b in prop::collection::vec(-10.0f64..10.0, 120)) {
        let n = a.len();
        let b = b[..n].to_vec();
        let fast = deconvolve(&seq(a.clone()), &seq(b.clone())).unwrap();
        let oracle = dense_solve(toeplitz(&a), b);
        prop_assert!(max_rel_err(fast.values(), &oracle) <= 1e-10);
    }

    #[test]
    fn convolution_commutes(a in prop::collection::vec(-3.0f64..3.0, 1..60), b in prop::collection::vec(-3.0f64..3.0, 1..60)) {
        let n = a.len().min(b.len());
        let (a, b) = (seq(a[..n].to_vec()), seq(b[..n].to_vec()));
        let ab = conv_trunc(&a, &b).unwrap();
        let ba = conv_trunc(&b, &a).unwrap();
        prop_assert!(max_rel_err(ab.values(), ba.values()) <= 1e-14);
    }

    #[test]
    fn tustin_preserves_dc_gain(g in stable_tf(), ts in 0.001f64..1.0) {
        let dc = g.dc_gain().unwrap();
        let one = Complex64::new(1.0, 0.0);
        let d: Complex64 = tustin_factored(&g, ts).unwrap().iter().map(|s| s.eval(one)).product();
        prop_assert!((d.re - dc).abs() <= 1e-9 * dc.abs(), "{} vs {}", d.re, dc);
    }

    #[test]
    fn tustin_matches_frequency_warping(g in stable_tf(), ts in 0.01f64..0.5, frac in 0.01f64..0.9) {
        // G_d(e^{jwT}) = G(j (2/T) tan(wT/2))
        let w = frac * std::f64::consts::PI / ts;
        let z = Complex64::from_polar(1.0, w * ts);
        let d: Complex64 = tustin_factored(&g, ts).unwrap().iter().map(|s| s.eval(z)).product();
        let c = g.freq_response(2.0 / ts * (w * ts / 2.0).tan());
        prop_assert!((d - c).norm() <= 1e-8 * c.norm().max(1e-12));
    }

    #[test]
    fn series_is_convolution(g1 in stable_tf(), g2 in stable_tf()) {
        let n = 150;
        let d1 = tustin(&g1, TS).unwrap();
        let d2 = tustin(&g2, TS).unwrap();
        let both = cascade_impulse_response(&[d1.clone(), d2.clone()], n, TS);
        let conv = conv_trunc(&impulse_response(&d1, n), &impulse_response(&d2, n)).unwrap();
        prop_assert!(max_rel_err(both.values(), conv.values()) <= 1e-10);
    }

    #[test]
    fn closed_loop_identity(g in stable_tf(), phi in phi_strategy()) {
        let n = 200;
        let p = cascade_impulse_response(&tustin_factored(&g, TS).unwrap(), n, TS);
        let c = fopid_discrete(&phi, &OustaloupConfig::default(), TS, n).unwrap();
        let l = conv_trunc(&p, &c.impulse).unwrap();
        if let Ok(t) = closed_loop_impulse(&p, &c.impulse) {
            // t + (p*c)*t = p*c
            let lhs = t.add(&conv_trunc(&l, &t).unwrap()).unwrap();
            // Residual measured against the size of the terms being summed.
            let abs = |s: &Sequence| seq(s.values().iter().map(|v| v.abs()).collect());
            let terms = conv_trunc(&abs(&l), &abs(&t)).unwrap().add(&abs(&t)).unwrap();
            prop_assume!(terms.values().iter().all(|v| v.is_finite() && *v < 1e100));
            for k in 0..=n {
                let err = (lhs.values()[k] - l.values()[k]).abs();
                prop_assert!(err <= 1e-10 * terms.values()[k].max(l.values()[k].abs()) + 1e-300);
            }
        }
    }

    #[test]
    fn controller_is_linear_in_gains(phi in phi_strategy(), s in 0.1f64..5.0) {
        let n = 100;
        let cfg = OustaloupConfig::default();
        let c = fopid_discrete(&phi, &cfg, TS, n).unwrap();
        let scaled = FoPidParams::new(phi.k_fp * s, phi.k_fi * s, phi.k_fd * s, phi.lambda, phi.mu);
        let cs = fopid_discrete(&scaled, &cfg, TS, n).unwrap();
        let expect = c.impulse.scaled(s).unwrap();
        prop_assert!(max_rel_err(cs.impulse.values(), expect.values()) <= 1e-12);
    }

    #[test]
    fn oustaloup_midband_slope(gamma in -0.95f64..0.95) {
        prop_assume!(gamma.abs() > 1e-3);
        let cfg = OustaloupConfig::default();
        let f = oustaloup_ct(gamma, &cfg).unwrap();
        let c = cfg.center();
        let db = |w: f64| 20.0 * f.freq_response(w).norm().log10();
        for k in -2..2 {
            let w = c * 10f64.powi(k);
            let slope = db(10.0 * w) - db(w);
            prop_assert!((slope - 20.0 * gamma).abs() <= 1.0, "slope {} at {}", slope, w);
            let phase = f.freq_response(w).arg().to_degrees();
            prop_assert!((phase - 90.0 * gamma).abs() <= 5.0);
        }
    }

    #[test]
    fn saturated_weight_is_bounded_and_increasing(alpha in 0.01f64..100.0, a in 0.0f64..1e6, b in 0.0f64..1e6) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (slo, shi) = (saturated_weight(lo * alpha, alpha), saturated_weight(hi * alpha, alpha));
        prop_assert!(shi < alpha);
        prop_assert!(slo <= shi);
        if lo < hi {
            prop_assert!(slo < shi || hi - lo < 1e-9 * hi);
        }
    }

    #[test]
    fn index_is_nonnegative(t in prop::collection::vec(-2.0f64..2.0, 1..100), r0 in -5.0f64..5.0) {
        let t = seq(t);
        prop_assert!(itae_from_t(&t, r0, &WeightScheme::linear(TS)) >= 0.0);
        prop_assert!(itae_from_t(&t, r0, &WeightScheme::saturated(TS, 1.0)) >= 0.0);
    }

    #[test]
    fn positive_weight_scaling_keeps_the_argmin(
        ts in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 30), 2..8),
        s in 0.01f64..100.0,
    ) {
        let w = WeightScheme::linear(TS);
        let ws = WeightScheme::linear(TS * s);
        let argmin = |w: &WeightScheme| {
            ts.iter()
                .map(|t| itae_from_t(&seq(t.clone()), 1.0, w))
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0
        };
        let (i, j) = (argmin(&w), argmin(&ws));
        let ji = itae_from_t(&seq(ts[i].clone()), 1.0, &w);
        let jj = itae_from_t(&seq(ts[j].clone()), 1.0, &w);
        prop_assert!(i == j || (ji - jj).abs() <= 1e-12 * ji.abs());
    }

    #[test]
    fn csv_round_trip_is_bit_exact(
        u in prop::collection::vec(prop::num::f64::NORMAL, 1..50),
        y in prop::collection::vec(prop::num::f64::NORMAL, 50),
        ts in 1e-4f64..10.0,
    ) {
        let n = u.len();
        prop_assume!(u[0] != 0.0);
        let d = DataRecord::new(
            Sequence::new(u, ts).unwrap(),
            Sequence::new(y[..n].to_vec(), ts).unwrap(),
            "prop",
        ).unwrap();
        let back = data_from_csv(&data_to_csv(&d)).unwrap();
        prop_assert_eq!(back.sample_time().to_bits(), ts.to_bits());
        for (a, b) in back.u().values().iter().zip(d.u().values()).chain(back.y().values().iter().zip(d.y().values())) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pso_stays_in_box_and_never_regresses(
        lo in prop::collection::vec(-5.0f64..0.0, 3),
        width in prop::collection::vec(0.1f64..5.0, 3),
        seed in any::<u64>(),
    ) {
        let hi: Vec<f64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
        let bounds = Bounds::new(lo, hi).unwrap();
        let cfg = PsoConfig { population: 12, max_evaluations: 600, seed, parallel: false, ..PsoConfig::default() };
        let f = |x: &[f64]| {
            assert!(bounds.contains(x));
            x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>()
        };
        let r = pso_minimize(f, &bounds, &cfg, &[]).unwrap();
        prop_assert!(bounds.contains(&r.best_x));
        for w in r.trace.entries.windows(2) {
            prop_assert!(w[1].best_f <= w[0].best_f);
        }
        let again = pso_minimize(f, &bounds, &cfg, &[]).unwrap();
        prop_assert_eq!(r.best_f.to_bits(), again.best_f.to_bits());
    }
}
