use proptest::prelude::*;
use wsl_core::distance::{distance_along, mesh_error_bound};
use wsl_core::families::{collapsing_family, round_sphere, scaled_sine, smooth_samples};
use wsl_core::geometry::{h_residual_from, scalar_from};
use wsl_core::interp::MonotoneCubic;
use wsl_core::math::PI;
use wsl_core::sequence::{extract_limit, ik_window, Sequence};
use wsl_core::swif::{h_bar, rate_certificate, swif_upper_bound, SwifOptions};
use wsl_core::{sequence::IkWindow, RotSymManifold};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn residual_is_a_positive_multiple_of_scalar(f in 1e-3f64..10.0, d1 in -3.0f64..3.0, d2 in -50.0f64..50.0) {
        let scalar = scalar_from(f, d1, d2);
        let res = h_residual_from(f, d1, d2);
        let expected = 0.375 * f.powf(1.5) * scalar;
        prop_assert!((res - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
        if scalar.abs() > 1e-9 {
            prop_assert_eq!(res.signum(), scalar.signum());
        }
    }

    #[test]
    fn monotone_cubic_never_overshoots(steps in prop::collection::vec(0.0f64..1.0, 3..30), x in 0.0f64..1.0) {
        let n = steps.len();
        let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let mut acc = 0.0;
        let ys: Vec<f64> = steps.iter().map(|d| { acc += d; acc }).collect();
        let p = MonotoneCubic::new(xs, ys.clone());
        let t = x * (n - 1) as f64;
        let i = (t.floor() as usize).min(n - 2);
        let v = p.eval(t);
        prop_assert!(v >= ys[i] - 1e-12 && v <= ys[i + 1] + 1e-12);
        prop_assert!(p.eval((t + 1e-3).min((n - 1) as f64)) >= v - 1e-12);
    }

    #[test]
    fn rate_certificate_decreases(d in 0.1f64..10.0, d0 in 0.1f64..10.0, k in 2u32..1000, i in 0u32..1000) {
        let a = rate_certificate(d, d0, k, i).unwrap();
        let b = rate_certificate(d, d0, k, i + 1).unwrap();
        prop_assert!(b < a && b > 0.0);
    }

    #[test]
    fn h_bar_dominates_both_parts(lambda in 0.0f64..5.0, eps in 0.0f64..2.0, d0 in 0.1f64..10.0) {
        let hb = h_bar(lambda, eps, d0);
        prop_assert!(hb >= (lambda * (d0 + lambda / 4.0)).sqrt() - 1e-15);
        prop_assert!(hb >= d0 * (eps * eps + 2.0 * eps).sqrt() - 1e-15);
    }

    #[test]
    fn smoothing_fixes_poles(v in prop::collection::vec(0.0f64..1.0, 5..200), w in 1usize..8) {
        let mut v = v;
        let n = v.len();
        v[0] = 0.0;
        v[n - 1] = 0.0;
        let s = smooth_samples(&v, w);
        prop_assert_eq!(s[0], 0.0);
        prop_assert_eq!(s[n - 1], 0.0);
    }

    #[test]
    fn collapsing_members_are_one_lipschitz(j in 1u32..40) {
        let m = RotSymManifold::with_grid(collapsing_family(j).unwrap(), 1025).unwrap();
        let v = m.validate_hypotheses(2.0, 0.0);
        prop_assert!(v.scalar_ok);
        prop_assert!(v.max_abs_slope <= 1.0 + 1e-4);
        prop_assert!((m.sym_min_area() - 4.0 * PI / ((2 * j + 2) as f64).powi(2)).abs() < 1e-10);
    }

    #[test]
    fn windows_nest(amp in 0.3f64..1.0, k in 2u32..40, dk in 1u32..40) {
        let members = vec![scaled_sine(amp, 1.0).unwrap(); 3];
        let rep = extract_limit(&Sequence::new(vec![1, 2, 3], members, PI).unwrap()).unwrap();
        let lim = rep.limit().unwrap();
        if 1.0 / k as f64 >= amp {
            return Ok(());
        }
        let w = ik_window(lim, k).unwrap();
        let w2 = ik_window(lim, k + dk).unwrap();
        prop_assert!(w2.a <= w.a && w2.b >= w.b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distances_respect_the_length_bounds(sp in 0.0f64..PI, sq in 0.0f64..PI, dt in 0.0f64..PI) {
        let m = RotSymManifold::new(round_sphere(1.0).unwrap()).unwrap();
        let d = distance_along(&m, sp, sq, dt, 96).unwrap();
        prop_assert!(d >= (sp - sq).abs() - 1e-14);
        prop_assert!(d <= PI + 1e-12);
        let back = distance_along(&m, sq, sp, dt, 96).unwrap();
        prop_assert!((d - back).abs() <= mesh_error_bound(96) * d + 1e-12);
        let exact = (sp.cos() * sq.cos() + sp.sin() * sq.sin() * dt.cos()).clamp(-1.0, 1.0).acos();
        prop_assert!(d >= exact * (1.0 - 1e-3) - 1e-9);
        prop_assert!(d <= exact * (1.0 + mesh_error_bound(96)) + 1e-9);
    }

    #[test]
    fn larger_angle_term_never_helps(k in 3u32..30, c in 1.0f64..1.5) {
        let m1 = RotSymManifold::new(round_sphere(1.0).unwrap()).unwrap();
        let m2 = RotSymManifold::new(scaled_sine(c, 1.0).unwrap()).unwrap();
        let a = (1.0 / k as f64).asin();
        let w = IkWindow { k, a, b: PI - a };
        let opts = SwifOptions { sample_lambda: false, ..SwifOptions::default() };
        let r = swif_upper_bound(&m1, &m2, &w, PI, &opts).unwrap();
        prop_assert!(r.bound_with_angle(r.a * 1.5 + 0.1) >= r.bound);
        prop_assert!(r.volumes_1.margins_nonnegative());
    }
}
