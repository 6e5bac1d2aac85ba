//! Property tests for the structural identities the evaluators are built on.

use approx::assert_relative_eq;
use helmsol::fundsol::{
    default_k1, q_solution, sigma_map, NormalizationConstants, Parameters, PointPair,
};
use helmsol::quad::{
    coefficient_a, fa3_decomposed, h43, h43_0_direct, lauricella_fa3, ConfluentParams, H43Params,
    QuadArgs, SolutionIndex,
};
use helmsol::series::{gauss_2f1, hyp_0f1, pochhammer, SeriesOptions};
use proptest::prelude::*;

fn opts(rel_tol: f64) -> SeriesOptions {
    SeriesOptions { rel_tol, max_level: 300, max_terms: 50_000_000 }
}

// a = base + frac stays clear of the integers, where the shifted factorial
// has poles on the negative side
fn offset_real(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo..=hi, 0.05f64..0.95).prop_map(|(k, frac)| k as f64 + frac)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifted_factorial_satisfies_the_recurrence(
        a in offset_real(-3, 3),
        m in -40i32..40,
    ) {
        let lhs = pochhammer(a, m + 1).unwrap();
        let rhs = pochhammer(a, m).unwrap() * (a + m as f64);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
    }

    #[test]
    fn shifted_factorial_reflection_is_a_sign(
        a in offset_real(-3, 3),
        n in 1i32..40,
    ) {
        let product = pochhammer(a, -n).unwrap() * pochhammer(1.0 - a, n).unwrap();
        let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert_relative_eq!(product, expected, max_relative = 1e-10);
    }

    #[test]
    fn gauss_function_obeys_the_euler_transformation(
        a in 0.1f64..1.5,
        b in 0.1f64..1.5,
        c in offset_real(1, 2),
        x in -0.7f64..0.7,
    ) {
        let o = opts(1e-12);
        let lhs = gauss_2f1(a, b, c, x, &o).unwrap().value;
        let rhs = (1.0 - x).powf(c - a - b) * gauss_2f1(c - a, c - b, c, x, &o).unwrap().value;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
    }

    #[test]
    fn limit_function_obeys_the_contiguous_relation(
        c in offset_real(0, 2),
        x in -5.0f64..5.0,
    ) {
        let o = opts(1e-13);
        let v0 = hyp_0f1(c, x, &o).unwrap().value;
        let v1 = hyp_0f1(c + 1.0, x, &o).unwrap().value;
        let v2 = hyp_0f1(c + 2.0, x, &o).unwrap().value;
        assert_relative_eq!(v0, v1 + x / (c * (c + 1.0)) * v2, max_relative = 1e-9);
    }

    #[test]
    fn case_split_coefficient_is_the_index_ratio(s in 1i64..60, q_seed in 0i64..60) {
        let q = q_seed % (s + 1);
        let v = coefficient_a(s, q).unwrap();
        assert_relative_eq!(v, q as f64 / s as f64, max_relative = 1e-14);
        prop_assert!(coefficient_a(s, s + 1).is_err());
        prop_assert!(coefficient_a(-1, 0).is_err());
    }

    #[test]
    fn direct_series_is_symmetric_under_axis_swap(
        a in offset_real(0, 1),
        b1 in 0.1f64..0.9, b2 in 0.1f64..0.9, b3 in 0.1f64..0.9,
        d1 in 0.55f64..1.4, d2 in 0.55f64..1.4, d3 in 0.55f64..1.4,
        x in -0.15f64..0.15, y in -0.15f64..0.15, z in -0.15f64..0.15,
        t in -0.25f64..0.25,
    ) {
        let o = opts(1e-11);
        let base = ConfluentParams { a, b: [b1, b2, b3], d: [d1, d2, d3] };
        let v0 = h43_0_direct(&base, &QuadArgs::new(x, y, z, t), &o).unwrap().value;
        let swapped = ConfluentParams { a, b: [b2, b1, b3], d: [d2, d1, d3] };
        let v1 = h43_0_direct(&swapped, &QuadArgs::new(y, x, z, t), &o).unwrap().value;
        let rotated = ConfluentParams { a, b: [b3, b1, b2], d: [d3, d1, d2] };
        let v2 = h43_0_direct(&rotated, &QuadArgs::new(z, x, y, t), &o).unwrap().value;
        assert_relative_eq!(v0, v1, max_relative = 1e-9);
        assert_relative_eq!(v0, v2, max_relative = 1e-9);
    }

    #[test]
    fn quadruple_series_rejects_arguments_outside_its_region(
        sx in 0.2f64..0.8, sy in 0.2f64..0.8, sz in 0.2f64..0.8,
        scale in 1.05f64..1.9,
        t in -0.3f64..0.3,
    ) {
        let cp = ConfluentParams { a: 0.7, b: [0.3, 0.4, 0.5], d: [0.8, 0.9, 1.1] };
        let s = sx + sy + sz;
        let (x, y, z) = (scale * sx / s, scale * sy / s, scale * sz / s);
        prop_assert!(h43_0_direct(&cp, &QuadArgs::new(x, y, z, t), &opts(1e-10)).is_err());

        // the parent series also caps |t| by 1/(1 + |x| + |y| + |z|)
        let pp = H43Params { a: 0.7, b: [0.3, 0.4, 0.5, 0.6], c4: 0.9, d: [0.8, 0.9, 1.1] };
        let inside = 0.5 * sx / s;
        let tb = 1.0 / (1.0 + inside) + 0.05;
        let args = QuadArgs::new(inside, 0.0, 0.0, tb);
        prop_assert!(h43(&pp, &args, &opts(1e-10)).is_err());
    }

    #[test]
    fn t_axis_derivative_matches_the_parameter_shift(
        a in 0.3f64..0.9,
        t in -0.4f64..0.4,
    ) {
        // on the t axis the series reduces to its fourth direction, where
        // the closed-form derivative is the a -> a - 1 shift scaled by the
        // signed factorial
        let o = opts(1e-12);
        let cp = ConfluentParams { a, b: [0.3, 0.4, 0.5], d: [0.8, 0.9, 1.1] };
        let h = 1e-4;
        let up = h43_0_direct(&cp, &QuadArgs::new(0.0, 0.0, 0.0, t + h), &o).unwrap().value;
        let dn = h43_0_direct(&cp, &QuadArgs::new(0.0, 0.0, 0.0, t - h), &o).unwrap().value;
        let fd = (up - dn) / (2.0 * h);
        let shifted = ConfluentParams { a: a - 1.0, ..cp };
        let closed = pochhammer(a, -1).unwrap()
            * h43_0_direct(&shifted, &QuadArgs::new(0.0, 0.0, 0.0, t), &o).unwrap().value;
        assert_relative_eq!(fd, closed, max_relative = 1e-6, epsilon = 1e-9);
    }

    #[test]
    fn normalization_defaults_keep_the_other_constants_at_one(
        a1 in 0.05f64..0.45, a2 in 0.05f64..0.45, a3 in 0.05f64..0.45,
        p in 3usize..6,
    ) {
        let prm = Parameters { p, alpha: [a1, a2, a3], mu: 0.0 };
        let ks = NormalizationConstants::with_default_k1(&prm).unwrap();
        let k1 = default_k1(&prm).unwrap();
        prop_assert!(k1 > 0.0);
        assert_relative_eq!(ks.k[0], k1);
        for k in &ks.k[1..] {
            assert_relative_eq!(*k, 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sigma_map_reproduces_the_defining_products(
        x1 in 0.05f64..2.0, x2 in 0.05f64..2.0, x3 in 0.05f64..2.0,
        d1 in 0.3f64..1.5, d2 in -1.5f64..1.5, d3 in -1.5f64..1.5,
        extra in -2.0f64..2.0,
        a1 in 0.05f64..0.45, a2 in 0.05f64..0.45, a3 in 0.05f64..0.45,
        mu in -2.0f64..2.0,
        p in 3usize..6,
    ) {
        let x = [x1, x2, x3];
        let mut xs = x.to_vec();
        let mut x0s = vec![x1 + d1, (x2 + d2).abs().max(0.05), (x3 + d3).abs().max(0.05)];
        for k in 3..p {
            xs.push(extra + k as f64 * 0.1);
            x0s.push(extra - 0.3);
        }
        let prm = Parameters { p, alpha: [a1, a2, a3], mu };
        let pt = PointPair::new(xs.clone(), x0s.clone());
        let sc = sigma_map(&pt, &prm).unwrap();
        let r2: f64 = xs.iter().zip(&x0s).map(|(a, b)| (a - b) * (a - b)).sum();
        assert_relative_eq!(sc.r2, r2, max_relative = 1e-14);
        for k in 0..3 {
            assert_relative_eq!(sc.sigma[k] * r2, -4.0 * xs[k] * x0s[k], max_relative = 1e-12);
            assert_relative_eq!(sc.rk2[k], r2 + 4.0 * xs[k] * x0s[k], max_relative = 1e-12);
            prop_assert!(sc.rk2[k] > 0.0);
        }
        assert_relative_eq!(sc.sigma[3], -mu * r2 / 4.0, max_relative = 1e-14);
        assert_relative_eq!(sc.alpha_tot, a1 + a2 + a3 - 1.0 + p as f64 / 2.0);
        assert_relative_eq!(sc.p_factor, r2.powf(-sc.alpha_tot), max_relative = 1e-13);
    }

    #[test]
    fn fundamental_solutions_are_symmetric_in_the_point_pair(
        i in 1u8..=8,
        x1 in 0.05f64..0.2, x2 in 0.05f64..0.2, x3 in 0.05f64..0.2,
        g1 in 0.9f64..1.5, g2 in 0.9f64..1.5, g3 in 0.9f64..1.5,
        a in 0.05f64..0.45,
        mu in -1.0f64..1.0,
    ) {
        let idx = SolutionIndex::new(i).unwrap();
        let prm = Parameters { p: 3, alpha: [a; 3], mu };
        let ks = NormalizationConstants::ones();
        let o = opts(1e-10);
        let x = vec![x1, x2, x3];
        let x0 = vec![x1 + g1, x2 + g2, x3 + g3];
        let fwd = q_solution(idx, &PointPair::new(x.clone(), x0.clone()), &prm, &ks, &o)
            .unwrap()
            .value;
        let rev = q_solution(idx, &PointPair::new(x0, x), &prm, &ks, &o).unwrap().value;
        assert_relative_eq!(fwd, rev, max_relative = 1e-13);
    }

    #[test]
    fn lauricella_decomposition_agrees_with_the_direct_sum(
        a in offset_real(0, 1),
        b1 in 0.1f64..0.9, b2 in 0.1f64..0.9, b3 in 0.1f64..0.9,
        d1 in 0.55f64..1.4, d2 in 0.55f64..1.4, d3 in 0.55f64..1.4,
        x in -0.15f64..0.15, y in -0.15f64..0.15, z in -0.15f64..0.15,
    ) {
        let o = opts(1e-10);
        let b = [b1, b2, b3];
        let d = [d1, d2, d3];
        let direct = lauricella_fa3(a, &b, &d, x, y, z, &o).unwrap().value;
        let split = fa3_decomposed(a, &b, &d, x, y, z, &o).unwrap().value;
        assert_relative_eq!(direct, split, max_relative = 1e-8);
    }
}
