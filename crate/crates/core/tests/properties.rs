use gls::conjugate::{biconjugate, conjugate_table, convexity_defect_on, legendre};
use gls::eof::{alpha_patch, orlicz_from_psi_eof};
use gls::gls_core::{fundamental_direct, GeneratingFunction};
use gls::norms::{
    gls_norm, lp_norm, luxemburg_norm, orlicz_norm_amemiya, DiscreteMeasureSpace, Distribution,
    SampledFunction, SpaceKind,
};
use gls::optimize::{linear_grid, log_grid};
use gls::orlicz::OrliczFunction;
use gls::scalar_fn::{Interpolation, ScalarFunction, DEFAULT_TOL};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn catalog_psi() -> impl Strategy<Value = GeneratingFunction> {
    prop_oneof![
        (0.3f64..8.0).prop_map(|m| GeneratingFunction::power(m).unwrap()),
        (0.2f64..3.0, 1.5f64..6.0)
            .prop_map(|(beta, b)| GeneratingFunction::grand(beta, b).unwrap()),
    ]
}

fn space() -> impl Strategy<Value = DiscreteMeasureSpace> {
    prop::collection::vec(0.05f64..1.0, 2..24).prop_map(|w| {
        let s: f64 = w.iter().sum();
        let mut w: Vec<f64> = w.iter().map(|x| x / s).collect();
        let head: f64 = w[..w.len() - 1].iter().sum();
        let last = w.len() - 1;
        w[last] = 1.0 - head;
        DiscreteMeasureSpace::from_weights(w, SpaceKind::Probability).unwrap()
    })
}

fn space_and_functions(
) -> impl Strategy<Value = (DiscreteMeasureSpace, SampledFunction, SampledFunction)> {
    space().prop_flat_map(|mu| {
        let n = mu.len();
        let vals = prop::collection::vec(-5.0f64..5.0, n);
        (Just(mu), vals.clone(), vals).prop_map(|(mu, f, g)| {
            (
                mu,
                SampledFunction::new(f).unwrap(),
                SampledFunction::new(g).unwrap(),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inversion_roundtrip(m in 0.3f64..5.0, x in 0.01f64..50.0) {
        let f = ScalarFunction::power(m).on(0.0, 100.0).unwrap();
        let z = f.evaluate(x).unwrap();
        let back = f.invert_monotone(z, DEFAULT_TOL).unwrap();
        let err = (f.evaluate(back).unwrap() - z).abs();
        prop_assert!(err <= DEFAULT_TOL * z.abs().max(1.0), "err {err}");
    }

    #[test]
    fn tabulation_knots_invert_exactly(m in 0.3f64..5.0, n in 3usize..60) {
        let grid = log_grid(0.1, 30.0, n);
        let t = ScalarFunction::power(m).tabulate_with(&grid, Interpolation::LogLog).unwrap();
        let ys = t.tabulation().unwrap().ys().to_vec();
        for (x, y) in grid.iter().zip(&ys) {
            let back = t.invert_monotone(*y, DEFAULT_TOL).unwrap();
            prop_assert!(rel(back, *x) <= 1e-12, "{back} vs {x}");
        }
    }

    #[test]
    fn evaluation_is_deterministic(m in 0.3f64..5.0, x in 0.0f64..1e3) {
        let f = ScalarFunction::power(m);
        prop_assert_eq!(f.evaluate(x).unwrap().to_bits(), f.evaluate(x).unwrap().to_bits());
    }

    #[test]
    fn conjugates_are_convex(a in 0.1f64..3.0, b in 0.0f64..2.0, rate in 0.2f64..2.0) {
        let q = linear_grid(0.0, 10.0, 41);
        for g in [
            ScalarFunction::quadratic(a, b, 1.0),
            ScalarFunction::exponential(a, rate),
        ] {
            let r = conjugate_table(&g, &q).unwrap();
            let scale = r.values.iter().fold(1.0f64, |s, v| s.max(v.abs()));
            let d = gls::conjugate::defect_of_values(&r.values);
            prop_assert!(d.value <= 1e-8 * scale, "defect {}", d.value);
        }
    }

    #[test]
    fn order_reversal(a in 0.1f64..3.0, lam in 1.0f64..4.0, q in 0.0f64..10.0) {
        let g = ScalarFunction::quadratic(a, 0.5, 0.0);
        let h = ScalarFunction::scaled(lam, g.clone()).unwrap();
        prop_assert!(legendre(&g, q).unwrap() >= legendre(&h, q).unwrap() - 1e-12);
    }

    #[test]
    fn young_inequality(a in 0.1f64..3.0, p in 0.0f64..6.0, q in 0.0f64..10.0) {
        let g = ScalarFunction::exponential(a, 1.0);
        let lhs = p * q;
        let rhs = g.evaluate(p).unwrap() + legendre(&g, q).unwrap();
        prop_assert!(lhs <= rhs + 1e-10 * rhs.abs().max(1.0));
    }

    #[test]
    fn homogeneity_of_fundamental(psi in catalog_psi(), c in prop::sample::select(vec![0.5, 2.0, 10.0]), e in -8.0f64..0.0) {
        let d = 10f64.powf(e);
        let cpsi = GeneratingFunction::scaled(c, &psi).unwrap();
        let a = fundamental_direct(&psi, d).unwrap();
        let b = fundamental_direct(&cpsi, d).unwrap();
        prop_assert!((b * c - a).abs() <= 1e-9, "{} vs {a}", b * c);
    }

    #[test]
    fn fundamental_at_one(psi in catalog_psi()) {
        let (a, _) = psi.support();
        // both catalogs are increasing, so the infimum sits at the left end
        let inf = psi.evaluate(a).unwrap();
        let v = fundamental_direct(&psi, 1.0).unwrap();
        prop_assert!((v - 1.0 / inf).abs() <= 1e-6);
    }

    #[test]
    fn fundamental_monotone_and_quasi_concave(psi in catalog_psi()) {
        let ds = log_grid(1e-8, 1.0, 40);
        let vals: Vec<f64> = ds.iter().map(|&d| fundamental_direct(&psi, d).unwrap()).collect();
        for i in 1..ds.len() {
            prop_assert!(vals[i] >= vals[i - 1]);
            prop_assert!(vals[i] / ds[i] <= vals[i - 1] / ds[i - 1] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lyapunov(mu in space(), vals in prop::collection::vec(-5.0f64..5.0, 24)) {
        let f = SampledFunction::new(vals[..mu.len()].to_vec()).unwrap();
        let ps = [1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 20.0, f64::INFINITY];
        let norms: Vec<f64> = ps.iter().map(|&p| lp_norm(&f, &mu, p).unwrap()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
    }

    #[test]
    fn norm_axioms((mu, f, g) in space_and_functions(), lambda in -4.0f64..4.0, k in 1.2f64..4.0, m in 0.5f64..4.0) {
        let psi = GeneratingFunction::power(m).unwrap();
        let n = OrliczFunction::power(k).unwrap();
        let sum = f.add(&g).unwrap();
        let scaled = f.scale(lambda);
        type Norm<'a> = Box<dyn Fn(&SampledFunction) -> f64 + 'a>;
        let norms: [(&str, Norm); 3] = [
            ("gls", Box::new(|h| gls_norm(h, &mu, &psi).unwrap())),
            ("luxemburg", Box::new(|h| luxemburg_norm(h, &mu, &n).unwrap())),
            ("amemiya", Box::new(|h| orlicz_norm_amemiya(h, &mu, &n).unwrap())),
        ];
        for (name, nf) in &norms {
            let (a, b, s) = (nf(&f), nf(&g), nf(&sum));
            prop_assert!(s <= (a + b) * (1.0 + 1e-9), "{name}: triangle {s} > {a} + {b}");
            let h = nf(&scaled);
            prop_assert!((h - lambda.abs() * a).abs() <= 1e-9 * a.max(1e-300) * lambda.abs().max(1.0), "{name}: {h} vs {}", lambda.abs() * a);
            prop_assert!(a > 0.0 || f.values().iter().all(|v| *v == 0.0));
        }
        let zero = SampledFunction::constant(0.0, &mu).unwrap();
        for (_, nf) in &norms {
            prop_assert_eq!(nf(&zero), 0.0);
        }
    }

    #[test]
    fn luxemburg_amemiya_sandwich((mu, f, _) in space_and_functions(), k in 1.2f64..4.0) {
        let n = OrliczFunction::power(k).unwrap();
        let l = luxemburg_norm(&f, &mu, &n).unwrap();
        let a = orlicz_norm_amemiya(&f, &mu, &n).unwrap();
        prop_assert!(l <= a * (1.0 + 1e-12) && a <= 2.0 * l * (1.0 + 1e-12), "{l} {a}");
        if l > 0.0 {
            let m = Distribution::of(&f, &mu).unwrap().modular(&n, 1.0 / l).unwrap();
            prop_assert!((1.0 - 1e-8..=1.0).contains(&m), "modular {m}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn indicator_bridge(m in 0.5f64..6.0, d in prop::sample::select(vec![0.9, 0.5, 0.1, 0.01])) {
        let mu = DiscreteMeasureSpace::probability(10_000).unwrap();
        let psi = GeneratingFunction::power(m).unwrap();
        let g = gls_norm(&mu.indicator(d).unwrap(), &mu, &psi).unwrap();
        let phi = fundamental_direct(&psi, d).unwrap();
        prop_assert!(rel(g, phi) <= 1e-6, "{g} vs {phi}");
    }

    #[test]
    fn patched_functions_are_young(m in 0.5f64..3.0, alpha in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let psi = GeneratingFunction::with_support(
            GeneratingFunction::power(m).unwrap().psi().clone(),
            alpha,
            f64::INFINITY,
        ).unwrap();
        let n = orlicz_from_psi_eof(&psi).unwrap();
        let p = alpha_patch(&n, alpha).unwrap();
        prop_assert_eq!(p.evaluate(0.0).unwrap(), 0.0);
        for u in [1e-3, 0.5, 2.0, 7.0] {
            prop_assert_eq!(p.evaluate(-u).unwrap(), p.evaluate(u).unwrap());
        }
        let right = p.orlicz().right_branch();
        let d = convexity_defect_on(right, 0.0, 20.0, 257).unwrap();
        prop_assert!(d.value <= 1e-8 * d.scale.max(1.0), "defect {}", d.value);
        let vals: Vec<f64> = linear_grid(0.0, 20.0, 257).iter().map(|&u| p.evaluate(u).unwrap()).collect();
        prop_assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn biconjugate_recovers_convex_catalog() {
    let p = linear_grid(0.5, 5.0, 19);
    for g in [
        ScalarFunction::quadratic(1.0, 0.5, 1.0),
        ScalarFunction::exponential(1.0, 1.0),
        ScalarFunction::power(0.5),
    ] {
        let b = biconjugate(&g, &p).unwrap();
        for &x in &p {
            let (got, want) = (b.evaluate(x).unwrap(), g.evaluate(x).unwrap());
            assert!(rel(got, want) <= 1e-6, "{x}: {got} vs {want}");
        }
    }
}
