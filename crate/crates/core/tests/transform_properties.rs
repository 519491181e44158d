use proptest::prelude::*;
use rtl_core::direct::{direct_transform, eigenvectors_twisted, m_bilinear, weights_from_residues, weyl_eval};
use rtl_core::inverse::{inverse_transform, inverse_transform_stieltjes, tfraction_peel_step};
use rtl_core::poly::eval_delta;
use rtl_core::{BidiagonalPencil, Error, SpectralData};

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|x| 10f64.powf(x))
}

fn pencil_strategy() -> impl Strategy<Value = BidiagonalPencil> {
    (1usize..=12).prop_flat_map(|n| {
        (prop::collection::vec(log_uniform(0.1, 10.0), n), prop::collection::vec(log_uniform(0.1, 10.0), n - 1))
            .prop_map(|(a, b)| BidiagonalPencil::new(a, b).unwrap())
    })
}

fn spectral_strategy() -> impl Strategy<Value = SpectralData> {
    (1usize..=12).prop_flat_map(|n| {
        (prop::collection::vec(log_uniform(0.1, 100.0), n), prop::collection::vec(log_uniform(1e-3, 1.0), n))
            .prop_filter_map("eigenvalues too close", |(mut l, w)| {
                l.sort_by(f64::total_cmp);
                if l.windows(2).any(|p| p[1] < p[0] * (1.0 + 1e-3)) {
                    return None;
                }
                let s: f64 = w.iter().sum();
                SpectralData::new(l, w.into_iter().map(|x| x / s).collect()).ok()
            })
    })
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn max_rel(p: &BidiagonalPencil, q: &BidiagonalPencil) -> f64 {
    p.a().iter().chain(p.b()).zip(q.a().iter().chain(q.b())).map(|(x, y)| rel(*x, *y)).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn weights_are_positive_and_normalized(p in pencil_strategy()) {
        let s = direct_transform(&p).unwrap();
        prop_assert!(s.w().iter().all(|&w| w > 0.0));
        prop_assert!((s.w().iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    // The residue formula evaluates Delta_{N-1} at a zero of Delta_N; for
    // weights below ~1e-6 that value is a difference of nearly equal
    // products, so relative agreement is only asserted above that level.
    #[test]
    fn residue_weights_agree_with_default(p in pencil_strategy()) {
        let s = direct_transform(&p).unwrap();
        match weights_from_residues(&p, s.lambda()) {
            Ok(wr) => {
                for (&x, &y) in s.w().iter().zip(&wr) {
                    if x >= 1e-6 {
                        prop_assert!(rel(y, x) < 1e-8, "{} vs {}", y, x);
                    }
                    prop_assert!((x - y).abs() < 1e-10, "{} vs {}", y, x);
                }
            }
            Err(e) => prop_assert!(matches!(e, Error::NonPositiveWeight(_)), "{:?}", e),
        }
    }

    #[test]
    fn weyl_function_is_delta_ratio(p in pencil_strategy(), zs in prop::collection::vec(0.0f64..1.0, 20)) {
        let s = direct_transform(&p).unwrap();
        let top = s.lambda()[s.len() - 1] * 1.5;
        let n = p.len();
        for u in zs {
            let z = u * top;
            if s.lambda().iter().any(|&l| (z - l).abs() < 1e-3 * l) {
                continue;
            }
            let d = eval_delta(&p, z).into_inner();
            let f = weyl_eval(&s, z).unwrap().value;
            prop_assert!(rel(f, d[n - 1] / d[n]) < 1e-9, "z = {}: {} vs {}", z, f, d[n - 1] / d[n]);
        }
    }

    #[test]
    fn eigenvectors_are_m_orthogonal(p in pencil_strategy()) {
        let s = direct_transform(&p).unwrap();
        let vecs: Vec<_> = s.lambda().iter().map(|&l| eigenvectors_twisted(&p, l)).collect();
        // Measured against the size of the terms that cancel, which is what
        // rounding in the vectors can reach; the eigenvector matrices of
        // random pencils have condition numbers up to ~1e7.
        for (j, ej) in vecs.iter().enumerate() {
            for (k, ek) in vecs.iter().enumerate() {
                if j != k {
                    let off = m_bilinear(&p, &ej.left, &ek.right);
                    let mv: Vec<f64> = (0..p.len())
                        .map(|i| ek.right[i] - if i > 0 { p.b()[i - 1] * ek.right[i - 1] } else { 0.0 })
                        .collect();
                    let scale: f64 = ej.left.iter().zip(&mv).map(|(x, y)| (x * y).abs()).sum();
                    prop_assert!(off.abs() < 1e-9 * scale, "({}, {}): {} vs {}", j, k, off, scale);
                }
            }
        }
    }

    #[test]
    fn inverse_undoes_direct(p in pencil_strategy()) {
        let q = inverse_transform(&direct_transform(&p).unwrap()).unwrap();
        prop_assert!(max_rel(&q, &p) < 1e-8);
    }

    #[test]
    fn direct_undoes_inverse(s in spectral_strategy()) {
        let t = direct_transform(&inverse_transform(&s).unwrap()).unwrap();
        for (x, y) in t.lambda().iter().zip(s.lambda()) {
            prop_assert!(rel(*x, *y) < 1e-8);
        }
        for (x, y) in t.w().iter().zip(s.w()) {
            prop_assert!(rel(*x, *y) < 1e-8, "{} vs {}", x, y);
        }
    }

    #[test]
    fn inverse_algorithms_agree(s in spectral_strategy()) {
        let p = inverse_transform(&s).unwrap();
        let q = inverse_transform_stieltjes(&s).unwrap();
        prop_assert!(max_rel(&q, &p) < 1e-8, "{:?}\n{:?}", p, q);
    }

    #[test]
    fn inverse_algorithms_agree_on_transformed_pencils(p in pencil_strategy()) {
        let s = direct_transform(&p).unwrap();
        prop_assert!(max_rel(&inverse_transform_stieltjes(&s).unwrap(), &inverse_transform(&s).unwrap()) < 1e-8);
    }

    #[test]
    fn peeling_keeps_unit_mass(s in spectral_strategy()) {
        let mut f = s.weyl();
        while f.len() > 1 {
            let step = tfraction_peel_step(&f).unwrap();
            prop_assert!(step.a > 0.0 && step.b > 0.0);
            prop_assert!((step.rest.residues().iter().sum::<f64>() - 1.0).abs() < 1e-14);
            f = step.rest;
        }
    }
}
