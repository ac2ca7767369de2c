use invforge::invcat::ScalarJetFunction;
use invforge::jetspace::{FieldKind, JetCoordinateId, JetPoint};
use invforge::liealg::{
    apply, catalog, generic_rank, prolong2, AlgebraName, AlgebraSpec, VectorField,
};
use invforge::verify::Sampler;
use invforge::C64;
use proptest::prelude::*;

fn ops(spec: &AlgebraSpec) -> Vec<invforge::liealg::ProlongedOperator> {
    catalog(spec).unwrap().iter().map(prolong2).collect()
}

/// Velocity of `u_ij` under `J_ab` from the closed form
/// `2(u_ac ∂_{u_bc} − u_bc ∂_{u_ac})`.
fn closed_form(p: &JetPoint, a: usize, b: usize, i: usize, j: usize) -> C64 {
    let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    p.ddu(0, j, a) * d(i, b) + p.ddu(0, i, a) * d(j, b) - p.ddu(0, j, b) * d(i, a) - p.ddu(0, i, b) * d(j, a)
}

#[test]
fn rotation_prolongation_matches_closed_form() {
    for n in [3, 4] {
        let spec = AlgebraSpec::new(AlgebraName::AO, n);
        let sampler = Sampler::for_spec(&spec);
        let ops = ops(&spec);
        for s in 0..20 {
            let p = sampler.sample(3, s);
            for a in 0..n {
                for b in a + 1..n {
                    let op = ops.iter().find(|o| o.label() == format!("J_{}{}", a + 1, b + 1)).unwrap();
                    let t = op.tangent(&p);
                    for i in 0..n {
                        for j in i..n {
                            let k = p.shape().index(JetCoordinateId::D2 { field: 0, i, j }).unwrap();
                            let want = closed_form(&p, a, b, i, j);
                            assert!((t[k] - want).norm() <= 1e-12, "n={n} J_{a}{b} u_{i}{j}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn rotation_algebra_generic_rank() {
    for (n, want) in [(3, 3), (4, 6), (5, 10)] {
        let spec = AlgebraSpec::new(AlgebraName::AO, n);
        let sampler = Sampler::for_spec(&spec);
        assert_eq!(generic_rank(&ops(&spec), None, |i| sampler.sample(1, i), 5), want, "n={n}");
    }
}

#[test]
fn catalog_sizes() {
    let n = 3;
    for (spec, size) in [
        (AlgebraSpec::new(AlgebraName::AO, n), 3),
        (AlgebraSpec::new(AlgebraName::AE, n), 6),
        (AlgebraSpec::new(AlgebraName::AE1, n).lambda(1.0), 7),
        (AlgebraSpec::new(AlgebraName::AC, n).lambda(1.0), 10),
        (AlgebraSpec::new(AlgebraName::AP, n), 10),
        (AlgebraSpec::new(AlgebraName::APtilde, n).lambda(1.0), 11),
        (AlgebraSpec::new(AlgebraName::AC1n, n).lambda(1.0), 15),
        (AlgebraSpec::new(AlgebraName::Ag2I, n).mu(1.0), 13),
    ] {
        assert_eq!(catalog(&spec).unwrap().len(), size, "{}", spec.name);
    }
}

fn sample_point(spec: &AlgebraSpec, seed: u64) -> JetPoint {
    Sampler::for_spec(spec).sample(seed, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn prolongation_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, seed in 0u64..1000, i in 0usize..10, j in 0usize..10) {
        let spec = AlgebraSpec::new(AlgebraName::AC, 3).lambda(1.5);
        let fields = catalog(&spec).unwrap();
        let (x, y) = (&fields[i], &fields[j]);
        let combo = VectorField::linear_combination("aX+bY", &[(C64::new(a, 0.0), x), (C64::new(b, 0.0), y)]);
        let p = sample_point(&spec, seed);
        let (cx, cy, cz) = (prolong2(x).coefficients(&p), prolong2(y).coefficients(&p), prolong2(&combo).coefficients(&p));
        for k in 0..cz.len() {
            let want = cx[k] * a + cy[k] * b;
            prop_assert!((cz[k] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn apply_matches_finite_difference_along_flow(seed in 0u64..1000, which in 0usize..15) {
        let spec = AlgebraSpec::new(AlgebraName::AC1n, 3).lambda(1.5);
        let op = &ops(&spec)[which];
        let f = ScalarJetFunction::new("probe", |jet| {
            let u = jet.u(0);
            Ok(jet.du(0, 1) * jet.ddu(0, 0, 2) + jet.x(1) * u * u + jet.ddu(0, 1, 1) / u)
        });
        let p = sample_point(&spec, seed);
        let t = op.tangent(&p);
        let h = 1e-5;
        let shifted = |s: f64| {
            let mut q = p.clone();
            for (v, d) in q.values_mut().iter_mut().zip(&t) {
                *v += d * s;
            }
            f.eval(&q).unwrap()
        };
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        let exact = apply(op, &f, &p).unwrap();
        prop_assert!((fd - exact).norm() <= 1e-6 * (1.0 + exact.norm()), "{} vs {}", fd, exact);
    }

    #[test]
    fn generic_rank_is_monotone_and_bounded(k in 1usize..11, seed in 0u64..100) {
        let spec = AlgebraSpec::new(AlgebraName::AC, 3).lambda(2.0);
        let all = ops(&spec);
        let sampler = Sampler::for_spec(&spec);
        let coords = spec.shape().len();
        let sub = generic_rank(&all[..k - 1], None, |i| sampler.sample(seed, i), 3);
        let sup = generic_rank(&all[..k], None, |i| sampler.sample(seed, i), 3);
        prop_assert!(sub <= sup);
        prop_assert!(sup <= k.min(coords));
    }
}

#[test]
fn complex_points_have_twice_the_slots() {
    let spec = AlgebraSpec::new(AlgebraName::AgII, 3).mass(1.0);
    assert_eq!(spec.field_kind(), FieldKind::Complex);
    let p = sample_point(&spec, 1);
    assert_eq!(p.n_slots(), 2);
    for op in ops(&spec) {
        assert_eq!(op.coefficients(&p).len(), p.shape().len());
    }
}
