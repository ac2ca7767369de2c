use invforge::invcat::{
    basis, basis_with, equation, trace_products, BasisFamily, EquationName, EquationParams, Reading,
};
use invforge::jetspace::{JetCoordinateId, JetPoint};
use invforge::liealg::{AlgebraName, AlgebraSpec};
use invforge::verify::{independence_rank, independence_rank_at, project_onto, Sampler};
use invforge::C64;

fn specs() -> Vec<AlgebraSpec> {
    use AlgebraName::*;
    vec![
        AlgebraSpec::new(AO, 3).fields(2),
        AlgebraSpec::new(AE, 3),
        AlgebraSpec::new(AE1, 3).fields(2).lambda(1.5),
        AlgebraSpec::new(AC, 3).lambda(1.5),
        AlgebraSpec::new(AC, 3).fields(2).lambda(0.0),
        AlgebraSpec::new(AP, 3).fields(2),
        AlgebraSpec::new(AC1n, 2).fields(2).lambda(1.5),
        AlgebraSpec::new(Ag2I, 3).mu(1.0),
        AlgebraSpec::new(Ag1I, 3).mu(0.0).lambda(0.7),
        AlgebraSpec::new(Ag2II, 3).mass(1.0),
    ]
}

fn fd_check(family: &BasisFamily, points: &[JetPoint]) {
    for p in points {
        for f in &family.members {
            let g = f.grad(p).unwrap();
            for id in &family.deps {
                let k = p.shape().index(*id).unwrap();
                let h = 1e-6 * (1.0 + p.values()[k].norm());
                let at = |s: f64| {
                    let mut q = p.clone();
                    q.values_mut()[k] += C64::new(s, 0.0);
                    f.eval(&q).unwrap()
                };
                let fd = (at(h) - at(-h)) / (2.0 * h);
                let scale = 1.0 + g.iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(
                    (fd - g[k]).norm() <= 1e-6 * scale,
                    "{} / {}: {id}: {} vs {}",
                    family.name,
                    f.label(),
                    g[k],
                    fd
                );
            }
        }
    }
}

#[test]
fn member_gradients_match_finite_differences() {
    for spec in specs() {
        let family = basis_with(&spec, Reading::Corrected).unwrap();
        let points: Vec<JetPoint> = (0..20).map(|i| family.sampler.sample(5, i)).collect();
        fd_check(&family, &points);
    }
}

#[test]
fn euclid_family_has_printed_size() {
    for n in [3, 4] {
        let family = basis(&AlgebraSpec::new(AlgebraName::AE, n)).unwrap();
        assert_eq!(family.members.len(), 2 * n + 1);
        assert_eq!(family.expected_count, 2 * n + 1);
    }
    let ap = basis(&AlgebraSpec::new(AlgebraName::AP, 3).fields(2)).unwrap();
    assert_eq!(ap.expected_count, 24);
    let ac = basis(&AlgebraSpec::new(AlgebraName::AC, 3).lambda(1.0)).unwrap();
    assert_eq!(ac.expected_count, 3);
}

#[test]
fn rank_drops_at_identity_hessian() {
    let spec = AlgebraSpec::new(AlgebraName::AE, 3);
    let family = basis(&spec).unwrap();
    let mut p = family.sampler.sample(9, 0);
    assert_eq!(independence_rank_at(&family.members, &p).unwrap().rank, 7);
    for i in 0..3 {
        for j in i..3 {
            let v = if i == j { 1.0 } else { 0.0 };
            p.set(JetCoordinateId::D2 { field: 0, i, j }, C64::new(v, 0.0)).unwrap();
        }
    }
    assert!(independence_rank_at(&family.members, &p).unwrap().rank < 2 * 3);
}

#[test]
fn trace_products_rank() {
    for n in [3, 4] {
        let family = trace_products(n).unwrap();
        let r = independence_rank(&family.members, &family.sampler, 5, 1).unwrap();
        assert_eq!(r.rank, n * (n + 3) / 2, "n={n}");
    }
}

#[test]
fn suspect_bases_keep_per_member_labels() {
    let printed = basis(&AlgebraSpec::new(AlgebraName::Ag2I, 3).mu(1.0)).unwrap();
    let labels = printed.labels();
    let mut dedup = labels.clone();
    dedup.sort();
    dedup.dedup();
    assert_eq!(labels.len(), dedup.len(), "labels must identify members");
}

#[test]
fn equations_vanish_on_trivial_points() {
    let bi = equation(EquationName::BornInfeld, &EquationParams::default()).unwrap();
    let sampler = Sampler::for_spec(&bi.spec);
    let mut p = sampler.sample(2, 0);
    for id in p.shape().coordinates().filter(|id| id.order() == 2).collect::<Vec<_>>() {
        p.set(id, C64::new(0.0, 0.0)).unwrap();
    }
    assert!(bi.residual.eval(&p).unwrap().norm() < 1e-15);

    let eik = equation(EquationName::Eikonal, &EquationParams::default()).unwrap();
    let mut p = Sampler::for_spec(&eik.spec).sample(2, 0);
    for (i, v) in [1.0, 1.0, 0.0, 0.0].into_iter().enumerate() {
        p.set(JetCoordinateId::D1 { field: 0, i }, C64::new(v, 0.0)).unwrap();
    }
    assert!(eik.residual.eval(&p).unwrap().norm() < 1e-15);

    let mu = 1.3;
    let heat = equation(EquationName::Heat, &EquationParams { mu, ..Default::default() }).unwrap();
    let mut p = Sampler::for_spec(&heat.spec).sample(2, 0);
    let lap: C64 = (1..=3).map(|a| p.ddu(0, a, a)).sum();
    p.set(JetCoordinateId::D1 { field: 0, i: 0 }, -lap / (2.0 * mu)).unwrap();
    assert!(heat.residual.eval(&p).unwrap().norm() < 1e-14);
}

#[test]
fn projection_reaches_the_manifold() {
    for name in EquationName::ALL {
        let eq = equation(name, &EquationParams { reading: Reading::Corrected, ..Default::default() }).unwrap();
        let p = eq.sampler.sample(4, 0);
        let q = project_onto(&eq.residual, &p, eq.solve_for).unwrap();
        let e0 = eq.residual.eval(&p).unwrap().norm();
        assert!(eq.residual.eval(&q).unwrap().norm() <= 1e-12 * e0.max(1.0), "{name}");
    }
}
