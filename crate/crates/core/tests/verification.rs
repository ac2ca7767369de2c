use invforge::invcat::{basis, basis_with, vectors_and_tensors, BasisFamily, Reading, ScalarJetFunction};
use invforge::jetspace::{JetCoordinateId, SampleOptions};
use invforge::liealg::{catalog, prolong2, AlgebraName, AlgebraSpec, ProlongedOperator};
use invforge::verify::{check_absolute, completeness, independence_rank, Sampler, Verdict};

fn ops(spec: &AlgebraSpec) -> Vec<ProlongedOperator> {
    catalog(spec).unwrap().iter().map(prolong2).collect()
}

fn ae3() -> (AlgebraSpec, BasisFamily) {
    let spec = AlgebraSpec::new(AlgebraName::AE, 3);
    let family = basis(&spec).unwrap();
    (spec, family)
}

#[test]
fn catalog_families_pass_under_their_algebras() {
    use AlgebraName::*;
    for spec in [
        AlgebraSpec::new(AE, 3),
        AlgebraSpec::new(AE, 4),
        AlgebraSpec::new(AC, 3).lambda(1.0),
        AlgebraSpec::new(AC, 3).lambda(0.0),
        AlgebraSpec::new(APtilde, 3).fields(2).lambda(0.0),
        AlgebraSpec::new(AgI, 3).mu(1.0),
    ] {
        let family = basis_with(&spec, Reading::Corrected).unwrap();
        let report = check_absolute(&ops(&spec), &family.members, &family.sampler, 10, 1e-8, 42).unwrap();
        assert!(report.verdict.is_pass(), "{}: {:?}", family.name, report.failing().next());
    }
}

#[test]
fn perturbed_invariant_fails() {
    let (spec, family) = ae3();
    let mut members = family.members.clone();
    let u1 = ScalarJetFunction::coordinate(JetCoordinateId::D1 { field: 0, i: 0 });
    members[2] = members[2].combine(&u1, "perturbed", |a, b| a + b);
    let report = check_absolute(&ops(&spec), &members, &family.sampler, 10, 1e-8, 42).unwrap();
    assert_eq!(report.function_summary("perturbed").0, Verdict::Fail);
    for label in family.labels().iter().filter(|l| **l != family.members[2].label()) {
        assert_eq!(report.function_summary(label).0, Verdict::Pass, "{label}");
    }
}

#[test]
fn doubling_jet_values_keeps_pass() {
    let (spec, family) = ae3();
    let base = family.sampler;
    let doubled = Sampler {
        opts: SampleOptions {
            min_abs: 2.0 * base.opts.min_abs,
            max_abs: 2.0 * base.opts.max_abs,
            ..base.opts
        },
        ..base
    };
    let p = base.sample(8, 3);
    let q = doubled.sample(8, 3);
    for (a, b) in p.values().iter().zip(q.values()) {
        assert!((b - a.scale(2.0)).norm() < 1e-12 * (1.0 + a.norm()));
    }
    for s in [base, doubled] {
        let r = check_absolute(&ops(&spec), &family.members, &s, 10, 1e-8, 8).unwrap();
        assert!(r.verdict.is_pass());
    }
}

#[test]
fn identical_seeds_give_identical_reports() {
    let (spec, family) = ae3();
    let run = |seed| check_absolute(&ops(&spec), &family.members, &family.sampler, 10, 1e-8, seed).unwrap();
    let (a, b) = (run(42), run(42));
    assert_eq!(a, b);
    for (x, y) in a.entries.iter().zip(&b.entries) {
        assert_eq!(x.residual_max.to_bits(), y.residual_max.to_bits());
    }
    assert_eq!(
        completeness(&spec, &family, 10, 1e-8, 42).unwrap(),
        completeness(&spec, &family, 10, 1e-8, 42).unwrap()
    );
}

#[test]
fn completeness_arithmetic() {
    let (spec, family) = ae3();
    let r = completeness(&spec, &family, 10, 1e-8, 1).unwrap();
    assert_eq!((r.n_jet_vars, r.algebra_rank, r.expected, r.family_size), (10, 3, 7, 7));
    assert!(r.verdict.is_pass());
    assert!(r.to_string().starts_with("10 − 3 = 7, family 7"));

    let truncated = family.truncated(5);
    let r = completeness(&spec, &truncated, 10, 1e-8, 1).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_ne!(r.expected, r.family_size);

    let ao = AlgebraSpec::new(AlgebraName::AO, 3).fields(2);
    let fam = vectors_and_tensors(3).unwrap();
    assert_eq!(fam.expected_count, 15);
    assert_eq!(basis(&ao).unwrap().expected_count, 20);
    assert!(completeness(&ao, &fam, 10, 1e-8, 1).unwrap().verdict.is_pass());
}

#[test]
fn dependent_family_has_rank_one() {
    let spec = AlgebraSpec::new(AlgebraName::AE, 3);
    let geom = spec.geometry();
    let s1 = ScalarJetFunction::new("S1", move |jet| {
        let v = invforge::invcat::JetView::new(jet, geom);
        Ok(v.trace(&v.hess(0)))
    });
    let s1sq = s1.combine(&s1, "S1^2", |a, b| a * b);
    let r = independence_rank(&[s1, s1sq], &Sampler::for_spec(&spec), 5, 3).unwrap();
    assert_eq!(r.rank, 1);
    assert_eq!(r.verdict, Verdict::Fail);
}
