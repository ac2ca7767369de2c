use super::invariance::check_absolute;
use super::report::{CompletenessReport, RankReport, Verdict};
use super::sampler::Sampler;
use super::VerifyError;
use crate::invcat::{BasisFamily, ScalarJetFunction};
use crate::jetspace::{JetCoordinateId, JetPoint};
use crate::liealg::{catalog, generic_rank, prolong2, AlgebraError, AlgebraSpec};
use crate::linalg::{numerical_rank, PIVOT_TOL};
use crate::C64;

const CONSTANT_TOL: f64 = 1e-12;

fn columns(family: &[ScalarJetFunction], p: &JetPoint) -> Vec<JetCoordinateId> {
    let shape = p.shape();
    let mut cols: Vec<JetCoordinateId> = Vec::new();
    for f in family {
        for id in f.deps(shape) {
            if !cols.contains(&id) {
                cols.push(id);
            }
        }
    }
    cols.sort();
    cols
}

/// Rank of the Jacobian of `family` at one point.
pub fn independence_rank_at(family: &[ScalarJetFunction], p: &JetPoint) -> Result<RankReport, VerifyError> {
    let cols = columns(family, p);
    let shape = p.shape();
    let mut rows = Vec::with_capacity(family.len());
    let reach = p.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    for f in family {
        let g = f.grad(p).map_err(VerifyError::Evaluation)?;
        let mut row: Vec<C64> = cols.iter().map(|id| g[shape.index_unchecked(*id)]).collect();
        // Round-off gradient of a numerically constant function.
        let slope = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if slope * reach <= CONSTANT_TOL * f.eval(p).map_err(VerifyError::Evaluation)?.norm() {
            row.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
        rows.push(row);
    }
    let info = numerical_rank(&rows, PIVOT_TOL);
    Ok(RankReport {
        rows: family.len(),
        cols: cols.len(),
        pivots: info.pivots,
        rank: info.rank,
        expected: family.len(),
        verdict: Verdict::from_bool(info.rank == family.len()),
    })
}

/// Generic Jacobian rank of `family`: the maximum over `n_samples` points.
pub fn independence_rank(
    family: &[ScalarJetFunction],
    sampler: &Sampler,
    n_samples: usize,
    seed: u64,
) -> Result<RankReport, VerifyError> {
    let mut best: Option<RankReport> = None;
    let mut last_err = None;
    for i in 0..n_samples.max(1) as u64 {
        match independence_rank_at(family, &sampler.sample(seed, i)) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.rank > b.rank) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("no sample succeeded"))
}

/// Completeness accounting for `family` against the algebra `spec`:
/// expected size = |dependency set| − generic rank of the prolonged algebra
/// on those coordinates.
pub fn completeness(
    spec: &AlgebraSpec,
    family: &BasisFamily,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CompletenessReport, VerifyError> {
    let fields = catalog(spec).map_err(|e: AlgebraError| VerifyError::Invalid(e.to_string()))?;
    let ops: Vec<_> = fields.iter().map(prolong2).collect();
    let sampler = family.sampler;
    let deps = &family.deps;
    let algebra_rank = generic_rank(&ops, Some(deps), |t| sampler.sample(seed ^ 0xA5A5, t), 5);
    let expected = deps.len().saturating_sub(algebra_rank);
    let rank = independence_rank(&family.members, &sampler, 5, seed)?;
    let inv = check_absolute(&ops, &family.members, &sampler, n_samples, tol, seed)?;
    let family_size = family.members.len();
    let verdict = Verdict::from_bool(family_size == expected && rank.rank == family_size).and(inv.verdict);
    Ok(CompletenessReport {
        n_jet_vars: deps.len(),
        algebra_rank,
        expected,
        family_size,
        independence_rank: rank.rank,
        invariance: inv.verdict,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invcat::basis;
    use crate::Scalar;
    use crate::liealg::AlgebraName;

    #[test]
    fn numerically_constant_member_adds_no_rank() {
        let spec = AlgebraSpec::new(AlgebraName::AE, 3);
        let family = basis(&spec).unwrap();
        let s1 = family.members[1].clone();
        let inv = s1.combine(&s1, "S1 * S1^-1", |a, b| a * b.powi(-1));
        let mut members = family.members.clone();
        members.push(inv);
        let p = family.sampler.sample(4, 0);
        assert_eq!(independence_rank_at(&members, &p).unwrap().rank, 7);
    }
}
