use super::report::{InvarianceEntry, InvarianceReport, Verdict};
use super::sampler::Sampler;
use super::VerifyError;
use crate::invcat::{EvalError, ScalarJetFunction};
use crate::jetspace::{JetCoordinateId, JetPoint};
use crate::liealg::{pair_with_gradient, ProlongedOperator};
use crate::C64;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 50;

const MAX_RETRIES: u64 = 20;
const NEWTON_ITERS: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

#[derive(Clone)]
struct Acc {
    residual: f64,
    scale: f64,
    worst: f64,
    ok: bool,
}

impl Acc {
    fn new() -> Self {
        Acc {
            residual: 0.0,
            scale: 0.0,
            worst: -1.0,
            ok: true,
        }
    }

    fn push(&mut self, residual: f64, scale: f64, tol: f64) {
        let ratio = residual / (1.0 + scale);
        self.ok &= residual <= tol * (1.0 + scale);
        self.residual = self.residual.max(residual);
        if ratio > self.worst {
            self.worst = ratio;
            self.scale = scale;
        }
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ |t_c g_c|` over paired coordinates: the size of the terms whose
/// cancellation the residual measures.
fn term_magnitude(p: &JetPoint, t: &[C64], g: &[C64]) -> f64 {
    p.shape()
        .coordinates()
        .zip(t.iter().zip(g))
        .map(|(id, (a, b))| (a * b).norm() * id.pairing_weight())
        .sum()
}

/// Draws sample `i`, retrying with fresh points while `f` fails.
fn with_retries<T>(
    sampler: &Sampler,
    seed: u64,
    i: u64,
    mut f: impl FnMut(JetPoint) -> Result<T, VerifyError>,
) -> Result<T, VerifyError> {
    let mut last = None;
    for attempt in 0..MAX_RETRIES {
        let p = sampler.sample(seed, i + (attempt << 32));
        match f(p) {
            Ok(v) => return Ok(v),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Tests `X̂F = 0` for every operator and function over `n_samples` points.
pub fn check_absolute(
    ops: &[ProlongedOperator],
    family: &[ScalarJetFunction],
    sampler: &Sampler,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<InvarianceReport, VerifyError> {
    let mut acc = vec![vec![Acc::new(); family.len()]; ops.len()];
    for i in 0..n_samples as u64 {
        let (p, vals, grads) = with_retries(sampler, seed, i, |p| {
            let mut vals = Vec::with_capacity(family.len());
            let mut grads = Vec::with_capacity(family.len());
            for f in family {
                vals.push(f.eval(&p).map_err(VerifyError::Evaluation)?);
                grads.push(f.grad(&p).map_err(VerifyError::Evaluation)?);
            }
            Ok((p, vals, grads))
        })?;
        for (o, op) in ops.iter().enumerate() {
            let coeffs = op.coefficients(&p);
            let t = op.tangent(&p);
            let cn = norm(&coeffs);
            for (k, g) in grads.iter().enumerate() {
                let r = pair_with_gradient(p.shape(), &coeffs, g).norm();
                let scale = (vals[k].norm() * cn).max(term_magnitude(&p, &t, g));
                acc[o][k].push(r, scale, tol);
            }
        }
    }
    let entries = entries(ops, family.iter().map(|f| f.label().to_string()).collect(), acc);
    Ok(InvarianceReport::new(entries, n_samples, tol, seed))
}

fn entries(ops: &[ProlongedOperator], labels: Vec<String>, acc: Vec<Vec<Acc>>) -> Vec<InvarianceEntry> {
    let mut out = Vec::new();
    for (op, row) in ops.iter().zip(acc) {
        for (label, a) in labels.iter().zip(row) {
            out.push(InvarianceEntry {
                operator: op.label().to_string(),
                function: label.clone(),
                residual_max: a.residual,
                scale: a.scale,
                verdict: Verdict::from_bool(a.ok),
            });
        }
    }
    out
}

/// Coordinate with the largest `|∂E/∂c|` among field derivatives of the
/// primary slots.
fn default_solve_for(e: &ScalarJetFunction, p: &JetPoint) -> Result<JetCoordinateId, VerifyError> {
    let g = e.grad(p).map_err(VerifyError::Evaluation)?;
    let shape = p.shape();
    shape
        .coordinates()
        .zip(&g)
        .filter(|(id, _)| id.order() >= 1 && id.field().is_some_and(|r| r < p.n_fields()))
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .filter(|(_, d)| d.norm() > 0.0)
        .map(|(id, _)| id)
        .ok_or_else(|| VerifyError::Projection(e.label().to_string()))
}

/// Newton-projects `p` onto `E = 0` by moving the single coordinate
/// `solve_for` (complex partners follow).
pub fn project_onto(
    e: &ScalarJetFunction,
    p: &JetPoint,
    solve_for: Option<JetCoordinateId>,
) -> Result<JetPoint, VerifyError> {
    let id = match solve_for {
        Some(id) => id.normalized(),
        None => default_solve_for(e, p)?,
    };
    let shape = p.shape();
    let k = shape
        .index(id)
        .map_err(|err| VerifyError::Invalid(err.to_string()))?;
    let mut q = p.clone();
    let mut tangent = vec![C64::new(0.0, 0.0); shape.len()];
    tangent[k] = C64::new(1.0, 0.0);
    let eval_err = |err: EvalError| VerifyError::Evaluation(err);
    let e0 = e.eval(&q).map_err(eval_err)?.norm();
    let target = NEWTON_TOL * e0.max(1.0);
    for _ in 0..NEWTON_ITERS {
        let d = e.directional(&q, &tangent).map_err(eval_err)?;
        if d.value.norm() < target {
            if d.deriv.norm() == 0.0 {
                break;
            }
            return Ok(q);
        }
        if d.deriv.norm() == 0.0 || !d.deriv.norm().is_finite() {
            break;
        }
        let c = q.values()[k] - d.value / d.deriv;
        q.set_with_partner(id, c)
            .map_err(|err| VerifyError::Invalid(err.to_string()))?;
    }
    Err(VerifyError::Projection(e.label().to_string()))
}

/// Projects each sample onto `E = 0`, then tests `X̂E = 0` there.
pub fn check_on_manifold(
    ops: &[ProlongedOperator],
    residual: &ScalarJetFunction,
    solve_for: Option<JetCoordinateId>,
    sampler: &Sampler,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<InvarianceReport, VerifyError> {
    let mut acc = vec![vec![Acc::new()]; ops.len()];
    for i in 0..n_samples as u64 {
        let (p, g) = with_retries(sampler, seed, i, |p| {
            let q = project_onto(residual, &p, solve_for)?;
            let g = residual.grad(&q).map_err(VerifyError::Evaluation)?;
            Ok((q, g))
        })?;
        for (o, op) in ops.iter().enumerate() {
            let coeffs = op.coefficients(&p);
            let t = op.tangent(&p);
            let r = pair_with_gradient(p.shape(), &coeffs, &g).norm();
            acc[o][0].push(r, term_magnitude(&p, &t, &g), tol);
        }
    }
    let entries = entries(ops, vec![residual.label().to_string()], acc);
    Ok(InvarianceReport::new(entries, n_samples, tol, seed))
}
