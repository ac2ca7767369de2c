use super::report::{CovarianceEntry, CovarianceReport, Verdict};
use super::sampler::Sampler;
use super::VerifyError;
use crate::invcat::{DualJet, TensorBuilder, TensorValue};
use crate::liealg::ProlongedOperator;
use crate::linalg::least_squares;
use crate::C64;

/// Columns spanning the covariant variations of `theta`: `ω G θ` (vectors)
/// or `ω G θ + (ω G θ)ᵀ` (matrices) for each elementary skew `ω`, then `θ`.
fn span(theta: &TensorValue<C64>, weights: &[f64]) -> Vec<Vec<C64>> {
    let n = theta.dim();
    let mut cols = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            match theta {
                TensorValue::Vector(v) => {
                    let mut c = vec![C64::new(0.0, 0.0); n];
                    c[a] = v[b] * weights[b];
                    c[b] = -v[a] * weights[a];
                    cols.push(c);
                }
                TensorValue::Matrix(m) => {
                    // (ω G θ)_ij = ω_ia g_a θ_aj ... with ω = e_a e_bᵀ − e_b e_aᵀ
                    let mut r = vec![vec![C64::new(0.0, 0.0); n]; n];
                    for j in 0..n {
                        r[a][j] += m[b][j] * weights[b];
                        r[b][j] -= m[a][j] * weights[a];
                    }
                    let mut c = Vec::with_capacity(n * n);
                    for i in 0..n {
                        for j in 0..n {
                            c.push(r[i][j] + r[j][i]);
                        }
                    }
                    cols.push(c);
                }
            }
        }
    }
    cols.push(theta.components());
    cols
}

/// Checks `X̂θ ∈ span{skew·θ, θ}` for each operator.
pub fn check_covariance(
    tensor: &TensorBuilder,
    ops: &[ProlongedOperator],
    sampler: &Sampler,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CovarianceReport, VerifyError> {
    let metric = tensor.geometry().metric();
    let mut entries: Vec<CovarianceEntry> = ops
        .iter()
        .map(|op| CovarianceEntry {
            operator: op.label().to_string(),
            residual: 0.0,
            scale: 0.0,
            scalar: C64::new(0.0, 0.0),
            skew_max: 0.0,
            verdict: Verdict::Pass,
        })
        .collect();
    for i in 0..n_samples as u64 {
        let p = sampler.sample(seed, i);
        for (op, entry) in ops.iter().zip(entries.iter_mut()) {
            let jet = DualJet::new(&p, Some(&op.tangent(&p)));
            let value = tensor.build(&jet).map_err(VerifyError::Evaluation)?;
            let theta = match &value {
                TensorValue::Vector(v) => TensorValue::Vector(v.iter().map(|d| d.value).collect()),
                TensorValue::Matrix(m) => {
                    TensorValue::Matrix(m.iter().map(|r| r.iter().map(|d| d.value).collect()).collect())
                }
            };
            let target: Vec<C64> = value.components().iter().map(|d| d.deriv).collect();
            let weights: Vec<f64> = (0..theta.dim()).map(|k| metric.weight(k)).collect();
            let cols = span(&theta, &weights);
            let rows: Vec<Vec<C64>> = (0..target.len())
                .map(|r| cols.iter().map(|c| c[r]).collect())
                .collect();
            let (coef, resid) = least_squares(&rows, &target);
            let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let scale = norm(&target) + norm(&theta.components());
            if i == 0 {
                entry.scalar = *coef.last().expect("span has the scalar column");
                entry.skew_max = coef[..coef.len() - 1].iter().map(|z| z.norm()).fold(0.0, f64::max);
            }
            if resid > entry.residual {
                entry.residual = resid;
                entry.scale = scale;
            }
            if resid > tol * (1.0 + scale) {
                entry.verdict = Verdict::Fail;
            }
        }
    }
    let verdict = Verdict::all(entries.iter().map(|e| e.verdict));
    Ok(CovarianceReport {
        tensor: tensor.label().to_string(),
        entries,
        verdict,
    })
}
