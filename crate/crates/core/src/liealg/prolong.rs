use super::coef::Coef;
use super::VectorField;
use crate::invcat::{EvalError, ScalarJetFunction};
use crate::jetspace::{JetCoordinateId, JetPoint, JetShape};
use crate::linalg::{numerical_rank, PIVOT_TOL};
use crate::C64;

#[derive(Debug, Clone)]
struct Tables {
    f: Coef,
    d: Vec<Coef>,
    dd: Vec<Vec<Coef>>,
}

/// Second prolongation of a vector field: one coefficient per jet coordinate.
///
/// Off-diagonal second-derivative coordinates carry `η_ij + η_ji`.
#[derive(Debug, Clone)]
pub struct ProlongedOperator {
    field: VectorField,
    tables: Vec<Tables>,
}

/// Builds the second prolongation of `v`.
pub fn prolong2(v: &VectorField) -> ProlongedOperator {
    let n_vars = v.n_base() + v.n_slots();
    let tables = v
        .components()
        .map(|f| {
            let d: Vec<Coef> = (0..n_vars).map(|a| f.diff(v.var(a))).collect();
            let mut dd = vec![vec![Coef::zero(); n_vars]; n_vars];
            for a in 0..n_vars {
                for b in a..n_vars {
                    let e = d[a].diff(v.var(b));
                    dd[b][a] = e.clone();
                    dd[a][b] = e;
                }
            }
            Tables { f: f.clone(), d, dd }
        })
        .collect();
    ProlongedOperator {
        field: v.clone(),
        tables,
    }
}

struct Evaluated {
    f: C64,
    d: Vec<C64>,
    dd: Vec<Vec<C64>>,
}

impl ProlongedOperator {
    pub fn label(&self) -> &str {
        &self.field.label
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn n_base(&self) -> usize {
        self.field.n_base()
    }

    pub fn n_slots(&self) -> usize {
        self.field.n_slots()
    }

    /// Coefficient of `∂/∂id` at `p`.
    pub fn coeff(&self, id: JetCoordinateId, p: &JetPoint) -> C64 {
        let k = p.shape().index_unchecked(id);
        self.coefficients(p)[k]
    }

    /// All coefficients at `p`, in the point's storage order.
    pub fn coefficients(&self, p: &JetPoint) -> Vec<C64> {
        let n = self.n_base();
        let m = self.n_slots();
        assert_eq!(
            (p.n_base(), p.n_slots()),
            (n, m),
            "operator {} does not act on this jet space",
            self.label()
        );
        let xs: Vec<C64> = (0..n).map(|i| p.x(i)).collect();
        let us: Vec<C64> = (0..m).map(|r| p.u(r)).collect();
        let ev: Vec<Evaluated> = self
            .tables
            .iter()
            .map(|t| Evaluated {
                f: t.f.eval(&xs, &us),
                d: t.d.iter().map(|c| c.eval(&xs, &us)).collect(),
                dd: t
                    .dd
                    .iter()
                    .map(|row| row.iter().map(|c| c.eval(&xs, &us)).collect())
                    .collect(),
            })
            .collect();

        // D_i f = f_{x_i} + u^s_i f_{u^s}
        let total = |e: &Evaluated, i: usize| -> C64 {
            (0..m).fold(e.d[i], |acc, s| acc + p.du(s, i) * e.d[n + s])
        };
        // D_i D_j f for f = f(x, u)
        let total2 = |e: &Evaluated, i: usize, j: usize| -> C64 {
            let mut acc = e.dd[i][j];
            for s in 0..m {
                acc += p.du(s, i) * e.dd[n + s][j] + p.du(s, j) * e.dd[i][n + s];
                acc += p.ddu(s, i, j) * e.d[n + s];
                for t in 0..m {
                    acc += p.du(s, i) * p.du(t, j) * e.dd[n + s][n + t];
                }
            }
            acc
        };

        let xi_d: Vec<Vec<C64>> = (0..n)
            .map(|k| (0..n).map(|i| total(&ev[k], i)).collect())
            .collect();

        let shape = p.shape();
        let mut out = vec![C64::new(0.0, 0.0); shape.len()];
        for (i, e) in ev.iter().enumerate().take(n) {
            out[i] = e.f;
        }
        for r in 0..m {
            let eta = &ev[n + r];
            out[n + r] = eta.f;
            for i in 0..n {
                let mut c = total(eta, i);
                for k in 0..n {
                    c -= p.du(r, k) * xi_d[k][i];
                }
                out[shape.index_unchecked(JetCoordinateId::D1 { field: r, i })] = c;
            }
            for i in 0..n {
                for j in i..n {
                    let mut c = total2(eta, i, j);
                    for k in 0..n {
                        c -= p.ddu(r, j, k) * xi_d[k][i] + p.ddu(r, i, k) * xi_d[k][j];
                        c -= p.du(r, k) * total2(&ev[k], i, j);
                    }
                    if i != j {
                        c *= 2.0;
                    }
                    out[shape.index_unchecked(JetCoordinateId::D2 { field: r, i, j })] = c;
                }
            }
        }
        out
    }

    /// Coefficients multiplied by the pairing weights, i.e. the velocity of
    /// each stored coordinate along the prolonged flow.
    pub fn tangent(&self, p: &JetPoint) -> Vec<C64> {
        let shape = p.shape();
        let mut t = self.coefficients(p);
        for (k, id) in shape.coordinates().enumerate() {
            t[k] *= id.pairing_weight();
        }
        t
    }
}

/// `Σ_c coeff_c · ∂f/∂c` at `p`: the derivative of `f` along the prolonged field.
pub fn apply(op: &ProlongedOperator, f: &ScalarJetFunction, p: &JetPoint) -> Result<C64, EvalError> {
    let t = op.tangent(p);
    let d = f.directional(p, &t)?.deriv;
    if d.re.is_finite() && d.im.is_finite() {
        return Ok(d);
    }
    // Locate the offending coordinate for the error report.
    let g = f.grad(p)?;
    let shape = p.shape();
    let culprit = shape
        .coordinates()
        .zip(t.iter().zip(&g))
        .find(|(_, (a, b))| !(*a * *b).re.is_finite() || !(*a * *b).im.is_finite())
        .map(|(id, _)| id);
    Err(EvalError::NonFinite {
        label: format!("{} applied to {}", op.label(), f.label()),
        coordinate: culprit,
    })
}

/// Pairs precomputed coefficients with a precomputed gradient.
pub fn pair_with_gradient(shape: JetShape, coeffs: &[C64], grad: &[C64]) -> C64 {
    shape
        .coordinates()
        .zip(coeffs.iter().zip(grad))
        .map(|(id, (c, g))| c * g * id.pairing_weight())
        .sum()
}

/// Coefficient matrix of `ops` at `p` (rows: operators), optionally restricted
/// to the listed coordinates.
pub fn coefficient_matrix(
    ops: &[ProlongedOperator],
    p: &JetPoint,
    columns: Option<&[JetCoordinateId]>,
) -> Vec<Vec<C64>> {
    let shape = p.shape();
    ops.iter()
        .map(|op| {
            let c = op.coefficients(p);
            match columns {
                Some(cols) => cols.iter().map(|id| c[shape.index_unchecked(*id)]).collect(),
                None => c,
            }
        })
        .collect()
}

/// Generic rank: the maximum numerical rank of the coefficient matrix over
/// `trials` sampled points.
pub fn generic_rank<S>(
    ops: &[ProlongedOperator],
    columns: Option<&[JetCoordinateId]>,
    sampler: S,
    trials: usize,
) -> usize
where
    S: Fn(u64) -> JetPoint,
{
    (0..trials.max(1) as u64)
        .map(|t| numerical_rank(&coefficient_matrix(ops, &sampler(t), columns), PIVOT_TOL).rank)
        .max()
        .unwrap_or(0)
}
