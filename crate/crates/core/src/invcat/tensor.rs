//! Metric-aware trace invariants of vectors and symmetric matrices.

use crate::jetspace::Metric;
use crate::linalg::solve;
use crate::Scalar;

pub type Mat<T> = Vec<Vec<T>>;

pub fn identity<T: Scalar>(n: usize) -> Mat<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

pub fn mat_mul<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let n = a.len();
    let p = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| {
                    a[i].iter()
                        .zip(b)
                        .fold(T::zero(), |acc, (&x, row)| acc + x * row[j])
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<T: Scalar>(a: &Mat<T>, v: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(T::zero(), |acc, (&x, &y)| acc + x * y))
        .collect()
}

pub fn trace<T: Scalar>(a: &Mat<T>) -> T {
    (0..a.len()).fold(T::zero(), |acc, i| acc + a[i][i])
}

pub fn transpose<T: Scalar>(a: &Mat<T>) -> Mat<T> {
    let n = a.len();
    let p = a.first().map_or(0, Vec::len);
    (0..p).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

/// `a + c b`.
pub fn mat_axpy<T: Scalar>(a: &Mat<T>, c: T, b: &Mat<T>) -> Mat<T> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| x + c * y).collect())
        .collect()
}

pub fn mat_scale<T: Scalar>(a: &Mat<T>, c: T) -> Mat<T> {
    a.iter().map(|r| r.iter().map(|&x| c * x).collect()).collect()
}

/// `G M` with `G` the diagonal metric.
pub fn lower<T: Scalar>(m: &Mat<T>, metric: &Metric) -> Mat<T> {
    m.iter()
        .enumerate()
        .map(|(i, r)| r.iter().map(|&x| x.scale(metric.weight(i))).collect())
        .collect()
}

pub fn lower_vec<T: Scalar>(v: &[T], metric: &Metric) -> Vec<T> {
    v.iter().enumerate().map(|(i, &x)| x.scale(metric.weight(i))).collect()
}

/// `A^k` for `k ≥ 0`.
pub fn mat_pow<T: Scalar>(a: &Mat<T>, k: usize) -> Mat<T> {
    let mut out = identity(a.len());
    for _ in 0..k {
        out = mat_mul(&out, a);
    }
    out
}

/// `S_k(M) = tr((G M)^k)`; `S_0` is the dimension.
pub fn s_k<T: Scalar>(m: &Mat<T>, metric: &Metric, k: usize) -> T {
    trace(&mat_pow(&lower(m, metric), k))
}

/// `R_k(v, M) = vᵀ G (M G)^{k−1} v` for `k ≥ 1`.
pub fn r_k<T: Scalar>(v: &[T], m: &Mat<T>, metric: &Metric, k: usize) -> T {
    assert!(k >= 1, "R_k needs k >= 1");
    let mut y = v.to_vec();
    for _ in 1..k {
        y = mat_vec(m, &lower_vec(&y, metric));
    }
    dot(&lower_vec(v, metric), &y)
}

/// `R_0(v, M) = vᵀ M⁻¹ v`; `None` when `M` is singular.
pub fn r_0<T: Scalar>(v: &[T], m: &Mat<T>) -> Option<T> {
    let y = solve(m, v)?;
    Some(dot(v, &y))
}

/// `S_jk(U, V) = tr((G U)^j (G V)^{k−j})`.
pub fn s_jk<T: Scalar>(u: &Mat<T>, v: &Mat<T>, metric: &Metric, j: usize, k: usize) -> T {
    assert!(j <= k, "S_jk needs j <= k");
    let a = mat_pow(&lower(u, metric), j);
    let b = mat_pow(&lower(v, metric), k - j);
    trace(&mat_mul(&a, &b))
}

/// Plain (unweighted) dot product.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Traceless-shifted matrix `n M − tr(G M) I`, invariant under `M → M + c G`.
pub fn shifted<T: Scalar>(m: &Mat<T>, metric: &Metric) -> Mat<T> {
    let n = m.len();
    let t = s_k(m, metric, 1);
    let mut out = mat_scale(m, T::from_f64(n as f64));
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = row[i] - t.scale(metric.weight(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;
    use proptest::prelude::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn sym(vals: &[f64], n: usize) -> Mat<C64> {
        let mut m = vec![vec![c(0.0); n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                m[i][j] = c(vals[k]);
                m[j][i] = c(vals[k]);
                k += 1;
            }
        }
        m
    }

    #[test]
    fn trace_examples() {
        let e = Metric::euclidean(3);
        let d = sym(&[1.0, 0.0, 0.0, 2.0, 0.0, 3.0], 3);
        assert_eq!(s_k(&d, &e, 2), c(14.0));
        let id: Mat<C64> = identity(3);
        for k in 1..5 {
            assert_eq!(s_k(&id, &e, k), c(3.0));
        }
        let m = sym(&[4.0, 1.0, 2.0, 5.0, 6.0], 2);
        assert_eq!(r_k(&[c(1.0), c(2.0)], &m, &Metric::euclidean(2), 1), c(5.0));
        let m3 = sym(&[4.0, 1.0, 2.0, 5.0, 6.0, 7.0], 3);
        assert_eq!(r_k(&[c(1.0), c(0.0), c(0.0)], &m3, &e, 2), c(4.0));
    }

    #[test]
    fn minkowski_trace_uses_metric() {
        let g = Metric::minkowski(2);
        let m = sym(&[2.0, 0.0, 3.0], 2);
        // tr(G M) = 2 - 3
        assert_eq!(s_k(&m, &g, 1), c(-1.0));
        assert_eq!(r_k(&[c(1.0), c(1.0)], &m, &g, 1), c(0.0));
    }

    fn brute_s3(m: &Mat<C64>) -> C64 {
        let n = m.len();
        let mut s = c(0.0);
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    s += m[a][b] * m[b][d] * m[d][a];
                }
            }
        }
        s
    }

    proptest! {
        #[test]
        fn s3_matches_index_sum(vals in prop::collection::vec(-2.0f64..2.0, 6)) {
            let m = sym(&vals, 3);
            let a = s_k(&m, &Metric::euclidean(3), 3);
            prop_assert!((a - brute_s3(&m)).norm() < 1e-12);
        }

        #[test]
        fn r3_matches_index_sum(vals in prop::collection::vec(-2.0f64..2.0, 9)) {
            let m = sym(&vals[..6], 3);
            let v: Vec<C64> = vals[6..].iter().map(|&x| c(x)).collect();
            let mut s = c(0.0);
            for a in 0..3 { for b in 0..3 { for d in 0..3 {
                s += v[a] * m[a][b] * m[b][d] * v[d];
            }}}
            prop_assert!((r_k(&v, &m, &Metric::euclidean(3), 3) - s).norm() < 1e-12);
        }

        #[test]
        fn minkowski_contractions_match_index_sums(vals in prop::collection::vec(-2.0f64..2.0, 13)) {
            let g = Metric::minkowski(3);
            let m = sym(&vals[..6], 3);
            let v: Vec<C64> = vals[6..9].iter().map(|&x| c(x)).collect();
            let gw = |i: usize| c(g.weight(i));
            let mut r3 = c(0.0);
            let mut s3 = c(0.0);
            for a in 0..3 { for d in 0..3 { for e in 0..3 {
                r3 += v[a] * gw(a) * m[a][d] * gw(d) * m[d][e] * gw(e) * v[e];
                s3 += gw(a) * m[a][d] * gw(d) * m[d][e] * gw(e) * m[e][a];
            }}}
            prop_assert!((r_k(&v, &m, &g, 3) - r3).norm() < 1e-12);
            prop_assert!((s_k(&m, &g, 3) - s3).norm() < 1e-12);
        }

        #[test]
        fn s12_is_frobenius_pairing(vals in prop::collection::vec(-2.0f64..2.0, 12)) {
            let (u, v) = (sym(&vals[..6], 3), sym(&vals[6..], 3));
            let mut s = c(0.0);
            for a in 0..3 { for b in 0..3 { s += u[a][b] * v[b][a]; } }
            let e = Metric::euclidean(3);
            prop_assert!((s_jk(&u, &v, &e, 1, 2) - s).norm() < 1e-12);
            prop_assert!((s_jk(&u, &v, &e, 2, 2) - s_k(&u, &e, 2)).norm() < 1e-12);
            prop_assert!((s_jk(&u, &v, &e, 0, 2) - s_k(&v, &e, 2)).norm() < 1e-12);
        }

        #[test]
        fn cyclic_symmetry(vals in prop::collection::vec(-2.0f64..2.0, 20), j in 0usize..4, extra in 0usize..2) {
            let k = j + extra;
            let g = Metric::minkowski(4);
            let (u, v) = (sym(&vals[..10], 4), sym(&vals[10..], 4));
            let a = s_jk(&u, &v, &g, j, k);
            let b = s_jk(&v, &u, &g, k - j, k);
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }

        #[test]
        fn hamilton_cayley_closure(vals in prop::collection::vec(-2.0f64..2.0, 10), n in 2usize..=4) {
            // Newton identities give the characteristic coefficients from
            // S_1..S_n; Cayley-Hamilton then fixes S_{n+1}.
            let m = sym(&vals, n);
            let e = Metric::euclidean(n);
            let p: Vec<C64> = (0..=n + 1).map(|k| s_k(&m, &e, k)).collect();
            let mut e_coef = vec![c(1.0)];
            for k in 1..=n {
                let mut s = c(0.0);
                for i in 1..=k {
                    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                    s += e_coef[k - i] * p[i] * sign;
                }
                e_coef.push(s / k as f64);
            }
            let mut predicted = c(0.0);
            for i in 1..=n {
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                predicted += e_coef[i] * p[n + 1 - i] * sign;
            }
            let scale = p[n + 1].norm().max(1.0);
            prop_assert!((predicted - p[n + 1]).norm() / scale < 1e-8);
        }
    }
}
