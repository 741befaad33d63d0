use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;

/// Lower-triangular C with positive real diagonal and C·C* = G.
pub fn hermitian_factor(g: &CMat, tol: f64) -> Result<CMat> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::InvalidInput("hermitian_factor needs a square matrix".into()));
    }
    let scale = g.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let asym = (g - g.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if asym > tol * scale {
        return Err(Error::InvalidInput(format!("matrix not Hermitian (defect {asym:e})")));
    }
    let mut c = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)].re;
        for k in 0..j {
            d -= c[(j, k)].norm_sqr();
        }
        if !(d > tol * scale) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        c[(j, j)] = C64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= c[(i, k)] * c[(j, k)].conj();
            }
            c[(i, j)] = s / djj;
        }
    }
    Ok(c)
}

/// Orthonormal basis (columns) of the nullspace of `a`, using a relative
/// singular-value threshold.
pub fn nullspace(a: &CMat, rel_tol: f64) -> CMat {
    let (m, n) = a.shape();
    // pad to at least square so the SVD exposes all right singular vectors
    let rows = m.max(n);
    let mut padded = CMat::zeros(rows, n);
    padded.view_mut((0, 0), (m, n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] <= rel_tol * smax.max(f64::MIN_POSITIVE)).collect();
    let mut out = CMat::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        for r in 0..n {
            out[(r, col)] = v_t[(i, r)].conj();
        }
    }
    out
}

/// Smallest over largest singular value.
pub fn condition_ratio(a: &CMat) -> f64 {
    let s = a.clone().svd(false, false).singular_values;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn determinant(a: &CMat) -> C64 {
    a.clone().lu().determinant()
}

/// tr(A⁻¹B), the log-derivative of det A when B = A'.
pub fn trace_solve(a: &CMat, b: &CMat) -> Option<C64> {
    let lu = a.clone().lu();
    let x = lu.solve(b)?;
    Some(x.trace())
}

/// Vanishing orders at s = 0 of the span of truncated power series (one per
/// column, entry k is the coefficient of s^k). Returns the distinct orders in
/// increasing order, or `None` if the truncation was too short to separate the span.
pub fn vanishing_orders(series: &[Vec<C64>], rel_tol: f64) -> Option<Vec<usize>> {
    let n = series.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let len = series.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut cols: Vec<Vec<C64>> = series
        .iter()
        .map(|s| {
            let mut v = s.clone();
            v.resize(len, C64::new(0.0, 0.0));
            v
        })
        .collect();
    let scale = cols.iter().flat_map(|c| c.iter().map(|v| v.norm())).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut orders = Vec::with_capacity(n);
    let mut live: Vec<usize> = (0..n).collect();
    for k in 0..len {
        if live.is_empty() {
            break;
        }
        let (pos, best) =
            live.iter().enumerate().map(|(p, &c)| (p, cols[c][k].norm())).fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= rel_tol * scale {
            continue;
        }
        let pivot = live.remove(pos);
        let pv = cols[pivot][k];
        for &c in &live {
            let f = cols[c][k] / pv;
            if f != C64::new(0.0, 0.0) {
                for j in k..len {
                    let t = cols[pivot][j] * f;
                    cols[c][j] -= t;
                }
            }
        }
        orders.push(k);
    }
    if orders.len() == n {
        Some(orders)
    } else {
        None
    }
}
