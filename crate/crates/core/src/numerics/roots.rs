use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::poly::CPoly;
use crate::error::{Error, Result};

const MAX_ITER: usize = 2000;

/// Knobs for the simultaneous iteration.
#[derive(Clone, Debug)]
pub struct RootOptions {
    /// Residual tolerance, relative to the evaluation scale (polynomials) or to 1+|z| (log-derivative mode).
    pub tol: f64,
    pub max_iter: usize,
    /// Roots closer than this are merged. `None` selects 1e−8·(1 + max|coefficient|).
    pub cluster_radius: Option<f64>,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { tol: 1e-8, max_iter: MAX_ITER, cluster_radius: None }
    }
}

/// Roots of `p` with multiplicities; multiplicities sum to the degree.
pub fn poly_roots(p: &CPoly, tol: f64) -> Result<Vec<(C64, usize)>> {
    poly_roots_with(p, &RootOptions { tol, ..Default::default() })
}

pub fn poly_roots_with(p: &CPoly, opts: &RootOptions) -> Result<Vec<(C64, usize)>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    let lead = p.leading();
    let monic = p.scale(C64::new(1.0, 0.0) / lead);
    let cluster_radius = opts.cluster_radius.unwrap_or(1e-8 * (1.0 + monic.max_abs_coeff()));

    let c = monic.coeffs();
    let zeros = c.iter().take_while(|a| **a == C64::new(0.0, 0.0)).count();
    let q = CPoly::new(c[zeros..].to_vec());
    let mut out = Vec::new();
    if zeros > 0 {
        out.push((C64::new(0.0, 0.0), zeros));
    }
    let n = q.degree();
    if n == 0 {
        return Ok(out);
    }

    let newton = |z: C64| {
        let (v, d) = q.eval_with_derivative(z);
        if d == C64::new(0.0, 0.0) {
            if v == C64::new(0.0, 0.0) {
                C64::new(0.0, 0.0)
            } else {
                C64::new(f64::INFINITY, 0.0)
            }
        } else {
            v / d
        }
    };
    let residual_ok = |z: C64| q.eval(z).norm() <= opts.tol * q.eval_scale(z).max(f64::MIN_POSITIVE);

    let radius = (q.coeffs()[0].norm() / q.leading().norm()).powf(1.0 / n as f64);
    let mut z = circle_start(n, C64::new(0.0, 0.0), radius.max(1e-3));
    let iters = aberth_iterate(&mut z, &newton, opts.max_iter);
    let roots = polish_clusters(&q, cluster_roots(&z, &newton, cluster_radius));
    if roots.iter().all(|(r, _)| residual_ok(*r)) {
        out.extend(roots);
        return Ok(out);
    }

    // companion-matrix fallback
    let eig = companion_eigenvalues(&q);
    let mut z2 = eig.clone();
    aberth_iterate(&mut z2, &newton, 50);
    let roots2 = polish_clusters(&q, cluster_roots(&z2, &newton, cluster_radius));
    if roots2.iter().all(|(r, _)| residual_ok(*r)) {
        out.extend(roots2);
        return Ok(out);
    }
    out.extend(roots);
    Err(Error::RootsNotConverged { iterations: iters, partial: out })
}

/// A k-fold root is a simple root of the (k−1)-th derivative; a few Newton
/// steps there recover digits lost to the cluster spread.
fn polish_clusters(q: &CPoly, roots: Vec<(C64, usize)>) -> Vec<(C64, usize)> {
    roots
        .into_iter()
        .map(|(r, k)| {
            if k < 2 {
                return (r, k);
            }
            let mut d = q.clone();
            for _ in 0..(k - 1) {
                d = d.derivative();
            }
            let mut z = r;
            for _ in 0..20 {
                let (v, dv) = d.eval_with_derivative(z);
                if dv == C64::new(0.0, 0.0) {
                    break;
                }
                let step = v / dv;
                z -= step;
                if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
                    break;
                }
            }
            if (z - r).norm() <= 1e-3 * (1.0 + r.norm()) {
                (z, k)
            } else {
                (r, k)
            }
        })
        .collect()
}

/// Eigenvalues of the companion matrix of a polynomial (oracle and fallback).
pub fn companion_eigenvalues(p: &CPoly) -> Vec<C64> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = p.leading();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs()[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::new(m);
    let (_, t) = schur.unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Options for root finding from a log-derivative oracle.
#[derive(Clone, Debug)]
pub struct LogDerivativeRoots {
    pub degree: usize,
    /// Center and radius of the circle of starting points.
    pub center: C64,
    pub radius: f64,
    pub opts: RootOptions,
}

/// Roots of an analytic function known only through its degree and its
/// log-derivative p'/p. Useful when coefficients would be badly conditioned.
pub fn roots_from_log_derivative<F>(spec: &LogDerivativeRoots, logder: F) -> Result<Vec<(C64, usize)>>
where
    F: Fn(C64) -> C64,
{
    let n = spec.degree;
    if n == 0 {
        return Ok(Vec::new());
    }
    let newton = |z: C64| {
        let l = logder(z);
        if !l.is_finite() {
            C64::new(0.0, 0.0)
        } else if l == C64::new(0.0, 0.0) {
            C64::new(f64::INFINITY, 0.0)
        } else {
            C64::new(1.0, 0.0) / l
        }
    };
    let cluster_radius = spec.opts.cluster_radius.unwrap_or(1e-8 * (1.0 + spec.radius));
    let mut z = circle_start(n, spec.center, spec.radius);
    let iters = aberth_iterate(&mut z, &newton, spec.opts.max_iter);
    let roots = cluster_roots(&z, &newton, cluster_radius);
    // merged clusters were confirmed by a contour count; near a multiple root
    // the log-derivative itself is roundoff
    let ok = roots.iter().all(|(r, k)| *k > 1 || newton(*r).norm() <= spec.opts.tol * (1.0 + r.norm()));
    if ok {
        Ok(roots)
    } else {
        Err(Error::RootsNotConverged { iterations: iters, partial: roots })
    }
}

fn circle_start(n: usize, center: C64, radius: f64) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + C64::from_polar(radius, th)
        })
        .collect()
}

/// Aberth–Ehrlich sweeps until every approximation has settled; returns the iteration count.
fn aberth_iterate<F: Fn(C64) -> C64>(z: &mut [C64], newton: &F, max_iter: usize) -> usize {
    let n = z.len();
    let mut frozen = vec![false; n];
    let mut last = vec![f64::INFINITY; n];
    let mut stall = vec![0usize; n];
    for it in 0..max_iter {
        let mut active = false;
        for k in 0..n {
            if frozen[k] {
                continue;
            }
            active = true;
            let w = newton(z[k]);
            if w.is_nan() || w.norm() == f64::INFINITY {
                z[k] += C64::new(1e-3, 1e-3) * (1.0 + z[k].norm());
                continue;
            }
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d != C64::new(0.0, 0.0) {
                        s += C64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 1e-300 { w / denom } else { w };
            z[k] -= step;
            let size = step.norm();
            let wn = w.norm();
            let scale = 1.0 + z[k].norm();
            if size <= 4.0 * f64::EPSILON * scale || wn <= 4.0 * f64::EPSILON * scale {
                frozen[k] = true;
            } else if wn < 1e-5 * scale && wn >= 0.5 * last[k] {
                stall[k] += 1;
                if stall[k] >= 8 {
                    frozen[k] = true;
                }
            } else {
                stall[k] = 0;
            }
            last[k] = wn;
        }
        if !active {
            return it;
        }
    }
    max_iter
}

/// Groups approximations that belong to one multiple root: pairs within the
/// clustering radius, with overlapping Newton disks, or within the ~1e−5
/// noise floor of a multiple root are linked. A linked group is merged only
/// when an argument-principle count around its mean confirms its size.
fn cluster_roots<F: Fn(C64) -> C64>(z: &[C64], newton: &F, cluster_radius: f64) -> Vec<(C64, usize)> {
    let n = z.len();
    let w: Vec<f64> = z
        .iter()
        .map(|&x| {
            let s = newton(x).norm();
            if s.is_finite() {
                s
            } else {
                0.0
            }
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (z[i] - z[j]).norm();
            let near = 1e-5 * (1.0 + z[i].norm().max(z[j].norm()));
            if d <= cluster_radius.max(4.0 * (w[i] + w[j])).max(near) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index[r] == usize::MAX {
            index[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index[r]].push(i);
    }
    let mut out = Vec::new();
    for g in groups {
        if g.len() == 1 {
            out.push((z[g[0]], 1));
            continue;
        }
        let c = g.iter().map(|&i| z[i]).sum::<C64>() / g.len() as f64;
        let spread = g.iter().map(|&i| (z[i] - c).norm()).fold(0.0, f64::max);
        let mut merged = None;
        for factor in [2.0, 4.0, 8.0, 16.0, 64.0] {
            let r = (factor * spread).max(cluster_radius);
            if let Some((count, centroid)) = winding_count(newton, c, r) {
                if count == g.len() as i64 {
                    merged = Some(centroid);
                    break;
                }
            }
        }
        if let Some(mut centroid) = merged {
            // the moment is cleanest on the widest circle that still isolates the group
            let gap = (0..n).filter(|i| !g.contains(i)).map(|i| (z[i] - c).norm()).fold(f64::INFINITY, f64::min);
            let wide = if gap.is_finite() { 0.3 * gap } else { 1e-2 * (1.0 + c.norm()) };
            if wide > 64.0 * spread {
                if let Some((count, better)) = winding_count(newton, c, wide) {
                    if count == g.len() as i64 {
                        centroid = better;
                    }
                }
            }
            out.push((centroid, g.len()));
        } else {
            out.extend(g.iter().map(|&i| (z[i], 1)));
        }
    }
    out
}

/// (1/2πi)∮ p'/p around a small circle, rounded, together with the centroid
/// of the enclosed roots from the first moment (1/2πi)∮ (z − c) p'/p dz.
/// `None` if the count is not near an integer.
fn winding_count<F: Fn(C64) -> C64>(newton: &F, c: C64, r: f64) -> Option<(i64, C64)> {
    let m = 64;
    let mut acc = C64::new(0.0, 0.0);
    let mut moment = C64::new(0.0, 0.0);
    for k in 0..m {
        let e = C64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64);
        let w = newton(c + e);
        if !w.is_finite() || w == C64::new(0.0, 0.0) {
            return None;
        }
        acc += e / w;
        moment += e * e / w;
    }
    let v = acc / m as f64;
    let k = v.re.round();
    if (v.re - k).abs() < 0.1 && v.im.abs() < 0.1 && k >= 1.0 {
        Some((k as i64, c + moment / (m as f64 * k)))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quadratic_splits() {
        let p = CPoly::from_real(&[1.0, 0.0, 1.0]);
        let mut r = poly_roots(&p, 1e-12).unwrap();
        r.sort_by(|a, b| a.0.im.partial_cmp(&b.0.im).unwrap());
        assert_eq!(r.len(), 2);
        assert!((r[0].0 - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1].0 - c(0.0, 1.0)).norm() < 1e-14);
        assert!(r.iter().all(|x| x.1 == 1));
    }

    #[test]
    fn triple_root_is_merged() {
        let p = CPoly::from_roots(&[c(1.0, 0.0); 3]);
        let r = poly_roots(&p, 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, 3);
        assert!((r[0].0 - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn zero_roots_are_counted() {
        let p = CPoly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0), c(1.0, 0.0)]);
        let r = poly_roots(&p, 1e-12).unwrap();
        let total: usize = r.iter().map(|x| x.1).sum();
        assert_eq!(total, 3);
        assert!(r.iter().any(|x| x.0.norm() == 0.0 && x.1 == 2));
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(poly_roots(&CPoly::zero(), 1e-10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn log_derivative_mode_matches() {
        let roots = [c(0.3, 0.1), c(-1.0, 0.5), c(2.0, -1.0), c(0.0, 1.5)];
        let p = CPoly::from_roots(&roots);
        let spec = LogDerivativeRoots { degree: 4, center: c(0.0, 0.0), radius: 1.0, opts: RootOptions::default() };
        let got = roots_from_log_derivative(&spec, |z| {
            let (v, d) = p.eval_with_derivative(z);
            d / v
        })
        .unwrap();
        for r in roots {
            assert!(got.iter().any(|(g, _)| (g - r).norm() < 1e-12));
        }
    }

    #[test]
    fn log_derivative_double_root() {
        let p = CPoly::from_roots(&[c(0.5, 0.5), c(0.5, 0.5), c(-1.0, 0.0)]);
        let spec = LogDerivativeRoots { degree: 3, center: c(0.0, 0.0), radius: 2.0, opts: RootOptions::default() };
        let got = roots_from_log_derivative(&spec, |z| {
            let (v, d) = p.eval_with_derivative(z);
            d / v
        })
        .unwrap();
        assert_eq!(got.len(), 2);
        let dbl = got.iter().find(|x| x.1 == 2).unwrap();
        // a double root is only determined to about √ε from function values
        assert!((dbl.0 - c(0.5, 0.5)).norm() < 1e-7);
    }
}
