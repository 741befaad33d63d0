//! Wronskian sections and weighted Weierstrass points of m-canonical systems.
//!
//! Zeros away from special points are located with simultaneous iteration on
//! a log-derivative that avoids the full n×n Wronskian:
//! * hyperelliptic: for the monomial basis the x-Wronskian equals ∏i!·det T,
//!   T_{rc} = y_{M+1+r−c}, with y_k the Taylor coefficients of y;
//! * rational nodal: a point z0 carries a section vanishing to order n iff the
//!   g×g gluing determinant on (w − z0)^{n+j} vanishes.
//!
//! Weights at branch points, nodes and ∞ come from local vanishing orders; the
//! total is audited against n·deg L + n(n−1)(g−1).

use num_complex::Complex64 as C64;

use crate::curves::{section_space, Coefficient, Curve, HyperellipticCurve, Location, Place, RationalNodalCurve, SectionBasis, Sheet};
use crate::error::{Error, Result};
use crate::measures::{Atom, PointMeasure};
use crate::numerics::extended;
use crate::numerics::linalg::{determinant, trace_solve, vanishing_orders, CMat};
use crate::numerics::roots::{roots_from_log_derivative, LogDerivativeRoots};
use crate::numerics::{CPoly, RootOptions};

/// Roots closer than this (relative to 1 + |p|) to a branch point or node preimage are snapped to it.
pub const SNAP_RADIUS: f64 = 1e-6;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[derive(Clone, Debug, PartialEq)]
enum Generators {
    /// ψ = τ = 1: plain derivatives.
    Trivial,
    /// τ = dw/D1 in the working chart: F_i = D1·F'_{i−1}.
    Nodal { d1: CPoly },
    /// ψ = (dx/y)^m, τ = dx: F_i = (A_i + B_i·y)/p^i.
    Hyperelliptic { p: CPoly },
}

/// ρ = det(F_{i,j})·ψ^n·τ^{n(n−1)/2}, with exact entries.
#[derive(Clone, Debug, PartialEq)]
pub struct WronskianSection {
    basis: Option<SectionBasis>,
    gens: Generators,
    /// entries[i][j] = (A, B) of F_{i,j}.
    entries: Vec<Vec<(CPoly, CPoly)>>,
}

impl WronskianSection {
    pub fn n(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn basis(&self) -> Option<&SectionBasis> {
        self.basis.as_ref()
    }

    fn chart_point(&self, place: &Place) -> Result<(C64, Option<C64>)> {
        let Place::Affine { x, sheet } = place else {
            return Err(Error::InvalidInput("Wronskian values are taken at affine points".into()));
        };
        match (&self.gens, &self.basis) {
            (Generators::Nodal { .. }, Some(SectionBasis { curve: Curve::Nodal(c), .. })) => Ok((c.chart().to_local(*x), None)),
            (Generators::Hyperelliptic { .. }, Some(SectionBasis { curve: Curve::Hyperelliptic(h), .. })) => {
                if h.branch_index(*x, 0.0).is_some() {
                    return Ok((*x, Some(zero())));
                }
                let s = sheet.ok_or_else(|| Error::InvalidInput("sheet tag required".into()))?;
                Ok((*x, Some(h.y(*x, s))))
            }
            _ => Ok((*x, None)),
        }
    }

    /// The matrix F_{i,j} at a point (working chart for nodal curves).
    pub fn matrix_at(&self, place: &Place) -> Result<CMat> {
        let (x, y) = self.chart_point(place)?;
        let n = self.n();
        let pv = match &self.gens {
            Generators::Hyperelliptic { p } => {
                let v = p.eval(x);
                if v == zero() {
                    return Err(Error::Pole("Wronskian entries are singular at branch points".into()));
                }
                v
            }
            _ => C64::new(1.0, 0.0),
        };
        let y = y.unwrap_or_default();
        Ok(CMat::from_fn(n, n, |i, j| {
            let (a, b) = &self.entries[i][j];
            (a.eval(x) + b.eval(x) * y) / pv.powu(i as u32)
        }))
    }

    /// Coefficient of ρ against ψ^n τ^{n(n−1)/2}.
    pub fn value(&self, place: &Place) -> Result<C64> {
        Ok(determinant(&self.matrix_at(place)?))
    }

    /// The same coefficient from Cauchy-integral derivatives of the basis
    /// functions (an independent check of the exact assembly).
    pub fn finite_difference_value(&self, place: &Place) -> Result<C64> {
        let (x, _) = self.chart_point(place)?;
        let n = self.n();
        let (radius, f): (f64, Box<dyn Fn(usize, C64) -> C64>) = match (&self.gens, &self.basis) {
            (Generators::Hyperelliptic { .. }, Some(SectionBasis { curve: Curve::Hyperelliptic(h), .. })) => {
                let Place::Affine { sheet: Some(s), .. } = place else {
                    return Err(Error::InvalidInput("sheet tag required".into()));
                };
                let dist = h.branch_points().iter().map(|e| (e - x).norm()).fold(f64::INFINITY, f64::min);
                let y0 = h.y(x, *s);
                let br = h.branch_points().to_vec();
                let e0 = &self.entries[0];
                let f0: Vec<(CPoly, CPoly)> = e0.clone();
                (
                    0.5 * dist.min(1.0),
                    Box::new(move |j, z| {
                        // continue y from x by the product of principal ratios
                        let y = br.iter().fold(y0, |acc, e| acc * ((z - e) / (x - e)).sqrt());
                        f0[j].0.eval(z) + f0[j].1.eval(z) * y
                    }),
                )
            }
            (Generators::Nodal { .. }, Some(SectionBasis { curve: Curve::Nodal(c), .. })) => {
                let dist = c.local_pairs().iter().flat_map(|&(b, cc)| [b, cc]).map(|p| (p - x).norm()).fold(f64::INFINITY, f64::min);
                let e0: Vec<CPoly> = self.entries[0].iter().map(|e| e.0.clone()).collect();
                (0.5 * dist.clamp(1e-3, 1.0), Box::new(move |j, z| e0[j].eval(z)))
            }
            _ => {
                let e0: Vec<CPoly> = self.entries[0].iter().map(|e| e.0.clone()).collect();
                (0.5, Box::new(move |j, z| e0[j].eval(z)))
            }
        };
        let k = 4 * n + 32;
        let mut w = CMat::zeros(n, n);
        for j in 0..n {
            let samples: Vec<C64> =
                (0..k).map(|t| f(j, x + C64::from_polar(radius, 2.0 * std::f64::consts::PI * t as f64 / k as f64))).collect();
            for i in 0..n {
                // f^{(i)}(x) = i!/(k r^i) Σ f(x + r e^{iθ}) e^{−iiθ}
                let mut acc = zero();
                for (t, v) in samples.iter().enumerate() {
                    acc += v * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (i * t) as f64 / k as f64);
                }
                w[(i, j)] = acc * factorial(i) / (k as f64 * radius.powi(i as i32));
            }
        }
        let plain = determinant(&w);
        Ok(match &self.gens {
            Generators::Nodal { d1 } => plain * d1.eval(x).powu((n * (n - 1) / 2) as u32),
            _ => plain,
        })
    }
}

/// Wronskian of polynomials with trivial generators.
pub fn wronskian_of_polys(polys: Vec<CPoly>) -> Result<WronskianSection> {
    let n = polys.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    let mut rows = vec![polys.into_iter().map(|p| (p, CPoly::zero())).collect::<Vec<_>>()];
    for _ in 1..n {
        let last = rows.last().expect("nonempty");
        rows.push(last.iter().map(|(a, _)| (a.derivative(), CPoly::zero())).collect());
    }
    let w = WronskianSection { basis: None, gens: Generators::Trivial, entries: rows };
    check_nonzero(&w, &[C64::new(0.31, 0.17), C64::new(-0.53, 0.71), C64::new(1.13, -0.29)])?;
    Ok(w)
}

pub fn wronskian(basis: &SectionBasis) -> Result<WronskianSection> {
    let n = basis.n();
    if n == 0 {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    let (gens, first): (Generators, Vec<(CPoly, CPoly)>) = match &basis.curve {
        Curve::Nodal(x) => {
            let mut row = Vec::with_capacity(n);
            let den = x.denominator(basis.m);
            for s in &basis.sections {
                let Coefficient::Rational(r) = &s.coefficient else {
                    return Err(Error::InvalidInput("nodal basis needs rational coefficients".into()));
                };
                if r.den.degree() != den.degree() {
                    return Err(Error::InvalidInput("sections must share the standard denominator".into()));
                }
                row.push((r.num.scale(den.leading() / r.den.leading()), CPoly::zero()));
            }
            (Generators::Nodal { d1: x.denominator(1) }, row)
        }
        Curve::Hyperelliptic(h) => {
            let mut row = Vec::with_capacity(n);
            for s in &basis.sections {
                let Coefficient::Hyperelliptic { f, g } = &s.coefficient else {
                    return Err(Error::InvalidInput("hyperelliptic basis needs pair coefficients".into()));
                };
                if f.den.degree() != 0 || g.den.degree() != 0 {
                    return Err(Error::InvalidInput("hyperelliptic coefficients must be polynomial".into()));
                }
                row.push((f.num.scale(C64::new(1.0, 0.0) / f.den.leading()), g.num.scale(C64::new(1.0, 0.0) / g.den.leading())));
            }
            (Generators::Hyperelliptic { p: h.poly().clone() }, row)
        }
    };
    let mut rows = vec![first];
    for i in 1..n {
        let last = rows.last().expect("nonempty");
        let next = last
            .iter()
            .map(|(a, b)| match &gens {
                Generators::Nodal { d1 } => (d1 * &a.derivative(), CPoly::zero()),
                Generators::Hyperelliptic { p } => {
                    // d/dx (A + B y)/p^k with y' = p' y/(2p), k = i − 1
                    let k = (i - 1) as f64;
                    let dp = p.derivative();
                    let na = &(&a.derivative() * p) - &(&dp * a).scale(C64::new(k, 0.0));
                    let nb = &(&b.derivative() * p) - &(&dp * b).scale(C64::new(k - 0.5, 0.0));
                    (na, nb)
                }
                Generators::Trivial => (a.derivative(), CPoly::zero()),
            })
            .collect();
        rows.push(next);
    }
    let w = WronskianSection { basis: Some(basis.clone()), gens, entries: rows };
    let probes: Vec<C64> = [C64::new(0.31, 0.17), C64::new(-0.53, 0.71), C64::new(1.13, -0.29)]
        .iter()
        .map(|&p| match &basis.curve {
            Curve::Nodal(x) => x.chart().to_global(p),
            _ => p,
        })
        .collect();
    check_nonzero(&w, &probes)?;
    Ok(w)
}

fn check_nonzero(w: &WronskianSection, probes: &[C64]) -> Result<()> {
    for &p in probes {
        let place = Place::Affine { x: p, sheet: Some(Sheet::Plus) };
        let Ok(m) = w.matrix_at(&place) else { continue };
        let colnorm: f64 = (0..m.ncols()).map(|j| m.column(j).norm()).product();
        if determinant(&m).norm() > 1e-10 * colnorm {
            return Ok(());
        }
    }
    Err(Error::Singular("Wronskian vanishes identically (dependent basis)".into()))
}

/// Atoms with integer weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoints {
    pub atoms: Vec<(Location, u64)>,
    pub total_weight: u64,
    pub n: usize,
    pub m: usize,
    pub genus: usize,
}

/// n·deg L + n(n−1)(g−1) for L = ω^m.
pub fn expected_total_weight(g: usize, m: usize, n: usize) -> i64 {
    let (g, m, n) = (g as i64, m as i64, n as i64);
    n * m * (2 * g - 2) + n * (n - 1) * (g - 1)
}

impl WeightedPoints {
    fn audited(atoms: Vec<(Location, u64)>, n: usize, m: usize, genus: usize) -> Result<Self> {
        let total: u64 = atoms.iter().map(|a| a.1).sum();
        let expected = expected_total_weight(genus, m, n);
        if total as i64 != expected {
            return Err(Error::WeightMismatch { expected, found: total as i64 });
        }
        Ok(WeightedPoints { atoms, total_weight: total, n, m, genus })
    }

    /// Atoms at smooth affine points (not branch points, nodes or ∞).
    pub fn smooth_affine(&self) -> impl Iterator<Item = (C64, Option<Sheet>, u64)> + '_ {
        self.atoms.iter().filter_map(|(l, w)| match l.place {
            Place::Affine { x, sheet } => Some((x, sheet, *w)),
            _ => None,
        })
    }

    /// CSV rows: re, im, tag, weight.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,tag,weight\n");
        for (l, w) in &self.atoms {
            let (x, tag) = match &l.place {
                Place::Affine { x, sheet } => (*x, sheet.map_or("branch".to_string(), |s| format!("sheet{}", s.label()))),
                Place::Infinity { sheet } => (C64::new(f64::INFINITY, 0.0), format!("infinity{}", sheet.map_or("", |s| s.label()))),
                Place::Node { index, .. } => (C64::new(f64::NAN, f64::NAN), format!("node{index}")),
            };
            s += &format!("{:.16e},{:.16e},{}/c{},{}\n", x.re, x.im, tag, l.component, w);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassMeasure {
    pub points: WeightedPoints,
    pub measure: PointMeasure,
}

pub fn weierstrass_measure(points: &WeightedPoints) -> Result<WeierstrassMeasure> {
    if points.total_weight == 0 {
        return Err(Error::InvalidInput("no Weierstrass points (total weight 0)".into()));
    }
    let t = points.total_weight as f64;
    let atoms = points.atoms.iter().map(|(l, w)| Atom { location: l.clone(), mass: *w as f64 / t }).collect();
    Ok(WeierstrassMeasure { points: points.clone(), measure: PointMeasure::new(atoms)? })
}

pub fn weierstrass_points(curve: &Curve, m: usize) -> Result<WeightedPoints> {
    weierstrass_points_of_basis(&section_space(curve, m)?)
}

/// Weierstrass points of the linear system spanned by `basis`, which must be a
/// full basis of H⁰(ω^m).
pub fn weierstrass_points_of_basis(basis: &SectionBasis) -> Result<WeightedPoints> {
    let g = basis.genus();
    let expected = crate::curves::expected_dimension(g, basis.m);
    if basis.n() != expected {
        return Err(Error::RankDeficient { expected, found: basis.n() });
    }
    if basis.rank_ratio()? < 1e-12 {
        return Err(Error::RankDeficient { expected, found: expected - 1 });
    }
    match &basis.curve {
        Curve::Hyperelliptic(h) => hyperelliptic_points(h, basis.m),
        Curve::Nodal(x) => nodal_points(x, basis),
    }
}

fn root_options() -> RootOptions {
    RootOptions { tol: 1e-8, ..Default::default() }
}

/// Taylor coefficients of √(∏(z − r)) at z0 + hσ, normalized to value 1 at σ = 0.
fn sqrt_taylor(roots: &[C64], z0: C64, h: f64, len: usize) -> Vec<C64> {
    let mut s = vec![zero(); len];
    for r in roots {
        let q = -h / (z0 - r);
        let mut qk = C64::new(1.0, 0.0);
        for (k, sk) in s.iter_mut().enumerate().skip(1) {
            qk *= q;
            *sk -= 0.5 * qk / k as f64;
        }
    }
    exp_series(&s)
}

/// Coefficients of exp(Σ s_k σ^k) with s_0 ignored.
fn exp_series(s: &[C64]) -> Vec<C64> {
    let len = s.len();
    let mut e = vec![zero(); len];
    if len == 0 {
        return e;
    }
    e[0] = C64::new(1.0, 0.0);
    for k in 1..len {
        let mut acc = zero();
        for j in 1..=k {
            acc += s[j] * e[k - j] * j as f64;
        }
        e[k] = acc / k as f64;
    }
    e
}

/// Hyperelliptic weight data for L = K^m.
#[derive(Clone, Debug)]
pub struct HyperellipticSystem {
    curve: HyperellipticCurve,
    pub m: usize,
    /// Largest pure power: x^j, j ≤ big_m.
    pub big_m: usize,
    /// Number of y·x^j sections.
    pub n2: usize,
    pub n: usize,
    /// Φ·∏(x − e)^κ is holomorphic and nonvanishing at branch points.
    pub kappa: f64,
    /// Exponent E in W_x = ±W_u·x^E between the x- and u = 1/x charts.
    pub chart_exponent: i64,
    far_roots: Vec<C64>,
    r_switch: f64,
}

impl HyperellipticSystem {
    pub fn new(curve: &HyperellipticCurve, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("m must be ≥ 1".into()));
        }
        let g = curve.genus();
        let big_m = m * g.saturating_sub(1);
        let n2 = if m >= 2 { big_m.saturating_sub(g) } else { 0 };
        let n = if g == 1 { 1 } else { big_m + 1 + n2 };
        let kappa = n2 as f64 * (2 * big_m + 1) as f64 / 2.0;
        let (gi, mi, ni) = (g as i64, m as i64, n as i64);
        let chart_exponent = (gi - 1) * mi * ni - ni * (ni - 1);
        let mut far_roots: Vec<C64> = curve.branch_points().iter().filter(|e| e.norm() > 0.0).map(|e| C64::new(1.0, 0.0) / e).collect();
        if !curve.even_degree() {
            far_roots.push(zero());
        }
        let r_switch = 1.25 * curve.radius().max(1e-3);
        Ok(HyperellipticSystem { curve: curve.clone(), m, big_m, n2, n, kappa, chart_exponent, far_roots, r_switch })
    }

    /// Weight of every branch point (and of ∞ on odd-degree models).
    pub fn branch_weight(&self) -> u64 {
        if self.curve.genus() <= 1 {
            return 0;
        }
        let (mm, n2, n) = (self.big_m as u64, self.n2 as u64, self.n as u64);
        mm * (mm + 1) + n2 * n2 - n * (n - 1) / 2
    }

    /// Weight of each point over ∞ on an even-degree model.
    pub fn infinity_weight(&self) -> Result<u64> {
        if !self.curve.even_degree() || self.curve.genus() <= 1 {
            return Ok(if self.curve.even_degree() { 0 } else { self.branch_weight() });
        }
        // in v = R·u: functions v^{M−j} and v^a·ỹ(v), ỹ² ∝ ∏(1 − (e/R) v)
        let r = self.curve.radius().max(1e-300);
        let len = self.big_m + self.n2 + self.n * self.n + 8;
        let mut s = vec![zero(); len];
        for e in self.curve.branch_points() {
            let q = e / r;
            let mut qk = C64::new(1.0, 0.0);
            for (k, sk) in s.iter_mut().enumerate().skip(1) {
                qk *= q;
                *sk -= 0.5 * qk / k as f64;
            }
        }
        let yt = exp_series(&s);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(self.n);
        for j in 0..=self.big_m {
            let mut v = vec![zero(); len];
            v[j] = C64::new(1.0, 0.0);
            cols.push(v);
        }
        for a in 0..self.n2 {
            let mut v = vec![zero(); len];
            v[a..].copy_from_slice(&yt[..len - a]);
            cols.push(v);
        }
        let orders = vanishing_orders(&cols, 1e-9).ok_or_else(|| Error::Singular("vanishing orders at ∞ not separated".into()))?;
        let sum: usize = orders.iter().sum();
        Ok((sum - self.n * (self.n - 1) / 2) as u64)
    }

    /// Number of zeros of Q̂ = Φ·∏(x − e)^κ in the finite plane.
    pub fn qhat_degree(&self) -> Result<usize> {
        let w_inf = if self.curve.even_degree() { self.infinity_weight()? as i64 } else { 0 };
        let g = self.curve.genus() as i64;
        let kn = self.n2 as i64 * (2 * self.big_m as i64 + 1) * (g + 1);
        let d = self.chart_exponent - w_inf + kn;
        if d < 0 {
            return Err(Error::WeightMismatch { expected: 0, found: d });
        }
        Ok(d as usize)
    }

    /// tr(T⁻¹T')/h for the Toeplitz matrix built from √(∏(z − r)) at z0, in
    /// double-double: T is graded and loses roughly n2 digits in f64.
    fn toeplitz_logder(&self, roots: &[C64], z0: C64) -> C64 {
        let h = 0.5 * roots.iter().map(|r| (z0 - r).norm()).fold(f64::INFINITY, f64::min);
        if !(h > 0.0) || !h.is_finite() {
            return C64::new(f64::NAN, 0.0);
        }
        let (mm, n2) = (self.big_m, self.n2);
        let y = extended::sqrt_product_series(roots, z0, h, mm + n2 + 2);
        let t: Vec<Vec<_>> = (0..n2).map(|r| (0..n2).map(|c| y[mm + 1 + r - c]).collect()).collect();
        let tp: Vec<Vec<_>> = (0..n2)
            .map(|r| (0..n2).map(|c| y[mm + 2 + r - c] * extended::lift(C64::new((mm + 2 + r - c) as f64, 0.0))).collect())
            .collect();
        extended::trace_solve(&t, &tp).map_or(C64::new(f64::NAN, 0.0), |v| extended::lower(v) / h)
    }

    /// Q̂'/Q̂ at x.
    pub fn qhat_logder(&self, x: C64) -> C64 {
        let e = self.curve.branch_points();
        let phi = if self.n2 == 0 {
            zero()
        } else if x.norm() <= self.r_switch {
            self.toeplitz_logder(e, x)
        } else {
            let u = C64::new(1.0, 0.0) / x;
            -u * u * self.toeplitz_logder(&self.far_roots, u) + self.chart_exponent as f64 / x
        };
        phi + e.iter().map(|b| C64::new(1.0, 0.0) / (x - b)).sum::<C64>() * self.kappa
    }

    /// det T on a sheet (unscaled Taylor coefficients of y at x).
    pub fn toeplitz_determinant(&self, x: C64, sheet: Sheet) -> C64 {
        if self.n2 == 0 {
            return C64::new(1.0, 0.0);
        }
        let e = self.curve.branch_points();
        let h = 0.5 * e.iter().map(|r| (x - r).norm()).fold(f64::INFINITY, f64::min);
        let (mm, n2) = (self.big_m, self.n2);
        let y0 = self.curve.y(x, sheet);
        let y: Vec<C64> = sqrt_taylor(e, x, h, mm + n2 + 2).iter().enumerate().map(|(k, v)| v * y0 / h.powi(k as i32)).collect();
        determinant(&CMat::from_fn(n2, n2, |r, c| y[mm + 1 + r - c]))
    }

    /// (1/2πi)∮ Q̂'/Q̂ on |x| = radius, if close to an integer.
    pub fn winding(&self, radius: f64, samples: usize) -> Option<i64> {
        let mut acc = zero();
        for k in 0..samples {
            let x = C64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / samples as f64);
            acc += self.qhat_logder(x) * x;
        }
        let v = acc / samples as f64;
        let r = v.re.round();
        ((v.re - r).abs() < 1e-3 && v.im.abs() < 1e-3).then_some(r as i64)
    }
}

fn hyperelliptic_points(h: &HyperellipticCurve, m: usize) -> Result<WeightedPoints> {
    let sys = HyperellipticSystem::new(h, m)?;
    let g = h.genus();
    let e = h.branch_points();
    let wb = sys.branch_weight();
    let mut branch_w = vec![wb; e.len()];
    let mut atoms = Vec::new();
    let degree = sys.qhat_degree()?;
    let mut far = 0.0f64;
    if degree > 0 {
        let spec = LogDerivativeRoots { degree, center: zero(), radius: 1.5 * h.radius().max(1.0), opts: root_options() };
        let roots = roots_from_log_derivative(&spec, |x| sys.qhat_logder(x))?;
        for (x, mult) in roots {
            far = far.max(x.norm());
            if let Some(i) = e.iter().position(|b| (b - x).norm() <= SNAP_RADIUS * (1.0 + b.norm())) {
                branch_w[i] += 2 * mult as u64;
                continue;
            }
            for s in [Sheet::Plus, Sheet::Minus] {
                atoms.push((Location::new(Place::Affine { x, sheet: Some(s) }), mult as u64));
            }
        }
        let radius = 2.0 * far.max(h.radius()) + 1.0;
        let samples = (16 * degree).max(2048);
        match sys.winding(radius, samples) {
            Some(w) if w == degree as i64 => {}
            other => {
                return Err(Error::WeightMismatch { expected: degree as i64, found: other.unwrap_or(-1) });
            }
        }
    }
    for (i, &b) in e.iter().enumerate() {
        if branch_w[i] > 0 {
            atoms.push((Location::new(Place::Affine { x: b, sheet: None }), branch_w[i]));
        }
    }
    if h.even_degree() {
        let wi = sys.infinity_weight()?;
        if wi > 0 {
            for s in [Sheet::Plus, Sheet::Minus] {
                atoms.push((Location::new(Place::Infinity { sheet: Some(s) }), wi));
            }
        }
    } else if wb > 0 {
        atoms.push((Location::new(Place::Infinity { sheet: None }), wb));
    }
    WeightedPoints::audited(atoms, sys.n, m, g)
}

/// Gluing determinant data for a rational nodal curve in its working chart.
#[derive(Clone, Debug)]
pub struct NodalSystem {
    curve: RationalNodalCurve,
    pub n: usize,
    pub m: usize,
    /// N(b_i) = K_i·N(c_i) for every section numerator N.
    pub gluing: Vec<C64>,
    numerators: Vec<CPoly>,
}

impl NodalSystem {
    pub fn new(basis: &SectionBasis) -> Result<Self> {
        let Curve::Nodal(x) = &basis.curve else {
            return Err(Error::InvalidInput("nodal system needs a nodal basis".into()));
        };
        let den = x.denominator(basis.m);
        let numerators: Vec<CPoly> = basis
            .sections
            .iter()
            .map(|s| match &s.coefficient {
                Coefficient::Rational(r) => Ok(r.num.scale(den.leading() / r.den.leading())),
                _ => Err(Error::InvalidInput("nodal basis needs rational coefficients".into())),
            })
            .collect::<Result<_>>()?;
        let mut gluing = Vec::with_capacity(x.genus());
        for &(b, c) in x.local_pairs() {
            let vb: Vec<C64> = numerators.iter().map(|p| p.eval(b)).collect();
            let vc: Vec<C64> = numerators.iter().map(|p| p.eval(c)).collect();
            let num: C64 = vb.iter().zip(&vc).map(|(p, q)| p * q.conj()).sum();
            let den2: f64 = vc.iter().map(|q| q.norm_sqr()).sum();
            if den2 == 0.0 {
                return Err(Error::InvalidInput("every section vanishes at a node preimage".into()));
            }
            let k = num / den2;
            let scale = vb.iter().chain(&vc).map(|v| v.norm()).fold(0.0, f64::max);
            let resid = vb.iter().zip(&vc).map(|(p, q)| (p - k * q).norm()).fold(0.0, f64::max);
            if resid > 1e-8 * scale {
                return Err(Error::InvalidInput(format!("basis violates the node gluing (residual {resid:e})")));
            }
            gluing.push(k);
        }
        Ok(NodalSystem { curve: x.clone(), n: basis.n(), m: basis.m, gluing, numerators })
    }

    /// Φ'/Φ at w (working chart), Φ(w) = det[(b_i − w)^{n+j} − K_i(c_i − w)^{n+j}].
    pub fn logder(&self, w: C64) -> C64 {
        let g = self.gluing.len();
        let n = self.n;
        let s = 1.0 + w.norm();
        let pairs = self.curve.local_pairs();
        let mut a = CMat::zeros(g, g);
        let mut ap = CMat::zeros(g, g);
        for (i, &(b, c)) in pairs.iter().enumerate() {
            let (pb, pc) = ((b - w) / s, (c - w) / s);
            for j in 0..g {
                let k = (n + j) as u32;
                a[(i, j)] = pb.powu(k) - self.gluing[i] * pc.powu(k);
                ap[(i, j)] = -(k as f64) / s * (pb.powu(k - 1) - self.gluing[i] * pc.powu(k - 1));
            }
        }
        trace_solve(&a, &ap).unwrap_or(C64::new(f64::NAN, 0.0))
    }

    /// (1/2πi)∮ Φ'/Φ on |w| = radius, if close to an integer.
    pub fn winding(&self, radius: f64, samples: usize) -> Option<i64> {
        let mut acc = zero();
        for k in 0..samples {
            let w = C64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / samples as f64);
            acc += self.logder(w) * w;
        }
        let v = acc / samples as f64;
        let r = v.re.round();
        ((v.re - r).abs() < 1e-3 && v.im.abs() < 1e-3).then_some(r as i64)
    }

    /// Weight at ∞ from the vanishing orders of the reversed numerators.
    pub fn infinity_weight(&self) -> Result<u64> {
        let d = 2 * self.m * (self.curve.genus() - 1);
        let cols: Vec<Vec<C64>> = self
            .numerators
            .iter()
            .map(|p| {
                let mut v = p.coeffs().to_vec();
                v.resize(d + 1, zero());
                v.reverse();
                v
            })
            .collect();
        let orders = vanishing_orders(&cols, 1e-10).ok_or_else(|| Error::Singular("dependent numerators".into()))?;
        Ok((orders.iter().sum::<usize>() - self.n * (self.n - 1) / 2) as u64)
    }

    /// Baseline weight of a node (both branches).
    pub fn node_weight(&self) -> u64 {
        (self.n * (self.n - 1)) as u64
    }
}

fn nodal_points(x: &RationalNodalCurve, basis: &SectionBasis) -> Result<WeightedPoints> {
    if basis.m < 2 || x.genus() < 2 {
        return Err(Error::InvalidInput("nodal Weierstrass points need m ≥ 2 and g ≥ 2".into()));
    }
    let sys = NodalSystem::new(basis)?;
    let chart = x.chart();
    let radius = 1e3;
    let degree = sys.winding(radius, 8192).ok_or_else(|| Error::Singular("gluing determinant winding is not an integer".into()))?;
    if degree < 0 {
        return Err(Error::WeightMismatch { expected: 0, found: degree });
    }
    let spec = LogDerivativeRoots { degree: degree as usize, center: zero(), radius: 1.2, opts: root_options() };
    let roots = roots_from_log_derivative(&spec, |w| sys.logder(w))?;
    let mut node_w = vec![sys.node_weight(); x.genus()];
    let mut atoms = Vec::new();
    for (w, mult) in roots {
        let z = chart.to_global(w);
        let hit = x
            .pairs()
            .iter()
            .position(|&(b, c)| (b - z).norm() <= SNAP_RADIUS * (1.0 + b.norm()) || (c - z).norm() <= SNAP_RADIUS * (1.0 + c.norm()));
        match hit {
            Some(i) => node_w[i] += mult as u64,
            None => atoms.push((Location::new(Place::Affine { x: z, sheet: None }), mult as u64)),
        }
    }
    for (i, &pre) in x.pairs().iter().enumerate() {
        atoms.push((Location::new(Place::Node { index: i, preimages: pre }), node_w[i]));
    }
    let wi = sys.infinity_weight()?;
    if wi > 0 {
        atoms.push((Location::new(Place::Infinity { sheet: None }), wi));
    }
    WeightedPoints::audited(atoms, sys.n, basis.m, x.genus())
}
