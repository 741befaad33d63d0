//! Point measures and smooth densities on curves, with a common integration interface.
//!
//! Densities live on hyperelliptic double covers and are integrated over the
//! x-plane with a partition of unity:
//! * x = e + s² near an isolated branch point e;
//! * x = c + d·cosh(σ + iθ) near a close pair c ± d (the vanishing cycle of a
//!   plumbing fiber), which flattens the |x² − d²|^{-1} profile in σ;
//! * u = 1/x (or u = s² when ∞ is a branch point) near ∞;
//! * plain polar coordinates for the rest, where the integrand is smooth.
//!
//! Patch k carries weight χ_k·∏_{j<k}(1 − χ_j) and the bulk ∏_j(1 − χ_j), so the
//! weights sum to one and the bulk weight vanishes near every singular point.
//! Test functions and densities are taken to be invariant under the
//! hyperelliptic involution, so both sheets contribute equally.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::curves::{HyperellipticCurve, Location, Place};
use crate::error::{Error, Result};
use crate::numerics::quad::integrate;
use crate::numerics::{poly_roots, CPoly};
use crate::periods::BergmanMeasure;

/// Absolute tolerance of each patch integral.
pub const QUAD_TOL: f64 = 1e-9;

/// Angular pre-split of every patch.
const ANGLE_PANELS: usize = 16;

/// Lipschitz constant of (1 − d²)³ in d.
const BUMP_LIP: f64 = 1.7173;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub location: Location,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointMeasure {
    pub atoms: Vec<Atom>,
}

impl PointMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.iter().any(|a| !(a.mass > 0.0)) {
            return Err(Error::InvalidInput("atom masses must be positive".into()));
        }
        Ok(PointMeasure { atoms })
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        PointMeasure::new(self.atoms.iter().map(|a| Atom { location: a.location.clone(), mass: a.mass * s }).collect())
    }

    /// CSV rows: component, re, im, tag, mass.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("component,re,im,tag,mass\n");
        for a in &self.atoms {
            let (x, tag) = match &a.location.place {
                Place::Affine { x, sheet } => (*x, sheet.map_or("branch".to_string(), |s| format!("sheet{}", s.label()))),
                Place::Infinity { sheet } => (C64::new(f64::INFINITY, 0.0), format!("infinity{}", sheet.map_or("", |s| s.label()))),
                Place::Node { index, preimages } => (preimages.0, format!("node{index}")),
            };
            s += &format!("{},{:.16e},{:.16e},{},{:.16e}\n", a.location.component, x.re, x.im, tag, a.mass);
        }
        s
    }
}

fn smooth_step(t: f64) -> f64 {
    // 1 for t ≤ 0, 0 for t ≥ 1, C^∞ in between
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let (a, b) = (f(1.0 - t), f(t));
    a / (a + b)
}

/// Bounded Lipschitz functions on the charts of a curve, one per component tag.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    /// (1 − d²)³ with d = |x − center|/radius, zero for d ≥ 1.
    Bump {
        component: usize,
        center: C64,
        radius: f64,
    },
    /// Bump·Re or Im of ((x − center)/radius)^power.
    Moment {
        component: usize,
        center: C64,
        radius: f64,
        power: u32,
        imaginary: bool,
    },
    /// Indicator of the closed disk (mass queries; not Lipschitz).
    Disk {
        component: usize,
        center: C64,
        radius: f64,
    },
    /// Indicator of the complement of a disk (not Lipschitz).
    Outside {
        component: usize,
        center: C64,
        radius: f64,
    },
}

impl TestFunction {
    pub fn eval(&self, component: usize, x: C64) -> f64 {
        match *self {
            TestFunction::Constant(c) => c,
            TestFunction::Bump { component: k, center, radius } => {
                if k != component {
                    return 0.0;
                }
                let d2 = (x - center).norm_sqr() / (radius * radius);
                if d2 >= 1.0 {
                    0.0
                } else {
                    (1.0 - d2).powi(3)
                }
            }
            TestFunction::Moment { component: k, center, radius, power, imaginary } => {
                let w = TestFunction::Bump { component: k, center, radius }.eval(component, x);
                if w == 0.0 {
                    return 0.0;
                }
                let z = ((x - center) / radius).powu(power);
                w * if imaginary { z.im } else { z.re }
            }
            TestFunction::Disk { component: k, center, radius } => {
                if k == component && (x - center).norm() <= radius {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Outside { component: k, center, radius } => {
                if k == component && (x - center).norm() <= radius {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Value at a location; at ∞ the compactly supported members vanish and
    /// at a node the two preimage values are averaged.
    pub fn at(&self, loc: &Location) -> f64 {
        match &loc.place {
            Place::Affine { x, .. } => self.eval(loc.component, *x),
            Place::Infinity { .. } => match self {
                TestFunction::Constant(c) => *c,
                TestFunction::Outside { .. } => 1.0,
                _ => 0.0,
            },
            Place::Node { preimages, .. } => 0.5 * (self.eval(loc.component, preimages.0) + self.eval(loc.component, preimages.1)),
        }
    }

    /// Lipschitz constant in the chart coordinate (∞ for indicators).
    pub fn lipschitz(&self) -> f64 {
        match *self {
            TestFunction::Constant(_) => 0.0,
            TestFunction::Bump { radius, .. } => BUMP_LIP / radius,
            // |∇(w·z^k)| ≤ |∇w| + k|z|^{k−1}/r with |w|, |z| ≤ 1
            TestFunction::Moment { radius, power, .. } => (BUMP_LIP + power as f64) / radius,
            TestFunction::Disk { .. } | TestFunction::Outside { .. } => f64::INFINITY,
        }
    }

    /// Circle across which the function (or a low derivative) is not smooth.
    fn jump_circle(&self, on: usize) -> Option<(C64, f64)> {
        match *self {
            TestFunction::Constant(_) => None,
            TestFunction::Bump { component, center, radius }
            | TestFunction::Moment { component, center, radius, .. }
            | TestFunction::Disk { component, center, radius }
            | TestFunction::Outside { component, center, radius } => (component == on).then_some((center, radius)),
        }
    }

    /// (component, center, radius) outside which the function vanishes.
    fn support(&self) -> Option<(usize, C64, f64)> {
        match *self {
            TestFunction::Bump { component, center, radius }
            | TestFunction::Moment { component, center, radius, .. }
            | TestFunction::Disk { component, center, radius } => Some((component, center, radius)),
            _ => None,
        }
    }
}

/// Fixed family for weak-convergence diagnostics: bumps on an n×n grid over a
/// window plus windowed first and second moments.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFamily {
    pub version: &'static str,
    pub members: Vec<TestFunction>,
}

impl TestFamily {
    /// Bumps centered on the cells of an n×n grid over [lo, hi] (complex
    /// corners), radius 0.75·max cell side, plus Re/Im moments of order 1, 2
    /// over the disk circumscribing the window.
    pub fn grid(component: usize, lo: C64, hi: C64, n: usize) -> Result<Self> {
        if n == 0 || !(hi.re > lo.re && hi.im > lo.im) {
            return Err(Error::InvalidInput("test-family window must be a nonempty box".into()));
        }
        let (dx, dy) = ((hi.re - lo.re) / n as f64, (hi.im - lo.im) / n as f64);
        let radius = 0.75 * dx.max(dy);
        let mut members = Vec::with_capacity(n * n + 4);
        for i in 0..n {
            for j in 0..n {
                let center = C64::new(lo.re + (i as f64 + 0.5) * dx, lo.im + (j as f64 + 0.5) * dy);
                members.push(TestFunction::Bump { component, center, radius });
            }
        }
        let center = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo).norm();
        for power in 1..=2 {
            for imaginary in [false, true] {
                members.push(TestFunction::Moment { component, center, radius: r, power, imaginary });
            }
        }
        Ok(TestFamily { version: "grid-bumps+moments/1", members })
    }

    /// The standard 4×4 family.
    pub fn standard(component: usize, lo: C64, hi: C64) -> Result<Self> {
        TestFamily::grid(component, lo, hi, 4)
    }

    pub fn lipschitz(&self) -> f64 {
        self.members.iter().map(|h| h.lipschitz()).fold(0.0, f64::max)
    }
}

/// Something that can be paired with test functions.
pub trait Measure: Sync {
    fn integrate(&self, h: &TestFunction) -> Result<f64>;

    fn mass_in_disk(&self, component: usize, center: C64, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("disk radius must be positive".into()));
        }
        self.integrate(&TestFunction::Disk { component, center, radius })
    }

    fn total_mass(&self) -> Result<f64> {
        self.integrate(&TestFunction::Constant(1.0))
    }
}

impl Measure for PointMeasure {
    fn integrate(&self, h: &TestFunction) -> Result<f64> {
        Ok(self.atoms.iter().map(|a| a.mass * h.at(&a.location)).sum())
    }
}

/// max_{h ∈ F} |∫h dμ1 − ∫h dμ2|.
pub fn weak_distance(a: &dyn Measure, b: &dyn Measure, family: &TestFamily) -> Result<f64> {
    let diffs: Vec<f64> = family.members.par_iter().map(|h| Ok((a.integrate(h)? - b.integrate(h)?).abs())).collect::<Result<_>>()?;
    Ok(diffs.into_iter().fold(0.0, f64::max))
}

/// Sum of finitely many weighted measures (e.g. a density plus atoms).
pub struct Combination<'a> {
    pub parts: Vec<(f64, &'a dyn Measure)>,
}

impl Measure for Combination<'_> {
    fn integrate(&self, h: &TestFunction) -> Result<f64> {
        let mut s = 0.0;
        for (w, m) in &self.parts {
            s += w * m.integrate(h)?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Chart {
    /// x = e + s², s = ρe^{iθ}.
    Branch { e: C64 },
    /// x = c + d·cosh(ρ + iθ).
    Pair { c: C64, d: C64 },
    /// x = 1/u with u = ρe^{iθ}, or u = (ρe^{iθ})² when ∞ is a branch point.
    Infinity { ramified: bool },
    /// x = c + ρe^{iθ}.
    Polar { c: C64 },
}

/// Chart, parameter range ρ ∈ [0, rho_max], and the cutoff χ in the x-plane.
#[derive(Clone, Debug, PartialEq)]
struct Patch {
    chart: Chart,
    rho_max: f64,
    /// χ = 1 for |x − center| ≤ r_in, 0 beyond r_out (reversed at ∞).
    center: C64,
    r_in: f64,
    r_out: f64,
}

impl Patch {
    fn chi(&self, x: C64) -> f64 {
        let d = (x - self.center).norm();
        match self.chart {
            Chart::Infinity { .. } => 1.0 - smooth_step((d - self.r_in) / (self.r_out - self.r_in)),
            _ => smooth_step((d - self.r_in) / (self.r_out - self.r_in)),
        }
    }

    /// x and the area factor such that ∫ f dA_x = ∫∫ f(x(ρ,θ))·J dθ dρ over the patch.
    fn point(&self, rho: f64, th: f64) -> (C64, f64) {
        match self.chart {
            Chart::Branch { e } => {
                let s = C64::from_polar(rho, th);
                // s and −s give the same x: the θ-circle covers the disk twice
                (e + s * s, 2.0 * rho.powi(3))
            }
            Chart::Pair { c, d } => {
                let w = C64::new(rho, th);
                (c + d * w.cosh(), d.norm_sqr() * w.sinh().norm_sqr())
            }
            Chart::Infinity { ramified: false } => (C64::from_polar(1.0 / rho, -th), rho.powi(-3)),
            Chart::Infinity { ramified: true } => (C64::from_polar(1.0 / (rho * rho), -2.0 * th), 2.0 * rho.powi(-5)),
            Chart::Polar { c } => (c + C64::from_polar(rho, th), rho),
        }
    }

    /// Parameters ρ ∈ (0, rho_max) on the ray at angle θ where x meets one of
    /// the circles. Closest-approach points are included as well, which never
    /// hurts and keeps near-tangent chords from slipping between nodes.
    fn crossings(&self, th: f64, circles: &[(C64, f64)]) -> Vec<f64> {
        let mut out = Vec::new();
        for &(c, r) in circles {
            match self.chart {
                Chart::Pair { c: c0, d } => {
                    // E·(x − c) = (d·u/2)E² + (c0 − c)E + d/(2u) with E = e^ρ
                    let u = C64::from_polar(1.0, th);
                    let p = CPoly::new(vec![d / (2.0 * u), c0 - c, d * u / 2.0]);
                    let pc = CPoly::new(p.coeffs().iter().map(|v| v.conj()).collect());
                    let quartic = &(&p * &pc) - &CPoly::new(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(r * r, 0.0)]);
                    if let Ok(roots) = poly_roots(&quartic, 1e-12) {
                        for (e, _) in roots {
                            if e.im.abs() <= 1e-6 * e.norm() && e.re >= 1.0 {
                                out.push(e.re.ln());
                            }
                        }
                    }
                }
                _ => {
                    let (a, u, to_rho): (C64, C64, fn(f64) -> f64) = match self.chart {
                        Chart::Polar { c: c0 } => (c0, C64::from_polar(1.0, th), |v| v),
                        Chart::Branch { e } => (e, C64::from_polar(1.0, 2.0 * th), f64::sqrt),
                        Chart::Infinity { ramified: false } => (C64::new(0.0, 0.0), C64::from_polar(1.0, -th), |v| 1.0 / v),
                        Chart::Infinity { ramified: true } => (C64::new(0.0, 0.0), C64::from_polar(1.0, -2.0 * th), |v| 1.0 / v.sqrt()),
                        Chart::Pair { .. } => unreachable!(),
                    };
                    // x = a + v·u: v² + 2bv + k = 0
                    let b = ((a - c) * u.conj()).re;
                    let k = (a - c).norm_sqr() - r * r;
                    let disc = b * b - k;
                    let mut vs = vec![-b];
                    if disc > 0.0 {
                        vs.push(-b - disc.sqrt());
                        vs.push(-b + disc.sqrt());
                    }
                    out.extend(vs.into_iter().filter(|&v| v > 0.0).map(to_rho));
                }
            }
        }
        out.retain(|&r| r > 0.0 && r < self.rho_max);
        out.sort_by(f64::total_cmp);
        out
    }

    /// Rough x-disk containing the patch support, for skipping.
    fn meets(&self, c: C64, r: f64) -> bool {
        let d = (c - self.center).norm();
        match self.chart {
            Chart::Infinity { .. } => d + r > self.r_in,
            _ => d - r < self.r_out,
        }
    }
}

/// Partition of the double cover of the x-plane into singular patches and a bulk disk.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceQuadrature {
    patches: Vec<Patch>,
    bulk_radius: f64,
}

impl SurfaceQuadrature {
    pub fn new(h: &HyperellipticCurve) -> Self {
        let e = h.branch_points();
        let k = e.len();
        let nearest = |i: usize, skip: Option<usize>| {
            (0..k).filter(|&j| j != i && Some(j) != skip).map(|j| (e[i] - e[j]).norm()).fold(f64::INFINITY, f64::min)
        };
        let mut used = vec![false; k];
        let mut patches = Vec::new();
        // close pairs: separation small against the distance to everything else
        for i in 0..k {
            if used[i] {
                continue;
            }
            let Some(j) = (0..k).filter(|&j| j != i && !used[j]).min_by(|&a, &b| (e[i] - e[a]).norm().total_cmp(&(e[i] - e[b]).norm()))
            else {
                continue;
            };
            let sep = (e[i] - e[j]).norm();
            let clear = nearest(i, Some(j)).min(nearest(j, Some(i)));
            if sep < 0.05 * clear {
                used[i] = true;
                used[j] = true;
                let c = 0.5 * (e[i] + e[j]);
                let d = 0.5 * (e[j] - e[i]);
                let r_out = 0.45 * (clear - 0.5 * sep);
                let rho_max = (r_out / d.norm()).asinh() + 0.05;
                patches.push(Patch { chart: Chart::Pair { c, d }, rho_max, center: c, r_in: 0.5 * r_out, r_out });
            }
        }
        for i in 0..k {
            if used[i] {
                continue;
            }
            // distance to other singular points, counting a pair by its center region
            let r_out = 0.45 * nearest(i, None);
            patches.push(Patch { chart: Chart::Branch { e: e[i] }, rho_max: r_out.sqrt(), center: e[i], r_in: 0.5 * r_out, r_out });
        }
        let far = 2.0 * e.iter().map(|v| v.norm()).fold(0.0, f64::max) + 1.0;
        let ramified = !h.even_degree();
        let rho_max = if ramified { (1.0 / far).sqrt() } else { 1.0 / far };
        patches.push(Patch { chart: Chart::Infinity { ramified }, rho_max, center: C64::new(0.0, 0.0), r_in: far, r_out: 2.0 * far });
        SurfaceQuadrature { patches, bulk_radius: 2.0 * far }
    }

    fn bulk_weight(&self, x: C64) -> f64 {
        self.patches.iter().map(|p| 1.0 - p.chi(x)).product()
    }

    fn weight(&self, k: usize, x: C64) -> f64 {
        let p = &self.patches[k];
        let mut w = p.chi(x);
        if w == 0.0 {
            return 0.0;
        }
        for q in &self.patches[..k] {
            w *= 1.0 - q.chi(x);
        }
        w
    }

    /// ∫ over both sheets of a sheet-symmetric integrand f (against dA_x),
    /// optionally known to vanish outside a disk. f may jump across the
    /// given circles and must be smooth elsewhere.
    pub fn integrate<F: Fn(C64) -> f64 + Sync>(&self, f: F, support: Option<(C64, f64)>, circles: &[(C64, f64)], tol: f64) -> Result<f64> {
        let share = tol / (self.patches.len() + 1) as f64;
        let mut total = 0.0;
        for (k, p) in self.patches.iter().enumerate() {
            if let Some((c, r)) = support {
                if !p.meets(c, r) {
                    continue;
                }
            }
            let g = |rho: f64, th: f64| {
                let (x, jac) = p.point(rho, th);
                let w = self.weight(k, x);
                if w == 0.0 {
                    0.0
                } else {
                    w * f(x) * jac
                }
            };
            total += grid_integral(&g, &|th| p.crossings(th, circles), p.rho_max, 6, share)?;
        }
        let (c, r) = match support {
            Some((c, r)) => (c, r),
            None => (C64::new(0.0, 0.0), self.bulk_radius),
        };
        let g = |rho: f64, th: f64| {
            let x = c + C64::from_polar(rho, th);
            let w = self.bulk_weight(x);
            if w == 0.0 {
                0.0
            } else {
                w * f(x) * rho
            }
        };
        let bulk = Patch { chart: Chart::Polar { c }, rho_max: r, center: c, r_in: r, r_out: 2.0 * r };
        total += grid_integral(&g, &|th| bulk.crossings(th, circles), r, 8, share)?;
        Ok(2.0 * total)
    }
}

/// Adaptive Gauss–Legendre in θ over rays in ρ that are split at the
/// integrand's jump points, so every ray piece is smooth and the ray
/// integral has at worst square-root kinks in θ.
fn grid_integral<G, S>(g: &G, splits: &S, rho_max: f64, panels: usize, tol: f64) -> Result<f64>
where
    G: Fn(f64, f64) -> f64 + Sync,
    S: Fn(f64) -> Vec<f64> + Sync,
{
    let ray = |th: f64| -> Result<f64> {
        let mut knots: Vec<f64> = (0..=panels).map(|i| rho_max * i as f64 / panels as f64).collect();
        knots.extend(splits(th));
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let share = 0.01 * tol / knots.len() as f64;
        let mut s = 0.0;
        for w in knots.windows(2) {
            s += integrate(|r| C64::new(g(r, th), 0.0), w[0], w[1], share)?.0.re;
        }
        Ok(s)
    };
    let w = 2.0 * PI / ANGLE_PANELS as f64;
    let parts: Vec<f64> = (0..ANGLE_PANELS)
        .into_par_iter()
        .map(|k| {
            // a failed ray poisons the panel through NaN and is reported below
            let f = |th: f64| C64::new(ray(th).unwrap_or(f64::NAN), 0.0);
            let a = k as f64 * w;
            Ok(integrate(f, a, a + w, 0.5 * tol / ANGLE_PANELS as f64)?.0.re)
        })
        .collect::<Result<_>>()?;
    let total: f64 = parts.iter().sum();
    if !total.is_finite() {
        return Err(Error::Quadrature { estimate: C64::new(total, 0.0), error_bound: f64::INFINITY, tol });
    }
    Ok(total)
}

/// A sheet-symmetric density on one hyperelliptic component, times a scale.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityPart {
    pub component: usize,
    pub scale: f64,
    pub bergman: BergmanMeasure,
    quadrature: Option<SurfaceQuadrature>,
}

/// Finite sum of scaled Bergman densities on components, optionally
/// restricted to the complement of some disks.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMeasure {
    pub parts: Vec<DensityPart>,
    /// (component, center, radius) disks removed from the support.
    pub excluded: Vec<(usize, C64, f64)>,
    pub tol: f64,
}

impl DensityMeasure {
    /// The Bergman measure on component `component`.
    pub fn bergman(b: &BergmanMeasure, component: usize) -> Self {
        let quadrature = b.curve.as_ref().map(SurfaceQuadrature::new);
        DensityMeasure {
            parts: vec![DensityPart { component, scale: 1.0, bergman: b.clone(), quadrature }],
            excluded: Vec::new(),
            tol: QUAD_TOL,
        }
    }

    /// Same measure integrated to another absolute tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for p in &mut self.parts {
            p.scale *= s;
        }
        self
    }

    /// Measure on a disjoint union: component tags must be distinct.
    pub fn disjoint_union(measures: Vec<DensityMeasure>) -> Result<Self> {
        let mut parts = Vec::new();
        let mut excluded = Vec::new();
        let mut tol = QUAD_TOL;
        for m in measures {
            for p in m.parts {
                if parts.iter().any(|q: &DensityPart| q.component == p.component) {
                    return Err(Error::InvalidInput(format!("component {} appears twice", p.component)));
                }
                parts.push(p);
            }
            excluded.extend(m.excluded);
            tol = tol.min(m.tol);
        }
        Ok(DensityMeasure { parts, excluded, tol })
    }

    /// Restriction to the complement of a disk.
    pub fn outside_disk(mut self, component: usize, center: C64, radius: f64) -> Self {
        self.excluded.push((component, center, radius));
        self
    }

    /// Density against dA_x on one sheet at x.
    pub fn density(&self, component: usize, x: C64) -> f64 {
        if self.excluded.iter().any(|&(k, c, r)| k == component && (x - c).norm() <= r) {
            return 0.0;
        }
        self.parts.iter().filter(|p| p.component == component).map(|p| p.scale * p.bergman.density(x, crate::curves::Sheet::Plus)).sum()
    }

    /// Sampled density on an n×n grid over a window, as CSV (component, re, im, density).
    pub fn grid_csv(&self, component: usize, lo: C64, hi: C64, n: usize) -> String {
        let mut s = String::from("component,re,im,density\n");
        for i in 0..n {
            for j in 0..n {
                let t = |k: usize| if n > 1 { k as f64 / (n - 1) as f64 } else { 0.5 };
                let x = C64::new(lo.re + t(i) * (hi.re - lo.re), lo.im + t(j) * (hi.im - lo.im));
                s += &format!("{},{:.16e},{:.16e},{:.16e}\n", component, x.re, x.im, self.density(component, x));
            }
        }
        s
    }
}

impl Measure for DensityMeasure {
    fn integrate(&self, h: &TestFunction) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.parts {
            let Some(q) = &p.quadrature else { continue };
            let support = h.support().and_then(|(k, c, r)| (k == p.component).then_some((c, r)));
            if h.support().is_some() && support.is_none() {
                continue;
            }
            let excluded: Vec<(C64, f64)> = self.excluded.iter().filter(|e| e.0 == p.component).map(|e| (e.1, e.2)).collect();
            let f = |x: C64| {
                if excluded.iter().any(|&(c, r)| (x - c).norm() <= r) {
                    return 0.0;
                }
                h.eval(p.component, x) * p.bergman.density(x, crate::curves::Sheet::Plus)
            };
            let mut circles = excluded.clone();
            circles.extend(h.jump_circle(p.component));
            total += p.scale * q.integrate(f, support, &circles, self.tol)?;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-0.1), 1.0);
        assert_eq!(smooth_step(1.2), 0.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bump_is_bounded_by_one() {
        let h = TestFunction::Bump { component: 0, center: C64::new(0.0, 0.0), radius: 2.0 };
        assert_eq!(h.eval(0, C64::new(0.0, 0.0)), 1.0);
        assert_eq!(h.eval(0, C64::new(2.0, 0.0)), 0.0);
        assert_eq!(h.eval(1, C64::new(0.0, 0.0)), 0.0);
    }
}
