use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_DEPTH: usize = 60;
const GL_ORDER: usize = 12;
const MAX_PANELS: usize = 20_000;

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn gl_panel<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> C64 {
    let (x, w) = rule();
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let mut s = C64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        s += f(m + h * xi) * *wi;
    }
    s * h
}

/// Adaptive Gauss–Legendre with interval halving over [a, b]: the panel with
/// the largest error estimate is split until the summed estimate meets `tol`
/// (or the roundoff floor of the result). Returns the integral and the error estimate.
pub fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<(C64, f64)> {
    if a == b {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    if !(tol > 0.0) {
        return Err(Error::Quadrature { estimate: C64::new(f64::NAN, 0.0), error_bound: f64::INFINITY, tol });
    }
    let mut heap = BinaryHeap::new();
    let first = Panel::new(&f, a, b);
    let mut total = first.value;
    let mut err = first.err;
    heap.push(first);
    let mut panels = 1;
    loop {
        let floor = 64.0 * f64::EPSILON * total.norm();
        if err <= tol.max(floor) {
            break;
        }
        if panels >= MAX_PANELS || !err.is_finite() {
            return Err(Error::Quadrature { estimate: total, error_bound: err, tol });
        }
        let worst = heap.pop().expect("nonempty heap");
        if worst.depth >= MAX_DEPTH {
            return Err(Error::Quadrature { estimate: total, error_bound: err, tol });
        }
        let m = 0.5 * (worst.a + worst.b);
        let mut l = Panel::new(&f, worst.a, m);
        let mut r = Panel::new(&f, m, worst.b);
        l.depth = worst.depth + 1;
        r.depth = worst.depth + 1;
        total = total - worst.value + l.value + r.value;
        err = err - worst.err + l.err + r.err;
        heap.push(l);
        heap.push(r);
        panels += 1;
    }
    // re-sum in a fixed order so the result does not depend on heap history
    let mut items: Vec<Panel> = heap.into_vec();
    items.sort_by(|x, y| x.a.total_cmp(&y.a));
    let v = items.iter().map(|p| p.value).sum::<C64>();
    let e = items.iter().map(|p| p.err).sum::<f64>();
    if !v.is_finite() {
        return Err(Error::Quadrature { estimate: v, error_bound: e, tol });
    }
    Ok((v, e))
}

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
    depth: usize,
}

impl Panel {
    fn new<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> Self {
        let m = 0.5 * (a + b);
        let whole = gl_panel(f, a, b);
        let halves = gl_panel(f, a, m) + gl_panel(f, m, b);
        let err = (whole - halves).norm();
        Panel { a, b, value: halves, err: if err.is_nan() { f64::INFINITY } else { err }, depth: 0 }
    }
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err && self.a == o.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate(|t| C64::new(f(t), 0.0), a, b, tol).map(|(v, _)| v.re)
}

/// Integration path in the complex plane.
#[derive(Clone, Debug, PartialEq)]
pub enum Path {
    Segment {
        from: C64,
        to: C64,
    },
    /// Counterclockwise from `start` to `end` (radians) when orientation is +1.
    Arc {
        center: C64,
        radius: f64,
        start: f64,
        end: f64,
        orientation: i8,
    },
    /// Closed loop around the cut [a, b] on a double cover branched at a and b.
    /// The integrand handed to `path_integral` is the regular factor r(x) of
    /// r(x)/w(x), where w = (b−a)·√(u(1−u)), u = (x−a)/(b−a), on the upper lip.
    BranchCutLoop {
        a: C64,
        b: C64,
        orientation: i8,
    },
}

impl Path {
    pub fn circle(center: C64, radius: f64) -> Self {
        Path::Arc { center, radius, start: 0.0, end: 2.0 * PI, orientation: 1 }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Path::Segment { from, to } => Path::Segment { from: to, to: from },
            Path::Arc { center, radius, start, end, orientation } => Path::Arc { center, radius, start, end, orientation: -orientation },
            Path::BranchCutLoop { a, b, orientation } => Path::BranchCutLoop { a, b, orientation: -orientation },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Path::Segment { from, to } => from != to,
            Path::Arc { radius, start, end, orientation, .. } => radius > 0.0 && start != end && orientation.abs() == 1,
            Path::BranchCutLoop { a, b, orientation } => a != b && orientation.abs() == 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("degenerate path {self:?}")))
        }
    }
}

/// ∫_γ f(x) dx by adaptive quadrature. For `BranchCutLoop` see the variant's doc.
pub fn path_integral<F: Fn(C64) -> C64>(f: F, path: &Path, tol: f64) -> Result<C64> {
    path.validate()?;
    match *path {
        Path::Segment { from, to } => {
            let d = to - from;
            integrate(|t| f(from + d * t) * d, 0.0, 1.0, tol).map(|v| v.0)
        }
        Path::Arc { center, radius, start, end, orientation } => {
            let sgn = orientation as f64;
            integrate(
                |th| {
                    let e = C64::from_polar(radius, th);
                    f(center + e) * C64::new(0.0, 1.0) * e
                },
                start,
                end,
                tol,
            )
            .map(|v| v.0 * sgn)
        }
        Path::BranchCutLoop { a, b, orientation } => {
            let d = b - a;
            let s_max = std::f64::consts::FRAC_1_SQRT_2;
            // u = s² near a, 1 − u = s² near b; du/√(u(1−u)) = 2 ds/√(1−s²)
            let left = integrate(|s| f(a + d * (s * s)) * (2.0 / (1.0 - s * s).sqrt()), 0.0, s_max, 0.5 * tol)?.0;
            let right = integrate(|s| f(b - d * (s * s)) * (2.0 / (1.0 - s * s).sqrt()), 0.0, s_max, 0.5 * tol)?.0;
            Ok((left + right) * 2.0 * orientation as f64)
        }
    }
}

/// Disk or annulus with optional excluded disks lying strictly inside it.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub center: C64,
    pub r_in: f64,
    pub r_out: f64,
    pub holes: Vec<(C64, f64)>,
}

impl Region {
    pub fn disk(center: C64, radius: f64) -> Self {
        Region { center, r_in: 0.0, r_out: radius, holes: Vec::new() }
    }

    pub fn annulus(center: C64, r_in: f64, r_out: f64) -> Self {
        Region { center, r_in, r_out, holes: Vec::new() }
    }

    pub fn with_hole(mut self, center: C64, radius: f64) -> Self {
        self.holes.push((center, radius));
        self
    }
}

/// ∫∫ ρ dA over a polar region by nested adaptive Gauss–Legendre; holes are subtracted.
pub fn area_integral<F: Fn(C64) -> f64>(density: F, region: &Region, tol: f64) -> Result<f64> {
    if !(region.r_out > region.r_in && region.r_in >= 0.0) {
        return Err(Error::InvalidInput(format!("bad region radii {region:?}")));
    }
    for &(c, r) in &region.holes {
        let d = (c - region.center).norm();
        if r <= 0.0 || d + r > region.r_out || (region.r_in > 0.0 && d - r < region.r_in) {
            return Err(Error::InvalidInput("hole not contained in the region".into()));
        }
    }
    let share = tol / (1 + region.holes.len()) as f64;
    let mut total = polar_integral(&density, region.center, region.r_in, region.r_out, share)?;
    for &(c, r) in &region.holes {
        total -= polar_integral(&density, c, 0.0, r, share)?;
    }
    Ok(total)
}

/// ∫_{r0}^{r1}∫_0^{2π} ρ(c + re^{iθ}) r dθ dr.
pub fn polar_integral<F: Fn(C64) -> f64>(density: &F, c: C64, r0: f64, r1: f64, tol: f64) -> Result<f64> {
    // wide annuli are integrated in log r, where 1/r² profiles become flat
    let log_scale = r0 > 0.0 && r1 / r0 > 10.0;
    let (s0, s1) = if log_scale { (r0.ln(), r1.ln()) } else { (r0, r1) };
    let span = (s1 - s0).max(f64::MIN_POSITIVE);
    let failure = std::cell::Cell::new(None);
    let outer = integrate(
        |s| {
            let (r, jac) = if log_scale { (s.exp(), s.exp() * s.exp()) } else { (s, s) };
            let v = integrate(|th| C64::new(density(c + C64::from_polar(r, th)), 0.0), 0.0, 2.0 * PI, 0.1 * tol / (span * jac.max(1e-300)));
            match v {
                Ok((v, _)) => C64::new(v.re * jac, 0.0),
                Err(e) => {
                    failure.set(Some(e));
                    C64::new(0.0, 0.0)
                }
            }
        },
        s0,
        s1,
        0.5 * tol,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(outer.0.re)
}

/// Arithmetic–geometric mean with the branch |a − b| ≤ |a + b| at each step.
pub fn agm(a: C64, b: C64) -> C64 {
    let (mut a, mut b) = (a, b);
    for _ in 0..100 {
        let an = 0.5 * (a + b);
        let mut bn = (a * b).sqrt();
        if (an - bn).norm() > (an + bn).norm() {
            bn = -bn;
        }
        a = an;
        b = bn;
        if (a - b).norm() <= 1e-16 * a.norm() {
            break;
        }
    }
    a
}
