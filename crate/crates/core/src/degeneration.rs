//! Sweeps toward nodal curves: Bergman mass on plumbing fibers as t → 0,
//! decay of the normalized forms toward their limits, the logarithmic blow-up
//! of the third-kind limit form, and Weierstrass measures of rational nodal
//! curves as m grows.
//!
//! The fiber y² = (x² − t²)q(x) is, near x = 0, the annulus x = (t/2)(σ + 1/σ),
//! so its plumbing parameter is proportional to s = t². Decay orders are
//! fitted against s.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::curves::{Curve, Place, PlumbingFamily, RationalNodalCurve};
use crate::error::{Error, Result};
use crate::measures::{weak_distance, DensityMeasure, Measure, SurfaceQuadrature, TestFamily};
use crate::numerics::linalg::CMat;
use crate::numerics::{path_integral, CPoly, Path};
use crate::periods::{bergman_measure, homology_basis};
use crate::weierstrass::{weierstrass_measure, weierstrass_points};

/// Tolerance of the loop integrals behind the limit-form check.
const LOOP_TOL: f64 = 1e-14;

/// Sample count on the comparison circle.
const CIRCLE_SAMPLES: usize = 96;

/// Parameter grids of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub t_values: Vec<f64>,
    pub m_values: Vec<usize>,
    pub rho_values: Vec<f64>,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

impl SweepGrid {
    pub fn new(t_values: Vec<f64>, m_values: Vec<usize>, rho_values: Vec<f64>) -> Result<Self> {
        if t_values.iter().chain(&rho_values).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("t and ρ values must be positive".into()));
        }
        if !strictly_decreasing(&t_values) || !strictly_decreasing(&rho_values) {
            return Err(Error::InvalidInput("t and ρ grids must be strictly decreasing".into()));
        }
        if m_values.contains(&0) || !m_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("m grid must be strictly increasing and positive".into()));
        }
        Ok(SweepGrid { t_values, m_values, rho_values })
    }

    /// t = 10⁻¹ … 10⁻⁶, m = 2 … 8, ρ = 0.1·2^{−k} for k = 0 … 4.
    pub fn standard() -> Self {
        SweepGrid {
            t_values: (1..=6).map(|k| 10f64.powi(-k)).collect(),
            m_values: (2..=8).collect(),
            rho_values: (0..5).map(|k| 0.1 * 0.5f64.powi(k)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub parameter: f64,
    pub values: Vec<f64>,
    pub failure: Option<String>,
}

/// Rows of (parameter, named columns); failed rows keep their parameter and
/// carry NaN values.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationTable {
    pub title: String,
    pub parameter: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl ConcentrationTable {
    pub fn new(title: &str, parameter: &str, columns: Vec<String>) -> Self {
        ConcentrationTable { title: title.into(), parameter: parameter.into(), columns, rows: Vec::new() }
    }

    /// Appends a row; an error becomes a failed row of NaNs, as does a row of
    /// the wrong width.
    pub fn push(&mut self, parameter: f64, values: Result<Vec<f64>>) {
        let values = values.and_then(|v| {
            if v.len() == self.columns.len() {
                Ok(v)
            } else {
                Err(Error::InvalidInput(format!("row has {} values for {} columns", v.len(), self.columns.len())))
            }
        });
        let row = match values {
            Ok(values) => TableRow { parameter, values, failure: None },
            Err(e) => TableRow { parameter, values: vec![f64::NAN; self.columns.len()], failure: Some(e.to_string()) },
        };
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn parameters(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.parameter).collect()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failure.is_some()).count()
    }

    /// CSV with a comment line naming the experiment and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# {}\n{},{},status\n", self.title, self.parameter, self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = std::iter::once(r.parameter).chain(r.values.iter().copied()).map(|v| format!("{v:.16e}")).collect();
            let status = r.failure.as_deref().map_or("ok".to_string(), |e| format!("\"failed: {}\"", e.replace('"', "'")));
            s += &format!("{},{}\n", cells.join(","), status);
        }
        s
    }

    /// Two-column plot data (x = parameter, or log10 of it) for one column.
    pub fn plot_data(&self, column: &str, log_x: bool) -> Result<String> {
        let ys = self.column(column).ok_or_else(|| Error::InvalidInput(format!("no column {column}")))?;
        let xl = if log_x { format!("log10({})", self.parameter) } else { self.parameter.clone() };
        let mut s = format!("# {}\n# gnuplot: plot '<file>' using 1:2 with linespoints\n# {xl} {column}\n", self.title);
        for (r, y) in self.rows.iter().zip(ys) {
            if r.failure.is_none() {
                let x = if log_x { r.parameter.log10() } else { r.parameter };
                s += &format!("{x:.16e} {y:.16e}\n");
            }
        }
        Ok(s)
    }
}

/// Bergman mass in the node disk |x| ≤ ρ (both sheets) along a plumbing
/// family, with the complement compared to the normalization's Bergman measure.
pub fn bergman_node_sweep(family: &PlumbingFamily, t_values: &[f64], rho: f64, tests: &TestFamily, tol: f64) -> Result<ConcentrationTable> {
    if !(rho > 0.0) || rho >= 0.5 * family.node_clearance() {
        return Err(Error::InvalidInput("node disk radius must lie in (0, clearance/2)".into()));
    }
    if let Some(&t) = t_values.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::InvalidInput(format!("t = {t} must be positive")));
    }
    let origin = C64::new(0.0, 0.0);
    let normalization = bergman_measure(&Curve::Hyperelliptic(family.normalization()?))?;
    let limit = DensityMeasure::bergman(&normalization, 0).with_tol(tol);
    let limit_node = limit.mass_in_disk(0, origin, rho)?;
    let limit_outside = limit.clone().outside_disk(0, origin, rho);
    let rows: Vec<Result<Vec<f64>>> = t_values
        .par_iter()
        .map(|&t| {
            let fiber = family.fiber(C64::new(t, 0.0))?;
            let mu = DensityMeasure::bergman(&bergman_measure(&Curve::Hyperelliptic(fiber))?, 0).with_tol(tol);
            let total = mu.total_mass()?;
            let node = mu.mass_in_disk(0, origin, rho)?;
            let outside = mu.outside_disk(0, origin, rho);
            let complement = outside.total_mass()?;
            let distance = weak_distance(&outside, &limit_outside, tests)?;
            Ok(vec![node, complement, total, distance, limit_node])
        })
        .collect();
    let mut table = ConcentrationTable::new(
        "Bergman measure on plumbing fibers: concentration at a non-separating node",
        "t",
        ["node_mass", "complement_mass", "total_mass", "complement_distance", "normalization_node_mass"].map(String::from).to_vec(),
    );
    for (&t, r) in t_values.iter().zip(rows) {
        table.push(t, r);
    }
    Ok(table)
}

/// Least-squares slope and intercept of y against x.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() || x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("fit needs at least two finite points".into()));
    }
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("fit abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// H with H² = −lead·∏(x − o), continuous along the cut it is built for.
fn cut_factor(lead: C64, others: Vec<C64>, mid: C64) -> impl Fn(C64) -> C64 {
    let href = (-lead * others.iter().fold(C64::new(1.0, 0.0), |acc, o| acc * (mid - o))).sqrt();
    move |x: C64| others.iter().fold(href, |acc, o| acc * ((x - o) / (mid - o)).sqrt())
}

/// Forms of the normalization ỹ² = q(x) and of nearby fibers, written as
/// polynomials P with ω = P(x)dx/y. A-cycles: the normalization's cut loops
/// and, on fibers, the vanishing loop around [−t, t].
struct LimitForms {
    family: PlumbingFamily,
    /// Cuts of the normalization's A-cycles.
    cuts: Vec<(C64, C64)>,
    /// Normalized forms of the normalization, column i of degree ≤ g − 2.
    finite: CMat,
    /// The third-kind limit, of degree ≤ g − 1 in fiber coefficients.
    third_kind: Vec<C64>,
    /// √(−q(0)), the regular factor of y on the vanishing loop at x = 0.
    h0: C64,
}

impl LimitForms {
    fn new(family: &PlumbingFamily) -> Result<Self> {
        let g = family.genus();
        if g < 2 {
            return Err(Error::InvalidInput("limit forms need fiber genus ≥ 2".into()));
        }
        let normalization = family.normalization()?;
        let order = homology_basis(&normalization)?.order;
        let cuts: Vec<(C64, C64)> = (0..g - 1).map(|i| (order[2 * i], order[2 * i + 1])).collect();
        for &(a, b) in &cuts {
            let d = b - a;
            let u = (-a * d.conj()).re / d.norm_sqr();
            if (a + d * u.clamp(0.0, 1.0)).norm() < 0.5 * family.node_clearance() {
                return Err(Error::Periods("an A-cut passes near the node".into()));
            }
        }
        let lf = LimitForms { family: family.clone(), cuts, finite: CMat::zeros(0, 0), third_kind: Vec::new(), h0: C64::new(0.0, 0.0) };
        // normalization periods of x^j dx/ỹ, j < g − 1
        let mut a = CMat::zeros(g - 1, g - 1);
        for k in 0..g - 1 {
            let p = lf.cut_periods(k, 0.0, 0, g - 1)?;
            for j in 0..g - 1 {
                a[(k, j)] = p[j];
            }
        }
        let finite = a.try_inverse().ok_or_else(|| Error::Singular("normalization A-periods".into()))?;
        // third kind: zero A-periods of P(x)dx/(xỹ) and P(0) fixed by the vanishing loop
        let h0 = (-family.q(C64::new(0.0, 0.0))).sqrt();
        let c0 = path_integral(
            |_| C64::new(1.0, 0.0),
            &Path::BranchCutLoop { a: C64::new(-1.0, 0.0), b: C64::new(1.0, 0.0), orientation: 1 },
            LOOP_TOL,
        )?;
        let mut m = CMat::zeros(g, g);
        let mut rhs = CMat::zeros(g, 1);
        m[(0, 0)] = C64::new(1.0, 0.0);
        rhs[(0, 0)] = h0 / c0;
        for k in 0..g - 1 {
            let p = lf.cut_periods(k, 0.0, -1, g)?;
            for j in 0..g {
                m[(k + 1, j)] = p[j];
            }
        }
        let sol = m.lu().solve(&rhs).ok_or_else(|| Error::Singular("third-kind conditions".into()))?;
        Ok(LimitForms { finite, third_kind: sol.column(0).iter().copied().collect(), h0, ..lf })
    }

    /// Loop integrals around cut k of x^{j+shift}/(H̃·√(1 − t²/x²)) against dx/w,
    /// j < count. With shift = 0, t = 0 these are the normalization's periods of
    /// x^j dx/ỹ; with shift = −1 they are the fiber periods of x^j dx/y, since
    /// y = x·ỹ·√(1 − t²/x²) away from the node.
    fn cut_periods(&self, k: usize, t: f64, shift: i32, count: usize) -> Result<Vec<C64>> {
        let (a, b) = self.cuts[k];
        let others: Vec<C64> = self.family.q_roots().iter().copied().filter(|&e| e != a && e != b).collect();
        let h = cut_factor(self.family.lead(), others, 0.5 * (a + b));
        (0..count)
            .map(|j| {
                let f = |x: C64| {
                    let base = x.powi(j as i32 + shift) / h(x);
                    if t > 0.0 {
                        base / (C64::new(1.0, 0.0) - t * t / (x * x)).sqrt()
                    } else {
                        base
                    }
                };
                path_integral(f, &Path::BranchCutLoop { a, b, orientation: 1 }, LOOP_TOL)
            })
            .collect()
    }

    /// Normalized forms of the fiber at t, columns of polynomial coefficients.
    fn fiber_forms(&self, t: f64) -> Result<CMat> {
        let g = self.family.genus();
        let mut a = CMat::zeros(g, g);
        for k in 0..g - 1 {
            let p = self.cut_periods(k, t, -1, g)?;
            for j in 0..g {
                a[(k, j)] = p[j];
            }
        }
        // vanishing loop: y = w·H with H² = −q(x), H(0) = h0
        let roots: Vec<C64> = self.family.q_roots().to_vec();
        let h0 = self.h0;
        let h = move |x: C64| roots.iter().fold(h0, |acc, e| acc * ((x - e) / (-e)).sqrt());
        let path = Path::BranchCutLoop { a: C64::new(-t, 0.0), b: C64::new(t, 0.0), orientation: 1 };
        for j in 0..g {
            a[(g - 1, j)] = path_integral(|x| x.powi(j as i32) / h(x), &path, LOOP_TOL)?;
        }
        a.try_inverse().ok_or_else(|| Error::Singular("fiber A-periods".into()))
    }

    /// Comparison circle |x| = clearance/2, away from the node and the roots of q.
    fn circle(&self) -> Vec<C64> {
        let r = 0.5 * self.family.node_clearance();
        (0..CIRCLE_SAMPLES).map(|k| C64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / CIRCLE_SAMPLES as f64)).collect()
    }

    /// sup over the circle of |P_fiber/y_t − P_limit/(x·ỹ)|.
    fn residual(&self, fiber: &[C64], limit: &[C64], t: f64) -> f64 {
        let p = CPoly::new(fiber.to_vec());
        let l = CPoly::new(limit.to_vec());
        self.circle()
            .into_iter()
            .map(|x| {
                let sq = (C64::new(1.0, 0.0) - t * t / (x * x)).sqrt();
                (p.eval(x) / sq - l.eval(x)).norm() / (x.norm() * self.family.q(x).norm().sqrt())
            })
            .fold(0.0, f64::max)
    }

    /// Limit polynomial of fiber form i: x·P̃_i for i < g − 1, the third kind for i = g − 1.
    fn limit(&self, i: usize) -> Vec<C64> {
        let g = self.family.genus();
        if i + 1 == g {
            return self.third_kind.clone();
        }
        let mut v = vec![C64::new(0.0, 0.0); g];
        for j in 0..g - 1 {
            v[j + 1] = self.finite[(j, i)];
        }
        v
    }

    /// Residues of the third-kind limit at the node preimages (0, ±√q(0)).
    fn residues(&self) -> (C64, C64) {
        let y0 = self.family.q(C64::new(0.0, 0.0)).sqrt();
        let r = self.third_kind[0] / y0;
        (r, -r)
    }
}

/// Decay of the normalized forms of fibers toward their limits.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitFormReport {
    pub t_values: Vec<f64>,
    /// residuals[i][k]: sup-distance of form i at t_k from its limit.
    pub residuals: Vec<Vec<f64>>,
    /// Slopes of log residual against log s, s = t².
    pub slopes: Vec<f64>,
    /// Slopes against log t, for reference.
    pub slopes_in_t: Vec<f64>,
    /// Residues of the third-kind limit at the two node preimages.
    pub residues: (C64, C64),
}

impl LimitFormReport {
    /// |residue ∓ 1/(2πi)| with the sign matched to the first preimage.
    pub fn residue_error(&self) -> f64 {
        let target = C64::new(0.0, -1.0 / (2.0 * PI));
        let (a, b) = self.residues;
        ((a - target).norm() + (b + target).norm()).min((a + target).norm() + (b - target).norm())
    }

    /// Residuals of the third-kind form decrease strictly along the grid.
    pub fn third_kind_monotone(&self) -> bool {
        self.residuals.last().is_some_and(|r| r.windows(2).all(|w| w[1] < w[0]))
    }

    pub fn slopes_within(&self, lo: f64, hi: f64) -> bool {
        self.slopes.iter().all(|s| (lo..=hi).contains(s))
    }

    pub fn table(&self) -> ConcentrationTable {
        let g = self.residuals.len();
        let mut cols: Vec<String> = (0..g - 1).map(|i| format!("form{i}_residual")).collect();
        cols.push("third_kind_residual".into());
        let mut t = ConcentrationTable::new("Normalized forms on plumbing fibers against their nodal limits", "t", cols);
        for (k, &tv) in self.t_values.iter().enumerate() {
            t.push(tv, Ok(self.residuals.iter().map(|r| r[k]).collect()));
        }
        t
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for (i, (a, b)) in self.slopes.iter().zip(&self.slopes_in_t).enumerate() {
            s += &format!("form {i}: slope {a:.4} in s = t², {b:.4} in t\n");
        }
        let (r1, r2) = self.residues;
        s += &format!(
            "residues ({:.12e}{:+.12e}i), ({:.12e}{:+.12e}i); error against ±1/(2πi) {:.3e}\n",
            r1.re,
            r1.im,
            r2.re,
            r2.im,
            self.residue_error()
        );
        s
    }
}

pub fn limit_form_check(family: &PlumbingFamily, t_values: &[f64]) -> Result<LimitFormReport> {
    if t_values.len() < 2 || !strictly_decreasing(t_values) || t_values.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidInput("t grid must be positive, decreasing, with ≥ 2 points".into()));
    }
    if t_values[0] >= 0.25 * family.node_clearance() {
        return Err(Error::InvalidInput("t must stay well inside the node clearance".into()));
    }
    let lf = LimitForms::new(family)?;
    let g = family.genus();
    let forms: Vec<CMat> = t_values.par_iter().map(|&t| lf.fiber_forms(t)).collect::<Result<_>>()?;
    let residuals: Vec<Vec<f64>> = (0..g)
        .map(|i| {
            let lim = lf.limit(i);
            t_values
                .iter()
                .zip(&forms)
                .map(|(&t, f)| {
                    let col: Vec<C64> = f.column(i).iter().copied().collect();
                    lf.residual(&col, &lim, t)
                })
                .collect()
        })
        .collect();
    let log_t: Vec<f64> = t_values.iter().map(|t| t.ln()).collect();
    let log_s: Vec<f64> = log_t.iter().map(|l| 2.0 * l).collect();
    let mut slopes = Vec::new();
    let mut slopes_in_t = Vec::new();
    for r in &residuals {
        let lr: Vec<f64> = r.iter().map(|v| v.ln()).collect();
        slopes.push(fit_line(&log_s, &lr)?.0);
        slopes_in_t.push(fit_line(&log_t, &lr)?.0);
    }
    Ok(LimitFormReport { t_values: t_values.to_vec(), residuals, slopes, slopes_in_t, residues: lf.residues() })
}

/// ‖ω‖² of the third-kind limit form over the normalization minus the node
/// disks |x| ≤ ρ, fitted against |log ρ|.
#[derive(Clone, Debug, PartialEq)]
pub struct LogDivergenceFit {
    pub rho_values: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
}

/// Slope predicted by two punctures with residues ±1/(2πi).
pub const LOG_DIVERGENCE_SLOPE: f64 = 2.0 / PI;

impl LogDivergenceFit {
    pub fn relative_error(&self) -> f64 {
        (self.slope - LOG_DIVERGENCE_SLOPE).abs() / LOG_DIVERGENCE_SLOPE
    }
}

/// Norms i∫ω∧ω̄ of the limit third-kind form off the node disks, optionally
/// also cut to |x| ≤ outer.
pub fn log_divergence_check(family: &PlumbingFamily, rho_values: &[f64], outer: Option<f64>, tol: f64) -> Result<LogDivergenceFit> {
    if rho_values.len() < 2 || !strictly_decreasing(rho_values) || rho_values.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidInput("ρ grid must be positive, decreasing, with ≥ 2 points".into()));
    }
    if rho_values[0] >= 0.5 * family.node_clearance() {
        return Err(Error::InvalidInput("ρ must lie inside the node chart".into()));
    }
    let lf = LimitForms::new(family)?;
    let normalization = family.normalization()?;
    let quad = SurfaceQuadrature::new(&normalization);
    let p = CPoly::new(lf.third_kind.clone());
    let origin = C64::new(0.0, 0.0);
    let norms: Vec<f64> = rho_values
        .par_iter()
        .map(|&rho| {
            let mut circles = vec![(origin, rho)];
            circles.extend(outer.map(|r| (origin, r)));
            let f = |x: C64| {
                let r = x.norm();
                if r <= rho || outer.is_some_and(|o| r > o) {
                    return 0.0;
                }
                // per sheet i·ω∧ω̄ = 2|P|²/(|x|²|q|) dA
                2.0 * p.eval(x).norm_sqr() / (r * r * normalization.p(x).norm())
            };
            quad.integrate(f, outer.map(|r| (origin, r)), &circles, tol)
        })
        .collect::<Result<_>>()?;
    let x: Vec<f64> = rho_values.iter().map(|r| r.ln().abs()).collect();
    let (slope, intercept) = fit_line(&x, &norms)?;
    Ok(LogDivergenceFit { rho_values: rho_values.to_vec(), norms, slope, intercept })
}

/// Mass of the Weierstrass measure of ω^m near each node (the node atom plus
/// smooth atoms within `radius` of either preimage) as m grows.
pub fn weierstrass_node_sweep(x: &RationalNodalCurve, m_values: &[usize], radius: f64) -> Result<ConcentrationTable> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("node disk radius must be positive".into()));
    }
    if m_values.iter().any(|&m| m < 2) {
        return Err(Error::InvalidInput("nodal sweeps need m ≥ 2".into()));
    }
    let g = x.genus();
    let rows: Vec<Result<Vec<f64>>> = m_values
        .par_iter()
        .map(|&m| {
            let w = weierstrass_measure(&weierstrass_points(&Curve::Nodal(x.clone()), m)?)?;
            let mut per = vec![0.0; g];
            let mut total = 0.0;
            for a in &w.measure.atoms {
                total += a.mass;
                let near = match &a.location.place {
                    Place::Node { index, .. } => Some(*index),
                    Place::Affine { x: z, .. } => x.pairs().iter().position(|&(b, c)| (z - b).norm() <= radius || (z - c).norm() <= radius),
                    Place::Infinity { .. } => None,
                };
                if let Some(i) = near {
                    per[i] += a.mass;
                }
            }
            let off = total - per.iter().sum::<f64>();
            let dev = per.iter().map(|p| (p - 1.0 / g as f64).abs()).fold(0.0, f64::max);
            let mut row = per;
            row.extend([off, total, dev]);
            Ok(row)
        })
        .collect();
    let mut cols: Vec<String> = (0..g).map(|i| format!("node{i}_mass")).collect();
    cols.extend(["off_node_mass", "total_mass", "max_node_deviation"].map(String::from));
    let mut table = ConcentrationTable::new("Weierstrass measures of a rational nodal curve: mass at the nodes", "m", cols);
    for (&m, r) in m_values.iter().zip(rows) {
        table.push(m as f64, r);
    }
    Ok(table)
}
