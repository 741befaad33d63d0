//! Period matrices, Gram matrices and Bergman densities of hyperelliptic curves.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::curves::{Coefficient, Curve, HyperellipticCurve, Section, SectionBasis, Sheet, COLLISION_RADIUS};
use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitian_factor, CMat};
use crate::numerics::{path_integral, CPoly, CRat, Path};

pub const PERIOD_TOL: f64 = 1e-14;

/// A chain of loops around consecutive cuts.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub loops: Vec<Path>,
}

/// Cuts join consecutive branch points [e_k, e_{k+1}] in the routing order.
/// A_i loops around cut 2i; B_i is the sum of the loops around cuts 2k+1, k ≥ i.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticCycles {
    pub a_cycles: Vec<Cycle>,
    pub b_cycles: Vec<Cycle>,
    pub order: Vec<C64>,
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let u = ((p - a) * d.conj()).re / d.norm_sqr();
    (p - (a + d * u.clamp(0.0, 1.0))).norm()
}

pub fn homology_basis(h: &HyperellipticCurve) -> Result<SymplecticCycles> {
    routed_basis(h.branch_points())
}

/// Cycles for an explicit routing order of the branch points.
pub fn routed_basis(order: &[C64]) -> Result<SymplecticCycles> {
    let nb = order.len();
    let g = (nb - 1) / 2;
    if g == 0 {
        return Err(Error::InvalidInput("genus 0 has no cycles".into()));
    }
    for k in 0..2 * g {
        let (a, b) = (order[k], order[k + 1]);
        for (l, &p) in order.iter().enumerate() {
            if l != k && l != k + 1 && segment_distance(p, a, b) < COLLISION_RADIUS {
                return Err(Error::Periods(format!("branch point {p} lies on the cut [{a}, {b}]")));
            }
        }
    }
    let lp = |k: usize| Path::BranchCutLoop { a: order[k], b: order[k + 1], orientation: 1 };
    let a_cycles = (0..g).map(|i| Cycle { loops: vec![lp(2 * i)] }).collect();
    let b_cycles = (0..g).map(|i| Cycle { loops: (i..g).map(|k| lp(2 * k + 1)).collect() }).collect();
    Ok(SymplecticCycles { a_cycles, b_cycles, order: order.to_vec() })
}

/// Loop integrals of x^j dx/y, j < g, around the cut [order[k], order[k+1]],
/// with y continued along the cut from its value √(lead)·w·H.
fn cut_periods(lead: C64, order: &[C64], k: usize, g: usize, tol: f64) -> Result<Vec<C64>> {
    let (a, b) = (order[k], order[k + 1]);
    let mid = 0.5 * (a + b);
    let others: Vec<C64> = order.iter().enumerate().filter(|(l, _)| *l != k && *l != k + 1).map(|(_, e)| *e).collect();
    // y² = lead·(x−a)(x−b)·∏(x−o) = w²·H², with (x−a)(x−b) = −w²
    let h_ref = (-lead * others.iter().fold(C64::new(1.0, 0.0), |acc, o| acc * (mid - o))).sqrt();
    let h = |x: C64| others.iter().fold(h_ref, |acc, o| acc * ((x - o) / (mid - o)).sqrt());
    let path = Path::BranchCutLoop { a, b, orientation: 1 };
    (0..g).map(|j| path_integral(|x| x.powu(j as u32) / h(x), &path, tol)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodData {
    pub cycles: SymplecticCycles,
    /// Rows are cycles, columns monomials x^j dx/y.
    pub a_periods: CMat,
    pub b_periods: CMat,
    pub omega: CMat,
    /// Column k holds the monomial coefficients of the A-normalized form ω'_k.
    pub normalized: CMat,
    /// i∫ω'_j∧ω̄'_k = 2 Im Ω.
    pub gram: CMat,
    /// H with H·G·H* = I; the orthonormal frame is ω_i = Σ_j H_ij ω'_j.
    pub change_of_basis: CMat,
    /// Row i holds the monomial coefficients of the orthonormal form ω_i.
    pub frame: CMat,
}

impl PeriodData {
    pub fn genus(&self) -> usize {
        self.omega.nrows()
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.omega - self.omega.transpose()).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of Im Ω.
    pub fn min_im_eigenvalue(&self) -> f64 {
        min_sym_eigen(&self.omega)
    }

    pub fn normalized_basis(&self, h: &HyperellipticCurve) -> SectionBasis {
        let g = self.genus();
        let sections = (0..g)
            .map(|k| Section {
                m: 1,
                coefficient: Coefficient::Hyperelliptic {
                    f: CRat::from_poly(CPoly::new(self.normalized.column(k).iter().copied().collect())),
                    g: CRat::from_poly(CPoly::zero()),
                },
            })
            .collect();
        SectionBasis { curve: Curve::Hyperelliptic(h.clone()), m: 1, sections }
    }

    /// Matrices as row-major lists of (re, im) pairs.
    pub fn report(&self) -> String {
        let mat = |name: &str, m: &CMat| {
            let rows: Vec<String> = m
                .row_iter()
                .map(|r| {
                    let cells: Vec<String> = r.iter().map(|v| format!("({:.16e}, {:.16e})", v.re, v.im)).collect();
                    format!("  [{}]", cells.join(", "))
                })
                .collect();
            format!("{name} =\n{}\n", rows.join("\n"))
        };
        let mut s = format!("genus = {}\n", self.genus());
        s += &mat("omega", &self.omega);
        s += &mat("a_periods", &self.a_periods);
        s += &mat("b_periods", &self.b_periods);
        s += &mat("gram", &self.gram);
        s += &mat("change_of_basis", &self.change_of_basis);
        s
    }
}

fn min_sym_eigen(omega: &CMat) -> f64 {
    let g = omega.nrows();
    let im = DMatrix::<f64>::from_fn(g, g, |i, j| 0.5 * (omega[(i, j)].im + omega[(j, i)].im));
    im.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn period_matrix(h: &HyperellipticCurve) -> Result<PeriodData> {
    period_matrix_with(h, &homology_basis(h)?, PERIOD_TOL)
}

/// Period data for a given routing. Loop orientations are fixed so that Ω is
/// symmetric with positive definite imaginary part; the returned cycles carry them.
pub fn period_matrix_with(h: &HyperellipticCurve, cycles: &SymplecticCycles, tol: f64) -> Result<PeriodData> {
    let order = &cycles.order;
    let g = h.genus();
    if order.len() != h.branch_points().len() || g == 0 {
        return Err(Error::InvalidInput("routing does not match the curve".into()));
    }
    let raw: Vec<Vec<C64>> = (0..2 * g).map(|k| cut_periods(h.lead(), order, k, g, tol)).collect::<Result<_>>()?;

    let mut best: Option<(f64, u64, CMat, CMat, CMat)> = None;
    for mask in 0u64..(1 << (2 * g - 1)) {
        let sign = |k: usize| if k > 0 && (mask >> (k - 1)) & 1 == 1 { -1.0 } else { 1.0 };
        let pa = CMat::from_fn(g, g, |i, j| raw[2 * i][j] * sign(2 * i));
        let pb = CMat::from_fn(g, g, |i, j| (i..g).map(|k| raw[2 * k + 1][j] * sign(2 * k + 1)).sum::<C64>());
        let Some(inv) = pa.clone().try_inverse() else { continue };
        let omega = &pb * &inv;
        if min_sym_eigen(&omega) <= 0.0 {
            continue;
        }
        let scale = 1.0 + omega.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let defect = (&omega - omega.transpose()).iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;
        if best.as_ref().is_none_or(|b| defect < b.0) {
            best = Some((defect, mask, pa, pb, omega));
        }
    }
    let Some((defect, mask, pa, pb, omega)) = best else {
        return Err(Error::Periods("no loop orientation gives Im Ω ≻ 0".into()));
    };
    if defect > 1e-8 {
        return Err(Error::Periods(format!("Riemann relations fail (symmetry defect {defect:e})")));
    }
    let flip = |k: usize| k > 0 && (mask >> (k - 1)) & 1 == 1;
    let mut oriented = cycles.clone();
    for (i, c) in oriented.a_cycles.iter_mut().enumerate() {
        orient(&mut c.loops, &[2 * i], &flip);
    }
    for (i, c) in oriented.b_cycles.iter_mut().enumerate() {
        let ks: Vec<usize> = (i..g).map(|k| 2 * k + 1).collect();
        orient(&mut c.loops, &ks, &flip);
    }

    let normalized = pa.clone().try_inverse().ok_or_else(|| Error::Periods("singular A-period matrix".into()))?;
    let gram = omega.map(|v| C64::new(2.0 * v.im, 0.0));
    let gram = (&gram + gram.transpose()) * C64::new(0.5, 0.0);
    let chol = hermitian_factor(&gram, 1e-12)?;
    let change_of_basis = chol.try_inverse().ok_or_else(|| Error::Singular("Gram factor".into()))?;
    let frame = &change_of_basis * normalized.transpose();
    Ok(PeriodData { cycles: oriented, a_periods: pa, b_periods: pb, omega, normalized, gram, change_of_basis, frame })
}

fn orient(loops: &mut [Path], ks: &[usize], flip: &dyn Fn(usize) -> bool) {
    for (p, &k) in loops.iter_mut().zip(ks) {
        if flip(k) {
            *p = p.reversed();
        }
    }
}

/// μ^B = i Σ ω_i∧ω̄_i for an orthonormal frame ω_i = P_i(x) dx/y.
#[derive(Clone, Debug, PartialEq)]
pub struct BergmanMeasure {
    /// `None` for a genus-0 normalization, whose Bergman measure vanishes.
    pub curve: Option<HyperellipticCurve>,
    pub frame: Vec<CPoly>,
}

impl BergmanMeasure {
    pub fn genus(&self) -> usize {
        self.frame.len()
    }

    /// Σ_i |P_i(x)|².
    pub fn frame_norm_sq(&self, x: C64) -> f64 {
        self.frame.iter().map(|p| p.eval(x).norm_sqr()).sum()
    }

    /// Density against Lebesgue measure in the x-plane, on one sheet.
    pub fn density(&self, x: C64, _sheet: Sheet) -> f64 {
        match &self.curve {
            None => 0.0,
            Some(h) => 2.0 * self.frame_norm_sq(x) / h.p(x).norm(),
        }
    }

    /// The same measure from the frame U·ω for a unitary U.
    pub fn rotated(&self, u: &CMat) -> Result<BergmanMeasure> {
        let g = self.genus();
        if u.nrows() != g || u.ncols() != g {
            return Err(Error::InvalidInput("rotation has the wrong shape".into()));
        }
        let frame = (0..g).map(|i| (0..g).fold(CPoly::zero(), |acc, j| &acc + &self.frame[j].scale(u[(i, j)]))).collect();
        Ok(BergmanMeasure { curve: self.curve.clone(), frame })
    }

    pub fn from_periods(h: &HyperellipticCurve, data: &PeriodData) -> Self {
        let g = data.genus();
        let frame = (0..g).map(|i| CPoly::new(data.frame.row(i).iter().copied().collect())).collect();
        BergmanMeasure { curve: Some(h.clone()), frame }
    }
}

/// Bergman measure of a hyperelliptic curve, or the zero measure on the
/// ℙ¹ normalization of a rational nodal curve.
pub fn bergman_measure(curve: &Curve) -> Result<BergmanMeasure> {
    match curve {
        Curve::Nodal(_) => Ok(BergmanMeasure { curve: None, frame: Vec::new() }),
        Curve::Hyperelliptic(h) => Ok(BergmanMeasure::from_periods(h, &period_matrix(h)?)),
    }
}
