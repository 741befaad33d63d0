//! The generalized Jacobian (ℂ*)^g of an irreducible rational nodal curve,
//! its Abel map, the determinant that plays the role of the theta function,
//! and a cross-check of Wronskian Weierstrass points against it.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::{Coefficient, Place, RationalNodalCurve};
use crate::error::{Error, Result};
use crate::numerics::linalg::{determinant, CMat};
use crate::numerics::roots::poly_roots;
use crate::weierstrass::WeightedPoints;

/// Residual below which an atom counts as lying on the theta divisor.
pub const ATOM_TOL: f64 = 1e-6;
/// Residual above which a control point counts as off the theta divisor.
pub const CONTROL_TOL: f64 = 1e-3;

/// λ = (exp z_1, …, exp z_g).
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedJacobianPoint {
    lambda: Vec<C64>,
}

impl GeneralizedJacobianPoint {
    pub fn new(lambda: Vec<C64>) -> Result<Self> {
        if lambda.iter().any(|l| !(l.norm() > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidInput("generalized Jacobian coordinates must be finite and nonzero".into()));
        }
        Ok(GeneralizedJacobianPoint { lambda })
    }

    pub fn identity(g: usize) -> Self {
        GeneralizedJacobianPoint { lambda: vec![C64::new(1.0, 0.0); g] }
    }

    /// From logarithmic coordinates z ∈ ℂ^g; z_i + 2πi gives the same point.
    pub fn from_log(z: &[C64]) -> Self {
        GeneralizedJacobianPoint { lambda: z.iter().map(|v| v.exp()).collect() }
    }

    pub fn genus(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[C64] {
        &self.lambda
    }

    /// Principal logarithms, Im z_i ∈ (−π, π].
    pub fn log_lift(&self) -> Vec<C64> {
        self.lambda.iter().map(|l| l.ln()).collect()
    }

    /// Group law (componentwise product).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.genus() != other.genus() {
            return Err(Error::InvalidInput("points of different generalized Jacobians".into()));
        }
        Ok(GeneralizedJacobianPoint { lambda: self.lambda.iter().zip(&other.lambda).map(|(a, b)| a * b).collect() })
    }

    pub fn pow(&self, k: i64) -> Self {
        GeneralizedJacobianPoint { lambda: self.lambda.iter().map(|l| l.powi(k as i32)).collect() }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.lambda.iter().zip(&other.lambda).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn abel_of_point(pairs: &[(C64, C64)], place: &Place) -> Result<Vec<C64>> {
    match place {
        Place::Infinity { .. } => Ok(vec![C64::new(1.0, 0.0); pairs.len()]),
        Place::Node { .. } => Err(Error::InvalidInput("the Abel map is undefined at nodes".into())),
        Place::Affine { x, .. } => pairs
            .iter()
            .map(|&(b, c)| {
                if (x - b).norm() == 0.0 || (x - c).norm() == 0.0 {
                    Err(Error::InvalidInput(format!("divisor point {x} is a node preimage")))
                } else {
                    Ok((x - b) / (x - c))
                }
            })
            .collect(),
    }
}

/// φ(Σ n_k x_k) = ∏_k φ(x_k)^{n_k}, φ_i(x) = (x − b_i)/(x − c_i), basepoint ∞.
pub fn abel_map(x: &RationalNodalCurve, divisor: &[(Place, i64)]) -> Result<GeneralizedJacobianPoint> {
    abel_map_in(x.pairs(), divisor)
}

fn abel_map_in(pairs: &[(C64, C64)], divisor: &[(Place, i64)]) -> Result<GeneralizedJacobianPoint> {
    let mut lambda = vec![C64::new(1.0, 0.0); pairs.len()];
    for (place, k) in divisor {
        for (l, v) in lambda.iter_mut().zip(abel_of_point(pairs, place)?) {
            *l *= v.powi(*k as i32);
        }
    }
    GeneralizedJacobianPoint::new(lambda)
}

/// τ(λ) = det[b_i^j − c_i^j λ_i], rows j < g, one column per node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalTheta {
    pairs: Vec<(C64, C64)>,
}

impl NodalTheta {
    pub fn new(pairs: Vec<(C64, C64)>) -> Self {
        NodalTheta { pairs }
    }

    pub fn of_curve(x: &RationalNodalCurve) -> Self {
        NodalTheta { pairs: x.pairs().to_vec() }
    }

    pub fn genus(&self) -> usize {
        self.pairs.len()
    }

    pub fn matrix(&self, p: &GeneralizedJacobianPoint) -> Result<CMat> {
        let g = self.genus();
        if p.genus() != g {
            return Err(Error::InvalidInput("point and theta have different genus".into()));
        }
        Ok(CMat::from_fn(g, g, |j, i| {
            let (b, c) = self.pairs[i];
            b.powu(j as u32) - c.powu(j as u32) * p.lambda[i]
        }))
    }

    /// |τ| divided by the product of column norms, so it lies in [0, 1].
    pub fn normalized(&self, p: &GeneralizedJacobianPoint) -> Result<f64> {
        let a = self.matrix(p)?;
        let cols: f64 = (0..a.ncols()).map(|j| a.column(j).norm()).product();
        if cols == 0.0 {
            return Ok(0.0);
        }
        Ok(determinant(&a).norm() / cols)
    }
}

pub fn nodal_theta(t: &NodalTheta, p: &GeneralizedJacobianPoint) -> Result<C64> {
    Ok(determinant(&t.matrix(p)?))
}

/// Outcome of comparing Wronskian atoms with the theta-divisor condition.
#[derive(Clone, Debug)]
pub struct ThetaCheck {
    /// Half-period translate that reproduces the atoms (all +1 is no shift).
    pub shift: Vec<i8>,
    /// Other candidate shifts that also matched.
    pub alternatives: Vec<Vec<i8>>,
    pub atom_residuals: Vec<(C64, u64, f64)>,
    pub control_residuals: Vec<(C64, f64)>,
    pub excluded_node_atoms: usize,
}

impl ThetaCheck {
    pub fn max_atom_residual(&self) -> f64 {
        self.atom_residuals.iter().map(|a| a.2).fold(0.0, f64::max)
    }

    pub fn min_control_residual(&self) -> f64 {
        self.control_residuals.iter().map(|a| a.1).fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.max_atom_residual() < ATOM_TOL && self.min_control_residual() > CONTROL_TOL
    }

    pub fn report(&self) -> String {
        let mut s = format!(
            "shift {:?}{}\n",
            self.shift,
            if self.alternatives.is_empty() { String::new() } else { format!(" (also matched: {:?})", self.alternatives) }
        );
        s += &format!("node atoms excluded: {}\n", self.excluded_node_atoms);
        for (x, w, r) in &self.atom_residuals {
            s += &format!("atom {:.12} w={} |s|={:.3e}\n", x, w, r);
        }
        for (x, r) in &self.control_residuals {
            s += &format!("control {:.12} |s|={:.3e}\n", x, r);
        }
        s += &format!(
            "max atom residual {:.3e}, min control residual {:.3e}: {}\n",
            self.max_atom_residual(),
            self.min_control_residual(),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }
}

/// λ(D_L), D_L = divisor of the first basis section (zeros of its numerator;
/// the rest sits at ∞, where φ = 1). Working chart.
fn reference_divisor(x: &RationalNodalCurve, m: usize) -> Result<Vec<(Place, i64)>> {
    let basis = crate::curves::section_space(&crate::curves::Curve::Nodal(x.clone()), m)?;
    let first = basis.sections.first().ok_or_else(|| Error::InvalidInput("empty section space".into()))?;
    let Coefficient::Rational(r) = &first.coefficient else {
        return Err(Error::InvalidInput("nodal sections are rational".into()));
    };
    let roots = poly_roots(&r.num, 1e-12)?;
    Ok(roots.into_iter().map(|(z, k)| (Place::Affine { x: z, sheet: None }, k as i64)).collect())
}

fn half_periods(g: usize) -> Vec<Vec<i8>> {
    // lexicographic with +1 first, so no shift is tried first
    (0..1usize << g).map(|bits| (0..g).map(|i| if bits >> (g - 1 - i) & 1 == 0 { 1 } else { -1 }).collect()).collect()
}

/// Checks every smooth Wronskian atom x against τ(φ(D_L − n·x)·ε) = 0 for a
/// half-period ε fixed by calibration, plus `controls` random points away
/// from atoms and nodes where τ must not vanish.
pub fn theta_weierstrass_check(x: &RationalNodalCurve, atoms: &WeightedPoints, controls: usize, seed: u64) -> Result<ThetaCheck> {
    let (g, m, n) = (x.genus(), atoms.m, atoms.n as i64);
    if atoms.genus != g {
        return Err(Error::InvalidInput("atoms belong to a curve of different genus".into()));
    }
    let chart = x.chart();
    let pairs = x.local_pairs().to_vec();
    let theta = NodalTheta::new(pairs.clone());
    let base = abel_map_in(&pairs, &reference_divisor(x, m)?)?;
    let residual = |w: C64, eps: &[i8]| -> Result<f64> {
        let shift = GeneralizedJacobianPoint::new(eps.iter().map(|&e| C64::new(e as f64, 0.0)).collect())?;
        let lam = base.mul(&abel_map_in(&pairs, &[(Place::Affine { x: w, sheet: None }, -n)])?)?.mul(&shift)?;
        theta.normalized(&lam)
    };
    let mut smooth = Vec::new();
    let mut excluded = 0;
    for (loc, w) in &atoms.atoms {
        match loc.place {
            Place::Affine { x: z, .. } => smooth.push((chart.to_local(z), *w)),
            _ => excluded += 1,
        }
    }
    let mut matched = Vec::new();
    for eps in half_periods(g) {
        let mut ok = true;
        for &(w, _) in &smooth {
            if residual(w, &eps)? >= ATOM_TOL {
                ok = false;
                break;
            }
        }
        if ok {
            matched.push(eps);
        }
    }
    if matched.is_empty() {
        return Err(Error::Calibration(format!("no half-period shift puts all {} smooth atoms on the theta divisor", smooth.len())));
    }
    let shift = matched.remove(0);
    let atom_residuals = smooth.iter().map(|&(w, k)| Ok((chart.to_global(w), k, residual(w, &shift)?))).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut control_residuals = Vec::with_capacity(controls);
    let mut tries = 0;
    while control_residuals.len() < controls {
        tries += 1;
        if tries > 100_000 {
            return Err(Error::InvalidInput("could not place control points away from atoms".into()));
        }
        let w = C64::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
        let near_atom = smooth.iter().any(|a| (a.0 - w).norm() < 0.1);
        let near_node = pairs.iter().any(|&(b, c)| (b - w).norm() < 0.1 || (c - w).norm() < 0.1);
        if near_atom || near_node {
            continue;
        }
        control_residuals.push((chart.to_global(w), residual(w, &shift)?));
    }
    Ok(ThetaCheck { shift, alternatives: matched, atom_residuals, control_residuals, excluded_node_atoms: excluded })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_period_order_starts_at_identity() {
        let h = half_periods(2);
        assert_eq!(h, vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]);
    }
}
