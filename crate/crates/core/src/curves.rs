//! Curve models: rational nodal curves, smooth hyperelliptic curves and the
//! plumbing family y² = (x² − t²)q(x), with their spaces of m-canonical sections.

use std::cmp::Ordering;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numerics::linalg::{condition_ratio, nullspace, CMat};
use crate::numerics::{poly_roots, CPoly, CRat};

/// Minimum separation between node preimages or branch points.
pub const COLLISION_RADIUS: f64 = 1e-6;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sheet::Plus => "+",
            Sheet::Minus => "-",
        }
    }
}

/// A point in a curve's working chart.
#[derive(Clone, Debug, PartialEq)]
pub enum Place {
    /// Affine point; `sheet` distinguishes the two preimages on a double cover
    /// and is `None` on rational curves and at branch points.
    Affine {
        x: C64,
        sheet: Option<Sheet>,
    },
    Infinity {
        sheet: Option<Sheet>,
    },
    /// The node glued from the i-th pair of preimages (original chart).
    Node {
        index: usize,
        preimages: (C64, C64),
    },
}

/// A place tagged with the irreducible component it lies on.
#[derive(Clone, Debug, PartialEq)]
pub struct Location {
    pub component: usize,
    pub place: Place,
}

impl Location {
    pub fn new(place: Place) -> Self {
        Location { component: 0, place }
    }
}

/// Affine coordinate w = (z − center)/scale used for internal computations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineChart {
    pub center: C64,
    pub scale: f64,
}

impl AffineChart {
    pub fn to_local(&self, z: C64) -> C64 {
        (z - self.center) / self.scale
    }

    pub fn to_global(&self, w: C64) -> C64 {
        self.center + w * self.scale
    }
}

/// ℙ¹ with g pairs of points glued into nodes; basepoint ∞.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalNodalCurve {
    pairs: Vec<(C64, C64)>,
    chart: AffineChart,
    local: Vec<(C64, C64)>,
}

impl RationalNodalCurve {
    pub fn new(pairs: Vec<(C64, C64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("a nodal curve needs at least one node pair".into()));
        }
        let pts: Vec<C64> = pairs.iter().flat_map(|&(b, c)| [b, c]).collect();
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("node preimages must be finite".into()));
        }
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if (pts[i] - pts[j]).norm() < COLLISION_RADIUS {
                    return Err(Error::InvalidInput(format!("node preimages {} and {} nearly collide", pts[i], pts[j])));
                }
            }
        }
        let center = pts.iter().sum::<C64>() / pts.len() as f64;
        let scale = pts.iter().map(|p| (p - center).norm()).fold(0.0, f64::max).max(1e-3);
        let chart = AffineChart { center, scale };
        let local = pairs.iter().map(|&(b, c)| (chart.to_local(b), chart.to_local(c))).collect();
        Ok(RationalNodalCurve { pairs, chart, local })
    }

    pub fn genus(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(C64, C64)] {
        &self.pairs
    }

    /// Node pairs in the working chart w.
    pub fn local_pairs(&self) -> &[(C64, C64)] {
        &self.local
    }

    pub fn chart(&self) -> AffineChart {
        self.chart
    }

    /// ∏(w − b_i)^m (w − c_i)^m in the working chart.
    pub fn denominator(&self, m: usize) -> CPoly {
        let roots: Vec<C64> = self.local.iter().flat_map(|&(b, c)| std::iter::repeat_n(b, m).chain(std::iter::repeat_n(c, m))).collect();
        CPoly::from_roots(&roots)
    }

    /// D(w)/(w − p)^m evaluated at p, for a node preimage p (working chart).
    pub fn reduced_denominator_at(&self, p: C64, m: usize) -> C64 {
        let mut v = one();
        for &(b, c) in &self.local {
            for q in [b, c] {
                if q != p {
                    v *= (p - q).powu(m as u32);
                }
            }
        }
        v
    }

    /// The same curve seen in the chart u = 1/z. Fails if a node preimage sits at 0.
    pub fn inverted(&self) -> Result<Self> {
        let inv = |z: C64| {
            if z.norm() < COLLISION_RADIUS {
                Err(Error::InvalidInput("node preimage at 0 cannot be inverted".into()))
            } else {
                Ok(one() / z)
            }
        };
        let pairs = self.pairs.iter().map(|&(b, c)| Ok((inv(b)?, inv(c)?))).collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }
}

/// Smooth hyperelliptic curve y² = p(x). Branch points are kept sorted by real
/// part, ties broken by imaginary part.
///
/// Sheet convention: on sheet `Plus`, y = √lead · ∏ √(x − e) with principal
/// square roots; `Minus` is its negative.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperellipticCurve {
    lead: C64,
    branch: Vec<C64>,
    poly: CPoly,
    genus: usize,
}

fn branch_order(a: &C64, b: &C64) -> Ordering {
    if (a.re - b.re).abs() <= 1e-9 * (1.0 + a.re.abs().max(b.re.abs())) {
        a.im.total_cmp(&b.im)
    } else {
        a.re.total_cmp(&b.re)
    }
}

impl HyperellipticCurve {
    pub fn new(p: CPoly) -> Result<Self> {
        if p.degree() < 3 {
            return Err(Error::InvalidInput("branch polynomial must have degree ≥ 3".into()));
        }
        let roots = poly_roots(&p, 1e-12)?;
        if roots.iter().any(|r| r.1 > 1) {
            return Err(Error::InvalidInput("branch polynomial is not squarefree".into()));
        }
        Self::from_branch_points(p.leading(), roots.into_iter().map(|r| r.0).collect())
    }

    /// y² = lead·∏(x − e).
    pub fn from_branch_points(lead: C64, mut branch: Vec<C64>) -> Result<Self> {
        let d = branch.len();
        if d < 3 {
            return Err(Error::InvalidInput("need at least 3 branch points".into()));
        }
        if lead == C64::new(0.0, 0.0) || !lead.is_finite() {
            return Err(Error::InvalidInput("leading coefficient must be nonzero".into()));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if (branch[i] - branch[j]).norm() < COLLISION_RADIUS * (1.0 + branch[i].norm()) {
                    return Err(Error::InvalidInput(format!(
                        "branch points {} and {} nearly collide (discriminant ≈ 0)",
                        branch[i], branch[j]
                    )));
                }
            }
        }
        branch.sort_by(branch_order);
        let poly = CPoly::from_roots(&branch).scale(lead);
        Ok(HyperellipticCurve { lead, genus: (d - 1) / 2, branch, poly })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn branch_points(&self) -> &[C64] {
        &self.branch
    }

    pub fn poly(&self) -> &CPoly {
        &self.poly
    }

    pub fn lead(&self) -> C64 {
        self.lead
    }

    /// True for degree 2g+2 (two points over ∞).
    pub fn even_degree(&self) -> bool {
        self.branch.len().is_multiple_of(2)
    }

    /// p(x) in product form.
    pub fn p(&self, x: C64) -> C64 {
        self.branch.iter().fold(self.lead, |acc, e| acc * (x - e))
    }

    /// y on the given sheet.
    pub fn y(&self, x: C64, sheet: Sheet) -> C64 {
        let v = self.branch.iter().fold(self.lead.sqrt(), |acc, e| acc * (x - e).sqrt());
        v * sheet.sign()
    }

    /// Index of a branch point within `tol` of x.
    pub fn branch_index(&self, x: C64, tol: f64) -> Option<usize> {
        self.branch.iter().position(|e| (e - x).norm() <= tol)
    }

    /// Largest modulus of a branch point.
    pub fn radius(&self) -> f64 {
        self.branch.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }
}

/// y² = (x − t)(x + t)·q(x): a one-parameter family acquiring a
/// non-separating node at x = 0 when t = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PlumbingFamily {
    lead: C64,
    q_roots: Vec<C64>,
}

impl PlumbingFamily {
    pub fn new(q: CPoly) -> Result<Self> {
        if q.degree() < 2 || !q.degree().is_multiple_of(2) {
            return Err(Error::InvalidInput("q must have even degree 2g ≥ 2".into()));
        }
        let roots = poly_roots(&q, 1e-12)?;
        if roots.iter().any(|r| r.1 > 1) {
            return Err(Error::InvalidInput("q is not squarefree".into()));
        }
        Self::from_roots(q.leading(), roots.into_iter().map(|r| r.0).collect())
    }

    pub fn from_roots(lead: C64, q_roots: Vec<C64>) -> Result<Self> {
        if q_roots.len() < 2 || !q_roots.len().is_multiple_of(2) {
            return Err(Error::InvalidInput("q must have an even number 2g ≥ 2 of roots".into()));
        }
        if q_roots.iter().any(|r| r.norm() < COLLISION_RADIUS) {
            return Err(Error::InvalidInput("q(0) must be nonzero".into()));
        }
        // validates distinctness
        HyperellipticCurve::from_branch_points(lead, q_roots.clone())?;
        Ok(PlumbingFamily { lead, q_roots })
    }

    /// Genus of the smooth fibers.
    pub fn genus(&self) -> usize {
        self.q_roots.len() / 2
    }

    pub fn q_roots(&self) -> &[C64] {
        &self.q_roots
    }

    pub fn lead(&self) -> C64 {
        self.lead
    }

    pub fn q(&self, x: C64) -> C64 {
        self.q_roots.iter().fold(self.lead, |acc, e| acc * (x - e))
    }

    /// Distance from the node to the nearest root of q.
    pub fn node_clearance(&self) -> f64 {
        self.q_roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn fiber(&self, t: C64) -> Result<HyperellipticCurve> {
        if t.norm() < COLLISION_RADIUS * 1e-6 {
            return Err(Error::InvalidInput("t = 0 is the nodal fiber".into()));
        }
        let mut pts = self.q_roots.clone();
        pts.push(t);
        pts.push(-t);
        HyperellipticCurve::from_branch_points(self.lead, pts)
    }

    /// The normalization ỹ² = q(x) of the nodal fiber.
    pub fn normalization(&self) -> Result<HyperellipticCurve> {
        HyperellipticCurve::from_branch_points(self.lead, self.q_roots.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Curve {
    Hyperelliptic(HyperellipticCurve),
    Nodal(RationalNodalCurve),
}

impl Curve {
    pub fn genus(&self) -> usize {
        match self {
            Curve::Hyperelliptic(h) => h.genus(),
            Curve::Nodal(n) => n.genus(),
        }
    }
}

/// Coefficient of a section against its local generator: (dw)^m in the
/// working chart of a nodal curve, (dx/y)^m on a hyperelliptic curve.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Rational(CRat),
    /// f + g·y modulo y² = p(x).
    Hyperelliptic {
        f: CRat,
        g: CRat,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub m: usize,
    pub coefficient: Coefficient,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectionBasis {
    pub curve: Curve,
    pub m: usize,
    pub sections: Vec<Section>,
}

/// h⁰(ω^m) for arithmetic genus g.
pub fn expected_dimension(g: usize, m: usize) -> usize {
    match (g, m) {
        (0, _) => usize::from(m == 0),
        (1, _) => 1,
        (_, 0) => 1,
        (_, 1) => g,
        _ => (2 * m - 1) * (g - 1),
    }
}

impl SectionBasis {
    pub fn n(&self) -> usize {
        self.sections.len()
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    /// deg ω^m = m(2g − 2).
    pub fn degree(&self) -> i64 {
        self.m as i64 * (2 * self.genus() as i64 - 2)
    }

    /// Coefficient vectors as matrix columns: numerators over the common
    /// denominator (nodal) or concatenated (f, g) coefficients (hyperelliptic).
    pub fn coefficient_matrix(&self) -> Result<CMat> {
        let mut cols: Vec<Vec<C64>> = Vec::new();
        match &self.curve {
            Curve::Nodal(x) => {
                let den = x.denominator(self.m);
                let d = den.degree() - 2 * self.m;
                for s in &self.sections {
                    let Coefficient::Rational(r) = &s.coefficient else {
                        return Err(Error::InvalidInput("nodal section with hyperelliptic coefficient".into()));
                    };
                    let num = common_numerator(r, &den)?;
                    let mut v = num.coeffs().to_vec();
                    if v.len() > d + 1 {
                        return Err(Error::InvalidInput("numerator degree exceeds the section space bound".into()));
                    }
                    v.resize(d + 1, C64::new(0.0, 0.0));
                    cols.push(v);
                }
            }
            Curve::Hyperelliptic(h) => {
                let mm = self.m * h.genus().saturating_sub(1);
                for s in &self.sections {
                    let Coefficient::Hyperelliptic { f, g } = &s.coefficient else {
                        return Err(Error::InvalidInput("hyperelliptic section with rational coefficient".into()));
                    };
                    if f.den.degree() != 0 || g.den.degree() != 0 {
                        return Err(Error::InvalidInput("hyperelliptic coefficients must be polynomial".into()));
                    }
                    let mut v = f.num.scale(one() / f.den.leading()).coeffs().to_vec();
                    v.resize(mm + 1, C64::new(0.0, 0.0));
                    let mut w = g.num.scale(one() / g.den.leading()).coeffs().to_vec();
                    w.resize(mm + 1, C64::new(0.0, 0.0));
                    v.extend(w);
                    cols.push(v);
                }
            }
        }
        let rows = cols.first().map_or(0, |c| c.len());
        Ok(CMat::from_fn(rows, cols.len(), |i, j| cols[j][i]))
    }

    /// Smallest over largest singular value of the coefficient matrix.
    pub fn rank_ratio(&self) -> Result<f64> {
        Ok(condition_ratio(&self.coefficient_matrix()?))
    }

    /// Recombine sections: new_j = Σ_i a_{ij} old_i.
    pub fn recombine(&self, a: &CMat) -> Result<SectionBasis> {
        let n = self.n();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::InvalidInput("recombination matrix has the wrong shape".into()));
        }
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let coefficient = match &self.curve {
                Curve::Nodal(x) => {
                    let den = x.denominator(self.m);
                    let mut num = CPoly::zero();
                    for i in 0..n {
                        let Coefficient::Rational(r) = &self.sections[i].coefficient else {
                            unreachable!("nodal basis holds rational coefficients")
                        };
                        num = &num + &common_numerator(r, &den)?.scale(a[(i, j)]);
                    }
                    Coefficient::Rational(CRat::new_unreduced(num, den))
                }
                Curve::Hyperelliptic(_) => {
                    let (mut f, mut g) = (CPoly::zero(), CPoly::zero());
                    for i in 0..n {
                        let Coefficient::Hyperelliptic { f: fi, g: gi } = &self.sections[i].coefficient else {
                            unreachable!("hyperelliptic basis holds pair coefficients")
                        };
                        f = &f + &fi.num.scale(a[(i, j)] / fi.den.leading());
                        g = &g + &gi.num.scale(a[(i, j)] / gi.den.leading());
                    }
                    Coefficient::Hyperelliptic { f: CRat::from_poly(f), g: CRat::from_poly(g) }
                }
            };
            out.push(Section { m: self.m, coefficient });
        }
        Ok(SectionBasis { curve: self.curve.clone(), m: self.m, sections: out })
    }
}

/// Numerator of r over the given denominator (r.den must be a scalar multiple of it).
fn common_numerator(r: &CRat, den: &CPoly) -> Result<CPoly> {
    if r.den.degree() != den.degree() {
        return Err(Error::InvalidInput("section denominator differs from the common one".into()));
    }
    Ok(r.num.scale(den.leading() / r.den.leading()))
}

/// The g forms dw/(w − b_i) − dw/(w − c_i) spanning the dualizing sheaf.
pub fn dualizing_basis(x: &RationalNodalCurve) -> SectionBasis {
    let den = x.denominator(1);
    let sections = x
        .local_pairs()
        .iter()
        .enumerate()
        .map(|(i, &(b, c))| {
            let others: Vec<C64> =
                x.local_pairs().iter().enumerate().filter(|(j, _)| *j != i).flat_map(|(_, &(bj, cj))| [bj, cj]).collect();
            let num = CPoly::from_roots(&others).scale(b - c);
            Section { m: 1, coefficient: Coefficient::Rational(CRat::new_unreduced(num, den.clone())) }
        })
        .collect();
    SectionBasis { curve: Curve::Nodal(x.clone()), m: 1, sections }
}

/// Basis of H⁰(ω^m) (nodal) or H⁰(K^m) (hyperelliptic).
pub fn section_space(curve: &Curve, m: usize) -> Result<SectionBasis> {
    if m == 0 {
        return Err(Error::InvalidInput("twist m must be ≥ 1".into()));
    }
    match curve {
        Curve::Nodal(x) => nodal_section_space(x, m),
        Curve::Hyperelliptic(h) => Ok(hyperelliptic_section_space(h, m)),
    }
}

fn nodal_section_space(x: &RationalNodalCurve, m: usize) -> Result<SectionBasis> {
    let g = x.genus();
    let den = x.denominator(m);
    let d = 2 * m * g - 2 * m;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut a = CMat::zeros(g, d + 1);
    for (i, &(b, c)) in x.local_pairs().iter().enumerate() {
        let ab = one() / x.reduced_denominator_at(b, m);
        let ac = one() / x.reduced_denominator_at(c, m) * sign;
        for j in 0..=d {
            a[(i, j)] = ab * b.powu(j as u32) - ac * c.powu(j as u32);
        }
        let rmax = (0..=d).map(|j| a[(i, j)].norm()).fold(0.0, f64::max);
        for j in 0..=d {
            a[(i, j)] /= rmax;
        }
    }
    let ns = nullspace(&a, 1e-10);
    let expected = expected_dimension(g, m);
    if ns.ncols() != expected {
        return Err(Error::RankDeficient { expected, found: ns.ncols() });
    }
    let sections = (0..ns.ncols())
        .map(|k| {
            let num = CPoly::new(ns.column(k).iter().copied().collect());
            Section { m, coefficient: Coefficient::Rational(CRat::new_unreduced(num, den.clone())) }
        })
        .collect();
    Ok(SectionBasis { curve: Curve::Nodal(x.clone()), m, sections })
}

fn hyperelliptic_section_space(h: &HyperellipticCurve, m: usize) -> SectionBasis {
    let g = h.genus();
    let mut sections = Vec::new();
    let pair =
        |f: CPoly, gg: CPoly| Section { m, coefficient: Coefficient::Hyperelliptic { f: CRat::from_poly(f), g: CRat::from_poly(gg) } };
    if m == 1 {
        for j in 0..g {
            sections.push(pair(CPoly::monomial(j), CPoly::zero()));
        }
    } else {
        let big_m = m * (g - 1);
        for j in 0..=big_m {
            sections.push(pair(CPoly::monomial(j), CPoly::zero()));
        }
        if big_m > g {
            for j in 0..(big_m - g) {
                sections.push(pair(CPoly::zero(), CPoly::monomial(j)));
            }
        }
    }
    SectionBasis { curve: Curve::Hyperelliptic(h.clone()), m, sections }
}

/// Value of the section's coefficient against its generator at `place`
/// (nodal: against (dz)^m in the original chart; hyperelliptic: against (dx/y)^m).
pub fn evaluate_section(s: &Section, curve: &Curve, place: &Place) -> Result<C64> {
    match (curve, &s.coefficient) {
        (Curve::Nodal(x), Coefficient::Rational(r)) => match place {
            Place::Affine { x: z, .. } => {
                let w = x.chart().to_local(*z);
                Ok(r.eval(w)? / x.chart().scale.powi(s.m as i32))
            }
            Place::Infinity { .. } => {
                // in u = 1/w: f(1/u)(−du/u²)^m, finite by the degree bound
                let d = r.den.degree();
                let nrev = r.num.reversed(d - 2 * s.m);
                let drev = r.den.reversed(d);
                let sign = if s.m.is_multiple_of(2) { 1.0 } else { -1.0 };
                Ok(nrev.eval(C64::new(0.0, 0.0)) / drev.eval(C64::new(0.0, 0.0)) * sign)
            }
            Place::Node { .. } => Err(Error::Pole("sections of ω^m have poles at node preimages".into())),
        },
        (Curve::Hyperelliptic(h), Coefficient::Hyperelliptic { f, g }) => match place {
            Place::Affine { x, sheet } => {
                let fv = f.eval(*x)?;
                if g.num.is_zero() {
                    return Ok(fv);
                }
                if h.branch_index(*x, 0.0).is_some() {
                    return Ok(fv);
                }
                let Some(sh) = sheet else {
                    return Err(Error::InvalidInput("sheet tag required away from branch points".into()));
                };
                Ok(fv + g.eval(*x)? * h.y(*x, *sh))
            }
            Place::Infinity { sheet } => {
                if !h.even_degree() || f.den.degree() != 0 || g.den.degree() != 0 {
                    return Err(Error::InvalidInput("evaluation at ∞ supports polynomial coefficients on even-degree models".into()));
                }
                let sh = sheet.ok_or_else(|| Error::InvalidInput("sheet tag required at ∞".into()))?;
                let gen = h.genus();
                let big_m = s.m * gen.saturating_sub(1);
                let yt = h.lead().sqrt() * sh.sign();
                let fc = f.num.coeffs().get(big_m).copied().unwrap_or_default() / f.den.leading();
                let gc = if big_m > gen {
                    g.num.coeffs().get(big_m - gen - 1).copied().unwrap_or_default() / g.den.leading()
                } else {
                    C64::new(0.0, 0.0)
                };
                let sign = if s.m.is_multiple_of(2) { 1.0 } else { -1.0 };
                Ok((fc + gc * yt) / yt.powu(s.m as u32) * sign)
            }
            Place::Node { .. } => Err(Error::InvalidInput("hyperelliptic curves have no nodes".into())),
        },
        _ => Err(Error::InvalidInput("section does not belong to this curve model".into())),
    }
}
