//! The acceptance suite: twelve numbered checks at desk scale, each reported
//! as one verdict line. Failures are verdicts, never panics.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curves::{expected_dimension, section_space, Curve, HyperellipticCurve, Place, PlumbingFamily, RationalNodalCurve, Sheet};
use crate::degeneration::{bergman_node_sweep, limit_form_check, log_divergence_check, weierstrass_node_sweep, SweepGrid};
use crate::error::{Error, Result};
use crate::jacobian_nodal::theta_weierstrass_check;
use crate::measures::{weak_distance, DensityMeasure, Measure, TestFamily, QUAD_TOL};
use crate::numerics::linalg::CMat;
use crate::numerics::quad::agm;
use crate::numerics::CPoly;
use crate::periods::{bergman_measure, period_matrix};
use crate::weierstrass::{expected_total_weight, weierstrass_measure, weierstrass_points, weierstrass_points_of_basis};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// y² = x⁶ − 1.
pub fn sextic() -> HyperellipticCurve {
    HyperellipticCurve::new(CPoly::from_real(&[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])).expect("squarefree")
}

/// y² = x³ − x.
pub fn lemniscatic() -> HyperellipticCurve {
    HyperellipticCurve::new(CPoly::from_real(&[0.0, -1.0, 0.0, 1.0])).expect("squarefree")
}

/// A genus-2 quintic with generic branch points.
pub fn quintic() -> HyperellipticCurve {
    HyperellipticCurve::from_branch_points(c(0.7, 0.2), vec![c(-1.0, 0.2), c(-0.3, -0.9), c(0.5, 0.7), c(1.1, -0.3), c(0.2, 0.1)])
        .expect("distinct")
}

/// A genus-3 curve with eight generic branch points.
pub fn genus_three() -> HyperellipticCurve {
    let pts = vec![c(-1.2, 0.3), c(-0.7, -0.8), c(0.1, 0.9), c(0.4, -0.5), c(0.9, 0.6), c(1.3, -0.2), c(1.7, 0.4), c(-1.6, -0.3)];
    HyperellipticCurve::from_branch_points(c(1.0, 0.0), pts).expect("distinct")
}

/// Smooth curves used by the mass and period checks.
pub fn test_curves() -> Vec<(&'static str, HyperellipticCurve)> {
    vec![("lemniscatic", lemniscatic()), ("sextic", sextic()), ("quintic", quintic()), ("genus three", genus_three())]
}

/// y² = (x² − t²)(x² − α²)(x² − β²) with α = 0.22 + 0.05i, β = 0.3 − 0.08i.
pub fn standard_family() -> PlumbingFamily {
    let (a, b) = (c(0.22, 0.05), c(0.3, -0.08));
    PlumbingFamily::from_roots(c(1.0, 0.0), vec![a, -a, b, -b]).expect("distinct roots away from 0")
}

/// Rational nodal curves of genus 2, 3, 4.
pub fn nodal_curve(g: usize) -> Result<RationalNodalCurve> {
    let all = [(c(0.0, 0.0), c(1.0, 0.0)), (c(2.0, 0.5), c(3.0, -0.5)), (c(-1.0, 1.5), c(0.5, -2.0)), (c(-2.5, -1.0), c(1.5, 2.0))];
    if !(1..=all.len()).contains(&g) {
        return Err(Error::InvalidInput(format!("no standard nodal curve of genus {g}")));
    }
    if g == 2 {
        return RationalNodalCurve::new(vec![(c(0.0, 0.0), c(1.0, 0.0)), (c(2.0, 0.0), c(3.0, 0.0))]);
    }
    RationalNodalCurve::new(all[..g].to_vec())
}

/// One verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget: Option<f64>,
}

impl Verdict {
    /// "criterion N PASS|FAIL name: detail".
    pub fn line(&self) -> String {
        format!("criterion {:>2} {} {}: {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

pub const CRITERIA: [(usize, &str, Option<f64>); 12] = [
    (1, "total weight identity", Some(60.0)),
    (2, "genus-2 canonical Weierstrass points", Some(5.0)),
    (3, "Riemann relations and lemniscatic periods", Some(10.0)),
    (4, "Bergman mass conservation", Some(120.0)),
    (5, "Bergman concentration at a non-separating node", None),
    (6, "logarithmic divergence of the third-kind norm", Some(10.0)),
    (7, "decay orders of limit forms", None),
    (8, "nodal Weierstrass measures concentrate at nodes", Some(120.0)),
    (9, "equidistribution on a smooth curve", None),
    (10, "theta divisor cross-check", None),
    (11, "basis, chart and frame invariance", None),
    (12, "compact-type limit object", None),
];

/// Outcome of a check body: pass flag and detail.
type Check = Result<(bool, String)>;

/// Runs criterion `id` (1 to 12); `tol` is the area-quadrature tolerance.
pub fn run_criterion(id: usize, tol: f64) -> Result<Verdict> {
    let &(_, name, budget) = CRITERIA.iter().find(|c| c.0 == id).ok_or_else(|| Error::InvalidInput(format!("no criterion {id}")))?;
    let start = Instant::now();
    let out = match id {
        1 => total_weight_identity(),
        2 => canonical_points(),
        3 => riemann_relations(),
        4 => mass_conservation(tol),
        5 => concentration(tol),
        6 => log_divergence(tol),
        7 => decay_orders(),
        8 => nodal_concentration(),
        9 => equidistribution(tol),
        10 => theta_cross_check(),
        11 => invariance(),
        _ => compact_type(tol),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match out {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = budget {
        if seconds > b {
            passed = false;
            detail += &format!("; over the {b} s budget");
        }
    }
    Ok(Verdict { id, name, passed, detail, seconds, budget })
}

/// All criteria in order.
pub fn run_all(tol: f64) -> Vec<Verdict> {
    CRITERIA.iter().map(|c| run_criterion(c.0, tol).expect("listed criterion")).collect()
}

/// Plain-text report: one verdict line per criterion, then a summary.
/// Timings go on separate lines so the rest is reproducible.
pub fn report(verdicts: &[Verdict], with_timings: bool) -> String {
    let mut s = String::new();
    for v in verdicts {
        s += &v.line();
        s.push('\n');
    }
    let passed = verdicts.iter().filter(|v| v.passed).count();
    s += &format!("summary: {passed}/{} passed\n", verdicts.len());
    if with_timings {
        s += "\ntimings:\n";
        for v in verdicts {
            s += &format!("criterion {:>2}: {:.2} s\n", v.id, v.seconds);
        }
    }
    s
}

fn total_weight_identity() -> Check {
    let mut jobs: Vec<(String, Curve, usize)> = Vec::new();
    for g in 2..=4 {
        for m in 2..=6 {
            jobs.push((format!("nodal g={g} m={m}"), Curve::Nodal(nodal_curve(g)?), m));
        }
    }
    for (label, h) in [("sextic", sextic()), ("genus three", genus_three())] {
        for m in 1..=6 {
            jobs.push((format!("{label} m={m}"), Curve::Hyperelliptic(h.clone()), m));
        }
    }
    let bad: Vec<String> = jobs
        .par_iter()
        .filter_map(|(label, curve, m)| {
            let g = curve.genus();
            let want = expected_total_weight(g, *m, expected_dimension(g, *m));
            match weierstrass_points(curve, *m) {
                Ok(w) if w.total_weight as i64 == want => None,
                Ok(w) => Some(format!("{label}: {} vs {want}", w.total_weight)),
                Err(e) => Some(format!("{label}: {e}")),
            }
        })
        .collect();
    Ok((bad.is_empty(), if bad.is_empty() { format!("{} cases exact", jobs.len()) } else { bad.join("; ") }))
}

fn canonical_points() -> Check {
    let w = weierstrass_points(&Curve::Hyperelliptic(sextic()), 1)?;
    let roots: Vec<C64> = (0..6).map(|k| C64::from_polar(1.0, PI * k as f64 / 3.0)).collect();
    let mut worst: f64 = 0.0;
    let mut hit = [false; 6];
    for (loc, weight) in &w.atoms {
        let Place::Affine { x, .. } = loc.place else {
            return Ok((false, "atom away from the affine chart".into()));
        };
        let (k, d) = roots.iter().enumerate().map(|(k, r)| (k, (x - r).norm())).min_by(|a, b| a.1.total_cmp(&b.1)).expect("six roots");
        if *weight != 1 {
            return Ok((false, format!("weight {weight} at {x}")));
        }
        hit[k] = true;
        worst = worst.max(d);
    }
    let ok = w.atoms.len() == 6 && w.total_weight == 6 && hit.iter().all(|h| *h) && worst < 1e-8;
    Ok((ok, format!("{} atoms, total {}, max distance to roots of unity {worst:.2e}", w.atoms.len(), w.total_weight)))
}

fn riemann_relations() -> Check {
    let family = standard_family();
    let mut curves = test_curves();
    let fibers: Vec<HyperellipticCurve> = SweepGrid::standard().t_values.iter().map(|&t| family.fiber(c(t, 0.0))).collect::<Result<_>>()?;
    curves.extend(fibers.into_iter().map(|h| ("fiber", h)));
    let data: Vec<_> = curves.par_iter().map(|(_, h)| period_matrix(h)).collect::<Result<_>>()?;
    let sym = data.iter().map(|d| d.symmetry_defect()).fold(0.0, f64::max);
    let eig = data.iter().map(|d| d.min_im_eigenvalue()).fold(f64::INFINITY, f64::min);
    // complete lattice of y² = x³ − x: periods of modulus 2π/agm(1, √2)
    let oracle = 2.0 * PI / agm(c(1.0, 0.0), c(2f64.sqrt(), 0.0)).re;
    let lem = &data[0];
    let dev = (lem.a_periods[(0, 0)].norm() - oracle).abs().max((lem.b_periods[(0, 0)].norm() - oracle).abs());
    let ok = sym < 1e-9 && eig > 0.0 && dev < 1e-8;
    Ok((ok, format!("{} curves, max ‖Ω−Ωᵀ‖ {sym:.2e}, min eig Im Ω {eig:.3e}, lemniscatic period error {dev:.2e}", data.len())))
}

fn mass_conservation(tol: f64) -> Check {
    let family = standard_family();
    let mut curves = test_curves();
    for &t in &SweepGrid::standard().t_values {
        curves.push(("fiber", family.fiber(c(t, 0.0))?));
    }
    let errs: Vec<f64> = curves
        .par_iter()
        .map(|(_, h)| {
            let mu = DensityMeasure::bergman(&bergman_measure(&Curve::Hyperelliptic(h.clone()))?, 0).with_tol(tol);
            Ok((mu.total_mass()? - h.genus() as f64).abs())
        })
        .collect::<Result<_>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok((worst < 1e-6, format!("{} curves, max |mass − g| {worst:.2e}", errs.len())))
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn concentration(tol: f64) -> Check {
    let tests = TestFamily::standard(0, c(-1.0, -1.0), c(1.0, 1.0))?;
    let table = bergman_node_sweep(&standard_family(), &SweepGrid::standard().t_values, 0.1, &tests, tol)?;
    if let Some(r) = table.rows.iter().find(|r| r.failure.is_some()) {
        return Ok((false, format!("row t = {:e} failed: {}", r.parameter, r.failure.as_deref().unwrap_or(""))));
    }
    let node = table.column("node_mass").expect("column");
    let dist = table.column("complement_distance").expect("column");
    let last = *node.last().expect("rows");
    let dl = *dist.last().expect("rows");
    let ok = strictly_increasing(&node) && last > 0.9 && dl < 0.02;
    let shown: Vec<String> = node.iter().map(|v| format!("{v:.4}")).collect();
    Ok((ok, format!("node mass [{}], final complement distance {dl:.4}", shown.join(", "))))
}

fn log_divergence(tol: f64) -> Check {
    let fit = log_divergence_check(&standard_family(), &SweepGrid::standard().rho_values, None, tol)?;
    let e = fit.relative_error();
    Ok((e < 0.05, format!("slope {:.5} against 2/π = {:.5} ({:.2}% off)", fit.slope, 2.0 / PI, 100.0 * e)))
}

fn decay_orders() -> Check {
    let t: Vec<f64> = (2..=6).map(|k| 10f64.powi(-k)).collect();
    let r = limit_form_check(&standard_family(), &t)?;
    let ok = r.slopes_within(0.8, 1.2) && r.third_kind_monotone() && r.residue_error() < 1e-8;
    let shown: Vec<String> = r.slopes.iter().map(|s| format!("{s:.4}")).collect();
    Ok((ok, format!("slopes in s = t² [{}], residue error {:.2e}", shown.join(", "), r.residue_error())))
}

fn nodal_concentration() -> Check {
    let ms: Vec<usize> = (2..=8).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for g in [2, 3] {
        let table = weierstrass_node_sweep(&nodal_curve(g)?, &ms, 0.1)?;
        if table.failures() > 0 {
            return Ok((false, format!("genus {g}: {} failed rows", table.failures())));
        }
        let off = table.column("off_node_mass").expect("column");
        let dev = table.column("max_node_deviation").expect("column");
        let total = table.column("total_mass").expect("column");
        let last = *dev.last().expect("rows");
        ok &= strictly_decreasing(&off) && strictly_decreasing(&dev) && last < 0.05;
        ok &= total.iter().all(|t| (t - 1.0).abs() < 1e-12);
        parts.push(format!("g={g}: off-node {:.4} → {:.4}, node deviation at m=8 {last:.4}", off[0], off[off.len() - 1]));
    }
    Ok((ok, parts.join("; ")))
}

fn equidistribution(tol: f64) -> Check {
    let h = sextic();
    let tests = TestFamily::standard(0, c(-1.5, -1.5), c(1.5, 1.5))?;
    let bergman = DensityMeasure::bergman(&bergman_measure(&Curve::Hyperelliptic(h.clone()))?, 0).with_tol(tol).scaled(0.5);
    let mut d = Vec::new();
    for m in [2, 4, 8] {
        let w = weierstrass_measure(&weierstrass_points(&Curve::Hyperelliptic(h.clone()), m)?)?;
        d.push(weak_distance(&w.measure, &bergman, &tests)?);
    }
    let ok = strictly_decreasing(&d) && d[2] < 0.5 * d[0];
    Ok((ok, format!("weak distance at m = 2, 4, 8: {:.5}, {:.5}, {:.5}", d[0], d[1], d[2])))
}

fn theta_cross_check() -> Check {
    let x = nodal_curve(2)?;
    let w = weierstrass_points(&Curve::Nodal(x.clone()), 2)?;
    let check = theta_weierstrass_check(&x, &w, 20, 2024)?;
    Ok((
        check.passed(),
        format!(
            "shift {:?}, max atom residual {:.2e}, min control residual {:.3e}",
            check.shift,
            check.max_atom_residual(),
            check.min_control_residual()
        ),
    ))
}

/// Every atom of `a` has a partner in `b` with the same weight, and conversely.
fn same_atoms(a: &[(C64, u64)], b: &[(C64, u64)], tol: f64) -> bool {
    let covered = |xs: &[(C64, u64)], ys: &[(C64, u64)]| {
        xs.iter().all(|(x, w)| ys.iter().any(|(y, v)| v == w && (x - y).norm() < tol * (1.0 + x.norm())))
    };
    a.len() == b.len() && covered(a, b) && covered(b, a)
}

fn invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let smooth = |w: &crate::weierstrass::WeightedPoints| w.smooth_affine().map(|a| (a.0, a.2)).collect::<Vec<_>>();
    // basis recombination
    let x = nodal_curve(2)?;
    let basis = section_space(&Curve::Nodal(x.clone()), 2)?;
    let a = CMat::from_fn(basis.n(), basis.n(), |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let w1 = weierstrass_points_of_basis(&basis)?;
    let w2 = weierstrass_points_of_basis(&basis.recombine(&a)?)?;
    let recombined = same_atoms(&smooth(&w1), &smooth(&w2), 1e-6) && w1.total_weight == w2.total_weight;
    // z ↦ 1/z on a curve whose node preimages avoid 0 and ∞
    let y = RationalNodalCurve::new(vec![(c(0.5, 0.2), c(1.0, -0.3)), (c(2.0, 0.5), c(-1.5, -0.5))])?;
    let keep = |v: Vec<(C64, u64)>| v.into_iter().filter(|a| a.0.norm() > 1e-3 && a.0.norm() < 1e3).collect::<Vec<_>>();
    let direct = keep(smooth(&weierstrass_points(&Curve::Nodal(y.clone()), 2)?));
    let pulled: Vec<(C64, u64)> =
        keep(smooth(&weierstrass_points(&Curve::Nodal(y.inverted()?), 2)?)).into_iter().map(|(u, k)| (1.0 / u, k)).collect();
    let swapped = !direct.is_empty() && same_atoms(&direct, &pulled, 1e-6);
    // unitary frame rotation
    let b = bergman_measure(&Curve::Hyperelliptic(sextic()))?;
    let u = CMat::from_fn(2, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).qr().q();
    let rot = b.rotated(&u)?;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let x = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (d0, d1) = (b.density(x, Sheet::Plus), rot.density(x, Sheet::Plus));
        worst = worst.max((d0 - d1).abs() / d0.max(1.0));
    }
    let ok = recombined && swapped && worst < 1e-10;
    Ok((ok, format!("recombination {recombined}, chart swap {swapped}, frame rotation defect {worst:.2e}")))
}

fn compact_type(tol: f64) -> Check {
    let parts = [sextic(), lemniscatic()];
    let measures: Vec<DensityMeasure> = parts
        .iter()
        .enumerate()
        .map(|(k, h)| Ok(DensityMeasure::bergman(&bergman_measure(&Curve::Hyperelliptic(h.clone()))?, k).with_tol(tol)))
        .collect::<Result<_>>()?;
    let union = DensityMeasure::disjoint_union(measures.clone())?;
    let total = union.total_mass()?;
    let sum: f64 = measures.iter().map(|m| m.total_mass()).sum::<Result<f64>>()?;
    // an atom keeps its mass as the disk shrinks; a density loses it at least linearly
    let probes = [(0, c(0.3, 0.2)), (0, c(1.0, 0.0)), (1, c(0.0, 0.0)), (1, c(-0.4, 0.7))];
    let mut ratio: f64 = 0.0;
    for (k, p) in probes {
        let (big, small) = (union.mass_in_disk(k, p, 1e-3)?, union.mass_in_disk(k, p, 1e-5)?);
        ratio = ratio.max(small / big);
    }
    let ok = (total - 3.0).abs() < 1e-6 && (total - sum).abs() < 1e-6 && ratio < 0.1;
    Ok((ok, format!("total {total:.9} (g₁ + g₂ = 3), disk mass ratio r = 1e-5 vs 1e-3 at most {ratio:.2e}")))
}

/// Default area-quadrature tolerance of the suite.
pub const DEFAULT_TOL: f64 = QUAD_TOL;
