use proptest::prelude::*;
use wlab::curves::*;
use wlab::numerics::linalg::CMat;
use wlab::numerics::CPoly;
use wlab::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn nodal(pairs: &[(f64, f64)]) -> RationalNodalCurve {
    RationalNodalCurve::new(pairs.iter().map(|&(b, cc)| (c(b, 0.0), c(cc, 0.0))).collect()).unwrap()
}

fn sextic() -> HyperellipticCurve {
    HyperellipticCurve::new(CPoly::from_real(&[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap()
}

// Residue of N/D at a simple root p of D.
fn residue(num: &CPoly, den: &CPoly, p: C64) -> C64 {
    num.eval(p) / den.derivative().eval(p)
}

fn numerators(b: &SectionBasis) -> Vec<(CPoly, CPoly)> {
    b.sections
        .iter()
        .map(|s| match &s.coefficient {
            Coefficient::Rational(r) => (r.num.clone(), r.den.clone()),
            _ => panic!("nodal sections are rational"),
        })
        .collect()
}

#[test]
fn dualizing_form_of_one_pair() {
    let x = nodal(&[(0.0, 1.0)]);
    let b = dualizing_basis(&x);
    assert_eq!(b.n(), 1);
    for z in [c(-1.0, 0.0), c(0.3, 0.7), c(5.0, -2.0)] {
        let v = evaluate_section(&b.sections[0], &b.curve, &Place::Affine { x: z, sheet: None }).unwrap();
        let want = 1.0 / z - 1.0 / (z - 1.0);
        assert!((v - want).norm() < 1e-13);
    }
    let at_node = evaluate_section(&b.sections[0], &b.curve, &Place::Affine { x: c(1.0, 0.0), sheet: None });
    assert!(at_node.is_err());
}

#[test]
fn dualizing_residues_cancel_per_pair() {
    let x = nodal(&[(0.0, 1.0), (2.0, 3.0), (-1.5, 4.5)]);
    let b = dualizing_basis(&x);
    for (j, (num, den)) in numerators(&b).iter().enumerate() {
        for (i, &(bi, ci)) in x.local_pairs().iter().enumerate() {
            let rb = residue(num, den, bi);
            let rc = residue(num, den, ci);
            assert!((rb + rc).norm() < 1e-12);
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((rb - want).norm() < 1e-12, "Res_b{i} ω{j} = {rb}");
        }
    }
}

#[test]
fn dualizing_forms_are_independent() {
    let b = dualizing_basis(&nodal(&[(0.0, 1.0), (2.0, 3.0)]));
    assert_eq!(b.n(), 2);
    assert!(b.rank_ratio().unwrap() > 1e-3);
}

fn subspace_distance(a: &CMat, b: &CMat) -> f64 {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let proj = &qa * qa.adjoint();
    (&qb - &proj * &qb).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[test]
fn canonical_space_equals_dualizing_span() {
    for pairs in [vec![(0.0, 1.0), (2.0, 3.0)], vec![(0.0, 1.0), (2.0, 3.0), (-1.0, 5.0)]] {
        let x = nodal(&pairs);
        let a = dualizing_basis(&x).coefficient_matrix().unwrap();
        let s = section_space(&Curve::Nodal(x), 1).unwrap().coefficient_matrix().unwrap();
        assert!(subspace_distance(&a, &s) < 1e-9);
    }
}

#[test]
fn sextic_holomorphic_forms() {
    let h = sextic();
    let b = section_space(&Curve::Hyperelliptic(h.clone()), 1).unwrap();
    assert_eq!(b.n(), 2);
    let x0 = c(0.4, 0.3);
    for (j, s) in b.sections.iter().enumerate() {
        let v = evaluate_section(s, &b.curve, &Place::Affine { x: x0, sheet: Some(Sheet::Plus) }).unwrap();
        assert!((v - x0.powu(j as u32)).norm() < 1e-15);
    }
}

#[test]
fn branch_point_value_is_plain_part() {
    let h = sextic();
    let s = Section {
        m: 2,
        coefficient: Coefficient::Hyperelliptic {
            f: wlab::numerics::CRat::from_poly(CPoly::from_real(&[1.0, 2.0])),
            g: wlab::numerics::CRat::from_poly(CPoly::from_real(&[3.0])),
        },
    };
    let e = h.branch_points()[0];
    let v = evaluate_section(&s, &Curve::Hyperelliptic(h), &Place::Affine { x: e, sheet: None }).unwrap();
    assert!((v - (1.0 + 2.0 * e)).norm() < 1e-14);
}

#[test]
fn nodal_low_genus_dimensions() {
    let x = nodal(&[(0.0, 1.0), (2.0, 3.0)]);
    assert_eq!(section_space(&Curve::Nodal(x), 2).unwrap().n(), 3);
}

#[test]
fn plumbing_fiber_is_even_in_t() {
    let fam = PlumbingFamily::from_roots(c(1.0, 0.0), vec![c(1.0, 0.5), c(-1.0, 0.5), c(1.0, -0.5), c(-1.0, -0.5)]).unwrap();
    assert_eq!(fam.genus(), 2);
    let t = c(0.01, 0.002);
    assert_eq!(fam.fiber(t).unwrap(), fam.fiber(-t).unwrap());
    assert_eq!(fam.normalization().unwrap().genus(), 1);
    assert!(fam.fiber(c(0.0, 0.0)).is_err());
}

#[test]
fn repeated_branch_points_rejected() {
    let p = CPoly::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
    assert!(HyperellipticCurve::new(p).is_err());
}

fn pair_strategy(g: usize) -> impl Strategy<Value = Vec<(C64, C64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2 * g)
        .prop_map(|v| v.chunks(2).map(|p| (c(p[0].0, p[0].1), c(p[1].0, p[1].1))).collect())
}

fn well_separated(pairs: &[(C64, C64)]) -> bool {
    let pts: Vec<C64> = pairs.iter().flat_map(|&(b, c)| [b, c]).collect();
    (0..pts.len()).all(|i| ((i + 1)..pts.len()).all(|j| (pts[i] - pts[j]).norm() > 0.2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nodal_dimensions_match_riemann_roch(g in 2usize..5, m in 1usize..7, seed in 0u64..1000) {
        let pairs: Vec<(C64, C64)> = (0..g)
            .map(|i| {
                let t = (seed as f64) * 0.37 + i as f64;
                (c(1.3 * t.cos() + i as f64, t.sin()), c(-1.1 * t.sin(), 0.8 * t.cos() + 2.0 * i as f64 + 0.5))
            })
            .collect();
        prop_assume!(well_separated(&pairs));
        let x = RationalNodalCurve::new(pairs).unwrap();
        let b = section_space(&Curve::Nodal(x), m).unwrap();
        prop_assert_eq!(b.n(), expected_dimension(g, m));
    }

    #[test]
    fn residue_sums_vanish(pairs in pair_strategy(3)) {
        prop_assume!(well_separated(&pairs));
        let x = RationalNodalCurve::new(pairs).unwrap();
        let b = dualizing_basis(&x);
        for (num, den) in numerators(&b) {
            for &(bi, ci) in x.local_pairs() {
                prop_assert!((residue(&num, &den, bi) + residue(&num, &den, ci)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hyperelliptic_monomial_count(g in 2usize..6, m in 2usize..9) {
        let big_m = m * (g - 1);
        let plain = big_m + 1;
        let with_y = big_m.saturating_sub(g);
        prop_assert_eq!(plain + with_y, (2 * m - 1) * (g - 1));
        let pts: Vec<C64> = (0..2 * g + 2).map(|k| C64::from_polar(1.0, 0.3 + k as f64)).collect();
        let h = HyperellipticCurve::from_branch_points(c(1.0, 0.0), pts).unwrap();
        prop_assert_eq!(section_space(&Curve::Hyperelliptic(h), m).unwrap().n(), plain + with_y);
    }

    #[test]
    fn sheets_differ_by_y_sign(re in -2.0f64..2.0, im in -2.0f64..2.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let h = sextic();
        let x0 = c(re, im);
        prop_assume!(h.branch_points().iter().all(|e| (e - x0).norm() > 1e-3));
        let s = Section {
            m: 3,
            coefficient: Coefficient::Hyperelliptic {
                f: wlab::numerics::CRat::from_poly(CPoly::from_real(&[a, 1.0])),
                g: wlab::numerics::CRat::from_poly(CPoly::from_real(&[b])),
            },
        };
        let curve = Curve::Hyperelliptic(h.clone());
        let vp = evaluate_section(&s, &curve, &Place::Affine { x: x0, sheet: Some(Sheet::Plus) }).unwrap();
        let vm = evaluate_section(&s, &curve, &Place::Affine { x: x0, sheet: Some(Sheet::Minus) }).unwrap();
        let f = x0 + a;
        let gy = b * h.y(x0, Sheet::Plus);
        prop_assert!((vp - (f + gy)).norm() < 1e-12 * (1.0 + vp.norm()));
        prop_assert!((vm - (f - gy)).norm() < 1e-12 * (1.0 + vm.norm()));
    }

    #[test]
    fn fibers_even_in_t(re in -0.3f64..0.3, im in -0.3f64..0.3) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let fam = PlumbingFamily::from_roots(c(2.0, 0.0), vec![c(1.0, 0.2), c(-0.8, 0.9), c(0.4, -1.1), c(-1.2, -0.6)]).unwrap();
        let t = c(re, im);
        prop_assert_eq!(fam.fiber(t).unwrap(), fam.fiber(-t).unwrap());
    }
}
