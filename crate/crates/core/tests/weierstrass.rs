use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wlab::curves::*;
use wlab::numerics::linalg::{determinant, CMat};
use wlab::numerics::CPoly;
use wlab::weierstrass::*;
use wlab::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sextic() -> HyperellipticCurve {
    HyperellipticCurve::new(CPoly::from_real(&[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap()
}

fn genus_three() -> HyperellipticCurve {
    let pts = vec![c(-1.2, 0.3), c(-0.7, -0.8), c(0.1, 0.9), c(0.4, -0.5), c(0.9, 0.6), c(1.3, -0.2), c(1.7, 0.4), c(-1.6, -0.3)];
    HyperellipticCurve::from_branch_points(c(1.0, 0.0), pts).unwrap()
}

fn nodal(pairs: &[((f64, f64), (f64, f64))]) -> RationalNodalCurve {
    RationalNodalCurve::new(pairs.iter().map(|&(b, cc)| (c(b.0, b.1), c(cc.0, cc.1))).collect()).unwrap()
}

fn nodal_g2() -> RationalNodalCurve {
    nodal(&[((0.0, 0.0), (1.0, 0.0)), ((2.0, 0.5), (3.0, -0.5))])
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn smooth_atoms(w: &WeightedPoints) -> Vec<(C64, Option<Sheet>, u64)> {
    w.smooth_affine().collect()
}

// every atom of `a` has a partner in `b` within tol with equal weight, and conversely
fn same_atoms(a: &[(C64, u64)], b: &[(C64, u64)], tol: f64) -> bool {
    let covered = |xs: &[(C64, u64)], ys: &[(C64, u64)]| {
        xs.iter().all(|(x, w)| ys.iter().any(|(y, v)| v == w && (x - y).norm() < tol * (1.0 + x.norm())))
    };
    a.len() == b.len() && covered(a, b) && covered(b, a)
}

#[test]
fn vandermonde_wronskian_is_constant() {
    let n = 5;
    let polys: Vec<CPoly> = (0..n).map(CPoly::monomial).collect();
    let w = wronskian_of_polys(polys).unwrap();
    let want: f64 = (0..n).map(|k| (1..=k).product::<usize>() as f64).product();
    for x in [c(0.0, 0.0), c(1.5, -2.0), c(-3.0, 0.7)] {
        let v = w.value(&Place::Affine { x, sheet: None }).unwrap();
        assert!((v - want).norm() < 1e-10 * want, "{v}");
    }
}

#[test]
fn swapping_basis_elements_negates() {
    let polys = vec![CPoly::from_real(&[1.0, 2.0]), CPoly::from_real(&[0.0, 0.0, 1.0]), CPoly::from_real(&[3.0, 0.0, 0.0, 1.0])];
    let mut swapped = polys.clone();
    swapped.swap(0, 2);
    let (a, b) = (wronskian_of_polys(polys).unwrap(), wronskian_of_polys(swapped).unwrap());
    let place = Place::Affine { x: c(0.4, -1.1), sheet: None };
    assert!((a.value(&place).unwrap() + b.value(&place).unwrap()).norm() < 1e-12);
}

#[test]
fn dependent_basis_is_rejected() {
    let p = CPoly::from_real(&[1.0, 2.0]);
    assert!(wronskian_of_polys(vec![p.clone(), p.scale(c(2.0, 1.0))]).is_err());
}

#[test]
fn sextic_canonical_points_are_branch_points() {
    let w = weierstrass_points(&Curve::Hyperelliptic(sextic()), 1).unwrap();
    assert_eq!(w.total_weight, 6);
    assert_eq!(w.atoms.len(), 6);
    for (loc, weight) in &w.atoms {
        assert_eq!(*weight, 1);
        let Place::Affine { x, sheet: None } = loc.place else { panic!("expected a branch point, got {loc:?}") };
        assert!((x.powu(6) - 1.0).norm() < 1e-8);
    }
}

#[test]
fn exact_wronskian_matches_cauchy_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = sextic();
    let hb = section_space(&Curve::Hyperelliptic(h.clone()), 2).unwrap();
    let hw = wronskian(&hb).unwrap();
    let x = nodal_g2();
    let nb = section_space(&Curve::Nodal(x), 3).unwrap();
    let nw = wronskian(&nb).unwrap();
    let mut checked = 0;
    while checked < 10 {
        let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if h.branch_points().iter().any(|e| (e - z).norm() < 0.2) {
            continue;
        }
        let sheet = if checked % 2 == 0 { Sheet::Plus } else { Sheet::Minus };
        let place = Place::Affine { x: z, sheet: Some(sheet) };
        let (exact, fd) = (hw.value(&place).unwrap(), hw.finite_difference_value(&place).unwrap());
        assert!((exact - fd).norm() < 1e-6 * exact.norm(), "{exact} vs {fd}");
        let zn = c(rng.gen_range(-0.5..3.5), rng.gen_range(-1.0..1.0));
        if [0.0, 1.0, 2.0, 3.0].iter().all(|&r| (zn - c(r, 0.0)).norm() > 0.3) {
            let place = Place::Affine { x: zn, sheet: None };
            let (exact, fd) = (nw.value(&place).unwrap(), nw.finite_difference_value(&place).unwrap());
            assert!((exact - fd).norm() < 1e-6 * exact.norm(), "{exact} vs {fd}");
        }
        checked += 1;
    }
}

#[test]
fn monomial_wronskian_is_a_toeplitz_determinant() {
    let h = genus_three();
    let m = 3;
    let b = section_space(&Curve::Hyperelliptic(h.clone()), m).unwrap();
    let w = wronskian(&b).unwrap();
    let sys = HyperellipticSystem::new(&h, m).unwrap();
    let fact: f64 = (0..b.n()).map(|i| (1..=i).map(|k| k as f64).product::<f64>()).product();
    for (x, s) in [(c(0.2, 0.1), Sheet::Plus), (c(-0.5, 1.4), Sheet::Minus)] {
        let lhs = w.value(&Place::Affine { x, sheet: Some(s) }).unwrap();
        let rhs = sys.toeplitz_determinant(x, s) * fact;
        assert!((lhs - rhs).norm() < 1e-8 * lhs.norm(), "{lhs} vs {rhs}");
    }
}

#[test]
fn log_derivative_matches_high_precision_values() {
    // reference values from a 50-digit evaluation of the same Toeplitz trace
    let sys = |m| HyperellipticSystem::new(&genus_three(), m).unwrap();
    let cases = [
        (5, c(1.1, -0.4), c(91.981030506986, 170.66398250791)),
        (5, c(-1.9, 0.7), c(-178.77940483644, -95.063195550174)),
        (6, c(1.1, -0.4), c(152.16481414477, 283.68386828089)),
        (6, c(0.0, 1.5), c(-63.02076054491, -326.41342119744)),
        (8, c(-1.9, 0.7), c(-498.21187634652, -272.28764350962)),
    ];
    for (m, x, want) in cases {
        let got = sys(m).qhat_logder(x);
        assert!((got - want).norm() < 1e-9 * want.norm(), "m={m}: {got} vs {want}");
    }
}

#[test]
fn hyperelliptic_weight_grid() {
    let quintic =
        HyperellipticCurve::from_branch_points(c(1.0, 0.0), vec![c(-1.0, 0.2), c(-0.3, -0.9), c(0.5, 0.7), c(1.1, -0.3), c(0.2, 0.1)])
            .unwrap();
    for h in [sextic(), quintic] {
        for m in 1..=6 {
            let w = weierstrass_points(&Curve::Hyperelliptic(h.clone()), m).unwrap();
            assert_eq!(w.total_weight as i64, expected_total_weight(2, m, w.n), "m={m}");
        }
    }
    let w = weierstrass_points(&Curve::Hyperelliptic(genus_three()), 4).unwrap();
    assert_eq!(w.total_weight, 588);
}

#[test]
fn nodal_genus_two_quadratic_weight() {
    let w = weierstrass_points(&Curve::Nodal(nodal_g2()), 2).unwrap();
    assert_eq!(w.n, 3);
    assert_eq!(w.total_weight, 18);
}

#[test]
fn nodal_weight_grid() {
    let pairs = [((0.0, 0.0), (1.0, 0.0)), ((2.0, 0.5), (3.0, -0.5)), ((-1.0, 1.5), (0.5, -2.0)), ((1.5, 2.0), (-2.0, -1.0))];
    for g in 2..=4 {
        let x = nodal(&pairs[..g]);
        for m in 2..=6 {
            let w = weierstrass_points(&Curve::Nodal(x.clone()), m).unwrap();
            assert_eq!(w.total_weight as i64, expected_total_weight(g, m, (2 * m - 1) * (g - 1)), "g={g} m={m}");
        }
    }
}

#[test]
fn nodal_canonical_system_is_rejected() {
    assert!(weierstrass_points(&Curve::Nodal(nodal_g2()), 1).is_err());
}

#[test]
fn symmetric_nodes_give_symmetric_atoms() {
    let x = nodal(&[((1.0, 0.3), (2.0, -0.4)), ((-1.0, -0.3), (-2.0, 0.4))]);
    for m in [2, 3] {
        let w = weierstrass_points(&Curve::Nodal(x.clone()), m).unwrap();
        let atoms: Vec<(C64, u64)> = smooth_atoms(&w).iter().map(|a| (a.0, a.2)).collect();
        let mirrored: Vec<(C64, u64)> = atoms.iter().map(|&(z, k)| (-z, k)).collect();
        assert!(!atoms.is_empty());
        assert!(same_atoms(&atoms, &mirrored, 1e-6));
    }
}

#[test]
fn recombined_basis_gives_same_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = nodal_g2();
    let b = section_space(&Curve::Nodal(x), 2).unwrap();
    let a = random_matrix(&mut rng, b.n());
    let b2 = b.recombine(&a).unwrap();
    let (w1, w2) = (weierstrass_points_of_basis(&b).unwrap(), weierstrass_points_of_basis(&b2).unwrap());
    let strip = |w: &WeightedPoints| smooth_atoms(w).iter().map(|a| (a.0, a.2)).collect::<Vec<_>>();
    assert!(same_atoms(&strip(&w1), &strip(&w2), 1e-6));
    // ρ scales by det A
    let (r1, r2) = (wronskian(&b).unwrap(), wronskian(&b2).unwrap());
    let place = Place::Affine { x: c(0.7, 0.9), sheet: None };
    let ratio = r2.value(&place).unwrap() / r1.value(&place).unwrap();
    let det = determinant(&a);
    assert!((ratio - det).norm() < 1e-8 * det.norm(), "{ratio} vs {det}");
}

#[test]
fn chart_swap_preserves_points() {
    let x = nodal(&[((0.5, 0.2), (1.0, -0.3)), ((2.0, 0.5), (-1.5, -0.5))]);
    let inv = x.inverted().unwrap();
    let w = weierstrass_points(&Curve::Nodal(x), 2).unwrap();
    let wi = weierstrass_points(&Curve::Nodal(inv), 2).unwrap();
    let keep = |v: Vec<(C64, Option<Sheet>, u64)>| {
        v.into_iter().filter(|a| a.0.norm() > 1e-3 && a.0.norm() < 1e3).map(|a| (a.0, a.2)).collect::<Vec<_>>()
    };
    let direct = keep(smooth_atoms(&w));
    let pulled: Vec<(C64, u64)> = keep(smooth_atoms(&wi)).into_iter().map(|(u, k)| (1.0 / u, k)).collect();
    assert!(!direct.is_empty());
    assert!(same_atoms(&direct, &pulled, 1e-6));
    assert_eq!(w.total_weight, wi.total_weight);
}

#[test]
fn measure_has_unit_mass() {
    let w = weierstrass_points(&Curve::Hyperelliptic(sextic()), 1).unwrap();
    let mu = weierstrass_measure(&w).unwrap();
    assert_eq!(mu.measure.atoms.len(), 6);
    assert!(mu.measure.atoms.iter().all(|a| (a.mass - 1.0 / 6.0).abs() < 1e-15));
    assert!((mu.measure.total() - 1.0).abs() < 1e-15);
    let single = WeightedPoints { atoms: vec![(w.atoms[0].0.clone(), 4)], total_weight: 4, n: 2, m: 1, genus: 2 };
    assert_eq!(weierstrass_measure(&single).unwrap().measure.atoms[0].mass, 1.0);
}

#[test]
fn csv_rows_have_full_precision() {
    let w = weierstrass_points(&Curve::Hyperelliptic(sextic()), 1).unwrap();
    let csv = w.to_csv();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "re,im,tag,weight");
    assert_eq!(rows.len(), 7);
    let re: f64 = rows[1].split(',').next().unwrap().parse().unwrap();
    assert!(re.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_genus_two_totals(seed in 0u64..10_000, m in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<C64> = (0..6).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        prop_assume!((0..6).all(|i| ((i + 1)..6).all(|j| (pts[i] - pts[j]).norm() > 0.1)));
        let h = HyperellipticCurve::from_branch_points(c(1.0, 0.0), pts).unwrap();
        let w = weierstrass_points(&Curve::Hyperelliptic(h), m).unwrap();
        prop_assert_eq!(w.total_weight as i64, expected_total_weight(2, m, w.n));
    }

    #[test]
    fn recombination_scales_by_determinant(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = section_space(&Curve::Hyperelliptic(sextic()), 2).unwrap();
        let a = random_matrix(&mut rng, b.n());
        let det = determinant(&a);
        prop_assume!(det.norm() > 1e-3);
        let (r1, r2) = (wronskian(&b).unwrap(), wronskian(&b.recombine(&a).unwrap()).unwrap());
        let place = Place::Affine { x: c(0.3, 0.45), sheet: Some(Sheet::Plus) };
        let ratio = r2.value(&place).unwrap() / r1.value(&place).unwrap();
        prop_assert!((ratio - det).norm() < 1e-8 * det.norm());
    }
}
