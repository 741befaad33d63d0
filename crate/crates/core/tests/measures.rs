use proptest::prelude::*;
use wlab::curves::*;
use wlab::measures::*;
use wlab::numerics::CPoly;
use wlab::periods::*;
use wlab::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sextic() -> HyperellipticCurve {
    HyperellipticCurve::new(CPoly::from_real(&[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap()
}

fn lemniscatic() -> HyperellipticCurve {
    HyperellipticCurve::new(CPoly::from_real(&[0.0, -1.0, 0.0, 1.0])).unwrap()
}

fn bergman(h: &HyperellipticCurve, component: usize) -> DensityMeasure {
    DensityMeasure::bergman(&bergman_measure(&Curve::Hyperelliptic(h.clone())).unwrap(), component)
}

fn atom(x: C64, mass: f64) -> Atom {
    Atom { location: Location::new(Place::Affine { x, sheet: None }), mass }
}

#[test]
fn unit_atom_disk_mass() {
    let mu = PointMeasure::new(vec![atom(c(0.0, 0.0), 1.0)]).unwrap();
    assert_eq!(mu.mass_in_disk(0, c(0.0, 0.0), 0.1).unwrap(), 1.0);
    assert_eq!(mu.mass_in_disk(0, c(0.2, 0.0), 0.1).unwrap(), 0.0);
    assert!(mu.mass_in_disk(0, c(0.0, 0.0), -1.0).is_err());
}

#[test]
fn nonpositive_masses_rejected() {
    assert!(PointMeasure::new(vec![atom(c(0.0, 0.0), 0.0)]).is_err());
}

#[test]
fn elliptic_total_mass_is_one() {
    let t = bergman(&lemniscatic(), 0).total_mass().unwrap();
    assert!((t - 1.0).abs() < 1e-6, "{t}");
}

#[test]
fn sextic_total_mass_is_two() {
    let t = bergman(&sextic(), 0).total_mass().unwrap();
    assert!((t - 2.0).abs() < 1e-6, "{t}");
}

#[test]
fn genus_three_total_mass() {
    let h = HyperellipticCurve::from_branch_points(
        c(1.0, 0.0),
        vec![c(-1.2, 0.3), c(-0.7, -0.8), c(0.1, 0.9), c(0.4, -0.5), c(0.9, 0.6), c(1.3, -0.2), c(1.7, 0.4), c(-1.6, -0.3)],
    )
    .unwrap();
    let t = bergman(&h, 0).total_mass().unwrap();
    assert!((t - 3.0).abs() < 1e-6, "{t}");
}

/// Area integrals of ω'_j·conj(ω'_k) over the surface against 2 Im Ω.
fn gram_by_area(h: &HyperellipticCurve) -> f64 {
    let data = period_matrix(h).unwrap();
    let g = data.genus();
    let q = SurfaceQuadrature::new(h);
    let form = |k: usize| CPoly::new(data.normalized.column(k).iter().copied().collect());
    let mut worst: f64 = 0.0;
    for j in 0..g {
        for k in j..g {
            let (pj, pk) = (form(j), form(k));
            let pair = |x: C64| pj.eval(x) * pk.eval(x).conj() / h.p(x).norm();
            let re = q.integrate(|x| 2.0 * pair(x).re, None, &[], 1e-10).unwrap();
            let im = q.integrate(|x| 2.0 * pair(x).im, None, &[], 1e-10).unwrap();
            worst = worst.max((c(re, im) - data.gram[(j, k)]).norm());
        }
    }
    worst
}

#[test]
fn gram_matrix_from_area_matches_periods() {
    assert!(gram_by_area(&lemniscatic()) < 1e-6);
    assert!(gram_by_area(&sextic()) < 1e-6);
    let q = HyperellipticCurve::from_branch_points(c(0.7, 0.2), vec![c(-1.0, 0.2), c(-0.3, -0.9), c(0.5, 0.7), c(1.1, -0.3), c(0.2, 0.1)])
        .unwrap();
    assert!(gram_by_area(&q) < 1e-6);
}

#[test]
fn constant_test_function_gives_total() {
    let mu = bergman(&sextic(), 0);
    let a = mu.integrate(&TestFunction::Constant(1.0)).unwrap();
    let b = mu.integrate(&TestFunction::Constant(0.25)).unwrap();
    assert!((0.25 * a - b).abs() < 1e-9);
    let w = PointMeasure::new(vec![atom(c(1.0, 0.0), 0.3), atom(c(-1.0, 0.5), 0.7)]).unwrap();
    assert_eq!(w.integrate(&TestFunction::Constant(1.0)).unwrap(), w.total());
}

#[test]
fn bump_away_from_atoms_vanishes() {
    let w = PointMeasure::new(vec![atom(c(1.0, 0.0), 0.5), atom(c(-1.0, 0.0), 0.5)]).unwrap();
    let h = TestFunction::Bump { component: 0, center: c(0.0, 2.0), radius: 0.5 };
    assert!(w.integrate(&h).unwrap().abs() < 1e-12);
}

#[test]
fn other_components_are_invisible() {
    let mu = bergman(&sextic(), 1);
    assert_eq!(mu.mass_in_disk(0, c(0.0, 0.0), 5.0).unwrap(), 0.0);
    assert!((mu.mass_in_disk(1, c(0.0, 0.0), 1e3).unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn weak_distance_to_self_is_zero() {
    let mu = bergman(&sextic(), 0);
    let f = TestFamily::standard(0, c(-1.5, -1.5), c(1.5, 1.5)).unwrap();
    assert_eq!(weak_distance(&mu, &mu, &f).unwrap(), 0.0);
    assert_eq!(f.members.len(), 20);
}

#[test]
fn atom_shift_is_lipschitz_bounded() {
    let f = TestFamily::standard(0, c(-1.0, -1.0), c(1.0, 1.0)).unwrap();
    for delta in [1e-3, 1e-2, 0.1] {
        let a = PointMeasure::new(vec![atom(c(0.0, 0.0), 1.0)]).unwrap();
        let b = PointMeasure::new(vec![atom(c(delta, 0.0), 1.0)]).unwrap();
        let d = weak_distance(&a, &b, &f).unwrap();
        assert!(d > 0.0 && d <= f.lipschitz() * delta, "{d}");
    }
}

#[test]
fn degenerate_window_rejected() {
    assert!(TestFamily::grid(0, c(0.0, 0.0), c(0.0, 1.0), 4).is_err());
    assert!(TestFamily::grid(0, c(0.0, 0.0), c(1.0, 1.0), 0).is_err());
}

#[test]
fn compact_type_union_adds_masses() {
    let union = DensityMeasure::disjoint_union(vec![bergman(&sextic(), 0), bergman(&lemniscatic(), 1)]).unwrap();
    let total = union.total_mass().unwrap();
    assert!((total - 3.0).abs() < 1e-6, "{total}");
    // no atom: shrinking disks around regular points carry vanishing mass
    let small = union.mass_in_disk(0, c(0.3, 0.2), 1e-4).unwrap();
    assert!(small < 1e-6, "{small}");
    assert!(DensityMeasure::disjoint_union(vec![bergman(&sextic(), 0), bergman(&sextic(), 0)]).is_err());
}

#[test]
fn excluded_disk_removes_its_mass() {
    let mu = bergman(&sextic(), 0);
    let inside = mu.mass_in_disk(0, c(0.0, 0.0), 0.5).unwrap();
    let out = mu.clone().outside_disk(0, c(0.0, 0.0), 0.5).total_mass().unwrap();
    assert!((inside + out - 2.0).abs() < 1e-6);
}

#[test]
fn density_csv_has_full_precision() {
    let mu = bergman(&sextic(), 0);
    let csv = mu.grid_csv(0, c(-1.0, -1.0), c(1.0, 1.0), 3);
    assert_eq!(csv.lines().count(), 10);
    let last = csv.lines().nth(5).unwrap();
    assert!(last.split(',').nth(3).unwrap().contains("e"));
}

fn atoms_strategy() -> impl Strategy<Value = PointMeasure> {
    prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5, 0.01f64..1.0), 1..6)
        .prop_map(|v| PointMeasure::new(v.into_iter().map(|(a, b, m)| atom(c(a, b), m)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weak_distance_is_a_pseudometric(a in atoms_strategy(), b in atoms_strategy(), m in atoms_strategy()) {
        let f = TestFamily::standard(0, c(-1.0, -1.0), c(1.0, 1.0)).unwrap();
        let ab = weak_distance(&a, &b, &f).unwrap();
        prop_assert!((ab - weak_distance(&b, &a, &f).unwrap()).abs() < 1e-15);
        let am = weak_distance(&a, &m, &f).unwrap();
        let mb = weak_distance(&m, &b, &f).unwrap();
        prop_assert!(ab <= am + mb + 1e-12);
    }

    #[test]
    fn integration_is_linear_in_the_measure(a in atoms_strategy(), b in atoms_strategy(), s in 0.1f64..3.0) {
        let h = TestFunction::Moment { component: 0, center: c(0.1, -0.2), radius: 1.3, power: 2, imaginary: true };
        let sum = Combination { parts: vec![(s, &a), (1.0, &b)] };
        let lhs = sum.integrate(&h).unwrap();
        let rhs = s * a.integrate(&h).unwrap() + b.integrate(&h).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!((a.scaled(s).unwrap().integrate(&h).unwrap() - s * a.integrate(&h).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn atom_disk_mass_is_monotone(a in atoms_strategy(), r in 0.01f64..2.0, dr in 0.0f64..1.0) {
        let small = a.mass_in_disk(0, c(0.2, 0.1), r).unwrap();
        let big = a.mass_in_disk(0, c(0.2, 0.1), r + dr).unwrap();
        prop_assert!(small <= big);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn bergman_disk_mass_is_monotone(r in 0.05f64..1.5, dr in 0.01f64..0.5, re in -0.5f64..0.5) {
        let mu = bergman(&sextic(), 0);
        let small = mu.mass_in_disk(0, c(re, 0.0), r).unwrap();
        let big = mu.mass_in_disk(0, c(re, 0.0), r + dr).unwrap();
        prop_assert!(small <= big + 1e-9);
        prop_assert!(big <= 2.0 + 1e-6);
    }

    #[test]
    fn bergman_integration_is_linear_in_h(s in 0.2f64..2.0, re in -0.8f64..0.8) {
        // Disk = Constant − Outside for a shared disk
        let mu = bergman(&sextic(), 0);
        let disk = TestFunction::Disk { component: 0, center: c(re, 0.3), radius: 0.6 };
        let outside = TestFunction::Outside { component: 0, center: c(re, 0.3), radius: 0.6 };
        let lhs = mu.integrate(&TestFunction::Constant(s)).unwrap();
        let rhs = s * (mu.integrate(&disk).unwrap() + mu.integrate(&outside).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-6);
    }
}
