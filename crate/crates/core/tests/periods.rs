use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wlab::curves::*;
use wlab::numerics::linalg::CMat;
use wlab::numerics::CPoly;
use wlab::periods::*;
use wlab::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// Lemniscate constant ϖ = 2∫_0^1 dt/√(1−t⁴), high-precision reference value.
const LEMNISCATE: f64 = 2.622_057_554_292_119_8;

#[test]
fn lemniscatic_periods() {
    let h = HyperellipticCurve::new(CPoly::from_real(&[0.0, -1.0, 0.0, 1.0])).unwrap();
    let d = period_matrix(&h).unwrap();
    // independent AGM route: 2π/agm(1, √2) = 2ϖ
    let agm_oracle = 2.0 * std::f64::consts::PI / wlab::numerics::quad::agm(c(1.0, 0.0), c(2f64.sqrt(), 0.0)).re;
    assert!((agm_oracle - 2.0 * LEMNISCATE).abs() < 1e-13);
    assert!((d.a_periods[(0, 0)].norm() - agm_oracle).abs() < 1e-8);
    assert!((d.b_periods[(0, 0)].norm() - agm_oracle).abs() < 1e-8);
    assert!((d.omega[(0, 0)] - c(0.0, 1.0)).norm() < 1e-8);
}

fn reduce_tau(mut t: C64) -> C64 {
    for _ in 0..100 {
        t.re -= t.re.round();
        if t.norm() < 1.0 - 1e-12 {
            t = -1.0 / t;
        } else {
            break;
        }
    }
    t
}

#[test]
fn equianharmonic_ratio() {
    let h = HyperellipticCurve::new(CPoly::from_real(&[-1.0, 0.0, 0.0, 1.0])).unwrap();
    let t = reduce_tau(period_matrix(&h).unwrap().omega[(0, 0)]);
    assert!((t.norm() - 1.0).abs() < 1e-8, "{t}");
    assert!((t.re.abs() - 0.5).abs() < 1e-8, "{t}");
}

#[test]
fn sextic_riemann_relations() {
    let h = HyperellipticCurve::new(CPoly::from_real(&[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
    let d = period_matrix(&h).unwrap();
    assert_eq!(d.cycles.a_cycles.len(), 2);
    assert_eq!(d.cycles.b_cycles.len(), 2);
    assert!(d.symmetry_defect() < 1e-9);
    assert!(d.min_im_eigenvalue() > 0.0);
    // H·G·H* = I
    let id = &d.change_of_basis * &d.gram * d.change_of_basis.adjoint();
    assert!((id - CMat::identity(2, 2)).iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-12);
}

#[test]
fn random_genus_two_curves() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let pts: Vec<C64> = (0..6).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let h = HyperellipticCurve::from_branch_points(c(1.0, 0.0), pts).unwrap();
        let d = period_matrix(&h).unwrap();
        assert!(d.symmetry_defect() < 1e-9, "{}", d.symmetry_defect());
        assert!(d.min_im_eigenvalue() > 0.0);
    }
}

#[test]
fn elliptic_density_is_flat() {
    let h = HyperellipticCurve::new(CPoly::from_real(&[0.3, -1.0, 0.0, 1.0])).unwrap();
    let b = bergman_measure(&Curve::Hyperelliptic(h.clone())).unwrap();
    let flat = |x: C64| b.density(x, Sheet::Plus) * h.p(x).norm();
    let r = flat(c(0.1, 0.2));
    for x in [c(2.0, 1.0), c(-3.0, 0.5), c(0.0, -4.0)] {
        assert!((flat(x) - r).abs() < 1e-12 * r);
    }
}

#[test]
fn rational_normalization_has_zero_measure() {
    let x = RationalNodalCurve::new(vec![(c(0.0, 0.0), c(1.0, 0.0)), (c(2.0, 0.0), c(3.0, 0.0))]).unwrap();
    let b = bergman_measure(&Curve::Nodal(x)).unwrap();
    assert_eq!(b.genus(), 0);
    assert_eq!(b.density(c(0.5, 0.5), Sheet::Plus), 0.0);
}

fn random_unitary(rng: &mut ChaCha8Rng, g: usize) -> CMat {
    let a = CMat::from_fn(g, g, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    a.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn density_independent_of_frame(seed in 0u64..10_000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = HyperellipticCurve::new(CPoly::from_real(&[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        let b = bergman_measure(&Curve::Hyperelliptic(h)).unwrap();
        let rot = b.rotated(&random_unitary(&mut rng, 2)).unwrap();
        let x = c(re, im);
        let (d0, d1) = (b.density(x, Sheet::Plus), rot.density(x, Sheet::Plus));
        prop_assert!((d0 - d1).abs() <= 1e-10 * d0.max(1.0));
        prop_assert_eq!(d0, b.density(x, Sheet::Minus));
        prop_assert!(d0 >= 0.0);
    }

    #[test]
    fn riemann_relations_on_random_quintics(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<C64> = (0..5).map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect();
        let h = HyperellipticCurve::from_branch_points(c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0)), pts).unwrap();
        let d = period_matrix(&h).unwrap();
        prop_assert!(d.symmetry_defect() < 1e-9);
        prop_assert!(d.min_im_eigenvalue() > 0.0);
    }
}
