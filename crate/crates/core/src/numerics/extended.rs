//! Double-double complex arithmetic for the few places where f64 loses too
//! many digits (graded Toeplitz systems built from high-order Taylor data).

use num_complex::{Complex, Complex64 as C64};
use twofloat::TwoFloat;

pub type Cdd = Complex<TwoFloat>;

pub fn lift(z: C64) -> Cdd {
    Cdd::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

pub fn lower(z: Cdd) -> C64 {
    C64::new(f64::from(z.re), f64::from(z.im))
}

fn real(v: f64) -> Cdd {
    Cdd::new(TwoFloat::from(v), TwoFloat::from(0.0))
}

/// a/b with two residual corrections; twofloat's own TwoFloat/TwoFloat
/// quotient is only accurate to double precision.
fn div_real(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q0 = a.hi() / b.hi();
    let r = a - b * q0;
    let q1 = r.hi() / b.hi();
    let r = r - b * q1;
    let q2 = r.hi() / b.hi();
    TwoFloat::from(q0) + TwoFloat::from(q1) + TwoFloat::from(q2)
}

pub fn div(a: Cdd, b: Cdd) -> Cdd {
    let d = b.re * b.re + b.im * b.im;
    let n = a * b.conj();
    Cdd::new(div_real(n.re, d), div_real(n.im, d))
}

fn abs1(z: &Cdd) -> f64 {
    f64::from(z.re).abs() + f64::from(z.im).abs()
}

/// Taylor coefficients in σ of ∏ √(1 + h σ/(z0 − r)), normalized to 1 at σ = 0.
pub fn sqrt_product_series(roots: &[C64], z0: C64, h: f64, len: usize) -> Vec<Cdd> {
    let zero = real(0.0);
    let mut s = vec![zero; len];
    for r in roots {
        let q = div(real(-h), lift(z0) - lift(*r));
        let mut qk = real(1.0);
        for (k, sk) in s.iter_mut().enumerate().skip(1) {
            qk *= q;
            *sk -= div(qk, real(2.0 * k as f64));
        }
    }
    // exp of the log series
    let mut e = vec![zero; len];
    if len == 0 {
        return e;
    }
    e[0] = real(1.0);
    for k in 1..len {
        let mut acc = zero;
        for j in 1..=k {
            acc += s[j] * e[k - j] * real(j as f64);
        }
        e[k] = div(acc, real(k as f64));
    }
    e
}

/// tr(A⁻¹B) by partially pivoted elimination; `None` if A is numerically singular.
pub fn trace_solve(a: &[Vec<Cdd>], b: &[Vec<Cdd>]) -> Option<Cdd> {
    let n = a.len();
    let mut a: Vec<Vec<Cdd>> = a.to_vec();
    let mut b: Vec<Vec<Cdd>> = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| abs1(&a[i][k]).total_cmp(&abs1(&a[j][k])))?;
        if abs1(&a[p][k]) == 0.0 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        let piv = a[k][k];
        for i in (k + 1)..n {
            let f = div(a[i][k], piv);
            if abs1(&f) == 0.0 {
                continue;
            }
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
            for j in 0..n {
                let v = b[k][j];
                b[i][j] -= f * v;
            }
        }
    }
    // back substitution, only the diagonal of the solution is needed but all columns are coupled
    let mut x = vec![vec![real(0.0); n]; n];
    for col in 0..n {
        for i in (0..n).rev() {
            let mut acc = b[i][col];
            for j in (i + 1)..n {
                acc -= a[i][j] * x[j][col];
            }
            x[i][col] = div(acc, a[i][i]);
        }
    }
    Some((0..n).fold(real(0.0), |t, i| t + x[i][i]))
}
