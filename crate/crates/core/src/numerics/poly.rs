use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex polynomial, coefficients lowest degree first.
#[derive(Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    /// Trailing exact zeros are dropped so the leading coefficient is nonzero.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        CPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        CPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); k + 1];
        c[k] = C64::new(1.0, 0.0);
        CPoly { coeffs: c }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = Self::constant(C64::new(1.0, 0.0));
        for &r in roots {
            p = &p * &Self::new(vec![-r, C64::new(1.0, 0.0)]);
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Σ|a_k||z|^k, the natural size of the terms summed in `eval`.
    pub fn eval_scale(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Coefficients of p(1/z)·z^d, i.e. the reversed coefficient list padded to length d+1.
    pub fn reversed(&self, d: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); d + 1];
        for (k, &a) in self.coeffs.iter().enumerate() {
            if k <= d {
                c[d - k] = a;
            }
        }
        Self::new(c)
    }

    /// p(a + h·s) as a polynomial in s.
    pub fn shift_scale(&self, a: C64, h: C64) -> Self {
        let lin = Self::new(vec![a, h]);
        let mut out = Self::zero();
        for &c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Self::constant(c);
        }
        out
    }

    /// Quotient and remainder of division by `d`.
    pub fn div_rem(&self, d: &CPoly) -> Result<(CPoly, CPoly)> {
        if d.is_zero() {
            return Err(Error::InvalidInput("division by the zero polynomial".into()));
        }
        let mut r = self.coeffs.clone();
        let dn = d.degree();
        if self.is_zero() || self.degree() < dn {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![C64::new(0.0, 0.0); self.degree() - dn + 1];
        let lead = d.leading();
        for k in (0..q.len()).rev() {
            let c = r[k + dn] / lead;
            q[k] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= c * dc;
            }
        }
        r.truncate(dn);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Taylor coefficients of p at `a`, i.e. p(a + s) in s.
    pub fn taylor_at(&self, a: C64) -> Self {
        self.shift_scale(a, C64::new(1.0, 0.0))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::constant(C64::new(1.0, 0.0));
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl fmt::Debug for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CPoly{:?}", self.coeffs)
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        for (k, v) in self.coeffs.iter().enumerate() {
            c[k] += v;
        }
        for (k, v) in rhs.coeffs.iter().enumerate() {
            c[k] += v;
        }
        CPoly::new(c)
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        self + &(-rhs)
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        if self.is_zero() || rhs.is_zero() {
            return CPoly::zero();
        }
        let mut c = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        CPoly::new(c)
    }
}

/// Rational function num/den.
#[derive(Clone, Debug, PartialEq)]
pub struct CRat {
    pub num: CPoly,
    pub den: CPoly,
}

impl CRat {
    /// Builds num/den and cancels common roots found within the clustering radius.
    pub fn new(num: CPoly, den: CPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("rational function with zero denominator".into()));
        }
        let mut r = CRat { num, den };
        r.reduce()?;
        Ok(r)
    }

    /// No cancellation; the caller guarantees coprimality.
    pub fn new_unreduced(num: CPoly, den: CPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        CRat { num, den }
    }

    pub fn from_poly(p: CPoly) -> Self {
        CRat { num: p, den: CPoly::constant(C64::new(1.0, 0.0)) }
    }

    fn reduce(&mut self) -> Result<()> {
        if self.num.is_zero() {
            self.den = CPoly::constant(C64::new(1.0, 0.0));
            return Ok(());
        }
        if self.den.degree() == 0 {
            return Ok(());
        }
        let roots = super::roots::poly_roots(&self.den, 1e-10)?;
        for (r, mult) in roots {
            for _ in 0..mult {
                let scale = self.num.eval_scale(r).max(f64::MIN_POSITIVE);
                if self.num.degree() == 0 || self.num.eval(r).norm() > 1e-10 * scale {
                    break;
                }
                let lin = CPoly::new(vec![-r, C64::new(1.0, 0.0)]);
                self.num = self.num.div_rem(&lin)?.0;
                self.den = self.den.div_rem(&lin)?.0;
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let d = self.den.eval(z);
        let scale = self.den.eval_scale(z);
        if d.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Pole(format!("denominator vanishes at {z}")));
        }
        Ok(self.num.eval(z) / d)
    }

    /// Derivative without cancellation: (N'D − ND')/D².
    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        CRat { num: n, den: &self.den * &self.den }
    }
}
