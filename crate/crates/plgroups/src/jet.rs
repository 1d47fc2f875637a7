//! Forward-mode first-order jets (dual numbers with an N-slot gradient).
//!
//! All derivatives in this crate are exact: every chart map, bracket and
//! Casimir is evaluated on `Jet` scalars instead of being finite-differenced.
//! `CJet` is the complex variant needed by the one complex-valued Casimir.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar abstraction so chart maps and brackets can be written once and
/// evaluated on plain `f64` or on jets.
pub trait Real:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// Primal (value) part.
    fn val(&self) -> f64;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan(self) -> Self;
    /// `self` is the ordinate: `y.atan2(x)`.
    fn atan2(self, x: Self) -> Self;
    fn asin(self) -> Self;
    /// Power with a constant exponent; primal must be positive.
    fn powf(self, e: f64) -> Self;
    /// Absolute value (smooth away from 0; callers keep margins from 0).
    fn abs(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn val(&self) -> f64 {
        *self
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn asin(self) -> Self {
        f64::asin(self)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// Value plus gradient with respect to `N` independent variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize> {
    pub v: f64,
    pub d: [f64; N],
}

impl<const N: usize> Jet<N> {
    pub fn constant(v: f64) -> Self {
        Jet { v, d: [0.0; N] }
    }

    /// The `slot`-th independent variable with value `v`.
    pub fn var(v: f64, slot: usize) -> Self {
        let mut d = [0.0; N];
        d[slot] = 1.0;
        Jet { v, d }
    }

    fn lift(self, v: f64, dv: f64) -> Self {
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = dv * self.d[k];
        }
        Jet { v, d }
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = self.d[k] + o.d[k];
        }
        Jet { v: self.v + o.v, d }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = self.d[k] - o.d[k];
        }
        Jet { v: self.v - o.v, d }
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = self.d[k] * o.v + self.v * o.d[k];
        }
        Jet { v: self.v * o.v, d }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let v = self.v / o.v;
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = (self.d[k] - v * o.d[k]) / o.v;
        }
        Jet { v, d }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = -self.d[k];
        }
        Jet { v: -self.v, d }
    }
}

impl<const N: usize> Real for Jet<N> {
    fn from_f64(x: f64) -> Self {
        Jet::constant(x)
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn ln(self) -> Self {
        self.lift(self.v.ln(), 1.0 / self.v)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.lift(e, e)
    }
    fn sin(self) -> Self {
        self.lift(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.lift(self.v.cos(), -self.v.sin())
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.lift(s, 0.5 / s)
    }
    fn atan(self) -> Self {
        self.lift(self.v.atan(), 1.0 / (1.0 + self.v * self.v))
    }
    fn atan2(self, x: Self) -> Self {
        let y = self;
        let v = y.v.atan2(x.v);
        let r2 = x.v * x.v + y.v * y.v;
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = (x.v * y.d[k] - y.v * x.d[k]) / r2;
        }
        Jet { v, d }
    }
    fn asin(self) -> Self {
        self.lift(self.v.asin(), 1.0 / (1.0 - self.v * self.v).sqrt())
    }
    fn powf(self, e: f64) -> Self {
        self.lift(self.v.powf(e), e * self.v.powf(e - 1.0))
    }
    fn abs(self) -> Self {
        self.lift(self.v.abs(), self.v.signum())
    }
}

/// Complex number whose real and imaginary parts are jets.
///
/// Only the operations the complex Casimir needs: field arithmetic and the
/// principal logarithm.
#[derive(Debug, Clone, Copy)]
pub struct CJet<const N: usize> {
    pub re: Jet<N>,
    pub im: Jet<N>,
}

impl<const N: usize> CJet<N> {
    pub fn from_real(re: Jet<N>) -> Self {
        CJet {
            re,
            im: Jet::constant(0.0),
        }
    }

    pub fn constant(re: f64, im: f64) -> Self {
        CJet {
            re: Jet::constant(re),
            im: Jet::constant(im),
        }
    }

    pub fn modulus(&self) -> f64 {
        (self.re.v * self.re.v + self.im.v * self.im.v).sqrt()
    }

    /// Principal branch logarithm.
    pub fn ln(self) -> Self {
        let r2 = self.re * self.re + self.im * self.im;
        CJet {
            re: r2.ln() * Jet::constant(0.5),
            im: self.im.atan2(self.re),
        }
    }
}

impl<const N: usize> Add for CJet<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        CJet {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl<const N: usize> Sub for CJet<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        CJet {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl<const N: usize> Mul for CJet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        CJet {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl<const N: usize> Div for CJet<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let den = o.re * o.re + o.im * o.im;
        CJet {
            re: (self.re * o.re + self.im * o.im) / den,
            im: (self.im * o.re - self.re * o.im) / den,
        }
    }
}

impl<const N: usize> Neg for CJet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        CJet {
            re: -self.re,
            im: -self.im,
        }
    }
}

/// Shorthand for embedding a constant into any `Real` scalar.
pub fn con<S: Real>(x: f64) -> S {
    S::from_f64(x)
}
