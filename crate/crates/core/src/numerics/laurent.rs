use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::NumericsError;

/// Coefficient ring for [`Laurent`].
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(n: i64) -> Self;
}

impl Scalar for Complex64 {
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
}

/// `sum_i coeffs[i] z^(low + i)`, trimmed so that the first and last stored
/// coefficients are non-zero. The zero series has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent<T> {
    low: i64,
    coeffs: Vec<T>,
}

impl<T: Scalar> Laurent<T> {
    pub fn new(low: i64, coeffs: Vec<T>) -> Self {
        let mut l = Laurent { low, coeffs };
        l.trim();
        l
    }

    pub fn zero() -> Self {
        Laurent { low: 0, coeffs: Vec::new() }
    }

    pub fn monomial(c: T, e: i64) -> Self {
        Self::new(e, vec![c])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.low = if self.coeffs.is_empty() { 0 } else { self.low + lead as i64 };
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a non-zero coefficient (0 for the zero series).
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Highest exponent with a non-zero coefficient, `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> T {
        usize::try_from(e - self.low).ok().and_then(|i| self.coeffs.get(i).cloned()).unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    /// `(exponent, coefficient)` pairs of the non-zero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &T)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.low + i as i64, c))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.low - 1,
            self.coeffs.iter().enumerate().map(|(i, c)| c.clone() * T::from_i64(self.low + i as i64)).collect(),
        )
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Laurent<U> {
        Laurent::new(self.low, self.coeffs.iter().map(f).collect())
    }
}

impl<T: Scalar> Add for &Laurent<T> {
    type Output = Laurent<T>;
    fn add(self, o: &Laurent<T>) -> Laurent<T> {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.degree().unwrap().max(o.degree().unwrap());
        Laurent::new(low, (low..=high).map(|e| self.coeff(e) + o.coeff(e)).collect())
    }
}

impl<T: Scalar> Sub for &Laurent<T> {
    type Output = Laurent<T>;
    fn sub(self, o: &Laurent<T>) -> Laurent<T> {
        self + &o.scale(&-T::one())
    }
}

impl<T: Scalar> Mul for &Laurent<T> {
    type Output = Laurent<T>;
    fn mul(self, o: &Laurent<T>) -> Laurent<T> {
        if self.is_zero() || o.is_zero() {
            return Laurent::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Laurent::new(self.low + o.low, out)
    }
}

impl Laurent<Complex64> {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if self.is_zero() {
            return Complex64::zero();
        }
        let horner = |cs: &mut dyn Iterator<Item = &Complex64>, x: Complex64| cs.fold(Complex64::zero(), |acc, c| acc * x + c);
        let split = (-self.low).clamp(0, self.coeffs.len() as i64) as usize;
        // Non-negative powers by Horner in z, negative ones by Horner in 1/z.
        let pos = horner(&mut self.coeffs[split..].iter().rev(), z);
        let pos = pos * z.powi(self.low.max(0) as i32);
        if split == 0 {
            return pos;
        }
        let w = z.inv();
        let neg = horner(&mut self.coeffs[..split].iter(), w) * w;
        pos + neg
    }

    /// Parses `[k:]c0,c1,...` (real coefficients) or `[k:]re,im;re,im;...`
    /// (complex coefficients), lowest exponent first. `k` defaults to 0; a
    /// single complex coefficient is written with a trailing `;`.
    pub fn parse(s: &str) -> Result<Self, NumericsError> {
        let bad = |why: &str| NumericsError::Parse(format!("{s:?}: {why}"));
        let (low, body) = match s.split_once(':') {
            Some((k, rest)) => (k.trim().parse::<i64>().map_err(|_| bad("base exponent is not an integer"))?, rest),
            None => (0, s),
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("coefficient is not a number"));
        let coeffs = if body.contains(';') {
            body.split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| match p.split(',').collect::<Vec<_>>()[..] {
                    [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
                    _ => Err(bad("complex coefficients are written re,im")),
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            body.split(',').map(|t| num(t).map(|x| Complex64::new(x, 0.0))).collect::<Result<Vec<_>, _>>()?
        };
        if coeffs.is_empty() {
            return Err(bad("no coefficients"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(bad("coefficients must be finite"));
        }
        Ok(Self::new(low, coeffs))
    }
}
