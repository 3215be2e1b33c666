use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::laurent::{Laurent, Scalar};
use super::NumericsError;

/// Coefficients `E_0..=E_d` of `exp(P(z) - P(0))`.
pub fn exp_series<T: Scalar>(p: &Laurent<T>, d: usize) -> Vec<T> {
    let mut e = vec![T::one()];
    let deg = p.degree().unwrap_or(0).max(0) as usize;
    for j in 1..=d {
        // j E_j = sum_i i p_i E_{j-i}
        let mut acc = T::zero();
        for i in 1..=deg.min(j) {
            acc = acc + T::from_i64(i as i64) * p.coeff(i as i64) * e[j - i].clone();
        }
        e.push(acc / T::from_i64(j as i64));
    }
    e
}

/// Coefficient of `z^-1` in `Q(z) exp(P(z) - P(0))`.
fn shifted_residue<T: Scalar>(q: &Laurent<T>, p: &Laurent<T>) -> T {
    if q.is_zero() || q.low() >= 0 {
        return T::zero();
    }
    let e = exp_series(p, (-q.low() - 1) as usize);
    q.terms()
        .filter(|(k, _)| *k <= -1)
        .fold(T::zero(), |acc, (k, c)| acc + c.clone() * e[(-1 - k) as usize].clone())
}

/// Coefficient of `z^-1` in `Q(z) e^{P(z)}`, `P` a polynomial.
pub fn laurent_residue(q: &Laurent<Complex64>, p: &Laurent<Complex64>) -> Result<Complex64, NumericsError> {
    if p.low() < 0 {
        return Err(NumericsError::NotPolynomial);
    }
    Ok(shifted_residue(q, p) * p.coeff(0).exp())
}

/// Exact residue for rational coefficients. `P(0)` must vanish, since
/// otherwise the factor `e^{P(0)}` leaves the rationals.
pub fn laurent_residue_exact(q: &Laurent<BigRational>, p: &Laurent<BigRational>) -> Result<BigRational, NumericsError> {
    if p.low() < 0 {
        return Err(NumericsError::NotPolynomial);
    }
    if !p.coeff(0).is_zero() {
        return Err(NumericsError::IrrationalFactor);
    }
    Ok(shifted_residue(q, p))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_i64(n)
}

/// `(1 + z^n / N)^N` truncated above degree `d`, exactly.
fn binomial_power(n: u64, big_n: u64, d: u64) -> Laurent<BigRational> {
    let mut coeffs = vec![BigRational::zero(); d as usize + 1];
    let mut b = BigRational::one();
    let nn = BigRational::from_integer(BigInt::from(big_n));
    for i in 0..=big_n {
        if i * n > d {
            break;
        }
        coeffs[(i * n) as usize] = b.clone();
        b = b * BigRational::from_integer(BigInt::from(big_n - i)) / (BigRational::from_integer(BigInt::from(i + 1)) * nn.clone());
    }
    Laurent::new(0, coeffs)
}

/// The constant `C` (with `N` absent) or `C_N` making the residue of
/// `(z^-m - C z^(-m-n)) E(z)` vanish, where `E = e^{z^n}` or
/// `(1 + z^n/N)^N`. When `(m-1)/n` is not a non-negative integer both
/// residues vanish identically and 0 is returned. If the residue of the
/// `z^-m` term is non-zero while that of `z^(-m-n)` vanishes no constant
/// exists; this happens exactly for `N = (m-1)/n`.
pub fn residue_constants(m: u64, n: u64, big_n: Option<u64>) -> Result<BigRational, NumericsError> {
    if m == 0 || n == 0 || big_n == Some(0) {
        return Err(NumericsError::Precondition("m, n and N must be positive".into()));
    }
    if (m - 1) % n != 0 {
        return Ok(BigRational::zero());
    }
    let (mi, ni) = (m as i64, n as i64);
    let first = Laurent::monomial(rat(1), -mi);
    let second = Laurent::monomial(rat(1), -mi - ni);
    let (r1, r2) = match big_n {
        None => {
            let p = Laurent::monomial(rat(1), ni);
            (laurent_residue_exact(&first, &p)?, laurent_residue_exact(&second, &p)?)
        }
        Some(nn) => {
            let e = binomial_power(n, nn, m + n - 1);
            let coef = |q: &Laurent<BigRational>| (q * &e).coeff(-1);
            (coef(&first), coef(&second))
        }
    };
    match (r1.is_zero(), r2.is_zero()) {
        (_, false) => Ok(r1 / r2),
        (true, true) => Ok(BigRational::zero()),
        (false, true) => Err(NumericsError::NoConstant { m, n, big_n: big_n.unwrap_or(0) }),
    }
}

/// Residue at 0 of `z^K (z - p1)^n (z - p2) e^{P(z)} dz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuncturedCheck {
    pub residue: Complex64,
    /// The same sum with every term replaced by its modulus.
    pub scale: f64,
    /// `|residue| <= 1e-10 * scale`.
    pub ok: bool,
}

pub fn punctured_plane_check(
    k: i64,
    n: u32,
    p1: Complex64,
    p2: Complex64,
    p: &Laurent<Complex64>,
) -> Result<PuncturedCheck, NumericsError> {
    if k >= 0 {
        return Err(NumericsError::Precondition(format!("K = {k} must be negative")));
    }
    if p1 == p2 || p1 == Complex64::zero() || p2 == Complex64::zero() {
        return Err(NumericsError::Precondition("p1 and p2 must be distinct and non-zero".into()));
    }
    if p.low() < 0 || p.degree() != Some(n as i64) {
        return Err(NumericsError::Precondition(format!("P must be a polynomial of degree {n}")));
    }
    let one = Complex64::one();
    let mut reg = Laurent::new(0, vec![-p2, one]);
    for _ in 0..n {
        reg = &reg * &Laurent::new(0, vec![-p1, one]);
    }
    let d = (-k - 1) as usize;
    let e = exp_series(p, d);
    let shift = p.coeff(0).exp();
    let (mut residue, mut scale) = (Complex64::zero(), 0.0);
    for i in 0..=d {
        let t = reg.coeff(i as i64) * e[d - i];
        residue += t;
        scale += reg.coeff(i as i64).norm() * e[d - i].norm();
    }
    let (residue, scale) = (residue * shift, scale * shift.norm());
    Ok(PuncturedCheck { residue, scale, ok: residue.norm() <= 1e-10 * scale })
}
