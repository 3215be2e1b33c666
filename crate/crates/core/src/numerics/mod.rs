//! Quadrature of exponential 1-forms `Q(z) e^{P(z)} dz` and the quantities
//! built from it: primitives, asymptotic values, exact residues, the
//! rational approximants and the metric-completion probe.

mod approx;
mod asymptotic;
pub mod csv;
mod laurent;
mod probe;
mod quad;
mod residue;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

pub use approx::{annulus_samples, binomial_exp, rn_approx_error, ApproxRow, RnReport};
pub use asymptotic::{asymptotic_values, descent_directions, AsymptoticValue};
pub use laurent::{Laurent, Scalar};
pub use probe::{completion_probe, Cluster, ProbeReport};
pub use quad::{integrate, Piece, QuadResult, DEFAULT_TOL, EVAL_BUDGET};
pub use residue::{
    exp_series, laurent_residue, laurent_residue_exact, punctured_plane_check, residue_constants, PuncturedCheck,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("cannot parse coefficients {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("P must be a polynomial (no negative powers)")]
    NotPolynomial,
    #[error("exact residue needs P(0) = 0: e^P(0) is not rational")]
    IrrationalFactor,
    #[error("no residue-cancelling constant for m = {m}, n = {n}, N = {big_n}")]
    NoConstant { m: u64, n: u64, big_n: u64 },
    #[error("path passes through the pole at 0")]
    PathThroughPole,
    #[error("integrand is not finite at {re}{im:+}i")]
    NonFinite { re: f64, im: f64 },
    #[error("quadrature did not converge within {evaluations} evaluations (error estimate {est_error:e})")]
    NonConvergence { evaluations: u64, est_error: f64 },
    #[error("integrand does not decay along the descent direction of sector {sector}")]
    TailNotDecaying { sector: usize },
}

/// The 1-form `Q(z) e^{P(z)} dz` with `Q` a Laurent polynomial and `P` a
/// non-constant polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpForm {
    q: Laurent<Complex64>,
    p: Laurent<Complex64>,
    dq: Laurent<Complex64>,
    dp: Laurent<Complex64>,
}

impl ExpForm {
    pub fn new(q: Laurent<Complex64>, p: Laurent<Complex64>) -> Result<Self, NumericsError> {
        if q.is_zero() {
            return Err(NumericsError::Precondition("Q is identically zero".into()));
        }
        if p.low() < 0 {
            return Err(NumericsError::NotPolynomial);
        }
        if p.degree().unwrap_or(0) < 1 {
            return Err(NumericsError::Precondition("P must be non-constant".into()));
        }
        let (dq, dp) = (q.derivative(), p.derivative());
        Ok(ExpForm { q, p, dq, dp })
    }

    pub fn q(&self) -> &Laurent<Complex64> {
        &self.q
    }

    pub fn p(&self) -> &Laurent<Complex64> {
        &self.p
    }

    /// Degree of `P`.
    pub fn n(&self) -> u32 {
        self.p.degree().unwrap() as u32
    }

    pub fn has_pole(&self) -> bool {
        self.q.low() < 0
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.q.eval(z) * self.p.eval(z).exp()
    }

    /// `|Q(z)| e^{Re P(z)}`, the density of the flat metric.
    pub fn envelope(&self, z: Complex64) -> f64 {
        self.q.eval(z).norm() * self.p.eval(z).re.exp()
    }

    /// Logarithmic decay rate of the envelope at `z` in direction `u`.
    fn decay_rate(&self, z: Complex64, u: Complex64) -> f64 {
        -(u * (self.dp.eval(z) + self.dq.eval(z) / self.q.eval(z))).re
    }

    fn check_path(&self, pieces: &[Piece]) -> Result<(), NumericsError> {
        if self.has_pole() {
            let tiny = |p: &Piece| f64::EPSILON * p.start().norm().max(p.end().norm());
            if pieces.iter().any(|p| p.distance_to(Complex64::new(0.0, 0.0)) <= tiny(p)) {
                return Err(NumericsError::PathThroughPole);
            }
        }
        Ok(())
    }

    /// Integral over a chain of path pieces.
    pub fn integrate_pieces(&self, pieces: &[Piece], tol: f64) -> Result<QuadResult, NumericsError> {
        self.check_path(pieces)?;
        integrate(|z| self.eval(z), pieces, tol)
    }
}

/// `int_path Q e^P dz` along a polyline.
pub fn integrate_form(f: &ExpForm, path: &[Complex64], tol: f64) -> Result<QuadResult, NumericsError> {
    if path.len() < 2 {
        return Err(NumericsError::Precondition("a path needs at least two vertices".into()));
    }
    let pieces: Vec<Piece> = path.windows(2).map(|w| Piece::Segment(w[0], w[1])).collect();
    f.integrate_pieces(&pieces, tol)
}

/// Primitive normalised to vanish at `base`, evaluated at each point along
/// the straight segment from `base`.
pub fn primitive_on_points(f: &ExpForm, base: Complex64, points: &[Complex64], tol: f64) -> Result<Vec<QuadResult>, NumericsError> {
    points.par_iter().map(|&z| integrate_form(f, &[base, z], tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn form(q: &str, p: &str) -> ExpForm {
        ExpForm::new(Laurent::parse(q).unwrap(), Laurent::parse(p).unwrap()).unwrap()
    }

    #[test]
    fn exponential_over_unit_interval() {
        let r = integrate_form(&form("1", "0,1"), &[c(0.0), c(1.0)], 1e-12).unwrap();
        assert!((r.value - c(std::f64::consts::E - 1.0)).norm() < 1e-13);
        assert!(r.est_error <= 1e-12 * r.value.norm());
    }

    #[test]
    fn constant_exponent_is_rejected() {
        let r = ExpForm::new(Laurent::parse("1").unwrap(), Laurent::parse("0").unwrap());
        assert!(matches!(r, Err(NumericsError::Precondition(_))));
    }

    #[test]
    fn gaussian_along_imaginary_axis() {
        // int_0^{10i} e^{z^2} dz = i int_0^10 e^{-s^2} ds = i (sqrt(pi)/2) erf(10).
        let r = integrate_form(&form("1", "0,0,1"), &[c(0.0), Complex64::new(0.0, 10.0)], 1e-12).unwrap();
        assert!(r.value.re.abs() < 1e-13);
        assert!((r.value.im - PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn pole_on_path_is_rejected() {
        let f = form("-1:1", "0,1");
        assert_eq!(integrate_form(&f, &[c(-1.0), c(1.0)], 1e-9), Err(NumericsError::PathThroughPole));
        assert_eq!(integrate_form(&f, &[c(0.0), c(1.0)], 1e-9), Err(NumericsError::PathThroughPole));
        assert!(integrate_form(&f, &[c(-1.0), Complex64::new(0.0, 1.0), c(1.0)], 1e-9).is_ok());
    }

    #[test]
    fn homotopic_paths_agree() {
        let f = form("0,1", "0,0,1");
        let a = integrate_form(&f, &[c(0.0), Complex64::new(1.0, 1.0)], 1e-12).unwrap();
        let b = integrate_form(&f, &[c(0.0), c(1.0), Complex64::new(1.0, 1.0)], 1e-12).unwrap();
        assert!((a.value - b.value).norm() <= a.est_error + b.est_error + 1e-14);
        // Closed form (e^{z^2} - 1)/2.
        let z = Complex64::new(1.0, 1.0);
        assert!((a.value - ((z * z).exp() - 1.0) / 2.0).norm() < 1e-12);
    }
}
