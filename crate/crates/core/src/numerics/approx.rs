use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::{integrate, residue_constants, NumericsError, Piece};

/// `(1 + z^n / N)^N`.
pub fn binomial_exp(z: Complex64, n: u32, big_n: u32) -> Complex64 {
    (1.0 + z.powu(n) / big_n as f64).powu(big_n)
}

/// Sample points of the annulus: four rings at relative depths
/// `(j + 1/2) / 4`, cycling as the angle advances by `2 pi / samples`.
pub fn annulus_samples(r_in: f64, r_out: f64, samples: usize) -> Vec<(f64, f64)> {
    (0..samples)
        .map(|i| {
            let r = r_in + (r_out - r_in) * ((i % 4) as f64 + 0.5) / 4.0;
            (r, TAU * i as f64 / samples as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxRow {
    #[serde(rename = "N")]
    pub big_n: u64,
    /// `C_N` as an exact fraction.
    pub c_n: String,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RnReport {
    pub m: u64,
    pub n: u64,
    /// `C` as an exact fraction.
    pub c: String,
    pub rows: Vec<ApproxRow>,
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("small rational")
}

/// Largest deviation between the primitive of `(z^-m - C z^(-m-n)) e^{z^n}`
/// and that of `(z^-m - C_N z^(-m-n)) (1 + z^n/N)^N`, both vanishing at
/// `r_out`, over the annulus samples. Each sample is reached by a radial
/// segment from `r_out` followed by a counter-clockwise arc.
pub fn rn_approx_error(
    m: u64,
    n: u64,
    n_list: &[u64],
    annulus: (f64, f64),
    samples: usize,
    tol: f64,
) -> Result<RnReport, NumericsError> {
    let (r_in, r_out) = annulus;
    if !(0.0 < r_in && r_in < r_out) {
        return Err(NumericsError::Precondition(format!("annulus ({r_in}, {r_out}) needs 0 < r_in < r_out")));
    }
    if samples < 8 {
        return Err(NumericsError::Precondition("at least 8 samples".into()));
    }
    if n_list.iter().any(|&nn| nn == 0 || nn > u32::MAX as u64) {
        return Err(NumericsError::Precondition("every N must be a positive 32-bit integer".into()));
    }
    let big_c = residue_constants(m, n, None)?;
    let c_ns = n_list.iter().map(|&nn| residue_constants(m, n, Some(nn))).collect::<Result<Vec<_>, _>>()?;
    let (mi, ni) = (m as i32, n as u32);
    let cf = to_f64(&big_c);
    let exact = |z: Complex64| (z.powi(-mi) - cf * z.powi(-mi - ni as i32)) * z.powu(ni).exp();

    let paths: Vec<Vec<Piece>> = annulus_samples(r_in, r_out, samples)
        .into_iter()
        .map(|(r, theta)| {
            let mut p = vec![Piece::Segment(r_out.into(), r.into())];
            if theta > 0.0 {
                p.push(Piece::Arc { centre: 0.0.into(), radius: r, from: 0.0, to: theta });
            }
            p
        })
        .collect();
    let reference: Vec<Complex64> =
        paths.par_iter().map(|p| integrate(exact, p, tol).map(|q| q.value)).collect::<Result<_, _>>()?;

    let rows = n_list
        .iter()
        .zip(&c_ns)
        .map(|(&nn, c_n)| {
            let cn = to_f64(c_n);
            let approx = |z: Complex64| (z.powi(-mi) - cn * z.powi(-mi - ni as i32)) * binomial_exp(z, ni, nn as u32);
            let errs: Vec<f64> = paths
                .par_iter()
                .zip(&reference)
                .map(|(p, f)| integrate(approx, p, tol).map(|q| (q.value - f).norm()))
                .collect::<Result<_, _>>()?;
            Ok(ApproxRow { big_n: nn, c_n: c_n.to_string(), max_error: errs.into_iter().fold(0.0, f64::max) })
        })
        .collect::<Result<Vec<_>, NumericsError>>()?;
    Ok(RnReport { m, n, c: big_c.to_string(), rows })
}
