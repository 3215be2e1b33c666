use num_complex::Complex64;
use serde::Serialize;

use super::{raw_index, CoreDecomposition, CycleEnd, EndsError, CALIBRATION_OFFSET};
use crate::sheet_complex::build_model_surface;

/// Parameters of the model surface that hosts an end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetModel {
    pub z0: [f64; 2],
    pub w_list: Vec<[f64; 2]>,
    pub w: [f64; 2],
    #[serde(rename = "K")]
    pub k: i64,
}

/// Lengths `k_j`, `k'_j` of the pieces into which the host's segments are
/// cut by the embedded end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingWitness {
    pub k0: i64,
    pub k: Vec<i64>,
    pub k_prime: Vec<i64>,
    /// `sum(a'_j - a_j) - (n - 1)`, the value closing the recursion.
    pub closing_index: i64,
    pub target: TargetModel,
}

pub fn embedding_witness(e: &CycleEnd, params: &CoreDecomposition) -> Result<EmbeddingWitness, EndsError> {
    let (a, ap) = (&e.a, &e.a_prime);
    let n = a.len();
    if ap.len() != n || e.cycle.len() != n || e.projections.len() != n || n == 0 {
        return Err(EndsError::LengthMismatch { a: n, a_prime: ap.len() });
    }
    let (big_n, c1, c2) = (params.big_n, params.c1, params.c2);
    if c1 < 2 || c2 < 2 {
        return Err(EndsError::BadConstants { c1, c2 });
    }
    let floor = 8 * (params.halflines.len() as i64 + 1) * (c1 + c2);
    if big_n < floor {
        return Err(EndsError::Precondition(format!("N = {big_n} is below 8(#infinite + 1)(c1 + c2) = {floor}")));
    }
    if let Some(v) = a.iter().chain(ap).find(|v| (**v - 2 * big_n).abs() > c1) {
        return Err(EndsError::Precondition(format!("length {v} outside [{}, {}]", 2 * big_n - c1, 2 * big_n + c1)));
    }

    let k0 = big_n;
    let mut k = vec![k0];
    let mut kp = vec![0];
    for j in 0..n - 1 {
        let next_p = ap[j] - (k[j] + 1);
        kp.push(next_p);
        k.push(a[j + 1] - next_p);
    }
    for (j, &kj) in k.iter().enumerate() {
        let slack = j as i64 * c1 + c2;
        if (kj - big_n).abs() > slack {
            return Err(EndsError::Inconsistent(format!("k_{j} = {kj} outside [{}, {}]", big_n - slack, big_n + slack)));
        }
    }
    let closing_index = raw_index(a, ap)?;
    kp[0] = ap[n - 1] - (k[n - 1] + 1 + closing_index);
    if kp[0] + k[0] + 1 != a[0] {
        return Err(EndsError::Closing { got: kp[0] + k[0] + 1, want: a[0] });
    }
    if let Some(j) = (0..n).find(|&j| k[j] < 1 || kp[j] < 1) {
        return Err(EndsError::Inconsistent(format!("non-positive piece at j = {j}")));
    }

    Ok(EmbeddingWitness {
        k0,
        k,
        k_prime: kp,
        closing_index,
        target: find_target(&e.projections, closing_index + CALIBRATION_OFFSET)?,
    })
}

/// Picks `w` and `z0` deterministically so that the model builds.
fn find_target(projections: &[[f64; 2]], k: i64) -> Result<TargetModel, EndsError> {
    let pts: Vec<Complex64> = projections.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let centre = pts.iter().sum::<Complex64>() / pts.len() as f64;
    let rho = pts.iter().map(|p| (p - centre).norm()).fold(0.0, f64::max) + 1.0;
    // Golden-angle spacing avoids repeating directions.
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..64 {
        let w = centre + Complex64::from_polar(rho, 0.7 + golden * i as f64);
        for j in 0..16 {
            let z0 = centre + Complex64::from_polar(0.37 * rho, 2.1 + golden * (i * 16 + j) as f64);
            if build_model_surface(z0, &pts, w, k).is_ok() {
                return Ok(TargetModel { z0: [z0.re, z0.im], w_list: projections.to_vec(), w: [w.re, w.im], k });
            }
        }
    }
    Err(EndsError::NoTarget)
}
