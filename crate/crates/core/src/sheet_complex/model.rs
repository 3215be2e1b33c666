//! The model family of surfaces `S(w_0, ..., w_{n-1}, w, K)`.
//!
//! Sheet naming: `Cs{j}` is the sheet slit along both `l` (from `w`) and
//! `l{j}` (from `w_j`); `C{j}[k]` is copy `k` of the sheet slit along `l{j}`
//! only; `C[i]` is copy `i` of the sheet slit along `l` only (K > 0);
//! `Cs0(1)`, `Cs0(2)` are the two extra doubly slit sheets used when K < 0.
//! Copies with a gluing other than the periodic chain are core sheets; the
//! remaining tails become half-line families `L+w{j}` and `L-w{j}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    validate, CoreSheet, HalfLineFamily, Order, Orientation, RamPoint, SheetComplex, SheetProto, Side, SideRef,
    Slit, SurfaceError,
};

/// Parameters of a model surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub z0: [f64; 2],
    pub w_list: Vec<[f64; 2]>,
    pub w: [f64; 2],
    #[serde(rename = "K")]
    pub k: i64,
}

struct Builder {
    protos: Vec<SheetProto>,
    sheets: Vec<CoreSheet>,
    gluing: Vec<(SideRef, SideRef)>,
    families: Vec<HalfLineFamily>,
}

impl Builder {
    fn proto(&mut self, id: String, slits: Vec<Slit>) -> usize {
        self.protos.push(SheetProto { id, slits });
        self.protos.len() - 1
    }

    fn sheet(&mut self, id: String, proto: usize) -> usize {
        self.sheets.push(CoreSheet { id, proto });
        self.sheets.len() - 1
    }

    fn side(&self, sheet: usize, slit: &str, side: Side) -> SideRef {
        let proto = &self.protos[self.sheets[sheet].proto];
        let slit = proto.slits.iter().position(|s| s.id == slit).expect("builder slit exists");
        SideRef { sheet, slit, side }
    }

    /// Glues the bottom of `slit` on `lower` to its top on `upper`: crossing
    /// counterclockwise leads from `lower` to `upper`.
    fn glue(&mut self, lower: usize, upper: usize, slit: &str) {
        let a = self.side(lower, slit, Side::Bottom);
        let b = self.side(upper, slit, Side::Top);
        self.gluing.push((a, b));
    }
}

/// Builds `S(w_list, w, K)` with slits directed away from `z0`.
///
/// Ramification census: `n` infinite-order points over `w_list`; over `w`,
/// one point of order `n + K` when `K >= 0`, or one of order `n` and one of
/// order 2 when `K < 0`. Order-1 points are regular and are left out, along
/// with their slit.
pub fn build_model_surface(
    z0: Complex64,
    w_list: &[Complex64],
    w: Complex64,
    k: i64,
) -> Result<SheetComplex, SurfaceError> {
    let n = w_list.len();
    if n == 0 {
        return Err(SurfaceError::InvalidModel("w_list must not be empty".into()));
    }
    if let Some(bad) = [z0, w].iter().chain(w_list).find(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(SurfaceError::InvalidModel(format!("non-finite coordinate {bad}")));
    }
    if w_list.iter().any(|wj| (wj - w).norm() <= super::GENERICITY_TOL) {
        return Err(SurfaceError::CentreInList(w));
    }
    let extra = k.unsigned_abs() as usize;

    let mut rams = Vec::new();
    for (j, wj) in w_list.iter().enumerate() {
        rams.push(RamPoint { id: format!("w{j}"), projection: *wj, order: Order::Infinite });
    }
    // Order of the point over w reached from the Cs cycle.
    let centre_order = if k >= 0 { n + extra } else { n };
    let centre = (centre_order >= 2).then(|| {
        rams.push(RamPoint { id: "v".into(), projection: w, order: Order::Finite(centre_order as u32) });
        rams.len() - 1
    });
    let second = (k < 0).then(|| {
        rams.push(RamPoint { id: "v2".into(), projection: w, order: Order::Finite(2) });
        rams.len() - 1
    });

    let slit_l = |ram: usize| Slit { id: "l".into(), foot: w, ram };
    let slit_j = |j: usize| Slit { id: format!("l{j}"), foot: w_list[j], ram: j };

    let mut b = Builder { protos: Vec::new(), sheets: Vec::new(), gluing: Vec::new(), families: Vec::new() };
    let mut star = Vec::with_capacity(n);
    let mut single = Vec::with_capacity(n);
    for j in 0..n {
        let slits = match centre {
            Some(v) => vec![slit_l(v), slit_j(j)],
            None => vec![slit_j(j)],
        };
        star.push(b.proto(format!("Cs{j}"), slits));
        single.push(b.proto(format!("C{j}"), vec![slit_j(j)]));
    }

    let cs: Vec<usize> = (0..n).map(|j| b.sheet(format!("Cs{j}"), star[j])).collect();
    let c_zero: Vec<usize> = (0..n).map(|j| b.sheet(format!("C{j}[0]"), single[j])).collect();

    // Cycle of doubly slit sheets around w.
    if centre.is_some() {
        if k > 0 {
            let pl = b.proto("C".into(), vec![slit_l(centre.unwrap())]);
            let copies: Vec<usize> = (1..=extra).map(|i| b.sheet(format!("C[{i}]"), pl)).collect();
            for j in 0..n - 1 {
                b.glue(cs[j], cs[j + 1], "l");
            }
            b.glue(cs[n - 1], copies[0], "l");
            for i in 0..extra - 1 {
                b.glue(copies[i], copies[i + 1], "l");
            }
            b.glue(copies[extra - 1], cs[0], "l");
        } else {
            for j in 0..n {
                b.glue(cs[j], cs[(j + 1) % n], "l");
            }
        }
    }

    let mut attach_plus = vec![0; n];
    for j in 0..n {
        let lj = format!("l{j}");
        b.glue(c_zero[j], cs[j], &lj);
        if k < 0 && j == 0 {
            continue;
        }
        let c_one = b.sheet(format!("C{j}[1]"), single[j]);
        b.glue(cs[j], c_one, &lj);
        attach_plus[j] = c_one;
    }

    if k < 0 {
        let m = extra;
        let v2 = second.unwrap();
        let pd = b.proto("Cs0*".into(), vec![slit_l(v2), slit_j(0)]);
        let d1 = b.sheet("Cs0(1)".into(), pd);
        let d2 = b.sheet("Cs0(2)".into(), pd);
        b.glue(cs[0], d1, "l0");
        let mut prev = d1;
        for i in 2..=m {
            let s = b.sheet(format!("C0[{i}]"), single[0]);
            b.glue(prev, s, "l0");
            prev = s;
        }
        b.glue(prev, d2, "l0");
        let last = b.sheet(format!("C0[{}]", 2 + m), single[0]);
        b.glue(d2, last, "l0");
        attach_plus[0] = last;
        // The order-two point: each of the two sheets leads to the other.
        b.glue(d1, d2, "l");
        b.glue(d2, d1, "l");
    }

    for j in 0..n {
        let lj = format!("l{j}");
        let plus_attach = b.side(attach_plus[j], &lj, Side::Bottom);
        let minus_attach = b.side(c_zero[j], &lj, Side::Top);
        b.families.push(HalfLineFamily {
            id: format!("L+w{j}"),
            proto: single[j],
            ram: j,
            chain_slit: 0,
            attach: plus_attach,
            orientation: Orientation::Plus,
        });
        b.families.push(HalfLineFamily {
            id: format!("L-w{j}"),
            proto: single[j],
            ram: j,
            chain_slit: 0,
            attach: minus_attach,
            orientation: Orientation::Minus,
        });
    }

    let c = SheetComplex::from_parts(z0, b.protos, b.sheets, b.families, b.gluing, rams)?;
    let report = validate(&c);
    if !report.ok {
        let generic = report
            .violations
            .iter()
            .filter(|v| matches!(v.invariant, "z0-genericity" | "slit-overlap" | "foot-z0"))
            .map(|v| v.detail.clone())
            .collect::<Vec<_>>();
        if !generic.is_empty() {
            return Err(SurfaceError::Genericity(generic.join("; ")));
        }
        let all = report.violations.iter().map(|v| format!("{}: {}", v.invariant, v.detail)).collect::<Vec<_>>();
        return Err(SurfaceError::Invalid(all.join("; ")));
    }
    Ok(c)
}

impl ModelParams {
    pub fn build(&self) -> Result<SheetComplex, SurfaceError> {
        let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        let w_list: Vec<Complex64> = self.w_list.iter().map(|p| c(*p)).collect();
        build_model_surface(c(self.z0), &w_list, c(self.w), self.k)
    }
}
