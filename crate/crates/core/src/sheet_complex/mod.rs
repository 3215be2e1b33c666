//! Log-Riemann surfaces as slit-plane sheets glued along their slits.
//!
//! Every sheet is a copy of a [`SheetProto`]: the plane with finitely many
//! closed slit rays removed. A slit starts at its foot (the projection of a
//! ramification point) and runs in the direction `foot - z0`, so two slits
//! with the same foot always project onto the same ray. Each slit has two
//! sides: [`Side::Top`] lies to the left of the ray direction, [`Side::Bottom`]
//! to the right.
//!
//! Finitely many *core* sheets are stored explicitly. Infinite periodic
//! tails of identical sheets around an infinite-order point are stored as
//! [`HalfLineFamily`] records whose copies are addressed by `k = 1, 2, ...`.

mod doc;
mod lift;
mod model;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use doc::{FamilyDoc, RamDoc, SideDoc, SlitDoc, SurfaceDoc};
pub use lift::{lift_segment, LiftOutcome, LiftPiece, LiftedPath};
pub use model::{build_model_surface, ModelParams};
pub use validate::{validate, ValidationReport, Violation};
pub(crate) use validate::{walk_around, Walk};

/// Absolute tolerance for the genericity and slit-disjointness checks.
pub const GENERICITY_TOL: f64 = 1e-9;

/// Absolute tolerance below which a segment is considered to touch a slit foot
/// or to run along a slit ray.
pub const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("malformed surface document: {0}")]
    Parse(String),
    #[error("dangling reference: {kind} `{id}`")]
    DanglingReference { kind: &'static str, id: String },
    #[error("duplicate identifier: {kind} `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("genericity violation: {0}; perturb z0 or the ramification projections")]
    Genericity(String),
    #[error("the point w = {0} coincides with one of the infinite-order projections")]
    CentreInList(Complex64),
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("invalid sheet point: {0}")]
    InvalidPoint(String),
    #[error("degenerate lift: {0}")]
    DegenerateLift(String),
    #[error("crossing budget must be positive")]
    NonPositiveBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Bottom,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Top => Side::Bottom,
            Side::Bottom => Side::Top,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
        })
    }
}

/// Which half-line a family realizes. `Plus` copies follow each other
/// counterclockwise around the foot (copy `k` bottom glued to copy `k+1` top),
/// `Minus` copies clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Plus,
    Minus,
}

/// Order of a ramification point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slit {
    pub id: String,
    pub foot: Complex64,
    /// Index into [`SheetComplex::rams`].
    pub ram: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SheetProto {
    pub id: String,
    pub slits: Vec<Slit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamPoint {
    pub id: String,
    pub projection: Complex64,
    pub order: Order,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreSheet {
    pub id: String,
    /// Index into [`SheetComplex::protos`].
    pub proto: usize,
}

/// A slit side on a core sheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SideRef {
    pub sheet: usize,
    /// Index of the slit within the sheet's proto.
    pub slit: usize,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineFamily {
    pub id: String,
    pub proto: usize,
    pub ram: usize,
    /// Index of the chain slit within the proto.
    pub chain_slit: usize,
    /// Core side glued to copy `k = 1`.
    pub attach: SideRef,
    pub orientation: Orientation,
}

/// Address of a sheet instance: a core sheet, or copy `k >= 1` of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SheetAddr {
    Core(usize),
    Copy { family: usize, k: u64 },
}

/// A slit side on any sheet instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SideAddr {
    pub sheet: SheetAddr,
    pub slit: usize,
    pub side: Side,
}

impl From<SideRef> for SideAddr {
    fn from(s: SideRef) -> Self {
        SideAddr { sheet: SheetAddr::Core(s.sheet), slit: s.slit, side: s.side }
    }
}

/// A point of the surface away from the slits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetPoint {
    pub sheet: SheetAddr,
    pub pos: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Link {
    Glued(SideRef),
    Family(usize),
}

/// The surface: base point, sheet prototypes, core sheets, periodic families,
/// the gluing of core slit sides and the registered ramification points.
///
/// Immutable once built. Construction does not check semantic validity; run
/// [`validate`] for that.
#[derive(Debug, Clone)]
pub struct SheetComplex {
    z0: Complex64,
    protos: Vec<SheetProto>,
    core_sheets: Vec<CoreSheet>,
    families: Vec<HalfLineFamily>,
    gluing: Vec<(SideRef, SideRef)>,
    rams: Vec<RamPoint>,
    links: BTreeMap<SideRef, Link>,
}

impl SheetComplex {
    /// Assembles a complex from already-resolved parts. Indices must be in
    /// range; inconsistencies in the gluing are left for [`validate`].
    pub fn from_parts(
        z0: Complex64,
        protos: Vec<SheetProto>,
        core_sheets: Vec<CoreSheet>,
        families: Vec<HalfLineFamily>,
        gluing: Vec<(SideRef, SideRef)>,
        rams: Vec<RamPoint>,
    ) -> Result<Self, SurfaceError> {
        let bad = |what: &str| SurfaceError::Invalid(format!("index out of range: {what}"));
        for p in &protos {
            if p.slits.iter().any(|s| s.ram >= rams.len()) {
                return Err(bad("slit ram"));
            }
        }
        if core_sheets.iter().any(|s| s.proto >= protos.len()) {
            return Err(bad("core sheet proto"));
        }
        let side_ok = |s: &SideRef| {
            s.sheet < core_sheets.len() && s.slit < protos[core_sheets[s.sheet].proto].slits.len()
        };
        for f in &families {
            if f.proto >= protos.len()
                || f.ram >= rams.len()
                || f.chain_slit >= protos[f.proto].slits.len()
                || !side_ok(&f.attach)
            {
                return Err(bad("family"));
            }
        }
        if gluing.iter().any(|(a, b)| !side_ok(a) || !side_ok(b)) {
            return Err(bad("gluing side"));
        }

        let mut links = BTreeMap::new();
        for (a, b) in &gluing {
            links.entry(*a).or_insert(Link::Glued(*b));
            links.entry(*b).or_insert(Link::Glued(*a));
        }
        for (i, f) in families.iter().enumerate() {
            links.entry(f.attach).or_insert(Link::Family(i));
        }
        Ok(SheetComplex { z0, protos, core_sheets, families, gluing, rams, links })
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn protos(&self) -> &[SheetProto] {
        &self.protos
    }

    pub fn core_sheets(&self) -> &[CoreSheet] {
        &self.core_sheets
    }

    pub fn families(&self) -> &[HalfLineFamily] {
        &self.families
    }

    pub fn gluing(&self) -> &[(SideRef, SideRef)] {
        &self.gluing
    }

    pub fn rams(&self) -> &[RamPoint] {
        &self.rams
    }

    pub fn ram_index(&self, id: &str) -> Option<usize> {
        self.rams.iter().position(|r| r.id == id)
    }

    pub fn sheet_index(&self, id: &str) -> Option<usize> {
        self.core_sheets.iter().position(|s| s.id == id)
    }

    pub fn proto_of(&self, sheet: SheetAddr) -> &SheetProto {
        match sheet {
            SheetAddr::Core(i) => &self.protos[self.core_sheets[i].proto],
            SheetAddr::Copy { family, .. } => &self.protos[self.families[family].proto],
        }
    }

    pub fn slits_of(&self, sheet: SheetAddr) -> &[Slit] {
        &self.proto_of(sheet).slits
    }

    /// Index of the slit of `sheet` whose foot is the ramification point `ram`.
    pub fn slit_with_ram(&self, sheet: SheetAddr, ram: usize) -> Option<usize> {
        self.slits_of(sheet).iter().position(|s| s.ram == ram)
    }

    /// Human-readable name of a sheet instance.
    pub fn sheet_name(&self, sheet: SheetAddr) -> String {
        match sheet {
            SheetAddr::Core(i) => self.core_sheets[i].id.clone(),
            SheetAddr::Copy { family, k } => format!("{}#{k}", self.families[family].id),
        }
    }

    /// Unit direction of slit rays starting at `foot`.
    pub fn ray_direction(&self, foot: Complex64) -> Complex64 {
        let d = foot - self.z0;
        d / d.norm()
    }

    /// The side glued to `side`, following core gluings, family attachments
    /// and the implicit chain gluings between consecutive family copies.
    pub fn partner(&self, side: SideAddr) -> Option<SideAddr> {
        match side.sheet {
            SheetAddr::Core(sheet) => {
                let r = SideRef { sheet, slit: side.slit, side: side.side };
                match self.links.get(&r)? {
                    Link::Glued(other) => Some((*other).into()),
                    Link::Family(f) => Some(SideAddr {
                        sheet: SheetAddr::Copy { family: *f, k: 1 },
                        slit: self.families[*f].chain_slit,
                        side: side.side.opposite(),
                    }),
                }
            }
            SheetAddr::Copy { family, k } => {
                let fam = &self.families[family];
                if side.slit != fam.chain_slit {
                    return None;
                }
                // `up` is the side leading to copy k+1.
                let up = match fam.orientation {
                    Orientation::Plus => Side::Bottom,
                    Orientation::Minus => Side::Top,
                };
                let chain = fam.chain_slit;
                if side.side == up {
                    Some(SideAddr { sheet: SheetAddr::Copy { family, k: k + 1 }, slit: chain, side: up.opposite() })
                } else if k == 1 {
                    Some(fam.attach.into())
                } else {
                    Some(SideAddr { sheet: SheetAddr::Copy { family, k: k - 1 }, slit: chain, side: up })
                }
            }
        }
    }

    /// Families whose foot is the ramification point `ram`.
    pub fn families_of(&self, ram: usize) -> impl Iterator<Item = (usize, &HalfLineFamily)> {
        self.families.iter().enumerate().filter(move |(_, f)| f.ram == ram)
    }

    /// Serializes back to the document form.
    pub fn to_doc(&self) -> SurfaceDoc {
        doc::to_doc(self)
    }

    /// Resolves a document into a complex. Referential integrity is checked;
    /// semantic validity is not.
    pub fn from_doc(d: &SurfaceDoc) -> Result<Self, SurfaceError> {
        doc::from_doc(d)
    }

    /// Returns an equivalent complex where the first `count` copies of
    /// `family` have been turned into core sheets. The surface is unchanged;
    /// only the finite core grows.
    pub fn promote_copies(&self, family: usize, count: usize) -> SheetComplex {
        let mut out = self.clone();
        if count == 0 {
            return out;
        }
        let fam = self.families[family].clone();
        let up = match fam.orientation {
            Orientation::Plus => Side::Bottom,
            Orientation::Minus => Side::Top,
        };
        let mut prev = fam.attach;
        for k in 1..=count {
            let idx = out.core_sheets.len();
            out.core_sheets.push(CoreSheet { id: format!("{}#{k}", fam.id), proto: fam.proto });
            let entry = SideRef { sheet: idx, slit: fam.chain_slit, side: up.opposite() };
            out.gluing.push((prev, entry));
            prev = SideRef { sheet: idx, slit: fam.chain_slit, side: up };
        }
        out.families[family].attach = prev;
        SheetComplex::from_parts(out.z0, out.protos, out.core_sheets, out.families, out.gluing, out.rams)
            .expect("promotion keeps indices in range")
    }
}

pub(crate) fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number `{t}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}
