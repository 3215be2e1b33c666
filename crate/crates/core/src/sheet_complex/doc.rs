use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::{
    CoreSheet, HalfLineFamily, Order, Orientation, RamPoint, SheetComplex, SheetProto, Side, SideRef,
    Slit, SurfaceError,
};

/// JSON form of a [`SheetComplex`]. Maps are keyed by identifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub z0: [f64; 2],
    pub protos: BTreeMap<String, Vec<SlitDoc>>,
    pub core_sheets: BTreeMap<String, String>,
    #[serde(default)]
    pub families: Vec<FamilyDoc>,
    #[serde(default)]
    pub gluing: Vec<[SideDoc; 2]>,
    #[serde(default)]
    pub rams: BTreeMap<String, RamDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlitDoc {
    pub id: String,
    pub foot: [f64; 2],
    pub ram: String,
}

/// `[sheet, slit, side]`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideDoc(pub String, pub String, pub Side);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttachDoc {
    pub sheet: String,
    pub slit: String,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub id: String,
    pub proto: String,
    pub ram: String,
    pub chain_slit: String,
    pub attach: AttachDoc,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamDoc {
    pub projection: [f64; 2],
    pub order: Order,
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(n) => s.serialize_u32(*n),
            Order::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct OrderVisitor;
        impl Visitor<'_> for OrderVisitor {
            type Value = Order;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a positive integer or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Order, E> {
                u32::try_from(v).map(Order::Finite).map_err(|_| E::custom("order too large"))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Order, E> {
                u32::try_from(v).map(Order::Finite).map_err(|_| E::custom("order must be positive"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Order, E> {
                if v == "inf" {
                    Ok(Order::Infinite)
                } else {
                    Err(E::custom(format!("unknown order `{v}`")))
                }
            }
        }
        d.deserialize_any(OrderVisitor)
    }
}

impl SurfaceDoc {
    pub fn from_json(text: &str) -> Result<Self, SurfaceError> {
        serde_json::from_str(text).map_err(|e| SurfaceError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn arr(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn finite(p: [f64; 2], what: &str) -> Result<Complex64, SurfaceError> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(c(p))
    } else {
        Err(SurfaceError::Parse(format!("non-finite coordinate in {what}")))
    }
}

pub(super) fn from_doc(d: &SurfaceDoc) -> Result<SheetComplex, SurfaceError> {
    let dangling = |kind: &'static str, id: &str| SurfaceError::DanglingReference { kind, id: id.to_string() };

    let ram_ids: Vec<&String> = d.rams.keys().collect();
    let ram_ix = |id: &str| ram_ids.iter().position(|r| *r == id).ok_or_else(|| dangling("ram", id));
    let rams = d
        .rams
        .iter()
        .map(|(id, r)| {
            Ok(RamPoint { id: id.clone(), projection: finite(r.projection, "ram projection")?, order: r.order })
        })
        .collect::<Result<Vec<_>, SurfaceError>>()?;

    let proto_ids: Vec<&String> = d.protos.keys().collect();
    let proto_ix = |id: &str| proto_ids.iter().position(|p| *p == id).ok_or_else(|| dangling("proto", id));
    let mut protos = Vec::with_capacity(d.protos.len());
    for (id, slits) in &d.protos {
        let mut out = Vec::with_capacity(slits.len());
        for s in slits {
            if out.iter().any(|o: &Slit| o.id == s.id) {
                return Err(SurfaceError::DuplicateId { kind: "slit", id: format!("{id}/{}", s.id) });
            }
            out.push(Slit { id: s.id.clone(), foot: finite(s.foot, "slit foot")?, ram: ram_ix(&s.ram)? });
        }
        protos.push(SheetProto { id: id.clone(), slits: out });
    }

    let core_sheets = d
        .core_sheets
        .iter()
        .map(|(id, p)| Ok(CoreSheet { id: id.clone(), proto: proto_ix(p)? }))
        .collect::<Result<Vec<_>, SurfaceError>>()?;

    let slit_ix = |proto: usize, slit: &str| {
        protos[proto]
            .slits
            .iter()
            .position(|s| s.id == slit)
            .ok_or_else(|| dangling("slit", slit))
    };
    let side_ref = |sheet: &str, slit: &str, side: Side| -> Result<SideRef, SurfaceError> {
        let si = core_sheets.iter().position(|s| s.id == sheet).ok_or_else(|| dangling("sheet", sheet))?;
        Ok(SideRef { sheet: si, slit: slit_ix(core_sheets[si].proto, slit)?, side })
    };

    let mut families = Vec::with_capacity(d.families.len());
    for f in &d.families {
        if families.iter().any(|o: &HalfLineFamily| o.id == f.id) {
            return Err(SurfaceError::DuplicateId { kind: "family", id: f.id.clone() });
        }
        let proto = proto_ix(&f.proto)?;
        families.push(HalfLineFamily {
            id: f.id.clone(),
            proto,
            ram: ram_ix(&f.ram)?,
            chain_slit: slit_ix(proto, &f.chain_slit)?,
            attach: side_ref(&f.attach.sheet, &f.attach.slit, f.attach.side)?,
            orientation: f.orientation,
        });
    }

    let gluing = d
        .gluing
        .iter()
        .map(|[a, b]| Ok((side_ref(&a.0, &a.1, a.2)?, side_ref(&b.0, &b.1, b.2)?)))
        .collect::<Result<Vec<_>, SurfaceError>>()?;

    SheetComplex::from_parts(finite(d.z0, "z0")?, protos, core_sheets, families, gluing, rams)
}

pub(super) fn to_doc(c: &SheetComplex) -> SurfaceDoc {
    let side = |s: &SideRef| {
        let sheet = &c.core_sheets[s.sheet];
        SideDoc(sheet.id.clone(), c.protos[sheet.proto].slits[s.slit].id.clone(), s.side)
    };
    SurfaceDoc {
        z0: arr(c.z0),
        protos: c
            .protos
            .iter()
            .map(|p| {
                let slits = p
                    .slits
                    .iter()
                    .map(|s| SlitDoc { id: s.id.clone(), foot: arr(s.foot), ram: c.rams[s.ram].id.clone() })
                    .collect();
                (p.id.clone(), slits)
            })
            .collect(),
        core_sheets: c.core_sheets.iter().map(|s| (s.id.clone(), c.protos[s.proto].id.clone())).collect(),
        families: c
            .families
            .iter()
            .map(|f| {
                let SideDoc(sheet, slit, side) = side(&f.attach);
                FamilyDoc {
                    id: f.id.clone(),
                    proto: c.protos[f.proto].id.clone(),
                    ram: c.rams[f.ram].id.clone(),
                    chain_slit: c.protos[f.proto].slits[f.chain_slit].id.clone(),
                    attach: AttachDoc { sheet, slit, side },
                    orientation: f.orientation,
                }
            })
            .collect(),
        gluing: c.gluing.iter().map(|(a, b)| [side(a), side(b)]).collect(),
        rams: c
            .rams
            .iter()
            .map(|r| (r.id.clone(), RamDoc { projection: arr(r.projection), order: r.order }))
            .collect(),
    }
}
