//! The case tree for linearly normal surfaces with `d >= 2g - 1`.
//!
//! A record is sent down the tree by the sign of `(K + H)^2` and by the
//! emptiness of `|2K + H|` and `|3K + H|`. When the record does not decide
//! one of these, both alternatives are followed and each outcome carries
//! the assumption it was derived under. Every outcome in a rational family
//! comes with an explicit witness `(model, H, s, t)`: `S'` is the model
//! blown up in `s` double and `t` simple base points of `|H|`. Witnesses are
//! re-checked by [`verify_witness`], which only uses the lattice module.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::adjoint::{
    adjoint_profile, check_scroll_bounds, irregular_constraints, qd_identities, AdjointSquare,
    ConstraintCheck, InvariantRecord, Status,
};
use crate::cones::{segre_classify, ConicRuledData, SegreOutcome};
use crate::error::{Error, Result};
use crate::lattice::{
    arithmetic_genus, canonical_class, intersect, is_nef, self_intersection, DivisorClass,
    Nefness, SurfaceModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    Scroll { q: i64, cone: bool, e: Option<u32> },
    VeroneseV2,
    VeroneseV3,
    WeakDelPezzo { degree: i64 },
    ConicBundle { g: i64 },
    Class1V4 { b: u32 },
    Class1V5 { b: u32 },
    Class1Hyperelliptic { e: u32, g: i64 },
    Class1Trigonal { e: u32, h: i64 },
    Class2DoubleDelPezzo { k2: i64 },
    Class2Plane6With7Double,
    Class3Plane7 { s: u32, t: u32 },
    Class3Plane8 { s: u32, t: u32 },
    Class3Tetragonal { e: u32, h: i64, s: u32, t: u32 },
    Class3Pentagonal { e: u32, h: i64, s: u32, t: u32 },
    /// `b` simple internal projections of the 2-Veronese cone.
    SegreConeVeronese2 { q: i64, e: i64, b: i64 },
    /// `q > 0` and `(K + H)^2 > 0`: passes every numerical filter; no
    /// witness is constructed.
    IrregularAdjoint { biadjoint_empty: Option<bool> },
    /// Outside the families classified here (`|3K + H|` may be non-empty).
    Unclassified,
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::Scroll { .. } => "Scroll",
            Case::VeroneseV2 => "VeroneseV2",
            Case::VeroneseV3 => "VeroneseV3",
            Case::WeakDelPezzo { .. } => "WeakDelPezzo",
            Case::ConicBundle { .. } => "ConicBundle",
            Case::Class1V4 { .. } => "Class1_V4",
            Case::Class1V5 { .. } => "Class1_V5",
            Case::Class1Hyperelliptic { .. } => "Class1_Hyperelliptic",
            Case::Class1Trigonal { .. } => "Class1_Trigonal",
            Case::Class2DoubleDelPezzo { .. } => "Class2_DoubleDelPezzo",
            Case::Class2Plane6With7Double => "Class2_Plane6_2e7",
            Case::Class3Plane7 { .. } => "Class3_Plane7",
            Case::Class3Plane8 { .. } => "Class3_Plane8",
            Case::Class3Tetragonal { .. } => "Class3_Tetragonal",
            Case::Class3Pentagonal { .. } => "Class3_Pentagonal",
            Case::SegreConeVeronese2 { .. } => "SegreConeVeronese2",
            Case::IrregularAdjoint { .. } => "IrregularAdjoint",
            Case::Unclassified => "Unclassified",
        }
    }

    /// `key=value` pairs joined by `;`, empty when the case has none.
    pub fn params(&self) -> String {
        match *self {
            Case::Scroll { q, cone, e } => match e {
                Some(e) => format!("q={q};cone={cone};e={e}"),
                None => format!("q={q};cone={cone}"),
            },
            Case::WeakDelPezzo { degree } => format!("degree={degree}"),
            Case::ConicBundle { g } => format!("g={g}"),
            Case::Class1V4 { b } | Case::Class1V5 { b } => format!("b={b}"),
            Case::Class1Hyperelliptic { e, g } => format!("e={e};g={g}"),
            Case::Class1Trigonal { e, h } => format!("e={e};h={h}"),
            Case::Class2DoubleDelPezzo { k2 } => format!("k2={k2}"),
            Case::Class3Plane7 { s, t } | Case::Class3Plane8 { s, t } => format!("s={s};t={t}"),
            Case::Class3Tetragonal { e, h, s, t } | Case::Class3Pentagonal { e, h, s, t } => {
                format!("e={e};h={h};s={s};t={t}")
            }
            Case::SegreConeVeronese2 { q, e, b } => format!("q={q};e={e};alpha={};b={b}", 2 * e),
            Case::IrregularAdjoint { biadjoint_empty } => match biadjoint_empty {
                Some(v) => format!("biadjoint_empty={v}"),
                None => String::new(),
            },
            Case::VeroneseV2 | Case::VeroneseV3 | Case::Class2Plane6With7Double | Case::Unclassified => {
                String::new()
            }
        }
    }

    /// The case after `b` further simple internal projections, for the
    /// families that are closed under them.
    fn projected(self, b: u32) -> Option<Case> {
        let bi = i64::from(b);
        Some(match self {
            Case::VeroneseV3 if b == 0 => Case::VeroneseV3,
            Case::VeroneseV3 => Case::WeakDelPezzo { degree: 9 - bi },
            Case::WeakDelPezzo { degree } => Case::WeakDelPezzo { degree: degree - bi },
            Case::Class1V4 { b: b0 } => Case::Class1V4 { b: b0 + b },
            Case::Class1V5 { b: b0 } => Case::Class1V5 { b: b0 + b },
            Case::Class3Plane7 { s, t } => Case::Class3Plane7 { s, t: t + b },
            Case::Class3Plane8 { s, t } => Case::Class3Plane8 { s, t: t + b },
            Case::Class3Tetragonal { e, h, s, t } => Case::Class3Tetragonal { e, h, s, t: t + b },
            Case::Class3Pentagonal { e, h, s, t } => Case::Class3Pentagonal { e, h, s, t: t + b },
            Case::SegreConeVeronese2 { q, e, b: b0 } => Case::SegreConeVeronese2 { q, e, b: b0 + bi },
            c @ (Case::Class1Hyperelliptic { .. }
            | Case::Class1Trigonal { .. }
            | Case::Class2DoubleDelPezzo { .. }
            | Case::Class2Plane6With7Double) => c,
            _ => return None,
        })
    }
}

/// `S'` is `model` blown up in `double_points` double and `simple_points`
/// simple base points of `|H|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Witness {
    pub h: DivisorClass,
    pub double_points: u32,
    pub simple_points: u32,
}

impl Witness {
    pub fn new(h: DivisorClass, double_points: u32, simple_points: u32) -> Self {
        Witness { h, double_points, simple_points }
    }

    pub fn model(&self) -> SurfaceModel {
        self.h.model()
    }

    pub fn plane(a: i64, s: u32, t: u32) -> Self {
        Self::new(crate::lattice::plane_class(a), s, t)
    }

    pub fn hirzebruch(e: u32, a: i64, b: i64, s: u32, t: u32) -> Self {
        Self::new(crate::lattice::hirzebruch_class(e, a, b), s, t)
    }

    fn with_more_simple_points(&self, b: u32) -> Self {
        Witness { simple_points: self.simple_points + b, ..self.clone() }
    }
}

/// Family witnesses.
pub mod families {
    use super::Witness;
    use crate::error::{Error, Result};
    use crate::lattice::{DivisorClass, SurfaceModel};

    pub fn veronese_v2() -> Witness {
        Witness::plane(2, 0, 0)
    }

    /// `|-K|` on the plane blown up in `9 - degree` points.
    pub fn del_pezzo(degree: u32) -> Result<Witness> {
        if !(1..=9).contains(&degree) {
            return Err(Error::Precondition("Del Pezzo degree lies in 1..=9".into()));
        }
        Ok(Witness::plane(3, 0, 9 - degree))
    }

    pub fn v4(b: u32) -> Witness {
        Witness::plane(4, 0, b)
    }

    pub fn v5(b: u32) -> Witness {
        Witness::plane(5, 0, b)
    }

    /// `2E + (g + 1 + e)F` on `F_e`.
    pub fn hyperelliptic(e: u32, g: i64, t: u32) -> Witness {
        Witness::hirzebruch(e, 2, g + 1 + i64::from(e), 0, t)
    }

    /// `3E + (h + e + 2)F` on `F_e`.
    pub fn trigonal(e: u32, h: i64, t: u32) -> Witness {
        Witness::hirzebruch(e, 3, h + i64::from(e) + 2, 0, t)
    }

    /// `-2K` on a weak Del Pezzo surface of degree `k2`: `6L` with `9 - k2`
    /// double points.
    pub fn double_del_pezzo(k2: i64, t: u32) -> Result<Witness> {
        if !(1..=9).contains(&k2) {
            return Err(Error::Precondition("weak Del Pezzo degree lies in 1..=9".into()));
        }
        Ok(Witness::plane(6, (9 - k2) as u32, t))
    }

    pub fn plane6_7_double(t: u32) -> Witness {
        Witness::plane(6, 7, t)
    }

    pub fn plane7(s: u32, t: u32) -> Witness {
        Witness::plane(7, s, t)
    }

    pub fn plane8(s: u32, t: u32) -> Witness {
        Witness::plane(8, s, t)
    }

    /// `4E + (h + 2e + 4)F` on `F_e`.
    pub fn tetragonal(e: u32, h: i64, s: u32, t: u32) -> Witness {
        Witness::hirzebruch(e, 4, h + 2 * i64::from(e) + 4, s, t)
    }

    /// `5E + (h + 2e + 4)F` on `F_e`.
    pub fn pentagonal(e: u32, h: i64, s: u32, t: u32) -> Witness {
        Witness::hirzebruch(e, 5, h + 2 * i64::from(e) + 4, s, t)
    }

    /// `E + ((d + e)/2)F` on `F_e`; `d = e` is the cone over a rational
    /// normal curve.
    pub fn rational_scroll(d: i64, e: u32) -> Result<Witness> {
        let ei = i64::from(e);
        if (d + ei) % 2 != 0 {
            return Err(Error::Precondition(alloc::format!("d + e = {} must be even", d + ei)));
        }
        if d < ei {
            return Err(Error::Precondition(alloc::format!("need d >= e, got d = {d}, e = {e}")));
        }
        Ok(Witness::hirzebruch(e, 1, (d + ei) / 2, 0, 0))
    }

    /// `2C_0 + 2eF` on the normalized ruled surface over a genus `q` curve:
    /// the 2-Veronese re-embedding of the cone.
    pub fn segre_cone(q: u32, e: i64, t: u32) -> Result<Witness> {
        let model = SurfaceModel::numerically_ruled(q, e)?;
        Ok(Witness::new(DivisorClass::from_i64(model, &[2, 2 * e])?, 0, t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessVerdict {
    pub d: i64,
    pub g: i64,
    pub n: i64,
    /// `K_{S'}^2`.
    pub k2: i64,
    /// `(K_{S'} + H')^2`.
    pub adjoint_square: i64,
    pub nef: Nefness,
    /// `H.E = 0` for the negative section `E` of a ruled model.
    pub contracts_negative_section: bool,
    pub matches: bool,
    pub ok: bool,
    pub warnings: Vec<String>,
}

fn small(v: num_bigint::BigInt) -> Result<i64> {
    v.to_i64().ok_or(Error::Overflow)
}

/// Recomputes `(d, g)` of a witness from the lattice alone and compares
/// them with the expected values. Also requires `H` nef and `n >= 3`.
pub fn verify_witness(w: &Witness, expected_d: i64, expected_g: i64) -> Result<WitnessVerdict> {
    let model = w.model();
    match model {
        SurfaceModel::ProjectivePlane | SurfaceModel::Hirzebruch { .. } => {}
        SurfaceModel::NumericallyRuled { e, .. } if e >= 0 => {}
        _ => return Err(Error::UnsupportedModel),
    }
    let (s, t) = (i64::from(w.double_points), i64::from(w.simple_points));
    let h = &w.h;
    let k = canonical_class(model);
    let adjoint = k.checked_add(h)?;
    let d = small(self_intersection(h))? - 4 * s - t;
    let g = small(arithmetic_genus(h)?)? - s;
    let mut k2 = small(self_intersection(&k))? - s - t;
    let mut adjoint_square = small(self_intersection(&adjoint))? - s;

    // Same numbers on the blown-up lattice, where the model supports it.
    if let Ok(blown) = model.blown_up(w.double_points + w.simple_points) {
        let mults: Vec<i64> = core::iter::repeat_n(2, w.double_points as usize)
            .chain(core::iter::repeat_n(1, w.simple_points as usize))
            .collect();
        let h2 = h.blown_up(&mults)?;
        let k2_class = canonical_class(blown);
        let d2 = small(self_intersection(&h2))?;
        let g2 = small(arithmetic_genus(&h2)?)?;
        let kk = small(self_intersection(&k2_class))?;
        let ks = small(self_intersection(&k2_class.checked_add(&h2)?))?;
        if (d2, g2, kk, ks) != (d, g, k2, adjoint_square) {
            return Err(Error::Identity(format!(
                "blown-up lattice gives (d, g, K^2, (K+H)^2) = ({d2}, {g2}, {kk}, {ks}), \
                 base model gives ({d}, {g}, {k2}, {adjoint_square})"
            )));
        }
        k2 = kk;
        adjoint_square = ks;
    }

    let nef = is_nef(h, None)?;
    let contracts_negative_section = match model {
        SurfaceModel::ProjectivePlane => false,
        _ => intersect(h, &DivisorClass::basis(model, 0)?)? == 0.into(),
    };
    let n = d - g + 1;
    let mut warnings = Vec::new();
    if d > 3 * g - 3 && 2 * d >= 3 * n {
        warnings.push(format!("d = {d} > 3g - 3 but d >= 3n/2 = {}", 3 * n / 2));
    }
    let matches = (d, g) == (expected_d, expected_g);
    Ok(WitnessVerdict {
        d,
        g,
        n,
        k2,
        adjoint_square,
        nef,
        contracts_negative_section,
        matches,
        ok: matches && nef.is_nef() && n >= 3,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assumption {
    AdjointSquareZero,
    AdjointSquarePositive,
    BiadjointEmpty,
    BiadjointNonEmpty,
    TriadjointEmpty,
    TriadjointNonEmpty,
}

impl Assumption {
    pub fn label(&self) -> &'static str {
        match self {
            Assumption::AdjointSquareZero => "assumes (K+H)^2 = 0",
            Assumption::AdjointSquarePositive => "assumes (K+H)^2 > 0",
            Assumption::BiadjointEmpty => "assumes |2K+H| empty",
            Assumption::BiadjointNonEmpty => "assumes |2K+H| non-empty",
            Assumption::TriadjointEmpty => "assumes |3K+H| empty",
            Assumption::TriadjointNonEmpty => "assumes |3K+H| non-empty",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationOutcome {
    pub case: Case,
    pub d: i64,
    pub g: i64,
    pub witness: Option<Witness>,
    pub assumptions: Vec<Assumption>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    /// `None` when there is no witness to check.
    pub verified: Option<bool>,
    /// `K_{S'}^2` of the witness.
    pub witness_k2: Option<i64>,
}

impl ClassificationOutcome {
    fn bare(case: Case, d: i64, g: i64) -> Self {
        ClassificationOutcome {
            case,
            d,
            g,
            witness: None,
            assumptions: Vec::new(),
            notes: Vec::new(),
            warnings: Vec::new(),
            verified: None,
            witness_k2: None,
        }
    }

    /// Builds an outcome and checks its witness against `(d, g)`.
    pub fn with_witness(case: Case, d: i64, g: i64, w: Witness) -> Result<Self> {
        let v = verify_witness(&w, d, g)?;
        let mut out = Self::bare(case, d, g);
        out.verified = Some(v.ok);
        out.witness_k2 = Some(v.k2);
        out.warnings = v.warnings;
        if v.contracts_negative_section {
            out.notes.push("H.E = 0: the negative section is contracted".into());
        }
        out.witness = Some(w);
        Ok(out)
    }
}

/// A branch of the tree that produced nothing, with the checks that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub branch: &'static str,
    pub assumptions: Vec<Assumption>,
    pub reasons: Vec<ConstraintCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub outcomes: Vec<ClassificationOutcome>,
    pub rejections: Vec<Rejection>,
}

impl Classification {
    pub fn is_feasible(&self) -> bool {
        !self.outcomes.is_empty()
    }

    pub fn cases(&self) -> impl Iterator<Item = &Case> {
        self.outcomes.iter().map(|o| &o.case)
    }

    /// Whether some rejection cites the constraint `id`.
    pub fn rejected_by(&self, id: &str) -> bool {
        self.rejections.iter().any(|r| r.reasons.iter().any(|c| c.id == id))
    }
}

fn violated(id: &'static str, detail: String) -> ConstraintCheck {
    ConstraintCheck { id, status: Status::Violated, detail }
}

fn n_of(d: i64, g: i64) -> i64 {
    d - g + 1
}

/// Families with `|2K + H|` empty among rational surfaces with `d >= n`.
pub fn solve_class1(d: i64, g: i64) -> Result<Vec<ClassificationOutcome>> {
    let mut out = Vec::new();
    if n_of(d, g) < 3 {
        return Ok(out);
    }
    if g == 1 && (3..=9).contains(&d) {
        let case = if d == 9 { Case::VeroneseV3 } else { Case::WeakDelPezzo { degree: d } };
        out.push(ClassificationOutcome::with_witness(case, d, g, families::del_pezzo(d as u32)?)?);
    }
    if g == 3 && (5..=16).contains(&d) {
        let b = (16 - d) as u32;
        out.push(ClassificationOutcome::with_witness(Case::Class1V4 { b }, d, g, families::v4(b))?);
    }
    if g == 6 && (8..=25).contains(&d) {
        let b = (25 - d) as u32;
        let mut o = ClassificationOutcome::with_witness(Case::Class1V5 { b }, d, g, families::v5(b))?;
        if b >= 15 {
            o.warnings.push(v5_caveat(b));
        }
        out.push(o);
    }
    if g >= 2 && d <= 4 * g + 4 {
        let t = (4 * g + 4 - d) as u32;
        for e in 0..=(g + 1) as u32 {
            out.push(ClassificationOutcome::with_witness(
                Case::Class1Hyperelliptic { e, g },
                d,
                g,
                families::hyperelliptic(e, g, t),
            )?);
        }
    }
    if g >= 3 && d <= 3 * g + 6 {
        let t = (3 * g + 6 - d) as u32;
        for e in 0..=((g + 2) / 3) as u32 {
            let ei = i64::from(e);
            if (g - 2 + ei) % 2 != 0 {
                continue;
            }
            let h = (g - 2 + ei) / 2;
            if h < (2 * ei - 2).max(ei) {
                continue;
            }
            let mut o = ClassificationOutcome::with_witness(
                Case::Class1Trigonal { e, h },
                d,
                g,
                families::trigonal(e, h, t),
            )?;
            if (e, h) == (1, 1) {
                o.notes.push("F_1 = plane blown up in a point: same surface as V4 projected once".into());
            }
            out.push(o);
        }
    }
    Ok(out)
}

fn v5_caveat(b: u32) -> String {
    format!("V5 projected from {b} points: needs the points off every conic (b in 15..=17)")
}

/// Families with `|2K + H|` composed with nothing and `h^0(2K + H) = 1`, i.e.
/// `2K + H ~ 0` after the adjoint reduction.
pub fn solve_class2(d: i64, g: i64) -> Result<Vec<ClassificationOutcome>> {
    let mut out = Vec::new();
    if n_of(d, g) < 3 {
        return Ok(out);
    }
    if (4..=10).contains(&g) && d <= 4 * (g - 1) {
        let k2 = g - 1;
        let t = (4 * (g - 1) - d) as u32;
        out.push(ClassificationOutcome::with_witness(
            Case::Class2DoubleDelPezzo { k2 },
            d,
            g,
            families::double_del_pezzo(k2, t)?,
        )?);
    }
    if g == 3 && d <= 8 {
        let t = (8 - d) as u32;
        out.push(ClassificationOutcome::with_witness(
            Case::Class2Plane6With7Double,
            d,
            g,
            families::plane6_7_double(t),
        )?);
    }
    Ok(out)
}

fn nonneg_u32(v: i64) -> Option<u32> {
    u32::try_from(v).ok()
}

/// Families with `|2K + H|` non-empty and `|3K + H|` empty.
pub fn solve_class3(d: i64, g: i64) -> Result<Vec<ClassificationOutcome>> {
    let mut out = Vec::new();
    if n_of(d, g) < 3 {
        return Ok(out);
    }
    for (a, genus0, deg0) in [(7i64, 15i64, 49i64), (8, 21, 64)] {
        let s = genus0 - g;
        let t = deg0 - 4 * s - d;
        if let (Some(s), Some(t)) = (nonneg_u32(s), nonneg_u32(t)) {
            let (case, w) = if a == 7 {
                (Case::Class3Plane7 { s, t }, families::plane7(s, t))
            } else {
                (Case::Class3Plane8 { s, t }, families::plane8(s, t))
            };
            out.push(ClassificationOutcome::with_witness(case, d, g, w)?);
        }
    }
    // g = 3h + 9 - s, d = 8h + 32 - 4s - t, so t = 4g - 4 - 4h - d.
    let h_hi = (4 * g - 4 - d).div_euclid(4);
    let h_lo = 1i64.max((g - 9 + 2).div_euclid(3));
    for h in h_lo..=h_hi {
        let (Some(s), Some(t)) = (nonneg_u32(3 * h + 9 - g), nonneg_u32(4 * g - 4 - 4 * h - d)) else {
            continue;
        };
        let e_hi = ((h + 4) / 2).min(h + 2);
        for e in 0..=e_hi as u32 {
            out.push(ClassificationOutcome::with_witness(
                Case::Class3Tetragonal { e, h, s, t },
                d,
                g,
                families::tetragonal(e, h, s, t),
            )?);
        }
    }
    // g = 4h - 2e + 12 - s, d = 10h - 5e + 40 - 4s - t,
    // so t = 4g - d - 8 - 6h + 3e, and h >= e bounds e by (4g - d - 8)/3.
    let e_hi = (4 * g - d - 8).div_euclid(3);
    for e in 0..=e_hi.max(-1) {
        let h_lo = (3 * e - 4).max(2 * e - 2).max(e).max(1);
        let h_hi = (4 * g - d - 8 + 3 * e).div_euclid(6);
        for h in h_lo..=h_hi {
            let (Some(s), Some(t)) =
                (nonneg_u32(4 * h - 2 * e + 12 - g), nonneg_u32(4 * g - d - 8 - 6 * h + 3 * e))
            else {
                continue;
            };
            let e = e as u32;
            let mut o = ClassificationOutcome::with_witness(
                Case::Class3Pentagonal { e, h, s, t },
                d,
                g,
                families::pentagonal(e, h, s, t),
            )?;
            if (e, h) == (1, 1) {
                o.notes.push("F_1 = plane blown up in a point: same surface as Plane7 with one more double point".into());
            }
            out.push(o);
        }
    }
    Ok(out)
}

/// Expands an outcome into its simple internal projections from `0..=max_t`
/// further points, keeping `n >= 3`.
pub fn internal_projection_closure(
    outcome: &ClassificationOutcome,
    max_t: u32,
) -> Result<Vec<ClassificationOutcome>> {
    let Some(w) = &outcome.witness else {
        return Err(Error::Precondition("the outcome has no witness".into()));
    };
    let q = i64::from(w.model().irregularity());
    let mut out = Vec::new();
    for b in 0..=max_t {
        let d = outcome.d - i64::from(b);
        let g = outcome.g;
        if n_of(d, g) < 3 {
            break;
        }
        let Some(case) = outcome.case.projected(b) else {
            return Err(Error::Precondition(format!(
                "{} is not closed under internal projection",
                outcome.case.name()
            )));
        };
        let mut o = ClassificationOutcome::with_witness(case, d, g, w.with_more_simple_points(b))?;
        o.assumptions = outcome.assumptions.clone();
        if q == 0 && d > 2 * g {
            o.notes.push("d >= 2g + 1: any curvilinear set of base points gives this surface".into());
        }
        if d < 2 * g - 1 {
            o.warnings.push(format!("d = {d} < 2g - 1 = {}", 2 * g - 1));
        }
        if let Case::Class1V5 { b } = case {
            if b >= 15 {
                o.warnings.push(v5_caveat(b));
            }
        }
        out.push(o);
    }
    Ok(out)
}

/// Which values of `(K + H)^2` to explore, and whether exploring them is an
/// assumption or forced by the record.
fn adjoint_square_branches(rec: &InvariantRecord) -> Vec<(AdjointSquare, Option<Assumption>)> {
    if let Some(s) = rec.adjoint_square() {
        return vec![(AdjointSquare::Known(s), None)];
    }
    let forced_zero = if rec.q == 0 {
        rec.g <= 2
    } else {
        rec.mu == Some(2) || rec.d > 3 * rec.g - 3
    };
    if forced_zero {
        return vec![(AdjointSquare::AssumedZero, None)];
    }
    if rec.q > 0 && rec.mu.is_some() {
        return vec![(AdjointSquare::AssumedPositive, None)];
    }
    vec![
        (AdjointSquare::AssumedZero, Some(Assumption::AdjointSquareZero)),
        (AdjointSquare::AssumedPositive, Some(Assumption::AdjointSquarePositive)),
    ]
}

struct Tree<'a> {
    rec: &'a InvariantRecord,
    out: Classification,
}

impl Tree<'_> {
    fn reject(&mut self, branch: &'static str, assumptions: &[Assumption], reasons: Vec<ConstraintCheck>) {
        self.out.rejections.push(Rejection { branch, assumptions: assumptions.to_vec(), reasons });
    }

    /// Adds outcomes that survive the `K^2` filter.
    fn accept(&mut self, branch: &'static str, assumptions: &[Assumption], found: Vec<ClassificationOutcome>) {
        let mut kept = 0;
        let mut reasons = Vec::new();
        for mut o in found {
            if let (Some(k2), Some(wk2)) = (self.rec.k2, o.witness_k2) {
                if k2 != wk2 {
                    reasons.push(violated(
                        "witness.k2_matches",
                        format!("{} {}: K^2 = {wk2}, record has {k2}", o.case.name(), o.case.params()),
                    ));
                    continue;
                }
            }
            o.assumptions.extend_from_slice(assumptions);
            self.out.outcomes.push(o);
            kept += 1;
        }
        if kept == 0 {
            if reasons.is_empty() {
                reasons.push(violated("family.no_solution", "no family member has these (d, g)".into()));
            }
            self.reject(branch, assumptions, reasons);
        }
    }

    fn scroll_branch(&mut self) -> Result<()> {
        let rec = self.rec;
        if rec.q == 0 {
            let mut found = Vec::new();
            if (rec.d, rec.n) == (4, 5) {
                found.push(ClassificationOutcome::with_witness(
                    Case::VeroneseV2,
                    4,
                    0,
                    families::veronese_v2(),
                )?);
            }
            for e in (0..=rec.d as u32).filter(|e| (rec.d + i64::from(*e)) % 2 == 0) {
                let case = Case::Scroll { q: 0, cone: i64::from(e) == rec.d, e: Some(e) };
                found.push(ClassificationOutcome::with_witness(
                    case,
                    rec.d,
                    0,
                    families::rational_scroll(rec.d, e)?,
                )?);
            }
            self.accept("scroll.rational", &[], found);
            return Ok(());
        }
        let bounds = check_scroll_bounds(rec)?;
        let mut reasons = Vec::new();
        if !bounds.valid {
            reasons.push(violated(
                "cor_top.scroll_bounds",
                format!("need {} <= d <= {}, d = {}", bounds.lower, bounds.upper, rec.d),
            ));
        }
        if let Some(k2) = rec.k2 {
            if k2 != 8 - 8 * rec.q {
                reasons.push(violated("minimal.k2_eq_8_minus_8q", format!("K^2 = {k2}")));
            }
        }
        if reasons.is_empty() {
            let case = Case::Scroll { q: rec.q, cone: bounds.cone, e: None };
            self.out.outcomes.push(ClassificationOutcome::bare(case, rec.d, rec.g));
        } else {
            self.reject("scroll.irregular", &[], reasons);
        }
        Ok(())
    }

    fn rational_checks(&self, square: AdjointSquare) -> Vec<ConstraintCheck> {
        let rec = self.rec;
        let mut bad = Vec::new();
        if let AdjointSquare::Known(s) = square {
            if s < 0 {
                bad.push(violated("nef.adjoint_square_nonnegative", format!("(K+H)^2 = {s}")));
            }
        }
        if let Some(k2) = rec.k2 {
            if k2 > 9 {
                bad.push(violated("rational.k2_le_9", format!("K^2 = {k2}")));
            }
        }
        if rec.d > 4 * rec.g + 4 && (rec.d, rec.g) != (9, 1) {
            bad.push(violated(
                "nef.d_le_4g_minus_8q_plus_4",
                format!("d = {}, 4g + 4 = {}", rec.d, 4 * rec.g + 4),
            ));
        }
        if (square.eq(&AdjointSquare::AssumedPositive) || matches!(square, AdjointSquare::Known(s) if s > 0))
            && rec.g <= 2 {
                bad.push(violated(
                    "basepoints.positive_square_needs_g_ge_3",
                    format!("g = {}", rec.g),
                ));
            }
        bad
    }

    fn rational_zero_square(&mut self, assumptions: &[Assumption]) -> Result<()> {
        let rec = self.rec;
        if rec.g == 1 {
            let found = solve_class1(rec.d, 1)?;
            self.accept("del_pezzo", assumptions, found);
            return Ok(());
        }
        let mut found = vec![ClassificationOutcome::bare(Case::ConicBundle { g: rec.g }, rec.d, rec.g)];
        found.extend(
            solve_class1(rec.d, rec.g)?
                .into_iter()
                .filter(|o| matches!(o.case, Case::Class1Hyperelliptic { .. })),
        );
        self.accept("conic_bundle.rational", assumptions, found);
        Ok(())
    }

    fn rational_positive_square(&mut self, assumptions: &[Assumption]) -> Result<()> {
        let rec = self.rec;
        // q = 0: h^0(2K + H) = p_a(K + H).
        let biadjoint: Vec<(bool, Option<Assumption>)> = match rec.adjoint_genus() {
            Some(pa) => vec![(pa == 0, None)],
            None => vec![
                (true, Some(Assumption::BiadjointEmpty)),
                (false, Some(Assumption::BiadjointNonEmpty)),
            ],
        };
        for (empty, label) in biadjoint {
            let mut labels = assumptions.to_vec();
            labels.extend(label);
            if empty {
                let found = solve_class1(rec.d, rec.g)?
                    .into_iter()
                    .filter(|o| {
                        matches!(o.case, Case::Class1V4 { .. } | Case::Class1V5 { .. } | Case::Class1Trigonal { .. })
                    })
                    .collect();
                self.accept("class1", &labels, found);
                continue;
            }
            let forced_empty = adjoint_profile(rec, 3)?.empty_forced;
            let mut labels3 = labels.clone();
            if !forced_empty {
                labels3.push(Assumption::TriadjointEmpty);
            }
            let mut found = solve_class2(rec.d, rec.g)?;
            found.extend(solve_class3(rec.d, rec.g)?);
            self.accept("class2_class3", &labels3, found);
            if !forced_empty {
                let mut o = ClassificationOutcome::bare(Case::Unclassified, rec.d, rec.g);
                o.notes.push("|3K+H| may be non-empty; no family is claimed".into());
                let mut labels_ne = labels.clone();
                labels_ne.push(Assumption::TriadjointNonEmpty);
                o.assumptions = labels_ne;
                self.out.outcomes.push(o);
            }
        }
        Ok(())
    }

    fn irregular(&mut self, square: AdjointSquare, assumptions: &[Assumption]) -> Result<()> {
        let rec = self.rec;
        let checks = irregular_constraints(rec, square);
        let bad: Vec<ConstraintCheck> =
            checks.into_iter().filter(|c| c.status == Status::Violated).collect();
        let zero = matches!(square, AdjointSquare::AssumedZero | AdjointSquare::Known(0));
        if !bad.is_empty() {
            let branch = if zero { "conic_bundle.irregular" } else { "irregular.adjoint_square" };
            self.reject(branch, assumptions, bad);
            return Ok(());
        }
        if !zero {
            let biadjoint_empty = rec.adjoint_genus().map(|pa| pa == rec.q);
            let mut o = ClassificationOutcome::bare(Case::IrregularAdjoint { biadjoint_empty }, rec.d, rec.g);
            o.assumptions = assumptions.to_vec();
            self.out.outcomes.push(o);
            return Ok(());
        }
        let mut o = ClassificationOutcome::bare(Case::ConicBundle { g: rec.g }, rec.d, rec.g);
        o.assumptions = assumptions.to_vec();
        self.out.outcomes.push(o);

        // Segre: d >= 2g + 5 with linearly normal sections.
        if rec.g == rec.a() + 1 && rec.d >= 2 * rec.g + 5 {
            let e = rec.g + 1 - 2 * rec.q;
            let b = 4 * rec.g + 4 - 8 * rec.q - rec.d;
            let data = ConicRuledData::new(rec.q as u32, e, 2 * e)?;
            if let SegreOutcome::ConeVeronese2 { .. } = segre_classify(&data, true)? {
                let w = families::segre_cone(rec.q as u32, e, b as u32)?;
                let mut o = ClassificationOutcome::with_witness(
                    Case::SegreConeVeronese2 { q: rec.q, e, b },
                    rec.d,
                    rec.g,
                    w,
                )?;
                o.assumptions = assumptions.to_vec();
                if b > 0 {
                    o.notes.push(format!("{b} simple internal projections of the cone"));
                }
                self.out.outcomes.push(o);
            }
        }
        Ok(())
    }
}

/// Runs the case tree on a record. Errors are reserved for records that do
/// not meet the standing hypotheses; contradictory records come back with
/// no outcomes and the failed checks in `rejections`.
pub fn classify(rec: &InvariantRecord) -> Result<Classification> {
    let mut tree = Tree { rec, out: Classification { outcomes: Vec::new(), rejections: Vec::new() } };
    let consistent = rec.validate().and_then(|_| qd_identities(rec));
    match consistent {
        Err(Error::Inconsistent(ms)) => {
            let reasons = ms.into_iter().map(|m| violated(m.id, m.detail)).collect();
            tree.reject("record", &[], reasons);
            return Ok(tree.out);
        }
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    if rec.g == rec.q {
        tree.scroll_branch()?;
    } else {
        for (square, label) in adjoint_square_branches(rec) {
            let labels: Vec<Assumption> = label.into_iter().collect();
            if rec.q > 0 {
                tree.irregular(square, &labels)?;
                continue;
            }
            let bad = tree.rational_checks(square);
            if !bad.is_empty() {
                tree.reject("rational", &labels, bad);
                continue;
            }
            match square {
                AdjointSquare::Known(0) | AdjointSquare::AssumedZero => tree.rational_zero_square(&labels)?,
                _ => tree.rational_positive_square(&labels)?,
            }
        }
    }
    let mut out = tree.out;
    out.outcomes.sort_by(|a, b| (a.case, &a.assumptions).cmp(&(b.case, &b.assumptions)));
    out.outcomes.dedup_by(|a, b| a.case == b.case && a.assumptions == b.assumptions);
    if out.outcomes.is_empty() && out.rejections.is_empty() {
        return Err(Error::Identity("empty classification without a reason".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(d: i64, g: i64, q: i64) -> InvariantRecord {
        // Linearly normal sections: n = d - g + 1.
        InvariantRecord::new(d, d - g + 1 - q + q, g, q)
    }

    #[test]
    fn v4_is_found() {
        let c = classify(&rec(16, 3, 0)).unwrap();
        assert!(c.cases().any(|c| *c == Case::Class1V4 { b: 0 }));
        assert!(c.outcomes.iter().all(|o| o.verified != Some(false)));
    }

    #[test]
    fn plane7_is_found() {
        let c = classify(&rec(45, 15, 0)).unwrap();
        assert!(c.cases().any(|c| *c == Case::Class3Plane7 { s: 0, t: 4 }));
    }

    #[test]
    fn v3_is_found() {
        let c = classify(&rec(9, 1, 0)).unwrap();
        assert!(c.cases().any(|c| *c == Case::VeroneseV3));
    }

    #[test]
    fn v2_and_scrolls() {
        let c = classify(&InvariantRecord::new(4, 5, 0, 0)).unwrap();
        assert!(c.cases().any(|c| *c == Case::VeroneseV2));
        let c = classify(&InvariantRecord::new(3, 4, 0, 0)).unwrap();
        let cases: Vec<_> = c.cases().copied().collect();
        assert_eq!(
            cases,
            vec![
                Case::Scroll { q: 0, cone: false, e: Some(1) },
                Case::Scroll { q: 0, cone: true, e: Some(3) }
            ]
        );
    }

    #[test]
    fn trigonal_genus_four() {
        let found = solve_class1(18, 4).unwrap();
        let tri: Vec<_> = found
            .iter()
            .filter_map(|o| match o.case {
                Case::Class1Trigonal { e, h } => Some((e, h)),
                _ => None,
            })
            .collect();
        assert_eq!(tri, vec![(0, 1), (2, 2)]);
    }

    #[test]
    fn tetragonal_example() {
        let found = solve_class3(40, 12).unwrap();
        assert!(found.iter().any(|o| o.case == Case::Class3Tetragonal { e: 0, h: 1, s: 0, t: 0 }));
        assert!(found.iter().all(|o| o.verified == Some(true)));
    }

    #[test]
    fn irregular_small_case_rejected() {
        let c = classify(&InvariantRecord::new(5, 3, 3, 1).with_k2(-1)).unwrap();
        assert!(!c.is_feasible());
        assert!(c.rejected_by("npp.g_minus_q_ge_3"));
    }

    #[test]
    fn witness_on_unsupported_model() {
        let m = SurfaceModel::BlowupOfPlane { points: 1, curvilinear: false };
        let w = Witness::new(DivisorClass::from_i64(m, &[3, -1]).unwrap(), 0, 0);
        assert_eq!(verify_witness(&w, 8, 1), Err(Error::UnsupportedModel));
    }

    #[test]
    fn closure_of_v4() {
        let o = ClassificationOutcome::with_witness(Case::Class1V4 { b: 0 }, 16, 3, families::v4(0)).unwrap();
        let all = internal_projection_closure(&o, 11).unwrap();
        assert_eq!(all.len(), 12);
        assert!(all.iter().all(|o| o.verified == Some(true)));
        assert_eq!(all[11].case, Case::Class1V4 { b: 11 });
        assert_eq!(all[11].d, 5);
    }
}
