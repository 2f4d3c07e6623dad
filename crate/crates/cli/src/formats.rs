//! JSON shapes for the core types. The core crate stays serde-free; every
//! conversion lives here. Field order in each struct is the output order.

use std::collections::BTreeMap;
use std::str::FromStr;

use adjsurf_core::adjoint::{ConstraintCheck, InvariantRecord, RecordFlags, Status};
use adjsurf_core::classify::{Classification, ClassificationOutcome, Rejection, Witness, WitnessVerdict};
use adjsurf_core::connectedness::{ConfiguredDivisor, DecompositionReport};
use adjsurf_core::lattice::{DivisorClass, Nefness, SurfaceModel};
use adjsurf_core::{Error, Mismatch};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Number;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelDto {
    ProjectivePlane,
    Hirzebruch { e: u32 },
    BlowupOfPlane {
        points: u32,
        #[serde(default)]
        curvilinear: bool,
    },
    BlownUpHirzebruch { e: u32, points: u32 },
    NumericallyRuled { q: u32, e: i64 },
}

impl From<SurfaceModel> for ModelDto {
    fn from(m: SurfaceModel) -> Self {
        match m {
            SurfaceModel::ProjectivePlane => ModelDto::ProjectivePlane,
            SurfaceModel::Hirzebruch { e } => ModelDto::Hirzebruch { e },
            SurfaceModel::BlowupOfPlane { points, curvilinear } => ModelDto::BlowupOfPlane { points, curvilinear },
            SurfaceModel::BlownUpHirzebruch { e, points } => ModelDto::BlownUpHirzebruch { e, points },
            SurfaceModel::NumericallyRuled { q, e } => ModelDto::NumericallyRuled { q, e },
        }
    }
}

impl TryFrom<ModelDto> for SurfaceModel {
    type Error = Error;

    fn try_from(m: ModelDto) -> Result<Self, Error> {
        let model = match m {
            ModelDto::ProjectivePlane => SurfaceModel::ProjectivePlane,
            ModelDto::Hirzebruch { e } => SurfaceModel::Hirzebruch { e },
            ModelDto::BlowupOfPlane { points, curvilinear } => SurfaceModel::BlowupOfPlane { points, curvilinear },
            ModelDto::BlownUpHirzebruch { e, points } => SurfaceModel::BlownUpHirzebruch { e, points },
            ModelDto::NumericallyRuled { q, e } => SurfaceModel::NumericallyRuled { q, e },
        };
        model.validate()?;
        Ok(model)
    }
}

/// Integers of any size, written as bare JSON numbers.
fn big_to_number(v: &BigInt) -> Number {
    Number::from_str(&v.to_string()).expect("an integer is a JSON number")
}

fn number_to_big(n: &Number) -> Result<BigInt, Error> {
    BigInt::from_str(&n.to_string()).map_err(|_| Error::InvalidInput(format!("{n} is not an integer")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorDto {
    pub model: ModelDto,
    pub coeffs: Vec<Number>,
}

impl From<&DivisorClass> for DivisorDto {
    fn from(d: &DivisorClass) -> Self {
        DivisorDto { model: d.model().into(), coeffs: d.coeffs().iter().map(big_to_number).collect() }
    }
}

impl TryFrom<&DivisorDto> for DivisorClass {
    type Error = Error;

    fn try_from(d: &DivisorDto) -> Result<Self, Error> {
        let coeffs = d.coeffs.iter().map(number_to_big).collect::<Result<Vec<_>, _>>()?;
        DivisorClass::new(d.model.try_into()?, coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsDto {
    pub linearly_normal_surface: bool,
    pub linearly_normal_hyperplane_sections: bool,
    pub d_ge_2g_minus_1: bool,
    pub rational: bool,
    pub minimal_desingularization: bool,
}

impl From<RecordFlags> for FlagsDto {
    fn from(f: RecordFlags) -> Self {
        FlagsDto {
            linearly_normal_surface: f.linearly_normal_surface,
            linearly_normal_hyperplane_sections: f.linearly_normal_hyperplane_sections,
            d_ge_2g_minus_1: f.d_ge_2g_minus_1,
            rational: f.rational,
            minimal_desingularization: f.minimal_desingularization,
        }
    }
}

impl From<FlagsDto> for RecordFlags {
    fn from(f: FlagsDto) -> Self {
        RecordFlags {
            linearly_normal_surface: f.linearly_normal_surface,
            linearly_normal_hyperplane_sections: f.linearly_normal_hyperplane_sections,
            d_ge_2g_minus_1: f.d_ge_2g_minus_1,
            rational: f.rational,
            minimal_desingularization: f.minimal_desingularization,
        }
    }
}

pub const FLAG_NAMES: [&str; 5] = [
    "linearly_normal_surface",
    "linearly_normal_hyperplane_sections",
    "d_ge_2g_minus_1",
    "rational",
    "minimal_desingularization",
];

/// Parses a comma-separated list of flag names; the result has exactly
/// those flags set.
pub fn parse_flags(list: &str) -> Result<RecordFlags, Error> {
    let mut f = RecordFlags::default();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "linearly_normal_surface" => f.linearly_normal_surface = true,
            "linearly_normal_hyperplane_sections" => f.linearly_normal_hyperplane_sections = true,
            "d_ge_2g_minus_1" => f.d_ge_2g_minus_1 = true,
            "rational" => f.rational = true,
            "minimal_desingularization" => f.minimal_desingularization = true,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown flag {other:?}; expected one of {}",
                    FLAG_NAMES.join(", ")
                )))
            }
        }
    }
    Ok(f)
}

/// Missing `flags` means the standing hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordDto {
    pub d: i64,
    pub n: i64,
    pub g: i64,
    pub q: i64,
    #[serde(default)]
    pub k2: Option<i64>,
    #[serde(default)]
    pub h1_h: Option<i64>,
    #[serde(default)]
    pub mu: Option<i64>,
    #[serde(default)]
    pub flags: Option<FlagsDto>,
}

impl From<&InvariantRecord> for RecordDto {
    fn from(r: &InvariantRecord) -> Self {
        RecordDto {
            d: r.d,
            n: r.n,
            g: r.g,
            q: r.q,
            k2: r.k2,
            h1_h: r.h1_h,
            mu: r.mu,
            flags: Some(r.flags.into()),
        }
    }
}

impl From<RecordDto> for InvariantRecord {
    fn from(r: RecordDto) -> Self {
        let mut rec = InvariantRecord::new(r.d, r.n, r.g, r.q);
        rec.k2 = r.k2;
        rec.h1_h = r.h1_h;
        rec.mu = r.mu;
        if let Some(f) = r.flags {
            rec.flags = f.into();
        }
        rec
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfiguredDivisorDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub mults: Vec<u32>,
    pub gram: Vec<Vec<i64>>,
    pub kdeg: Vec<i64>,
}

impl TryFrom<ConfiguredDivisorDto> for ConfiguredDivisor {
    type Error = Error;

    fn try_from(c: ConfiguredDivisorDto) -> Result<Self, Error> {
        match c.labels {
            Some(labels) => ConfiguredDivisor::with_labels(labels, c.mults, c.gram, c.kdeg),
            None => ConfiguredDivisor::new(c.mults, c.gram, c.kdeg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessDto {
    pub divisor: DivisorDto,
    pub double_points: u32,
    pub simple_points: u32,
}

impl From<&Witness> for WitnessDto {
    fn from(w: &Witness) -> Self {
        WitnessDto {
            divisor: (&w.h).into(),
            double_points: w.double_points,
            simple_points: w.simple_points,
        }
    }
}

/// Input of `verify`: a witness with the invariants it should have.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyRequestDto {
    pub divisor: DivisorDto,
    #[serde(default)]
    pub double_points: u32,
    #[serde(default)]
    pub simple_points: u32,
    pub expected_d: i64,
    pub expected_g: i64,
}

fn nefness_str(n: Nefness) -> &'static str {
    match n {
        Nefness::Nef => "nef",
        Nefness::NotNef => "not_nef",
        Nefness::Unknown => "unknown",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictDto {
    pub ok: bool,
    pub matches: bool,
    pub d: i64,
    pub g: i64,
    pub n: i64,
    pub k2: i64,
    pub adjoint_square: i64,
    pub nef: &'static str,
    pub contracts_negative_section: bool,
    pub warnings: Vec<String>,
}

impl From<&WitnessVerdict> for VerdictDto {
    fn from(v: &WitnessVerdict) -> Self {
        VerdictDto {
            ok: v.ok,
            matches: v.matches,
            d: v.d,
            g: v.g,
            n: v.n,
            k2: v.k2,
            adjoint_square: v.adjoint_square,
            nef: nefness_str(v.nef),
            contracts_negative_section: v.contracts_negative_section,
            warnings: v.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDto {
    pub case: &'static str,
    pub params: BTreeMap<String, String>,
    pub d: i64,
    pub g: i64,
    pub verified: Option<bool>,
    pub witness: Option<WitnessDto>,
    pub assumptions: Vec<&'static str>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

/// `k=v;k=v` into a map.
pub fn params_map(params: &str) -> BTreeMap<String, String> {
    params
        .split(';')
        .filter(|p| !p.is_empty())
        .filter_map(|p| p.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

impl From<&ClassificationOutcome> for OutcomeDto {
    fn from(o: &ClassificationOutcome) -> Self {
        OutcomeDto {
            case: o.case.name(),
            params: params_map(&o.case.params()),
            d: o.d,
            g: o.g,
            verified: o.verified,
            witness: o.witness.as_ref().map(Into::into),
            assumptions: o.assumptions.iter().map(|a| a.label()).collect(),
            notes: o.notes.clone(),
            warnings: o.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckDto {
    pub id: &'static str,
    pub status: &'static str,
    pub detail: String,
}

impl From<&ConstraintCheck> for CheckDto {
    fn from(c: &ConstraintCheck) -> Self {
        let status = match c.status {
            Status::Satisfied => "satisfied",
            Status::Violated => "violated",
            Status::NotApplicable => "not_applicable",
        };
        CheckDto { id: c.id, status, detail: c.detail.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectionDto {
    pub branch: &'static str,
    pub assumptions: Vec<&'static str>,
    pub reasons: Vec<CheckDto>,
}

impl From<&Rejection> for RejectionDto {
    fn from(r: &Rejection) -> Self {
        RejectionDto {
            branch: r.branch,
            assumptions: r.assumptions.iter().map(|a| a.label()).collect(),
            reasons: r.reasons.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationDto {
    pub record: RecordDto,
    pub feasible: bool,
    pub outcomes: Vec<OutcomeDto>,
    pub rejections: Vec<RejectionDto>,
}

impl ClassificationDto {
    pub fn new(rec: &InvariantRecord, c: &Classification) -> Self {
        ClassificationDto {
            record: rec.into(),
            feasible: c.is_feasible(),
            outcomes: c.outcomes.iter().map(Into::into).collect(),
            rejections: c.rejections.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MismatchDto {
    pub id: &'static str,
    pub detail: String,
}

impl From<&Mismatch> for MismatchDto {
    fn from(m: &Mismatch) -> Self {
        MismatchDto { id: m.id, detail: m.detail.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorDto {
    pub error: String,
    pub mismatches: Vec<MismatchDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectednessDto {
    /// `null` when the divisor has no split.
    pub min_value: Option<Number>,
    pub connectedness_level: Option<Number>,
    pub witness: Option<[Vec<u32>; 2]>,
    pub splits_examined: u64,
    pub self_intersection: Number,
    pub k_degree: Number,
    pub minus_one_divisor: bool,
    pub m_connected: Option<MConnectedDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MConnectedDto {
    pub m: i64,
    pub holds: bool,
}

fn wide(v: i128) -> Number {
    big_to_number(&BigInt::from(v))
}

impl ConnectednessDto {
    pub fn new(
        r: &DecompositionReport,
        self_intersection: i128,
        k_degree: i128,
        minus_one_divisor: bool,
        m: Option<i64>,
    ) -> Self {
        ConnectednessDto {
            min_value: r.min_value.map(wide),
            connectedness_level: r.min_value.map(wide),
            witness: r.witness.clone().map(|(a, b)| [a, b]),
            splits_examined: r.splits_examined,
            self_intersection: wide(self_intersection),
            k_degree: wide(k_degree),
            minus_one_divisor,
            m_connected: m.map(|m| MConnectedDto { m, holds: r.is_m_connected(i128::from(m)) }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuantityDto {
    pub name: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExampleReportDto {
    pub example: String,
    pub pass: bool,
    pub quantities: Vec<QuantityDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReportDto {
    pub d: i64,
    pub g: i64,
    pub outcomes: Vec<OutcomeDto>,
}

pub const TSV_HEADER: &str = "case\tparams\td\tg\tverified";

/// One TSV row; `verified` is `-` when there is no witness.
pub fn tsv_row(case: &str, params: &str, d: i64, g: i64, verified: Option<bool>) -> String {
    let v = match verified {
        Some(true) => "true",
        Some(false) => "false",
        None => "-",
    };
    format!("{case}\t{params}\t{d}\t{g}\t{v}")
}

pub fn outcomes_tsv<'a>(outcomes: impl IntoIterator<Item = &'a ClassificationOutcome>) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for o in outcomes {
        out.push_str(&tsv_row(o.case.name(), &o.case.params(), o.d, o.g, o.verified));
        out.push('\n');
    }
    out
}
