//! The `adjsurf` command line. Every subcommand returns its full output and
//! an exit code; `main` only prints.
//!
//! Exit codes: 0 when the answer is positive (feasible record, verified
//! witness, all example quantities reproduced), 2 when it is negative, 1 on
//! bad input.

pub mod formats;

use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use adjsurf_core::adjoint::{adjoint_profile, InvariantRecord};
use adjsurf_core::classify::{
    classify, internal_projection_closure, solve_class1, solve_class2, solve_class3, families,
    verify_witness, ClassificationOutcome, Witness,
};
use adjsurf_core::cohomology::{
    check_linear_normality_mu_cone, elliptic_ruled_e1, elliptic_ruled_split_det0,
    mu_cone_invariants,
};
use adjsurf_core::connectedness::{
    analyze_decompositions, is_minus_one_divisor, ConfiguredDivisor, DEFAULT_BUDGET,
};
use adjsurf_core::lattice::{arithmetic_genus, canonical_class, self_intersection, DivisorClass};
use adjsurf_core::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use formats::{
    outcomes_tsv, tsv_row, ClassificationDto, ConfiguredDivisorDto, ConnectednessDto, ErrorDto,
    ExampleReportDto, MismatchDto, OutcomeDto, QuantityDto, RecordDto, VerdictDto,
    VerifyRequestDto, WitnessReportDto, TSV_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

/// Hard cap on `enumerate` output.
pub const MAX_ROWS: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "adjsurf", version, about = "Classify and check polarized surfaces with d >= 2g - 1")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Class1,
    Class2,
    Class3,
    Scrolls,
    MuCones,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolvedFamily {
    Class1,
    Class2,
    Class3,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    EllRuledE1,
    EllRuledDet0Dec,
    MuCone,
    VeroneseV4,
    VeroneseV9Boundary,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the case tree on an invariant record.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        g: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        k2: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<i64>,
        #[arg(long = "h1", allow_hyphen_values = true)]
        h1_h: Option<i64>,
        /// Comma-separated flags, replacing the standing hypotheses
        /// (linearly_normal_surface, d_ge_2g_minus_1, minimal_desingularization).
        #[arg(long)]
        flags: Option<String>,
        /// Read the record from a JSON file instead of the flags above.
        #[arg(long, conflicts_with_all = ["d", "n", "g", "q", "k2", "mu", "h1_h", "flags"])]
        json: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// List verified family members over a grid, as TSV.
    Enumerate {
        #[arg(long, value_enum)]
        family: Family,
        /// Sectional genus range, `a..b` (inclusive) or a single value.
        #[arg(long)]
        g: Option<String>,
        /// Degree range; defaults to `max(3, 2g - 1)..4g + 12` per genus, or
        /// `2..20` for scrolls.
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        e: Option<String>,
        #[arg(long)]
        mu: Option<String>,
    },
    /// Family witnesses with given (d, g), optionally with their internal
    /// projections.
    Witness {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        g: i64,
        #[arg(long, value_enum, default_value = "all")]
        family: SolvedFamily,
        /// Also list the projections from up to this many further points.
        #[arg(long, default_value_t = 0)]
        max_t: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Recompute (d, g) of a witness read from JSON and compare.
    Verify {
        #[arg(long)]
        json: PathBuf,
    },
    /// Exhaustive split analysis of a configured divisor read from JSON.
    CheckConnected {
        #[arg(long)]
        json: PathBuf,
        /// Also report whether the divisor is m-connected.
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        #[arg(long, env = "ADJSURF_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Recompute a worked example and compare each quantity.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 3)]
        g: u32,
        #[arg(long, default_value_t = 1)]
        q: u32,
        #[arg(long, default_value_t = 3)]
        e: i64,
        #[arg(long, default_value_t = 3)]
        mu: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// The JSON error report printed on exit code 1.
    pub fn report(&self) -> String {
        let mismatches = match self {
            CliError::Core(Error::Inconsistent(ms)) => ms.iter().map(MismatchDto::from).collect(),
            _ => Vec::new(),
        };
        to_json(&ErrorDto { error: self.to_string(), mismatches })
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("DTOs serialize");
    s.push('\n');
    s
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.clone(), source })
}

/// `a..b`, `a..=b` or `a`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>, CliError> {
    let bad = || CliError::Usage(format!("bad range {s:?}; expected a..b or a single integer"));
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let a = parse(s)?;
            Ok(a..=a)
        }
    }
}

fn range_or(arg: &Option<String>, default: RangeInclusive<i64>) -> Result<RangeInclusive<i64>, CliError> {
    arg.as_deref().map(parse_range).transpose().map(|r| r.unwrap_or(default))
}

pub fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Classify { d, n, g, q, k2, mu, h1_h, flags, json, format } => {
            let rec = match json {
                Some(path) => InvariantRecord::from(read_json::<RecordDto>(&path)?),
                None => {
                    let need = |v: Option<i64>, name: &str| {
                        v.ok_or_else(|| CliError::Usage(format!("--{name} is required without --json")))
                    };
                    let mut rec = InvariantRecord::new(need(d, "d")?, need(n, "n")?, need(g, "g")?, need(q, "q")?);
                    rec.k2 = k2;
                    rec.mu = mu;
                    rec.h1_h = h1_h;
                    if let Some(f) = flags {
                        rec.flags = formats::parse_flags(&f)?;
                    }
                    rec
                }
            };
            run_classify(&rec, format)
        }
        Command::Enumerate { family, g, d, q, e, mu } => run_enumerate(family, &g, &d, &q, &e, &mu),
        Command::Witness { d, g, family, max_t, format } => run_witness(d, g, family, max_t, format),
        Command::Verify { json } => run_verify(&read_json(&json)?),
        Command::CheckConnected { json, m, budget } => {
            let dto: ConfiguredDivisorDto = read_json(&json)?;
            run_check_connected(dto.try_into()?, m, budget)
        }
        Command::Example { name, k, g, q, e, mu } => run_example(name, k, g, q, e, mu),
    }
}

pub fn run_classify(rec: &InvariantRecord, format: Format) -> Result<Output, CliError> {
    let c = classify(rec)?;
    // A record that contradicts the identities is an input error.
    if let Some(r) = c.rejections.iter().find(|r| r.branch == "record") {
        let mismatches = r
            .reasons
            .iter()
            .map(|c| adjsurf_core::Mismatch { id: c.id, detail: c.detail.clone() })
            .collect();
        return Err(Error::Inconsistent(mismatches).into());
    }
    let text = match format {
        Format::Json => to_json(&ClassificationDto::new(rec, &c)),
        Format::Tsv => outcomes_tsv(&c.outcomes),
    };
    Ok(Output { text, code: if c.is_feasible() { EXIT_OK } else { EXIT_NEGATIVE } })
}

struct Rows {
    text: String,
    count: usize,
}

impl Rows {
    fn new() -> Self {
        let mut text = String::from(TSV_HEADER);
        text.push('\n');
        Rows { text, count: 0 }
    }

    fn push(&mut self, case: &str, params: &str, d: i64, g: i64, verified: bool) -> Result<(), CliError> {
        if !verified {
            return Err(CliError::Core(Error::Identity(format!(
                "{case} {params} at (d, g) = ({d}, {g}) failed verification"
            ))));
        }
        self.count += 1;
        if self.count > MAX_ROWS {
            return Err(CliError::Usage(format!("more than {MAX_ROWS} rows; narrow the ranges")));
        }
        self.text.push_str(&tsv_row(case, params, d, g, Some(true)));
        self.text.push('\n');
        Ok(())
    }

    fn push_outcome(&mut self, o: &ClassificationOutcome) -> Result<(), CliError> {
        self.push(o.case.name(), &o.case.params(), o.d, o.g, o.verified == Some(true))
    }
}

pub fn run_enumerate(
    family: Family,
    g: &Option<String>,
    d: &Option<String>,
    q: &Option<String>,
    e: &Option<String>,
    mu: &Option<String>,
) -> Result<Output, CliError> {
    let mut rows = Rows::new();
    match family {
        Family::Class1 | Family::Class2 | Family::Class3 => {
            let solve = match family {
                Family::Class1 => solve_class1,
                Family::Class2 => solve_class2,
                _ => solve_class3,
            };
            for g in range_or(g, 1..=20)? {
                let default = (2 * g - 1).max(3)..=(4 * g + 12);
                let ds = range_or(d, default)?;
                // The solvers assume d >= 2g - 1.
                for d in ds.filter(|&d| d >= 2 * g - 1) {
                    for o in solve(d, g)? {
                        rows.push_outcome(&o)?;
                    }
                }
            }
        }
        Family::Scrolls => {
            for d in range_or(d, 2..=20)?.filter(|&d| d >= 2) {
                for e in range_or(e, 0..=d)?.filter(|&e| (0..=d).contains(&e) && (d + e) % 2 == 0) {
                    let w = families::rational_scroll(d, e as u32)?;
                    let v = verify_witness(&w, d, 0)?;
                    let params = format!("q=0;cone={};e={e}", e == d);
                    rows.push("Scroll", &params, d, 0, v.ok)?;
                }
            }
        }
        Family::MuCones => {
            for q in range_or(q, 1..=3)?.filter(|&q| q >= 1) {
                let es = range_or(e, (2 * q - 1)..=(2 * q + 8))?;
                for e in es.filter(|&e| e > 2 * q - 2) {
                    for mu in range_or(mu, 2..=5)?.filter(|&m| m >= 1) {
                        let inv = mu_cone_invariants(q as u32, e, mu as u32)?;
                        let params = format!("q={q};e={e};mu={mu};h0={}", inv.h0_surface);
                        let ok = check_linear_normality_mu_cone(&inv);
                        rows.push("MuCone", &params, inv.d, inv.g, ok)?;
                    }
                }
            }
        }
    }
    Ok(Output { text: rows.text, code: EXIT_OK })
}

pub fn run_witness(d: i64, g: i64, family: SolvedFamily, max_t: u32, format: Format) -> Result<Output, CliError> {
    let mut found = Vec::new();
    if matches!(family, SolvedFamily::Class1 | SolvedFamily::All) {
        found.extend(solve_class1(d, g)?);
    }
    if matches!(family, SolvedFamily::Class2 | SolvedFamily::All) {
        found.extend(solve_class2(d, g)?);
    }
    if matches!(family, SolvedFamily::Class3 | SolvedFamily::All) {
        found.extend(solve_class3(d, g)?);
    }
    let mut all = Vec::new();
    for o in &found {
        if max_t == 0 {
            all.push(o.clone());
        } else {
            all.extend(internal_projection_closure(o, max_t)?);
        }
    }
    let ok = !all.is_empty() && all.iter().all(|o| o.verified == Some(true));
    let text = match format {
        Format::Json => to_json(&WitnessReportDto { d, g, outcomes: all.iter().map(OutcomeDto::from).collect() }),
        Format::Tsv => outcomes_tsv(&all),
    };
    Ok(Output { text, code: if ok { EXIT_OK } else { EXIT_NEGATIVE } })
}

pub fn run_verify(req: &VerifyRequestDto) -> Result<Output, CliError> {
    let h = DivisorClass::try_from(&req.divisor)?;
    let w = Witness::new(h, req.double_points, req.simple_points);
    let v = verify_witness(&w, req.expected_d, req.expected_g)?;
    Ok(Output { text: to_json(&VerdictDto::from(&v)), code: if v.ok { EXIT_OK } else { EXIT_NEGATIVE } })
}

pub fn run_check_connected(d: ConfiguredDivisor, m: Option<i64>, budget: u64) -> Result<Output, CliError> {
    let r = analyze_decompositions(&d, budget)?;
    let minus_one = is_minus_one_divisor(&d, budget)?;
    let dto = ConnectednessDto::new(&r, d.self_intersection()?, d.k_dot()?, minus_one, m);
    let code = match &dto.m_connected {
        Some(mc) if !mc.holds => EXIT_NEGATIVE,
        _ => EXIT_OK,
    };
    Ok(Output { text: to_json(&dto), code })
}

struct Report(Vec<QuantityDto>);

impl Report {
    fn add(&mut self, name: &str, computed: impl ToString, expected: impl ToString) {
        let (computed, expected) = (computed.to_string(), expected.to_string());
        let pass = computed == expected;
        self.0.push(QuantityDto { name: name.to_string(), computed, expected, pass });
    }
}

pub fn run_example(name: ExampleName, k: u32, g: u32, q: u32, e: i64, mu: u32) -> Result<Output, CliError> {
    let mut r = Report(Vec::new());
    let label = match name {
        ExampleName::EllRuledE1 => {
            let ex = elliptic_ruled_e1(k)?;
            let k = i64::from(k);
            r.add("d", ex.d, k * k);
            r.add("g", ex.g, k * (k - 1) / 2 + 1);
            r.add("h0", ex.h0, 1 + k * (k + 1) / 2);
            r.add("h1", ex.h1, 1);
            r.add("H.C0", ex.h_dot_section, 0);
            r.add("(K+H).C0", ex.adjoint_degree_on_section, 1);
            r.add("p_a(C0)", ex.section_genus, 1);
            r.add("variant h0", ex.variant_h0, k * (k + 1) / 2);
            r.add("variant h1", ex.variant_h1, 0);
            format!("ell-ruled-e1 k={k}")
        }
        ExampleName::EllRuledDet0Dec => {
            let ex = elliptic_ruled_split_det0(g)?;
            let g = i64::from(g);
            r.add("dim |H|", ex.dimension, g);
            r.add("d", ex.d, 2 * g - 2);
            r.add("g", ex.sectional_genus, g);
            r.add("C0'^2", ex.section_squares[0], -1);
            r.add("Ce'^2", ex.section_squares[1], -1);
            r.add("H'.C0'", ex.h_dot_sections[0], 0);
            r.add("H'.Ce'", ex.h_dot_sections[1], 0);
            format!("ell-ruled-det0-dec g={g}")
        }
        ExampleName::MuCone => {
            let inv = mu_cone_invariants(q, e, mu)?;
            let (qi, m) = (i64::from(q), i64::from(mu));
            r.add("d", inv.d, e * m * m);
            r.add("2g-2", 2 * inv.g - 2, m * (2 * (qi - 1) + (m - 1) * e));
            r.add("h0", inv.h0_surface, 1 + m * (m + 1) * e / 2 + m * (1 - qi));
            r.add("linearly normal", check_linear_normality_mu_cone(&inv), true);
            r.add("d > 2g-2", inv.d > 2 * inv.g - 2, true);
            format!("mu-cone q={q} e={e} mu={mu}")
        }
        ExampleName::VeroneseV4 => {
            let w = families::v4(0);
            let v = verify_witness(&w, 16, 3)?;
            r.add("d", v.d, 16);
            r.add("g", v.g, 3);
            r.add("n", v.n, 14);
            r.add("(K+H)^2", v.adjoint_square, 1);
            let adj = canonical_class(w.model()).checked_add(&w.h)?;
            r.add("p_a(K+H)", arithmetic_genus(&adj)?, 0);
            let c = classify(&InvariantRecord::new(16, 14, 3, 0).with_k2(9))?;
            let cases: Vec<String> = c.outcomes.iter().map(|o| o.case.name().to_string()).collect();
            r.add("classify", cases.join(","), "Class1_V4");
            "veronese-v4".to_string()
        }
        ExampleName::VeroneseV9Boundary => {
            let w = Witness::plane(9, 0, 0);
            let v = verify_witness(&w, 81, 28)?;
            r.add("d", v.d, 81);
            r.add("g", v.g, 28);
            let p = adjoint_profile(&InvariantRecord::new(81, 54, 28, 0), 3)?;
            r.add("(3K+H).H", p.deg_vs_h, 0);
            r.add("|3K+H| forced empty", p.empty_forced, false);
            let tri = canonical_class(w.model()).scaled(&3.into()).checked_add(&w.h)?;
            r.add("(3K+H)^2", self_intersection(&tri), 0);
            "veronese-v9-boundary".to_string()
        }
    };
    let pass = r.0.iter().all(|q| q.pass);
    let dto = ExampleReportDto { example: label, pass, quantities: r.0 };
    Ok(Output { text: to_json(&dto), code: if pass { EXIT_OK } else { EXIT_NEGATIVE } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..20").unwrap(), 3..=20);
        assert_eq!(parse_range("3..=20").unwrap(), 3..=20);
        assert_eq!(parse_range("-2..1").unwrap(), -2..=1);
        assert_eq!(parse_range("7").unwrap(), 7..=7);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }
}
