//! Numerical calculus of the adjoint systems `|mK + H|` on a minimal
//! desingularization `S'` of a surface `S ⊂ P^n` with hyperplane class `H`.
//!
//! Records hold `d = H^2`, `n`, the sectional genus `g`, the irregularity
//! `q` and, optionally, `K^2`, `h^1(H)` and `μ = H.G` for the ruling `G`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Mismatch, Result};

/// Largest magnitude accepted for a record scalar. Derived quantities are
/// products of at most two scalars and small constants, so `i128` never
/// overflows.
pub const MAX_SCALAR: i64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RecordFlags {
    pub linearly_normal_surface: bool,
    pub linearly_normal_hyperplane_sections: bool,
    pub d_ge_2g_minus_1: bool,
    pub rational: bool,
    pub minimal_desingularization: bool,
}

impl RecordFlags {
    /// The standing hypotheses: `S` linearly normal and `d >= 2g - 1`.
    pub fn standing() -> Self {
        RecordFlags {
            linearly_normal_surface: true,
            d_ge_2g_minus_1: true,
            minimal_desingularization: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InvariantRecord {
    pub d: i64,
    pub n: i64,
    pub g: i64,
    pub q: i64,
    pub k2: Option<i64>,
    pub h1_h: Option<i64>,
    pub mu: Option<i64>,
    pub flags: RecordFlags,
}

impl InvariantRecord {
    /// A record under the standing hypotheses with no optional data.
    pub fn new(d: i64, n: i64, g: i64, q: i64) -> Self {
        InvariantRecord { d, n, g, q, k2: None, h1_h: None, mu: None, flags: RecordFlags::standing() }
    }

    pub fn with_k2(mut self, k2: i64) -> Self {
        self.k2 = Some(k2);
        self
    }

    pub fn with_mu(mut self, mu: i64) -> Self {
        self.mu = Some(mu);
        self
    }

    /// `a = d - n`.
    pub fn a(&self) -> i64 {
        self.d - self.n
    }

    /// `K.H = 2g - 2 - d`.
    pub fn k_dot_h(&self) -> i64 {
        2 * self.g - 2 - self.d
    }

    /// `(K + H)^2 = K^2 + 4g - 4 - d`.
    pub fn adjoint_square(&self) -> Option<i64> {
        self.k2.map(|k2| k2 + 4 * self.g - 4 - self.d)
    }

    /// `p_a(K + H) = K^2 + 3g - 3 - d + 1`.
    pub fn adjoint_genus(&self) -> Option<i64> {
        self.k2.map(|k2| k2 + 3 * self.g - 3 - self.d + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let scalars = [Some(self.d), Some(self.n), Some(self.g), Some(self.q), self.k2, self.h1_h, self.mu];
        if scalars.iter().flatten().any(|v| v.abs() > MAX_SCALAR) {
            return Err(Error::InvalidInput(format!("record scalars must lie within ±{MAX_SCALAR}")));
        }
        let mut bad = Vec::new();
        let mut check = |ok: bool, id: &'static str, detail: String| {
            if !ok {
                bad.push(Mismatch { id, detail });
            }
        };
        check(self.n >= 3, "record.n_ge_3", format!("n = {}", self.n));
        check(self.a() >= -1, "record.a_ge_minus_1", format!("a = d - n = {}", self.a()));
        check(self.g >= 0, "record.g_ge_0", format!("g = {}", self.g));
        check(
            0 <= self.q && self.q <= self.g,
            "record.q_between_0_and_g",
            format!("q = {}, g = {}", self.q, self.g),
        );
        if self.flags.d_ge_2g_minus_1 {
            check(
                self.d >= 2 * self.g - 1,
                "record.d_ge_2g_minus_1",
                format!("d = {}, 2g - 1 = {}", self.d, 2 * self.g - 1),
            );
        }
        if self.flags.rational {
            check(self.q == 0, "record.rational_has_q_0", format!("q = {}", self.q));
        }
        if let Some(mu) = self.mu {
            check(mu >= 1, "record.mu_positive", format!("mu = {mu}"));
        }
        if let Some(h1) = self.h1_h {
            check(h1 >= 0, "record.h1_nonnegative", format!("h1(H) = {h1}"));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Inconsistent(bad))
        }
    }

    fn require_standing(&self) -> Result<()> {
        if !self.flags.d_ge_2g_minus_1 || !self.flags.linearly_normal_surface {
            return Err(Error::Precondition(
                "needs the d >= 2g - 1 and linearly normal surface flags".into(),
            ));
        }
        self.validate()
    }
}

/// Consequences of `d >= 2g - 1` for a linearly normal `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QdReport {
    pub a: i64,
    pub k_dot_h: i64,
    /// `h^0(K + H) = g - q`.
    pub h0_adjoint: i64,
    /// `h^1(H) = g - a - 1 + q`, in `[0, q]`.
    pub h1_h: i64,
    /// `g = a + 1`, equivalently `h^1(H) = q`.
    pub sections_linearly_normal: bool,
    pub adjoint_square: Option<i64>,
    /// `K^2 - n + 3a`, an upper bound for `(K + H)^2`.
    pub adjoint_square_bound: Option<i64>,
    /// The bound is attained exactly when `g = a + 1`.
    pub bound_attained: bool,
}

pub fn qd_identities(rec: &InvariantRecord) -> Result<QdReport> {
    rec.require_standing()?;
    let a = rec.a();
    let h1_h = rec.g - a - 1 + rec.q;
    let mut bad = Vec::new();
    if h1_h < 0 {
        bad.push(Mismatch {
            id: "qd.g_ge_a_plus_1_minus_q",
            detail: format!("g = {} < a + 1 - q = {}", rec.g, a + 1 - rec.q),
        });
    }
    if h1_h > rec.q {
        bad.push(Mismatch {
            id: "qd.g_le_a_plus_1",
            detail: format!("g = {} > a + 1 = {}", rec.g, a + 1),
        });
    }
    if let Some(h) = rec.h1_h {
        if h != h1_h {
            bad.push(Mismatch {
                id: "qd.h1_h",
                detail: format!("h1(H) given as {h}, forced to {h1_h}"),
            });
        }
    }
    let sections_linearly_normal = rec.g == a + 1;
    if rec.flags.linearly_normal_hyperplane_sections && !sections_linearly_normal {
        bad.push(Mismatch {
            id: "qd.sections_linearly_normal",
            detail: format!("flag set but g = {} != a + 1 = {}", rec.g, a + 1),
        });
    }
    if !bad.is_empty() {
        return Err(Error::Inconsistent(bad));
    }
    let adjoint_square = rec.adjoint_square();
    let adjoint_square_bound = rec.k2.map(|k2| k2 - rec.n + 3 * a);
    if let (Some(s), Some(b)) = (adjoint_square, adjoint_square_bound) {
        // b - s = 4(a + 1 - g) >= 0 by the checks above.
        if b - s != 4 * (a + 1 - rec.g) {
            return Err(Error::Identity("(K+H)^2 bound".into()));
        }
    }
    Ok(QdReport {
        a,
        k_dot_h: rec.k_dot_h(),
        h0_adjoint: rec.g - rec.q,
        h1_h,
        sections_linearly_normal,
        adjoint_square,
        adjoint_square_bound,
        bound_attained: sections_linearly_normal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdjointProfile {
    pub m: u32,
    /// `(mK + H).H = m(2g - 2) - d(m - 1)`.
    pub deg_vs_h: i64,
    /// `(mK + H).H < 0` with `H` nef forces `|mK + H| = ∅`.
    pub empty_forced: bool,
    /// `d > 2m(g - 1)/(m - 1)`, for `m >= 2`.
    pub threshold_exceeded: Option<bool>,
    /// `(mK + H)^2`, when `K^2` is known.
    pub self_intersection: Option<i64>,
}

pub fn adjoint_profile(rec: &InvariantRecord, m: u32) -> Result<AdjointProfile> {
    rec.validate()?;
    let (mi, d, g) = (i128::from(m), i128::from(rec.d), i128::from(rec.g));
    let deg = mi * (2 * g - 2) - d * (mi - 1);
    // d > 2m(g-1)/(m-1) with m - 1 > 0, cross-multiplied.
    let threshold_exceeded = (m >= 2).then(|| d * (mi - 1) > 2 * mi * (g - 1));
    let self_intersection = rec.k2.map(|k2| {
        let k2 = i128::from(k2);
        mi * mi * k2 + 2 * mi * i128::from(rec.k_dot_h()) + d
    });
    let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow);
    Ok(AdjointProfile {
        m,
        deg_vs_h: narrow(deg)?,
        empty_forced: deg < 0,
        threshold_exceeded,
        self_intersection: self_intersection.map(narrow).transpose()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScrollBounds {
    pub lower: i64,
    pub upper: i64,
    pub valid: bool,
    /// `d = n + q - 1`: a cone over a curve of genus `q`.
    pub cone: bool,
}

/// Irregular scrolls (`q > 0`, `g = q`) satisfy `n + q - 1 <= d <= n + 2q - 1`.
pub fn check_scroll_bounds(rec: &InvariantRecord) -> Result<ScrollBounds> {
    rec.validate()?;
    if rec.q <= 0 || rec.g != rec.q {
        return Err(Error::Precondition("scroll bounds need q > 0 and g = q".into()));
    }
    let lower = rec.n + rec.q - 1;
    let upper = rec.n + 2 * rec.q - 1;
    Ok(ScrollBounds {
        lower,
        upper,
        valid: lower <= rec.d && rec.d <= upper,
        cone: rec.d == lower,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstAdjoint {
    pub adjoint_square: i64,
    pub adjoint_genus: i64,
    /// `h^0(2K + H)`: `p_a(K + H) - q` when `(K + H)^2 > 0`, and 0 when the
    /// adjoint system is composed with a pencil.
    pub h0_biadjoint: Option<i64>,
    /// `H^2 >= 10` and `(K + H)^2 > 0`: the adjoint map is birational.
    pub birational_guaranteed: bool,
    /// `q = 0`: `|K + H|` has no base points.
    pub base_point_free_guaranteed: bool,
}

pub fn first_adjoint_predicates(rec: &InvariantRecord) -> Result<FirstAdjoint> {
    rec.validate()?;
    if rec.g <= rec.q {
        return Err(Error::Precondition("first adjoint needs g > q".into()));
    }
    let (Some(s), Some(pa)) = (rec.adjoint_square(), rec.adjoint_genus()) else {
        return Err(Error::Precondition("first adjoint needs K^2".into()));
    };
    if s != rec.g - 2 + pa {
        return Err(Error::Identity("(K+H)^2 = g - 2 + p_a(K+H)".into()));
    }
    let h0_biadjoint = match s {
        s if s > 0 => Some(pa - rec.q),
        0 => Some(0),
        _ => None,
    };
    Ok(FirstAdjoint {
        adjoint_square: s,
        adjoint_genus: pa,
        h0_biadjoint,
        birational_guaranteed: s > 0 && rec.d >= 10,
        base_point_free_guaranteed: rec.q == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Satisfied,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintCheck {
    pub id: &'static str,
    pub status: Status,
    pub detail: String,
}

/// What is known or assumed about `(K + H)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdjointSquare {
    Known(i64),
    AssumedZero,
    AssumedPositive,
    Unknown,
}

impl AdjointSquare {
    pub fn of(rec: &InvariantRecord) -> Self {
        rec.adjoint_square().map_or(AdjointSquare::Unknown, AdjointSquare::Known)
    }

    fn is_zero(self) -> Option<bool> {
        match self {
            AdjointSquare::Known(v) => Some(v == 0),
            AdjointSquare::AssumedZero => Some(true),
            AdjointSquare::AssumedPositive => Some(false),
            AdjointSquare::Unknown => None,
        }
    }

    fn is_positive(self) -> Option<bool> {
        match self {
            AdjointSquare::Known(v) => Some(v > 0),
            AdjointSquare::AssumedZero => Some(false),
            AdjointSquare::AssumedPositive => Some(true),
            AdjointSquare::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub checks: Vec<ConstraintCheck>,
}

impl FeasibilityVerdict {
    pub fn violated(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| c.status == Status::Violated)
    }

    pub fn violates(&self, id: &str) -> bool {
        self.violated().any(|c| c.id == id)
    }
}

struct Checks(Vec<ConstraintCheck>);

impl Checks {
    fn add(&mut self, id: &'static str, applies: bool, holds: bool, detail: String) {
        let status = match (applies, holds) {
            (false, _) => Status::NotApplicable,
            (true, true) => Status::Satisfied,
            (true, false) => Status::Violated,
        };
        self.0.push(ConstraintCheck { id, status, detail });
    }
}

/// Necessary conditions for an irregular surface with non-empty adjoint
/// system (`q > 0`, `g > q`), given what is known about `(K + H)^2`.
pub fn irregular_constraints(rec: &InvariantRecord, square: AdjointSquare) -> Vec<ConstraintCheck> {
    let mut c = Checks(Vec::new());
    let (d, g, q) = (i128::from(rec.d), i128::from(rec.g), i128::from(rec.q));
    let mu = rec.mu.map(i128::from);
    let positive = square.is_positive();
    let zero = square.is_zero();

    if let Some(mu) = mu {
        c.add("irreg.mu_ge_2", true, mu >= 2, format!("mu = {mu}"));
        c.add(
            "riemann_hurwitz.g_minus_1_ge_mu_times_q_minus_1",
            true,
            g > mu * (q - 1),
            format!("g - 1 = {}, mu(q - 1) = {}", g - 1, mu * (q - 1)),
        );
        c.add(
            "hartshorne.d_le_2mu_over_mu_minus_1_times_g_minus_1",
            mu >= 2,
            d * (mu - 1) <= 2 * mu * (g - 1),
            format!("d(mu - 1) = {}, 2mu(g - 1) = {}", d * (mu - 1), 2 * mu * (g - 1)),
        );
        if let Some(z) = zero {
            c.add(
                "uno.mu_2_iff_adjoint_square_0",
                true,
                (mu == 2) == z,
                format!("mu = {mu}, (K+H)^2 = 0 is {z}"),
            );
        }
    }
    if let AdjointSquare::Known(s) = square {
        c.add("nef.adjoint_square_nonnegative", true, s >= 0, format!("(K+H)^2 = {s}"));
        c.add(
            "due.adjoint_square_ge_g_minus_2_plus_q",
            s > 0,
            i128::from(s) >= g - 2 + q,
            format!("(K+H)^2 = {s}, g - 2 + q = {}", g - 2 + q),
        );
    }
    if let Some(k2) = rec.k2 {
        c.add(
            "ruled.k2_le_8_minus_8q",
            true,
            i128::from(k2) <= 8 - 8 * q,
            format!("K^2 = {k2}, 8 - 8q = {}", 8 - 8 * q),
        );
    }
    c.add(
        "nef.d_le_4g_minus_8q_plus_4",
        true,
        d <= 4 * g - 8 * q + 4,
        format!("d = {d}, 4g - 8q + 4 = {}", 4 * g - 8 * q + 4),
    );
    let steep = d > 3 * g - 3;
    c.add(
        "prop_irr.mu_2_when_d_gt_3g_minus_3",
        steep && (mu.is_some() || positive.is_some()),
        mu.is_none_or(|m| m == 2) && positive != Some(true),
        format!("d = {d}, 3g - 3 = {}", 3 * g - 3),
    );
    c.add(
        "prop_irr.g_gt_8q_minus_7",
        steep,
        g > 8 * q - 7,
        format!("g = {g}, 8q - 7 = {}", 8 * q - 7),
    );
    let pos = positive == Some(true);
    c.add(
        "bounds.g_ge_9q_minus_7",
        pos,
        g >= 9 * q - 7,
        format!("g = {g}, 9q - 7 = {}", 9 * q - 7),
    );
    c.add("npp.g_minus_q_ge_3", pos, g - q >= 3, format!("g - q = {}", g - q));

    // Empty biadjoint: h^0(2K + H) = p_a(K + H) - q = 0.
    if let (AdjointSquare::Known(s), Some(pa)) = (square, rec.adjoint_genus()) {
        let empty = s > 0 && i128::from(pa) == q;
        c.add(
            "empty_biadjoint.mu_3_when_adjoint_square_ge_5",
            empty && s >= 5 && mu.is_some(),
            mu == Some(3),
            format!("(K+H)^2 = {s}, mu = {mu:?}"),
        );
        c.add(
            "empty_biadjoint.small_adjoint_square_exceptions",
            empty && s < 5,
            q == 1 && matches!((g, s), (5, 4) | (4, 3)),
            format!("q = {q}, g = {g}, (K+H)^2 = {s}"),
        );
        c.add(
            "bounds.equality_case",
            s > 0 && g == 9 * q - 7,
            d == 2 * g - 1 && i128::from(pa) == q && i128::from(rec.k2.unwrap_or(0)) == 8 - 8 * q,
            format!("g = 9q - 7 = {g}: d = {d}, p_a(K+H) = {pa}"),
        );
    }
    c.0
}

pub fn irregular_feasibility(rec: &InvariantRecord) -> Result<FeasibilityVerdict> {
    rec.validate()?;
    if rec.q <= 0 {
        return Err(Error::Precondition("irregular feasibility needs q > 0".into()));
    }
    if rec.g <= rec.q {
        return Err(Error::Precondition(
            "irregular feasibility needs g > q; use the scroll bounds for g = q".into(),
        ));
    }
    let checks = irregular_constraints(rec, AdjointSquare::of(rec));
    let feasible = checks.iter().all(|c| c.status != Status::Violated);
    Ok(FeasibilityVerdict { feasible, checks })
}
