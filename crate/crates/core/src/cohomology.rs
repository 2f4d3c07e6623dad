//! Cohomology of line bundles on a curve from degree and speciality data,
//! and of `Sym^k` of a split rank-two bundle twisted by a line bundle,
//! which is what `h^i(R, kC_0 + ...)` reduces to on a decomposable ruled
//! surface `R -> Γ`.
//!
//! Also home to the worked examples on elliptic ruled surfaces and the
//! Veronese re-embeddings of cones over curves.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lattice::{
    arithmetic_genus, intersect, self_intersection, DivisorClass, SurfaceModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DegreeZeroKind {
    Trivial,
    Nontrivial,
}

/// A line bundle on a smooth curve of genus `genus`, known through its
/// degree, whether it is trivial (degree 0 only) and, in the special range
/// `1 <= degree <= 2g - 2`, a caller-supplied `h^1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurveLineBundle {
    pub genus: u32,
    pub degree: i64,
    pub zero_degree_kind: DegreeZeroKind,
    pub speciality_override: Option<i64>,
}

impl CurveLineBundle {
    pub fn new(genus: u32, degree: i64) -> Self {
        CurveLineBundle {
            genus,
            degree,
            zero_degree_kind: DegreeZeroKind::Trivial,
            speciality_override: None,
        }
    }

    pub fn nontrivial(mut self) -> Self {
        self.zero_degree_kind = DegreeZeroKind::Nontrivial;
        self
    }

    pub fn with_h1(mut self, h1: i64) -> Self {
        self.speciality_override = Some(h1);
        self
    }
}

fn narrow(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow)
}

/// `(h^0, h^1)` of a line bundle on a curve. Riemann–Roch
/// `h^0 - h^1 = deg - q + 1` holds for every `Ok` result.
pub fn h0_h1_curve(b: &CurveLineBundle) -> Result<(i64, i64)> {
    let q = i128::from(b.genus);
    let deg = i128::from(b.degree);
    let chi = deg - q + 1;
    let computed = if deg == 0 {
        match b.zero_degree_kind {
            DegreeZeroKind::Trivial => Some((1, q)),
            DegreeZeroKind::Nontrivial if q == 0 => {
                return Err(Error::InvalidInput(
                    "every degree 0 line bundle on a rational curve is trivial".into(),
                ))
            }
            DegreeZeroKind::Nontrivial => Some((0, q - 1)),
        }
    } else if deg > 2 * q - 2 {
        Some((chi, 0))
    } else if deg < 0 {
        Some((0, -chi))
    } else {
        None
    };
    match (computed, b.speciality_override) {
        (Some((h0, h1)), None) => Ok((narrow(h0)?, narrow(h1)?)),
        (Some((h0, h1)), Some(o)) if i128::from(o) == h1 => Ok((narrow(h0)?, narrow(h1)?)),
        (Some((_, h1)), Some(o)) => Err(Error::InvalidInput(alloc::format!(
            "h^1 override {o} contradicts the forced value {h1} in degree {deg}"
        ))),
        (None, None) => Err(Error::GeneralityRequired { degree: b.degree, genus: b.genus }),
        (None, Some(o)) => {
            let h1 = i128::from(o);
            let h0 = chi + h1;
            if h1 < 0 || h1 > q || h0 < 0 {
                return Err(Error::InvalidInput(alloc::format!(
                    "h^1 override {o} is impossible in degree {deg} on a genus {q} curve"
                )));
            }
            Ok((narrow(h0)?, narrow(h1)?))
        }
    }
}

/// `R = P(O ⊕ L)` over a genus `base_genus` curve with `deg L = -e`,
/// together with the twist `A` used to push `kC_0 + F(A)` down to
/// `Sym^k(O ⊕ L) ⊗ A = ⊕_{i=0..k} L^i ⊗ A`.
///
/// The twist's `zero_degree_kind` applies to whichever summand `L^i ⊗ A`
/// lands in degree 0. Its `speciality_override` applies to `A` itself;
/// further special summands take their `h^1` from `summand_h1_overrides`,
/// keyed by `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposableRuledSurface {
    pub base_genus: u32,
    pub e: i64,
    pub twist: CurveLineBundle,
    pub summand_h1_overrides: Vec<(u32, i64)>,
}

impl DecomposableRuledSurface {
    pub fn new(base_genus: u32, e: i64, twist_degree: i64) -> Self {
        DecomposableRuledSurface {
            base_genus,
            e,
            twist: CurveLineBundle::new(base_genus, twist_degree),
            summand_h1_overrides: Vec::new(),
        }
    }

    pub fn summand_degrees(&self) -> [i64; 2] {
        [0, -self.e]
    }

    /// Degree of `L^i ⊗ A`.
    pub fn summand_degree(&self, i: u32) -> Result<i64> {
        narrow(i128::from(self.twist.degree) - i128::from(i) * i128::from(self.e))
    }
}

/// `(h^0, h^1)` of `Sym^k(O ⊕ L) ⊗ A` as a sum over its summands.
pub fn h0_h1_symk(surface: &DecomposableRuledSurface, k: u32) -> Result<(i64, i64)> {
    if surface.twist.genus != surface.base_genus {
        return Err(Error::InvalidInput("twist lives on a curve of another genus".into()));
    }
    let (mut h0, mut h1) = (0i128, 0i128);
    for i in 0..=k {
        let speciality_override = if i == 0 {
            surface.twist.speciality_override
        } else {
            surface.summand_h1_overrides.iter().find(|(j, _)| *j == i).map(|&(_, v)| v)
        };
        let summand = CurveLineBundle {
            genus: surface.base_genus,
            degree: surface.summand_degree(i)?,
            zero_degree_kind: surface.twist.zero_degree_kind,
            speciality_override,
        };
        let (a, b) = h0_h1_curve(&summand)?;
        h0 += i128::from(a);
        h1 += i128::from(b);
    }
    Ok((narrow(h0)?, narrow(h1)?))
}

fn to_i64(v: BigInt) -> Result<i64> {
    v.to_i64().ok_or(Error::Overflow)
}

/// Numerical data of `|k(C_0 + F(p))|` on the elliptic ruled surface with
/// `e = 1`, and of the variant `k(C_0 + F(p'))` with `kp' ≁ kp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticRuledE1 {
    pub k: u32,
    pub d: i64,
    pub g: i64,
    pub h0: i64,
    pub h1: i64,
    pub n: i64,
    /// `H.C_0`; zero means `C_0` is contracted.
    pub h_dot_section: i64,
    /// `(K + H).C_0`, a degree one class on the elliptic curve `C_0`, so
    /// the adjoint system has exactly one base point there.
    pub adjoint_degree_on_section: i64,
    pub section_genus: i64,
    pub variant_h0: i64,
    pub variant_h1: i64,
    /// The two outcomes left open for the variant: the restricted system
    /// is base-point-free, or it has one base point.
    pub variant_outcomes: [VariantOutcome; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantOutcome {
    pub d: i64,
    pub n: i64,
    pub g: i64,
    pub sections_linearly_normal: bool,
}

pub fn elliptic_ruled_e1(k: u32) -> Result<EllipticRuledE1> {
    if k < 1 {
        return Err(Error::Precondition("k >= 1".into()));
    }
    let model = SurfaceModel::numerically_ruled(1, 1)?;
    let ki = i64::from(k);
    let h = DivisorClass::from_i64(model, &[ki, ki])?;
    let c0 = DivisorClass::from_i64(model, &[1, 0])?;
    let k_class = crate::lattice::canonical_class(model);
    let d = to_i64(self_intersection(&h))?;
    let g = to_i64(arithmetic_genus(&h)?)?;
    let adjoint = k_class.checked_add(&h)?;

    // Sym^k(O ⊕ O(-p)) ⊗ O(kp): the degree 0 summand is O.
    let surface = DecomposableRuledSurface::new(1, 1, ki);
    let (h0, h1) = h0_h1_symk(&surface, k)?;
    let mut variant = surface.clone();
    variant.twist = variant.twist.nontrivial();
    let (variant_h0, variant_h1) = h0_h1_symk(&variant, k)?;

    let variant_n = variant_h0 - 1;
    let variant_outcomes = [
        VariantOutcome { d, n: variant_n, g, sections_linearly_normal: d - variant_n + 1 == g },
        VariantOutcome {
            d: d - 1,
            n: variant_n,
            g,
            sections_linearly_normal: d - 1 - variant_n + 1 == g,
        },
    ];
    Ok(EllipticRuledE1 {
        k,
        d,
        g,
        h0,
        h1,
        n: h0 - 1,
        h_dot_section: to_i64(intersect(&h, &c0)?)?,
        adjoint_degree_on_section: to_i64(intersect(&adjoint, &c0)?)?,
        section_genus: to_i64(arithmetic_genus(&c0)?)?,
        variant_h0,
        variant_h1,
        variant_outcomes,
    })
}

/// `|gC_0 + F(p)|` on `P(O ⊕ O(𝔢))` over an elliptic curve, `𝔢` of degree 0
/// and non-torsion, followed by blowing up its two simple base points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticRuledSplitDet0 {
    pub g: u32,
    /// `dim |H_g|`.
    pub dimension: i64,
    pub d_before_blowup: i64,
    pub d: i64,
    pub sectional_genus: i64,
    /// `C_0'^2` and `C_𝔢'^2` after the blowup.
    pub section_squares: [i64; 2],
    /// `H'.C_0'` and `H'.C_𝔢'`.
    pub h_dot_sections: [i64; 2],
}

pub fn elliptic_ruled_split_det0(g: u32) -> Result<EllipticRuledSplitDet0> {
    if g < 3 {
        return Err(Error::Precondition("g >= 3".into()));
    }
    let model = SurfaceModel::numerically_ruled(1, 0)?;
    let gi = i64::from(g);
    let h = DivisorClass::from_i64(model, &[gi, 1])?;
    // C_0 and C_𝔢 ~ C_0 - F(𝔢) share the numerical class C_0.
    let c0 = DivisorClass::from_i64(model, &[1, 0])?;
    // Every summand O(i𝔢 + p) has degree 1.
    let (h0, h1) = h0_h1_symk(&DecomposableRuledSurface::new(1, 0, 1), g)?;
    if h1 != 0 {
        return Err(Error::Identity("split det 0 example: h^1 should vanish".into()));
    }
    let d_before = to_i64(self_intersection(&h))?;
    let c0_sq = to_i64(self_intersection(&c0))?;
    let h_c0 = to_i64(intersect(&h, &c0)?)?;
    // One base point on each section; the blowup subtracts 1 from H'^2,
    // from C'^2 and from H'.C' for the section through it.
    Ok(EllipticRuledSplitDet0 {
        g,
        dimension: h0 - 1,
        d_before_blowup: d_before,
        d: d_before - 2,
        sectional_genus: to_i64(arithmetic_genus(&h)?)?,
        section_squares: [c0_sq - 1, c0_sq - 1],
        h_dot_sections: [h_c0 - 1, h_c0 - 1],
    })
}

/// Invariants of `μD` on `P(O ⊕ G)` over a genus `q` curve, `deg G = e`,
/// `D` the tautological section with `D^2 = e`; its image is the cone over
/// `Γ ⊂ P^{e-q}` re-embedded by `|O(μ)|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MuConeInvariants {
    pub q: u32,
    pub e: i64,
    pub mu: u32,
    pub d: i64,
    pub g: i64,
    pub h0_surface: i64,
}

pub fn mu_cone_invariants(q: u32, e: i64, mu: u32) -> Result<MuConeInvariants> {
    let (qi, ei, mi) = (i128::from(q), i128::from(e), i128::from(mu));
    if ei <= 2 * qi - 2 {
        return Err(Error::Precondition(alloc::format!(
            "need e > 2q - 2 so that G is non-special, got q = {q}, e = {e}"
        )));
    }
    if mu == 0 {
        return Err(Error::Precondition("mu >= 1".into()));
    }
    let d = ei * mi * mi;
    let two_g_minus_2 = mi * (2 * (qi - 1) + (mi - 1) * ei);
    if two_g_minus_2 % 2 != 0 {
        return Err(Error::Identity("2g - 2 came out odd".into()));
    }
    let g = two_g_minus_2 / 2 + 1;
    let h0_surface = 1 + mi * (mi + 1) * ei / 2 + mi * (1 - qi);
    Ok(MuConeInvariants {
        q,
        e,
        mu,
        d: narrow(d)?,
        g: narrow(g)?,
        h0_surface: narrow(h0_surface)?,
    })
}

/// The sections of the μ-cone are linearly normal: `μ^2 e - g + 1` equals
/// `h^0(S, H) - 1`.
pub fn check_linear_normality_mu_cone(inv: &MuConeInvariants) -> bool {
    i128::from(inv.d) - i128::from(inv.g) + 1 == i128::from(inv.h0_surface) - 1
}

/// `(C + mK).F = μ - 2m`: for `2m > μ` the system `|C + mK|` is empty.
pub fn mu_cone_adjoint_fibre_degree(mu: u32, m: u32) -> i64 {
    i64::from(mu) - 2 * i64::from(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_ranges() {
        assert_eq!(h0_h1_curve(&CurveLineBundle::new(1, 3)).unwrap(), (3, 0));
        assert_eq!(h0_h1_curve(&CurveLineBundle::new(2, -1)).unwrap(), (0, 2));
        assert_eq!(h0_h1_curve(&CurveLineBundle::new(2, 0)).unwrap(), (1, 2));
        assert_eq!(h0_h1_curve(&CurveLineBundle::new(2, 0).nontrivial()).unwrap(), (0, 1));
        assert_eq!(
            h0_h1_curve(&CurveLineBundle::new(3, 2)),
            Err(Error::GeneralityRequired { degree: 2, genus: 3 })
        );
        assert_eq!(h0_h1_curve(&CurveLineBundle::new(3, 2).with_h1(1)).unwrap(), (1, 1));
        assert!(h0_h1_curve(&CurveLineBundle::new(3, 2).with_h1(4)).is_err());
        assert!(h0_h1_curve(&CurveLineBundle::new(3, 7).with_h1(1)).is_err());
        assert!(h0_h1_curve(&CurveLineBundle::new(0, 0).nontrivial()).is_err());
    }

    #[test]
    fn rational_curve() {
        for deg in -5..6 {
            let (h0, h1) = h0_h1_curve(&CurveLineBundle::new(0, deg)).unwrap();
            assert_eq!(h0, (deg + 1).max(0));
            assert_eq!(h1, (-deg - 1).max(0));
        }
    }

    #[test]
    fn sym_zero_is_the_twist() {
        for q in 0..4 {
            let s = DecomposableRuledSurface::new(q, 3, 0);
            assert_eq!(h0_h1_symk(&s, 0).unwrap(), (1, i64::from(q)));
        }
    }

    #[test]
    fn elliptic_e1_numbers() {
        for k in 3..13u32 {
            let r = elliptic_ruled_e1(k).unwrap();
            let kk = i64::from(k);
            assert_eq!(r.d, kk * kk);
            assert_eq!(r.g, kk * (kk - 1) / 2 + 1);
            assert_eq!(r.d, 2 * r.g - 2 + kk);
            assert_eq!((r.h0, r.h1), (1 + kk * (kk + 1) / 2, 1));
            assert_eq!((r.variant_h0, r.variant_h1), (kk * (kk + 1) / 2, 0));
            assert_eq!(r.h_dot_section, 0);
            assert_eq!(r.adjoint_degree_on_section, 1);
            assert_eq!(r.section_genus, 1);
            assert!(!r.variant_outcomes[0].sections_linearly_normal);
            assert!(r.variant_outcomes[1].sections_linearly_normal);
        }
    }

    #[test]
    fn split_det0_is_canonical() {
        for g in 3..15 {
            let r = elliptic_ruled_split_det0(g).unwrap();
            let gi = i64::from(g);
            assert_eq!(r.dimension, gi);
            assert_eq!(r.d, 2 * gi - 2);
            assert_eq!(r.sectional_genus, gi);
            assert_eq!(r.section_squares, [-1, -1]);
            assert_eq!(r.h_dot_sections, [0, 0]);
        }
    }

    #[test]
    fn mu_cone_examples() {
        let r = mu_cone_invariants(1, 3, 3).unwrap();
        assert_eq!((r.d, r.g, r.h0_surface), (27, 10, 19));
        assert!(check_linear_normality_mu_cone(&r));
        let r = mu_cone_invariants(1, 2, 2).unwrap();
        assert_eq!((r.d, r.g), (8, 3));
        for k in 1..10i64 {
            let r = mu_cone_invariants(1, 1, k as u32).unwrap();
            assert_eq!((r.d, r.g), (k * k, k * (k - 1) / 2 + 1));
        }
        assert!(mu_cone_invariants(2, 2, 3).is_err());
    }
}
