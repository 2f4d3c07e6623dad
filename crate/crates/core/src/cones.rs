//! Conic bundles over an irregular base and the Veronese re-embeddings of
//! cones they can come from.
//!
//! The conic-ruled model is `P(O ⊕ L)` over a genus `q >= 1` curve with
//! `deg L = -e`, and `H ≡ 2C_0 + F(A)` with `deg A = α`.

use crate::error::{Error, Result};
use crate::lattice::{arithmetic_genus, self_intersection, DivisorClass, SurfaceModel};
use num_traits::ToPrimitive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConicRuledData {
    pub q: u32,
    pub e: i64,
    pub alpha: i64,
}

impl ConicRuledData {
    pub fn new(q: u32, e: i64, alpha: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("conic-ruled data needs q >= 1".into()));
        }
        Ok(ConicRuledData { q, e, alpha })
    }
}

/// `(d, g) = (4(α - e), 2q - 1 + α - e)`, checked against `d = 4g + 4 - 8q`.
pub fn cone_relations(data: &ConicRuledData) -> Result<(i64, i64)> {
    let r = i128::from(data.alpha) - i128::from(data.e);
    let q = i128::from(data.q);
    let d = 4 * r;
    if d <= 0 {
        return Err(Error::Precondition(alloc::format!("d = 4(α - e) = {d} must be positive")));
    }
    let g = 2 * q - 1 + r;
    if d != 4 * g + 4 - 8 * q {
        return Err(Error::Identity("d = 4g + 4 - 8q".into()));
    }
    let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow);
    Ok((narrow(d)?, narrow(g)?))
}

/// The same `(d, g)` recomputed on the lattice, with `H = 2E + αF` on the
/// numerically ruled model.
pub fn cone_relations_on_lattice(data: &ConicRuledData) -> Result<(i64, i64)> {
    let model = SurfaceModel::numerically_ruled(data.q, data.e)?;
    // C_0 is E; F(A) has class α F.
    let h = DivisorClass::from_i64(model, &[2, data.alpha])?;
    let d = self_intersection(&h).to_i64().ok_or(Error::Overflow)?;
    let g = arithmetic_genus(&h)?.to_i64().ok_or(Error::Overflow)?;
    Ok((d, g))
}

/// `α - e >= 2q + 2`, which is the same as `d >= 2g + 5`.
pub fn segre_threshold(data: &ConicRuledData) -> Result<bool> {
    let (d, g) = cone_relations(data)?;
    let by_alpha = i128::from(data.alpha) - i128::from(data.e) >= 2 * i128::from(data.q) + 2;
    let by_degree = i128::from(d) >= 2 * i128::from(g) + 5;
    if by_alpha != by_degree {
        return Err(Error::Identity("α - e >= 2q + 2 iff d >= 2g + 5".into()));
    }
    Ok(by_alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InconclusiveReason {
    BelowThreshold,
    SectionsNotLinearlyNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegreOutcome {
    /// The 2-Veronese re-embedding of the cone over `Γ ⊂ P^{e-q}`; the
    /// split data is `A = L^{-2}`, so `α = 2e`.
    ConeVeronese2 { q: u32, e: i64, alpha: i64, d: i64, g: i64 },
    /// Linear normality forces `α = 2e`, which the data contradicts.
    Excluded { alpha: i64, forced_alpha: i64 },
    Inconclusive(InconclusiveReason),
}

pub fn segre_classify(data: &ConicRuledData, sections_linearly_normal: bool) -> Result<SegreOutcome> {
    if data.e < 0 {
        return Err(Error::Precondition("the ruled surface must be normalized with e >= 0".into()));
    }
    if !segre_threshold(data)? {
        return Ok(SegreOutcome::Inconclusive(InconclusiveReason::BelowThreshold));
    }
    if !sections_linearly_normal {
        return Ok(SegreOutcome::Inconclusive(InconclusiveReason::SectionsNotLinearlyNormal));
    }
    let forced = data.e.checked_mul(2).ok_or(Error::Overflow)?;
    if data.alpha != forced {
        return Ok(SegreOutcome::Excluded { alpha: data.alpha, forced_alpha: forced });
    }
    let (d, g) = cone_relations(data)?;
    Ok(SegreOutcome::ConeVeronese2 { q: data.q, e: data.e, alpha: forced, d, g })
}

/// For the irregular conic bundles with `d > 3g - 3`: `3g - 2 >= 2g + 5`
/// exactly when `g >= 7`.
pub fn segre_genus_gate(g: i64) -> Result<bool> {
    let direct = g >= 7;
    let via_degree = 3 * i128::from(g) - 2 >= 2 * i128::from(g) + 5;
    if direct != via_degree {
        return Err(Error::Identity("g >= 7 iff 3g - 2 >= 2g + 5".into()));
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_cone() {
        let data = ConicRuledData::new(1, 4, 8).unwrap();
        assert_eq!(cone_relations(&data).unwrap(), (16, 5));
        assert_eq!(cone_relations_on_lattice(&data).unwrap(), (16, 5));
        assert!(segre_threshold(&data).unwrap());
        assert_eq!(
            segre_classify(&data, true).unwrap(),
            SegreOutcome::ConeVeronese2 { q: 1, e: 4, alpha: 8, d: 16, g: 5 }
        );
    }

    #[test]
    fn threshold_edges() {
        let below = ConicRuledData::new(1, 0, 3).unwrap();
        assert!(!segre_threshold(&below).unwrap());
        assert_eq!(
            segre_classify(&below, true).unwrap(),
            SegreOutcome::Inconclusive(InconclusiveReason::BelowThreshold)
        );
        let off = ConicRuledData::new(1, 3, 9).unwrap();
        assert_eq!(
            segre_classify(&off, true).unwrap(),
            SegreOutcome::Excluded { alpha: 9, forced_alpha: 6 }
        );
        assert!(cone_relations(&ConicRuledData::new(1, 3, 3).unwrap()).is_err());
        assert!(ConicRuledData::new(0, 1, 2).is_err());
    }

    #[test]
    fn genus_gate() {
        for g in -5..40 {
            assert_eq!(segre_genus_gate(g).unwrap(), g >= 7);
        }
    }
}
