//! Picard lattices of the surface models used throughout the crate.
//!
//! Each model fixes a basis of the Néron–Severi group, an integral
//! intersection form and a canonical class. Everything here is exact:
//! coefficients and intersection numbers are [`BigInt`].

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A smooth surface with a fixed basis of its numerical classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceModel {
    /// Basis `L`, `L^2 = 1`.
    ProjectivePlane,
    /// Basis `(E, F)`, `E^2 = -e`, `E.F = 1`, `F^2 = 0`.
    Hirzebruch { e: u32 },
    /// Basis `(L, E_1, ..., E_r)`. The points may be infinitely near when
    /// `curvilinear` is set; the lattice is the same either way.
    BlowupOfPlane { points: u32, curvilinear: bool },
    /// `F_e` blown up in `points` points, basis `(E, F, E_1, ..., E_r)`.
    BlownUpHirzebruch { e: u32, points: u32 },
    /// A geometrically ruled surface over a genus `q >= 1` curve, with the
    /// same form as `F_e`. `e` may be negative.
    NumericallyRuled { q: u32, e: i64 },
}

/// Three-valued answer for nefness tests that are not always decidable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nefness {
    Nef,
    NotNef,
    Unknown,
}

impl Nefness {
    pub fn is_nef(self) -> bool {
        self == Nefness::Nef
    }
}

impl SurfaceModel {
    pub fn numerically_ruled(q: u32, e: i64) -> Result<Self> {
        let m = SurfaceModel::NumericallyRuled { q, e };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SurfaceModel::NumericallyRuled { q: 0, .. } => Err(Error::InvalidModel(
                "a numerically ruled model needs base genus q >= 1",
            )),
            _ => Ok(()),
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            SurfaceModel::ProjectivePlane => 1,
            SurfaceModel::Hirzebruch { .. } | SurfaceModel::NumericallyRuled { .. } => 2,
            SurfaceModel::BlowupOfPlane { points, .. } => points as usize + 1,
            SurfaceModel::BlownUpHirzebruch { points, .. } => points as usize + 2,
        }
    }

    /// `q = h^1(O_S)`.
    pub fn irregularity(&self) -> u32 {
        match *self {
            SurfaceModel::NumericallyRuled { q, .. } => q,
            _ => 0,
        }
    }

    /// `chi(O_S) = 1 - q`.
    pub fn chi_structure_sheaf(&self) -> BigInt {
        BigInt::one() - BigInt::from(self.irregularity())
    }

    fn ruling_invariant(&self) -> Option<i64> {
        match *self {
            SurfaceModel::Hirzebruch { e } | SurfaceModel::BlownUpHirzebruch { e, .. } => {
                Some(i64::from(e))
            }
            SurfaceModel::NumericallyRuled { e, .. } => Some(e),
            _ => None,
        }
    }

    /// Entry `(i, j)` of the Gram matrix in the model's basis.
    pub fn form_entry(&self, i: usize, j: usize) -> i64 {
        match self.ruling_invariant() {
            Some(e) => match (i, j) {
                (0, 0) => -e,
                (0, 1) | (1, 0) => 1,
                (i, j) if i == j && i >= 2 => -1,
                _ => 0,
            },
            None => match (i, j) {
                (0, 0) => 1,
                (i, j) if i == j => -1,
                _ => 0,
            },
        }
    }

    pub fn intersection_form(&self) -> Vec<Vec<BigInt>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| BigInt::from(self.form_entry(i, j))).collect())
            .collect()
    }

    pub fn canonical_coeffs(&self) -> Vec<BigInt> {
        match *self {
            SurfaceModel::ProjectivePlane => vec![BigInt::from(-3)],
            SurfaceModel::Hirzebruch { e } => {
                vec![BigInt::from(-2), -BigInt::from(i64::from(e) + 2)]
            }
            SurfaceModel::BlowupOfPlane { points, .. } => {
                let mut c = vec![BigInt::from(-3)];
                c.extend((0..points).map(|_| BigInt::one()));
                c
            }
            SurfaceModel::BlownUpHirzebruch { e, points } => {
                let mut c = vec![BigInt::from(-2), -BigInt::from(i64::from(e) + 2)];
                c.extend((0..points).map(|_| BigInt::one()));
                c
            }
            SurfaceModel::NumericallyRuled { q, e } => {
                vec![BigInt::from(-2), BigInt::from(2 * i64::from(q) - 2) - BigInt::from(e)]
            }
        }
    }

    /// Inertia `(positive, negative, null)` of the intersection form.
    pub fn signature(&self) -> (usize, usize, usize) {
        inertia(self.intersection_form())
    }

    /// The same surface blown up in `extra` further points, when the result
    /// is one of the supported models.
    pub fn blown_up(&self, extra: u32) -> Result<SurfaceModel> {
        if extra == 0 {
            return Ok(*self);
        }
        match *self {
            SurfaceModel::ProjectivePlane => Ok(SurfaceModel::BlowupOfPlane {
                points: extra,
                curvilinear: false,
            }),
            SurfaceModel::BlowupOfPlane { points, curvilinear } => {
                Ok(SurfaceModel::BlowupOfPlane { points: points + extra, curvilinear })
            }
            SurfaceModel::Hirzebruch { e } => {
                Ok(SurfaceModel::BlownUpHirzebruch { e, points: extra })
            }
            SurfaceModel::BlownUpHirzebruch { e, points } => {
                Ok(SurfaceModel::BlownUpHirzebruch { e, points: points + extra })
            }
            SurfaceModel::NumericallyRuled { .. } => Err(Error::UnsupportedModel),
        }
    }
}

/// Inertia of a symmetric integer matrix by fraction-free congruence
/// diagonalization.
pub fn inertia(mut m: Vec<Vec<BigInt>>) -> (usize, usize, usize) {
    let (mut pos, mut neg) = (0usize, 0usize);
    let mut flipped = false;
    while !m.is_empty() {
        let n = m.len();
        let pivot = match (0..n).find(|&i| !m[i][i].is_zero()) {
            Some(p) => p,
            None => {
                // Zero diagonal: v_i + v_j has square 2 m_ij.
                let Some((i, j)) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !m[i][j].is_zero())
                else {
                    break;
                };
                for k in 0..n {
                    let v = m[j][k].clone();
                    m[i][k] += v;
                }
                for k in 0..n {
                    let v = m[k][j].clone();
                    m[k][i] += v;
                }
                i
            }
        };
        let p = m[pivot][pivot].clone();
        if p.is_positive() != flipped {
            pos += 1;
        } else {
            neg += 1;
        }
        // The complement is p times the Schur complement.
        let rest: Vec<usize> = (0..n).filter(|&k| k != pivot).collect();
        let next: Vec<Vec<BigInt>> = rest
            .iter()
            .map(|&j| {
                rest.iter()
                    .map(|&k| &p * &m[j][k] - &m[pivot][j] * &m[pivot][k])
                    .collect()
            })
            .collect();
        if p.is_negative() {
            flipped = !flipped;
        }
        m = next;
    }
    let total_null = m.len();
    (pos, neg, total_null)
}

/// A numerical class `sum c_i B_i` on a fixed model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    model: SurfaceModel,
    coeffs: Vec<BigInt>,
}

impl DivisorClass {
    pub fn new(model: SurfaceModel, coeffs: Vec<BigInt>) -> Result<Self> {
        model.validate()?;
        if coeffs.len() != model.rank() {
            return Err(Error::Rank { expected: model.rank(), got: coeffs.len() });
        }
        Ok(DivisorClass { model, coeffs })
    }

    pub fn from_i64(model: SurfaceModel, coeffs: &[i64]) -> Result<Self> {
        Self::new(model, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(model: SurfaceModel) -> Self {
        DivisorClass { model, coeffs: vec![BigInt::zero(); model.rank()] }
    }

    /// Basis vector `i`.
    pub fn basis(model: SurfaceModel, i: usize) -> Result<Self> {
        let mut d = Self::zero(model);
        match d.coeffs.get_mut(i) {
            Some(c) => *c = BigInt::one(),
            None => return Err(Error::Rank { expected: model.rank(), got: i + 1 }),
        }
        Ok(d)
    }

    pub fn model(&self) -> SurfaceModel {
        self.model
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(DivisorClass { model: self.model, coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scaled(&BigInt::from(-1)))
    }

    pub fn scaled(&self, k: &BigInt) -> Self {
        DivisorClass { model: self.model, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Pull back along a blowup of the model in `extra` points: the new
    /// exceptional coefficients are `-mult` each.
    pub fn blown_up(&self, mults: &[i64]) -> Result<Self> {
        let model = self.model.blown_up(mults.len() as u32)?;
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(mults.iter().map(|&m| BigInt::from(-m)));
        Ok(DivisorClass { model, coeffs })
    }
}

pub fn intersect(d1: &DivisorClass, d2: &DivisorClass) -> Result<BigInt> {
    if d1.model != d2.model {
        return Err(Error::ModelMismatch);
    }
    let model = d1.model;
    let mut acc = BigInt::zero();
    for (i, a) in d1.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in d2.coeffs.iter().enumerate() {
            let g = model.form_entry(i, j);
            if g != 0 && !b.is_zero() {
                acc += a * b * g;
            }
        }
    }
    Ok(acc)
}

pub fn self_intersection(d: &DivisorClass) -> BigInt {
    intersect(d, d).expect("same model")
}

pub fn canonical_class(model: SurfaceModel) -> DivisorClass {
    DivisorClass { model, coeffs: model.canonical_coeffs() }
}

/// `p_a(D) = 1 + (D^2 + K.D)/2`; fails when `D^2 + K.D` is odd.
pub fn arithmetic_genus(d: &DivisorClass) -> Result<BigInt> {
    let k = canonical_class(d.model);
    let s = self_intersection(d) + intersect(&k, d)?;
    if s.is_odd() {
        return Err(Error::Parity(s));
    }
    Ok(BigInt::one() + s / 2)
}

/// Riemann–Roch: `chi(D) = chi(O_S) + (D^2 - K.D)/2`.
pub fn euler_characteristic(d: &DivisorClass) -> Result<BigInt> {
    let k = canonical_class(d.model);
    let s = self_intersection(d) - intersect(&k, d)?;
    if s.is_odd() {
        return Err(Error::Parity(s));
    }
    Ok(d.model.chi_structure_sheaf() + s / 2)
}

/// Nefness on the models where the effective cone is known; elsewhere the
/// answer is `Unknown` unless test curves are supplied, in which case it is
/// the necessary condition `D.c >= 0` for all of them.
pub fn is_nef(d: &DivisorClass, test_curves: Option<&[DivisorClass]>) -> Result<Nefness> {
    let c = &d.coeffs;
    let decided = match d.model {
        SurfaceModel::ProjectivePlane => Some(!c[0].is_negative()),
        SurfaceModel::Hirzebruch { e } => Some(ruled_nef(&c[0], &c[1], i64::from(e))),
        SurfaceModel::NumericallyRuled { e, .. } if e >= 0 => Some(ruled_nef(&c[0], &c[1], e)),
        _ => None,
    };
    if let Some(nef) = decided {
        return Ok(if nef { Nefness::Nef } else { Nefness::NotNef });
    }
    match test_curves {
        None => Ok(Nefness::Unknown),
        Some(curves) => {
            for curve in curves {
                if intersect(d, curve)?.is_negative() {
                    return Ok(Nefness::NotNef);
                }
            }
            Ok(Nefness::Nef)
        }
    }
}

// aE + bF is nef iff D.F = a >= 0 and D.E = b - ae >= 0.
fn ruled_nef(a: &BigInt, b: &BigInt, e: i64) -> bool {
    !a.is_negative() && *b >= a * e
}

/// `aE + bF` on `F_e`.
pub fn hirzebruch_class(e: u32, a: i64, b: i64) -> DivisorClass {
    DivisorClass::from_i64(SurfaceModel::Hirzebruch { e }, &[a, b]).expect("rank 2")
}

/// `aL` on the plane.
pub fn plane_class(a: i64) -> DivisorClass {
    DivisorClass::from_i64(SurfaceModel::ProjectivePlane, &[a]).expect("rank 1")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn canonical_squares() {
        let cases = [
            (SurfaceModel::ProjectivePlane, 9),
            (SurfaceModel::Hirzebruch { e: 3 }, 8),
            (SurfaceModel::BlowupOfPlane { points: 4, curvilinear: false }, 5),
            (SurfaceModel::BlownUpHirzebruch { e: 2, points: 3 }, 5),
            (SurfaceModel::NumericallyRuled { q: 2, e: -1 }, -8),
        ];
        for (m, k2) in cases {
            assert_eq!(self_intersection(&canonical_class(m)), bi(k2), "{m:?}");
        }
    }

    #[test]
    fn signature_is_hyperbolic() {
        for m in [
            SurfaceModel::ProjectivePlane,
            SurfaceModel::Hirzebruch { e: 0 },
            SurfaceModel::Hirzebruch { e: 5 },
            SurfaceModel::BlowupOfPlane { points: 7, curvilinear: true },
            SurfaceModel::BlownUpHirzebruch { e: 1, points: 2 },
            SurfaceModel::NumericallyRuled { q: 3, e: -2 },
        ] {
            assert_eq!(m.signature(), (1, m.rank() - 1, 0), "{m:?}");
        }
    }

    #[test]
    fn inertia_of_degenerate_forms() {
        let m = vec![vec![bi(0), bi(0)], vec![bi(0), bi(0)]];
        assert_eq!(inertia(m), (0, 0, 2));
        let m = vec![vec![bi(-2), bi(1)], vec![bi(1), bi(-2)]];
        assert_eq!(inertia(m), (0, 2, 0));
    }

    #[test]
    fn plane_curves() {
        assert_eq!(arithmetic_genus(&plane_class(7)).unwrap(), bi(15));
        assert_eq!(euler_characteristic(&plane_class(4)).unwrap(), bi(15));
        assert_eq!(arithmetic_genus(&plane_class(1)).unwrap(), bi(0));
    }

    #[test]
    fn hyperelliptic_class_on_hirzebruch() {
        for e in 0..6u32 {
            for g in 0..10i64 {
                let h = hirzebruch_class(e, 2, g + 1 + i64::from(e));
                assert_eq!(self_intersection(&h), bi(4 * g + 4));
                assert_eq!(arithmetic_genus(&h).unwrap(), bi(g));
                let k = canonical_class(h.model());
                assert_eq!(euler_characteristic(&k.checked_add(&h).unwrap()).unwrap(), bi(g));
            }
        }
    }

    #[test]
    fn nefness_on_f2() {
        assert_eq!(is_nef(&hirzebruch_class(2, 1, 1), None).unwrap(), Nefness::NotNef);
        assert_eq!(is_nef(&hirzebruch_class(2, 0, 1), None).unwrap(), Nefness::Nef);
        for h in 2..8 {
            assert!(is_nef(&hirzebruch_class(2, 3, h + 4), None).unwrap().is_nef());
        }
    }

    #[test]
    fn nefness_undecided_on_blowups() {
        let m = SurfaceModel::BlowupOfPlane { points: 2, curvilinear: false };
        let d = DivisorClass::from_i64(m, &[3, -1, -1]).unwrap();
        assert_eq!(is_nef(&d, None).unwrap(), Nefness::Unknown);
        let e1 = DivisorClass::basis(m, 1).unwrap();
        let line = DivisorClass::from_i64(m, &[1, -1, -1]).unwrap();
        assert_eq!(is_nef(&d, Some(&[e1, line.clone()])).unwrap(), Nefness::Nef);
        let bad = DivisorClass::from_i64(m, &[1, -2, -2]).unwrap();
        assert_eq!(is_nef(&bad, Some(&[line])).unwrap(), Nefness::NotNef);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DivisorClass::from_i64(SurfaceModel::ProjectivePlane, &[1, 2]).is_err());
        assert_eq!(
            SurfaceModel::numerically_ruled(0, 1),
            Err(Error::InvalidModel("a numerically ruled model needs base genus q >= 1"))
        );
    }

    #[test]
    fn model_mismatch() {
        let a = plane_class(1);
        let b = hirzebruch_class(0, 1, 1);
        assert_eq!(intersect(&a, &b), Err(Error::ModelMismatch));
    }

    #[test]
    fn blowup_pullback() {
        let h = plane_class(6).blown_up(&[2, 2, 1]).unwrap();
        assert_eq!(self_intersection(&h), bi(36 - 8 - 1));
        assert_eq!(arithmetic_genus(&h).unwrap(), bi(8));
    }
}
