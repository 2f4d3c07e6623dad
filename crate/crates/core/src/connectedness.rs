//! Numerical connectedness of effective divisors given by their
//! components' intersection data.
//!
//! `D = D_1 + D_2` with both parts effective and nonzero is a split; `D` is
//! m-connected when every split has `D_1.D_2 >= m`. The analyses here
//! enumerate splits exhaustively in lexicographic order of the
//! multiplicity vector of `D_1`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Default cap on the number of multiplicity vectors enumerated.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `D = sum m_i C_i` with the Gram matrix of the `C_i` and `K.C_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfiguredDivisor {
    labels: Vec<String>,
    mults: Vec<u32>,
    gram: Vec<Vec<i64>>,
    k_degrees: Vec<i64>,
}

impl ConfiguredDivisor {
    pub fn new(mults: Vec<u32>, gram: Vec<Vec<i64>>, k_degrees: Vec<i64>) -> Result<Self> {
        let labels = (0..mults.len()).map(|i| alloc::format!("C{i}")).collect();
        Self::with_labels(labels, mults, gram, k_degrees)
    }

    pub fn with_labels(
        labels: Vec<String>,
        mults: Vec<u32>,
        gram: Vec<Vec<i64>>,
        k_degrees: Vec<i64>,
    ) -> Result<Self> {
        let n = mults.len();
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if n == 0 {
            return bad("a configured divisor needs at least one component".into());
        }
        if labels.len() != n || k_degrees.len() != n || gram.len() != n {
            return bad("labels, gram and k_degrees must match the number of components".into());
        }
        if gram.iter().any(|row| row.len() != n) {
            return bad("gram must be square".into());
        }
        if let Some(i) = mults.iter().position(|&m| m == 0) {
            return bad(alloc::format!("multiplicity of component {i} is zero"));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return bad(alloc::format!("gram is not symmetric at ({i}, {j})"));
                }
                if i != j && gram[i][j] < 0 {
                    return bad(alloc::format!(
                        "distinct components {i} and {j} meet negatively"
                    ));
                }
            }
            if (i128::from(gram[i][i]) + i128::from(k_degrees[i])) % 2 != 0 {
                return bad(alloc::format!(
                    "component {i}: C^2 + K.C = {} is odd",
                    i128::from(gram[i][i]) + i128::from(k_degrees[i])
                ));
            }
        }
        Ok(ConfiguredDivisor { labels, mults, gram, k_degrees })
    }

    pub fn len(&self) -> usize {
        self.mults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mults(&self) -> &[u32] {
        &self.mults
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn k_degrees(&self) -> &[i64] {
        &self.k_degrees
    }

    /// `x.y` for multiplicity vectors on the same components.
    pub fn dot(&self, x: &[u32], y: &[u32]) -> Result<i128> {
        let mut acc = 0i128;
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                let term = i128::from(a)
                    .checked_mul(i128::from(b))
                    .and_then(|t| t.checked_mul(i128::from(self.gram[i][j])))
                    .ok_or(Error::Overflow)?;
                acc = acc.checked_add(term).ok_or(Error::Overflow)?;
            }
        }
        Ok(acc)
    }

    pub fn self_intersection(&self) -> Result<i128> {
        self.dot(&self.mults, &self.mults)
    }

    pub fn k_dot(&self) -> Result<i128> {
        self.mults.iter().zip(&self.k_degrees).try_fold(0i128, |acc, (&m, &k)| {
            acc.checked_add(i128::from(m) * i128::from(k)).ok_or(Error::Overflow)
        })
    }

    /// The divisor `sum x_i C_i` for `0 <= x <= m`, `x != 0`, keeping only the
    /// components that occur.
    pub fn sub_divisor(&self, x: &[u32]) -> Result<Self> {
        if x.len() != self.len() || x.iter().zip(&self.mults).any(|(a, m)| a > m) {
            return Err(Error::InvalidInput("not a sub-divisor".into()));
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&i| x[i] > 0).collect();
        if keep.is_empty() {
            return Err(Error::InvalidInput("empty sub-divisor".into()));
        }
        Ok(ConfiguredDivisor {
            labels: keep.iter().map(|&i| self.labels[i].clone()).collect(),
            mults: keep.iter().map(|&i| x[i]).collect(),
            gram: keep.iter().map(|&i| keep.iter().map(|&j| self.gram[i][j]).collect()).collect(),
            k_degrees: keep.iter().map(|&i| self.k_degrees[i]).collect(),
        })
    }

    fn vector_count(&self) -> u128 {
        self.mults
            .iter()
            .fold(1u128, |acc, &m| acc.saturating_mul(u128::from(m) + 1))
    }

    fn check_budget(&self, budget: u64) -> Result<()> {
        let required = self.vector_count();
        if required > u128::from(budget) {
            return Err(Error::BudgetExceeded { required, budget });
        }
        Ok(())
    }
}

/// Advance `x` to the next vector with `0 <= x <= bound` in lexicographic
/// order; `false` once it wraps around to zero.
fn odometer(x: &mut [u32], bound: &[u32]) -> bool {
    for i in (0..x.len()).rev() {
        if x[i] < bound[i] {
            x[i] += 1;
            return true;
        }
        x[i] = 0;
    }
    false
}

/// Result of the exhaustive split search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    /// `min D_1.D_2`, or `None` when `D` has no split (one reduced
    /// component), which counts as m-connected for every m.
    pub min_value: Option<i128>,
    /// Lexicographically smallest `D_1` attaining the minimum, with `D_2`.
    pub witness: Option<(Vec<u32>, Vec<u32>)>,
    pub splits_examined: u64,
}

impl DecompositionReport {
    pub fn is_m_connected(&self, m: i128) -> bool {
        self.min_value.is_none_or(|v| v >= m)
    }
}

pub fn analyze_decompositions(d: &ConfiguredDivisor, budget: u64) -> Result<DecompositionReport> {
    d.check_budget(budget)?;
    let n = d.len();
    let mut x = vec![0u32; n];
    let mut best: Option<(i128, Vec<u32>)> = None;
    let mut examined = 0u64;
    while odometer(&mut x, &d.mults) {
        if x == d.mults {
            continue;
        }
        let rest: Vec<u32> = d.mults.iter().zip(&x).map(|(m, a)| m - a).collect();
        let v = d.dot(&x, &rest)?;
        examined += 1;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x.clone()));
        }
    }
    Ok(match best {
        None => DecompositionReport { min_value: None, witness: None, splits_examined: 0 },
        Some((v, w)) => {
            let rest = d.mults.iter().zip(&w).map(|(m, a)| m - a).collect();
            DecompositionReport {
                min_value: Some(v),
                witness: Some((w, rest)),
                splits_examined: examined,
            }
        }
    })
}

/// Squares of every sub-divisor `0 <= x <= D`, indexed in mixed radix, so
/// that `y.(x - y) = (x^2 - y^2 - (x - y)^2) / 2` is a table lookup. Meant
/// for repeated connectedness queries on sub-divisors of one `D`.
#[derive(Debug, Clone)]
pub struct SplitTable {
    bound: Vec<u32>,
    stride: Vec<usize>,
    squares: Vec<i128>,
}

impl SplitTable {
    pub fn new(d: &ConfiguredDivisor, budget: u64) -> Result<Self> {
        d.check_budget(budget)?;
        let n = d.len();
        let mut stride = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * (d.mults[i + 1] as usize + 1);
        }
        let size = stride[0] * (d.mults[0] as usize + 1);
        let mut squares = vec![0i128; size];
        let mut x = vec![0u32; n];
        let mut idx = 0usize;
        while odometer(&mut x, &d.mults) {
            idx += 1;
            // Peel one copy of the last nonzero component k:
            // x^2 = (x - C_k)^2 + 2 (x - C_k).C_k + C_k^2.
            let k = (0..n).rev().find(|&i| x[i] > 0).expect("nonzero");
            let mut cross = 0i128;
            for (j, &xj) in x.iter().enumerate() {
                let c = if j == k { xj - 1 } else { xj };
                cross = cross
                    .checked_add(i128::from(c) * i128::from(d.gram[j][k]))
                    .ok_or(Error::Overflow)?;
            }
            squares[idx] = squares[idx - stride[k]]
                .checked_add(2 * cross + i128::from(d.gram[k][k]))
                .ok_or(Error::Overflow)?;
        }
        Ok(SplitTable { bound: d.mults.clone(), stride, squares })
    }

    pub fn index(&self, x: &[u32]) -> usize {
        x.iter().zip(&self.stride).map(|(&a, &s)| a as usize * s).sum()
    }

    pub fn square(&self, x: &[u32]) -> i128 {
        self.squares[self.index(x)]
    }

    /// Square of the sub-divisor at a mixed-radix index.
    pub fn square_at(&self, index: usize) -> i128 {
        self.squares[index]
    }

    /// `min z.(y - z)` over proper splits of `y`, with the lexicographically
    /// smallest minimizing `z`; `None` when `y` has no split.
    pub fn min_split(&self, y: &[u32]) -> Option<(i128, Vec<u32>)> {
        debug_assert!(y.iter().zip(&self.bound).all(|(a, b)| a <= b));
        let iy = self.index(y);
        let qy = self.squares[iy];
        let mut z = vec![0u32; y.len()];
        let mut best: Option<(i128, Vec<u32>)> = None;
        while odometer(&mut z, y) {
            let iz = self.index(&z);
            if iz == iy {
                continue;
            }
            let v = (qy - self.squares[iz] - self.squares[iy - iz]) / 2;
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, z.clone()));
            }
        }
        best
    }
}

/// Exact leading principal minors; negative definite iff the k-th minor
/// has sign `(-1)^k` for every k.
pub fn is_negative_definite(gram: &[Vec<i64>]) -> bool {
    let n = gram.len();
    (1..=n).all(|k| {
        let det = determinant(
            gram[..k].iter().map(|row| row[..k].iter().map(|&v| BigInt::from(v)).collect()).collect(),
        );
        if k % 2 == 0 {
            det.is_positive()
        } else {
            det.is_negative()
        }
    })
}

/// Bareiss fraction-free elimination.
pub fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = if n == 0 { BigInt::from(1) } else { m[n - 1][n - 1].clone() };
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// `D^2 = -1`, `K.D = -1`, `D` 1-connected and the components span a
/// negative definite lattice.
pub fn is_minus_one_divisor(d: &ConfiguredDivisor, budget: u64) -> Result<bool> {
    if d.self_intersection()? != -1 || d.k_dot()? != -1 {
        return Ok(false);
    }
    if !analyze_decompositions(d, budget)?.is_m_connected(1) {
        return Ok(false);
    }
    Ok(is_negative_definite(&d.gram))
}

/// Shape of a split `L = A + B` with `A.B = 1`, ordered so `A^2 <= B^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OneConnCase {
    /// `A^2 = -1`, `L.A = 0`.
    ExceptionalPart,
    /// `A^2 = 0`, `L.A = 1`.
    ZeroSquarePart,
    /// `A^2 = B^2 = 1`, `L^2 = 4`.
    TwoLines,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneConnSplit {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub a_squared: i128,
    pub b_squared: i128,
    pub l_dot_a: i128,
    pub case: OneConnCase,
    pub a_one_connected: bool,
    pub b_one_connected: bool,
}

/// Classifies every split `L = A + B` with `A.B = 1` (each unordered pair
/// once). The caller asserts `L` big and nef.
pub fn check_one_connected_splits(l: &ConfiguredDivisor, budget: u64) -> Result<Vec<OneConnSplit>> {
    l.check_budget(budget)?;
    let l_sq = l.self_intersection()?;
    let n = l.len();
    let mut x = vec![0u32; n];
    let mut out = Vec::new();
    while odometer(&mut x, &l.mults) {
        let rest: Vec<u32> = l.mults.iter().zip(&x).map(|(m, a)| m - a).collect();
        if rest.iter().all(|&r| r == 0) || x > rest || l.dot(&x, &rest)? != 1 {
            continue;
        }
        let (sx, sr) = (l.dot(&x, &x)?, l.dot(&rest, &rest)?);
        let (a, b, a_sq, b_sq) =
            if sx <= sr { (x.clone(), rest, sx, sr) } else { (rest, x.clone(), sr, sx) };
        let case = match (a_sq, b_sq) {
            (-1, _) => OneConnCase::ExceptionalPart,
            (0, _) => OneConnCase::ZeroSquarePart,
            (1, 1) if l_sq == 4 => OneConnCase::TwoLines,
            _ => OneConnCase::Violation,
        };
        let connected = |v: &[u32]| -> Result<bool> {
            Ok(analyze_decompositions(&l.sub_divisor(v)?, budget)?.is_m_connected(1))
        };
        out.push(OneConnSplit {
            l_dot_a: l.dot(&l.mults, &a)?,
            a_one_connected: connected(&a)?,
            b_one_connected: connected(&b)?,
            a,
            b,
            a_squared: a_sq,
            b_squared: b_sq,
            case,
        });
    }
    if out.is_empty() {
        return Err(Error::Precondition("no split with A.B = 1".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubDivisorViolation {
    pub a: Vec<u32>,
    pub d_dot_a: i128,
    pub a_squared: i128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSquareReport {
    pub d_squared: i128,
    pub zero_connected: bool,
    pub min_value: Option<i128>,
    pub violations: Vec<SubDivisorViolation>,
}

impl ZeroSquareReport {
    pub fn holds(&self) -> bool {
        self.d_squared == 0 && self.zero_connected && self.violations.is_empty()
    }
}

/// For `D` nef with `D^2 = 0` (caller's assertion; `D^2` is rechecked):
/// every `0 < A <= D` has `D.A = 0` and `A^2 <= 0`, and `D` is 0-connected.
pub fn zero_square_nef_structure(d: &ConfiguredDivisor, budget: u64) -> Result<ZeroSquareReport> {
    let report = analyze_decompositions(d, budget)?;
    let mut x = vec![0u32; d.len()];
    let mut violations = Vec::new();
    while odometer(&mut x, &d.mults) {
        let (da, aa) = (d.dot(&d.mults, &x)?, d.dot(&x, &x)?);
        if da != 0 || aa > 0 {
            violations.push(SubDivisorViolation { a: x.clone(), d_dot_a: da, a_squared: aa });
        }
    }
    Ok(ZeroSquareReport {
        d_squared: d.self_intersection()?,
        zero_connected: report.is_m_connected(0),
        min_value: report.min_value,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cd(mults: &[u32], gram: &[&[i64]]) -> ConfiguredDivisor {
        let gram: Vec<Vec<i64>> = gram.iter().map(|r| r.to_vec()).collect();
        // K.C = -2 - C^2 + 2 p_a with p_a = 0.
        let k = (0..gram.len()).map(|i| -2 - gram[i][i]).collect();
        ConfiguredDivisor::new(mults.to_vec(), gram, k).unwrap()
    }

    #[test]
    fn conic_fibre() {
        let d = cd(&[1, 1], &[&[-1, 1], &[1, -1]]);
        let r = analyze_decompositions(&d, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.min_value, Some(1));
        assert_eq!(r.witness, Some((vec![0, 1], vec![1, 0])));
        assert!(!is_minus_one_divisor(&d, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn doubled_minus_two_curve() {
        let d = cd(&[2], &[&[-2]]);
        let r = analyze_decompositions(&d, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.min_value, Some(-2));
        assert_eq!(r.splits_examined, 1);
    }

    #[test]
    fn reduced_irreducible_has_no_split() {
        let d = cd(&[1], &[&[3]]);
        let r = analyze_decompositions(&d, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.min_value, None);
        assert!(r.is_m_connected(1000));
    }

    #[test]
    fn minus_one_divisors() {
        assert!(is_minus_one_divisor(&cd(&[1], &[&[-1]]), DEFAULT_BUDGET).unwrap());
        // E_1 - E_2 + E_2: total transform of a point blown up twice.
        let chain = cd(&[1, 1], &[&[-2, 1], &[1, -1]]);
        assert!(is_minus_one_divisor(&chain, DEFAULT_BUDGET).unwrap());
        let not = cd(&[2, 1], &[&[-1, 1], &[1, -2]]);
        assert_eq!(not.self_intersection().unwrap(), -2);
        assert!(!is_minus_one_divisor(&not, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn one_connected_cases() {
        let zero = cd(&[1, 1], &[&[0, 1], &[1, 0]]);
        let r = check_one_connected_splits(&zero, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].case, OneConnCase::ZeroSquarePart);
        assert_eq!(r[0].l_dot_a, 1);
        let lines = cd(&[1, 1], &[&[1, 1], &[1, 1]]);
        assert_eq!(
            check_one_connected_splits(&lines, DEFAULT_BUDGET).unwrap()[0].case,
            OneConnCase::TwoLines
        );
        let bad = cd(&[1, 1], &[&[-2, 1], &[1, 3]]);
        assert_eq!(
            check_one_connected_splits(&bad, DEFAULT_BUDGET).unwrap()[0].case,
            OneConnCase::Violation
        );
        let none = cd(&[1, 1], &[&[0, 2], &[2, 0]]);
        assert!(check_one_connected_splits(&none, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn zero_square_structure() {
        let fibres = cd(&[1, 1], &[&[0, 0], &[0, 0]]);
        let r = zero_square_nef_structure(&fibres, DEFAULT_BUDGET).unwrap();
        assert!(r.holds());
        assert_eq!(r.min_value, Some(0));
        assert!(zero_square_nef_structure(&cd(&[3], &[&[0]]), DEFAULT_BUDGET).unwrap().holds());
        let bad = cd(&[1, 1], &[&[1, 0], &[0, -1]]);
        let r = zero_square_nef_structure(&bad, DEFAULT_BUDGET).unwrap();
        assert!(!r.holds());
        assert!(r.violations.iter().any(|v| v.a == [1, 0] && v.a_squared == 1));
    }

    #[test]
    fn budget_is_enforced() {
        let d = cd(&[9, 9, 9], &[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]]);
        assert_eq!(
            analyze_decompositions(&d, 999),
            Err(Error::BudgetExceeded { required: 1000, budget: 999 })
        );
        assert!(analyze_decompositions(&d, 1000).is_ok());
    }

    #[test]
    fn invalid_configurations() {
        let g = vec![vec![-1, -1], vec![-1, -1]];
        assert!(ConfiguredDivisor::new(vec![1, 1], g, vec![-1, -1]).is_err());
        let g = vec![vec![-1, 1], vec![0, -1]];
        assert!(ConfiguredDivisor::new(vec![1, 1], g, vec![-1, -1]).is_err());
        assert!(ConfiguredDivisor::new(vec![1], vec![vec![-1]], vec![0]).is_err());
        assert!(ConfiguredDivisor::new(vec![0], vec![vec![-1]], vec![-1]).is_err());
    }

    #[test]
    fn table_matches_direct_search() {
        let d = cd(&[2, 1, 2], &[&[-2, 1, 0], &[1, -1, 2], &[0, 2, -3]]);
        let t = SplitTable::new(&d, DEFAULT_BUDGET).unwrap();
        let direct = analyze_decompositions(&d, DEFAULT_BUDGET).unwrap();
        let (v, w) = t.min_split(d.mults()).unwrap();
        assert_eq!(Some(v), direct.min_value);
        assert_eq!(Some(w), direct.witness.map(|(a, _)| a));
        assert_eq!(t.square(d.mults()), d.self_intersection().unwrap());
    }

    #[test]
    fn determinants() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
            rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
        };
        assert_eq!(determinant(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(determinant(m(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]])), BigInt::from(4));
        assert!(is_negative_definite(&[vec![-2, 1], vec![1, -2]]));
        assert!(!is_negative_definite(&[vec![-1, 1], vec![1, -1]]));
    }
}
