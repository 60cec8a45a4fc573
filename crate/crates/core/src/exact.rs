//! Exact rational matrices: determinants, minors, characteristic
//! polynomials and the minor-product polynomials `p_σ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexSet;
use crate::pattern::SparsityPattern;
use crate::permutation::Permutation;
use crate::spectral::RealMatrix;

/// Characteristic polynomials are guarded at this size; coefficient growth
/// beyond it makes exact arithmetic impractical.
pub const MAX_CHAR_POLY_N: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("index {0} outside the matrix")]
    IndexOutOfRange(usize),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("malformed rational {0:?}")]
    BadRational(String),
    #[error("exact characteristic polynomial is limited to n <= {MAX_CHAR_POLY_N}, got {0}")]
    TooLarge(usize),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![BigRational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn diagonal(values: &[BigRational]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, ExactError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(ExactError::DimensionMismatch(r.len(), n));
            }
            entries.extend(r.iter().map(|&v| rat(v)));
        }
        Ok(Self { n, entries })
    }

    pub fn from_rational_rows(rows: Vec<Vec<BigRational>>) -> Result<Self, ExactError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(ExactError::DimensionMismatch(r.len(), n));
            }
            entries.extend(r);
        }
        Ok(Self { n, entries })
    }

    /// Exact binary value of every float entry.
    pub fn from_real(m: &RealMatrix) -> Result<Self, ExactError> {
        let n = m.n();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                entries.push(BigRational::from_float(v).ok_or(ExactError::NonFinite(v))?);
            }
        }
        Ok(Self { n, entries })
    }

    /// Nearest-float image.
    pub fn to_real(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j).to_f64().unwrap_or(f64::NAN));
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.n + j] = v;
    }

    /// Whether every nonzero entry sits on a free entry of `p`.
    pub fn respects(&self, p: &SparsityPattern) -> bool {
        p.n() == self.n && (0..self.n).all(|i| (0..self.n).all(|j| p.is_free(i, j) || self.get(i, j).is_zero()))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ExactError> {
        if self.n != other.n {
            return Err(ExactError::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> BigRational {
        (0..self.n).fold(BigRational::zero(), |acc, i| acc + self.get(i, i))
    }

    /// `P_σ A P_σ⁻¹`: entry `(a, b)` moves to `(σ(a), σ(b))`.
    pub fn conjugate(&self, sigma: &Permutation) -> Result<Self, ExactError> {
        if sigma.len() != self.n {
            return Err(ExactError::DimensionMismatch(self.n, sigma.len()));
        }
        let mut out = Self::zeros(self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                out.set(sigma.apply(a), sigma.apply(b), self.get(a, b).clone());
            }
        }
        Ok(out)
    }

    /// Principal submatrix on `indices` (kept in the given order).
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<Self, ExactError> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(ExactError::IndexOutOfRange(bad));
        }
        let k = indices.len();
        let mut out = Self::zeros(k);
        for (r, &i) in indices.iter().enumerate() {
            for (c, &j) in indices.iter().enumerate() {
                out.set(r, c, self.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Determinant of the leading `k × k` block (`1` for `k = 0`).
    pub fn leading_minor(&self, k: usize) -> BigRational {
        let idx: Vec<usize> = (0..k.min(self.n)).collect();
        determinant_of(self, &idx)
    }

    pub fn determinant(&self) -> BigRational {
        self.leading_minor(self.n)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self, ExactError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(ExactError::Singular)?;
            if pivot != col {
                for j in 0..n {
                    a.entries.swap(pivot * n + j, col * n + j);
                    inv.entries.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                a.entries[col * n + j] /= &p;
                inv.entries[col * n + j] /= &p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let da = &f * a.get(col, j);
                    let di = &f * inv.get(col, j);
                    a.entries[r * n + j] -= da;
                    inv.entries[r * n + j] -= di;
                }
            }
        }
        Ok(inv)
    }

    /// Entries as `"num/den"` strings (`"num"` for integers), row-major rows.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.n).map(|i| (0..self.n).map(|j| rational_to_string(self.get(i, j))).collect()).collect()
    }

    pub fn from_strings(rows: &[Vec<String>]) -> Result<Self, ExactError> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rational_rows(parsed)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_strings().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        Self::from_strings(&rows).map_err(serde::de::Error::custom)
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let bad = || ExactError::BadRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Determinant of the principal block on `indices` by fraction-free
/// (Bareiss) elimination after clearing row denominators.
fn determinant_of(m: &ExactMatrix, indices: &[usize]) -> BigRational {
    let k = indices.len();
    if k == 0 {
        return BigRational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    for &i in indices {
        let lcm = indices.iter().fold(BigInt::one(), |acc, &j| acc.lcm(m.get(i, j).denom()));
        let row: Vec<BigInt> = indices
            .iter()
            .map(|&j| {
                let v = m.get(i, j);
                v.numer() * (&lcm / v.denom())
            })
            .collect();
        scale *= &lcm;
        a.push(row);
    }
    BigRational::new(bareiss(a), scale)
}

/// Fraction-free Gaussian elimination; every division is exact.
pub fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// `det_1(A), .., det_n(A)`.
pub fn leading_principal_minors(a: &ExactMatrix) -> Vec<BigRational> {
    (1..=a.n()).map(|k| a.leading_minor(k)).collect()
}

/// Product of the leading principal minors `det_1 .. det_{n-1}` of
/// `P_σ A P_σ⁻¹`. `det_n` is deliberately left out; see
/// [`p_sigma_with_determinant`].
pub fn p_sigma(a: &ExactMatrix, sigma: &Permutation) -> Result<BigRational, ExactError> {
    let c = a.conjugate(sigma)?;
    let mut acc = BigRational::one();
    for k in 1..a.n() {
        let m = c.leading_minor(k);
        if m.is_zero() {
            return Ok(m);
        }
        acc *= m;
    }
    Ok(acc)
}

/// `p_σ(A) · det(A)`: nonzero exactly when every leading principal minor of
/// the conjugated matrix is nonzero.
pub fn p_sigma_with_determinant(a: &ExactMatrix, sigma: &Permutation) -> Result<BigRational, ExactError> {
    let p = p_sigma(a, sigma)?;
    if p.is_zero() {
        return Ok(p);
    }
    Ok(p * a.determinant())
}

/// Coefficients `[p_1, .., p_n]` of `det(sI − A) = sⁿ + p_1 sⁿ⁻¹ + .. + p_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    pub coefficients: Vec<BigRational>,
}

impl CharPoly {
    /// Coefficient `p_k` (`p_0 = 1`).
    pub fn coefficient(&self, k: usize) -> BigRational {
        if k == 0 {
            BigRational::one()
        } else {
            self.coefficients[k - 1].clone()
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    /// Exact Routh test: `true` iff every root has negative real part.
    pub fn is_hurwitz(&self) -> bool {
        let n = self.degree();
        if self.coefficients.iter().any(|c| !c.is_positive()) {
            return false;
        }
        let width = n / 2 + 1;
        let row_of = |start: usize| -> Vec<BigRational> {
            (0..width)
                .map(|j| {
                    let k = start + 2 * j;
                    if k <= n {
                        self.coefficient(k)
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        };
        let mut prev = row_of(0);
        let mut cur = row_of(1);
        for _ in 1..n {
            if !cur[0].is_positive() {
                return false;
            }
            let mut next = vec![BigRational::zero(); width];
            for j in 0..width - 1 {
                next[j] = (&cur[0] * &prev[j + 1] - &prev[0] * &cur[j + 1]) / &cur[0];
            }
            prev = std::mem::replace(&mut cur, next);
        }
        cur[0].is_positive()
    }
}

/// Characteristic polynomial by the Faddeev-LeVerrier recurrence:
/// `M_1 = I`, `c_k = −tr(A M_k)/k`, `M_{k+1} = A M_k + c_k I`.
pub fn char_poly(a: &ExactMatrix) -> Result<CharPoly, ExactError> {
    let n = a.n();
    if n > MAX_CHAR_POLY_N {
        return Err(ExactError::TooLarge(n));
    }
    let mut coefficients = Vec::with_capacity(n);
    let mut m = ExactMatrix::identity(n);
    for k in 1..=n {
        let am = a.mul(&m)?;
        let c = -am.trace() / rat(k as i64);
        if k < n {
            m = am;
            for i in 0..n {
                m.entries[i * n + i] += &c;
            }
        }
        coefficients.push(c);
    }
    Ok(CharPoly { coefficients })
}

/// `det((B⁻¹)_I) − det(B_{Iᶜ}) / det(B)`, identically zero by Jacobi's
/// complementary-minor identity.
pub fn jacobi_residual(b: &ExactMatrix, subset: VertexSet) -> Result<BigRational, ExactError> {
    let n = b.n();
    if subset.iter().any(|v| v >= n) {
        return Err(ExactError::IndexOutOfRange(subset.iter().find(|&v| v >= n).unwrap_or(n)));
    }
    let det = b.determinant();
    if det.is_zero() {
        return Err(ExactError::Singular);
    }
    let inv = b.inverse()?;
    let inside: Vec<usize> = subset.iter().collect();
    let outside: Vec<usize> = (0..n).filter(|v| !subset.contains(*v)).collect();
    Ok(determinant_of(&inv, &inside) - determinant_of(b, &outside) / det)
}

/// Nonzero integer drawn uniformly from `{−bound..bound} ∖ {0}`.
pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> i64 {
    let v = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Random integer matrix supported exactly on `p`.
pub fn random_integer_matrix<R: Rng + ?Sized>(p: &SparsityPattern, bound: i64, rng: &mut R) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(p.n());
    for (i, j) in p.entries() {
        m.set(i, j, rat(random_nonzero(rng, bound)));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows).unwrap()
    }

    fn r(v: i64) -> BigRational {
        rat(v)
    }

    #[test]
    fn minors_examples() {
        assert_eq!(leading_principal_minors(&m(&[&[0, -1], &[2, -1]])), vec![r(0), r(2)]);
        assert_eq!(leading_principal_minors(&ExactMatrix::identity(4)), vec![r(1); 4]);
        assert_eq!(leading_principal_minors(&m(&[&[2, 0], &[0, 4]])), vec![r(2), r(8)]);
    }

    #[test]
    fn p_sigma_examples() {
        for s in Permutation::all(3) {
            assert_eq!(p_sigma(&ExactMatrix::identity(3), &s).unwrap(), r(1));
        }
        let a = m(&[&[0, -1], &[2, -1]]);
        assert_eq!(p_sigma(&a, &Permutation::identity(2)).unwrap(), r(0));
        let swap = Permutation::from_one_line(&[2, 1]).unwrap();
        assert_eq!(a.conjugate(&swap).unwrap(), m(&[&[-1, 2], &[-1, 0]]));
        assert_eq!(p_sigma(&a, &swap).unwrap(), r(-1));
        assert_eq!(p_sigma_with_determinant(&a, &swap).unwrap(), r(-2));
    }

    #[test]
    fn char_poly_examples() {
        let cp = char_poly(&m(&[&[0, -1], &[2, -1]])).unwrap();
        assert_eq!(cp.coefficients, vec![r(1), r(2)]);
        assert!(cp.is_hurwitz());
        let cp = char_poly(&ExactMatrix::identity(2)).unwrap();
        assert_eq!(cp.coefficients, vec![r(-2), r(1)]);
        assert!(!cp.is_hurwitz());
    }

    #[test]
    fn zero_diagonal_has_zero_trace_coefficient() {
        let p = SparsityPattern::zero_diagonal(4).unwrap();
        let mut rng = rand::thread_rng();
        let a = random_integer_matrix(&p, 1000, &mut rng);
        assert!(char_poly(&a).unwrap().coefficients[0].is_zero());
    }

    #[test]
    fn routh_decisions() {
        // (s+1)(s+2)(s+3) = s³ + 6s² + 11s + 6
        let cp = CharPoly { coefficients: vec![r(6), r(11), r(6)] };
        assert!(cp.is_hurwitz());
        // s³ + s² + s + 1 has roots ±i
        let cp = CharPoly { coefficients: vec![r(1), r(1), r(1)] };
        assert!(!cp.is_hurwitz());
        // s³ + s² + 2s + 8: roots with positive real part
        let cp = CharPoly { coefficients: vec![r(1), r(2), r(8)] };
        assert!(!cp.is_hurwitz());
        // (s+1)^4
        let cp = CharPoly { coefficients: vec![r(4), r(6), r(4), r(1)] };
        assert!(cp.is_hurwitz());
        assert!(CharPoly { coefficients: vec![r(3)] }.is_hurwitz());
        assert!(!CharPoly { coefficients: vec![r(0)] }.is_hurwitz());
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[0, 2, 1], &[1, 0, 3], &[4, 5, 0]]);
        // cofactor expansion: 0 - 2(0-12) + 1(5-0) = 29
        assert_eq!(a.determinant(), r(29));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), ExactMatrix::identity(3));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(ExactError::Singular));
    }

    #[test]
    fn rational_determinant() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let a = ExactMatrix::from_rational_rows(vec![vec![half.clone(), r(1)], vec![r(3), half.clone()]]).unwrap();
        assert_eq!(a.determinant(), BigRational::new(BigInt::from(-11), BigInt::from(4)));
    }

    #[test]
    fn jacobi_examples() {
        let b = m(&[&[2, 0], &[0, 4]]);
        assert!(jacobi_residual(&b, VertexSet::singleton(0)).unwrap().is_zero());
        let i4 = ExactMatrix::identity(4);
        for bits in 0..16 {
            assert!(jacobi_residual(&i4, VertexSet(bits)).unwrap().is_zero());
        }
        assert_eq!(jacobi_residual(&m(&[&[1, 1], &[1, 1]]), VertexSet(1)), Err(ExactError::Singular));
    }

    #[test]
    fn string_round_trip() {
        let a = ExactMatrix::from_strings(&[vec!["1/2".into(), "-3".into()], vec!["0".into(), "4/6".into()]]).unwrap();
        assert_eq!(a.to_strings(), vec![vec!["1/2", "-3"], vec!["0", "2/3"]]);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn float_rationalization_is_exact() {
        let mut f = RealMatrix::zeros(1);
        f.set(0, 0, 0.1);
        let e = ExactMatrix::from_real(&f).unwrap();
        assert_eq!(e.get(0, 0).to_f64(), Some(0.1));
        assert_ne!(e.get(0, 0), &BigRational::new(BigInt::from(1), BigInt::from(10)));
    }
}
