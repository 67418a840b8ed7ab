//! Scalars, vectors, determinants and the two sign predicates.
//!
//! Everything geometric in this crate is written against [`Field`]. The
//! production instantiation is [`BigRational`](num_rational::BigRational),
//! for which every predicate is exact. `f64` also implements the trait so the
//! same code can be run approximately, but none of the genericity guarantees
//! hold there.
//!
//! Orientation convention: `Positive` means the determinant of the edge
//! vectors `p_i - p_0` is positive (counterclockwise in the plane,
//! right-handed in space).

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{NumAssignRef, NumRef, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Ordered integral domain with exact division where a quotient is known
/// to exist.
pub trait Ring:
    Clone + fmt::Debug + PartialOrd + NumRef + NumAssignRef + Signed + Send + Sync + 'static
{
}

impl<R> Ring for R where
    R: Clone + fmt::Debug + PartialOrd + NumRef + NumAssignRef + Signed + Send + Sync + 'static
{
}

/// An ordered field the geometry can be computed over.
pub trait Field: Ring {
    /// Where denominators are cleared to for fraction-free work.
    type Ring: Ring;

    fn from_i64(v: i64) -> Self;

    /// A positive multiple of `row` with entries in [`Field::Ring`].
    fn clear_denominators(row: &[Self]) -> Vec<Self::Ring>;

    fn from_ring(r: Self::Ring) -> Self;

    /// Divides `row` by a positive common factor to keep entries small.
    fn reduce_ring_row(row: &mut [Self::Ring]) {
        let _ = row;
    }

    /// Determinant of a square matrix given by rows.
    fn determinant(rows: Vec<Vec<Self>>) -> Self {
        bareiss(rows)
    }

    fn sign(&self) -> Sign {
        Sign::of(self)
    }

    /// Sign of [`Field::determinant`].
    fn determinant_sign(rows: Vec<Vec<Self>>) -> Sign {
        Self::determinant(rows).sign()
    }

    /// Multiplies `coeffs` by some positive factor to keep entries small.
    /// Used on hyperplane and inequality coefficients, where only the
    /// direction matters.
    fn primitive_scale(coeffs: &mut [Self]) {
        let _ = coeffs;
    }

    /// Sign of `normal · p - offset`.
    fn affine_sign(normal: &[Self], p: &[Self], offset: &Self) -> Sign {
        let mut acc = -offset.clone();
        for (a, b) in normal.iter().zip(p) {
            acc += a.clone() * b;
        }
        acc.sign()
    }
}

impl Field for BigRational {
    type Ring = BigInt;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    /// Scales by the least common denominator.
    fn clear_denominators(row: &[Self]) -> Vec<BigInt> {
        if row.iter().all(|x| x.denom().is_one()) {
            return row.iter().map(|x| x.numer().clone()).collect();
        }
        let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
    }

    fn from_ring(r: BigInt) -> Self {
        BigRational::from_integer(r)
    }

    fn reduce_ring_row(row: &mut [BigInt]) {
        let mut g = BigInt::zero();
        for x in row.iter() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
        if !g.is_zero() {
            for x in row.iter_mut() {
                *x /= &g;
            }
        }
    }

    /// Clears denominators row by row and runs Bareiss over the integers.
    fn determinant(rows: Vec<Vec<Self>>) -> Self {
        let mut scale = BigInt::one();
        let int_rows: Vec<Vec<BigInt>> = rows
            .into_iter()
            .map(|row| {
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let ints = row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
                scale *= lcm;
                ints
            })
            .collect();
        BigRational::new(bareiss(int_rows), scale)
    }

    /// Tries a floating-point expansion with a rigorous error bound first.
    fn determinant_sign(rows: Vec<Vec<Self>>) -> Sign {
        filtered_det_sign(&rows).unwrap_or_else(|| Self::determinant(rows).sign())
    }

    /// Accumulates one unreduced fraction; denominators stay positive, so
    /// the numerator carries the sign.
    fn affine_sign(normal: &[Self], p: &[Self], offset: &Self) -> Sign {
        let mut num = -offset.numer().clone();
        let mut den = offset.denom().clone();
        for (a, b) in normal.iter().zip(p) {
            let tn = a.numer() * b.numer();
            let td = a.denom() * b.denom();
            if td == den {
                num += tn;
            } else {
                num = num * &td + tn * &den;
                den *= td;
            }
        }
        Sign::of(&num)
    }

    /// Scales to coprime integers.
    fn primitive_scale(coeffs: &mut [Self]) {
        let lcm = coeffs
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let gcd = coeffs.iter().fold(BigInt::zero(), |acc, x| {
            acc.gcd(&(x.numer() * (&lcm / x.denom())))
        });
        if gcd.is_zero() {
            return;
        }
        let factor = BigRational::new(lcm, gcd);
        for x in coeffs.iter_mut() {
            *x *= &factor;
        }
    }
}

impl Field for f64 {
    type Ring = f64;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn clear_denominators(row: &[Self]) -> Vec<f64> {
        row.to_vec()
    }

    fn from_ring(r: f64) -> Self {
        r
    }
}

/// Largest matrix handled by [`filtered_det_sign`]; the expansion has `n!` terms.
const FILTER_MAX_DIM: usize = 6;

/// Determinant sign from a cofactor expansion in `f64`, or `None` when the
/// rounding error bound does not separate the result from zero.
///
/// Each entry is rounded once and each of the `n!` terms takes `n - 1`
/// products and one addition, so the computed value is off by at most
/// `(n! + 2n) u` times the permanent of the absolute values, `u` the unit
/// roundoff. The bound used is twice that, in units of the machine epsilon.
fn filtered_det_sign(rows: &[Vec<BigRational>]) -> Option<Sign> {
    use num_traits::ToPrimitive;
    let n = rows.len();
    if n == 0 || n > FILTER_MAX_DIM {
        return None;
    }
    let mut m = [[0f64; FILTER_MAX_DIM]; FILTER_MAX_DIM];
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let v = x.to_f64()?;
            if !v.is_finite() || (v != 0.0 && v.abs() < 1e-100) || v.abs() > 1e100 {
                return None;
            }
            m[i][j] = v;
        }
    }
    fn expand(
        m: &[[f64; FILTER_MAX_DIM]; FILTER_MAX_DIM],
        n: usize,
        row: usize,
        cols: u32,
    ) -> (f64, f64) {
        if row == n {
            return (1.0, 1.0);
        }
        let (mut det, mut perm) = (0.0, 0.0);
        let mut parity = false;
        for j in 0..n {
            if cols & (1 << j) != 0 {
                continue;
            }
            let a = m[row][j];
            if a != 0.0 {
                let (d, p) = expand(m, n, row + 1, cols | (1 << j));
                det += if parity { -a * d } else { a * d };
                perm += a.abs() * p;
            }
            parity = !parity;
        }
        (det, perm)
    }
    let (det, perm) = expand(&m, n, 0, 0);
    let terms: f64 = (1..=n).map(|k| k as f64).product();
    let bound = (terms + 2.0 * n as f64) * f64::EPSILON * perm;
    if !det.is_finite() || !bound.is_finite() {
        None
    } else if det > bound {
        Some(Sign::Positive)
    } else if det < -bound {
        Some(Sign::Negative)
    } else {
        None
    }
}

/// Fraction-free Gaussian elimination. Every division is exact in an
/// integral domain, so this is also valid for `BigInt`.
pub(crate) fn bareiss<T>(mut m: Vec<Vec<T>>) -> T
where
    T: Clone + NumRef + NumAssignRef,
{
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    debug_assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            for j in k + 1..n {
                let v = row[j].clone() * &pivot_row[k] - row[k].clone() * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        T::zero() - det
    } else {
        det
    }
}

/// Result of a sign predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Signed>(x: &T) -> Sign {
        if x.is_positive() {
            Sign::Positive
        } else if x.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// A point or direction in `R^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorD<T> {
    coords: Vec<T>,
}

impl<T: Field> VectorD<T> {
    pub fn new(coords: Vec<T>) -> Self {
        VectorD { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        VectorD {
            coords: vec![T::zero(); dim],
        }
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        VectorD::new(values.iter().map(|&v| T::from_i64(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        VectorD::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        VectorD::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        )
    }

    pub fn scale(&self, k: &T) -> Self {
        VectorD::new(self.coords.iter().map(|a| a.clone() * k).collect())
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = T::zero();
        for (a, b) in self.coords.iter().zip(&other.coords) {
            acc += a.clone() * b;
        }
        acc
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    /// Appends one coordinate.
    pub fn extended(&self, last: T) -> Self {
        let mut coords = self.coords.clone();
        coords.push(last);
        VectorD::new(coords)
    }

    /// Drops the last coordinate.
    pub fn truncated(&self) -> Self {
        VectorD::new(self.coords[..self.dim() - 1].to_vec())
    }
}

impl<T> Index<usize> for VectorD<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.coords[i]
    }
}

impl fmt::Display for VectorD<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Arithmetic mean of a non-empty point set.
pub fn centroid<T: Field>(points: &[VectorD<T>]) -> VectorD<T> {
    let dim = points[0].dim();
    let mut acc = VectorD::zeros(dim);
    for p in points {
        acc = acc.add(p);
    }
    let n = T::from_i64(points.len() as i64);
    VectorD::new(acc.into_coords().into_iter().map(|c| c / &n).collect())
}

fn check_dims<T>(points: &[VectorD<T>], dim: usize) -> Result<()> {
    for p in points {
        if p.coords.len() != dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                found: p.coords.len(),
            });
        }
    }
    Ok(())
}

/// Sign of `det[p_i - p_0]` for `k + 1` points in `R^k`.
pub fn orient<T: Field>(points: &[VectorD<T>]) -> Result<Sign> {
    if points.is_empty() {
        return Err(GeomError::InvalidInput(
            "orient needs at least one point".into(),
        ));
    }
    let k = points.len() - 1;
    check_dims(points, k)?;
    let rows = points[1..]
        .iter()
        .map(|p| p.sub(&points[0]).into_coords())
        .collect();
    Ok(T::determinant_sign(rows))
}

/// Positive when `query` is strictly inside the circumsphere of `simplex`,
/// Negative when strictly outside, Zero when cospherical. Independent of the
/// order of the simplex vertices.
pub fn in_sphere<T: Field>(simplex: &[VectorD<T>], query: &VectorD<T>) -> Result<Sign> {
    if simplex.is_empty() {
        return Err(GeomError::InvalidInput("empty simplex".into()));
    }
    let k = simplex.len() - 1;
    check_dims(simplex, k)?;
    check_dims(std::slice::from_ref(query), k)?;
    let o = orient(simplex)?;
    if o == Sign::Zero {
        return Err(GeomError::DegenerateSimplex);
    }
    let q_sq = query.norm_sq();
    let rows = simplex
        .iter()
        .map(|p| {
            let mut row = p.sub(query).into_coords();
            row.push(p.norm_sq() - &q_sq);
            row
        })
        .collect();
    let lifted = T::determinant_sign(rows);
    // The lifted determinant is (-1)^k * orient for a query inside.
    let s = lifted.times(o);
    Ok(if k % 2 == 0 { s } else { s.flip() })
}

/// Dimension of the affine hull of a point set (`None` for an empty set).
pub fn affine_rank<T: Field>(points: &[VectorD<T>]) -> Option<usize> {
    let first = points.first()?;
    let rows: Vec<Vec<T>> = points[1..]
        .iter()
        .map(|p| p.sub(first).into_coords())
        .collect();
    Some(matrix_rank(rows))
}

pub(crate) fn matrix_rank<T: Field>(mut m: Vec<Vec<T>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / &m[rank][col];
            for c in col..cols {
                let v = m[rank][c].clone() * &factor;
                m[r][c] -= v;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve_linear<T: Field>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / &a[col][col];
            for c in col..n {
                let v = a[col][c].clone() * &factor;
                a[r][c] -= v;
            }
            let v = b[col].clone() * &factor;
            b[r] -= v;
        }
    }
    Some(
        b.into_iter()
            .zip(a.iter().enumerate())
            .map(|(bi, (i, row))| bi / &row[i])
            .collect(),
    )
}

/// `n!` as a field element.
pub(crate) fn factorial<T: Field>(n: usize) -> T {
    (1..=n as i64).fold(T::one(), |acc, k| acc * T::from_i64(k))
}

/// Unsigned volume of a full-dimensional simplex given by `k + 1` points in `R^k`.
pub fn simplex_volume<T: Field>(points: &[VectorD<T>]) -> T {
    let k = points.len() - 1;
    let rows = points[1..]
        .iter()
        .map(|p| p.sub(&points[0]).into_coords())
        .collect();
    T::determinant(rows).abs() / factorial::<T>(k)
}

/// Error from [`parse_rational`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number literal {0:?}")]
pub struct ParseScalarError(pub String);

/// Parses `p/q` (integer `p`, positive integer `q`) or a decimal literal
/// such as `-1.25` or `3e-2`. Decimals become exact fractions over powers of
/// ten.
pub fn parse_rational(text: &str) -> std::result::Result<BigRational, ParseScalarError> {
    let err = || ParseScalarError(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = parse_int(p).ok_or_else(err)?;
        if q.starts_with(['+', '-']) {
            return Err(err());
        }
        let q: BigInt = parse_int(q).ok_or_else(err)?;
        if !q.is_positive() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| err())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(err());
    }
    if exponent.unsigned_abs() > 4096 {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| err())?
    };
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(value)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Nearest fraction with the given denominator, ties away from zero.
pub fn rational_from_f64(x: f64, denominator: u64) -> BigRational {
    let scaled = (x * denominator as f64).round();
    BigRational::new(BigInt::from(scaled as i64), BigInt::from(denominator))
}

/// Lossy conversion for display purposes only.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}
