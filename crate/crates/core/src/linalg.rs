//! Exact linear algebra over GF(2).
//!
//! Vectors live in a single `u64` word: coordinate `i` of a length-`m`
//! vector is bit `m - 1 - i`, so the textual encoding (coordinate 0 first)
//! and numeric order of the word agree. Subspaces are kept in reduced
//! row-echelon form, which makes `==` on [`Subspace`] a test of equality
//! of the underlying sets.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 64;

/// Default refusal threshold for [`enumerate_subspaces`].
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        !0
    } else {
        (1u64 << bits) - 1
    }
}

#[inline]
fn lead_bit(word: u64) -> Option<usize> {
    (word != 0).then(|| 63 - word.leading_zeros() as usize)
}

fn check_dim(len: usize) -> Result<()> {
    if len > MAX_DIM {
        Err(Error::TooWide(len))
    } else {
        Ok(())
    }
}

/// A vector in GF(2)^m, m ≤ 64.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: u8,
    word: u64,
}

impl BitVector {
    /// The zero vector of length `len`.
    ///
    /// # Panics
    ///
    /// Panics if `len > 64`.
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_DIM, "bit vector length {len} exceeds {MAX_DIM}");
        Self {
            len: len as u8,
            word: 0,
        }
    }

    /// The standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zero(len);
        v.set(i, true);
        v
    }

    /// Builds a vector from its packed word; bits above `len` are dropped.
    pub fn from_word(len: usize, word: u64) -> Self {
        let mut v = Self::zero(len);
        v.word = word & low_mask(len);
        v
    }

    /// Builds a vector from the coordinates that are set.
    pub fn from_support(len: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zero(len);
        for i in support {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_support(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        )
    }

    /// Ambient dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn word(&self) -> u64 {
        self.word
    }

    #[inline]
    fn bit_of(&self, i: usize) -> u64 {
        debug_assert!(i < self.dim(), "coordinate {i} out of range");
        1u64 << (self.dim() - 1 - i)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.word & self.bit_of(i) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let bit = self.bit_of(i);
        if value {
            self.word |= bit;
        } else {
            self.word &= !bit;
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.word == 0
    }

    pub fn weight(&self) -> usize {
        self.word.count_ones() as usize
    }

    /// Index of the first nonzero coordinate.
    pub fn leading(&self) -> Option<usize> {
        lead_bit(self.word).map(|b| self.dim() - 1 - b)
    }

    /// Coordinates that are set, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&i| self.get(i))
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        self.same_dim(other)?;
        Ok((self.word & other.word).count_ones() % 2 == 1)
    }

    fn same_dim(&self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVector) -> Result<BitVector> {
        let len = self.dim() + other.dim();
        check_dim(len)?;
        let word = if other.dim() == 64 {
            other.word
        } else {
            (self.word << other.dim()) | other.word
        };
        Ok(BitVector::from_word(len, word))
    }
}

impl BitXor for BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: BitVector) -> BitVector {
        assert_eq!(self.len, rhs.len, "adding vectors of different lengths");
        BitVector {
            len: self.len,
            word: self.word ^ rhs.word,
        }
    }
}

impl BitXorAssign for BitVector {
    fn bitxor_assign(&mut self, rhs: BitVector) {
        *self = *self ^ rhs;
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_DIM || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::BadBitString(s.to_string()));
        }
        Ok(BitVector::from_support(
            s.len(),
            s.bytes()
                .enumerate()
                .filter(|(_, b)| *b == b'1')
                .map(|(i, _)| i),
        ))
    }
}

/// A dense matrix over GF(2) stored as rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn new(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        check_dim(cols)?;
        if let Some(bad) = rows.iter().find(|r| r.dim() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.dim(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Parses rows from their textual encodings. All rows must share one
    /// length; `cols` is needed only to type an empty matrix.
    pub fn from_strs<S: AsRef<str>>(cols: usize, rows: &[S]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<BitVector>>>()?;
        Self::new(cols, rows)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> BitVector {
        self.rows[i]
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.rows.iter().map(ToString::to_string).collect()
    }

    /// `M·x`: one inner product per row.
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.dim(),
            });
        }
        check_dim(self.rows.len())?;
        let mut out = BitVector::zero(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            out.set(i, row.dot(x)?);
        }
        Ok(out)
    }

    /// `cᵀ·M`: the sum of the rows selected by `coeffs`.
    pub fn combine(&self, coeffs: &BitVector) -> Result<BitVector> {
        if coeffs.dim() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                found: coeffs.dim(),
            });
        }
        Ok(coeffs
            .support()
            .fold(BitVector::zero(self.cols), |acc, i| acc ^ self.rows[i]))
    }

    pub fn transpose(&self) -> Result<BitMatrix> {
        check_dim(self.rows.len())?;
        let rows = (0..self.cols)
            .map(|c| BitVector::from_bools(&self.rows.iter().map(|r| r.get(c)).collect::<Vec<_>>()))
            .collect();
        BitMatrix::new(self.rows.len(), rows)
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Ok(BitMatrix {
            cols: self.cols,
            rows,
        })
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(ToString::to_string))
            .finish()
    }
}

/// Eliminates `words` in place (bit `width - 1` is the first column) and
/// returns the rank. Rows `0..rank` end up in reduced echelon form with
/// strictly decreasing leading bits.
fn eliminate(words: &mut [u128], width: usize) -> usize {
    let mut rank = 0;
    for bit in (0..width).rev() {
        let mask = 1u128 << bit;
        let Some(p) = (rank..words.len()).find(|&i| words[i] & mask != 0) else {
            continue;
        };
        words.swap(rank, p);
        let pivot = words[rank];
        for (i, w) in words.iter_mut().enumerate() {
            if i != rank && *w & mask != 0 {
                *w ^= pivot;
            }
        }
        rank += 1;
        if rank == words.len() {
            break;
        }
    }
    rank
}

/// Reduced row-echelon form with zero rows removed, plus the rank.
pub fn rref(mat: &BitMatrix) -> (BitMatrix, usize) {
    let mut words: Vec<u128> = mat.rows.iter().map(|r| r.word as u128).collect();
    let rank = eliminate(&mut words, mat.cols);
    let rows = words[..rank]
        .iter()
        .map(|&w| BitVector::from_word(mat.cols, w as u64))
        .collect();
    (
        BitMatrix {
            cols: mat.cols,
            rows,
        },
        rank,
    )
}

/// Finds some `x` with `mat·x = rhs`, or `None` if the system is
/// inconsistent. Free variables are set to zero.
pub fn solve(mat: &BitMatrix, rhs: &BitVector) -> Result<Option<BitVector>> {
    if rhs.dim() != mat.row_count() {
        return Err(Error::DimensionMismatch {
            expected: mat.row_count(),
            found: rhs.dim(),
        });
    }
    let cols = mat.cols;
    // augmented column sits in bit 0, below every variable column
    let mut words: Vec<u128> = mat
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| ((r.word as u128) << 1) | rhs.get(i) as u128)
        .collect();
    let rank = eliminate(&mut words, cols + 1);
    let mut x = BitVector::zero(cols);
    for &w in &words[..rank] {
        let lead = 127 - w.leading_zeros() as usize;
        if lead == 0 {
            return Ok(None);
        }
        if w & 1 == 1 {
            x.set(cols - lead, true);
        }
    }
    Ok(Some(x))
}

/// A subspace of GF(2)^m held by its canonical (RREF) basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: BitMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        assert!(ambient_dim <= MAX_DIM);
        Self {
            basis: BitMatrix {
                cols: ambient_dim,
                rows: Vec::new(),
            },
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: BitMatrix::identity(ambient_dim),
        }
    }

    /// Row space of `mat`.
    pub fn row_space(mat: &BitMatrix) -> Self {
        Self { basis: rref(mat).0 }
    }

    pub fn span(ambient_dim: usize, vectors: impl IntoIterator<Item = BitVector>) -> Result<Self> {
        Ok(Self::row_space(&BitMatrix::new(
            ambient_dim,
            vectors.into_iter().collect(),
        )?))
    }

    /// Parses `["1000", "0011"]`-style spanning vectors.
    pub fn from_strs<S: AsRef<str>>(ambient_dim: usize, vectors: &[S]) -> Result<Self> {
        Ok(Self::row_space(&BitMatrix::from_strs(
            ambient_dim,
            vectors,
        )?))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.rows.len()
    }

    /// The canonical basis.
    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// Pivot coordinates of the canonical basis, ascending.
    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .rows
            .iter()
            .map(|r| r.leading().expect("canonical basis has no zero rows"))
            .collect()
    }

    fn check(&self, v: &BitVector) -> Result<()> {
        if v.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: v.dim(),
            });
        }
        Ok(())
    }

    fn check_same(&self, other: &Subspace) -> Result<()> {
        if other.ambient_dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: other.ambient_dim(),
            });
        }
        Ok(())
    }

    /// Reduces `v` modulo the subspace; zero iff `v` is a member.
    fn reduce(&self, mut v: BitVector) -> BitVector {
        for row in &self.basis.rows {
            let lead = row.leading().unwrap();
            if v.get(lead) {
                v ^= *row;
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        self.check(v)?;
        Ok(self.reduce(*v).is_zero())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        self.check_same(other)?;
        Ok(other.basis.rows.iter().all(|r| self.reduce(*r).is_zero()))
    }

    /// Coordinates of `v` with respect to the canonical basis.
    pub fn coordinates(&self, v: &BitVector) -> Result<Option<BitVector>> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(BitVector::from_bools(
            &self
                .pivots()
                .into_iter()
                .map(|p| v.get(p))
                .collect::<Vec<_>>(),
        )))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        Ok(Self::row_space(&self.basis.stack(&other.basis)?))
    }

    /// Zassenhaus intersection: eliminate `[a | a]` stacked on `[b | 0]`;
    /// the rows whose left half vanishes span `a ∩ b`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        let m = self.ambient_dim();
        let low = |v: &BitVector| v.word() as u128;
        let mut words: Vec<u128> = self
            .basis
            .rows
            .iter()
            .map(|a| (low(a) << m) | low(a))
            .chain(other.basis.rows.iter().map(|b| low(b) << m))
            .collect();
        let rank = eliminate(&mut words, 2 * m);
        let right_mask = if m == 64 {
            u64::MAX as u128
        } else {
            (1u128 << m) - 1
        };
        let rows: Vec<BitVector> = words[..rank]
            .iter()
            .filter(|&&w| w >> m == 0)
            .map(|&w| BitVector::from_word(m, (w & right_mask) as u64))
            .collect();
        Subspace::span(m, rows)
    }

    /// The image of a coordinate subspace of GF(2)^rows under `basis`:
    /// `{ cᵀ·basis : c ∈ coords }`.
    pub fn image_of(coords: &Subspace, basis: &BitMatrix) -> Result<Subspace> {
        if coords.ambient_dim() != basis.row_count() {
            return Err(Error::DimensionMismatch {
                expected: basis.row_count(),
                found: coords.ambient_dim(),
            });
        }
        let vectors = coords
            .basis
            .rows
            .iter()
            .map(|c| basis.combine(c))
            .collect::<Result<Vec<_>>>()?;
        Subspace::span(basis.col_count(), vectors)
    }

    /// Every element, in ascending textual order. Only sensible for small
    /// dimensions.
    pub fn elements(&self) -> Vec<BitVector> {
        assert!(
            self.dim() < 32,
            "refusing to list 2^{} elements",
            self.dim()
        );
        let m = self.ambient_dim();
        let mut out: Vec<BitVector> = (0u64..1 << self.dim())
            .map(|c| {
                self.basis
                    .combine(&BitVector::from_word(self.dim(), c))
                    .unwrap_or(BitVector::zero(m))
            })
            .collect();
        out.sort();
        out
    }

    pub fn nonzero_elements(&self) -> Vec<BitVector> {
        let mut all = self.elements();
        all.remove(0);
        all
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, r) in self.basis.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace[{}]{self}", self.ambient_dim())
    }
}

pub fn span_contains(s: &Subspace, v: &BitVector) -> Result<bool> {
    s.contains(v)
}

/// Span of the union of `parts`. An empty list is rejected because its
/// ambient dimension cannot be inferred; pass a zero subspace instead.
pub fn subspace_sum<'a>(parts: impl IntoIterator<Item = &'a Subspace>) -> Result<Subspace> {
    let mut iter = parts.into_iter();
    let first = iter.next().ok_or(Error::EmptySum)?;
    let mut rows = first.basis.rows.clone();
    for p in iter {
        first.check_same(p)?;
        rows.extend_from_slice(&p.basis.rows);
    }
    Subspace::span(first.ambient_dim(), rows)
}

pub fn subspace_intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersect(b)
}

/// Number of `d`-dimensional subspaces of GF(2)^m, saturating at
/// `u128::MAX`.
pub fn gaussian_binomial(m: usize, d: usize) -> u128 {
    if d > m {
        return 0;
    }
    let d = d.min(m - d);
    let mut count: u128 = 1;
    for i in 0..d {
        let num = (1u128 << (m - i)) - 1;
        let den = (1u128 << (i + 1)) - 1;
        match count.checked_mul(num) {
            Some(p) => count = p / den,
            None => return u128::MAX,
        }
    }
    count
}

/// All `d`-dimensional subspaces of GF(2)^m, each exactly once, in
/// lexicographic order of their canonical bases. Refused when the count
/// exceeds [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_subspaces(ambient_dim: usize, dim: usize) -> Result<SubspaceIter> {
    enumerate_subspaces_capped(ambient_dim, dim, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_subspaces_capped(
    ambient_dim: usize,
    dim: usize,
    cap: u128,
) -> Result<SubspaceIter> {
    check_dim(ambient_dim)?;
    if dim > ambient_dim {
        return Err(Error::InvalidParams(format!(
            "cannot have a {dim}-dimensional subspace of GF(2)^{ambient_dim}"
        )));
    }
    let count = gaussian_binomial(ambient_dim, dim);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    Ok(SubspaceIter {
        m: ambient_dim,
        d: dim,
        rows: Vec::with_capacity(dim),
        state: IterState::Fresh,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

/// Lazy lexicographic enumeration of canonical bases.
///
/// Row `i` is feasible given rows `0..i` when its leading bit lies below
/// the previous row's, is clear in every earlier row, and enough positions
/// clear in all rows so far remain below it to host the later pivots.
#[derive(Debug, Clone)]
pub struct SubspaceIter {
    m: usize,
    d: usize,
    rows: Vec<u64>,
    state: IterState,
}

impl SubspaceIter {
    fn feasible(&self, i: usize, v: u64) -> bool {
        let Some(lead) = lead_bit(v) else {
            return false;
        };
        let bound = if i == 0 {
            self.m
        } else {
            lead_bit(self.rows[i - 1]).unwrap()
        };
        if lead >= bound {
            return false;
        }
        let used = self.rows[..i].iter().fold(0u64, |acc, r| acc | r);
        if used & (1u64 << lead) != 0 {
            return false;
        }
        let free = !(used | v) & low_mask(lead);
        free.count_ones() as usize >= self.d - i - 1
    }

    /// Smallest feasible row value strictly above `cur` for row `i`.
    fn next_row(&self, i: usize, cur: u64) -> Option<u64> {
        (0..self.m)
            .filter(|&b| cur & (1u64 << b) == 0)
            .map(|b| (cur & !low_mask(b + 1)) | (1u64 << b))
            .find(|&cand| self.feasible(i, cand))
    }

    fn fill_from(&mut self, start: usize) -> bool {
        self.rows.truncate(start);
        for i in start..self.d {
            match self.next_row(i, 0) {
                Some(v) => self.rows.push(v),
                None => return false,
            }
        }
        true
    }

    fn current(&self) -> Subspace {
        Subspace {
            basis: BitMatrix {
                cols: self.m,
                rows: self
                    .rows
                    .iter()
                    .map(|&w| BitVector::from_word(self.m, w))
                    .collect(),
            },
        }
    }

    fn advance(&mut self) -> bool {
        for i in (0..self.d).rev() {
            if let Some(v) = self.next_row(i, self.rows[i]) {
                self.rows.truncate(i);
                self.rows.push(v);
                if self.fill_from(i + 1) {
                    return true;
                }
            }
        }
        false
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        let ok = match self.state {
            IterState::Done => return None,
            IterState::Fresh => self.fill_from(0),
            IterState::Running => self.d > 0 && self.advance(),
        };
        if ok {
            self.state = IterState::Running;
            Some(self.current())
        } else {
            self.state = IterState::Done;
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn sub(m: usize, rows: &[&str]) -> Subspace {
        Subspace::from_strs(m, rows).unwrap()
    }

    #[test]
    fn textual_encoding_round_trips() {
        let x = v("0110");
        assert_eq!(x.to_string(), "0110");
        assert!(x.get(1) && x.get(2) && !x.get(0));
        assert_eq!(x.leading(), Some(1));
        assert!("01a".parse::<BitVector>().is_err());
        assert!("".parse::<BitVector>().is_err());
    }

    #[test]
    fn rref_examples() {
        let (r, rank) = rref(&BitMatrix::from_strs(2, &["11", "01"]).unwrap());
        assert_eq!(r.to_strings(), ["10", "01"]);
        assert_eq!(rank, 2);

        let (r, rank) = rref(&BitMatrix::from_strs(3, &["101", "101"]).unwrap());
        assert_eq!(r.to_strings(), ["101"]);
        assert_eq!(rank, 1);

        let spanning = BitMatrix::from_strs(4, &["1100", "0110", "0011", "0001", "1111"]).unwrap();
        let (r, rank) = rref(&spanning);
        assert_eq!(rank, 4);
        assert_eq!(r, BitMatrix::identity(4));
    }

    #[test]
    fn membership() {
        // coordinates 1 and 3 of GF(2)^4
        let s = sub(4, &["0100", "0001"]);
        assert!(s.contains(&v("0101")).unwrap());
        assert!(!s.contains(&v("0010")).unwrap());
        assert!(s.contains(&v("010")).is_err());

        let u0 = sub(4, &["1000", "0011"]);
        assert!(span_contains(&u0, &v("0011")).unwrap());
    }

    #[test]
    fn sums_and_intersections() {
        let a = sub(4, &["0100"]);
        let b = sub(4, &["0010"]);
        assert_eq!(subspace_sum([&a, &b]).unwrap(), sub(4, &["0110", "0010"]));
        assert_eq!(subspace_sum([&a, &a]).unwrap(), a);
        assert_eq!(subspace_sum(std::iter::empty()), Err(Error::EmptySum));

        let p = sub(4, &["0100", "0010"]);
        let q = sub(4, &["0010", "0001"]);
        assert_eq!(p.intersect(&q).unwrap(), sub(4, &["0010"]));
        assert_eq!(p.intersect(&p).unwrap(), p);

        let u0 = sub(4, &["1000", "0011"]);
        let u1 = sub(4, &["0100", "1001"]);
        assert!(u0.intersect(&u1).unwrap().is_zero());
        assert!(u0.sum(&u1).unwrap().is_full());
        assert!(u0.intersect(&sub(5, &["10000"])).is_err());
    }

    #[test]
    fn solve_cases() {
        let id = BitMatrix::identity(5);
        assert_eq!(solve(&id, &v("10110")).unwrap(), Some(v("10110")));

        // rank 2, consistent
        let m = BitMatrix::from_strs(3, &["110", "011", "101"]).unwrap();
        let rhs = v("101");
        let x = solve(&m, &rhs).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), rhs);

        assert_eq!(solve(&m, &v("100")).unwrap(), None);
        assert!(solve(&m, &v("10")).is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        let lines: Vec<_> = enumerate_subspaces(2, 1).unwrap().collect();
        let shown: Vec<_> = lines.iter().map(|s| s.basis().to_strings()).collect();
        assert_eq!(shown, [vec!["01"], vec!["10"], vec!["11"]]);
        assert_eq!(enumerate_subspaces(4, 1).unwrap().count(), 15);
        assert_eq!(enumerate_subspaces(4, 2).unwrap().count(), 35);
        assert_eq!(enumerate_subspaces(4, 0).unwrap().count(), 1);
        assert_eq!(enumerate_subspaces(4, 4).unwrap().count(), 1);
        assert_eq!(enumerate_subspaces(64, 64).unwrap().count(), 1);
        assert!(enumerate_subspaces(3, 4).is_err());
        assert!(matches!(
            enumerate_subspaces(30, 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_is_sorted_distinct_and_canonical() {
        for m in 0..=5 {
            for d in 0..=m {
                let all: Vec<Subspace> = enumerate_subspaces(m, d).unwrap().collect();
                assert_eq!(all.len() as u128, gaussian_binomial(m, d), "m={m} d={d}");
                for w in all.windows(2) {
                    assert!(w[0].basis().rows() < w[1].basis().rows());
                }
                for s in &all {
                    assert_eq!(Subspace::row_space(s.basis()), *s);
                    assert_eq!(s.dim(), d);
                }
            }
        }
    }

    #[test]
    fn gaussian_binomial_values() {
        assert_eq!(gaussian_binomial(4, 2), 35);
        assert_eq!(gaussian_binomial(5, 2), 155);
        assert_eq!(gaussian_binomial(6, 3), 1395);
        assert_eq!(gaussian_binomial(3, 5), 0);
    }

    #[test]
    fn transpose_and_combine() {
        let m = BitMatrix::from_strs(3, &["110", "011"]).unwrap();
        assert_eq!(m.transpose().unwrap().to_strings(), ["10", "11", "01"]);
        assert_eq!(m.combine(&v("11")).unwrap(), v("101"));
    }

    fn arb_subspace(m: usize) -> impl Strategy<Value = Subspace> {
        prop::collection::vec(0u64..(1 << m), 0..=m).prop_map(move |ws| {
            Subspace::span(m, ws.into_iter().map(|w| BitVector::from_word(m, w))).unwrap()
        })
    }

    fn arb_matrix() -> impl Strategy<Value = BitMatrix> {
        (1usize..=8).prop_flat_map(|m| {
            prop::collection::vec(0u64..(1 << m), 0..10).prop_map(move |ws| {
                BitMatrix::new(
                    m,
                    ws.into_iter().map(|w| BitVector::from_word(m, w)).collect(),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rref_is_a_projection(mat in arb_matrix()) {
            let (once, rank) = rref(&mat);
            let (twice, rank2) = rref(&once);
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(rank, rank2);
        }

        #[test]
        fn dimension_formula((a, b) in (1usize..=8).prop_flat_map(|m| (arb_subspace(m), arb_subspace(m)))) {
            let s = a.sum(&b).unwrap();
            let i = a.intersect(&b).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
            prop_assert!(a.contains_subspace(&i).unwrap() && b.contains_subspace(&i).unwrap());
        }

        #[test]
        fn sum_contains_both_parts((a, b, w) in (1usize..=8).prop_flat_map(|m| (arb_subspace(m), arb_subspace(m), 0u64..(1 << m)))) {
            let x = BitVector::from_word(a.ambient_dim(), w);
            let s = subspace_sum([&a, &b]).unwrap();
            if a.contains(&x).unwrap() || b.contains(&x).unwrap() {
                prop_assert!(s.contains(&x).unwrap());
            }
        }

        #[test]
        fn solve_substitutes_back(mat in arb_matrix(), w in any::<u64>()) {
            let rhs = BitVector::from_word(mat.row_count(), w);
            match solve(&mat, &rhs).unwrap() {
                Some(x) => prop_assert_eq!(mat.mul_vec(&x).unwrap(), rhs),
                // inconsistent means rhs is outside the column space
                None => {
                    let cols = mat.transpose().unwrap();
                    let colspace = Subspace::row_space(&cols);
                    prop_assert!(!colspace.contains(&rhs).unwrap());
                }
            }
        }
    }
}
