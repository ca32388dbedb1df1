//! Dense GF(2) matrices, PLU factorization and the linear maps used by the
//! Toffoli-free arithmetic circuits.

use std::fmt;

use thiserror::Error;

use crate::gf2_field::{BinaryPoly, FieldSpec, ModulusSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular ({rows}x{cols}, rank {rank})")]
    Singular { rows: usize, cols: usize, rank: usize },
    #[error("expected a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("constant multiplier is zero")]
    ZeroMultiplier,
    #[error("modulus degree {degree} is not below {n}")]
    DegreeTooLarge { degree: usize, n: usize },
    #[error("no correction coefficients (omega = 0)")]
    NoCorrection,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Row-major bit-packed matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty {rows}x{cols} matrix");
        let stride = cols.div_ceil(64);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Matrix whose column `k` holds the coefficients of `cols[k]`.
    pub fn from_columns(rows: usize, cols: &[BinaryPoly]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (c, p) in cols.iter().enumerate() {
            for r in p.support() {
                assert!(r < rows, "column {c} has degree {r} >= {rows}");
                m.set(r, c, true);
            }
        }
        m
    }

    /// Matrix from 0/1 strings, one per row, column 0 first.
    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().trim().len()).unwrap_or(0);
        if rows.is_empty() || cols == 0 {
            return Err(LinalgError::Parse {
                line: 1,
                msg: "empty matrix".into(),
            });
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (r, s) in rows.iter().enumerate() {
            let s = s.as_ref().trim();
            if s.len() != cols {
                return Err(LinalgError::Parse {
                    line: r + 1,
                    msg: format!("row has {} entries, expected {cols}", s.len()),
                });
            }
            for (c, ch) in s.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    _ => {
                        return Err(LinalgError::Parse {
                            line: r + 1,
                            msg: format!("unexpected character `{ch}`"),
                        })
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| if self.get(r, c) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols, "({r},{c}) out of range");
        let w = &mut self.data[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "({r},{c}) out of range");
        self.data[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row(&mut self, src: usize, dst: usize) {
        if src == dst {
            for w in &mut self.data[dst * self.stride..(dst + 1) * self.stride] {
                *w = 0;
            }
            return;
        }
        for k in 0..self.stride {
            let v = self.data[src * self.stride + k];
            self.data[dst * self.stride + k] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn row_poly(&self, r: usize) -> BinaryPoly {
        BinaryPoly::from_words(self.row_words(r).to_vec())
    }

    pub fn column(&self, c: usize) -> BinaryPoly {
        let mut p = BinaryPoly::zero();
        for r in 0..self.rows {
            if self.get(r, c) {
                p.set_coeff(r, true);
            }
        }
        p
    }

    /// Indices of the nonzero entries in row `r`.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        self.row_poly(r).support()
    }

    pub fn column_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c)).collect()
    }

    pub fn popcount(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of nonzero entries off the main diagonal.
    pub fn offdiag_popcount(&self) -> usize {
        let diag = (0..self.rows.min(self.cols)).filter(|&i| self.get(i, i)).count();
        self.popcount() - diag
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `M·v` where `v` supplies the `cols` input coefficients.
    pub fn mat_vec(&self, v: &BinaryPoly) -> BinaryPoly {
        let mut vw = v.truncate(self.cols).words().to_vec();
        vw.resize(self.stride, 0);
        let mut out = BinaryPoly::zero();
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(&vw)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                out.set_coeff(r, true);
            }
        }
        out
    }

    pub fn mat_vec_bits(&self, v: &[bool]) -> Vec<bool> {
        let out = self.mat_vec(&BinaryPoly::from_bits(v));
        out.to_bits(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_poly(r).support() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row_poly(r).support() {
                for w in 0..out.stride {
                    out.data[r * out.stride + w] ^= other.data[k * other.stride + w];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut m = Self::zeros(r1 - r0, c1 - c0);
        for r in r0..r1 {
            for c in self.row_poly(r).support() {
                if (c0..c1).contains(&c) {
                    m.set(r - r0, c - c0, true);
                }
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_row(rank, r);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| a.get(r, c)) else {
                return Err(LinalgError::Singular {
                    rows: n,
                    cols: n,
                    rank: self.rank(),
                });
            };
            a.swap_rows(c, p);
            inv.swap_rows(c, p);
            for r in 0..n {
                if r != c && a.get(r, c) {
                    a.xor_row(c, r);
                    inv.xor_row(c, r);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| !self.get(r, c)))
    }

    pub fn is_unit_lower_triangular(&self) -> bool {
        (0..self.rows).all(|r| {
            (r..self.cols).all(|c| self.get(r, c) == (r == c))
        })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for s in self.to_row_strings() {
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

/// Factorization `M = P·L·U` with `P = s_0·s_1·…·s_k` for the recorded
/// transpositions `s_i`.
///
/// For an `r×c` source with `r ≥ c`, `L` is `r×c` unit lower trapezoidal and
/// `U` is `c×c` upper triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLUFactors {
    pub swaps: Vec<(usize, usize)>,
    pub l: BitMatrix,
    pub u: BitMatrix,
}

impl PLUFactors {
    /// The permutation as a dense matrix.
    pub fn p_matrix(&self) -> BitMatrix {
        let n = self.l.rows();
        let mut p = BitMatrix::identity(n);
        for &(a, b) in self.swaps.iter().rev() {
            p.swap_rows(a, b);
        }
        p
    }

    /// Number of non-trivial transpositions.
    pub fn swap_count(&self) -> usize {
        self.swaps.iter().filter(|(a, b)| a != b).count()
    }

    pub fn reconstruct(&self) -> BitMatrix {
        self.p_matrix().mul(&self.l.mul(&self.u))
    }
}

/// PLU factorization of a square invertible matrix.
///
/// Pivoting takes the first nonzero entry at or below the diagonal and uses
/// row swaps only, so the result is deterministic.
pub fn plu_decompose(m: &BitMatrix) -> Result<PLUFactors> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    plu_decompose_tall(m)
}

/// PLU factorization of an `r×c` matrix of full column rank, `r ≥ c`.
pub fn plu_decompose_tall(m: &BitMatrix) -> Result<PLUFactors> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows < cols {
        return Err(LinalgError::Singular {
            rows,
            cols,
            rank: m.rank(),
        });
    }
    let mut a = m.clone();
    let mut l = BitMatrix::zeros(rows, cols);
    let mut swaps = Vec::new();
    for j in 0..cols {
        let Some(p) = (j..rows).find(|&r| a.get(r, j)) else {
            return Err(LinalgError::Singular {
                rows,
                cols,
                rank: m.rank(),
            });
        };
        if p != j {
            a.swap_rows(j, p);
            l.swap_rows(j, p);
        }
        swaps.push((j, p));
        l.set(j, j, true);
        for r in j + 1..rows {
            if a.get(r, j) {
                a.xor_row(j, r);
                l.set(r, j, true);
            }
        }
    }
    let u = a.submatrix(0, cols, 0, cols);
    Ok(PLUFactors { swaps, l, u })
}

/// `n×n` matrix of `f ↦ f·h mod p`.
pub fn const_mul_matrix(h: &BinaryPoly, field: &FieldSpec) -> Result<BitMatrix> {
    let h = h.rem(&field.p).expect("nonzero modulus");
    if h.is_zero() {
        return Err(LinalgError::ZeroMultiplier);
    }
    let cols: Vec<BinaryPoly> = (0..field.n)
        .map(|k| h.shl(k).rem(&field.p).expect("nonzero modulus"))
        .collect();
    Ok(BitMatrix::from_columns(field.n, &cols))
}

/// `d×(n−d)` matrix whose column `k` is `x^{k+d} mod m_i`, so that
/// `f mod m_i = f_{0..d} + M·f_{d..n}`.
pub fn reduction_matrix(m_i: &BinaryPoly, n: usize) -> Result<BitMatrix> {
    let d = m_i.degree().unwrap_or(0);
    if d == 0 || d >= n {
        return Err(LinalgError::DegreeTooLarge { degree: d, n });
    }
    let cols: Vec<BinaryPoly> = (0..n - d)
        .map(|k| BinaryPoly::monomial(k + d).rem(m_i).expect("nonzero modulus"))
        .collect();
    Ok(BitMatrix::from_columns(d, &cols))
}

/// Full `d×n` reduction map `f ↦ f mod m_i` for `f` with `n` coefficients.
pub fn residue_map(m_i: &BinaryPoly, n: usize) -> BitMatrix {
    let d = m_i.degree().expect("nonzero modulus");
    let cols: Vec<BinaryPoly> = (0..n)
        .map(|k| BinaryPoly::monomial(k).rem(m_i).expect("nonzero modulus"))
        .collect();
    BitMatrix::from_columns(d.max(1), &cols)
}

/// `n×n` matrix of `f ↦ f^{2^k} mod p`.
pub fn squaring_matrix(field: &FieldSpec, k: usize) -> BitMatrix {
    let cols: Vec<BinaryPoly> = (0..field.n)
        .map(|j| {
            BinaryPoly::monomial(j)
                .frobenius_mod(k, &field.p)
                .expect("nonzero modulus")
        })
        .collect();
    BitMatrix::from_columns(field.n, &cols)
}

/// `n×d_i` map whose column `k` is `(x^k·q_i mod m) mod p`.
pub fn crt_recombination_matrix(
    q_i: &BinaryPoly,
    d_i: usize,
    m: &BinaryPoly,
    p: &BinaryPoly,
) -> BitMatrix {
    let n = p.degree().expect("nonzero modulus");
    let cols: Vec<BinaryPoly> = (0..d_i)
        .map(|k| {
            q_i.shl(k)
                .rem(m)
                .and_then(|v| v.rem(p))
                .expect("nonzero modulus")
        })
        .collect();
    BitMatrix::from_columns(n, &cols)
}

/// `n×ω` map `H_∞` whose column `j` is `(x^i + (x^i mod m)) mod p` for
/// `i = 2n − 1 − ω + j`.
pub fn correction_matrix(set: &ModulusSet, p: &BinaryPoly) -> Result<BitMatrix> {
    if set.omega == 0 {
        return Err(LinalgError::NoCorrection);
    }
    let n = p.degree().expect("nonzero modulus");
    let start = 2 * set.n - 1 - set.omega;
    let cols: Vec<BinaryPoly> = (0..set.omega)
        .map(|j| {
            let xi = BinaryPoly::monomial(start + j);
            let r = xi.rem(&set.m).expect("nonzero modulus");
            (&xi ^ &r).rem(p).expect("nonzero modulus")
        })
        .collect();
    Ok(BitMatrix::from_columns(n, &cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(exps: &[usize]) -> BinaryPoly {
        BinaryPoly::from_exponents(exps)
    }

    fn gf8() -> FieldSpec {
        FieldSpec::new(p(&[3, 1, 0])).unwrap()
    }

    #[test]
    fn constant_multiplication_columns() {
        let f = gf8();
        assert_eq!(const_mul_matrix(&BinaryPoly::one(), &f).unwrap(), BitMatrix::identity(3));
        let m = const_mul_matrix(&BinaryPoly::x(), &f).unwrap();
        assert_eq!([m.column(0), m.column(1), m.column(2)], [p(&[1]), p(&[2]), p(&[1, 0])]);
        assert!(const_mul_matrix(&BinaryPoly::zero(), &f).is_err());
    }

    #[test]
    fn constant_multiplication_163() {
        let f = FieldSpec::standard(163).unwrap();
        let h = p(&[150, 77, 12, 1]);
        let a = p(&[162, 100, 5, 0]);
        let m = const_mul_matrix(&h, &f).unwrap();
        assert_eq!(m.mat_vec(&a), f.mul(&a, &h));
        let plu = plu_decompose(&m).unwrap();
        assert_eq!(plu.reconstruct(), m);
    }

    #[test]
    fn reduction_columns() {
        assert!(reduction_matrix(&p(&[2]), 4).unwrap().is_zero());
        let m = reduction_matrix(&p(&[2, 1, 0]), 4).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!([m.column(0), m.column(1)], [p(&[1, 0]), p(&[0])]);
        assert!(reduction_matrix(&p(&[4, 1, 0]), 4).is_err());
    }

    #[test]
    fn squaring_columns() {
        let f = gf8();
        let m = squaring_matrix(&f, 1);
        assert_eq!([m.column(0), m.column(1), m.column(2)], [p(&[0]), p(&[2]), p(&[2, 1])]);
        assert_eq!(squaring_matrix(&f, 3), BitMatrix::identity(3));
        assert_eq!(squaring_matrix(&f, 2), m.mul(&m));
        let f = FieldSpec::standard(163).unwrap();
        assert_eq!(squaring_matrix(&f, 163), BitMatrix::identity(163));
    }

    #[test]
    fn plu_trivial_cases() {
        let plu = plu_decompose(&BitMatrix::identity(5)).unwrap();
        assert_eq!(plu.swap_count(), 0);
        assert_eq!(plu.l, BitMatrix::identity(5));
        assert_eq!(plu.u, BitMatrix::identity(5));
        let swap = BitMatrix::from_row_strings(&["01", "10"]).unwrap();
        let plu = plu_decompose(&swap).unwrap();
        assert_eq!(plu.p_matrix(), swap);
        assert_eq!(plu.l, BitMatrix::identity(2));
        assert_eq!(plu.u, BitMatrix::identity(2));
        let singular = BitMatrix::from_row_strings(&["11", "11"]).unwrap();
        assert!(plu_decompose(&singular).is_err());
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn recombination_reproduces_products_on_two_factors() {
        // m = x(x+1) over GF(4) with p = x^2+x+1.
        let field = FieldSpec::small(2).unwrap();
        let set = ModulusSet::from_pairs(2, &[(p(&[1]), 1), (p(&[1, 0]), 1)]);
        let q = crate::gf2_field::crt_constants(&set).unwrap();
        let mats: Vec<BitMatrix> = q
            .iter()
            .map(|qi| crt_recombination_matrix(qi, 1, &set.m, &field.p))
            .collect();
        let corr = correction_matrix(&set, &field.p).unwrap();
        for f in 0..4 {
            for g in 0..4 {
                let (fa, ga) = (BinaryPoly::from_u64(f), BinaryPoly::from_u64(g));
                let prod = fa.mul(&ga);
                let mut acc = BinaryPoly::zero();
                for (fac, mat) in set.factors.iter().zip(&mats) {
                    acc = &acc ^ &mat.mat_vec(&prod.rem(&fac.modulus).unwrap());
                }
                let high: Vec<bool> = (0..set.omega).map(|j| prod.coeff(2 * 2 - 1 - set.omega + j)).collect();
                acc = &acc ^ &BinaryPoly::from_bits(&corr.mat_vec_bits(&high));
                assert_eq!(acc, field.mul(&fa, &ga), "f={f} g={g}");
            }
        }
    }

    #[test]
    fn correction_shapes() {
        let f163 = FieldSpec::standard(163).unwrap();
        let set = crate::data::standard_modulus_set(163).unwrap();
        assert!(correction_matrix(&set, &f163.p).is_err());
        let f283 = FieldSpec::standard(283).unwrap();
        let set = crate::data::standard_modulus_set(283).unwrap();
        let h = correction_matrix(&set, &f283.p).unwrap();
        assert_eq!((h.rows(), h.cols()), (283, 4));
    }
}
