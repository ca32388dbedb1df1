//! Binary polynomials over F2 and arithmetic in GF(2^n).
//!
//! Bit `i` of a [`BinaryPoly`] is the coefficient of `x^i`. The same
//! little-endian order is used for qubit registers everywhere else.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by polynomial and field routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("zero modulus")]
    ZeroModulus,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(String, String),
    #[error("polynomial {0} is not irreducible")]
    Reducible(String),
    #[error("no standard field of degree {0}")]
    UnsupportedDegree(usize),
    #[error("modulus factors {0} and {1} are not coprime")]
    NotCoprime(usize, usize),
    #[error("index {index} exceeds the {available} irreducibles of degree {degree}")]
    IndexOutOfRange {
        degree: usize,
        index: usize,
        available: usize,
    },
    #[error("factor {index} has degree {degree}, which is not below {n}")]
    FactorTooLarge { index: usize, degree: usize, n: usize },
    #[error("{omega} correction coefficients exceed the maximum of {max}")]
    TooManyCorrections { omega: usize, max: usize },
    #[error("empty modulus set")]
    EmptySet,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid polynomial literal: {0}")]
    BadLiteral(String),
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// Polynomial over F2 stored as a little-endian bit vector.
///
/// The word vector never has trailing zero words, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BinaryPoly {
    words: Vec<u64>,
}

impl BinaryPoly {
    pub fn zero() -> Self {
        Self { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn x() -> Self {
        Self::from_u64(2)
    }

    pub fn from_u64(v: u64) -> Self {
        let mut p = Self { words: vec![v] };
        p.normalize();
        p
    }

    pub fn monomial(k: usize) -> Self {
        let mut p = Self::zero();
        p.set_coeff(k, true);
        p
    }

    /// Sum of `x^e` over the given exponents; repeated exponents cancel.
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Self::zero();
        for &e in exps {
            p.flip(e);
        }
        p
    }

    /// Builds a polynomial from little-endian coefficient bits.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        let mut p = Self { words };
        p.normalize();
        p
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        let mut p = Self { words };
        p.normalize();
        p
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn set_coeff(&mut self, i: usize, v: bool) {
        if v {
            if self.words.len() <= i / 64 {
                self.words.resize(i / 64 + 1, 0);
            }
            self.words[i / 64] |= 1 << (i % 64);
        } else if i / 64 < self.words.len() {
            self.words[i / 64] &= !(1 << (i % 64));
            self.normalize();
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = !self.coeff(i);
        self.set_coeff(i, v);
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Exponents of the nonzero coefficients in increasing order.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    /// The first `len` coefficients as booleans.
    pub fn to_bits(&self, len: usize) -> Vec<bool> {
        (0..len).map(|i| self.coeff(i)).collect()
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Keeps the coefficients of `x^0 .. x^{k-1}`.
    pub fn truncate(&self, k: usize) -> Self {
        let mut words: Vec<u64> = self.words.iter().take(k.div_ceil(64)).copied().collect();
        if !k.is_multiple_of(64) {
            if let Some(last) = words.get_mut(k / 64) {
                *last &= (1u64 << (k % 64)) - 1;
            }
        }
        Self::from_words(words)
    }

    /// Multiplication by `x^k`.
    pub fn shl(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.words.len() + k / 64 + 1];
        xor_shifted(&mut out, &self.words, k);
        Self::from_words(out)
    }

    /// Division by `x^k`, discarding the low coefficients.
    pub fn shr(&self, k: usize) -> Self {
        let ws = k / 64;
        let bs = k % 64;
        if ws >= self.words.len() {
            return Self::zero();
        }
        let src = &self.words[ws..];
        let mut out = vec![0u64; src.len()];
        for i in 0..src.len() {
            out[i] = src[i] >> bs;
            if bs != 0 && i + 1 < src.len() {
                out[i] |= src[i + 1] << (64 - bs);
            }
        }
        Self::from_words(out)
    }

    /// Carry-less product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (a, b) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = vec![0u64; a.words.len() + b.words.len() + 1];
        for e in a.support() {
            xor_shifted(&mut out, &b.words, e);
        }
        Self::from_words(out)
    }

    pub fn square(&self) -> Self {
        let mut out = Self::zero();
        for e in self.support() {
            out.set_coeff(2 * e, true);
        }
        out
    }

    /// Quotient and remainder of division by `m`.
    pub fn div_rem(&self, m: &Self) -> Result<(Self, Self)> {
        let dm = m.degree().ok_or(FieldError::ZeroModulus)?;
        let mut r = self.words.clone();
        let mut q = Self::zero();
        let mut top = self.degree();
        while let Some(dr) = top {
            if dr < dm {
                break;
            }
            let shift = dr - dm;
            q.set_coeff(shift, true);
            xor_shifted(&mut r, &m.words, shift);
            top = degree_of(&r, dr);
        }
        Ok((q, Self::from_words(r)))
    }

    pub fn rem(&self, m: &Self) -> Result<Self> {
        let dm = m.degree().ok_or(FieldError::ZeroModulus)?;
        match self.degree() {
            Some(d) if d >= dm => {}
            _ => return Ok(self.clone()),
        }
        let mut r = self.words.clone();
        let mut top = self.degree();
        while let Some(dr) = top {
            if dr < dm {
                break;
            }
            xor_shifted(&mut r, &m.words, dr - dm);
            top = degree_of(&r, dr);
        }
        Ok(Self::from_words(r))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a
    }

    /// Returns `(g, s)` with `g = gcd(self, m)` and `s·self ≡ g (mod m)`.
    pub fn ext_gcd(&self, m: &Self) -> Result<(Self, Self)> {
        if m.is_zero() {
            return Err(FieldError::ZeroModulus);
        }
        let mut r0 = m.clone();
        let mut r1 = self.rem(m)?;
        let mut s0 = Self::zero();
        let mut s1 = Self::one();
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s = &s0 ^ &q.mul(&s1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        Ok((r0, s0.rem(m)?))
    }

    /// Inverse modulo an arbitrary nonzero `m` coprime to `self`.
    pub fn inv_mod(&self, m: &Self) -> Result<Self> {
        let (g, s) = self.ext_gcd(m)?;
        if !g.is_one() {
            return Err(FieldError::NotInvertible(self.to_string(), m.to_string()));
        }
        Ok(s)
    }

    pub fn mul_mod(&self, other: &Self, m: &Self) -> Result<Self> {
        self.mul(other).rem(m)
    }

    /// `self^(2^k) mod m` by repeated squaring.
    pub fn frobenius_mod(&self, k: usize, m: &Self) -> Result<Self> {
        let mut r = self.rem(m)?;
        for _ in 0..k {
            r = r.square().rem(m)?;
        }
        Ok(r)
    }

    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Result<Self> {
        let mut base = self.rem(m)?;
        let mut acc = Self::one().rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m)?;
            }
            base = base.square().rem(m)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            Some(0) | None => return false,
            Some(n) => n,
        };
        let x = Self::x();
        let Ok(full) = x.frobenius_mod(n, self) else {
            return false;
        };
        if full != x.rem(self).expect("nonzero") {
            return false;
        }
        prime_factors(n).into_iter().all(|q| {
            let t = x.frobenius_mod(n / q, self).expect("nonzero");
            (&t ^ &x).gcd(self).is_one()
        })
    }

    /// Lowercase hexadecimal encoding, most significant digit first.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, w) in self.words.iter().rev().enumerate() {
            if i == 0 {
                s.push_str(&format!("{w:x}"));
            } else {
                s.push_str(&format!("{w:016x}"));
            }
        }
        s
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches("0x");
        if t.is_empty() {
            return Err(FieldError::BadLiteral(s.into()));
        }
        let mut p = Self::zero();
        for (i, ch) in t.chars().rev().enumerate() {
            let v = ch.to_digit(16).ok_or_else(|| FieldError::BadLiteral(s.into()))?;
            for b in 0..4 {
                if (v >> b) & 1 == 1 {
                    p.set_coeff(4 * i + b, true);
                }
            }
        }
        Ok(p)
    }

    /// Parses a 0/1 string written most significant coefficient first.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(FieldError::BadLiteral(s.into()));
        }
        let mut p = Self::zero();
        for (i, ch) in t.chars().rev().enumerate() {
            match ch {
                '0' => {}
                '1' => p.set_coeff(i, true),
                _ => return Err(FieldError::BadLiteral(s.into())),
            }
        }
        Ok(p)
    }

    pub fn to_bit_string(&self) -> String {
        match self.degree() {
            None => "0".into(),
            Some(d) => (0..=d)
                .rev()
                .map(|i| if self.coeff(i) { '1' } else { '0' })
                .collect(),
        }
    }
}

fn degree_of(words: &[u64], hint: usize) -> Option<usize> {
    let mut wi = (hint / 64).min(words.len().saturating_sub(1));
    loop {
        if words.is_empty() {
            return None;
        }
        if words[wi] != 0 {
            return Some(wi * 64 + 63 - words[wi].leading_zeros() as usize);
        }
        if wi == 0 {
            return None;
        }
        wi -= 1;
    }
}

/// `dst ^= src << shift`, growing `dst` when needed.
fn xor_shifted(dst: &mut Vec<u64>, src: &[u64], shift: usize) {
    let ws = shift / 64;
    let bs = shift % 64;
    let need = src.len() + ws + usize::from(bs != 0);
    if dst.len() < need {
        dst.resize(need, 0);
    }
    if bs == 0 {
        for (i, &w) in src.iter().enumerate() {
            dst[i + ws] ^= w;
        }
    } else {
        for (i, &w) in src.iter().enumerate() {
            dst[i + ws] ^= w << bs;
            dst[i + ws + 1] ^= w >> (64 - bs);
        }
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl BitXor for &BinaryPoly {
    type Output = BinaryPoly;
    fn bitxor(self, rhs: &BinaryPoly) -> BinaryPoly {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl BitXorAssign<&BinaryPoly> for BinaryPoly {
    fn bitxor_assign(&mut self, rhs: &BinaryPoly) {
        if self.words.len() < rhs.words.len() {
            self.words.resize(rhs.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
        self.normalize();
    }
}

impl fmt::Display for BinaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .support()
            .into_iter()
            .rev()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for BinaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryPoly({self})")
    }
}

impl FromStr for BinaryPoly {
    type Err = FieldError;

    /// Accepts `0x`-prefixed hex, a plain 0/1 string, or a sum of monomials
    /// such as `x^3 + x + 1`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(h) = t.strip_prefix("0x") {
            return Self::from_hex(h);
        }
        if !t.is_empty() && t.chars().all(|c| c == '0' || c == '1') {
            return Self::from_bit_string(t);
        }
        let mut p = Self::zero();
        for term in t.split('+') {
            let term = term.trim();
            let e = match term {
                "1" => 0,
                "x" => 1,
                _ => term
                    .strip_prefix("x^")
                    .and_then(|e| e.parse::<usize>().ok())
                    .ok_or_else(|| FieldError::BadLiteral(s.into()))?,
            };
            p.flip(e);
        }
        Ok(p)
    }
}

impl Serialize for BinaryPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("0x{}", self.to_hex()))
    }
}

impl<'de> Deserialize<'de> for BinaryPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Degrees of the standard binary fields.
pub const STANDARD_DEGREES: [usize; 4] = [163, 233, 283, 571];

/// A binary field GF(2^n) defined by an irreducible polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub n: usize,
    pub p: BinaryPoly,
}

impl FieldSpec {
    /// Checks irreducibility of `p`.
    pub fn new(p: BinaryPoly) -> Result<Self> {
        if !p.is_irreducible() || p.degree() < Some(1) {
            return Err(FieldError::Reducible(p.to_string()));
        }
        Ok(Self {
            n: p.degree().expect("nonzero"),
            p,
        })
    }

    /// One of the four standard fields.
    pub fn standard(n: usize) -> Result<Self> {
        let exps: &[usize] = match n {
            163 => &[163, 7, 6, 3, 0],
            233 => &[233, 74, 0],
            283 => &[283, 12, 7, 5, 0],
            571 => &[571, 10, 5, 2, 0],
            _ => return Err(FieldError::UnsupportedDegree(n)),
        };
        Ok(Self {
            n,
            p: BinaryPoly::from_exponents(exps),
        })
    }

    /// The lowest-encoded irreducible of degree `n`, convenient for test fields.
    pub fn small(n: usize) -> Result<Self> {
        let p = enumerate_irreducibles(n)
            .into_iter()
            .next()
            .ok_or(FieldError::UnsupportedDegree(n))?;
        Self::new(p)
    }

    pub fn mul(&self, a: &BinaryPoly, b: &BinaryPoly) -> BinaryPoly {
        a.mul(b).rem(&self.p).expect("nonzero modulus")
    }

    pub fn square(&self, a: &BinaryPoly) -> BinaryPoly {
        a.square().rem(&self.p).expect("nonzero modulus")
    }

    pub fn inv(&self, a: &BinaryPoly) -> Result<BinaryPoly> {
        field_inv(a, self)
    }

    /// Element with the low `n` bits of `v`; handy for exhaustive sweeps.
    pub fn element(&self, v: u64) -> BinaryPoly {
        BinaryPoly::from_u64(v).truncate(self.n)
    }
}

/// Remainder of the carry-less product `a·b` modulo `m`.
pub fn poly_mul_mod(a: &BinaryPoly, b: &BinaryPoly, m: &BinaryPoly) -> Result<BinaryPoly> {
    if m.is_zero() {
        return Err(FieldError::ZeroModulus);
    }
    a.mul(b).rem(m)
}

/// Field inverse by the extended Euclidean algorithm.
pub fn field_inv(a: &BinaryPoly, field: &FieldSpec) -> Result<BinaryPoly> {
    let a = a.rem(&field.p)?;
    if a.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    a.inv_mod(&field.p)
}

/// All monic irreducible polynomials of degree `d` in ascending integer order.
pub fn enumerate_irreducibles(d: usize) -> Vec<BinaryPoly> {
    assert!((1..=40).contains(&d), "degree {d} out of enumerable range");
    let lo = 1u64 << d;
    (lo..lo << 1)
        .filter(|v| d == 1 || v & 1 == 1)
        .map(BinaryPoly::from_u64)
        .filter(|p| p.is_irreducible())
        .collect()
}

/// One factor `base^exp` of a CRT modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusFactor {
    pub base: BinaryPoly,
    pub exp: u32,
    pub modulus: BinaryPoly,
}

impl ModulusFactor {
    pub fn new(base: BinaryPoly, exp: u32) -> Self {
        let mut modulus = BinaryPoly::one();
        for _ in 0..exp {
            modulus = modulus.mul(&base);
        }
        Self { base, exp, modulus }
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }
}

/// Pairwise-coprime moduli `m_i` whose product `m` drives CRT multiplication
/// of operands with `n` coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusSet {
    pub n: usize,
    pub factors: Vec<ModulusFactor>,
    pub m: BinaryPoly,
    pub omega: usize,
}

/// Default cap on the number of correction coefficients.
pub const DEFAULT_MAX_OMEGA: usize = 8;

impl ModulusSet {
    pub fn new(n: usize, factors: Vec<ModulusFactor>) -> Self {
        let mut m = BinaryPoly::one();
        for f in &factors {
            m = m.mul(&f.modulus);
        }
        let dm = m.degree().unwrap_or(0);
        let omega = (2 * n).saturating_sub(1).saturating_sub(dm);
        Self {
            n,
            factors,
            m,
            omega,
        }
    }

    pub fn from_pairs(n: usize, pairs: &[(BinaryPoly, u32)]) -> Self {
        Self::new(
            n,
            pairs
                .iter()
                .map(|(b, e)| ModulusFactor::new(b.clone(), *e))
                .collect(),
        )
    }

    pub fn degree(&self) -> usize {
        self.m.degree().unwrap_or(0)
    }

    /// Parses a configuration listing one factor per line.
    ///
    /// Lines are either `deg:index:exp`, naming the `index`-th (1-based)
    /// irreducible of degree `deg`, or a 0/1 literal with an optional
    /// `^exp` suffix. `#` starts a comment.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut cache: std::collections::HashMap<usize, Vec<BinaryPoly>> = Default::default();
        let mut factors = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| FieldError::Parse {
                line: ln + 1,
                msg: format!("{msg}: `{line}`"),
            };
            let parts: Vec<&str> = line.split(':').collect();
            let factor = if parts.len() == 3 {
                let nums: Vec<usize> = parts
                    .iter()
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("expected deg:index:exp"))?;
                let (deg, idx, exp) = (nums[0], nums[1], nums[2]);
                if deg == 0 || idx == 0 || exp == 0 || deg > 24 {
                    return Err(bad("degree, index and exponent must be positive"));
                }
                let list = cache.entry(deg).or_insert_with(|| enumerate_irreducibles(deg));
                let base = list.get(idx - 1).cloned().ok_or(FieldError::IndexOutOfRange {
                    degree: deg,
                    index: idx,
                    available: list.len(),
                })?;
                ModulusFactor::new(base, exp as u32)
            } else if parts.len() == 1 {
                let (lit, exp) = match line.split_once('^') {
                    Some((l, e)) => (l, e.trim().parse::<u32>().map_err(|_| bad("bad exponent"))?),
                    None => (line, 1),
                };
                let base = BinaryPoly::from_bit_string(lit).map_err(|_| bad("bad literal"))?;
                if !base.is_irreducible() {
                    return Err(bad("literal base is not irreducible"));
                }
                ModulusFactor::new(base, exp)
            } else {
                return Err(bad("unrecognized factor"));
            };
            factors.push(factor);
        }
        let set = Self::new(n, factors);
        validate_modulus_set(&set, n)?;
        Ok(set)
    }

    /// Inverse of [`ModulusSet::parse`], always in literal form.
    pub fn to_config(&self) -> String {
        self.factors
            .iter()
            .map(|f| format!("{}^{}\n", f.base.to_bit_string(), f.exp))
            .collect()
    }
}

/// Checks the set and returns the correction count `ω = max(0, 2n − 1 − deg m)`.
pub fn validate_modulus_set(set: &ModulusSet, n: usize) -> Result<usize> {
    validate_modulus_set_with(set, n, DEFAULT_MAX_OMEGA)
}

pub fn validate_modulus_set_with(set: &ModulusSet, n: usize, max_omega: usize) -> Result<usize> {
    if set.factors.is_empty() {
        return Err(FieldError::EmptySet);
    }
    for (i, f) in set.factors.iter().enumerate() {
        if f.degree() >= n || f.degree() == 0 {
            return Err(FieldError::FactorTooLarge {
                index: i,
                degree: f.degree(),
                n,
            });
        }
        if !f.base.is_irreducible() {
            return Err(FieldError::Reducible(f.base.to_string()));
        }
        for (j, g) in set.factors.iter().enumerate().skip(i + 1) {
            if f.base == g.base || !f.modulus.gcd(&g.modulus).is_one() {
                return Err(FieldError::NotCoprime(i, j));
            }
        }
    }
    let omega = (2 * n).saturating_sub(1).saturating_sub(set.degree());
    if omega > max_omega {
        return Err(FieldError::TooManyCorrections {
            omega,
            max: max_omega,
        });
    }
    Ok(omega)
}

/// CRT idempotents `q_i = (m/m_i)·((m/m_i)^{-1} mod m_i)`.
pub fn crt_constants(set: &ModulusSet) -> Result<Vec<BinaryPoly>> {
    let mut out = Vec::with_capacity(set.factors.len());
    for (i, f) in set.factors.iter().enumerate() {
        let (cof, r) = set.m.div_rem(&f.modulus)?;
        debug_assert!(r.is_zero());
        let inv = cof.inv_mod(&f.modulus).map_err(|_| {
            let j = set
                .factors
                .iter()
                .position(|g| g != f && !g.modulus.gcd(&f.modulus).is_one())
                .unwrap_or(i);
            FieldError::NotCoprime(i.min(j), i.max(j))
        })?;
        out.push(cof.mul(&inv));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(exps: &[usize]) -> BinaryPoly {
        BinaryPoly::from_exponents(exps)
    }

    #[test]
    fn small_products() {
        let m = p(&[3, 1, 0]);
        assert!(poly_mul_mod(&BinaryPoly::zero(), &p(&[2, 0]), &m).unwrap().is_zero());
        // (x+1)(x^2+1) = x^3+x^2+x+1 ≡ x^2.
        assert_eq!(poly_mul_mod(&p(&[1, 0]), &p(&[2, 0]), &m).unwrap(), p(&[2]));
    }

    #[test]
    fn one_reduction_step_in_163() {
        let f = FieldSpec::standard(163).unwrap();
        assert_eq!(f.p, p(&[163, 7, 6, 3, 0]));
        assert_eq!(f.mul(&BinaryPoly::monomial(162), &BinaryPoly::x()), p(&[7, 6, 3, 0]));
    }

    #[test]
    fn inverses() {
        let f = FieldSpec::new(p(&[3, 1, 0])).unwrap();
        assert!(field_inv(&BinaryPoly::one(), &f).unwrap().is_one());
        assert_eq!(field_inv(&BinaryPoly::x(), &f).unwrap(), p(&[2, 0]));
        assert!(field_inv(&BinaryPoly::zero(), &f).is_err());
        let f8 = FieldSpec::small(8).unwrap();
        for v in 1..256 {
            let a = BinaryPoly::from_u64(v);
            let inv = field_inv(&a, &f8).unwrap();
            assert_eq!(field_inv(&inv, &f8).unwrap(), a);
            assert!(f8.mul(&a, &inv).is_one());
        }
    }

    #[test]
    fn irreducible_counts() {
        assert_eq!(enumerate_irreducibles(2), vec![p(&[2, 1, 0])]);
        // Necklace counts (1/d)·Σ μ(d/k)·2^k.
        for (d, count) in [(1, 2), (3, 2), (4, 3), (5, 6), (8, 30), (9, 56)] {
            assert_eq!(enumerate_irreducibles(d).len(), count, "d={d}");
        }
        assert!(!p(&[4, 2, 0]).is_irreducible());
    }

    #[test]
    fn crt_constants_two_factors() {
        let set = ModulusSet::from_pairs(1, &[(p(&[1]), 1), (p(&[1, 0]), 1)]);
        let q = crt_constants(&set).unwrap();
        assert_eq!(q, vec![p(&[1, 0]), p(&[1])]);
    }

    #[test]
    fn crt_residue_postcondition_163() {
        let set = crate::data::standard_modulus_set(163).unwrap();
        let q = crt_constants(&set).unwrap();
        for (i, qi) in q.iter().enumerate() {
            for (j, f) in set.factors.iter().enumerate() {
                let r = qi.rem(&f.modulus).unwrap();
                assert_eq!(r.is_one(), i == j, "q_{i} mod m_{j}");
                if i != j {
                    assert!(r.is_zero());
                }
            }
        }
    }

    #[test]
    fn standard_omegas() {
        for (n, omega) in [(163, 0), (283, 4), (571, 6)] {
            let set = crate::data::standard_modulus_set(n).unwrap();
            assert_eq!(validate_modulus_set(&set, n).unwrap(), omega, "n={n}");
        }
    }

    #[test]
    fn hex_and_bits_round_trip() {
        let a = p(&[70, 3, 0]);
        assert_eq!(BinaryPoly::from_hex(&a.to_hex()).unwrap(), a);
        assert_eq!(BinaryPoly::from_bit_string(&a.to_bit_string()).unwrap(), a);
        assert!(BinaryPoly::from_hex("0xZZ").is_err());
    }
}
