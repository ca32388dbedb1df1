//! Binary elliptic curves `y² + xy = x³ + ax² + b`: a classical group-law
//! oracle, window tables and the reversible point-addition circuit.
//!
//! The point at infinity is represented by `(0, 0)`, which never lies on an
//! ordinary curve since `b ≠ 0`.

mod pointadd;

pub use pointadd::{
    reference_census, synth_ecpointadd, synth_ecpointadd_with, synth_equality_test, PointAddLayout,
    PointAddReport, CENSUS_KEYS,
};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith_synth::ArithError;
use crate::gf2_field::{BinaryPoly, FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EcError {
    #[error("curve coefficient b must be nonzero")]
    ZeroB,
    #[error("coefficient {0} does not fit the field")]
    CoefficientTooWide(String),
    #[error("point ({x}, {y}) is not on the curve")]
    NotOnCurve { x: String, y: String },
    #[error("window size must be at least 1, got {0}")]
    BadWindow(usize),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("{what} is limited to fields of degree at most {max}")]
    TooLarge { what: &'static str, max: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Result<T> = std::result::Result<T, EcError>;

/// An ordinary binary curve over `field`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveSpec {
    pub field: FieldSpec,
    pub a: BinaryPoly,
    pub b: BinaryPoly,
}

impl CurveSpec {
    pub fn new(field: FieldSpec, a: BinaryPoly, b: BinaryPoly) -> Result<Self> {
        if b.is_zero() {
            return Err(EcError::ZeroB);
        }
        for k in [&a, &b] {
            if k.degree().is_some_and(|d| d >= field.n) {
                return Err(EcError::CoefficientTooWide(k.to_string()));
            }
        }
        Ok(Self { field, a, b })
    }

    /// Curve from hexadecimal coefficients.
    pub fn from_hex(field: FieldSpec, a: &str, b: &str) -> Result<Self> {
        Self::new(field, BinaryPoly::from_hex(a)?, BinaryPoly::from_hex(b)?)
    }

    /// Koblitz curves over the standard fields, named `K-163`, `K-233`,
    /// `K-283` and `K-571`.
    pub fn named(name: &str) -> Result<Self> {
        let (n, a) = match name.to_ascii_uppercase().as_str() {
            "K-163" | "K163" => (163, 1),
            "K-233" | "K233" => (233, 0),
            "K-283" | "K283" => (283, 0),
            "K-571" | "K571" => (571, 0),
            _ => return Err(EcError::UnknownCurve(name.to_string())),
        };
        Self::new(FieldSpec::standard(n)?, BinaryPoly::from_u64(a), BinaryPoly::one())
    }

    /// Curve with `b = 1` and the given `a` over the lowest irreducible of
    /// degree `n`; used for exhaustive tests.
    pub fn toy(n: usize, a: u64) -> Result<Self> {
        let field = FieldSpec::small(n)?;
        let a = field.element(a);
        Self::new(field, a, BinaryPoly::one())
    }

    pub fn n(&self) -> usize {
        self.field.n
    }

    pub fn contains(&self, p: &ECPoint) -> bool {
        if p.is_infinity() {
            return true;
        }
        let f = &self.field;
        let (x, y) = (&p.x, &p.y);
        let x2 = f.square(x);
        let lhs = &f.square(y) ^ &f.mul(x, y);
        let rhs = &(&f.mul(&x2, x) ^ &f.mul(&self.a, &x2)) ^ &self.b;
        lhs == rhs
    }

    pub fn check(&self, p: &ECPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(EcError::NotOnCurve {
                x: p.x.to_string(),
                y: p.y.to_string(),
            })
        }
    }

    /// All group elements, `O` first. Brute force over `GF(2^n)²`.
    pub fn points(&self) -> Result<Vec<ECPoint>> {
        const MAX: usize = 12;
        let n = self.n();
        if n > MAX {
            return Err(EcError::TooLarge {
                what: "point enumeration",
                max: MAX,
            });
        }
        let mut out = vec![ECPoint::infinity()];
        for x in 0..1u64 << n {
            for y in 0..1u64 << n {
                let p = ECPoint::new(self.field.element(x), self.field.element(y));
                if !p.is_infinity() && self.contains(&p) {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }
}

/// Affine point, with `(0, 0)` standing for `O`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct ECPoint {
    pub x: BinaryPoly,
    pub y: BinaryPoly,
}

impl ECPoint {
    pub fn new(x: BinaryPoly, y: BinaryPoly) -> Self {
        Self { x, y }
    }

    pub fn infinity() -> Self {
        Self::default()
    }

    pub fn is_infinity(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `−(x, y) = (x, x + y)`.
    pub fn neg(&self) -> Self {
        Self::new(self.x.clone(), &self.x ^ &self.y)
    }
}

impl fmt::Debug for ECPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "O")
        } else {
            write!(f, "({:#x}, {:#x})", HexPoly(&self.x), HexPoly(&self.y))
        }
    }
}

struct HexPoly<'a>(&'a BinaryPoly);

impl fmt::LowerHex for HexPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if f.alternate() {
            write!(f, "0x")?;
        }
        write!(f, "{}", self.0.to_hex())
    }
}

/// Group law including doubling, inverse pairs and `O` on either side.
pub fn ec_add_classical(p1: &ECPoint, p2: &ECPoint, curve: &CurveSpec) -> Result<ECPoint> {
    curve.check(p1)?;
    curve.check(p2)?;
    if p1.is_infinity() {
        return Ok(p2.clone());
    }
    if p2.is_infinity() {
        return Ok(p1.clone());
    }
    if *p1 == p2.neg() {
        return Ok(ECPoint::infinity());
    }
    let f = &curve.field;
    let lambda = if p1 == p2 {
        &p1.x ^ &f.mul(&p1.y, &f.inv(&p1.x)?)
    } else {
        f.mul(&(&p1.y ^ &p2.y), &f.inv(&(&p1.x ^ &p2.x))?)
    };
    let x3 = &(&(&(&f.square(&lambda) ^ &lambda) ^ &p1.x) ^ &p2.x) ^ &curve.a;
    let y3 = &(&f.mul(&lambda, &(&p1.x ^ &x3)) ^ &x3) ^ &p1.y;
    Ok(ECPoint::new(x3, y3))
}

/// `[k]P` by double-and-add.
pub fn ec_scalar_mul(k: u128, p: &ECPoint, curve: &CurveSpec) -> Result<ECPoint> {
    curve.check(p)?;
    let mut acc = ECPoint::infinity();
    for bit in (0..128 - k.leading_zeros()).rev() {
        acc = ec_add_classical(&acc, &acc, curve)?;
        if (k >> bit) & 1 == 1 {
            acc = ec_add_classical(&acc, p, curve)?;
        }
    }
    Ok(acc)
}

/// Smallest `k ≥ 1` with `[k]P = O`, by repeated addition.
pub fn point_order(p: &ECPoint, curve: &CurveSpec) -> Result<u128> {
    curve.check(p)?;
    let mut acc = p.clone();
    let mut k = 1;
    while !acc.is_infinity() {
        acc = ec_add_classical(&acc, p, curve)?;
        k += 1;
    }
    Ok(k)
}

/// `λ_r = x + y/x`, or 0 when `x = 0`.
pub fn lambda_r(p: &ECPoint, field: &FieldSpec) -> BinaryPoly {
    if p.x.is_zero() {
        return BinaryPoly::zero();
    }
    let inv = field.inv(&p.x).expect("nonzero x is invertible");
    &p.x ^ &field.mul(&p.y, &inv)
}

/// One look-up entry: `[q]R` and its doubling slope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowEntry {
    pub point: ECPoint,
    pub lambda_r: BinaryPoly,
}

/// The `2^s` multiples of a base point read by one windowed addition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowTable {
    pub s: usize,
    pub entries: Vec<WindowEntry>,
}

impl WindowTable {
    pub fn entry(&self, q: usize) -> &WindowEntry {
        &self.entries[q]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Entries `[q]R` for `q = 0 .. 2^s`.
pub fn build_window_table(r: &ECPoint, s: usize, curve: &CurveSpec) -> Result<WindowTable> {
    if s == 0 || s > 30 {
        return Err(EcError::BadWindow(s));
    }
    curve.check(r)?;
    let mut entries = Vec::with_capacity(1 << s);
    let mut acc = ECPoint::infinity();
    for _ in 0..1usize << s {
        entries.push(WindowEntry {
            lambda_r: lambda_r(&acc, &curve.field),
            point: acc.clone(),
        });
        acc = ec_add_classical(&acc, r, curve)?;
    }
    Ok(WindowTable { s, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> CurveSpec {
        CurveSpec::toy(4, 1).unwrap()
    }

    #[test]
    fn identity_and_inverse() {
        let c = toy();
        for p in c.points().unwrap() {
            assert_eq!(ec_add_classical(&p, &ECPoint::infinity(), &c).unwrap(), p);
            assert_eq!(ec_add_classical(&ECPoint::infinity(), &p, &c).unwrap(), p);
            assert!(ec_add_classical(&p, &p.neg(), &c).unwrap().is_infinity());
        }
    }

    #[test]
    fn off_curve_rejected() {
        let c = toy();
        let bad = ECPoint::new(BinaryPoly::from_u64(1), BinaryPoly::from_u64(1));
        let bad = if c.contains(&bad) {
            ECPoint::new(BinaryPoly::from_u64(1), BinaryPoly::zero())
        } else {
            bad
        };
        if !c.contains(&bad) {
            assert!(matches!(
                ec_add_classical(&bad, &bad, &c),
                Err(EcError::NotOnCurve { .. })
            ));
        }
    }

    #[test]
    fn zero_b_rejected() {
        let f = FieldSpec::small(3).unwrap();
        assert_eq!(
            CurveSpec::new(f, BinaryPoly::one(), BinaryPoly::zero()),
            Err(EcError::ZeroB)
        );
    }

    #[test]
    fn scalar_small_cases() {
        let c = toy();
        let p = c.points().unwrap()[1].clone();
        assert!(ec_scalar_mul(0, &p, &c).unwrap().is_infinity());
        assert_eq!(ec_scalar_mul(1, &p, &c).unwrap(), p);
        let ord = point_order(&p, &c).unwrap();
        assert!(ec_scalar_mul(ord, &p, &c).unwrap().is_infinity());
    }

    #[test]
    fn window_table_entries() {
        let c = toy();
        let r = c.points().unwrap()[1].clone();
        let t = build_window_table(&r, 3, &c).unwrap();
        assert_eq!(t.len(), 8);
        assert!(t.entry(0).point.is_infinity());
        assert!(t.entry(0).lambda_r.is_zero());
        assert_eq!(t.entry(1).point, r);
        assert_eq!(build_window_table(&r, 0, &c), Err(EcError::BadWindow(0)));
    }

    #[test]
    fn named_curves_resolve() {
        let k = CurveSpec::named("K-233").unwrap();
        assert_eq!(k.n(), 233);
        assert!(k.a.is_zero());
        assert!(CurveSpec::named("P-256").is_err());
    }
}
