use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ArithError;

/// Minimal field interface shared by exact and floating scalars.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(n: i64) -> Self;
    fn to_c64(&self) -> Complex64;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn is_square(m: i64) -> bool {
    if m < 0 {
        return false;
    }
    let r = (m as f64).sqrt().round() as i64;
    (r - 1..=r + 1).any(|s| s >= 0 && s * s == m)
}

/// a + b√m with rational a, b. `m` is a non-square integer, possibly negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    pub a: BigRational,
    pub b: BigRational,
    pub m: i64,
}

impl QuadExt {
    pub fn new(a: BigRational, b: BigRational, m: i64) -> Result<Self, ArithError> {
        if is_square(m) {
            return Err(ArithError::SquareDiscriminant(m));
        }
        Ok(QuadExt { a, b, m })
    }

    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone(), m: self.m }
    }

    /// a² − m b², the field norm.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(self.m.into()) * &self.b * &self.b
    }

    pub fn to_c64(&self) -> Complex64 {
        let a = rat_to_f64(&self.a);
        let b = rat_to_f64(&self.b);
        if self.m < 0 {
            Complex64::new(a, b * ((-self.m) as f64).sqrt())
        } else {
            Complex64::new(a + b * (self.m as f64).sqrt(), 0.0)
        }
    }
}

/// Element of the scalar tower used everywhere in the crate.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rat(BigRational),
    Quad(QuadExt),
    Float(Complex64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Rat(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rat(rat(n, d))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    /// (a_n/a_d) + (b_n/b_d)√m, collapsed to a rational when b = 0.
    pub fn quad(a: BigRational, b: BigRational, m: i64) -> Result<Self, ArithError> {
        Ok(Scalar::Quad(QuadExt::new(a, b, m)?).normalized())
    }

    /// ω = (1 + √−3)/2.
    pub fn omega() -> Self {
        Scalar::Quad(QuadExt { a: rat(1, 2), b: rat(1, 2), m: -3 })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Float(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(q) => Some(q),
            _ => None,
        }
    }

    /// Complex conjugate; exact for m < 0 extensions.
    pub fn conj(&self) -> Self {
        match self {
            Scalar::Rat(_) => self.clone(),
            Scalar::Quad(q) if q.m < 0 => Scalar::Quad(q.conj()),
            Scalar::Quad(_) => self.clone(),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    fn normalized(self) -> Self {
        match self {
            Scalar::Quad(q) if q.b.is_zero() => Scalar::Rat(q.a),
            s => s,
        }
    }

    fn lift(&self, m: i64) -> QuadExt {
        match self {
            Scalar::Rat(q) => QuadExt { a: q.clone(), b: BigRational::zero(), m },
            Scalar::Quad(q) => q.clone(),
            Scalar::Float(_) => unreachable!("floats are never lifted"),
        }
    }

    /// Common exact representation for a binary op, or None when floats are required.
    fn common(&self, other: &Self) -> Option<Option<i64>> {
        match (self, other) {
            (Scalar::Float(_), _) | (_, Scalar::Float(_)) => None,
            (Scalar::Rat(_), Scalar::Rat(_)) => Some(None),
            (Scalar::Quad(q), Scalar::Rat(_)) | (Scalar::Rat(_), Scalar::Quad(q)) => Some(Some(q.m)),
            (Scalar::Quad(p), Scalar::Quad(q)) => {
                if p.m == q.m {
                    Some(Some(p.m))
                } else {
                    None
                }
            }
        }
    }

    fn binop(
        &self,
        other: &Self,
        fr: impl Fn(&BigRational, &BigRational) -> BigRational,
        fq: impl Fn(&QuadExt, &QuadExt) -> QuadExt,
        fc: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Self {
        match self.common(other) {
            Some(None) => match (self, other) {
                (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(fr(a, b)),
                _ => unreachable!(),
            },
            Some(Some(m)) => Scalar::Quad(fq(&self.lift(m), &other.lift(m))).normalized(),
            None => Scalar::Float(fc(self.to_c64(), other.to_c64())),
        }
    }

    /// Checked division.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if Field::is_zero(other) {
            None
        } else {
            Some(self.clone() / other.clone())
        }
    }

    /// Parse "p/q", "p", "a+b√m" style strings ("a + b*sqrt(m)" also accepted) or "re,im" floats.
    pub fn parse(s: &str) -> Result<Self, ArithError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ArithError::Parse(s.to_string());
        let parse_rat = |x: &str| -> Result<BigRational, ArithError> {
            if x.is_empty() {
                return Err(bad());
            }
            let (n, d) = match x.split_once('/') {
                Some((n, d)) => (n, d),
                None => (x, "1"),
            };
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        };
        let t = t.replace("*sqrt(", "√(").replace("sqrt(", "√(");
        if let Some(pos) = t.find('√') {
            // split a ± b√(m) at the sign preceding b
            let head = &t[..pos];
            let tail = t[pos + '√'.len_utf8()..].trim_start_matches('(').trim_end_matches(')');
            let m: i64 = tail.parse().map_err(|_| bad())?;
            let split = head
                .char_indices()
                .rev()
                .find(|&(i, c)| (c == '+' || c == '-') && i > 0)
                .map(|(i, _)| i);
            let (a, b) = match split {
                Some(i) => (parse_rat(&head[..i])?, &head[i..]),
                None => (BigRational::zero(), head),
            };
            let b = match b {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                x => parse_rat(x.trim_start_matches('+'))?,
            };
            return Scalar::quad(a, b, m);
        }
        if let Some((re, im)) = t.split_once(',') {
            let re: f64 = re.parse().map_err(|_| bad())?;
            let im: f64 = im.parse().map_err(|_| bad())?;
            return Ok(Scalar::float(re, im));
        }
        if t.contains('.') || t.contains('e') {
            let re: f64 = t.parse().map_err(|_| bad())?;
            return Ok(Scalar::float(re, 0.0));
        }
        parse_rat(&t).map(Scalar::Rat)
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::int(0)
    }
    fn one() -> Self {
        Scalar::int(1)
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_zero(),
            Scalar::Quad(q) => q.a.is_zero() && q.b.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }
    fn from_i64(n: i64) -> Self {
        Scalar::int(n)
    }
    fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Rat(q) => Complex64::new(rat_to_f64(q), 0.0),
            Scalar::Quad(q) => q.to_c64(),
            Scalar::Float(z) => *z,
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.binop(
            &o,
            |a, b| a + b,
            |p, q| QuadExt { a: &p.a + &q.a, b: &p.b + &q.b, m: p.m },
            |a, b| a + b,
        )
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.binop(
            &o,
            |a, b| a - b,
            |p, q| QuadExt { a: &p.a - &q.a, b: &p.b - &q.b, m: p.m },
            |a, b| a - b,
        )
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.binop(
            &o,
            |a, b| a * b,
            |p, q| {
                let m = BigRational::from_integer(p.m.into());
                QuadExt { a: &p.a * &q.a + m * &p.b * &q.b, b: &p.a * &q.b + &p.b * &q.a, m: p.m }
            },
            |a, b| a * b,
        )
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, o: Scalar) -> Scalar {
        assert!(!Field::is_zero(&o), "division by zero scalar");
        self.binop(
            &o,
            |a, b| a / b,
            |p, q| {
                let n = q.norm();
                let c = q.conj();
                let m = BigRational::from_integer(p.m.into());
                let a = &p.a * &c.a + m * &p.b * &c.b;
                let b = &p.a * &c.b + &p.b * &c.a;
                QuadExt { a: a / &n, b: b / &n, m: p.m }
            },
            |a, b| a / b,
        )
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(q) => Scalar::Rat(-q),
            Scalar::Quad(q) => Scalar::Quad(QuadExt { a: -q.a, b: -q.b, m: q.m }),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Rat(q)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(q) => write!(f, "{}", fmt_rat(q)),
            Scalar::Quad(q) => {
                let sign = if q.b.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}√{}", fmt_rat(&q.a), sign, fmt_rat(&q.b.abs()), q.m)
            }
            Scalar::Float(z) => write!(f, "{},{}", z.re, z.im),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ScalarRepr {
    Exact(String),
    Float([f64; 2]),
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Float(z) => ScalarRepr::Float([z.re, z.im]).serialize(s),
            _ => ScalarRepr::Exact(self.to_string()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ScalarRepr::deserialize(d)? {
            ScalarRepr::Float([re, im]) => Ok(Scalar::float(re, im)),
            ScalarRepr::Exact(s) => Scalar::parse(&s).map_err(serde::de::Error::custom),
        }
    }
}
