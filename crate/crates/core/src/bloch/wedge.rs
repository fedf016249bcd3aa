use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, Scalar};

use super::BlochError;

/// Element of ℚ^× ∧ ℚ^× modulo 2-torsion, as Σ c_{pq} p∧q over primes p < q.
///
/// Equality ignores the torsion flag.
#[derive(Clone, Debug, Default)]
pub struct Wedge {
    coeffs: BTreeMap<(BigUint, BigUint), i64>,
    torsion: bool,
}

impl PartialEq for Wedge {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for Wedge {}

impl Wedge {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether some (−1)-component was dropped while building this element.
    pub fn torsion_discarded(&self) -> bool {
        self.torsion
    }

    pub fn coeffs(&self) -> &BTreeMap<(BigUint, BigUint), i64> {
        &self.coeffs
    }

    pub fn from_rationals(a: &BigRational, b: &BigRational) -> Result<Self, BlochError> {
        let fa = factor(a).map_err(|_| BlochError::ZeroArgument)?;
        let fb = factor(b).map_err(|_| BlochError::ZeroArgument)?;
        let mut w = Wedge {
            torsion: (a.is_negative() && !fb.exponents.is_empty())
                || (b.is_negative() && !fa.exponents.is_empty())
                || (a.is_negative() && b.is_negative()),
            ..Self::default()
        };
        for (p, e) in &fa.exponents {
            for (q, f) in &fb.exponents {
                if p != q {
                    w.add_pair(p, q, e * f);
                }
            }
        }
        Ok(w)
    }

    pub fn from_scalars(a: &Scalar, b: &Scalar) -> Result<Self, BlochError> {
        match (a.as_rational(), b.as_rational()) {
            (Some(x), Some(y)) => Self::from_rationals(x, y),
            _ => Err(BlochError::NonRationalSupport),
        }
    }

    fn add_pair(&mut self, p: &BigUint, q: &BigUint, c: i64) {
        let (key, c) = if p < q { ((p.clone(), q.clone()), c) } else { ((q.clone(), p.clone()), -c) };
        let e = self.coeffs.entry(key.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&key);
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Wedge { coeffs: BTreeMap::new(), torsion: self.torsion };
        }
        Wedge { coeffs: self.coeffs.iter().map(|(key, c)| (key.clone(), c * k)).collect(), torsion: self.torsion }
    }

    /// Exact halving; None when some coefficient is odd.
    pub fn halve(&self) -> Option<Self> {
        if self.coeffs.values().any(|c| c % 2 != 0) {
            return None;
        }
        Some(Wedge { coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c / 2)).collect(), torsion: self.torsion })
    }
}

impl AddAssign<&Wedge> for Wedge {
    fn add_assign(&mut self, rhs: &Wedge) {
        for ((p, q), c) in &rhs.coeffs {
            self.add_pair(p, q, *c);
        }
        self.torsion |= rhs.torsion;
    }
}

impl Add for Wedge {
    type Output = Wedge;
    fn add(mut self, rhs: Wedge) -> Wedge {
        self += &rhs;
        self
    }
}

impl Neg for Wedge {
    type Output = Wedge;
    fn neg(self) -> Wedge {
        self.scale(-1)
    }
}

impl Sub for Wedge {
    type Output = Wedge;
    fn sub(self, rhs: Wedge) -> Wedge {
        self + (-rhs)
    }
}

impl std::iter::Sum for Wedge {
    fn sum<I: Iterator<Item = Wedge>>(iter: I) -> Wedge {
        iter.fold(Wedge::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, ((p, q), c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·{p}∧{q}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WedgeTerm {
    p: String,
    q: String,
    coeff: i64,
}

#[derive(Serialize, Deserialize)]
struct WedgeRepr {
    terms: Vec<WedgeTerm>,
    torsion_discarded: bool,
}

impl Serialize for Wedge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .coeffs
            .iter()
            .map(|((p, q), c)| WedgeTerm { p: p.to_string(), q: q.to_string(), coeff: *c })
            .collect();
        WedgeRepr { terms, torsion_discarded: self.torsion }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Wedge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = WedgeRepr::deserialize(d)?;
        let mut w = Wedge { torsion: repr.torsion_discarded, ..Self::default() };
        for t in repr.terms {
            let p: BigUint = t.p.parse().map_err(D::Error::custom)?;
            let q: BigUint = t.q.parse().map_err(D::Error::custom)?;
            if p.is_zero() || q.is_zero() || p == q {
                return Err(D::Error::custom("bad prime pair"));
            }
            w.add_pair(&p, &q, t.coeff);
        }
        Ok(w)
    }
}
