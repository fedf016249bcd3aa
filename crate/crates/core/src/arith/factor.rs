use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::ArithError;

/// sign · ∏ pᵉ with nonzero exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactorization {
    pub sign: i8,
    pub exponents: BTreeMap<BigUint, i64>,
}

impl PrimeFactorization {
    pub fn to_rational(&self) -> BigRational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (p, &e) in &self.exponents {
            let pe = BigInt::from(p.pow(e.unsigned_abs() as u32));
            if e > 0 {
                num *= pe;
            } else {
                den *= pe;
            }
        }
        if self.sign < 0 {
            num = -num;
        }
        BigRational::new(num, den)
    }
}

pub fn factor(q: &BigRational) -> Result<PrimeFactorization, ArithError> {
    if q.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    let sign = if q.numer().sign() == Sign::Minus { -1 } else { 1 };
    let mut exponents = BTreeMap::new();
    for (p, e) in factor_uint(q.numer().magnitude()) {
        *exponents.entry(p).or_insert(0) += e as i64;
    }
    for (p, e) in factor_uint(q.denom().magnitude()) {
        *exponents.entry(p).or_insert(0) -= e as i64;
    }
    exponents.retain(|_, e| *e != 0);
    Ok(PrimeFactorization { sign, exponents })
}

const TRIAL_LIMIT: u64 = 1_000_000;
/// Below this cofactor size a full trial-division sweep is cheaper than rho.
const TRIAL_SWEEP_MAX: u64 = 1_000_000_000_000;

/// Prime factors with multiplicities, ascending.
pub fn factor_uint(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out: BTreeMap<BigUint, u32> = BTreeMap::new();
    if n.is_zero() || n.is_one() {
        return vec![];
    }
    match n.to_u64() {
        Some(m) => {
            for (p, e) in factor_u64(m) {
                *out.entry(BigUint::from(p)).or_insert(0) += e;
            }
        }
        None => factor_big(n.clone(), &mut out),
    }
    out.into_iter().collect()
}

pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: BTreeMap<u64, u32> = BTreeMap::new();
    for p in [2u64, 3, 5] {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
    }
    // small wheel to 1000, then sweep to 10⁶ only for modest composites
    let mut d = 7u64;
    let mut limit = 1000u64;
    loop {
        while d <= limit && d * d <= n {
            while n % d == 0 {
                *out.entry(d).or_insert(0) += 1;
                n /= d;
            }
            d += 2;
        }
        if d * d > n || limit == TRIAL_LIMIT || n >= TRIAL_SWEEP_MAX || is_prime_u64(n) {
            break;
        }
        limit = TRIAL_LIMIT;
    }
    if n > 1 {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime_u64(m) {
                *out.entry(m).or_insert(0) += 1;
            } else {
                let f = rho_u64(m);
                stack.push(f);
                stack.push(m / f);
            }
        }
    }
    out.into_iter().collect()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; `n` must be an odd composite.
fn rho_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| ((mulmod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1usize;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let p = BigUint::from(p);
        if (n % &p).is_zero() {
            return n == &p;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'outer: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn factor_big(mut n: BigUint, out: &mut BTreeMap<BigUint, u32>) {
    let mut d = 2u64;
    while d <= 1000 {
        let bd = BigUint::from(d);
        while (&n % &bd).is_zero() {
            *out.entry(bd.clone()).or_insert(0) += 1;
            n /= &bd;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            for (p, e) in factor_u64(small) {
                *out.entry(BigUint::from(p)).or_insert(0) += e;
            }
        } else if is_probable_prime_big(&m) {
            *out.entry(m).or_insert(0) += 1;
        } else {
            let f = rho_big(&m);
            stack.push(&m / &f);
            stack.push(f);
        }
    }
}
