//! Exact integers, rationals, integer matrices and Smith normal form.
//!
//! Integers are [`num_bigint::BigInt`] and rationals are
//! [`num_rational::BigRational`], which keeps every value reduced with a
//! positive denominator. Everything that crosses a serialization boundary is
//! written as a decimal string (`"-3"`, `"5/12"`) so no precision is lost.

mod matrix;
mod snf;

pub use matrix::IntMatrix;
pub use snf::{snf, SnfResult};

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Integer = num_bigint::BigInt;
pub type Rational = num_rational::BigRational;

/// Largest prime accepted as a Prüfer parameter.
pub const MAX_PRIME: u64 = 1_000_000;

pub fn int(n: i64) -> Integer {
    Integer::from(n)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Integer::from(num), Integer::from(den))
}

pub fn rat_from_int(n: Integer) -> Rational {
    Rational::from_integer(n)
}

/// Reduces `r` into `[0, modulus)`.
pub fn mod_floor(r: &Integer, modulus: &Integer) -> Integer {
    r.mod_floor(modulus)
}

/// The fractional part of `q`, i.e. its canonical representative in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    let r = q.numer().mod_floor(q.denom());
    Rational::new(r, q.denom().clone())
}

/// Inverse of `a` modulo `m` (with `m >= 1`), if it exists.
pub fn mod_inverse(a: &Integer, m: &Integer) -> Option<Integer> {
    if m.is_one() {
        return Some(Integer::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Trial-division primality for desk-scale values.
pub fn is_prime(n: &Integer) -> bool {
    let Some(n) = n.to_u64() else {
        return false;
    };
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Factors `n >= 1` by trial division into `(prime, exponent)` pairs, primes
/// ascending.
pub fn factor(n: &Integer) -> Vec<(Integer, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = Integer::from(2u32);
    while &p * &p <= n {
        let mut k = 0u32;
        while (&n % &p).is_zero() {
            n /= &p;
            k += 1;
        }
        if k > 0 {
            out.push((p.clone(), k));
        }
        p += 1u32;
    }
    if n > Integer::one() {
        out.push((n, 1));
    }
    out
}

/// If `n` is `p^k` with `p` prime and `k >= 1`, returns `(p, k)`.
pub fn prime_power(n: &Integer) -> Option<(Integer, u32)> {
    let f = factor(n);
    if f.len() == 1 {
        f.into_iter().next()
    } else {
        None
    }
}

/// Splits `n != 0` as `p^a * m` with `p` not dividing `m`; returns `(a, m)`.
pub fn split_prime(n: &Integer, p: &Integer) -> (u32, Integer) {
    let mut m = n.clone();
    let mut a = 0;
    while !m.is_zero() && (&m % p).is_zero() {
        m /= p;
        a += 1;
    }
    (a, m)
}

pub fn parse_integer(s: &str) -> Result<Integer> {
    s.trim()
        .parse::<Integer>()
        .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_integer(s)?)),
        Some((n, d)) => {
            let n = parse_integer(n)?;
            let d = parse_integer(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator: {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter writing an [`Integer`] as a decimal string.
pub mod int_string {
    use super::Integer;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_integer(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter writing a [`Rational`] as `"n"` or `"n/d"`.
pub mod rat_string {
    use super::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter for a list of rationals.
pub mod rat_vec_string {
    use super::Rational;
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&super::format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter for a list of integers.
pub mod int_vec_string {
    use super::Integer;
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Integer], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for n in v {
            seq.serialize_element(&n.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Integer>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse_integer(s).map_err(D::Error::custom))
            .collect()
    }
}
