//! The five atomic groups ℤ, ℤ/d, ℚ, ℚ/ℤ and ℤ(p^∞).
//!
//! Every element is stored as a single [`Rational`] in canonical form:
//!
//! | atom          | representative                              |
//! |---------------|---------------------------------------------|
//! | `ZZ`          | any integer                                 |
//! | `Cyclic(d)`   | integer in `[0, d)`                         |
//! | `QQ`          | any rational                                |
//! | `QmodZ`       | rational in `[0, 1)`                        |
//! | `Pruefer(p)`  | rational in `[0, 1)` with denominator `p^k` |
//!
//! Because representatives are canonical, element equality is plain
//! structural equality.

use std::fmt;

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, frac, mod_floor, mod_inverse, split_prime, Integer, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "AtomRepr", into = "AtomRepr")]
pub enum Atom {
    ZZ,
    Cyclic(Integer),
    QQ,
    QmodZ,
    Pruefer(Integer),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "lowercase", deny_unknown_fields)]
enum AtomRepr {
    Zz,
    Cyclic {
        #[serde(with = "arith::int_string")]
        d: Integer,
    },
    Qq,
    Qmodz,
    Pruefer {
        #[serde(with = "arith::int_string")]
        p: Integer,
    },
}

impl TryFrom<AtomRepr> for Atom {
    type Error = Error;

    fn try_from(r: AtomRepr) -> Result<Atom> {
        match r {
            AtomRepr::Zz => Ok(Atom::ZZ),
            AtomRepr::Cyclic { d } => Atom::cyclic(d),
            AtomRepr::Qq => Ok(Atom::QQ),
            AtomRepr::Qmodz => Ok(Atom::QmodZ),
            AtomRepr::Pruefer { p } => Atom::pruefer(p),
        }
    }
}

impl From<Atom> for AtomRepr {
    fn from(a: Atom) -> AtomRepr {
        match a {
            Atom::ZZ => AtomRepr::Zz,
            Atom::Cyclic(d) => AtomRepr::Cyclic { d },
            Atom::QQ => AtomRepr::Qq,
            Atom::QmodZ => AtomRepr::Qmodz,
            Atom::Pruefer(p) => AtomRepr::Pruefer { p },
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::ZZ => write!(f, "ℤ"),
            Atom::Cyclic(d) => write!(f, "ℤ/{d}"),
            Atom::QQ => write!(f, "ℚ"),
            Atom::QmodZ => write!(f, "ℚ/ℤ"),
            Atom::Pruefer(p) => write!(f, "ℤ({p}^∞)"),
        }
    }
}

/// The canonical maps between atoms used to assemble injective presentations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedKind {
    /// `r ∈ ℤ/p^k` to `[r/p^k] ∈ ℤ(p^∞)`.
    CyclicIntoPruefer,
    /// ℚ → ℚ/ℤ.
    ReduceQToQmodZ,
    /// ℤ(p^∞) ⊆ ℚ/ℤ.
    PrueferIntoQmodZ,
}

impl Atom {
    pub fn cyclic(d: impl Into<Integer>) -> Result<Atom> {
        let d = d.into();
        if d < Integer::from(2) {
            return Err(Error::InvalidAtom(format!("cyclic modulus {d} < 2")));
        }
        Ok(Atom::Cyclic(d))
    }

    pub fn pruefer(p: impl Into<Integer>) -> Result<Atom> {
        let p = p.into();
        if p.to_u64().is_none_or(|v| v > arith::MAX_PRIME) {
            return Err(Error::InvalidAtom(format!(
                "Prüfer prime {p} outside supported range"
            )));
        }
        if !arith::is_prime(&p) {
            return Err(Error::InvalidAtom(format!("{p} is not prime")));
        }
        Ok(Atom::Pruefer(p))
    }

    /// ℚ, ℚ/ℤ and ℤ(p^∞) are divisible (equivalently injective over ℤ).
    pub fn is_divisible(&self) -> bool {
        matches!(self, Atom::QQ | Atom::QmodZ | Atom::Pruefer(_))
    }

    /// Finitely generated atoms: ℤ and ℤ/d.
    pub fn is_cyclic_group(&self) -> bool {
        matches!(self, Atom::ZZ | Atom::Cyclic(_))
    }

    /// Validates `q` as a representative of this atom and returns its
    /// canonical form.
    pub fn canonicalize(&self, q: &Rational) -> Result<Rational> {
        match self {
            Atom::ZZ | Atom::Cyclic(_) if !q.is_integer() => Err(Error::InvalidElement(format!(
                "{} is not an integer, required by {self}",
                arith::format_rational(q)
            ))),
            Atom::Pruefer(p) if split_prime(q.denom(), p).1 != Integer::one() => {
                Err(Error::InvalidElement(format!(
                    "denominator of {} is not a power of {p}",
                    arith::format_rational(q)
                )))
            }
            _ => Ok(self.reduce(q)),
        }
    }

    /// Reduces a representative that is already known to be valid.
    pub(crate) fn reduce(&self, q: &Rational) -> Rational {
        match self {
            Atom::ZZ | Atom::QQ => q.clone(),
            Atom::Cyclic(d) => Rational::from_integer(mod_floor(q.numer(), d)),
            Atom::QmodZ | Atom::Pruefer(_) => frac(q),
        }
    }

    pub(crate) fn add_values(&self, a: &Rational, b: &Rational) -> Rational {
        self.reduce(&(a + b))
    }

    pub(crate) fn neg_value(&self, a: &Rational) -> Rational {
        self.reduce(&-a)
    }

    pub(crate) fn mul_value(&self, n: &Integer, a: &Rational) -> Rational {
        self.reduce(&(a * Rational::from_integer(n.clone())))
    }

    /// Canonical `y` with `n * y = x`: the unique solution in ℚ, otherwise
    /// the solution with least canonical representative.
    pub(crate) fn divide_value(&self, n: &Integer, x: &Rational) -> Result<Rational> {
        if n.is_zero() {
            return Err(Error::Precondition("division by zero".into()));
        }
        let not_div = || {
            Error::NotDivisible(format!(
                "{} is not divisible by {n} in {self}",
                arith::format_rational(x)
            ))
        };
        match self {
            Atom::QQ => Ok(x / Rational::from_integer(n.clone())),
            Atom::ZZ => {
                let (q, r) = x.numer().div_rem(n);
                if r.is_zero() {
                    Ok(Rational::from_integer(q))
                } else {
                    Err(not_div())
                }
            }
            Atom::Cyclic(d) => {
                let g = n.gcd(d);
                let xv = x.numer();
                if !xv.is_multiple_of(&g) {
                    return Err(not_div());
                }
                let d1 = d / &g;
                let inv = mod_inverse(&(n / &g), &d1).expect("coprime after removing gcd");
                Ok(Rational::from_integer(mod_floor(&((xv / &g) * inv), &d1)))
            }
            Atom::QmodZ => {
                // Solutions form x0 + (1/|n|)ℤ; the least lies in [0, 1/|n|).
                let signed = if n.is_negative() { frac(&-x) } else { x.clone() };
                Ok(signed / Rational::from_integer(n.abs()))
            }
            Atom::Pruefer(p) => {
                let (a, m) = split_prime(n, p);
                let pk = x.denom().clone();
                // Multiplication by m is invertible on the p^k-torsion.
                let inv = mod_inverse(&m, &pk).expect("m is prime to p");
                let r = mod_floor(&(x.numer() * inv), &pk);
                let pa = num_traits::pow(p.clone(), a as usize);
                Ok(Rational::new(r, pk * pa))
            }
        }
    }

    /// Target atom of an embedding, or an error if `kind` does not apply.
    pub fn embed_target(&self, kind: EmbedKind) -> Result<Atom> {
        match (kind, self) {
            (EmbedKind::CyclicIntoPruefer, Atom::Cyclic(d)) => match arith::prime_power(d) {
                Some((p, _)) => Ok(Atom::Pruefer(p)),
                None => Err(Error::Inapplicable(format!(
                    "modulus {d} is not a prime power"
                ))),
            },
            (EmbedKind::ReduceQToQmodZ, Atom::QQ) => Ok(Atom::QmodZ),
            (EmbedKind::PrueferIntoQmodZ, Atom::Pruefer(_)) => Ok(Atom::QmodZ),
            _ => Err(Error::Inapplicable(format!("{kind:?} on {self}"))),
        }
    }

    pub(crate) fn embed_value(&self, kind: EmbedKind, x: &Rational) -> Rational {
        match (kind, self) {
            (EmbedKind::CyclicIntoPruefer, Atom::Cyclic(d)) => x / Rational::from_integer(d.clone()),
            (EmbedKind::ReduceQToQmodZ, _) => frac(x),
            _ => x.clone(),
        }
    }
}

/// An element of one atom, held in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct AtomElement {
    atom: Atom,
    value: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementRepr {
    atom: Atom,
    #[serde(with = "arith::rat_string")]
    value: Rational,
}

impl TryFrom<ElementRepr> for AtomElement {
    type Error = Error;
    fn try_from(r: ElementRepr) -> Result<Self> {
        AtomElement::new(r.atom, r.value)
    }
}

impl From<AtomElement> for ElementRepr {
    fn from(e: AtomElement) -> Self {
        ElementRepr {
            atom: e.atom,
            value: e.value,
        }
    }
}

impl AtomElement {
    /// Validates and canonicalizes `value`.
    pub fn new(atom: Atom, value: Rational) -> Result<Self> {
        let value = atom.canonicalize(&value)?;
        Ok(Self { atom, value })
    }

    pub(crate) fn new_unchecked(atom: Atom, value: Rational) -> Self {
        debug_assert_eq!(atom.canonicalize(&value).as_ref(), Ok(&value));
        Self { atom, value }
    }

    pub fn zero(atom: Atom) -> Self {
        Self {
            atom,
            value: Rational::zero(),
        }
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn same_atom(&self, other: &Self) -> Result<()> {
        if self.atom == other.atom {
            Ok(())
        } else {
            Err(Error::AtomMismatch {
                left: self.atom.to_string(),
                right: other.atom.to_string(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_atom(other)?;
        Ok(Self::new_unchecked(
            self.atom.clone(),
            self.atom.add_values(&self.value, &other.value),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new_unchecked(self.atom.clone(), self.atom.neg_value(&self.value))
    }

    pub fn scalar_mul(&self, n: &Integer) -> Self {
        Self::new_unchecked(self.atom.clone(), self.atom.mul_value(n, &self.value))
    }

    /// A canonical `y` with `n * y = self`.
    pub fn divide(&self, n: &Integer) -> Result<Self> {
        let v = self.atom.divide_value(n, &self.value)?;
        Ok(Self::new_unchecked(self.atom.clone(), v))
    }

    pub fn embed(&self, kind: EmbedKind) -> Result<Self> {
        let target = self.atom.embed_target(kind)?;
        let v = self.atom.embed_value(kind, &self.value);
        Ok(Self::new_unchecked(target, v))
    }
}

impl fmt::Display for AtomElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = arith::format_rational(&self.value);
        match self.atom {
            Atom::QmodZ | Atom::Pruefer(_) => write!(f, "[{v}]"),
            _ => write!(f, "{v}"),
        }
    }
}
