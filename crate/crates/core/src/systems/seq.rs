//! The system `M_n = ℚ^n ⊕ ⊕_{i≥n} ℚ/ℤ` with connecting maps
//! `φ_{mn}: M_n → M_m` (`m ≤ n`) that keep coordinates `i < m`, reduce
//! coordinates `m ≤ i < n` mod ℤ and pass the rest through.
//!
//! Its limit is the group of rational sequences with all but finitely many
//! terms in ℤ. That group is not divisible: a sequence whose terms are
//! eventually `t` is divisible by `k` only when `k | t`. Sequences that are
//! eventually 0 form a divisible subgroup that still maps onto every `M_n`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer as _;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Integer, Rational};
use crate::atoms::Atom;
use crate::error::{Error, Result};
use crate::homs::{Hom, IndexMap, Route};
use crate::sums::{Element, Extent, ModuleShape};

pub const Q_FAMILY: &str = "q";
pub const QZ_FAMILY: &str = "r";

/// `(head_0, …, head_{h-1}, tail, tail, …)`. Trailing head terms equal to
/// the tail are trimmed, so equal sequences compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "SeqRepr", into = "SeqRepr")]
pub struct EventuallyIntegerSeq {
    head: Vec<Rational>,
    tail: Integer,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeqRepr {
    #[serde(with = "arith::rat_vec_string")]
    head: Vec<Rational>,
    #[serde(with = "arith::int_string")]
    tail: Integer,
}

impl From<SeqRepr> for EventuallyIntegerSeq {
    fn from(r: SeqRepr) -> Self {
        Self::new(r.head, r.tail)
    }
}

impl From<EventuallyIntegerSeq> for SeqRepr {
    fn from(s: EventuallyIntegerSeq) -> Self {
        SeqRepr {
            head: s.head,
            tail: s.tail,
        }
    }
}

impl EventuallyIntegerSeq {
    pub fn new(mut head: Vec<Rational>, tail: Integer) -> Self {
        let t = Rational::from_integer(tail.clone());
        while head.last() == Some(&t) {
            head.pop();
        }
        Self { head, tail }
    }

    pub fn zero() -> Self {
        Self::new(vec![], Integer::zero())
    }

    pub fn head(&self) -> &[Rational] {
        &self.head
    }

    pub fn tail(&self) -> &Integer {
        &self.tail
    }

    pub fn get(&self, i: usize) -> Rational {
        self.head
            .get(i)
            .cloned()
            .unwrap_or_else(|| Rational::from_integer(self.tail.clone()))
    }

    pub fn scalar_mul(&self, k: &Integer) -> Self {
        let kq = Rational::from_integer(k.clone());
        Self::new(self.head.iter().map(|v| v * &kq).collect(), &self.tail * k)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.head.len().max(other.head.len());
        Self::new(
            (0..n).map(|i| self.get(i) + other.get(i)).collect(),
            &self.tail + &other.tail,
        )
    }

    /// Divisible by `k` in the limit: a quotient, or the reason none exists.
    pub fn divide(&self, k: &Integer) -> Result<Division> {
        if !k.is_positive() {
            return Err(Error::Precondition(format!("divisor {k} must be at least 1")));
        }
        let (q, r) = self.tail.div_mod_floor(k);
        if !r.is_zero() {
            return Ok(Division::Refuted {
                k: k.clone(),
                tail: self.tail.clone(),
                residue: r,
            });
        }
        let kq = Rational::from_integer(k.clone());
        Ok(Division::Quotient(Self::new(
            self.head.iter().map(|v| v / &kq).collect(),
            q,
        )))
    }

    /// Divisible by every `k` in `1..=max_k`.
    pub fn divisible_up_to(&self, max_k: u64) -> bool {
        (1..=max_k).all(|k| {
            matches!(self.divide(&Integer::from(k)), Ok(Division::Quotient(_)))
        })
    }
}

impl fmt::Display for EventuallyIntegerSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.head.iter().map(arith::format_rational).collect();
        write!(f, "({}; {} …)", head.join(", "), self.tail)
    }
}

/// Outcome of dividing an [`EventuallyIntegerSeq`] by `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Division {
    Quotient(EventuallyIntegerSeq),
    /// Every term past the head equals `tail ≡ residue (mod k)`, residue
    /// nonzero, so infinitely many quotient terms fall outside ℤ.
    Refuted {
        #[serde(with = "arith::int_string")]
        k: Integer,
        #[serde(with = "arith::int_string")]
        tail: Integer,
        #[serde(with = "arith::int_string")]
        residue: Integer,
    },
}

/// Shapes of the stages `M_n` and the connecting maps between them. In
/// `M_n`, family `q` holds coordinates `0..n` and index `j` of family `r`
/// is coordinate `n + j`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SeqStages;

impl SeqStages {
    pub fn shape(n: u64) -> Arc<ModuleShape> {
        Arc::new(
            ModuleShape::new(vec![
                crate::sums::Family::new(Q_FAMILY, Atom::QQ, Extent::Finite(n)),
                crate::sums::Family::new(QZ_FAMILY, Atom::QmodZ, Extent::Omega),
            ])
            .expect("distinct ids"),
        )
    }

    /// `φ_{mn}: M_n → M_m` for `m ≤ n`, built as
    /// `route(q→q, r→r shifted) + route ∘ reduce ∘ route` for the middle block.
    pub fn connecting(m: u64, n: u64) -> Result<Hom> {
        if m > n {
            return Err(Error::Precondition(format!("no map M_{n} → M_{m} for m > n")));
        }
        let (src, dst) = (Self::shape(n), Self::shape(m));
        let shift = (n - m) as i64;
        let keep = Hom::route(
            &src,
            &dst,
            vec![
                Route::new(Q_FAMILY, Q_FAMILY, IndexMap::Same),
                Route::new(QZ_FAMILY, QZ_FAMILY, IndexMap::Offset(shift)),
            ],
        )?;
        let q_only = Arc::new(ModuleShape::single(Q_FAMILY, Atom::QQ, Extent::Finite(n)));
        let take_q = Hom::route(&src, &q_only, vec![Route::new(Q_FAMILY, Q_FAMILY, IndexMap::Same)])?;
        let reduce = Hom::reduce_q(&q_only)?;
        let place = Hom::route(
            reduce.target(),
            &dst,
            vec![Route::new(Q_FAMILY, QZ_FAMILY, IndexMap::Offset(-(m as i64)))],
        )?;
        let middle = Hom::compose(&place, &Hom::compose(&reduce, &take_q)?)?;
        Hom::sum(vec![keep, middle])
    }

    /// The image of a sequence in `M_n`.
    pub fn project(seq: &EventuallyIntegerSeq, n: u64) -> Element {
        let shape = Self::shape(n);
        let mut out = Element::zero(&shape);
        for i in 0..n {
            out.set((0, i), &seq.get(i as usize)).expect("ℚ takes any value");
        }
        // Past the head every term is the integer tail, which reduces to 0.
        for i in n as usize..seq.head.len() {
            out.set((1, i as u64 - n), &seq.head[i]).expect("reduced on entry");
        }
        out
    }

    /// A sequence with tail 0 projecting to `x ∈ M_n`: ℚ coordinates are
    /// copied, ℚ/ℤ coordinates lifted to their representatives in `[0, 1)`.
    pub fn divisible_preimage(x: &Element, n: u64) -> Result<EventuallyIntegerSeq> {
        x.require_shape(&Self::shape(n))?;
        let len = x
            .iter()
            .map(|((pos, idx), _)| if pos == 0 { idx + 1 } else { n + idx + 1 })
            .max()
            .unwrap_or(0);
        let mut head = vec![Rational::zero(); len as usize];
        for ((pos, idx), v) in x.iter() {
            let i = if pos == 0 { idx } else { n + idx };
            head[i as usize] = v.clone();
        }
        Ok(EventuallyIntegerSeq::new(head, Integer::zero()))
    }
}
