//! A closed language of additive maps between [`ModuleShape`]s.
//!
//! Maps out of ℚ, ℚ/ℤ and ℤ(p^∞) can only be built from the structural
//! combinators (multiplication, reduction, routing, fiber sums); only ℤ and
//! ℤ/d families may be sent to arbitrary images generator by generator.
//!
//! Every combinator carries a deterministic [`Hom::preimage`] strategy. It
//! is a partial strategy: `NoPreimageFound` means the strategy gave up, not
//! that the map is not surjective.

mod json;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::arith::{self, Integer, Rational};
use crate::atoms::{Atom, EmbedKind};
use crate::error::{Error, Result};
use crate::sums::{Coord, Element, Extent, ModuleShape};

pub use json::HomRepr;

/// How a routed family's indices move.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexMap {
    Same,
    /// `i ↦ i + offset`, dropping indices that leave the target extent.
    Offset(i64),
    /// Explicit pairs; unlisted source indices are dropped.
    Table(BTreeMap<u64, u64>),
}

impl IndexMap {
    fn forward(&self, i: u64) -> Option<u64> {
        match self {
            IndexMap::Same => Some(i),
            IndexMap::Offset(o) => i.checked_add_signed(*o),
            IndexMap::Table(t) => t.get(&i).copied(),
        }
    }

    fn backward(&self, j: u64) -> Option<u64> {
        match self {
            IndexMap::Same => Some(j),
            IndexMap::Offset(o) => j.checked_add_signed(-*o),
            IndexMap::Table(t) => t.iter().find(|(_, &v)| v == j).map(|(&k, _)| k),
        }
    }

    /// Half-open target index range hit from a source of extent `src`,
    /// clipped to `dst`. `None` as the upper end means unbounded.
    fn image_ranges(&self, src: Extent, dst: Extent) -> Vec<(u64, Option<u64>)> {
        let clip = |lo: u64, hi: Option<u64>| {
            let hi = match (hi, dst) {
                (None, Extent::Omega) => None,
                (None, Extent::Finite(m)) => Some(m),
                (Some(h), Extent::Omega) => Some(h),
                (Some(h), Extent::Finite(m)) => Some(h.min(m)),
            };
            match hi {
                Some(h) if h <= lo => None,
                _ => Some((lo, hi)),
            }
        };
        let src_hi = match src {
            Extent::Finite(n) => Some(n),
            Extent::Omega => None,
        };
        match self {
            IndexMap::Same => clip(0, src_hi).into_iter().collect(),
            IndexMap::Offset(o) => {
                let lo = if *o >= 0 { *o as u64 } else { 0 };
                let hi = src_hi.map(|n| (n as i64 + o).max(0) as u64);
                clip(lo, hi).into_iter().collect()
            }
            IndexMap::Table(t) => t
                .values()
                .filter_map(|&v| clip(v, Some(v + 1)))
                .collect(),
        }
    }
}

/// One family-to-family leg of a coordinate route.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Route {
    pub from: String,
    pub to: String,
    pub index: IndexMap,
}

impl Route {
    pub fn new(from: impl Into<String>, to: impl Into<String>, index: IndexMap) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Body {
    Zero,
    Identity,
    Route(Vec<(usize, usize, IndexMap)>),
    MultRational(Rational),
    MultInt(Integer),
    ReduceQ,
    EmbedCyclic,
    PrueferMultPk(u32),
    GeneratorImage(BTreeMap<Coord, Element>),
    FiberSum(Vec<usize>),
    Sum(Vec<Hom>),
    DirectSum(Vec<Hom>),
    Compose(Box<Hom>, Box<Hom>),
}

/// An additive map `source → target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hom {
    source: Arc<ModuleShape>,
    target: Arc<ModuleShape>,
    body: Body,
}

fn ill(op: &str, reason: impl Into<String>) -> Error {
    Error::IllTyped {
        path: op.to_string(),
        reason: reason.into(),
    }
}

fn no_preimage(msg: impl Into<String>) -> Error {
    Error::NoPreimageFound(msg.into())
}

fn all_atoms(shape: &ModuleShape, op: &str, pred: impl Fn(&Atom) -> bool, what: &str) -> Result<()> {
    match shape.families().iter().find(|f| !pred(&f.atom)) {
        Some(f) => Err(ill(op, format!("family {:?} is {}, expected {what}", f.id, f.atom))),
        None => Ok(()),
    }
}

impl Hom {
    pub fn source(&self) -> &Arc<ModuleShape> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ModuleShape> {
        &self.target
    }

    /// Name of the outermost combinator.
    pub fn op_name(&self) -> &'static str {
        match &self.body {
            Body::Zero => "zero",
            Body::Identity => "identity",
            Body::Route(_) => "route",
            Body::MultRational(_) => "mult_by_rational",
            Body::MultInt(_) => "mult_by_int",
            Body::ReduceQ => "reduce_q",
            Body::EmbedCyclic => "embed_cyclic",
            Body::PrueferMultPk(_) => "pruefer_mult_pk",
            Body::GeneratorImage(_) => "generator_image",
            Body::FiberSum(_) => "fiber_sum",
            Body::Sum(_) => "sum",
            Body::DirectSum(_) => "direct_sum",
            Body::Compose(..) => "compose",
        }
    }

    pub fn zero(source: &Arc<ModuleShape>, target: &Arc<ModuleShape>) -> Hom {
        Hom {
            source: source.clone(),
            target: target.clone(),
            body: Body::Zero,
        }
    }

    pub fn identity(shape: &Arc<ModuleShape>) -> Hom {
        Hom {
            source: shape.clone(),
            target: shape.clone(),
            body: Body::Identity,
        }
    }

    /// Injections, projections and permutations between sum coordinates.
    /// Each target coordinate may be hit by at most one source coordinate.
    pub fn route(
        source: &Arc<ModuleShape>,
        target: &Arc<ModuleShape>,
        routes: Vec<Route>,
    ) -> Result<Hom> {
        let op = "route";
        let mut legs = Vec::new();
        let mut hits: BTreeMap<usize, Vec<(u64, Option<u64>)>> = BTreeMap::new();
        for r in routes {
            let sp = source
                .position(&r.from)
                .ok_or_else(|| ill(op, format!("unknown source family {:?}", r.from)))?;
            let tp = target
                .position(&r.to)
                .ok_or_else(|| ill(op, format!("unknown target family {:?}", r.to)))?;
            let (sf, tf) = (source.family(sp), target.family(tp));
            if sf.atom != tf.atom {
                return Err(ill(op, format!("{} routed into {}", sf.atom, tf.atom)));
            }
            if legs.iter().any(|(s, _, _)| *s == sp) {
                return Err(ill(op, format!("family {:?} routed twice", r.from)));
            }
            if let IndexMap::Table(t) = &r.index {
                for (&a, &b) in t {
                    if !sf.extent.contains(a) || !tf.extent.contains(b) {
                        return Err(ill(op, format!("table entry {a}->{b} out of extent")));
                    }
                }
                let mut seen = std::collections::BTreeSet::new();
                if !t.values().all(|v| seen.insert(*v)) {
                    return Err(ill(op, "table is not injective"));
                }
            }
            let ranges = r.index.image_ranges(sf.extent, tf.extent);
            let taken = hits.entry(tp).or_default();
            for &(lo, hi) in &ranges {
                let overlaps = taken.iter().any(|&(l2, h2)| {
                    lo < h2.unwrap_or(u64::MAX) && l2 < hi.unwrap_or(u64::MAX)
                });
                if overlaps {
                    return Err(ill(op, format!("routes collide in family {:?}", r.to)));
                }
            }
            taken.extend(ranges);
            legs.push((sp, tp, r.index));
        }
        Ok(Hom {
            source: source.clone(),
            target: target.clone(),
            body: Body::Route(legs),
        })
    }

    pub fn mult_by_rational(shape: &Arc<ModuleShape>, q: Rational) -> Result<Hom> {
        all_atoms(shape, "mult_by_rational", |a| *a == Atom::QQ, "ℚ")?;
        Ok(Hom {
            source: shape.clone(),
            target: shape.clone(),
            body: Body::MultRational(q),
        })
    }

    pub fn mult_by_int(shape: &Arc<ModuleShape>, n: Integer) -> Hom {
        Hom {
            source: shape.clone(),
            target: shape.clone(),
            body: Body::MultInt(n),
        }
    }

    /// ℚ-families onto ℚ/ℤ-families with the same layout.
    pub fn reduce_q(source: &Arc<ModuleShape>) -> Result<Hom> {
        let op = "reduce_q";
        all_atoms(source, op, |a| *a == Atom::QQ, "ℚ")?;
        let target = source.map_atoms(|_| Ok(Atom::QmodZ))?;
        Ok(Hom {
            source: source.clone(),
            target: Arc::new(target),
            body: Body::ReduceQ,
        })
    }

    /// ℤ/p^k-families into ℤ(p^∞)-families with the same layout.
    pub fn embed_cyclic(source: &Arc<ModuleShape>) -> Result<Hom> {
        let target = source
            .map_atoms(|a| a.embed_target(EmbedKind::CyclicIntoPruefer))
            .map_err(|e| ill("embed_cyclic", e.to_string()))?;
        Ok(Hom {
            source: source.clone(),
            target: Arc::new(target),
            body: Body::EmbedCyclic,
        })
    }

    /// Multiplication by `p^k` on ℤ(p^∞)-families (each with its own `p`).
    pub fn pruefer_mult_pk(shape: &Arc<ModuleShape>, k: u32) -> Result<Hom> {
        all_atoms(shape, "pruefer_mult_pk", |a| matches!(a, Atom::Pruefer(_)), "a Prüfer group")?;
        Ok(Hom {
            source: shape.clone(),
            target: shape.clone(),
            body: Body::PrueferMultPk(k),
        })
    }

    /// Sends each generator `(family, index)` of a ℤ/ℤ-d source to an element
    /// of `target`; generators left out go to zero.
    pub fn generator_image<'a>(
        source: &Arc<ModuleShape>,
        target: &Arc<ModuleShape>,
        images: impl IntoIterator<Item = (&'a str, u64, Element)>,
    ) -> Result<Hom> {
        let op = "generator_image";
        for f in source.families() {
            if !f.atom.is_cyclic_group() {
                return Err(ill(op, format!("family {:?} is {}, not finitely generated", f.id, f.atom)));
            }
            if f.extent == Extent::Omega {
                return Err(ill(op, format!("family {:?} has infinite extent", f.id)));
            }
        }
        let mut map = BTreeMap::new();
        for (id, idx, img) in images {
            let pos = source
                .position(id)
                .ok_or_else(|| ill(op, format!("unknown generator family {id:?}")))?;
            let fam = source.family(pos);
            if !fam.extent.contains(idx) {
                return Err(ill(op, format!("generator {id}[{idx}] out of extent")));
            }
            img.require_shape(target).map_err(|e| ill(op, e.to_string()))?;
            if let Atom::Cyclic(d) = &fam.atom {
                if !img.scalar_mul(d).is_zero() {
                    return Err(ill(op, format!("image of {id}[{idx}] is not killed by {d}")));
                }
            }
            if map.insert((pos, idx), img.reshaped(target)).is_some() {
                return Err(ill(op, format!("generator {id}[{idx}] given twice")));
            }
        }
        map.retain(|_, img: &mut Element| !img.is_zero());
        Ok(Hom {
            source: source.clone(),
            target: target.clone(),
            body: Body::GeneratorImage(map),
        })
    }

    /// `y_i = Σ_{map[j] = i} x_j`, family by family, for a surjection
    /// `map: {0..|source|} → {0..|target|}`.
    pub fn fiber_sum(
        source: &Arc<ModuleShape>,
        target: &Arc<ModuleShape>,
        map: Vec<usize>,
    ) -> Result<Hom> {
        let op = "fiber_sum";
        let src_n = map.len() as u64;
        let mut hit = Vec::new();
        if source.families().len() != target.families().len() {
            return Err(ill(op, "source and target family counts differ"));
        }
        for (sf, tf) in source.families().iter().zip(target.families()) {
            if sf.id != tf.id || sf.atom != tf.atom {
                return Err(ill(op, format!("family {:?} does not match {:?}", sf.id, tf.id)));
            }
            if sf.extent != Extent::Finite(src_n) {
                return Err(ill(op, format!("family {:?} must have extent {src_n}", sf.id)));
            }
            let Extent::Finite(m) = tf.extent else {
                return Err(ill(op, "target extent must be finite"));
            };
            hit = vec![false; m as usize];
        }
        for &i in &map {
            match hit.get_mut(i) {
                Some(h) => *h = true,
                None if source.families().is_empty() => {}
                None => return Err(ill(op, format!("map value {i} out of range"))),
            }
        }
        if let Some(i) = hit.iter().position(|h| !h) {
            return Err(Error::NotSurjective(format!("fiber over {i} is empty")));
        }
        Ok(Hom {
            source: source.clone(),
            target: target.clone(),
            body: Body::FiberSum(map),
        })
    }

    /// Pointwise sum of maps with a common source and target.
    pub fn sum(terms: Vec<Hom>) -> Result<Hom> {
        let first = terms.first().ok_or_else(|| ill("sum", "no terms"))?;
        let (source, target) = (first.source.clone(), first.target.clone());
        for t in &terms[1..] {
            if *t.source != *source || *t.target != *target {
                return Err(ill("sum", "terms disagree on source or target"));
            }
        }
        Ok(Hom {
            source,
            target,
            body: Body::Sum(terms),
        })
    }

    /// Block-diagonal map `⊕ sources → ⊕ targets`.
    pub fn direct_sum(terms: Vec<Hom>) -> Result<Hom> {
        let source = ModuleShape::direct_sum(terms.iter().map(|t| &*t.source))
            .map_err(|e| ill("direct_sum", e.to_string()))?;
        let target = ModuleShape::direct_sum(terms.iter().map(|t| &*t.target))
            .map_err(|e| ill("direct_sum", e.to_string()))?;
        Ok(Hom {
            source: Arc::new(source),
            target: Arc::new(target),
            body: Body::DirectSum(terms),
        })
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &Hom, inner: &Hom) -> Result<Hom> {
        if *inner.target != *outer.source {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose: inner target {} is not outer source {}",
                inner.target, outer.source
            )));
        }
        Ok(Hom {
            source: inner.source.clone(),
            target: outer.target.clone(),
            body: Body::Compose(Box::new(outer.clone()), Box::new(inner.clone())),
        })
    }

    /// The basis element of a ℤ or ℤ/d family.
    pub fn generator(shape: &Arc<ModuleShape>, pos: usize, index: u64) -> Element {
        let mut e = Element::zero(shape);
        e.insert_canonical((pos, index), Rational::one());
        e
    }

    /// All generators of a finitely generated source, in coordinate order.
    pub fn source_generators(&self) -> Result<Vec<(Coord, Element)>> {
        let mut out = Vec::new();
        for (pos, f) in self.source.families().iter().enumerate() {
            let Extent::Finite(n) = f.extent else {
                return Err(Error::Precondition(format!("family {:?} is not finitely generated", f.id)));
            };
            if !f.atom.is_cyclic_group() {
                return Err(Error::Precondition(format!("family {:?} is {}", f.id, f.atom)));
            }
            for i in 0..n {
                out.push(((pos, i), Self::generator(&self.source, pos, i)));
            }
        }
        Ok(out)
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        x.require_shape(&self.source)?;
        Ok(self.eval(x))
    }

    fn eval(&self, x: &Element) -> Element {
        let tgt = &self.target;
        match &self.body {
            Body::Zero => Element::zero(tgt),
            Body::Identity => x.reshaped(tgt),
            Body::Route(legs) => {
                let mut out = Element::zero(tgt);
                for ((pos, idx), v) in x.iter() {
                    let Some((_, tp, map)) = legs.iter().find(|(sp, _, _)| *sp == pos) else {
                        continue;
                    };
                    if let Some(j) = map.forward(idx) {
                        if tgt.family(*tp).extent.contains(j) {
                            out.insert_canonical((*tp, j), v.clone());
                        }
                    }
                }
                out
            }
            Body::MultRational(q) => {
                let mut out = Element::zero(tgt);
                for (c, v) in x.iter() {
                    out.insert_canonical(c, v * q);
                }
                out
            }
            Body::MultInt(n) => x.scalar_mul(n).reshaped(tgt),
            Body::ReduceQ => {
                let mut out = Element::zero(tgt);
                for (c, v) in x.iter() {
                    out.insert_canonical(c, arith::frac(v));
                }
                out
            }
            Body::EmbedCyclic => {
                let mut out = Element::zero(tgt);
                for ((pos, idx), v) in x.iter() {
                    let atom = &self.source.family(pos).atom;
                    out.insert_canonical((pos, idx), atom.embed_value(EmbedKind::CyclicIntoPruefer, v));
                }
                out
            }
            Body::PrueferMultPk(k) => {
                let mut out = Element::zero(tgt);
                for ((pos, idx), v) in x.iter() {
                    let atom = &self.source.family(pos).atom;
                    let Atom::Pruefer(p) = atom else { unreachable!("validated") };
                    out.insert_canonical((pos, idx), atom.mul_value(&p.pow(*k), v));
                }
                out
            }
            Body::GeneratorImage(images) => {
                let mut out = Element::zero(tgt);
                for (c, v) in x.iter() {
                    if let Some(img) = images.get(&c) {
                        out = out.add(&img.scalar_mul(v.numer())).expect("same shape");
                    }
                }
                out
            }
            Body::FiberSum(map) => {
                let mut out = Element::zero(tgt);
                for ((pos, idx), v) in x.iter() {
                    let atom = &tgt.family(pos).atom;
                    out.add_canonical((pos, map[idx as usize] as u64), atom, v);
                }
                out
            }
            Body::Sum(terms) => terms.iter().fold(Element::zero(tgt), |acc, t| {
                acc.add(&t.eval(x)).expect("same shape")
            }),
            Body::DirectSum(terms) => {
                let mut out = Element::zero(tgt);
                let (mut so, mut to) = (0, 0);
                for t in terms {
                    let sn = t.source.families().len();
                    let part = x.slice_families(so..so + sn, &t.source);
                    out.place_families(to, &t.eval(&part));
                    so += sn;
                    to += t.target.families().len();
                }
                out
            }
            Body::Compose(outer, inner) => outer.eval(&inner.eval(x)),
        }
    }

    /// A deterministic `x` with `apply(self, x) = y`, when the combinator's
    /// strategy finds one.
    pub fn preimage(&self, y: &Element) -> Result<Element> {
        y.require_shape(&self.target)?;
        let x = self.pre(y)?;
        debug_assert_eq!(self.eval(&x), y.reshaped(&self.target));
        Ok(x)
    }

    fn pre(&self, y: &Element) -> Result<Element> {
        let src = &self.source;
        match &self.body {
            Body::Zero => {
                if y.is_zero() {
                    Ok(Element::zero(src))
                } else {
                    Err(no_preimage("nonzero element is not in the image of the zero map"))
                }
            }
            Body::Identity => Ok(y.reshaped(src)),
            Body::Route(legs) => {
                let mut out = Element::zero(src);
                for ((tp, j), v) in y.iter() {
                    let found = legs.iter().find_map(|(sp, t, map)| {
                        if *t != tp {
                            return None;
                        }
                        map.backward(j)
                            .filter(|&i| src.family(*sp).extent.contains(i) && map.forward(i) == Some(j))
                            .map(|i| (*sp, i))
                    });
                    match found {
                        Some(c) => out.insert_canonical(c, v.clone()),
                        None => {
                            return Err(no_preimage(format!(
                                "coordinate {}[{j}] is not hit by the route",
                                self.target.family(tp).id
                            )))
                        }
                    }
                }
                Ok(out)
            }
            Body::MultRational(q) => {
                if q.is_zero() {
                    return Self::zero(src, &self.target).pre(y);
                }
                let mut out = Element::zero(src);
                for (c, v) in y.iter() {
                    out.insert_canonical(c, v / q);
                }
                Ok(out)
            }
            Body::MultInt(n) => {
                if n.is_zero() {
                    return Self::zero(src, &self.target).pre(y);
                }
                y.divide(n)
                    .map(|x| x.reshaped(src))
                    .map_err(|e| no_preimage(e.to_string()))
            }
            Body::ReduceQ => {
                let mut out = Element::zero(src);
                for (c, v) in y.iter() {
                    out.insert_canonical(c, v.clone());
                }
                Ok(out)
            }
            Body::EmbedCyclic => {
                let mut out = Element::zero(src);
                for ((pos, idx), v) in y.iter() {
                    let Atom::Cyclic(d) = &src.family(pos).atom else { unreachable!("validated") };
                    let r = v * Rational::from_integer(d.clone());
                    if !r.is_integer() {
                        return Err(no_preimage(format!(
                            "{} has order beyond {d}",
                            arith::format_rational(v)
                        )));
                    }
                    out.insert_canonical((pos, idx), r);
                }
                Ok(out)
            }
            Body::PrueferMultPk(k) => {
                let mut out = Element::zero(src);
                for ((pos, idx), v) in y.iter() {
                    let atom = &src.family(pos).atom;
                    let Atom::Pruefer(p) = atom else { unreachable!("validated") };
                    let w = atom
                        .divide_value(&p.pow(*k), v)
                        .map_err(|e| no_preimage(e.to_string()))?;
                    out.insert_canonical((pos, idx), w);
                }
                Ok(out)
            }
            Body::GeneratorImage(images) => {
                if y.is_zero() {
                    return Ok(Element::zero(src));
                }
                let y = y.reshaped(&self.target);
                images
                    .iter()
                    .find(|(_, img)| **img == y)
                    .map(|(&(pos, idx), _)| Self::generator(src, pos, idx))
                    .ok_or_else(|| no_preimage("target is not a generator image"))
            }
            Body::FiberSum(map) => {
                // Least-index section of each fiber.
                let mut out = Element::zero(src);
                for ((pos, i), v) in y.iter() {
                    let j = map.iter().position(|&t| t as u64 == i).expect("surjective");
                    out.insert_canonical((pos, j as u64), v.clone());
                }
                Ok(out)
            }
            Body::Sum(terms) => {
                let x = terms[0].pre(y)?;
                if self.eval(&x) == y.reshaped(&self.target) {
                    Ok(x)
                } else {
                    Err(no_preimage("first summand's preimage does not solve the sum"))
                }
            }
            Body::DirectSum(terms) => {
                let mut out = Element::zero(src);
                let (mut so, mut to) = (0, 0);
                for t in terms {
                    let tn = t.target.families().len();
                    let part = y.slice_families(to..to + tn, &t.target);
                    out.place_families(so, &t.pre(&part)?);
                    so += t.source.families().len();
                    to += tn;
                }
                Ok(out)
            }
            Body::Compose(outer, inner) => inner.pre(&outer.pre(y)?),
        }
    }

    /// The generator images of a finitely generated source, in coordinate
    /// order, as `(family id, index, image)`.
    pub fn generator_images(&self) -> Result<Vec<(String, u64, Element)>> {
        self.source_generators()?
            .into_iter()
            .map(|((pos, idx), g)| {
                Ok((self.source.family(pos).id.clone(), idx, self.eval(&g)))
            })
            .collect()
    }

    /// Whether the map sends every listed sample to zero.
    pub fn kills_all<'a>(&self, samples: impl IntoIterator<Item = &'a Element>) -> Result<bool> {
        for x in samples {
            if !self.apply(x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Factors `f0` through a surjection: returns `g` with `phi ∘ g = f0`, built
/// from `phi`'s preimage of each generator image of `f0`. The source of `f0`
/// must be free of finite rank.
pub fn lift_through_surjection(f0: &Hom, phi: &Hom) -> Result<Hom> {
    if *f0.target != *phi.target {
        return Err(Error::ShapeMismatch(format!(
            "f0 lands in {}, phi in {}",
            f0.target, phi.target
        )));
    }
    for f in f0.source.families() {
        if f.atom != Atom::ZZ || f.extent == Extent::Omega {
            return Err(Error::Precondition(format!(
                "lifting needs a free finite-rank source; family {:?} is {}",
                f.id, f.atom
            )));
        }
    }
    let mut images = Vec::new();
    for ((pos, idx), g) in f0.source_generators()? {
        let y = f0.eval(&g);
        let x = phi.preimage(&y)?;
        images.push((f0.source.family(pos).id.clone(), idx, x));
    }
    Hom::generator_image(
        &f0.source,
        &phi.source,
        images.iter().map(|(id, i, x)| (id.as_str(), *i, x.clone())),
    )
}

/// Extends `h: cℤ → D` along the inclusion `cℤ ⊆ c'ℤ` with `c = m·c'`,
/// for divisible `D`: the new generator goes to the canonical `h(g) / m`.
pub fn extend_into_divisible(h: &Hom, m: &Integer) -> Result<Hom> {
    let fams = h.source.families();
    if fams.len() != 1 || fams[0].atom != Atom::ZZ || fams[0].extent != Extent::Finite(1) {
        return Err(Error::Precondition(format!(
            "extension needs a rank-1 free source, got {}",
            h.source
        )));
    }
    if !h.target.is_divisible() {
        return Err(Error::Precondition(format!(
            "extension needs a divisible target, got {}",
            h.target
        )));
    }
    if !m.is_positive() {
        return Err(Error::Precondition(format!("index {m} must be at least 1")));
    }
    let g = Hom::generator(&h.source, 0, 0);
    let img = h.eval(&g).divide(m)?;
    Hom::generator_image(&h.source, &h.target, [(fams[0].id.as_str(), 0, img)])
}
