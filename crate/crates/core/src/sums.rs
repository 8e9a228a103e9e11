//! Direct sums of atoms over finite or countably infinite index families.
//!
//! A [`ModuleShape`] is an ordered list of families, each a run of copies of
//! one atom indexed by `0..n` or by all of ℕ. An [`Element`] is a finite
//! map from `(family, index)` to nonzero canonical values, so the module
//! itself is never materialized; only finitely supported elements are.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::arith::{self, Integer, Rational};
use crate::atoms::{Atom, AtomElement};
use crate::error::{Error, Result};
use crate::rng::Seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extent {
    Finite(u64),
    Omega,
}

impl Extent {
    pub fn contains(&self, index: u64) -> bool {
        match self {
            Extent::Finite(n) => index < *n,
            Extent::Omega => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub id: String,
    pub atom: Atom,
    pub extent: Extent,
}

impl Family {
    pub fn new(id: impl Into<String>, atom: Atom, extent: Extent) -> Self {
        Self {
            id: id.into(),
            atom,
            extent,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ShapeRepr", into = "ShapeRepr")]
pub struct ModuleShape {
    families: Vec<Family>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeRepr {
    families: Vec<Family>,
}

impl TryFrom<ShapeRepr> for ModuleShape {
    type Error = Error;
    fn try_from(r: ShapeRepr) -> Result<Self> {
        ModuleShape::new(r.families)
    }
}

impl From<ModuleShape> for ShapeRepr {
    fn from(s: ModuleShape) -> Self {
        ShapeRepr {
            families: s.families,
        }
    }
}

impl ModuleShape {
    pub fn new(families: Vec<Family>) -> Result<Self> {
        for (i, f) in families.iter().enumerate() {
            if families[..i].iter().any(|g| g.id == f.id) {
                return Err(Error::InvalidShape(format!("duplicate family id {:?}", f.id)));
            }
        }
        Ok(Self { families })
    }

    /// Shorthand for a shape with one family.
    pub fn single(id: impl Into<String>, atom: Atom, extent: Extent) -> Self {
        Self {
            families: vec![Family::new(id, atom, extent)],
        }
    }

    pub fn trivial() -> Self {
        Self { families: vec![] }
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn family(&self, pos: usize) -> &Family {
        &self.families[pos]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.families.iter().position(|f| f.id == id)
    }

    /// Whether every atom is divisible (so the sum is injective over ℤ).
    pub fn is_divisible(&self) -> bool {
        self.families.iter().all(|f| f.atom.is_divisible())
    }

    /// `⊕ parts`, families concatenated in order; ids must stay unique.
    pub fn direct_sum<'a>(parts: impl IntoIterator<Item = &'a ModuleShape>) -> Result<Self> {
        Self::new(
            parts
                .into_iter()
                .flat_map(|p| p.families.iter().cloned())
                .collect(),
        )
    }

    /// Same families with every atom replaced by `f(atom)`.
    pub fn map_atoms(&self, mut f: impl FnMut(&Atom) -> Result<Atom>) -> Result<Self> {
        let families = self
            .families
            .iter()
            .map(|fam| {
                Ok(Family {
                    id: fam.id.clone(),
                    atom: f(&fam.atom)?,
                    extent: fam.extent,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { families })
    }

    /// Same atoms and ids, every family given `extent`.
    pub fn with_extent(&self, extent: Extent) -> Self {
        Self {
            families: self
                .families
                .iter()
                .map(|f| Family::new(f.id.clone(), f.atom.clone(), extent))
                .collect(),
        }
    }

    /// Same families with ids prefixed by `prefix`.
    pub fn prefixed(&self, prefix: &str) -> Self {
        Self {
            families: self
                .families
                .iter()
                .map(|f| Family::new(format!("{prefix}{}", f.id), f.atom.clone(), f.extent))
                .collect(),
        }
    }

    /// Whether the families of `self` and `other` match apart from atoms.
    pub fn same_layout(&self, other: &ModuleShape) -> bool {
        self.families.len() == other.families.len()
            && self
                .families
                .iter()
                .zip(&other.families)
                .all(|(a, b)| a.id == b.id && a.extent == b.extent)
    }
}

impl fmt::Display for ModuleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.families.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .families
            .iter()
            .map(|fam| match fam.extent {
                Extent::Finite(1) => format!("{}:{}", fam.id, fam.atom),
                Extent::Finite(n) => format!("{}:{}^{n}", fam.id, fam.atom),
                Extent::Omega => format!("{}:⊕_ω {}", fam.id, fam.atom),
            })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Coordinate key: family position within the shape, then index.
pub type Coord = (usize, u64);

/// A finitely supported element of a [`ModuleShape`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    shape: Arc<ModuleShape>,
    coords: BTreeMap<Coord, Rational>,
}

impl Element {
    pub fn zero(shape: &Arc<ModuleShape>) -> Self {
        Self {
            shape: shape.clone(),
            coords: BTreeMap::new(),
        }
    }

    /// Builds an element from `(family id, index, value)` triples; values at
    /// repeated coordinates are added.
    pub fn from_coords<'a>(
        shape: &Arc<ModuleShape>,
        coords: impl IntoIterator<Item = (&'a str, u64, Rational)>,
    ) -> Result<Self> {
        let mut e = Self::zero(shape);
        for (id, idx, v) in coords {
            let pos = shape
                .position(id)
                .ok_or_else(|| Error::InvalidElement(format!("unknown family {id:?}")))?;
            e.add_at((pos, idx), &v)?;
        }
        Ok(e)
    }

    pub fn shape(&self) -> &Arc<ModuleShape> {
        &self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    /// Nonzero coordinates in `(family position, index)` order.
    pub fn iter(&self) -> impl Iterator<Item = (Coord, &Rational)> {
        self.coords.iter().map(|(k, v)| (*k, v))
    }

    pub fn get(&self, coord: Coord) -> Option<&Rational> {
        self.coords.get(&coord)
    }

    /// The coordinate as an [`AtomElement`] (zero when absent).
    pub fn atom_at(&self, id: &str, index: u64) -> Result<AtomElement> {
        let pos = self
            .shape
            .position(id)
            .ok_or_else(|| Error::InvalidElement(format!("unknown family {id:?}")))?;
        let atom = self.shape.family(pos).atom.clone();
        Ok(match self.coords.get(&(pos, index)) {
            Some(v) => AtomElement::new_unchecked(atom, v.clone()),
            None => AtomElement::zero(atom),
        })
    }

    /// Value at `(id, index)` as a rational, zero when absent.
    pub fn value(&self, id: &str, index: u64) -> Rational {
        self.shape
            .position(id)
            .and_then(|p| self.coords.get(&(p, index)).cloned())
            .unwrap_or_else(Rational::zero)
    }

    fn check_coord(&self, (pos, idx): Coord) -> Result<&Family> {
        let fam = self
            .shape
            .families
            .get(pos)
            .ok_or_else(|| Error::InvalidElement(format!("family position {pos} out of range")))?;
        if !fam.extent.contains(idx) {
            return Err(Error::InvalidElement(format!(
                "index {idx} outside extent of family {:?}",
                fam.id
            )));
        }
        Ok(fam)
    }

    /// Adds `v` (any valid representative) at `coord`.
    pub fn add_at(&mut self, coord: Coord, v: &Rational) -> Result<()> {
        let atom = self.check_coord(coord)?.atom.clone();
        let v = atom.canonicalize(v)?;
        self.add_canonical(coord, &atom, &v);
        Ok(())
    }

    /// Overwrites the coordinate with `v`.
    pub fn set(&mut self, coord: Coord, v: &Rational) -> Result<()> {
        let atom = self.check_coord(coord)?.atom.clone();
        let v = atom.canonicalize(v)?;
        if v.is_zero() {
            self.coords.remove(&coord);
        } else {
            self.coords.insert(coord, v);
        }
        Ok(())
    }

    pub(crate) fn add_canonical(&mut self, coord: Coord, atom: &Atom, v: &Rational) {
        if v.is_zero() {
            return;
        }
        let sum = match self.coords.get(&coord) {
            Some(old) => atom.add_values(old, v),
            None => v.clone(),
        };
        if sum.is_zero() {
            self.coords.remove(&coord);
        } else {
            self.coords.insert(coord, sum);
        }
    }

    /// Inserts a canonical value known to belong to this coordinate.
    pub(crate) fn insert_canonical(&mut self, coord: Coord, v: Rational) {
        if !v.is_zero() {
            self.coords.insert(coord, v);
        }
    }

    pub(crate) fn remove(&mut self, coord: Coord) -> Option<Rational> {
        self.coords.remove(&coord)
    }

    fn require_same_shape(&self, other: &Element) -> Result<()> {
        if Arc::ptr_eq(&self.shape, &other.shape) || self.shape == other.shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{} vs {}",
                self.shape, other.shape
            )))
        }
    }

    pub fn require_shape(&self, shape: &ModuleShape) -> Result<()> {
        if *self.shape == *shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "expected {shape}, found {}",
                self.shape
            )))
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.require_same_shape(other)?;
        let mut out = self.clone();
        for (&(pos, idx), v) in &other.coords {
            let atom = &self.shape.families[pos].atom;
            out.add_canonical((pos, idx), atom, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        self.map_values(|atom, v| atom.neg_value(v))
    }

    pub fn scalar_mul(&self, n: &Integer) -> Element {
        self.map_values(|atom, v| atom.mul_value(n, v))
    }

    fn map_values(&self, mut f: impl FnMut(&Atom, &Rational) -> Rational) -> Element {
        let mut out = Element::zero(&self.shape);
        for (&(pos, idx), v) in &self.coords {
            out.insert_canonical((pos, idx), f(&self.shape.families[pos].atom, v));
        }
        out
    }

    /// A `y` with `n * y = self`, built coordinatewise from canonical atom
    /// division witnesses. Fails at the first coordinate that does not divide.
    pub fn divide(&self, n: &Integer) -> Result<Element> {
        if n.is_zero() {
            return Err(Error::Precondition("division by zero".into()));
        }
        let mut out = Element::zero(&self.shape);
        for (&(pos, idx), v) in &self.coords {
            let fam = &self.shape.families[pos];
            let y = fam.atom.divide_value(n, v).map_err(|e| match e {
                Error::NotDivisible(msg) => {
                    Error::NotDivisible(format!("at ({}, {idx}): {msg}", fam.id))
                }
                other => other,
            })?;
            out.insert_canonical((pos, idx), y);
        }
        Ok(out)
    }

    /// Re-checks every representation invariant.
    pub fn validate(&self) -> Result<()> {
        for (&coord, v) in &self.coords {
            let fam = self.check_coord(coord)?;
            if v.is_zero() {
                return Err(Error::InvalidElement(format!("stored zero at {coord:?}")));
            }
            if fam.atom.canonicalize(v)? != *v {
                return Err(Error::InvalidElement(format!(
                    "non-canonical value {} at {coord:?}",
                    arith::format_rational(v)
                )));
            }
        }
        Ok(())
    }

    /// The coordinates in families `range`, as an element of `part`.
    pub(crate) fn slice_families(&self, range: Range<usize>, part: &Arc<ModuleShape>) -> Element {
        let mut out = Element::zero(part);
        for (&(pos, idx), v) in self.coords.range((range.start, 0)..(range.end, 0)) {
            out.coords.insert((pos - range.start, idx), v.clone());
        }
        out
    }

    /// Writes the coordinates of `part` into `self` starting at family `offset`.
    pub(crate) fn place_families(&mut self, offset: usize, part: &Element) {
        for (&(pos, idx), v) in &part.coords {
            self.coords.insert((pos + offset, idx), v.clone());
        }
    }

    /// Same coordinates viewed in a shape with identical layout and atoms.
    pub(crate) fn reshaped(&self, shape: &Arc<ModuleShape>) -> Element {
        Element {
            shape: shape.clone(),
            coords: self.coords.clone(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(&(pos, idx), v)| {
                let fam = &self.shape.families[pos];
                let el = AtomElement::new_unchecked(fam.atom.clone(), v.clone());
                format!("{}[{idx}]={el}", fam.id)
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementRepr {
    shape: ModuleShape,
    coords: Vec<(String, u64, String)>,
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut coords: Vec<(String, u64, String)> = self
            .coords
            .iter()
            .map(|(&(pos, idx), v)| {
                (
                    self.shape.families[pos].id.clone(),
                    idx,
                    arith::format_rational(v),
                )
            })
            .collect();
        coords.sort();
        ElementRepr {
            shape: (*self.shape).clone(),
            coords,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ElementRepr::deserialize(d)?;
        let shape = Arc::new(r.shape);
        let coords = r
            .coords
            .iter()
            .map(|(id, idx, v)| Ok((id.as_str(), *idx, arith::parse_rational(v)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Element::from_coords(&shape, coords).map_err(D::Error::custom)
    }
}

/// Draws a value of `atom` with numerator, denominator and representative
/// sizes bounded by `bound`.
pub(crate) fn random_atom_value(atom: &Atom, bound: &Integer, rng: &mut crate::rng::Rng) -> Rational {
    let b = bound.to_i64().unwrap_or(i64::MAX).max(1);
    match atom {
        Atom::ZZ => Rational::from_integer(rng.random_range(-b..=b).into()),
        Atom::Cyclic(d) => {
            let top = d.to_i64().map_or(b, |d| (d - 1).min(b));
            Rational::from_integer(rng.random_range(0..=top).into())
        }
        Atom::QQ => Rational::new(
            rng.random_range(-b..=b).into(),
            rng.random_range(1..=b).into(),
        ),
        Atom::QmodZ => {
            let den = rng.random_range(1..=b);
            Rational::new(rng.random_range(0..den).into(), den.into())
        }
        Atom::Pruefer(p) => {
            let p = p.to_i64().expect("desk-scale prime");
            let mut powers = vec![1i64];
            while let Some(next) = powers.last().unwrap().checked_mul(p) {
                if next > b {
                    break;
                }
                powers.push(next);
            }
            let pk = powers[rng.random_range(0..powers.len())];
            Rational::new(rng.random_range(0..pk).into(), pk.into())
        }
    }
}

/// A reproducible random element: `max_support` draws, each at a uniformly
/// chosen family, so the support has at most `max_support` coordinates. Omega families draw indices from
/// `[0, 8 * max_support)`.
pub fn random_element(
    shape: &Arc<ModuleShape>,
    seed: u64,
    max_support: usize,
    bound: &Integer,
) -> Element {
    let mut rng = Seed(seed).split("random_element").rng();
    random_element_with(shape, &mut rng, max_support, bound)
}

pub(crate) fn random_element_with(
    shape: &Arc<ModuleShape>,
    rng: &mut crate::rng::Rng,
    max_support: usize,
    bound: &Integer,
) -> Element {
    let mut out = Element::zero(shape);
    let usable: Vec<usize> = (0..shape.families.len())
        .filter(|&i| shape.families[i].extent != Extent::Finite(0))
        .collect();
    if usable.is_empty() || max_support == 0 {
        return out;
    }
    for _ in 0..max_support {
        let pos = usable[rng.random_range(0..usable.len())];
        let fam = &shape.families[pos];
        let idx = match fam.extent {
            Extent::Finite(n) => rng.random_range(0..n),
            Extent::Omega => rng.random_range(0..8 * max_support as u64),
        };
        let v = random_atom_value(&fam.atom, bound, rng);
        let v = fam.atom.reduce(&v);
        if v.is_zero() {
            out.coords.remove(&(pos, idx));
        } else {
            out.coords.insert((pos, idx), v);
        }
    }
    out
}
