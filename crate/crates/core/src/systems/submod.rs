//! `P = M ⊕ ⊕_{i≥1} N` and its submodules
//! `P_D = {x : x_i = f(x_0) for all i ∈ D}` over finite `D ⊆ {1, 2, …}`.
//!
//! A finitely supported `x` lies in every `P_D` exactly when all its `N`
//! coordinates vanish and `f(x_0) = 0`: otherwise a `D` containing an index
//! outside the support (or one where `x_i ≠ f(x_0)`) excludes it. So the
//! intersection is `ker f = A`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{slice, Blocks, Direction};
use crate::error::{Error, Result};
use crate::hull::{InjectivePresentation, KernelWitness};
use crate::sums::{Element, ModuleShape};

/// A finite set of indices, none of them 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeSet<u64>", into = "BTreeSet<u64>")]
pub struct FiniteSubsetD(BTreeSet<u64>);

impl FiniteSubsetD {
    pub fn new(indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let set: BTreeSet<u64> = indices.into_iter().collect();
        if set.contains(&0) {
            return Err(Error::Precondition("index 0 is reserved for M".into()));
        }
        Ok(Self(set))
    }

    /// The subset of `{1..=n}` encoded by the bits of `mask`.
    pub fn from_mask(mask: u64, n: u64) -> Self {
        Self((1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect())
    }

    pub fn indices(&self) -> &BTreeSet<u64> {
        &self.0
    }

    pub fn union(&self, other: &FiniteSubsetD) -> FiniteSubsetD {
        Self(self.0.union(&other.0).copied().collect())
    }
}

impl TryFrom<BTreeSet<u64>> for FiniteSubsetD {
    type Error = Error;
    fn try_from(s: BTreeSet<u64>) -> Result<Self> {
        Self::new(s)
    }
}

impl From<FiniteSubsetD> for BTreeSet<u64> {
    fn from(d: FiniteSubsetD) -> Self {
        d.0
    }
}

#[derive(Clone, Debug)]
pub struct SubmodSystem {
    pres: InjectivePresentation,
    p_shape: Arc<ModuleShape>,
    copies: Blocks,
}

impl SubmodSystem {
    /// `M` families are renamed `m.*`; each `N` family becomes an
    /// infinite family `n.*` holding copy `i` in block `i - 1`.
    pub fn new(pres: InjectivePresentation) -> Result<Self> {
        let m = pres.m_shape.prefixed("m.");
        let n = Blocks::layout(&pres.n_shape, "n.", None);
        let p_shape = Arc::new(ModuleShape::direct_sum([&m, &n])?);
        let copies = Blocks::new(&pres.n_shape, m.families().len())?;
        Ok(Self {
            pres,
            p_shape,
            copies,
        })
    }

    pub fn presentation(&self) -> &InjectivePresentation {
        &self.pres
    }

    pub fn p_shape(&self) -> &Arc<ModuleShape> {
        &self.p_shape
    }

    pub fn x0(&self, x: &Element) -> Element {
        slice(x, 0, &self.pres.m_shape)
    }

    /// Coordinate `i ≥ 1`, an element of `N`.
    pub fn copy(&self, x: &Element, i: u64) -> Element {
        assert!(i >= 1, "copies start at index 1");
        self.copies.get(x, i - 1)
    }

    /// Indices `i ≥ 1` where `x_i ≠ 0`.
    pub fn copy_support(&self, x: &Element) -> BTreeSet<u64> {
        self.copies.support(x).into_iter().map(|b| b + 1).collect()
    }

    /// Builds `(x_0, x_i …)` from an `M` element and `N` elements at
    /// indices `i ≥ 1`.
    pub fn element<'a>(
        &self,
        x0: &Element,
        copies: impl IntoIterator<Item = (u64, &'a Element)>,
    ) -> Result<Element> {
        x0.require_shape(&self.pres.m_shape)?;
        let mut out = Element::zero(&self.p_shape);
        out.place_families(0, x0);
        for (i, y) in copies {
            if i == 0 {
                return Err(Error::Precondition("index 0 is reserved for M".into()));
            }
            y.require_shape(&self.pres.n_shape)?;
            self.copies.put(&mut out, i - 1, y);
        }
        Ok(out)
    }

    /// `x` with the coordinates at `d` set to zero.
    pub fn cleared(&self, x: &Element, d: &FiniteSubsetD) -> Element {
        let mut out = x.clone();
        let zero = Element::zero(&self.pres.n_shape);
        for &i in d.indices() {
            self.copies.put(&mut out, i - 1, &zero);
        }
        out
    }

    pub fn f_x0(&self, x: &Element) -> Result<Element> {
        self.pres.f.apply(&self.x0(x))
    }

    pub fn pd_contains(&self, d: &FiniteSubsetD, x: &Element) -> Result<bool> {
        x.require_shape(&self.p_shape)?;
        let fx0 = self.f_x0(x)?;
        Ok(d.indices().iter().all(|&i| self.copy(x, i) == fx0))
    }

    /// Membership in every `P_D` at once, with the `A`-coordinates of `x_0`.
    pub fn intersection_member(&self, x: &Element) -> Result<Option<KernelWitness>> {
        x.require_shape(&self.p_shape)?;
        if !self.copy_support(x).is_empty() {
            return Ok(None);
        }
        self.pres.kernel_membership(&self.x0(x))
    }

    /// `P_D ≅ Π_{I−D}`: `Drop` zeroes the `D` coordinates of a member of
    /// `P_D`, `Reinsert` fills them with `f(x_0)`.
    pub fn pd_isomorphism(&self, d: &FiniteSubsetD, dir: Direction, x: &Element) -> Result<Element> {
        x.require_shape(&self.p_shape)?;
        let mut out = x.clone();
        match dir {
            Direction::Drop => {
                if !self.pd_contains(d, x)? {
                    return Err(Error::Precondition("element is not in P_D".into()));
                }
                out = self.cleared(x, d);
            }
            Direction::Reinsert => {
                let support = self.copy_support(x);
                if let Some(i) = d.indices().iter().find(|i| support.contains(i)) {
                    return Err(Error::Precondition(format!("element is nonzero at index {i} of D")));
                }
                let fx0 = self.f_x0(x)?;
                for &i in d.indices() {
                    self.copies.put(&mut out, i - 1, &fx0);
                }
            }
        }
        Ok(out)
    }
}
