//! Inverse systems whose limits are computed or probed exactly.
//!
//! * [`submod`]: the family of submodules `P_D ⊆ M ⊕ ⊕_{i≥1} N` whose
//!   intersection is `A`.
//! * [`zerolim`]: fiber-sum systems over finite chains of set surjections,
//!   with the support invariants of their threads.
//! * [`onto`]: the stages `{x : Σ x_i = f(x_0)} ⊆ M ⊕ ⊕_S N` and their
//!   surjective connecting maps.
//! * [`seq`]: the limit of `ℚ^n ⊕ ⊕ ℚ/ℤ`, restricted to eventually
//!   constant sequences.

pub mod onto;
pub mod seq;
pub mod submod;
pub mod zerolim;

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sums::{Element, Extent, ModuleShape};

pub use onto::{onto_connecting_map, OntoStage};
pub use seq::{Division, EventuallyIntegerSeq, SeqStages};
pub use submod::{FiniteSubsetD, SubmodSystem};
pub use zerolim::{fiber_sum_map, thread_support_analysis, SetChain, SupportReport, ThreadPrefix};

/// Which way an isomorphism of a submodule with a smaller product goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Drop,
    Reinsert,
}

/// Copies of a base shape laid out block by block in a larger shape:
/// block `b` of a base family of width `w` sits at indices `b·w .. (b+1)·w`
/// of the family at `offset + pos`.
#[derive(Clone, Debug)]
pub(crate) struct Blocks {
    base: Arc<ModuleShape>,
    offset: usize,
    widths: Vec<u64>,
}

impl Blocks {
    pub(crate) fn new(base: &Arc<ModuleShape>, offset: usize) -> Result<Self> {
        let widths = base
            .families()
            .iter()
            .map(|f| match f.extent {
                Extent::Finite(w) => Ok(w),
                Extent::Omega => Err(Error::Precondition(format!(
                    "family {:?} must have finite extent to be copied",
                    f.id
                ))),
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            base: base.clone(),
            offset,
            widths,
        })
    }

    /// The base shape with ids prefixed and extents widened to hold `blocks`
    /// copies (`None` for infinitely many).
    pub(crate) fn layout(base: &ModuleShape, prefix: &str, blocks: Option<u64>) -> ModuleShape {
        let mut out = base.prefixed(prefix);
        let fams = base
            .families()
            .iter()
            .zip(out.families())
            .map(|(b, f)| {
                let extent = match (b.extent, blocks) {
                    (Extent::Finite(w), Some(n)) => Extent::Finite(w * n),
                    _ => Extent::Omega,
                };
                crate::sums::Family::new(f.id.clone(), f.atom.clone(), extent)
            })
            .collect();
        out = ModuleShape::new(fams).expect("ids stay unique");
        out
    }

    pub(crate) fn get(&self, x: &Element, block: u64) -> Element {
        let mut out = Element::zero(&self.base);
        for (pos, &w) in self.widths.iter().enumerate() {
            for c in 0..w {
                if let Some(v) = x.get((self.offset + pos, block * w + c)) {
                    out.insert_canonical((pos, c), v.clone());
                }
            }
        }
        out
    }

    /// Overwrites block `block` of `x` with `y`.
    pub(crate) fn put(&self, x: &mut Element, block: u64, y: &Element) {
        for (pos, &w) in self.widths.iter().enumerate() {
            for c in 0..w {
                x.remove((self.offset + pos, block * w + c));
                if let Some(v) = y.get((pos, c)) {
                    x.insert_canonical((self.offset + pos, block * w + c), v.clone());
                }
            }
        }
    }

    /// Blocks with a nonzero coordinate.
    pub(crate) fn support(&self, x: &Element) -> BTreeSet<u64> {
        x.iter()
            .filter(|((pos, _), _)| *pos >= self.offset && *pos < self.offset + self.widths.len())
            .map(|((pos, idx), _)| idx / self.widths[pos - self.offset])
            .collect()
    }
}

/// The families `offset..offset + part.len()` of `x`, as an element of `part`.
pub(crate) fn slice(x: &Element, offset: usize, part: &Arc<ModuleShape>) -> Element {
    x.slice_families(offset..offset + part.families().len(), part)
}
