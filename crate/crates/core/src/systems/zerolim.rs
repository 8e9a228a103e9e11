//! Fiber-sum systems `⊕_{S_k} N` over a finite chain of set surjections
//! `S_0 ← S_1 ← … ← S_L`, and the support sets `T_k` of their threads.
//!
//! For a thread `(x_k)`, `|T_k|` is nondecreasing in `k` because every
//! nonzero fiber sum needs a nonzero summand, and whenever `|T_k| = |T_l|`
//! the set map `S_l → S_k` restricts to a bijection `T_l → T_k`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::atoms::Atom;
use crate::error::{Error, Result};
use crate::homs::Hom;
use crate::sums::{Element, Extent, ModuleShape};

pub const SET_FAMILY: &str = "n";

/// Sets `S_k = {0, …, sizes[k] - 1}` with `maps[k]: S_{k+1} → S_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChainRepr", into = "ChainRepr")]
pub struct SetChain {
    sizes: Vec<usize>,
    maps: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainRepr {
    sizes: Vec<usize>,
    maps: Vec<Vec<usize>>,
}

impl TryFrom<ChainRepr> for SetChain {
    type Error = Error;
    fn try_from(r: ChainRepr) -> Result<Self> {
        SetChain::new(r.sizes, r.maps)
    }
}

impl From<SetChain> for ChainRepr {
    fn from(c: SetChain) -> Self {
        ChainRepr {
            sizes: c.sizes,
            maps: c.maps,
        }
    }
}

impl SetChain {
    pub fn new(sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Precondition("stages must be nonempty".into()));
        }
        if maps.len() + 1 != sizes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} stages need {} maps, got {}",
                sizes.len(),
                sizes.len() - 1,
                maps.len()
            )));
        }
        for (k, map) in maps.iter().enumerate() {
            if map.len() != sizes[k + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "map {k} has {} entries for a stage of size {}",
                    map.len(),
                    sizes[k + 1]
                )));
            }
            let mut hit = vec![false; sizes[k]];
            for &v in map {
                *hit.get_mut(v).ok_or_else(|| {
                    Error::Precondition(format!("map {k} sends a point to {v}, outside stage {k}"))
                })? = true;
            }
            if let Some(i) = hit.iter().position(|h| !h) {
                return Err(Error::NotSurjective(format!("map {k} misses point {i}")));
            }
        }
        Ok(Self { sizes, maps })
    }

    /// Index of the last stage.
    pub fn len(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn map(&self, k: usize) -> &[usize] {
        &self.maps[k]
    }

    /// The composite `S_l → S_k` for `k ≤ l`.
    pub fn set_map(&self, k: usize, l: usize) -> Vec<usize> {
        assert!(k <= l && l <= self.len());
        (0..self.sizes[l])
            .map(|mut j| {
                for s in (k..l).rev() {
                    j = self.maps[s][j];
                }
                j
            })
            .collect()
    }

    pub fn stage_shape(&self, k: usize, atom: &Atom) -> Arc<ModuleShape> {
        Arc::new(ModuleShape::single(
            SET_FAMILY,
            atom.clone(),
            Extent::Finite(self.sizes[k] as u64),
        ))
    }

    /// A random chain of `len` maps with stages of size at most `max_size`.
    pub fn random(rng: &mut crate::rng::Rng, len: usize, max_size: usize) -> Self {
        use rand::Rng as _;
        let mut sizes = vec![rng.random_range(1..=max_size)];
        let mut maps = Vec::new();
        for _ in 0..len {
            let below = *sizes.last().unwrap();
            let size = rng.random_range(below..=max_size);
            // Every point below gets one preimage, the rest land anywhere.
            let mut map: Vec<usize> = (0..below)
                .chain((below..size).map(|_| rng.random_range(0..below)))
                .collect();
            for i in (1..map.len()).rev() {
                map.swap(i, rng.random_range(0..=i));
            }
            sizes.push(size);
            maps.push(map);
        }
        Self::new(sizes, maps).expect("surjective by construction")
    }
}

/// `⊕_{S_{k+1}} N → ⊕_{S_k} N`, summing each fiber.
pub fn fiber_sum_map(chain: &SetChain, k: usize, atom: &Atom) -> Result<Hom> {
    if k + 1 > chain.len() {
        return Err(Error::Precondition(format!(
            "no map out of stage {} in a chain with last stage {}",
            k + 1,
            chain.len()
        )));
    }
    Hom::fiber_sum(
        &chain.stage_shape(k + 1, atom),
        &chain.stage_shape(k, atom),
        chain.maps[k].clone(),
    )
}

/// Compatible elements `x_k ∈ ⊕_{S_k} N` for every stage of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreadPrefix {
    chain: SetChain,
    atom: Atom,
    elements: Vec<Element>,
}

impl ThreadPrefix {
    pub fn new(chain: SetChain, atom: Atom, elements: Vec<Element>) -> Result<Self> {
        if elements.len() != chain.sizes.len() {
            return Err(Error::InvalidThread(format!(
                "{} elements for {} stages",
                elements.len(),
                chain.sizes.len()
            )));
        }
        for (k, x) in elements.iter().enumerate() {
            x.require_shape(&chain.stage_shape(k, &atom))?;
        }
        for k in 0..chain.len() {
            let phi = fiber_sum_map(&chain, k, &atom)?;
            if phi.apply(&elements[k + 1])? != elements[k] {
                return Err(Error::InvalidThread(format!(
                    "stage {} does not map onto stage {k}",
                    k + 1
                )));
            }
        }
        Ok(Self {
            chain,
            atom,
            elements,
        })
    }

    /// The thread determined by its top element.
    pub fn from_top(chain: SetChain, atom: Atom, top: Element) -> Result<Self> {
        let mut elements = vec![top];
        for k in (0..chain.len()).rev() {
            let phi = fiber_sum_map(&chain, k, &atom)?;
            let below = phi.apply(elements.last().unwrap())?;
            elements.push(below);
        }
        elements.reverse();
        Self::new(chain, atom, elements)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn chain(&self) -> &SetChain {
        &self.chain
    }

    pub fn support(&self, k: usize) -> BTreeSet<usize> {
        self.elements[k].iter().map(|((_, i), _)| i as usize).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionCheck {
    pub lower: usize,
    pub upper: usize,
    pub bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportReport {
    pub sizes: Vec<usize>,
    pub monotone: bool,
    pub bijection_checks: Vec<BijectionCheck>,
}

impl SupportReport {
    pub fn holds(&self) -> bool {
        self.monotone && self.bijection_checks.iter().all(|c| c.bijective)
    }
}

pub fn thread_support_analysis(thread: &ThreadPrefix) -> SupportReport {
    let supports: Vec<BTreeSet<usize>> = (0..thread.elements.len()).map(|k| thread.support(k)).collect();
    let sizes: Vec<usize> = supports.iter().map(BTreeSet::len).collect();
    let monotone = sizes.windows(2).all(|w| w[0] <= w[1]);
    let mut bijection_checks = Vec::new();
    for l in 0..sizes.len() {
        for k in 0..l {
            if sizes[k] != sizes[l] || sizes[k] == 0 {
                continue;
            }
            let map = thread.chain.set_map(k, l);
            let image: BTreeSet<usize> = supports[l].iter().map(|&j| map[j]).collect();
            bijection_checks.push(BijectionCheck {
                lower: k,
                upper: l,
                bijective: image.len() == supports[l].len() && image == supports[k],
            });
        }
    }
    SupportReport {
        sizes,
        monotone,
        bijection_checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, Rational};
    use crate::rng::Seed;
    use crate::sums::random_element_with;
    use rand::Rng as _;

    fn el(shape: &Arc<ModuleShape>, vals: &[(u64, Rational)]) -> Element {
        Element::from_coords(shape, vals.iter().map(|(i, v)| (SET_FAMILY, *i, v.clone()))).unwrap()
    }

    fn constant_chain() -> SetChain {
        SetChain::new(vec![1, 2], vec![vec![0, 0]]).unwrap()
    }

    #[test]
    fn chain_validation() {
        assert!(matches!(
            SetChain::new(vec![2, 2], vec![vec![0, 0]]),
            Err(Error::NotSurjective(_))
        ));
        assert!(SetChain::new(vec![2, 2], vec![vec![0, 2]]).is_err());
        assert!(SetChain::new(vec![1], vec![vec![0]]).is_err());
        assert!(SetChain::new(vec![0], vec![]).is_err());
        let c = SetChain::new(vec![1, 2, 3], vec![vec![0, 0], vec![1, 0, 1]]).unwrap();
        assert_eq!(c.set_map(0, 2), vec![0, 0, 0]);
        assert_eq!(c.set_map(1, 2), vec![1, 0, 1]);
        assert_eq!(c.set_map(2, 2), vec![0, 1, 2]);
    }

    #[test]
    fn fiber_sum_examples() {
        let c = constant_chain();
        let qz = Atom::QmodZ;
        let phi = fiber_sum_map(&c, 0, &qz).unwrap();
        let (s0, s1) = (c.stage_shape(0, &qz), c.stage_shape(1, &qz));
        let x = el(&s1, &[(0, rat(1, 3)), (1, rat(1, 3))]);
        assert_eq!(phi.apply(&x).unwrap(), el(&s0, &[(0, rat(2, 3))]));
        assert_eq!(
            phi.preimage(&el(&s0, &[(0, rat(1, 5))])).unwrap(),
            el(&s1, &[(0, rat(1, 5))])
        );
        assert!(fiber_sum_map(&c, 1, &qz).is_err());

        let perm = SetChain::new(vec![3, 3], vec![vec![2, 0, 1]]).unwrap();
        let phi = fiber_sum_map(&perm, 0, &qz).unwrap();
        let s = perm.stage_shape(0, &qz);
        let x = el(&s, &[(0, rat(1, 2)), (1, rat(1, 3))]);
        assert_eq!(phi.apply(&x).unwrap(), el(&s, &[(2, rat(1, 2)), (0, rat(1, 3))]));
    }

    #[test]
    fn support_examples() {
        let qz = Atom::QmodZ;
        let c = SetChain::new(vec![2, 2, 2], vec![vec![1, 0], vec![1, 0]]).unwrap();
        let zero = ThreadPrefix::from_top(c.clone(), qz.clone(), Element::zero(&c.stage_shape(2, &qz))).unwrap();
        let r = thread_support_analysis(&zero);
        assert_eq!((r.sizes.clone(), r.monotone, r.bijection_checks.len()), (vec![0, 0, 0], true, 0));

        let top = el(&c.stage_shape(2, &qz), &[(1, rat(1, 7))]);
        let t = ThreadPrefix::from_top(c, qz.clone(), top).unwrap();
        let r = thread_support_analysis(&t);
        assert_eq!(r.sizes, vec![1, 1, 1]);
        assert_eq!(r.bijection_checks.len(), 3);
        assert!(r.holds());

        let c = constant_chain();
        let top = el(&c.stage_shape(1, &qz), &[(0, rat(1, 2)), (1, rat(1, 2))]);
        let t = ThreadPrefix::from_top(c.clone(), qz.clone(), top.clone()).unwrap();
        let r = thread_support_analysis(&t);
        assert_eq!((r.sizes, r.monotone), (vec![0, 2], true));
        let bad = ThreadPrefix::new(c.clone(), qz.clone(), vec![el(&c.stage_shape(0, &qz), &[(0, rat(1, 2))]), top]);
        assert!(matches!(bad, Err(Error::InvalidThread(_))));
    }

    #[test]
    fn random_chains_keep_the_invariants() {
        let mut rng = Seed(5).rng();
        for _ in 0..50 {
            let len = rng.random_range(1..=6);
            let chain = SetChain::random(&mut rng, len, 8);
            let atom = if rng.random_bool(0.5) { Atom::cyclic(6).unwrap() } else { Atom::QmodZ };
            for k in 0..chain.len() {
                let phi = fiber_sum_map(&chain, k, &atom).unwrap();
                for _ in 0..10 {
                    let x = random_element_with(phi.source(), &mut rng, 4, &int(6));
                    let y = random_element_with(phi.source(), &mut rng, 4, &int(6));
                    assert_eq!(
                        phi.apply(&x.add(&y).unwrap()).unwrap(),
                        phi.apply(&x).unwrap().add(&phi.apply(&y).unwrap()).unwrap()
                    );
                    let t = random_element_with(phi.target(), &mut rng, 4, &int(6));
                    assert_eq!(phi.apply(&phi.preimage(&t).unwrap()).unwrap(), t);
                }
            }
            let top = random_element_with(&chain.stage_shape(chain.len(), &atom), &mut rng, 6, &int(6));
            let t = ThreadPrefix::from_top(chain, atom, top).unwrap();
            assert!(thread_support_analysis(&t).holds());
        }
    }
}
