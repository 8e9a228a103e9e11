//! Stages `P_S = {x ∈ M ⊕ ⊕_S N : Σ_{i∈S} x_i = f(x_0)}` over finite sets
//! `S`, and the maps between them induced by set surjections.
//!
//! The connecting maps are the identity on `M` and fiber sums on the `N`
//! part, so they preserve the total `Σ x_i` and hence the defining
//! equation. If every `N` coordinate of an element is zero the equation
//! reads `f(x_0) = 0`, i.e. `x_0 ∈ A`.

use std::sync::Arc;

use super::{slice, Blocks, Direction};
use crate::error::{Error, Result};
use crate::homs::Hom;
use crate::hull::InjectivePresentation;
use crate::sums::{Element, Extent, ModuleShape};

#[derive(Clone, Debug)]
pub struct OntoStage {
    pres: Arc<InjectivePresentation>,
    s: usize,
    shape: Arc<ModuleShape>,
    copies: Blocks,
}

impl OntoStage {
    /// The stage over `S = {0, …, s - 1}`.
    pub fn new(pres: &Arc<InjectivePresentation>, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::Precondition("S must be nonempty".into()));
        }
        let m = pres.m_shape.prefixed("m.");
        let n = Blocks::layout(&pres.n_shape, "n.", Some(s as u64));
        let shape = Arc::new(ModuleShape::direct_sum([&m, &n])?);
        let copies = Blocks::new(&pres.n_shape, m.families().len())?;
        Ok(Self {
            pres: pres.clone(),
            s,
            shape,
            copies,
        })
    }

    pub fn size(&self) -> usize {
        self.s
    }

    pub fn shape(&self) -> &Arc<ModuleShape> {
        &self.shape
    }

    pub fn presentation(&self) -> &Arc<InjectivePresentation> {
        &self.pres
    }

    pub fn x0(&self, x: &Element) -> Element {
        slice(x, 0, &self.pres.m_shape)
    }

    pub fn copy(&self, x: &Element, i: usize) -> Element {
        self.copies.get(x, i as u64)
    }

    pub fn element<'a>(
        &self,
        x0: &Element,
        copies: impl IntoIterator<Item = (usize, &'a Element)>,
    ) -> Result<Element> {
        x0.require_shape(&self.pres.m_shape)?;
        let mut out = Element::zero(&self.shape);
        out.place_families(0, x0);
        for (i, y) in copies {
            if i >= self.s {
                return Err(Error::Precondition(format!("index {i} is outside S")));
            }
            y.require_shape(&self.pres.n_shape)?;
            self.copies.put(&mut out, i as u64, y);
        }
        Ok(out)
    }

    /// `Σ_{i∈S} x_i`, skipping `skip`.
    fn n_total(&self, x: &Element, skip: Option<usize>) -> Element {
        (0..self.s)
            .filter(|&i| Some(i) != skip)
            .fold(Element::zero(&self.pres.n_shape), |acc, i| {
                acc.add(&self.copy(x, i)).expect("same shape")
            })
    }

    pub fn contains(&self, x: &Element) -> Result<bool> {
        x.require_shape(&self.shape)?;
        Ok(self.n_total(x, None) == self.pres.f.apply(&self.x0(x))?)
    }

    /// `x` with the `N` coordinates at `indices` set to zero.
    pub fn cleared(&self, x: &Element, indices: impl IntoIterator<Item = usize>) -> Element {
        let mut out = x.clone();
        let zero = Element::zero(&self.pres.n_shape);
        for i in indices {
            self.copies.put(&mut out, i as u64, &zero);
        }
        out
    }

    pub fn n_part_is_zero(&self, x: &Element) -> bool {
        self.copies.support(x).is_empty()
    }

    /// `P_S ≅ M ⊕ ⊕_{S−{i0}} N`: `Drop` forgets `x_{i0}`, `Reinsert`
    /// solves for it.
    pub fn isomorphism(&self, i0: usize, dir: Direction, x: &Element) -> Result<Element> {
        x.require_shape(&self.shape)?;
        if i0 >= self.s {
            return Err(Error::Precondition(format!("index {i0} is outside S")));
        }
        let mut out = x.clone();
        match dir {
            Direction::Drop => {
                if !self.contains(x)? {
                    return Err(Error::Precondition("element is not in the stage".into()));
                }
                self.copies.put(&mut out, i0 as u64, &Element::zero(&self.pres.n_shape));
            }
            Direction::Reinsert => {
                if !self.copy(x, i0).is_zero() {
                    return Err(Error::Precondition(format!("element is nonzero at {i0}")));
                }
                let fx0 = self.pres.f.apply(&self.x0(x))?;
                let xi0 = fx0.sub(&self.n_total(x, Some(i0)))?;
                self.copies.put(&mut out, i0 as u64, &xi0);
            }
        }
        Ok(out)
    }
}

/// The map `P_β → P_α` induced by a surjection `set_map: S_β → S_α`: the
/// identity on `M` and the fiber sum on each `N` family. Its preimage
/// strategy places each `y_i` at the least index of its fiber.
pub fn onto_connecting_map(beta: &OntoStage, alpha: &OntoStage, set_map: &[usize]) -> Result<Hom> {
    if beta.pres != alpha.pres {
        return Err(Error::Precondition("stages come from different presentations".into()));
    }
    if set_map.len() != beta.s {
        return Err(Error::DimensionMismatch(format!(
            "set map has {} entries for |S_β| = {}",
            set_map.len(),
            beta.s
        )));
    }
    let mut hit = vec![false; alpha.s];
    for &v in set_map {
        *hit.get_mut(v).ok_or_else(|| Error::Precondition("set map leaves S_α".into()))? = true;
    }
    if let Some(i) = hit.iter().position(|h| !h) {
        return Err(Error::NotSurjective(format!("set map misses {i}")));
    }
    let m = Arc::new(beta.pres.m_shape.prefixed("m."));
    let mut terms = vec![Hom::identity(&m)];
    let offset = m.families().len();
    for (pos, fam) in beta.pres.n_shape.families().iter().enumerate() {
        let Extent::Finite(w) = fam.extent else {
            unreachable!("stage construction requires finite N families")
        };
        let w = w as usize;
        let one = |s: usize| {
            let f = beta.shape.family(offset + pos);
            Arc::new(ModuleShape::single(
                f.id.clone(),
                f.atom.clone(),
                Extent::Finite((s * w) as u64),
            ))
        };
        let map = (0..beta.s * w).map(|j| set_map[j / w] * w + j % w).collect();
        terms.push(Hom::fiber_sum(&one(beta.s), &one(alpha.s), map)?);
    }
    let hom = Hom::direct_sum(terms)?;
    debug_assert_eq!(hom.source(), beta.shape());
    debug_assert_eq!(hom.target(), alpha.shape());
    Ok(hom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, IntMatrix, Rational};
    use crate::hull::build_injective_presentation;
    use crate::rng::Seed;
    use crate::sums::random_element_with;

    fn z_pres() -> Arc<InjectivePresentation> {
        Arc::new(build_injective_presentation(&IntMatrix::empty_columns(1), 1).unwrap())
    }

    fn q(p: &InjectivePresentation, v: Rational) -> Element {
        Element::from_coords(&p.m_shape, [("free", 0, v)]).unwrap()
    }

    fn qz(p: &InjectivePresentation, v: Rational) -> Element {
        Element::from_coords(&p.n_shape, [("free", 0, v)]).unwrap()
    }

    #[test]
    fn contains_examples() {
        let p = z_pres();
        let st = OntoStage::new(&p, 2).unwrap();
        assert!(st.contains(&Element::zero(st.shape())).unwrap());
        let x = st.element(&q(&p, rat(1, 3)), [(0, &qz(&p, rat(1, 3)))]).unwrap();
        assert!(st.contains(&x).unwrap());
        let y = st.element(&q(&p, rat(1, 3)), [(0, &qz(&p, rat(1, 3))), (1, &qz(&p, rat(1, 2)))]).unwrap();
        assert!(!st.contains(&y).unwrap());
        assert!(OntoStage::new(&p, 0).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        let p = z_pres();
        let st = OntoStage::new(&p, 2).unwrap();
        let x = st.element(&q(&p, rat(1, 3)), []).unwrap();
        let r = st.isomorphism(1, Direction::Reinsert, &x).unwrap();
        assert_eq!(st.copy(&r, 1), qz(&p, rat(1, 3)));
        assert_eq!(st.isomorphism(1, Direction::Drop, &r).unwrap(), x);
        let z = Element::zero(st.shape());
        assert_eq!(st.isomorphism(0, Direction::Reinsert, &z).unwrap(), z);
    }

    #[test]
    fn connecting_map_examples() {
        let p = Arc::new(build_injective_presentation(&IntMatrix::from_i64(&[&[6], &[0]]), 2).unwrap());
        let beta = OntoStage::new(&p, 3).unwrap();
        let alpha = OntoStage::new(&p, 2).unwrap();
        let phi = onto_connecting_map(&beta, &alpha, &[1, 0, 1]).unwrap();
        assert!(onto_connecting_map(&beta, &alpha, &[1, 1, 1]).is_err());
        let id = onto_connecting_map(&alpha, &alpha, &[0, 1]).unwrap();
        let mut rng = Seed(3).rng();
        for _ in 0..100 {
            let raw = random_element_with(alpha.shape(), &mut rng, 5, &int(9));
            let y = alpha.isomorphism(0, Direction::Reinsert, &alpha.cleared(&raw, [0])).unwrap();
            assert!(alpha.contains(&y).unwrap());
            assert_eq!(id.apply(&y).unwrap(), y);
            let x = phi.preimage(&y).unwrap();
            assert!(beta.contains(&x).unwrap());
            assert_eq!(phi.apply(&x).unwrap(), y);
            assert_eq!(st_x0(&beta, &x), st_x0(&alpha, &y));
            // Images of stage elements stay in the stage.
            let raw = random_element_with(beta.shape(), &mut rng, 5, &int(9));
            let xb = beta.isomorphism(2, Direction::Reinsert, &beta.cleared(&raw, [2])).unwrap();
            assert!(alpha.contains(&phi.apply(&xb).unwrap()).unwrap());
        }
        // Zero N-part: x_0 must lie in A, and so does its image.
        let a = Element::from_coords(&p.m_shape, [("free", 0, rat(4, 1)), ("t0", 0, rat(1, 2))]).unwrap();
        let x = beta.element(&a, []).unwrap();
        assert!(beta.contains(&x).unwrap());
        let y = phi.apply(&x).unwrap();
        assert!(alpha.n_part_is_zero(&y) && st_x0(&alpha, &y) == a);
        let b = beta.element(&Element::from_coords(&p.m_shape, [("free", 0, rat(1, 2))]).unwrap(), []).unwrap();
        assert!(!beta.contains(&b).unwrap());
    }

    fn st_x0(st: &OntoStage, x: &Element) -> Element {
        st.x0(x)
    }
}
