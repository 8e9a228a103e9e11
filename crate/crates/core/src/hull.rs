//! Exact sequences `0 → A → M → N` with `M`, `N` divisible, for finitely
//! generated `A`.
//!
//! `A` is given by an integer presentation matrix: one row per generator,
//! one column per relation. Smith normal form splits `A` as
//! `ℤ^r ⊕ ⊕ ℤ/d_i`, and each `ℤ/d_i` is split further into prime-power
//! parts. Then
//!
//! * `M = ℚ^r ⊕ ⊕ ℤ(p^∞)`, with `e` the inclusion `ℤ ⊆ ℚ` and
//!   `ℤ/p^k ↪ ℤ(p^∞)`, `1 ↦ [1/p^k]`;
//! * `N = (ℚ/ℤ)^r ⊕ ⊕ ℤ(p^∞)`, with `f` reduction mod ℤ on the free part
//!   and multiplication by `p^k` on each Prüfer part.
//!
//! Inside `ℤ/d` the part for `q = p^k` is the subgroup generated by `d/q`,
//! so residue `t` corresponds to the parts `r_q` with `t = Σ (d/q)·r_q`.

use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, mod_floor, mod_inverse, snf, IntMatrix, Integer, Rational};
use crate::atoms::Atom;
use crate::error::{Error, Result};
use crate::homs::Hom;
use crate::sums::{Element, Extent, Family, ModuleShape};

pub const FREE_FAMILY: &str = "free";

/// One prime-power part `ℤ/p^k` of the invariant factor at `factor`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerPart {
    #[serde(with = "arith::int_string")]
    pub p: Integer,
    pub k: u32,
    pub factor: usize,
}

impl PrimePowerPart {
    pub fn order(&self) -> Integer {
        num_traits::pow(self.p.clone(), self.k as usize)
    }

    pub fn family_id(index: usize) -> String {
        format!("t{index}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub ngens: usize,
    pub rank: usize,
    #[serde(with = "arith::int_vec_string")]
    pub invariant_factors: Vec<Integer>,
    pub prime_power_parts: Vec<PrimePowerPart>,
    /// `u` from the Smith form: original generator coordinates to canonical.
    pub to_canonical: IntMatrix,
    pub from_canonical: IntMatrix,
    /// Modulus of each canonical coordinate: `0` free, `1` trivial, else `d_i`.
    #[serde(with = "arith::int_vec_string")]
    pub moduli: Vec<Integer>,
}

impl Decomposition {
    /// `|A|` for finite `A`, `None` when `A` has positive rank.
    pub fn order(&self) -> Option<Integer> {
        (self.rank == 0).then(|| self.invariant_factors.iter().product())
    }

    pub fn exponent(&self) -> Integer {
        self.invariant_factors
            .last()
            .cloned()
            .unwrap_or_else(Integer::one)
    }

    /// Canonical coordinates that carry torsion, in factor order.
    fn torsion_coords(&self) -> impl Iterator<Item = (usize, &Integer)> {
        self.moduli
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > Integer::one())
    }

    fn free_coords(&self) -> impl Iterator<Item = usize> + '_ {
        self.moduli
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_zero())
            .map(|(i, _)| i)
    }
}

/// Invariant factors via Smith normal form; factors equal to 1 are dropped
/// and each remaining factor is split by CRT, primes ascending.
pub fn decompose(presentation: &IntMatrix, ngens: usize) -> Result<Decomposition> {
    if presentation.rows() != ngens {
        return Err(Error::DimensionMismatch(format!(
            "presentation has {} rows for {ngens} generators",
            presentation.rows()
        )));
    }
    let r = snf(presentation);
    let diag = r.s.diagonal();
    let moduli: Vec<Integer> = (0..ngens)
        .map(|i| diag.get(i).cloned().unwrap_or_else(Integer::zero))
        .collect();
    let invariant_factors: Vec<Integer> = moduli
        .iter()
        .filter(|m| **m > Integer::one())
        .cloned()
        .collect();
    let rank = moduli.iter().filter(|m| m.is_zero()).count();
    let mut prime_power_parts: Vec<PrimePowerPart> = invariant_factors
        .iter()
        .enumerate()
        .flat_map(|(factor, d)| {
            arith::factor(d)
                .into_iter()
                .map(move |(p, k)| PrimePowerPart { p, k, factor })
        })
        .collect();
    // Stable: within a prime, parts keep factor order.
    prime_power_parts.sort_by(|a, b| a.p.cmp(&b.p));
    let from_canonical = r
        .u
        .unimodular_inverse()
        .expect("Smith transforms are unimodular");
    Ok(Decomposition {
        ngens,
        rank,
        invariant_factors,
        prime_power_parts,
        to_canonical: r.u,
        from_canonical,
        moduli,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectivePresentation {
    pub a_shape: Arc<ModuleShape>,
    pub m_shape: Arc<ModuleShape>,
    pub n_shape: Arc<ModuleShape>,
    pub e: Hom,
    pub f: Hom,
    pub decomposition: Decomposition,
}

/// An element of `ker f`, named in three coordinate systems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelWitness {
    /// As an element of `a_shape`.
    pub a_element: Element,
    /// Canonical (Smith) coordinates; torsion entries reduced mod `d_i`.
    #[serde(with = "arith::int_vec_string")]
    pub invariant_coords: Vec<Integer>,
    /// Coordinates on the original generators.
    #[serde(with = "arith::int_vec_string")]
    pub generator_coords: Vec<Integer>,
}

pub fn build_injective_presentation(
    presentation: &IntMatrix,
    ngens: usize,
) -> Result<InjectivePresentation> {
    let dec = decompose(presentation, ngens)?;
    let r = dec.rank as u64;
    let parts = &dec.prime_power_parts;

    let mut a_fams = Vec::new();
    let mut m_fams = Vec::new();
    let mut n_fams = Vec::new();
    if r > 0 {
        a_fams.push(Family::new(FREE_FAMILY, Atom::ZZ, Extent::Finite(r)));
        m_fams.push(Family::new(FREE_FAMILY, Atom::QQ, Extent::Finite(r)));
        n_fams.push(Family::new(FREE_FAMILY, Atom::QmodZ, Extent::Finite(r)));
    }
    for (j, part) in parts.iter().enumerate() {
        let id = PrimePowerPart::family_id(j);
        let pr = Atom::pruefer(part.p.clone())?;
        a_fams.push(Family::new(&id, Atom::cyclic(part.order())?, Extent::Finite(1)));
        m_fams.push(Family::new(&id, pr.clone(), Extent::Finite(1)));
        n_fams.push(Family::new(&id, pr, Extent::Finite(1)));
    }
    let a_shape = Arc::new(ModuleShape::new(a_fams)?);
    let m_shape = Arc::new(ModuleShape::new(m_fams)?);
    let n_shape = Arc::new(ModuleShape::new(n_fams)?);

    let mut e_terms = Vec::new();
    let mut f_terms = Vec::new();
    if r > 0 {
        let zf = Arc::new(ModuleShape::single(FREE_FAMILY, Atom::ZZ, Extent::Finite(r)));
        let qf = Arc::new(ModuleShape::single(FREE_FAMILY, Atom::QQ, Extent::Finite(r)));
        let images = (0..r)
            .map(|i| {
                Element::from_coords(&qf, [(FREE_FAMILY, i, Rational::one())])
                    .map(|img| (FREE_FAMILY, i, img))
            })
            .collect::<Result<Vec<_>>>()?;
        e_terms.push(Hom::generator_image(&zf, &qf, images)?);
        f_terms.push(Hom::reduce_q(&qf)?);
    }
    if !parts.is_empty() {
        let cyc = Arc::new(ModuleShape::new(a_shape.families()[usize::from(r > 0)..].to_vec())?);
        e_terms.push(Hom::embed_cyclic(&cyc)?);
    }
    for (j, part) in parts.iter().enumerate() {
        let sh = Arc::new(ModuleShape::single(
            PrimePowerPart::family_id(j),
            Atom::pruefer(part.p.clone())?,
            Extent::Finite(1),
        ));
        f_terms.push(Hom::pruefer_mult_pk(&sh, part.k)?);
    }
    let e = Hom::direct_sum(e_terms)?;
    let f = Hom::direct_sum(f_terms)?;
    debug_assert_eq!(**e.source(), *a_shape);
    debug_assert_eq!(**e.target(), *m_shape);
    debug_assert_eq!(**f.target(), *n_shape);
    Ok(InjectivePresentation {
        a_shape,
        m_shape,
        n_shape,
        e,
        f,
        decomposition: dec,
    })
}

impl InjectivePresentation {
    /// Re-checks the structural invariants after loading from JSON.
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidShape(format!("injective presentation: {what}")))
            }
        };
        check(**self.e.source() == *self.a_shape, "e must start at A")?;
        check(**self.e.target() == *self.m_shape, "e must land in M")?;
        check(**self.f.source() == *self.m_shape, "f must start at M")?;
        check(**self.f.target() == *self.n_shape, "f must land in N")?;
        check(self.m_shape.is_divisible(), "M must be divisible")?;
        check(self.n_shape.is_divisible(), "N must be divisible")?;
        let fe = Hom::compose(&self.f, &self.e)?;
        for (_, g) in self.e.source_generators()? {
            check(fe.apply(&g)?.is_zero(), "f ∘ e must vanish")?;
        }
        Ok(())
    }

    fn part_order(&self, j: usize) -> Integer {
        self.decomposition.prime_power_parts[j].order()
    }

    /// Decides `x ∈ ker f` coordinatewise: free coordinates must be integers
    /// and the part for `p^k` must be killed by `p^k`.
    pub fn kernel_membership(&self, x: &Element) -> Result<Option<KernelWitness>> {
        x.require_shape(&self.m_shape)?;
        let dec = &self.decomposition;
        let mut free = vec![Integer::zero(); dec.rank];
        let mut residues = vec![Integer::zero(); dec.prime_power_parts.len()];
        for ((pos, idx), v) in x.iter() {
            let id = &self.m_shape.family(pos).id;
            if id == FREE_FAMILY {
                if !v.is_integer() {
                    return Ok(None);
                }
                free[idx as usize] = v.numer().clone();
            } else {
                let j = pos - usize::from(dec.rank > 0);
                let r = v * Rational::from_integer(self.part_order(j));
                if !r.is_integer() {
                    return Ok(None);
                }
                residues[j] = r.numer().clone();
            }
        }
        let a_element = self.a_element(&free, &residues)?;
        Ok(Some(self.witness(a_element, &free, &residues)))
    }

    fn a_element(&self, free: &[Integer], residues: &[Integer]) -> Result<Element> {
        let mut a = Element::zero(&self.a_shape);
        let off = usize::from(self.decomposition.rank > 0);
        for (i, v) in free.iter().enumerate() {
            a.set((0, i as u64), &Rational::from_integer(v.clone()))?;
        }
        for (j, v) in residues.iter().enumerate() {
            a.set((off + j, 0), &Rational::from_integer(v.clone()))?;
        }
        Ok(a)
    }

    fn witness(&self, a_element: Element, free: &[Integer], residues: &[Integer]) -> KernelWitness {
        let dec = &self.decomposition;
        let mut canonical = vec![Integer::zero(); dec.ngens];
        for (coord, v) in dec.free_coords().zip(free) {
            canonical[coord] = v.clone();
        }
        let torsion: Vec<(usize, Integer)> =
            dec.torsion_coords().map(|(i, d)| (i, d.clone())).collect();
        for (j, part) in dec.prime_power_parts.iter().enumerate() {
            let (coord, d) = &torsion[part.factor];
            canonical[*coord] += (d / part.order()) * &residues[j];
        }
        for (coord, d) in &torsion {
            canonical[*coord] = mod_floor(&canonical[*coord], d);
        }
        let generator_coords = dec.from_canonical.mul_vec(&canonical);
        KernelWitness {
            a_element,
            invariant_coords: canonical,
            generator_coords,
        }
    }

    /// The element of `A` with the given coordinates on the original
    /// generators, as an element of `a_shape`.
    pub fn a_from_generators(&self, coords: &[Integer]) -> Result<Element> {
        let dec = &self.decomposition;
        if coords.len() != dec.ngens {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for {} generators",
                coords.len(),
                dec.ngens
            )));
        }
        let canonical = dec.to_canonical.mul_vec(coords);
        let free: Vec<Integer> = dec.free_coords().map(|i| canonical[i].clone()).collect();
        let torsion: Vec<(usize, Integer)> =
            dec.torsion_coords().map(|(i, d)| (i, d.clone())).collect();
        let residues: Vec<Integer> = dec
            .prime_power_parts
            .iter()
            .map(|part| {
                let (coord, d) = &torsion[part.factor];
                let q = part.order();
                let inv = mod_inverse(&(d / &q), &q).expect("cofactor is prime to q");
                mod_floor(&(&canonical[*coord] * inv), &q)
            })
            .collect();
        self.a_element(&free, &residues)
    }

    /// Whether two generator-coordinate vectors name the same element of `A`.
    pub fn same_in_a(&self, x: &[Integer], y: &[Integer]) -> Result<bool> {
        Ok(self.a_from_generators(x)? == self.a_from_generators(y)?)
    }

    /// Every element of `m_shape` whose coordinates have denominators
    /// dividing `exp(A)`, for finite `A`. Used for order counting.
    pub fn torsion_grid(&self) -> Result<Vec<Element>> {
        let dec = &self.decomposition;
        if dec.rank > 0 {
            return Err(Error::Precondition("A is infinite".into()));
        }
        let exp = dec.exponent();
        let mut out = vec![Element::zero(&self.m_shape)];
        for (pos, fam) in self.m_shape.families().iter().enumerate() {
            let Atom::Pruefer(p) = &fam.atom else { unreachable!("finite A has only Prüfer parts") };
            let (v, _) = arith::split_prime(&exp, p);
            let den = num_traits::pow(p.clone(), v as usize);
            let n = den.to_u64().expect("desk scale");
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for base in &out {
                for j in 0..n {
                    let mut e = base.clone();
                    e.set((pos, 0), &Rational::new(Integer::from(j), den.clone()))?;
                    next.push(e);
                }
            }
            out = next;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::rng::Seed;
    use crate::sums::random_element_with;
    use num_integer::Integer as _;
    use rand::Rng as _;

    fn pres(rows: &[&[i64]], ngens: usize) -> InjectivePresentation {
        let m = if rows.is_empty() {
            IntMatrix::empty_columns(ngens)
        } else {
            IntMatrix::from_i64(rows)
        };
        build_injective_presentation(&m, ngens).unwrap()
    }

    fn m_el(p: &InjectivePresentation, coords: &[(&str, u64, Rational)]) -> Element {
        Element::from_coords(&p.m_shape, coords.iter().map(|(a, b, c)| (*a, *b, c.clone()))).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&IntMatrix::empty_columns(1), 1).unwrap();
        assert_eq!((d.rank, d.invariant_factors.len()), (1, 0));

        let d = decompose(&IntMatrix::from_i64(&[&[6]]), 1).unwrap();
        assert_eq!(d.rank, 0);
        assert_eq!(d.invariant_factors, vec![int(6)]);
        let pk: Vec<_> = d.prime_power_parts.iter().map(|p| (p.p.clone(), p.k)).collect();
        assert_eq!(pk, vec![(int(2), 1), (int(3), 1)]);

        let d = decompose(&IntMatrix::from_i64(&[&[2, 0], &[0, 0]]), 2).unwrap();
        assert_eq!(d.rank, 1);
        assert_eq!(d.invariant_factors, vec![int(2)]);

        assert!(matches!(
            decompose(&IntMatrix::from_i64(&[&[2]]), 2),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn crt_split_orders_primes_ascending() {
        // ℤ/12 ⊕ ℤ/6 ... as diag(6, 12): parts 2,4 | 3,3 grouped by prime
        let d = decompose(&IntMatrix::from_i64(&[&[12, 0], &[0, 6]]), 2).unwrap();
        assert_eq!(d.invariant_factors, vec![int(6), int(12)]);
        let pk: Vec<_> = d
            .prime_power_parts
            .iter()
            .map(|p| (p.p.to_i64().unwrap(), p.k, p.factor))
            .collect();
        assert_eq!(pk, vec![(2, 1, 0), (2, 2, 1), (3, 1, 0), (3, 1, 1)]);
        let prod: Integer = d.prime_power_parts.iter().map(|p| p.order()).product();
        assert_eq!(prod, int(72));
    }

    #[test]
    fn integers_embed_in_rationals() {
        let p = pres(&[], 1);
        assert_eq!(p.m_shape.families()[0].atom, Atom::QQ);
        assert_eq!(p.n_shape.families()[0].atom, Atom::QmodZ);
        assert_eq!(p.f.op_name(), "direct_sum");
        let w = p.kernel_membership(&m_el(&p, &[("free", 0, rat(5, 1))])).unwrap().unwrap();
        assert_eq!(w.invariant_coords, vec![int(5)]);
        assert_eq!(w.generator_coords, vec![int(5)]);
        assert!(p.kernel_membership(&m_el(&p, &[("free", 0, rat(1, 2))])).unwrap().is_none());
        p.validate().unwrap();
    }

    #[test]
    fn z6_presentation() {
        let p = pres(&[&[6]], 1);
        let atoms: Vec<_> = p.m_shape.families().iter().map(|f| f.atom.clone()).collect();
        assert_eq!(atoms, vec![Atom::pruefer(2).unwrap(), Atom::pruefer(3).unwrap()]);
        assert_eq!(p.m_shape, p.n_shape);
        // Kernel among denominators dividing 6: enumerate (a/2, b/3).
        let mut count = 0;
        for a in 0..2 {
            for b in 0..3 {
                let x = m_el(&p, &[("t0", 0, rat(a, 2)), ("t1", 0, rat(b, 3))]);
                if p.f.apply(&x).unwrap().is_zero() {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 6);
        let x = m_el(&p, &[("t0", 0, rat(1, 2)), ("t1", 0, rat(1, 3))]);
        let w = p.kernel_membership(&x).unwrap().unwrap();
        assert_eq!(w.invariant_coords, vec![int(5)]);
        // 5 mod 6 is 1 mod 2 and 5 = 3·1 + 2·1.
        assert_eq!(p.e.apply(&w.a_element).unwrap(), x);
        assert_eq!(p.a_from_generators(&[int(5)]).unwrap(), w.a_element);
    }

    #[test]
    fn z4_plus_z_presentation() {
        let p = pres(&[&[4], &[0]], 2);
        let kinds: Vec<_> = p.m_shape.families().iter().map(|f| f.atom.clone()).collect();
        assert_eq!(kinds, vec![Atom::QQ, Atom::pruefer(2).unwrap()]);
        // Sample denominators up to 16 on both coordinates.
        for dq in 1..=16 {
            for nq in -3..=3 {
                for k in 0..16 {
                    let x = m_el(&p, &[("free", 0, rat(nq, dq)), ("t0", 0, rat(k, 16))]);
                    let in_ker = p.f.apply(&x).unwrap().is_zero();
                    let expect = rat(nq, dq).is_integer() && (k % 4 == 0);
                    assert_eq!(in_ker, expect);
                    assert_eq!(p.kernel_membership(&x).unwrap().is_some(), expect);
                }
            }
        }
    }

    fn random_presentation(rng: &mut crate::rng::Rng) -> (IntMatrix, usize) {
        let ngens = rng.random_range(1..=3);
        let nrels = rng.random_range(0..=3);
        let rows = (0..ngens)
            .map(|_| (0..nrels).map(|_| int(rng.random_range(-60..=60))).collect())
            .collect();
        (IntMatrix::from_rows(rows).unwrap(), ngens)
    }

    #[test]
    fn exactness_on_random_presentations() {
        let mut rng = Seed(77).rng();
        for _ in 0..50 {
            let (mat, ngens) = random_presentation(&mut rng);
            let p = build_injective_presentation(&mat, ngens).unwrap();
            p.validate().unwrap();
            let fe = Hom::compose(&p.f, &p.e).unwrap();
            for _ in 0..100 {
                let a = random_element_with(&p.a_shape, &mut rng, 3, &int(40));
                let ea = p.e.apply(&a).unwrap();
                assert_eq!(ea.is_zero(), a.is_zero());
                assert!(fe.apply(&a).unwrap().is_zero());
                let x = random_element_with(&p.m_shape, &mut rng, 3, &int(8));
                let member = p.kernel_membership(&x).unwrap();
                assert_eq!(member.is_some(), p.f.apply(&x).unwrap().is_zero());
                for k in [x, ea] {
                    if let Some(w) = p.kernel_membership(&k).unwrap() {
                        assert_eq!(p.e.apply(&w.a_element).unwrap(), k);
                        let back = p.a_from_generators(&w.generator_coords).unwrap();
                        assert_eq!(back, w.a_element);
                    }
                }
            }
        }
    }

    /// `|A|` as the gcd of the maximal minors of the presentation.
    fn order_by_minors(mat: &IntMatrix) -> Integer {
        let (n, m) = (mat.rows(), mat.cols());
        let mut g = Integer::zero();
        let mut cols: Vec<usize> = (0..n).collect();
        if n > m {
            return Integer::zero();
        }
        loop {
            let sub = IntMatrix::from_rows(
                (0..n).map(|i| cols.iter().map(|&j| mat[(i, j)].clone()).collect()).collect(),
            )
            .unwrap();
            g = g.gcd(&sub.det().unwrap());
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return g;
                }
                i -= 1;
                if cols[i] < m - n + i {
                    cols[i] += 1;
                    for k in i + 1..n {
                        cols[k] = cols[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn kernel_count_equals_order_for_finite_groups() {
        let mut rng = Seed(78).rng();
        let mut tested = 0;
        while tested < 40 {
            let ngens = rng.random_range(1..=3);
            let nrels = rng.random_range(ngens..=3);
            let rows = (0..ngens)
                .map(|_| (0..nrels).map(|_| int(rng.random_range(-8..=8))).collect())
                .collect();
            let mat = IntMatrix::from_rows(rows).unwrap();
            let order = order_by_minors(&mat);
            if order.is_zero() || order > int(64) {
                continue;
            }
            tested += 1;
            let p = build_injective_presentation(&mat, ngens).unwrap();
            assert_eq!(p.decomposition.order(), Some(order.clone()));
            let count = p
                .torsion_grid()
                .unwrap()
                .iter()
                .filter(|x| p.f.apply(x).unwrap().is_zero())
                .count();
            assert_eq!(int(count as i64), order, "{mat}");
        }
    }

    #[test]
    fn json_round_trip() {
        let p = pres(&[&[4, 2], &[0, 6]], 2);
        let s = serde_json::to_string(&p).unwrap();
        let back: InjectivePresentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        back.validate().unwrap();
    }
}
