//! Factoring a map `ℤ → M_0` through a chain of surjections between
//! divisible groups `M_0 ← M_1 ← …` and a chain of rank-1 lattices
//! `N_0 = c_0ℤ ⊆ N_1 = c_1ℤ ⊆ … ⊆ ℚ`.
//!
//! Each step lifts `f_i: N_i → M_i` through `φ_i: M_{i+1} → M_i` (possible
//! because `N_i` is free) and extends the lift along `N_i ⊆ N_{i+1}`
//! (possible because `M_{i+1}` is divisible). The result satisfies
//! `φ_i ∘ f_{i+1}|_{N_i} = f_i`.
//!
//! With `c_i` from [`big_div_chain`], the generator of `N_0` is `1/c_k`
//! times the generator of `N_k`, so `x = f_0(1)` becomes `1/c_k` times the
//! image of `f_k(g_k)` in `M_0`: a finite-stage divisibility certificate.

use std::sync::Arc;

use num_traits::{One, Signed};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::arith::{self, Integer, Rational};
use crate::atoms::Atom;
use crate::error::{Error, Result};
use crate::homs::{extend_into_divisible, lift_through_surjection, Hom};
use crate::rng::Seed;
use crate::sums::{random_element_with, Element, Extent, Family, ModuleShape};

pub const GENERATOR_FAMILY: &str = "g";
const SURJECTIVITY_SAMPLES: usize = 24;

/// The shape `ℤ` shared by every `N_i` (each identified with `ℤ` through
/// its generator).
pub fn generator_shape() -> Arc<ModuleShape> {
    Arc::new(ModuleShape::single(GENERATOR_FAMILY, Atom::ZZ, Extent::Finite(1)))
}

fn generator() -> Element {
    Hom::generator(&generator_shape(), 0, 0)
}

/// The map `ℤ → target`, `1 ↦ x`.
pub fn point_map(x: &Element) -> Result<Hom> {
    Hom::generator_image(&generator_shape(), x.shape(), [(GENERATOR_FAMILY, 0, x.clone())])
}

/// Divisible stages `M_0 … M_k` and maps `φ_i: M_{i+1} → M_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InverseRepr", into = "InverseRepr")]
pub struct InverseChain {
    maps: Vec<Hom>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InverseRepr {
    maps: Vec<Hom>,
}

impl TryFrom<InverseRepr> for InverseChain {
    type Error = Error;
    fn try_from(r: InverseRepr) -> Result<Self> {
        InverseChain::new(r.maps)
    }
}

impl From<InverseChain> for InverseRepr {
    fn from(c: InverseChain) -> Self {
        InverseRepr { maps: c.maps }
    }
}

impl InverseChain {
    /// Checks that consecutive maps compose, that every stage is divisible
    /// and that each map's preimage strategy succeeds on sampled targets.
    pub fn new(maps: Vec<Hom>) -> Result<Self> {
        for (i, w) in maps.windows(2).enumerate() {
            if w[0].source() != w[1].target() {
                return Err(Error::ShapeMismatch(format!(
                    "map {} lands in {}, but map {i} starts at {}",
                    i + 1,
                    w[1].target(),
                    w[0].source()
                )));
            }
        }
        for (i, phi) in maps.iter().enumerate() {
            for shape in [phi.source(), phi.target()] {
                if !shape.is_divisible() {
                    return Err(Error::Precondition(format!("stage {shape} is not divisible")).at_stage(i));
                }
            }
            let mut rng = Seed(0).split("inverse_chain").index(i as u64).rng();
            for _ in 0..SURJECTIVITY_SAMPLES {
                let y = random_element_with(phi.target(), &mut rng, 3, &Integer::from(12));
                let x = phi.preimage(&y).map_err(|e| e.at_stage(i))?;
                if phi.apply(&x)? != y {
                    return Err(Error::NotSurjective(format!("map {i} preimage check failed at {y}")));
                }
            }
        }
        Ok(Self { maps })
    }

    /// `len` copies of one endomorphism.
    pub fn constant(phi: &Hom, len: usize) -> Result<Self> {
        Self::new(vec![phi.clone(); len])
    }

    /// Number of maps.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[Hom] {
        &self.maps
    }

    pub fn stage(&self, i: usize) -> &Arc<ModuleShape> {
        if i == 0 {
            self.maps[0].target()
        } else {
            self.maps[i - 1].source()
        }
    }

    /// `φ_{0i}(y)` for `y ∈ M_i`.
    pub fn down_to_zero(&self, i: usize, y: &Element) -> Result<Element> {
        let mut x = y.clone();
        for phi in self.maps[..i].iter().rev() {
            x = phi.apply(&x)?;
        }
        Ok(x)
    }
}

/// `c_0 ℤ ⊆ c_1 ℤ ⊆ …` inside ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DirectRepr", into = "DirectRepr")]
pub struct DirectChain {
    generators: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectRepr {
    #[serde(with = "arith::rat_vec_string")]
    generators: Vec<Rational>,
}

impl TryFrom<DirectRepr> for DirectChain {
    type Error = Error;
    fn try_from(r: DirectRepr) -> Result<Self> {
        DirectChain::new(r.generators)
    }
}

impl From<DirectChain> for DirectRepr {
    fn from(c: DirectChain) -> Self {
        DirectRepr {
            generators: c.generators,
        }
    }
}

impl DirectChain {
    pub fn new(generators: Vec<Rational>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Precondition("a chain needs at least one generator".into()));
        }
        if let Some(c) = generators.iter().find(|c| !c.is_positive()) {
            return Err(Error::Precondition(format!("generator {c} must be positive")));
        }
        for (i, w) in generators.windows(2).enumerate() {
            let m = &w[0] / &w[1];
            if !m.is_integer() {
                return Err(Error::Precondition(format!(
                    "c_{i} / c_{} = {} is not an integer",
                    i + 1,
                    arith::format_rational(&m)
                )));
            }
        }
        Ok(Self { generators })
    }

    /// `c_0 = 1` and `c_{i+1} = c_i / m_i`.
    pub fn from_indices(indices: &[Integer]) -> Result<Self> {
        let mut gens = vec![Rational::one()];
        for m in indices {
            if !m.is_positive() {
                return Err(Error::Precondition(format!("index {m} must be at least 1")));
            }
            let next = gens.last().unwrap() / Rational::from_integer(m.clone());
            gens.push(next);
        }
        Self::new(gens)
    }

    pub fn len(&self) -> usize {
        self.generators.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generators(&self) -> &[Rational] {
        &self.generators
    }

    /// `m_i = c_i / c_{i+1}`.
    pub fn index(&self, i: usize) -> Integer {
        (&self.generators[i] / &self.generators[i + 1]).to_integer()
    }

    /// `c_0 / c_i`: the generator of `N_0` in terms of that of `N_i`.
    pub fn scale(&self, i: usize) -> Integer {
        (&self.generators[0] / &self.generators[i]).to_integer()
    }
}

/// `c_0 = 1`, `c_i = (p_1 ⋯ p_i)^{-i}` with `p_j` running through `primes`
/// cyclically.
pub fn big_div_chain(primes: &[Integer], k: usize) -> Result<DirectChain> {
    if primes.is_empty() {
        return Err(Error::Precondition("no primes given".into()));
    }
    if let Some(p) = primes.iter().find(|p| !arith::is_prime(p)) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let gens = (0..=k)
        .map(|i| {
            let prod: Integer = (0..i).map(|j| primes[j % primes.len()].clone()).product();
            Rational::new(Integer::one(), num_traits::pow(prod, i))
        })
        .collect();
    DirectChain::new(gens)
}

/// `f_{i+1}` from `f_i`, `φ_i` and the index `m_i` of `N_i` in `N_{i+1}`.
pub fn ladder_step(f_i: &Hom, phi_i: &Hom, m_i: &Integer) -> Result<Hom> {
    let next = extend_into_divisible(&lift_through_surjection(f_i, phi_i)?, m_i)?;
    let inclusion = Hom::mult_by_int(&generator_shape(), m_i.clone());
    let back = Hom::compose(phi_i, &Hom::compose(&next, &inclusion)?)?;
    let g = generator();
    if back.apply(&g)? != f_i.apply(&g)? {
        return Err(Error::Precondition("ladder step does not restrict to f_i".into()));
    }
    Ok(next)
}

/// Exact check that `φ_{0i} ∘ f_i ∘ ψ_{i0} = f_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageCheck {
    pub stage: usize,
    /// `f_i` of the generator of `N_i`.
    pub image: Element,
    #[serde(with = "arith::int_string")]
    pub scale: Integer,
    /// Multiples of the `N_0` generator the identity was checked on.
    pub multiples: Vec<i64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ladder {
    pub maps: Vec<Hom>,
    pub transcript: Vec<StageCheck>,
}

impl Ladder {
    pub fn holds(&self) -> bool {
        self.transcript.iter().all(|c| c.holds)
    }
}

/// Builds `f_0 … f_k` and checks every composite on the generator and 20
/// random multiples.
pub fn run_ladder(f0: &Hom, inv: &InverseChain, dir: &DirectChain, k: usize, seed: Seed) -> Result<Ladder> {
    if k > inv.len() || k > dir.len() {
        return Err(Error::Precondition(format!(
            "{k} steps need chains of that length, got {} and {}",
            inv.len(),
            dir.len()
        )));
    }
    if **f0.source() != *generator_shape() {
        return Err(Error::Precondition(format!("f_0 must start at ℤ, not {}", f0.source())));
    }
    if k > 0 && f0.target() != inv.stage(0) {
        return Err(Error::ShapeMismatch(format!("f_0 lands in {}, not {}", f0.target(), inv.stage(0))));
    }
    let mut maps = vec![f0.clone()];
    for i in 0..k {
        let next = ladder_step(&maps[i], &inv.maps[i], &dir.index(i)).map_err(|e| e.at_stage(i + 1))?;
        maps.push(next);
    }
    let mut rng = seed.split("run_ladder").rng();
    let g = generator();
    let x0 = f0.apply(&g)?;
    let mut transcript = Vec::new();
    for (i, f) in maps.iter().enumerate() {
        let image = f.apply(&g)?;
        let scale = dir.scale(i);
        let mut multiples = vec![1];
        multiples.extend((0..20).map(|_| rng.random_range(-50..=50)));
        let mut holds = true;
        for &t in &multiples {
            let t = Integer::from(t);
            let down = inv.down_to_zero(i, &image.scalar_mul(&(&scale * &t)))?;
            holds &= down == x0.scalar_mul(&t);
        }
        transcript.push(StageCheck {
            stage: i,
            image,
            scale,
            multiples,
            holds,
        });
    }
    Ok(Ladder { maps, transcript })
}

/// `x = c · φ_{0k}(y)` with `c = 1/c_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(with = "arith::int_string")]
    pub c: Integer,
    pub y: Element,
    /// `φ_{0k}(y)`.
    pub image: Element,
    pub holds: bool,
}

pub fn divisibility_certificate(
    x: &Element,
    inv: &InverseChain,
    primes: &[Integer],
    k: usize,
    seed: Seed,
) -> Result<Certificate> {
    let dir = big_div_chain(primes, k)?;
    let ladder = run_ladder(&point_map(x)?, inv, &dir, k, seed)?;
    let c = dir.scale(k);
    let y = ladder.transcript[k].image.clone();
    let image = inv.down_to_zero(k, &y)?;
    let holds = image.scalar_mul(&c) == *x && ladder.holds();
    debug_assert_eq!(Rational::from_integer(c.clone()).recip(), dir.generators()[k]);
    Ok(Certificate { c, y, image, holds })
}

/// Stage shapes used by [`random_configuration`].
pub fn shape_battery() -> Vec<Arc<ModuleShape>> {
    let fam = |id: &str, atom: Atom| Family::new(id, atom, Extent::Finite(1));
    let p2 = Atom::pruefer(2).expect("prime");
    let p3 = Atom::pruefer(3).expect("prime");
    vec![
        vec![fam("q", Atom::QQ)],
        vec![fam("r", Atom::QmodZ)],
        vec![fam("p", p2), fam("r", Atom::QmodZ)],
        vec![fam("q", Atom::QQ), fam("p", p3)],
    ]
    .into_iter()
    .map(|f| Arc::new(ModuleShape::new(f).expect("distinct ids")))
    .collect()
}

/// A surjective endomorphism of `shape`, family by family.
fn random_surjection(shape: &Arc<ModuleShape>, rng: &mut crate::rng::Rng) -> Result<Hom> {
    let terms = shape
        .families()
        .iter()
        .map(|f| {
            let one = Arc::new(ModuleShape::new(vec![f.clone()])?);
            Ok(match &f.atom {
                Atom::QQ => match rng.random_range(0..3) {
                    0 => Hom::identity(&one),
                    1 => Hom::mult_by_int(&one, Integer::from(rng.random_range(1..=4) * [-1, 1][rng.random_range(0..2)])),
                    _ => Hom::mult_by_rational(
                        &one,
                        Rational::new(rng.random_range(1..=5).into(), rng.random_range(1..=5).into()),
                    )?,
                },
                Atom::Pruefer(_) if rng.random_bool(0.5) => Hom::pruefer_mult_pk(&one, rng.random_range(0..=2))?,
                _ => Hom::mult_by_int(&one, Integer::from(rng.random_range(1..=4))),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Hom::direct_sum(terms)
}

/// A seeded chain of `len` surjections over one of the battery shapes (with
/// an occasional switch from ℚ/ℤ below to ℚ above via reduction), a direct
/// chain with indices in `1..=4`, and a target `x ∈ M_0`.
pub fn random_configuration(seed: Seed, len: usize) -> Result<(InverseChain, DirectChain, Element)> {
    let mut rng = seed.rng();
    let battery = shape_battery();
    let mut shape = battery[rng.random_range(0..battery.len())].clone();
    let base = shape.clone();
    let mut maps = Vec::new();
    for _ in 0..len {
        let phi = random_surjection(&shape, &mut rng)?;
        let phi = if *shape == *battery[1] && rng.random_bool(0.4) {
            let upper = Arc::new(shape.map_atoms(|_| Ok(Atom::QQ))?);
            let up = random_surjection(&upper, &mut rng)?;
            shape = upper;
            Hom::compose(&Hom::compose(&phi, &Hom::reduce_q(up.target())?)?, &up)?
        } else {
            phi
        };
        maps.push(phi);
    }
    let indices: Vec<Integer> = (0..len).map(|_| Integer::from(rng.random_range(1..=4))).collect();
    let x = random_element_with(&base, &mut rng, 2, &Integer::from(30));
    Ok((InverseChain::new(maps)?, DirectChain::from_indices(&indices)?, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn qz() -> Arc<ModuleShape> {
        Arc::new(ModuleShape::single("r", Atom::QmodZ, Extent::Finite(1)))
    }

    fn qz_el(v: Rational) -> Element {
        Element::from_coords(&qz(), [("r", 0, v)]).unwrap()
    }

    #[test]
    fn step_examples() {
        let f0 = point_map(&qz_el(rat(1, 3))).unwrap();
        let phi = Hom::mult_by_int(&qz(), int(2));
        let f1 = ladder_step(&f0, &phi, &int(2)).unwrap();
        assert_eq!(f1.apply(&generator()).unwrap(), qz_el(rat(1, 12)));
        let zero = Hom::zero(&generator_shape(), &qz());
        assert!(ladder_step(&zero, &phi, &int(2)).unwrap().apply(&generator()).unwrap().is_zero());
        let id = Hom::identity(&qz());
        let same = ladder_step(&f0, &id, &int(1)).unwrap();
        assert_eq!(same.apply(&generator()).unwrap(), f0.apply(&generator()).unwrap());
    }

    #[test]
    fn ladder_examples() {
        let phi = Hom::mult_by_int(&qz(), int(2));
        let inv = InverseChain::constant(&phi, 3).unwrap();
        let dir = DirectChain::from_indices(&[int(2), int(2), int(2)]).unwrap();
        let f0 = point_map(&qz_el(rat(1, 3))).unwrap();
        let l = run_ladder(&f0, &inv, &dir, 0, Seed(1)).unwrap();
        assert_eq!(l.maps.len(), 1);
        assert!(l.holds());
        let l = run_ladder(&f0, &inv, &dir, 3, Seed(1)).unwrap();
        assert!(l.holds());
        assert_eq!(l.transcript[3].image, qz_el(rat(1, 192)));
        assert_eq!(l.transcript[3].scale, int(8));
        assert_eq!(inv.down_to_zero(3, &qz_el(rat(8, 192))).unwrap(), qz_el(rat(1, 3)));
        let zero = Hom::zero(&generator_shape(), &qz());
        let l = run_ladder(&zero, &inv, &dir, 3, Seed(1)).unwrap();
        assert!(l.transcript.iter().all(|c| c.image.is_zero()));
        assert!(run_ladder(&f0, &inv, &dir, 4, Seed(1)).is_err());
    }

    #[test]
    fn big_div_examples() {
        let g = |p: &[i64], k| {
            let p: Vec<_> = p.iter().map(|&x| int(x)).collect();
            big_div_chain(&p, k).unwrap().generators().to_vec()
        };
        assert_eq!(g(&[2], 1), vec![rat(1, 1), rat(1, 2)]);
        assert_eq!(g(&[2, 3], 2), vec![rat(1, 1), rat(1, 2), rat(1, 36)]);
        assert_eq!(g(&[5], 0), vec![rat(1, 1)]);
        // Recycling: p_1 = p_2 = 2 gives c_2 = 2^-4.
        assert_eq!(g(&[2], 2), vec![rat(1, 1), rat(1, 2), rat(1, 16)]);
        assert_eq!(g(&[2, 3], 3)[3], rat(1, 1728));
        assert!(big_div_chain(&[int(4)], 1).is_err());
        assert!(big_div_chain(&[], 1).is_err());
    }

    #[test]
    fn certificate_examples() {
        let inv = InverseChain::constant(&Hom::identity(&qz()), 2).unwrap();
        let cert = divisibility_certificate(&qz_el(rat(1, 5)), &inv, &[int(2)], 2, Seed(0)).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.c, int(16));
        assert_eq!(cert.y, qz_el(rat(1, 80)));
        let zero = divisibility_certificate(&qz_el(rat(0, 1)), &inv, &[int(2)], 2, Seed(0)).unwrap();
        assert_eq!((zero.c, zero.y.is_zero(), zero.holds), (int(16), true, true));

        let sh = Arc::new(
            ModuleShape::new(vec![
                Family::new("p", Atom::pruefer(3).unwrap(), Extent::Finite(1)),
                Family::new("r", Atom::QmodZ, Extent::Finite(1)),
            ])
            .unwrap(),
        );
        let one = |i: usize| Arc::new(ModuleShape::new(vec![sh.family(i).clone()]).unwrap());
        let phi = Hom::direct_sum(vec![Hom::mult_by_int(&one(0), int(3)), Hom::identity(&one(1))]).unwrap();
        let inv = InverseChain::constant(&phi, 1).unwrap();
        let x = Element::from_coords(&sh, [("p", 0, rat(1, 3))]).unwrap();
        let cert = divisibility_certificate(&x, &inv, &[int(3)], 1, Seed(0)).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.c, int(3));
        assert_eq!(cert.image.scalar_mul(&cert.c), x);
    }

    #[test]
    fn chains_reject_bad_input() {
        assert!(DirectChain::new(vec![rat(1, 1), rat(2, 3)]).is_err());
        assert!(DirectChain::new(vec![rat(-1, 1)]).is_err());
        assert!(DirectChain::from_indices(&[int(0)]).is_err());
        let zz = Arc::new(ModuleShape::single("z", Atom::ZZ, Extent::Finite(1)));
        assert!(InverseChain::new(vec![Hom::identity(&zz)]).is_err());
        let q = Arc::new(ModuleShape::single("q", Atom::QQ, Extent::Finite(1)));
        // Multiplication by 0 on ℚ is not onto.
        assert!(InverseChain::new(vec![Hom::mult_by_int(&q, int(0))]).is_err());
    }

    #[test]
    fn random_configurations_satisfy_every_composite() {
        for s in 0..20 {
            let k = (s % 4) + 1;
            let (inv, dir, x) = random_configuration(Seed(s as u64).split("ladder"), k).unwrap();
            let f0 = point_map(&x).unwrap();
            let a = run_ladder(&f0, &inv, &dir, k, Seed(s as u64)).unwrap();
            assert!(a.holds(), "configuration {s}");
            let b = run_ladder(&f0, &inv, &dir, k, Seed(s as u64)).unwrap();
            assert_eq!(a, b);
            let primes = [int(2), int(3), int(5)];
            let cert = divisibility_certificate(&x, &inv, &primes, k, Seed(s as u64)).unwrap();
            assert!(cert.holds);
            assert_eq!(
                Rational::from_integer(cert.c.clone()).recip(),
                big_div_chain(&primes, k).unwrap().generators()[k]
            );
        }
    }

    #[test]
    fn json_round_trip() {
        let (inv, dir, _) = random_configuration(Seed(4), 3).unwrap();
        let s = serde_json::to_string(&inv).unwrap();
        assert_eq!(serde_json::from_str::<InverseChain>(&s).unwrap(), inv);
        let s = serde_json::to_string(&dir).unwrap();
        assert_eq!(serde_json::from_str::<DirectChain>(&s).unwrap(), dir);
    }
}
