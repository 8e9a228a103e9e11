//! Seeded property suites behind the CLI reports and `selftest`.
//!
//! Each suite returns its checks in a fixed order. A check fails with the
//! first counterexample found; errors raised while checking also fail it.

use std::sync::Arc;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{snf, IntMatrix, Integer, Rational};
use crate::atoms::Atom;
use crate::error::Result;
use crate::homs::Hom;
use crate::hull::{build_injective_presentation, InjectivePresentation};
use crate::ladder::{
    big_div_chain, divisibility_certificate, point_map, run_ladder, random_configuration, DirectChain,
    InverseChain,
};
use crate::report::Check;
use crate::rng::{Rng, Seed};
use crate::sums::{random_element_with, Element, Extent, ModuleShape};
use crate::systems::{
    fiber_sum_map, onto_connecting_map, thread_support_analysis, Direction, Division,
    EventuallyIntegerSeq, FiniteSubsetD, OntoStage, SeqStages, SetChain, SubmodSystem, ThreadPrefix,
};

/// Knobs shared by every suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub seed: u64,
    pub samples: usize,
    pub stages: usize,
    pub max_d: u64,
    pub k: usize,
    pub primes: Vec<Integer>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100,
            stages: 4,
            max_d: 4,
            k: 3,
            primes: vec![2.into(), 3.into(), 5.into()],
        }
    }
}

/// Accumulates cases for one check and keeps the first counterexample.
#[derive(Default)]
struct Tally {
    cases: u64,
    cex: Option<Value>,
}

impl Tally {
    fn record(&mut self, ok: bool, cex: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok && self.cex.is_none() {
            self.cex = Some(cex());
        }
    }

    fn check(self, name: &str, anchor: &str) -> Check {
        Check::from_outcome(name, anchor, self.cases, Ok(self.cex))
    }
}

/// Runs `body` over fresh tallies; an error fails every check of the group.
fn group<const N: usize>(
    names: [(&str, &str); N],
    body: impl FnOnce(&mut [Tally; N]) -> Result<()>,
) -> Vec<Check> {
    let mut tallies: [Tally; N] = std::array::from_fn(|_| Tally::default());
    let outcome = body(&mut tallies);
    tallies
        .into_iter()
        .zip(names)
        .map(|(t, (name, anchor))| match &outcome {
            Ok(()) => t.check(name, anchor),
            Err(e) => Check::from_outcome(name, anchor, t.cases, Err(e.clone())),
        })
        .collect()
}

fn js<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn random_matrix(rng: &mut Rng, max_rows: usize, max_cols: usize, bound: i64) -> IntMatrix {
    let rows = rng.random_range(1..=max_rows);
    let cols = rng.random_range(1..=max_cols);
    IntMatrix::from_rows(
        (0..rows)
            .map(|_| (0..cols).map(|_| rng.random_range(-bound..=bound).into()).collect())
            .collect(),
    )
    .expect("rectangular")
}

// ---------------------------------------------------------------- snf

pub const SNF_CHECKS: [(&str, &str); 3] = [
    ("u·A·v = s", "unimodular u, v diagonalize A"),
    ("divisibility chain", "s = diag(d_1, d_2, …) with d_i | d_(i+1), d_i ≥ 0"),
    ("|det u| = |det v| = 1", "the transforms are invertible over ℤ"),
];

fn is_chain(s: &IntMatrix) -> bool {
    let d = s.diagonal();
    s.is_diagonal()
        && d.iter().all(|x| !x.is_negative())
        && d.windows(2).all(|w| if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) })
}

/// Smith normal form of one matrix, checked.
pub fn snf_checks(a: &IntMatrix) -> Vec<Check> {
    snf_matrices(std::iter::once(a.clone()))
}

fn snf_matrices(ms: impl Iterator<Item = IntMatrix>) -> Vec<Check> {
    group(SNF_CHECKS, |[prod, chain, unimod]| {
        for a in ms {
            let r = snf(&a);
            let cex = || json!({ "a": js(&a), "snf": js(&r) });
            prod.record(&(&r.u * &a) * &r.v == r.s, cex);
            chain.record(is_chain(&r.s), cex);
            let unit = |m: &IntMatrix| m.det().map(|d| d.abs().is_one()).unwrap_or(false);
            unimod.record(unit(&r.u) && unit(&r.v), cex);
        }
        Ok(())
    })
}

/// `count` random matrices up to 5×5 with entries in `[-30, 30]`.
pub fn snf_suite(seed: u64, count: usize) -> Vec<Check> {
    let mut rng = Seed(seed).split("snf").rng();
    let ms: Vec<IntMatrix> = (0..count).map(|_| random_matrix(&mut rng, 5, 5, 30)).collect();
    snf_matrices(ms.into_iter())
}

// ---------------------------------------------------------------- hull

pub const HULL_CHECKS: [(&str, &str); 4] = [
    ("e is injective", "0 → A → M is exact at A"),
    ("f ∘ e = 0", "image of e lies in ker f"),
    ("ker f round-trips through A", "ker f = image of e"),
    ("|ker f| = |A| on the exponent grid", "ker f = A for finite A"),
];

/// `|A|` as the gcd of the maximal minors, 0 for infinite `A`.
fn order_by_minors(mat: &IntMatrix) -> Integer {
    let (n, m) = (mat.rows(), mat.cols());
    if n > m {
        return Integer::zero();
    }
    let mut g = Integer::zero();
    let mut cols: Vec<usize> = (0..n).collect();
    loop {
        let sub = IntMatrix::from_rows(
            (0..n).map(|i| cols.iter().map(|&j| mat[(i, j)].clone()).collect()).collect(),
        )
        .expect("rectangular");
        g = g.gcd(&sub.det().expect("square"));
        let Some(i) = (0..n).rev().find(|&i| cols[i] < m - n + i) else {
            return g;
        };
        cols[i] += 1;
        for t in i + 1..n {
            cols[t] = cols[t - 1] + 1;
        }
    }
}

fn exactness(p: &InjectivePresentation, rng: &mut Rng, samples: usize, t: &mut [Tally; 4]) -> Result<()> {
    let fe = Hom::compose(&p.f, &p.e)?;
    for _ in 0..samples {
        let a = random_element_with(&p.a_shape, rng, 3, &40.into());
        let ea = p.e.apply(&a)?;
        t[0].record(ea.is_zero() == a.is_zero(), || json!({ "a": js(&a) }));
        t[1].record(fe.apply(&a)?.is_zero(), || json!({ "a": js(&a) }));
        let x = random_element_with(&p.m_shape, rng, 3, &8.into());
        for k in [x, ea] {
            let member = p.kernel_membership(&k)?;
            let in_ker = p.f.apply(&k)?.is_zero();
            let ok = match &member {
                None => !in_ker,
                Some(w) => {
                    in_ker
                        && p.e.apply(&w.a_element)? == k
                        && p.a_from_generators(&w.generator_coords)? == w.a_element
                }
            };
            t[2].record(ok, || json!({ "x": js(&k), "witness": js(&member) }));
        }
    }
    Ok(())
}

fn kernel_count(p: &InjectivePresentation, mat: &IntMatrix, order: &Integer, t: &mut Tally) -> Result<()> {
    let mut count = 0u64;
    for x in p.torsion_grid()? {
        if p.f.apply(&x)?.is_zero() {
            count += 1;
        }
    }
    t.record(Integer::from(count) == *order, || {
        json!({ "presentation": js(mat), "order": order.to_string(), "kernel": count })
    });
    Ok(())
}

/// Exactness on one presentation.
pub fn hull_checks(mat: &IntMatrix, ngens: usize, seed: u64, samples: usize) -> Vec<Check> {
    let mut rng = Seed(seed).split("hull_one").rng();
    group(HULL_CHECKS, |t| {
        let p = build_injective_presentation(mat, ngens)?;
        p.validate()?;
        exactness(&p, &mut rng, samples, t)?;
        let order = order_by_minors(mat);
        if !order.is_zero() && order <= 64.into() {
            kernel_count(&p, mat, &order, &mut t[3])?;
        }
        Ok(())
    })
}

/// `count` random presentations (up to 3 generators, entries up to 60),
/// `samples` elements each, plus 40 finite groups of order at most 64.
pub fn hull_suite(seed: u64, count: usize, samples: usize) -> Vec<Check> {
    let mut rng = Seed(seed).split("hull").rng();
    group(HULL_CHECKS, |t| {
        for _ in 0..count {
            let mat = random_matrix(&mut rng, 3, 3, 60);
            let p = build_injective_presentation(&mat, mat.rows())?;
            p.validate()?;
            exactness(&p, &mut rng, samples, t)?;
        }
        let mut finite = 0;
        while finite < 40 {
            let ngens = rng.random_range(1..=3);
            let rels = rng.random_range(ngens..=3);
            let mat = IntMatrix::from_rows(
                (0..ngens)
                    .map(|_| (0..rels).map(|_| rng.random_range(-8..=8).into()).collect())
                    .collect(),
            )?;
            let order = order_by_minors(&mat);
            if order.is_zero() || order > 64.into() {
                continue;
            }
            finite += 1;
            let p = build_injective_presentation(&mat, ngens)?;
            kernel_count(&p, &mat, &order, &mut t[3])?;
        }
        Ok(())
    })
}

/// Presentations used by the submodule and stage suites: ℤ, ℤ/6,
/// ℤ/4 ⊕ ℤ, ℤ², ℤ/2 ⊕ ℤ/4 and ℤ/2 ⊕ ℤ.
pub fn presentation_battery() -> Vec<(&'static str, IntMatrix, usize)> {
    vec![
        ("Z", IntMatrix::empty_columns(1), 1),
        ("Z/6", IntMatrix::from_i64(&[&[6]]), 1),
        ("Z/4+Z", IntMatrix::from_i64(&[&[4], &[0]]), 2),
        ("Z^2", IntMatrix::empty_columns(2), 2),
        ("Z/2+Z/4", IntMatrix::from_i64(&[&[2, 2], &[0, 4]]), 2),
        ("Z/2+Z", IntMatrix::from_i64(&[&[2, 0], &[0, 0]]), 2),
    ]
}

// ---------------------------------------------------------------- submodules

pub const SUBMOD_CHECKS: [(&str, &str); 3] = [
    ("intersection ≅ ker f = A", "⋂_D P_D ≅ ker f = A"),
    ("P_D1 ∩ P_D2 = P_D1∪D2", "the P_D form a directed family"),
    ("P_D ≅ Π_(I−D) round trips", "P_D is determined by its coordinates off D"),
];

fn random_subset(rng: &mut Rng, n: u64) -> FiniteSubsetD {
    FiniteSubsetD::from_mask(rng.random_range(0..1u64 << n), n)
}

/// A mix of kernel elements, elements of some `P_D` and noise, with copy
/// support inside `{1..=max_d}`.
fn submod_sample(sys: &SubmodSystem, rng: &mut Rng, max_d: u64) -> Result<Element> {
    let p = sys.presentation();
    let kind = rng.random_range(0..4);
    let x0 = if kind % 2 == 0 {
        p.e.apply(&random_element_with(&p.a_shape, rng, 2, &20.into()))?
    } else {
        random_element_with(&p.m_shape, rng, 3, &9.into())
    };
    let fx0 = p.f.apply(&x0)?;
    let mut copies = Vec::new();
    if kind >= 1 {
        for i in random_subset(rng, max_d).indices() {
            copies.push((*i, fx0.clone()));
        }
    }
    if kind >= 2 {
        for _ in 0..rng.random_range(0..3) {
            copies.push((rng.random_range(1..=max_d), random_element_with(&p.n_shape, rng, 2, &9.into())));
        }
    }
    sys.element(&x0, copies.iter().map(|(i, y)| (*i, y)))
}

/// Membership against every `D ⊆ {1..=max_d + 1}`; index `max_d + 1` lies
/// outside every sample's support.
fn submod_system(sys: &SubmodSystem, rng: &mut Rng, samples: usize, max_d: u64, t: &mut [Tally; 3]) -> Result<()> {
    let n = max_d + 1;
    for _ in 0..samples {
        let x = submod_sample(sys, rng, max_d)?;
        let member = sys.intersection_member(&x)?;
        let mut all = true;
        for mask in 0..1u64 << n {
            all &= sys.pd_contains(&FiniteSubsetD::from_mask(mask, n), &x)?;
        }
        let consistent = match &member {
            Some(w) => all && sys.presentation().e.apply(&w.a_element)? == sys.x0(&x),
            None => !all,
        };
        t[0].record(consistent, || json!({ "x": js(&x), "in_every_p_d": all }));

        for _ in 0..8 {
            let (d1, d2) = (random_subset(rng, n), random_subset(rng, n));
            let both = sys.pd_contains(&d1, &x)? && sys.pd_contains(&d2, &x)?;
            let union = sys.pd_contains(&d1.union(&d2), &x)?;
            t[1].record(both == union, || json!({ "x": js(&x), "d1": js(&d1), "d2": js(&d2) }));
        }

        let d = random_subset(rng, n);
        let off = sys.cleared(&x, &d);
        let there = sys.pd_isomorphism(&d, Direction::Reinsert, &off)?;
        let mut ok = sys.pd_contains(&d, &there)? && sys.pd_isomorphism(&d, Direction::Drop, &there)? == off;
        if sys.pd_contains(&d, &x)? {
            let dropped = sys.pd_isomorphism(&d, Direction::Drop, &x)?;
            ok &= sys.pd_isomorphism(&d, Direction::Reinsert, &dropped)? == x;
        }
        t[2].record(ok, || json!({ "x": js(&x), "d": js(&d) }));
    }
    Ok(())
}

pub fn submod_checks(mat: &IntMatrix, ngens: usize, seed: u64, samples: usize, max_d: u64) -> Vec<Check> {
    let mut rng = Seed(seed).split("submod_one").rng();
    group(SUBMOD_CHECKS, |t| {
        let sys = SubmodSystem::new(build_injective_presentation(mat, ngens)?)?;
        submod_system(&sys, &mut rng, samples, max_d, t)
    })
}

/// Every battery presentation, `samples` elements each.
pub fn submod_suite(seed: u64, samples: usize, max_d: u64) -> Vec<Check> {
    group(SUBMOD_CHECKS, |t| {
        for (name, mat, ngens) in presentation_battery() {
            let mut rng = Seed(seed).split("submod").split(name).rng();
            let sys = SubmodSystem::new(build_injective_presentation(&mat, ngens)?)?;
            submod_system(&sys, &mut rng, samples, max_d, t)?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- set chains

pub const ZEROLIM_CHECKS: [(&str, &str); 4] = [
    ("fiber sums are additive", "y_i = Σ_(f(j)=i) x_j is a homomorphism"),
    ("fiber-sum sections are preimages", "fiber sums are onto"),
    ("|T_α| is nondecreasing", "thread supports grow along the chain"),
    ("equal supports correspond bijectively", "|T_α| = |T_β| gives a bijection T_β → T_α"),
];

fn zerolim_chain(chain: &SetChain, atom: &Atom, rng: &mut Rng, threads: usize, t: &mut [Tally; 4]) -> Result<()> {
    let b: Integer = 6.into();
    for k in 0..chain.len() {
        let phi = fiber_sum_map(chain, k, atom)?;
        for _ in 0..10 {
            let x = random_element_with(phi.source(), rng, 4, &b);
            let y = random_element_with(phi.source(), rng, 4, &b);
            let lhs = phi.apply(&x.add(&y)?)?;
            let rhs = phi.apply(&x)?.add(&phi.apply(&y)?)?;
            t[0].record(lhs == rhs, || json!({ "stage": k, "x": js(&x), "y": js(&y) }));
            let target = random_element_with(phi.target(), rng, 4, &b);
            let ok = match phi.preimage(&target) {
                Ok(s) => phi.apply(&s)? == target,
                Err(_) => false,
            };
            t[1].record(ok, || json!({ "stage": k, "y": js(&target) }));
        }
    }
    let top_shape = chain.stage_shape(chain.len(), atom);
    for n in 0..threads {
        // Every third thread starts from a single point so sizes tie.
        let support = if n % 3 == 0 { 1 } else { rng.random_range(0..=6) };
        let top = random_element_with(&top_shape, rng, support, &b);
        let thread = ThreadPrefix::from_top(chain.clone(), atom.clone(), top)?;
        let r = thread_support_analysis(&thread);
        t[2].record(r.monotone, || json!({ "chain": js(chain), "thread": js(&thread), "sizes": r.sizes }));
        for c in &r.bijection_checks {
            t[3].record(c.bijective, || json!({ "chain": js(chain), "thread": js(&thread), "pair": js(c) }));
        }
    }
    Ok(())
}

/// `count` random chains of at most `max_len` maps over sets of size at
/// most 8, with `N` alternating between ℤ/6 and ℚ/ℤ.
pub fn zerolim_suite(seed: u64, count: usize, max_len: usize) -> Vec<Check> {
    let mut rng = Seed(seed).split("zerolim").rng();
    group(ZEROLIM_CHECKS, |t| {
        for i in 0..count {
            let len = rng.random_range(1..=max_len.max(1));
            let chain = SetChain::random(&mut rng, len, 8);
            let atom = if i % 2 == 0 { Atom::cyclic(6)? } else { Atom::QmodZ };
            zerolim_chain(&chain, &atom, &mut rng, 10, t)?;
        }
        Ok(())
    })
}

pub fn zerolim_checks(chain: &SetChain, atom: &Atom, seed: u64, threads: usize) -> Vec<Check> {
    let mut rng = Seed(seed).split("zerolim_one").rng();
    group(ZEROLIM_CHECKS, |t| zerolim_chain(chain, atom, &mut rng, threads, t))
}

// ---------------------------------------------------------------- stages

pub const ONTO_CHECKS: [(&str, &str); 4] = [
    ("P_S ≅ M ⊕ ⊕_(S−{i0}) N round trips", "a stage element is free off one index"),
    ("sections land in P_β and map onto y", "the connecting maps between stages are onto"),
    ("connecting maps preserve Σ x_i = f(x_0)", "fiber sums preserve the stage equation"),
    ("zero N-part forces f(x_0) = 0", "an empty sum equals f(x_0) only on ker f = A"),
];

fn onto_chain(p: &Arc<InjectivePresentation>, chain: &SetChain, rng: &mut Rng, samples: usize, t: &mut [Tally; 4]) -> Result<()> {
    let stages = chain
        .sizes()
        .iter()
        .map(|&s| OntoStage::new(p, s))
        .collect::<Result<Vec<_>>>()?;
    let b: Integer = 9.into();
    for k in 0..chain.len() {
        let (alpha, beta) = (&stages[k], &stages[k + 1]);
        let phi = onto_connecting_map(beta, alpha, chain.map(k))?;
        for _ in 0..samples {
            let i0 = rng.random_range(0..alpha.size());
            let raw = alpha.cleared(&random_element_with(alpha.shape(), rng, 5, &b), [i0]);
            let y = alpha.isomorphism(i0, Direction::Reinsert, &raw)?;
            let ok = alpha.contains(&y)?
                && alpha.isomorphism(i0, Direction::Drop, &y)? == raw
                && alpha.isomorphism(i0, Direction::Reinsert, &alpha.isomorphism(i0, Direction::Drop, &y)?)? == y;
            t[0].record(ok, || json!({ "stage": k, "i0": i0, "x": js(&raw) }));

            let ok = match phi.preimage(&y) {
                Ok(x) => beta.contains(&x)? && phi.apply(&x)? == y,
                Err(_) => false,
            };
            t[1].record(ok, || json!({ "stage": k, "y": js(&y) }));

            let j0 = rng.random_range(0..beta.size());
            let raw = beta.cleared(&random_element_with(beta.shape(), rng, 5, &b), [j0]);
            let x = beta.isomorphism(j0, Direction::Reinsert, &raw)?;
            t[2].record(alpha.contains(&phi.apply(&x)?)?, || json!({ "stage": k, "x": js(&x) }));

            let x0 = if rng.random_bool(0.5) {
                p.e.apply(&random_element_with(&p.a_shape, rng, 2, &20.into()))?
            } else {
                random_element_with(&p.m_shape, rng, 3, &b)
            };
            let x = beta.element(&x0, [])?;
            let in_a = p.kernel_membership(&x0)?.is_some();
            let mut ok = beta.contains(&x)? == in_a;
            if in_a {
                let y = phi.apply(&x)?;
                ok &= alpha.n_part_is_zero(&y) && alpha.x0(&y) == x0;
            }
            t[3].record(ok, || json!({ "stage": k + 1, "x0": js(&x0) }));
        }
    }
    Ok(())
}

pub fn onto_checks(mat: &IntMatrix, ngens: usize, seed: u64, samples: usize, stages: usize) -> Vec<Check> {
    let mut rng = Seed(seed).split("onto_one").rng();
    group(ONTO_CHECKS, |t| {
        let p = Arc::new(build_injective_presentation(mat, ngens)?);
        let chain = SetChain::random(&mut rng, stages.max(1), 5);
        onto_chain(&p, &chain, &mut rng, samples, t)
    })
}

/// Every battery presentation over a random chain of 3 maps.
pub fn onto_suite(seed: u64, samples: usize) -> Vec<Check> {
    group(ONTO_CHECKS, |t| {
        for (name, mat, ngens) in presentation_battery() {
            let mut rng = Seed(seed).split("onto").split(name).rng();
            let p = Arc::new(build_injective_presentation(&mat, ngens)?);
            let chain = SetChain::random(&mut rng, 3, 5);
            onto_chain(&p, &chain, &mut rng, samples, t)?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- ladders

pub const LADDER_CHECKS: [(&str, &str); 3] = [
    ("every ladder square commutes", "φ_(0i) ∘ f_i ∘ ψ_(i0) = f_0"),
    ("doubling chain: f_3(g) = [1/192]", "f_0: 1 ↦ [1/3] factors through ·2 on ℚ/ℤ"),
    ("ladders are reproducible", "canonical witnesses make every choice deterministic"),
];

/// `count` random configurations with `k` cycling through `1..=max_k`.
pub fn ladder_suite(seed: u64, count: usize, max_k: usize) -> Vec<Check> {
    group(LADDER_CHECKS, |[squares, worked, repro]| {
        for i in 0..count {
            let k = i % max_k.max(1) + 1;
            let s = Seed(seed).split("ladder").index(i as u64);
            let (inv, dir, x) = random_configuration(s, k)?;
            let f0 = point_map(&x)?;
            let a = run_ladder(&f0, &inv, &dir, k, s)?;
            for c in &a.transcript {
                squares.record(c.holds, || json!({ "configuration": i, "check": js(c) }));
            }
            let b = run_ladder(&f0, &inv, &dir, k, s)?;
            repro.record(a == b, || json!({ "configuration": i }));
        }
        let qz = Arc::new(ModuleShape::single("r", Atom::QmodZ, Extent::Finite(1)));
        let inv = InverseChain::constant(&Hom::mult_by_int(&qz, 2.into()), 3)?;
        let dir = DirectChain::from_indices(&[2.into(), 2.into(), 2.into()])?;
        let x = Element::from_coords(&qz, [("r", 0, Rational::new(1.into(), 3.into()))])?;
        let l = run_ladder(&point_map(&x)?, &inv, &dir, 3, Seed(seed))?;
        let want = Element::from_coords(&qz, [("r", 0, Rational::new(1.into(), 192.into()))])?;
        worked.record(l.holds() && l.transcript[3].image == want, || js(&l.transcript));
        Ok(())
    })
}

pub const CERTIFICATE_CHECKS: [(&str, &str); 2] = [
    ("x = c·φ_(0k)(y)", "x lies in the image of a map from the chain's limit"),
    ("c = 1/c_k", "c is the index of N_0 in N_k"),
];

/// `count` targets across random configurations, `k` cycling through
/// `1..=max_k`.
pub fn certificate_suite(seed: u64, count: usize, max_k: usize, primes: &[Integer]) -> Vec<Check> {
    group(CERTIFICATE_CHECKS, |[identity, scale]| {
        for i in 0..count {
            let k = i % max_k.max(1) + 1;
            let s = Seed(seed).split("certificate").index(i as u64);
            let (inv, _, _) = random_configuration(s, k)?;
            let mut rng = s.split("target").rng();
            let x = random_element_with(inv.stage(0), &mut rng, 2, &40.into());
            let cert = divisibility_certificate(&x, &inv, primes, k, s)?;
            let ck = big_div_chain(primes, k)?.generators()[k].clone();
            identity.record(cert.holds && cert.image.scalar_mul(&cert.c) == x, || {
                json!({ "x": js(&x), "certificate": js(&cert) })
            });
            scale.record(Rational::from_integer(cert.c.clone()) * &ck == Rational::one(), || {
                json!({ "c": cert.c.to_string(), "c_k": crate::arith::format_rational(&ck) })
            });
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- sequences

pub const SEQ_CHECKS: [(&str, &str); 5] = [
    ("k | tail ⇔ divisible", "a sequence is divisible by k iff almost all terms are"),
    ("tail 1 is divisible by no k in 2..12", "the limit is not a divisible group"),
    ("divisible by every k ≤ 12 ⇔ tail = 0", "the divisible part is the eventually-zero sequences"),
    ("tail-0 lifts project onto M_n", "the divisible part maps onto every stage"),
    ("projections commute with φ_mn", "sequences are threads of the system"),
];

fn random_seq(rng: &mut Rng) -> EventuallyIntegerSeq {
    let len = rng.random_range(0..=6);
    let head = (0..len)
        .map(|_| Rational::new(rng.random_range(-20..=20).into(), rng.random_range(1..=12).into()))
        .collect();
    let tail = if rng.random_bool(0.3) { 0 } else { rng.random_range(-30..=30) };
    EventuallyIntegerSeq::new(head, tail.into())
}

/// Term-by-term division of the head and the next 20 terms.
fn brute_divisible(s: &EventuallyIntegerSeq, k: &Integer) -> bool {
    let k = Rational::from_integer(k.clone());
    (s.head().len()..s.head().len() + 20).all(|i| (s.get(i) / &k).is_integer())
}

pub fn seq_division_checks(seq: &EventuallyIntegerSeq, k: &Integer) -> (Vec<Check>, Result<Division>) {
    let outcome = seq.divide(k);
    let checks = group([SEQ_CHECKS[0]], |[law]| {
        let ok = match outcome.clone()? {
            Division::Quotient(q) => brute_divisible(seq, k) && q.scalar_mul(k) == *seq,
            Division::Refuted { .. } => !brute_divisible(seq, k),
        };
        law.record(ok, || json!({ "seq": js(seq), "k": k.to_string() }));
        Ok(())
    });
    (checks, outcome)
}

pub fn seq_suite(seed: u64, samples: usize, lifts: usize) -> Vec<Check> {
    let mut rng = Seed(seed).split("seq").rng();
    group(SEQ_CHECKS, |[law, one, part, lift, commute]| {
        for _ in 0..samples {
            let s = random_seq(&mut rng);
            let k: Integer = rng.random_range(1..=12).into();
            let ok = match s.divide(&k)? {
                Division::Quotient(q) => brute_divisible(&s, &k) && q.scalar_mul(&k) == s,
                Division::Refuted { .. } => !brute_divisible(&s, &k),
            };
            law.record(ok, || json!({ "seq": js(&s), "k": k.to_string() }));
            part.record(s.divisible_up_to(12) == s.tail().is_zero(), || json!({ "seq": js(&s) }));
            let n = rng.random_range(0..=5);
            let m = rng.random_range(0..=n);
            let phi = SeqStages::connecting(m, n)?;
            commute.record(phi.apply(&SeqStages::project(&s, n))? == SeqStages::project(&s, m), || {
                json!({ "seq": js(&s), "m": m, "n": n })
            });
        }
        let tail_one = EventuallyIntegerSeq::new(vec![], Integer::one());
        for k in 2..=12 {
            let refused = matches!(tail_one.divide(&k.into())?, Division::Refuted { .. });
            one.record(refused, || json!({ "k": k }));
        }
        for _ in 0..lifts {
            let n = rng.random_range(0..=5);
            let x = random_element_with(&SeqStages::shape(n), &mut rng, 5, &12.into());
            let s = SeqStages::divisible_preimage(&x, n)?;
            lift.record(s.tail().is_zero() && SeqStages::project(&s, n) == x, || {
                json!({ "n": n, "x": js(&x), "lift": js(&s) })
            });
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- selftest

/// Every suite at acceptance size, run in parallel and reported in
/// declaration order.
pub fn selftest(seed: u64, primes: &[Integer]) -> Vec<Check> {
    type Suite<'a> = Box<dyn Fn() -> Vec<Check> + Send + Sync + 'a>;
    let suites: Vec<Suite> = vec![
        Box::new(|| snf_suite(seed, 200)),
        Box::new(|| hull_suite(seed, 50, 100)),
        Box::new(|| submod_suite(seed, 300, 8)),
        Box::new(|| zerolim_suite(seed, 50, 6)),
        Box::new(|| onto_suite(seed, 100)),
        Box::new(|| ladder_suite(seed, 20, 4)),
        Box::new(|| certificate_suite(seed, 50, 4, primes)),
        Box::new(|| seq_suite(seed, 200, 100)),
    ];
    suites.par_iter().map(|s| s()).collect::<Vec<_>>().concat()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pass(checks: &[Check]) {
        for c in checks {
            assert!(c.passed(), "{} failed: {:?}", c.name, c.counterexample);
            assert!(c.cases > 0, "{} ran no cases", c.name);
        }
    }

    #[test]
    fn small_suites_pass() {
        all_pass(&snf_suite(1, 30));
        all_pass(&hull_suite(1, 5, 10));
        all_pass(&submod_suite(1, 20, 4));
        all_pass(&zerolim_suite(1, 5, 4));
        all_pass(&onto_suite(1, 10));
        all_pass(&ladder_suite(1, 4, 4));
        all_pass(&certificate_suite(1, 4, 2, &[2.into(), 3.into()]));
        all_pass(&seq_suite(1, 50, 20));
    }

    #[test]
    fn failures_carry_counterexamples() {
        let checks = group([("x", "y")], |[t]| {
            t.record(true, || json!(0));
            t.record(false, || json!({"bad": 1}));
            t.record(false, || json!({"bad": 2}));
            Ok(())
        });
        assert_eq!(checks[0].counterexample, Some(json!({"bad": 1})));
        assert_eq!(checks[0].cases, 3);
        let checks = group([("x", "y")], |_| Err(crate::Error::Parse("boom".into())));
        assert!(!checks[0].passed());
    }

    #[test]
    fn minors_oracle() {
        assert_eq!(order_by_minors(&IntMatrix::from_i64(&[&[6]])), 6.into());
        assert_eq!(order_by_minors(&IntMatrix::from_i64(&[&[2, 2], &[0, 4]])), 8.into());
        assert_eq!(order_by_minors(&IntMatrix::empty_columns(1)), 0.into());
    }
}
