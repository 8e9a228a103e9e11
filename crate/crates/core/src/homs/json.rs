//! JSON combinator trees for [`Hom`].
//!
//! Loading re-runs every constructor's shape checks bottom-up; the first
//! ill-typed node is reported with its JSON path, e.g. `$.terms[1].inner`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Body, Hom, IndexMap, Route};
use crate::arith::{self, Integer, Rational};
use crate::error::{Error, Result};
use crate::sums::{Element, ModuleShape};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum HomRepr {
    Zero {
        source: ModuleShape,
        target: ModuleShape,
    },
    Identity {
        shape: ModuleShape,
    },
    Route {
        source: ModuleShape,
        target: ModuleShape,
        routes: Vec<RouteRepr>,
    },
    MultByRational {
        shape: ModuleShape,
        #[serde(with = "arith::rat_string")]
        factor: Rational,
    },
    MultByInt {
        shape: ModuleShape,
        #[serde(with = "arith::int_string")]
        factor: Integer,
    },
    ReduceQ {
        source: ModuleShape,
    },
    EmbedCyclic {
        source: ModuleShape,
    },
    PrueferMultPk {
        shape: ModuleShape,
        k: u32,
    },
    GeneratorImage {
        source: ModuleShape,
        target: ModuleShape,
        images: Vec<ImageRepr>,
    },
    FiberSum {
        source: ModuleShape,
        target: ModuleShape,
        map: Vec<usize>,
    },
    Sum {
        terms: Vec<HomRepr>,
    },
    DirectSum {
        terms: Vec<HomRepr>,
    },
    Compose {
        outer: Box<HomRepr>,
        inner: Box<HomRepr>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteRepr {
    pub from: String,
    pub to: String,
    pub index: IndexRepr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexRepr {
    Same,
    Offset(i64),
    Table(Vec<(u64, u64)>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageRepr {
    pub family: String,
    pub index: u64,
    /// Coordinates of the image in the target, as `[family, index, value]`.
    pub image: Vec<(String, u64, String)>,
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::IllTyped { path: op, reason } => Error::IllTyped {
            path: format!("{path} ({op})"),
            reason,
        },
        other => Error::IllTyped {
            path: path.to_string(),
            reason: other.to_string(),
        },
    }
}

impl HomRepr {
    /// Builds and type-checks the tree.
    pub fn build(&self) -> Result<Hom> {
        self.build_at("$")
    }

    fn build_at(&self, path: &str) -> Result<Hom> {
        let arc = |s: &ModuleShape| Arc::new(s.clone());
        let r = match self {
            HomRepr::Zero { source, target } => Ok(Hom::zero(&arc(source), &arc(target))),
            HomRepr::Identity { shape } => Ok(Hom::identity(&arc(shape))),
            HomRepr::Route {
                source,
                target,
                routes,
            } => {
                let routes = routes
                    .iter()
                    .map(|r| {
                        let index = match &r.index {
                            IndexRepr::Same => IndexMap::Same,
                            IndexRepr::Offset(o) => IndexMap::Offset(*o),
                            IndexRepr::Table(t) => {
                                IndexMap::Table(t.iter().copied().collect::<BTreeMap<_, _>>())
                            }
                        };
                        Route::new(r.from.clone(), r.to.clone(), index)
                    })
                    .collect();
                Hom::route(&arc(source), &arc(target), routes)
            }
            HomRepr::MultByRational { shape, factor } => {
                Hom::mult_by_rational(&arc(shape), factor.clone())
            }
            HomRepr::MultByInt { shape, factor } => Ok(Hom::mult_by_int(&arc(shape), factor.clone())),
            HomRepr::ReduceQ { source } => Hom::reduce_q(&arc(source)),
            HomRepr::EmbedCyclic { source } => Hom::embed_cyclic(&arc(source)),
            HomRepr::PrueferMultPk { shape, k } => Hom::pruefer_mult_pk(&arc(shape), *k),
            HomRepr::GeneratorImage {
                source,
                target,
                images,
            } => {
                let target = arc(target);
                let imgs = images
                    .iter()
                    .map(|im| {
                        let coords = im
                            .image
                            .iter()
                            .map(|(f, i, v)| Ok((f.as_str(), *i, arith::parse_rational(v)?)))
                            .collect::<Result<Vec<_>>>()?;
                        Ok((im.family.as_str(), im.index, Element::from_coords(&target, coords)?))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| at(path, e))?;
                Hom::generator_image(&arc(source), &target, imgs)
            }
            HomRepr::FiberSum { source, target, map } => {
                Hom::fiber_sum(&arc(source), &arc(target), map.clone())
            }
            HomRepr::Sum { terms } => {
                let built = build_terms(terms, path)?;
                Hom::sum(built)
            }
            HomRepr::DirectSum { terms } => {
                let built = build_terms(terms, path)?;
                Hom::direct_sum(built)
            }
            HomRepr::Compose { outer, inner } => {
                let o = outer.build_at(&format!("{path}.outer"))?;
                let i = inner.build_at(&format!("{path}.inner"))?;
                Hom::compose(&o, &i)
            }
        };
        // Child failures returned early through `?` and already carry a path.
        r.map_err(|e| at(path, e))
    }
}

fn build_terms(terms: &[HomRepr], path: &str) -> Result<Vec<Hom>> {
    terms
        .iter()
        .enumerate()
        .map(|(i, t)| t.build_at(&format!("{path}.terms[{i}]")))
        .collect()
}

fn coords_of(e: &Element) -> Vec<(String, u64, String)> {
    let mut v: Vec<_> = e
        .iter()
        .map(|((pos, idx), q)| {
            (
                e.shape().family(pos).id.clone(),
                idx,
                arith::format_rational(q),
            )
        })
        .collect();
    v.sort();
    v
}

impl From<&Hom> for HomRepr {
    fn from(h: &Hom) -> HomRepr {
        let src = (*h.source).clone();
        let tgt = (*h.target).clone();
        match &h.body {
            Body::Zero => HomRepr::Zero {
                source: src,
                target: tgt,
            },
            Body::Identity => HomRepr::Identity { shape: src },
            Body::Route(legs) => HomRepr::Route {
                routes: legs
                    .iter()
                    .map(|(sp, tp, map)| RouteRepr {
                        from: src.family(*sp).id.clone(),
                        to: tgt.family(*tp).id.clone(),
                        index: match map {
                            IndexMap::Same => IndexRepr::Same,
                            IndexMap::Offset(o) => IndexRepr::Offset(*o),
                            IndexMap::Table(t) => {
                                IndexRepr::Table(t.iter().map(|(&a, &b)| (a, b)).collect())
                            }
                        },
                    })
                    .collect(),
                source: src,
                target: tgt,
            },
            Body::MultRational(q) => HomRepr::MultByRational {
                shape: src,
                factor: q.clone(),
            },
            Body::MultInt(n) => HomRepr::MultByInt {
                shape: src,
                factor: n.clone(),
            },
            Body::ReduceQ => HomRepr::ReduceQ { source: src },
            Body::EmbedCyclic => HomRepr::EmbedCyclic { source: src },
            Body::PrueferMultPk(k) => HomRepr::PrueferMultPk { shape: src, k: *k },
            Body::GeneratorImage(images) => HomRepr::GeneratorImage {
                images: images
                    .iter()
                    .map(|(&(pos, idx), img)| ImageRepr {
                        family: src.family(pos).id.clone(),
                        index: idx,
                        image: coords_of(img),
                    })
                    .collect(),
                source: src,
                target: tgt,
            },
            Body::FiberSum(map) => HomRepr::FiberSum {
                source: src,
                target: tgt,
                map: map.clone(),
            },
            Body::Sum(terms) => HomRepr::Sum {
                terms: terms.iter().map(HomRepr::from).collect(),
            },
            Body::DirectSum(terms) => HomRepr::DirectSum {
                terms: terms.iter().map(HomRepr::from).collect(),
            },
            Body::Compose(o, i) => HomRepr::Compose {
                outer: Box::new(HomRepr::from(&**o)),
                inner: Box::new(HomRepr::from(&**i)),
            },
        }
    }
}

impl Serialize for Hom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HomRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        HomRepr::deserialize(d)?.build().map_err(D::Error::custom)
    }
}
