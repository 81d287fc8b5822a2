//! On-disk JSON form of a profile.
//!
//! Infinite log-radii and log-amplitudes (`a = 0`, `h = 0`) are written as
//! the strings `"-inf"` / `"+inf"`, since JSON has no infinities.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Component, Interpolation, PowerSegment, RadialProfile, SampledRadial};
use crate::error::Error;
use crate::numerics::LogScalar;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Extended {
    Num(f64),
    Text(String),
}

fn to_extended(x: f64) -> Extended {
    if x == f64::NEG_INFINITY {
        Extended::Text("-inf".into())
    } else if x == f64::INFINITY {
        Extended::Text("+inf".into())
    } else {
        Extended::Num(x)
    }
}

fn from_extended<E: serde::de::Error>(v: Extended) -> Result<f64, E> {
    match v {
        Extended::Num(x) => Ok(x),
        Extended::Text(s) => match s.as_str() {
            "-inf" => Ok(f64::NEG_INFINITY),
            "+inf" | "inf" => Ok(f64::INFINITY),
            other => Err(E::custom(alloc::format!("expected a number or \"-inf\", got {other:?}"))),
        },
    }
}

pub(super) mod extended {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_extended(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_extended(Extended::deserialize(d)?)
    }
}

pub(super) mod opt_extended {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        x.map(to_extended).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<Extended>::deserialize(d)?.map(from_extended).transpose()
    }
}

#[derive(Serialize, Deserialize)]
struct SampledWire {
    #[serde(default, skip_serializing_if = "is_linear")]
    interpolation: Interpolation,
    log2_nodes: Vec<f64>,
    #[serde(serialize_with = "ser_mags", deserialize_with = "de_mags")]
    log2_mags: Vec<f64>,
}

fn is_linear(i: &Interpolation) -> bool {
    *i == Interpolation::LogLogLinear
}

fn ser_mags<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(|x| to_extended(*x)).collect::<Vec<_>>().serialize(s)
}

fn de_mags<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    Vec::<Extended>::deserialize(d)?.into_iter().map(from_extended).collect()
}

#[derive(Serialize, Deserialize)]
struct ComponentWire {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    segments: Vec<PowerSegment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sampled: Option<SampledWire>,
}

#[derive(Serialize, Deserialize)]
struct ProfileWire {
    n: u32,
    #[serde(default)]
    label: String,
    #[serde(default)]
    components: Vec<ComponentWire>,
}

impl Serialize for RadialProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let components = self
            .components
            .iter()
            .map(|c| ComponentWire {
                segments: c.segments.clone(),
                sampled: c.sampled.as_ref().map(|sr| SampledWire {
                    interpolation: sr.interpolation,
                    log2_nodes: sr.log2_nodes.clone(),
                    log2_mags: sr.magnitudes.iter().map(|m| m.log2_mag()).collect(),
                }),
            })
            .collect();
        ProfileWire { n: self.dimension, label: self.label.clone(), components }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = ProfileWire::deserialize(d)?;
        let mut components = Vec::with_capacity(w.components.len());
        for c in w.components {
            let sampled = match c.sampled {
                Some(sw) => {
                    let mags = sw.log2_mags.iter().map(|l| LogScalar::exp2(*l)).collect();
                    let sr = SampledRadial::new(sw.log2_nodes, mags)
                        .and_then(|s| s.with_interpolation(sw.interpolation))
                        .map_err(serde::de::Error::custom)?;
                    Some(sr)
                }
                None => None,
            };
            components.push(Component { segments: c.segments, sampled });
        }
        RadialProfile::new(w.n, components, w.label).map_err(|e: Error| serde::de::Error::custom(e))
    }
}
