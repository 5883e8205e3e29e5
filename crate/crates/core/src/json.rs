//! Serde adapters writing integers as plain JSON numbers.
//!
//! Values outside the i64 range are written as decimal strings; both forms are
//! accepted on input.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::fmt;

pub struct Int<'a>(pub &'a BigInt);

impl Serialize for Int<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub struct OwnedInt(pub BigInt);

impl<'de> Deserialize<'de> for OwnedInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = OwnedInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<OwnedInt, E> {
                Ok(OwnedInt(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<OwnedInt, E> {
                Ok(OwnedInt(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<OwnedInt, E> {
                v.trim().parse().map(OwnedInt).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

pub mod int {
    use super::*;
    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        Int(v).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        Ok(OwnedInt::deserialize(d)?.0)
    }
}

pub mod vec {
    use super::*;
    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(Int))
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Ok(Vec::<OwnedInt>::deserialize(d)?.into_iter().map(|x| x.0).collect())
    }
}

pub mod vec2 {
    use super::*;
    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.iter().map(Int).collect::<Vec<_>>()))
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Ok(Vec::<Vec<OwnedInt>>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect())
    }
}

pub mod vec3 {
    use super::*;
    pub fn serialize<S: Serializer>(v: &[Vec<Vec<BigInt>>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            v.iter()
                .map(|m| m.iter().map(|r| r.iter().map(Int).collect::<Vec<_>>()).collect::<Vec<_>>()),
        )
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Vec<BigInt>>>, D::Error> {
        Ok(Vec::<Vec<Vec<OwnedInt>>>::deserialize(d)?
            .into_iter()
            .map(|m| m.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect())
            .collect())
    }
}

/// Rationals as integers when integral, otherwise as `"p/q"` strings.
pub mod rat_vec {
    use super::*;
    use num_rational::BigRational;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum R {
            I(i64),
            S(String),
        }
        s.collect_seq(v.iter().map(|x| match (x.is_integer(), x.to_integer().to_i64()) {
            (true, Some(i)) => R::I(i),
            _ => R::S(x.to_string()),
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum R {
            I(i64),
            S(String),
        }
        Vec::<R>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                R::I(i) => Ok(BigRational::from_integer(i.into())),
                R::S(t) => t.trim().parse::<BigRational>().map_err(de::Error::custom),
            })
            .collect()
    }
}
