use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numerics::{LogScalar, MAX_EXPONENT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Zero,
    FinitePositive,
    Infinite,
    Oscillating,
    LogCorrected,
}

/// A decay character: a real, `+∞`, or the floor `−n/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CharValue {
    Finite(f64),
    PlusInf,
    MinusHalfN,
}

impl CharValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            CharValue::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Numeric value, with `−n/2` resolved for dimension `n`.
    pub fn value(self, n: u32) -> f64 {
        match self {
            CharValue::Finite(x) => x,
            CharValue::PlusInf => f64::INFINITY,
            CharValue::MinusHalfN => -(n as f64) / 2.0,
        }
    }
}

impl fmt::Display for CharValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharValue::Finite(x) => write!(f, "{x}"),
            CharValue::PlusInf => f.write_str("+inf"),
            CharValue::MinusHalfN => f.write_str("-n/2"),
        }
    }
}

impl Serialize for CharValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CharValue::Finite(x) => s.serialize_f64(*x),
            CharValue::PlusInf => s.serialize_str("+inf"),
            CharValue::MinusHalfN => s.serialize_str("-n/2"),
        }
    }
}

impl<'de> Deserialize<'de> for CharValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(CharValue::Finite(x)),
            Raw::Text(t) if t == "+inf" => Ok(CharValue::PlusInf),
            Raw::Text(t) if t == "-n/2" => Ok(CharValue::MinusHalfN),
            Raw::Text(t) => Err(serde::de::Error::custom(alloc::format!("unknown decay character {t:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayIndicatorReport {
    pub r: f64,
    pub liminf_est: LogScalar,
    pub limsup_est: LogScalar,
    pub classification: Classification,
    /// Slope of `log2 max Φ_r` against `log2 ρ` between the tail windows.
    pub tail_slope: f64,
    pub tail_slope_lower: f64,
    /// `limsup_est / liminf_est`; infinite when the liminf vanishes.
    #[serde(with = "crate::indicators::report::ext_f64")]
    pub ratio: f64,
    pub diagnostics: String,
}

impl DecayIndicatorReport {
    pub(super) fn zero(r: f64, why: &str) -> Self {
        Self {
            r,
            liminf_est: LogScalar::ZERO,
            limsup_est: LogScalar::ZERO,
            classification: Classification::Zero,
            tail_slope: 0.0,
            tail_slope_lower: 0.0,
            ratio: f64::INFINITY,
            diagnostics: why.into(),
        }
    }

    pub fn limsup_is_finite(&self) -> bool {
        self.limsup_est.log2_mag() < MAX_EXPONENT as f64
    }

    /// Finite positive limit, or a bounded oscillation between positive values.
    pub fn is_finite_positive(&self) -> bool {
        match self.classification {
            Classification::FinitePositive => true,
            Classification::Oscillating => {
                self.ratio.is_finite() && self.liminf_est.is_positive() && self.limsup_is_finite()
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCharacterReport {
    pub n: u32,
    pub r_plus: CharValue,
    pub r_minus: CharValue,
    pub r_star: Option<CharValue>,
    pub sigma: Option<f64>,
    pub log_correction: bool,
    pub classification_at_r_plus: Option<Classification>,
    pub diagnostics: String,
}

impl DecayCharacterReport {
    pub(super) fn infinite(n: f64, why: &str) -> Self {
        Self {
            n: n as u32,
            r_plus: CharValue::PlusInf,
            r_minus: CharValue::PlusInf,
            r_star: Some(CharValue::PlusInf),
            sigma: None,
            log_correction: false,
            classification_at_r_plus: Some(Classification::Zero),
            diagnostics: why.into(),
        }
    }

    /// `−n/2 ≤ r₊ ≤ r₋`.
    pub fn ordered(&self) -> bool {
        let (p, m) = (self.r_plus.value(self.n), self.r_minus.value(self.n));
        -(self.n as f64) / 2.0 <= p && p <= m
    }

    pub fn r_star_finite(&self) -> Option<f64> {
        self.r_star.and_then(CharValue::finite)
    }
}

pub(crate) mod ext_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("+inf")
        } else if *x < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) => match t.as_str() {
                "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom("expected a number")),
            },
        }
    }
}
