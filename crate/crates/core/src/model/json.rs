//! JSON documents for the twin models.

use serde::de::{self, DeserializeOwned, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use super::{
    Capacity, DeploymentMapping, EcuNode, HardwareModel, LatencyBound, ModelError, NetLink,
    SoftwareModel, SwComponent, SwEdge,
};

const INFINITY: &str = "infinity";
const UNBOUNDED: &str = "unbounded";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HardwareDoc {
    ecus: Vec<EcuNode>,
    #[serde(default)]
    links: Vec<NetLink>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SoftwareDoc {
    #[serde(default)]
    components: Vec<SwComponent>,
    #[serde(default)]
    edges: Vec<SwEdge>,
}

pub fn parse_hardware(text: &str) -> Result<HardwareModel, ModelError> {
    let doc: HardwareDoc = from_json(text)?;
    HardwareModel::new(doc.ecus, doc.links)
}

pub fn serialize_hardware(model: &HardwareModel) -> String {
    to_json(&HardwareDoc {
        ecus: model.ecus.clone(),
        links: model.links.clone(),
    })
}

pub fn parse_software(text: &str) -> Result<SoftwareModel, ModelError> {
    let doc: SoftwareDoc = from_json(text)?;
    SoftwareModel::new(doc.components, doc.edges)
}

pub fn serialize_software(model: &SoftwareModel) -> String {
    to_json(&SoftwareDoc {
        components: model.components.clone(),
        edges: model.edges.clone(),
    })
}

pub fn parse_mapping(text: &str) -> Result<DeploymentMapping, ModelError> {
    from_json(text)
}

pub fn serialize_mapping(mapping: &DeploymentMapping) -> String {
    to_json(mapping)
}

/// Deserializes `text`, splitting failures into syntax errors and schema
/// errors that carry the path of the offending field.
pub(crate) fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, ModelError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        classify(inner, Some(field))
    })?;
    de.end().map_err(|err| classify(err, None))?;
    Ok(value)
}

fn classify(err: serde_json::Error, field: Option<String>) -> ModelError {
    let full = err.to_string();
    let message = match full.rfind(" at line ") {
        Some(pos) => full[..pos].to_string(),
        None => full,
    };
    match (err.classify(), field) {
        (Category::Data, Some(field)) => ModelError::Schema {
            field,
            reason: message,
        },
        _ => ModelError::Syntax {
            line: err.line(),
            column: err.column(),
            message,
        },
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("model documents always serialize")
}

/// Integral values go out as JSON integers so that documents written by hand
/// (`"ram_mb": 4`) survive a parse/serialize cycle unchanged.
fn serialize_number<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        s.serialize_i64(v as i64)
    } else {
        s.serialize_f64(v)
    }
}

pub(crate) fn non_negative<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(de::Error::custom(format!(
            "expected a non-negative number, found {v}"
        )))
    }
}

pub(crate) mod number {
    pub fn serialize<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        super::serialize_number(*v, s)
    }
}

/// Accepts a non-negative JSON number or the one keyword `word`.
struct NumberOrWord(&'static str);

enum NumberOrKeyword {
    Number(f64),
    Keyword,
}

impl<'de> Visitor<'de> for NumberOrWord {
    type Value = NumberOrKeyword;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        write!(f, "a non-negative number or \"{}\"", self.0)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
        Ok(NumberOrKeyword::Number(v as f64))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
        self.visit_f64(v as f64)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
        if v.is_finite() && v >= 0.0 {
            Ok(NumberOrKeyword::Number(v))
        } else {
            Err(E::custom(format!("expected a non-negative number, found {v}")))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
        if v == self.0 {
            Ok(NumberOrKeyword::Keyword)
        } else {
            Err(E::invalid_value(de::Unexpected::Str(v), &self))
        }
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Capacity::Finite(v) => serialize_number(*v, s),
            Capacity::Unlimited => s.serialize_str(INFINITY),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match d.deserialize_any(NumberOrWord(INFINITY))? {
            NumberOrKeyword::Number(v) => Capacity::Finite(v),
            NumberOrKeyword::Keyword => Capacity::Unlimited,
        })
    }
}

impl Serialize for LatencyBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LatencyBound::Finite(v) => serialize_number(*v, s),
            LatencyBound::Unbounded => s.serialize_str(UNBOUNDED),
        }
    }
}

impl<'de> Deserialize<'de> for LatencyBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match d.deserialize_any(NumberOrWord(UNBOUNDED))? {
            NumberOrKeyword::Number(v) => LatencyBound::Finite(v),
            NumberOrKeyword::Keyword => LatencyBound::Unbounded,
        })
    }
}
