//! The fan interchange format: rank, rays, maximal cones, named ray-aligned
//! divisors with rationals as "p/q" strings, and a free metadata map. No
//! floats appear anywhere in the wire format, and serialization is
//! deterministic (sorted maps, fixed field order).

use std::collections::BTreeMap;

use num::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{format_rat, parse_rat, Int};
use crate::constructions::BuiltExample;
use crate::divisor::TorusDivisor;
use crate::error::Error;
use crate::fan::{Cone, Fan};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FanDocument {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub divisors: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl FanDocument {
    pub fn from_fan(fan: &Fan) -> Result<Self, Error> {
        let rays = fan
            .rays()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| {
                        c.to_i64().ok_or_else(|| {
                            Error::InvalidFan("ray coordinate exceeds the document range".into())
                        })
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<i64>>, Error>>()?;
        Ok(FanDocument {
            rank: fan.rank(),
            rays,
            max_cones: fan.max_cones().iter().map(|c| c.rays().to_vec()).collect(),
            divisors: BTreeMap::new(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn from_example(example: &BuiltExample) -> Result<Self, Error> {
        let mut doc = Self::from_fan(&example.fan)?;
        for (name, d) in &example.divisors {
            doc.divisors
                .insert(name.clone(), d.coefficients.iter().map(format_rat).collect());
        }
        doc.metadata.insert("name".to_string(), example.name.clone());
        for (key, value) in &example.expected {
            doc.metadata.insert(format!("expected.{key}"), format_rat(value));
        }
        Ok(doc)
    }

    pub fn to_fan(&self) -> Result<Fan, Error> {
        let rays = self
            .rays
            .iter()
            .map(|r| r.iter().map(|&c| Int::from(c)).collect())
            .collect();
        let cones = self.max_cones.iter().map(|c| Cone::new(c.clone())).collect();
        Fan::new(self.rank, rays, cones)
    }

    /// A named divisor from the document. "K" falls back to the canonical
    /// divisor when not stored explicitly.
    pub fn divisor(&self, fan: &Fan, name: &str) -> Result<TorusDivisor, Error> {
        if let Some(coeffs) = self.divisors.get(name) {
            let parsed = coeffs.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?;
            return TorusDivisor::new(fan, parsed);
        }
        if name == "K" {
            return Ok(crate::divisor::canonical_divisor(fan));
        }
        Err(Error::InvalidDivisor(format!(
            "no divisor named `{name}` in the document (available: {})",
            self.divisors.keys().cloned().collect::<Vec<_>>().join(", ")
        )))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn parse(json: &str) -> Result<Self, Error> {
        let doc: FanDocument = serde_json::from_str(json)?;
        for c in &doc.max_cones {
            for &i in c {
                if i >= doc.rays.len() {
                    return Err(Error::InvalidFan(format!("cone index {i} out of range")));
                }
            }
        }
        for (name, coeffs) in &doc.divisors {
            if coeffs.len() != doc.rays.len() {
                return Err(Error::InvalidDivisor(format!(
                    "divisor `{name}` has {} coefficients for {} rays",
                    coeffs.len(),
                    doc.rays.len()
                )));
            }
        }
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build, ExampleSpec};

    #[test]
    fn round_trip_is_byte_identical() {
        let example = build(&ExampleSpec::new("ex_4_3_1")).unwrap();
        let doc = FanDocument::from_example(&example).unwrap();
        let json = doc.to_json();
        let reparsed = FanDocument::parse(&json).unwrap();
        assert_eq!(reparsed.to_json(), json);
        assert_eq!(reparsed.to_fan().unwrap(), example.fan);
    }

    #[test]
    fn named_divisors_parse_back() {
        let example = build(&ExampleSpec::new("ex_4_3_1")).unwrap();
        let doc = FanDocument::from_example(&example).unwrap();
        let fan = doc.to_fan().unwrap();
        let e = doc.divisor(&fan, "E").unwrap();
        assert_eq!(&e, &example.divisors["E"]);
        let k = doc.divisor(&fan, "K").unwrap();
        assert_eq!(&k, &example.divisors["K"]);
        assert!(doc.divisor(&fan, "missing").is_err());
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(FanDocument::parse("{").is_err());
        let json = r#"{"rank": 2, "rays": [[1, 0]], "max_cones": [[0, 7]]}"#;
        assert!(FanDocument::parse(json).is_err());
    }
}
