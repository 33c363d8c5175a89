//! JSON scheme files.
//!
//! Only the left-boundary coefficients are serialized; the right boundary is
//! always regenerated by mirroring. Numbers are decimal strings so that the
//! published tables keep their full precision on disk.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{BoundaryBlock, SchemeDefinition, SchemeId, WeightFamily, BOUNDARY_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Table,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub scheme_id: SchemeId,
    #[serde(default)]
    pub free_params: BTreeMap<String, String>,
    pub coefficients: BTreeMap<String, String>,
    pub weights: BTreeMap<String, String>,
    pub aux_weights: BTreeMap<String, String>,
    pub provenance: Provenance,
    #[serde(default)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

fn parse_decimal(field: &str, key: &str, text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::SchemeFormat(format!("{field}.{key}: {text:?} is not a decimal number")))?;
    if !v.is_finite() {
        return Err(Error::SchemeFormat(format!("{field}.{key} is not finite")));
    }
    Ok(v)
}

fn take(map: &BTreeMap<String, String>, field: &str, key: &str) -> Result<f64> {
    let text = map
        .get(key)
        .ok_or_else(|| Error::SchemeFormat(format!("{field} is missing {key:?}")))?;
    parse_decimal(field, key, text)
}

fn check_keys(map: &BTreeMap<String, String>, field: &str, allowed: &[String]) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(k)) {
        Some(k) => Err(Error::SchemeFormat(format!("{field} has unexpected entry {k:?}"))),
        None => Ok(()),
    }
}

/// Shortest decimal string that parses back to the same binary64 value.
pub fn format_decimal(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:?}")
    }
}

impl SchemeFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SchemeFormat(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scheme file serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::SchemeFormat(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Build the coefficient set exactly as stored, without re-running the closure.
    pub fn to_definition(&self) -> Result<SchemeDefinition> {
        let id = self.scheme_id;
        let depth = id.depth();

        let coeff_names: Vec<String> = (0..depth)
            .flat_map(|i| {
                (0..BOUNDARY_WIDTH).flat_map(move |j| [format!("a{i}{j}"), format!("b{i}{j}")])
            })
            .collect();
        check_keys(&self.coefficients, "coefficients", &coeff_names)?;
        let mut block = BoundaryBlock::new(depth)?;
        for i in 0..depth {
            for j in 0..BOUNDARY_WIDTH {
                block.set_a(i, j, take(&self.coefficients, "coefficients", &format!("a{i}{j}"))?);
                block.set_b(i, j, take(&self.coefficients, "coefficients", &format!("b{i}{j}"))?);
            }
        }

        let weight_names: Vec<String> = (0..4).map(|k| format!("w{k}")).collect();
        check_keys(&self.weights, "weights", &weight_names)?;
        let mut w = [0.0; 4];
        for (k, name) in weight_names.iter().enumerate() {
            w[k] = take(&self.weights, "weights", name)?;
        }

        let aux_names: Vec<String> = (0..depth).map(|k| format!("wp{k}")).collect();
        check_keys(&self.aux_weights, "aux_weights", &aux_names)?;
        let aux = aux_names
            .iter()
            .map(|name| take(&self.aux_weights, "aux_weights", name))
            .collect::<Result<Vec<_>>>()?;

        let free_names: Vec<String> = id.free_param_names().iter().map(|s| s.to_string()).collect();
        check_keys(&self.free_params, "free_params", &free_names)?;

        SchemeDefinition::new(id, block, WeightFamily::from_values(w), aux)
    }

    /// Free parameters in closure order, when the file records them.
    pub fn free_param_values(&self) -> Result<Option<Vec<f64>>> {
        if self.free_params.is_empty() {
            return Ok(None);
        }
        self.scheme_id
            .free_param_names()
            .iter()
            .map(|name| take(&self.free_params, "free_params", name))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn from_definition(
        scheme: &SchemeDefinition,
        provenance: Provenance,
        meta: BTreeMap<String, serde_json::Value>,
    ) -> Self {
        let mut coefficients = BTreeMap::new();
        let mut weights = BTreeMap::new();
        let mut aux_weights = BTreeMap::new();
        for (name, v) in scheme.named_coefficients() {
            let text = format_decimal(v);
            if name.starts_with("wp") {
                aux_weights.insert(name, text);
            } else if name.starts_with('w') {
                weights.insert(name, text);
            } else {
                coefficients.insert(name, text);
            }
        }
        let free_params = scheme
            .scheme_id
            .free_param_names()
            .iter()
            .zip(scheme.free_params())
            .map(|(n, v)| (n.to_string(), format_decimal(v)))
            .collect();
        Self {
            scheme_id: scheme.scheme_id,
            free_params,
            coefficients,
            weights,
            aux_weights,
            provenance,
            meta,
        }
    }
}
