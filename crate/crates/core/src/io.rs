//! JSON file formats for varieties and coframes.
//!
//! ```json
//! { "variables": ["x1", "x2", "x3"], "f": "x1^4 + x2^4 + x3^4" }
//! { "variables": ["x1", "x2", "x3"], "base_point": ["0", "0", "0"],
//!   "matrix": [["1", "0", "0"], ["0", "1", "x1"], ["0", "0", "1"]] }
//! ```
//!
//! Numbers and rational functions are strings. Loading an emitted file
//! reproduces the object exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coframe::{Chart, Coframe};
use crate::cone::Hypersurface;
use crate::error::{Error, Result};
use crate::funcfield::{default_names, BigRational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietyFile {
    /// Defaults to `x1..xn`; then `n` is required.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub f: String,
}

impl VarietyFile {
    pub fn build(&self) -> Result<Hypersurface> {
        let vars = match (&self.variables, self.n) {
            (Some(v), Some(n)) if v.len() != n => {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                })
            }
            (Some(v), _) => v.clone(),
            (None, Some(n)) => default_names(n),
            (None, None) => return Err(Error::InvalidInput("variety needs `variables` or `n`".into())),
        };
        Hypersurface::parse_with(&self.f, vars)
    }

    pub fn from_hypersurface(z: &Hypersurface) -> Self {
        Self {
            variables: Some(z.variables().to_vec()),
            n: None,
            f: z.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoframeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    /// Defaults to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<String>>,
    pub matrix: Vec<Vec<String>>,
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    t.parse::<BigRational>()
        .map_err(|_| Error::InvalidInput(format!("`{s}` is not a rational number")))
}

impl CoframeFile {
    pub fn build(&self) -> Result<Coframe> {
        let n = self.matrix.len();
        let vars = self.variables.clone().unwrap_or_else(|| default_names(n));
        let base = match &self.base_point {
            Some(b) => b.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?,
            None => vec![BigRational::from_integer(0.into()); vars.len()],
        };
        let chart = Chart::new(vars, base)?;
        Coframe::from_strings(chart, &self.matrix)
    }

    pub fn from_coframe(c: &Coframe) -> Self {
        let names = c.chart().variables();
        Self {
            variables: Some(names.to_vec()),
            base_point: Some(c.chart().base_point().iter().map(|v| v.to_string()).collect()),
            matrix: c
                .matrix()
                .iter()
                .map(|row| row.iter().map(|e| e.display(names).to_string()).collect())
                .collect(),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn load_variety(path: &Path) -> Result<Hypersurface> {
    let v: VarietyFile = serde_json::from_str(&read(path)?)?;
    v.build()
}

pub fn load_coframe(path: &Path) -> Result<Coframe> {
    let c: CoframeFile = serde_json::from_str(&read(path)?)?;
    c.build()
}

pub fn variety_json(z: &Hypersurface) -> Result<String> {
    Ok(serde_json::to_string_pretty(&VarietyFile::from_hypersurface(z))?)
}

pub fn coframe_json(c: &Coframe) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CoframeFile::from_coframe(c))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn round_trip_emit_and_load() {
        for c in [
            models::flat(Chart::standard(3).unwrap()).unwrap(),
            models::rescaled_default(3).unwrap(),
            models::twisted_default(4).unwrap(),
            models::round_trip(3, 2).unwrap().coframe,
        ] {
            let text = coframe_json(&c).unwrap();
            let back: CoframeFile = serde_json::from_str(&text).unwrap();
            let c2 = back.build().unwrap();
            assert_eq!(c.matrix(), c2.matrix());
            assert_eq!(c.chart(), c2.chart());
        }
        let z = Hypersurface::fermat(3, 4).unwrap();
        let v: VarietyFile = serde_json::from_str(&variety_json(&z).unwrap()).unwrap();
        assert_eq!(v.build().unwrap(), z);
    }

    #[test]
    fn schema_errors() {
        assert!(serde_json::from_str::<CoframeFile>(r#"{"matrix": [], "extra": 1}"#).is_err());
        let v = VarietyFile {
            variables: None,
            n: None,
            f: "x1^2".into(),
        };
        assert!(matches!(v.build(), Err(Error::InvalidInput(_))));
        assert!(parse_rational("1/0x").is_err());
        assert_eq!(parse_rational(" -3/4 ").unwrap(), BigRational::new((-3).into(), 4.into()));
    }
}
