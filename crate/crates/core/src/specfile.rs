//! TOML description of a nonlinearity.
//!
//! ```toml
//! kind = "fk"
//! beta = 2.0
//! ```
//!
//! ```toml
//! kind = "affine-local"
//! theta = 0.5
//! shifts = [0.0, 1.0, -1.0]
//! coefficients = [-2.0, 1.0, 1.0]
//!
//! [local]
//! cos = [-2.0]
//! ```
//!
//! `[local]` takes either Fourier data (`constant`, `cos`, `sin`) or a
//! `table` of samples on `j / M`, optionally with `phase` and `offset`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{LocalFn, NonlinearitySpec, OperatorKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalSection>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
}

impl LocalSection {
    fn to_local(&self) -> Result<LocalFn> {
        let fourier = self.constant.is_some() || self.cos.is_some() || self.sin.is_some();
        match (&self.table, fourier) {
            (Some(_), true) => {
                Err(Error::Parse("[local] mixes `table` with Fourier coefficients".into()))
            }
            (Some(values), false) => {
                if values.len() < 2 {
                    return Err(Error::Parse("[local] table needs at least two samples".into()));
                }
                Ok(LocalFn::Table {
                    values: values.clone(),
                    phase: self.phase.unwrap_or(0.0),
                    offset: self.offset.unwrap_or(0.0),
                })
            }
            (None, _) => {
                if self.phase.is_some() || self.offset.is_some() {
                    return Err(Error::Parse("`phase`/`offset` only apply to a table".into()));
                }
                Ok(LocalFn::Fourier {
                    constant: self.constant.unwrap_or(0.0),
                    cos: self.cos.clone().unwrap_or_default(),
                    sin: self.sin.clone().unwrap_or_default(),
                })
            }
        }
    }

    fn from_local(local: &LocalFn) -> Self {
        match local {
            LocalFn::Fourier { constant, cos, sin } => LocalSection {
                constant: (*constant != 0.0).then_some(*constant),
                cos: Some(cos.clone()),
                sin: (!sin.is_empty()).then(|| sin.clone()),
                ..Default::default()
            },
            LocalFn::Table { values, phase, offset } => LocalSection {
                table: Some(values.clone()),
                phase: (*phase != 0.0).then_some(*phase),
                offset: (*offset != 0.0).then_some(*offset),
                ..Default::default()
            },
        }
    }
}

impl SpecFile {
    /// Builds and validates the spec; axiom failures name the axiom.
    pub fn build(&self) -> Result<NonlinearitySpec> {
        let spec = self.build_unchecked()?;
        spec.validate()?;
        Ok(spec)
    }

    /// Builds the spec without running the axiom checks, so that a caller
    /// can report every failing axiom instead of the first.
    pub fn build_unchecked(&self) -> Result<NonlinearitySpec> {
        match self.kind.as_str() {
            "fk" | "frenkel-kontorova" => {
                if self.shifts.is_some() || self.coefficients.is_some() || self.local.is_some() {
                    return Err(Error::Parse(
                        "kind = \"fk\" takes only `beta` (and optionally `theta = 0.5`)".into(),
                    ));
                }
                if let Some(t) = self.theta {
                    if t != 0.5 {
                        return Err(Error::Parse(format!("fk requires theta = 0.5, got {t}")));
                    }
                }
                let beta = self.beta.ok_or_else(|| Error::Parse("missing `beta`".into()))?;
                Ok(NonlinearitySpec::unchecked(
                    vec![0.0, 1.0, -1.0],
                    OperatorKind::FrenkelKontorova { beta },
                    0.5,
                    0.0,
                ))
            }
            "affine-local" => {
                if self.beta.is_some() {
                    return Err(Error::Parse("`beta` only applies to kind = \"fk\"".into()));
                }
                let theta = self.theta.ok_or_else(|| Error::Parse("missing `theta`".into()))?;
                let shifts = self.shifts.clone().ok_or_else(|| Error::Parse("missing `shifts`".into()))?;
                let coefficients = self
                    .coefficients
                    .clone()
                    .ok_or_else(|| Error::Parse("missing `coefficients`".into()))?;
                let local = self
                    .local
                    .as_ref()
                    .ok_or_else(|| Error::Parse("missing [local] section".into()))?
                    .to_local()?;
                Ok(NonlinearitySpec::unchecked(
                    shifts,
                    OperatorKind::AffineLocal { coefficients, local },
                    theta,
                    self.origin.unwrap_or(0.0),
                ))
            }
            other => Err(Error::Parse(format!(
                "unknown kind {other:?}; expected \"fk\" or \"affine-local\""
            ))),
        }
    }

    pub fn from_spec(spec: &NonlinearitySpec) -> Self {
        match spec.kind() {
            OperatorKind::FrenkelKontorova { beta } => SpecFile {
                kind: "fk".into(),
                beta: Some(*beta),
                theta: None,
                origin: None,
                shifts: None,
                coefficients: None,
                local: None,
            },
            OperatorKind::AffineLocal { coefficients, local } => SpecFile {
                kind: "affine-local".into(),
                beta: None,
                theta: Some(spec.theta()),
                origin: (spec.origin() != 0.0).then_some(spec.origin()),
                shifts: Some(spec.shifts().to_vec()),
                coefficients: Some(coefficients.clone()),
                local: Some(LocalSection::from_local(local)),
            },
        }
    }
}

pub fn parse_spec(text: &str) -> Result<NonlinearitySpec> {
    let file: SpecFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.build()
}

pub fn load_spec(path: &Path) -> Result<NonlinearitySpec> {
    let spec = load_spec_unchecked(path)?;
    spec.validate()?;
    Ok(spec)
}

/// Parses a spec file without the axiom checks.
pub fn load_spec_unchecked(path: &Path) -> Result<NonlinearitySpec> {
    let text = std::fs::read_to_string(path)?;
    let file: SpecFile = toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    file.build_unchecked()
}

pub fn to_toml_string(spec: &NonlinearitySpec) -> String {
    toml::to_string(&SpecFile::from_spec(spec)).expect("spec file serializes")
}
