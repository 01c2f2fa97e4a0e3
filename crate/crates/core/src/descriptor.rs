//! The versioned JSON code descriptor shared by all CLI commands.
//!
//! ```json
//! {"version": 1, "q": 17, "n": 14, "H": [[1, 1, ...], ...],
//!  "profile": [{"indices": [0, 1, 2, 3, 4, 5], "r": 2, "delta": 2}, ...],
//!  "metadata": {"construction": {...}, "groups": [[0, 1, 2], ...], "certificate": {...}}}
//! ```
//!
//! `profile` and `metadata` are optional.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, LinearCode, LocalityProfile};
use crate::construct::{ConstructionCertificate, ConstructionOutput, ConstructionParams};
use crate::field::{FieldError, FieldSpec};
use crate::linalg::{LinalgError, Matrix};

pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("malformed descriptor: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported descriptor version {0} (expected {VERSION})")]
    Version(u32),
    #[error("descriptor says n = {n} but H has {cols} columns")]
    Length { n: usize, cols: usize },
    #[error("descriptor has no locality profile")]
    NoProfile,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionParams>,
    /// Local repair groups, tried first when certifying the profile.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ConstructionCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub version: u32,
    pub q: u32,
    pub n: usize,
    #[serde(rename = "H")]
    pub h: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<LocalityProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl CodeDescriptor {
    pub fn from_code(code: &LinearCode, profile: Option<LocalityProfile>) -> Self {
        CodeDescriptor {
            version: VERSION,
            q: code.field().q(),
            n: code.n(),
            h: code.parity_check().to_rows(),
            profile,
            metadata: None,
        }
    }

    pub fn from_construction(out: &ConstructionOutput) -> Self {
        let mut d = CodeDescriptor::from_code(&out.code, Some(out.profile.clone()));
        d.metadata = Some(Metadata {
            construction: Some(out.params.clone()),
            groups: out.groups.iter().map(|g| g.1.clone()).collect(),
            certificate: Some(out.certificate.clone()),
        });
        d
    }

    /// Parses and checks the version, field, shape and profile.
    pub fn from_json(s: &str) -> Result<Self, DescriptorError> {
        let d: CodeDescriptor = serde_json::from_str(s)?;
        if d.version != VERSION {
            return Err(DescriptorError::Version(d.version));
        }
        d.matrix()?;
        if let Some(p) = &d.profile {
            p.validate(d.n)?;
        }
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn field(&self) -> Result<FieldSpec, DescriptorError> {
        Ok(FieldSpec::new(self.q)?)
    }

    fn matrix(&self) -> Result<Matrix, DescriptorError> {
        if let Some(row) = self.h.iter().find(|r| r.len() != self.n) {
            return Err(DescriptorError::Length { n: self.n, cols: row.len() });
        }
        Ok(Matrix::from_rows_with_cols(self.field()?, self.n, &self.h)?)
    }

    pub fn code(&self) -> Result<LinearCode, DescriptorError> {
        Ok(LinearCode::from_parity_check(self.matrix()?)?)
    }

    pub fn require_profile(&self) -> Result<&LocalityProfile, DescriptorError> {
        self.profile.as_ref().ok_or(DescriptorError::NoProfile)
    }

    pub fn hints(&self) -> &[Vec<usize>] {
        self.metadata.as_ref().map_or(&[], |m| &m.groups)
    }

    pub fn certificate(&self) -> Option<&ConstructionCertificate> {
        self.metadata.as_ref().and_then(|m| m.certificate.as_ref())
    }
}
