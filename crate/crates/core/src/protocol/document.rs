use serde::{Deserialize, Serialize};

use super::experiments::ExperimentSpec;
use crate::error::{Error, Result};

pub const DOCUMENT_VERSION: u32 = 1;

/// Versioned, self-describing JSON form of an [`ExperimentSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDocument {
    pub version: u32,
    #[serde(flatten)]
    pub experiment: ExperimentSpec,
}

impl ExperimentDocument {
    pub fn new(experiment: ExperimentSpec) -> Self {
        Self {
            version: DOCUMENT_VERSION,
            experiment,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        if doc.version != DOCUMENT_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported document version {}",
                doc.version
            )));
        }
        doc.experiment.validate()?;
        Ok(doc)
    }
}
