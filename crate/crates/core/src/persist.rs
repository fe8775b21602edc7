//! Versioned JSON model files.
//!
//! The document embeds the training points in full precision, so a loaded
//! model predicts exactly like the one that was saved.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WfrError};
use crate::model::ModelState;
use crate::resemblance::NormalizationBounds;
use crate::types::{Dataset, Labels, ResemblanceConfig};

pub const FORMAT_NAME: &str = "wfr-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    version: u32,
    resemblance: ResemblanceConfig,
    k: usize,
    tau: f64,
    r_min: f64,
    r_max: f64,
    dimension: usize,
    points: Vec<Vec<f64>>,
    labels: Labels,
}

pub fn to_json(model: &ModelState) -> String {
    let train = model.train();
    let file = ModelFile {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        resemblance: *model.resemblance(),
        k: model.k(),
        tau: model.tau(),
        r_min: model.bounds().r_min,
        r_max: model.bounds().r_max,
        dimension: train.d(),
        points: train.rows().map(<[f64]>::to_vec).collect(),
        labels: model.labels().clone(),
    };
    serde_json::to_string_pretty(&file).expect("model serializes")
}

pub fn from_json(text: &str) -> Result<ModelState> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| WfrError::Model(e.to_string()))?;
    if file.format != FORMAT_NAME {
        return Err(WfrError::Model(format!("unknown format `{}`", file.format)));
    }
    if file.version != FORMAT_VERSION {
        return Err(WfrError::Model(format!(
            "unsupported version {} (expected {FORMAT_VERSION})",
            file.version
        )));
    }
    if let Some((row, p)) = file
        .points
        .iter()
        .enumerate()
        .find(|(_, p)| p.len() != file.dimension)
    {
        return Err(WfrError::Model(format!(
            "point {row} has {} values, expected {}",
            p.len(),
            file.dimension
        )));
    }
    let labels = Labels::new(file.labels.into_vec())?;
    let train = Dataset::from_rows(&file.points)?;
    ModelState::new(
        train,
        labels,
        file.resemblance,
        file.k,
        file.tau,
        NormalizationBounds::new(file.r_min, file.r_max)?,
    )
}

pub fn save_model(path: &Path, model: &ModelState) -> Result<()> {
    std::fs::write(path, to_json(model)).map_err(|source| WfrError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<ModelState> {
    let text = std::fs::read_to_string(path).map_err(|source| WfrError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json(&text).map_err(|e| match e {
        WfrError::Model(msg) => WfrError::Model(format!("{}: {msg}", path.display())),
        other => other,
    })
}
