//! Model files: versioned TOML, one `[[component]]` table per component.
//!
//! ```toml
//! format = "figmn-model"
//! version = 2
//!
//! [config]
//! beta = 0.1
//! sigma_ini = [0.09, 0.09, 25.0]
//! # ...
//!
//! [[component]]
//! mean = [0.41, 0.52, -3.0]
//! precision = [11.1, 0.0, 0.0, 11.1, 0.0, 0.04]  # upper triangle, row major
//! cov_det = 1.6e-3
//! sp = 12.5
//! age = 40
//! prior = 1.0
//! ```
//!
//! Floats are written in shortest round-trip form, so a reloaded model
//! reproduces every parameter bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SquareMatrix;

use super::component::GaussianComponent;
use super::mixture::{Mixture, MixtureConfig};

pub const FORMAT_TAG: &str = "figmn-model";
pub const FORMAT_VERSION: u32 = 2;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    version: u32,
    config: MixtureConfig,
    #[serde(default, rename = "component")]
    components: Vec<ComponentRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentRecord {
    mean: Vec<f64>,
    precision: Vec<f64>,
    cov_det: f64,
    sp: f64,
    age: u64,
    prior: f64,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

pub fn write_model<W: Write>(model: &Mixture, mut out: W) -> Result<()> {
    let file = ModelFile {
        format: FORMAT_TAG.to_string(),
        version: FORMAT_VERSION,
        config: model.config().clone(),
        components: model
            .components()
            .iter()
            .map(|c| ComponentRecord {
                mean: c.mean().to_vec(),
                precision: c.precision().upper_triangle(),
                cov_det: c.cov_det(),
                sp: c.sp(),
                age: c.age(),
                prior: c.prior(),
            })
            .collect(),
    };
    let text = toml::to_string(&file).map_err(parse_err)?;
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn save_model(model: &Mixture, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    write_model(model, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<Mixture> {
    read_model(std::fs::File::open(path)?)
}

pub fn read_model<R: Read>(mut reader: R) -> Result<Mixture> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let file: ModelFile = toml::from_str(&text).map_err(parse_err)?;
    if file.format != FORMAT_TAG {
        return Err(Error::Parse(format!("not a model file (format `{}`)", file.format)));
    }
    if file.version != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported model version {}", file.version)));
    }
    file.config.validate().map_err(parse_err)?;
    let dim = file.config.dim();
    let components = file
        .components
        .into_iter()
        .map(|r| {
            if r.mean.len() != dim {
                return Err(Error::Parse(format!("mean has {} entries, dim is {dim}", r.mean.len())));
            }
            let precision = SquareMatrix::from_upper_triangle(dim, &r.precision)
                .map_err(|_| Error::Parse("precision triangle has wrong length".into()))?;
            let mut comp = GaussianComponent::new(r.mean, precision, r.cov_det)?;
            comp.sp = r.sp;
            comp.age = r.age;
            comp.prior = r.prior;
            Ok(comp)
        })
        .collect::<Result<Vec<_>>>()?;
    Mixture::from_parts(file.config, components)
}
