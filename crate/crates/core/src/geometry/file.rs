//! JSON section definition files.

use std::path::Path;

use serde::Deserialize;

use super::{Material, SectionSpec, Shape};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionFile {
    name: String,
    shape: Shape,
    material: MaterialInput,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MaterialInput {
    Shear(ShearInput),
    Young(YoungInput),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShearInput {
    #[serde(rename = "G")]
    g: f64,
    nu: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct YoungInput {
    #[serde(rename = "E")]
    e: f64,
    nu: f64,
}

pub fn parse_section(text: &str) -> Result<SectionSpec> {
    let file: SectionFile = serde_json::from_str(text)?;
    let material = match file.material {
        MaterialInput::Shear(m) => Material::new(m.g, m.nu)?,
        MaterialInput::Young(m) => Material::from_young(m.e, m.nu)?,
    };
    SectionSpec::new(file.name, file.shape, material)
}

pub fn load_section(path: impl AsRef<Path>) -> Result<SectionSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
    parse_section(&text).map_err(|e| match e {
        Error::Json(source) => Error::Parse { path: path.to_path_buf(), source },
        other => other.context(format!("section {}", path.display())),
    })
}
