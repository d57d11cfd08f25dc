//! JSON instance and solution files.
//!
//! Instance files carry `n`, the full `distances` matrix, `requests` as
//! 1-based `[origin, destination]` pairs, `c`, `Q`, `w_pax`, `w_dist` and an
//! optional `name` of the form `<vehicles>-<requests>-<version>`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Instance, Solution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub distances: Vec<Vec<f64>>,
    pub requests: Vec<[usize; 2]>,
    pub c: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    pub w_pax: f64,
    pub w_dist: f64,
    /// Free-form origin information, e.g. the graph behind a gadget instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            name: inst.name.clone(),
            n: inst.stations(),
            distances: inst.distance_rows(),
            requests: inst
                .requests()
                .iter()
                .map(|r| [r.origin + 1, r.destination + 1])
                .collect(),
            c: inst.vehicles(),
            q: inst.capacity(),
            w_pax: inst.w_pax,
            w_dist: inst.w_dist,
            provenance: None,
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Instance> {
        if file.distances.len() != file.n {
            return Err(Error::InvalidInstance(format!(
                "n = {} but the distance matrix has {} rows",
                file.n,
                file.distances.len()
            )));
        }
        let requests = file
            .requests
            .iter()
            .map(|&[o, d]| {
                if o == 0 || d == 0 {
                    Err(Error::InvalidInstance("stations are numbered from 1".into()))
                } else {
                    Ok((o - 1, d - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut inst = Instance::new(file.distances, requests, file.c, file.q, file.w_pax, file.w_dist)?;
        inst.name = file.name;
        Ok(inst)
    }
}

pub fn instance_to_json(inst: &Instance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceFile::from(inst))?)
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.try_into()
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_json(&fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<Path>, inst: &Instance) -> Result<()> {
    fs::write(path, instance_to_json(inst)?)?;
    Ok(())
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<Solution> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_solution(path: impl AsRef<Path>, solution: &Solution) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(solution)?)?;
    Ok(())
}
