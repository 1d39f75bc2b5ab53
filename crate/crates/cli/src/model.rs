//! JSON model files.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;

use relimp::lifetime::{LifetimeDistribution, LifetimeModel};
use relimp::{ProbabilityVector, StructureFunction};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    structure: Option<String>,
    /// Truth table as a 0/1 string, bit-indexed by state.
    table: Option<String>,
    components: Vec<RawComponent>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    id: usize,
    p: Option<f64>,
    dist: Option<LifetimeDistribution>,
}

pub enum Components {
    Binary(ProbabilityVector),
    Lifetime(Vec<LifetimeDistribution>),
}

pub struct Model {
    pub sf: StructureFunction,
    pub components: Components,
}

impl Model {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let raw: RawModel = serde_json::from_str(text)?;
        let sf = match (&raw.structure, &raw.table) {
            (Some(expr), None) => StructureFunction::from_expression(expr).context("field \"structure\"")?,
            (None, Some(table)) => StructureFunction::from_table_str(table).context("field \"table\"")?,
            (Some(_), Some(_)) => bail!("give either \"structure\" or \"table\", not both"),
            (None, None) => bail!("missing field \"structure\" (or \"table\")"),
        };
        if raw.components.is_empty() {
            bail!("field \"components\": list is empty");
        }
        let n = sf.n();
        if raw.components.len() != n {
            bail!("field \"components\": structure has {n} components, list has {}", raw.components.len());
        }
        let mut slots: Vec<Option<&RawComponent>> = vec![None; n];
        for (k, c) in raw.components.iter().enumerate() {
            if c.id == 0 || c.id > n {
                bail!("components[{k}].id: {} is outside 1..={n}", c.id);
            }
            if slots[c.id - 1].replace(c).is_some() {
                bail!("components[{k}].id: duplicate id {}", c.id);
            }
        }
        let ordered: Vec<&RawComponent> = slots.into_iter().map(|c| c.expect("ids cover 1..=n")).collect();
        let components = match (ordered[0].p.is_some(), ordered[0].dist.is_some()) {
            (true, false) => {
                let p = ordered
                    .iter()
                    .map(|c| c.p.filter(|_| c.dist.is_none()).ok_or_else(|| mixed(c.id)))
                    .collect::<anyhow::Result<Vec<f64>>>()?;
                Components::Binary(ProbabilityVector::new(p)?)
            }
            (false, true) => Components::Lifetime(
                ordered
                    .iter()
                    .map(|c| c.dist.clone().filter(|_| c.p.is_none()).ok_or_else(|| mixed(c.id)))
                    .collect::<anyhow::Result<_>>()?,
            ),
            _ => return Err(mixed(ordered[0].id)),
        };
        Ok(Self { sf, components })
    }

    pub fn binary(&self) -> anyhow::Result<&ProbabilityVector> {
        match &self.components {
            Components::Binary(p) => Ok(p),
            Components::Lifetime(_) => bail!("this command needs \"p\" for every component, found \"dist\""),
        }
    }

    pub fn lifetime(&self) -> anyhow::Result<LifetimeModel> {
        match &self.components {
            Components::Lifetime(d) => Ok(LifetimeModel::new(self.sf.clone(), d.clone())?),
            Components::Binary(_) => bail!("this command needs \"dist\" for every component, found \"p\""),
        }
    }
}

fn mixed(id: usize) -> anyhow::Error {
    anyhow!("component {id}: every component needs exactly one of \"p\" or \"dist\", uniformly across the file")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_and_lifetime_files() {
        let m = Model::parse(r#"{"structure": "series(1,2)", "components": [{"id": 2, "p": 0.4}, {"id": 1, "p": 0.9}]}"#)
            .unwrap();
        assert_eq!(m.binary().unwrap().as_slice(), &[0.9, 0.4]);
        let m = Model::parse(
            r#"{"table": "0001", "components": [{"id": 1, "dist": {"exponential": {"rate": 2}}},
                {"id": 2, "dist": {"weibull": {"shape": 1.5, "scale": 1}}}]}"#,
        )
        .unwrap();
        assert_eq!(m.lifetime().unwrap().n(), 2);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            r#"{"structure": "series(1,2)", "components": []}"#,
            r#"{"structure": "series(1,2)", "components": [{"id": 1, "p": 0.5}]}"#,
            r#"{"structure": "series(1,2)", "components": [{"id": 1, "p": 0.5}, {"id": 1, "p": 0.5}]}"#,
            r#"{"structure": "series(1,2)", "components": [{"id": 1, "p": 0.5}, {"id": 2, "dist": {"exponential": {"rate": 1}}}]}"#,
            r#"{"structure": "series(1,2)", "components": [{"id": 1, "p": 1.5}, {"id": 2, "p": 0.5}]}"#,
            r#"{"components": [{"id": 1, "p": 0.5}]}"#,
            r#"{"structure": "series(1,", "components": [{"id": 1, "p": 0.5}]}"#,
        ] {
            assert!(Model::parse(text).is_err(), "{text}");
        }
    }
}
