//! The JSON model file: lattice dimension, rays, named nef partitions and
//! named amenable collections, plus the built-in instance generators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::laurent::ExpVec;
use crate::mirror::AmenableCollection;
use crate::toric::{validate_rays, IndexSet, NefPartition, ToricModel};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct AmenableSpec {
    pub vectors: Vec<Vec<i64>>,
    pub distinguished: Vec<usize>,
}

/// On-disk model document. Ray indices are 1-based throughout.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ModelFile {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    #[serde(default)]
    pub partitions: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub amenable: BTreeMap<String, AmenableSpec>,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model file: {e}")))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization")
    }

    /// Hex digest of the canonical (sorted-key, compact) JSON form; binds
    /// certificates to the model file they were produced from.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("model to value");
        let canonical = serde_json::to_string(&value).expect("canonical json");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex_digest(hasher)
    }

    /// Validation issues across the whole document; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let rays: Vec<ExpVec> = self.rays.iter().map(|r| ExpVec::new(r.clone())).collect();
        let mut issues = validate_rays(self.dim, &rays);
        let num_rays = self.rays.len();
        for (name, parts) in &self.partitions {
            let sets: Vec<IndexSet> = parts.iter().map(|p| p.iter().copied().collect()).collect();
            for (i, (list, set)) in parts.iter().zip(&sets).enumerate() {
                if list.len() != set.len() {
                    issues.push(format!("partition `{name}` part {} repeats an index", i + 1));
                }
            }
            if let Err(e) = NefPartition::new(sets, num_rays) {
                issues.push(format!("partition `{name}`: {e}"));
            }
        }
        for (name, spec) in &self.amenable {
            for v in &spec.vectors {
                if v.len() != self.dim {
                    issues.push(format!(
                        "amenable `{name}`: vector length {} (expected {})",
                        v.len(),
                        self.dim
                    ));
                }
            }
            for &s in &spec.distinguished {
                if s == 0 || s > num_rays {
                    issues.push(format!("amenable `{name}`: distinguished ray {s} out of range"));
                }
            }
        }
        issues
    }

    pub fn model(&self) -> Result<ToricModel, Error> {
        let rays: Vec<ExpVec> = self.rays.iter().map(|r| ExpVec::new(r.clone())).collect();
        ToricModel::new(self.dim, rays)
    }

    pub fn partition(&self, name: &str) -> Result<NefPartition, Error> {
        let parts = self.partitions.get(name).ok_or_else(|| {
            Error::InvalidInput(format!(
                "no partition named `{name}` (have: {})",
                self.partitions
                    .keys()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })?;
        let sets: Vec<IndexSet> = parts.iter().map(|p| p.iter().copied().collect()).collect();
        for (i, (list, set)) in parts.iter().zip(&sets).enumerate() {
            if list.len() != set.len() {
                return Err(Error::InvalidInput(format!(
                    "partition `{name}` part {} repeats an index",
                    i + 1
                )));
            }
        }
        NefPartition::new(sets, self.rays.len())
    }

    pub fn amenable_collection(&self, name: &str) -> Result<AmenableCollection, Error> {
        let spec = self.amenable.get(name).ok_or_else(|| {
            Error::InvalidInput(format!(
                "no amenable collection named `{name}` (have: {})",
                self.amenable.keys().cloned().collect::<Vec<_>>().join(", ")
            ))
        })?;
        Ok(AmenableCollection {
            vectors: spec.vectors.iter().map(|v| ExpVec::new(v.clone())).collect(),
            distinguished: spec.distinguished.clone(),
        })
    }
}

pub fn hex_digest(hasher: Sha256) -> String {
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn projective_space_rays(n: usize) -> Vec<Vec<i64>> {
    let mut rays = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        rays.push(e);
    }
    rays.push(vec![-1; n]);
    rays
}

/// Built-in generators. `pn <n>` emits the standard rank-n model with n + 1
/// rays; n = 3, 4, 5 also carry the documented example partitions (the
/// degree-2 pair, the cubic with amenable data, the (2,2) pair with
/// amenable data). `product <pa> <pb> ..` emits a product of such models.
pub fn generate_builtin(name: &str, params: &[String]) -> Result<ModelFile, Error> {
    match name {
        "pn" => {
            let n: usize = params
                .first()
                .ok_or_else(|| Error::InvalidInput("pn requires a dimension".into()))?
                .parse()
                .map_err(|_| Error::InvalidInput("pn requires an integer dimension".into()))?;
            if n == 0 {
                return Err(Error::InvalidInput("pn requires dimension >= 1".into()));
            }
            let mut file = ModelFile {
                dim: n,
                rays: projective_space_rays(n),
                partitions: BTreeMap::new(),
                amenable: BTreeMap::new(),
            };
            file.partitions
                .insert("all".into(), vec![(1..=n + 1).collect()]);
            match n {
                3 => {
                    file.partitions
                        .insert("a".into(), vec![vec![1, 2], vec![3, 4]]);
                    file.partitions
                        .insert("b".into(), vec![vec![3, 4], vec![1, 2]]);
                }
                4 => {
                    file.partitions
                        .insert("cubic".into(), vec![vec![1, 2, 3], vec![4, 5]]);
                    file.partitions
                        .insert("cubic-alt".into(), vec![vec![3, 4, 5], vec![1, 2]]);
                    file.amenable.insert(
                        "cubic-u".into(),
                        AmenableSpec {
                            vectors: vec![vec![-1, -1, -1, 0]],
                            distinguished: vec![1],
                        },
                    );
                    file.amenable.insert(
                        "cubic-alt-u".into(),
                        AmenableSpec {
                            vectors: vec![vec![2, 1, -1, -1]],
                            distinguished: vec![3],
                        },
                    );
                }
                5 => {
                    file.partitions
                        .insert("a".into(), vec![vec![1, 2], vec![3, 4], vec![5, 6]]);
                    file.partitions
                        .insert("b".into(), vec![vec![1, 6], vec![2, 5], vec![3, 4]]);
                    file.amenable.insert(
                        "a-u".into(),
                        AmenableSpec {
                            vectors: vec![vec![-1, -1, 0, 0, 0], vec![0, 0, -1, -1, 0]],
                            distinguished: vec![1, 3],
                        },
                    );
                    file.amenable.insert(
                        "b-u".into(),
                        AmenableSpec {
                            vectors: vec![vec![-1, 1, 0, 0, 1], vec![0, -1, 1, 1, -1]],
                            distinguished: vec![1, 2],
                        },
                    );
                }
                _ => {}
            }
            Ok(file)
        }
        "product" => {
            if params.len() < 2 {
                return Err(Error::InvalidInput(
                    "product requires at least two factors, e.g. `product p1 p1`".into(),
                ));
            }
            let mut dims = Vec::new();
            for p in params {
                let d: usize = p
                    .strip_prefix('p')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("bad product factor `{p}` (expected pN)"))
                    })?;
                if d == 0 {
                    return Err(Error::InvalidInput(
                        "product factors need dimension >= 1".into(),
                    ));
                }
                dims.push(d);
            }
            let dim: usize = dims.iter().sum();
            let mut rays: Vec<Vec<i64>> = Vec::new();
            let mut offset = 0;
            for &d in &dims {
                for i in 0..d {
                    let mut e = vec![0i64; dim];
                    e[offset + i] = 1;
                    rays.push(e);
                }
                let mut last = vec![0i64; dim];
                for i in 0..d {
                    last[offset + i] = -1;
                }
                rays.push(last);
                offset += d;
            }
            let mut file = ModelFile {
                dim,
                rays,
                partitions: BTreeMap::new(),
                amenable: BTreeMap::new(),
            };
            file.partitions
                .insert("all".into(), vec![(1..=file.rays.len()).collect()]);
            if dims == [1, 1] {
                // rays: e1, -e1, e2, -e2; the two anti-diagonal joins have
                // equal class (1,1)
                file.partitions
                    .insert("a".into(), vec![vec![1, 3], vec![2, 4]]);
                file.partitions
                    .insert("b".into(), vec![vec![2, 4], vec![1, 3]]);
            }
            Ok(file)
        }
        other => Err(Error::InvalidInput(format!(
            "unknown generator `{other}` (available: pn, product)"
        ))),
    }
}
