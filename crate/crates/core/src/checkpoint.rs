//! Checkpoint format: a JSON manifest (array names and shapes, training
//! hyperparameters, vocabulary hash, seed) next to a flat little-endian
//! 64-bit float blob holding every array in manifest order. The embedding
//! table is included so a checkpoint is self-contained for evaluation.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{ModelDims, ModelParams};
use crate::netcore::ParamGroup;
use crate::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrayInfo {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointManifest {
    pub tool_version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub vocab_sha256: String,
    pub dims: ModelDims,
    pub publications: Vec<String>,
    pub arrays: Vec<ArrayInfo>,
}

pub struct Checkpoint {
    pub manifest: CheckpointManifest,
    pub params: ModelParams,
    pub embeddings: EmbeddingMatrix,
}

/// Appends rather than `Path::with_extension`, which would truncate
/// prefixes containing a dot (e.g. "model_lambda_0.2").
fn append_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut os = prefix.as_os_str().to_owned();
    os.push(".");
    os.push(ext);
    PathBuf::from(os)
}

pub fn manifest_path(prefix: &Path) -> PathBuf {
    append_extension(prefix, "json")
}

pub fn blob_path(prefix: &Path) -> PathBuf {
    append_extension(prefix, "bin")
}

/// Arrays in canonical order: extractor, satire head, publication head,
/// embedding table.
fn canonical_arrays<'a>(
    params: &'a ModelParams,
    embeddings: &'a EmbeddingMatrix,
) -> Vec<(String, &'a Matrix<Scalar>)> {
    let mut arrays: Vec<(String, &Matrix<Scalar>)> = Vec::new();
    for (name, m) in params.extractor.entries() {
        arrays.push((format!("extractor.{name}"), m));
    }
    for (name, m) in params.satire.entries() {
        arrays.push((format!("satire.{name}"), m));
    }
    for (name, m) in params.publication.entries() {
        arrays.push((format!("publication.{name}"), m));
    }
    arrays.push(("embedding".to_string(), &embeddings.vectors));
    arrays
}

pub fn save_checkpoint(
    prefix: &Path,
    params: &ModelParams,
    embeddings: &EmbeddingMatrix,
    seed: u64,
    config: serde_json::Value,
    vocab_sha256: &str,
    publications: &[String],
) -> Result<()> {
    let arrays = canonical_arrays(params, embeddings);
    let manifest = CheckpointManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config,
        vocab_sha256: vocab_sha256.to_string(),
        dims: params.dims,
        publications: publications.to_vec(),
        arrays: arrays
            .iter()
            .map(|(name, m)| ArrayInfo {
                name: name.clone(),
                rows: m.rows(),
                cols: m.cols(),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(manifest_path(prefix), json)?;

    let mut blob = std::io::BufWriter::new(std::fs::File::create(blob_path(prefix))?);
    for (_, m) in &arrays {
        for &v in m.as_slice() {
            blob.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load_checkpoint(prefix: &Path) -> Result<Checkpoint> {
    let json = std::fs::read_to_string(manifest_path(prefix))?;
    let manifest: CheckpointManifest = serde_json::from_str(&json)?;
    let dims = manifest.dims;
    let mut params = ModelParams {
        dims,
        extractor: crate::model::FeatureExtractorParams::zeros(&dims),
        satire: crate::model::HeadParams::zeros(2, dims.state_size()),
        publication: crate::model::HeadParams::zeros(dims.publications, dims.state_size()),
    };
    let mut embeddings = EmbeddingMatrix::zeros(0, dims.embedding);

    let mut blob = std::io::BufReader::new(std::fs::File::open(blob_path(prefix))?);
    let mut read_array = |info: &ArrayInfo, target: Option<&mut Matrix<Scalar>>| -> Result<Option<Matrix<Scalar>>> {
        let n = info.rows * info.cols;
        let mut buf = vec![0u8; n * 8];
        blob.read_exact(&mut buf)
            .map_err(|_| Error::Checkpoint(format!("blob truncated at array {}", info.name)))?;
        let values: Vec<Scalar> = buf
            .chunks_exact(8)
            .map(|c| Scalar::from_le_bytes(c.try_into().unwrap()))
            .collect();
        match target {
            Some(m) => {
                m.check_shape(info.rows, info.cols).map_err(|_| {
                    Error::Checkpoint(format!(
                        "array {} has shape {}x{}, expected {}x{}",
                        info.name,
                        info.rows,
                        info.cols,
                        m.rows(),
                        m.cols()
                    ))
                })?;
                m.as_mut_slice().copy_from_slice(&values);
                Ok(None)
            }
            None => Ok(Some(Matrix::from_vec(info.rows, info.cols, values))),
        }
    };

    for info in &manifest.arrays {
        if info.name == "embedding" {
            let m = read_array(info, None)?.unwrap();
            if m.cols() != dims.embedding {
                return Err(Error::Checkpoint(format!(
                    "embedding dimension {} does not match manifest dims {}",
                    m.cols(),
                    dims.embedding
                )));
            }
            embeddings = EmbeddingMatrix { dim: m.cols(), vectors: m };
            continue;
        }
        let (group, field) = info
            .name
            .split_once('.')
            .ok_or_else(|| Error::Checkpoint(format!("unknown array {}", info.name)))?;
        let target = match group {
            "extractor" => params
                .extractor
                .entries_mut()
                .into_iter()
                .find(|(n, _)| *n == field)
                .map(|(_, m)| m),
            "satire" => params
                .satire
                .entries_mut()
                .into_iter()
                .find(|(n, _)| *n == field)
                .map(|(_, m)| m),
            "publication" => params
                .publication
                .entries_mut()
                .into_iter()
                .find(|(n, _)| *n == field)
                .map(|(_, m)| m),
            _ => None,
        };
        let target =
            target.ok_or_else(|| Error::Checkpoint(format!("unknown array {}", info.name)))?;
        read_array(info, Some(target))?;
    }
    if embeddings.vocab_size() == 0 {
        return Err(Error::Checkpoint("missing embedding array".into()));
    }
    Ok(Checkpoint { manifest, params, embeddings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelDims;

    fn sample() -> (ModelParams, EmbeddingMatrix) {
        let dims = ModelDims { embedding: 4, hidden: 3, attention: 5, publications: 4 };
        let mut rng = crate::rng::stream(3, "ckpt-test");
        let params = ModelParams::init(dims, &mut rng);
        let mut e = EmbeddingMatrix::zeros(9, 4);
        crate::netcore::init_uniform(&mut e.vectors, &mut rng, 0.5);
        (params, e)
    }

    #[test]
    fn roundtrip_is_exact() {
        let (params, e) = sample();
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("ckpt");
        let pubs: Vec<String> = (0..4).map(|i| format!("p{i}")).collect();
        save_checkpoint(&prefix, &params, &e, 7, serde_json::json!({"lambda": 0.2}), "hash", &pubs)
            .unwrap();
        let loaded = load_checkpoint(&prefix).unwrap();
        assert_eq!(loaded.manifest.seed, 7);
        assert_eq!(loaded.manifest.publications, pubs);
        for ((_, a), (_, b)) in loaded
            .params
            .extractor
            .entries()
            .into_iter()
            .zip(params.extractor.entries())
        {
            assert_eq!(a, b);
        }
        assert_eq!(loaded.params.satire.w, params.satire.w);
        assert_eq!(loaded.params.publication.w, params.publication.w);
        assert_eq!(loaded.embeddings.vectors, e.vectors);
    }

    #[test]
    fn shape_mismatch_is_detected() {
        let (params, e) = sample();
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("ckpt");
        save_checkpoint(&prefix, &params, &e, 7, serde_json::json!({}), "h", &[]).unwrap();
        // Corrupt one recorded shape in the manifest.
        let mpath = prefix.with_extension("json");
        let text = std::fs::read_to_string(&mpath).unwrap();
        let mut manifest: CheckpointManifest = serde_json::from_str(&text).unwrap();
        manifest.arrays[0].rows += 1;
        std::fs::write(&mpath, serde_json::to_string(&manifest).unwrap()).unwrap();
        assert!(load_checkpoint(&prefix).is_err());
    }

    #[test]
    fn truncated_blob_is_detected() {
        let (params, e) = sample();
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("ckpt");
        save_checkpoint(&prefix, &params, &e, 7, serde_json::json!({}), "h", &[]).unwrap();
        let bpath = prefix.with_extension("bin");
        let blob = std::fs::read(&bpath).unwrap();
        std::fs::write(&bpath, &blob[..blob.len() - 8]).unwrap();
        assert!(load_checkpoint(&prefix).is_err());
    }
}
