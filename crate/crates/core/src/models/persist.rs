//! Model container (little endian):
//!
//! ```text
//! magic      8 bytes  "MBTIMODL"
//! version    u32
//! algorithm  u8
//! length     u64      payload bytes
//! checksum   32 bytes SHA-256 of the payload
//! payload    JSON of the trained model
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{ClassifierModel, ModelError};

const MAGIC: &[u8; 8] = b"MBTIMODL";
pub const MODEL_SCHEMA_VERSION: u32 = 1;

pub fn write_model(model: &ClassifierModel, out: &mut impl Write) -> Result<(), ModelError> {
    let payload = serde_json::to_vec(model).map_err(|e| ModelError::CorruptModel(e.to_string()))?;
    out.write_all(MAGIC)?;
    out.write_all(&MODEL_SCHEMA_VERSION.to_le_bytes())?;
    out.write_all(&[model.spec.algorithm.tag()])?;
    out.write_all(&(payload.len() as u64).to_le_bytes())?;
    out.write_all(&Sha256::digest(&payload))?;
    out.write_all(&payload)?;
    Ok(())
}

fn corrupt(msg: impl Into<String>) -> ModelError {
    ModelError::CorruptModel(msg.into())
}

pub fn read_model(r: &mut impl Read) -> Result<ClassifierModel, ModelError> {
    let mut header = [0u8; 8 + 4 + 1 + 8 + 32];
    r.read_exact(&mut header).map_err(|_| corrupt("truncated header"))?;
    if &header[..8] != MAGIC {
        return Err(corrupt("bad magic bytes"));
    }
    let version = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes"));
    if version != MODEL_SCHEMA_VERSION {
        return Err(ModelError::VersionMismatch { found: version, expected: MODEL_SCHEMA_VERSION });
    }
    let tag = header[12];
    let len = u64::from_le_bytes(header[13..21].try_into().expect("8 bytes"));
    let mut payload = Vec::new();
    r.take(len).read_to_end(&mut payload)?;
    if payload.len() as u64 != len {
        return Err(corrupt("truncated payload"));
    }
    if Sha256::digest(&payload)[..] != header[21..53] {
        return Err(corrupt("checksum mismatch"));
    }
    let model: ClassifierModel = serde_json::from_slice(&payload).map_err(|e| corrupt(e.to_string()))?;
    if model.spec.algorithm.tag() != tag {
        return Err(corrupt("algorithm tag disagrees with payload"));
    }
    Ok(model)
}

pub fn save_model(model: &ClassifierModel, path: &Path) -> Result<(), ModelError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_model(model, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ClassifierModel, ModelError> {
    read_model(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::super::{train_classifier, Algorithm, ClassifierSpec};
    use super::*;

    fn bytes(alg: Algorithm) -> (ClassifierModel, Vec<u8>) {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![(i % 3) as f64 * 0.37, (i % 2) as f64 + 0.1]).collect();
        let y: Vec<String> = (0..12).map(|i| format!("L{}", i % 3)).collect();
        let spec = ClassifierSpec::new(alg).with_seed(3);
        let spec = match alg {
            Algorithm::Mlp => spec.with("hidden", vec![4]).with("epochs", 2),
            Algorithm::RandomForest => spec.with("n_trees", 3),
            _ => spec,
        };
        let m = train_classifier(&spec, &x, &y).unwrap();
        let mut buf = Vec::new();
        write_model(&m, &mut buf).unwrap();
        (m, buf)
    }

    #[test]
    fn round_trip_is_exact_for_every_algorithm() {
        for alg in Algorithm::ALL {
            let (m, buf) = bytes(alg);
            let back = read_model(&mut buf.as_slice()).unwrap();
            assert_eq!(back, m, "{alg}");
            let q = [0.37, 1.1];
            let bits = |v: Vec<f64>| v.into_iter().map(f64::to_bits).collect::<Vec<_>>();
            assert_eq!(bits(back.predict_proba(&q).unwrap().values), bits(m.predict_proba(&q).unwrap().values));
        }
    }

    #[test]
    fn damaged_files_are_rejected() {
        let (_, buf) = bytes(Algorithm::NaiveBayes);
        let mut bad = buf.clone();
        bad[0] ^= 1;
        assert!(matches!(read_model(&mut bad.as_slice()), Err(ModelError::CorruptModel(_))));
        let mut flipped = buf.clone();
        let last = flipped.len() - 2;
        flipped[last] ^= 0x20;
        assert!(matches!(read_model(&mut flipped.as_slice()), Err(ModelError::CorruptModel(_))));
        let short = &buf[..buf.len() - 1];
        assert!(matches!(read_model(&mut &short[..]), Err(ModelError::CorruptModel(_))));
        assert!(matches!(read_model(&mut &buf[..10]), Err(ModelError::CorruptModel(_))));
        let mut future = buf.clone();
        future[8..12].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(
            read_model(&mut future.as_slice()),
            Err(ModelError::VersionMismatch { found: 2, expected: 1 })
        ));
    }
}
