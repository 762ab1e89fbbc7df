//! Binary layout (little endian):
//!
//! ```text
//! magic      8 bytes  "MBTIW2V\0"
//! version    u32
//! dim        u32
//! vocab      u64
//! params     u32 length + JSON (parameters, seed, epoch losses)
//! terms      vocab × (u32 length + UTF-8 bytes + u64 count)
//! vectors    vocab × dim × f64, row-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EmbedError, EmbeddingModel, Word2VecParams};

const MAGIC: &[u8; 8] = b"MBTIW2V\0";
pub const EMBEDDING_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    params: Word2VecParams,
    seed: u64,
    epoch_losses: Vec<f64>,
}

pub fn write_embedding(model: &EmbeddingModel, out: &mut impl Write) -> Result<(), EmbedError> {
    out.write_all(MAGIC)?;
    out.write_all(&EMBEDDING_SCHEMA_VERSION.to_le_bytes())?;
    out.write_all(&(model.dim as u32).to_le_bytes())?;
    out.write_all(&(model.vocab_len() as u64).to_le_bytes())?;
    let header = serde_json::to_vec(&Header {
        params: model.params.clone(),
        seed: model.seed,
        epoch_losses: model.epoch_losses.clone(),
    })
    .map_err(|e| EmbedError::Corrupt(e.to_string()))?;
    out.write_all(&(header.len() as u32).to_le_bytes())?;
    out.write_all(&header)?;
    for (term, count) in model.terms().iter().zip(model.counts()) {
        out.write_all(&(term.len() as u32).to_le_bytes())?;
        out.write_all(term.as_bytes())?;
        out.write_all(&count.to_le_bytes())?;
    }
    for x in model.raw_vectors() {
        out.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N], EmbedError> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| EmbedError::Corrupt(format!("truncated: {e}")))?;
    Ok(buf)
}

fn read_vec(r: &mut impl Read, len: usize) -> Result<Vec<u8>, EmbedError> {
    let mut buf = Vec::new();
    r.take(len as u64).read_to_end(&mut buf)?;
    if buf.len() != len {
        return Err(EmbedError::Corrupt("truncated".into()));
    }
    Ok(buf)
}

pub fn read_embedding(r: &mut impl Read) -> Result<EmbeddingModel, EmbedError> {
    if &read_array::<8>(r)? != MAGIC {
        return Err(EmbedError::Corrupt("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != EMBEDDING_SCHEMA_VERSION {
        return Err(EmbedError::VersionMismatch(version));
    }
    let dim = u32::from_le_bytes(read_array(r)?) as usize;
    let vocab = u64::from_le_bytes(read_array(r)?) as usize;
    let header_len = u32::from_le_bytes(read_array(r)?) as usize;
    let header: Header =
        serde_json::from_slice(&read_vec(r, header_len)?).map_err(|e| EmbedError::Corrupt(e.to_string()))?;
    let mut terms = Vec::with_capacity(vocab.min(1 << 20));
    let mut counts = Vec::with_capacity(vocab.min(1 << 20));
    for _ in 0..vocab {
        let len = u32::from_le_bytes(read_array(r)?) as usize;
        let term = String::from_utf8(read_vec(r, len)?).map_err(|e| EmbedError::Corrupt(e.to_string()))?;
        terms.push(term);
        counts.push(u64::from_le_bytes(read_array(r)?));
    }
    let mut vectors = Vec::with_capacity(vocab * dim);
    for _ in 0..vocab * dim {
        let x = f64::from_le_bytes(read_array(r)?);
        if !x.is_finite() {
            return Err(EmbedError::Corrupt("non-finite vector entry".into()));
        }
        vectors.push(x);
    }
    if dim == 0 || dim != header.params.dim {
        return Err(EmbedError::Corrupt("dimension disagrees with parameters".into()));
    }
    Ok(EmbeddingModel::from_parts(terms, counts, vectors, dim, header.params, header.seed, header.epoch_losses))
}

pub fn save_embedding(model: &EmbeddingModel, path: &Path) -> Result<(), EmbedError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_embedding(model, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_embedding(path: &Path) -> Result<EmbeddingModel, EmbedError> {
    read_embedding(&mut BufReader::new(File::open(path)?))
}

/// Plain-text export: a `"<vocab> <dim>"` header line, then `word v1 v2 ...`.
pub fn write_text_vectors(model: &EmbeddingModel, out: &mut impl Write) -> Result<(), EmbedError> {
    writeln!(out, "{} {}", model.vocab_len(), model.dim)?;
    for term in model.terms() {
        let v = model.vector(term).expect("term in vocabulary");
        let nums: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
        writeln!(out, "{term} {}", nums.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::train_word2vec;
    use super::*;

    fn model() -> EmbeddingModel {
        let corpus: Vec<Vec<String>> =
            (0..30).map(|i| format!("ا ب ت w{}", i % 3).split(' ').map(String::from).collect()).collect();
        let p = Word2VecParams { dim: 6, min_count: 1, epochs: 2, ..Default::default() };
        train_word2vec(&corpus, &p, 11).unwrap()
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let m = model();
        let mut buf = Vec::new();
        write_embedding(&m, &mut buf).unwrap();
        let back = read_embedding(&mut buf.as_slice()).unwrap();
        assert_eq!(back.terms(), m.terms());
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(back.raw_vectors()), bits(m.raw_vectors()));
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_magic_version_and_truncation() {
        let m = model();
        let mut buf = Vec::new();
        write_embedding(&m, &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_embedding(&mut bad.as_slice()), Err(EmbedError::Corrupt(_))));
        let mut future = buf.clone();
        future[8..12].copy_from_slice(&7u32.to_le_bytes());
        assert!(matches!(read_embedding(&mut future.as_slice()), Err(EmbedError::VersionMismatch(7))));
        let short = &buf[..buf.len() - 3];
        assert!(matches!(read_embedding(&mut &short[..]), Err(EmbedError::Corrupt(_))));
    }

    #[test]
    fn text_export_shape() {
        let m = model();
        let mut buf = Vec::new();
        write_text_vectors(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("{} 6", m.vocab_len()));
        for line in lines {
            assert_eq!(line.split(' ').count(), 7);
        }
    }
}
