//! Embedding files: magic `I2VE`, u16 version, u32 `|U|`, u32 `|I|`, u32 `M`,
//! then W and W′ row-major as little-endian f32.

use std::io::{Read, Write};

use super::EmbeddingModel;
use crate::error::{Error, Result};
use crate::snapshot::ByteReader;

pub const EMBEDDING_MAGIC: &[u8; 4] = b"I2VE";
pub const EMBEDDING_VERSION: u16 = 1;
const HEADER_LEN: u64 = 4 + 2 + 4 * 3;

pub fn export_embeddings<W: Write>(model: &EmbeddingModel, mut sink: W) -> Result<()> {
    if !model.is_finite() {
        return Err(Error::NonFinite {
            epoch: 0,
            user: 0,
            item: 0,
            message: "refusing to export a model with non-finite entries".into(),
        });
    }
    let count =
        |n: usize, what: &str| u32::try_from(n).map_err(|_| Error::config(format!("{what} {n} does not fit the file format")));
    sink.write_all(EMBEDDING_MAGIC)?;
    sink.write_all(&EMBEDDING_VERSION.to_le_bytes())?;
    sink.write_all(&count(model.user_count(), "user count")?.to_le_bytes())?;
    sink.write_all(&count(model.item_count(), "item count")?.to_le_bytes())?;
    sink.write_all(&count(model.dim(), "dimension")?.to_le_bytes())?;
    let mut buf = Vec::with_capacity(4 * model.dim());
    for row in model.user_matrix().chunks(model.dim()).chain(model.item_matrix().chunks(model.dim())) {
        buf.clear();
        buf.extend(row.iter().flat_map(|x| x.to_le_bytes()));
        sink.write_all(&buf)?;
    }
    sink.flush()?;
    Ok(())
}

pub fn import_embeddings<R: Read>(source: R) -> Result<EmbeddingModel> {
    let mut r = ByteReader::new(source, "embedding file");
    let magic = r.array::<4>("magic")?;
    if &magic != EMBEDDING_MAGIC {
        return Err(r.corrupt(format!("bad magic {magic:?}, expected {EMBEDDING_MAGIC:?}")));
    }
    let version = r.u16("version")?;
    if version != EMBEDDING_VERSION {
        return Err(r.corrupt(format!("unsupported version {version}")));
    }
    let users = r.u32("user count")? as u64;
    let items = r.u32("item count")? as u64;
    let dim = r.u32("dimension")? as u64;
    if dim == 0 {
        return Err(r.corrupt("header states dimension 0".into()));
    }
    let expected = HEADER_LEN + 4 * (users + items) * dim;
    let mut body = Vec::new();
    r.read_rest(&mut body)?;
    let actual = HEADER_LEN + body.len() as u64;
    if actual != expected {
        return Err(Error::Corrupt {
            what: "embedding file",
            offset: actual.min(expected),
            message: format!(
                "header states {users} users, {items} items, dimension {dim}: expected {expected} bytes, got {actual}"
            ),
        });
    }
    let mut values = Vec::with_capacity(body.len() / 4);
    for (k, chunk) in body.chunks_exact(4).enumerate() {
        let x = f32::from_le_bytes(chunk.try_into().unwrap());
        if !x.is_finite() {
            return Err(Error::Corrupt {
                what: "embedding file",
                offset: HEADER_LEN + 4 * k as u64,
                message: format!("non-finite entry {x}"),
            });
        }
        values.push(x);
    }
    let item_values = values.split_off((users * dim) as usize);
    EmbeddingModel::from_parts(users as usize, items as usize, dim as usize, values, item_values)
}

/// One `key v1 … vM` line per entity, users first. Keys are prefixed `u:` and
/// `i:` so the two namespaces cannot collide.
pub fn export_text<W: Write>(model: &EmbeddingModel, user_keys: &[String], item_keys: &[String], mut sink: W) -> Result<()> {
    if user_keys.len() != model.user_count() {
        return Err(Error::DimensionMismatch { left: user_keys.len(), right: model.user_count() });
    }
    if item_keys.len() != model.item_count() {
        return Err(Error::DimensionMismatch { left: item_keys.len(), right: model.item_count() });
    }
    let mut write = |prefix: &str, key: &str, row: &[f32]| -> Result<()> {
        write!(sink, "{prefix}{key}")?;
        for x in row {
            write!(sink, " {x}")?;
        }
        writeln!(sink)?;
        Ok(())
    };
    for (u, key) in user_keys.iter().enumerate() {
        write("u:", key, model.user(u))?;
    }
    for (i, key) in item_keys.iter().enumerate() {
        write("i:", key, model.item(i))?;
    }
    sink.flush()?;
    Ok(())
}
