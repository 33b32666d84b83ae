//! Binary dataset snapshots.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      b"I2VD"
//! version    u16
//! users      u32
//! items      u32
//! pairs      u64
//! pairs × (user u32, item u32)
//! users × (len u32, UTF-8 bytes)   user keys in index order
//! items × (len u32, UTF-8 bytes)   item keys in index order
//! ```

use std::io::{Read, Write};

use crate::dataset::InteractionDataset;
use crate::error::{Error, Result};

pub const DATASET_MAGIC: &[u8; 4] = b"I2VD";
pub const DATASET_VERSION: u16 = 1;

pub fn write_dataset<W: Write>(ds: &InteractionDataset, mut sink: W) -> Result<()> {
    sink.write_all(DATASET_MAGIC)?;
    sink.write_all(&DATASET_VERSION.to_le_bytes())?;
    sink.write_all(&(ds.user_count() as u32).to_le_bytes())?;
    sink.write_all(&(ds.item_count() as u32).to_le_bytes())?;
    sink.write_all(&(ds.interaction_count() as u64).to_le_bytes())?;
    for &(u, i) in ds.interactions() {
        sink.write_all(&u.to_le_bytes())?;
        sink.write_all(&i.to_le_bytes())?;
    }
    for key in ds.user_keys().iter().chain(ds.item_keys()) {
        sink.write_all(&(key.len() as u32).to_le_bytes())?;
        sink.write_all(key.as_bytes())?;
    }
    sink.flush()?;
    Ok(())
}

pub fn read_dataset<R: Read>(source: R) -> Result<InteractionDataset> {
    let mut r = ByteReader::new(source, "dataset snapshot");
    let magic = r.array::<4>("magic")?;
    if &magic != DATASET_MAGIC {
        return Err(r.corrupt(format!("bad magic {magic:?}, expected {DATASET_MAGIC:?}")));
    }
    let version = r.u16("version")?;
    if version != DATASET_VERSION {
        return Err(r.corrupt(format!("unsupported version {version}")));
    }
    let users = r.u32("user count")? as usize;
    let items = r.u32("item count")? as usize;
    let pairs = r.u64("pair count")? as usize;
    let mut interactions = Vec::with_capacity(pairs.min(1 << 24));
    for _ in 0..pairs {
        interactions.push((r.u32("pair user")?, r.u32("pair item")?));
    }
    let user_keys = (0..users).map(|_| r.string("user key")).collect::<Result<Vec<_>>>()?;
    let item_keys = (0..items).map(|_| r.string("item key")).collect::<Result<Vec<_>>>()?;
    r.expect_eof()?;
    InteractionDataset::from_pairs(user_keys, item_keys, interactions)
}

/// Offset-tracking little-endian reader shared by the binary formats.
pub(crate) struct ByteReader<R> {
    inner: R,
    offset: u64,
    what: &'static str,
}

impl<R: Read> ByteReader<R> {
    pub(crate) fn new(inner: R, what: &'static str) -> Self {
        Self { inner, offset: 0, what }
    }

    pub(crate) fn corrupt(&self, message: String) -> Error {
        Error::Corrupt { what: self.what, offset: self.offset, message }
    }

    pub(crate) fn fill(&mut self, buf: &mut [u8], field: &str) -> Result<()> {
        let mut read = 0;
        while read < buf.len() {
            match self.inner.read(&mut buf[read..]) {
                Ok(0) => {
                    return Err(
                        self.corrupt(format!("truncated while reading {field}: expected {} more bytes, got {read}", buf.len()))
                    )
                }
                Ok(n) => read += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }

    pub(crate) fn array<const N: usize>(&mut self, field: &str) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.fill(&mut buf, field)?;
        Ok(buf)
    }

    pub(crate) fn u16(&mut self, field: &str) -> Result<u16> {
        self.array(field).map(u16::from_le_bytes)
    }

    pub(crate) fn u32(&mut self, field: &str) -> Result<u32> {
        self.array(field).map(u32::from_le_bytes)
    }

    pub(crate) fn u64(&mut self, field: &str) -> Result<u64> {
        self.array(field).map(u64::from_le_bytes)
    }

    fn string(&mut self, field: &str) -> Result<String> {
        let len = self.u32(field)? as usize;
        let mut buf = vec![0u8; len];
        self.fill(&mut buf, field)?;
        String::from_utf8(buf).map_err(|e| self.corrupt(format!("{field} is not UTF-8: {e}")))
    }

    pub(crate) fn read_rest(&mut self, out: &mut Vec<u8>) -> Result<()> {
        let n = self.inner.read_to_end(out)?;
        self.offset += n as u64;
        Ok(())
    }

    pub(crate) fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        loop {
            match self.inner.read(&mut probe) {
                Ok(0) => return Ok(()),
                Ok(_) => return Err(self.corrupt("trailing bytes after end of data".into())),
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
}
