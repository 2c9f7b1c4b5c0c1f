//! Versioned little-endian model file.
//!
//! Layout: magic (8 bytes), version u32, kernel id u32 (0 linear, 1 rbf),
//! gamma f64, C f64, bias f64, dims u32, support vector count u32, then
//! `dims` feature column indices (u32), `dims` means, `dims` standard
//! deviations, one signed weight per support vector, and the support
//! vectors row by row (all f64).

use std::io::{Read, Write};
use std::path::Path;

use super::{Kernel, Standardization, SvmModel};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: [u8; 8] = *b"TVSVM\0\r\n";
pub const MODEL_VERSION: u32 = 1;

pub fn write_model<W: Write>(mut out: W, model: &SvmModel) -> std::io::Result<()> {
    let dims = model.dims();
    let mut buf = Vec::new();
    buf.extend_from_slice(&MODEL_MAGIC);
    buf.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    let (kernel_id, gamma) = match model.kernel {
        Kernel::Linear => (0u32, 0.0),
        Kernel::Rbf { gamma } => (1u32, gamma),
    };
    buf.extend_from_slice(&kernel_id.to_le_bytes());
    for v in [gamma, model.c, model.bias] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(dims as u32).to_le_bytes());
    buf.extend_from_slice(&(model.support_vectors.len() as u32).to_le_bytes());
    for &col in &model.feature_columns {
        buf.extend_from_slice(&(col as u32).to_le_bytes());
    }
    let floats = model
        .standardization
        .mean
        .iter()
        .chain(&model.standardization.std)
        .chain(&model.alphas)
        .chain(model.support_vectors.iter().flatten());
    for v in floats {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("model file is truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

pub fn read_model<R: Read>(mut input: R) -> Result<SvmModel> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::Format(format!("reading model: {e}")))?;
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    if cur.take(8)? != MODEL_MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let version = cur.u32()?;
    if version != MODEL_VERSION {
        return Err(Error::Format(format!(
            "model version {version} is not supported (expected {MODEL_VERSION})"
        )));
    }
    let kernel_id = cur.u32()?;
    let gamma = cur.f64()?;
    let kernel = match kernel_id {
        0 => Kernel::Linear,
        1 => Kernel::Rbf { gamma },
        other => return Err(Error::Format(format!("unknown kernel id {other}"))),
    };
    let c = cur.f64()?;
    let bias = cur.f64()?;
    let dims = cur.u32()? as usize;
    let n_sv = cur.u32()? as usize;
    let feature_columns = (0..dims)
        .map(|_| cur.u32().map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let mean = cur.f64s(dims)?;
    let std = cur.f64s(dims)?;
    let alphas = cur.f64s(n_sv)?;
    let support_vectors = (0..n_sv)
        .map(|_| cur.f64s(dims))
        .collect::<Result<Vec<_>>>()?;
    if cur.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after model".into()));
    }
    Ok(SvmModel {
        kernel,
        c,
        support_vectors,
        alphas,
        bias,
        standardization: Standardization { mean, std },
        feature_columns,
    })
}

pub fn save_model(model: &SvmModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_model(std::io::BufWriter::new(file), model).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SvmModel> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(std::io::BufReader::new(file))
}
