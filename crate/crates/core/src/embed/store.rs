//! On-disk embedding container.
//!
//! Layout: 4-byte magic `LNEB`, a little-endian u32 header length, a JSON
//! header (n, k, method, seed, iterations, loss, termination, prng), then X
//! and Y as row-major little-endian f64 blocks. A plain-text dump is also
//! available for debugging.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::embed::{Embedding, Method, Termination};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"LNEB";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    n: usize,
    k: usize,
    method: Method,
    seed: Option<u64>,
    iterations: usize,
    loss: Option<f64>,
    termination: Option<Termination>,
    prng: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_embedding(e: &Embedding, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let header = Header {
        format_version: FORMAT_VERSION,
        n: e.n(),
        k: e.rank,
        method: e.method,
        seed: e.seed,
        iterations: e.iterations_used,
        loss: e.final_loss,
        termination: e.termination,
        prng: crate::PRNG_ALGORITHM.to_string(),
    };
    let header_json = serde_json::to_vec(&header).expect("header serializes");

    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(MAGIC).map_err(io_err(path))?;
    file.write_all(&(header_json.len() as u32).to_le_bytes())
        .map_err(io_err(path))?;
    file.write_all(&header_json).map_err(io_err(path))?;
    for matrix in [&e.x, &e.y] {
        let mut bytes = Vec::with_capacity(matrix.len() * 8);
        for &v in matrix.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        file.write_all(&bytes).map_err(io_err(path))?;
    }
    Ok(())
}

pub fn read_embedding(path: impl AsRef<Path>) -> Result<Embedding> {
    let path = path.as_ref();
    let mut file = fs::File::open(path).map_err(io_err(path))?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf).map_err(io_err(path))?;
    let corrupt = |msg: &str| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        msg: msg.to_string(),
    };

    if buf.len() < 8 || &buf[..4] != MAGIC {
        return Err(corrupt("not an embedding container (bad magic)"));
    }
    let header_len = u32::from_le_bytes(buf[4..8].try_into().unwrap()) as usize;
    if buf.len() < 8 + header_len {
        return Err(corrupt("truncated header"));
    }
    let header: Header = serde_json::from_slice(&buf[8..8 + header_len])
        .map_err(|e| corrupt(&format!("bad header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(corrupt(&format!(
            "unsupported format version {}",
            header.format_version
        )));
    }
    let matrix_bytes = header.n * header.k * 8;
    if buf.len() != 8 + header_len + 2 * matrix_bytes {
        return Err(corrupt("truncated factor data"));
    }
    let read_matrix = |offset: usize| -> Array2<f64> {
        let mut values = Vec::with_capacity(header.n * header.k);
        for chunk in buf[offset..offset + matrix_bytes].chunks_exact(8) {
            values.push(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
        Array2::from_shape_vec((header.n, header.k), values).unwrap()
    };
    let x = read_matrix(8 + header_len);
    let y = read_matrix(8 + header_len + matrix_bytes);
    Ok(Embedding {
        x,
        y,
        rank: header.k,
        method: header.method,
        seed: header.seed,
        iterations_used: header.iterations,
        final_loss: header.loss,
        termination: header.termination,
    })
}

/// Human-readable dump of the factors, one row per line.
pub fn write_embedding_text(e: &Embedding, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(&format!(
        "# embedding method={} n={} k={} seed={:?} iterations={} loss={:?}\n",
        e.method,
        e.n(),
        e.rank,
        e.seed,
        e.iterations_used,
        e.final_loss
    ));
    for (name, matrix) in [("X", &e.x), ("Y", &e.y)] {
        out.push_str(&format!("# {name}\n"));
        for row in matrix.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(io_err(path))
}
