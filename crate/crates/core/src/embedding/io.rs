//! Embedding persistence.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! magic  4 bytes  "GLVE"
//! u32    format version (1)
//! u64    vocabulary size
//! u32    dimension
//! per term, in vocabulary order:
//!   u32    term byte length
//!   bytes  UTF-8 term
//!   f32xD  combined output vector
//! ```
//!
//! The text format is one `term v1 v2 ... vd` line per term with
//! space-separated decimal floats.

use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EmbeddingError, EmbeddingSet, Vocabulary};

pub const FORMAT_MAGIC: [u8; 4] = *b"GLVE";
pub const FORMAT_VERSION: u32 = 1;

fn io_err(path: &Path, source: io::Error) -> EmbeddingError {
    EmbeddingError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write the binary format. Components are stored as f32.
pub fn save_binary(set: &EmbeddingSet, path: &Path) -> Result<(), EmbeddingError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>, bytes: &[u8]| {
        w.write_all(bytes).map_err(|e| io_err(path, e))
    };
    write(&mut w, &FORMAT_MAGIC)?;
    write(&mut w, &FORMAT_VERSION.to_le_bytes())?;
    write(&mut w, &(set.len() as u64).to_le_bytes())?;
    write(&mut w, &(set.dim() as u32).to_le_bytes())?;
    for id in 0..set.len() as u32 {
        let term = set.vocab().term(id);
        write(&mut w, &(term.len() as u32).to_le_bytes())?;
        write(&mut w, term.as_bytes())?;
        for v in set.vector_by_id(id) {
            write(&mut w, &(*v as f32).to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Tracks the byte offset so truncation errors can name the position.
struct CountingReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> CountingReader<R> {
    fn read_exact(&mut self, path: &Path, buf: &mut [u8]) -> Result<(), EmbeddingError> {
        match self.inner.read_exact(buf) {
            Ok(()) => {
                self.offset += buf.len() as u64;
                Ok(())
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => {
                Err(EmbeddingError::Truncated {
                    path: path.to_path_buf(),
                    offset: self.offset,
                })
            }
            Err(e) => Err(io_err(path, e)),
        }
    }

    fn at_eof(&mut self, path: &Path) -> Result<bool, EmbeddingError> {
        let mut probe = [0u8; 1];
        match self.inner.read(&mut probe) {
            Ok(0) => Ok(true),
            Ok(_) => Ok(false),
            Err(e) => Err(io_err(path, e)),
        }
    }
}

/// Read the binary format.
pub fn load_binary(path: &Path) -> Result<EmbeddingSet, EmbeddingError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = CountingReader {
        inner: BufReader::new(file),
        offset: 0,
    };

    let mut magic = [0u8; 4];
    r.read_exact(path, &mut magic)?;
    if magic != FORMAT_MAGIC {
        return Err(EmbeddingError::BadMagic {
            path: path.to_path_buf(),
        });
    }
    let mut u32_buf = [0u8; 4];
    let mut u64_buf = [0u8; 8];
    r.read_exact(path, &mut u32_buf)?;
    let version = u32::from_le_bytes(u32_buf);
    if version != FORMAT_VERSION {
        return Err(EmbeddingError::UnsupportedVersion {
            path: path.to_path_buf(),
            version,
        });
    }
    r.read_exact(path, &mut u64_buf)?;
    let vocab_size = u64::from_le_bytes(u64_buf) as usize;
    r.read_exact(path, &mut u32_buf)?;
    let dim = u32::from_le_bytes(u32_buf) as usize;
    if dim == 0 {
        return Err(EmbeddingError::InvalidConfig(format!(
            "{}: dimension 0 in header",
            path.display()
        )));
    }

    let mut terms = Vec::with_capacity(vocab_size);
    let mut combined = Vec::with_capacity(vocab_size * dim);
    for _ in 0..vocab_size {
        r.read_exact(path, &mut u32_buf)?;
        let term_len = u32::from_le_bytes(u32_buf) as usize;
        let term_offset = r.offset;
        let mut term_bytes = vec![0u8; term_len];
        r.read_exact(path, &mut term_bytes)?;
        let term = String::from_utf8(term_bytes).map_err(|_| EmbeddingError::InvalidUtf8 {
            path: path.to_path_buf(),
            offset: term_offset,
        })?;
        terms.push((term, 0u64));
        let mut f32_buf = [0u8; 4];
        for _ in 0..dim {
            r.read_exact(path, &mut f32_buf)?;
            combined.push(f64::from(f32::from_le_bytes(f32_buf)));
        }
    }
    if !r.at_eof(path)? {
        return Err(EmbeddingError::InvalidConfig(format!(
            "{}: trailing bytes after {} terms",
            path.display(),
            vocab_size
        )));
    }
    let vocab = Vocabulary::from_ordered_terms(terms)?;
    EmbeddingSet::from_combined(vocab, dim, combined)
}

/// Write the text format.
pub fn save_text(set: &EmbeddingSet, path: &Path) -> Result<(), EmbeddingError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for id in 0..set.len() as u32 {
        write!(w, "{}", set.vocab().term(id)).map_err(|e| io_err(path, e))?;
        for v in set.vector_by_id(id) {
            write!(w, " {v}").map_err(|e| io_err(path, e))?;
        }
        writeln!(w).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Read the text format. Every line must carry the same number of
/// components as the first.
pub fn load_text(path: &Path) -> Result<EmbeddingSet, EmbeddingError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut terms = Vec::new();
    let mut combined = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let term = fields.next().expect("non-empty line has a first field");
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>().map_err(|_| EmbeddingError::TextParse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("not a float: {f:?}"),
                })
            })
            .collect::<Result<_, _>>()?;
        match dim {
            None => {
                if values.is_empty() {
                    return Err(EmbeddingError::TextParse {
                        path: path.to_path_buf(),
                        line: i + 1,
                        message: "no vector components".into(),
                    });
                }
                dim = Some(values.len());
            }
            Some(d) if d != values.len() => {
                return Err(EmbeddingError::DimensionMismatch {
                    path: path.to_path_buf(),
                    line: i + 1,
                    expected: d,
                    got: values.len(),
                })
            }
            _ => {}
        }
        terms.push((term.to_string(), 0u64));
        combined.extend(values);
    }
    let dim = dim.ok_or_else(|| EmbeddingError::TextParse {
        path: path.to_path_buf(),
        line: 0,
        message: "empty embedding file".into(),
    })?;
    let vocab = Vocabulary::from_ordered_terms(terms)?;
    EmbeddingSet::from_combined(vocab, dim, combined)
}
