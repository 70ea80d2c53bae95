//! Kaldi-style text matrices:
//!
//! ```text
//! utt1_shift+0  [
//!   1.5 -2 0.25
//!   3 4 5 ]
//! ```

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use super::archive::read_index;
use super::matrix::{read_matrix, Matrix};
use crate::error::{Error, Result};

pub fn write_text_matrix<W: Write>(w: &mut W, key: &str, m: &Matrix) -> std::io::Result<()> {
    write!(w, "{key}  [")?;
    if m.rows == 0 {
        return writeln!(w, " ]");
    }
    writeln!(w)?;
    for r in 0..m.rows {
        write!(w, " ")?;
        for v in m.row(r) {
            // shortest representation that parses back to the same f32
            write!(w, " {v}")?;
        }
        if r + 1 == m.rows {
            writeln!(w, " ]")?;
        } else {
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Writes every matrix of an archive, in index order, to one text file.
pub fn export_text_archive(archive: impl AsRef<Path>, out_path: impl AsRef<Path>) -> Result<usize> {
    let archive = archive.as_ref();
    let records = read_index(archive)?;
    let mut w = BufWriter::new(std::fs::File::create(out_path)?);
    for rec in &records {
        let m = read_matrix(archive.join(&rec.path))?;
        write_text_matrix(&mut w, &rec.key, &m)?;
    }
    w.flush()?;
    Ok(records.len())
}

/// Parses text written by [`write_text_matrix`].
pub fn read_text_archive<R: BufRead>(reader: R) -> Result<Vec<(String, Matrix)>> {
    let bad = |line: usize, msg: &str| Error::Parse {
        path: "<text archive>".into(),
        line,
        message: msg.to_owned(),
    };
    let mut out = Vec::new();
    let mut current: Option<(String, usize, Vec<f32>)> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let mut tokens = line.split_whitespace().peekable();
        if current.is_none() {
            let Some(key) = tokens.next() else { continue };
            if tokens.next() != Some("[") {
                return Err(bad(lineno, "expected `[` after key"));
            }
            current = Some((key.to_owned(), 0, Vec::new()));
            if tokens.peek().is_none() {
                continue;
            }
        }
        let (_, rows, data) = current.as_mut().expect("open matrix");
        let mut in_row = 0usize;
        let mut closed = false;
        for tok in tokens {
            if tok == "]" {
                closed = true;
                break;
            }
            data.push(tok.parse::<f32>().map_err(|_| bad(lineno, "bad number"))?);
            in_row += 1;
        }
        if in_row > 0 {
            *rows += 1;
        }
        if closed {
            let (key, rows, data) = current.take().expect("open matrix");
            let cols = data.len().checked_div(rows).unwrap_or(0);
            let m = Matrix::new(rows, cols, data).map_err(|_| bad(lineno, "ragged rows"))?;
            out.push((key, m));
        }
    }
    if current.is_some() {
        return Err(bad(0, "unterminated matrix"));
    }
    Ok(out)
}
