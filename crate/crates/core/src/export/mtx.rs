//! Matrix Market coordinate files (real, general).

use std::io::Write;

use crate::error::{Error, Result};
use crate::sparse::Triplets;

const BANNER: &str = "%%MatrixMarket matrix coordinate real general";

/// Writes 1-based coordinates; values use the shortest exact decimal form.
pub fn write_matrix_market<W: Write>(
    w: &mut W,
    rows: usize,
    cols: usize,
    nnz: usize,
    entries: impl Iterator<Item = (usize, usize, f64)>,
) -> Result<()> {
    writeln!(w, "{BANNER}")?;
    writeln!(w, "{rows} {cols} {nnz}")?;
    let mut written = 0;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        written += 1;
    }
    if written != nnz {
        return Err(Error::Contract(format!("declared {nnz} entries, wrote {written}")));
    }
    Ok(())
}

/// Parses a file written by `write_matrix_market`. A missing banner, size
/// line or trailing entries count as a corrupt header.
pub fn read_matrix_market(text: &str, name: &str) -> Result<Triplets> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim().eq_ignore_ascii_case(BANNER) => {}
        _ => return Err(Error::CorruptHeader(format!("{name}: missing Matrix Market banner"))),
    }
    let mut lines = lines.filter(|(_, l)| !l.starts_with('%'));
    let size: Vec<usize> = match lines.next() {
        Some((_, l)) => l
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::CorruptHeader(format!("{name}: bad size line {l:?}")))?,
        None => return Err(Error::CorruptHeader(format!("{name}: missing size line"))),
    };
    let [rows, cols, nnz] = size[..] else {
        return Err(Error::CorruptHeader(format!("{name}: size line needs three numbers")));
    };
    let mut t = Triplets::new(rows, cols);
    let mut seen = 0;
    for (n, line) in lines {
        let loc = || format!("{name} line {}", n + 1);
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(loc(), "expected `row col value`"));
        }
        let i: usize = f[0].parse().map_err(|_| Error::parse(loc(), "bad row index"))?;
        let j: usize = f[1].parse().map_err(|_| Error::parse(loc(), "bad column index"))?;
        let v: f64 = f[2].parse().map_err(|_| Error::parse(loc(), "bad value"))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::parse(loc(), format!("entry ({i}, {j}) outside {rows}x{cols}")));
        }
        t.push(i - 1, j - 1, v);
        seen += 1;
    }
    if seen != nnz {
        return Err(Error::CorruptHeader(format!("{name}: header declares {nnz} entries, found {seen}")));
    }
    Ok(t)
}
