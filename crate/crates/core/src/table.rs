//! Text format for structure-constant tables.
//!
//! ```text
//! # paracomplex numbers, basis (1, ε)
//! 2
//! 1 1 1 1
//! 2 1 2 1
//! 1 2 2 1
//! ```
//!
//! The first non-comment line is the dimension. Each following line is
//! `k i j value`, giving `Cᵏᵢⱼ` with 1-based indices. Entries not listed are
//! zero. `#` starts a comment. When the table is read as commutative, each
//! line also sets `Cᵏⱼᵢ`, and a conflicting explicit mirror entry is an error.

use crate::error::{Error, Result};

/// Dense `dim³` table indexed as `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub dim: usize,
    pub c: Vec<f64>,
}

impl RawTable {
    pub fn idx(dim: usize, k: usize, i: usize, j: usize) -> usize {
        (k * dim + i) * dim + j
    }
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_table(text: &str, commutative: bool) -> Result<RawTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, strip(l)))
        .filter(|(_, l)| !l.is_empty());

    let (first_line, dim_str) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing dimension line".into(),
    })?;
    let dim: usize = dim_str.parse().map_err(|_| Error::Parse {
        line: first_line,
        message: format!("expected a positive dimension, found `{dim_str}`"),
    })?;
    if dim == 0 {
        return Err(Error::Parse {
            line: first_line,
            message: "dimension must be positive".into(),
        });
    }

    let mut c = vec![0.0; dim * dim * dim];
    let mut set = vec![false; dim * dim * dim];
    for (line, body) in lines {
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                message: "expected `k i j value`".into(),
            });
        }
        let mut ix = [0usize; 3];
        for (slot, f) in ix.iter_mut().zip(&fields[..3]) {
            let v: usize = f.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad index `{f}`"),
            })?;
            if v == 0 || v > dim {
                return Err(Error::Parse {
                    line,
                    message: format!("index {v} outside 1..={dim}"),
                });
            }
            *slot = v - 1;
        }
        let value: f64 = fields[3].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad value `{}`", fields[3]),
        })?;
        let [k, i, j] = ix;
        let mut targets = vec![RawTable::idx(dim, k, i, j)];
        if commutative && i != j {
            targets.push(RawTable::idx(dim, k, j, i));
        }
        for t in targets {
            if set[t] && c[t] != value {
                return Err(Error::Parse {
                    line,
                    message: "conflicting value for a previously set entry".into(),
                });
            }
            c[t] = value;
            set[t] = true;
        }
    }
    Ok(RawTable { dim, c })
}

/// Writes every nonzero entry; the output parses back to the same table.
pub fn write_table(table: &RawTable) -> String {
    let d = table.dim;
    let mut out = format!("{d}\n");
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let v = table.c[RawTable::idx(d, k, i, j)];
                if v != 0.0 {
                    out.push_str(&format!("{} {} {} {:?}\n", k + 1, i + 1, j + 1, v));
                }
            }
        }
    }
    out
}
