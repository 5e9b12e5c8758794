//! Sparse SDPA (`.dat-s`) problems.
//!
//! The problem is `min c'x  s.t.  sum_l F_l x_l - F_0 >= 0`. A file holds
//! the variable count, the block count, the block sizes, `c`, and then one
//! line `l b i j v` per nonzero upper-triangular entry of `F_l`.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::format_real;
use crate::relaxation::Relaxation;

#[derive(Debug, Error)]
pub enum SdpaError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid problem: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Nonzero entry `v` at `(i, j)`, `i <= j`, of block `b` of `F_l`.
/// Indices are 1-based as in the file; `l = 0` is `F_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseEntry {
    pub l: usize,
    pub b: usize,
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

impl SparseEntry {
    fn key(&self) -> (usize, usize, usize, usize) {
        (self.l, self.b, self.i, self.j)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub nvars: usize,
    /// Negative sizes mark diagonal blocks.
    pub block_sizes: Vec<i64>,
    pub c: Vec<f64>,
    pub entries: Vec<SparseEntry>,
}

impl SdpProblem {
    pub fn block_dim(&self, b: usize) -> usize {
        self.block_sizes[b - 1].unsigned_abs() as usize
    }

    pub fn total_dim(&self) -> usize {
        (1..=self.block_sizes.len())
            .map(|b| self.block_dim(b))
            .sum()
    }

    /// Sorts entries by `(l, b, i, j)`.
    pub fn sort_entries(&mut self) {
        self.entries.sort_by_key(SparseEntry::key);
    }

    pub fn validate(&self) -> Result<(), SdpaError> {
        let bad = |msg: String| Err(SdpaError::InvariantViolation(msg));
        if self.c.len() != self.nvars {
            return bad(format!(
                "c has {} values for {} variables",
                self.c.len(),
                self.nvars
            ));
        }
        if let Some(pos) = self.block_sizes.iter().position(|&s| s == 0) {
            return bad(format!("block {} has size 0", pos + 1));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.entries {
            if e.l > self.nvars {
                return bad(format!("entry {e:?}: variable index above {}", self.nvars));
            }
            if e.b == 0 || e.b > self.block_sizes.len() {
                return bad(format!("entry {e:?}: block index out of range"));
            }
            let dim = self.block_dim(e.b);
            if e.i == 0 || e.i > e.j || e.j > dim {
                return bad(format!("entry {e:?}: need 1 <= i <= j <= {dim}"));
            }
            if self.block_sizes[e.b - 1] < 0 && e.i != e.j {
                return bad(format!(
                    "entry {e:?}: off-diagonal entry in a diagonal block"
                ));
            }
            if e.v == 0.0 || !e.v.is_finite() {
                return bad(format!("entry {e:?}: value must be finite and nonzero"));
            }
            if !seen.insert(e.key()) {
                return bad(format!("entry {e:?}: duplicate position"));
            }
        }
        if let Some(c) = self.c.iter().find(|c| !c.is_finite()) {
            return bad(format!("non-finite objective coefficient {c}"));
        }
        Ok(())
    }
}

/// Standard form of a relaxation. An affine entry `k + sum a_l y_l` becomes
/// `a_l` in `F_l` and `-k` in `F_0`.
pub fn to_sdp(rel: &Relaxation) -> SdpProblem {
    let mut entries = Vec::new();
    for (b, block) in rel.blocks.iter().enumerate() {
        for (i, j, expr) in block.upper() {
            let at = |l: usize, v: f64| SparseEntry {
                l,
                b: b + 1,
                i: i + 1,
                j: j + 1,
                v,
            };
            if expr.constant != 0.0 {
                entries.push(at(0, -expr.constant));
            }
            for (l, a) in expr.coeffs() {
                entries.push(at(l, a));
            }
        }
    }
    let mut c = vec![0.0; rel.nvars];
    for (l, a) in rel.objective.coeffs() {
        c[l - 1] = a;
    }
    let mut p = SdpProblem {
        nvars: rel.nvars,
        block_sizes: rel.blocks.iter().map(|b| b.size() as i64).collect(),
        c,
        entries,
    };
    p.sort_entries();
    p
}

pub fn write_sdpa<W: Write>(p: &SdpProblem, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", p.nvars)?;
    writeln!(out, "{}", p.block_sizes.len())?;
    let sizes: Vec<String> = p.block_sizes.iter().map(i64::to_string).collect();
    writeln!(out, "{}", sizes.join(" "))?;
    let c: Vec<String> = p.c.iter().map(|&v| format_real(v)).collect();
    writeln!(out, "{}", c.join(" "))?;
    let mut order: Vec<&SparseEntry> = p.entries.iter().collect();
    order.sort_by_key(|e| e.key());
    for e in order {
        writeln!(out, "{} {} {} {} {}", e.l, e.b, e.i, e.j, format_real(e.v))?;
    }
    out.flush()
}

pub fn to_sdpa_string(p: &SdpProblem) -> String {
    let mut buf = Vec::new();
    write_sdpa(p, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("output is ASCII")
}

fn is_comment(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with('"') || t.starts_with('*')
}

fn header_tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || matches!(c, '{' | '}' | '(' | ')' | ','))
        .filter(|t| !t.is_empty())
}

struct Lines<R> {
    inner: io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<Option<String>, SdpaError> {
        match self.inner.next() {
            None => Ok(None),
            Some(line) => {
                self.number += 1;
                Ok(Some(line?))
            }
        }
    }

    fn parse_err(&self, message: impl Into<String>) -> SdpaError {
        SdpaError::Parse {
            line: self.number,
            message: message.into(),
        }
    }

    /// Collects `count` header tokens, spanning lines if needed.
    fn tokens(&mut self, count: usize, what: &str) -> Result<Vec<String>, SdpaError> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let line = self.next_line()?.ok_or_else(|| {
                self.parse_err(format!("unexpected end of file while reading {what}"))
            })?;
            out.extend(
                header_tokens(&line)
                    .take(count - out.len())
                    .map(str::to_owned),
            );
        }
        Ok(out)
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, SdpaError> {
    tok.parse().map_err(|_| SdpaError::Parse {
        line,
        message: format!("cannot read {what} from {tok:?}"),
    })
}

pub fn read_sdpa<R: BufRead>(source: R) -> Result<SdpProblem, SdpaError> {
    let mut lines = Lines {
        inner: source.lines(),
        number: 0,
    };
    let nvars_line = loop {
        match lines.next_line()? {
            None => return Err(lines.parse_err("empty input")),
            Some(l) if is_comment(&l) || l.trim().is_empty() => continue,
            Some(l) => break l,
        }
    };
    let first = header_tokens(&nvars_line)
        .next()
        .ok_or_else(|| lines.parse_err("missing variable count"))?;
    let nvars: usize = parse_num(first, lines.number, "variable count")?;
    let nblocks_tok = lines.tokens(1, "block count")?;
    let nblocks: usize = parse_num(&nblocks_tok[0], lines.number, "block count")?;
    let mut block_sizes = Vec::with_capacity(nblocks);
    for tok in lines.tokens(nblocks, "block sizes")? {
        block_sizes.push(parse_num::<i64>(&tok, lines.number, "block size")?);
    }
    let mut c = Vec::with_capacity(nvars);
    if nvars > 0 {
        for tok in lines.tokens(nvars, "objective vector")? {
            c.push(parse_num::<f64>(
                &tok,
                lines.number,
                "objective coefficient",
            )?);
        }
    }

    let mut entries = Vec::new();
    while let Some(line) = lines.next_line()? {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() < 5 {
            return Err(lines.parse_err(format!("expected `l b i j v`, got {:?}", line.trim())));
        }
        let n = lines.number;
        entries.push(SparseEntry {
            l: parse_num(toks[0], n, "variable index")?,
            b: parse_num(toks[1], n, "block index")?,
            i: parse_num(toks[2], n, "row index")?,
            j: parse_num(toks[3], n, "column index")?,
            v: parse_num(toks[4], n, "value")?,
        });
    }
    let p = SdpProblem {
        nvars,
        block_sizes,
        c,
        entries,
    };
    p.validate()?;
    Ok(p)
}

pub fn read_sdpa_str(text: &str) -> Result<SdpProblem, SdpaError> {
    read_sdpa(text.as_bytes())
}
