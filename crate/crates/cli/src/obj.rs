//! Wavefront OBJ and small whitespace-separated input files.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: face with {count} vertices (only triangles are supported)")]
    Polygon { line: usize, count: usize },
    #[error("line {line}: vertex index {index} out of range")]
    Index { line: usize, index: i64 },
    #[error("no faces")]
    Empty,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Obj {
    pub positions: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, "missing value"))?;
    tok.parse().map_err(|_| syntax(line, format!("bad number `{tok}`")))
}

pub fn parse_obj(text: &str) -> Result<Obj, ParseError> {
    let mut obj = Obj::default();
    let mut raw_faces = Vec::new();
    for (k, l) in text.lines().enumerate() {
        let line = k + 1;
        let mut it = l.split_whitespace();
        match it.next() {
            Some("v") => {
                let p = [number(it.next(), line)?, number(it.next(), line)?, number(it.next(), line)?];
                obj.positions.push(p);
            }
            Some("f") => {
                let refs: Vec<&str> = it.collect();
                if refs.len() != 3 {
                    return Err(ParseError::Polygon { line, count: refs.len() });
                }
                let mut f = [0i64; 3];
                for (c, r) in refs.iter().enumerate() {
                    f[c] = number(r.split('/').next(), line)?;
                }
                raw_faces.push((line, f));
            }
            _ => {}
        }
    }
    let n = obj.positions.len() as i64;
    for (line, f) in raw_faces {
        let mut t = [0usize; 3];
        for c in 0..3 {
            let i = f[c];
            let abs = if i > 0 { i - 1 } else { n + i };
            if i == 0 || abs < 0 || abs >= n {
                return Err(ParseError::Index { line, index: i });
            }
            t[c] = abs as usize;
        }
        obj.faces.push(t);
    }
    if obj.faces.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(obj)
}

/// One float per line (blank lines and `#` comments skipped).
pub fn parse_values(text: &str) -> Result<Vec<f64>, ParseError> {
    rows(text).map(|(line, toks)| number(toks.first().copied(), line)).collect()
}

/// Whitespace-separated vertex ids.
pub fn parse_ids(text: &str) -> Result<Vec<usize>, ParseError> {
    let mut out = Vec::new();
    for (line, toks) in rows(text) {
        for t in toks {
            out.push(number(Some(t), line)?);
        }
    }
    Ok(out)
}

/// `i j ℓ` records, keyed by the unordered pair.
pub fn parse_lengths(text: &str) -> Result<HashMap<(usize, usize), f64>, ParseError> {
    let mut out = HashMap::new();
    for (line, toks) in rows(text) {
        let mut it = toks.into_iter();
        let i: usize = number(it.next(), line)?;
        let j: usize = number(it.next(), line)?;
        let l: f64 = number(it.next(), line)?;
        out.insert((i.min(j), i.max(j)), l);
    }
    Ok(out)
}

/// `i x y z` records.
pub fn parse_field(text: &str) -> Result<Vec<(usize, [f64; 3])>, ParseError> {
    let mut out = Vec::new();
    for (line, toks) in rows(text) {
        let mut it = toks.into_iter();
        let i = number(it.next(), line)?;
        out.push((i, [number(it.next(), line)?, number(it.next(), line)?, number(it.next(), line)?]));
    }
    Ok(out)
}

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((k + 1, toks))
    })
}

pub fn write_obj(positions: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for p in positions {
        s.push_str(&format!("v {:.17e} {:.17e} {:.17e}\n", p[0], p[1], p[2]));
    }
    for f in faces {
        s.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    s
}
