//! Plain-text cell masks: a header line `d N_1 [N_2]` followed by `0`/`1`
//! cell values in row-major order (axis 0 slowest), whitespace separated.

use super::CustomMask;
use crate::error::{Error, Result};
use std::path::Path;

pub fn parse(text: &str, cell_size: f64) -> Result<CustomMask> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let bad = |msg: String| Error::InvalidDomain(format!("mask file: {msg}"));
    let d: usize = tokens
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .parse()
        .map_err(|e| bad(format!("dimension: {e}")))?;
    if !(1..=2).contains(&d) {
        return Err(bad(format!("dimension {d} not supported")));
    }
    let mut dims = Vec::with_capacity(d);
    for _ in 0..d {
        let n: usize = tokens
            .next()
            .ok_or_else(|| bad("truncated header".into()))?
            .parse()
            .map_err(|e| bad(format!("size: {e}")))?;
        dims.push(n);
    }
    let total: usize = dims.iter().product();
    let mut cells = Vec::with_capacity(total);
    for tok in tokens {
        match tok {
            "0" => cells.push(false),
            "1" => cells.push(true),
            other => return Err(bad(format!("unexpected cell value {other:?}"))),
        }
    }
    if cells.len() != total {
        return Err(bad(format!("expected {total} cells, found {}", cells.len())));
    }
    Ok(CustomMask { dims, cells, cell_size })
}

pub fn load(path: &Path, cell_size: f64) -> Result<CustomMask> {
    parse(&std::fs::read_to_string(path)?, cell_size)
}

pub fn render(mask: &CustomMask) -> String {
    let mut out = String::new();
    out.push_str(&mask.dims.len().to_string());
    for n in &mask.dims {
        out.push(' ');
        out.push_str(&n.to_string());
    }
    out.push('\n');
    let row = *mask.dims.last().unwrap();
    for chunk in mask.cells.chunks(row) {
        let line: Vec<&str> = chunk.iter().map(|&c| if c { "1" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let text = "2 3 4\n0 0 0 0\n0 1 1 0\n0 0 0 0\n";
        let m = parse(text, 0.5).unwrap();
        assert_eq!(m.dims, vec![3, 4]);
        assert_eq!(m.cells.iter().filter(|&&c| c).count(), 2);
        assert_eq!(render(&m), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("", 1.0).is_err());
        assert!(parse("3 2 2 2", 1.0).is_err());
        assert!(parse("1 3\n0 1", 1.0).is_err());
        assert!(parse("1 3\n0 2 0", 1.0).is_err());
    }
}
