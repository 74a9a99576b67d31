//! graph6 encoding: a size header followed by the upper triangle of the
//! adjacency matrix, column by column, packed six bits per printable byte
//! (byte value = bits + 63).

use crate::error::{Error, Result};
use crate::graph::Graph;

const HEADER: &str = ">>graph6<<";

fn malformed(reason: impl Into<String>) -> Error {
    Error::Graph6(reason.into())
}

fn sixes(bytes: &[u8]) -> Result<Vec<u8>> {
    bytes
        .iter()
        .map(|&b| {
            if (63..=126).contains(&b) {
                Ok(b - 63)
            } else {
                Err(malformed(format!("byte {b:#04x} outside the printable range 63..=126")))
            }
        })
        .collect()
}

fn decode_size(data: &[u8]) -> Result<(usize, usize)> {
    let word = |digits: &[u8]| digits.iter().fold(0usize, |acc, &d| (acc << 6) | d as usize);
    match data {
        [] => Err(malformed("empty line")),
        [63, 63, rest @ ..] => {
            if rest.len() < 6 {
                return Err(malformed("truncated 36-bit size header"));
            }
            Ok((word(&rest[..6]), 8))
        }
        [63, rest @ ..] => {
            if rest.len() < 3 {
                return Err(malformed("truncated 18-bit size header"));
            }
            Ok((word(&rest[..3]), 4))
        }
        [n, ..] => Ok((*n as usize, 1)),
    }
}

/// Parses one graph6 line. A trailing newline and the optional `>>graph6<<`
/// prefix are accepted.
pub fn parse_graph6(line: &str) -> Result<Graph> {
    let line = line.trim_end_matches(['\n', '\r']);
    let line = line.strip_prefix(HEADER).unwrap_or(line);
    let data = sixes(line.as_bytes())?;
    let (n, header_len) = decode_size(&data)?;
    let body = &data[header_len..];
    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    if body.len() != need {
        return Err(malformed(format!(
            "n = {n} needs {need} body bytes, found {}",
            body.len()
        )));
    }
    let bit = |k: usize| (body[k / 6] >> (5 - k % 6)) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    if (bits..need * 6).any(bit) {
        return Err(malformed("nonzero padding bits"));
    }
    Graph::new(n, edges)
}

/// Encodes `g` as a graph6 line without the trailing newline.
pub fn emit_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8);
    } else if n <= 258_047 {
        out.push(63);
        out.extend((0..3).rev().map(|i| ((n >> (6 * i)) & 63) as u8));
    } else {
        out.extend([63, 63]);
        out.extend((0..6).rev().map(|i| ((n >> (6 * i)) & 63) as u8));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(acc << (6 - filled));
    }
    out.into_iter().map(|d| (d + 63) as char).collect()
}

/// Parses every non-empty line, reporting failures with their 1-based line number.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<Graph>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_graph6(l).map_err(|e| Error::Malformed { line: i + 1, reason: e.to_string() })
        })
        .collect()
}
