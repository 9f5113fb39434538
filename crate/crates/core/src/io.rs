//! Binary and text formats for graphs, features and permutations.
//!
//! All binary integers and floats are little-endian.
//!
//! Feature graph (`RIG1`): magic, `n: u32`, `d: u32`, `t: u32`, then
//! `n * ceil(d/64)` `u64` bit words row by row (bit `k % 64` of word `k / 64`
//! is entry `k`), then `edges: u64` and that many `(i: u32, j: u32)` pairs
//! with `i < j` in lexicographic order. A bare feature matrix uses `t = 0`
//! and no edges.
//!
//! Observed graph (`OBS1`): magic, `n: u32`, `d: u32`, then `n * d` `f64`
//! entries row by row, then the edge block as above.

use std::fs;
use std::path::Path;

use crate::bits::BitMatrix;
use crate::dense::RealMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphgen::ObservedGraph;
use crate::perm::Permutation;

const RIG_MAGIC: &[u8; 4] = b"RIG1";
const OBS_MAGIC: &[u8; 4] = b"OBS1";

fn put_u32(buf: &mut Vec<u8>, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Format(format!("{v} does not fit in u32")))?;
    buf.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

fn put_edges(buf: &mut Vec<u8>, g: &Graph) {
    buf.extend_from_slice(&(g.edge_count() as u64).to_le_bytes());
    for (i, j) in g.edges() {
        buf.extend_from_slice(&i.to_le_bytes());
        buf.extend_from_slice(&j.to_le_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("unexpected end of data".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn magic(&mut self, expect: &[u8; 4]) -> Result<()> {
        if self.take(4)? != expect {
            return Err(Error::Format(format!(
                "bad magic, expected {}",
                String::from_utf8_lossy(expect)
            )));
        }
        Ok(())
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn edges(&mut self, n: usize) -> Result<Graph> {
        let count = self.u64()?;
        if count > (self.bytes.len() - self.pos) as u64 / 8 {
            return Err(Error::Format(format!("edge count {count} exceeds data")));
        }
        let mut edges = Vec::with_capacity(count as usize);
        let mut prev: Option<(u32, u32)> = None;
        for _ in 0..count {
            let e = (self.u32()?, self.u32()?);
            if e.0 >= e.1 || prev.is_some_and(|p| p >= e) {
                return Err(Error::Format("edges must satisfy i < j, sorted, distinct".into()));
            }
            prev = Some(e);
            edges.push(e);
        }
        Graph::from_edges(n, &edges)
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}

pub fn encode_rig(x: &BitMatrix, g: &Graph, t: u32) -> Result<Vec<u8>> {
    if g.n() != x.rows() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: (g.n(), g.n()),
        });
    }
    let mut buf = Vec::with_capacity(24 + 8 * x.words().len() + 8 * g.edge_count());
    buf.extend_from_slice(RIG_MAGIC);
    put_u32(&mut buf, x.rows())?;
    put_u32(&mut buf, x.cols())?;
    buf.extend_from_slice(&t.to_le_bytes());
    for w in x.words() {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    put_edges(&mut buf, g);
    Ok(buf)
}

pub fn decode_rig(bytes: &[u8]) -> Result<(BitMatrix, Graph, u32)> {
    let mut r = Reader::new(bytes);
    r.magic(RIG_MAGIC)?;
    let n = r.u32()? as usize;
    let d = r.u32()? as usize;
    let t = r.u32()?;
    let nwords = n
        .checked_mul(d.div_ceil(64))
        .ok_or_else(|| Error::Format("matrix too large".into()))?;
    let raw = r.take(nwords.checked_mul(8).ok_or_else(|| Error::Format("matrix too large".into()))?)?;
    let words = raw
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let x = BitMatrix::from_words(n, d, words)?;
    let g = r.edges(n)?;
    r.finish()?;
    Ok((x, g, t))
}

pub fn encode_observed(obs: &ObservedGraph) -> Result<Vec<u8>> {
    let y = obs.features();
    let mut buf = Vec::with_capacity(20 + 8 * y.as_slice().len() + 8 * obs.graph().edge_count());
    buf.extend_from_slice(OBS_MAGIC);
    put_u32(&mut buf, y.rows())?;
    put_u32(&mut buf, y.cols())?;
    for v in y.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    put_edges(&mut buf, obs.graph());
    Ok(buf)
}

pub fn decode_observed(bytes: &[u8]) -> Result<ObservedGraph> {
    let mut r = Reader::new(bytes);
    r.magic(OBS_MAGIC)?;
    let n = r.u32()? as usize;
    let d = r.u32()? as usize;
    let len = n
        .checked_mul(d)
        .and_then(|l| l.checked_mul(8))
        .ok_or_else(|| Error::Format("matrix too large".into()))?;
    let data = r
        .take(len)?
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let y = RealMatrix::from_vec(n, d, data)?;
    let g = r.edges(n)?;
    r.finish()?;
    ObservedGraph::new(y, g)
}

/// One `i j` pair per line, `i < j`.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(g.edge_count() * 12);
    for (i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

/// Parses an edge list; blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str, n: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Format(format!("line {}: expected `i j`", lineno + 1));
        let mut parts = line.split_whitespace();
        let i = parts.next().ok_or_else(bad)?.parse::<u32>().map_err(|_| bad())?;
        let j = parts.next().ok_or_else(bad)?.parse::<u32>().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        edges.push((i, j));
    }
    Graph::from_edges(n, &edges)
}

/// `n=<n>` on the first line, then the image of each vertex in order.
pub fn format_permutation(p: &Permutation) -> String {
    let mut out = format!("n={}\n", p.len());
    for v in p.as_slice() {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty permutation file".into()))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format(format!("bad header `{header}`")))?;
    let images: Vec<usize> = lines
        .map(|l| l.parse().map_err(|_| Error::Format(format!("bad entry `{l}`"))))
        .collect::<Result<_>>()?;
    if images.len() != n {
        return Err(Error::Format(format!("header says {n} entries, found {}", images.len())));
    }
    Permutation::new(images)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn save_rig(path: &Path, x: &BitMatrix, g: &Graph, t: u32) -> Result<()> {
    write_file(path, &encode_rig(x, g, t)?)
}

pub fn load_rig(path: &Path) -> Result<(BitMatrix, Graph, u32)> {
    decode_rig(&read_file(path)?)
}

pub fn save_observed(path: &Path, obs: &ObservedGraph) -> Result<()> {
    write_file(path, &encode_observed(obs)?)
}

pub fn load_observed(path: &Path) -> Result<ObservedGraph> {
    decode_observed(&read_file(path)?)
}

pub fn save_permutation(path: &Path, p: &Permutation) -> Result<()> {
    write_file(path, format_permutation(p).as_bytes())
}

pub fn load_permutation(path: &Path) -> Result<Permutation> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Format("permutation file is not UTF-8".into()))?;
    parse_permutation(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rig_round_trip() {
        let x = BitMatrix::from_fn(4, 70, |i, k| (i * 7 + k) % 5 == 0);
        let g = Graph::from_edges(4, &[(0, 3), (1, 2), (0, 1)]).unwrap();
        let bytes = encode_rig(&x, &g, 2).unwrap();
        assert_eq!(&bytes[..4], b"RIG1");
        let (x2, g2, t) = decode_rig(&bytes).unwrap();
        assert_eq!((x2, g2, t), (x, g, 2));
    }

    #[test]
    fn rig_rejects_corruption() {
        let x = BitMatrix::zeros(2, 3);
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let bytes = encode_rig(&x, &g, 1).unwrap();
        assert!(decode_rig(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_rig(&extra).is_err());
        let mut swapped = bytes.clone();
        let len = swapped.len();
        swapped[len - 8..len - 4].copy_from_slice(&1u32.to_le_bytes());
        swapped[len - 4..].copy_from_slice(&0u32.to_le_bytes());
        assert!(decode_rig(&swapped).is_err());
        let mut magic = bytes;
        magic[0] = b'X';
        assert!(decode_rig(&magic).is_err());
    }

    #[test]
    fn observed_round_trip() {
        let y = RealMatrix::from_rows(&[vec![0.25, -1.5], vec![3.0, 1e-300], vec![0.0, 2.0]]).unwrap();
        let g = Graph::from_edges(3, &[(0, 2)]).unwrap();
        let obs = ObservedGraph::new(y, g).unwrap();
        let back = decode_observed(&encode_observed(&obs).unwrap()).unwrap();
        assert_eq!(back, obs);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(5, &[(3, 1), (0, 4), (2, 3)]).unwrap();
        let text = format_edge_list(&g);
        assert_eq!(text, "0 4\n1 3\n2 3\n");
        assert_eq!(parse_edge_list(&text, 5).unwrap(), g);
        assert!(parse_edge_list("0 1 2\n", 3).is_err());
        assert!(parse_edge_list("0 9\n", 3).is_err());
    }

    #[test]
    fn permutation_text() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let text = format_permutation(&p);
        assert_eq!(text, "n=3\n2\n0\n1\n");
        assert_eq!(parse_permutation(&text).unwrap(), p);
        assert!(parse_permutation("n=2\n0\n0\n").is_err());
        assert!(parse_permutation("n=3\n0\n1\n").is_err());
    }
}
