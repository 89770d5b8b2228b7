use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A bijection on the vertex ids `0..len` of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexPermutation {
    map: Vec<u32>,
}

impl VertexPermutation {
    pub fn new(map: Vec<u32>) -> Result<Self> {
        let mut hit = vec![false; map.len()];
        for (src, &dst) in map.iter().enumerate() {
            let slot = hit
                .get_mut(dst as usize)
                .ok_or_else(|| Error::NotAPermutation(format!("image {} of {} is out of range", dst + 1, src + 1)))?;
            if std::mem::replace(slot, true) {
                return Err(Error::NotAPermutation(format!("id {} is hit twice", dst + 1)));
            }
        }
        Ok(VertexPermutation { map })
    }

    pub fn identity(len: usize) -> Self {
        VertexPermutation { map: (0..len as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, id: usize) -> usize {
        self.map[id] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &VertexPermutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!("permutations of {} and {} ids", self.len(), other.len())));
        }
        Ok(VertexPermutation { map: other.map.iter().map(|&j| self.map[j as usize]).collect() })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        VertexPermutation { map: inv }
    }

    /// Swaps the images of `a` and `b`.
    pub fn with_swapped_images(&self, a: usize, b: usize) -> Self {
        let mut map = self.map.clone();
        map.swap(a, b);
        VertexPermutation { map }
    }

    /// Permutation file: one `src<TAB>dst` line per vertex, 1-based ids.
    pub fn to_file_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 8);
        for (i, &j) in self.map.iter().enumerate() {
            writeln!(out, "{}\t{}", i + 1, j + 1).unwrap();
        }
        out
    }

    /// Parses a permutation file that must mention each of `len` ids exactly
    /// once as a source. Blank lines and `#` comments are skipped.
    pub fn parse_file(text: &str, len: usize) -> Result<Self> {
        let mut map: Vec<Option<u32>> = vec![None; len];
        let parse_id = |tok: Option<&str>, line: usize| -> Result<usize> {
            let tok = tok.ok_or_else(|| Error::Parse { line, msg: "expected two tab-separated ids".into() })?;
            let id: usize = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("bad vertex id {tok:?}") })?;
            if id == 0 || id > len {
                return Err(Error::Parse { line, msg: format!("vertex id {id} outside 1..={len}") });
            }
            Ok(id - 1)
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut fields = body.split('\t');
            let src = parse_id(fields.next(), line)?;
            let dst = parse_id(fields.next(), line)?;
            if fields.next().is_some() {
                return Err(Error::Parse { line, msg: "more than two fields".into() });
            }
            if map[src].replace(dst as u32).is_some() {
                return Err(Error::Parse { line, msg: format!("vertex {} listed twice", src + 1) });
            }
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| Error::Parse {
                    line: text.lines().count() + 1,
                    msg: format!("no line for vertex {}", i + 1),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        VertexPermutation::new(map)
    }
}
