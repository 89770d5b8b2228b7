//! Brute-force enumeration of all automorphisms of a [`SumGraph`].
//!
//! This is an oracle: it knows nothing about subspaces or fields, only the
//! adjacency bits. Candidates start from the coarsest equitable partition
//! refining the degree partition, which every automorphism preserves. The
//! search then maps vertices one at a time, always branching on the
//! unmapped vertex with the fewest remaining candidates, and intersects
//! every other candidate set with the neighborhood (or non-neighborhood) of
//! the new image.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::permutation::VertexPermutation;
use crate::ssgraph::SumGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of tentative assignments before giving up.
    pub node_limit: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_limit: Caps::default().search_nodes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    pub automorphisms: u64,
    pub nodes: u64,
    /// Cells of the initial equitable partition.
    pub cells: usize,
    /// Whether degree alone already separates the dimension classes on this
    /// instance.
    pub degrees_separate_dimensions: bool,
}

/// Coarsest equitable refinement of the degree partition. Cell labels are
/// assigned in sorted order of their signatures, so they do not depend on
/// vertex numbering.
pub fn equitable_partition(graph: &SumGraph) -> Vec<u32> {
    let n = graph.len();
    let degrees: Vec<usize> = (0..n).map(|i| graph.adjacency().row_count(i)).collect();
    let mut colors = relabel(&degrees);
    loop {
        let cells = colors.iter().max().map_or(0, |&c| c as usize + 1);
        let signatures: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut counts = vec![0u32; cells];
                for u in graph.neighbors(v) {
                    counts[colors[u] as usize] += 1;
                }
                (colors[v], counts)
            })
            .collect();
        let refined = relabel(&signatures);
        let refined_cells = refined.iter().max().map_or(0, |&c| c as usize + 1);
        if refined_cells == cells {
            return refined;
        }
        colors = refined;
    }
}

fn relabel<T: Ord + Clone>(keys: &[T]) -> Vec<u32> {
    let mut order: BTreeMap<T, u32> = keys.iter().cloned().map(|k| (k, 0)).collect();
    for (i, slot) in order.values_mut().enumerate() {
        *slot = i as u32;
    }
    keys.iter().map(|k| order[k]).collect()
}

struct Search<'a, F> {
    size: usize,
    words: usize,
    adj: &'a [u64],
    nonadj: Vec<u64>,
    levels: Vec<u64>,
    mapping: Vec<u32>,
    mapped: Vec<bool>,
    nodes: u64,
    found: u64,
    limit: u64,
    visit: F,
}

const UNMAPPED: u32 = u32::MAX;

impl<F: FnMut(&[u32]) -> ControlFlow<()>> Search<'_, F> {
    fn level(&self, depth: usize) -> &[u64] {
        let stride = self.size * self.words;
        &self.levels[depth * stride..(depth + 1) * stride]
    }

    fn popcount(cands: &[u64]) -> u32 {
        cands.iter().map(|w| w.count_ones()).sum()
    }

    fn run(&mut self, depth: usize) -> Result<ControlFlow<()>> {
        if depth == self.size {
            self.found += 1;
            return Ok((self.visit)(&self.mapping));
        }
        let words = self.words;
        // Fail-first: fewest candidates, ties to the smallest id.
        let mut best = None;
        {
            let cur = self.level(depth);
            for v in (0..self.size).filter(|&v| !self.mapped[v]) {
                let c = Self::popcount(&cur[v * words..(v + 1) * words]);
                if best.is_none_or(|(_, bc)| c < bc) {
                    best = Some((v, c));
                }
            }
        }
        let (v, _) = best.expect("at least one vertex is unmapped");
        let stride = self.size * words;
        let cands: Vec<u64> = self.level(depth)[v * words..(v + 1) * words].to_vec();
        for (wi, &word) in cands.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let w = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                self.nodes += 1;
                if self.nodes > self.limit {
                    return Err(Error::SearchLimit { limit: self.limit, found: self.found });
                }
                let (head, tail) = self.levels.split_at_mut((depth + 1) * stride);
                let cur = &head[depth * stride..];
                let next = &mut tail[..stride];
                let adj_w = &self.adj[w * words..(w + 1) * words];
                let non_w = &self.nonadj[w * words..(w + 1) * words];
                let v_row = &self.adj[v * words..(v + 1) * words];
                let mut dead = false;
                for u in (0..self.size).filter(|&u| u != v && !self.mapped[u]) {
                    let filter = if v_row[u / 64] >> (u % 64) & 1 == 1 { adj_w } else { non_w };
                    let mut any = 0u64;
                    for k in 0..words {
                        let x = cur[u * words + k] & filter[k];
                        next[u * words + k] = x;
                        any |= x;
                    }
                    if any == 0 {
                        dead = true;
                        break;
                    }
                }
                if dead {
                    continue;
                }
                self.mapping[v] = w as u32;
                self.mapped[v] = true;
                let flow = self.run(depth + 1)?;
                self.mapped[v] = false;
                self.mapping[v] = UNMAPPED;
                if flow.is_break() {
                    return Ok(flow);
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Streams every automorphism to `visit` as an image array (0-based ids),
/// in search order. `visit` may stop the search early.
pub fn for_each_automorphism<F>(graph: &SumGraph, options: SearchOptions, visit: F) -> Result<SearchStats>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    let size = graph.len();
    let degrees_separate_dimensions = graph.degrees_separate_dimensions();
    let colors = equitable_partition(graph);
    let cells = colors.iter().max().map_or(0, |&c| c as usize + 1);
    let adjacency = graph.adjacency();
    let words = adjacency.words();
    let adj: &[u64] = &(0..size).flat_map(|i| adjacency.row(i).iter().copied()).collect::<Vec<_>>();
    let mut nonadj = vec![0u64; size * words];
    for w in 0..size {
        for u in (0..size).filter(|&u| u != w && !adjacency.get(w, u)) {
            nonadj[w * words + u / 64] |= 1 << (u % 64);
        }
    }
    let mut levels = vec![0u64; (size + 1) * size * words];
    for v in 0..size {
        for u in (0..size).filter(|&u| colors[u] == colors[v]) {
            levels[v * words + u / 64] |= 1 << (u % 64);
        }
    }
    let mut search = Search {
        size,
        words,
        adj,
        nonadj,
        levels,
        mapping: vec![UNMAPPED; size],
        mapped: vec![false; size],
        nodes: 0,
        found: 0,
        limit: options.node_limit,
        visit,
    };
    if size > 0 {
        let _ = search.run(0)?;
    }
    Ok(SearchStats { automorphisms: search.found, nodes: search.nodes, cells, degrees_separate_dimensions })
}

/// All automorphisms, sorted lexicographically by image sequence.
pub fn enumerate_automorphisms(graph: &SumGraph, options: SearchOptions) -> Result<Vec<VertexPermutation>> {
    let mut out = Vec::new();
    for_each_automorphism(graph, options, |images| {
        out.push(VertexPermutation::new(images.to_vec()).expect("search yields bijections"));
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

pub fn count_automorphisms(graph: &SumGraph, options: SearchOptions) -> Result<u64> {
    Ok(for_each_automorphism(graph, options, |_| ControlFlow::Continue(()))?.automorphisms)
}
