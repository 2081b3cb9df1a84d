//! Connected induced subgraphs on 3 to 5 nodes.
//!
//! Enumeration follows the ESU scheme: every subgraph is grown from its
//! smallest node, and a node may only join the extension set through a
//! vertex whose exclusive neighbourhood contains it. Each connected node set
//! is therefore produced exactly once.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::atlas::{
    pair_bit, pair_index, GraphletAtlas, GRAPHLET_COUNT, MAX_SIZE, MIN_SIZE, ORBIT_COUNT, ORDERED_COUNT,
};
use crate::measures::WeightPool;
use crate::psn::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OccurrenceEdge {
    /// Positions of the endpoints within `Occurrence::nodes`.
    pub a: u8,
    pub b: u8,
    /// Edge index in the host graph.
    pub edge: u32,
    /// Global edge-orbit id.
    pub orbit: u8,
}

/// One connected induced subgraph, classified.
#[derive(Debug, Clone, Copy)]
pub struct Occurrence<'a> {
    /// Host node ids, ascending.
    pub nodes: &'a [u32],
    /// Labeled adjacency code over `nodes` in ascending order.
    pub code: u16,
    pub graphlet: usize,
    /// All host edges among `nodes`, in lexicographic pair order.
    pub edges: &'a [OccurrenceEdge],
}

pub trait OccurrenceVisitor {
    fn visit(&mut self, occ: &Occurrence<'_>);
}

impl<F: FnMut(&Occurrence<'_>)> OccurrenceVisitor for F {
    fn visit(&mut self, occ: &Occurrence<'_>) {
        self(occ)
    }
}

/// Partial results that combine by addition.
pub trait Merge {
    fn merge(&mut self, other: Self);
}

/// Delivers every connected induced subgraph on 3..=5 nodes to `visitor`.
pub fn enumerate<V: OccurrenceVisitor + ?Sized>(graph: &WeightedGraph, atlas: &GraphletAtlas, visitor: &mut V) {
    let mut esu = Esu::new(graph, atlas);
    for root in 0..graph.node_count() {
        esu.run_root(root as u32, visitor);
    }
}

/// Parallel enumeration over roots. Each worker fills its own visitor from
/// `init`; the partial visitors are merged at the end.
pub fn enumerate_parallel<V, F>(graph: &WeightedGraph, atlas: &GraphletAtlas, init: F) -> V
where
    V: OccurrenceVisitor + Merge + Send,
    F: Fn() -> V + Sync + Send,
{
    let n = graph.node_count();
    let chunks = (rayon::current_num_threads() * 4).clamp(1, n.max(1));
    let chunk_len = n.div_ceil(chunks).max(1);
    (0..n)
        .into_par_iter()
        .with_min_len(chunk_len)
        .fold(
            || (Esu::new(graph, atlas), init()),
            |(mut esu, mut v), root| {
                esu.run_root(root as u32, &mut v);
                (esu, v)
            },
        )
        .map(|(_, v)| v)
        .reduce_with(|mut a, b| {
            a.merge(b);
            a
        })
        .unwrap_or_else(init)
}

struct Esu<'g> {
    graph: &'g WeightedGraph,
    atlas: &'g GraphletAtlas,
    sub: Vec<u32>,
    sorted: [u32; MAX_SIZE],
    edges: Vec<OccurrenceEdge>,
}

impl<'g> Esu<'g> {
    fn new(graph: &'g WeightedGraph, atlas: &'g GraphletAtlas) -> Self {
        Self { graph, atlas, sub: Vec::with_capacity(MAX_SIZE), sorted: [0; MAX_SIZE], edges: Vec::with_capacity(10) }
    }

    fn run_root<V: OccurrenceVisitor + ?Sized>(&mut self, root: u32, visitor: &mut V) {
        self.sub.clear();
        self.sub.push(root);
        let ext: Vec<u32> = self.graph.neighbors(root as usize).iter().map(|&(u, _)| u).filter(|&u| u > root).collect();
        self.extend(root, ext, visitor);
    }

    fn extend<V: OccurrenceVisitor + ?Sized>(&mut self, root: u32, mut ext: Vec<u32>, visitor: &mut V) {
        while let Some(w) = ext.pop() {
            let grow = self.sub.len() + 1 < MAX_SIZE;
            let next_ext = if grow {
                let mut next = ext.clone();
                for &(u, _) in self.graph.neighbors(w as usize) {
                    if u > root && self.is_exclusive(u) {
                        next.push(u);
                    }
                }
                next
            } else {
                Vec::new()
            };
            self.sub.push(w);
            if self.sub.len() >= MIN_SIZE {
                self.emit(visitor);
            }
            if grow {
                self.extend(root, next_ext, visitor);
            }
            self.sub.pop();
        }
    }

    /// `u` is outside the current subgraph and adjacent to none of it.
    #[inline]
    fn is_exclusive(&self, u: u32) -> bool {
        self.sub.iter().all(|&s| s != u && !self.graph.is_adjacent(s as usize, u as usize))
    }

    fn emit<V: OccurrenceVisitor + ?Sized>(&mut self, visitor: &mut V) {
        let k = self.sub.len();
        let nodes = &mut self.sorted[..k];
        nodes.copy_from_slice(&self.sub);
        nodes.sort_unstable();

        let mut code = 0u16;
        for a in 0..k {
            for b in a + 1..k {
                if self.graph.is_adjacent(nodes[a] as usize, nodes[b] as usize) {
                    code |= pair_bit(k, a, b);
                }
            }
        }
        let entry = self.atlas.lookup(k, code).expect("ESU only yields connected subgraphs");
        self.edges.clear();
        for a in 0..k {
            for b in a + 1..k {
                if code & pair_bit(k, a, b) != 0 {
                    let edge = self
                        .graph
                        .edge_index(nodes[a] as usize, nodes[b] as usize)
                        .expect("adjacent nodes share an edge") as u32;
                    let orbit = entry.orbit(pair_index(k, a, b)).expect("edge has an orbit") as u8;
                    self.edges.push(OccurrenceEdge { a: a as u8, b: b as u8, edge, orbit });
                }
            }
        }
        visitor.visit(&Occurrence { nodes, code, graphlet: entry.graphlet as usize, edges: &self.edges });
    }
}

/// Per-(edge, orbit) touch counts and weight histograms, plus the graphlet
/// and ordered-class totals seen along the way.
///
/// Histogram keys are ranks into the distinct values of the graph's weight
/// pool. A cell's histogram mass is its touch count times the edge count of
/// the orbit's graphlet.
#[derive(Debug, Clone)]
pub struct OrbitAccumulator<'p> {
    edge_count: usize,
    graphlet_counts: [u64; GRAPHLET_COUNT],
    ordered_counts: [u64; ORDERED_COUNT],
    touches: Vec<u64>,
    hists: Option<Vec<FxHashMap<u32, u32>>>,
    ranks: Option<&'p [u32]>,
    atlas: &'p GraphletAtlas,
}

impl<'p> OrbitAccumulator<'p> {
    /// Empty accumulator; histograms are kept only when `pool` is given.
    pub fn new(edge_count: usize, atlas: &'p GraphletAtlas, pool: Option<&'p WeightPool>) -> Self {
        Self {
            edge_count,
            graphlet_counts: [0; GRAPHLET_COUNT],
            ordered_counts: [0; ORDERED_COUNT],
            touches: vec![0; edge_count * ORBIT_COUNT],
            hists: pool.map(|_| vec![FxHashMap::default(); edge_count * ORBIT_COUNT]),
            ranks: pool.map(|p| p.edge_ranks()),
            atlas,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn graphlet_counts(&self) -> &[u64; GRAPHLET_COUNT] {
        &self.graphlet_counts
    }

    pub fn ordered_counts(&self) -> &[u64; ORDERED_COUNT] {
        &self.ordered_counts
    }

    #[inline]
    pub fn touches(&self, edge: usize, orbit: usize) -> u64 {
        self.touches[edge * ORBIT_COUNT + orbit]
    }

    pub fn has_histograms(&self) -> bool {
        self.hists.is_some()
    }

    /// Histogram of cell `(edge, orbit)` as `(weight rank, count)` pairs
    /// sorted by rank. Empty when histograms were not collected.
    pub fn histogram(&self, edge: usize, orbit: usize) -> Vec<(u32, u32)> {
        let Some(h) = &self.hists else { return Vec::new() };
        let mut v: Vec<(u32, u32)> = h[edge * ORBIT_COUNT + orbit].iter().map(|(&r, &c)| (r, c)).collect();
        v.sort_unstable();
        v
    }
}

impl OccurrenceVisitor for OrbitAccumulator<'_> {
    fn visit(&mut self, occ: &Occurrence<'_>) {
        self.graphlet_counts[occ.graphlet] += 1;
        if occ.nodes.len() <= 4 {
            let class = self.atlas.lookup_ordered(occ.nodes.len(), occ.code).expect("connected");
            self.ordered_counts[class] += 1;
        }
        for e in occ.edges {
            self.touches[e.edge as usize * ORBIT_COUNT + e.orbit as usize] += 1;
        }
        if let (Some(hists), Some(ranks)) = (&mut self.hists, self.ranks) {
            let mut local = [0u32; 10];
            for (slot, e) in local.iter_mut().zip(occ.edges) {
                *slot = ranks[e.edge as usize];
            }
            let local = &local[..occ.edges.len()];
            for e in occ.edges {
                let cell = &mut hists[e.edge as usize * ORBIT_COUNT + e.orbit as usize];
                for &r in local {
                    *cell.entry(r).or_insert(0) += 1;
                }
            }
        }
    }
}

impl Merge for OrbitAccumulator<'_> {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.graphlet_counts.iter_mut().zip(other.graphlet_counts) {
            *a += b;
        }
        for (a, b) in self.ordered_counts.iter_mut().zip(other.ordered_counts) {
            *a += b;
        }
        for (a, b) in self.touches.iter_mut().zip(other.touches) {
            *a += b;
        }
        if let (Some(mine), Some(theirs)) = (&mut self.hists, other.hists) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                if a.is_empty() {
                    *a = b;
                    continue;
                }
                for (r, c) in b {
                    *a.entry(r).or_insert(0) += c;
                }
            }
        }
    }
}

/// Runs the enumeration and fills an accumulator. Weight histograms are
/// collected when `pool` is given.
pub fn accumulate<'p>(
    graph: &WeightedGraph,
    atlas: &'p GraphletAtlas,
    pool: Option<&'p WeightPool>,
) -> OrbitAccumulator<'p> {
    let m = graph.edge_count();
    enumerate_parallel(graph, atlas, || OrbitAccumulator::new(m, atlas, pool))
}
