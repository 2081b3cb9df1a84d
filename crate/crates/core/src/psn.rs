//! Weighted protein structure networks.
//!
//! Nodes are residues. Two residues are joined when their closest heavy-atom
//! distance is strictly below the cutoff; the edge weight is
//! `sqrt(|i - j| / d_space)`, which favours residues that are far apart in
//! sequence but close in space.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pdb::{Residue, ResidueChain};

pub const DEFAULT_CUTOFF: f64 = 6.0;

/// Simple undirected graph with one real weight per edge.
///
/// Edges are stored once with `i < j`, sorted by `(i, j)`; the position of an
/// edge in that order is its edge index.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    weights: Vec<f64>,
    adj: Vec<Vec<(u32, u32)>>,
    words: usize,
    bits: Vec<u64>,
}

impl WeightedGraph {
    /// Builds a graph from `(i, j, weight)` triples over nodes `0..n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::Input(format!("{n} nodes is too many")));
        }
        let mut list: Vec<(u32, u32, f64)> = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::Input(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Input(format!("edge ({a}, {b}) outside 0..{n}")));
            }
            if !w.is_finite() {
                return Err(Error::Input(format!("non-finite weight on edge ({a}, {b})")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            list.push((i as u32, j as u32, w));
        }
        list.sort_by_key(|x| (x.0, x.1));
        if let Some(w) = list.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Input(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }

        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        let mut adj = vec![Vec::new(); n];
        let mut pairs = Vec::with_capacity(list.len());
        let mut weights = Vec::with_capacity(list.len());
        for (e, &(i, j, w)) in list.iter().enumerate() {
            let (iu, ju) = (i as usize, j as usize);
            bits[iu * words + ju / 64] |= 1 << (ju % 64);
            bits[ju * words + iu / 64] |= 1 << (iu % 64);
            adj[iu].push((j, e as u32));
            adj[ju].push((i, e as u32));
            pairs.push((i, j));
            weights.push(w);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self { n, edges: pairs, weights, adj, words, bits })
    }

    /// Same topology with every weight replaced by `f(weight)`.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let weights: Vec<f64> = self.weights.iter().map(|&w| f(w)).collect();
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Input("weight transform produced a non-finite value".into()));
        }
        Ok(Self { weights, ..self.clone() })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sorted `(neighbor, edge index)` pairs of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[v]
    }

    #[inline]
    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let nb = &self.adj[a];
        nb.binary_search_by_key(&(b as u32), |&(u, _)| u).ok().map(|k| nb[k].1 as usize)
    }
}

/// Which residue numbering feeds the sequence distance `|i - j|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequencePositions {
    /// 1-based ordinal among the observed residues.
    #[default]
    Ordinal,
    /// Author residue number from the file.
    Author,
}

impl FromStr for SequencePositions {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinal" => Ok(Self::Ordinal),
            "author" => Ok(Self::Author),
            _ => Err(Error::Input(format!("unknown sequence position mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsnOptions {
    pub cutoff: f64,
    pub positions: SequencePositions,
    /// Prune residue pairs with a centroid grid before the exact distance
    /// check. Output is identical either way.
    pub accelerate: bool,
}

impl Default for PsnOptions {
    fn default() -> Self {
        Self { cutoff: DEFAULT_CUTOFF, positions: SequencePositions::Ordinal, accelerate: true }
    }
}

impl PsnOptions {
    pub fn with_cutoff(cutoff: f64) -> Self {
        Self { cutoff, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct WeightedPsn {
    graph: WeightedGraph,
    d_space: Vec<f64>,
    cutoff: f64,
}

impl WeightedPsn {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Space distance of each edge, aligned with `graph().edges()`.
    pub fn space_distances(&self) -> &[f64] {
        &self.d_space
    }

    /// Text dump: a `n m cutoff` header, then one `i j d_space weight` line
    /// per edge with 1-based node ordinals.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {:.16e}", self.node_count(), self.edge_count(), self.cutoff);
        for ((&(i, j), &d), &w) in self.graph.edges().iter().zip(&self.d_space).zip(self.graph.weights()) {
            let _ = writeln!(out, "{} {} {:.16e} {:.16e}", i + 1, j + 1, d, w);
        }
        out
    }
}

/// Closest distance between any heavy atom of `a` and any of `b`.
pub fn space_distance(a: &Residue, b: &Residue) -> f64 {
    let mut best = f64::INFINITY;
    for x in &a.atoms {
        for y in &b.atoms {
            let d2 = sq_dist(&x.coords, &y.coords);
            if d2 < best {
                best = d2;
            }
        }
    }
    best.sqrt()
}

#[inline]
fn sq_dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

pub fn build_psn(chain: &ResidueChain, opts: PsnOptions) -> Result<WeightedPsn> {
    if !(opts.cutoff > 0.0 && opts.cutoff.is_finite()) {
        return Err(Error::Input(format!("cutoff must be positive, got {}", opts.cutoff)));
    }
    let residues = &chain.residues;
    let n = residues.len();
    if n < 2 {
        return Err(Error::Degenerate(format!("{} residue(s), need at least 2", n)));
    }

    let candidates: Vec<Vec<usize>> = if opts.accelerate {
        candidate_pairs(residues, opts.cutoff)
    } else {
        (0..n).map(|i| (i + 1..n).collect()).collect()
    };

    let position = |r: &Residue| match opts.positions {
        SequencePositions::Ordinal => r.ordinal as i64,
        SequencePositions::Author => r.author_number as i64,
    };

    let rows: Vec<Vec<(usize, usize, f64, f64)>> = candidates
        .into_par_iter()
        .enumerate()
        .map(|(i, js)| -> Result<Vec<_>> {
            let mut row = Vec::new();
            for j in js {
                let d = space_distance(&residues[i], &residues[j]);
                if d < opts.cutoff {
                    let seq = (position(&residues[i]) - position(&residues[j])).unsigned_abs() as f64;
                    if d == 0.0 || seq == 0.0 {
                        return Err(Error::Degenerate(format!(
                            "residues {} and {} give a zero sequence or space distance",
                            i + 1,
                            j + 1
                        )));
                    }
                    row.push((i, j, d, (seq / d).sqrt()));
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let edges: Vec<_> = rows.into_iter().flatten().collect();
    let d_space = edges.iter().map(|e| e.2).collect();
    let graph = WeightedGraph::new(n, edges.iter().map(|&(i, j, _, w)| (i, j, w)))?;
    Ok(WeightedPsn { graph, d_space, cutoff: opts.cutoff })
}

/// Residue pairs `(i, j > i)` that may lie within `cutoff`, found with a
/// uniform grid over residue centroids. Bounding spheres make the test
/// conservative, so no true contact is skipped.
fn candidate_pairs(residues: &[Residue], cutoff: f64) -> Vec<Vec<usize>> {
    let spheres: Vec<([f64; 3], f64)> = residues
        .iter()
        .map(|r| {
            let k = r.atoms.len() as f64;
            let mut c = [0.0; 3];
            for a in &r.atoms {
                for (x, v) in c.iter_mut().zip(a.coords) {
                    *x += v;
                }
            }
            c.iter_mut().for_each(|x| *x /= k);
            let rad = r.atoms.iter().map(|a| sq_dist(&a.coords, &c)).fold(0.0, f64::max).sqrt();
            (c, rad)
        })
        .collect();
    let max_rad = spheres.iter().map(|s| s.1).fold(0.0, f64::max);
    let reach = cutoff + 2.0 * max_rad + 1e-6;

    let cell_of = |p: &[f64; 3]| -> [i64; 3] {
        [(p[0] / reach).floor() as i64, (p[1] / reach).floor() as i64, (p[2] / reach).floor() as i64]
    };
    let mut grid: rustc_hash::FxHashMap<[i64; 3], Vec<usize>> = Default::default();
    for (i, (c, _)) in spheres.iter().enumerate() {
        grid.entry(cell_of(c)).or_default().push(i);
    }

    (0..residues.len())
        .into_par_iter()
        .map(|i| {
            let (ci, ri) = spheres[i];
            let cell = cell_of(&ci);
            let mut out = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let key = [cell[0] + dx, cell[1] + dy, cell[2] + dz];
                        let Some(members) = grid.get(&key) else { continue };
                        for &j in members {
                            if j <= i {
                                continue;
                            }
                            let (cj, rj) = spheres[j];
                            let gap = sq_dist(&ci, &cj).sqrt() - ri - rj;
                            if gap < cutoff + 1e-6 {
                                out.push(j);
                            }
                        }
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdb::HeavyAtom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residue(ordinal: usize, atoms: &[[f64; 3]]) -> Residue {
        Residue {
            ordinal,
            author_number: ordinal as i32,
            insertion_code: ' ',
            name: "GLY".into(),
            atoms: atoms.iter().map(|&coords| HeavyAtom { name: "C".into(), element: "C".into(), coords }).collect(),
        }
    }

    fn chain(residues: Vec<Residue>) -> ResidueChain {
        ResidueChain { protein_id: "t".into(), chain_id: 'A', residues }
    }

    fn random_chain(rng: &mut ChaCha8Rng, n: usize) -> ResidueChain {
        let mut pos = [0.0f64; 3];
        let residues = (1..=n)
            .map(|k| {
                for p in &mut pos {
                    *p += rng.gen_range(-2.5..2.5);
                }
                let atoms: Vec<[f64; 3]> = (0..rng.gen_range(1..6))
                    .map(|_| {
                        [
                            pos[0] + rng.gen_range(-1.5..1.5),
                            pos[1] + rng.gen_range(-1.5..1.5),
                            pos[2] + rng.gen_range(-1.5..1.5),
                        ]
                    })
                    .collect();
                residue(k, &atoms)
            })
            .collect();
        chain(residues)
    }

    #[test]
    fn distance_examples() {
        let a = residue(1, &[[0.0, 0.0, 0.0]]);
        let b = residue(2, &[[3.0, 4.0, 0.0]]);
        assert_eq!(space_distance(&a, &b), 5.0);
        let a = residue(1, &[[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]);
        let b = residue(2, &[[1.0, 0.0, 0.0]]);
        assert_eq!(space_distance(&a, &b), 1.0);
        assert_eq!(space_distance(&b, &a), 1.0);
    }

    #[test]
    fn distance_matches_exhaustive_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let cloud = |rng: &mut ChaCha8Rng| -> Vec<[f64; 3]> {
                (0..rng.gen_range(1..8))
                    .map(|_| [rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0)])
                    .collect()
            };
            let (ca, cb) = (cloud(&mut rng), cloud(&mut rng));
            let mut oracle = f64::INFINITY;
            for p in &ca {
                for q in &cb {
                    let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                    oracle = oracle.min(d);
                }
            }
            assert_eq!(space_distance(&residue(1, &ca), &residue(2, &cb)), oracle);
        }
    }

    #[test]
    fn weight_examples() {
        let mut rs: Vec<Residue> = (1..=101).map(|k| residue(k, &[[1000.0 * k as f64, 0.0, 0.0]])).collect();
        rs[2].atoms[0].coords = [0.0, 0.0, 0.0];
        rs[6].atoms[0].coords = [4.0, 0.0, 0.0];
        rs[0].atoms[0].coords = [0.0, 50.0, 0.0];
        rs[100].atoms[0].coords = [0.0, 54.0, 0.0];
        let psn = build_psn(&chain(rs), PsnOptions::default()).unwrap();
        assert_eq!(psn.edge_count(), 2);
        let g = psn.graph();
        assert_eq!(g.weights()[g.edge_index(2, 6).unwrap()], 1.0);
        assert_eq!(g.weights()[g.edge_index(0, 100).unwrap()], 5.0);
    }

    #[test]
    fn cutoff_is_strict() {
        let rs = vec![residue(1, &[[0.0; 3]]), residue(2, &[[6.0, 0.0, 0.0]]), residue(3, &[[0.0, 5.5, 0.0]])];
        let psn = build_psn(&chain(rs), PsnOptions::default()).unwrap();
        assert_eq!(psn.graph().edges(), &[(0, 2)]);
    }

    #[test]
    fn invariants_on_random_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let c = random_chain(&mut rng, 80);
            let fast = build_psn(&c, PsnOptions::default()).unwrap();
            let naive = build_psn(&c, PsnOptions { accelerate: false, ..Default::default() }).unwrap();
            assert_eq!(fast.to_dump(), naive.to_dump());
            assert_eq!(fast.space_distances(), naive.space_distances());

            let g = fast.graph();
            for ((&(i, j), &d), &w) in g.edges().iter().zip(fast.space_distances()).zip(g.weights()) {
                assert!(i < j && d < 6.0 && w > 0.0);
                let seq = (j - i) as f64;
                assert!(((w * w * d - seq) / seq).abs() < 1e-12);
            }

            let wider = build_psn(&c, PsnOptions::with_cutoff(8.0)).unwrap();
            for &(i, j) in g.edges() {
                assert!(wider.graph().edge_index(i as usize, j as usize).is_some());
            }
        }
    }

    #[test]
    fn long_range_gets_more_weight() {
        let rs: Vec<Residue> = (1..=30).map(|k| residue(k, &[[100.0 * k as f64, 0.0, 0.0]])).collect();
        let mut c = chain(rs);
        c.residues[0].atoms[0].coords = [0.0; 3];
        let mut prev = 0.0;
        for far in 1..30 {
            c.residues[far].atoms[0].coords = [0.0, 3.0, 0.0];
            let psn = build_psn(&c, PsnOptions::default()).unwrap();
            let w = psn.graph().weights()[psn.graph().edge_index(0, far).unwrap()];
            assert!(w > prev);
            prev = w;
            c.residues[far].atoms[0].coords = [100.0 * (far + 1) as f64, 0.0, 0.0];
        }
    }

    #[test]
    fn author_positions() {
        let mut rs = vec![residue(1, &[[0.0; 3]]), residue(2, &[[4.0, 0.0, 0.0]])];
        rs[1].author_number = 17;
        let c = chain(rs);
        let ord = build_psn(&c, PsnOptions::default()).unwrap();
        let auth = build_psn(&c, PsnOptions { positions: SequencePositions::Author, ..Default::default() }).unwrap();
        assert_eq!(ord.graph().weights()[0], (1.0f64 / 4.0).sqrt());
        assert_eq!(auth.graph().weights()[0], (16.0f64 / 4.0).sqrt());
    }

    #[test]
    fn dump_format() {
        let rs = vec![residue(1, &[[0.0; 3]]), residue(2, &[[4.0, 0.0, 0.0]])];
        let dump = build_psn(&chain(rs), PsnOptions::default()).unwrap().to_dump();
        let lines: Vec<_> = dump.lines().collect();
        assert_eq!(lines[0], "2 1 6.0000000000000000e0");
        assert_eq!(lines[1], "1 2 4.0000000000000000e0 5.0000000000000000e-1");
    }

    #[test]
    fn graph_validation() {
        assert!(WeightedGraph::new(3, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 3, 1.0)]).is_err());
        let g = WeightedGraph::new(4, [(2, 1, 1.0), (0, 3, 2.0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 3), (1, 2)]);
        assert!(g.is_adjacent(3, 0) && !g.is_adjacent(0, 1));
        assert_eq!(g.edge_index(2, 1), Some(1));
    }
}
