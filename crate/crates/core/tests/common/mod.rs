//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wgraphlets::atlas::{permutations, GraphletAtlas, ORBIT_COUNT, ORDERED_COUNT};
use wgraphlets::pdb::format_atom_record;
use wgraphlets::psn::WeightedGraph;
use wgraphlets::Matrix;

/// G(n, p) with weights drawn from a few distinct levels so ties occur.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                let w = if rng.gen_bool(0.3) { 1.0 } else { rng.gen_range(0.1..4.0) };
                edges.push((a, b, w));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Counts from a direct scan over every node subset of size 3, 4 and 5.
pub struct BruteForce {
    pub graphlets: Vec<f64>,
    pub ordered: Vec<f64>,
    pub egdvm: Matrix,
    /// Per (edge, orbit) cell: all edge weights of every touched occurrence.
    pub samples: Vec<Vec<Vec<f64>>>,
}

fn induced_code(graph: &WeightedGraph, nodes: &[usize]) -> u16 {
    let k = nodes.len();
    let mut bits = 0u16;
    let p = k * (k - 1) / 2;
    let mut idx = 0;
    for a in 0..k {
        for b in a + 1..k {
            if graph.is_adjacent(nodes[a], nodes[b]) {
                bits |= 1 << (p - 1 - idx);
            }
            idx += 1;
        }
    }
    bits
}

fn has_edge(k: usize, bits: u16, a: usize, b: usize) -> bool {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let p = k * (k - 1) / 2;
    let idx = a * (2 * k - a - 1) / 2 + (b - a - 1);
    bits >> (p - 1 - idx) & 1 == 1
}

fn connected(k: usize, bits: u16) -> bool {
    let mut seen = 1u32;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for u in 0..k {
            if seen >> u & 1 == 0 && has_edge(k, bits, u, v) {
                seen |= 1 << u;
                stack.push(u);
            }
        }
    }
    seen == (1 << k) - 1
}

/// Relabels node `a` to `perm[a]`.
fn relabel(k: usize, bits: u16, perm: &[u8]) -> u16 {
    let p = k * (k - 1) / 2;
    let mut out = 0u16;
    for a in 0..k {
        for b in a + 1..k {
            if has_edge(k, bits, a, b) {
                let (x, y) = (perm[a] as usize, perm[b] as usize);
                let (x, y) = if x < y { (x, y) } else { (y, x) };
                let idx = x * (2 * k - x - 1) / 2 + (y - x - 1);
                out |= 1 << (p - 1 - idx);
            }
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Classifies each connected induced subgraph by minimizing its code over
/// all relabelings and locating the relabeled edge among the atlas's
/// published orbit edge lists.
pub fn brute_force(graph: &WeightedGraph, atlas: &GraphletAtlas) -> BruteForce {
    let n = graph.node_count();
    let m = graph.edge_count();
    let mut graphlets = vec![0.0; atlas.graphlets().len()];
    let mut ordered = vec![0.0; ORDERED_COUNT];
    let mut egdvm = Matrix::zeros(m, ORBIT_COUNT);
    let mut samples = vec![vec![Vec::new(); ORBIT_COUNT]; m];

    for k in 3..=5 {
        let perms = permutations(k);
        for nodes in subsets(n, k) {
            let bits = induced_code(graph, &nodes);
            if !connected(k, bits) {
                continue;
            }
            if k <= 4 {
                let class = atlas
                    .ordered_class_codes()
                    .iter()
                    .position(|c| c.size as usize == k && c.bits == bits)
                    .expect("ordered class listed");
                ordered[class] += 1.0;
            }
            let (canon, perm) = perms.iter().map(|p| (relabel(k, bits, p), p)).min_by_key(|(c, _)| *c).unwrap();
            let g = atlas.graphlets().iter().find(|g| g.size == k && g.code.bits == canon).expect("graphlet listed");
            graphlets[g.id] += 1.0;

            let mut members: Vec<(usize, usize)> = Vec::new();
            for a in 0..k {
                for b in a + 1..k {
                    if !has_edge(k, bits, a, b) {
                        continue;
                    }
                    let (x, y) = (perm[a].min(perm[b]), perm[a].max(perm[b]));
                    let orbit = g.orbits.iter().find(|o| o.edges.contains(&(x, y))).expect("edge in an orbit").id;
                    members.push((graph.edge_index(nodes[a], nodes[b]).unwrap(), orbit));
                }
            }
            for &(e, o) in &members {
                egdvm.set(e, o, egdvm.get(e, o) + 1.0);
                samples[e][o].extend(members.iter().map(|&(f, _)| graph.weights()[f]));
            }
        }
    }
    BruteForce { graphlets, ordered, egdvm, samples }
}

/// Residue layout of a synthetic chain. Helices are compact and dense in
/// contacts, strands are extended, coils wander.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fold {
    Helix,
    Strand,
    Coil,
}

pub fn synthetic_pdb(fold: Fold, residues: usize, chain: char, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    let mut serial = 1;
    let mut coil = [0.0f64; 3];
    for i in 0..residues {
        let t = i as f64;
        let ca = match fold {
            Fold::Helix => [2.3 * (t * 1.745).cos(), 2.3 * (t * 1.745).sin(), 1.5 * t],
            Fold::Strand => [3.3 * t, if i % 2 == 0 { 0.0 } else { 1.0 }, 0.0],
            Fold::Coil => {
                if i > 0 {
                    let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-6);
                    for d in 0..3 {
                        coil[d] += 3.8 * v[d] / norm;
                    }
                }
                coil
            }
        };
        let jitter = |rng: &mut ChaCha8Rng| rng.gen_range(-0.2..0.2);
        let ca = [ca[0] + jitter(&mut rng), ca[1] + jitter(&mut rng), ca[2] + jitter(&mut rng)];
        let cb = [ca[0] + 1.0, ca[1] + 1.0, ca[2] + 0.5];
        for (name, coords) in [("CA", ca), ("CB", cb)] {
            writeln!(text, "{}", format_atom_record(serial, name, "ALA", chain, i as i32 + 1, coords, "C")).unwrap();
            serial += 1;
        }
    }
    text.push_str("END\n");
    text
}

/// Writes `samples` as PDB files plus a manifest; returns the manifest path.
pub fn write_corpus(dir: &Path, name: &str, samples: &[(String, String, String)]) -> PathBuf {
    let pdb_dir = dir.join("pdb");
    std::fs::create_dir_all(&pdb_dir).unwrap();
    let mut manifest = String::from("id,pdb,chain,range,label\n");
    for (id, label, text) in samples {
        std::fs::write(pdb_dir.join(format!("{id}.pdb")), text).unwrap();
        writeln!(manifest, "{id},pdb/{id}.pdb,A,,{label}").unwrap();
    }
    let path = dir.join(format!("{name}.csv"));
    std::fs::write(&path, manifest).unwrap();
    path
}

/// Helix vs strand vs coil corpus with `per_class` samples each.
pub fn fold_corpus(per_class: usize, residues: usize) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for (c, fold) in [Fold::Helix, Fold::Strand, Fold::Coil].into_iter().enumerate() {
        for k in 0..per_class {
            let id = format!("{}{k:02}", ["hx", "st", "co"][c]);
            let label = format!("{fold:?}").to_lowercase();
            out.push((id, label, synthetic_pdb(fold, residues + k % 5, 'A', (c * 1000 + k) as u64)));
        }
    }
    out
}
