//! Catalog of connected graphs on 3 to 5 nodes.
//!
//! Graphs are described by an adjacency code over the upper triangle: pairs
//! `(a, b)` with `a < b` are listed lexicographically and pair `k` of `P`
//! sets bit `P - 1 - k`, so comparing codes as integers compares the bit
//! strings lexicographically. A graphlet's canonical code is the smallest
//! code over all node relabelings.
//!
//! Ids are assigned deterministically: graphlets by `(size, canonical code)`,
//! edge orbits within a graphlet by their smallest canonical edge, and
//! ordered classes by `(size, labeled code)`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_SIZE: usize = 3;
pub const MAX_SIZE: usize = 5;
pub const GRAPHLET_COUNT: usize = 29;
pub const ORBIT_COUNT: usize = 68;
pub const ORDERED_COUNT: usize = 42;
pub const MAX_ORDERED_SIZE: usize = 4;

const NO_EDGE: u8 = u8::MAX;

#[inline]
pub const fn pair_count(size: usize) -> usize {
    size * (size - 1) / 2
}

/// Lexicographic index of pair `(a, b)`, `a < b`, among the pairs of `size` nodes.
#[inline]
pub const fn pair_index(size: usize, a: usize, b: usize) -> usize {
    a * (2 * size - a - 1) / 2 + (b - a - 1)
}

/// Code bit for pair `(a, b)`, `a < b`.
#[inline]
pub const fn pair_bit(size: usize, a: usize, b: usize) -> u16 {
    1 << (pair_count(size) - 1 - pair_index(size, a, b))
}

pub fn pairs(size: usize) -> Vec<(u8, u8)> {
    let mut out = Vec::with_capacity(pair_count(size));
    for a in 0..size {
        for b in a + 1..size {
            out.push((a as u8, b as u8));
        }
    }
    out
}

/// Edges of a code as node pairs, in lexicographic order.
pub fn code_edges(size: usize, bits: u16) -> Vec<(u8, u8)> {
    pairs(size).into_iter().filter(|&(a, b)| bits & pair_bit(size, a as usize, b as usize) != 0).collect()
}

pub fn is_connected(size: usize, bits: u16) -> bool {
    let mut seen = 1u8;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        for u in 0..size {
            if u != v && seen & (1 << u) == 0 {
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                if bits & pair_bit(size, a, b) != 0 {
                    seen |= 1 << u;
                    stack.push(u);
                }
            }
        }
    }
    seen.count_ones() as usize == size
}

/// Relabels node `a` as `perm[a]`.
pub fn permute_code(size: usize, bits: u16, perm: &[u8]) -> u16 {
    let mut out = 0;
    for (a, b) in code_edges(size, bits) {
        let (x, y) = (perm[a as usize] as usize, perm[b as usize] as usize);
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        out |= pair_bit(size, x, y);
    }
    out
}

/// All permutations of `0..size` in lexicographic order.
pub fn permutations(size: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v as u8);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; size], &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalCode {
    pub size: u8,
    pub bits: u16,
}

impl CanonicalCode {
    pub fn bit_string(&self) -> String {
        let p = pair_count(self.size as usize);
        (0..p).map(|k| if self.bits >> (p - 1 - k) & 1 == 1 { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeOrbit {
    /// Global orbit id, `0..68`.
    pub id: usize,
    /// Edges of one occurrence that lie in this orbit.
    pub multiplicity: usize,
    /// The orbit's edges under the canonical labeling.
    pub edges: Vec<(u8, u8)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphletType {
    pub id: usize,
    pub size: usize,
    pub code: CanonicalCode,
    pub edge_count: usize,
    pub automorphisms: usize,
    pub orbits: Vec<EdgeOrbit>,
}

/// Result of classifying a connected labeled graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub graphlet: usize,
    /// `node_perm[a]` is the canonical position of input node `a`.
    pub node_perm: Vec<u8>,
    /// Each input edge with its global orbit id, edges in lexicographic order.
    pub edge_orbits: Vec<((u8, u8), usize)>,
}

/// Precomputed answer for one connected labeled code.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LabeledEntry {
    pub graphlet: u8,
    /// Orbit id per pair index; `NO_EDGE` where the pair is not an edge.
    pub orbit_by_pair: [u8; pair_count(MAX_SIZE)],
    pub perm: [u8; MAX_SIZE],
}

impl LabeledEntry {
    #[inline]
    pub fn orbit(&self, pair: usize) -> Option<usize> {
        let o = self.orbit_by_pair[pair];
        (o != NO_EDGE).then_some(o as usize)
    }
}

#[derive(Debug)]
pub struct GraphletAtlas {
    graphlets: Vec<GraphletType>,
    orbit_graphlet: Vec<usize>,
    /// Indexed by `size - MIN_SIZE`, then by labeled code.
    labeled: Vec<Vec<Option<LabeledEntry>>>,
    /// Indexed by `size - MIN_SIZE`, then by labeled code (sizes 3 and 4).
    ordered: Vec<Vec<Option<u8>>>,
    ordered_codes: Vec<CanonicalCode>,
}

impl GraphletAtlas {
    /// Shared instance, built on first use.
    pub fn global() -> &'static GraphletAtlas {
        static ATLAS: OnceLock<GraphletAtlas> = OnceLock::new();
        ATLAS.get_or_init(|| GraphletAtlas::build().expect("graphlet atlas failed its self-check"))
    }

    pub fn build() -> Result<Self> {
        let mut graphlets = Vec::new();
        let mut orbit_graphlet = Vec::new();
        let mut labeled = Vec::new();

        for size in MIN_SIZE..=MAX_SIZE {
            let perms = permutations(size);
            let p = pair_count(size);
            let codes = 1u16 << p;

            // canonical code and a witnessing permutation for every connected code
            let mut canon: Vec<Option<(u16, usize)>> = vec![None; codes as usize];
            for bits in 0..codes {
                if !is_connected(size, bits) {
                    continue;
                }
                let (best, which) = perms
                    .iter()
                    .enumerate()
                    .map(|(k, perm)| (permute_code(size, bits, perm), k))
                    .min()
                    .expect("non-empty permutation set");
                canon[bits as usize] = Some((best, which));
            }

            let mut classes: Vec<u16> = canon.iter().flatten().map(|&(c, _)| c).collect();
            classes.sort_unstable();
            classes.dedup();

            let first_id = graphlets.len();
            for &c in &classes {
                let id = graphlets.len();
                let edges = code_edges(size, c);
                let autos: Vec<&Vec<u8>> = perms.iter().filter(|perm| permute_code(size, c, perm) == c).collect();

                // union edges mapped onto each other by an automorphism
                let mut parent: Vec<usize> = (0..edges.len()).collect();
                fn find(parent: &mut [usize], x: usize) -> usize {
                    let mut r = x;
                    while parent[r] != r {
                        r = parent[r];
                    }
                    parent[x] = r;
                    r
                }
                for sigma in &autos {
                    for (k, &(a, b)) in edges.iter().enumerate() {
                        let (x, y) = (sigma[a as usize], sigma[b as usize]);
                        let image = if x < y { (x, y) } else { (y, x) };
                        let m = edges.iter().position(|&e| e == image).expect("automorphism maps edges to edges");
                        let (ra, rb) = (find(&mut parent, k), find(&mut parent, m));
                        if ra != rb {
                            parent[ra.max(rb)] = ra.min(rb);
                        }
                    }
                }
                let mut orbits: Vec<EdgeOrbit> = Vec::new();
                let mut root_to_orbit: Vec<Option<usize>> = vec![None; edges.len()];
                for (k, &edge) in edges.iter().enumerate() {
                    let r = find(&mut parent, k);
                    let local = match root_to_orbit[r] {
                        Some(l) => l,
                        None => {
                            let gid = orbit_graphlet.len();
                            orbit_graphlet.push(id);
                            orbits.push(EdgeOrbit { id: gid, multiplicity: 0, edges: Vec::new() });
                            root_to_orbit[r] = Some(orbits.len() - 1);
                            orbits.len() - 1
                        }
                    };
                    orbits[local].multiplicity += 1;
                    orbits[local].edges.push(edge);
                }

                graphlets.push(GraphletType {
                    id,
                    size,
                    code: CanonicalCode { size: size as u8, bits: c },
                    edge_count: edges.len(),
                    automorphisms: autos.len(),
                    orbits,
                });
            }

            let mut table = vec![None; codes as usize];
            for bits in 0..codes {
                let Some((c, which)) = canon[bits as usize] else { continue };
                let gid = first_id + classes.binary_search(&c).expect("class present");
                let g = &graphlets[gid];
                let perm = &perms[which];
                let mut orbit_by_pair = [NO_EDGE; pair_count(MAX_SIZE)];
                for (a, b) in code_edges(size, bits) {
                    let (x, y) = (perm[a as usize], perm[b as usize]);
                    let image = if x < y { (x, y) } else { (y, x) };
                    let orbit = g.orbits.iter().find(|o| o.edges.contains(&image)).expect("edge has an orbit");
                    orbit_by_pair[pair_index(size, a as usize, b as usize)] = orbit.id as u8;
                }
                let mut perm_arr = [0u8; MAX_SIZE];
                perm_arr[..size].copy_from_slice(perm);
                table[bits as usize] = Some(LabeledEntry { graphlet: gid as u8, orbit_by_pair, perm: perm_arr });
            }
            labeled.push(table);
        }

        let mut ordered = Vec::new();
        let mut ordered_codes = Vec::new();
        for size in MIN_SIZE..=MAX_ORDERED_SIZE {
            let codes = 1u16 << pair_count(size);
            let mut table = vec![None; codes as usize];
            for bits in 0..codes {
                if is_connected(size, bits) {
                    table[bits as usize] = Some(ordered_codes.len() as u8);
                    ordered_codes.push(CanonicalCode { size: size as u8, bits });
                }
            }
            ordered.push(table);
        }

        let atlas = Self { graphlets, orbit_graphlet, labeled, ordered, ordered_codes };
        atlas.self_check()?;
        Ok(atlas)
    }

    fn self_check(&self) -> Result<()> {
        let fail = |what: &str, got: usize, want: usize| {
            Err(Error::Contract(format!("atlas has {got} {what}, expected {want}")))
        };
        if self.graphlets.len() != GRAPHLET_COUNT {
            return fail("graphlets", self.graphlets.len(), GRAPHLET_COUNT);
        }
        if self.orbit_graphlet.len() != ORBIT_COUNT {
            return fail("edge orbits", self.orbit_graphlet.len(), ORBIT_COUNT);
        }
        if self.ordered_codes.len() != ORDERED_COUNT {
            return fail("ordered classes", self.ordered_codes.len(), ORDERED_COUNT);
        }
        Ok(())
    }

    pub fn graphlets(&self) -> &[GraphletType] {
        &self.graphlets
    }

    pub fn graphlet(&self, id: usize) -> &GraphletType {
        &self.graphlets[id]
    }

    /// Graphlet that owns global orbit `orbit`.
    pub fn orbit_graphlet(&self, orbit: usize) -> &GraphletType {
        &self.graphlets[self.orbit_graphlet[orbit]]
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_graphlet.len()
    }

    pub fn ordered_class_codes(&self) -> &[CanonicalCode] {
        &self.ordered_codes
    }

    #[inline]
    pub(crate) fn lookup(&self, size: usize, bits: u16) -> Option<&LabeledEntry> {
        self.labeled.get(size.wrapping_sub(MIN_SIZE))?.get(bits as usize)?.as_ref()
    }

    #[inline]
    pub(crate) fn lookup_ordered(&self, size: usize, bits: u16) -> Option<usize> {
        self.ordered.get(size.wrapping_sub(MIN_SIZE))?.get(bits as usize).copied().flatten().map(usize::from)
    }

    pub fn classify(&self, size: usize, bits: u16) -> Result<Classification> {
        check_size(size, MAX_SIZE)?;
        let entry = self
            .lookup(size, bits)
            .ok_or_else(|| Error::Contract(format!("code {bits:#b} on {size} nodes is not a connected graph")))?;
        let edge_orbits = code_edges(size, bits)
            .into_iter()
            .map(|(a, b)| {
                let orbit = entry.orbit(pair_index(size, a as usize, b as usize)).expect("edge has an orbit");
                ((a, b), orbit)
            })
            .collect();
        Ok(Classification { graphlet: entry.graphlet as usize, node_perm: entry.perm[..size].to_vec(), edge_orbits })
    }

    /// Ordered class of a labeled graph whose node labels follow sequence order.
    pub fn classify_ordered(&self, size: usize, bits: u16) -> Result<usize> {
        check_size(size, MAX_ORDERED_SIZE)?;
        self.lookup_ordered(size, bits)
            .ok_or_else(|| Error::Contract(format!("code {bits:#b} on {size} nodes is not a connected graph")))
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct OrbitOut<'a> {
            id: usize,
            multiplicity: usize,
            edges: &'a [(u8, u8)],
        }
        #[derive(Serialize)]
        struct GraphletOut<'a> {
            id: usize,
            size: usize,
            code: String,
            edges: Vec<(u8, u8)>,
            automorphisms: usize,
            orbits: Vec<OrbitOut<'a>>,
        }
        #[derive(Serialize)]
        struct OrderedOut {
            id: usize,
            size: u8,
            code: String,
            edges: Vec<(u8, u8)>,
        }
        #[derive(Serialize)]
        struct AtlasOut<'a> {
            code_convention: &'static str,
            graphlet_count: usize,
            orbit_count: usize,
            ordered_count: usize,
            graphlets: Vec<GraphletOut<'a>>,
            ordered_classes: Vec<OrderedOut>,
        }
        let out = AtlasOut {
            code_convention: "upper-triangle pairs (0,1),(0,2),..,(n-2,n-1); '1' marks an edge",
            graphlet_count: self.graphlets.len(),
            orbit_count: self.orbit_count(),
            ordered_count: self.ordered_codes.len(),
            graphlets: self
                .graphlets
                .iter()
                .map(|g| GraphletOut {
                    id: g.id,
                    size: g.size,
                    code: g.code.bit_string(),
                    edges: code_edges(g.size, g.code.bits),
                    automorphisms: g.automorphisms,
                    orbits: g
                        .orbits
                        .iter()
                        .map(|o| OrbitOut { id: o.id, multiplicity: o.multiplicity, edges: &o.edges })
                        .collect(),
                })
                .collect(),
            ordered_classes: self
                .ordered_codes
                .iter()
                .enumerate()
                .map(|(id, c)| OrderedOut {
                    id,
                    size: c.size,
                    code: c.bit_string(),
                    edges: code_edges(c.size as usize, c.bits),
                })
                .collect(),
        };
        serde_json::to_value(out).expect("atlas serializes")
    }
}

fn check_size(size: usize, max: usize) -> Result<()> {
    if (MIN_SIZE..=max).contains(&size) {
        Ok(())
    } else {
        Err(Error::Contract(format!("graph size {size} outside {MIN_SIZE}..={max}")))
    }
}

/// Builds a code from an edge list on `size` nodes.
pub fn code_from_edges(size: usize, edges: &[(usize, usize)]) -> u16 {
    edges.iter().fold(0, |acc, &(a, b)| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        acc | pair_bit(size, a, b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atlas() -> &'static GraphletAtlas {
        GraphletAtlas::global()
    }

    #[test]
    fn cardinalities() {
        let a = atlas();
        let by_size: Vec<usize> = (3..=5).map(|s| a.graphlets().iter().filter(|g| g.size == s).count()).collect();
        assert_eq!(by_size, [2, 6, 21]);
        assert_eq!(a.orbit_count(), 68);
        let ordered: Vec<usize> =
            (3..=4).map(|s| a.ordered_class_codes().iter().filter(|c| c.size as usize == s).count()).collect();
        assert_eq!(ordered, [4, 38]);
    }

    #[test]
    fn pair_indexing() {
        for size in 3..=5 {
            for (k, (a, b)) in pairs(size).into_iter().enumerate() {
                assert_eq!(pair_index(size, a as usize, b as usize), k);
            }
        }
    }

    #[test]
    fn triangle_and_path() {
        let a = atlas();
        let tri = a.classify(3, code_from_edges(3, &[(0, 1), (1, 2), (0, 2)])).unwrap();
        let orbits: Vec<_> = tri.edge_orbits.iter().map(|e| e.1).collect();
        assert_eq!(orbits.len(), 3);
        assert!(orbits.iter().all(|&o| o == orbits[0]));

        let path = a.classify(3, code_from_edges(3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(path.edge_orbits.len(), 2);
        assert_eq!(path.edge_orbits[0].1, path.edge_orbits[1].1);
        assert_ne!(path.graphlet, tri.graphlet);
        assert_ne!(path.edge_orbits[0].1, orbits[0]);
    }

    #[test]
    fn star_and_path_on_four() {
        let a = atlas();
        let star = a.classify(4, code_from_edges(4, &[(2, 0), (2, 1), (2, 3)])).unwrap();
        assert!(star.edge_orbits.iter().all(|e| e.1 == star.edge_orbits[0].1));
        let path = a.classify(4, code_from_edges(4, &[(0, 2), (2, 1), (1, 3)])).unwrap();
        let orbit_of = |e: (u8, u8)| path.edge_orbits.iter().find(|x| x.0 == e).unwrap().1;
        assert_eq!(orbit_of((0, 2)), orbit_of((1, 3)));
        assert_ne!(orbit_of((0, 2)), orbit_of((1, 2)));
        assert_eq!(a.graphlet(path.graphlet).orbits.len(), 2);
    }

    #[test]
    fn disconnected_is_rejected() {
        let a = atlas();
        assert!(matches!(a.classify(4, code_from_edges(4, &[(0, 1), (2, 3)])), Err(Error::Contract(_))));
        assert!(a.classify(6, 0).is_err());
        assert!(a.classify_ordered(5, 0b1111111111).is_err());
        assert!(a.classify_ordered(3, code_from_edges(3, &[(0, 1)])).is_err());
    }

    #[test]
    fn canonical_under_relabeling() {
        let a = atlas();
        for size in 3..=5 {
            let perms = permutations(size);
            for bits in 0..(1u16 << pair_count(size)) {
                let Ok(base) = a.classify(size, bits) else { continue };
                for perm in &perms {
                    let c = a.classify(size, permute_code(size, bits, perm)).unwrap();
                    assert_eq!(c.graphlet, base.graphlet);
                    // orbit of an edge follows the edge under relabeling
                    for &((x, y), o) in &base.edge_orbits {
                        let (p, q) = (perm[x as usize], perm[y as usize]);
                        let img = if p < q { (p, q) } else { (q, p) };
                        assert_eq!(c.edge_orbits.iter().find(|e| e.0 == img).unwrap().1, o);
                    }
                }
                assert_eq!(permute_code(size, bits, &base.node_perm), a.graphlet(base.graphlet).code.bits);
            }
        }
    }

    #[test]
    fn orbits_are_automorphism_classes() {
        for g in atlas().graphlets() {
            let edges = code_edges(g.size, g.code.bits);
            let autos: Vec<_> = permutations(g.size)
                .into_iter()
                .filter(|p| permute_code(g.size, g.code.bits, p) == g.code.bits)
                .collect();
            assert_eq!(autos.len(), g.automorphisms);
            let orbit_of = |e: (u8, u8)| g.orbits.iter().find(|o| o.edges.contains(&e)).unwrap().id;
            for &e in &edges {
                for &f in &edges {
                    let related = autos.iter().any(|s| {
                        let (x, y) = (s[e.0 as usize], s[e.1 as usize]);
                        (x.min(y), x.max(y)) == f
                    });
                    assert_eq!(related, orbit_of(e) == orbit_of(f), "graphlet {} edges {e:?} {f:?}", g.id);
                }
            }
            assert_eq!(g.orbits.iter().map(|o| o.multiplicity).sum::<usize>(), g.edge_count);
        }
    }

    #[test]
    fn ordered_classes() {
        let a = atlas();
        let middle = a.classify_ordered(3, code_from_edges(3, &[(0, 1), (1, 2)])).unwrap();
        let first = a.classify_ordered(3, code_from_edges(3, &[(0, 1), (0, 2)])).unwrap();
        assert_ne!(middle, first);
        let mut ids: Vec<usize> = (0..64u16).filter_map(|b| a.classify_ordered(4, b).ok()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 38);
        assert!(ids.iter().all(|&i| (4..42).contains(&i)));
    }

    #[test]
    fn deterministic_rebuild() {
        let (x, y) = (GraphletAtlas::build().unwrap(), GraphletAtlas::build().unwrap());
        assert_eq!(x.graphlets(), y.graphlets());
        assert_eq!(x.to_json(), y.to_json());
    }
}
