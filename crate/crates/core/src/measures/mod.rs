//! The six graphlet measures.
//!
//! | kind        | shape    |
//! |-------------|----------|
//! | `graphlet35`| 29       |
//! | `ordered34` | 42       |
//! | `egdvm`     | M × 68   |
//! | `egdvm-cc`  | 2278     |
//! | `wegdvm`    | M × 68   |
//! | `wegdvm-cc` | 2278     |
//!
//! Matrix rows follow the graph's edge order, i.e. by `(i, j)`.

mod corr;
mod cvm;
mod pool;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use corr::{cc_len, corr_cc};
pub use cvm::{cramer_von_mises, cramer_von_mises_values};
pub use pool::WeightPool;

use crate::atlas::{GraphletAtlas, GRAPHLET_COUNT, ORBIT_COUNT, ORDERED_COUNT};
use crate::enumerate::{accumulate, OrbitAccumulator};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::psn::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "graphlet35")]
    Graphlet35,
    #[serde(rename = "ordered34")]
    Ordered34,
    #[serde(rename = "egdvm")]
    Egdvm,
    #[serde(rename = "egdvm-cc")]
    EgdvmCc,
    #[serde(rename = "wegdvm")]
    Wegdvm,
    #[serde(rename = "wegdvm-cc")]
    WegdvmCc,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] =
        [Self::Graphlet35, Self::Ordered34, Self::Egdvm, Self::EgdvmCc, Self::Wegdvm, Self::WegdvmCc];

    pub fn name(self) -> &'static str {
        match self {
            Self::Graphlet35 => "graphlet35",
            Self::Ordered34 => "ordered34",
            Self::Egdvm => "egdvm",
            Self::EgdvmCc => "egdvm-cc",
            Self::Wegdvm => "wegdvm",
            Self::WegdvmCc => "wegdvm-cc",
        }
    }

    pub fn is_matrix(self) -> bool {
        matches!(self, Self::Egdvm | Self::Wegdvm)
    }

    /// Vector length, or `None` for the variable-height matrix measures.
    pub fn vector_len(self) -> Option<usize> {
        match self {
            Self::Graphlet35 => Some(GRAPHLET_COUNT),
            Self::Ordered34 => Some(ORDERED_COUNT),
            Self::EgdvmCc | Self::WegdvmCc => Some(cc_len(ORBIT_COUNT)),
            Self::Egdvm | Self::Wegdvm => None,
        }
    }

    /// The correlation-reduced counterpart of a matrix measure.
    pub fn cc_of(self) -> Option<MeasureKind> {
        match self {
            Self::Egdvm => Some(Self::EgdvmCc),
            Self::Wegdvm => Some(Self::WegdvmCc),
            _ => None,
        }
    }

    pub fn uses_weights(self) -> bool {
        matches!(self, Self::Wegdvm | Self::WegdvmCc)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Input(format!("unknown measure '{s}'")))
    }
}

/// How a cell's weight multiset is summarized in wEGDVM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    /// Cramér–von Mises distance from the graph's full weight distribution.
    #[default]
    #[serde(rename = "cvm")]
    CramerVonMises,
    /// Sum of the collected weights, divided by the graphlet's edge count so
    /// that unit weights give back the touch count.
    Sum,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Self::CramerVonMises => "cvm",
            Self::Sum => "sum",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cvm" => Ok(Self::CramerVonMises),
            "sum" => Ok(Self::Sum),
            _ => Err(Error::Input(format!("unknown statistic '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorMeasure {
    pub kind: MeasureKind,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeasure {
    pub kind: MeasureKind,
    pub values: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    Vector(VectorMeasure),
    Matrix(MatrixMeasure),
}

pub fn graphlet_3_5(graph: &WeightedGraph, atlas: &GraphletAtlas) -> VectorMeasure {
    let acc = accumulate(graph, atlas, None);
    VectorMeasure { kind: MeasureKind::Graphlet35, values: acc.graphlet_counts().iter().map(|&c| c as f64).collect() }
}

/// Counts of the 42 ordered classes; node order is the graph's node order.
pub fn ordered_graphlet_3_4(graph: &WeightedGraph, atlas: &GraphletAtlas) -> VectorMeasure {
    let acc = accumulate(graph, atlas, None);
    VectorMeasure { kind: MeasureKind::Ordered34, values: acc.ordered_counts().iter().map(|&c| c as f64).collect() }
}

pub fn egdvm(graph: &WeightedGraph, atlas: &GraphletAtlas) -> MatrixMeasure {
    egdvm_from(&accumulate(graph, atlas, None))
}

fn egdvm_from(acc: &OrbitAccumulator<'_>) -> MatrixMeasure {
    let m = acc.edge_count();
    let mut values = Matrix::zeros(m, ORBIT_COUNT);
    for e in 0..m {
        for o in 0..ORBIT_COUNT {
            values.set(e, o, acc.touches(e, o) as f64);
        }
    }
    MatrixMeasure { kind: MeasureKind::Egdvm, values }
}

pub fn wegdvm(graph: &WeightedGraph, atlas: &GraphletAtlas, statistic: Statistic) -> MatrixMeasure {
    let pool = WeightPool::new(graph.weights());
    let acc = accumulate(graph, atlas, Some(&pool));
    wegdvm_from(&acc, &pool, atlas, statistic)
}

fn wegdvm_from(
    acc: &OrbitAccumulator<'_>,
    pool: &WeightPool,
    atlas: &GraphletAtlas,
    statistic: Statistic,
) -> MatrixMeasure {
    let m = acc.edge_count();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|e| {
            (0..ORBIT_COUNT)
                .map(|o| {
                    if acc.touches(e, o) == 0 {
                        return 0.0;
                    }
                    let hist = acc.histogram(e, o);
                    match statistic {
                        Statistic::CramerVonMises => {
                            cramer_von_mises(&hist, pool).expect("non-empty histogram over pool ranks")
                        }
                        Statistic::Sum => {
                            let total: f64 = hist.iter().map(|&(r, c)| c as f64 * pool.value(r)).sum();
                            total / atlas.orbit_graphlet(o).edge_count as f64
                        }
                    }
                })
                .collect()
        })
        .collect();
    MatrixMeasure { kind: MeasureKind::Wegdvm, values: Matrix::from_vec(m, ORBIT_COUNT, rows.concat()) }
}

/// Computes any of the six measures. `statistic` only matters for the
/// weighted ones.
pub fn compute(
    graph: &WeightedGraph,
    atlas: &GraphletAtlas,
    kind: MeasureKind,
    statistic: Statistic,
) -> Result<Features> {
    Ok(match kind {
        MeasureKind::Graphlet35 => Features::Vector(graphlet_3_5(graph, atlas)),
        MeasureKind::Ordered34 => Features::Vector(ordered_graphlet_3_4(graph, atlas)),
        MeasureKind::Egdvm => Features::Matrix(egdvm(graph, atlas)),
        MeasureKind::Wegdvm => Features::Matrix(wegdvm(graph, atlas, statistic)),
        MeasureKind::EgdvmCc => Features::Vector(VectorMeasure { kind, values: corr_cc(&egdvm(graph, atlas).values)? }),
        MeasureKind::WegdvmCc => {
            Features::Vector(VectorMeasure { kind, values: corr_cc(&wegdvm(graph, atlas, statistic).values)? })
        }
    })
}

/// All six measures from one enumeration pass.
#[derive(Debug, Clone)]
pub struct AllMeasures {
    pub graphlet35: VectorMeasure,
    pub ordered34: VectorMeasure,
    pub egdvm: MatrixMeasure,
    pub wegdvm: MatrixMeasure,
    pub egdvm_cc: Option<VectorMeasure>,
    pub wegdvm_cc: Option<VectorMeasure>,
}

pub fn compute_all(graph: &WeightedGraph, atlas: &GraphletAtlas, statistic: Statistic) -> AllMeasures {
    let pool = WeightPool::new(graph.weights());
    let acc = accumulate(graph, atlas, Some(&pool));
    let egdvm = egdvm_from(&acc);
    let wegdvm = wegdvm_from(&acc, &pool, atlas, statistic);
    let cc = |m: &MatrixMeasure, kind| corr_cc(&m.values).ok().map(|values| VectorMeasure { kind, values });
    AllMeasures {
        graphlet35: VectorMeasure {
            kind: MeasureKind::Graphlet35,
            values: acc.graphlet_counts().iter().map(|&c| c as f64).collect(),
        },
        ordered34: VectorMeasure {
            kind: MeasureKind::Ordered34,
            values: acc.ordered_counts().iter().map(|&c| c as f64).collect(),
        },
        egdvm_cc: cc(&egdvm, MeasureKind::EgdvmCc),
        wegdvm_cc: cc(&wegdvm, MeasureKind::WegdvmCc),
        egdvm,
        wegdvm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atlas() -> &'static GraphletAtlas {
        GraphletAtlas::global()
    }

    fn find(pred: impl Fn(&crate::atlas::GraphletType) -> bool) -> usize {
        atlas().graphlets().iter().position(pred).unwrap()
    }

    fn complete(n: usize) -> WeightedGraph {
        WeightedGraph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, (1 + i + 2 * j) as f64)))).unwrap()
    }

    #[test]
    fn k3_and_k5_graphlet_counts() {
        let tri = find(|g| g.size == 3 && g.edge_count == 3);
        let v = graphlet_3_5(&complete(3), atlas()).values;
        assert_eq!(v.len(), 29);
        assert_eq!(v[tri], 1.0);
        assert_eq!(v.iter().sum::<f64>(), 1.0);

        let v = graphlet_3_5(&complete(5), atlas()).values;
        assert_eq!(v[tri], 10.0);
        assert_eq!(v[find(|g| g.size == 4 && g.edge_count == 6)], 5.0);
        assert_eq!(v[find(|g| g.size == 5 && g.edge_count == 10)], 1.0);
        assert_eq!(v.iter().sum::<f64>(), 16.0);
    }

    #[test]
    fn ordered_path_classes() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let v = ordered_graphlet_3_4(&g, atlas()).values;
        let class = atlas().classify_ordered(3, crate::atlas::code_from_edges(3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(v[class], 1.0);
        assert_eq!(v.iter().sum::<f64>(), 1.0);

        let g = complete(5);
        let ord = ordered_graphlet_3_4(&g, atlas()).values;
        let unord = graphlet_3_5(&g, atlas()).values;
        let three: f64 = atlas().graphlets().iter().filter(|t| t.size == 3).map(|t| unord[t.id]).sum();
        assert_eq!(ord[..4].iter().sum::<f64>(), three);
    }

    #[test]
    fn k3_egdvm_and_wegdvm() {
        let g = WeightedGraph::new(3, [(0, 1, 0.5), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        let e = egdvm(&g, atlas()).values;
        assert_eq!((e.rows(), e.cols()), (3, 68));
        for r in 0..3 {
            assert_eq!(e.row(r).iter().filter(|&&x| x != 0.0).count(), 1);
            assert_eq!(e.row(r).iter().sum::<f64>(), 1.0);
        }
        // the only multiset is the whole pool, so the statistic is 0
        let w = wegdvm(&g, atlas(), Statistic::CramerVonMises).values;
        assert!(w.as_slice().iter().all(|&x| x.abs() < 1e-15));
        assert_eq!(w.row(0), w.row(1));
        assert_eq!(w.row(1), w.row(2));

        // a pendant edge makes the triangle's multiset differ from the pool
        let g = WeightedGraph::new(4, [(0, 1, 0.5), (1, 2, 2.0), (0, 2, 3.0), (2, 3, 7.0)]).unwrap();
        let e = egdvm(&g, atlas()).values;
        let w = wegdvm(&g, atlas(), Statistic::CramerVonMises).values;
        let tri = atlas().graphlet(find(|t| t.size == 3 && t.edge_count == 3)).orbits[0].id;
        let rows: Vec<usize> = [(0, 1), (0, 2), (1, 2)].iter().map(|&(a, b)| g.edge_index(a, b).unwrap()).collect();
        for &r in &rows {
            assert_eq!(e.get(r, tri), 1.0);
            assert!(w.get(r, tri) > 0.0);
            assert_eq!(w.get(r, tri), w.get(rows[0], tri));
        }
        for r in 0..4 {
            for c in 0..68 {
                if e.get(r, c) == 0.0 {
                    assert_eq!(w.get(r, c), 0.0);
                }
            }
        }
    }

    #[test]
    fn k4_egdvm_rows() {
        let e = egdvm(&complete(4), atlas()).values;
        let tri = atlas().graphlet(find(|g| g.size == 3 && g.edge_count == 3)).orbits[0].id;
        let k4 = atlas().graphlet(find(|g| g.size == 4 && g.edge_count == 6)).orbits[0].id;
        for r in 0..6 {
            assert_eq!(e.get(r, tri), 2.0);
            assert_eq!(e.get(r, k4), 1.0);
        }
    }

    #[test]
    fn sum_statistic_on_unit_weights_is_egdvm() {
        let g = WeightedGraph::new(
            6,
            [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (1, 4)].map(|(a, b)| (a, b, 1.0)),
        )
        .unwrap();
        assert_eq!(wegdvm(&g, atlas(), Statistic::Sum).values, egdvm(&g, atlas()).values);
    }

    #[test]
    fn compute_all_agrees_with_single_measures() {
        let g = complete(6).map_weights(|w| w.sqrt()).unwrap();
        let all = compute_all(&g, atlas(), Statistic::CramerVonMises);
        assert_eq!(all.graphlet35, graphlet_3_5(&g, atlas()));
        assert_eq!(all.ordered34, ordered_graphlet_3_4(&g, atlas()));
        assert_eq!(all.egdvm, egdvm(&g, atlas()));
        assert_eq!(all.wegdvm, wegdvm(&g, atlas(), Statistic::CramerVonMises));
        let Features::Vector(cc) = compute(&g, atlas(), MeasureKind::WegdvmCc, Statistic::CramerVonMises).unwrap()
        else {
            panic!()
        };
        assert_eq!(Some(cc), all.wegdvm_cc);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in MeasureKind::ALL {
            assert_eq!(k.name().parse::<MeasureKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("graphlet".parse::<MeasureKind>().is_err());
        assert_eq!("sum".parse::<Statistic>().unwrap(), Statistic::Sum);
        assert_eq!(serde_json::to_string(&Statistic::CramerVonMises).unwrap(), "\"cvm\"");
    }
}
