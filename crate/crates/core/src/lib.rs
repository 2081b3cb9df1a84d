//! Weighted graphlet features for protein structure networks.
//!
//! The crate builds weighted contact networks from PDB coordinates, counts
//! connected induced subgraphs on 3 to 5 nodes, and turns the counts into
//! six fixed- or variable-size feature measures. A small logistic-regression
//! cross-validation harness and a corpus pipeline sit on top.
//!
//! ```no_run
//! use wgraphlets::{atlas::GraphletAtlas, measures, pdb, psn};
//!
//! let text = std::fs::read_to_string("1erj.pdb").unwrap();
//! let chain = pdb::parse_pdb(&text, "1erj", 'A', None).unwrap();
//! let net = psn::build_psn(&chain, psn::PsnOptions::default()).unwrap();
//! let atlas = GraphletAtlas::global();
//! let m = measures::wegdvm(net.graph(), atlas, measures::Statistic::CramerVonMises);
//! assert_eq!(m.values.cols(), 68);
//! ```

pub mod atlas;
pub mod classify;
pub mod enumerate;
pub mod error;
pub mod matrix;
pub mod measures;
pub mod pdb;
pub mod pipeline;
pub mod psn;

pub use error::{Error, Result};
pub use matrix::Matrix;
