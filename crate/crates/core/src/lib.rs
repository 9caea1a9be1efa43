//! Categorical k-modes clustering with attribute value weighting.
//!
//! The crate implements standard k-modes and four weighted variants in which
//! a match between identical values costs `1 - ω` instead of 0:
//!
//! | schema | `ω(a, l)` |
//! |--------|-----------|
//! | `kmodes` | `1` |
//! | `df` | `f(a\|C_l) / \|C_l\|` |
//! | `sf` | Goodall weight from global frequencies |
//! | `hcf` | `df * sf` |
//! | `hsf` | `f(a\|C_l) / (\|C_l\| f(a\|D))` |
//!
//! Around the engine sit a delimited-file loader, clustering accuracy, a
//! paired multi-seed experiment harness, and runtime scaling measurements.
//!
//! ```
//! use wkmodes::{load_table, run, ColumnRef, RunConfig, TableFormat, WeightingSchema};
//!
//! let csv = "x,a,p\nx,a,p\nx,a,q\ny,b,r\ny,b,r\ny,c,r\n";
//! let format = TableFormat::default().with_class_column(ColumnRef::Index(0));
//! let ds = load_table(csv.as_bytes(), &format).unwrap();
//! let config = RunConfig::new(2, WeightingSchema::HybridInverseFrequency).with_seed(3);
//! let result = run(&ds.data, &config).unwrap();
//! assert_eq!(result.membership.cluster_sizes(2), [3, 3]);
//! ```

pub mod bench;
pub mod cli;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod eval;
pub mod synth;
pub mod weights;

pub use dataset::{
    global_frequencies, load_path, load_table, AttributeSchema, ClassLabels, ColumnRef,
    EncodedDataset, GlobalFrequencyTable, LabeledDataset, MissingValues, TableFormat,
};
pub use engine::{
    assign_all, distance, init_centers, objective, run, run_preprocessed, update_centers,
    Centers, Membership, Preprocessed, RunConfig, RunResult, StopReason,
};
pub use error::{Error, Result};
pub use eval::{clustering_accuracy, AccuracyReport};
pub use weights::{
    build_static_weights, ClusterFrequencySnapshot, StaticWeightTable, WeightContext,
    WeightingSchema,
};
