//! Arrow matrix decompositions of sparse symmetric matrices and a simulated
//! distributed sparse-times-tall-skinny multiply.
//!
//! The pipeline is: build a [`SparseSymMatrix`], decompose it into permuted
//! arrow matrices with [`la_decompose`], then run the multiply over simulated
//! ranks with [`sim::decomposition_multiply_sim`] to obtain the product and a
//! [`sim::CommLedger`] of every message under the alpha-beta cost model.
//! [`sim::baseline_15d_sim`] runs the 1.5D A-stationary algorithm on the same
//! ledger so the two can be compared.

pub mod arrangement;
pub mod decomposition;
pub mod error;
pub mod exec;
pub mod generators;
pub mod mtx;
pub mod sim;
pub mod sparse;
pub mod zipf;

pub use arrangement::{
    arrangement_cost, band_edge_count, brute_force_mla, centroid_separator,
    random_forest_arrangement, random_spanning_forest, separator_la, smallest_first_order,
    CentroidOracle, Forest, SeparatorOracle,
};
pub use decomposition::{
    compaction_factors, extract_arrow, la_decompose, prune_top_degree, reconstruct,
    verify_arrow_width, ArrowDecomposition, ArrowMatrix, Strategy,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use sparse::{
    apply_row_permutation, csr_from_coo, dense_spmm_reference, permute_symmetric, symmetrize,
    CooEntries, DenseMatrix, LinearArrangement, SparseSymMatrix,
};
pub use zipf::ZipfModel;
