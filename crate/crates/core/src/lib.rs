//! View-distance metric toolkit.
//!
//! * [`metric`]: Euclidean and view distances, the v-norm, similarity gains,
//!   pairwise matrices and contour grids.
//! * [`spectral`]: eigenvalue diagnostics for distance matrices.
//! * [`clustering`]: K-Means with a pluggable metric.
//! * [`neighbors`]: KNN classification and evaluation protocols.
//! * [`eval`]: external clustering indices and best-map accuracy.
//! * [`data`]: synthetic manifolds, CSV I/O and standardization.
//!
//! Numeric code is generic over [`Scalar`] (`f32`, `f64`); the `*64`
//! aliases below fix the common double-precision case.

pub mod clustering;
pub mod data;
pub mod error;
pub mod eval;
pub mod metric;
pub mod neighbors;
pub mod rng;
pub mod scalar;
pub mod spectral;

pub use clustering::{kmeans_fit, kmeans_predict, kmeanspp_init, Init, KMeansConfig, KMeansModel};
pub use data::{
    gen_s_curve, gen_swiss_roll, load_csv, load_labels, save_csv, standardize, ColumnRef,
    CsvOptions, Dataset,
};
pub use error::{Error, Result};
pub use eval::{ContingencyTable, Labeling};
pub use metric::{
    certain_dim_similarity_gain, contour_grid, dim_similarity_gain, euclidean_distance,
    pairwise_distances, v_norm, view_distance, ContourGrid, MetricKind, NormKind, Vector,
};
pub use neighbors::{knn_classify, knn_evaluate, KnnConfig, Protocol};
pub use scalar::Scalar;
pub use spectral::{
    check_distance_matrix, spectral_radius, spectral_report, symmetric_eigenvalues, DistanceMatrix,
    SpectralReport,
};

pub type Vector64 = Vector<f64>;
pub type Vector32 = Vector<f32>;
pub type DistanceMatrix64 = DistanceMatrix<f64>;
pub type SpectralReport64 = SpectralReport<f64>;
pub type KMeansConfig64 = KMeansConfig<f64>;
pub type KMeansModel64 = KMeansModel<f64>;
pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
