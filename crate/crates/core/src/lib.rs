//! Finite-metric embedding laboratory.
//!
//! Builds finite metric spaces (Hamming cubes, ℓ_p point sets, snowflakes),
//! embeds snowflaked ℓ_p metrics isometrically into Euclidean space, brackets
//! optimal Euclidean distortion by semidefinite feasibility, enumerates
//! Rademacher and Enflo type constants exactly, and checks the exponent
//! bounds for compression of quasi-Banach ℓ_p models.

pub mod c2;
pub mod certificates;
pub mod compression;
pub mod distortion;
pub mod eigen;
pub mod error;
pub mod kernel;
pub mod matrix;
pub mod metric;
pub mod report;

pub use c2::{optimal_euclidean_distortion, C2Options, C2Result};
pub use certificates::{
    enflo_distortion_lower_bound, enflo_type_constant, model_space_descriptors,
    rademacher_type_constant, EnfloCertificate, TypeConstantReport,
};
pub use compression::{
    austin_certificate, austin_upper_bound, coarse_moduli, compression_estimate,
    cube_embedding_into_lp, general_host_bound, snowflake_exponent_scan,
    snowflake_exponent_scan_with, theoretical_exponent, AustinBound, AustinHypothesis,
    AustinMember, CoarseModuli, CompressionEstimate, CubeEmbedding, DistortionEvidence,
    ScanTable,
};
pub use distortion::{
    distortion_of_map, hamming_c2_exact, lipschitz_constant, DistortionReport, LipschitzBound,
};
pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use error::{ErrorKind, LabError, Result};
pub use kernel::{
    check_negative_definite, embed_snowflake_lp, psd_factorize, EuclideanEmbedding,
    NegativeDefiniteReport,
};
pub use matrix::Matrix;
pub use metric::{
    check_r_subadditive, cube_vertices, hamming_cube, lp_point_metric, quasinorm_metric,
    snowflake, verify_metric_axioms, AxiomReport, FiniteMetricSpace, MetricMap, PointSetLp,
    QuasiNormModel,
};
