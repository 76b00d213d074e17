//! Closed forms, Wigner-function metrics and the readout model.

pub mod detection;
pub mod metrics;
pub mod table;

pub use detection::{detection_error_probs, spam_dark_probability, DetectionModel, ReadoutErrors};
pub use metrics::{
    aligned_quadrature_variances, char_maxima_on_circle, fock_populations, min_wigner,
    normalization_coeff_closed, off_lattice_mass, operator_principal_variances, principal_angle,
    quadrature_variances, wln, wln_windowed, MetricsReport, COVERAGE_MIN, WINDOW_FRACTION,
};
pub use table::{table_b1, table_csv, table_row, TableConfig, TableRow, TABLE_HEADER};
