//! Exact analysis of the probability density of a suddenly expanded infinite
//! well at rational times.
//!
//! The density at `t = aT/q` is a finite sum weighted by normalized quadratic
//! Gauss sums. Intervals where it is constant are detected by exact zero tests
//! of sums of roots of unity in `Z[ζ_M]`.

pub mod cyclotomic;
pub mod error;
pub mod gauss;
pub mod panels;
pub mod plateau;
pub mod rational;
pub mod theorems;
pub mod wavefield;

pub use cyclotomic::{cyclotomic_poly, CycInt, IntPoly};
pub use error::{Error, Result};
pub use gauss::{
    coefficient_c, gauss_abs, gauss_sum_direct, phase_alpha, CoefficientKind, GaussCoefficient,
    GaussMagnitude, GaussPhase, GaussTable,
};
pub use panels::{panel_by_name, Panel, PANELS};
pub use plateau::{
    cells, detect_plateaux, plateau_level, s_pair, singular_points, Cell, CellVerdict,
    PlateauInterval, PlateauKind, PlateauReport, SumContext, VanishingSide,
};
pub use rational::{bezout, mod_inverse, Rational};
pub use theorems::{
    conjecture_scan, fragmentation_layout, has_fragmentation, nonfrag_prediction, peak_count,
    scan_grid, scan_one, two_n_lambda_odd, FragmentationCase, FragmentationLayout,
    NonFragPrediction, ScanRecord,
};
pub use wavefield::{
    corollary_identity_check, density_p, initial_g, integrate_density, interval_I,
    psi_fractional, series_oracle, Abscissa, DensitySamples, EigenSeries, SpecialTime, Wavefield,
    WellParams,
};
