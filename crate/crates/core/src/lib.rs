//! Correlation-induced privacy leakage (CPL) analysis for locally
//! differentially private releases of correlated attributes.
//!
//! All leakages are natural-log quantities (nats).

pub mod benchmarks;
pub mod bound;
pub mod calibration;
pub mod composition;
pub mod dataset;
pub mod distribution;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod mechanisms;
pub mod metrics;
pub mod rng;
pub mod statistical;

pub use benchmarks::{
    analyzer_benchmark, baseline_grf, baseline_spl_anl, nmse_cpl, undershoot_overshoot,
    utility_benchmark, AnalyzerPoint, BenchmarkPoint, ReferenceSource, Region, UtilityReport,
    UtilityRow,
};
pub use bound::{
    cpl_bound, cpl_bound_bruteforce, cpl_limit, is_max_attainable, BoundedCplResult, BudgetParams,
};
pub use calibration::{
    calibrate, calibrate_bisection, worst_tpl, CalibrationEngine, CalibrationResult,
    CalibrationStep,
};
pub use composition::{
    cpl_matrix, sequential_compose, tcpl, tpl_upper_bound, CplEngine, CplMatrix, LeakagePair,
    PairwiseConditionals,
};
pub use dataset::{
    bin_numeric, expand_dataset, load_csv, read_csv, save_csv, schema_of, write_csv, Alphabet,
    Attribute, ColumnHint, Dataset, SchemaHints,
};
pub use distribution::{
    conditional_from_joint, empirical_conditional, empirical_joint, Condition,
    ConditionalDistribution, JointDistribution, ProbabilityVector,
};
pub use error::{CplError, Result};
pub use exact::{cpl_exact, ExactCplResult, ExactWitness};
pub use mechanisms::{
    decode, estimate_frequencies, perturb, transition_matrix, FrequencyAccumulator, MechanismKind,
    MechanismParams, MechanismSpec, PerturbedOutput, TransitionMatrix,
};
pub use metrics::{metrics, nmi_variants, MetricReport, NmiVariants};
pub use statistical::{
    perturb_and_estimate, perturb_dataset, release, statistical_cpl, statistical_leakage,
    statistical_tpl, EstimationConfig, Release, StatisticalCplResult,
};
