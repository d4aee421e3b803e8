//! End-to-end experiments on top of the library: sampling, the gap sweep, spectral reports.

pub mod config;
pub mod figure;
pub mod instances;
pub mod manifest;
pub mod report;
pub mod sample;

pub use config::{ExperimentConfig, KernelSource, Mode, ProposalTargetJson};
pub use figure::{reproduce_fig1, Fig1, Fig1Point, SweepParameter, SweepSpec};
pub use instances::{k2, random_instance, Builtin, Instance};
pub use manifest::RunManifest;
pub use report::{gap_report, walk_spectrum_report, GapReport, WalkSpectrumReport};
pub use sample::{algorithm1, algorithm1_exact, algorithm1_qpe, SampleRun};
