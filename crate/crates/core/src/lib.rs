//! Reduced dynamical maps of a system coupled to an environment under joint
//! unitaries acting on possibly entangled initial states.
//!
//! The crate provides the dense complex linear algebra kernel (products,
//! tensor operations, Jacobi spectral decompositions, least squares), bipartite
//! state analysis (Schmidt structure, entropies), joint-unitary construction
//! (controlled gates, operator roots, Haar sampling, locality tests), the
//! dynamical-map layer (Kraus dilations, vectorized map matrices, Choi
//! conversion, CP/TP verdicts, inversion and intermediate maps, family-based
//! inference) and the scenario laboratory that reproduces every quantitative
//! construction of the reference analysis.
//!
//! Everything is `no_std` + `alloc`; all operations are pure functions of
//! immutable inputs and safe to evaluate concurrently.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod eig;
pub mod error;
pub mod gates;
pub mod map;
pub mod matrix;
pub mod rng;
pub mod scenario;
pub mod state;
pub mod svd;

pub use eig::{eig_unitary, eigh, logm_unitary, unitary_exp, Spectrum};
pub use error::{Error, Result};
pub use gates::{
    controlled, dilation_from_state, haar_from_rng, haar_unitary, is_local_unitary,
    operator_schmidt_values, pauli, realign, unitary_root, Dilation, GateConvention, Pauli,
    RootBranch, TensorOrder,
};
pub use map::{
    a_from_choi, a_from_kraus, choi_from_a, condition_number, cp_check, herm_check,
    infer_a_from_family, intermediate_a, invert_a, kraus_from_dilation, kraus_from_dilation_slot,
    tp_check, AMatrix, ChoiMatrix, CpReport, FamilyDiagnostics, KrausSet, Verdict, COND_LIMIT,
    CP_TOL,
};
pub use matrix::{Complex64, ComplexMatrix, Slot};
pub use rng::CounterRng;
pub use scenario::{
    augmentation_check, backward_entropy_profile, chi_theta, controlled_phase_generator,
    convention_search, cp_inducing_trial, cp_inducing_unitary, dimension_ratio, linspace,
    mc_cp_fraction, psi_theta, resolved_convention, scenario_cnot_twice, scenario_sqrtcnot,
    scenario_sqrtcphase, search_pre_initial, sweep_point, AugmentationReport, ConventionFit,
    ConventionSearchReport, DimensionRatio, Ensemble, InducedTrial, McReport, ProfilePoint,
    ResolvedConvention, ScenarioKind, ScenarioReport, ScenarioVerdict, StateReading, SweepRow,
};
pub use state::{
    entanglement_entropy, is_maximally_entangled, is_product, schmidt, vn_entropy, DensityMatrix,
    EntropyBase, JointPureState, SchmidtDecomposition,
};
pub use svd::{lstsq_minnorm, svd, LstsqInfo, Svd};
