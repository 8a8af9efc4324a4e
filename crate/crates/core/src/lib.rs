//! Closed-loop three- and four-level quantum systems driven by phased
//! lasers: Hamiltonian construction, dark-state analysis, CPT bases and
//! exact time evolution under `Phi -> -Phi`.

pub mod cpt;
pub mod darkstate;
pub mod drive;
pub mod dynamics;
pub mod error;
pub mod operator;
pub mod preset;
pub mod scenario;

pub use cpt::{
    coupling_graph_is_open, cpt_states, cpt_states_4, double_dark_basis, to_cpt_hamiltonian_3,
    to_cpt_hamiltonian_4, CptBasis3, CptBasis4, DoubleDarkBasis,
};
pub use darkstate::{
    casimir_invariants, dark_report, dark_residual_diamond, dark_residual_triangle,
    dark_state_closed_form, find_dark_states, solve_dark_detunings_triangle,
    unbalanced_lambda_dark, CasimirSet, DarkStateReport, DetuningConstraint, UnbalancedLambdaDark,
};
pub use drive::{
    build, build_diamond, build_double_lambda_alt, build_triangle, conjugate_phase, DiamondDrive,
    DoubleLambdaAltDrive, Drive, DriveConfig, Topology, TriangleDrive,
};
pub use dynamics::{
    analytic_deltazero_state, best_fidelity_revival, checkerboard_class, coherence_series,
    diagonal_time_symmetry_check, eigenvalue_pairing_check, evolve, evolve_with_amplitudes,
    fidelity_series, phase_comparison, phase_symmetry_check, CheckerboardClass, FidelitySeries,
    PhaseComparison, PhaseFrame, PhaseSymmetryReport, TimeGrid, Trajectory,
};
pub use error::{Error, Result};
pub use operator::{
    change_basis, eig_hermitian, matrix_element, populations, propagator, ComplexMatrix,
    HermitianOperator, OrthonormalBasis, SpectralDecomposition, StateVector, C64,
};
pub use preset::{list_presets, preset, Preset};
