//! Numerical toolkit for duality in entanglement of two distinguishable
//! particles under a particle-type superselection rule.
//!
//! The crate builds the relevant two-particle and frame states in a fixed
//! qubit encoding, applies the superselection twirl that removes
//! unobservable coherences, certifies entanglement of the effective
//! states through the partial-transpose criterion, and quantifies the
//! frame resource behind the activation by the superselection-induced
//! variance, including its convex-roof extension to mixed frames.
//!
//! Modules:
//! - [`matcore`]: dense complex matrices, tensor products, partial
//!   transpose and trace, a Jacobi eigensolver.
//! - [`states`]: constructors for the named states and party layouts.
//! - [`duality`]: two-particle amplitudes and the relabeling operation.
//! - [`ssr`]: charges, the twirl, and sector decompositions.
//! - [`entanglement`]: partial-transpose reports and threshold search.
//! - [`siv`]: superselection-induced variance and its convex roof.

pub mod duality;
pub mod entanglement;
pub mod error;
pub mod matcore;
pub mod siv;
pub mod ssr;
pub mod states;

pub use duality::{
    pdc_bosonic, pdc_distinguishable, relabel, symmetrized_distinguishable, LabelDof,
    LabeledBipartiteState, Species, Statistics, TwoParticleState,
};
pub use entanglement::{
    duality_certificate, ppt_report, ppt_report_sectored, werner_ppt_threshold, BlockOrigin,
    DualityCertificate, PptReport, ENTANGLED_EIG_THRESHOLD,
};
pub use error::{Error, Result};
pub use matcore::{
    hermitian_eigen, partial_trace, partial_transpose, permute_slots, permute_slots_ket, tensor,
    tensor_ket, trace_norm, ComplexMatrix, Ket, QubitFactorization, C64, MAX_DIM, SPECTRAL_TOL,
    STRUCTURAL_TOL,
};
pub use siv::{
    separability_siv_bound, siv_formation, siv_pure, werner_siv_closed_form, SivConvention,
    SivMethod, SivOptions, SivReport,
};
pub use ssr::{
    is_ssr_pure, local_charge_operator, sectors, twirl, ChargeAssignment, Sector,
    SectorDecomposition,
};
pub use states::{
    bell_psi, hyper_state, system_with_frame, two_copies, werner, EncodedBasis, Party,
    PartyLayout, SystemWithFrame,
};
