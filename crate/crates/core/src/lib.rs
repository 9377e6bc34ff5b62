//! Exact homological algebra over `Z` and `Z/N` with certified defect
//! exponents.

pub mod almost;
pub mod bounds;
pub mod cech;
pub mod cert;
pub mod complex;
pub mod error;
pub mod gen;
pub mod homspace;
pub mod matrix;
pub mod module;
pub mod normal_form;
pub mod oracle;
pub mod pipeline;
pub mod pseudo;
pub mod ring;

pub use almost::{
    almost_finite_type, almost_from_family, combine_finite_type, simplicial_free_pi_resolution,
    two_of_three, AlmostCert, AlmostContext, ElementFiniteTypeCert, SimplicialResolution,
    TripleSlot,
};
pub use cech::{
    cech_map_transfer, cech_pseudo_coherence, cohomology_bound_transfer, factor_through_kernel,
    glue, glue_finite_type, glue_quality_audit, ordered_cech_complex, total_cech_complex,
    CechCoherenceAudit, CechComplexDatum, CechDatumMap, CechModuleDatum, CechTransferAudit,
    CohomologyTransferAudit, GlueFiniteType, GlueQualityAudit, GlueResult,
};
pub use cert::{NullityCert, PiCertificate};
pub use complex::{
    build_homotopy_ladder, build_homotopy_ladder_on, cone, hom_annihilation, lift_through,
    ChainMap, CochainComplex,
    Cohomology, Homotopy, HomotopyLadder, LiftResult,
};
pub use error::{Error, Result};
pub use gen::{capped_weight_datum, InstanceGen};
pub use homspace::{induced_hom_pi_iso_audit, postcompose_map, HomComplex, InducedHomAudit};
pub use matrix::Matrix;
pub use module::{FpModule, ModuleMap};
pub use pipeline::{
    audit_main_theorem, concentrated_datum, AuditReport, ConeHomotopyWitness,
    CoveringCohomologyCertificate, PipelineOptions, StageReport,
};
pub use pseudo::{
    base_change_resolution, build_pseudo_resolution, compressed_cover, derived_tensor_pi_exactness,
    extension_resolution, filtration_finite_type, finite_type_to_resolution, pi_finite_type,
    reindex, resolution_to_finite_type, tensor_total, termwise_free_replacement,
    transfer_along_map, triangle_resolution, truncation_projection, BuildOptions, ExactTriple,
    FiltrationStep, PiFiniteTypeCert, PseudoResolution, TransferDirection,
};
pub use normal_form::{
    column_lattice_basis, hermite_normal_form, kernel_matrix, smith_normal_form,
    solve_in_column_span, solve_simultaneous, HermiteResult, NormalFormResult,
};
pub use ring::{Ring, RingSpec};
