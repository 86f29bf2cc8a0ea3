//! koba: a numerical laboratory for invariant metrics and automorphism
//! dynamics on explicit bounded domains in C^d.
//!
//! The crate computes certified brackets for the Kobayashi infinitesimal
//! metric and pseudo-distance, produces and verifies almost-geodesics,
//! evaluates the closed-form automorphism groups of generalized ellipses and
//! weighted homogeneous polynomial domains, classifies automorphisms by
//! orbit dynamics (elliptic / parabolic / hyperbolic), certifies free
//! subgroups by ping-pong, samples limit sets, and ships an SU(1,k) toolkit
//! (Jordan and KAK decompositions, adjoint norms, boundary 2-jets).
//!
//! Every randomized routine takes an explicit seed and is deterministic for
//! a fixed seed; brackets are sound by construction (feasible competitors on
//! one side, certified comparison maps on the other).

pub mod automorphisms;
pub mod domains;
pub mod dynamics;
pub mod error;
pub mod kobayashi;
pub mod liegroup;
pub mod parallel;

pub use automorphisms::{
    automorphism_from_json, boundary_extend, s_phi, Automorphism, BallMoebius, FlowKind,
    WebsterAut, WHPFlow,
};
pub use domains::{
    cayley, cayley_inverse, ComplexPoint, DefiningFunctionValue, DomainSpec, Monomial,
};
pub use dynamics::{
    attracting_fixed_point, classify, hyperbolic_from_sequence, limit_set_sample,
    north_south_check, pingpong_witness, translated_almost_geodesic, translation_length,
    Classification, DynamicsParams, DynamicsReport, PingPongCertificate, TranslationParams,
};
pub use error::{Error, Result};
pub use kobayashi::{
    geodesic_path, infinitesimal_metric, kobayashi_distance, path_length, verify_almost_geodesic,
    visibility_probe, AnalyticDisc, DistanceParams, MetricBracket, MetricParams, PathCurve,
};
pub use liegroup::{
    ad_norm, classify_lie, equivariant_map, jet2_boundary, jordan_decomposition,
    kak_decomposition, BoundaryJet2, LieClassification, LieLabel, SU1kElement,
};
