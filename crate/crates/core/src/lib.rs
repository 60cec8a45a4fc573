//! Stability analysis of sparse matrix spaces.
//!
//! A sparsity pattern fixes which entries of an `n × n` real matrix may be
//! nonzero. The pattern is *stable* when some matrix supported on it is
//! Hurwitz. This crate decides stability through graph conditions on the
//! pattern's digraph, builds explicit Hurwitz witnesses with checkable
//! certificates, and classifies all small patterns up to symmetry.
//!
//! Indices are 0-based in the API and 1-based in every text format.
//!
//! ```
//! use smstab::{classify, verify_verdict, EngineConfig, SparsityPattern};
//!
//! let p: SparsityPattern = "**0\n*0*\n*00".parse().unwrap();
//! let verdict = classify(&p, &EngineConfig::default(), 0);
//! assert!(verdict.is_stable());
//! assert_eq!(verdict.chain_ordering(), Some(&[0, 1, 2][..]));
//! verify_verdict(&verdict, &p, 1e-9).unwrap();
//! ```

#![allow(clippy::needless_range_loop)]

pub mod atlas;
pub mod canon;
pub mod cli;
pub mod exact;
pub mod graph;
pub mod identities;
pub mod par;
pub mod pattern;
pub mod permutation;
pub mod spectral;
pub mod variety;
pub mod verdict;
pub mod witness;

pub use canon::{canonical_form, PatternOrbitInfo};
pub use exact::{char_poly, leading_principal_minors, p_sigma, CharPoly, ExactMatrix};
pub use graph::{
    check_necessary, check_scc_sink, find_nested_chain, hamiltonian_k_exists, has_principal_matching,
    strongly_connected_components, ChainCertificate, VertexSet,
};
pub use pattern::{PatternFormat, SparsityPattern};
pub use permutation::Permutation;
pub use spectral::{spectral_abscissa, RealMatrix, SpectralReport};
pub use verdict::{classify, verify_certificate, verify_verdict, EngineConfig, StabilityVerdict};
pub use witness::{synthesize_stable_witness, WitnessCertificate, WitnessConfig};
