//! Base and strong generating sets for matrix groups over finite fields.
//!
//! The central object is the [`chain::StabilizerChain`]: an ordered base of
//! points in `F_q^d` (or projective lines), a strong generating set of
//! invertible matrices, and one Schreier tree per level. A completed chain
//! answers order, membership, enumeration, factorization and random-element
//! queries.
//!
//! Chains can be built four ways: the deterministic Schreier-Sims sweep
//! ([`chain::compute_bsgs_deterministic`]), the pre-Sims naive sweep with
//! generator boiling ([`chain::compute_bsgs_naive`]), the probabilistic
//! variant fed by product replacement ([`randomized::random_schreier_sims`]),
//! and the coset-enumeration assisted variant
//! ([`stcs::verify_chain_stcs`]).

pub mod app;
pub mod chain;
pub mod error;
pub mod gf;
pub mod heuristics;
pub mod matrix;
pub mod oracle;
pub mod randomized;
pub mod schreier;
pub mod stcs;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
