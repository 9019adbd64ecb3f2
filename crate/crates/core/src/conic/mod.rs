//! Complex semidefinite programming and rank-one recovery.

mod dense;
pub mod dump;
pub mod rank_one;
pub mod sdp;

pub use rank_one::{extract_rank_one, linearize_spectral_norm, rank_one_gap, QuadForm, RankOneProblem, RankOneResult, SpectralMinorant};
pub use sdp::{solve_sdp, Coeff, Constraint, Relation, SdpProblem, SdpSolution, SdpStatus, Sense, SolverOptions, Term};
