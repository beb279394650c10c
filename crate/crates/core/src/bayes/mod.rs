//! Discrete Bayesian networks: representation, scoring, learning, Markov
//! blankets and exact inference.

mod blanket;
mod cpt;
mod dag;
mod data;
mod factor;
mod infer;
mod learn;
mod net;
mod random;
mod score;
mod variable;

pub use blanket::{blanket_indices, blanket_of, markov_blanket};
pub use cpt::{Cpt, ROW_TOLERANCE};
pub use dag::Dag;
pub use data::DiscreteBatch;
pub use factor::Factor;
pub use infer::{
    blanket_posterior, query_prob, restricted_elimination, variable_elimination,
    variable_elimination_with, Distribution, VeOptions,
};
pub(crate) use learn::align_batch;
pub use learn::{
    hill_climb, hill_climb_traced, mle_fit, parl_update, parl_update_proportional, strl_update,
    strl_update_with, AcceptedMove, HillClimbOptions, HillClimbTrace, LearnOptions, Move,
};
pub use net::{BayesNet, CptDocument, ModelDocument};
pub use random::{random_cpts, random_net, sample_rows};
pub use score::{log_likelihood, score, score_bic, ScoreKind};
pub use variable::{Evidence, VariableSpec};
