//! Poker river endgames as Kronecker-structured payoff matrices.
//!
//! The payoff matrix of a river endgame factors as `C (x) F + (L1 W L2) (x) S`,
//! where `F` and `S` come from the betting skeleton and `C`, `W` from the
//! hand distributions. The crate builds that structure, derives sparse
//! low-rank factorizations of it, multiplies through them, solves the game
//! with discounted CFR, and exports the sequence-form LP and MILP.

pub mod bench;
pub mod cards;
pub mod engine;
pub mod error;
pub mod export;
pub mod kron;
pub mod skeleton;
pub mod solver;
pub mod sparse;
pub mod sparsify;
pub mod synth;

pub use cards::{Board, Card, Deck, Hand, HandRank};
pub use engine::{Engine, GradientWorkspace};
pub use error::{Error, Result};
pub use kron::{KronPayoff, RiverInstance, SignMatrix};
pub use skeleton::{BetMenu, BettingConfig, Player, Skeleton};
pub use sparse::{CscMatrix, CsrMatrix, Triplets};
pub use sparsify::{Sparsification, SizeReport, Technique};
pub use solver::{ConvergenceTrace, DcfrParams, StrategyProfile};
