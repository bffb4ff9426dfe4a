//! Weighted congestion games with polynomial latencies.
//!
//! The crate provides an exact model of the games ([`game`]), the
//! `POT_gamma` family of approximate potential functions together with
//! local-ratio certificates and the numeric `rho(d)` bound ([`potential`]),
//! α-improvement dynamics ([`dynamics`]), brute-force ground truth over
//! the full state space ([`oracle`]), instance files and generators
//! ([`instance`]), and the experiment drivers used by the `wcg` binary
//! ([`experiment`]).

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod game;
pub mod instance;
pub mod oracle;
pub mod potential;
pub mod rational;

pub use dynamics::{
    converge_from_optimum, improving_moves, is_equilibrium, run_dynamics, Move, MoveTrace, PosRun,
    Scheduler,
};
pub use error::{Error, Result};
pub use game::{GameInstance, LoadProfile, Player, Resource, State, StateSpace, Strategy};
pub use oracle::{OracleReport, PosValue, PotentialCheck};
pub use potential::{GammaProfile, ProfileKind, RatioCertificate, RhoResult};
pub use rational::Rational;
