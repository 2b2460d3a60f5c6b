//! Games of incomplete information played with classical or entangled
//! strategies: joint probabilities, payoffs, Bayesian Nash equilibria and
//! Cereceda/CHSH analysis.
//!
//! Each player has two types and two moves. A strategy assigns a rotation
//! angle to each type; a coordinator shares the state
//! `cos(γ/2)|0…0⟩ + e^{iφ} sin(γ/2)|1…1⟩` and every player measures after
//! rotating their qubit. `γ = 0` recovers classical pure strategies.
//!
//! ```
//! use qbayes::{builtin_extended_bos, joint_for, payoffs, CoordinatorParams, StrategyProfile};
//! use std::f64::consts::PI;
//!
//! let game = builtin_extended_bos();
//! let profile = StrategyProfile::two_player([0.0, 1.5 * PI], [0.25 * PI, 0.75 * PI]).unwrap();
//! let probs = joint_for(&profile, &CoordinatorParams::maximal()).unwrap();
//! let pay = payoffs(&probs, &game).unwrap();
//! assert!((pay.total[0] - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
//! ```

pub mod angle;
pub mod bell;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod format;
pub mod game;
pub mod payoff;
pub mod probability;
pub mod search;
pub mod sweep;

pub use bell::{bell_report, cereceda_lhs, enumerate_variants, max_violation_search, BellReport};
pub use equilibrium::{
    best_response, find_equilibria, verify_equilibrium, EquilibriumReport, SolverConfig,
};
pub use error::{Error, Result};
pub use game::{
    builtin, builtin_extended_bos, builtin_three_player, CoordinatorParams, GameSpec, PlayerSpec,
    StrategyProfile,
};
pub use payoff::{payoffs, PayoffVector};
pub use probability::{classical_joint, joint_for, quantum_joint, JointProbTensor};
