//! Game definitions: players with private types, payoff tensors, strategy
//! profiles and the coordinator's entanglement parameters.
//!
//! Tensor layout: the type profile is the outer index and the move profile
//! the inner one. Both are read as binary numbers with player 0 as the most
//! significant bit, so for two players the order is `00, 01, 10, 11`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angle::wrap_tau;
use crate::error::{Error, Result};

/// Number of types (and of moves) per player. Only dichotomic games are supported.
pub const TYPES_PER_PLAYER: usize = 2;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Index of a profile given one bit per player, player 0 most significant.
pub fn profile_index(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1))
}

/// Bit of player `k` in a profile index over `n` players.
#[inline]
pub fn profile_bit(index: usize, n: usize, k: usize) -> usize {
    (index >> (n - 1 - k)) & 1
}

/// Binary label of a profile, e.g. `"01"`.
pub fn profile_label(index: usize, n: usize) -> String {
    (0..n)
        .map(|k| {
            if profile_bit(index, n, k) == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parses a binary profile label of length `n`.
pub fn parse_profile_label(label: &str, n: usize) -> Option<usize> {
    if label.len() != n || !label.bytes().all(|b| b == b'0' || b == b'1') {
        return None;
    }
    Some(
        label
            .bytes()
            .fold(0, |acc, b| (acc << 1) | usize::from(b - b'0')),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSpec {
    pub name: String,
    /// Probability of each of the player's own types.
    pub type_dist: Vec<f64>,
}

/// A game of incomplete information with dichotomic types and moves.
///
/// Fields are public plain data; call [`GameSpec::validate`] (or build through
/// [`GameSpec::new`]) before handing a spec to the engines.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub name: String,
    pub players: Vec<PlayerSpec>,
    /// `payoffs[player][type_profile][move_profile]`.
    pub payoffs: Vec<Vec<Vec<f64>>>,
}

/// One reason a [`GameSpec`] is malformed.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewPlayers {
        found: usize,
    },
    TypeCount {
        player: usize,
        found: usize,
    },
    NegativeTypeProbability {
        player: usize,
        type_index: usize,
        value: f64,
    },
    TypeDistNotNormalized {
        player: usize,
        sum: f64,
    },
    PayoffPlayerCount {
        expected: usize,
        found: usize,
    },
    SectorCount {
        player: usize,
        expected: usize,
        found: usize,
    },
    MoveCount {
        player: usize,
        sector: usize,
        expected: usize,
        found: usize,
    },
    NonFinite {
        player: usize,
        sector: usize,
        move_index: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::TooFewPlayers { found } => {
                write!(f, "at least 2 players required, found {found}")
            }
            Violation::TypeCount { player, found } => write!(
                f,
                "player {player} has {found} types; only {TYPES_PER_PLAYER} are supported"
            ),
            Violation::NegativeTypeProbability { player, type_index, value } => write!(
                f,
                "type_dist of player {player} has negative entry {value} at type {type_index}"
            ),
            Violation::TypeDistNotNormalized { player, sum } => {
                write!(f, "type_dist of player {player} sums to {sum}")
            }
            Violation::PayoffPlayerCount { expected, found } => {
                write!(f, "expected payoffs for {expected} players, found {found}")
            }
            Violation::SectorCount { player, expected, found } => write!(
                f,
                "expected {expected} type sectors for player {player}, found {found}"
            ),
            Violation::MoveCount { player, sector, expected, found } => write!(
                f,
                "expected {expected} move profiles in sector {sector} of player {player}, found {found}"
            ),
            Violation::NonFinite { player, sector, move_index } => write!(
                f,
                "non-finite payoff for player {player} at sector {sector}, move profile {move_index}"
            ),
        }
    }
}

impl GameSpec {
    /// Builds a spec and rejects it unless it validates.
    pub fn new(
        name: impl Into<String>,
        players: Vec<PlayerSpec>,
        payoffs: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let spec = GameSpec {
            name: name.into(),
            players,
            payoffs,
        };
        spec.validate().map_err(Error::Invalid)?;
        Ok(spec)
    }

    pub fn n_players(&self) -> usize {
        self.players.len()
    }

    /// Number of type profiles (sectors).
    pub fn n_sectors(&self) -> usize {
        1 << self.players.len()
    }

    /// Number of move profiles per sector.
    pub fn n_moves(&self) -> usize {
        1 << self.players.len()
    }

    /// Probability that nature draws the given type profile.
    pub fn sector_weight(&self, sector: usize) -> f64 {
        let n = self.n_players();
        self.players
            .iter()
            .enumerate()
            .map(|(k, p)| p.type_dist[profile_bit(sector, n, k)])
            .product()
    }

    pub fn payoff(&self, player: usize, sector: usize, moves: usize) -> f64 {
        self.payoffs[player][sector][moves]
    }

    /// Checks every structural invariant and returns all violations found.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let n = self.players.len();
        if n < 2 {
            out.push(Violation::TooFewPlayers { found: n });
        }
        for (k, p) in self.players.iter().enumerate() {
            if p.type_dist.len() != TYPES_PER_PLAYER {
                out.push(Violation::TypeCount {
                    player: k,
                    found: p.type_dist.len(),
                });
                continue;
            }
            for (t, &v) in p.type_dist.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    out.push(Violation::NegativeTypeProbability {
                        player: k,
                        type_index: t,
                        value: v,
                    });
                }
            }
            let sum: f64 = p.type_dist.iter().sum();
            if !sum.is_finite() || (sum - 1.0).abs() > NORMALIZATION_TOL {
                out.push(Violation::TypeDistNotNormalized { player: k, sum });
            }
        }
        if self.payoffs.len() != n {
            out.push(Violation::PayoffPlayerCount {
                expected: n,
                found: self.payoffs.len(),
            });
        }
        // n is bounded by what fits in a shift; anything larger fails above anyway
        if (2..16).contains(&n) {
            let sectors = 1usize << n;
            let moves = 1usize << n;
            for (k, tensor) in self.payoffs.iter().enumerate() {
                if tensor.len() != sectors {
                    out.push(Violation::SectorCount {
                        player: k,
                        expected: sectors,
                        found: tensor.len(),
                    });
                }
                for (s, row) in tensor.iter().enumerate() {
                    if row.len() != moves {
                        out.push(Violation::MoveCount {
                            player: k,
                            sector: s,
                            expected: moves,
                            found: row.len(),
                        });
                    }
                    for (m, v) in row.iter().enumerate() {
                        if !v.is_finite() {
                            out.push(Violation::NonFinite {
                                player: k,
                                sector: s,
                                move_index: m,
                            });
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// True when this spec carries exactly the payoffs and type weights of
    /// [`builtin_extended_bos`].
    pub fn is_extended_bos(&self) -> bool {
        let reference = builtin_extended_bos();
        self.players.len() == 2
            && self
                .players
                .iter()
                .zip(&reference.players)
                .all(|(a, b)| a.type_dist == b.type_dist)
            && self.payoffs == reference.payoffs
    }
}

fn uniform_player(name: &str) -> PlayerSpec {
    PlayerSpec {
        name: name.to_string(),
        type_dist: vec![0.5, 0.5],
    }
}

/// The extended Battle of Sexes: Battle of Sexes in the main sector `[00]`,
/// Chicken-like shadow sectors, uniform type distributions.
pub fn builtin_extended_bos() -> GameSpec {
    // moves 00, 01, 10, 11
    let alice = vec![
        vec![3.0, 0.0, 0.0, 1.0],
        vec![-3.0, 0.0, 0.0, -1.0],
        vec![-3.0, 0.0, 0.0, -1.0],
        vec![-1.0, 0.0, 0.0, -3.0],
    ];
    let bob = vec![
        vec![1.0, 0.0, 0.0, 3.0],
        vec![-1.0, 0.0, 0.0, -3.0],
        vec![-1.0, 0.0, 0.0, -3.0],
        vec![-3.0, 0.0, 0.0, -1.0],
    ];
    GameSpec {
        name: "extended-bos".to_string(),
        players: vec![uniform_player("Alice"), uniform_player("Bob")],
        payoffs: vec![alice, bob],
    }
}

/// Three-player game whose payoffs are built on the three-party Cereceda
/// inequality. Chris's tensor is not part of the published game; the
/// default gives him weight `+2` where Alice and Bob hold positive entries
/// and `-2` where they hold negative ones. Override it through a game file.
pub fn builtin_three_player() -> GameSpec {
    let sector = |s: &str| parse_profile_label(s, 3).expect("static label");
    let zero = || vec![vec![0.0; 8]; 8];
    let (mut alice, mut bob, mut chris) = (zero(), zero(), zero());
    let all0 = sector("000");
    let all1 = sector("111");
    // (sector, move profile, Alice, Bob, Chris)
    let entries = [
        ("000", all0, 3.0, 1.0, 2.0),
        ("001", all0, -3.0, -1.0, -2.0),
        ("010", all0, -3.0, -1.0, -2.0),
        ("100", all0, -3.0, -1.0, -2.0),
        ("111", all0, -1.0, -3.0, -2.0),
        ("000", all1, 1.0, 3.0, 2.0),
        ("001", all1, -1.0, -3.0, -2.0),
        ("010", all1, -1.0, -3.0, -2.0),
        ("100", all1, -1.0, -3.0, -2.0),
        ("111", all1, -3.0, -1.0, -2.0),
    ];
    for (s, m, a, b, c) in entries {
        let s = sector(s);
        alice[s][m] = a;
        bob[s][m] = b;
        chris[s][m] = c;
    }
    GameSpec {
        name: "three-player".to_string(),
        players: vec![
            uniform_player("Alice"),
            uniform_player("Bob"),
            uniform_player("Chris"),
        ],
        payoffs: vec![alice, bob, chris],
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 2] = ["extended-bos", "three-player"];

pub fn builtin(name: &str) -> Option<GameSpec> {
    match name {
        "extended-bos" => Some(builtin_extended_bos()),
        "three-player" => Some(builtin_three_player()),
        _ => None,
    }
}

/// One rotation angle per (player, type).
///
/// Angles live on the circle `[0, 2π)`: the measurement probabilities are
/// 2π-periodic in every angle. Purely classical play only ever needs
/// `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    angles: Vec<[f64; 2]>,
}

impl StrategyProfile {
    /// Rejects non-finite angles and angles outside `[0, 2π)`.
    pub fn new(angles: Vec<[f64; 2]>) -> Result<Self> {
        for (player, pair) in angles.iter().enumerate() {
            for (type_index, &value) in pair.iter().enumerate() {
                if !(0.0..TAU).contains(&value) {
                    return Err(Error::AngleOutOfRange {
                        player,
                        type_index,
                        value,
                    });
                }
            }
        }
        Ok(StrategyProfile { angles })
    }

    /// Reduces every angle modulo 2π. Fails only on non-finite input.
    pub fn wrapped(angles: Vec<[f64; 2]>) -> Result<Self> {
        let angles = angles
            .into_iter()
            .map(|[a, b]| [wrap_tau(a), wrap_tau(b)])
            .collect();
        Self::new(angles)
    }

    /// `(α⁰, α¹)` for Alice and `(β⁰, β¹)` for Bob.
    pub fn two_player(alpha: [f64; 2], beta: [f64; 2]) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    pub fn uniform(n_players: usize, theta: f64) -> Result<Self> {
        Self::new(vec![[theta, theta]; n_players])
    }

    pub fn n_players(&self) -> usize {
        self.angles.len()
    }

    pub fn angle(&self, player: usize, type_index: usize) -> f64 {
        self.angles[player][type_index]
    }

    pub fn angles(&self) -> &[[f64; 2]] {
        &self.angles
    }

    /// Copy with one angle replaced (wrapped onto the circle).
    pub fn with_angle(&self, player: usize, type_index: usize, theta: f64) -> Self {
        let mut angles = self.angles.clone();
        angles[player][type_index] = wrap_tau(theta);
        StrategyProfile { angles }
    }

    /// Angles flattened as `[p0t0, p0t1, p1t0, ...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.angles.iter().flat_map(|p| p.iter().copied()).collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::ShapeMismatch(format!(
                "{} angles cannot be split into (type 0, type 1) pairs",
                flat.len()
            )));
        }
        Self::wrapped(flat.chunks(2).map(|c| [c[0], c[1]]).collect())
    }
}

/// Entanglement angle `gamma` and phase `phi` of the shared state
/// `cos(γ/2)|0…0⟩ + e^{iφ} sin(γ/2)|1…1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinatorParams {
    gamma: f64,
    phi: f64,
}

impl CoordinatorParams {
    /// `gamma` must lie in `[0, π]`. `phi` is accepted in `[0, 2π]` and folded
    /// into `[0, π]`, since only `cos φ` reaches the probabilities.
    pub fn new(gamma: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&gamma) {
            return Err(Error::CoordinatorOutOfRange {
                name: "gamma",
                value: gamma,
                range: "[0, π]",
            });
        }
        if !(0.0..=TAU).contains(&phi) {
            return Err(Error::CoordinatorOutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2π]",
            });
        }
        let phi = if phi > PI { TAU - phi } else { phi };
        Ok(CoordinatorParams { gamma, phi })
    }

    /// Unentangled start state: strategies reduce to independent dice.
    pub fn classical() -> Self {
        CoordinatorParams {
            gamma: 0.0,
            phi: 0.0,
        }
    }

    /// Maximally entangled start state with zero phase.
    pub fn maximal() -> Self {
        CoordinatorParams {
            gamma: FRAC_PI_2,
            phi: 0.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `cos φ · sin γ`, the weight of the interference term.
    pub fn interference_weight(&self) -> f64 {
        self.phi.cos() * self.gamma.sin()
    }
}
