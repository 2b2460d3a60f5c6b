//! Joint move probabilities per type sector.
//!
//! Classical play multiplies independent single-player distributions. Quantum
//! play measures a shared state `cos(γ/2)|0…0⟩ + e^{iφ} sin(γ/2)|1…1⟩` after
//! each player rotates their own qubit by the angle chosen for their type;
//! amplitudes are evaluated with explicit complex arithmetic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::{profile_bit, CoordinatorParams, StrategyProfile};

/// Negative round-off above this is clamped to zero.
const ROUND_OFF: f64 = 1e-15;

/// `values[type_profile * 2^n + move_profile]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointProbTensor {
    n_players: usize,
    values: Vec<f64>,
}

impl JointProbTensor {
    /// Wraps raw values after checking shape, range and per-sector normalization
    /// (within `tol`).
    pub fn from_values(n_players: usize, values: Vec<f64>, tol: f64) -> Result<Self> {
        let dim = 1usize << n_players;
        if values.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for {n_players} players, expected {}",
                values.len(),
                dim * dim
            )));
        }
        for (s, sector) in values.chunks(dim).enumerate() {
            if sector.iter().any(|&p| !(-tol..=1.0 + tol).contains(&p)) {
                return Err(Error::ShapeMismatch(format!(
                    "sector {s} has entries outside [0, 1]"
                )));
            }
            let sum: f64 = sector.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::ShapeMismatch(format!("sector {s} sums to {sum}")));
            }
        }
        Ok(JointProbTensor { n_players, values })
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn dim(&self) -> usize {
        1 << self.n_players
    }

    pub fn get(&self, sector: usize, moves: usize) -> f64 {
        self.values[sector * self.dim() + moves]
    }

    pub fn sector(&self, sector: usize) -> &[f64] {
        let d = self.dim();
        &self.values[sector * d..(sector + 1) * d]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Probability that player `k` (in type sector `sector`) plays `mv`.
    pub fn marginal(&self, sector: usize, player: usize, mv: usize) -> f64 {
        let n = self.n_players;
        self.sector(sector)
            .iter()
            .enumerate()
            .filter(|(m, _)| profile_bit(*m, n, player) == mv)
            .map(|(_, p)| p)
            .sum()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &JointProbTensor) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn checked_probability(p: f64) -> Result<f64> {
    if p >= 0.0 {
        Ok(p)
    } else if p > -ROUND_OFF {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!("negative probability {p}")))
    }
}

/// Probability of moves 0 and 1 for each (player, type): `cos²(θ/2)`, `sin²(θ/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePlayerProbs {
    /// `probs[player][type][move]`
    pub probs: Vec<[[f64; 2]; 2]>,
}

impl SinglePlayerProbs {
    pub fn get(&self, player: usize, type_index: usize, mv: usize) -> f64 {
        self.probs[player][type_index][mv]
    }
}

fn move_probs(theta: f64) -> [f64; 2] {
    let c = (0.5 * theta).cos();
    let s = (0.5 * theta).sin();
    [c * c, s * s]
}

pub fn single_player_probs(profile: &StrategyProfile) -> SinglePlayerProbs {
    SinglePlayerProbs {
        probs: profile
            .angles()
            .iter()
            .map(|&[t0, t1]| [move_probs(t0), move_probs(t1)])
            .collect(),
    }
}

/// Factorized joint probabilities: each player independently plays move 0 with
/// probability `cos²(θ/2)`. Works for any number of players.
pub fn classical_joint(profile: &StrategyProfile) -> JointProbTensor {
    let n = profile.n_players();
    let dim = 1usize << n;
    let single = single_player_probs(profile);
    let mut values = Vec::with_capacity(dim * dim);
    for sector in 0..dim {
        for moves in 0..dim {
            let p: f64 = (0..n)
                .map(|k| single.get(k, profile_bit(sector, n, k), profile_bit(moves, n, k)))
                .product();
            values.push(p);
        }
    }
    JointProbTensor {
        n_players: n,
        values,
    }
}

/// Real rotation `U_θ`: `U|0⟩ = c|0⟩ + s|1⟩`, `U|1⟩ = -s|0⟩ + c|1⟩`, with
/// `c = cos(θ/2)`, `s = sin(θ/2)`. Returned as `[row][column]`.
fn rotation(theta: f64) -> [[f64; 2]; 2] {
    let c = (0.5 * theta).cos();
    let s = (0.5 * theta).sin();
    [[c, -s], [s, c]]
}

fn initial_amplitudes(coord: &CoordinatorParams) -> (Complex64, Complex64) {
    let g = 0.5 * coord.gamma();
    (
        Complex64::new(g.cos(), 0.0),
        Complex64::from_polar(g.sin(), coord.phi()),
    )
}

fn require_players(profile: &StrategyProfile, n: usize) -> Result<()> {
    if profile.n_players() != n {
        return Err(Error::ShapeMismatch(format!(
            "profile has {} players, expected {n}",
            profile.n_players()
        )));
    }
    Ok(())
}

/// Two-player entangled joint probabilities
/// `|⟨AB| U_α ⊗ V_β |Φ_γφ⟩|²` over the four-dimensional state.
pub fn quantum_joint(
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
) -> Result<JointProbTensor> {
    require_players(profile, 2)?;
    let (c0, c1) = initial_amplitudes(coord);
    // basis order |00>, |01>, |10>, |11>
    let psi = [c0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), c1];
    let mut values = Vec::with_capacity(16);
    for a in 0..2 {
        let u = rotation(profile.angle(0, a));
        for b in 0..2 {
            let v = rotation(profile.angle(1, b));
            for row_a in &u {
                for row_b in &v {
                    let mut amp = Complex64::new(0.0, 0.0);
                    for i in 0..2 {
                        for j in 0..2 {
                            amp += psi[2 * i + j] * (row_a[i] * row_b[j]);
                        }
                    }
                    values.push(checked_probability(amp.norm_sqr())?);
                }
            }
        }
    }
    Ok(JointProbTensor {
        n_players: 2,
        values,
    })
}

/// Applies a real 2×2 gate to qubit `k` of an `n`-qubit state (qubit 0 is the
/// most significant bit).
fn apply_local(state: &mut [Complex64], n: usize, k: usize, gate: &[[f64; 2]; 2]) {
    let stride = 1usize << (n - 1 - k);
    for base in 0..state.len() {
        if base & stride != 0 {
            continue;
        }
        let lo = state[base];
        let hi = state[base | stride];
        state[base] = lo * gate[0][0] + hi * gate[0][1];
        state[base | stride] = lo * gate[1][0] + hi * gate[1][1];
    }
}

/// N-player generalization on the state `cos(γ/2)|0…0⟩ + e^{iφ} sin(γ/2)|1…1⟩`.
pub fn quantum_joint_nparty(
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
    n: usize,
) -> Result<JointProbTensor> {
    if n < 2 {
        return Err(Error::ShapeMismatch(format!(
            "need at least 2 players, got {n}"
        )));
    }
    require_players(profile, n)?;
    let dim = 1usize << n;
    let (c0, c1) = initial_amplitudes(coord);
    let mut values = Vec::with_capacity(dim * dim);
    let mut state = vec![Complex64::new(0.0, 0.0); dim];
    for sector in 0..dim {
        state.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        state[0] = c0;
        state[dim - 1] += c1;
        for k in 0..n {
            let gate = rotation(profile.angle(k, profile_bit(sector, n, k)));
            apply_local(&mut state, n, k, &gate);
        }
        for amp in &state {
            values.push(checked_probability(amp.norm_sqr())?);
        }
    }
    Ok(JointProbTensor {
        n_players: n,
        values,
    })
}

/// Joint probabilities for any player count: the dedicated two-player routine
/// for `n = 2`, the state-vector routine otherwise.
pub fn joint_for(profile: &StrategyProfile, coord: &CoordinatorParams) -> Result<JointProbTensor> {
    match profile.n_players() {
        2 => quantum_joint(profile, coord),
        n => quantum_joint_nparty(profile, coord, n),
    }
}

/// Split of the two-player quantum tensor into a mixture of factorized
/// distributions and an interference correction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDecomposition {
    /// `cos²(γ/2) p_A q_B + sin²(γ/2) p_Ā q_B̄`
    pub pseudo_classical: Vec<f64>,
    /// `(-1)^{A+B} cos φ sin γ · sin α sin β / 4`
    pub interference: Vec<f64>,
}

impl ProbDecomposition {
    pub fn total(&self) -> Vec<f64> {
        self.pseudo_classical
            .iter()
            .zip(&self.interference)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// On `[0, π]` the interference magnitude equals `cos φ sin γ √(p₀p₁q₀q₁)`; the
/// signed product used here also holds on the rest of the circle.
pub fn decompose(
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
) -> Result<ProbDecomposition> {
    require_players(profile, 2)?;
    let single = single_player_probs(profile);
    let cg2 = (0.5 * coord.gamma()).cos().powi(2);
    let sg2 = (0.5 * coord.gamma()).sin().powi(2);
    let kappa = coord.interference_weight();
    let mut pseudo = Vec::with_capacity(16);
    let mut interference = Vec::with_capacity(16);
    for a in 0..2 {
        let p = single.probs[0][a];
        let sa = profile.angle(0, a).sin();
        for b in 0..2 {
            let q = single.probs[1][b];
            let sb = profile.angle(1, b).sin();
            for big_a in 0..2 {
                for big_b in 0..2 {
                    let direct = cg2 * p[big_a] * q[big_b] + sg2 * p[1 - big_a] * q[1 - big_b];
                    pseudo.push(checked_probability(direct)?);
                    let sign = if (big_a + big_b) % 2 == 0 { 1.0 } else { -1.0 };
                    interference.push(sign * kappa * sa * sb * 0.25);
                }
            }
        }
    }
    Ok(ProbDecomposition {
        pseudo_classical: pseudo,
        interference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn classical_identity_rotations() {
        let t = classical_joint(&StrategyProfile::uniform(2, 0.0).unwrap());
        for s in 0..4 {
            assert_eq!(t.sector(s), &[1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn classical_full_flip() {
        let p = StrategyProfile::two_player([PI, 0.0], [0.0, 0.0]).unwrap();
        let t = classical_joint(&p);
        assert!(close(t.get(0, 0b10), 1.0, 1e-15));
    }

    #[test]
    fn classical_half_turn_is_uniform() {
        // oracle: rotate |0> by hand and take the outer product
        let h = FRAC_PI_2;
        let v = [(h / 2.0).cos(), (h / 2.0).sin()];
        let expected: Vec<f64> = (0..4).map(|m| (v[m >> 1] * v[m & 1]).powi(2)).collect();
        let p = StrategyProfile::two_player([h, 0.0], [h, 0.0]).unwrap();
        let t = classical_joint(&p);
        for (m, &want) in expected.iter().enumerate() {
            assert!(close(t.get(0, m), want, 1e-15));
            assert!(close(t.get(0, m), 0.25, 1e-15));
        }
    }

    #[test]
    fn quantum_unrotated_bell_state() {
        let t = quantum_joint(
            &StrategyProfile::uniform(2, 0.0).unwrap(),
            &CoordinatorParams::maximal(),
        )
        .unwrap();
        for s in 0..4 {
            let sec = t.sector(s);
            assert!(close(sec[0], 0.5, 1e-15) && close(sec[3], 0.5, 1e-15));
            assert!(sec[1].abs() < 1e-15 && sec[2].abs() < 1e-15);
        }
    }

    #[test]
    fn nparty_ghz_and_product() {
        let zero = StrategyProfile::uniform(3, 0.0).unwrap();
        let t = quantum_joint_nparty(&zero, &CoordinatorParams::classical(), 3).unwrap();
        for s in 0..8 {
            assert!(close(t.get(s, 0), 1.0, 1e-15));
        }
        let t = quantum_joint_nparty(&zero, &CoordinatorParams::maximal(), 3).unwrap();
        for s in 0..8 {
            assert!(close(t.get(s, 0), 0.5, 1e-15));
            assert!(close(t.get(s, 7), 0.5, 1e-15));
            assert!((1..7).all(|m| t.get(s, m).abs() < 1e-15));
        }
    }

    #[test]
    fn nparty_shape_errors() {
        let p = StrategyProfile::uniform(2, 0.0).unwrap();
        assert!(quantum_joint_nparty(&p, &CoordinatorParams::classical(), 3).is_err());
        assert!(quantum_joint(
            &StrategyProfile::uniform(3, 0.0).unwrap(),
            &CoordinatorParams::classical()
        )
        .is_err());
    }

    #[test]
    fn decomposition_vanishing_interference() {
        let p = StrategyProfile::two_player([0.3, 1.2], [2.0, 0.7]).unwrap();
        let d = decompose(&p, &CoordinatorParams::classical()).unwrap();
        assert!(d.interference.iter().all(|&x| x == 0.0));
        let d = decompose(&p, &CoordinatorParams::new(1.0, FRAC_PI_2).unwrap()).unwrap();
        assert!(d.interference.iter().all(|&x| x.abs() < 1e-16));
    }

    #[test]
    fn decomposition_half_turn_interference() {
        // p = q = (1/2, 1/2): sqrt(p0 p1 q0 q1) = 1/4
        let h = FRAC_PI_2;
        let p = StrategyProfile::two_player([h, 0.0], [h, 0.0]).unwrap();
        let d = decompose(&p, &CoordinatorParams::maximal()).unwrap();
        let expected = [0.25, -0.25, -0.25, 0.25];
        for (got, want) in d.interference.iter().zip(expected) {
            assert!(close(*got, want, 1e-15));
        }
    }

    #[test]
    fn single_player_values() {
        let p = StrategyProfile::two_player([0.0, PI], [FRAC_PI_2, 0.0]).unwrap();
        let s = single_player_probs(&p);
        assert_eq!(s.probs[0][0], [1.0, 0.0]);
        assert!(close(s.get(0, 1, 0), 0.0, 1e-15) && close(s.get(0, 1, 1), 1.0, 1e-15));
        assert!(close(s.get(1, 0, 0), 0.5, 1e-15) && close(s.get(1, 0, 1), 0.5, 1e-15));
    }

    #[test]
    fn raw_tensor_checks() {
        assert!(JointProbTensor::from_values(2, vec![0.25; 16], 1e-12).is_ok());
        assert!(JointProbTensor::from_values(2, vec![0.25; 12], 1e-12).is_err());
        let mut v = vec![0.25; 16];
        v[0] = 0.5;
        assert!(JointProbTensor::from_values(2, v, 1e-12).is_err());
    }
}
