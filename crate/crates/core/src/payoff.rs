//! Expected payoffs from joint probability tensors.
//!
//! For the extended Battle of Sexes, Alice's total payoff is
//! `¾Δ₀₀ + ¼Δ₁₁` and Bob's is `¼Δ₀₀ + ¾Δ₁₁`, where the Δ functionals are
//! exactly the left-hand sides of the two base Cereceda inequalities. Classical
//! play therefore never yields a positive payoff.
//!
//! At the maximally entangled equilibrium family both Δ values equal
//! `(√2 − 1)/2`, i.e. half of `cos²(π/8) − 3 sin²(π/8)`. That half is what the
//! joint probabilities give, and it is the value that makes the equilibrium
//! payoff `(√2 − 1)/2` and sits exactly on the Tsirelson ceiling of the
//! Cereceda form; quoting the unhalved expression as Δ would put Δ above
//! that ceiling.

use crate::error::{Error, Result};
use crate::game::{profile_bit, CoordinatorParams, GameSpec, StrategyProfile};
use crate::probability::{decompose, joint_for, JointProbTensor};

/// Per-player sector payoffs, `values[player][type_profile]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorPayoffs {
    pub values: Vec<Vec<f64>>,
}

/// Sector payoffs together with the type-averaged totals.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffVector {
    pub sector: Vec<Vec<f64>>,
    pub total: Vec<f64>,
}

fn check_shape(probs: &JointProbTensor, spec: &GameSpec) -> Result<()> {
    if probs.n_players() != spec.n_players() {
        return Err(Error::ShapeMismatch(format!(
            "tensor has {} players, game has {}",
            probs.n_players(),
            spec.n_players()
        )));
    }
    Ok(())
}

/// `Π_k^{[s]} = Σ_m payoff_k[s][m] · P[s][m]`.
pub fn sector_payoffs(probs: &JointProbTensor, spec: &GameSpec) -> Result<SectorPayoffs> {
    check_shape(probs, spec)?;
    let values = spec
        .payoffs
        .iter()
        .map(|tensor| {
            tensor
                .iter()
                .enumerate()
                .map(|(s, row)| row.iter().zip(probs.sector(s)).map(|(u, p)| u * p).sum())
                .collect()
        })
        .collect();
    Ok(SectorPayoffs { values })
}

/// Weights each sector by the probability nature draws it.
pub fn total_payoffs(sector: &SectorPayoffs, spec: &GameSpec) -> PayoffVector {
    let weights: Vec<f64> = (0..spec.n_sectors())
        .map(|s| spec.sector_weight(s))
        .collect();
    let total = sector
        .values
        .iter()
        .map(|row| row.iter().zip(&weights).map(|(v, w)| v * w).sum())
        .collect();
    PayoffVector {
        sector: sector.values.clone(),
        total,
    }
}

pub fn payoffs(probs: &JointProbTensor, spec: &GameSpec) -> Result<PayoffVector> {
    Ok(total_payoffs(&sector_payoffs(probs, spec)?, spec))
}

/// Total payoffs of a strategy profile under the given coordinator state.
pub fn payoffs_at(
    spec: &GameSpec,
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
) -> Result<Vec<f64>> {
    Ok(payoffs(&joint_for(profile, coord)?, spec)?.total)
}

/// One signed probability in a [`SignedSelection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SelectionTerm {
    pub positive: bool,
    pub sector: usize,
    pub moves: usize,
}

/// A signed sum of selected joint probabilities. Covers the Δ functionals and
/// every Cereceda-type left-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedSelection {
    pub n_players: usize,
    pub terms: Vec<SelectionTerm>,
}

impl SignedSelection {
    /// `P^{[0…0]}_{0…0} − Σ_k P^{[e_k]}_{0…0} − P^{[1…1]}_{1…1}` where `e_k` has
    /// a single type 1 at player `k`. `mirror` flips every move label.
    pub fn cereceda_base(n_players: usize, mirror: bool) -> Self {
        let all = (1usize << n_players) - 1;
        let zeros = if mirror { all } else { 0 };
        let ones = all ^ zeros;
        let mut terms = vec![SelectionTerm {
            positive: true,
            sector: 0,
            moves: zeros,
        }];
        for k in 0..n_players {
            terms.push(SelectionTerm {
                positive: false,
                sector: 1 << (n_players - 1 - k),
                moves: zeros,
            });
        }
        terms.push(SelectionTerm {
            positive: false,
            sector: all,
            moves: ones,
        });
        SignedSelection { n_players, terms }
    }

    pub fn eval(&self, probs: &JointProbTensor) -> Result<f64> {
        if probs.n_players() != self.n_players {
            return Err(Error::ShapeMismatch(format!(
                "selection over {} players applied to a {}-player tensor",
                self.n_players,
                probs.n_players()
            )));
        }
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let p = probs.get(t.sector, t.moves);
                if t.positive {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPair {
    pub delta00: f64,
    pub delta11: f64,
}

pub fn delta_pair(probs: &JointProbTensor) -> Result<DeltaPair> {
    if probs.n_players() != 2 {
        return Err(Error::ShapeMismatch("Δ functionals need 2 players".into()));
    }
    Ok(DeltaPair {
        delta00: SignedSelection::cereceda_base(2, false).eval(probs)?,
        delta11: SignedSelection::cereceda_base(2, true).eval(probs)?,
    })
}

/// Per-player split of the total payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffDecomposition {
    /// Payoff computed from the mixture of factorized distributions alone.
    pub pseudo_classical: Vec<f64>,
    /// Remainder carried by the `cos φ sin γ` interference term.
    pub interference: Vec<f64>,
    pub total: Vec<f64>,
}

pub fn payoff_decomposition(
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
    spec: &GameSpec,
) -> Result<PayoffDecomposition> {
    if spec.n_players() != 2 {
        return Err(Error::Unsupported(
            "payoff decomposition needs 2 players".into(),
        ));
    }
    let d = decompose(profile, coord)?;
    let total = payoffs(&crate::probability::quantum_joint(profile, coord)?, spec)?.total;
    let pseudo_tensor = JointProbTensor::from_values(2, d.pseudo_classical, 1e-9)?;
    let pseudo_classical = payoffs(&pseudo_tensor, spec)?.total;
    let interference = total
        .iter()
        .zip(&pseudo_classical)
        .map(|(t, p)| t - p)
        .collect();
    Ok(PayoffDecomposition {
        pseudo_classical,
        interference,
        total,
    })
}

/// `dP^{[ab]}_{AB}/dθ` for the angle of player `which` (0 = Alice, 1 = Bob),
/// written as a 4-vector over move profiles.
fn joint_derivative(alpha: f64, beta: f64, coord: &CoordinatorParams, which: usize) -> [f64; 4] {
    let cg2 = (0.5 * coord.gamma()).cos().powi(2);
    let sg2 = (0.5 * coord.gamma()).sin().powi(2);
    let kappa = coord.interference_weight();
    // x_A(θ) = (1 + (-1)^A cos θ)/2
    let x = |mv: usize, t: f64| 0.5 * (1.0 + if mv == 0 { t.cos() } else { -t.cos() });
    let dx = |mv: usize, t: f64| {
        if mv == 0 {
            -0.5 * t.sin()
        } else {
            0.5 * t.sin()
        }
    };
    let mut out = [0.0; 4];
    for big_a in 0..2 {
        for big_b in 0..2 {
            let sign = if (big_a + big_b) % 2 == 0 { 1.0 } else { -1.0 };
            let (na, nb) = (1 - big_a, 1 - big_b);
            out[2 * big_a + big_b] = if which == 0 {
                cg2 * dx(big_a, alpha) * x(big_b, beta)
                    + sg2 * dx(na, alpha) * x(nb, beta)
                    + 0.25 * sign * kappa * alpha.cos() * beta.sin()
            } else {
                cg2 * x(big_a, alpha) * dx(big_b, beta)
                    + sg2 * x(na, alpha) * dx(nb, beta)
                    + 0.25 * sign * kappa * alpha.sin() * beta.cos()
            };
        }
    }
    out
}

/// `∂Π_{payoff_player} / ∂θ_{angle_player}^{[type]}` in closed form.
pub fn cross_gradient(
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
    spec: &GameSpec,
    payoff_player: usize,
    angle_player: usize,
    type_index: usize,
) -> Result<f64> {
    if spec.n_players() != 2 || profile.n_players() != 2 {
        return Err(Error::Unsupported(
            "analytic gradients need 2 players".into(),
        ));
    }
    let mut g = 0.0;
    for sector in 0..4 {
        if profile_bit(sector, 2, angle_player) != type_index {
            continue;
        }
        let a = profile.angle(0, profile_bit(sector, 2, 0));
        let b = profile.angle(1, profile_bit(sector, 2, 1));
        let dp = joint_derivative(a, b, coord, angle_player);
        let row = &spec.payoffs[payoff_player][sector];
        let inner: f64 = row.iter().zip(dp.iter()).map(|(u, d)| u * d).sum();
        g += spec.sector_weight(sector) * inner;
    }
    Ok(g)
}

/// `∂Π_player / ∂θ_player^{[type]}`.
pub fn payoff_gradient(
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
    spec: &GameSpec,
    player: usize,
    type_index: usize,
) -> Result<f64> {
    cross_gradient(profile, coord, spec, player, player, type_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builtin_extended_bos;
    use crate::probability::classical_joint;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tensor(sector0: [f64; 4]) -> JointProbTensor {
        let mut v = vec![0.0; 16];
        v[..4].copy_from_slice(&sector0);
        for s in 1..4 {
            v[4 * s] = 1.0;
        }
        JointProbTensor::from_values(2, v, 1e-12).unwrap()
    }

    #[test]
    fn main_sector_payoffs() {
        let g = builtin_extended_bos();
        let s = sector_payoffs(&tensor([1.0, 0.0, 0.0, 0.0]), &g).unwrap();
        assert_eq!((s.values[0][0], s.values[1][0]), (3.0, 1.0));
        let s = sector_payoffs(&tensor([0.0, 0.0, 0.0, 1.0]), &g).unwrap();
        assert_eq!((s.values[0][0], s.values[1][0]), (1.0, 3.0));
        let s = sector_payoffs(&tensor([0.0, 1.0, 0.0, 0.0]), &g).unwrap();
        assert_eq!((s.values[0][0], s.values[1][0]), (0.0, 0.0));
    }

    #[test]
    fn constant_sector_payoffs_average_to_constant() {
        let g = builtin_extended_bos();
        let s = SectorPayoffs {
            values: vec![vec![1.5; 4], vec![-2.0; 4]],
        };
        let t = total_payoffs(&s, &g);
        assert_eq!(t.total, vec![1.5, -2.0]);
    }

    #[test]
    fn delta_hand_values() {
        let p = StrategyProfile::two_player([0.0, 0.0], [0.0, PI]).unwrap();
        let d = delta_pair(&classical_joint(&p)).unwrap();
        assert!(d.delta00.abs() < 1e-15);
        let h = FRAC_PI_2;
        let p = StrategyProfile::two_player([h, h], [h, h]).unwrap();
        let d = delta_pair(&classical_joint(&p)).unwrap();
        assert!((d.delta00 + 0.5).abs() < 1e-15);
        assert!((d.delta11 + 0.5).abs() < 1e-15);
    }

    #[test]
    fn cereceda_base_three_party_shape() {
        let s = SignedSelection::cereceda_base(3, false);
        assert_eq!(s.terms.len(), 5);
        assert_eq!(s.terms[1].sector, 0b100);
        assert_eq!(s.terms[4].moves, 0b111);
        let m = SignedSelection::cereceda_base(3, true);
        assert_eq!(m.terms[0].moves, 0b111);
        assert_eq!(m.terms[4].moves, 0);
    }

    #[test]
    fn gradient_errors_for_three_players() {
        let g = crate::game::builtin_three_player();
        let p = StrategyProfile::uniform(3, 0.1).unwrap();
        assert!(payoff_gradient(&p, &CoordinatorParams::classical(), &g, 0, 0).is_err());
    }
}
