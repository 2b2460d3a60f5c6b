//! Bayesian Nash equilibria for a fixed coordinator state.
//!
//! Every joint probability is affine in `(1, cos θ, sin θ)` for each single
//! strategy angle `θ`, so a player's payoff along their own angle is
//! `A cos θ + B sin θ + C` and the best response is `atan2(B, A)` unless the
//! payoff is flat. The solver runs damped sequential best-response dynamics
//! from the corner profiles plus seeded random starts, certifies every
//! converged point on a deviation grid, and groups the survivors into
//! isolated points and continuous families.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::angle::{circular_distance, fold_to_half_turn, wrap_pi, wrap_tau};
use crate::error::{Error, Result};
use crate::game::{CoordinatorParams, GameSpec, StrategyProfile};
use crate::payoff::{payoff_gradient, payoffs, PayoffVector};
use crate::probability::{joint_for, JointProbTensor};

/// Default seed for the random starts.
pub const DEFAULT_SEED: u64 = 20_080_617;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Random starts in addition to the corner profiles.
    pub n_starts: usize,
    pub br_max_iters: usize,
    /// Largest angle step at which the dynamics count as converged.
    pub br_tol: f64,
    pub damping: f64,
    pub tol_stat: f64,
    pub tol_dev: f64,
    /// Points of the deviation grid over `[0, 2π]`.
    pub deviation_grid_size: usize,
    pub dedup_radius: f64,
    /// Payoff amplitude `√(A² + B²)` below which a direction counts as flat.
    pub flat_tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_starts: 200,
            br_max_iters: 5000,
            br_tol: 1e-13,
            damping: 0.5,
            tol_stat: 1e-8,
            tol_dev: 1e-7,
            deviation_grid_size: 1441,
            dedup_radius: 1e-4,
            flat_tol: 1e-9,
            seed: DEFAULT_SEED,
        }
    }
}

/// `(A, B, C)` with `Π_player(θ) = A cos θ + B sin θ + C` along the angle of
/// `(player, type_index)`, everything else held fixed.
pub fn angle_coefficients(
    spec: &GameSpec,
    coord: &CoordinatorParams,
    profile: &StrategyProfile,
    player: usize,
    type_index: usize,
) -> Result<(f64, f64, f64)> {
    let at = |theta: f64| -> Result<f64> {
        let p = profile.with_angle(player, type_index, theta);
        Ok(payoffs(&joint_for(&p, coord)?, spec)?.total[player])
    };
    let f0 = at(0.0)?;
    let fpi = at(PI)?;
    let fhalf = at(0.5 * PI)?;
    let c = 0.5 * (f0 + fpi);
    Ok((0.5 * (f0 - fpi), fhalf - c, c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub angle: f64,
    pub payoff: f64,
    /// The payoff does not depend on this angle; `angle` is then 0.
    pub flat: bool,
}

pub fn best_response(
    spec: &GameSpec,
    coord: &CoordinatorParams,
    profile: &StrategyProfile,
    player: usize,
    type_index: usize,
) -> Result<BestResponse> {
    best_response_with(
        spec,
        coord,
        profile,
        player,
        type_index,
        SolverConfig::default().flat_tol,
    )
}

fn best_response_with(
    spec: &GameSpec,
    coord: &CoordinatorParams,
    profile: &StrategyProfile,
    player: usize,
    type_index: usize,
    flat_tol: f64,
) -> Result<BestResponse> {
    let (a, b, c) = angle_coefficients(spec, coord, profile, player, type_index)?;
    let r = a.hypot(b);
    if r <= flat_tol {
        return Ok(BestResponse {
            angle: 0.0,
            payoff: a + c,
            flat: true,
        });
    }
    let mut angle = wrap_tau(b.atan2(a));
    if coord.interference_weight() == 0.0 {
        angle = fold_to_half_turn(angle);
    }
    Ok(BestResponse {
        angle,
        payoff: c + r,
        flat: false,
    })
}

/// How a verified equilibrium sits in strategy space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Every angle at 0 or π.
    Edge,
    /// A stationary point away from the edges.
    Interior,
    /// Member of a continuous set of equilibria.
    Family,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Edge => "edge",
            Classification::Interior => "interior",
            Classification::Family => "family",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FreeDirection {
    /// The player's payoff does not depend on this angle.
    Angle { player: usize, type_index: usize },
    /// Rotating every angle of player `k` by `signs[k] · δ` leaves the joint
    /// probabilities unchanged.
    JointRotation { signs: Vec<i8> },
    /// Null direction of the Jacobian of the stationarity conditions, unit
    /// length over `(α⁰, α¹, β⁰, β¹)`: equilibria continue along it.
    Tangent { vector: Vec<f64> },
}

impl fmt::Display for FreeDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeDirection::Angle { player, type_index } => {
                write!(f, "player {player} type {type_index}")
            }
            FreeDirection::JointRotation { signs } => {
                let s: Vec<&str> = signs
                    .iter()
                    .map(|&x| if x > 0 { "+" } else { "-" })
                    .collect();
                write!(f, "joint rotation ({})", s.join(""))
            }
            FreeDirection::Tangent { vector } => {
                let v: Vec<String> = vector.iter().map(|x| format!("{x:.4}")).collect();
                write!(f, "tangent ({})", v.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    pub profile: StrategyProfile,
    pub coord: CoordinatorParams,
    pub payoffs: PayoffVector,
    /// `|∂Π_k/∂θ_k^{[t]}|` per (player, type).
    pub stationarity_residuals: Vec<[f64; 2]>,
    /// The four stationarity conditions of the extended Battle of Sexes, when
    /// the game is that built-in.
    pub condition_residuals: Option<[f64; 4]>,
    /// Best payoff on the deviation grid minus the payoff at the point.
    pub deviation_margin: Vec<[f64; 2]>,
    pub classification: Classification,
    pub free_directions: Vec<FreeDirection>,
    /// Human-readable angle relations the point satisfies.
    pub family_constraints: Vec<String>,
    pub accepted: bool,
    /// Converged starts represented by this report (the point itself first).
    pub members: Vec<StrategyProfile>,
}

impl EquilibriumReport {
    pub fn max_deviation_margin(&self) -> f64 {
        self.deviation_margin
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_stationarity_residual(&self) -> f64 {
        self.stationarity_residuals
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// The four extended-Battle-of-Sexes stationarity expressions, evaluated as
/// products of sines and cosines of the strategy angles and `cos φ sin γ`.
/// Order: Alice type 0, Alice type 1, Bob type 0, Bob type 1.
pub fn bos_condition_residuals(profile: &StrategyProfile, coord: &CoordinatorParams) -> [f64; 4] {
    let (a0, a1) = (profile.angle(0, 0), profile.angle(0, 1));
    let (b0, b1) = (profile.angle(1, 0), profile.angle(1, 1));
    let k = coord.interference_weight();
    [
        a0.sin() * (b0.cos() - b1.cos()) - a0.cos() * (b0.sin() - b1.sin()) * k,
        a1.sin() * (b0.cos() + b1.cos()) - a1.cos() * (b0.sin() + b1.sin()) * k,
        b0.sin() * (a0.cos() - a1.cos()) - b0.cos() * (a0.sin() - a1.sin()) * k,
        b1.sin() * (a0.cos() + a1.cos()) - b1.cos() * (a0.sin() + a1.sin()) * k,
    ]
}

/// The same conditions at `γ = π/2, φ = 0`, written with sines of angle
/// differences.
pub fn maximal_entanglement_conditions(profile: &StrategyProfile) -> [f64; 4] {
    let (a0, a1) = (profile.angle(0, 0), profile.angle(0, 1));
    let (b0, b1) = (profile.angle(1, 0), profile.angle(1, 1));
    [
        (a0 - b1).sin() - (a0 - b0).sin(),
        (a1 - b1).sin() + (a1 - b0).sin(),
        (a1 - b0).sin() - (a0 - b0).sin(),
        (a1 - b1).sin() + (a0 - b1).sin(),
    ]
}

const EDGE_TOL: f64 = 1e-9;

fn is_edge(theta: f64) -> bool {
    circular_distance(theta, 0.0) <= EDGE_TOL || circular_distance(theta, PI) <= EDGE_TOL
}

fn joint_rotation_directions(
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
    base: &JointProbTensor,
) -> Result<Vec<FreeDirection>> {
    let n = profile.n_players();
    let mut out = Vec::new();
    for mask in 0..(1usize << (n - 1)) {
        let signs: Vec<i8> = (0..n)
            .map(|k| {
                if k > 0 && (mask >> (k - 1)) & 1 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        let mut invariant = true;
        for delta in [0.1, 0.37] {
            let rotated = StrategyProfile::wrapped(
                profile
                    .angles()
                    .iter()
                    .zip(&signs)
                    .map(|(&[t0, t1], &s)| {
                        let d = f64::from(s) * delta;
                        [t0 + d, t1 + d]
                    })
                    .collect(),
            )?;
            if joint_for(&rotated, coord)?.max_abs_diff(base) > 1e-12 {
                invariant = false;
                break;
            }
        }
        if invariant {
            out.push(FreeDirection::JointRotation { signs });
        }
    }
    Ok(out)
}

/// Relative size of the smallest singular value of the stationarity Jacobian
/// below which a point counts as a member of a continuous equilibrium set.
const DEGENERACY_TOL: f64 = 1e-6;

/// Unit null vector of `∂(∂Π_k/∂θ_k^t)/∂θ`, when the Jacobian is singular.
fn stationarity_null_vector(
    spec: &GameSpec,
    coord: &CoordinatorParams,
    profile: &StrategyProfile,
) -> Result<Option<Vec<f64>>> {
    use nalgebra::{Matrix4, SymmetricEigen};
    const H: f64 = 1e-5;
    let residual = |flat: &[f64]| -> Result<[f64; 4]> {
        let p = StrategyProfile::from_flat(flat)?;
        let mut g = [0.0; 4];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = payoff_gradient(&p, coord, spec, i / 2, i % 2)?;
        }
        Ok(g)
    };
    let x = profile.to_flat();
    let mut jac = Matrix4::<f64>::zeros();
    for j in 0..4 {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += H;
        xm[j] -= H;
        let (gp, gm) = (residual(&xp)?, residual(&xm)?);
        for i in 0..4 {
            jac[(i, j)] = (gp[i] - gm[i]) / (2.0 * H);
        }
    }
    let scale = jac.abs().max();
    if scale == 0.0 {
        return Ok(None);
    }
    let eig = SymmetricEigen::new(jac.transpose() * jac);
    let (k, smallest) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
            );
    if smallest.max(0.0).sqrt() > DEGENERACY_TOL * scale {
        return Ok(None);
    }
    let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    // sign convention: first non-negligible component positive
    if let Some(&lead) = v.iter().find(|c| c.abs() > 1e-9) {
        if lead < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
    Ok(Some(v))
}

/// Certifies a candidate profile: stationarity residuals, deviation margins on
/// the grid, flat directions and classification.
pub fn verify_equilibrium(
    spec: &GameSpec,
    coord: &CoordinatorParams,
    profile: &StrategyProfile,
    cfg: &SolverConfig,
) -> Result<EquilibriumReport> {
    let n = spec.n_players();
    if profile.n_players() != n {
        return Err(Error::ShapeMismatch(format!(
            "profile has {} players, game has {n}",
            profile.n_players()
        )));
    }
    let tensor = joint_for(profile, coord)?;
    let pay = payoffs(&tensor, spec)?;
    let grid: Vec<f64> = (0..cfg.deviation_grid_size)
        .map(|i| TAU * i as f64 / (cfg.deviation_grid_size.max(2) - 1) as f64)
        .collect();

    let mut residuals = Vec::with_capacity(n);
    let mut margins = Vec::with_capacity(n);
    let mut free = Vec::new();
    let mut all_edge = true;
    let mut interior_ok = true;
    for k in 0..n {
        let mut res = [0.0; 2];
        let mut marg = [0.0; 2];
        for t in 0..2 {
            let theta = profile.angle(k, t);
            let (a, b, _) = angle_coefficients(spec, coord, profile, k, t)?;
            res[t] = if n == 2 {
                payoff_gradient(profile, coord, spec, k, t)?.abs()
            } else {
                (-a * theta.sin() + b * theta.cos()).abs()
            };
            let mut best = f64::NEG_INFINITY;
            for &g in &grid {
                let dev = profile.with_angle(k, t, g);
                best = best.max(payoffs(&joint_for(&dev, coord)?, spec)?.total[k]);
            }
            marg[t] = best - pay.total[k];
            let flat = a.hypot(b) <= cfg.flat_tol;
            if flat {
                free.push(FreeDirection::Angle {
                    player: k,
                    type_index: t,
                });
            }
            if !is_edge(theta) {
                all_edge = false;
                if !flat && res[t] > cfg.tol_stat {
                    interior_ok = false;
                }
            }
        }
        residuals.push(res);
        margins.push(marg);
    }
    free.extend(joint_rotation_directions(profile, coord, &tensor)?);
    if free.is_empty() && n == 2 {
        if let Some(vector) = stationarity_null_vector(spec, coord, profile)? {
            free.push(FreeDirection::Tangent { vector });
        }
    }

    let classification = if !free.is_empty() {
        Classification::Family
    } else if all_edge {
        Classification::Edge
    } else {
        Classification::Interior
    };
    let accepted = margins.iter().flatten().all(|&m| m <= cfg.tol_dev) && interior_ok;

    let is_bos = spec.is_extended_bos();
    let condition_residuals = is_bos.then(|| bos_condition_residuals(profile, coord));
    let mut family_constraints = Vec::new();
    if is_bos {
        if coord.gamma() == 0.0 {
            for fam in enumerate_classical_families(spec)? {
                if fam.contains(profile, 1e-9) {
                    family_constraints.push(fam.to_string());
                }
            }
        }
        if let Ok(q) = quantum_family_constraints(coord) {
            if q.residuals(profile).iter().all(|r| r.abs() <= 1e-6) {
                family_constraints.extend(q.describe());
            }
        }
    }

    Ok(EquilibriumReport {
        profile: profile.clone(),
        coord: *coord,
        payoffs: pay,
        stationarity_residuals: residuals,
        condition_residuals,
        deviation_margin: margins,
        classification,
        free_directions: free,
        family_constraints,
        accepted,
        members: vec![profile.clone()],
    })
}

/// Outcome of a multi-start solve.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// One report per distinct equilibrium or family, all accepted.
    pub reports: Vec<EquilibriumReport>,
    pub converged_starts: usize,
    /// Starts that hit the iteration cap or converged to a rejected point.
    pub failed_starts: usize,
}

fn canonicalize(
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
    snap_tol: f64,
) -> Result<StrategyProfile> {
    let classical = coord.interference_weight() == 0.0;
    let snap = |t: f64| -> f64 {
        let t = if classical {
            fold_to_half_turn(t)
        } else {
            wrap_tau(t)
        };
        for target in [0.0, PI] {
            if circular_distance(t, target) < snap_tol {
                return target;
            }
        }
        t
    };
    StrategyProfile::new(
        profile
            .angles()
            .iter()
            .map(|&[a, b]| [snap(a), snap(b)])
            .collect(),
    )
}

const DYNAMICS_FLAT_TOL: f64 = 1e-15;
const SNAP_TOL: f64 = 1e-6;

/// Damped sequential best-response dynamics. Flat coordinates stay put.
fn best_response_dynamics(
    spec: &GameSpec,
    coord: &CoordinatorParams,
    start: StrategyProfile,
    cfg: &SolverConfig,
) -> Result<Option<StrategyProfile>> {
    let n = start.n_players();
    let mut current = start;
    for _ in 0..cfg.br_max_iters {
        let mut step: f64 = 0.0;
        // sequential updates: each move raises the mover's payoff, which
        // rules out the two-cycles simultaneous updates fall into
        for k in 0..n {
            for t in 0..2 {
                let (a, b, _) = angle_coefficients(spec, coord, &current, k, t)?;
                // near an edge the amplitude shrinks quadratically, so only
                // rounding-level amplitudes freeze a coordinate here
                if a.hypot(b) <= DYNAMICS_FLAT_TOL {
                    continue;
                }
                let theta = current.angle(k, t);
                let delta = cfg.damping * wrap_pi(b.atan2(a) - theta);
                current = current.with_angle(k, t, theta + delta);
                step = step.max(delta.abs());
            }
        }
        if step < cfg.br_tol {
            return Ok(Some(current));
        }
    }
    Ok(None)
}

fn corner_starts(n: usize) -> Vec<StrategyProfile> {
    let coords = 2 * n;
    (0..(1usize << coords))
        .map(|mask| {
            let flat: Vec<f64> = (0..coords)
                .map(|i| {
                    if (mask >> (coords - 1 - i)) & 1 == 1 {
                        PI
                    } else {
                        0.0
                    }
                })
                .collect();
            StrategyProfile::from_flat(&flat).expect("corner angles are in range")
        })
        .collect()
}

fn max_coordinate_distance(
    a: &StrategyProfile,
    b: &StrategyProfile,
    skip: &[FreeDirection],
) -> f64 {
    let mut d: f64 = 0.0;
    for (k, (pa, pb)) in a.angles().iter().zip(b.angles()).enumerate() {
        for t in 0..2 {
            if skip.contains(&FreeDirection::Angle {
                player: k,
                type_index: t,
            }) {
                continue;
            }
            d = d.max(circular_distance(pa[t], pb[t]));
        }
    }
    d
}

fn find_root(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

/// Multi-start search for equilibria at a fixed coordinator state.
///
/// Candidates are the `4^n` corner profiles plus `cfg.n_starts` seeded random
/// profiles. Converged points that pass verification are merged when they
/// coincide within `dedup_radius`, when they share the same flat directions
/// and agree on every other angle, or when they produce the same joint
/// probabilities (points related by an invariant joint rotation).
pub fn find_equilibria(
    spec: &GameSpec,
    coord: &CoordinatorParams,
    cfg: &SolverConfig,
) -> Result<SolveOutcome> {
    spec.validate().map_err(Error::Invalid)?;
    if spec.n_players() != 2 {
        return Err(Error::Unsupported(
            "equilibrium search is implemented for two players; use verify_equilibrium".into(),
        ));
    }
    let n = spec.n_players();
    let mut starts = corner_starts(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.n_starts {
        let flat: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(0.0..TAU)).collect();
        starts.push(StrategyProfile::from_flat(&flat)?);
    }

    let results: Vec<Result<Option<EquilibriumReport>>> = starts
        .into_par_iter()
        .map(|s| {
            let Some(end) = best_response_dynamics(spec, coord, s, cfg)? else {
                return Ok(None);
            };
            // prefer the edge-snapped point when it still verifies
            let snapped = canonicalize(&end, coord, SNAP_TOL)?;
            let report = verify_equilibrium(spec, coord, &snapped, cfg)?;
            if report.accepted {
                return Ok(Some(report));
            }
            let report = verify_equilibrium(spec, coord, &canonicalize(&end, coord, 0.0)?, cfg)?;
            Ok(report.accepted.then_some(report))
        })
        .collect();

    let mut points = Vec::new();
    let mut failed = 0;
    for r in results {
        match r? {
            Some(rep) => points.push(rep),
            None => failed += 1,
        }
    }
    let converged = points.len();

    let tensors: Vec<JointProbTensor> = points
        .iter()
        .map(|p| joint_for(&p.profile, coord))
        .collect::<Result<_>>()?;
    let flat_set = |r: &EquilibriumReport| -> Vec<FreeDirection> {
        r.free_directions
            .iter()
            .filter(|d| matches!(d, FreeDirection::Angle { .. }))
            .cloned()
            .collect()
    };
    let has_rotation = |r: &EquilibriumReport| {
        r.free_directions
            .iter()
            .any(|d| matches!(d, FreeDirection::JointRotation { .. }))
    };
    let on_curve = |r: &EquilibriumReport| {
        r.free_directions
            .iter()
            .any(|d| matches!(d, FreeDirection::Tangent { .. }))
    };
    let mut parent: Vec<usize> = (0..points.len()).collect();
    for i in 0..points.len() {
        for j in 0..i {
            let (a, b) = (&points[i], &points[j]);
            let flats = flat_set(a);
            let same_kind = flats == flat_set(b);
            let same = if !same_kind {
                false
            } else if max_coordinate_distance(&a.profile, &b.profile, &flats) <= cfg.dedup_radius {
                true
            } else if has_rotation(a) && has_rotation(b) {
                tensors[i].max_abs_diff(&tensors[j]) <= 1e-8
            } else if on_curve(a) && on_curve(b) {
                a.payoffs
                    .total
                    .iter()
                    .zip(&b.payoffs.total)
                    .all(|(x, y)| (x - y).abs() <= 1e-8)
            } else {
                false
            };
            if same {
                let (ri, rj) = (find_root(&mut parent, i), find_root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..points.len() {
        let r = find_root(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let known_family = if spec.is_extended_bos() {
        quantum_family_constraints(coord).ok()
    } else {
        None
    };
    let reports = groups
        .into_iter()
        .map(|(root, members)| {
            // represent a group by a member on the tabulated quantum family
            // when there is one, so its relations show up in the report
            let on_family = known_family.as_ref().and_then(|q| {
                members.iter().copied().find(|&m| {
                    q.residuals(&points[m].profile)
                        .iter()
                        .all(|r| r.abs() <= 1e-6)
                })
            });
            let lead = on_family.unwrap_or(root);
            let mut rep = points[lead].clone();
            rep.members = std::iter::once(lead)
                .chain(members.iter().copied().filter(|&m| m != lead))
                .map(|m| points[m].profile.clone())
                .collect();
            if rep.members.len() > 1 && rep.classification != Classification::Family {
                let distinct = rep
                    .members
                    .iter()
                    .any(|m| max_coordinate_distance(m, &rep.profile, &[]) > cfg.dedup_radius);
                if distinct {
                    rep.classification = Classification::Family;
                }
            }
            rep
        })
        .collect();
    Ok(SolveOutcome {
        reports,
        converged_starts: converged,
        failed_starts: failed,
    })
}

/// One of the eight classical equilibrium families of the extended Battle of
/// Sexes: three fixed angles and one arbitrary angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalFamily {
    /// 1-based label.
    pub index: usize,
    /// `(α⁰, α¹, β⁰, β¹)`; `None` marks the arbitrary angle.
    pub fixed: [Option<f64>; 4],
}

const ANGLE_NAMES: [&str; 4] = ["α⁰", "α¹", "β⁰", "β¹"];

impl ClassicalFamily {
    /// Index (into `α⁰, α¹, β⁰, β¹`) of the arbitrary angle.
    pub fn free_index(&self) -> usize {
        self.fixed
            .iter()
            .position(Option::is_none)
            .expect("one free angle")
    }

    /// Member with the arbitrary angle set to `t`.
    pub fn member(&self, t: f64) -> StrategyProfile {
        let v: Vec<f64> = self.fixed.iter().map(|f| f.unwrap_or(t)).collect();
        StrategyProfile::wrapped(vec![[v[0], v[1]], [v[2], v[3]]]).expect("finite angles")
    }

    /// True when the profile's fixed angles match within `tol`.
    pub fn contains(&self, profile: &StrategyProfile, tol: f64) -> bool {
        if profile.n_players() != 2 {
            return false;
        }
        let flat = profile.to_flat();
        self.fixed
            .iter()
            .zip(&flat)
            .all(|(f, &x)| f.is_none_or(|v| circular_distance(x, v) <= tol))
    }
}

impl fmt::Display for ClassicalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .fixed
            .iter()
            .zip(ANGLE_NAMES)
            .map(|(v, name)| match v {
                Some(x) if *x == 0.0 => format!("{name}=0"),
                Some(_) => format!("{name}=π"),
                None => format!("{name} arbitrary"),
            })
            .collect();
        write!(f, "classical family {}: {}", self.index, parts.join(", "))
    }
}

/// The eight families of classical Bayesian Nash equilibria of the extended
/// Battle of Sexes, all with zero payoffs.
pub fn enumerate_classical_families(spec: &GameSpec) -> Result<Vec<ClassicalFamily>> {
    if !spec.is_extended_bos() {
        return Err(Error::Unsupported(format!(
            "classical families are tabulated for extended-bos only, not {}",
            spec.name
        )));
    }
    let z = Some(0.0);
    let p = Some(PI);
    let table = [
        [z, z, None, p],
        [p, p, None, z],
        [z, p, z, None],
        [p, z, p, None],
        [None, p, z, z],
        [None, z, p, p],
        [z, None, z, p],
        [p, None, p, z],
    ];
    Ok(table
        .into_iter()
        .enumerate()
        .map(|(i, fixed)| ClassicalFamily {
            index: i + 1,
            fixed,
        })
        .collect())
}

/// A linear relation `angle[lhs] − angle[rhs] ≡ offset (mod 2π)` on
/// `(α⁰, α¹, β⁰, β¹)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleRelation {
    pub lhs: usize,
    pub rhs: usize,
    pub offset: f64,
}

/// The continuous equilibrium set of the extended Battle of Sexes at
/// `cos φ sin γ = 1`: three relations on four angles, one free direction
/// (a common rotation of all angles).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumFamily {
    pub relations: [AngleRelation; 3],
}

impl QuantumFamily {
    pub fn constraint_count(&self) -> usize {
        self.relations.len()
    }

    pub fn free_directions(&self) -> usize {
        4 - self.relations.len()
    }

    /// Signed residual of each relation, reduced into `(−π, π]`.
    pub fn residuals(&self, profile: &StrategyProfile) -> [f64; 3] {
        let v = profile.to_flat();
        self.relations
            .map(|r| wrap_pi(v[r.lhs] - v[r.rhs] - r.offset))
    }

    /// Family member with `α⁰ = alpha0`, all angles wrapped onto the circle.
    pub fn member(&self, alpha0: f64) -> StrategyProfile {
        let b0 = alpha0 + FRAC_PI_4;
        let b1 = alpha0 + 3.0 * FRAC_PI_4;
        let a1 = b0 + 5.0 * FRAC_PI_4;
        StrategyProfile::wrapped(vec![[alpha0, a1], [b0, b1]]).expect("finite angles")
    }

    pub fn describe(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|r| {
                let k = (r.offset / FRAC_PI_4).round();
                let offset = if k == 1.0 {
                    "π/4".to_string()
                } else {
                    format!("{k}π/4")
                };
                format!("{} − {} = {offset}", ANGLE_NAMES[r.lhs], ANGLE_NAMES[r.rhs])
            })
            .collect()
    }
}

/// Relations `β⁰ − α⁰ = π/4`, `β¹ − α⁰ = 3π/4`, `α¹ − β⁰ = 5π/4`. Only
/// defined at maximal interference, `cos φ sin γ = 1`.
pub fn quantum_family_constraints(coord: &CoordinatorParams) -> Result<QuantumFamily> {
    if (coord.interference_weight() - 1.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "quantum family is tabulated for cos φ sin γ = 1, got {}",
            coord.interference_weight()
        )));
    }
    Ok(QuantumFamily {
        relations: [
            AngleRelation {
                lhs: 2,
                rhs: 0,
                offset: FRAC_PI_4,
            },
            AngleRelation {
                lhs: 3,
                rhs: 0,
                offset: 3.0 * FRAC_PI_4,
            },
            AngleRelation {
                lhs: 1,
                rhs: 2,
                offset: 5.0 * FRAC_PI_4,
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builtin_extended_bos;

    #[test]
    fn family_count_and_labels() {
        let fams = enumerate_classical_families(&builtin_extended_bos()).unwrap();
        assert_eq!(fams.len(), 8);
        assert_eq!(fams[0].free_index(), 2);
        assert_eq!(fams[7].free_index(), 1);
        assert_eq!(
            fams[2].to_string(),
            "classical family 3: α⁰=0, α¹=π, β⁰=0, β¹ arbitrary"
        );
    }

    #[test]
    fn families_need_extended_bos() {
        assert!(enumerate_classical_families(&crate::game::builtin_three_player()).is_err());
    }

    #[test]
    fn quantum_constraints_precondition() {
        assert!(quantum_family_constraints(&CoordinatorParams::classical()).is_err());
        let q = quantum_family_constraints(&CoordinatorParams::maximal()).unwrap();
        assert_eq!(q.constraint_count(), 3);
        assert_eq!(q.free_directions(), 1);
    }

    #[test]
    fn corners() {
        let c = corner_starts(2);
        assert_eq!(c.len(), 16);
        assert_eq!(c[15].to_flat(), vec![PI; 4]);
    }
}
