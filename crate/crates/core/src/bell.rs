//! Cereceda inequalities, their CHSH quartets, and numerical probes of the
//! quantum ceiling.
//!
//! The 64 two-party variants are the orbit of the base inequality
//! `P^{[00]}_{00} − P^{[10]}_{00} − P^{[01]}_{00} − P^{[11]}_{11} ≤ 0` under
//! relabeling of each player's types and of the outcomes of every
//! (player, type) measurement. Each variant carries a CHSH sign pattern
//! (the coefficient of `E^{[ab]} = Σ (−1)^{A+B} P^{[ab]}_{AB}` in it, up to a
//! factor ¼). Eight variants share each of the eight patterns; they come in
//! outcome-flip pairs whose marginal terms cancel, and two pairs with
//! positive sectors related by the joint type flip form a quartet. The four
//! left-hand sides of a quartet add up to `S − 2`, where `S` is the CHSH
//! combination with that sign pattern.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{profile_bit, CoordinatorParams, StrategyProfile};
use crate::payoff::{SelectionTerm, SignedSelection};
use crate::probability::{joint_for, JointProbTensor};
use crate::search::{coordinate_ascent, AscentOptions, Domain};

/// Largest quantum value of any Cereceda left-hand side, `(√2 − 1)/2`.
pub const CIRELSON_CERECEDA: f64 = (SQRT_2 - 1.0) / 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CerecedaVariant {
    pub selection: SignedSelection,
    /// Quartet this variant belongs to; `None` for the N ≥ 3 forms.
    pub quartet_id: Option<usize>,
    /// Coefficient sign of `E^{[ab]}` per sector (N = 2 only).
    pub chsh_signs: Option<[i8; 4]>,
}

impl CerecedaVariant {
    pub fn positive_term(&self) -> SelectionTerm {
        *self
            .selection
            .terms
            .iter()
            .find(|t| t.positive)
            .expect("variants have one positive term")
    }

    pub fn negative_terms(&self) -> Vec<SelectionTerm> {
        self.selection
            .terms
            .iter()
            .filter(|t| !t.positive)
            .copied()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quartet {
    pub id: usize,
    pub chsh_signs: [i8; 4],
    /// Indices into [`enumerate_variants`]`(2)`.
    pub members: [usize; 4],
}

pub fn cereceda_lhs(probs: &JointProbTensor, variant: &CerecedaVariant) -> Result<f64> {
    variant.selection.eval(probs)
}

/// Relabeling applied to a two-party term: type flips per player, then
/// outcome flips per (player, relabeled type), then an optional player swap.
fn relabel(
    term: SelectionTerm,
    type_flip: [usize; 2],
    outcome_flip: [[usize; 2]; 2],
    swap: bool,
) -> SelectionTerm {
    let a = profile_bit(term.sector, 2, 0) ^ type_flip[0];
    let b = profile_bit(term.sector, 2, 1) ^ type_flip[1];
    let big_a = profile_bit(term.moves, 2, 0) ^ outcome_flip[0][a];
    let big_b = profile_bit(term.moves, 2, 1) ^ outcome_flip[1][b];
    let (a, b, big_a, big_b) = if swap {
        (b, a, big_b, big_a)
    } else {
        (a, b, big_a, big_b)
    };
    SelectionTerm {
        positive: term.positive,
        sector: 2 * a + b,
        moves: 2 * big_a + big_b,
    }
}

fn chsh_signs_of(sel: &SignedSelection) -> [i8; 4] {
    let mut signs = [0i8; 4];
    for t in &sel.terms {
        let parity = if (profile_bit(t.moves, 2, 0) + profile_bit(t.moves, 2, 1)).is_multiple_of(2)
        {
            1
        } else {
            -1
        };
        signs[t.sector] += if t.positive { parity } else { -parity };
    }
    signs
}

fn two_party_variants() -> (Vec<CerecedaVariant>, Vec<Quartet>) {
    let bases = [
        SignedSelection::cereceda_base(2, false),
        SignedSelection::cereceda_base(2, true),
    ];
    let mut seen: HashMap<Vec<SelectionTerm>, usize> = HashMap::new();
    let mut selections: Vec<SignedSelection> = Vec::new();
    for base in &bases {
        for swap in [false, true] {
            for tf in 0..4usize {
                for of in 0..16usize {
                    let type_flip = [tf >> 1, tf & 1];
                    let outcome_flip = [[(of >> 3) & 1, (of >> 2) & 1], [(of >> 1) & 1, of & 1]];
                    let mut terms: Vec<SelectionTerm> = base
                        .terms
                        .iter()
                        .map(|&t| relabel(t, type_flip, outcome_flip, swap))
                        .collect();
                    // keep the positive term first, negatives in canonical order
                    terms.sort_by_key(|t| (!t.positive, t.sector, t.moves));
                    if !seen.contains_key(&terms) {
                        seen.insert(terms.clone(), selections.len());
                        selections.push(SignedSelection {
                            n_players: 2,
                            terms,
                        });
                    }
                }
            }
        }
    }

    // quartet key: sign pattern plus whether the positive sector is 00/11 or 01/10
    type Key = ([i8; 4], bool);
    let mut quartet_of: HashMap<Key, usize> = HashMap::new();
    let mut quartets: Vec<(Key, Vec<usize>)> = Vec::new();
    let mut variants = Vec::with_capacity(selections.len());
    for (idx, sel) in selections.into_iter().enumerate() {
        let signs = chsh_signs_of(&sel);
        let pos = sel
            .terms
            .iter()
            .find(|t| t.positive)
            .map(|t| t.sector)
            .unwrap_or(0);
        let key = (signs, pos == 0 || pos == 3);
        let qid = *quartet_of.entry(key).or_insert_with(|| {
            quartets.push((key, Vec::new()));
            quartets.len() - 1
        });
        quartets[qid].1.push(idx);
        variants.push(CerecedaVariant {
            selection: sel,
            quartet_id: Some(qid),
            chsh_signs: Some(signs),
        });
    }
    let quartets = quartets
        .into_iter()
        .enumerate()
        .map(|(id, ((signs, _), members))| Quartet {
            id,
            chsh_signs: signs,
            members: members.try_into().expect("quartets have four members"),
        })
        .collect();
    (variants, quartets)
}

/// All Cereceda variants for `n_players`. For two players this is the full
/// orbit of 64 (variant 0 is the base inequality); for more players only the
/// base form and its outcome mirror are produced.
pub fn enumerate_variants(n_players: usize) -> Vec<CerecedaVariant> {
    if n_players == 2 {
        return two_party_variants().0;
    }
    [false, true]
        .into_iter()
        .map(|mirror| CerecedaVariant {
            selection: SignedSelection::cereceda_base(n_players, mirror),
            quartet_id: None,
            chsh_signs: None,
        })
        .collect()
}

/// The 16 two-party quartets.
pub fn quartets() -> Vec<Quartet> {
    two_party_variants().1
}

/// Correlator `E^{[ab]} = Σ_{AB} (−1)^{A+B} P^{[ab]}_{AB}`.
pub fn correlator(probs: &JointProbTensor, sector: usize) -> f64 {
    probs
        .sector(sector)
        .iter()
        .enumerate()
        .map(|(m, p)| if (m.count_ones() % 2) == 0 { *p } else { -*p })
        .sum()
}

fn chsh_with_signs(probs: &JointProbTensor, signs: &[i8; 4]) -> f64 {
    (0..4)
        .map(|s| f64::from(signs[s]) * correlator(probs, s))
        .sum()
}

/// CHSH combination `S = Σ_{ab} sign_{ab} E^{[ab]}` for the quartet's sign pattern.
pub fn chsh_value(probs: &JointProbTensor, quartet_id: usize) -> Result<f64> {
    if probs.n_players() != 2 {
        return Err(Error::ShapeMismatch("CHSH needs a 2-player tensor".into()));
    }
    let q = quartets();
    let quartet = q
        .get(quartet_id)
        .ok_or_else(|| Error::Unsupported(format!("unknown quartet {quartet_id}")))?;
    Ok(chsh_with_signs(probs, &quartet.chsh_signs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellReport {
    /// Left-hand side of every variant, in [`enumerate_variants`] order.
    pub lhs: Vec<f64>,
    pub max_lhs: f64,
    /// Variants whose left-hand side exceeds the classical bound 0.
    pub classical_bound_violations: Vec<usize>,
    /// `(√2 − 1)/2 − max_lhs`.
    pub cirelson_margin: f64,
    /// One CHSH value per quartet.
    pub chsh_values: Vec<f64>,
}

/// Left-hand sides at or below this count as satisfying the classical bound.
pub const CLASSICAL_TOL: f64 = 1e-12;

pub fn bell_report(probs: &JointProbTensor) -> Result<BellReport> {
    if probs.n_players() != 2 {
        return Err(Error::ShapeMismatch(
            "Bell report needs a 2-player tensor".into(),
        ));
    }
    let (variants, quartets) = two_party_variants();
    let lhs = variants
        .iter()
        .map(|v| cereceda_lhs(probs, v))
        .collect::<Result<Vec<_>>>()?;
    let max_lhs = lhs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let classical_bound_violations = lhs
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > CLASSICAL_TOL)
        .map(|(i, _)| i)
        .collect();
    let chsh_values = quartets
        .iter()
        .map(|q| chsh_with_signs(probs, &q.chsh_signs))
        .collect();
    Ok(BellReport {
        lhs,
        max_lhs,
        classical_bound_violations,
        cirelson_margin: CIRELSON_CERECEDA - max_lhs,
        chsh_values,
    })
}

/// N-party Cereceda left-hand side (base form, or its outcome mirror).
pub fn nparty_cereceda_lhs(probs: &JointProbTensor, n: usize, mirror: bool) -> Result<f64> {
    if probs.n_players() != n {
        return Err(Error::ShapeMismatch(format!(
            "tensor has {} players, expected {n}",
            probs.n_players()
        )));
    }
    SignedSelection::cereceda_base(n, mirror).eval(probs)
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub starts: usize,
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
    /// Pin γ instead of optimizing it.
    pub gamma: Option<f64>,
    /// Pin φ instead of optimizing it.
    pub phi: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 100,
            tol: 1e-10,
            max_sweeps: 400,
            seed: 0x0C1E_5E0A,
            gamma: None,
            phi: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ViolationSearch {
    pub best: f64,
    pub profile: StrategyProfile,
    pub coord: CoordinatorParams,
}

/// Multi-start coordinate ascent of the base N-party Cereceda left-hand side
/// over all strategy angles and the coordinator parameters.
pub fn max_violation_search(n: usize, cfg: &SearchConfig) -> Result<ViolationSearch> {
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!(
            "violation search for {n} players"
        )));
    }
    let n_angles = 2 * n;
    let mut domains = vec![Domain::Circle; n_angles];
    domains.push(match cfg.gamma {
        Some(g) => Domain::Interval(g, g),
        None => Domain::Interval(0.0, PI),
    });
    domains.push(match cfg.phi {
        Some(p) => Domain::Interval(p, p),
        None => Domain::Interval(0.0, PI),
    });
    let selection = SignedSelection::cereceda_base(n, false);
    let objective = |x: &[f64]| -> f64 {
        let profile = match StrategyProfile::from_flat(&x[..n_angles]) {
            Ok(p) => p,
            Err(_) => return f64::NEG_INFINITY,
        };
        let coord = match CoordinatorParams::new(
            x[n_angles].clamp(0.0, PI),
            x[n_angles + 1].clamp(0.0, PI),
        ) {
            Ok(c) => c,
            Err(_) => return f64::NEG_INFINITY,
        };
        joint_for(&profile, &coord)
            .and_then(|t| selection.eval(&t))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let opts = AscentOptions {
        tol: cfg.tol,
        max_sweeps: cfg.max_sweeps,
        ..AscentOptions::default()
    };
    let results: Vec<(Vec<f64>, f64)> = (0..cfg.starts)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(start as u64));
            let mut x0: Vec<f64> = (0..n_angles).map(|_| rng.gen_range(0.0..TAU)).collect();
            x0.push(cfg.gamma.unwrap_or_else(|| rng.gen_range(0.0..=PI)));
            x0.push(cfg.phi.unwrap_or_else(|| rng.gen_range(0.0..=PI)));
            coordinate_ascent(objective, &x0, &domains, &opts)
        })
        .collect();
    let (x, best) = results
        .into_iter()
        .fold((Vec::new(), f64::NEG_INFINITY), |acc, r| {
            if r.1 > acc.1 {
                r
            } else {
                acc
            }
        });
    if x.is_empty() {
        return Err(Error::Internal(
            "violation search produced no candidate".into(),
        ));
    }
    Ok(ViolationSearch {
        best,
        profile: StrategyProfile::from_flat(&x[..n_angles])?,
        coord: CoordinatorParams::new(x[n_angles].clamp(0.0, PI), x[n_angles + 1].clamp(0.0, PI))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::classical_joint;

    #[test]
    fn orbit_counts() {
        let v = enumerate_variants(2);
        assert_eq!(v.len(), 64);
        let q = quartets();
        assert_eq!(q.len(), 16);
        let mut all: Vec<usize> = q.iter().flat_map(|q| q.members).collect();
        all.sort_unstable();
        assert_eq!(all, (0..64).collect::<Vec<_>>());
    }

    #[test]
    fn base_variant_first() {
        let v = enumerate_variants(2);
        let mut base = SignedSelection::cereceda_base(2, false).terms;
        base.sort_by_key(|t| (!t.positive, t.sector, t.moves));
        assert_eq!(v[0].selection.terms, base);
        assert_eq!(v[0].chsh_signs, Some([1, -1, -1, -1]));
    }

    #[test]
    fn every_variant_touches_all_sectors() {
        for v in enumerate_variants(2) {
            let mut sectors: Vec<usize> = v.selection.terms.iter().map(|t| t.sector).collect();
            sectors.sort_unstable();
            assert_eq!(sectors, vec![0, 1, 2, 3]);
            assert_eq!(v.negative_terms().len(), 3);
        }
    }

    #[test]
    fn base_on_identity_tensor() {
        let t = classical_joint(&StrategyProfile::uniform(2, 0.0).unwrap());
        let v = enumerate_variants(2);
        assert_eq!(cereceda_lhs(&t, &v[0]).unwrap(), -1.0);
        let base_quartet = v[0].quartet_id.unwrap();
        // all correlators are 1, pattern (+,-,-,-) gives -2
        assert_eq!(chsh_value(&t, base_quartet).unwrap(), -2.0);
    }

    #[test]
    fn nparty_identity_tensor() {
        let t = classical_joint(&StrategyProfile::uniform(3, 0.0).unwrap());
        assert_eq!(nparty_cereceda_lhs(&t, 3, false).unwrap(), -2.0);
        assert!(nparty_cereceda_lhs(&t, 2, false).is_err());
    }

    #[test]
    fn unknown_quartet() {
        let t = classical_joint(&StrategyProfile::uniform(2, 0.0).unwrap());
        assert!(chsh_value(&t, 16).is_err());
    }
}
