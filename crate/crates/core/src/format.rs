//! JSON file formats: game definitions, strategy files, raw probability
//! tensors and machine-readable reports.
//!
//! Game file:
//!
//! ```json
//! {
//!   "name": "extended-bos",
//!   "players": [{"name": "Alice", "type_dist": [0.5, 0.5]}, ...],
//!   "payoffs": {"Alice": {"00": [3, 0, 0, 1], "01": [...], ...}, ...}
//! }
//! ```
//!
//! Type-profile keys and move-profile positions are binary strings with
//! player 0 first. Strategy file: `{"angles": {"Alice": [θ0, θ1], ...},
//! "gamma": g, "phi": p}` in radians. Raw tensor file:
//! `{"n_players": 2, "sectors": {"00": [p00, p01, p10, p11], ...}}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bell::BellReport;
use crate::equilibrium::{EquilibriumReport, SolveOutcome};
use crate::error::{Error, Result};
use crate::game::{
    parse_profile_label, profile_label, CoordinatorParams, GameSpec, PlayerSpec, StrategyProfile,
    Violation,
};
use crate::probability::JointProbTensor;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    name: String,
    players: Vec<PlayerSpec>,
    payoffs: Map<String, Value>,
}

fn sector_map(value: &Value, n: usize, what: &str) -> Result<Vec<Option<Vec<f64>>>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{what} must be an object keyed by type profile")))?;
    let mut out = vec![None; 1 << n];
    for (label, entries) in obj {
        let s = parse_profile_label(label, n).ok_or_else(|| {
            Error::Parse(format!(
                "{what}: \"{label}\" is not a {n}-digit binary type profile"
            ))
        })?;
        let row: Vec<f64> = serde_json::from_value(entries.clone())
            .map_err(|e| Error::Parse(format!("{what}[\"{label}\"]: {e}")))?;
        out[s] = Some(row);
    }
    Ok(out)
}

/// Parses and validates a game definition.
pub fn parse_game(text: &str) -> Result<GameSpec> {
    let file: GameFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("game file: {e}")))?;
    let n = file.players.len();
    let mut payoffs = Vec::with_capacity(n);
    let mut violations = Vec::new();
    for (k, player) in file.players.iter().enumerate() {
        let value = file.payoffs.get(&player.name).ok_or_else(|| {
            Error::Parse(format!(
                "payoffs has no entry for player \"{}\"",
                player.name
            ))
        })?;
        let sectors = sector_map(value, n, &format!("payoffs[\"{}\"]", player.name))?;
        let found = sectors.iter().filter(|s| s.is_some()).count();
        if found != sectors.len() {
            violations.push(Violation::SectorCount {
                player: k,
                expected: sectors.len(),
                found,
            });
        }
        payoffs.push(sectors.into_iter().map(Option::unwrap_or_default).collect());
    }
    for name in file.payoffs.keys() {
        if !file.players.iter().any(|p| &p.name == name) {
            return Err(Error::Parse(format!(
                "payoffs given for unknown player \"{name}\""
            )));
        }
    }
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    GameSpec::new(file.name, file.players, payoffs)
}

/// Serializes a game in the file format. Numbers use the shortest
/// representation that reads back to the same `f64`.
pub fn game_to_json(spec: &GameSpec) -> String {
    let n = spec.n_players();
    let mut payoffs = Map::new();
    for (k, player) in spec.players.iter().enumerate() {
        let mut sectors = Map::new();
        for (s, row) in spec.payoffs[k].iter().enumerate() {
            sectors.insert(profile_label(s, n), json!(row));
        }
        payoffs.insert(player.name.clone(), Value::Object(sectors));
    }
    let file = GameFile {
        name: spec.name.clone(),
        players: spec.players.clone(),
        payoffs,
    };
    serde_json::to_string_pretty(&file).expect("game serializes")
}

/// Failure while loading an input file: either the file could not be read
/// or its content is malformed.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Content(#[from] Error),
}

pub fn read_file(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a game from `path`, or a built-in when `source` is `builtin:<name>`.
pub fn load_game(source: &str) -> Result<GameSpec, FileError> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return crate::game::builtin(name).ok_or_else(|| {
            Error::Parse(format!(
                "unknown built-in game \"{name}\"; available: {}",
                crate::game::BUILTIN_NAMES.join(", ")
            ))
            .into()
        });
    }
    Ok(parse_game(&read_file(Path::new(source))?)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    angles: Map<String, Value>,
    gamma: f64,
    phi: f64,
}

/// Parses a strategy file. Players are ordered as in `players` when given,
/// otherwise as they appear in the file.
pub fn parse_strategy(
    text: &str,
    players: Option<&[PlayerSpec]>,
) -> Result<(StrategyProfile, CoordinatorParams)> {
    let file: StrategyFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("strategy file: {e}")))?;
    let names: Vec<String> = match players {
        Some(p) => p.iter().map(|p| p.name.clone()).collect(),
        None => file.angles.keys().cloned().collect(),
    };
    if names.len() != file.angles.len() {
        return Err(Error::Parse(format!(
            "strategy file lists {} players, expected {}",
            file.angles.len(),
            names.len()
        )));
    }
    let mut angles = Vec::with_capacity(names.len());
    for name in &names {
        let v = file
            .angles
            .get(name)
            .ok_or_else(|| Error::Parse(format!("strategy file has no angles for \"{name}\"")))?;
        let pair: [f64; 2] = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("angles[\"{name}\"] must be two numbers: {e}")))?;
        angles.push(pair);
    }
    Ok((
        StrategyProfile::new(angles)?,
        CoordinatorParams::new(file.gamma, file.phi)?,
    ))
}

/// Serializes a strategy file for the given player names.
pub fn strategy_to_json(
    names: &[String],
    profile: &StrategyProfile,
    coord: &CoordinatorParams,
) -> String {
    let mut angles = Map::new();
    for (name, pair) in names.iter().zip(profile.angles()) {
        angles.insert(name.clone(), json!(pair));
    }
    serde_json::to_string_pretty(&json!({
        "angles": angles,
        "gamma": coord.gamma(),
        "phi": coord.phi(),
    }))
    .expect("strategy serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    n_players: usize,
    sectors: Value,
}

/// Tolerance on sector sums and entry ranges for tensors read from files.
pub const TENSOR_FILE_TOL: f64 = 1e-9;

pub fn parse_tensor(text: &str) -> Result<JointProbTensor> {
    let file: TensorFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("tensor file: {e}")))?;
    let n = file.n_players;
    if !(1..=16).contains(&n) {
        return Err(Error::Parse(format!("n_players = {n} is out of range")));
    }
    let sectors = sector_map(&file.sectors, n, "sectors")?;
    let mut values = Vec::with_capacity(1 << (2 * n));
    for (s, row) in sectors.into_iter().enumerate() {
        let row = row.ok_or_else(|| {
            Error::ShapeMismatch(format!("sector \"{}\" is missing", profile_label(s, n)))
        })?;
        if row.len() != 1 << n {
            return Err(Error::ShapeMismatch(format!(
                "sector \"{}\" has {} entries, expected {}",
                profile_label(s, n),
                row.len(),
                1 << n
            )));
        }
        values.extend(row);
    }
    JointProbTensor::from_values(n, values, TENSOR_FILE_TOL)
}

pub fn tensor_to_json(probs: &JointProbTensor) -> String {
    let n = probs.n_players();
    let mut sectors = Map::new();
    for s in 0..(1 << n) {
        sectors.insert(profile_label(s, n), json!(probs.sector(s)));
    }
    serde_json::to_string_pretty(&json!({ "n_players": n, "sectors": sectors }))
        .expect("tensor serializes")
}

fn profile_json(profile: &StrategyProfile) -> Value {
    json!(profile.angles())
}

pub fn report_to_json(report: &EquilibriumReport) -> Value {
    json!({
        "angles": profile_json(&report.profile),
        "gamma": report.coord.gamma(),
        "phi": report.coord.phi(),
        "payoffs": report.payoffs.total,
        "sector_payoffs": report.payoffs.sector,
        "stationarity_residuals": report.stationarity_residuals,
        "condition_residuals": report.condition_residuals,
        "deviation_margin": report.deviation_margin,
        "classification": report.classification.to_string(),
        "free_directions": report.free_directions.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "family_constraints": report.family_constraints,
        "accepted": report.accepted,
        "members": report.members.iter().map(profile_json).collect::<Vec<_>>(),
    })
}

pub fn outcome_to_json(
    game: &GameSpec,
    coord: &CoordinatorParams,
    outcome: &SolveOutcome,
) -> Value {
    json!({
        "game": game.name,
        "players": game.players.iter().map(|p| p.name.clone()).collect::<Vec<_>>(),
        "gamma": coord.gamma(),
        "phi": coord.phi(),
        "converged_starts": outcome.converged_starts,
        "failed_starts": outcome.failed_starts,
        "equilibria": outcome.reports.iter().map(report_to_json).collect::<Vec<_>>(),
    })
}

pub fn bell_report_to_json(report: &BellReport) -> Value {
    json!({
        "lhs": report.lhs,
        "max_lhs": report.max_lhs,
        "classical_bound_violations": report.classical_bound_violations,
        "cirelson_margin": report.cirelson_margin,
        "chsh_values": report.chsh_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{builtin_extended_bos, builtin_three_player};

    #[test]
    fn builtin_games_round_trip() {
        for spec in [builtin_extended_bos(), builtin_three_player()] {
            assert_eq!(parse_game(&game_to_json(&spec)).unwrap(), spec);
        }
    }

    #[test]
    fn missing_payoffs_key_is_a_parse_error() {
        let err = parse_game(r#"{"name": "x", "players": []}"#).unwrap_err();
        assert!(
            matches!(&err, Error::Parse(m) if m.contains("payoffs")),
            "{err}"
        );
    }

    #[test]
    fn missing_sector_is_a_validation_error() {
        let mut v: Value = serde_json::from_str(&game_to_json(&builtin_extended_bos())).unwrap();
        v["payoffs"]["Bob"].as_object_mut().unwrap().remove("11");
        let err = parse_game(&v.to_string()).unwrap_err();
        assert_eq!(
            err.to_string(),
            "game failed validation: expected 4 type sectors for player 1, found 3"
        );
    }

    #[test]
    fn strategy_round_trip_and_errors() {
        let names = vec!["Alice".to_string(), "Bob".to_string()];
        let p = StrategyProfile::two_player([0.0, 4.5], [0.75, 2.5]).unwrap();
        let c = CoordinatorParams::new(1.2, 0.4).unwrap();
        let (p2, c2) = parse_strategy(&strategy_to_json(&names, &p, &c), None).unwrap();
        assert_eq!((p2, c2), (p, c));
        assert!(parse_strategy(r#"{"angles": {"A": [0]}, "gamma": 0, "phi": 0}"#, None).is_err());
        assert!(parse_strategy("not json", None).is_err());
    }

    #[test]
    fn tensor_round_trip() {
        let t = crate::probability::classical_joint(
            &StrategyProfile::two_player([0.3, 1.0], [2.0, 0.1]).unwrap(),
        );
        assert_eq!(parse_tensor(&tensor_to_json(&t)).unwrap(), t);
    }
}
