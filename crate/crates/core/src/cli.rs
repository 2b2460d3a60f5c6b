//! The `qbayes` command line.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bell::{
    bell_report, enumerate_variants, max_violation_search, nparty_cereceda_lhs, quartets,
    SearchConfig, CIRELSON_CERECEDA, CLASSICAL_TOL,
};
use crate::equilibrium::{
    find_equilibria, quantum_family_constraints, EquilibriumReport, SolveOutcome, SolverConfig,
    DEFAULT_SEED,
};
use crate::error::Error;
use crate::format::{self, FileError};
use crate::game::{profile_label, CoordinatorParams, GameSpec, StrategyProfile, BUILTIN_NAMES};
use crate::payoff::{payoff_decomposition, payoffs};
use crate::probability::{classical_joint, joint_for, JointProbTensor};
use crate::sweep::{sweep, write_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_RESULT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qbayes",
    version,
    about = "Bayesian Nash equilibria with classical and entangled strategies",
    after_help = "Exit codes: 0 ok, 1 internal error, 2 invalid input, 3 no result.\n\
                  Games are JSON files or built-ins named builtin:extended-bos, builtin:three-player.\n\
                  Angles accept plain numbers or multiples of pi such as pi/2 or 3pi/4."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find equilibria at one coordinator setting.
    Solve(SolveArgs),
    /// Solve over a grid of coordinator settings and write CSV.
    Sweep(SweepArgs),
    /// Cereceda and CHSH analysis of a strategy or a raw probability tensor.
    Bell(BellArgs),
    /// Run the full pipeline for a built-in game (extended-bos or three-player).
    Demo(DemoArgs),
    /// Check a game definition.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Seed for the random starts.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random starts in addition to the corner profiles.
    #[arg(long, default_value_t = 200)]
    starts: usize,
    /// Deviation tolerance for accepting an equilibrium.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            n_starts: self.starts,
            tol_dev: self.tol,
            seed: self.seed,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Game file or builtin:<name>.
    #[arg(long)]
    game: String,
    /// Entanglement angle in [0, π].
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    gamma: String,
    /// Relative phase in [0, 2π].
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    phi: String,
    /// Read and print angles in degrees.
    #[arg(long)]
    degrees: bool,
    /// Write the full-precision JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Game file or builtin:<name>.
    #[arg(long)]
    game: String,
    /// Comma-separated values or start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    /// Comma-separated values or start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    phi: String,
    /// Read grid values in degrees.
    #[arg(long)]
    degrees: bool,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct BellArgs {
    /// Game whose player names order the strategy file.
    #[arg(long)]
    game: Option<String>,
    /// Strategy file with angles, gamma and phi.
    #[arg(long, conflicts_with = "tensor", required_unless_present = "tensor")]
    strategy: Option<PathBuf>,
    /// Raw joint probability tensor file.
    #[arg(long)]
    tensor: Option<PathBuf>,
    /// Write the full-precision JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DemoArgs {
    /// extended-bos or three-player.
    name: String,
    /// Seed for the solver and the sampling.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Game file or builtin:<name>.
    #[arg(long)]
    game: String,
}

/// A failed command: message for stderr plus exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Read { .. } => Failure {
                code: EXIT_INVALID,
                message: e.to_string(),
            },
            FileError::Content(c) => c.into(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

/// Parses a number or a multiple of π (`pi`, `-pi/4`, `3pi/2`, `0.5pi`).
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (
            n.trim(),
            d.trim().parse::<f64>().ok().filter(|d| *d != 0.0)?,
        ),
        None => (t.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim().trim_end_matches('*');
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    Some(c * PI / den)
}

/// Parses `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(text: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let (a, b) = (parse_angle(parts[0])?, parse_angle(parts[1])?);
        let n: usize = parts[2].trim().parse().ok().filter(|&n| n > 0)?;
        if n == 1 {
            return Some(vec![a]);
        }
        return Some(
            (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect(),
        );
    }
    if parts.len() != 1 {
        return None;
    }
    let v: Option<Vec<f64>> = text.split(',').map(parse_angle).collect();
    v.filter(|v| !v.is_empty())
}

fn angle_arg(text: &str, name: &str, degrees: bool) -> Result<f64, Failure> {
    let v =
        parse_angle(text).ok_or_else(|| invalid(format!("--{name}: cannot parse \"{text}\"")))?;
    Ok(if degrees { v.to_radians() } else { v })
}

/// Seven significant digits; magnitudes below 1e-15 print as 0.
pub fn sig7(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < 1e-15 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..7).contains(&exp) {
        return format!("{x:.6e}");
    }
    let decimals = (6 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn list(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| sig7(v))
        .collect::<Vec<_>>()
        .join(", ")
}

fn show_angle(theta: f64, degrees: bool) -> String {
    sig7(if degrees { theta.to_degrees() } else { theta })
}

fn write_out(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

fn print_report(
    out: &mut String,
    game: &GameSpec,
    idx: usize,
    rep: &EquilibriumReport,
    degrees: bool,
) {
    let _ = writeln!(
        out,
        "#{} {}  payoffs ({})  members {}",
        idx + 1,
        rep.classification,
        list(&rep.payoffs.total),
        rep.members.len()
    );
    let angles: Vec<String> = game
        .players
        .iter()
        .zip(rep.profile.angles())
        .map(|(p, a)| {
            format!(
                "{} [{}, {}]",
                p.name,
                show_angle(a[0], degrees),
                show_angle(a[1], degrees)
            )
        })
        .collect();
    let _ = writeln!(out, "   angles  {}", angles.join("  "));
    let _ = writeln!(
        out,
        "   max stationarity residual {}  max deviation margin {}",
        sig7(rep.max_stationarity_residual()),
        sig7(rep.max_deviation_margin())
    );
    if let Some(c) = rep.condition_residuals {
        let _ = writeln!(out, "   condition residuals [{}]", list(&c));
    }
    if !rep.free_directions.is_empty() {
        let free: Vec<String> = rep
            .free_directions
            .iter()
            .map(ToString::to_string)
            .collect();
        let _ = writeln!(out, "   free: {}", free.join("; "));
    }
    for c in &rep.family_constraints {
        let _ = writeln!(out, "   {c}");
    }
}

fn print_outcome(
    game: &GameSpec,
    coord: &CoordinatorParams,
    outcome: &SolveOutcome,
    degrees: bool,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "game {}  gamma={}  phi={}",
        game.name,
        show_angle(coord.gamma(), degrees),
        show_angle(coord.phi(), degrees)
    );
    let _ = writeln!(
        out,
        "{} equilibria ({} starts converged and verified, {} failed)",
        outcome.reports.len(),
        outcome.converged_starts,
        outcome.failed_starts
    );
    for (i, rep) in outcome.reports.iter().enumerate() {
        print_report(&mut out, game, i, rep, degrees);
    }
    out
}

fn cmd_solve(a: &SolveArgs) -> CmdResult {
    let game = format::load_game(&a.game)?;
    let coord = CoordinatorParams::new(
        angle_arg(&a.gamma, "gamma", a.degrees)?,
        angle_arg(&a.phi, "phi", a.degrees)?,
    )?;
    let outcome = find_equilibria(&game, &coord, &a.solver.config())?;
    print!("{}", print_outcome(&game, &coord, &outcome, a.degrees));
    if let Some(path) = &a.out {
        let json = format::outcome_to_json(&game, &coord, &outcome);
        write_out(
            path,
            &serde_json::to_string_pretty(&json).expect("report serializes"),
        )?;
    }
    if outcome.reports.is_empty() {
        return Err(Failure {
            code: EXIT_NO_RESULT,
            message: "no converged equilibria".into(),
        });
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> CmdResult {
    let game = format::load_game(&a.game)?;
    let grid = |text: &str, name: &str| -> Result<Vec<f64>, Failure> {
        let v = parse_grid(text)
            .ok_or_else(|| invalid(format!("--{name}: cannot parse grid \"{text}\"")))?;
        Ok(if a.degrees {
            v.into_iter().map(f64::to_radians).collect()
        } else {
            v
        })
    };
    let rows = sweep(
        &game,
        &grid(&a.gamma, "gamma")?,
        &grid(&a.phi, "phi")?,
        &a.solver.config(),
    )?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    })?;
    let text = String::from_utf8(buf).expect("csv is utf-8");
    match &a.out {
        Some(path) => write_out(path, &text)?,
        None => print!("{text}"),
    }
    if rows.iter().all(|r| r.equilibrium_count == 0) {
        return Err(Failure {
            code: EXIT_NO_RESULT,
            message: "no converged equilibria at any grid point".into(),
        });
    }
    Ok(())
}

fn bell_status(max_lhs: f64) -> String {
    if max_lhs <= CLASSICAL_TOL {
        "no violation".into()
    } else if (CIRELSON_CERECEDA - max_lhs).abs() <= 1e-9 {
        format!("violation {} (Cirel'son-saturating)", sig7(max_lhs))
    } else {
        format!("violation {}", sig7(max_lhs))
    }
}

fn bell_text(probs: &JointProbTensor) -> Result<(String, serde_json::Value), Error> {
    let n = probs.n_players();
    let mut out = String::new();
    if n != 2 {
        let base = nparty_cereceda_lhs(probs, n, false)?;
        let mirror = nparty_cereceda_lhs(probs, n, true)?;
        let _ = writeln!(
            out,
            "{n}-party Cereceda LHS {}  mirrored {}",
            sig7(base),
            sig7(mirror)
        );
        let _ = writeln!(out, "status: {}", bell_status(base.max(mirror)));
        let json = serde_json::json!({"n_players": n, "lhs": base, "mirrored_lhs": mirror});
        return Ok((out, json));
    }
    let report = bell_report(probs)?;
    let variants = enumerate_variants(2);
    let _ = writeln!(out, "variant  quartet  LHS");
    for (i, (v, lhs)) in variants.iter().zip(&report.lhs).enumerate() {
        let q = v.quartet_id.map_or("-".into(), |q| q.to_string());
        let flag = if *lhs > CLASSICAL_TOL { "  > 0" } else { "" };
        let _ = writeln!(out, "{i:>7}  {q:>7}  {}{flag}", sig7(*lhs));
    }
    let _ = writeln!(out, "quartet  signs  CHSH");
    for (q, chsh) in quartets().iter().zip(&report.chsh_values) {
        let signs: String = q
            .chsh_signs
            .iter()
            .map(|&s| if s > 0 { '+' } else { '-' })
            .collect();
        let _ = writeln!(out, "{:>7}  {signs}   {}", q.id, sig7(*chsh));
    }
    let _ = writeln!(
        out,
        "max LHS {}  variants above classical bound {}  Cirel'son margin {}",
        sig7(report.max_lhs),
        report.classical_bound_violations.len(),
        sig7(report.cirelson_margin)
    );
    let _ = writeln!(out, "status: {}", bell_status(report.max_lhs));
    Ok((out, format::bell_report_to_json(&report)))
}

fn cmd_bell(a: &BellArgs) -> CmdResult {
    let probs = if let Some(path) = &a.tensor {
        format::parse_tensor(&format::read_file(path)?)?
    } else {
        let path = a.strategy.as_ref().expect("clap enforces one input");
        let game = a.game.as_deref().map(format::load_game).transpose()?;
        let text = format::read_file(path)?;
        let (profile, coord) =
            format::parse_strategy(&text, game.as_ref().map(|g| g.players.as_slice()))?;
        joint_for(&profile, &coord)?
    };
    let (text, json) = bell_text(&probs)?;
    print!("{text}");
    if let Some(path) = &a.out {
        write_out(
            path,
            &serde_json::to_string_pretty(&json).expect("report serializes"),
        )?;
    }
    Ok(())
}

fn demo_extended_bos(seed: u64) -> Result<String, Error> {
    let game = crate::game::builtin_extended_bos();
    let cfg = SolverConfig {
        seed,
        ..SolverConfig::default()
    };
    let mut out = String::new();

    let classical = CoordinatorParams::classical();
    let c = find_equilibria(&game, &classical, &cfg)?;
    let worst = c
        .reports
        .iter()
        .flat_map(|r| r.payoffs.total.iter().map(|x| x.abs()))
        .fold(0.0, f64::max);
    let mut covered: Vec<usize> = Vec::new();
    for fam in crate::equilibrium::enumerate_classical_families(&game)? {
        if c.reports
            .iter()
            .any(|r| r.members.iter().any(|m| fam.contains(m, 1e-4)))
        {
            covered.push(fam.index);
        }
    }
    let _ = writeln!(
        out,
        "classical (gamma=0): {} equilibrium families",
        c.reports.len()
    );
    let _ = writeln!(
        out,
        "  classical payoff {} (max |payoff| {})",
        sig7(0.0),
        sig7(worst)
    );
    let _ = writeln!(out, "  classical families matched: {covered:?}");

    let quantum = CoordinatorParams::maximal();
    let q = find_equilibria(&game, &quantum, &cfg)?;
    let family = quantum_family_constraints(&quantum)?;
    let best = q
        .reports
        .iter()
        .max_by(|a, b| a.payoffs.total[0].total_cmp(&b.payoffs.total[0]))
        .ok_or_else(|| Error::Internal("no quantum equilibrium found".into()))?;
    let on_family = best
        .members
        .iter()
        .find(|m| family.residuals(m).iter().all(|r| r.abs() <= 1e-6))
        .unwrap_or(&best.profile);
    let _ = writeln!(
        out,
        "quantum (gamma=pi/2, phi=0): {} equilibrium families",
        q.reports.len()
    );
    let _ = writeln!(out, "  quantum payoff {}", list(&best.payoffs.total));
    let _ = writeln!(
        out,
        "  equilibrium angles alpha [{}]  beta [{}]",
        list(&on_family.angles()[0]),
        list(&on_family.angles()[1])
    );
    let _ = writeln!(out, "  relations: {}", family.describe().join(", "));

    let probs = joint_for(on_family, &quantum)?;
    let report = bell_report(&probs)?;
    let _ = writeln!(
        out,
        "  Cereceda max LHS {}  Cirel'son bound {}  margin {}",
        sig7(report.max_lhs),
        sig7(CIRELSON_CERECEDA),
        sig7(report.cirelson_margin)
    );
    let max_chsh = report
        .chsh_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let _ = writeln!(out, "  max CHSH {}", sig7(max_chsh));
    let d = payoff_decomposition(on_family, &quantum, &game)?;
    let _ = writeln!(
        out,
        "  payoff split: pseudo-classical ({})  interference ({})",
        list(&d.pseudo_classical),
        list(&d.interference)
    );
    Ok(out)
}

fn demo_three_player(seed: u64) -> Result<String, Error> {
    let game = crate::game::builtin_three_player();
    let mut out = String::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    const SAMPLES: usize = 1000;
    for _ in 0..SAMPLES {
        let angles: Vec<[f64; 2]> = (0..3)
            .map(|_| [rng.gen_range(0.0..PI), rng.gen_range(0.0..PI)])
            .collect();
        let probs = classical_joint(&StrategyProfile::new(angles)?);
        worst = worst.max(nparty_cereceda_lhs(&probs, 3, false)?);
    }
    let _ = writeln!(
        out,
        "3-party Cereceda LHS on {SAMPLES} factorized profiles: max {}",
        sig7(worst)
    );
    let search = max_violation_search(
        3,
        &SearchConfig {
            seed,
            ..SearchConfig::default()
        },
    )?;
    let _ = writeln!(out, "quantum violation {}", sig7(search.best));
    let _ = writeln!(
        out,
        "  at gamma {}  phi {}",
        sig7(search.coord.gamma()),
        sig7(search.coord.phi())
    );
    for (p, a) in game.players.iter().zip(search.profile.angles()) {
        let _ = writeln!(out, "  {} [{}]", p.name, list(a));
    }
    let pay = payoffs(&joint_for(&search.profile, &search.coord)?, &game)?;
    let _ = writeln!(out, "  payoffs there ({})", list(&pay.total));
    Ok(out)
}

fn cmd_demo(a: &DemoArgs) -> CmdResult {
    let text = match a.name.as_str() {
        "extended-bos" => demo_extended_bos(a.seed)?,
        "three-player" => demo_three_player(a.seed)?,
        other => {
            return Err(invalid(format!(
                "unknown demo \"{other}\"; valid names: {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    print!("{text}");
    Ok(())
}

fn cmd_validate(a: &ValidateArgs) -> CmdResult {
    let game = format::load_game(&a.game)?;
    let sectors: Vec<String> = (0..game.n_sectors())
        .map(|s| profile_label(s, game.n_players()))
        .collect();
    println!(
        "valid: {} ({} players, sectors {})",
        game.name,
        game.n_players(),
        sectors.join(" ")
    );
    Ok(())
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bell(a) => cmd_bell(a),
        Command::Demo(a) => cmd_demo(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
