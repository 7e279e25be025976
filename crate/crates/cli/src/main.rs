mod args;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use magnon_core::coherence::{report, single_mode_averages};
use magnon_core::magnon_state::build_state_with;
use magnon_core::reduced_density::{reduce_single_mode_with, reduce_with};
use magnon_core::thermo::sweep;
use magnon_core::verify::run_suite;
use magnon_core::{
    BlockDensityMatrix, Budget, Error, FamilyResult, GridSpec, GridVariable, MagnonStateSpec, MomentumVector,
    SubsystemSpec, VerifyConfig,
};

use args::{Cli, Command, GridKind, ReduceArgs, StateArgs, ThermoArgs, VerifyArgs};
use render::{
    thermo_csv, to_json, CoherenceDocument, ReduceDocument, SingleModeSection, StateDocument, VerifyDocument,
};

/// Exit status for a failed run, by error category.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::Divergence { .. } | Error::NullState { .. } => 2,
        Error::Infeasible(_) => 3,
        Error::InternalConsistency(_) => 4,
    }
}

const VERIFY_FAILED: u8 = 4;

fn budget(args: &StateArgs) -> Budget {
    Budget {
        max_amplitudes: args.budget,
        ..Budget::default()
    }
}

fn state_spec(args: &StateArgs) -> Result<MagnonStateSpec, Error> {
    let m = args.magnons.unwrap_or(args.k.len());
    let indices = match args.k.as_slice() {
        [single] if m > 1 => vec![*single; m],
        list if list.len() == m => list.to_vec(),
        list => {
            return Err(Error::Domain(format!(
                "--m {m} does not match {} wavenumber indices",
                list.len()
            )))
        }
    };
    MagnonStateSpec::new(MomentumVector::new(args.chain, indices)?, args.coupling)
}

fn subsystem(args: &ReduceArgs) -> Result<SubsystemSpec, Error> {
    let chain = args.state.chain;
    match (&args.sites, args.n) {
        (Some(sites), _) => SubsystemSpec::new(chain, sites.clone()),
        (None, Some(n)) => SubsystemSpec::prefix(chain, n),
        (None, None) => SubsystemSpec::prefix(chain, chain),
    }
}

/// Reduced state and the name of the path that produced it.
fn reduced(args: &ReduceArgs, spec: &MagnonStateSpec) -> Result<(BlockDensityMatrix, &'static str), Error> {
    let sub = subsystem(args)?;
    let budget = budget(&args.state);
    if args.closed_form {
        if args.sites.is_some() {
            return Err(Error::Domain("--closed-form takes --n, not --sites".into()));
        }
        if spec.momentum().single_mode_index().is_none() {
            return Err(Error::Domain("--closed-form needs all wavenumber indices equal".into()));
        }
        let k = spec.momentum().values()[0];
        let rho = reduce_single_mode_with(spec.chain(), sub.len(), spec.magnons(), k, &budget)?;
        return Ok((rho, "single-mode closed form"));
    }
    let state = build_state_with(spec, &budget)?;
    Ok((reduce_with(&state, &sub, &budget)?, "partial trace"))
}

fn cmd_state(args: &StateArgs) -> Result<String, Error> {
    let spec = state_spec(args)?;
    let state = build_state_with(&spec, &budget(args))?;
    Ok(to_json(&StateDocument::new(&spec, &state)))
}

fn cmd_reduce(args: &ReduceArgs) -> Result<String, Error> {
    let spec = state_spec(&args.state)?;
    let (rho, method) = reduced(args, &spec)?;
    Ok(to_json(&ReduceDocument::new(&spec, &rho, method)))
}

fn cmd_coherence(args: &ReduceArgs) -> Result<String, Error> {
    let spec = state_spec(&args.state)?;
    let (rho, method) = reduced(args, &spec)?;
    let r = report(&rho)?;
    let single_mode = match spec.momentum().single_mode_index() {
        Some(_) => {
            let averages = single_mode_averages(spec.chain(), rho.subsystem().len(), spec.magnons())?;
            Some(SingleModeSection::new(&r, &averages))
        }
        None => None,
    };
    Ok(to_json(&CoherenceDocument::new(
        &spec,
        rho.subsystem(),
        method,
        &r,
        single_mode,
    )))
}

fn cmd_thermo(args: &ThermoArgs) -> Result<String, Error> {
    let grid = GridSpec {
        variable: match args.grid {
            GridKind::Beta => GridVariable::Beta,
            GridKind::U => GridVariable::EnergyDensity,
        },
        start: args.from,
        end: args.to,
        samples: args.samples,
    };
    let curve = sweep(grid, args.epsilon0)?;
    thermo_csv(&curve).map_err(|e| Error::InternalConsistency(format!("csv output failed: {e}")))
}

/// Checks on the command line itself, appended to the core suite.
fn cli_families(config: &VerifyConfig) -> Vec<FamilyResult> {
    let state_args = StateArgs {
        chain: config.chain,
        magnons: Some(config.magnons),
        k: vec![1],
        coupling: config.coupling,
        budget: Budget::default().max_amplitudes,
    };
    let first = cmd_state(&state_args);
    let second = cmd_state(&state_args);
    let deterministic = matches!((&first, &second), (Ok(a), Ok(b)) if a == b);

    let samples = [
        Error::Domain(String::new()),
        Error::Divergence { positive: true },
        Error::NullState { norm_sq: 0.0 },
        Error::Infeasible(String::new()),
        Error::InternalConsistency(String::new()),
    ];
    let mut categories: Vec<&str> = samples.iter().map(Error::category).collect();
    categories.sort_unstable();
    categories.dedup();
    let distinct = categories.len() == samples.len();
    let codes_ok = samples.iter().all(|e| exit_code(e) != 0);

    let family = |name: &'static str, ok: bool, checks: usize| FamilyResult {
        module: "cli",
        family: name,
        checks,
        max_residual: if ok { 0.0 } else { 1.0 },
        tolerance: 0.0,
        passed: ok,
        note: None,
    };
    vec![
        family("determinism", deterministic, 1),
        family("error-categories", distinct && codes_ok, samples.len()),
    ]
}

/// Returns the rendered report and whether every family passed.
fn cmd_verify(args: &VerifyArgs) -> Result<(String, bool), Error> {
    let config = VerifyConfig {
        chain: args.chain,
        magnons: args.magnons,
        coupling: args.coupling,
        trials: args.trials,
        seed: args.seed,
        force_fail: args.force_fail,
    };
    let mut report = run_suite(&config)?;
    let forced = report.families.len() - usize::from(config.force_fail);
    let extra = cli_families(&config);
    report.families.splice(forced..forced, extra);
    let passed = report.passed();
    let out = if args.json {
        to_json(&VerifyDocument::new(&report))
    } else {
        let mut lines: Vec<String> = report.families.iter().map(ToString::to_string).collect();
        let failures = report.failures().count();
        lines.push(format!(
            "{}: {} of {} families passed (N = {}, m = {}, seed {})",
            if passed { "PASS" } else { "FAIL" },
            report.families.len() - failures,
            report.families.len(),
            config.chain,
            config.magnons,
            config.seed
        ));
        lines.join("\n")
    };
    Ok((out, passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::State(a) => cmd_state(a).map(|s| (s, true)),
        Command::Reduce(a) => cmd_reduce(a).map(|s| (s, true)),
        Command::Coherence(a) => cmd_coherence(a).map(|s| (s, true)),
        Command::Thermo(a) => cmd_thermo(a).map(|s| (s, true)),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok((text, passed)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", text.trim_end());
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error[verification]: at least one invariant family failed");
                ExitCode::from(VERIFY_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(exit_code(&e))
        }
    }
}
