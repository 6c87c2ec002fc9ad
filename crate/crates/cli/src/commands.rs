use std::path::{Path, PathBuf};

use serde::Serialize;
use xxchain::dynamics::{amplitude_sweep, time_grid, write_amplitude_csv};
use xxchain::robustness::{entanglement_at_t0, feasibility, sweep_entanglement, write_sweep_csv, SweepFamily};
use xxchain::search::{minimize, SearchProblem, SearchResult};
use xxchain::teleport::{teleport_report, EntangledResource, MeasureMode, TeleportReport};
use xxchain::{engineered_couplings, validate_profile, CouplingProfile, Exec, C64};

use crate::args::*;
use crate::error::CliError;
use crate::grid::parse_grid;

/// Environment variable naming the directory for relative output paths.
pub const OUT_DIR_VAR: &str = "XXCHAIN_OUT_DIR";

/// What a command produced: file contents and the seed it used.
pub struct Output {
    pub bytes: Vec<u8>,
    pub seed: Option<u64>,
}

pub fn resolve_out(out: Option<&Path>, default_name: &str) -> PathBuf {
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(default_name));
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path,
    }
}

/// Output path before resolution, and the default file name.
pub fn out_spec(cmd: &Command) -> (Option<&Path>, &'static str) {
    match cmd {
        Command::Couplings(a) => (
            a.out.as_deref(),
            match a.format {
                Format::Json => "couplings.json",
                Format::Csv => "couplings.csv",
            },
        ),
        Command::Evolve(a) => (a.out.as_deref(), "evolve.csv"),
        Command::Teleport(a) => (a.out.as_deref(), "teleport.json"),
        Command::Feasibility(a) => (a.out.as_deref(), "feasibility.json"),
        Command::Perturb(a) => (
            a.out.as_deref(),
            match a.format {
                Format::Json => "perturb.json",
                Format::Csv => "perturb.csv",
            },
        ),
        Command::Search(a) => (a.out.as_deref(), "search.json"),
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serializes");
    v.push(b'\n');
    v
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_chain(c: &ChainArgs) -> Result<CouplingProfile, CliError> {
    match (&c.profile, c.n) {
        (Some(p), _) => read_json(p),
        (None, Some(n)) => Ok(engineered_couplings(n, c.mu)?),
        (None, None) => Err(CliError::Usage("give either --profile or --n".into())),
    }
}

pub fn run(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Couplings(a) => couplings(a),
        Command::Evolve(a) => evolve(a),
        Command::Teleport(a) => teleport(a),
        Command::Feasibility(a) => Ok(Output {
            bytes: json(&feasibility(a.mu, a.gmax)?),
            seed: None,
        }),
        Command::Perturb(a) => perturb(a),
        Command::Search(a) => search(a),
    }
}

fn couplings(a: &CouplingsArgs) -> Result<Output, CliError> {
    let p = engineered_couplings(a.n, a.mu)?;
    let bytes = match a.format {
        Format::Json => json(&p),
        Format::Csv => {
            let mut s = String::from("j,coupling\n");
            for (j, d) in p.couplings().iter().enumerate() {
                s.push_str(&format!("{},{d:?}\n", j + 1));
            }
            s.into_bytes()
        }
    };
    Ok(Output { bytes, seed: None })
}

fn evolve(a: &EvolveArgs) -> Result<Output, CliError> {
    let profile = load_chain(&a.chain)?;
    let (lo, hi, step) = parse_grid(&a.t_grid)?;
    let grid = time_grid(lo, hi, step)?;
    let rows = amplitude_sweep(&profile, &grid, Exec::default())?;
    let mut bytes = Vec::new();
    write_amplitude_csv(&rows, &mut bytes)?;
    Ok(Output { bytes, seed: None })
}

#[derive(Serialize)]
struct TeleportOutput {
    #[serde(flatten)]
    report: TeleportReport,
    /// Weight left in the chain interior when the pair comes from a chain.
    chain_residual_norm: Option<f64>,
}

fn teleport(a: &TeleportArgs) -> Result<Output, CliError> {
    let (resource, residual) = match (&a.resource, a.n) {
        (Some(path), _) => (read_json::<EntangledResource>(path)?, None),
        (None, Some(n)) => {
            let r = entanglement_at_t0(&engineered_couplings(n, a.mu)?)?;
            let res = r
                .resource
                .ok_or_else(|| CliError::Numeric("both end amplitudes vanish at t0".into()))?;
            (res, Some(r.residual_norm))
        }
        (None, None) => return Err(CliError::Usage("give either --resource or --n".into())),
    };
    let mode = match a.mode {
        Mode::Enumerate => MeasureMode::Enumerate,
        Mode::Sample => MeasureMode::Sample { seed: a.seed },
    };
    let report = teleport_report(C64::new(a.a_re, a.a_im), C64::new(a.b_re, a.b_im), &resource, mode)?;
    let seed = report.seed;
    Ok(Output {
        bytes: json(&TeleportOutput {
            report,
            chain_residual_norm: residual,
        }),
        seed,
    })
}

fn perturb(a: &PerturbArgs) -> Result<Output, CliError> {
    let profile = load_chain(&a.chain)?;
    let chosen = [!a.swap.is_empty(), a.adjacent_swaps, a.sigma.is_some()];
    if chosen.iter().filter(|x| **x).count() != 1 {
        return Err(CliError::Usage("give exactly one of --swap, --adjacent-swaps, --sigma".into()));
    }
    let (family, trials, seed) = if let Some(sigma) = a.sigma {
        (SweepFamily::RelativeNoise { sigma }, a.trials, Some(a.seed))
    } else if a.adjacent_swaps {
        (SweepFamily::AdjacentSwaps, 1, None)
    } else {
        let pairs = a.swap.chunks(2).map(|p| (p[0], p[1])).collect();
        (SweepFamily::Swaps(pairs), 1, None)
    };
    let rows = sweep_entanglement(&profile, &family, trials, a.seed, Exec::default())?;
    let bytes = match a.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut b = Vec::new();
            write_sweep_csv(&rows, &mut b)?;
            b
        }
    };
    Ok(Output { bytes, seed })
}

#[derive(Serialize)]
struct SearchOutput {
    problem: SearchProblem,
    result: SearchResult,
    /// Departures from the engineered family's symmetry conditions.
    violations: Vec<xxchain::chain::Violation>,
}

fn search(a: &SearchArgs) -> Result<Output, CliError> {
    let mut problem = SearchProblem::new(a.n, a.mu)?;
    problem.restarts = a.restarts;
    problem.bounds = (a.d_lo.unwrap_or(problem.bounds.0), a.d_hi.unwrap_or(problem.bounds.1));
    problem.t_window = (a.t_min.unwrap_or(problem.t_window.0), a.t_max.unwrap_or(problem.t_window.1));
    problem.validate()?;
    let result = minimize(&problem, a.seed, a.max_iters)?;
    let violations = validate_profile(&result.profile);
    Ok(Output {
        bytes: json(&SearchOutput {
            problem,
            result,
            violations,
        }),
        seed: Some(a.seed),
    })
}
