//! Command-line front end: builds matrices, runs checks and scenarios, and
//! prints a verification report.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 for
//! usage, input or budget errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use biunitary::algebra::relative_commutant;
use biunitary::hadamard::{fine_equivalent, fourier, hadamard_equivalent, is_complex_hadamard, DEFAULT_MAX_SEARCH_ORDER};
use biunitary::matrix_file::{read_matrix, to_matrix_string, write_matrix};
use biunitary::scenarios::{self, ChainInputs, ScenarioConfig};
use biunitary::squares::is_biunitary_both;
use biunitary::tower::{biunitary_bu, intertwining_residual, n_generators, Parity, TowerCache};
use biunitary::{Error, LeggedMatrix64, Tolerance64, VerificationReport};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "biunitary", version, about = "Biunitary matrices and commuting squares from complex Hadamard matrices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Residual tolerance for identities
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Singular-value cutoff for ranks and nullspaces
    #[arg(long, global = true, default_value_t = 1e-8)]
    rank_eps: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the report as JSON to this path
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Largest ambient matrix order a command may build
    #[arg(long, global = true, default_value_t = scenarios::DEFAULT_BUDGET)]
    max_order: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Fourier matrix F_n as a matrix file
    Fourier {
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a matrix is complex Hadamard
    CheckHadamard { matrix: String },
    /// Decide Hadamard (or, with --fine, fine) equivalence of two matrices
    Equiv {
        a: String,
        b: String,
        #[arg(long)]
        fine: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_SEARCH_ORDER)]
        max_search_order: usize,
    },
    /// Build u_m of the tower of a Hadamard matrix
    Tower {
        matrix: String,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check biunitarity of a matrix, or of BU(u,w;ℓ) with --pair
    Biunitary {
        matrix: Option<String>,
        /// Split n,k of the ambient M_n ⊗ M_k
        #[arg(long, value_parser = parse_split)]
        split: Option<(usize, usize)>,
        /// Build BU(u,w;ℓ) from two Hadamard matrices
        #[arg(long, num_args = 2, value_names = ["U", "W"])]
        pair: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative commutant of N_{2k} for a pair (u, w)
    Commutant {
        u: String,
        w: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Use N_{2k+1} instead of N_{2k}
        #[arg(long)]
        odd: bool,
    },
    /// Run a named scenario
    Scenario {
        #[command(subcommand)]
        scenario: Scenario,
    },
}

#[derive(Subcommand)]
enum Scenario {
    /// Relative commutant of the diagonal subfactor for u = w = F_n
    DiagonalFourier {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// Relative commutant for (F_n, PF_n) with P a 3-cycle
    Irreducible {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// BU(u,w) against BU(w,u) for F_n and PF_n
    Noncommutativity {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Finite-level identities of the chain isomorphism for F_n and a cyclic shift
    ChainIsomorphism {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// P₂ = σ₁^shift, P₁ = I
        #[arg(long, default_value_t = 1)]
        shift: usize,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Trace-zero diagonal witness with fxf nonzero for every minimal projection f
    NoDownwardBasic {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Tower identities: intertwining, clock and shift, basic construction, leg rearrangement
    LemmaSuite {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k_max: usize,
    },
    /// BU of Fourier matrices and orbit points, plus cross-criterion agreement
    Biunitarity {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5])]
        orders: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0, 1])]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Commuting square of the tower pair (u, w) at level k
    Square {
        u: String,
        w: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// Double commutant, conditional expectations, block transpose, equivalence witnesses
    Properties {
        #[arg(long, default_value_t = 3)]
        seeds: u64,
    },
}

fn parse_split(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected n,k")?;
    let n = a.trim().parse().map_err(|e| format!("{e}"))?;
    let k = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((n, k))
}

/// `fourier:N` or a matrix file path.
fn load(source: &str) -> anyhow::Result<LeggedMatrix64> {
    if let Some(n) = source.strip_prefix("fourier:") {
        let n: usize = n.parse().with_context(|| format!("bad order in {source}"))?;
        return Ok(fourier(n)?);
    }
    read_matrix(source).with_context(|| format!("reading {source}"))
}

fn emit_matrix(m: &LeggedMatrix64, out: &Option<PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => write_matrix(path, m)?,
        None => print!("{}", to_matrix_string(m)),
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Option<VerificationReport>> {
    let g = &cli.global;
    let tol = Tolerance64::new(g.tol, g.rank_eps)?;
    let cfg = ScenarioConfig {
        tol,
        budget: g.max_order,
        seed: g.seed,
    };
    let budget = |order: usize| -> anyhow::Result<()> {
        if order > g.max_order {
            return Err(Error::BudgetExceeded { order, budget: g.max_order }.into());
        }
        Ok(())
    };
    let mut report = match &cli.command {
        Command::Fourier { n, out } => {
            emit_matrix(&fourier(*n)?, out)?;
            return Ok(None);
        }
        Command::CheckHadamard { matrix } => {
            let m = load(matrix)?;
            let check = is_complex_hadamard(&m, &tol);
            let mut r = VerificationReport::new("check_hadamard");
            r.param("matrix", matrix.as_str());
            r.push_residual("unitary", check.unitarity_residual, tol.residual_eps, "plumbing");
            r.push_residual("entry_modulus", check.modulus_deviation, tol.residual_eps, "plumbing");
            r
        }
        Command::Equiv { a, b, fine, max_search_order } => {
            let (ma, mb) = (load(a)?, load(b)?);
            let mut r = VerificationReport::new("equiv");
            r.param("a", a.as_str()).param("b", b.as_str()).param("fine", *fine);
            if *fine {
                let found = fine_equivalent(&ma, &mb, &tol)?;
                if let Some(cp) = &found {
                    r.observe("p_images", json!(biunitary::hadamard::permutation_images(&cp.p, tol.residual_eps)?));
                }
                r.push("fine_equivalent", found.is_some(), found.is_some(), true, 0.0, "plumbing");
            } else {
                let found = hadamard_equivalent(&ma, &mb, &tol, *max_search_order)?;
                let residual = found.as_ref().map_or(0.0, |w| w.residual);
                if let Some(w) = &found {
                    r.observe("p1_images", json!(biunitary::hadamard::permutation_images(&w.p1, tol.residual_eps)?));
                    r.observe("p2_images", json!(biunitary::hadamard::permutation_images(&w.p2, tol.residual_eps)?));
                }
                r.push("hadamard_equivalent", found.is_some(), found.is_some(), true, residual, "plumbing");
            }
            r
        }
        Command::Tower { matrix, level, out } => {
            let m = load(matrix)?;
            let legs = biunitary::tower::tower_legs(*level);
            budget(m.order().saturating_pow(legs as u32))?;
            let cache = TowerCache::with_max_level(&m, &tol, level + 1)?;
            let um = cache.unitary(*level)?;
            if out.is_some() {
                emit_matrix(um, out)?;
            }
            let mut r = VerificationReport::new("tower");
            r.param("matrix", matrix.as_str()).param("level", *level);
            r.observe("order", um.order());
            let unitary = biunitary::tensor::is_unitary(um, &tol);
            r.push_residual("unitary", unitary.residual, tol.residual_eps, "plumbing");
            if *level >= 1 {
                r.push_residual(
                    "intertwining",
                    intertwining_residual(&cache, *level)?,
                    tol.residual_eps,
                    "u_k e_k u_k* = e_{k+1}",
                );
            }
            r
        }
        Command::Biunitary { matrix, split, pair, level, out } => {
            let (m, split) = match (matrix, pair) {
                (Some(src), None) => {
                    let m = load(src)?;
                    let split = split.ok_or_else(|| anyhow!("--split n,k is required with a matrix"))?;
                    (m, split)
                }
                (None, Some(pair)) => {
                    let (u, w) = (load(&pair[0])?, load(&pair[1])?);
                    let n = u.order();
                    budget(n.saturating_pow(*level as u32 + 2))?;
                    let uc = TowerCache::with_max_level(&u, &tol, 2 * level + 2)?;
                    let wc = TowerCache::with_max_level(&w, &tol, 2 * level + 2)?;
                    let bu = biunitary_bu(&uc, &wc, *level)?;
                    let order = bu.order();
                    (bu, (n, order / n))
                }
                _ => bail!("give either a matrix with --split or --pair U W"),
            };
            budget(m.order())?;
            if out.is_some() {
                emit_matrix(&m, out)?;
            }
            let mut r = VerificationReport::new("biunitary");
            r.param("split", json!([split.0, split.1]));
            r.absorb_square("biunitary", &is_biunitary_both(&m, split, &tol)?, "biunitarity ⇔ commuting square");
            r
        }
        Command::Commutant { u, w, k, odd } => {
            let (mu, mw) = (load(u)?, load(w)?);
            let n = mu.order();
            let ambient = n.saturating_pow(*k as u32 + 2);
            budget(ambient)?;
            let uc = TowerCache::with_max_level(&mu, &tol, 2 * k + 2)?;
            let wc = TowerCache::with_max_level(&mw, &tol, 2 * k + 2)?;
            let parity = if *odd { Parity::Odd } else { Parity::Even };
            let rc = relative_commutant(&n_generators(&uc, &wc, *k, parity)?, n, ambient / n, &tol)?;
            let mut r = VerificationReport::new("commutant");
            r.param("u", u.as_str()).param("w", w.as_str()).param("k", *k).param("odd", *odd);
            r.observe("relative_commutant_dim", rc.dim());
            let gap = rc.spectral_gap();
            r.observe("spectral_gap", if gap.is_finite() { json!(gap) } else { json!("inf") });
            r.push("contains_identity", rc.contains_identity(&tol), rc.dim(), "≥ 1", 0.0, "plumbing");
            r
        }
        Command::Scenario { scenario } => match scenario {
            Scenario::DiagonalFourier { n, k } => scenarios::scenario_diagonal_fourier(*n, *k, &cfg)?,
            Scenario::Irreducible { n } => scenarios::scenario_irreducible(*n, &cfg)?,
            Scenario::Noncommutativity { n } => scenarios::scenario_noncommutativity(*n, &cfg)?,
            Scenario::ChainIsomorphism { n, shift, level } => {
                scenarios::scenario_chain_isomorphism(&ChainInputs::fourier_shift(*n, *shift, *level)?, &cfg)?
            }
            Scenario::NoDownwardBasic { n, k, m } => scenarios::scenario_no_downward_basic(*n, *k, *m, &cfg)?,
            Scenario::LemmaSuite { n, k_max } => scenarios::scenario_lemma_suite(*n, *k_max, &cfg)?,
            Scenario::Biunitarity { orders, levels, samples } => scenarios::scenario_biunitarity(orders, levels, *samples, &cfg)?,
            Scenario::Square { u, w, k } => scenarios::scenario_square(&load(u)?, &load(w)?, *k, &cfg)?,
            Scenario::Properties { seeds } => scenarios::scenario_properties(*seeds, &cfg)?,
        },
    };
    report.finish();
    Ok(Some(report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(report)) => {
            print!("{}", report.to_text());
            if let Some(path) = &cli.global.json {
                if let Err(e) = std::fs::write(path, report.to_json()) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if report.overall {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
