//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.

use std::process::ExitCode;
use std::time::Instant;

use biunitary::hadamard::{clock, fourier, shift};
use biunitary::lemmas::{clock_shift_residual, leg_rearrangement_residual, leg_rearrangement_swaps};
use biunitary::props::run_all;
use biunitary::random::{ginibre, seeded};
use biunitary::scenarios::*;
use biunitary::squares::{square_index, verify_square_ik};
use biunitary::algebra::{algebra_equal, generate_algebra};
use biunitary::tower::{identity, n_generators, Parity};
use biunitary::{LeggedMatrix64, Tolerance64, TowerCache64, VerificationReport};
use serde_json::{json, Value};

const RESIDUAL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn cfg() -> ScenarioConfig {
    ScenarioConfig::default()
}

fn failures(r: &VerificationReport) -> String {
    let names: Vec<String> = r.failures().map(|c| c.name.clone()).collect();
    if names.is_empty() {
        String::new()
    } else {
        format!(" failing: {}", names.join(", "))
    }
}

fn max_residual(r: &VerificationReport) -> f64 {
    r.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
}

fn value(r: &VerificationReport, name: &str) -> Value {
    r.check(name).map(|c| c.value.clone()).unwrap_or(Value::Null)
}

fn biunitarity() -> Outcome {
    let r = scenario_biunitarity(&[2, 3, 4, 5], &[0, 1], 50, &cfg()).unwrap();
    let bu_checks = r.checks.iter().filter(|c| c.name.starts_with("bu.")).count();
    let agree_checks = r.checks.iter().filter(|c| c.name.starts_with("criteria_agree.")).count();
    let worst = r
        .checks
        .iter()
        .filter(|c| c.name.starts_with("bu.") && c.residual.is_finite())
        .map(|c| c.residual)
        .fold(0.0, f64::max);
    Outcome::new(
        r.overall && worst < RESIDUAL && bu_checks > 0 && agree_checks >= 4,
        format!("{bu_checks} BU checks, {agree_checks} agreement checks, worst BU residual {worst:.1e}{}", failures(&r)),
    )
}

fn relative_commutants() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, k) in [(2, 0), (2, 1), (3, 0), (4, 0)] {
        let r = scenario_diagonal_fourier(n, k, &cfg()).unwrap();
        let expected = n.pow(k as u32 + 1);
        let dim = value(&r, "relative_commutant_dim");
        let gap = r.check("relative_commutant_gap").map(|c| c.pass).unwrap_or(false);
        let ok = dim == json!(expected) && gap;
        pass &= ok;
        parts.push(format!("(n={n},k={k}) dim {dim} expected {expected}{}", if ok { "" } else { " MISMATCH" }));
    }
    Outcome::new(pass, parts.join("; "))
}

fn irreducible() -> Outcome {
    let r = scenario_irreducible(4, &cfg()).unwrap();
    let pre = r.check("precondition_not_parallel").map(|c| c.pass).unwrap_or(false);
    let dim = value(&r, "relative_commutant_dim");
    Outcome::new(r.overall && pre && dim == json!(1), format!("dim {dim}, precondition {pre}{}", failures(&r)))
}

fn noncommutativity() -> Outcome {
    let r = scenario_noncommutativity(4, &cfg()).unwrap();
    let dims = value(&r, "relative_commutant_dims");
    Outcome::new(r.overall && dims == json!([1, 4]), format!("dims {dims}{}", failures(&r)))
}

fn check_fails(r: &VerificationReport, name: &str) -> bool {
    r.check(name).map(|c| !c.pass).unwrap_or(false)
}

fn lemma_suite() -> Outcome {
    let cfg = ScenarioConfig { budget: 729, ..cfg() };
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let r = scenario_lemma_suite(n, 1, &cfg).unwrap();
        let worst = max_residual(&r);
        let ok = r.overall && worst < RESIDUAL;
        pass &= ok;
        parts.push(format!("n={n}: {} checks, worst {worst:.1e}{}", r.checks.len(), failures(&r)));
    }

    let f = fourier::<f64>(3).unwrap();
    let bad = phase_corrupted(&f, 1, 2, 0.3);
    let corrupted = scenario_lemma_suite_with(&bad, 0, &cfg).unwrap();
    let mut controls = vec![
        ("intertwining", check_fails(&corrupted, "intertwining.m1")),
        ("clock_shift", clock_shift_residual(&bad) > RESIDUAL && check_fails(&corrupted, "clock_shift")),
        ("clock_to_shift", check_fails(&corrupted, "clock_to_shift.k0")),
        ("clock_image", check_fails(&corrupted, "clock_image.k0")),
    ];
    // Without the Jones projection the generated algebra is too small.
    let fc = TowerCache64::new(&f, &Tolerance64::default()).unwrap();
    let tol = Tolerance64::default();
    let even_gens = n_generators(&fc, &fc, 0, Parity::Even).unwrap();
    let odd_gens = n_generators(&fc, &fc, 0, Parity::Odd).unwrap();
    let even = generate_algebra(even_gens[0].legs().to_vec(), &even_gens, &tol).unwrap();
    let odd = generate_algebra(odd_gens[0].legs().to_vec(), &odd_gens, &tol).unwrap();
    controls.push(("basic_construction", !algebra_equal(&even, &odd, &tol).unwrap()));
    let mut rng = seeded(5);
    let factors: Vec<LeggedMatrix64> = (0..3).map(|_| ginibre(3, &mut rng)).collect();
    let (_, v) = leg_rearrangement_swaps::<f64>(3, 1, 1);
    let plain = identity::<f64>(3, 5);
    let rearranged = leg_rearrangement_residual(&factors, 1, 1, &plain, &v).unwrap();
    controls.push(("leg_rearrangement", rearranged > RESIDUAL));
    // Wrong shift power.
    let swapped = (&clock::<f64>(3, 1) * &f).distance(&(&f * &shift::<f64>(3, 1)));
    controls.push(("clock_shift_wrong_power", swapped > RESIDUAL));

    let missed: Vec<&str> = controls.iter().filter(|(_, failed)| !failed).map(|(name, _)| *name).collect();
    pass &= missed.is_empty();
    parts.push(if missed.is_empty() {
        format!("{} mutation controls fail as expected", controls.len())
    } else {
        format!("controls not detected: {}", missed.join(", "))
    });
    Outcome::new(pass, parts.join("; "))
}

fn chain_isomorphism() -> Outcome {
    let inputs = ChainInputs::fourier_shift(3, 1, 1).unwrap();
    let r = scenario_chain_isomorphism(&inputs, &cfg()).unwrap();
    let period = value(&r, "outer_period");
    let worst = max_residual(&r);
    Outcome::new(
        r.overall && period == json!(3) && worst < RESIDUAL,
        format!("period {period}, worst residual {worst:.1e}{}", failures(&r)),
    )
}

fn no_downward_basic() -> Outcome {
    let r = scenario_no_downward_basic(2, 1, 1, &cfg()).unwrap();
    let tr = r.check("x_trace_zero").map(|c| c.residual).unwrap_or(f64::NAN);
    let fxf = r.check("fxf_nonzero").map(|c| c.value.clone()).unwrap_or(Value::Null);
    Outcome::new(
        r.overall && tr < 1e-12,
        format!("|tr x| = {tr:.1e}, fxf norms {fxf}{}", failures(&r)),
    )
}

fn index_formula() -> Outcome {
    let mut mismatches = Vec::new();
    for n in 1..=5u64 {
        let mut expected = 1u64;
        for k in 0..=3u32 {
            expected *= n * n;
            if square_index(n, k).ok() != Some(expected) {
                mismatches.push(format!("({n},{k})"));
            }
        }
    }
    Outcome::new(mismatches.is_empty(), format!("20 cases, mismatches [{}]", mismatches.join(", ")))
}

fn properties() -> Outcome {
    let tol = Tolerance64::default();
    let mut total = 0;
    let mut failed = Vec::new();
    for seed in [1, 2, 3, 4, 5] {
        for o in run_all(seed, &tol).unwrap() {
            total += 1;
            if !o.pass {
                failed.push(format!("{}@{seed}", o.name));
            }
        }
    }
    let r = scenario_properties(3, &cfg()).unwrap();
    Outcome::new(
        failed.is_empty() && r.overall,
        format!("{total} runs over 5 seeds, failing [{}]{}", failed.join(", "), failures(&r)),
    )
}

fn commuting_squares() -> Outcome {
    let tol = Tolerance64::default();
    let f4 = fourier::<f64>(4).unwrap();
    let pf4 = &permutation_from_images(&three_cycle_images(4)).unwrap() * &f4;
    let f3 = fourier::<f64>(3).unwrap();
    let a = verify_square_ik(&f4, &pf4, 0, &tol).unwrap();
    let b = verify_square_ik(&f3, &f3, 1, &tol).unwrap();
    Outcome::new(a.overall && b.overall, format!("(F4,PF4,k=0) {}, (F3,F3,k=1) {}", a.overall, b.overall))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("criterion 1 biunitarity and cross-criterion agreement", biunitarity),
        ("criterion 2 diagonal Fourier relative commutant dimensions", relative_commutants),
        ("criterion 3 irreducibility counterexample", irreducible),
        ("criterion 4 noncommutativity", noncommutativity),
        ("criterion 5 tower identities with mutation controls", lemma_suite),
        ("criterion 6 chain isomorphism finite shadow", chain_isomorphism),
        ("criterion 7 trace-zero witness with nonzero compressions", no_downward_basic),
        ("criterion 8 index formula", index_formula),
        ("criterion 9 property suites", properties),
        ("supplementary commuting squares of towers", commuting_squares),
    ];
    let mut all = true;
    for (label, run) in criteria {
        let start = Instant::now();
        let o = run();
        all &= o.pass;
        let secs = start.elapsed().as_secs_f64();
        println!("[{}] {label}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
