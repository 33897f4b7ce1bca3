//! End-to-end scenarios producing [`VerificationReport`]s.
//!
//! Each scenario has a `*_with` form taking explicit inputs so that tests can
//! run it on mutated data and watch a check flip.

use std::time::Instant;

use num_complex::Complex;
use serde_json::{json, Value};

use crate::algebra::{center, generate_algebra, is_minimal_projection, relative_commutant};
use crate::error::{Error, Result};
use crate::hadamard::{clock, fourier, is_complex_hadamard, permutation_images, permutation_order, projective_order};
use crate::lemmas::{
    basic_construction_step, clock_image, clock_shift_residual, clock_to_shift_residual, diagonal_form, leg_rearrangement_residual,
    leg_rearrangement_swaps, next_level_containment,
};
use crate::random::{ginibre, haar_unitary, random_diagonal_unitary, random_orbit_point, seeded};
use crate::report::VerificationReport;
use crate::squares::{is_biunitary_both, verify_square_ik_towers};
use crate::tensor::{embed_left, kron, pad_left, LeggedMatrix, Tolerance};
use crate::tower::{biunitary_bu, chain_conjugator, intertwining_residual, jones_projection, n_generators, tower_legs, Parity, TowerCache};

type M = LeggedMatrix<f64>;

/// Largest ambient order a scenario may build unless overridden.
pub const DEFAULT_BUDGET: usize = 128;

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub tol: Tolerance<f64>,
    /// Largest ambient matrix order a scenario may build.
    pub budget: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    fn require(&self, order: usize) -> Result<()> {
        if order > self.budget {
            return Err(Error::BudgetExceeded { order, budget: self.budget });
        }
        Ok(())
    }
}

fn power(n: usize, e: usize) -> Result<usize> {
    u32::try_from(e)
        .ok()
        .and_then(|e| n.checked_pow(e))
        .ok_or_else(|| Error::InvalidArgument(format!("{n}^{e} overflows")))
}

/// JSON number, or a string for non-finite values.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn timed(report: &mut VerificationReport, start: Instant) -> VerificationReport {
    report.timing_ms = start.elapsed().as_millis() as u64;
    report.finish();
    report.clone()
}

fn towers(u: &M, w: &M, max_level: usize, tol: &Tolerance<f64>) -> Result<(TowerCache<f64>, TowerCache<f64>)> {
    Ok((
        TowerCache::with_max_level(u, tol, max_level)?,
        TowerCache::with_max_level(w, tol, max_level)?,
    ))
}

/// `P = Σ_j E_{images[j], j}`.
pub fn permutation_from_images(images: &[usize]) -> Result<M> {
    M::permutation(images)
}

/// The 3-cycle `E₁₃ + E₂₁ + E₃₂` extended by the identity to order `n`.
pub fn three_cycle_images(n: usize) -> Vec<usize> {
    let mut images: Vec<usize> = (0..n).collect();
    if n >= 3 {
        images[0] = 1;
        images[1] = 2;
        images[2] = 0;
    }
    images
}

// ---------------------------------------------------------------------------
// diagonal Fourier subfactors

pub fn scenario_diagonal_fourier(n: usize, k: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let f = fourier::<f64>(n)?;
    scenario_diagonal_fourier_with(&f, &f, k, cfg)
}

/// Relative commutant of `N_{2k}` for the pair `(u, w)` inside `ℂ ⊗ M^{(k+1)}`,
/// expected to be `n^{k+1}`-dimensional, plus the clock identities at level `k`.
pub fn scenario_diagonal_fourier_with(u: &M, w: &M, k: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = u.order();
    let ambient = power(n, k + 2)?;
    cfg.require(ambient)?;
    let m = ambient / n;
    let mut report = VerificationReport::new("diagonal_fourier");
    report.param("n", n).param("k", k);
    let (uc, wc) = towers(u, w, 2 * k + 2, &cfg.tol)?;

    let gens = n_generators(&uc, &wc, k, Parity::Even)?;
    let rc = relative_commutant(&gens, n, m, &cfg.tol)?;
    let expected = power(n, k + 1)?;
    report.push(
        "relative_commutant_dim",
        rc.dim() == expected,
        rc.dim(),
        expected,
        0.0,
        "relative commutant of the Fourier vertex-model subfactor is ℂ^{n^{k+1}}",
    );
    let gap = rc.spectral_gap();
    report.push(
        "relative_commutant_gap",
        gap >= 1e3,
        num(gap),
        ">= 1e3",
        if gap.is_finite() { 1.0 / gap } else { 0.0 },
        "plumbing",
    );
    report.observe("relative_commutant_center_dim", center(&rc, &cfg.tol).dim());
    let odd = relative_commutant(&n_generators(&uc, &wc, k, Parity::Odd)?, n, m, &cfg.tol)?;
    report.observe("odd_level_relative_commutant_dim", odd.dim());

    report.push_residual(
        "clock_to_shift",
        clock_to_shift_residual(&uc, k)?,
        cfg.tol.residual_eps,
        "Ad_{I⊗(F_n)_{2k}}(I⊗𝒟₁⊗I^{(k)}) = I⊗σ₁^{(k+1)}",
    );
    let form = diagonal_form(&uc, &wc, k)?;
    report.push_residual(
        "clock_image_diagonal",
        form.off_diagonal,
        cfg.tol.residual_eps,
        "Ad_{(F_n)_{2k+1}(I⊗(F_n)_{2k})}(I⊗𝒟₁⊗I^{(k)}) is diagonal",
    );
    report.push_residual(
        "clock_image_fibres",
        form.fibre_residual,
        cfg.tol.residual_eps,
        "each leading-leg fibre equals Ad_{σ_r}(𝒟₁)",
    );
    report.push(
        "clock_image_shift_by_last_leg",
        form.last_leg_only,
        json!(form.shifts.iter().take(n).collect::<Vec<_>>()),
        "r depends on the last leg only",
        0.0,
        "Σ Ad_{σ_{r_i}}(𝒟₁) ⊗ E_{i₁i₁} ⊗ … ⊗ E_{ii}",
    );
    Ok(timed(&mut report, start))
}

// ---------------------------------------------------------------------------
// irreducibility and noncommutativity

fn relative_commutant_dim(u: &M, w: &M, cfg: &ScenarioConfig) -> Result<(usize, f64)> {
    let n = u.order();
    let (uc, wc) = towers(u, w, 2, &cfg.tol)?;
    let rc = relative_commutant(&n_generators(&uc, &wc, 0, Parity::Even)?, n, n, &cfg.tol)?;
    Ok((rc.dim(), rc.spectral_gap()))
}

/// `|⟨a, b⟩| / (‖a‖‖b‖)` in the normalized trace inner product.
fn cosine(a: &M, b: &M) -> f64 {
    a.inner(b).norm() / (a.normalized_norm() * b.normalized_norm())
}

pub fn scenario_irreducible(n: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("irreducible scenario needs even n ≥ 4, got {n}")));
    }
    scenario_irreducible_with(&three_cycle_images(n), cfg)
}

/// `(R₀^{F_n, P F_n})′ ∩ R = ℂ` for the permutation with the given images.
pub fn scenario_irreducible_with(images: &[usize], cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = images.len();
    cfg.require(n * n)?;
    let mut report = VerificationReport::new("irreducible");
    report.param("n", n).param("p_images", json!(images));
    let f = fourier::<f64>(n)?;
    let pf = &permutation_from_images(images)? * &f;
    let d = clock::<f64>(n, n / 2);
    let a = pf.conjugate(&d);
    let b = (&clock::<f64>(n, 1) * &pf).conjugate(&d);
    let cos = cosine(&a, &b);
    let threshold = 1.0 - cfg.tol.rank_eps.sqrt();
    report.push(
        "precondition_not_parallel",
        cos < threshold,
        cos,
        format!("< {threshold}"),
        (1.0 - cos).max(0.0),
        "Ad_{PF_n}(𝒟_{n/2}) is not a multiple of Ad_{𝒟₁PF_n}(𝒟_{n/2})",
    );
    let (dim, gap) = relative_commutant_dim(&f, &pf, cfg)?;
    report.push("relative_commutant_dim", dim == 1, dim, 1, 0.0, "(R₀^{F_n,PF_n})′ ∩ R = ℂ");
    report.observe("spectral_gap", num(gap));
    Ok(timed(&mut report, start))
}

pub fn scenario_noncommutativity(n: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    scenario_noncommutativity_with(&three_cycle_images(n), cfg)
}

/// Relative commutant dimensions of `(F, PF)` and `(PF, F)`, expected `(1, n)`.
pub fn scenario_noncommutativity_with(images: &[usize], cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = images.len();
    cfg.require(n * n)?;
    let mut report = VerificationReport::new("noncommutativity");
    report.param("n", n).param("p_images", json!(images));
    let f = fourier::<f64>(n)?;
    let pf = &permutation_from_images(images)? * &f;
    let (forward, _) = relative_commutant_dim(&f, &pf, cfg)?;
    let (backward, _) = relative_commutant_dim(&pf, &f, cfg)?;
    report.push(
        "relative_commutant_dims",
        forward == 1 && backward == n,
        json!([forward, backward]),
        json!([1, n]),
        0.0,
        "(R₀^{u,w})′∩R = ℂ while (R₀^{w,u})′∩R = ℂⁿ",
    );
    let (fc, pc) = towers(&f, &pf, 2, &cfg.tol)?;
    let bu_fw = biunitary_bu(&fc, &pc, 0)?;
    let bu_wf = biunitary_bu(&pc, &fc, 0)?;
    let gap = bu_fw.distance(&bu_wf);
    report.push(
        "bu_matrices_differ",
        gap > cfg.tol.residual_eps,
        gap,
        format!("> {:e}", cfg.tol.residual_eps),
        0.0,
        "BU(u,w;0) ≠ BU(w,u;0)",
    );
    for (name, m) in [("bu_forward", &bu_fw), ("bu_backward", &bu_wf)] {
        let r = is_biunitary_both(m, (n, n), &cfg.tol)?;
        report.push(name, r.overall, r.overall, true, r.max_residual(), "BU(u,w;ℓ) is biunitary");
    }
    Ok(timed(&mut report, start))
}

// ---------------------------------------------------------------------------
// chain isomorphism

#[derive(Clone, Debug)]
pub struct ChainInputs {
    pub w: M,
    pub p1: M,
    pub d1: M,
    pub p2: M,
    pub d2: M,
    pub level: usize,
}

impl ChainInputs {
    /// `W = F_n`, `P₁ = I`, `P₂ = σ₁^{shift}`, trivial diagonals.
    pub fn fourier_shift(n: usize, shift: usize, level: usize) -> Result<Self> {
        Ok(Self {
            w: fourier(n)?,
            p1: M::identity(vec![n]),
            d1: M::identity(vec![n]),
            p2: crate::hadamard::shift(n, shift),
            d2: M::identity(vec![n]),
            level,
        })
    }
}

/// Matrix units spanning `A_{k−1}`: all of `M^{(m+1)}` when `k = 2m+1`,
/// `Δ_n ⊗ M^{(m)}` when `k = 2m`.
fn chain_probe_units(n: usize, k: usize) -> Result<Vec<M>> {
    let legs = tower_legs(k);
    let order = power(n, legs)?;
    if k % 2 == 1 {
        let inner = order / n;
        let mut out = Vec::with_capacity(inner * inner);
        for a in 0..inner {
            for b in 0..inner {
                out.push(pad_left(&M::unit(inner, a, b), n, 1));
            }
        }
        Ok(out)
    } else {
        let inner = order / n;
        let mut out = Vec::with_capacity(n * inner * inner);
        for d in 0..n {
            for a in 0..inner {
                for b in 0..inner {
                    out.push(kron(&M::unit(n, d, d), &M::unit(inner, a, b)));
                }
            }
        }
        Ok(out)
    }
}

/// Finite shadow of the isomorphism `θ₁` between the towers of
/// `u = d1·p1·W` and `v = d2·p2·W`.
pub fn scenario_chain_isomorphism(inputs: &ChainInputs, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = &cfg.tol;
    let n = inputs.w.order();
    let level = inputs.level;
    let u = &(&inputs.d1 * &inputs.p1) * &inputs.w.merged();
    let v = &(&inputs.d2 * &inputs.p2) * &inputs.w.merged();
    for (name, m) in [("u", &u), ("v", &v)] {
        if !is_complex_hadamard(m, tol).pass {
            return Err(Error::NotHadamard(format!("{name} = d·p·W is not a complex Hadamard matrix")));
        }
    }
    let top = 2 * level + 1;
    cfg.require(power(n, tower_legs(top))?)?;
    let mut report = VerificationReport::new("chain_isomorphism");
    report.param("n", n).param("level", level);
    report.param("p1_images", json!(permutation_images(&inputs.p1, tol.residual_eps)?));
    report.param("p2_images", json!(permutation_images(&inputs.p2, tol.residual_eps)?));
    let uc = TowerCache::with_max_level(&u, tol, top)?;
    let vc = TowerCache::with_max_level(&v, tol, top)?;
    let conj = |lvl: usize| chain_conjugator(&inputs.p1, &inputs.d1, &inputs.p2, &inputs.d2, lvl, tol);

    let c = conj(level)?;
    let ambient = c.order();
    for i in 1..=level {
        let e = embed_left(&jones_projection::<f64>(2 * i + 1, n)?, n, ambient)?;
        report.push_residual(
            format!("fixes_e{}", 2 * i + 1),
            c.conjugate(&e).distance(&e),
            tol.residual_eps,
            "θ₁(e_{2i+1}) = e_{2i+1}",
        );
    }
    for i in 0..level {
        let e = embed_left(&jones_projection::<f64>(2 * i + 2, n)?, n, ambient)?;
        report.push_residual(
            format!("fixes_e{}", 2 * i + 2),
            c.conjugate(&e).distance(&e),
            tol.residual_eps,
            "θ₁(e_{2i+2}) = e_{2i+2}",
        );
    }
    let e1 = embed_left(&jones_projection::<f64>(1, n)?, n, ambient)?;
    report.observe("e1_displacement", c.conjugate(&e1).distance(&e1));

    let mut diag_residual: f64 = 0.0;
    for j in 0..n {
        let d = M::unit(n, j, j);
        let lhs = c.conjugate(&embed_left(&u.conjugate(&d), n, ambient)?);
        let rhs = embed_left(&v.conjugate(&d), n, ambient)?;
        diag_residual = diag_residual.max(lhs.distance(&rhs));
    }
    report.push_residual("maps_uDu_to_vDv", diag_residual, tol.residual_eps, "θ₁(uDu*) = vDv*");

    for k in 1..=top {
        let uk = uc.unitary(k)?;
        let vk = vc.unitary(k)?;
        let ck = conj(tower_legs(k) - 1)?;
        let mut worst: f64 = 0.0;
        for x in chain_probe_units(n, k)? {
            let x = x.with_legs(uk.legs().to_vec())?;
            worst = worst.max(ck.conjugate(&uk.conjugate(&x)).distance(&vk.conjugate(&x)));
        }
        report.push_residual(format!("intertwines_u{k}"), worst, tol.residual_eps, "θ₁(Ad_{u_k}(x)) = Ad_{v_k}(x)");
    }

    let p = &inputs.p2.merged() * &inputs.p1.merged().adjoint();
    let period = permutation_order(&p, tol)?;
    let projective = projective_order(&p, period as usize, tol);
    report.push(
        "outer_period",
        projective == Some(period as usize),
        period,
        json!(projective),
        0.0,
        "outer period equals the order of P₂P₁*",
    );
    Ok(timed(&mut report, start))
}

// ---------------------------------------------------------------------------
// no downward basic construction

pub fn scenario_no_downward_basic(n: usize, k: usize, m: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidArgument("no-downward-basic needs k ≥ 1 and m ≥ 1".into()));
    }
    let f = fourier::<f64>(n)?;
    let inner = m * k - 1;
    cfg.require(power(n, (m + 1) * k + 1)?)?;
    let fc = TowerCache::with_max_level(&f, &cfg.tol, 2 * ((m + 1) * k) + 2)?;
    let x = clock_image(&fc, &fc, inner)?;
    no_downward_basic_with(&x, &fc, k, m, cfg)
}

/// Checks that `x` (from `N_{2(mk−1)}`) has zero trace, collapses to `tr(x)`
/// under the expectation onto `N_{2((m+1)k−1)}`, and has `fxf = xf ≠ 0` for
/// every minimal diagonal projection `f` of the finite relative commutant.
pub fn no_downward_basic_with(x: &M, fc: &TowerCache<f64>, k: usize, m: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = &cfg.tol;
    let n = fc.n();
    let outer = (m + 1) * k - 1;
    let ambient = power(n, outer + 2)?;
    cfg.require(ambient)?;
    let mut report = VerificationReport::new("no_downward_basic");
    report.param("n", n).param("k", k).param("m", m);

    let off_diag = x.data().iter().enumerate().filter(|(i, _)| i / x.order() != i % x.order()).fold(0.0f64, |a, (_, z)| a.max(z.norm()));
    report.push_residual("x_diagonal", off_diag, tol.residual_eps, "x is a diagonal unitary matrix");
    let root_residual = x.diagonal_entries().iter().fold(0.0f64, |a, z| a.max(crate::lemmas::nearest_root(*z, n).1));
    report.push_residual("x_entries_roots_of_unity", root_residual, tol.residual_eps, "diagonal entries lie in {1, ω, …, ω^{n−1}}");
    let trace = x.normalized_trace().norm();
    report.push_residual("x_trace_zero", trace, 1e-12, "tr(x) = 0");

    let gens = n_generators(fc, fc, outer, Parity::Even)?;
    let legs = gens[0].legs().to_vec();
    let xe = embed_left(x, n, ambient)?.with_legs(legs.clone())?;
    let algebra = generate_algebra(legs.clone(), &gens, tol)?;
    let collapsed = algebra.project(&xe).distance(&M::identity(legs.clone()).scale(xe.normalized_trace()));
    report.push_residual("expectation_is_trace", collapsed, tol.residual_eps, "E(x) = tr(x) by the commuting square");

    let inner = ambient / n;
    let rc = relative_commutant(&gens, n, inner, tol)?;
    report.observe("relative_commutant_dim", rc.dim());
    let mut minimal = 0usize;
    let mut smallest = f64::INFINITY;
    let mut fxf_vs_xf: f64 = 0.0;
    for j in 0..inner {
        let f = pad_left(&M::unit(inner, j, j), n, 1).with_legs(legs.clone())?;
        if !is_minimal_projection(&rc, &f, tol) {
            continue;
        }
        minimal += 1;
        let fxf = &(&f * &xe) * &f;
        smallest = smallest.min(fxf.frobenius_norm());
        fxf_vs_xf = fxf_vs_xf.max(fxf.distance(&(&xe * &f)));
    }
    report.push(
        "minimal_diagonal_projections",
        minimal > 0,
        minimal,
        "> 0",
        0.0,
        "minimal projections f of the relative commutant",
    );
    report.push(
        "fxf_nonzero",
        minimal > 0 && smallest > 1e-6,
        num(smallest),
        "> 1e-6",
        0.0,
        "fxf = xf ≠ 0 for every minimal f",
    );
    report.push_residual("fxf_equals_xf", fxf_vs_xf, tol.residual_eps, "fxf = xf for diagonal f");
    Ok(timed(&mut report, start))
}

// ---------------------------------------------------------------------------
// lemma suite

pub fn scenario_lemma_suite(n: usize, k_max: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    scenario_lemma_suite_with(&fourier::<f64>(n)?, k_max, cfg)
}

/// Runs every tower identity on the tower of `u`. The clock and shift
/// identities only hold for `u = F_n`; `u` is not checked for being Hadamard
/// so that corrupted inputs reach the checks.
pub fn scenario_lemma_suite_with(u: &M, k_max: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = &cfg.tol;
    let n = u.order();
    if !(2..=4).contains(&n) || k_max > 2 {
        return Err(Error::InvalidArgument(format!("lemma suite needs 2 ≤ n ≤ 4 and k_max ≤ 2, got n={n}, k_max={k_max}")));
    }
    cfg.require(power(n, k_max + 2)?)?;
    let mut report = VerificationReport::new("lemma_suite");
    report.param("n", n).param("k_max", k_max);
    let cache = TowerCache::new_unchecked(u, 2 * k_max + 5);
    let mut skipped = Vec::new();
    let fits = |order: usize| order <= cfg.budget;

    for m in 1..=2 * k_max + 3 {
        let name = format!("intertwining.m{m}");
        if !fits(power(n, tower_legs(m))?) {
            skipped.push(name);
            continue;
        }
        report.push_residual(name, intertwining_residual(&cache, m)?, tol.residual_eps, "u_k e_k u_k* = e_{k+1}");
    }
    report.push_residual("clock_shift", clock_shift_residual(u), tol.residual_eps, "𝒟_kF_n = F_nσ_{n−1}^k and σ_kF_n = F_n𝒟_k");

    for k in 0..=k_max {
        report.push_residual(
            format!("clock_to_shift.k{k}"),
            clock_to_shift_residual(&cache, k)?,
            tol.residual_eps,
            "Ad_{I⊗(F_n)_{2k}}(I⊗𝒟₁⊗I^{(k)}) = I⊗σ₁^{(k+1)}",
        );
        let form = diagonal_form(&cache, &cache, k)?;
        let residual = form.off_diagonal.max(form.fibre_residual);
        let name = format!("clock_image.k{k}");
        let paper_ref = "Ad_{(F_n)_{2k+1}(I⊗(F_n)_{2k})}(I⊗𝒟₁⊗I^{(k)}) = Σ Ad_{σ_{r_i}}(𝒟₁) ⊗ E_{i₁i₁} ⊗ … ⊗ E_{ii}";
        report.push(
            name,
            residual <= tol.residual_eps && form.last_leg_only,
            residual,
            "diagonal, fibres Ad_{σ_r}(𝒟₁), r set by the last leg",
            residual,
            paper_ref,
        );
        let step = basic_construction_step(&cache, &cache, k, tol)?;
        report.push(
            format!("basic_construction.k{k}"),
            step.holds && step.residual <= tol.residual_eps.max(tol.rank_eps),
            json!([step.left_dim, step.right_dim]),
            json!([n * n, n * n]),
            step.residual,
            "N_{2k+1} = ⟨N_{2k}, e_{2k+3}⟩",
        );
        for s in 1..=2 {
            let legs = 2 * k + s + 2;
            let name = format!("leg_rearrangement.k{k}.s{s}");
            if !fits(power(n, legs)?) {
                skipped.push(name);
                continue;
            }
            let mut rng = seeded(cfg.seed ^ ((k as u64) << 8 | s as u64));
            let factors: Vec<M> = (0..k + s + 1).map(|_| ginibre(n, &mut rng)).collect();
            let (w, v) = leg_rearrangement_swaps(n, k, s);
            report.push_residual(
                name,
                leg_rearrangement_residual(&factors, k, s, &w, &v)?,
                tol.residual_eps,
                "Ad_{V_kW_k}(I^{(k+1)}⊗y_s) rearranges the tensor legs",
            );
        }
    }

    if fits(power(n, 3)?) {
        for (label, parity) in [("n_even_next", Parity::Even), ("n_odd_next", Parity::Odd)] {
            let r = next_level_containment(&cache, &cache, 0, parity, tol)?;
            report.observe(
                &format!("containment_in_basic_construction.{label}"),
                json!({"holds": r.holds, "dim": r.left_dim, "ambient_dim": r.right_dim, "residual": num(r.residual)}),
            );
        }
    }
    if !skipped.is_empty() {
        report.observe("skipped_over_budget", json!(skipped));
    }
    Ok(timed(&mut report, start))
}

// ---------------------------------------------------------------------------
// biunitarity sweep

/// Biunitary samples for cross-validation: `(U₁⊗V₁)·D·(U₂⊗V₂)` with `D` a
/// random diagonal unitary and local Haar unitaries.
pub fn dressed_diagonal_unitary<R: rand::Rng>(split: (usize, usize), rng: &mut R) -> M {
    let (n, k) = split;
    let left = kron(&haar_unitary::<f64, _>(n, rng), &haar_unitary::<f64, _>(k, rng));
    let right = kron(&haar_unitary::<f64, _>(n, rng), &haar_unitary::<f64, _>(k, rng));
    let d = random_diagonal_unitary::<f64, _>(n * k, rng).with_legs(vec![n, k]).expect("n·k legs");
    &(&left * &d) * &right
}

/// `BU(u,w;ℓ)` for Fourier matrices and random points of their equivalence
/// orbits, plus agreement of the two criteria on random unitaries.
pub fn scenario_biunitarity(orders: &[usize], levels: &[usize], samples: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let tol = &cfg.tol;
    let mut report = VerificationReport::new("biunitarity");
    report.param("orders", json!(orders)).param("levels", json!(levels)).param("samples", samples).param("seed", cfg.seed);
    let mut rng = seeded(cfg.seed);
    let max_level = levels.iter().copied().max().unwrap_or(0);
    let mut skipped = Vec::new();
    for &n in orders {
        let f = fourier::<f64>(n)?;
        let inputs = [
            ("F".to_string(), f.clone()),
            ("orbit1".to_string(), random_orbit_point(&f, &mut rng).matrix),
            ("orbit2".to_string(), random_orbit_point(&f, &mut rng).matrix),
        ];
        let caches: Vec<TowerCache<f64>> = inputs
            .iter()
            .map(|(_, h)| TowerCache::with_max_level(h, tol, 2 * max_level + 2))
            .collect::<Result<_>>()?;
        for &level in levels {
            let order = power(n, level + 2)?;
            if order > cfg.budget {
                skipped.push(format!("n{n}.l{level}"));
                continue;
            }
            let split = (n, order / n);
            for (i, (ui, _)) in inputs.iter().enumerate() {
                for (j, (wj, _)) in inputs.iter().enumerate() {
                    let bu = biunitary_bu(&caches[i], &caches[j], level)?;
                    let r = is_biunitary_both(&bu, split, tol)?;
                    let residual = r.max_residual();
                    report.push(
                        format!("bu.n{n}.l{level}.{ui}.{wj}"),
                        r.overall && residual < 1e-9,
                        r.overall,
                        true,
                        residual,
                        "BU(u,w;ℓ) = u_{2ℓ+2}w_{2ℓ+1}V_ℓ is biunitary",
                    );
                }
            }
        }
    }
    for split in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let mut agree = 0usize;
        let mut passing = 0usize;
        for i in 0..samples {
            let m = if i % 2 == 0 {
                haar_unitary::<f64, _>(split.0 * split.1, &mut rng).with_legs(vec![split.0, split.1])?
            } else {
                dressed_diagonal_unitary(split, &mut rng)
            };
            let r = is_biunitary_both(&m, split, tol)?;
            if r.check("criteria_agree").is_some_and(|c| c.pass) {
                agree += 1;
            }
            if r.overall {
                passing += 1;
            }
        }
        report.push(
            format!("criteria_agree.{}x{}", split.0, split.1),
            agree == samples,
            agree,
            samples,
            0.0,
            "biunitarity ⇔ commuting square",
        );
        report.observe(&format!("biunitary_samples.{}x{}", split.0, split.1), passing);
    }
    if !skipped.is_empty() {
        report.observe("skipped_over_budget", json!(skipped));
    }
    Ok(timed(&mut report, start))
}

/// Level-`k` commuting square for `(u, w)`.
pub fn scenario_square(u: &M, w: &M, k: usize, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = u.order();
    cfg.require(power(n, k + 2)?)?;
    let mut report = VerificationReport::new("square");
    report.param("n", n).param("k", k);
    let (uc, wc) = towers(u, w, 2 * k + 2, &cfg.tol)?;
    let sq = verify_square_ik_towers(&uc, &wc, k, &cfg.tol)?;
    report.absorb_square("square", &sq, "the level-k quadruple is a non-degenerate commuting square");
    let index = crate::squares::square_index(n as u64, k as u32)?;
    report.push("index", true, index, index, 0.0, "index n^{2(k+1)}");
    Ok(timed(&mut report, start))
}

/// Structural properties at `seeds` consecutive seeds starting from `cfg.seed`.
pub fn scenario_properties(seeds: u64, cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = VerificationReport::new("properties");
    report.param("seed", cfg.seed).param("seeds", seeds);
    for seed in cfg.seed..cfg.seed + seeds {
        for o in crate::props::run_all(seed, &cfg.tol)? {
            let residual = if o.residual.is_finite() { o.residual } else { f64::MAX };
            report.push(format!("{}.seed{seed}", o.name), o.pass, num(o.residual), true, residual, "plumbing");
        }
    }
    Ok(timed(&mut report, start))
}

pub(crate) fn unit_phase(theta: f64) -> Complex<f64> {
    Complex::from_polar(1.0, theta)
}

/// `u` with entry `(row, col)` multiplied by `e^{iθ}`.
pub fn phase_corrupted(u: &M, row: usize, col: usize, theta: f64) -> M {
    let order = u.order();
    let mut data = u.data().to_vec();
    data[row * order + col] *= unit_phase(theta);
    M::new(u.legs().to_vec(), data).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    #[test]
    fn diagonal_fourier_level_zero() {
        for n in [2, 3, 4] {
            let r = scenario_diagonal_fourier(n, 0, &cfg()).unwrap();
            assert!(r.overall, "{}", r.to_text());
            assert_eq!(r.check("relative_commutant_dim").unwrap().value, json!(n));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let small = ScenarioConfig { budget: 8, ..cfg() };
        assert!(matches!(scenario_diagonal_fourier(3, 0, &small), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn irreducible_and_controls() {
        let r = scenario_irreducible(4, &cfg()).unwrap();
        assert!(r.overall, "{}", r.to_text());
        let id: Vec<usize> = (0..4).collect();
        let bad = scenario_irreducible_with(&id, &cfg()).unwrap();
        assert!(!bad.check("precondition_not_parallel").unwrap().pass);
        assert!(scenario_irreducible(5, &cfg()).is_err());
    }

    #[test]
    fn noncommutativity_dims() {
        let r = scenario_noncommutativity(4, &cfg()).unwrap();
        assert!(r.overall, "{}", r.to_text());
    }

    #[test]
    fn chain_isomorphism_fourier_three() {
        let r = scenario_chain_isomorphism(&ChainInputs::fourier_shift(3, 1, 1).unwrap(), &cfg()).unwrap();
        assert!(r.overall, "{}", r.to_text());
        assert_eq!(r.check("outer_period").unwrap().value, json!(3));
    }

    #[test]
    fn trace_zero_witness() {
        let r = scenario_no_downward_basic(2, 1, 1, &cfg()).unwrap();
        assert!(r.overall, "{}", r.to_text());
    }

    #[test]
    fn lemma_suite_small() {
        let r = scenario_lemma_suite(2, 1, &cfg()).unwrap();
        assert!(r.overall, "{}", r.to_text());
        let bad = phase_corrupted(&fourier(2).unwrap(), 1, 1, 0.3);
        let r = scenario_lemma_suite_with(&bad, 1, &cfg()).unwrap();
        assert!(!r.check("intertwining.m1").unwrap().pass);
    }

    #[test]
    fn reports_are_deterministic() {
        let strip = |mut r: VerificationReport| {
            r.timing_ms = 0;
            r.to_json()
        };
        let a = strip(scenario_biunitarity(&[2], &[0], 4, &cfg()).unwrap());
        let b = strip(scenario_biunitarity(&[2], &[0], 4, &cfg()).unwrap());
        assert_eq!(a, b);
    }
}
