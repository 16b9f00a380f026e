//! Verification suites. Pass/fail thresholds are fixed here and do not follow
//! the configured tolerances; a configured `eig_tol` only adds warnings when
//! it would flag eigenvalues the fixed band does not.

use std::panic::AssertUnwindSafe;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use spinboson_core::linalg::{hermitian_eigenvalues, hermitian_singular_values, max_abs};
use spinboson_core::oracle::{evaluation_point, schur_complement};
use spinboson_core::pencil::{
    band_tolerance, elementary_inequality_gap, kernel_psi2, pencil_slope_check,
};
use spinboson_core::{
    assemble_block, assemble_k1, assemble_r, count_negative_eigs, delta_values, eig_below,
    eval_phi, find_phi_root, ir_diagnostics_of, positivity_margin, rank_two_matrix, total_count,
    Branch, CMatrix, Complex64, CountOptions, CountReport, DiscreteModel, Quadrature, RootKind,
};

use crate::config::{parse_config, RunConfig};
use crate::error::{CliError, Outcome};
use crate::output::rows_to_string;
use crate::sweep::run_sweep;

/// Zero band used for every pass/fail decision.
pub const EIG_REL_TOL: f64 = 1e-9;
const GUARD: f64 = 1e-8;
const SEED: u64 = 0x5eed_2b05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Level {
    #[default]
    Quick,
    Full,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub level: Level,
    /// Fault injection: perturbs `K2` inside the pencil used by the checks.
    pub tamper_kernel: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub warnings: Vec<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn outcome(&self) -> Outcome {
        if self.passed() {
            Outcome::Success
        } else {
            Outcome::VerificationFailed
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push(format!(
                "{tag}  {:<28} {:>7.3}s  {}",
                c.name, c.seconds, c.detail
            ));
            for w in &c.warnings {
                out.push(format!("      warning: {w}"));
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push(format!("{} checks, {failed} failed", self.checks.len()));
        out
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    tamper: bool,
}

/// Outcome of one check body: pass flag, detail, warnings.
struct Verdict {
    passed: bool,
    detail: String,
    warnings: Vec<String>,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
            warnings: Vec::new(),
        }
    }
}

type Body = fn(&Ctx) -> Result<Verdict, CliError>;

fn run(name: &'static str, ctx: &Ctx, body: Body) -> Check {
    let start = Instant::now();
    // A panicking check is a failed check, not a crashed suite.
    let v = match std::panic::catch_unwind(AssertUnwindSafe(|| body(ctx))) {
        Ok(Ok(v)) => v,
        Ok(Err(e)) => Verdict::new(false, format!("error: {e}")),
        Err(_) => Verdict::new(false, "check panicked"),
    };
    Check {
        name,
        passed: v.passed,
        detail: v.detail,
        warnings: v.warnings,
        seconds: start.elapsed().as_secs_f64(),
    }
}

impl Ctx<'_> {
    fn model(&self, n: usize, alpha: f64) -> Result<DiscreteModel, CliError> {
        let spec = self.cfg.model_spec().with_alpha(alpha);
        let q = spec.grid(n, self.cfg.grid.r_max, self.cfg.rule())?;
        Ok(DiscreteModel::new(&spec, &q)?)
    }

    fn default_model(&self, alpha: f64) -> Result<DiscreteModel, CliError> {
        self.model(self.cfg.grid.n, alpha)
    }

    /// `R(z)`, with the fault hook applied.
    fn pencil(&self, m: &DiscreteModel, branch: Branch, z: f64) -> Result<CMatrix, CliError> {
        let p = assemble_r(m, branch, z)?;
        if self.tamper {
            let a2 = m.alpha() * m.alpha();
            return Ok(p.r - p.k2 * Complex64::new(1e-3 * a2, 0.0));
        }
        Ok(p.r)
    }

    /// Pencil count at the fixed band, plus a warning if the configured band
    /// would flag more eigenvalues.
    fn count(
        &self,
        r: &CMatrix,
        warnings: &mut Vec<String>,
        label: &str,
    ) -> Result<CountReport, CliError> {
        let fixed = count_negative_eigs(r, band_tolerance(r, EIG_REL_TOL))?;
        self.band_warning(
            &fixed.eigenvalues,
            band_tolerance(r, self.cfg.tolerances.eig_tol),
            fixed.flagged,
            warnings,
            label,
        );
        Ok(fixed)
    }

    fn band_warning(
        &self,
        values: &[f64],
        tol: f64,
        fixed_flagged: usize,
        warnings: &mut Vec<String>,
        label: &str,
    ) {
        let flagged = values.iter().filter(|v| v.abs() <= tol).count();
        if flagged > fixed_flagged {
            warnings.push(format!(
                "{label}: configured eig_tol {:e} flags {flagged} eigenvalue(s)",
                self.cfg.tolerances.eig_tol
            ));
        }
    }
}

fn threshold_point(m: &DiscreteModel, branch: Branch) -> Result<(f64, bool), CliError> {
    let e = find_phi_root(m, branch)?;
    Ok(evaluation_point(m, &e, GUARD))
}

fn elementary_inequality(_: &Ctx) -> Result<Verdict, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = f64::INFINITY;
    for _ in 0..100_000 {
        let a = rng.gen_range(0.0..=100.0);
        let b = rng.gen_range(0.0..=100.0);
        let c = 100.0 - rng.gen_range(0.0..100.0);
        let (lower, upper) = elementary_inequality_gap(a, b, c)?;
        worst = worst.min(lower.min(upper) * c);
    }
    Ok(Verdict::new(
        worst >= -1e-12,
        format!("10^5 triples, smallest scaled gap {worst:.3e}"),
    ))
}

fn psi2_bounds(ctx: &Ctx) -> Result<Verdict, CliError> {
    let mut worst = 0.0f64;
    for alpha in [1.0, 10.0, 100.0] {
        let m = ctx.default_model(alpha)?;
        for branch in Branch::BOTH {
            let (z, _) = threshold_point(&m, branch)?;
            let c = m.level(branch) - z;
            for &w1 in m.omega() {
                for &w2 in m.omega() {
                    let p = kernel_psi2(c, w1, w2)?;
                    let bound = (w1 * w2).sqrt() / (2.0 * c * c);
                    worst = worst.max(-p).max(p - bound);
                }
            }
        }
    }
    Ok(Verdict::new(
        worst <= 1e-12,
        format!("largest violation {worst:.3e}"),
    ))
}

fn pointwise_delta(ctx: &Ctx) -> Result<Verdict, CliError> {
    let mut worst = f64::INFINITY;
    for alpha in [1.0, 10.0, 100.0, 1000.0] {
        let m = ctx.default_model(alpha)?;
        for branch in Branch::BOTH {
            let (z, _) = threshold_point(&m, branch)?;
            let d = delta_values(&m, branch, z)?;
            for (v, w) in d.iter().zip(m.omega()) {
                worst = worst.min(v - w);
            }
        }
    }
    Ok(Verdict::new(
        worst >= -1e-10,
        format!("min Δ - ω = {worst:.3e}"),
    ))
}

fn rank_two(ctx: &Ctx) -> Result<Verdict, CliError> {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    for alpha in [5.0, 50.0, 500.0] {
        let m = ctx.default_model(alpha)?;
        for branch in Branch::BOTH {
            let (z, _) = threshold_point(&m, branch)?;
            let k1 = assemble_k1(&m, branch, z)?;
            let s = hermitian_singular_values(&k1)?;
            let rank_ok = s.len() < 3 || s[2] <= 1e-10 * s[0];
            let mm = rank_two_matrix(&m, branch, z)?;
            let det_ok = mm.det() < 0.0 && mm.inertia() == (1, 1);
            let neg = -(k1 * Complex64::new(alpha * alpha, 0.0));
            let count = ctx.count(&neg, &mut warnings, "-α²K1")?;
            // The n - 2 null directions of K1 sit in the zero band by design.
            let count_ok = count.count == 1 && count.flagged <= m.len().saturating_sub(2);
            if !(rank_ok && det_ok && count_ok) {
                ok = false;
                notes.push(format!(
                    "alpha={alpha} {}: σ3/σ1={:.2e} det={:.3e} count={}",
                    branch.symbol(),
                    s.get(2).map_or(0.0, |v| v / s[0]),
                    mm.det(),
                    count.count
                ));
            }
        }
    }
    // One node: Cauchy–Schwarz holds with equality.
    let one = ctx.model(1, 5.0)?;
    let mm = rank_two_matrix(&one, Branch::Plus, find_phi_root(&one, Branch::Plus)?.value)?;
    if mm.det().abs() > 1e-12 * mm.m11 * mm.m11 {
        ok = false;
        notes.push(format!("one-node det {:.3e}", mm.det()));
    }
    let detail = if ok {
        "rank ≤ 2, det M < 0, inertia (+,-), N(-α²K1) = 1".to_string()
    } else {
        notes.join("; ")
    };
    Ok(Verdict {
        passed: ok,
        detail,
        warnings,
    })
}

fn inertia_cases(ctx: &Ctx, sizes: &[usize]) -> Result<Verdict, CliError> {
    let mut bad = Vec::new();
    let mut warnings = Vec::new();
    let mut cases = 0;
    for &n in sizes {
        for alpha in [0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
            let m = ctx.model(n, alpha)?;
            for branch in Branch::BOTH {
                cases += 1;
                let (z, _) = threshold_point(&m, branch)?;
                let r = ctx.pencil(&m, branch, z)?;
                let pencil = ctx.count(&r, &mut warnings, "R(E)")?;
                let direct = eig_below(&assemble_block(&m, branch), z, EIG_REL_TOL)?;
                if pencil.count != direct.count || pencil.flagged > 0 || direct.flagged > 0 {
                    bad.push(format!(
                        "n={n} alpha={alpha} {}: pencil {} ({} flagged), block {} ({} flagged)",
                        branch.symbol(),
                        pencil.count,
                        pencil.flagged,
                        direct.count,
                        direct.flagged
                    ));
                }
            }
        }
    }
    let passed = bad.is_empty();
    let detail = if passed {
        format!("{cases} cases agree")
    } else {
        bad.join("; ")
    };
    Ok(Verdict {
        passed,
        detail,
        warnings,
    })
}

fn inertia_quick(ctx: &Ctx) -> Result<Verdict, CliError> {
    inertia_cases(ctx, &[2, 4])
}

fn inertia_full(ctx: &Ctx) -> Result<Verdict, CliError> {
    inertia_cases(ctx, &[4, 8, 16])
}

fn schur_reproduction(ctx: &Ctx) -> Result<Verdict, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let m = ctx.model(8, 2.0)?;
    let blocks = [
        assemble_block(&m, Branch::Plus),
        assemble_block(&m, Branch::Minus),
    ];
    let mut worst = 0.0f64;
    for k in 0..20 {
        let branch = Branch::BOTH[k % 2];
        let c = 10f64.powf(rng.gen_range(-2.0..1.5));
        let z = m.level(branch) - c;
        let s = schur_complement(&blocks[k % 2], z)?;
        let r = ctx.pencil(&m, branch, z)?;
        worst = worst.max(max_abs(&(&s - &r)) / max_abs(&r));
    }
    Ok(Verdict::new(
        worst <= 1e-12,
        format!("20 points, largest relative defect {worst:.3e}"),
    ))
}

fn strong_coupling(ctx: &Ctx) -> Result<Verdict, CliError> {
    let opts = CountOptions {
        eig_rel_tol: EIG_REL_TOL,
        guard: GUARD,
        direct_cap: 0,
        ..CountOptions::default()
    };
    let mut notes = Vec::new();
    let mut ok = true;
    let mut warnings = Vec::new();
    for alpha in [50.0, 100.0, 500.0] {
        let mut seen = Vec::new();
        for n in [16, 32] {
            let m = ctx.model(n, alpha)?;
            let t = total_count(&m, &opts)?;
            for b in [&t.plus, &t.minus] {
                let r = ctx.pencil(&m, b.branch, b.z)?;
                ctx.band_warning(
                    &b.pencil.eigenvalues,
                    band_tolerance(&r, ctx.cfg.tolerances.eig_tol),
                    b.pencil.flagged,
                    &mut warnings,
                    "R(E)",
                );
            }
            ok &= t.plus.count() <= 1 && t.minus.count() <= 1 && t.total <= 2 && !t.ambiguous;
            seen.push((t.plus.count(), t.minus.count()));
        }
        ok &= seen[0] == seen[1];
        notes.push(format!(
            "alpha={alpha}: (N+,N-) n16 {:?} n32 {:?}",
            seen[0], seen[1]
        ));
    }
    Ok(Verdict {
        passed: ok,
        detail: notes.join("; "),
        warnings,
    })
}

fn asymptotics(ctx: &Ctx) -> Result<Verdict, CliError> {
    let alpha = 1000.0;
    let m = ctx.default_model(alpha)?;
    let norm = m.lambda_norm();
    let mut ok = true;
    let mut notes = Vec::new();
    for branch in Branch::BOTH {
        let e = find_phi_root(&m, branch)?;
        let slope = (e.value / alpha + norm).abs() / norm;
        let c = m.level(branch) - e.value;
        let constant = (alpha * alpha / (2.0 * c * c) * 2.0 * norm * norm - 1.0).abs();
        ok &= e.kind == RootKind::Root && slope <= 0.02 && constant <= 0.05;
        notes.push(format!(
            "{}: slope {slope:.2e}, constant {constant:.2e}",
            branch.symbol()
        ));
    }
    Ok(Verdict::new(ok, notes.join("; ")))
}

fn positivity(ctx: &Ctx) -> Result<Verdict, CliError> {
    let mut ok = true;
    let mut notes = Vec::new();
    for alpha in [100.0, 500.0] {
        let m = ctx.default_model(alpha)?;
        for branch in Branch::BOTH {
            let (z, _) = threshold_point(&m, branch)?;
            let margin = positivity_margin(&m, branch, z)?;
            ok &= margin >= -1e-8 * alpha;
            notes.push(format!("{alpha}{}: {margin:.3e}", branch.symbol()));
        }
    }
    Ok(Verdict::new(ok, format!("margins {}", notes.join(", "))))
}

fn monotonicity(ctx: &Ctx) -> Result<Verdict, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let mut ok = true;
    let mut worst_slope = f64::NEG_INFINITY;
    for alpha in [1.0, 10.0] {
        let m = ctx.default_model(alpha)?;
        for branch in Branch::BOTH {
            let zs: Vec<f64> = (0..5)
                .map(|_| m.level(branch) - 10f64.powf(rng.gen_range(-1.5..1.0)))
                .collect();
            for &z in &zs {
                for _ in 0..10 {
                    let probe: Vec<Complex64> = (0..m.len())
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect();
                    let norm: f64 = probe.iter().map(|v| v.norm_sqr()).sum();
                    let slope = pencil_slope_check(&m, branch, z, &probe)?;
                    worst_slope = worst_slope.max(slope / norm);
                    ok &= slope <= -norm * (1.0 - 1e-6);
                }
            }
            let mut sorted = zs.clone();
            sorted.sort_by(f64::total_cmp);
            for pair in sorted.windows(2) {
                let lo = hermitian_eigenvalues(&ctx.pencil(&m, branch, pair[0])?)?;
                let hi = hermitian_eigenvalues(&ctx.pencil(&m, branch, pair[1])?)?;
                ok &= hi
                    .iter()
                    .zip(&lo)
                    .all(|(h, l)| *h <= *l + 1e-10 * (1.0 + l.abs()));
            }
        }
    }
    Ok(Verdict::new(
        ok,
        format!("largest slope/‖φ‖² = {worst_slope:.6}"),
    ))
}

fn branch_logic(ctx: &Ctx) -> Result<Verdict, CliError> {
    let base = ctx.default_model(0.0)?;
    let ir = ir_diagnostics_of(&base);
    if ir.infrared_singular || !ir.small_alpha_threshold.is_finite() {
        return Ok(Verdict::new(
            false,
            "model has no finite small-coupling threshold",
        ));
    }
    let t = ir.small_alpha_threshold;
    let below = find_phi_root(&base.with_alpha(0.99 * t), Branch::Minus)?.kind;
    let above = find_phi_root(&base.with_alpha(1.01 * t), Branch::Minus)?.kind;
    Ok(Verdict::new(
        below == RootKind::Convention && above == RootKind::Root,
        format!(
            "threshold {t:.6}: 0.99x {}, 1.01x {}",
            below.as_str(),
            above.as_str()
        ),
    ))
}

fn toy_closed_forms(ctx: &Ctx) -> Result<Verdict, CliError> {
    // One node with ω = 1, w|λ|² = 4, α = ε = 1.
    let q = Quadrature::from_parts(1, vec![1.0], vec![4.0], 2.0)?;
    let m = DiscreteModel::from_values(1.0, 1.0, q, vec![1.0], vec![Complex64::new(1.0, 0.0)])?;
    let mut notes = Vec::new();
    let mut ok = true;
    let mut expect = |what: &str, got: f64, want: f64| {
        let good = (got - want).abs() <= 1e-12 * want.abs().max(1.0);
        ok &= good;
        if !good {
            notes.push(format!("{what}: {got} != {want}"));
        }
    };
    expect("Φ+(0)", eval_phi(&m, Branch::Plus, 0.0)?, -3.0);
    expect("E+", find_phi_root(&m, Branch::Plus)?.value, -2.0);
    expect(
        "E-",
        find_phi_root(&m, Branch::Minus)?.value,
        (1.0 - 17f64.sqrt()) / 2.0,
    );
    expect("Δ+(-2)", delta_values(&m, Branch::Plus, -2.0)?[0], 1.2);

    // The 3×3 block [[1,2,0],[2,0,2√2],[0,2√2,3]] has characteristic
    // polynomial -μ³ + 4μ² + 9μ - 20.
    let block = assemble_block(&m, Branch::Plus);
    let values = hermitian_eigenvalues(&block.matrix)?;
    for (k, &mu) in values.iter().enumerate() {
        let p = -mu * mu * mu + 4.0 * mu * mu + 9.0 * mu - 20.0;
        expect(
            &format!("charpoly at μ{k}"),
            p / (1.0 + mu.abs().powi(3)),
            0.0,
        );
    }
    let r = ctx.pencil(&m, Branch::Plus, -2.0)?;
    let pencil = count_negative_eigs(&r, band_tolerance(&r, EIG_REL_TOL))?;
    let direct = eig_below(&block, -2.0, EIG_REL_TOL)?;
    ok &= pencil.count == direct.count;
    let detail = if notes.is_empty() {
        format!("one-node forms exact; N(-2) = {}", direct.count)
    } else {
        notes.join("; ")
    };
    Ok(Verdict::new(ok, detail))
}

fn determinism_and_io(ctx: &Ctx) -> Result<Verdict, CliError> {
    let mut cfg = ctx.cfg.clone();
    cfg.sweep.steps = cfg.sweep.steps.min(7);
    let first = run_sweep(&cfg)?;
    let second = run_sweep(&cfg)?;
    let csv_same = rows_to_string(&first, crate::config::Format::Csv)?
        == rows_to_string(&second, crate::config::Format::Csv)?;
    let json = rows_to_string(&first, crate::config::Format::Json)?;
    let round_trip = crate::output::parse_rows(&json, crate::config::Format::Json)? == first;
    let codes = parse_config("{}").is_ok()
        && parse_config(r#"{"model":{"eps":-1}}"#)
            .map_err(|e| e.code())
            .err()
            == Some(2)
        && Outcome::VerificationFailed.code() == 1
        && Outcome::Success.code() == 0;
    Ok(Verdict::new(
        csv_same && round_trip && codes,
        format!("csv identical: {csv_same}, json round-trip: {round_trip}, exit codes: {codes}"),
    ))
}

pub fn verify(cfg: &RunConfig, opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    if cfg.uses_tables() {
        return Err(CliError::Config {
            field: "model.coupling.family".into(),
            message: "verify rebuilds grids of several sizes and needs analytic families".into(),
        });
    }
    if cfg.model.coupling.family == "none" {
        return Err(CliError::Refused(
            "verify needs a coupling that is not identically zero".into(),
        ));
    }
    let ctx = Ctx {
        cfg,
        tamper: opts.tamper_kernel,
    };
    let suite: &[(&'static str, Body)] = match opts.level {
        Level::Quick => &[
            ("elementary inequality", elementary_inequality),
            ("one-node closed forms", toy_closed_forms),
            ("inertia identity n<=4", inertia_quick),
            ("schur reproduction", schur_reproduction),
        ],
        Level::Full => &[
            ("1 elementary inequality", elementary_inequality),
            ("2 psi2 bounds", psi2_bounds),
            ("3 pointwise delta bound", pointwise_delta),
            ("4 rank-two structure", rank_two),
            ("5 inertia equivalence", inertia_full),
            ("6 schur reproduction", schur_reproduction),
            ("7 strong coupling", strong_coupling),
            ("8 asymptotics", asymptotics),
            ("9 positivity", positivity),
            ("10 pencil monotonicity", monotonicity),
            ("11 branch logic", branch_logic),
            ("12 determinism and io", determinism_and_io),
            ("one-node closed forms", toy_closed_forms),
        ],
    };
    Ok(VerifyReport {
        checks: suite
            .iter()
            .map(|&(name, body)| run(name, &ctx, body))
            .collect(),
    })
}
