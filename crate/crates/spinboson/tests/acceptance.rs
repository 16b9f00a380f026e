//! The twelve acceptance criteria, each at its pinned tolerance and runtime
//! budget. Prints one PASS/FAIL line per criterion and fails if any does.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinboson_core::linalg::{hermitian_eigenvalues, hermitian_singular_values, max_abs};
use spinboson_core::oracle::{evaluation_point, schur_complement};
use spinboson_core::pencil::{elementary_inequality_gap, kernel_psi2, pencil_slope_check};
use spinboson_core::{
    assemble_block, assemble_k1, assemble_k2, assemble_r, count_negative_eigs, count_pencil,
    delta_values, eig_below, find_phi_root, ir_diagnostics_of, positivity_margin, rank_two_matrix,
    Branch, Complex64, DiscreteModel, ModelSpec, RootKind, Rule,
};

const BAND: f64 = 1e-9;
const GUARD: f64 = 1e-8;

type Outcome = Result<String, String>;
/// Name, check, runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn model(n: usize, alpha: f64) -> DiscreteModel {
    let spec = ModelSpec::default().with_alpha(alpha);
    DiscreteModel::new(&spec, &spec.grid(n, 4.0, Rule::GaussLegendre).unwrap()).unwrap()
}

fn default_model(alpha: f64) -> DiscreteModel {
    model(32, alpha)
}

/// Threshold `E_{σε}(α)`, or the guarded point below `-ε` when the lower
/// threshold is conventional.
fn at_threshold(m: &DiscreteModel, branch: Branch) -> f64 {
    let e = find_phi_root(m, branch).unwrap();
    evaluation_point(m, &e, GUARD).0
}

fn require(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn elementary_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for _ in 0..100_000 {
        let a = rng.gen_range(0.0..=100.0);
        let b = rng.gen_range(0.0..=100.0);
        let c = 100.0 - rng.gen_range(0.0..100.0);
        let (lower, upper) = elementary_inequality_gap(a, b, c).unwrap();
        worst = worst.min(lower.min(upper) * c);
    }
    require(worst >= -1e-12, format!("smallest gap × c = {worst:.3e}"))
}

fn psi2_bounds() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [1.0, 10.0, 100.0] {
        let m = default_model(alpha);
        for branch in Branch::BOTH {
            let c = m.level(branch) - at_threshold(&m, branch);
            for &w1 in m.omega() {
                for &w2 in m.omega() {
                    let p = kernel_psi2(c, w1, w2).unwrap();
                    worst = worst.max(-p).max(p - (w1 * w2).sqrt() / (2.0 * c * c));
                }
            }
        }
    }
    require(worst <= 1e-12, format!("largest violation {worst:.3e}"))
}

fn pointwise_delta() -> Outcome {
    let mut worst = f64::INFINITY;
    for alpha in [1.0, 10.0, 100.0, 1000.0] {
        let m = default_model(alpha);
        for branch in Branch::BOTH {
            let d = delta_values(&m, branch, at_threshold(&m, branch)).unwrap();
            for (v, w) in d.iter().zip(m.omega()) {
                worst = worst.min(v - w);
            }
        }
    }
    require(worst >= -1e-10, format!("min(Δ - ω) = {worst:.3e}"))
}

fn rank_two() -> Outcome {
    let mut problems = Vec::new();
    for alpha in [5.0, 50.0, 500.0] {
        let m = default_model(alpha);
        for branch in Branch::BOTH {
            let z = at_threshold(&m, branch);
            let k1 = assemble_k1(&m, branch, z).unwrap();
            let s = hermitian_singular_values(&k1).unwrap();
            if s[2] > 1e-10 * s[0] {
                problems.push(format!("rank: σ3/σ1 = {:.2e}", s[2] / s[0]));
            }
            let mm = rank_two_matrix(&m, branch, z).unwrap();
            if !(mm.det() < 0.0 && mm.inertia() == (1, 1)) {
                problems.push(format!(
                    "α={alpha}: det {:.3e}, inertia {:?}",
                    mm.det(),
                    mm.inertia()
                ));
            }
            let neg = -(k1 * Complex64::new(alpha * alpha, 0.0));
            let tol = BAND * (1.0 + max_abs(&neg));
            let n = count_negative_eigs(&neg, tol).unwrap().count;
            if n != 1 {
                problems.push(format!("α={alpha}: N(-α²K1) = {n}"));
            }
        }
    }
    // det M ≤ 0 with equality on a single node.
    let one = model(1, 5.0);
    let mm = rank_two_matrix(&one, Branch::Plus, at_threshold(&one, Branch::Plus)).unwrap();
    if mm.det() > 1e-12 * mm.m11 * mm.m11 {
        problems.push(format!("one node: det {:.3e}", mm.det()));
    }
    require(
        problems.is_empty(),
        if problems.is_empty() {
            "rank 2, det < 0, N = 1".into()
        } else {
            problems.join("; ")
        },
    )
}

fn inertia_equivalence() -> Outcome {
    let mut problems = Vec::new();
    let mut cases = 0;
    for n in [4, 8, 16] {
        for alpha in [0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
            let m = model(n, alpha);
            for branch in Branch::BOTH {
                cases += 1;
                let z = at_threshold(&m, branch);
                let block = assemble_block(&m, branch);
                assert!(block.dim() <= 153);
                let direct = eig_below(&block, z, BAND).unwrap();
                let pencil = count_pencil(&m, branch, z, BAND).unwrap();
                if direct.count != pencil.count || direct.flagged + pencil.flagged > 0 {
                    problems.push(format!(
                        "n={n} α={alpha} {}: block {}/{} pencil {}/{}",
                        branch.symbol(),
                        direct.count,
                        direct.flagged,
                        pencil.count,
                        pencil.flagged
                    ));
                }
            }
        }
    }
    require(
        problems.is_empty(),
        if problems.is_empty() {
            format!("{cases} cases equal")
        } else {
            problems.join("; ")
        },
    )
}

fn schur_reproduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let m = model(8, rng.gen_range(0.1..20.0));
        let branch = Branch::BOTH[k % 2];
        let z = m.level(branch) - 10f64.powf(rng.gen_range(-2.0..1.5));
        let s = schur_complement(&assemble_block(&m, branch), z).unwrap();
        let r = assemble_r(&m, branch, z).unwrap().r;
        worst = worst.max(max_abs(&(&s - &r)) / max_abs(&r));
    }
    require(
        worst <= 1e-12,
        format!("largest relative defect {worst:.3e}"),
    )
}

fn strong_coupling() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for alpha in [50.0, 100.0, 500.0] {
        let mut counts = Vec::new();
        for n in [16, 32] {
            let m = model(n, alpha);
            let mut pair = [0; 2];
            for (slot, branch) in pair.iter_mut().zip(Branch::BOTH) {
                let c = count_pencil(&m, branch, at_threshold(&m, branch), BAND).unwrap();
                ok &= c.count <= 1 && c.flagged == 0;
                *slot = c.count;
            }
            ok &= pair[0] + pair[1] <= 2;
            counts.push(pair);
        }
        ok &= counts[0] == counts[1];
        notes.push(format!("α={alpha}: {:?}→{:?}", counts[0], counts[1]));
    }
    require(ok, notes.join(", "))
}

fn asymptotics() -> Outcome {
    let alpha = 1000.0;
    let m = default_model(alpha);
    let norm = m.lambda_norm();
    let mut ok = true;
    let mut notes = Vec::new();
    for branch in Branch::BOTH {
        let e = find_phi_root(&m, branch).unwrap();
        let slope = (e.value / alpha + norm).abs() / norm;
        let c = m.level(branch) - e.value;
        let constant = (alpha * alpha / (2.0 * c * c) * 2.0 * norm * norm - 1.0).abs();
        ok &= e.kind == RootKind::Root && slope <= 0.02 && constant <= 0.05;
        notes.push(format!("{}: {slope:.2e}, {constant:.2e}", branch.symbol()));
    }
    require(ok, notes.join("; "))
}

fn positivity() -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for alpha in [100.0, 500.0] {
        let m = default_model(alpha);
        for branch in Branch::BOTH {
            let margin = positivity_margin(&m, branch, at_threshold(&m, branch)).unwrap();
            ok &= margin >= -1e-8 * alpha;
            worst = worst.min(margin);
        }
    }
    require(ok, format!("smallest margin {worst:.3e}"))
}

fn pencil_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let m = default_model(3.0);
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for branch in Branch::BOTH {
        let mut zs: Vec<f64> = (0..5)
            .map(|_| m.level(branch) - 10f64.powf(rng.gen_range(-1.5..1.0)))
            .collect();
        for _ in 0..10 {
            let probe: Vec<Complex64> = (0..m.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm: f64 = probe.iter().map(|v| v.norm_sqr()).sum();
            for &z in &zs {
                let slope = pencil_slope_check(&m, branch, z, &probe).unwrap();
                worst = worst.max(slope / norm);
                ok &= slope <= -norm * (1.0 - 1e-6);
            }
        }
        zs.sort_by(f64::total_cmp);
        for w in zs.windows(2) {
            let lo = hermitian_eigenvalues(&assemble_r(&m, branch, w[0]).unwrap().r).unwrap();
            let hi = hermitian_eigenvalues(&assemble_r(&m, branch, w[1]).unwrap().r).unwrap();
            ok &= hi
                .iter()
                .zip(&lo)
                .all(|(h, l)| *h <= *l + 1e-12 * (1.0 + l.abs()));
        }
    }
    require(ok, format!("largest slope/‖φ‖² = {worst:.6}"))
}

fn branch_logic() -> Outcome {
    let m = default_model(0.0);
    let ir = ir_diagnostics_of(&m);
    let t = ir.small_alpha_threshold;
    let below = find_phi_root(&m.with_alpha(0.99 * t), Branch::Minus)
        .unwrap()
        .kind;
    let above = find_phi_root(&m.with_alpha(1.01 * t), Branch::Minus)
        .unwrap()
        .kind;
    require(
        !ir.infrared_singular && below == RootKind::Convention && above == RootKind::Root,
        format!("threshold {t:.9}: {} / {}", below.as_str(), above.as_str()),
    )
}

fn determinism_and_io() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let good = write(
        "good.json",
        r#"{"sweep":{"alpha_min":1,"alpha_max":1000,"steps":7}}"#,
    );
    let bad = write("bad.json", r#"{"model":{"eps":-1}}"#);
    // A single node cannot give det M < 0, so the full suite must fail.
    let weak = write("one-node.json", r#"{"grid":{"n":1,"r_max":1}}"#);
    let exe = env!("CARGO_BIN_EXE_spinboson");
    let run = |args: &[&str]| Command::new(exe).args(args).output().unwrap();
    let path = |p: &std::path::Path| p.to_str().unwrap().to_string();

    let a = run(&["sweep", "--config", &path(&good)]);
    let b = run(&["sweep", "--config", &path(&good)]);
    let identical = a.status.code() == Some(0) && !a.stdout.is_empty() && a.stdout == b.stdout;

    let j = run(&["sweep", "--config", &path(&good), "--format", "json"]);
    let rows: Vec<spinboson::SweepRow> = serde_json::from_slice(&j.stdout).unwrap();
    let round_trip =
        serde_json::from_str::<Vec<spinboson::SweepRow>>(&serde_json::to_string(&rows).unwrap())
            .unwrap()
            == rows
            && rows.len() == 7;

    let codes = [
        run(&["verify", "--config", &path(&good)]).status.code(),
        run(&["verify", "--config", &path(&weak), "--level", "full"])
            .status
            .code(),
        run(&["verify", "--config", &path(&bad)]).status.code(),
    ];
    let codes_ok = codes == [Some(0), Some(1), Some(2)];
    require(
        identical && round_trip && codes_ok,
        format!("csv identical {identical}, json round-trip {round_trip}, exit codes {codes:?}"),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("1 elementary inequality", elementary_inequality, 1),
        ("2 psi2 bounds", psi2_bounds, 1),
        ("3 pointwise delta bound", pointwise_delta, 1),
        ("4 rank-two structure", rank_two, 1),
        ("5 inertia equivalence", inertia_equivalence, 10),
        ("6 schur reproduction", schur_reproduction, 2),
        ("7 strong coupling", strong_coupling, 5),
        ("8 asymptotics", asymptotics, 1),
        ("9 positivity", positivity, 1),
        ("10 pencil monotonicity", pencil_monotonicity, 1),
        ("11 branch logic", branch_logic, 1),
        ("12 determinism and io", determinism_and_io, 2),
    ];
    let mut failed = Vec::new();
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (tag, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        println!(
            "criterion {name:<26} {tag} ({:.3} s) {detail}",
            elapsed.as_secs_f64()
        );
        if tag == "FAIL" {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn assembled_k2_respects_the_entrywise_bound() {
    let m = default_model(100.0);
    for branch in Branch::BOTH {
        let z = at_threshold(&m, branch);
        let c = m.level(branch) - z;
        let k2 = assemble_k2(&m, branch, z).unwrap();
        let (w, s) = (m.omega(), m.scaled_coupling());
        for i in 0..m.len() {
            for j in 0..m.len() {
                let bound = (s[i] * s[j]).norm() * (w[i] * w[j]).sqrt() / (2.0 * c * c);
                assert!(k2[(i, j)].norm() <= bound * (1.0 + 1e-12) + 1e-300);
            }
        }
    }
}
