//! Acceptance suite. Runs every criterion, prints one `PASS`/`FAIL` line
//! each and exits non-zero if any criterion fails.

use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entropy_axioms::catalog::identity_residuals;
use entropy_axioms::classifier::{classify, default_grid, sweep_all, Label, SweepPoint};
use entropy_axioms::engine::{
    check, check_with, run_suite, shannon_equivalence_probe, Execution, Instance, Verdict,
};
use entropy_axioms::simplex::{sample_with, uniform, Refinement};
use entropy_axioms::{AxiomId, CheckConfig, Dist, EntropySpec, Eq10Variant, Family, Status, Suite};

const TRIALS: usize = 10_000;
const TOL_EQ: f64 = 1e-9;
const TOL_VIOLATION: f64 = 1e-7;
const BIN: &str = env!("CARGO_BIN_EXE_entropy-axioms");

fn cfg() -> CheckConfig {
    CheckConfig {
        trials: TRIALS,
        tol_eq: TOL_EQ,
        tol_violation: TOL_VIOLATION,
        ..CheckConfig::default()
    }
}

type Criterion = (u32, &'static str, fn() -> Finding);

struct Finding {
    problems: Vec<String>,
    detail: String,
}

fn verdict(problems: Vec<String>, detail: String) -> Finding {
    Finding { problems, detail }
}

fn shannon_oracle(w: &[f64]) -> f64 {
    -w.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

fn renyi_oracle(w: &[f64], b: f64) -> f64 {
    w.iter().map(|x| x.powf(b)).sum::<f64>().ln() / (1.0 - b)
}

fn sweep() -> &'static [SweepPoint] {
    static SWEEP: OnceLock<Vec<SweepPoint>> = OnceLock::new();
    SWEEP.get_or_init(|| sweep_all(&cfg()))
}

fn spec(family: Family, b: f64) -> EntropySpec {
    EntropySpec::new(family, Some(b)).unwrap()
}

fn rewitness(v: &Verdict, cfg: &CheckConfig, problems: &mut Vec<String>) {
    let Some(w) = &v.witness else { return };
    match w.reverify(&v.spec, v.axiom, cfg) {
        Ok(o) if (o.margin - w.margin).abs() <= 1e-12 => {}
        Ok(o) => problems.push(format!(
            "{} {}: witness re-evaluates to {} not {}",
            v.spec, v.axiom, o.margin, w.margin
        )),
        Err(e) => problems.push(format!(
            "{} {}: witness re-evaluation failed: {e}",
            v.spec, v.axiom
        )),
    }
    // the serialized form must re-verify as well
    let json = serde_json::to_string(w).unwrap();
    let back: entropy_axioms::engine::Witness = serde_json::from_str(&json).unwrap();
    if back != *w {
        problems.push(format!(
            "{} {}: witness changed through JSON",
            v.spec, v.axiom
        ));
    }
}

fn criterion_1_gold_classification() -> Finding {
    let started = Instant::now();
    let out = Command::new(BIN)
        .args([
            "classify",
            "--all",
            "--format",
            "json",
            "--trials",
            "10000",
            "--tol-eq",
            "1e-9",
            "--tol-violation",
            "1e-7",
        ])
        .output()
        .unwrap();
    let elapsed = started.elapsed();
    let mut problems = Vec::new();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let summary = &report["payload"]["summary"];
    let families = summary["families"].as_object().unwrap();
    if families.len() != Family::ALL.len() {
        problems.push(format!(
            "{} families reported, expected {}",
            families.len(),
            Family::ALL.len()
        ));
    }
    let points = report["payload"]["points"].as_array().unwrap().len();
    for d in summary["disagreements"].as_array().unwrap() {
        problems.push(format!(
            "{}({}) labelled {} but claimed {}",
            d["spec"]["family"].as_str().unwrap(),
            d["spec"]["param"],
            d["label"].as_str().unwrap(),
            d["gold_label"].as_str().unwrap()
        ));
    }
    if out.status.code() != Some(if problems.is_empty() { 0 } else { 1 }) {
        problems.push(format!("unexpected exit status {:?}", out.status.code()));
    }
    if elapsed > Duration::from_secs(120) {
        problems.push(format!("runtime {elapsed:?} exceeds 2 minutes"));
    }
    verdict(
        problems,
        format!("{points} grid points in {:.1}s", elapsed.as_secs_f64()),
    )
}

fn criterion_2_positive_suites() -> Finding {
    let cfg = cfg();
    let mut problems = Vec::new();
    let mut runs = 0;
    let families = [
        EntropySpec::new(Family::Tsallis, Some(1.0)).unwrap(),
        EntropySpec::new(Family::Daroczy, Some(1.0)).unwrap(),
        EntropySpec::new(Family::HybridEq10, Some(1.0))
            .unwrap()
            .with_variant(Eq10Variant::Corrected)
            .unwrap(),
    ];
    for base in families {
        for b in [0.25, 0.5, 0.75, 1.5, 2.0, 3.0, 4.0] {
            let s = EntropySpec {
                param: Some(b),
                ..base
            };
            let suite = if b > 1.0 { Suite::Upper } else { Suite::Lower };
            let r = run_suite(&s, suite, &cfg).unwrap();
            runs += 1;
            if suite == Suite::Lower
                && !r
                    .entries
                    .iter()
                    .any(|e| e.verdict.axiom == AxiomId::LowerStrongSubadditivity)
            {
                problems.push(format!("{s}: lower suite lacks strong superadditivity"));
            }
            for e in &r.entries {
                let v = &e.verdict;
                if v.violations > 0 || v.status != Status::Consistent || v.trials_run < TRIALS {
                    problems.push(format!(
                        "{s} {suite} {}: {:?}, {} violations, max margin {:e}",
                        v.axiom, v.status, v.violations, v.max_margin
                    ));
                }
            }
            if !r.passed {
                problems.push(format!("{s}: {suite} suite failed"));
            }
        }
    }
    verdict(problems, format!("{runs} suites with corollaries"))
}

fn criterion_3_negative_witnesses() -> Finding {
    let cfg = cfg();
    let mut problems = Vec::new();

    // the seeded refinement, re-derived from closed-form Renyi values
    let (p, r, c) = ([0.9, 0.1], [0.45, 0.45, 0.1], [0.5, 0.5]);
    let seed_margin = (renyi_oracle(&r, 2.0) - renyi_oracle(&p, 2.0)) - 0.9 * renyi_oracle(&c, 2.0);
    if (seed_margin - 0.0572).abs() > 1e-4 {
        problems.push(format!("seed margin {seed_margin}"));
    }
    let renyi = spec(Family::Renyi, 2.0);
    let seed = Instance::Refinement(
        Refinement::new(Dist::new(p.to_vec()).unwrap(), 0, vec![0.45, 0.45]).unwrap(),
    );
    let o =
        entropy_axioms::engine::evaluate_instance(&renyi, AxiomId::UpperIncreasing, &seed, &cfg)
            .unwrap();
    if (o.margin - seed_margin).abs() > 1e-12 {
        problems.push(format!(
            "engine seed margin {} vs oracle {seed_margin}",
            o.margin
        ));
    }

    let v = check(&renyi, AxiomId::UpperIncreasing, &cfg).unwrap();
    let m = v.witness.as_ref().map_or(f64::NAN, |w| w.margin);
    if v.status != Status::Counterexample || m.is_nan() || m < 0.05 {
        problems.push(format!(
            "renyi(2) upper_increasing: {:?}, margin {m}",
            v.status
        ));
    }
    rewitness(&v, &cfg, &mut problems);

    let abe = spec(Family::Abe, 2.0);
    let mut witnesses = 1;
    for axiom in [AxiomId::UpperIncreasing, AxiomId::LowerIncreasing] {
        let v = check(&abe, axiom, &cfg).unwrap();
        if v.status != Status::Counterexample {
            problems.push(format!("abe(2) {axiom}: {:?}", v.status));
        }
        rewitness(&v, &cfg, &mut problems);
        witnesses += 1;
    }
    verdict(
        problems,
        format!(
            "renyi(2) margin {m:.6} (seed {seed_margin:.6}), {witnesses} witnesses re-verified"
        ),
    )
}

fn criterion_4_weak_classifications() -> Finding {
    let cfg = cfg();
    let mut problems = Vec::new();

    for b in [0.5, 2.0] {
        let s = spec(Family::Renyi, b);
        for axiom in [AxiomId::WeakSubadditivity, AxiomId::WeakSuperadditivity] {
            let v = check(&s, axiom, &cfg).unwrap();
            if v.status != Status::Consistent || v.max_abs_gap > 1e-10 {
                problems.push(format!(
                    "{s} {axiom}: {:?}, residual {:e}",
                    v.status, v.max_abs_gap
                ));
            }
        }
    }

    for (b, passing, failing) in [
        (2.0, Suite::WeakLower, AxiomId::WeakSubadditivity),
        (0.5, Suite::WeakUpper, AxiomId::WeakSuperadditivity),
    ] {
        let s = spec(Family::LandsbergVedral, b);
        if !run_suite(&s, passing, &cfg).unwrap().passed {
            problems.push(format!("{s}: {passing} suite failed"));
        }
        let v = check(&s, failing, &cfg).unwrap();
        if v.status != Status::Counterexample || v.witness.is_none() {
            problems.push(format!("{s} {failing}: {:?}, no witness", v.status));
        }
        rewitness(&v, &cfg, &mut problems);
    }

    let mut checked = 0;
    for family in [Family::PowerLogEq19, Family::WeightedLogEq20] {
        for b in default_grid(family).into_iter().filter(|&b| b != 1.0) {
            let rec = classify(&spec(family, b), &cfg).unwrap();
            checked += 1;
            if rec.agrees_with_paper != Some(true) {
                let mut failed: Vec<String> = rec
                    .verdicts()
                    .filter(|v| !v.advisory && !v.is_consistent())
                    .map(|v| v.axiom.to_string())
                    .collect();
                failed.sort();
                failed.dedup();
                problems.push(format!(
                    "{}: label {} vs claim {}, failing {}",
                    rec.spec,
                    rec.label,
                    rec.gold_label.map_or("-".into(), |c| c.to_string()),
                    failed.join(",")
                ));
            }
        }
    }
    verdict(
        problems,
        format!("renyi, landsberg_vedral and {checked} log-family points"),
    )
}

fn criterion_5_identities() -> Finding {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1de7);
    let mut problems = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let beta = loop {
            let b: f64 = rng.random_range(0.1..5.0);
            if (b - 1.0).abs() > 1e-3 {
                break b;
            }
        };
        let n = rng.random_range(2..=8);
        let m = rng.random_range(2..=8);
        let p = sample_with(n, &mut rng).unwrap();
        let q = sample_with(m, &mut rng).unwrap();
        let r = identity_residuals(beta, &p, &q).unwrap();
        for (name, x) in r.named() {
            worst = worst.max(x);
            if x.is_nan() || x > 1e-10 {
                problems.push(format!("{name} residual {x:e} at beta {beta}"));
            }
        }
    }
    problems.truncate(20);
    verdict(
        problems,
        format!("10^4 instances, worst residual {worst:e}"),
    )
}

fn criterion_6_shannon_consistency() -> Finding {
    let cfg = cfg();
    let mut problems = Vec::new();
    let sh = EntropySpec::shannon();
    for suite in [
        Suite::Upper,
        Suite::Lower,
        Suite::WeakUpper,
        Suite::WeakLower,
    ] {
        if !run_suite(&sh, suite, &cfg).unwrap().passed {
            problems.push(format!("shannon fails {suite}"));
        }
    }
    for k in [1.0, 3.0] {
        let s = sh.with_scale(k).unwrap();
        let v = shannon_equivalence_probe(&s, &cfg).unwrap();
        let c = v.constant.unwrap_or(f64::NAN);
        if !v.is_consistent() || (c - k).abs() > 1e-12 {
            problems.push(format!("probe at scale {k}: {:?}, constant {c}", v.status));
        }
    }
    let v = shannon_equivalence_probe(&spec(Family::Tsallis, 2.0), &cfg).unwrap();
    if v.is_consistent() {
        problems.push("probe passes for tsallis(2)".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=16);
        let p = sample_with(n, &mut rng).unwrap();
        let h = shannon_oracle(p.weights());
        for delta in [1e-10, -1e-10] {
            for (family, target) in [
                (Family::Tsallis, h),
                (Family::Renyi, h),
                (Family::Daroczy, h / std::f64::consts::LN_2),
                (Family::LandsbergVedral, h),
            ] {
                let got = spec(family, 1.0 + delta).eval(&p);
                worst = worst.max((got - target).abs());
                if (got - target).abs() > 1e-6 {
                    problems.push(format!("{family}(1{delta:+e}) = {got}, limit {target}"));
                }
            }
        }
    }
    problems.truncate(20);
    verdict(problems, format!("limit error {worst:e}"))
}

fn criterion_7_extremal_monotonicity() -> Finding {
    let mut problems = Vec::new();
    let mut checked = 0;
    for point in sweep() {
        let Some(rec) = &point.record else { continue };
        if !matches!(rec.label, Label::Upper | Label::Lower) {
            continue;
        }
        checked += 1;
        let values: Vec<f64> = (1..=64)
            .map(|n| rec.spec.eval(&uniform(n).unwrap()))
            .collect();
        for (n, w) in values.windows(2).enumerate() {
            if w[1] < w[0] - TOL_EQ {
                problems.push(format!(
                    "{}: H(u{}) = {} > H(u{}) = {}",
                    rec.spec,
                    n + 1,
                    w[0],
                    n + 2,
                    w[1]
                ));
            }
        }
    }
    if checked == 0 {
        problems.push("no upper or lower labelled family".into());
    }
    verdict(
        problems,
        format!("{checked} upper/lower specs over N = 1..64"),
    )
}

fn payload(args: &[&str]) -> (String, Option<i32>) {
    let out = Command::new(BIN).args(args).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    (
        serde_json::to_string(&v["payload"]).unwrap(),
        out.status.code(),
    )
}

fn criterion_8_determinism() -> Finding {
    let mut problems = Vec::new();
    let commands: [&[&str]; 2] = [
        &[
            "check", "--family", "renyi", "--param", "2", "--suite", "all", "--seed", "42",
            "--format", "json",
        ],
        &[
            "check",
            "--family",
            "abe",
            "--param",
            "0.5",
            "--axiom",
            "lower_increasing",
            "--seed",
            "7",
            "--format",
            "json",
        ],
    ];
    for cmd in commands {
        let (a, ea) = payload(cmd);
        let (b, eb) = payload(cmd);
        if a != b || ea != eb {
            problems.push(format!("payload differs between runs of {}", cmd.join(" ")));
        }
    }
    let cfg = CheckConfig { seed: 42, ..cfg() };
    for (s, axiom) in [
        (spec(Family::Renyi, 2.0), AxiomId::UpperStrongSubadditivity),
        (spec(Family::Abe, 2.0), AxiomId::LowerIncreasing),
        (spec(Family::Tsallis, 0.5), AxiomId::Maximum),
    ] {
        let seq = check_with(&s, axiom, &cfg, Execution::Sequential).unwrap();
        let par = check_with(&s, axiom, &cfg, Execution::Parallel).unwrap();
        if serde_json::to_string(&seq).unwrap() != serde_json::to_string(&par).unwrap() {
            problems.push(format!(
                "{s} {axiom}: sequential and parallel verdicts differ"
            ));
        }
    }
    verdict(
        problems,
        "repeated CLI runs and sequential/parallel agree".into(),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            1,
            "gold classification reproduction",
            criterion_1_gold_classification,
        ),
        (2, "positive suites", criterion_2_positive_suites),
        (
            3,
            "negative results with witnesses",
            criterion_3_negative_witnesses,
        ),
        (4, "weak classifications", criterion_4_weak_classifications),
        (5, "identity suite", criterion_5_identities),
        (6, "shannon consistency", criterion_6_shannon_consistency),
        (
            7,
            "extremal monotonicity",
            criterion_7_extremal_monotonicity,
        ),
        (8, "determinism", criterion_8_determinism),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        let f = run();
        if f.problems.is_empty() {
            println!("criterion {n} PASS  {name}: {}", f.detail);
        } else {
            failed += 1;
            println!(
                "criterion {n} FAIL  {name}: {}; {} problem(s)",
                f.detail,
                f.problems.len()
            );
            for p in &f.problems {
                println!("    {p}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
