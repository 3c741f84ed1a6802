//! Acceptance criteria, one line per criterion. Every check is exact in the
//! truncated ring; each criterion also has a wall-clock budget.

use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qkz_cli::runner::run_config;
use qkz_cli::suites::reps_tasks;
use qkz_cli::{Report, RunConfig};
use qkz_core::poly::{q, qr};
use qkz_core::qdet::{check_pairing_qdet, compute_rho, ladder_product, normalize, qdet_vector_residual};
use qkz_core::qkz::{check_braiding_equivariance, check_flatness, classical_kz, quasiclassical_limit, NablaFault};
use qkz_core::rmatrix::{
    check_crossing, check_degeneration, check_qybe, crossing_form, sample_values, theta_squared_residual, unitarity_scalar,
};
use qkz_core::text::{scalar_matrix_from_text, scalar_matrix_to_text, ScalarMatrixText};
use qkz_core::{ComoduleWord, HSeries, LegMatrix, LegShape, Mode, Point, QKZInstance, RMatrixFamily, Scalar, Status, Q};

const D: usize = 4;

type Outcome = Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn exact(st: Status, what: &str) -> Outcome {
    ensure(st.is_zero(), || format!("{what}: {st}"))
}

fn core<T>(r: qkz_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn families() -> Result<Vec<(&'static str, RMatrixFamily)>, String> {
    Ok(vec![
        ("rational N=2", core(RMatrixFamily::build_rational(2, D))?),
        ("rational N=3", core(RMatrixFamily::build_rational(3, D))?),
        ("trigonometric", core(RMatrixFamily::build_trigonometric(D))?),
    ])
}

fn points(cs: &[Q], mode: Mode) -> Result<Vec<Point>, String> {
    cs.iter().map(|c| core(Point::constant(c.clone(), mode, D))).collect()
}

fn qybe() -> Outcome {
    for (name, f) in families()? {
        let c = core(check_qybe(f.matrix(), &sample_values(), 5))?;
        ensure(c.tuples.len() >= 5, || format!("{name}: only {} tuples", c.tuples.len()))?;
        exact(c.status(), name)?;
    }
    let bad = core(check_qybe(core(RMatrixFamily::build_rational(2, D))?.perturbed().matrix(), &sample_values(), 5))?;
    ensure(!bad.status().is_zero(), || "perturbed control passes".into())
}

fn crossing() -> Outcome {
    for (name, f) in families()? {
        let c = core(check_crossing(f.matrix(), &f.crossing_shift()))?;
        ensure(c.forms_agree, || format!("{name}: partial transpose forms differ"))?;
        ensure(c.g.grade(0).as_constant() == Some(q(1)), || format!("{name}: g has leading grade {:?}", c.g.grade(0)))?;
        let nf = core(normalize(&f))?;
        let c = core(check_crossing(nf.rbar(), &f.crossing_shift()))?;
        ensure(c.forms_agree && c.g.is_one(), || format!("{name}: normalized g = {:?}", c.g))?;
    }
    Ok(())
}

fn degeneration() -> Outcome {
    let trig = core(RMatrixFamily::build_trigonometric(D))?;
    let rat = core(RMatrixFamily::build_rational(2, D))?;
    exact(core(check_degeneration(trig.matrix(), rat.matrix()))?, "trigonometric limit")
}

fn sign(p: &[usize]) -> i64 {
    let inv = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    if inv % 2 == 0 { 1 } else { -1 }
}

fn qdet_pipeline() -> Outcome {
    for (name, f) in families()? {
        let nf = core(normalize(&f))?;
        let qd = nf.qdet();
        exact(core(qdet_vector_residual(&f, qd))?, &format!("{name}: qdet vector"))?;
        if name.starts_with("rational") {
            let n = f.n();
            let shape = LegShape::uniform(n, n);
            for (i, c) in qd.coefficients().iter().enumerate() {
                let idx = shape.unflatten(i);
                let mut sorted = idx.clone();
                sorted.sort();
                let want = if sorted == (0..n).collect::<Vec<_>>() { sign(&idx) } else { 0 };
                ensure(*c == Scalar::from_q(q(want), D, Mode::Additive), || format!("{name}: C{idx:?} = {c:?}"))?;
            }
        }
        let rho = core(compute_rho(f.matrix(), qd))?;
        let lp = core(ladder_product(nf.f0(), qd.ladder()))?;
        ensure(lp == core(rho.inv())?, || format!("{name}: ladder product of f0 is not 1/rho"))?;
        ensure(core(nf.rho_bar())?.is_one(), || format!("{name}: rho-bar is not 1"))?;
    }
    Ok(())
}

fn normalized_identities() -> Outcome {
    for (name, f) in families()? {
        let nf = core(normalize(&f))?;
        ensure(core(unitarity_scalar(nf.rbar()))?.is_one(), || format!("{name}: unitarity scalar is not 1"))?;
        exact(core(theta_squared_residual(nf.rbar(), &f.crossing_shift()))?, &format!("{name}: theta squared"))?;
        let x = core(crossing_form(nf.rbar(), 1))?;
        exact(Status::of_difference(&x, &core(crossing_form(nf.rbar(), 2))?), name)?;
    }
    Ok(())
}

fn pairing() -> Outcome {
    for (name, f) in families()? {
        let nf = core(normalize(&f))?;
        let mode = f.mode();
        let y = &points(&[qr(7, 5)], mode)?[0];
        for vs in [vec![q(1)], vec![q(1), qr(-1, 3)]] {
            let vs = points(&vs, mode)?;
            exact(core(check_pairing_qdet(nf.qdet(), nf.rbar(), &vs, y))?, &format!("{name}: n={}", vs.len()))?;
            let control = core(check_pairing_qdet(nf.qdet(), f.matrix(), &vs, y))?;
            ensure(!control.is_zero(), || format!("{name}: unnormalized control passes for n={}", vs.len()))?;
        }
    }
    Ok(())
}

fn representations() -> Outcome {
    for f in [core(RMatrixFamily::build_rational(2, D))?, core(RMatrixFamily::build_trigonometric(D))?] {
        let rbar = Arc::new(core(normalize(&f))?.rbar().clone());
        for t in reps_tasks(&rbar) {
            let st = core((t.run)())?;
            for ((name, _, _), s) in t.records.iter().zip(st) {
                exact(s, &format!("{} {name}", f.kind().name()))?;
            }
        }
    }
    Ok(())
}

fn instances(f: &RMatrixFamily) -> Result<Vec<QKZInstance>, String> {
    let rbar = core(normalize(f))?.rbar().clone();
    let mode = f.mode();
    let bases: [Vec<Q>; 3] = match mode {
        Mode::Additive => [vec![q(0), q(1)], vec![q(0), q(1), qr(5, 2)], vec![qr(1, 3), q(-2), qr(7, 4)]],
        Mode::Multiplicative => [vec![q(1), q(2)], vec![q(1), q(2), qr(7, 2)], vec![qr(-1, 3), q(3), qr(5, 4)]],
    };
    bases
        .iter()
        .map(|z| {
            let n = z.len();
            core(QKZInstance::new(rbar.clone(), points(z, mode)?, vec![ComoduleWord::basic(D); n], HSeries::from_int(1, D)))
        })
        .collect()
}

fn qkz_families() -> Result<Vec<RMatrixFamily>, String> {
    Ok(vec![core(RMatrixFamily::build_rational(2, D))?, core(RMatrixFamily::build_trigonometric(D))?])
}

fn flatness() -> Outcome {
    for f in qkz_families()? {
        let insts = instances(&f)?;
        for inst in &insts {
            let st = Status::all(core(check_flatness(inst, None))?.into_iter().map(|p| p.1));
            exact(st, &format!("{} n={}", f.kind().name(), inst.n_points()))?;
        }
        let faulty = Status::all(core(check_flatness(&insts[1], Some(NablaFault::ReversedArgument)))?.into_iter().map(|p| p.1));
        ensure(faulty.grade().is_some_and(|g| g <= 2), || format!("{}: fault control {faulty}", f.kind().name()))?;
    }
    Ok(())
}

fn equivariance() -> Outcome {
    for f in qkz_families()? {
        for inst in instances(&f)?.iter().filter(|i| i.n_points() == 3) {
            for i in 0..3 {
                exact(core(check_braiding_equivariance(inst, i))?, &format!("{} i={}", f.kind().name(), i + 1))?;
            }
        }
    }
    Ok(())
}

fn quasiclassical() -> Outcome {
    for f in qkz_families()? {
        for inst in instances(&f)? {
            for i in 0..inst.n_points() {
                let (g1, st) = core(quasiclassical_limit(&inst, i))?;
                exact(st, &format!("{} i={}", f.kind().name(), i + 1))?;
                ensure(g1 == core(classical_kz(&inst, i))?, || "grade one differs from the classical operator".into())?;
            }
        }
    }
    Ok(())
}

fn load(name: &str) -> Result<RunConfig, String> {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    RunConfig::load(&p).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let mut reports: Vec<String> = Vec::new();
    for jobs in [1, 4, 1] {
        let mut cfg = load("rational-n2.json")?;
        cfg.jobs = Some(jobs);
        let r = run_config(&cfg, None).map_err(|e| e.to_string())?;
        ensure(r.all_pass(), || format!("report with {jobs} jobs has failures"))?;
        let back: Report = serde_json::from_str(&r.to_json()).map_err(|e| e.to_string())?;
        ensure(back == r, || "report does not round-trip".into())?;
        reports.push(r.without_timing().to_json());
    }
    ensure(reports.windows(2).all(|w| w[0] == w[1]), || "reports differ across runs".into())?;
    for name in ["rational-n2.json", "qkz-rational.json", "qkz-trigonometric.json", "perturbed-r.json", "reversed-argument.json"] {
        let cfg = load(name)?;
        ensure(RunConfig::from_json(&cfg.to_json()).ok() == Some(cfg.clone()), || format!("{name} does not round-trip"))?;
        ensure(RunConfig::from_json(&cfg.to_json()).map(|c| c.to_json()).ok() == Some(cfg.to_json()), || format!("{name} text differs"))?;
    }
    for (name, f) in families()? {
        let text = core(scalar_matrix_to_text(f.matrix()))?;
        let json = serde_json::to_string(&text).map_err(|e| e.to_string())?;
        let back: ScalarMatrixText = serde_json::from_str(&json).map_err(|e| e.to_string())?;
        let m: LegMatrix<Scalar> = core(scalar_matrix_from_text(&back, f.mode()))?;
        ensure(m == *f.matrix(), || format!("{name}: R does not round-trip"))?;
        let nf = core(normalize(&f))?;
        let again = qkz_cli::cache::decode(&qkz_cli::cache::encode(&nf), &f)?;
        ensure(again == nf && qkz_cli::cache::encode(&again) == qkz_cli::cache::encode(&nf), || format!("{name}: cache entry does not round-trip"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("QYBE", 30, qybe),
        ("crossing", 10, crossing),
        ("degeneration", 10, degeneration),
        ("qdet pipeline", 60, qdet_pipeline),
        ("normalized identities", 10, normalized_identities),
        ("pairing/qdet", 10, pairing),
        ("representations", 60, representations),
        ("qKZ flatness", 120, flatness),
        ("braiding equivariance", 60, equivariance),
        ("quasiclassical limit", 10, quasiclassical),
        ("determinism and round-trip", 120, determinism),
    ];
    let mut failed = 0;
    for (k, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(took <= Duration::from_secs(*budget), || format!("took {:.1}s, budget {budget}s", took.as_secs_f64()))
        });
        match outcome {
            Ok(()) => println!("criterion {:>2} {name}: PASS ({:.2}s)", k + 1, took.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({:.2}s) {e}", k + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
