//! Check definitions. Each task computes one or more statuses; tasks share
//! only immutable inputs and can run in any order.

use std::sync::Arc;

use qkz_core::qdet::{check_pairing_qdet, compute_rho, ladder_product, qdet_vector_residual};
use qkz_core::qkz::{check_braiding_equivariance, flatness_pair, quasiclassical_limit, NablaFault};
use qkz_core::reps::{
    braid_residual, const_point, intertwiner_residual, mixed_ybe_residual, monoidality_residual, sample_words,
    translation_residual, unitarity_residual,
};
use qkz_core::rmatrix::{
    check_degeneration, crossing_form, qybe_residual, sample_values, screen_tuples, theta_squared_residual,
    unitarity_scalar,
};
use qkz_core::{
    ComoduleWord, Entry, FamilyKind, HSeries, LegMatrix, LegShape, Mode, NormalizedFamily, Point, QKZInstance, RMatrixFamily,
    Scalar, Status, Q,
};

use crate::config::{Fault, Suite};
use crate::report::Expect;

pub const QYBE_TUPLES: usize = 5;

pub mod anchor {
    pub const QYBE: &str = "quantum Yang-Baxter equation";
    pub const UNITARITY: &str = "unitarity up to a scalar";
    pub const DEGENERATION: &str = "trigonometric to rational degeneration";
    pub const CROSSING: &str = "crossing symmetry";
    pub const NORMALIZATION: &str = "normalizing function";
    pub const QDET: &str = "quantum determinant";
    pub const NORMALIZED: &str = "normalized R-matrix";
    pub const THETA: &str = "theta squared is the crossing shift";
    pub const PAIRING: &str = "quantum determinant of pairing products";
    pub const REPS: &str = "comodule R-matrices";
    pub const BRAID: &str = "braid relation";
    pub const FLATNESS: &str = "qKZ flatness";
    pub const EQUIVARIANCE: &str = "braiding equivariance of qKZ";
    pub const CLASSICAL: &str = "classical KZ limit";
}

type Check = Box<dyn Fn() -> qkz_core::Result<Vec<Status>> + Send + Sync>;

pub struct Task {
    pub records: Vec<(String, &'static str, Expect)>,
    pub run: Check,
}

impl Task {
    pub fn single(
        name: String,
        anchor: &'static str,
        expected: Expect,
        f: impl Fn() -> qkz_core::Result<Status> + Send + Sync + 'static,
    ) -> Task {
        Task { records: vec![(name, anchor, expected)], run: Box::new(move || Ok(vec![f()?])) }
    }

    fn exact(name: String, anchor: &'static str, f: impl Fn() -> qkz_core::Result<Status> + Send + Sync + 'static) -> Task {
        Task::single(name, anchor, Expect::ExactZero, f)
    }
}

/// `x - 1` as a status.
fn is_one(x: &Scalar) -> Status {
    Status::of_vector(&[x.sub(&x.one_like())])
}

fn point(c: Q, mode: Mode, d: usize) -> qkz_core::Result<Point> {
    const_point(&c, mode, d)
}

/// Three distinct base points that keep the family regular.
pub fn base_points(mode: Mode) -> [Q; 3] {
    let q = qkz_core::poly::qr;
    match mode {
        Mode::Additive => [q(0, 1), q(1, 1), q(5, 2)],
        Mode::Multiplicative => [q(1, 1), q(2, 1), q(7, 2)],
    }
}

fn word_label(w: &ComoduleWord) -> String {
    let s: Vec<String> = w.shifts().iter().map(HSeries::to_text).collect();
    format!("[{}]", s.join(", "))
}

/// QYBE, unitarity, degeneration and crossing of the bare family.
pub fn family_tasks(f: &Arc<RMatrixFamily>, suite: Suite, notes: &mut Vec<String>) -> qkz_core::Result<Vec<Task>> {
    let mut tasks = Vec::new();
    if suite.includes(Suite::Qybe) {
        let (used, replaced) = screen_tuples(f.matrix(), &sample_values(), QYBE_TUPLES)?;
        for (a, b) in replaced {
            notes.push(format!("sample tuple ({a}, {b}) hits a pole and was replaced"));
        }
        for t in used {
            let f = f.clone();
            let name = format!("qybe({}, {})", t.0, t.1);
            tasks.push(Task::exact(name, anchor::QYBE, move || Ok(Status::of(&qybe_residual(f.matrix(), &t)?))));
        }
        let g = f.clone();
        tasks.push(Task::exact("unitarity".into(), anchor::UNITARITY, move || unitarity_scalar(g.matrix()).map(|_| Status::ExactZero)));
        if f.kind() == FamilyKind::Trigonometric {
            let g = f.clone();
            tasks.push(Task::exact("degeneration".into(), anchor::DEGENERATION, move || {
                let rational = RMatrixFamily::build_rational(2, g.d())?;
                check_degeneration(g.matrix(), rational.matrix())
            }));
        }
    }
    if suite.includes(Suite::Crossing) {
        let f = f.clone();
        tasks.push(Task {
            records: vec![
                ("crossing-forms-agree".into(), anchor::CROSSING, Expect::ExactZero),
                ("crossing-proportional".into(), anchor::CROSSING, Expect::ExactZero),
                ("crossing-scalar-leading-grade".into(), anchor::CROSSING, Expect::ExactZero),
            ],
            run: Box::new(move || {
                let r = f.matrix();
                let x = crossing_form(r, 1)?;
                let agree = Status::of_difference(&x, &crossing_form(r, 2)?);
                let target = r.translate(&f.crossing_shift())?;
                let Some(k) = (0..target.nrows()).find(|&i| target.get(i, i).is_unit()) else {
                    return Ok(vec![agree, Status::FailsAtGrade(0), Status::FailsAtGrade(0)]);
                };
                let g = x.get(k, k).checked_div(target.get(k, k))?;
                let prop = Status::of_difference(&x, &target.scale(&g));
                let lead = if is_one(&g).grade() == Some(0) { Status::FailsAtGrade(0) } else { Status::ExactZero };
                Ok(vec![agree, prop, lead])
            }),
        });
    }
    Ok(tasks)
}

fn sign(p: &[usize]) -> Option<i64> {
    let mut seen = vec![false; p.len()];
    for &i in p {
        if i >= p.len() || std::mem::replace(&mut seen[i], true) {
            return None;
        }
    }
    let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// Quantum determinant, normalizing function and normalized identities.
pub fn normalize_tasks(nf: &Arc<NormalizedFamily>) -> Vec<Task> {
    let mut tasks = Vec::new();
    let f = nf.clone();
    tasks.push(Task::exact("qdet-vector".into(), anchor::QDET, move || qdet_vector_residual(f.base(), f.qdet())));
    if nf.base().kind() == FamilyKind::Rational {
        let f = nf.clone();
        tasks.push(Task::exact("qdet-sign-table".into(), anchor::QDET, move || {
            let (n, d, mode) = (f.n(), f.d(), f.mode());
            let shape = LegShape::uniform(n, n);
            let diffs: Vec<Scalar> = f
                .qdet()
                .coefficients()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let s = sign(&shape.unflatten(i)).unwrap_or(0);
                    c.sub(&Scalar::from_q(Q::from_integer(s.into()), d, mode))
                })
                .collect();
            Ok(Status::of_vector(&diffs))
        }));
    }
    let f = nf.clone();
    tasks.push(Task::exact("ladder-product".into(), anchor::NORMALIZATION, move || {
        let target = compute_rho(f.base().matrix(), f.qdet())?.inv()?;
        Ok(Status::of_vector(&[ladder_product(f.f0(), f.qdet().ladder())?.sub(&target)]))
    }));
    let f = nf.clone();
    tasks.push(Task::exact("rho-bar".into(), anchor::NORMALIZATION, move || Ok(is_one(&f.rho_bar()?))));
    let f = nf.clone();
    tasks.push(Task::exact("normalized-unitarity".into(), anchor::NORMALIZED, move || Ok(is_one(&unitarity_scalar(f.rbar())?))));
    let f = nf.clone();
    tasks.push(Task::exact("normalized-crossing".into(), anchor::NORMALIZED, move || {
        let x = crossing_form(f.rbar(), 1)?;
        let agree = Status::of_difference(&x, &crossing_form(f.rbar(), 2)?);
        Ok(agree.combine(Status::of_difference(&x, &f.rbar().translate(&f.base().crossing_shift())?)))
    }));
    let f = nf.clone();
    tasks.push(Task::exact("theta-squared".into(), anchor::THETA, move || theta_squared_residual(f.rbar(), &f.base().crossing_shift())));
    let q = qkz_core::poly::qr;
    let vs_for = |n: usize| -> Vec<Q> { [q(1, 1), q(-1, 3)][..n].to_vec() };
    for n in [1usize, 2] {
        let f = nf.clone();
        let vs = vs_for(n);
        tasks.push(Task::exact(format!("pairing-n{n}"), anchor::PAIRING, move || {
            let (d, mode) = (f.d(), f.mode());
            let pts = vs.iter().map(|v| point(v.clone(), mode, d)).collect::<qkz_core::Result<Vec<_>>>()?;
            check_pairing_qdet(f.qdet(), f.rbar(), &pts, &point(q(7, 5), mode, d)?)
        }));
    }
    let f = nf.clone();
    let vs = vs_for(2);
    tasks.push(Task::single("pairing-unnormalized-control".into(), anchor::PAIRING, Expect::Fails, move || {
        let (d, mode) = (f.d(), f.mode());
        let pts = vs.iter().map(|v| point(v.clone(), mode, d)).collect::<qkz_core::Result<Vec<_>>>()?;
        check_pairing_qdet(f.qdet(), f.base().matrix(), &pts, &point(q(7, 5), mode, d)?)
    }));
    tasks
}

/// Comodule R-matrices and braidings on words of total length at most 3.
pub fn reps_tasks(rbar: &Arc<LegMatrix<Scalar>>) -> Vec<Task> {
    let proto = rbar.proto();
    let (d, mode) = (proto.truncation(), proto.mode());
    let q = qkz_core::poly::qr;
    let words = sample_words(d);
    let mut tasks = Vec::new();
    for v in &words {
        for w in &words {
            if v.len() + w.len() > 3 {
                continue;
            }
            let label = format!("{}, {}", word_label(v), word_label(w));
            let (r, vv, ww) = (rbar.clone(), v.clone(), w.clone());
            tasks.push(Task::exact(format!("rvw-unitarity({label})"), anchor::REPS, move || unitarity_residual(&r, &vv, &ww)));
            let (r, vv, ww) = (rbar.clone(), v.clone(), w.clone());
            tasks.push(Task::exact(format!("monoidality({label})"), anchor::REPS, move || monoidality_residual(&r, &vv, &ww)));
            let (r, vv, ww) = (rbar.clone(), v.clone(), w.clone());
            tasks.push(Task::exact(format!("translation({label})"), anchor::REPS, move || {
                translation_residual(&r, &vv, &ww, &HSeries::h(d).scale(&q(3, 7)))
            }));
            let (r, vv, ww) = (rbar.clone(), v.clone(), w.clone());
            tasks.push(Task::exact(format!("intertwiner({label})"), anchor::REPS, move || {
                intertwiner_residual(&r, &vv, &ww, &point(q(-1, 3), mode, d)?)
            }));
        }
    }
    let singles: Vec<&ComoduleWord> = words.iter().filter(|w| w.len() == 1).collect();
    for a in &singles {
        for b in &singles {
            for c in &singles {
                let (r, ws) = (rbar.clone(), [(*a).clone(), (*b).clone(), (*c).clone()]);
                let name = format!("mixed-ybe({}, {}, {})", word_label(a), word_label(b), word_label(c));
                tasks.push(Task::exact(name, anchor::REPS, move || {
                    mixed_ybe_residual(&r, [&ws[0], &ws[1], &ws[2]], &(q(1, 2), q(-1, 3)))
                }));
            }
        }
    }
    let zs = base_points(mode);
    for (a, b) in [(0, 1), (1, 0)] {
        let r = rbar.clone();
        let ws = [singles[a].clone(), singles[b].clone(), singles[a].clone()];
        let zs = zs.clone();
        let name = format!("braid({}, {}, {})", word_label(&ws[0]), word_label(&ws[1]), word_label(&ws[2]));
        tasks.push(Task::exact(name, anchor::BRAID, move || {
            let start = [
                (ws[0].clone(), point(zs[0].clone(), mode, d)?),
                (ws[1].clone(), point(zs[1].clone(), mode, d)?),
                (ws[2].clone(), point(zs[2].clone(), mode, d)?),
            ];
            braid_residual(&r, &start)
        }));
    }
    tasks
}

fn nabla_fault(f: Option<Fault>) -> Option<NablaFault> {
    match f {
        Some(Fault::DropKappaShift) => Some(NablaFault::DropKappaShift),
        Some(Fault::ReversedArgument) => Some(NablaFault::ReversedArgument),
        _ => None,
    }
}

/// Flatness, equivariance and the classical limit for each instance.
pub fn qkz_tasks(instances: &[Arc<QKZInstance>], fault: Option<Fault>) -> Vec<Task> {
    let fault = nabla_fault(fault);
    let mut tasks = Vec::new();
    for (k, inst) in instances.iter().enumerate() {
        let n = inst.n_points();
        let tag = k + 1;
        for i in 0..n {
            for j in i + 1..n {
                let inst = inst.clone();
                let name = format!("flatness#{tag}({}, {})", i + 1, j + 1);
                tasks.push(Task::exact(name, anchor::FLATNESS, move || flatness_pair(&inst, i, j, fault)));
            }
        }
        for i in 0..n {
            let inst = inst.clone();
            let name = format!("equivariance#{tag}({})", i + 1);
            tasks.push(Task::exact(name, anchor::EQUIVARIANCE, move || check_braiding_equivariance(&inst, i)));
        }
        for i in 0..n {
            let inst = inst.clone();
            let name = format!("classical-limit#{tag}({})", i + 1);
            tasks.push(Task::exact(name, anchor::CLASSICAL, move || Ok(quasiclassical_limit(&inst, i)?.1)));
        }
    }
    tasks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        assert_eq!(sign(&[0, 1, 2]), Some(1));
        assert_eq!(sign(&[1, 0, 2]), Some(-1));
        assert_eq!(sign(&[1, 2, 0]), Some(1));
        assert_eq!(sign(&[0, 0, 1]), None);
    }

    #[test]
    fn family_tasks_run() {
        let f = Arc::new(RMatrixFamily::build_rational(2, 2).unwrap());
        let mut notes = Vec::new();
        let tasks = family_tasks(&f, Suite::All, &mut notes).unwrap();
        assert_eq!(tasks.iter().map(|t| t.records.len()).sum::<usize>(), QYBE_TUPLES + 1 + 3);
        for t in &tasks {
            assert!((t.run)().unwrap().iter().all(|s| s.is_zero()));
        }
    }
}
