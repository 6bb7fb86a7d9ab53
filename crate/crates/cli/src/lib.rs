//! Task runner and report rendering behind the `spanforge` binary.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spanforge::catdsl::{Task, TaskKind, TaskTarget, Workspace};
use spanforge::fibrations::{
    check_adjointable, check_bc_fibration, expected_side, expected_triple, grothendieck, Variance,
};
use spanforge::spans::span_adjunction;
use spanforge::unfurl::{
    check_co_transports, check_duality, unfurl_co, unfurl_contravariant, unfurl_covariant, verify_extension,
    UnfurlError, UnfurlPackage,
};

pub mod fixtures;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            check: check.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskReport {
    pub file: String,
    pub task: String,
    pub kind: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub passed: bool,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn new(tasks: Vec<TaskReport>) -> Self {
        Report {
            passed: tasks.iter().all(|t| t.passed),
            tasks,
        }
    }

    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_structured(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One line per check, then one summary line per task.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            for c in &t.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                out.push_str(&format!("{mark} {}:{} {}", t.file, t.task, c.check));
                if !c.detail.is_empty() {
                    out.push_str(&format!(" ({})", c.detail));
                }
                out.push('\n');
            }
        }
        for t in &self.tasks {
            let mark = if t.passed { "certified" } else { "not certified" };
            out.push_str(&format!("{}:{} [{}] {mark}\n", t.file, t.task, t.kind));
        }
        out
    }
}

fn failed(what: &str, e: impl std::fmt::Display) -> Vec<Check> {
    vec![Check::new(what, false, e.to_string())]
}

fn package(
    ws: &Workspace,
    family: &str,
    marked: &spanforge::fincat::WideSubcat,
    kind: TaskKind,
) -> Result<UnfurlPackage, UnfurlError> {
    let fam = &ws.families[family];
    match kind {
        TaskKind::UnfurlCo => unfurl_co(fam, marked),
        TaskKind::UnfurlCon => unfurl_contravariant(fam, marked),
        TaskKind::UnfurlCov => unfurl_covariant(fam, marked),
        _ => match fam.variance() {
            Variance::Covariant => unfurl_covariant(fam, marked),
            Variance::Contravariant => unfurl_contravariant(fam, marked),
        },
    }
}

fn ledger(pkg: &UnfurlPackage) -> Vec<Check> {
    pkg.ledger
        .iter()
        .map(|e| Check::new(&e.check, e.passed, &e.detail))
        .collect()
}

fn extension(pkg: &UnfurlPackage) -> Vec<Check> {
    let r = match verify_extension(pkg) {
        Ok(r) => r,
        Err(e) => return failed("extension", e),
    };
    let mut out = Vec::new();
    if let Some(iso) = r.restriction_iso {
        out.push(Check::new(
            "restriction is E",
            iso,
            r.restriction_failure.clone().unwrap_or_default(),
        ));
    }
    for a in &r.adjunctions {
        out.push(Check::new(
            format!("backward transport along `{}` is right adjoint", a.morphism),
            a.triangles && a.matches_family,
            format!("triangles {}, matches family {}", a.triangles, a.matches_family),
        ));
    }
    out
}

fn unfurl_checks(ws: &Workspace, family: &str, marked: &spanforge::fincat::WideSubcat, kind: TaskKind) -> Vec<Check> {
    let pkg = match package(ws, family, marked, kind) {
        Ok(p) => p,
        Err(e) => return failed("package", e),
    };
    let mut out = ledger(&pkg);
    out.push(Check::new("certified", pkg.certified, ""));
    if kind == TaskKind::UnfurlCo {
        match check_duality(&pkg) {
            Ok(d) => out.push(Check::new(
                "dual construction agrees",
                d.agrees,
                format!(
                    "homwise {}, underlying {}",
                    d.homwise_left_fibrations, d.underlying_cocartesian
                ),
            )),
            Err(e) => out.extend(failed("dual construction agrees", e)),
        }
        match check_co_transports(&pkg) {
            Ok(r) => out.push(Check::new(
                "span transports",
                r.failures.is_empty(),
                format!("{} checked; {}", r.checked, r.failures.join("; "))
                    .trim_end_matches("; ")
                    .to_owned(),
            )),
            Err(e) => out.extend(failed("span transports", e)),
        }
    } else {
        out.extend(extension(&pkg));
    }
    out
}

fn family_checks(ws: &Workspace, kind: TaskKind, family: &str, marked: &spanforge::fincat::WideSubcat) -> Vec<Check> {
    let fam = &ws.families[family];
    match kind {
        TaskKind::UnfurlCov | TaskKind::UnfurlCon | TaskKind::UnfurlCo => unfurl_checks(ws, family, marked, kind),
        TaskKind::Adjointable => match check_adjointable(fam, marked, expected_side(fam.variance())) {
            Err(e) => failed("adjointable", e),
            Ok(r) => {
                let mut out: Vec<Check> = r
                    .adjoints
                    .iter()
                    .map(|a| Check::new(format!("adjoint for `{}`", a.morphism), a.exists, ""))
                    .collect();
                out.extend(r.squares.iter().map(|s| {
                    Check::new(
                        format!("mate of ({}, {}, {}, {})", s.h, s.k, s.f, s.g),
                        s.is_iso,
                        s.first_non_iso
                            .clone()
                            .map(|o| format!("not invertible at `{o}`"))
                            .unwrap_or_default(),
                    )
                }));
                out.push(Check::new("adjointable", r.holds, ""));
                out
            }
        },
        TaskKind::BcFibration => {
            let run = || -> Result<Vec<Check>, spanforge::fibrations::FibrationError> {
                let t = expected_triple(fam, marked)?;
                let g = grothendieck(fam)?;
                let r = check_bc_fibration(&g.projection, &t);
                let mut out: Vec<Check> = r
                    .verdicts
                    .iter()
                    .map(|v| {
                        let detail = match &v.counterexample {
                            Some(c) => format!("{} checked; counterexample {c:?}", v.checked),
                            None => format!("{} checked", v.checked),
                        };
                        Check::new(&v.condition, v.holds, detail)
                    })
                    .collect();
                out.push(Check::new("witnesses revalidate", r.revalidate(&g.projection), ""));
                Ok(out)
            };
            run().unwrap_or_else(|e| failed("bc-fibration", e))
        }
        TaskKind::OneCocartesian => match package(ws, family, marked, kind) {
            Err(e) => failed("package", e),
            Ok(pkg) => match &pkg.one_cocartesian {
                None => failed("one-cocartesian", "no report"),
                Some(r) => vec![
                    Check::new(
                        "homwise right fibrations",
                        r.homwise_right_fibrations,
                        r.homwise_counterexample.clone().unwrap_or_default(),
                    ),
                    Check::new("underlying cocartesian", r.underlying_cocartesian, ""),
                    Check::new(
                        "hom squares are pullbacks",
                        r.hom_squares,
                        r.hom_square_counterexample.clone().unwrap_or_default(),
                    ),
                    Check::new(
                        "two-step lifts cocartesian",
                        r.two_step_lifts_cocartesian,
                        format!("{} lifts", r.lifts_checked),
                    ),
                    Check::new(
                        "recognition consistent",
                        r.consistent,
                        format!("{} hom pairs", r.hom_pairs),
                    ),
                ],
            },
        },
        TaskKind::Universality => match package(ws, family, marked, kind) {
            Err(e) => failed("package", e),
            Ok(pkg) => extension(&pkg),
        },
        TaskKind::SpanAdjunction => unreachable!("span-adjunction targets a morphism"),
    }
}

pub fn run_task(ws: &Workspace, file: &str, task: &Task) -> TaskReport {
    let checks = match &task.target {
        TaskTarget::Family { family, marked } => family_checks(ws, task.kind, family, marked),
        TaskTarget::Morphism { triple, morphism } => {
            let t = &ws.triples[triple];
            match span_adjunction(t, *morphism) {
                Err(e) => failed("span adjunction", e),
                Ok(a) => {
                    let kp = t.carrier().object_name(a.kernel_pair);
                    vec![
                        Check::new("first triangle", a.first_triangle, format!("kernel pair `{kp}`")),
                        Check::new("second triangle", a.second_triangle, ""),
                    ]
                }
            }
        }
    };
    TaskReport {
        file: file.to_owned(),
        task: task.name.clone(),
        kind: task.kind.as_str().to_owned(),
        passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
        checks,
    }
}

/// Whether `task` is picked by `select`; an empty selection picks all.
pub fn selected(select: &[String], task: &Task) -> bool {
    select.is_empty() || select.iter().any(|s| *s == task.name || s == task.kind.as_str())
}

/// Runs the selected tasks of every workspace on `jobs` threads (0 for the
/// default). Results come back in file then task-name order.
pub fn run_all(workspaces: &[(String, Workspace)], select: &[String], jobs: usize) -> Report {
    let todo: Vec<(&str, &Workspace, &Task)> = workspaces
        .iter()
        .flat_map(|(f, ws)| {
            ws.tasks
                .values()
                .filter(|t| selected(select, t))
                .map(move |t| (f.as_str(), ws, t))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    let tasks = pool.install(|| todo.par_iter().map(|&(f, ws, t)| run_task(ws, f, t)).collect());
    Report::new(tasks)
}
