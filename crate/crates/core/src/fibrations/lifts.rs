use serde::Serialize;

use crate::fincat::{FinCat, FunctorData, Mor, Ob};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LiftKind {
    Cartesian,
    Cocartesian,
}

impl LiftKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LiftKind::Cartesian => "cartesian",
            LiftKind::Cocartesian => "cocartesian",
        }
    }
}

/// Whether `m: x -> y` is `p`-cartesian: for every `w: z -> y` and
/// `h: p z -> p x` with `p(m) h = p(w)` there is exactly one `v: z -> x` over
/// `h` with `m v = w`.
pub fn is_cartesian(p: &FunctorData, m: Mor) -> bool {
    let (e, c) = (p.source(), p.target());
    let (x, y) = (e.source(m), e.target(m));
    let pm = p.mor(m);
    for z in e.objects() {
        let (pz, px) = (p.ob(z), p.ob(x));
        let mut seen = Vec::new();
        for &v in e.hom(z, x) {
            let key = (e.comp(m, v), p.mor(v));
            if seen.contains(&key) {
                return false;
            }
            seen.push(key);
        }
        let mut wanted = 0;
        for &w in e.hom(z, y) {
            for &h in c.hom(pz, px) {
                if c.comp(pm, h) == p.mor(w) {
                    wanted += 1;
                }
            }
        }
        if wanted != seen.len() {
            return false;
        }
    }
    true
}

/// Whether `m: x -> y` is `p`-cocartesian, dually.
pub fn is_cocartesian(p: &FunctorData, m: Mor) -> bool {
    let (e, c) = (p.source(), p.target());
    let (x, y) = (e.source(m), e.target(m));
    let pm = p.mor(m);
    for z in e.objects() {
        let (py, pz) = (p.ob(y), p.ob(z));
        let mut seen = Vec::new();
        for &v in e.hom(y, z) {
            let key = (e.comp(v, m), p.mor(v));
            if seen.contains(&key) {
                return false;
            }
            seen.push(key);
        }
        let mut wanted = 0;
        for &w in e.hom(x, z) {
            for &h in c.hom(py, pz) {
                if c.comp(h, pm) == p.mor(w) {
                    wanted += 1;
                }
            }
        }
        if wanted != seen.len() {
            return false;
        }
    }
    true
}

/// Cartesian and cocartesian flags for every morphism of the total category.
#[derive(Clone, Debug)]
pub struct LiftTable {
    pub cartesian: Vec<bool>,
    pub cocartesian: Vec<bool>,
}

impl LiftTable {
    pub fn new(p: &FunctorData) -> Self {
        let e = p.source();
        LiftTable {
            cartesian: e.morphisms().map(|m| is_cartesian(p, m)).collect(),
            cocartesian: e.morphisms().map(|m| is_cocartesian(p, m)).collect(),
        }
    }

    pub fn is(&self, kind: LiftKind, m: Mor) -> bool {
        match kind {
            LiftKind::Cartesian => self.cartesian[m.0],
            LiftKind::Cocartesian => self.cocartesian[m.0],
        }
    }
}

/// Lifts of `m` anchored at `at`: with target `at` for cartesian lifts, with
/// source `at` for cocartesian ones.
pub fn lifts_at(p: &FunctorData, m: Mor, at: Ob, kind: LiftKind) -> Vec<Mor> {
    let e = p.source();
    e.morphisms()
        .filter(|&n| p.mor(n) == m)
        .filter(|&n| match kind {
            LiftKind::Cartesian => e.target(n) == at,
            LiftKind::Cocartesian => e.source(n) == at,
        })
        .collect()
}

/// A lift used as a witness. The names are for display; the indices are
/// what [`FibrationReport::revalidate`] checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lift {
    pub kind: LiftKind,
    pub base: String,
    pub at: String,
    pub lift: String,
    #[serde(skip)]
    pub morphism: Mor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Counterexample {
    /// A base morphism and anchor object with the lifts that were found.
    Lift {
        morphism: String,
        at: String,
        lifts: Vec<String>,
    },
    /// A square `top: X' -> X`, `left: X' -> Y'`, `right: X -> Y`,
    /// `bottom: Y' -> Y` of the total category.
    Square {
        top: String,
        left: String,
        right: String,
        bottom: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub condition: String,
    pub holds: bool,
    pub witnesses: Vec<Lift>,
    pub counterexample: Option<Counterexample>,
    /// Number of instances examined.
    pub checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibrationReport {
    pub verdicts: Vec<Verdict>,
}

impl FibrationReport {
    pub fn holds(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn verdict(&self, condition: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.condition == condition)
    }

    /// Re-checks every witness lift from scratch.
    pub fn revalidate(&self, p: &FunctorData) -> bool {
        self.verdicts.iter().flat_map(|v| &v.witnesses).all(|w| match w.kind {
            LiftKind::Cartesian => is_cartesian(p, w.morphism),
            LiftKind::Cocartesian => is_cocartesian(p, w.morphism),
        })
    }
}

fn names(e: &FinCat, ms: &[Mor]) -> Vec<String> {
    ms.iter().map(|&m| e.morphism_name(m).to_owned()).collect()
}

/// Looks for a lift of each base morphism in `over` at each anchor. With
/// `unique` the lift set itself must be a singleton, otherwise some lift must
/// satisfy `table`.
pub(crate) fn lift_verdict(
    p: &FunctorData,
    table: &LiftTable,
    condition: &str,
    kind: LiftKind,
    over: impl Iterator<Item = Mor>,
    unique: bool,
) -> Verdict {
    let (e, c) = (p.source(), p.target());
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for m in over {
        let anchor = match kind {
            LiftKind::Cartesian => c.target(m),
            LiftKind::Cocartesian => c.source(m),
        };
        for at in e.objects().filter(|&o| p.ob(o) == anchor) {
            checked += 1;
            let all = lifts_at(p, m, at, kind);
            let chosen = if unique {
                (all.len() == 1).then(|| all[0])
            } else {
                all.iter().copied().find(|&n| table.is(kind, n))
            };
            match chosen {
                Some(n) => witnesses.push(Lift {
                    kind,
                    base: c.morphism_name(m).to_owned(),
                    at: e.object_name(at).to_owned(),
                    lift: e.morphism_name(n).to_owned(),
                    morphism: n,
                }),
                None => {
                    return Verdict {
                        condition: condition.to_owned(),
                        holds: false,
                        witnesses,
                        counterexample: Some(Counterexample::Lift {
                            morphism: c.morphism_name(m).to_owned(),
                            at: e.object_name(at).to_owned(),
                            lifts: names(e, &all),
                        }),
                        checked,
                    }
                }
            }
        }
    }
    Verdict {
        condition: condition.to_owned(),
        holds: true,
        witnesses,
        counterexample: None,
        checked,
    }
}

/// Cartesian, cocartesian, right discrete (unique lift with fixed target) and
/// left discrete (unique lift with fixed source) verdicts.
pub fn classify_fibration(p: &FunctorData) -> FibrationReport {
    let table = LiftTable::new(p);
    let c = p.target();
    FibrationReport {
        verdicts: vec![
            lift_verdict(p, &table, "cartesian", LiftKind::Cartesian, c.morphisms(), false),
            lift_verdict(p, &table, "cocartesian", LiftKind::Cocartesian, c.morphisms(), false),
            lift_verdict(p, &table, "right discrete", LiftKind::Cartesian, c.morphisms(), true),
            lift_verdict(p, &table, "left discrete", LiftKind::Cocartesian, c.morphisms(), true),
        ],
    }
}
