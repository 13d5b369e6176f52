//! Goal-directed search in continuation-passing style. Every rule calls
//! its continuation on success; a continuation returning `Ok(true)` means
//! the whole query succeeded and search stops. Anything a rule adds to the
//! stores is taken back out before the rule returns, and while the
//! continuation runs when it is out of scope there.

use super::goal::{self, Atom, Goal};
use super::matching::match_pattern;
use super::store::{ClauseStore, MetaVarStore};
use super::{CheckReport, Config, KernelError, Stats, TraceLevel, Verdict};
use crate::term::{instantiate, normalize, Base, Const, MetaType, Term, TermKind};

type Res = Result<bool, KernelError>;
type Cont<'k> = &'k mut dyn FnMut(&mut Session) -> Res;

const SOLVER_STACK: usize = 512 << 20;

/// Proof constructors with a built-in rule. Any other proof head is
/// looked up in the clause store.
const PROOF_RULES: [&str; 15] = [
    "refl",
    "beta",
    "fstpair",
    "sndpair",
    "surjpair",
    "congr",
    "imp_i",
    "imp_e",
    "forall_i",
    "forall_e",
    "lemma_pf",
    "elam",
    "extract",
    "extractGoal",
    "def_pf",
];

/// A checking session: the clause store, the metavariable store and the
/// eigenvariable counter. Clauses added with [`Session::assert_clause`]
/// persist across checks.
pub struct Session {
    config: Config,
    store: ClauseStore,
    metas: MetaVarStore,
    stamp: u64,
    stats: Stats,
    /// Atomic goals currently being solved, outermost first.
    stack: Vec<Term>,
    deepest: Vec<Term>,
    reason: Option<String>,
    /// Clause heads matched so far; tells an exhausted lookup apart from
    /// one whose matches all failed later.
    matched: u64,
}

fn apply(f: &Term, x: &Term) -> Term {
    normalize(&Term::app(f.clone(), x.clone()))
}

fn lam_hint(t: &Term) -> Option<String> {
    match t.kind() {
        TermKind::Lam(b, _) => b.hint.as_deref().map(str::to_string),
        _ => None,
    }
}

/// The type parameter recorded on a polymorphic constructor: the domain
/// of its `n`th argument's leading arrow, or the `n`th argument itself.
fn instance(head: &Term, n: usize, of_arrow: bool) -> MetaType {
    let c = head.as_const().expect("rule head is a constant");
    let (doms, _) = c.ty.uncurry();
    let d = doms[n];
    if of_arrow {
        d.split_arrow().expect("instance argument is a function").0.clone()
    } else {
        d.clone()
    }
}

impl Session {
    pub fn new(config: Config) -> Session {
        Session {
            config,
            store: ClauseStore::default(),
            metas: MetaVarStore::default(),
            stamp: 0,
            stats: Stats::default(),
            stack: Vec::new(),
            deepest: Vec::new(),
            reason: None,
            matched: 0,
        }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn set_budget(&mut self, budget: u64) {
        self.config.budget = budget;
    }

    pub fn store_len(&self) -> usize {
        self.store.len()
    }

    pub fn metas_len(&self) -> usize {
        self.metas.len()
    }

    /// A new eigenvariable, younger than everything created before it.
    pub fn fresh_eigen(&mut self, ty: MetaType, hint: Option<&str>) -> Term {
        self.stamp += 1;
        self.stats.eigenvariables += 1;
        Term::constant(Const {
            name: hint.unwrap_or("x").into(),
            ty,
            stamp: self.stamp,
        })
    }

    /// Add a clause for the rest of the session.
    pub fn assert_clause(&mut self, clause: Term) -> Result<(), KernelError> {
        let clause = normalize(&clause);
        if !goal::heads_are_rigid(&clause) {
            return Err(KernelError::Validity(format!("clause has a non-atomic head: {}", clause)));
        }
        self.push(clause);
        Ok(())
    }

    /// Check a top-level statement: like [`Session::solve_goal`] after
    /// putting a `hastype A form` check in front of each `proves P A`.
    pub fn check(&mut self, goal: &Term) -> Result<CheckReport, KernelError> {
        self.solve_goal(&goal::with_type_checks(&normalize(goal)))
    }

    /// Solve a closed goal. Runs on a dedicated thread with a large stack,
    /// since search depth grows with proof size.
    pub fn solve_goal(&mut self, goal: &Term) -> Result<CheckReport, KernelError> {
        let goal = normalize(goal);
        std::thread::scope(|sc| {
            std::thread::Builder::new()
                .name("solver".into())
                .stack_size(SOLVER_STACK)
                .spawn_scoped(sc, || self.run(&goal))
                .expect("cannot start solver thread")
                .join()
                .unwrap_or_else(|p| std::panic::resume_unwind(p))
        })
    }

    fn run(&mut self, goal: &Term) -> Result<CheckReport, KernelError> {
        let (store0, metas0, mark0) = (self.store.len(), self.metas.len(), self.metas.mark());
        self.stats = Stats {
            max_store_depth: store0,
            ..Stats::default()
        };
        self.stack.clear();
        self.deepest.clear();
        self.reason = None;
        let r = self.solve(goal, &mut |_| Ok(true));
        let balanced = self.store.len() == store0 && self.metas.len() == metas0 && self.metas.mark() == mark0;
        if r.is_ok() {
            assert!(balanced, "stores not restored after solving");
        } else {
            self.metas.undo(mark0);
            self.metas.truncate(metas0);
            self.store.truncate(store0);
        }
        let verdict = if r? { Verdict::Success } else { Verdict::Failure };
        let mut report = CheckReport {
            verdict,
            stats: self.stats.clone(),
            trace: Vec::new(),
            failed_goal: None,
            reason: None,
        };
        if verdict == Verdict::Failure {
            report.failed_goal = self.deepest.last().map(|g| g.to_string());
            report.reason = self.reason.clone();
            if self.config.trace >= TraceLevel::Trace {
                report.trace = self.deepest.iter().map(|g| g.to_string()).collect();
            }
        }
        Ok(report)
    }

    fn tick(&mut self) -> Result<(), KernelError> {
        self.stats.steps += 1;
        if self.stats.steps > self.config.budget {
            return Err(KernelError::Resource(self.config.budget));
        }
        Ok(())
    }

    fn fail(&mut self, reason: impl FnOnce() -> String) -> Res {
        if self.stack.len() >= self.deepest.len() {
            self.deepest = self.stack.clone();
            self.reason = Some(reason());
        }
        Ok(false)
    }

    fn push(&mut self, clause: Term) {
        self.store.push(clause);
        self.stats.clauses_pushed += 1;
        self.stats.max_store_depth = self.stats.max_store_depth.max(self.store.len());
    }

    fn fresh_meta(&mut self, ty: MetaType) -> Term {
        self.stats.metavariables += 1;
        self.metas.fresh(ty, self.stamp)
    }

    fn solve(&mut self, g: &Term, k: Cont) -> Res {
        let g = self.metas.resolve(g, &[]);
        match Goal::view(&g) {
            Goal::All(b, body) => {
                let c = self.fresh_eigen(b.ty.clone(), b.hint.as_deref());
                self.solve(&instantiate(body, &c), k)
            }
            Goal::Conj(a, b) => self.solve(a, &mut |s| s.solve(b, k)),
            Goal::Impl { clause, goal } => self.with_clause(clause.clone(), goal, k),
            Goal::Atom(_) => self.atom(&g, k),
            Goal::Other => self.fail(|| format!("no rule for goal {}", g)),
        }
    }

    /// Solve `g` with `clause` in scope; the continuation runs without it.
    fn with_clause(&mut self, clause: Term, g: &Term, k: Cont) -> Res {
        let clause = self.metas.resolve(&clause, &[]);
        if !goal::heads_are_rigid(&clause) {
            return Err(KernelError::Validity(format!("clause has a non-atomic head: {}", clause)));
        }
        self.push(clause);
        let r = self.solve(g, &mut |s| {
            let e = s.store.pop();
            let r = k(s);
            s.store.restore(e);
            r
        });
        self.store.pop();
        r
    }

    fn atom(&mut self, g: &Term, k: Cont) -> Res {
        self.tick()?;
        self.stack.push(g.clone());
        let mut k = |s: &mut Session| {
            let top = s.stack.pop().expect("goal stack underflow");
            let r = k(s);
            s.stack.push(top);
            r
        };
        let r = match Goal::view(g) {
            Goal::Atom(Atom::Proves(p, a)) => self.proves(p, a, g, &mut k),
            Goal::Atom(Atom::HasType(x, t)) => self.hastype(x, t, g, &mut k),
            Goal::Atom(Atom::Assump(_)) => self.lookup(g, &mut k),
            _ => unreachable!("atom() called on a connective"),
        };
        self.stack.pop();
        r
    }

    fn proves(&mut self, p: &Term, a: &Term, g: &Term, k: Cont) -> Res {
        if a.has_metas() {
            return Err(KernelError::Pattern(format!(
                "formula to be proved is not ground: {}",
                a
            )));
        }
        let (head, args) = p.spine();
        let rule = match head.kind() {
            TermKind::Meta(_) => return self.fail(|| "unresolved metavariable in proof".into()),
            TermKind::Const(c) if c.stamp == 0 && PROOF_RULES.contains(&&*c.name) => c.name.clone(),
            _ => return self.lookup_proves(g, k),
        };
        let eq_sides = |a: &Term| a.head_args("eq").map(|v| (v[0].clone(), v[1].clone(), v[2].clone()));
        match (&*rule, args.as_slice()) {
            ("refl", []) => match eq_sides(a) {
                Some((_, x, y)) if x == y => k(self),
                _ => self.fail(|| "refl needs identical sides".into()),
            },
            ("beta", []) => {
                let ok = eq_sides(a).is_some_and(|(_, l, r)| {
                    l.head_args("app").is_some_and(|v| {
                        v[1].head_args("lam").is_some_and(|f| apply(f[0], v[2]) == r)
                    })
                });
                self.finish(ok, "not a beta instance", k)
            }
            ("fstpair", []) => {
                let ok = eq_sides(a).is_some_and(|(_, l, r)| {
                    l.head_args("fst")
                        .and_then(|v| v[1].head_args("mkpair").map(|m| m[0].clone()))
                        .is_some_and(|x| x == r)
                });
                self.finish(ok, "not a fstpair instance", k)
            }
            ("sndpair", []) => {
                let ok = eq_sides(a).is_some_and(|(_, l, r)| {
                    l.head_args("snd")
                        .and_then(|v| v[1].head_args("mkpair").map(|m| m[1].clone()))
                        .is_some_and(|y| y == r)
                });
                self.finish(ok, "not a sndpair instance", k)
            }
            ("surjpair", []) => {
                let ok = eq_sides(a).is_some_and(|(t, l, z)| surjpair_instance(&t, &l, &z));
                self.finish(ok, "not a surjpair instance", k)
            }
            ("congr", [t, x, z, h, p1, p2]) => {
                let hx = apply(h, x);
                if hx.has_metas() {
                    return self.fail(|| "unresolved metavariable in congr".into());
                }
                if &hx != a {
                    return self.fail(|| format!("congr proves {}", hx));
                }
                let body = goal::conj(
                    goal::hastype((*x).clone(), (*t).clone()),
                    goal::conj(
                        goal::hastype((*z).clone(), (*t).clone()),
                        goal::conj(
                            goal::proves((*p1).clone(), goal::eq((*t).clone(), (*x).clone(), (*z).clone())),
                            goal::proves((*p2).clone(), apply(h, z)),
                        ),
                    ),
                );
                self.solve(&body, k)
            }
            ("imp_i", [q]) => {
                let Some(v) = a.head_args("imp") else {
                    return self.fail(|| "imp_i needs an implication".into());
                };
                let (b1, b2) = (v[0].clone(), v[1].clone());
                let hyp = self.fresh_eigen(MetaType::PF, lam_hint(q).as_deref());
                let fact = goal::assump(goal::proves(hyp.clone(), b1));
                self.with_clause(fact, &goal::proves(apply(q, &hyp), b2), k)
            }
            ("imp_e", [b, q1, q2]) => {
                let body = goal::conj(
                    goal::hastype((*b).clone(), goal::form()),
                    goal::conj(
                        goal::proves((*q1).clone(), goal::imp((*b).clone(), a.clone())),
                        goal::proves((*q2).clone(), (*b).clone()),
                    ),
                );
                self.solve(&body, k)
            }
            ("forall_i", [q]) => {
                let Some(v) = a.head_args("forall") else {
                    return self.fail(|| "forall_i needs a universal".into());
                };
                let (t, body) = (v[0].clone(), v[1].clone());
                let y = self.fresh_eigen(MetaType::TM, lam_hint(q).as_deref());
                let fact = goal::hastype(y.clone(), t);
                self.with_clause(fact, &goal::proves(apply(q, &y), apply(&body, &y)), k)
            }
            ("forall_e", [t, f, q, x]) => {
                let fx = apply(f, x);
                if fx.has_metas() {
                    return self.fail(|| "unresolved metavariable in forall_e".into());
                }
                if &fx != a {
                    return self.fail(|| format!("forall_e proves {}", fx));
                }
                let (t, f, q, x) = ((*t).clone(), (*f).clone(), (*q).clone(), (*x).clone());
                let rest = goal::conj(
                    goal::hastype(x, t.clone()),
                    goal::proves(q, goal::forall(t.clone(), f.clone())),
                );
                self.under_hyp(&t, &f, &goal::form(), &mut |s| s.solve(&rest, k))
            }
            ("lemma_pf", [inference, proof, rest]) => {
                let ty = instance(head, 0, true);
                self.lemma(ty, inference, proof, rest, a, k)
            }
            ("def_pf", [tp, typeinf, body, rest]) => {
                let ty = instance(head, 1, true);
                self.definition(ty, tp, typeinf, body, rest, a, k)
            }
            ("elam", [q]) => {
                let ty = instance(head, 0, true);
                if !matches!(ty.base(), Some(Base::Tp | Base::Tm)) {
                    return Err(KernelError::Validity(format!(
                        "elam may only abstract over tp or tm, not {}",
                        ty
                    )));
                }
                let n = self.metas.len();
                let m = self.fresh_meta(ty);
                let r = self.solve(&goal::proves(apply(q, &m), a.clone()), k);
                self.metas.truncate(n);
                r
            }
            ("extract", [pat, q]) => {
                let mark = self.metas.mark();
                let r = match match_pattern(&mut self.metas, pat, a) {
                    Ok(true) => self.solve(&goal::proves((*q).clone(), a.clone()), k),
                    Ok(false) => {
                        let pat = (*pat).clone();
                        self.fail(|| format!("extract pattern {} does not match", pat))
                    }
                    Err(e) => Err(e),
                };
                self.metas.undo(mark);
                r
            }
            ("extractGoal", [g2, q]) => {
                let g2 = self.metas.resolve(g2, &[]);
                if !goal::valid_clause(&g2) {
                    return Err(KernelError::Validity(format!(
                        "extractGoal may not run {}",
                        g2
                    )));
                }
                let next = goal::proves((*q).clone(), a.clone());
                self.solve(&g2, &mut |s| s.solve(&next, k))
            }
            _ => self.fail(|| format!("malformed use of {}", rule)),
        }
    }

    fn finish(&mut self, ok: bool, why: &str, k: Cont) -> Res {
        if ok {
            k(self)
        } else {
            self.fail(|| why.to_string())
        }
    }

    /// `pi y\ (hastype y T ==>> hastype (F y) R)`
    fn under_hyp(&mut self, t: &Term, f: &Term, r: &Term, k: Cont) -> Res {
        let y = self.fresh_eigen(MetaType::TM, lam_hint(f).as_deref());
        let fact = goal::hastype(y.clone(), t.clone());
        self.with_clause(fact, &goal::hastype(apply(f, &y), r.clone()), k)
    }

    fn lemma(&mut self, ty: MetaType, inference: &Term, proof: &Term, rest: &Term, a: &Term, k: Cont) -> Res {
        let probe = self.fresh_eigen(ty.clone(), lam_hint(rest).as_deref());
        let template = apply(inference, &probe);
        if !goal::valid_clause(&template) {
            return Err(KernelError::Validity(format!("lemma statement is not a valid clause: {}", template)));
        }
        let own = apply(inference, proof);
        self.solve(&own, &mut |s| {
            let name = s.fresh_eigen(ty.clone(), lam_hint(rest).as_deref());
            let clause = apply(inference, &name);
            s.with_clause(clause, &goal::proves(apply(rest, &name), a.clone()), k)
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn definition(
        &mut self,
        ty: MetaType,
        tp: &Term,
        typeinf: &Term,
        body: &Term,
        rest: &Term,
        a: &Term,
        k: Cont,
    ) -> Res {
        let name = self.fresh_eigen(ty.clone(), lam_hint(rest).as_deref());
        let template = apply(typeinf, &name);
        if !goal::valid_clause(&template) {
            return Err(KernelError::Validity(format!(
                "definition typing clause is not valid: {}",
                template
            )));
        }
        let Some(eqclause) = goal::def_to_eqclause(tp, &name, body, &ty) else {
            return Err(KernelError::Validity(format!(
                "a definition must have result meta-type tm, not {}",
                ty
            )));
        };
        let own = apply(typeinf, body);
        let next = goal::implies(eqclause, goal::proves(apply(rest, &name), a.clone()));
        self.solve(&own, &mut |s| s.with_clause(template.clone(), &next, k))
    }

    fn hastype(&mut self, x: &Term, t: &Term, g: &Term, k: Cont) -> Res {
        if g.has_metas() {
            return self.fail(|| "unresolved metavariable in typing goal".into());
        }
        let (head, args) = x.spine();
        let name = match head.kind() {
            TermKind::Const(c) if c.stamp == 0 => c.name.clone(),
            _ => return self.lookup(g, k),
        };
        let is_form = t.head_name() == Some("form");
        let ht = |x: &Term, t: &Term| goal::hastype(x.clone(), t.clone());
        match (&*name, args.as_slice()) {
            ("eq", [ty, l, r]) if is_form => self.solve(&goal::conj(ht(l, ty), ht(r, ty)), k),
            ("imp", [l, r]) if is_form => {
                self.solve(&goal::conj(ht(l, &goal::form()), ht(r, &goal::form())), k)
            }
            ("forall", [ty, f]) if is_form => self.under_hyp(ty, f, &goal::form(), k),
            ("false", []) if is_form => k(self),
            ("eq" | "imp" | "forall" | "false", _) => self.fail(|| "formulas have type form".into()),
            ("lam", [f]) => match t.head_args("arrow") {
                Some(v) => {
                    let (t1, t2) = (v[0].clone(), v[1].clone());
                    self.under_hyp(&t1, f, &t2, k)
                }
                None => self.fail(|| "a lambda needs an arrow type".into()),
            },
            ("app", [t1, f, y]) => {
                let body = goal::conj(ht(f, &goal::arrow((*t1).clone(), t.clone())), ht(y, t1));
                self.solve(&body, k)
            }
            ("mkpair", [l, r]) => match t.head_args("pair") {
                Some(v) => {
                    let body = goal::conj(ht(l, v[0]), ht(r, v[1]));
                    self.solve(&body, k)
                }
                None => self.fail(|| "a pair needs a pair type".into()),
            },
            ("fst", [t2, p]) => {
                let pt = Term::apps(pair_ty(), [t.clone(), (*t2).clone()]);
                self.solve(&ht(p, &pt), k)
            }
            ("snd", [t1, p]) => {
                let pt = Term::apps(pair_ty(), [(*t1).clone(), t.clone()]);
                self.solve(&ht(p, &pt), k)
            }
            _ => self.lookup(g, k),
        }
    }

    fn lookup_proves(&mut self, g: &Term, k: Cont) -> Res {
        if g.has_metas() {
            return self.fail(|| "unresolved metavariable in proof".into());
        }
        // assumptions first, as the assumption rule precedes the others
        let hyp = goal::assump(g.clone());
        let before = self.matched;
        for i in 0..self.store.len() {
            let cl = self.store.nth_recent(i).expect("store index").clone();
            if self.backchain(&hyp, &cl, k)? {
                return Ok(true);
            }
        }
        self.lookup_from(g, before, k)
    }

    fn lookup(&mut self, g: &Term, k: Cont) -> Res {
        let before = self.matched;
        self.lookup_from(g, before, k)
    }

    fn lookup_from(&mut self, g: &Term, before: u64, k: Cont) -> Res {
        if g.has_metas() {
            return self.fail(|| "unresolved metavariable".into());
        }
        debug_assert!(
            g.head_args("proves")
                .and_then(|v| v[0].head_name().map(|n| !PROOF_RULES.contains(&n)))
                .unwrap_or(true),
            "builtin proof constructor fell through to the store"
        );
        for i in 0..self.store.len() {
            let cl = self.store.nth_recent(i).expect("store index").clone();
            if self.backchain(g, &cl, k)? {
                return Ok(true);
            }
        }
        if self.matched == before {
            self.fail(|| "no clause applies".into())
        } else {
            Ok(false)
        }
    }

    fn backchain(&mut self, g: &Term, cl: &Term, k: Cont) -> Res {
        self.tick()?;
        let cl = self.metas.resolve(cl, &[]);
        match Goal::view(&cl) {
            Goal::All(b, body) => {
                let n = self.metas.len();
                let m = self.fresh_meta(b.ty.clone());
                let r = self.backchain(g, &instantiate(body, &m), k);
                self.metas.truncate(n);
                r
            }
            Goal::Conj(l, r) => {
                if self.backchain(g, l, k)? {
                    return Ok(true);
                }
                self.backchain(g, r, k)
            }
            Goal::Impl { clause: body, goal: head } => self.backchain(g, head, &mut |s| s.solve(body, k)),
            Goal::Atom(_) => {
                if cl.head_name() != g.head_name() {
                    return Ok(false);
                }
                let mark = self.metas.mark();
                let r = match match_pattern(&mut self.metas, &cl, g) {
                    Ok(true) => {
                        self.matched += 1;
                        k(self)
                    }
                    Ok(false) => Ok(false),
                    Err(e) => Err(e),
                };
                self.metas.undo(mark);
                r
            }
            Goal::Other => Ok(false),
        }
    }
}

fn pair_ty() -> Term {
    Term::cnst("pair", MetaType::arrows([MetaType::TP, MetaType::TP], MetaType::TP))
}

/// `eq (pair T1 T2) (mkpair (fst T2 Z) (snd T1 Z)) Z`
fn surjpair_instance(t: &Term, l: &Term, z: &Term) -> bool {
    let (Some(pt), Some(m)) = (t.head_args("pair"), l.head_args("mkpair")) else {
        return false;
    };
    let (Some(f), Some(s)) = (m[0].head_args("fst"), m[1].head_args("snd")) else {
        return false;
    };
    f[0] == pt[1] && s[0] == pt[0] && f[1] == z && s[1] == z
}
