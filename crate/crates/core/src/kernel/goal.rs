//! Goals and clauses are terms of meta-type o; this module reads them
//! structurally and builds the ones the rules need.

use crate::term::{normalize, Binder, Const, MetaType, Term, TermKind};

pub enum Goal<'a> {
    All(&'a Binder, &'a Term),
    Conj(&'a Term, &'a Term),
    /// `clause ==>> goal` and `goal <<== clause`
    Impl { clause: &'a Term, goal: &'a Term },
    Atom(Atom<'a>),
    Other,
}

pub enum Atom<'a> {
    Proves(&'a Term, &'a Term),
    HasType(&'a Term, &'a Term),
    Assump(&'a Term),
}

impl<'a> Goal<'a> {
    pub fn view(t: &'a Term) -> Goal<'a> {
        let (head, args) = t.spine();
        let name = match head.kind() {
            TermKind::Const(c) if c.stamp == 0 => &*c.name,
            _ => return Goal::Other,
        };
        match (name, args.as_slice()) {
            ("pi", [body]) => match body.kind() {
                TermKind::Lam(b, body) => Goal::All(b, body),
                _ => Goal::Other,
            },
            (",", [a, b]) => Goal::Conj(a, b),
            ("==>>", [cl, g]) => Goal::Impl { clause: cl, goal: g },
            ("<<==", [g, cl]) => Goal::Impl { clause: cl, goal: g },
            ("proves", [p, a]) => Goal::Atom(Atom::Proves(p, a)),
            ("hastype", [x, t]) => Goal::Atom(Atom::HasType(x, t)),
            ("assump", [g]) => Goal::Atom(Atom::Assump(g)),
            _ => Goal::Other,
        }
    }
}

fn c(name: &str, ty: MetaType) -> Term {
    Term::constant(Const::new(name, ty))
}

fn o2() -> MetaType {
    MetaType::arrows([MetaType::O, MetaType::O], MetaType::O)
}

pub fn proves(p: Term, a: Term) -> Term {
    let ty = MetaType::arrows([MetaType::PF, MetaType::TM], MetaType::O);
    Term::apps(c("proves", ty), [p, a])
}

pub fn hastype(x: Term, t: Term) -> Term {
    let ty = MetaType::arrows([MetaType::TM, MetaType::TP], MetaType::O);
    Term::apps(c("hastype", ty), [x, t])
}

pub fn assump(g: Term) -> Term {
    Term::app(c("assump", MetaType::arrow(MetaType::O, MetaType::O)), g)
}

pub fn conj(a: Term, b: Term) -> Term {
    Term::apps(c(",", o2()), [a, b])
}

/// `clause ==>> goal`
pub fn implies(clause: Term, goal: Term) -> Term {
    Term::apps(c("==>>", o2()), [clause, goal])
}

/// `pi x\ body`, where `body` refers to x as index 0.
pub fn pi(ty: MetaType, hint: &str, body: Term) -> Term {
    let pty = MetaType::arrow(MetaType::arrow(ty.clone(), MetaType::O), MetaType::O);
    Term::app(c("pi", pty), Term::lam(Binder::new(ty, Some(hint)), body))
}

pub fn form() -> Term {
    c("form", MetaType::TP)
}

pub fn arrow(a: Term, b: Term) -> Term {
    Term::apps(c("arrow", MetaType::arrows([MetaType::TP, MetaType::TP], MetaType::TP)), [a, b])
}

pub fn imp(a: Term, b: Term) -> Term {
    Term::apps(c("imp", MetaType::arrows([MetaType::TM, MetaType::TM], MetaType::TM)), [a, b])
}

pub fn eq(t: Term, a: Term, b: Term) -> Term {
    let ty = MetaType::arrows([MetaType::TP, MetaType::TM, MetaType::TM], MetaType::TM);
    Term::apps(c("eq", ty), [t, a, b])
}

pub fn forall(t: Term, body: Term) -> Term {
    let ty = MetaType::arrows(
        [MetaType::TP, MetaType::arrow(MetaType::TM, MetaType::TM)],
        MetaType::TM,
    );
    Term::apps(c("forall", ty), [t, body])
}

/// The clause grammar proofs may embed: `pi`, `,`, `<<==`, `==>>`,
/// `proves`, `hastype`, and `assump` around `proves` only.
pub fn valid_clause(g: &Term) -> bool {
    match Goal::view(g) {
        Goal::All(_, body) => valid_clause(body),
        Goal::Conj(a, b) => valid_clause(a) && valid_clause(b),
        Goal::Impl { clause, goal } => valid_clause(clause) && valid_clause(goal),
        Goal::Atom(Atom::Proves(..)) | Goal::Atom(Atom::HasType(..)) => true,
        Goal::Atom(Atom::Assump(inner)) => matches!(Goal::view(inner), Goal::Atom(Atom::Proves(..))),
        Goal::Other => false,
    }
}

/// Every head a clause can be resolved on must be a rigid atom; a
/// variable in head position could match anything.
pub fn heads_are_rigid(cl: &Term) -> bool {
    match Goal::view(cl) {
        Goal::All(_, body) => heads_are_rigid(body),
        Goal::Conj(a, b) => heads_are_rigid(a) && heads_are_rigid(b),
        Goal::Impl { goal, .. } => heads_are_rigid(goal),
        Goal::Atom(_) => true,
        Goal::Other => false,
    }
}

/// Put `hastype A form` in front of every `proves P A` in goal position.
pub fn with_type_checks(g: &Term) -> Term {
    match Goal::view(g) {
        Goal::All(b, body) => {
            let (head, _) = g.spine();
            Term::app(head.clone(), Term::lam(b.clone(), with_type_checks(body)))
        }
        Goal::Conj(a, b) => conj(with_type_checks(a), with_type_checks(b)),
        Goal::Impl { clause, goal } => {
            let (head, args) = g.spine();
            let checked = with_type_checks(goal);
            if head.head_name() == Some("==>>") {
                Term::apps(head.clone(), [args[0].clone(), checked])
            } else {
                Term::apps(head.clone(), [checked, clause.clone()])
            }
        }
        Goal::Atom(Atom::Proves(_, a)) => conj(hastype(a.clone(), form()), g.clone()),
        _ => g.clone(),
    }
}

/// The proofs `P` of the `proves P A` atoms in goal position, in order.
pub fn proofs(g: &Term) -> Vec<&Term> {
    let mut out = Vec::new();
    collect_proofs(g, &mut out);
    out
}

fn collect_proofs<'a>(g: &'a Term, out: &mut Vec<&'a Term>) {
    match Goal::view(g) {
        Goal::All(_, body) => collect_proofs(body, out),
        Goal::Conj(a, b) => {
            collect_proofs(a, out);
            collect_proofs(b, out);
        }
        Goal::Impl { goal, .. } => collect_proofs(goal, out),
        Goal::Atom(Atom::Proves(p, _)) => out.push(p),
        _ => {}
    }
}

/// The definitional-equality clause for `name` standing for `body` at
/// meta-type `ty`: one universal per argument, then `proves def (eq T (name
/// x..) (body x..))`. `None` unless the result meta-type is tm.
pub fn def_to_eqclause(result_tp: &Term, name: &Term, body: &Term, ty: &MetaType) -> Option<Term> {
    let (doms, base) = ty.uncurry();
    if base != crate::term::Base::Tm {
        return None;
    }
    let n = doms.len() as u32;
    let args = (0..n).map(|j| Term::bound(n - 1 - j));
    let lhs = Term::apps(name.clone(), args.clone());
    let rhs = Term::apps(body.clone(), args);
    let mut g = proves(c("def", MetaType::PF), eq(result_tp.clone(), lhs, rhs));
    for (j, d) in doms.iter().enumerate().rev() {
        g = pi((*d).clone(), &format!("x{}", j + 1), g);
    }
    Some(normalize(&g))
}
