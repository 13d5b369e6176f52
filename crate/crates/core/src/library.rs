//! Named lemmas and definitions: loading, checking in file order, and
//! packaging a proof together with everything it uses.

use crate::kernel::{self, goal, CheckReport, KernelError, Session};
use crate::syntax::{Pos, SourceFile, Statement};
use crate::term::{normalize, type_of, Binder, Const, MetaType, Term, TermKind};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Clone, Debug)]
pub enum Entry {
    /// `def_lemma Name Inference Proof`
    Lemma {
        name: Const,
        inference: Term,
        proof: Term,
    },
    /// `def_definition ResultTp Name TypeInf Body`
    Definition {
        name: Const,
        result_tp: Term,
        typeinf: Term,
        body: Term,
    },
}

impl Entry {
    pub fn name(&self) -> &Const {
        match self {
            Entry::Lemma { name, .. } | Entry::Definition { name, .. } => name,
        }
    }

    pub fn is_definition(&self) -> bool {
        matches!(self, Entry::Definition { .. })
    }

    /// The terms whose constants the entry depends on.
    fn parts(&self) -> Vec<&Term> {
        match self {
            Entry::Lemma { inference, proof, .. } => vec![inference, proof],
            Entry::Definition {
                result_tp,
                typeinf,
                body,
                ..
            } => vec![result_tp, typeinf, body],
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.parts().iter().any(|t| t.mentions_const(name))
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LibraryError {
    #[error("{0}: `{1}` is already in the library")]
    Duplicate(Pos, String),
    #[error("{pos}: `{name}` is declared as {declared} but its template has meta-type {found}")]
    TypeMismatch {
        pos: Pos,
        name: String,
        declared: MetaType,
        found: String,
    },
    #[error("{0}: a library may contain only declarations, def_lemma and def_definition")]
    NotAnEntry(Pos),
    #[error("`{0}` is not a checked library entry")]
    Unknown(String),
    #[error("the formula mentions library definition `{0}`, which a packaged proof cannot bind")]
    Escapes(String),
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    entries: Vec<Entry>,
    positions: Vec<Pos>,
    checked: Vec<bool>,
}

impl Registry {
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.index(name).map(|i| &self.entries[i])
    }

    pub fn position(&self, name: &str) -> Option<Pos> {
        self.index(name).map(|i| self.positions[i])
    }

    pub fn is_checked(&self, name: &str) -> bool {
        self.index(name).is_some_and(|i| self.checked[i])
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| &*e.name().name == name)
    }

    /// Append an entry after the existing ones.
    pub fn add(&mut self, entry: Entry, pos: Pos) -> Result<(), LibraryError> {
        let name = entry.name().name.to_string();
        if self.index(&name).is_some() {
            return Err(LibraryError::Duplicate(pos, name));
        }
        let declared = &entry.name().ty;
        let inferred = match &entry {
            Entry::Lemma { inference, proof, .. } => {
                let want = MetaType::arrow(declared.clone(), MetaType::O);
                (type_of(inference, &[]).as_ref() == Some(&want)).then_some(()).and(type_of(proof, &[]))
            }
            Entry::Definition { typeinf, body, .. } => {
                let want = MetaType::arrow(declared.clone(), MetaType::O);
                (type_of(typeinf, &[]).as_ref() == Some(&want)).then_some(()).and(type_of(body, &[]))
            }
        };
        if inferred.as_ref() != Some(declared) {
            return Err(LibraryError::TypeMismatch {
                pos,
                name,
                declared: declared.clone(),
                found: inferred.map_or("(ill-typed)".into(), |t| t.to_string()),
            });
        }
        self.entries.push(entry);
        self.positions.push(pos);
        self.checked.push(false);
        Ok(())
    }

    /// Append every entry of another registry, keeping its check flags.
    pub fn extend(&mut self, other: Registry) -> Result<(), LibraryError> {
        for ((e, p), c) in other.entries.into_iter().zip(other.positions).zip(other.checked) {
            self.add(e, p)?;
            *self.checked.last_mut().unwrap() = c;
        }
        Ok(())
    }
}

/// Convert a statement into a registry entry, if it is one.
pub fn entry_of(s: &Statement) -> Option<Entry> {
    match s {
        Statement::DefLemma {
            name,
            inference,
            proof,
        } => Some(Entry::Lemma {
            name: name.clone(),
            inference: inference.clone(),
            proof: proof.clone(),
        }),
        Statement::DefDefinition {
            result_tp,
            name,
            typeinf,
            body,
        } => Some(Entry::Definition {
            name: name.clone(),
            result_tp: result_tp.clone(),
            typeinf: typeinf.clone(),
            body: body.clone(),
        }),
        _ => None,
    }
}

/// The entries of a library file, in file order. Names must be declared
/// before use, which the parser already enforces.
pub fn load_library(file: &SourceFile) -> Result<Registry, LibraryError> {
    let mut reg = Registry::default();
    for (s, pos) in file.statements.iter().zip(&file.positions) {
        match s {
            Statement::TypeDecl { .. } | Statement::InfixDecl { .. } => {}
            Statement::Solve { .. } => return Err(LibraryError::NotAnEntry(*pos)),
            _ => reg.add(entry_of(s).expect("library statement"), *pos)?,
        }
    }
    Ok(reg)
}

#[derive(Debug)]
pub struct EntryOutcome {
    pub name: String,
    pub pos: Pos,
    pub result: Result<CheckReport, KernelError>,
    /// Set when a failing entry uses a name stored only after it.
    pub note: Option<String>,
}

impl EntryOutcome {
    pub fn success(&self) -> bool {
        matches!(&self.result, Ok(r) if r.success())
    }
}

/// Check the unchecked entries in order, storing each one's clauses in
/// `session` once it passes. Stops at the first entry that does not.
pub fn check_library(reg: &mut Registry, session: &mut Session) -> Vec<EntryOutcome> {
    let mut out = Vec::new();
    for i in 0..reg.entries.len() {
        if reg.checked[i] {
            continue;
        }
        let entry = reg.entries[i].clone();
        let result = admit(&entry, session);
        let mut o = EntryOutcome {
            name: entry.name().name.to_string(),
            pos: reg.positions[i],
            result,
            note: None,
        };
        let ok = o.success();
        if !ok {
            o.note = reg.entries[i + 1..]
                .iter()
                .map(|later| later.name().name.to_string())
                .find(|n| entry.mentions(n))
                .map(|n| format!("it uses `{}`, which is stored only later in the library", n));
        }
        reg.checked[i] = ok;
        out.push(o);
        if !ok {
            break;
        }
    }
    out
}

/// Store the clauses of already checked entries without re-checking them.
pub fn install(reg: &Registry, session: &mut Session) -> Result<(), KernelError> {
    for (e, _) in reg.entries.iter().zip(&reg.checked).filter(|(_, c)| **c) {
        let name = Term::constant(e.name().clone());
        match e {
            Entry::Lemma { inference, .. } => session.assert_clause(apply(inference, &name))?,
            Entry::Definition {
                result_tp,
                typeinf,
                body,
                ..
            } => {
                session.assert_clause(apply(typeinf, &name))?;
                let eq = kernel::def_to_eqclause(result_tp, &name, body, &e.name().ty)
                    .expect("checked definitions have a clause");
                session.assert_clause(eq)?;
            }
        }
    }
    Ok(())
}

fn apply(f: &Term, x: &Term) -> Term {
    normalize(&Term::app(f.clone(), x.clone()))
}

/// Check one entry and, if it passes, store its clauses.
pub fn admit(entry: &Entry, session: &mut Session) -> Result<CheckReport, KernelError> {
    let name = Term::constant(entry.name().clone());
    let ty = entry.name().ty.clone();
    match entry {
        Entry::Lemma { inference, proof, .. } => {
            let probe = session.fresh_eigen(ty, None);
            if !goal::valid_clause(&apply(inference, &probe)) {
                return Err(KernelError::Validity(format!(
                    "lemma statement for `{}` is not a valid clause",
                    entry.name().name
                )));
            }
            let report = session.solve_goal(&apply(inference, proof))?;
            if report.success() {
                session.assert_clause(apply(inference, &name))?;
            }
            Ok(report)
        }
        Entry::Definition {
            result_tp,
            typeinf,
            body,
            ..
        } => {
            let probe = session.fresh_eigen(ty.clone(), None);
            if !goal::valid_clause(&apply(typeinf, &probe)) {
                return Err(KernelError::Validity(format!(
                    "typing clause for `{}` is not a valid clause",
                    entry.name().name
                )));
            }
            let eqclause = kernel::def_to_eqclause(result_tp, &name, body, &ty).ok_or_else(|| {
                KernelError::Validity(format!("a definition must have result meta-type tm, not {}", ty))
            })?;
            let report = session.solve_goal(&apply(typeinf, body))?;
            if report.success() {
                session.assert_clause(apply(typeinf, &name))?;
                session.assert_clause(eqclause)?;
            }
            Ok(report)
        }
    }
}

/// Registry names used by `t`, and transitively by the entries they name,
/// in registry order.
pub fn dependencies(terms: &[&Term], reg: &Registry) -> Vec<usize> {
    let mut seen = HashSet::new();
    let mut todo: Vec<usize> = Vec::new();
    let scan = |t: &Term, todo: &mut Vec<usize>, seen: &mut HashSet<usize>| {
        t.for_each_const(&mut |c| {
            if c.stamp == 0 {
                if let Some(i) = reg.index(&c.name) {
                    if seen.insert(i) {
                        todo.push(i);
                    }
                }
            }
        })
    };
    for t in terms {
        scan(t, &mut todo, &mut seen);
    }
    while let Some(i) = todo.pop() {
        for t in reg.entries[i].parts() {
            scan(t, &mut todo, &mut seen);
        }
    }
    let mut v: Vec<usize> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

/// Replace every occurrence of constant `c` by a new loose index 0,
/// shifting the existing loose indices up by one.
fn abstract_const(t: &Term, c: &Const, depth: u32) -> Term {
    match t.kind() {
        TermKind::Const(d) if d.same(c) => Term::bound(depth),
        TermKind::Bound(i) if *i >= depth => Term::bound(i + 1),
        TermKind::App(f, a) => Term::app(abstract_const(f, c, depth), abstract_const(a, c, depth)),
        TermKind::Lam(b, body) => Term::lam(b.clone(), abstract_const(body, c, depth + 1)),
        _ => t.clone(),
    }
}

/// Wrap `proof` in `lemma_pf`/`def_pf` nodes for every registry entry it
/// depends on: definitions outermost, then lemmas, each group in registry
/// order. The result mentions no registry names.
pub fn package(proof: &Term, reg: &Registry) -> Result<Term, LibraryError> {
    let deps = dependencies(&[proof], reg);
    for &i in &deps {
        if !reg.checked[i] {
            return Err(LibraryError::Unknown(reg.entries[i].name().name.to_string()));
        }
    }
    let (defs, lemmas): (Vec<usize>, Vec<usize>) = deps.into_iter().partition(|&i| reg.entries[i].is_definition());
    let mut out = proof.clone();
    for &i in defs.iter().chain(&lemmas).rev() {
        let entry = &reg.entries[i];
        let name = entry.name();
        let a = name.ty.clone();
        let rest = Term::lam(Binder::new(a.clone(), Some(&name.name)), abstract_const(&out, name, 0));
        let template_ty = MetaType::arrow(a.clone(), MetaType::O);
        let rest_ty = MetaType::arrow(a.clone(), MetaType::PF);
        out = match entry {
            Entry::Lemma { inference, proof, .. } => {
                let ty = MetaType::arrows([template_ty, a, rest_ty], MetaType::PF);
                Term::apps(
                    Term::cnst("lemma_pf", ty),
                    [inference.clone(), proof.clone(), rest],
                )
            }
            Entry::Definition {
                result_tp,
                typeinf,
                body,
                ..
            } => {
                let ty = MetaType::arrows([MetaType::TP, template_ty, a, rest_ty], MetaType::PF);
                Term::apps(
                    Term::cnst("def_pf", ty),
                    [result_tp.clone(), typeinf.clone(), body.clone(), rest],
                )
            }
        };
    }
    Ok(out)
}

/// Package every proof in a goal, i.e. each `P` in a `proves P A` reached
/// through the goal connectives.
pub fn package_goal(g: &Term, reg: &Registry) -> Result<Term, LibraryError> {
    let (head, args) = g.spine();
    match goal::Goal::view(g) {
        goal::Goal::All(b, body) => Ok(Term::app(
            head.clone(),
            Term::lam(b.clone(), package_goal(body, reg)?),
        )),
        goal::Goal::Conj(..) | goal::Goal::Impl { .. } => {
            let args = args
                .into_iter()
                .map(|a| package_goal(a, reg))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::apps(head.clone(), args))
        }
        goal::Goal::Atom(goal::Atom::Proves(p, a)) => {
            for e in reg.entries.iter().filter(|e| e.is_definition()) {
                if a.mentions_const(&e.name().name) {
                    return Err(LibraryError::Escapes(e.name().name.to_string()));
                }
            }
            Ok(goal::proves(package(p, reg)?, a.clone()))
        }
        _ => Ok(g.clone()),
    }
}
