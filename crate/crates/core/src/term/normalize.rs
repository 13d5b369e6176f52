//! Substitution and βη-normalization.
//!
//! Normal forms are β-normal and η-long. Closed subterms are memoized per
//! call, so a subterm shared in the input stays shared in the output.

use super::{Binder, MetaType, Term, TermKind, TypeError};
use std::collections::HashMap;

/// Add `delta` to every de Bruijn index `>= cutoff`.
pub fn shift(t: &Term, delta: i64, cutoff: u32) -> Term {
    if t.loose() <= cutoff || delta == 0 {
        return t.clone();
    }
    match t.kind() {
        TermKind::Bound(i) => {
            let j = *i as i64 + delta;
            assert!(j >= 0, "negative de Bruijn index after shift");
            Term::bound(j as u32)
        }
        TermKind::App(f, a) => Term::app(shift(f, delta, cutoff), shift(a, delta, cutoff)),
        TermKind::Lam(b, body) => Term::lam(b.clone(), shift(body, delta, cutoff + 1)),
        TermKind::Const(_) | TermKind::Meta(_) => t.clone(),
    }
}

fn subst_at(t: &Term, depth: u32, arg: &Term) -> Term {
    if t.loose() <= depth {
        return t.clone();
    }
    match t.kind() {
        TermKind::Bound(i) => {
            if *i == depth {
                shift(arg, depth as i64, 0)
            } else {
                Term::bound(i - 1)
            }
        }
        TermKind::App(f, a) => Term::app(subst_at(f, depth, arg), subst_at(a, depth, arg)),
        TermKind::Lam(b, body) => Term::lam(b.clone(), subst_at(body, depth + 1, arg)),
        TermKind::Const(_) | TermKind::Meta(_) => t.clone(),
    }
}

/// Replace index 0 of an open body by `arg`, lowering the other loose indices.
pub fn instantiate(body: &Term, arg: &Term) -> Term {
    subst_at(body, 0, arg)
}

/// Capture-avoiding substitution into a lambda, checking the argument's
/// meta-type against the binder.
pub fn subst(lam: &Term, arg: &Term) -> Result<Term, TypeError> {
    match lam.kind() {
        TermKind::Lam(b, body) => {
            let ty = type_of(arg, &[]).ok_or_else(|| TypeError::IllTyped(format!("{}", arg)))?;
            if ty != b.ty {
                return Err(TypeError::Mismatch {
                    term: format!("{}", arg),
                    expected: b.ty.clone(),
                    found: ty,
                });
            }
            Ok(instantiate(body, arg))
        }
        _ => Err(TypeError::IllTyped(format!("not an abstraction: {}", lam))),
    }
}

/// Meta-type of a term read off its annotations; `ctx` lists the types of
/// enclosing binders, innermost last. `None` if ill-typed.
pub fn type_of(t: &Term, ctx: &[MetaType]) -> Option<MetaType> {
    let mut ctx = ctx.to_vec();
    type_of_in(t, &mut ctx)
}

fn type_of_in(t: &Term, ctx: &mut Vec<MetaType>) -> Option<MetaType> {
    match t.kind() {
        TermKind::Const(c) => Some(c.ty.clone()),
        TermKind::Meta(m) => Some(m.ty.clone()),
        TermKind::Bound(i) => {
            let i = *i as usize;
            (i < ctx.len()).then(|| ctx[ctx.len() - 1 - i].clone())
        }
        TermKind::App(f, a) => {
            let ft = type_of_in(f, ctx)?;
            let at = type_of_in(a, ctx)?;
            let (d, c) = ft.split_arrow()?;
            (d == &at).then(|| c.clone())
        }
        TermKind::Lam(b, body) => {
            ctx.push(b.ty.clone());
            let bt = type_of_in(body, ctx);
            ctx.pop();
            Some(MetaType::arrow(b.ty.clone(), bt?))
        }
    }
}

type Resolver<'r> = &'r dyn Fn(u32) -> Option<Term>;

struct Normalizer<'r> {
    resolve: Resolver<'r>,
    // keeps the input alive so its address cannot be reused during the call
    memo: HashMap<usize, (Term, Term)>,
}

impl<'r> Normalizer<'r> {
    fn nf(&mut self, t: &Term, ctx: &mut Vec<MetaType>) -> Term {
        if t.is_closed() {
            if let Some((_, out)) = self.memo.get(&t.ptr_id()) {
                return out.clone();
            }
        }
        let out = match t.kind() {
            TermKind::Lam(b, body) => {
                ctx.push(b.ty.clone());
                let nb = self.nf(body, ctx);
                ctx.pop();
                if nb.ptr_eq(body) {
                    t.clone()
                } else {
                    Term::lam(b.clone(), nb)
                }
            }
            _ => self.nf_spine(t, ctx),
        };
        if t.is_closed() {
            self.memo.insert(t.ptr_id(), (t.clone(), out.clone()));
        }
        out
    }

    fn nf_spine(&mut self, t: &Term, ctx: &mut Vec<MetaType>) -> Term {
        let (head, args) = t.spine();
        let head_ty = match head.kind() {
            TermKind::Lam(_, body) => {
                let r = instantiate(body, args[0]);
                let r = Term::apps(r, args[1..].iter().map(|a| (*a).clone()));
                return self.nf(&r, ctx);
            }
            TermKind::Meta(m) => {
                if let Some(v) = (self.resolve)(m.id) {
                    let r = Term::apps(v, args.iter().map(|a| (*a).clone()));
                    return self.nf(&r, ctx);
                }
                Some(m.ty.clone())
            }
            TermKind::Const(c) => Some(c.ty.clone()),
            TermKind::Bound(i) => {
                let i = *i as usize;
                // unknown binders are assumed to already be in long form
                (i < ctx.len()).then(|| ctx[ctx.len() - 1 - i].clone())
            }
            TermKind::App(..) => unreachable!("spine head is never an application"),
        };
        let nargs: Vec<Term> = args.iter().map(|a| self.nf(a, ctx)).collect();
        let unchanged = nargs.iter().zip(&args).all(|(n, a)| n.ptr_eq(a));
        let rest = head_ty.and_then(|ty| ty.drop_args(nargs.len()).cloned());
        match rest {
            Some(ty) if !ty.is_base() => expand(head.clone(), nargs, &ty),
            _ if unchanged => t.clone(),
            _ => Term::apps(head.clone(), nargs),
        }
    }
}

/// η-expand `head args` at the remaining type `ty`.
fn expand(head: Term, args: Vec<Term>, ty: &MetaType) -> Term {
    match ty {
        MetaType::Base(_) => Term::apps(head, args),
        MetaType::Arrow(d, c) => {
            let h = shift(&head, 1, 0);
            let mut a: Vec<Term> = args.iter().map(|x| shift(x, 1, 0)).collect();
            a.push(expand(Term::bound(0), Vec::new(), d));
            Term::lam(Binder::new((**d).clone(), None), expand(h, a, c))
        }
    }
}

/// β-normal, η-long form of a closed term.
pub fn normalize(t: &Term) -> Term {
    normalize_with(t, &[], &|_| None)
}

/// Normalize an open term whose loose indices have the types in `ctx`
/// (innermost last).
pub fn normalize_in(t: &Term, ctx: &[MetaType]) -> Term {
    normalize_with(t, ctx, &|_| None)
}

/// Normalize, replacing metavariables for which `resolve` yields a value.
pub fn normalize_with(t: &Term, ctx: &[MetaType], resolve: Resolver) -> Term {
    let mut n = Normalizer {
        resolve,
        memo: HashMap::new(),
    };
    n.nf(t, &mut ctx.to_vec())
}

/// Equality modulo α, β and η.
pub fn alpha_beta_eq(a: &Term, b: &Term) -> bool {
    normalize(a) == normalize(b)
}

pub fn occurs_bound(t: &Term, idx: u32) -> bool {
    if t.loose() <= idx {
        return false;
    }
    match t.kind() {
        TermKind::Bound(i) => *i == idx,
        TermKind::App(f, a) => occurs_bound(f, idx) || occurs_bound(a, idx),
        TermKind::Lam(_, b) => occurs_bound(b, idx + 1),
        TermKind::Const(_) | TermKind::Meta(_) => false,
    }
}

/// Remove η-redexes `x\ f x` everywhere.
pub fn eta_contract(t: &Term) -> Term {
    match t.kind() {
        TermKind::Lam(b, body) => {
            let nb = eta_contract(body);
            if let TermKind::App(f, x) = nb.kind() {
                if matches!(x.kind(), TermKind::Bound(0)) && !occurs_bound(f, 0) {
                    return shift(f, -1, 0);
                }
            }
            if nb.ptr_eq(body) {
                t.clone()
            } else {
                Term::lam(b.clone(), nb)
            }
        }
        TermKind::App(f, a) => {
            let (nf, na) = (eta_contract(f), eta_contract(a));
            if nf.ptr_eq(f) && na.ptr_eq(a) {
                t.clone()
            } else {
                Term::app(nf, na)
            }
        }
        _ => t.clone(),
    }
}
