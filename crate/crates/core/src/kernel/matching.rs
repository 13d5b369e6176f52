//! One-sided higher-order pattern matching: the pattern may contain
//! metavariables, the target is ground and normal.
//!
//! Equations whose flexible side is not a pattern yet are postponed until
//! other equations have instantiated enough of it; if a whole round makes
//! no progress the problem is outside the pattern fragment.

use super::store::MetaVarStore;
use super::KernelError;
use crate::term::{eta_contract, Binder, Const, MetaType, Term, TermKind};
use std::collections::VecDeque;

struct Eq {
    /// Binder types of the lambdas entered so far, innermost last.
    ctx: Vec<MetaType>,
    pat: Term,
    target: Term,
}

enum Arg {
    Local(u32),
    Eigen(Const),
}

/// Match `pat` against `target`, binding metavariables in `metas`. Returns
/// `Ok(false)` on clash or scope violation; bindings made before a failure
/// are left for the caller to undo.
pub fn match_pattern(metas: &mut MetaVarStore, pat: &Term, target: &Term) -> Result<bool, KernelError> {
    let mut work = VecDeque::from([Eq {
        ctx: Vec::new(),
        pat: pat.clone(),
        target: target.clone(),
    }]);
    let mut postponed = Vec::new();
    loop {
        while let Some(eq) = work.pop_front() {
            match step(metas, eq)? {
                Step::Done => {}
                Step::Fail => return Ok(false),
                Step::Split(eqs) => work.extend(eqs),
                Step::Postpone(eq) => postponed.push(eq),
            }
        }
        if postponed.is_empty() {
            return Ok(true);
        }
        let before = postponed.len();
        let mut progressed = false;
        for eq in std::mem::take(&mut postponed) {
            match step(metas, eq)? {
                Step::Done => progressed = true,
                Step::Fail => return Ok(false),
                Step::Split(eqs) => {
                    progressed = true;
                    work.extend(eqs)
                }
                Step::Postpone(eq) => postponed.push(eq),
            }
        }
        if !progressed && postponed.len() == before {
            let eq = &postponed[0];
            return Err(KernelError::Pattern(format!(
                "cannot match {} against {}: not a higher-order pattern",
                eq.pat, eq.target
            )));
        }
    }
}

enum Step {
    Done,
    Fail,
    Split(Vec<Eq>),
    Postpone(Eq),
}

fn step(metas: &mut MetaVarStore, eq: Eq) -> Result<Step, KernelError> {
    let pat = metas.resolve(&eq.pat, &eq.ctx);
    if !pat.has_metas() {
        return Ok(if pat == eq.target { Step::Done } else { Step::Fail });
    }
    if let TermKind::Lam(b, pbody) = pat.kind() {
        let TermKind::Lam(_, tbody) = eq.target.kind() else {
            return Ok(Step::Fail);
        };
        let mut ctx = eq.ctx;
        ctx.push(b.ty.clone());
        return Ok(Step::Split(vec![Eq {
            ctx,
            pat: pbody.clone(),
            target: tbody.clone(),
        }]));
    }
    let (head, args) = pat.spine();
    match head.kind() {
        TermKind::Meta(m) => {
            let Some(pargs) = pattern_args(&args, eq.ctx.len()) else {
                return Ok(Step::Postpone(Eq { pat, ..eq }));
            };
            let birth = metas.birth(m.id);
            match abstract_over(&eq.target, &pargs, &eq.ctx, birth) {
                Some(v) => {
                    metas.bind(m.id, v);
                    Ok(Step::Done)
                }
                None => Ok(Step::Fail),
            }
        }
        TermKind::Const(_) | TermKind::Bound(_) => {
            let (thead, targs) = eq.target.spine();
            let same = match (head.kind(), thead.kind()) {
                (TermKind::Const(a), TermKind::Const(b)) => a == b,
                (TermKind::Bound(i), TermKind::Bound(j)) => i == j,
                _ => false,
            };
            if !same || args.len() != targs.len() {
                return Ok(Step::Fail);
            }
            Ok(Step::Split(
                args.iter()
                    .zip(targs)
                    .map(|(p, t)| Eq {
                        ctx: eq.ctx.clone(),
                        pat: (*p).clone(),
                        target: t.clone(),
                    })
                    .collect(),
            ))
        }
        TermKind::Lam(..) | TermKind::App(..) => unreachable!("resolved pattern is normal"),
    }
}

/// Arguments of a flexible head, if they are distinct local variables or
/// eigenvariables (up to η).
fn pattern_args(args: &[&Term], locals: usize) -> Option<Vec<Arg>> {
    let mut out: Vec<Arg> = Vec::with_capacity(args.len());
    for a in args {
        let a = eta_contract(a);
        let arg = match a.kind() {
            TermKind::Bound(i) if (*i as usize) < locals => Arg::Local(*i),
            TermKind::Const(c) if c.is_eigen() => Arg::Eigen(c.clone()),
            _ => return None,
        };
        let dup = out.iter().any(|o| match (o, &arg) {
            (Arg::Local(i), Arg::Local(j)) => i == j,
            (Arg::Eigen(c), Arg::Eigen(d)) => c.same(d),
            _ => false,
        });
        if dup {
            return None;
        }
        out.push(arg);
    }
    Some(out)
}

/// `\x1..xn. target` with each argument replaced by its variable, or
/// `None` if the target mentions a local variable that is not an argument
/// or an eigenvariable younger than the metavariable.
fn abstract_over(target: &Term, args: &[Arg], ctx: &[MetaType], birth: u64) -> Option<Term> {
    let n = args.len() as u32;
    let body = rebuild(target, args, 0, birth)?;
    let binder = |a: &Arg| match a {
        Arg::Local(i) => Binder::new(ctx[ctx.len() - 1 - *i as usize].clone(), None),
        Arg::Eigen(c) => Binder::new(c.ty.clone(), Some(&c.name)),
    };
    debug_assert_eq!(n as usize, args.len());
    Some(args.iter().rev().fold(body, |acc, a| Term::lam(binder(a), acc)))
}

fn rebuild(t: &Term, args: &[Arg], depth: u32, birth: u64) -> Option<Term> {
    let n = args.len() as u32;
    let var = |j: usize| Term::bound(depth + n - 1 - j as u32);
    match t.kind() {
        TermKind::Bound(i) if *i < depth => Some(Term::bound(*i)),
        TermKind::Bound(i) => {
            let local = i - depth;
            let j = args.iter().position(|a| matches!(a, Arg::Local(l) if *l == local))?;
            Some(var(j))
        }
        TermKind::Const(c) if c.is_eigen() => {
            match args.iter().position(|a| matches!(a, Arg::Eigen(d) if d.same(c))) {
                Some(j) => Some(var(j)),
                None if c.stamp <= birth => Some(t.clone()),
                None => None,
            }
        }
        TermKind::Const(_) => Some(t.clone()),
        TermKind::Meta(_) => None,
        TermKind::App(f, a) => Some(Term::app(
            rebuild(f, args, depth, birth)?,
            rebuild(a, args, depth, birth)?,
        )),
        TermKind::Lam(b, body) => Some(Term::lam(b.clone(), rebuild(body, args, depth + 1, birth)?)),
    }
}
