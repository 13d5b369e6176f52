//! Proof transformations outside the checker: inlining lemmas, and size
//! measurements.

use crate::term::{normalize_in, MetaType, Term, TermKind};
use std::collections::HashSet;

/// Replace every `lemma_pf I L R` by the normal form of `R L`, innermost
/// first. `def_pf` nodes are kept.
pub fn expand_lemmas(t: &Term) -> Term {
    expand(t, &mut Vec::new())
}

fn expand(t: &Term, ctx: &mut Vec<MetaType>) -> Term {
    match t.kind() {
        TermKind::Lam(b, body) => {
            ctx.push(b.ty.clone());
            let nb = expand(body, ctx);
            ctx.pop();
            if nb.ptr_eq(body) {
                t.clone()
            } else {
                Term::lam(b.clone(), nb)
            }
        }
        TermKind::App(..) => {
            let (head, args) = t.spine();
            let new: Vec<Term> = args.iter().map(|a| expand(a, ctx)).collect();
            if head.head_name() == Some("lemma_pf") && new.len() == 3 {
                let r = Term::app(new[2].clone(), new[1].clone());
                return normalize_in(&r, ctx);
            }
            if new.iter().zip(&args).all(|(n, a)| n.ptr_eq(a)) {
                return t.clone();
            }
            Term::apps(head.clone(), new)
        }
        _ => t.clone(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProofStats {
    /// Distinct term nodes, counting shared subterms once.
    pub shared_nodes: u64,
    /// Nodes of the term written out as a tree.
    pub tree_nodes: u64,
    pub lemma_count: u64,
    pub def_count: u64,
    pub max_depth: u64,
}

pub fn proof_stats(t: &Term) -> ProofStats {
    let mut seen = HashSet::new();
    let mut s = ProofStats::default();
    walk(t, 1, &mut seen, &mut s);
    s
}

fn walk(t: &Term, depth: u64, seen: &mut HashSet<usize>, s: &mut ProofStats) {
    s.tree_nodes = s.tree_nodes.saturating_add(1);
    s.max_depth = s.max_depth.max(depth);
    if seen.insert(t.ptr_id()) {
        s.shared_nodes += 1;
    }
    match t.kind() {
        TermKind::Const(c) if c.stamp == 0 => match &*c.name {
            "lemma_pf" => s.lemma_count += 1,
            "def_pf" => s.def_count += 1,
            _ => {}
        },
        TermKind::App(f, a) => {
            walk(f, depth + 1, seen, s);
            walk(a, depth + 1, seen, s);
        }
        TermKind::Lam(_, body) => walk(body, depth + 1, seen, s),
        _ => {}
    }
}
