//! Random typed terms, patterns and goals for the property suites, driven
//! by a byte string so proptest can shrink them.
#![allow(dead_code)]

use holcheck::kernel::{def_to_eqclause, match_pattern, Config, MetaVarStore, Session};
use holcheck::syntax::{self, parse_term, print_term, Statement};
use holcheck::term::{alpha_beta_eq, normalize, Binder, Const, MetaType, Signature, Term};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use std::path::{Path, PathBuf};

pub fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

pub fn read_corpus(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap()
}

pub fn solve_goals(stmts: &[Statement]) -> Vec<Term> {
    stmts
        .iter()
        .filter_map(|s| match s {
            Statement::Solve { goal } => Some(goal.clone()),
            _ => None,
        })
        .collect()
}

pub struct Choices<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Choices<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Choices { bytes, pos: 0 }
    }

    /// A number below `n`; 0 once the bytes run out, which always picks
    /// the smallest alternative.
    pub fn pick(&mut self, n: usize) -> usize {
        let b = self.bytes.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b as usize % n.max(1)
    }

    pub fn flip(&mut self) -> bool {
        self.pick(2) == 1
    }
}

pub fn choices() -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(any::<u8>(), 0..160)
}

fn tm() -> MetaType {
    MetaType::TM
}

fn tm_to(n: usize) -> MetaType {
    MetaType::arrows(std::iter::repeat_n(tm(), n), tm())
}

/// Object-level constants used by the term generators.
pub fn constants() -> Vec<(&'static str, MetaType)> {
    vec![
        ("a", tm()),
        ("b", tm()),
        ("f", tm_to(1)),
        ("g", tm_to(2)),
        ("h", MetaType::arrow(tm_to(1), tm())),
    ]
}

pub fn signature() -> Signature {
    let mut s = Signature::builtin();
    for (n, ty) in constants() {
        s.declare(n, ty).unwrap();
    }
    s
}

pub fn eigen(name: &str, stamp: u64) -> Term {
    Term::constant(Const {
        name: name.into(),
        ty: tm(),
        stamp,
    })
}

const HINTS: [&str; 3] = ["x", "y", "x"];
const TYPES: fn() -> [MetaType; 3] = || [tm(), tm_to(1), MetaType::arrow(tm_to(1), tm())];

pub struct Gen<'a, 'c> {
    pub ch: &'c mut Choices<'a>,
    /// Extra rigid heads, such as eigenvariables.
    pub heads: Vec<Term>,
    /// Argument meta-types for generated β-redexes; none when empty.
    pub redexes: Vec<MetaType>,
}

impl<'a, 'c> Gen<'a, 'c> {
    pub fn new(ch: &'c mut Choices<'a>) -> Self {
        Gen {
            ch,
            heads: Vec::new(),
            redexes: Vec::new(),
        }
    }

    /// A term of meta-type `ty` in a context of binder types (innermost last).
    pub fn term(&mut self, ty: &MetaType, ctx: &mut Vec<MetaType>, depth: u32) -> Term {
        if !self.redexes.is_empty() && depth > 0 && self.ch.pick(6) == 0 {
            let a = self.redexes[self.ch.pick(self.redexes.len())].clone();
            let arg = self.term(&a, ctx, depth - 1);
            ctx.push(a.clone());
            let body = self.term(ty, ctx, depth - 1);
            ctx.pop();
            return Term::app(Term::lam(Binder::new(a, Some("r")), body), arg);
        }
        let heads = self.heads_for(ty, ctx, depth);
        if let Some((dom, cod)) = ty.split_arrow() {
            if heads.is_empty() || self.ch.pick(3) != 0 {
                let hint = HINTS[self.ch.pick(HINTS.len())];
                ctx.push(dom.clone());
                let body = self.term(cod, ctx, depth.saturating_sub(1));
                ctx.pop();
                return Term::lam(Binder::new(dom.clone(), Some(hint)), body);
            }
        }
        let (head, head_ty, n) = heads[self.ch.pick(heads.len())].clone();
        let mut args = Vec::new();
        let mut t = &head_ty;
        for _ in 0..n {
            let (d, c) = t.split_arrow().unwrap();
            args.push(self.term(d, ctx, depth.saturating_sub(1)));
            t = c;
        }
        Term::apps(head, args)
    }

    /// Heads that reach `ty` after some arguments; only argument-free ones
    /// at depth 0.
    fn heads_for(&self, ty: &MetaType, ctx: &[MetaType], depth: u32) -> Vec<(Term, MetaType, usize)> {
        let mut all: Vec<(Term, MetaType)> = constants()
            .into_iter()
            .map(|(n, t)| (Term::cnst(n, t.clone()), t))
            .collect();
        all.extend(self.heads.iter().map(|h| (h.clone(), h.as_const().unwrap().ty.clone())));
        for (i, t) in ctx.iter().rev().enumerate() {
            all.push((Term::bound(i as u32), t.clone()));
        }
        let mut out = Vec::new();
        for (h, t) in all {
            for k in 0..=t.arity() {
                if (depth > 0 || k == 0) && t.drop_args(k) == Some(ty) {
                    out.push((h.clone(), t.clone(), k));
                }
            }
        }
        out
    }

    /// A pattern of meta-type tm: rigid structure with metavariables
    /// applied to distinct locals and eigenvariables. Metavariables are
    /// created in `metas`.
    pub fn pattern(&mut self, metas: &mut MetaVarStore, ctx: &mut Vec<MetaType>, depth: u32) -> Term {
        if depth == 0 || self.ch.pick(3) == 0 {
            let mut pool: Vec<Term> = ctx
                .iter()
                .rev()
                .enumerate()
                .filter(|(_, t)| **t == tm())
                .map(|(i, _)| Term::bound(i as u32))
                .collect();
            pool.extend(self.heads.iter().cloned());
            let mut args = Vec::new();
            while !pool.is_empty() && self.ch.flip() {
                args.push(pool.remove(self.ch.pick(pool.len())));
            }
            let m = metas.fresh(tm_to(args.len()), u64::MAX);
            return Term::apps(m, args);
        }
        match self.ch.pick(3) {
            0 => {
                let x = self.pattern(metas, ctx, depth - 1);
                Term::app(Term::cnst("f", tm_to(1)), x)
            }
            1 => {
                let x = self.pattern(metas, ctx, depth - 1);
                let y = self.pattern(metas, ctx, depth - 1);
                Term::apps(Term::cnst("g", tm_to(2)), [x, y])
            }
            _ => {
                ctx.push(tm());
                let body = self.pattern(metas, ctx, depth - 1);
                ctx.pop();
                let h = Term::cnst("h", MetaType::arrow(tm_to(1), tm()));
                Term::app(h, Term::lam(Binder::new(tm(), Some("x")), body))
            }
        }
    }
}

pub fn random_term(bytes: &[u8], redexes: &[MetaType]) -> (Term, MetaType) {
    let mut ch = Choices::new(bytes);
    let types = TYPES();
    let ty = types[ch.pick(types.len())].clone();
    let mut g = Gen::new(&mut ch);
    g.redexes = redexes.to_vec();
    let t = g.term(&ty, &mut Vec::new(), 4);
    (t, ty)
}

// ---- properties, shared by the property suite and the acceptance gate ----

pub fn prop_normalize_idempotent(bytes: &[u8]) -> Result<(), TestCaseError> {
    let (t, _) = random_term(bytes, &TYPES());
    let n = normalize(&t);
    prop_assert_eq!(normalize(&n), n.clone());
    prop_assert!(alpha_beta_eq(&t, &n));
    Ok(())
}

pub fn prop_parse_print(bytes: &[u8]) -> Result<(), TestCaseError> {
    // binders carry no annotation, so a redex argument that is itself a
    // vacuous abstraction would print ambiguously
    let (t, ty) = random_term(bytes, &[tm()]);
    let text = print_term(&t);
    let back = parse_term(&text, &signature(), Some(&ty)).map_err(|e| TestCaseError::fail(format!("{}: {}", text, e)))?;
    prop_assert_eq!(&back, &t, "printed as {}", text);
    let n = normalize(&t);
    let back = parse_term(&print_term(&n), &signature(), Some(&ty)).unwrap();
    prop_assert_eq!(back, n);
    Ok(())
}

/// Match either an instance of the pattern or an unrelated term; whenever
/// matching succeeds, the resolved pattern must equal the target.
pub fn prop_match_sound(bytes: &[u8]) -> Result<(), TestCaseError> {
    let mut ch = Choices::new(bytes);
    let eigens = vec![eigen("e", 1), eigen("e", 2)];
    let mut metas = MetaVarStore::default();
    let mut g = Gen::new(&mut ch);
    g.heads = eigens;
    let pat = normalize(&g.pattern(&mut metas, &mut Vec::new(), 3));
    let instance = g.ch.pick(4) != 0;
    let target = if instance {
        for id in 0..metas.len() as u32 {
            let ty = metas.ty(id).clone();
            let v = g.term(&ty, &mut Vec::new(), 3);
            metas.bind(id, normalize(&v));
        }
        let t = metas.resolve(&pat, &[]);
        metas.undo(0);
        t
    } else {
        normalize(&g.term(&tm(), &mut Vec::new(), 3))
    };
    match match_pattern(&mut metas, &pat, &target) {
        Ok(true) => {
            let got = metas.resolve(&pat, &[]);
            prop_assert!(!got.has_metas() || target.has_metas(), "unbound metas left in {:?}", got);
            prop_assert!(alpha_beta_eq(&got, &target), "{:?} vs {:?}", got, target);
        }
        Ok(false) => prop_assert!(!instance, "an instance failed to match: {:?} against {:?}", pat, target),
        Err(e) => return Err(TestCaseError::fail(format!("pattern error on a pattern: {}", e))),
    }
    Ok(())
}

/// Number of universals the clause starts with.
pub fn leading_pis(t: &Term) -> usize {
    let mut n = 0;
    let mut t = t.clone();
    while let Some(args) = t.head_args("pi") {
        let body = match args[0].kind() {
            holcheck::term::TermKind::Lam(_, b) => b.clone(),
            _ => break,
        };
        n += 1;
        t = body;
    }
    n
}

pub fn prop_eqclause_arity(bytes: &[u8]) -> Result<(), TestCaseError> {
    let mut ch = Choices::new(bytes);
    // the argument count is chosen here, so it does not come from MetaType
    let n = ch.pick(5);
    let pool = [MetaType::TM, MetaType::TP, tm_to(1), MetaType::PF];
    let doms: Vec<MetaType> = (0..n).map(|_| pool[ch.pick(pool.len())].clone()).collect();
    let result = if ch.pick(5) == 0 { MetaType::PF } else { tm() };
    let ty = MetaType::arrows(doms.clone(), result.clone());
    let body_ty = MetaType::arrows(doms.iter().cloned(), tm());
    let mut g = Gen::new(&mut ch);
    let body = normalize(&g.term(&body_ty, &mut Vec::new(), 3));
    let name = Term::cnst("d", ty.clone());
    let clause = def_to_eqclause(&Term::cnst("intty", MetaType::TP), &name, &body, &ty);
    match clause {
        None => prop_assert!(result != tm()),
        Some(c) => {
            prop_assert!(result == tm());
            prop_assert_eq!(leading_pis(&c), n);
            prop_assert!(holcheck::kernel::valid_clause(&c));
        }
    }
    Ok(())
}

/// Random proof text for a fixed goal shape.
pub fn random_proof(ch: &mut Choices, depth: u32, pfs: u32, tms: u32) -> String {
    let leaf = |ch: &mut Choices| -> String {
        let n = 5 + pfs as usize;
        match ch.pick(n) {
            0 => "refl".into(),
            1 => "beta".into(),
            2 => "surjpair".into(),
            3 => "fstpair".into(),
            4 => "sndpair".into(),
            k => format!("q{}", k - 5),
        }
    };
    if depth == 0 {
        return leaf(ch);
    }
    let d = depth - 1;
    match ch.pick(9) {
        0 => format!("(imp_i q{}\\ {})", pfs, random_proof(ch, d, pfs + 1, tms)),
        1 => format!("(imp_e ({}) {} {})", formula(ch, 2, tms), random_proof(ch, d, pfs, tms), random_proof(ch, d, pfs, tms)),
        2 => format!("(forall_i y{}\\ {})", tms, random_proof(ch, d, pfs, tms + 1)),
        3 => format!("(forall_e intty (z\\ {}) {} {})", formula(ch, 1, tms).replace("ZZ", "z"), random_proof(ch, d, pfs, tms), term(ch, tms)),
        4 => format!(
            "(congr intty {} {} (z\\ {}) {} {})",
            term(ch, tms),
            term(ch, tms),
            formula(ch, 1, tms).replace("ZZ", "z"),
            random_proof(ch, d, pfs, tms),
            random_proof(ch, d, pfs, tms)
        ),
        5 => format!(
            "(elam E\\ congr intty E c (eq intty c) {} {})",
            random_proof(ch, d, pfs, tms),
            random_proof(ch, d, pfs, tms)
        ),
        6 => format!(
            "(lemma_pf (L\\ pi A\\ proves (L A) (eq intty A A) <<== hastype A intty) (A\\ refl) (l\\ {}))",
            random_proof(ch, d, pfs, tms).replace("refl", "(l c)")
        ),
        7 => format!("(extract ({}) {})", formula(ch, 2, tms), random_proof(ch, d, pfs, tms)),
        _ => leaf(ch),
    }
}

fn term(ch: &mut Choices, tms: u32) -> String {
    let n = 2 + tms as usize;
    match ch.pick(n) {
        0 => "c".into(),
        1 => "d".into(),
        k => format!("y{}", k - 2),
    }
}

/// A formula; `ZZ` marks spots a caller may bind.
fn formula(ch: &mut Choices, depth: u32, tms: u32) -> String {
    let atom = |ch: &mut Choices| match ch.pick(3) {
        0 => format!("eq intty {} {}", term(ch, tms), term(ch, tms)),
        1 => format!("eq intty ZZ {}", term(ch, tms)),
        _ => "false".into(),
    };
    if depth == 0 {
        return atom(ch);
    }
    match ch.pick(3) {
        0 => format!("({}) imp ({})", formula(ch, depth - 1, tms), formula(ch, depth - 1, tms)),
        1 => format!("forall intty (y{}\\ {})", tms, formula(ch, depth - 1, tms + 1)),
        _ => atom(ch),
    }
}

pub const STORE_THEORY: &str = "type c tm. type d tm.";

/// Check a random goal; the kernel asserts its own store discipline and
/// metavariable scope on every binding, and both stores must be as found.
pub fn prop_store_discipline(bytes: &[u8]) -> Result<(), TestCaseError> {
    let mut ch = Choices::new(bytes);
    let proof = random_proof(&mut ch, 4, 0, 0).replace("ZZ", "c");
    let f = formula(&mut ch, 2, 0).replace("ZZ", "c");
    let src = format!(
        "{}\nhastype c intty => hastype d intty => proves {} ({}).",
        STORE_THEORY, proof, f
    );
    let file = match syntax::parse(&src, &Signature::builtin()) {
        Ok(f) => f,
        // some shapes leave a metavariable's meta-type open
        Err(e) if e.kind.is_meta_type() => return Ok(()),
        Err(e) => return Err(TestCaseError::fail(format!("{}\n{}", src, e))),
    };
    let mut session = Session::new(Config {
        budget: 20_000,
        ..Config::default()
    });
    for g in solve_goals(&file.statements) {
        let _ = session.check(&g);
        prop_assert_eq!(session.store_len(), 0);
        prop_assert_eq!(session.metas_len(), 0);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Failure,
    Validity,
    Pattern,
    MetaType,
}

impl Class {
    pub fn exit_code(self) -> i32 {
        match self {
            Class::Failure => 1,
            _ => 2,
        }
    }
}

pub struct Mutation {
    pub name: &'static str,
    pub src: String,
    pub expect: Class,
}

const THM1: &str = "proves
  (forall_i I\\ (forall_i J\\ (imp_i Q\\
    (congr intty I J (eq intty J) Q refl))))
  (forall intty I\\ forall intty J\\ (eq intty I J imp eq intty J I)).";

/// Theorem 5 with the typing hypothesis on `f` removed.
fn theorem5_untyped_f() -> String {
    let all = read_corpus("theorems_1_5.hol");
    let start = all.find("% Theorem 5").unwrap();
    all[start..]
        .lines()
        .filter(|l| !l.contains("hastype (f x y) t) =>"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn mutations() -> Vec<Mutation> {
    let m = |name, src: &str, expect| Mutation {
        name,
        src: src.to_string(),
        expect,
    };
    vec![
        m("wrong congr template", &THM1.replace("(eq intty J) Q", "(eq intty I) Q"), Class::Failure),
        m("swapped eq arguments", &THM1.replace("congr intty I J", "congr intty J I"), Class::Failure),
        m(
            "refl on unequal terms",
            "type c tm. type d tm. hastype c intty => hastype d intty => proves refl (eq intty c d).",
            Class::Failure,
        ),
        m("missing hastype hypothesis", &theorem5_untyped_f(), Class::Failure),
        m(
            "assump around hastype in a template",
            "type a tm. hastype a form => proves (lemma_pf (L\\ pi A\\ proves (L A) (eq intty A A) <<== \
             assump (hastype A intty)) (A\\ refl) (l\\ imp_i q\\ q)) (a imp a).",
            Class::Validity,
        ),
        m(
            "non-whitelist predicate in a template",
            "type a tm. type print tm -> o. hastype a form => \
             proves (lemma_pf (L\\ proves L a <<== print a) (imp_i q\\ q) (l\\ imp_i q\\ q)) (a imp a).",
            Class::Validity,
        ),
        m(
            "forall_i eigenvariable against an outer assumption",
            "type c tm. hastype c intty => \
             proves (imp_i q\\ forall_i y\\ q) ((eq intty c c) imp (forall intty y\\ eq intty y c)).",
            Class::Failure,
        ),
        m(
            "metavariable capturing a forall_i eigenvariable",
            "proves (elam Z\\ forall_i y\\ extract (eq intty Z y) refl) (forall intty y\\ eq intty y y).",
            Class::Failure,
        ),
        m(
            "clause head outside the pattern fragment",
            "type c tm. hastype c intty => proves (lemma_pf (L\\ pi F\\ pi X\\ proves (L X) (F c) <<== \
             proves X (F c)) (X\\ X) (l\\ imp_i q\\ l q)) ((eq intty c c) imp (eq intty c c)).",
            Class::Pattern,
        ),
        m("elam over proofs", "proves (elam P\\ P) false.", Class::Validity),
        m("type used as a term", "proves refl intty.", Class::MetaType),
        m(
            "unconstrained metavariable",
            "type c tm. type d tm. hastype c intty => hastype d intty => \
             proves (elam T\\ congr intty T T (eq intty T) refl refl) (eq intty c d).",
            Class::Failure,
        ),
    ]
}

/// The class the library API assigns to a mutation; `None` if it checks.
pub fn classify(src: &str) -> Option<Class> {
    use holcheck::kernel::KernelError;
    let file = match syntax::parse(src, &Signature::builtin()) {
        Ok(f) => f,
        Err(e) if e.kind.is_meta_type() => return Some(Class::MetaType),
        Err(e) => panic!("syntax error in mutation: {}", e),
    };
    let mut s = Session::new(Config::default());
    for g in solve_goals(&file.statements) {
        match s.check(&g) {
            Ok(r) if r.success() => {}
            Ok(_) => return Some(Class::Failure),
            Err(KernelError::Validity(_)) => return Some(Class::Validity),
            Err(KernelError::Pattern(_)) => return Some(Class::Pattern),
            Err(e) => panic!("unexpected {}", e),
        }
    }
    None
}

/// Run the command line in-process; returns (exit code, stdout, stderr).
pub fn cli<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> (i32, String, String) {
    let mut argv = vec![std::ffi::OsString::from("holcheck")];
    argv.extend(args.iter().map(|a| a.as_ref().to_owned()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = holcheck::cli::main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
