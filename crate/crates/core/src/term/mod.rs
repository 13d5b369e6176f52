//! Terms of the meta-language.
//!
//! Object-level types, terms, formulas, proofs and goals all live in one
//! syntactic category, distinguished by their [`MetaType`]. Lambda-bound
//! variables use de Bruijn indices; variables introduced by the kernel for
//! universal goals are fresh constants carrying a birth stamp.

mod normalize;
mod typing;

pub use normalize::{
    alpha_beta_eq, eta_contract, instantiate, normalize, normalize_in, normalize_with, occurs_bound,
    shift, subst, type_of,
};
pub use typing::{infer_meta_type, Decl, DeclKind, Fixity, Scheme, Signature, TypeError};

use std::fmt;
use std::sync::Arc;

pub type Symbol = Arc<str>;

/// The four base meta-types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Tp,
    Tm,
    Pf,
    O,
}

impl Base {
    pub fn name(self) -> &'static str {
        match self {
            Base::Tp => "tp",
            Base::Tm => "tm",
            Base::Pf => "pf",
            Base::O => "o",
        }
    }

    pub fn from_name(s: &str) -> Option<Base> {
        match s {
            "tp" => Some(Base::Tp),
            "tm" => Some(Base::Tm),
            "pf" => Some(Base::Pf),
            "o" => Some(Base::O),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum MetaType {
    Base(Base),
    Arrow(Arc<MetaType>, Arc<MetaType>),
}

impl MetaType {
    pub const TP: MetaType = MetaType::Base(Base::Tp);
    pub const TM: MetaType = MetaType::Base(Base::Tm);
    pub const PF: MetaType = MetaType::Base(Base::Pf);
    pub const O: MetaType = MetaType::Base(Base::O);

    pub fn arrow(dom: MetaType, cod: MetaType) -> MetaType {
        MetaType::Arrow(Arc::new(dom), Arc::new(cod))
    }

    /// Right-nested arrow `d1 -> d2 -> ... -> result`.
    pub fn arrows(doms: impl IntoIterator<Item = MetaType>, result: MetaType) -> MetaType {
        let doms: Vec<_> = doms.into_iter().collect();
        doms.into_iter()
            .rev()
            .fold(result, |acc, d| MetaType::arrow(d, acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, MetaType::Base(_))
    }

    pub fn base(&self) -> Option<Base> {
        match self {
            MetaType::Base(b) => Some(*b),
            MetaType::Arrow(..) => None,
        }
    }

    /// Number of arrows along the spine.
    pub fn arity(&self) -> usize {
        match self {
            MetaType::Base(_) => 0,
            MetaType::Arrow(_, c) => 1 + c.arity(),
        }
    }

    pub fn split_arrow(&self) -> Option<(&MetaType, &MetaType)> {
        match self {
            MetaType::Arrow(d, c) => Some((d, c)),
            MetaType::Base(_) => None,
        }
    }

    /// Domains of the spine and the final base type.
    pub fn uncurry(&self) -> (Vec<&MetaType>, Base) {
        let mut doms = Vec::new();
        let mut t = self;
        loop {
            match t {
                MetaType::Base(b) => return (doms, *b),
                MetaType::Arrow(d, c) => {
                    doms.push(&**d);
                    t = c;
                }
            }
        }
    }

    /// The type left after applying `n` arguments.
    pub fn drop_args(&self, n: usize) -> Option<&MetaType> {
        let mut t = self;
        for _ in 0..n {
            t = t.split_arrow()?.1;
        }
        Some(t)
    }
}

impl fmt::Display for MetaType {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            MetaType::Base(b) => f.write_str(b.name()),
            MetaType::Arrow(d, c) => {
                if d.is_base() {
                    write!(f, "{} -> {}", d, c)
                } else {
                    write!(f, "({}) -> {}", d, c)
                }
            }
        }
    }
}

impl fmt::Debug for MetaType {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A constant. Signature constants have `stamp == 0`; eigenvariables
/// generated by the kernel carry a strictly positive, increasing stamp.
///
/// For polymorphic signature constants `ty` is the instance chosen at this
/// occurrence.
#[derive(Clone)]
pub struct Const {
    pub name: Symbol,
    pub ty: MetaType,
    pub stamp: u64,
}

impl Const {
    pub fn new(name: &str, ty: MetaType) -> Const {
        Const {
            name: name.into(),
            ty,
            stamp: 0,
        }
    }

    pub fn is_eigen(&self) -> bool {
        self.stamp > 0
    }

    pub fn same(&self, other: &Const) -> bool {
        self.stamp == other.stamp && self.name == other.name
    }
}

impl PartialEq for Const {
    fn eq(&self, other: &Const) -> bool {
        self.same(other) && self.ty == other.ty
    }
}

impl fmt::Debug for Const {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.stamp == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}#{}", self.name, self.stamp)
        }
    }
}

#[derive(Clone, Debug)]
pub struct MetaVar {
    pub id: u32,
    pub ty: MetaType,
}

#[derive(Clone, Debug)]
pub struct Binder {
    pub ty: MetaType,
    /// Source name, used only for printing.
    pub hint: Option<Symbol>,
}

impl Binder {
    pub fn new(ty: MetaType, hint: Option<&str>) -> Binder {
        Binder {
            ty,
            hint: hint.map(Into::into),
        }
    }
}

#[derive(Clone, Debug)]
pub enum TermKind {
    Const(Const),
    Bound(u32),
    Meta(MetaVar),
    App(Term, Term),
    Lam(Binder, Term),
}

#[derive(Debug)]
struct Node {
    kind: TermKind,
    /// One more than the largest loose de Bruijn index; 0 when closed.
    loose: u32,
    metas: bool,
}

/// An immutable, shareable term.
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    fn mk(kind: TermKind) -> Term {
        let (loose, metas) = match &kind {
            TermKind::Const(_) => (0, false),
            TermKind::Bound(i) => (i + 1, false),
            TermKind::Meta(_) => (0, true),
            TermKind::App(f, a) => (f.loose().max(a.loose()), f.has_metas() || a.has_metas()),
            TermKind::Lam(_, b) => (b.loose().saturating_sub(1), b.has_metas()),
        };
        Term(Arc::new(Node { kind, loose, metas }))
    }

    pub fn constant(c: Const) -> Term {
        Term::mk(TermKind::Const(c))
    }

    pub fn cnst(name: &str, ty: MetaType) -> Term {
        Term::constant(Const::new(name, ty))
    }

    pub fn bound(i: u32) -> Term {
        Term::mk(TermKind::Bound(i))
    }

    pub fn meta(m: MetaVar) -> Term {
        Term::mk(TermKind::Meta(m))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::mk(TermKind::App(f, a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lam(binder: Binder, body: Term) -> Term {
        Term::mk(TermKind::Lam(binder, body))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn loose(&self) -> u32 {
        self.0.loose
    }

    pub fn is_closed(&self) -> bool {
        self.0.loose == 0
    }

    pub fn has_metas(&self) -> bool {
        self.0.metas
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn as_const(&self) -> Option<&Const> {
        match self.kind() {
            TermKind::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let TermKind::App(f, a) = t.kind() {
            args.push(a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// If the spine head is the signature constant `name`, its arguments.
    pub fn head_args(&self, name: &str) -> Option<Vec<&Term>> {
        let (h, args) = self.spine();
        match h.kind() {
            TermKind::Const(c) if c.stamp == 0 && &*c.name == name => Some(args),
            _ => None,
        }
    }

    /// Name of the spine head when it is a signature constant.
    pub fn head_name(&self) -> Option<&str> {
        match self.spine().0.kind() {
            TermKind::Const(c) if c.stamp == 0 => Some(&c.name),
            _ => None,
        }
    }

    /// Visit every constant occurrence (tree order).
    pub fn for_each_const(&self, f: &mut impl FnMut(&Const)) {
        match self.kind() {
            TermKind::Const(c) => f(c),
            TermKind::Bound(_) | TermKind::Meta(_) => {}
            TermKind::App(a, b) => {
                a.for_each_const(f);
                b.for_each_const(f);
            }
            TermKind::Lam(_, b) => b.for_each_const(f),
        }
    }

    pub fn mentions_const(&self, name: &str) -> bool {
        let mut found = false;
        self.for_each_const(&mut |c| {
            if c.stamp == 0 && &*c.name == name {
                found = true
            }
        });
        found
    }

    /// Largest eigenvariable stamp occurring in the term (0 if none).
    pub fn max_stamp(&self) -> u64 {
        let mut m = 0;
        self.for_each_const(&mut |c| m = m.max(c.stamp));
        m
    }
}

/// Structural equality: α-equivalence, since binders are nameless.
impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.0.loose != other.0.loose || self.0.metas != other.0.metas {
            return false;
        }
        match (self.kind(), other.kind()) {
            (TermKind::Const(a), TermKind::Const(b)) => a.same(b),
            (TermKind::Bound(i), TermKind::Bound(j)) => i == j,
            (TermKind::Meta(a), TermKind::Meta(b)) => a.id == b.id,
            (TermKind::App(f, a), TermKind::App(g, b)) => f == g && a == b,
            (TermKind::Lam(x, a), TermKind::Lam(y, b)) => x.ty == y.ty && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_term(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_term(self))
    }
}
