//! Signatures and meta-type checking.

use super::{Base, MetaType, Term, TermKind};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TypeError {
    #[error("undeclared constant `{0}`")]
    Undeclared(String),
    #[error("meta-type mismatch at `{term}`: expected {expected}, found {found}")]
    Mismatch {
        term: String,
        expected: MetaType,
        found: MetaType,
    },
    #[error("ill-typed term `{0}`")]
    IllTyped(String),
    #[error("cannot infer a ground instance for `{0}`")]
    Ambiguous(String),
    #[error("constant `{0}` is already declared with a different meta-type")]
    Redeclared(String),
    #[error("`{0}` is builtin and cannot be redeclared")]
    Builtin(String),
    #[error("infinite meta-type at `{0}`")]
    Occurs(String),
}

/// A meta-type scheme with at most one type parameter `A`.
#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    Param,
    Base(Base),
    Arrow(Box<Scheme>, Box<Scheme>),
}

impl Scheme {
    pub fn mono(ty: &MetaType) -> Scheme {
        match ty {
            MetaType::Base(b) => Scheme::Base(*b),
            MetaType::Arrow(d, c) => Scheme::Arrow(Box::new(Scheme::mono(d)), Box::new(Scheme::mono(c))),
        }
    }

    fn arr(d: Scheme, c: Scheme) -> Scheme {
        Scheme::Arrow(Box::new(d), Box::new(c))
    }

    pub fn is_poly(&self) -> bool {
        match self {
            Scheme::Param => true,
            Scheme::Base(_) => false,
            Scheme::Arrow(d, c) => d.is_poly() || c.is_poly(),
        }
    }

    /// Substitute the parameter.
    pub fn instantiate(&self, a: &MetaType) -> MetaType {
        match self {
            Scheme::Param => a.clone(),
            Scheme::Base(b) => MetaType::Base(*b),
            Scheme::Arrow(d, c) => MetaType::arrow(d.instantiate(a), c.instantiate(a)),
        }
    }

    /// Whether `ty` is an instance; records the parameter in `param`.
    pub fn matches(&self, ty: &MetaType, param: &mut Option<MetaType>) -> bool {
        match (self, ty) {
            (Scheme::Param, t) => match param {
                Some(p) => p == t,
                None => {
                    *param = Some(t.clone());
                    true
                }
            },
            (Scheme::Base(a), MetaType::Base(b)) => a == b,
            (Scheme::Arrow(d, c), MetaType::Arrow(d2, c2)) => {
                d.matches(d2, param) && c.matches(c2, param)
            }
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Builtin,
    User,
    /// Only legal as the head of a top-level statement.
    Statement,
}

#[derive(Clone, Debug)]
pub struct Decl {
    pub scheme: Scheme,
    pub kind: DeclKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixity {
    Left(u32),
    Right(u32),
}

impl Fixity {
    pub fn prec(self) -> u32 {
        match self {
            Fixity::Left(p) | Fixity::Right(p) => p,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Signature {
    decls: HashMap<String, Decl>,
    user_order: Vec<(String, MetaType)>,
    infix: HashMap<String, Fixity>,
}

impl Default for Signature {
    fn default() -> Self {
        Signature::builtin()
    }
}

impl Signature {
    /// The core logic, the lemma/definition constructors and the goal
    /// connectives.
    pub fn builtin() -> Signature {
        use Scheme::Param;
        let tp = || Scheme::Base(Base::Tp);
        let tm = || Scheme::Base(Base::Tm);
        let pf = || Scheme::Base(Base::Pf);
        let o = || Scheme::Base(Base::O);
        let arrs = |doms: Vec<Scheme>, r: Scheme| doms.into_iter().rev().fold(r, |acc, d| Scheme::arr(d, acc));
        let mut decls = HashMap::new();
        let mut add = |n: &str, s: Scheme, kind: DeclKind| {
            decls.insert(n.to_string(), Decl { scheme: s, kind });
        };
        let b = DeclKind::Builtin;
        add("form", tp(), b);
        add("intty", tp(), b);
        add("arrow", arrs(vec![tp(), tp()], tp()), b);
        add("pair", arrs(vec![tp(), tp()], tp()), b);

        add("eq", arrs(vec![tp(), tm(), tm()], tm()), b);
        add("imp", arrs(vec![tm(), tm()], tm()), b);
        add("forall", arrs(vec![tp(), Scheme::arr(tm(), tm())], tm()), b);
        add("false", tm(), b);
        add("lam", arrs(vec![Scheme::arr(tm(), tm())], tm()), b);
        add("app", arrs(vec![tp(), tm(), tm()], tm()), b);
        add("mkpair", arrs(vec![tm(), tm()], tm()), b);
        add("fst", arrs(vec![tp(), tm()], tm()), b);
        add("snd", arrs(vec![tp(), tm()], tm()), b);

        for n in ["refl", "beta", "fstpair", "sndpair", "surjpair", "def"] {
            add(n, pf(), b);
        }
        add(
            "congr",
            arrs(vec![tp(), tm(), tm(), Scheme::arr(tm(), tm()), pf(), pf()], pf()),
            b,
        );
        add("imp_i", arrs(vec![Scheme::arr(pf(), pf())], pf()), b);
        add("imp_e", arrs(vec![tm(), pf(), pf()], pf()), b);
        add("forall_i", arrs(vec![Scheme::arr(tm(), pf())], pf()), b);
        add(
            "forall_e",
            arrs(vec![tp(), Scheme::arr(tm(), tm()), pf(), tm()], pf()),
            b,
        );

        add(
            "lemma_pf",
            arrs(vec![Scheme::arr(Param, o()), Param, Scheme::arr(Param, pf())], pf()),
            b,
        );
        add(
            "def_pf",
            arrs(
                vec![tp(), Scheme::arr(Param, o()), Param, Scheme::arr(Param, pf())],
                pf(),
            ),
            b,
        );
        add("elam", arrs(vec![Scheme::arr(Param, pf())], pf()), b);
        add("extract", arrs(vec![tm(), pf()], pf()), b);
        add("extractGoal", arrs(vec![o(), pf()], pf()), b);

        add("proves", arrs(vec![pf(), tm()], o()), b);
        add("hastype", arrs(vec![tm(), tp()], o()), b);
        add("assump", arrs(vec![o()], o()), b);
        add("pi", arrs(vec![Scheme::arr(Param, o())], o()), b);
        add(",", arrs(vec![o(), o()], o()), b);
        add("==>>", arrs(vec![o(), o()], o()), b);
        add("<<==", arrs(vec![o(), o()], o()), b);

        add(
            "def_lemma",
            arrs(vec![Param, Scheme::arr(Param, o()), Param], o()),
            DeclKind::Statement,
        );
        add(
            "def_definition",
            arrs(vec![tp(), Param, Scheme::arr(Param, o()), Param], o()),
            DeclKind::Statement,
        );

        let infix = [
            ("arrow", Fixity::Right(8)),
            ("imp", Fixity::Right(7)),
            ("==>>", Fixity::Right(4)),
            ("<<==", Fixity::Left(0)),
        ]
        .into_iter()
        .map(|(n, f)| (n.to_string(), f))
        .collect();

        Signature {
            decls,
            user_order: Vec::new(),
            infix,
        }
    }

    pub fn get(&self, name: &str) -> Option<&Decl> {
        self.decls.get(name)
    }

    pub fn fixity(&self, name: &str) -> Option<Fixity> {
        self.infix.get(name).copied()
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.decls
            .get(name)
            .is_some_and(|d| d.kind != DeclKind::User)
    }

    /// Add a user constant. Redeclaring with an identical meta-type is a no-op.
    pub fn declare(&mut self, name: &str, ty: MetaType) -> Result<(), TypeError> {
        match self.decls.get(name) {
            Some(d) if d.kind != DeclKind::User => Err(TypeError::Builtin(name.to_string())),
            Some(d) if d.scheme == Scheme::mono(&ty) => Ok(()),
            Some(_) => Err(TypeError::Redeclared(name.to_string())),
            None => {
                self.decls.insert(
                    name.to_string(),
                    Decl {
                        scheme: Scheme::mono(&ty),
                        kind: DeclKind::User,
                    },
                );
                self.user_order.push((name.to_string(), ty));
                Ok(())
            }
        }
    }

    /// User declarations in declaration order.
    pub fn user_decls(&self) -> &[(String, MetaType)] {
        &self.user_order
    }

    /// The declared meta-type of a monomorphic constant.
    pub fn mono_type(&self, name: &str) -> Option<MetaType> {
        let d = self.decls.get(name)?;
        if d.scheme.is_poly() {
            None
        } else {
            Some(d.scheme.instantiate(&MetaType::O))
        }
    }
}

/// Check a closed term against the signature and return its meta-type.
/// Eigenvariables and metavariables are typed by their own annotation.
pub fn infer_meta_type(t: &Term, sig: &Signature) -> Result<MetaType, TypeError> {
    infer(t, sig, &mut Vec::new())
}

fn infer(t: &Term, sig: &Signature, ctx: &mut Vec<MetaType>) -> Result<MetaType, TypeError> {
    match t.kind() {
        TermKind::Const(c) if c.is_eigen() => Ok(c.ty.clone()),
        TermKind::Const(c) => {
            let d = sig
                .get(&c.name)
                .ok_or_else(|| TypeError::Undeclared(c.name.to_string()))?;
            let mut param = None;
            if d.scheme.matches(&c.ty, &mut param) {
                Ok(c.ty.clone())
            } else {
                Err(TypeError::IllTyped(format!(
                    "`{}` annotated {} is not an instance of its declaration",
                    c.name, c.ty
                )))
            }
        }
        TermKind::Meta(m) => Ok(m.ty.clone()),
        TermKind::Bound(i) => {
            let i = *i as usize;
            if i < ctx.len() {
                Ok(ctx[ctx.len() - 1 - i].clone())
            } else {
                Err(TypeError::IllTyped(format!("loose bound variable {}", i)))
            }
        }
        TermKind::App(f, a) => {
            let ft = infer(f, sig, ctx)?;
            let at = infer(a, sig, ctx)?;
            match ft.split_arrow() {
                Some((d, c)) if *d == at => Ok(c.clone()),
                Some((d, _)) => Err(TypeError::Mismatch {
                    term: format!("{}", a),
                    expected: d.clone(),
                    found: at,
                }),
                None => Err(TypeError::IllTyped(format!("{} is applied but has type {}", f, ft))),
            }
        }
        TermKind::Lam(b, body) => {
            ctx.push(b.ty.clone());
            let bt = infer(body, sig, ctx);
            ctx.pop();
            Ok(MetaType::arrow(b.ty.clone(), bt?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_fixities() {
        let s = Signature::builtin();
        assert_eq!(s.fixity("arrow"), Some(Fixity::Right(8)));
        assert_eq!(s.fixity("imp"), Some(Fixity::Right(7)));
        assert_eq!(s.fixity("==>>"), Some(Fixity::Right(4)));
        assert_eq!(s.fixity("<<=="), Some(Fixity::Left(0)));
    }

    #[test]
    fn builtins_cannot_be_redeclared() {
        let mut s = Signature::builtin();
        assert!(matches!(
            s.declare("imp", MetaType::TM),
            Err(TypeError::Builtin(_))
        ));
        s.declare("a", MetaType::TM).unwrap();
        s.declare("a", MetaType::TM).unwrap();
        assert!(matches!(
            s.declare("a", MetaType::TP),
            Err(TypeError::Redeclared(_))
        ));
    }

    #[test]
    fn eq_application_has_type_tm() {
        let mut s = Signature::builtin();
        s.declare("i", MetaType::TM).unwrap();
        s.declare("j", MetaType::TM).unwrap();
        let eq = Term::cnst(
            "eq",
            MetaType::arrows([MetaType::TP, MetaType::TM, MetaType::TM], MetaType::TM),
        );
        let t = Term::apps(
            eq,
            [
                Term::cnst("intty", MetaType::TP),
                Term::cnst("i", MetaType::TM),
                Term::cnst("j", MetaType::TM),
            ],
        );
        assert_eq!(infer_meta_type(&t, &s), Ok(MetaType::TM));
    }

    #[test]
    fn undeclared_constant_is_reported() {
        let s = Signature::builtin();
        let t = Term::cnst("nope", MetaType::TM);
        assert_eq!(
            infer_meta_type(&t, &s),
            Err(TypeError::Undeclared("nope".into()))
        );
    }

    #[test]
    fn poly_instance_is_checked() {
        let s = Signature::builtin();
        let a = MetaType::arrow(MetaType::PF, MetaType::PF);
        let good = s.get("lemma_pf").unwrap().scheme.instantiate(&a);
        let mut p = None;
        assert!(s.get("lemma_pf").unwrap().scheme.matches(&good, &mut p));
        assert_eq!(p, Some(a));
    }
}
