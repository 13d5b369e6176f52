//! Meta-type inference for surface expressions.
//!
//! Binder types and the parameter of each polymorphic constant occurrence
//! are solved by first-order unification; every one must end up ground.

use super::parser::{Expr, ExprKind};
use super::{ParseError, ParseErrorKind, Pos};
use crate::term::{Base, Binder, Const, DeclKind, MetaType, Scheme, Signature, Term, TypeError};

#[derive(Clone, Debug)]
enum SType {
    Base(Base),
    Var(u32),
    Arrow(Box<SType>, Box<SType>),
}

enum Pre {
    Const(String, SType, Pos),
    Bound(u32),
    App(Box<Pre>, Box<Pre>),
    Lam(String, SType, Box<Pre>, Pos),
}

pub struct Elaborator<'s> {
    sig: &'s Signature,
    vars: Vec<Option<SType>>,
    allow_statement_heads: bool,
}

fn is_capital(name: &str) -> bool {
    name.chars()
        .next()
        .is_some_and(|c| c.is_ascii_uppercase() || c == '_')
}

impl<'s> Elaborator<'s> {
    pub fn new(sig: &'s Signature) -> Self {
        Elaborator {
            sig,
            vars: Vec::new(),
            allow_statement_heads: false,
        }
    }

    fn fresh(&mut self) -> SType {
        self.vars.push(None);
        SType::Var(self.vars.len() as u32 - 1)
    }

    fn of_scheme(&mut self, s: &Scheme, param: &mut Option<SType>) -> SType {
        match s {
            Scheme::Param => {
                if param.is_none() {
                    *param = Some(self.fresh());
                }
                param.clone().unwrap()
            }
            Scheme::Base(b) => SType::Base(*b),
            Scheme::Arrow(d, c) => {
                let d = self.of_scheme(d, param);
                let c = self.of_scheme(c, param);
                SType::Arrow(Box::new(d), Box::new(c))
            }
        }
    }

    fn from_mono(ty: &MetaType) -> SType {
        match ty {
            MetaType::Base(b) => SType::Base(*b),
            MetaType::Arrow(d, c) => SType::Arrow(Box::new(Self::from_mono(d)), Box::new(Self::from_mono(c))),
        }
    }

    fn walk(&self, t: &SType) -> SType {
        match t {
            SType::Var(v) => match &self.vars[*v as usize] {
                Some(b) => self.walk(b),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, v: u32, t: &SType) -> bool {
        match self.walk(t) {
            SType::Var(w) => v == w,
            SType::Base(_) => false,
            SType::Arrow(d, c) => self.occurs(v, &d) || self.occurs(v, &c),
        }
    }

    fn unify(&mut self, a: &SType, b: &SType) -> Result<(), bool> {
        match (self.walk(a), self.walk(b)) {
            (SType::Var(x), SType::Var(y)) if x == y => Ok(()),
            (SType::Var(x), t) | (t, SType::Var(x)) => {
                if self.occurs(x, &t) {
                    return Err(true);
                }
                self.vars[x as usize] = Some(t);
                Ok(())
            }
            (SType::Base(x), SType::Base(y)) if x == y => Ok(()),
            (SType::Arrow(d1, c1), SType::Arrow(d2, c2)) => {
                self.unify(&d1, &d2)?;
                self.unify(&c1, &c2)
            }
            _ => Err(false),
        }
    }

    fn show(&self, t: &SType) -> String {
        match self.walk(t) {
            SType::Base(b) => b.name().to_string(),
            SType::Var(v) => format!("?T{}", v),
            SType::Arrow(d, c) => {
                let ds = self.show(&d);
                if matches!(self.walk(&d), SType::Arrow(..)) {
                    format!("({}) -> {}", ds, self.show(&c))
                } else {
                    format!("{} -> {}", ds, self.show(&c))
                }
            }
        }
    }

    fn ground(&self, t: &SType) -> Option<MetaType> {
        match self.walk(t) {
            SType::Base(b) => Some(MetaType::Base(b)),
            SType::Var(_) => None,
            SType::Arrow(d, c) => Some(MetaType::arrow(self.ground(&d)?, self.ground(&c)?)),
        }
    }

    fn infer(&mut self, e: &Expr, env: &mut Vec<(String, SType)>) -> Result<(Pre, SType), ParseError> {
        match &e.kind {
            ExprKind::Ident(name) => {
                if let Some(k) = env.iter().rev().position(|(n, _)| n == name) {
                    let ty = env[env.len() - 1 - k].1.clone();
                    return Ok((Pre::Bound(k as u32), ty));
                }
                if is_capital(name) {
                    return Err(ParseError::new(e.pos, ParseErrorKind::Unbound(name.clone())));
                }
                // `all` spells the universal goal too
                let name = if name == "all" { "pi" } else { name.as_str() };
                let decl = self.sig.get(name).ok_or_else(|| {
                    ParseError::new(
                        e.pos,
                        ParseErrorKind::Type(TypeError::Undeclared(name.to_string())),
                    )
                })?;
                if decl.kind == DeclKind::Statement && !self.allow_statement_heads {
                    return Err(ParseError::new(
                        e.pos,
                        ParseErrorKind::Syntax(format!("`{}` may only head a top-level statement", name)),
                    ));
                }
                let scheme = decl.scheme.clone();
                let ty = self.of_scheme(&scheme, &mut None);
                Ok((Pre::Const(name.to_string(), ty.clone(), e.pos), ty))
            }
            ExprKind::App(f, a) => {
                let (pf, tf) = self.infer(f, env)?;
                let saved = self.allow_statement_heads;
                self.allow_statement_heads = false;
                let (pa, ta) = self.infer(a, env)?;
                self.allow_statement_heads = saved;
                let r = self.fresh();
                let want = SType::Arrow(Box::new(ta.clone()), Box::new(r.clone()));
                if let Err(occ) = self.unify(&tf, &want) {
                    let kind = if occ {
                        TypeError::Occurs(show_expr(a))
                    } else {
                        match self.walk(&tf) {
                            SType::Arrow(d, _) => {
                                return Err(ParseError::new(
                                    a.pos,
                                    ParseErrorKind::MetaType(format!(
                                        "`{}` has meta-type {} but {} is expected",
                                        show_expr(a),
                                        self.show(&ta),
                                        self.show(&d)
                                    )),
                                ))
                            }
                            _ => TypeError::IllTyped(format!(
                                "`{}` of meta-type {} is applied to an argument",
                                show_expr(f),
                                self.show(&tf)
                            )),
                        }
                    };
                    return Err(ParseError::new(a.pos, ParseErrorKind::Type(kind)));
                }
                Ok((Pre::App(Box::new(pf), Box::new(pa)), r))
            }
            ExprKind::Lam(name, body) => {
                let v = self.fresh();
                env.push((name.clone(), v.clone()));
                let saved = self.allow_statement_heads;
                self.allow_statement_heads = false;
                let r = self.infer(body, env);
                self.allow_statement_heads = saved;
                env.pop();
                let (pb, tb) = r?;
                Ok((
                    Pre::Lam(name.clone(), v.clone(), Box::new(pb), e.pos),
                    SType::Arrow(Box::new(v), Box::new(tb)),
                ))
            }
        }
    }

    fn resolve(&self, p: &Pre) -> Result<Term, ParseError> {
        match p {
            Pre::Const(name, ty, pos) => {
                let ty = self.ground(ty).ok_or_else(|| {
                    ParseError::new(*pos, ParseErrorKind::Type(TypeError::Ambiguous(name.clone())))
                })?;
                Ok(Term::constant(Const::new(name, ty)))
            }
            Pre::Bound(i) => Ok(Term::bound(*i)),
            Pre::App(f, a) => Ok(Term::app(self.resolve(f)?, self.resolve(a)?)),
            Pre::Lam(name, ty, body, pos) => {
                let ty = self.ground(ty).ok_or_else(|| {
                    ParseError::new(
                        *pos,
                        ParseErrorKind::Type(TypeError::Ambiguous(format!("binder {}", name))),
                    )
                })?;
                Ok(Term::lam(Binder::new(ty, Some(name)), self.resolve(body)?))
            }
        }
    }

    /// Elaborate a closed expression at an expected meta-type (or any).
    pub fn elaborate(&mut self, e: &Expr, expected: Option<&MetaType>) -> Result<Term, ParseError> {
        self.vars.clear();
        let (pre, ty) = self.infer(e, &mut Vec::new())?;
        if let Some(want) = expected {
            let w = Self::from_mono(want);
            if self.unify(&ty, &w).is_err() {
                return Err(ParseError::new(
                    e.pos,
                    ParseErrorKind::MetaType(format!(
                        "expected meta-type {}, found {}",
                        want,
                        self.show(&ty)
                    )),
                ));
            }
        }
        self.resolve(&pre)
    }

    /// Elaborate a top-level statement; `def_lemma`/`def_definition` may head it.
    pub fn elaborate_statement(&mut self, e: &Expr) -> Result<Term, ParseError> {
        self.allow_statement_heads = true;
        let r = self.elaborate(e, Some(&MetaType::O));
        self.allow_statement_heads = false;
        r
    }
}

fn show_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Ident(s) => s.clone(),
        ExprKind::App(f, a) => {
            let fs = show_expr(f);
            let as_ = show_expr(a);
            if matches!(a.kind, ExprKind::Ident(_)) {
                format!("{} {}", fs, as_)
            } else {
                format!("{} ({})", fs, as_)
            }
        }
        ExprKind::Lam(x, b) => format!("{}\\ {}", x, show_expr(b)),
    }
}
