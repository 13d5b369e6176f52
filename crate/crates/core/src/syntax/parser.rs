//! Surface expressions and the precedence-climbing parser.

use super::lexer::{Tok, Token};
use super::{ParseError, ParseErrorKind, Pos};
use crate::term::{Base, Fixity, Scheme, Signature};

#[derive(Clone, Debug)]
pub enum ExprKind {
    Ident(String),
    App(Box<Expr>, Box<Expr>),
    Lam(String, Box<Expr>),
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl Expr {
    fn ident(name: &str, pos: Pos) -> Expr {
        Expr {
            kind: ExprKind::Ident(name.to_string()),
            pos,
        }
    }

    fn app(f: Expr, a: Expr) -> Expr {
        let pos = f.pos;
        Expr {
            kind: ExprKind::App(Box::new(f), Box::new(a)),
            pos,
        }
    }
}

/// Raw statements, before meta-type elaboration.
#[derive(Clone, Debug)]
pub enum RawStatement {
    Type(String, Scheme, Pos),
    Infix(String, Fixity, Pos),
    Expr(Expr),
}

/// Punctuation operators: (constant they denote, fixity).
/// `:-` and `<<==` bind loosest, then `,`, then `=>`/`==>>`.
fn punct_op(op: &str) -> Option<(&'static str, Fixity)> {
    match op {
        ":-" => Some(("<<==", Fixity::Left(0))),
        "<<==" => Some(("<<==", Fixity::Left(0))),
        "," => Some((",", Fixity::Left(3))),
        "^^" => Some((",", Fixity::Left(3))),
        "=>" => Some(("==>>", Fixity::Right(4))),
        "==>>" => Some(("==>>", Fixity::Right(4))),
        _ => None,
    }
}

pub struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    pub fn new(toks: Vec<Token>, sig: &'a Signature) -> Self {
        Parser { toks, at: 0, sig }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(pos, ParseErrorKind::Syntax(msg.into())))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            let t = self.peek().clone();
            self.err(t.pos, format!("expected {}, found {}", what, describe(&t.tok)))
        }
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn statement(&mut self) -> Result<RawStatement, ParseError> {
        let first = self.peek().clone();
        if let Tok::Ident(kw) = &first.tok {
            match kw.as_str() {
                "type" if matches!(self.peek2(), Tok::Ident(_)) => {
                    self.bump();
                    let name = self.ident()?;
                    let ty = self.scheme()?;
                    self.expect(Tok::Dot, "`.`")?;
                    return Ok(RawStatement::Type(name, ty, first.pos));
                }
                "kind" => {
                    return Err(ParseError::new(
                        first.pos,
                        ParseErrorKind::Syntax(
                            "new base meta-types cannot be declared; the bases are tp, tm, pf and o"
                                .into(),
                        ),
                    ))
                }
                "infixl" | "infixr" if matches!(self.peek2(), Tok::Ident(_) | Tok::Op(_)) => {
                    let left = kw == "infixl";
                    self.bump();
                    let t = self.bump();
                    let name = match t.tok {
                        Tok::Ident(s) => s,
                        Tok::Op(s) => s.to_string(),
                        other => return self.err(t.pos, format!("expected operator, found {}", describe(&other))),
                    };
                    let pt = self.bump();
                    let prec: u32 = match &pt.tok {
                        Tok::Ident(s) => match s.parse() {
                            Ok(p) => p,
                            Err(_) => return self.err(pt.pos, "expected a precedence number"),
                        },
                        _ => return self.err(pt.pos, "expected a precedence number"),
                    };
                    self.expect(Tok::Dot, "`.`")?;
                    let fx = if left { Fixity::Left(prec) } else { Fixity::Right(prec) };
                    return Ok(RawStatement::Infix(name, fx, first.pos));
                }
                _ => {}
            }
        }
        let e = self.expr(0)?;
        self.expect(Tok::Dot, "`.` at end of statement")?;
        Ok(RawStatement::Expr(e))
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) => Ok(s),
            other => self.err(t.pos, format!("expected identifier, found {}", describe(&other))),
        }
    }

    /// A meta-type; a capitalized name stands for the scheme parameter.
    pub fn scheme(&mut self) -> Result<Scheme, ParseError> {
        let t = self.bump();
        let dom = match &t.tok {
            Tok::Ident(s) => match Base::from_name(s) {
                Some(b) => Scheme::Base(b),
                None if s.starts_with(|c: char| c.is_ascii_uppercase()) => Scheme::Param,
                None => return self.err(t.pos, format!("unknown meta-type `{}`", s)),
            },
            Tok::LParen => {
                let m = self.scheme()?;
                self.expect(Tok::RParen, "`)`")?;
                m
            }
            other => return self.err(t.pos, format!("expected meta-type, found {}", describe(other))),
        };
        if self.peek().tok == Tok::Op("->") {
            self.bump();
            Ok(Scheme::Arrow(Box::new(dom), Box::new(self.scheme()?)))
        } else {
            Ok(dom)
        }
    }

    /// The infix operator at the cursor, if any: (constant, fixity).
    fn infix_here(&self) -> Option<(String, Fixity)> {
        match &self.peek().tok {
            Tok::Op(op) => punct_op(op).map(|(c, f)| (c.to_string(), f)),
            Tok::Ident(s) => self.sig.fixity(s).map(|f| (s.clone(), f)),
            _ => None,
        }
    }

    fn lambda_here(&self) -> bool {
        matches!(self.peek().tok, Tok::Ident(_)) && *self.peek2() == Tok::Backslash
    }

    fn lambda(&mut self) -> Result<Expr, ParseError> {
        let pos = self.peek().pos;
        let name = self.ident()?;
        self.bump();
        // the body extends as far right as possible
        let body = self.expr(0)?;
        Ok(Expr {
            kind: ExprKind::Lam(name, Box::new(body)),
            pos,
        })
    }

    pub fn expr(&mut self, min_prec: u32) -> Result<Expr, ParseError> {
        if self.lambda_here() {
            return self.lambda();
        }
        let mut lhs = self.application()?;
        let mut last: Option<Fixity> = None;
        while let Some((name, fx)) = self.infix_here() {
            if fx.prec() < min_prec {
                break;
            }
            let pos = self.peek().pos;
            if let Some(prev) = last {
                if prev.prec() == fx.prec() && prev != fx {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::Ambiguity(format!(
                            "`{}` mixes left- and right-associative operators at precedence {}",
                            name,
                            fx.prec()
                        )),
                    ));
                }
            }
            self.bump();
            let rhs_min = match fx {
                Fixity::Left(p) => p + 1,
                Fixity::Right(p) => p,
            };
            let rhs = self.expr(rhs_min)?;
            lhs = Expr::app(Expr::app(Expr::ident(&name, pos), lhs), rhs);
            last = Some(fx);
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match &self.peek().tok {
            Tok::Ident(s) => self.sig.fixity(s).is_none(),
            Tok::LParen => true,
            _ => false,
        }
    }

    fn application(&mut self) -> Result<Expr, ParseError> {
        let mut head = self.atom()?;
        loop {
            if self.lambda_here() {
                let l = self.lambda()?;
                return Ok(Expr::app(head, l));
            }
            if !self.starts_atom() {
                return Ok(head);
            }
            let a = self.atom()?;
            head = Expr::app(head, a);
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Ident(s) if self.sig.fixity(s).is_none() => {
                self.bump();
                Ok(Expr::ident(s, t.pos))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            other => self.err(t.pos, format!("expected a term, found {}", describe(other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{}`", s),
        Tok::Op(s) => format!("`{}`", s),
        Tok::Backslash => "`\\`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Eof => "end of input".into(),
    }
}
