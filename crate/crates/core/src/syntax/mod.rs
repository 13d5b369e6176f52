//! Concrete syntax: `.hol` files, terms and goals.

mod elab;
mod lexer;
mod parser;
mod printer;

pub use printer::{print_file, print_scheme, print_statement, print_term};

use crate::term::{Const, DeclKind, Fixity, MetaType, Scheme, Signature, Term, TypeError};
use elab::Elaborator;
use parser::{Parser, RawStatement};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("lexical error: {0}")]
    Lex(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("precedence ambiguity: {0}")]
    Ambiguity(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("{0}")]
    Type(TypeError),
    #[error("meta-type error: {0}")]
    MetaType(String),
}

impl ParseErrorKind {
    /// Meta-type errors are reported separately from grammar errors.
    pub fn is_meta_type(&self) -> bool {
        matches!(self, ParseErrorKind::Type(_) | ParseErrorKind::MetaType(_))
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(pos: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError { pos, kind }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    TypeDecl {
        name: String,
        scheme: Scheme,
    },
    InfixDecl {
        name: String,
        fixity: Fixity,
    },
    /// `def_lemma Name Inference LemmaProof`
    DefLemma {
        name: Const,
        inference: Term,
        proof: Term,
    },
    /// `def_definition ResultTp Name TypeInf Body`
    DefDefinition {
        result_tp: Term,
        name: Const,
        typeinf: Term,
        body: Term,
    },
    Solve {
        goal: Term,
    },
}

impl Statement {
    /// The statement as a term of meta-type o (declarations have none).
    pub fn as_term(&self) -> Term {
        match self {
            Statement::DefLemma {
                name,
                inference,
                proof,
            } => {
                let a = name.ty.clone();
                let head = Const::new(
                    "def_lemma",
                    MetaType::arrows(
                        [a.clone(), MetaType::arrow(a.clone(), MetaType::O), a],
                        MetaType::O,
                    ),
                );
                Term::apps(
                    Term::constant(head),
                    [Term::constant(name.clone()), inference.clone(), proof.clone()],
                )
            }
            Statement::DefDefinition {
                result_tp,
                name,
                typeinf,
                body,
            } => {
                let a = name.ty.clone();
                let head = Const::new(
                    "def_definition",
                    MetaType::arrows(
                        [
                            MetaType::TP,
                            a.clone(),
                            MetaType::arrow(a.clone(), MetaType::O),
                            a,
                        ],
                        MetaType::O,
                    ),
                );
                Term::apps(
                    Term::constant(head),
                    [
                        result_tp.clone(),
                        Term::constant(name.clone()),
                        typeinf.clone(),
                        body.clone(),
                    ],
                )
            }
            Statement::Solve { goal } => goal.clone(),
            Statement::TypeDecl { .. } | Statement::InfixDecl { .. } => {
                panic!("declarations have no term form")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SourceFile {
    pub statements: Vec<Statement>,
    /// Start position of each statement.
    pub positions: Vec<Pos>,
    /// The signature extended by the file's declarations.
    pub signature: Signature,
}

/// Parse against a copy of `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<SourceFile, ParseError> {
    let mut sig = sig.clone();
    let (statements, positions) = parse_with(text, &mut sig)?;
    Ok(SourceFile {
        statements,
        positions,
        signature: sig,
    })
}

/// Parse, adding the file's `type` declarations to `sig` as they are read.
pub fn parse_with(
    text: &str,
    sig: &mut Signature,
) -> Result<(Vec<Statement>, Vec<Pos>), ParseError> {
    let toks = lexer::tokenize(text)?;
    // fixities never change, so the parser can keep the initial table
    let fixed = sig.clone();
    let mut p = Parser::new(toks, &fixed);
    let mut out = Vec::new();
    let mut positions = Vec::new();
    while !p.at_eof() {
        let raw = p.statement()?;
        let (stmt, pos) = match raw {
            RawStatement::Type(name, scheme, pos) => {
                declare(sig, &name, &scheme, pos)?;
                (Statement::TypeDecl { name, scheme }, pos)
            }
            RawStatement::Infix(name, fixity, pos) => {
                if sig.fixity(&name) != Some(fixity) {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::Syntax(format!(
                            "the operator table is fixed; `{}` cannot be given this fixity",
                            name
                        )),
                    ));
                }
                (Statement::InfixDecl { name, fixity }, pos)
            }
            RawStatement::Expr(e) => {
                let pos = e.pos;
                let t = Elaborator::new(sig).elaborate_statement(&e)?;
                (classify(t, pos)?, pos)
            }
        };
        out.push(stmt);
        positions.push(pos);
    }
    Ok((out, positions))
}

fn declare(sig: &mut Signature, name: &str, scheme: &Scheme, pos: Pos) -> Result<(), ParseError> {
    if let Some(d) = sig.get(name) {
        // restating a builtin exactly, as the logic's own declarations do, is harmless
        if d.kind != DeclKind::User && d.scheme == *scheme {
            return Ok(());
        }
    }
    if scheme.is_poly() {
        return Err(ParseError::new(
            pos,
            ParseErrorKind::MetaType(format!("user constant `{}` cannot be polymorphic", name)),
        ));
    }
    let ty = scheme.instantiate(&MetaType::O);
    sig.declare(name, ty)
        .map_err(|e| ParseError::new(pos, ParseErrorKind::Type(e)))
}

fn classify(t: Term, pos: Pos) -> Result<Statement, ParseError> {
    let user_name = |n: &Term| -> Result<Const, ParseError> {
        match n.as_const() {
            Some(c) => Ok(c.clone()),
            None => Err(ParseError::new(
                pos,
                ParseErrorKind::Syntax("a lemma or definition name must be a declared constant".into()),
            )),
        }
    };
    if let Some(args) = t.head_args("def_lemma") {
        if args.len() == 3 {
            return Ok(Statement::DefLemma {
                name: user_name(args[0])?,
                inference: args[1].clone(),
                proof: args[2].clone(),
            });
        }
    }
    if let Some(args) = t.head_args("def_definition") {
        if args.len() == 4 {
            return Ok(Statement::DefDefinition {
                result_tp: args[0].clone(),
                name: user_name(args[1])?,
                typeinf: args[2].clone(),
                body: args[3].clone(),
            });
        }
    }
    Ok(Statement::Solve { goal: t })
}

/// Parse a single closed term at the given meta-type (no trailing `.`).
pub fn parse_term(text: &str, sig: &Signature, ty: Option<&MetaType>) -> Result<Term, ParseError> {
    let toks = lexer::tokenize(text)?;
    let mut p = Parser::new(toks, sig);
    let e = p.expr(0)?;
    if !p.at_eof() {
        return Err(ParseError::new(
            e.pos,
            ParseErrorKind::Syntax("unexpected text after term".into()),
        ));
    }
    Elaborator::new(sig).elaborate(&e, ty)
}
