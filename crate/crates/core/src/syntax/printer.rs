//! Single-line printing in the concrete syntax.

use super::Statement;
use crate::term::{Const, Fixity, Scheme, Term, TermKind};
use std::collections::HashSet;

fn infix(name: &str) -> Option<(&'static str, Fixity)> {
    match name {
        "arrow" => Some(("arrow", Fixity::Right(8))),
        "imp" => Some(("imp", Fixity::Right(7))),
        "==>>" => Some(("==>>", Fixity::Right(4))),
        "," => Some((",", Fixity::Left(3))),
        "<<==" => Some(("<<==", Fixity::Left(0))),
        _ => None,
    }
}

// words the parser treats specially when they start a statement or an operand
const RESERVED: [&str; 5] = ["type", "kind", "infixl", "infixr", "all"];

struct Printer {
    taken: HashSet<String>,
    scope: Vec<String>,
    out: String,
}

impl Printer {
    fn new(t: &Term) -> Printer {
        let mut taken: HashSet<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        for op in ["arrow", "imp"] {
            taken.insert(op.to_string());
        }
        t.for_each_const(&mut |c| {
            taken.insert(c.name.to_string());
        });
        Printer {
            taken,
            scope: Vec::new(),
            out: String::new(),
        }
    }

    fn usable(&self, n: &str) -> bool {
        !self.taken.contains(n) && !self.scope.iter().any(|s| s == n)
    }

    fn fresh(&self, hint: Option<&str>) -> String {
        if let Some(h) = hint {
            if self.usable(h) {
                return h.to_string();
            }
            for i in 1.. {
                let n = format!("{}{}", h, i);
                if self.usable(&n) {
                    return n;
                }
            }
        }
        let mut i = self.scope.len() + 1;
        loop {
            let n = format!("x{}", i);
            if self.usable(&n) {
                return n;
            }
            i += 1;
        }
    }

    fn atomic(t: &Term) -> bool {
        matches!(t.kind(), TermKind::Const(_) | TermKind::Bound(_) | TermKind::Meta(_))
    }

    /// `prec`: the loosest operator allowed without parentheses.
    /// `tail`: nothing follows inside the current parenthesis group, so a
    /// lambda can be left unbracketed.
    fn term(&mut self, t: &Term, prec: u32, tail: bool) {
        match t.kind() {
            TermKind::Const(c) => self.constant(c),
            TermKind::Bound(i) => {
                let i = *i as usize;
                match self.scope.len().checked_sub(i + 1) {
                    Some(k) => {
                        let n = self.scope[k].clone();
                        self.out.push_str(&n);
                    }
                    None => self.out.push_str(&format!("^{}", i)),
                }
            }
            TermKind::Meta(m) => self.out.push_str(&format!("?M{}", m.id)),
            TermKind::Lam(b, body) => {
                if !tail {
                    self.out.push('(');
                }
                let n = self.fresh(b.hint.as_deref());
                self.out.push_str(&n);
                self.out.push_str("\\ ");
                self.scope.push(n);
                self.term(body, 0, true);
                self.scope.pop();
                if !tail {
                    self.out.push(')');
                }
            }
            TermKind::App(..) => self.app(t, prec, tail),
        }
    }

    fn constant(&mut self, c: &Const) {
        if let Some((op, _)) = infix(&c.name) {
            // a bare infix operator: print its η-expansion
            let a = self.fresh(None);
            self.scope.push(a.clone());
            let b = self.fresh(None);
            self.scope.pop();
            self.out.push_str(&format!("({}\\ {}\\ {} {} {})", a, b, a, op, b));
            return;
        }
        self.out.push_str(&c.name);
    }

    fn app(&mut self, t: &Term, prec: u32, tail: bool) {
        let (head, args) = t.spine();
        if let TermKind::Const(c) = head.kind() {
            if let Some((op, fx)) = infix(&c.name).filter(|_| args.len() == 2 && c.stamp == 0) {
                let p = fx.prec();
                let paren = p < prec;
                if paren {
                    self.out.push('(');
                }
                let (lp, rp) = match fx {
                    Fixity::Left(p) => (p, p + 1),
                    Fixity::Right(p) => (p + 1, p),
                };
                self.term(args[0], lp, false);
                if op == "," {
                    self.out.push_str(", ");
                } else {
                    self.out.push(' ');
                    self.out.push_str(op);
                    self.out.push(' ');
                }
                self.term(args[1], rp, tail || paren);
                if paren {
                    self.out.push(')');
                }
                return;
            }
        }
        self.arg(head, false);
        let n = args.len();
        for (i, a) in args.into_iter().enumerate() {
            self.out.push(' ');
            self.arg(a, tail && i + 1 == n);
        }
    }

    fn arg(&mut self, a: &Term, tail: bool) {
        if Self::atomic(a) && infix(a.as_const().map_or("", |c| &c.name)).is_none() {
            self.term(a, 0, false);
        } else if matches!(a.kind(), TermKind::Lam(..)) && tail {
            self.term(a, 0, true);
        } else {
            self.out.push('(');
            self.term(a, 0, true);
            self.out.push(')');
        }
    }
}

/// Print a term; bound variables keep their source names where possible.
pub fn print_term(t: &Term) -> String {
    let mut p = Printer::new(t);
    p.term(t, 0, true);
    p.out
}

pub fn print_scheme(s: &Scheme) -> String {
    match s {
        Scheme::Param => "A".into(),
        Scheme::Base(b) => b.name().into(),
        Scheme::Arrow(d, c) => {
            let ds = print_scheme(d);
            if matches!(**d, Scheme::Arrow(..)) {
                format!("({}) -> {}", ds, print_scheme(c))
            } else {
                format!("{} -> {}", ds, print_scheme(c))
            }
        }
    }
}

pub fn print_statement(s: &Statement) -> String {
    match s {
        Statement::TypeDecl { name, scheme } => format!("type {} {}.", name, print_scheme(scheme)),
        Statement::InfixDecl { name, fixity } => match fixity {
            Fixity::Left(p) => format!("infixl {} {}.", name, p),
            Fixity::Right(p) => format!("infixr {} {}.", name, p),
        },
        _ => format!("{}.", print_term(&s.as_term())),
    }
}

pub fn print_file(stmts: &[Statement]) -> String {
    let mut out = String::new();
    for s in stmts {
        out.push_str(&print_statement(s));
        out.push('\n');
    }
    out
}
