use super::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `=>`, `:-`, `==>>`, `<<==`, `^^`, `->`, `,`
    Op(&'static str),
    Backslash,
    LParen,
    RParen,
    Dot,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const OPS: [&str; 7] = ["==>>", "<<==", "=>", ":-", "^^", "->", ","];

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            toks.push(Token {
                tok: Tok::Ident(s),
                pos,
            });
            continue;
        }
        let single = match c {
            '\\' => Some(Tok::Backslash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            toks.push(Token { tok, pos });
            i += 1;
            col += 1;
            continue;
        }
        if c == '.' {
            if chars.get(i + 1) == Some(&'.') {
                return Err(ParseError::new(
                    pos,
                    ParseErrorKind::Lex("elided text `...` is not part of the grammar".into()),
                ));
            }
            toks.push(Token { tok: Tok::Dot, pos });
            i += 1;
            col += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
        match OPS.iter().find(|op| rest.starts_with(**op)) {
            Some(op) => {
                toks.push(Token {
                    tok: Tok::Op(op),
                    pos,
                });
                i += op.len();
                col += op.len() as u32;
            }
            None => {
                return Err(ParseError::new(
                    pos,
                    ParseErrorKind::Lex(format!("unexpected character `{}`", c)),
                ))
            }
        }
    }
    toks.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(toks)
}
