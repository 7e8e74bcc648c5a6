//! Concrete syntax: parsing and printing.
//!
//! ```text
//! term  := lam | app
//! lam   := ("\" | "λ") ident "." term
//! app   := atom {atom} [lam]
//! atom  := ident | "(" term ")"
//! ident := (letter | "_") {letter | digit | "_" | "'"}
//! ```
//!
//! Application associates to the left and an abstraction body extends as far
//! right as possible. A trailing abstraction may close an application without
//! parentheses, so `f \x.x` reads as `f (\x.x)`.
//!
//! The printer also emits non-source identifiers, and the parser reads them
//! back: `x_3` is always a source identifier, `x~` is overlined, `#7` names
//! a location. Fresh identifiers print as `base_index` and so only round-trip
//! up to namespace.

use thiserror::Error;

use crate::term::{Ident, Node, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    Open,
    Close,
    Name(Ident),
    End,
}

fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() && c != 'λ') || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    (c.is_alphanumeric() && c != 'λ') || c == '_' || c == '\''
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek_char().is_some_and(&f) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        self.take_while(char::is_whitespace);
        let start = self.pos;
        let Some(c) = self.bump() else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            '\\' | 'λ' => Tok::Lambda,
            '.' => Tok::Dot,
            '(' => Tok::Open,
            ')' => Tok::Close,
            '#' => {
                let name = self.take_while(|c| c.is_ascii_digit());
                let id = name.parse::<usize>().map_err(|_| ParseError {
                    offset: start,
                    message: "expected a location number after '#'".into(),
                })?;
                Tok::Name(Ident::location(id))
            }
            c if is_ident_start(c) => {
                let name = &self.src[start..self.pos];
                let rest = self.take_while(is_ident_continue);
                let full = format!("{name}{rest}");
                if self.peek_char() == Some('~') {
                    self.bump();
                    Tok::Name(Ident::source(&full).overlined())
                } else {
                    Tok::Name(Ident::source(&full))
                }
            }
            c => {
                return Err(ParseError { offset: start, message: format!("unexpected character {c:?}") })
            }
        };
        Ok((start, tok))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
    depth: usize,
}

const MAX_NESTING: usize = 10_000;

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(), ParseError> {
        let (offset, tok) = self.lexer.next()?;
        self.offset = offset;
        self.tok = tok;
        Ok(())
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset, message: message.into() })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return self.error("term nested too deeply");
        }
        let t = if self.tok == Tok::Lambda { self.lam() } else { self.app() };
        self.depth -= 1;
        t
    }

    fn lam(&mut self) -> Result<Term, ParseError> {
        self.advance()?;
        let Tok::Name(x) = self.tok.clone() else {
            return self.error("expected a binder after lambda");
        };
        self.advance()?;
        if self.tok != Tok::Dot {
            return self.error("expected '.' after binder");
        }
        self.advance()?;
        Ok(Term::lam(x, self.term()?))
    }

    fn atom(&mut self) -> Result<Option<Term>, ParseError> {
        match self.tok.clone() {
            Tok::Name(x) => {
                self.advance()?;
                Ok(Some(Term::var(x)))
            }
            Tok::Open => {
                self.advance()?;
                let t = self.term()?;
                if self.tok != Tok::Close {
                    return self.error("expected ')'");
                }
                self.advance()?;
                Ok(Some(t))
            }
            _ => Ok(None),
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let Some(mut t) = self.atom()? else {
            return self.error("expected a term");
        };
        loop {
            if self.tok == Tok::Lambda {
                return Ok(Term::app(t, self.lam()?));
            }
            match self.atom()? {
                Some(a) => t = Term::app(t, a),
                None => return Ok(t),
            }
        }
    }
}

/// Parse a term. Identifiers land in the source namespace unless written
/// with the overline (`x~`) or location (`#n`) notation.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { lexer: Lexer { src: text, pos: 0 }, tok: Tok::End, offset: 0, depth: 0 };
    p.advance()?;
    let t = p.term()?;
    if p.tok != Tok::End {
        return p.error("unexpected input after term");
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    /// Backslash for lambda.
    #[default]
    Compact,
    /// `λ` for lambda.
    Unicode,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pos {
    Top,
    Fun,
    Arg,
}

/// Print a term, expanding any sharing.
pub fn print(t: &Term, style: Style) -> String {
    let mut out = String::new();
    write_term(t, style, Pos::Top, &mut out);
    out
}

fn write_term(t: &Term, style: Style, pos: Pos, out: &mut String) {
    match t.node() {
        Node::Var(x) => out.push_str(&x.to_string()),
        Node::Lam(..) if pos != Pos::Top => {
            out.push('(');
            write_term(t, style, Pos::Top, out);
            out.push(')');
        }
        Node::Lam(x, body) => {
            out.push_str(match style {
                Style::Compact => "\\",
                Style::Unicode => "λ",
            });
            out.push_str(&x.to_string());
            out.push('.');
            write_term(body, style, Pos::Top, out);
        }
        Node::App(..) if pos == Pos::Arg => {
            out.push('(');
            write_term(t, style, Pos::Top, out);
            out.push(')');
        }
        Node::App(f, a) => {
            write_term(f, style, Pos::Fun, out);
            out.push(' ');
            write_term(a, style, Pos::Arg, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(Ident::source(x))
    }

    fn lam(x: &str, b: Term) -> Term {
        Term::lam(Ident::source(x), b)
    }

    #[test]
    fn parses_identity() {
        assert_eq!(parse("\\x.x").unwrap(), lam("x", v("x")));
        assert_eq!(parse("λx.x").unwrap(), lam("x", v("x")));
    }

    #[test]
    fn application_is_left_associative() {
        let expected = Term::app(lam("x", Term::app(v("x"), v("x"))), lam("y", v("y")));
        assert_eq!(parse("(\\x.x x) (\\y.y)").unwrap(), expected);
        assert_eq!(parse("a b c").unwrap(), Term::app(Term::app(v("a"), v("b")), v("c")));
    }

    #[test]
    fn church_two() {
        let c2 = lam("f", lam("x", Term::app(v("f"), Term::app(v("f"), v("x")))));
        assert_eq!(parse("\\f.\\x.f (f x)").unwrap(), c2);
    }

    #[test]
    fn body_extends_right() {
        assert_eq!(parse("\\x.x y").unwrap(), lam("x", Term::app(v("x"), v("y"))));
    }

    #[test]
    fn trailing_lambda_argument() {
        assert_eq!(parse("f \\x.x").unwrap(), Term::app(v("f"), lam("x", v("x"))));
        assert_eq!(parse("f a \\x.x b").unwrap(), parse("f a (\\x.x b)").unwrap());
    }

    #[test]
    fn identifier_characters() {
        assert_eq!(parse("x'_1").unwrap(), v("x'_1"));
        assert_eq!(parse("_a").unwrap(), v("_a"));
        assert_eq!(parse("x~").unwrap(), Term::var(Ident::source("x").overlined()));
        assert_eq!(parse("#12").unwrap(), Term::var(Ident::location(12)));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse("\\x x").unwrap_err().offset, 3);
        assert_eq!(parse("(x").unwrap_err().offset, 2);
        assert_eq!(parse("").unwrap_err().offset, 0);
        assert_eq!(parse("x )").unwrap_err().offset, 2);
        assert_eq!(parse("x $").unwrap_err().offset, 2);
        assert_eq!(parse("λ.x").unwrap_err().offset, 2);
    }

    #[test]
    fn printing() {
        assert_eq!(print(&lam("x", v("x")), Style::Compact), "\\x.x");
        assert_eq!(print(&lam("x", v("x")), Style::Unicode), "λx.x");
        let t = parse("(\\x.x x) (\\y.y) (a b)").unwrap();
        assert_eq!(print(&t, Style::Compact), "(\\x.x x) (\\y.y) (a b)");
        let nf = Term::apps(v("c"), [Term::lam(Ident::fresh("z", 0), Term::var(Ident::fresh("z", 0)))]);
        assert_eq!(print(&nf, Style::Unicode), "c (λz_0.z_0)");
    }

    #[test]
    fn roundtrip_of_printed_source_terms() {
        for s in ["\\x.x", "a (b c) d", "\\f.\\x.f (f x)", "(\\x.x) \\y.y", "x~ #3 (\\y~.y~)"] {
            let t = parse(s).unwrap();
            assert_eq!(parse(&print(&t, Style::Compact)).unwrap(), t, "{s}");
            assert_eq!(parse(&print(&t, Style::Unicode)).unwrap(), t, "{s}");
        }
    }
}
