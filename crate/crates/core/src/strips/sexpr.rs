//! S-expression reader for PDDL text.

use std::fmt;

use super::PddlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    /// A symbol, lowercased (PDDL is case-insensitive).
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// The leading symbol of a list, e.g. `define` in `(define ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str, PddlError> {
        self.as_atom().ok_or_else(|| PddlError::syntax(self.pos(), format!("expected {what}, found a list")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[SExpr], PddlError> {
        self.as_list().ok_or_else(|| PddlError::syntax(self.pos(), format!("expected {what}, found '{}'", self)))
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(s, _) => f.write_str(s),
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses exactly one top-level expression; comments start with `;`.
pub fn parse(text: &str) -> Result<SExpr, PddlError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut result: Option<SExpr> = None;
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            continue;
        }
        col += 1;
        match c {
            ';' => {
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                if result.is_some() {
                    return Err(PddlError::syntax(here, "unexpected text after the closing parenthesis"));
                }
                stack.push((Vec::new(), here));
            }
            ')' => {
                let (items, start) = stack.pop().ok_or_else(|| PddlError::syntax(here, "unbalanced ')'"))?;
                let list = SExpr::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => result = Some(list),
                }
            }
            c if c.is_whitespace() => {}
            _ => {
                let mut sym = String::new();
                sym.extend(c.to_lowercase());
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    sym.extend(n.to_lowercase());
                    chars.next();
                    col += 1;
                }
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(SExpr::Atom(sym, here)),
                    None => return Err(PddlError::syntax(here, format!("symbol '{sym}' outside of any list"))),
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(PddlError::syntax(*start, "unclosed '('"));
    }
    result.ok_or_else(|| PddlError::syntax(Pos { line, col }, "empty input"))
}
