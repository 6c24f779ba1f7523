//! A small s-expression reader with source positions.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    pub fn is_atom(&self, s: &str) -> bool {
        self.as_atom() == Some(s)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    x.fmt(f)?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError {
        pos,
        msg: msg.into(),
    })
}

/// Reads every top-level form of `text`. `;` starts a comment running to
/// the end of the line.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, col: 1 };
    let advance = |c: char, pos: &mut Pos| {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let here = pos;
        match c {
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    advance(c, &mut pos);
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                advance(c, &mut pos);
                stack.push((Vec::new(), here));
            }
            ')' => {
                chars.next();
                advance(c, &mut pos);
                let Some((items, start)) = stack.pop() else {
                    return err(here, "unexpected ')'");
                };
                let list = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                advance(c, &mut pos);
            }
            '"' => return err(here, "strings are not supported"),
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '"') {
                        break;
                    }
                    atom.push(c);
                    advance(c, &mut pos);
                    chars.next();
                }
                let a = Sexp::Atom(atom, here);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(a),
                    None => top.push(a),
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return err(*start, "unclosed '('");
    }
    Ok(top)
}

/// Reads exactly one form.
pub fn parse_one(text: &str) -> Result<Sexp, SyntaxError> {
    let mut forms = parse_all(text)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap()),
        0 => err(Pos { line: 1, col: 1 }, "empty input"),
        _ => err(forms[1].pos(), "expected a single form"),
    }
}
