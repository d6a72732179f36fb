//! Set-formula parser.
//!
//! ```text
//! expr   := term ('|' term)*
//! term   := factor ('&' factor)*
//! factor := ATOM | '(' expr ')' | '0'
//! ```
//!
//! `∪` and `∩` are accepted for `|` and `&`. Whitespace is insignificant.

use thiserror::Error;

use crate::algebra::{Element, Space};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown atom {0:?}")]
    UnknownAtom(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Atom(String),
    Zero,
    Or,
    And,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '|' | '∪' => {
                chars.next();
                tokens.push((offset, Token::Or));
            }
            '&' | '∩' => {
                chars.next();
                tokens.push((offset, Token::And));
            }
            '(' => {
                chars.next();
                tokens.push((offset, Token::Open));
            }
            ')' => {
                chars.next();
                tokens.push((offset, Token::Close));
            }
            '0' => {
                chars.next();
                if let Some(&(_, next)) = chars.peek() {
                    if next.is_ascii_alphanumeric() || next == '_' {
                        return Err(FormulaError::Syntax {
                            offset,
                            message: "'0' must stand alone".into(),
                        });
                    }
                }
                tokens.push((offset, Token::Zero));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((offset, Token::Atom(name)));
            }
            other => {
                return Err(FormulaError::Syntax {
                    offset,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    space: &'a Space,
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Element, FormulaError> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let rhs = self.term()?;
            acc = acc.join(&rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Element, FormulaError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = acc.meet(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Element, FormulaError> {
        match self.peek().cloned() {
            Some(Token::Atom(name)) => {
                let index = self
                    .space
                    .frame()
                    .index_of(&name)
                    .ok_or(FormulaError::UnknownAtom(name))?;
                self.pos += 1;
                Ok(self.space.atom(index).expect("index comes from the frame"))
            }
            Some(Token::Zero) => {
                self.pos += 1;
                Ok(self.space.empty())
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::Close) {
                    return self.syntax("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.syntax("expected an atom, '0' or '('"),
            None => self.syntax("unexpected end of formula"),
        }
    }
}

/// Parses `text` into its canonical element under the space's model.
pub fn parse_formula(space: &Space, text: &str) -> Result<Element, FormulaError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        space,
        tokens,
        pos: 0,
        end: text.len(),
    };
    if parser.tokens.is_empty() {
        return parser.syntax("empty formula");
    }
    let element = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parser.syntax("unexpected trailing input");
    }
    Ok(element)
}
