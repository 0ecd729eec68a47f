//! Boolean conditions over state variables, as written in documents:
//! `pos == room2 && det == false`, `!(a == x) || b == y`.
//!
//! Values are unordered enum tokens; the only predicate is equality. The
//! words `true` and `false` act as constants when they stand alone and as
//! ordinary value tokens on the right of `==`.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("offset {offset}: unexpected character `{found}`")]
    BadCharacter { offset: usize, found: char },
    #[error("offset {offset}: expected {expected}, found {found}")]
    Unexpected {
        offset: usize,
        expected: &'static str,
        found: String,
    },
    #[error("unexpected end of expression; expected {expected}")]
    UnexpectedEnd { expected: &'static str },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropExpr {
    ConstTrue,
    ConstFalse,
    /// `variable == value`
    VarEq(String, String),
    Not(Box<PropExpr>),
    And(Box<PropExpr>, Box<PropExpr>),
    Or(Box<PropExpr>, Box<PropExpr>),
}

impl PropExpr {
    pub fn parse(input: &str) -> Result<PropExpr, ExprError> {
        let tokens = lex(input)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.or_expr()?;
        if let Some((offset, token)) = parser.peek() {
            return Err(ExprError::Unexpected {
                offset,
                expected: "end of expression",
                found: token.describe(),
            });
        }
        Ok(expr)
    }

    /// Evaluates under a total assignment of variables to value tokens.
    pub fn eval(&self, assign: &BTreeMap<String, String>) -> Result<bool, ExprError> {
        Ok(match self {
            PropExpr::ConstTrue => true,
            PropExpr::ConstFalse => false,
            PropExpr::VarEq(var, value) => {
                let actual = assign
                    .get(var)
                    .ok_or_else(|| ExprError::UnknownVariable(var.clone()))?;
                actual == value
            }
            PropExpr::Not(inner) => !inner.eval(assign)?,
            PropExpr::And(a, b) => a.eval(assign)? && b.eval(assign)?,
            PropExpr::Or(a, b) => a.eval(assign)? || b.eval(assign)?,
        })
    }

    /// Variables referenced anywhere in the expression, with the values each
    /// is compared against.
    pub fn comparisons(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        self.collect_comparisons(&mut out);
        out
    }

    fn collect_comparisons<'a>(&'a self, out: &mut Vec<(&'a str, &'a str)>) {
        match self {
            PropExpr::ConstTrue | PropExpr::ConstFalse => {}
            PropExpr::VarEq(var, value) => out.push((var, value)),
            PropExpr::Not(inner) => inner.collect_comparisons(out),
            PropExpr::And(a, b) | PropExpr::Or(a, b) => {
                a.collect_comparisons(out);
                b.collect_comparisons(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    AndAnd,
    OrOr,
    Bang,
    EqEq,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("`{name}`"),
            Token::AndAnd => "`&&`".to_string(),
            Token::OrOr => "`||`".to_string(),
            Token::Bang => "`!`".to_string(),
            Token::EqEq => "`==`".to_string(),
            Token::LParen => "`(`".to_string(),
            Token::RParen => "`)`".to_string(),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                tokens.push((offset, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((offset, Token::RParen));
                i += 1;
            }
            '!' => {
                tokens.push((offset, Token::Bang));
                i += 1;
            }
            '&' | '|' | '=' => {
                if i + 1 < chars.len() && chars[i + 1].1 == c {
                    let token = match c {
                        '&' => Token::AndAnd,
                        '|' => Token::OrOr,
                        _ => Token::EqEq,
                    };
                    tokens.push((offset, token));
                    i += 2;
                } else {
                    return Err(ExprError::BadCharacter { offset, found: c });
                }
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                tokens.push((offset, Token::Ident(name)));
            }
            other => return Err(ExprError::BadCharacter { offset, found: other }),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Token)> {
        self.tokens.get(self.pos).map(|(o, t)| (*o, t))
    }

    fn advance(&mut self) -> Option<(usize, Token)> {
        let item = self.tokens.get(self.pos).cloned();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn or_expr(&mut self) -> Result<PropExpr, ExprError> {
        let mut left = self.and_expr()?;
        while matches!(self.peek(), Some((_, Token::OrOr))) {
            self.advance();
            let right = self.and_expr()?;
            left = PropExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<PropExpr, ExprError> {
        let mut left = self.unary()?;
        while matches!(self.peek(), Some((_, Token::AndAnd))) {
            self.advance();
            let right = self.unary()?;
            left = PropExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<PropExpr, ExprError> {
        if matches!(self.peek(), Some((_, Token::Bang))) {
            self.advance();
            return Ok(PropExpr::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<PropExpr, ExprError> {
        match self.advance() {
            Some((_, Token::LParen)) => {
                let inner = self.or_expr()?;
                match self.advance() {
                    Some((_, Token::RParen)) => Ok(inner),
                    Some((offset, token)) => Err(ExprError::Unexpected {
                        offset,
                        expected: "`)`",
                        found: token.describe(),
                    }),
                    None => Err(ExprError::UnexpectedEnd { expected: "`)`" }),
                }
            }
            Some((offset, Token::Ident(name))) => {
                if matches!(self.peek(), Some((_, Token::EqEq))) {
                    self.advance();
                    match self.advance() {
                        Some((_, Token::Ident(value))) => Ok(PropExpr::VarEq(name, value)),
                        Some((offset, token)) => Err(ExprError::Unexpected {
                            offset,
                            expected: "a value token",
                            found: token.describe(),
                        }),
                        None => Err(ExprError::UnexpectedEnd {
                            expected: "a value token",
                        }),
                    }
                } else {
                    match name.as_str() {
                        "true" => Ok(PropExpr::ConstTrue),
                        "false" => Ok(PropExpr::ConstFalse),
                        _ => Err(ExprError::Unexpected {
                            offset,
                            expected: "`== value` after a variable name",
                            found: format!("`{name}`"),
                        }),
                    }
                }
            }
            Some((offset, token)) => Err(ExprError::Unexpected {
                offset,
                expected: "a condition",
                found: token.describe(),
            }),
            None => Err(ExprError::UnexpectedEnd {
                expected: "a condition",
            }),
        }
    }
}
