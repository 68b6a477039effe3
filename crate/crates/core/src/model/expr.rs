//! Arithmetic expressions over named parameters.
//!
//! These are the entries of a parametric transition function: `p`, `1-p`,
//! `p*b`, `1/3`, and so on. Evaluation is plain `f64` arithmetic; a zero
//! divisor is reported instead of producing an infinity.

use std::fmt;

use crate::error::ExprError;

#[derive(Debug, Clone, PartialEq)]
pub enum ParamExpr {
    Const(f64),
    Param(String),
    Neg(Box<ParamExpr>),
    Add(Box<ParamExpr>, Box<ParamExpr>),
    Sub(Box<ParamExpr>, Box<ParamExpr>),
    Mul(Box<ParamExpr>, Box<ParamExpr>),
    Div(Box<ParamExpr>, Box<ParamExpr>),
}

impl ParamExpr {
    pub fn param(name: impl Into<String>) -> Self {
        ParamExpr::Param(name.into())
    }

    /// Evaluates the expression, resolving parameters through `lookup`.
    pub fn eval_with<F>(&self, lookup: &F) -> Result<f64, ExprError>
    where
        F: Fn(&str) -> Option<f64>,
    {
        let v = match self {
            ParamExpr::Const(c) => *c,
            ParamExpr::Param(name) => {
                lookup(name).ok_or_else(|| ExprError::UnboundParameter(name.clone()))?
            }
            ParamExpr::Neg(e) => -e.eval_with(lookup)?,
            ParamExpr::Add(a, b) => a.eval_with(lookup)? + b.eval_with(lookup)?,
            ParamExpr::Sub(a, b) => a.eval_with(lookup)? - b.eval_with(lookup)?,
            ParamExpr::Mul(a, b) => a.eval_with(lookup)? * b.eval_with(lookup)?,
            ParamExpr::Div(a, b) => {
                let num = a.eval_with(lookup)?;
                let den = b.eval_with(lookup)?;
                if den == 0.0 {
                    return Err(ExprError::DivisionByZero);
                }
                num / den
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NonFinite)
        }
    }

    /// Evaluates against `(name, value)` bindings.
    pub fn eval(&self, point: &[(&str, f64)]) -> Result<f64, ExprError> {
        self.eval_with(&|name: &str| point.iter().find(|(n, _)| *n == name).map(|(_, v)| *v))
    }

    /// Names of all parameters referenced, in first-occurrence order.
    pub fn params(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ParamExpr::Const(_) => {}
            ParamExpr::Param(n) => {
                if !out.contains(&n.as_str()) {
                    out.push(n);
                }
            }
            ParamExpr::Neg(e) => e.collect_params(out),
            ParamExpr::Add(a, b)
            | ParamExpr::Sub(a, b)
            | ParamExpr::Mul(a, b)
            | ParamExpr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ParamExpr::Add(..) | ParamExpr::Sub(..) => 1,
            ParamExpr::Mul(..) | ParamExpr::Div(..) => 2,
            ParamExpr::Neg(_) => 3,
            ParamExpr::Const(c) if *c < 0.0 => 3,
            ParamExpr::Const(_) | ParamExpr::Param(_) => 4,
        }
    }

    /// Parses an infix expression.
    ///
    /// On failure returns the 0-based character offset of the problem and a
    /// message; callers translate the offset into a source location.
    pub fn parse(text: &str) -> Result<ParamExpr, (usize, String)> {
        let mut p = ExprParser {
            chars: text.char_indices().collect(),
            pos: 0,
            len: text.len(),
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            let (off, c) = p.chars[p.pos];
            return Err((off, format!("unexpected `{c}`")));
        }
        Ok(e)
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Left operands need parentheses only on lower precedence; right
        // operands also on equal precedence since - and / do not associate.
        let child = |f: &mut fmt::Formatter<'_>, e: &ParamExpr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            ParamExpr::Const(c) => write!(f, "{c}"),
            ParamExpr::Param(n) => write!(f, "{n}"),
            ParamExpr::Neg(e) => {
                write!(f, "-")?;
                child(f, e, 4)
            }
            ParamExpr::Add(a, b) | ParamExpr::Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, "{}", if matches!(self, ParamExpr::Add(..)) { "+" } else { "-" })?;
                child(f, b, 2)
            }
            ParamExpr::Mul(a, b) | ParamExpr::Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "{}", if matches!(self, ParamExpr::Mul(..)) { "*" } else { "/" })?;
                child(f, b, 3)
            }
        }
    }
}

struct ExprParser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

type PResult<T> = Result<T, (usize, String)>;

impl ExprParser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |(o, _)| *o)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn expr(&mut self) -> PResult<ParamExpr> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' {
                ParamExpr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                ParamExpr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<ParamExpr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == '*' {
                ParamExpr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                ParamExpr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<ParamExpr> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(ParamExpr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<ParamExpr> {
        let start = self.offset();
        match self.peek() {
            None => Err((start, "expected expression".into())),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err((self.offset(), "expected `)`".into())),
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = self.chars.get(self.pos) {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                Ok(ParamExpr::Param(name))
            }
            Some(c) => Err((start, format!("unexpected `{c}`"))),
        }
    }

    fn number(&mut self) -> PResult<ParamExpr> {
        let start = self.offset();
        let mut text = String::new();
        let mut prev = ' ';
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            let exp_sign = (c == '-' || c == '+') && (prev == 'e' || prev == 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                text.push(c);
                prev = c;
                self.pos += 1;
            } else {
                break;
            }
        }
        text.parse::<f64>()
            .map(ParamExpr::Const)
            .map_err(|_| (start, format!("malformed number `{text}`")))
    }
}
