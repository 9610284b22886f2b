//! Arithmetic expressions in one variable `x`.
//!
//! Grammar: numbers, `x`, `+ - * / ^`, parentheses, unary minus and the
//! functions `exp`, `sin`, `cos`, `log`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Log => "log",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse().map_err(|_| Error::Parse(format!("bad number '{text}'")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    // right associative; `-x^2` is `-(x^2)`
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.peek().cloned().ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::Op('(') => {
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Token::Ident(name) => {
                let f = match name.as_str() {
                    "x" => return Ok(Expr::X),
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "log" => Func::Log,
                    other => return Err(Error::Parse(format!("unknown name '{other}'"))),
                };
                if !self.eat('(') {
                    return Err(Error::Parse(format!("expected '(' after {name}")));
                }
                let arg = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(Expr::Call(f, Box::new(arg)))
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
        }
    }
}

fn num(v: f64) -> Box<Expr> {
    Box::new(Expr::Num(v))
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr> {
        let mut p = Parser { tokens: tokenize(s)?, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
        }
        Ok(e)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => match **b {
                Expr::Num(n) if n.fract() == 0.0 && n.abs() < 1e9 => a.eval(x).powi(n as i32),
                _ => a.eval(x).powf(b.eval(x)),
            },
            Expr::Call(f, e) => {
                let v = e.eval(x);
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Log => v.ln(),
                }
            }
        }
    }

    fn is_const(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::X => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_const(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_const() && b.is_const()
            }
        }
    }

    /// Symbolic derivative in `x`, lightly simplified.
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        let d = match self {
            Num(_) => Num(0.0),
            X => Num(1.0),
            Neg(e) => Neg(Box::new(e.derivative())),
            Add(a, b) => Add(Box::new(a.derivative()), Box::new(b.derivative())),
            Sub(a, b) => Sub(Box::new(a.derivative()), Box::new(b.derivative())),
            Mul(a, b) => Add(
                Box::new(Mul(Box::new(a.derivative()), b.clone())),
                Box::new(Mul(a.clone(), Box::new(b.derivative()))),
            ),
            Div(a, b) => Div(
                Box::new(Sub(
                    Box::new(Mul(Box::new(a.derivative()), b.clone())),
                    Box::new(Mul(a.clone(), Box::new(b.derivative()))),
                )),
                Box::new(Pow(b.clone(), num(2.0))),
            ),
            Pow(a, b) if b.is_const() => Mul(
                Box::new(Mul(b.clone(), Box::new(Pow(a.clone(), Box::new(Sub(b.clone(), num(1.0))))))),
                Box::new(a.derivative()),
            ),
            // (a^b)′ = a^b (b′ log a + b a′/a)
            Pow(a, b) => Mul(
                Box::new(self.clone()),
                Box::new(Add(
                    Box::new(Mul(Box::new(b.derivative()), Box::new(Call(Func::Log, a.clone())))),
                    Box::new(Div(Box::new(Mul(b.clone(), Box::new(a.derivative()))), a.clone())),
                )),
            ),
            Call(f, e) => {
                let outer = match f {
                    Func::Exp => Call(Func::Exp, e.clone()),
                    Func::Sin => Call(Func::Cos, e.clone()),
                    Func::Cos => Neg(Box::new(Call(Func::Sin, e.clone()))),
                    Func::Log => Div(num(1.0), e.clone()),
                };
                Mul(Box::new(outer), Box::new(e.derivative()))
            }
        };
        d.simplify()
    }

    /// Folds constants and drops trivial `0`/`1` terms.
    pub fn simplify(self) -> Expr {
        use Expr::*;
        let e = match self {
            Neg(a) => Neg(Box::new(a.simplify())),
            Add(a, b) => Add(Box::new(a.simplify()), Box::new(b.simplify())),
            Sub(a, b) => Sub(Box::new(a.simplify()), Box::new(b.simplify())),
            Mul(a, b) => Mul(Box::new(a.simplify()), Box::new(b.simplify())),
            Div(a, b) => Div(Box::new(a.simplify()), Box::new(b.simplify())),
            Pow(a, b) => Pow(Box::new(a.simplify()), Box::new(b.simplify())),
            Call(f, a) => Call(f, Box::new(a.simplify())),
            other => other,
        };
        if e.is_const() {
            return Num(e.eval(0.0));
        }
        match e {
            Add(a, b) if *a == Num(0.0) => *b,
            Add(a, b) if *b == Num(0.0) => *a,
            Sub(a, b) if *b == Num(0.0) => *a,
            Sub(a, b) if *a == Num(0.0) => Neg(b),
            Mul(a, _) if *a == Num(0.0) => Num(0.0),
            Mul(_, b) if *b == Num(0.0) => Num(0.0),
            Mul(a, b) if *a == Num(1.0) => *b,
            Mul(a, b) if *b == Num(1.0) => *a,
            Div(a, b) if *b == Num(1.0) => *a,
            Div(a, _) if *a == Num(0.0) => Num(0.0),
            Pow(a, b) if *b == Num(1.0) => *a,
            Pow(_, b) if *b == Num(0.0) => Num(1.0),
            other => other,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}
