//! Arithmetic expressions over `t`, `r` and state variables `x1..xn`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than a leading minus, so
//! `-x1^2` is `-(x1^2)` and `2^3^2` is `2^9`. Functions: `sin cos exp sqrt abs`
//! (one argument) and `pow` (two).

mod parser;

use std::fmt;

use thiserror::Error;

/// Maximum nesting depth of a parsed expression.
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable '{name}' is not bound")]
    Unbound { name: String },
    #[error("division by zero in '{expr}'")]
    DivisionByZero { expr: String },
    #[error("domain error in '{expr}': {message}")]
    Domain { expr: String, message: String },
    #[error("non-finite result from '{expr}'")]
    NonFinite { expr: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Time,
    Radius,
    /// 1-based state index, `x1` is `State(1)`.
    State(usize),
}

impl Var {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "t" => Some(Var::Time),
            "r" => Some(Var::Radius),
            _ => {
                let digits = name.strip_prefix('x')?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
                    return None;
                }
                digits.parse().ok().map(Var::State)
            }
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Time => f.write_str("t"),
            Var::Radius => f.write_str("r"),
            Var::State(i) => write!(f, "x{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        args: Vec<Expr>,
    },
}

/// Variable bindings for evaluation. Unset variables fail with
/// [`EvalError::Unbound`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Env<'a> {
    pub t: Option<f64>,
    pub x: &'a [f64],
    pub r: Option<f64>,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parser::parse(text)
    }

    /// Evaluate at time `t` and state `x` (`x[0]` is `x1`).
    pub fn eval(&self, t: f64, x: &[f64]) -> Result<f64, EvalError> {
        self.eval_env(&Env {
            t: Some(t),
            x,
            r: None,
        })
    }

    /// Evaluate a function of the radius variable `r` only.
    pub fn eval_radius(&self, r: f64) -> Result<f64, EvalError> {
        self.eval_env(&Env {
            t: None,
            x: &[],
            r: Some(r),
        })
    }

    pub fn eval_env(&self, env: &Env<'_>) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(var) => match *var {
                Var::Time => env.t.ok_or_else(|| unbound(var))?,
                Var::Radius => env.r.ok_or_else(|| unbound(var))?,
                Var::State(i) => *env.x.get(i - 1).ok_or_else(|| unbound(var))?,
            },
            Expr::Neg(inner) => -inner.eval_env(env)?,
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.eval_env(env)?;
                let b = rhs.eval_env(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero {
                                expr: self.to_string(),
                            });
                        }
                        a / b
                    }
                    BinOp::Pow => self.power(a, b)?,
                }
            }
            Expr::Call { func, args } => {
                let a = args[0].eval_env(env)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain {
                                expr: self.to_string(),
                                message: format!("square root of {a}"),
                            });
                        }
                        a.sqrt()
                    }
                    Func::Pow => {
                        let b = args[1].eval_env(env)?;
                        self.power(a, b)?
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                expr: self.to_string(),
            })
        }
    }

    fn power(&self, base: f64, exponent: f64) -> Result<f64, EvalError> {
        if exponent == exponent.trunc() && exponent.abs() <= 64.0 {
            if base == 0.0 && exponent < 0.0 {
                return Err(EvalError::DivisionByZero {
                    expr: self.to_string(),
                });
            }
            return Ok(base.powi(exponent as i32));
        }
        if base < 0.0 {
            return Err(EvalError::Domain {
                expr: self.to_string(),
                message: format!("negative base {base} with non-integer exponent {exponent}"),
            });
        }
        Ok(base.powf(exponent))
    }

    /// Largest state index referenced (`x3` gives 3), 0 when state-free.
    pub fn max_state_index(&self) -> usize {
        let mut m = 0;
        self.visit_vars(&mut |v| {
            if let Var::State(i) = v {
                m = m.max(i);
            }
        });
        m
    }

    pub fn uses_var(&self, var: Var) -> bool {
        let mut found = false;
        self.visit_vars(&mut |v| found |= v == var);
        found
    }

    pub fn uses_time(&self) -> bool {
        self.uses_var(Var::Time)
    }

    pub fn uses_state(&self) -> bool {
        self.max_state_index() > 0
    }

    fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => f(*v),
            Expr::Neg(e) => e.visit_vars(f),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.visit_vars(f);
                rhs.visit_vars(f);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }
}

fn unbound(var: &Var) -> EvalError {
    EvalError::Unbound {
        name: var.to_string(),
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

/// Fully parenthesised form; re-parses to an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Expr::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
