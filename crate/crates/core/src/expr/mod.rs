//! A small expression language for coefficient fields, test functions and
//! user operators. Grammar: `docs/expr.md`.

mod eval;
mod lexer;
mod parser;

pub use eval::{Env, EvalOutput, OperatorEnv, PointEnv, ProfileEnv};

use std::fmt;

use thiserror::Error;

use crate::geometry::GeometrySpec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Lexical { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown identifier '{name}'")]
    UnknownIdent { line: usize, col: usize, name: String },
    #[error("{line}:{col}: '{name}' expects {expected} argument(s), got {got}")]
    Arity {
        line: usize,
        col: usize,
        name: String,
        expected: String,
        got: usize,
    },
    #[error("{line}:{col}: variable '{name}' out of range (valid indices 1..={max})")]
    VarOutOfRange {
        line: usize,
        col: usize,
        name: String,
        max: usize,
    },
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{func} undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("point within the singular band of {{x_H = 0}} (|x_H|/rho = {ratio:e})")]
    Singular { ratio: f64 },
    #[error("derivative is not finite at this point")]
    NonFinite,
    #[error("{0}")]
    Unsupported(String),
}

/// Which names an expression may reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// `x1..x{d}`, `rho`, `xh`, `xv`.
    Point { d_amb: usize },
    /// The single variable `rho`, for one-dimensional radial profiles.
    Profile,
    /// Point names plus `r`, `p1..p{m}`, `m{i}_{j}` and the matrix
    /// built-ins `tr()`, `mplus(l, L)`, `mminus(l, L)`.
    Operator { d_amb: usize, m: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Abs,
    Log,
    Sqrt,
    Exp,
    Min,
    Max,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Rho,
    Xh,
    Xv,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatFunc {
    Trace,
    MPlus(f64, f64),
    MMinus(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    /// Coordinate `x{i+1}`.
    Var(usize),
    Builtin(Builtin),
    /// Gradient slot `p{i+1}` (operator scope).
    Grad(usize),
    /// Matrix entry `m{i+1}_{j+1}` (operator scope).
    Mat(usize, usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
    Call(Func, Vec<Node>),
    MatCall(MatFunc),
}

impl Node {
    fn is_constant(&self) -> bool {
        match self {
            Node::Num(_) => true,
            Node::Neg(a) | Node::Pow(a, _) => a.is_constant(),
            Node::Bin(_, a, b) => a.is_constant() && b.is_constant(),
            Node::Call(_, args) => args.iter().all(Node::is_constant),
            _ => false,
        }
    }

    /// True when the node references the gauge or layer norms.
    fn uses_builtins(&self) -> bool {
        match self {
            Node::Builtin(b) => matches!(b, Builtin::Rho | Builtin::Xh | Builtin::Xv),
            Node::Neg(a) | Node::Pow(a, _) => a.uses_builtins(),
            Node::Bin(_, a, b) => a.uses_builtins() || b.uses_builtins(),
            Node::Call(_, args) => args.iter().any(Node::uses_builtins),
            _ => false,
        }
    }
}

/// A parsed expression bound to a scope.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    scope: Scope,
}

impl Expr {
    pub fn parse(src: &str, scope: Scope) -> Result<Self, ParseError> {
        let root = parser::parse(src, scope)?;
        Ok(Self { root, scope })
    }

    /// Parses a point-scope expression for `g`.
    pub fn for_geometry(src: &str, g: &GeometrySpec) -> Result<Self, ParseError> {
        Self::parse(src, Scope::Point { d_amb: g.d_amb() })
    }

    pub fn constant(c: f64, scope: Scope) -> Self {
        Self {
            root: Node::Num(c),
            scope,
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn is_constant(&self) -> bool {
        self.root.is_constant()
    }

    pub fn uses_builtins(&self) -> bool {
        self.root.uses_builtins()
    }

    /// Value of a constant expression.
    pub fn constant_value(&self) -> Option<f64> {
        if !self.is_constant() {
            return None;
        }
        eval::eval_node(&self.root, &eval::ConstEnv, &mut false).ok()
    }

    pub fn eval<R: crate::scalar::Real, E: Env<R>>(&self, env: &E) -> Result<EvalOutput<R>, EvalError> {
        eval::eval(self, env)
    }
}

/// Parses a point-scope expression for `g`.
pub fn parse(src: &str, g: &GeometrySpec) -> Result<Expr, ParseError> {
    Expr::for_geometry(src, g)
}

fn fmt_num(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{v:?}")
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) => fmt_num(*v, f),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Builtin(Builtin::Rho) => write!(f, "rho"),
            Node::Builtin(Builtin::Xh) => write!(f, "xh"),
            Node::Builtin(Builtin::Xv) => write!(f, "xv"),
            Node::Builtin(Builtin::R) => write!(f, "r"),
            Node::Grad(i) => write!(f, "p{}", i + 1),
            Node::Mat(i, j) => write!(f, "m{}_{}", i + 1, j + 1),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Node::Pow(a, e) => {
                write!(f, "({a})^(")?;
                fmt_num(*e, f)?;
                write!(f, ")")
            }
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Node::MatCall(MatFunc::Trace) => write!(f, "tr()"),
            Node::MatCall(MatFunc::MPlus(l, u)) => write!(f, "mplus({l:?}, {u:?})"),
            Node::MatCall(MatFunc::MMinus(l, u)) => write!(f, "mminus({l:?}, {u:?})"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum DriftFrame {
    /// `m` components, paired with the horizontal gradient.
    Horizontal,
    /// `d_amb` components, paired with the Euclidean gradient.
    Euclidean,
}

/// A vector field given componentwise.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorExpr {
    pub frame: DriftFrame,
    pub entries: Vec<Expr>,
}

impl VectorExpr {
    pub fn parse(
        srcs: &[String],
        g: &GeometrySpec,
        frame: DriftFrame,
    ) -> Result<Self, ParseError> {
        let want = match frame {
            DriftFrame::Horizontal => g.m(),
            DriftFrame::Euclidean => g.d_amb(),
        };
        if srcs.len() != want {
            return Err(ParseError::Arity {
                line: 1,
                col: 1,
                name: "drift".to_string(),
                expected: want.to_string(),
                got: srcs.len(),
            });
        }
        let entries = srcs
            .iter()
            .map(|s| Expr::for_geometry(s, g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { frame, entries })
    }

    pub fn zero(g: &GeometrySpec, frame: DriftFrame) -> Self {
        let n = match frame {
            DriftFrame::Horizontal => g.m(),
            DriftFrame::Euclidean => g.d_amb(),
        };
        let scope = Scope::Point { d_amb: g.d_amb() };
        Self {
            frame,
            entries: vec![Expr::constant(0.0, scope); n],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests;
