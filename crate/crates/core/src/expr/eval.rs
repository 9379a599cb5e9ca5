use std::cell::OnceCell;

use nalgebra::DMatrix;

use super::{BinOp, Builtin, EvalError, Expr, Func, MatFunc, Node};
use crate::extremal::{pucci_minus, pucci_plus, Ellipticity};
use crate::geometry::{gauge_generic, GeometrySpec};
use crate::hcalc::Taylor2;
use crate::scalar::{sum_sq, Real};

/// Values of the names an expression can reference.
pub trait Env<R: Real> {
    fn constant(&self, c: f64) -> R;

    fn var(&self, _i: usize) -> Result<R, EvalError> {
        Err(EvalError::Unsupported("coordinates unavailable".into()))
    }

    fn builtin(&self, b: Builtin) -> Result<R, EvalError> {
        Err(EvalError::Unsupported(format!("{b:?} unavailable")))
    }

    fn grad(&self, _i: usize) -> Result<R, EvalError> {
        Err(EvalError::Unsupported("gradient slots unavailable".into()))
    }

    fn mat(&self, _i: usize, _j: usize) -> Result<R, EvalError> {
        Err(EvalError::Unsupported("matrix slots unavailable".into()))
    }

    fn mat_call(&self, _f: MatFunc) -> Result<R, EvalError> {
        Err(EvalError::Unsupported("matrix functions unavailable".into()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalOutput<R> {
    pub value: R,
    /// Set when `abs`, `min` or `max` was evaluated at a kink.
    pub nonsmooth: bool,
}

pub(crate) struct ConstEnv;

impl Env<f64> for ConstEnv {
    fn constant(&self, c: f64) -> f64 {
        c
    }
}

/// Point-scope environment over plain reals or Taylor scalars.
pub struct PointEnv<'g, R: Real> {
    g: &'g GeometrySpec,
    coords: Vec<R>,
    eps_sing: f64,
    rho: OnceCell<R>,
}

impl<'g, R: Real> PointEnv<'g, R> {
    pub fn new(g: &'g GeometrySpec, coords: Vec<R>, eps_sing: f64) -> Self {
        Self {
            g,
            coords,
            eps_sing,
            rho: OnceCell::new(),
        }
    }

    fn rho(&self) -> R {
        self.rho
            .get_or_init(|| gauge_generic(self.g, &self.coords))
            .clone()
    }
}

impl<'g> PointEnv<'g, f64> {
    pub fn plain(g: &'g GeometrySpec, p: &[f64], eps_sing: f64) -> Self {
        Self::new(g, p.to_vec(), eps_sing)
    }
}

impl<'g> PointEnv<'g, Taylor2> {
    pub fn taylor(g: &'g GeometrySpec, p: &[f64], eps_sing: f64) -> Self {
        Self::new(g, Taylor2::seed(p), eps_sing)
    }
}

impl<R: Real> Env<R> for PointEnv<'_, R> {
    fn constant(&self, c: f64) -> R {
        self.coords[0].lift(c)
    }

    fn var(&self, i: usize) -> Result<R, EvalError> {
        Ok(self.coords[i].clone())
    }

    fn builtin(&self, b: Builtin) -> Result<R, EvalError> {
        let split = self.g.layer_split();
        let zero = self.constant(0.0);
        match b {
            Builtin::Rho => Ok(self.rho()),
            Builtin::Xh => {
                let xh = sum_sq(&self.coords[..split], &zero).sqrt();
                let rho = self.rho().value();
                let ratio = if rho == 0.0 { 0.0 } else { xh.value() / rho };
                if ratio < self.eps_sing {
                    return Err(EvalError::Singular { ratio });
                }
                Ok(xh)
            }
            Builtin::Xv => Ok(sum_sq(&self.coords[split..], &zero).sqrt()),
            Builtin::R => Err(EvalError::Unsupported("'r' needs operator scope".into())),
        }
    }
}

/// One-dimensional environment binding `rho`.
pub struct ProfileEnv<R: Real> {
    pub rho: R,
}

impl<R: Real> Env<R> for ProfileEnv<R> {
    fn constant(&self, c: f64) -> R {
        self.rho.lift(c)
    }

    fn builtin(&self, b: Builtin) -> Result<R, EvalError> {
        match b {
            Builtin::Rho => Ok(self.rho.clone()),
            _ => Err(EvalError::Unsupported(format!("{b:?} unavailable"))),
        }
    }
}

/// Operator-scope environment: a point plus the `(r, p, M)` slots.
pub struct OperatorEnv<'a> {
    pub point: PointEnv<'a, f64>,
    pub r: f64,
    pub p: &'a [f64],
    pub m: &'a DMatrix<f64>,
}

impl Env<f64> for OperatorEnv<'_> {
    fn constant(&self, c: f64) -> f64 {
        c
    }

    fn var(&self, i: usize) -> Result<f64, EvalError> {
        self.point.var(i)
    }

    fn builtin(&self, b: Builtin) -> Result<f64, EvalError> {
        match b {
            Builtin::R => Ok(self.r),
            _ => self.point.builtin(b),
        }
    }

    fn grad(&self, i: usize) -> Result<f64, EvalError> {
        Ok(self.p[i])
    }

    fn mat(&self, i: usize, j: usize) -> Result<f64, EvalError> {
        Ok(self.m[(i, j)])
    }

    fn mat_call(&self, f: MatFunc) -> Result<f64, EvalError> {
        let ell = |l: f64, u: f64| {
            Ellipticity::new(l, u).map_err(|e| EvalError::Unsupported(e.to_string()))
        };
        let domain = |_| EvalError::Domain {
            func: "pucci",
            value: f64::NAN,
        };
        match f {
            MatFunc::Trace => Ok(self.m.trace()),
            MatFunc::MPlus(l, u) => pucci_plus(&ell(l, u)?, self.m).map_err(domain),
            MatFunc::MMinus(l, u) => pucci_minus(&ell(l, u)?, self.m).map_err(domain),
        }
    }
}

pub(crate) fn eval<R: Real, E: Env<R>>(e: &Expr, env: &E) -> Result<EvalOutput<R>, EvalError> {
    let mut nonsmooth = false;
    let value = eval_node(e.root(), env, &mut nonsmooth)?;
    if !value.all_finite() {
        return Err(EvalError::NonFinite);
    }
    Ok(EvalOutput { value, nonsmooth })
}

pub(crate) fn eval_node<R: Real, E: Env<R>>(
    n: &Node,
    env: &E,
    kink: &mut bool,
) -> Result<R, EvalError> {
    match n {
        Node::Num(v) => Ok(env.constant(*v)),
        Node::Var(i) => env.var(*i),
        Node::Builtin(b) => env.builtin(*b),
        Node::Grad(i) => env.grad(*i),
        Node::Mat(i, j) => env.mat(*i, *j),
        Node::MatCall(f) => env.mat_call(*f),
        Node::Neg(a) => Ok(-eval_node(a, env, kink)?),
        Node::Bin(op, a, b) => {
            let x = eval_node(a, env, kink)?;
            let y = eval_node(b, env, kink)?;
            Ok(match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.value() == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    x / y
                }
            })
        }
        Node::Pow(a, e) => {
            let x = eval_node(a, env, kink)?;
            let b = x.value();
            let e = *e;
            let integral = e.fract() == 0.0 && e.abs() <= i32::MAX as f64;
            if b == 0.0 && e < 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            if integral {
                Ok(x.powi(e as i32))
            } else if b < 0.0 {
                Err(EvalError::Domain {
                    func: "pow",
                    value: b,
                })
            } else {
                Ok(x.powf(e))
            }
        }
        Node::Call(f, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_node(a, env, kink)?);
            }
            call(*f, vals, kink)
        }
    }
}

fn call<R: Real>(f: Func, mut vals: Vec<R>, kink: &mut bool) -> Result<R, EvalError> {
    match f {
        Func::Abs => {
            let x = vals.pop().expect("arity checked at parse time");
            if x.value() == 0.0 {
                *kink = true;
            }
            Ok(x.abs())
        }
        Func::Log => {
            let x = vals.pop().expect("arity checked at parse time");
            if x.value() <= 0.0 {
                return Err(EvalError::Domain {
                    func: "log",
                    value: x.value(),
                });
            }
            Ok(x.ln())
        }
        Func::Sqrt => {
            let x = vals.pop().expect("arity checked at parse time");
            if x.value() < 0.0 {
                return Err(EvalError::Domain {
                    func: "sqrt",
                    value: x.value(),
                });
            }
            Ok(x.sqrt())
        }
        Func::Exp => Ok(vals.pop().expect("arity checked at parse time").exp()),
        Func::Min | Func::Max => {
            let want_min = f == Func::Min;
            let mut it = vals.into_iter();
            let mut best = it.next().expect("arity checked at parse time");
            for v in it {
                let better = if want_min {
                    v.value() < best.value()
                } else {
                    v.value() > best.value()
                };
                if v.value() == best.value() {
                    *kink = true;
                }
                if better {
                    best = v;
                }
            }
            Ok(best)
        }
    }
}
