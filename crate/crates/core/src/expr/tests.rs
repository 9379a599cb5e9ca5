use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{gauge, GeometrySpec};
use crate::hcalc::Taylor2;

fn plain(e: &Expr, g: &GeometrySpec, p: &[f64]) -> Result<f64, EvalError> {
    e.eval(&PointEnv::plain(g, p, 1e-3)).map(|o| o.value)
}

fn taylor(e: &Expr, g: &GeometrySpec, p: &[f64]) -> Result<EvalOutput<Taylor2>, EvalError> {
    e.eval(&PointEnv::taylor(g, p, 1e-3))
}

const CORPUS: &[&str] = &[
    "x1",
    "x1^2 + 4*x2^2",
    "-x1^2",
    "-(x1)^2",
    "x1*x2 - x2/x1",
    "log(rho)",
    "-log(rho)",
    "rho^2",
    "rho^(-2)",
    "rho^(2-4)",
    "(1 + rho^2)^(-0.5)",
    "sqrt(x1^2 + x2^2 + 1)",
    "exp(-x1^2)",
    "abs(x1) + abs(x2)",
    "min(x1, x2, 3)",
    "max(x1, 0.5*x2)",
    "xh^3",
    "xh^2 * xv",
    "pi * x1",
    "1e-3 * x2",
    "2.5E+2 - x1",
    "((x1))",
    "x1 - x2 - 1",
    "x1 / x2 / 3",
    "1 - -x1",
    "--x1",
    "x1^2^0",
    "log(1 + x1^2) * exp(x2)",
    "sqrt(rho) / (1 + xh)",
    "x2^3 - 3*x2*x1^2",
    "(x1 + x2)^4",
    "exp(log(rho)*0.5)",
    "min(rho, 1) + max(rho, 2)",
    "abs(x1 - x2)^1.5",
    "x1*(x2 - (x1 + 2)*x2)",
    "rho^(1/3)",
    "rho^(-pi)",
    "log(rho) / rho^2",
    "4*x1^3 - 0.25*x2",
    "(x1 - 1)^2 + (x2 + 1)^2",
    "1/(1 + x1^2 + x2^2)",
    "exp(x1)*exp(-x2)",
    "sqrt(abs(x1*x2) + 2)",
    "max(x1, x2)^2",
    "xh",
    "xv",
    "rho*xh*xv",
    "-rho",
    "3",
    "0.125",
    "x2 + (x1 * (x2 + (x1 * (x2 + x1))))",
    "((1 + rho^2)^(-1))^2",
];

#[test]
fn corpus_parses_and_round_trips() {
    let g = GeometrySpec::grushin_plane();
    let mut ok = 0;
    for src in CORPUS {
        let e = match parse(src, &g) {
            Ok(e) => e,
            Err(err) => {
                assert_eq!(*src, "x1^2^0", "{src}: {err}");
                continue;
            }
        };
        let printed = e.to_string();
        let back = parse(&printed, &g).unwrap_or_else(|err| panic!("{printed}: {err}"));
        assert_eq!(back, e, "{src} -> {printed}");
        ok += 1;
    }
    assert!(ok >= 50);
}

#[test]
fn spec_examples() {
    let g = GeometrySpec::grushin_plane();
    let e = parse("x1^2 + 4*x2^2", &g).unwrap();
    assert_eq!(plain(&e, &g, &[1.0, 1.0]).unwrap(), 5.0);
    let h7 = GeometrySpec::htype7();
    let e = parse("log(rho)", &h7).unwrap();
    assert_eq!(plain(&e, &h7, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
    match parse("x9", &g) {
        Err(ParseError::VarOutOfRange { line: 1, col: 1, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn precedence() {
    let g = GeometrySpec::grushin_plane();
    let e = parse("-x1^2", &g).unwrap();
    assert_eq!(plain(&e, &g, &[3.0, 0.0]).unwrap(), -9.0);
    let e = parse("2^-1", &g).unwrap();
    assert_eq!(plain(&e, &g, &[0.0, 0.0]).unwrap(), 0.5);
    let e = parse("8 - 2 - 1", &g).unwrap();
    assert_eq!(plain(&e, &g, &[0.0, 0.0]).unwrap(), 5.0);
    let e = parse("8 / 2 * 4", &g).unwrap();
    assert_eq!(plain(&e, &g, &[0.0, 0.0]).unwrap(), 16.0);
}

#[test]
fn parse_errors_carry_positions() {
    let g = GeometrySpec::grushin_plane();
    match parse("x1 +\n  foo", &g) {
        Err(ParseError::UnknownIdent { line: 2, col: 3, name }) => assert_eq!(name, "foo"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse("x1 $ 2", &g),
        Err(ParseError::Lexical { line: 1, col: 4, .. })
    ));
    assert!(matches!(parse("log(x1, x2)", &g), Err(ParseError::Arity { .. })));
    assert!(matches!(parse("min()", &g), Err(ParseError::Arity { .. })));
    assert!(matches!(parse("x1^x2", &g), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse("x1^(x2)", &g), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse("x1^2^2", &g), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse("(x1", &g), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse("x0", &g), Err(ParseError::VarOutOfRange { .. })));
    assert!(matches!(parse("r", &g), Err(ParseError::UnknownIdent { .. })));
    assert!(matches!(parse("tr()", &g), Err(ParseError::UnknownIdent { .. })));
    assert!(parse("", &g).is_err());
}

#[test]
fn scopes() {
    assert!(Expr::parse("rho^2 + 1", Scope::Profile).is_ok());
    assert!(Expr::parse("x1", Scope::Profile).is_err());
    let op = Scope::Operator { d_amb: 3, m: 2 };
    assert!(Expr::parse("r*p1 + m1_2 + tr() + mminus(1, 2)", op).is_ok());
    assert!(Expr::parse("p3", op).is_err());
    assert!(Expr::parse("m3_1", op).is_err());
    assert!(Expr::parse("mplus(2, 1)", op).is_err());
}

#[test]
fn domain_errors() {
    let g = GeometrySpec::grushin_plane();
    let p = [-1.0, 0.5];
    assert!(matches!(
        plain(&parse("log(x1)", &g).unwrap(), &g, &p),
        Err(EvalError::Domain { func: "log", .. })
    ));
    assert!(matches!(
        plain(&parse("sqrt(x1)", &g).unwrap(), &g, &p),
        Err(EvalError::Domain { func: "sqrt", .. })
    ));
    assert!(matches!(
        plain(&parse("x1^0.5", &g).unwrap(), &g, &p),
        Err(EvalError::Domain { func: "pow", .. })
    ));
    assert_eq!(plain(&parse("x1^3", &g).unwrap(), &g, &p).unwrap(), -1.0);
    assert!(matches!(
        plain(&parse("1/(x1 + 1)", &g).unwrap(), &g, &p),
        Err(EvalError::DivisionByZero)
    ));
    assert!(matches!(
        plain(&parse("xh", &g).unwrap(), &g, &[0.0, 1.0]),
        Err(EvalError::Singular { .. })
    ));
    assert!(matches!(
        taylor(&parse("sqrt(x1)", &g).unwrap(), &g, &[0.0, 1.0]),
        Err(EvalError::NonFinite)
    ));
}

#[test]
fn bilinear_jet() {
    let g = GeometrySpec::htype7();
    let p = [2.0, 3.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let t = taylor(&parse("x1*x2", &g).unwrap(), &g, &p).unwrap().value;
    assert_eq!(t.grad.as_slice(), &[3.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    for i in 0..7 {
        for j in 0..7 {
            let want = if (i, j) == (0, 1) || (i, j) == (1, 0) { 1.0 } else { 0.0 };
            assert_eq!(t.hess[(i, j)], want);
        }
    }
}

#[test]
fn rho_gradient_on_htype7() {
    let g = GeometrySpec::htype7();
    let e = parse("rho", &g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let p: Vec<f64> = (0..7).map(|_| rng.random_range(-2.0..2.0)).collect();
        let t = taylor(&e, &g, &p).unwrap().value;
        let rho = gauge(&g, &p);
        let xh2: f64 = p[..4].iter().map(|v| v * v).sum();
        for i in 0..7 {
            let want = if i < 4 {
                2.0 * xh2 * p[i] / (2.0 * rho.powi(3))
            } else {
                p[i] / (2.0 * rho.powi(3))
            };
            assert!((t.grad[i] - want).abs() <= 1e-13 * (1.0 + want.abs()));
        }
    }
}

fn fd_jet(e: &Expr, g: &GeometrySpec, p: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let h = 1e-4;
    let d = p.len();
    let f = |q: &[f64]| plain(e, g, q).unwrap();
    let shift = |di: &[(usize, f64)]| {
        let mut q = p.to_vec();
        for &(i, s) in di {
            q[i] += s;
        }
        f(&q)
    };
    let grad = (0..d)
        .map(|i| (shift(&[(i, h)]) - shift(&[(i, -h)])) / (2.0 * h))
        .collect();
    let hess = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (shift(&[(i, h), (j, h)]) - shift(&[(i, h), (j, -h)]) - shift(&[(i, -h), (j, h)])
                        + shift(&[(i, -h), (j, -h)]))
                        / (4.0 * h * h)
                })
                .collect()
        })
        .collect();
    (grad, hess)
}

#[test]
fn taylor_matches_finite_differences_on_corpus() {
    let g = GeometrySpec::grushin_plane();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    for src in CORPUS {
        let Ok(e) = parse(src, &g) else { continue };
        for _ in 0..20 {
            let p: [f64; 2] = [rng.random_range(0.3..1.8), rng.random_range(0.2..1.5)];
            if (p[0] - p[1]).abs() < 0.2 {
                continue;
            }
            let Ok(t) = taylor(&e, &g, &p) else { continue };
            if t.nonsmooth {
                continue;
            }
            let (fg, fh) = fd_jet(&e, &g, &p);
            let scale = 1.0 + t.value.grad.amax() + t.value.hess.amax();
            for i in 0..2 {
                assert!(
                    (fg[i] - t.value.grad[i]).abs() <= 1e-6 * scale,
                    "{src} grad at {p:?}"
                );
                for j in 0..2 {
                    assert!(
                        (fh[i][j] - t.value.hess[(i, j)]).abs() <= 1e-5 * scale,
                        "{src} hess at {p:?}: {} vs {}",
                        fh[i][j],
                        t.value.hess[(i, j)]
                    );
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 400);
}

#[test]
fn value_slot_bit_identical_on_corpus() {
    let g = GeometrySpec::grushin(2, 1, 1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for src in CORPUS {
        let Ok(e) = parse(src, &g) else { continue };
        for _ in 0..10 {
            let p: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            if let (Ok(a), Ok(b)) = (plain(&e, &g, &p), taylor(&e, &g, &p)) {
                assert_eq!(a.to_bits(), b.value.value.to_bits(), "{src}");
            }
        }
    }
}

#[test]
fn kinks_are_flagged() {
    let g = GeometrySpec::grushin_plane();
    let p = [1.0, 1.0];
    let t = taylor(&parse("abs(x1 - x2)", &g).unwrap(), &g, &p).unwrap();
    assert!(t.nonsmooth);
    let t = taylor(&parse("max(x1, x2)", &g).unwrap(), &g, &p).unwrap();
    assert!(t.nonsmooth);
    let t = taylor(&parse("max(x1, 2*x2)", &g).unwrap(), &g, &p).unwrap();
    assert!(!t.nonsmooth);
    assert_eq!(t.value.grad.as_slice(), &[0.0, 2.0]);
}

#[test]
fn log_rho_on_grushin_plane_matches_finite_differences() {
    let g = GeometrySpec::grushin_plane();
    let e = parse("log(rho)", &g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let p = [rng.random_range(0.2..2.0), rng.random_range(-2.0..2.0)];
        let t = taylor(&e, &g, &p).unwrap().value;
        let (fg, fh) = fd_jet(&e, &g, &p);
        for i in 0..2 {
            assert!((fg[i] - t.grad[i]).abs() <= 1e-6 * (1.0 + t.grad[i].abs()));
            for j in 0..2 {
                assert!((fh[i][j] - t.hess[(i, j)]).abs() <= 1e-6 * (1.0 + t.hess[(i, j)].abs()) * 10.0);
            }
        }
    }
}

#[test]
fn constants_fold() {
    let e = Expr::parse("2*pi - 1", Scope::Profile).unwrap();
    assert_eq!(e.constant_value(), Some(2.0 * std::f64::consts::PI - 1.0));
    assert_eq!(Expr::parse("rho", Scope::Profile).unwrap().constant_value(), None);
}

#[test]
fn vector_arity() {
    let g = GeometrySpec::htype7();
    let four: Vec<String> = ["0", "x1", "1", "rho"].iter().map(|s| s.to_string()).collect();
    assert!(VectorExpr::parse(&four, &g, DriftFrame::Horizontal).is_ok());
    assert!(VectorExpr::parse(&four, &g, DriftFrame::Euclidean).is_err());
}
