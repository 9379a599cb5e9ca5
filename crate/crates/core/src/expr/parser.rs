use super::lexer::{lex, Tok, Token};
use super::{BinOp, Builtin, Func, MatFunc, Node, ParseError, Scope};

pub(crate) fn parse(src: &str, scope: Scope) -> Result<Node, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        scope,
    };
    let node = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(p.syntax(t, "unexpected trailing input"));
    }
    Ok(node)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Scope,
}

impl Parser {
    fn peek(&self) -> Token {
        self.toks[self.pos].clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, t: Token, msg: &str) -> ParseError {
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        let t = self.bump();
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.syntax(t, &format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let inner = self.factor()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        let base = self.base()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let e = self.exponent()?;
        let t = self.peek();
        if t.tok == Tok::Caret {
            return Err(self.syntax(t, "chained '^' is not allowed; use parentheses"));
        }
        Ok(Node::Pow(Box::new(base), e))
    }

    fn exponent(&mut self) -> Result<f64, ParseError> {
        let t = self.peek();
        match t.tok {
            Tok::Minus => {
                self.bump();
                let n = self.bump();
                match n.tok {
                    Tok::Num(v) => Ok(-v),
                    _ => Err(self.syntax(n, "exponent must be a number or a constant in parentheses")),
                }
            }
            Tok::Num(v) => {
                self.bump();
                Ok(v)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.fold_constant(&inner, &t)
            }
            _ => Err(self.syntax(t, "exponent must be a number or a constant in parentheses")),
        }
    }

    fn fold_constant(&self, node: &Node, at: &Token) -> Result<f64, ParseError> {
        if !node.is_constant() {
            return Err(self.syntax(at.clone(), "exponent must be constant"));
        }
        super::eval::eval_node(node, &super::eval::ConstEnv, &mut false)
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| self.syntax(at.clone(), "constant exponent does not evaluate"))
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    self.bump();
                    let args = self.args()?;
                    self.call(&t, &name, args)
                } else {
                    self.ident(&t, &name)
                }
            }
            Tok::End => Err(self.syntax(t, "unexpected end of input")),
            _ => Err(self.syntax(t, "expected a number, identifier or '('")),
        }
    }

    fn args(&mut self) -> Result<Vec<Node>, ParseError> {
        let mut args = Vec::new();
        if self.peek().tok == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            let t = self.bump();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => return Ok(args),
                _ => return Err(self.syntax(t, "expected ',' or ')'")),
            }
        }
    }

    fn arity(&self, t: &Token, name: &str, expected: &str, got: usize) -> ParseError {
        ParseError::Arity {
            line: t.line,
            col: t.col,
            name: name.to_string(),
            expected: expected.to_string(),
            got,
        }
    }

    fn call(&self, t: &Token, name: &str, args: Vec<Node>) -> Result<Node, ParseError> {
        let unary = |f: Func| {
            if args.len() == 1 {
                Ok(Node::Call(f, args.clone()))
            } else {
                Err(self.arity(t, name, "1", args.len()))
            }
        };
        match name {
            "abs" => unary(Func::Abs),
            "log" => unary(Func::Log),
            "sqrt" => unary(Func::Sqrt),
            "exp" => unary(Func::Exp),
            "min" | "max" => {
                if args.is_empty() {
                    return Err(self.arity(t, name, "at least 1", 0));
                }
                let f = if name == "min" { Func::Min } else { Func::Max };
                Ok(Node::Call(f, args))
            }
            "tr" | "mplus" | "mminus" if matches!(self.scope, Scope::Operator { .. }) => {
                if name == "tr" {
                    if !args.is_empty() {
                        return Err(self.arity(t, name, "0", args.len()));
                    }
                    return Ok(Node::MatCall(MatFunc::Trace));
                }
                if args.len() != 2 {
                    return Err(self.arity(t, name, "2", args.len()));
                }
                let l = self.fold_constant(&args[0], t)?;
                let u = self.fold_constant(&args[1], t)?;
                if !(l > 0.0 && l <= u) {
                    return Err(self.syntax(t.clone(), "ellipticity needs 0 < lambda <= Lambda"));
                }
                Ok(Node::MatCall(if name == "mplus" {
                    MatFunc::MPlus(l, u)
                } else {
                    MatFunc::MMinus(l, u)
                }))
            }
            _ => Err(ParseError::UnknownIdent {
                line: t.line,
                col: t.col,
                name: name.to_string(),
            }),
        }
    }

    fn ident(&self, t: &Token, name: &str) -> Result<Node, ParseError> {
        let unknown = || ParseError::UnknownIdent {
            line: t.line,
            col: t.col,
            name: name.to_string(),
        };
        if name == "pi" {
            return Ok(Node::Num(std::f64::consts::PI));
        }
        let (d_amb, m) = match self.scope {
            Scope::Profile => {
                return if name == "rho" {
                    Ok(Node::Builtin(Builtin::Rho))
                } else {
                    Err(unknown())
                };
            }
            Scope::Point { d_amb } => (d_amb, None),
            Scope::Operator { d_amb, m } => (d_amb, Some(m)),
        };
        match name {
            "rho" => return Ok(Node::Builtin(Builtin::Rho)),
            "xh" => return Ok(Node::Builtin(Builtin::Xh)),
            "xv" => return Ok(Node::Builtin(Builtin::Xv)),
            "r" if m.is_some() => return Ok(Node::Builtin(Builtin::R)),
            _ => {}
        }
        let index = |digits: &str, max: usize| -> Result<Option<usize>, ParseError> {
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Ok(None);
            }
            match digits.parse::<usize>() {
                Ok(k) if k >= 1 && k <= max => Ok(Some(k - 1)),
                _ => Err(ParseError::VarOutOfRange {
                    line: t.line,
                    col: t.col,
                    name: name.to_string(),
                    max,
                }),
            }
        };
        if let Some(rest) = name.strip_prefix('x') {
            if let Some(k) = index(rest, d_amb)? {
                return Ok(Node::Var(k));
            }
        }
        if let Some(m) = m {
            if let Some(rest) = name.strip_prefix('p') {
                if let Some(k) = index(rest, m)? {
                    return Ok(Node::Grad(k));
                }
            }
            if let Some(rest) = name.strip_prefix('m') {
                if let Some((a, b)) = rest.split_once('_') {
                    if let (Some(i), Some(j)) = (index(a, m)?, index(b, m)?) {
                        return Ok(Node::Mat(i, j));
                    }
                }
            }
        }
        Err(unknown())
    }
}
