//! Scalar expressions over a fixed set of named real variables.
//!
//! The grammar is ordinary infix notation:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          (right-associative)
//! primary := number | constant | variable | function '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions are `sin cos tan asin acos atan exp log sqrt abs`, constants are
//! `pi` and `e`. The element-wise operators `.*`, `./` and `.^` are accepted as
//! aliases of `*`, `/` and `^`, and a leading anonymous-function header such as
//! `@(x1,x2)` is stripped when its names match the declared variables.
//!
//! Evaluation follows IEEE-754: division by zero gives an infinity and invalid
//! operations give NaN. Nothing in [`Expression::evaluate`] can fail.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("function `{function}` takes {expected} argument(s), got {found}")]
    Arity {
        function: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("anonymous-function header ({header}) does not match declared variables ({declared})")]
    HeaderMismatch { header: String, declared: String },
}

/// Ordered, duplicate-free list of variable names. Position `k` is coordinate `x_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSet {
    names: Vec<String>,
}

impl VariableSet {
    pub fn new<I, S>(names: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if !is_identifier(&name) || Function::from_name(&name).is_some() || constant(&name).is_some() {
                return Err(ExprError::InvalidVariableName(name));
            }
            if out.contains(&name) {
                return Err(ExprError::DuplicateVariable(name));
            }
            out.push(name);
        }
        Ok(Self { names: out })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn constant(name: &str) -> Option<Constant> {
    match name {
        "pi" => Some(Constant::Pi),
        "e" => Some(Constant::E),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Function {
    pub const ALL: [Function; 10] = [
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::Asin,
        Function::Acos,
        Function::Atan,
        Function::Exp,
        Function::Log,
        Function::Sqrt,
        Function::Abs,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Asin => "asin",
            Function::Acos => "acos",
            Function::Atan => "atan",
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Function::Sin => x.sin(),
            Function::Cos => x.cos(),
            Function::Tan => x.tan(),
            Function::Asin => x.asin(),
            Function::Acos => x.acos(),
            Function::Atan => x.atan(),
            Function::Exp => x.exp(),
            Function::Log => x.ln(),
            Function::Sqrt => x.sqrt(),
            Function::Abs => x.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }

    #[inline]
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
            BinaryOp::Pow => a.powf(b),
        }
    }
}

/// Syntax tree node. Variables carry their coordinate index.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Number(f64),
    Constant(Constant),
    Variable {
        index: usize,
        name: String,
    },
    Neg(Box<Node>),
    Binary {
        op: BinaryOp,
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Call {
        function: Function,
        arg: Box<Node>,
    },
}

impl Node {
    fn eval(&self, point: &[f64]) -> f64 {
        match self {
            Node::Number(v) => *v,
            Node::Constant(c) => c.value(),
            Node::Variable { index, .. } => point[*index],
            Node::Neg(inner) => -inner.eval(point),
            Node::Binary { op, lhs, rhs } => op.apply(lhs.eval(point), rhs.eval(point)),
            Node::Call { function, arg } => function.apply(arg.eval(point)),
        }
    }

    fn max_variable(&self) -> Option<usize> {
        match self {
            Node::Number(_) | Node::Constant(_) => None,
            Node::Variable { index, .. } => Some(*index),
            Node::Neg(inner) | Node::Call { arg: inner, .. } => inner.max_variable(),
            Node::Binary { lhs, rhs, .. } => lhs.max_variable().max(rhs.max_variable()),
        }
    }
}

/// Canonical serialization: fully parenthesized infix.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Number(v) => write!(f, "{v:?}"),
            Node::Constant(c) => f.write_str(c.name()),
            Node::Variable { name, .. } => f.write_str(name),
            Node::Neg(inner) => write!(f, "(-{inner})"),
            Node::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Node::Call { function, arg } => write!(f, "{}({arg})", function.name()),
        }
    }
}

/// A parsed scalar expression. Immutable; evaluation is reentrant.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    source: String,
    arity: usize,
}

impl Expression {
    pub fn parse(source: &str, vars: &VariableSet) -> Result<Self, ExprError> {
        parse(source, vars)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Number of variables the expression was declared over.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluates at `point`.
    ///
    /// # Panics
    ///
    /// If `point` is shorter than the declared variable set.
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        assert!(
            point.len() >= self.arity,
            "point has {} coordinates, expression declares {}",
            point.len(),
            self.arity
        );
        self.root.eval(point)
    }

    pub fn canonical(&self) -> String {
        self.root.to_string()
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

pub fn parse(source: &str, vars: &VariableSet) -> Result<Expression, ExprError> {
    let body_offset = strip_header(source, vars)?;
    let body = &source[body_offset..];
    if body.trim().is_empty() {
        return Err(ExprError::Empty);
    }
    let tokens = lex(body, body_offset)?;
    let mut parser = Parser { tokens, pos: 0, vars };
    let root = parser.expr()?;
    let tok = parser.peek();
    if tok.kind != TokenKind::End {
        return Err(ExprError::Syntax {
            position: tok.position,
            message: format!("unexpected {}", tok.kind.describe()),
        });
    }
    debug_assert!(root.max_variable().is_none_or(|i| i < vars.len()));
    Ok(Expression {
        root,
        source: source.to_owned(),
        arity: vars.len(),
    })
}

/// Returns the byte offset where the expression body starts.
fn strip_header(source: &str, vars: &VariableSet) -> Result<usize, ExprError> {
    let trimmed = source.trim_start();
    let lead = source.len() - trimmed.len();
    let Some(rest) = trimmed.strip_prefix('@') else {
        return Ok(0);
    };
    let rest_trim = rest.trim_start();
    if !rest_trim.starts_with('(') {
        return Err(ExprError::Syntax {
            position: lead + 1,
            message: "expected `(` after `@`".into(),
        });
    }
    let open = source.len() - rest_trim.len();
    let Some(close_rel) = rest_trim.find(')') else {
        return Err(ExprError::Syntax {
            position: open,
            message: "unterminated anonymous-function header".into(),
        });
    };
    let inner = &rest_trim[1..close_rel];
    let names: Vec<&str> = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.len() != vars.len() || names.iter().zip(vars.names()).any(|(a, b)| *a != b) {
        return Err(ExprError::HeaderMismatch {
            header: names.join(","),
            declared: vars.names().join(","),
        });
    }
    Ok(open + close_rel + 1)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    position: usize,
}

fn lex(src: &str, offset: usize) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let position = offset + i;
        let single = |kind| Token { kind, position };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' => {
                tokens.push(single(TokenKind::Plus));
                i += 1;
            }
            b'-' => {
                tokens.push(single(TokenKind::Minus));
                i += 1;
            }
            b'*' => {
                tokens.push(single(TokenKind::Star));
                i += 1;
            }
            b'/' => {
                tokens.push(single(TokenKind::Slash));
                i += 1;
            }
            b'^' => {
                tokens.push(single(TokenKind::Caret));
                i += 1;
            }
            b'(' => {
                tokens.push(single(TokenKind::LParen));
                i += 1;
            }
            b')' => {
                tokens.push(single(TokenKind::RParen));
                i += 1;
            }
            b',' => {
                tokens.push(single(TokenKind::Comma));
                i += 1;
            }
            b'.' if matches!(bytes.get(i + 1), Some(b'*' | b'/' | b'^')) => {
                let kind = match bytes[i + 1] {
                    b'*' => TokenKind::Star,
                    b'/' => TokenKind::Slash,
                    _ => TokenKind::Caret,
                };
                tokens.push(single(kind));
                i += 2;
            }
            b'0'..=b'9' | b'.' => {
                let (value, len) = lex_number(&src[i..]).ok_or_else(|| ExprError::Syntax {
                    position,
                    message: "malformed number".into(),
                })?;
                tokens.push(single(TokenKind::Number(value)));
                i += len;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(single(TokenKind::Ident(src[start..i].to_owned())));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    position,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::End,
        position: offset + src.len(),
    });
    Ok(tokens)
}

/// Scans `digits [. digits] [(e|E) [+-] digits]`, stopping before an
/// element-wise operator such as `.*`.
fn lex_number(s: &str) -> Option<(f64, usize)> {
    let b = s.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - start
    };
    let int_digits = digits(&mut i);
    let mut frac_digits = 0;
    if i < b.len() && b[i] == b'.' && !matches!(b.get(i + 1), Some(b'*' | b'/' | b'^')) {
        i += 1;
        frac_digits = digits(&mut i);
    }
    if int_digits + frac_digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if digits(&mut j) == 0 {
            return None;
        }
        i = j;
    }
    s[..i].parse().ok().map(|v| (v, i))
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a VariableSet,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::End {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &str) -> ExprError {
        let tok = self.peek();
        ExprError::Syntax {
            position: tok.position,
            message: format!("expected {expected}, found {}", tok.kind.describe()),
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinaryOp::Add,
                TokenKind::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Node::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinaryOp::Mul,
                TokenKind::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Node::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        match self.peek().kind {
            TokenKind::Minus => {
                self.advance();
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            TokenKind::Plus => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.primary()?;
        if self.peek().kind == TokenKind::Caret {
            self.advance();
            let exponent = self.unary()?;
            return Ok(Node::Binary {
                op: BinaryOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Number(v) => {
                self.advance();
                Ok(Node::Number(v))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.advance();
                if let Some(function) = Function::from_name(&name) {
                    return self.call(function);
                }
                if self.peek().kind == TokenKind::LParen {
                    return Err(ExprError::UnknownIdentifier {
                        name,
                        position: tok.position,
                    });
                }
                if let Some(index) = self.vars.index_of(&name) {
                    return Ok(Node::Variable { index, name });
                }
                if let Some(c) = constant(&name) {
                    return Ok(Node::Constant(c));
                }
                Err(ExprError::UnknownIdentifier {
                    name,
                    position: tok.position,
                })
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }

    fn call(&mut self, function: Function) -> Result<Node, ExprError> {
        if self.peek().kind != TokenKind::LParen {
            return Err(self.unexpected(&format!("`(` after `{}`", function.name())));
        }
        self.advance();
        let mut args = Vec::new();
        if self.peek().kind != TokenKind::RParen {
            args.push(self.expr()?);
            while self.peek().kind == TokenKind::Comma {
                self.advance();
                args.push(self.expr()?);
            }
        }
        self.expect_rparen()?;
        if args.len() != 1 {
            return Err(ExprError::Arity {
                function: function.name().into(),
                expected: 1,
                found: args.len(),
            });
        }
        let arg = args.pop().expect("one argument");
        Ok(Node::Call {
            function,
            arg: Box::new(arg),
        })
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.peek().kind == TokenKind::RParen {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xy() -> VariableSet {
        VariableSet::new(["x1", "x2"]).unwrap()
    }

    fn eval(src: &str, point: &[f64]) -> f64 {
        parse(src, &xy()).unwrap().evaluate(point)
    }

    #[test]
    fn matlab_style_equation() {
        let e = parse("x1*cos(0.5*x2)", &xy()).unwrap();
        let expected = Node::Binary {
            op: BinaryOp::Mul,
            lhs: Box::new(Node::Variable {
                index: 0,
                name: "x1".into(),
            }),
            rhs: Box::new(Node::Call {
                function: Function::Cos,
                arg: Box::new(Node::Binary {
                    op: BinaryOp::Mul,
                    lhs: Box::new(Node::Number(0.5)),
                    rhs: Box::new(Node::Variable {
                        index: 1,
                        name: "x2".into(),
                    }),
                }),
            }),
        };
        assert_eq!(e.root(), &expected);
        // MATLAB element-wise spelling parses to the same tree.
        let dotted = parse("x1.*cos(0.5*x2)", &xy()).unwrap();
        assert_eq!(dotted.root(), &expected);
    }

    #[test]
    fn anonymous_header_is_stripped() {
        let e = parse("@(x1,x2)-x1+0.5.*x2.^2", &xy()).unwrap();
        let plain = parse("-x1+0.5*x2^2", &xy()).unwrap();
        assert_eq!(e.root(), plain.root());
        assert!(matches!(
            parse("@(a,b)a+b", &xy()),
            Err(ExprError::HeaderMismatch { .. })
        ));
    }

    #[test]
    fn incomplete_expression_errors_at_end() {
        let err = parse("x1 +", &xy()).unwrap_err();
        assert_eq!(
            err,
            ExprError::Syntax {
                position: 4,
                message: "expected a number, variable, function or `(`, found end of input".into()
            }
        );
    }

    #[test]
    fn unknown_identifier_is_named() {
        match parse("x3", &xy()).unwrap_err() {
            ExprError::UnknownIdentifier { name, position } => {
                assert_eq!(name, "x3");
                assert_eq!(position, 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(matches!(
            parse("foo(x1)", &xy()),
            Err(ExprError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn arity_mismatch() {
        assert_eq!(
            parse("sin(x1, x2)", &xy()).unwrap_err(),
            ExprError::Arity {
                function: "sin".into(),
                expected: 1,
                found: 2
            }
        );
        assert!(matches!(
            parse("cos()", &xy()),
            Err(ExprError::Arity { found: 0, .. })
        ));
    }

    #[test]
    fn implicit_multiplication_rejected() {
        assert!(matches!(parse("2x1", &xy()), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("2 x1", &xy()), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn empty_source() {
        assert_eq!(parse("   ", &xy()).unwrap_err(), ExprError::Empty);
        assert_eq!(parse("@(x1,x2)", &xy()).unwrap_err(), ExprError::Empty);
    }

    #[test]
    fn numbers() {
        assert_eq!(eval("1.5e3", &[0.0, 0.0]), 1500.0);
        assert_eq!(eval("2.5E-1", &[0.0, 0.0]), 0.25);
        assert_eq!(eval(".5", &[0.0, 0.0]), 0.5);
        assert_eq!(eval("3.", &[0.0, 0.0]), 3.0);
        assert_eq!(eval("2.*x1", &[4.0, 0.0]), 8.0);
        assert!(parse("1e", &xy()).is_err());
        assert!(parse("1.2.3", &xy()).is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("2^3^2", &[0.0, 0.0]), 512.0);
        assert_eq!(eval("-2^2", &[0.0, 0.0]), -4.0);
        assert_eq!(eval("2^-1", &[0.0, 0.0]), 0.5);
        assert_eq!(eval("8/4/2", &[0.0, 0.0]), 1.0);
        assert_eq!(eval("1-2-3", &[0.0, 0.0]), -4.0);
        assert_eq!(eval("2*-x1", &[3.0, 0.0]), -6.0);
        assert_eq!(eval("(1+2)*3", &[0.0, 0.0]), 9.0);
    }

    #[test]
    fn constants_and_functions() {
        assert_eq!(eval("pi", &[0.0, 0.0]), std::f64::consts::PI);
        assert_eq!(eval("e", &[0.0, 0.0]), std::f64::consts::E);
        assert_eq!(eval("log(e)", &[0.0, 0.0]), 1.0);
        assert_eq!(eval("abs(-x1)+sqrt(x2)", &[2.0, 9.0]), 5.0);
        assert_eq!(eval("atan(1)*4", &[0.0, 0.0]), std::f64::consts::PI);
    }

    #[test]
    fn effati_first_equation_at_origin() {
        assert_eq!(eval("cos(2*x1)-cos(2*x2)-0.4", &[0.0, 0.0]), -0.4);
    }

    #[test]
    fn non_finite_results_are_values() {
        assert_eq!(eval("1/x1", &[0.0, 1.0]), f64::INFINITY);
        assert_eq!(eval("-1/x1", &[0.0, 1.0]), f64::NEG_INFINITY);
        assert!(eval("x1/x1", &[0.0, 1.0]).is_nan());
        assert!(eval("log(x1)", &[-1.0, 1.0]).is_nan());
        assert!(eval("sqrt(x1)", &[-1.0, 1.0]).is_nan());
        let vars = VariableSet::new(["x1", "x3"]).unwrap();
        let e = parse("165/(2*x3)", &vars).unwrap();
        assert!(!e.evaluate(&[1.0, 0.0]).is_finite());
    }

    #[test]
    fn variable_set_validation() {
        assert!(matches!(
            VariableSet::new(["x", "x"]),
            Err(ExprError::DuplicateVariable(_))
        ));
        assert!(matches!(
            VariableSet::new(["1x"]),
            Err(ExprError::InvalidVariableName(_))
        ));
        assert!(matches!(
            VariableSet::new(["sin"]),
            Err(ExprError::InvalidVariableName(_))
        ));
        assert!(matches!(
            VariableSet::new(["pi"]),
            Err(ExprError::InvalidVariableName(_))
        ));
    }

    #[test]
    fn canonical_form_is_fully_parenthesized() {
        let e = parse("-x1+0.5*x2^2", &xy()).unwrap();
        assert_eq!(e.canonical(), "((-x1) + (0.5 * (x2 ^ 2.0)))");
    }

    fn arb_node(nvars: usize) -> impl Strategy<Value = Node> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Node::Number),
            (1e-300f64..1e300).prop_map(Node::Number),
            prop_oneof![Just(Constant::Pi), Just(Constant::E)].prop_map(Node::Constant),
            (0..nvars).prop_map(|i| Node::Variable {
                index: i,
                name: format!("x{}", i + 1)
            }),
        ];
        leaf.prop_recursive(6, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|n| Node::Neg(Box::new(n))),
                (
                    prop_oneof![
                        Just(BinaryOp::Add),
                        Just(BinaryOp::Sub),
                        Just(BinaryOp::Mul),
                        Just(BinaryOp::Div),
                        Just(BinaryOp::Pow)
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, l, r)| Node::Binary {
                        op,
                        lhs: Box::new(l),
                        rhs: Box::new(r)
                    }),
                (0..Function::ALL.len(), inner).prop_map(|(f, a)| Node::Call {
                    function: Function::ALL[f],
                    arg: Box::new(a)
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn canonical_round_trip(node in arb_node(2)) {
            let text = node.to_string();
            let reparsed = parse(&text, &xy()).unwrap();
            prop_assert_eq!(reparsed.root(), &node);
        }

        #[test]
        fn evaluation_is_pure(node in arb_node(2), a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let e = parse(&node.to_string(), &xy()).unwrap();
            let first = e.evaluate(&[a, b]);
            let second = e.evaluate(&[a, b]);
            prop_assert_eq!(first.to_bits(), second.to_bits());
        }

        #[test]
        fn multiplication_binds_tighter(a in -1e3f64..1e3, b in -1e3f64..1e3, c in -1e3f64..1e3) {
            let vars = VariableSet::new(["a", "b", "c"]).unwrap();
            let e = parse("a+b*c", &vars).unwrap();
            prop_assert_eq!(e.evaluate(&[a, b, c]), a + (b * c));
        }
    }
}
