use std::fmt;
use std::ops;

use num_bigint::BigInt;
use num_traits::Zero;

use super::jet::Jet;
use super::scalar::{format_rational, Rational, Scalar};
use crate::{Error, Result};

/// Largest accepted literal exponent.  Far beyond any jet order, small
/// enough that evaluating a hostile chart file stays cheap.
const MAX_EXPONENT: u32 = 64;

/// Symbolic coordinate expression, the storage form of chart data.
///
/// The grammar is deliberately tiny: rational constants, coordinates, the
/// four field operations, unary minus, and nonnegative integer powers.
/// `1/2` (an integer immediately divided by a positive integer) is read as a
/// single rational constant; any other quotient becomes a [`Expression::Div`]
/// node whose denominator must have nonzero value at each sample point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expression {
    Constant(Rational),
    /// Index into the chart's coordinate list.
    Coordinate(usize),
    Neg(Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Div(Box<Expression>, Box<Expression>),
    Pow(Box<Expression>, u32),
}

impl Expression {
    pub fn int(value: i64) -> Self {
        Expression::Constant(Rational::from_integer(BigInt::from(value)))
    }

    pub fn coord(index: usize) -> Self {
        Expression::Coordinate(index)
    }

    pub fn pow(self, exp: u32) -> Self {
        Expression::Pow(Box::new(self), exp)
    }

    /// Parses `source` against the coordinate names of a chart.
    pub fn parse(source: &str, coords: &[String]) -> Result<Expression> {
        let mut parser = Parser {
            src: source.as_bytes(),
            pos: 0,
            coords,
        };
        let expr = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.syntax("expected operator or end of input"));
        }
        Ok(expr)
    }

    /// Evaluates to a jet at `point`, in any coefficient field.
    pub fn evaluate<S: Scalar>(
        &self,
        coords: &[String],
        point: &[Rational],
        order: u32,
    ) -> Result<Jet<S>> {
        assert_eq!(coords.len(), point.len(), "point/coordinate arity mismatch");
        let dim = point.len();
        Ok(match self {
            Expression::Constant(c) => Jet::constant(dim, order, S::from_rational(c)),
            Expression::Coordinate(i) => {
                Jet::coordinate(dim, order, *i, S::from_rational(&point[*i]))
            }
            Expression::Neg(e) => e.evaluate::<S>(coords, point, order)?.neg(),
            Expression::Add(a, b) => a
                .evaluate::<S>(coords, point, order)?
                .add(&b.evaluate(coords, point, order)?),
            Expression::Sub(a, b) => a
                .evaluate::<S>(coords, point, order)?
                .sub(&b.evaluate(coords, point, order)?),
            Expression::Mul(a, b) => a
                .evaluate::<S>(coords, point, order)?
                .mul(&b.evaluate(coords, point, order)?),
            Expression::Div(a, b) => {
                let denom = b.evaluate::<S>(coords, point, order)?;
                a.evaluate::<S>(coords, point, order)?
                    .div(&denom)
                    .map_err(|_| Error::DivisionByZero {
                        expr: b.print(coords),
                    })?
            }
            Expression::Pow(b, e) => b.evaluate::<S>(coords, point, order)?.pow(*e),
        })
    }

    /// Folds constant subtrees; division by a zero constant is left in
    /// place so it surfaces as a proper evaluation error.
    pub fn fold(self) -> Expression {
        use Expression::*;
        let folded = match self {
            Neg(e) => Neg(Box::new(e.fold())),
            Add(a, b) => Add(Box::new(a.fold()), Box::new(b.fold())),
            Sub(a, b) => Sub(Box::new(a.fold()), Box::new(b.fold())),
            Mul(a, b) => Mul(Box::new(a.fold()), Box::new(b.fold())),
            Div(a, b) => Div(Box::new(a.fold()), Box::new(b.fold())),
            Pow(b, e) => Pow(Box::new(b.fold()), e),
            other => other,
        };
        match folded {
            Neg(e) => match *e {
                Constant(c) => Constant(-c),
                e => Neg(Box::new(e)),
            },
            Add(a, b) => match (*a, *b) {
                (Constant(x), Constant(y)) => Constant(x + y),
                (a, b) => Add(Box::new(a), Box::new(b)),
            },
            Sub(a, b) => match (*a, *b) {
                (Constant(x), Constant(y)) => Constant(x - y),
                (a, b) => Sub(Box::new(a), Box::new(b)),
            },
            Mul(a, b) => match (*a, *b) {
                (Constant(x), Constant(y)) => Constant(x * y),
                (a, b) => Mul(Box::new(a), Box::new(b)),
            },
            Div(a, b) => match (*a, *b) {
                (Constant(x), Constant(y)) if !num_traits::Zero::is_zero(&y) => Constant(x / y),
                (a, b) => Div(Box::new(a), Box::new(b)),
            },
            Pow(b, e) => match *b {
                Constant(x) => {
                    let mut acc = Rational::from_integer(BigInt::from(1));
                    for _ in 0..e {
                        acc *= &x;
                    }
                    Constant(acc)
                }
                b => Pow(Box::new(b), e),
            },
            other => other,
        }
    }

    /// Renders with the minimal parentheses that reparse to the same tree.
    pub fn print(&self, coords: &[String]) -> String {
        let mut out = String::new();
        self.format(coords, &mut out, 0);
        out
    }

    /// Precedence levels: additive 1, multiplicative 2, unary minus 3,
    /// power 4, atom 5.  A node parenthesizes itself when the context
    /// requires more binding than it has.
    fn precedence(&self) -> u8 {
        match self {
            Expression::Add(..) | Expression::Sub(..) => 1,
            Expression::Mul(..) | Expression::Div(..) => 2,
            Expression::Neg(..) => 3,
            Expression::Constant(c) if c < &<Rational as Zero>::zero() => 3,
            Expression::Pow(..) => 4,
            _ => 5,
        }
    }

    fn format(&self, coords: &[String], out: &mut String, context: u8) {
        let prec = self.precedence();
        let parens = prec < context;
        if parens {
            out.push('(');
        }
        match self {
            Expression::Constant(c) => out.push_str(&format_rational(c)),
            Expression::Coordinate(i) => out.push_str(&coords[*i]),
            Expression::Neg(e) => {
                out.push('-');
                e.format(coords, out, 4);
            }
            Expression::Add(a, b) => {
                a.format(coords, out, 1);
                out.push('+');
                b.format(coords, out, 2);
            }
            Expression::Sub(a, b) => {
                a.format(coords, out, 1);
                out.push('-');
                b.format(coords, out, 2);
            }
            Expression::Mul(a, b) => {
                a.format(coords, out, 2);
                out.push('*');
                b.format(coords, out, 3);
            }
            Expression::Div(a, b) => {
                a.format(coords, out, 2);
                out.push('/');
                b.format(coords, out, 3);
            }
            Expression::Pow(b, e) => {
                b.format(coords, out, 5);
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
        if parens {
            out.push(')');
        }
    }
}

impl fmt::Display for Expression {
    /// Displays with positional coordinate names `x1, x2, ...`; chart-aware
    /// callers should prefer [`Expression::print`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=16).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.print(&names))
    }
}

impl ops::Add for Expression {
    type Output = Expression;
    fn add(self, rhs: Expression) -> Expression {
        Expression::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        Expression::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        Expression::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Div for Expression {
    type Output = Expression;
    fn div(self, rhs: Expression) -> Expression {
        Expression::Div(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression::Neg(Box::new(self))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [String],
}

impl<'a> Parser<'a> {
    fn syntax(&self, message: &str) -> Error {
        Error::ExprParse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expression> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.factor()?;
            } else if self.eat(b'/') {
                acc = acc / self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expression> {
        let negated = self.eat(b'-');
        let base = self.base()?;
        let powered = if self.eat(b'^') {
            self.skip_ws();
            if self.src.get(self.pos) == Some(&b'-') {
                return Err(self.syntax("negative exponents are not allowed"));
            }
            let exp = self.integer_literal("exponent")?;
            let exp: u32 = exp
                .try_into()
                .ok()
                .filter(|e| *e <= MAX_EXPONENT)
                .ok_or_else(|| self.syntax("exponent too large"))?;
            base.pow(exp)
        } else {
            base
        };
        Ok(if negated { -powered } else { powered })
    }

    fn base(&mut self) -> Result<Expression> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.rational_literal(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.coordinate(),
            _ => Err(self.syntax("expected number, coordinate, or `(`")),
        }
    }

    /// `integer ("/" positive-integer)?` — read as one rational constant.
    /// A `/` not followed by digits is left for the enclosing term, so
    /// `1/x1` still parses as a quotient node.
    fn rational_literal(&mut self) -> Result<Expression> {
        let numer = self.integer_literal("number")?;
        let save = self.pos;
        if self.eat(b'/') {
            self.skip_ws();
            if self
                .src
                .get(self.pos)
                .is_some_and(|c| c.is_ascii_digit())
            {
                let denom_offset = self.pos;
                let denom = self.integer_literal("denominator")?;
                if denom.is_zero() {
                    return Err(Error::ExprParse {
                        offset: denom_offset,
                        message: "zero denominator in rational literal".to_string(),
                    });
                }
                return Ok(Expression::Constant(Rational::new(numer, denom)));
            }
            self.pos = save;
        }
        Ok(Expression::Constant(Rational::from_integer(numer)))
    }

    fn integer_literal(&mut self, what: &str) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax(&format!("expected {what}")));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit string parses"))
    }

    fn coordinate(&mut self) -> Result<Expression> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        match self.coords.iter().position(|c| c == name) {
            Some(i) => Ok(Expression::Coordinate(i)),
            None => Err(Error::UnknownSymbol {
                name: name.to_string(),
                offset: start,
            }),
        }
    }
}
