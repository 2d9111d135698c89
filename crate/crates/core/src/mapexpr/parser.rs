use num::{BigInt, BigRational, One};

use super::{Func, MapExpr, Node};

/// Error raised while turning source text into a [`MapExpr`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expression references x{referenced} but the declared arity is {declared}")]
    ArityMismatch { declared: usize, referenced: usize },
    #[error("expression list is empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Var(usize),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_) => "number".into(),
            Tok::Var(i) => format!("x{i}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: tl,
                column: tc,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut digits = String::new();
            let mut frac_len = 0u32;
            let mut seen_dot = false;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                if chars[i] == '.' {
                    if seen_dot {
                        return Err(syntax(tl, tc, "malformed number literal"));
                    }
                    seen_dot = true;
                } else {
                    digits.push(chars[i]);
                    if seen_dot {
                        frac_len += 1;
                    }
                }
                i += 1;
            }
            if digits.is_empty() {
                return Err(syntax(tl, tc, "malformed number literal"));
            }
            let mut exp: i64 = 0;
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                let mut neg = false;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    neg = chars[j] == '-';
                    j += 1;
                }
                let es = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == es {
                    return Err(syntax(tl, tc, "malformed exponent in number literal"));
                }
                let e: String = chars[es..j].iter().collect();
                exp = e
                    .parse::<i64>()
                    .map_err(|_| syntax(tl, tc, "exponent out of range"))?;
                if exp > 400 {
                    return Err(syntax(tl, tc, "exponent out of range"));
                }
                if neg {
                    exp = -exp;
                }
                i = j;
            }
            let mantissa: BigInt = digits.parse().expect("digits only");
            let scale = exp - frac_len as i64;
            let ten = BigInt::from(10);
            let value = if scale >= 0 {
                BigRational::from_integer(mantissa * num::pow(ten, scale as usize))
            } else {
                BigRational::new(mantissa, num::pow(ten, (-scale) as usize))
            };
            col += i - start;
            out.push(Spanned {
                tok: Tok::Num(value),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.strip_prefix('x') {
                Some(rest) if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) => {
                    let idx: usize = rest
                        .parse()
                        .map_err(|_| syntax(tl, tc, "coordinate index out of range"))?;
                    if idx == 0 {
                        return Err(syntax(tl, tc, "coordinates are numbered from x1"));
                    }
                    Tok::Var(idx)
                }
                _ => Tok::Ident(word),
            };
            out.push(Spanned {
                tok,
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(syntax(tl, tc, format!("unexpected character `{c}`")));
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    max_var: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        syntax(t.line, t.column, message)
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let neg = match self.peek() {
                Tok::Minus => {
                    self.bump();
                    true
                }
                Tok::Plus => {
                    self.bump();
                    false
                }
                _ => false,
            };
            let exp = match self.peek().clone() {
                Tok::Num(v) if v.is_integer() => {
                    self.bump();
                    let e: i32 = v
                        .to_integer()
                        .try_into()
                        .map_err(|_| self.err_here("exponent out of range"))?;
                    if e > 64 {
                        return Err(self.err_here("exponent out of range"));
                    }
                    if neg {
                        -e
                    } else {
                        e
                    }
                }
                other => {
                    return Err(self.err_here(format!(
                        "expected integer exponent, found {}",
                        other.describe()
                    )))
                }
            };
            base = Node::Pow(Box::new(base), exp);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Node::constant(v)),
            Tok::Var(i) => {
                self.max_var = self.max_var.max(i);
                Ok(Node::Var(i - 1))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    "atan2" => Func::Atan2,
                    _ => {
                        return Err(syntax(
                            t.line,
                            t.column,
                            format!("unknown function `{name}`"),
                        ))
                    }
                };
                self.expect(Tok::LParen)?;
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                if args.len() != func.arity() {
                    return Err(syntax(
                        t.line,
                        t.column,
                        format!(
                            "`{name}` takes {} argument(s), got {}",
                            func.arity(),
                            args.len()
                        ),
                    ));
                }
                Ok(Node::Func(func, args))
            }
            other => Err(syntax(
                t.line,
                t.column,
                format!("expected an operand, found {}", other.describe()),
            )),
        }
    }
}

/// Parses `[n] e1; e2; ...`. The optional `[n]` prefix declares the input
/// dimension; `default_arity` is used when it is absent and no coordinate
/// exceeds it.
pub(super) fn parse(src: &str, default_arity: Option<usize>) -> Result<MapExpr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        max_var: 0,
    };

    let mut declared = None;
    if *p.peek() == Tok::LBracket {
        p.bump();
        match p.peek().clone() {
            Tok::Num(v) if v.is_integer() && v >= BigRational::one() => {
                p.bump();
                let n: usize = v
                    .to_integer()
                    .try_into()
                    .map_err(|_| p.err_here("arity out of range"))?;
                declared = Some(n);
            }
            other => {
                return Err(p.err_here(format!(
                    "expected a positive arity, found {}",
                    other.describe()
                )))
            }
        }
        p.expect(Tok::RBracket)?;
    }

    if *p.peek() == Tok::Eof {
        return Err(ParseError::Empty);
    }
    let mut components = vec![p.expr()?];
    loop {
        match p.peek() {
            Tok::Semi => {
                p.bump();
                if *p.peek() == Tok::Eof {
                    break;
                }
                components.push(p.expr()?);
            }
            Tok::Eof => break,
            other => {
                let msg = format!("expected `;` or end of input, found {}", other.describe());
                return Err(p.err_here(msg));
            }
        }
    }

    let arity = match declared {
        Some(n) => {
            if p.max_var > n {
                return Err(ParseError::ArityMismatch {
                    declared: n,
                    referenced: p.max_var,
                });
            }
            if let Some(d) = default_arity {
                if d != n {
                    return Err(ParseError::ArityMismatch {
                        declared: n,
                        referenced: d,
                    });
                }
            }
            n
        }
        None => match default_arity {
            Some(d) => {
                if p.max_var > d {
                    return Err(ParseError::ArityMismatch {
                        declared: d,
                        referenced: p.max_var,
                    });
                }
                d
            }
            None => p.max_var,
        },
    };
    Ok(MapExpr::from_parts(arity, components))
}
