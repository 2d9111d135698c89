//! A small expression language for maps `f: R^n -> R^m`.
//!
//! Grammar (whitespace and newlines are insignificant):
//!
//! ```text
//! map     := [ '[' INT ']' ] expr ( ';' expr )* [ ';' ]
//! expr    := term ( ('+' | '-') term )*
//! term    := unary ( ('*' | '/') unary )*
//! unary   := '-' unary | '+' unary | power
//! power   := primary ( '^' ['-'] INT )*
//! primary := NUMBER | 'x' INT | '(' expr ')' | FUNC '(' expr (',' expr)* ')'
//! FUNC    := sin | cos | exp | sqrt | atan2
//! ```
//!
//! Each `;`-separated expression is one output component. Number literals
//! are read as exact rationals (`0.3` is `3/10`), so a tree built only from
//! literals, coordinates, `+ - * /` and integer powers evaluates exactly.

mod parser;

use std::fmt;

use num::{BigInt, BigRational, FromPrimitive, Signed, ToPrimitive, Zero};

pub use parser::ParseError;

/// Failure while evaluating a map at a point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("point has dimension {got}, map expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {0}")]
    NegativeSqrt(f64),
    #[error("non-finite intermediate value")]
    NonFinite,
    #[error("expression contains transcendental functions; exact evaluation unavailable")]
    NotRational,
    #[error("{0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Atan2,
}

impl Func {
    fn arity(self) -> usize {
        match self {
            Func::Atan2 => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Atan2 => "atan2",
        }
    }
}

/// Scalar expression tree. Constants keep both their exact value and the
/// nearest double so float evaluation never touches big integers.
#[derive(Debug, Clone)]
pub enum Node {
    Const {
        exact: BigRational,
        approx: f64,
    },
    /// Zero-based coordinate index.
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Func(Func, Vec<Node>),
}

impl Node {
    pub fn constant(v: BigRational) -> Node {
        let approx = v.to_f64().unwrap_or(f64::NAN);
        Node::Const { exact: v, approx }
    }

    fn is_rational(&self) -> bool {
        match self {
            Node::Const { .. } | Node::Var(_) => true,
            Node::Neg(a) | Node::Pow(a, _) => a.is_rational(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.is_rational() && b.is_rational()
            }
            Node::Func(..) => false,
        }
    }

    fn eval_f64(&self, p: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Node::Const { approx, .. } => *approx,
            Node::Var(i) => p[*i],
            Node::Neg(a) => -a.eval_f64(p)?,
            Node::Add(a, b) => a.eval_f64(p)? + b.eval_f64(p)?,
            Node::Sub(a, b) => a.eval_f64(p)? - b.eval_f64(p)?,
            Node::Mul(a, b) => a.eval_f64(p)? * b.eval_f64(p)?,
            Node::Div(a, b) => {
                let num = a.eval_f64(p)?;
                let den = b.eval_f64(p)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                num / den
            }
            Node::Pow(a, e) => {
                let base = a.eval_f64(p)?;
                if *e < 0 && base == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                base.powi(*e)
            }
            Node::Func(f, args) => match f {
                Func::Sin => args[0].eval_f64(p)?.sin(),
                Func::Cos => args[0].eval_f64(p)?.cos(),
                Func::Exp => args[0].eval_f64(p)?.exp(),
                Func::Sqrt => {
                    let a = args[0].eval_f64(p)?;
                    if a < 0.0 {
                        return Err(EvalError::NegativeSqrt(a));
                    }
                    a.sqrt()
                }
                Func::Atan2 => args[0].eval_f64(p)?.atan2(args[1].eval_f64(p)?),
            },
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn eval_exact(&self, p: &[BigRational]) -> Result<BigRational, EvalError> {
        Ok(match self {
            Node::Const { exact, .. } => exact.clone(),
            Node::Var(i) => p[*i].clone(),
            Node::Neg(a) => -a.eval_exact(p)?,
            Node::Add(a, b) => a.eval_exact(p)? + b.eval_exact(p)?,
            Node::Sub(a, b) => a.eval_exact(p)? - b.eval_exact(p)?,
            Node::Mul(a, b) => a.eval_exact(p)? * b.eval_exact(p)?,
            Node::Div(a, b) => {
                let den = b.eval_exact(p)?;
                if den.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                a.eval_exact(p)? / den
            }
            Node::Pow(a, e) => {
                let base = a.eval_exact(p)?;
                if *e < 0 {
                    if base.is_zero() {
                        return Err(EvalError::DivisionByZero);
                    }
                    num::pow(base.recip(), e.unsigned_abs() as usize)
                } else {
                    num::pow(base, *e as usize)
                }
            }
            Node::Func(..) => return Err(EvalError::NotRational),
        })
    }
}

fn fmt_rational(v: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v.is_integer() && !v.is_negative() {
        write!(f, "{}", v.numer())
    } else if v.is_integer() {
        write!(f, "(-{})", v.numer().abs())
    } else if v.is_negative() {
        write!(f, "(-{}/{})", v.numer().abs(), v.denom())
    } else {
        write!(f, "({}/{})", v.numer(), v.denom())
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const { exact, .. } => fmt_rational(exact, f),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Pow(a, e) => write!(f, "({a})^{e}"),
            Node::Func(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// How a point was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    Exact,
    Float,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub mode: EvalMode,
    pub values: Vec<f64>,
    /// Present when `mode` is [`EvalMode::Exact`].
    pub exact: Option<Vec<BigRational>>,
}

/// A parsed vector-valued map. Immutable after construction.
#[derive(Debug, Clone)]
pub struct MapExpr {
    arity: usize,
    components: Vec<Node>,
    rational: bool,
}

impl MapExpr {
    /// Parses a map; the arity is the declared `[n]` prefix or the largest
    /// coordinate index referenced.
    pub fn parse(src: &str) -> Result<MapExpr, ParseError> {
        parser::parse(src, None)
    }

    /// Parses a map whose input dimension is known from context (for
    /// example the domain it acts on). A `[n]` prefix must agree with `dim`.
    pub fn parse_for_dim(src: &str, dim: usize) -> Result<MapExpr, ParseError> {
        parser::parse(src, Some(dim))
    }

    fn from_parts(arity: usize, components: Vec<Node>) -> MapExpr {
        let rational = components.iter().all(Node::is_rational);
        MapExpr {
            arity,
            components,
            rational,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Node] {
        &self.components
    }

    /// True when no transcendental node occurs anywhere in the tree.
    pub fn is_rational(&self) -> bool {
        self.rational
    }

    fn check_dim(&self, got: usize) -> Result<(), EvalError> {
        if got != self.arity {
            return Err(EvalError::DimensionMismatch {
                expected: self.arity,
                got,
            });
        }
        Ok(())
    }

    /// Float evaluation. Partial functions report errors instead of NaN.
    pub fn eval_f64(&self, p: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.check_dim(p.len())?;
        self.components.iter().map(|c| c.eval_f64(p)).collect()
    }

    /// Exact evaluation over the rationals; fails with
    /// [`EvalError::NotRational`] for transcendental trees.
    pub fn eval_exact(&self, p: &[BigRational]) -> Result<Vec<BigRational>, EvalError> {
        self.check_dim(p.len())?;
        if !self.rational {
            return Err(EvalError::NotRational);
        }
        self.components.iter().map(|c| c.eval_exact(p)).collect()
    }

    /// Evaluates exactly when the tree is rational-only (the input doubles
    /// are converted without rounding), otherwise in floating point.
    pub fn eval(&self, p: &[f64]) -> Result<Evaluation, EvalError> {
        self.check_dim(p.len())?;
        if self.rational {
            let exact_in = p
                .iter()
                .map(|&x| BigRational::from_float(x).ok_or(EvalError::NonFinite))
                .collect::<Result<Vec<_>, _>>()?;
            let exact = self.eval_exact(&exact_in)?;
            let values = exact
                .iter()
                .map(|v| {
                    v.to_f64()
                        .filter(|x| x.is_finite())
                        .ok_or(EvalError::NonFinite)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Evaluation {
                mode: EvalMode::Exact,
                values,
                exact: Some(exact),
            })
        } else {
            Ok(Evaluation {
                mode: EvalMode::Float,
                values: self.eval_f64(p)?,
                exact: None,
            })
        }
    }
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.arity)?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Anything that can be evaluated pointwise as `R^n -> R^m`. The degree and
/// index engines are written against this trait so composites such as
/// `x - r(f(x))` need not be expressible in the grammar.
pub trait VectorMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, p: &[f64]) -> Result<Vec<f64>, EvalError>;
}

impl VectorMap for MapExpr {
    fn dim_in(&self) -> usize {
        self.arity
    }

    fn dim_out(&self) -> usize {
        self.components.len()
    }

    fn apply(&self, p: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.eval_f64(p)
    }
}

type MapFn<'a> = dyn Fn(&[f64]) -> Result<Vec<f64>, EvalError> + Send + Sync + 'a;

/// Closure-backed [`VectorMap`].
pub struct FnMap<'a> {
    dim_in: usize,
    dim_out: usize,
    f: Box<MapFn<'a>>,
}

impl<'a> FnMap<'a> {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&[f64]) -> Result<Vec<f64>, EvalError> + Send + Sync + 'a,
    ) -> Self {
        FnMap {
            dim_in,
            dim_out,
            f: Box::new(f),
        }
    }

    /// `x -> x - f(x)`, whose zeros are the fixed points of `f`.
    pub fn displacement(f: &'a dyn VectorMap) -> Self {
        let n = f.dim_in();
        FnMap::new(n, f.dim_out(), move |p| {
            let fx = f.apply(p)?;
            Ok(p.iter().zip(&fx).map(|(a, b)| a - b).collect())
        })
    }

    /// The constant map with value `v` on `R^n`.
    pub fn constant(n: usize, v: Vec<f64>) -> FnMap<'static> {
        let m = v.len();
        FnMap::new(n, m, move |_| Ok(v.clone()))
    }

    /// `g o f`.
    pub fn compose(g: &'a dyn VectorMap, f: &'a dyn VectorMap) -> Self {
        FnMap::new(f.dim_in(), g.dim_out(), move |p| g.apply(&f.apply(p)?))
    }

    /// `f x g` on `R^{n+m}`.
    pub fn product(f: &'a dyn VectorMap, g: &'a dyn VectorMap) -> Self {
        let n = f.dim_in();
        FnMap::new(n + g.dim_in(), f.dim_out() + g.dim_out(), move |p| {
            let mut out = f.apply(&p[..n])?;
            out.extend(g.apply(&p[n..])?);
            Ok(out)
        })
    }

    /// `(1 - s) f + s g` for fixed `s`.
    pub fn blend(f: &'a dyn VectorMap, g: &'a dyn VectorMap, s: f64) -> Self {
        FnMap::new(f.dim_in(), f.dim_out(), move |p| {
            let a = f.apply(p)?;
            let b = g.apply(p)?;
            Ok(a.iter()
                .zip(&b)
                .map(|(x, y)| (1.0 - s) * x + s * y)
                .collect())
        })
    }
}

impl VectorMap for FnMap<'_> {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn apply(&self, p: &[f64]) -> Result<Vec<f64>, EvalError> {
        if p.len() != self.dim_in {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim_in,
                got: p.len(),
            });
        }
        (self.f)(p)
    }
}

/// Real and imaginary parts of `z^d`, `z = x1 + i x2`, as grammar source.
pub fn complex_power_source(d: u32) -> (String, String) {
    let mut re = Vec::new();
    let mut im = Vec::new();
    for k in 0..=d {
        // C(d,k) x1^(d-k) (i x2)^k
        let binom = num::integer::binomial(BigInt::from(d), BigInt::from(k));
        let mut term = binom.to_string();
        if d - k > 0 {
            term.push_str(&format!("*x1^{}", d - k));
        }
        if k > 0 {
            term.push_str(&format!("*x2^{k}"));
        }
        let sign = if (k / 2) % 2 == 0 { '+' } else { '-' };
        if k % 2 == 0 {
            re.push((sign, term));
        } else {
            im.push((sign, term));
        }
    }
    let join = |parts: Vec<(char, String)>| {
        let mut s = String::new();
        for (i, (sign, t)) in parts.into_iter().enumerate() {
            if i == 0 {
                if sign == '-' {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            s.push_str(&t);
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    };
    (join(re), join(im))
}

/// Converts a double to an exact rational, for callers that compare exact
/// and float results.
pub fn rational_of(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(src: &str, p: &[f64]) -> Result<Vec<f64>, EvalError> {
        MapExpr::parse(src).unwrap().eval_f64(p)
    }

    #[test]
    fn difference_of_coordinates() {
        assert_eq!(eval("x1 - x2", &[3.0, 1.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn doubling_map() {
        let m = MapExpr::parse("2*x1; 2*x2").unwrap();
        assert_eq!((m.arity(), m.output_dim()), (2, 2));
        assert_eq!(m.eval_f64(&[1.0, 0.0]).unwrap(), vec![2.0, 0.0]);
        for k in 0..16 {
            let t = k as f64 * 0.4;
            let v = m.eval_f64(&[t.cos(), t.sin()]).unwrap();
            assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn forced_division_by_zero() {
        let m = MapExpr::parse("x1 / (x1 - x1)").unwrap();
        for p in [0.0, 1.0, -3.5] {
            assert_eq!(m.eval_f64(&[p]), Err(EvalError::DivisionByZero));
            assert!(matches!(m.eval(&[p]), Err(EvalError::DivisionByZero)));
        }
    }

    #[test]
    fn identity_and_complex_square() {
        assert_eq!(eval("x1; x2", &[0.5, -0.25]).unwrap(), vec![0.5, -0.25]);
        let sq = MapExpr::parse("x1*x1 - x2*x2; 2*x1*x2").unwrap();
        let e = sq.eval(&[0.0, 1.0]).unwrap();
        assert_eq!(e.mode, EvalMode::Exact);
        assert_eq!(e.values, vec![-1.0, 0.0]);
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(eval("-x1^2", &[3.0]).unwrap(), vec![-9.0]);
        assert_eq!(eval("2 + 3*x1^2 / 6", &[2.0]).unwrap(), vec![4.0]);
        assert_eq!(eval("(2 + 3)*x1", &[2.0]).unwrap(), vec![10.0]);
        assert_eq!(eval("x1 - x1 - x1", &[1.0]).unwrap(), vec![-1.0]);
        assert_eq!(eval("x1^-2", &[2.0]).unwrap(), vec![0.25]);
        assert_eq!(eval("1.5e1 + 2.5e-1", &[]).unwrap(), vec![15.25]);
    }

    #[test]
    fn transcendental_functions_flag_float_mode() {
        let m = MapExpr::parse("cos(x1); atan2(x2, x1); sqrt(x1^2 + x2^2)").unwrap();
        assert!(!m.is_rational());
        let e = m.eval(&[3.0, 4.0]).unwrap();
        assert_eq!(e.mode, EvalMode::Float);
        assert!(e.exact.is_none());
        assert_eq!(e.values[2], 5.0);
        assert!(matches!(
            MapExpr::parse("sqrt(x1)").unwrap().eval_f64(&[-1.0]),
            Err(EvalError::NegativeSqrt(_))
        ));
        assert!(matches!(
            MapExpr::parse("exp(x1)").unwrap().eval_f64(&[1000.0]),
            Err(EvalError::NonFinite)
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match MapExpr::parse("x1 +\n  * x2") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            MapExpr::parse("x0"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            MapExpr::parse("foo(x1)"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            MapExpr::parse("atan2(x1)"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            MapExpr::parse("(x1"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            MapExpr::parse("x1 x2"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            MapExpr::parse("x1^0.5"),
            Err(ParseError::Syntax { .. })
        ));
        assert_eq!(MapExpr::parse("  ").unwrap_err(), ParseError::Empty);
    }

    #[test]
    fn arity_annotation() {
        let m = MapExpr::parse("[3] x1; x2; 0").unwrap();
        assert_eq!(m.arity(), 3);
        assert_eq!(
            MapExpr::parse("[1] x1 + x2").unwrap_err(),
            ParseError::ArityMismatch {
                declared: 1,
                referenced: 2
            }
        );
        assert_eq!(MapExpr::parse_for_dim("0.3; 0.2", 2).unwrap().arity(), 2);
        assert!(MapExpr::parse_for_dim("x3", 2).is_err());
        assert!(MapExpr::parse_for_dim("[3] x1", 2).is_err());
        assert_eq!(
            MapExpr::parse("x1; x2").unwrap().eval_f64(&[1.0]),
            Err(EvalError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn decimal_literals_are_exact() {
        let m = MapExpr::parse("0.1 + 0.2 - 0.3").unwrap();
        let e = m.eval(&[]).unwrap();
        assert!(e.exact.unwrap()[0].is_zero());
    }

    #[test]
    fn complex_powers_match_complex_arithmetic() {
        for d in 0..7u32 {
            let (re, im) = complex_power_source(d);
            let m = MapExpr::parse_for_dim(&format!("{re}; {im}"), 2).unwrap();
            for &(x, y) in &[(0.3, -0.7), (1.1, 0.4), (-0.5, 0.5)] {
                let r = (x * x + y * y as f64).sqrt();
                let t = f64::atan2(y, x) * d as f64;
                let v = m.eval_f64(&[x, y]).unwrap();
                assert!((v[0] - r.powi(d as i32) * t.cos()).abs() < 1e-12);
                assert!((v[1] - r.powi(d as i32) * t.sin()).abs() < 1e-12);
            }
        }
    }

    fn arb_node(depth: u32) -> BoxedStrategy<String> {
        let leaf = prop_oneof![
            (1i32..20).prop_map(|v| v.to_string()),
            (1i32..20, 1i32..9).prop_map(|(a, b)| format!("{a}.{b}")),
            (1usize..4).prop_map(|i| format!("x{i}")),
        ];
        if depth == 0 {
            return leaf.boxed();
        }
        let sub = arb_node(depth - 1);
        prop_oneof![
            leaf,
            (sub.clone(), sub.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (sub.clone(), sub.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (sub.clone(), sub.clone()).prop_map(|(a, b)| format!("{a} * {b}")),
            (sub.clone(), 0u32..4).prop_map(|(a, e)| format!("({a})^{e}")),
            sub.clone().prop_map(|a| format!("-{a}")),
            sub.prop_map(|a| format!("(1 + ({a})^2)")),
        ]
        .boxed()
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(a in arb_node(3), b in arb_node(3), pts in proptest::collection::vec(proptest::array::uniform3(-3.0f64..3.0), 100)) {
            let src = format!("[3] {a}; sin({b}) / (2 + cos(x1))");
            let m = MapExpr::parse(&src).unwrap();
            let back = MapExpr::parse(&m.to_string()).unwrap();
            prop_assert_eq!(back.arity(), m.arity());
            for p in &pts {
                let u = m.eval_f64(p);
                let v = back.eval_f64(p);
                match (u, v) {
                    (Ok(u), Ok(v)) => prop_assert_eq!(u, v),
                    (Err(e), Err(f)) => prop_assert_eq!(e, f),
                    (u, v) => prop_assert!(false, "{:?} vs {:?}", u, v),
                }
            }
        }

        #[test]
        fn exact_and_float_agree(a in arb_node(3), pts in proptest::collection::vec(proptest::array::uniform3(-10.0f64..10.0), 20)) {
            let m = MapExpr::parse(&format!("[3] {a}")).unwrap();
            prop_assert!(m.is_rational());
            for p in &pts {
                let fl = m.eval_f64(p).unwrap()[0];
                let ex = m.eval(p).unwrap();
                prop_assert_eq!(ex.mode, EvalMode::Exact);
                let e = ex.values[0];
                prop_assert!((fl - e).abs() <= 1e-12 * e.abs().max(1.0), "{} vs {}", fl, e);
            }
        }
    }
}
