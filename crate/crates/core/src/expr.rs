//! Immutable symbolic scalar expressions.
//!
//! [`Expr`] is the carrier for every component function in the engine:
//! metric components, connection coefficients, vector-field components and
//! everything derived from them. Expressions are trees of constants,
//! coordinate variables, unary functions and binary operators, shared
//! through `Arc` so cloning is cheap and sharing across threads is safe.
//!
//! Construction goes through smart constructors that fold constants and
//! apply 0/1 identities eagerly; [`Expr::simplify`] re-runs the same rules
//! bottom-up. Differentiation is exact and purely symbolic. Numeric
//! evaluation is IEEE double precision with explicit domain errors.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
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
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

#[derive(Debug, PartialEq)]
enum Node {
    Const(f64),
    Var(String),
    Unary(UnaryOp, Expr),
    Binary(BinaryOp, Expr, Expr),
}

/// A symbolic scalar expression over named coordinates.
#[derive(Debug, Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

/// Assignment of a real value to every coordinate an expression mentions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Point {
    values: BTreeMap<String, f64>,
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Point {
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Self {
        Point {
            values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

/// Failure while numerically evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// The point does not assign a value to this variable.
    MissingVariable(String),
    /// The offending subexpression (rendered) and the reason it is
    /// undefined at the point.
    Domain { expr: String, reason: String },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::MissingVariable(v) => write!(f, "no value for variable `{v}`"),
            EvalError::Domain { expr, reason } => {
                write!(f, "domain error in `{expr}`: {reason}")
            }
        }
    }
}

fn domain_err(node: &Expr, reason: &str) -> EvalError {
    EvalError::Domain {
        expr: node.to_string(),
        reason: reason.to_string(),
    }
}

impl Expr {
    fn new(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn constant(c: f64) -> Self {
        Expr::new(Node::Const(c))
    }

    pub fn zero() -> Self {
        Expr::constant(0.0)
    }

    pub fn one() -> Self {
        Expr::constant(1.0)
    }

    pub fn var(name: &str) -> Self {
        Expr::new(Node::Var(name.to_string()))
    }

    pub fn as_const(&self) -> Option<f64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        if let Some(c) = e.as_const() {
            let v = match op {
                UnaryOp::Neg => Some(-c),
                // Fold only where the constant is inside the function's
                // domain; otherwise keep the node so evaluation reports it.
                UnaryOp::Sin => Some(libm::sin(c)),
                UnaryOp::Cos => Some(libm::cos(c)),
                UnaryOp::Tan => Some(libm::tan(c)),
                UnaryOp::Exp => Some(libm::exp(c)),
                UnaryOp::Log => (c > 0.0).then(|| libm::log(c)),
                UnaryOp::Sqrt => (c >= 0.0).then(|| libm::sqrt(c)),
            };
            if let Some(v) = v {
                if v.is_finite() {
                    return Expr::constant(v);
                }
            }
        }
        if op == UnaryOp::Neg {
            if let Node::Unary(UnaryOp::Neg, inner) = &*e.0 {
                return inner.clone();
            }
        }
        Expr::new(Node::Unary(op, e))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => {
                let v = match op {
                    BinaryOp::Add => Some(x + y),
                    BinaryOp::Sub => Some(x - y),
                    BinaryOp::Mul => Some(x * y),
                    BinaryOp::Div => (y != 0.0).then(|| x / y),
                    BinaryOp::Pow => const_pow(x, y),
                };
                if let Some(v) = v {
                    if v.is_finite() {
                        return Expr::constant(v);
                    }
                }
            }
            _ => {}
        }
        match op {
            BinaryOp::Add => {
                if a.is_zero() {
                    return b;
                }
                if b.is_zero() {
                    return a;
                }
                if let Node::Unary(UnaryOp::Neg, u) = &*b.0 {
                    if *u == a {
                        return Expr::zero();
                    }
                }
                if let Node::Unary(UnaryOp::Neg, u) = &*a.0 {
                    if *u == b {
                        return Expr::zero();
                    }
                }
            }
            BinaryOp::Sub => {
                if b.is_zero() {
                    return a;
                }
                if a.is_zero() {
                    return Expr::unary(UnaryOp::Neg, b);
                }
                if a == b {
                    return Expr::zero();
                }
            }
            BinaryOp::Mul => {
                if a.is_zero() || b.is_zero() {
                    return Expr::zero();
                }
                if a.is_one() {
                    return b;
                }
                if b.is_one() {
                    return a;
                }
            }
            BinaryOp::Div => {
                if a.is_zero() {
                    return Expr::zero();
                }
                if b.is_one() {
                    return a;
                }
            }
            BinaryOp::Pow => {
                if b.is_one() {
                    return a;
                }
                if b.is_zero() {
                    return Expr::one();
                }
            }
        }
        Expr::new(Node::Binary(op, a, b))
    }

    pub fn neg(&self) -> Expr {
        Expr::unary(UnaryOp::Neg, self.clone())
    }

    pub fn sin(&self) -> Expr {
        Expr::unary(UnaryOp::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::unary(UnaryOp::Cos, self.clone())
    }

    pub fn tan(&self) -> Expr {
        Expr::unary(UnaryOp::Tan, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::unary(UnaryOp::Exp, self.clone())
    }

    pub fn log(&self) -> Expr {
        Expr::unary(UnaryOp::Log, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        Expr::unary(UnaryOp::Sqrt, self.clone())
    }

    pub fn pow(&self, e: Expr) -> Expr {
        Expr::binary(BinaryOp::Pow, self.clone(), e)
    }

    pub fn powi(&self, n: i32) -> Expr {
        self.pow(Expr::constant(n as f64))
    }

    /// Exact symbolic partial derivative with respect to `v`.
    pub fn differentiate(&self, v: &str) -> Expr {
        match &*self.0 {
            Node::Const(_) => Expr::zero(),
            Node::Var(name) => {
                if name == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Unary(op, u) => {
                let du = u.differentiate(v);
                if du.is_zero() {
                    return Expr::zero();
                }
                match op {
                    UnaryOp::Neg => du.neg(),
                    UnaryOp::Sin => u.cos() * du,
                    UnaryOp::Cos => u.sin().neg() * du,
                    UnaryOp::Tan => du / u.cos().powi(2),
                    UnaryOp::Exp => u.exp() * du,
                    UnaryOp::Log => du / u.clone(),
                    UnaryOp::Sqrt => du / (Expr::constant(2.0) * u.sqrt()),
                }
            }
            Node::Binary(op, a, b) => {
                let da = a.differentiate(v);
                let db = b.differentiate(v);
                match op {
                    BinaryOp::Add => da + db,
                    BinaryOp::Sub => da - db,
                    BinaryOp::Mul => da * b.clone() + a.clone() * db,
                    BinaryOp::Div => {
                        (da * b.clone() - a.clone() * db) / b.clone().powi(2)
                    }
                    BinaryOp::Pow => {
                        if let Some(c) = b.as_const() {
                            // d(u^c) = c u^(c-1) u'
                            Expr::constant(c) * a.pow(Expr::constant(c - 1.0)) * da
                        } else {
                            // d(u^v) = u^v (v' log u + v u' / u)
                            a.pow(b.clone())
                                * (db * a.log() + b.clone() * da / a.clone())
                        }
                    }
                }
            }
        }
    }

    /// IEEE double-precision evaluation at a point.
    pub fn evaluate(&self, p: &Point) -> Result<f64, EvalError> {
        match &*self.0 {
            Node::Const(c) => Ok(*c),
            Node::Var(name) => p
                .get(name)
                .ok_or_else(|| EvalError::MissingVariable(name.clone())),
            Node::Unary(op, u) => {
                let x = u.evaluate(p)?;
                match op {
                    UnaryOp::Neg => Ok(-x),
                    UnaryOp::Sin => Ok(libm::sin(x)),
                    UnaryOp::Cos => Ok(libm::cos(x)),
                    UnaryOp::Tan => Ok(libm::tan(x)),
                    UnaryOp::Exp => Ok(libm::exp(x)),
                    UnaryOp::Log => {
                        if x > 0.0 {
                            Ok(libm::log(x))
                        } else {
                            Err(domain_err(self, "log of non-positive value"))
                        }
                    }
                    UnaryOp::Sqrt => {
                        if x >= 0.0 {
                            Ok(libm::sqrt(x))
                        } else {
                            Err(domain_err(self, "sqrt of negative value"))
                        }
                    }
                }
            }
            Node::Binary(op, a, b) => {
                let x = a.evaluate(p)?;
                let y = b.evaluate(p)?;
                match op {
                    BinaryOp::Add => Ok(x + y),
                    BinaryOp::Sub => Ok(x - y),
                    BinaryOp::Mul => Ok(x * y),
                    BinaryOp::Div => {
                        if y == 0.0 {
                            Err(domain_err(self, "division by zero"))
                        } else {
                            Ok(x / y)
                        }
                    }
                    BinaryOp::Pow => const_pow(x, y)
                        .ok_or_else(|| domain_err(self, "power outside real domain")),
                }
            }
        }
    }

    /// Equivalence-preserving bottom-up simplification.
    ///
    /// Rebuilds the tree through the smart constructors, which fold
    /// constants and apply the 0/1 identities, `x - x -> 0`, `e * 0 -> 0`,
    /// `x^1 -> x`.
    pub fn simplify(&self) -> Expr {
        match &*self.0 {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Unary(op, u) => Expr::unary(*op, u.simplify()),
            Node::Binary(op, a, b) => Expr::binary(*op, a.simplify(), b.simplify()),
        }
    }

    /// The set of coordinate names occurring in the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match &*self.0 {
            Node::Const(_) => {}
            Node::Var(name) => {
                out.insert(name.clone());
            }
            Node::Unary(_, u) => u.collect_vars(out),
            Node::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Simultaneous substitution of expressions for variables.
    pub fn substitute(&self, map: &BTreeMap<String, Expr>) -> Expr {
        match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Var(name) => map.get(name).cloned().unwrap_or_else(|| self.clone()),
            Node::Unary(op, u) => Expr::unary(*op, u.substitute(map)),
            Node::Binary(op, a, b) => {
                Expr::binary(*op, a.substitute(map), b.substitute(map))
            }
        }
    }
}

/// Real-valued `x^y`, or `None` when the result is undefined or non-finite.
///
/// Integer exponents are honored for any base; non-integer exponents
/// require a positive base.
fn const_pow(x: f64, y: f64) -> Option<f64> {
    let v = if x > 0.0 {
        libm::pow(x, y)
    } else if y == libm::trunc(y) && y.abs() < 1e9 {
        if x == 0.0 && y <= 0.0 {
            return None;
        }
        libm::pow(x, y)
    } else {
        return None;
    };
    v.is_finite().then_some(v)
}

impl core::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, self, rhs)
    }
}

impl core::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Sub, self, rhs)
    }
}

impl core::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, self, rhs)
    }
}

impl core::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Div, self, rhs)
    }
}

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::unary(UnaryOp::Neg, self)
    }
}

// Canonical rendering: every binary node fully parenthesized, functions by
// their DSL names. The output re-parses to an equivalent expression.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => {
                if *c < 0.0 {
                    write!(f, "({c})")
                } else {
                    write!(f, "{c}")
                }
            }
            Node::Var(name) => write!(f, "{name}"),
            Node::Unary(UnaryOp::Neg, u) => write!(f, "(-{u})"),
            Node::Unary(op, u) => write!(f, "{}({u})", op.name()),
            Node::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(pairs: &[(&str, f64)]) -> Point {
        pairs.iter().map(|&(k, v)| (k, v)).collect()
    }

    #[test]
    fn chain_rule_sin_squared() {
        let theta = Expr::var("theta");
        let e = theta.sin().powi(2);
        let d = e.differentiate("theta");
        // 2 sin(theta) cos(theta)
        let expect = Expr::constant(2.0) * theta.sin() * theta.cos();
        let p = pt(&[("theta", 0.7)]);
        let a = d.evaluate(&p).unwrap();
        let b = expect.evaluate(&p).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert!(Expr::constant(7.0).differentiate("x").is_zero());
    }

    #[test]
    fn derivative_matches_central_difference() {
        // log(x) * x^2 at x = 1.3
        let x = Expr::var("x");
        let e = x.log() * x.powi(2);
        let d = e.differentiate("x");
        let h = 1e-4;
        let f = |v: f64| e.evaluate(&pt(&[("x", v)])).unwrap();
        let fd = (f(1.3 + h) - f(1.3 - h)) / (2.0 * h);
        let sym = d.evaluate(&pt(&[("x", 1.3)])).unwrap();
        assert!((sym - fd).abs() < 1e-6);
    }

    #[test]
    fn evaluate_basics() {
        let theta = Expr::var("theta");
        let e = theta.sin().powi(2);
        let v = e
            .evaluate(&pt(&[("theta", core::f64::consts::FRAC_PI_2)]))
            .unwrap();
        assert!((v - 1.0).abs() < 1e-15);

        let e = Expr::var("x") * Expr::var("y") + Expr::var("y").powi(2);
        assert_eq!(e.evaluate(&pt(&[("x", 2.0), ("y", 3.0)])).unwrap(), 15.0);
    }

    #[test]
    fn evaluate_division_by_zero() {
        let e = Expr::one() / Expr::var("x");
        match e.evaluate(&pt(&[("x", 0.0)])) {
            Err(EvalError::Domain { reason, .. }) => {
                assert!(reason.contains("division"))
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn evaluate_missing_variable() {
        let e = Expr::var("x") + Expr::var("q");
        assert_eq!(
            e.evaluate(&pt(&[("x", 1.0)])),
            Err(EvalError::MissingVariable("q".into()))
        );
    }

    #[test]
    fn negative_base_integer_exponent() {
        let e = Expr::var("x").powi(3);
        assert_eq!(e.evaluate(&pt(&[("x", -2.0)])).unwrap(), -8.0);
        // non-integer exponent of a negative base is a domain error
        let e = Expr::var("x").pow(Expr::constant(0.5));
        assert!(e.evaluate(&pt(&[("x", -2.0)])).is_err());
        // 0^negative is a domain error
        let e = Expr::var("x").powi(-1);
        assert!(e.evaluate(&pt(&[("x", 0.0)])).is_err());
    }

    #[test]
    fn simplify_identities() {
        let theta = Expr::var("theta");
        let phi = Expr::var("phi");
        let e = Expr::zero() * theta.sin() + Expr::one() * phi.clone();
        assert_eq!(e.simplify(), phi);
        assert_eq!(
            (Expr::constant(2.0) + Expr::constant(3.0)).as_const(),
            Some(5.0)
        );
        let x = Expr::var("x");
        assert_eq!(x.powi(1), x);
        assert!((x.clone() - x.clone()).is_zero());
    }

    #[test]
    fn substitution() {
        let mut map = BTreeMap::new();
        map.insert("y".to_string(), Expr::var("x").powi(2));
        let e = Expr::var("y") + Expr::var("x");
        let s = e.substitute(&map);
        let v = s.evaluate(&pt(&[("x", 3.0)])).unwrap();
        assert_eq!(v, 12.0);
    }

    #[test]
    fn display_round_trip_shape() {
        let e = (Expr::var("x") + Expr::constant(2.0)) * Expr::var("y").sin();
        assert_eq!(e.to_string(), "((x + 2) * sin(y))");
    }
}
