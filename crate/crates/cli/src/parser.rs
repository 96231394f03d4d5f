//! Workspace file format: a block-structured text DSL for manifolds,
//! metrics, explicit connections, vector fields and sampling domains,
//! with a canonical serializer for round-trip tests.
//!
//! ```text
//! # comments run to end of line
//! manifold sphere {
//!     dim 2;
//!     coords theta, phi;
//!     metric { g[0][0] = 1; g[1][1] = sin(theta)^2; }
//!     domain { theta in (0.3, 2.8); phi in (0.1, 6.1); }
//! }
//! vectorfield azimuth on sphere { v[1] = 1; }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use hlift_core::{
    Chart, Connection, ConnectionSource, Expr, Manifold, ManifoldEntry, SamplingDomain,
    Tensor, Variance, VectorField, Workspace,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn at(tok: &Token, message: impl Into<String>) -> Self {
        ParseError {
            line: tok.line,
            col: tok.col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Ident(String),
    Number(f64),
    Symbol(char),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    kind: TokenKind,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    loop {
        let (tline, tcol) = (line, col);
        let Some(&c) = chars.peek() else {
            out.push(Token {
                kind: TokenKind::Eof,
                line,
                col,
            });
            return Ok(out);
        };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                bump(&mut chars);
                if c == '\n' {
                    break;
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            out.push(Token {
                kind: TokenKind::Ident(s),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() || c == '.' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            // exponent part: e[+-]?digits
            if let Some(&e) = chars.peek() {
                if e == 'e' || e == 'E' {
                    let mut ahead = chars.clone();
                    ahead.next();
                    let sign = matches!(ahead.peek(), Some('+') | Some('-'));
                    if sign {
                        ahead.next();
                    }
                    if matches!(ahead.peek(), Some(d) if d.is_ascii_digit()) {
                        s.push(bump(&mut chars));
                        if sign {
                            s.push(bump(&mut chars));
                        }
                        while let Some(&c) = chars.peek() {
                            if c.is_ascii_digit() {
                                s.push(bump(&mut chars));
                            } else {
                                break;
                            }
                        }
                    }
                }
            }
            let v: f64 = s.parse().map_err(|_| ParseError {
                line: tline,
                col: tcol,
                message: format!("malformed number `{s}`"),
            })?;
            out.push(Token {
                kind: TokenKind::Number(v),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if "{}[]()=,;+-*/^".contains(c) {
            bump(&mut chars);
            out.push(Token {
                kind: TokenKind::Symbol(c),
                line: tline,
                col: tcol,
            });
            continue;
        }
        return Err(ParseError {
            line: tline,
            col: tcol,
            message: format!("unexpected character `{c}`"),
        });
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const FUNCTIONS: [&str; 6] = ["sin", "cos", "tan", "exp", "log", "sqrt"];

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_symbol(&self, c: char) -> bool {
        self.peek().kind == TokenKind::Symbol(c)
    }

    fn eat_symbol(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.kind == TokenKind::Symbol(c) {
            Ok(())
        } else {
            Err(ParseError::at(&t, format!("expected `{c}`")))
        }
    }

    fn eat_ident(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.next();
        match &t.kind {
            TokenKind::Ident(s) => Ok((s.clone(), t.clone())),
            _ => Err(ParseError::at(&t, "expected identifier")),
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let t = self.next();
        if t.kind == TokenKind::Ident(kw.to_string()) {
            Ok(())
        } else {
            Err(ParseError::at(&t, format!("expected `{kw}`")))
        }
    }

    fn eat_number(&mut self) -> Result<f64, ParseError> {
        let t = self.next();
        match t.kind {
            TokenKind::Number(v) => Ok(v),
            _ => Err(ParseError::at(&t, "expected number")),
        }
    }

    fn eat_signed_number(&mut self) -> Result<f64, ParseError> {
        if self.at_symbol('-') {
            self.next();
            Ok(-self.eat_number()?)
        } else {
            self.eat_number()
        }
    }

    fn eat_index(&mut self) -> Result<usize, ParseError> {
        self.eat_symbol('[')?;
        let t = self.peek().clone();
        let v = self.eat_number()?;
        if v.fract() != 0.0 || v < 0.0 {
            return Err(ParseError::at(&t, "index must be a non-negative integer"));
        }
        self.eat_symbol(']')?;
        Ok(v as usize)
    }

    // expression grammar: sum -> product -> factor -> power -> atom,
    // with ^ right-associative and binding tighter than unary minus
    fn expression(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.product()?;
        loop {
            if self.at_symbol('+') {
                self.next();
                acc = acc + self.product()?;
            } else if self.at_symbol('-') {
                self.next();
                acc = acc - self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.at_symbol('*') {
                self.next();
                acc = acc * self.factor()?;
            } else if self.at_symbol('/') {
                self.next();
                acc = acc / self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.at_symbol('-') {
            self.next();
            Ok(-self.factor()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.at_symbol('^') {
            self.next();
            Ok(base.pow(self.factor()?))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match &t.kind {
            TokenKind::Number(v) => Ok(Expr::constant(*v)),
            TokenKind::Ident(name) => {
                if self.at_symbol('(') {
                    if !FUNCTIONS.contains(&name.as_str()) {
                        return Err(ParseError::at(&t, format!("unknown function `{name}`")));
                    }
                    self.next();
                    let arg = self.expression()?;
                    self.eat_symbol(')')?;
                    Ok(match name.as_str() {
                        "sin" => arg.sin(),
                        "cos" => arg.cos(),
                        "tan" => arg.tan(),
                        "exp" => arg.exp(),
                        "log" => arg.log(),
                        _ => arg.sqrt(),
                    })
                } else {
                    Ok(Expr::var(name))
                }
            }
            TokenKind::Symbol('(') => {
                let e = self.expression()?;
                self.eat_symbol(')')?;
                Ok(e)
            }
            _ => Err(ParseError::at(&t, "expected expression")),
        }
    }
}

/// Parse a single expression; the whole input must be consumed.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expression()?;
    let t = p.peek();
    if t.kind != TokenKind::Eof {
        return Err(ParseError::at(t, "trailing input after expression"));
    }
    Ok(e)
}

#[derive(Debug, Default)]
struct RawManifold {
    dim: Option<usize>,
    coords: Vec<String>,
    metric: Vec<(usize, usize, Expr, Token)>,
    connection: Option<(bool, Vec<(usize, usize, usize, Expr, Token)>)>,
    domain: Vec<(String, f64, f64, Token)>,
}

/// Parse and validate a full workspace file.
pub fn parse_workspace(text: &str) -> Result<Workspace, ParseError> {
    let mut p = Parser::new(text)?;
    let mut manifolds: Vec<(String, RawManifold, Token)> = Vec::new();
    let mut fields: Vec<(String, String, Vec<(usize, Expr, Token)>, Token)> = Vec::new();

    loop {
        let t = p.peek().clone();
        match &t.kind {
            TokenKind::Eof => break,
            TokenKind::Ident(kw) if kw == "manifold" => {
                p.next();
                let (name, ntok) = p.eat_ident()?;
                if manifolds.iter().any(|(n, _, _)| *n == name) {
                    return Err(ParseError::at(&ntok, format!("duplicate manifold `{name}`")));
                }
                let raw = parse_manifold_body(&mut p)?;
                manifolds.push((name, raw, ntok));
            }
            TokenKind::Ident(kw) if kw == "vectorfield" => {
                p.next();
                let (name, ntok) = p.eat_ident()?;
                p.eat_keyword("on")?;
                let (mname, _) = p.eat_ident()?;
                p.eat_symbol('{')?;
                let mut comps = Vec::new();
                while !p.at_symbol('}') {
                    p.eat_keyword("v")?;
                    let itok = p.peek().clone();
                    let i = p.eat_index()?;
                    p.eat_symbol('=')?;
                    let e = p.expression()?;
                    p.eat_symbol(';')?;
                    comps.push((i, e, itok));
                }
                p.eat_symbol('}')?;
                if fields.iter().any(|(n, m, _, _)| *n == name && *m == mname) {
                    return Err(ParseError::at(
                        &ntok,
                        format!("duplicate vectorfield `{name}` on `{mname}`"),
                    ));
                }
                fields.push((name, mname, comps, ntok));
            }
            _ => {
                return Err(ParseError::at(
                    &t,
                    "expected `manifold` or `vectorfield`",
                ))
            }
        }
    }

    let mut w = Workspace::new("workspace");
    for (name, raw, ntok) in manifolds {
        let entry = validate_manifold(&name, raw, &ntok)?;
        w.manifolds.insert(name, entry);
    }
    for (name, mname, comps, ntok) in fields {
        let entry = w.manifolds.get_mut(&mname).ok_or_else(|| {
            ParseError::at(&ntok, format!("vectorfield on unknown manifold `{mname}`"))
        })?;
        let chart = entry.manifold.chart.clone();
        let n = chart.dim();
        let mut v = vec![Expr::zero(); n];
        for (i, e, itok) in comps {
            if i >= n {
                return Err(ParseError::at(
                    &itok,
                    format!("component index {i} out of range for dimension {n}"),
                ));
            }
            check_coords(&e, &chart, &itok)?;
            v[i] = e;
        }
        entry
            .fields
            .insert(name, VectorField::new(chart, v));
    }
    Ok(w)
}

fn parse_manifold_body(p: &mut Parser) -> Result<RawManifold, ParseError> {
    let mut raw = RawManifold::default();
    p.eat_symbol('{')?;
    while !p.at_symbol('}') {
        let (kw, ktok) = p.eat_ident()?;
        match kw.as_str() {
            "dim" => {
                if raw.dim.is_some() {
                    return Err(ParseError::at(&ktok, "duplicate `dim`"));
                }
                let v = p.eat_number()?;
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(ParseError::at(&ktok, "dim must be a positive integer"));
                }
                raw.dim = Some(v as usize);
                p.eat_symbol(';')?;
            }
            "coords" => {
                if !raw.coords.is_empty() {
                    return Err(ParseError::at(&ktok, "duplicate `coords`"));
                }
                loop {
                    let (c, ctok) = p.eat_ident()?;
                    if raw.coords.contains(&c) {
                        return Err(ParseError::at(&ctok, format!("duplicate coordinate `{c}`")));
                    }
                    raw.coords.push(c);
                    if p.at_symbol(',') {
                        p.next();
                    } else {
                        break;
                    }
                }
                p.eat_symbol(';')?;
            }
            "metric" => {
                if !raw.metric.is_empty() {
                    return Err(ParseError::at(&ktok, "duplicate `metric` block"));
                }
                p.eat_symbol('{')?;
                while !p.at_symbol('}') {
                    p.eat_keyword("g")?;
                    let itok = p.peek().clone();
                    let i = p.eat_index()?;
                    let j = p.eat_index()?;
                    p.eat_symbol('=')?;
                    let e = p.expression()?;
                    p.eat_symbol(';')?;
                    raw.metric.push((i, j, e, itok));
                }
                p.eat_symbol('}')?;
            }
            "connection" => {
                if raw.connection.is_some() {
                    return Err(ParseError::at(&ktok, "duplicate `connection` block"));
                }
                let symmetric = if let TokenKind::Ident(s) = &p.peek().kind {
                    if s == "symmetric" {
                        p.next();
                        true
                    } else {
                        false
                    }
                } else {
                    false
                };
                p.eat_symbol('{')?;
                let mut comps = Vec::new();
                while !p.at_symbol('}') {
                    p.eat_keyword("Gamma")?;
                    let ktok2 = p.peek().clone();
                    let k = p.eat_index()?;
                    let j = p.eat_index()?;
                    let i = p.eat_index()?;
                    p.eat_symbol('=')?;
                    let e = p.expression()?;
                    p.eat_symbol(';')?;
                    comps.push((k, j, i, e, ktok2));
                }
                p.eat_symbol('}')?;
                raw.connection = Some((symmetric, comps));
            }
            "domain" => {
                if !raw.domain.is_empty() {
                    return Err(ParseError::at(&ktok, "duplicate `domain` block"));
                }
                p.eat_symbol('{')?;
                while !p.at_symbol('}') {
                    let (c, ctok) = p.eat_ident()?;
                    p.eat_keyword("in")?;
                    p.eat_symbol('(')?;
                    let lo = p.eat_signed_number()?;
                    p.eat_symbol(',')?;
                    let hi = p.eat_signed_number()?;
                    p.eat_symbol(')')?;
                    p.eat_symbol(';')?;
                    raw.domain.push((c, lo, hi, ctok));
                }
                p.eat_symbol('}')?;
            }
            other => {
                return Err(ParseError::at(
                    &ktok,
                    format!("unknown manifold item `{other}`"),
                ))
            }
        }
    }
    p.eat_symbol('}')?;
    Ok(raw)
}

fn check_coords(e: &Expr, chart: &Arc<Chart>, tok: &Token) -> Result<(), ParseError> {
    for v in e.free_vars() {
        if chart.index_of(&v).is_none() {
            return Err(ParseError::at(tok, format!("unknown coordinate `{v}`")));
        }
    }
    Ok(())
}

fn validate_manifold(
    name: &str,
    raw: RawManifold,
    ntok: &Token,
) -> Result<ManifoldEntry, ParseError> {
    let dim = raw
        .dim
        .ok_or_else(|| ParseError::at(ntok, format!("manifold `{name}` missing `dim`")))?;
    if raw.coords.is_empty() {
        return Err(ParseError::at(ntok, format!("manifold `{name}` missing `coords`")));
    }
    if raw.coords.len() != dim {
        return Err(ParseError::at(
            ntok,
            format!(
                "manifold `{name}`: dim is {dim} but {} coordinates given",
                raw.coords.len()
            ),
        ));
    }
    let chart = Chart::new(raw.coords.iter().map(String::as_str))
        .map_err(|e| ParseError::at(ntok, e.to_string()))?;

    let mut dom = SamplingDomain::new();
    for (c, lo, hi, ctok) in &raw.domain {
        if chart.index_of(c).is_none() {
            return Err(ParseError::at(ctok, format!("unknown coordinate `{c}`")));
        }
        if dom.contains_coord(c) {
            return Err(ParseError::at(ctok, format!("duplicate domain for `{c}`")));
        }
        dom.insert(c, *lo, *hi)
            .map_err(|e| ParseError::at(ctok, e.to_string()))?;
    }
    for c in chart.coords() {
        if !dom.contains_coord(c) {
            return Err(ParseError::at(
                ntok,
                format!("manifold `{name}`: missing sampling domain for `{c}`"),
            ));
        }
    }

    let source = match (&raw.metric.is_empty(), &raw.connection) {
        (true, None) => {
            return Err(ParseError::at(
                ntok,
                format!("manifold `{name}` needs a metric or an explicit connection"),
            ))
        }
        (false, Some(_)) => {
            return Err(ParseError::at(
                ntok,
                format!("manifold `{name}` has both a metric and an explicit connection"),
            ))
        }
        (false, None) => {
            let mut comps = vec![None::<Expr>; dim * dim];
            for (i, j, e, tok) in &raw.metric {
                if *i >= dim || *j >= dim {
                    return Err(ParseError::at(tok, "metric index out of range"));
                }
                check_coords(e, &chart, tok)?;
                let slot = &mut comps[i * dim + j];
                if slot.is_some() {
                    return Err(ParseError::at(tok, format!("duplicate g[{i}][{j}]")));
                }
                *slot = Some(e.clone());
            }
            // mirror whichever triangle was given; reject contradictions
            for i in 0..dim {
                for j in 0..i {
                    let upper = comps[j * dim + i].clone();
                    let lower = comps[i * dim + j].clone();
                    match (lower, upper) {
                        (Some(l), Some(u)) => {
                            if (l - u).simplify().is_zero() {
                                continue;
                            }
                            return Err(ParseError::at(
                                ntok,
                                format!(
                                    "manifold `{name}`: g[{i}][{j}] and g[{j}][{i}] disagree"
                                ),
                            ));
                        }
                        (Some(l), None) => comps[j * dim + i] = Some(l),
                        (None, Some(u)) => comps[i * dim + j] = Some(u),
                        (None, None) => {}
                    }
                }
            }
            let comps: Vec<Expr> = comps
                .into_iter()
                .map(|c| c.unwrap_or_else(Expr::zero))
                .collect();
            let g = Tensor::from_fn(
                chart.clone(),
                vec![Variance::Down, Variance::Down],
                |idx| comps[idx[0] * dim + idx[1]].clone(),
            );
            ConnectionSource::Metric(g)
        }
        (true, Some((symmetric, entries))) => {
            let mut comps = vec![Expr::zero(); dim * dim * dim];
            let mut seen = vec![false; dim * dim * dim];
            for (k, j, i, e, tok) in entries {
                if *k >= dim || *j >= dim || *i >= dim {
                    return Err(ParseError::at(tok, "connection index out of range"));
                }
                check_coords(e, &chart, tok)?;
                let flat = (*k * dim + *j) * dim + *i;
                if seen[flat] {
                    return Err(ParseError::at(tok, format!("duplicate Gamma[{k}][{j}][{i}]")));
                }
                seen[flat] = true;
                comps[flat] = e.clone();
                if *symmetric && j != i {
                    let mirror = (*k * dim + *i) * dim + *j;
                    if !seen[mirror] {
                        seen[mirror] = true;
                        comps[mirror] = e.clone();
                    } else if !(comps[mirror].clone() - e.clone()).simplify().is_zero() {
                        return Err(ParseError::at(
                            tok,
                            format!(
                                "Gamma[{k}][{j}][{i}] contradicts Gamma[{k}][{i}][{j}] on a symmetric connection"
                            ),
                        ));
                    }
                }
            }
            let c = Connection::from_fn(chart.clone(), *symmetric, |k, j, i| {
                comps[(k * dim + j) * dim + i].clone()
            });
            ConnectionSource::Explicit(c)
        }
    };

    let manifold = Manifold::new(name, chart, dom).map_err(|e| ParseError::at(ntok, e.to_string()))?;
    Ok(ManifoldEntry {
        manifold,
        source,
        fields: BTreeMap::new(),
    })
}

/// Canonical text form of a workspace; `parse_workspace` of the output
/// reproduces equivalent components.
pub fn serialize_workspace(w: &Workspace) -> String {
    let mut out = String::new();
    for (name, entry) in &w.manifolds {
        let chart = &entry.manifold.chart;
        let n = chart.dim();
        let _ = writeln!(out, "manifold {name} {{");
        let _ = writeln!(out, "    dim {n};");
        let coords: Vec<&str> = chart.coords().collect();
        let _ = writeln!(out, "    coords {};", coords.join(", "));
        match &entry.source {
            ConnectionSource::Metric(g) => {
                let _ = writeln!(out, "    metric {{");
                for i in 0..n {
                    for j in i..n {
                        let e = g.get(&[i, j]);
                        if !e.is_zero() {
                            let _ = writeln!(out, "        g[{i}][{j}] = {e};");
                        }
                    }
                }
                let _ = writeln!(out, "    }}");
            }
            ConnectionSource::Explicit(c) => {
                let tag = if c.is_symmetric() { " symmetric" } else { "" };
                let _ = writeln!(out, "    connection{tag} {{");
                for k in 0..n {
                    for j in 0..n {
                        for i in 0..n {
                            let e = c.gamma(k, j, i);
                            if !e.is_zero() {
                                let _ = writeln!(out, "        Gamma[{k}][{j}][{i}] = {e};");
                            }
                        }
                    }
                }
                let _ = writeln!(out, "    }}");
            }
        }
        let _ = writeln!(out, "    domain {{");
        for c in chart.coords() {
            let (lo, hi) = entry.manifold.domain.get(c).unwrap();
            let _ = writeln!(out, "        {c} in ({lo}, {hi});");
        }
        let _ = writeln!(out, "    }}");
        let _ = writeln!(out, "}}");
        for (fname, field) in &entry.fields {
            let _ = writeln!(out, "vectorfield {fname} on {name} {{");
            for (i, e) in field.comps().iter().enumerate() {
                if !e.is_zero() {
                    let _ = writeln!(out, "    v[{i}] = {e};");
                }
            }
            let _ = writeln!(out, "}}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use hlift_core::Point;

    fn eval1(e: &Expr, x: f64) -> f64 {
        let mut p = Point::new();
        p.set("x", x);
        e.evaluate(&p).unwrap()
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse_expression("2^3^2").unwrap();
        assert_eq!(e.as_const(), Some(512.0));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse_expression("-x^2").unwrap();
        assert_eq!(eval1(&e, 3.0), -9.0);
        let e = parse_expression("2^-2").unwrap();
        assert_eq!(e.as_const(), Some(0.25));
    }

    #[test]
    fn precedence_and_functions() {
        let e = parse_expression("1 + 2*x - sin(x)/2").unwrap();
        let x = 0.7f64;
        assert!((eval1(&e, x) - (1.0 + 2.0 * x - x.sin() / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_expression("sin(").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
        let err = parse_expression("x + @").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
    }

    #[test]
    fn unknown_function_rejected() {
        let err = parse_expression("sinh(x)").unwrap_err();
        assert!(err.message.contains("unknown function"));
    }

    const SPHERE: &str = "
        manifold sphere {
            dim 2;
            coords theta, phi;
            metric { g[0][0] = 1; g[1][1] = sin(theta)^2; }
            domain { theta in (0.3, 2.8); phi in (0.1, 6.1); }
        }
        vectorfield azimuth on sphere { v[1] = 1; }
    ";

    #[test]
    fn sphere_file_round_trips() {
        let w = parse_workspace(SPHERE).unwrap();
        assert_eq!(w.manifolds.len(), 1);
        let entry = &w.manifolds["sphere"];
        assert_eq!(entry.manifold.dim(), 2);
        assert!(entry.fields.contains_key("azimuth"));
        let again = parse_workspace(&serialize_workspace(&w)).unwrap();
        assert_eq!(serialize_workspace(&again), serialize_workspace(&w));
    }

    #[test]
    fn metric_mirrored_from_upper_triangle() {
        let text = "
            manifold m { dim 2; coords x, y;
                metric { g[0][0] = 1; g[0][1] = x; g[1][1] = 1; }
                domain { x in (-1, 1); y in (-1, 1); } }
        ";
        let w = parse_workspace(text).unwrap();
        let g = w.manifolds["m"].metric().unwrap();
        assert_eq!(g.get(&[1, 0]), &Expr::var("x"));
    }

    #[test]
    fn metric_and_connection_conflict() {
        let text = "
            manifold m { dim 1; coords x;
                metric { g[0][0] = 1; }
                connection symmetric { Gamma[0][0][0] = x; }
                domain { x in (0, 1); } }
        ";
        let err = parse_workspace(text).unwrap_err();
        assert!(err.message.contains("both"), "{err}");
    }

    #[test]
    fn unknown_coordinate_in_field() {
        let text = "
            manifold m { dim 1; coords x; metric { g[0][0] = 1; }
                domain { x in (0, 1); } }
            vectorfield bad on m { v[0] = z; }
        ";
        let err = parse_workspace(text).unwrap_err();
        assert!(err.message.contains("unknown coordinate `z`"), "{err}");
    }

    #[test]
    fn missing_domain_rejected() {
        let text = "manifold m { dim 2; coords x, y; metric { g[0][0] = 1; g[1][1] = 1; }
            domain { x in (0, 1); } }";
        let err = parse_workspace(text).unwrap_err();
        assert!(err.message.contains("missing sampling domain"), "{err}");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let text = "manifold m { dim 3; coords x, y; metric { g[0][0] = 1; }
            domain { x in (0, 1); y in (0, 1); } }";
        let err = parse_workspace(text).unwrap_err();
        assert!(err.message.contains("dim is 3"), "{err}");
    }

    #[test]
    fn explicit_symmetric_connection_mirrors() {
        let text = "
            manifold m { dim 2; coords x, y;
                connection symmetric { Gamma[0][0][1] = x; }
                domain { x in (0, 1); y in (0, 1); } }
        ";
        let w = parse_workspace(text).unwrap();
        match &w.manifolds["m"].source {
            ConnectionSource::Explicit(c) => {
                assert_eq!(c.gamma(0, 1, 0), &Expr::var("x"));
                assert!(c.is_symmetric());
            }
            _ => panic!("expected explicit connection"),
        }
    }
}
