//! Generalized polynomials: expressions built from constants, the variable
//! n, +, · and the integer part.
//!
//! Grammar (no division; `-` is sugar):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | primary
//! primary := number | 'n' | 'sqrt2' | 'phi' | 'pi'
//!          | 'floor' '(' expr ')' | 'frac' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `a - b` parses as `a + -1*b`, and a minus applied directly to a constant
//! folds into it. The printer emits exactly these forms, so
//! `parse_gp(&e.to_string())` reproduces `e`.

use std::fmt;

use crate::arith::FactorSieve;
use crate::sum::mean;
use crate::{e, frac, Complex64, Error, Result, GOLDEN_RATIO};

#[derive(Debug, Clone, PartialEq)]
pub enum GPExpr {
    Const(f64),
    Var,
    Add(Box<GPExpr>, Box<GPExpr>),
    Mul(Box<GPExpr>, Box<GPExpr>),
    Floor(Box<GPExpr>),
    Frac(Box<GPExpr>),
}

const NAMED: [(&str, f64); 3] = [("sqrt2", std::f64::consts::SQRT_2), ("phi", GOLDEN_RATIO), ("pi", std::f64::consts::PI)];

impl GPExpr {
    pub fn add(a: GPExpr, b: GPExpr) -> Self {
        Self::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: GPExpr, b: GPExpr) -> Self {
        Self::Mul(Box::new(a), Box::new(b))
    }

    pub fn floor(a: GPExpr) -> Self {
        Self::Floor(Box::new(a))
    }

    pub fn frac(a: GPExpr) -> Self {
        Self::Frac(Box::new(a))
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Const(_) | Self::Var => 1,
            Self::Add(a, b) | Self::Mul(a, b) => 1 + a.depth().max(b.depth()),
            Self::Floor(a) | Self::Frac(a) => 1 + a.depth(),
        }
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    let (sign, mag) = if c.is_sign_negative() && c != 0.0 { ("-", -c) } else { ("", c) };
    match NAMED.iter().find(|&&(_, v)| v == mag) {
        Some((name, _)) => write!(f, "{sign}{name}"),
        None => write!(f, "{sign}{mag:?}"),
    }
}

// precedence: 0 = sum, 1 = product, 2 = atom
fn write_expr(f: &mut fmt::Formatter<'_>, expr: &GPExpr, min_prec: u8) -> fmt::Result {
    let prec = match expr {
        GPExpr::Add(..) => 0,
        GPExpr::Mul(..) => 1,
        _ => 2,
    };
    let paren = prec < min_prec;
    if paren {
        f.write_str("(")?;
    }
    match expr {
        GPExpr::Const(c) => write_const(f, *c)?,
        GPExpr::Var => f.write_str("n")?,
        GPExpr::Add(a, b) => {
            write_expr(f, a, 0)?;
            f.write_str(" + ")?;
            // parsing is left-associative, so a right-nested sum needs parentheses
            write_expr(f, b, 1)?;
        }
        GPExpr::Mul(a, b) => {
            write_expr(f, a, 1)?;
            f.write_str("*")?;
            write_expr(f, b, 2)?;
        }
        GPExpr::Floor(a) => {
            f.write_str("floor(")?;
            write_expr(f, a, 0)?;
            f.write_str(")")?;
        }
        GPExpr::Frac(a) => {
            f.write_str("frac(")?;
            write_expr(f, a, 0)?;
            f.write_str(")")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for GPExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<GPExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = GPExpr::add(lhs, self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = GPExpr::add(lhs, negate(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<GPExpr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            lhs = GPExpr::mul(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<GPExpr> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(negate(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<GPExpr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let len = self.src[start..]
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .unwrap_or(self.src.len() - start);
                let ident = &self.src[start..start + len];
                self.pos += len;
                match ident {
                    "n" => Ok(GPExpr::Var),
                    "floor" | "frac" => {
                        self.expect('(')?;
                        let inner = self.expr()?;
                        self.expect(')')?;
                        Ok(if ident == "floor" { GPExpr::floor(inner) } else { GPExpr::frac(inner) })
                    }
                    _ => match NAMED.iter().find(|&&(name, _)| name == ident) {
                        Some(&(_, v)) => Ok(GPExpr::Const(v)),
                        None => {
                            self.pos = start;
                            self.err(format!("unknown identifier '{ident}'"))
                        }
                    },
                }
            }
            Some(c) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<GPExpr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = start;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        match self.src[start..i].parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = i;
                Ok(GPExpr::Const(v))
            }
            _ => self.err(format!("malformed number '{}'", &self.src[start..i])),
        }
    }
}

fn negate(e: GPExpr) -> GPExpr {
    match e {
        GPExpr::Const(c) => GPExpr::Const(-c),
        other => GPExpr::mul(GPExpr::Const(-1.0), other),
    }
}

/// Parses the grammar in the module documentation. Errors carry the byte
/// offset of the problem.
pub fn parse_gp(text: &str) -> Result<GPExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let expr = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(expr)
}

/// Q(n).
pub fn eval_gp(expr: &GPExpr, n: u64) -> f64 {
    match expr {
        GPExpr::Const(c) => *c,
        GPExpr::Var => n as f64,
        GPExpr::Add(a, b) => eval_gp(a, n) + eval_gp(b, n),
        GPExpr::Mul(a, b) => eval_gp(a, n) * eval_gp(b, n),
        GPExpr::Floor(a) => eval_gp(a, n).floor(),
        GPExpr::Frac(a) => {
            let v = eval_gp(a, n);
            v - v.floor()
        }
    }
}

/// Arguments of ⌊·⌋ closer than this (but not equal) to an integer are
/// flagged as possibly misclassified.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Q(n), plus whether some floor or frac argument was within
/// [`BOUNDARY_TOL`] of an integer without being one.
pub fn eval_gp_flagged(expr: &GPExpr, n: u64) -> (f64, bool) {
    match expr {
        GPExpr::Const(c) => (*c, false),
        GPExpr::Var => (n as f64, false),
        GPExpr::Add(a, b) | GPExpr::Mul(a, b) => {
            let (x, fx) = eval_gp_flagged(a, n);
            let (y, fy) = eval_gp_flagged(b, n);
            let v = if matches!(expr, GPExpr::Add(..)) { x + y } else { x * y };
            (v, fx || fy)
        }
        GPExpr::Floor(a) | GPExpr::Frac(a) => {
            let (x, fx) = eval_gp_flagged(a, n);
            let d = (x - x.round()).abs();
            let near = d > 0.0 && d < BOUNDARY_TOL;
            let v = if matches!(expr, GPExpr::Floor(_)) { x.floor() } else { x - x.floor() };
            (v, fx || near)
        }
    }
}

/// |𝔼 e(hQ(n))| and |𝔼 e(hQ(Ω(n)))| for one frequency h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylPair {
    pub h: i64,
    pub linear: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpWeylReport {
    pub rows: Vec<WeylPair>,
    /// n ≤ N at which evaluating Q(n) hit a near-boundary floor.
    pub flagged_linear: u64,
    /// Values k = Ω(n) at which Q(k) hit a near-boundary floor.
    pub flagged_omega_values: Vec<u32>,
}

/// Weyl sums of Q(n) and Q(Ω(n)) over n ∈ [N] for h = 1..=H.
///
/// Q(n) is reduced mod 1 before scaling by h. Its accuracy is bounded by
/// the double-precision evaluation of Q itself: for Q(n) of size X the
/// absolute error is about X·2⁻⁵³.
pub fn gp_equidistribution_compare(expr: &GPExpr, n_max: u64, sieve: &FactorSieve, h_max: u32) -> Result<GpWeylReport> {
    if n_max == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if n_max > sieve.limit() {
        return Err(Error::OutOfRange { n: n_max, limit: sieve.limit() });
    }
    if h_max == 0 {
        return Err(Error::invalid("H must be at least 1"));
    }
    let max_omega = 64 - n_max.leading_zeros();
    let mut flagged_omega_values = Vec::new();
    let at_omega: Vec<f64> = (0..=max_omega)
        .map(|k| {
            let (v, flag) = eval_gp_flagged(expr, k as u64);
            if flag {
                flagged_omega_values.push(k);
            }
            frac(v)
        })
        .collect();
    // the flag count shares the evaluation pass with h = 1
    let flagged = std::sync::atomic::AtomicU64::new(0);
    let mut rows = Vec::with_capacity(h_max as usize);
    for h in 1..=h_max as i64 {
        let hf = h as f64;
        let linear = mean(n_max, |n| {
            let (v, flag) = eval_gp_flagged(expr, n);
            if flag && h == 1 {
                flagged.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
            e(hf * frac(v))
        })
        .norm();
        let omega = mean(n_max, |n| e(hf * at_omega[sieve.big_omega_unchecked(n) as usize])).norm();
        rows.push(WeylPair { h, linear, omega });
    }
    Ok(GpWeylReport { rows, flagged_linear: flagged.into_inner(), flagged_omega_values })
}

/// Convenience: Q(n) as a complex phase e(h·Q(n)).
pub fn gp_phase(expr: &GPExpr, h: i64, n: u64) -> Complex64 {
    e(h as f64 * frac(eval_gp(expr, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    fn c(v: f64) -> GPExpr {
        GPExpr::Const(v)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_gp("n").unwrap(), GPExpr::Var);
        let e = parse_gp("floor(n*sqrt2)*0.618").unwrap();
        assert_eq!(e, GPExpr::mul(GPExpr::floor(GPExpr::mul(GPExpr::Var, c(SQRT_2))), c(0.618)));
        assert_eq!(e.to_string(), "floor(n*sqrt2)*0.618");
        assert_eq!(parse_gp(&e.to_string()).unwrap(), e);
        assert_eq!(parse_gp("n - 2").unwrap(), GPExpr::add(GPExpr::Var, c(-2.0)));
        assert_eq!(parse_gp("-n").unwrap(), GPExpr::mul(c(-1.0), GPExpr::Var));
        assert_eq!(parse_gp("2*-sqrt2").unwrap(), GPExpr::mul(c(2.0), c(-SQRT_2)));
        assert_eq!(parse_gp("1.5e-3").unwrap(), c(0.0015));
    }

    #[test]
    fn polynomial_times_floor_shape() {
        let e = parse_gp("(n*n + 1) + (sqrt2*n + 3*n*n)*floor(phi*n*n + 0.5*n)").unwrap();
        for n in 0..50u64 {
            let nf = n as f64;
            let want = (nf * nf + 1.0) + (SQRT_2 * nf + 3.0 * nf * nf) * (GOLDEN_RATIO * nf * nf + 0.5 * nf).floor();
            assert_eq!(eval_gp(&e, n), want);
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(parse_gp("n + x"), Err(Error::Parse { pos: 4, msg: "unknown identifier 'x'".into() }));
        assert!(matches!(parse_gp("floor(n"), Err(Error::Parse { pos: 7, .. })));
        assert!(matches!(parse_gp("n / 2"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_gp(""), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_gp("1..2"), Err(Error::Parse { .. })));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_gp(&GPExpr::Var, 7), 7.0);
        assert_eq!(eval_gp(&GPExpr::frac(c(2.5)), 0), 0.5);
        assert_eq!(eval_gp(&GPExpr::frac(c(-2.25)), 0), 0.75);
        assert_eq!(eval_gp(&parse_gp("floor(n*sqrt2)").unwrap(), 5), 7.0);
    }

    #[test]
    fn boundary_flags() {
        // 0.1*3 = 0.30000000000000004 in binary; times 10 is 3.0000000000000004
        let e = parse_gp("floor(0.1*n*10)").unwrap();
        assert!(eval_gp_flagged(&e, 3).1);
        assert!(!eval_gp_flagged(&parse_gp("floor(n)").unwrap(), 3).1);
        assert!(!eval_gp_flagged(&parse_gp("floor(n*sqrt2)").unwrap(), 5).1);
    }

    #[test]
    fn weyl_comparison_examples() {
        let s = FactorSieve::new(1_000_000).unwrap();
        let r = gp_equidistribution_compare(&parse_gp("n*sqrt2").unwrap(), 1_000_000, &s, 5).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert!(r.rows.iter().all(|w| w.linear < 1e-3), "{r:?}");
        assert!(r.rows[0].omega < 0.05, "{r:?}");
        let r = gp_equidistribution_compare(&parse_gp("0.5*n").unwrap(), 1_000_000, &s, 5).unwrap();
        assert!(r.rows[0].linear <= 1e-6);
        assert!((r.rows[1].linear - 1.0).abs() < 1e-12);
        // 𝔼 e(Ω(n)/2) = 𝔼 λ(n)
        let lam = mean(1_000_000, |n| Complex64::new(s.liouville(n).unwrap() as f64, 0.0)).norm();
        assert!((r.rows[0].omega - lam).abs() < 1e-12);
        let r = gp_equidistribution_compare(&c(0.3), 1000, &s, 5).unwrap();
        assert!(r.rows.iter().all(|w| (w.linear - 1.0).abs() < 1e-12 && (w.omega - 1.0).abs() < 1e-12));
        assert!(gp_equidistribution_compare(&c(0.3), 2_000_000, &s, 5).is_err());
    }

    fn leaf() -> impl Strategy<Value = GPExpr> {
        prop_oneof![
            Just(GPExpr::Var),
            Just(c(SQRT_2)),
            Just(c(-GOLDEN_RATIO)),
            Just(c(std::f64::consts::PI)),
            (-1e6f64..1e6).prop_map(c),
            (-1e-8f64..1e-8).prop_map(c),
            (-50i32..50).prop_map(|k| c(k as f64)),
        ]
    }

    fn tree() -> impl Strategy<Value = GPExpr> {
        leaf().prop_recursive(5, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| GPExpr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| GPExpr::mul(a, b)),
                inner.clone().prop_map(GPExpr::floor),
                inner.prop_map(GPExpr::frac),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn printer_roundtrip(e in tree()) {
            prop_assert!(e.depth() <= 6);
            let printed = e.to_string();
            prop_assert_eq!(parse_gp(&printed).unwrap(), e, "{}", printed);
        }

        #[test]
        fn frac_identity(e in tree(), n in 0u64..1000) {
            let v = eval_gp(&e, n);
            let f = eval_gp(&GPExpr::frac(e), n);
            prop_assert!(f.to_bits() == (v - v.floor()).to_bits() || (f.is_nan() && v.is_nan()));
        }
    }
}
