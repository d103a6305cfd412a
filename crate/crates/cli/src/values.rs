//! Parsing of numeric parameter values.

use ergolab::gp::{eval_gp, parse_gp};

use crate::{CliError, CliResult};

/// A real number: a generalized-polynomial constant expression such as
/// `sqrt2 - 1` or `0.25`, or a quotient `a/b` of two of them.
pub fn parse_real(text: &str) -> CliResult<f64> {
    let eval = |s: &str| -> CliResult<f64> {
        let e = parse_gp(s).map_err(|e| CliError::Usage(format!("bad number '{text}': {e}")))?;
        // a constant expression has the same value at every n
        let v = eval_gp(&e, 0);
        if v != eval_gp(&e, 1) {
            return Err(CliError::Usage(format!("'{text}' depends on n; a constant is required")));
        }
        Ok(v)
    };
    match text.split_once('/') {
        Some((a, b)) => {
            let d = eval(b)?;
            if d == 0.0 {
                return Err(CliError::Usage(format!("division by zero in '{text}'")));
            }
            Ok(eval(a)? / d)
        }
        None => eval(text),
    }
}

/// A rational r/m in lowest terms, written `r/m` or as an integer.
pub fn parse_rational(text: &str) -> CliResult<Option<(i64, u64)>> {
    let int = |s: &str| s.trim().parse::<i64>().ok();
    match text.split_once('/') {
        Some((a, b)) => match (int(a), int(b)) {
            (Some(r), Some(m)) if m > 0 => {
                let g = ergolab::averaging::gcd(r.unsigned_abs(), m as u64).max(1);
                Ok(Some((r / g as i64, m as u64 / g)))
            }
            _ => Ok(None),
        },
        None => Ok(int(text).map(|r| (r, 1))),
    }
}

/// A positive integer, also accepting scientific notation such as `1e7`.
pub fn parse_count(text: &str) -> CliResult<u64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = t.parse().map_err(|_| CliError::Usage(format!("'{text}' is not a number")))?;
    if !(v >= 0.0 && v.fract() == 0.0 && v < 1.8e19) {
        return Err(CliError::Usage(format!("'{text}' is not a nonnegative integer")));
    }
    Ok(v as u64)
}

/// A comma-separated list of positive integers, e.g. `1e4,1e5,1e6`.
pub fn parse_grid(text: &str) -> CliResult<Vec<u64>> {
    let grid: Vec<u64> = text.split(',').map(parse_count).collect::<CliResult<_>>()?;
    if grid.iter().any(|&n| n == 0) {
        return Err(CliError::Usage("grid values must be at least 1".into()));
    }
    Ok(grid)
}

/// A comma-separated list of reals.
pub fn parse_reals(text: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(|s| parse_real(s.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert_eq!(parse_real("sqrt2 - 1").unwrap(), std::f64::consts::SQRT_2 - 1.0);
        assert_eq!(parse_real("1/3").unwrap(), 1.0 / 3.0);
        assert!(parse_real("n").is_err());
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("x").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("2/6").unwrap(), Some((1, 3)));
        assert_eq!(parse_rational("5").unwrap(), Some((5, 1)));
        assert_eq!(parse_rational("sqrt2").unwrap(), None);
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1e4,100000,1E6").unwrap(), vec![10_000, 100_000, 1_000_000]);
        assert_eq!(parse_count("2.5e3").unwrap(), 2500);
        assert!(parse_grid("1e4,0").is_err());
        assert!(parse_grid("1.5").is_err());
        assert!(parse_grid("abc").is_err());
    }
}
