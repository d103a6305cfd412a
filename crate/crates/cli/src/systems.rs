//! Dynamical systems written as parameter strings.
//!
//! A system is one or more factors joined by `&`:
//!
//! * `cyclic:M`: the rotation x ↦ x+1 on ℤ/M; default observable
//!   k ↦ e(k/M), default point 0.
//! * `rot:a1,a2,...`: the torus rotation by (a1, a2, ...); default
//!   observable the character with all frequencies 1, default point 0.
//! * `poly:c0,c1,...`: the unipotent affine system whose orbit realizes
//!   e(Q(n)) for Q(t) = Σ cᵢtⁱ; point and observable come with it.
//!
//! Observables (`f`) and points (`x`) may be given per factor, also joined
//! by `&`, with empty entries taking the default: `table:v0,v1,...` or
//! `char:h1,h2,...` for f; an integer (cyclic) or a list of reals (torus)
//! for x.

use ergolab::correlations::root_of_unity;
use ergolab::dynsys::{polynomial_orbit_system, AdditiveSystem, MultiplicativeSystem, Observable, State};
use ergolab::{frac, Complex64};

use crate::values::{parse_count, parse_real, parse_reals};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub sys: AdditiveSystem,
    pub x: State,
    pub f: Observable,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_factor(text: &str, x: &str, f: &str) -> CliResult<SystemSpec> {
    let (kind, arg) = text.split_once(':').ok_or_else(|| usage(format!("system '{text}' needs the form kind:args")))?;
    let mut spec = match kind.trim() {
        "cyclic" => {
            let m = parse_count(arg)?;
            let table = (0..m).map(|k| root_of_unity(k, m)).collect();
            SystemSpec { sys: AdditiveSystem::cyclic(m)?, x: State::Cyclic(0), f: Observable::TableOnCyclic(table) }
        }
        "rot" => {
            let alpha = parse_reals(arg)?;
            let d = alpha.len();
            SystemSpec {
                sys: AdditiveSystem::torus(alpha.iter().map(|&a| frac(a)).collect())?,
                x: State::Torus(vec![0.0; d]),
                f: Observable::CharacterOnTorus(vec![1; d]),
            }
        }
        "poly" => {
            let (sys, x, f) = polynomial_orbit_system(&parse_reals(arg)?, 1)?;
            SystemSpec { sys, x, f }
        }
        other => return Err(usage(format!("unknown system kind '{other}' (expected cyclic, rot or poly)"))),
    };
    let x = x.trim();
    if !x.is_empty() {
        spec.x = match &spec.sys {
            AdditiveSystem::Cyclic { .. } => State::Cyclic(parse_count(x)?),
            _ => State::Torus(parse_reals(x)?.into_iter().map(frac).collect()),
        };
    }
    let f = f.trim();
    if let Some(v) = f.strip_prefix("table:") {
        spec.f = Observable::TableOnCyclic(parse_reals(v)?.into_iter().map(|r| Complex64::new(r, 0.0)).collect());
    } else if let Some(v) = f.strip_prefix("char:") {
        let h = v
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| usage(format!("bad frequency '{s}'"))))
            .collect::<CliResult<_>>()?;
        spec.f = Observable::CharacterOnTorus(h);
    } else if !f.is_empty() && f != "default" {
        return Err(usage(format!("observable '{f}' must be table:..., char:... or default")));
    }
    spec.sys.check_state(&spec.x)?;
    spec.sys.check_observable(&spec.f)?;
    Ok(spec)
}

/// Parses a system with optional point and observable overrides.
pub fn parse_system(sys: &str, x: &str, f: &str) -> CliResult<SystemSpec> {
    let factors: Vec<&str> = sys.split('&').collect();
    let pad = |s: &str| -> CliResult<Vec<String>> {
        let parts: Vec<String> = if s.trim().is_empty() { vec![] } else { s.split('&').map(str::to_string).collect() };
        if parts.len() > factors.len() {
            return Err(usage(format!("'{s}' has more parts than the system has factors")));
        }
        Ok((0..factors.len()).map(|i| parts.get(i).cloned().unwrap_or_default()).collect())
    };
    let (xs, fs) = (pad(x)?, pad(f)?);
    let mut specs: Vec<SystemSpec> =
        factors.iter().zip(xs.iter().zip(&fs)).map(|(s, (x, f))| parse_factor(s, x, f)).collect::<CliResult<_>>()?;
    if specs.len() == 1 {
        return Ok(specs.pop().unwrap());
    }
    let mut out = SystemSpec {
        sys: AdditiveSystem::Product(Vec::new()),
        x: State::Product(Vec::new()),
        f: Observable::Product(Vec::new()),
    };
    for s in specs {
        if let (AdditiveSystem::Product(a), State::Product(b), Observable::Product(c)) = (&mut out.sys, &mut out.x, &mut out.f) {
            a.push(s.sys);
            b.push(s.x);
            c.push(s.f);
        }
    }
    Ok(out)
}

/// A multiplicative system with its starting point and observable:
/// `omega:<system>` gives Sₙ = T^{Ω(n)}, `nu2:α` the rotation by ν₂(n)α.
pub fn parse_multiplicative(text: &str, y: &str, g: &str) -> CliResult<(MultiplicativeSystem, State, Observable)> {
    if let Some(rest) = text.strip_prefix("omega:") {
        let s = parse_system(rest, y, g)?;
        let msys = MultiplicativeSystem::DerivedAdditive { base: s.sys, a: ergolab::arith::AdditiveFunctionSpec::big_omega() };
        return Ok((msys, s.x, s.f));
    }
    if let Some(rest) = text.strip_prefix("nu2:") {
        let alpha = frac(parse_real(rest)?);
        let y = if y.trim().is_empty() { 0.0 } else { frac(parse_real(y)?) };
        let g = match g.trim() {
            "" | "default" => Observable::CharacterOnTorus(vec![1]),
            other => match other.strip_prefix("char:").map(|h| h.trim().parse::<i64>()) {
                Some(Ok(h)) => Observable::CharacterOnTorus(vec![h]),
                _ => return Err(usage(format!("observable '{other}' must be char:h"))),
            },
        };
        return Ok((MultiplicativeSystem::NuTwoRotation { alpha }, State::Torus(vec![y]), g));
    }
    Err(usage(format!("multiplicative system '{text}' must be omega:<system> or nu2:<alpha>")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_default_is_exact() {
        let s = parse_system("cyclic:2", "", "").unwrap();
        assert_eq!(s.f, Observable::alternating());
        assert_eq!(s.x, State::Cyclic(0));
        let s = parse_system("cyclic:4", "3", "table:1,0,0,0").unwrap();
        assert_eq!(s.x, State::Cyclic(3));
    }

    #[test]
    fn rotations_and_products() {
        let s = parse_system("rot:sqrt2 - 1,pi - 3", "0.5,0", "char:1,-1").unwrap();
        assert_eq!(s.f, Observable::CharacterOnTorus(vec![1, -1]));
        assert_eq!(s.x, State::Torus(vec![0.5, 0.0]));
        let p = parse_system("cyclic:3 & rot:sqrt2", "1", "").unwrap();
        assert!(matches!(p.sys, AdditiveSystem::Product(ref v) if v.len() == 2));
        assert_eq!(p.x, State::Product(vec![State::Cyclic(1), State::Torus(vec![0.0])]));
        assert!(parse_system("cyclic:2", "", "a&b").is_err());
    }

    #[test]
    fn polynomial_factor() {
        let s = parse_system("poly:0,0,sqrt2", "", "").unwrap();
        assert!(matches!(s.sys, AdditiveSystem::UnipotentAffine { .. }));
    }

    #[test]
    fn bad_specs() {
        for bad in ["cyclic", "cyclic:0", "spin:3", "rot:", "cyclic:2|x"] {
            assert!(parse_system(bad, "", "").is_err(), "{bad}");
        }
        assert!(parse_system("cyclic:2", "", "char:1").is_err());
        assert!(parse_multiplicative("cyclic:2", "", "").is_err());
        assert!(parse_multiplicative("nu2:sqrt2 - 1", "0.1", "").is_ok());
        assert!(parse_multiplicative("omega:cyclic:2", "", "").is_ok());
    }
}
