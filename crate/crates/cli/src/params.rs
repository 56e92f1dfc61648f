//! Range/list flag parsing.

use cipwave_core::exact::Rational;
use cipwave_core::fem::GammaRule;

/// Parse "1..4" (inclusive) or "1,2,5" into a usize list.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            if a > b {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad integer '{part}'"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// Parse "0.5,1.0" or "log:100:1600:5" (log-spaced inclusive) into floats.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    if let Some(rest) = s.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("log range needs log:start:stop:count, got '{s}'"));
        }
        let a: f64 = parts[0].parse().map_err(|_| "bad log start".to_string())?;
        let b: f64 = parts[1].parse().map_err(|_| "bad log stop".to_string())?;
        let n: usize = parts[2].parse().map_err(|_| "bad log count".to_string())?;
        if !(a > 0.0 && b > 0.0 && n >= 2) {
            return Err("log range needs positive endpoints and count >= 2".into());
        }
        let (la, lb) = (a.ln(), b.ln());
        return Ok((0..n)
            .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
            .collect());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        out.push(
            part.trim()
                .parse()
                .map_err(|_| format!("bad number '{part}'"))?,
        );
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// Parse a penalty rule: fem | gamma0 | gamma-opt | explicit value.
pub fn parse_gamma_rule(s: &str) -> Result<GammaRule, String> {
    match s {
        "fem" => Ok(GammaRule::Fem),
        "gamma0" => Ok(GammaRule::Gamma0),
        "gamma-opt" => Ok(GammaRule::GammaOpt),
        other => other
            .parse::<f64>()
            .map(GammaRule::Value)
            .map_err(|_| format!("gamma must be fem|gamma0|gamma-opt|NUMBER, got '{other}'")),
    }
}

/// Parse an exact rational "num/den" or integer string.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let parse_int = |t: &str| -> Result<cipwave_core::exact::Int, String> {
        t.trim()
            .parse()
            .map_err(|_| format!("bad integer '{t}' in rational"))
    };
    if let Some((n, d)) = s.split_once('/') {
        Ok(Rational::new(parse_int(n)?, parse_int(d)?))
    } else {
        Ok(Rational::from_integer(parse_int(s)?))
    }
}
