use std::f64::consts::PI;

use crate::error::CliError;

/// A number, `pi`, or a product/quotient of those: `2*pi`, `pi/100`, `3pi/2`.
pub fn parse_expr(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Usage(format!("cannot parse time expression {s:?}"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let mut parts = s.split('/');
    let mut value = product(parts.next().ok_or_else(bad)?).ok_or_else(bad)?;
    for d in parts {
        value /= product(d).ok_or_else(bad)?;
    }
    Ok(value)
}

fn product(s: &str) -> Option<f64> {
    s.split('*').map(factor).product()
}

fn factor(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.strip_suffix("pi") {
        Some("") => Some(PI),
        Some("-") => Some(-PI),
        Some(coef) => coef.parse::<f64>().ok().map(|c| c * PI),
        None => s.parse::<f64>().ok(),
    }
}

/// `lo:hi:step` into its three values.
pub fn parse_grid(s: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(CliError::Usage(format!("time grid must be lo:hi:step, got {s:?}")));
    };
    Ok((parse_expr(lo)?, parse_expr(hi)?, parse_expr(step)?))
}
