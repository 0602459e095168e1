//! Grid specs: `start:stop:step` (inclusive), a comma list, or one value.

use crate::CliError;

pub fn parse_grid(name: &str, spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::usage(format!("{name}: malformed range spec '{spec}': {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{}' is not a number", s.trim())));
    let spec_t = spec.trim();
    if spec_t.is_empty() {
        return Err(bad("empty"));
    }
    let values = if spec_t.contains(':') {
        let parts: Vec<&str> = spec_t.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0 && step.is_finite()) {
            return Err(bad("step must be positive"));
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            return Err(bad("need start <= stop"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(bad("too many points"));
        }
        (0..count).map(|k| start + k as f64 * step).collect()
    } else {
        spec_t.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    Ok(values)
}

pub fn parse_list<T: std::str::FromStr>(name: &str, spec: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let out: Vec<T> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| CliError::usage(format!("{name}: '{s}': {e}"))))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(CliError::usage(format!("{name}: empty list")));
    }
    Ok(out)
}
