//! Parameter lists given as `value` or `start:stop:step`.

use pellip_core::field::linspace_step;

use crate::error::{CliError, Result};

/// Parses a single number or an inclusive `start:stop:step` range.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let number = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| CliError::Parse(format!("not a number: {s:?}")))?;
        if !v.is_finite() {
            return Err(CliError::Parse(format!("not a finite number: {s:?}")));
        }
        Ok(v)
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![number(v)?]),
        [a, b, step] => {
            linspace_step(number(a)?, number(b)?, number(step)?).map_err(|e| CliError::Validation(e.to_string()))
        }
        _ => Err(CliError::Parse(format!("expected a number or start:stop:step, got {text:?}"))),
    }
}
