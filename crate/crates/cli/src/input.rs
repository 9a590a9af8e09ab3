//! Reading observations from a file of newline-separated reals or a
//! single-column CSV with an optional header.

use std::fmt;

/// A line of the input that is not a number.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn unquote(field: &str) -> &str {
    let f = field.trim();
    f.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(f)
        .trim()
}

/// Parses one value per non-empty line. The first non-empty line is taken
/// as a header when it does not parse as a number.
pub fn parse_values(text: &str) -> Result<Vec<f64>, ParseError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut values = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        let is_first = std::mem::replace(&mut first, false);
        if fields.len() > 1 {
            // a trailing comma leaves an empty second field
            if fields[1..].iter().any(|f| !f.trim().is_empty()) {
                return Err(ParseError {
                    line,
                    message: format!("expected a single column, found {} fields", fields.len()),
                });
            }
        }
        let field = unquote(fields[0]);
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => {
                return Err(ParseError {
                    line,
                    message: format!("value `{field}` is not finite"),
                })
            }
            Err(_) if is_first => {}
            Err(_) => {
                return Err(ParseError {
                    line,
                    message: format!("`{field}` is not a number"),
                })
            }
        }
    }
    Ok(values)
}
