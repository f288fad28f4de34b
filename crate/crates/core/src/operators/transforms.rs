//! Transformation rules: each turns a re-validated region into one edit.

use rand::distributions::{Alphanumeric, DistString};

use super::locators::{last_segment, line_indent, line_start, AssignmentLocator};
use super::{location_rng, Edit, MutationError, TransformInput, Transformation};
use crate::span::Span;

fn capture<'a>(input: &'a TransformInput<'_>, name: &str) -> Result<&'a str, MutationError> {
    input
        .location
        .capture(name)
        .ok_or_else(|| MutationError::MissingCapture(name.to_string()))
}

fn at(input: &TransformInput<'_>) -> String {
    format!(
        "{}:{}:{}",
        input.location.file_path, input.location.line, input.location.start_column
    )
}

/// Inner span of a quoted literal region.
fn unquoted<'a>(input: &TransformInput<'a>) -> (Span, &'a str) {
    let span = Span::new(input.region.start + 1, input.region.end - 1);
    (span, input.file.slice(span))
}

fn random_token(input: &TransformInput<'_>, len: usize) -> String {
    let mut rng = location_rng(input.seed, input.location);
    Alphanumeric.sample_string(&mut rng, len)
}

// ---------------------------------------------------------------------------

/// A new line `<object> = null;` right before the matched line.
pub(crate) struct NullBeforeLine;

impl Transformation for NullBeforeLine {
    fn edit(&self, input: &TransformInput<'_>) -> Result<Edit, MutationError> {
        let object = capture(input, "object")?;
        let offset = line_start(input.file, input.region.start);
        Ok(Edit {
            span: Span::new(offset, offset),
            replacement: format!("{object} = null;{}", input.file.line_ending()),
            description: format!(
                "inserted `{object} = null;` before line {} ({})",
                input.location.line,
                at(input)
            ),
        })
    }
}

/// `<var> = null;` on a new line after the assignment statement.
pub(crate) struct NullAfterStatement;

impl Transformation for NullAfterStatement {
    fn edit(&self, input: &TransformInput<'_>) -> Result<Edit, MutationError> {
        let object = capture(input, "object")?;
        let source = input
            .source
            .ok_or_else(|| MutationError::StaleLocation(input.location.operator_id.clone()))?;
        let (statement, _) = source
            .call_sites
            .iter()
            .filter(|c| c.full_span == input.region)
            .find_map(|c| AssignmentLocator::assignment(input.file, source, c))
            .ok_or_else(|| MutationError::StaleLocation(input.location.operator_id.clone()))?;
        let indent = line_indent(input.file, statement.start);
        Ok(Edit {
            span: Span::new(statement.end, statement.end),
            replacement: format!("{}{indent}{object} = null;", input.file.line_ending()),
            description: format!("inserted `{object} = null;` after the assignment ({})", at(input)),
        })
    }
}

/// Code inserted on its own line before the region (a method's first
/// statement).
pub(crate) enum Delay {
    Sleep(u64),
    BusyLoop(u64),
}

pub(crate) struct InsertDelay(pub Delay);

impl Transformation for InsertDelay {
    fn edit(&self, input: &TransformInput<'_>) -> Result<Edit, MutationError> {
        let code = match self.0 {
            Delay::Sleep(ms) => {
                format!("try {{ Thread.sleep({ms}L); }} catch (InterruptedException mutagenInterrupted) {{ }}")
            }
            Delay::BusyLoop(n) => {
                format!("for (long mutagenI = 0; mutagenI < {n}L; mutagenI++) {{ }}")
            }
        };
        let indent = line_indent(input.file, input.region.start);
        let start = input.region.start;
        let description = match self.0 {
            Delay::Sleep(ms) => format!("inserted a {ms} ms sleep ({})", at(input)),
            Delay::BusyLoop(n) => format!("inserted a busy loop of {n} iterations ({})", at(input)),
        };
        Ok(Edit {
            span: Span::new(start, start),
            replacement: format!("{code}{}{indent}", input.file.line_ending()),
            description,
        })
    }
}

/// Removes the region (a whole XML element).
pub(crate) struct Delete;

impl Transformation for Delete {
    fn edit(&self, input: &TransformInput<'_>) -> Result<Edit, MutationError> {
        let first_line = input.file.slice(input.region).lines().next().unwrap_or("");
        Ok(Edit {
            span: input.region,
            replacement: String::new(),
            description: format!("deleted `{}` ({})", first_line.trim(), at(input)),
        })
    }
}

/// How a replaced region's new text is computed.
pub(crate) enum Replacement {
    Fixed(&'static str),
    /// `"<random>"` for a quoted literal.
    RandomLiteral(usize),
    /// A random value for an unquoted XML attribute value.
    RandomValue(usize),
    /// `R.id.<captured id>`.
    CapturedId,
    /// The `replacement` capture, verbatim.
    Captured,
    IncrementInteger,
    ComplementColor,
    ReverseFileName,
    BreakSqlKeyword,
    InvalidUri,
    SwapDayMonth,
}

pub(crate) struct Replace(pub Replacement);

impl Transformation for Replace {
    fn edit(&self, input: &TransformInput<'_>) -> Result<Edit, MutationError> {
        let original = input.file.slice(input.region);
        let (span, replacement) = match &self.0 {
            Replacement::Fixed(text) => (input.region, text.to_string()),
            Replacement::RandomLiteral(len) => (input.region, format!("\"{}\"", random_token(input, *len))),
            Replacement::RandomValue(len) => (input.region, random_token(input, *len)),
            Replacement::CapturedId => (input.region, format!("R.id.{}", capture(input, "id")?)),
            Replacement::Captured => (input.region, capture(input, "replacement")?.to_string()),
            Replacement::IncrementInteger => {
                let n: u64 = original
                    .parse()
                    .map_err(|_| MutationError::StaleLocation(input.location.operator_id.clone()))?;
                (input.region, (n + 1).to_string())
            }
            Replacement::ComplementColor => (input.region, complement_color(original)),
            Replacement::ReverseFileName => {
                let (inner, value) = unquoted(input);
                let (cut, segment) = last_segment(value)
                    .ok_or_else(|| MutationError::StaleLocation(input.location.operator_id.clone()))?;
                let span = Span::new(inner.start + cut, inner.end);
                (span, segment.chars().rev().collect())
            }
            Replacement::BreakSqlKeyword => {
                let (inner, value) = unquoted(input);
                let keyword_start = value.len() - value.trim_start().len();
                let at = inner.start + keyword_start + 3;
                (Span::new(at, at + 1), String::new())
            }
            Replacement::InvalidUri => {
                let (inner, value) = unquoted(input);
                let at = inner.start + value.find("://").map(|i| i + 3).unwrap_or(0);
                (Span::new(at, at), "invalid".to_string())
            }
            Replacement::SwapDayMonth => {
                let (inner, value) = unquoted(input);
                let swapped = value
                    .chars()
                    .map(|c| match c {
                        'd' => 'M',
                        'M' => 'd',
                        c => c,
                    })
                    .collect();
                (inner, swapped)
            }
        };
        let description = format!(
            "replaced `{}` with `{}` ({})",
            input.file.slice(span),
            replacement,
            at(input)
        );
        Ok(Edit {
            span,
            replacement,
            description,
        })
    }
}

/// Bitwise complement of the colour channels of `#RGB`, `#ARGB`, `#RRGGBB`
/// or `#AARRGGBB`; alpha and letter case are kept.
pub(crate) fn complement_color(value: &str) -> String {
    let digits = &value[1..];
    let alpha = match digits.len() {
        4 => 1,
        8 => 2,
        _ => 0,
    };
    let lower = digits.chars().any(|c| c.is_ascii_lowercase());
    let mut out = String::from("#");
    for (i, c) in digits.chars().enumerate() {
        if i < alpha {
            out.push(c);
            continue;
        }
        let d = c.to_digit(16).unwrap_or(0);
        let flipped = std::char::from_digit(15 - d, 16).unwrap_or('0');
        out.push(if lower { flipped } else { flipped.to_ascii_uppercase() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colors() {
        assert_eq!(complement_color("#FFFFFF"), "#000000");
        assert_eq!(complement_color("#fff"), "#000");
        assert_eq!(complement_color("#80123456"), "#80EDCBA9");
        assert_eq!(complement_color("#c0a1"), "#cf5e");
        assert_eq!(complement_color("#000000"), "#FFFFFF");
    }
}
