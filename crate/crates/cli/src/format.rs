//! Locale-independent numeric formatting for CSV output.

/// Rounds to 12 significant digits, then prints the shortest representation of the rounded
/// value. Exponent notation is used outside `[1e-5, 1e15)`.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-5..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// A CSV cell for an optional value; `NA` when absent.
pub fn cell(x: Option<f64>) -> String {
    x.map(number).unwrap_or_else(|| "NA".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(number(0.5), "0.5");
        assert_eq!(number(1.0), "1");
        assert_eq!(number(-0.0), "0");
        assert_eq!(number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(number(1.0 / 3.0), "0.333333333333");
        assert_eq!(number(2e-9), "2e-9");
        assert_eq!(number(1.234567890123456e20), "1.23456789012e20");
        assert_eq!(number(0.1 + 0.2), "0.3");
    }

    #[test]
    fn missing_values() {
        assert_eq!(cell(None), "NA");
        assert_eq!(cell(Some(0.25)), "0.25");
        assert_eq!(number(f64::NAN), "NaN");
    }
}
