use rust_decimal::Decimal;

use super::NlpError;

/// Multiplier for a scale word, if `word` is one.
pub fn scale_exponent(word: &str) -> Option<u32> {
    match word.to_ascii_lowercase().as_str() {
        "thousand" => Some(3),
        "million" => Some(6),
        "billion" => Some(9),
        _ => None,
    }
}

/// Parses `1,518`, `2.3`, `2.3 million` into an exact decimal. Grouping
/// commas are stripped and scale words multiply by 10^3, 10^6 or 10^9.
pub fn normalize_value(text: &str) -> Result<Decimal, NlpError> {
    let nan = || NlpError::NotANumber(text.to_owned());
    let (digits, exp) = split_number(text.trim()).ok_or_else(nan)?;
    let mut value: Decimal = digits.parse().map_err(|_| nan())?;
    if let Some(exp) = exp {
        value = value.checked_mul(Decimal::from(10u64.pow(exp))).ok_or_else(nan)?;
    }
    Ok(value.normalize())
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// `1,234.5 million` → (`1234.5`, Some(6)). Grouped integers need groups of
/// three after a leading group of one to three digits.
fn split_number(text: &str) -> Option<(String, Option<u32>)> {
    let (number, exp) = match text.split_once(char::is_whitespace) {
        Some((n, rest)) => (n, Some(scale_exponent(rest.trim_start())?)),
        None => (text, None),
    };
    let (int, frac) = match number.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (number, None),
    };
    let groups: Vec<&str> = int.split(',').collect();
    let grouped_ok = groups.len() == 1 || (groups[0].len() <= 3 && groups[1..].iter().all(|g| g.len() == 3));
    if !groups.iter().all(|g| all_digits(g)) || !grouped_ok || frac.is_some_and(|f| !all_digits(f)) {
        return None;
    }
    let mut digits = groups.concat();
    if let Some(f) = frac {
        digits.push('.');
        digits.push_str(f);
    }
    Some((digits, exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(normalize_value("1,518").unwrap(), Decimal::from(1518));
        assert_eq!(normalize_value("0").unwrap(), Decimal::ZERO);
        assert_eq!(normalize_value("2.3 million").unwrap(), Decimal::from(2_300_000));
        assert_eq!(normalize_value("1.25 Billion").unwrap(), Decimal::from(1_250_000_000u64));
        assert_eq!(normalize_value("0.50").unwrap().to_string(), "0.5");
    }

    #[test]
    fn rejects_non_numbers() {
        for bad in ["", "abc", "1,51", "1.2.3", "million", "12 bales", ",5"] {
            assert!(matches!(normalize_value(bad), Err(NlpError::NotANumber(_))), "{bad}");
        }
    }

    /// The accepted language as a regular expression.
    fn oracle_accepts(text: &str) -> bool {
        regex::Regex::new(r"^(\d{1,3}(?:,\d{3})+|\d+)(\.\d+)?(?:\s+(?i:thousand|million|billion))?$")
            .unwrap()
            .is_match(text.trim())
    }

    proptest! {
        #[test]
        fn accepts_exactly_the_number_language(text in "[0-9,. ]{0,9}( ?(million|Thousand|bales|x))?") {
            prop_assert_eq!(normalize_value(&text).is_ok(), oracle_accepts(&text), "{:?}", text);
        }

        #[test]
        fn idempotent_on_rendered_output(int in 0u64..10_000_000, frac in 0u32..1000, scale in prop::option::of(0usize..3)) {
            let mut text = format!("{int}.{frac:03}");
            if let Some(s) = scale {
                text.push(' ');
                text.push_str(["thousand", "million", "billion"][s]);
            }
            let v = normalize_value(&text).unwrap();
            prop_assert_eq!(normalize_value(&v.to_string()).unwrap(), v);
        }
    }
}
