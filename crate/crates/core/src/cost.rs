//! Exact rational cost arithmetic and its decimal rendering.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Objective value: conflicts plus weighted stitches, kept exact.
pub type Cost = Ratio<i64>;

/// Parse a decimal (`"0.1"`, `"2"`, `"1.25"`) or fraction (`"1/3"`) literal.
pub fn parse_decimal(text: &str) -> Option<Cost> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        return (d != 0).then(|| Ratio::new(n, d));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if frac_part.len() > 12 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let value = Ratio::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Render exactly: a terminating decimal when the denominator allows it,
/// otherwise `n/d`.
pub fn format_decimal(value: &Cost) -> String {
    let mut d = *value.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    let scale = 10i128.pow(places);
    let scaled = *value.numer() as i128 * (scale / *value.denom() as i128);
    let sign = if value.is_negative() { "-" } else { "" };
    let abs = scaled.abs();
    if places == 0 {
        return format!("{sign}{abs}");
    }
    let int = abs / scale;
    let frac = abs % scale;
    let frac = format!("{:0width$}", frac, width = places as usize);
    format!("{sign}{int}.{frac}")
}

/// Least common multiple of the denominators, for integer-scaled search.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Cost>) -> i64 {
    values.into_iter().fold(1i64, |acc, v| {
        if v.is_zero() {
            acc
        } else {
            num_integer_lcm(acc, *v.denom())
        }
    })
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }
    a / gcd(a, b) * b
}
