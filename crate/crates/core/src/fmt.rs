//! Locale-free number formatting for the text outputs.

/// Formats `x` with `digits` significant digits, `%g` style.
///
/// Fixed notation for decimal exponents in `[-5, digits)`, scientific
/// otherwise; trailing zeros are trimmed. Non-finite values print as
/// `nan`, `inf` or `-inf`.
pub fn significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Shorthand for the 12-significant-digit format used in every CSV.
pub fn sig12(x: f64) -> String {
    significant(x, 12)
}
