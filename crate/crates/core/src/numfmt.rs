//! `%g`-style float formatting with a fixed number of significant digits.
//!
//! Output never depends on locale: the decimal separator is always `.`.

/// Significant digits used for lossless output (datasets, model files).
pub const EXACT_DIGITS: usize = 17;
/// Significant digits used in analysis reports.
pub const REPORT_DIGITS: usize = 9;

/// Format like C's `%.{digits}g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

pub fn fmt_exact(x: f64) -> String {
    fmt_sig(x, EXACT_DIGITS)
}

pub fn fmt_report(x: f64) -> String {
    fmt_sig(x, REPORT_DIGITS)
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt_sig(0.15, 17), "0.14999999999999999");
        assert_eq!(fmt_sig(0.15, 9), "0.15");
        assert_eq!(fmt_sig(1.0, 17), "1");
        assert_eq!(fmt_sig(-2.5, 17), "-2.5");
        assert_eq!(fmt_sig(1e-7, 9), "1e-07");
        assert_eq!(fmt_sig(123456789012.0, 9), "1.23456789e+11");
        assert_eq!(fmt_sig(0.0001, 9), "0.0001");
        assert_eq!(fmt_sig(9.9999999999, 3), "10");
    }

    #[test]
    fn exact_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.02214076e23, -7.5e-12] {
            let s = fmt_exact(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }
}
