//! Number formatting shared by answers, diagrams and generated code.

/// Formats `x` with at most `digits` significant digits, trailing zeros removed.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let mut s = format!("{:.*}", decimals, x);
    // rounding can carry into a new leading digit (9.9999995 -> 10.00000)
    if let Ok(v) = s.parse::<f64>() {
        let new_exp = v.abs().log10().floor() as i32;
        if new_exp > exp {
            let decimals = (digits as i32 - 1 - new_exp).max(0) as usize;
            s = format!("{:.*}", decimals, v);
        }
    }
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        s = trimmed.to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Shortest decimal text that round-trips to the same `f64`.
pub fn shortest(x: f64) -> String {
    let s = format!("{x}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}
