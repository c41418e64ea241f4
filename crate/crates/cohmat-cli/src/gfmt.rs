//! `%.12g`-style float formatting: 12 significant digits, fixed or
//! scientific by exponent, trailing zeros trimmed. Keeps CSV output
//! byte-identical across runs and platforms.

pub fn g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // round to 12 significant digits first; the category depends on the
    // rounded value (e.g. 0.99999999999999 prints as 1)
    let sci = format!("{:.*e}", 11, x);
    let (_, exp_str) = sci.split_once('e').expect("always has an exponent");
    let exp: i32 = exp_str.parse().expect("valid exponent");
    if exp < -4 || exp >= 12 {
        let (mant, _) = sci.split_once('e').unwrap();
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{}e{}{:02}", mant, if exp < 0 { "-" } else { "+" }, exp.abs())
    } else {
        let prec = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", prec, x);
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    }
}
