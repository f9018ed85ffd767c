use crate::real::{to_f64, Real};

/// Scientific notation with 17 significant digits, which round-trips every f64.
pub fn fmt_sig17<T: Real>(x: T) -> String {
    let v = to_f64(x);
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}
