//! Float formatting for the CSV outputs: 17 significant digits in
//! scientific notation, which round-trips every f64 exactly and keeps
//! reruns byte-comparable.

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}
