//! Small shared helpers.

/// Formats a number the way the emitters and serializers want it:
/// integral values print with no decimal point, everything else uses the
/// shortest `Display` form that round-trips.
pub fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}
