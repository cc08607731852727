//! Locale-independent CSV number formatting.
//!
//! Every numeric CSV cell is written with 17 significant digits in
//! scientific notation, enough to round-trip any f64 bit pattern, so rerun
//! outputs can be compared byte for byte.

/// 17 significant digits, scientific notation, e.g. `1.2566370614359172e1`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Optional value: empty cell when absent.
pub fn sig17_opt(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_bit_patterns() {
        for &x in &[
            0.0,
            1.0,
            -1.5,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.626_070_15e-34,
            1.797e308,
            5e-324,
        ] {
            let s = sig17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn empty_cell_for_missing() {
        assert_eq!(sig17_opt(None), "");
        assert_eq!(sig17_opt(Some(1.0)), "1.0000000000000000e0");
    }
}
