//! Number formatting shared by every machine-readable output.

use num_complex::Complex64;

/// Rounds to 12 significant digits so that serialized output is stable.
pub fn sig12(x: f64) -> f64 {
    round_sig(x, 12)
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Human-readable float with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let r = round_sig(x, digits);
    if r == 0.0 {
        return "0".into();
    }
    let mag = r.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let s = format!("{r:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", digits - 1, r)
    }
}

pub fn fmt_complex(z: Complex64, digits: usize) -> String {
    if z.im == 0.0 {
        fmt_sig(z.re, digits)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", fmt_sig(z.re, digits), fmt_sig(z.im.abs(), digits))
    }
}

/// Serde adapter writing a rounded `f64`.
pub mod rounded {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(super::sig12(*x))
    }
}

/// Serde adapter writing a complex number as `{"re": .., "im": ..}`.
pub mod complex {
    use num_complex::Complex64;
    use serde::ser::SerializeStruct;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &super::sig12(z.re))?;
        st.serialize_field("im", &super::sig12(z.im))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig12(2.0), 2.0);
        assert_eq!(sig12(0.0), 0.0);
        assert!(sig12(f64::NAN).is_nan());
        assert_eq!(serde_json::to_string(&sig12(1.0 / 3.0)).unwrap(), "0.333333333333");
    }

    #[test]
    fn display_formats() {
        assert_eq!(fmt_sig(0.5, 6), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(fmt_sig(26.0, 6), "26");
        assert_eq!(fmt_sig(1.5e-9, 6), "1.50000e-9");
        assert_eq!(fmt_complex(Complex64::new(1.0, -2.0), 6), "1-2i");
    }
}
