/// Rounds to 1e-12 and prints `-0` as `0`, so that outputs compare as text.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

pub fn list(xs: &[f64], sep: &str) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(-1e-15), "0");
        assert_eq!(num(4.000000000000001), "4");
        assert_eq!(num(-1.0 / 3.0), "-0.333333333333");
        assert_eq!(num(4.5), "4.5");
        assert_eq!(list(&[-2.0, 4.0], " "), "-2 4");
    }
}
