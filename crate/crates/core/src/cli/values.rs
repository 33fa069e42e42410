//! Parsing of numeric flag values: `a,b,c`, `start:step:stop` and fractions.

fn parse_scalar(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
            let d: f64 = den.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            n / d
        }
        None => s.parse().map_err(|_| format!("bad number '{s}'"))?,
    };
    if !value.is_finite() {
        return Err(format!("non-finite value '{s}'"));
    }
    Ok(value)
}

fn parse_range(start: &str, step: &str, stop: &str) -> Result<Vec<f64>, String> {
    let a = parse_scalar(start)?;
    let h = parse_scalar(step)?;
    let b = parse_scalar(stop)?;
    if h == 0.0 || (b - a) * h < 0.0 {
        return Err(format!("range {start}:{step}:{stop} does not advance"));
    }
    let count = ((b - a) / h + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("range {start}:{step}:{stop} is too long"));
    }
    Ok((0..count).map(|i| a + i as f64 * h).collect())
}

/// Parses a comma-separated list whose items are numbers, fractions `p/q`
/// or ranges `start:step:stop` (stop inclusive).
pub fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(format!("empty item in '{s}'"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [one] => out.push(parse_scalar(one)?),
            [a, h, b] => out.extend(parse_range(a, h, b)?),
            _ => return Err(format!("cannot parse '{item}'; use start:step:stop")),
        }
    }
    Ok(out)
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_ranges_and_fractions() {
        assert_eq!(parse_values("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_values("4/3").unwrap(), vec![4.0 / 3.0]);
        assert_eq!(parse_values("40:5:50").unwrap(), vec![40.0, 45.0, 50.0]);
        let r = parse_values("0:0.1:0.3").unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(parse_values("0, 1:1:2").unwrap(), vec![0.0, 1.0, 2.0]);
        assert_eq!(parse_values("3:-1:1").unwrap(), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "a", "1/0", "1:0:2", "1:1", "2:1:1", "1,,2", "inf"] {
            assert!(parse_values(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, 4.0 / 3.0, 64);
        assert_eq!(v.len(), 64);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[63], 4.0 / 3.0);
    }
}
