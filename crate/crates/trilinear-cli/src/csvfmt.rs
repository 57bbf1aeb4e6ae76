//! Deterministic CSV float formatting: 12 significant digits, scientific
//! notation, '.' decimal separator, locale-independent. Identical inputs
//! produce byte-identical files.

/// Format one value with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        // normalize -0.0
        return "0.00000000000e0".to_string();
    }
    format!("{x:.11e}")
}

/// Render a CSV table: header plus rows, all floats via [`sig12`].
pub fn render_table(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| sig12(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_stable() {
        assert_eq!(sig12(0.0), "0.00000000000e0");
        assert_eq!(sig12(-0.0), "0.00000000000e0");
        assert_eq!(sig12(1.0), "1.00000000000e0");
        assert_eq!(sig12(0.43884), "4.38840000000e-1");
        assert_eq!(sig12(-1234.5), "-1.23450000000e3");
    }

    #[test]
    fn roundtrip_precision() {
        for &x in &[1.4660765716752369, 2.4117e-5, -9.81, 1e-300] {
            let parsed: f64 = sig12(x).parse().unwrap();
            assert!(((parsed - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn table_layout() {
        let header = vec!["t_ms".to_string(), "p_down".to_string()];
        let rows = vec![vec![0.0, 1.0], vec![0.5, 0.25]];
        let text = render_table(&header, &rows);
        assert_eq!(
            text,
            "t_ms,p_down\n0.00000000000e0,1.00000000000e0\n5.00000000000e-1,2.50000000000e-1\n"
        );
    }
}
