use std::fmt::Write as _;

use sha2::{Digest, Sha256};

/// Comment lines written ahead of every table.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the config bytes, `None` when no file was given.
    pub config_hash: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl RunManifest {
    fn header(&self) -> String {
        format!(
            "# tool: magnonet {}\n# command: {}\n# config_sha256: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.config_hash.as_deref().unwrap_or("none"),
        )
    }
}

/// Twelve significant digits, trailing zeros dropped.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-5..12).contains(&exp) {
        let (mantissa, e) = sci.split_at(sci.find('e').unwrap());
        return format!("{}{e}", mantissa.trim_end_matches('0').trim_end_matches('.'));
    }
    let s = format!("{:.*}", (11 - exp).max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Table {
    manifest: RunManifest,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(manifest: RunManifest, columns: &[&'static str]) -> Self {
        Self {
            manifest,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.manifest.header();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(num(0.16), "0.16");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(123456.7890123456), "123456.789012");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.5e-9), "1.5e-9");
        assert_eq!(num(1e-6), "1e-6");
        assert_eq!(num(7.3e-5), "0.000073");
    }

    #[test]
    fn hash_is_hex() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn render_layout() {
        let mut t = Table::new(
            RunManifest { command: "fig5".into(), config_hash: None },
            &["a", "b"],
        );
        t.push(vec![num(1.0), opt(None)]);
        let s = t.render();
        assert!(s.starts_with("# tool: magnonet "));
        assert!(s.ends_with("a,b\n1,\n"));
        assert!(!s.contains('\r'));
    }
}
