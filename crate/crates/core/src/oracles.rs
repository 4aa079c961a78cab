//! Frozen reference values from closed forms, regenerated by
//! `scripts/oracles.py`.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};

const CATALOG: &str = include_str!("../data/oracles.csv");

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct OracleEntry {
    pub section_id: String,
    pub quantity: String,
    pub nu: Option<f64>,
    pub value: f64,
    /// Relative acceptance tolerance.
    pub tolerance: f64,
    pub derivation: String,
}

impl OracleEntry {
    pub fn relative_error(&self, computed: f64) -> f64 {
        (computed - self.value).abs() / self.value.abs()
    }

    pub fn accepts(&self, computed: f64) -> bool {
        self.relative_error(computed) <= self.tolerance
    }
}

pub fn parse_catalog(text: &str) -> Result<Vec<OracleEntry>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in reader.deserialize::<OracleEntry>().enumerate() {
        let entry = rec.map_err(|e| Error::Catalog { line: i + 2, reason: e.to_string() })?;
        if entry.derivation.trim().is_empty() {
            return Err(Error::Catalog { line: i + 2, reason: "missing derivation".into() });
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn catalog() -> &'static [OracleEntry] {
    static ENTRIES: OnceLock<Vec<OracleEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| parse_catalog(CATALOG).expect("embedded oracle catalog is well formed"))
}

pub fn oracle_lookup(section: &str, quantity: &str, nu: Option<f64>) -> Result<&'static OracleEntry> {
    let entries = catalog();
    entries
        .iter()
        .find(|e| {
            e.section_id == section
                && e.quantity == quantity
                && match (e.nu, nu) {
                    (None, None) => true,
                    (Some(a), Some(b)) => (a - b).abs() < 1e-12,
                    _ => false,
                }
        })
        .ok_or_else(|| Error::MissingOracle {
            section: section.into(),
            quantity: quantity.into(),
            nu,
            available: entries
                .iter()
                .map(|e| match e.nu {
                    Some(nu) => format!("{}/{}@{}", e.section_id, e.quantity, nu),
                    None => format!("{}/{}", e.section_id, e.quantity),
                })
                .collect::<Vec<_>>()
                .join(", "),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Independent routes: plain f64 series and midpoint polar quadrature.

    fn square_series() -> f64 {
        let mut s = 0.0;
        let mut n = 1.0f64;
        while n < 20_000.0 {
            s += (n * PI / 2.0).tanh() / n.powi(5);
            n += 2.0;
        }
        (1.0 - 192.0 / PI.powi(5) * s) / 3.0
    }

    fn circle_chi_s(nu: f64) -> f64 {
        let c = nu / (1.0 + nu);
        let alpha = (3.0 - c) / 8.0;
        let gamma = 1.0 - 2.0 * alpha;
        let beta = (3.0 * alpha - 1.0) / alpha;
        let inertia = PI / 4.0;
        let (nr, nt) = (400, 400);
        let (mut energy, mut force) = (0.0, 0.0);
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            for j in 0..nt {
                let t = 2.0 * PI * (j as f64 + 0.5) / nt as f64;
                let (x, y) = (r * t.cos(), r * t.sin());
                let w = r / nr as f64 * 2.0 * PI / nt as f64;
                let s31 = -gamma / inertia * x * y;
                let s32 = alpha / inertia * (1.0 - y * y - beta * x * x);
                energy += w * (s31 * s31 + s32 * s32);
                force += w * s32;
            }
        }
        PI * energy / (force * force)
    }

    #[test]
    fn catalog_matches_independent_routes() {
        assert!((oracle_lookup("square", "Jt", None).unwrap().value - square_series()).abs() < 1e-14);
        assert!((oracle_lookup("square", "Jt", None).unwrap().value - 0.140577).abs() < 1e-6);
        for nu in [0.0, 0.15, 0.3, 0.45] {
            let e = oracle_lookup("circle", "chi_s", Some(nu)).unwrap();
            assert!((e.value - circle_chi_s(nu)).abs() < 1e-5, "{nu}");
        }
        assert!((oracle_lookup("circle", "chi_s", Some(0.0)).unwrap().value - 7.0 / 6.0).abs() < 1e-15);
        let (a, b) = (2.0f64, 1.0f64);
        let jt = PI * a.powi(3) * b.powi(3) / (a * a + b * b);
        let jo = PI * a * b * (a * a + b * b) / 4.0;
        assert!((oracle_lookup("ellipse", "Jt", None).unwrap().value - jt).abs() < 1e-12);
        assert!((oracle_lookup("ellipse", "chi_t", None).unwrap().value - jo / jt).abs() < 1e-12);
        assert_eq!(oracle_lookup("circle", "chi_t", None).unwrap().value, 1.0);
        assert_eq!(oracle_lookup("rectangle_5", "chi_s", Some(0.0)).unwrap().value, 1.2);
    }

    #[test]
    fn every_entry_has_a_derivation() {
        assert!(catalog().len() >= 18);
        assert!(catalog().iter().all(|e| !e.derivation.is_empty() && e.tolerance > 0.0));
    }

    #[test]
    fn missing_entries_list_the_catalog() {
        match oracle_lookup("hexagon", "Jt", None) {
            Err(Error::MissingOracle { available, .. }) => assert!(available.contains("circle/Jt")),
            other => panic!("{other:?}"),
        }
        assert!(oracle_lookup("circle", "chi_s", Some(0.2)).is_err());
    }

    #[test]
    fn malformed_lines_are_located() {
        let text = "section_id,quantity,nu,value,tolerance,derivation\ncircle,Jt,,abc,0.1,x\n";
        assert!(matches!(parse_catalog(text), Err(Error::Catalog { line: 2, .. })));
    }
}
