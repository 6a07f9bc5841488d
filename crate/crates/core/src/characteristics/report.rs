use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::{kahan_sum, mean_se};
use crate::error::{Error, Result};

/// Estimated characteristics of one realization, or replicate means with standard errors.
///
/// Keys follow the usual notation: `gamma{k}` (k-face intensities), `mu{k}`
/// (k-content densities), `L1`, `A2`, `P2`, `V3`, `S3`, `B3`, `L3`, adjacency
/// means `N{kl}`, vertex-type fractions `frac_{X,Y,T,other}` and the π-vertex
/// proportion `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Report {
    pub dim: usize,
    pub replicates: usize,
    pub values: BTreeMap<String, f64>,
    /// Standard errors over replicates; empty for a single realization.
    pub se: BTreeMap<String, f64>,
    /// Denominators of per-face averages (number or summed weight of the faces averaged).
    /// Replicates are pooled as ratio estimators for these keys.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<String, f64>,
}

impl Report {
    pub fn single(dim: usize) -> Self {
        Self { dim, replicates: 1, ..Default::default() }
    }

    pub fn set(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }

    /// Stores a per-face average together with its denominator.
    pub fn set_mean(&mut self, name: &str, v: f64, weight: f64) {
        self.values.insert(name.to_string(), v);
        self.weights.insert(name.to_string(), weight);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn se_of(&self, name: &str) -> Option<f64> {
        self.se.get(name).copied()
    }

    /// Replicate means and standard errors, keyed by the names present in any report.
    pub fn aggregate(reports: &[Report]) -> Result<Report> {
        let first = reports.first().ok_or_else(|| Error::InsufficientSample("no replicates to aggregate".into()))?;
        let mut names: Vec<&String> = reports.iter().flat_map(|r| r.values.keys()).collect();
        names.sort();
        names.dedup();
        let mut out = Report { dim: first.dim, replicates: reports.len(), ..Default::default() };
        for name in names {
            let pairs: Vec<(f64, f64)> = reports
                .iter()
                .filter_map(|r| r.values.get(name).map(|&v| (v, r.weights.get(name).copied())))
                .filter(|(v, _)| v.is_finite())
                .map(|(v, w)| (v, w.unwrap_or(f64::NAN)))
                .collect();
            if pairs.is_empty() {
                continue;
            }
            let weighted = pairs.iter().all(|p| p.1.is_finite() && p.1 >= 0.0) && pairs.iter().any(|p| p.1 > 0.0);
            let (m, se) = if weighted { ratio_mean_se(&pairs) } else { mean_se(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()) };
            out.values.insert(name.clone(), m);
            out.se.insert(name.clone(), if se.is_finite() { se } else { 0.0 });
            if weighted {
                out.weights.insert(name.clone(), kahan_sum(pairs.iter().map(|p| p.1)));
            }
        }
        Ok(out)
    }
}

/// Pooled ratio `sum(w x) / sum(w)` with its linearised standard error.
fn ratio_mean_se(pairs: &[(f64, f64)]) -> (f64, f64) {
    let n = pairs.len() as f64;
    let sw = kahan_sum(pairs.iter().map(|p| p.1));
    let m = kahan_sum(pairs.iter().map(|p| p.0 * p.1)) / sw;
    if pairs.len() < 2 {
        return (m, f64::NAN);
    }
    let ss = kahan_sum(pairs.iter().map(|p| (p.1 * (p.0 - m)).powi(2)));
    (m, (n / (n - 1.0) * ss).sqrt() / sw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_means() {
        let mut a = Report::single(2);
        a.set("gamma2", 1.0);
        let mut b = Report::single(2);
        b.set("gamma2", 3.0);
        b.set("phi", 0.5);
        let r = Report::aggregate(&[a, b]).unwrap();
        assert_eq!(r.get("gamma2"), Some(2.0));
        assert_eq!(r.se_of("gamma2"), Some(1.0));
        assert_eq!(r.get("phi"), Some(0.5));
        assert_eq!(r.replicates, 2);
        assert!(Report::aggregate(&[]).is_err());
    }

    #[test]
    fn weighted_keys_pool_as_ratios() {
        // two replicates: 1 cell of area 1, 3 cells of total area 1
        let mut a = Report::single(2);
        a.set_mean("A2", 1.0, 1.0);
        let mut b = Report::single(2);
        b.set_mean("A2", 1.0 / 3.0, 3.0);
        let r = Report::aggregate(&[a, b]).unwrap();
        assert_eq!(r.get("A2"), Some(0.5));
        assert_eq!(r.weights["A2"], 4.0);
        // linearised SE: sqrt(2 * ((1*0.5)^2 + (3*(-1/6))^2)) / 4
        assert!((r.se_of("A2").unwrap() - (2.0f64 * 0.5).sqrt() / 4.0).abs() < 1e-15);
    }
}
