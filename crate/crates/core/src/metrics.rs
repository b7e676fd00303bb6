//! Conventional correlation metrics between two discrete attributes.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::distribution::{empirical_joint, JointDistribution};
use crate::error::{CplError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Mutual information, nats.
    pub mi: f64,
    /// MI normalized by the joint entropy; 0 when the joint entropy is 0.
    pub nmi: f64,
    /// Pearson correlation of integer-coded symbols; `None` when either
    /// marginal is degenerate.
    pub pcc: Option<f64>,
    pub h_a: f64,
    pub h_b: f64,
    pub h_joint: f64,
}

/// Shannon entropy in nats over the positive entries.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

fn mutual_information(j: &JointDistribution, pa: &[f64], pb: &[f64]) -> f64 {
    let mut mi = 0.0;
    for (a, row) in j.matrix.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            if p > 0.0 {
                mi += p * (p / (pa[a] * pb[b])).ln();
            }
        }
    }
    mi.max(0.0)
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

fn pearson(
    j: &JointDistribution,
    pa: &[f64],
    pb: &[f64],
    codes_a: &[f64],
    codes_b: &[f64],
) -> Option<f64> {
    let mean = |p: &[f64], c: &[f64]| p.iter().zip(c).map(|(p, c)| p * c).sum::<f64>();
    let (ma, mb) = (mean(pa, codes_a), mean(pb, codes_b));
    let var = |p: &[f64], c: &[f64], m: f64| {
        p.iter()
            .zip(c)
            .map(|(p, c)| p * (c - m).powi(2))
            .sum::<f64>()
    };
    let (va, vb) = (var(pa, codes_a, ma), var(pb, codes_b, mb));
    if va <= 1e-15 || vb <= 1e-15 {
        return None;
    }
    let mut cov = 0.0;
    for (a, row) in j.matrix.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            cov += p * (codes_a[a] - ma) * (codes_b[b] - mb);
        }
    }
    Some((cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}

fn default_codes(n: usize) -> Vec<f64> {
    (1..=n).map(|c| c as f64).collect()
}

/// MI, NMI, PCC and entropies of a joint. Symbols are coded `1, 2, ..` in
/// alphabet order unless `codes` supplies (row codes, column codes).
pub fn metrics(j: &JointDistribution, codes: Option<(&[f64], &[f64])>) -> Result<MetricReport> {
    let (pa, pb) = (j.row_marginal(), j.col_marginal());
    let (codes_a, codes_b) = match codes {
        Some((a, b)) => {
            if a.len() != pa.len() || b.len() != pb.len() {
                return Err(CplError::DimensionMismatch(
                    "code vectors do not match the joint's shape".into(),
                ));
            }
            (a.to_vec(), b.to_vec())
        }
        None => (default_codes(pa.len()), default_codes(pb.len())),
    };
    let h_a = entropy(&pa);
    let h_b = entropy(&pb);
    let h_joint = entropy(&j.matrix.concat());
    let mi = mutual_information(j, &pa, &pb);
    Ok(MetricReport {
        mi,
        nmi: ratio_or_zero(mi, h_joint),
        pcc: pearson(j, &pa, &pb, &codes_a, &codes_b),
        h_a,
        h_b,
        h_joint,
    })
}

/// NMI under the common normalizations, for comparing against published
/// values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmiVariants {
    pub joint: f64,
    pub sqrt: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

pub fn nmi_variants(j: &JointDistribution) -> Result<NmiVariants> {
    let r = metrics(j, None)?;
    Ok(NmiVariants {
        joint: r.nmi,
        sqrt: ratio_or_zero(r.mi, (r.h_a * r.h_b).sqrt()),
        min: ratio_or_zero(r.mi, r.h_a.min(r.h_b)),
        max: ratio_or_zero(r.mi, r.h_a.max(r.h_b)),
        mean: ratio_or_zero(r.mi, (r.h_a + r.h_b) / 2.0),
    })
}

/// Metrics for every attribute pair `i < j` of a dataset.
pub fn pairwise_metrics(dataset: &Dataset) -> Result<Vec<PairMetrics>> {
    let n = dataset.n_attributes();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            out.push(PairMetrics {
                a,
                b,
                report: metrics(&empirical_joint(dataset, a, b)?, None)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    pub a: usize,
    pub b: usize,
    #[serde(flatten)]
    pub report: MetricReport,
}

/// Symmetric |PCC| grid with zeros on the diagonal and for degenerate pairs.
pub fn abs_pcc_matrix(dataset: &Dataset) -> Result<Vec<Vec<f64>>> {
    let n = dataset.n_attributes();
    let mut grid = vec![vec![0.0; n]; n];
    for pm in pairwise_metrics(dataset)? {
        let v = pm.report.pcc.map_or(0.0, f64::abs);
        grid[pm.a][pm.b] = v;
        grid[pm.b][pm.a] = v;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::saturating_joint;

    #[test]
    fn saturating_values() {
        let r = metrics(&saturating_joint(), None).unwrap();
        assert!((r.nmi - 0.164).abs() < 1e-3, "{}", r.nmi);
        assert!((r.pcc.unwrap() - 0.357).abs() < 1e-3);
        assert!(r.mi <= r.h_a.min(r.h_b) + 1e-9);
    }

    #[test]
    fn product_joint_is_uncorrelated() {
        let pa = [0.2, 0.8];
        let pb = [0.5, 0.3, 0.2];
        let m = pa
            .iter()
            .map(|a| pb.iter().map(|b| a * b).collect())
            .collect();
        let r = metrics(&JointDistribution::from_matrix(m).unwrap(), None).unwrap();
        assert!(r.mi.abs() < 1e-12 && r.nmi.abs() < 1e-12);
        assert!(r.pcc.unwrap().abs() < 1e-12);
    }

    #[test]
    fn diagonal_two_by_two() {
        let j = JointDistribution::from_matrix(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let r = metrics(&j, None).unwrap();
        // H(A, B) = ln 2 = MI for a perfect copy
        assert!((r.mi - 2f64.ln()).abs() < 1e-12);
        assert!((r.h_joint - 2f64.ln()).abs() < 1e-12);
        assert!((r.nmi - 1.0).abs() < 1e-12);
        assert!((r.pcc.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_marginal() {
        let j = JointDistribution::from_matrix(vec![vec![0.4, 0.6]]).unwrap();
        let r = metrics(&j, None).unwrap();
        assert_eq!(r.pcc, None);
        assert_eq!(r.nmi, 0.0);
        let point = JointDistribution::from_matrix(vec![vec![1.0]]).unwrap();
        assert_eq!(metrics(&point, None).unwrap().nmi, 0.0);
    }

    #[test]
    fn symmetric_under_transpose() {
        let j = saturating_joint();
        let (a, b) = (
            metrics(&j, None).unwrap(),
            metrics(&j.transpose(), None).unwrap(),
        );
        assert!((a.mi - b.mi).abs() < 1e-12);
        assert!((a.nmi - b.nmi).abs() < 1e-12);
        assert!((a.pcc.unwrap().abs() - b.pcc.unwrap().abs()).abs() < 1e-12);
    }

    #[test]
    fn pcc_affine_invariance() {
        let j = saturating_joint();
        let base = metrics(&j, None).unwrap().pcc.unwrap();
        let a: Vec<f64> = (1..=4).map(|c| 3.0 * c as f64 - 7.0).collect();
        let b: Vec<f64> = (1..=4).map(|c| -2.0 * c as f64 + 1.0).collect();
        let recoded = metrics(&j, Some((&a, &b))).unwrap().pcc.unwrap();
        assert!((recoded + base).abs() < 1e-12);
        assert!(metrics(&j, Some((&a[..3], &b))).is_err());
    }

    #[test]
    fn normalization_selection() {
        let v = nmi_variants(&saturating_joint()).unwrap();
        assert!((v.joint - 0.164).abs() < 1e-3);
        for other in [v.sqrt, v.min, v.max, v.mean] {
            assert!((other - 0.164).abs() > 0.05, "{v:?}");
        }
        assert!((v.sqrt - 0.286).abs() < 1e-3);
        assert!((v.min - 0.333).abs() < 1e-3);
        assert!((v.max - 0.246).abs() < 1e-3);
        assert!((v.mean - 0.283).abs() < 1e-3);
    }
}
