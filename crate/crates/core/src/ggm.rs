//! Graphical Gaussian models and relevance networks.

use rayon::prelude::*;

use crate::citests::fisher_z_from_r;
use crate::data::Dataset;
use crate::error::{PgmError, Result};
use crate::graph::UGraph;
use crate::linalg::Matrix;

/// Shrunken correlation matrix `λ·I + (1−λ)·R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageEstimate {
    pub names: Vec<String>,
    pub correlation: Matrix,
    pub lambda: f64,
}

fn standardized_columns(d: &Dataset) -> Result<Vec<Vec<f64>>> {
    let n = d.n_rows();
    (0..d.n_vars())
        .map(|j| {
            let c = d.continuous(j)?;
            let mean = c.iter().sum::<f64>() / n as f64;
            let ss: f64 = c.iter().map(|x| (x - mean).powi(2)).sum();
            let sd = (ss / (n - 1) as f64).sqrt();
            if !(sd > 0.0) {
                return Err(PgmError::DegenerateVariance(d.var(j).name.clone()));
            }
            Ok(c.iter().map(|x| (x - mean) / sd).collect())
        })
        .collect()
}

fn check_shape(d: &Dataset) -> Result<()> {
    if d.n_rows() < 3 {
        return Err(PgmError::arg("shrinkage estimation needs at least 3 rows"));
    }
    if d.n_vars() < 2 {
        return Err(PgmError::arg(
            "shrinkage estimation needs at least 2 variables",
        ));
    }
    Ok(())
}

/// Sample correlations and the estimated variance of each, from the products
/// `w_kij = x_ki·x_kj` of standardised columns:
/// `r_ij = n/(n−1)·w̄_ij`, `var̂(r_ij) = n/(n−1)³·Σ_k (w_kij − w̄_ij)²`.
fn correlation_moments(z: &[Vec<f64>]) -> (Matrix, Matrix) {
    let p = z.len();
    let n = z[0].len() as f64;
    let rows: Vec<Vec<(f64, f64)>> = (0..p)
        .into_par_iter()
        .map(|i| {
            (0..i)
                .map(|j| {
                    let w: Vec<f64> = z[i].iter().zip(&z[j]).map(|(a, b)| a * b).collect();
                    let wbar = w.iter().sum::<f64>() / n;
                    let ss: f64 = w.iter().map(|v| (v - wbar).powi(2)).sum();
                    (
                        (n / (n - 1.0) * wbar).clamp(-1.0, 1.0),
                        n / (n - 1.0).powi(3) * ss,
                    )
                })
                .collect()
        })
        .collect();
    let mut r = Matrix::identity(p);
    let mut v = Matrix::zeros(p);
    for (i, row) in rows.iter().enumerate() {
        for (j, &(rij, vij)) in row.iter().enumerate() {
            r[(i, j)] = rij;
            r[(j, i)] = rij;
            v[(i, j)] = vij;
            v[(j, i)] = vij;
        }
    }
    (r, v)
}

fn shrink(r: &Matrix, lambda: f64) -> Matrix {
    let p = r.dim();
    let mut out = Matrix::identity(p);
    for i in 0..p {
        for j in 0..p {
            if i != j {
                out[(i, j)] = (1.0 - lambda) * r[(i, j)];
            }
        }
    }
    out
}

/// Shrinkage correlation toward the identity with the estimated intensity
/// `λ = clamp(Σ var̂(r_ij) / Σ r_ij², 0, 1)`; a zero denominator gives λ = 1.
pub fn shrink_correlation(d: &Dataset) -> Result<ShrinkageEstimate> {
    check_shape(d)?;
    let z = standardized_columns(d)?;
    let (r, v) = correlation_moments(&z);
    let p = r.dim();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..p {
        for j in 0..p {
            if i != j {
                num += v[(i, j)];
                den += r[(i, j)] * r[(i, j)];
            }
        }
    }
    let lambda = if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(ShrinkageEstimate {
        names: d.names(),
        correlation: shrink(&r, lambda),
        lambda,
    })
}

/// Shrinkage with a caller-chosen intensity.
pub fn shrink_correlation_with(d: &Dataset, lambda: f64) -> Result<ShrinkageEstimate> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(PgmError::arg("shrinkage intensity must lie in [0, 1]"));
    }
    check_shape(d)?;
    let z = standardized_columns(d)?;
    let (r, _) = correlation_moments(&z);
    Ok(ShrinkageEstimate {
        names: d.names(),
        correlation: shrink(&r, lambda),
        lambda,
    })
}

/// `pcor_ij = −Ω_ij / √(Ω_ii Ω_jj)` with `Ω = c⁻¹`; unit diagonal.
pub fn partial_correlations(c: &Matrix) -> Result<Matrix> {
    if !c.is_symmetric() {
        return Err(PgmError::arg(
            "partial correlations need a symmetric matrix",
        ));
    }
    let omega = c.spd_inverse()?;
    let p = c.dim();
    let mut out = Matrix::identity(p);
    for i in 0..p {
        for j in 0..i {
            let v = (-omega[(i, j)] / (omega[(i, i)] * omega[(j, j)]).sqrt()).clamp(-1.0, 1.0);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

fn check_labels(c: &Matrix, labels: &[String]) -> Result<()> {
    if labels.len() != c.dim() {
        return Err(PgmError::arg(format!(
            "{} labels given for a {}x{} matrix",
            labels.len(),
            c.dim(),
            c.dim()
        )));
    }
    Ok(())
}

/// Undirected graph with an edge wherever `|c_ij| ≥ threshold`.
pub fn relevance_network(c: &Matrix, threshold: f64, labels: &[String]) -> Result<UGraph> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(PgmError::arg("relevance threshold must lie in (0, 1)"));
    }
    check_labels(c, labels)?;
    let mut g = UGraph::empty(labels.iter().cloned())?;
    for i in 0..c.dim() {
        for j in 0..i {
            if c[(i, j)].abs() >= threshold {
                let (a, b) = (g.require(&labels[i])?, g.require(&labels[j])?);
                g.add_edge(a, b)?;
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    /// Keep pairs with `|pcor| ≥ level`.
    Threshold(f64),
    /// Benjamini–Hochberg at the given false discovery rate.
    Fdr(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTest {
    pub a: String,
    pub b: String,
    pub pcor: f64,
    pub p_value: f64,
    pub q_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GgmResult {
    pub labels: Vec<String>,
    pub pcor: Matrix,
    pub graph: UGraph,
    /// Per-pair tests, in (row, column) order of the lower triangle; only for FDR selection.
    pub tests: Option<Vec<EdgeTest>>,
}

/// Benjamini–Hochberg adjusted values: `q_(i) = min_{j ≥ i} p_(j)·m/j`, capped at 1.
pub fn bh_adjust(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut q = vec![0.0; m];
    let mut running = 1.0_f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        running = running.min(p[i] * m as f64 / (rank + 1) as f64);
        q[i] = running;
    }
    q
}

/// Selects GGM edges from a partial-correlation matrix estimated on `n` rows.
pub fn ggm_select(
    pcor: &Matrix,
    n: usize,
    method: Selection,
    labels: &[String],
) -> Result<GgmResult> {
    check_labels(pcor, labels)?;
    let p = pcor.dim();
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let mut graph = UGraph::empty(labels.iter().cloned())?;
    let gidx: Vec<usize> = labels
        .iter()
        .map(|l| graph.require(l))
        .collect::<Result<_>>()?;
    let mut tests = None;
    let keep: Vec<bool> = match method {
        Selection::Threshold(level) => {
            if !(level > 0.0 && level <= 1.0) {
                return Err(PgmError::arg("threshold level must lie in (0, 1]"));
            }
            pairs
                .iter()
                .map(|&(i, j)| pcor[(i, j)].abs() >= level)
                .collect()
        }
        Selection::Fdr(q) => {
            if !(q > 0.0 && q <= 1.0) {
                return Err(PgmError::arg("FDR level must lie in (0, 1]"));
            }
            let mut effective = n as f64 - p as f64 - 1.0;
            if effective < 1.0 {
                log::warn!(
                    "n = {n} is too small for Fisher's Z with {} conditioning variables; using scale 1",
                    p.saturating_sub(2)
                );
                effective = 1.0;
            }
            let pv: Vec<f64> = pairs
                .iter()
                .map(|&(i, j)| fisher_z_from_r(pcor[(i, j)], effective).p_value)
                .collect();
            let qv = bh_adjust(&pv);
            tests = Some(
                pairs
                    .iter()
                    .enumerate()
                    .map(|(k, &(i, j))| EdgeTest {
                        a: labels[i].clone(),
                        b: labels[j].clone(),
                        pcor: pcor[(i, j)],
                        p_value: pv[k],
                        q_value: qv[k],
                    })
                    .collect(),
            );
            qv.iter().map(|&v| v <= q).collect()
        }
    };
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if keep[k] {
            graph.add_edge(gidx[i], gidx[j])?;
        }
    }
    Ok(GgmResult {
        labels: labels.to_vec(),
        pcor: pcor.clone(),
        graph,
        tests,
    })
}
