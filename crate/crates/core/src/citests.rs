//! Conditional-independence tests: Pearson's χ², the G² likelihood-ratio
//! test and Fisher's Z, asymptotic or calibrated by permutation.

use rand::Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::data::{contingency_table, gauss_stats, ContingencyTable, Dataset, GaussStats};
use crate::error::{PgmError, Result};
use crate::linalg::Matrix;
use crate::params::least_squares;
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Chi2,
    G2,
    FisherZ,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::Chi2 => "chi2",
            TestKind::G2 => "g2",
            TestKind::FisherZ => "fisher-z",
        }
    }

    pub fn is_discrete(self) -> bool {
        !matches!(self, TestKind::FisherZ)
    }
}

impl std::str::FromStr for TestKind {
    type Err = PgmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chi2" | "x2" => Ok(TestKind::Chi2),
            "g2" | "mi" => Ok(TestKind::G2),
            "zf" | "fisher-z" => Ok(TestKind::FisherZ),
            other => Err(PgmError::arg(format!("unknown test '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    /// Absent for permutation tests.
    pub df: Option<usize>,
    pub p_value: f64,
    pub test_name: String,
    /// Set when the result hit a documented edge case (zero degrees of
    /// freedom, perfect partial correlation).
    pub note: Option<String>,
}

/// Upper tail of the χ² distribution with `df` degrees of freedom.
pub fn chi2_upper_tail(x: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(df as f64 / 2.0, x / 2.0).clamp(0.0, 1.0)
}

/// Two-sided standard-normal tail probability of `z`.
pub fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Statistic and degrees of freedom of a stratified two-way table.
fn discrete_statistic(ct: &ContingencyTable, kind: TestKind) -> (f64, usize) {
    let (r, c) = (ct.target_levels[0], ct.target_levels[1]);
    let mut stat = 0.0;
    let mut df = 0;
    let mut rows = vec![0u64; r];
    let mut cols = vec![0u64; c];
    for z in 0..ct.given_configs() {
        let s = ct.slice(z);
        let total: u64 = s.iter().sum();
        if total == 0 {
            continue;
        }
        df += (r - 1) * (c - 1);
        rows.iter_mut().for_each(|v| *v = 0);
        cols.iter_mut().for_each(|v| *v = 0);
        for i in 0..r {
            for j in 0..c {
                rows[i] += s[i * c + j];
                cols[j] += s[i * c + j];
            }
        }
        for i in 0..r {
            for j in 0..c {
                let e = rows[i] as f64 * cols[j] as f64 / total as f64;
                if e <= 0.0 {
                    continue;
                }
                let o = s[i * c + j] as f64;
                stat += match kind {
                    TestKind::Chi2 => (o - e) * (o - e) / e,
                    _ if o > 0.0 => 2.0 * o * (o / e).ln(),
                    _ => 0.0,
                };
            }
        }
    }
    (stat.max(0.0), df)
}

/// χ² or G² test of `X ⊥ Y | Z` on a table whose targets are `[X, Y]`.
///
/// Conditioning slices with no observations are dropped, so they add
/// neither statistic nor degrees of freedom.
pub fn test_discrete(ct: &ContingencyTable, kind: TestKind) -> Result<TestResult> {
    if ct.targets.len() != 2 {
        return Err(PgmError::arg(
            "a discrete test needs exactly two target variables",
        ));
    }
    if !kind.is_discrete() {
        return Err(PgmError::arg("Fisher's Z is not a contingency-table test"));
    }
    let (statistic, df) = discrete_statistic(ct, kind);
    let mut note = None;
    let p_value = if df == 0 {
        note = Some("zero degrees of freedom; p set to 1".to_owned());
        log::warn!("{} test with zero degrees of freedom", kind.name());
        1.0
    } else {
        chi2_upper_tail(statistic, df)
    };
    Ok(TestResult {
        statistic,
        df: Some(df),
        p_value,
        test_name: kind.name().to_owned(),
        note,
    })
}

/// Partial correlation of the first two indices given the rest, read off the
/// inverse of the corresponding correlation submatrix.
pub fn partial_correlation(corr: &Matrix, x: usize, y: usize, z: &[usize]) -> Result<f64> {
    if z.is_empty() {
        return Ok(corr[(x, y)]);
    }
    let mut idx = vec![x, y];
    idx.extend_from_slice(z);
    let omega = corr.principal(&idx).spd_inverse()?;
    Ok((-omega[(0, 1)] / (omega[(0, 0)] * omega[(1, 1)]).sqrt()).clamp(-1.0, 1.0))
}

/// Fisher's Z test of zero partial correlation, `z = √(n−|Z|−3)·atanh(r)`.
pub fn test_fisher_z(s: &GaussStats, x: usize, y: usize, z: &[usize]) -> Result<TestResult> {
    if x == y || z.contains(&x) || z.contains(&y) {
        return Err(PgmError::arg("test variables must be distinct"));
    }
    let m = s.n as i64 - z.len() as i64 - 3;
    if m < 1 {
        return Err(PgmError::arg(format!(
            "Fisher's Z needs n - |Z| - 3 >= 1 (n = {}, |Z| = {})",
            s.n,
            z.len()
        )));
    }
    let r = partial_correlation(&s.correlation, x, y, z)?;
    Ok(fisher_z_from_r(r, m as f64))
}

pub(crate) fn fisher_z_from_r(r: f64, effective: f64) -> TestResult {
    let scale = effective.sqrt();
    if r.abs() >= 1.0 {
        let capped = r.signum() * (1.0 - f64::EPSILON);
        return TestResult {
            statistic: scale * capped.atanh(),
            df: None,
            p_value: 0.0,
            test_name: TestKind::FisherZ.name().to_owned(),
            note: Some("perfect partial correlation; p set to 0".to_owned()),
        };
    }
    let statistic = scale * r.atanh();
    TestResult {
        statistic,
        df: None,
        p_value: normal_two_sided(statistic),
        test_name: TestKind::FisherZ.name().to_owned(),
        note: None,
    }
}

/// Runs `kind` on the named columns of `d`.
pub fn test_dataset(
    d: &Dataset,
    x: usize,
    y: usize,
    z: &[usize],
    kind: TestKind,
) -> Result<TestResult> {
    if kind.is_discrete() {
        test_discrete(&contingency_table(d, &[x, y], z)?, kind)
    } else {
        let mut cols = vec![x, y];
        cols.extend_from_slice(z);
        let names: Vec<String> = cols.iter().map(|&c| d.var(c).name.clone()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let sub = d.select_columns(&refs)?;
        let zi: Vec<usize> = (2..cols.len()).collect();
        test_fisher_z(&gauss_stats(&sub)?, 0, 1, &zi)
    }
}

/// Permutation-calibrated test with `replicates` shuffles.
///
/// Discrete data: `x` is shuffled within each configuration of `z`.
/// Continuous data: `x` and `y` are regressed on `z` and the residuals of `x`
/// are shuffled; the statistic is Fisher's Z of the residual correlation and
/// is compared in absolute value. `p = (1 + #{permuted ≥ observed}) / (B + 1)`.
pub fn permutation_p(
    d: &Dataset,
    x: usize,
    y: usize,
    z: &[usize],
    kind: TestKind,
    replicates: usize,
    seed: u64,
) -> Result<TestResult> {
    if replicates < 100 {
        return Err(PgmError::arg(
            "permutation tests need at least 100 replicates",
        ));
    }
    if x == y || z.contains(&x) || z.contains(&y) {
        return Err(PgmError::arg("test variables must be distinct"));
    }
    let (observed, permuted): (f64, Vec<f64>) = if kind.is_discrete() {
        let ct = contingency_table(d, &[x, y], z)?;
        let observed = discrete_statistic(&ct, kind).0;
        let xs = d.discrete(x)?;
        let ys = d.discrete(y)?;
        let (rx, ry) = (d.cardinality(x), d.cardinality(y));
        let configs: Vec<usize> = (0..d.n_rows()).map(|r| d.config_at(r, z)).collect();
        let mut strata: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (r, &c) in configs.iter().enumerate() {
            strata.entry(c).or_default().push(r);
        }
        let permuted = (0..replicates)
            .into_par_iter()
            .map(|b| {
                let mut rng = substream(seed, b as u64);
                let mut shuffled = xs.to_vec();
                for rows in strata.values() {
                    for i in (1..rows.len()).rev() {
                        let j = rng.gen_range(0..=i);
                        shuffled.swap(rows[i], rows[j]);
                    }
                }
                let mut t = ct.clone();
                t.counts.iter_mut().for_each(|c| *c = 0);
                for r in 0..d.n_rows() {
                    t.counts[(configs[r] * rx + shuffled[r] as usize) * ry + ys[r] as usize] += 1;
                }
                discrete_statistic(&t, kind).0
            })
            .collect();
        (observed, permuted)
    } else {
        let xs = d.continuous(x)?;
        let ys = d.continuous(y)?;
        let zs: Vec<&[f64]> = z.iter().map(|&c| d.continuous(c)).collect::<Result<_>>()?;
        let m = d.n_rows() as f64 - z.len() as f64 - 3.0;
        if m < 1.0 {
            return Err(PgmError::arg("too few rows for the conditioning set"));
        }
        let rx = residuals(xs, &zs)?;
        let ry = residuals(ys, &zs)?;
        let stat = |a: &[f64]| -> f64 {
            let r = correlation(a, &ry);
            fisher_z_from_r(r, m).statistic.abs()
        };
        let observed = stat(&rx);
        let permuted = (0..replicates)
            .into_par_iter()
            .map(|b| {
                let mut rng = substream(seed, b as u64);
                let mut v = rx.clone();
                for i in (1..v.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    v.swap(i, j);
                }
                stat(&v)
            })
            .collect();
        (observed, permuted)
    };
    let tol = 1e-12 * observed.abs().max(1.0);
    let exceed = permuted.iter().filter(|&&s| s >= observed - tol).count();
    Ok(TestResult {
        statistic: observed,
        df: None,
        p_value: (1 + exceed) as f64 / (replicates + 1) as f64,
        test_name: format!("{}-permutation", kind.name()),
        note: None,
    })
}

fn residuals(y: &[f64], zs: &[&[f64]]) -> Result<Vec<f64>> {
    let fit = least_squares(y, zs).map_err(|_| {
        PgmError::Collinearity("conditioning variables are linearly dependent".into())
    })?;
    Ok(y.iter()
        .enumerate()
        .map(|(r, v)| {
            v - fit.intercept
                - fit
                    .coefficients
                    .iter()
                    .zip(zs)
                    .map(|(b, z)| b * z[r])
                    .sum::<f64>()
        })
        .collect())
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}
