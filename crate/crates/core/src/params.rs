//! Local-distribution estimation and evaluation of the global distribution
//! through its parent and clique factorisations.

use std::collections::HashMap;

use crate::data::{Dataset, VariableKind, VariableMeta};
use crate::error::{PgmError, Result};
use crate::factor::{increment, Factor};
use crate::graph::{Dag, UGraph};
use crate::linalg::{cholesky_solve, Matrix};

/// Conditional probability table. Row `k` holds the distribution of the
/// node for the `k`-th parent configuration (first parent slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub node: String,
    pub parents: Vec<String>,
    pub parent_levels: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
    /// Rows that had no observations and were filled in as uniform.
    pub unseen_rows: Vec<usize>,
}

impl Cpt {
    pub fn levels(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn row_index(&self, parent_values: &[usize]) -> usize {
        parent_values
            .iter()
            .zip(&self.parent_levels)
            .fold(0, |acc, (&v, &c)| acc * c + v)
    }

    pub fn prob(&self, value: usize, parent_values: &[usize]) -> f64 {
        self.rows[self.row_index(parent_values)][value]
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let expect: usize = self.parent_levels.iter().product();
        if self.rows.len() != expect {
            return Err(PgmError::arg(format!(
                "table for '{}' has {} rows, expected {expect}",
                self.node,
                self.rows.len()
            )));
        }
        for row in &self.rows {
            if row.len() != self.levels() || row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(PgmError::arg(format!(
                    "table for '{}' has an invalid row",
                    self.node
                )));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(PgmError::arg(format!(
                    "a row of '{}' does not sum to one",
                    self.node
                )));
            }
        }
        Ok(())
    }
}

/// Linear-Gaussian local distribution: `node ~ N(intercept + Σ coef·parent, σ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLocal {
    pub node: String,
    pub parents: Vec<String>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub residual_variance: f64,
}

impl GaussianLocal {
    pub fn mean(&self, parent_values: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(parent_values)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }

    pub fn log_density(&self, x: f64, parent_values: &[f64]) -> f64 {
        let r = x - self.mean(parent_values);
        -0.5 * ((2.0 * std::f64::consts::PI * self.residual_variance).ln()
            + r * r / self.residual_variance)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalDistribution {
    Cpt(Cpt),
    Gaussian(GaussianLocal),
}

impl LocalDistribution {
    pub fn node(&self) -> &str {
        match self {
            LocalDistribution::Cpt(c) => &c.node,
            LocalDistribution::Gaussian(g) => &g.node,
        }
    }

    pub fn parents(&self) -> &[String] {
        match self {
            LocalDistribution::Cpt(c) => &c.parents,
            LocalDistribution::Gaussian(g) => &g.parents,
        }
    }
}

/// A DAG with one local distribution per node, all of the same family.
/// Variables and locals are stored in the DAG's node order.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    dag: Dag,
    variables: Vec<VariableMeta>,
    locals: Vec<LocalDistribution>,
}

impl BayesianNetwork {
    /// Assembles a network, checking that each local matches the DAG.
    /// `variables` and `locals` may be given in any order.
    pub fn new(
        dag: Dag,
        variables: Vec<VariableMeta>,
        locals: Vec<LocalDistribution>,
    ) -> Result<Self> {
        let n = dag.n();
        if variables.len() != n || locals.len() != n {
            return Err(PgmError::arg(
                "one variable and one local distribution per node",
            ));
        }
        let mut vars: Vec<Option<VariableMeta>> = vec![None; n];
        for v in variables {
            let i = dag.require(&v.name)?;
            if vars[i].replace(v).is_some() {
                return Err(PgmError::arg("duplicate variable"));
            }
        }
        let vars: Vec<VariableMeta> = vars.into_iter().map(Option::unwrap).collect();
        let mut ordered: Vec<Option<LocalDistribution>> = vec![None; n];
        for l in locals {
            let i = dag.require(l.node())?;
            let expect: Vec<&str> = dag.parents(i).iter().map(|&p| dag.name(p)).collect();
            let got: Vec<&str> = l.parents().iter().map(String::as_str).collect();
            if expect != got {
                return Err(PgmError::arg(format!(
                    "parents of '{}' in its local distribution do not match the graph",
                    l.node()
                )));
            }
            match (&l, &vars[i].kind) {
                (LocalDistribution::Cpt(c), VariableKind::Discrete { levels }) => {
                    c.validate()?;
                    if c.levels() != levels.len() {
                        return Err(PgmError::arg(format!(
                            "table width of '{}' is wrong",
                            c.node
                        )));
                    }
                    let pl: Vec<usize> = dag
                        .parents(i)
                        .iter()
                        .map(|&p| vars[p].levels().map_or(0, <[String]>::len))
                        .collect();
                    if pl != c.parent_levels {
                        return Err(PgmError::arg(format!(
                            "parent levels of '{}' do not match",
                            c.node
                        )));
                    }
                }
                (LocalDistribution::Gaussian(g), VariableKind::Continuous) => {
                    if !(g.residual_variance > 0.0) || g.coefficients.len() != g.parents.len() {
                        return Err(PgmError::arg(format!(
                            "invalid Gaussian local for '{}'",
                            g.node
                        )));
                    }
                }
                _ => {
                    return Err(PgmError::arg(format!(
                        "local distribution of '{}' does not match its variable kind",
                        l.node()
                    )))
                }
            }
            if ordered[i].replace(l).is_some() {
                return Err(PgmError::arg("duplicate local distribution"));
            }
        }
        let locals: Vec<LocalDistribution> = ordered.into_iter().map(Option::unwrap).collect();
        let discrete = locals
            .iter()
            .filter(|l| matches!(l, LocalDistribution::Cpt(_)))
            .count();
        if discrete != 0 && discrete != n {
            return Err(PgmError::arg(
                "mixed discrete and Gaussian locals are not supported",
            ));
        }
        Ok(BayesianNetwork {
            dag,
            variables: vars,
            locals,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn variables(&self) -> &[VariableMeta] {
        &self.variables
    }

    pub fn locals(&self) -> &[LocalDistribution] {
        &self.locals
    }

    pub fn local(&self, i: usize) -> &LocalDistribution {
        &self.locals[i]
    }

    pub(crate) fn replace_local(&mut self, i: usize, l: LocalDistribution) {
        self.locals[i] = l;
    }

    pub fn is_discrete(&self) -> bool {
        self.locals
            .iter()
            .all(|l| matches!(l, LocalDistribution::Cpt(_)))
    }

    pub fn cpt(&self, i: usize) -> Result<&Cpt> {
        match &self.locals[i] {
            LocalDistribution::Cpt(c) => Ok(c),
            LocalDistribution::Gaussian(_) => {
                Err(PgmError::arg("operation requires a discrete network"))
            }
        }
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.variables[i].levels().map_or(0, <[String]>::len)
    }

    /// Factor `P(node | parents)` for a discrete node.
    pub(crate) fn cpt_factor(&self, i: usize) -> Result<Factor> {
        let cpt = self.cpt(i)?;
        let mut vars: Vec<usize> = self.dag.parents(i).iter().copied().collect();
        vars.push(i);
        let mut cards = cpt.parent_levels.clone();
        cards.push(cpt.levels());
        let values = cpt.rows.iter().flatten().copied().collect();
        Ok(Factor::new(vars, cards, values))
    }

    /// Resolves `name=level` pairs to a full assignment vector.
    pub fn assignment(&self, pairs: &[(&str, &str)]) -> Result<Vec<usize>> {
        let mut out = vec![usize::MAX; self.dag.n()];
        for (name, level) in pairs {
            let i = self.dag.require(name)?;
            out[i] = self.variables[i]
                .level_index(level)
                .ok_or_else(|| PgmError::arg(format!("'{level}' is not a level of '{name}'")))?;
        }
        if let Some(i) = out.iter().position(|&v| v == usize::MAX) {
            return Err(PgmError::arg(format!(
                "assignment does not cover '{}'",
                self.dag.name(i)
            )));
        }
        Ok(out)
    }

    /// Product of the local conditional probabilities, taken in topological order.
    pub fn joint_probability(&self, assignment: &[usize]) -> Result<f64> {
        if assignment.len() != self.dag.n() {
            return Err(PgmError::arg("assignment must cover every node"));
        }
        let mut p = 1.0;
        for i in self.dag.topological_order() {
            let cpt = self.cpt(i)?;
            if assignment[i] >= cpt.levels() {
                return Err(PgmError::arg(format!("invalid level for '{}'", cpt.node)));
            }
            let pv: Vec<usize> = self.dag.parents(i).iter().map(|&q| assignment[q]).collect();
            p *= cpt.prob(assignment[i], &pv);
        }
        Ok(p)
    }

    /// Maps each network node to the matching dataset column, checking kinds
    /// and level sets.
    pub(crate) fn column_map(&self, d: &Dataset) -> Result<Vec<usize>> {
        (0..self.dag.n())
            .map(|i| {
                let j = d.require(self.dag.name(i))?;
                if d.var(j).kind != self.variables[i].kind {
                    return Err(PgmError::arg(format!(
                        "variable '{}' in the data does not match the network",
                        self.dag.name(i)
                    )));
                }
                Ok(j)
            })
            .collect()
    }

    pub fn log_likelihood(&self, d: &Dataset) -> Result<LogLikelihood> {
        let cols = self.column_map(d)?;
        let topo = self.dag.topological_order();
        let mut total = 0.0;
        if self.is_discrete() {
            let data: Vec<&[u32]> = cols.iter().map(|&j| d.discrete(j)).collect::<Result<_>>()?;
            for r in 0..d.n_rows() {
                for &i in &topo {
                    let cpt = self.cpt(i)?;
                    let pv: Vec<usize> = self
                        .dag
                        .parents(i)
                        .iter()
                        .map(|&q| data[q][r] as usize)
                        .collect();
                    let p = cpt.prob(data[i][r] as usize, &pv);
                    if p <= 0.0 {
                        return Ok(LogLikelihood::ZeroProbability { row: r });
                    }
                    total += p.ln();
                }
            }
        } else {
            let data: Vec<&[f64]> = cols
                .iter()
                .map(|&j| d.continuous(j))
                .collect::<Result<_>>()?;
            for r in 0..d.n_rows() {
                for &i in &topo {
                    let LocalDistribution::Gaussian(g) = &self.locals[i] else {
                        unreachable!("homogeneous network");
                    };
                    let pv: Vec<f64> = self.dag.parents(i).iter().map(|&q| data[q][r]).collect();
                    total += g.log_density(data[i][r], &pv);
                }
            }
        }
        Ok(LogLikelihood::Finite(total))
    }
}

/// Natural-log likelihood of a dataset. A row with probability zero makes
/// the likelihood `-∞`; that case is reported instead of a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogLikelihood {
    Finite(f64),
    ZeroProbability { row: usize },
}

impl LogLikelihood {
    pub fn value(self) -> f64 {
        match self {
            LogLikelihood::Finite(v) => v,
            LogLikelihood::ZeroProbability { .. } => f64::NEG_INFINITY,
        }
    }
}

/// Estimates `P(node | parents)` from counts.
///
/// With `iss = 0` this is the relative frequency; a parent configuration
/// that never occurs gets a uniform row and is listed in `unseen_rows`.
/// With `iss > 0` each cell receives `iss / (q·r)` pseudo-counts, where `q`
/// is the number of parent configurations and `r` the node's level count.
pub fn fit_cpt(d: &Dataset, node: usize, parents: &[usize], iss: f64) -> Result<Cpt> {
    if !(iss >= 0.0) || !iss.is_finite() {
        return Err(PgmError::arg("imaginary sample size must be nonnegative"));
    }
    let node_cells = d.discrete(node)?;
    d.require_discrete(parents)?;
    let r = d.cardinality(node);
    let parent_levels: Vec<usize> = parents.iter().map(|&p| d.cardinality(p)).collect();
    let q: usize = parent_levels.iter().product();
    let mut counts = vec![vec![0u64; r]; q];
    for row in 0..d.n_rows() {
        counts[d.config_at(row, parents)][node_cells[row] as usize] += 1;
    }
    let alpha = iss / (q * r) as f64;
    let mut unseen_rows = Vec::new();
    let rows = counts
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let total: u64 = c.iter().sum();
            if total == 0 && iss == 0.0 {
                unseen_rows.push(k);
                return vec![1.0 / r as f64; r];
            }
            let denom = total as f64 + alpha * r as f64;
            c.iter().map(|&x| (x as f64 + alpha) / denom).collect()
        })
        .collect();
    Ok(Cpt {
        node: d.var(node).name.clone(),
        parents: parents.iter().map(|&p| d.var(p).name.clone()).collect(),
        parent_levels,
        rows,
        unseen_rows,
    })
}

/// Least-squares regression of `node` on `parents`; residual variance uses
/// `n - parents - 1` degrees of freedom.
pub fn fit_gaussian_local(d: &Dataset, node: usize, parents: &[usize]) -> Result<GaussianLocal> {
    let y = d.continuous(node)?;
    let xs: Vec<&[f64]> = parents
        .iter()
        .map(|&p| d.continuous(p))
        .collect::<Result<_>>()?;
    let n = d.n_rows();
    let k = parents.len();
    if n <= k + 1 {
        return Err(PgmError::arg(format!(
            "regressing '{}' on {k} parents needs more than {} rows",
            d.var(node).name,
            k + 1
        )));
    }
    let fit = least_squares(y, &xs).map_err(|_| {
        PgmError::Collinearity(format!(
            "parents of '{}' are linearly dependent",
            d.var(node).name
        ))
    })?;
    let residual_variance = fit.rss / (n - k - 1) as f64;
    if !(residual_variance > f64::EPSILON * fit.tss / (n - 1) as f64) {
        return Err(PgmError::DegenerateVariance(d.var(node).name.clone()));
    }
    Ok(GaussianLocal {
        node: d.var(node).name.clone(),
        parents: parents.iter().map(|&p| d.var(p).name.clone()).collect(),
        intercept: fit.intercept,
        coefficients: fit.coefficients,
        residual_variance,
    })
}

pub(crate) struct LeastSquares {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub tss: f64,
}

/// Ordinary least squares with intercept, solved on centred data through
/// the normal equations.
pub(crate) fn least_squares(y: &[f64], xs: &[&[f64]]) -> Result<LeastSquares> {
    let n = y.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    let xbar: Vec<f64> = xs.iter().map(|x| x.iter().sum::<f64>() / n).collect();
    let k = xs.len();
    let mut xtx = Matrix::zeros(k);
    let mut xty = vec![0.0; k];
    for a in 0..k {
        for b in 0..=a {
            let s: f64 = xs[a]
                .iter()
                .zip(xs[b])
                .map(|(u, v)| (u - xbar[a]) * (v - xbar[b]))
                .sum();
            xtx[(a, b)] = s;
            xtx[(b, a)] = s;
        }
        xty[a] = xs[a]
            .iter()
            .zip(y)
            .map(|(u, v)| (u - xbar[a]) * (v - ybar))
            .sum();
    }
    let coefficients = if k == 0 {
        Vec::new()
    } else {
        // Reject near-singular designs relative to the diagonal scale.
        let l = xtx.cholesky()?;
        let scale = (0..k).map(|a| xtx[(a, a)]).fold(0.0, f64::max);
        if (0..k).any(|a| l[(a, a)] * l[(a, a)] <= 1e-10 * scale) {
            return Err(PgmError::Numerical("near-singular design".into()));
        }
        cholesky_solve(&l, &xty)
    };
    let intercept = ybar
        - coefficients
            .iter()
            .zip(&xbar)
            .map(|(b, m)| b * m)
            .sum::<f64>();
    let mut rss = 0.0;
    let mut tss = 0.0;
    for (r, &yr) in y.iter().enumerate() {
        let fitted = intercept
            + coefficients
                .iter()
                .zip(xs)
                .map(|(b, x)| b * x[r])
                .sum::<f64>();
        rss += (yr - fitted).powi(2);
        tss += (yr - ybar).powi(2);
    }
    Ok(LeastSquares {
        intercept,
        coefficients,
        rss,
        tss,
    })
}

/// Fits every local distribution of `dag` from `d`, matching variables by name.
pub fn fit_network(d: &Dataset, dag: &Dag, iss: f64) -> Result<BayesianNetwork> {
    let cols: Vec<usize> = dag
        .names()
        .iter()
        .map(|n| d.require(n))
        .collect::<Result<_>>()?;
    let discrete = d.var(cols.first().copied().unwrap_or(0)).is_discrete();
    if cols.iter().any(|&j| d.var(j).is_discrete() != discrete) {
        return Err(PgmError::arg(
            "network fitting needs all-discrete or all-continuous variables",
        ));
    }
    let mut locals = Vec::with_capacity(dag.n());
    for i in 0..dag.n() {
        let parents: Vec<usize> = dag.parents(i).iter().map(|&p| cols[p]).collect();
        locals.push(if discrete {
            LocalDistribution::Cpt(fit_cpt(d, cols[i], &parents, iss)?)
        } else {
            LocalDistribution::Gaussian(fit_gaussian_local(d, cols[i], &parents)?)
        });
    }
    let vars = cols.iter().map(|&j| d.var(j).clone()).collect();
    BayesianNetwork::new(dag.clone(), vars, locals)
}

/// Marginal tables for the cliques of a decomposable graph and for the
/// separators between them, in running-intersection order.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueFactorization {
    pub graph: UGraph,
    pub cliques: Vec<Factor>,
    /// `separators[i]` is the overlap of clique `i` with all earlier cliques;
    /// the first one is empty.
    pub separators: Vec<Factor>,
}

impl CliqueFactorization {
    /// `∏ P(Cᵢ) / ∏ P(Sᵢ)` at a full assignment (indexed by graph node).
    pub fn joint(&self, assignment: &[usize]) -> f64 {
        let mut p = 1.0;
        for (c, s) in self.cliques.iter().zip(&self.separators) {
            let num = c.value_at(assignment);
            if num == 0.0 {
                return 0.0;
            }
            p *= num / s.value_at(assignment);
        }
        p
    }
}

pub fn clique_factorization(d: &Dataset, g: &UGraph) -> Result<CliqueFactorization> {
    if !g.is_chordal() {
        return Err(PgmError::NotDecomposable(
            "clique potentials of a non-chordal graph have no probabilistic reading".into(),
        ));
    }
    let cols: Vec<usize> = g
        .names()
        .iter()
        .map(|n| d.require(n))
        .collect::<Result<_>>()?;
    d.require_discrete(&cols)?;
    let cliques = g.cliques_idx();
    let mut seen: Vec<usize> = Vec::new();
    let mut clique_tables = Vec::new();
    let mut sep_tables = Vec::new();
    for c in &cliques {
        let sep: Vec<usize> = c.iter().copied().filter(|v| seen.contains(v)).collect();
        clique_tables.push(empirical_table(d, &cols, c));
        sep_tables.push(empirical_table(d, &cols, &sep));
        seen.extend(c.iter().copied());
    }
    Ok(CliqueFactorization {
        graph: g.clone(),
        cliques: clique_tables,
        separators: sep_tables,
    })
}

/// Relative-frequency table over graph nodes `vars` (ascending).
fn empirical_table(d: &Dataset, cols: &[usize], vars: &[usize]) -> Factor {
    let dcols: Vec<usize> = vars.iter().map(|&v| cols[v]).collect();
    let cards: Vec<usize> = dcols.iter().map(|&j| d.cardinality(j)).collect();
    let size: usize = cards.iter().product();
    let mut counts = vec![0u64; size];
    for r in 0..d.n_rows() {
        counts[d.config_at(r, &dcols)] += 1;
    }
    let n = d.n_rows() as f64;
    Factor::new(
        vars.to_vec(),
        cards,
        counts.iter().map(|&c| c as f64 / n).collect(),
    )
}

/// Every full assignment of the given cardinalities, last node fastest.
pub fn all_assignments(cards: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = cards.iter().product();
    let mut cur = vec![0usize; cards.len()];
    (0..total).map(move |_| {
        let out = cur.clone();
        increment(&mut cur, cards);
        out
    })
}

/// Name → level lookup used by callers that work with labels.
pub fn named_assignment(
    bn: &BayesianNetwork,
    values: &HashMap<String, String>,
) -> Result<Vec<usize>> {
    let pairs: Vec<(&str, &str)> = values
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    bn.assignment(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{load_dataset, Column};

    fn coin(yes: usize, no: usize) -> Dataset {
        let mut cells = vec![1u32; yes];
        cells.extend(std::iter::repeat_n(0, no));
        Dataset::new(
            vec![VariableMeta::discrete("X", ["no", "yes"])],
            vec![Column::Discrete(cells)],
        )
        .unwrap()
    }

    #[test]
    fn relative_frequencies() {
        let cpt = fit_cpt(&coin(3, 7), 0, &[], 0.0).unwrap();
        assert_eq!(cpt.rows, vec![vec![0.7, 0.3]]);
    }

    #[test]
    fn dirichlet_smoothing() {
        let cpt = fit_cpt(&coin(3, 7), 0, &[], 1.0).unwrap();
        assert_eq!(cpt.rows[0], [7.5 / 11.0, 3.5 / 11.0]);
    }

    #[test]
    fn unseen_parent_configuration_is_uniform_and_flagged() {
        let d = Dataset::new(
            vec![
                VariableMeta::discrete("P", ["a", "b"]),
                VariableMeta::discrete("X", ["u", "v", "w"]),
            ],
            vec![
                Column::Discrete(vec![0, 0, 0]),
                Column::Discrete(vec![0, 1, 1]),
            ],
        )
        .unwrap();
        let cpt = fit_cpt(&d, 1, &[0], 0.0).unwrap();
        assert_eq!(cpt.unseen_rows, [1]);
        assert_eq!(cpt.rows[1], [1.0 / 3.0; 3]);
        assert!(fit_cpt(&d, 1, &[0], 1.0).unwrap().unseen_rows.is_empty());
    }

    #[test]
    fn gaussian_without_parents_is_mean_and_variance() {
        let d = load_dataset("y\n1\n2\n4\n7\n".as_bytes(), None).unwrap();
        let g = fit_gaussian_local(&d, 0, &[]).unwrap();
        assert_eq!(g.intercept, 3.5);
        assert!((g.residual_variance - 7.0).abs() < 1e-12);
    }

    #[test]
    fn exact_copy_is_degenerate() {
        let d = load_dataset("x,y\n1,1\n2,2\n4,4\n7,7\n".as_bytes(), None).unwrap();
        assert_eq!(
            fit_gaussian_local(&d, 1, &[0]).unwrap_err(),
            PgmError::DegenerateVariance("y".into())
        );
    }

    #[test]
    fn collinear_parents_are_rejected() {
        let d = load_dataset(
            "a,b,y\n1,2,0.3\n2,4,0.1\n3,6,0.9\n4,8,0.2\n5,10,0.5\n".as_bytes(),
            None,
        )
        .unwrap();
        assert!(matches!(
            fit_gaussian_local(&d, 2, &[0, 1]),
            Err(PgmError::Collinearity(_))
        ));
    }

    #[test]
    fn fair_coin_log_likelihood() {
        let d = coin(5, 5);
        let dag = Dag::empty(["X"]).unwrap();
        let bn = fit_network(&d, &dag, 0.0).unwrap();
        let ll = bn.log_likelihood(&coin(4, 6)).unwrap().value();
        assert!((ll - 10.0 * 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn impossible_row_is_flagged() {
        let dag = Dag::empty(["X"]).unwrap();
        let bn = fit_network(&coin(0, 5), &dag, 0.0).unwrap();
        assert_eq!(
            bn.log_likelihood(&coin(1, 5)).unwrap(),
            LogLikelihood::ZeroProbability { row: 0 }
        );
    }

    #[test]
    fn non_chordal_graph_is_rejected() {
        let d = Dataset::new(
            ["A", "B", "C", "D"]
                .iter()
                .map(|n| VariableMeta::discrete(n, ["0", "1"]))
                .collect(),
            (0..4).map(|_| Column::Discrete(vec![0, 1])).collect(),
        )
        .unwrap();
        let g = UGraph::from_edges(
            &["A", "B", "C", "D"],
            &[("A", "B"), ("B", "C"), ("C", "D"), ("D", "A")],
        )
        .unwrap();
        assert!(matches!(
            clique_factorization(&d, &g),
            Err(PgmError::NotDecomposable(_))
        ));
    }
}
