//! Tabular datasets, contingency tables and Gaussian sufficient statistics.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;

use crate::error::{PgmError, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariableKind {
    Discrete { levels: Vec<String> },
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableMeta {
    pub name: String,
    pub kind: VariableKind,
}

impl VariableMeta {
    pub fn discrete<S: Into<String>>(name: &str, levels: impl IntoIterator<Item = S>) -> Self {
        VariableMeta {
            name: name.to_owned(),
            kind: VariableKind::Discrete {
                levels: levels.into_iter().map(Into::into).collect(),
            },
        }
    }

    pub fn continuous(name: &str) -> Self {
        VariableMeta {
            name: name.to_owned(),
            kind: VariableKind::Continuous,
        }
    }

    pub fn levels(&self) -> Option<&[String]> {
        match &self.kind {
            VariableKind::Discrete { levels } => Some(levels),
            VariableKind::Continuous => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, VariableKind::Discrete { .. })
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels()?.iter().position(|l| l == label)
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(PgmError::arg("variable names must be non-empty"));
        }
        if let Some(levels) = self.levels() {
            if levels.len() < 2 {
                return Err(PgmError::arg(format!(
                    "discrete variable '{}' needs at least two levels",
                    self.name
                )));
            }
            let uniq: BTreeSet<&String> = levels.iter().collect();
            if uniq.len() != levels.len() {
                return Err(PgmError::arg(format!(
                    "variable '{}' has duplicate level labels",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Column storage. Discrete cells are indices into the variable's levels.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Discrete(Vec<u32>),
    Continuous(Vec<f64>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Discrete(v) => v.len(),
            Column::Continuous(v) => v.len(),
        }
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Discrete(v) => Column::Discrete(rows.iter().map(|&r| v[r]).collect()),
            Column::Continuous(v) => Column::Continuous(rows.iter().map(|&r| v[r]).collect()),
        }
    }
}

/// A complete-data sample: typed variables and `n ≥ 1` observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    vars: Vec<VariableMeta>,
    columns: Vec<Column>,
    n: usize,
}

impl Dataset {
    pub fn new(vars: Vec<VariableMeta>, columns: Vec<Column>) -> Result<Self> {
        if vars.len() != columns.len() {
            return Err(PgmError::arg("one column is required per variable"));
        }
        let mut names = BTreeSet::new();
        for v in &vars {
            v.validate()?;
            if !names.insert(v.name.as_str()) {
                return Err(PgmError::arg(format!("duplicate variable '{}'", v.name)));
            }
        }
        let n = columns.first().map_or(0, Column::len);
        if n == 0 {
            return Err(PgmError::arg("a dataset needs at least one row"));
        }
        for (v, c) in vars.iter().zip(&columns) {
            if c.len() != n {
                return Err(PgmError::arg(format!(
                    "column '{}' has the wrong length",
                    v.name
                )));
            }
            match (&v.kind, c) {
                (VariableKind::Discrete { levels }, Column::Discrete(cells)) => {
                    if cells.iter().any(|&x| x as usize >= levels.len()) {
                        return Err(PgmError::arg(format!(
                            "column '{}' holds a level index out of range",
                            v.name
                        )));
                    }
                }
                (VariableKind::Continuous, Column::Continuous(cells)) => {
                    if cells.iter().any(|x| !x.is_finite()) {
                        return Err(PgmError::arg(format!(
                            "column '{}' holds a non-finite value",
                            v.name
                        )));
                    }
                }
                _ => {
                    return Err(PgmError::arg(format!(
                        "column '{}' does not match its declared kind",
                        v.name
                    )))
                }
            }
        }
        Ok(Dataset { vars, columns, n })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn variables(&self) -> &[VariableMeta] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &VariableMeta {
        &self.vars[i]
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| PgmError::arg(format!("unknown variable '{name}'")))
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.columns[i]
    }

    pub fn discrete(&self, i: usize) -> Result<&[u32]> {
        match &self.columns[i] {
            Column::Discrete(v) => Ok(v),
            Column::Continuous(_) => Err(PgmError::arg(format!(
                "variable '{}' is continuous, a discrete variable is required",
                self.vars[i].name
            ))),
        }
    }

    pub fn continuous(&self, i: usize) -> Result<&[f64]> {
        match &self.columns[i] {
            Column::Continuous(v) => Ok(v),
            Column::Discrete(_) => Err(PgmError::arg(format!(
                "variable '{}' is discrete, a continuous variable is required",
                self.vars[i].name
            ))),
        }
    }

    /// Number of levels of a discrete variable; 0 for continuous ones.
    pub fn cardinality(&self, i: usize) -> usize {
        self.vars[i].levels().map_or(0, <[String]>::len)
    }

    pub fn all_discrete(&self) -> bool {
        self.vars.iter().all(VariableMeta::is_discrete)
    }

    pub fn all_continuous(&self) -> bool {
        self.vars.iter().all(|v| !v.is_discrete())
    }

    /// A new dataset made of the given rows (repeats allowed).
    pub fn select_rows(&self, rows: &[usize]) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(PgmError::arg("row selection is empty"));
        }
        Ok(Dataset {
            vars: self.vars.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            n: rows.len(),
        })
    }

    pub fn select_columns(&self, names: &[&str]) -> Result<Dataset> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.require(n))
            .collect::<Result<_>>()?;
        Dataset::new(
            idx.iter().map(|&i| self.vars[i].clone()).collect(),
            idx.iter().map(|&i| self.columns[i].clone()).collect(),
        )
    }

    /// Cell text as it would appear in a CSV file.
    pub fn cell_text(&self, row: usize, var: usize) -> String {
        match (&self.columns[var], &self.vars[var].kind) {
            (Column::Discrete(v), VariableKind::Discrete { levels }) => {
                levels[v[row] as usize].clone()
            }
            (Column::Continuous(v), _) => format!("{}", v[row]),
            _ => unreachable!("kinds checked at construction"),
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| PgmError::Io(e.to_string());
        out.write_record(self.vars.iter().map(|v| v.name.as_str()))
            .map_err(io)?;
        for r in 0..self.n {
            out.write_record((0..self.n_vars()).map(|j| self.cell_text(r, j)))
                .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Mixed-radix index of the joint level configuration of `vars` at
    /// `row`; the first variable varies slowest.
    pub(crate) fn config_at(&self, row: usize, vars: &[usize]) -> usize {
        let mut idx = 0;
        for &v in vars {
            let Column::Discrete(cells) = &self.columns[v] else {
                unreachable!("caller checked kinds");
            };
            idx = idx * self.cardinality(v) + cells[row] as usize;
        }
        idx
    }

    pub(crate) fn require_discrete(&self, vars: &[usize]) -> Result<()> {
        for &v in vars {
            self.discrete(v)?;
        }
        Ok(())
    }
}

/// Declared kinds for some or all columns of a CSV file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    kinds: HashMap<String, VariableKind>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, kind: VariableKind) -> &mut Self {
        self.kinds.insert(name.to_owned(), kind);
        self
    }

    pub fn get(&self, name: &str) -> Option<&VariableKind> {
        self.kinds.get(name)
    }

    /// Parses sidecar lines of the form `name,kind[,level…]`, where kind is
    /// `discrete` or `continuous`. Discrete entries without levels take their
    /// levels from the data.
    pub fn parse(text: &str) -> Result<Schema> {
        let mut schema = Schema::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |message: &str| PgmError::Ingestion {
                row: lineno + 1,
                column: fields[0].to_owned(),
                message: message.to_owned(),
            };
            let kind = match fields.get(1).copied() {
                Some("continuous") if fields.len() == 2 => VariableKind::Continuous,
                Some("continuous") => return Err(bad("continuous variables take no levels")),
                Some("discrete") => VariableKind::Discrete {
                    levels: fields[2..].iter().map(|s| s.to_string()).collect(),
                },
                _ => return Err(bad("schema kind must be 'discrete' or 'continuous'")),
            };
            schema.declare(fields[0], kind);
        }
        Ok(schema)
    }
}

/// Reads a comma-separated table whose first row names the variables.
///
/// Undeclared columns are continuous when every cell parses as a finite
/// number and discrete otherwise, with their observed labels sorted.
pub fn load_dataset<R: Read>(source: R, schema: Option<&Schema>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| PgmError::Io(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(PgmError::Ingestion {
            row: 1,
            column: String::new(),
            message: "missing header row".into(),
        });
    }
    let p = header.len();
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); p];
    for (r, rec) in reader.records().enumerate() {
        let row = r + 2;
        let rec = rec.map_err(|e| PgmError::Io(e.to_string()))?;
        if rec.len() != p {
            return Err(PgmError::Ingestion {
                row,
                column: String::new(),
                message: format!("expected {p} fields, found {}", rec.len()),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            if cell.is_empty() {
                return Err(PgmError::Ingestion {
                    row,
                    column: header[j].clone(),
                    message: "missing value".into(),
                });
            }
            cells[j].push(cell.to_owned());
        }
    }
    if cells[0].is_empty() {
        return Err(PgmError::Ingestion {
            row: 2,
            column: String::new(),
            message: "no observations".into(),
        });
    }

    let mut vars = Vec::with_capacity(p);
    let mut columns = Vec::with_capacity(p);
    for (j, name) in header.iter().enumerate() {
        let declared = schema.and_then(|s| s.get(name));
        let parsed: Option<Vec<f64>> = cells[j]
            .iter()
            .map(|c| c.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect();
        let kind = match declared {
            Some(k) => k.clone(),
            None if parsed.is_some() => VariableKind::Continuous,
            None => VariableKind::Discrete { levels: Vec::new() },
        };
        match kind {
            VariableKind::Continuous => {
                let Some(values) = parsed else {
                    let (r, _) = cells[j]
                        .iter()
                        .enumerate()
                        .find(|(_, c)| c.parse::<f64>().map_or(true, |x| !x.is_finite()))
                        .unwrap();
                    return Err(PgmError::Ingestion {
                        row: r + 2,
                        column: name.clone(),
                        message: "not a number in a continuous column".into(),
                    });
                };
                vars.push(VariableMeta::continuous(name));
                columns.push(Column::Continuous(values));
            }
            VariableKind::Discrete { levels } => {
                let levels = if levels.is_empty() {
                    cells[j]
                        .iter()
                        .cloned()
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect()
                } else {
                    levels
                };
                let lookup: HashMap<&str, u32> = levels
                    .iter()
                    .enumerate()
                    .map(|(k, l)| (l.as_str(), k as u32))
                    .collect();
                let mut codes = Vec::with_capacity(cells[j].len());
                for (r, c) in cells[j].iter().enumerate() {
                    let Some(&k) = lookup.get(c.as_str()) else {
                        return Err(PgmError::Ingestion {
                            row: r + 2,
                            column: name.clone(),
                            message: format!("level '{c}' is not declared"),
                        });
                    };
                    codes.push(k);
                }
                if levels.len() < 2 {
                    return Err(PgmError::Ingestion {
                        row: 2,
                        column: name.clone(),
                        message:
                            "discrete column has a single level; declare its levels in a schema"
                                .into(),
                    });
                }
                vars.push(VariableMeta::discrete(name, levels));
                columns.push(Column::Discrete(codes));
            }
        }
    }
    Dataset::new(vars, columns).map_err(|e| match e {
        PgmError::Argument(message) => PgmError::Ingestion {
            row: 1,
            column: String::new(),
            message,
        },
        other => other,
    })
}

/// Joint counts of `targets` within each configuration of `given`.
///
/// Counts are laid out slice by slice: the conditioning configuration is
/// outermost, then the targets with the last one varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub targets: Vec<usize>,
    pub given: Vec<usize>,
    pub target_levels: Vec<usize>,
    pub given_levels: Vec<usize>,
    pub counts: Vec<u64>,
}

impl ContingencyTable {
    pub fn target_cells(&self) -> usize {
        self.target_levels.iter().product()
    }

    pub fn given_configs(&self) -> usize {
        self.given_levels.iter().product()
    }

    pub fn slice(&self, z: usize) -> &[u64] {
        let w = self.target_cells();
        &self.counts[z * w..(z + 1) * w]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts summed over the conditioning variables.
    pub fn collapse_given(&self) -> Vec<u64> {
        let w = self.target_cells();
        let mut out = vec![0; w];
        for z in 0..self.given_configs() {
            for (o, c) in out.iter_mut().zip(self.slice(z)) {
                *o += c;
            }
        }
        out
    }
}

pub fn contingency_table(
    d: &Dataset,
    targets: &[usize],
    given: &[usize],
) -> Result<ContingencyTable> {
    let mut all: Vec<usize> = given.to_vec();
    all.extend_from_slice(targets);
    let uniq: BTreeSet<usize> = all.iter().copied().collect();
    if uniq.len() != all.len() {
        return Err(PgmError::arg(
            "contingency table variables must be distinct",
        ));
    }
    if let Some(&bad) = all.iter().find(|&&v| v >= d.n_vars()) {
        return Err(PgmError::arg(format!("variable index {bad} out of range")));
    }
    d.require_discrete(&all)?;
    let target_levels: Vec<usize> = targets.iter().map(|&v| d.cardinality(v)).collect();
    let given_levels: Vec<usize> = given.iter().map(|&v| d.cardinality(v)).collect();
    let size: usize = target_levels.iter().chain(&given_levels).product();
    let mut counts = vec![0u64; size];
    for r in 0..d.n_rows() {
        counts[d.config_at(r, &all)] += 1;
    }
    Ok(ContingencyTable {
        targets: targets.to_vec(),
        given: given.to_vec(),
        target_levels,
        given_levels,
        counts,
    })
}

/// Name-based convenience wrapper around [`contingency_table`].
pub fn contingency_table_by_name(
    d: &Dataset,
    targets: &[&str],
    given: &[&str],
) -> Result<ContingencyTable> {
    let t: Vec<usize> = targets
        .iter()
        .map(|n| d.require(n))
        .collect::<Result<_>>()?;
    let g: Vec<usize> = given.iter().map(|n| d.require(n)).collect::<Result<_>>()?;
    contingency_table(d, &t, &g)
}

/// Sample size, means and correlation matrix of an all-continuous dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussStats {
    pub n: usize,
    pub names: Vec<String>,
    pub means: Vec<f64>,
    pub correlation: Matrix,
}

impl GaussStats {
    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| PgmError::arg(format!("unknown variable '{name}'")))
    }
}

pub fn gauss_stats(d: &Dataset) -> Result<GaussStats> {
    let p = d.n_vars();
    let n = d.n_rows();
    if n < 2 {
        return Err(PgmError::arg("correlations need at least two rows"));
    }
    let cols: Vec<&[f64]> = (0..p).map(|j| d.continuous(j)).collect::<Result<_>>()?;
    let means: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().sum::<f64>() / n as f64)
        .collect();
    let centred: Vec<Vec<f64>> = cols
        .iter()
        .zip(&means)
        .map(|(c, m)| c.iter().map(|x| x - m).collect())
        .collect();
    let mut cov = Matrix::zeros(p);
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = centred[i].iter().zip(&centred[j]).map(|(a, b)| a * b).sum();
            cov[(i, j)] = s / (n - 1) as f64;
        }
        if !(cov[(i, i)] > 0.0) {
            return Err(PgmError::DegenerateVariance(d.var(i).name.clone()));
        }
    }
    let mut corr = Matrix::identity(p);
    for i in 0..p {
        for j in 0..i {
            let r = (cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt()).clamp(-1.0, 1.0);
            corr[(i, j)] = r;
            corr[(j, i)] = r;
        }
    }
    Ok(GaussStats {
        n,
        names: d.names(),
        means,
        correlation: corr,
    })
}

/// Replaces every continuous variable with a `bins`-level discrete one cut
/// at sample quantiles. A value equal to a cut point goes to the lower bin.
pub fn discretize(d: &Dataset, bins: usize) -> Result<Dataset> {
    if bins < 2 {
        return Err(PgmError::arg("discretisation needs at least two bins"));
    }
    let mut vars = Vec::with_capacity(d.n_vars());
    let mut columns = Vec::with_capacity(d.n_vars());
    let n = d.n_rows();
    for j in 0..d.n_vars() {
        match d.column(j) {
            Column::Discrete(_) => {
                vars.push(d.var(j).clone());
                columns.push(d.column(j).clone());
            }
            Column::Continuous(values) => {
                let mut sorted = values.clone();
                sorted.sort_by(f64::total_cmp);
                let mut distinct = sorted.clone();
                distinct.dedup();
                if distinct.len() < bins {
                    return Err(PgmError::arg(format!(
                        "variable '{}' has {} distinct values, fewer than {bins} bins",
                        d.var(j).name,
                        distinct.len()
                    )));
                }
                let cuts: Vec<f64> = (1..bins)
                    .map(|k| sorted[(k * n).div_ceil(bins).max(1) - 1])
                    .collect();
                let codes = values
                    .iter()
                    .map(|x| cuts.iter().filter(|&&c| *x > c).count() as u32)
                    .collect();
                let labels: Vec<String> = (1..=bins).map(|k| format!("q{k}")).collect();
                vars.push(VariableMeta::discrete(&d.var(j).name, labels));
                columns.push(Column::Discrete(codes));
            }
        }
    }
    Dataset::new(vars, columns)
}
