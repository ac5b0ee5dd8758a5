//! Typed tabular data, the z-score / one-hot encoding, and train/test splits.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{CausalGraph, Condition, ConditionValue, NodeId, NodeKind};
use crate::nn::Matrix;

/// Tolerance for matching continuous conditioning values.
pub const CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("column `{column}` has {found} values, expected {expected}")]
    LengthMismatch {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("column `{0}` declared twice")]
    DuplicateColumn(String),
    #[error("graph node `{0}` has no column in the dataset")]
    MissingColumn(String),
    #[error("column `{column}` is {found} but the graph declares it {expected}")]
    KindMismatch {
        column: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("column `{column}` has {found} distinct levels but the graph declares {declared}")]
    LevelCount {
        column: String,
        declared: usize,
        found: usize,
    },
    #[error("continuous column `{0}` has zero variance on the training rows")]
    ZeroVariance(String),
    #[error("row {row}, column `{column}`: unknown level `{level}`")]
    UnknownLevel {
        column: String,
        level: String,
        row: usize,
    },
    #[error("row {row}, column `{column}`: value is not finite")]
    NonFinite { column: String, row: usize },
    #[error("encoding needs at least one row")]
    NoRows,
    #[error("matrix has {found} columns, encoding expects {expected}")]
    Width { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum RawColumn {
    Continuous(Vec<f64>),
    Categorical(Vec<String>),
}

impl RawColumn {
    pub fn len(&self) -> usize {
        match self {
            RawColumn::Continuous(v) => v.len(),
            RawColumn::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind_name(&self) -> &'static str {
        match self {
            RawColumn::Continuous(_) => "continuous",
            RawColumn::Categorical(_) => "categorical",
        }
    }

    /// Cell rendered as text, as it would appear in a CSV.
    pub fn cell(&self, row: usize) -> String {
        match self {
            RawColumn::Continuous(v) => alloc::format!("{}", v[row]),
            RawColumn::Categorical(v) => v[row].clone(),
        }
    }

    fn select(&self, rows: &[usize]) -> Self {
        match self {
            RawColumn::Continuous(v) => RawColumn::Continuous(rows.iter().map(|&r| v[r]).collect()),
            RawColumn::Categorical(v) => RawColumn::Categorical(rows.iter().map(|&r| v[r].clone()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: RawColumn,
}

/// Raw columns of equal length. Columns not named by the graph are carried
/// along (for export) but never encoded.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnarDataset {
    columns: Vec<Column>,
    m: usize,
}

impl ColumnarDataset {
    pub fn new(columns: Vec<Column>) -> Result<Self, DataError> {
        let m = columns.first().map_or(0, |c| c.values.len());
        let mut names = BTreeSet::new();
        for c in &columns {
            if !names.insert(c.name.as_str()) {
                return Err(DataError::DuplicateColumn(c.name.clone()));
            }
            if c.values.len() != m {
                return Err(DataError::LengthMismatch {
                    column: c.name.clone(),
                    expected: m,
                    found: c.values.len(),
                });
            }
            if let RawColumn::Continuous(v) = &c.values {
                if let Some(row) = v.iter().position(|x| !x.is_finite()) {
                    return Err(DataError::NonFinite {
                        column: c.name.clone(),
                        row,
                    });
                }
            }
        }
        Ok(Self { columns, m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    values: c.values.select(rows),
                })
                .collect(),
            m: rows.len(),
        }
    }

    /// Distinct levels of a categorical column in lexicographic order.
    pub fn levels(&self, name: &str) -> Option<Vec<String>> {
        match &self.column(name)?.values {
            RawColumn::Categorical(v) => Some(v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()),
            RawColumn::Continuous(_) => None,
        }
    }

    /// Indices of rows satisfying every condition, compared on raw values.
    pub fn rows_matching(&self, graph: &CausalGraph, condition: &[Condition]) -> Result<Vec<usize>, DataError> {
        let mut cols = Vec::with_capacity(condition.len());
        for c in condition {
            let name = graph.name(c.node);
            let col = self.column(name).ok_or_else(|| DataError::MissingColumn(name.to_string()))?;
            cols.push((&col.values, &c.value));
        }
        Ok((0..self.m)
            .filter(|&r| {
                cols.iter().all(|(values, want)| match (values, want) {
                    (RawColumn::Continuous(v), ConditionValue::Number(x)) => (v[r] - x).abs() <= CONDITION_TOL,
                    (RawColumn::Categorical(v), ConditionValue::Level(l)) => &v[r] == l,
                    _ => false,
                })
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColumnTransform {
    ZScore { mean: f64, std: f64 },
    OneHot { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedColumn {
    pub name: String,
    pub node: NodeId,
    pub offset: usize,
    pub transform: ColumnTransform,
}

impl EncodedColumn {
    pub fn width(&self) -> usize {
        match &self.transform {
            ColumnTransform::ZScore { .. } => 1,
            ColumnTransform::OneHot { levels } => levels.len(),
        }
    }
}

/// Fitted column transforms for the graph's nodes. Continuous columns come
/// first, then one-hot blocks, each group in dataset column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoding {
    columns: Vec<EncodedColumn>,
    by_node: Vec<usize>,
    dim: usize,
}

impl Encoding {
    /// Fit transforms on `rows`. Level sets come from the whole dataset so
    /// one-hot widths do not depend on the split.
    pub fn fit(graph: &CausalGraph, ds: &ColumnarDataset, rows: &[usize]) -> Result<Self, DataError> {
        if rows.is_empty() {
            return Err(DataError::NoRows);
        }
        let mut entries: Vec<(usize, NodeId, ColumnTransform)> = Vec::with_capacity(graph.len());
        for id in graph.ids() {
            let spec = graph.node(id);
            let idx = ds
                .column_index(&spec.name)
                .ok_or_else(|| DataError::MissingColumn(spec.name.clone()))?;
            let col = &ds.columns[idx];
            let transform = match (spec.kind, &col.values) {
                (NodeKind::Continuous, RawColumn::Continuous(v)) => {
                    let n = rows.len() as f64;
                    let mean = rows.iter().map(|&r| v[r]).sum::<f64>() / n;
                    let var = rows.iter().map(|&r| (v[r] - mean) * (v[r] - mean)).sum::<f64>() / n;
                    let std = var.sqrt();
                    if !(std > 1e-12 * mean.abs().max(1.0)) {
                        return Err(DataError::ZeroVariance(spec.name.clone()));
                    }
                    ColumnTransform::ZScore { mean, std }
                }
                (NodeKind::Categorical { cardinality }, RawColumn::Categorical(_)) => {
                    let levels = ds.levels(&spec.name).expect("categorical column");
                    if levels.len() != cardinality {
                        return Err(DataError::LevelCount {
                            column: spec.name.clone(),
                            declared: cardinality,
                            found: levels.len(),
                        });
                    }
                    ColumnTransform::OneHot { levels }
                }
                (kind, values) => {
                    return Err(DataError::KindMismatch {
                        column: spec.name.clone(),
                        expected: match kind {
                            NodeKind::Continuous => "continuous",
                            NodeKind::Categorical { .. } => "categorical",
                        },
                        found: values.kind_name(),
                    })
                }
            };
            entries.push((idx, id, transform));
        }
        Ok(Self::from_transforms(graph, ds, entries))
    }

    fn from_transforms(graph: &CausalGraph, ds: &ColumnarDataset, mut entries: Vec<(usize, NodeId, ColumnTransform)>) -> Self {
        entries.sort_by_key(|(idx, _, t)| (matches!(t, ColumnTransform::OneHot { .. }), *idx));
        let mut columns = Vec::with_capacity(entries.len());
        let mut by_node = alloc::vec![usize::MAX; graph.len()];
        let mut offset = 0;
        for (idx, node, transform) in entries {
            let col = EncodedColumn {
                name: ds.columns[idx].name.clone(),
                node,
                offset,
                transform,
            };
            offset += col.width();
            by_node[node.0] = columns.len();
            columns.push(col);
        }
        Self {
            columns,
            by_node,
            dim: offset,
        }
    }

    /// Rebuild from stored columns (e.g. a checkpoint).
    pub fn from_columns(columns: Vec<EncodedColumn>, nodes: usize) -> Self {
        let mut by_node = alloc::vec![usize::MAX; nodes];
        let mut dim = 0;
        for (i, c) in columns.iter().enumerate() {
            by_node[c.node.0] = i;
            dim = dim.max(c.offset + c.width());
        }
        Self { columns, by_node, dim }
    }

    /// Encoded width D.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> &[EncodedColumn] {
        &self.columns
    }

    pub fn node_column(&self, node: NodeId) -> &EncodedColumn {
        &self.columns[self.by_node[node.0]]
    }

    /// Column range (offset, width) of a node's block.
    pub fn block(&self, node: NodeId) -> (usize, usize) {
        let c = self.node_column(node);
        (c.offset, c.width())
    }

    pub fn encode(&self, ds: &ColumnarDataset) -> Result<Matrix, DataError> {
        let all: Vec<usize> = (0..ds.len()).collect();
        self.encode_rows(ds, &all)
    }

    pub fn encode_rows(&self, ds: &ColumnarDataset, rows: &[usize]) -> Result<Matrix, DataError> {
        let mut out = Matrix::zeros(rows.len(), self.dim);
        for c in &self.columns {
            let col = ds.column(&c.name).ok_or_else(|| DataError::MissingColumn(c.name.clone()))?;
            match (&c.transform, &col.values) {
                (ColumnTransform::ZScore { mean, std }, RawColumn::Continuous(v)) => {
                    for (i, &r) in rows.iter().enumerate() {
                        out.set(i, c.offset, (v[r] - mean) / std);
                    }
                }
                (ColumnTransform::OneHot { levels }, RawColumn::Categorical(v)) => {
                    for (i, &r) in rows.iter().enumerate() {
                        let k = levels.binary_search(&v[r]).map_err(|_| DataError::UnknownLevel {
                            column: c.name.clone(),
                            level: v[r].clone(),
                            row: r,
                        })?;
                        out.set(i, c.offset + k, 1.0);
                    }
                }
                (t, values) => {
                    return Err(DataError::KindMismatch {
                        column: c.name.clone(),
                        expected: match t {
                            ColumnTransform::ZScore { .. } => "continuous",
                            ColumnTransform::OneHot { .. } => "categorical",
                        },
                        found: values.kind_name(),
                    })
                }
            }
        }
        Ok(out)
    }

    /// Inverse transform; one-hot blocks decode to their argmax level.
    pub fn decode(&self, x: &Matrix) -> Result<Vec<Column>, DataError> {
        if x.cols() != self.dim {
            return Err(DataError::Width {
                expected: self.dim,
                found: x.cols(),
            });
        }
        Ok(self
            .columns
            .iter()
            .map(|c| {
                let values = match &c.transform {
                    ColumnTransform::ZScore { mean, std } => {
                        RawColumn::Continuous((0..x.rows()).map(|r| x.get(r, c.offset) * std + mean).collect())
                    }
                    ColumnTransform::OneHot { levels } => RawColumn::Categorical(
                        (0..x.rows())
                            .map(|r| {
                                let row = &x.row_slice(r)[c.offset..c.offset + levels.len()];
                                let mut best = 0;
                                for (k, &v) in row.iter().enumerate() {
                                    if v > row[best] {
                                        best = k;
                                    }
                                }
                                levels[best].clone()
                            })
                            .collect(),
                    ),
                };
                Column {
                    name: c.name.clone(),
                    values,
                }
            })
            .collect())
    }

    /// Index of `level` within a categorical node's one-hot block.
    pub fn level_index(&self, node: NodeId, level: &str) -> Option<usize> {
        match &self.node_column(node).transform {
            ColumnTransform::OneHot { levels } => levels.iter().position(|l| l == level),
            ColumnTransform::ZScore { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub train_fraction: f64,
    pub repetition: u64,
}

impl SplitPlan {
    pub fn new(seed: u64, train_fraction: f64, repetition: u64) -> Self {
        Self {
            seed,
            train_fraction,
            repetition,
        }
    }

    /// Shuffled split into (train, test), each sorted ascending. The train
    /// share is `round(fraction * m)` clamped so neither side is empty when
    /// `m >= 2`.
    pub fn split(&self, m: usize) -> (Vec<usize>, Vec<usize>) {
        let mut idx: Vec<usize> = (0..m).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.repetition);
        idx.shuffle(&mut rng);
        let mut n_train = (self.train_fraction * m as f64).round() as usize;
        if m >= 2 {
            n_train = n_train.clamp(1, m - 1);
        }
        let mut test = idx.split_off(n_train.min(m));
        idx.sort_unstable();
        test.sort_unstable();
        (idx, test)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeSpec;
    use alloc::vec;
    use proptest::prelude::*;

    fn small() -> (CausalGraph, ColumnarDataset) {
        let g = CausalGraph::new(
            vec![NodeSpec::continuous("x"), NodeSpec::binary("s"), NodeSpec::binary("y")],
            &[("x", "y"), ("s", "y")],
            "s",
            "y",
        )
        .unwrap();
        let ds = ColumnarDataset::new(vec![
            Column {
                name: "s".into(),
                values: RawColumn::Categorical(vec!["b".into(), "a".into(), "b".into()]),
            },
            Column {
                name: "x".into(),
                values: RawColumn::Continuous(vec![1.0, 2.0, 3.0]),
            },
            Column {
                name: "y".into(),
                values: RawColumn::Categorical(vec!["0".into(), "1".into(), "1".into()]),
            },
        ])
        .unwrap();
        (g, ds)
    }

    #[test]
    fn layout_and_values() {
        let (g, ds) = small();
        let enc = Encoding::fit(&g, &ds, &[0, 1, 2]).unwrap();
        assert_eq!(enc.dim(), 5);
        let x = enc.encode(&ds).unwrap();
        // continuous first, then s block (a, b), then y block (0, 1)
        let z = 1.5f64.sqrt();
        assert!((x.get(0, 0) + z).abs() < 1e-12);
        assert!(x.get(1, 0).abs() < 1e-12);
        assert!((x.get(2, 0) - z).abs() < 1e-12);
        assert_eq!(&x.row_slice(1)[1..3], &[1.0, 0.0]);
        assert_eq!(&x.row_slice(0)[1..3], &[0.0, 1.0]);
        assert_eq!(enc.block(g.outcome()), (3, 2));
        for r in 0..3 {
            assert_eq!(x.get(r, 1) + x.get(r, 2), 1.0);
        }
    }

    #[test]
    fn decode_inverts_encode() {
        let (g, ds) = small();
        let enc = Encoding::fit(&g, &ds, &[0, 1, 2]).unwrap();
        let back = enc.decode(&enc.encode(&ds).unwrap()).unwrap();
        for col in back {
            match (&col.values, &ds.column(&col.name).unwrap().values) {
                (RawColumn::Continuous(a), RawColumn::Continuous(b)) => {
                    for (u, v) in a.iter().zip(b) {
                        assert!((u - v).abs() < 1e-9);
                    }
                }
                (a, b) => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn zero_variance_and_unknown_level() {
        let (g, ds) = small();
        assert_eq!(Encoding::fit(&g, &ds, &[1]), Err(DataError::ZeroVariance("x".into())));
        let enc = Encoding::fit(&g, &ds, &[0, 1, 2]).unwrap();
        let other = ColumnarDataset::new(vec![
            Column {
                name: "s".into(),
                values: RawColumn::Categorical(vec!["c".into()]),
            },
            Column {
                name: "x".into(),
                values: RawColumn::Continuous(vec![0.0]),
            },
            Column {
                name: "y".into(),
                values: RawColumn::Categorical(vec!["0".into()]),
            },
        ])
        .unwrap();
        assert!(matches!(enc.encode(&other), Err(DataError::UnknownLevel { row: 0, .. })));
    }

    #[test]
    fn train_only_statistics() {
        let (g, ds) = small();
        let enc = Encoding::fit(&g, &ds, &[0, 1]).unwrap();
        let mut perturbed = ds.clone();
        if let RawColumn::Continuous(v) = &mut perturbed.columns[1].values {
            v[2] = 1e6;
        }
        assert_eq!(Encoding::fit(&g, &perturbed, &[0, 1]).unwrap(), enc);
    }

    #[test]
    fn missing_column_and_kind_mismatch() {
        let (g, ds) = small();
        let partial = ds.select_rows(&[0, 1]);
        let mut cols = partial.columns().to_vec();
        cols.remove(1);
        let missing = ColumnarDataset::new(cols).unwrap();
        assert_eq!(Encoding::fit(&g, &missing, &[0, 1]), Err(DataError::MissingColumn("x".into())));
        let mut cols = ds.columns().to_vec();
        cols[1].values = RawColumn::Categorical(vec!["1".into(), "2".into(), "3".into()]);
        let wrong = ColumnarDataset::new(cols).unwrap();
        assert!(matches!(Encoding::fit(&g, &wrong, &[0, 1, 2]), Err(DataError::KindMismatch { .. })));
    }

    #[test]
    fn split_sizes_and_determinism() {
        let plan = SplitPlan::new(7, 0.8, 0);
        let (train, test) = plan.split(10);
        assert_eq!((train.len(), test.len()), (8, 2));
        assert_eq!(plan.split(10), (train, test));
        assert_ne!(plan.split(100), SplitPlan::new(8, 0.8, 0).split(100));
        assert_ne!(plan.split(100), SplitPlan::new(7, 0.8, 1).split(100));
    }

    #[test]
    fn condition_matching() {
        let (g, ds) = small();
        let cond = vec![Condition {
            node: g.id("x").unwrap(),
            value: ConditionValue::Number(2.0 + 1e-12),
        }];
        assert_eq!(ds.rows_matching(&g, &cond).unwrap(), vec![1]);
    }

    proptest! {
        #[test]
        fn split_partitions(m in 2usize..400, seed in any::<u64>(), rep in 0u64..5, frac in 0.05f64..0.95) {
            let (train, test) = SplitPlan::new(seed, frac, rep).split(m);
            let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..m).collect::<Vec<_>>());
            prop_assert!(!train.is_empty() && !test.is_empty());
        }

        #[test]
        fn zscore_moments(values in proptest::collection::vec(-1e3f64..1e3, 3..60)) {
            let n = values.len();
            let g = CausalGraph::new(
                vec![NodeSpec::continuous("x"), NodeSpec::binary("s"), NodeSpec::binary("y")],
                &[("x", "y"), ("s", "y")],
                "s",
                "y",
            ).unwrap();
            let ds = ColumnarDataset::new(vec![
                Column { name: "x".into(), values: RawColumn::Continuous(values.clone()) },
                Column { name: "s".into(), values: RawColumn::Categorical((0..n).map(|i| (i % 2).to_string()).collect()) },
                Column { name: "y".into(), values: RawColumn::Categorical((0..n).map(|i| (i / 2 % 2).to_string()).collect()) },
            ]).unwrap();
            let rows: Vec<usize> = (0..n).collect();
            match Encoding::fit(&g, &ds, &rows) {
                Ok(enc) => {
                    let x = enc.encode(&ds).unwrap();
                    let col: Vec<f64> = (0..n).map(|r| x.get(r, 0)).collect();
                    let mean = col.iter().sum::<f64>() / n as f64;
                    let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                    prop_assert!(mean.abs() < 1e-9);
                    prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
                }
                Err(DataError::ZeroVariance(_)) => {
                    let first = values[0];
                    prop_assert!(values.iter().all(|v| (v - first).abs() < 1e-9));
                }
                Err(other) => prop_assert!(false, "{:?}", other),
            }
        }
    }
}
