//! Tabular regression datasets: in-memory representation, CSV ingestion with
//! categorical encoding, and seeded three-way splitting.
//!
//! A [`Dataset`] is a dense `f64` feature matrix plus a response vector; no
//! NaN or infinite entry can enter one. [`load_csv`] ingests an RFC-4180
//! style file with a header row, infers column types (a column is numeric
//! when every cell parses as a finite number, otherwise categorical), and
//! encodes categorical columns either as drop-first one-hot indicators or as
//! lexicographic ordinal ranks. [`split_three_way`] produces the disjoint
//! train/calibration/test partition that split conformal prediction requires,
//! as a seeded uniform permutation so splits are reproducible.
//!
//! Row numbers in errors refer to data rows, zero-based: the first row after
//! the header is row 0.

use ndarray::{Array2, ArrayView1, Axis};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use thiserror::Error;

use crate::exact::floor_times;
use crate::seeding::uniform_below;

/// Errors raised while building, loading, or splitting datasets.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path} contains no data rows")]
    Empty { path: String },
    #[error("{path} has no feature columns besides the target")]
    NoFeatureColumns { path: String },
    #[error("target column {name:?} not found; available columns: {available:?}")]
    MissingTarget { name: String, available: Vec<String> },
    #[error("target column {name:?} is not numeric: row {row} holds {value:?}")]
    NonNumericTarget { name: String, row: usize, value: String },
    #[error("missing value at row {row}, column {column:?}")]
    MissingValue { row: usize, column: String },
    #[error("non-finite value at row {row}, column {column:?}")]
    NonFinite { row: usize, column: String },
    #[error("feature matrix has {rows} rows but the response has {response_len} entries")]
    ShapeMismatch { rows: usize, response_len: usize },
    #[error("{names} feature names given for {cols} feature columns")]
    NameCountMismatch { names: usize, cols: usize },
    #[error(
        "split fractions ({train}, {calibration}, {test}) must each lie in (0, 1) \
         and sum to 1"
    )]
    BadFractions {
        train: f64,
        calibration: f64,
        test: f64,
    },
    #[error(
        "splitting {n} rows as {train}/{calibration}/{test} leaves an empty partition"
    )]
    EmptyPartition {
        n: usize,
        train: usize,
        calibration: usize,
        test: usize,
    },
    #[error("dataset has no rows")]
    NoRows,
}

/// A feature matrix paired with a numeric response. Construction validates
/// shapes and rejects non-finite entries, so downstream code can rely on
/// every stored value being a finite `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    response: Vec<f64>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Array2<f64>,
        response: Vec<f64>,
        feature_names: Vec<String>,
    ) -> Result<Self, DataError> {
        if features.nrows() != response.len() {
            return Err(DataError::ShapeMismatch {
                rows: features.nrows(),
                response_len: response.len(),
            });
        }
        if features.ncols() != feature_names.len() {
            return Err(DataError::NameCountMismatch {
                names: feature_names.len(),
                cols: features.ncols(),
            });
        }
        for ((row, col), value) in features.indexed_iter() {
            if !value.is_finite() {
                return Err(DataError::NonFinite {
                    row,
                    column: feature_names[col].clone(),
                });
            }
        }
        for (row, value) in response.iter().enumerate() {
            if !value.is_finite() {
                return Err(DataError::NonFinite {
                    row,
                    column: "<response>".to_string(),
                });
            }
        }
        Ok(Self {
            features,
            response,
            feature_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn feature_row(&self, row: usize) -> ArrayView1<'_, f64> {
        self.features.row(row)
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let features = self.features.select(Axis(0), rows);
        let response = rows.iter().map(|&r| self.response[r]).collect();
        Dataset {
            features,
            response,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Population standard deviation of the response (zero for n < 2).
    pub fn response_std(&self) -> f64 {
        let n = self.response.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.response.iter().sum::<f64>() / n as f64;
        let var = self
            .response
            .iter()
            .map(|y| (y - mean) * (y - mean))
            .sum::<f64>()
            / n as f64;
        var.sqrt()
    }
}

/// How categorical CSV columns are turned into numeric features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CategoricalPolicy {
    /// One indicator column per level except the lexicographically first
    /// (dropped to avoid redundancy). Columns are named `column=level`.
    #[default]
    OneHotDropFirst,
    /// A single column holding each level's rank in lexicographic order.
    Ordinal,
}

impl fmt::Display for CategoricalPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CategoricalPolicy::OneHotDropFirst => write!(f, "one-hot"),
            CategoricalPolicy::Ordinal => write!(f, "ordinal"),
        }
    }
}

fn is_missing_marker(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty()
        || c.eq_ignore_ascii_case("na")
        || c.eq_ignore_ascii_case("n/a")
        || c.eq_ignore_ascii_case("nan")
        || c.eq_ignore_ascii_case("null")
        || c == "?"
}

enum ColumnPlan {
    Numeric {
        source: usize,
    },
    /// One output column per retained level, in lexicographic order.
    OneHot {
        source: usize,
        levels: Vec<String>,
    },
    Ordinal {
        source: usize,
        ranks: BTreeMap<String, usize>,
    },
}

/// Loads a CSV file with a header row into a [`Dataset`].
///
/// `target` selects the response column by name; `None` means the last
/// column. Cells are trimmed. Empty cells and the markers `NA`, `N/A`,
/// `NaN`, `null`, and `?` (case-insensitive) are treated as missing and
/// rejected with the offending row and column. A column whose every cell
/// parses as a finite number is numeric; any other column is categorical and
/// encoded per `policy`. Loading is deterministic: the same file and options
/// always produce an identical dataset.
pub fn load_csv(
    path: impl AsRef<Path>,
    target: Option<&str>,
    policy: CategoricalPolicy,
) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path_str.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|source| DataError::Csv {
            path: path_str.clone(),
            source,
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if headers.is_empty() {
        return Err(DataError::Empty { path: path_str });
    }

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        rows.push(record.map_err(|source| DataError::Csv {
            path: path_str.clone(),
            source,
        })?);
    }
    if rows.is_empty() {
        return Err(DataError::Empty { path: path_str });
    }

    let target_col = match target {
        Some(name) => headers.iter().position(|h| h == name).ok_or_else(|| {
            DataError::MissingTarget {
                name: name.to_string(),
                available: headers.clone(),
            }
        })?,
        None => headers.len() - 1,
    };

    // Missing cells are rejected before any type inference so the error
    // always names the earliest offending cell in row-major order.
    for (row_idx, row) in rows.iter().enumerate() {
        for (col_idx, cell) in row.iter().enumerate() {
            if is_missing_marker(cell) {
                return Err(DataError::MissingValue {
                    row: row_idx,
                    column: headers[col_idx].clone(),
                });
            }
        }
    }

    let target_name = headers[target_col].clone();
    let mut response = Vec::with_capacity(rows.len());
    for (row_idx, row) in rows.iter().enumerate() {
        let cell = &row[target_col];
        let value: f64 = cell.parse().map_err(|_| DataError::NonNumericTarget {
            name: target_name.clone(),
            row: row_idx,
            value: cell.to_string(),
        })?;
        if value.is_nan() {
            return Err(DataError::MissingValue {
                row: row_idx,
                column: target_name.clone(),
            });
        }
        if !value.is_finite() {
            return Err(DataError::NonFinite {
                row: row_idx,
                column: target_name.clone(),
            });
        }
        response.push(value);
    }

    let mut plans: Vec<ColumnPlan> = Vec::new();
    for col in 0..headers.len() {
        if col == target_col {
            continue;
        }
        let mut numeric = true;
        for row in &rows {
            if row[col].parse::<f64>().is_err() {
                numeric = false;
                break;
            }
        }
        if numeric {
            for (row_idx, row) in rows.iter().enumerate() {
                let value: f64 = row[col].parse().expect("checked above");
                if value.is_nan() {
                    return Err(DataError::MissingValue {
                        row: row_idx,
                        column: headers[col].clone(),
                    });
                }
                if !value.is_finite() {
                    return Err(DataError::NonFinite {
                        row: row_idx,
                        column: headers[col].clone(),
                    });
                }
            }
            plans.push(ColumnPlan::Numeric { source: col });
        } else {
            let levels: BTreeSet<String> =
                rows.iter().map(|row| row[col].to_string()).collect();
            match policy {
                CategoricalPolicy::OneHotDropFirst => {
                    let retained: Vec<String> = levels.into_iter().skip(1).collect();
                    plans.push(ColumnPlan::OneHot {
                        source: col,
                        levels: retained,
                    });
                }
                CategoricalPolicy::Ordinal => {
                    let ranks: BTreeMap<String, usize> = levels
                        .into_iter()
                        .enumerate()
                        .map(|(rank, level)| (level, rank))
                        .collect();
                    plans.push(ColumnPlan::Ordinal { source: col, ranks });
                }
            }
        }
    }

    let mut feature_names = Vec::new();
    for plan in &plans {
        match plan {
            ColumnPlan::Numeric { source } => feature_names.push(headers[*source].clone()),
            ColumnPlan::OneHot { source, levels } => {
                for level in levels {
                    feature_names.push(format!("{}={}", headers[*source], level));
                }
            }
            ColumnPlan::Ordinal { source, .. } => feature_names.push(headers[*source].clone()),
        }
    }
    if feature_names.is_empty() {
        return Err(DataError::NoFeatureColumns { path: path_str });
    }

    let n_rows = rows.len();
    let n_cols = feature_names.len();
    let mut features = Array2::<f64>::zeros((n_rows, n_cols));
    for (row_idx, row) in rows.iter().enumerate() {
        let mut out_col = 0;
        for plan in &plans {
            match plan {
                ColumnPlan::Numeric { source } => {
                    features[(row_idx, out_col)] = row[*source].parse().expect("checked above");
                    out_col += 1;
                }
                ColumnPlan::OneHot { source, levels } => {
                    for level in levels {
                        features[(row_idx, out_col)] =
                            if &row[*source] == level.as_str() { 1.0 } else { 0.0 };
                        out_col += 1;
                    }
                }
                ColumnPlan::Ordinal { source, ranks } => {
                    features[(row_idx, out_col)] = ranks[&row[*source]] as f64;
                    out_col += 1;
                }
            }
        }
    }

    Dataset::new(features, response, feature_names)
}

/// Fractions and seed defining a three-way split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub calibration_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    /// Validates that each fraction lies in (0, 1) and that they sum to 1
    /// within 1e-12.
    pub fn new(
        train_fraction: f64,
        calibration_fraction: f64,
        test_fraction: f64,
        seed: u64,
    ) -> Result<Self, DataError> {
        let fractions = [train_fraction, calibration_fraction, test_fraction];
        let valid = fractions.iter().all(|f| f.is_finite() && *f > 0.0 && *f < 1.0)
            && (fractions.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
        if !valid {
            return Err(DataError::BadFractions {
                train: train_fraction,
                calibration: calibration_fraction,
                test: test_fraction,
            });
        }
        Ok(Self {
            train_fraction,
            calibration_fraction,
            test_fraction,
            seed,
        })
    }
}

/// A disjoint train/calibration/test partition with its provenance. The row
/// index vectors refer to rows of the original dataset and together form a
/// permutation of `0..n`.
#[derive(Debug, Clone)]
pub struct ThreeWaySplit {
    pub train: Dataset,
    pub calibration: Dataset,
    pub test: Dataset,
    pub train_rows: Vec<usize>,
    pub calibration_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub provenance: SplitSpec,
}

fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = uniform_below(&mut rng, (i + 1) as u64) as usize;
        order.swap(i, j);
    }
    order
}

/// Splits a dataset into train/calibration/test parts of sizes
/// `floor(train_fraction * n)`, `floor(calibration_fraction * n)`, and the
/// remainder, assigning rows by a seeded uniform permutation (Fisher-Yates
/// over a ChaCha8 stream). Deterministic and platform-independent for a
/// fixed seed. Errors if any partition would be empty.
pub fn split_three_way(data: &Dataset, spec: &SplitSpec) -> Result<ThreeWaySplit, DataError> {
    let n = data.n_rows();
    if n == 0 {
        return Err(DataError::NoRows);
    }
    let n_train = floor_times(spec.train_fraction, n as u64) as usize;
    let n_calib = floor_times(spec.calibration_fraction, n as u64) as usize;
    let n_test = n.saturating_sub(n_train + n_calib);
    if n_train == 0 || n_calib == 0 || n_test == 0 || n_train + n_calib >= n {
        return Err(DataError::EmptyPartition {
            n,
            train: n_train,
            calibration: n_calib,
            test: n_test,
        });
    }

    let order = seeded_permutation(n, spec.seed);
    let train_rows = order[..n_train].to_vec();
    let calibration_rows = order[n_train..n_train + n_calib].to_vec();
    let test_rows = order[n_train + n_calib..].to_vec();

    Ok(ThreeWaySplit {
        train: data.subset(&train_rows),
        calibration: data.subset(&calibration_rows),
        test: data.subset(&test_rows),
        train_rows,
        calibration_rows,
        test_rows,
        provenance: *spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file.flush().unwrap();
        file
    }

    fn toy_dataset(n: usize) -> Dataset {
        let features =
            Array2::from_shape_fn((n, 2), |(i, j)| i as f64 + 0.1 * j as f64);
        let response = (0..n).map(|i| i as f64).collect();
        Dataset::new(features, response, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn new_rejects_shape_and_name_mismatches() {
        let features = array![[1.0, 2.0], [3.0, 4.0]];
        assert!(matches!(
            Dataset::new(features.clone(), vec![1.0], vec!["a".into(), "b".into()]),
            Err(DataError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            Dataset::new(features, vec![1.0, 2.0], vec!["a".into()]),
            Err(DataError::NameCountMismatch { .. })
        ));
    }

    #[test]
    fn new_rejects_non_finite_entries() {
        let features = array![[1.0], [f64::NAN]];
        let err = Dataset::new(features, vec![0.0, 0.0], vec!["a".into()]).unwrap_err();
        match err {
            DataError::NonFinite { row, column } => {
                assert_eq!(row, 1);
                assert_eq!(column, "a");
            }
            other => panic!("unexpected error {other:?}"),
        }
        let features = array![[1.0], [2.0]];
        assert!(matches!(
            Dataset::new(features, vec![0.0, f64::INFINITY], vec!["a".into()]),
            Err(DataError::NonFinite { .. })
        ));
    }

    #[test]
    fn load_numeric_csv_passthrough() {
        let file = write_csv("x1,x2,y\n1,10,100\n2,20,200\n3,30,300\n");
        let data = load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst)
            .unwrap();
        assert_eq!(data.n_rows(), 3);
        assert_eq!(data.n_features(), 2);
        assert_eq!(data.feature_names(), &["x1".to_string(), "x2".to_string()]);
        assert_eq!(data.features(), &array![[1.0, 10.0], [2.0, 20.0], [3.0, 30.0]]);
        assert_eq!(data.response(), &[100.0, 200.0, 300.0]);
    }

    #[test]
    fn default_target_is_last_column() {
        let file = write_csv("a,b\n1,5\n2,6\n");
        let data = load_csv(file.path(), None, CategoricalPolicy::OneHotDropFirst).unwrap();
        assert_eq!(data.feature_names(), &["a".to_string()]);
        assert_eq!(data.response(), &[5.0, 6.0]);
    }

    #[test]
    fn one_hot_drops_the_first_level() {
        // Levels sort as blue < green < red; blue is dropped, so a column
        // with three levels adds exactly two indicator columns.
        let file = write_csv("color,size,y\nred,1,10\ngreen,2,20\nblue,3,30\nred,4,40\n");
        let data = load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst)
            .unwrap();
        assert_eq!(
            data.feature_names(),
            &[
                "color=green".to_string(),
                "color=red".to_string(),
                "size".to_string()
            ]
        );
        assert_eq!(
            data.features(),
            &array![
                [0.0, 1.0, 1.0],
                [1.0, 0.0, 2.0],
                [0.0, 0.0, 3.0],
                [0.0, 1.0, 4.0]
            ]
        );
    }

    #[test]
    fn ordinal_policy_ranks_levels_lexicographically() {
        let file = write_csv("color,y\nred,1\ngreen,2\nblue,3\n");
        let data = load_csv(file.path(), Some("y"), CategoricalPolicy::Ordinal).unwrap();
        assert_eq!(data.feature_names(), &["color".to_string()]);
        // blue -> 0, green -> 1, red -> 2.
        assert_eq!(data.features(), &array![[2.0], [1.0], [0.0]]);
    }

    #[test]
    fn missing_cell_error_names_row_and_column() {
        let mut content = String::from("a,b,y\n");
        for i in 0..5 {
            content.push_str(&format!("{i},{i},{i}\n"));
        }
        content.push_str("1,,9\n"); // data row 5
        let file = write_csv(&content);
        let err = load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst)
            .unwrap_err();
        match err {
            DataError::MissingValue { row, column } => {
                assert_eq!(row, 5);
                assert_eq!(column, "b");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_markers_are_rejected_case_insensitively() {
        for marker in ["NA", "na", "N/A", "NaN", "null", "?"] {
            let file = write_csv(&format!("a,y\n{marker},1\n"));
            assert!(matches!(
                load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst),
                Err(DataError::MissingValue { row: 0, .. })
            ));
        }
    }

    #[test]
    fn unknown_target_lists_available_columns() {
        let file = write_csv("a,b\n1,2\n");
        let err =
            load_csv(file.path(), Some("nope"), CategoricalPolicy::OneHotDropFirst).unwrap_err();
        match err {
            DataError::MissingTarget { name, available } => {
                assert_eq!(name, "nope");
                assert_eq!(available, vec!["a".to_string(), "b".to_string()]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_numeric_target_is_rejected() {
        let file = write_csv("a,y\n1,2\n2,oops\n");
        let err = load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst)
            .unwrap_err();
        match err {
            DataError::NonNumericTarget { name, row, value } => {
                assert_eq!(name, "y");
                assert_eq!(row, 1);
                assert_eq!(value, "oops");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn infinite_numeric_cells_are_rejected() {
        let file = write_csv("a,y\ninf,1\n");
        assert!(matches!(
            load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst),
            Err(DataError::NonFinite { row: 0, .. })
        ));
        let file = write_csv("a,y\n1,inf\n");
        assert!(matches!(
            load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst),
            Err(DataError::NonFinite { row: 0, .. })
        ));
    }

    #[test]
    fn empty_and_header_only_files_are_rejected() {
        let file = write_csv("");
        assert!(matches!(
            load_csv(file.path(), None, CategoricalPolicy::OneHotDropFirst),
            Err(DataError::Empty { .. })
        ));
        let file = write_csv("a,b,y\n");
        assert!(matches!(
            load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst),
            Err(DataError::Empty { .. })
        ));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        assert!(matches!(
            load_csv("/no/such/file.csv", None, CategoricalPolicy::OneHotDropFirst),
            Err(DataError::Io { .. })
        ));
    }

    #[test]
    fn target_only_csv_has_no_features() {
        let file = write_csv("y\n1\n2\n");
        assert!(matches!(
            load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst),
            Err(DataError::NoFeatureColumns { .. })
        ));
    }

    #[test]
    fn loading_twice_is_bit_identical() {
        let file = write_csv("color,x,y\nred,1.5,10\nblue,2.5,20\ngreen,0.25,30\n");
        let a = load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst).unwrap();
        let b = load_csv(file.path(), Some("y"), CategoricalPolicy::OneHotDropFirst).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_spec_validates_fractions() {
        assert!(SplitSpec::new(0.8, 0.1, 0.1, 0).is_ok());
        assert!(matches!(
            SplitSpec::new(0.8, 0.1, 0.2, 0),
            Err(DataError::BadFractions { .. })
        ));
        assert!(matches!(
            SplitSpec::new(1.0, 0.0, 0.0, 0),
            Err(DataError::BadFractions { .. })
        ));
        assert!(matches!(
            SplitSpec::new(-0.5, 0.75, 0.75, 0),
            Err(DataError::BadFractions { .. })
        ));
    }

    #[test]
    fn split_sizes_follow_floored_fractions() {
        let data = toy_dataset(10);
        let spec = SplitSpec::new(0.5, 0.25, 0.25, 3).unwrap();
        let split = split_three_way(&data, &spec).unwrap();
        assert_eq!(split.train.n_rows(), 5);
        assert_eq!(split.calibration.n_rows(), 2);
        assert_eq!(split.test.n_rows(), 3);
    }

    #[test]
    fn split_sizes_match_large_dataset_example() {
        let data = toy_dataset(20_433);
        let spec = SplitSpec::new(0.8, 0.1, 0.1, 0).unwrap();
        let split = split_three_way(&data, &spec).unwrap();
        assert_eq!(split.train.n_rows(), 16_346);
        assert_eq!(split.calibration.n_rows(), 2_043);
        assert_eq!(split.test.n_rows(), 2_044);
    }

    #[test]
    fn split_is_deterministic_for_a_seed() {
        let data = toy_dataset(50);
        let spec = SplitSpec::new(0.6, 0.2, 0.2, 99).unwrap();
        let a = split_three_way(&data, &spec).unwrap();
        let b = split_three_way(&data, &spec).unwrap();
        assert_eq!(a.train_rows, b.train_rows);
        assert_eq!(a.calibration_rows, b.calibration_rows);
        assert_eq!(a.test_rows, b.test_rows);
        assert_eq!(a.train, b.train);
    }

    #[test]
    fn different_seeds_permute_differently() {
        let data = toy_dataset(50);
        let a = split_three_way(&data, &SplitSpec::new(0.6, 0.2, 0.2, 1).unwrap()).unwrap();
        let b = split_three_way(&data, &SplitSpec::new(0.6, 0.2, 0.2, 2).unwrap()).unwrap();
        assert_ne!(a.train_rows, b.train_rows);
    }

    #[test]
    fn split_rows_are_a_permutation() {
        for (n, seed) in [(7, 0), (10, 1), (97, 5), (1000, 42)] {
            let data = toy_dataset(n);
            let spec = SplitSpec::new(0.4, 0.3, 0.3, seed).unwrap();
            let split = split_three_way(&data, &spec).unwrap();
            let mut all: Vec<usize> = split
                .train_rows
                .iter()
                .chain(&split.calibration_rows)
                .chain(&split.test_rows)
                .copied()
                .collect();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn subset_rows_carry_matching_responses() {
        let data = toy_dataset(30);
        let spec = SplitSpec::new(0.5, 0.25, 0.25, 7).unwrap();
        let split = split_three_way(&data, &spec).unwrap();
        for (pos, &orig) in split.calibration_rows.iter().enumerate() {
            assert_eq!(split.calibration.response()[pos], data.response()[orig]);
            assert_eq!(split.calibration.feature_row(pos), data.feature_row(orig));
        }
    }

    #[test]
    fn tiny_datasets_cannot_be_split() {
        let data = toy_dataset(3);
        let spec = SplitSpec::new(0.5, 0.25, 0.25, 0).unwrap();
        assert!(matches!(
            split_three_way(&data, &spec),
            Err(DataError::EmptyPartition { .. })
        ));
    }
}
