//! Dataset ingestion and preprocessing.
//!
//! CSV grammar: a header `label,f0,f1,...,f{m-1}` followed by one sample per
//! row, label first. Splits live in separate files named
//! `<name>_train.csv`, `<name>_val.csv`, `<name>_test.csv`.

mod fitness;
mod pca;
mod scale;
pub mod synthetic;

use std::fmt;
use std::path::{Path, PathBuf};

pub use fitness::{classify_dataset, make_fitness, readout_dataset, FitnessMode};
pub use pca::PcaModel;
pub use scale::ScalerModel;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    /// File suffix used by the split naming convention.
    pub fn suffix(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "val",
            Split::Test => "test",
        }
    }

    pub fn path(self, dir: &Path, name: &str) -> PathBuf {
        dir.join(format!("{name}_{}.csv", self.suffix()))
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.suffix())
    }
}

/// Row-major feature matrix with one integer label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_features: usize,
    features: Vec<f64>,
    labels: Vec<u32>,
    pub split: Split,
}

impl Dataset {
    pub fn new(n_features: usize, features: Vec<f64>, labels: Vec<u32>, split: Split) -> Result<Self> {
        if features.len() != n_features * labels.len() {
            return Err(Error::LengthMismatch {
                expected: n_features * labels.len(),
                actual: features.len(),
            });
        }
        Ok(Self { n_features, features, labels, split })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u32>, split: Split) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_features) {
            return Err(Error::LengthMismatch { expected: n_features, actual: bad.len() });
        }
        Self::new(n_features, rows.concat(), labels, split)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self { n_features: self.n_features, features, labels, split: self.split }
    }

    pub(crate) fn with_features(&self, n_features: usize, features: Vec<f64>) -> Self {
        debug_assert_eq!(features.len(), n_features * self.len());
        Self { n_features, features, labels: self.labels.clone(), split: self.split }
    }
}

pub fn load_csv(path: impl AsRef<Path>, split: Split) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, split).map_err(|e| match e {
        Error::Csv { source, .. } => Error::Csv { path: path.to_path_buf(), source },
        Error::Dataset(msg) => Error::Dataset(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses the dataset grammar from any reader. Row numbers in errors count
/// the header as line 1.
pub fn read_csv<R: std::io::Read>(reader: R, split: Split) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let csv_err = |source| Error::Csv { path: PathBuf::new(), source };

    let header = reader.headers().map_err(csv_err)?.clone();
    if header.is_empty() || header.get(0).map(str::trim) != Some("label") {
        return Err(Error::Dataset("header must start with `label`".into()));
    }
    let n_features = header.len() - 1;
    if n_features == 0 {
        return Err(Error::Dataset("header declares no feature columns".into()));
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != n_features + 1 {
            return Err(Error::Dataset(format!(
                "row {line}: expected {} columns, found {}",
                n_features + 1,
                record.len()
            )));
        }
        let label = record[0]
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::Dataset(format!("row {line}: invalid label {:?}", &record[0])))?;
        labels.push(label);
        for (j, cell) in record.iter().skip(1).enumerate() {
            let value = cell.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                Error::Dataset(format!("row {line}: column f{j} is not a number: {cell:?}"))
            })?;
            features.push(value);
        }
    }
    if labels.is_empty() {
        return Err(Error::Dataset("no samples".into()));
    }
    Dataset::new(n_features, features, labels, split)
}

/// Keeps rows labelled 0 or 1 (the first two classes of the source labelling),
/// preserving order.
pub fn filter_first_two_classes(dataset: &Dataset) -> Result<Dataset> {
    let has = |c| dataset.labels.contains(&c);
    if !(has(0) && has(1)) {
        return Err(Error::Dataset("classes 0 and 1 must both be present".into()));
    }
    let keep: Vec<usize> = (0..dataset.len()).filter(|&i| dataset.labels[i] <= 1).collect();
    Ok(dataset.select(&keep))
}

/// Renders `dataset` in the CSV grammar. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn to_csv_string(dataset: &Dataset) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("label");
    for j in 0..dataset.n_features {
        let _ = write!(out, ",f{j}");
    }
    out.push('\n');
    for (row, label) in dataset.rows().zip(&dataset.labels) {
        let _ = write!(out, "{label}");
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_csv_string(dataset)).map_err(|e| Error::io(path, e))
}
