//! File output helpers: atomic writes and dataset CSV rendering.

use std::io::Write;
use std::path::Path;

use skewconf_core::data::Dataset;

use crate::error::AppError;

/// Writes a file via a sibling temporary file plus rename, so a failed run
/// never leaves a partial artifact behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), AppError> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| AppError::io(format!("creating a temporary file in {}", dir.display()), e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| AppError::io(format!("writing {}", path.display()), e))?;
    tmp.persist(path)
        .map_err(|e| AppError::io(format!("writing {}", path.display()), e.error))?;
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| AppError::io(format!("creating directory {}", dir.display()), e))
}

/// Renders a dataset as CSV with the response in a final `y` column — the
/// same layout the `bench` subcommand ingests by default. Floats use the
/// shortest representation that parses back to the same value, so the
/// round trip is exact.
pub fn dataset_to_csv(data: &Dataset) -> Result<String, AppError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.push("y");
    writer
        .write_record(&header)
        .map_err(|e| AppError::Config(format!("rendering csv header: {e}")))?;
    let mut record = Vec::with_capacity(header.len());
    for i in 0..data.n_rows() {
        record.clear();
        for value in data.feature_row(i) {
            record.push(value.to_string());
        }
        record.push(data.response()[i].to_string());
        writer
            .write_record(&record)
            .map_err(|e| AppError::Config(format!("rendering csv row {i}: {e}")))?;
    }
    let bytes = writer.into_inner().expect("writing to a Vec cannot fail");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Human-readable label for a dataset path: the file name when there is
/// one, the whole path otherwise.
pub fn dataset_label(path: &Path) -> String {
    path.file_name()
        .map(|name| name.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn dataset_csv_has_features_then_response() {
        let data = Dataset::new(
            array![[0.25, 1.0], [0.5, 2.0]],
            vec![3.5, -0.125],
            vec!["x1".into(), "x2".into()],
        )
        .unwrap();
        let csv = dataset_to_csv(&data).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,y");
        assert_eq!(lines.next().unwrap(), "0.25,1,3.5");
        assert_eq!(lines.next().unwrap(), "0.5,2,-0.125");
        assert!(lines.next().is_none());
    }

    #[test]
    fn atomic_write_replaces_the_target() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn labels_prefer_the_file_name() {
        assert_eq!(dataset_label(Path::new("/a/b/data.csv")), "data.csv");
        assert_eq!(dataset_label(Path::new("data.csv")), "data.csv");
    }
}
