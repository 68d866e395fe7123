//! Report writers: CSV, JSON, and Markdown renderings of benchmark output.
//!
//! All writers are pure string builders, so identical inputs produce
//! byte-identical reports.

use serde::Serialize;

use super::{BenchResult, EvalError, PlotPoint};
use crate::efficiency::EfficiencyReport;

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String, EvalError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().expect("writing to a Vec cannot fail");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One line per (method, level) result, headers from the field names.
pub fn results_csv(results: &[BenchResult]) -> Result<String, EvalError> {
    csv_string(results)
}

/// One line per level comparing the skew and scaled widths.
pub fn efficiency_csv(reports: &[EfficiencyReport]) -> Result<String, EvalError> {
    csv_string(reports)
}

/// One line per plotted test-row interval; `center` is empty for the
/// quantile-band method.
pub fn plot_points_csv(points: &[PlotPoint]) -> Result<String, EvalError> {
    csv_string(points)
}

#[derive(Serialize)]
struct JsonReport<'a> {
    results: &'a [BenchResult],
    efficiency: &'a [EfficiencyReport],
}

/// The result and efficiency rows as one pretty-printed JSON document.
pub fn results_json(
    results: &[BenchResult],
    efficiency: &[EfficiencyReport],
) -> Result<String, EvalError> {
    let mut out = serde_json::to_string_pretty(&JsonReport {
        results,
        efficiency,
    })?;
    out.push('\n');
    Ok(out)
}

/// The result and efficiency rows as Markdown pipe tables.
pub fn markdown_tables(results: &[BenchResult], efficiency: &[EfficiencyReport]) -> String {
    let mut out = String::new();
    out.push_str("## Results\n\n");
    out.push_str("| dataset | method | alpha | coverage | avg width | r_hat | n_calib | n_test |\n");
    out.push_str("|---|---|---|---|---|---|---|---|\n");
    for r in results {
        out.push_str(&format!(
            "| {} | {} | {} | {:.4} | {:.4} | {:.4} | {} | {} |\n",
            r.dataset_id,
            r.method,
            r.alpha,
            r.empirical_coverage,
            r.avg_length,
            r.r_hat,
            r.n_calib,
            r.n_test
        ));
    }
    if !efficiency.is_empty() {
        out.push_str("\n## Width efficiency (skew vs scaled)\n\n");
        out.push_str("| alpha | phi_hat | test avg ratio | abs difference |\n");
        out.push_str("|---|---|---|---|\n");
        for e in efficiency {
            out.push_str(&format!(
                "| {} | {:.4} | {:.4} | {:.4} |\n",
                e.alpha, e.phi_hat, e.test_avg_ratio, e.abs_difference
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::Method;

    fn result() -> BenchResult {
        BenchResult {
            dataset_id: "synthetic".into(),
            method: Method::Skew,
            alpha: 0.1,
            empirical_coverage: 0.9,
            avg_length: 2.5,
            r_hat: 1.25,
            n_calib: 100,
            k_index: 91,
            n_test: 50,
            seed: 7,
        }
    }

    fn efficiency() -> EfficiencyReport {
        EfficiencyReport {
            alpha: 0.1,
            phi_hat: 0.9,
            test_avg_ratio: 0.91,
            abs_difference: 0.01,
            r_hat_skew: 1.0,
            r_hat_scaled: 1.1,
            n_calib: 100,
            n_test: 50,
        }
    }

    #[test]
    fn results_rows_serialize_with_headers() {
        let csv = results_csv(&[result()]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "dataset_id,method,alpha,empirical_coverage,avg_length,r_hat,n_calib,k_index,n_test,seed"
        );
        assert_eq!(
            lines.next().unwrap(),
            "synthetic,skew,0.1,0.9,2.5,1.25,100,91,50,7"
        );
        assert!(lines.next().is_none());
    }

    #[test]
    fn efficiency_rows_serialize_with_headers() {
        let csv = efficiency_csv(&[efficiency()]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "alpha,phi_hat,test_avg_ratio,abs_difference,r_hat_skew,r_hat_scaled,n_calib,n_test"
        );
        assert_eq!(lines.next().unwrap(), "0.1,0.9,0.91,0.01,1.0,1.1,100,50");
    }

    #[test]
    fn plot_points_leave_missing_centers_empty() {
        let points = [
            PlotPoint {
                row: 0,
                method: Method::Cqr,
                alpha: 0.1,
                lo: -1.0,
                hi: 1.0,
                center: None,
                y: 0.5,
            },
            PlotPoint {
                row: 1,
                method: Method::Skew,
                alpha: 0.1,
                lo: 0.0,
                hi: 2.0,
                center: Some(0.75),
                y: 1.5,
            },
        ];
        let csv = plot_points_csv(&points).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "row,method,alpha,lo,hi,center,y");
        assert_eq!(lines.next().unwrap(), "0,cqr,0.1,-1.0,1.0,,0.5");
        assert_eq!(lines.next().unwrap(), "1,skew,0.1,0.0,2.0,0.75,1.5");
    }

    #[test]
    fn json_report_round_trips() {
        let json = results_json(&[result()], &[efficiency()]).unwrap();
        assert!(json.ends_with('\n'));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["results"][0]["method"], "skew");
        assert_eq!(value["results"][0]["alpha"], 0.1);
        assert_eq!(value["efficiency"][0]["phi_hat"], 0.9);
    }

    #[test]
    fn markdown_renders_both_tables() {
        let md = markdown_tables(&[result()], &[efficiency()]);
        assert!(md.contains("## Results"));
        assert!(md.contains("| synthetic | skew | 0.1 | 0.9000 | 2.5000 | 1.2500 | 100 | 50 |"));
        assert!(md.contains("## Width efficiency"));
        assert!(md.contains("| 0.1 | 0.9000 | 0.9100 | 0.0100 |"));
        let empty = markdown_tables(&[], &[]);
        assert!(empty.contains("## Results"));
        assert!(!empty.contains("efficiency"));
    }
}
