use std::path::{Path, PathBuf};

use mechlab::model::PayoffReport;

use crate::error::CliError;

/// 17 significant digits; round-trips any f64 exactly.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fixed six decimals for human-facing tables.
pub fn fmt_table(x: f64) -> String {
    format!("{x:.6}")
}

fn quantity_rows(report: &PayoffReport) -> Vec<(String, f64, f64)> {
    let mut rows = vec![(
        "seller_payoff".to_string(),
        report.seller_payoff.value,
        report.seller_payoff.std_error,
    )];
    for (i, estimate) in report.bidder_payoffs.iter().enumerate() {
        rows.push((
            format!("bidder_{}_payoff", i + 1),
            estimate.value,
            estimate.std_error,
        ));
    }
    rows
}

fn render_csv(report: &PayoffReport) -> String {
    let mut csv = String::from("name,estimate,stderr,replications,seed\n");
    for (name, estimate, stderr) in quantity_rows(report) {
        csv.push_str(&format!(
            "{name},{},{},{},{}\n",
            fmt_g17(estimate),
            fmt_g17(stderr),
            report.replications,
            report.seed
        ));
    }
    csv
}

// The JSON mirror is rendered by hand so numbers keep the same 17-digit form
// as the CSV and the bytes never depend on serializer internals.
fn render_json(report: &PayoffReport) -> String {
    let mut json = String::from("{\n");
    json.push_str(&format!(
        "  \"control_value\": {},\n",
        fmt_g17(report.control_value)
    ));
    json.push_str(&format!("  \"replications\": {},\n", report.replications));
    json.push_str(&format!("  \"seed\": {},\n", report.seed));
    json.push_str("  \"quantities\": [\n");
    let rows = quantity_rows(report);
    for (i, (name, estimate, stderr)) in rows.iter().enumerate() {
        let comma = if i + 1 < rows.len() { "," } else { "" };
        json.push_str(&format!(
            "    {{\"name\": \"{name}\", \"estimate\": {}, \"stderr\": {}, \
             \"replications\": {}, \"seed\": {}}}{comma}\n",
            fmt_g17(*estimate),
            fmt_g17(*stderr),
            report.replications,
            report.seed
        ));
    }
    json.push_str("  ]\n}\n");
    json
}

/// Writes `<stem>.csv` and `<stem>.json` side by side, creating parent
/// directories as needed. Returns the two paths.
pub fn write_reports(stem: &Path, report: &PayoffReport) -> Result<(PathBuf, PathBuf), CliError> {
    if let Some(parent) = stem.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let csv_path = stem.with_extension("csv");
    let json_path = stem.with_extension("json");
    std::fs::write(&csv_path, render_csv(report))?;
    std::fs::write(&json_path, render_json(report))?;
    Ok((csv_path, json_path))
}
