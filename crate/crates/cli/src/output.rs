//! Table and manifest formatting for the sweep command.
//!
//! Numbers are rendered with 12 significant digits and a lowercase `e`
//! exponent so that CSV and JSON files carry identical values and diff
//! cleanly across runs.

use std::fmt::Write as _;

/// One sweep result at a fixed frame parameter.
pub struct SweepRow {
    pub p: f64,
    pub min_pt_eigenvalue: f64,
    pub negativity: f64,
    pub frame_separable: bool,
    pub siv_closed_form: f64,
    pub siv_minimizer: f64,
}

/// Reproducibility block attached to JSON output.
pub struct Manifest {
    pub seed: u64,
    pub timestamp_unix_s: Option<u64>,
}

/// 12 significant digits, lowercase exponent.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub const CSV_HEADER: &str =
    "p,min_pt_eigenvalue,negativity,frame_separable,siv_closed_form,siv_minimizer";

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt12(row.p),
            fmt12(row.min_pt_eigenvalue),
            fmt12(row.negativity),
            fmt_bool(row.frame_separable),
            fmt12(row.siv_closed_form),
            fmt12(row.siv_minimizer),
        );
    }
    out
}

pub fn to_json(rows: &[SweepRow], manifest: &Manifest) -> String {
    let mut out = String::from("{\n  \"manifest\": {\n");
    let _ = writeln!(out, "    \"artifact_version\": \"{}\",", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "    \"seed\": {},", manifest.seed);
    out.push_str("    \"tolerances\": {\n");
    let _ = writeln!(
        out,
        "      \"entangled_eig_threshold\": {},",
        fmt12(dualent::ENTANGLED_EIG_THRESHOLD)
    );
    let _ = writeln!(out, "      \"structural\": {},", fmt12(dualent::STRUCTURAL_TOL));
    let _ = writeln!(out, "      \"spectral\": {},", fmt12(dualent::SPECTRAL_TOL));
    let _ = writeln!(out, "      \"minimizer_tol\": {}", fmt12(1e-8));
    out.push_str("    },\n");
    out.push_str("    \"siv_closed_form_convention\": \"unnormalized\",\n");
    if let Some(ts) = manifest.timestamp_unix_s {
        out.push_str("    \"siv_minimizer_convention\": \"factor_four\",\n");
        let _ = writeln!(out, "    \"timestamp_unix_s\": {ts}");
    } else {
        out.push_str("    \"siv_minimizer_convention\": \"factor_four\"\n");
    }
    out.push_str("  },\n  \"rows\": [\n");
    for (i, row) in rows.iter().enumerate() {
        let _ = write!(
            out,
            "    {{\"p\": {}, \"min_pt_eigenvalue\": {}, \"negativity\": {}, \
             \"frame_separable\": {}, \"siv_closed_form\": {}, \"siv_minimizer\": {}}}",
            fmt12(row.p),
            fmt12(row.min_pt_eigenvalue),
            fmt12(row.negativity),
            fmt_bool(row.frame_separable),
            fmt12(row.siv_closed_form),
            fmt12(row.siv_minimizer),
        );
        out.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt12_has_twelve_significant_digits() {
        assert_eq!(fmt12(0.2), "2.00000000000e-1");
        assert_eq!(fmt12(-0.05), "-5.00000000000e-2");
        assert_eq!(fmt12(0.0), "0.00000000000e0");
        assert_eq!(fmt12(1.0 / 3.0), "3.33333333333e-1");
    }

    #[test]
    fn csv_and_json_share_values() {
        let rows = vec![SweepRow {
            p: 0.2,
            min_pt_eigenvalue: -0.05,
            negativity: 0.05,
            frame_separable: true,
            siv_closed_form: 1.0 / 60.0,
            siv_minimizer: 4.0 / 60.0,
        }];
        let csv = to_csv(&rows);
        let json = to_json(&rows, &Manifest { seed: 42, timestamp_unix_s: None });
        for token in ["2.00000000000e-1", "-5.00000000000e-2", "1.66666666667e-2", "true"] {
            assert!(csv.contains(token), "csv missing {token}");
            assert!(json.contains(token), "json missing {token}");
        }
        assert!(csv.starts_with(CSV_HEADER));
    }
}
