//! Parameter sweeps: re-run the scalar outputs of a base configuration
//! over a list of values for one numeric key. Points run concurrently up
//! to the requested job limit; output rows keep the input order, and a
//! failed point is recorded in its error column without stopping the rest.

use rayon::prelude::*;

use crate::config::{with_override, OutputSpec};
use crate::csvfmt::sig12;
use crate::error::CliError;
use crate::runner::{compute_scalars, scalar_row};

pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SweepTable {
    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Run the sweep. The scalar columns are fixed by the base config's
/// requested outputs so every row has the same shape.
pub fn sweep(
    base_text: &str,
    axis: &str,
    values: &[f64],
    jobs: usize,
) -> Result<SweepTable, CliError> {
    // validate the base config and derive the column set
    let base = crate::config::parse(base_text)?;
    let mut columns: Vec<&str> = Vec::new();
    if base.outputs.contains(&OutputSpec::Cfi) {
        columns.push("cfi");
        columns.push("delta_lambda_rad_per_s");
    }
    if base.outputs.contains(&OutputSpec::Qfi) {
        columns.push("qfi");
    }
    if base.outputs.contains(&OutputSpec::Spin) {
        columns.push("fit_freq_over_2pi_khz");
    }
    if columns.is_empty() {
        return Err(CliError::ConfigParse(
            "sweep needs at least one scalar output (cfi, qfi or spin) in the config".into(),
        ));
    }
    // the axis must be valid for every value; probe the first one early
    if let Some(&first) = values.first() {
        with_override(base_text, axis, first)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;

    let results: Vec<Result<Vec<String>, String>> = pool.install(|| {
        values
            .par_iter()
            .map(|&value| {
                let point = with_override(base_text, axis, value).map_err(|e| e.to_string())?;
                let scalars = compute_scalars(&point).map_err(|e| e.to_string())?;
                Ok(scalar_row(value, &scalars, &columns))
            })
            .collect()
    });

    let mut header: Vec<String> = vec![axis.to_string()];
    header.extend(columns.iter().map(|c| c.to_string()));
    header.push("error".to_string());

    let rows = results
        .into_iter()
        .zip(values)
        .map(|(res, &value)| match res {
            Ok(row) => row,
            Err(msg) => {
                let mut row = vec![sig12(value)];
                row.extend(std::iter::repeat_n(String::new(), columns.len()));
                // keep the CSV single-line and comma-free
                row.push(msg.replace([',', '\n'], ";"));
                row
            }
        })
        .collect();

    Ok(SweepTable { header, rows })
}
