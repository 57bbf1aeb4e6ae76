//! The figure-reproduction configurations shipped in `configs/`, embedded
//! so `reproduce` works from any working directory.

use crate::error::CliError;

pub const FIGURES: &[&str] = &["fig1", "fig2", "fig3", "fig4a", "fig4b"];

pub fn shipped_config(name: &str) -> Result<&'static str, CliError> {
    match name {
        "fig1" => Ok(include_str!("../../../configs/fig1.conf")),
        "fig2" => Ok(include_str!("../../../configs/fig2.conf")),
        "fig3" => Ok(include_str!("../../../configs/fig3.conf")),
        "fig4a" => Ok(include_str!("../../../configs/fig4a.conf")),
        "fig4b" => Ok(include_str!("../../../configs/fig4b.conf")),
        other => Err(CliError::ConfigParse(format!(
            "unknown figure '{other}' (expected one of {})",
            FIGURES.join(", ")
        ))),
    }
}
