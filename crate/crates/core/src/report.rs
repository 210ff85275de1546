//! Serialising experiment results: JSON, flat CSV and the claim table.

use std::io::Write;

use serde::Serialize;

use crate::entropy::EntropyReport;
use crate::error::Result;
use crate::experiment::{run_config, ConfigFile, RunOptions};

/// Configs shipped with the crate, in run order.
pub const BUNDLED: &[(&str, &str)] = &[
    ("paper-vacuum", include_str!("../configs/paper-vacuum.toml")),
    ("paper-single-twist", include_str!("../configs/paper-single-twist.toml")),
    ("paper-twist-placements", include_str!("../configs/paper-twist-placements.toml")),
    ("paper-two-twist-annulus", include_str!("../configs/paper-two-twist-annulus.toml")),
    ("paper-four-twist-z", include_str!("../configs/paper-four-twist-z.toml")),
    ("paper-four-twist-x", include_str!("../configs/paper-four-twist-x.toml")),
    ("fermion-pair", include_str!("../configs/fermion-pair.toml")),
    ("anyon-strings", include_str!("../configs/anyon-strings.toml")),
    ("oracle-small", include_str!("../configs/oracle-small.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".toml").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Runs every bundled config.
pub fn reproduce(opts: &RunOptions) -> Result<Vec<EntropyReport>> {
    let mut out = Vec::new();
    for (name, text) in BUNDLED {
        let file = ConfigFile::parse(text, &format!("bundled:{name}"))?;
        out.extend(run_config(&file, opts)?);
    }
    Ok(out)
}

pub fn write_json<W: Write>(reports: &[EntropyReport], mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, reports)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment: &'a str,
    region: String,
    size: Option<usize>,
    boundary_length: Option<usize>,
    entropy_bits: Option<usize>,
    combination: String,
    value: Option<String>,
    expected: Option<String>,
    pass: Option<bool>,
}

impl<'a> CsvRow<'a> {
    fn blank(experiment: &'a str) -> Self {
        Self {
            experiment,
            region: String::new(),
            size: None,
            boundary_length: None,
            entropy_bits: None,
            combination: String::new(),
            value: None,
            expected: None,
            pass: None,
        }
    }
}

/// One row per region, per combination value, per derived dimension and per check.
pub fn write_csv<W: Write>(reports: &[EntropyReport], w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for r in reports {
        let e = r.experiment.as_str();
        for reg in &r.regions {
            csv.serialize(CsvRow {
                region: reg.label.clone(),
                size: Some(reg.size),
                boundary_length: Some(reg.boundary_length),
                entropy_bits: Some(reg.entropy_bits),
                expected: reg.expected.map(|x| x.to_string()),
                pass: reg.pass,
                ..CsvRow::blank(e)
            })?;
        }
        for c in &r.combinations {
            for reg in &c.regions {
                csv.serialize(CsvRow {
                    region: format!("{}/{}", c.partition, reg.label),
                    size: Some(reg.size),
                    boundary_length: Some(reg.boundary_length),
                    entropy_bits: Some(reg.entropy_bits),
                    combination: c.partition.clone(),
                    ..CsvRow::blank(e)
                })?;
            }
            let kind = match c.kind {
                crate::regions::PartitionKind::Tripartite => "s_topo",
                crate::regions::PartitionKind::Annular => "s_ann",
            };
            csv.serialize(CsvRow {
                combination: format!("{}:{kind}", c.partition),
                value: Some(c.value.to_string()),
                expected: c.expected.map(|x| x.to_string()),
                pass: c.pass,
                ..CsvRow::blank(e)
            })?;
            if let Some(d) = c.quantum_dimension {
                csv.serialize(CsvRow {
                    combination: format!("{}:dimension", c.partition),
                    value: Some(format!("{d:.12}")),
                    expected: c.expected_dimension.map(|x| format!("{x:.12}")),
                    pass: c.expected_dimension.map(|x| (x - d).abs() < 1e-9),
                    ..CsvRow::blank(e)
                })?;
            }
        }
        if let Some(fit) = &r.area_law {
            csv.serialize(CsvRow {
                combination: "area_law:slope".into(),
                value: Some(fit.slope.to_string()),
                pass: Some(fit.pass),
                ..CsvRow::blank(e)
            })?;
            csv.serialize(CsvRow {
                combination: "area_law:intercept".into(),
                value: Some(fit.intercept.to_string()),
                pass: Some(fit.pass),
                ..CsvRow::blank(e)
            })?;
        }
        for c in &r.checks {
            csv.serialize(CsvRow {
                combination: format!("check:{}", c.name),
                value: Some(c.detail.clone()),
                pass: Some(c.passed),
                ..CsvRow::blank(e)
            })?;
        }
    }
    csv.flush()?;
    Ok(())
}

/// Aggregated status of one numbered claim.
#[derive(Clone, Debug, Serialize)]
pub struct ClaimRow {
    pub criterion: u8,
    pub title: &'static str,
    pub checks: usize,
    pub failed: Vec<String>,
    pub evidence: Vec<String>,
}

impl ClaimRow {
    pub fn passed(&self) -> bool {
        self.checks > 0 && self.failed.is_empty()
    }
}

pub const CLAIMS: &[(u8, &str)] = &[
    (1, "vacuum area law S = L/2 - 1"),
    (2, "one enclosed twist: S = L/2 - 1/2"),
    (3, "S_topo = -1 for the vacuum and every twist placement"),
    (4, "S_ann: vacuum -2, two twists -1, four twists -2 (Z-bar, both signs) or -1 (X-bar)"),
    (5, "quantum dimensions from S_ann and fusion-table predictions"),
    (6, "a dyon pair across the annulus changes no entropy; S_ann stays -2"),
    (7, "canonical-form pair counts equal rank entropies"),
    (8, "dense oracle matches rank entropies with flat spectra"),
    (9, "commuting generators, pure completions, string transmutation"),
];

/// Claims whose individual measurements are listed in the rendered table.
const ITEMISED: u8 = 6;

pub fn claim_table(reports: &[EntropyReport]) -> Vec<ClaimRow> {
    CLAIMS
        .iter()
        .map(|&(criterion, title)| {
            let mut row = ClaimRow { criterion, title, checks: 0, failed: Vec::new(), evidence: Vec::new() };
            for r in reports {
                for c in r.checks.iter().filter(|c| c.criterion == Some(criterion)) {
                    row.checks += 1;
                    let line = format!("{}: {} ({})", r.experiment, c.name, c.detail);
                    if c.passed {
                        row.evidence.push(line);
                    } else {
                        row.failed.push(line);
                    }
                }
            }
            row
        })
        .collect()
}

pub fn render_claims(rows: &[ClaimRow]) -> String {
    let mut s = String::new();
    for row in rows {
        let status = if row.passed() { "PASS" } else { "FAIL" };
        let ok = row.checks - row.failed.len();
        s.push_str(&format!("[{status}] {}. {} ({ok}/{} checks)\n", row.criterion, row.title, row.checks));
        if row.criterion <= ITEMISED {
            for e in &row.evidence {
                s.push_str(&format!("    {e}\n"));
            }
        }
        for f in &row.failed {
            s.push_str(&format!("    FAILED {f}\n"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_parse() {
        for (name, text) in BUNDLED {
            ConfigFile::parse(text, name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(bundled("paper-vacuum.toml").is_some());
        assert!(bundled("nope").is_none());
    }

    #[test]
    fn empty_claim_fails() {
        let rows = claim_table(&[]);
        assert_eq!(rows.len(), 9);
        assert!(rows.iter().all(|r| !r.passed()));
    }
}
