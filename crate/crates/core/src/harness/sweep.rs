use std::fmt::Write as _;

use super::config::PipelineConfig;
use super::pipeline::run_pipeline;
use crate::corpus::Dataset;
use crate::metrics::MetricsReport;
use crate::par;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub config: PipelineConfig,
    pub report: MetricsReport,
}

/// Sweep results, best F1 first.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    /// Tab-separated table with one row per configuration.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("rank\tf1\tprecision\trecall\tmacro_f1\tconfig\n");
        for (rank, e) in self.entries.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                rank + 1,
                e.report.f1,
                e.report.precision,
                e.report.recall,
                e.report.macro_f1,
                e.config.to_json()
            )
            .unwrap();
        }
        out
    }

    pub fn best(&self) -> Option<&SweepEntry> {
        self.entries.first()
    }
}

/// Runs every configuration against the same split. Configurations run in
/// parallel; the ranking depends only on scores and config JSON.
pub fn sweep(train: &Dataset, eval: &Dataset, configs: &[PipelineConfig]) -> Result<SweepResult> {
    let reports = par::map(configs, |cfg| run_pipeline(train, eval, cfg));
    let mut entries = Vec::with_capacity(configs.len());
    for (config, report) in configs.iter().zip(reports) {
        entries.push(SweepEntry {
            config: config.clone(),
            report: report?,
        });
    }
    let mut keyed: Vec<(String, SweepEntry)> = entries
        .into_iter()
        .map(|e| (e.config.to_json(), e))
        .collect();
    keyed.sort_by(|a, b| {
        b.1.report
            .f1
            .total_cmp(&a.1.report.f1)
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(SweepResult {
        entries: keyed.into_iter().map(|(_, e)| e).collect(),
    })
}
