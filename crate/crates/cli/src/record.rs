//! Per-file statistics of a benchmark run and their CSV form.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use approxsmt::SolveOutcome;

pub const CSV_HEADER: [&str; 11] = [
    "file",
    "verdict",
    "iterations",
    "max_precision_reached",
    "fallback_used",
    "time_total_ms",
    "time_encode_ms",
    "time_backend_ms",
    "time_decode_ms",
    "time_reconstruct_ms",
    "time_refine_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub file: PathBuf,
    /// `sat`, `unsat`, `unknown`, or `error` when the file could not be run.
    pub verdict: String,
    pub iterations: usize,
    pub max_precision_reached: bool,
    pub fallback_used: bool,
    pub total: Duration,
    pub encode: Duration,
    pub backend: Duration,
    pub decode: Duration,
    pub reconstruct: Duration,
    pub refine: Duration,
}

impl RunRecord {
    pub fn from_outcome(file: PathBuf, outcome: &SolveOutcome) -> Self {
        let t = &outcome.stats.timings;
        RunRecord {
            file,
            verdict: outcome.verdict.name().to_string(),
            iterations: outcome.stats.iterations,
            max_precision_reached: outcome.stats.max_precision_reached,
            fallback_used: outcome.stats.fallback_used,
            total: outcome.stats.total,
            encode: t.encode,
            backend: t.backend,
            decode: t.decode,
            reconstruct: t.reconstruct,
            refine: t.refine,
        }
    }

    pub fn error(file: PathBuf) -> Self {
        RunRecord {
            file,
            verdict: "error".into(),
            iterations: 0,
            max_precision_reached: false,
            fallback_used: false,
            total: Duration::ZERO,
            encode: Duration::ZERO,
            backend: Duration::ZERO,
            decode: Duration::ZERO,
            reconstruct: Duration::ZERO,
            refine: Duration::ZERO,
        }
    }

    fn fields(&self) -> [String; 11] {
        let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1000.0);
        [
            self.file.display().to_string(),
            self.verdict.clone(),
            self.iterations.to_string(),
            self.max_precision_reached.to_string(),
            self.fallback_used.to_string(),
            ms(self.total),
            ms(self.encode),
            ms(self.backend),
            ms(self.decode),
            ms(self.reconstruct),
            ms(self.refine),
        ]
    }
}

/// Writes the header and one row per record, ordered by file path.
pub fn write_csv(records: &[RunRecord], out: impl Write) -> csv::Result<()> {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.file.cmp(&b.file));
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in sorted {
        writer.write_record(r.fields())?;
    }
    writer.flush()?;
    Ok(())
}
