use serde::Serialize;

use super::tasks::Payload;
use super::{CliError, RunConfig};
use crate::report::{CheckReport, Verdict};

/// Everything a run produces. Deterministic in (config, seed, version)
/// unless `wall_clock_s` was requested.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub task: &'static str,
    pub config: RunConfig,
    pub payload: Payload,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub exit_status: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_s: Option<f64>,
}

impl RunReport {
    pub fn new(config: RunConfig, payload: Payload, wall_clock_s: Option<f64>) -> Self {
        let task = config.task.as_ref().map_or("none", |t| t.name());
        let verdict = payload.verdict();
        Self {
            tool: "subell",
            version: env!("CARGO_PKG_VERSION"),
            task,
            config,
            verdict,
            exit_status: verdict.map_or(0, Verdict::exit_code),
            payload,
            wall_clock_s,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        match self.verdict {
            Some(v) => format!("{v:?}"),
            None => "done".into(),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn rung_table(w: &mut csv::Writer<Vec<u8>>, r: &CheckReport) -> csv::Result<()> {
    w.write_record(["rung", "r_lo", "r_hi", "evaluated", "excluded", "failures", "min_margin"])?;
    for s in &r.rungs {
        w.write_record([
            s.index.to_string(),
            num(s.r_lo),
            num(s.r_hi),
            s.evaluated.to_string(),
            s.excluded.to_string(),
            s.failures.to_string(),
            opt(s.min_margin),
        ])?;
    }
    Ok(())
}

fn write_table(w: &mut csv::Writer<Vec<u8>>, report: &RunReport) -> csv::Result<()> {
    match &report.payload {
        Payload::Describe(d) => {
            w.write_record(["name", "m", "d", "Q", "singular_set"])?;
            w.write_record([d.name.clone(), d.m.to_string(), d.d.to_string(), num(d.q), d.singular_set.clone()])?;
        }
        Payload::Residual(t) => {
            let mut header: Vec<String> = (1..=t.dimension).map(|i| format!("x{i}")).collect();
            header.extend(["rho".into(), "residual".into()]);
            w.write_record(&header)?;
            for row in &t.rows {
                let mut rec: Vec<String> = row.point.iter().copied().map(num).collect();
                rec.resize(t.dimension, String::new());
                rec.push(num(row.rho));
                rec.push(opt(row.residual));
                w.write_record(&rec)?;
            }
        }
        Payload::Growth(g) => {
            w.write_record(["r", "sup", "sup_scaled_q", "sup_scaled_nu"])?;
            for r in &g.rungs {
                w.write_record([num(r.r), num(r.sup), num(r.scaled_q), num(r.scaled_nu)])?;
            }
        }
        Payload::VerifyLyapunov(r) | Payload::Certify(r) => rung_table(w, r)?,
        Payload::Fundamental(f) => rung_table(w, &f.report)?,
        Payload::Check(c) => rung_table(w, &c.condition)?,
        Payload::Compare(c) => {
            w.write_record(["rung", "ratio_sup", "w_at_sup"])?;
            for (i, (s, wv)) in c.growth.ratio_sup.iter().zip(&c.growth.w_at_sup).enumerate() {
                w.write_record([i.to_string(), opt(*s), opt(*wv)])?;
            }
        }
    }
    Ok(())
}

/// The report's data as CSV: one row per rung or sample.
pub fn tabulate(report: &RunReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_table(&mut w, report).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
