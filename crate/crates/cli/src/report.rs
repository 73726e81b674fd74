//! Machine-readable reports: JSON on stdout (CSV tables with `--csv`),
//! human-readable summary on stderr.
//!
//! The stdout body is deterministic for a fixed (spec, flags, seed): timings
//! are kept out of it and only shown in the stderr summary.

use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Informational: reported but does not affect the exit status.
    Flagged,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn pass(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            status: CheckStatus::Pass,
            witness: None,
        }
    }

    pub fn fail(name: &str, witness: String) -> Self {
        CheckResult {
            name: name.to_string(),
            status: CheckStatus::Fail,
            witness: Some(witness),
        }
    }

    pub fn flagged(name: &str, witness: String) -> Self {
        CheckResult {
            name: name.to_string(),
            status: CheckStatus::Flagged,
            witness: Some(witness),
        }
    }

    pub fn of(name: &str, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass(name)
        } else {
            Self::fail(name, witness())
        }
    }
}

/// Row of the last-zero law table. Rationals are rendered as `"p"`/`"p/q"`.
#[derive(Debug, Clone, Serialize)]
pub struct LawRow {
    pub n: usize,
    pub e_p_x_n: String,
    pub q_g_n: String,
}

/// Row of the per-node decomposition table.
#[derive(Debug, Clone, Serialize)]
pub struct NodeRow {
    pub depth: usize,
    pub node: String,
    pub x: String,
    pub martingale: String,
    pub compensator: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct McSection {
    pub mode: &'static str,
    pub estimate: f64,
    pub std_error: f64,
    pub count: u64,
    pub seed: u64,
    pub streams: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_per_unit: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    /// Echo of the invocation (arguments after the program name).
    pub args: Vec<String>,
    pub spec_digest: String,
    pub kind: String,
    pub horizon: usize,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law_of_g: Option<Vec<LawRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_p_x_horizon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_free_mass: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process_table: Option<Vec<NodeRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSection>,
    pub warnings: Vec<String>,
    pub overall: CheckStatus,
    #[serde(skip)]
    pub timing_ms: u128,
}

impl Report {
    pub fn new(command: &'static str, spec_digest: String, kind: String, horizon: usize) -> Self {
        Report {
            command,
            args: std::env::args().skip(1).collect(),
            spec_digest,
            kind,
            horizon,
            checks: Vec::new(),
            law_of_g: None,
            e_p_x_horizon: None,
            zero_free_mass: None,
            process_table: None,
            mc: None,
            warnings: Vec::new(),
            overall: CheckStatus::Pass,
            timing_ms: 0,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        if check.status == CheckStatus::Fail {
            self.overall = CheckStatus::Fail;
        }
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.overall == CheckStatus::Pass
    }

    /// JSON body (or CSV tables with `csv`), written to stdout.
    pub fn emit_stdout(&self, csv: bool) {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        if csv {
            let _ = out.write_all(self.to_csv().as_bytes());
        } else {
            serde_json::to_writer_pretty(&mut out, self).expect("report serializes");
            let _ = out.write_all(b"\n");
        }
        let _ = out.flush();
    }

    /// CSV rendering of the report's main table, with a documented column
    /// order: law tables as `n,e_p_x_n,q_g_n`; decomposition tables as
    /// `depth,node,x,martingale,compensator`; estimates as one wide row.
    pub fn to_csv(&self) -> String {
        let mut text = String::new();
        if let Some(rows) = &self.law_of_g {
            text.push_str("n,e_p_x_n,q_g_n\n");
            for row in rows {
                text.push_str(&format!("{},{},{}\n", row.n, row.e_p_x_n, row.q_g_n));
            }
        } else if let Some(rows) = &self.process_table {
            text.push_str("depth,node,x,martingale,compensator\n");
            for row in rows {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.depth, row.node, row.x, row.martingale, row.compensator
                ));
            }
        } else if let Some(mc) = &self.mc {
            text.push_str("mode,estimate,std_error,count,seed,streams,target,z_score\n");
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                mc.mode,
                mc.estimate,
                mc.std_error,
                mc.count,
                mc.seed,
                mc.streams,
                mc.target.map_or(String::new(), |t| t.to_string()),
                mc.z_score.map_or(String::new(), |z| z.to_string()),
            ));
        }
        text
    }

    /// Human-readable summary, written to stderr.
    pub fn emit_stderr(&self) {
        eprintln!(
            "{} on {} (horizon {}), digest {}",
            self.command, self.kind, self.horizon, self.spec_digest
        );
        for check in &self.checks {
            let mark = match check.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Flagged => "NOTE",
            };
            match &check.witness {
                Some(w) => eprintln!("  [{mark}] {}: {w}", check.name),
                None => eprintln!("  [{mark}] {}", check.name),
            }
        }
        if let Some(rows) = &self.law_of_g {
            eprintln!("  n   E_P[X_n]   Q[g=n]");
            for row in rows {
                eprintln!("  {:<3} {:<10} {}", row.n, row.e_p_x_n, row.q_g_n);
            }
            if let Some(zf) = &self.zero_free_mass {
                eprintln!("  zero-free mass: {zf}");
            }
        }
        if let Some(mc) = &self.mc {
            eprintln!(
                "  {}: estimate {} +/- {} (count {}, seed {}, streams {})",
                mc.mode, mc.estimate, mc.std_error, mc.count, mc.seed, mc.streams
            );
            if let Some(target) = mc.target {
                eprintln!(
                    "  target {} | z {} | gap {}",
                    target,
                    mc.z_score.map_or("n/a".to_string(), |z| z.to_string()),
                    mc.gap.map_or("n/a".to_string(), |g| g.to_string()),
                );
            }
        }
        for warning in &self.warnings {
            eprintln!("  warning: {warning}");
        }
        eprintln!(
            "  overall: {} ({} ms)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.timing_ms
        );
    }
}

/// Emitted when the spec cannot be read or parsed at all.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_digest: Option<String>,
    pub error: String,
}

impl ErrorReport {
    pub fn emit(&self) {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        serde_json::to_writer_pretty(&mut out, self).expect("error report serializes");
        let _ = out.write_all(b"\n");
        let _ = out.flush();
        eprintln!("{}: error: {}", self.command, self.error);
    }
}
