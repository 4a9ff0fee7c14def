//! Report records and emission (JSON, fixed-width table, CSV).
//!
//! Reports are byte-stable for a fixed seed and config: record order is
//! deterministic, floats use fixed formatting, and the environment stamp
//! carries no timestamps.

use crate::catalog::{Adjudication, CheckRecord, EntryReport, ManifestEntry};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize)]
pub struct EnvStamp {
    pub version: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub jobs: usize,
}

impl EnvStamp {
    pub fn new(seed: u64, tol_scale: f64, jobs: usize) -> Self {
        EnvStamp {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            tol_scale,
            jobs,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub title: String,
    pub profile: String,
    pub stamp: EnvStamp,
    pub checks: Vec<CheckRecord>,
    pub entries: Vec<EntryReport>,
    pub adjudications: Vec<Adjudication>,
    pub skipped: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub manifest: Vec<ManifestEntry>,
}

impl Report {
    pub fn new(title: &str, profile: &str, stamp: EnvStamp) -> Self {
        Report {
            title: title.into(),
            profile: profile.into(),
            stamp,
            checks: Vec::new(),
            entries: Vec::new(),
            adjudications: Vec::new(),
            skipped: Vec::new(),
            notes: Vec::new(),
            manifest: Vec::new(),
        }
    }

    pub fn counts(&self) -> (usize, usize) {
        let mut pass = 0;
        let mut fail = 0;
        for c in &self.checks {
            if c.pass {
                pass += 1;
            } else {
                fail += 1;
            }
        }
        for e in &self.entries {
            for c in &e.checks {
                if c.pass {
                    pass += 1;
                } else {
                    fail += 1;
                }
            }
        }
        for a in &self.adjudications {
            if a.exactly_one {
                pass += 1;
            } else {
                fail += 1;
            }
        }
        (pass, fail)
    }

    pub fn pass(&self) -> bool {
        self.counts().1 == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} ==", self.title);
        let _ = writeln!(out, "profile: {}", self.profile);
        let _ = writeln!(
            out,
            "version {}  seed {}  tol-scale {}  jobs {}",
            self.stamp.version, self.stamp.seed, self.stamp.tol_scale, self.stamp.jobs
        );
        if !self.checks.is_empty() {
            let _ = writeln!(out);
            for c in &self.checks {
                let _ = writeln!(out, "{}", render_check(c, ""));
            }
        }
        for e in &self.entries {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "[{}] {}  {}",
                if e.pass { "PASS" } else { "FAIL" },
                e.id,
                e.family
            );
            let _ = writeln!(out, "       ref: {}", e.reference);
            if !e.params.is_empty() {
                let ps: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(out, "       params: {}", ps.join(", "));
            }
            for c in &e.checks {
                let _ = writeln!(out, "{}", render_check(c, "  "));
            }
            if let Some(v) = &e.verdict {
                let _ = writeln!(
                    out,
                    "       verdict: tg={} parallel={} codazzi={} semi_parallel={} minimal={} cmc={} causal={} mean_curv={:+.6e}",
                    v.totally_geodesic,
                    v.parallel,
                    v.codazzi,
                    v.semi_parallel,
                    v.minimal,
                    v.cmc,
                    v.causal.label(),
                    v.mean_curvature
                );
            }
            for n in &e.notes {
                let _ = writeln!(out, "       note: {n}");
            }
        }
        for a in &self.adjudications {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "[{}] adjudication {}: {}",
                if a.exactly_one { "PASS" } else { "FAIL" },
                a.id,
                a.topic
            );
            for v in &a.variants {
                let _ = writeln!(
                    out,
                    "  [{}] {}  residual {:.6e} vs {:.1e}  ({})",
                    if v.pass { "pass" } else { "fail" },
                    v.name,
                    v.residual,
                    v.threshold,
                    v.certificate
                );
            }
            match &a.chosen {
                Some(c) => {
                    let _ = writeln!(out, "  chosen: {c}");
                }
                None => {
                    let _ = writeln!(out, "  chosen: none (zero or multiple variants pass)");
                }
            }
            for n in &a.notes {
                let _ = writeln!(out, "  note: {n}");
            }
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "not applicable on this profile:");
            for (id, reason) in &self.skipped {
                let _ = writeln!(out, "  {id}: {reason}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let (pass, fail) = self.counts();
        let _ = writeln!(out);
        let _ = writeln!(out, "summary: {pass} passed, {fail} failed");
        out
    }
}

fn render_check(c: &CheckRecord, indent: &str) -> String {
    format!(
        "{indent}[{}] {:<44} residual {:>12.6e} vs {:>8.1e}  ({})",
        if c.pass { "PASS" } else { "FAIL" },
        c.name,
        c.residual,
        c.threshold,
        c.reference
    )
}

/// One row of a parameter scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub entry: String,
    pub param: String,
    pub value: f64,
    pub max_h: Option<f64>,
    pub max_nabla_h: Option<f64>,
    pub max_rm: Option<f64>,
    pub tr_h_abs: Option<f64>,
    pub tr_h_variation: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub pass: Option<bool>,
    pub error: String,
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(
        "entry,param,value,max_h,max_nabla_h,max_rm,tr_h_abs,tr_h_variation,mean_curvature,pass,error\n",
    );
    let fmt = |v: Option<f64>| match v {
        Some(x) => format!("{x:.9e}"),
        None => String::new(),
    };
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.9e},{},{},{},{},{},{},{},{}",
            r.entry,
            r.param,
            r.value,
            fmt(r.max_h),
            fmt(r.max_nabla_h),
            fmt(r.max_rm),
            fmt(r.tr_h_abs),
            fmt(r.tr_h_variation),
            fmt(r.mean_curvature),
            r.pass.map(|b| b.to_string()).unwrap_or_default(),
            r.error.replace(',', ";"),
        );
    }
    out
}
