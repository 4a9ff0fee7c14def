//! Command implementations behind the CLI: geometry verification, catalog
//! certification, parameter scans, and normal-tuple classification.

use crate::catalog::{
    self, adjudicate_beta_form, adjudicate_plane_signs, adjudicate_ruled_tg, catalog_enumerate,
    certify, CheckRecord,
};
use crate::error::{GeoError, Result};
use crate::geometry::{
    bianchi_residual, bracket_residual, connection_oracle_gap, curvature_oracle_gap,
    metric_compat_residual, reject_trivial, torsion_residual,
};
use crate::hypersurfaces::{classify_normal_tuple, Causal, Engine, Tolerances, UBox};
use crate::profiles::{linspace, parse_profile_spec, ProfilePair};
use crate::report::{EnvStamp, Report, ScanRow};
use rayon::prelude::*;
use serde::Deserialize;

/// Grid spec `start:stop:count`.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn parse(src: &str) -> Result<GridSpec> {
        let parts: Vec<&str> = src.split(':').collect();
        if parts.len() != 3 {
            return Err(GeoError::Config(format!(
                "grid spec `{src}` must be start:stop:count"
            )));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| GeoError::Config(format!("bad grid start in `{src}`")))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| GeoError::Config(format!("bad grid stop in `{src}`")))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| GeoError::Config(format!("bad grid count in `{src}`")))?;
        if count == 0 || !(stop > start) {
            return Err(GeoError::Config(format!(
                "grid spec `{src}` needs stop > start and count > 0"
            )));
        }
        Ok(GridSpec { start, stop, count })
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

/// Resolved run configuration. A JSON config file provides defaults; every
/// field is overridable on the command line (command line wins).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub profile: String,
    pub r: GridSpec,
    pub grid_n: usize,
    /// Optional evaluation-box override: centered axes of each family's
    /// default box are shrunk to these extents, and the counts set the
    /// classification resolution.
    pub ubox: Option<[GridSpec; 3]>,
    pub tol: Tolerances,
    pub entries: Option<Vec<String>>,
    pub seed: u64,
    pub jobs: usize,
    pub tol_scale: f64,
}

impl RunConfig {
    pub fn profile(&self) -> Result<ProfilePair> {
        parse_profile_spec(&self.profile)
    }

    pub fn stamp(&self) -> EnvStamp {
        EnvStamp::new(self.seed, self.tol_scale, self.jobs)
    }

    pub fn entry_selected(&self, id: &str) -> bool {
        match &self.entries {
            None => true,
            Some(list) => list.iter().any(|e| id.starts_with(e.as_str())),
        }
    }
}

/// The JSON config file shape (all fields optional).
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub profile: Option<String>,
    pub r: Option<String>,
    #[serde(rename = "box")]
    pub ubox: Option<String>,
    pub grid_n: Option<usize>,
    pub entries: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub tol_scale: Option<f64>,
    pub tol_h: Option<f64>,
    pub tol_nabla_h: Option<f64>,
    pub tol_rm: Option<f64>,
    pub tol_first_deriv: Option<f64>,
    pub tol_closed_form: Option<f64>,
}

/// Verification of the ambient geometry against the independent oracles.
pub fn cmd_verify_geometry(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.profile()?;
    let grid = cfg.r.points();
    reject_trivial(&p, &grid, 1e-9)?;
    let tol = cfg.tol;
    let mut rep = Report::new("geometry verification", &p.describe(), cfg.stamp());

    let mut worst_bracket: f64 = 0.0;
    let mut worst_torsion: f64 = 0.0;
    let mut worst_compat: f64 = 0.0;
    let mut worst_bianchi: f64 = 0.0;
    let mut worst_conn: f64 = 0.0;
    let mut worst_curv: f64 = 0.0;
    let mut worst_e4: f64 = 0.0;
    for &r in &grid {
        worst_bracket = worst_bracket.max(bracket_residual(&p, r)?);
        worst_torsion = worst_torsion.max(torsion_residual(&p, r)?);
        worst_compat = worst_compat.max(metric_compat_residual(&p, r)?);
        worst_bianchi = worst_bianchi.max(bianchi_residual(&p, r)?);
        worst_conn = worst_conn.max(connection_oracle_gap(&p, r)?);
        let (gap, e4) = curvature_oracle_gap(&p, r)?;
        worst_curv = worst_curv.max(gap);
        worst_e4 = worst_e4.max(e4);
    }
    rep.checks.push(CheckRecord::below(
        "frame bracket closed form vs numeric",
        "frame bracket relation",
        worst_bracket,
        tol.first_deriv,
    ));
    rep.checks.push(CheckRecord::below(
        "torsion-free connection table",
        "connection table",
        worst_torsion,
        tol.first_deriv,
    ));
    rep.checks.push(CheckRecord::below(
        "metric compatibility of connection table",
        "connection table",
        worst_compat,
        tol.first_deriv,
    ));
    rep.checks.push(CheckRecord::below(
        "first Bianchi identity of curvature table",
        "curvature table",
        worst_bianchi,
        tol.closed_form,
    ));
    rep.checks.push(CheckRecord::below(
        "connection table vs Koszul FD oracle",
        "connection table",
        worst_conn,
        1e-6 * cfg.tol_scale,
    ));
    rep.checks.push(CheckRecord::below(
        "curvature table vs coordinate FD oracle",
        "curvature table",
        worst_curv,
        1e-4 * cfg.tol_scale,
    ));
    rep.checks.push(CheckRecord::below(
        "curvature components involving E4",
        "curvature table",
        worst_e4,
        tol.first_deriv,
    ));

    // Gauss/Codazzi identity self-test on the z-slice and seeded random
    // immersions
    let r_mid = 0.5 * (cfg.r.start + cfg.r.stop);
    let half = (0.25f64).min(0.45 * (cfg.r.stop - cfg.r.start));
    let z_slice = catalog::tg_a(&p, r_mid - half, r_mid + half)?;
    let imm = z_slice.immersion().expect("immersed");
    let eng = Engine::new(&p, imm);
    let mut worst_g: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    for u in imm.ubox.grid(2) {
        let (g, c) = eng.gauss_codazzi(u)?;
        worst_g = worst_g.max(g);
        worst_c = worst_c.max(c);
    }
    for i in 0..4u64 {
        let imm = catalog::random_immersion(cfg.seed.wrapping_add(i), r_mid);
        let eng = Engine::new(&p, &imm);
        for u in [[0.0, 0.0, 0.0], [0.08, -0.06, 0.1]] {
            let (g, c) = eng.gauss_codazzi(u)?;
            worst_g = worst_g.max(g);
            worst_c = worst_c.max(c);
        }
    }
    rep.checks.push(CheckRecord::below(
        "Gauss identity on sample immersions",
        "Gauss relation",
        worst_g,
        1e-4 * cfg.tol_scale,
    ));
    rep.checks.push(CheckRecord::below(
        "Codazzi identity on sample immersions",
        "Codazzi relation",
        worst_c,
        1e-4 * cfg.tol_scale,
    ));
    Ok(rep)
}

/// Certify every applicable catalog family, including the adjudications
/// of the transcription conflicts.
pub fn cmd_certify_catalog(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.profile()?;
    let grid = cfg.r.points();
    reject_trivial(&p, &grid, 1e-9)?;
    let tol = cfg.tol;
    let mut rep = Report::new("catalog certification", &p.describe(), cfg.stamp());

    let mut en = catalog_enumerate(&p, cfg.r.start, cfg.r.stop)?;
    if let Some(spec) = &cfg.ubox {
        for e in en.entries.iter_mut() {
            shrink_centered_axes(e, spec);
        }
    }
    for e in &en.entries {
        if !cfg.entry_selected(&e.id) {
            continue;
        }
        rep.entries.push(certify(&p, e, cfg.grid_n, &tol)?);
    }
    rep.manifest = catalog::manifest();
    for (id, reason) in en.skipped {
        if cfg.entry_selected(&id) {
            rep.skipped.push((id, reason));
        }
    }

    // adjudications, where the profile supports them
    match adjudicate_ruled_tg(&p, cfg.r.start, cfg.r.stop, cfg.grid_n, &tol) {
        Ok(a) => rep.adjudications.push(a),
        Err(GeoError::Parameter(reason)) | Err(GeoError::Applicability { reason, .. }) => {
            rep.skipped.push(("adjudication ruled-tg-form".into(), reason));
        }
        Err(e) => return Err(e),
    }
    rep.adjudications.push(adjudicate_beta_form(0.7, cfg.r.start, cfg.r.stop));
    match adjudicate_plane_signs(&p, 1.0, 0.0, Causal::Spacelike, cfg.r.start, cfg.r.stop, cfg.grid_n, &tol) {
        Ok(a) => rep.adjudications.push(a),
        Err(GeoError::Parameter(reason)) | Err(GeoError::Applicability { reason, .. }) => {
            rep.skipped.push(("adjudication plane-signs".into(), reason));
        }
        Err(e) => return Err(e),
    }
    Ok(rep)
}

/// Parameter scan: one row per (entry, parameter value). Per-point errors
/// land in the `error` column; the scan itself never aborts.
pub fn cmd_scan(cfg: &RunConfig, param: &str, values: &[f64]) -> Result<Vec<ScanRow>> {
    let indexed: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
    let mut rows: Vec<(usize, Vec<ScanRow>)> = indexed
        .par_iter()
        .map(|&(i, v)| (i, scan_point(cfg, param, v)))
        .collect();
    rows.sort_by_key(|(i, _)| *i);
    Ok(rows.into_iter().flat_map(|(_, r)| r).collect())
}

fn scan_point(cfg: &RunConfig, param: &str, value: f64) -> Vec<ScanRow> {
    let row_err = |entry: &str, msg: String| ScanRow {
        entry: entry.into(),
        param: param.into(),
        value,
        max_h: None,
        max_nabla_h: None,
        max_rm: None,
        tr_h_abs: None,
        tr_h_variation: None,
        mean_curvature: None,
        pass: None,
        error: msg,
    };
    let base = match cfg.profile() {
        Ok(p) => p,
        Err(e) => return vec![row_err("(profile)", e.to_string())],
    };
    // profile-level parameters rebuild the profile; entry-level parameters
    // reparametrize the matching families
    let profile_level = ["m", "mu", "omega", "alpha"];
    let p = if profile_level.contains(&param) {
        match rebuild_profile(&base, param, value) {
            Ok(p) => p,
            Err(e) => return vec![row_err("(profile)", e.to_string())],
        }
    } else {
        base
    };
    let mid = 0.5 * (cfg.r.start + cfg.r.stop);
    let half_u2 = 0.5 * (cfg.r.stop - cfg.r.start).min(0.8);
    let mut out = Vec::new();
    let mut run = |entry: crate::error::Result<catalog::CatalogEntry>, hint: &str| {
        match entry {
            Ok(e) => {
                if !cfg.entry_selected(&e.id) {
                    return;
                }
                match certify(&p, &e, cfg.grid_n, &cfg.tol) {
                    Ok(rep) => {
                        let v = rep.verdict.as_ref();
                        out.push(ScanRow {
                            entry: rep.id.clone(),
                            param: param.into(),
                            value,
                            max_h: v.map(|v| v.residuals["max_h"]),
                            max_nabla_h: v.map(|v| v.residuals["max_nabla_h"]),
                            max_rm: v.map(|v| v.residuals["max_rm"]),
                            tr_h_abs: v.map(|v| v.residuals["tr_h_abs"]),
                            tr_h_variation: v.map(|v| v.residuals["tr_h_variation"]),
                            mean_curvature: v.map(|v| v.mean_curvature),
                            pass: Some(rep.pass),
                            error: String::new(),
                        });
                    }
                    Err(e) => out.push(row_err(hint, e.to_string())),
                }
            }
            Err(e) => {
                if cfg.entry_selected(hint) {
                    out.push(row_err(hint, e.to_string()));
                }
            }
        }
    };
    match param {
        "lambda" => {
            if cfg.entry_selected("PAR-2") {
                run(catalog::par_2(&p, value, 0.3, mid, half_u2), "PAR-2");
            }
            if cfg.entry_selected("PAR-3") {
                run(
                    catalog::par_3(&p, Some(value), true, Causal::Timelike, cfg.r.start, cfg.r.stop),
                    "PAR-3T",
                );
            }
        }
        "rho" => run(catalog::tg_b(&p, value, mid, half_u2), "TG-b"),
        "c" => run(catalog::par_1(&p, value), "PAR-1"),
        "k1" => {
            run(
                catalog::par_4(&p, value, 0.0, Causal::Spacelike, cfg.r.start, cfg.r.stop),
                "PAR-4S",
            );
            run(
                catalog::par_4(&p, value, 0.0, Causal::Timelike, cfg.r.start, cfg.r.stop),
                "PAR-4T",
            );
        }
        "k2" => {
            run(
                catalog::tg_d(&p, value, Causal::Spacelike, cfg.r.start, cfg.r.stop),
                "TG-dS",
            );
            run(
                catalog::tg_d(&p, value, Causal::Timelike, cfg.r.start, cfg.r.stop),
                "TG-dT",
            );
        }
        "theta0" => run(catalog::par_2(&p, 0.5, value, mid, half_u2), "PAR-2"),
        _ if profile_level.contains(&param) => {
            // full enumeration under the rebuilt profile
            match catalog_enumerate(&p, cfg.r.start, cfg.r.stop) {
                Ok(en) => {
                    for e in en.entries {
                        let id = e.id.clone();
                        run(Ok(e), &id);
                    }
                }
                Err(e) => out.push(row_err("(enumerate)", e.to_string())),
            }
        }
        other => out.push(row_err("(param)", format!("unknown scan parameter `{other}`"))),
    }
    out
}

fn rebuild_profile(base: &ProfilePair, param: &str, value: f64) -> Result<ProfilePair> {
    use crate::profiles::ProfileKind::*;
    match (&base.kind, param) {
        (ClassI { omega, .. }, "m") => ProfilePair::class1(value, *omega),
        (ClassI { m, .. }, "omega") => ProfilePair::class1(*m, value),
        (ClassII { .. }, "omega") => ProfilePair::class2(value),
        (ClassIII { omega, .. }, "mu") => ProfilePair::class3(value, *omega),
        (ClassIII { mu, .. }, "omega") => ProfilePair::class3(*mu, value),
        (ClassIV { .. }, "alpha") => ProfilePair::class4(value),
        _ => Err(GeoError::Config(format!(
            "parameter `{param}` does not apply to profile {}",
            base.describe()
        ))),
    }
}

/// Classify a normal coefficient tuple against the six admissible normal
/// directions, reporting the matching case and its side-condition residual.
pub fn cmd_classify_normal(cfg: &RunConfig, coeffs: [f64; 4]) -> Result<Report> {
    let p = cfg.profile()?;
    let grid = cfg.r.points();
    let [a, b, c, d] = coeffs;
    let unit = a * a - b * b - c * c - d * d;
    if (unit.abs() - 1.0).abs() > 1e-3 {
        return Err(GeoError::Config(format!(
            "normal tuple must satisfy |a^2-b^2-c^2-d^2| = 1, got {unit:.6}"
        )));
    }
    let mut rep = Report::new("normal-direction classification", &p.describe(), cfg.stamp());
    let out = classify_normal_tuple(&p, &grid, coeffs, 1e-8)?;
    let case_label = out.case.unwrap_or("none");
    rep.notes.push(format!(
        "tuple (a,b,c,d) = ({a}, {b}, {c}, {d}), eps = {}",
        if unit > 0.0 { "+1" } else { "-1" }
    ));
    rep.checks.push(CheckRecord {
        name: format!("matches case {case_label}"),
        reference: "normal-direction residual system".into(),
        residual: out.table_residual,
        threshold: 1e-8 * cfg.tol_scale,
        pass: out.case.is_some() && out.table_residual < 1e-8 * cfg.tol_scale,
    });
    if out.case.is_some() && out.side_condition_residual.is_finite() {
        rep.checks.push(CheckRecord::below(
            "case side condition",
            "normal-direction residual system",
            out.side_condition_residual,
            1e-8 * cfg.tol_scale,
        ));
    }
    if out.case.is_none() {
        rep.notes.push(format!(
            "no case matched; curvature contraction residual {:.6e} > 0",
            out.table_residual
        ));
    }
    Ok(rep)
}

/// Build a UBox from three grid specs.
pub fn ubox_from_specs(specs: &[GridSpec; 3]) -> UBox {
    UBox::new(
        [specs[0].start, specs[1].start, specs[2].start],
        [specs[0].stop, specs[1].stop, specs[2].stop],
    )
}

/// Shrink the centered axes of an entry's evaluation box to the requested
/// extents. Radial axes (non-centered) stay pinned to the r-grid; growing
/// past the default is refused because integral-form immersions are only
/// tabulated over a padded default range.
fn shrink_centered_axes(e: &mut catalog::CatalogEntry, spec: &[GridSpec; 3]) {
    if let catalog::Payload::Immersed(imm) = &mut e.payload {
        for i in 0..3 {
            let (lo, hi) = (imm.ubox.lo[i], imm.ubox.hi[i]);
            if (lo + hi).abs() < 1e-12 {
                let half = 0.5 * (spec[i].stop - spec[i].start).abs();
                if half > 0.0 && half < hi {
                    imm.ubox.lo[i] = -half;
                    imm.ubox.hi[i] = half;
                }
            }
        }
    }
}
