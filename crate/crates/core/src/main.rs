use clap::{Args, Parser, Subcommand};
use godel_geo::commands::{
    cmd_certify_catalog, cmd_classify_normal, cmd_scan, cmd_verify_geometry, FileConfig, GridSpec,
    RunConfig,
};
use godel_geo::hypersurfaces::Tolerances;
use godel_geo::report::{scan_csv, Report};
use godel_geo::GeoError;
use std::process::ExitCode;

/// Numerical verification tool for Godel-type spacetimes: closed-form
/// geometry vs finite-difference oracles, and certification of the
/// totally geodesic / parallel hypersurface catalog.
#[derive(Parser)]
#[command(name = "godel-geo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Profile spec: class1(m=..,omega=..), class2(omega=..),
    /// class3(mu=..,omega=..), class4(alpha=..), custom(H="..",D="..")
    #[arg(long)]
    profile: Option<String>,

    /// Radial grid start:stop:count
    #[arg(long)]
    r: Option<String>,

    /// Evaluation box "lo:hi:n,lo:hi:n,lo:hi:n"; centered axes of each
    /// family's default box are shrunk to these extents
    #[arg(long = "box", allow_hyphen_values = true)]
    ubox: Option<String>,

    /// Per-axis classification grid resolution (n^3 points per box)
    #[arg(long)]
    grid_n: Option<usize>,

    /// JSON config file with defaults; command line wins
    #[arg(long)]
    config: Option<String>,

    /// Entry id filter (prefix match), comma separated
    #[arg(long)]
    entries: Option<String>,

    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<String>,

    /// Output format
    #[arg(long, default_value = "table")]
    format: String,

    /// Worker pool size for scans
    #[arg(long)]
    jobs: Option<usize>,

    /// Seed for randomized controls
    #[arg(long)]
    seed: Option<u64>,

    /// Tolerance overrides
    #[arg(long)]
    tol_h: Option<f64>,
    #[arg(long)]
    tol_nabla_h: Option<f64>,
    #[arg(long)]
    tol_rm: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the closed-form connection/curvature tables against the
    /// finite-difference oracles over an r-grid
    VerifyGeometry(Common),
    /// Construct and certify every applicable hypersurface family,
    /// including adjudication of the transcription conflicts
    CertifyCatalog(Common),
    /// Sweep one parameter, emitting per-entry residuals as CSV
    Scan {
        #[command(flatten)]
        common: Common,
        /// Parameter to sweep: m, mu, omega, alpha, lambda, rho, c, k1,
        /// k2, theta0
        #[arg(long)]
        param: String,
        /// Sweep range start:stop:count
        #[arg(long)]
        range: String,
    },
    /// Classify a normal coefficient tuple (a,b,c,d) against the six
    /// admissible normal directions
    ClassifyNormal {
        #[command(flatten)]
        common: Common,
        /// Coefficients "a,b,c,d" with |a^2-b^2-c^2-d^2| = 1
        #[arg(long)]
        coeffs: String,
    },
}

fn resolve(common: &Common) -> Result<RunConfig, GeoError> {
    let file: FileConfig = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| GeoError::Config(format!("cannot read config {path}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| GeoError::Config(format!("config {path}: {e}")))?
        }
        None => FileConfig::default(),
    };
    let profile = common
        .profile
        .clone()
        .or(file.profile)
        .ok_or_else(|| GeoError::Config("missing --profile".into()))?;
    let r_src = common.r.clone().or(file.r).unwrap_or_else(|| "0.8:1.6:8".into());
    let r = GridSpec::parse(&r_src)?;
    let tol_scale = std::env::var("GODEL_GEO_TOL_SCALE")
        .ok()
        .and_then(|v| v.parse::<f64>().ok())
        .or(file.tol_scale)
        .unwrap_or(1.0);
    if tol_scale <= 0.0 {
        return Err(GeoError::Config("tolerance scale must be positive".into()));
    }
    let mut tol = Tolerances::default();
    if let Some(v) = file.tol_closed_form {
        tol.closed_form = v;
    }
    if let Some(v) = file.tol_first_deriv {
        tol.first_deriv = v;
    }
    if let Some(v) = common.tol_h.or(file.tol_h) {
        tol.h = v;
    }
    if let Some(v) = common.tol_nabla_h.or(file.tol_nabla_h) {
        tol.nabla_h = v;
    }
    if let Some(v) = common.tol_rm.or(file.tol_rm) {
        tol.rm = v;
    }
    let tol = tol.scaled(tol_scale);
    let entries = match (&common.entries, file.entries) {
        (Some(s), _) => Some(s.split(',').map(|x| x.trim().to_string()).collect()),
        (None, Some(v)) => Some(v),
        (None, None) => None,
    };
    let ubox = match common.ubox.clone().or(file.ubox) {
        Some(src) => {
            let parts: Vec<&str> = src.split(',').collect();
            if parts.len() != 3 {
                return Err(GeoError::Config(format!(
                    "--box `{src}` needs three comma-separated specs"
                )));
            }
            Some([
                GridSpec::parse(parts[0])?,
                GridSpec::parse(parts[1])?,
                GridSpec::parse(parts[2])?,
            ])
        }
        None => None,
    };
    let grid_n = common
        .grid_n
        .or(file.grid_n)
        .or(ubox.map(|b| b[0].count.max(b[1].count).max(b[2].count)))
        .unwrap_or(5);
    if grid_n < 2 {
        return Err(GeoError::Config("grid_n must be at least 2".into()));
    }
    Ok(RunConfig {
        profile,
        r,
        grid_n,
        ubox,
        tol,
        entries,
        seed: common.seed.or(file.seed).unwrap_or(0),
        jobs: common.jobs.or(file.jobs).unwrap_or(1),
        tol_scale,
    })
}

fn emit(common: &Common, text: String) -> Result<(), GeoError> {
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| GeoError::Config(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(common: &Common, rep: &Report) -> Result<bool, GeoError> {
    let text = match common.format.as_str() {
        "json" => rep.to_json(),
        "table" => rep.render_table(),
        other => {
            return Err(GeoError::Config(format!(
                "unknown format `{other}` (use json or table)"
            )))
        }
    };
    emit(common, text)?;
    Ok(rep.pass())
}

fn run() -> Result<bool, GeoError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::VerifyGeometry(common) => {
            let cfg = resolve(common)?;
            let rep = cmd_verify_geometry(&cfg)?;
            emit_report(common, &rep)
        }
        Command::CertifyCatalog(common) => {
            let cfg = resolve(common)?;
            let rep = cmd_certify_catalog(&cfg)?;
            emit_report(common, &rep)
        }
        Command::Scan {
            common,
            param,
            range,
        } => {
            let cfg = resolve(common)?;
            let values = GridSpec::parse(range)?.points();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.jobs.max(1))
                .build()
                .map_err(|e| GeoError::Config(format!("thread pool: {e}")))?;
            let rows = pool.install(|| cmd_scan(&cfg, param, &values))?;
            emit(common, scan_csv(&rows))?;
            Ok(true)
        }
        Command::ClassifyNormal { common, coeffs } => {
            let cfg = resolve(common)?;
            let parts: Vec<f64> = coeffs
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| GeoError::Config(format!("bad coefficient tuple `{coeffs}`")))?;
            if parts.len() != 4 {
                return Err(GeoError::Config(format!(
                    "need exactly four coefficients, got {}",
                    parts.len()
                )));
            }
            let rep = cmd_classify_normal(&cfg, [parts[0], parts[1], parts[2], parts[3]])?;
            emit_report(common, &rep)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
