//! Command implementations. Each returns `Ok(true)` when every check passes.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bicon_core::canonical::{self, BiharmonicReport, Verdict};
use bicon_core::curve::{self, ProfileLaw, SampledCurve};
use bicon_core::SurfaceOptions;
use bicon_core::output;
use bicon_core::surface::{self, MeshFormat, SurfaceMesh};
use bicon_core::{CertConfig, CertReport};

pub struct Context {
    out: PathBuf,
    overrides: Value,
}

impl Context {
    pub fn new(out: PathBuf, config: Option<PathBuf>) -> Result<Self> {
        let overrides = match config {
            Some(path) => {
                let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
                let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
                if !value.is_object() {
                    bail!("config {} must hold a JSON object", path.display());
                }
                value
            }
            None => json!({}),
        };
        fs::create_dir_all(&out).with_context(|| format!("creating output directory {}", out.display()))?;
        Ok(Self { out, overrides })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Applies config-file keys on top of the parsed flags.
    fn resolve<T: Serialize + DeserializeOwned>(&self, args: T) -> Result<T> {
        let mut value = serde_json::to_value(&args)?;
        if let (Some(target), Some(src)) = (value.as_object_mut(), self.overrides.as_object()) {
            for (k, v) in src {
                if k == "cert" {
                    continue;
                }
                if !target.contains_key(k) {
                    bail!("unknown config key `{k}` for this command");
                }
                target.insert(k.clone(), v.clone());
            }
        }
        serde_json::from_value(value).context("config values do not match the command's options")
    }

    fn cert_config(&self) -> Result<CertConfig> {
        let cfg: CertConfig = match self.overrides.get("cert") {
            Some(v) => serde_json::from_value(v.clone()).context("invalid `cert` config")?,
            None => CertConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize)]
struct CheckLine {
    name: String,
    value: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Default)]
struct Checks(Vec<CheckLine>);

impl Checks {
    fn below(&mut self, name: &str, value: f64, tolerance: f64) {
        self.0.push(CheckLine { name: name.into(), value, tolerance, passed: value < tolerance });
    }

    fn above(&mut self, name: &str, value: f64, threshold: f64) {
        self.0.push(CheckLine { name: name.into(), value, tolerance: threshold, passed: value > threshold });
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.0.push(CheckLine { name: name.into(), value: if ok { 1.0 } else { 0.0 }, tolerance: 1.0, passed: ok });
    }

    fn cert(&mut self, prefix: &str, report: &CertReport) {
        for c in &report.checks {
            self.0.push(CheckLine {
                name: format!("{prefix}{}", c.name),
                value: c.max,
                tolerance: c.tolerance,
                passed: c.passed,
            });
        }
    }

    fn passed(&self) -> bool {
        self.0.iter().all(|c| c.passed)
    }

    fn print(&self) {
        for c in &self.0 {
            println!("{} {:<28} {:.3e} (tol {:.1e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
        }
    }
}

fn write_report(ctx: &Context, name: &str, command: &str, config: Value, results: Value, checks: &Checks) -> Result<bool> {
    let passed = checks.passed();
    let report = json!({
        "command": command,
        "config": config,
        "results": results,
        "checks": checks.0,
        "passed": passed,
    });
    let path = ctx.path(name);
    output::write_json(&path, &report)?;
    checks.print();
    println!("report: {}", path.display());
    Ok(passed)
}

fn config_value<T: Serialize>(args: &T, cert: Option<&CertConfig>) -> Result<Value> {
    let mut v = serde_json::to_value(args)?;
    if let (Some(obj), Some(c)) = (v.as_object_mut(), cert) {
        obj.insert("cert".into(), serde_json::to_value(c)?);
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Uniform in the orbit phase; concentrates samples where κ is large.
    Phase,
    /// Uniform in arclength.
    Arclength,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ClosureArgs {
    /// Number of curvature periods in one closed traversal.
    #[arg(long)]
    pub m: u64,
    /// Number of turns about the rotation pole.
    #[arg(long)]
    pub n: u64,
    /// Tolerance on |I(d) − 2πn/m|.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Minimum number of profile samples along the whole closed curve.
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
    /// Lower bound on samples per curvature period.
    #[arg(long, default_value_t = 128)]
    pub min_per_period: usize,
    /// Samples around the rotation circle.
    #[arg(long, default_value_t = 256)]
    pub n_theta: usize,
    /// Minimum samples in the exported one-period curvature profile; doubled
    /// (up to 16384) until the finite-difference Euler–Lagrange check resolves.
    #[arg(long, default_value_t = 256)]
    pub profile_samples: usize,
    #[arg(long, value_enum, default_value_t = Sampling::Phase)]
    pub sampling: Sampling,
    /// Also export the S³ mesh as JSON (input for `certify`).
    #[arg(long, default_value_t = false)]
    pub mesh_json: bool,
}

const MAX_PROFILE_SAMPLES: usize = 16384;

pub fn closure(ctx: &Context, args: ClosureArgs) -> Result<bool> {
    let args = ctx.resolve(args)?;
    let cert_cfg = ctx.cert_config()?;
    if args.resolution == 0 || args.min_per_period < 16 || args.n_theta < 8 || args.profile_samples < 16 {
        bail!("resolutions must satisfy resolution ≥ 1, min_per_period ≥ 16, n_theta ≥ 8, profile_samples ≥ 16");
    }
    let stem = format!("closure_m{}_n{}", args.m, args.n);

    let sol = bicon_core::solve_closure(args.m, args.n, args.tol)?;
    let mut checks = Checks::default();
    checks.below("closure_residual", sol.residual, args.tol);

    let (profile, el) =
        bicon_core::resolved_profile(sol.d, 1.0, args.profile_samples, MAX_PROFILE_SAMPLES.max(args.profile_samples), 1e-4)?;
    profile.write_csv(&ctx.path(&format!("{stem}_profile.csv")))?;
    checks.below("prime_integral", profile.prime_residual, 1e-8);
    checks.below("euler_lagrange", el, 1e-4);

    let m = args.m as usize;
    let opts = SurfaceOptions {
        tol: args.tol,
        sampling: match args.sampling {
            Sampling::Phase => bicon_core::Sampling::Phase,
            Sampling::Arclength => bicon_core::Sampling::Arclength,
        },
        samples_per_period: args.resolution.div_ceil(m).max(args.min_per_period),
        n_theta: args.n_theta,
        profile_samples: args.profile_samples,
    };
    let built = bicon_core::closed_surface(args.m, args.n, &opts)?;
    let diag = built.diagnostics;
    checks.below("closure_defect", diag.defect, 1e-6);
    checks.flag("winding_equals_n", diag.winding == args.n as i64);
    checks.below("winding_error", diag.winding_error, 0.01);
    checks.below("killing_residual", diag.killing_residual, 1e-5);
    checks.below("sphere_drift", built.curve.constraint_drift(), 1e-9);

    // Independent measurement of I(d): azimuth gained over one period.
    let one = curve::integrate_on_sphere(&profile, 1, 512)?;
    let one_diag = bicon_core::closure_diagnostics(&one)?;
    checks.below("delta_theta_vs_integral", (one_diag.delta_theta - sol.i_value).abs(), 1e-5);

    built.curve.write_csv(&ctx.path(&format!("{stem}_curve.csv")))?;
    let mut mesh = built.mesh;
    mesh.metadata.insert("tol".into(), json!(args.tol));
    checks.below("s3_norm", mesh.max_norm_defect(), 1e-8);

    let cert = bicon_core::certify(&mesh, &cert_cfg)?;
    checks.cert("cert_", &cert);
    let hopf = cert.hopf.clone().context("rotational mesh has a Hopf summary")?;
    checks.above("hopf_dzbar_nonzero", hopf.lhs_max, cert_cfg.fd_tol);
    cert.fields.write_csv(&ctx.path(&format!("{stem}_residuals.csv")))?;

    if args.mesh_json {
        mesh.export(MeshFormat::Json, &ctx.path(&format!("{stem}_s3.json")))?;
    }
    let projected = surface::stereographic_project(&mesh)?;
    projected.export(MeshFormat::Obj, &ctx.path(&format!("{stem}.obj")))?;

    let results = json!({
        "solution": sol,
        "period_samples": opts.samples_per_period,
        "mesh": { "n_s": mesh.n_s, "n_theta": mesh.n_theta, "faces": mesh.face_count() },
        "diagnostics": diag,
        "one_period_delta_theta": one_diag.delta_theta,
        "profile_samples": profile.samples.len(),
        "kappa_min": profile.kappa_min(),
        "kappa_max": profile.kappa_max(),
        "certification": cert,
    });
    write_report(ctx, &format!("{stem}.json"), "closure", config_value(&args, Some(&cert_cfg))?, results, &checks)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.6)]
    pub d_min: f64,
    #[arg(long, default_value_t = 50.0)]
    pub d_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

pub fn sweep(ctx: &Context, args: SweepArgs) -> Result<bool> {
    let args = ctx.resolve(args)?;
    let report = bicon_core::sweep(args.d_min, args.d_max, args.steps)?;
    output::write_csv(&ctx.path("sweep.csv"), &["d", "I"], report.csv_rows())?;
    let mut checks = Checks::default();
    checks.flag("monotone_decreasing", report.monotone_decreasing);
    checks.flag("in_bounds", report.in_bounds);
    let results = json!({
        "monotone_decreasing": report.monotone_decreasing,
        "in_bounds": report.in_bounds,
        "min_angle": report.min_angle,
        "max_angle": report.max_angle,
        "pi": PI,
        "sqrt2_pi": std::f64::consts::SQRT_2 * PI,
        "points": report.grid.len(),
    });
    write_report(ctx, "sweep.json", "sweep", config_value(&args, None)?, results, &checks)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProfileArgs {
    #[arg(long)]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}

pub fn profile(ctx: &Context, args: ProfileArgs) -> Result<bool> {
    let args = ctx.resolve(args)?;
    let profile = bicon_core::curvature_profile(args.d, args.c, args.samples)?;
    profile.write_csv(&ctx.path("profile.csv"))?;
    let mut checks = Checks::default();
    checks.below("prime_integral", profile.prime_residual, 1e-8);
    let el = profile.euler_lagrange_residual()?;
    checks.below("euler_lagrange", el, 1e-4);
    checks.below("kappa_max_is_u2_sq", (profile.kappa_max() - profile.u2 * profile.u2).abs() / profile.kappa_max(), 1e-12);
    let results = json!({ "profile": profile, "euler_lagrange_residual": el });
    write_report(ctx, "profile.json", "profile", config_value(&args, None)?, results, &checks)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CertifyArgs {
    /// Mesh JSON written by `closure --mesh-json` or any export.
    #[arg(long)]
    pub mesh: PathBuf,
    /// Also require ∂_z̄Q to vanish (CMC) or not to vanish (non-CMC).
    #[arg(long, value_enum)]
    pub expect_hopf: Option<HopfExpectation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HopfExpectation {
    Holomorphic,
    NotHolomorphic,
}

pub fn certify(ctx: &Context, args: CertifyArgs) -> Result<bool> {
    let args = ctx.resolve(args)?;
    let cert_cfg = ctx.cert_config()?;
    let mesh = SurfaceMesh::import_json(&args.mesh)?;
    let cert = bicon_core::certify(&mesh, &cert_cfg)?;
    let mut checks = Checks::default();
    checks.cert("", &cert);
    if let (Some(expect), Some(h)) = (args.expect_hopf, cert.hopf.as_ref()) {
        match expect {
            HopfExpectation::Holomorphic => checks.below("hopf_dzbar", h.lhs_max, cert_cfg.fd_tol),
            HopfExpectation::NotHolomorphic => checks.above("hopf_dzbar_nonzero", h.lhs_max, cert_cfg.fd_tol),
        }
    }
    let stem = stem_of(&args.mesh);
    cert.fields.write_csv(&ctx.path(&format!("{stem}_certify_residuals.csv")))?;
    let results = json!({ "mesh": args.mesh, "metadata": mesh.metadata, "certification": cert });
    write_report(ctx, &format!("{stem}_certify.json"), "certify", config_value(&args, Some(&cert_cfg))?, results, &checks)
}

fn stem_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "mesh".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    All,
    B1,
    B2,
    Lawson,
    NonExample,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExamplesArgs {
    #[arg(long, value_enum, default_value_t = Case::All)]
    pub case: Case,
    /// Print a text table of (example, m, f, |A|², verdict).
    #[arg(long, default_value_t = false)]
    pub table: bool,
}

pub fn examples(ctx: &Context, args: ExamplesArgs) -> Result<bool> {
    let args = ctx.resolve(args)?;
    let spectra: Vec<_> = canonical::standard_cases()
        .into_iter()
        .filter(|s| {
            let kind = s.label.split_whitespace().next().unwrap_or("");
            match args.case {
                Case::All => true,
                Case::B1 => kind == "B1",
                Case::B2 => kind == "B2",
                Case::Lawson => kind == "Lawson",
                Case::NonExample => !matches!(kind, "B1" | "B2" | "Lawson"),
            }
        })
        .collect();
    let reports: Vec<BiharmonicReport> = spectra.iter().map(canonical::biharmonic_check).collect();
    let mut checks = Checks::default();
    for (s, r) in spectra.iter().zip(&reports) {
        let expected = match s.label.split_whitespace().next().unwrap_or("") {
            "B1" | "B2" => Verdict::ProperBiharmonic,
            "Lawson" => Verdict::Minimal,
            _ => Verdict::NotBiharmonic,
        };
        checks.flag(&format!("{}: {}", r.label, expected), r.verdict == expected);
        checks.flag(&format!("{}: consistent", r.label), s.is_consistent());
    }
    if args.table {
        print!("{}", canonical::format_table(&reports));
    }
    let results = json!({ "spectra": spectra, "reports": reports });
    write_report(ctx, "examples.json", "examples", config_value(&args, None)?, results, &checks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawArg {
    AsStated,
    Weingarten,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct R3ProfileArgs {
    /// Profile constant C > 0.
    #[arg(long = "C", default_value_t = 1.0)]
    #[serde(rename = "C")]
    pub c: f64,
    #[arg(long, default_value_t = 8.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// Samples around the axis of revolution.
    #[arg(long, default_value_t = 256)]
    pub n_theta: usize,
    /// Slope law of the profile.
    #[arg(long, value_enum, default_value_t = LawArg::AsStated)]
    pub law: LawArg,
}

pub fn r3profile(ctx: &Context, args: R3ProfileArgs) -> Result<bool> {
    let args = ctx.resolve(args)?;
    let cert_cfg = ctx.cert_config()?;
    let law = match args.law {
        LawArg::AsStated => ProfileLaw::AsStated,
        LawArg::Weingarten => ProfileLaw::Weingarten,
    };
    let curve: SampledCurve = curve::euclidean_profile_with(law, args.c, args.x_max, args.samples)?;
    curve.write_csv(&ctx.path("r3profile.csv"))?;
    let mut mesh = surface::revolve_in_r3(&curve, args.n_theta)?;
    mesh.metadata.insert("C".into(), json!(args.c));
    mesh.metadata.insert("law".into(), serde_json::to_value(law)?);
    mesh.export(MeshFormat::Obj, &ctx.path("r3profile.obj"))?;

    let mut checks = Checks::default();
    let last = curve.len() - 1;
    let sampled_slope = curve.tangents[last][2] / curve.tangents[last][0];
    let formula = curve::profile_slope(law, args.c, curve.points[last][0]);
    checks.below("slope_at_x_max", (sampled_slope - formula).abs() / formula.abs(), 1e-12);
    let cert = bicon_core::certify(&mesh, &cert_cfg)?;
    for name in ["weingarten", "biconservative", "stress_div", "gauss", "stress_trace"] {
        if let Some(c) = cert.check(name) {
            checks.below(&format!("cert_{name}"), c.max, c.tolerance);
        }
    }
    cert.fields.write_csv(&ctx.path("r3profile_residuals.csv"))?;
    let results = json!({
        "slope_at_x_max": sampled_slope,
        "slope_formula": formula,
        "x_max": curve.points[last][0],
        "certification": cert,
    });
    write_report(ctx, "r3profile.json", "r3profile", config_value(&args, Some(&cert_cfg))?, results, &checks)
}
