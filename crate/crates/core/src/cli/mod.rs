//! The `visphere` command line: `genmap`, `render`, `remap`, `curves` and
//! `serve`.
//!
//! Exit codes: 0 on success, 1 on other failures, 2 on invalid parameters
//! (with the nearest valid value printed), 3 on missing assets.

pub mod serve;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::io::map_io::{load_map, save_map, save_map_preview};
use crate::io::passes::{save_pass, Pass};
use crate::io::png::{read_rgba8, write_rgba8};
use crate::io::scene::{load_scene, ProjectionSource, Strictness};
use crate::projections::map::{bake_map, PerspectiveMap};
use crate::projections::params::PerspectiveParams;
use crate::projections::universal::{radial_profile, remap_2d_to_2d};
use crate::projections::ProjectionSpec;
use crate::raster::{render_scene, RenderOptions, Scene, StepMode};
use crate::sphere::{texture_to_view, view_to_texture, AovMode, Plane, TextureCoord};

#[derive(Parser, Debug)]
#[command(name = "visphere", version, about = "Perspective maps and visual-sphere rasterization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bake a perspective map to PFM with a JSON sidecar.
    Genmap(GenmapArgs),
    /// Render a scene into mask, depth, uv, normal, shaded or wireframe passes.
    Render(RenderArgs),
    /// Resample an image from one universal perspective to another.
    Remap(RemapArgs),
    /// Export radial compression curves R(θ) as CSV.
    Curves(CurvesArgs),
    /// Serve limits, presets and PNG previews over HTTP.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ProjectionType {
    Universal,
    Rectilinear,
    Panorama,
    Dome,
    Equirect,
    Cubemap,
    ScreenArray,
    Vr,
    MirrorDome,
    ProjectionMapping,
}

/// Projection flags; each maps onto a field of the projection description.
#[derive(Args, Debug, Clone, Default)]
pub struct ProjectionArgs {
    #[arg(long = "type", value_enum)]
    pub kind: Option<ProjectionType>,
    /// Full projection description as JSON; other projection flags override it.
    #[arg(long, value_name = "JSON")]
    pub spec: Option<String>,
    #[arg(long)]
    pub omega_deg: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub aov_deg: Option<f64>,
    #[arg(long, value_enum)]
    pub aov_mode: Option<AovModeArg>,
    #[arg(long)]
    pub omega_h_deg: Option<f64>,
    /// Panorama display height relative to the cylinder radius.
    #[arg(long)]
    pub pano_height: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub compression_deg: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tilt_deg: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<f64>,
    #[arg(long)]
    pub screens: Option<u32>,
    /// Per-screen aspect for screen arrays.
    #[arg(long)]
    pub screen_aspect: Option<f64>,
    #[arg(long)]
    pub ipd: Option<f64>,
    #[arg(long)]
    pub omega_v_deg: Option<f64>,
    /// Reject out-of-range universal parameters instead of clamping them.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AovModeArg {
    Horizontal,
    Vertical,
    Diagonal,
    #[value(name = "horizontal_4x3", alias = "4x3")]
    Horizontal4x3,
}

impl From<AovModeArg> for AovMode {
    fn from(m: AovModeArg) -> Self {
        match m {
            AovModeArg::Horizontal => AovMode::Horizontal,
            AovModeArg::Vertical => AovMode::Vertical,
            AovModeArg::Diagonal => AovMode::Diagonal,
            AovModeArg::Horizontal4x3 => AovMode::Horizontal4x3,
        }
    }
}

impl ProjectionArgs {
    fn is_empty(&self) -> bool {
        self.kind.is_none() && self.spec.is_none()
    }

    /// Builds the description and applies the clamp policy, printing any
    /// adjustment.
    pub fn to_spec(&self) -> Result<ProjectionSpec> {
        let mut obj: Map<String, Value> = match &self.spec {
            Some(text) => match serde_json::from_str(text)? {
                Value::Object(m) => m,
                _ => return Err(Error::domain("--spec must be a JSON object")),
            },
            None => Map::new(),
        };
        if let Some(kind) = self.kind {
            let name = kind.to_possible_value().expect("named").get_name().to_owned();
            obj.insert("type".into(), json!(name));
        }
        let mut put = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                obj.insert(key.into(), v);
            }
        };
        put("omega_deg", self.omega_deg.map(Value::from));
        put("k", self.k.map(Value::from));
        put("l", self.l.map(Value::from));
        put("s", self.s.map(Value::from));
        put("aov_deg", self.aov_deg.map(Value::from));
        put("mode", self.aov_mode.map(|m| serde_json::to_value(AovMode::from(m)).expect("serializable")));
        put("omega_h_deg", self.omega_h_deg.map(Value::from));
        put("height", self.pano_height.map(Value::from));
        put("compression_deg", self.compression_deg.map(Value::from));
        put("tilt_deg", self.tilt_deg.map(Value::from));
        put("offset", self.offset.map(Value::from));
        put("screens", self.screens.map(Value::from));
        put("aspect", self.screen_aspect.map(Value::from));
        put("ipd", self.ipd.map(Value::from));
        put("omega_v_deg", self.omega_v_deg.map(Value::from));
        let type_name = obj.get("type").and_then(Value::as_str).map(str::to_owned);
        let mut spec: ProjectionSpec = serde_json::from_value(Value::Object(obj)).map_err(|e| match type_name {
            Some(t) if e.to_string().contains("unknown variant") => Error::UnknownProjection(t),
            None => Error::domain("a projection needs --type or --spec"),
            _ => Error::domain(format!("projection flags: {e}")),
        })?;
        if self.strict {
            spec.universal_params(true)?;
        } else {
            for a in spec.clamp_in_place()? {
                eprintln!("notice: clamped {} from {} to {}", a.name, a.from, a.to);
            }
        }
        Ok(spec)
    }
}

#[derive(Args, Debug)]
pub struct GenmapArgs {
    #[command(flatten)]
    pub projection: ProjectionArgs,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    /// Defaults to the width divided by --aspect, or the width.
    #[arg(long)]
    pub height: Option<usize>,
    /// Picture aspect (width/height) used when --height is absent.
    #[arg(long)]
    pub aspect: Option<f64>,
    /// Output PFM; the sidecar and δ plane are written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write an 8-bit preview PNG.
    #[arg(long)]
    pub preview: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Scene document; an empty scene when absent.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Baked map to render against.
    #[arg(long, conflicts_with_all = ["kind", "spec"])]
    pub map: Option<PathBuf>,
    #[command(flatten)]
    pub projection: ProjectionArgs,
    /// Map size when baking from projection flags or the scene.
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "mask,depth,uv,normal")]
    pub passes: Vec<String>,
    #[arg(long, value_enum, default_value_t = FileFormat::Png)]
    pub format: FileFormat,
    /// Hard-edged coverage instead of the one-pixel ramp.
    #[arg(long)]
    pub binary: bool,
    #[arg(long)]
    pub no_miter: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Png,
    Pfm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Filter {
    Nearest,
    Bilinear,
}

#[derive(Args, Debug)]
pub struct RemapArgs {
    #[arg(long)]
    pub in_image: PathBuf,
    /// `omega=<deg>,k=<k>,l=<l>,s=<s>`; unspecified l and s default to 1.
    #[arg(long, allow_hyphen_values = true)]
    pub in_params: String,
    #[arg(long, allow_hyphen_values = true)]
    pub out_params: String,
    #[arg(long)]
    pub out_image: PathBuf,
    #[arg(long, value_enum, default_value_t = Filter::Bilinear)]
    pub filter: Filter,
    #[arg(long, value_enum, default_value_t = AovModeArg::Diagonal)]
    pub aov_mode: AovModeArg,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct CurvesArgs {
    #[arg(long)]
    pub omega_deg: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0.5,0,-0.5,-1")]
    pub k_list: Vec<f64>,
    #[arg(long, default_value_t = 91)]
    pub samples: usize,
    /// Standard output when absent.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    /// Directory of `*.json` scenes served by file stem.
    #[arg(long)]
    pub scene_dir: Option<PathBuf>,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MissingAsset(_) => 3,
        Error::OutOfRange { .. } | Error::Domain(_) | Error::UnknownProjection(_) | Error::OutOfDomain => 2,
        _ => 1,
    }
}

/// Parses arguments and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Genmap(a) => genmap(&a),
        Command::Render(a) => render(&a),
        Command::Remap(a) => remap(&a),
        Command::Curves(a) => curves(&a),
        Command::Serve(a) => serve::run(&a),
    }
}

fn genmap(a: &GenmapArgs) -> Result<()> {
    let spec = a.projection.to_spec()?;
    let height = match (a.height, a.aspect) {
        (Some(h), _) => h,
        (None, Some(asp)) if asp > 0.0 && asp.is_finite() => ((a.width as f64 / asp).round() as usize).max(1),
        (None, Some(asp)) => return Err(Error::domain(format!("aspect {asp} must be positive"))),
        (None, None) => a.width,
    };
    let map = bake_map(&spec, a.width, height)?;
    save_map(&map, &a.out)?;
    if let Some(p) = &a.preview {
        save_map_preview(&map, p)?;
    }
    let invalid = a.width * height - map.valid_count();
    println!("wrote {} ({}x{}, {}, {invalid} pixels outside the domain)", a.out.display(), a.width, height, spec.name());
    Ok(())
}

fn resolve_map(a: &RenderArgs, scene_projection: Option<&ProjectionSource>) -> Result<PerspectiveMap> {
    let height = a.height.unwrap_or(a.width);
    if let Some(p) = &a.map {
        return load_map(p);
    }
    if !a.projection.is_empty() {
        return bake_map(&a.projection.to_spec()?, a.width, height);
    }
    match scene_projection {
        Some(ProjectionSource::Map(p)) => load_map(p),
        Some(ProjectionSource::Spec(s)) => bake_map(s, a.width, height),
        None => Err(Error::domain("no projection: pass --map, --type/--spec, or set one in the scene")),
    }
}

fn render(a: &RenderArgs) -> Result<()> {
    let strictness = if a.projection.strict { Strictness::Strict } else { Strictness::Clamp };
    let (scene, projection) = match &a.scene {
        Some(p) => {
            let doc = load_scene(p, strictness)?;
            for w in &doc.warnings {
                eprintln!("warning: {w}");
            }
            (doc.scene, doc.projection)
        }
        None => (Scene::default(), None),
    };
    let map = resolve_map(a, projection.as_ref())?;
    let passes = a.passes.iter().map(|s| s.trim().parse::<Pass>()).collect::<Result<Vec<_>>>()?;
    let options = RenderOptions {
        mode: if a.binary { StepMode::Binary } else { StepMode::Pixel },
        miter: !a.no_miter,
        wireframe: passes.contains(&Pass::Wireframe) || passes.contains(&Pass::Shaded),
    };
    let out = render_scene(&scene, &map, &options)?;
    let d = out.diagnostics;
    println!(
        "rendered {} triangles, {} particles, {} lines; culled {}, subdivided {}, skipped {}",
        d.triangles, d.particles, d.lines, d.culled, d.subdivided, d.skipped
    );
    let ext = match a.format {
        FileFormat::Png => "png",
        FileFormat::Pfm => "pfm",
    };
    if let Some(dir) = a.out_prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    for pass in passes {
        let mut name = a.out_prefix.as_os_str().to_owned();
        name.push(format!(".{}.{ext}", pass.name()));
        let path = PathBuf::from(name);
        save_pass(&out, &map, pass, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// `omega=170,k=0.5,l=1,s=1`, angles in degrees.
pub fn parse_params(text: &str, strict: bool) -> Result<PerspectiveParams> {
    let mut kv = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("expected key=value, got `{part}`")))?;
        let v: f64 = value.trim().parse().map_err(|_| Error::domain(format!("`{value}` is not a number")))?;
        let key = match key.trim() {
            "omega" | "omega_deg" => "omega",
            k @ ("k" | "l" | "s") => k,
            other => return Err(Error::domain(format!("unknown parameter `{other}`"))),
        };
        kv.insert(key, v);
    }
    let get = |k: &str| kv.get(k).copied();
    let omega = get("omega").ok_or_else(|| Error::domain("parameters need omega"))?;
    let k = get("k").ok_or_else(|| Error::domain("parameters need k"))?;
    let (l, s) = (get("l").unwrap_or(1.0), get("s").unwrap_or(1.0));
    if strict {
        PerspectiveParams::new(omega.to_radians(), k, l, s)
    } else {
        let (p, adj) = PerspectiveParams::clamp_reporting(omega.to_radians(), k, l, s)?;
        for a in adj {
            eprintln!("notice: clamped {} from {} to {}", a.name, a.from, a.to);
        }
        Ok(p)
    }
}

fn sample(img: &Plane<[u8; 4]>, t: TextureCoord, filter: Filter) -> Option<[u8; 4]> {
    if !(0.0..=1.0).contains(&t.s) || !(0.0..=1.0).contains(&t.t) {
        return None;
    }
    let (w, h) = (img.width(), img.height());
    let (x, y) = (t.s * w as f64 - 0.5, t.t * h as f64 - 0.5);
    match filter {
        Filter::Nearest => {
            let i = (x.round().max(0.0) as usize).min(w - 1);
            let j = (y.round().max(0.0) as usize).min(h - 1);
            Some(img.at(i, j))
        }
        Filter::Bilinear => {
            let (x, y) = (x.clamp(0.0, (w - 1) as f64), y.clamp(0.0, (h - 1) as f64));
            let (i0, j0) = (x.floor() as usize, y.floor() as usize);
            let (i1, j1) = ((i0 + 1).min(w - 1), (j0 + 1).min(h - 1));
            let (fx, fy) = (x - i0 as f64, y - j0 as f64);
            let mut out = [0u8; 4];
            for (c, o) in out.iter_mut().enumerate() {
                let p = |i: usize, j: usize| f64::from(img.at(i, j)[c]);
                let v = (p(i0, j0) * (1.0 - fx) + p(i1, j0) * fx) * (1.0 - fy)
                    + (p(i0, j1) * (1.0 - fx) + p(i1, j1) * fx) * fy;
                *o = v.round().clamp(0.0, 255.0) as u8;
            }
            Some(out)
        }
    }
}

/// Resamples `img` taken with `p_in` into a `width × height` picture with
/// `p_out`. Pixels with no source are transparent black.
pub fn remap_image(
    img: &Plane<[u8; 4]>,
    p_in: &PerspectiveParams,
    p_out: &PerspectiveParams,
    mode: AovMode,
    width: usize,
    height: usize,
    filter: Filter,
) -> Result<Plane<[u8; 4]>> {
    let asp_in = img.width() as f64 / img.height() as f64;
    let asp_out = width as f64 / height as f64;
    // validate the aspect once so per-pixel failures only mean "no source"
    texture_to_view(TextureCoord::new(0.5, 0.5), asp_out, mode)?;
    texture_to_view(TextureCoord::new(0.5, 0.5), asp_in, mode)?;
    Ok(Plane::par_from_fn(width, height, |i, j| {
        let t = crate::projections::map::texel_center(width, height, i, j);
        let src = texture_to_view(t, asp_out, mode)
            .and_then(|f| remap_2d_to_2d(f, p_out, p_in))
            .and_then(|f| view_to_texture(f, asp_in, mode));
        src.ok().and_then(|t| sample(img, t, filter)).unwrap_or([0; 4])
    }))
}

fn remap(a: &RemapArgs) -> Result<()> {
    let p_in = parse_params(&a.in_params, a.strict)?;
    let p_out = parse_params(&a.out_params, a.strict)?;
    if !a.in_image.exists() {
        return Err(Error::MissingAsset(a.in_image.clone()));
    }
    let img = read_rgba8(&a.in_image)?;
    let (w, h) = (a.width.unwrap_or(img.width()), a.height.unwrap_or(img.height()));
    let out = remap_image(&img, &p_in, &p_out, a.aov_mode.into(), w, h, a.filter)?;
    write_rgba8(&a.out_image, &out)?;
    println!("wrote {}", a.out_image.display());
    Ok(())
}

/// Rows of `θ` followed by `R_k(θ)` for each `k`, from the axis to `Ω/2`.
pub fn curve_table(omega_deg: f64, ks: &[f64], samples: usize) -> Result<Vec<Vec<f64>>> {
    if samples < 2 {
        return Err(Error::domain("curves need at least 2 samples"));
    }
    if ks.is_empty() {
        return Err(Error::domain("curves need at least one k"));
    }
    for &k in ks {
        PerspectiveParams::new(omega_deg.to_radians(), k, 1.0, 1.0)?;
    }
    let half = omega_deg.to_radians() / 2.0;
    (0..samples)
        .map(|n| {
            let theta = half * n as f64 / (samples - 1) as f64;
            let mut row = vec![theta];
            for &k in ks {
                row.push(radial_profile(theta, omega_deg.to_radians(), k)?);
            }
            Ok(row)
        })
        .collect()
}

pub fn curve_header(ks: &[f64]) -> Vec<String> {
    std::iter::once("theta_rad".to_owned()).chain(ks.iter().map(|k| format!("R_k{k}"))).collect()
}

fn curves(a: &CurvesArgs) -> Result<()> {
    let rows = curve_table(a.omega_deg, &a.k_list, a.samples)?;
    let sink: Box<dyn std::io::Write> = match &a.out_csv {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    write_curves(sink, &a.k_list, &rows)
}

pub fn write_curves(sink: impl std::io::Write, ks: &[f64], rows: &[Vec<f64>]) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Format(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(curve_header(ks)).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x:.12}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a curves CSV back into its header and rows.
pub fn read_curves(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let csv_err = |e: csv::Error| Error::Format(format!("csv: {e}"));
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(
            rec.iter()
                .map(|x| x.parse::<f64>().map_err(|e| Error::Format(format!("csv number `{x}`: {e}"))))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse_and_clamp() {
        let p = parse_params("omega=180,k=0", true).unwrap();
        assert_eq!((p.k, p.l, p.s), (0.0, 1.0, 1.0));
        assert!(matches!(parse_params("omega=90,k=2", true), Err(Error::OutOfRange { .. })));
        assert_eq!(parse_params("omega=90,k=2", false).unwrap().k, 1.0);
        assert!(parse_params("omega=90", false).is_err());
        assert!(parse_params("omega=90,k=x", false).is_err());
    }

    #[test]
    fn curve_rows_end_at_one() {
        let ks = [1.0, 0.5, 0.0, -0.5, -1.0];
        let rows = curve_table(170.0, &ks, 11).unwrap();
        assert_eq!(rows.len(), 11);
        for r in &rows[1..] {
            assert!(r.len() == 6);
        }
        for x in &rows[10][1..] {
            assert!((x - 1.0).abs() < 1e-12);
        }
        assert_eq!(curve_header(&ks)[1], "R_k1");
        assert_eq!(curve_header(&ks)[4], "R_k-0.5");
    }

    #[test]
    fn flags_build_specs() {
        let a = ProjectionArgs {
            kind: Some(ProjectionType::Universal),
            omega_deg: Some(270.0),
            k: Some(0.32),
            l: Some(0.62),
            s: Some(0.86),
            ..Default::default()
        };
        let spec = a.to_spec().unwrap();
        assert!(matches!(spec, ProjectionSpec::Universal { mode: AovMode::Diagonal, .. }));
        let bad = ProjectionArgs { kind: Some(ProjectionType::Universal), omega_deg: Some(90.0), k: Some(3.0), l: Some(1.0), s: Some(1.0), strict: true, ..Default::default() };
        assert_eq!(exit_code(&bad.to_spec().unwrap_err()), 2);
    }
}
