//! Run configuration files.
//!
//! Line-oriented: `[section]` headers, `key = value` entries, `#` starts a
//! comment. Every key belongs to a known section; unknown keys, duplicate
//! keys and entries outside a section are errors. Relative paths resolve
//! against the directory of the file that names them.
//!
//! ```text
//! [domain]
//! dx = 33.333333333333336
//! [media]
//! c0 = 2000
//! q = 100
//! [source]
//! kind = ricker
//! f0 = 0.005
//! [time]
//! dt = 1e-3
//! t_end = 0.3
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fraclap::{FracOpConfig, GlShift};
use crate::geometry::{generate_cloud, Domain2D, Point, Polygon};
use crate::harness::{self, ManufacturedCase};
use crate::media::{EquationMode, Layer, MediumParams, Raster, VelocityField};
use crate::rbf::Multiquadric;
use crate::reference::{SpectralGrid, SpectralScenario};
use crate::stepper::{AssemblyOptions, ForceTerm, InitialField, Scenario, SnapshotGrid};

const SCHEMA: &[(&str, &[&str])] = &[
    ("domain", &["kind", "x_min", "x_max", "y_min", "y_max", "polygon", "dx"]),
    ("media", &["c0", "layers", "raster", "q", "omega0", "rho0"]),
    ("source", &["kind", "f0", "x", "y"]),
    ("force", &["kind"]),
    ("time", &["dt", "t_end", "snapshots"]),
    ("operator", &["h", "n_theta", "shift"]),
    ("solver", &["kind", "mode", "shape", "diagonal_shift", "spectral_nx", "spectral_ny"]),
    ("output", &["dir", "receivers", "grid_nx", "grid_ny", "monitor_every"]),
    ("study", &["point_counts"]),
];

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Rectangle { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
    Polygon { path: PathBuf, polygon: Polygon },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MediaSpec {
    Constant(f64),
    Layers(Vec<Layer>),
    Raster { path: PathBuf, raster: Raster },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceSpec {
    None,
    Ricker { f0: f64, x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceSpec {
    None,
    /// The manufactured solution of [`crate::harness`] drives the run.
    Manufactured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Rbf,
    Spectral,
}

/// Fully validated run parameters with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub dx: f64,
    pub media: MediaSpec,
    pub q_factor: f64,
    pub omega0: f64,
    pub rho0: f64,
    pub source: SourceSpec,
    pub force: ForceSpec,
    pub dt: f64,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub op: FracOpConfig,
    pub solver: SolverKind,
    pub mode: EquationMode,
    pub shape: f64,
    pub diagonal_shift: f64,
    pub spectral_nx: usize,
    pub spectral_ny: usize,
    pub out_dir: PathBuf,
    pub receivers: Vec<Point>,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub monitor_every: usize,
    pub point_counts: Vec<usize>,
    /// `section.key` names filled from defaults.
    pub defaulted: BTreeSet<String>,
}

struct Entry {
    value: String,
    line: usize,
    /// Carried a `# (default)` marker, as written in manifests.
    marked_default: bool,
}

/// Key lookup with default tracking.
struct Reader<'a> {
    origin: String,
    base: &'a Path,
    entries: BTreeMap<(String, String), Entry>,
    defaulted: BTreeSet<String>,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn has(&self, section: &str, key: &str) -> bool {
        self.raw(section, key).is_some()
    }

    fn err(&self, e: &Entry, msg: String) -> Error {
        Error::Parse { path: self.origin.clone(), line: e.line, msg }
    }

    fn parsed<T>(&mut self, section: &str, key: &str, default: Option<T>, parse: impl Fn(&str) -> Option<T>) -> Result<T> {
        match self.raw(section, key) {
            Some(e) => {
                let v = parse(e.value.trim()).ok_or_else(|| self.err(e, format!("invalid value '{}' for {section}.{key}", e.value)))?;
                if e.marked_default {
                    self.defaulted.insert(format!("{section}.{key}"));
                }
                Ok(v)
            }
            None => match default {
                Some(d) => {
                    self.defaulted.insert(format!("{section}.{key}"));
                    Ok(d)
                }
                None => Err(Error::Config(format!("missing required key {section}.{key}"))),
            },
        }
    }

    fn f64(&mut self, section: &str, key: &str, default: Option<f64>) -> Result<f64> {
        self.parsed(section, key, default, parse_f64)
    }

    fn usize(&mut self, section: &str, key: &str, default: Option<usize>) -> Result<usize> {
        self.parsed(section, key, default, |s| s.parse().ok())
    }

    fn word(&mut self, section: &str, key: &str, default: &str) -> Result<String> {
        self.parsed(section, key, Some(default.to_string()), |s| Some(s.to_string()))
    }

    fn path(&mut self, section: &str, key: &str) -> Result<PathBuf> {
        let p = self.parsed(section, key, None, |s| Some(PathBuf::from(s)))?;
        let full = if p.is_absolute() { p } else { self.base.join(p) };
        if !full.exists() {
            let e = self.raw(section, key).expect("path key present");
            return Err(self.err(e, format!("{section}.{key}: file {} does not exist", full.display())));
        }
        Ok(full)
    }

    fn check(&self, section: &str, key: &str, ok: bool, msg: &str) -> Result<()> {
        if ok {
            return Ok(());
        }
        match self.raw(section, key) {
            Some(e) => Err(self.err(e, format!("{section}.{key}: {msg}"))),
            None => Err(Error::Config(format!("{section}.{key}: {msg}"))),
        }
    }
}

/// Accepts `inf` for the lossless quality factor.
fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" | "infinity" => Some(f64::INFINITY),
        _ => s.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(item).collect()
}

/// `x y; x y; ...`
fn parse_points(s: &str) -> Option<Vec<Point>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|pair| {
            let v: Vec<f64> = pair.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
            (v.len() == 2).then(|| Point::new(v[0], v[1]))
        })
        .collect()
}

/// `y_low y_high c0; ...`
fn parse_layers(s: &str) -> Option<Vec<Layer>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|triple| {
            let v: Vec<f64> = triple.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
            (v.len() == 3).then(|| Layer { y_low: v[0], y_high: v[1], c0: v[2] })
        })
        .collect()
}

fn tokenize(text: &str, origin: &str) -> Result<BTreeMap<(String, String), Entry>> {
    let mut entries = BTreeMap::new();
    let mut section: Option<&str> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let perr = |msg: String| Error::Parse { path: origin.to_string(), line, msg };
        let (content, comment) = raw.split_once('#').unwrap_or((raw, ""));
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| perr(format!("malformed section header '{content}'")))?.trim();
            let known = SCHEMA.iter().find(|(s, _)| *s == name).ok_or_else(|| perr(format!("unknown section [{name}]")))?;
            section = Some(known.0);
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| perr(format!("expected 'key = value', got '{content}'")))?;
        let key = key.trim();
        let sec = section.ok_or_else(|| perr(format!("key '{key}' before any section")))?;
        let keys = SCHEMA.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !keys.contains(&key) {
            return Err(perr(format!("unknown key '{key}' in [{sec}]")));
        }
        let value = value.trim();
        if value.is_empty() {
            return Err(perr(format!("empty value for {sec}.{key}")));
        }
        let slot = (sec.to_string(), key.to_string());
        if entries.contains_key(&slot) {
            return Err(perr(format!("duplicate key {sec}.{key}")));
        }
        entries.insert(slot, Entry { value: value.to_string(), line, marked_default: comment.trim() == "(default)" });
    }
    Ok(entries)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_str(&text, &path.display().to_string(), base)
}

/// Parses config text; `base` resolves relative paths.
pub fn parse_str(text: &str, origin: &str, base: &Path) -> Result<RunConfig> {
    let entries = tokenize(text, origin)?;
    let mut r = Reader { origin: origin.to_string(), base, entries, defaulted: BTreeSet::new() };

    let kind = r.word("domain", "kind", "rectangle")?;
    let domain = match kind.as_str() {
        "rectangle" => {
            let x_min = r.f64("domain", "x_min", Some(0.0))?;
            let x_max = r.f64("domain", "x_max", Some(1000.0))?;
            let y_min = r.f64("domain", "y_min", Some(0.0))?;
            let y_max = r.f64("domain", "y_max", Some(1000.0))?;
            r.check("domain", "x_max", x_max > x_min && y_max > y_min, "rectangle must have x_max > x_min and y_max > y_min")?;
            DomainSpec::Rectangle { x_min, x_max, y_min, y_max }
        }
        "polygon" => {
            let path = r.path("domain", "polygon")?;
            let polygon = Polygon::read(&path)?;
            DomainSpec::Polygon { path, polygon }
        }
        other => return Err(Error::Config(format!("domain.kind must be rectangle or polygon, got '{other}'"))),
    };
    let dx = r.f64("domain", "dx", None)?;
    r.check("domain", "dx", dx > 0.0 && dx.is_finite(), "must be positive")?;

    let chosen = ["c0", "layers", "raster"].iter().filter(|k| r.has("media", k)).count();
    if chosen != 1 {
        return Err(Error::Config("exactly one of media.c0, media.layers, media.raster is required".into()));
    }
    let media = if r.has("media", "c0") {
        let c0 = r.f64("media", "c0", None)?;
        r.check("media", "c0", c0 > 0.0 && c0.is_finite(), "must be positive")?;
        MediaSpec::Constant(c0)
    } else if r.has("media", "layers") {
        let layers = r.parsed("media", "layers", None, parse_layers)?;
        VelocityField::layered(layers.clone())?;
        MediaSpec::Layers(layers)
    } else {
        let path = r.path("media", "raster")?;
        let raster = Raster::read(&path)?;
        MediaSpec::Raster { path, raster }
    };
    let q_factor = r.f64("media", "q", None)?;
    r.check("media", "q", q_factor > 0.0, "must be positive or inf")?;
    let omega0 = r.f64("media", "omega0", Some(60.0))?;
    r.check("media", "omega0", omega0 > 0.0 && omega0.is_finite(), "must be positive")?;
    let rho0 = r.f64("media", "rho0", Some(1.0))?;

    let (bx0, bx1, by0, by1) = domain_of(&domain).bounds();
    let source = match r.word("source", "kind", "none")?.as_str() {
        "none" => SourceSpec::None,
        "ricker" => {
            let f0 = r.f64("source", "f0", None)?;
            r.check("source", "f0", f0 > 0.0 && f0.is_finite(), "must be positive")?;
            let x = r.f64("source", "x", Some(0.5 * (bx0 + bx1)))?;
            let y = r.f64("source", "y", Some(0.5 * (by0 + by1)))?;
            SourceSpec::Ricker { f0, x, y }
        }
        other => return Err(Error::Config(format!("source.kind must be none or ricker, got '{other}'"))),
    };
    let force = match r.word("force", "kind", "none")?.as_str() {
        "none" => ForceSpec::None,
        "manufactured" => ForceSpec::Manufactured,
        other => return Err(Error::Config(format!("force.kind must be none or manufactured, got '{other}'"))),
    };

    let dt = r.f64("time", "dt", Some(1e-7))?;
    r.check("time", "dt", dt > 0.0 && dt.is_finite(), "must be positive")?;
    let t_end = r.f64("time", "t_end", None)?;
    r.check("time", "t_end", t_end >= dt && t_end.is_finite(), "must be at least one time step")?;
    let snapshots = r.parsed("time", "snapshots", Some(vec![t_end]), |s| parse_list(s, parse_f64))?;
    r.check(
        "time",
        "snapshots",
        snapshots.iter().all(|&t| (0.0..=t_end * (1.0 + 1e-12)).contains(&t)),
        "snapshot times must lie in [0, t_end]",
    )?;

    let h = r.f64("operator", "h", Some(1.0))?;
    let n_theta = r.usize("operator", "n_theta", Some(20))?;
    let shift = r.parsed("operator", "shift", Some(GlShift::Auto), |s| GlShift::parse(s).ok())?;
    let op = FracOpConfig { h, n_theta, shift };
    op.validate()?;

    let solver = match r.word("solver", "kind", "rbf")?.as_str() {
        "rbf" => SolverKind::Rbf,
        "spectral" => SolverKind::Spectral,
        other => return Err(Error::Config(format!("solver.kind must be rbf or spectral, got '{other}'"))),
    };
    let mode = r.parsed("solver", "mode", Some(EquationMode::Full), EquationMode::parse)?;
    let shape = r.f64("solver", "shape", Some(dx))?;
    r.check("solver", "shape", shape > 0.0 && shape.is_finite(), "must be positive")?;
    let diagonal_shift = r.f64("solver", "diagonal_shift", Some(0.0))?;
    let spectral_nx = r.usize("solver", "spectral_nx", Some((((bx1 - bx0) / dx).round() as usize).max(2)))?;
    let spectral_ny = r.usize("solver", "spectral_ny", Some((((by1 - by0) / dx).round() as usize).max(2)))?;

    let out_dir = r.parsed("output", "dir", Some(PathBuf::from("fracwave_out")), |s| Some(PathBuf::from(s)))?;
    let receivers = r.parsed("output", "receivers", Some(vec![]), parse_points)?;
    let grid_nx = r.usize("output", "grid_nx", Some(51))?;
    let grid_ny = r.usize("output", "grid_ny", Some(51))?;
    r.check("output", "grid_nx", grid_nx >= 2 && grid_ny >= 2, "snapshot grid needs at least 2x2 nodes")?;
    let monitor_every = r.usize("output", "monitor_every", Some(0))?;

    let point_counts = r.parsed("study", "point_counts", Some(vec![121, 441, 961]), |s| parse_list(s, |t| t.parse().ok()))?;

    if force == ForceSpec::Manufactured {
        let square = matches!(domain, DomainSpec::Rectangle { x_min, x_max, y_min, y_max }
            if x_min == 0.0 && y_min == 0.0 && x_max == harness::SIDE && y_max == harness::SIDE);
        if !square || source != SourceSpec::None {
            return Err(Error::Config("force.kind = manufactured needs the default (0, 1000)^2 rectangle and no source".into()));
        }
    }
    if solver == SolverKind::Spectral {
        if !matches!(domain, DomainSpec::Rectangle { .. }) || !matches!(media, MediaSpec::Constant(_)) {
            return Err(Error::Config("the spectral solver needs a rectangle and a constant c0".into()));
        }
        if force == ForceSpec::Manufactured {
            return Err(Error::Config("the spectral solver does not run the manufactured case".into()));
        }
    }

    Ok(RunConfig {
        domain,
        dx,
        media,
        q_factor,
        omega0,
        rho0,
        source,
        force,
        dt,
        t_end,
        snapshots,
        op,
        solver,
        mode,
        shape,
        diagonal_shift,
        spectral_nx,
        spectral_ny,
        out_dir,
        receivers,
        grid_nx,
        grid_ny,
        monitor_every,
        point_counts,
        defaulted: r.defaulted,
    })
}

fn domain_of(spec: &DomainSpec) -> Domain2D {
    match spec {
        DomainSpec::Rectangle { x_min, x_max, y_min, y_max } => Domain2D::Rectangle { x_min: *x_min, x_max: *x_max, y_min: *y_min, y_max: *y_max },
        DomainSpec::Polygon { polygon, .. } => Domain2D::Polygon(polygon.clone()),
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

impl RunConfig {
    pub fn domain(&self) -> Domain2D {
        domain_of(&self.domain)
    }

    pub fn velocity(&self) -> Result<VelocityField> {
        match &self.media {
            MediaSpec::Constant(c0) => VelocityField::constant(*c0),
            MediaSpec::Layers(l) => VelocityField::layered(l.clone()),
            MediaSpec::Raster { raster, .. } => Ok(VelocityField::Raster(raster.clone())),
        }
    }

    pub fn medium(&self) -> Result<MediumParams> {
        MediumParams::new(self.q_factor, self.omega0, self.rho0)
    }

    fn initial(&self) -> InitialField {
        match (self.force, self.source) {
            (ForceSpec::Manufactured, _) => InitialField::Custom(Arc::new(harness::spatial_factor)),
            (_, SourceSpec::Ricker { f0, x, y }) => InitialField::Ricker { f0, x, y },
            (_, SourceSpec::None) => InitialField::Zero,
        }
    }

    pub fn manufactured_case(&self) -> Result<ManufacturedCase> {
        let c0 = match self.media {
            MediaSpec::Constant(c0) => c0,
            _ => return Err(Error::Config("the manufactured case needs a constant c0".into())),
        };
        Ok(ManufacturedCase {
            c0,
            q_factor: self.q_factor,
            omega0: self.omega0,
            op: self.op,
            force_op: harness::refined(&self.op),
            dt: self.dt,
            t_end: self.t_end,
        })
    }

    /// Collocation scenario for the RBF solver.
    pub fn scenario(&self) -> Result<Scenario> {
        let domain = self.domain();
        let cloud = generate_cloud(&domain, self.dx)?;
        let force = match self.force {
            ForceSpec::None => ForceTerm::None,
            ForceSpec::Manufactured => {
                let case = self.manufactured_case()?;
                use rayon::prelude::*;
                let spatial = cloud.interior.par_iter().map(|&p| case.force_spatial(p)).collect::<Result<Vec<_>>>()?;
                ForceTerm::Separable { spatial, temporal: Arc::new(|t: f64| (-t).exp()) }
            }
        };
        Ok(Scenario {
            grid: SnapshotGrid::new(&domain, self.grid_nx, self.grid_ny),
            basis: Multiquadric::new(self.shape)?,
            medium: self.medium()?,
            velocity: self.velocity()?,
            assembly: AssemblyOptions { op: self.op, mode: self.mode, dt: self.dt, diagonal_shift: self.diagonal_shift },
            initial: self.initial(),
            force,
            t_end: self.t_end,
            snapshot_times: self.snapshots.clone(),
            receivers: self.receivers.clone(),
            monitor_every: self.monitor_every,
            domain,
            cloud,
        })
    }

    /// Reference scenario on the periodic box spanned by the rectangle.
    pub fn spectral_scenario(&self) -> Result<SpectralScenario> {
        let (DomainSpec::Rectangle { x_min, x_max, y_min, y_max }, MediaSpec::Constant(c0)) = (&self.domain, &self.media) else {
            return Err(Error::Config("the spectral solver needs a rectangle and a constant c0".into()));
        };
        let grid = SpectralGrid::new(self.spectral_nx, self.spectral_ny, x_max - x_min, y_max - y_min, *x_min, *y_min)?;
        Ok(SpectralScenario {
            grid,
            medium: self.medium()?,
            c0: *c0,
            mode: self.mode,
            dt: self.dt,
            t_end: self.t_end,
            initial: self.initial(),
            force: ForceTerm::None,
            snapshot_times: self.snapshots.clone(),
            receivers: self.receivers.clone(),
            targets: SnapshotGrid::new(&self.domain(), self.grid_nx, self.grid_ny).points,
            monitor_every: self.monitor_every,
        })
    }

    /// Snapshot grid shared by both solvers.
    pub fn snapshot_grid(&self) -> SnapshotGrid {
        SnapshotGrid::new(&self.domain(), self.grid_nx, self.grid_ny)
    }

    /// Every effective parameter in config syntax; defaults carry a
    /// `# (default)` marker. Parsing the manifest yields this config again.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let mut section = "";
        let mut put = |s: &mut String, sec: &'static str, key: &str, value: String| {
            if sec != section {
                if !section.is_empty() {
                    s.push('\n');
                }
                let _ = writeln!(s, "[{sec}]");
                section = sec;
            }
            let mark = if self.defaulted.contains(&format!("{sec}.{key}")) { "  # (default)" } else { "" };
            let _ = writeln!(s, "{key} = {value}{mark}");
        };
        match &self.domain {
            DomainSpec::Rectangle { x_min, x_max, y_min, y_max } => {
                put(&mut s, "domain", "kind", "rectangle".into());
                put(&mut s, "domain", "x_min", x_min.to_string());
                put(&mut s, "domain", "x_max", x_max.to_string());
                put(&mut s, "domain", "y_min", y_min.to_string());
                put(&mut s, "domain", "y_max", y_max.to_string());
            }
            DomainSpec::Polygon { path, .. } => {
                put(&mut s, "domain", "kind", "polygon".into());
                put(&mut s, "domain", "polygon", absolute(path));
            }
        }
        put(&mut s, "domain", "dx", self.dx.to_string());
        match &self.media {
            MediaSpec::Constant(c0) => put(&mut s, "media", "c0", c0.to_string()),
            MediaSpec::Layers(layers) => {
                let v: Vec<String> = layers.iter().map(|l| format!("{} {} {}", l.y_low, l.y_high, l.c0)).collect();
                put(&mut s, "media", "layers", v.join("; "));
            }
            MediaSpec::Raster { path, .. } => put(&mut s, "media", "raster", absolute(path)),
        }
        put(&mut s, "media", "q", if self.q_factor.is_infinite() { "inf".into() } else { self.q_factor.to_string() });
        put(&mut s, "media", "omega0", self.omega0.to_string());
        put(&mut s, "media", "rho0", self.rho0.to_string());
        match self.source {
            SourceSpec::None => put(&mut s, "source", "kind", "none".into()),
            SourceSpec::Ricker { f0, x, y } => {
                put(&mut s, "source", "kind", "ricker".into());
                put(&mut s, "source", "f0", f0.to_string());
                put(&mut s, "source", "x", x.to_string());
                put(&mut s, "source", "y", y.to_string());
            }
        }
        let force = match self.force {
            ForceSpec::None => "none",
            ForceSpec::Manufactured => "manufactured",
        };
        put(&mut s, "force", "kind", force.into());
        put(&mut s, "time", "dt", self.dt.to_string());
        put(&mut s, "time", "t_end", self.t_end.to_string());
        put(&mut s, "time", "snapshots", join(&self.snapshots, ", "));
        put(&mut s, "operator", "h", self.op.h.to_string());
        put(&mut s, "operator", "n_theta", self.op.n_theta.to_string());
        put(&mut s, "operator", "shift", self.op.shift.name().into());
        let solver = match self.solver {
            SolverKind::Rbf => "rbf",
            SolverKind::Spectral => "spectral",
        };
        put(&mut s, "solver", "kind", solver.into());
        put(&mut s, "solver", "mode", self.mode.name().into());
        put(&mut s, "solver", "shape", self.shape.to_string());
        put(&mut s, "solver", "diagonal_shift", self.diagonal_shift.to_string());
        put(&mut s, "solver", "spectral_nx", self.spectral_nx.to_string());
        put(&mut s, "solver", "spectral_ny", self.spectral_ny.to_string());
        put(&mut s, "output", "dir", absolute(&self.out_dir));
        if !self.receivers.is_empty() {
            let v: Vec<String> = self.receivers.iter().map(|p| format!("{} {}", p.x, p.y)).collect();
            put(&mut s, "output", "receivers", v.join("; "));
        }
        put(&mut s, "output", "grid_nx", self.grid_nx.to_string());
        put(&mut s, "output", "grid_ny", self.grid_ny.to_string());
        put(&mut s, "output", "monitor_every", self.monitor_every.to_string());
        put(&mut s, "study", "point_counts", join(&self.point_counts, ", "));
        s
    }
}

fn absolute(p: &Path) -> String {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf()).display().to_string()
}
