//! Experiment configuration: a TOML document with a `kind`, a curve, grids,
//! measure settings and tolerances. Everything is checked here, before any
//! computation starts.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;
use wlab::curves::{HyperellipticCurve, PlumbingFamily, RationalNodalCurve};
use wlab::degeneration::SweepGrid;
use wlab::measures::QUAD_TOL;
use wlab::numerics::CPoly;
use wlab::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Equidistribute,
    NodalLimit,
    Degenerate,
    ThetaCheck,
    Validate,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Equidistribute => "equidistribute",
            Kind::NodalLimit => "nodal-limit",
            Kind::Degenerate => "degenerate",
            Kind::ThetaCheck => "theta-check",
            Kind::Validate => "validate",
        }
    }
}

/// A rejected configuration, located by file, line and field where known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: Option<PathBuf>,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.file {
            write!(f, "{}:", p.display())?;
        }
        if let Some(l) = self.line {
            write!(f, "{l}:")?;
        }
        if self.file.is_some() || self.line.is_some() {
            f.write_str(" ")?;
        }
        if let Some(k) = &self.field {
            write!(f, "{k}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Curve data as written in a config or curve file. Exactly one of
/// `coefficients`, `branch_points`, `nodes`, `q_roots` (or a `file`) is set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// y² = p(x), coefficients in ascending order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch_points: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lead: Option<[f64; 2]>,
    /// Node preimage pairs of a rational nodal curve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<[[f64; 2]; 2]>>,
    /// Roots of q in the plumbing family y² = (x² − t²)·q(x).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_roots: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug)]
pub enum CurveModel {
    Hyperelliptic(HyperellipticCurve),
    Nodal(RationalNodalCurve),
    Plumbing(PlumbingFamily),
}

impl CurveModel {
    pub fn label(&self) -> &'static str {
        match self {
            CurveModel::Hyperelliptic(_) => "hyperelliptic",
            CurveModel::Nodal(_) => "rational nodal",
            CurveModel::Plumbing(_) => "plumbing family",
        }
    }

    pub fn genus(&self) -> usize {
        match self {
            CurveModel::Hyperelliptic(h) => h.genus(),
            CurveModel::Nodal(x) => x.genus(),
            CurveModel::Plumbing(p) => p.genus(),
        }
    }
}

fn c(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl CurveSpec {
    /// Builds the curve; errors name the offending key.
    pub fn build(&self) -> Result<CurveModel, (String, String)> {
        let set = [
            ("coefficients", self.coefficients.is_some()),
            ("branch_points", self.branch_points.is_some()),
            ("nodes", self.nodes.is_some()),
            ("q_roots", self.q_roots.is_some()),
        ];
        let given: Vec<&str> = set.iter().filter(|s| s.1).map(|s| s.0).collect();
        if given.len() != 1 {
            let msg = if given.is_empty() {
                "one of coefficients, branch_points, nodes, q_roots is required".to_string()
            } else {
                format!("only one of {} may be given", given.join(", "))
            };
            return Err(("curve".into(), msg));
        }
        let key = given[0];
        if self.lead.is_some() && !matches!(key, "branch_points" | "q_roots") {
            return Err(("curve.lead".into(), format!("lead only applies to branch_points or q_roots, not {key}")));
        }
        let lead = self.lead.map_or(C64::new(1.0, 0.0), c);
        let err = |e: wlab::Error| (format!("curve.{key}"), e.to_string());
        let pts = |v: &[[f64; 2]]| v.iter().copied().map(c).collect::<Vec<C64>>();
        match key {
            "coefficients" => {
                let p = CPoly::new(pts(self.coefficients.as_deref().unwrap_or_default()));
                HyperellipticCurve::new(p).map(CurveModel::Hyperelliptic).map_err(err)
            }
            "branch_points" => HyperellipticCurve::from_branch_points(lead, pts(self.branch_points.as_deref().unwrap_or_default()))
                .map(CurveModel::Hyperelliptic)
                .map_err(err),
            "nodes" => {
                let pairs = self.nodes.iter().flatten().map(|[b, c2]| (c(*b), c(*c2))).collect();
                RationalNodalCurve::new(pairs).map(CurveModel::Nodal).map_err(err)
            }
            _ => PlumbingFamily::from_roots(lead, pts(self.q_roots.as_deref().unwrap_or_default())).map(CurveModel::Plumbing).map_err(err),
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    m: Option<Spanned<Vec<usize>>>,
    t: Option<Spanned<Vec<f64>>>,
    rho: Option<Spanned<Vec<f64>>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    window: Option<Spanned<[[f64; 2]; 2]>>,
    node_radius: Option<Spanned<f64>>,
    controls: Option<Spanned<usize>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    quadrature: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Kind,
    seed: Option<u64>,
    out: Option<String>,
    curve: Option<Spanned<CurveSpec>>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    measure: RawMeasure,
    #[serde(default)]
    tolerances: RawTolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub m: Vec<usize>,
    pub t: Vec<f64>,
    pub rho: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureSettings {
    /// Lower-left and upper-right corners of the test-function window.
    pub window: [[f64; 2]; 2],
    pub node_radius: f64,
    pub controls: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub quadrature: f64,
}

/// A validated experiment. Serializes to the config echo of the report;
/// the output directory and the built curve are not part of the echo.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    pub grid: Grid,
    pub measure: MeasureSettings,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub model: Option<CurveModel>,
}

pub const DEFAULT_SEED: u64 = 2024;

impl ExperimentConfig {
    /// The configuration `wlab validate` runs with.
    pub fn validation(tol: f64) -> Self {
        let std = SweepGrid::standard();
        ExperimentConfig {
            kind: Kind::Validate,
            seed: DEFAULT_SEED,
            curve: None,
            grid: Grid { m: std.m_values, t: std.t_values, rho: std.rho_values },
            measure: MeasureSettings { window: [[-1.5, -1.5], [1.5, 1.5]], node_radius: 0.1, controls: 20 },
            tolerances: Tolerances { quadrature: tol },
            out: None,
            model: None,
        }
    }

    pub fn echo(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("# config echo unavailable: {e}\n"))
    }

    pub fn window(&self) -> (C64, C64) {
        (c(self.measure.window[0]), c(self.measure.window[1]))
    }
}

/// 1-based line of a byte offset.
fn line_at(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

struct Ctx<'a> {
    src: &'a str,
    file: Option<PathBuf>,
}

impl Ctx<'_> {
    fn err(&self, span: Option<std::ops::Range<usize>>, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            file: self.file.clone(),
            line: span.map(|s| line_at(self.src, s.start)),
            field: Some(field.into()),
            message: message.into(),
        }
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Parses and validates a config document. `file` is used for diagnostics
/// and to resolve curve file references relative to the config.
pub fn parse_config(src: &str, file: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
    let ctx = Ctx { src, file: file.map(Path::to_path_buf) };
    let raw: RawConfig = toml::from_str(src).map_err(|e| ConfigError {
        file: ctx.file.clone(),
        line: e.span().map(|s| line_at(src, s.start)),
        field: None,
        message: e.message().trim().to_string(),
    })?;
    let kind = raw.kind;
    let std = SweepGrid::standard();

    let default_m = match kind {
        Kind::Equidistribute => vec![2, 4, 8],
        Kind::ThetaCheck => vec![2],
        _ => std.m_values.clone(),
    };
    let (m, m_span) = raw.grid.m.map_or((default_m, None), |s| (s.get_ref().clone(), Some(s.span())));
    let (t, t_span) = raw.grid.t.map_or((std.t_values.clone(), None), |s| (s.get_ref().clone(), Some(s.span())));
    let (rho, rho_span) = raw.grid.rho.map_or((std.rho_values.clone(), None), |s| (s.get_ref().clone(), Some(s.span())));
    if m.is_empty() || m[0] == 0 || m.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ctx.err(m_span, "grid.m", "must be a nonempty, strictly increasing list of integers ≥ 1"));
    }
    if matches!(kind, Kind::NodalLimit | Kind::ThetaCheck) && m[0] < 2 {
        return Err(ctx.err(m_span, "grid.m", "nodal curves need m ≥ 2"));
    }
    if t.is_empty() || t.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || !strictly_decreasing(&t) {
        return Err(ctx.err(t_span, "grid.t", "must be a nonempty, strictly decreasing list of positive numbers"));
    }
    if rho.is_empty() || rho.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || !strictly_decreasing(&rho) {
        return Err(ctx.err(rho_span, "grid.rho", "radii must be positive and strictly decreasing"));
    }
    if kind == Kind::Degenerate && rho.len() < 2 {
        return Err(ctx.err(rho_span, "grid.rho", "the divergence fit needs at least 2 radii"));
    }
    SweepGrid::new(t.clone(), m.clone(), rho.clone()).map_err(|e| ctx.err(None, "grid", e.to_string()))?;

    let default_window = if kind == Kind::Degenerate { [[-1.0, -1.0], [1.0, 1.0]] } else { [[-1.5, -1.5], [1.5, 1.5]] };
    let (window, w_span) = raw.measure.window.map_or((default_window, None), |s| (*s.get_ref(), Some(s.span())));
    if window.iter().flatten().any(|v| !v.is_finite()) || !(window[0][0] < window[1][0] && window[0][1] < window[1][1]) {
        return Err(ctx.err(w_span, "measure.window", "needs [[x0, y0], [x1, y1]] with x0 < x1 and y0 < y1"));
    }
    let (node_radius, nr_span) = raw.measure.node_radius.map_or((0.1, None), |s| (*s.get_ref(), Some(s.span())));
    if !(node_radius > 0.0) || !node_radius.is_finite() {
        return Err(ctx.err(nr_span, "measure.node_radius", format!("radius must be positive, got {node_radius}")));
    }
    let (controls, ct_span) = raw.measure.controls.map_or((20, None), |s| (*s.get_ref(), Some(s.span())));
    if controls == 0 {
        return Err(ctx.err(ct_span, "measure.controls", "at least one control point is needed"));
    }
    let (quadrature, q_span) = raw.tolerances.quadrature.map_or((QUAD_TOL, None), |s| (*s.get_ref(), Some(s.span())));
    if !(quadrature > 0.0) || !quadrature.is_finite() {
        return Err(ctx.err(q_span, "tolerances.quadrature", format!("tolerance must be positive, got {quadrature}")));
    }

    let (curve, model) = match raw.curve {
        None if kind == Kind::Validate => (None, None),
        None => return Err(ctx.err(None, "curve", format!("kind {} needs a [curve] section", kind.name()))),
        Some(spanned) => {
            let span = spanned.span();
            let spec = resolve_curve_file(spanned.into_inner(), file).map_err(|m| ctx.err(Some(span.clone()), "curve.file", m))?;
            let model = spec.build().map_err(|(f, m)| ctx.err(Some(span.clone()), &f, m))?;
            let wanted = match kind {
                Kind::Equidistribute => Some("hyperelliptic"),
                Kind::NodalLimit | Kind::ThetaCheck => Some("rational nodal"),
                Kind::Degenerate => Some("plumbing family"),
                Kind::Validate => None,
            };
            if let Some(w) = wanted.filter(|w| *w != model.label()) {
                return Err(ctx.err(Some(span), "curve", format!("kind {} needs a {w} curve, got a {}", kind.name(), model.label())));
            }
            if let CurveModel::Plumbing(p) = &model {
                let limit = 0.5 * p.node_clearance();
                if rho[0] >= limit {
                    return Err(ctx.err(rho_span, "grid.rho", format!("radii must stay below half the node clearance, {limit:.6}")));
                }
            }
            (Some(spec), Some(model))
        }
    };

    Ok(ExperimentConfig {
        kind,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        curve,
        grid: Grid { m, t, rho },
        measure: MeasureSettings { window, node_radius, controls },
        tolerances: Tolerances { quadrature },
        out: raw.out.map(|o| match file.and_then(Path::parent) {
            Some(dir) => dir.join(o),
            None => PathBuf::from(o),
        }),
        model,
    })
}

/// Replaces a `file = "..."` reference by the referenced curve data.
fn resolve_curve_file(spec: CurveSpec, config: Option<&Path>) -> Result<CurveSpec, String> {
    let Some(name) = spec.file.clone() else {
        return Ok(spec);
    };
    if spec != (CurveSpec { file: Some(name.clone()), ..Default::default() }) {
        return Err("a curve file reference cannot be combined with inline curve data".into());
    }
    let path = match config.and_then(Path::parent) {
        Some(dir) => dir.join(&name),
        None => PathBuf::from(&name),
    };
    let inner = load_curve_file(&path).map_err(|e| e.to_string())?;
    if inner.file.is_some() {
        return Err(format!("{}: curve files cannot reference other files", path.display()));
    }
    Ok(inner)
}

/// Reads a curve file: the keys of a `[curve]` section at top level.
pub fn load_curve_file(path: &Path) -> Result<CurveSpec, ConfigError> {
    let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
        file: Some(path.to_path_buf()),
        line: None,
        field: None,
        message: e.to_string(),
    })?;
    toml::from_str(&src).map_err(|e| ConfigError {
        file: Some(path.to_path_buf()),
        line: e.span().map(|s| line_at(&src, s.start)),
        field: None,
        message: e.message().trim().to_string(),
    })
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
        file: Some(path.to_path_buf()),
        line: None,
        field: None,
        message: e.to_string(),
    })?;
    parse_config(&src, Some(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEXTIC: &str = r#"
kind = "equidistribute"

[curve]
coefficients = [[-1, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [1, 0]]

[grid]
m = [2, 4, 8]
"#;

    #[test]
    fn parses_a_minimal_config() {
        let cfg = parse_config(SEXTIC, None).unwrap();
        assert_eq!(cfg.kind, Kind::Equidistribute);
        assert_eq!(cfg.grid.m, vec![2, 4, 8]);
        assert_eq!(cfg.model.as_ref().unwrap().genus(), 2);
        assert_eq!(cfg.tolerances.quadrature, QUAD_TOL);
    }

    #[test]
    fn negative_radius_is_located() {
        let src = "kind = \"nodal-limit\"\n[curve]\nnodes = [[[0, 0], [1, 0]], [[2, 0.5], [3, -0.5]]]\n[measure]\nnode_radius = -0.1\n";
        let e = parse_config(src, None).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("measure.node_radius"));
        assert_eq!(e.line, Some(5));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let e = parse_config("kind = \"validate\"\n\n[grid]\nm = [2, 3\n", None).unwrap_err();
        assert!(e.line.is_some());
        let e = parse_config("kind = \"validate\"\nbogus = 1\n", None).unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("bogus"), "{}", e.message);
    }

    #[test]
    fn curve_kind_must_match() {
        let src = SEXTIC.replace("equidistribute", "nodal-limit");
        let e = parse_config(&src, None).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("curve"));
        assert!(parse_config("kind = \"degenerate\"\n", None).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = parse_config(SEXTIC, None).unwrap();
        let again = parse_config(&cfg.echo(), None).unwrap();
        assert_eq!(again.echo(), cfg.echo());
    }
}
