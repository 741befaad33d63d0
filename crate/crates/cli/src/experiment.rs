//! Experiment pipelines. Each kind declares its checks up front; numerical
//! failures turn into failed checks and failed table rows, and every output
//! file is written as soon as it is ready.

use std::io;
use std::path::Path;
use std::time::Instant;

use wlab::curves::{expected_dimension, Curve, HyperellipticCurve, PlumbingFamily, RationalNodalCurve};
use wlab::degeneration::{
    bergman_node_sweep, limit_form_check, log_divergence_check, weierstrass_node_sweep, ConcentrationTable, LOG_DIVERGENCE_SLOPE,
};
use wlab::jacobian_nodal::theta_weierstrass_check;
use wlab::measures::{weak_distance, DensityMeasure, TestFamily};
use wlab::periods::bergman_measure;
use wlab::validation::{run_criterion, CRITERIA};
use wlab::weierstrass::{expected_total_weight, weierstrass_measure, weierstrass_points};

use crate::config::{CurveModel, ExperimentConfig, Kind};
use crate::output::OutputDir;

pub const VERSION: &str = concat!("wlab ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub version: &'static str,
    pub kind: Kind,
    pub config_echo: String,
    /// Output file name and table.
    pub tables: Vec<(String, ConcentrationTable)>,
    /// Free-form result sections, titled.
    pub notes: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    /// Stage name and wall-clock seconds.
    pub timings: Vec<(String, f64)>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Everything but the timings; identical for identical configs.
    pub fn body(&self) -> String {
        let mut s = format!("{}\nkind: {}\n\n[config]\n{}", self.version, self.kind.name(), self.config_echo);
        for (file, t) in &self.tables {
            s += &format!("\n[table {file}]\n# {}\n{}", t.title, render_table(t));
        }
        for (title, text) in &self.notes {
            s += &format!("\n[{title}]\n{text}");
            if !text.ends_with('\n') {
                s.push('\n');
            }
        }
        s += "\n[checks]\n";
        for c in &self.checks {
            s += &format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        s += &format!("summary: {passed}/{} checks passed\n", self.checks.len());
        s += "\n[files]\n";
        for f in &self.files {
            s += &format!("{f}\n");
        }
        s
    }

    pub fn render(&self) -> String {
        let mut s = self.body();
        s += "\n[timings]\n";
        for (stage, secs) in &self.timings {
            s += &format!("{stage}: {secs:.3} s\n");
        }
        s
    }
}

/// Aligned plain-text rendering with 10 significant digits.
fn render_table(t: &ConcentrationTable) -> String {
    let header: Vec<String> = std::iter::once(t.parameter.clone()).chain(t.columns.iter().cloned()).collect();
    let mut rows = vec![header];
    for r in &t.rows {
        let mut cells: Vec<String> = std::iter::once(r.parameter).chain(r.values.iter().copied()).map(|v| format!("{v:.9e}")).collect();
        if let Some(f) = &r.failure {
            cells.push(format!("failed: {f}"));
        }
        rows.push(cells);
    }
    let width = rows.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(0).min(24);
    rows.iter().map(|r| r.iter().map(|c| format!("{c:>width$}")).collect::<Vec<_>>().join("  ") + "\n").collect()
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    out: OutputDir,
    report: ExperimentReport,
    pending: Vec<Option<(bool, String)>>,
}

impl<'a> Runner<'a> {
    fn declare(&mut self, names: &[&str]) {
        for n in names {
            self.report.checks.push(Check { name: n.to_string(), passed: false, detail: String::new() });
            self.pending.push(None);
        }
    }

    fn verdict(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        let k = self.report.checks.iter().position(|c| c.name == name).expect("declared check");
        self.pending[k] = Some((passed, detail.into()));
    }

    /// Fails every check without a verdict yet.
    fn abandon(&mut self, why: &wlab::Error) {
        for p in self.pending.iter_mut().filter(|p| p.is_none()) {
            *p = Some((false, format!("not evaluated: {why}")));
        }
    }

    fn timed<T>(&mut self, stage: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let v = f();
        self.report.timings.push((stage.into(), start.elapsed().as_secs_f64()));
        v
    }

    fn write(&mut self, name: &str, contents: &str) -> io::Result<()> {
        self.out.write(name, contents)
    }

    /// Writes `stem.csv` and one `stem[_column].dat` per plotted column.
    fn table(&mut self, stem: &str, table: ConcentrationTable, plots: &[(&str, bool)]) -> io::Result<()> {
        self.write(&format!("{stem}.csv"), &table.to_csv())?;
        for (i, &(col, log_x)) in plots.iter().enumerate() {
            let name = if i == 0 { format!("{stem}.dat") } else { format!("{stem}_{col}.dat") };
            if let Ok(d) = table.plot_data(col, log_x) {
                self.write(&name, &d)?;
            }
        }
        self.report.tables.push((format!("{stem}.csv"), table));
        Ok(())
    }

    fn finish(mut self) -> io::Result<ExperimentReport> {
        for (c, p) in self.report.checks.iter_mut().zip(self.pending) {
            (c.passed, c.detail) = p.unwrap_or((false, "not evaluated".into()));
        }
        self.report.files = self.out.written().to_vec();
        self.report.files.push("report.txt".into());
        self.out.write("report.txt", &self.report.render())?;
        Ok(self.report)
    }
}

/// Runs the experiment, writing its outputs under `out`. Only I/O errors
/// abort; numerical trouble is reported through failed checks.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> io::Result<ExperimentReport> {
    let mut r = Runner {
        cfg,
        out: OutputDir::create(out)?,
        report: ExperimentReport {
            version: VERSION,
            kind: cfg.kind,
            config_echo: cfg.echo(),
            tables: Vec::new(),
            notes: Vec::new(),
            checks: Vec::new(),
            files: Vec::new(),
            timings: Vec::new(),
        },
        pending: Vec::new(),
    };
    match (cfg.kind, &cfg.model) {
        (Kind::Validate, _) => validate(&mut r)?,
        (Kind::Equidistribute, Some(CurveModel::Hyperelliptic(h))) => equidistribute(&mut r, h)?,
        (Kind::NodalLimit, Some(CurveModel::Nodal(x))) => nodal_limit(&mut r, x)?,
        (Kind::ThetaCheck, Some(CurveModel::Nodal(x))) => theta_check(&mut r, x)?,
        (Kind::Degenerate, Some(CurveModel::Plumbing(p))) => degenerate(&mut r, p)?,
        (kind, _) => {
            r.declare(&["configuration"]);
            r.verdict("configuration", false, format!("kind {} has no matching curve", kind.name()));
        }
    }
    r.finish()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(", ")
}

fn ints(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.0}")).collect::<Vec<_>>().join(", ")
}

fn validate(r: &mut Runner) -> io::Result<()> {
    let names: Vec<String> = CRITERIA.iter().map(|(id, name, _)| format!("criterion {id:02} {name}")).collect();
    r.declare(&names.iter().map(String::as_str).collect::<Vec<_>>());
    let tol = r.cfg.tolerances.quadrature;
    let mut csv = String::from("id,name,passed,detail\n");
    for ((id, _, _), label) in CRITERIA.iter().zip(&names) {
        let v = r.timed(label.clone(), || run_criterion(*id, tol));
        let (passed, detail) = match v {
            Ok(v) => (v.passed, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        csv += &format!("{id},\"{}\",{passed},\"{}\"\n", label, detail.replace('"', "'"));
        r.verdict(label, passed, detail);
    }
    r.write("validation.csv", &csv)
}

fn equidistribute(r: &mut Runner, h: &HyperellipticCurve) -> io::Result<()> {
    const WEIGHTS: &str = "total weight identity";
    const DECREASE: &str = "weak distance decreases in m";
    r.declare(&[WEIGHTS, DECREASE]);
    let g = h.genus();
    let curve = Curve::Hyperelliptic(h.clone());
    let (lo, hi) = r.cfg.window();
    let tol = r.cfg.tolerances.quadrature;
    let setup = r.timed("Bergman measure", || -> wlab::Result<_> {
        let target = DensityMeasure::bergman(&bergman_measure(&curve)?, 0).with_tol(tol).scaled(1.0 / g as f64);
        Ok((target, TestFamily::standard(0, lo, hi)?))
    });
    let (target, tests) = match setup {
        Ok(v) => v,
        Err(e) => {
            r.abandon(&e);
            return Ok(());
        }
    };
    r.write("bergman_density.csv", &target.grid_csv(0, lo, hi, 41))?;
    let mut table = ConcentrationTable::new(
        "Weierstrass measures against the normalized Bergman measure",
        "m",
        ["weak_distance", "total_weight", "expected_weight", "atoms"].map(String::from).to_vec(),
    );
    for &m in &r.cfg.grid.m.clone() {
        let row = r.timed(format!("m = {m}"), || -> wlab::Result<_> {
            let w = weierstrass_points(&curve, m)?;
            let expected = expected_total_weight(g, m, expected_dimension(g, m));
            let d = weak_distance(&weierstrass_measure(&w)?.measure, &target, &tests)?;
            Ok((w.to_csv(), vec![d, w.total_weight as f64, expected as f64, w.atoms.len() as f64]))
        });
        match row {
            Ok((csv, values)) => {
                r.write(&format!("weierstrass_m{m}.csv"), &csv)?;
                table.push(m as f64, Ok(values));
            }
            Err(e) => table.push(m as f64, Err(e)),
        }
    }
    let failed = table.failures();
    let d = table.column("weak_distance").unwrap_or_default();
    let (w, e) = (table.column("total_weight").unwrap_or_default(), table.column("expected_weight").unwrap_or_default());
    let exact = failed == 0 && w == e;
    r.verdict(
        WEIGHTS,
        exact,
        if failed > 0 { format!("{failed} failed rows") } else { format!("weights [{}] against [{}]", ints(&w), ints(&e)) },
    );
    r.verdict(DECREASE, failed == 0 && strictly_decreasing(&d), format!("weak distance [{}]", list(&d)));
    r.table("equidistribution", table, &[("weak_distance", false)])
}

fn nodal_limit(r: &mut Runner, x: &RationalNodalCurve) -> io::Result<()> {
    const ROWS: &str = "all rows computed";
    const TOTAL: &str = "unit total mass";
    const OFF: &str = "off-node mass decreases in m";
    const NODES: &str = "node masses approach 1/g";
    r.declare(&[ROWS, TOTAL, OFF, NODES]);
    let (ms, radius) = (r.cfg.grid.m.clone(), r.cfg.measure.node_radius);
    let table = match r.timed("node sweep", || weierstrass_node_sweep(x, &ms, radius)) {
        Ok(t) => t,
        Err(e) => {
            r.abandon(&e);
            return Ok(());
        }
    };
    let failed = table.failures();
    let total = table.column("total_mass").unwrap_or_default();
    let off = table.column("off_node_mass").unwrap_or_default();
    let dev = table.column("max_node_deviation").unwrap_or_default();
    r.verdict(ROWS, failed == 0, format!("{} of {} rows failed", failed, table.rows.len()));
    let worst = total.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
    r.verdict(TOTAL, failed == 0 && worst < 1e-12, format!("max |total − 1| {worst:.2e}"));
    r.verdict(OFF, failed == 0 && strictly_decreasing(&off), format!("off-node mass [{}]", list(&off)));
    r.verdict(NODES, failed == 0 && strictly_decreasing(&dev), format!("max |node mass − 1/{}| [{}]", x.genus(), list(&dev)));
    r.table("nodal_limit", table, &[("max_node_deviation", false), ("off_node_mass", false)])
}

fn theta_check(r: &mut Runner, x: &RationalNodalCurve) -> io::Result<()> {
    let ms = r.cfg.grid.m.clone();
    let names: Vec<String> = ms.iter().map(|m| format!("theta divisor at m = {m}")).collect();
    r.declare(&names.iter().map(String::as_str).collect::<Vec<_>>());
    let (controls, seed) = (r.cfg.measure.controls, r.cfg.seed);
    for (&m, name) in ms.iter().zip(&names) {
        let out = r.timed(name.clone(), || -> wlab::Result<_> {
            let w = weierstrass_points(&Curve::Nodal(x.clone()), m)?;
            theta_weierstrass_check(x, &w, controls, seed)
        });
        match out {
            Ok(check) => {
                let mut csv = String::from("role,re,im,weight,residual\n");
                for (z, w, res) in &check.atom_residuals {
                    csv += &format!("atom,{:.16e},{:.16e},{w},{res:.16e}\n", z.re, z.im);
                }
                for (z, res) in &check.control_residuals {
                    csv += &format!("control,{:.16e},{:.16e},0,{res:.16e}\n", z.re, z.im);
                }
                r.write(&format!("theta_m{m}.csv"), &csv)?;
                r.report.notes.push((name.clone(), check.report()));
                let detail = format!(
                    "shift {:?}, max atom residual {:.2e}, min control residual {:.3e}",
                    check.shift,
                    check.max_atom_residual(),
                    check.min_control_residual()
                );
                r.verdict(name, check.passed(), detail);
            }
            Err(e) => r.verdict(name, false, format!("error: {e}")),
        }
    }
    Ok(())
}

fn degenerate(r: &mut Runner, p: &PlumbingFamily) -> io::Result<()> {
    const ROWS: &str = "sweep rows computed";
    const MASS: &str = "fiber mass equals the genus";
    const NODE: &str = "node mass grows as t decreases";
    const DECAY: &str = "limit forms decay linearly in s = t²";
    const RESIDUES: &str = "third-kind residues ±1/(2πi)";
    const DIVERGENCE: &str = "third-kind norm diverges like (2/π)|log ρ|";
    r.declare(&[ROWS, MASS, NODE, DECAY, RESIDUES, DIVERGENCE]);
    let cfg = r.cfg;
    let tol = cfg.tolerances.quadrature;
    let (lo, hi) = cfg.window();
    let g = p.genus() as f64;

    let sweep = r.timed("Bergman node sweep", || -> wlab::Result<_> {
        let tests = TestFamily::standard(0, lo, hi)?;
        bergman_node_sweep(p, &cfg.grid.t, cfg.grid.rho[0], &tests, tol)
    });
    match sweep {
        Ok(table) => {
            let failed = table.failures();
            let total = table.column("total_mass").unwrap_or_default();
            let node = table.column("node_mass").unwrap_or_default();
            let worst = total.iter().map(|t| (t - g).abs()).fold(0.0, f64::max);
            r.verdict(ROWS, failed == 0, format!("{} of {} rows failed", failed, table.rows.len()));
            r.verdict(MASS, failed == 0 && worst < 1e-6, format!("max |mass − {g}| {worst:.2e}"));
            r.verdict(NODE, failed == 0 && strictly_increasing(&node), format!("node mass [{}]", list(&node)));
            r.table("bergman_node", table, &[("node_mass", true), ("complement_distance", true)])?;
        }
        Err(e) => {
            for n in [ROWS, MASS, NODE] {
                r.verdict(n, false, format!("error: {e}"));
            }
        }
    }

    // the expansion near the node needs t well inside the clearance
    let reach = 0.25 * p.node_clearance();
    let small: Vec<f64> = cfg.grid.t.iter().copied().filter(|&t| t < reach).collect();
    match r.timed("limit forms", || limit_form_check(p, &small)) {
        Ok(lf) => {
            let slopes: Vec<f64> = lf.slopes.clone();
            r.verdict(
                DECAY,
                lf.slopes_within(0.8, 1.2) && lf.third_kind_monotone(),
                format!("slopes [{}] over {} values of t below {reach:.4}", list(&slopes), small.len()),
            );
            r.verdict(RESIDUES, lf.residue_error() < 1e-8, format!("residue error {:.2e}", lf.residue_error()));
            r.report.notes.push(("limit forms".into(), lf.report()));
            r.table("limit_forms", lf.table(), &[("third_kind_residual", true)])?;
        }
        Err(e) => {
            let why = format!("error with {} values of t below {reach:.4}: {e}", small.len());
            r.verdict(DECAY, false, why.clone());
            r.verdict(RESIDUES, false, why);
        }
    }

    match r.timed("log divergence", || log_divergence_check(p, &cfg.grid.rho, None, tol)) {
        Ok(fit) => {
            let mut table = ConcentrationTable::new(
                "Third-kind norm off the node disks",
                "rho",
                ["abs_log_rho", "norm", "fitted"].map(String::from).to_vec(),
            );
            for (&rho, &n) in fit.rho_values.iter().zip(&fit.norms) {
                let x = rho.ln().abs();
                table.push(rho, Ok(vec![x, n, fit.slope * x + fit.intercept]));
            }
            let e = fit.relative_error();
            r.verdict(DIVERGENCE, e < 0.05, format!("slope {:.6} against {:.6} ({:.2}% off)", fit.slope, LOG_DIVERGENCE_SLOPE, 100.0 * e));
            r.table("log_divergence", table, &[("norm", true)])?;
        }
        Err(e) => r.verdict(DIVERGENCE, false, format!("error: {e}")),
    }
    Ok(())
}
