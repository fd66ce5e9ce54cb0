use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use cavity_core::asymptotics::{
    classify_stationary, eval_partial_integrals_quadrature, leading_order_error,
    stationary_phase_leading, Gaussian, QuadratureOptions,
};
use cavity_core::geometry::{
    classify_stability, horwitz_params, CavityGeometry, HorwitzParams, StabilityReport,
};
use cavity_core::operators::{
    check_unitarity, grid_adequacy, propagator_phase_step, scaled_phase_step, Grid, Parity,
};
use cavity_core::spectrum::{
    build_operator, operator_spectrum, parity_union_defect, refine_resonance,
    resonance_wavelengths, scaled_correspondence, solve_eigenvalues, OperatorKind,
    ResonanceRefinement, SpectrumResult,
};
use cavity_core::{CavityError, Complex64 as c64};
use serde::Serialize;

use crate::config::{AsymptoticsConfig, RunConfig, SweepConfig, SweepParameter};
use crate::output::{num, opt_num, OutDir};

pub const SPECTRUM_HEADER: [&str; 7] = [
    "index",
    "re_gamma",
    "im_gamma",
    "abs_gamma",
    "arg_gamma",
    "parity",
    "residual",
];

const TOP: usize = 5;
const UNION_TOLERANCE: f64 = 1e-8;
const CORRESPONDENCE_TOLERANCE: f64 = 1e-5;
const CORRESPONDENCE_COSINE: f64 = 0.999;
const PROBE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Serialize)]
struct GridMeta {
    n: usize,
    half_width: f64,
    step: f64,
    apodization: bool,
}

impl From<&Grid> for GridMeta {
    fn from(g: &Grid) -> Self {
        Self {
            n: g.n(),
            half_width: g.half_width(),
            step: g.step(),
            apodization: g.is_apodized(),
        }
    }
}

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
struct HorwitzMeta {
    M: f64,
    F: f64,
    t: f64,
}

impl From<HorwitzParams> for HorwitzMeta {
    fn from(h: HorwitzParams) -> Self {
        Self {
            M: h.magnification,
            F: h.fresnel_number,
            t: h.chirp,
        }
    }
}

#[derive(Debug, Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    operator_kind: String,
    geometry: CavityGeometry,
    fresnel_number: f64,
    grid: GridMeta,
    /// absent when the sub-cavity is not unstable
    horwitz: Option<HorwitzMeta>,
    stability: StabilityReport,
    eigenvalues: usize,
    reported: usize,
    max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    refinement: Option<ResonanceRefinement>,
}

fn setup(config: &RunConfig) -> anyhow::Result<(CavityGeometry, Grid)> {
    cavity_core::set_threads(config.solve.threads);
    let geom = config.cavity()?;
    let grid = config.build_grid(&geom)?;
    Ok((geom, grid))
}

fn reported(config: &RunConfig, available: usize) -> usize {
    config.solve.modes.map_or(available, |m| m.min(available))
}

pub fn cmd_spectrum(config: &RunConfig, out: &OutDir) -> anyhow::Result<Vec<PathBuf>> {
    let (geom, grid) = setup(config)?;
    let kind = config.kind();
    let result = operator_spectrum(kind, &grid, &geom)
        .with_context(|| format!("solving the {kind} operator on n = {}", grid.n()))?;
    let count = reported(config, result.pairs.len());
    let mut written = Vec::new();

    let mut csv = out.csv("spectrum.csv", &SPECTRUM_HEADER)?;
    for (k, p) in result.pairs.iter().take(count).enumerate() {
        csv.row([
            k.to_string(),
            num(p.gamma.re),
            num(p.gamma.im),
            num(p.gamma.norm()),
            num(p.gamma.arg()),
            p.parity.label().to_string(),
            num(p.residual),
        ])?;
    }
    written.push(csv.finish()?);

    if let Some([lo, hi]) = config.solve.q_range {
        let mut csv = out.csv("resonances.csv", &["index", "order", "wavelength"])?;
        for (k, p) in result.pairs.iter().take(count).enumerate() {
            for r in resonance_wavelengths(p.gamma, geom.half_length, lo..=hi)? {
                csv.row([k.to_string(), r.order.to_string(), num(r.wavelength)])?;
            }
        }
        written.push(csv.finish()?);
    }

    let refinement = match (config.solve.refine, config.solve.q_range) {
        (true, Some([lo, _])) => Some(refine_resonance(kind, &grid, &geom, 0, lo)?),
        (true, None) => bail!("solve.refine needs solve.q_range"),
        _ => None,
    };

    if config.output.wants("json") {
        let meta = Meta {
            tool: "solver",
            version: env!("CARGO_PKG_VERSION"),
            command: "spectrum",
            operator_kind: config.solve.operator_kind.to_string(),
            geometry: geom,
            fresnel_number: geom.fresnel_number(),
            grid: (&grid).into(),
            horwitz: horwitz_params(&geom).ok().map(Into::into),
            stability: classify_stability(&geom),
            eigenvalues: result.pairs.len(),
            reported: count,
            max_residual: result.max_residual(),
            refinement,
        };
        written.push(out.json("meta.json", &meta)?);
    }
    Ok(written)
}

pub fn cmd_modes(
    config: &RunConfig,
    out: &OutDir,
    indices: Option<&[usize]>,
) -> anyhow::Result<Vec<PathBuf>> {
    let (geom, grid) = setup(config)?;
    let kind = config.kind();
    let result = operator_spectrum(kind, &grid, &geom)?;
    let available = reported(config, result.pairs.len());
    let default: Vec<usize> = (0..available.min(config.solve.modes.unwrap_or(1))).collect();
    let indices = indices.unwrap_or(&default);
    let mut written = Vec::new();
    for &k in indices {
        if k >= available {
            bail!("mode index {k} out of range: {available} modes reported");
        }
        written.extend(write_mode(config, out, &result, k)?);
    }
    Ok(written)
}

fn write_mode(
    config: &RunConfig,
    out: &OutDir,
    result: &SpectrumResult,
    k: usize,
) -> anyhow::Result<Vec<PathBuf>> {
    let grid = &result.grid;
    let n = grid.n();
    let mode = &result.pairs[k].mode;
    let doublet = result.kind.is_doublet();
    let name = format!("mode_{k}.csv");
    let mut csv = if doublet {
        out.csv(&name, &["component", "y", "re_v", "im_v", "intensity"])?
    } else {
        out.csv(&name, &["y", "re_v", "im_v", "intensity"])?
    };
    for (i, v) in mode.iter().enumerate() {
        let y = num(grid.points()[i % n]);
        let fields = [y, num(v.re), num(v.im), num(v.norm_sqr())];
        if doublet {
            let component = (i / n + 1).to_string();
            csv.row(std::iter::once(component).chain(fields))?;
        } else {
            csv.row(fields)?;
        }
    }
    let mut written = vec![csv.finish()?];
    if config.output.wants("pgm") {
        let peak = mode.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        let line: Vec<u8> = mode
            .iter()
            .map(|v| {
                if peak > 0.0 {
                    (255.0 * v.norm_sqr() / peak).round() as u8
                } else {
                    0
                }
            })
            .collect();
        let pixels = line.repeat(32);
        written.push(out.pgm(&format!("mode_{k}.pgm"), line.len(), &pixels)?);
    }
    Ok(written)
}

fn swept(geom: &CavityGeometry, parameter: SweepParameter, value: f64) -> Result<CavityGeometry, CavityError> {
    let (mut a, mut l, mut lambda) = (geom.half_aperture, geom.half_length, geom.wavelength);
    match parameter {
        SweepParameter::A => a = value,
        SweepParameter::L => l = value,
        SweepParameter::Lambda => lambda = value,
    }
    CavityGeometry::new(geom.mirror_radius, geom.convex_radius, l, a, lambda)
}

fn sweep_values(s: &SweepConfig) -> Vec<f64> {
    if s.steps == 1 {
        return vec![s.start];
    }
    (0..s.steps)
        .map(|k| s.start + (s.stop - s.start) * k as f64 / (s.steps - 1) as f64)
        .collect()
}

fn top_eigenvalues(config: &RunConfig, geom: &CavityGeometry) -> anyhow::Result<Vec<c64>> {
    let kind = config.kind();
    let grid = config.build_grid(geom)?;
    let values = solve_eigenvalues(&build_operator(kind, &grid, geom)?, kind)?;
    if kind == OperatorKind::DecoupledSubcavity {
        if let Some(top) = values.first() {
            if top.norm() >= 1.0 {
                return Err(CavityError::GainDetected { modulus: top.norm() }.into());
            }
        }
    }
    Ok(values.into_iter().take(TOP).collect())
}

pub fn cmd_sweep(config: &RunConfig, out: &OutDir, sweep: &SweepConfig) -> anyhow::Result<Vec<PathBuf>> {
    let (base, _) = setup(config)?;
    let mut header: Vec<String> = ["step", "parameter", "value", "fresnel_number", "chirp"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=TOP).map(|k| format!("abs_gamma_{k}")));
    header.extend((1..=TOP).map(|k| format!("arg_gamma_{k}")));
    header.push("error".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = out.csv("sweep.csv", &header)?;
    let label = match sweep.parameter {
        SweepParameter::A => "a",
        SweepParameter::L => "l",
        SweepParameter::Lambda => "lambda",
    };
    for (step, value) in sweep_values(sweep).into_iter().enumerate() {
        let mut row = vec![step.to_string(), label.to_string(), num(value)];
        let geom = swept(&base, sweep.parameter, value);
        let (fresnel, chirp) = match &geom {
            Ok(g) => (Some(g.fresnel_number()), horwitz_params(g).ok().map(|h| h.chirp)),
            Err(_) => (None, None),
        };
        row.push(opt_num(fresnel));
        row.push(opt_num(chirp));
        let solved = geom.map_err(anyhow::Error::from).and_then(|g| top_eigenvalues(config, &g));
        let (values, error) = match solved {
            Ok(v) => (v, String::new()),
            Err(e) => {
                log::warn!("sweep step {step} ({label} = {value}): {e:#}");
                (Vec::new(), format!("{e:#}"))
            }
        };
        row.extend((0..TOP).map(|k| opt_num(values.get(k).map(|z| z.norm()))));
        row.extend((0..TOP).map(|k| opt_num(values.get(k).map(|z| z.arg()))));
        row.push(error);
        csv.row(&row)?;
    }
    Ok(vec![csv.finish()?])
}

pub fn cmd_asymptotics(
    config: &RunConfig,
    out: &OutDir,
    spec: &AsymptoticsConfig,
) -> anyhow::Result<Vec<PathBuf>> {
    let geom = config.cavity()?;
    let m = match spec.magnification {
        Some(m) => m,
        None => horwitz_params(&geom)
            .context("magnification from geometry (set asymptotics.magnification to override)")?
            .magnification,
    };
    let g = Gaussian::new(spec.center, spec.width);
    let f = |x: f64| g.eval(x);
    let options = QuadratureOptions::default();
    let mut csv = out.csv(
        "asymptotics.csv",
        &[
            "y", "t", "magnification", "region", "re_i1", "im_i1", "re_i2", "im_i2", "re_i3",
            "im_i3", "re_leading", "im_leading", "rel_error", "additivity", "status",
        ],
    )?;
    for &y in &spec.y {
        for &t in &spec.t {
            let mut row = vec![num(y), num(t), num(m)];
            let region = match classify_stationary(y, m) {
                Ok(class) => class.region.label().to_string(),
                Err(CavityError::BoundaryValue { .. }) => {
                    row.push("boundary".into());
                    row.extend(std::iter::repeat(String::new()).take(10));
                    row.push("stationary point on a sub-domain boundary".into());
                    csv.row(&row)?;
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            row.push(region);
            let mut status = String::from("ok");
            match eval_partial_integrals_quadrature(y, t, m, &f, &options) {
                Ok(q) => {
                    for z in [q.i1, q.i2, q.i3] {
                        row.push(num(z.re));
                        row.push(num(z.im));
                    }
                    match stationary_phase_leading(y, t, m, &f) {
                        Ok(lead) => {
                            row.push(num(lead.total().re));
                            row.push(num(lead.total().im));
                            row.push(num(leading_order_error(&q, &lead)));
                        }
                        Err(e) => {
                            row.extend(std::iter::repeat(String::new()).take(3));
                            status = e.to_string();
                        }
                    }
                    row.push(num(q.additivity_residual()));
                }
                Err(e) => {
                    row.extend(std::iter::repeat(String::new()).take(10));
                    status = e.to_string();
                }
            }
            row.push(status);
            csv.row(&row)?;
        }
    }
    Ok(vec![csv.finish()?])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, status: Status, detail: impl Into<String>) {
        self.checks.push(Check {
            name,
            status,
            detail: detail.into(),
        });
    }

    fn record(&mut self, name: &'static str, outcome: anyhow::Result<(bool, String)>) {
        match outcome {
            Ok((true, detail)) => self.push(name, Status::Pass, detail),
            Ok((false, detail)) => self.push(name, Status::Fail, detail),
            Err(e) => self.push(name, Status::Fail, format!("{e:#}")),
        }
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            writeln!(f, "{:<width$}  {}  {}", c.name, c.status, c.detail)?;
        }
        match self.first_failure() {
            Some(c) => write!(f, "FAILED: {}", c.name),
            None => write!(f, "all checks passed"),
        }
    }
}

pub fn cmd_validate(config: &RunConfig) -> anyhow::Result<ValidationReport> {
    let (geom, grid) = setup(config)?;
    let kind = config.kind();
    let stability = classify_stability(&geom);
    let mut report = ValidationReport::default();

    report.push(
        "geometry",
        Status::Pass,
        if geom.is_paraxial() {
            "paraxial".to_string()
        } else {
            "accepted, but a >= l/5".to_string()
        },
    );

    let (stable_ok, what) = match kind {
        OperatorKind::Coupled | OperatorKind::ParityPlus | OperatorKind::ParityMinus => (
            stability.whole_cavity_stable,
            format!("whole cavity stable (L = {} < 2R = {})", geom.cavity_length(), 2.0 * geom.mirror_radius),
        ),
        OperatorKind::DecoupledSubcavity | OperatorKind::Scaled(_) => (
            stability.subcavity_unstable,
            format!(
                "sub-cavity unstable (l = {} < R - r = {})",
                geom.half_length,
                geom.mirror_radius - geom.convex_radius
            ),
        ),
    };
    report.push(
        "stability",
        if stable_ok { Status::Pass } else { Status::Fail },
        format!("{kind} needs {what}; half-trace m = {:.6}", stability.half_trace_m),
    );

    let horwitz = horwitz_params(&geom).ok();
    let scaled_applies = stability.subcavity_unstable && horwitz.is_some();
    let adequacy = {
        let s = geom.scaled();
        let step = propagator_phase_step(&grid, &s.half_cavity, s.wavelength);
        let mut ok = step < FRAC_PI_2;
        let mut detail = format!("propagator phase step {step:.4} rad");
        if let (true, Some(h)) = (scaled_applies, horwitz) {
            ok &= grid_adequacy(&grid, h.chirp, h.magnification);
            detail += &format!(
                ", scaled phase step {:.4} rad",
                scaled_phase_step(&grid, h.chirp, h.magnification)
            );
        }
        detail += " (limit pi/2)";
        (ok, detail)
    };
    report.record("grid_adequacy", Ok(adequacy));

    report.record(
        "unitarity",
        check_unitarity(&grid, &geom).map_err(Into::into).map(|u| {
            let ok = u.mask_sum == 0.0
                && u.mask_cross == 0.0
                && u.norm_conservation < 1e-12
                && u.kernel_probe < PROBE_TOLERANCE;
            (
                ok,
                format!(
                    "mask {:.1e}/{:.1e}, norm {:.1e}, probe {:.2e}, ||K'K - I|| ~ {:.2}",
                    u.mask_sum, u.mask_cross, u.norm_conservation, u.kernel_probe, u.kernel_spectral
                ),
            )
        }),
    );

    if stability.whole_cavity_stable {
        report.record(
            "parity_union",
            parity_union_defect(&grid, &geom)
                .map_err(Into::into)
                .map(|d| (d < UNION_TOLERANCE, format!("worst pair distance {d:.2e}"))),
        );
    } else {
        report.push("parity_union", Status::Skip, "whole cavity not stable");
    }

    if scaled_applies {
        let outcome = (|| -> anyhow::Result<(bool, String)> {
            let even = scaled_correspondence(&grid, &geom, Parity::Even, TOP)?;
            let odd = scaled_correspondence(&grid, &geom, Parity::Odd, TOP)?;
            let err = even.eigenvalue_error.max(odd.eigenvalue_error);
            let cos = even.min_cosine.min(odd.min_cosine);
            Ok((
                err < CORRESPONDENCE_TOLERANCE && cos > CORRESPONDENCE_COSINE,
                format!("top-{TOP} eigenvalue error {err:.2e}, min cosine {cos:.6}"),
            ))
        })();
        report.record("scaled_correspondence", outcome);
    } else {
        report.push("scaled_correspondence", Status::Skip, "sub-cavity not unstable");
    }
    Ok(report)
}

/// Sweep settings from flags, falling back to the `[sweep]` block.
pub fn resolve_sweep(
    config: &RunConfig,
    parameter: Option<SweepParameter>,
    range: Option<(f64, f64)>,
    steps: Option<usize>,
) -> anyhow::Result<SweepConfig> {
    let base = config.sweep.clone();
    let parameter = parameter
        .or(base.as_ref().map(|s| s.parameter))
        .ok_or_else(|| anyhow!("no sweep parameter: pass --parameter or add a [sweep] block"))?;
    let (start, stop) = range
        .or(base.as_ref().map(|s| (s.start, s.stop)))
        .ok_or_else(|| anyhow!("no sweep range: pass --from/--to or add a [sweep] block"))?;
    let steps = steps.or(base.as_ref().map(|s| s.steps)).unwrap_or(5);
    if steps == 0 {
        bail!("sweep needs at least one step");
    }
    Ok(SweepConfig {
        parameter,
        start,
        stop,
        steps,
    })
}
