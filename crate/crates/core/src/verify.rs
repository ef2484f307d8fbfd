//! Finite-difference verification of the derivative formulas, the resolvent
//! contour oracle, and the defective demo families.
//!
//! A sweep evaluates the family at `τ₀ + h·d` along a geometric ladder of
//! steps `h`, recomputes the eigentriple there, and compares the difference
//! quotient against the analytic derivative at `τ₀`.

use std::f64::consts::PI;

use crate::derivatives::{eigenvector_derivatives, lambda_derivative, projector_derivative};
use crate::eigentriple::{extract_triple, triple_from_decomposition, EigenSelector, EigenTriple, DEFAULT_SIMPLICITY_TOL};
use crate::error::{Error, Result};
use crate::family::{jordan_example, semisimple_example, MatrixFamily};
use crate::linalg::{eig_dense, solve_dense, CMatrix, CVector, C64};
use crate::normalize::{apply_normalization, renormalize_computed, NormalizationScheme, SchemeKind};
use crate::spectral::{build_structure, SpectralStructure};

/// Condition numbers above this make a sweep unreliable.
pub const CHI_WARNING: f64 = 1e6;
/// Pre-floor records must exceed the minimum error by this factor.
pub const FLOOR_FACTOR: f64 = 1e3;
pub const DEFAULT_NODES: usize = 64;
pub const MIN_NODES: usize = 8;
/// Eigenvalues closer than `radius·ANNULUS_GUARD` to the contour are refused.
pub const ANNULUS_GUARD: f64 = 1e-3;
/// Distance from an integer tolerated by [`count_eigs_in_disk`].
pub const INTEGER_TOL: f64 = 0.1;
pub const MIN_GRID_POINTS: usize = 5;
pub const MAX_GRID_TAU: f64 = 0.1;

/// `count` points from `first` to `last`, equally spaced in `log`.
pub fn log_ladder(first: f64, last: f64, count: usize) -> Result<Vec<f64>> {
    if !(first > 0.0 && last > 0.0 && first.is_finite() && last.is_finite()) {
        return Err(Error::InvalidArgument("ladder endpoints must be positive and finite".into()));
    }
    if count < 2 {
        return Ok(vec![first]);
    }
    let (a, b) = (first.log10(), last.log10());
    Ok((0..count)
        .map(|i| match i {
            0 => first,
            i if i == count - 1 => last,
            i => 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64),
        })
        .collect())
}

/// `10⁻¹, 10⁻², …, 10⁻¹²`.
pub fn default_steps() -> Vec<f64> {
    (1..=12).map(|k| 10f64.powi(-k)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub direction: C64,
    pub steps: Vec<f64>,
    pub selector: EigenSelector,
    pub simplicity_tol: f64,
}

impl SweepConfig {
    pub fn new(selector: EigenSelector) -> Self {
        Self {
            direction: C64::new(1.0, 0.0),
            steps: default_steps(),
            selector,
            simplicity_tol: DEFAULT_SIMPLICITY_TOL,
        }
    }

    pub fn with_steps(mut self, steps: Vec<f64>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidArgument("step ladder is empty".into()));
        }
        if steps.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidArgument("steps must be positive and finite".into()));
        }
        if steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument("steps must be strictly decreasing".into()));
        }
        self.steps = steps;
        Ok(self)
    }

    /// Sets the direction, scaled to unit modulus.
    pub fn with_direction(mut self, direction: C64) -> Result<Self> {
        let r = direction.norm();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument("direction must be finite and nonzero".into()));
        }
        self.direction = direction / r;
        Ok(self)
    }
}

/// Value compared in a sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Scalar(C64),
    Vector(CVector),
    Matrix(CMatrix),
}

impl Quantity {
    /// Modulus, Euclidean norm, or Frobenius norm.
    pub fn norm(&self) -> f64 {
        match self {
            Quantity::Scalar(z) => z.norm(),
            Quantity::Vector(v) => v.norm(),
            Quantity::Matrix(m) => m.frobenius_norm(),
        }
    }

    fn distance(&self, other: &Quantity) -> f64 {
        match (self, other) {
            (Quantity::Scalar(a), Quantity::Scalar(b)) => (a - b).norm(),
            (Quantity::Vector(a), Quantity::Vector(b)) => (a - b).norm(),
            (Quantity::Matrix(a), Quantity::Matrix(b)) => (a - b).frobenius_norm(),
            _ => f64::NAN,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub step: f64,
    pub fd: Quantity,
    pub abs_error: f64,
    /// `abs_error / ‖formula‖`, or `abs_error` when the formula vanishes.
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DroppedStep {
    pub step: f64,
    pub reason: Error,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub quantity: String,
    pub formula: Quantity,
    pub records: Vec<SweepRecord>,
    pub dropped: Vec<DroppedStep>,
    pub best_step: f64,
    pub best_abs_error: f64,
    pub best_rel_error: f64,
    /// Log-log slope of the error over the truncation regime; `None` when
    /// fewer than two records lie above the floor.
    pub truncation_slope: Option<f64>,
    pub chi: f64,
    pub unreliable: bool,
}

impl SweepResult {
    pub fn floor_dominated(&self) -> bool {
        self.truncation_slope.is_none()
    }
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept, rms residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Some((slope, intercept, (rss / n as f64).sqrt()))
}

fn truncation_slope(records: &[SweepRecord], best_step: f64) -> Option<f64> {
    let floor = records.iter().map(|r| r.abs_error).fold(f64::INFINITY, f64::min);
    let (xs, ys): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|r| r.step >= best_step && r.abs_error > FLOOR_FACTOR * floor && r.abs_error > 0.0)
        .map(|r| (r.step.ln(), r.abs_error.ln()))
        .unzip();
    fit_line(&xs, &ys).map(|(s, _, _)| s)
}

fn assemble(
    quantity: &str,
    formula: Quantity,
    mut records: Vec<SweepRecord>,
    dropped: Vec<DroppedStep>,
    chi: f64,
) -> Result<SweepResult> {
    records.sort_by(|a, b| b.step.total_cmp(&a.step));
    let best = records
        .iter()
        .min_by(|a, b| a.rel_error.total_cmp(&b.rel_error))
        .ok_or_else(|| match dropped.first() {
            Some(d) => d.reason.clone(),
            None => Error::InvalidArgument("empty step ladder".into()),
        })?
        .clone();
    let truncation_slope = truncation_slope(&records, best.step);
    Ok(SweepResult {
        quantity: quantity.to_string(),
        formula,
        records,
        dropped,
        best_step: best.step,
        best_abs_error: best.abs_error,
        best_rel_error: best.rel_error,
        truncation_slope,
        chi,
        unreliable: !(chi <= CHI_WARNING),
    })
}

fn record(step: f64, fd: Quantity, formula: &Quantity) -> SweepRecord {
    let abs_error = fd.distance(formula);
    let scale = formula.norm();
    let rel_error = if scale > 0.0 { abs_error / scale } else { abs_error };
    SweepRecord {
        step,
        fd,
        abs_error,
        rel_error,
    }
}

/// State at `τ₀` shared by the sweeps.
#[derive(Clone, Debug)]
pub struct Anchor {
    pub a0: CMatrix,
    pub aprime: CMatrix,
    pub structure: SpectralStructure,
}

impl Anchor {
    pub fn new(family: &MatrixFamily, cfg: &SweepConfig) -> Result<Self> {
        let d = family.at_anchor()?;
        let triple = extract_triple(&d.a_at, cfg.selector, cfg.simplicity_tol)?;
        let structure = build_structure(&d.a_at, &triple)?;
        Ok(Self {
            a0: d.a_at,
            aprime: d.aprime_at,
            structure,
        })
    }

    fn chi(&self) -> f64 {
        self.structure.triple.chi
    }
}

/// The eigentriple of `A(τ₀ + h·d)` for the unique eigenvalue within `gap/2`
/// of `λ₀`.
pub fn matched_triple(family: &MatrixFamily, anchor: &Anchor, cfg: &SweepConfig, step: f64) -> Result<EigenTriple> {
    let tau = family.tau0() + cfg.direction * step;
    let a = family.eval(tau)?;
    let eig = eig_dense(&a)?;
    let lambda0 = anchor.structure.lambda0();
    let radius = anchor.structure.triple.gap / 2.0;
    let mut near = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, z)| (*z - lambda0).norm() < radius)
        .map(|(k, _)| k);
    let k = match (near.next(), near.next()) {
        (Some(k), None) => k,
        _ => return Err(Error::MatchingFailure { step }),
    };
    triple_from_decomposition(&a, &eig, k, cfg.simplicity_tol)
}

fn sweep<F>(family: &MatrixFamily, anchor: &Anchor, cfg: &SweepConfig, mut quotient: F) -> (Vec<SweepRecord>, Vec<DroppedStep>)
where
    F: FnMut(f64, C64, &EigenTriple) -> Result<Quantity>,
{
    let mut records = Vec::with_capacity(cfg.steps.len());
    let mut dropped = Vec::new();
    for &step in &cfg.steps {
        let dtau = cfg.direction * step;
        let outcome = matched_triple(family, anchor, cfg, step).and_then(|t| quotient(step, dtau, &t));
        match outcome {
            Ok(q) => records.push(SweepRecord {
                step,
                fd: q,
                abs_error: 0.0,
                rel_error: 0.0,
            }),
            Err(reason) => dropped.push(DroppedStep { step, reason }),
        }
    }
    (records, dropped)
}

fn finish(name: &str, formula: Quantity, raw: (Vec<SweepRecord>, Vec<DroppedStep>), chi: f64) -> Result<SweepResult> {
    let records = raw.0.into_iter().map(|r| record(r.step, r.fd, &formula)).collect();
    assemble(name, formula, records, raw.1, chi)
}

/// `(λ̃ − λ₀)/(h·d)` against `y₀*A'x₀`.
pub fn fd_verify_lambda(family: &MatrixFamily, cfg: &SweepConfig) -> Result<SweepResult> {
    let anchor = Anchor::new(family, cfg)?;
    fd_verify_lambda_at(family, &anchor, cfg)
}

pub fn fd_verify_lambda_at(family: &MatrixFamily, anchor: &Anchor, cfg: &SweepConfig) -> Result<SweepResult> {
    let formula = lambda_derivative(&anchor.structure.triple, &anchor.aprime)?;
    let lambda0 = anchor.structure.lambda0();
    let raw = sweep(family, anchor, cfg, |_, dtau, t| Ok(Quantity::Scalar((t.lambda0 - lambda0) / dtau)));
    finish("lambda", Quantity::Scalar(formula), raw, anchor.chi())
}

/// `(Π̃ − Π₀)/(h·d)` against `−Π₀A'S − SA'Π₀`, in the Frobenius norm.
pub fn fd_verify_projector(family: &MatrixFamily, cfg: &SweepConfig) -> Result<SweepResult> {
    let anchor = Anchor::new(family, cfg)?;
    fd_verify_projector_at(family, &anchor, cfg)
}

pub fn fd_verify_projector_at(family: &MatrixFamily, anchor: &Anchor, cfg: &SweepConfig) -> Result<SweepResult> {
    let formula = projector_derivative(&anchor.structure, &anchor.aprime)?;
    let pi0 = &anchor.structure.pi0;
    let raw = sweep(family, anchor, cfg, |_, dtau, t| {
        let inv = C64::new(1.0, 0.0) / dtau;
        Ok(Quantity::Matrix((&t.projector() - pi0).scale(inv)))
    });
    finish("projector", Quantity::Matrix(formula), raw, anchor.chi())
}

/// Difference quotients of renormalized computed eigenvectors against the
/// transported derivatives. Returns the sweeps for `x̂` and for `ŷ*`.
pub fn fd_verify_eigenvectors(
    family: &MatrixFamily,
    cfg: &SweepConfig,
    scheme: &NormalizationScheme,
) -> Result<(SweepResult, SweepResult)> {
    fd_verify_eigenvectors_rephased(family, cfg, scheme, &[])
}

/// As [`fd_verify_eigenvectors`], with the computed pair at step `i`
/// replaced by `(ωᵢx̃, ỹ/ω̄ᵢ)` for `ωᵢ = phases[i]` (missing entries are 1).
/// Every scheme is invariant under such phases, N3 under signs.
pub fn fd_verify_eigenvectors_rephased(
    family: &MatrixFamily,
    cfg: &SweepConfig,
    scheme: &NormalizationScheme,
    phases: &[C64],
) -> Result<(SweepResult, SweepResult)> {
    if scheme.kind == SchemeKind::N4Rp {
        return Err(Error::NotVerifiable(scheme.kind.to_string()));
    }
    if phases.iter().any(|w| !(w.norm() > 0.0 && w.norm().is_finite())) {
        return Err(Error::InvalidArgument("phases must be finite and nonzero".into()));
    }
    let anchor = Anchor::new(family, cfg)?;
    fd_verify_eigenvectors_at(family, &anchor, cfg, scheme, phases)
}

pub fn fd_verify_eigenvectors_at(
    family: &MatrixFamily,
    anchor: &Anchor,
    cfg: &SweepConfig,
    scheme: &NormalizationScheme,
    phases: &[C64],
) -> Result<(SweepResult, SweepResult)> {
    if scheme.kind == SchemeKind::N4Rp {
        return Err(Error::NotVerifiable(scheme.kind.to_string()));
    }
    let ss = &anchor.structure;
    let (xp, yp) = eigenvector_derivatives(ss, &anchor.aprime)?;
    let reference = apply_normalization(scheme, ss, &xp, &yp)?;
    let x_formula = reference.x_hat_prime.clone().expect("transported derivative");
    let y_formula = reference.y_hat_star_prime.clone().expect("transported derivative");
    let x_ref = reference.x_hat.clone();
    let y_ref = reference.y_hat_star();
    let one = C64::new(1.0, 0.0);

    let mut x_records = Vec::new();
    let mut y_records = Vec::new();
    let mut dropped = Vec::new();
    for (i, &step) in cfg.steps.iter().enumerate() {
        let dtau = cfg.direction * step;
        let omega = phases.get(i).copied().unwrap_or(one);
        let outcome = matched_triple(family, anchor, cfg, step).and_then(|t| {
            let xt = t.x0.scale(omega);
            let yt = t.y0.scale(one / omega.conj());
            renormalize_computed(&reference, &xt, &yt, ss.x0(), ss.y0())
        });
        match outcome {
            Ok((xh, ysh)) => {
                let inv = one / dtau;
                x_records.push(record(step, Quantity::Vector((&xh - &x_ref).scale(inv)), &Quantity::Vector(x_formula.clone())));
                y_records.push(record(step, Quantity::Vector((&ysh - &y_ref).scale(inv)), &Quantity::Vector(y_formula.clone())));
            }
            Err(reason) => dropped.push(DroppedStep { step, reason }),
        }
    }
    let chi = anchor.chi();
    let tag = scheme.kind.to_string();
    let xs = assemble(&format!("x_hat[{tag}]"), Quantity::Vector(x_formula), x_records, dropped.clone(), chi)?;
    let ys = assemble(&format!("y_hat_star[{tag}]"), Quantity::Vector(y_formula), y_records, dropped, chi)?;
    Ok((xs, ys))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(center: C64, radius: f64, nodes: usize) -> Result<Self> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidArgument("contour center must be finite".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument("contour radius must be positive and finite".into()));
        }
        if nodes < MIN_NODES {
            return Err(Error::InvalidArgument(format!("at least {MIN_NODES} nodes required, got {nodes}")));
        }
        Ok(Self { center, radius, nodes })
    }

    /// Circle of radius `gap/2` around `λ₀` with the default node count.
    pub fn around(t: &EigenTriple) -> Result<Self> {
        Self::new(t.lambda0, t.gap / 2.0, DEFAULT_NODES)
    }

    pub fn with_nodes(self, nodes: usize) -> Result<Self> {
        Self::new(self.center, self.radius, nodes)
    }

    fn node(&self, k: usize) -> (C64, C64) {
        let theta = 2.0 * PI * k as f64 / self.nodes as f64;
        let e = C64::from_polar(1.0, theta);
        (self.center + e * self.radius, e)
    }
}

fn check_annulus(a: &CMatrix, spec: &ContourSpec) -> Result<()> {
    let eig = eig_dense(a)?;
    for z in &eig.eigenvalues {
        let d = ((z - spec.center).norm() - spec.radius).abs();
        if d < spec.radius * ANNULUS_GUARD {
            return Err(Error::ResolventBreakdown(format!(
                "eigenvalue {}{:+}i lies within the guard band of the contour",
                z.re, z.im
            )));
        }
    }
    Ok(())
}

/// `−(r/N) Σₖ R(ζₖ)e^{iθₖ}` with `R(ζ) = (A − ζI)⁻¹`.
fn resolvent_sum(a: &CMatrix, spec: &ContourSpec) -> Result<CMatrix> {
    let n = a.require_square()?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    check_annulus(a, spec)?;
    let id = CMatrix::identity(n);
    let mut acc = CMatrix::zeros(n, n);
    for k in 0..spec.nodes {
        let (zeta, e) = spec.node(k);
        let r = solve_dense(&a.shift(zeta), &id).map_err(|err| {
            Error::ResolventBreakdown(format!("node {k} at {}{:+}i: {err}", zeta.re, zeta.im))
        })?;
        acc = &acc + &r.scale(e);
    }
    Ok(acc.scale_real(-spec.radius / spec.nodes as f64))
}

/// Trapezoidal approximation of `−(1/2πi)∮ (A − ζI)⁻¹ dζ` over the circle.
pub fn projector_via_contour(a: &CMatrix, spec: &ContourSpec) -> Result<CMatrix> {
    resolvent_sum(a, spec)
}

/// Number of eigenvalues inside the circle, from the trace of the same sum.
pub fn count_eigs_in_disk(a: &CMatrix, spec: &ContourSpec) -> Result<usize> {
    let value = resolvent_sum(a, spec)?.trace().re;
    let rounded = value.round();
    if (value - rounded).abs() > INTEGER_TOL || rounded < 0.0 {
        return Err(Error::NonIntegerResult { value });
    }
    Ok(rounded as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub quantity: String,
    pub fitted_exponent: f64,
    pub fit_residual: f64,
    pub tau_grid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectiveDemo {
    pub example: u8,
    pub fits: Vec<ExponentFit>,
    /// Outcome of extracting the triple at `τ = 0`.
    pub tau_zero: std::result::Result<C64, Error>,
    pub lambdas: Vec<C64>,
    pub chis: Vec<f64>,
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < MIN_GRID_POINTS {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least {MIN_GRID_POINTS} points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|t| !(*t > 0.0 && *t <= MAX_GRID_TAU)) {
        return Err(Error::InvalidArgument(format!("grid points must lie in (0, {MAX_GRID_TAU}]")));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("grid points must be distinct".into()));
    }
    Ok(())
}

/// Fits `log|λ(τ)|` and `log χ(τ)` against `log τ` for the example families
/// `[[0,1],[τ,0]]` (1) and `[[0,τ],[τ²,0]]` (2), following the eigenvalue
/// with the largest real part.
pub fn defective_demo(example: u8, tau_grid: &[f64]) -> Result<DefectiveDemo> {
    let family = match example {
        1 => jordan_example(),
        2 => semisimple_example(),
        _ => return Err(Error::InvalidArgument(format!("unknown example {example}"))),
    };
    validate_grid(tau_grid)?;
    let mut lambdas = Vec::with_capacity(tau_grid.len());
    let mut chis = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let a = family.eval(C64::new(tau, 0.0))?;
        let t = extract_triple(&a, EigenSelector::LargestReal, DEFAULT_SIMPLICITY_TOL)?;
        lambdas.push(t.lambda0);
        chis.push(t.chi);
    }
    let logt: Vec<f64> = tau_grid.iter().map(|t| t.ln()).collect();
    let fit = |name: &str, ys: Vec<f64>| -> Result<ExponentFit> {
        let (slope, _, residual) =
            fit_line(&logt, &ys).ok_or_else(|| Error::InvalidArgument("degenerate grid".into()))?;
        Ok(ExponentFit {
            quantity: name.to_string(),
            fitted_exponent: slope,
            fit_residual: residual,
            tau_grid: tau_grid.to_vec(),
        })
    };
    let fits = vec![
        fit("eigenvalue", lambdas.iter().map(|z| z.norm().ln()).collect())?,
        fit("condition_number", chis.iter().map(|c| c.ln()).collect())?,
    ];
    let a_zero = family.eval(C64::new(0.0, 0.0))?;
    let tau_zero = extract_triple(&a_zero, EigenSelector::LargestReal, DEFAULT_SIMPLICITY_TOL).map(|t| t.lambda0);
    Ok(DefectiveDemo {
        example,
        fits,
        tau_zero,
        lambdas,
        chis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::random_linear_family;
    use crate::normalize::SchemeKind;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn swap() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn diag_family() -> MatrixFamily {
        MatrixFamily::linear(CMatrix::diag_real(&[1.0, 2.0]), swap(), c(0.0)).unwrap()
    }

    fn cfg() -> SweepConfig {
        SweepConfig::new(EigenSelector::ClosestTo(c(1.0)))
    }

    #[test]
    fn ladder_and_config_validation() {
        assert_eq!(default_steps().len(), 12);
        let l = log_ladder(1e-1, 1e-5, 5).unwrap();
        assert_eq!(l.len(), 5);
        assert!((l[2] - 1e-3).abs() < 1e-15);
        assert!(cfg().with_steps(vec![1e-2, 1e-1]).is_err());
        assert!(cfg().with_steps(vec![1e-2, -1e-3]).is_err());
        assert!(cfg().with_direction(c(0.0)).is_err());
        let d = cfg().with_direction(C64::new(3.0, 4.0)).unwrap().direction;
        assert!((d.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_sweep_on_even_function() {
        let r = fd_verify_lambda(&diag_family(), &cfg()).unwrap();
        assert_eq!(r.formula, Quantity::Scalar(c(0.0)));
        assert!(r.best_abs_error <= 1e-7, "{}", r.best_abs_error);
        assert!(r.dropped.is_empty());
    }

    #[test]
    fn lambda_sweep_identity_perturbation_is_floor_dominated() {
        let f = MatrixFamily::linear(CMatrix::diag_real(&[1.0, 2.0]), CMatrix::identity(2), c(0.0)).unwrap();
        let r = fd_verify_lambda(&f, &cfg()).unwrap();
        for rec in &r.records {
            assert!(rec.abs_error < 1e-3, "{rec:?}");
        }
        assert!(r.best_abs_error < 1e-12);
    }

    #[test]
    fn projector_sweeps() {
        let r = fd_verify_projector(&diag_family(), &cfg()).unwrap();
        let want = CMatrix::from_real_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]).unwrap();
        match &r.formula {
            Quantity::Matrix(m) => assert!((m - &want).frobenius_norm() < 1e-14),
            other => panic!("{other:?}"),
        }
        assert!(r.best_abs_error <= 1e-6);
        let f = MatrixFamily::linear(CMatrix::diag_real(&[1.0, 2.0]), CMatrix::identity(2), c(0.0)).unwrap();
        let r = fd_verify_projector(&f, &cfg()).unwrap();
        for rec in &r.records {
            assert!(rec.fd.norm() <= 1e-8, "{rec:?}");
        }
    }

    #[test]
    fn eigenvector_sweep_n0_limit() {
        let (x, y) = fd_verify_eigenvectors(&diag_family(), &cfg(), &NormalizationScheme::new(SchemeKind::N0)).unwrap();
        assert_eq!(x.formula, Quantity::Vector(CVector::from_real(&[0.0, -1.0]).unwrap()));
        assert!(x.best_rel_error <= 1e-5 && y.best_rel_error <= 1e-5);
    }

    #[test]
    fn n3_sign_flips_do_not_change_the_ladder() {
        let scheme = NormalizationScheme::new(SchemeKind::N3);
        let plain = fd_verify_eigenvectors(&diag_family(), &cfg(), &scheme).unwrap();
        let flips: Vec<C64> = (0..12).map(|i| if i % 3 == 1 { c(-1.0) } else { c(1.0) }).collect();
        let flipped = fd_verify_eigenvectors_rephased(&diag_family(), &cfg(), &scheme, &flips).unwrap();
        for (a, b) in plain.0.records.iter().zip(&flipped.0.records) {
            assert!((a.abs_error - b.abs_error).abs() <= 1e-12 * (1.0 + a.abs_error));
        }
        assert!(plain.0.best_rel_error <= 1e-5);
    }

    #[test]
    fn n4_is_not_verifiable() {
        let r = fd_verify_eigenvectors(&diag_family(), &cfg(), &NormalizationScheme::new(SchemeKind::N4Rp));
        assert!(matches!(r, Err(Error::NotVerifiable(_))));
    }

    #[test]
    fn zero_pinned_entry() {
        // x₀ = e₂
        let f = MatrixFamily::linear(CMatrix::diag_real(&[2.0, 1.0]), swap(), c(0.0)).unwrap();
        let r = fd_verify_eigenvectors(&f, &cfg(), &NormalizationScheme::pinned(SchemeKind::N1, 0, 1));
        assert!(matches!(r, Err(Error::PinnedEntryZero { index: 0, .. })));
    }

    #[test]
    fn random_family_sweeps() {
        let f = random_linear_family(7, 8);
        let eigs = eig_dense(&f.eval(c(0.0)).unwrap()).unwrap().eigenvalues;
        let k = crate::eigentriple::most_isolated(&eigs);
        let cfg = SweepConfig::new(EigenSelector::Index(k));
        let l = fd_verify_lambda(&f, &cfg).unwrap();
        assert!(l.best_rel_error <= 1e-6, "{l:?}");
        let slope = l.truncation_slope.unwrap();
        assert!((slope - 1.0).abs() <= 0.2, "{slope}");
        assert!(l.best_step < cfg.steps[0]);
        assert!(fd_verify_projector(&f, &cfg).unwrap().best_rel_error <= 1e-5);
    }

    #[test]
    fn contour_examples() {
        let a = CMatrix::diag_real(&[1.0, 2.0]);
        let spec = ContourSpec::new(c(1.0), 0.4, 64).unwrap();
        let p = projector_via_contour(&a, &spec).unwrap();
        assert!((&p - &CMatrix::diag_real(&[1.0, 0.0])).norm2() < 1e-12);
        assert_eq!(count_eigs_in_disk(&a, &spec).unwrap(), 1);
        let empty = ContourSpec::new(c(1.5), 0.1, 64).unwrap();
        assert!(projector_via_contour(&a, &empty).unwrap().norm2() < 1e-12);
        assert_eq!(count_eigs_in_disk(&a, &empty).unwrap(), 0);
        let both = ContourSpec::new(c(1.5), 2.0, 64).unwrap();
        assert_eq!(count_eigs_in_disk(&a, &both).unwrap(), 2);
        let on = ContourSpec::new(c(1.5), 0.5, 64).unwrap();
        assert!(matches!(projector_via_contour(&a, &on), Err(Error::ResolventBreakdown(_))));
        assert!(ContourSpec::new(c(0.0), 1.0, 4).is_err());
    }

    #[test]
    fn few_nodes_give_non_integer_count() {
        let a = CMatrix::diag_real(&[1.0, 1.2]);
        let spec = ContourSpec::new(c(1.0), 0.19, 8).unwrap();
        assert!(matches!(count_eigs_in_disk(&a, &spec), Err(Error::NonIntegerResult { .. })));
    }

    #[test]
    fn contour_matches_outer_product_on_random_matrix() {
        let f = random_linear_family(3, 8);
        let a = f.eval(c(0.0)).unwrap();
        let eigs = eig_dense(&a).unwrap().eigenvalues;
        let k = crate::eigentriple::most_isolated(&eigs);
        let t = extract_triple(&a, EigenSelector::Index(k), DEFAULT_SIMPLICITY_TOL).unwrap();
        let spec = ContourSpec::around(&t).unwrap();
        let p = projector_via_contour(&a, &spec).unwrap();
        let err64 = (&p - &t.projector()).norm2();
        assert!(err64 <= 1e-10, "{err64}");
        let p32 = projector_via_contour(&a, &spec.with_nodes(32).unwrap()).unwrap();
        let err32 = (&p32 - &t.projector()).norm2();
        assert!(err32 >= 10.0 * err64, "{err32} {err64}");
    }

    #[test]
    fn defective_exponents() {
        let grid = log_ladder(1e-1, 1e-5, 9).unwrap();
        let one = defective_demo(1, &grid).unwrap();
        assert!((one.fits[0].fitted_exponent - 0.5).abs() <= 0.02);
        assert!((one.fits[1].fitted_exponent + 0.5).abs() <= 0.05);
        assert!(matches!(
            one.tau_zero,
            Err(Error::NotSimple { .. }) | Err(Error::NearOrthogonalPair { .. })
        ));
        for (tau, chi) in grid.iter().zip(&one.chis) {
            let want = (1.0 + tau) / (2.0 * tau.sqrt());
            assert!((chi - want).abs() <= 1e-8 * want);
        }
        let two = defective_demo(2, &grid).unwrap();
        assert!((two.fits[0].fitted_exponent - 1.5).abs() <= 0.02);
        assert!((two.fits[1].fitted_exponent + 0.5).abs() <= 0.05);
        assert!(defective_demo(1, &grid[..3]).is_err());
        assert!(defective_demo(3, &grid).is_err());
        assert!(defective_demo(1, &[0.2, 0.1, 0.01, 0.001, 0.0001]).is_err());
    }
}
