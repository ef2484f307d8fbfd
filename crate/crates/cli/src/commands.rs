//! Report assembly for each subcommand.

use std::collections::BTreeMap;
use std::fs;

use eigpert::derivatives::sensitivity;
use eigpert::eigentriple::{extract_triple, most_isolated, EigenSelector, EigenTriple, DEFAULT_SIMPLICITY_TOL};
use eigpert::family::{random_linear_family, MatrixFamily};
use eigpert::linalg::eig_dense;
use eigpert::normalize::{apply_normalization, NormalizationScheme, NormalizedPair, SchemeKind};
use eigpert::spectral::{build_structure, derivative_bound, SpectralStructure};
use eigpert::verify::{
    count_eigs_in_disk, defective_demo, fd_verify_eigenvectors_at, fd_verify_lambda_at, fd_verify_projector_at,
    projector_via_contour, validate_grid, Anchor, ContourSpec, Quantity, SweepConfig, SweepResult, CHI_WARNING,
    MIN_NODES,
};
use eigpert::{CMatrix, Error as CoreError};

use crate::args::{AnalyzeArgs, ContourArgs, ContourFlags, DemoArgs, SchemeFlags, Source, VerifyArgs};
use crate::document::*;
use crate::CliError;

pub const LAMBDA_THRESHOLD: f64 = 1e-6;
pub const VECTOR_THRESHOLD: f64 = 1e-5;
pub const ORACLE_THRESHOLD: f64 = 1e-9;

struct Loaded {
    doc: FamilyDocument,
    family: MatrixFamily,
    selector: EigenSelector,
}

fn fmt_selector(s: &EigenSelector) -> String {
    match s {
        EigenSelector::ClosestTo(z) => format!("closest={:e},{:e}", z.re, z.im),
        EigenSelector::LargestReal => "largest-real".into(),
        EigenSelector::LargestModulus => "largest-modulus".into(),
        EigenSelector::Index(k) => format!("index={}", k + 1),
    }
}

fn load(source: &Source, options: &mut BTreeMap<String, String>) -> Result<Loaded, CliError> {
    let doc = match (&source.input, source.seed) {
        (Some(path), _) => {
            options.insert("input".into(), path.display().to_string());
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            FamilyDocument::parse(&text)?
        }
        (None, Some(seed)) => {
            options.insert("seed".into(), seed.to_string());
            options.insert("dimension".into(), source.dimension.to_string());
            FamilyDocument::from_family(&random_linear_family(seed, source.dimension as usize))?
        }
        (None, None) => return Err(CliError::Usage("either --input or --seed is required".into())),
    };
    let family = doc.to_family()?;
    let selector = match (&source.select, &doc.selector) {
        (Some(s), _) => *s,
        (None, Some(s)) => s.to_selector()?,
        (None, None) => {
            let a0 = family.eval(family.tau0())?;
            EigenSelector::Index(most_isolated(&eig_dense(&a0)?.eigenvalues))
        }
    };
    if let EigenSelector::Index(k) = selector {
        if k >= family.dim() {
            return Err(CliError::Usage(format!("index={} out of range for dimension {}", k + 1, family.dim())));
        }
    }
    options.insert("select".into(), fmt_selector(&selector));
    Ok(Loaded { doc, family, selector })
}

fn resolve_scheme(
    flags: &SchemeFlags,
    doc: &FamilyDocument,
    options: &mut BTreeMap<String, String>,
) -> Result<NormalizationScheme, CliError> {
    let n = doc.dimension;
    let mut scheme = match &doc.scheme {
        Some(s) => s.to_scheme(n)?,
        None => NormalizationScheme::new(SchemeKind::N0),
    };
    if let Some(kind) = flags.scheme {
        scheme.kind = kind;
    }
    let pin = |p: u32, name: &str| -> Result<usize, CliError> {
        let p = p as usize;
        if p > n {
            return Err(CliError::Usage(format!("--{name} {p} out of range 1..={n}")));
        }
        Ok(p - 1)
    };
    if let Some(j) = flags.pin_j {
        scheme.index_j = Some(pin(j, "pin-j")?);
    }
    if let Some(k) = flags.pin_k {
        scheme.index_k = Some(pin(k, "pin-k")?);
    }
    options.insert("scheme".into(), scheme.kind.to_string());
    if let Some(j) = scheme.index_j {
        options.insert("pin_j".into(), (j + 1).to_string());
    }
    if let Some(k) = scheme.index_k {
        options.insert("pin_k".into(), (k + 1).to_string());
    }
    Ok(scheme)
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn triple_doc(t: &EigenTriple) -> TripleDoc {
    TripleDoc {
        lambda0: t.lambda0.into(),
        x0: vector_doc(&t.x0),
        y0: vector_doc(&t.y0),
        chi: t.chi,
        gap: finite(t.gap),
        residuals: [t.residuals.0, t.residuals.1],
    }
}

fn structure_doc(ss: &SpectralStructure) -> StructureDoc {
    StructureDoc {
        kappa_x: ss.kappa_x,
        resolvent_norm: ss.resolvent_norm,
        s_norm: ss.s.norm2(),
        pi0_norm: ss.pi0.norm2(),
        other_eigenvalues: ss.other_eigenvalues.iter().map(|z| Cx::from(*z)).collect(),
    }
}

fn normalized_doc(p: &NormalizedPair) -> NormalizedDoc {
    NormalizedDoc {
        scheme: p.kind.into(),
        pin_j: p.index_j + 1,
        pin_k: p.index_k + 1,
        sign: p.sign,
        unique: p.unique,
        x_hat: vector_doc(&p.x_hat),
        y_hat: vector_doc(&p.y_hat),
        x_hat_prime: p.x_hat_prime.as_ref().map(vector_doc),
        y_hat_star_prime: p.y_hat_star_prime.as_ref().map(vector_doc),
    }
}

fn chi_warning(report: &mut ReportDocument, chi: f64) {
    if !(chi <= CHI_WARNING) {
        report
            .warnings
            .push(format!("condition number {chi:.3e} exceeds {CHI_WARNING:e}; results are unreliable"));
    }
}

/// Fills triple, structure, derivatives and bounds.
fn analysis(
    report: &mut ReportDocument,
    ss: &SpectralStructure,
    aprime: &CMatrix,
    scheme: &NormalizationScheme,
) -> Result<(), CliError> {
    let sens = sensitivity(ss, aprime)?;
    let normalized = apply_normalization(scheme, ss, &sens.x_prime, &sens.ystar_prime)?;
    let bound = derivative_bound(ss, aprime)?;
    report.triple = Some(triple_doc(&ss.triple));
    report.structure = Some(structure_doc(ss));
    report.derivatives = Some(DerivativesDoc {
        lambda_prime: sens.lambda_prime.into(),
        lambda_prime_trace: sens.lambda_prime_trace_form.into(),
        x_prime: vector_doc(&sens.x_prime),
        ystar_prime: vector_doc(&sens.ystar_prime),
        pi_prime: matrix_doc(&sens.pi_prime),
        normalized: Some(normalized_doc(&normalized)),
    });
    report.bounds = Some(BoundsDoc {
        aprime_norm: aprime.norm2(),
        eigenvector_bound: bound.bound,
        gap_form: bound.gap_form,
        lambda_bound: sens.chi_times_norm_aprime,
        x_prime_ratio: sens.x_prime.norm() / ss.x0().norm(),
        ystar_prime_ratio: sens.ystar_prime.norm() / ss.y0().norm(),
    });
    chi_warning(report, ss.triple.chi);
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs) -> Result<ReportDocument, CliError> {
    let mut report = ReportDocument::new("analyze");
    let loaded = load(&args.source, &mut report.options)?;
    let scheme = resolve_scheme(&args.scheme, &loaded.doc, &mut report.options)?;
    let d = loaded.family.at_anchor()?;
    let t = extract_triple(&d.a_at, loaded.selector, DEFAULT_SIMPLICITY_TOL)?;
    let ss = build_structure(&d.a_at, &t)?;
    report.input = Some(loaded.doc);
    analysis(&mut report, &ss, &d.aprime_at, &scheme)?;
    Ok(report)
}

fn quantity_doc(q: &Quantity) -> QuantityDoc {
    match q {
        Quantity::Scalar(z) => QuantityDoc::Scalar((*z).into()),
        Quantity::Vector(v) => QuantityDoc::Vector(vector_doc(v)),
        Quantity::Matrix(m) => QuantityDoc::Matrix(matrix_doc(m)),
    }
}

fn sweep_doc(r: &SweepResult, threshold: f64) -> SweepDoc {
    SweepDoc {
        quantity: r.quantity.clone(),
        formula: quantity_doc(&r.formula),
        records: r
            .records
            .iter()
            .map(|rec| RecordDoc {
                step: rec.step,
                fd: quantity_doc(&rec.fd),
                abs_error: rec.abs_error,
                rel_error: rec.rel_error,
            })
            .collect(),
        dropped: r
            .dropped
            .iter()
            .map(|d| DroppedDoc {
                step: d.step,
                reason: d.reason.to_string(),
            })
            .collect(),
        best_step: r.best_step,
        best_abs_error: r.best_abs_error,
        best_rel_error: r.best_rel_error,
        truncation_slope: r.truncation_slope,
        chi: r.chi,
        unreliable: r.unreliable,
        threshold,
        pass: r.best_rel_error <= threshold,
    }
}

fn contour_spec(t: &EigenTriple, flags: &ContourFlags, options: &mut BTreeMap<String, String>) -> Result<ContourSpec, CliError> {
    if flags.nodes < MIN_NODES {
        return Err(CliError::Usage(format!("--nodes must be at least {MIN_NODES}")));
    }
    let radius = match flags.radius {
        Some(r) => r,
        None if t.gap.is_finite() => t.gap / 2.0,
        None => 1.0,
    };
    options.insert("nodes".into(), flags.nodes.to_string());
    options.insert("radius".into(), format!("{radius:e}"));
    Ok(ContourSpec::new(t.lambda0, radius, flags.nodes)?)
}

fn oracle(a0: &CMatrix, t: &EigenTriple, spec: &ContourSpec, keep_projector: bool) -> Result<OracleDoc, CliError> {
    let pi = projector_via_contour(a0, spec)?;
    let reference = t.projector();
    let residual = (&pi - &reference).norm2();
    let half_nodes_residual = if spec.nodes / 2 >= MIN_NODES {
        let half = projector_via_contour(a0, &spec.with_nodes(spec.nodes / 2)?)?;
        Some((&half - &reference).norm2())
    } else {
        None
    };
    let count = count_eigs_in_disk(a0, spec)?;
    let threshold = ORACLE_THRESHOLD * reference.norm2().max(1.0);
    Ok(OracleDoc {
        center: spec.center.into(),
        radius: spec.radius,
        nodes: spec.nodes,
        count: Some(count),
        projector_residual: residual,
        half_nodes_residual,
        projector: keep_projector.then(|| matrix_doc(&pi)),
        threshold,
        pass: residual <= threshold && count == 1,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<ReportDocument, CliError> {
    let mut report = ReportDocument::new("verify");
    let loaded = load(&args.source, &mut report.options)?;
    let scheme = resolve_scheme(&args.scheme, &loaded.doc, &mut report.options)?;
    if scheme.kind == SchemeKind::N4Rp {
        return Err(CoreError::NotVerifiable(scheme.kind.to_string()).into());
    }
    let mut cfg = SweepConfig::new(loaded.selector);
    if let Some(steps) = &args.steps {
        cfg = cfg.with_steps(steps.0.clone())?;
    }
    if let Some(d) = args.direction {
        cfg = cfg.with_direction(d).map_err(|e| CliError::Usage(format!("--direction: {e}")))?;
    }
    report.options.insert(
        "steps".into(),
        cfg.steps.iter().map(|h| format!("{h:e}")).collect::<Vec<_>>().join(","),
    );
    report
        .options
        .insert("direction".into(), format!("{:e},{:e}", cfg.direction.re, cfg.direction.im));
    let anchor = Anchor::new(&loaded.family, &cfg)?;
    let spec = contour_spec(&anchor.structure.triple, &args.contour, &mut report.options)?;
    report.input = Some(loaded.doc);
    analysis(&mut report, &anchor.structure, &anchor.aprime, &scheme)?;

    let lambda = fd_verify_lambda_at(&loaded.family, &anchor, &cfg)?;
    let projector = fd_verify_projector_at(&loaded.family, &anchor, &cfg)?;
    let (xs, ys) = fd_verify_eigenvectors_at(&loaded.family, &anchor, &cfg, &scheme, &[])?;
    report.sweeps = vec![
        sweep_doc(&lambda, LAMBDA_THRESHOLD),
        sweep_doc(&projector, VECTOR_THRESHOLD),
        sweep_doc(&xs, VECTOR_THRESHOLD),
        sweep_doc(&ys, VECTOR_THRESHOLD),
    ];
    for s in &report.sweeps {
        if !s.dropped.is_empty() {
            report
                .warnings
                .push(format!("{}: {} step(s) dropped", s.quantity, s.dropped.len()));
        }
        if s.truncation_slope.is_none() {
            report
                .warnings
                .push(format!("{}: error is floor-dominated, no truncation slope", s.quantity));
        }
    }
    let oracle = oracle(&anchor.a0, &anchor.structure.triple, &spec, false)?;
    let pass = report.sweeps.iter().all(|s| s.pass) && oracle.pass;
    report.oracle = Some(oracle);
    report.verdict = Some(if pass { "pass" } else { "fail" }.into());
    Ok(report)
}

pub fn defective(args: &DemoArgs) -> Result<ReportDocument, CliError> {
    let mut report = ReportDocument::new("defective-demo");
    report.options.insert("example".into(), args.example.to_string());
    report.options.insert(
        "grid".into(),
        args.grid.0.iter().map(|t| format!("{t:e}")).collect::<Vec<_>>().join(","),
    );
    validate_grid(&args.grid.0).map_err(|e| CliError::Usage(format!("--grid: {e}")))?;
    let demo = defective_demo(args.example, &args.grid.0)?;
    report.exponent_fits = demo
        .fits
        .iter()
        .map(|f| FitDoc {
            quantity: f.quantity.clone(),
            fitted_exponent: f.fitted_exponent,
            fit_residual: f.fit_residual,
            tau_grid: f.tau_grid.clone(),
        })
        .collect();
    let (tau_zero_error, tau_zero_lambda) = match &demo.tau_zero {
        Ok(z) => (None, Some(Cx::from(*z))),
        Err(e) => (Some(e.to_string()), None),
    };
    report.defective = Some(DefectiveDoc {
        example: demo.example,
        lambdas: demo.lambdas.iter().map(|z| Cx::from(*z)).collect(),
        chis: demo.chis.clone(),
        tau_zero_error,
        tau_zero_lambda,
    });
    for (tau, chi) in args.grid.0.iter().zip(&demo.chis) {
        if *chi > CHI_WARNING {
            report.warnings.push(format!("condition number {chi:.3e} at tau = {tau:e}"));
        }
    }
    Ok(report)
}

pub fn contour_check(args: &ContourArgs) -> Result<ReportDocument, CliError> {
    let mut report = ReportDocument::new("contour-check");
    let loaded = load(&args.source, &mut report.options)?;
    let a0 = loaded.family.eval(loaded.family.tau0())?;
    let t = extract_triple(&a0, loaded.selector, DEFAULT_SIMPLICITY_TOL)?;
    let spec = contour_spec(&t, &args.contour, &mut report.options)?;
    report.input = Some(loaded.doc);
    report.triple = Some(triple_doc(&t));
    let oracle = oracle(&a0, &t, &spec, true)?;
    report.verdict = Some(if oracle.pass { "pass" } else { "fail" }.into());
    report.oracle = Some(oracle);
    chi_warning(&mut report, t.chi);
    Ok(report)
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}
