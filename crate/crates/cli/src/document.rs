//! JSON documents read and written by the CLI.
//!
//! Complex numbers are encoded as `[re, im]`. Reports are written with every
//! float in `{:.16e}` form (17 significant digits), which round-trips binary64.

use std::collections::BTreeMap;
use std::io;

use eigpert::eigentriple::EigenSelector;
use eigpert::family::{FamilyKind, MatrixFamily};
use eigpert::normalize::{NormalizationScheme, SchemeKind};
use eigpert::{CMatrix, CVector, C64};
use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, DocumentError> {
    Err(DocumentError::Invalid(msg.into()))
}

/// A complex number as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, SerializeDerive, Deserialize)]
pub struct Cx(pub [f64; 2]);

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx([z.re, z.im])
    }
}

impl From<Cx> for C64 {
    fn from(c: Cx) -> Self {
        C64::new(c.0[0], c.0[1])
    }
}

impl Cx {
    fn is_finite(&self) -> bool {
        self.0[0].is_finite() && self.0[1].is_finite()
    }
}

pub type MatrixDoc = Vec<Vec<Cx>>;

pub fn matrix_doc(m: &CMatrix) -> MatrixDoc {
    m.to_rows().into_iter().map(|r| r.into_iter().map(Cx::from).collect()).collect()
}

pub fn vector_doc(v: &CVector) -> Vec<Cx> {
    v.iter().map(|z| Cx::from(*z)).collect()
}

fn matrix_from_doc(doc: &MatrixDoc, n: usize, name: &str) -> Result<CMatrix, DocumentError> {
    if doc.len() != n || doc.iter().any(|r| r.len() != n) {
        return invalid(format!("{name} must be {n}x{n}"));
    }
    if doc.iter().flatten().any(|c| !c.is_finite()) {
        return invalid(format!("{name} has a non-finite entry"));
    }
    let rows: Vec<Vec<C64>> = doc.iter().map(|r| r.iter().map(|c| C64::from(*c)).collect()).collect();
    CMatrix::from_rows(&rows).map_err(|e| DocumentError::Invalid(format!("{name}: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, SerializeDerive, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindTag {
    Linear,
    Polynomial,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearMatrices {
    pub a0: MatrixDoc,
    pub delta_a: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialMatrices {
    pub coefficients: Vec<MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(untagged)]
pub enum Matrices {
    Linear(LinearMatrices),
    Polynomial(PolynomialMatrices),
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectorDoc {
    Closest(Cx),
    LargestReal,
    LargestModulus,
    /// 1-based.
    Index(usize),
}

impl SelectorDoc {
    pub fn to_selector(&self) -> Result<EigenSelector, DocumentError> {
        Ok(match self {
            SelectorDoc::Closest(c) if c.is_finite() => EigenSelector::ClosestTo((*c).into()),
            SelectorDoc::Closest(_) => return invalid("selector target must be finite"),
            SelectorDoc::LargestReal => EigenSelector::LargestReal,
            SelectorDoc::LargestModulus => EigenSelector::LargestModulus,
            SelectorDoc::Index(0) => return invalid("selector index is 1-based"),
            SelectorDoc::Index(k) => EigenSelector::Index(k - 1),
        })
    }

    pub fn from_selector(sel: &EigenSelector) -> Self {
        match *sel {
            EigenSelector::ClosestTo(z) => SelectorDoc::Closest(z.into()),
            EigenSelector::LargestReal => SelectorDoc::LargestReal,
            EigenSelector::LargestModulus => SelectorDoc::LargestModulus,
            EigenSelector::Index(k) => SelectorDoc::Index(k + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, SerializeDerive, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeTag {
    N0,
    N1,
    N2,
    N3,
    N4,
}

impl From<SchemeTag> for SchemeKind {
    fn from(t: SchemeTag) -> Self {
        match t {
            SchemeTag::N0 => SchemeKind::N0,
            SchemeTag::N1 => SchemeKind::N1,
            SchemeTag::N2 => SchemeKind::N2,
            SchemeTag::N3 => SchemeKind::N3,
            SchemeTag::N4 => SchemeKind::N4Rp,
        }
    }
}

impl From<SchemeKind> for SchemeTag {
    fn from(k: SchemeKind) -> Self {
        match k {
            SchemeKind::N0 => SchemeTag::N0,
            SchemeKind::N1 => SchemeTag::N1,
            SchemeKind::N2 => SchemeTag::N2,
            SchemeKind::N3 => SchemeTag::N3,
            SchemeKind::N4Rp => SchemeTag::N4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDoc {
    pub kind: SchemeTag,
    /// 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin_j: Option<usize>,
    /// 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

impl SchemeDoc {
    pub fn to_scheme(&self, n: usize) -> Result<NormalizationScheme, DocumentError> {
        let index = |p: Option<usize>, name: &str| match p {
            None => Ok(None),
            Some(k) if (1..=n).contains(&k) => Ok(Some(k - 1)),
            Some(k) => invalid(format!("{name} = {k} out of range 1..={n}")),
        };
        let mut s = NormalizationScheme::new(self.kind.into());
        s.index_j = index(self.pin_j, "pin_j")?;
        s.index_k = index(self.pin_k, "pin_k")?;
        match self.sign {
            None => {}
            Some(v @ (1 | -1)) => s = s.with_sign(v),
            Some(v) => return invalid(format!("sign must be 1 or -1, got {v}")),
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub schema_version: u32,
    pub kind: KindTag,
    pub dimension: usize,
    pub tau0: Cx,
    pub matrices: Matrices,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selector: Option<SelectorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeDoc>,
}

impl FamilyDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: FamilyDocument = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), DocumentError> {
        if self.schema_version != SCHEMA_VERSION {
            return invalid(format!("unsupported schema_version {}", self.schema_version));
        }
        if self.dimension == 0 {
            return invalid("dimension must be positive");
        }
        if !self.tau0.is_finite() {
            return invalid("tau0 must be finite");
        }
        match (&self.kind, &self.matrices) {
            (KindTag::Linear, Matrices::Linear(_)) => {}
            (KindTag::Polynomial, Matrices::Polynomial(p)) => {
                if p.coefficients.is_empty() {
                    return invalid("polynomial family needs at least one coefficient");
                }
            }
            _ => return invalid("matrices do not match kind"),
        }
        if let Some(s) = &self.selector {
            s.to_selector()?;
        }
        if let Some(s) = &self.scheme {
            s.to_scheme(self.dimension)?;
        }
        self.to_family().map(|_| ())
    }

    pub fn to_family(&self) -> Result<MatrixFamily, DocumentError> {
        let n = self.dimension;
        let tau0 = self.tau0.into();
        let fam = match &self.matrices {
            Matrices::Linear(m) => {
                MatrixFamily::linear(matrix_from_doc(&m.a0, n, "a0")?, matrix_from_doc(&m.delta_a, n, "delta_a")?, tau0)
            }
            Matrices::Polynomial(p) => {
                let cs = p
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, c)| matrix_from_doc(c, n, &format!("coefficients[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                MatrixFamily::polynomial(cs, tau0)
            }
        };
        fam.map_err(|e| DocumentError::Invalid(e.to_string()))
    }

    pub fn from_family(f: &MatrixFamily) -> Result<Self, DocumentError> {
        let (kind, matrices) = match f.kind() {
            FamilyKind::Linear { a0, delta } => (
                KindTag::Linear,
                Matrices::Linear(LinearMatrices {
                    a0: matrix_doc(a0),
                    delta_a: matrix_doc(delta),
                }),
            ),
            FamilyKind::Polynomial { coefficients } => (
                KindTag::Polynomial,
                Matrices::Polynomial(PolynomialMatrices {
                    coefficients: coefficients.iter().map(matrix_doc).collect(),
                }),
            ),
            FamilyKind::Sampled { .. } => return invalid("sampled families cannot be serialized"),
        };
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            kind,
            dimension: f.dim(),
            tau0: f.tau0().into(),
            matrices,
            selector: None,
            scheme: None,
        })
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDoc {
    pub lambda0: Cx,
    pub x0: Vec<Cx>,
    pub y0: Vec<Cx>,
    pub chi: f64,
    /// Absent for a 1x1 matrix.
    pub gap: Option<f64>,
    pub residuals: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub kappa_x: f64,
    pub resolvent_norm: f64,
    pub s_norm: f64,
    pub pi0_norm: f64,
    pub other_eigenvalues: Vec<Cx>,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedDoc {
    pub scheme: SchemeTag,
    pub pin_j: usize,
    pub pin_k: usize,
    pub sign: f64,
    pub unique: bool,
    pub x_hat: Vec<Cx>,
    pub y_hat: Vec<Cx>,
    pub x_hat_prime: Option<Vec<Cx>>,
    pub y_hat_star_prime: Option<Vec<Cx>>,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativesDoc {
    pub lambda_prime: Cx,
    pub lambda_prime_trace: Cx,
    pub x_prime: Vec<Cx>,
    pub ystar_prime: Vec<Cx>,
    pub pi_prime: MatrixDoc,
    pub normalized: Option<NormalizedDoc>,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsDoc {
    pub aprime_norm: f64,
    pub eigenvector_bound: f64,
    pub gap_form: Option<f64>,
    pub lambda_bound: f64,
    pub x_prime_ratio: f64,
    pub ystar_prime_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum QuantityDoc {
    Scalar(Cx),
    Vector(Vec<Cx>),
    Matrix(MatrixDoc),
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordDoc {
    pub step: f64,
    pub fd: QuantityDoc,
    pub abs_error: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DroppedDoc {
    pub step: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDoc {
    pub quantity: String,
    pub formula: QuantityDoc,
    pub records: Vec<RecordDoc>,
    pub dropped: Vec<DroppedDoc>,
    pub best_step: f64,
    pub best_abs_error: f64,
    pub best_rel_error: f64,
    pub truncation_slope: Option<f64>,
    pub chi: f64,
    pub unreliable: bool,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDoc {
    pub center: Cx,
    pub radius: f64,
    pub nodes: usize,
    pub count: Option<usize>,
    pub projector_residual: f64,
    pub half_nodes_residual: Option<f64>,
    pub projector: Option<MatrixDoc>,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitDoc {
    pub quantity: String,
    pub fitted_exponent: f64,
    pub fit_residual: f64,
    pub tau_grid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectiveDoc {
    pub example: u8,
    pub lambdas: Vec<Cx>,
    pub chis: Vec<f64>,
    /// Error raised by the extraction at `τ = 0`, or the eigenvalue found.
    pub tau_zero_error: Option<String>,
    pub tau_zero_lambda: Option<Cx>,
}

#[derive(Clone, Debug, Default, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub command: String,
    pub options: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<FamilyDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<TripleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivatives: Option<DerivativesDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweeps: Vec<SweepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponent_fits: Vec<FitDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defective: Option<DefectiveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: ReportDocument = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return invalid(format!("unsupported schema_version {}", doc.schema_version));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

/// Pretty printer that writes every `f64` as `{:.16e}` and non-finite values as `null`.
#[derive(Default)]
pub struct ExactFloatFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(w $(, $arg)*)
            }
        )*
    };
}

impl serde_json::ser::Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloatFormatter::default());
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}
