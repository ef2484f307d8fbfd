//! Analytic one-parameter matrix families `A(τ)` and their derivatives.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

/// Highest polynomial degree accepted.
pub const MAX_POLYNOMIAL_DEGREE: usize = 32;

/// Black-box evaluator for a sampled family.
pub type Evaluator = Arc<dyn Fn(C64) -> Result<CMatrix, String> + Send + Sync>;

/// How a sampled family supplies `A'(τ)`.
#[derive(Clone)]
pub enum DerivativeMode {
    Exact(Evaluator),
    /// `(A(τ+hd) − A(τ−hd)) / (2hd)` along the unit direction `d`.
    /// `step: None` uses `ε^{1/3}·max(1, |τ|)`.
    CentralDifference { step: Option<f64>, direction: C64 },
}

impl fmt::Debug for DerivativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivativeMode::Exact(_) => write!(f, "Exact"),
            DerivativeMode::CentralDifference { step, direction } => f
                .debug_struct("CentralDifference")
                .field("step", step)
                .field("direction", direction)
                .finish(),
        }
    }
}

#[derive(Clone)]
pub enum FamilyKind {
    /// `A(τ) = A₀ + (τ − τ₀)·ΔA`.
    Linear { a0: CMatrix, delta: CMatrix },
    /// `A(τ) = Σ_k C_k τ^k` (powers of τ itself, not of τ − τ₀).
    Polynomial { coefficients: Vec<CMatrix> },
    Sampled {
        evaluator: Evaluator,
        derivative: DerivativeMode,
    },
}

/// A matrix family anchored at `tau0`.
#[derive(Clone)]
pub struct MatrixFamily {
    kind: FamilyKind,
    dim: usize,
    tau0: C64,
}

impl fmt::Debug for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            FamilyKind::Linear { .. } => "Linear".to_string(),
            FamilyKind::Polynomial { coefficients } => {
                format!("Polynomial(degree {})", coefficients.len() - 1)
            }
            FamilyKind::Sampled { derivative, .. } => format!("Sampled({derivative:?})"),
        };
        f.debug_struct("MatrixFamily")
            .field("kind", &kind)
            .field("dim", &self.dim)
            .field("tau0", &self.tau0)
            .finish()
    }
}

/// Where a derivative value came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeSource {
    Exact,
    FiniteDifference { step: f64 },
}

#[derive(Clone, Debug)]
pub struct DerivativeEvaluation {
    pub a_at: CMatrix,
    pub aprime_at: CMatrix,
    pub source: DerivativeSource,
}

fn require_dim(m: &CMatrix, n: usize) -> Result<()> {
    let n_m = m.require_square()?;
    if n_m != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: n_m,
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_tau(tau: C64) -> Result<()> {
    if tau.re.is_finite() && tau.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

impl MatrixFamily {
    pub fn linear(a0: CMatrix, delta: CMatrix, tau0: C64) -> Result<Self> {
        check_tau(tau0)?;
        let n = a0.require_square()?;
        require_dim(&a0, n)?;
        require_dim(&delta, n)?;
        Ok(Self {
            kind: FamilyKind::Linear { a0, delta },
            dim: n,
            tau0,
        })
    }

    pub fn polynomial(coefficients: Vec<CMatrix>, tau0: C64) -> Result<Self> {
        check_tau(tau0)?;
        let first = coefficients.first().ok_or(Error::EmptyDimension)?;
        let degree = coefficients.len() - 1;
        if degree > MAX_POLYNOMIAL_DEGREE {
            return Err(Error::DegreeTooHigh {
                degree,
                cap: MAX_POLYNOMIAL_DEGREE,
            });
        }
        let n = first.require_square()?;
        for c in &coefficients {
            require_dim(c, n)?;
        }
        Ok(Self {
            kind: FamilyKind::Polynomial { coefficients },
            dim: n,
            tau0,
        })
    }

    pub fn sampled(dim: usize, evaluator: Evaluator, derivative: DerivativeMode, tau0: C64) -> Result<Self> {
        check_tau(tau0)?;
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if let DerivativeMode::CentralDifference { step, direction } = &derivative {
            if let Some(h) = step {
                if !(*h > 0.0 && h.is_finite()) {
                    return Err(Error::InvalidArgument(format!("finite-difference step {h} must be positive")));
                }
            }
            if (direction.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument("difference direction must have unit modulus".into()));
            }
        }
        Ok(Self {
            kind: FamilyKind::Sampled { evaluator, derivative },
            dim,
            tau0,
        })
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau0(&self) -> C64 {
        self.tau0
    }

    fn call(&self, f: &Evaluator, tau: C64) -> Result<CMatrix> {
        let m = f(tau).map_err(Error::EvaluatorFailure)?;
        require_dim(&m, self.dim)?;
        Ok(m)
    }

    /// `A(τ)`.
    pub fn eval(&self, tau: C64) -> Result<CMatrix> {
        check_tau(tau)?;
        match &self.kind {
            FamilyKind::Linear { a0, delta } => {
                let dt = tau - self.tau0;
                if dt == ZERO {
                    return Ok(a0.clone());
                }
                Ok(a0 + &delta.scale(dt))
            }
            FamilyKind::Polynomial { coefficients } => Ok(horner(coefficients, tau)),
            FamilyKind::Sampled { evaluator, .. } => self.call(evaluator, tau),
        }
    }

    /// `A(τ)` together with `A'(τ)`.
    pub fn eval_derivative(&self, tau: C64) -> Result<DerivativeEvaluation> {
        let a_at = self.eval(tau)?;
        let (aprime_at, source) = match &self.kind {
            FamilyKind::Linear { delta, .. } => (delta.clone(), DerivativeSource::Exact),
            FamilyKind::Polynomial { coefficients } => {
                let deriv: Vec<CMatrix> = coefficients
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c.scale_real(k as f64))
                    .collect();
                let d = if deriv.is_empty() {
                    CMatrix::zeros(self.dim, self.dim)
                } else {
                    horner(&deriv, tau)
                };
                (d, DerivativeSource::Exact)
            }
            FamilyKind::Sampled { derivative, .. } => match derivative {
                DerivativeMode::Exact(f) => (self.call(f, tau)?, DerivativeSource::Exact),
                DerivativeMode::CentralDifference { step, direction } => {
                    let h = step.unwrap_or_else(|| default_fd_step(tau));
                    let dt = direction * h;
                    let plus = self.eval(tau + dt)?;
                    let minus = self.eval(tau - dt)?;
                    let d = (&plus - &minus).scale(C64::new(1.0, 0.0) / (dt * 2.0));
                    (d, DerivativeSource::FiniteDifference { step: h })
                }
            },
        };
        Ok(DerivativeEvaluation {
            a_at,
            aprime_at,
            source,
        })
    }

    /// `A(τ₀)` and `A'(τ₀)`.
    pub fn at_anchor(&self) -> Result<DerivativeEvaluation> {
        self.eval_derivative(self.tau0)
    }
}

/// `ε^{1/3}·max(1, |τ|)`.
pub fn default_fd_step(tau: C64) -> f64 {
    f64::EPSILON.cbrt() * tau.norm().max(1.0)
}

fn horner(coefficients: &[CMatrix], tau: C64) -> CMatrix {
    let mut acc = coefficients[coefficients.len() - 1].clone();
    for c in coefficients.iter().rev().skip(1) {
        acc = c + &acc.scale(tau);
    }
    acc
}

/// Complex Gaussian matrix scaled to unit spectral norm.
pub fn random_unit_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let m = CMatrix::build(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let s = m.norm2();
    m.scale_real(1.0 / s)
}

/// Seeded random linear family with `τ₀ = 0` and `‖A₀‖ = ‖ΔA‖ = 1`.
///
/// Generator: ChaCha8 seeded with `seed`; `A₀` then `ΔA` are filled row-major
/// with independent standard normal real and imaginary parts, each matrix then
/// divided by its spectral norm.
pub fn random_linear_family(seed: u64, n: usize) -> MatrixFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0 = random_unit_matrix(&mut rng, n);
    let delta = random_unit_matrix(&mut rng, n);
    MatrixFamily::linear(a0, delta, ZERO).expect("generated matrices are finite and square")
}

/// The Jordan-block family `[[0, 1], [τ, 0]]`.
pub fn jordan_example() -> MatrixFamily {
    let c0 = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
    let c1 = CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
    MatrixFamily::polynomial(vec![c0, c1], ZERO).unwrap()
}

/// The semisimple family `[[0, τ], [τ², 0]]`.
pub fn semisimple_example() -> MatrixFamily {
    let c0 = CMatrix::zeros(2, 2);
    let c1 = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
    let c2 = CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
    MatrixFamily::polynomial(vec![c0, c1, c2], ZERO).unwrap()
}

impl MatrixFamily {
    /// Same family re-anchored at `tau0`.
    pub fn with_anchor(&self, tau0: C64) -> Result<Self> {
        check_tau(tau0)?;
        let kind = match &self.kind {
            FamilyKind::Linear { a0, delta } => FamilyKind::Linear {
                a0: a0 + &delta.scale(tau0 - self.tau0),
                delta: delta.clone(),
            },
            other => other.clone(),
        };
        Ok(Self {
            kind,
            dim: self.dim,
            tau0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn linear_evaluation() {
        let f = MatrixFamily::linear(CMatrix::zeros(2, 2), CMatrix::identity(2), ZERO).unwrap();
        assert_eq!(f.eval(c(3.0)).unwrap(), CMatrix::identity(2).scale_real(3.0));
        let d = f.eval_derivative(c(-7.5)).unwrap();
        assert_eq!(d.aprime_at, CMatrix::identity(2));
        assert_eq!(d.source, DerivativeSource::Exact);
    }

    #[test]
    fn linear_anchor_is_bit_exact() {
        let a0 = CMatrix::build(3, 3, |i, j| C64::new(0.1 * i as f64 + 1e-17, 0.3 / (j as f64 + 1.0)));
        let delta = CMatrix::build(3, 3, |i, j| C64::new(1.0 / 3.0, (i * j) as f64));
        let tau0 = C64::new(0.7, -0.2);
        let f = MatrixFamily::linear(a0.clone(), delta, tau0).unwrap();
        assert_eq!(f.eval(tau0).unwrap(), a0);
    }

    #[test]
    fn jordan_family_value() {
        let f = jordan_example();
        let a = f.eval(c(0.04)).unwrap();
        assert_eq!(a, CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.04, 0.0]]).unwrap());
    }

    #[test]
    fn polynomial_horner() {
        let c0 = CMatrix::diag_real(&[1.0, 2.0]);
        let c1 = CMatrix::from_real_rows(&[&[0.0, 1.0], &[3.0, 0.0]]).unwrap();
        let c2 = CMatrix::from_real_rows(&[&[5.0, 0.0], &[0.0, -1.0]]).unwrap();
        let f = MatrixFamily::polynomial(vec![c0.clone(), c1.clone(), c2.clone()], ZERO).unwrap();
        let want = &(&c0 + &c1.scale_real(2.0)) + &c2.scale_real(4.0);
        assert_eq!(f.eval(c(2.0)).unwrap(), want);
    }

    #[test]
    fn semisimple_derivative_at_zero() {
        let d = semisimple_example().eval_derivative(ZERO).unwrap();
        assert_eq!(d.aprime_at, CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap());
    }

    #[test]
    fn sampled_central_difference_matches_linear() {
        let lin = random_linear_family(5, 4);
        let inner = lin.clone();
        let ev: Evaluator = Arc::new(move |t| inner.eval(t).map_err(|e| e.to_string()));
        let f = MatrixFamily::sampled(
            4,
            ev,
            DerivativeMode::CentralDifference {
                step: Some(1e-6),
                direction: c(1.0),
            },
            ZERO,
        )
        .unwrap();
        let d = f.eval_derivative(C64::new(0.2, 0.1)).unwrap();
        let exact = lin.eval_derivative(ZERO).unwrap().aprime_at;
        assert!((&d.aprime_at - &exact).norm2() <= 1e-9);
        assert_eq!(d.source, DerivativeSource::FiniteDifference { step: 1e-6 });
    }

    #[test]
    fn sampled_failure_and_dimension_errors() {
        let bad: Evaluator = Arc::new(|_| Err("boom".to_string()));
        let f = MatrixFamily::sampled(2, bad, DerivativeMode::CentralDifference { step: None, direction: c(1.0) }, ZERO).unwrap();
        assert!(matches!(f.eval(ZERO), Err(Error::EvaluatorFailure(_))));

        let wrong: Evaluator = Arc::new(|_| Ok(CMatrix::identity(3)));
        let f = MatrixFamily::sampled(2, wrong, DerivativeMode::CentralDifference { step: None, direction: c(1.0) }, ZERO).unwrap();
        assert!(matches!(f.eval(ZERO), Err(Error::DimensionMismatch { .. })));

        let r = MatrixFamily::linear(CMatrix::identity(2), CMatrix::identity(3), ZERO);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degree_cap() {
        let coeffs = vec![CMatrix::identity(1); MAX_POLYNOMIAL_DEGREE + 2];
        assert!(matches!(
            MatrixFamily::polynomial(coeffs, ZERO),
            Err(Error::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn polynomial_derivative_second_order_ladder() {
        // central difference error should fall ~100x per decade of h
        let c0 = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, -1.0]]).unwrap();
        let c1 = CMatrix::from_real_rows(&[&[0.5, 0.0], &[1.0, 1.0]]).unwrap();
        let c3 = CMatrix::from_real_rows(&[&[0.0, 1.0], &[2.0, 0.0]]).unwrap();
        let f = MatrixFamily::polynomial(vec![c0, c1, CMatrix::zeros(2, 2), c3], ZERO).unwrap();
        let tau = c(0.8);
        let exact = f.eval_derivative(tau).unwrap().aprime_at;
        let err = |h: f64| {
            let fd = (&f.eval(tau + h).unwrap() - &f.eval(tau - h).unwrap()).scale_real(0.5 / h);
            (&fd - &exact).frobenius_norm()
        };
        let (e1, e2, e3) = (err(1e-2), err(1e-3), err(1e-4));
        assert!(e1 / e2 > 50.0 && e1 / e2 < 200.0, "{e1} {e2}");
        assert!(e2 / e3 > 50.0 && e2 / e3 < 200.0, "{e2} {e3}");
    }

    #[test]
    fn random_family_has_unit_norms() {
        let f = random_linear_family(42, 6);
        let FamilyKind::Linear { a0, delta } = f.kind() else { panic!() };
        assert!((a0.norm2() - 1.0).abs() < 1e-12);
        assert!((delta.norm2() - 1.0).abs() < 1e-12);
    }
}
