//! Conformal closedness and flattening certificates.
//!
//! A coframe is conformally closed when `σ^ω = ι(ξ)` for a covector-valued
//! function `ξ`. Then `α = ξ♯ω` is closed, `h` with `dh = α` gives the
//! conformal factor `f = e^{-h}`, and `ζ` with `dζ = fω` is a chart in
//! which the cone structure becomes the product `ζ(U) × Z`.

pub mod integrate;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use integrate::{antiderivative, LogTerm, PathIntegrator, PathValue, Potential};

use crate::coframe::{pairs, Coframe};
use crate::cone::{characteristic_check, CharacteristicReport, ComplexSampler, ConeStructure};
use crate::error::{Error, Result};
use crate::funcfield::{rational_to_f64, BigRational, RatFunc, RationalFunctions, Rationals, Reals};
use crate::xi::{recover_eta, xi_v, HomTensor, XiReport, XiZ};
use integrate::weighted_path_integral;

#[derive(Clone, Debug, PartialEq)]
pub enum ClosednessVerdict {
    /// `dω = 0`.
    Closed,
    /// `dω = (ξ♯ω)∧ω` with `ξ♯ω` closed.
    ConformallyClosed { xi: Vec<RatFunc> },
    /// `σ^ω(x) ∉ Ξ_V` at `witness`, with relative residual `residual`.
    NotConformallyClosed { witness: Vec<BigRational>, residual: f64 },
}

impl ClosednessVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Closed => "closed",
            Self::ConformallyClosed { .. } => "conformally_closed",
            Self::NotConformallyClosed { .. } => "not_conformally_closed",
        }
    }
}

/// `ξ♯ω = Σ_k ξ_k ω^k` in coordinates.
pub fn xi_sharp(omega: &Coframe, xi: &[RatFunc]) -> Vec<RatFunc> {
    let n = omega.n();
    let a = omega.matrix();
    (0..n)
        .map(|j| {
            let mut t = RatFunc::zero(n);
            for k in 0..n {
                if !xi[k].is_zero() {
                    t = &t + &(&xi[k] * &a[k][j]);
                }
            }
            t
        })
        .collect()
}

fn form_is_closed(form: &[RatFunc]) -> bool {
    pairs(form.len())
        .into_iter()
        .all(|(i, j)| form[j].partial(i) == form[i].partial(j))
}

/// Decides whether `σ^ω` takes values in `Ξ_V`, exactly.
pub fn conformal_closedness_test(omega: &Coframe) -> Result<ClosednessVerdict> {
    let n = omega.n();
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let dw = omega.exterior_derivative();
    if dw.is_zero() {
        return Ok(ClosednessVerdict::Closed);
    }
    let sigma = omega.structure_function();
    let coords: Vec<RatFunc> = sigma.components().iter().flatten().cloned().collect();
    let tensor = HomTensor::from_coords(n, coords)?;
    let field = RationalFunctions { nvars: n };
    if let Some(xi) = recover_eta(&field, &tensor, 0.0)? {
        let alpha = xi_sharp(omega, &xi);
        let a = omega.matrix();
        for (k, row) in dw.components().iter().enumerate() {
            for (p, (i, j)) in pairs(n).into_iter().enumerate() {
                let rhs = &(&alpha[i] * &a[k][j]) - &(&alpha[j] * &a[k][i]);
                if row[p] != rhs {
                    return Err(Error::Internal(format!(
                        "dω ≠ (ξ♯ω)∧ω in component {k} after ξ was recovered"
                    )));
                }
            }
        }
        if !form_is_closed(&alpha) {
            return Err(Error::Internal("ξ♯ω is not closed although σ^ω takes values in Ξ_V".into()));
        }
        return Ok(ClosednessVerdict::ConformallyClosed { xi });
    }
    let (witness, residual) = xi_v_witness(omega, 16, 1)?;
    Ok(ClosednessVerdict::NotConformallyClosed { witness, residual })
}

/// The point among the base point and `count` samples where `σ^ω` is
/// farthest from `Ξ_V`.
pub fn xi_v_witness(omega: &Coframe, count: usize, seed: u64) -> Result<(Vec<BigRational>, f64)> {
    let n = omega.n();
    let space = xi_v(Rationals, n)?;
    let mut best: Option<(Vec<BigRational>, f64)> = None;
    let mut points = vec![omega.chart().base_point().to_vec()];
    points.extend(omega.sample_points(count, seed)?);
    for x in points {
        let sigma = HomTensor::from_coords(n, omega.structure_at(&x, &Rationals)?)?;
        let r = space.membership(&sigma)?.relative_residual();
        if best.as_ref().map_or(true, |(_, b)| r > *b) {
            best = Some((x, r));
        }
    }
    Ok(best.expect("at least the base point"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrationMode {
    /// Symbolic when the ansatz succeeds, quadrature otherwise.
    #[default]
    Auto,
    Quadrature,
}

#[derive(Clone, Debug)]
pub enum HRepr {
    Symbolic(Potential),
    Quadrature(PathIntegrator),
}

/// `h` with `dh = ξ♯ω` and `h(base) = 0`.
#[derive(Clone, Debug)]
pub struct IntegratedH {
    pub alpha: Vec<RatFunc>,
    pub repr: HRepr,
}

impl IntegratedH {
    pub fn is_symbolic(&self) -> bool {
        matches!(self.repr, HRepr::Symbolic(_))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<PathValue> {
        match &self.repr {
            HRepr::Symbolic(p) => Ok(PathValue {
                value: p.evaluate_f64(x)?,
                path_discrepancy: None,
            }),
            HRepr::Quadrature(q) => q.value(x),
        }
    }

    pub fn terms(&self, names: &[String]) -> Vec<String> {
        match &self.repr {
            HRepr::Symbolic(p) => p.terms(names),
            HRepr::Quadrature(_) => vec!["quadrature".into()],
        }
    }
}

pub fn integrate_h(omega: &Coframe, xi: &[RatFunc], mode: IntegrationMode, tol: f64) -> Result<IntegratedH> {
    let alpha = xi_sharp(omega, xi);
    let base = omega.chart().base_point();
    if mode == IntegrationMode::Auto {
        if let Some(p) = antiderivative(&alpha, base)? {
            return Ok(IntegratedH {
                alpha,
                repr: HRepr::Symbolic(p),
            });
        }
    } else if !form_is_closed(&alpha) {
        return Err(Error::Internal("ξ♯ω is not closed".into()));
    }
    let q = PathIntegrator::new(alpha.clone(), base, tol);
    Ok(IntegratedH {
        alpha,
        repr: HRepr::Quadrature(q),
    })
}

/// `f = e^{-h}`, normalized by `f(base) = 1`.
#[derive(Clone, Debug)]
pub enum ConformalFactor {
    Rational(RatFunc),
    Exponential(Potential),
    Quadrature(PathIntegrator),
}

pub fn conformal_factor(h: &IntegratedH) -> ConformalFactor {
    match &h.repr {
        HRepr::Symbolic(p) => match p.exp_neg() {
            Some(f) => ConformalFactor::Rational(f),
            None => ConformalFactor::Exponential(p.clone()),
        },
        HRepr::Quadrature(q) => ConformalFactor::Quadrature(q.clone()),
    }
}

impl ConformalFactor {
    pub fn rational(&self) -> Option<&RatFunc> {
        match self {
            Self::Rational(f) => Some(f),
            _ => None,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self {
            Self::Rational(f) => f.evaluate(x, &Reals::default()),
            Self::Exponential(p) => Ok((-p.evaluate_f64(x)?).exp()),
            Self::Quadrature(q) => Ok((-q.value(x)?.value).exp()),
        }
    }

    pub fn display(&self, names: &[String]) -> String {
        match self {
            Self::Rational(f) => f.display(names).to_string(),
            Self::Exponential(p) => p.display_exp_neg(names),
            Self::Quadrature(_) => "exp(-h), h by quadrature".into(),
        }
    }
}

/// The flat chart `ζ` with `dζ = fω` and `ζ(base) = 0`.
#[derive(Clone, Debug)]
pub enum FlatChart {
    Symbolic(Vec<Potential>),
    /// `ζ^k(x) = ∫ e^{-h} θ^k` along axis polylines; `θ = fω` with `h = 0`
    /// when `f` is rational, `θ = ω` with `dh = α` otherwise.
    Quadrature {
        alpha: Vec<RatFunc>,
        theta: Vec<Vec<RatFunc>>,
        base: Vec<f64>,
        tol: f64,
    },
}

impl FlatChart {
    pub fn is_symbolic(&self) -> bool {
        matches!(self, Self::Symbolic(_))
    }

    /// `ζ(x)` and the disagreement between two path orders.
    pub fn evaluate(&self, x: &[f64]) -> Result<(Vec<f64>, Option<f64>)> {
        match self {
            Self::Symbolic(ps) => Ok((ps.iter().map(|p| p.evaluate_f64(x)).collect::<Result<_>>()?, None)),
            Self::Quadrature {
                alpha,
                theta,
                base,
                tol,
            } => {
                let n = x.len();
                let id: Vec<usize> = (0..n).collect();
                let rev: Vec<usize> = (0..n).rev().collect();
                let a = weighted_path_integral(alpha, theta, base, x, &id, *tol)?;
                let b = weighted_path_integral(alpha, theta, base, x, &rev, *tol).ok();
                let disc = b.map(|b| a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
                Ok((a[1..].to_vec(), disc))
            }
        }
    }

    pub fn components(&self, names: &[String]) -> Vec<String> {
        match self {
            Self::Symbolic(ps) => ps.iter().map(|p| p.display(names)).collect(),
            Self::Quadrature { theta, .. } => vec!["quadrature".into(); theta.len()],
        }
    }
}

/// Integrates `fω`. Symbolic when `f` is rational and every component has
/// a rational-logarithmic antiderivative.
pub fn flat_coordinates(omega: &Coframe, f: &ConformalFactor, alpha: &[RatFunc], mode: IntegrationMode, tol: f64) -> Result<FlatChart> {
    let n = omega.n();
    let base = omega.chart().base_point();
    let base_f: Vec<f64> = base.iter().map(rational_to_f64).collect();
    if let ConformalFactor::Rational(fr) = f {
        let theta: Vec<Vec<RatFunc>> = omega
            .matrix()
            .iter()
            .map(|row| row.iter().map(|e| e * fr).collect())
            .collect();
        for row in &theta {
            if !form_is_closed(row) {
                return Err(Error::Internal("fω is not closed".into()));
            }
        }
        if mode == IntegrationMode::Auto {
            let mut comps = Vec::with_capacity(n);
            for row in &theta {
                match antiderivative(row, base)? {
                    Some(p) => comps.push(p),
                    None => break,
                }
            }
            if comps.len() == n {
                return Ok(FlatChart::Symbolic(comps));
            }
        }
        return Ok(FlatChart::Quadrature {
            alpha: vec![RatFunc::zero(n); n],
            theta,
            base: base_f,
            tol,
        });
    }
    Ok(FlatChart::Quadrature {
        alpha: alpha.to_vec(),
        theta: omega.matrix().to_vec(),
        base: base_f,
        tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyConfig {
    pub characteristic_samples: usize,
    pub validation_samples: usize,
    /// Points at which a quadrature chart is tabulated.
    pub grid_points: usize,
    pub seed: u64,
    pub membership_tol: f64,
    pub quadrature_tol: f64,
    pub validation_tol: f64,
    pub integration: IntegrationMode,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            characteristic_samples: 8,
            validation_samples: 100,
            grid_points: 5,
            seed: 1,
            membership_tol: 1e-8,
            quadrature_tol: 1e-10,
            validation_tol: 1e-9,
            integration: IntegrationMode::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Flat,
    ConformallyFlat,
    Rejected,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Input,
    XiZ,
    CharacteristicCheck,
    ConformalClosedness,
    IntegrateH,
    ConformalFactor,
    FlatCoordinates,
    Validation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Invalid or unusable input.
    Input,
    /// A numerical stage could not reach its tolerance.
    Numerical,
    /// An identity that must hold failed.
    Internal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageError {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<String>,
    /// Relative distance of `σ^ω` at `point` from the subspace tested.
    pub residual: Option<f64>,
    pub sigma: Vec<String>,
    pub prime_nonmember: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// `d(fω) = 0` verified as an identity of rational functions.
    pub closedness_exact: Option<bool>,
    /// `dζ = fω` verified as an identity of rational functions.
    pub jacobian_exact: Option<bool>,
    /// Largest two-path disagreement of a quadrature.
    pub path_discrepancy: f64,
    /// Largest `|f_Z(dζ_x y)| / ‖dζ_x y‖^d` over validation samples.
    pub cone_product_deviation: f64,
    pub validation_samples: usize,
    pub skipped_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub x: Vec<f64>,
    pub zeta: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ZetaOut {
    /// `symbolic` or `grid`.
    pub mode: String,
    pub components: Vec<String>,
    pub grid: Vec<GridPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlattenCertificate {
    pub status: Status,
    pub stage: Stage,
    pub verdict: Option<String>,
    pub xi: Vec<String>,
    pub h_terms: Vec<String>,
    pub h_mode: Option<String>,
    pub f: Option<String>,
    pub f_rational: bool,
    pub zeta: ZetaOut,
    pub residuals: Residuals,
    pub witness: Option<Witness>,
    pub characteristic: Option<CharacteristicReport>,
    pub xi_z: XiReport,
    pub notes: Vec<String>,
    pub error: Option<StageError>,
    pub config_echo: CertifyConfig,
    #[serde(skip)]
    pub closedness: Option<ClosednessVerdict>,
    #[serde(skip)]
    pub factor: Option<ConformalFactor>,
    #[serde(skip)]
    pub chart: Option<FlatChart>,
}

impl FlattenCertificate {
    fn new(xiz: &XiZ, cfg: &CertifyConfig) -> Self {
        Self {
            status: Status::Error,
            stage: Stage::Input,
            verdict: None,
            xi: Vec::new(),
            h_terms: Vec::new(),
            h_mode: None,
            f: None,
            f_rational: false,
            zeta: ZetaOut::default(),
            residuals: Residuals::default(),
            witness: None,
            characteristic: None,
            xi_z: xiz.report(),
            notes: Vec::new(),
            error: None,
            config_echo: cfg.clone(),
            closedness: None,
            factor: None,
            chart: None,
        }
    }

    fn fail(mut self, stage: Stage, e: Error) -> Self {
        let kind = match e {
            Error::Internal(_) => ErrorKind::Internal,
            Error::NoAdmissiblePath(_) | Error::Pole | Error::SamplingFailure { .. } | Error::NotSaturated { .. } => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Input,
        };
        self.status = Status::Error;
        self.stage = stage;
        self.error = Some(StageError {
            kind,
            message: e.to_string(),
        });
        self
    }

    fn numerical(self, stage: Stage, message: String) -> Self {
        let mut c = self.fail(stage, Error::InvalidInput(String::new()));
        c.error = Some(StageError {
            kind: ErrorKind::Numerical,
            message,
        });
        c
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.status, Status::Flat | Status::ConformallyFlat)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

macro_rules! stage {
    ($cert:ident, $stage:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return $cert.fail($stage, err),
        }
    };
}

/// Runs the flattening pipeline. Mathematical rejections and stage errors
/// are reported in the certificate, never as `Err`.
pub fn certify(cs: &ConeStructure, xiz: &XiZ, cfg: &CertifyConfig) -> FlattenCertificate {
    let mut cert = FlattenCertificate::new(xiz, cfg);
    let omega = cs.coframe();
    let n = omega.n();
    let names = omega.chart().variables().to_vec();
    if xiz.n != n {
        return cert.fail(
            Stage::XiZ,
            Error::DimensionMismatch {
                expected: n,
                found: xiz.n,
            },
        );
    }
    if !xiz.equals_xi_v() {
        cert.notes.push(format!(
            "dim Xi_Z = {} differs from dim Xi_V = {}; conformal closedness is tested directly",
            xiz.dim(),
            xiz.dim_xi_v()
        ));
    }
    if !xiz.stable {
        cert.notes.push("Xi_Z dimension did not stabilize across backends".into());
    }

    let ch = stage!(
        cert,
        Stage::CharacteristicCheck,
        characteristic_check(cs, xiz, cfg.characteristic_samples, cfg.seed)
    );
    let ch_pass = ch.pass;
    if let Some(w) = &ch.witness {
        cert.witness = Some(Witness {
            point: w.point.clone(),
            residual: w.residual,
            sigma: w.sigma.clone(),
            prime_nonmember: w.prime_nonmember.clone(),
        });
    }
    cert.characteristic = Some(ch);
    if !ch_pass {
        cert.status = Status::Rejected;
        cert.stage = Stage::CharacteristicCheck;
        return cert;
    }

    let verdict = stage!(cert, Stage::ConformalClosedness, conformal_closedness_test(omega));
    cert.verdict = Some(verdict.name().into());
    cert.closedness = Some(verdict.clone());
    let xi = match &verdict {
        ClosednessVerdict::Closed => vec![RatFunc::zero(n); n],
        ClosednessVerdict::ConformallyClosed { xi } => xi.clone(),
        ClosednessVerdict::NotConformallyClosed { witness, residual } => {
            let sigma = omega
                .structure_at(witness, &Rationals)
                .map(|s| s.iter().map(|c| c.to_string()).collect())
                .unwrap_or_default();
            cert.witness = Some(Witness {
                point: witness.iter().map(|c| c.to_string()).collect(),
                residual: Some(*residual),
                sigma,
                prime_nonmember: Vec::new(),
            });
            cert.status = Status::Rejected;
            cert.stage = Stage::ConformalClosedness;
            return cert;
        }
    };
    cert.xi = xi.iter().map(|c| c.display(&names).to_string()).collect();

    let h = stage!(
        cert,
        Stage::IntegrateH,
        integrate_h(omega, &xi, cfg.integration, cfg.quadrature_tol)
    );
    cert.h_terms = h.terms(&names);
    cert.h_mode = Some(if h.is_symbolic() { "symbolic" } else { "quadrature" }.into());

    let f = conformal_factor(&h);
    cert.f = Some(f.display(&names));
    cert.f_rational = f.rational().is_some();
    cert.residuals.closedness_exact = Some(match &f {
        ConformalFactor::Rational(fr) => omega
            .matrix()
            .iter()
            .all(|row| form_is_closed(&row.iter().map(|e| e * fr).collect::<Vec<_>>())),
        // d(fω) = f (dω - dh∧ω) with dω = α∧ω and dh = α, both exact.
        ConformalFactor::Exponential(_) => true,
        ConformalFactor::Quadrature(_) => false,
    });
    if cert.residuals.closedness_exact == Some(false) && f.rational().is_some() {
        return cert.fail(Stage::ConformalFactor, Error::Internal("d(fω) ≠ 0 for a rational factor".into()));
    }

    let chart = stage!(
        cert,
        Stage::FlatCoordinates,
        flat_coordinates(omega, &f, &h.alpha, cfg.integration, cfg.quadrature_tol)
    );
    cert.zeta.components = chart.components(&names);
    cert.zeta.mode = if chart.is_symbolic() { "symbolic" } else { "grid" }.into();
    if let (FlatChart::Symbolic(ps), Some(fr)) = (&chart, f.rational()) {
        let exact = ps.iter().zip(omega.matrix()).all(|(p, row)| {
            p.gradient()
                .iter()
                .zip(row)
                .all(|(g, e)| g == &(e * fr))
        });
        cert.residuals.jacobian_exact = Some(exact);
        if !exact {
            return cert.fail(Stage::FlatCoordinates, Error::Internal("dζ ≠ fω".into()));
        }
    }

    cert = validate(cert, cs, &h, &f, &chart, cfg);
    if cert.error.is_some() {
        return cert;
    }
    cert.status = match verdict {
        ClosednessVerdict::Closed => Status::Flat,
        _ => Status::ConformallyFlat,
    };
    cert.stage = Stage::Validation;
    if !(h.is_symbolic() && chart.is_symbolic()) {
        cert.notes
            .push("mixed run: quadrature results are validated on samples, not as identities".into());
    }
    cert.factor = Some(f);
    cert.chart = Some(chart);
    cert
}

/// Pushes sampled cone points through `(ζ(x), dζ_x(y))` and measures how far
/// the image is from the cone over `Z`.
fn validate(
    mut cert: FlattenCertificate,
    cs: &ConeStructure,
    h: &IntegratedH,
    f: &ConformalFactor,
    chart: &FlatChart,
    cfg: &CertifyConfig,
) -> FlattenCertificate {
    let omega = cs.coframe();
    let sampler = ComplexSampler::new(cs.hypersurface());
    let points = stage!(
        cert,
        Stage::Validation,
        crate::cone::sample_cone_float(cs, cfg.validation_samples, cfg.seed)
    );
    let jac = |x: &[f64]| -> Result<Vec<Vec<f64>>> {
        match chart {
            FlatChart::Symbolic(ps) => ps
                .iter()
                .map(|p| p.gradient().iter().map(|g| g.evaluate(x, &Reals::default())).collect())
                .collect(),
            FlatChart::Quadrature { .. } => {
                let fx = f.evaluate(x)?;
                Ok(omega
                    .matrix_at(x, &Reals::default())?
                    .into_iter()
                    .map(|row| row.into_iter().map(|e| fx * e).collect())
                    .collect())
            }
        }
    };
    let results: Vec<Option<(f64, f64)>> = points
        .par_iter()
        .map(|pt| {
            let x: Vec<f64> = pt.x.iter().map(rational_to_f64).collect();
            let j = jac(&x).ok()?;
            let w: Vec<num_complex::Complex64> = j
                .iter()
                .map(|row| row.iter().zip(&pt.y).map(|(a, y)| y * *a).sum())
                .collect();
            let disc = match &h.repr {
                HRepr::Quadrature(_) => h.evaluate(&x).ok()?.path_discrepancy.unwrap_or(0.0),
                HRepr::Symbolic(_) => 0.0,
            };
            Some((sampler.relative_value(&w), disc))
        })
        .collect();
    let mut dev: f64 = 0.0;
    let mut disc: f64 = 0.0;
    let mut used = 0;
    for (d, p) in results.into_iter().flatten() {
        dev = dev.max(d);
        disc = disc.max(p);
        used += 1;
    }
    cert.residuals.cone_product_deviation = dev;
    cert.residuals.validation_samples = used;
    cert.residuals.skipped_samples = points.len() - used;
    if let FlatChart::Quadrature { .. } = chart {
        let mut grid = Vec::new();
        for pt in points.iter().take(cfg.grid_points) {
            let x: Vec<f64> = pt.x.iter().map(rational_to_f64).collect();
            if let Ok((z, d)) = chart.evaluate(&x) {
                disc = disc.max(d.unwrap_or(0.0));
                grid.push(GridPoint { x, zeta: z });
            }
        }
        cert.zeta.grid = grid;
    }
    cert.residuals.path_discrepancy = disc;
    if used == 0 {
        return cert.numerical(Stage::Validation, "no validation sample lies in the domain of ζ".into());
    }
    if !(dev < cfg.validation_tol) {
        return cert.numerical(
            Stage::Validation,
            format!("cone-product deviation {dev:e} exceeds {:e}", cfg.validation_tol),
        );
    }
    if !(disc <= 100.0 * cfg.quadrature_tol) {
        return cert.numerical(
            Stage::Validation,
            format!("path discrepancy {disc:e} exceeds {:e}", 100.0 * cfg.quadrature_tol),
        );
    }
    let base: Vec<f64> = omega.chart().base_point().iter().map(rational_to_f64).collect();
    match jac(&base).map(det_f64) {
        Ok(d) if d.abs() > 0.0 => {}
        _ => return cert.fail(Stage::Validation, Error::Internal("dζ is degenerate at the base point".into())),
    }
    cert
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            return 0.0;
        };
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= m * a[c][k];
            }
        }
    }
    det
}

/// Whether `g = c·f` for a nonzero rational constant `c`.
pub fn equal_up_to_constant(f: &RatFunc, g: &RatFunc) -> bool {
    if f.is_zero() || g.is_zero() {
        return false;
    }
    (g / f).constant_value().is_some_and(|c| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coframe::Chart;
    use crate::funcfield::parse_ratfunc;

    fn coframe(rows: &[[&str; 3]; 3]) -> Coframe {
        Coframe::from_strings(Chart::standard(3).unwrap(), &rows.map(|r| r.to_vec())).unwrap()
    }

    fn r(s: &str) -> RatFunc {
        parse_ratfunc(s, &["x1", "x2", "x3"]).unwrap()
    }

    #[test]
    fn closedness_verdicts() {
        let flat = coframe(&[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
        assert_eq!(conformal_closedness_test(&flat).unwrap(), ClosednessVerdict::Closed);
        let s = "1/(1-x1)";
        let resc = coframe(&[[s, "0", "0"], ["0", s, "0"], ["0", "0", s]]);
        match conformal_closedness_test(&resc).unwrap() {
            ClosednessVerdict::ConformallyClosed { xi } => assert_eq!(xi, vec![r("1"), r("0"), r("0")]),
            v => panic!("{v:?}"),
        }
        let heis = coframe(&[["1", "0", "0"], ["0", "1", "0"], ["0", "-x1", "1"]]);
        match conformal_closedness_test(&heis).unwrap() {
            ClosednessVerdict::NotConformallyClosed { residual, .. } => assert!(residual > 0.1),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn rescaled_model_factor_and_chart() {
        let s = "1/(1-x1)";
        let resc = coframe(&[[s, "0", "0"], ["0", s, "0"], ["0", "0", s]]);
        let ClosednessVerdict::ConformallyClosed { xi } = conformal_closedness_test(&resc).unwrap() else {
            panic!()
        };
        let h = integrate_h(&resc, &xi, IntegrationMode::Auto, 1e-10).unwrap();
        let f = conformal_factor(&h);
        assert_eq!(f.rational().unwrap(), &r("1-x1"));
        let chart = flat_coordinates(&resc, &f, &h.alpha, IntegrationMode::Auto, 1e-10).unwrap();
        let FlatChart::Symbolic(ps) = chart else { panic!() };
        assert_eq!(ps[0].rational, r("x1"));
        assert_eq!(ps[2].rational, r("x3"));
        let q = integrate_h(&resc, &xi, IntegrationMode::Quadrature, 1e-10).unwrap();
        let v = q.evaluate(&[0.5, 0.1, 0.2]).unwrap();
        assert!((v.value + 0.5f64.ln()).abs() < 1e-9);
        assert!(v.path_discrepancy.unwrap() < 1e-9);
    }

    #[test]
    fn half_integer_factor_is_exponential() {
        // ω = x1^{-1/2} dζ with ζ = (2/3 x1^{3/2}, x1^{1/2} x2, x1^{1/2} x3).
        let chart = Chart::standard(3)
            .unwrap()
            .with_base_point(vec![BigRational::from_integer(1.into()), BigRational::zero(), BigRational::zero()])
            .unwrap();
        let c = Coframe::from_strings(
            chart,
            &[vec!["1", "0", "0"], vec!["x2/(2*x1)", "1", "0"], vec!["x3/(2*x1)", "0", "1"]],
        )
        .unwrap();
        let ClosednessVerdict::ConformallyClosed { xi } = conformal_closedness_test(&c).unwrap() else {
            panic!()
        };
        let h = integrate_h(&c, &xi, IntegrationMode::Auto, 1e-10).unwrap();
        let f = conformal_factor(&h);
        assert!(f.rational().is_none());
        let fx = f.evaluate(&[4.0, 1.0, 1.0]).unwrap();
        assert!((fx - 2.0).abs() < 1e-12, "{fx}");
        let z = flat_coordinates(&c, &f, &h.alpha, IntegrationMode::Auto, 1e-10).unwrap();
        let (v, d) = z.evaluate(&[4.0, 1.0, -1.0]).unwrap();
        let expect = [2.0 / 3.0 * (8.0 - 1.0), 2.0, -2.0];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-8, "{v:?}");
        }
        assert!(d.unwrap() < 1e-8);
    }

    #[test]
    fn constant_ratio() {
        assert!(equal_up_to_constant(&r("1-x1"), &r("3-3*x1")));
        assert!(!equal_up_to_constant(&r("1-x1"), &r("1+x1")));
    }
}
