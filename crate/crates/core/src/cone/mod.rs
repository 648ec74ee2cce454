//! Projective hypersurfaces `Z ⊂ P(V)` and cone structures presented by an
//! adapted coframe: the cone over the fiber at `x` is `{y : f(A(x) y) = 0}`.

pub mod checks;
pub mod jet;
pub mod sample;
pub mod smooth;

use std::fmt;

use crate::coframe::{Coframe, InducedCoframe, TangentFrame, VectorField};
use crate::error::{Error, Result};
use crate::funcfield::{compose, parse_poly, BigRational, MultiPoly, RatFunc};

pub use checks::{
    characteristic_check, double_bracket_check, geodesic_tangency_check, BracketMode, BracketReport,
    BracketSample, CharacteristicReport, CharacteristicWitness,
};
pub use sample::{sample_cone_float, sample_cone_modp, ComplexSampler, ConePointFloat, ConePointModP, ModSampler};
pub use smooth::{smooth_check, SmoothReport, SmoothVerdict};

/// The cone `Ẑ = {f = 0} ⊂ V` over a projective hypersurface.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypersurface {
    f: MultiPoly,
    degree: u32,
    variables: Vec<String>,
    grad: Vec<MultiPoly>,
}

impl Hypersurface {
    /// `f` must be homogeneous of degree at least 2 in `n >= 3` variables.
    pub fn new(f: MultiPoly, variables: Vec<String>) -> Result<Self> {
        let n = f.nvars();
        if variables.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: variables.len(),
            });
        }
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        if f.is_zero() || !f.is_homogeneous() {
            return Err(Error::InvalidHypersurface("defining polynomial is not homogeneous".into()));
        }
        let degree = f.total_degree();
        if degree < 2 {
            return Err(Error::InvalidHypersurface(format!(
                "degree {degree}: a hyperplane is a linear subvariety"
            )));
        }
        let grad = (0..n).map(|i| f.partial(i)).collect();
        Ok(Self {
            f,
            degree,
            variables,
            grad,
        })
    }

    /// Parse `text` in the variables `x1..xn`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        Self::parse_with(text, vars)
    }

    pub fn parse_with(text: &str, variables: Vec<String>) -> Result<Self> {
        let f = parse_poly(text, &variables)?;
        Self::new(f, variables)
    }

    /// `x1^d + ... + xn^d`.
    pub fn fermat(n: usize, d: u32) -> Result<Self> {
        let text: Vec<String> = (1..=n).map(|i| format!("x{i}^{d}")).collect();
        Self::parse(&text.join(" + "), n)
    }

    pub fn n(&self) -> usize {
        self.f.nvars()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn f(&self) -> &MultiPoly {
        &self.f
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn gradient(&self) -> &[MultiPoly] {
        &self.grad
    }

    /// Coefficients `a_i` when `f = Σ a_i x_i^d`.
    pub fn diagonal_coefficients(&self) -> Option<Vec<BigRational>> {
        let n = self.n();
        let mut a = vec![BigRational::from_integer(0.into()); n];
        for (m, c) in self.f.terms() {
            let nz: Vec<usize> = (0..n).filter(|&i| m[i] > 0).collect();
            if nz.len() != 1 {
                return None;
            }
            a[nz[0]] = c.clone();
        }
        Some(a)
    }
}

impl fmt::Display for Hypersurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.f.display(&self.variables))
    }
}

/// A `Z`-isotrivial cone structure with its adapted coframe.
#[derive(Clone, Debug)]
pub struct ConeStructure {
    coframe: Coframe,
    z: Hypersurface,
    induced: InducedCoframe,
    cone_equation: RatFunc,
}

/// The cone structure `C_x = ω_x^{-1}(Z)`; `F(x, y) = f(A(x) y)`.
pub fn adapted_cone(omega: &Coframe, z: &Hypersurface) -> Result<ConeStructure> {
    if omega.n() != z.n() {
        return Err(Error::DimensionMismatch {
            expected: omega.n(),
            found: z.n(),
        });
    }
    let induced = InducedCoframe::new(omega)?;
    let cone_equation = compose(z.f(), induced.mu());
    Ok(ConeStructure {
        coframe: omega.clone(),
        z: z.clone(),
        induced,
        cone_equation,
    })
}

impl ConeStructure {
    pub fn coframe(&self) -> &Coframe {
        &self.coframe
    }

    pub fn hypersurface(&self) -> &Hypersurface {
        &self.z
    }

    pub fn induced(&self) -> &InducedCoframe {
        &self.induced
    }

    pub fn cone_equation(&self) -> &RatFunc {
        &self.cone_equation
    }

    pub fn tangent_frame(&self) -> TangentFrame {
        self.induced.dual_frame(&self.coframe)
    }

    pub fn geodesic_flow(&self) -> VectorField {
        self.induced.geodesic_flow(&self.tangent_frame())
    }
}
