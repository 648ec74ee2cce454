use crate::error::Result;
use crate::funcfield::{RatFunc, Scalars};

/// A vector field `Σ_j X^j ∂_j` with rational-function components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<RatFunc>,
}

impl VectorField {
    pub fn new(comps: Vec<RatFunc>) -> Self {
        Self { comps }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::new(vec![RatFunc::zero(nvars); nvars])
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(nvars: usize, i: usize) -> Self {
        let mut v = Self::zero(nvars);
        v.comps[i] = RatFunc::one(nvars);
        v
    }

    pub fn nvars(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[RatFunc] {
        &self.comps
    }

    pub fn component(&self, j: usize) -> &RatFunc {
        &self.comps[j]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RatFunc::is_zero)
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero(f.nvars());
        for (j, xj) in self.comps.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            let d = f.partial(j);
            if !d.is_zero() {
                acc = &acc + &(xj * &d);
            }
        }
        acc
    }

    /// Lie bracket `[X, Y]^j = X(Y^j) - Y(X^j)`.
    pub fn bracket(&self, other: &Self) -> Self {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(xj, yj)| &self.apply(yj) - &other.apply(xj))
            .collect();
        Self::new(comps)
    }

    pub fn scale(&self, s: &RatFunc) -> Self {
        Self::new(self.comps.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect())
    }

    /// `Σ_a coeffs[a] fields[a]`.
    pub fn combination(coeffs: &[RatFunc], fields: &[VectorField]) -> Self {
        let nv = fields[0].nvars();
        let mut acc = Self::zero(nv);
        for (c, f) in coeffs.iter().zip(fields) {
            if !c.is_zero() {
                acc = acc.add(&f.scale(c));
            }
        }
        acc
    }

    pub fn evaluate<F: Scalars>(&self, point: &[F::Elem], field: &F) -> Result<Vec<F::Elem>> {
        self.comps
            .iter()
            .map(|c| {
                if c.is_zero() {
                    Ok(field.zero())
                } else {
                    c.evaluate(point, field)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::parse_ratfunc;

    fn r(s: &str) -> RatFunc {
        parse_ratfunc(s, &["x1", "x2", "x3"]).unwrap()
    }

    #[test]
    fn bracket_of_heisenberg_fields() {
        let d1 = VectorField::coordinate(3, 0);
        let d2 = VectorField::new(vec![r("0"), r("1"), r("-x1")]);
        let b = d1.bracket(&d2);
        assert_eq!(b, VectorField::new(vec![r("0"), r("0"), r("-1")]));
        assert_eq!(d2.bracket(&d1), VectorField::new(vec![r("0"), r("0"), r("1")]));
    }

    #[test]
    fn apply_is_directional_derivative() {
        let x = VectorField::new(vec![r("x2"), r("1"), r("0")]);
        assert_eq!(x.apply(&r("x1*x2")), r("x2^2 + x1"));
    }
}
