//! The induced coframe `Ω = (θ, λ)` on the tangent bundle and the geodesic flow.
//!
//! The tangent chart has coordinates `(x_1..x_n, y_1..y_n)`, where `y` are
//! the components of a tangent vector `Σ_j y_j ∂/∂x_j`. With `μ = A(x) y`,
//! `θ = π*ω` and `λ = dμ`.

use num_traits::{One, Zero};

use super::vector_field::VectorField;
use super::{pairs, transform_pairs, Chart, Coframe, FrameField, StructureFunction};
use crate::error::Result;
use crate::funcfield::{BigRational, RatFunc};

/// The 2n-dimensional chart over a base chart.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentChart {
    n: usize,
    chart: Chart,
}

impl TangentChart {
    pub fn over(base: &Chart) -> Result<Self> {
        let n = base.n();
        let mut names = base.variables().to_vec();
        for i in 0..n {
            let mut y = format!("y{}", i + 1);
            while names.contains(&y) {
                y = format!("v_{y}");
            }
            names.push(y);
        }
        let mut point = base.base_point().to_vec();
        point.extend((0..n).map(|i| {
            if i == 0 {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        }));
        Ok(Self {
            n,
            chart: Chart::new(names, point)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// The fiber coordinate `y_i` as a function on the tangent chart.
    pub fn y(&self, i: usize) -> RatFunc {
        RatFunc::var(2 * self.n, self.n + i)
    }

    /// Pull back a function on the base chart.
    pub fn lift(&self, f: &RatFunc) -> RatFunc {
        f.embed(2 * self.n, 0)
    }
}

/// `Ω = (θ, λ)` and `μ`, as coefficient rows against `(dx, dy)`.
#[derive(Clone, Debug)]
pub struct InducedCoframe {
    tangent: TangentChart,
    theta: Vec<Vec<RatFunc>>,
    lambda: Vec<Vec<RatFunc>>,
    mu: Vec<RatFunc>,
    a: Vec<Vec<RatFunc>>,
}

/// The dual frame of `Ω`: `D_θ` and `D_λ`, each n vector fields on the
/// 2n-chart.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame {
    pub d_theta: FrameField,
    pub d_lambda: FrameField,
}

impl TangentFrame {
    /// Columns `D_θ` then `D_λ`, as a 2n x 2n matrix.
    pub fn combined_matrix(&self) -> Vec<Vec<RatFunc>> {
        self.d_theta
            .matrix()
            .iter()
            .zip(self.d_lambda.matrix())
            .map(|(t, l)| t.iter().chain(l).cloned().collect())
            .collect()
    }
}

impl InducedCoframe {
    pub fn new(omega: &Coframe) -> Result<Self> {
        let tangent = TangentChart::over(omega.chart())?;
        let n = omega.n();
        let a: Vec<Vec<RatFunc>> = omega
            .matrix()
            .iter()
            .map(|row| row.iter().map(|e| tangent.lift(e)).collect())
            .collect();
        let mu: Vec<RatFunc> = a
            .iter()
            .map(|row| {
                let mut acc = RatFunc::zero(2 * n);
                for (j, e) in row.iter().enumerate() {
                    if !e.is_zero() {
                        acc = &acc + &(e * &tangent.y(j));
                    }
                }
                acc
            })
            .collect();
        let theta = a
            .iter()
            .map(|row| {
                row.iter()
                    .cloned()
                    .chain((0..n).map(|_| RatFunc::zero(2 * n)))
                    .collect()
            })
            .collect();
        let lambda = mu
            .iter()
            .map(|m| (0..2 * n).map(|i| m.partial(i)).collect())
            .collect();
        Ok(Self {
            tangent,
            theta,
            lambda,
            mu,
            a,
        })
    }

    pub fn n(&self) -> usize {
        self.tangent.n
    }

    pub fn tangent_chart(&self) -> &TangentChart {
        &self.tangent
    }

    pub fn theta(&self) -> &[Vec<RatFunc>] {
        &self.theta
    }

    pub fn lambda(&self) -> &[Vec<RatFunc>] {
        &self.lambda
    }

    pub fn mu(&self) -> &[RatFunc] {
        &self.mu
    }

    /// Rows `θ` then `λ`, as a 2n x 2n matrix against `(dx, dy)`.
    pub fn combined_matrix(&self) -> Vec<Vec<RatFunc>> {
        self.theta.iter().chain(&self.lambda).cloned().collect()
    }

    /// The block inverse `[[B, 0], [-B C B, B]]`, where `C` is the
    /// dx-part of `λ`.
    pub fn dual_frame(&self, omega: &Coframe) -> TangentFrame {
        let n = self.n();
        let nv = 2 * n;
        let b: Vec<Vec<RatFunc>> = omega
            .inverse()
            .iter()
            .map(|row| row.iter().map(|e| self.tangent.lift(e)).collect())
            .collect();
        let c: Vec<Vec<RatFunc>> = self.lambda.iter().map(|row| row[..n].to_vec()).collect();
        let bc = crate::linalg::ratfunc_matmul(&b, &c);
        let bcb = crate::linalg::ratfunc_matmul(&bc, &b);
        let zero = RatFunc::zero(nv);
        let theta_cols: Vec<Vec<RatFunc>> = (0..nv)
            .map(|i| {
                (0..n)
                    .map(|a| if i < n { b[i][a].clone() } else { -&bcb[i - n][a] })
                    .collect()
            })
            .collect();
        let lambda_cols: Vec<Vec<RatFunc>> = (0..nv)
            .map(|i| {
                (0..n)
                    .map(|a| if i < n { zero.clone() } else { b[i - n][a].clone() })
                    .collect()
            })
            .collect();
        TangentFrame {
            d_theta: FrameField::new(theta_cols),
            d_lambda: FrameField::new(lambda_cols),
        }
    }

    /// `γ = Σ_a μ^a (D_θ)_a`.
    pub fn geodesic_flow(&self, frame: &TangentFrame) -> VectorField {
        VectorField::combination(&self.mu, &frame.d_theta.fields())
    }

    /// Structure function of `Ω` in the frame `(D_θ, D_λ)`.
    pub fn structure_function(&self, frame: &TangentFrame) -> StructureFunction {
        let nv = 2 * self.n();
        let rows = self.combined_matrix();
        let d: Vec<Vec<Vec<RatFunc>>> = rows
            .iter()
            .map(|row| (0..nv).map(|l| row.iter().map(|e| e.partial(l)).collect()).collect())
            .collect();
        // d[k][l][j] = ∂_l M[k][j]
        let w: Vec<Vec<RatFunc>> = d
            .iter()
            .map(|dk| pairs(nv).into_iter().map(|(i, j)| &dk[i][j] - &dk[j][i]).collect())
            .collect();
        StructureFunction::from_components(nv, transform_pairs(&w, &frame.combined_matrix()))
    }

    /// `A(x)` lifted to the tangent chart.
    pub fn lifted_matrix(&self) -> &[Vec<RatFunc>] {
        &self.a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::parse_ratfunc;

    fn coframe(rows: [[&str; 3]; 3]) -> Coframe {
        let v = ["x1", "x2", "x3"];
        let a = rows
            .iter()
            .map(|row| row.iter().map(|s| parse_ratfunc(s, &v).unwrap()).collect())
            .collect();
        Coframe::new(Chart::standard(3).unwrap(), a).unwrap()
    }

    fn t(s: &str) -> RatFunc {
        parse_ratfunc(s, &["x1", "x2", "x3", "y1", "y2", "y3"]).unwrap()
    }

    #[test]
    fn flat_induced_coframe() {
        let c = coframe([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
        let om = InducedCoframe::new(&c).unwrap();
        assert_eq!(om.mu()[1], t("y2"));
        assert_eq!(om.lambda()[2][5], t("1"));
        assert!(om.lambda()[2][..5].iter().all(RatFunc::is_zero));
        let fr = om.dual_frame(&c);
        assert_eq!(fr.d_theta.field(0), VectorField::coordinate(6, 0));
        assert_eq!(fr.d_lambda.field(2), VectorField::coordinate(6, 5));
        let g = om.geodesic_flow(&fr);
        assert_eq!(g.components()[..3], [t("y1"), t("y2"), t("y3")]);
        assert!(g.components()[3..].iter().all(RatFunc::is_zero));
    }

    #[test]
    fn rescaled_lambda() {
        let s = "1/(1-x1)";
        let c = coframe([[s, "0", "0"], ["0", s, "0"], ["0", "0", s]]);
        let om = InducedCoframe::new(&c).unwrap();
        assert_eq!(om.mu()[1], t("y2/(1-x1)"));
        assert_eq!(om.lambda()[1][0], t("y2/(1-x1)^2"));
        assert_eq!(om.lambda()[1][4], t("1/(1-x1)"));
        let fr = om.dual_frame(&c);
        assert_eq!(fr.d_lambda.field(0).component(3), &t("1-x1"));
    }

    #[test]
    fn heisenberg_lambda() {
        let c = coframe([["1", "0", "0"], ["0", "1", "0"], ["0", "x1", "1"]]);
        let om = InducedCoframe::new(&c).unwrap();
        assert_eq!(om.mu()[2], t("x1*y2 + y3"));
        let l = &om.lambda()[2];
        assert_eq!((l[0].clone(), l[4].clone(), l[5].clone()), (t("y2"), t("x1"), t("1")));
    }
}
