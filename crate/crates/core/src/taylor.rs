//! Time-Taylor coefficients of the Lagrangian displacement.
//!
//! With `x(q, t) = q + ξ(q, t)` and `ξ = Σ_{s>=1} ξ^(s) t^s`, the Cauchy
//! invariants and the unit-Jacobian condition give, order by order,
//!
//! ```text
//! s ∇×ξ^(s) = ω₀ δ_{s1} - Σ_k Σ_{0<n<s} n ∇ξ^(n)_k × ∇ξ^(s-n)_k
//! ∇·ξ^(s)   = Σ_{i<j} Σ_{0<n<s} [(∂_j ξ^(n)_i)(∂_i ξ^(s-n)_j) - (∂_i ξ^(n)_i)(∂_j ξ^(s-n)_j)]
//!             - Σ_{l+m+n=s} ε_ijk (∂_i ξ^(l)_1)(∂_j ξ^(m)_2)(∂_k ξ^(n)_3)
//! ```
//!
//! Each new coefficient is recovered from its curl and divergence through
//! the potentials `∇²a^(s) = -curl_rhs/s`, `∇²b^(s) = div_rhs`.
//!
//! Products are formed pointwise on the grid and truncated to the
//! dealiasing band. The cubic term uses cached pair sums
//! `P^(p)_ij = Σ_{l+m=p} (∂_i ξ^(l)_1)(∂_j ξ^(m)_2)`, each dealiased, so a
//! new order costs `O(s)` grid products.

use num_complex::Complex64;

use crate::fields::{
    curl, divergence, inverse_transform, partial, project_samples, BandEvaluator, GridSpec,
    Rank, RealField, SpectralField,
};
use crate::hodge::{assemble_from_potentials, inverse_laplacian, Potentials};
use crate::{Error, Result};

/// Largest admissible `max |div v₀|` spectral amplitude.
pub const SOLENOIDAL_TOLERANCE: f64 = 1e-10;

/// `[3 * i + j]` holds `∂_i ξ_j` sampled on the grid.
type GradSamples = [Vec<f64>; 9];

const UPPER_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
const LEVI_CIVITA: [(usize, usize, usize, f64); 6] = [
    (0, 1, 2, 1.0),
    (1, 2, 0, 1.0),
    (2, 0, 1, 1.0),
    (0, 2, 1, -1.0),
    (2, 1, 0, -1.0),
    (1, 0, 2, -1.0),
];

/// Per-order sup-norm diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderNorms {
    pub order: usize,
    /// `max |ξ^(s)|` over grid points and components.
    pub xi_sup: f64,
    /// `max |∇²a^(s)|`.
    pub lap_a_sup: f64,
    /// `max |∇²b^(s)|`.
    pub lap_b_sup: f64,
}

#[derive(Clone, Debug)]
struct Order {
    xi: SpectralField,
    grad: GradSamples,
    potentials: Potentials,
    lap_a: SpectralField,
    lap_b: SpectralField,
    norms: OrderNorms,
}

/// Displacement coefficients `ξ^(1..=S)` with their potentials and norms.
#[derive(Clone, Debug)]
pub struct TaylorSeries {
    grid: GridSpec,
    omega0: SpectralField,
    orders: Vec<Order>,
    // pair_sums[p - 2] = P^(p)
    pair_sums: Vec<GradSamples>,
}

/// Displacement and Lagrangian velocity at one time.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub displacement: SpectralField,
    pub velocity: SpectralField,
}

/// Deformation gradient `∂_i x_j = δ_ij + ∂_i ξ_j` and its determinant.
#[derive(Clone, Debug)]
pub struct JacobianField {
    pub matrix: [Vec<f64>; 9],
    pub det: Vec<f64>,
}

impl JacobianField {
    pub fn max_det_error(&self) -> f64 {
        self.det.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn gradient_samples(xi: &SpectralField) -> GradSamples {
    let mut out: GradSamples = Default::default();
    for i in 0..3 {
        let d = inverse_transform(&partial(xi, i)).into_data();
        for (j, comp) in d.into_iter().enumerate() {
            out[3 * i + j] = comp;
        }
    }
    out
}

fn dealias_samples(grid: GridSpec, samples: GradSamples) -> GradSamples {
    let mut rows = samples.into_iter();
    let mut out: GradSamples = Default::default();
    for i in 0..3 {
        let row: Vec<Vec<f64>> = rows.by_ref().take(3).collect();
        let projected = project_samples(grid, Rank::Vector, &row).expect("grid-sized rows");
        for (j, comp) in inverse_transform(&projected).into_data().into_iter().enumerate() {
            out[3 * i + j] = comp;
        }
    }
    out
}

fn sup(field: &SpectralField) -> f64 {
    inverse_transform(field).max_abs()
}

fn det3(m: [f64; 9]) -> f64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6])
}

impl TaylorSeries {
    /// Starts the series with `ξ^(1) = v₀`, caching `ω₀ = ∇×v₀`.
    pub fn init_first_coefficient(v0: &SpectralField) -> Result<Self> {
        v0.expect_rank(Rank::Vector)?;
        let div = divergence(v0)?.max_amplitude();
        if div > SOLENOIDAL_TOLERANCE {
            return Err(Error::NotSolenoidal(div));
        }
        let grid = *v0.grid();
        let omega0 = curl(v0)?;
        let lap_a = omega0.scaled(-1.0).into_zero_mean();
        let lap_b = SpectralField::zeros(grid, Rank::Scalar).into_zero_mean();
        let potentials = Potentials::new(inverse_laplacian(&lap_a)?, lap_b.clone())?;
        let norms = OrderNorms {
            order: 1,
            xi_sup: sup(v0),
            lap_a_sup: sup(&lap_a),
            lap_b_sup: 0.0,
        };
        let mut series = Self {
            grid,
            omega0,
            orders: vec![Order {
                xi: v0.clone(),
                grad: gradient_samples(v0),
                potentials,
                lap_a,
                lap_b,
                norms,
            }],
            pair_sums: Vec::new(),
        };
        series.push_pair_sum();
        Ok(series)
    }

    /// Builds all coefficients up to `order`.
    pub fn build(v0: &SpectralField, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("series order must be positive".into()));
        }
        let mut series = Self::init_first_coefficient(v0)?;
        while series.order() < order {
            series.next_coefficient()?;
        }
        Ok(series)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Highest computed order `S`.
    pub fn order(&self) -> usize {
        self.orders.len()
    }

    pub fn omega0(&self) -> &SpectralField {
        &self.omega0
    }

    /// `ξ^(s)`, `1 <= s <= order`.
    pub fn coefficient(&self, s: usize) -> &SpectralField {
        &self.orders[s - 1].xi
    }

    pub fn potentials(&self, s: usize) -> &Potentials {
        &self.orders[s - 1].potentials
    }

    /// `(∇²a^(s), ∇²b^(s))`.
    pub fn potential_laplacians(&self, s: usize) -> (&SpectralField, &SpectralField) {
        let o = &self.orders[s - 1];
        (&o.lap_a, &o.lap_b)
    }

    pub fn norms(&self) -> Vec<OrderNorms> {
        self.orders.iter().map(|o| o.norms).collect()
    }

    fn check_history(&self, s: usize) -> Result<()> {
        if s == 0 {
            return Err(Error::InvalidParameter("orders start at 1".into()));
        }
        if self.order() + 1 < s {
            return Err(Error::MissingHistory {
                needed: s - 1,
                available: self.order(),
            });
        }
        Ok(())
    }

    fn grad(&self, s: usize) -> &GradSamples {
        &self.orders[s - 1].grad
    }

    /// Right side of the curl recursion at order `s`.
    pub fn curl_rhs(&self, s: usize) -> Result<SpectralField> {
        self.check_history(s)?;
        if s == 1 {
            return Ok(self.omega0.clone());
        }
        let len = self.grid.len();
        let mut acc = vec![vec![0.0; len]; 3];
        for n in 1..s {
            let (gn, gm) = (self.grad(n), self.grad(s - n));
            let w = n as f64;
            for k in 0..3 {
                let (a1, a2, a3) = (&gn[k], &gn[3 + k], &gn[6 + k]);
                let (b1, b2, b3) = (&gm[k], &gm[3 + k], &gm[6 + k]);
                for p in 0..len {
                    acc[0][p] += w * (a2[p] * b3[p] - a3[p] * b2[p]);
                    acc[1][p] += w * (a3[p] * b1[p] - a1[p] * b3[p]);
                    acc[2][p] += w * (a1[p] * b2[p] - a2[p] * b1[p]);
                }
            }
        }
        Ok(project_samples(self.grid, Rank::Vector, &acc)?.scaled(-1.0))
    }

    /// Right side of the divergence recursion at order `s`.
    pub fn div_rhs(&self, s: usize) -> Result<SpectralField> {
        self.check_history(s)?;
        if s == 1 {
            return Ok(SpectralField::zeros(self.grid, Rank::Scalar).into_zero_mean());
        }
        let len = self.grid.len();
        let mut acc = vec![0.0; len];
        for n in 1..s {
            let (gn, gm) = (self.grad(n), self.grad(s - n));
            for &(i, j) in &UPPER_PAIRS {
                let (x1, y1) = (&gn[3 * j + i], &gm[3 * i + j]);
                let (x2, y2) = (&gn[3 * i + i], &gm[3 * j + j]);
                for p in 0..len {
                    acc[p] += x1[p] * y1[p] - x2[p] * y2[p];
                }
            }
        }
        for p_order in 2..s {
            let pair = &self.pair_sums[p_order - 2];
            let g = self.grad(s - p_order);
            for &(i, j, k, sign) in &LEVI_CIVITA {
                let (x, y) = (&pair[3 * i + j], &g[3 * k + 2]);
                for p in 0..len {
                    acc[p] -= sign * x[p] * y[p];
                }
            }
        }
        project_samples(self.grid, Rank::Scalar, &[acc])
    }

    /// Solves the two Poisson problems for the next order and appends
    /// `ξ^(s) = ∇×a^(s) + ∇b^(s)`.
    pub fn next_coefficient(&mut self) -> Result<()> {
        let s = self.order() + 1;
        let lap_a = self.curl_rhs(s)?.scaled(-1.0 / s as f64);
        let lap_b = self.div_rhs(s)?;
        let potentials = Potentials::new(inverse_laplacian(&lap_a)?, inverse_laplacian(&lap_b)?)?;
        let xi = assemble_from_potentials(&potentials)?;
        let grad = gradient_samples(&xi);
        let norms = OrderNorms {
            order: s,
            xi_sup: sup(&xi),
            lap_a_sup: sup(&lap_a),
            lap_b_sup: sup(&lap_b),
        };
        self.orders.push(Order {
            xi,
            grad,
            potentials,
            lap_a: lap_a.into_zero_mean(),
            lap_b: lap_b.into_zero_mean(),
            norms,
        });
        self.push_pair_sum();
        Ok(())
    }

    /// Caches `P^(S+1)`, which only involves orders up to `S`.
    fn push_pair_sum(&mut self) {
        let p = self.order() + 1;
        let len = self.grid.len();
        let mut acc: GradSamples = std::array::from_fn(|_| vec![0.0; len]);
        for l in 1..p {
            let (gl, gm) = (self.grad(l), self.grad(p - l));
            for i in 0..3 {
                for j in 0..3 {
                    let (x, y) = (&gl[3 * i], &gm[3 * j + 1]);
                    let out = &mut acc[3 * i + j];
                    for q in 0..len {
                        out[q] += x[q] * y[q];
                    }
                }
            }
        }
        self.pair_sums.push(dealias_samples(self.grid, acc));
    }

    /// `(max |s ∇×ξ^(s) - curl_rhs(s)|, max |∇·ξ^(s) - div_rhs(s)|)` in
    /// spectral amplitude.
    pub fn recursion_residual(&self, s: usize) -> Result<(f64, f64)> {
        if s == 0 || s > self.order() {
            return Err(Error::MissingHistory {
                needed: s,
                available: self.order(),
            });
        }
        let xi = self.coefficient(s);
        let c = curl(xi)?.scaled(s as f64).max_difference(&self.curl_rhs(s)?)?;
        let d = divergence(xi)?.max_difference(&self.div_rhs(s)?)?;
        Ok((c, d))
    }

    /// `Σ_s w(s) ξ^(s)` evaluated by Horner's rule in `t`, with `w(s) = 1`
    /// for the displacement and `w(s) = s` with one power fewer for the
    /// velocity.
    fn horner(&self, t: f64, derivative: bool) -> SpectralField {
        let mut acc = SpectralField::zeros(self.grid, Rank::Vector);
        for s in (1..=self.order()).rev() {
            acc = acc.scaled(t);
            let w = if derivative { s as f64 } else { 1.0 };
            acc.add_scaled_in_place(self.coefficient(s), w);
        }
        if derivative {
            acc
        } else {
            acc.scaled(t)
        }
    }

    /// Displacement `ξ(·, t)` and velocity `Σ s ξ^(s) t^(s-1)` on the
    /// Lagrangian grid.
    pub fn evaluate(&self, t: f64) -> SeriesValue {
        SeriesValue {
            displacement: self.horner(t, false),
            velocity: self.horner(t, true),
        }
    }

    /// As [`evaluate`](Self::evaluate), logging a warning when `|t|` exceeds
    /// the supplied radius estimate. Returns whether `t` was inside.
    pub fn evaluate_within(&self, t: f64, radius: f64) -> (SeriesValue, bool) {
        let inside = t.abs() <= radius;
        if !inside {
            log::warn!("evaluating series at |t| = {} beyond radius estimate {}", t.abs(), radius);
        }
        (self.evaluate(t), inside)
    }

    /// Displacement samples at complex time `t`; one array per component.
    pub fn evaluate_complex(&self, t: Complex64) -> [Vec<Complex64>; 3] {
        let mut out: [Vec<Complex64>; 3] =
            std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); self.grid.len()]);
        let mut power = Complex64::new(1.0, 0.0);
        for s in 1..=self.order() {
            power *= t;
            let samples = inverse_transform(self.coefficient(s));
            for (c, comp) in samples.data().iter().enumerate() {
                for (o, &x) in out[c].iter_mut().zip(comp) {
                    *o += power * x;
                }
            }
        }
        out
    }

    /// `Σ_s w_s ∂_i ξ^(s)_j` on the grid for arbitrary weights.
    fn weighted_grad(&self, weights: impl Fn(usize) -> f64) -> GradSamples {
        let len = self.grid.len();
        let mut out: GradSamples = std::array::from_fn(|_| vec![0.0; len]);
        for s in 1..=self.order() {
            let w = weights(s);
            if w == 0.0 {
                continue;
            }
            for (o, g) in out.iter_mut().zip(self.grad(s)) {
                for (x, y) in o.iter_mut().zip(g) {
                    *x += w * y;
                }
            }
        }
        out
    }

    /// Deformation gradient of `x = q + ξ(q, t)` and its determinant.
    pub fn jacobian(&self, t: f64) -> JacobianField {
        let mut matrix = self.weighted_grad(|s| t.powi(s as i32));
        for d in [0, 4, 8] {
            for x in matrix[d].iter_mut() {
                *x += 1.0;
            }
        }
        let det = (0..self.grid.len())
            .map(|p| det3(std::array::from_fn(|e| matrix[e][p])))
            .collect();
        JacobianField { matrix, det }
    }

    /// `max |Σ_k ∇ẋ_k × ∇x_k - ω₀|` over grid points and components, using
    /// the series velocity.
    pub fn cauchy_invariant_residual(&self, t: f64) -> f64 {
        let gx = self.weighted_grad(|s| t.powi(s as i32));
        let gv = self.weighted_grad(|s| s as f64 * t.powi(s as i32 - 1));
        let omega = inverse_transform(&self.omega0);
        let mut worst: f64 = 0.0;
        for p in 0..self.grid.len() {
            let mut sum = [0.0; 3];
            for k in 0..3 {
                let a = [gv[k][p], gv[3 + k][p], gv[6 + k][p]];
                let mut b = [gx[k][p], gx[3 + k][p], gx[6 + k][p]];
                b[k] += 1.0;
                sum[0] += a[1] * b[2] - a[2] * b[1];
                sum[1] += a[2] * b[0] - a[0] * b[2];
                sum[2] += a[0] * b[1] - a[1] * b[0];
            }
            for c in 0..3 {
                worst = worst.max((sum[c] - omega.component(c)[p]).abs());
            }
        }
        worst
    }

    /// Root-test estimate of the radius of convergence from the stored
    /// `max |ξ^(s)|`; see [`radius_from_norms`].
    pub fn estimate_radius(&self) -> Result<f64> {
        if self.order() < 4 {
            return Err(Error::InvalidParameter(format!(
                "radius estimate needs order >= 4, series has {}",
                self.order()
            )));
        }
        let norms: Vec<f64> = self.orders.iter().map(|o| o.norms.xi_sup).collect();
        Ok(radius_from_norms(&norms))
    }

    /// Per-order diagnostics with the radius estimate over orders `1..=s`
    /// (`None` below order 4).
    pub fn diagnostics(&self) -> Vec<(OrderNorms, Option<f64>)> {
        let norms: Vec<f64> = self.orders.iter().map(|o| o.norms.xi_sup).collect();
        self.orders
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let s = i + 1;
                (o.norms, (s >= 4).then(|| radius_from_norms(&norms[..s])))
            })
            .collect()
    }

    /// `ξ^(s)(q)` at arbitrary points, for every order: `out[s - 1][p]`.
    pub fn coefficients_at(&self, points: &[[f64; 3]]) -> Result<Vec<Vec<[f64; 3]>>> {
        let mut out = Vec::with_capacity(self.order());
        for s in 1..=self.order() {
            let ev = BandEvaluator::new(&[self.coefficient(s)])?;
            out.push(
                points
                    .iter()
                    .map(|&q| {
                        let v = ev.eval(q);
                        [v[0], v[1], v[2]]
                    })
                    .collect(),
            );
        }
        Ok(out)
    }

    /// Unwrapped positions `q + ξ(q, t)` of particles starting at `points`.
    pub fn positions_at(&self, points: &[[f64; 3]], t: f64) -> Result<Vec<[f64; 3]>> {
        let disp = self.evaluate(t).displacement;
        let ev = BandEvaluator::new(&[&disp])?;
        Ok(points
            .iter()
            .map(|&q| {
                let d = ev.eval(q);
                [q[0] + d[0], q[1] + d[1], q[2] + d[2]]
            })
            .collect())
    }

    /// Grid samples of `ξ^(s)`.
    pub fn coefficient_samples(&self, s: usize) -> RealField {
        inverse_transform(self.coefficient(s))
    }
}

/// Median of `‖ξ^(s)‖^(-1/s)` over the upper half of orders
/// (`s > S/2`). Vanishing coefficients are skipped; an all-zero tail gives
/// `f64::INFINITY`.
pub fn radius_from_norms(norms: &[f64]) -> f64 {
    let total = norms.len();
    let mut values: Vec<f64> = norms
        .iter()
        .enumerate()
        .skip(total / 2)
        .filter(|(_, &n)| n > 0.0 && n.is_finite())
        .map(|(i, &n)| n.powf(-1.0 / (i + 1) as f64))
        .collect();
    if values.is_empty() {
        return f64::INFINITY;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}
