//! Bindings used by `www/index.html`. Arrays cross the boundary flattened
//! into `Float64Array`s; the layout is given on each function.

use cride::bounds::{q_critical, zeta_curve};
use cride::fields::GridSpec;
use cride::oracle::wrap;
use cride::presets::Preset;
use cride::stepper::FlowState;
use cride::taylor::TaylorSeries;
use wasm_bindgen::prelude::*;

fn js(e: cride::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Critical `Q` for the bound constant `theta`.
#[wasm_bindgen(js_name = qCritical)]
pub fn q_critical_js(theta: f64) -> f64 {
    q_critical(theta)
}

/// `[Q, zeta2, zeta3]` triples on `[0, Q_c)`.
#[wasm_bindgen(js_name = zetaCurve)]
pub fn zeta_curve_js(theta: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let curve = zeta_curve(theta, samples).map_err(js)?;
    Ok(curve.into_iter().flat_map(|(q, a, b)| [q, a, b]).collect())
}

/// Taylor series of one preset flow.
#[wasm_bindgen]
pub struct Flow {
    series: TaylorSeries,
}

#[wasm_bindgen]
impl Flow {
    #[wasm_bindgen(constructor)]
    pub fn new(preset: &str, n: usize, order: usize, seed: u64) -> Result<Flow, JsError> {
        let mut preset: Preset = preset.parse().map_err(js)?;
        if let Preset::Random { seed: s } = &mut preset {
            *s = seed;
        }
        let grid = GridSpec::with_two_thirds(n).map_err(js)?;
        let v0 = preset.velocity(grid);
        FlowState::new(v0.clone(), 0.0).map_err(js)?;
        let series = TaylorSeries::build(&v0, order).map_err(js)?;
        Ok(Flow { series })
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// `[xi_sup, lap_a_sup, lap_b_sup, radius]` per order; the radius is
    /// NaN where the root test has too few terms.
    pub fn norms(&self) -> Vec<f64> {
        self.series
            .diagnostics()
            .into_iter()
            .flat_map(|(o, r)| [o.xi_sup, o.lap_a_sup, o.lap_b_sup, r.unwrap_or(f64::NAN)])
            .collect()
    }

    /// Estimated radius of convergence in time (infinite for polynomial maps).
    pub fn radius(&self) -> f64 {
        if self.series.order() < 4 {
            return f64::INFINITY;
        }
        self.series.estimate_radius().unwrap_or(f64::NAN)
    }

    /// Positions `[x1, x2, x3]` at time `t` of a `per_axis × per_axis`
    /// lattice of particles in the plane `q3 = z`, wrapped into the box.
    pub fn positions(&self, t: f64, per_axis: usize, z: f64) -> Result<Vec<f64>, JsError> {
        let h = std::f64::consts::TAU / per_axis as f64;
        let mut seeds = Vec::with_capacity(per_axis * per_axis);
        for i in 0..per_axis {
            for j in 0..per_axis {
                seeds.push([(i as f64 + 0.5) * h, (j as f64 + 0.5) * h, z]);
            }
        }
        let x = self.series.positions_at(&seeds, t).map_err(js)?;
        Ok(x.into_iter().flat_map(wrap).collect())
    }
}
