use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Cached 1D plans for an `n³` complex transform, applied axis by axis.
pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

pub(crate) fn plan(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    /// Forward transform scaled by `1/n³`, so the zero mode is the mean.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &*self.forward);
        let scale = 1.0 / (self.n * self.n * self.n) as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    /// Unnormalised inverse transform (synthesis).
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &*self.inverse);
    }

    fn run(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

        // Axis 3 is contiguous.
        fft.process_with_scratch(data, &mut scratch);

        // Axes 2 and 1: gather lines, transform in one batch, scatter back.
        let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in [1usize, 0] {
            let (stride, outer) = if axis == 1 { (n, n * n) } else { (n * n, n) };
            let mut line = 0;
            for base in 0..n * n {
                let start = if axis == 1 {
                    (base / n) * outer + base % n
                } else {
                    base
                };
                for j in 0..n {
                    lines[line * n + j] = data[start + j * stride];
                }
                line += 1;
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            let mut line = 0;
            for base in 0..n * n {
                let start = if axis == 1 {
                    (base / n) * outer + base % n
                } else {
                    base
                };
                for j in 0..n {
                    data[start + j * stride] = lines[line * n + j];
                }
                line += 1;
            }
        }
    }
}
