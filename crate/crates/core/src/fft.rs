//! Three-dimensional complex FFT built from one-dimensional plans.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.map(|d| planner.plan_fft_forward(d));
        let inverse = dims.map(|d| planner.plan_fft_inverse(d));
        Fft3 { dims, forward, inverse }
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }


    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the `1/N` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [nx, ny, nz] = self.dims;
        assert_eq!(data.len(), nx * ny * nz);
        plans[0].process(data);
        let mut line = vec![Complex64::new(0.0, 0.0); ny.max(nz)];
        for k in 0..nz {
            for i in 0..nx {
                for j in 0..ny {
                    line[j] = data[i + nx * (j + ny * k)];
                }
                plans[1].process(&mut line[..ny]);
                for j in 0..ny {
                    data[i + nx * (j + ny * k)] = line[j];
                }
            }
        }
        for j in 0..ny {
            for i in 0..nx {
                for k in 0..nz {
                    line[k] = data[i + nx * (j + ny * k)];
                }
                plans[2].process(&mut line[..nz]);
                for k in 0..nz {
                    data[i + nx * (j + ny * k)] = line[k];
                }
            }
        }
    }
}
