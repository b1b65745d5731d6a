use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

const LINES_PER_TASK: usize = 64;

/// Reusable forward/inverse plans for `n`-point transforms along every axis.
#[derive(Clone)]
pub struct FftPlan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        FftPlan { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn pick(&self, dir: Direction) -> &Arc<dyn Fft<f64>> {
        match dir {
            Direction::Forward => &self.fwd,
            Direction::Inverse => &self.inv,
        }
    }

    /// Unnormalized in-place DFT of a row-major `n^dim` array, parallel over lines.
    pub fn run(&self, data: &mut [Complex64], dim: usize, dir: Direction) {
        let n = self.n;
        assert_eq!(data.len(), n.pow(dim as u32));
        let fft = self.pick(dir);
        let batch = n * LINES_PER_TASK;
        crate::exec::for_each_chunk_mut(data, batch, |_, c| fft.process(c));
        if dim == 1 {
            return;
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in 0..dim - 1 {
            let stride = n.pow((dim - 1 - axis) as u32);
            gather(data, &mut scratch, n, stride);
            crate::exec::for_each_chunk_mut(&mut scratch, batch, |_, c| fft.process(c));
            scatter(&scratch, data, n, stride);
        }
    }

    /// Same transform on the calling thread only; `scratch` is resized as needed.
    pub fn run_serial(&self, data: &mut [Complex64], dim: usize, dir: Direction, scratch: &mut Vec<Complex64>) {
        let n = self.n;
        assert_eq!(data.len(), n.pow(dim as u32));
        let fft = self.pick(dir);
        fft.process(data);
        if dim == 1 {
            return;
        }
        scratch.resize(data.len(), Complex64::new(0.0, 0.0));
        for axis in 0..dim - 1 {
            let stride = n.pow((dim - 1 - axis) as u32);
            gather(data, scratch, n, stride);
            fft.process(scratch);
            scatter(scratch, data, n, stride);
        }
    }
}

// line l = (outer, inner) starts at outer*stride*n + inner and steps by stride
fn gather(data: &[Complex64], lines: &mut [Complex64], n: usize, stride: usize) {
    let block = stride * n;
    for (l, dst) in lines.chunks_exact_mut(n).enumerate() {
        let base = (l / stride) * block + l % stride;
        for (j, z) in dst.iter_mut().enumerate() {
            *z = data[base + j * stride];
        }
    }
}

fn scatter(lines: &[Complex64], data: &mut [Complex64], n: usize, stride: usize) {
    let block = stride * n;
    for (l, src) in lines.chunks_exact(n).enumerate() {
        let base = (l / stride) * block + l % stride;
        for (j, z) in src.iter().enumerate() {
            data[base + j * stride] = *z;
        }
    }
}

/// Unnormalized in-place DFT over every axis of a row-major `n^dim` array.
pub fn fft_nd(data: &mut [Complex64], dim: usize, n: usize, dir: Direction) {
    FftPlan::new(n).run(data, dim, dir);
}
