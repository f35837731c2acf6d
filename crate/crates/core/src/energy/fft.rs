//! Two-dimensional complex transforms on row-major buffers.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

pub type C64 = Complex<f64>;

/// Smallest length `≥ n` whose prime factors are 2, 3, 5 or 7.
pub fn fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

pub struct Fft2 {
    pub w: usize,
    pub h: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.w, self.h)
    }
}

fn transpose(src: &[C64], dst: &mut [C64], w: usize, h: usize) {
    const B: usize = 32;
    for by in (0..h).step_by(B) {
        for bx in (0..w).step_by(B) {
            for y in by..(by + B).min(h) {
                for x in bx..(bx + B).min(w) {
                    dst[x * h + y] = src[y * w + x];
                }
            }
        }
    }
}

impl Fft2 {
    pub fn new(w: usize, h: usize) -> Self {
        let mut p = FftPlanner::new();
        Fft2 {
            w,
            h,
            row_fwd: p.plan_fft_forward(w),
            col_fwd: p.plan_fft_forward(h),
            row_inv: p.plan_fft_inverse(w),
            col_inv: p.plan_fft_inverse(h),
        }
    }

    pub fn len(&self) -> usize {
        self.w * self.h
    }


    /// Forward transform; the spectrum is left transposed (`h` fastest).
    pub fn forward(&self, data: &mut Vec<C64>) {
        let mut tmp = vec![C64::new(0.0, 0.0); data.len()];
        self.row_fwd.process(data);
        transpose(data, &mut tmp, self.w, self.h);
        self.col_fwd.process(&mut tmp);
        std::mem::swap(data, &mut tmp);
    }

    /// Inverse of [`Fft2::forward`], unnormalised.
    pub fn inverse(&self, data: &mut Vec<C64>) {
        let mut tmp = vec![C64::new(0.0, 0.0); data.len()];
        self.col_inv.process(data);
        transpose(data, &mut tmp, self.h, self.w);
        self.row_inv.process(&mut tmp);
        std::mem::swap(data, &mut tmp);
    }
}
