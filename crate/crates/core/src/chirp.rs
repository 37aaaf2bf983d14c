//! Chirp-z evaluation of a phasor sum on a uniform frequency grid.
//!
//! Computes `y[k] = Σ_n x[n]·exp(j·n·(start + k·step))` for `k < outputs`
//! via Bluestein's identity `n·k = (n² + k² - (k-n)²) / 2`, turning the sum
//! into a linear convolution carried out with FFTs.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

pub(crate) struct ChirpZ<T: Real> {
    inputs: usize,
    outputs: usize,
    len: usize,
    pre: Vec<Complex<T>>,
    post: Vec<Complex<T>>,
    kernel: Vec<Complex<T>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Smallest `2^a·3^b` not below `n`.
fn smooth_len(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p3 = 1usize;
    while p3 < best {
        let mut v = p3;
        while v < n {
            v *= 2;
        }
        best = best.min(v);
        p3 *= 3;
    }
    best
}

fn phasor<T: Real>(phase: f64) -> Complex<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(T::lit(c), T::lit(s))
}

impl<T: Real> ChirpZ<T> {
    pub fn new(inputs: usize, outputs: usize, start: f64, step: f64) -> Self {
        let len = smooth_len(inputs + outputs - 1);
        let half = 0.5 * step;
        let pre = (0..inputs)
            .map(|n| {
                let n = n as f64;
                phasor(n * start + half * n * n)
            })
            .collect();
        let scale = 1.0 / len as f64;
        let post = (0..outputs)
            .map(|k| {
                let k = k as f64;
                phasor::<T>(half * k * k) * T::lit(scale)
            })
            .collect();

        let mut kernel = vec![Complex::new(T::zero(), T::zero()); len];
        for (i, slot) in kernel.iter_mut().enumerate().take(outputs) {
            let i = i as f64;
            *slot = phasor(-half * i * i);
        }
        for i in 1..inputs {
            let f = i as f64;
            kernel[len - i] = phasor(-half * f * f);
        }

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        forward.process(&mut kernel);
        Self {
            inputs,
            outputs,
            len,
            pre,
            post,
            kernel,
            forward,
            inverse,
        }
    }

    pub fn scratch(&self) -> Workspace<T> {
        let fft_len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        Workspace {
            buffer: vec![Complex::new(T::zero(), T::zero()); self.len],
            fft: vec![Complex::new(T::zero(), T::zero()); fft_len],
        }
    }

    /// Evaluates the grid for `input`, writing `outputs` values via `sink`.
    pub fn apply(
        &self,
        input: impl Iterator<Item = Complex<T>>,
        ws: &mut Workspace<T>,
        mut sink: impl FnMut(usize, Complex<T>),
    ) {
        let zero = Complex::new(T::zero(), T::zero());
        let buf = &mut ws.buffer;
        let mut count = 0;
        for ((slot, x), p) in buf.iter_mut().zip(input).zip(&self.pre) {
            *slot = x * p;
            count += 1;
        }
        debug_assert_eq!(count, self.inputs);
        buf[self.inputs..].fill(zero);
        self.forward.process_with_scratch(buf, &mut ws.fft);
        for (b, k) in buf.iter_mut().zip(&self.kernel) {
            *b = *b * k;
        }
        self.inverse.process_with_scratch(buf, &mut ws.fft);
        for (k, (b, p)) in buf.iter().zip(&self.post).enumerate().take(self.outputs) {
            sink(k, b * p);
        }
    }
}

pub(crate) struct Workspace<T> {
    buffer: Vec<Complex<T>>,
    fft: Vec<Complex<T>>,
}
