//! Unnormalized discrete Fourier transforms.
//!
//! `Sign::Negative` computes `X_m = sum_j x_j exp(-2 pi i j m / n)` and
//! `Sign::Positive` the same with `+`. Production transforms go through
//! `rustfft`; [`naive_dft`] is the O(n^2) reference kept for tests.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized DFT.
pub fn dft_in_place(data: &mut [Complex64], sign: Sign) {
    if data.len() <= 1 {
        return;
    }
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match sign {
            Sign::Negative => p.plan_fft_forward(data.len()),
            Sign::Positive => p.plan_fft_inverse(data.len()),
        }
    });
    fft.process(data);
}

/// Direct O(n^2) evaluation of the same sum as [`dft_in_place`].
pub fn naive_dft(data: &[Complex64], sign: Sign) -> Vec<Complex64> {
    let n = data.len();
    let s = match sign {
        Sign::Negative => -1.0,
        Sign::Positive => 1.0,
    };
    let twiddle: Vec<Complex64> = (0..n)
        .map(|t| Complex64::from_polar(1.0, s * 2.0 * PI * t as f64 / n as f64))
        .collect();
    (0..n)
        .map(|m| data.iter().enumerate().map(|(j, x)| x * twiddle[(j * m) % n]).sum())
        .collect()
}
