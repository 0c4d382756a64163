//! Central finite-difference stencils on uniform grids.

use crate::error::{Error, Result};

/// Accuracy order of a central stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            2 => Ok(StencilOrder::Second),
            4 => Ok(StencilOrder::Fourth),
            other => Err(Error::InvalidParameter(format!(
                "stencil order must be 2 or 4, got {other}"
            ))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }

    pub fn half_width(self) -> usize {
        match self {
            StencilOrder::Second => 1,
            StencilOrder::Fourth => 2,
        }
    }

    /// Integer second-derivative weights for offsets `-w..=w` and their
    /// common denominator (before the extra `h^2`).
    pub fn second_weights(self) -> (&'static [f64], f64) {
        match self {
            StencilOrder::Second => (&[1.0, -2.0, 1.0], 1.0),
            StencilOrder::Fourth => (&[-1.0, 16.0, -30.0, 16.0, -1.0], 12.0),
        }
    }

    /// Integer first-derivative weights and their common denominator.
    pub fn first_weights(self) -> (&'static [f64], f64) {
        match self {
            StencilOrder::Second => (&[-1.0, 0.0, 1.0], 2.0),
            StencilOrder::Fourth => (&[1.0, -8.0, 0.0, 8.0, -1.0], 12.0),
        }
    }
}

/// Which derivative to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    First,
    Second,
}

/// Central difference of `f` sampled with `spacing`.
///
/// With `periodic` the stencil wraps around; otherwise the outermost
/// `half_width` points on each side are returned as NaN.
pub fn central_diff(
    f: &[f64],
    derivative: Derivative,
    order: StencilOrder,
    spacing: f64,
    periodic: bool,
) -> Result<Vec<f64>> {
    let w = order.half_width();
    let n = f.len();
    if n < 2 * w + 1 {
        return Err(Error::InvalidParameter(format!(
            "central_diff needs at least {} samples, got {n}",
            2 * w + 1
        )));
    }
    let ((weights, denom), h) = match derivative {
        Derivative::First => (order.first_weights(), spacing),
        Derivative::Second => (order.second_weights(), spacing * spacing),
    };
    let scale = 1.0 / (denom * h);
    let out = (0..n)
        .map(|j| {
            if !periodic && (j < w || j + w >= n) {
                return f64::NAN;
            }
            let mut acc = 0.0;
            for (o, c) in weights.iter().enumerate() {
                let idx = (j + n + o - w) % n;
                acc += c * f[idx];
            }
            acc * scale
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> (Vec<f64>, f64) {
        let h = 2.0 * PI / n as f64;
        ((0..n).map(|j| j as f64 * h).collect(), h)
    }

    fn max_err(n: usize, order: StencilOrder) -> f64 {
        let (x, h) = grid(n);
        let f: Vec<f64> = x.iter().map(|t| t.cos().exp()).collect();
        let d = central_diff(&f, Derivative::First, order, h, true).unwrap();
        x.iter()
            .zip(&d)
            .map(|(t, v)| (v - (-t.sin() * t.cos().exp())).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn sine_to_cosine() {
        let (x, h) = grid(256);
        let f: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        for order in [StencilOrder::Second, StencilOrder::Fourth] {
            let d = central_diff(&f, Derivative::First, order, h, true).unwrap();
            let err = x.iter().zip(&d).map(|(t, v)| (v - t.cos()).abs()).fold(0.0, f64::max);
            let bound = match order {
                StencilOrder::Second => h * h,
                StencilOrder::Fourth => h.powi(4),
            };
            assert!(err < bound, "{order:?}: {err}");
        }
    }

    #[test]
    fn constant_has_zero_derivative() {
        let f = vec![3.25; 32];
        for der in [Derivative::First, Derivative::Second] {
            let d = central_diff(&f, der, StencilOrder::Fourth, 0.1, true).unwrap();
            assert!(d.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn measured_order_matches_nominal() {
        for (order, nominal) in [(StencilOrder::Second, 2.0), (StencilOrder::Fourth, 4.0)] {
            let e1 = max_err(64, order);
            let e2 = max_err(128, order);
            let measured = (e1 / e2).log2();
            assert!((measured - nominal).abs() / nominal < 0.1, "{order:?}: {measured}");
        }
    }

    #[test]
    fn non_periodic_edges_are_nan() {
        let f: Vec<f64> = (0..10).map(|j| j as f64).collect();
        let d = central_diff(&f, Derivative::First, StencilOrder::Fourth, 1.0, false).unwrap();
        assert!(d[0].is_nan() && d[1].is_nan() && d[9].is_nan());
        assert!((d[5] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn too_few_samples() {
        assert!(central_diff(&[1.0; 4], Derivative::Second, StencilOrder::Fourth, 1.0, true).is_err());
    }
}
