use rand::Rng;

/// One-dimensional piecewise quadratic `F(x) = ½·a(x)·x² + b·x`, where
/// `a(x) = a⁻` for `x < 0` and `a⁺` for `x ≥ 0`.
///
/// Stochastic samples add Rademacher noise `σ·τ` to the gradient, i.e. the
/// sample objective is `F(x) + σ·τ·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticClient {
    pub curv_neg: f64,
    pub curv_pos: f64,
    pub linear: f64,
    pub noise_sigma: f64,
}

impl QuadraticClient {
    /// Same curvature on both sides of zero, no noise.
    pub fn new(curv: f64, linear: f64) -> Self {
        Self::piecewise(curv, curv, linear)
    }

    pub fn piecewise(curv_neg: f64, curv_pos: f64, linear: f64) -> Self {
        debug_assert!(
            curv_neg >= 0.0 && curv_pos >= 0.0,
            "quadratic clients must be convex"
        );
        Self {
            curv_neg,
            curv_pos,
            linear,
            noise_sigma: 0.0,
        }
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    /// Curvature branch in effect at `x`; zero belongs to the right branch.
    #[inline]
    pub fn curvature_at(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.curv_neg
        } else {
            self.curv_pos
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        0.5 * self.curvature_at(x) * x * x + self.linear * x
    }

    #[inline]
    pub fn gradient(&self, x: f64) -> f64 {
        self.curvature_at(x) * x + self.linear
    }

    /// Draws one sign `τ` from `rng` when the client is noisy.
    #[inline]
    pub fn stochastic_gradient<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        let g = self.gradient(x);
        if self.noise_sigma == 0.0 {
            g
        } else if rng.random::<bool>() {
            g + self.noise_sigma
        } else {
            g - self.noise_sigma
        }
    }

    pub fn max_curvature(&self) -> f64 {
        self.curv_neg.max(self.curv_pos)
    }

    pub fn min_curvature(&self) -> f64 {
        self.curv_neg.min(self.curv_pos)
    }
}
