use serde::{Deserialize, Serialize};

use crate::error::{GacError, Result};
use crate::geometry::Point2;

/// Synthetic test function with closed-form gradient and level-set
/// curvature `div(∇u / |∇u|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AnalyticField {
    /// `exp(-|p - center|² / 2σ²)`.
    Gaussian { sigma: f64, center: Point2 },
    /// Elliptical cone `sqrt(dx²/α² + dy²/β²)`.
    Conic { alpha: f64, beta: f64, center: Point2 },
    /// `a x + b y + c`.
    Linear { a: f64, b: f64, c: f64 },
}

impl AnalyticField {
    pub fn gaussian(sigma: f64, center: Point2) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) || !center.is_finite() {
            return Err(GacError::InvalidParameter(format!("gaussian needs sigma > 0, got {sigma}")));
        }
        Ok(AnalyticField::Gaussian { sigma, center })
    }

    pub fn conic(alpha: f64, beta: f64, center: Point2) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) || !center.is_finite() {
            return Err(GacError::InvalidParameter(format!("conic needs alpha, beta > 0, got {alpha}, {beta}")));
        }
        Ok(AnalyticField::Conic { alpha, beta, center })
    }

    pub fn linear(a: f64, b: f64, c: f64) -> Self {
        AnalyticField::Linear { a, b, c }
    }

    pub fn value(&self, p: Point2) -> f64 {
        match *self {
            AnalyticField::Gaussian { sigma, center } => (-p.dist_sq(center) / (2.0 * sigma * sigma)).exp(),
            AnalyticField::Conic { alpha, beta, center } => {
                let (x, y) = (p.x - center.x, p.y - center.y);
                (x * x / (alpha * alpha) + y * y / (beta * beta)).sqrt()
            }
            AnalyticField::Linear { a, b, c } => a * p.x + b * p.y + c,
        }
    }

    /// Exact gradient; the cone's apex reports zero.
    pub fn gradient(&self, p: Point2) -> [f64; 2] {
        match *self {
            AnalyticField::Gaussian { sigma, center } => {
                let k = -self.value(p) / (sigma * sigma);
                [k * (p.x - center.x), k * (p.y - center.y)]
            }
            AnalyticField::Conic { alpha, beta, center } => {
                let r = self.value(p);
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                [(p.x - center.x) / (alpha * alpha * r), (p.y - center.y) / (beta * beta * r)]
            }
            AnalyticField::Linear { a, b, .. } => [a, b],
        }
    }

    /// Curvature of the level set through `p`; zero where the gradient
    /// vanishes.
    pub fn level_set_curvature(&self, p: Point2) -> f64 {
        match *self {
            AnalyticField::Gaussian { center, .. } => {
                let r = p.dist(center);
                if r == 0.0 {
                    0.0
                } else {
                    -1.0 / r
                }
            }
            AnalyticField::Conic { alpha, beta, center } => {
                let (x, y) = (p.x - center.x, p.y - center.y);
                if x == 0.0 && y == 0.0 {
                    return 0.0;
                }
                let (a2, b2) = (alpha * alpha, beta * beta);
                let (a4, b4) = (a2 * a2, b2 * b2);
                let q = x * x / a4 + y * y / b4;
                (x * x / (a4 * b2) + y * y / (a2 * b4)) / q.powf(1.5)
            }
            AnalyticField::Linear { .. } => 0.0,
        }
    }
}
