use super::error::{PhaseSpaceError, Result};
use super::quadrature::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelShape {
    /// `c0` for `r < L`.
    Constant,
    /// `c0 (1 - r / L)`.
    Triangular,
    /// `c0 exp(-r^2 / 2 sigma^2)`, cut at `L`.
    TruncatedGaussian { sigma: f64 },
}

/// Pair correlation `p(q1, q2) = p(q1) p(q2) (1 + c(|q1 - q2|))` with a hard
/// cutoff: `c(r) = 0` for `r >= L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrelationModel {
    pub length: f64,
    pub strength: f64,
    pub shape: KernelShape,
}

impl PairCorrelationModel {
    pub fn constant(length: f64, c0: f64) -> Self {
        Self { length, strength: c0, shape: KernelShape::Constant }
    }

    pub fn triangular(length: f64, c0: f64) -> Self {
        Self { length, strength: c0, shape: KernelShape::Triangular }
    }

    pub fn truncated_gaussian(length: f64, c0: f64, sigma: f64) -> Self {
        Self { length, strength: c0, shape: KernelShape::TruncatedGaussian { sigma } }
    }

    #[inline]
    pub fn c(&self, r: f64) -> f64 {
        if r >= self.length {
            return 0.0;
        }
        match self.shape {
            KernelShape::Constant => self.strength,
            KernelShape::Triangular => self.strength * (1.0 - r / self.length),
            KernelShape::TruncatedGaussian { sigma } => self.strength * (-0.5 * r * r / (sigma * sigma)).exp(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.strength == 0.0
    }

    /// Checks the cutoff, positivity of `1 + c` and that the correlation ball
    /// fits in the periodic box.
    pub fn validate(&self, box_len: f64) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(PhaseSpaceError::InvalidKernel(format!("correlation length {} must be positive", self.length)));
        }
        if !self.strength.is_finite() {
            return Err(PhaseSpaceError::InvalidKernel("strength must be finite".into()));
        }
        if let KernelShape::TruncatedGaussian { sigma } = self.shape {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(PhaseSpaceError::InvalidKernel(format!("sigma {sigma} must be positive")));
            }
        }
        // every built-in kernel takes values between 0 and c0
        if 1.0 + self.strength < 0.0 {
            return Err(PhaseSpaceError::NegativeDensity(1.0 + self.strength));
        }
        if 2.0 * self.length > box_len {
            return Err(PhaseSpaceError::InvalidKernel(format!(
                "correlation length {} must be at most half the box {}",
                self.length, box_len
            )));
        }
        Ok(())
    }

    /// `int_{|r| < L} c(|r|) d^dim r`.
    pub fn ball_integral(&self, dim: usize) -> f64 {
        let l = self.length;
        let surface = match dim {
            1 => 2.0,
            2 => 2.0 * std::f64::consts::PI,
            _ => 4.0 * std::f64::consts::PI,
        };
        let d = dim as f64;
        match self.shape {
            KernelShape::Constant => self.strength * surface * l.powf(d) / d,
            KernelShape::Triangular => self.strength * surface * l.powf(d) / (d * (d + 1.0)),
            KernelShape::TruncatedGaussian { .. } => {
                let (x, w) = gauss_legendre(64);
                let s: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&t, &wt)| {
                        let r = 0.5 * l * (t + 1.0);
                        wt * 0.5 * l * self.c(r) * r.powi(dim as i32 - 1)
                    })
                    .sum();
                surface * s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_cutoff() {
        for k in [
            PairCorrelationModel::constant(1.0, 0.5),
            PairCorrelationModel::triangular(1.0, 0.5),
            PairCorrelationModel::truncated_gaussian(1.0, 0.5, 0.3),
        ] {
            assert_eq!(k.c(1.0), 0.0);
            assert_eq!(k.c(7.0), 0.0);
            assert!(k.c(0.999) > 0.0);
        }
    }

    #[test]
    fn ball_integrals() {
        let k = PairCorrelationModel::constant(0.5, 2.0);
        assert!((k.ball_integral(3) - 2.0 * 4.0 / 3.0 * std::f64::consts::PI * 0.125).abs() < 1e-14);
        let t = PairCorrelationModel::triangular(2.0, 1.0);
        assert!((t.ball_integral(1) - 2.0).abs() < 1e-14);
        let g = PairCorrelationModel::truncated_gaussian(1.0, 1.0, 1e3);
        assert!((g.ball_integral(2) - std::f64::consts::PI).abs() < 1e-5);
    }

    #[test]
    fn validation() {
        assert!(matches!(PairCorrelationModel::constant(1.0, -1.5).validate(10.0), Err(PhaseSpaceError::NegativeDensity(_))));
        assert!(PairCorrelationModel::constant(6.0, 0.5).validate(10.0).is_err());
        assert!(PairCorrelationModel::constant(1.0, -1.0).validate(10.0).is_ok());
    }
}
