//! Stochastic convolution `∫_0^t ∫ e^{-(t-s)A} G(s; z) η̃(dz, ds)` for
//! integrands that are constant on the cells of a uniform time grid.

use super::expo::phi1;
use crate::error::{Error, Result};
use crate::prm::{LevyMeasure, PointMeasure};
use crate::spectral::{SpectralField, SpectralOperator};

/// Integrand `G(s; z)` frozen on the cells `[k h, (k+1) h)`.
pub trait FrozenIntegrand {
    fn cell_width(&self) -> f64;
    /// Coefficients of `G` on cell `k` for mark `z`.
    fn jump(&self, cell: usize, z: f64) -> SpectralField;
    /// `∫ G(cell; z) ν(dz)`.
    fn compensator(&self, cell: usize) -> SpectralField;
}

/// `G(s; z) = z w` for a fixed coefficient vector `w`.
pub struct ConstantIntegrand {
    pub value: SpectralField,
    pub mean_jump: f64,
    pub width: f64,
}

impl ConstantIntegrand {
    pub fn new(value: SpectralField, nu: &LevyMeasure, width: f64) -> Result<Self> {
        Ok(Self {
            value,
            mean_jump: nu.mean_jump()?,
            width,
        })
    }
}

impl FrozenIntegrand for ConstantIntegrand {
    fn cell_width(&self) -> f64 {
        self.width
    }
    fn jump(&self, _cell: usize, z: f64) -> SpectralField {
        self.value.scale(z)
    }
    fn compensator(&self, _cell: usize) -> SpectralField {
        self.value.scale(self.mean_jump)
    }
}

/// Evaluates the stochastic convolution at time `t`: atoms contribute
/// `e^{-ρ_i(t-τ)} G_i` exactly, and the compensator of each cell is integrated
/// in closed form against the semigroup.
pub fn stochastic_convolution<I: FrozenIntegrand>(
    op: &SpectralOperator,
    integrand: &I,
    pm: &PointMeasure<f64>,
    t: f64,
) -> Result<SpectralField> {
    if !(t >= 0.0 && t <= pm.horizon) {
        return Err(Error::AtomOutsideWindow { t, horizon: pm.horizon });
    }
    let h = integrand.cell_width();
    let cell_of = |s: f64| ((s / h).ceil() as usize).saturating_sub(1);
    let mut out = op.zero_field();
    for atom in pm.window(0.0, t) {
        let g = integrand.jump(cell_of(atom.t), atom.mark);
        for ((o, gi), r) in out.coeffs_mut().iter_mut().zip(g.coeffs()).zip(op.eigenvalues()) {
            *o += (-r * (t - atom.t)).exp() * gi;
        }
    }
    let cells = (t / h).ceil() as usize;
    for k in 0..cells {
        let a = k as f64 * h;
        let b = ((k + 1) as f64 * h).min(t);
        if b <= a {
            continue;
        }
        let c = integrand.compensator(k);
        for ((o, ci), r) in out.coeffs_mut().iter_mut().zip(c.coeffs()).zip(op.eigenvalues()) {
            *o -= (-r * (t - b)).exp() * phi1(*r, b - a) * ci;
        }
    }
    Ok(out)
}
