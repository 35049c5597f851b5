use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use super::field::SpectralField;
use crate::error::{invalid, Error, Result};

/// Where the eigenvalues of the operator come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenvalueLaw {
    /// `ρ_i = (iπ)²`.
    DirichletLaplacian,
    /// User-supplied eigenvalues paired with the sine eigenfunctions.
    Tabulated,
}

/// Serializable summary of a [`SpectralOperator`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    pub dimension: usize,
    pub modes: usize,
    pub law: EigenvalueLaw,
    pub shift: f64,
    pub grid_points: usize,
    pub eigenvalues: Vec<f64>,
}

/// Self-adjoint positive operator on `(0, 1)` diagonal in the sine basis
/// `e_i(ξ) = √2 sin(iπξ)`, discretised on the interior nodes `ξ_j = j/(M+1)`.
///
/// With weight `1/(M+1)` the discrete inner product makes the first `M` sine
/// modes exactly orthonormal, so projection and reconstruction are inverse to
/// each other on the Galerkin span.
#[derive(Clone, Debug)]
pub struct SpectralOperator {
    eigenvalues: Vec<f64>,
    shift: f64,
    law: EigenvalueLaw,
    grid: Vec<f64>,
    weight: f64,
    basis: Vec<f64>,
}

impl SpectralOperator {
    /// Dirichlet Laplacian with `N` modes on the default grid of `4N - 1` nodes.
    pub fn dirichlet_laplacian(modes: usize) -> Result<Self> {
        Self::with_grid(modes, 4 * modes.max(1) - 1)
    }

    pub fn with_grid(modes: usize, grid_points: usize) -> Result<Self> {
        if modes == 0 {
            return Err(invalid("modes", "at least one mode is required"));
        }
        let eigenvalues = (1..=modes).map(|i| (i as f64 * PI).powi(2)).collect();
        Self::build(eigenvalues, EigenvalueLaw::DirichletLaplacian, grid_points)
    }

    /// Tabulated eigenvalues, which must be positive and nondecreasing.
    pub fn from_eigenvalues(eigenvalues: Vec<f64>, grid_points: Option<usize>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(invalid("eigenvalues", "at least one eigenvalue is required"));
        }
        for (i, r) in eigenvalues.iter().enumerate() {
            if !(r.is_finite() && *r > 0.0) {
                return Err(invalid("eigenvalues", format!("rho_{} = {r} must be positive", i + 1)));
            }
            if i > 0 && *r < eigenvalues[i - 1] {
                return Err(invalid("eigenvalues", "eigenvalues must be nondecreasing"));
            }
        }
        let m = grid_points.unwrap_or(4 * eigenvalues.len() - 1);
        Self::build(eigenvalues, EigenvalueLaw::Tabulated, m)
    }

    fn build(eigenvalues: Vec<f64>, law: EigenvalueLaw, grid_points: usize) -> Result<Self> {
        let n = eigenvalues.len();
        if grid_points < n {
            return Err(Error::GridMismatch(format!(
                "{grid_points} grid nodes cannot resolve {n} modes"
            )));
        }
        let h = 1.0 / (grid_points + 1) as f64;
        let grid: Vec<f64> = (1..=grid_points).map(|j| j as f64 * h).collect();
        let mut basis = Vec::with_capacity(n * grid_points);
        for i in 1..=n {
            for j in 1..=grid_points {
                // Reduce the argument exactly so that e_i vanishes at symmetric nodes.
                let k = (i * j) % (2 * (grid_points + 1));
                basis.push(SQRT_2 * (PI * k as f64 * h).sin());
            }
        }
        Ok(Self {
            eigenvalues,
            shift: 0.0,
            law,
            grid,
            weight: h,
            basis,
        })
    }

    /// `A + ν₀ I`.
    pub fn with_shift(mut self, shift: f64) -> Result<Self> {
        if !(shift.is_finite() && shift >= 0.0) {
            return Err(invalid("shift", format!("{shift} must be non-negative")));
        }
        for r in &mut self.eigenvalues {
            *r += shift - self.shift;
        }
        self.shift = shift;
        Ok(self)
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn dimension(&self) -> usize {
        1
    }

    /// Eigenvalues including the shift.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn rho(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn grid_weight(&self) -> f64 {
        self.weight
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    /// `e_i(ξ_j)` for 0-based mode index `i`.
    pub fn basis_row(&self, i: usize) -> &[f64] {
        let m = self.grid.len();
        &self.basis[i * m..(i + 1) * m]
    }

    /// `e_{i+1}(ξ)` at an arbitrary point.
    pub fn eval_at(&self, i: usize, xi: f64) -> f64 {
        SQRT_2 * ((i + 1) as f64 * PI * xi).sin()
    }

    pub fn reconstruct(&self, u: &SpectralField) -> Vec<f64> {
        let m = self.grid.len();
        let mut out = vec![0.0; m];
        for (i, c) in u.coeffs().iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            for (o, e) in out.iter_mut().zip(self.basis_row(i)) {
                *o += c * e;
            }
        }
        out
    }

    /// Discrete `L²` projection of grid values onto the modes.
    pub fn project(&self, values: &[f64]) -> SpectralField {
        debug_assert_eq!(values.len(), self.grid.len());
        let coeffs = (0..self.modes())
            .map(|i| self.weight * self.basis_row(i).iter().zip(values).map(|(e, v)| e * v).sum::<f64>())
            .collect();
        SpectralField::new(coeffs)
    }

    /// Coefficients of `ξ ↦ value` (a constant function) on the Galerkin span.
    pub fn project_constant(&self, value: f64) -> SpectralField {
        self.project(&vec![value; self.grid.len()])
    }

    pub fn zero_field(&self) -> SpectralField {
        SpectralField::zeros(self.modes())
    }

    /// Unit vector `e_i` (0-based).
    pub fn unit(&self, i: usize) -> SpectralField {
        let mut c = vec![0.0; self.modes()];
        c[i] = 1.0;
        SpectralField::new(c)
    }

    pub fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor {
            dimension: 1,
            modes: self.modes(),
            law: self.law.clone(),
            shift: self.shift,
            grid_points: self.grid.len(),
            eigenvalues: self.eigenvalues.clone(),
        }
    }

    pub fn from_descriptor(d: &OperatorDescriptor) -> Result<Self> {
        let base: Vec<f64> = d.eigenvalues.iter().map(|r| r - d.shift).collect();
        let mut op = Self::from_eigenvalues(base, Some(d.grid_points))?;
        op.law = d.law.clone();
        op.with_shift(d.shift)
    }
}
