//! Fiber operators h(k) = −d²/dx² + (bx − k)² on the half-line and their
//! finite-difference band values and modes.

use crate::error::{Error, Result};
use crate::numerics::{
    hermite_phi, inverse_iteration, tridiag_eig_index, tridiag_eig_index_in, CompensatedSum,
    TriDiag,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Dirichlet => write!(f, "dirichlet"),
            BoundaryCondition::Neumann => write!(f, "neumann"),
        }
    }
}

/// Field strength, boundary condition and discretization of the fiber family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberSpec {
    pub b: f64,
    pub bc: BoundaryCondition,
    /// Interior grid points of the coarsest grid.
    pub n_x: usize,
    /// Domain padding in units of b^{-1/2}.
    pub pad: f64,
    /// Number of grids combined by Richardson extrapolation.
    pub richardson: usize,
}

impl FiberSpec {
    pub const DEFAULT_N_X: usize = 400;
    pub const DEFAULT_PAD: f64 = 12.0;
    pub const DEFAULT_RICHARDSON: usize = 3;

    pub fn new(b: f64, bc: BoundaryCondition) -> Self {
        Self {
            b,
            bc,
            n_x: Self::DEFAULT_N_X,
            pad: Self::DEFAULT_PAD,
            richardson: Self::DEFAULT_RICHARDSON,
        }
    }

    pub fn dirichlet(b: f64) -> Self {
        Self::new(b, BoundaryCondition::Dirichlet)
    }

    pub fn neumann(b: f64) -> Self {
        Self::new(b, BoundaryCondition::Neumann)
    }

    pub fn with_n_x(mut self, n_x: usize) -> Self {
        self.n_x = n_x;
        self
    }

    pub fn with_richardson(mut self, levels: usize) -> Self {
        self.richardson = levels;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "b must be positive, got {}",
                self.b
            )));
        }
        if self.n_x < 200 {
            return Err(Error::InvalidInput(format!(
                "n_x must be >= 200, got {}",
                self.n_x
            )));
        }
        if !(self.pad >= 8.0 && self.pad.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pad must be >= 8, got {}",
                self.pad
            )));
        }
        if !(1..=3).contains(&self.richardson) {
            return Err(Error::InvalidInput(format!(
                "richardson levels must be 1, 2 or 3, got {}",
                self.richardson
            )));
        }
        Ok(())
    }

    /// Landau level ℰ_j = b(2j − 1).
    pub fn threshold(&self, j: usize) -> f64 {
        landau_level(self.b, j)
    }

    /// Truncated domain length for momentum `k`.
    pub fn length(&self, k: f64) -> f64 {
        k.max(0.0) / self.b + self.pad / self.b.sqrt()
    }

    /// Grid at refinement `level` (0 = coarsest) for momentum `k`.
    pub fn grid(&self, k: f64, level: usize) -> FiberGrid {
        self.grid_for_length(self.length(k), level)
    }

    pub fn grid_for_length(&self, length: f64, level: usize) -> FiberGrid {
        let scale = 1usize << level;
        let n = match self.bc {
            BoundaryCondition::Dirichlet => (self.n_x + 1) * scale - 1,
            BoundaryCondition::Neumann => self.n_x * scale,
        };
        FiberGrid::new(self.bc, length, n)
    }

    pub fn finest_level(&self) -> usize {
        self.richardson - 1
    }
}

pub fn landau_level(b: f64, j: usize) -> f64 {
    b * (2.0 * j as f64 - 1.0)
}

/// Uniform half-line grid: vertex grid for Dirichlet, cell-centred for Neumann.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberGrid {
    pub bc: BoundaryCondition,
    pub length: f64,
    pub n: usize,
}

impl FiberGrid {
    pub fn new(bc: BoundaryCondition, length: f64, n: usize) -> Self {
        Self { bc, length, n }
    }

    pub fn spacing(&self) -> f64 {
        match self.bc {
            BoundaryCondition::Dirichlet => self.length / (self.n as f64 + 1.0),
            BoundaryCondition::Neumann => self.length / self.n as f64,
        }
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.bc {
            BoundaryCondition::Dirichlet => (i as f64 + 1.0) * h,
            BoundaryCondition::Neumann => (i as f64 + 0.5) * h,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Tridiagonal FD matrix of h(k) on this grid.
    pub fn matrix(&self, b: f64, k: f64) -> TriDiag {
        let h = self.spacing();
        let inv = 1.0 / (h * h);
        let mut diag: Vec<f64> = (0..self.n)
            .map(|i| {
                let q = b * self.point(i) - k;
                2.0 * inv + q * q
            })
            .collect();
        if self.bc == BoundaryCondition::Neumann {
            diag[0] -= inv;
        }
        TriDiag::new(diag, vec![-inv; self.n - 1]).expect("finite fiber matrix")
    }
}

/// Energy and its Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandValue {
    pub energy: f64,
    pub disc_error: f64,
}

/// Energy and Hellmann–Feynman derivative, both extrapolated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub energy: f64,
    pub derivative: f64,
    pub disc_error: f64,
    pub derivative_error: f64,
}

/// Normalized eigenfunction ψ_j(·; k) on a fiber grid.
#[derive(Debug, Clone, Serialize)]
pub struct Mode {
    pub j: usize,
    pub k: f64,
    pub energy: f64,
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub disc_error: f64,
    /// Eigenvalue of the discrete matrix the values belong to.
    pub grid_energy: f64,
    pub spacing: f64,
}

impl Mode {
    /// Discrete L² norm with the grid's quadrature weights.
    pub fn norm(&self) -> f64 {
        (self.spacing * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

/// FD matrix on the coarsest grid and its points.
pub fn assemble_fiber_matrix(spec: &FiberSpec, k: f64) -> Result<(TriDiag, Vec<f64>)> {
    spec.validate()?;
    let grid = spec.grid(k, 0);
    Ok((grid.matrix(spec.b, k), grid.points()))
}

fn check_index(j: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::InvalidInput("band index starts at 1".into()));
    }
    Ok(())
}

/// Richardson table in Δ² over successively halved grids; returns the
/// extrapolated value and the magnitude of the last correction.
pub fn richardson(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mut table = values.to_vec();
    let mut last_correction = 0.0;
    for order in 1..n {
        let factor = 4f64.powi(order as i32) - 1.0;
        for i in (order..n).rev() {
            let correction = (table[i] - table[i - 1]) / factor;
            table[i] += correction;
            if i == n - 1 {
                last_correction = correction.abs();
            }
        }
    }
    (table[n - 1], last_correction)
}

fn grid_eigenvalue(t: &TriDiag, j: usize, guess: Option<f64>) -> Result<f64> {
    match guess {
        Some(g) => {
            let w = 1e-3 * g.abs().max(1.0);
            tridiag_eig_index_in(t, j - 1, g - w, g + w)
        }
        None => tridiag_eig_index(t, j - 1),
    }
}

fn level_energies(spec: &FiberSpec, j: usize, k: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(spec.richardson);
    let mut guess = None;
    for level in 0..spec.richardson {
        let (e, _) = grid_eigenpair(spec.b, &spec.grid(k, level), j, k, guess)?;
        guess = Some(e);
        out.push(e);
    }
    Ok(out)
}

/// Single-grid error estimate against a grid with half the intervals.
fn coarse_estimate(spec: &FiberSpec, j: usize, k: f64, fine: f64) -> Result<f64> {
    let coarse_n = match spec.bc {
        BoundaryCondition::Dirichlet => spec.n_x.div_ceil(2) - 1,
        BoundaryCondition::Neumann => spec.n_x / 2,
    };
    let grid = FiberGrid::new(spec.bc, spec.length(k), coarse_n);
    let e = grid_eigenvalue(&grid.matrix(spec.b, k), j, Some(fine))?;
    Ok((fine - e).abs() / 3.0)
}

/// E_j(k) with its discretization error estimate.
pub fn band_value(spec: &FiberSpec, j: usize, k: f64) -> Result<BandValue> {
    spec.validate()?;
    check_index(j)?;
    let levels = level_energies(spec, j, k).map_err(|e| e.at_k(k))?;
    if levels.len() == 1 {
        let disc_error = coarse_estimate(spec, j, k, levels[0]).map_err(|e| e.at_k(k))?;
        return Ok(BandValue {
            energy: levels[0],
            disc_error,
        });
    }
    let (energy, disc_error) = richardson(&levels);
    Ok(BandValue { energy, disc_error })
}

/// Discrete eigenpair on a given grid: grid eigenvalue, Euclidean unit
/// eigenvector with the sign convention applied.
///
/// The bisection value carries an absolute error of order ε‖T‖ ~ ε/Δ², far
/// above ε·E on fine grids; it is replaced by the Rayleigh quotient of the
/// inverse-iteration vector, which is accurate to second order in the
/// vector error.
pub fn grid_eigenpair(
    b: f64,
    grid: &FiberGrid,
    j: usize,
    k: f64,
    guess: Option<f64>,
) -> Result<(f64, Vec<f64>)> {
    let t = grid.matrix(b, k);
    let e = grid_eigenvalue(&t, j, guess)?;
    let mut v = inverse_iteration(&t, e)?;
    orient(&mut v, grid.bc);
    Ok((rayleigh_energy(b, grid, k, &v), v))
}

/// vᵀTv/vᵀv written as a sum of squares: differences over Δ² plus the
/// potential, with the ghost values of the boundary condition.
fn rayleigh_energy(b: f64, grid: &FiberGrid, k: f64, v: &[f64]) -> f64 {
    let h = grid.spacing();
    let n = v.len();
    let mut kinetic = CompensatedSum::new();
    for w in v.windows(2) {
        kinetic.add((w[1] - w[0]).powi(2));
    }
    kinetic.add(v[n - 1] * v[n - 1]);
    if grid.bc == BoundaryCondition::Dirichlet {
        kinetic.add(v[0] * v[0]);
    }
    let mut potential = CompensatedSum::new();
    let mut norm = CompensatedSum::new();
    for (i, vi) in v.iter().enumerate() {
        let q = b * grid.point(i) - k;
        potential.add(q * q * vi * vi);
        norm.add(vi * vi);
    }
    (kinetic.value() / (h * h) + potential.value()) / norm.value()
}

/// Sign convention: the first lobe away from x = 0 is positive (Dirichlet);
/// the boundary value is positive (Neumann, falling back to the lobe rule if
/// it underflows).
pub fn orient(values: &mut [f64], bc: BoundaryCondition) {
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return;
    }
    let reference = match bc {
        BoundaryCondition::Neumann if values[0] != 0.0 => values[0],
        _ => values
            .iter()
            .copied()
            .find(|v| v.abs() >= 0.1 * peak)
            .unwrap_or(0.0),
    };
    if reference < 0.0 {
        for v in values.iter_mut() {
            *v = -*v;
        }
    }
}

fn hellmann_feynman(b: f64, grid: &FiberGrid, k: f64, unit: &[f64]) -> f64 {
    unit.iter()
        .enumerate()
        .map(|(i, v)| -2.0 * (b * grid.point(i) - k) * v * v)
        .sum()
}

/// Energy and derivative, both Richardson-extrapolated over the grid levels.
pub fn band_point(spec: &FiberSpec, j: usize, k: f64) -> Result<BandPoint> {
    spec.validate()?;
    check_index(j)?;
    let mut energies = Vec::with_capacity(spec.richardson);
    let mut derivatives = Vec::with_capacity(spec.richardson);
    let mut guess = None;
    for level in 0..spec.richardson {
        let grid = spec.grid(k, level);
        let (e, v) = grid_eigenpair(spec.b, &grid, j, k, guess).map_err(|e| e.at_k(k))?;
        guess = Some(e);
        energies.push(e);
        derivatives.push(hellmann_feynman(spec.b, &grid, k, &v));
    }
    if spec.richardson == 1 {
        let disc_error = coarse_estimate(spec, j, k, energies[0]).map_err(|e| e.at_k(k))?;
        return Ok(BandPoint {
            energy: energies[0],
            derivative: derivatives[0],
            disc_error,
            derivative_error: 0.0,
        });
    }
    let (energy, disc_error) = richardson(&energies);
    let (derivative, derivative_error) = richardson(&derivatives);
    Ok(BandPoint {
        energy,
        derivative,
        disc_error,
        derivative_error,
    })
}

/// E_j'(k) by the Hellmann–Feynman formula −2∫(bx − k)ψ² dx.
pub fn band_derivative(spec: &FiberSpec, j: usize, k: f64) -> Result<f64> {
    Ok(band_point(spec, j, k)?.derivative)
}

/// Normalized mode on the finest grid.
pub fn fiber_mode(spec: &FiberSpec, j: usize, k: f64) -> Result<Mode> {
    spec.validate()?;
    check_index(j)?;
    let value = band_value(spec, j, k)?;
    let grid = spec.grid(k, spec.finest_level());
    mode_on_grid(spec.b, &grid, j, k, value)
}

/// Mode on an arbitrary grid, carrying the supplied band value.
pub fn mode_on_grid(b: f64, grid: &FiberGrid, j: usize, k: f64, value: BandValue) -> Result<Mode> {
    let (grid_energy, v) =
        grid_eigenpair(b, grid, j, k, Some(value.energy)).map_err(|e| e.at_k(k))?;
    let h = grid.spacing();
    let scale = 1.0 / h.sqrt();
    Ok(Mode {
        j,
        k,
        energy: value.energy,
        x_grid: grid.points(),
        values: v.iter().map(|x| x * scale).collect(),
        disc_error: value.disc_error,
        grid_energy,
        spacing: h,
    })
}

/// ψ_{j,∞}(x; k) = b^{1/4} φ_j(b^{1/2}x − b^{−1/2}k).
pub fn limit_mode(j: usize, k: f64, b: f64, x: f64) -> f64 {
    let sb = b.sqrt();
    sb.sqrt() * hermite_phi(j, sb * x - k / sb)
}
