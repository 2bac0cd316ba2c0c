//! Uniform transverse grids, complex fields and spectral calculus.
//!
//! The grid is square, centered on the beam axis and periodic; transverse
//! lengths are measured in probe wavelengths λ. Derivatives are evaluated in
//! Fourier space, so they are exact for band-limited fields. Beams must stay
//! well inside the domain (extent ≥ 4 beam widths) for the periodic images
//! not to matter.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Square uniform grid over `[-extent, extent)²`.
///
/// `n` is a power of two ≥ 16 so the spectral transforms stay fast and the
/// center node `n/2` sits exactly at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    n: usize,
    extent: f64,
    dx: f64,
}

impl GridSpec {
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size {n} must be a power of two >= 16"
            )));
        }
        if !extent.is_finite() || extent <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "grid extent {extent} must be positive and finite"
            )));
        }
        let dx = 2.0 * extent / n as f64;
        Ok(Self { n, extent, dx })
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half-width of the domain in λ.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Node spacing, `2·extent / n`.
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Area element dx².
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dx
    }

    /// Coordinate of node `i` along either axis; node `n/2` is at 0.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.dx
    }

    /// Angular wavenumbers per axis in FFT ordering.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = PI / self.extent;
        (0..self.n)
            .map(|m| {
                let s = if m <= self.n / 2 {
                    m as isize
                } else {
                    m as isize - self.n as isize
                };
                s as f64 * dk
            })
            .collect()
    }

    /// Wavenumbers for first derivatives: the Nyquist mode has no odd
    /// counterpart and is zeroed.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        let mut ks = self.wavenumbers();
        ks[self.n / 2] = 0.0;
        ks
    }

    fn check_same(&self, other: &GridSpec, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{what}: {}x{} extent {} vs {}x{} extent {}",
                self.n, self.n, self.extent, other.n, other.n, other.extent
            )));
        }
        Ok(())
    }
}

/// Real scalar field sampled on a [`GridSpec`], row-major with x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField2D {
    grid: GridSpec,
    values: Vec<f64>,
}

impl RealField2D {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &GridSpec, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..n {
            let y = grid.coord(iy);
            for ix in 0..n {
                values.push(f(grid.coord(ix), y));
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_values(grid: &GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field length {} does not match grid {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.grid_ref()
    }

    fn grid_ref(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.n() + ix]
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Complex scalar amplitude on a [`GridSpec`], row-major with x fastest.
///
/// Holds probe fields, atomic coherences and polariton components alike; for
/// the probe, |ℰ|² is a photon number density.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl ComplexField2D {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::ZERO; grid.len()],
        }
    }

    pub fn constant(grid: &GridSpec, value: Complex64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..n {
            let y = grid.coord(iy);
            for ix in 0..n {
                values.push(f(grid.coord(ix), y));
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_values(grid: &GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field length {} does not match grid {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.grid.n() + ix]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(
        &self,
        other: &ComplexField2D,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.grid.check_same(&other.grid, "zip_map")?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn conjugate(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &ComplexField2D) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField2D) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Discrete L² norm, Σ|f|²·dx².
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    /// Discrete inner product ⟨self|other⟩ = Σ conj(self)·other·dx².
    pub fn inner(&self, other: &ComplexField2D) -> Result<Complex64> {
        self.grid.check_same(&other.grid, "inner")?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.cell_area())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Spectral transverse Laplacian ∇̃²f; exact for band-limited periodic
    /// fields.
    pub fn laplacian(&self) -> Self {
        let mut fft = Fft2::new(self.grid.n());
        let ks = self.grid.wavenumbers();
        let n = self.grid.n();
        let mut data = self.values.clone();
        fft.forward(&mut data);
        for (iy, &ky) in ks.iter().enumerate() {
            for (ix, &kx) in ks.iter().enumerate() {
                data[iy * n + ix] *= -(kx * kx + ky * ky);
            }
        }
        fft.inverse(&mut data);
        Self {
            grid: self.grid.clone(),
            values: data,
        }
    }

    /// Spectral gradient (∂_x f, ∂_y f).
    pub fn gradient(&self) -> (Self, Self) {
        let mut fft = Fft2::new(self.grid.n());
        let ks = self.grid.derivative_wavenumbers();
        let n = self.grid.n();
        let mut hat = self.values.clone();
        fft.forward(&mut hat);
        let mut gx = hat.clone();
        let mut gy = hat;
        for (iy, &ky) in ks.iter().enumerate() {
            for (ix, &kx) in ks.iter().enumerate() {
                let idx = iy * n + ix;
                gx[idx] *= Complex64::new(0.0, kx);
                gy[idx] *= Complex64::new(0.0, ky);
            }
        }
        fft.inverse(&mut gx);
        fft.inverse(&mut gy);
        (
            Self {
                grid: self.grid.clone(),
                values: gx,
            },
            Self {
                grid: self.grid.clone(),
                values: gy,
            },
        )
    }

    /// Bilinear interpolation at world coordinates, with periodic wrap.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Complex64 {
        let n = self.grid.n();
        let fx = x / self.grid.dx() + (n / 2) as f64;
        let fy = y / self.grid.dx() + (n / 2) as f64;
        let ix0 = fx.floor();
        let iy0 = fy.floor();
        let tx = fx - ix0;
        let ty = fy - iy0;
        let wrap = |i: f64| -> usize { (i.rem_euclid(n as f64)) as usize % n };
        let (x0, x1) = (wrap(ix0), wrap(ix0 + 1.0));
        let (y0, y1) = (wrap(iy0), wrap(iy0 + 1.0));
        let f00 = self.values[y0 * n + x0];
        let f10 = self.values[y0 * n + x1];
        let f01 = self.values[y1 * n + x0];
        let f11 = self.values[y1 * n + x1];
        f00 * ((1.0 - tx) * (1.0 - ty))
            + f10 * (tx * (1.0 - ty))
            + f01 * ((1.0 - tx) * ty)
            + f11 * (tx * ty)
    }
}

/// Planned 2D FFT over an n×n row-major buffer.
///
/// `forward` is unnormalized, `inverse` carries the full 1/n² so that the
/// round trip is the identity.
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    column: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            n,
            fwd,
            inv,
            scratch: vec![Complex64::ZERO; scratch_len],
            column: vec![Complex64::ZERO; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.transform(data, false);
        let scale = 1.0 / (self.n * self.n) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&mut self, data: &mut [Complex64], forward: bool) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "buffer does not match planned size");
        let fft = if forward { &self.fwd } else { &self.inv };
        for row in data.chunks_exact_mut(n) {
            fft.process_with_scratch(row, &mut self.scratch);
        }
        for j in 0..n {
            for i in 0..n {
                self.column[i] = data[i * n + j];
            }
            fft.process_with_scratch(&mut self.column, &mut self.scratch);
            for i in 0..n {
                data[i * n + j] = self.column[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: &GridSpec, seed: u64) -> ComplexField2D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexField2D::from_fn(grid, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn grid_spacing_matches_definition() {
        let g = GridSpec::new(256, 40.0).unwrap();
        assert_eq!(g.dx(), 0.3125);
        let g = GridSpec::new(16, 1.0).unwrap();
        assert_eq!(g.dx(), 0.125);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(GridSpec::new(100, 40.0).is_err());
        assert!(GridSpec::new(8, 40.0).is_err());
        assert!(GridSpec::new(64, 0.0).is_err());
        assert!(GridSpec::new(64, -1.0).is_err());
    }

    #[test]
    fn grid_is_centered() {
        let g = GridSpec::new(64, 10.0).unwrap();
        assert_eq!(g.coord(32), 0.0);
        assert_eq!(g.coord(0), -10.0);
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = GridSpec::new(32, 5.0).unwrap();
        let f = ComplexField2D::constant(&g, Complex64::new(1.0, 0.0));
        let lap = f.laplacian();
        assert!(lap.max_abs() < 1e-12);
    }

    #[test]
    fn laplacian_plane_wave_eigenvalue() {
        // f = exp(i 2π m x / extent) is an eigenfunction with -(2πm/extent)².
        let g = GridSpec::new(64, 7.0).unwrap();
        let m = 3.0;
        let k = 2.0 * PI * m / g.extent();
        let f = ComplexField2D::from_fn(&g, |x, _| Complex64::new(0.0, k * x).exp());
        let lap = f.laplacian();
        let want = -(k * k);
        for (l, v) in lap.values().iter().zip(f.values()) {
            assert!((l - want * v).norm() <= 1e-10 * want.abs());
        }
    }

    #[test]
    fn laplacian_gaussian_matches_closed_form() {
        // ∇²e^{-ρ²/σ²} = 4(ρ² - σ²)/σ⁴ · e^{-ρ²/σ²}
        let sigma = 10.0;
        let g = GridSpec::new(256, 80.0).unwrap();
        let f = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new((-(x * x + y * y) / (sigma * sigma)).exp(), 0.0)
        });
        let lap = f.laplacian();
        let n = g.n();
        for iy in 0..n {
            for ix in 0..n {
                let (x, y) = (g.coord(ix), g.coord(iy));
                let rho2 = x * x + y * y;
                if rho2.sqrt() > 3.0 * sigma {
                    continue; // exponentially small; dominated by periodic images
                }
                let want = 4.0 * (rho2 - sigma * sigma) / sigma.powi(4) * f.at(ix, iy).re;
                let got = lap.at(ix, iy).re;
                assert!(
                    (got - want).abs() <= 1e-6 * want.abs().max(1e-3),
                    "at ({x},{y}): got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn norm_sq_constant_counts_area() {
        let g = GridSpec::new(32, 1.0).unwrap();
        let f = ComplexField2D::constant(&g, Complex64::new(1.0, 0.0));
        assert!((f.norm_sq() - 4.0).abs() < 1e-12);
        assert_eq!(ComplexField2D::zeros(&g).norm_sq(), 0.0);
    }

    #[test]
    fn spectral_round_trip_and_parseval() {
        let g = GridSpec::new(64, 5.0).unwrap();
        let f = random_field(&g, 7);
        let mut fft = Fft2::new(g.n());
        let mut data = f.values().to_vec();
        fft.forward(&mut data);
        // Parseval with the unitary scaling 1/n.
        let scale = 1.0 / g.n() as f64;
        let k_norm: f64 = data.iter().map(|v| (v * scale).norm_sqr()).sum::<f64>() * g.cell_area();
        assert!((k_norm - f.norm_sq()).abs() <= 1e-10 * f.norm_sq());
        fft.inverse(&mut data);
        let max_err = data
            .iter()
            .zip(f.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-12 * f.max_abs());
    }

    #[test]
    fn laplacian_is_linear() {
        let g = GridSpec::new(32, 3.0).unwrap();
        let f = random_field(&g, 1);
        let h = random_field(&g, 2);
        let a = Complex64::new(0.7, -0.3);
        let b = Complex64::new(-1.2, 0.4);
        let combo = f.scaled(a).add(&h.scaled(b)).unwrap().laplacian();
        let separate = f
            .laplacian()
            .scaled(a)
            .add(&h.laplacian().scaled(b))
            .unwrap();
        let scale = separate.max_abs().max(1.0);
        let err = combo
            .values()
            .iter()
            .zip(separate.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12 * scale);
    }

    #[test]
    fn gradient_of_plane_wave() {
        let g = GridSpec::new(64, 4.0).unwrap();
        let kx = PI / g.extent() * 5.0;
        let f = ComplexField2D::from_fn(&g, |x, _| Complex64::new(0.0, kx * x).exp());
        let (gx, gy) = f.gradient();
        for ((gxv, gyv), v) in gx.values().iter().zip(gy.values()).zip(f.values()) {
            assert!((gxv - Complex64::new(0.0, kx) * v).norm() < 1e-10 * kx);
            assert!(gyv.norm() < 1e-10 * kx);
        }
    }

    #[test]
    fn bilinear_sampling_recovers_smooth_field() {
        let g = GridSpec::new(64, 8.0).unwrap();
        let f = ComplexField2D::from_fn(&g, |x, y| Complex64::new(x * 0.2 + y * 0.1, x * y * 0.01));
        // linear functions are reproduced exactly away from the wrap seam
        let v = f.sample_bilinear(1.3, -2.7);
        assert!((v.re - (1.3 * 0.2 - 2.7 * 0.1)).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn norm_is_parseval_invariant(seed in 0u64..1000) {
            let g = GridSpec::new(32, 2.0).unwrap();
            let f = random_field(&g, seed);
            let mut fft = Fft2::new(g.n());
            let mut data = f.values().to_vec();
            fft.forward(&mut data);
            let scale = 1.0 / g.n() as f64;
            let k_norm: f64 = data.iter().map(|v| (v * scale).norm_sqr()).sum::<f64>() * g.cell_area();
            prop_assert!((k_norm - f.norm_sq()).abs() <= 1e-10 * f.norm_sq().max(1e-30));
        }
    }
}
