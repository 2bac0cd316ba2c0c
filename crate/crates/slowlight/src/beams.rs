//! Beam profiles and orbital-angular-momentum diagnostics.
//!
//! Generators for the Gaussian and (unnormalized) Laguerre-Gaussian profiles
//! used as probe and control fields, plus the diagnostics that characterize
//! regenerated beams: topological charge from the phase winding, the OAM
//! expectation value and the rms radius.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, GridSpec};

/// Largest supported vortex charge magnitude.
pub const MAX_CHARGE: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamKind {
    Gaussian,
    /// Laguerre-Gaussian with radial order 0: amplitude ∝ ρ^{|ℓ|} e^{iℓφ}.
    LaguerreGauss,
}

/// An unnormalized beam: `A·e^{-ρ²/σ²}` or `A·ρ^{|ℓ|}e^{iℓφ}e^{-ρ²/σ²}`.
///
/// Prefactors are carried explicitly (no orthonormal mode convention), so a
/// retrieved field keeps the amplitude ratios of the control beams that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    kind: BeamKind,
    amplitude: f64,
    width: f64,
    charge: i32,
}

impl BeamSpec {
    pub fn gaussian(amplitude: f64, width: f64) -> Result<Self> {
        Self::validate(BeamKind::Gaussian, amplitude, width, 0)
    }

    pub fn laguerre_gauss(amplitude: f64, width: f64, charge: i32) -> Result<Self> {
        Self::validate(BeamKind::LaguerreGauss, amplitude, width, charge)
    }

    fn validate(kind: BeamKind, amplitude: f64, width: f64, charge: i32) -> Result<Self> {
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "beam width {width} must be positive"
            )));
        }
        if !amplitude.is_finite() {
            return Err(Error::InvalidArgument(
                "beam amplitude must be finite".into(),
            ));
        }
        if charge.abs() > MAX_CHARGE {
            return Err(Error::InvalidArgument(format!(
                "vortex charge {charge} outside supported range ±{MAX_CHARGE}"
            )));
        }
        if kind == BeamKind::Gaussian && charge != 0 {
            return Err(Error::InvalidArgument(
                "a gaussian beam carries no vortex charge".into(),
            ));
        }
        Ok(Self {
            kind,
            amplitude,
            width,
            charge,
        })
    }

    pub fn kind(&self) -> BeamKind {
        self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn charge(&self) -> i32 {
        self.charge
    }
}

/// Sample a beam on a grid. The axis node of a charged beam is exactly zero.
pub fn render_beam(spec: &BeamSpec, grid: &GridSpec) -> ComplexField2D {
    let a = spec.amplitude;
    let s2 = spec.width * spec.width;
    let l = spec.charge;
    ComplexField2D::from_fn(grid, |x, y| {
        let rho2 = x * x + y * y;
        let envelope = (-rho2 / s2).exp();
        match spec.kind {
            BeamKind::Gaussian => Complex64::new(a * envelope, 0.0),
            BeamKind::LaguerreGauss => {
                let rho = rho2.sqrt();
                if rho == 0.0 && l != 0 {
                    return Complex64::ZERO;
                }
                let phi = y.atan2(x);
                let radial = a * rho.powi(l.abs()) * envelope;
                radial * Complex64::new(0.0, l as f64 * phi).exp()
            }
        }
    })
}

/// Topological charge from the phase winding along a circle about the grid
/// center.
///
/// The loop is sampled at 8 points per grid spacing with bilinear
/// interpolation; each phase increment is wrapped to (−π, π], so no global
/// unwrapping is needed.
pub fn vortex_charge(field: &ComplexField2D, radius: f64) -> Result<i32> {
    let grid = field.grid();
    if !(radius >= 4.0 * grid.dx()) {
        return Err(Error::InvalidArgument(format!(
            "loop radius {radius} must be at least 4 dx = {}",
            4.0 * grid.dx()
        )));
    }
    let floor = 1e-12 * field.max_abs();
    let samples = 8 * (radius / grid.dx()).ceil() as usize;
    let mut phases = Vec::with_capacity(samples);
    for j in 0..samples {
        let theta = TAU * j as f64 / samples as f64;
        let v = field.sample_bilinear(radius * theta.cos(), radius * theta.sin());
        if v.norm() <= floor {
            return Err(Error::DegenerateField(format!(
                "amplitude vanishes on the sampling loop at angle {theta:.3}; winding undefined"
            )));
        }
        phases.push(v.arg());
    }
    let mut winding = 0.0;
    for j in 0..samples {
        let mut d = phases[(j + 1) % samples] - phases[j];
        while d > PI {
            d -= TAU;
        }
        while d <= -PI {
            d += TAU;
        }
        winding += d;
    }
    Ok((winding / TAU).round() as i32)
}

/// OAM expectation ⟨−i(x∂_y − y∂_x)⟩ per photon, with spectral derivatives.
pub fn oam_expectation(field: &ComplexField2D) -> Result<f64> {
    let norm = field.norm_sq();
    if norm <= 0.0 {
        return Err(Error::DegenerateField("zero-norm field has no OAM".into()));
    }
    let (gx, gy) = field.gradient();
    let grid = field.grid();
    let n = grid.n();
    let mut acc = 0.0;
    for iy in 0..n {
        let y = grid.coord(iy);
        for ix in 0..n {
            let x = grid.coord(ix);
            let idx = iy * n + ix;
            let lz = Complex64::new(0.0, -1.0) * (x * gy.values()[idx] - y * gx.values()[idx]);
            acc += (field.values()[idx].conj() * lz).re;
        }
    }
    Ok(acc * grid.cell_area() / norm)
}

/// Intensity-weighted rms radius sqrt(⟨ρ²⟩).
pub fn rms_radius(field: &ComplexField2D) -> Result<f64> {
    let norm = field.norm_sq();
    if norm <= 0.0 {
        return Err(Error::DegenerateField(
            "zero-norm field has no radius".into(),
        ));
    }
    let grid = field.grid();
    let n = grid.n();
    let mut acc = 0.0;
    for iy in 0..n {
        let y = grid.coord(iy);
        for ix in 0..n {
            let x = grid.coord(ix);
            acc += (x * x + y * y) * field.values()[iy * n + ix].norm_sqr();
        }
    }
    Ok((acc * grid.cell_area() / norm).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(256, 40.0).unwrap()
    }

    #[test]
    fn beam_spec_validation() {
        assert!(BeamSpec::gaussian(1.0, 0.0).is_err());
        assert!(BeamSpec::gaussian(1.0, -3.0).is_err());
        assert!(BeamSpec::laguerre_gauss(1.0, 5.0, 9).is_err());
        assert!(BeamSpec::laguerre_gauss(1.0, 5.0, -8).is_ok());
    }

    #[test]
    fn gaussian_peak_is_amplitude() {
        let g = grid();
        let f = render_beam(&BeamSpec::gaussian(1.0, 10.0).unwrap(), &g);
        let n = g.n();
        assert_eq!(f.at(n / 2, n / 2), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn lg_value_at_reference_point() {
        // ℓ=1, σ=10 at (ρ=σ/√2, φ=0): (σ/√2)·e^{-1/2}
        let sigma: f64 = 10.0;
        let g = GridSpec::new(256, 40.0).unwrap();
        let f = render_beam(&BeamSpec::laguerre_gauss(1.0, sigma, 1).unwrap(), &g);
        let x = sigma / 2f64.sqrt();
        let want = x * (-0.5f64).exp();
        let got = f.sample_bilinear(x, 0.0);
        // bilinear sampling off the nodes costs some accuracy
        assert!((got.re - want).abs() < 1e-3 * want);
        assert!(got.im.abs() < 1e-10);
        // vortex core is exactly zero
        let n = g.n();
        assert_eq!(f.at(n / 2, n / 2), Complex64::ZERO);
    }

    #[test]
    fn lg_norm_matches_gaussian_integral() {
        // ∫|ρ e^{-ρ²/σ²}|² dA = 2π ∫ ρ³ e^{-2ρ²/σ²} dρ = π σ⁴/4
        let sigma = 10.0;
        let g = grid();
        let f = render_beam(&BeamSpec::laguerre_gauss(1.0, sigma, 1).unwrap(), &g);
        let want = PI * sigma.powi(4) / 4.0;
        assert!(
            (f.norm_sq() - want).abs() < 1e-3 * want,
            "norm {} vs analytic {}",
            f.norm_sq(),
            want
        );
    }

    #[test]
    fn vortex_charge_of_rendered_beams() {
        let g = grid();
        for charge in [-2, -1, 0, 1, 2, 3] {
            let spec = if charge == 0 {
                BeamSpec::gaussian(1.0, 10.0).unwrap()
            } else {
                BeamSpec::laguerre_gauss(1.0, 10.0, charge).unwrap()
            };
            let f = render_beam(&spec, &g);
            assert_eq!(vortex_charge(&f, 5.0).unwrap(), charge);
        }
    }

    #[test]
    fn vortex_charge_across_widths_and_radii() {
        for &sigma in &[5.0, 10.0, 20.0] {
            let g = GridSpec::new(256, 80.0).unwrap();
            for charge in [-8, -3, 1, 8] {
                let f = render_beam(&BeamSpec::laguerre_gauss(1.0, sigma, charge).unwrap(), &g);
                for radius in [sigma / 2.0, sigma] {
                    assert_eq!(vortex_charge(&f, radius).unwrap(), charge);
                }
            }
        }
    }

    #[test]
    fn conjugate_flips_charge() {
        let g = grid();
        let f = render_beam(&BeamSpec::laguerre_gauss(1.0, 10.0, 1).unwrap(), &g);
        assert_eq!(vortex_charge(&f.conjugate(), 5.0).unwrap(), -1);
    }

    #[test]
    fn charge_rejects_degenerate_loops() {
        let g = grid();
        let f = ComplexField2D::zeros(&g);
        assert!(matches!(
            vortex_charge(&f, 5.0),
            Err(Error::DegenerateField(_))
        ));
        let f = render_beam(&BeamSpec::gaussian(1.0, 10.0).unwrap(), &g);
        assert!(matches!(
            vortex_charge(&f, 0.1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn oam_of_lg_modes() {
        let g = grid();
        let f = render_beam(&BeamSpec::laguerre_gauss(1.0, 10.0, 1).unwrap(), &g);
        assert!((oam_expectation(&f).unwrap() - 1.0).abs() < 1e-6);

        let f = render_beam(&BeamSpec::gaussian(1.0, 10.0).unwrap(), &g);
        assert!(oam_expectation(&f).unwrap().abs() < 1e-10);

        for charge in [-2, 2, 5] {
            let f = render_beam(&BeamSpec::laguerre_gauss(1.0, 8.0, charge).unwrap(), &g);
            assert!(
                (oam_expectation(&f).unwrap() - charge as f64).abs() < 1e-5,
                "charge {charge}"
            );
        }
    }

    #[test]
    fn oam_of_balanced_superposition_vanishes() {
        let g = grid();
        let plus = render_beam(&BeamSpec::laguerre_gauss(1.0, 10.0, 1).unwrap(), &g);
        let minus = render_beam(&BeamSpec::laguerre_gauss(1.0, 10.0, -1).unwrap(), &g);
        let sum = plus.add(&minus).unwrap();
        assert!(oam_expectation(&sum).unwrap().abs() < 1e-8);
    }

    #[test]
    fn rms_radius_closed_forms() {
        let g = grid();
        let gauss = render_beam(&BeamSpec::gaussian(1.0, 10.0).unwrap(), &g);
        // |E|² = e^{-2ρ²/σ²} ⇒ ⟨ρ²⟩ = σ²/2
        let want = 10.0 / 2f64.sqrt();
        assert!((rms_radius(&gauss).unwrap() - want).abs() < 1e-3 * want);

        let lg = render_beam(&BeamSpec::laguerre_gauss(1.0, 10.0, 1).unwrap(), &g);
        // |E|² = ρ² e^{-2ρ²/σ²} ⇒ ⟨ρ²⟩ = σ²
        assert!((rms_radius(&lg).unwrap() - 10.0).abs() < 1e-3 * 10.0);

        // scaling invariance
        let scaled = lg.scaled(Complex64::new(0.0, 17.0));
        assert!((rms_radius(&scaled).unwrap() - rms_radius(&lg).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_reject_zero_fields() {
        let g = grid();
        let zero = ComplexField2D::zeros(&g);
        assert!(oam_expectation(&zero).is_err());
        assert!(rms_radius(&zero).is_err());
    }
}
