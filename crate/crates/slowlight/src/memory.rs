//! Storage and retrieval of slow light.
//!
//! The protocol: an incident probe inside the control plateau populates only
//! the first dark polariton (Φ_D1 = ℰ/ζ_c, Φ_D2 = 0, Φ_B ≈ 0). Switching
//! the controls off at fixed ratio freezes Φ_D1 into the two coherences,
//! Φ₂ = −ξ_c2*Φ_D1 and Φ₃ = −ξ_c3*Φ_D1. Retrieval with possibly different
//! controls regenerates both polaritons through the same overlap algebra,
//! and the probe reappears as ℰ = ζ_c Φ_D1. Because the overlap map is
//! unitary, |Φ_D1|² + |Φ_D2|² is preserved node by node: photons missing
//! from the regenerated beam sit in the trapped polariton.
//!
//! Retrieval is computed from the stored coherences via the general
//! polariton definitions; the explicit ξ-overlap expressions are asserted as
//! a test identity instead of being duplicated as ground truth.

use num_complex::Complex64;

use crate::coupling::ControlPair;
use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, GridSpec, RealField2D};
use crate::mixing::{mixing_params, MediumParams, MixingParams, PolaritonState};

/// Atomic coherences holding a stored probe.
#[derive(Debug, Clone)]
pub struct StoredCoherences {
    pub phi2: ComplexField2D,
    pub phi3: ComplexField2D,
}

impl StoredCoherences {
    /// Uniform decay of the stored coherences over a holding interval,
    /// amplitude factor e^{−interval/t_coh}. No spatial structure is claimed
    /// for the decoherence; this is a single knob.
    pub fn apply_decoherence(&mut self, interval: f64, coherence_time: f64) -> Result<()> {
        if !(coherence_time > 0.0) || interval < 0.0 {
            return Err(Error::InvalidArgument(
                "decoherence needs t_coh > 0 and a non-negative interval".into(),
            ));
        }
        let factor = Complex64::new((-interval / coherence_time).exp(), 0.0);
        self.phi2 = self.phi2.scaled(factor);
        self.phi3 = self.phi3.scaled(factor);
        Ok(())
    }
}

/// Convert an incident probe into the first dark polariton, Φ_D1 = ℰ/ζ_c.
///
/// Fails when the probe has amplitude at nodes with ζ_c = 0 (probe light
/// where no control shines cannot enter the dark channel adiabatically).
pub fn inject_probe(probe: &ComplexField2D, mix_s: &MixingParams) -> Result<PolaritonState> {
    if probe.grid() != mix_s.grid() {
        return Err(Error::GridMismatch(
            "probe and mixing on different grids".into(),
        ));
    }
    let len = probe.values().len();
    let mut d1 = Vec::with_capacity(len);
    let mut bad_nodes = 0usize;
    for i in 0..len {
        let e = probe.values()[i];
        let zc = mix_s.zeta_c[i];
        if zc == 0.0 {
            if e.norm() > 0.0 {
                bad_nodes += 1;
            }
            d1.push(Complex64::ZERO);
        } else {
            d1.push(e / zc);
        }
    }
    if bad_nodes > 0 {
        return Err(Error::NonAdiabatic { nodes: bad_nodes });
    }
    Ok(PolaritonState {
        d1: ComplexField2D::from_values(mix_s.grid(), d1)?,
        d2: ComplexField2D::zeros(mix_s.grid()),
        bright: ComplexField2D::zeros(mix_s.grid()),
    })
}

/// Freeze the first polariton into atomic coherences at switch-off,
/// Φ₂ = −ξ_c2*Φ_D1 and Φ₃ = −ξ_c3*Φ_D1 (ζ₁ → 1 applied exactly).
pub fn store(pol: &PolaritonState, mix_s: &MixingParams) -> Result<StoredCoherences> {
    if pol.d1.grid() != mix_s.grid() {
        return Err(Error::GridMismatch(
            "state and mixing on different grids".into(),
        ));
    }
    let len = pol.d1.values().len();
    let mut phi2 = Vec::with_capacity(len);
    let mut phi3 = Vec::with_capacity(len);
    for i in 0..len {
        let d1 = pol.d1.values()[i];
        phi2.push(-mix_s.xi_c2[i].conj() * d1);
        phi3.push(-mix_s.xi_c3[i].conj() * d1);
    }
    Ok(StoredCoherences {
        phi2: ComplexField2D::from_values(mix_s.grid(), phi2)?,
        phi3: ComplexField2D::from_values(mix_s.grid(), phi3)?,
    })
}

/// Verify that a control pair keeps its ξ ratio constant between two times
/// of a switching ramp. Storage only preserves the stored state when the
/// ratio is frozen through the switch-off.
pub fn check_ratio_preserved(
    controls: &ControlPair,
    medium: &MediumParams,
    t_a: f64,
    t_b: f64,
) -> Result<()> {
    let (c2a, c3a) = controls.at(t_a);
    let (c2b, c3b) = controls.at(t_b);
    let mix_a = mixing_params(&c2a, &c3a, medium)?;
    let mix_b = mixing_params(&c2b, &c3b, medium)?;
    let mut worst = 0.0f64;
    for i in 0..mix_a.xi_c2.len() {
        if mix_a.zero_control[i] || mix_b.zero_control[i] {
            continue;
        }
        worst = worst
            .max((mix_a.xi_c2[i] - mix_b.xi_c2[i]).norm())
            .max((mix_a.xi_c3[i] - mix_b.xi_c3[i]).norm());
    }
    if worst > 1e-6 {
        return Err(Error::RatioDrift(format!(
            "ξ drifts by {worst:.3e} between t = {t_a} and t = {t_b}"
        )));
    }
    Ok(())
}

/// Regenerate the dark pair from stored coherences at control switch-on
/// (ζ₁ ≈ 1, no probe field yet), via the general polariton definitions.
pub fn retrieve(stored: &StoredCoherences, mix_r: &MixingParams) -> Result<PolaritonState> {
    if stored.phi2.grid() != mix_r.grid() {
        return Err(Error::GridMismatch(
            "coherences and mixing on different grids".into(),
        ));
    }
    let len = stored.phi2.values().len();
    let mut d1 = Vec::with_capacity(len);
    let mut d2 = Vec::with_capacity(len);
    for i in 0..len {
        let p2 = stored.phi2.values()[i];
        let p3 = stored.phi3.values()[i];
        // Φ_D1 = ζ_cℰ − ζ₁(ξ_c2Φ₂ + ξ_c3Φ₃) with ℰ = 0, ζ₁ = 1
        d1.push(-(mix_r.xi_c2[i] * p2 + mix_r.xi_c3[i] * p3));
        d2.push(mix_r.xi_c3[i].conj() * p2 - mix_r.xi_c2[i].conj() * p3);
    }
    Ok(PolaritonState {
        d1: ComplexField2D::from_values(mix_r.grid(), d1)?,
        d2: ComplexField2D::from_values(mix_r.grid(), d2)?,
        bright: ComplexField2D::zeros(mix_r.grid()),
    })
}

/// The probe field regenerated by the first polariton, ℰ = ζ_c Φ_D1.
pub fn regenerated_field(pol_r: &PolaritonState, mix_r: &MixingParams) -> Result<ComplexField2D> {
    if pol_r.d1.grid() != mix_r.grid() {
        return Err(Error::GridMismatch(
            "state and mixing on different grids".into(),
        ));
    }
    let values = pol_r
        .d1
        .values()
        .iter()
        .enumerate()
        .map(|(i, d1)| mix_r.zeta_c[i] * d1)
        .collect();
    ComplexField2D::from_values(mix_r.grid(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetrievalCase {
    /// Λ storage, tripod retrieval: the retrieving control's vortex is
    /// imprinted on the regenerated probe.
    LambdaToTripod,
    /// Tripod storage, Λ retrieval: the storing control's vortex reappears
    /// phase conjugated.
    TripodToLambda,
}

/// Parameters of the closed-form regenerated beams: amplitude ratio a,
/// auxiliary control strength b, and the probe/storing/retrieving widths.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormParams {
    pub amplitude_ratio: f64,
    pub auxiliary_ratio: f64,
    pub sigma_p: f64,
    pub sigma_s: f64,
    pub sigma_r: f64,
    pub probe_peak: f64,
}

impl ClosedFormParams {
    /// Combined width of the regenerated beam:
    /// σ⁻² = σ_p⁻² + σ_r⁻² − σ_s⁻².
    pub fn combined_width(&self) -> Result<f64> {
        for (name, s) in [
            ("sigma_p", self.sigma_p),
            ("sigma_s", self.sigma_s),
            ("sigma_r", self.sigma_r),
        ] {
            if !(s > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        let inv_sq = self.sigma_p.powi(-2) + self.sigma_r.powi(-2) - self.sigma_s.powi(-2);
        if !(inv_sq > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "σ⁻² = {inv_sq:.3e} must be positive; the regenerated beam would not decay"
            )));
        }
        Ok(inv_sq.sqrt().recip())
    }
}

/// Closed-form regenerated beams for a Gaussian probe:
/// Λ→T: a·ℰ₀·ρ̃e^{iφ}e^{−ρ̃²/σ²};
/// T→Λ: a/(ρ̃²+b²)·ℰ₀·ρ̃e^{−iφ}e^{−ρ̃²/σ²}.
pub fn closed_form_retrieved_beam(
    case: RetrievalCase,
    params: &ClosedFormParams,
    grid: &GridSpec,
) -> Result<ComplexField2D> {
    let sigma = params.combined_width()?;
    let s2 = sigma * sigma;
    let a = params.amplitude_ratio;
    let b = params.auxiliary_ratio;
    let e0 = params.probe_peak;
    if case == RetrievalCase::TripodToLambda && b == 0.0 {
        return Err(Error::InvalidArgument(
            "tripod storage needs a nonzero auxiliary control (b > 0)".into(),
        ));
    }
    Ok(ComplexField2D::from_fn(grid, |x, y| {
        let rho2 = x * x + y * y;
        let rho = rho2.sqrt();
        let envelope = (-rho2 / s2).exp();
        if rho == 0.0 {
            return Complex64::ZERO;
        }
        let phi = y.atan2(x);
        match case {
            RetrievalCase::LambdaToTripod => {
                a * e0 * rho * envelope * Complex64::from_polar(1.0, phi)
            }
            RetrievalCase::TripodToLambda => {
                a / (rho2 + b * b) * e0 * rho * envelope * Complex64::from_polar(1.0, -phi)
            }
        }
    }))
}

/// A separable probe pulse at the medium entry: envelope(t) × profile(r).
#[derive(Debug, Clone)]
pub struct PulseWaveform {
    pub times: Vec<f64>,
    pub envelope: Vec<f64>,
    pub profile: ComplexField2D,
}

impl PulseWaveform {
    fn envelope_at(&self, t: f64) -> f64 {
        if self.times.is_empty() || t < self.times[0] || t > *self.times.last().unwrap() {
            return 0.0;
        }
        let j = match self.times.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(j) => return self.envelope[j],
            Err(j) => j,
        };
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = (t - t0) / (t1 - t0);
        self.envelope[j - 1] * (1.0 - w) + self.envelope[j] * w
    }
}

/// Retarded-time transport of a probe pulse through the medium, neglecting
/// diffraction: ℰ(t, z) = ℰ(τ, z₀) with τ = t − ∫ dz′/v_g1.
///
/// `path` lists (z, v_g1) breakpoints with v_g1 in grid units (λ per 1/γ);
/// the delay integral is a trapezoidal sum over consecutive breakpoints
/// (repeat a z value to encode a velocity jump). Returns the fields at the
/// pulse's own sample times, evaluated at `z_target`.
pub fn transport_probe_in_medium(
    pulse: &PulseWaveform,
    path: &[(f64, RealField2D)],
    z_target: f64,
) -> Result<Vec<ComplexField2D>> {
    if pulse.times.len() != pulse.envelope.len() || pulse.times.len() < 2 {
        return Err(Error::InvalidArgument(
            "pulse needs matching times and envelope with at least two samples".into(),
        ));
    }
    if path.len() < 2 {
        return Err(Error::InvalidArgument(
            "path needs at least two breakpoints".into(),
        ));
    }
    let grid = pulse.profile.grid().clone();
    for (z, v) in path {
        if v.grid() != &grid {
            return Err(Error::GridMismatch(
                "path velocity fields must share the pulse grid".into(),
            ));
        }
        if v.min_value() <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "group velocity must stay positive along the path (z = {z})"
            )));
        }
    }
    if z_target < path[0].0 || z_target > path.last().unwrap().0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "z_target {z_target} outside the sampled path"
        )));
    }

    // per-node delay field by trapezoidal quadrature of 1/v_g1
    let len = grid.len();
    let mut delay = vec![0.0f64; len];
    for pair in path.windows(2) {
        let (z0, v0) = (&pair[0].0, &pair[0].1);
        let (z1, v1) = (&pair[1].0, &pair[1].1);
        if z1 < z0 {
            return Err(Error::InvalidArgument(
                "path z values must not decrease".into(),
            ));
        }
        if *z0 >= z_target {
            break;
        }
        if z1 == z0 {
            continue; // zero-width segment encodes a velocity jump
        }
        let z_hi = z1.min(z_target);
        let dz = z_hi - z0;
        // when the target cuts a segment, interpolate the end velocity
        let frac = if z1 > z0 { dz / (z1 - z0) } else { 1.0 };
        for i in 0..len {
            let inv0 = 1.0 / v0.values()[i];
            let inv1_full = 1.0 / v1.values()[i];
            let inv1 = inv0 + (inv1_full - inv0) * frac;
            delay[i] += dz * 0.5 * (inv0 + inv1);
        }
    }

    let mut out = Vec::with_capacity(pulse.times.len());
    for &t in &pulse.times {
        let mut values = Vec::with_capacity(len);
        for i in 0..len {
            let env = pulse.envelope_at(t - delay[i]);
            values.push(pulse.profile.values()[i] * env);
        }
        out.push(ComplexField2D::from_values(&grid, values)?);
    }
    Ok(out)
}
