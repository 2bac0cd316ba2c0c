//! Bright- and dark-state polariton mixing for the tripod scheme.
//!
//! The probe field ℰ and the two ground-state coherences Φ₂, Φ₃ rotate into
//! one bright polariton Φ_B (the only combination driving the excited state)
//! and two dark polaritons. The rotation is parametrized per node by
//!
//! * ξ_c2 = Ω_c2/Ω_c, ξ_c3 = Ω_c3/Ω_c with Ω_c = √(|Ω_c2|²+|Ω_c3|²),
//! * ζ₁ = g√n/Ξ, ζ_c = Ω_c/Ξ with Ξ = √(Ω_c² + g²n),
//!
//! and is unitary node by node, so the total excitation density is preserved
//! exactly. The condensate phase is fixed to zero, which makes ζ₁ and ζ_c
//! real.
//!
//! Frequencies are in units of γ, velocities in fractions of c; the atomic
//! motion enters only through the dimensionless recoil frequency ħk²/(2mγ).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, GridSpec, RealField2D};

/// Static trapping potentials per internal state, in units of ħγ.
#[derive(Debug, Clone)]
pub struct TrapPotentials {
    pub v0: RealField2D,
    pub v1: RealField2D,
    pub v2: RealField2D,
    pub v3: RealField2D,
}

/// Atomic and optical constants of the medium.
#[derive(Debug, Clone)]
pub struct MediumParams {
    /// Collective coupling g√n in units of γ.
    pub g_sqrt_n: f64,
    /// Excited-state decay rate in the chosen frequency unit (normally 1).
    pub gamma: f64,
    /// One-photon detuning (diagnostic; does not enter the dark sector).
    pub omega01: f64,
    /// Two-photon detuning of state 2, in γ.
    pub omega21: f64,
    /// Two-photon detuning of state 3, in γ.
    pub omega31: f64,
    /// Dimensionless recoil frequency ħk²/(2mγ).
    pub recoil: f64,
    /// Probe wavenumber in units of 2π/λ.
    pub k: f64,
    /// Control wavenumber in units of 2π/λ.
    pub k_c: f64,
    /// Speed of light in grid units, c/(γλ). Converts between the λ-per-1/γ
    /// grid clock and velocities quoted as fractions of c.
    pub c_scale: f64,
    pub potentials: Option<TrapPotentials>,
}

impl Default for MediumParams {
    fn default() -> Self {
        Self {
            g_sqrt_n: 100.0,
            gamma: 1.0,
            omega01: 0.0,
            omega21: 0.0,
            omega31: 0.0,
            recoil: 1e-3,
            k: 1.0,
            k_c: 1.0,
            c_scale: 1e4,
            potentials: None,
        }
    }
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g_sqrt_n > 0.0) {
            return Err(Error::InvalidArgument("g√n must be positive".into()));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidArgument("gamma must be non-negative".into()));
        }
        if !(self.k > 0.0) || !(self.k_c > 0.0) {
            return Err(Error::InvalidArgument(
                "wavenumbers must be positive".into(),
            ));
        }
        if self.recoil < 0.0 {
            return Err(Error::InvalidArgument(
                "recoil frequency must be non-negative".into(),
            ));
        }
        if !(self.c_scale > 0.0) {
            return Err(Error::InvalidArgument("c_scale must be positive".into()));
        }
        if let Some(p) = &self.potentials {
            for (name, v) in [("V0", &p.v0), ("V1", &p.v1), ("V2", &p.v2), ("V3", &p.v3)] {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("trapping potential {name}")));
                }
            }
        }
        Ok(())
    }

    /// Dimensionless probe wavenumber kλ.
    pub fn kappa(&self) -> f64 {
        std::f64::consts::TAU * self.k
    }

    /// Dimensionless control wavenumber k_cλ.
    pub fn kappa_c(&self) -> f64 {
        std::f64::consts::TAU * self.k_c
    }

    /// ω₃₂ = ω₃₁ − ω₂₁.
    pub fn omega32(&self) -> f64 {
        self.omega31 - self.omega21
    }

    /// Recoil prefactor ħ/(2mγλ²) multiplying ∇̃² in the atomic kinetic term.
    pub fn recoil_per_area(&self) -> f64 {
        self.recoil / (self.kappa() * self.kappa())
    }

    /// Recoil velocity as a fraction of c, v_rec/c = ħk/(mc).
    pub fn v_rec_over_c(&self) -> f64 {
        2.0 * self.recoil / (self.kappa() * self.c_scale)
    }

    /// Photon kinetic prefactor c²/(ωγλ²) multiplying ζ_c∇̃ζ_c terms.
    pub fn photon_kinetic(&self) -> f64 {
        self.c_scale / self.kappa()
    }

    /// Optical frequency ω/γ = kλ · c/(γλ).
    pub fn optical_frequency(&self) -> f64 {
        self.kappa() * self.c_scale
    }
}

/// Per-node mixing parameters derived from a pair of control fields.
///
/// ζ₁, ζ_c, Ω_c and Ξ are real (zero condensate phase); ξ_c2, ξ_c3 carry the
/// control phases. Nodes where Ω_c vanishes exactly take the convention
/// ξ_c2 = 1, ξ_c3 = 0 and are flagged in `zero_control`.
#[derive(Debug, Clone)]
pub struct MixingParams {
    grid: GridSpec,
    pub xi_c2: Vec<Complex64>,
    pub xi_c3: Vec<Complex64>,
    /// Total control Rabi frequency Ω_c per node.
    pub omega_c: Vec<f64>,
    /// Ξ = √(Ω_c² + g²n) per node.
    pub coupling_scale: Vec<f64>,
    pub zeta_1: Vec<f64>,
    pub zeta_c: Vec<f64>,
    pub zero_control: Vec<bool>,
}

impl MixingParams {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn zero_control_count(&self) -> usize {
        self.zero_control.iter().filter(|&&b| b).count()
    }
}

/// Compute the mixing parameters for control fields on a shared grid.
pub fn mixing_params(
    omega_c2: &ComplexField2D,
    omega_c3: &ComplexField2D,
    medium: &MediumParams,
) -> Result<MixingParams> {
    medium.validate()?;
    if omega_c2.grid() != omega_c3.grid() {
        return Err(Error::GridMismatch(
            "control fields on different grids".into(),
        ));
    }
    let grid = omega_c2.grid().clone();
    let len = grid.len();
    let g2n = medium.g_sqrt_n * medium.g_sqrt_n;

    let mut xi_c2 = Vec::with_capacity(len);
    let mut xi_c3 = Vec::with_capacity(len);
    let mut omega_c = Vec::with_capacity(len);
    let mut coupling_scale = Vec::with_capacity(len);
    let mut zeta_1 = Vec::with_capacity(len);
    let mut zeta_c = Vec::with_capacity(len);
    let mut zero_control = Vec::with_capacity(len);

    for (&w2, &w3) in omega_c2.values().iter().zip(omega_c3.values()) {
        let oc = (w2.norm_sqr() + w3.norm_sqr()).sqrt();
        let xi = (oc * oc + g2n).sqrt();
        if oc == 0.0 {
            xi_c2.push(Complex64::new(1.0, 0.0));
            xi_c3.push(Complex64::ZERO);
            zero_control.push(true);
        } else {
            xi_c2.push(w2 / oc);
            xi_c3.push(w3 / oc);
            zero_control.push(false);
        }
        omega_c.push(oc);
        coupling_scale.push(xi);
        zeta_1.push(medium.g_sqrt_n / xi);
        zeta_c.push(oc / xi);
    }

    Ok(MixingParams {
        grid,
        xi_c2,
        xi_c3,
        omega_c,
        coupling_scale,
        zeta_1,
        zeta_c,
        zero_control,
    })
}

/// The bare probe and atomic coherence fields.
#[derive(Debug, Clone)]
pub struct BareState {
    pub probe: ComplexField2D,
    pub phi2: ComplexField2D,
    pub phi3: ComplexField2D,
}

/// The polariton triple: two dark components and the bright one.
#[derive(Debug, Clone)]
pub struct PolaritonState {
    pub d1: ComplexField2D,
    pub d2: ComplexField2D,
    pub bright: ComplexField2D,
}

impl PolaritonState {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            d1: ComplexField2D::zeros(grid),
            d2: ComplexField2D::zeros(grid),
            bright: ComplexField2D::zeros(grid),
        }
    }
}

fn check_grid(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(
            "state and mixing parameters on different grids".into(),
        ));
    }
    Ok(())
}

/// Rotate bare fields into polaritons:
/// Φ_B = ζ_c(ξ_c2Φ₂ + ξ_c3Φ₃) + ζ₁ℰ,
/// Φ_D1 = ζ_cℰ − ζ₁(ξ_c2Φ₂ + ξ_c3Φ₃),
/// Φ_D2 = ξ_c3*Φ₂ − ξ_c2*Φ₃.
pub fn to_polaritons(bare: &BareState, mix: &MixingParams) -> Result<PolaritonState> {
    check_grid(bare.probe.grid(), mix.grid())?;
    check_grid(bare.phi2.grid(), mix.grid())?;
    check_grid(bare.phi3.grid(), mix.grid())?;

    let len = mix.grid().len();
    let mut d1 = Vec::with_capacity(len);
    let mut d2 = Vec::with_capacity(len);
    let mut bright = Vec::with_capacity(len);
    for i in 0..len {
        let e = bare.probe.values()[i];
        let p2 = bare.phi2.values()[i];
        let p3 = bare.phi3.values()[i];
        let lam_bright = mix.xi_c2[i] * p2 + mix.xi_c3[i] * p3;
        bright.push(mix.zeta_c[i] * lam_bright + mix.zeta_1[i] * e);
        d1.push(mix.zeta_c[i] * e - mix.zeta_1[i] * lam_bright);
        d2.push(mix.xi_c3[i].conj() * p2 - mix.xi_c2[i].conj() * p3);
    }
    Ok(PolaritonState {
        d1: ComplexField2D::from_values(mix.grid(), d1)?,
        d2: ComplexField2D::from_values(mix.grid(), d2)?,
        bright: ComplexField2D::from_values(mix.grid(), bright)?,
    })
}

/// Inverse rotation:
/// Φ₂ = ξ_c2*(ζ_cΦ_B − ζ₁Φ_D1) + ξ_c3Φ_D2,
/// Φ₃ = ξ_c3*(ζ_cΦ_B − ζ₁Φ_D1) − ξ_c2Φ_D2,
/// ℰ = ζ₁Φ_B + ζ_cΦ_D1.
pub fn from_polaritons(pol: &PolaritonState, mix: &MixingParams) -> Result<BareState> {
    check_grid(pol.d1.grid(), mix.grid())?;
    check_grid(pol.d2.grid(), mix.grid())?;
    check_grid(pol.bright.grid(), mix.grid())?;

    let len = mix.grid().len();
    let mut probe = Vec::with_capacity(len);
    let mut phi2 = Vec::with_capacity(len);
    let mut phi3 = Vec::with_capacity(len);
    for i in 0..len {
        let b = pol.bright.values()[i];
        let d1 = pol.d1.values()[i];
        let d2 = pol.d2.values()[i];
        let lam_bright = mix.zeta_c[i] * b - mix.zeta_1[i] * d1;
        phi2.push(mix.xi_c2[i].conj() * lam_bright + mix.xi_c3[i] * d2);
        phi3.push(mix.xi_c3[i].conj() * lam_bright - mix.xi_c2[i] * d2);
        probe.push(mix.zeta_1[i] * b + mix.zeta_c[i] * d1);
    }
    Ok(BareState {
        probe: ComplexField2D::from_values(mix.grid(), probe)?,
        phi2: ComplexField2D::from_values(mix.grid(), phi2)?,
        phi3: ComplexField2D::from_values(mix.grid(), phi3)?,
    })
}

/// Radiative group velocity of the first dark polariton as a fraction of c:
/// v_rad/c = Ω_c²/(Ω_c² + g²n) = ζ_c².
pub fn radiative_velocity(mix: &MixingParams) -> RealField2D {
    RealField2D::from_values(mix.grid(), mix.zeta_c.iter().map(|z| z * z).collect())
        .expect("mixing vectors match their grid")
}

/// Effective mass of the first dark polariton in units of the atomic mass:
/// m/m_D1 = (c/v_rec)ζ_c² + ζ₁², so m_D1 → m_rad = m·v_rec/v_rad deep in the
/// slow-light regime.
pub fn effective_mass_d1(mix: &MixingParams, medium: &MediumParams) -> Result<RealField2D> {
    let v_rec = medium.v_rec_over_c();
    if !(v_rec > 0.0) {
        return Err(Error::InvalidArgument(
            "effective mass needs a positive recoil frequency".into(),
        ));
    }
    let c_over_vrec = 1.0 / v_rec;
    RealField2D::from_values(
        mix.grid(),
        mix.zeta_c
            .iter()
            .zip(&mix.zeta_1)
            .map(|(zc, z1)| 1.0 / (c_over_vrec * zc * zc + z1 * z1))
            .collect(),
    )
}

#[derive(Debug, Clone)]
pub struct GroupVelocity {
    /// v_g1/c per node.
    pub v_over_c: RealField2D,
    /// True when the two-photon recoil correction stays below 1e-3·v_rad
    /// everywhere, so v_g1 ≈ v_rad.
    pub recoil_negligible: bool,
}

/// Group velocity of the first dark polariton:
/// v_g1 = v_rad + (ħ(k−k_c)/m)|ζ₁|².
pub fn group_velocity_d1(mix: &MixingParams, medium: &MediumParams) -> GroupVelocity {
    let recoil_term = medium.v_rec_over_c() * (1.0 - medium.k_c / medium.k);
    let mut negligible = true;
    let values = mix
        .zeta_c
        .iter()
        .zip(&mix.zeta_1)
        .map(|(zc, z1)| {
            let v_rad = zc * zc;
            let correction = recoil_term * z1 * z1;
            if correction.abs() > 1e-3 * v_rad {
                negligible = false;
            }
            v_rad + correction
        })
        .collect();
    GroupVelocity {
        v_over_c: RealField2D::from_values(mix.grid(), values)
            .expect("mixing vectors match their grid"),
        recoil_negligible: negligible,
    }
}

/// Coefficient of −∇̃² in the dimensionless equation for Φ_D1:
/// β₁ = (c/(γλ)/(2kλ))ζ_c² + (ω_rec/(kλ)²)ζ₁², i.e. ħ/(2m_D1) in grid units.
pub fn kinetic_coeff_d1(mix: &MixingParams, medium: &MediumParams) -> RealField2D {
    let photon = 0.5 * medium.photon_kinetic();
    let atom = medium.recoil_per_area();
    RealField2D::from_values(
        mix.grid(),
        mix.zeta_c
            .iter()
            .zip(&mix.zeta_1)
            .map(|(zc, z1)| photon * zc * zc + atom * z1 * z1)
            .collect(),
    )
    .expect("mixing vectors match their grid")
}

/// Coefficient of −∇̃² for the trapped polariton Φ_D2 (pure atomic recoil).
pub fn kinetic_coeff_d2(medium: &MediumParams) -> f64 {
    medium.recoil_per_area()
}
