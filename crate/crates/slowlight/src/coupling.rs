//! Vector and scalar potentials coupling the two dark polaritons.
//!
//! Written as a column Φ = (Φ_D1, Φ_D2)ᵀ, the dark-sector equation of motion
//! is
//!
//! ```text
//! i ∂_t Φ = [ -(β₁,β₂)·∇̃²  +  i J̃·∇̃  +  Ũ ] Φ
//! ```
//!
//! with a complex 2×2 vector potential J̃ and scalar potential Ũ built from
//! gradients and time derivatives of the mixing parameters. Two variants are
//! assembled: the full (non-paraxial) form, and the paraxial form for the
//! slowly varying amplitudes of co-propagating beams, where the carrier
//! phases e^{±ikz}, e^{ik_cz} have been absorbed. Both are evaluated on a
//! transverse slab: the control envelopes are constant across a slab, so all
//! z-derivatives of the slowly varying profiles vanish and z enters only
//! through the explicit phase factors, supplied as a scalar parameter.
//!
//! Everything is dimensionless: frequencies in γ, lengths in λ (see the
//! crate docs). Despite the complex potentials, the continuous evolution is
//! Hermitian for real trapping potentials, so it preserves the norm of the
//! column — the propagator tests check this discretely.
//!
//! J₂₁ = J₁₂* in both variants; the paraxial carrier-phase relations fix
//! the conjugate pairing, and the finite-difference oracle transcribes J₂₁
//! independently as a cross-check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, GridSpec};
use crate::mixing::{group_velocity_d1, mixing_params, MediumParams, MixingParams};

/// Tolerance below which the decoupling diagnostics call the polariton pair
/// decoupled.
pub const DECOUPLING_TOLERANCE: f64 = 1e-2;

/// A piecewise-smooth temporal envelope with values in [0, 1] and an
/// analytic derivative. Switching transients feed the polariton coupling
/// terms directly, so the derivative is exact rather than differenced.
#[derive(Debug, Clone, PartialEq)]
pub enum Envelope {
    Constant(f64),
    /// C¹ smoothstep ramp from `from` at `t_start` to `to` at `t_end`.
    Smoothstep {
        t_start: f64,
        t_end: f64,
        from: f64,
        to: f64,
    },
    /// Integer power of another envelope; `f` and `f²` switched together are
    /// the canonical mismatched pair.
    Power {
        base: Box<Envelope>,
        exponent: u32,
    },
}

impl Envelope {
    pub fn validate(&self) -> Result<()> {
        match self {
            Envelope::Constant(c) => {
                if !(0.0..=1.0).contains(c) {
                    return Err(Error::InvalidArgument(format!(
                        "envelope value {c} outside [0, 1]"
                    )));
                }
            }
            Envelope::Smoothstep {
                t_start,
                t_end,
                from,
                to,
            } => {
                if !(t_end > t_start) {
                    return Err(Error::InvalidArgument(
                        "smoothstep needs t_end > t_start".into(),
                    ));
                }
                for v in [from, to] {
                    if !(0.0..=1.0).contains(v) {
                        return Err(Error::InvalidArgument(format!(
                            "envelope value {v} outside [0, 1]"
                        )));
                    }
                }
            }
            Envelope::Power { base, exponent } => {
                if *exponent == 0 {
                    return Err(Error::InvalidArgument(
                        "envelope power must be at least 1".into(),
                    ));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Envelope::Constant(c) => *c,
            Envelope::Smoothstep {
                t_start,
                t_end,
                from,
                to,
            } => {
                let u = ((t - t_start) / (t_end - t_start)).clamp(0.0, 1.0);
                let s = u * u * (3.0 - 2.0 * u);
                from + (to - from) * s
            }
            Envelope::Power { base, exponent } => base.value(t).powi(*exponent as i32),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Envelope::Constant(_) => 0.0,
            Envelope::Smoothstep {
                t_start,
                t_end,
                from,
                to,
            } => {
                let u = (t - t_start) / (t_end - t_start);
                if !(0.0..=1.0).contains(&u) {
                    return 0.0;
                }
                (to - from) * 6.0 * u * (1.0 - u) / (t_end - t_start)
            }
            Envelope::Power { base, exponent } => {
                let p = *exponent as i32;
                p as f64 * base.value(t).powi(p - 1) * base.derivative(t)
            }
        }
    }

    fn push_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Envelope::Constant(_) => {}
            Envelope::Smoothstep { t_start, t_end, .. } => {
                out.push(*t_start);
                out.push(*t_end);
            }
            Envelope::Power { base, .. } => base.push_breakpoints(out),
        }
    }
}

/// The two control fields: slowly varying transverse profiles times
/// temporal envelopes.
#[derive(Debug, Clone)]
pub struct ControlPair {
    pub profile_c2: ComplexField2D,
    pub profile_c3: ComplexField2D,
    pub envelope_c2: Envelope,
    pub envelope_c3: Envelope,
}

impl ControlPair {
    pub fn new(
        profile_c2: ComplexField2D,
        profile_c3: ComplexField2D,
        envelope_c2: Envelope,
        envelope_c3: Envelope,
    ) -> Result<Self> {
        if profile_c2.grid() != profile_c3.grid() {
            return Err(Error::GridMismatch(
                "control profiles on different grids".into(),
            ));
        }
        envelope_c2.validate()?;
        envelope_c3.validate()?;
        Ok(Self {
            profile_c2,
            profile_c3,
            envelope_c2,
            envelope_c3,
        })
    }

    /// Both controls sharing one envelope (the decoupling-friendly choice).
    pub fn shared(
        profile_c2: ComplexField2D,
        profile_c3: ComplexField2D,
        envelope: Envelope,
    ) -> Result<Self> {
        Self::new(profile_c2, profile_c3, envelope.clone(), envelope)
    }

    pub fn grid(&self) -> &GridSpec {
        self.profile_c2.grid()
    }

    /// Control fields at time t.
    pub fn at(&self, t: f64) -> (ComplexField2D, ComplexField2D) {
        let f2 = self.envelope_c2.value(t);
        let f3 = self.envelope_c3.value(t);
        (
            self.profile_c2.scaled(Complex64::new(f2, 0.0)),
            self.profile_c3.scaled(Complex64::new(f3, 0.0)),
        )
    }

    /// Times bracketing all envelope switching, padded by 10%.
    pub fn switching_window(&self) -> (f64, f64) {
        let mut bps = Vec::new();
        self.envelope_c2.push_breakpoints(&mut bps);
        self.envelope_c3.push_breakpoints(&mut bps);
        if bps.is_empty() {
            return (0.0, 1.0);
        }
        let lo = bps.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = bps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.1 * (hi - lo).max(1.0);
        (lo - pad, hi + pad)
    }

    /// Whether the two envelopes have the same temporal shape, i.e. the
    /// Wronskian f₂ḟ₃ − f₃ḟ₂ vanishes identically. Proportional envelopes
    /// pass; then the temporal off-diagonal coupling is exactly zero.
    pub fn shared_envelope(&self) -> bool {
        if self.envelope_c2 == self.envelope_c3 {
            return true;
        }
        let (lo, hi) = self.switching_window();
        let samples = 401;
        let mut max_w = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..samples {
            let t = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            let f2 = self.envelope_c2.value(t);
            let f3 = self.envelope_c3.value(t);
            let d2 = self.envelope_c2.derivative(t);
            let d3 = self.envelope_c3.derivative(t);
            max_w = max_w.max((f2 * d3 - f3 * d2).abs());
            scale = scale.max((f2 * d3).abs() + (f3 * d2).abs());
        }
        max_w <= 1e-12 * scale.max(1e-300)
    }

    /// Time of maximum combined envelope strength, used to probe the
    /// plateau configuration.
    pub fn plateau_time(&self) -> f64 {
        let (lo, hi) = self.switching_window();
        let samples = 401;
        let mut best_t = lo;
        let mut best = f64::NEG_INFINITY;
        for i in 0..samples {
            let t = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            let s = self.envelope_c2.value(t).powi(2) + self.envelope_c3.value(t).powi(2);
            if s > best {
                best = s;
                best_t = t;
            }
        }
        best_t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixVariant {
    Full,
    Paraxial,
}

/// The assembled 2×2 matrices: two transverse components per J entry and the
/// four scalar entries of U. Entries are stored per grid node.
#[derive(Debug, Clone)]
pub struct CouplingMatrices {
    pub variant: MatrixVariant,
    pub j11_x: ComplexField2D,
    pub j11_y: ComplexField2D,
    pub j22_x: ComplexField2D,
    pub j22_y: ComplexField2D,
    pub j12_x: ComplexField2D,
    pub j12_y: ComplexField2D,
    pub j21_x: ComplexField2D,
    pub j21_y: ComplexField2D,
    pub u11: ComplexField2D,
    pub u22: ComplexField2D,
    pub u12: ComplexField2D,
    pub u21: ComplexField2D,
}

impl CouplingMatrices {
    pub fn grid(&self) -> &GridSpec {
        self.u11.grid()
    }

    pub fn max_abs_offdiagonal_u(&self) -> f64 {
        self.u12.max_abs().max(self.u21.max_abs())
    }

    pub fn max_abs_offdiagonal_j(&self) -> f64 {
        self.j12_x
            .max_abs()
            .max(self.j12_y.max_abs())
            .max(self.j21_x.max_abs())
            .max(self.j21_y.max_abs())
    }
}

/// Time derivatives of the mixing parameters, obtained analytically from the
/// envelope derivatives. Nodes with Ω_c = 0 keep the frozen convention and
/// zero derivatives.
struct MixingRates {
    dxi_c2: Vec<Complex64>,
    dxi_c3: Vec<Complex64>,
    dzeta_c: Vec<f64>,
    dzeta_1: Vec<f64>,
}

fn mixing_rates(
    controls: &ControlPair,
    mix: &MixingParams,
    medium: &MediumParams,
    t: f64,
) -> MixingRates {
    let len = mix.grid().len();
    let f2 = controls.envelope_c2.value(t);
    let f3 = controls.envelope_c3.value(t);
    let df2 = controls.envelope_c2.derivative(t);
    let df3 = controls.envelope_c3.derivative(t);
    let g2n = medium.g_sqrt_n * medium.g_sqrt_n;

    let mut rates = MixingRates {
        dxi_c2: vec![Complex64::ZERO; len],
        dxi_c3: vec![Complex64::ZERO; len],
        dzeta_c: vec![0.0; len],
        dzeta_1: vec![0.0; len],
    };
    for i in 0..len {
        let oc = mix.omega_c[i];
        if oc == 0.0 {
            continue;
        }
        let p2 = controls.profile_c2.values()[i];
        let p3 = controls.profile_c3.values()[i];
        let doc = (p2.norm_sqr() * f2 * df2 + p3.norm_sqr() * f3 * df3) / oc;
        rates.dxi_c2[i] = p2 * ((df2 * oc - f2 * doc) / (oc * oc));
        rates.dxi_c3[i] = p3 * ((df3 * oc - f3 * doc) / (oc * oc));
        let xi = mix.coupling_scale[i];
        rates.dzeta_c[i] = doc * g2n / (xi * xi * xi);
        rates.dzeta_1[i] = -medium.g_sqrt_n * oc * doc / (xi * xi * xi);
    }
    rates
}

/// Paraxial matrices J′, U′ for the slowly varying polariton amplitudes, at
/// time `t` and slab coordinate `z`.
pub fn assemble_paraxial_matrices(
    controls: &ControlPair,
    mix: &MixingParams,
    medium: &MediumParams,
    t: f64,
    z: f64,
) -> Result<CouplingMatrices> {
    assemble(controls, mix, medium, t, z, MatrixVariant::Paraxial)
}

/// Full (non-paraxial) matrices J, U at time `t` and slab coordinate `z`.
pub fn assemble_full_matrices(
    controls: &ControlPair,
    mix: &MixingParams,
    medium: &MediumParams,
    t: f64,
    z: f64,
) -> Result<CouplingMatrices> {
    assemble(controls, mix, medium, t, z, MatrixVariant::Full)
}

fn assemble(
    controls: &ControlPair,
    mix: &MixingParams,
    medium: &MediumParams,
    t: f64,
    z: f64,
    variant: MatrixVariant,
) -> Result<CouplingMatrices> {
    medium.validate()?;
    if controls.grid() != mix.grid() {
        return Err(Error::GridMismatch(
            "controls and mixing parameters on different grids".into(),
        ));
    }
    let grid = mix.grid().clone();
    let len = grid.len();

    let kappa = medium.kappa();
    let kappa_c = medium.kappa_c();
    let rc = medium.recoil_per_area(); // ħ/(2mγλ²)
    let crad = medium.photon_kinetic(); // c²/(ωγλ²)
    let i_unit = Complex64::new(0.0, 1.0);

    // Off-diagonal carrier phase: e^{i(k_c-k)z} for the paraxial variant,
    // e^{2ik_cz} for the full one (ξ = ξ′e^{ik_cz} enters products twice).
    let phase = match variant {
        MatrixVariant::Paraxial => Complex64::new(0.0, (kappa_c - kappa) * z).exp(),
        MatrixVariant::Full => Complex64::new(0.0, 2.0 * kappa_c * z).exp(),
    };

    let xi2 = ComplexField2D::from_values(&grid, mix.xi_c2.clone())?;
    let xi3 = ComplexField2D::from_values(&grid, mix.xi_c3.clone())?;
    let zc = ComplexField2D::from_values(
        &grid,
        mix.zeta_c.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    )?;
    let z1 = ComplexField2D::from_values(
        &grid,
        mix.zeta_1.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    )?;

    let (gx_xi2, gy_xi2) = xi2.gradient();
    let (gx_xi3, gy_xi3) = xi3.gradient();
    let (gx_zc, gy_zc) = zc.gradient();
    let (gx_z1, gy_z1) = z1.gradient();
    let lap_xi2 = xi2.laplacian();
    let lap_xi3 = xi3.laplacian();
    let lap_zc = zc.laplacian();
    let lap_z1 = z1.laplacian();

    let rates = mixing_rates(controls, mix, medium, t);

    let (v2, v3): (Option<&[f64]>, Option<&[f64]>) = match &medium.potentials {
        Some(p) => {
            if p.v2.grid() != &grid || p.v3.grid() != &grid {
                return Err(Error::GridMismatch(
                    "trapping potentials on a different grid".into(),
                ));
            }
            (Some(p.v2.values()), Some(p.v3.values()))
        }
        None => (None, None),
    };

    let mut j11_x = vec![Complex64::ZERO; len];
    let mut j11_y = vec![Complex64::ZERO; len];
    let mut j22_x = vec![Complex64::ZERO; len];
    let mut j22_y = vec![Complex64::ZERO; len];
    let mut j12_x = vec![Complex64::ZERO; len];
    let mut j12_y = vec![Complex64::ZERO; len];
    let mut u11 = vec![Complex64::ZERO; len];
    let mut u22 = vec![Complex64::ZERO; len];
    let mut u12 = vec![Complex64::ZERO; len];
    let mut u21 = vec![Complex64::ZERO; len];

    for i in 0..len {
        let x2 = xi2.values()[i];
        let x3 = xi3.values()[i];
        let zc_v = mix.zeta_c[i];
        let z1_v = mix.zeta_1[i];
        let z1_sq = z1_v * z1_v;
        let dx2 = rates.dxi_c2[i];
        let dx3 = rates.dxi_c3[i];
        let w21 = medium.omega21 + v2.map_or(0.0, |v| v[i]);
        let w31 = medium.omega31 + v3.map_or(0.0, |v| v[i]);
        let w32 = medium.omega32() + v3.map_or(0.0, |v| v[i]) - v2.map_or(0.0, |v| v[i]);

        // J_B2 = i(ħ/m)(ξ_c2∇ξ_c2* + ξ_c3∇ξ_c3*)
        let jb2_x =
            i_unit * 2.0 * rc * (x2 * gx_xi2.values()[i].conj() + x3 * gx_xi3.values()[i].conj());
        let jb2_y =
            i_unit * 2.0 * rc * (x2 * gy_xi2.values()[i].conj() + x3 * gy_xi3.values()[i].conj());

        j11_x[i] = i_unit * (crad * zc_v * gx_zc.values()[i] + 2.0 * rc * z1_v * gx_z1.values()[i])
            + z1_sq * jb2_x;
        j11_y[i] = i_unit * (crad * zc_v * gy_zc.values()[i] + 2.0 * rc * z1_v * gy_z1.values()[i])
            + z1_sq * jb2_y;

        j22_x[i] =
            i_unit * 2.0 * rc * (x3.conj() * gx_xi3.values()[i] + x2.conj() * gx_xi2.values()[i]);
        j22_y[i] =
            i_unit * 2.0 * rc * (x3.conj() * gy_xi3.values()[i] + x2.conj() * gy_xi2.values()[i]);

        j12_x[i] =
            i_unit * 2.0 * rc * z1_v * phase * (x3 * gx_xi2.values()[i] - x2 * gx_xi3.values()[i]);
        j12_y[i] =
            i_unit * 2.0 * rc * z1_v * phase * (x3 * gy_xi2.values()[i] - x2 * gy_xi3.values()[i]);

        // U_B2: kinetic + potential + temporal parts of the Λ-subsystem
        // bright state.
        let ub2 = -rc * (x2 * lap_xi2.values()[i].conj() + x3 * lap_xi3.values()[i].conj())
            + w21 * x2.norm_sqr()
            + w31 * x3.norm_sqr()
            + i_unit * (x2.conj() * dx2 + x3.conj() * dx3);

        let u11_bracket = match variant {
            MatrixVariant::Paraxial => ub2 + rc * (kappa - kappa_c) * (kappa - kappa_c),
            MatrixVariant::Full => ub2,
        };
        let u11_extra = match variant {
            MatrixVariant::Paraxial => Complex64::ZERO,
            MatrixVariant::Full => {
                Complex64::new(-0.5 * medium.optical_frequency() * zc_v * zc_v, 0.0)
            }
        };
        u11[i] = -0.5 * (crad * zc_v * lap_zc.values()[i] + 2.0 * rc * z1_v * lap_z1.values()[i])
            + i_unit * z1_v * (gx_z1.values()[i] * jb2_x + gy_z1.values()[i] * jb2_y)
            + z1_sq * u11_bracket
            + u11_extra
            + i_unit * (zc_v * rates.dzeta_c[i] + z1_v * rates.dzeta_1[i]);

        // U22 pairs the potentials crosswise: the second dark polariton
        // populates state 2 with weight |ξ_c3|² and state 3 with |ξ_c2|².
        u22[i] = -rc * (x3.conj() * lap_xi3.values()[i] + x2.conj() * lap_xi2.values()[i])
            + w21 * x3.norm_sqr()
            + w31 * x2.norm_sqr()
            + i_unit * (x3 * dx3.conj() + x2 * dx2.conj());

        u12[i] = phase
            * z1_v
            * (-rc * (x3 * lap_xi2.values()[i] - x2 * lap_xi3.values()[i])
                + x2 * x3 * w32
                + i_unit * (x2 * dx3 - x3 * dx2));

        // U21 = conjugate structure of U12 plus the i(1/ζ₁)∇ζ₁·J21 term.
        let j21_x = j12_x[i].conj();
        let j21_y = j12_y[i].conj();
        u21[i] = phase.conj()
            * z1_v
            * (-rc
                * (x2.conj() * lap_xi3.values()[i].conj()
                    - x3.conj() * lap_xi2.values()[i].conj())
                + x2.conj() * x3.conj() * w32
                + i_unit * (x3.conj() * dx2.conj() - x2.conj() * dx3.conj()))
            + i_unit / z1_v * (gx_z1.values()[i] * j21_x + gy_z1.values()[i] * j21_y);
    }

    let j21_x: Vec<Complex64> = j12_x.iter().map(|v| v.conj()).collect();
    let j21_y: Vec<Complex64> = j12_y.iter().map(|v| v.conj()).collect();

    Ok(CouplingMatrices {
        variant,
        j11_x: ComplexField2D::from_values(&grid, j11_x)?,
        j11_y: ComplexField2D::from_values(&grid, j11_y)?,
        j22_x: ComplexField2D::from_values(&grid, j22_x)?,
        j22_y: ComplexField2D::from_values(&grid, j22_y)?,
        j12_x: ComplexField2D::from_values(&grid, j12_x)?,
        j12_y: ComplexField2D::from_values(&grid, j12_y)?,
        j21_x: ComplexField2D::from_values(&grid, j21_x)?,
        j21_y: ComplexField2D::from_values(&grid, j21_y)?,
        u11: ComplexField2D::from_values(&grid, u11)?,
        u22: ComplexField2D::from_values(&grid, u22)?,
        u12: ComplexField2D::from_values(&grid, u12)?,
        u21: ComplexField2D::from_values(&grid, u21)?,
    })
}

/// Diagnostics for the "can the pair be treated as decoupled?" question.
#[derive(Debug, Clone)]
pub struct DecouplingReport {
    /// Both controls switch with the same temporal shape, so the temporal
    /// off-diagonal coupling vanishes identically.
    pub shared_envelope: bool,
    /// ω_rec · τ_pulse with τ_pulse = pulse length / v_g1.
    pub recoil_time_product: f64,
    /// Largest spatial off-diagonal potential relative to the diagonal scale
    /// (floored at the recoil energy, the natural size of these terms).
    pub spatial_offdiag_ratio: f64,
    pub max_offdiag_u: f64,
    pub max_offdiag_j: f64,
    pub decoupled: bool,
}

/// Evaluate the decoupling conditions at the controls' plateau.
/// `pulse_length` is the probe pulse length inside the medium, in λ.
pub fn decoupling_report(
    controls: &ControlPair,
    medium: &MediumParams,
    pulse_length: f64,
) -> Result<DecouplingReport> {
    if !(pulse_length > 0.0) {
        return Err(Error::InvalidArgument(
            "pulse length must be positive".into(),
        ));
    }
    let t_star = controls.plateau_time();
    let (c2, c3) = controls.at(t_star);
    let mix = mixing_params(&c2, &c3, medium)?;

    // transit time taken at the strongest-control node
    let gv = group_velocity_d1(&mix, medium);
    let peak_node = mix
        .omega_c
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let v_units = gv.v_over_c.values()[peak_node] * medium.c_scale;
    let tau = if v_units > 0.0 {
        pulse_length / v_units
    } else {
        f64::INFINITY
    };
    let recoil_time_product = medium.recoil * tau;

    let matrices = assemble_paraxial_matrices(controls, &mix, medium, t_star, 0.0)?;
    let max_offdiag_u = matrices.max_abs_offdiagonal_u();
    let max_offdiag_j = matrices.max_abs_offdiagonal_j();
    let diag_scale = matrices
        .u11
        .max_abs()
        .max(matrices.u22.max_abs())
        .max(medium.recoil);
    let spatial_offdiag_ratio = max_offdiag_u / diag_scale;

    let shared = controls.shared_envelope();
    Ok(DecouplingReport {
        shared_envelope: shared,
        recoil_time_product,
        spatial_offdiag_ratio,
        max_offdiag_u,
        max_offdiag_j,
        decoupled: shared
            && recoil_time_product < DECOUPLING_TOLERANCE
            && spatial_offdiag_ratio < DECOUPLING_TOLERANCE,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct AdiabaticityReport {
    /// L / (v_rad γ⁻¹ Ω_c² τ²); well below one means lossless propagation.
    pub loss_ratio: f64,
    /// Polariton lifetime γ⁻¹(Ω_c τ)², in 1/γ.
    pub polariton_lifetime: f64,
}

/// Loss diagnostic for a sample of length `sample_length` (λ) traversed by a
/// pulse of duration `pulse_duration` (1/γ) under total control Rabi
/// frequency `omega_c` (γ).
pub fn adiabaticity_check(
    medium: &MediumParams,
    omega_c: f64,
    pulse_duration: f64,
    sample_length: f64,
) -> Result<AdiabaticityReport> {
    medium.validate()?;
    if !(omega_c > 0.0) || !(pulse_duration > 0.0) || !(sample_length > 0.0) {
        return Err(Error::InvalidArgument(
            "adiabaticity check needs positive Ω_c, pulse duration and length".into(),
        ));
    }
    if !(medium.gamma > 0.0) {
        return Err(Error::InvalidArgument(
            "adiabaticity check needs a positive decay rate".into(),
        ));
    }
    let g2n = medium.g_sqrt_n * medium.g_sqrt_n;
    let v_rad_frac = omega_c * omega_c / (omega_c * omega_c + g2n);
    let v_units = v_rad_frac * medium.c_scale;
    let loss_ratio = sample_length
        / (v_units * (1.0 / medium.gamma) * omega_c * omega_c * pulse_duration * pulse_duration);
    let polariton_lifetime = (omega_c * pulse_duration).powi(2) / medium.gamma;
    Ok(AdiabaticityReport {
        loss_ratio,
        polariton_lifetime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::reference;

    fn grid() -> GridSpec {
        GridSpec::new(64, 20.0).unwrap()
    }

    fn medium() -> MediumParams {
        MediumParams {
            g_sqrt_n: 10.0,
            recoil: 1e-3,
            c_scale: 1e4,
            ..MediumParams::default()
        }
    }

    fn static_pair(grid: &GridSpec, c2: ComplexField2D, c3: ComplexField2D) -> ControlPair {
        let _ = grid;
        ControlPair::shared(c2, c3, Envelope::Constant(1.0)).unwrap()
    }

    #[test]
    fn envelope_shapes() {
        let e = Envelope::Smoothstep {
            t_start: 0.0,
            t_end: 2.0,
            from: 0.0,
            to: 1.0,
        };
        assert_eq!(e.value(-1.0), 0.0);
        assert_eq!(e.value(3.0), 1.0);
        assert!((e.value(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(e.derivative(-1.0), 0.0);
        assert_eq!(e.derivative(3.0), 0.0);
        // peak slope at the midpoint: 1.5/(t_end-t_start)
        assert!((e.derivative(1.0) - 0.75).abs() < 1e-15);

        let sq = Envelope::Power {
            base: Box::new(e.clone()),
            exponent: 2,
        };
        assert!((sq.value(1.0) - 0.25).abs() < 1e-15);
        assert!((sq.derivative(1.0) - 2.0 * 0.5 * 0.75).abs() < 1e-15);
    }

    #[test]
    fn shared_envelope_detection() {
        let g = grid();
        let p2 = ComplexField2D::constant(&g, Complex64::new(1.0, 0.0));
        let p3 = ComplexField2D::constant(&g, Complex64::new(0.5, 0.0));
        let ramp = Envelope::Smoothstep {
            t_start: 0.0,
            t_end: 5.0,
            from: 0.2,
            to: 1.0,
        };
        let pair = ControlPair::shared(p2.clone(), p3.clone(), ramp.clone()).unwrap();
        assert!(pair.shared_envelope());

        let mismatched = ControlPair::new(
            p2,
            p3,
            ramp.clone(),
            Envelope::Power {
                base: Box::new(ramp),
                exponent: 2,
            },
        )
        .unwrap();
        assert!(!mismatched.shared_envelope());
    }

    #[test]
    fn uniform_static_controls_leave_only_the_recoil_constant() {
        let g = grid();
        let med = MediumParams {
            k_c: 0.8,
            ..medium()
        };
        let c2 = ComplexField2D::constant(&g, Complex64::new(2.0, 0.0));
        let c3 = ComplexField2D::constant(&g, Complex64::new(1.0, 0.0));
        let pair = static_pair(&g, c2.clone(), c3.clone());
        let mix = mixing_params(&c2, &c3, &med).unwrap();
        let m = assemble_paraxial_matrices(&pair, &mix, &med, 0.0, 0.0).unwrap();

        for f in [
            &m.j11_x, &m.j11_y, &m.j22_x, &m.j22_y, &m.j12_x, &m.j12_y, &m.j21_x, &m.j21_y, &m.u22,
            &m.u12, &m.u21,
        ] {
            assert!(f.max_abs() < 1e-12, "expected zero matrix entry");
        }
        let want = mix.zeta_1[0]
            * mix.zeta_1[0]
            * med.recoil_per_area()
            * (med.kappa() - med.kappa_c()).powi(2);
        for v in m.u11.values() {
            assert!((v - Complex64::new(want, 0.0)).norm() < 1e-12 * want.abs().max(1e-12));
        }
    }

    #[test]
    fn uniform_static_controls_full_variant_keeps_only_the_optical_term() {
        let g = grid();
        let med = medium();
        let c2 = ComplexField2D::constant(&g, Complex64::new(2.0, 0.0));
        let c3 = ComplexField2D::constant(&g, Complex64::new(1.0, 0.0));
        let pair = static_pair(&g, c2.clone(), c3.clone());
        let mix = mixing_params(&c2, &c3, &med).unwrap();
        let m = assemble_full_matrices(&pair, &mix, &med, 0.0, 0.0).unwrap();
        let want = -0.5 * med.optical_frequency() * mix.zeta_c[0] * mix.zeta_c[0];
        for v in m.u11.values() {
            assert!((v.re - want).abs() < 1e-12 * want.abs());
            assert!(v.im.abs() < 1e-12 * want.abs());
        }
        for f in [&m.u22, &m.u12, &m.u21, &m.j11_x, &m.j22_y] {
            assert!(f.max_abs() < 1e-12 * want.abs());
        }
    }

    #[test]
    fn shared_envelope_kills_temporal_offdiagonals_during_a_ramp() {
        let g = grid();
        let med = medium();
        let p2 = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new(1.0 + 0.1 * (0.3 * x).sin(), 0.05 * (0.2 * y).cos())
        });
        let p3 = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new(0.7 + 0.05 * (0.25 * y).cos(), 0.02 * (0.2 * x).sin())
        });
        let ramp = Envelope::Smoothstep {
            t_start: 0.0,
            t_end: 4.0,
            from: 1.0,
            to: 0.1,
        };
        let pair = ControlPair::shared(p2.clone(), p3.clone(), ramp).unwrap();
        let t_mid = 2.0;
        let (c2, c3) = pair.at(t_mid);
        let mix = mixing_params(&c2, &c3, &med).unwrap();
        // compare against the same configuration with frozen envelopes: the
        // U12/U21 difference is exactly the temporal term, which must vanish
        let ramped = assemble_paraxial_matrices(&pair, &mix, &med, t_mid, 0.0).unwrap();
        let frozen_pair =
            ControlPair::shared(c2.clone(), c3.clone(), Envelope::Constant(1.0)).unwrap();
        let frozen = assemble_paraxial_matrices(&frozen_pair, &mix, &med, 0.0, 0.0).unwrap();
        let scale = ramped.u12.max_abs().max(1e-30);
        for (a, b) in ramped.u12.values().iter().zip(frozen.u12.values()) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
        for (a, b) in ramped.u21.values().iter().zip(frozen.u21.values()) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn mismatched_envelopes_couple_during_a_ramp() {
        let g = grid();
        let med = medium();
        let p2 = ComplexField2D::constant(&g, Complex64::new(1.0, 0.0));
        let p3 = ComplexField2D::constant(&g, Complex64::new(0.8, 0.0));
        let ramp = Envelope::Smoothstep {
            t_start: 0.0,
            t_end: 4.0,
            from: 0.3,
            to: 1.0,
        };
        let pair = ControlPair::new(
            p2,
            p3,
            ramp.clone(),
            Envelope::Power {
                base: Box::new(ramp),
                exponent: 2,
            },
        )
        .unwrap();
        let t_mid = 2.0;
        let (c2, c3) = pair.at(t_mid);
        let mix = mixing_params(&c2, &c3, &med).unwrap();
        let m = assemble_paraxial_matrices(&pair, &mix, &med, t_mid, 0.0).unwrap();
        // uniform profiles: all gradients vanish, so U12 is purely temporal
        // and must match ζ₁(ξ_c2 ∂_tξ_c3 − ξ_c3 ∂_tξ_c2) directly.
        let f = pair.envelope_c2.value(t_mid);
        let df = pair.envelope_c2.derivative(t_mid);
        let (a2, a3) = (1.0, 0.8);
        let o2 = a2 * f;
        let o3 = a3 * f * f;
        let do2 = a2 * df;
        let do3 = a3 * 2.0 * f * df;
        let oc2 = o2 * o2 + o3 * o3;
        let wronskian = (o2 * do3 - o3 * do2) / oc2;
        let want = mix.zeta_1[0] * wronskian;
        assert!(m.u12.max_abs() > 1e-6);
        for v in m.u12.values() {
            assert!((v - Complex64::new(0.0, want)).norm() < 1e-12 * want.abs());
        }
    }

    #[test]
    fn vortex_controls_match_the_finite_difference_oracle() {
        // The auxiliary control keeps a floor everywhere, so the mixing
        // angles decay periodically at the seam, and the weak vortex widens
        // the core crossover to ~4λ, within reach of the stencil at this
        // resolution.
        let g = GridSpec::new(64, 16.0).unwrap();
        let med = MediumParams {
            omega21: 0.05,
            omega31: -0.08,
            k_c: 0.9,
            ..medium()
        };
        let sigma = 4.0;
        let c2 = ComplexField2D::from_fn(&g, |x, y| {
            let rho2 = x * x + y * y;
            Complex64::new(x, y).scale(0.25) * (-rho2 / (sigma * sigma)).exp()
        });
        let c3 = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new(0.8 * (-(x * x + y * y) / (sigma * sigma)).exp() + 0.2, 0.0)
        });
        let pair = ControlPair::shared(
            c2.clone(),
            c3.clone(),
            Envelope::Smoothstep {
                t_start: 0.0,
                t_end: 10.0,
                from: 1.0,
                to: 0.2,
            },
        )
        .unwrap();
        let t = 4.0;
        let z = 1.7;
        let (w2, w3) = pair.at(t);
        let mix = mixing_params(&w2, &w3, &med).unwrap();
        for variant in [MatrixVariant::Paraxial, MatrixVariant::Full] {
            let spectral = assemble(&pair, &mix, &med, t, z, variant).unwrap();
            let fd = reference::assemble_matrices_fd(&pair, &med, t, z, variant).unwrap();
            // on this 64² grid the 4th-order stencil truncation dominates;
            // the acceptance suite repeats the comparison at 1e-8 on a
            // spectrally resolved grid
            let compare = |name: &str, a: &ComplexField2D, b: &ComplexField2D| {
                let scale = b.max_abs().max(1e-9);
                let mut worst = 0.0f64;
                for (x, y) in a.values().iter().zip(b.values()) {
                    worst = worst.max((x - y).norm() / scale);
                }
                assert!(worst <= 2e-3, "{name} ({variant:?}): rel err {worst}");
            };
            compare("j11_x", &spectral.j11_x, &fd.j11_x);
            compare("j11_y", &spectral.j11_y, &fd.j11_y);
            compare("j22_x", &spectral.j22_x, &fd.j22_x);
            compare("j22_y", &spectral.j22_y, &fd.j22_y);
            compare("j12_x", &spectral.j12_x, &fd.j12_x);
            compare("j12_y", &spectral.j12_y, &fd.j12_y);
            compare("j21_x", &spectral.j21_x, &fd.j21_x);
            compare("j21_y", &spectral.j21_y, &fd.j21_y);
            compare("u11", &spectral.u11, &fd.u11);
            compare("u22", &spectral.u22, &fd.u22);
            compare("u12", &spectral.u12, &fd.u12);
            compare("u21", &spectral.u21, &fd.u21);
        }
    }

    #[test]
    fn vortex_cross_coupling_is_recoil_sized() {
        // With resonant controls and no traps, only the gradient terms feed
        // U12, so its magnitude is the recoil scale times the inverse
        // squared beam width.
        let g = GridSpec::new(64, 16.0).unwrap();
        let med = medium();
        let sigma = 4.0;
        let c2 = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new(x, y).scale(0.25) * (-(x * x + y * y) / (sigma * sigma)).exp()
        });
        let c3 = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new(0.8 * (-(x * x + y * y) / (sigma * sigma)).exp() + 0.2, 0.0)
        });
        let pair = static_pair(&g, c2.clone(), c3.clone());
        let mix = mixing_params(&c2, &c3, &med).unwrap();
        let m = assemble_paraxial_matrices(&pair, &mix, &med, 0.0, 0.0).unwrap();
        let recoil_scale = med.recoil_per_area() / (sigma * sigma);
        assert!(m.u12.max_abs() > 0.1 * recoil_scale);
        assert!(
            m.u12.max_abs() <= 50.0 * recoil_scale,
            "U12 max {:.3e} beyond the recoil scale {recoil_scale:.3e}",
            m.u12.max_abs()
        );
    }

    #[test]
    fn paraxial_and_full_variants_are_related_by_carrier_bookkeeping() {
        let g = GridSpec::new(64, 20.0).unwrap();
        let med = MediumParams {
            k_c: 0.75,
            ..medium()
        };
        let c2 = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new(1.0 + 0.2 * (0.2 * x).cos(), 0.1 * (0.15 * y).sin())
        });
        let c3 =
            ComplexField2D::from_fn(&g, |x, y| Complex64::new(0.6, 0.05 * (0.1 * (x + y)).sin()));
        let pair = static_pair(&g, c2.clone(), c3.clone());
        let mix = mixing_params(&c2, &c3, &med).unwrap();
        let z = 2.3;
        let full = assemble_full_matrices(&pair, &mix, &med, 0.0, z).unwrap();
        let par = assemble_paraxial_matrices(&pair, &mix, &med, 0.0, z).unwrap();

        // diagonals agree directly
        for (a, b) in [
            (&full.j22_x, &par.j22_x),
            (&full.j22_y, &par.j22_y),
            (&full.j11_x, &par.j11_x),
            (&full.j11_y, &par.j11_y),
            (&full.u22, &par.u22),
        ] {
            let scale = a.max_abs().max(1e-20);
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).norm() <= 1e-10 * scale);
            }
        }
        // off-diagonals differ by the carrier phase e^{-i(k+k_c)z}
        let strip = Complex64::new(0.0, -(med.kappa() + med.kappa_c()) * z).exp();
        let scale = full.u12.max_abs().max(1e-20);
        for (x, y) in full.u12.values().iter().zip(par.u12.values()) {
            assert!((x * strip - y).norm() <= 1e-10 * scale);
        }
        let scale = full.j12_x.max_abs().max(1e-20);
        for (x, y) in full.j12_x.values().iter().zip(par.j12_x.values()) {
            assert!((x * strip - y).norm() <= 1e-10 * scale);
        }
        // U11 differs by the known carrier constants
        let offset = 0.5 * med.optical_frequency() * Complex64::new(1.0, 0.0);
        let rec = med.recoil_per_area() * (med.kappa() - med.kappa_c()).powi(2);
        let scale = par.u11.max_abs().max(1e-20);
        for i in 0..g.len() {
            let zc = mix.zeta_c[i];
            let z1 = mix.zeta_1[i];
            let shifted =
                full.u11.values()[i] + offset * zc * zc + Complex64::new(rec * z1 * z1, 0.0);
            assert!((shifted - par.u11.values()[i]).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn decoupling_report_flags_each_condition() {
        let g = grid();
        let med = medium();
        let sigma = 8.0;
        let p2 = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new(x, y).scale(2.0) * (-(x * x + y * y) / (sigma * sigma)).exp()
        });
        let p3 = ComplexField2D::from_fn(&g, |x, y| {
            Complex64::new(2.0 * (-(x * x + y * y) / (sigma * sigma)).exp(), 0.0)
        });
        let shared = ControlPair::shared(p2.clone(), p3.clone(), Envelope::Constant(1.0)).unwrap();
        let report = decoupling_report(&shared, &med, 50.0).unwrap();
        assert!(report.shared_envelope);
        assert!(report.recoil_time_product < 1e-2, "{report:?}");
        assert!(report.decoupled, "{report:?}");

        // microsecond pulse, recoil ~1e4..1e5 s⁻¹: with γ ~ 2π·10 MHz these
        // magnitudes give ω_rec τ ≪ 1
        let gamma_si = 6.28e7;
        let med_microsecond = MediumParams {
            recoil: 5e4 / gamma_si,
            c_scale: 1e4,
            ..med.clone()
        };
        let report = decoupling_report(&shared, &med_microsecond, 50.0).unwrap();
        assert!(report.recoil_time_product < 1e-2);

        let base = Envelope::Smoothstep {
            t_start: 0.0,
            t_end: 5.0,
            from: 0.3,
            to: 1.0,
        };
        let mismatched = ControlPair::new(
            p2,
            p3,
            base.clone(),
            Envelope::Power {
                base: Box::new(base),
                exponent: 2,
            },
        )
        .unwrap();
        let report = decoupling_report(&mismatched, &med, 50.0).unwrap();
        assert!(!report.shared_envelope);
        assert!(!report.decoupled);
    }

    #[test]
    fn adiabaticity_ratio_definition_and_scaling() {
        let med = medium();
        // choose L = v_rad γ⁻¹ Ω² τ² exactly → ratio 1
        let omega = 2.0;
        let tau = 3.0;
        let g2n = med.g_sqrt_n * med.g_sqrt_n;
        let v_units = omega * omega / (omega * omega + g2n) * med.c_scale;
        let length = v_units * omega * omega * tau * tau / med.gamma;
        let report = adiabaticity_check(&med, omega, tau, length).unwrap();
        assert!((report.loss_ratio - 1.0).abs() < 1e-12);
        assert!((report.polariton_lifetime - (omega * tau).powi(2)).abs() < 1e-12);

        // deep slow light: v_rad ∝ Ω², so doubling Ω cuts the ratio 16×
        let med = MediumParams {
            g_sqrt_n: 1e4,
            ..medium()
        };
        let r1 = adiabaticity_check(&med, 1.0, tau, length).unwrap();
        let r2 = adiabaticity_check(&med, 2.0, tau, length).unwrap();
        let fold = r1.loss_ratio / r2.loss_ratio;
        assert!((fold - 16.0).abs() < 16.0 * 1e-4, "fold {fold}");

        assert!(adiabaticity_check(&med, 0.0, tau, length).is_err());
        assert!(adiabaticity_check(&med, 1.0, -1.0, length).is_err());
    }

    #[test]
    fn adiabaticity_with_paper_magnitudes() {
        // L = 0.3 mm, v_rad = 10 m/s, γ = 2π·10 MHz, τ = 1 μs, Ω_c = γ,
        // λ = 589 nm. Only finiteness and the verbatim formula are claimed.
        let gamma_si = 2.0 * std::f64::consts::PI * 1e7;
        let lambda = 589e-9;
        let c = 3e8;
        let v_rad = 10.0;
        let omega: f64 = 1.0; // γ units
        let g2n: f64 = omega * omega * (c / v_rad - 1.0);
        let med = MediumParams {
            g_sqrt_n: g2n.sqrt(),
            c_scale: c / (gamma_si * lambda),
            ..MediumParams::default()
        };
        let length = 0.3e-3 / lambda;
        let tau = 1e-6 * gamma_si;
        let report = adiabaticity_check(&med, omega, tau, length).unwrap();
        assert!(report.loss_ratio.is_finite() && report.loss_ratio > 0.0);
        // cross-check the formula against its pieces
        let v_units = v_rad / c * med.c_scale;
        let want = length / (v_units * omega * omega * tau * tau);
        assert!((report.loss_ratio - want).abs() < 1e-12 * want);
        assert!(
            report.loss_ratio < 1.0,
            "quoted magnitudes sit in the lossless regime"
        );
    }
}
