//! Deliberately simple reference implementations used by the validation
//! suite.
//!
//! The production code differentiates spectrally and integrates with a
//! split-step scheme; the functions here redo the same physics with
//! 4th-order periodic finite differences, finite-difference time
//! derivatives and a dense explicit Runge-Kutta stepper. They share no code
//! with the paths they check, so a transcription slip in the long coupling
//! formulas shows up as a disagreement instead of a silent common error.

use num_complex::Complex64;

use crate::coupling::{ControlPair, CouplingMatrices, MatrixVariant};
use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, GridSpec};
use crate::mixing::MediumParams;

/// 4th-order central first derivatives on the periodic grid.
pub fn fd_gradient(f: &ComplexField2D) -> (ComplexField2D, ComplexField2D) {
    let grid = f.grid();
    let n = grid.n() as isize;
    let h = grid.dx();
    let v = f.values();
    let idx = |ix: isize, iy: isize| -> usize {
        let x = ix.rem_euclid(n) as usize;
        let y = iy.rem_euclid(n) as usize;
        y * n as usize + x
    };
    let mut gx = vec![Complex64::ZERO; v.len()];
    let mut gy = vec![Complex64::ZERO; v.len()];
    for iy in 0..n {
        for ix in 0..n {
            let d = |a: Complex64, b: Complex64, c: Complex64, e: Complex64| {
                (-a + b * 8.0 - c * 8.0 + e) / (12.0 * h)
            };
            gx[idx(ix, iy)] = d(
                v[idx(ix + 2, iy)],
                v[idx(ix + 1, iy)],
                v[idx(ix - 1, iy)],
                v[idx(ix - 2, iy)],
            );
            gy[idx(ix, iy)] = d(
                v[idx(ix, iy + 2)],
                v[idx(ix, iy + 1)],
                v[idx(ix, iy - 1)],
                v[idx(ix, iy - 2)],
            );
        }
    }
    (
        ComplexField2D::from_values(grid, gx).expect("sized to grid"),
        ComplexField2D::from_values(grid, gy).expect("sized to grid"),
    )
}

/// 4th-order central Laplacian on the periodic grid.
pub fn fd_laplacian(f: &ComplexField2D) -> ComplexField2D {
    let grid = f.grid();
    let n = grid.n() as isize;
    let h2 = grid.dx() * grid.dx();
    let v = f.values();
    let idx = |ix: isize, iy: isize| -> usize {
        let x = ix.rem_euclid(n) as usize;
        let y = iy.rem_euclid(n) as usize;
        y * n as usize + x
    };
    let mut out = vec![Complex64::ZERO; v.len()];
    for iy in 0..n {
        for ix in 0..n {
            let second = |a: Complex64, b: Complex64, c: Complex64, d: Complex64, e: Complex64| {
                (-a + b * 16.0 - c * 30.0 + d * 16.0 - e) / (12.0 * h2)
            };
            let fxx = second(
                v[idx(ix + 2, iy)],
                v[idx(ix + 1, iy)],
                v[idx(ix, iy)],
                v[idx(ix - 1, iy)],
                v[idx(ix - 2, iy)],
            );
            let fyy = second(
                v[idx(ix, iy + 2)],
                v[idx(ix, iy + 1)],
                v[idx(ix, iy)],
                v[idx(ix, iy - 1)],
                v[idx(ix, iy - 2)],
            );
            out[idx(ix, iy)] = fxx + fyy;
        }
    }
    ComplexField2D::from_values(grid, out).expect("sized to grid")
}

/// Per-node mixing parameters computed in place (zero-control convention
/// ξ_c2 = 1, ξ_c3 = 0).
struct NodeMixing {
    xi2: Vec<Complex64>,
    xi3: Vec<Complex64>,
    zc: Vec<f64>,
    z1: Vec<f64>,
}

fn node_mixing(c2: &ComplexField2D, c3: &ComplexField2D, g_sqrt_n: f64) -> NodeMixing {
    let len = c2.values().len();
    let g2n = g_sqrt_n * g_sqrt_n;
    let mut m = NodeMixing {
        xi2: Vec::with_capacity(len),
        xi3: Vec::with_capacity(len),
        zc: Vec::with_capacity(len),
        z1: Vec::with_capacity(len),
    };
    for i in 0..len {
        let w2 = c2.values()[i];
        let w3 = c3.values()[i];
        let oc = (w2.norm_sqr() + w3.norm_sqr()).sqrt();
        let xi = (oc * oc + g2n).sqrt();
        if oc == 0.0 {
            m.xi2.push(Complex64::new(1.0, 0.0));
            m.xi3.push(Complex64::ZERO);
        } else {
            m.xi2.push(w2 / oc);
            m.xi3.push(w3 / oc);
        }
        m.zc.push(oc / xi);
        m.z1.push(g_sqrt_n / xi);
    }
    m
}

/// Coupling matrices rebuilt from scratch with finite differences, including
/// finite-difference time derivatives of the mixing parameters.
pub fn assemble_matrices_fd(
    controls: &ControlPair,
    medium: &MediumParams,
    t: f64,
    z: f64,
    variant: MatrixVariant,
) -> Result<CouplingMatrices> {
    medium.validate()?;
    let grid = controls.grid().clone();
    let len = grid.len();

    let (c2, c3) = controls.at(t);
    let now = node_mixing(&c2, &c3, medium.g_sqrt_n);

    // centered time differences of the mixing parameters
    let ht = 1e-4;
    let (c2m, c3m) = controls.at(t - ht);
    let (c2p, c3p) = controls.at(t + ht);
    let before = node_mixing(&c2m, &c3m, medium.g_sqrt_n);
    let after = node_mixing(&c2p, &c3p, medium.g_sqrt_n);
    let mut dxi2 = Vec::with_capacity(len);
    let mut dxi3 = Vec::with_capacity(len);
    let mut dzc = Vec::with_capacity(len);
    let mut dz1 = Vec::with_capacity(len);
    for i in 0..len {
        let frozen = now.zc[i] == 0.0 || before.zc[i] == 0.0 || after.zc[i] == 0.0;
        if frozen {
            dxi2.push(Complex64::ZERO);
            dxi3.push(Complex64::ZERO);
            dzc.push(0.0);
            dz1.push(0.0);
        } else {
            dxi2.push((after.xi2[i] - before.xi2[i]) / (2.0 * ht));
            dxi3.push((after.xi3[i] - before.xi3[i]) / (2.0 * ht));
            dzc.push((after.zc[i] - before.zc[i]) / (2.0 * ht));
            dz1.push((after.z1[i] - before.z1[i]) / (2.0 * ht));
        }
    }

    let xi2 = ComplexField2D::from_values(&grid, now.xi2.clone())?;
    let xi3 = ComplexField2D::from_values(&grid, now.xi3.clone())?;
    let zc_f = ComplexField2D::from_values(
        &grid,
        now.zc.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    )?;
    let z1_f = ComplexField2D::from_values(
        &grid,
        now.z1.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    )?;

    let (gx_xi2, gy_xi2) = fd_gradient(&xi2);
    let (gx_xi3, gy_xi3) = fd_gradient(&xi3);
    let (gx_zc, gy_zc) = fd_gradient(&zc_f);
    let (gx_z1, gy_z1) = fd_gradient(&z1_f);
    let lap_xi2 = fd_laplacian(&xi2);
    let lap_xi3 = fd_laplacian(&xi3);
    let lap_zc = fd_laplacian(&zc_f);
    let lap_z1 = fd_laplacian(&z1_f);

    let kappa = medium.kappa();
    let kappa_c = medium.kappa_c();
    let hbar_over_m = 2.0 * medium.recoil_per_area(); // ħ/(mγλ²)
    let half_hbar_over_m = medium.recoil_per_area();
    let crad = medium.photon_kinetic();
    let omega_opt = medium.optical_frequency();
    let i_u = Complex64::I;
    let phase = match variant {
        MatrixVariant::Paraxial => Complex64::from_polar(1.0, (kappa_c - kappa) * z),
        MatrixVariant::Full => Complex64::from_polar(1.0, 2.0 * kappa_c * z),
    };
    let (v2, v3): (Option<&[f64]>, Option<&[f64]>) = match &medium.potentials {
        Some(p) => (Some(p.v2.values()), Some(p.v3.values())),
        None => (None, None),
    };

    let zeros = || vec![Complex64::ZERO; len];
    let (mut j11x, mut j11y) = (zeros(), zeros());
    let (mut j22x, mut j22y) = (zeros(), zeros());
    let (mut j12x, mut j12y) = (zeros(), zeros());
    let (mut j21x, mut j21y) = (zeros(), zeros());
    let (mut u11, mut u22, mut u12, mut u21) = (zeros(), zeros(), zeros(), zeros());

    for i in 0..len {
        let x2 = now.xi2[i];
        let x3 = now.xi3[i];
        let zc = now.zc[i];
        let z1 = now.z1[i];
        let pot2 = medium.omega21 + v2.map_or(0.0, |v| v[i]);
        let pot3 = medium.omega31 + v3.map_or(0.0, |v| v[i]);
        let pot32 = medium.omega32() + v3.map_or(0.0, |v| v[i]) - v2.map_or(0.0, |v| v[i]);

        let jb2 = [
            i_u * hbar_over_m * (x2 * gx_xi2.values()[i].conj() + x3 * gx_xi3.values()[i].conj()),
            i_u * hbar_over_m * (x2 * gy_xi2.values()[i].conj() + x3 * gy_xi3.values()[i].conj()),
        ];
        j11x[i] = i_u * (crad * zc * gx_zc.values()[i] + hbar_over_m * z1 * gx_z1.values()[i])
            + jb2[0] * (z1 * z1);
        j11y[i] = i_u * (crad * zc * gy_zc.values()[i] + hbar_over_m * z1 * gy_z1.values()[i])
            + jb2[1] * (z1 * z1);
        j22x[i] =
            i_u * hbar_over_m * (x3.conj() * gx_xi3.values()[i] + x2.conj() * gx_xi2.values()[i]);
        j22y[i] =
            i_u * hbar_over_m * (x3.conj() * gy_xi3.values()[i] + x2.conj() * gy_xi2.values()[i]);
        j12x[i] =
            i_u * hbar_over_m * z1 * phase * (x3 * gx_xi2.values()[i] - x2 * gx_xi3.values()[i]);
        j12y[i] =
            i_u * hbar_over_m * z1 * phase * (x3 * gy_xi2.values()[i] - x2 * gy_xi3.values()[i]);
        // transcribed separately rather than conjugated from J12
        j21x[i] = -i_u
            * hbar_over_m
            * z1
            * phase.conj()
            * (x3.conj() * gx_xi2.values()[i].conj() - x2.conj() * gx_xi3.values()[i].conj());
        j21y[i] = -i_u
            * hbar_over_m
            * z1
            * phase.conj()
            * (x3.conj() * gy_xi2.values()[i].conj() - x2.conj() * gy_xi3.values()[i].conj());

        let ub2 = -half_hbar_over_m
            * (x2 * lap_xi2.values()[i].conj() + x3 * lap_xi3.values()[i].conj())
            + pot2 * x2.norm_sqr()
            + pot3 * x3.norm_sqr()
            + i_u * (x2.conj() * dxi2[i] + x3.conj() * dxi3[i]);

        let bracket = match variant {
            MatrixVariant::Paraxial => {
                ub2 + half_hbar_over_m * (kappa - kappa_c) * (kappa - kappa_c)
            }
            MatrixVariant::Full => ub2,
        };
        let photon_shift = match variant {
            MatrixVariant::Paraxial => Complex64::ZERO,
            MatrixVariant::Full => Complex64::new(-0.5 * omega_opt * zc * zc, 0.0),
        };
        u11[i] = -0.5 * (crad * zc * lap_zc.values()[i] + hbar_over_m * z1 * lap_z1.values()[i])
            + i_u * z1 * (gx_z1.values()[i] * jb2[0] + gy_z1.values()[i] * jb2[1])
            + bracket * (z1 * z1)
            + photon_shift
            + i_u * (zc * dzc[i] + z1 * dz1[i]);

        u22[i] = -half_hbar_over_m
            * (x3.conj() * lap_xi3.values()[i] + x2.conj() * lap_xi2.values()[i])
            + pot2 * x3.norm_sqr()
            + pot3 * x2.norm_sqr()
            + i_u * (x3 * dxi3[i].conj() + x2 * dxi2[i].conj());

        u12[i] =
            -half_hbar_over_m * z1 * phase * (x3 * lap_xi2.values()[i] - x2 * lap_xi3.values()[i])
                + phase * z1 * x2 * x3 * pot32
                + i_u * z1 * phase * (x2 * dxi3[i] - x3 * dxi2[i]);

        u21[i] = -half_hbar_over_m
            * z1
            * phase.conj()
            * (x2.conj() * lap_xi3.values()[i].conj() - x3.conj() * lap_xi2.values()[i].conj())
            + i_u / z1 * (gx_z1.values()[i] * j21x[i] + gy_z1.values()[i] * j21y[i])
            + phase.conj() * z1 * x2.conj() * x3.conj() * pot32
            + i_u * z1 * phase.conj() * (x3.conj() * dxi2[i].conj() - x2.conj() * dxi3[i].conj());
    }

    Ok(CouplingMatrices {
        variant,
        j11_x: ComplexField2D::from_values(&grid, j11x)?,
        j11_y: ComplexField2D::from_values(&grid, j11y)?,
        j22_x: ComplexField2D::from_values(&grid, j22x)?,
        j22_y: ComplexField2D::from_values(&grid, j22y)?,
        j12_x: ComplexField2D::from_values(&grid, j12x)?,
        j12_y: ComplexField2D::from_values(&grid, j12y)?,
        j21_x: ComplexField2D::from_values(&grid, j21x)?,
        j21_y: ComplexField2D::from_values(&grid, j21y)?,
        u11: ComplexField2D::from_values(&grid, u11)?,
        u22: ComplexField2D::from_values(&grid, u22)?,
        u12: ComplexField2D::from_values(&grid, u12)?,
        u21: ComplexField2D::from_values(&grid, u21)?,
    })
}

/// One step of the realized (t, z) path of a coupled propagation.
#[derive(Debug, Clone, Copy)]
pub struct StepPoint {
    pub t: f64,
    pub z: f64,
    pub dt: f64,
    pub dz: f64,
}

/// Dense explicit RK4 integration of the coupled pair along a given (t, z)
/// schedule, with `substeps` RK4 steps per schedule entry. Matrices are
/// reassembled at every stage time.
pub fn integrate_pair_rk4(
    d1: &ComplexField2D,
    d2: &ComplexField2D,
    controls: &ControlPair,
    medium: &MediumParams,
    schedule: &[StepPoint],
    substeps: usize,
) -> Result<(ComplexField2D, ComplexField2D)> {
    if substeps == 0 {
        return Err(Error::InvalidArgument("substeps must be at least 1".into()));
    }
    let grid = d1.grid().clone();
    let mut y1 = d1.values().to_vec();
    let mut y2 = d2.values().to_vec();

    for point in schedule {
        let dt = point.dt / substeps as f64;
        let dz = point.dz / substeps as f64;
        for s in 0..substeps {
            let t0 = point.t + s as f64 * dt;
            let z0 = point.z + s as f64 * dz;
            let (k1a, k1b) = rhs(&grid, &y1, &y2, controls, medium, t0, z0)?;
            let (y1a, y2a) = advanced(&y1, &y2, &k1a, &k1b, dt / 2.0);
            let (k2a, k2b) = rhs(
                &grid,
                &y1a,
                &y2a,
                controls,
                medium,
                t0 + dt / 2.0,
                z0 + dz / 2.0,
            )?;
            let (y1b, y2b) = advanced(&y1, &y2, &k2a, &k2b, dt / 2.0);
            let (k3a, k3b) = rhs(
                &grid,
                &y1b,
                &y2b,
                controls,
                medium,
                t0 + dt / 2.0,
                z0 + dz / 2.0,
            )?;
            let (y1c, y2c) = advanced(&y1, &y2, &k3a, &k3b, dt);
            let (k4a, k4b) = rhs(&grid, &y1c, &y2c, controls, medium, t0 + dt, z0 + dz)?;
            for i in 0..y1.len() {
                y1[i] += dt / 6.0 * (k1a[i] + 2.0 * (k2a[i] + k3a[i]) + k4a[i]);
                y2[i] += dt / 6.0 * (k1b[i] + 2.0 * (k2b[i] + k3b[i]) + k4b[i]);
            }
        }
    }
    Ok((
        ComplexField2D::from_values(&grid, y1)?,
        ComplexField2D::from_values(&grid, y2)?,
    ))
}

fn advanced(
    y1: &[Complex64],
    y2: &[Complex64],
    k1: &[Complex64],
    k2: &[Complex64],
    h: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    (
        y1.iter().zip(k1).map(|(y, k)| y + k * h).collect(),
        y2.iter().zip(k2).map(|(y, k)| y + k * h).collect(),
    )
}

/// ∂_t Φ = iβ∇²Φ + J·∇Φ − iUΦ for the pair, with spectral derivatives.
fn rhs(
    grid: &GridSpec,
    y1: &[Complex64],
    y2: &[Complex64],
    controls: &ControlPair,
    medium: &MediumParams,
    t: f64,
    z: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    use crate::coupling::assemble_paraxial_matrices;
    use crate::mixing::{kinetic_coeff_d1, kinetic_coeff_d2, mixing_params};

    let (c2, c3) = controls.at(t);
    let mix = mixing_params(&c2, &c3, medium)?;
    let mats = assemble_paraxial_matrices(controls, &mix, medium, t, z)?;
    let beta1 = kinetic_coeff_d1(&mix, medium);
    let beta2 = kinetic_coeff_d2(medium);

    let f1 = ComplexField2D::from_values(grid, y1.to_vec())?;
    let f2 = ComplexField2D::from_values(grid, y2.to_vec())?;
    let lap1 = f1.laplacian();
    let lap2 = f2.laplacian();
    let (g1x, g1y) = f1.gradient();
    let (g2x, g2y) = f2.gradient();

    let i_u = Complex64::I;
    let len = grid.len();
    let mut out1 = Vec::with_capacity(len);
    let mut out2 = Vec::with_capacity(len);
    for i in 0..len {
        let d1 = i_u * beta1.values()[i] * lap1.values()[i]
            + mats.j11_x.values()[i] * g1x.values()[i]
            + mats.j11_y.values()[i] * g1y.values()[i]
            + mats.j12_x.values()[i] * g2x.values()[i]
            + mats.j12_y.values()[i] * g2y.values()[i]
            - i_u * (mats.u11.values()[i] * y1[i] + mats.u12.values()[i] * y2[i]);
        let d2 = i_u * beta2 * lap2.values()[i]
            + mats.j21_x.values()[i] * g1x.values()[i]
            + mats.j21_y.values()[i] * g1y.values()[i]
            + mats.j22_x.values()[i] * g2x.values()[i]
            + mats.j22_y.values()[i] * g2y.values()[i]
            - i_u * (mats.u21.values()[i] * y1[i] + mats.u22.values()[i] * y2[i]);
        out1.push(d1);
        out2.push(d2);
    }
    Ok((out1, out2))
}
