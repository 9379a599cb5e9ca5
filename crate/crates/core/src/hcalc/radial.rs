//! Closed-form horizontal derivatives of the gauge, one per geometry.

use nalgebra::{DMatrix, DVector};

use super::{HcalcError, HorizontalJet, RadialProfile};
use crate::geometry::{gauge, GeometryKind, GeometrySpec};

/// `ρ`, `D_X ρ`, `(D²_X ρ)*` and the closed form of `|D_X ρ|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeJet {
    pub rho: f64,
    pub drho: DVector<f64>,
    pub d2rho: DMatrix<f64>,
    pub drho_sq: f64,
}

fn outer(v: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    v * w.transpose()
}

/// `ρ³ D_X ρ` on the 7-dimensional H-type group.
pub fn htype7_mu(p: &[f64]) -> [f64; 4] {
    let (x1, x2, x3, x4) = (p[0], p[1], p[2], p[3]);
    let (t1, t2, t3) = (p[4], p[5], p[6]);
    let s = x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4;
    [
        x1 * s - x2 * t1 + x3 * t2 + x4 * t3,
        x2 * s + x1 * t1 - x4 * t2 + x3 * t3,
        x3 * s - x4 * t1 - x1 * t2 - x2 * t3,
        x4 * s + x3 * t1 + x2 * t2 - x1 * t3,
    ]
}

/// `ρ³ D_X ρ` on a free step-two group.
pub fn free_eta(r: usize, p: &[f64]) -> Vec<f64> {
    let s: f64 = p[..r].iter().map(|v| v * v).sum();
    (0..r)
        .map(|k| {
            let mut acc = p[k] * s;
            for j in 0..r {
                if j > k {
                    acc += p[j] * p[GeometrySpec::free_vertical_index(r, j, k)];
                } else if j < k {
                    acc -= p[j] * p[GeometrySpec::free_vertical_index(r, k, j)];
                }
            }
            acc
        })
        .collect()
}

/// `ρ³ D_X ρ = (x³, 2xy)` on the Grushin plane.
pub fn grushin_plane_eta(p: &[f64]) -> [f64; 2] {
    let (x, y) = (p[0], p[1]);
    [x * x * x, 2.0 * x * y]
}

/// `N^{4δ−1} D_X N` for Heisenberg-Greiner fields (`δ = 1` for Heisenberg).
pub fn greiner_eta(d: usize, delta: u32, p: &[f64]) -> Vec<f64> {
    let t = p[2 * d];
    let r2: f64 = p[..2 * d].iter().map(|v| v * v).sum();
    let dl = delta as i32;
    let a = r2.powi(2 * dl - 1);
    let b = r2.powi(dl - 1) * t;
    (0..2 * d)
        .map(|i| {
            let jx = if i < d { p[i + d] } else { -p[i - d] };
            p[i] * a + jx * b
        })
        .collect()
}

fn greiner_jet(d: usize, delta: u32, p: &[f64], rho: f64) -> GaugeJet {
    let m = 2 * d;
    let x = DVector::from_column_slice(&p[..m]);
    let jx = DVector::from_fn(m, |i, _| if i < d { p[i + d] } else { -p[i - d] });
    let t = p[m];
    let r2 = x.norm_squared();
    let dl = delta as i32;
    let df = delta as f64;
    let denom = rho.powi(4 * dl - 1);
    let drho = DVector::from_column_slice(&greiner_eta(d, delta, p)) / denom;
    let mut inner = DMatrix::identity(m, m) * r2.powi(2 * dl - 1);
    inner += outer(&x, &x) * ((4.0 * df - 2.0) * r2.powi(2 * dl - 2));
    if delta > 1 {
        let cross = outer(&jx, &x) + outer(&x, &jx);
        inner += cross * ((df - 1.0) * r2.powi(dl - 2) * t);
    }
    inner += outer(&jx, &jx) * (2.0 * df * r2.powi(2 * dl - 2));
    let d2rho = inner / denom - outer(&drho, &drho) * ((4.0 * df - 1.0) / rho);
    let ratio = r2.sqrt() / rho;
    GaugeJet {
        rho,
        drho,
        d2rho,
        drho_sq: ratio.powi(2 * (2 * dl - 1)),
    }
}

fn grushin_general_jet(
    n: usize,
    k: usize,
    gamma: f64,
    signed: bool,
    p: &[f64],
    rho: f64,
) -> Result<GaugeJet, HcalcError> {
    let m = n + k;
    let x = DVector::from_column_slice(&p[..n]);
    let y = DVector::from_column_slice(&p[n..]);
    let ax = x.norm();
    if ax == 0.0 {
        return Err(HcalcError::Singular);
    }
    let w = rho.powf(2.0 * gamma + 1.0);
    let ag = ax.powf(gamma);
    let a2g = ax.powf(2.0 * gamma);
    let mut drho = DVector::zeros(m);
    drho.rows_mut(0, n).copy_from(&(&x * (a2g / w)));
    drho.rows_mut(n, k).copy_from(&(&y * ((1.0 + gamma) * ag / w)));
    let mut h = DMatrix::identity(m, m) * (a2g / w);
    let xx = outer(&x, &x) * (2.0 * gamma * ax.powf(2.0 * gamma - 2.0) / w);
    h.view_mut((0, 0), (n, n)).add_assign(&xx);
    for j in 0..k {
        h[(n + j, n + j)] += gamma * a2g / w;
    }
    let xy = outer(&x, &y) * (gamma * (1.0 + gamma) / 2.0 * ax.powf(gamma - 2.0) / w);
    h.view_mut((0, n), (n, k)).add_assign(&xy);
    h.view_mut((n, 0), (k, n)).add_assign(&xy.transpose());
    h -= outer(&drho, &drho) * ((2.0 * gamma + 1.0) / rho);
    if signed && p[0] < 0.0 && (gamma as i64) % 2 == 1 {
        for j in n..m {
            drho[j] = -drho[j];
            for i in 0..m {
                h[(i, j)] = -h[(i, j)];
                h[(j, i)] = -h[(j, i)];
            }
        }
    }
    Ok(GaugeJet {
        rho,
        drho,
        d2rho: h,
        drho_sq: (ax / rho).powf(2.0 * gamma),
    })
}

trait AddAssignView {
    fn add_assign(&mut self, other: &DMatrix<f64>);
}

impl AddAssignView for nalgebra::DMatrixViewMut<'_, f64> {
    fn add_assign(&mut self, other: &DMatrix<f64>) {
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                self[(i, j)] += other[(i, j)];
            }
        }
    }
}

/// Closed-form jet of the gauge itself.
pub fn gauge_jet(g: &GeometrySpec, p: &[f64]) -> Result<GaugeJet, HcalcError> {
    g.validate(p)?;
    let rho = gauge(g, p);
    if rho <= 0.0 {
        return Err(HcalcError::ZeroGauge);
    }
    let xh2: f64 = p[..g.layer_split()].iter().map(|v| v * v).sum();
    Ok(match g.kind() {
        GeometryKind::HType7 => {
            let drho = DVector::from_column_slice(&htype7_mu(p)) / rho.powi(3);
            let drho_sq = xh2 / (rho * rho);
            let d2rho = DMatrix::identity(4, 4) * (3.0 * drho_sq / rho)
                - outer(&drho, &drho) * (3.0 / rho);
            GaugeJet {
                rho,
                drho,
                d2rho,
                drho_sq,
            }
        }
        GeometryKind::Heisenberg { d } => greiner_jet(*d, 1, p, rho),
        GeometryKind::HeisenbergGreiner { d, delta } => greiner_jet(*d, *delta, p, rho),
        GeometryKind::FreeStep2 { r } => {
            let drho = DVector::from_column_slice(&free_eta(*r, p)) / rho.powi(3);
            let d2rho = DMatrix::identity(*r, *r) * (3.0 * xh2 / rho.powi(3))
                - outer(&drho, &drho) * (3.0 / rho);
            let drho_sq = drho.norm_squared();
            GaugeJet {
                rho,
                drho,
                d2rho,
                drho_sq,
            }
        }
        GeometryKind::Grushin { .. } if g.is_grushin_plane() => {
            let (x, y) = (p[0], p[1]);
            let eta = grushin_plane_eta(p);
            let drho = DVector::from_column_slice(&eta) / rho.powi(3);
            let base = DMatrix::from_row_slice(2, 2, &[3.0 * x * x, y, y, 2.0 * x * x]);
            let d2rho = base / rho.powi(3) - outer(&drho, &drho) * (3.0 / rho);
            GaugeJet {
                rho,
                drho,
                d2rho,
                drho_sq: x * x / (rho * rho),
            }
        }
        GeometryKind::Grushin { n, k, gamma } => {
            grushin_general_jet(*n, *k, *gamma, g.grushin_signed(), p, rho)?
        }
    })
}

/// Closed-form jet of `f(ρ)`:
/// `D_X f = f' D_X ρ`, `(D²_X f)* = f' (D²_X ρ)* + f'' D_X ρ ⊗ D_X ρ`.
pub fn radial_horizontal_hessian(
    g: &GeometrySpec,
    prof: &(impl RadialProfile + ?Sized),
    p: &[f64],
) -> Result<HorizontalJet, HcalcError> {
    let gj = gauge_jet(g, p)?;
    let (_, f1, f2) = prof.eval(gj.rho)?;
    Ok(HorizontalJet {
        hgrad: &gj.drho * f1,
        hhess: &gj.d2rho * f1 + outer(&gj.drho, &gj.drho) * f2,
    })
}

/// `Δ_X f(ρ)` from the radial formula `|D_X ρ|² (f'' + (Q−1) f'/ρ)`; on
/// free groups, where the gauge is not harmonic-adapted, the trace of the
/// closed-form Hessian `3r|x_H|²/ρ³ f' + |D_X ρ|² (f'' − 3f'/ρ)`.
pub fn sublaplacian_radial(
    g: &GeometrySpec,
    prof: &(impl RadialProfile + ?Sized),
    p: &[f64],
) -> Result<f64, HcalcError> {
    let gj = gauge_jet(g, p)?;
    let rho = gj.rho;
    let (_, f1, f2) = prof.eval(rho)?;
    Ok(match g.kind() {
        GeometryKind::FreeStep2 { r } => {
            let xh2: f64 = p[..*r].iter().map(|v| v * v).sum();
            3.0 * *r as f64 * xh2 / rho.powi(3) * f1 + gj.drho_sq * (f2 - 3.0 * f1 / rho)
        }
        _ => gj.drho_sq * (f2 + (g.q() - 1.0) * f1 / rho),
    })
}
