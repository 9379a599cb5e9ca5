use nalgebra::DMatrix;

use super::{GeometryError, GeometryKind, GeometrySpec};
use crate::scalar::{sum_sq, Real};

/// The three skew matrices `B^{(1)}, B^{(2)}, B^{(3)}` of the 7-dimensional
/// H-type group, stored row-major.
pub const HTYPE7_B: [[[f64; 4]; 4]; 3] = [
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ],
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ],
    [
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ],
];

/// Field coefficients as columns: `cols[j][i]` is the `∂_i` component of
/// `X_j`.
pub fn sigma_generic<R: Real>(g: &GeometrySpec, p: &[R]) -> Vec<Vec<R>> {
    let d = g.d_amb();
    let zero = p[0].lift(0.0);
    let one = p[0].lift(1.0);
    let mut cols = vec![vec![zero.clone(); d]; g.m()];
    match g.kind() {
        GeometryKind::Heisenberg { d: n } => {
            let n = *n;
            for i in 0..n {
                cols[i][i] = one.clone();
                cols[i][2 * n] = p[i + n].scale(2.0);
                cols[i + n][i + n] = one.clone();
                cols[i + n][2 * n] = p[i].scale(-2.0);
            }
        }
        GeometryKind::HType7 => {
            for j in 0..4 {
                cols[j][j] = one.clone();
                for (s, b) in HTYPE7_B.iter().enumerate() {
                    let mut acc = zero.clone();
                    for l in 0..4 {
                        if b[j][l] != 0.0 {
                            acc = acc + p[l].scale(2.0 * b[j][l]);
                        }
                    }
                    cols[j][4 + s] = acc;
                }
            }
        }
        GeometryKind::FreeStep2 { r } => {
            let r = *r;
            for k in 0..r {
                cols[k][k] = one.clone();
                for j in 0..r {
                    if j > k {
                        cols[k][GeometrySpec::free_vertical_index(r, j, k)] = p[j].scale(2.0);
                    } else if j < k {
                        cols[k][GeometrySpec::free_vertical_index(r, k, j)] = p[j].scale(-2.0);
                    }
                }
            }
        }
        GeometryKind::Grushin { n, k, gamma } => {
            let (n, k, gamma) = (*n, *k, *gamma);
            for i in 0..n {
                cols[i][i] = one.clone();
            }
            let w = grushin_weight(g, &p[..n], gamma);
            for j in 0..k {
                cols[n + j][n + j] = w.clone();
            }
        }
        GeometryKind::HeisenbergGreiner { d: n, delta } => {
            let n = *n;
            let delta = *delta;
            let s = sum_sq(&p[..2 * n], &zero);
            let coef = s.powi(delta as i32 - 1).scale(2.0 * delta as f64);
            for i in 0..n {
                cols[i][i] = one.clone();
                cols[i][2 * n] = coef.clone() * p[i + n].clone();
                cols[i + n][i + n] = one.clone();
                cols[i + n][2 * n] = -(coef.clone() * p[i].clone());
            }
        }
    }
    cols
}

/// `|x|^γ`, or the signed power `x^γ` for the polynomial one-dimensional
/// Grushin fields.
fn grushin_weight<R: Real>(g: &GeometrySpec, x: &[R], gamma: f64) -> R {
    if g.grushin_signed() {
        x[0].powi(gamma as i32)
    } else {
        sum_sq(x, &x[0]).powf(gamma / 2.0)
    }
}

/// σ(p) as a d×m matrix.
pub fn sigma(g: &GeometrySpec, p: &[f64]) -> DMatrix<f64> {
    let cols = sigma_generic(g, p);
    DMatrix::from_fn(g.d_amb(), g.m(), |i, j| cols[j][i])
}

pub fn gauge_generic<R: Real>(g: &GeometrySpec, p: &[R]) -> R {
    let split = g.layer_split();
    let zero = p[0].lift(0.0);
    let s = sum_sq(&p[..split], &zero);
    let v = sum_sq(&p[split..], &zero);
    match g.kind() {
        GeometryKind::Grushin { gamma, .. } => {
            let a = 1.0 + gamma;
            (s.powf(a) + v.scale(a * a)).powf(1.0 / (2.0 * a))
        }
        GeometryKind::HeisenbergGreiner { delta, .. } => {
            let dl = *delta as i32;
            (s.powi(2 * dl) + v).powf(1.0 / (4.0 * *delta as f64))
        }
        _ => (s.square() + v).powf(0.25),
    }
}

pub fn gauge(g: &GeometrySpec, p: &[f64]) -> f64 {
    gauge_generic(g, p)
}

/// Anisotropic dilation `(λ x_H, λ^w x_V)`.
pub fn dilate(g: &GeometrySpec, lambda: f64, p: &[f64]) -> Result<Vec<f64>, GeometryError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(GeometryError::NonPositiveScale(lambda));
    }
    g.validate(p)?;
    Ok(dilate_unchecked(g, lambda, p))
}

pub(crate) fn dilate_unchecked(g: &GeometrySpec, lambda: f64, p: &[f64]) -> Vec<f64> {
    let split = g.layer_split();
    let lv = lambda.powf(g.vertical_weight());
    p.iter()
        .enumerate()
        .map(|(i, &v)| if i < split { lambda * v } else { lv * v })
        .collect()
}
