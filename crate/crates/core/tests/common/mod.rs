#![allow(dead_code)]

use closedloop::{HermitianOperator, StateVector, C64};

pub type Mat = Vec<Vec<C64>>;

pub fn dense(h: &HermitianOperator) -> Mat {
    let n = h.dim();
    (1..=n)
        .map(|i| (1..=n).map(|j| h.entry(i, j)).collect())
        .collect()
}

fn derivative(h: &Mat, psi: &[C64]) -> Vec<C64> {
    let minus_i = C64::new(0.0, -1.0);
    h.iter()
        .map(|row| minus_i * row.iter().zip(psi).map(|(a, b)| a * b).sum::<C64>())
        .collect()
}

fn axpy(psi: &[C64], k: &[C64], a: f64) -> Vec<C64> {
    psi.iter().zip(k).map(|(p, q)| p + q * a).collect()
}

/// Classical fourth-order Runge-Kutta for `d psi/dt = -i H psi` with a fixed
/// step, sampled at every multiple of `sample_every` steps.
pub fn rk4(
    h: &HermitianOperator,
    psi0: &StateVector,
    step: f64,
    n_steps: usize,
    sample_every: usize,
) -> Vec<(f64, Vec<C64>)> {
    let m = dense(h);
    let mut psi = psi0.to_vec();
    let mut out = vec![(0.0, psi.clone())];
    for s in 1..=n_steps {
        let k1 = derivative(&m, &psi);
        let k2 = derivative(&m, &axpy(&psi, &k1, step / 2.0));
        let k3 = derivative(&m, &axpy(&psi, &k2, step / 2.0));
        let k4 = derivative(&m, &axpy(&psi, &k3, step));
        for i in 0..psi.len() {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (step / 6.0);
        }
        if s % sample_every == 0 {
            out.push((s as f64 * step, psi.clone()));
        }
    }
    out
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &Mat) -> C64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut det = C64::new(0.0, 0.0);
    for col in 0..n {
        let minor: Mat = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, x)| *x)
                    .collect()
            })
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += m[0][col] * cofactor_det(&minor) * sign;
    }
    det
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
