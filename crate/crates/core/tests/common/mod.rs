//! Reference computations that share no code with the library: plain
//! nested-array matrices, a straight Taylor exponential and Heisenberg-picture
//! correlations for Hermitian Hamiltonians.

#![allow(dead_code)]

use num_complex::Complex64;

pub type Dense = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn sx() -> Dense {
    vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]
}

pub fn sy() -> Dense {
    vec![vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]]
}

pub fn sz() -> Dense {
    vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]]
}

pub fn eye(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { c(1., 0.) } else { c(0., 0.) }).collect())
        .collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Dense, s: Complex64) -> Dense {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn adjoint(a: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn trace(a: &Dense) -> Complex64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Plain Taylor series; fine for ‖a‖ up to about 10.
pub fn expm(a: &Dense) -> Dense {
    let n = a.len();
    let mut sum = eye(n);
    let mut term = eye(n);
    for k in 1..120 {
        term = scale(&mul(&term, a), c(1.0 / k as f64, 0.0));
        sum = add(&sum, &term);
    }
    sum
}

/// `exp(−i·h·t)`
pub fn unitary(h: &Dense, t: f64) -> Dense {
    expm(&scale(h, c(0.0, -t)))
}

/// `A(t) = U† A U` with `U = exp(−iHt)`.
pub fn heisenberg(a: &Dense, h: &Dense, t: f64) -> Dense {
    let u = unitary(h, t);
    mul(&mul(&adjoint(&u), a), &u)
}

/// `tr(χ(t2) ξ(t1) ρ0)` for Hermitian `h`.
pub fn heisenberg_correlation(h: &Dense, rho0: &Dense, xi: &Dense, chi: &Dense, t1: f64, t2: f64) -> Complex64 {
    trace(&mul(&mul(&heisenberg(chi, h, t2), &heisenberg(xi, h, t1)), rho0))
}

/// `Ω(t) = e^{−iHt} Ω₀ e^{iH†t}` for `H = h_plus − i·gamma`.
pub fn linear_state(h_plus: &Dense, gamma: &Dense, omega0: &Dense, t: f64) -> Dense {
    let h = add(h_plus, &scale(gamma, c(0.0, -1.0)));
    let u = unitary(&h, t);
    mul(&mul(&u, omega0), &adjoint(&u))
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// `|num − oracle| / max(|oracle|, 1)`
pub fn rel_err(num: Complex64, oracle: Complex64) -> f64 {
    (num - oracle).norm() / oracle.norm().max(1.0)
}
