//! Dense-matrix oracle: operators built as explicit Kronecker products of
//! truncated ladder matrices on a Fock space padded with guard levels, so
//! that every product evaluated on the original support is exact.
#![allow(dead_code)]

use fockwit::operators::OperatorSum;
use fockwit::{Complex64, FockState, HermitianCombination, OperatorMonomial};
use nalgebra::DMatrix;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Single-mode annihilation operator on levels `0..d`.
pub fn annihilation(d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = c((n as f64).sqrt());
    }
    m
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `single` acting on `mode`, identity elsewhere (mode 0 slowest).
pub fn embed_mode(single: &CMat, mode: usize, dims: &[usize]) -> CMat {
    dims.iter()
        .enumerate()
        .fold(CMat::identity(1, 1), |acc, (i, &d)| {
            if i == mode {
                kron(&acc, single)
            } else {
                kron(&acc, &CMat::identity(d, d))
            }
        })
}

pub fn monomial_matrix(mono: &OperatorMonomial, dims: &[usize]) -> CMat {
    let total: usize = dims.iter().product();
    let mut out = CMat::identity(total, total);
    for (mode, p) in mono.powers().iter().enumerate() {
        let a = annihilation(dims[mode]);
        let ad = a.adjoint();
        let mut single = CMat::identity(dims[mode], dims[mode]);
        for _ in 0..p.creation {
            single = &single * &ad;
        }
        for _ in 0..p.annihilation {
            single = &single * &a;
        }
        out = &out * embed_mode(&single, mode, dims);
    }
    out
}

pub fn sum_matrix(sum: &OperatorSum, dims: &[usize]) -> CMat {
    let total: usize = dims.iter().product();
    sum.terms()
        .fold(CMat::zeros(total, total), |acc, (m, coef)| {
            acc + monomial_matrix(m, dims) * *coef
        })
}

/// Density matrix of `state` embedded into cutoffs enlarged by `guard` levels.
pub fn padded_density(state: &FockState, guard: usize) -> (Vec<usize>, CMat) {
    let dims: Vec<usize> = state.cutoffs().iter().map(|c| c + guard).collect();
    let big: usize = dims.iter().product();
    let rho = state.density_matrix();
    let layout = state.layout();
    let map: Vec<usize> = (0..state.dim())
        .map(|i| {
            let occ = layout.occupations(i);
            occ.iter().zip(&dims).fold(0, |acc, (&n, &d)| acc * d + n)
        })
        .collect();
    let mut out = CMat::zeros(big, big);
    for i in 0..state.dim() {
        for j in 0..state.dim() {
            out[(map[i], map[j])] = rho[(i, j)];
        }
    }
    (dims, out)
}

pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    // Tr(AB) without forming AB
    let mut t = c(0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    t
}

pub fn oracle_expect(state: &FockState, mono: &OperatorMonomial) -> Complex64 {
    let (dims, rho) = padded_density(state, mono.max_creation_power() as usize);
    trace_product(&rho, &monomial_matrix(mono, &dims))
}

/// `(mean, variance)` from `Tr(ρS)` and `Tr(ρS²)` with `S²` formed by matrix multiplication.
pub fn oracle_mean_variance(state: &FockState, op: &HermitianCombination) -> (f64, f64) {
    let max_creation = op
        .as_sum()
        .terms()
        .map(|(m, _)| m.max_creation_power() as usize)
        .max()
        .unwrap_or(0);
    let (dims, rho) = padded_density(state, 2 * max_creation);
    let s = sum_matrix(op.as_sum(), &dims);
    let mean = trace_product(&rho, &s).re;
    let second = trace_product(&rho, &(&s * &s)).re;
    (mean, second - mean * mean)
}

/// Relative-or-absolute closeness: `|a − b| ≤ tol · max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

pub fn close_c(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}
