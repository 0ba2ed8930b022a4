//! Independent reference implementations shared by the integration tests.
//!
//! The dense oracle builds truncated `a`, `a†` as explicit matrices and
//! evaluates every master-equation term by matrix products, sharing no code
//! with the stencil.

#![allow(dead_code)]

use catsim_core::{BathMoments, FockDensityMatrix, ModelParams};
use num_complex::Complex64;
use rand::Rng;

pub type C = Complex64;

#[derive(Clone, Debug)]
pub struct Dense {
    pub dim: usize,
    pub data: Vec<C>,
}

impl Dense {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_rho(rho: &FockDensityMatrix) -> Self {
        Self {
            dim: rho.dim(),
            data: rho.as_slice().to_vec(),
        }
    }

    pub fn annihilation(dim: usize) -> Self {
        let mut a = Self::zeros(dim);
        for n in 1..dim {
            a.set(n - 1, n, C::new((n as f64).sqrt(), 0.0));
        }
        a
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.dim + j] = v;
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, s: C, other: &Self) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += s * y;
        }
    }

    pub fn trace(&self) -> C {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

/// Dense evaluation of the master-equation right-hand side.
pub fn dense_generator(p: &ModelParams, b: BathMoments, rho: &FockDensityMatrix) -> Vec<C> {
    let d = rho.dim();
    let r = Dense::from_rho(rho);
    let a = Dense::annihilation(d);
    let ad = a.dagger();
    let a2 = a.mul(&a);
    let ad2 = ad.mul(&ad);
    let ad2a2 = ad2.mul(&a2);
    let ada = ad.mul(&a);
    let aad = a.mul(&ad);
    let re = |x: f64| C::new(x, 0.0);
    let i = C::new(0.0, 1.0);

    let mut out = Dense::zeros(d);
    // (λ/2)[a†² − a², ρ]
    let mut pump = ad2.clone();
    pump.add_scaled(re(-1.0), &a2);
    out.add_scaled(re(0.5 * p.lambda), &pump.mul(&r));
    out.add_scaled(re(-0.5 * p.lambda), &r.mul(&pump));
    // (g²/2)(2a²ρa†² − a†²a²ρ − ρa†²a²)
    out.add_scaled(re(p.g2), &a2.mul(&r).mul(&ad2));
    out.add_scaled(re(-0.5 * p.g2), &ad2a2.mul(&r));
    out.add_scaled(re(-0.5 * p.g2), &r.mul(&ad2a2));
    // −i(χ′/2)[a†²a², ρ]
    out.add_scaled(-i * (0.5 * p.chi_prime), &ad2a2.mul(&r));
    out.add_scaled(i * (0.5 * p.chi_prime), &r.mul(&ad2a2));
    // (N+1)(2aρa† − a†aρ − ρa†a)
    let n1 = b.n + 1.0;
    out.add_scaled(re(2.0 * n1), &a.mul(&r).mul(&ad));
    out.add_scaled(re(-n1), &ada.mul(&r));
    out.add_scaled(re(-n1), &r.mul(&ada));
    // N(2a†ρa − aa†ρ − ρaa†)
    out.add_scaled(re(2.0 * b.n), &ad.mul(&r).mul(&a));
    out.add_scaled(re(-b.n), &aad.mul(&r));
    out.add_scaled(re(-b.n), &r.mul(&aad));
    // −M(2aρa − a²ρ − ρa²)
    out.add_scaled(-2.0 * b.m, &a.mul(&r).mul(&a));
    out.add_scaled(b.m, &a2.mul(&r));
    out.add_scaled(b.m, &r.mul(&a2));
    // −M*(2a†ρa† − a†²ρ − ρa†²)
    let mc = b.m.conj();
    out.add_scaled(-2.0 * mc, &ad.mul(&r).mul(&ad));
    out.add_scaled(mc, &ad2.mul(&r));
    out.add_scaled(mc, &r.mul(&ad2));
    out.data
}

/// The number-basis stencil exactly as printed, including the `+` signs on
/// the `a²ρ`/`ρa²` (and conjugate) entries of the anomalous terms and the
/// untruncated `(n+1)` in the `N` loss term.
pub fn literal_printed_stencil(p: &ModelParams, b: BathMoments, rho: &FockDensityMatrix) -> Vec<C> {
    let nc = rho.cutoff();
    let d = nc + 1;
    let at = |i: isize, j: isize| -> C {
        if i < 0 || j < 0 || i > nc as isize || j > nc as isize {
            C::new(0.0, 0.0)
        } else {
            rho[(i as usize, j as usize)]
        }
    };
    let sq = |x: f64| x.max(0.0).sqrt();
    let mut out = vec![C::new(0.0, 0.0); d * d];
    for n in 0..d {
        for m in 0..d {
            let (ni, mi) = (n as isize, m as isize);
            let (nf, mf) = (n as f64, m as f64);
            let hl = 0.5 * p.lambda;
            let mut v = C::new(0.0, 0.0);
            v += hl * sq(nf * (nf - 1.0)) * at(ni - 2, mi);
            v += hl * sq(mf * (mf - 1.0)) * at(ni, mi - 2);
            v -= hl * sq((nf + 1.0) * (nf + 2.0)) * at(ni + 2, mi);
            v -= hl * sq((mf + 1.0) * (mf + 2.0)) * at(ni, mi + 2);
            let qn = nf * (nf - 1.0);
            let qm = mf * (mf - 1.0);
            v += C::new(0.0, -0.5 * p.chi_prime * (qn - qm)) * at(ni, mi);
            v += p.g2 * sq((nf + 1.0) * (nf + 2.0) * (mf + 1.0) * (mf + 2.0)) * at(ni + 2, mi + 2);
            v -= 0.5 * p.g2 * (qn + qm) * at(ni, mi);
            let n1 = b.n + 1.0;
            v += n1 * (2.0 * sq((nf + 1.0) * (mf + 1.0)) * at(ni + 1, mi + 1) - (nf + mf) * at(ni, mi));
            v += b.n * (2.0 * sq(nf * mf) * at(ni - 1, mi - 1) - (nf + 1.0 + mf + 1.0) * at(ni, mi));
            v -= b.m
                * (2.0 * sq((nf + 1.0) * mf) * at(ni + 1, mi - 1)
                    + sq((nf + 1.0) * (nf + 2.0)) * at(ni + 2, mi)
                    + sq(mf * (mf - 1.0)) * at(ni, mi - 2));
            v -= b.m.conj()
                * (2.0 * sq(nf * (mf + 1.0)) * at(ni - 1, mi + 1)
                    + sq(nf * (nf - 1.0)) * at(ni - 2, mi)
                    + sq((mf + 1.0) * (mf + 2.0)) * at(ni, mi + 2));
            out[n * d + m] = v;
        }
    }
    out
}

/// Random full-rank density matrix `GG†/Tr(GG†)`.
pub fn random_density_matrix<R: Rng>(rng: &mut R, cutoff: usize) -> FockDensityMatrix {
    let d = cutoff + 1;
    let g: Vec<C> = (0..d * d)
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut data = vec![C::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            data[i * d + j] = (0..d).map(|k| g[i * d + k] * g[j * d + k].conj()).sum();
        }
    }
    let tr: f64 = (0..d).map(|i| data[i * d + i].re).sum();
    for z in &mut data {
        *z /= tr;
    }
    FockDensityMatrix::from_row_major(cutoff, data).unwrap()
}

/// Random physical bath with `|M| ≤ √(N(N+1))`.
pub fn random_moments<R: Rng>(rng: &mut R) -> BathMoments {
    let n: f64 = rng.gen_range(0.0..3.0);
    let bound = (n * (n + 1.0)).sqrt();
    BathMoments {
        n,
        m: C::from_polar(bound * rng.gen_range(0.0..=1.0), rng.gen_range(-3.2..3.2)),
    }
}

pub fn random_params<R: Rng>(rng: &mut R) -> ModelParams {
    ModelParams {
        lambda: rng.gen_range(0.0..5.0),
        g2: rng.gen_range(0.0..2.0),
        chi_prime: rng.gen_range(-2.0..2.0),
    }
}

pub fn max_abs(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `Tr(a²ρ) = Σ_n √((n+1)(n+2)) ρ_{n+2,n}`.
pub fn trace_a2_rho(rho: &FockDensityMatrix) -> C {
    (0..rho.dim().saturating_sub(2))
        .map(|n| (((n + 1) * (n + 2)) as f64).sqrt() * rho[(n + 2, n)])
        .sum()
}
