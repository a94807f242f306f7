//! Independent verification oracle for the rank-2 rotation matrix elements.
//!
//! Evaluates ⟨J k m|D²₀ₛ|J' k' m'⟩ by direct numerical quadrature over the
//! z-y-z Euler angles (θ, φ, χ) with the explicit Wigner-d factorial sum,
//! never touching the 3-j path. Convention under test:
//! `D^J_{mk}(φ,θ,χ) = e^{-imφ} d^J_{mk}(θ) e^{-ikχ}` and
//! `⟨φθχ|Jkm⟩ = √((2J+1)/8π²) D^J_{mk}(φ,θ,χ)*`.

use super::AngularIndices;
use crate::error::{Error, Result};

const N_THETA: usize = 32;
const N_AZIMUTH: usize = 32;

fn factorial_f64(n: i32) -> f64 {
    (1..=n as u64).map(|i| i as f64).product()
}

/// Wigner small-d matrix element d^j_{mp,m}(θ) from the explicit sum.
pub fn wigner_small_d(j: i32, mp: i32, m: i32, theta: f64) -> f64 {
    if mp.abs() > j || m.abs() > j {
        return 0.0;
    }
    let prefactor = (factorial_f64(j + mp)
        * factorial_f64(j - mp)
        * factorial_f64(j + m)
        * factorial_f64(j - m))
    .sqrt();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let s_min = 0.max(m - mp);
    let s_max = (j + m).min(j - mp);
    let mut sum = 0.0;
    for t in s_min..=s_max {
        let sign = if (mp - m + t).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let denom = factorial_f64(j + m - t)
            * factorial_f64(t)
            * factorial_f64(mp - m + t)
            * factorial_f64(j - mp - t);
        sum += sign * c.powi(2 * j + m - mp - 2 * t) * s.powi(mp - m + 2 * t) / denom;
    }
    prefactor * sum
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton iteration from the Chebyshev estimate
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = (((2 * k + 1) as f64) * x * p1 - (k as f64) * p2) / (k as f64 + 1.0);
            }
            let dp = (n as f64) * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                let final_dp = dp;
                weights[i] = 2.0 / ((1.0 - x * x) * final_dp * final_dp);
                break;
            }
        }
        nodes[i] = x;
    }
    (nodes, weights)
}

/// Same matrix element as [`super::dmatrix_element`], by brute quadrature.
/// Restricted to J, J' ≤ 6 to bound the cost.
pub fn dmatrix_quadrature_oracle(bra: AngularIndices, s: i32, ket: AngularIndices) -> Result<f64> {
    if bra.j() > 6 || ket.j() > 6 {
        return Err(Error::Angular(format!(
            "quadrature oracle limited to J ≤ 6, got {} and {}",
            bra.j(),
            ket.j()
        )));
    }
    if s != 0 && s.abs() != 2 {
        return Err(Error::Angular(format!("s = {s} not in {{0, ±2}}")));
    }

    let (theta_nodes, theta_weights) = gauss_legendre(N_THETA);
    let norm = (((2 * bra.j() + 1) * (2 * ket.j() + 1)) as f64).sqrt()
        / (8.0 * std::f64::consts::PI * std::f64::consts::PI);

    // conj(ψ_bra) D²₀ₛ ψ_ket separates into
    //   e^{i(m_ket - m_bra)φ} · d-product(θ) · e^{i(k_ket - k_bra - s)χ}
    let dphi = (ket.m() - bra.m()) as f64;
    let dchi = (ket.k() - bra.k() - s) as f64;
    let step = 2.0 * std::f64::consts::PI / N_AZIMUTH as f64;

    let mut phi_int_re = 0.0;
    let mut phi_int_im = 0.0;
    let mut chi_int_re = 0.0;
    let mut chi_int_im = 0.0;
    for i in 0..N_AZIMUTH {
        let ang = step * i as f64;
        phi_int_re += (dphi * ang).cos() * step;
        phi_int_im += (dphi * ang).sin() * step;
        chi_int_re += (dchi * ang).cos() * step;
        chi_int_im += (dchi * ang).sin() * step;
    }

    let mut theta_int = 0.0;
    for (x, w) in theta_nodes.iter().zip(&theta_weights) {
        let theta = x.acos();
        theta_int += w
            * wigner_small_d(bra.j(), bra.m(), bra.k(), theta)
            * wigner_small_d(2, 0, s, theta)
            * wigner_small_d(ket.j(), ket.m(), ket.k(), theta);
    }

    // azimuthal integrals are real (δ-functions on the grid); the cross
    // imaginary parts vanish by periodicity
    debug_assert!(phi_int_im.abs() < 1e-10 && chi_int_im.abs() < 1e-10);
    Ok(norm * theta_int * phi_int_re * chi_int_re)
}
