//! Laser-molecule interaction in the impulsive limit: pulse → kick
//! strengths (β₁, β₂), kick generator in the eigenbasis, and the kick
//! itself by two independent routes (RK4 integration of the auxiliary-
//! parameter ODE, and the exact unitary exponential as oracle).

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::angular::{parity, wigner_3j, ThreeJArgs};
use crate::constants::{CM1_TO_RAD_PER_PS, HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::dynamics::WavepacketState;
use crate::error::{Error, Result};
use crate::rotor::{EigenstateTable, MolecularSpec};

type C64 = Complex<f64>;

/// One Gaussian-envelope pulse: ε²(t) = ε₀² exp(-t²/2σ²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub peak_intensity_w_cm2: f64,
    pub sigma_fs: f64,
    pub t0_ps: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if self.peak_intensity_w_cm2 < 0.0 {
            return Err(Error::Config {
                field: "intensity_w_cm2".into(),
                reason: format!("must be ≥ 0, got {}", self.peak_intensity_w_cm2),
            });
        }
        if self.sigma_fs <= 0.0 {
            return Err(Error::Config {
                field: "sigma_fs".into(),
                reason: format!("must be > 0, got {}", self.sigma_fs),
            });
        }
        Ok(())
    }

    /// Delta-kick validity: warns when σ exceeds 1% of the shortest
    /// rotational period in the active basis.
    pub fn impulsive_warning(&self, table: &EigenstateTable) -> Option<String> {
        let e_max = table
            .levels()
            .iter()
            .map(|l| l.energy_cm1)
            .fold(0.0, f64::max);
        if e_max <= 0.0 {
            return None;
        }
        let shortest_period_fs = 1e3 * 2.0 * std::f64::consts::PI / (CM1_TO_RAD_PER_PS * e_max);
        if self.sigma_fs > 0.01 * shortest_period_fs {
            Some(format!(
                "pulse sigma {} fs exceeds 1% of the shortest rotational period \
                 {:.2} fs in the J ≤ {} basis; delta-kick treatment degrades for \
                 the highest levels",
                self.sigma_fs, shortest_period_fs, table.j_max
            ))
        } else {
            None
        }
    }
}

/// Dimensionless kick strengths of the impulsive unitary
/// exp{-i[β₁D²₀₀ + β₂(D²₀₂ + D²₀₋₂)]}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickCoefficients {
    pub beta1: f64,
    pub beta2: f64,
}

impl KickCoefficients {
    pub fn zero() -> Self {
        KickCoefficients {
            beta1: 0.0,
            beta2: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.beta1 == 0.0 && self.beta2 == 0.0
    }
}

/// Peak field ε₀ in V/m from peak intensity in W/cm², via I = ½·c·ε_vac·ε₀².
pub fn field_from_intensity(peak_intensity_w_cm2: f64) -> f64 {
    let intensity_si = peak_intensity_w_cm2 * 1e4; // W/m²
    (2.0 * intensity_si / (SPEED_OF_LIGHT * VACUUM_PERMITTIVITY)).sqrt()
}

/// Kick strengths from the pulse fluence and the polarizability
/// anisotropies:
/// β₁ = -(1/4ħ)·[(α_aa-α_bb + α_aa-α_cc)/3]·∫ε²dt,
/// β₂ = +(1/4ħ)·[(α_cc-α_bb)/√6]·∫ε²dt,
/// with ∫ε²dt = √(2π)·σ·ε₀² and α converted to SI as 4πε_vac·α_vol.
pub fn kick_strengths(pulse: &PulseSpec, spec: &MolecularSpec) -> KickCoefficients {
    let eps0 = field_from_intensity(pulse.peak_intensity_w_cm2);
    let fluence = (2.0 * std::f64::consts::PI).sqrt() * pulse.sigma_fs * 1e-15 * eps0 * eps0;
    let to_si = 4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * 1e-30; // Å³ → C·m²/V
    let alpha_ab = spec.alpha_aa - spec.alpha_bb;
    let alpha_ac = spec.alpha_aa - spec.alpha_cc;
    let alpha_cb = spec.alpha_cc - spec.alpha_bb;
    let beta1 = -(to_si * (alpha_ab + alpha_ac) / 3.0) * fluence / (4.0 * HBAR);
    let beta2 = (to_si * alpha_cb / 6f64.sqrt()) * fluence / (4.0 * HBAR);
    KickCoefficients { beta1, beta2 }
}

/// ⟨J'τ'm|D²₀ₛ|Jτm⟩ over the (row, col) = (J'τ', Jτ) pairs of a per-m
/// eigenstate basis given by `level_idx` into the table.
pub fn eigenbasis_d_matrix(
    table: &EigenstateTable,
    m: i32,
    s: i32,
    level_idx: &[usize],
) -> DMatrix<f64> {
    assert!(s == 0 || s.abs() == 2, "s must be 0 or ±2");
    let dim = level_idx.len();
    let mut out = DMatrix::zeros(dim, dim);
    // one m-side 3-j per (J_row, J_col) pair, one k-side 3-j per k
    let mut cache: std::collections::HashMap<(i32, i32), (f64, Vec<f64>)> =
        std::collections::HashMap::new();
    for (r, &ri) in level_idx.iter().enumerate() {
        let bra = &table.levels()[ri];
        for (c, &ci) in level_idx.iter().enumerate() {
            let ket = &table.levels()[ci];
            if (bra.j - ket.j).abs() > 2 {
                continue;
            }
            let (tj_m, tj_k) = cache.entry((bra.j, ket.j)).or_insert_with(|| {
                let tj_m = wigner_3j(ThreeJArgs::new(bra.j, 2, ket.j, m, 0, -m))
                    .expect("j within limits");
                let tj_k: Vec<f64> = (-bra.j..=bra.j)
                    .map(|k| {
                        wigner_3j(ThreeJArgs::new(bra.j, 2, ket.j, k, s, -(k + s)))
                            .expect("j within limits")
                            * parity(k + s + m)
                    })
                    .collect();
                (tj_m, tj_k)
            });
            if *tj_m == 0.0 {
                continue;
            }
            let norm = (((2 * bra.j + 1) * (2 * ket.j + 1)) as f64).sqrt();
            let mut sum = 0.0;
            for (ki, k) in (-bra.j..=bra.j).enumerate() {
                let kp = k + s;
                if kp.abs() > ket.j {
                    continue;
                }
                sum += bra.coeffs[ki] * ket.coeffs[(kp + ket.j) as usize] * tj_k[ki];
            }
            out[(r, c)] = norm * *tj_m * sum;
        }
    }
    out
}

/// Per-m kick generator G = β₁·M[D²₀₀] + β₂·(M[D²₀₂] + M[D²₀₋₂]) in the
/// eigenbasis; real symmetric and block-diagonal over isomer sectors.
#[derive(Debug, Clone)]
pub struct KickGenerator {
    pub m: i32,
    pub matrix: DMatrix<f64>,
}

/// Build the kick generator over the full (J,τ) basis for this m and
/// verify its symmetry and para/ortho block structure.
pub fn build_kick_generator(
    betas: &KickCoefficients,
    table: &EigenstateTable,
    m: i32,
) -> Result<KickGenerator> {
    let idx = table.basis_for_m(m);
    let matrix = kick_matrix_on(table, m, betas, &idx);

    let asym = (&matrix - matrix.transpose()).amax();
    if asym > 1e-12 {
        return Err(Error::Angular(format!(
            "kick generator asymmetry {asym:.3e} exceeds 1e-12"
        )));
    }
    let mut leak = 0.0f64;
    for (r, &ri) in idx.iter().enumerate() {
        for (c, &ci) in idx.iter().enumerate() {
            if table.levels()[ri].isomer != table.levels()[ci].isomer {
                leak = leak.max(matrix[(r, c)].abs());
            }
        }
    }
    if leak > 1e-12 {
        return Err(Error::IsomerLeakage { leak });
    }
    Ok(KickGenerator { m, matrix })
}

/// G restricted to an arbitrary level subset (used for the per-isomer
/// fast path; the D-matrix elements never couple the sectors).
pub(crate) fn kick_matrix_on(
    table: &EigenstateTable,
    m: i32,
    betas: &KickCoefficients,
    level_idx: &[usize],
) -> DMatrix<f64> {
    let dim = level_idx.len();
    if betas.is_zero() {
        return DMatrix::zeros(dim, dim);
    }
    let mut g = eigenbasis_d_matrix(table, m, 0, level_idx) * betas.beta1;
    if betas.beta2 != 0.0 {
        g += (eigenbasis_d_matrix(table, m, 2, level_idx)
            + eigenbasis_d_matrix(table, m, -2, level_idx))
            * betas.beta2;
    }
    g
}

/// Precomputed eigendecomposition of a kick generator; applies the exact
/// unitary exp(-iG) in O(dim²).
#[derive(Debug, Clone)]
pub struct KickOperator {
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
}

impl KickOperator {
    pub fn new(generator: &KickGenerator) -> Self {
        Self::from_matrix(&generator.matrix)
    }

    pub(crate) fn from_matrix(matrix: &DMatrix<f64>) -> Self {
        let eig = matrix.clone().symmetric_eigen();
        KickOperator {
            eigvals: eig.eigenvalues,
            eigvecs: eig.eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    /// c⁺ = V·exp(-iΛ)·Vᵀ·c
    pub fn apply(&self, amplitudes: &DVector<C64>) -> DVector<C64> {
        let projected = self.eigvecs.transpose().map(C64::from) * amplitudes;
        let rotated = DVector::from_iterator(
            projected.len(),
            projected
                .iter()
                .zip(self.eigvals.iter())
                .map(|(c, &lambda)| c * C64::new(0.0, -lambda).exp()),
        );
        self.eigvecs.map(C64::from) * rotated
    }
}

/// Exact kick c⁺ = exp(-iG)·c via eigendecomposition of G; the oracle for
/// [`apply_kick_ode`].
pub fn apply_kick_exact(state: &WavepacketState, generator: &KickGenerator) -> WavepacketState {
    assert_eq!(state.m, generator.m, "state and generator m mismatch");
    let amplitudes = KickOperator::new(generator).apply(&state.amplitudes);
    WavepacketState {
        m: state.m,
        amplitudes,
        t_ps: state.t_ps,
    }
}

pub const DEFAULT_ODE_STEPS: usize = 512;

/// Kick by fixed-step RK4 integration of dc/dξ = -i·G·c from ξ=0 to 1.
/// The result is not renormalized; norm drift ≥ 1e-10 is an error.
pub fn apply_kick_ode(
    state: &WavepacketState,
    generator: &KickGenerator,
    steps: usize,
) -> Result<WavepacketState> {
    assert_eq!(state.m, generator.m, "state and generator m mismatch");
    assert!(steps > 0);
    let g = generator.matrix.map(|x| C64::new(0.0, -x)); // -iG
    let h = 1.0 / steps as f64;
    let mut c = state.amplitudes.clone();
    let h2 = C64::new(h / 2.0, 0.0);
    let h1 = C64::new(h, 0.0);
    let h6 = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for _ in 0..steps {
        let k1 = &g * &c;
        let k2 = &g * &(&c + &k1 * h2);
        let k3 = &g * &(&c + &k2 * h2);
        let k4 = &g * &(&c + &k3 * h1);
        c += (k1 + k2 * two + k3 * two + k4) * h6;
    }
    let drift = (c.norm() - state.amplitudes.norm()).abs();
    if drift >= 1e-10 {
        return Err(Error::NormDrift { drift });
    }
    Ok(WavepacketState {
        m: state.m,
        amplitudes: c,
        t_ps: state.t_ps,
    })
}
