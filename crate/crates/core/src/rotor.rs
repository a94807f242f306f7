//! Rigid asymmetric-top rotor: Hamiltonian in the a-axis-quantized
//! symmetric-top basis, eigenstates |J,τ,m⟩ and their para/ortho
//! classification through the C2v(M) ↔ D2 rotation operations.
//!
//! The quantization axis is the a-axis (smallest moment of inertia,
//! largest rotational constant), so the π-rotation phases of the
//! classification act verbatim on the k quantum number.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::rotational_constant_cm1;
use crate::error::{Error, Result};

/// Rigid molecule: principal moments of inertia (kg·m²) and diagonal
/// polarizability volumes (Å³) in the principal-axis frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MolecularSpec {
    pub i_a: f64,
    pub i_b: f64,
    pub i_c: f64,
    pub alpha_aa: f64,
    pub alpha_bb: f64,
    pub alpha_cc: f64,
}

impl MolecularSpec {
    /// Water: principal moments of inertia and polarizability volumes.
    pub fn water() -> Self {
        MolecularSpec {
            i_a: 1.025e-47,
            i_b: 1.921e-47,
            i_c: 2.946e-47,
            alpha_aa: 1.528,
            alpha_bb: 1.468,
            alpha_cc: 1.415,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.i_a > 0.0 && self.i_a < self.i_b && self.i_b < self.i_c) {
            return Err(Error::Molecule(format!(
                "moments must satisfy 0 < I_a < I_b < I_c, got ({:e}, {:e}, {:e})",
                self.i_a, self.i_b, self.i_c
            )));
        }
        let planarity = (self.i_c - self.i_a - self.i_b).abs() / self.i_c;
        if planarity >= 1e-3 {
            return Err(Error::Molecule(format!(
                "planarity defect |I_c - I_a - I_b|/I_c = {planarity:.2e} ≥ 1e-3"
            )));
        }
        Ok(())
    }

    /// Rotational constants (A, B, C) in cm⁻¹, A > B > C.
    pub fn rotational_constants(&self) -> (f64, f64, f64) {
        (
            rotational_constant_cm1(self.i_a),
            rotational_constant_cm1(self.i_b),
            rotational_constant_cm1(self.i_c),
        )
    }
}

/// Irreducible representation of C2v(M); characters over (E, (12), E*, (12)*).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryLabel {
    A1,
    A2,
    B1,
    B2,
}

impl SymmetryLabel {
    /// Character row over (E, (12), E*, (12)*).
    pub fn characters(&self) -> [i32; 4] {
        match self {
            SymmetryLabel::A1 => [1, 1, 1, 1],
            SymmetryLabel::A2 => [1, 1, -1, -1],
            SymmetryLabel::B1 => [1, -1, -1, 1],
            SymmetryLabel::B2 => [1, -1, 1, -1],
        }
    }

    fn from_signs(chi_12: i32, chi_estar: i32, chi_12star: i32) -> Option<Self> {
        [
            SymmetryLabel::A1,
            SymmetryLabel::A2,
            SymmetryLabel::B1,
            SymmetryLabel::B2,
        ]
        .into_iter()
        .find(|label| {
            let [_, a, b, c] = label.characters();
            (a, b, c) == (chi_12, chi_estar, chi_12star)
        })
    }

    pub fn isomer(&self) -> SpinIsomer {
        match self {
            SymmetryLabel::A1 | SymmetryLabel::A2 => SpinIsomer::Para,
            SymmetryLabel::B1 | SymmetryLabel::B2 => SpinIsomer::Ortho,
        }
    }
}

impl std::fmt::Display for SymmetryLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SymmetryLabel::A1 => "A1",
            SymmetryLabel::A2 => "A2",
            SymmetryLabel::B1 => "B1",
            SymmetryLabel::B2 => "B2",
        };
        f.write_str(s)
    }
}

/// Nuclear-spin isomer; ortho carries statistical weight 3, para 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinIsomer {
    Para,
    Ortho,
}

impl SpinIsomer {
    pub fn statistical_weight(&self) -> u32 {
        match self {
            SpinIsomer::Para => 1,
            SpinIsomer::Ortho => 3,
        }
    }
}

impl std::fmt::Display for SpinIsomer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpinIsomer::Para => "para",
            SpinIsomer::Ortho => "ortho",
        })
    }
}

/// One asymmetric-top level |J,τ⟩ (m-independent without external fields).
/// `coeffs[k + J]` is the real expansion coefficient over the a-axis
/// symmetric-top kets |J,k⟩, k = -J..J.
#[derive(Debug, Clone)]
pub struct RotorEigenstate {
    pub j: i32,
    pub tau: i32,
    pub energy_cm1: f64,
    pub coeffs: DVector<f64>,
    pub symmetry: SymmetryLabel,
    pub isomer: SpinIsomer,
}

/// All classified levels with J ≤ J_max, energies referenced to E(0,0) = 0.
#[derive(Debug, Clone)]
pub struct EigenstateTable {
    pub j_max: i32,
    pub a_cm1: f64,
    pub b_cm1: f64,
    pub c_cm1: f64,
    levels: Vec<RotorEigenstate>,
}

/// π-rotations about the principal axes; the nontrivial C2v(M) operations
/// act on rotational states as ((12), E*, (12)*) ↔ (R_b^π, R_c^π, R_a^π).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationOp {
    /// R_a^π: |J,k⟩ → (-1)^k |J,k⟩
    APi,
    /// R_b^π: |J,k⟩ → (-1)^J |J,-k⟩
    BPi,
    /// R_c^π: |J,k⟩ → (-1)^J (-1)^k |J,-k⟩
    CPi,
}

/// Rigid-rotor Hamiltonian block for one J in the |J,k⟩ basis, cm⁻¹:
/// ⟨k|H|k⟩ = (B+C)/2·[J(J+1) - k²] + A·k²,
/// ⟨k±2|H|k⟩ = (B-C)/4·√([J(J+1)-k(k±1)][J(J+1)-(k±1)(k±2)]).
pub fn build_hamiltonian_block(spec: &MolecularSpec, j: i32) -> DMatrix<f64> {
    let (a, b, c) = spec.rotational_constants();
    let dim = (2 * j + 1) as usize;
    let jj = (j * (j + 1)) as f64;
    let mut h = DMatrix::zeros(dim, dim);
    for row in 0..dim {
        let k = row as i32 - j;
        h[(row, row)] = 0.5 * (b + c) * (jj - (k * k) as f64) + a * (k * k) as f64;
        if row + 2 < dim {
            let kf = k as f64;
            let elem = 0.25
                * (b - c)
                * ((jj - kf * (kf + 1.0)) * (jj - (kf + 1.0) * (kf + 2.0))).sqrt();
            h[(row + 2, row)] = elem;
            h[(row, row + 2)] = elem;
        }
    }
    h
}

/// Diagonalize one J block. Returns (energy, coefficients) sorted ascending,
/// eigenvectors normalized with the largest-magnitude coefficient positive.
pub fn solve_block(h: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    order
        .into_iter()
        .map(|i| {
            let mut v: DVector<f64> = eig.eigenvectors.column(i).into();
            fix_sign(&mut v);
            (eig.eigenvalues[i], v)
        })
        .collect()
}

fn fix_sign(v: &mut DVector<f64>) {
    let mut idx = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[idx].abs() {
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        v.neg_mut();
    }
}

/// Apply a π-rotation to a coefficient vector over k = -J..J.
pub fn apply_rotation(op: RotationOp, coeffs: &DVector<f64>, j: i32) -> DVector<f64> {
    let dim = (2 * j + 1) as usize;
    assert_eq!(coeffs.len(), dim, "coefficient vector size mismatch");
    let j_sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    DVector::from_fn(dim, |row, _| {
        let k = row as i32 - j;
        let k_sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let flipped = (dim - 1 - row) as usize;
        match op {
            RotationOp::APi => k_sign * coeffs[row],
            RotationOp::BPi => j_sign * coeffs[flipped],
            RotationOp::CPi => j_sign * k_sign * coeffs[flipped],
        }
    })
}

const CLASSIFY_TOL: f64 = 1e-10;

/// Sign of the rotation applied to an eigenvector: +1, -1, or None if the
/// vector is not reproduced up to sign (basis or degeneracy bug).
fn rotation_sign(op: RotationOp, coeffs: &DVector<f64>, j: i32) -> Option<i32> {
    let rotated = apply_rotation(op, coeffs, j);
    if (&rotated - coeffs).amax() < CLASSIFY_TOL {
        Some(1)
    } else if (&rotated + coeffs).amax() < CLASSIFY_TOL {
        Some(-1)
    } else {
        None
    }
}

/// Classify an eigenvector of one J block against the character table.
pub fn classify_symmetry(j: i32, tau: i32, coeffs: &DVector<f64>) -> Result<(SymmetryLabel, SpinIsomer)> {
    let fail = |op: &str| Error::Classification {
        j,
        tau,
        reason: format!("{op} does not reproduce the state up to ±1"),
    };
    let chi_12 = rotation_sign(RotationOp::BPi, coeffs, j).ok_or_else(|| fail("R_b^pi"))?;
    let chi_estar = rotation_sign(RotationOp::CPi, coeffs, j).ok_or_else(|| fail("R_c^pi"))?;
    let chi_12star = rotation_sign(RotationOp::APi, coeffs, j).ok_or_else(|| fail("R_a^pi"))?;
    let label = SymmetryLabel::from_signs(chi_12, chi_estar, chi_12star).ok_or_else(|| {
        Error::Classification {
            j,
            tau,
            reason: format!("sign triple ({chi_12},{chi_estar},{chi_12star}) matches no irrep"),
        }
    })?;
    Ok((label, label.isomer()))
}

/// Re-diagonalize a numerically degenerate cluster inside the symmetry
/// eigenspaces so each vector carries definite rotation signs.
fn symmetrize_cluster(j: i32, states: &mut [(f64, DVector<f64>)]) {
    // project onto the four character combinations of (R_b, R_a)
    let mut replaced = Vec::new();
    for &(sb, sa) in &[(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        for (_, v) in states.iter() {
            let rb = apply_rotation(RotationOp::BPi, v, j);
            let ra = apply_rotation(RotationOp::APi, v, j);
            let rab = apply_rotation(RotationOp::APi, &rb, j);
            let mut p = v + rb * (sb as f64) + ra * (sa as f64) + rab * ((sb * sa) as f64);
            // Gram-Schmidt against already accepted vectors
            for (_, u) in &replaced {
                let u: &DVector<f64> = u;
                p -= u * u.dot(&p);
            }
            let norm = p.norm();
            if norm > 1e-6 {
                p /= norm;
                fix_sign(&mut p);
                let energy = states[0].0;
                replaced.push((energy, p));
            }
            if replaced.len() == states.len() {
                break;
            }
        }
        if replaced.len() == states.len() {
            break;
        }
    }
    if replaced.len() == states.len() {
        for (slot, new) in states.iter_mut().zip(replaced) {
            *slot = new;
        }
    }
}

/// Project a vector onto its dominant joint (R_b, R_a) symmetry component.
/// Finite-gap doublets leave contamination of order ε·‖H‖/gap in the raw
/// eigenvectors; the projection removes it. Returns false if no component
/// dominates (the vector belongs in a degenerate cluster instead).
fn purify_symmetry(j: i32, v: &mut DVector<f64>) -> bool {
    let rb = apply_rotation(RotationOp::BPi, v, j);
    let ra = apply_rotation(RotationOp::APi, v, j);
    let rab = apply_rotation(RotationOp::APi, &rb, j);
    let mut best: Option<DVector<f64>> = None;
    let mut best_norm = 0.0;
    for &(sb, sa) in &[(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let p = (&*v + &rb * sb + &ra * sa + &rab * (sb * sa)) / 4.0;
        let norm = p.norm();
        if norm > best_norm {
            best_norm = norm;
            best = Some(p);
        }
    }
    if best_norm * best_norm > 0.99 {
        let mut p = best.expect("some projection is nonzero");
        p /= best_norm;
        fix_sign(&mut p);
        *v = p;
        true
    } else {
        false
    }
}

const DEGENERACY_GAP_CM1: f64 = 1e-6;

/// Build the complete classified table of levels with J ≤ j_max,
/// energies referenced to the (0,0) ground state.
pub fn build_eigentable(spec: &MolecularSpec, j_max: i32) -> Result<EigenstateTable> {
    spec.validate()?;
    let (a, b, c) = spec.rotational_constants();
    let mut levels = Vec::new();
    for j in 0..=j_max {
        let h = build_hamiltonian_block(spec, j);
        let mut solved = solve_block(&h);
        // near-degenerate clusters are symmetrized before classification
        let mut start = 0;
        while start < solved.len() {
            let mut end = start + 1;
            while end < solved.len() && solved[end].0 - solved[end - 1].0 < DEGENERACY_GAP_CM1 {
                end += 1;
            }
            if end - start > 1 {
                symmetrize_cluster(j, &mut solved[start..end]);
            }
            start = end;
        }
        for (idx, (energy, mut coeffs)) in solved.into_iter().enumerate() {
            let tau = idx as i32 - j;
            purify_symmetry(j, &mut coeffs);
            let (symmetry, isomer) = classify_symmetry(j, tau, &coeffs)?;
            levels.push(RotorEigenstate {
                j,
                tau,
                energy_cm1: energy,
                coeffs,
                symmetry,
                isomer,
            });
        }
    }
    Ok(EigenstateTable {
        j_max,
        a_cm1: a,
        b_cm1: b,
        c_cm1: c,
        levels,
    })
}

impl EigenstateTable {
    pub fn levels(&self) -> &[RotorEigenstate] {
        &self.levels
    }

    /// Level (J, τ); panics if out of range.
    pub fn level(&self, j: i32, tau: i32) -> &RotorEigenstate {
        assert!(j >= 0 && j <= self.j_max && tau.abs() <= j, "level ({j},{tau}) out of range");
        // levels are stored J-major, τ ascending: offset Σ_{j'<J}(2j'+1) = J²
        &self.levels[(j * j + tau + j) as usize]
    }

    /// Indices (into `levels`) of the per-m basis: all (J, τ) with J ≥ |m|,
    /// J-major, τ ascending.
    pub fn basis_for_m(&self, m: i32) -> Vec<usize> {
        assert!(m.abs() <= self.j_max, "|m| exceeds J_max");
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, lvl)| lvl.j >= m.abs())
            .map(|(i, _)| i)
            .collect()
    }

    /// CSV dump with columns J, tau, energy_cm1, symmetry, isomer.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "J,tau,energy_cm1,symmetry,isomer")?;
        for lvl in &self.levels {
            writeln!(
                out,
                "{},{},{:.11e},{},{}",
                lvl.j, lvl.tau, lvl.energy_cm1, lvl.symmetry, lvl.isomer
            )?;
        }
        Ok(())
    }
}
