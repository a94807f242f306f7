//! Exact angular-momentum algebra: Wigner 3-j symbols, Clebsch-Gordan
//! coefficients and rank-2 rotation-matrix elements in the symmetric-top
//! basis.
//!
//! The 3-j symbol is evaluated with the Racah sum carried out in exact
//! big-integer rationals, so matrix elements are reproducible bit-stably
//! and free of factorial cancellation up to the `J_LIMIT` cutoff.
//!
//! Wigner-D convention (frozen here and arbitrated by the quadrature
//! oracle in [`quadrature`]):
//! `D^J_{mk}(φ,θ,χ) = e^{-imφ} d^J_{mk}(θ) e^{-ikχ}` with z-y-z Euler
//! angles, and symmetric-top wavefunctions
//! `⟨φθχ|Jkm⟩ = √((2J+1)/8π²) · D^J_{mk}(φ,θ,χ)*`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub mod quadrature;

/// Largest angular momentum accepted by the exact 3-j evaluator.
pub const J_LIMIT: i32 = 60;

/// Symmetric-top labels (J, k, m): total angular momentum, body-frame
/// projection on the a-axis and lab-frame projection on Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularIndices {
    j: i32,
    k: i32,
    m: i32,
}

impl AngularIndices {
    pub fn new(j: i32, k: i32, m: i32) -> Result<Self> {
        if j < 0 {
            return Err(Error::Angular(format!("negative J = {j}")));
        }
        if k.abs() > j || m.abs() > j {
            return Err(Error::Angular(format!(
                "projections out of range: J={j}, k={k}, m={m}"
            )));
        }
        Ok(AngularIndices { j, k, m })
    }

    pub fn j(&self) -> i32 {
        self.j
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn m(&self) -> i32 {
        self.m
    }
}

/// Arguments of a 3-j symbol, integer angular momenta only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThreeJArgs {
    pub j1: i32,
    pub j2: i32,
    pub j3: i32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl ThreeJArgs {
    pub fn new(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> Self {
        ThreeJArgs {
            j1,
            j2,
            j3,
            m1,
            m2,
            m3,
        }
    }
}

/// (-1)^n for possibly negative n.
pub(crate) fn parity(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial(n: i32) -> &'static BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(202);
        let mut acc = BigInt::one();
        v.push(acc.clone());
        for i in 1..=201u32 {
            acc *= i;
            v.push(acc.clone());
        }
        v
    });
    &table[n as usize]
}

fn triangle_ok(j1: i32, j2: i32, j3: i32) -> bool {
    (j1 - j2).abs() <= j3 && j3 <= j1 + j2
}

/// Standard Wigner 3-j symbol via the Racah sum in exact rationals.
///
/// Returns exactly 0 when the triangle condition or m1+m2+m3 = 0 fails.
pub fn wigner_3j(args: ThreeJArgs) -> Result<f64> {
    let ThreeJArgs {
        j1,
        j2,
        j3,
        m1,
        m2,
        m3,
    } = args;
    if j1 < 0 || j2 < 0 || j3 < 0 {
        return Err(Error::Angular(format!("negative j in ({j1},{j2},{j3})")));
    }
    if j1 > J_LIMIT || j2 > J_LIMIT || j3 > J_LIMIT {
        return Err(Error::Angular(format!(
            "j exceeds limit {J_LIMIT}: ({j1},{j2},{j3})"
        )));
    }
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return Ok(0.0);
    }
    if m1 + m2 + m3 != 0 || !triangle_ok(j1, j2, j3) {
        return Ok(0.0);
    }

    // Racah sum S = Σ_t (-1)^t / Π(factorials); all terms exact rationals.
    let t_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let t_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let denom = factorial(t)
            * factorial(j3 - j2 + m1 + t)
            * factorial(j3 - j1 - m2 + t)
            * factorial(j1 + j2 - j3 - t)
            * factorial(j1 - m1 - t)
            * factorial(j2 + m2 - t);
        let mut term = BigRational::new(BigInt::one(), denom);
        if t.rem_euclid(2) == 1 {
            term = -term;
        }
        sum += term;
    }
    if sum.is_zero() {
        return Ok(0.0);
    }

    // Radicand P = Δ(j1 j2 j3) · Π (j_i ± m_i)!
    let delta_num = factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3);
    let delta = BigRational::new(delta_num, factorial(j1 + j2 + j3 + 1).clone());
    let mfact: BigInt = factorial(j1 + m1)
        * factorial(j1 - m1)
        * factorial(j2 + m2)
        * factorial(j2 - m2)
        * factorial(j3 + m3)
        * factorial(j3 - m3);
    let radicand = delta * BigRational::from_integer(mfact) * &sum * &sum;

    let sign = parity(j1 - j2 - m3) * if sum.is_negative() { -1.0 } else { 1.0 };
    let magnitude = radicand
        .to_f64()
        .ok_or_else(|| Error::Angular("3-j radicand overflows f64".into()))?
        .sqrt();
    Ok(sign * magnitude)
}

/// Clebsch-Gordan coefficient ⟨j1 m1 j2 m2 | j3 m3⟩, phase-consistent with
/// [`wigner_3j`] through ⟨j1m1j2m2|j3m3⟩ = (-1)^{j1-j2+m3}√(2j3+1)·3j(m1,m2,-m3).
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j3: i32, m3: i32) -> Result<f64> {
    let tj = wigner_3j(ThreeJArgs::new(j1, j2, j3, m1, m2, -m3))?;
    Ok(parity(j1 - j2 + m3) * ((2 * j3 + 1) as f64).sqrt() * tj)
}

/// Matrix element ⟨J k m|D²₀ₛ|J' k' m⟩ in the symmetric-top basis:
///
/// `(-1)^{k'+m} √((2J+1)(2J'+1)) · 3j(J,2,J'; m,0,-m) · 3j(J,2,J'; k,s,-k')`
///
/// Zero whenever |J-2| ≤ J' ≤ J+2 fails or k' ∉ {k, k±2} under the given s.
pub fn dmatrix_element(bra: AngularIndices, s: i32, ket: AngularIndices) -> Result<f64> {
    if s != 0 && s.abs() != 2 {
        return Err(Error::Angular(format!("s = {s} not in {{0, ±2}}")));
    }
    if bra.m != ket.m {
        return Err(Error::Angular(format!(
            "m not conserved: bra.m = {}, ket.m = {}",
            bra.m, ket.m
        )));
    }
    let (j, k, m) = (bra.j, bra.k, bra.m);
    let (jp, kp) = (ket.j, ket.k);
    let tj_m = wigner_3j(ThreeJArgs::new(j, 2, jp, m, 0, -m))?;
    if tj_m == 0.0 {
        return Ok(0.0);
    }
    let tj_k = wigner_3j(ThreeJArgs::new(j, 2, jp, k, s, -kp))?;
    let norm = (((2 * j + 1) * (2 * jp + 1)) as f64).sqrt();
    Ok(parity(kp + m) * norm * tj_m * tj_k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tj(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
        wigner_3j(ThreeJArgs::new(j1, j2, j3, m1, m2, m3)).unwrap()
    }

    #[test]
    fn wigner_3j_trivial_and_closed_forms() {
        assert_eq!(tj(0, 0, 0, 0, 0, 0), 1.0);
        // (j j 0; m -m 0) = (-1)^{j-m}/√(2j+1)
        assert!((tj(1, 1, 0, 1, -1, 0) - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        // Racah sum evaluated exactly: (2 2 2; 0 0 0) = -√(2/35)
        assert!((tj(2, 2, 2, 0, 0, 0) + (2.0 / 35.0f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn wigner_3j_selection_rules() {
        assert_eq!(tj(1, 1, 3, 0, 0, 0), 0.0); // triangle violated
        assert_eq!(tj(1, 1, 1, 1, 1, 1), 0.0); // m-sum violated
        assert!(wigner_3j(ThreeJArgs::new(-1, 0, 1, 0, 0, 0)).is_err());
        assert!(wigner_3j(ThreeJArgs::new(J_LIMIT + 1, 0, J_LIMIT + 1, 0, 0, 0)).is_err());
    }

    #[test]
    fn wigner_3j_closed_form_family() {
        // (j j 0; m -m 0) = (-1)^{j-m}/√(2j+1) for all j ≤ 20
        for j in 0..=20 {
            for m in -j..=j {
                let expected = parity(j - m) / ((2 * j + 1) as f64).sqrt();
                let got = tj(j, j, 0, m, -m, 0);
                assert!(
                    (got - expected).abs() < 1e-12 * expected.abs().max(1.0),
                    "j={j} m={m}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn clebsch_gordan_examples() {
        assert_eq!(clebsch_gordan(0, 0, 0, 0, 0, 0).unwrap(), 1.0);
        let cg = clebsch_gordan(1, 1, 1, -1, 0, 0).unwrap();
        assert!((cg - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(clebsch_gordan(1, 0, 1, 0, 3, 0).unwrap(), 0.0);
    }

    #[test]
    fn orthogonality_sum_rule() {
        // Σ_{m1,m2} (2j3+1)·3j(j1,j2,j3;m1,m2,m3)·3j(j1,j2,j3';m1,m2,m3)
        //   = δ_{j3 j3'} for all j ≤ 6
        for j1 in 0..=6 {
            for j2 in 0..=6 {
                for j3 in (j1 - j2).abs()..=(j1 + j2).min(6) {
                    for j3p in (j1 - j2).abs()..=(j1 + j2).min(6) {
                        for m3 in -j3.min(j3p)..=j3.min(j3p) {
                            let mut sum = 0.0;
                            for m1 in -j1..=j1 {
                                let m2 = -m1 - m3;
                                if m2.abs() > j2 {
                                    continue;
                                }
                                sum += (2 * j3 + 1) as f64
                                    * tj(j1, j2, j3, m1, m2, m3)
                                    * tj(j1, j2, j3p, m1, m2, m3);
                            }
                            let expected = if j3 == j3p { 1.0 } else { 0.0 };
                            assert!(
                                (sum - expected).abs() < 1e-10,
                                "({j1},{j2},{j3},{j3p},m3={m3}): {sum}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn permutation_symmetry() {
        // cyclic invariance; (-1)^{j1+j2+j3} under a column swap
        for j1 in 0..=5 {
            for j2 in 0..=5 {
                for j3 in (j1 - j2).abs()..=(j1 + j2).min(5) {
                    for m1 in -j1..=j1 {
                        for m2 in -j2..=j2 {
                            let m3 = -m1 - m2;
                            if m3.abs() > j3 {
                                continue;
                            }
                            let v = tj(j1, j2, j3, m1, m2, m3);
                            let cyc = tj(j2, j3, j1, m2, m3, m1);
                            let swap = tj(j2, j1, j3, m2, m1, m3);
                            let sign = parity(j1 + j2 + j3);
                            assert!((v - cyc).abs() < 1e-13, "cyclic at ({j1},{j2},{j3})");
                            assert!(
                                (swap - sign * v).abs() < 1e-13,
                                "swap at ({j1},{j2},{j3};{m1},{m2},{m3})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dmatrix_element_examples() {
        let e = |j, k, m, s, jp, kp, mp| {
            dmatrix_element(
                AngularIndices::new(j, k, m).unwrap(),
                s,
                AngularIndices::new(jp, kp, mp).unwrap(),
            )
            .unwrap()
        };
        assert!((e(0, 0, 0, 0, 2, 0, 0) - 1.0 / 5f64.sqrt()).abs() < 1e-14);
        assert!((e(1, 0, 0, 0, 1, 0, 0) - 0.4).abs() < 1e-14);
        assert_eq!(e(0, 0, 0, 0, 3, 0, 0), 0.0); // ΔJ rule
        assert_eq!(e(2, 0, 0, 2, 2, 1, 0), 0.0); // k' = k+s rule
    }

    #[test]
    fn dmatrix_element_rejects_bad_input() {
        let a = AngularIndices::new(1, 0, 0).unwrap();
        let b = AngularIndices::new(1, 0, 1).unwrap();
        assert!(dmatrix_element(a, 1, a).is_err());
        assert!(dmatrix_element(a, 0, b).is_err());
        assert!(AngularIndices::new(1, 2, 0).is_err());
        assert!(AngularIndices::new(-1, 0, 0).is_err());
    }
}
