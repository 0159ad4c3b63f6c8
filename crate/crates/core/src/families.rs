//! Four-qubit families whose members share every two-body marginal:
//! superpositions of `|0000>`, `|W_4>`, `|D_2^4>` and `|1111>`.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{arg, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::states::{all_pairs, default_labels, fidelity, marginal_distance, marginal_set, PureState};

/// Feasibility tolerance of the family-C phase condition.
pub const FEASIBILITY_TOL: f64 = 1e-10;
/// Default number of points of a phase grid on `[0, 2π)`.
pub const DEFAULT_GRID: usize = 20;

fn bits_index(bits: &str) -> usize {
    bits.chars().fold(0, |acc, b| 2 * acc + usize::from(b == '1'))
}

fn qubits(terms: &[(&str, C64)]) -> Vec<C64> {
    let mut amps = vec![linalg::ZERO; 16];
    for (bits, c) in terms {
        amps[bits_index(bits)] += *c;
    }
    amps
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn uniform(strings: &[&str]) -> PureState {
    let w = real(1.0 / (strings.len() as f64).sqrt());
    let terms: Vec<(&str, C64)> = strings.iter().map(|s| (*s, w)).collect();
    PureState::normalized(default_labels(4), vec![2; 4], qubits(&terms)).expect("non-zero")
}

pub fn w4() -> PureState {
    uniform(&["0001", "0010", "0100", "1000"])
}

pub fn dicke2() -> PureState {
    uniform(&["0011", "0101", "1001", "0110", "1010", "1100"])
}

pub fn dicke3() -> PureState {
    uniform(&["0111", "1011", "1101", "1110"])
}

fn ket(bits: &str) -> Vec<C64> {
    qubits(&[(bits, linalg::ONE)])
}

fn combine(terms: &[(C64, Vec<C64>)]) -> Result<PureState> {
    let mut amps = vec![linalg::ZERO; 16];
    for (c, v) in terms {
        for (a, x) in amps.iter_mut().zip(v) {
            *a += c * x;
        }
    }
    let n2 = linalg::norm_sqr(&amps);
    if n2 == 0.0 {
        return arg("all family parameters are zero");
    }
    if (n2 - 1.0).abs() > 1e-12 {
        log::warn!("family parameters have squared norm {n2}; normalizing");
    }
    PureState::normalized(default_labels(4), vec![2; 4], amps)
}

/// Parameters of a family member, used for reporting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyParameters {
    pub a: f64,
    pub b: f64,
    pub r: C64,
    pub s: C64,
    pub phi: f64,
    pub phi_r: f64,
    pub phi_s: f64,
}

impl Default for FamilyParameters {
    fn default() -> Self {
        FamilyParameters { a: 0.0, b: 0.0, r: linalg::ZERO, s: linalg::ZERO, phi: 0.0, phi_r: 0.0, phi_s: 0.0 }
    }
}

impl fmt::Display for FamilyParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |z: C64| format!("{}{:+}i", z.re, z.im);
        write!(f, "a={}", self.a)?;
        if self.b != 0.0 {
            write!(f, " b={}", self.b)?;
        }
        if self.r != linalg::ZERO {
            write!(f, " r={}", c(self.r))?;
        }
        write!(f, " s={}", c(self.s))
    }
}

/// `a|0000> + b|W_4> + s e^{iφ}|1111>`, normalized.
pub fn family_a(a: f64, b: f64, s: C64, phi: f64) -> Result<PureState> {
    combine(&[
        (real(a), ket("0000")),
        (real(b), w4().amplitudes().to_vec()),
        (s * C64::from_polar(1.0, phi), ket("1111")),
    ])
}

/// `(1/2)|0000> + (1/√2) e^{iφ}|D_2^4> - (1/2) e^{2iφ}|1111>`.
pub fn family_b(phi: f64) -> PureState {
    combine(&[
        (real(0.5), ket("0000")),
        (C64::from_polar(0.5f64.sqrt(), phi), dicke2().amplitudes().to_vec()),
        (-C64::from_polar(0.5, 2.0 * phi), ket("1111")),
    ])
    .expect("unit norm")
}

/// The pair of family C and whether the phase condition holds.
#[derive(Clone, Debug)]
pub struct FamilyCPair {
    pub psi: PureState,
    pub phi_state: PureState,
    /// `|conj(r) s e^{iφ_s} - a r e^{iφ_r}(1 - e^{iφ_r}) - conj(r) s e^{iφ_r}|`.
    pub condition_residual: f64,
    pub feasible: bool,
}

/// `ψ = a|0000> + r|D_2^4> + s|1111>` and
/// `φ = a|0000> + r e^{iφ_r}|D_2^4> + s e^{iφ_s}|1111>`.
pub fn family_c(a: f64, r: C64, s: C64, phi_r: f64, phi_s: f64) -> Result<FamilyCPair> {
    let d2 = dicke2().amplitudes().to_vec();
    let psi = combine(&[(real(a), ket("0000")), (r, d2.clone()), (s, ket("1111"))])?;
    let er = C64::from_polar(1.0, phi_r);
    let es = C64::from_polar(1.0, phi_s);
    let phi_state = combine(&[(real(a), ket("0000")), (r * er, d2), (s * es, ket("1111"))])?;
    let lhs = r.conj() * s * es;
    let rhs = r * er * (linalg::ONE - er) * a + r.conj() * s * er;
    let condition_residual = (lhs - rhs).norm();
    Ok(FamilyCPair { psi, phi_state, condition_residual, feasible: condition_residual <= FEASIBILITY_TOL })
}

/// Solves the family-C condition for `φ_s` given `φ_r`. `None` when
/// `conj(r) s = 0` or the required `e^{iφ_s}` is not of unit modulus.
pub fn family_c_feasible_partner(a: f64, r: C64, s: C64, phi_r: f64) -> Option<f64> {
    let rs = r.conj() * s;
    if rs.norm() == 0.0 {
        return None;
    }
    let er = C64::from_polar(1.0, phi_r);
    let es = (r * er * (linalg::ONE - er) * a + rs * er) / rs;
    ((es.norm() - 1.0).abs() <= FEASIBILITY_TOL).then(|| es.arg())
}

/// `X ⊗ X ⊗ X ⊗ X`.
pub fn bit_flip_all(state: &PureState) -> PureState {
    let x = CMatrix::from_row_slice(2, 2, &[linalg::ZERO, linalg::ONE, linalg::ONE, linalg::ZERO]);
    let ops: Vec<(&str, &CMatrix)> = state.labels().iter().map(|l| (l.as_str(), &x)).collect();
    state.apply_local_unitaries(&ops).expect("qubit labels")
}

/// Image of `|W_4>` under the all-party bit flip: the three-excitation
/// Dicke state.
pub fn dicke_lu_image() -> PureState {
    bit_flip_all(&w4())
}

/// Largest violation of the standard form: imaginary parts of
/// `α_0000, α_0001, α_0010, α_0100, α_1000` and moduli of
/// `α_0111, α_1011, α_1101, α_1110`.
pub fn standard_form_defect(state: &PureState) -> f64 {
    let a = state.amplitudes();
    let im = ["0000", "0001", "0010", "0100", "1000"].iter().map(|b| a[bits_index(b)].im.abs());
    let zero = ["0111", "1011", "1101", "1110"].iter().map(|b| a[bits_index(b)].norm());
    im.chain(zero).fold(0.0, f64::max)
}

/// `n` uniform points on `[0, 2π)`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Marginal agreement and distinctness across family members.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FamilyVerification {
    pub family: String,
    pub parameters: String,
    /// Largest marginal distance over all member pairs and all six
    /// two-body marginals.
    pub max_deviation: f64,
    pub min_fidelity: f64,
}

pub fn verify_family(family: &str, parameters: &str, members: &[PureState]) -> Result<FamilyVerification> {
    let Some(first) = members.first() else {
        return arg("empty family");
    };
    let pairs = all_pairs(first.labels());
    let margs = members.iter().map(|m| marginal_set(m, &pairs)).collect::<Result<Vec<_>>>()?;
    let mut max_deviation: f64 = 0.0;
    let mut min_fidelity: f64 = 1.0;
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            max_deviation = max_deviation.max(marginal_distance(&margs[i], &margs[j])?);
            min_fidelity = min_fidelity.min(fidelity(&members[i], &members[j])?);
        }
    }
    Ok(FamilyVerification { family: family.into(), parameters: parameters.into(), max_deviation, min_fidelity })
}

/// The three family-A settings used by the default verification.
pub fn family_a_settings() -> Vec<(f64, f64, C64)> {
    let t = 1.0 / 3f64.sqrt();
    vec![(t, t, real(t)), (0.6, 0.7, C64::new(0.2, 0.3)), (0.3, 0.5, C64::new(0.0, 0.8))]
}

/// Default verification rows: family A (three settings), family B, family C
/// at `a = 0`, a feasible family-C member with `a ≠ 0`, and the bit-flipped
/// image of the first family-A setting.
pub fn default_verification(grid: usize) -> Result<Vec<FamilyVerification>> {
    let phis = phase_grid(grid);
    let mut rows = Vec::new();
    for (a, b, s) in family_a_settings() {
        let members = phis.iter().map(|&p| family_a(a, b, s, p)).collect::<Result<Vec<_>>>()?;
        let params = FamilyParameters { a, b, s, ..Default::default() };
        rows.push(verify_family("A", &params.to_string(), &members)?);
    }
    let members: Vec<PureState> = phis.iter().map(|&p| family_b(p)).collect();
    rows.push(verify_family("B", "a=0 b=2/sqrt6 s=1/sqrt3", &members)?);

    let (r, s) = (real(0.8), real(0.6));
    let mut members = Vec::new();
    for &p in &phis {
        members.push(family_c(0.0, r, s, p, p)?.phi_state);
    }
    let params = FamilyParameters { r, s, ..Default::default() };
    rows.push(verify_family("C", &format!("{params} phi_s=phi_r"), &members)?);

    let (a, r, s, phi_r) = feasible_c_example();
    let phi_s = family_c_feasible_partner(a, r, s, phi_r).expect("feasible example");
    let pair = family_c(a, r, s, phi_r, phi_s)?;
    let params = FamilyParameters { a, r, s, phi_r, phi_s, ..Default::default() };
    rows.push(verify_family("C", &format!("{params} phi_r={phi_r} phi_s={phi_s:.12}"), &[pair.psi, pair.phi_state])?);

    let (a, b, s) = family_a_settings()[0];
    let members = phis.iter().map(|&p| family_a(a, b, s, p).map(|m| bit_flip_all(&m))).collect::<Result<Vec<_>>>()?;
    let params = FamilyParameters { a, b, s, ..Default::default() };
    rows.push(verify_family("A_flipped", &params.to_string(), &members)?);
    Ok(rows)
}

/// A family-C member with `a ≠ 0` that admits a non-trivial partner.
/// For real `r, s` the condition reads `e^{i(φ_s - φ_r)} = 1 + (a/s)(1 - e^{iφ_r})`,
/// which has unit modulus for every `φ_r` exactly when `a = -s`; then
/// `φ_s = 2 φ_r`.
pub fn feasible_c_example() -> (f64, C64, C64, f64) {
    let a = -0.5;
    let r = real(0.5f64.sqrt());
    let s = real(0.5);
    (a, r, s, 1.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_constants_are_normalized() {
        for s in [w4(), dicke2(), dicke3()] {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        }
        assert!((family_b(0.3).norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn family_a_degenerates_to_product() {
        let s = family_a(1.0, 0.0, linalg::ZERO, 1.0).unwrap();
        assert_eq!(s.amplitudes()[0], linalg::ONE);
        assert!(family_a(0.0, 0.0, linalg::ZERO, 0.0).is_err());
    }

    #[test]
    fn family_a_fidelity_between_opposite_phases() {
        // a, b, s = 1/√3: overlap = |a|² + |b|² - |s|² = 1/3.
        let t = 1.0 / 3f64.sqrt();
        let f = fidelity(&family_a(t, t, real(t), 0.0).unwrap(), &family_a(t, t, real(t), std::f64::consts::PI).unwrap());
        assert!((f.unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn standard_form_holds() {
        let t = 1.0 / 3f64.sqrt();
        assert!(standard_form_defect(&family_a(t, t, C64::new(0.1, 0.5), 0.7).unwrap()) < 1e-15);
        assert!(standard_form_defect(&family_b(1.3)) < 1e-15);
        assert!(standard_form_defect(&dicke3()) > 0.4);
    }

    #[test]
    fn flip_maps_w_to_three_excitations() {
        let img = dicke_lu_image();
        assert!((fidelity(&img, &dicke3()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(bit_flip_all(&img), w4());
    }

    #[test]
    fn family_c_feasibility() {
        let c = family_c(0.0, real(0.8), real(0.6), 0.9, 0.9).unwrap();
        assert!(c.feasible);
        let c = family_c(0.0, real(0.8), real(0.6), 0.0, 0.0).unwrap();
        assert!(c.feasible && c.psi == c.phi_state);
        let c = family_c(0.4, real(0.7), real(0.6), 0.5, 2.0).unwrap();
        assert!(!c.feasible);
        let (a, r, s, phi_r) = feasible_c_example();
        let phi_s = family_c_feasible_partner(a, r, s, phi_r).unwrap();
        assert!(family_c(a, r, s, phi_r, phi_s).unwrap().feasible);
        assert!(family_c_feasible_partner(0.4, real(0.7), real(0.6), 0.5).is_none());
    }

    #[test]
    fn grid_is_uniform() {
        let g = phase_grid(4);
        assert_eq!(g.len(), 4);
        assert!((g[1] - TAU / 4.0).abs() < 1e-15);
    }
}
