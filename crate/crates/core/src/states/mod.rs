//! Dense pure states and density operators over labelled qudit subsystems.

mod json;
mod schmidt;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{arg, Error, Result};
use crate::linalg::{self, CMatrix, Split, C64};

pub use json::{MarginalJson, MarginalSetJson, StateJson};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition, SCHMIDT_RANK_TOL};

/// Squared-norm tolerance for a [`PureState`].
pub const NORM_TOL: f64 = 1e-12;
/// Floor on eigenvalues of a valid [`DensityOperator`].
pub const PSD_FLOOR: f64 = -1e-10;
/// Tolerance used when checking that a matrix is unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Default party names: `A, B, C, D, E1, E2, ...`.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|k| match k {
            0..=3 => ((b'A' + k as u8) as char).to_string(),
            _ => format!("E{}", k - 3),
        })
        .collect()
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if l.is_empty() {
            return arg("empty subsystem label");
        }
        if !seen.insert(l) {
            return arg(format!("duplicate subsystem label `{l}`"));
        }
    }
    Ok(())
}

fn positions_of(parent: &[String], set: &SubsystemSet) -> Result<Vec<usize>> {
    let mut pos = set
        .labels()
        .iter()
        .map(|l| parent.iter().position(|p| p == l).ok_or_else(|| Error::Label(l.clone())))
        .collect::<Result<Vec<_>>>()?;
    pos.sort_unstable();
    Ok(pos)
}

/// A non-empty set of subsystem labels. Its complement is always computed
/// against a parent label list, never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsystemSet {
    labels: Vec<String>,
}

impl SubsystemSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return arg("empty subsystem set");
        }
        check_labels(&labels)?;
        Ok(SubsystemSet { labels })
    }

    /// Parses concatenated labels: an uppercase letter followed by any digits
    /// or lowercase letters starts a new label, so `"ABE1E2"` is
    /// `[A, B, E1, E2]`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        for ch in s.trim().chars() {
            if ch.is_ascii_uppercase() {
                labels.push(ch.to_string());
            } else if ch.is_ascii_alphanumeric() && !labels.is_empty() {
                labels.last_mut().unwrap().push(ch);
            } else {
                return arg(format!("cannot parse subsystem set `{s}`"));
            }
        }
        Self::new(labels)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn is_disjoint(&self, other: &SubsystemSet) -> bool {
        self.labels.iter().all(|l| !other.contains(l))
    }

    /// Parent labels not in this set, in parent order.
    pub fn complement(&self, parent: &[String]) -> Result<Vec<String>> {
        for l in &self.labels {
            if !parent.contains(l) {
                return Err(Error::Label(l.clone()));
            }
        }
        Ok(parent.iter().filter(|p| !self.contains(p)).cloned().collect())
    }
}

impl FromStr for SubsystemSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for SubsystemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labels.concat())
    }
}

/// Parses a comma-separated configuration such as `"AB,CD,BD"`.
pub fn parse_config(s: &str) -> Result<Vec<SubsystemSet>> {
    let sets = s.split(',').map(SubsystemSet::parse).collect::<Result<Vec<_>>>()?;
    Ok(sets)
}

pub fn config_string(config: &[SubsystemSet]) -> String {
    config.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Every two-party subset of `labels`, in lexicographic order of positions.
pub fn all_pairs(labels: &[String]) -> Vec<SubsystemSet> {
    let mut out = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            out.push(SubsystemSet { labels: vec![labels[i].clone(), labels[j].clone()] });
        }
    }
    out
}

/// A unit-norm pure state over labelled subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    labels: Vec<String>,
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state, rejecting inputs whose squared norm is off by more than
    /// [`NORM_TOL`].
    pub fn new(labels: Vec<String>, dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::unnormalized(labels, dims, amplitudes)?;
        let n2 = linalg::norm_sqr(&state.amplitudes);
        if (n2 - 1.0).abs() > NORM_TOL {
            return arg(format!("state not normalized: squared norm {n2}"));
        }
        Ok(state)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(labels: Vec<String>, dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let mut state = Self::unnormalized(labels, dims, amplitudes)?;
        let n = linalg::norm_sqr(&state.amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return arg("cannot normalize the zero vector");
        }
        state.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(state)
    }

    /// Qudits labelled with [`default_labels`].
    pub fn qudits(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        Self::new(default_labels(dims.len()), dims, amplitudes)
    }

    /// Computational basis state `|digits>`.
    pub fn basis(labels: Vec<String>, dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(d, n)| d >= n) {
            return arg("basis digits do not match dims");
        }
        let total: usize = dims.iter().product();
        let flat = digits.iter().zip(&dims).fold(0, |acc, (d, n)| acc * n + d);
        let mut amps = vec![linalg::ZERO; total];
        amps[flat] = linalg::ONE;
        Self::new(labels, dims, amps)
    }

    fn unnormalized(labels: Vec<String>, dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        if labels.len() != dims.len() || labels.is_empty() {
            return arg("labels and dims must be non-empty and of equal length");
        }
        check_labels(&labels)?;
        if dims.contains(&0) {
            return arg("subsystem dimensions must be positive");
        }
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return arg(format!("expected {total} amplitudes, got {}", amplitudes.len()));
        }
        Ok(PureState { labels, dims, amplitudes })
    }

    /// Internal constructor for results of norm-preserving operations.
    pub(crate) fn from_parts(labels: Vec<String>, dims: Vec<usize>, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), dims.iter().product::<usize>());
        PureState { labels, dims, amplitudes }
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<C64>) -> Self {
        Self::from_parts(self.labels.clone(), self.dims.clone(), amplitudes)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn party_count(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amplitudes)
    }

    /// Positions of `set` in this state's label list, sorted.
    pub fn positions(&self, set: &SubsystemSet) -> Result<Vec<usize>> {
        positions_of(&self.labels, set)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::Label(label.to_string()))
    }

    /// `Tr_{rest} |ψ><ψ|`. The kept subsystems appear in parent order.
    pub fn partial_trace(&self, keep: &SubsystemSet) -> Result<DensityOperator> {
        let pos = self.positions(keep)?;
        let split = Split::new(&self.dims, &pos);
        let m = split.reshape(&self.amplitudes);
        Ok(DensityOperator::from_parts(
            pos.iter().map(|&p| self.labels[p].clone()).collect(),
            pos.iter().map(|&p| self.dims[p]).collect(),
            &m * m.adjoint(),
        ))
    }

    pub fn density(&self) -> DensityOperator {
        let v = CMatrix::from_column_slice(self.dim(), 1, &self.amplitudes);
        DensityOperator::from_parts(self.labels.clone(), self.dims.clone(), &v * v.adjoint())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return arg("dimension mismatch");
        }
        Ok(linalg::inner(&self.amplitudes, &other.amplitudes))
    }

    /// Applies single-party unitaries, one per listed label.
    pub fn apply_local_unitaries(&self, unitaries: &[(&str, &CMatrix)]) -> Result<PureState> {
        let mut amps = self.amplitudes.clone();
        let mut seen = HashSet::new();
        for (label, u) in unitaries {
            let p = self.position(label)?;
            if !seen.insert(p) {
                return arg(format!("label `{label}` given twice"));
            }
            if u.shape() != (self.dims[p], self.dims[p]) {
                return arg(format!("unitary on `{label}` must be {0}x{0}", self.dims[p]));
            }
            if linalg::unitarity_defect(u) > UNITARY_TOL {
                return arg(format!("matrix on `{label}` is not unitary"));
            }
            amps = Split::new(&self.dims, &[p]).apply(u, &amps);
        }
        Ok(self.with_amplitudes(amps))
    }

    /// Multiplies by `e^{iθ}`.
    pub fn with_global_phase(&self, theta: f64) -> PureState {
        let ph = C64::from_polar(1.0, theta);
        self.with_amplitudes(self.amplitudes.iter().map(|a| a * ph).collect())
    }

    /// Reorders the tensor factors: party `k` of the result is party
    /// `order[k]` of `self`, carrying its label along.
    pub fn permuted(&self, order: &[usize]) -> Result<PureState> {
        let n = self.party_count();
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return arg("not a permutation");
        }
        let dims: Vec<usize> = order.iter().map(|&p| self.dims[p]).collect();
        let labels: Vec<String> = order.iter().map(|&p| self.labels[p].clone()).collect();
        let old = linalg::strides(&self.dims);
        let new = linalg::strides(&dims);
        let mut amps = vec![linalg::ZERO; self.dim()];
        for (flat, a) in self.amplitudes.iter().enumerate() {
            let idx: usize =
                order.iter().enumerate().map(|(k, &p)| ((flat / old[p]) % self.dims[p]) * new[k]).sum();
            amps[idx] = *a;
        }
        Ok(PureState::from_parts(labels, dims, amps))
    }

    /// Renames the parties without touching amplitudes.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<PureState> {
        PureState::unnormalized(labels, self.dims.clone(), self.amplitudes.clone())
    }
}

/// `|<s1|s2>|`; equals 1 iff the states agree up to a global phase.
pub fn fidelity(s1: &PureState, s2: &PureState) -> Result<f64> {
    Ok(s1.inner(s2)?.norm())
}

/// A density operator over labelled subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    labels: Vec<String>,
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Builds a density operator and checks Hermiticity, unit trace and
    /// positivity.
    pub fn new(labels: Vec<String>, dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if labels.len() != dims.len() || labels.is_empty() {
            return arg("labels and dims must be non-empty and of equal length");
        }
        check_labels(&labels)?;
        let n: usize = dims.iter().product();
        if matrix.shape() != (n, n) {
            return arg(format!("matrix must be {n}x{n}"));
        }
        let rho = DensityOperator { labels, dims, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts(labels: Vec<String>, dims: Vec<usize>, matrix: CMatrix) -> Self {
        DensityOperator { labels, dims, matrix }
    }

    /// Checks the invariants: Hermitian within 1e-12, trace 1 within 1e-12,
    /// smallest eigenvalue at least [`PSD_FLOOR`].
    pub fn validate(&self) -> Result<()> {
        let herm = linalg::hermiticity_defect(&self.matrix);
        if herm > 1e-12 {
            return arg(format!("not Hermitian (defect {herm:e})"));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return arg(format!("trace {tr} != 1"));
        }
        let min = self.min_eigenvalue();
        if min < PSD_FLOOR {
            return arg(format!("negative eigenvalue {min:e}"));
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        linalg::hermitian_eigen_desc(&herm).0.last().copied().unwrap_or(0.0)
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        linalg::hermitian_eigen_desc(&herm).0
    }

    pub fn positions(&self, set: &SubsystemSet) -> Result<Vec<usize>> {
        positions_of(&self.labels, set)
    }

    /// `Tr_{rest} ρ`, kept subsystems in parent order.
    pub fn partial_trace(&self, keep: &SubsystemSet) -> Result<DensityOperator> {
        let pos = self.positions(keep)?;
        let split = Split::new(&self.dims, &pos);
        let n = self.matrix.nrows();
        let mut out = CMatrix::zeros(split.rows, split.rows);
        for i in 0..n {
            let (r1, c1) = split.index(i);
            for j in 0..n {
                let (r2, c2) = split.index(j);
                if c1 == c2 {
                    out[(r1, r2)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityOperator::from_parts(
            pos.iter().map(|&p| self.labels[p].clone()).collect(),
            pos.iter().map(|&p| self.dims[p]).collect(),
            out,
        ))
    }
}

/// Marginals of one state for a list of subsystem sets.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalSet {
    entries: Vec<(SubsystemSet, DensityOperator)>,
}

impl MarginalSet {
    pub fn new(entries: Vec<(SubsystemSet, DensityOperator)>) -> Result<Self> {
        for (set, rho) in &entries {
            let mut a = set.labels().to_vec();
            let mut b = rho.labels().to_vec();
            a.sort();
            b.sort();
            if a != b {
                return arg(format!("marginal labels do not match set {set}"));
            }
        }
        Ok(MarginalSet { entries })
    }

    pub fn entries(&self) -> &[(SubsystemSet, DensityOperator)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn config(&self) -> Vec<SubsystemSet> {
        self.entries.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn get(&self, set: &SubsystemSet) -> Option<&DensityOperator> {
        self.entries.iter().find(|(s, _)| s == set).map(|(_, r)| r)
    }
}

/// One marginal per requested set.
pub fn marginal_set(state: &PureState, config: &[SubsystemSet]) -> Result<MarginalSet> {
    let entries = config
        .iter()
        .map(|s| Ok((s.clone(), state.partial_trace(s)?)))
        .collect::<Result<Vec<_>>>()?;
    MarginalSet::new(entries)
}

/// `sqrt(Σ ||ρ_k - σ_k||_HS^2)` over matching entries.
pub fn marginal_distance(m1: &MarginalSet, m2: &MarginalSet) -> Result<f64> {
    if m1.len() != m2.len() {
        return arg("marginal sets have different sizes");
    }
    let mut total = 0.0;
    for ((s1, r1), (s2, r2)) in m1.entries.iter().zip(&m2.entries) {
        if s1 != s2 || r1.dims != r2.dims || r1.labels != r2.labels {
            return arg(format!("mismatched configs {s1} vs {s2}"));
        }
        total += linalg::frobenius_sq(&(&r1.matrix - &r2.matrix));
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn w4() -> PureState {
        let mut amps = vec![ZERO; 16];
        for k in [1, 2, 4, 8] {
            amps[k] = c(0.5);
        }
        PureState::qudits(vec![2; 4], amps).unwrap()
    }

    #[test]
    fn trace_of_product_state() {
        let s = PureState::basis(default_labels(2), vec![2, 2], &[0, 0]).unwrap();
        let rho = s.partial_trace(&SubsystemSet::parse("A").unwrap()).unwrap();
        assert_eq!(rho.matrix(), &CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]));
    }

    #[test]
    fn w_state_two_body_marginal_matches_contraction() {
        let psi = w4();
        let rho = psi.partial_trace(&"AB".parse().unwrap()).unwrap();
        // Brute force: ρ_AB[(a,b),(a',b')] = Σ_cd ψ[abcd] conj(ψ[a'b'cd]).
        let a = psi.amplitudes();
        let mut brute = CMatrix::zeros(4, 4);
        for r in 0..4 {
            for s in 0..4 {
                for cd in 0..4 {
                    brute[(r, s)] += a[r * 4 + cd] * a[s * 4 + cd].conj();
                }
            }
        }
        let expected = CMatrix::from_row_slice(
            4,
            4,
            &[c(0.5), ZERO, ZERO, ZERO, ZERO, c(0.25), c(0.25), ZERO, ZERO, c(0.25), c(0.25), ZERO, ZERO, ZERO, ZERO, ZERO],
        );
        assert!(linalg::max_abs(&(rho.matrix() - &brute)) < 1e-15);
        assert!(linalg::max_abs(&(rho.matrix() - &expected)) < 1e-15);
        rho.validate().unwrap();
    }

    #[test]
    fn density_partial_trace_agrees_with_pure_route() {
        let psi = w4();
        let keep: SubsystemSet = "BD".parse().unwrap();
        let direct = psi.partial_trace(&keep).unwrap();
        let via = psi.density().partial_trace(&keep).unwrap();
        assert!(linalg::max_abs(&(direct.matrix() - via.matrix())) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let psi = w4();
        assert!(matches!(psi.partial_trace(&"AX".parse().unwrap()), Err(Error::Label(_))));
        assert!(matches!(SubsystemSet::new(Vec::<String>::new()), Err(Error::Argument(_))));
        assert!(SubsystemSet::parse("AA").is_err());
    }

    #[test]
    fn parse_multi_char_labels() {
        let s = SubsystemSet::parse("ABE1E2").unwrap();
        assert_eq!(s.labels(), &["A", "B", "E1", "E2"]);
        assert_eq!(s.to_string(), "ABE1E2");
        let cfg = parse_config("AB,CD,BD").unwrap();
        assert_eq!(cfg.len(), 3);
        assert_eq!(config_string(&cfg), "AB,CD,BD");
    }

    #[test]
    fn marginal_distance_of_orthogonal_projectors() {
        let zero = PureState::basis(vec!["A".into()], vec![2], &[0]).unwrap();
        let one = PureState::basis(vec!["A".into()], vec![2], &[1]).unwrap();
        let cfg = vec![SubsystemSet::parse("A").unwrap()];
        let m0 = marginal_set(&zero, &cfg).unwrap();
        let m1 = marginal_set(&one, &cfg).unwrap();
        assert!((marginal_distance(&m0, &m1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(marginal_distance(&m0, &m0).unwrap(), 0.0);
        let other = marginal_set(&w4(), &["AB".parse().unwrap()]).unwrap();
        assert!(marginal_distance(&m0, &other).is_err());
    }

    #[test]
    fn marginal_set_shapes() {
        let psi = PureState::basis(default_labels(4), vec![2; 4], &[0; 4]).unwrap();
        let m = marginal_set(&psi, &all_pairs(psi.labels())).unwrap();
        assert_eq!(m.len(), 6);
        let ab = m.get(&"AB".parse().unwrap()).unwrap();
        assert_eq!(ab.matrix()[(0, 0)], ONE);
        assert!((ab.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fidelity_basics() {
        let psi = w4();
        assert!((fidelity(&psi, &psi.with_global_phase(1.234)).unwrap() - 1.0).abs() < 1e-15);
        let zero = PureState::basis(vec!["A".into()], vec![2], &[0]).unwrap();
        let one = PureState::basis(vec!["A".into()], vec![2], &[1]).unwrap();
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!(fidelity(&zero, &psi).is_err());
    }

    #[test]
    fn bit_flip_on_a() {
        let psi = PureState::basis(default_labels(4), vec![2; 4], &[0; 4]).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let out = psi.apply_local_unitaries(&[("A", &x)]).unwrap();
        let expected = PureState::basis(default_labels(4), vec![2; 4], &[1, 0, 0, 0]).unwrap();
        assert_eq!(out, expected);
        let id = CMatrix::identity(2, 2);
        assert_eq!(psi.apply_local_unitaries(&[("B", &id)]).unwrap(), psi);
        let bad = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(psi.apply_local_unitaries(&[("A", &bad)]).is_err());
    }

    #[test]
    fn permutation_moves_amplitudes_with_labels() {
        let psi = PureState::basis(default_labels(3), vec![2, 3, 2], &[1, 2, 0]).unwrap();
        let p = psi.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.labels(), &["C", "A", "B"]);
        assert_eq!(p, PureState::basis(vec!["C".into(), "A".into(), "B".into()], vec![2, 2, 3], &[0, 1, 2]).unwrap());
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(PureState::qudits(vec![2, 2], vec![ONE; 4]).is_err());
        assert!(PureState::qudits(vec![2, 2], vec![ONE; 3]).is_err());
        assert!(PureState::normalized(default_labels(2), vec![2, 2], vec![ZERO; 4]).is_err());
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.5), ZERO, ZERO, c(-0.5)]);
        assert!(DensityOperator::new(vec!["A".into()], vec![2], bad).is_err());
    }
}
