//! Bell-basis algebra of the controlled-Z gate teleportation use case.
//!
//! Six two-level systems are tracked: Alice's ion spin, photons 1 to 4 in
//! polarization, and Bob's ion spin. The amplitude vector is ordered
//! `spin1, photon1, photon2, photon3, photon4, spin4`, most significant first,
//! with `H = down = 0` and `V = up = 1`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QubitState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Domain(format!(
                "state vector length {len} is not a power of two"
            )));
        }
        let state = Self {
            qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Amplitude of a basis state given as one bit per qubit, in storage order.
    pub fn amplitude(&self, bits: &[u8]) -> Complex64 {
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        self.amplitudes[index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
        })
    }
}

/// Sign convention of the Bell basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BellConvention {
    /// phi± = (HH ± VV)/√2, psi± = (HV ± VH)/√2.
    #[default]
    Standard,
    /// psi- with the opposite sign; only useful to show that the checks bite.
    FlippedPsiMinus,
}

impl BellConvention {
    /// Components over |00>, |01>, |10>, |11>.
    pub fn vector(self, label: BellLabel) -> [f64; 4] {
        let s = FRAC_1_SQRT_2;
        match (label, self) {
            (BellLabel::PhiPlus, _) => [s, 0.0, 0.0, s],
            (BellLabel::PhiMinus, _) => [s, 0.0, 0.0, -s],
            (BellLabel::PsiPlus, _) => [0.0, s, s, 0.0],
            (BellLabel::PsiMinus, BellConvention::Standard) => [0.0, s, -s, 0.0],
            (BellLabel::PsiMinus, BellConvention::FlippedPsiMinus) => [0.0, -s, s, 0.0],
        }
    }
}

fn bits6(index: usize) -> [usize; 6] {
    std::array::from_fn(|q| (index >> (5 - q)) & 1)
}

/// `|psi>_1 (x) |psi+>_23 (x) |psi>_4` with `|psi> = (|H,down> + |V,up>)/√2`
/// for each ion and `|psi+>_23 = (|HV> + |VH>)/√2` from the network.
pub fn build_initial_state() -> QubitState {
    let amplitude = |[s1, p1, p2, p3, p4, s4]: [usize; 6]| {
        let ion1 = if s1 == p1 { FRAC_1_SQRT_2 } else { 0.0 };
        let ion4 = if p4 == s4 { FRAC_1_SQRT_2 } else { 0.0 };
        let pair = if p2 != p3 { FRAC_1_SQRT_2 } else { 0.0 };
        ion1 * pair * ion4
    };
    let amplitudes = (0..64)
        .map(|i| Complex64::new(amplitude(bits6(i)), 0.0))
        .collect();
    QubitState {
        qubits: 6,
        amplitudes,
    }
}

/// Coefficients over the product Bell basis of photons (1,2), photons (3,4)
/// and spins (1,4).
#[derive(Debug, Clone, PartialEq)]
pub struct BellDecomposition {
    coefficients: [[[Complex64; 4]; 4]; 4],
}

impl BellDecomposition {
    pub fn coefficient(&self, pair12: BellLabel, pair34: BellLabel, spins: BellLabel) -> Complex64 {
        self.coefficients[pair12.index()][pair34.index()][spins.index()]
    }

    /// All 64 terms as `(pair12, pair34, spins, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (BellLabel, BellLabel, BellLabel, Complex64)> + '_ {
        BellLabel::ALL.into_iter().flat_map(move |a| {
            BellLabel::ALL.into_iter().flat_map(move |b| {
                BellLabel::ALL
                    .into_iter()
                    .map(move |c| (a, b, c, self.coefficient(a, b, c)))
            })
        })
    }

    /// Rebuilds the six-qubit state from the Bell coefficients.
    pub fn recompose(&self, convention: BellConvention) -> QubitState {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 64];
        for (a, b, c, coefficient) in self.terms() {
            let (va, vb, vc) = (
                convention.vector(a),
                convention.vector(b),
                convention.vector(c),
            );
            for (i, amp) in amplitudes.iter_mut().enumerate() {
                let [s1, p1, p2, p3, p4, s4] = bits6(i);
                *amp += coefficient * va[p1 * 2 + p2] * vb[p3 * 2 + p4] * vc[s1 * 2 + s4];
            }
        }
        QubitState {
            qubits: 6,
            amplitudes,
        }
    }
}

fn require_six_qubits(state: &QubitState) -> Result<()> {
    if state.qubits != 6 {
        return Err(Error::Domain(format!(
            "expected a six-qubit state, got {} qubits",
            state.qubits
        )));
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Domain(format!("state norm {norm} is not 1")));
    }
    Ok(())
}

pub fn bell_decompose(state: &QubitState, convention: BellConvention) -> Result<BellDecomposition> {
    require_six_qubits(state)?;
    let mut coefficients = [[[Complex64::new(0.0, 0.0); 4]; 4]; 4];
    for a in BellLabel::ALL {
        for b in BellLabel::ALL {
            for c in BellLabel::ALL {
                let (va, vb, vc) = (
                    convention.vector(a),
                    convention.vector(b),
                    convention.vector(c),
                );
                coefficients[a.index()][b.index()][c.index()] = state
                    .amplitudes
                    .iter()
                    .enumerate()
                    .map(|(i, amp)| {
                        let [s1, p1, p2, p3, p4, s4] = bits6(i);
                        amp * (va[p1 * 2 + p2] * vb[p3 * 2 + p4] * vc[s1 * 2 + s4])
                    })
                    .sum();
            }
        }
    }
    Ok(BellDecomposition { coefficients })
}

/// Post-measurement spin state and probability of the joint outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    /// Spins (1, 4), ordered spin1 then spin4.
    pub spins: QubitState,
}

/// Projects photons (1,2) and (3,4) onto the given Bell outcomes.
pub fn project_bsm(
    state: &QubitState,
    outcome12: BellLabel,
    outcome34: BellLabel,
    convention: BellConvention,
) -> Result<Projection> {
    require_six_qubits(state)?;
    let (v12, v34) = (convention.vector(outcome12), convention.vector(outcome34));
    let mut spins = vec![Complex64::new(0.0, 0.0); 4];
    for (i, amp) in state.amplitudes.iter().enumerate() {
        let [s1, p1, p2, p3, p4, s4] = bits6(i);
        spins[s1 * 2 + s4] += amp * (v12[p1 * 2 + p2] * v34[p3 * 2 + p4]);
    }
    let probability: f64 = spins.iter().map(|a| a.norm_sqr()).sum();
    if probability < NORM_TOLERANCE {
        return Err(Error::Domain(format!(
            "outcome ({outcome12}, {outcome34}) has zero probability"
        )));
    }
    let scale = probability.sqrt();
    spins.iter_mut().for_each(|a| *a /= scale);
    Ok(Projection {
        probability,
        spins: QubitState::new(spins)?,
    })
}

/// Signed terms of the expansion of `|psi>_1 |psi+>_23 |psi>_4` in the Bell
/// bases: `(spins, pair12, pair34, sign)`, every coefficient being `sign / 4`.
pub const EXPECTED_EXPANSION: [(BellLabel, BellLabel, BellLabel, f64); 16] = {
    use BellLabel::*;
    [
        (PhiPlus, PhiPlus, PsiPlus, 1.0),
        (PhiPlus, PsiPlus, PhiPlus, 1.0),
        (PhiPlus, PsiMinus, PhiMinus, 1.0),
        (PhiPlus, PhiMinus, PsiMinus, -1.0),
        (PhiMinus, PhiMinus, PsiPlus, 1.0),
        (PhiMinus, PsiMinus, PhiPlus, 1.0),
        (PhiMinus, PsiPlus, PhiMinus, 1.0),
        (PhiMinus, PhiPlus, PsiMinus, -1.0),
        (PsiPlus, PhiPlus, PhiPlus, 1.0),
        (PsiPlus, PhiMinus, PhiMinus, -1.0),
        (PsiPlus, PsiPlus, PsiPlus, 1.0),
        (PsiPlus, PsiMinus, PsiMinus, 1.0),
        (PsiMinus, PhiMinus, PhiPlus, 1.0),
        (PsiMinus, PhiPlus, PhiMinus, -1.0),
        (PsiMinus, PsiPlus, PsiMinus, 1.0),
        (PsiMinus, PsiMinus, PsiPlus, 1.0),
    ]
};

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    /// Expected terms reproduced with the right sign and magnitude.
    pub matched: usize,
    /// Largest coefficient magnitude among the terms expected to vanish.
    pub max_spurious: f64,
    pub mismatches: Vec<String>,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.matched == EXPECTED_EXPANSION.len() && self.mismatches.is_empty()
    }
}

/// Decomposes the initial state under `convention` and compares every term
/// with [`EXPECTED_EXPANSION`].
pub fn check_expansion(convention: BellConvention, tolerance: f64) -> ExpansionReport {
    let decomposition = bell_decompose(&build_initial_state(), convention)
        .expect("initial state is normalized");
    let mut matched = 0;
    let mut mismatches = Vec::new();
    let mut max_spurious: f64 = 0.0;
    for (a, b, c, coefficient) in decomposition.terms() {
        let expected = EXPECTED_EXPANSION
            .iter()
            .find(|(s, x, y, _)| (*x, *y, *s) == (a, b, c))
            .map_or(0.0, |t| t.3 / 4.0);
        let error = (coefficient - Complex64::new(expected, 0.0)).norm();
        if expected == 0.0 {
            max_spurious = max_spurious.max(coefficient.norm());
        }
        if error > tolerance {
            mismatches.push(format!(
                "({a})12 ({b})34 spins ({c}): got {:+.6}, expected {expected:+.6}",
                coefficient.re
            ));
        } else if expected != 0.0 {
            matched += 1;
        }
    }
    ExpansionReport {
        matched,
        max_spurious,
        mismatches,
    }
}

/// Gate teleportation capacity of a number of delivered Bell pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateBudget {
    pub delivered_pairs: u64,
    /// One controlled-Z per consumed pair.
    pub cz_gates: u64,
    /// Any two-qubit unitary needs at most three controlled-Z gates.
    pub arbitrary_two_qubit_unitaries: u64,
}

pub fn gate_budget(delivered_pairs: u64) -> GateBudget {
    GateBudget {
        delivered_pairs,
        cz_gates: delivered_pairs,
        arbitrary_two_qubit_unitaries: delivered_pairs / 3,
    }
}
