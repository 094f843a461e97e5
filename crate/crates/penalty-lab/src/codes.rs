//! Stabilizer subspace codes: codespace projectors, penalty Hamiltonians
//! with certified gap, logical encoding of computational Hamiltonians, and
//! the error-detection check `P_C A P_C = 0`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::operators::{pauli_matrix, spectral_norm, Operator, PauliString};
use crate::{CMatrix, C64};

/// A stabilizer subspace code: commuting independent generators plus a
/// user-supplied dictionary of logical operators.
///
/// Logical operators are keyed by letter and 1-based logical qubit index,
/// e.g. `"X1" -> "XXII"`. The dictionary only has to contain the letters a
/// computational Hamiltonian actually uses; no automatic logical-operator
/// search is performed.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    n_physical: usize,
    generators: Vec<PauliString>,
    logicals: BTreeMap<String, PauliString>,
}

impl StabilizerCode {
    pub fn new(
        n_physical: usize,
        generators: Vec<PauliString>,
        logicals: BTreeMap<String, PauliString>,
    ) -> Result<Self> {
        if generators.iter().any(|g| g.n_qubits() != n_physical) {
            return Err(Error::InvalidCode(format!(
                "generator length differs from n_physical = {n_physical}"
            )));
        }
        for g in &generators {
            if g.coefficient().abs() != 1.0 {
                return Err(Error::InvalidCode(format!(
                    "generator {g} must carry coefficient +-1"
                )));
            }
        }
        for (a, ga) in generators.iter().enumerate() {
            for gb in generators.iter().skip(a + 1) {
                if !ga.commutes_with(gb) {
                    return Err(Error::InvalidCode(format!(
                        "generators {ga} and {gb} anticommute"
                    )));
                }
            }
        }
        if !independent_over_gf2(&generators) {
            return Err(Error::InvalidCode(
                "generators are dependent: the generated group is smaller than 2^k".into(),
            ));
        }
        for (label, l) in &logicals {
            if l.n_qubits() != n_physical {
                return Err(Error::MalformedLogicals(format!(
                    "logical {label} has wrong length"
                )));
            }
            for g in &generators {
                if !l.commutes_with(g) {
                    return Err(Error::MalformedLogicals(format!(
                        "logical {label} = {l} anticommutes with generator {g}"
                    )));
                }
            }
        }
        Ok(Self {
            n_physical,
            generators,
            logicals,
        })
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    pub fn dim(&self) -> usize {
        1 << self.n_physical
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logicals(&self) -> &BTreeMap<String, PauliString> {
        &self.logicals
    }

    pub fn logical(&self, label: &str) -> Result<&PauliString> {
        self.logicals.get(label).ok_or_else(|| Error::MissingLogical {
            label: label.to_string(),
        })
    }

    /// Codespace dimension 2^(n - #generators).
    pub fn codespace_dim(&self) -> usize {
        1 << (self.n_physical - self.generators.len())
    }
}

/// GF(2) independence of the generators' symplectic (x|z) vectors.
fn independent_over_gf2(generators: &[PauliString]) -> bool {
    use crate::operators::PauliLetter::*;
    let mut rows: Vec<u64> = generators
        .iter()
        .map(|g| {
            let mut bits = 0u64;
            for (q, l) in g.letters().iter().enumerate() {
                let (x, z) = match l {
                    I => (0, 0),
                    X => (1, 0),
                    Y => (1, 1),
                    Z => (0, 1),
                };
                bits |= x << (2 * q);
                bits |= z << (2 * q + 1);
            }
            bits
        })
        .collect();
    let mut rank = 0;
    for bit in 0..64 {
        let pivot = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1);
        if let Some(p) = pivot {
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r] >> bit & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank == generators.len()
}

/// Codespace projector `P_C = prod_j (I + S_j) / 2`.
pub fn codespace_projector(code: &StabilizerCode) -> Operator {
    let dim = code.dim();
    let mut p = CMatrix::identity(dim, dim);
    for g in code.generators() {
        let s = pauli_matrix(g);
        p = (&p + &p * s.matrix()) * C64::new(0.5, 0.0);
    }
    Operator::from_matrix(p)
}

/// Penalty Hamiltonian `H_p = sum_j (I - S_j) / 2` and its ground-state gap.
///
/// The shift relative to `-sum_j S_j` normalizes the codespace to energy 0
/// and makes the gap exactly 1 for any valid code; excited energies count
/// violated generators.
pub fn penalty_hamiltonian(code: &StabilizerCode) -> (Operator, f64) {
    let dim = code.dim();
    let mut h = CMatrix::zeros(dim, dim);
    let id = CMatrix::identity(dim, dim);
    for g in code.generators() {
        let s = pauli_matrix(g);
        h += (&id - s.matrix()) * C64::new(0.5, 0.0);
    }
    (Operator::from_matrix(h), 1.0)
}

/// Error-detection check: true iff `||P_C A P_C|| <= tol` (operator norm).
pub fn detects(code: &StabilizerCode, a: &Operator, tol: f64) -> Result<bool> {
    Ok(detection_residual(code, a)? <= tol)
}

/// The norm `||P_C A P_C||` itself, for reporting.
pub fn detection_residual(code: &StabilizerCode, a: &Operator) -> Result<f64> {
    if a.dim() != code.dim() {
        return Err(Error::DimensionMismatch {
            expected: code.dim(),
            got: a.dim(),
        });
    }
    let p = codespace_projector(code);
    Ok(spectral_norm(&(p.matrix() * a.matrix() * p.matrix())))
}

/// One term of a computational Hamiltonian written over logical qubits:
/// `pauli` holds one letter per logical qubit ("Z", "XZ", "IX", ...).
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalTerm {
    pub pauli: String,
    pub coefficient: f64,
}

impl LogicalTerm {
    pub fn new(pauli: impl Into<String>, coefficient: f64) -> Self {
        Self {
            pauli: pauli.into(),
            coefficient,
        }
    }
}

/// A stabilizer-encoded system `H = H_bar + eta_p H_p`: the encoded
/// computational Hamiltonian, the penalty with its gap, and the codespace
/// projector. `[H_bar, H_p] = 0` by construction.
#[derive(Debug, Clone)]
pub struct EncodedSystem {
    pub h_bar: Operator,
    pub h_p: Operator,
    pub eta_p: f64,
    pub gap: f64,
    pub p_c: Operator,
}

impl EncodedSystem {
    pub fn dim(&self) -> usize {
        self.h_bar.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// The full Hamiltonian `H_bar + eta_p H_p`.
    pub fn hamiltonian(&self) -> Operator {
        &self.h_bar + &self.h_p.scaled(self.eta_p)
    }

    /// Same system at a different penalty strength.
    pub fn with_eta_p(&self, eta_p: f64) -> Self {
        Self {
            eta_p,
            ..self.clone()
        }
    }
}

/// Substitute logical operators into a term list and attach the penalty.
///
/// Each letter of a logical term resolves through the code's dictionary
/// (letter `L` at logical qubit `i`, 1-based, looks up `"Li"`); the physical
/// strings multiply out with phase tracking. A non-real accumulated phase or
/// a nonzero `[H_bar, H_p]` signals a malformed dictionary.
pub fn encode_logical(
    terms: &[LogicalTerm],
    code: &StabilizerCode,
    eta_p: f64,
) -> Result<EncodedSystem> {
    if eta_p < 0.0 {
        return Err(Error::Config(format!("eta_p must be >= 0, got {eta_p}")));
    }
    let dim = code.dim();
    let mut h_bar = CMatrix::zeros(dim, dim);
    for term in terms {
        let mut acc = PauliString::identity(code.n_physical());
        let mut phase = C64::new(1.0, 0.0);
        for (i, letter) in term.pauli.chars().enumerate() {
            if letter == 'I' {
                continue;
            }
            let label = format!("{letter}{}", i + 1);
            let physical = code.logical(&label)?;
            let (p, next) = acc.mul(physical)?;
            phase *= p;
            acc = next;
        }
        if phase.im.abs() > 1e-14 {
            return Err(Error::MalformedLogicals(format!(
                "logical term {} substitutes to a non-Hermitian physical operator \
                 (accumulated phase {phase})",
                term.pauli
            )));
        }
        h_bar += pauli_matrix(&acc).matrix() * C64::new(term.coefficient * phase.re, 0.0);
    }
    let h_bar = Operator::hermitian_from(h_bar)?;
    let (h_p, gap) = penalty_hamiltonian(code);
    let p_c = codespace_projector(code);

    let comm = h_bar.commutator(&h_p).frobenius_norm();
    if comm > 1e-10 {
        return Err(Error::MalformedLogicals(format!(
            "encoded Hamiltonian does not commute with the penalty (||[H_bar, H_p]|| = {comm:.3e})"
        )));
    }

    Ok(EncodedSystem {
        h_bar,
        h_p,
        eta_p,
        gap,
        p_c,
    })
}

/// Built-in code catalog.
///
/// * `"xxxx_zzzz"` — four qubits, generators {XXXX, ZZZZ}; detects every
///   weight-1 Pauli. Dictionary: X1 -> XXII, Z1 -> ZZII.
/// * `"zz"` — two qubits, generator {ZZ}; detects single X/Y.
///   Dictionary: X1 -> XX, Y1 -> YX, Z1 -> ZI.
/// * `"zzi_izz"` — three qubits, generators {ZZI, IZZ} (repetition style).
///   Dictionary: X1 -> XXX, Y1 -> YXX, Z1 -> ZII.
pub fn catalog(name: &str) -> Result<StabilizerCode> {
    let build = |n: usize, gens: &[&str], logs: &[(&str, &str)]| {
        let generators = gens
            .iter()
            .map(|g| PauliString::parse(g))
            .collect::<Result<Vec<_>>>()?;
        let logicals = logs
            .iter()
            .map(|(k, v)| Ok((k.to_string(), PauliString::parse(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        StabilizerCode::new(n, generators, logicals)
    };
    match name {
        "xxxx_zzzz" => build(
            4,
            &["XXXX", "ZZZZ"],
            &[("X1", "XXII"), ("Z1", "ZZII")],
        ),
        "zz" => build(2, &["ZZ"], &[("X1", "XX"), ("Y1", "YX"), ("Z1", "ZI")]),
        "zzi_izz" => build(
            3,
            &["ZZI", "IZZ"],
            &[("X1", "XXX"), ("Y1", "YXX"), ("Z1", "ZII")],
        ),
        other => Err(Error::Config(format!("unknown catalog code '{other}'"))),
    }
}

/// All 3n weight-1 Pauli couplings on `n` qubits, qubit-major (X1, Y1, Z1,
/// X2, ...), as labelled strings.
pub fn weight_one_paulis(n: usize) -> Vec<(String, PauliString)> {
    use crate::operators::PauliLetter::*;
    let mut out = Vec::with_capacity(3 * n);
    for q in 0..n {
        for letter in [X, Y, Z] {
            let label = format!("{}{}", letter.to_char(), q + 1);
            out.push((
                label,
                PauliString::single(n, q, letter, 1.0).expect("q < n"),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{spectral_decompose_default, PauliLetter};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projector_ranks() {
        let c4 = catalog("xxxx_zzzz").unwrap();
        let p = codespace_projector(&c4);
        assert!((p.trace().re - 4.0).abs() < 1e-12);
        // Idempotent and Hermitian.
        assert!(((&p * &p).matrix() - p.matrix()).norm() < 1e-12);
        assert!(p.is_hermitian());

        let empty = StabilizerCode::new(2, vec![], BTreeMap::new()).unwrap();
        let p = codespace_projector(&empty);
        assert!((p.matrix() - CMatrix::identity(4, 4)).norm() < 1e-14);

        let zz = catalog("zz").unwrap();
        let p = codespace_projector(&zz);
        // span{|00>, |11>}: diagonal entries 1, 0, 0, 1.
        for (idx, want) in [(0, 1.0), (1, 0.0), (2, 0.0), (3, 1.0)] {
            assert!((p.matrix()[(idx, idx)].re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn penalty_spectrum_counts_violated_generators() {
        let c4 = catalog("xxxx_zzzz").unwrap();
        let (h_p, gap) = penalty_hamiltonian(&c4);
        assert_eq!(gap, 1.0);
        let d = spectral_decompose_default(&h_p).unwrap();
        let energies = d.energies();
        assert_eq!(energies.len(), 3);
        for (e, want) in energies.iter().zip([0.0, 1.0, 2.0]) {
            assert!((e - want).abs() < 1e-12);
        }
        // Ground subspace is the codespace: H_p P_C = 0.
        let p_c = codespace_projector(&c4);
        assert!((h_p.matrix() * p_c.matrix()).norm() < 1e-12);
        assert!((d.ground().projector.matrix() - p_c.matrix()).norm() < 1e-10);

        let zz = catalog("zz").unwrap();
        let (h_p, gap) = penalty_hamiltonian(&zz);
        assert_eq!(gap, 1.0);
        let d = spectral_decompose_default(&h_p).unwrap();
        assert_eq!(d.energies(), vec![0.0, 1.0]);
    }

    #[test]
    fn detects_all_weight_one_errors_and_rejects_logicals() {
        let c4 = catalog("xxxx_zzzz").unwrap();
        for (label, p) in weight_one_paulis(4) {
            let detected = detects(&c4, &pauli_matrix(&p), 1e-10).unwrap();
            assert!(detected, "weight-1 error {label} must be detected");
        }
        let id = Operator::identity(16);
        assert!(!detects(&c4, &id, 1e-10).unwrap());
        assert!((detection_residual(&c4, &id).unwrap() - 1.0).abs() < 1e-12);

        let logical_x = pauli_matrix(&PauliString::parse("XXII").unwrap());
        assert!(!detects(&c4, &logical_x, 1e-10).unwrap());
    }

    #[test]
    fn encode_substitutes_logical_strings() {
        let c4 = catalog("xxxx_zzzz").unwrap();
        let enc = encode_logical(&[LogicalTerm::new("Z", -0.5)], &c4, 2.0).unwrap();
        let want = pauli_matrix(&PauliString::parse_with_coefficient("ZZII", -0.5).unwrap());
        assert!((enc.h_bar.matrix() - want.matrix()).norm() < 1e-14);
        assert_eq!(enc.eta_p, 2.0);
        assert_eq!(enc.gap, 1.0);

        // Empty term list: H = eta_p H_p.
        let enc = encode_logical(&[], &c4, 3.0).unwrap();
        assert!(enc.h_bar.frobenius_norm() < 1e-14);
        let h = enc.hamiltonian();
        assert!((h.matrix() - enc.h_p.scaled(3.0).matrix()).norm() < 1e-12);

        // X1 + Z1 still commutes with the penalty.
        let enc = encode_logical(
            &[LogicalTerm::new("X", 1.0), LogicalTerm::new("Z", 1.0)],
            &c4,
            1.0,
        )
        .unwrap();
        assert!(enc.h_bar.commutator(&enc.h_p).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn encode_reports_missing_logical() {
        let c4 = catalog("xxxx_zzzz").unwrap();
        let r = encode_logical(&[LogicalTerm::new("Y", 1.0)], &c4, 1.0);
        assert!(matches!(r, Err(Error::MissingLogical { .. })));
    }

    #[test]
    fn invalid_codes_are_rejected() {
        let gens = |ss: &[&str]| {
            ss.iter()
                .map(|s| PauliString::parse(s).unwrap())
                .collect::<Vec<_>>()
        };
        // XX and ZI anticommute.
        let r = StabilizerCode::new(2, gens(&["XX", "ZI"]), BTreeMap::new());
        assert!(matches!(r, Err(Error::InvalidCode(_))));
        // ZZI * IZZ = ZIZ: dependent triple.
        let r = StabilizerCode::new(3, gens(&["ZZI", "IZZ", "ZIZ"]), BTreeMap::new());
        assert!(matches!(r, Err(Error::InvalidCode(_))));
    }

    #[test]
    fn joint_spectrum_is_affine_in_eta_p() {
        // eps_l = omega_bar_l + eta_p * xi_l for the commuting split, read
        // off through projector traces level by level.
        let c4 = catalog("xxxx_zzzz").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let eta = rng.gen_range(0.3..9.0);
            let enc = encode_logical(&[LogicalTerm::new("Z", -0.5)], &c4, eta).unwrap();
            let d = spectral_decompose_default(&enc.hamiltonian()).unwrap();
            for level in &d.levels {
                let r = level.projector.trace().re;
                let omega_bar = (level.projector.matrix() * enc.h_bar.matrix()).trace().re / r;
                let xi = (level.projector.matrix() * enc.h_p.matrix()).trace().re / r;
                let rel = (level.energy - (omega_bar + eta * xi)).abs()
                    / level.energy.abs().max(1.0);
                assert!(rel < 1e-9, "eta={eta}: rel={rel:.3e}");
            }
        }
    }

    #[test]
    fn gap_chain_inequality() {
        // For l outside the codespace: eps_l - eps_0 >= Tr-normalized
        // H_bar difference + eta_p * g, and >= eta_p * g for the reference
        // Hamiltonian whose ground sits at the global H_bar minimum.
        let c4 = catalog("xxxx_zzzz").unwrap();
        for eta in [0.7, 2.0, 5.0] {
            let enc = encode_logical(&[LogicalTerm::new("Z", -0.5)], &c4, eta).unwrap();
            let d = spectral_decompose_default(&enc.hamiltonian()).unwrap();
            let ground = d.ground();
            let e0 = ground.energy;
            let r0 = ground.projector.trace().re;
            let hbar0 = (ground.projector.matrix() * enc.h_bar.matrix()).trace().re / r0;
            for level in d.levels.iter().skip(1) {
                let r = level.projector.trace().re;
                let in_code = (level.projector.matrix() * enc.p_c.matrix()).trace().re / r;
                if in_code > 0.5 {
                    continue;
                }
                let hbar_l = (level.projector.matrix() * enc.h_bar.matrix()).trace().re / r;
                let xi_l = (level.projector.matrix() * enc.h_p.matrix()).trace().re / r;
                assert!(xi_l >= enc.gap - 1e-10, "penalty gap");
                let lhs = level.energy - e0;
                assert!(lhs >= (hbar_l - hbar0) + eta * enc.gap - 1e-9);
                assert!(lhs >= eta * enc.gap - 1e-9);
            }
        }
    }

    #[test]
    fn catalog_logical_pairs_are_consistent() {
        for name in ["zz", "zzi_izz"] {
            let code = catalog(name).unwrap();
            let x = pauli_matrix(code.logical("X1").unwrap());
            let z = pauli_matrix(code.logical("Z1").unwrap());
            let y = pauli_matrix(code.logical("Y1").unwrap());
            // Y1 = i X1 Z1 and all squares are the identity.
            let want = (x.matrix() * z.matrix()) * C64::new(0.0, 1.0);
            assert!((y.matrix() - want).norm() < 1e-13, "{name}");
            let id = CMatrix::identity(code.dim(), code.dim());
            assert!(((y.matrix() * y.matrix()) - &id).norm() < 1e-13);
        }
    }

    #[test]
    fn weight_one_list_is_qubit_major() {
        let list = weight_one_paulis(2);
        let labels: Vec<_> = list.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["X1", "Y1", "Z1", "X2", "Y2", "Z2"]);
        assert!(list
            .iter()
            .all(|(_, p)| p.weight() == 1 && p.letters().iter().any(|l| *l != PauliLetter::I)));
    }
}
