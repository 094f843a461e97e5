//! Frequency-resolved interaction decomposition and the two Markovian
//! generators: the Lindblad-form dissipator with optional Lamb shift, and
//! the double-sided (non-RWA) generator.
//!
//! Generators are built for a frozen instant: the operators `A(omega)` come
//! from the instantaneous spectrum of `H`. Time-dependent schedules rebuild
//! the generator per step (see `dynamics`).

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::operators::{
    default_grouping_tol, hermitian_deviation, spectral_decompose, Operator,
    PauliString, SpectralDecomposition, HERMITIAN_TOL,
};
use crate::{CMatrix, C64};

/// The system side of `H_SB = sum_a A_a (x) B_a`: a list of Hermitian
/// coupling operators with labels, plus the declared locality bound.
#[derive(Debug, Clone)]
pub struct InteractionSet {
    terms: Vec<(String, Operator)>,
    k_locality: usize,
}

impl InteractionSet {
    /// Build from Pauli strings; the locality bound is the largest weight.
    pub fn from_paulis(n: usize, paulis: &[(String, PauliString)]) -> Result<Self> {
        let mut terms = Vec::with_capacity(paulis.len());
        let mut k = 0;
        for (label, p) in paulis {
            if p.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.n_qubits(),
                });
            }
            k = k.max(p.weight());
            terms.push((label.clone(), crate::operators::pauli_matrix(p)));
        }
        Ok(Self {
            terms,
            k_locality: k,
        })
    }

    /// Build from arbitrary Hermitian operators.
    pub fn from_operators(terms: Vec<(String, Operator)>) -> Result<Self> {
        for (label, op) in &terms {
            let dev = hermitian_deviation(op.matrix());
            if dev > HERMITIAN_TOL {
                return Err(Error::Config(format!(
                    "interaction {label} is not Hermitian (deviation {dev:.3e})"
                )));
            }
        }
        let k = terms.first().map_or(0, |(_, op)| op.dim().trailing_zeros() as usize);
        Ok(Self {
            terms,
            k_locality: k,
        })
    }

    pub fn empty() -> Self {
        Self {
            terms: Vec::new(),
            k_locality: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn k_locality(&self) -> usize {
        self.k_locality
    }

    pub fn labels(&self) -> Vec<&str> {
        self.terms.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn operators(&self) -> impl Iterator<Item = &Operator> {
        self.terms.iter().map(|(_, op)| op)
    }

    pub fn get(&self, idx: usize) -> (&str, &Operator) {
        let (l, op) = &self.terms[idx];
        (l, op)
    }
}

/// Default Bohr-frequency binning tolerance for a spectrum of the given
/// range: exact degeneracies dominate at desk scale, so the tolerance only
/// has to swallow floating-point noise.
pub fn default_frequency_tol(spectral_range: f64) -> f64 {
    1e-9 * spectral_range.max(1.0)
}

/// Binned Bohr frequencies `omega_{ll'} = eps_{l'} - eps_l` of a spectral
/// decomposition: one entry per distinct frequency, with the ordered level
/// pairs that realize it.
#[derive(Debug, Clone)]
pub struct BohrSpectrum {
    pub frequencies: Vec<f64>,
    pub pairs: Vec<Vec<(usize, usize)>>,
}

/// Bin the Bohr frequencies of `decomp` with `frequency_tol`.
///
/// Frequencies within the tolerance merge into one bin; a bin whose spread
/// exceeds the floating-point noise floor means two physically distinct
/// frequencies are being conflated, which is surfaced as an error instead
/// of silently merged.
pub fn bohr_spectrum(decomp: &SpectralDecomposition, frequency_tol: f64) -> Result<BohrSpectrum> {
    let n = decomp.len();
    let mut raw: Vec<(f64, (usize, usize))> = Vec::with_capacity(n * n);
    for l in 0..n {
        for lp in 0..n {
            raw.push((decomp.levels[lp].energy - decomp.levels[l].energy, (l, lp)));
        }
    }
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("Bohr frequency is NaN"));

    let noise_floor = 1e-12 * decomp.spectral_range().max(1.0);
    let mut frequencies = Vec::new();
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut start = 0;
    while start < raw.len() {
        let mut end = start + 1;
        while end < raw.len() && raw[end].0 - raw[end - 1].0 <= frequency_tol {
            end += 1;
        }
        let cluster = &raw[start..end];
        let diameter = cluster[cluster.len() - 1].0 - cluster[0].0;
        if diameter > noise_floor {
            return Err(Error::AmbiguousBinning {
                omega: cluster[0].0,
                diameter,
                tol: frequency_tol,
                noise_floor,
            });
        }
        let mean = cluster.iter().map(|(w, _)| w).sum::<f64>() / cluster.len() as f64;
        frequencies.push(mean);
        pairs.push(cluster.iter().map(|(_, p)| *p).collect());
        start = end;
    }
    Ok(BohrSpectrum { frequencies, pairs })
}

/// Frequency-resolved interaction operators on a shared frequency grid:
/// `component(a, w) = A_a(omega_w) = sum_{eps_{l'} - eps_l = omega_w}
/// Pi_l A_a Pi_{l'}`.
#[derive(Debug, Clone)]
pub struct FrequencyResolvedOps {
    pub frequencies: Vec<f64>,
    per_term: Vec<Vec<CMatrix>>,
    pub frequency_tol: f64,
}

impl FrequencyResolvedOps {
    pub fn n_terms(&self) -> usize {
        self.per_term.len()
    }

    pub fn component(&self, term: usize, freq_idx: usize) -> &CMatrix {
        &self.per_term[term][freq_idx]
    }

    /// Completeness: `sum_omega A(omega)` reconstructs the interaction.
    pub fn reconstruct(&self, term: usize) -> CMatrix {
        let dim = self.per_term[term][0].nrows();
        let mut m = CMatrix::zeros(dim, dim);
        for c in &self.per_term[term] {
            m += c;
        }
        m
    }
}

/// Decompose every interaction over the Bohr frequencies of `decomp`.
pub fn decompose_interactions(
    interactions: &InteractionSet,
    decomp: &SpectralDecomposition,
    frequency_tol: f64,
) -> Result<FrequencyResolvedOps> {
    let bohr = bohr_spectrum(decomp, frequency_tol)?;
    let dim = decomp.dim();
    let mut per_term = Vec::with_capacity(interactions.len());
    for a in interactions.operators() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.dim(),
            });
        }
        let mut comps = Vec::with_capacity(bohr.frequencies.len());
        for pair_list in &bohr.pairs {
            let mut comp = CMatrix::zeros(dim, dim);
            for &(l, lp) in pair_list {
                comp += decomp.levels[l].projector.matrix()
                    * a.matrix()
                    * decomp.levels[lp].projector.matrix();
            }
            comps.push(comp);
        }
        per_term.push(comps);
    }
    Ok(FrequencyResolvedOps {
        frequencies: bohr.frequencies,
        per_term,
        frequency_tol,
    })
}

/// Single-operator variant of [`decompose_interactions`], returning
/// `(omega, A(omega))` pairs.
pub fn decompose_interaction(
    a: &Operator,
    decomp: &SpectralDecomposition,
    frequency_tol: f64,
) -> Result<Vec<(f64, CMatrix)>> {
    let set = InteractionSet::from_operators(vec![("A".into(), a.clone())])?;
    let ops = decompose_interactions(&set, decomp, frequency_tol)?;
    Ok(ops
        .frequencies
        .iter()
        .cloned()
        .zip(ops.per_term.into_iter().next().expect("one term"))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiouvillianKind {
    Lindblad,
    Dsame,
}

/// One `coef * left . rho . right` contribution to a superoperator.
#[derive(Debug, Clone)]
struct SandwichTerm {
    coef: C64,
    left: CMatrix,
    right: CMatrix,
}

/// A Markovian generator: commutator part plus a dissipator stored as a
/// sum of sandwich terms. The materialized `dim^2 x dim^2` matrix is
/// available on demand for superoperator-level tests; propagation uses the
/// term-wise apply form.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub kind: LiouvillianKind,
    /// `H + H_LS` for the Lindblad kind, bare `H` for the double-sided kind.
    hamiltonian_part: Operator,
    /// The bare system Hamiltonian; its ground projector defines the
    /// subspace whose population the excitation rate tracks.
    system_hamiltonian: Operator,
    decomposition: SpectralDecomposition,
    sandwich: Vec<SandwichTerm>,
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.hamiltonian_part.dim()
    }

    pub fn hamiltonian_part(&self) -> &Operator {
        &self.hamiltonian_part
    }

    pub fn system_hamiltonian(&self) -> &Operator {
        &self.system_hamiltonian
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn ground_projector(&self) -> &Operator {
        &self.decomposition.ground().projector
    }

    /// Full generator action `-i[H_part, rho] + D[rho]`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let h = self.hamiltonian_part.matrix();
        let mut out = (h * rho - rho * h) * C64::new(0.0, -1.0);
        out += self.dissipator_apply(rho);
        out
    }

    /// Dissipative part only.
    pub fn dissipator_apply(&self, rho: &CMatrix) -> CMatrix {
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        for term in &self.sandwich {
            out += (&term.left * rho * &term.right) * term.coef;
        }
        out
    }

    /// Dense `dim^2 x dim^2` matrix of the full generator in the
    /// column-major vectorization `vec(L rho R) = (R^T (x) L) vec(rho)`.
    pub fn superoperator(&self) -> CMatrix {
        let dim = self.dim();
        let id = CMatrix::identity(dim, dim);
        let h = self.hamiltonian_part.matrix();
        let mut sup = (id.kronecker(h) - h.transpose().kronecker(&id)) * C64::new(0.0, -1.0);
        sup += self.dissipator_superoperator();
        sup
    }

    /// Dense matrix of the dissipator alone.
    pub fn dissipator_superoperator(&self) -> CMatrix {
        let dim = self.dim();
        let mut sup = CMatrix::zeros(dim * dim, dim * dim);
        for term in &self.sandwich {
            sup += term.right.transpose().kronecker(&term.left) * term.coef;
        }
        sup
    }

    /// Coarse magnitude of the generator, used to scale finite-difference
    /// step sizes.
    pub fn strength(&self) -> f64 {
        let mut s = self.hamiltonian_part.spectral_norm();
        let dim = self.dim() as f64;
        for term in &self.sandwich {
            s += term.coef.norm() * term.left.norm() * term.right.norm() / dim;
        }
        s.max(1.0)
    }
}

/// The Lindblad-form generator
/// `-i[H + H_LS, rho] + sum_omega sum_ab gamma_ab(omega)
///  [A_b(omega) rho A_a(omega)^dag - {A_a(omega)^dag A_b(omega), rho} / 2]`.
///
/// With `include_lamb_shift`, `H_LS = sum_omega sum_ab S_ab(omega)
/// A_a(omega)^dag A_b(omega)`; it commutes with `H` by construction.
pub fn build_lindblad(
    h: &Operator,
    interactions: &InteractionSet,
    bath: &BathSpec,
    include_lamb_shift: bool,
) -> Result<Liouvillian> {
    let (decomp, ops) = decompose_default(h, interactions)?;
    check_coupling_size(interactions, bath)?;
    let dim = h.dim();
    let n_terms = interactions.len();
    let c = bath.coupling();

    let mut sandwich = Vec::new();
    let mut k_total = CMatrix::zeros(dim, dim);
    let mut h_ls = CMatrix::zeros(dim, dim);
    for (w, &omega) in ops.frequencies.iter().enumerate() {
        let gamma = bath.gamma_scalar(omega);
        let s_val = if include_lamb_shift {
            bath.s_principal_value(omega)?
        } else {
            0.0
        };
        for alpha in 0..n_terms {
            // B_a = sum_b gamma_ab(omega) A_b(omega), so the sandwich part
            // is sum_a B_a rho A_a(omega)^dag.
            let mut b_a = CMatrix::zeros(dim, dim);
            for beta in 0..n_terms {
                let w_ab = c[(alpha, beta)];
                if w_ab != 0.0 {
                    b_a += ops.component(beta, w) * C64::new(w_ab, 0.0);
                }
            }
            let a_dag = ops.component(alpha, w).adjoint();
            k_total += &a_dag * &b_a * C64::new(gamma, 0.0);
            if include_lamb_shift && s_val != 0.0 {
                h_ls += &a_dag * &b_a * C64::new(s_val, 0.0);
            }
            if gamma != 0.0 {
                sandwich.push(SandwichTerm {
                    coef: C64::new(gamma, 0.0),
                    left: b_a,
                    right: a_dag,
                });
            }
        }
    }
    let id = CMatrix::identity(dim, dim);
    if k_total.norm() > 0.0 {
        sandwich.push(SandwichTerm {
            coef: C64::new(-0.5, 0.0),
            left: k_total.clone(),
            right: id.clone(),
        });
        sandwich.push(SandwichTerm {
            coef: C64::new(-0.5, 0.0),
            left: id,
            right: k_total,
        });
    }

    let hamiltonian_part = Operator::hermitian_from(h.matrix() + h_ls)?;
    Ok(Liouvillian {
        kind: LiouvillianKind::Lindblad,
        hamiltonian_part,
        system_hamiltonian: h.clone(),
        decomposition: decomp,
        sandwich,
    })
}

/// The Lamb-shift Hamiltonian alone (the Hermitian part the Lindblad
/// generator adds to `H`).
pub fn lamb_shift_hamiltonian(
    h: &Operator,
    interactions: &InteractionSet,
    bath: &BathSpec,
) -> Result<Operator> {
    let gen = build_lindblad(h, interactions, bath, true)?;
    Ok(&gen.hamiltonian_part - h)
}

/// Knobs for test modes of the double-sided generator.
#[derive(Debug, Clone, Copy, Default)]
pub struct DsameOptions {
    /// Keep only frequency-matched (secular) terms: applying this plus
    /// `zero_principal_value` reproduces the Lindblad dissipator exactly.
    pub secular_only: bool,
    /// Force `S(omega) = 0`, i.e. `Gamma = gamma / 2`.
    pub zero_principal_value: bool,
}

/// The double-sided generator
/// `-i[H, rho] + sum_ab sum_{ll'} Gamma_ab(omega_{ll'})
///  [Pi_l A_b Pi_{l'} rho, A_a] + h.c.`
///
/// Not of Lindblad form: complete positivity is not guaranteed, but trace
/// annihilation and Hermiticity preservation hold by the h.c. structure.
pub fn build_dsame(
    h: &Operator,
    interactions: &InteractionSet,
    bath: &BathSpec,
) -> Result<Liouvillian> {
    build_dsame_with(h, interactions, bath, DsameOptions::default())
}

/// [`build_dsame`] with explicit [`DsameOptions`].
pub fn build_dsame_with(
    h: &Operator,
    interactions: &InteractionSet,
    bath: &BathSpec,
    options: DsameOptions,
) -> Result<Liouvillian> {
    let (decomp, ops) = decompose_default(h, interactions)?;
    check_coupling_size(interactions, bath)?;
    let dim = h.dim();
    let n_terms = interactions.len();
    let c = bath.coupling();

    let gamma_cap = |omega: f64| -> Result<C64> {
        let s = if options.zero_principal_value {
            0.0
        } else {
            bath.s_principal_value(omega)?
        };
        Ok(C64::new(0.5 * bath.gamma_scalar(omega), s))
    };

    let mut sandwich = Vec::new();
    let id = CMatrix::identity(dim, dim);

    if options.secular_only {
        // sum_omega Gamma(omega) c_ab [A_b(w) rho A_a(w)^dag - A_a(w)^dag A_b(w) rho] + h.c.
        for (w, &omega) in ops.frequencies.iter().enumerate() {
            let cap = gamma_cap(omega)?;
            for alpha in 0..n_terms {
                let mut b_a = CMatrix::zeros(dim, dim);
                for beta in 0..n_terms {
                    let w_ab = c[(alpha, beta)];
                    if w_ab != 0.0 {
                        b_a += ops.component(beta, w) * C64::new(w_ab, 0.0);
                    }
                }
                let b_a = b_a * cap;
                let a_w = ops.component(alpha, w);
                let a_dag = a_w.adjoint();
                sandwich.push(SandwichTerm {
                    coef: C64::new(1.0, 0.0),
                    left: b_a.clone(),
                    right: a_dag.clone(),
                });
                sandwich.push(SandwichTerm {
                    coef: C64::new(-1.0, 0.0),
                    left: &a_dag * &b_a,
                    right: id.clone(),
                });
                // Hermitian-conjugate superoperator of the two terms above.
                let b_dag = b_a.adjoint();
                sandwich.push(SandwichTerm {
                    coef: C64::new(1.0, 0.0),
                    left: a_w.clone(),
                    right: b_dag.clone(),
                });
                sandwich.push(SandwichTerm {
                    coef: C64::new(-1.0, 0.0),
                    left: id.clone(),
                    right: &b_dag * a_w,
                });
            }
        }
    } else {
        // W_a = sum_b c_ab Y_b with Y_b = sum_{ll'} Gamma(omega_{ll'})
        // Pi_l A_b Pi_{l'}; the generator is sum_a [W_a rho, A_a] + h.c.
        let n_levels = decomp.len();
        let mut y: Vec<CMatrix> = vec![CMatrix::zeros(dim, dim); n_terms];
        for l in 0..n_levels {
            for lp in 0..n_levels {
                let omega = decomp.levels[lp].energy - decomp.levels[l].energy;
                let cap = gamma_cap(omega)?;
                let pl = decomp.levels[l].projector.matrix();
                let plp = decomp.levels[lp].projector.matrix();
                for (beta, y_b) in y.iter_mut().enumerate() {
                    let (_, a_b) = interactions.get(beta);
                    *y_b += pl * a_b.matrix() * plp * cap;
                }
            }
        }
        for alpha in 0..n_terms {
            let mut w_a = CMatrix::zeros(dim, dim);
            for (beta, y_b) in y.iter().enumerate() {
                let w_ab = c[(alpha, beta)];
                if w_ab != 0.0 {
                    w_a += y_b * C64::new(w_ab, 0.0);
                }
            }
            let (_, a_op) = interactions.get(alpha);
            let a = a_op.matrix();
            // [W_a rho, A_a] = W_a rho A_a - A_a W_a rho
            sandwich.push(SandwichTerm {
                coef: C64::new(1.0, 0.0),
                left: w_a.clone(),
                right: a.clone(),
            });
            sandwich.push(SandwichTerm {
                coef: C64::new(-1.0, 0.0),
                left: a * &w_a,
                right: id.clone(),
            });
            // h.c.: [A_a, rho W_a^dag] = A_a rho W_a^dag - rho W_a^dag A_a
            let w_dag = w_a.adjoint();
            sandwich.push(SandwichTerm {
                coef: C64::new(1.0, 0.0),
                left: a.clone(),
                right: w_dag.clone(),
            });
            sandwich.push(SandwichTerm {
                coef: C64::new(-1.0, 0.0),
                left: id.clone(),
                right: &w_dag * a,
            });
        }
    }

    Ok(Liouvillian {
        kind: LiouvillianKind::Dsame,
        hamiltonian_part: h.clone(),
        system_hamiltonian: h.clone(),
        decomposition: decomp,
        sandwich,
    })
}

fn decompose_default(
    h: &Operator,
    interactions: &InteractionSet,
) -> Result<(SpectralDecomposition, FrequencyResolvedOps)> {
    let dev = hermitian_deviation(h.matrix());
    if dev > HERMITIAN_TOL {
        return Err(Error::NonHermitian { max_dev: dev });
    }
    let probe = crate::operators::spectral_decompose_default(h)?;
    let range = probe.spectral_range();
    let decomp = spectral_decompose(h, default_grouping_tol(range))?;
    let ops = decompose_interactions(interactions, &decomp, default_frequency_tol(range))?;
    Ok((decomp, ops))
}

fn check_coupling_size(interactions: &InteractionSet, bath: &BathSpec) -> Result<()> {
    if !interactions.is_empty() && bath.n_terms() != interactions.len() {
        return Err(Error::DimensionMismatch {
            expected: interactions.len(),
            got: bath.n_terms(),
        });
    }
    Ok(())
}
