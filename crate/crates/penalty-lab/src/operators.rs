//! Pauli-string algebra, dense Hermitian operators, and spectral
//! decomposition with degeneracy grouping.
//!
//! Everything downstream (codes, dissipators, rates) is built on the three
//! types here: [`PauliString`], [`Operator`], and [`SpectralDecomposition`].
//! Matrices are dense; the intended scale is n <= 10 qubits, where dense
//! eigendecomposition is cheap and unambiguous.

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Deviation threshold below which a matrix counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// One single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Self::I),
            'X' => Ok(Self::X),
            'Y' => Ok(Self::Y),
            'Z' => Ok(Self::Z),
            other => Err(Error::Config(format!("invalid Pauli letter '{other}'"))),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    /// The 2 x 2 matrix of this letter.
    pub fn matrix(self) -> CMatrix {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Self::I => CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            Self::X => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Self::Y => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Self::Z => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }

    /// Single-letter product `self * other` as `(phase, letter)` with
    /// phase in {1, i, -1, -i}.
    pub fn mul(self, other: Self) -> (C64, Self) {
        use PauliLetter::*;
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match (self, other) {
            (I, p) | (p, I) => (one, p),
            (X, X) | (Y, Y) | (Z, Z) => (one, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
        }
    }
}

/// A real-coefficient tensor product of Pauli letters: the atom of every
/// operator in this crate (system Hamiltonians, stabilizer generators,
/// system-bath couplings).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    letters: Vec<PauliLetter>,
    coefficient: f64,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>, coefficient: f64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Config("Pauli string needs at least one qubit".into()));
        }
        Ok(Self { letters, coefficient })
    }

    /// Parse a string such as `"XIZY"`; the coefficient defaults to 1.
    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(PauliLetter::from_char)
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters, 1.0)
    }

    pub fn parse_with_coefficient(s: &str, coefficient: f64) -> Result<Self> {
        Ok(Self::parse(s)?.with_coefficient(coefficient))
    }

    /// A single non-identity letter at `qubit` (0-based) on `n` qubits.
    pub fn single(n: usize, qubit: usize, letter: PauliLetter, coefficient: f64) -> Result<Self> {
        if qubit >= n {
            return Err(Error::Config(format!("qubit {qubit} out of range for n = {n}")));
        }
        let mut letters = vec![PauliLetter::I; n];
        letters[qubit] = letter;
        Self::new(letters, coefficient)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![PauliLetter::I; n],
            coefficient: 1.0,
        }
    }

    pub fn with_coefficient(mut self, coefficient: f64) -> Self {
        self.coefficient = coefficient;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|l| **l != PauliLetter::I).count()
    }

    /// Symplectic commutation check: two Pauli strings commute iff they
    /// anticommute on an even number of qubits.
    pub fn commutes_with(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n_qubits(), other.n_qubits());
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| {
                **a != PauliLetter::I && **b != PauliLetter::I && a != b
            })
            .count();
        anti % 2 == 0
    }

    /// Product `self * other`, splitting the result into a unit phase in
    /// {1, i, -1, -i} and a Pauli string with real coefficient, so that
    /// `matrix(self) * matrix(other) = phase * matrix(product)`.
    pub fn mul(&self, other: &Self) -> Result<(C64, Self)> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                got: other.n_qubits(),
            });
        }
        let mut phase = C64::new(1.0, 0.0);
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(a, b)| {
                let (p, l) = a.mul(*b);
                phase *= p;
                l
            })
            .collect();
        Ok((
            phase,
            Self {
                letters,
                coefficient: self.coefficient * other.coefficient,
            },
        ))
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|l| l.to_char()).collect()
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if (self.coefficient - 1.0).abs() > 0.0 {
            write!(f, "{}*{}", self.coefficient, self.label())
        } else {
            write!(f, "{}", self.label())
        }
    }
}

/// Dense matrix of the coefficient-weighted tensor product. Qubit 0 is the
/// leftmost (most significant) factor, so `"XI"` maps to `sigma_x (x) I`.
pub fn pauli_matrix(p: &PauliString) -> Operator {
    let mut m = CMatrix::from_element(1, 1, C64::new(p.coefficient, 0.0));
    for letter in &p.letters {
        m = m.kronecker(&letter.matrix());
    }
    Operator::from_matrix(m)
}

/// Dense Hermitian sum of Pauli terms.
pub fn sum_of_paulis(n: usize, terms: &[PauliString]) -> Result<Operator> {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for t in terms {
        if t.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: t.n_qubits(),
            });
        }
        m += pauli_matrix(t).matrix();
    }
    Ok(Operator::from_matrix(m))
}

/// A dense operator on the full Hilbert space, tagged with whether it is
/// Hermitian (max |m - m^dag| entry below [`HERMITIAN_TOL`]).
#[derive(Debug, Clone)]
pub struct Operator {
    matrix: CMatrix,
    hermitian: bool,
}

impl Operator {
    /// Wrap a square matrix, detecting Hermiticity.
    pub fn from_matrix(matrix: CMatrix) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "operator must be square");
        let hermitian = hermitian_deviation(&matrix) <= HERMITIAN_TOL;
        Self { matrix, hermitian }
    }

    /// Wrap a matrix that must be Hermitian.
    pub fn hermitian_from(matrix: CMatrix) -> Result<Self> {
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NonHermitian { max_dev: dev });
        }
        Ok(Self {
            matrix,
            hermitian: true,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * C64::new(s, 0.0),
            hermitian: self.hermitian,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Spectral (operator) norm: largest |eigenvalue| when Hermitian,
    /// otherwise the largest singular value via `A^dag A`.
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self::from_matrix(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self::from_matrix(&self.matrix * &other.matrix + &other.matrix * &self.matrix)
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_matrix(&self.matrix + &rhs.matrix)
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_matrix(&self.matrix - &rhs.matrix)
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator::from_matrix(&self.matrix * &rhs.matrix)
    }
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        let gram = m.adjoint() * m;
        return largest_hermitian_eigenvalue_abs(&gram).max(0.0).sqrt();
    }
    if hermitian_deviation(m) <= HERMITIAN_TOL {
        largest_hermitian_eigenvalue_abs(m)
    } else {
        let gram = m.adjoint() * m;
        largest_hermitian_eigenvalue_abs(&gram).max(0.0).sqrt()
    }
}

fn largest_hermitian_eigenvalue_abs(m: &CMatrix) -> f64 {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    eig.eigenvalues.iter().fold(0.0f64, |acc, e| acc.max(e.abs()))
}

/// One grouped eigenlevel: energy, orthogonal projector, multiplicity.
#[derive(Debug, Clone)]
pub struct EnergyLevel {
    pub energy: f64,
    pub projector: Operator,
    pub multiplicity: usize,
}

/// Grouped eigenvalues and eigenprojectors of a Hermitian operator.
///
/// Eigenvalues within `grouping_tol` of each other are merged into a single
/// level whose projector is the sum of the merged eigenvector dyads. Levels
/// are ordered by strictly increasing energy. Eigenvector phases are never
/// exposed; consumers work with projectors only.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub levels: Vec<EnergyLevel>,
    pub grouping_tol: f64,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.levels[0].projector.dim()
    }

    pub fn ground(&self) -> &EnergyLevel {
        &self.levels[0]
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// Full spread of the grouped spectrum.
    pub fn spectral_range(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.energy) - self.levels[0].energy
    }

    /// Sum_l eps_l Pi_l.
    pub fn reconstruct(&self) -> Operator {
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for level in &self.levels {
            m += level.projector.matrix() * C64::new(level.energy, 0.0);
        }
        Operator::from_matrix(m)
    }
}

/// Default grouping tolerance: 1e-8 x the spectral range (absolute, not
/// relative — penalty spectra hold exactly degenerate clusters split only
/// by floating-point noise).
pub fn default_grouping_tol(spectral_range: f64) -> f64 {
    1e-8 * spectral_range.max(1.0)
}

/// Eigendecomposition of a Hermitian operator with degeneracy grouping.
///
/// Rejects non-Hermitian input and groupings where a chained cluster has
/// diameter above 10 x `grouping_tol` (a sign the tolerance is ill-chosen).
pub fn spectral_decompose(h: &Operator, grouping_tol: f64) -> Result<SpectralDecomposition> {
    let dev = hermitian_deviation(h.matrix());
    if dev > HERMITIAN_TOL {
        return Err(Error::NonHermitian { max_dev: dev });
    }
    assert!(grouping_tol > 0.0, "grouping_tol must be positive");

    // Symmetrize to scrub the residual O(1e-16) asymmetry before QR.
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    let dim = sym.nrows();
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("eigenvalue is NaN")
    });

    let mut levels = Vec::new();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim
            && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= grouping_tol
        {
            end += 1;
        }
        let cluster = &order[start..end];
        let diameter =
            eig.eigenvalues[cluster[cluster.len() - 1]] - eig.eigenvalues[cluster[0]];
        if diameter > 10.0 * grouping_tol {
            return Err(Error::AmbiguousGrouping {
                diameter,
                tol: grouping_tol,
            });
        }
        let energy =
            cluster.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / cluster.len() as f64;
        let mut proj = CMatrix::zeros(dim, dim);
        for &k in cluster {
            let v = eig.eigenvectors.column(k).clone_owned();
            proj += &v * v.adjoint();
        }
        levels.push(EnergyLevel {
            energy,
            projector: Operator::from_matrix(proj),
            multiplicity: cluster.len(),
        });
        start = end;
    }

    Ok(SpectralDecomposition {
        levels,
        grouping_tol,
    })
}

/// [`spectral_decompose`] with the default tolerance for the operator's
/// own spectral range.
pub fn spectral_decompose_default(h: &Operator) -> Result<SpectralDecomposition> {
    let dev = hermitian_deviation(h.matrix());
    if dev > HERMITIAN_TOL {
        return Err(Error::NonHermitian { max_dev: dev });
    }
    let sym = Operator::from_matrix((h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0));
    let probe = sym.matrix().clone().symmetric_eigen();
    let lo = probe.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = probe.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    spectral_decompose(h, default_grouping_tol(hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
        let raw = CMatrix::from_fn(dim, dim, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        Operator::from_matrix((&raw + raw.adjoint()) * c(0.5, 0.0))
    }

    #[test]
    fn single_qubit_z_is_diag() {
        let p = PauliString::parse("Z").unwrap();
        let m = pauli_matrix(&p);
        assert_eq!(m.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(m.matrix()[(1, 1)], c(-1.0, 0.0));
        assert_eq!(m.matrix()[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn xi_is_sigma_x_tensor_identity() {
        let p = PauliString::parse_with_coefficient("XI", 0.5).unwrap();
        let m = pauli_matrix(&p);
        assert_eq!(m.dim(), 4);
        // 0.5 * sigma_x (x) I has 0.5 on the antidiagonal 2x2 identity blocks.
        for (i, j) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            assert_eq!(m.matrix()[(i, j)], c(0.5, 0.0));
        }
        assert_eq!(m.matrix()[(0, 1)], c(0.0, 0.0));
        assert_eq!(m.matrix()[(0, 0)], c(0.0, 0.0));
        assert!(m.is_hermitian());
    }

    #[test]
    fn weight_four_string_squares_to_identity() {
        let p = PauliString::parse("XXXX").unwrap();
        let m = pauli_matrix(&p);
        let sq = &m * &m;
        let id = Operator::identity(16);
        assert!((sq.matrix() - id.matrix()).norm() < 1e-14);
    }

    #[test]
    fn product_homomorphism_on_random_strings() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let letters = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let draw = |rng: &mut ChaCha8Rng| {
                let ls: Vec<_> = (0..n)
                    .map(|_| letters[rng.gen_range(0..4)])
                    .collect();
                PauliString::new(ls, rng.gen_range(-2.0..2.0)).unwrap()
            };
            let p = draw(&mut rng);
            let q = draw(&mut rng);
            let (phase, pq) = p.mul(&q).unwrap();
            let lhs = pauli_matrix(&p).matrix() * pauli_matrix(&q).matrix();
            let rhs = pauli_matrix(&pq).matrix() * phase;
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn commutes_with_matches_matrix_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let letters = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
        for _ in 0..30 {
            let n = rng.gen_range(1..=4);
            let draw = |rng: &mut ChaCha8Rng| {
                let ls: Vec<_> = (0..n)
                    .map(|_| letters[rng.gen_range(0..4)])
                    .collect();
                PauliString::new(ls, 1.0).unwrap()
            };
            let p = draw(&mut rng);
            let q = draw(&mut rng);
            let comm = pauli_matrix(&p).commutator(&pauli_matrix(&q));
            let vanishes = comm.frobenius_norm() < 1e-12;
            assert_eq!(p.commutes_with(&q), vanishes, "{p} vs {q}");
        }
    }

    #[test]
    fn decompose_diagonal_with_degeneracy() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(3.0, 0.0),
        ]));
        let d = spectral_decompose(&Operator::from_matrix(m), 1e-8).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.levels[0].energy - 1.0).abs() < 1e-12);
        assert_eq!(d.levels[0].multiplicity, 2);
        assert!((d.levels[0].projector.trace().re - 2.0).abs() < 1e-12);
        assert!((d.levels[1].energy - 3.0).abs() < 1e-12);
        assert_eq!(d.levels[1].multiplicity, 1);
    }

    #[test]
    fn decompose_single_qubit_sigma_z() {
        // H = (Delta/2) sigma_z with Delta = 2: ground |1> at energy -1.
        let h = pauli_matrix(&PauliString::parse("Z").unwrap());
        let d = spectral_decompose_default(&h).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.levels[0].energy + 1.0).abs() < 1e-12);
        assert!((d.levels[0].projector.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
        assert!((d.levels[1].energy - 1.0).abs() < 1e-12);
        assert!((d.levels[1].projector.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let r = spectral_decompose(&Operator::from_matrix(m), 1e-8);
        assert!(matches!(r, Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn rejects_ambiguous_chained_cluster() {
        // Eigenvalues chained 0.9*tol apart, total diameter 10.8*tol.
        let tol = 1e-8;
        let vals: Vec<C64> = (0..13).map(|k| c(0.9 * tol * k as f64, 0.0)).collect();
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals));
        let r = spectral_decompose(&Operator::from_matrix(m), tol);
        assert!(matches!(r, Err(Error::AmbiguousGrouping { .. })));
    }

    #[test]
    fn projectors_complete_orthogonal_and_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &dim in &[2usize, 5, 16, 64] {
            let h = random_hermitian(&mut rng, dim);
            let d = spectral_decompose_default(&h).unwrap();

            let mut sum = CMatrix::zeros(dim, dim);
            for level in &d.levels {
                sum += level.projector.matrix();
            }
            assert!(
                spectral_norm(&(sum - CMatrix::identity(dim, dim))) < 1e-10,
                "completeness at dim {dim}"
            );

            for (a, la) in d.levels.iter().enumerate() {
                for (b, lb) in d.levels.iter().enumerate() {
                    let prod = la.projector.matrix() * lb.projector.matrix();
                    let expect = if a == b {
                        la.projector.matrix().clone()
                    } else {
                        CMatrix::zeros(dim, dim)
                    };
                    assert!(spectral_norm(&(prod - expect)) < 1e-10, "orthogonality");
                }
            }

            let rel = (d.reconstruct().matrix() - h.matrix()).norm() / h.matrix().norm();
            assert!(rel < 1e-9, "reconstruction at dim {dim}: {rel:.3e}");

            for w in d.levels.windows(2) {
                assert!(w[1].energy - w[0].energy > d.grouping_tol);
            }
        }
    }

    #[test]
    fn sum_projectors_commute_with_commuting_parts() {
        // A, B commuting Hermitian: every projector of A+B commutes with both.
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..5 {
            let dim = 8;
            // Build commuting pair from a shared eigenbasis with random spectra.
            let g = random_hermitian(&mut rng, dim);
            let basis = g.matrix().clone().symmetric_eigen().eigenvectors;
            let diag = |rng: &mut ChaCha8Rng| {
                let d = CMatrix::from_fn(dim, dim, |i, j| {
                    if i == j {
                        c(rng.gen_range(-2.0..2.0f64).round(), 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                });
                Operator::from_matrix(&basis * d * basis.adjoint())
            };
            let a = diag(&mut rng);
            let b = diag(&mut rng);
            let d = spectral_decompose_default(&(&a + &b)).unwrap();
            for level in &d.levels {
                assert!(level.projector.commutator(&a).spectral_norm() < 1e-9);
                assert!(level.projector.commutator(&b).spectral_norm() < 1e-9);
            }
        }
    }
}
