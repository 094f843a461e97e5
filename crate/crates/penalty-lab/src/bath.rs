//! Thermal bath spectral functions.
//!
//! The bath enters the master equations only through three transforms of
//! its correlation function: the decay-rate matrix `gamma_ab(omega)`, the
//! principal-value function `S_ab(omega)`, and the one-sided transform
//! `Gamma_ab(omega) = gamma_ab/2 + i S_ab`. A [`BathSpec`] is therefore a
//! spectral family plus a coupling matrix, never a bath Hamiltonian.
//!
//! The family is Ohmic-like, `gamma(omega) = mu omega^k exp(-omega/omega_c)`
//! for `omega > 0`, extended to negative frequencies by the KMS detailed
//! balance `gamma(-omega) = exp(-beta omega) gamma(omega)` and to zero by
//! continuity (`gamma(0) = 0` for `k >= 1`). The coupling factorizes as
//! `gamma_ab(omega) = c_ab gamma(omega)` with `c` real symmetric positive
//! semi-definite, so the diagonalizing frame is frequency independent.

use crate::error::{Error, Result};
use crate::RMatrix;
use num_complex::Complex64;

/// Default relative tolerance for the principal-value quadrature.
pub const DEFAULT_PV_TOL: f64 = 1e-9;

/// Thermal bath at inverse temperature `beta` with an Ohmic-like spectral
/// family and a factorized coupling matrix.
#[derive(Debug, Clone)]
pub struct BathSpec {
    beta: f64,
    mu: f64,
    k: u32,
    omega_c: f64,
    coupling: RMatrix,
}

impl BathSpec {
    pub fn new(beta: f64, mu: f64, k: u32, omega_c: f64, coupling: RMatrix) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Config(format!("beta must be > 0, got {beta}")));
        }
        if !(omega_c > 0.0) {
            return Err(Error::Config(format!("omega_c must be > 0, got {omega_c}")));
        }
        if !(mu >= 0.0) {
            return Err(Error::Config(format!("mu must be >= 0, got {mu}")));
        }
        if k < 1 {
            return Err(Error::Config("spectral exponent k must be >= 1".into()));
        }
        if coupling.nrows() != coupling.ncols() {
            return Err(Error::DimensionMismatch {
                expected: coupling.nrows(),
                got: coupling.ncols(),
            });
        }
        let sym_dev = (&coupling - coupling.transpose()).abs().max();
        if sym_dev > 1e-12 {
            return Err(Error::Config(format!(
                "coupling matrix must be symmetric (deviation {sym_dev:.3e})"
            )));
        }
        let spec = Self {
            beta,
            mu,
            k,
            omega_c,
            coupling,
        };
        spec.coupling_eigensystem()?;
        Ok(spec)
    }

    /// Identity coupling over `n_terms` interaction indices: independent
    /// identical baths.
    pub fn with_identity_coupling(beta: f64, mu: f64, k: u32, omega_c: f64, n_terms: usize) -> Result<Self> {
        Self::new(beta, mu, k, omega_c, RMatrix::identity(n_terms, n_terms))
    }

    /// The reference parameter set `(mu, k, omega_c, beta) = (1, 1, 10, 1)`.
    pub fn reference(n_terms: usize) -> Self {
        Self::with_identity_coupling(1.0, 1.0, 1, 10.0, n_terms).expect("valid reference bath")
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn coupling(&self) -> &RMatrix {
        &self.coupling
    }

    pub fn n_terms(&self) -> usize {
        self.coupling.nrows()
    }

    /// Scalar rate `gamma(omega)`: the Ohmic form for `omega > 0`, the KMS
    /// image `e^{-beta|omega|} gamma(|omega|)` for `omega < 0`, and the
    /// continuity limit 0 at `omega = 0`.
    pub fn gamma_scalar(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            0.0
        } else if omega > 0.0 {
            self.mu * omega.powi(self.k as i32) * (-omega / self.omega_c).exp()
        } else {
            (self.beta * omega).exp() * self.gamma_scalar(-omega)
        }
    }

    /// The analytic supremum of `gamma` over `omega > 0`:
    /// `mu (k omega_c)^k e^{-k}`, attained at `omega = k omega_c`.
    pub fn gamma_peak(&self) -> f64 {
        self.mu * (self.k as f64 * self.omega_c).powi(self.k as i32) * (-(self.k as f64)).exp()
    }

    /// The matrix of decay rates `gamma_ab(omega) = c_ab gamma(omega)`.
    pub fn gamma_matrix(&self, omega: f64) -> RMatrix {
        &self.coupling * self.gamma_scalar(omega)
    }

    /// Orthogonal eigenframe of the coupling matrix and its eigenvalues,
    /// negative values inside `-1e-12 x trace` clipped to zero. The frame
    /// diagonalizes `gamma_ab(omega)` at every frequency.
    pub fn coupling_eigensystem(&self) -> Result<(RMatrix, Vec<f64>)> {
        let eig = self.coupling.clone().symmetric_eigen();
        let floor = -1e-12 * self.coupling.trace().abs().max(1.0);
        let mut pairs: Vec<(f64, usize)> = eig
            .eigenvalues
            .iter()
            .cloned()
            .zip(0..)
            .map(|(v, i)| (v, i))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("eigenvalue is NaN"));
        let mut rates = Vec::with_capacity(pairs.len());
        let mut u = RMatrix::zeros(self.coupling.nrows(), self.coupling.ncols());
        for (col, (v, i)) in pairs.iter().enumerate() {
            if *v < floor {
                return Err(Error::NotPositiveSemidefinite { min_eig: *v });
            }
            rates.push(v.max(0.0));
            u.set_column(col, &eig.eigenvectors.column(*i));
        }
        Ok((u, rates))
    }

    /// Diagonalized rates at one frequency: `U^T gamma(omega) U = diag`.
    pub fn gamma_eigensystem(&self, omega: f64) -> Result<(RMatrix, Vec<f64>)> {
        let (u, eigs) = self.coupling_eigensystem()?;
        let g = self.gamma_scalar(omega);
        Ok((u, eigs.into_iter().map(|v| v * g).collect()))
    }

    /// Scalar principal-value function
    /// `S(omega) = (1/2pi) PV int gamma(w') / (omega - w') dw'`
    /// at the default tolerance.
    pub fn s_principal_value(&self, omega: f64) -> Result<f64> {
        self.s_principal_value_with_tol(omega, DEFAULT_PV_TOL)
    }

    /// As [`Self::s_principal_value`] with an explicit relative tolerance
    /// controlling the quadrature refinement.
    pub fn s_principal_value_with_tol(&self, omega: f64, tol: f64) -> Result<f64> {
        if self.mu == 0.0 {
            return Ok(0.0);
        }
        let lambda = 50.0 * self.omega_c.max(omega.abs()).max(1.0 / self.beta);
        let integral = principal_value_integral(
            |w| self.gamma_scalar(w),
            omega,
            lambda,
            tol,
            self.gamma_peak(),
        )?;
        Ok(integral / (2.0 * std::f64::consts::PI))
    }

    /// One-sided transform `Gamma(omega) = gamma(omega)/2 + i S(omega)`
    /// (scalar part; the matrix version is `c_ab` times this).
    pub fn gamma_one_sided(&self, omega: f64) -> Result<Complex64> {
        Ok(Complex64::new(
            0.5 * self.gamma_scalar(omega),
            self.s_principal_value(omega)?,
        ))
    }
}

/// `PV int_{omega - lambda}^{omega + lambda} f(w') / (omega - w') dw'` by
/// symmetric excision: the substitution `w' = omega -+ u` folds the integral
/// into `int_0^lambda [f(omega - u) - f(omega + u)] / u du`, whose integrand
/// is regular at `u = 0`. Composite Gauss-Legendre panels (graded toward 0,
/// split at the spectral kink `u = |omega|`) are refined by doubling until
/// two successive values agree to `tol` relative.
fn principal_value_integral(
    f: impl Fn(f64) -> f64,
    omega: f64,
    lambda: f64,
    tol: f64,
    magnitude_scale: f64,
) -> Result<f64> {
    let integrand = |u: f64| (f(omega - u) - f(omega + u)) / u;

    // Geometric breakpoints from well below the smallest structure scale.
    let fine = (lambda / 1e6).min(1.0 / 64.0);
    let mut breaks = vec![0.0, fine];
    let mut b = fine;
    while b < lambda {
        b = (b * 2.0).min(lambda);
        breaks.push(b);
    }
    // gamma' jumps at frequency 0, i.e. at u = |omega|.
    if omega.abs() > 0.0 && omega.abs() < lambda {
        breaks.push(omega.abs());
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
    }

    let mut previous: Option<f64> = None;
    let mut splits = 1usize;
    for _ in 0..8 {
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let width = (w[1] - w[0]) / splits as f64;
            for s in 0..splits {
                let a = w[0] + s as f64 * width;
                total += gauss_legendre_panel(&integrand, a, a + width);
            }
        }
        if let Some(prev) = previous {
            let change = (total - prev).abs();
            if change <= tol * (total.abs() + magnitude_scale) {
                return Ok(total);
            }
        }
        previous = Some(total);
        splits *= 2;
    }
    Err(Error::QuadratureNonConvergence {
        omega,
        last_change: previous.map_or(f64::NAN, |p| p),
    })
}

const GL_ORDER: usize = 16;

fn gauss_legendre_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Nodes and weights of the `GL_ORDER`-point Gauss-Legendre rule on
/// [-1, 1], computed once by Newton iteration on the Legendre recurrence.
fn gauss_legendre_rule() -> (&'static [f64; GL_ORDER], &'static [f64; GL_ORDER]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    let (n, w) = RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            // Chebyshev-based initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_and_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    });
    (n, w)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ohmic_peak_location_and_value() {
        for k in [1u32, 2, 3] {
            for omega_c in [1.0, 10.0] {
                let bath = BathSpec::with_identity_coupling(1.0, 1.0, k, omega_c, 1).unwrap();
                let peak = bath.gamma_peak();
                // Golden-section maximization over the unimodal positive axis.
                let (mut lo, mut hi) = (0.0f64, 10.0 * k as f64 * omega_c);
                let phi = (5.0f64.sqrt() - 1.0) / 2.0;
                while hi - lo > 1e-10 * omega_c {
                    let a = hi - phi * (hi - lo);
                    let b = lo + phi * (hi - lo);
                    if bath.gamma_scalar(a) < bath.gamma_scalar(b) {
                        lo = a;
                    } else {
                        hi = b;
                    }
                }
                let argmax = 0.5 * (lo + hi);
                let max = bath.gamma_scalar(argmax);
                assert!(
                    (max - peak).abs() <= 1e-12 * peak,
                    "k={k} omega_c={omega_c}: {max} vs {peak}"
                );
                assert!((argmax - k as f64 * omega_c).abs() < 1e-4 * omega_c);
            }
        }
    }

    #[test]
    fn gamma_at_zero_and_kms_value() {
        let bath = BathSpec::reference(1);
        assert_eq!(bath.gamma_scalar(0.0), 0.0);
        let want = (-2.0f64).exp() * 2.0 * (-0.2f64).exp();
        assert!((bath.gamma_scalar(-2.0) - want).abs() < 1e-15);
    }

    #[test]
    fn eigensystem_of_identity_and_rank_one_coupling() {
        let bath = BathSpec::with_identity_coupling(1.0, 1.0, 1, 10.0, 3).unwrap();
        let (u, rates) = bath.gamma_eigensystem(2.0).unwrap();
        let g = bath.gamma_scalar(2.0);
        assert!((&u * u.transpose() - RMatrix::identity(3, 3)).abs().max() < 1e-12);
        for r in rates {
            assert!((r - g).abs() < 1e-12);
        }

        let c = RMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let bath = BathSpec::new(1.0, 1.0, 1, 10.0, c).unwrap();
        let (_, rates) = bath.gamma_eigensystem(2.0).unwrap();
        assert!((rates[0] - 2.0 * g).abs() < 1e-12);
        assert!(rates[1].abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_coupling() {
        let c = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let r = BathSpec::new(1.0, 1.0, 1, 10.0, c);
        assert!(matches!(r, Err(Error::NotPositiveSemidefinite { .. })));
    }

    #[test]
    fn gamma_matrix_psd_for_random_psd_couplings() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = rng.gen_range(1..=4);
            let raw = RMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
            let c = &raw * raw.transpose();
            let bath = BathSpec::new(1.0, 1.0, 1, 10.0, c).unwrap();
            for _ in 0..20 {
                let omega = rng.gen_range(-30.0..30.0);
                let g = bath.gamma_matrix(omega);
                let eig = g.clone().symmetric_eigen();
                let floor = -1e-12 * g.trace().abs().max(1e-300);
                for v in eig.eigenvalues.iter() {
                    assert!(*v >= floor, "omega={omega}: eigenvalue {v}");
                }
            }
        }
    }

    #[test]
    fn principal_value_matches_lorentzian_hilbert_transform() {
        // PV int 1/((1+x^2)(w-x)) dx = pi w / (1+w^2): an independent
        // closed form for the excision quadrature.
        for w in [0.0, 0.5, 2.0, -3.0] {
            let got = principal_value_integral(|x| 1.0 / (1.0 + x * x), w, 2.0e4, 1e-10, 1.0)
                .unwrap();
            let want = std::f64::consts::PI * w / (1.0 + w * w);
            assert!((got - want).abs() < 1e-6, "w={w}: {got} vs {want}");
        }
    }

    #[test]
    fn principal_value_zero_bath_and_convergence() {
        let zero = BathSpec::with_identity_coupling(1.0, 0.0, 1, 10.0, 1).unwrap();
        for w in [0.0, 3.0, -7.0] {
            assert_eq!(zero.s_principal_value(w).unwrap(), 0.0);
        }

        let bath = BathSpec::reference(1);
        for w in [0.0, 10.0, 50.0] {
            let coarse = bath.s_principal_value_with_tol(w, 1e-6).unwrap();
            let fine = bath.s_principal_value_with_tol(w, 1e-12).unwrap();
            let rel = (coarse - fine).abs() / fine.abs().max(1e-30);
            assert!(rel <= 1e-6, "omega={w}: rel change {rel:.3e}");
        }
    }

    #[test]
    fn gamma_is_subexponential() {
        // gamma(omega) e^{-eps omega} -> 0 for any eps > 0.
        let bath = BathSpec::reference(1);
        for eps in [0.01, 0.1] {
            let mut last = f64::INFINITY;
            for omega in (1..=40).map(|i| 25.0 * i as f64) {
                let v = bath.gamma_scalar(omega) * (-eps * omega).exp();
                assert!(v <= last * (1.0 + 1e-12));
                last = v;
            }
            assert!(last < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn kms_condition_scalar_and_eigenvalues(omega in 1e-6..100.0f64, beta in 0.05..4.0f64) {
            let c = RMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
            let bath = BathSpec::new(beta, 1.3, 2, 7.0, c).unwrap();
            let lhs = bath.gamma_scalar(-omega);
            let rhs = (-beta * omega).exp() * bath.gamma_scalar(omega);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(f64::MIN_POSITIVE));

            let (_, plus) = bath.gamma_eigensystem(omega).unwrap();
            let (_, minus) = bath.gamma_eigensystem(-omega).unwrap();
            for (p, m) in plus.iter().zip(&minus) {
                prop_assert!((m - (-beta * omega).exp() * p).abs() <= 1e-12 * p.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
}
