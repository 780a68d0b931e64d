//! Pauli maps in eigenvalue and probability coordinates.
//!
//! The eigenvalue triple is the canonical representation. A map acts on the
//! Pauli basis as `Λ[σ0] = σ0` and `Λ[σα] = λα σα`; the probability vector
//! `(p0, p1, p2, p3)` holds the Kraus weights of `ρ ↦ Σ pα σα ρ σα` and is
//! also the spectrum of the Choi matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ pα = 1`.
pub const TRACE_TOLERANCE: f64 = 1e-12;

/// Slack allowed on `|r| ≤ 1` when building a state from a density matrix.
pub const BLOCH_TOLERANCE: f64 = 1e-12;

/// Eigenvalues `(λ1, λ2, λ3)` of a trace-preserving Pauli map. `λ0 = 1` is implicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueTriple {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl EigenvalueTriple {
    /// Any finite triple is accepted; points outside the PT cube classify as not positive.
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        if !(l1.is_finite() && l2.is_finite() && l3.is_finite()) {
            return Err(Error::NonFinite("eigenvalue triple"));
        }
        Ok(Self { l1, l2, l3 })
    }

    pub fn from_array(l: [f64; 3]) -> Result<Self> {
        Self::new(l[0], l[1], l[2])
    }

    /// Construction without the finiteness check, for hot sampling loops whose
    /// inputs are finite by construction.
    #[inline]
    pub(crate) fn from_array_unchecked(l: [f64; 3]) -> Self {
        Self {
            l1: l[0],
            l2: l[1],
            l3: l[2],
        }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.l1, self.l2, self.l3]
    }

    #[inline]
    pub fn product(self) -> f64 {
        self.l1 * self.l2 * self.l3
    }

    pub const IDENTITY: Self = Self {
        l1: 1.0,
        l2: 1.0,
        l3: 1.0,
    };
}

/// Kraus weights `(p0, p1, p2, p3)`; negative entries are allowed for
/// positive maps that are not completely positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    pub p: [f64; 4],
}

impl ProbabilityVector {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("probability vector"));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::NotTracePreserving(sum));
        }
        Ok(Self { p })
    }

    pub fn min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[inline]
pub(crate) fn lambda_from_weights(p: [f64; 4]) -> [f64; 3] {
    [
        p[0] + p[1] - p[2] - p[3],
        p[0] - p[1] + p[2] - p[3],
        p[0] - p[1] - p[2] + p[3],
    ]
}

#[inline]
pub(crate) fn weights_from_lambda(l: [f64; 3]) -> [f64; 4] {
    let [a, b, c] = l;
    [
        (1.0 + a + b + c) / 4.0,
        (1.0 + a - b - c) / 4.0,
        (1.0 - a + b - c) / 4.0,
        (1.0 - a - b + c) / 4.0,
    ]
}

/// `λα = p0 + pα − pβ − pγ`, i.e. `p0 + 2pα − Σβ pβ`.
pub fn p_to_lambda(p: &ProbabilityVector) -> EigenvalueTriple {
    EigenvalueTriple::from_array_unchecked(lambda_from_weights(p.p))
}

/// Closed-form inverse of [`p_to_lambda`].
pub fn lambda_to_p(l: EigenvalueTriple) -> ProbabilityVector {
    ProbabilityVector {
        p: weights_from_lambda(l.to_array()),
    }
}

/// Choi–Jamiołkowski state `¼ Σ |i⟩⟨j| ⊗ Λ[|i⟩⟨j|]` of a Pauli map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiMatrix {
    pub entries: [[Complex64; 4]; 4],
}

impl ChoiMatrix {
    pub fn zero() -> Self {
        Self {
            entries: [[Complex64::new(0.0, 0.0); 4]; 4],
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| (self.entries[i][j] - self.entries[j][i].conj()).norm() <= tol))
    }

    /// Spectrum from the two 2×2 blocks on the index pairs {0,3} and {1,2},
    /// each of the form `[[a, c], [c, a]]` with eigenvalues `a ± c`. Returned
    /// in the order `(p0, p1, p2, p3)`.
    ///
    /// Only meaningful for matrices with the Pauli-map zero pattern.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let outer_diag = self.entries[0][0].re;
        let outer_off = self.entries[0][3].re;
        let inner_diag = self.entries[1][1].re;
        let inner_off = self.entries[1][2].re;
        [
            outer_diag + outer_off,
            inner_diag + inner_off,
            inner_diag - inner_off,
            outer_diag - outer_off,
        ]
    }

    /// True when every entry off the diagonal and anti-diagonal is exactly zero.
    pub fn has_pauli_pattern(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || i + j == 3 || self.entries[i][j] == Complex64::new(0.0, 0.0)))
    }
}

pub fn choi_matrix(l: EigenvalueTriple) -> ChoiMatrix {
    let c = |x: f64| Complex64::new(x / 4.0, 0.0);
    let mut m = ChoiMatrix::zero();
    m.entries[0][0] = c(1.0 + l.l3);
    m.entries[3][3] = c(1.0 + l.l3);
    m.entries[1][1] = c(1.0 - l.l3);
    m.entries[2][2] = c(1.0 - l.l3);
    m.entries[0][3] = c(l.l1 + l.l2);
    m.entries[3][0] = c(l.l1 + l.l2);
    m.entries[1][2] = c(l.l1 - l.l2);
    m.entries[2][1] = c(l.l1 - l.l2);
    m
}

/// Qubit state `ρ = (I + r·σ)/2` in Bloch coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub bloch: [f64; 3],
}

pub type Matrix2 = [[Complex64; 2]; 2];

impl QubitState {
    /// Raw construction; no physicality check.
    pub fn from_bloch(bloch: [f64; 3]) -> Self {
        Self { bloch }
    }

    pub fn maximally_mixed() -> Self {
        Self { bloch: [0.0; 3] }
    }

    /// Requires a Hermitian, unit-trace matrix whose Bloch vector has norm at most `1 + 1e-12`.
    pub fn from_density_matrix(rho: &Matrix2) -> Result<Self> {
        let tol = BLOCH_TOLERANCE;
        if (rho[0][1] - rho[1][0].conj()).norm() > tol || rho[0][0].im.abs() > tol || rho[1][1].im.abs() > tol {
            return Err(Error::InvalidDensityMatrix("not Hermitian"));
        }
        if ((rho[0][0] + rho[1][1]).re - 1.0).abs() > tol {
            return Err(Error::InvalidDensityMatrix("trace is not 1"));
        }
        let [_, r1, r2, r3] = pauli_components(rho);
        let bloch = [r1.re, r2.re, r3.re];
        let norm = bloch.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1.0 + tol {
            return Err(Error::UnphysicalState(norm));
        }
        Ok(Self { bloch })
    }

    pub fn density_matrix(&self) -> Matrix2 {
        let [x, y, z] = self.bloch;
        let h = |re: f64, im: f64| Complex64::new(re / 2.0, im / 2.0);
        [[h(1.0 + z, 0.0), h(x, -y)], [h(x, y), h(1.0 - z, 0.0)]]
    }

    pub fn purity(&self) -> f64 {
        (1.0 + self.bloch.iter().map(|x| x * x).sum::<f64>()) / 2.0
    }
}

/// Coefficients `xα = Tr(σα X)` so that `X = ½ Σ xα σα`.
fn pauli_components(x: &Matrix2) -> [Complex64; 4] {
    let i = Complex64::new(0.0, 1.0);
    [
        x[0][0] + x[1][1],
        x[0][1] + x[1][0],
        i * (x[0][1] - x[1][0]),
        x[0][0] - x[1][1],
    ]
}

fn from_pauli_components(c: [Complex64; 4]) -> Matrix2 {
    let i = Complex64::new(0.0, 1.0);
    let half = 0.5;
    [
        [(c[0] + c[3]) * half, (c[1] - i * c[2]) * half],
        [(c[1] + i * c[2]) * half, (c[0] - c[3]) * half],
    ]
}

/// Action on a state: `rα ↦ λα rα`.
pub fn apply_map(l: EigenvalueTriple, s: QubitState) -> QubitState {
    let [r1, r2, r3] = s.bloch;
    QubitState {
        bloch: [l.l1 * r1, l.l2 * r2, l.l3 * r3],
    }
}

/// Linear extension of the map to arbitrary 2×2 operators (e.g. `|0⟩⟨1|`).
pub fn apply_to_operator(l: EigenvalueTriple, x: &Matrix2) -> Matrix2 {
    let [c0, c1, c2, c3] = pauli_components(x);
    from_pauli_components([c0, c1 * l.l1, c2 * l.l2, c3 * l.l3])
}
