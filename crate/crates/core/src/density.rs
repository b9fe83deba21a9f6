//! Explicit density matrices, used only for security checks (key averaging,
//! adversary information gain).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::StateError;
use crate::state::{StateVector, TOLERANCE};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    /// Row-major `dim × dim`.
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Checks the Hermitian and unit-trace invariants within [`TOLERANCE`].
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self, StateError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(StateError::BadLength(entries.len()));
        }
        let rho = DensityMatrix { dim, entries };
        let trace = rho.trace();
        if libm::fabs(trace.re - 1.0) > TOLERANCE || libm::fabs(trace.im) > TOLERANCE {
            return Err(StateError::NotNormalized(trace.re));
        }
        if !rho.is_hermitian() {
            return Err(StateError::NotHermitian);
        }
        Ok(rho)
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        DensityMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| {
                let d = self.entry(r, c) - self.entry(c, r).conj();
                libm::sqrt(d.norm_sqr()) <= TOLERANCE
            })
        })
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_deviation(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries.iter().zip(&other.entries).map(|(a, b)| libm::sqrt((a - b).norm_sqr())).fold(0.0, f64::max)
    }

    /// `½‖ρ − σ‖₁`.
    ///
    /// The Hermitian difference `A + iB` is embedded as the real symmetric
    /// matrix `[[A, −B], [B, A]]`, whose spectrum is that of `A + iB` with
    /// every eigenvalue doubled; cyclic Jacobi rotations then diagonalize it.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let m = 2 * n;
        let mut a = vec![0.0f64; m * m];
        for r in 0..n {
            for c in 0..n {
                let d = self.entry(r, c) - other.entry(r, c);
                a[r * m + c] = d.re;
                a[(r + n) * m + (c + n)] = d.re;
                a[r * m + (c + n)] = -d.im;
                a[(r + n) * m + c] = d.im;
            }
        }
        jacobi_eigenvalues(&mut a, m).iter().map(|l| libm::fabs(*l)).sum::<f64>() / 4.0
    }
}

/// Eigenvalues of a real symmetric `m × m` matrix (destroys `a`).
fn jacobi_eigenvalues(a: &mut [f64], m: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|p| (0..m).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * m + q] * a[p * m + q])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if libm::fabs(apq) < 1e-300 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i * m + i]).collect()
}

/// `Σ wᵢ |sᵢ⟩⟨sᵢ|` for a classical mixture of pure states.
pub fn average_density(states: &[(f64, StateVector)]) -> Result<DensityMatrix, StateError> {
    let first = states.first().ok_or(StateError::EmptyMixture)?;
    let n = first.1.num_qubits();
    let mut total = 0.0;
    for (w, s) in states {
        if *w < 0.0 || w.is_nan() {
            return Err(StateError::WeightSum(*w));
        }
        if s.num_qubits() != n {
            return Err(StateError::DimensionMismatch { expected: n, found: s.num_qubits() });
        }
        total += w;
    }
    if libm::fabs(total - 1.0) > TOLERANCE {
        return Err(StateError::WeightSum(total));
    }
    let dim = 1usize << n;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (w, s) in states {
        let amps = s.amplitudes();
        for r in 0..dim {
            if amps[r].norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..dim {
                entries[r * dim + c] += amps[r] * amps[c].conj() * *w;
            }
        }
    }
    DensityMatrix::from_entries(dim, entries)
}
