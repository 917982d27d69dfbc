//! Three-qubit states used by the games: arbitrary pure states, diagonal
//! mixtures, product states and the GHZ, W and PD families, together with
//! their density matrices.

use nalgebra::{Complex, SMatrix, SymmetricEigen};

use crate::basis::DIM;
use crate::error::{Error, Result};
use crate::tol;

pub type ComplexScalar = Complex<f64>;

/// Dense 8×8 complex operator on the three-qubit space.
pub type Operator = SMatrix<ComplexScalar, DIM, DIM>;

pub fn c(re: f64, im: f64) -> ComplexScalar {
    Complex::new(re, im)
}

pub fn real(re: f64) -> ComplexScalar {
    Complex::new(re, 0.0)
}

fn check_finite(field: &'static str, z: ComplexScalar) -> Result<()> {
    for v in [z.re, z.im] {
        if !v.is_finite() {
            return Err(Error::NonFinite { field, value: v });
        }
    }
    Ok(())
}

fn check_normalized(total: f64) -> Result<()> {
    if (total - 1.0).abs() > tol::EXACT {
        return Err(Error::Normalization { total });
    }
    Ok(())
}

/// A normalized pure state `Σ cᵢ |i⟩` over `|000⟩ … |111⟩`.
///
/// `amplitudes[i]` is the coefficient the literature calls `c_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amplitudes: [ComplexScalar; DIM],
}

impl PureState {
    /// Validates finiteness and `Σ|cᵢ|² = 1`. Inputs are never renormalized.
    pub fn new(amplitudes: [ComplexScalar; DIM]) -> Result<Self> {
        for z in &amplitudes {
            check_finite("amplitude", *z)?;
        }
        check_normalized(amplitudes.iter().map(|z| z.norm_sqr()).sum())?;
        Ok(PureState { amplitudes })
    }

    /// The basis state `|index⟩`.
    pub fn basis(index: usize) -> Self {
        let mut amplitudes = [real(0.0); DIM];
        amplitudes[index] = real(1.0);
        PureState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[ComplexScalar; DIM] {
        &self.amplitudes
    }

    /// `|cᵢ|²` for every basis state.
    pub fn probabilities(&self) -> [f64; DIM] {
        self.amplitudes.map(|z| z.norm_sqr())
    }
}

/// `ρ = Σ pᵢ |i⟩⟨i|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalMixedState {
    weights: [f64; DIM],
}

impl DiagonalMixedState {
    pub fn new(weights: [f64; DIM]) -> Result<Self> {
        for &p in &weights {
            if !p.is_finite() {
                return Err(Error::NonFinite {
                    field: "weight",
                    value: p,
                });
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::range("weight", p, "mixture weights lie in [0, 1]"));
            }
        }
        check_normalized(weights.iter().sum())?;
        Ok(DiagonalMixedState { weights })
    }

    pub fn weights(&self) -> &[f64; DIM] {
        &self.weights
    }
}

/// Bloch angles of three single-qubit states
/// `e^{iδ}(cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductStateAngles {
    pub theta: [f64; 3],
    pub phi: [f64; 3],
    pub delta: [f64; 3],
}

impl ProductStateAngles {
    pub fn new(theta: [f64; 3], phi: [f64; 3], delta: [f64; 3]) -> Result<Self> {
        use std::f64::consts::{PI, TAU};
        for &t in &theta {
            if !(0.0..=PI).contains(&t) {
                return Err(Error::range("theta", t, "θ lies in [0, π]"));
            }
        }
        for (field, values) in [("phi", &phi), ("delta", &delta)] {
            for &v in values {
                if !(0.0..TAU).contains(&v) {
                    return Err(Error::range(field, v, "phases lie in [0, 2π)"));
                }
            }
        }
        Ok(ProductStateAngles { theta, phi, delta })
    }

    /// Angles with `cos²(θₖ/2)` equal to the requested probability of `+1`
    /// and zero phases.
    pub fn from_plus_probabilities(p: [f64; 3]) -> Result<Self> {
        let mut theta = [0.0; 3];
        for (t, &pk) in theta.iter_mut().zip(&p) {
            if !(0.0..=1.0).contains(&pk) {
                return Err(Error::range("probability", pk, "probabilities lie in [0, 1]"));
            }
            *t = 2.0 * pk.sqrt().acos();
        }
        Self::new(theta, [0.0; 3], [0.0; 3])
    }
}

/// Density matrix of a three-qubit state: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Operator,
}

impl DensityMatrix {
    pub fn new(entries: Operator) -> Result<Self> {
        for z in entries.iter() {
            check_finite("density entry", *z)?;
        }
        let herm_err = (entries - entries.adjoint()).camax();
        if herm_err > tol::EXACT {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (max deviation {herm_err:e})"
            )));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > tol::EXACT || tr.im.abs() > tol::EXACT {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let min_eig = hermitian_eigenvalues(&entries)[0];
        if min_eig < -tol::PSD {
            return Err(Error::InvalidDensity(format!(
                "not positive semi-definite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(DensityMatrix { entries })
    }

    pub fn entries(&self) -> &Operator {
        &self.entries
    }

    pub fn trace(&self) -> ComplexScalar {
        self.entries.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; DIM] {
        hermitian_eigenvalues(&self.entries)
    }

    /// `Tr(op · ρ)` without forming the product.
    pub fn expectation(&self, op: &Operator) -> ComplexScalar {
        let mut acc = real(0.0);
        for i in 0..DIM {
            for j in 0..DIM {
                acc += op[(i, j)] * self.entries[(j, i)];
            }
        }
        acc
    }
}

/// Eigenvalues of a Hermitian operator, ascending. The input is symmetrized
/// first so that round-off in the lower triangle cannot matter.
pub fn hermitian_eigenvalues(m: &Operator) -> [f64; DIM] {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut values = [0.0; DIM];
    for (v, e) in values.iter_mut().zip(eig.eigenvalues.iter()) {
        *v = *e;
    }
    values.sort_by(f64::total_cmp);
    values
}

/// `|Ψ⟩⟨Ψ|`.
pub fn density_from_pure(state: &PureState) -> DensityMatrix {
    let v = state.amplitudes;
    let entries = Operator::from_fn(|i, j| v[i] * v[j].conj());
    DensityMatrix { entries }
}

pub fn density_from_mixed(state: &DiagonalMixedState) -> DensityMatrix {
    let mut entries = Operator::zeros();
    for (i, &p) in state.weights.iter().enumerate() {
        entries[(i, i)] = real(p);
    }
    DensityMatrix { entries }
}

/// Tensor product of three single-qubit states, global phases included.
pub fn product_state(angles: &ProductStateAngles) -> PureState {
    let single: [[ComplexScalar; 2]; 3] = std::array::from_fn(|k| {
        let (s, co) = (angles.theta[k] / 2.0).sin_cos();
        [real(co), ComplexScalar::from_polar(s, angles.phi[k])]
    });
    let global = ComplexScalar::from_polar(1.0, angles.delta.iter().sum());
    let amplitudes = std::array::from_fn(|i| {
        let (a, b, cbit) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
        global * single[0][a] * single[1][b] * single[2][cbit]
    });
    PureState { amplitudes }
}

fn supported_state(support: &[(usize, ComplexScalar)]) -> Result<PureState> {
    let mut amplitudes = [real(0.0); DIM];
    for &(i, z) in support {
        amplitudes[i] = z;
    }
    PureState::new(amplitudes)
}

/// `a|000⟩ + b|111⟩`.
pub fn ghz(a: ComplexScalar, b: ComplexScalar) -> Result<PureState> {
    supported_state(&[(0, a), (7, b)])
}

/// `c₂|001⟩ + c₃|010⟩ + c₅|100⟩`.
pub fn w_state(c2: ComplexScalar, c3: ComplexScalar, c5: ComplexScalar) -> Result<PureState> {
    supported_state(&[(1, c2), (2, c3), (4, c5)])
}

/// `c₄|011⟩ + c₆|101⟩ + c₇|110⟩`.
pub fn pd_state(c4: ComplexScalar, c6: ComplexScalar, c7: ComplexScalar) -> Result<PureState> {
    supported_state(&[(3, c4), (5, c6), (6, c7)])
}
