//! JSON descriptors for states and games, as read by the command-line tool.
//!
//! Complex numbers are written `[re, im]`; a bare number is read as real.

use serde::{Deserialize, Serialize};

use crate::basis::DIM;
use crate::error::{Error, Result};
use crate::games::{coop_game, pd3, PayoffTable, PdParams};
use crate::qstates::{
    c, density_from_mixed, density_from_pure, ghz, pd_state, product_state, w_state, ComplexScalar, DensityMatrix,
    DiagonalMixedState, Operator, ProductStateAngles, PureState,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRepr {
    Pair([f64; 2]),
    Real(f64),
}

impl From<ComplexRepr> for ComplexScalar {
    fn from(r: ComplexRepr) -> Self {
        match r {
            ComplexRepr::Pair([re, im]) => c(re, im),
            ComplexRepr::Real(re) => c(re, 0.0),
        }
    }
}

impl From<ComplexScalar> for ComplexRepr {
    fn from(z: ComplexScalar) -> Self {
        ComplexRepr::Pair([z.re, z.im])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateDescriptor {
    /// Eight amplitudes over `|000⟩ … |111⟩`.
    Pure { amplitudes: [ComplexRepr; DIM] },
    /// `a|000⟩ + b|111⟩`.
    Ghz { a: ComplexRepr, b: ComplexRepr },
    /// Amplitudes of `|001⟩, |010⟩, |100⟩`.
    W { c: [ComplexRepr; 3] },
    /// Amplitudes of `|011⟩, |101⟩, |110⟩`.
    PdState { c: [ComplexRepr; 3] },
    Product {
        theta: [f64; 3],
        phi: [f64; 3],
        delta: [f64; 3],
    },
    /// Diagonal mixture of basis states.
    Mixed { weights: [f64; DIM] },
    /// Full density matrix, row by row.
    Density { entries: Vec<Vec<ComplexRepr>> },
}

impl StateDescriptor {
    pub fn pure_state(&self) -> Result<Option<PureState>> {
        let z = |r: &ComplexRepr| ComplexScalar::from(*r);
        Ok(Some(match self {
            StateDescriptor::Pure { amplitudes } => PureState::new(amplitudes.map(|r| r.into()))?,
            StateDescriptor::Ghz { a, b } => ghz(z(a), z(b))?,
            StateDescriptor::W { c } => w_state(z(&c[0]), z(&c[1]), z(&c[2]))?,
            StateDescriptor::PdState { c } => pd_state(z(&c[0]), z(&c[1]), z(&c[2]))?,
            StateDescriptor::Product { theta, phi, delta } => {
                product_state(&ProductStateAngles::new(*theta, *phi, *delta)?)
            }
            StateDescriptor::Mixed { .. } | StateDescriptor::Density { .. } => return Ok(None),
        }))
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        if let Some(s) = self.pure_state()? {
            return Ok(density_from_pure(&s));
        }
        match self {
            StateDescriptor::Mixed { weights } => Ok(density_from_mixed(&DiagonalMixedState::new(*weights)?)),
            StateDescriptor::Density { entries } => {
                if entries.len() != DIM || entries.iter().any(|r| r.len() != DIM) {
                    return Err(Error::InvalidDensity(format!("expected {DIM}×{DIM} entries")));
                }
                DensityMatrix::new(Operator::from_fn(|i, j| entries[i][j].into()))
            }
            _ => unreachable!("pure descriptors handled above"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameDescriptor {
    /// `[ϰ, ϑ, κ, τ, ω, θ]`; defaults to `[7, 9, 3, 0, 1, 5]`.
    Pd3 {
        #[serde(default)]
        params: Option<[f64; 6]>,
    },
    Coop,
    Custom {
        rows: [[f64; 3]; DIM],
    },
}

impl GameDescriptor {
    pub fn table(&self) -> Result<PayoffTable> {
        match self {
            GameDescriptor::Pd3 { params } => pd3(&params.map(PdParams::from_array).unwrap_or_default()),
            GameDescriptor::Coop => Ok(coop_game()),
            GameDescriptor::Custom { rows } => PayoffTable::new(*rows),
        }
    }
}
