//! Three-player games whose mixed strategies are the marginals of three
//! `±1` observables.
//!
//! Strategies `λ, μ, ν` and the pair and triple marginals come either from
//! independent coin flips (the classical mixed game) or from `σ_z`
//! measurements on a three-qubit state. Whether a set of marginals admits a
//! joint distribution over the eight outcomes is decided by four linear
//! inequalities ([`fine`]); payoffs are then affine in the marginals
//! ([`games`]) and equilibria are checked by endpoint deviations
//! ([`equilibrium`]).
//!
//! ```
//! use finegame::prelude::*;
//!
//! let s = ghz(real(std::f64::consts::FRAC_1_SQRT_2), real(std::f64::consts::FRAC_1_SQRT_2))?;
//! let m = extract_marginals(&density_from_pure(&s), MarginalConvention::Parity)?;
//! let pd = pd3(&PdParams::default())?;
//! let pay = payoff_marginal_form(&pd, &m);
//! assert!((pay[0] - 3.0).abs() < 1e-12);
//! assert!(!bell_slacks(&m).satisfied);
//! # Ok::<(), finegame::Error>(())
//! ```

pub mod basis;
pub mod descriptor;
pub mod equilibrium;
pub mod error;
pub mod fine;
pub mod games;
pub mod measurement;
pub mod qstates;
pub mod render;
pub mod sampling;
pub mod scenarios;
pub mod tol;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::basis::{Pair, Player, DIM};
    pub use crate::equilibrium::{
        coalition_analysis, coop_best_response_solve, factorizable_gradient, grid_ne_search,
        product_state_interior_solve, verify_ne, verify_ne_factorizable, zero_sum_2x2_value, NeCertificate,
    };
    pub use crate::fine::{
        bell_slacks, joint_exists_oracle, marginals_from_joint, reconstruct_joint, xi_interval, BellReport,
        JointDistribution, XiInterval, XiRule,
    };
    pub use crate::games::{
        coop_game, payoff_factorizable, payoff_marginal_form, payoff_outcome_form, pd3, pd_payoffs_from_pure_state,
        PayoffTable, PdParams, StrategyTriple,
    };
    pub use crate::measurement::{
        convert_marginals, extract_marginals, pure_state_marginals, weights_from_marginals, MarginalConvention,
        MarginalSet, WeightInversion,
    };
    pub use crate::qstates::{
        c, density_from_mixed, density_from_pure, ghz, pd_state, product_state, real, w_state, DensityMatrix,
        DiagonalMixedState, ProductStateAngles, PureState,
    };
    pub use crate::scenarios::{run_scenario, ScenarioReport};
    pub use crate::{Error, Result};
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/marginals.md")]
    mod marginals {}
    #[doc = include_str!("../../../book/src/fine.md")]
    mod fine {}
    #[doc = include_str!("../../../book/src/payoffs.md")]
    mod payoffs {}
    #[doc = include_str!("../../../book/src/equilibria.md")]
    mod equilibria {}
    #[doc = include_str!("../../../book/src/cooperative.md")]
    mod cooperative {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
