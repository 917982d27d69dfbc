//! Three-player payoff tables and the three ways of evaluating them.
//!
//! A table has one row per sign outcome (basis index order) and one column
//! per player. Payoffs can be taken
//!
//! * against a joint distribution over outcomes ([`payoff_outcome_form`]),
//! * as an affine function of the seven marginals ([`payoff_marginal_form`]),
//!   obtained by substituting the outcome probabilities written in terms of
//!   `ξ` and the other six marginals,
//! * or against independent mixed strategies ([`payoff_factorizable`]).

use serde::{Deserialize, Serialize};

use crate::basis::{is_plus, Player, DIM};
use crate::error::{Error, Result};
use crate::fine::JointDistribution;
use crate::measurement::{marginals_from_weights, MarginalConvention, MarginalSet};
use crate::qstates::PureState;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; DIM]", into = "[[f64; 3]; DIM]")]
pub struct PayoffTable {
    rows: [[f64; 3]; DIM],
}

impl TryFrom<[[f64; 3]; DIM]> for PayoffTable {
    type Error = Error;

    fn try_from(rows: [[f64; 3]; DIM]) -> Result<Self> {
        PayoffTable::new(rows)
    }
}

impl From<PayoffTable> for [[f64; 3]; DIM] {
    fn from(t: PayoffTable) -> Self {
        t.rows
    }
}

impl PayoffTable {
    pub fn new(rows: [[f64; 3]; DIM]) -> Result<Self> {
        for v in rows.iter().flatten() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    field: "rows",
                    value: *v,
                });
            }
        }
        Ok(PayoffTable { rows })
    }

    pub fn rows(&self) -> &[[f64; 3]; DIM] {
        &self.rows
    }

    pub fn column(&self, player: Player) -> [f64; DIM] {
        self.rows.map(|r| r[player.index()])
    }

    /// Every row sums to zero across the players.
    pub fn is_zero_sum(&self) -> bool {
        self.rows.iter().all(|r| r.iter().sum::<f64>().abs() <= tol::EXACT)
    }

    /// Invariant under relabelling the players: permuting the roles in an
    /// outcome permutes the payoffs the same way.
    pub fn is_symmetric(&self) -> bool {
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        PERMS.iter().all(|perm| {
            (0..DIM).all(|x| {
                let bits: [bool; 3] = Player::ALL.map(|p| is_plus(x, p));
                let y = crate::basis::index_of(bits[perm[0]], bits[perm[1]], bits[perm[2]]);
                (0..3).all(|k| (self.rows[y][k] - self.rows[x][perm[k]]).abs() <= tol::EXACT)
            })
        })
    }
}

/// Payoff values of the three-player dilemma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdParams {
    pub varkappa: f64,
    pub vartheta: f64,
    pub kappa: f64,
    pub tau: f64,
    pub omega: f64,
    pub theta: f64,
}

impl Default for PdParams {
    fn default() -> Self {
        PdParams::from_array([7.0, 9.0, 3.0, 0.0, 1.0, 5.0])
    }
}

impl PdParams {
    /// `[ϰ, ϑ, κ, τ, ω, θ]`.
    pub fn from_array(v: [f64; 6]) -> Self {
        PdParams {
            varkappa: v[0],
            vartheta: v[1],
            kappa: v[2],
            tau: v[3],
            omega: v[4],
            theta: v[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.varkappa,
            self.vartheta,
            self.kappa,
            self.tau,
            self.omega,
            self.theta,
        ]
    }

    /// The dilemma conditions, checked in order; the first failure is named.
    pub fn validate(&self) -> Result<()> {
        let PdParams {
            varkappa: k1,
            vartheta: t1,
            kappa: k,
            tau,
            omega: w,
            theta: th,
        } = *self;
        for (name, v) in ["varkappa", "vartheta", "kappa", "tau", "omega", "theta"]
            .iter()
            .zip(self.to_array())
        {
            if !v.is_finite() {
                return Err(Error::NonFinite { field: name, value: v });
            }
        }
        let checks: [(&str, bool); 11] = [
            ("(a) ϑ > ϰ", t1 > k1),
            ("(a) ω > τ", w > tau),
            ("(a) θ > κ", th > k),
            ("(b) ϑ > θ", t1 > th),
            ("(b) θ > ω", th > w),
            ("(b) ϰ > κ", k1 > k),
            ("(b) κ > τ", k > tau),
            ("(c) κ > ω", k > w),
            ("(c) ϰ > θ", k1 > th),
            ("(c) κ > (τ + θ)/2", k > (tau + th) / 2.0),
            ("(c) ϰ > (κ + ϑ)/2", k1 > (k + t1) / 2.0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(Error::DilemmaViolation(format!(
                "{name} fails for {:?}",
                self.to_array()
            ))),
            None => Ok(()),
        }
    }
}

/// Mixed strategies: each player's probability of playing `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct StrategyTriple {
    pub(crate) s: [f64; 3],
}

impl TryFrom<[f64; 3]> for StrategyTriple {
    type Error = Error;

    fn try_from(s: [f64; 3]) -> Result<Self> {
        StrategyTriple::new(s[0], s[1], s[2])
    }
}

impl From<StrategyTriple> for [f64; 3] {
    fn from(t: StrategyTriple) -> Self {
        t.s
    }
}

impl StrategyTriple {
    pub fn new(lambda: f64, mu: f64, nu: f64) -> Result<Self> {
        let s = [lambda, mu, nu];
        for (v, name) in s.iter().zip(["lambda", "mu", "nu"]) {
            if !v.is_finite() {
                return Err(Error::NonFinite { field: name, value: *v });
            }
            if !(0.0..=1.0).contains(v) {
                return Err(Error::range(name, *v, "strategies are probabilities"));
            }
        }
        Ok(StrategyTriple { s })
    }

    pub fn lambda(&self) -> f64 {
        self.s[0]
    }
    pub fn mu(&self) -> f64 {
        self.s[1]
    }
    pub fn nu(&self) -> f64 {
        self.s[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.s
    }

    pub fn get(&self, player: Player) -> f64 {
        self.s[player.index()]
    }

    /// The same triple with one player's strategy replaced.
    pub fn with(&self, player: Player, value: f64) -> Self {
        let mut s = self.s;
        s[player.index()] = value;
        StrategyTriple { s }
    }
}

/// Rows `(ϰ,ϰ,ϰ) (κ,κ,ϑ) (κ,ϑ,κ) (τ,θ,θ) (ϑ,κ,κ) (θ,τ,θ) (θ,θ,τ) (ω,ω,ω)`.
pub fn pd3(params: &PdParams) -> Result<PayoffTable> {
    params.validate()?;
    let PdParams {
        varkappa: k1,
        vartheta: t1,
        kappa: k,
        tau,
        omega: w,
        theta: th,
    } = *params;
    PayoffTable::new([
        [k1, k1, k1],
        [k, k, t1],
        [k, t1, k],
        [tau, th, th],
        [t1, k, k],
        [th, tau, th],
        [th, th, tau],
        [w, w, w],
    ])
}

/// Odd-man-out game: when two players match and the third differs, the
/// odd player pays one unit to each of the others.
pub fn coop_game() -> PayoffTable {
    PayoffTable {
        rows: [
            [0.0, 0.0, 0.0],
            [1.0, 1.0, -2.0],
            [1.0, -2.0, 1.0],
            [-2.0, 1.0, 1.0],
            [-2.0, 1.0, 1.0],
            [1.0, -2.0, 1.0],
            [1.0, 1.0, -2.0],
            [0.0, 0.0, 0.0],
        ],
    }
}

/// Coefficients of one player's payoff as an affine function of the
/// marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalCoefficients {
    pub xi: f64,
    pub p_ab: f64,
    pub p_bc: f64,
    pub p_ac: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub constant: f64,
}

impl MarginalCoefficients {
    /// Evaluates on `[λ, μ, ν, P(ab), P(bc), P(ac), ξ]`.
    pub fn eval(&self, v: &[f64; 7]) -> f64 {
        self.lambda * v[0]
            + self.mu * v[1]
            + self.nu * v[2]
            + self.p_ab * v[3]
            + self.p_bc * v[4]
            + self.p_ac * v[5]
            + self.xi * v[6]
            + self.constant
    }
}

pub fn marginal_coefficients(table: &PayoffTable) -> [MarginalCoefficients; 3] {
    Player::ALL.map(|p| {
        let [alpha, beta, gamma, delta, eps, eps2, zeta, eta] = table.column(p);
        MarginalCoefficients {
            xi: alpha - beta - gamma + delta - eps + eps2 + zeta - eta,
            p_ab: beta - delta - eps2 + eta,
            p_bc: eps - eps2 - zeta + eta,
            p_ac: gamma - delta - zeta + eta,
            lambda: delta - eta,
            mu: eps2 - eta,
            nu: zeta - eta,
            constant: eta,
        }
    })
}

pub fn payoff_outcome_form(table: &PayoffTable, j: &JointDistribution) -> [f64; 3] {
    Player::ALL.map(|p| table.column(p).iter().zip(j.prob()).map(|(a, b)| a * b).sum())
}

/// Evaluates the marginal form on the seven values as given, whatever
/// their convention.
pub fn payoff_marginal_form(table: &PayoffTable, m: &MarginalSet) -> [f64; 3] {
    payoff_marginal_values(table, &m.values())
}

/// [`payoff_marginal_form`] on raw values, which need not be probabilities.
pub fn payoff_marginal_values(table: &PayoffTable, v: &[f64; 7]) -> [f64; 3] {
    marginal_coefficients(table).map(|c| c.eval(v))
}

/// Probability of outcome `index` when the players randomize independently.
pub fn product_weight(s: &[f64; 3], index: usize) -> f64 {
    Player::ALL
        .iter()
        .map(|&p| {
            let q = s[p.index()];
            if is_plus(index, p) {
                q
            } else {
                1.0 - q
            }
        })
        .product()
}

pub fn payoff_factorizable(table: &PayoffTable, s: &StrategyTriple) -> [f64; 3] {
    factorizable_values(table, &s.s)
}

/// [`payoff_factorizable`] at any point of `R³`, using the multilinear
/// extension.
pub fn factorizable_values(table: &PayoffTable, s: &[f64; 3]) -> [f64; 3] {
    let w: [f64; DIM] = std::array::from_fn(|i| product_weight(s, i));
    Player::ALL.map(|p| table.column(p).iter().zip(&w).map(|(a, b)| a * b).sum())
}

/// Payoffs of the default dilemma for a pure state, as sums over `|cᵢ|²`
/// with `cᵢ` numbered `1..=8`.
///
/// Equal to the marginal form on the state's parity marginals, which is not
/// the expected table payoff over measured outcomes.
pub fn pd_payoffs_from_pure_state(state: &PureState) -> [f64; 3] {
    let p = state.probabilities();
    let w = |i: usize| p[i - 1];
    [
        2.0 * (3.0 * w(1) + w(2) + w(3) + 4.0 * w(5) + 2.0 * w(6) + 2.0 * w(7) - w(8)) + 1.0,
        2.0 * (3.0 * w(1) + w(2) + 4.0 * w(3) + 2.0 * w(4) + w(5) + 2.0 * w(7) - w(8)) + 1.0,
        2.0 * (3.0 * w(1) + 4.0 * w(2) + w(3) + 2.0 * w(4) + w(5) + 2.0 * w(6) - w(8)) + 1.0,
    ]
}

/// Pure-state families whose squared amplitudes are fixed by the singles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    /// Support `|001⟩, |010⟩, |100⟩`; singles sum to 2.
    W,
    /// Support `|011⟩, |101⟩, |110⟩`; singles sum to 1.
    PdState,
}

impl StateFamily {
    pub fn singles_sum(self) -> f64 {
        match self {
            StateFamily::W => 2.0,
            StateFamily::PdState => 1.0,
        }
    }

    /// Basis weights of the family member with singles `s`. Linear in `s`;
    /// a genuine state only when the weights are non-negative and `s` sums
    /// to [`StateFamily::singles_sum`].
    pub fn weights(self, s: &[f64; 3]) -> [f64; DIM] {
        let [l, m, n] = *s;
        let mut w = [0.0; DIM];
        match self {
            StateFamily::W => {
                w[1] = (l + m - n) / 2.0;
                w[2] = (l + n - m) / 2.0;
                w[4] = (m + n - l) / 2.0;
            }
            StateFamily::PdState => {
                w[3] = l;
                w[5] = m;
                w[6] = n;
            }
        }
        w
    }
}

/// Payoffs restricted to a state family, as affine functions of the singles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffinePayoff {
    pub constant: [f64; 3],
    /// `coeff[player][k]` multiplies the `k`-th single.
    pub coeff: [[f64; 3]; 3],
}

impl AffinePayoff {
    pub fn eval(&self, s: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|p| self.constant[p] + (0..3).map(|k| self.coeff[p][k] * s[k]).sum::<f64>())
    }

    /// Each player's derivative with respect to its own single.
    pub fn own_partials(&self) -> [f64; 3] {
        std::array::from_fn(|p| self.coeff[p][p])
    }
}

/// Substitutes the family's parity marginals, as functions of the singles,
/// into the marginal form.
pub fn family_payoff_reduction(table: &PayoffTable, family: StateFamily) -> AffinePayoff {
    let at = |s: [f64; 3]| {
        let v = marginals_from_weights(&family.weights(&s), MarginalConvention::Parity);
        payoff_marginal_values(table, &v)
    };
    let constant = at([0.0, 0.0, 0.0]);
    let unit = [at([1.0, 0.0, 0.0]), at([0.0, 1.0, 0.0]), at([0.0, 0.0, 1.0])];
    let coeff = std::array::from_fn(|p| std::array::from_fn(|k| unit[k][p] - constant[p]));
    AffinePayoff { constant, coeff }
}
