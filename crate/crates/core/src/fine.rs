//! Joint distributions for three `±1` observables from their marginals.
//!
//! A conjunction marginal set extends to a distribution over the eight sign
//! outcomes exactly when some `ξ` makes every outcome probability
//!
//! ```text
//! P(+++) = ξ                       P(-++) = P(bc) − ξ
//! P(++-) = P(ab) − ξ               P(-+-) = μ − P(ab) − P(bc) + ξ
//! P(+-+) = P(ac) − ξ               P(--+) = ν − P(ac) − P(bc) + ξ
//! P(+--) = λ − P(ab) − P(ac) + ξ   P(---) = 1 − λ − μ − ν + P(ab) + P(ac) + P(bc) − ξ
//! ```
//!
//! non-negative. Eliminating `ξ` leaves four inequalities, reported by
//! [`bell_slacks`].

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::DIM;
use crate::error::{Error, Result};
use crate::measurement::{marginals_from_weights, MarginalConvention, MarginalSet};
use crate::tol;

/// Right-hand minus left-hand side of each of the four inequalities
///
/// ```text
/// λ + μ + ν − P(ab) − P(bc) − P(ac) ≤ 1
/// P(ab) + P(ac) − P(bc) ≤ λ
/// P(ab) + P(bc) − P(ac) ≤ μ
/// P(ac) + P(bc) − P(ab) ≤ ν
/// ```
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellReport {
    pub slack: [f64; 4],
    pub satisfied: bool,
    pub convention_note: String,
}

impl BellReport {
    pub fn min_slack(&self) -> f64 {
        self.slack.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Indices (0-based) of the inequalities with negative slack.
    pub fn violated(&self) -> Vec<usize> {
        (0..4).filter(|&k| self.slack[k] < -tol::EXACT).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiInterval {
    pub lower: f64,
    pub upper: f64,
}

impl XiInterval {
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper + tol::EXACT
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, xi: f64) -> bool {
        xi >= self.lower - tol::EXACT && xi <= self.upper + tol::EXACT
    }
}

/// Probabilities of the eight sign outcomes, in basis index order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDistribution {
    prob: [f64; DIM],
}

impl JointDistribution {
    pub fn new(prob: [f64; DIM]) -> Result<Self> {
        for &p in &prob {
            if !p.is_finite() {
                return Err(Error::NonFinite {
                    field: "prob",
                    value: p,
                });
            }
            if p < -tol::EXACT {
                return Err(Error::range("prob", p, "outcome probabilities are non-negative"));
            }
        }
        let total: f64 = prob.iter().sum();
        if (total - 1.0).abs() > tol::EXACT {
            return Err(Error::Normalization { total });
        }
        Ok(JointDistribution { prob })
    }

    pub fn prob(&self) -> &[f64; DIM] {
        &self.prob
    }
}

/// Why no joint distribution could be built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoJoint {
    /// Outcome indices whose probability came out negative.
    pub violated_terms: Vec<usize>,
    pub bell: BellReport,
    /// The `ξ` that was tried, if one was.
    pub xi: Option<f64>,
}

impl std::fmt::Display for NoJoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "negative outcome terms {:?}", self.violated_terms)
    }
}

/// How [`reconstruct_joint`] picks `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiRule {
    UseGivenXi,
    Midpoint,
    Lower,
}

fn note_for(convention: MarginalConvention) -> String {
    match convention {
        MarginalConvention::Conjunction => "conjunction values".to_string(),
        MarginalConvention::Parity => {
            "parity values inserted literally into inequalities written for conjunction marginals".to_string()
        }
    }
}

/// The four slacks, evaluated on the seven numbers as given.
pub fn bell_slacks(m: &MarginalSet) -> BellReport {
    let [l, mu, nu, ab, bc, ac, _] = m.values();
    let slack = [
        1.0 + ab + ac + bc - (l + mu + nu),
        l + bc - ab - ac,
        mu + ac - ab - bc,
        nu + ab - ac - bc,
    ];
    let satisfied = slack.iter().all(|&s| s >= -tol::EXACT);
    BellReport {
        slack,
        satisfied,
        convention_note: note_for(m.convention()),
    }
}

fn require_conjunction(m: &MarginalSet) -> Result<()> {
    if m.convention() != MarginalConvention::Conjunction {
        return Err(Error::Convention {
            expected: MarginalConvention::Conjunction,
            found: m.convention(),
        });
    }
    Ok(())
}

/// Range of `ξ` keeping all eight outcome terms non-negative.
pub fn xi_interval(m: &MarginalSet) -> Result<XiInterval> {
    require_conjunction(m)?;
    Ok(xi_bounds(m))
}

/// [`xi_interval`] without the convention check, for literal readings.
pub fn xi_bounds(m: &MarginalSet) -> XiInterval {
    let [l, mu, nu, ab, bc, ac, _] = m.values();
    let lower = [0.0, ab + ac - l, ab + bc - mu, ac + bc - nu]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let upper = [ab, ac, bc, 1.0 - l - mu - nu + ab + ac + bc]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    XiInterval { lower, upper }
}

/// The eight outcome probabilities implied by the marginals and `xi`.
pub fn condition_terms(m: &MarginalSet, xi: f64) -> [f64; DIM] {
    let [l, mu, nu, ab, bc, ac, _] = m.values();
    [
        xi,
        ab - xi,
        ac - xi,
        l - ab - ac + xi,
        bc - xi,
        mu - ab - bc + xi,
        nu - ac - bc + xi,
        1.0 - l - mu - nu + ab + ac + bc - xi,
    ]
}

fn negative_terms(terms: &[f64; DIM], slack: f64) -> Vec<usize> {
    (0..DIM).filter(|&i| terms[i] < -slack).collect()
}

/// Builds the joint distribution, choosing `ξ` by `rule`.
pub fn reconstruct_joint(m: &MarginalSet, rule: XiRule) -> Result<JointDistribution> {
    require_conjunction(m)?;
    reconstruct_unchecked(m, rule)
}

/// [`reconstruct_joint`] without the convention check. Used to feed parity
/// numbers into the conjunction construction, as the literal reading does.
pub fn reconstruct_unchecked(m: &MarginalSet, rule: XiRule) -> Result<JointDistribution> {
    let interval = xi_bounds(m);
    let xi = match rule {
        XiRule::UseGivenXi => m.xi(),
        XiRule::Midpoint | XiRule::Lower if interval.is_empty() => {
            let terms = condition_terms(m, interval.midpoint());
            return Err(no_joint(m, &terms, None));
        }
        XiRule::Midpoint => interval.midpoint(),
        XiRule::Lower => interval.lower,
    };
    let terms = condition_terms(m, xi);
    if !negative_terms(&terms, tol::EXACT).is_empty() {
        return Err(no_joint(m, &terms, Some(xi)));
    }
    JointDistribution::new(terms)
}

fn no_joint(m: &MarginalSet, terms: &[f64; DIM], xi: Option<f64>) -> Error {
    Error::NoJoint(Box::new(NoJoint {
        violated_terms: negative_terms(terms, tol::EXACT),
        bell: bell_slacks(m),
        xi,
    }))
}

/// Forward map from a joint distribution to its marginals.
pub fn marginals_from_joint(j: &JointDistribution, convention: MarginalConvention) -> MarginalSet {
    let values = marginals_from_weights(j.prob(), convention).map(|v| v.clamp(0.0, 1.0));
    MarginalSet::from_values_unchecked(values, convention)
}

/// Marginals of three independent observables with `+1` probabilities
/// `lambda`, `mu`, `nu`.
pub fn independent_marginals(lambda: f64, mu: f64, nu: f64, convention: MarginalConvention) -> MarginalSet {
    let s = [lambda, mu, nu];
    let prob: [f64; DIM] = std::array::from_fn(|i| {
        crate::basis::Player::ALL
            .iter()
            .map(|&p| {
                let q = s[p.index()];
                if crate::basis::is_plus(i, p) {
                    q
                } else {
                    1.0 - q
                }
            })
            .product()
    });
    let values = marginals_from_weights(&prob, convention).map(|v| v.clamp(0.0, 1.0));
    MarginalSet::from_values_unchecked(values, convention)
}

/// Brute-force check: does any of `grid_n` evenly spaced `ξ` in
/// `[0, min pair]` make all eight terms at least `-1e-9`?
pub fn joint_exists_oracle(m: &MarginalSet, grid_n: usize) -> Result<bool> {
    require_conjunction(m)?;
    if grid_n < 2 {
        return Err(Error::param("grid_n", "at least two grid points are needed"));
    }
    let top = m.p_ab().min(m.p_bc()).min(m.p_ac());
    let step = top / (grid_n - 1) as f64;
    Ok((0..grid_n).into_par_iter().any(|k| {
        let xi = if k == grid_n - 1 { top } else { k as f64 * step };
        negative_terms(&condition_terms(m, xi), tol::ORACLE).is_empty()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONJ: MarginalConvention = MarginalConvention::Conjunction;
    const PARITY: MarginalConvention = MarginalConvention::Parity;

    fn coins() -> MarginalSet {
        MarginalSet::new([0.5, 0.5, 0.5, 0.25, 0.25, 0.25, 0.125], CONJ).unwrap()
    }

    fn ghz_parity() -> MarginalSet {
        MarginalSet::new([0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 0.5], PARITY).unwrap()
    }

    #[test]
    fn slacks_examples() {
        let r = bell_slacks(&ghz_parity());
        assert_eq!(r.slack, [2.5, -0.5, -0.5, -0.5]);
        assert!(!r.satisfied);
        assert_eq!(r.violated(), vec![1, 2, 3]);

        let r = bell_slacks(&MarginalSet::new([1.0; 7], CONJ).unwrap());
        assert_eq!(r.slack, [1.0, 0.0, 0.0, 0.0]);
        assert!(r.satisfied);
    }

    #[test]
    fn independent_sets_satisfy() {
        for &(l, m, n) in &[(0.2, 0.7, 0.5), (0.0, 1.0, 0.3), (0.9, 0.9, 0.1)] {
            assert!(bell_slacks(&independent_marginals(l, m, n, CONJ)).satisfied);
        }
    }

    #[test]
    fn symmetric_parity_reading_needs_half() {
        // 1 + 4x² ≤ 3x + 2x² holds only for x in [1/2, 1]
        assert!(!bell_slacks(&independent_marginals(0.3, 0.3, 0.3, PARITY)).satisfied);
        assert!(bell_slacks(&independent_marginals(0.7, 0.7, 0.7, PARITY)).satisfied);
    }

    #[test]
    fn interval_examples() {
        let i = xi_interval(&coins()).unwrap();
        assert_eq!((i.lower, i.upper), (0.0, 0.25));
        let i = xi_interval(&MarginalSet::new([1.0; 7], CONJ).unwrap()).unwrap();
        assert_eq!((i.lower, i.upper), (1.0, 1.0));
        let g = MarginalSet::new([0.5; 7], CONJ).unwrap();
        let i = xi_interval(&g).unwrap();
        assert_eq!((i.lower, i.upper), (0.5, 0.5));
        assert!(matches!(xi_interval(&ghz_parity()), Err(Error::Convention { .. })));
    }

    #[test]
    fn reconstruct_examples() {
        let j = reconstruct_joint(&coins(), XiRule::UseGivenXi).unwrap();
        assert_eq!(*j.prob(), [0.125; 8]);
        let j = reconstruct_joint(&MarginalSet::new([1.0; 7], CONJ).unwrap(), XiRule::Midpoint).unwrap();
        assert_eq!(*j.prob(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let literal = ghz_parity().reinterpreted_as(CONJ);
        match reconstruct_joint(&literal, XiRule::Midpoint) {
            Err(Error::NoJoint(nj)) => {
                assert!(!nj.violated_terms.is_empty());
                assert!(!nj.bell.satisfied);
            }
            other => panic!("expected NoJoint, got {other:?}"),
        }
    }

    #[test]
    fn forward_map_examples() {
        let m = marginals_from_joint(&JointDistribution::new([0.125; 8]).unwrap(), CONJ);
        assert_eq!(m.values(), [0.5, 0.5, 0.5, 0.25, 0.25, 0.25, 0.125]);
        let point = JointDistribution::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        for conv in [CONJ, PARITY] {
            assert_eq!(marginals_from_joint(&point, conv).values(), [1.0; 7]);
        }
    }

    #[test]
    fn oracle_examples() {
        assert!(joint_exists_oracle(&coins(), 1000).unwrap());
        assert!(!joint_exists_oracle(&ghz_parity().reinterpreted_as(CONJ), 1000).unwrap());
        assert!(joint_exists_oracle(&MarginalSet::new([1.0; 7], CONJ).unwrap(), 1000).unwrap());
    }

    #[test]
    fn joint_rejects_bad_input() {
        assert!(JointDistribution::new([0.2; 8]).is_err());
        assert!(JointDistribution::new([1.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }
}
