//! Nash equilibria of multilinear payoffs and the coalition analysis of the
//! odd-man-out game.
//!
//! Every payoff considered here is affine in the deviating player's own
//! probability, so a player's best unilateral deviation is always one of the
//! two pure strategies. Certificates compare the current payoff against both.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{index_of, Player};
use crate::error::{Error, Result};
use crate::fine::independent_marginals;
use crate::games::{coop_game, factorizable_values, payoff_marginal_form, PayoffTable, StrategyTriple};
use crate::measurement::MarginalConvention;
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeCertificate {
    pub triple: StrategyTriple,
    /// `Π_i(s) − max(Π_i(0, s₋ᵢ), Π_i(1, s₋ᵢ))`; never positive.
    pub player_slack: [f64; 3],
    pub is_ne: bool,
    pub note: String,
}

impl NeCertificate {
    pub fn min_slack(&self) -> f64 {
        self.player_slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalitionValue {
    pub coalition: Vec<Player>,
    pub value: f64,
}

/// Own-variable partial derivatives of the factorizable payoffs.
pub fn factorizable_gradient(table: &PayoffTable, s: &StrategyTriple) -> [f64; 3] {
    Player::ALL.map(|p| {
        let hi = factorizable_values(table, &s.with(p, 1.0).as_array())[p.index()];
        let lo = factorizable_values(table, &s.with(p, 0.0).as_array())[p.index()];
        hi - lo
    })
}

/// Certifies `s` against unilateral deviations for any payoff function
/// affine in each player's own coordinate.
pub fn verify_ne<F>(payoff: F, s: &StrategyTriple, tol: f64) -> NeCertificate
where
    F: Fn(&[f64; 3]) -> [f64; 3],
{
    let here = payoff(&s.as_array());
    let mut slack = [0.0; 3];
    let mut gaps = [0.0; 3];
    let mut best_dev = [0.0; 3];
    for p in Player::ALL {
        let i = p.index();
        let hi = payoff(&s.with(p, 1.0).as_array())[i];
        let lo = payoff(&s.with(p, 0.0).as_array())[i];
        let best = hi.max(lo);
        slack[i] = (here[i] - best).min(0.0);
        gaps[i] = (hi - lo).abs();
        best_dev[i] = if hi >= lo { 1.0 } else { 0.0 };
    }
    let is_ne = slack.iter().all(|&x| x >= -tol);
    let note = if !is_ne {
        let worst = Player::ALL
            .into_iter()
            .min_by(|a, b| slack[a.index()].total_cmp(&slack[b.index()]))
            .expect("three players");
        format!(
            "not an equilibrium: player {worst} gains {} by deviating to {}",
            -slack[worst.index()],
            best_dev[worst.index()]
        )
    } else {
        let strict = Player::ALL
            .iter()
            .all(|&p| gaps[p.index()] > tol && (s.get(p) == 0.0 || s.get(p) == 1.0));
        if strict {
            "strict".to_string()
        } else {
            "weak: some player is indifferent between its own strategies".to_string()
        }
    };
    NeCertificate {
        triple: *s,
        player_slack: slack,
        is_ne,
        note,
    }
}

pub fn verify_ne_factorizable(table: &PayoffTable, s: &StrategyTriple, tol: f64) -> NeCertificate {
    verify_ne(|x| factorizable_values(table, x), s, tol)
}

/// Certified equilibria on the lattice `{0, 1/(n−1), …, 1}³`, in
/// lexicographic order.
pub fn grid_ne_search(table: &PayoffTable, resolution: usize, tol: f64) -> Result<Vec<NeCertificate>> {
    if resolution < 2 {
        return Err(Error::param("resolution", "at least 2 points per axis"));
    }
    let n = resolution;
    let step = |i: usize| i as f64 / (n - 1) as f64;
    let mut found: Vec<NeCertificate> = (0..n * n * n)
        .into_par_iter()
        .filter_map(|k| {
            let s = StrategyTriple::new(step(k / (n * n)), step((k / n) % n), step(k % n)).ok()?;
            let cert = verify_ne_factorizable(table, &s, tol);
            cert.is_ne.then_some(cert)
        })
        .collect();
    found.sort_by(|a, b| {
        a.triple
            .as_array()
            .iter()
            .zip(b.triple.as_array())
            .map(|(x, y)| x.total_cmp(&y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(found)
}

/// Outcome of [`product_state_interior_solve`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteriorSolution {
    pub triple: Option<StrategyTriple>,
    /// Further roots of the symmetric stationarity equation in `[0, 1]`.
    pub other_roots: Vec<f64>,
    pub note: String,
}

/// Payoffs of a product state with singles `s`, reading the POVM (parity)
/// marginals into the marginal form.
pub fn product_state_payoffs(table: &PayoffTable, s: &[f64; 3]) -> [f64; 3] {
    let m = independent_marginals(s[0], s[1], s[2], MarginalConvention::Parity);
    payoff_marginal_form(table, &m)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol::BISECTION * 1e-3 {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Symmetric interior stationary point of the product-state payoffs.
///
/// With `λ = μ = ν = x` the own-variable partial of player A is a scalar
/// function of `x`; its roots in `[0, 1]` are located by a sign scan and
/// refined by bisection.
pub fn product_state_interior_solve(table: &PayoffTable) -> Result<InteriorSolution> {
    if !table.is_symmetric() {
        return Err(Error::Shape(
            "interior solve needs a table symmetric under player exchange".into(),
        ));
    }
    let g = |x: f64| {
        let hi = product_state_payoffs(table, &[1.0, x, x])[0];
        let lo = product_state_payoffs(table, &[0.0, x, x])[0];
        hi - lo
    };
    const SCAN: usize = 1000;
    let xs: Vec<f64> = (0..=SCAN).map(|k| k as f64 / SCAN as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    if gs.iter().all(|v| v.abs() <= tol::EXACT) {
        return Ok(InteriorSolution {
            triple: None,
            other_roots: vec![],
            note: "stationarity holds identically; no isolated root".into(),
        });
    }
    let mut roots = Vec::new();
    for k in 0..SCAN {
        let (a, b) = (gs[k], gs[k + 1]);
        if a == 0.0 {
            roots.push(xs[k]);
        } else if b != 0.0 && (a < 0.0) != (b < 0.0) {
            roots.push(bisect(g, xs[k], xs[k + 1]));
        }
    }
    if gs[SCAN] == 0.0 {
        roots.push(1.0);
    }
    let Some((&first, rest)) = roots.split_first() else {
        return Ok(InteriorSolution {
            triple: None,
            other_roots: vec![],
            note: "no root of the stationarity equation in [0, 1]".into(),
        });
    };
    let note = if rest.is_empty() {
        "unique root in [0, 1]".to_string()
    } else {
        format!("{} roots in [0, 1]; smallest returned", roots.len())
    };
    Ok(InteriorSolution {
        triple: Some(StrategyTriple::new(first, first, first)?),
        other_roots: rest.to_vec(),
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroSumSolution {
    pub value: f64,
    pub row_mix: [f64; 2],
    pub col_mix: [f64; 2],
}

/// Minimax solution of a 2×2 zero-sum game; the row player maximizes.
pub fn zero_sum_2x2_value(m: [[f64; 2]; 2]) -> ZeroSumSolution {
    let row_min = [m[0][0].min(m[0][1]), m[1][0].min(m[1][1])];
    let col_max = [m[0][0].max(m[1][0]), m[0][1].max(m[1][1])];
    let maximin = row_min[0].max(row_min[1]);
    let minimax = col_max[0].min(col_max[1]);
    if maximin == minimax {
        let pick = |good: [bool; 2]| match good {
            [true, true] => [0.5, 0.5],
            [true, false] => [1.0, 0.0],
            _ => [0.0, 1.0],
        };
        return ZeroSumSolution {
            value: maximin,
            row_mix: pick([row_min[0] == maximin, row_min[1] == maximin]),
            col_mix: pick([col_max[0] == minimax, col_max[1] == minimax]),
        };
    }
    let [[a, b], [c, d]] = m;
    let den = a - b - c + d;
    let p = (d - c) / den;
    let q = (d - b) / den;
    ZeroSumSolution {
        value: (a * d - b * c) / den,
        row_mix: [p, 1.0 - p],
        col_mix: [q, 1.0 - q],
    }
}

/// A two-player coalition facing the remaining player.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalitionGame {
    pub coalition: [Player; 2],
    pub opponent: Player,
    /// Rows `[+1,+1] [+1,−1] [−1,+1] [−1,−1]` for the coalition, columns
    /// `[+1] [−1]` for the opponent; entries are the coalition's total.
    pub matrix: [[f64; 2]; 4],
    /// Rows surviving elimination of strictly dominated rows.
    pub kept_rows: Vec<usize>,
    pub solution: ZeroSumSolution,
}

fn strictly_dominated(matrix: &[[f64; 2]; 4], alive: &[usize], r: usize) -> bool {
    alive
        .iter()
        .any(|&o| o != r && (0..2).all(|j| matrix[o][j] > matrix[r][j]))
}

pub fn coalition_game(table: &PayoffTable, opponent: Player) -> Result<CoalitionGame> {
    if !table.is_zero_sum() {
        return Err(Error::Shape("coalition values need a zero-sum table".into()));
    }
    let members: Vec<Player> = Player::ALL.into_iter().filter(|&p| p != opponent).collect();
    let coalition = [members[0], members[1]];
    let signs = [[true, true], [true, false], [false, true], [false, false]];
    let matrix: [[f64; 2]; 4] = signs.map(|[x, y]| {
        [true, false].map(|o| {
            let mut plus = [true; 3];
            plus[coalition[0].index()] = x;
            plus[coalition[1].index()] = y;
            plus[opponent.index()] = o;
            let row = table.rows()[index_of(plus[0], plus[1], plus[2])];
            row[coalition[0].index()] + row[coalition[1].index()]
        })
    });
    let mut alive: Vec<usize> = (0..4).collect();
    while let Some(pos) = alive.iter().position(|&r| strictly_dominated(&matrix, &alive, r)) {
        alive.remove(pos);
    }
    if alive.len() != 2 {
        return Err(Error::Shape(format!(
            "expected two undominated coalition strategies, found {}",
            alive.len()
        )));
    }
    let solution = zero_sum_2x2_value([matrix[alive[0]], matrix[alive[1]]]);
    Ok(CoalitionGame {
        coalition,
        opponent,
        matrix,
        kept_rows: alive,
        solution,
    })
}

/// Values of the six proper coalitions: `{A} {B} {C} {A,B} {B,C} {C,A}`.
pub fn coalition_analysis(table: &PayoffTable) -> Result<Vec<CoalitionValue>> {
    let games: Vec<CoalitionGame> = Player::ALL
        .iter()
        .map(|&p| coalition_game(table, p))
        .collect::<Result<_>>()?;
    let mut out: Vec<CoalitionValue> = games
        .iter()
        .map(|g| CoalitionValue {
            coalition: vec![g.opponent],
            value: -g.solution.value,
        })
        .collect();
    // opponents C, A, B face {A,B}, {B,C}, {C,A}
    for (opp, members) in [
        (2, [Player::A, Player::B]),
        (0, [Player::B, Player::C]),
        (1, [Player::C, Player::A]),
    ] {
        out.push(CoalitionValue {
            coalition: members.to_vec(),
            value: games[opp].solution.value,
        });
    }
    Ok(out)
}

/// Payoffs when B and C both play `c` and A plays `l`.
pub fn coop_coalition_payoffs(l: f64, c: f64) -> [f64; 3] {
    factorizable_values(&coop_game(), &[l, c, c])
}

fn quadratic_through(f0: f64, fh: f64, f1: f64) -> [f64; 3] {
    // f(x) = a + b x + e x² through x = 0, 1/2, 1
    let a = f0;
    let e = 2.0 * (f1 - 2.0 * fh + f0);
    let b = f1 - a - e;
    [a, b, e]
}

fn root_in_unit(coef: [f64; 3]) -> Option<f64> {
    let [a, b, e] = coef;
    let candidates: Vec<f64> = if e.abs() <= tol::EXACT {
        if b.abs() <= tol::EXACT {
            vec![]
        } else {
            vec![-a / b]
        }
    } else {
        let disc = b * b - 4.0 * e * a;
        if disc < 0.0 {
            vec![]
        } else {
            let r = disc.sqrt();
            vec![(-b - r) / (2.0 * e), (-b + r) / (2.0 * e)]
        }
    };
    candidates
        .into_iter()
        .filter(|x| (-tol::EXACT..=1.0 + tol::EXACT).contains(x))
        .min_by(f64::total_cmp)
}

/// `(l*, c*)` for the odd-man-out game with B and C in coalition.
///
/// A's indifference `Π_A(1,c,c) = Π_A(0,c,c)` fixes `c*`; the coalition's
/// stationarity `∂Π_B(l,c,c)/∂c = 0` at `c*` then fixes `l*`.
pub fn coop_best_response_solve() -> (f64, f64) {
    let f_a = |c: f64| coop_coalition_payoffs(1.0, c)[0] - coop_coalition_payoffs(0.0, c)[0];
    let c_star = root_in_unit(quadratic_through(f_a(0.0), f_a(0.5), f_a(1.0)))
        .expect("the odd-man-out game has an indifference point");
    let d_b = |l: f64| {
        let [_, b, e] = quadratic_through(
            coop_coalition_payoffs(l, 0.0)[1],
            coop_coalition_payoffs(l, 0.5)[1],
            coop_coalition_payoffs(l, 1.0)[1],
        );
        b + 2.0 * e * c_star
    };
    let (h0, h1) = (d_b(0.0), d_b(1.0));
    let l_star = h0 / (h0 - h1);
    (l_star, c_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{pd3, PdParams};

    fn pd() -> PayoffTable {
        pd3(&PdParams::default()).unwrap()
    }

    fn t(l: f64, m: f64, n: f64) -> StrategyTriple {
        StrategyTriple::new(l, m, n).unwrap()
    }

    #[test]
    fn pd_gradient_closed_form() {
        let (l, m, n) = (0.4, 0.25, 0.9);
        let g = factorizable_gradient(&pd(), &t(l, m, n));
        assert!((g[0] - (m * n - m - n - 1.0)).abs() < 1e-12);
        assert_eq!(factorizable_gradient(&coop_game(), &t(0.5, 0.5, 0.5)), [0.0; 3]);
    }

    #[test]
    fn pd_certificates() {
        let c = verify_ne_factorizable(&pd(), &t(0.0, 0.0, 0.0), tol::NE);
        assert!(c.is_ne);
        assert_eq!(c.note, "strict");
        let c = verify_ne_factorizable(&pd(), &t(1.0, 1.0, 1.0), tol::NE);
        assert!(!c.is_ne);
        assert_eq!(c.player_slack, [-2.0; 3]);
        let c = verify_ne_factorizable(&coop_game(), &t(0.5, 0.5, 0.5), tol::NE);
        assert!(c.is_ne);
        assert!(c.note.starts_with("weak"));
    }

    #[test]
    fn grid_search() {
        let found = grid_ne_search(&pd(), 11, tol::NE).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].triple.as_array(), [0.0; 3]);
        let coop = grid_ne_search(&coop_game(), 11, tol::NE).unwrap();
        assert!(coop.iter().any(|c| c.triple.as_array() == [0.5; 3]));
        let flat = PayoffTable::new([[2.0; 3]; 8]).unwrap();
        assert_eq!(grid_ne_search(&flat, 5, tol::NE).unwrap().len(), 125);
        assert!(grid_ne_search(&pd(), 1, tol::NE).is_err());
    }

    #[test]
    fn interior_solve() {
        let sol = product_state_interior_solve(&pd()).unwrap();
        let x = sol.triple.unwrap().lambda();
        assert!((x - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-12, "{x}");
        assert!(sol.other_roots.is_empty());
        let flat = PayoffTable::new([[2.0; 3]; 8]).unwrap();
        assert!(product_state_interior_solve(&flat).unwrap().triple.is_none());
        let mut rows = *pd().rows();
        rows[1][0] = 4.0;
        assert!(product_state_interior_solve(&PayoffTable::new(rows).unwrap()).is_err());
    }

    #[test]
    fn two_by_two() {
        let s = zero_sum_2x2_value([[0.0, 2.0], [2.0, 0.0]]);
        assert_eq!((s.value, s.row_mix, s.col_mix), (1.0, [0.5, 0.5], [0.5, 0.5]));
        let s = zero_sum_2x2_value([[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!((s.value, s.row_mix, s.col_mix), (0.5, [0.5, 0.5], [0.5, 0.5]));
        let s = zero_sum_2x2_value([[3.0, 3.0], [3.0, 3.0]]);
        assert_eq!((s.value, s.row_mix, s.col_mix), (3.0, [0.5, 0.5], [0.5, 0.5]));
        let s = zero_sum_2x2_value([[4.0, 5.0], [1.0, 0.0]]);
        assert_eq!((s.value, s.row_mix, s.col_mix), (4.0, [1.0, 0.0], [1.0, 0.0]));
    }

    #[test]
    fn coalitions() {
        let g = coalition_game(&coop_game(), Player::A).unwrap();
        assert_eq!(g.matrix, [[0.0, 2.0], [-1.0, -1.0], [-1.0, -1.0], [2.0, 0.0]]);
        assert_eq!(g.kept_rows, vec![0, 3]);
        let v: Vec<f64> = coalition_analysis(&coop_game())
            .unwrap()
            .iter()
            .map(|c| c.value)
            .collect();
        assert_eq!(v, vec![-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(coalition_analysis(&pd()), Err(Error::Shape(_))));
    }

    #[test]
    fn coop_best_response() {
        assert_eq!(coop_best_response_solve(), (0.5, 0.5));
        for c in [0.1, 0.35, 0.8] {
            assert!(coop_coalition_payoffs(c, c)[0].abs() < 1e-12);
            let v = coop_coalition_payoffs(1.0 - c, c)[0];
            assert!((v + 2.0 * (2.0 * c - 1.0).powi(2)).abs() < 1e-12);
        }
    }
}
