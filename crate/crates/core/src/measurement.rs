//! POVM elements in the `σ_z` basis and the seven marginals they produce.
//!
//! A [`MarginalSet`] holds `(λ, μ, ν, P(ab), P(bc), P(ac), ξ)`. Two readings of
//! the pair and triple entries are in use and every set carries its reading
//! explicitly:
//!
//! * [`MarginalConvention::Conjunction`]: `P(ab)` is the probability that both
//!   observables are `+1`, and `ξ = P(abc)` that all three are.
//! * [`MarginalConvention::Parity`]: `P(ab)` is the probability that the product
//!   `ab` is `+1` (the two agree), and `ξ` that `abc = +1`. This is what the
//!   POVM built from `M⁰⁰ + M¹¹` measures.
//!
//! The singles `λ, μ, ν` are the probabilities of `+1` under both readings.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::basis::{is_plus, sign, Pair, Player, DIM};
use crate::error::{Error, Result};
use crate::qstates::{
    density_from_pure, hermitian_eigenvalues, real, ComplexScalar, DensityMatrix, Operator, PureState,
};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginalConvention {
    Conjunction,
    Parity,
}

impl MarginalConvention {
    pub fn other(self) -> Self {
        match self {
            MarginalConvention::Conjunction => MarginalConvention::Parity,
            MarginalConvention::Parity => MarginalConvention::Conjunction,
        }
    }
}

impl fmt::Display for MarginalConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarginalConvention::Conjunction => "conjunction",
            MarginalConvention::Parity => "parity",
        })
    }
}

const FIELD_NAMES: [&str; 7] = ["lambda", "mu", "nu", "p_ab", "p_bc", "p_ac", "xi"];

/// The seven marginals, tagged with the convention they are read in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMarginals")]
pub struct MarginalSet {
    pub(crate) lambda: f64,
    pub(crate) mu: f64,
    pub(crate) nu: f64,
    pub(crate) p_ab: f64,
    pub(crate) p_bc: f64,
    pub(crate) p_ac: f64,
    pub(crate) xi: f64,
    pub(crate) convention: MarginalConvention,
}

#[derive(Deserialize)]
struct RawMarginals {
    lambda: f64,
    mu: f64,
    nu: f64,
    p_ab: f64,
    p_bc: f64,
    p_ac: f64,
    xi: f64,
    convention: MarginalConvention,
}

impl TryFrom<RawMarginals> for MarginalSet {
    type Error = Error;

    fn try_from(r: RawMarginals) -> Result<Self> {
        MarginalSet::new([r.lambda, r.mu, r.nu, r.p_ab, r.p_bc, r.p_ac, r.xi], r.convention)
    }
}

impl MarginalSet {
    /// Builds a set from `[λ, μ, ν, P(ab), P(bc), P(ac), ξ]`.
    ///
    /// Every value must lie in `[0, 1]`. Under the conjunction reading each
    /// pair must also respect `s₁ + s₂ − 1 ≤ P ≤ min(s₁, s₂)` and `ξ` may not
    /// exceed any pair, all up to `1e-12`.
    pub fn new(values: [f64; 7], convention: MarginalConvention) -> Result<Self> {
        for (&v, name) in values.iter().zip(FIELD_NAMES) {
            if !v.is_finite() {
                return Err(Error::NonFinite { field: name, value: v });
            }
            if !(-tol::EXACT..=1.0 + tol::EXACT).contains(&v) {
                return Err(Error::range(name, v, "probabilities lie in [0, 1]"));
            }
        }
        let set = Self::from_values_unchecked(values, convention);
        if convention == MarginalConvention::Conjunction {
            set.check_conjunction_bounds()?;
        }
        Ok(set)
    }

    pub(crate) fn from_values_unchecked(v: [f64; 7], convention: MarginalConvention) -> Self {
        MarginalSet {
            lambda: v[0],
            mu: v[1],
            nu: v[2],
            p_ab: v[3],
            p_bc: v[4],
            p_ac: v[5],
            xi: v[6],
            convention,
        }
    }

    fn check_conjunction_bounds(&self) -> Result<()> {
        for pair in Pair::ALL {
            let (x, y) = pair.players();
            let (sx, sy, p) = (self.single(x), self.single(y), self.pair(pair));
            let field = FIELD_NAMES[3 + pair as usize];
            if p > sx.min(sy) + tol::EXACT {
                return Err(Error::range(field, p, "a conjunction pair cannot exceed either single"));
            }
            if p < sx + sy - 1.0 - tol::EXACT {
                return Err(Error::range(field, p, "a conjunction pair is at least s₁ + s₂ − 1"));
            }
        }
        let min_pair = self.p_ab.min(self.p_bc).min(self.p_ac);
        if self.xi > min_pair + tol::EXACT {
            return Err(Error::range("xi", self.xi, "ξ cannot exceed any conjunction pair"));
        }
        Ok(())
    }

    /// The same seven numbers read under another convention, with no
    /// conversion. This is how POVM (parity) values end up in inequalities
    /// stated for the conjunction reading; the result may violate the
    /// consistency bounds that [`MarginalSet::new`] enforces.
    pub fn reinterpreted_as(&self, convention: MarginalConvention) -> Self {
        MarginalSet { convention, ..*self }
    }

    pub fn values(&self) -> [f64; 7] {
        [self.lambda, self.mu, self.nu, self.p_ab, self.p_bc, self.p_ac, self.xi]
    }

    pub fn convention(&self) -> MarginalConvention {
        self.convention
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn p_ab(&self) -> f64 {
        self.p_ab
    }
    pub fn p_bc(&self) -> f64 {
        self.p_bc
    }
    pub fn p_ac(&self) -> f64 {
        self.p_ac
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn single(&self, player: Player) -> f64 {
        match player {
            Player::A => self.lambda,
            Player::B => self.mu,
            Player::C => self.nu,
        }
    }

    pub fn pair(&self, pair: Pair) -> f64 {
        match pair {
            Pair::AB => self.p_ab,
            Pair::BC => self.p_bc,
            Pair::AC => self.p_ac,
        }
    }

    /// Largest absolute difference between the seven values of two sets.
    pub fn max_abs_diff(&self, other: &MarginalSet) -> f64 {
        self.values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A Hermitian operator `0 ≤ E ≤ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    entries: Operator,
}

impl PovmElement {
    pub fn new(entries: Operator) -> Result<Self> {
        let herm_err = (entries - entries.adjoint()).camax();
        if herm_err > tol::EXACT {
            return Err(Error::InvalidPovm(format!("not Hermitian ({herm_err:e})")));
        }
        let eig = hermitian_eigenvalues(&entries);
        if eig[0] < -tol::PSD {
            return Err(Error::InvalidPovm(format!("negative eigenvalue {:e}", eig[0])));
        }
        if eig[DIM - 1] > 1.0 + tol::PSD {
            return Err(Error::InvalidPovm(format!("eigenvalue {} exceeds 1", eig[DIM - 1])));
        }
        Ok(PovmElement { entries })
    }

    pub fn entries(&self) -> &Operator {
        &self.entries
    }

    /// `Tr(E ρ)`.
    pub fn probability(&self, rho: &DensityMatrix) -> ComplexScalar {
        rho.expectation(&self.entries)
    }

    /// Basis indices on which a diagonal projector is one.
    pub fn support(&self) -> Vec<usize> {
        (0..DIM).filter(|&i| self.entries[(i, i)].re > 0.5).collect()
    }
}

/// A two-outcome POVM. `plus` is the element whose trace gives the stored
/// marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    pub plus: PovmElement,
    pub minus: PovmElement,
}

impl Povm {
    /// `plus + minus`, which is the identity for every POVM built here.
    pub fn completeness(&self) -> Operator {
        self.plus.entries + self.minus.entries
    }
}

fn ket0() -> Matrix2<ComplexScalar> {
    Matrix2::new(real(1.0), real(0.0), real(0.0), real(0.0))
}

fn ket1() -> Matrix2<ComplexScalar> {
    Matrix2::new(real(0.0), real(0.0), real(0.0), real(1.0))
}

fn id2() -> Matrix2<ComplexScalar> {
    Matrix2::identity()
}

/// `a ⊗ b ⊗ c` for single-qubit operators, player A on the left.
pub fn kron3(a: &Matrix2<ComplexScalar>, b: &Matrix2<ComplexScalar>, c: &Matrix2<ComplexScalar>) -> Operator {
    Operator::from_fn(|i, j| a[(i >> 2, j >> 2)] * b[((i >> 1) & 1, (j >> 1) & 1)] * c[(i & 1, j & 1)])
}

/// Single-qubit projector onto `|bit⟩`.
fn local_projector(bit: u8) -> Matrix2<ComplexScalar> {
    if bit == 0 {
        ket0()
    } else {
        ket1()
    }
}

fn factors(assign: [Option<u8>; 3]) -> Operator {
    let f: [Matrix2<ComplexScalar>; 3] = assign.map(|a| match a {
        Some(bit) => local_projector(bit),
        None => id2(),
    });
    kron3(&f[0], &f[1], &f[2])
}

fn element(op: Operator) -> PovmElement {
    PovmElement::new(op).expect("projectors built from σ_z eigenstates are valid POVM elements")
}

struct PovmCache {
    single: [Povm; 3],
    pair_parity: [Povm; 3],
    pair_conjunction: [Povm; 3],
    triple_parity: Povm,
    triple_conjunction: Povm,
}

fn build_cache() -> PovmCache {
    let single = Player::ALL.map(|p| {
        let mut zero = [None; 3];
        zero[p.index()] = Some(0);
        let mut one = [None; 3];
        one[p.index()] = Some(1);
        Povm {
            plus: element(factors(zero)),
            minus: element(factors(one)),
        }
    });
    let pair_ops = |pair: Pair, x_bit: u8, y_bit: u8| {
        let (x, y) = pair.players();
        let mut assign = [None; 3];
        assign[x.index()] = Some(x_bit);
        assign[y.index()] = Some(y_bit);
        factors(assign)
    };
    let pair_parity = Pair::ALL.map(|pair| Povm {
        plus: element(pair_ops(pair, 0, 0) + pair_ops(pair, 1, 1)),
        minus: element(pair_ops(pair, 1, 0) + pair_ops(pair, 0, 1)),
    });
    let pair_conjunction = Pair::ALL.map(|pair| {
        let both = pair_ops(pair, 0, 0);
        Povm {
            minus: element(Operator::identity() - both),
            plus: element(both),
        }
    });
    let k = |a: u8, b: u8, c: u8| factors([Some(a), Some(b), Some(c)]);
    let triple_parity = Povm {
        plus: element(k(0, 0, 0) + k(1, 1, 0) + k(0, 1, 1) + k(1, 0, 1)),
        minus: element(k(1, 1, 1) + k(1, 0, 0) + k(0, 1, 0) + k(0, 0, 1)),
    };
    let all_plus = k(0, 0, 0);
    let triple_conjunction = Povm {
        minus: element(Operator::identity() - all_plus),
        plus: element(all_plus),
    };
    PovmCache {
        single,
        pair_parity,
        pair_conjunction,
        triple_parity,
        triple_conjunction,
    }
}

fn cache() -> &'static PovmCache {
    static CACHE: OnceLock<PovmCache> = OnceLock::new();
    CACHE.get_or_init(build_cache)
}

/// `(M⁰, M¹)` for one player's qubit.
pub fn single_povm(player: Player) -> &'static Povm {
    &cache().single[player.index()]
}

/// Parity: `(M⁰⁰ + M¹¹, M⁰¹ + M¹⁰)`. Conjunction: `(M⁰⁰, I − M⁰⁰)`.
pub fn pair_povm(pair: Pair, convention: MarginalConvention) -> &'static Povm {
    match convention {
        MarginalConvention::Parity => &cache().pair_parity[pair as usize],
        MarginalConvention::Conjunction => &cache().pair_conjunction[pair as usize],
    }
}

/// Parity: projector on the even-flip set `{000, 110, 011, 101}` and its
/// complement. Conjunction: `|000⟩⟨000|` and its complement.
pub fn triple_povm(convention: MarginalConvention) -> &'static Povm {
    match convention {
        MarginalConvention::Parity => &cache().triple_parity,
        MarginalConvention::Conjunction => &cache().triple_conjunction,
    }
}

fn clamp_probability(field: &'static str, z: ComplexScalar) -> Result<f64> {
    if z.im.abs() > tol::EXACT {
        return Err(Error::range(field, z.im, "trace has a non-zero imaginary part"));
    }
    let v = z.re;
    if !(-tol::EXACT..=1.0 + tol::EXACT).contains(&v) {
        return Err(Error::range(field, v, "trace probability outside [0, 1]"));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// All seven marginals of `rho` as POVM traces `Tr(M ρ)`.
pub fn extract_marginals(rho: &DensityMatrix, convention: MarginalConvention) -> Result<MarginalSet> {
    let mut values = [0.0; 7];
    for p in Player::ALL {
        values[p.index()] = clamp_probability(FIELD_NAMES[p.index()], single_povm(p).plus.probability(rho))?;
    }
    for pair in Pair::ALL {
        let k = 3 + pair as usize;
        values[k] = clamp_probability(FIELD_NAMES[k], pair_povm(pair, convention).plus.probability(rho))?;
    }
    values[6] = clamp_probability("xi", triple_povm(convention).plus.probability(rho))?;
    MarginalSet::new(values, convention)
}

/// Parity marginals of a pure state as sums of `|cᵢ|²`, with `cᵢ` numbered
/// `1..=8` over `|000⟩ … |111⟩`.
pub fn pure_state_marginals(state: &PureState) -> MarginalSet {
    let p = state.probabilities();
    let sum = |idx: [usize; 4]| idx.iter().map(|&i| p[i - 1]).sum::<f64>();
    let values = [
        sum([1, 2, 3, 4]),
        sum([1, 2, 5, 6]),
        sum([1, 3, 5, 7]),
        sum([1, 2, 7, 8]),
        sum([1, 4, 5, 8]),
        sum([1, 3, 6, 8]),
        sum([1, 4, 6, 7]),
    ];
    MarginalSet::from_values_unchecked(values.map(|v| v.clamp(0.0, 1.0)), MarginalConvention::Parity)
}

/// Same as [`extract_marginals`] on `|Ψ⟩⟨Ψ|`.
pub fn pure_state_marginals_by_trace(state: &PureState, convention: MarginalConvention) -> Result<MarginalSet> {
    extract_marginals(&density_from_pure(state), convention)
}

/// Marginals of a distribution over the eight sign outcomes.
pub fn marginals_from_weights(weights: &[f64; DIM], convention: MarginalConvention) -> [f64; 7] {
    let sum_where = |f: &dyn Fn(usize) -> bool| (0..DIM).filter(|&i| f(i)).map(|i| weights[i]).sum::<f64>();
    let mut v = [0.0; 7];
    for p in Player::ALL {
        v[p.index()] = sum_where(&|i| is_plus(i, p));
    }
    for pair in Pair::ALL {
        let (x, y) = pair.players();
        v[3 + pair as usize] = match convention {
            MarginalConvention::Conjunction => sum_where(&|i| is_plus(i, x) && is_plus(i, y)),
            MarginalConvention::Parity => sum_where(&|i| is_plus(i, x) == is_plus(i, y)),
        };
    }
    v[6] = match convention {
        MarginalConvention::Conjunction => weights[0],
        MarginalConvention::Parity => sum_where(&|i| parity_sign(i) > 0.0),
    };
    v
}

fn parity_sign(index: usize) -> f64 {
    Player::ALL.iter().map(|&p| sign(index, p)).product()
}

fn checked(field: &'static str, v: f64) -> Result<f64> {
    if !(-tol::EXACT..=1.0 + tol::EXACT).contains(&v) {
        return Err(Error::range(field, v, "converted value outside [0, 1]"));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Re-expresses a set under `target`.
///
/// Pairs map by `P_parity = 1 − s₁ − s₂ + 2 P_conj`; the triple maps by
/// `ξ_parity = 4 ξ_conj + λ + μ + ν − 2 ΣP_conj`. Fails with a range error
/// when a converted value leaves `[0, 1]` or, for a conjunction target, the
/// result breaks the conjunction consistency bounds.
pub fn convert_marginals(m: &MarginalSet, target: MarginalConvention) -> Result<MarginalSet> {
    if m.convention == target {
        return Ok(*m);
    }
    let [l, mu, nu, ab, bc, ac, xi] = m.values();
    let out = match target {
        MarginalConvention::Parity => {
            let pab = 1.0 - l - mu + 2.0 * ab;
            let pbc = 1.0 - mu - nu + 2.0 * bc;
            let pac = 1.0 - l - nu + 2.0 * ac;
            let pxi = 4.0 * xi + l + mu + nu - 2.0 * (ab + bc + ac);
            [l, mu, nu, pab, pbc, pac, pxi]
        }
        MarginalConvention::Conjunction => {
            let cab = (ab - 1.0 + l + mu) / 2.0;
            let cbc = (bc - 1.0 + mu + nu) / 2.0;
            let cac = (ac - 1.0 + l + nu) / 2.0;
            let cxi = (xi - l - mu - nu + 2.0 * (cab + cbc + cac)) / 4.0;
            [l, mu, nu, cab, cbc, cac, cxi]
        }
    };
    let mut values = [0.0; 7];
    for (k, v) in out.into_iter().enumerate() {
        values[k] = checked(FIELD_NAMES[k], v)?;
    }
    MarginalSet::new(values, target)
}

/// Character table of the group `{±1}³`: row `S` (a subset of players encoded
/// as a bitmask over A=4, B=2, C=1), column `x` (outcome index), entry
/// `Π_{p∈S} sign(x, p)`.
pub fn walsh_matrix() -> [[f64; DIM]; DIM] {
    std::array::from_fn(|subset| {
        std::array::from_fn(|x| {
            Player::ALL
                .iter()
                .filter(|p| subset & (4 >> p.index()) != 0)
                .map(|&p| sign(x, p))
                .product()
        })
    })
}

/// Result of solving the basis weights from a parity marginal set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum WeightInversion {
    Feasible { weights: [f64; DIM] },
    Infeasible { weights: [f64; DIM], negative: Vec<usize> },
}

impl WeightInversion {
    pub fn weights(&self) -> &[f64; DIM] {
        match self {
            WeightInversion::Feasible { weights } | WeightInversion::Infeasible { weights, .. } => weights,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, WeightInversion::Feasible { .. })
    }
}

/// Solves for the diagonal weights `pᵢ` that reproduce a parity marginal
/// set: normalization, three singles, three agreement probabilities and the
/// even-parity probability form a full-rank system, inverted here through
/// the correlation (Walsh) transform.
pub fn weights_from_marginals(m: &MarginalSet) -> Result<WeightInversion> {
    if m.convention != MarginalConvention::Parity {
        return Err(Error::Convention {
            expected: MarginalConvention::Parity,
            found: m.convention,
        });
    }
    // correlations E[χ_S] indexed by subset mask (A=4, B=2, C=1)
    let mut corr = [0.0; DIM];
    corr[0] = 1.0;
    corr[4] = 2.0 * m.lambda - 1.0;
    corr[2] = 2.0 * m.mu - 1.0;
    corr[1] = 2.0 * m.nu - 1.0;
    corr[6] = 2.0 * m.p_ab - 1.0;
    corr[3] = 2.0 * m.p_bc - 1.0;
    corr[5] = 2.0 * m.p_ac - 1.0;
    corr[7] = 2.0 * m.xi - 1.0;
    let h = walsh_matrix();
    let weights: [f64; DIM] = std::array::from_fn(|x| (0..DIM).map(|s| h[s][x] * corr[s]).sum::<f64>() / 8.0);
    let negative: Vec<usize> = (0..DIM).filter(|&i| weights[i] < -tol::ORACLE).collect();
    Ok(if negative.is_empty() {
        WeightInversion::Feasible { weights }
    } else {
        WeightInversion::Infeasible { weights, negative }
    })
}
