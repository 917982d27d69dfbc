//! End-to-end case studies built from the library operations.
//!
//! Each scenario takes a JSON object of optional parameters and returns a
//! [`ScenarioReport`]. Reference values are compared only when the inputs
//! coincide with the published setting (default dilemma parameters and the
//! quoted state); failed comparisons and contradicted claims are collected
//! in `paper_deviation`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::basis::{outcome_label, Player, DIM};
use crate::descriptor::ComplexRepr;
use crate::equilibrium::{
    coalition_analysis, coalition_game, coop_best_response_solve, coop_coalition_payoffs, grid_ne_search,
    product_state_interior_solve, product_state_payoffs, verify_ne, verify_ne_factorizable, NeCertificate,
};
use crate::error::{Error, Result};
use crate::fine::{
    bell_slacks, condition_terms, independent_marginals, reconstruct_joint, reconstruct_unchecked, BellReport, XiRule,
};
use crate::games::{
    coop_game, family_payoff_reduction, payoff_factorizable, payoff_marginal_form, pd3, pd_payoffs_from_pure_state,
    product_weight, AffinePayoff, PayoffTable, PdParams, StateFamily, StrategyTriple,
};
use crate::measurement::{
    convert_marginals, extract_marginals, pure_state_marginals, weights_from_marginals, MarginalConvention, MarginalSet,
};
use crate::qstates::{c, density_from_pure, ghz, pd_state, w_state, ComplexScalar, PureState};
use crate::render::format_g17;
use crate::sampling;
use crate::tol;

pub const SCENARIO_IDS: [&str; 8] = [
    "pd-classical",
    "pd-ghz",
    "ghz-bell",
    "pd-product",
    "pd-w",
    "pd-continuum",
    "coop-classical",
    "coop-quantum",
];

const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledMarginals {
    pub label: String,
    #[serde(flatten)]
    pub set: MarginalSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payoffs {
    Values([f64; 3]),
    /// Payoffs as affine functions of the singles over a state family.
    Parametric {
        description: String,
        constant: [f64; 3],
        coeff: [[f64; 3]; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NeFinding {
    Certificate(NeCertificate),
    Note { text: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperCheck {
    pub quantity: String,
    pub paper: f64,
    pub computed: f64,
    pub abs_diff: f64,
}

impl PaperCheck {
    pub fn passes(&self) -> bool {
        self.abs_diff <= CHECK_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario_id: String,
    pub inputs: Value,
    pub marginals: Vec<LabelledMarginals>,
    pub bell: Option<BellReport>,
    pub payoffs: Option<Payoffs>,
    pub payoff_form: String,
    pub ne_findings: Vec<NeFinding>,
    pub paper_checks: Vec<PaperCheck>,
    pub findings: Vec<String>,
    /// Scenario-specific intermediate results.
    pub details: Value,
    pub paper_deviation: Option<String>,
}

impl ScenarioReport {
    fn new(id: &str) -> Self {
        ScenarioReport {
            scenario_id: id.to_string(),
            inputs: Value::Object(Map::new()),
            marginals: vec![],
            bell: None,
            payoffs: None,
            payoff_form: String::new(),
            ne_findings: vec![],
            paper_checks: vec![],
            findings: vec![],
            details: Value::Object(Map::new()),
            paper_deviation: None,
        }
    }

    fn check(&mut self, quantity: impl Into<String>, paper: f64, computed: f64) {
        self.paper_checks.push(PaperCheck {
            quantity: quantity.into(),
            paper,
            computed,
            abs_diff: (paper - computed).abs(),
        });
    }

    fn marginals(&mut self, label: &str, set: MarginalSet) {
        self.marginals.push(LabelledMarginals {
            label: label.to_string(),
            set,
        });
    }

    fn detail(&mut self, key: &str, v: Value) {
        if let Value::Object(map) = &mut self.details {
            map.insert(key.to_string(), v);
        }
    }

    fn deviate(&mut self, text: String) {
        self.paper_deviation = Some(match self.paper_deviation.take() {
            Some(prev) => format!("{prev} {text}"),
            None => text,
        });
    }

    fn finish(mut self) -> Self {
        let failed: Vec<String> = self
            .paper_checks
            .iter()
            .filter(|c| !c.passes())
            .map(|c| {
                format!(
                    "{}: expected {}, computed {}.",
                    c.quantity,
                    format_g17(c.paper),
                    format_g17(c.computed)
                )
            })
            .collect();
        if !failed.is_empty() {
            self.deviate(format!("Reference mismatch. {}", failed.join(" ")));
        }
        self
    }

    pub fn checks_pass(&self) -> bool {
        self.paper_checks.iter().all(PaperCheck::passes)
    }

    /// Reproduction table followed by findings.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("## {}\n\n", self.scenario_id);
        if !self.paper_checks.is_empty() {
            out.push_str("| scenario | quantity | paper value | computed | \\|Δ\\| |\n|---|---|---|---|---|\n");
            for c in &self.paper_checks {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    self.scenario_id,
                    c.quantity,
                    format_g17(c.paper),
                    format_g17(c.computed),
                    format_g17(c.abs_diff)
                );
            }
            out.push('\n');
        }
        if let Some(Payoffs::Values(v)) = &self.payoffs {
            let _ = writeln!(
                out,
                "Payoffs ({}): ({}, {}, {})\n",
                self.payoff_form,
                format_g17(v[0]),
                format_g17(v[1]),
                format_g17(v[2])
            );
        }
        if let Some(b) = &self.bell {
            let s: Vec<String> = b.slack.iter().map(|x| format_g17(*x)).collect();
            let _ = writeln!(out, "Bell slacks: ({}), satisfied: {}\n", s.join(", "), b.satisfied);
        }
        for f in &self.findings {
            let _ = writeln!(out, "- {f}");
        }
        if let Some(d) = &self.paper_deviation {
            let _ = writeln!(out, "\n**paper_deviation:** {d}");
        }
        out
    }
}

/// Markdown for several reports, one section each.
pub fn reports_markdown(reports: &[ScenarioReport]) -> String {
    reports
        .iter()
        .map(ScenarioReport::to_markdown)
        .collect::<Vec<_>>()
        .join("\n")
}

const GLOBAL_KEYS: [&str; 3] = ["tol", "resolution", "seed"];

struct Params<'a> {
    obj: Map<String, Value>,
    echo: Map<String, Value>,
    known: Vec<&'a str>,
    strict: bool,
}

impl<'a> Params<'a> {
    fn new(params: &Value, strict: bool) -> Result<Self> {
        let obj = match params {
            Value::Null => Map::new(),
            Value::Object(m) => m.clone(),
            _ => return Err(Error::param("params", "expected a JSON object")),
        };
        Ok(Params {
            obj,
            echo: Map::new(),
            known: GLOBAL_KEYS.to_vec(),
            strict,
        })
    }

    fn raw(&mut self, key: &'a str) -> Option<Value> {
        self.known.push(key);
        self.obj.get(key).cloned()
    }

    fn parse<T: serde::de::DeserializeOwned + Serialize>(&mut self, key: &'a str, default: T) -> Result<T> {
        let v = match self.raw(key) {
            Some(v) => serde_json::from_value(v).map_err(|e| Error::param(format!("params.{key}"), e.to_string()))?,
            None => default,
        };
        self.echo
            .insert(key.to_string(), serde_json::to_value(&v).expect("serializable"));
        Ok(v)
    }

    fn complex(&mut self, key: &'a str, default: ComplexScalar) -> Result<ComplexScalar> {
        Ok(self.parse::<ComplexRepr>(key, default.into())?.into())
    }

    fn complex3(&mut self, key: &'a str, default: [ComplexScalar; 3]) -> Result<[ComplexScalar; 3]> {
        Ok(self
            .parse::<[ComplexRepr; 3]>(key, default.map(Into::into))?
            .map(Into::into))
    }

    /// The dilemma parameters and whether they are the defaults.
    fn pd(&mut self) -> Result<(PayoffTable, bool)> {
        let arr = self.parse::<[f64; 6]>("pd", PdParams::default().to_array())?;
        let params = PdParams::from_array(arr);
        let table = pd3(&params).map_err(|e| Error::param("params.pd", e.to_string()))?;
        Ok((table, params == PdParams::default()))
    }

    fn state<F>(&mut self, key: &'a str, default: [ComplexScalar; 3], build: F) -> Result<PureState>
    where
        F: Fn(ComplexScalar, ComplexScalar, ComplexScalar) -> Result<PureState>,
    {
        let [a, b, d] = self.complex3(key, default)?;
        build(a, b, d).map_err(|e| Error::param(format!("params.{key}"), e.to_string()))
    }

    fn finish(self) -> Result<Value> {
        if self.strict {
            if let Some(k) = self.obj.keys().find(|k| !self.known.contains(&k.as_str())) {
                return Err(Error::param(
                    format!("params.{k}"),
                    "unknown parameter for this scenario",
                ));
            }
        }
        Ok(Value::Object(self.echo))
    }
}

fn tri(v: [f64; 3]) -> Value {
    json!(v)
}

/// `a` is within `eps` of `b` component-wise.
fn near(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= eps)
}

pub fn run_scenario(id: &str, params: &Value) -> Result<ScenarioReport> {
    run_with(id, params, true)
}

/// Runs every scenario with the shared parameters; keys a scenario does not
/// use are ignored.
pub fn run_all(params: &Value, parallel: bool) -> Result<Vec<ScenarioReport>> {
    if parallel {
        SCENARIO_IDS.par_iter().map(|id| run_with(id, params, false)).collect()
    } else {
        SCENARIO_IDS.iter().map(|id| run_with(id, params, false)).collect()
    }
}

fn run_with(id: &str, params: &Value, strict: bool) -> Result<ScenarioReport> {
    let mut p = Params::new(params, strict)?;
    let ne_tol = p.parse::<f64>("tol", tol::NE)?;
    if !(ne_tol.is_finite() && ne_tol >= 0.0) {
        return Err(Error::param("params.tol", "tolerance must be a non-negative number"));
    }
    let mut report = match id {
        "pd-classical" => pd_classical(&mut p, ne_tol),
        "pd-ghz" => pd_ghz(&mut p),
        "ghz-bell" => ghz_bell(&mut p),
        "pd-product" => pd_product(&mut p, ne_tol),
        "pd-w" => pd_w(&mut p, ne_tol),
        "pd-continuum" => pd_continuum(&mut p, ne_tol),
        "coop-classical" => coop_classical(&mut p, ne_tol),
        "coop-quantum" => coop_quantum(&mut p),
        other => return Err(Error::UnknownScenario(other.to_string())),
    }?;
    report.inputs = p.finish()?;
    Ok(report.finish())
}

fn pd_classical(p: &mut Params, ne_tol: f64) -> Result<ScenarioReport> {
    let (table, default) = p.pd()?;
    let resolution = p.parse::<usize>("resolution", 11)?;
    let mut r = ScenarioReport::new("pd-classical");
    r.payoff_form = "factorizable".into();
    let found =
        grid_ne_search(&table, resolution, ne_tol).map_err(|e| Error::param("params.resolution", e.to_string()))?;
    let triples: Vec<[f64; 3]> = found.iter().map(|c| c.triple.as_array()).collect();
    r.findings.push(format!(
        "lattice search at resolution {resolution} certifies {} equilibria: {:?}",
        found.len(),
        triples
    ));
    if let Some(first) = found.first() {
        let s = first.triple;
        r.payoffs = Some(Payoffs::Values(payoff_factorizable(&table, &s)));
        let m = independent_marginals(s.lambda(), s.mu(), s.nu(), MarginalConvention::Conjunction);
        r.bell = Some(bell_slacks(&m));
        r.marginals("independent strategies at the equilibrium", m);
    }
    let all_coop = verify_ne_factorizable(&table, &StrategyTriple::new(1.0, 1.0, 1.0)?, ne_tol);
    let gain = -all_coop.min_slack();
    r.findings.push(format!(
        "(1,1,1) is {}an equilibrium; the best deviation gains {}",
        if all_coop.is_ne { "" } else { "not " },
        format_g17(gain)
    ));
    let slope = crate::equilibrium::factorizable_gradient(&table, &StrategyTriple::new(0.5, 0.5, 0.5)?);
    r.detail("own_gradient_at_half", tri(slope));
    r.ne_findings = found.into_iter().map(NeFinding::Certificate).collect();
    r.ne_findings.push(NeFinding::Certificate(all_coop));
    if default {
        r.check("number of lattice equilibria", 1.0, triples.len() as f64);
        if let Some(Payoffs::Values(v)) = r.payoffs {
            for (k, pl) in Player::ALL.iter().enumerate() {
                r.check(format!("Π_{pl} at the equilibrium"), 1.0, v[k]);
            }
        }
        r.check("deviation gain from (1,1,1)", 2.0, gain);
    }
    Ok(r)
}

fn ghz_marginal_sets(a: ComplexScalar, b: ComplexScalar) -> Result<(PureState, MarginalSet, MarginalSet)> {
    let state = ghz(a, b).map_err(|e| Error::param("params.a", e.to_string()))?;
    let rho = density_from_pure(&state);
    let parity = extract_marginals(&rho, MarginalConvention::Parity)?;
    let conj = extract_marginals(&rho, MarginalConvention::Conjunction)?;
    Ok((state, parity, conj))
}

fn ghz_inputs(p: &mut Params) -> Result<(ComplexScalar, ComplexScalar)> {
    let a = p.complex("a", c(FRAC_1_SQRT_2, 0.0))?;
    let b_default = c((1.0 - a.norm_sqr()).max(0.0).sqrt(), 0.0);
    let b = p.complex("b", b_default)?;
    Ok((a, b))
}

fn is_half(z: ComplexScalar) -> bool {
    (z.norm_sqr() - 0.5).abs() <= tol::EXACT
}

fn pd_ghz(p: &mut Params) -> Result<ScenarioReport> {
    let (table, default) = p.pd()?;
    let (a, b) = ghz_inputs(p)?;
    let (state, parity, conj) = ghz_marginal_sets(a, b)?;
    let mut r = ScenarioReport::new("pd-ghz");
    r.payoff_form = "marginal form on parity marginals".into();
    let pay = payoff_marginal_form(&table, &parity);
    r.payoffs = Some(Payoffs::Values(pay));
    r.bell = Some(bell_slacks(&parity));
    r.marginals("parity (POVM traces)", parity);
    r.marginals("conjunction", conj);
    let conj_pay = payoff_marginal_form(&table, &conj);
    r.findings.push(format!(
        "with conjunction marginals the same state pays ({}, {}, {}) and the Bell inequalities are {}",
        format_g17(conj_pay[0]),
        format_g17(conj_pay[1]),
        format_g17(conj_pay[2]),
        if bell_slacks(&conj).satisfied {
            "satisfied"
        } else {
            "violated"
        }
    ));
    r.detail("conjunction_payoffs", tri(conj_pay));
    if default {
        let closed = pd_payoffs_from_pure_state(&state);
        r.detail("closed_form_payoffs", tri(closed));
        r.findings.push(format!(
            "amplitude closed form agrees with the marginal form to {}",
            format_g17(near_diff(&closed, &pay))
        ));
    }
    r.ne_findings.push(NeFinding::Note {
        text:
            "singles, pairs and triple are all fixed by |a|², so the players have no independent strategy to choose; \
               this family is excluded from equilibrium search"
                .into(),
    });
    if is_half(a) && is_half(b) {
        let expected = [0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 0.5];
        let names = ["λ", "μ", "ν", "P(ab)", "P(bc)", "P(ac)", "ξ"];
        let got = r.marginals[0].set.values();
        for k in 0..7 {
            r.check(format!("parity {}", names[k]), expected[k], got[k]);
        }
        if default {
            for (k, pl) in Player::ALL.iter().enumerate() {
                r.check(format!("Π_{pl}"), 3.0, pay[k]);
            }
        }
        let slack = r.bell.as_ref().map(|b| b.slack).unwrap_or_default();
        for (k, want) in [2.5, -0.5, -0.5, -0.5].into_iter().enumerate() {
            r.check(format!("Bell slack {}", k + 1), want, slack[k]);
        }
    }
    Ok(r)
}

fn near_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn ghz_bell(p: &mut Params) -> Result<ScenarioReport> {
    let (table, _) = p.pd()?;
    let (a, b) = ghz_inputs(p)?;
    let samples = p.parse::<usize>("samples", 1001)?;
    if samples < 2 {
        return Err(Error::param("params.samples", "at least two samples"));
    }
    let (_, parity, conj) = ghz_marginal_sets(a, b)?;
    let mut r = ScenarioReport::new("ghz-bell");
    r.payoff_form = "marginal form on parity marginals".into();
    r.payoffs = Some(Payoffs::Values(payoff_marginal_form(&table, &parity)));
    let bell = bell_slacks(&parity);
    let literal = parity.reinterpreted_as(MarginalConvention::Conjunction);
    match reconstruct_unchecked(&literal, XiRule::UseGivenXi) {
        Ok(_) => r
            .findings
            .push("the parity values admit a joint distribution when read literally".into()),
        Err(Error::NoJoint(nj)) => {
            let labels: Vec<String> = nj.violated_terms.iter().map(|&i| outcome_label(i)).collect();
            r.findings.push(format!(
                "read literally, the outcome terms {} are negative: no joint distribution",
                labels.join(" ")
            ));
        }
        Err(e) => return Err(e),
    }
    let conj_bell = bell_slacks(&conj);
    r.findings.push(format!(
        "with conjunction marginals the inequalities are {} (slacks {:?})",
        if conj_bell.satisfied { "satisfied" } else { "violated" },
        conj_bell.slack
    ));
    r.marginals("parity (POVM traces)", parity);
    r.marginals("conjunction", conj);

    // along the family, each slack is affine in t = |a|²
    let slack_at = |t: f64| -> Result<[f64; 4]> {
        let (_, m, _) = ghz_marginal_sets(c(t.sqrt(), 0.0), c((1.0 - t).max(0.0).sqrt(), 0.0))?;
        Ok(bell_slacks(&m).slack)
    };
    let (s0, s1) = (slack_at(0.0)?, slack_at(1.0)?);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..4 {
        let (icept, slope) = (s0[k], s1[k] - s0[k]);
        if slope > 0.0 {
            lo = lo.max(-icept / slope);
        } else if slope < 0.0 {
            hi = hi.min(-icept / slope);
        } else if icept < -tol::EXACT {
            hi = f64::NEG_INFINITY;
        }
    }
    let mut satisfied_at = Vec::new();
    for k in 0..samples {
        let t = k as f64 / (samples - 1) as f64;
        if slack_at(t)?.iter().all(|&s| s >= -tol::EXACT) {
            satisfied_at.push(t);
        }
    }
    r.findings.push(format!(
        "on the family the inequalities hold for {} ≤ |a|² ≤ {}; among {samples} samples of |a|² in [0, 1] they hold at {:?}",
        format_g17(lo),
        format_g17(hi),
        satisfied_at
    ));
    r.detail("window", json!({"lower": lo, "upper": hi}));
    r.detail("satisfied_samples", json!(satisfied_at));
    r.check("window lower end in |a|²", 1.0, lo);
    r.check("window upper end in |a|²", 4.0 / 3.0, hi);
    r.check("samples satisfying the inequalities", 1.0, satisfied_at.len() as f64);
    if is_half(a) && is_half(b) {
        for (k, want) in [2.5, -0.5, -0.5, -0.5].into_iter().enumerate() {
            r.check(format!("Bell slack {}", k + 1), want, bell.slack[k]);
        }
    }
    r.bell = Some(bell);
    Ok(r)
}

fn pd_product(p: &mut Params, ne_tol: f64) -> Result<ScenarioReport> {
    let (table, default) = p.pd()?;
    let mut r = ScenarioReport::new("pd-product");
    r.payoff_form = "marginal form on product-state parity marginals".into();
    let sol = product_state_interior_solve(&table)?;
    r.detail("interior_solve", serde_json::to_value(&sol).expect("serializable"));
    let Some(s) = sol.triple else {
        r.findings.push(format!("no symmetric interior root: {}", sol.note));
        return Ok(r);
    };
    let x = s.lambda();
    let parity = independent_marginals(x, x, x, MarginalConvention::Parity);
    let pay = product_state_payoffs(&table, &s.as_array());
    r.payoffs = Some(Payoffs::Values(pay));
    let cert = verify_ne(|t| product_state_payoffs(&table, t), &s, ne_tol);
    r.ne_findings.push(NeFinding::Certificate(cert));
    r.findings
        .push(format!("symmetric stationary point λ* = μ* = ν* = {}", format_g17(x)));

    // the parity numbers are reproduced by the state's own diagonal
    let inversion = weights_from_marginals(&parity)?;
    let product: [f64; DIM] = std::array::from_fn(|i| product_weight(&s.as_array(), i));
    let inv_err = near_diff(inversion.weights(), &product);
    r.detail(
        "inverted_weights",
        serde_json::to_value(&inversion).expect("serializable"),
    );
    r.detail("product_weights", json!(product));
    let signs: String = inversion
        .weights()
        .iter()
        .map(|w| {
            if *w < -tol::ORACLE {
                '-'
            } else if *w > tol::ORACLE {
                '+'
            } else {
                '0'
            }
        })
        .collect();
    r.findings.push(format!(
        "inverting the seven parity marginals gives weights with sign pattern {signs} (p₁…p₈); they match the product weights to {}",
        format_g17(inv_err)
    ));

    // the same numbers in the conjunction outcome terms
    let literal = parity.reinterpreted_as(MarginalConvention::Conjunction);
    let terms = condition_terms(&literal, literal.xi());
    let negative: Vec<usize> = (0..DIM).filter(|&i| terms[i] < -tol::EXACT).collect();
    r.detail("literal_outcome_terms", json!(terms));
    let neg_text: Vec<String> = negative
        .iter()
        .map(|&i| format!("p{} = {}", i + 1, format_g17(terms[i])))
        .collect();
    r.findings.push(format!(
        "substituting the parity numbers into the conjunction outcome terms gives negative {}",
        neg_text.join(", ")
    ));

    let bell = bell_slacks(&parity);
    let conj = convert_marginals(&parity, MarginalConvention::Conjunction)?;
    let conj_bell = bell_slacks(&conj);
    let joint_ok = reconstruct_joint(&conj, XiRule::UseGivenXi).is_ok();
    r.findings.push(format!(
        "parity values read literally {} the Bell inequalities; the conjunction marginals of the same state {} them and {} a joint distribution",
        if bell.satisfied { "satisfy" } else { "violate" },
        if conj_bell.satisfied { "satisfy" } else { "violate" },
        if joint_ok { "have" } else { "lack" }
    ));
    r.marginals("parity (product state at the stationary point)", parity);
    r.marginals("conjunction", conj);

    if inversion.is_feasible() {
        let p4 = inversion.weights()[3];
        let literal_p4 = terms[3];
        r.deviate(format!(
            "The inversion is claimed to give a negative p₄, but the unique solution of the full-rank system is the \
             product-state diagonal, non-negative throughout (p₄ = {}). A negative p₄ = {} appears only when the \
             parity marginals are placed into the conjunction outcome terms.",
            format_g17(p4),
            format_g17(literal_p4)
        ));
    }
    if !bell.satisfied {
        r.deviate(format!(
            "Product-state marginals are claimed to satisfy the Bell inequalities, yet the parity values at the \
             stationary point violate inequalities {:?} when inserted literally; the conjunction marginals satisfy all four.",
            bell.violated().iter().map(|k| k + 1).collect::<Vec<_>>()
        ));
    }
    r.bell = Some(bell);
    if default {
        let root2 = 2f64.sqrt();
        r.check("λ*", (2.0 - root2) / 2.0, x);
        r.check("P(ab) at λ*", 2.0 - root2, r.marginals[0].set.p_ab());
        r.check("ξ at λ*", (2.0 - root2) * (3.0 - root2) / 2.0, r.marginals[0].set.xi());
        let closed = 2.0 * (2.0 * x * x * x - 2.0 * x * x - 2.0 * x * x - x * x + x + 3.0 * x + 3.0 * x) - 1.0;
        r.check("Π_A at λ* from the product closed form", closed, pay[0]);
    }
    Ok(r)
}

fn family_payoffs(description: &str, a: &AffinePayoff) -> Payoffs {
    Payoffs::Parametric {
        description: description.to_string(),
        constant: a.constant,
        coeff: a.coeff,
    }
}

fn pd_w(p: &mut Params, ne_tol: f64) -> Result<ScenarioReport> {
    let (table, default) = p.pd()?;
    let t = c(1.0 / 3f64.sqrt(), 0.0);
    let state = p.state("c", [t, t, t], w_state)?;
    let mut r = ScenarioReport::new("pd-w");
    r.payoff_form = "marginal form on parity marginals, reduced to the singles".into();
    let m = pure_state_marginals(&state);
    let s = [m.lambda(), m.mu(), m.nu()];
    let red = family_payoff_reduction(&table, StateFamily::W);
    let pay = payoff_marginal_form(&table, &m);
    r.payoffs = Some(family_payoffs(
        "Π_i = constant_i + Σ_k coeff[i][k]·s_k over W-type states",
        &red,
    ));
    r.detail("payoffs_at_state", tri(pay));
    r.detail("reduced_payoffs_at_state", tri(red.eval(&s)));
    r.bell = Some(bell_slacks(&m));
    r.marginals("parity", m);
    let sum: f64 = s.iter().sum();
    let partials = red.own_partials();
    r.findings.push(format!("λ + μ + ν = {}", format_g17(sum)));
    r.findings.push(format!(
        "own partials are constant at ({}, {}, {}), so every player prefers its own variable at 0; the push to (0,0,0) \
         contradicts λ + μ + ν = 2",
        format_g17(partials[0]),
        format_g17(partials[1]),
        format_g17(partials[2])
    ));
    let cert = verify_ne(|x| red.eval(x), &StrategyTriple::new(s[0], s[1], s[2])?, ne_tol);
    r.ne_findings.push(NeFinding::Certificate(cert));
    r.ne_findings.push(NeFinding::Note {
        text: format!(
            "unconstrained deviations drive the profile to (0,0,0), where the singles sum to 0 instead of {}; \
             no W-type state realizes an equilibrium",
            format_g17(StateFamily::W.singles_sum())
        ),
    });
    r.check("λ + μ + ν", 2.0, sum);
    if default {
        let expected = [[-2.0, 4.0, 4.0], [4.0, -2.0, 4.0], [4.0, 4.0, -2.0]];
        for (i, pl) in Player::ALL.iter().enumerate() {
            for (k, var) in ["λ", "μ", "ν"].iter().enumerate() {
                r.check(format!("Π_{pl} coefficient of {var}"), expected[i][k], red.coeff[i][k]);
            }
            r.check(format!("Π_{pl} constant"), 1.0, red.constant[i]);
        }
    }
    Ok(r)
}

fn pd_continuum(p: &mut Params, ne_tol: f64) -> Result<ScenarioReport> {
    let (table, default) = p.pd()?;
    let t = c(1.0 / 3f64.sqrt(), 0.0);
    let state = p.state("c", [t, t, t], pd_state)?;
    let samples = p.parse::<usize>("samples", 0)?;
    let seed = p.parse::<u64>("seed", 0)?;
    let mut r = ScenarioReport::new("pd-continuum");
    r.payoff_form = "marginal form on parity marginals".into();
    let red = family_payoff_reduction(&table, StateFamily::PdState);
    let m = pure_state_marginals(&state);
    let s = [m.lambda(), m.mu(), m.nu()];
    let pay = payoff_marginal_form(&table, &m);
    r.payoffs = Some(Payoffs::Values(pay));
    r.detail(
        "family_reduction",
        serde_json::to_value(family_payoffs(
            "payoffs over PD-type states as affine functions of the singles",
            &red,
        ))
        .expect("serializable"),
    );
    r.bell = Some(bell_slacks(&m));
    r.marginals("parity", m);
    let cert = verify_ne(|x| red.eval(x), &StrategyTriple::new(s[0], s[1], s[2])?, ne_tol);
    let weak = cert.is_ne;
    r.ne_findings.push(NeFinding::Certificate(cert));
    r.ne_findings.push(NeFinding::Note {
        text: "every profile with λ + μ + ν = 1 is a weak equilibrium: each payoff is independent of the player's own variable".into(),
    });
    let sum: f64 = s.iter().sum();
    r.findings.push(format!(
        "own partials ({}, {}, {}); λ + μ + ν = {}",
        format_g17(red.own_partials()[0]),
        format_g17(red.own_partials()[1]),
        format_g17(red.own_partials()[2]),
        format_g17(sum)
    ));
    if samples > 0 {
        let mut rng = sampling::rng(seed);
        let mut max_err: f64 = 0.0;
        let mut all_weak = true;
        for _ in 0..samples {
            let st = sampling::pd_type(&mut rng);
            let mm = pure_state_marginals(&st);
            let (l, mu, nu) = (mm.lambda(), mm.mu(), mm.nu());
            let want = [4.0 * (mu + nu) + 1.0, 4.0 * (l + nu) + 1.0, 4.0 * (l + mu) + 1.0];
            max_err = max_err.max(near_diff(&payoff_marginal_form(&table, &mm), &want));
            let c = verify_ne(|x| red.eval(x), &StrategyTriple::new(l, mu, nu)?, ne_tol);
            all_weak &= c.is_ne;
        }
        r.findings.push(format!(
            "{samples} random PD-type states (seed {seed}): largest deviation from 4(μ+ν)+1 etc. is {}; all weak equilibria: {all_weak}",
            format_g17(max_err)
        ));
        r.detail("sampled_max_error", json!(max_err));
    }
    r.findings.push(format!("profile at the input state certified: {weak}"));
    r.check("λ + μ + ν", 1.0, sum);
    if default {
        let (l, mu, nu) = (s[0], s[1], s[2]);
        let want = [4.0 * (mu + nu) + 1.0, 4.0 * (l + nu) + 1.0, 4.0 * (l + mu) + 1.0];
        for (k, pl) in Player::ALL.iter().enumerate() {
            r.check(format!("Π_{pl} against 4(sum of the others) + 1"), want[k], pay[k]);
            r.check(format!("∂Π_{pl} along its own variable"), 0.0, red.own_partials()[k]);
        }
        if near(&s, &[1.0 / 3.0; 3], tol::EXACT) {
            r.check("Π_A at (1/3,1/3,1/3)", 11.0 / 3.0, pay[0]);
        }
    }
    Ok(r)
}

fn coop_classical(p: &mut Params, ne_tol: f64) -> Result<ScenarioReport> {
    let resolution = p.parse::<usize>("resolution", 11)?;
    let table = coop_game();
    let mut r = ScenarioReport::new("coop-classical");
    r.payoff_form = "factorizable".into();
    let values = coalition_analysis(&table)?;
    let against_a = coalition_game(&table, Player::A)?;
    let (l_star, c_star) = coop_best_response_solve();
    let s = StrategyTriple::new(l_star, c_star, c_star)?;
    r.payoffs = Some(Payoffs::Values(payoff_factorizable(&table, &s)));
    let m = independent_marginals(l_star, c_star, c_star, MarginalConvention::Conjunction);
    r.bell = Some(bell_slacks(&m));
    r.marginals("independent strategies at (l*, c*, c*)", m);
    let cert = verify_ne_factorizable(&table, &s, ne_tol);
    r.ne_findings.push(NeFinding::Certificate(cert));
    let grid =
        grid_ne_search(&table, resolution, ne_tol).map_err(|e| Error::param("params.resolution", e.to_string()))?;
    let has_half = grid.iter().any(|c| near(&c.triple.as_array(), &[0.5; 3], 0.0));
    r.findings.push(format!(
        "lattice search at resolution {resolution} certifies {} equilibria; (1/2,1/2,1/2) among them: {has_half}",
        grid.len()
    ));
    r.findings.push(format!(
        "{{B,C}} against A keeps rows {:?} of the 4×2 matrix; value {} with mixes {:?} and {:?}",
        against_a.kept_rows,
        format_g17(against_a.solution.value),
        against_a.solution.row_mix,
        against_a.solution.col_mix
    ));
    let probe = [0.1, 0.3, 0.7];
    let same: f64 = probe
        .iter()
        .map(|&c| coop_coalition_payoffs(c, c)[0].abs())
        .fold(0.0, f64::max);
    let opposite: f64 = probe
        .iter()
        .map(|&c| (coop_coalition_payoffs(1.0 - c, c)[0] + 2.0 * (2.0 * c - 1.0).powi(2)).abs())
        .fold(0.0, f64::max);
    r.detail("coalition_values", serde_json::to_value(&values).expect("serializable"));
    r.detail(
        "coalition_game_against_A",
        serde_json::to_value(&against_a).expect("serializable"),
    );
    r.detail("best_response", json!({"l_star": l_star, "c_star": c_star}));
    let names = ["{A}", "{B}", "{C}", "{A,B}", "{B,C}", "{C,A}"];
    for (k, want) in [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0].into_iter().enumerate() {
        r.check(format!("υ({})", names[k]), want, values[k].value);
    }
    r.check("2×2 coalition value", 1.0, against_a.solution.value);
    r.check("coalition mix on [+1,+1]", 0.5, against_a.solution.row_mix[0]);
    r.check("odd-man mix on [+1]", 0.5, against_a.solution.col_mix[0]);
    r.check("l*", 0.5, l_star);
    r.check("c*", 0.5, c_star);
    r.check("max |Π_A(l,c,c)| at l = c", 0.0, same);
    r.check("max |Π_A + 2(2c−1)²| at l = 1 − c", 0.0, opposite);
    Ok(r)
}

fn coop_cond_holds(st: &PureState) -> bool {
    let w = st.probabilities();
    let eq = |i: usize, j: usize| (w[i] - w[j]).abs() <= tol::EXACT;
    eq(3, 5) && eq(5, 6) && eq(1, 2) && eq(2, 4)
}

fn coop_quantum(p: &mut Params) -> Result<ScenarioReport> {
    let t = c(1.0 / 6f64.sqrt(), 0.0);
    let z = c(0.0, 0.0);
    let amps = p.parse::<[ComplexRepr; DIM]>("amplitudes", [z, t, t, t, t, t, t, z].map(Into::into))?;
    let samples = p.parse::<usize>("samples", 0)?;
    let seed = p.parse::<u64>("seed", 0)?;
    let state = PureState::new(amps.map(Into::into)).map_err(|e| Error::param("params.amplitudes", e.to_string()))?;
    if !coop_cond_holds(&state) {
        return Err(Error::param(
            "params.amplitudes",
            "need |c4|² = |c6|² = |c7|² and |c2|² = |c3|² = |c5|² (amplitudes numbered 1..8)",
        ));
    }
    let table = coop_game();
    let mut r = ScenarioReport::new("coop-quantum");
    r.payoff_form = "marginal form on parity marginals".into();
    let m = pure_state_marginals(&state);
    let pay = payoff_marginal_form(&table, &m);
    r.payoffs = Some(Payoffs::Values(pay));
    r.bell = Some(bell_slacks(&m));
    let spread = (m.lambda() - m.mu()).abs().max((m.mu() - m.nu()).abs());
    r.marginals("parity", m);
    r.ne_findings.push(NeFinding::Note {
        text: "the constraint ties λ = μ = ν and every admissible state pays (0,0,0); no player or coalition can \
               change its payoff"
            .into(),
    });
    if samples > 0 {
        let mut rng = sampling::rng(seed);
        let (mut max_pay, mut max_spread): (f64, f64) = (0.0, 0.0);
        for _ in 0..samples {
            let st = sampling::coop_cond_state(&mut rng);
            let mm = pure_state_marginals(&st);
            max_pay = max_pay.max(near_diff(&payoff_marginal_form(&table, &mm), &[0.0; 3]));
            max_spread = max_spread.max((mm.lambda() - mm.mu()).abs().max((mm.mu() - mm.nu()).abs()));
        }
        r.findings.push(format!(
            "{samples} random constrained states (seed {seed}): largest |payoff| {}, largest single spread {}",
            format_g17(max_pay),
            format_g17(max_spread)
        ));
        r.detail(
            "sampled",
            json!({"max_abs_payoff": max_pay, "max_single_spread": max_spread}),
        );
    }
    r.findings.push(format!("singles agree to {}", format_g17(spread)));
    for (k, pl) in Player::ALL.iter().enumerate() {
        r.check(format!("Π_{pl}"), 0.0, pay[k]);
    }
    r.check("max |λ − μ|, |μ − ν|", 0.0, spread);
    Ok(r)
}
