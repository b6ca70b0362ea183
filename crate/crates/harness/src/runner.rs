//! Experiment families and the records they produce.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` (the `rand_chacha`
//! crate), one stream per family, consumed in record order. Records carry
//! everything their assertions were evaluated on, so each verdict can be
//! re-derived from the emitted JSON alone.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use vtslab_core::bounds::{compare_table, cost_report, CompareTable, CostReport, PromiseDescriptor};
use vtslab_core::grover::*;
use vtslab_core::loops::*;
use vtslab_core::phase::*;
use vtslab_core::textfmt::fmt_f64;
use vtslab_core::vts::{profile_moments, random_subroutine, stopping_profile, Moments, RandomSubroutineParams, StoppingProfile};
use vtslab_core::TolerancePolicy;

use crate::config::{ExperimentConfig, Kind};
use crate::error::Result;

/// Tolerances pinned by the experiment definitions.
pub mod limits {
    pub const COLUMN_SUM: f64 = 1e-12;
    pub const CLOSED_FORM: f64 = 1e-10;
    pub const LAGRANGE_SLACK: f64 = 1e-9;
    /// Smallest `N` at which the Lagrange bound is asserted.
    pub const LAGRANGE_MIN_N: usize = 16;
    pub const THETA_INTERVAL: (f64, f64) = (0.25, 4.0);
    pub const AVERAGE_CLOSED_FORM: f64 = 1e-8;
    pub const SIMPLE_WITNESS: f64 = 1e-10;
    pub const GENERAL_WITNESS: f64 = 1e-8;
    pub const HISTORY: f64 = 1e-8;
    pub const FACTORIZATION: f64 = 1e-8;
    /// Simulated `Pr[0]` against `Σ_j |⟨v_j|ψ₀⟩|² F_M(θ_j)`.
    pub const QPE_KERNEL: f64 = 1e-8;
    pub const TABLE_SPOT: f64 = 1e-12;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub kind: Kind,
    pub config_digest: String,
    pub passed: bool,
    /// Names of the assertions that failed.
    pub failures: Vec<String>,
    pub payload: serde_json::Value,
}

/// Plot-ready table; cells are already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub experiment: String,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub config_digest: String,
    pub records: Vec<ResultRecord>,
    pub tables: Vec<Table>,
    pub timings: Vec<Timing>,
}

impl ResultSet {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    /// `(experiment, assertion)` for every failed assertion.
    pub fn failures(&self) -> Vec<(String, String)> {
        self.records.iter().flat_map(|r| r.failures.iter().map(|f| (r.experiment.clone(), f.clone()))).collect()
    }

    pub fn records_of(&self, kind: Kind) -> impl Iterator<Item = &ResultRecord> {
        self.records.iter().filter(move |r| r.kind == kind)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Collects named assertions for one record.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn require(&mut self, name: &str, ok: bool) {
        if !ok {
            self.0.push(name.to_string());
        }
    }
}

struct Builder<'a> {
    digest: &'a str,
    set: ResultSet,
}

impl Builder<'_> {
    fn push<P: Serialize>(&mut self, kind: Kind, experiment: String, payload: &P, checks: Checks, started: Instant) -> Result<()> {
        self.set.timings.push(Timing { experiment: experiment.clone(), wall_seconds: started.elapsed().as_secs_f64() });
        self.set.records.push(ResultRecord {
            experiment,
            kind,
            config_digest: self.digest.to_string(),
            passed: checks.0.is_empty(),
            failures: checks.0,
            payload: serde_json::to_value(payload)?,
        });
        Ok(())
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultSet> {
    config.validate()?;
    let digest = config.digest();
    let mut b = Builder {
        digest: &digest,
        set: ResultSet { config_digest: digest.clone(), records: Vec::new(), tables: Vec::new(), timings: Vec::new() },
    };
    let tol = config.tolerance()?;
    for kind in config.kind.parts() {
        match kind {
            Kind::GroverWeights => grover_weights(config, &mut b)?,
            Kind::SimpleLoop => simple_loop(config, &tol, &mut b)?,
            Kind::GeneralLoop => general_loop(config, &tol, &mut b)?,
            Kind::BoundsCompare => bounds_compare(config, &mut b)?,
            Kind::FullSuite => unreachable!("parts are single families"),
        }
    }
    Ok(b.set)
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverRecord {
    pub n: usize,
    pub marked: usize,
    pub queries: usize,
    /// `|⟨m|ψ_Q⟩|²`
    pub success_probability: f64,
    /// `max_{t ≤ Q} | |⟨m|(U_π U_f)^t|π⟩|² − sin²((2t+1)a) |`
    pub state_residual: f64,
    pub column_sum_residual: f64,
    pub closed_form_residual: f64,
    pub q_bar: Vec<f64>,
    pub lagrange: LagrangeSum,
    pub lagrange_checked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageCostRecord {
    pub index: usize,
    pub n: usize,
    pub marked: usize,
    pub exp_t: Vec<f64>,
    /// `Σ_{i≠m} E[T_i]/(N−1) + E[T_m]`
    pub reference: f64,
    /// `L_f / reference`
    pub ratio: f64,
    pub cost: AverageQueryCost,
}

fn grover_weights(config: &ExperimentConfig, b: &mut Builder) -> Result<()> {
    let g = &config.grover;
    let mut weights = Table::new("query_weights", &["n", "i", "t", "q"]);
    for &n in &g.n {
        let started = Instant::now();
        let oracle = OracleSpec::unique(n, g.marked)?;
        let table = query_weights(&oracle);
        let state_residual = (0..=table.queries)
            .map(|t| (grover_state(&oracle, t)[g.marked].norm_sqr() - success_probability(n, t)).abs())
            .fold(0.0, f64::max);
        let lagrange = lagrange_cos_sum(n);
        let lagrange_checked = n >= limits::LAGRANGE_MIN_N;
        let rec = GroverRecord {
            n,
            marked: g.marked,
            queries: table.queries,
            success_probability: grover_state(&oracle, table.queries)[g.marked].norm_sqr(),
            state_residual,
            column_sum_residual: table.column_sum_residual(),
            closed_form_residual: table.closed_form_residual.unwrap_or(f64::INFINITY),
            q_bar: table.q_bar.clone(),
            lagrange,
            lagrange_checked,
        };
        let mut c = Checks::default();
        c.require("closed-form-state", rec.state_residual <= limits::CLOSED_FORM);
        c.require("column-sums", rec.column_sum_residual <= limits::COLUMN_SUM);
        c.require("closed-form-weights", rec.closed_form_residual <= limits::CLOSED_FORM);
        if lagrange_checked {
            c.require("lagrange-bound", lagrange.numeric.abs() <= lagrange.bound + limits::LAGRANGE_SLACK);
        }
        for (i, row) in table.q.iter().enumerate() {
            for (t, q) in row.iter().enumerate() {
                weights.rows.push(vec![n.to_string(), i.to_string(), (t + 1).to_string(), f(*q)]);
            }
        }
        b.push(Kind::GroverWeights, format!("grover-weights/n={n}"), &rec, c, started)?;
    }
    b.set.tables.push(weights);

    let mut costs =
        Table::new("average_cost", &["index", "n", "marked", "numeric", "closed_form", "midpoint", "correction", "reference", "ratio"]);
    if g.profiles > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed()?);
        for index in 0..g.profiles {
            let started = Instant::now();
            let n = g.profile_n[index % g.profile_n.len()];
            let marked = rng.random_range(0..n);
            let exp_t: Vec<f64> = (0..n).map(|_| 1.0 + (g.max_cost - 1.0) * rng.random::<f64>().powi(3)).collect();
            let cost = average_query_cost(&OracleSpec::unique(n, marked)?, &CostProfile::deterministic(&exp_t)?)?;
            let rest: f64 = (0..n).filter(|&i| i != marked).map(|i| exp_t[i]).sum::<f64>() / (n - 1) as f64;
            let reference = rest + exp_t[marked];
            let ratio = cost.numeric / reference;
            let mut c = Checks::default();
            let (lo, hi) = limits::THETA_INTERVAL;
            c.require("theta-interval", (lo..=hi).contains(&ratio));
            c.require(
                "closed-form-average",
                (cost.numeric - cost.closed_form).abs() <= limits::AVERAGE_CLOSED_FORM * cost.numeric.max(1.0),
            );
            costs.rows.push(vec![
                index.to_string(),
                n.to_string(),
                marked.to_string(),
                f(cost.numeric),
                f(cost.closed_form),
                f(cost.midpoint),
                f(cost.correction),
                f(reference),
                f(ratio),
            ]);
            let rec = AverageCostRecord { index, n, marked, exp_t, reference, ratio, cost };
            b.push(Kind::GroverWeights, format!("grover-weights/profile={index:03}"), &rec, c, started)?;
        }
    }
    b.set.tables.push(costs);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpeCheck {
    pub bits: u32,
    pub p_zero: f64,
    pub kernel_prediction: f64,
}

fn qpe_bits(c_minus: f64) -> u32 {
    (8.0 * c_minus.sqrt()).log2().ceil() as u32
}

fn qpe_check(instance: &PEInstance, spectrum: &PhaseSpectrum, bits: u32) -> Result<QpeCheck> {
    let out = qpe_simulate(instance, bits)?;
    Ok(QpeCheck { bits, p_zero: out.p_zero(), kernel_prediction: spectrum.kernel_prediction(bits) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleRecord {
    pub n: usize,
    pub marked: Vec<usize>,
    pub mu: f64,
    pub omega: f64,
    pub active_dim: usize,
    pub witness: WitnessReport,
    pub well_formedness: f64,
    pub factorization: FactorizationReport,
    pub c_minus: f64,
    pub c_plus: f64,
    pub decision: Decision,
    pub expected: Verdict,
    pub qpe: QpeCheck,
}

fn expected_verdict(marked: &[usize]) -> Verdict {
    if marked.is_empty() {
        Verdict::Negative
    } else {
        Verdict::Positive
    }
}

fn simple_loop(config: &ExperimentConfig, tol: &TolerancePolicy, b: &mut Builder) -> Result<()> {
    let s = &config.simple;
    let mu = s.mu();
    let mut table = Table::new(
        "simple_loop",
        &[
            "n",
            "marked",
            "omega",
            "norm_sq",
            "predicted_norm_sq",
            "c_plus_effective",
            "c_minus_effective",
            "p0",
            "threshold",
            "verdict",
            "expected",
            "qpe_p_zero",
            "kernel_prediction",
            "factorization",
        ],
    );
    for &n in &s.n {
        let omega = n as f64 / mu;
        // ‖w_A‖² of the negative witness; it does not depend on the marked set.
        let c_minus = 1.0 + 3.0 * omega;
        let c_plus = Regime::Simple.nominal_c_plus();
        for marked in &s.marked_sets {
            let started = Instant::now();
            let oracle = OracleSpec::new(n, marked.clone())?;
            let inst = build_simple_instance(&oracle, omega, tol)?;
            let witness = verify_witnesses(&inst, &simple_witnesses(&oracle, omega)?, tol)?;
            let sp = spectrum(&inst)?;
            let decision = decide_with(&sp, c_minus, c_plus)?;
            let rec = SimpleRecord {
                n,
                marked: oracle.marked().to_vec(),
                mu,
                omega,
                active_dim: inst.active_dim(),
                well_formedness: inst.well_formedness().max(),
                factorization: verify_reflection_factorization(&inst)?,
                c_minus,
                c_plus,
                decision,
                expected: expected_verdict(oracle.marked()),
                qpe: qpe_check(&inst, &sp, qpe_bits(c_minus))?,
                witness,
            };
            let w = &rec.witness;
            let mut c = Checks::default();
            c.require("witness", w.passed);
            c.require("witness-norm", (w.norm_sq - w.predicted_norm_sq).abs() <= limits::SIMPLE_WITNESS);
            c.require("projection", w.residual_a.max(w.residual_b) <= limits::SIMPLE_WITNESS);
            if let Some([re, im]) = w.overlap {
                c.require("overlap", (re - 1.0).abs().max(im.abs()) <= limits::SIMPLE_WITNESS);
            }
            if let Some(d) = w.decomposition_residual {
                c.require("decomposition", d <= limits::SIMPLE_WITNESS);
            }
            if rec.marked.len() as f64 == mu {
                let cp = w.c_plus_effective.unwrap_or(f64::NAN);
                c.require("c-plus", (cp - c_plus).abs() <= limits::SIMPLE_WITNESS);
            }
            c.require("well-formed", rec.well_formedness <= tol.assert_tol);
            c.require("factorization", rec.factorization.max() <= limits::FACTORIZATION);
            c.require("verdict", rec.decision.verdict == rec.expected);
            c.require("qpe-kernel", (rec.qpe.p_zero - rec.qpe.kernel_prediction).abs() <= limits::QPE_KERNEL);
            let label = marked_label(&rec.marked);
            table.rows.push(vec![
                n.to_string(),
                label.clone(),
                f(omega),
                f(w.norm_sq),
                f(w.predicted_norm_sq),
                opt(w.c_plus_effective),
                opt(w.c_minus_effective),
                f(rec.decision.p0),
                f(rec.decision.threshold),
                verdict_name(rec.decision.verdict).into(),
                verdict_name(rec.expected).into(),
                f(rec.qpe.p_zero),
                f(rec.qpe.kernel_prediction),
                f(rec.factorization.max()),
            ]);
            b.push(Kind::SimpleLoop, format!("simple-loop/n={n}/marked={label}"), &rec, c, started)?;
        }
    }
    b.set.tables.push(table);
    Ok(())
}

fn marked_label(m: &[usize]) -> String {
    m.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("+")
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Positive => "positive",
        Verdict::Negative => "negative",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralRecord {
    pub instance: usize,
    pub subroutine_seed: u64,
    pub n: usize,
    pub steps: usize,
    pub workspace: usize,
    pub regime: Regime,
    pub marked: Vec<usize>,
    pub mu: f64,
    pub k: Option<f64>,
    pub active_dim: [usize; 2],
    /// Instance built from the subroutine as drawn.
    pub witness: WitnessReport,
    /// Same draw with every output forced to 0.
    pub negative: WitnessReport,
    pub history: HistoryReport,
    pub factorization: [FactorizationReport; 2],
    pub c_plus_nominal: f64,
    pub c_minus: f64,
    pub decision: Decision,
    pub expected: Verdict,
    pub negative_decision: Decision,
    pub qpe: Option<[QpeCheck; 2]>,
}

impl GeneralRecord {
    /// `c₊` of the positive witness, when the drawn subroutine marks something.
    pub fn c_plus_effective(&self) -> Option<f64> {
        self.witness.c_plus_effective
    }
}

/// `k` as the regime reads it: `Σ_{j∈M} g(j)`, or the cheapest single
/// element when nothing is marked.
fn promise_k(regime: Regime, moments: &[Moments], marked: &[usize]) -> Option<f64> {
    let g = |j: usize| -> f64 {
        let m = moments[j];
        match regime {
            Regime::IB => 1.0 / (m.mean * m.mean),
            Regime::IIB => 1.0 / m.mean,
            _ => 1.0 / m.second,
        }
    };
    if !matches!(regime, Regime::IB | Regime::IIB | Regime::IIC) {
        return None;
    }
    Some(if marked.is_empty() {
        (0..moments.len()).map(g).fold(f64::INFINITY, f64::min)
    } else {
        marked.iter().map(|&j| g(j)).sum()
    })
}

fn general_loop(config: &ExperimentConfig, tol: &TolerancePolicy, b: &mut Builder) -> Result<()> {
    let g = &config.general;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed()?);
    let mut table = Table::new(
        "general_loop",
        &[
            "instance",
            "n",
            "steps",
            "workspace",
            "regime",
            "marked",
            "c_plus_effective",
            "c_plus_nominal",
            "c_minus",
            "p0",
            "p0_negative",
            "threshold",
            "verdict",
            "expected",
            "verdict_negative",
            "history",
            "factorization",
        ],
    );
    for instance in 0..g.instances {
        let n = g.n[rng.random_range(0..g.n.len())];
        let steps = g.steps[rng.random_range(0..g.steps.len())];
        let workspace = g.workspace[rng.random_range(0..g.workspace.len())];
        let subroutine_seed: u64 = rng.random();
        let params = RandomSubroutineParams::new(n, steps, workspace).real(g.real);
        let drawn = random_subroutine(subroutine_seed, &params)?;
        let silent = random_subroutine(subroutine_seed, &params.clone().with_outputs(vec![false; n]))?;
        let moments = |spec: &vtslab_core::vts::SubroutineSpec| -> Result<Vec<Moments>> {
            (0..n).map(|j| Ok(profile_moments(&stopping_profile(spec, j)?))).collect()
        };
        let (m_drawn, m_silent) = (moments(&drawn)?, moments(&silent)?);
        let marked = drawn.marked();
        let mu = marked.len().max(1) as f64;
        for &regime in &g.regimes {
            let started = Instant::now();
            let k = promise_k(regime, &m_drawn, &marked);
            let build = |spec, ms: &[Moments], marked: &[usize]| -> Result<PEInstance> {
                let inputs = RegimeInputs { n, steps, moments: ms, marked, mu: Some(mu), k };
                Ok(build_general_instance(spec, &regime_parameters(regime, &inputs)?, tol)?)
            };
            let pos = build(&drawn, &m_drawn, &marked)?;
            let neg = build(&silent, &m_silent, &[])?;
            let witness = verify_witnesses(&pos, &general_witness(&pos)?, tol)?;
            let negative = verify_witnesses(&neg, &general_witness(&neg)?, tol)?;
            let (h_pos, h_neg) = (history_report(&pos)?, history_report(&neg)?);
            let history = if h_pos.max() >= h_neg.max() { h_pos } else { h_neg };
            let c_minus = negative.c_minus_effective.unwrap_or(1.0).max(1.0);
            let c_plus_nominal = regime.nominal_c_plus();
            let (sp_pos, sp_neg) = (spectrum(&pos)?, spectrum(&neg)?);
            let bits = qpe_bits(c_minus);
            let qpe = if g.qpe { Some([qpe_check(&pos, &sp_pos, bits)?, qpe_check(&neg, &sp_neg, bits)?]) } else { None };
            let rec = GeneralRecord {
                instance,
                subroutine_seed,
                n,
                steps,
                workspace,
                regime,
                marked: marked.clone(),
                mu,
                k,
                active_dim: [pos.active_dim(), neg.active_dim()],
                history,
                factorization: [verify_reflection_factorization(&pos)?, verify_reflection_factorization(&neg)?],
                c_plus_nominal,
                c_minus,
                decision: decide_with(&sp_pos, c_minus, c_plus_nominal)?,
                expected: expected_verdict(&marked),
                negative_decision: decide_with(&sp_neg, c_minus, c_plus_nominal)?,
                qpe,
                witness,
                negative,
            };
            let mut c = Checks::default();
            c.require("history", rec.history.max() <= limits::HISTORY);
            for (name, w) in [("witness", &rec.witness), ("negative-witness", &rec.negative)] {
                c.require(name, w.passed);
                c.require(&format!("{name}-norm"), (w.norm_sq - w.predicted_norm_sq).abs() <= limits::GENERAL_WITNESS);
            }
            if let Some(cp) = rec.c_plus_effective() {
                c.require("c-plus", cp <= c_plus_nominal + limits::GENERAL_WITNESS);
            }
            c.require("factorization", rec.factorization.iter().all(|r| r.max() <= limits::FACTORIZATION));
            c.require("verdict", rec.decision.verdict == rec.expected);
            c.require("verdict-negative", rec.negative_decision.verdict == Verdict::Negative);
            if let Some(q) = &rec.qpe {
                c.require("qpe-kernel", q.iter().all(|x| (x.p_zero - x.kernel_prediction).abs() <= limits::QPE_KERNEL));
            }
            table.rows.push(vec![
                instance.to_string(),
                n.to_string(),
                steps.to_string(),
                workspace.to_string(),
                regime.name().into(),
                marked_label(&marked),
                opt(rec.c_plus_effective()),
                f(c_plus_nominal),
                f(c_minus),
                f(rec.decision.p0),
                f(rec.negative_decision.p0),
                f(rec.decision.threshold),
                verdict_name(rec.decision.verdict).into(),
                verdict_name(rec.expected).into(),
                verdict_name(rec.negative_decision.verdict).into(),
                f(rec.history.max()),
                f(rec.factorization[0].max().max(rec.factorization[1].max())),
            ]);
            b.push(Kind::GeneralLoop, format!("general-loop/instance={instance:03}/{}", regime.name()), &rec, c, started)?;
        }
    }
    b.set.tables.push(table);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSpotRecord {
    pub table: CompareTable,
    /// `|ℓ₂ − √30|, |ℓ₁ − √40|, |ℓ₀ − 8|, |straight_line − 13|`
    pub errors: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub index: usize,
    pub n: usize,
    pub t_max: usize,
    pub report: CostReport,
    pub table: CompareTable,
}

/// A pmf on `{1..t_max}` with random support.
fn random_profile(rng: &mut ChaCha8Rng, t_max: usize) -> Result<StoppingProfile> {
    let mut pmf = vec![0.0; t_max + 1];
    for p in pmf.iter_mut().skip(1) {
        if rng.random::<f64>() < 0.6 {
            *p = rng.random::<f64>();
        }
    }
    pmf[rng.random_range(1..=t_max)] += 0.05;
    let total: f64 = pmf.iter().sum();
    Ok(StoppingProfile::from_pmf(pmf.into_iter().map(|p| p / total).collect())?)
}

pub const BOUND_COLUMNS: [&str; 10] = [
    "naive",
    "l2",
    "l1",
    "l0",
    "straight_line",
    "regime_i_a",
    "regime_i_b",
    "regime_ii_a",
    "regime_ii_b",
    "regime_ii_c",
];

fn bounds_compare(config: &ExperimentConfig, b: &mut Builder) -> Result<()> {
    let cfg = &config.bounds;
    let started = Instant::now();
    let staircase = CostProfile::deterministic(&[1.0, 2.0, 3.0, 4.0])?;
    let spot = compare_table(&staircase, &PromiseDescriptor::unique_marked(4.0))?;
    let errors =
        [(spot.l2 - 30f64.sqrt()).abs(), (spot.l1 - 40f64.sqrt()).abs(), (spot.l0 - 8.0).abs(), (spot.straight_line - 13.0).abs()];
    let mut c = Checks::default();
    c.require("table-spot", errors.iter().all(|&e| e <= limits::TABLE_SPOT));
    b.push(Kind::BoundsCompare, "bounds-compare/table-spot".into(), &TableSpotRecord { table: spot, errors }, c, started)?;

    let mut columns = vec!["index", "n", "t_max"];
    columns.extend(BOUND_COLUMNS);
    columns.extend(["ordering_holds", "am_gm_holds"]);
    let mut table = Table::new("bounds", &columns);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed()?);
    for index in 0..cfg.profiles {
        let started = Instant::now();
        let n = cfg.n[index % cfg.n.len()];
        let t_max = rng.random_range(1..=cfg.t_max);
        let profiles = (0..n).map(|_| random_profile(&mut rng, t_max)).collect::<Result<Vec<_>>>()?;
        let profile = CostProfile::from_profiles(&profiles)?;
        let promise = PromiseDescriptor::unique_marked(t_max as f64);
        let rec = BoundsRecord { index, n, t_max, report: cost_report(&profile, &promise)?, table: compare_table(&profile, &promise)? };
        let mut c = Checks::default();
        c.require("ordering", rec.table.ordering_holds);
        c.require("am-gm", rec.table.am_gm_holds);
        let mut row = vec![index.to_string(), n.to_string(), t_max.to_string()];
        row.extend(vtslab_core::bounds::BoundKind::ALL.iter().map(|&k| opt(rec.report.get(k))));
        row.extend([rec.table.ordering_holds.to_string(), rec.table.am_gm_holds.to_string()]);
        table.rows.push(row);
        b.push(Kind::BoundsCompare, format!("bounds-compare/profile={index:03}"), &rec, c, started)?;
    }
    b.set.tables.push(table);
    Ok(())
}
