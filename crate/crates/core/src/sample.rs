//! Random linear objectives over the polytopes: which vertex wins, and how
//! large is its support.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng as _;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::array::{Array, Kind, PolytopeSpec, Rational};
use crate::certify::{constraint_rank, is_vertex_graph, is_vertex_rank, VertexCertificate};
use crate::error::{Error, Result};
use crate::json::rational_to_string;
use crate::rng;
use crate::simplex::LpSolver;

/// Denominator of the rationalized Gaussian coefficients.
pub const OBJECTIVE_DENOMINATOR: u64 = 1 << 32;

pub const CAVEAT: &str = "optima of random Gaussian objectives are not uniformly distributed over the vertices";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    pub coefficients: Vec<Rational>,
    pub seed: u64,
}

/// Standard normal coefficients by Box-Muller, rounded to multiples of `2^-32`.
pub fn gaussian_objective(spec: &PolytopeSpec, seed: u64) -> Objective {
    let mut rng = rng::seeded(seed);
    let cells = spec.cell_count();
    let mut draws = Vec::with_capacity(cells + 1);
    while draws.len() < cells {
        // u1 in (0, 1] keeps the log finite
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        draws.push(r * theta.cos());
        draws.push(r * theta.sin());
    }
    draws.truncate(cells);
    let denom = num_bigint::BigInt::from(OBJECTIVE_DENOMINATOR);
    let coefficients = draws
        .into_iter()
        .map(|z| {
            let scaled = (z * OBJECTIVE_DENOMINATOR as f64).round() as i64;
            Rational::new(scaled.into(), denom.clone())
        })
        .collect();
    Objective { coefficients, seed }
}

/// Optimal vertex for `c`, with a rank-test certificate.
pub fn maximize(spec: &PolytopeSpec, c: &Objective) -> Result<(Array, VertexCertificate)> {
    maximize_with(&LpSolver::new(*spec)?, c).map(|(a, cert, _)| (a, cert))
}

fn maximize_with(lp: &LpSolver, c: &Objective) -> Result<(Array, VertexCertificate, Rational)> {
    let spec = lp.spec();
    let sol = lp.maximize(&c.coefficients)?;
    let cert = is_vertex_rank(&sol.point, spec)?;
    if !cert.is_vertex {
        return Err(Error::ConstructionFailed("simplex optimum failed the rank test".into()));
    }
    if sol.point.dot(&c.coefficients) != sol.value {
        return Err(Error::ConstructionFailed("objective value mismatch".into()));
    }
    Ok((sol.point, cert, sol.value))
}

/// `n^(d+1) - (n-1)^(d+1)`, the support bound for vertices of `Omega`.
pub fn support_bound(spec: &PolytopeSpec) -> Result<u64> {
    if spec.kind != Kind::Omega {
        return Err(Error::InvalidParameter("support bound is stated for omega only".into()));
    }
    let e = spec.d as u32 + 1;
    Ok((spec.n as u64).pow(e) - (spec.n as u64 - 1).pow(e))
}

/// Largest support a vertex may have: [`support_bound`] for `Omega`, the
/// constraint rank for `Sigma`.
fn support_limit(spec: &PolytopeSpec) -> Result<u64> {
    match spec.kind {
        Kind::Omega => support_bound(spec),
        Kind::Sigma => Ok(constraint_rank(spec) as u64),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub support: usize,
    pub alpha: f64,
    pub value: Rational,
    /// Graph criterion verdict equals the rank verdict; `None` when the
    /// optimum is not of the two-halves-or-single-one shape.
    pub graph_agrees: Option<bool>,
    pub is_zero_one: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleReport {
    pub spec: PolytopeSpec,
    pub seed: u64,
    pub trials: Vec<Trial>,
    pub support_limit: u64,
    pub mean_alpha: f64,
    pub min_alpha: f64,
    pub max_alpha: f64,
    pub bound_violations: usize,
}

impl SampleReport {
    pub fn to_json(&self) -> Value {
        json!({
            "spec": {"kind": self.spec.kind, "n": self.spec.n, "d": self.spec.d},
            "trials": self.trials.len(),
            "support_limit": self.support_limit,
            "per_trial": self.trials.iter().map(|t| json!({
                "trial": t.index,
                "seed": t.seed,
                "support": t.support,
                "alpha": t.alpha,
                "value": rational_to_string(&t.value),
                "zero_one": t.is_zero_one,
                "graph_agrees": t.graph_agrees,
            })).collect::<Vec<_>>(),
            "aggregate": {
                "mean_alpha": self.mean_alpha,
                "min": self.min_alpha,
                "max": self.max_alpha,
                "bound_violations": self.bound_violations,
            },
            "caveat": CAVEAT,
        })
    }
}

/// Maximizes `trials` Gaussian objectives (seeds `seed + t`), certifies each
/// optimum and collects support statistics. Fails if any optimum breaks the
/// support bound.
pub fn run_experiment(spec: &PolytopeSpec, trials: usize, seed: u64) -> Result<SampleReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let lp = LpSolver::new(*spec)?;
    let limit = support_limit(spec)?;
    let n2 = (spec.n * spec.n) as f64;
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let trial_seed = seed.wrapping_add(index as u64);
            let objective = gaussian_objective(spec, trial_seed);
            let (point, cert, value) = maximize_with(&lp, &objective)?;
            let graph_agrees = is_vertex_graph(&point, spec).ok().map(|g| g.is_vertex == cert.is_vertex);
            let support = point.support_indices().len();
            Ok(Trial {
                index,
                seed: trial_seed,
                support,
                alpha: support as f64 / n2,
                value,
                graph_agrees,
                is_zero_one: point.is_zero_one(),
            })
        })
        .collect::<Result<_>>()?;
    let alphas: Vec<f64> = results.iter().map(|t| t.alpha).collect();
    let bound_violations = results.iter().filter(|t| t.support as u64 > limit).count();
    let report = SampleReport {
        spec: *spec,
        seed,
        support_limit: limit,
        mean_alpha: alphas.iter().sum::<f64>() / alphas.len() as f64,
        min_alpha: alphas.iter().copied().fold(f64::INFINITY, f64::min),
        max_alpha: alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        bound_violations,
        trials: results,
    };
    if bound_violations > 0 {
        return Err(Error::ConstructionFailed(format!(
            "{bound_violations} optima exceed the support bound {limit}"
        )));
    }
    Ok(report)
}

/// Log-scale upper bounds on the number of vertices of `Omega_n^(d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexCountBound {
    /// `ln C(n^(d+1), k)` with `k = min((d+1) n^d, n^(d+1))`.
    pub log_binomial: f64,
    /// `ln` of the number of subsets of size at most `k`.
    pub log_supports_up_to: f64,
    /// `(d+1) n^d ln(n e / (d+1))`.
    pub log_relaxation: f64,
    /// `3 n^2 ln n`, stated for `d = 2` only.
    pub log_n_pow_3n2: Option<f64>,
}

impl VertexCountBound {
    pub fn to_json(&self) -> Value {
        json!({
            "log_binomial": self.log_binomial,
            "log_supports_up_to": self.log_supports_up_to,
            "log_relaxation": self.log_relaxation,
            "log_n_pow_3n2": self.log_n_pow_3n2,
        })
    }
}

pub fn vertex_count_upper_bound(n: usize, d: usize) -> Result<VertexCountBound> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and d >= 1, got n = {n}, d = {d}")));
    }
    let big_n = n.checked_pow(d as u32 + 1).ok_or_else(|| Error::TooLarge("n^(d+1) overflows".into()))?;
    let k = (d + 1) * n.pow(d as u32);
    let k_eff = k.min(big_n);
    let mut binom = BigUint::one();
    let mut cumulative = BigUint::one();
    for s in 1..=k_eff {
        binom = binom * BigUint::from(big_n - s + 1) / BigUint::from(s);
        cumulative += &binom;
    }
    let nf = n as f64;
    let df = (d + 1) as f64;
    Ok(VertexCountBound {
        log_binomial: ln_biguint(&binom),
        log_supports_up_to: ln_biguint(&cumulative),
        log_relaxation: k as f64 * (nf * std::f64::consts::E / df).ln(),
        log_n_pow_3n2: (d == 2).then(|| 3.0 * nf * nf * nf.ln()),
    })
}

fn ln_biguint(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let shift = v.bits().saturating_sub(53);
    (v >> shift).to_f64().unwrap_or(0.0).ln() + shift as f64 * std::f64::consts::LN_2
}
