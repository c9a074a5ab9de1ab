//! Pass/fail checks of the exact identities and the Gamma-integral structure.
//!
//! Every check works on an [`Instance`], which holds the matrices under test.
//! Instances built from a chain are correct by construction; the `corrupt`
//! helpers exist so tests can prove that each check is able to fail.

mod exact;
mod oracles;
mod theorems;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::chain::{ChainDescriptor, Rational};
use crate::error::{Error, Result};
use crate::forms::{euler_matrix, grading_matrix, pairing_matrix};
use crate::matrix::RationalMatrix;
use crate::numerics::{format_residual, PrecComplexMatrix, PrecContext};

pub use exact::verify_exact_suite;
pub use oracles::verify_gamma_oracles;
pub use theorems::{
    ch_gamma_closed_form, verify_d3_relations, verify_theorem_identity_1,
    verify_theorem_identity_2,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    /// Max-abs residual for numerical checks; `None` for exact ones.
    pub residual: Option<String>,
    pub tolerance: Option<String>,
    pub detail: Option<String>,
    pub wall_ms: f64,
}

impl CheckResult {
    pub fn exact(name: &str, ok: bool, detail: Option<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            tolerance: None,
            detail,
            wall_ms: 0.0,
        }
    }

    pub fn numeric(name: &str, residual: &Float, tolerance: &Float) -> Self {
        let ok = residual.is_finite() && residual <= tolerance;
        CheckResult {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: Some(format_residual(residual)),
            tolerance: Some(format_residual(tolerance)),
            detail: None,
            wall_ms: 0.0,
        }
    }

    pub fn numeric_f64(name: &str, residual: f64, tolerance: f64) -> Self {
        let ok = residual.is_finite() && residual <= tolerance;
        CheckResult {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: Some(format!("{residual:.3e}")),
            tolerance: Some(format!("{tolerance:.3e}")),
            detail: None,
            wall_ms: 0.0,
        }
    }

    pub fn skipped(name: &str, why: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            status: Status::Skipped,
            residual: None,
            tolerance: None,
            detail: Some(why.to_string()),
            wall_ms: 0.0,
        }
    }

    pub fn failed(name: &str, err: &Error) -> Self {
        CheckResult {
            name: name.to_string(),
            status: Status::Fail,
            residual: None,
            tolerance: None,
            detail: Some(err.to_string()),
            wall_ms: 0.0,
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Thm1,
    Thm2,
    Exact,
    Gamma,
    D3,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "thm1" => Ok(Suite::Thm1),
            "thm2" => Ok(Suite::Thm2),
            "exact" => Ok(Suite::Exact),
            "gamma" => Ok(Suite::Gamma),
            "d3" => Ok(Suite::D3),
            _ => Err(Error::InvalidArgument(format!("unknown suite '{s}'"))),
        }
    }
}

/// The data a verification run operates on.
#[derive(Debug, Clone)]
pub struct Instance {
    pub chain: ChainDescriptor,
    pub eta: RationalMatrix,
    pub qtilde: RationalMatrix,
    pub chi: RationalMatrix,
    ch_gamma: Option<PrecComplexMatrix>,
}

/// Which matrix a fault-injection fixture perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Eta,
    Chi,
    ChGamma,
}

impl Instance {
    pub fn new(c: &ChainDescriptor) -> Result<Self> {
        Ok(Instance {
            chain: c.clone(),
            eta: pairing_matrix(c)?,
            qtilde: grading_matrix(c)?,
            chi: euler_matrix(c)?,
            ch_gamma: None,
        })
    }

    /// `ch_Γ` at the precision of `ctx`, computed on first use.
    pub fn ch_gamma(&self, ctx: &PrecContext) -> Result<PrecComplexMatrix> {
        match &self.ch_gamma {
            Some(m) if m.digits() == ctx.digits() => Ok(m.clone()),
            _ => crate::numerics::ch_gamma_matrix_unchecked(&self.chain, ctx),
        }
    }

    pub fn prepare(&mut self, ctx: &PrecContext) -> Result<()> {
        let m = self.ch_gamma(ctx)?;
        self.ch_gamma = Some(m);
        Ok(())
    }

    /// Adds `10^{-exp10}` to entry `(i, j)` of the chosen matrix.
    pub fn corrupt(&mut self, target: Target, i: usize, j: usize, exp10: u32, ctx: &PrecContext) -> Result<()> {
        let eps = Rational::new(1.into(), num_bigint::BigInt::from(10u32).pow(exp10));
        match target {
            Target::Eta => {
                let v = self.eta.get(i, j) + &eps;
                self.eta.set(i, j, v);
            }
            Target::Chi => {
                let v = self.chi.get(i, j) + &eps;
                self.chi.set(i, j, v);
            }
            Target::ChGamma => {
                self.prepare(ctx)?;
                let m = self.ch_gamma.as_mut().expect("prepared");
                *m.get_mut(i, j) += ctx.rational(&eps);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub chain: Vec<u64>,
    pub mu: u64,
    pub digits: u32,
    pub suite: Suite,
    pub status: Status,
    pub checks: Vec<CheckResult>,
    pub wall_ms: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_table(&self) -> String {
        let mut rows = vec![[
            "check".to_string(),
            "status".to_string(),
            "residual".to_string(),
            "tolerance".to_string(),
            "ms".to_string(),
        ]];
        for c in &self.checks {
            rows.push([
                c.name.clone(),
                c.status.to_string(),
                c.residual.clone().unwrap_or_else(|| "exact".to_string()),
                c.tolerance.clone().unwrap_or_default(),
                format!("{:.1}", c.wall_ms),
            ]);
        }
        let mut widths = [0usize; 5];
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let chain: Vec<String> = self.chain.iter().map(|a| a.to_string()).collect();
        let mut out = format!(
            "chain [{}]  mu={}  digits={}  overall={}\n",
            chain.join(","),
            self.mu,
            self.digits,
            self.status
        );
        for r in rows {
            let cells: Vec<String> = r
                .iter()
                .zip(widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        for c in &self.checks {
            if let Some(d) = &c.detail {
                if c.status != Status::Pass {
                    out.push_str(&format!("  {}: {}\n", c.name, d));
                }
            }
        }
        out
    }
}

type Job<'a> = Box<dyn Fn() -> Vec<CheckResult> + Send + Sync + 'a>;

fn timed<F: Fn() -> Vec<CheckResult>>(f: F) -> Vec<CheckResult> {
    let start = Instant::now();
    let mut out = f();
    let ms = start.elapsed().as_secs_f64() * 1e3 / out.len().max(1) as f64;
    for c in &mut out {
        c.wall_ms = ms;
    }
    out
}

fn residual_check(name: &str, r: Result<Float>, ctx: &PrecContext) -> CheckResult {
    match r {
        Ok(res) => CheckResult::numeric(name, &res, &ctx.tolerance()),
        Err(e) => CheckResult::failed(name, &e),
    }
}

/// Runs `suite` on `instance`; checks run concurrently, the report order is fixed.
pub fn run_instance(instance: &Instance, ctx: &PrecContext, suite: Suite) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut inst = instance.clone();
    if matches!(suite, Suite::All | Suite::Thm1 | Suite::Thm2) {
        // ch_Γ is shared by both theorem checks; a failure is reported per check below
        let _ = inst.prepare(ctx);
    }
    let inst = &inst;
    let mut jobs: Vec<Job> = Vec::new();
    if matches!(suite, Suite::All | Suite::Thm1) {
        jobs.push(Box::new(move || {
            vec![residual_check("theorem_identity_1", theorems::identity_1(inst, ctx), ctx)]
        }));
    }
    if matches!(suite, Suite::All | Suite::Thm2) {
        jobs.push(Box::new(move || {
            vec![residual_check("theorem_identity_2", theorems::identity_2(inst, ctx), ctx)]
        }));
    }
    if matches!(suite, Suite::All | Suite::D3) {
        jobs.push(Box::new(move || match theorems::d3(inst, ctx) {
            Ok((r1, r2)) => vec![
                CheckResult::numeric("d3_relation_1", &r1, &ctx.tolerance()),
                CheckResult::numeric("d3_relation_2", &r2, &ctx.tolerance()),
            ],
            Err(e) => vec![
                CheckResult::failed("d3_relation_1", &e),
                CheckResult::failed("d3_relation_2", &e),
            ],
        }));
    }
    if matches!(suite, Suite::All | Suite::Exact) {
        jobs.push(Box::new(move || exact::run(inst)));
    }
    if matches!(suite, Suite::All | Suite::Gamma) {
        for job in oracles::jobs(inst, ctx) {
            jobs.push(job);
        }
    }
    let checks: Vec<CheckResult> = jobs
        .par_iter()
        .map(|job| timed(job))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let status = if checks.iter().all(CheckResult::passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        chain: instance.chain.exponents().to_vec(),
        mu: instance.chain.mu(),
        digits: ctx.digits(),
        suite,
        status,
        checks,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Full verification of the chain `c`.
pub fn run_suite(c: &ChainDescriptor, ctx: &PrecContext) -> Result<VerificationReport> {
    run_instance(&Instance::new(c)?, ctx, Suite::All)
}

pub fn run_named_suite(c: &ChainDescriptor, ctx: &PrecContext, suite: Suite) -> Result<VerificationReport> {
    run_instance(&Instance::new(c)?, ctx, suite)
}

/// All chains with `n ≤ max_n`, `a_i ∈ alphabet` and `μ̃ ≤ max_mu`, shortest first.
pub fn corpus(max_n: usize, alphabet: &[i64], max_mu: u64) -> Vec<ChainDescriptor> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..max_n {
        let mut next = Vec::new();
        for prefix in &layer {
            for &a in alphabet {
                let mut v = prefix.clone();
                v.push(a);
                next.push(v);
            }
        }
        for v in &next {
            if let Ok(c) = crate::chain::new_chain(v) {
                if c.mu() <= max_mu {
                    out.push(c);
                }
            }
        }
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::new_chain;

    #[test]
    fn corpus_shape() {
        let all = corpus(4, &[2, 3, 4], 120);
        assert!(all.iter().all(|c| c.n() <= 4 && c.mu() <= 120));
        assert_eq!(all.iter().filter(|c| c.n() == 1).count(), 3);
        assert_eq!(all.iter().filter(|c| c.n() == 2).count(), 9);
        assert!(all.iter().any(|c| c.n() == 4));
    }

    #[test]
    fn suite_names() {
        assert_eq!("d3".parse::<Suite>().unwrap(), Suite::D3);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_chains_pass_everything() {
        let ctx = PrecContext::new(48).unwrap();
        for a in [vec![2], vec![3], vec![2, 2], vec![3, 2], vec![2, 2, 2]] {
            let c = new_chain(&a).unwrap();
            let r = run_suite(&c, &ctx).unwrap();
            assert!(r.passed(), "{a:?}\n{}", r.to_table());
        }
    }

    #[test]
    fn report_order_is_deterministic() {
        let ctx = PrecContext::new(40).unwrap();
        let c = new_chain(&[3, 2]).unwrap();
        let names = |r: &VerificationReport| r.checks.iter().map(|c| c.name.clone()).collect::<Vec<_>>();
        let a = run_suite(&c, &ctx).unwrap();
        let b = run_suite(&c, &ctx).unwrap();
        assert_eq!(names(&a), names(&b));
        assert_eq!(a.checks[0].name, "theorem_identity_1");
        let exact_a: Vec<_> = a.checks.iter().filter(|c| c.residual.is_none()).map(|c| (&c.name, c.status)).collect();
        let exact_b: Vec<_> = b.checks.iter().filter(|c| c.residual.is_none()).map(|c| (&c.name, c.status)).collect();
        assert_eq!(exact_a, exact_b);
    }

    #[test]
    fn corrupted_eta_fails() {
        let ctx = PrecContext::new(64).unwrap();
        let c = new_chain(&[3, 2]).unwrap();
        let mut inst = Instance::new(&c).unwrap();
        inst.corrupt(Target::Eta, 0, 0, 40, &ctx).unwrap();
        let r = run_instance(&inst, &ctx, Suite::All).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.failures().iter().any(|f| f.name == "theorem_identity_2"));
    }

    #[test]
    fn corrupted_chi_fails_exact_suite() {
        let ctx = PrecContext::new(64).unwrap();
        let c = new_chain(&[2, 2]).unwrap();
        let mut inst = Instance::new(&c).unwrap();
        inst.corrupt(Target::Chi, 0, 2, 40, &ctx).unwrap();
        let r = run_instance(&inst, &ctx, Suite::Exact).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.failures().iter().any(|f| f.name == "chi_equals_x"));
    }
}
