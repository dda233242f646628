//! End-to-end runs: configuration, staged computation over the family,
//! flat-file artifacts with a checksummed manifest, and the summary table.

use crate::approx::{solve_h_k, ApproxOptions};
use crate::bvp::{self, BvpReport};
use crate::characters::{build_family, Character};
use crate::coefficients::{default_cap_f, dirichlet_convolve_int, lambda_prime_power, nu_table, upsilon_table, lambda_tables};
use crate::error::{Error, Result};
use crate::functional::{error_functionals, phi, u_pm, IntervalFunction, PhiData, XiEngine};
use crate::lfunc::{delta1, fe_residual, varsigma, vartheta, KernelParams};
use crate::mollifier::{floor_guarded, membership_diagnostics, upsilon_functional, GridSpec, MembershipReport, MollifierContext, Sign};
use crate::numeric::{arith, c, C64};
use crate::params::{AnalysisParams, ParamOverrides};
use crate::sieve_means::{e_mean, sieve_check, zero_anchored_mean, AnchoredZeros, EMeanReport, SieveReport, ZeroMeanReport};
use crate::zeros::{auto_step, gap_statistics, scan_zero_set, shifted_zero_set, GapStatistics, ZeroSet, ZeroSource};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "SIEGEL_WORKERS";
pub const PRECISION_ENV: &str = "SIEGEL_PRECISION";
pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    #[default]
    Standard,
    /// Doubles the membership grid and halves the zero-scan step.
    High,
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "" => Ok(Precision::Standard),
            "high" => Ok(Precision::High),
            other => Err(Error::Config(format!("unknown precision mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub functional_equation: f64,
    pub delta1: f64,
    pub lambda: f64,
    pub kernel: f64,
    pub phi_decomposition: f64,
    pub u_pm: f64,
    pub bvp_boundary: f64,
    pub bvp_inner: f64,
    pub bvp_ode: f64,
    pub approx_identity: f64,
    pub approx_orthogonality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            functional_equation: 1e-9,
            delta1: 1e-9,
            lambda: 1e-12,
            kernel: 1e-12,
            phi_decomposition: 1e-12,
            u_pm: 1e-10,
            bvp_boundary: 1e-10,
            bvp_inner: 1e-6,
            bvp_ode: 1e-6,
            approx_identity: 1e-10,
            approx_orthogonality: 1e-8,
        }
    }
}

fn default_window() -> (f64, f64) {
    (0.0, 30.0)
}
fn default_anchors() -> usize {
    2
}
fn default_output() -> PathBuf {
    PathBuf::from("siegel-run")
}
fn default_seed() -> u64 {
    1
}
fn default_trials() -> usize {
    10
}
fn default_grid() -> GridSpec {
    GridSpec { n_re: 16, n_im: 16 }
}

/// A run, read from a TOML file. `output` and `workers` affect where and how
/// the run executes, not what it computes, and are left out of config.json.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// |D|; mapped to the fundamental discriminant of that magnitude.
    pub d: i64,
    /// Family scale Q.
    pub q: u64,
    #[serde(default = "default_window")]
    pub window: (f64, f64),
    #[serde(default)]
    pub cap_f: Option<usize>,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default)]
    pub zero_step: Option<f64>,
    /// Process only the first N family members (in enumeration order).
    #[serde(default)]
    pub max_characters: Option<usize>,
    /// Anchors per character for the functional stages.
    #[serde(default = "default_anchors")]
    pub max_anchors: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_output", skip_serializing)]
    pub output: PathBuf,
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub sieve_trials: usize,
    #[serde(default)]
    pub precision: Option<Precision>,
}

impl RunConfig {
    pub fn minimal(d: i64, q: u64, window: (f64, f64)) -> Self {
        RunConfig {
            d,
            q,
            window,
            cap_f: None,
            params: ParamOverrides::default(),
            grid: default_grid(),
            zero_step: None,
            max_characters: None,
            max_anchors: default_anchors(),
            tolerances: Tolerances::default(),
            output: default_output(),
            workers: None,
            seed: default_seed(),
            sieve_trials: default_trials(),
            precision: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// Config value, then the environment, then the machine's parallelism.
    pub fn resolved_workers(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w.max(1));
        }
        match std::env::var(WORKERS_ENV) {
            Ok(v) => v.trim().parse::<usize>().map(|w| w.max(1)).map_err(|_| Error::Config(format!("{WORKERS_ENV}={v:?} is not a count"))),
            Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
        }
    }

    pub fn resolved_precision(&self) -> Result<Precision> {
        if let Some(p) = self.precision {
            return Ok(p);
        }
        match std::env::var(PRECISION_ENV) {
            Ok(v) => v.parse(),
            Err(_) => Ok(Precision::Standard),
        }
    }

    /// Parameters plus the cross-constraints (α = 1/log Q, εR ∈ 2πℤ, δ₁ > δ).
    pub fn analysis_params(&self) -> Result<AnalysisParams> {
        if self.window.1 < self.window.0 {
            return Err(Error::Config("window upper end below lower end".into()));
        }
        let p = AnalysisParams::new(self.d.unsigned_abs() as f64, self.q as f64, &self.params)?;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRow {
    pub stage: String,
    pub name: String,
    /// Which identity or bound the number instantiates.
    pub tag: String,
    pub value: f64,
    pub tolerance: f64,
    /// Asserted identities pass or fail; diagnostics are reported only.
    pub asserted: bool,
    pub pass: bool,
}

fn row(stage: &str, name: &str, tag: &str, value: f64, tolerance: f64) -> IdentityRow {
    IdentityRow { stage: stage.into(), name: name.into(), tag: tag.into(), value, tolerance, asserted: true, pass: value.is_finite() && value <= tolerance }
}

fn diag(stage: &str, name: &str, tag: &str, value: f64) -> IdentityRow {
    IdentityRow { stage: stage.into(), name: name.into(), tag: tag.into(), value, tolerance: f64::NAN, asserted: false, pass: true }
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub stage: String,
    pub psi_index: Option<usize>,
    pub gamma: Option<f64>,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
struct CharacterRow {
    index: usize,
    q: u64,
    conductor: u64,
    parity: u8,
    index_vector: String,
    primitive: bool,
    twist_primitive: bool,
    fe_residual: f64,
    delta1_unimodular: f64,
}

#[derive(Clone, Debug, Serialize)]
struct DiagnosticRow {
    index: usize,
    q: u64,
    i1: f64,
    i2: f64,
    i3: f64,
    i1_pass: bool,
    i2_pass: bool,
    i3_pass: bool,
    in_psi_star: bool,
}

#[derive(Clone, Debug, Serialize)]
struct ZeroRow {
    index: usize,
    q: u64,
    source: ZeroSource,
    gamma: f64,
    derivative: f64,
    simple: bool,
    cluster: bool,
}

#[derive(Clone, Debug, Serialize)]
struct AuditRow {
    index: usize,
    q: u64,
    source: ZeroSource,
    sign_changes: usize,
    argument_count: i64,
    winding_residual: f64,
    mismatch: i64,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct AnchorRow {
    pub index: usize,
    pub q: u64,
    pub gamma: f64,
    pub source: String,
    pub upsilon: f64,
    pub a2_holds: bool,
    pub phi_phi0_re: f64,
    pub phi_phi0_im: f64,
    pub phi_decomposition_residual: f64,
    pub theta_phi0_re: f64,
    pub theta_phi0_im: f64,
    pub xi_nodes: usize,
    pub t_size: usize,
    pub approx_residual_over_delta: f64,
    pub k_over_delta: f64,
    pub r_over_delta: f64,
    pub k_g3_relative: f64,
    pub approx_identity: f64,
    pub max_coefficient: f64,
    pub e1: f64,
    pub e2: f64,
    pub upsilon_term: f64,
    pub e: f64,
    pub threshold: f64,
    pub e_ratio: f64,
    pub above_threshold: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub d: i64,
    pub big_q: u64,
    pub family_size: u64,
    pub processed: usize,
    pub count_ratio: f64,
    pub sieve: SieveReport,
    pub zero_mean: ZeroMeanReport,
    pub e_mean: Option<EMeanReport>,
    pub gaps: Option<GapStatistics>,
    pub anchors: usize,
    pub above_threshold: usize,
    pub in_psi_star: usize,
    pub a2_holds: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub output: PathBuf,
    pub workers: usize,
    pub identities: Vec<IdentityRow>,
    pub failures: Vec<Failure>,
    pub family: FamilyReport,
    pub files: Vec<String>,
}

struct CharacterOutcome {
    character: CharacterRow,
    membership: Option<MembershipReport>,
    zeros: Option<ZeroSet>,
    anchors: Vec<AnchorRow>,
    failures: Vec<Failure>,
    decomposition: f64,
}

struct SharedTables {
    nu: Arc<crate::coefficients::CoeffTable>,
    upsilon: Arc<crate::coefficients::CoeffTable>,
    lambda_plus: Arc<crate::coefficients::CoeffTable>,
    lambda_minus: Arc<crate::coefficients::CoeffTable>,
}

fn fail(stage: &str, psi: Option<usize>, gamma: Option<f64>, e: &Error) -> Failure {
    Failure { stage: stage.into(), psi_index: psi, gamma, error: e.to_string() }
}

#[allow(clippy::too_many_arguments)]
fn run_character(
    index: usize,
    psi: &Character,
    chi: &Character,
    cfg: &RunConfig,
    params: &AnalysisParams,
    tables: &SharedTables,
    cap_f: usize,
    grid: GridSpec,
    step: f64,
    g3: &bvp::InhomogeneousSolution,
) -> CharacterOutcome {
    let mut failures = Vec::new();
    let pc = psi.mul(chi);
    let s_fe = c(0.3, 2.0);
    let fe = fe_residual(psi, s_fe).unwrap_or_else(|e| {
        failures.push(fail("lfunc", Some(index), None, &e));
        f64::NAN
    });
    let d1 = delta1(psi, chi, c(0.5, 3.7)).map(|v| (v.norm() - 1.0).abs()).unwrap_or_else(|e| {
        failures.push(fail("lfunc", Some(index), None, &e));
        f64::NAN
    });
    let character = CharacterRow {
        index,
        q: psi.modulus,
        conductor: psi.conductor,
        parity: psi.parity,
        index_vector: psi.index_vector().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"),
        primitive: psi.is_primitive(),
        twist_primitive: pc.is_primitive(),
        fe_residual: fe,
        delta1_unimodular: d1,
    };
    let ctx = match MollifierContext::with_tables(
        psi,
        chi,
        cap_f,
        tables.nu.clone(),
        tables.upsilon.clone(),
        tables.lambda_plus.clone(),
        tables.lambda_minus.clone(),
        params,
    ) {
        Ok(c) => c,
        Err(e) => {
            failures.push(fail("mollifier", Some(index), None, &e));
            return CharacterOutcome { character, membership: None, zeros: None, anchors: vec![], failures, decomposition: 0.0 };
        }
    };
    let membership = membership_diagnostics(&ctx, grid).map_err(|e| failures.push(fail("membership", Some(index), None, &e))).ok();
    let zeros = scan_zero_set(psi, chi, cfg.window, step).map_err(|e| failures.push(fail("zeros", Some(index), None, &e))).ok();
    let mut anchors = Vec::new();
    let mut decomposition: f64 = 0.0;
    if let Some(zs) = &zeros {
        let lq = params.log_q();
        let phi0 = IntervalFunction::phi0(lq);
        let chosen: Vec<_> = zs.records.iter().filter(|r| r.gamma >= params.anchor_height).take(cfg.max_anchors).collect();
        for rec in chosen {
            let rho = rec.rho();
            let g = Some(rec.gamma);
            let mut a = AnchorRow {
                index,
                q: psi.modulus,
                gamma: rec.gamma,
                source: format!("{:?}", rec.source).to_lowercase(),
                ..Default::default()
            };
            match upsilon_functional(&ctx, rho) {
                Ok(u) => {
                    a.upsilon = u.total;
                    a.a2_holds = u.a2_holds;
                }
                Err(e) => failures.push(fail("upsilon", Some(index), g, &e)),
            }
            let data = match PhiData::new(&ctx, rho) {
                Ok(d) => d,
                Err(e) => {
                    failures.push(fail("phi", Some(index), g, &e));
                    anchors.push(a);
                    continue;
                }
            };
            match phi(&phi0, &data) {
                Ok(v) => {
                    a.phi_phi0_re = v.value.re;
                    a.phi_phi0_im = v.value.im;
                    a.phi_decomposition_residual = v.decomposition_residual;
                    decomposition = decomposition.max(v.decomposition_residual);
                }
                Err(e) => failures.push(fail("phi", Some(index), g, &e)),
            }
            match XiEngine::new(&ctx, data.clone()).and_then(|mut eng| eng.theta(&ctx, &phi0)) {
                Ok(t) => {
                    a.theta_phi0_re = t.value.re;
                    a.theta_phi0_im = t.value.im;
                    a.xi_nodes = t.xi.nodes;
                }
                Err(e) => failures.push(fail("theta", Some(index), g, &e)),
            }
            match shifted_zero_set(rec, zs, params).and_then(|t| {
                let th = t.values();
                let n = th.len();
                solve_h_k(&th, lq, params.r, g3, &ApproxOptions::default()).map(|r| (n, r))
            }) {
                Ok((n, r)) => {
                    a.t_size = n;
                    a.approx_residual_over_delta = r.report.residual_over_delta;
                    a.k_over_delta = r.report.k_over_delta;
                    a.r_over_delta = r.report.r_over_delta;
                    a.k_g3_relative = r.report.k_g3_relative;
                    a.approx_identity = r.report.identity_residual;
                    a.max_coefficient = r.report.max_coefficient;
                }
                Err(e) => failures.push(fail("approx", Some(index), g, &e)),
            }
            match error_functionals(&ctx, &data) {
                Ok(e) => {
                    a.e1 = e.e1;
                    a.e2 = e.e2;
                    a.upsilon_term = e.upsilon_term;
                    a.e = e.e;
                    a.threshold = e.threshold;
                    a.e_ratio = e.ratio;
                    a.above_threshold = e.e >= e.threshold;
                }
                Err(e) => failures.push(fail("error_functionals", Some(index), g, &e)),
            }
            anchors.push(a);
        }
    }
    CharacterOutcome { character, membership, zeros, anchors, failures, decomposition }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    /// Seconds since the Unix epoch; the only field that varies between reruns.
    pub created_unix: u64,
    pub workers: usize,
    pub files: Vec<ManifestEntry>,
}

/// Runs every stage and writes the artifact directory.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport> {
    let params = cfg.analysis_params()?;
    let workers = cfg.resolved_workers()?;
    let precision = cfg.resolved_precision()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_stages(cfg, &params, workers, precision))
}

fn run_stages(cfg: &RunConfig, params: &AnalysisParams, workers: usize, precision: Precision) -> Result<RunReport> {
    let tol = &cfg.tolerances;
    let family = build_family(cfg.d, cfg.q)?;
    let chi = family.chi.clone();
    let mut members = family.members();
    let full_size = members.len();
    if let Some(m) = cfg.max_characters {
        members.truncate(m);
    }
    let cap_f = cfg.cap_f.unwrap_or_else(|| default_cap_f(cfg.d.unsigned_abs()));
    let grid = if precision == Precision::High { cfg.grid.refined() } else { cfg.grid };
    let mut step = cfg.zero_step.unwrap_or_else(|| auto_step(Some(params.alpha)));
    if precision == Precision::High {
        step *= 0.5;
    }
    let lam_n = floor_guarded(params.big_q.powf(1.5)).max(2);
    let (lp, lm) = lambda_tables(params.alpha, lam_n)?;
    let tables = SharedTables {
        nu: Arc::new(nu_table(&chi, cap_f)?),
        upsilon: Arc::new(upsilon_table(&chi, cap_f)?),
        lambda_plus: Arc::new(lp),
        lambda_minus: Arc::new(lm),
    };
    let bvp_report: BvpReport = bvp::bvp_check(params, 10, cfg.seed)?;
    let g3 = bvp::g3(params, None)?;

    let outcomes: Vec<CharacterOutcome> = members
        .par_iter()
        .enumerate()
        .map(|(i, psi)| run_character(i, psi, &chi, cfg, params, &tables, cap_f, grid, step, &g3))
        .collect();

    let mut failures: Vec<Failure> = Vec::new();
    for o in &outcomes {
        failures.extend(o.failures.iter().cloned());
    }
    let characters: Vec<CharacterRow> = outcomes.iter().map(|o| o.character.clone()).collect();
    let diagnostics: Vec<DiagnosticRow> = outcomes
        .iter()
        .filter_map(|o| {
            o.membership.as_ref().map(|m| DiagnosticRow {
                index: o.character.index,
                q: o.character.q,
                i1: m.i1,
                i2: m.i2,
                i3: m.i3,
                i1_pass: m.i1_pass,
                i2_pass: m.i2_pass,
                i3_pass: m.i3_pass,
                in_psi_star: m.in_psi_star,
            })
        })
        .collect();
    let mut zero_rows = Vec::new();
    let mut audit_rows = Vec::new();
    let mut anchored = Vec::new();
    let mut all_ordinates = Vec::new();
    for (o, psi) in outcomes.iter().zip(&members) {
        if let Some(zs) = &o.zeros {
            for r in &zs.records {
                zero_rows.push(ZeroRow { index: o.character.index, q: o.character.q, source: r.source, gamma: r.gamma, derivative: r.derivative, simple: r.simple, cluster: r.cluster });
            }
            for a in &zs.audits {
                audit_rows.push(AuditRow {
                    index: o.character.index,
                    q: o.character.q,
                    source: a.source,
                    sign_changes: a.sign_changes,
                    argument_count: a.argument_count,
                    winding_residual: a.winding_residual,
                    mismatch: a.mismatch,
                });
            }
            anchored.push(AnchoredZeros { psi: psi.clone(), zeros: zs.records.iter().map(|r| r.rho()).collect() });
            if all_ordinates.is_empty() {
                all_ordinates.push(zs);
            }
        }
    }
    let anchors: Vec<AnchorRow> = outcomes.iter().flat_map(|o| o.anchors.iter().cloned()).collect();

    // family aggregates
    let sieve = sieve_check(&family, cfg.sieve_trials, cfg.seed)?;
    let ones = vec![C64::new(1.0, 0.0); cfg.q as usize];
    let zero_mean = zero_anchored_mean(&anchored, &ones, cfg.q)?;
    let e_values: Vec<f64> = anchors.iter().filter(|a| a.e.is_finite() && a.threshold > 0.0).map(|a| a.e).collect();
    let e_mean_report = if e_values.is_empty() { None } else { Some(e_mean(&e_values, cfg.q, params.r)?) };
    let gaps = all_ordinates.first().and_then(|zs| gap_statistics(zs, params.alpha).ok());
    let family_report = FamilyReport {
        d: family.spec.d,
        big_q: cfg.q,
        family_size: family.count(),
        processed: members.len(),
        count_ratio: family.count_ratio(),
        sieve,
        zero_mean,
        e_mean: e_mean_report,
        gaps,
        anchors: anchors.len(),
        above_threshold: anchors.iter().filter(|a| a.above_threshold).count(),
        in_psi_star: diagnostics.iter().filter(|d| d.in_psi_star).count(),
        a2_holds: anchors.iter().filter(|a| a.a2_holds).count(),
    };

    // identity table
    let maxf = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    let mut ids = Vec::new();
    ids.push(row("characters", "primitivity", "psi and psi*chi primitive", characters.iter().filter(|c| !c.primitive || !c.twist_primitive).count() as f64, 0.0));
    ids.push(row("characters", "family_count", "|Psi_q| product formula", (family.count() as f64 - full_size as f64).abs(), 0.0));
    ids.push(row("lfunc", "functional_equation", "L(s) = Delta(s) L(1-s, conj)", maxf(&mut characters.iter().map(|c| c.fe_residual)), tol.functional_equation));
    ids.push(row("lfunc", "delta1_unimodular", "|Delta1(1/2+it)| = 1", maxf(&mut characters.iter().map(|c| c.delta1_unimodular)), tol.delta1));
    let n_conv = cap_f.min(20_000);
    let nu_v = tables.nu.exact.clone().unwrap_or_default();
    let up_v = tables.upsilon.exact.clone().unwrap_or_default();
    let conv = dirichlet_convolve_int(&nu_v, &up_v, n_conv.min(nu_v.len().saturating_sub(1)).min(up_v.len().saturating_sub(1)));
    let conv_bad = conv.iter().enumerate().skip(1).filter(|&(n, &v)| v != i64::from(n == 1)).count();
    ids.push(row("coefficients", "nu_upsilon_inverse", "(nu * upsilon)(n) = [n = 1]", conv_bad as f64, 0.0));
    let mut lam_err: f64 = 0.0;
    for p in arith::primes_up_to(1000) {
        let mut pl = p;
        let mut l = 1;
        while pl <= 1000 {
            let (plus, minus) = lambda_prime_power(params.alpha, p, l);
            let target = (pl as f64).powf(params.alpha) * (1.0 - (p as f64).powf(-2.0 * params.alpha));
            lam_err = lam_err.max((minus - target).abs()).max((plus.abs() - minus).max(0.0));
            pl *= p;
            l += 1;
        }
    }
    ids.push(row("coefficients", "lambda_prime_power", "|lambda+(p^l)| <= lambda-(p^l) = p^(l alpha)(1 - p^(-2 alpha))", lam_err, tol.lambda));
    let kp = KernelParams { log_q: params.log_q() };
    ids.push(row("lfunc", "varsigma_half", "varsigma(1) = 1/2", (varsigma(1.0) - 0.5).abs(), tol.kernel));
    let sym = (0..=40).map(|k| 10f64.powf(-4.0 + 0.2 * k as f64)).map(|x| (varsigma(x) + varsigma(1.0 / x) - 1.0).abs()).fold(0.0, f64::max);
    ids.push(row("lfunc", "varsigma_symmetry", "varsigma(x) + varsigma(1/x) = 1", sym, tol.kernel));
    ids.push(row("lfunc", "vartheta_half", "vartheta(1) = 1/2", (vartheta(1.0, kp) - 0.5).abs(), 1e-8));
    ids.push(row("zeros", "argument_principle", "sign changes = winding count", audit_rows.iter().map(|a| a.mismatch.abs()).sum::<i64>() as f64, 0.0));
    ids.push(row("functional", "phi_decomposition", "Phi = boundary terms + Phi1", outcomes.iter().map(|o| o.decomposition).fold(0.0, f64::max), tol.phi_decomposition));
    let upm = (0..100)
        .map(|k| -1.0 + 2.0 * k as f64 / 99.0)
        .map(|x| (u_pm(x, params.r, Sign::Plus) + u_pm(x, params.r, Sign::Minus) - 1.0).abs())
        .fold(0.0, f64::max);
    ids.push(row("functional", "u_pm_sum", "U+ + U- = 1", upm, tol.u_pm));
    ids.push(row("bvp", "g1_boundary", "g1'(1) w1(1) = 1", (bvp_report.boundary_g1 - 1.0).abs(), tol.bvp_boundary));
    ids.push(row("bvp", "g2_boundary", "g2'(1) w1(1) = 1", (bvp_report.boundary_g2 - 1.0).abs(), tol.bvp_boundary));
    ids.push(row("bvp", "g1_norm", "||g1||^2 = 1/(d delta^2)", bvp_report.g1_norm_rel_residual, tol.bvp_boundary));
    ids.push(row("bvp", "inner_g1", "<f,g1> = f(1) + f(-1)", bvp_report.inner_g1_max, tol.bvp_inner));
    ids.push(row("bvp", "inner_g2", "<f,g2> = f(1) - f(-1)", bvp_report.inner_g2_max, tol.bvp_inner));
    ids.push(row("bvp", "inner_g3", "<f,g3> = int f T", bvp_report.inner_g3_max, tol.bvp_inner));
    ids.push(row("bvp", "ode_g3", "[w1 g3']' - w2 g3 = -T", bvp_report.ode_residual_g3, tol.bvp_ode));
    let approx_rows: Vec<&AnchorRow> = anchors.iter().filter(|a| a.t_size > 0).collect();
    if !approx_rows.is_empty() {
        ids.push(row("approx", "split_identity", "phi0 = h + k + r", approx_rows.iter().map(|a| a.approx_identity).fold(0.0, f64::max), tol.approx_identity));
        ids.push(row("approx", "k_orthogonal", "<k, g3> = 0", approx_rows.iter().map(|a| a.k_g3_relative).fold(0.0, f64::max), tol.approx_orthogonality));
    }
    ids.push(row("sieve", "single_term", "a = [n = 1] gives |Psi|/Q^2", (family_report.sieve.single_term - family_report.sieve.family_size as f64 / (cfg.q * cfg.q) as f64).abs(), 1e-14));
    ids.push(row("mollifier", "upsilon_nonnegative", "Upsilon >= 0", anchors.iter().map(|a| (-a.upsilon).max(0.0)).fold(0.0, f64::max), 0.0));
    // diagnostics
    ids.push(diag("mollifier", "psi_star_members", "membership grid sups against thresholds", family_report.in_psi_star as f64));
    ids.push(diag("mollifier", "a2_holds", "Upsilon below (log R)^2", family_report.a2_holds as f64));
    ids.push(diag("functional", "fundamental_inequality", "anchors with E >= R^(-1/12)", family_report.above_threshold as f64));
    if let Some(em) = &family_report.e_mean {
        ids.push(diag("sieve", "e_mean_ratio", "sum E / (log Q Q^2 R^(-1/12) / log R)", em.ratio));
    }
    ids.push(diag("sieve", "large_sieve_max", "max LHS/(Q^2 sum |a|^2) over random signs", family_report.sieve.max_random));
    ids.push(diag("sieve", "zero_mean_ratio", "sum |P(rho)|^2 / (log Q Q^2 sum |a|^2/n)", family_report.zero_mean.ratio));
    ids.push(diag("bvp", "g_tilde_scale", "||g~|| / R^(49/60)", bvp_report.g_tilde_scale));

    // artifacts
    let dir = &cfg.output;
    fs::create_dir_all(dir)?;
    #[derive(Serialize)]
    struct ConfigDoc<'a> {
        schema_version: u32,
        config: &'a RunConfig,
        precision: Precision,
        cap_f: usize,
        zero_step: f64,
        grid: GridSpec,
        params: &'a AnalysisParams,
        provenance: Vec<(&'static str, String, f64)>,
    }
    let mut files = Vec::new();
    let mut put = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        f(&dir.join(name))?;
        files.push(name.to_string());
        Ok(())
    };
    put("config.json", &|p| {
        write_json(p, &ConfigDoc { schema_version: SCHEMA_VERSION, config: cfg, precision, cap_f, zero_step: step, grid, params, provenance: params.provenance() })
    })?;
    put("characters.csv", &|p| write_csv(p, &characters))?;
    put("diagnostics.csv", &|p| write_csv(p, &diagnostics))?;
    put("zeros.csv", &|p| write_csv(p, &zero_rows))?;
    put("audits.csv", &|p| write_csv(p, &audit_rows))?;
    put("anchors.csv", &|p| write_csv(p, &anchors))?;
    put("bvp.json", &|p| write_json(p, &bvp_report))?;
    put("family.json", &|p| write_json(p, &family_report))?;
    put("identities.json", &|p| write_json(p, &ids))?;
    put("failures.json", &|p| write_json(p, &failures))?;
    let entries = files
        .iter()
        .map(|n| {
            let p = dir.join(n);
            Ok(ManifestEntry { name: n.clone(), sha256: sha256_file(&p)?, bytes: fs::metadata(&p)?.len() })
        })
        .collect::<Result<Vec<_>>>()?;
    let created_unix = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    write_json(&dir.join(MANIFEST), &Manifest { schema_version: SCHEMA_VERSION, created_unix, workers, files: entries })?;
    Ok(RunReport { output: dir.clone(), workers, identities: ids, failures, family: family_report, files })
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub rows: Vec<IdentityRow>,
    pub checksum_failures: Vec<String>,
    pub failures: usize,
}

impl Summary {
    pub fn asserted_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.asserted && !r.pass).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<13} {:<24} {:>13} {:>10}  {}\n", "stage", "check", "value", "tol", "status"));
        for r in &self.rows {
            let status = if !r.asserted {
                "info"
            } else if r.pass {
                "PASS"
            } else {
                "FAIL"
            };
            let tol = if r.asserted { format!("{:.1e}", r.tolerance) } else { "-".into() };
            out.push_str(&format!("{:<13} {:<24} {:>13.4e} {:>10}  {}\n", r.stage, r.name, r.value, tol, status));
        }
        for f in &self.checksum_failures {
            out.push_str(&format!("checksum mismatch: {f}\n"));
        }
        out.push_str(&format!("stage failures recorded: {}\n", self.failures));
        out
    }
}

/// Verifies the manifest checksums and tabulates identities.json.
pub fn report_summary(dir: &Path) -> Result<Summary> {
    let mpath = dir.join(MANIFEST);
    if !mpath.exists() {
        return Err(Error::Missing(format!("{} has no {MANIFEST}", dir.display())));
    }
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&mpath)?)?;
    let mut checksum_failures = Vec::new();
    for e in &manifest.files {
        let p = dir.join(&e.name);
        if !p.exists() {
            return Err(Error::Missing(format!("incomplete run directory: {} missing", e.name)));
        }
        if sha256_file(&p)? != e.sha256 {
            checksum_failures.push(e.name.clone());
        }
    }
    #[derive(Deserialize)]
    struct Row {
        stage: String,
        name: String,
        tag: String,
        value: Option<f64>,
        tolerance: Option<f64>,
        asserted: bool,
        pass: bool,
    }
    let raw: Vec<Row> = serde_json::from_str(&fs::read_to_string(dir.join("identities.json"))?)?;
    let rows = raw
        .into_iter()
        .map(|r| IdentityRow {
            stage: r.stage,
            name: r.name,
            tag: r.tag,
            value: r.value.unwrap_or(f64::NAN),
            tolerance: r.tolerance.unwrap_or(f64::NAN),
            asserted: r.asserted,
            pass: r.pass,
        })
        .collect();
    let failures: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(dir.join("failures.json"))?)?;
    Ok(Summary { rows, checksum_failures, failures: failures.len() })
}
