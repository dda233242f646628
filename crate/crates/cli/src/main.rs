use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;
use siegel_core::approx::{solve_h_k, ApproxOptions};
use siegel_core::bvp;
use siegel_core::characters::{build_family, enumerate_psi_q, fundamental_from_magnitude, kronecker_character, Character};
use siegel_core::coefficients::{
    dirichlet_convolve_int, lambda_prime_power, lambda_tables, nu_values, upsilon_values,
};
use siegel_core::functional::{phi, FunctionSpec, IntervalFunction, PhiData, XiEngine};
use siegel_core::harness::{report_summary, run_pipeline, RunConfig};
use siegel_core::lfunc::{delta1, fe_residual, LEvaluator};
use siegel_core::mollifier::{membership_diagnostics, upsilon_functional, GridSpec, MollifierContext};
use siegel_core::numeric::arith;
use siegel_core::params::{AnalysisParams, ParamOverrides};
use siegel_core::sieve_means::sieve_check;
use siegel_core::zeros::{auto_step, gap_statistics, scan_zero_set, shifted_zero_set, ZeroRecord, ZeroSet};
use std::io::Write;
use std::path::PathBuf;

// stdout writes that end quietly when the reader goes away (`| head`)
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if let Err(e) = write!(std::io::stdout().lock(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            return Err(e.into());
        }
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        out!($($t)*);
        out!("\n");
    }};
}

#[derive(Parser)]
#[command(name = "siegel", version, about = "Character families, L-functions and mollified functionals at desk scale")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Character family Ψ.
    #[command(subcommand)]
    Chars(CharsCmd),
    /// ν, υ, λ± tables.
    #[command(subcommand)]
    Coeffs(CoeffsCmd),
    #[command(subcommand)]
    Lfunc(LfuncCmd),
    #[command(subcommand)]
    Zeros(ZerosCmd),
    /// Mollifier membership and Υ.
    #[command(subcommand)]
    Moll(MollCmd),
    #[command(subcommand)]
    Func(FuncCmd),
    #[command(subcommand)]
    Bvp(BvpCmd),
    #[command(subcommand)]
    Approx(ApproxCmd),
    #[command(subcommand)]
    Sieve(SieveCmd),
    /// Full run from a TOML config into an artifact directory.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Checks a run directory and prints the identity table.
    Report { dir: PathBuf },
}

#[derive(Args, Clone)]
struct FamilyArgs {
    #[arg(long = "D", default_value_t = 4)]
    d: i64,
    #[arg(long = "Q", default_value_t = 20)]
    big_q: u64,
}

#[derive(Subcommand)]
enum CharsCmd {
    List(FamilyArgs),
    Count(FamilyArgs),
}

#[derive(Subcommand)]
enum CoeffsCmd {
    Dump {
        #[arg(long, default_value = "nu")]
        kind: String,
        #[arg(long = "D", default_value_t = 4)]
        d: i64,
        #[arg(long = "N", default_value_t = 1000)]
        n: usize,
        /// Only for the λ kinds; defaults to 1/log Q.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "Q", default_value_t = 20)]
        big_q: u64,
    },
    Check {
        #[arg(long = "D", default_value_t = 4)]
        d: i64,
        #[arg(long = "N", default_value_t = 100_000)]
        n: usize,
        #[arg(long = "Q", default_value_t = 20)]
        big_q: u64,
    },
}

#[derive(Subcommand)]
enum LfuncCmd {
    Eval {
        #[arg(long)]
        q: u64,
        /// Index vector, comma separated.
        #[arg(long)]
        index: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    FeResidual {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "D", default_value_t = 4)]
        d: i64,
    },
}

#[derive(Args, Clone)]
struct PsiArgs {
    #[arg(long)]
    q: u64,
    #[arg(long = "D", default_value_t = 4)]
    d: i64,
    /// Position of ψ among the members of Ψ_q.
    #[arg(long, default_value_t = 0)]
    psi: usize,
    /// Family scale for the analysis parameters.
    #[arg(long = "Q", default_value_t = 20)]
    big_q: u64,
    #[arg(long, default_value = "0:30")]
    window: String,
    #[arg(long, default_value = "auto")]
    step: String,
    #[arg(long = "R")]
    r: Option<f64>,
}

#[derive(Subcommand)]
enum ZerosCmd {
    Scan(PsiArgs),
    Gaps(PsiArgs),
}

#[derive(Subcommand)]
enum MollCmd {
    Diag {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    Upsilon {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long = "rho-index", default_value_t = 0)]
        rho_index: usize,
    },
}

#[derive(Subcommand)]
enum FuncCmd {
    Phi {
        /// JSON function spec; φ₀ when omitted.
        #[arg(long)]
        f: Option<PathBuf>,
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long = "rho-index", default_value_t = 0)]
        rho_index: usize,
        /// Also evaluate Θ(f).
        #[arg(long)]
        theta: bool,
    },
}

#[derive(Subcommand)]
enum BvpCmd {
    Check {
        #[arg(long = "R", default_value_t = 20.0)]
        r: f64,
        #[arg(long, default_value_t = 6.0)]
        d: f64,
        #[arg(long, default_value_t = 20)]
        polys: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ApproxCmd {
    Run {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long = "rho-index", default_value_t = 0)]
        rho_index: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SieveCmd {
    Check {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_window(w: &str) -> Result<(f64, f64)> {
    let (a, b) = w.split_once(':').ok_or_else(|| anyhow!("window must be lo:hi"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    t.parse::<Complex64>().map_err(|_| anyhow!("cannot parse complex number {s:?}"))
}

fn emit(v: &impl serde::Serialize) -> Result<()> {
    outln!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

struct Selected {
    params: AnalysisParams,
    chi: Character,
    psi: Character,
    zeros: ZeroSet,
}

impl PsiArgs {
    fn params(&self) -> Result<AnalysisParams> {
        let ov = ParamOverrides { r: self.r, ..Default::default() };
        let p = AnalysisParams::new(self.d.unsigned_abs() as f64, self.big_q as f64, &ov)?;
        p.validate()?;
        Ok(p)
    }

    fn character(&self) -> Result<(Character, Character)> {
        let chi = kronecker_character(fundamental_from_magnitude(self.d)?)?;
        let members = enumerate_psi_q(self.q, &chi)?;
        let n = members.len();
        let psi = members.into_iter().nth(self.psi).ok_or_else(|| anyhow!("Ψ_{} has {n} members", self.q))?;
        Ok((chi, psi))
    }

    fn select(&self) -> Result<Selected> {
        let params = self.params()?;
        let (chi, psi) = self.character()?;
        let step = if self.step == "auto" { auto_step(Some(params.alpha)) } else { self.step.parse()? };
        let zeros = scan_zero_set(&psi, &chi, parse_window(&self.window)?, step)?;
        Ok(Selected { params, chi, psi, zeros })
    }
}

impl Selected {
    fn ctx(&self) -> Result<MollifierContext> {
        let cap_f = siegel_core::coefficients::default_cap_f(self.params.log_d.exp().round() as u64);
        Ok(MollifierContext::new(&self.psi, &self.chi, cap_f, &self.params)?)
    }

    fn anchor(&self, k: usize) -> Result<&ZeroRecord> {
        let n = self.zeros.records.len();
        self.zeros.records.get(k).ok_or_else(|| anyhow!("window holds {n} zeros; rho-index {k} out of range"))
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Chars(c) => chars(c),
        Cmd::Coeffs(c) => coeffs(c),
        Cmd::Lfunc(c) => lfunc(c),
        Cmd::Zeros(c) => zeros(c),
        Cmd::Moll(c) => moll(c),
        Cmd::Func(FuncCmd::Phi { f, psi, rho_index, theta }) => {
            let sel = psi.select()?;
            let ctx = sel.ctx()?;
            let rho = sel.anchor(rho_index)?.rho();
            let lq = sel.params.log_q();
            let func = match f {
                Some(path) => {
                    let spec: FunctionSpec = serde_json::from_str(&std::fs::read_to_string(&path).with_context(|| path.display().to_string())?)?;
                    spec.build(lq)?
                }
                None => IntervalFunction::phi0(lq),
            };
            let data = PhiData::new(&ctx, rho)?;
            let v = phi(&func, &data)?;
            let th = if theta { Some(XiEngine::new(&ctx, data)?.theta(&ctx, &func)?) } else { None };
            emit(&json!({ "rho": [rho.re, rho.im], "phi": v, "theta": th }))
        }
        Cmd::Bvp(BvpCmd::Check { r, d, polys, seed }) => {
            let ov = ParamOverrides { r: Some(r), d: Some(d), ..Default::default() };
            let p = AnalysisParams::new(4.0, 20.0, &ov)?;
            emit(&bvp::bvp_check(&p, polys, seed)?)
        }
        Cmd::Approx(ApproxCmd::Run { psi, rho_index, report }) => {
            let sel = psi.select()?;
            let rec = sel.anchor(rho_index)?;
            let t = shifted_zero_set(rec, &sel.zeros, &sel.params)?;
            let g3 = bvp::g3(&sel.params, None)?;
            let res = solve_h_k(&t.values(), sel.params.log_q(), sel.params.r, &g3, &ApproxOptions::default())?;
            let doc = json!({
                "rho": [rec.rho().re, rec.rho().im],
                "thetas": t,
                "coefficients": res.coefficients.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                "report": res.report,
            });
            match report {
                Some(p) => {
                    std::fs::write(&p, serde_json::to_string_pretty(&doc)? + "\n")?;
                    emit(&res.report)
                }
                None => emit(&doc),
            }
        }
        Cmd::Sieve(SieveCmd::Check { family, trials, seed }) => {
            let fam = build_family(family.d, family.big_q)?;
            emit(&sieve_check(&fam, trials, seed)?)
        }
        Cmd::Pipeline { config, output, workers } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            if workers.is_some() {
                cfg.workers = workers;
            }
            let rep = run_pipeline(&cfg)?;
            let summary = report_summary(&rep.output)?;
            out!("{}", summary.render());
            eprintln!("artifacts in {}", rep.output.display());
            Ok(())
        }
        Cmd::Report { dir } => {
            let s = report_summary(&dir)?;
            out!("{}", s.render());
            if !s.checksum_failures.is_empty() {
                bail!("{} file(s) fail their checksum", s.checksum_failures.len());
            }
            Ok(())
        }
    }
}

fn chars(c: CharsCmd) -> Result<()> {
    match c {
        CharsCmd::List(f) => {
            let fam = build_family(f.d, f.big_q)?;
            let out = std::io::stdout();
            let mut w = out.lock();
            writeln!(w, "q,index,parity")?;
            for psi in fam.iter() {
                let idx: Vec<String> = psi.index_vector().iter().map(|v| v.to_string()).collect();
                writeln!(w, "{},{},{}", psi.modulus, idx.join(";"), psi.parity)?;
            }
            Ok(())
        }
        CharsCmd::Count(f) => {
            let fam = build_family(f.d, f.big_q)?;
            outln!("n,ratio");
            outln!("{},{}", fam.count(), fam.count_ratio());
            Ok(())
        }
    }
}

fn coeffs(c: CoeffsCmd) -> Result<()> {
    match c {
        CoeffsCmd::Dump { kind, d, n, alpha, big_q } => {
            let chi = kronecker_character(fundamental_from_magnitude(d)?)?;
            let alpha = alpha.unwrap_or(1.0 / (big_q as f64).ln());
            let values: Vec<String> = match kind.as_str() {
                "nu" => nu_values(&chi, n)?.iter().map(|v| v.to_string()).collect(),
                "upsilon" => upsilon_values(&chi, n)?.iter().map(|v| v.to_string()).collect(),
                "lambda-plus" | "lambda_plus" => lambda_tables(alpha, n)?.0.values.iter().map(|v| format!("{v:e}")).collect(),
                "lambda-minus" | "lambda_minus" => lambda_tables(alpha, n)?.1.values.iter().map(|v| format!("{v:e}")).collect(),
                other => bail!("unknown kind {other:?}; expected nu, upsilon, lambda-plus or lambda-minus"),
            };
            outln!("n,value");
            for (i, v) in values.iter().enumerate().skip(1) {
                outln!("{i},{v}");
            }
            Ok(())
        }
        CoeffsCmd::Check { d, n, big_q } => {
            let chi = kronecker_character(fundamental_from_magnitude(d)?)?;
            let nu = nu_values(&chi, n)?;
            let up = upsilon_values(&chi, n)?;
            let conv = dirichlet_convolve_int(&nu, &up, n);
            let bad = (1..=n).filter(|&k| conv[k] != i64::from(k == 1)).count();
            outln!("nu*upsilon = [n=1] up to {n}: {} ({bad} mismatches)", if bad == 0 { "PASS" } else { "FAIL" });
            let alpha = 1.0 / (big_q as f64).ln();
            let mut err: f64 = 0.0;
            for p in arith::primes_up_to(10_000) {
                let (mut pl, mut l) = (p, 1u32);
                while pl <= 10_000 {
                    let (plus, minus) = lambda_prime_power(alpha, p, l);
                    let target = (pl as f64).powf(alpha) * (1.0 - (p as f64).powf(-2.0 * alpha));
                    err = err.max((minus - target).abs()).max((plus.abs() - minus).max(0.0));
                    pl *= p;
                    l += 1;
                }
            }
            outln!("lambda prime powers up to 1e4: {} (max error {err:.3e})", if err < 1e-12 { "PASS" } else { "FAIL" });
            Ok(())
        }
    }
}

fn lfunc(c: LfuncCmd) -> Result<()> {
    match c {
        LfuncCmd::Eval { q, index, s } => {
            let idx: Vec<u64> = index.split(',').map(|v| v.trim().parse()).collect::<std::result::Result<_, _>>()?;
            let psi = Character::from_index_vector(q, &idx)?;
            let s = parse_complex(&s)?;
            let v = LEvaluator::new(psi.clone()).eval(s)?;
            emit(&json!({ "q": q, "s": [s.re, s.im], "value": [v.re, v.im], "primitive": psi.is_primitive() }))
        }
        LfuncCmd::FeResidual { trials, seed, d } => {
            use rand::{Rng, SeedableRng};
            let chi = kronecker_character(fundamental_from_magnitude(d)?)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let moduli: Vec<u64> = (5..=100).filter(|&q| q % 2 == 1 && arith::is_squarefree(q) && q % 3 != 0).collect();
            let (mut fe_max, mut d1_max) = (0.0f64, 0.0f64);
            let mut done = 0;
            while done < trials {
                let q = moduli[rng.gen_range(0..moduli.len())];
                let members = enumerate_psi_q(q, &chi)?;
                if members.is_empty() {
                    continue;
                }
                let psi = &members[rng.gen_range(0..members.len())];
                let s = Complex64::new(rng.gen_range(-1.0..2.0), rng.gen_range(-10.0..10.0));
                fe_max = fe_max.max(fe_residual(psi, s)?);
                let t = rng.gen_range(-10.0..10.0);
                d1_max = d1_max.max((delta1(psi, &chi, Complex64::new(0.5, t))?.norm() - 1.0).abs());
                done += 1;
            }
            emit(&json!({ "trials": trials, "max_fe_residual": fe_max, "max_delta1_unimodular": d1_max }))
        }
    }
}

fn zeros(c: ZerosCmd) -> Result<()> {
    match c {
        ZerosCmd::Scan(a) => {
            let sel = a.select()?;
            outln!("gamma,source,simple,gap");
            let mut last: Option<f64> = None;
            let mut recs: Vec<&ZeroRecord> = sel.zeros.records.iter().collect();
            recs.sort_by(|x, y| x.gamma.total_cmp(&y.gamma));
            for r in recs {
                let gap = last.map(|g| format!("{:.12}", r.gamma - g)).unwrap_or_default();
                outln!("{:.12},{:?},{},{}", r.gamma, r.source, r.simple, gap);
                last = Some(r.gamma);
            }
            let m = sel.zeros.mismatch_total();
            if m != 0 {
                eprintln!("argument-principle mismatch total: {m}");
            }
            Ok(())
        }
        ZerosCmd::Gaps(a) => {
            let sel = a.select()?;
            emit(&gap_statistics(&sel.zeros, sel.params.alpha)?)
        }
    }
}

fn moll(c: MollCmd) -> Result<()> {
    match c {
        MollCmd::Diag { psi, grid } => {
            let params = psi.params()?;
            let (chi, p) = psi.character()?;
            let cap_f = siegel_core::coefficients::default_cap_f(psi.d.unsigned_abs());
            let ctx = MollifierContext::new(&p, &chi, cap_f, &params)?;
            emit(&membership_diagnostics(&ctx, GridSpec { n_re: grid, n_im: grid })?)
        }
        MollCmd::Upsilon { psi, rho_index } => {
            let sel = psi.select()?;
            let ctx = sel.ctx()?;
            let rho = sel.anchor(rho_index)?.rho();
            emit(&json!({ "rho": [rho.re, rho.im], "upsilon": upsilon_functional(&ctx, rho)? }))
        }
    }
}
