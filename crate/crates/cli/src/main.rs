use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use forge_core::hamiltonian::Hamiltonian;
use forge_core::heisenberg::{heisenberg_estimate_sampled, heisenberg_expectation_for_ansatz, ExplicitLambda, HeisenbergBudget};
use forge_core::orchestration::ZneSchedule;
use forge_core::schrodinger::{
    default_options, direct_expectation, enumerate_forged_terms, estimate_sampled, sampling_budget, ForgedStates,
    SchmidtAnsatz, TermPrep,
};
use forge_core::sim::NoiseModel;
use forge_core::vqe::{vqe_run, AnsatzConfig, EvalMode, SampledOptions, SpsaConfig};
use forge_core::{ForgeError, Result};

/// Directory searched for relative input paths that do not exist as given.
const FIXTURE_ENV: &str = "FORGE_FIXTURES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Forged expectation of every Hamiltonian term (exact, or sampled with --shots/--epsilon).
    Expect,
    /// Optimize a hop-gate ansatz and write the trajectory.
    Vqe,
    /// Observable-side forging (exact, or sampled with --shots/--epsilon).
    Heisenberg,
    /// One-norm, shot budget and term sampling weights.
    Budget,
    /// Forged exact value against the direct 2n-qubit simulation, per term.
    Compare,
}

#[derive(Debug, Parser)]
#[command(name = "forge", version, about = "Entanglement forging on a statevector simulator")]
struct Cli {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Hamiltonian file.
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Schmidt ansatz file, or a hop-gate configuration in vqe mode.
    #[arg(long)]
    ansatz: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Single-qubit depolarizing probability (vqe mode).
    #[arg(long)]
    noise_p1: Option<f64>,
    /// Two-qubit depolarizing probability (vqe mode).
    #[arg(long)]
    noise_p2: Option<f64>,
    /// Zero-noise extrapolation with the default fold schedule (vqe mode).
    #[arg(long)]
    zne: bool,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    /// Worker threads; defaults to available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn input(path: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    let path = path
        .as_ref()
        .ok_or_else(|| ForgeError::Input(format!("--{flag} is required in this mode")))?;
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os(FIXTURE_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return Ok(candidate);
            }
        }
    }
    Ok(path.clone())
}

fn reject(cond: bool, what: &str) -> Result<()> {
    if cond {
        Err(ForgeError::Input(what.into()))
    } else {
        Ok(())
    }
}

impl Cli {
    fn validate(&self) -> Result<()> {
        let noisy = self.noise_p1.is_some() || self.noise_p2.is_some();
        reject(self.shots.is_some() && self.epsilon.is_some(), "--shots and --epsilon are mutually exclusive")?;
        reject(self.shots == Some(0), "--shots must be positive")?;
        reject(self.epsilon.is_some_and(|e| !(e > 0.0 && e.is_finite())), "--epsilon must be positive")?;
        reject(self.workers == Some(0), "--workers must be positive")?;
        match self.mode {
            Mode::Vqe => {
                reject(self.epsilon.is_some(), "vqe mode takes --shots, not --epsilon")?;
                reject((noisy || self.zne) && self.shots.is_none(), "noise and --zne need --shots")?;
                reject(self.iters == 0, "--iters must be positive")?;
            }
            Mode::Budget => reject(self.epsilon.is_none(), "budget mode needs --epsilon")?,
            Mode::Expect | Mode::Heisenberg | Mode::Compare => {}
        }
        if self.mode != Mode::Vqe {
            reject(noisy || self.zne, "noise and --zne only apply to vqe mode")?;
        }
        if self.mode == Mode::Compare || self.mode == Mode::Budget {
            reject(self.shots.is_some(), "this mode is exact and takes no --shots")?;
        }
        Ok(())
    }

    fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.noise_p1.unwrap_or(0.0), self.noise_p2.unwrap_or(0.0))
    }
}

fn load_pair(cli: &Cli) -> Result<(Hamiltonian, SchmidtAnsatz)> {
    let h = Hamiltonian::load(&input(&cli.hamiltonian, "hamiltonian")?)?;
    let a = SchmidtAnsatz::load(&input(&cli.ansatz, "ansatz")?)?;
    if h.partition() != a.n() {
        return Err(ForgeError::LengthMismatch {
            expected: h.partition(),
            found: a.n(),
        });
    }
    Ok((h, a))
}

/// Pauli letters without the sign marker.
fn letters(p: &forge_core::PauliString) -> String {
    p.unsigned().to_string().trim_start_matches('+').to_string()
}

/// Shortest round-tripping float text.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn expect_mode(cli: &Cli) -> Result<String> {
    let (h, a) = load_pair(cli)?;
    let terms = h.split_terms();
    let mut out = String::from("term,coefficient,o1,o2,value,stderr,shots\n");
    let (mut total, mut var, mut shots_total) = (0.0, 0.0, 0u64);
    let pairs = match (cli.shots, cli.epsilon) {
        (Some(s), _) => Some(s.div_ceil(2)),
        (None, Some(e)) => Some(sampling_budget(&a, e)?.pairs()),
        (None, None) => None,
    };
    let states = match pairs {
        None => Some(ForgedStates::prepare(&a, enumerate_forged_terms(&a), default_options(&a, &terms))?),
        Some(_) => None,
    };
    for (i, (c, o1, o2)) in terms.iter().enumerate() {
        let (value, stderr, shots) = match (&states, pairs) {
            (Some(s), _) => (s.expectation(o1, o2)?, 0.0, 0),
            (None, Some(p)) => {
                let est = estimate_sampled(&a, o1, o2, p, cli.seed.wrapping_add(i as u64))?;
                (est.value, est.stderr, 2 * est.pairs)
            }
            (None, None) => unreachable!("either states or a pair count is set"),
        };
        total += c * value;
        var += (c * stderr).powi(2);
        shots_total += shots;
        out += &format!(
            "{i},{},{},{},{},{},{shots}\n",
            num(*c),
            letters(o1),
            letters(o2),
            num(value),
            num(stderr)
        );
    }
    out += &format!("total,,,,{},{},{shots_total}\n", num(total), num(var.sqrt()));
    Ok(out)
}

fn heisenberg_mode(cli: &Cli) -> Result<String> {
    let (h, a) = load_pair(cli)?;
    let lm = ExplicitLambda::from_pairs(a.n(), a.bitstrings(), a.lambdas())?;
    let budget = match (cli.shots, cli.epsilon) {
        (Some(s), _) => Some(HeisenbergBudget::uniform(s)),
        (None, Some(e)) => Some(HeisenbergBudget::for_epsilon(e, 1.0)?),
        (None, None) => None,
    };
    let mut out = String::from("term,coefficient,o1,o2,value,stderr,experiments\n");
    let (mut total, mut var, mut experiments) = (0.0, 0.0, 0u64);
    for (i, (c, o1, o2)) in h.split_terms().iter().enumerate() {
        let (value, stderr, n) = match budget {
            None => (heisenberg_expectation_for_ansatz(&a, o1, o2)?, 0.0, 0),
            Some(b) => {
                if !a.same_as_u() {
                    return Err(ForgeError::ContractViolation(
                        "observable-side forging needs V = U".into(),
                    ));
                }
                let est = heisenberg_estimate_sampled(a.u(), &lm, o1, o2, b, cli.seed.wrapping_add(i as u64))?;
                (est.value, est.stderr, est.experiments)
            }
        };
        total += c * value;
        var += (c * stderr).powi(2);
        experiments += n;
        out += &format!(
            "{i},{},{},{},{},{},{n}\n",
            num(*c),
            letters(o1),
            letters(o2),
            num(value),
            num(stderr)
        );
    }
    out += &format!("total,,,,{},{},{experiments}\n", num(total), num(var.sqrt()));
    Ok(out)
}

fn budget_mode(cli: &Cli) -> Result<String> {
    let a = SchmidtAnsatz::load(&input(&cli.ansatz, "ansatz")?)?;
    let b = sampling_budget(&a, cli.epsilon.expect("validated"))?;
    let mut out = String::from("quantity,n,m,p,value\n");
    out += &format!("epsilon,,,,{}\n", num(b.epsilon));
    out += &format!("one_norm_exact,,,,{}\n", num(b.one_norm));
    out += &format!("one_norm_closed_form,,,,{}\n", num(b.one_norm_closed_form));
    out += &format!("S_exact,,,,{}\n", b.shots);
    out += &format!("S_closed_form,,,,{}\n", b.shots_closed_form);
    for (t, pi) in enumerate_forged_terms(&a).iter().zip(&b.pi) {
        let p = match &t.prep {
            TermPrep::Superposition { p, .. } => p.to_string(),
            TermPrep::Product { p, .. } => p.to_string(),
            TermPrep::Basis(_) => String::new(),
        };
        out += &format!("pi,{},{},{p},{}\n", t.n, t.m, num(*pi));
    }
    Ok(out)
}

fn compare_mode(cli: &Cli) -> Result<String> {
    let (h, a) = load_pair(cli)?;
    let terms = h.split_terms();
    let states = ForgedStates::prepare(&a, enumerate_forged_terms(&a), default_options(&a, &terms))?;
    let mut out = String::from("term,coefficient,o1,o2,forged,direct,abs_diff\n");
    for (i, (c, o1, o2)) in terms.iter().enumerate() {
        let forged = states.expectation(o1, o2)?;
        let direct = direct_expectation(&a, o1, o2)?;
        out += &format!(
            "{i},{},{},{},{},{},{}\n",
            num(*c),
            letters(o1),
            letters(o2),
            num(forged),
            num(direct),
            num((forged - direct).abs())
        );
    }
    Ok(out)
}

fn vqe_mode(cli: &Cli) -> Result<String> {
    let h = Hamiltonian::load(&input(&cli.hamiltonian, "hamiltonian")?)?;
    let config = AnsatzConfig::load(&input(&cli.ansatz, "ansatz")?)?;
    let mode = match cli.shots {
        None => EvalMode::Exact,
        Some(shots) => EvalMode::Sampled(SampledOptions {
            shots,
            noise: cli.noise()?,
            zne: cli.zne.then(ZneSchedule::default),
        }),
    };
    let traj = vqe_run(&h, &config, mode, &SpsaConfig::new(cli.iters), cli.seed)?;
    if let Some(e) = &traj.aborted {
        eprintln!("warning[{}]: optimizer stopped early: {e}", e.code());
    }
    Ok(traj.to_csv())
}

fn run(cli: &Cli) -> Result<()> {
    cli.validate()?;
    let csv = match cli.mode {
        Mode::Expect => expect_mode(cli)?,
        Mode::Vqe => vqe_mode(cli)?,
        Mode::Heisenberg => heisenberg_mode(cli)?,
        Mode::Budget => budget_mode(cli)?,
        Mode::Compare => compare_mode(cli)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| ForgeError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(ForgeError::from),
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[E_USAGE]: {}", one_line(first.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error[E_INPUT]: {}", one_line(&e.to_string()));
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), one_line(&e.to_string()));
            ExitCode::from(1)
        }
    }
}
