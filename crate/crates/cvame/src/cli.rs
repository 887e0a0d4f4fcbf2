//! The `cvame` command line. Reports go to stdout, diagnostics to stderr.
//! Exit codes: 0 pass, 1 fail (with a witness where one exists), 2 input
//! error. Modes are numbered from 1 on the command line and in reports.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cvame_core::families::{
    cauchy, exp_kernel, gauss_kernel, ghz_generator, hankel, hilbert, mds_vandermonde_generator, pascal,
    random_adjacency, sqrt_primes, vandermonde_sym,
};
use cvame_core::gaussian::{fidelity_sweep, squeezing_threshold, uniformity_oracle, Pairing, SqueezeParam, TeleportationChannel};
use cvame_core::stabilizer::{LocalOp, StabilizerGenerators};
use cvame_core::subsets::{complement, Combinations};
use cvame_core::uniformity::{
    is_k_uniform_cluster, is_mds_generator, max_uniformity, rotor_k_uniform, rotor_max_uniformity, zak_k_uniform,
    zak_max_uniformity, UniformityReport, ZakSide,
};
use cvame_core::{AdjacencyMatrix, Backend, Error, GeneratorMatrix, Matrix, Scalar};

use crate::format::{Input, MatrixFile};
use crate::report::{
    to_json, CheckResult, ClusterFormResult, NullifierResult, OpOut, OracleCut, OracleResult, PairingOut, Report,
    ThresholdResult, WitnessOut,
};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "cvame", version, about = "Verify and simulate continuous-variable k-uniform and AME states")]
struct Cli {
    /// Arithmetic backend; defaults to exact when every entry is rational.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Absolute rank tolerance for the float backend (implies --backend float).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print the JSON report instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing on stdout; only the exit code matters.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a matrix from a named family and write it as a matrix file.
    Construct(ConstructArgs),
    /// Uniformity of adjacency, rotor, zak and stabilizer files; MDS property of generator files.
    Check {
        input: PathBuf,
        /// Check a single level instead of searching for the largest.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Squeezing threshold or fidelity sweep for teleportation over a cluster state.
    Fidelity(FidelityArgs),
    /// Look for a nullifier supported on the given modes.
    Nullifier {
        input: PathBuf,
        /// Modes, e.g. "1,2".
        #[arg(long)]
        set: String,
    },
    /// Reduce a stabilizer state to cluster form by local operations.
    ClusterForm {
        input: PathBuf,
        /// Also write the resulting adjacency matrix file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced-state purity of the finitely squeezed cluster state on each cut.
    Oracle {
        input: PathBuf,
        /// Uniform squeezing in dB.
        #[arg(long, default_value_t = 40.0)]
        db: f64,
        /// A single cut, e.g. "1,3"; default is every cut of size up to n/2.
        #[arg(long)]
        set: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Pascal,
    Hilbert,
    Cauchy,
    Hankel,
    Vandermonde,
    Expkernel,
    Gausskernel,
    Sqrtprimes,
    Random,
    Ghz,
    Mdsvandermonde,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    /// Rows of a generator matrix (mdsvandermonde).
    #[arg(long)]
    k: Option<usize>,
    /// Ratio for vandermonde (scalar) or gausskernel (0 < u < 1).
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated scalars for cauchy / expkernel rows.
    #[arg(long)]
    v: Option<String>,
    /// Column scalars for cauchy / expkernel; default v. When they differ
    /// the result is written as the generator (I | C).
    #[arg(long)]
    w: Option<String>,
    /// Sequence for hankel, at least 2n - 1 terms.
    #[arg(long)]
    values: Option<String>,
    /// Nodes for mdsvandermonde.
    #[arg(long)]
    nodes: Option<String>,
    /// Write the stabilizer (A | -I) or (0 | -G; h | 0) instead.
    #[arg(long)]
    stabilizer: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FidelityArgs {
    input: PathBuf,
    /// Target fidelity for the threshold search.
    #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
    target: Option<f64>,
    /// dB grid "min:max:step", written as CSV.
    #[arg(long)]
    sweep: Option<String>,
    /// Sender:receiver pairs, e.g. "1:3,2:4"; default first half to second half.
    #[arg(long)]
    pairing: Option<String>,
    /// CSV destination for --sweep.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Status {
    Pass,
    Fail,
}

struct Emit<'a> {
    json: bool,
    quiet: bool,
    out: &'a mut dyn Write,
}

impl Emit<'_> {
    fn report<T: serde::Serialize>(&mut self, report: &Report<T>, text: &str) -> Result<(), CliError> {
        if self.quiet {
            return Ok(());
        }
        let body = if self.json { to_json(report) } else { text.to_string() };
        self.raw(&body)
    }

    fn raw(&mut self, body: &str) -> Result<(), CliError> {
        self.out.write_all(body.as_bytes()).map_err(|e| CliError::Io("stdout".into(), e))
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            return 2;
        }
    };
    match execute(&cli, out, err) {
        Ok(Status::Pass) => 0,
        Ok(Status::Fail) => 1,
        Err(e) => {
            let _ = writeln!(err, "cvame: error: {e}");
            2
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status, CliError> {
    let backend = backend_override(cli.backend, cli.tol)?;
    let mut emit = Emit { json: cli.json, quiet: cli.quiet, out };
    match &cli.command {
        Command::Construct(args) => construct(args, backend, &mut emit),
        Command::Check { input, k } => check(&load(input, backend)?, *k, &mut emit),
        Command::Fidelity(args) => fidelity(args, backend, &mut emit, err),
        Command::Nullifier { input, set } => nullifier(&load(input, backend)?, set, &mut emit),
        Command::ClusterForm { input, out } => cluster_form(&load(input, backend)?, out.as_deref(), &mut emit),
        Command::Oracle { input, db, set } => oracle(&load(input, backend)?, *db, set.as_deref(), &mut emit),
    }
}

fn backend_override(backend: Option<BackendArg>, tol: Option<f64>) -> Result<Option<Backend>, CliError> {
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Input(format!("--tol must be positive, got {t}")));
        }
    }
    Ok(match (backend, tol) {
        (Some(BackendArg::Exact), Some(_)) => return Err(CliError::Input("--tol only applies to the float backend".into())),
        (Some(BackendArg::Exact), None) => Some(Backend::Exact),
        (Some(BackendArg::Float) | None, Some(t)) => Some(Backend::Float { tol: Some(t) }),
        (Some(BackendArg::Float), None) => Some(Backend::Float { tol: None }),
        (None, None) => None,
    })
}

fn load(path: &Path, backend: Option<Backend>) -> Result<Input, CliError> {
    MatrixFile::read(path)?.load(backend)
}

fn backend_label(b: Backend) -> String {
    match b {
        Backend::Exact => "exact".into(),
        Backend::Float { tol: None } => "float".into(),
        Backend::Float { tol: Some(t) } => format!("float(tol={t})"),
    }
}

fn input_backend(input: &Input) -> Backend {
    match input {
        Input::Adjacency(a) => a.matrix().backend(),
        Input::Generator(g) => g.matrix().backend(),
        Input::Stabilizer(h) => h.matrix().backend(),
        Input::Rotor(c) => c.matrix().backend(),
        Input::Zak(z) => z.a().matrix().backend(),
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn one_based(s: &[usize]) -> Vec<usize> {
    s.iter().map(|i| i + 1).collect()
}

fn set_text(s: &[usize]) -> String {
    let inner: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Parses "1,3" into sorted 0-based modes below `n`.
fn parse_modes(text: &str, n: usize) -> Result<Vec<usize>, CliError> {
    let mut modes = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let m: usize = part.parse().map_err(|_| CliError::Input(format!("bad mode {part:?}")))?;
        if m == 0 || m > n {
            return Err(CliError::Input(format!("mode {m} out of range 1..={n}")));
        }
        if modes.contains(&(m - 1)) {
            return Err(CliError::Input(format!("mode {m} listed twice")));
        }
        modes.push(m - 1);
    }
    if modes.is_empty() {
        return Err(CliError::Input("empty mode set".into()));
    }
    modes.sort_unstable();
    Ok(modes)
}

fn parse_scalars(text: &str, flag: &str) -> Result<Vec<Scalar>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<Scalar>().map_err(|e| CliError::Input(format!("--{flag}: {e}"))))
        .collect()
}

fn witnesses(report: &UniformityReport) -> Vec<WitnessOut> {
    report.witnesses.iter().map(|w| WitnessOut { k: w.k, subset: one_based(&w.subset) }).collect()
}

fn uniformity_text(label: &str, n: usize, k_max: usize, is_ame: bool, ws: &[WitnessOut]) -> String {
    let mut s = format!("{label} n={n}: k_max={k_max}, AME: {}\n", if is_ame { "yes" } else { "no" });
    for w in ws {
        let zero: Vec<usize> = w.subset.iter().map(|i| i - 1).collect();
        s.push_str(&format!("  k={} fails on {}\n", w.k, set_text(&zero)));
    }
    s
}

fn status(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

// construct

fn require<T: Copy>(v: Option<T>, family: &str, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Input(format!("{family} needs --{flag}")))
}

fn require_str<'a>(v: &'a Option<String>, family: &str, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::Input(format!("{family} needs --{flag}")))
}

/// `(I_k | C)` for a non-symmetric kernel block.
fn stacked_generator(c: &Matrix) -> Result<GeneratorMatrix, CliError> {
    let k = c.rows();
    let mut entries = Vec::with_capacity(k * (k + c.cols()));
    for i in 0..k {
        entries.extend((0..k).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
        entries.extend(c.row(i).iter().cloned());
    }
    let g = Matrix::new(k, k + c.cols(), entries)?.with_backend(c.backend())?;
    Ok(GeneratorMatrix::new(g)?)
}

fn kernel_file(c: Matrix, symmetric: bool) -> Result<MatrixFile, CliError> {
    if symmetric {
        Ok(MatrixFile::adjacency(&AdjacencyMatrix::new(c)?))
    } else {
        Ok(MatrixFile::generator(&stacked_generator(&c)?))
    }
}

fn construct(args: &ConstructArgs, backend: Option<Backend>, emit: &mut Emit) -> Result<Status, CliError> {
    let name = format!("{:?}", args.family).to_lowercase();
    let name = name.as_str();
    let mut file = match args.family {
        Family::Pascal => MatrixFile::adjacency(&pascal(require(args.n, name, "n")?)?),
        Family::Hilbert => MatrixFile::adjacency(&hilbert(require(args.n, name, "n")?)?),
        Family::Sqrtprimes => MatrixFile::adjacency(&sqrt_primes(require(args.n, name, "n")?)?),
        Family::Random => {
            MatrixFile::adjacency(&random_adjacency(require(args.n, name, "n")?, require(args.seed, name, "seed")?)?)
        }
        Family::Vandermonde => {
            let u: Scalar = require_str(&args.u, name, "u")?.parse()?;
            MatrixFile::adjacency(&vandermonde_sym(&u, require(args.n, name, "n")?)?)
        }
        Family::Gausskernel => {
            let u: Scalar = require_str(&args.u, name, "u")?.parse()?;
            MatrixFile::adjacency(&gauss_kernel(u.to_f64(), require(args.n, name, "n")?)?)
        }
        Family::Hankel => {
            let seq = parse_scalars(require_str(&args.values, name, "values")?, "values")?;
            MatrixFile::adjacency(&hankel(&seq, require(args.n, name, "n")?)?)
        }
        Family::Cauchy => {
            let v = parse_scalars(require_str(&args.v, name, "v")?, "v")?;
            let w = match &args.w {
                Some(w) => parse_scalars(w, "w")?,
                None => v.clone(),
            };
            kernel_file(cauchy(&v, &w)?, v == w)?
        }
        Family::Expkernel => {
            let v = parse_scalars(require_str(&args.v, name, "v")?, "v")?;
            let w = match &args.w {
                Some(w) => parse_scalars(w, "w")?,
                None => v.clone(),
            };
            let vf: Vec<f64> = v.iter().map(Scalar::to_f64).collect();
            let wf: Vec<f64> = w.iter().map(Scalar::to_f64).collect();
            kernel_file(exp_kernel(&vf, &wf), vf == wf)?
        }
        Family::Ghz => MatrixFile::generator(&ghz_generator(require(args.n, name, "n")?)?),
        Family::Mdsvandermonde => {
            let nodes = parse_scalars(require_str(&args.nodes, name, "nodes")?, "nodes")?;
            let nodes = nodes
                .iter()
                .map(|s| s.as_rational().cloned().ok_or_else(|| CliError::Input("--nodes must be rational".into())))
                .collect::<Result<Vec<_>, _>>()?;
            let n = args.n.unwrap_or(nodes.len());
            MatrixFile::generator(&mds_vandermonde_generator(require(args.k, name, "k")?, n, &nodes)?)
        }
    };
    if backend.is_some() || args.stabilizer {
        let input = file.load(backend)?;
        file = match (input, args.stabilizer) {
            (Input::Adjacency(a), true) => MatrixFile::stabilizer(&StabilizerGenerators::from_cluster(&a)),
            (Input::Generator(g), true) => MatrixFile::stabilizer(&StabilizerGenerators::from_mds(&g)),
            (Input::Adjacency(a), false) => MatrixFile::adjacency(&a),
            (Input::Generator(g), false) => MatrixFile::generator(&g),
            _ => unreachable!("construct only builds adjacency and generator matrices"),
        };
    }
    let text = file.to_json();
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            if !emit.quiet && !emit.json {
                emit.raw(&format!("wrote {} {} (n={}) to {}\n", name, file.kind, file.n, path.display()))?;
            }
        }
        None if !emit.quiet => emit.raw(&text)?,
        None => {}
    }
    Ok(Status::Pass)
}

// check

fn check(input: &Input, k: Option<usize>, emit: &mut Emit) -> Result<Status, CliError> {
    let start = Instant::now();
    let backend = backend_label(input_backend(input));
    let level = |n: usize, k: usize, holds: bool, witness: Option<Vec<usize>>, side: Option<String>| {
        let text = match &witness {
            None => format!("n={n}: {k}-uniform: yes\n"),
            Some(w) => format!(
                "n={n}: {k}-uniform: no, fails on {}{}\n",
                set_text(w),
                side.as_ref().map(|s| format!(" ({s} side)")).unwrap_or_default()
            ),
        };
        (CheckResult::Level { n, k, holds, witness: witness.map(|w| one_based(&w)), witness_side: side }, text)
    };
    let side_name = |s: ZakSide| match s {
        ZakSide::A => "A".to_string(),
        ZakSide::P => "P".to_string(),
    };
    let (result, text) = match (input, k) {
        (Input::Adjacency(a), Some(k)) => {
            let v = is_k_uniform_cluster(a, k)?;
            level(a.n(), k, v.holds, v.witness, None)
        }
        (Input::Adjacency(a), None) => {
            let r = max_uniformity(a);
            let ws = witnesses(&r);
            let text = uniformity_text("adjacency", r.n, r.k_max, r.is_ame, &ws);
            (CheckResult::Uniformity { n: r.n, k_max: r.k_max, is_ame: r.is_ame, witnesses: ws }, text)
        }
        (Input::Rotor(c), Some(k)) => {
            let v = rotor_k_uniform(c, k)?;
            level(c.n(), k, v.holds, v.witness, None)
        }
        (Input::Rotor(c), None) => {
            let r = rotor_max_uniformity(c);
            let ws = witnesses(&r);
            let text = uniformity_text("rotor", r.n, r.k_max, r.is_ame, &ws);
            (CheckResult::Uniformity { n: r.n, k_max: r.k_max, is_ame: r.is_ame, witnesses: ws }, text)
        }
        (Input::Zak(z), Some(k)) => {
            let v = zak_k_uniform(z, k)?;
            let (side, w) = v.witness.map(|(s, w)| (Some(side_name(s)), Some(w))).unwrap_or((None, None));
            level(z.n(), k, v.holds, w, side)
        }
        (Input::Zak(z), None) => {
            let (k_max, w) = zak_max_uniformity(z)?;
            let n = z.n();
            let is_ame = k_max == n / 2;
            let side = w.as_ref().map(|(s, _)| side_name(*s));
            let witness = w.map(|(_, w)| WitnessOut { k: w.k, subset: one_based(&w.subset) });
            let mut text = uniformity_text("zak", n, k_max, is_ame, &[]);
            if let (Some(s), Some(w)) = (&side, &witness) {
                let zero: Vec<usize> = w.subset.iter().map(|i| i - 1).collect();
                text.push_str(&format!("  k={} fails on {} ({s} side)\n", w.k, set_text(&zero)));
            }
            (CheckResult::Zak { n, k_max, is_ame, witness_side: side, witness }, text)
        }
        (Input::Generator(g), None) => {
            let v = is_mds_generator(g);
            let text = match &v.witness {
                None => format!("generator k={} n={}: MDS: yes\n", g.k(), g.n()),
                Some(w) => format!("generator k={} n={}: MDS: no, columns {} are dependent\n", g.k(), g.n(), set_text(w)),
            };
            (CheckResult::Mds { n: g.n(), k: g.k(), mds: v.holds, witness: v.witness.map(|w| one_based(&w)) }, text)
        }
        (Input::Generator(_), Some(_)) => return Err(CliError::Input("--k does not apply to generator files".into())),
        (Input::Stabilizer(h), k) => {
            let sr = h.uniformity()?;
            match k {
                Some(k) => {
                    let v = is_k_uniform_cluster(&sr.cluster.adjacency, k)?;
                    level(h.n(), k, v.holds, v.witness, None)
                }
                None => {
                    let r = &sr.report;
                    let ws = witnesses(r);
                    let d = h.pure_distance()?;
                    let fourier = one_based(&sr.cluster.fourier_modes());
                    let mut text = uniformity_text("stabilizer", r.n, r.k_max, r.is_ame, &ws);
                    text.push_str(&format!("  pure distance {d}\n"));
                    let result = CheckResult::Stabilizer {
                        n: r.n,
                        k_max: r.k_max,
                        is_ame: r.is_ame,
                        witnesses: ws,
                        pure_distance: d,
                        fourier_modes: fourier,
                    };
                    (result, text)
                }
            }
        }
    };
    let pass = result.passed();
    emit.report(&Report::new("check", backend, ms(start), result), &text)?;
    Ok(status(pass))
}

// fidelity

fn parse_pairing(text: &str, n: usize) -> Result<Pairing, CliError> {
    let mut pairs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (a, b) = part.split_once(':').ok_or_else(|| CliError::Input(format!("pair {part:?} is not sender:receiver")))?;
        let parse = |s: &str| -> Result<usize, CliError> {
            let m: usize = s.trim().parse().map_err(|_| CliError::Input(format!("bad mode {s:?} in pairing")))?;
            if m == 0 || m > n {
                return Err(CliError::Input(format!("mode {m} out of range 1..={n} in pairing")));
            }
            Ok(m - 1)
        };
        pairs.push((parse(a)?, parse(b)?));
    }
    Pairing::new(n, &pairs).map_err(|e| CliError::Input(e.to_string()))
}

fn parse_sweep(text: &str) -> Result<(f64, f64, f64), CliError> {
    let bad = || CliError::Input(format!("--sweep expects min:max:step, got {text:?}"));
    let parts: Vec<f64> = text.split(':').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err(bad()),
    }
}

fn pairing_out(p: &Pairing) -> PairingOut {
    PairingOut {
        pairs: p.senders().iter().zip(p.receivers()).map(|(&a, &b)| (a + 1, b + 1)).collect(),
        ancilla: p.ancilla().map(|c| c + 1),
    }
}

/// Failures of the physics rather than of the input: exit 1.
fn physics_failure(e: &Error) -> bool {
    matches!(e, Error::NotExtractable | Error::TargetUnreachable { .. } | Error::NonMonotone { .. })
}

fn fidelity(args: &FidelityArgs, backend: Option<Backend>, emit: &mut Emit, err: &mut dyn Write) -> Result<Status, CliError> {
    let start = Instant::now();
    let a = match load(&args.input, backend)? {
        Input::Adjacency(a) => a,
        _ => return Err(CliError::Input("fidelity needs an adjacency file".into())),
    };
    let n = a.n();
    let pairing = match &args.pairing {
        Some(p) => parse_pairing(p, n)?,
        None => Pairing::default_for(n)?,
    };
    let fail = |e: Error, err: &mut dyn Write| -> Result<Status, CliError> {
        if physics_failure(&e) {
            let _ = writeln!(err, "cvame: {e}");
            Ok(Status::Fail)
        } else {
            Err(e.into())
        }
    };
    let channel = match TeleportationChannel::new(&a, &pairing) {
        Ok(c) => c,
        Err(e) => return fail(e, err),
    };
    if !channel.is_ame() {
        let _ = writeln!(err, "cvame: warning: the state is not AME; fidelity is computed anyway");
    }
    if let Some(grid) = &args.sweep {
        let (lo, hi, step) = parse_sweep(grid)?;
        let rows = fidelity_sweep(&channel, lo, hi, step)?;
        let mut csv = csv::Writer::from_writer(Vec::new());
        csv.write_record(["db", "fidelity"]).expect("in-memory csv");
        for (db, f) in &rows {
            csv.write_record([db.to_string(), f.to_string()]).expect("in-memory csv");
        }
        let bytes = csv.into_inner().expect("in-memory csv");
        match &args.out {
            Some(path) => {
                std::fs::write(path, &bytes).map_err(|e| CliError::Io(path.display().to_string(), e))?;
                if !emit.quiet {
                    emit.raw(&format!("wrote {} rows to {}\n", rows.len(), path.display()))?;
                }
            }
            None if !emit.quiet => emit.raw(&String::from_utf8(bytes).expect("ascii csv"))?,
            None => {}
        }
        return Ok(Status::Pass);
    }
    let target = args.target.expect("clap requires --target without --sweep");
    let threshold = match squeezing_threshold(&channel, target) {
        Ok(t) => t,
        Err(e) => return fail(e, err),
    };
    let r = SqueezeParam::from_db(threshold)?;
    let note = pairing
        .ancilla()
        .map(|c| format!("mode {} is left momentum-squeezed (nullifier p_{}), fixed by symplectic completion", c + 1, c + 1));
    let result = ThresholdResult {
        target,
        threshold_db: threshold,
        r: r.r(),
        fidelity_at_threshold: channel.fidelity(r),
        pairing: pairing_out(&pairing),
        is_ame: channel.is_ame(),
        note,
    };
    let text = format!("fidelity {target} reached at {threshold:.3} dB (r = {:.6})\n", r.r());
    let backend = backend_label(a.matrix().backend());
    emit.report(&Report::new("fidelity", backend, ms(start), result), &text)?;
    Ok(Status::Pass)
}

// nullifier

fn as_stabilizer(input: &Input) -> Result<StabilizerGenerators, CliError> {
    match input {
        Input::Stabilizer(h) => Ok(h.clone()),
        Input::Adjacency(a) => Ok(StabilizerGenerators::from_cluster(a)),
        Input::Generator(g) => Ok(StabilizerGenerators::from_mds(g)),
        _ => Err(CliError::Input("expected a stabilizer, adjacency or generator file".into())),
    }
}

/// "x1 - x2 + 3/2 p4" style rendering of a quadrature vector.
fn quadrature_text(v: &[Scalar], n: usize) -> String {
    let mut s = String::new();
    for (i, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let name = if i < n { format!("x{}", i + 1) } else { format!("p{}", i - n + 1) };
        let raw = c.to_string();
        let (neg, mag) = match raw.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, raw),
        };
        let coeff = if mag == "1" { String::new() } else { format!("{mag} ") };
        match (s.is_empty(), neg) {
            (true, false) => {}
            (true, true) => s.push('-'),
            (false, false) => s.push_str(" + "),
            (false, true) => s.push_str(" - "),
        }
        s.push_str(&coeff);
        s.push_str(&name);
    }
    s
}

fn nullifier(input: &Input, set: &str, emit: &mut Emit) -> Result<Status, CliError> {
    let start = Instant::now();
    let h = as_stabilizer(input)?;
    let support = parse_modes(set, h.n())?;
    let found = h.local_nullifier(&support)?;
    let text = match &found {
        Some(nl) => format!("nullifier on {}: {}\n", set_text(&support), quadrature_text(&nl.nullifier, h.n())),
        None => format!("nullifier on {}: none\n", set_text(&support)),
    };
    let strings = |v: &[Scalar]| v.iter().map(Scalar::to_string).collect::<Vec<_>>();
    let result = NullifierResult {
        support: one_based(&support),
        found: found.is_some(),
        coefficients: found.as_ref().map(|nl| strings(&nl.coefficients)),
        nullifier: found.as_ref().map(|nl| strings(&nl.nullifier)),
    };
    emit.report(&Report::new("nullifier", backend_label(h.matrix().backend()), ms(start), result), &text)?;
    Ok(status(found.is_some()))
}

// cluster-form

fn cluster_form(input: &Input, out: Option<&Path>, emit: &mut Emit) -> Result<Status, CliError> {
    let start = Instant::now();
    let h = as_stabilizer(input)?;
    let form = h.cluster_form()?;
    let adjacency = MatrixFile::adjacency(&form.adjacency);
    if let Some(path) = out {
        std::fs::write(path, adjacency.to_json()).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    }
    let log: Vec<OpOut> = form
        .log
        .iter()
        .map(|op| match op {
            LocalOp::Fourier(m) => OpOut::Fourier { modes: one_based(m) },
            LocalOp::RowBasisChange(r) => {
                OpOut::RowBasisChange { matrix: (0..r.rows()).map(|i| r.row(i).iter().map(Scalar::to_string).collect()).collect() }
            }
        })
        .collect();
    let mut text = String::from("cluster form adjacency:\n");
    for row in &adjacency.entries {
        text.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    if log.is_empty() {
        text.push_str("no local operations needed\n");
    }
    for op in &log {
        match op {
            OpOut::Fourier { modes } => {
                let zero: Vec<usize> = modes.iter().map(|m| m - 1).collect();
                text.push_str(&format!("Fourier on {}\n", set_text(&zero)));
            }
            OpOut::RowBasisChange { .. } => text.push_str("row basis change (see --json)\n"),
        }
    }
    let backend = backend_label(h.matrix().backend());
    emit.report(&Report::new("cluster-form", backend, ms(start), ClusterFormResult { adjacency, log }), &text)?;
    Ok(Status::Pass)
}

// oracle

fn oracle(input: &Input, db: f64, set: Option<&str>, emit: &mut Emit) -> Result<Status, CliError> {
    let start = Instant::now();
    let a = match input {
        Input::Adjacency(a) => a,
        _ => return Err(CliError::Input("oracle needs an adjacency file".into())),
    };
    let n = a.n();
    let r = SqueezeParam::from_db(db)?;
    let cuts: Vec<Vec<usize>> = match set {
        Some(s) => vec![parse_modes(s, n)?],
        None => (1..=n / 2).flat_map(|k| Combinations::new(n, k)).collect(),
    };
    let mut text = format!("purity at {db} dB\n");
    let mut out = Vec::with_capacity(cuts.len());
    for s in cuts {
        let purity = uniformity_oracle(a, &s, r)?;
        let full_rank = a.matrix().submatrix(&complement(n, &s), &s)?.rank() == s.len().min(n - s.len());
        text.push_str(&format!("  {:<12} {purity:.3e}  {}\n", set_text(&s), if full_rank { "full rank" } else { "deficient" }));
        out.push(OracleCut { subset: one_based(&s), purity, full_rank });
    }
    let backend = backend_label(a.matrix().backend());
    emit.report(&Report::new("oracle", backend, ms(start), OracleResult { db, cuts: out }), &text)?;
    Ok(Status::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_lists() {
        assert_eq!(parse_modes("3, 1", 4).unwrap(), vec![0, 2]);
        assert!(parse_modes("0", 4).is_err());
        assert!(parse_modes("5", 4).is_err());
        assert!(parse_modes("1,1", 4).is_err());
        assert!(parse_modes("", 4).is_err());
    }

    #[test]
    fn pairings() {
        let p = parse_pairing("1:3,2:4", 4).unwrap();
        assert_eq!((p.senders(), p.receivers()), (&[0, 1][..], &[2, 3][..]));
        assert!(parse_pairing("1:3", 4).is_err());
        assert!(parse_pairing("1-3,2:4", 4).is_err());
        assert!(parse_pairing("1:3,1:4", 4).is_err());
        assert_eq!(parse_pairing("1:2", 3).unwrap().ancilla(), Some(2));
    }

    #[test]
    fn sweeps() {
        assert_eq!(parse_sweep("0:60:0.5").unwrap(), (0.0, 60.0, 0.5));
        assert!(parse_sweep("0:60").is_err());
        assert!(parse_sweep("a:b:c").is_err());
    }

    #[test]
    fn quadrature_rendering() {
        let v = vec![Scalar::one(), Scalar::int(-1), Scalar::zero(), Scalar::ratio(3, 2).unwrap()];
        assert_eq!(quadrature_text(&v, 2), "x1 - x2 + 3/2 p2");
        let v = vec![Scalar::int(-2), Scalar::zero()];
        assert_eq!(quadrature_text(&v, 1), "-2 x1");
    }

    #[test]
    fn backend_flags() {
        assert_eq!(backend_override(None, None).unwrap(), None);
        assert_eq!(backend_override(None, Some(1e-6)).unwrap(), Some(Backend::Float { tol: Some(1e-6) }));
        assert!(backend_override(Some(BackendArg::Exact), Some(1e-6)).is_err());
        assert!(backend_override(None, Some(-1.0)).is_err());
    }
}
