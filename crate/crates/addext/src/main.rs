//! Command-line front end: construct instances, run decisions and
//! verification campaigns, emit JSON or text reports.
//!
//! Exit codes: 0 = pass/success, 1 = a verified-false decision (the map does
//! not extend, the map is not an isometry, a campaign found failures),
//! 2 = usage or input errors, 3 = could not decide (budget or size guards).

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use addext::field::{default_k_poly, enumerate_galois, KField};
use addext::harness::{self, Campaign, Mode, TheoremId, Verdict};
use addext::isometry::{
    brute_force_extension_with_pool, decide_extendible, is_isometry_direct, IsometryError,
};
use addext::partitions;
use addext::wire::{subspace_rows, CodeJson, FieldJson, MapJson, MonomialJson};
use addext::{AdditiveCode, AdditiveMap, Exec, FieldTower, SpaceTuple, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "addext", version, about = "Additive-code isometry extendibility toolkit")]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Print timing to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct FieldOpts {
    /// Field description JSON file (overrides --p/--s/--m).
    #[arg(long)]
    field: Option<PathBuf>,
    /// Characteristic.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Degree of K over GF(p).
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Degree of L over K.
    #[arg(long, default_value_t = 2)]
    m: usize,
}

impl FieldOpts {
    fn tower(&self) -> Result<FieldTower, CliError> {
        if let Some(path) = &self.field {
            let fj: FieldJson = serde_json::from_str(&read_input(path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            return fj.to_tower().map_err(|e| CliError::Input(e.to_string()));
        }
        FieldTower::with_defaults(self.p, self.s, self.m)
            .map_err(|e| CliError::Input(e.to_string()))
    }

    fn kfield(&self) -> Result<KField, CliError> {
        let k_poly = default_k_poly(self.p, self.s).map_err(|e| CliError::Input(e.to_string()))?;
        KField::new(self.p, &k_poly).map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a named instance as code/map JSON.
    Make {
        #[command(subcommand)]
        what: MakeCmd,
    },
    /// Validate a code file and print its profile.
    CheckCode {
        #[arg(long)]
        code: PathBuf,
    },
    /// Validate a map file and decide whether it is an isometry.
    CheckMap {
        #[arg(long)]
        map: PathBuf,
    },
    /// Decide extendibility of an isometry; exit 1 when it does not extend.
    Extend {
        #[arg(long)]
        map: PathBuf,
        /// Search for an explicit monomial witness.
        #[arg(long)]
        witness: bool,
        /// Restrict coordinate maps to field automorphisms (comparison mode).
        #[arg(long)]
        galois_only: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Exact minimum number of parts in a subspace partition of K^m.
    Sigma {
        #[command(flatten)]
        field: FieldOpts,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Run a verification campaign.
    Verify {
        /// One of: prop1 prop2 prop3 prop4 prop5 lemma_mds lemma_linear threshold_n.
        #[arg(long)]
        theorem: String,
        #[command(flatten)]
        field: FieldOpts,
        /// Code length (or n_max for threshold_n).
        #[arg(long)]
        n: usize,
        /// Cap on the K-dimension of enumerated codes (k for threshold_n).
        #[arg(long, default_value_t = 2)]
        k_max: usize,
        /// L-analogue dimension for the MDS / L-linear instances.
        #[arg(long, default_value_t = 1)]
        kl: usize,
        /// exhaustive | pruned | sampled
        #[arg(long, default_value = "pruned")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Scan tuple lengths for the first nontrivial profile-equal pair.
    ScanThreshold {
        #[command(flatten)]
        field: FieldOpts,
        /// Ambient K-dimension of the tuples.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand)]
enum MakeCmd {
    /// The extendible showcase pair over F_4 / F_2.
    Example1,
    /// The unextendible length-(q+1) pair.
    Counterexample {
        #[command(flatten)]
        field: FieldOpts,
    },
    /// Evaluation (MDS) code over the first n elements of L.
    Rs {
        #[command(flatten)]
        field: FieldOpts,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kl: usize,
    },
}

enum CliError {
    Input(String),
    Undecidable(String),
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_code_or_map(text: &str) -> Result<(AdditiveCode, Option<AdditiveMap>), CliError> {
    if let Ok(mj) = serde_json::from_str::<MapJson>(text) {
        if let Ok(map) = mj.to_map() {
            return Ok((map.domain().clone(), Some(map)));
        }
    }
    let cj: CodeJson =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("code JSON: {e}")))?;
    let code = cj.to_code().map_err(|e| CliError::Input(e.to_string()))?;
    Ok((code, None))
}

struct Output {
    target: Option<PathBuf>,
    buf: String,
}

impl Output {
    fn line(&mut self, s: impl AsRef<str>) {
        self.buf.push_str(s.as_ref());
        self.buf.push('\n');
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) {
        self.line(serde_json::to_string(value).expect("serializable"));
    }

    fn flush(self) -> Result<(), CliError> {
        match self.target {
            Some(path) => fs::write(&path, self.buf)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
            None => {
                print!("{}", self.buf);
                Ok(())
            }
        }
    }
}

fn tuple_lines(label: &str, tuple: &SpaceTuple) -> Vec<String> {
    let mut out = vec![format!("{label} dims: {:?}", tuple.dims())];
    for (i, s) in tuple.spaces().iter().enumerate() {
        out.push(format!("  {label}[{i}] basis rows: {:?}", subspace_rows(s)));
    }
    out
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut out = Output {
        target: cli.output.clone(),
        buf: String::new(),
    };
    let code = match cli.cmd {
        Cmd::Make { what } => {
            let instance = match what {
                MakeCmd::Example1 => addext::constructions::example1_instance(),
                MakeCmd::Counterexample { field } => {
                    addext::constructions::counterexample_instance(&field.tower()?)
                        .map_err(|e| CliError::Input(e.to_string()))?
                }
                MakeCmd::Rs { field, n, kl } => {
                    addext::constructions::rs_instance(&field.tower()?, n, kl)
                        .map_err(|e| CliError::Input(e.to_string()))?
                }
            };
            match &instance.map {
                Some(map) => out.emit_json(&MapJson::from_map(map)),
                None => out.emit_json(&CodeJson::from_code(&instance.code)),
            }
            0
        }
        Cmd::CheckCode { code } => {
            let (code, _) = parse_code_or_map(&read_input(&code)?)?;
            let profile = code.mds_profile();
            let tuple = code.column_tuple();
            if cli.json {
                #[derive(Serialize)]
                struct CheckOut {
                    n: usize,
                    k: usize,
                    q: u32,
                    m: usize,
                    cardinality: String,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    min_distance: Option<usize>,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    k_l: Option<usize>,
                    is_mds: bool,
                    l_linear: bool,
                    column_dims: Vec<usize>,
                }
                let p = profile.as_ref().ok().copied();
                out.emit_json(&CheckOut {
                    n: code.n(),
                    k: code.k(),
                    q: code.tower().q(),
                    m: code.tower().m(),
                    cardinality: code.cardinality().to_string(),
                    min_distance: p.map(|p| p.d),
                    k_l: p.map(|p| p.k_l),
                    is_mds: p.map(|p| p.is_mds).unwrap_or(false),
                    l_linear: code.is_l_linear().map_err(|e| CliError::Undecidable(e.to_string()))?,
                    column_dims: tuple.dims(),
                });
            } else {
                out.line(format!(
                    "valid code: n={}, k={}, |C|={}, q={}, m={}",
                    code.n(),
                    code.k(),
                    code.cardinality(),
                    code.tower().q(),
                    code.tower().m()
                ));
                match profile {
                    Ok(p) => {
                        let why = if p.is_mds {
                            String::new()
                        } else if code.k() % code.tower().m() != 0 {
                            format!(
                                " (k={} is not a multiple of m={}, Singleton equality impossible)",
                                code.k(),
                                code.tower().m()
                            )
                        } else {
                            String::new()
                        };
                        out.line(format!(
                            "min distance d={}, k_L={}, MDS: {}{}",
                            p.d, p.k_l, p.is_mds, why
                        ));
                    }
                    Err(e) => out.line(format!("min distance unavailable: {e}")),
                }
                out.line(format!(
                    "L-linear: {}",
                    code.is_l_linear().map_err(|e| CliError::Undecidable(e.to_string()))?
                ));
                for l in tuple_lines("V", &tuple) {
                    out.line(l);
                }
            }
            0
        }
        Cmd::CheckMap { map } => {
            let (_, map) = parse_code_or_map(&read_input(&map)?)?;
            let map = map.ok_or_else(|| CliError::Input("file holds no map images".into()))?;
            let iso = is_isometry_direct(&map).map_err(|e| CliError::Undecidable(e.to_string()))?;
            if cli.json {
                #[derive(Serialize)]
                struct CheckMapOut {
                    is_isometry: bool,
                    k: usize,
                    n: usize,
                }
                out.emit_json(&CheckMapOut {
                    is_isometry: iso,
                    k: map.domain().k(),
                    n: map.domain().n(),
                });
            } else {
                out.line(format!("valid map on k={} rows", map.domain().k()));
                out.line(format!("isometry: {iso}"));
            }
            u8::from(!iso)
        }
        Cmd::Extend {
            map,
            witness,
            galois_only,
            budget,
        } => {
            let (_, map) = parse_code_or_map(&read_input(&map)?)?;
            let map = map.ok_or_else(|| CliError::Input("file holds no map images".into()))?;
            let decision = match decide_extendible(&map) {
                Ok(d) => d,
                Err(IsometryError::NotAnIsometry) => {
                    return Err(CliError::Input(
                        "map is not an isometry; extendibility is decided for isometries only"
                            .into(),
                    ))
                }
                Err(e) => return Err(CliError::Undecidable(e.to_string())),
            };
            let monomial_witness = if witness && decision.extends {
                let pool = if galois_only {
                    enumerate_galois(map.domain().tower())
                } else {
                    addext::field::enumerate_gl(map.domain().tower())
                        .map_err(|e| CliError::Undecidable(e.to_string()))?
                };
                brute_force_extension_with_pool(&map, &pool, budget, Exec::default())
                    .map_err(|e| CliError::Undecidable(e.to_string()))?
            } else {
                None
            };
            if cli.json {
                #[derive(Serialize)]
                struct ExtendOut {
                    extends: bool,
                    v_dims: Vec<usize>,
                    u_dims: Vec<usize>,
                    v: Vec<Vec<Vec<u32>>>,
                    u: Vec<Vec<Vec<u32>>>,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    witness: Option<MonomialJson>,
                }
                out.emit_json(&ExtendOut {
                    extends: decision.extends,
                    v_dims: decision.domain_tuple.dims(),
                    u_dims: decision.image_tuple.dims(),
                    v: decision.domain_tuple.spaces().iter().map(subspace_rows).collect(),
                    u: decision.image_tuple.spaces().iter().map(subspace_rows).collect(),
                    witness: monomial_witness.as_ref().map(MonomialJson::from_monomial),
                });
            } else {
                out.line(format!("extends: {}", decision.extends));
                for l in tuple_lines("V", &decision.domain_tuple) {
                    out.line(l);
                }
                for l in tuple_lines("U", &decision.image_tuple) {
                    out.line(l);
                }
                if let Some(w) = &monomial_witness {
                    out.line(format!(
                        "witness: {}",
                        serde_json::to_string(&MonomialJson::from_monomial(w)).expect("json")
                    ));
                }
            }
            u8::from(!decision.extends)
        }
        Cmd::Sigma { field, budget } => {
            let k = field.kfield()?;
            let m = field.m;
            let result = partitions::sigma(&k, m, budget)
                .map_err(|e| CliError::Undecidable(e.to_string()))?;
            let bound = partitions::beutelspacher_bound(k.q(), m)
                .map_err(|e| CliError::Input(e.to_string()))?;
            if cli.json {
                #[derive(Serialize)]
                struct SigmaOut {
                    q: u32,
                    m: usize,
                    sigma: usize,
                    lower_bound: u64,
                    partition: Vec<Vec<Vec<u32>>>,
                }
                out.emit_json(&SigmaOut {
                    q: k.q(),
                    m,
                    sigma: result.sigma,
                    lower_bound: bound,
                    partition: result.witness.parts.iter().map(subspace_rows).collect(),
                });
            } else {
                out.line(format!("sigma({}, m={m}) = {}", k.q(), result.sigma));
                out.line(format!("lower bound q^ceil(m/2)+1 = {bound}"));
                out.line("attaining partition:");
                for p in &result.witness.parts {
                    out.line(format!("  dim {}: rows {:?}", p.dim(), subspace_rows(p)));
                }
            }
            0
        }
        Cmd::Verify {
            theorem,
            field,
            n,
            k_max,
            kl,
            mode,
            seed,
            samples,
            budget,
        } => {
            let theorem = TheoremId::parse(&theorem)
                .ok_or_else(|| CliError::Input(format!("unknown theorem id: {theorem}")))?;
            let mode = match mode.as_str() {
                "exhaustive" => Mode::Exhaustive,
                "pruned" => Mode::Pruned,
                "sampled" => Mode::Sampled { seed, samples },
                other => return Err(CliError::Input(format!("unknown mode: {other}"))),
            };
            let campaign = Campaign {
                theorem,
                tower: field.tower()?,
                n,
                k_max,
                k_l: kl,
                mode,
                budget,
            };
            let report = harness::verify_theorem(&campaign)
                .map_err(|e| CliError::Undecidable(e.to_string()))?;
            if cli.verbose {
                eprintln!("elapsed: {:?}", report.elapsed);
            }
            if cli.json {
                out.emit_json(&report);
            } else {
                out.line(format!(
                    "{}: {} — {} cases, {} failures",
                    report.theorem.as_str(),
                    match report.verdict {
                        Verdict::Pass => "pass",
                        Verdict::Fail => "FAIL",
                    },
                    report.cases_checked,
                    report.failures.len()
                ));
                if let Some(c) = &report.coverage {
                    out.line(format!("coverage: {:.6}", c.fraction));
                }
                for note in &report.notes {
                    out.line(format!("note: {note}"));
                }
                for f in &report.failures {
                    out.line(format!("failure[{}]: {}", f.case, f.note));
                }
            }
            u8::from(report.verdict == Verdict::Fail)
        }
        Cmd::ScanThreshold {
            field,
            k,
            n_max,
            budget,
        } => {
            let kf = field.kfield()?;
            let report = harness::threshold_n_scan(&kf, k, n_max, budget)
                .map_err(|e| CliError::Undecidable(e.to_string()))?;
            if cli.json {
                out.emit_json(&report);
            } else {
                out.line(format!(
                    "threshold scan (q={}, k={k}): {}",
                    kf.q(),
                    match report.verdict {
                        Verdict::Pass => "pass",
                        Verdict::Fail => "FAIL",
                    }
                ));
                for note in &report.notes {
                    out.line(note);
                }
            }
            u8::from(report.verdict == Verdict::Fail)
        }
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Undecidable(msg)) => {
            eprintln!("undecidable: {msg}");
            ExitCode::from(3)
        }
    }
}
