//! `jetinv`: certificates, invariant tables and embedding checks for the jet
//! reparametrization group, printed as JSON or CSV.
//!
//! Exit status: 0 on success (whatever the certificate says), 1 on a domain
//! error, 2 on bad flags, 3 when a resource cap refuses the computation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use jetinv::embed::{
    a_nk_membership, embedding_census, phi, plucker, plucker_of_jet, plucker_relations, z_point,
};
use jetinv::group::{compose, group_matrix, invert};
use jetinv::invariants::{
    dimension_table, generation_profile, invariant_basis_capped, is_annihilated,
    verify_invariance, DEFAULT_CAP,
};
use jetinv::jets::{
    act, elashvili_jet, infinitesimal_action, orbit_dim, singular_locus_codim, stabilizer_algebra,
    strata_histogram, trdeg,
};
use jetinv::lie::{
    algebra, bracket, cartan_certificate, derived_subalgebra, elashvili_adjoint, lie_basis,
    probe_strategy, probe_strategy_names, weyl_finiteness_certificate, LieElement,
};
use jetinv::linalg::{eliminator_names, set_active_eliminator};
use jetinv::rational::parse_rational_list;
use jetinv::sampling::{Sampler, DEFAULT_BOX};
use jetinv::{Error, Jet, Reparam, WeightedPoly};

#[derive(Parser, Debug)]
#[command(name = "jetinv", version, about = "Exact invariant theory of jet reparametrizations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Global {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exact elimination kernel.
    #[arg(long, global = true, default_value = "bareiss")]
    elim: String,
    /// Sampling box: rationals p/q with |p| <= B and 1 <= q <= B.
    #[arg(long = "box", global = true, default_value_t = DEFAULT_BOX)]
    bound: i64,
    /// Largest monomial space an invariant computation may build.
    #[arg(long, global = true, env = "JETINV_CAP", default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Reparametrizations and their matrices.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Structure of the Lie algebra g_k.
    #[command(subcommand)]
    Lie(LieCmd),
    /// The action on k-jets.
    #[command(subcommand)]
    Jets(JetsCmd),
    /// Unipotent invariants E_{k,m}.
    #[command(subcommand)]
    Invariants(InvCmd),
    /// Grassmannian embedding of regular jets.
    #[command(subcommand)]
    Embed(EmbedCmd),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GroupCmd {
    /// The matrix M(φ) of a reparametrization.
    Matrix {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Coefficients of f∘g.
    Compose {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Coefficients of the compositional inverse.
    Invert {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
}

#[derive(Args, Debug, Serialize)]
struct ProbeArgs {
    #[arg(long)]
    k: usize,
    /// Probe strategy name.
    #[arg(long, default_value = "e1")]
    probe: String,
    /// Explicit probe point as e-basis coordinates (overrides --probe).
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LieCmd {
    /// The basis e_1..e_k as matrices.
    Basis {
        #[arg(long)]
        k: usize,
    },
    /// The bracket [x, y] in e-basis coordinates.
    Bracket {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Centralizer and fixed-space dimensions at a probe point.
    ElashviliAdjoint(ProbeArgs),
    /// Whether the centralizer of a probe point is a Cartan subalgebra.
    Cartan(ProbeArgs),
    /// The derived subalgebra [g_k, g_k].
    Derived {
        #[arg(long)]
        k: usize,
    },
    /// Normalizer and Weyl group finiteness at a probe point.
    WeylCert(ProbeArgs),
}

#[derive(Args, Debug, Serialize)]
struct JetArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Taylor coefficients, row-major n x k.
    #[arg(long, allow_hyphen_values = true)]
    jet: String,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum JetsCmd {
    /// Act on a jet by a reparametrization.
    Act {
        #[command(flatten)]
        jet: JetArgs,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Orbit dimension and stabilizer algebra of a jet.
    Orbit(JetArgs),
    /// Stabilizer and fixed-space dimensions at a jet.
    Elashvili(JetArgs),
    /// Generic orbit codimension from seeded regular jets.
    Trdeg(SampleArgs),
    /// Histogram of orbit dimensions over regular and singular jets.
    Strata(SampleArgs),
    /// Codimension of the non-regular locus.
    Codim {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InvCmd {
    /// Dimensions of E_{k,m} and of the product span for m <= mmax.
    Dim {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mmax: u32,
    },
    /// A basis of E_{k,m}.
    Basis {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u32,
    },
    /// Check invariance under seeded unipotent elements, of a polynomial
    /// given as JSON (inline or a file path) or of the basis of E_{k,m}.
    Verify {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Degrees where E_{k,m} is not spanned by lower-degree products.
    Profile {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mmax: u32,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EmbedCmd {
    /// The columns of φ(J) in the symmetric algebra.
    Phi(JetArgs),
    /// Plücker coordinates of φ(J).
    Plucker(JetArgs),
    /// The point z_{n,k} and its membership in A_{n,k}.
    Zpoint {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Check that φ(J·g) and φ(J) agree projectively.
    CheckInvariance {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Number of jets and of group elements (all pairs are checked).
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check this jet against the sampled group elements instead.
        #[arg(long, allow_hyphen_values = true)]
        jet: Option<String>,
    },
}

enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => CliError::Usage(msg),
            other => CliError::Domain(other),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A computed payload plus the identifier of the property it bears on.
struct Output {
    claim: &'static str,
    json: Value,
    csv: Option<String>,
}

impl Output {
    fn json(claim: &'static str, value: impl Serialize) -> Self {
        Self {
            claim,
            json: serde_json::to_value(value).expect("serializable"),
            csv: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

fn positive(name: &str, v: usize) -> CliResult<()> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be >= 1")));
    }
    Ok(())
}

fn reparam(k: usize, s: &str) -> CliResult<Reparam> {
    positive("k", k)?;
    let coeffs = parse_rational_list(s)?;
    if coeffs.len() != k {
        return Err(CliError::Usage(format!(
            "expected {k} coefficients, got {}",
            coeffs.len()
        )));
    }
    Ok(Reparam::new(coeffs)?)
}

fn jet(args: &JetArgs) -> CliResult<Jet> {
    positive("k", args.k)?;
    positive("n", args.n)?;
    let values = parse_rational_list(&args.jet)?;
    if values.len() != args.n * args.k {
        return Err(CliError::Usage(format!(
            "--jet needs n*k = {} entries, got {}",
            args.n * args.k,
            values.len()
        )));
    }
    Ok(Jet::from_values(args.n, args.k, values)?)
}

fn lie_element(k: usize, s: &str) -> CliResult<LieElement> {
    positive("k", k)?;
    let c = parse_rational_list(s)?;
    if c.len() != k {
        return Err(CliError::Usage(format!("expected {k} coordinates, got {}", c.len())));
    }
    Ok(LieElement::new(c)?)
}

fn probe_point(p: &ProbeArgs, bound: i64) -> CliResult<LieElement> {
    positive("k", p.k)?;
    if let Some(x) = &p.x {
        return lie_element(p.k, x);
    }
    let strategy = probe_strategy(&p.probe).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown probe '{}' (known: {})",
            p.probe,
            probe_strategy_names().join(", ")
        ))
    })?;
    Ok(strategy
        .probes(p.k, 1, p.seed, bound)
        .into_iter()
        .next()
        .expect("at least one probe"))
}

fn run_group(cmd: &GroupCmd) -> CliResult<Output> {
    Ok(match cmd {
        GroupCmd::Matrix { k, coeffs } => {
            Output::json("group-matrix", group_matrix(&reparam(*k, coeffs)?))
        }
        GroupCmd::Compose { k, f, g } => {
            let h = compose(&reparam(*k, f)?, &reparam(*k, g)?)?;
            Output::json("group-composition", &h)
        }
        GroupCmd::Invert { k, coeffs } => {
            Output::json("group-inverse", invert(&reparam(*k, coeffs)?)?)
        }
    })
}

fn run_lie(cmd: &LieCmd, global: &Global) -> CliResult<Output> {
    Ok(match cmd {
        LieCmd::Basis { k } => {
            positive("k", *k)?;
            let alg = algebra(*k);
            let basis: Vec<Value> = lie_basis(*k)
                .iter()
                .enumerate()
                .map(|(i, e)| json!({ "index": i + 1, "matrix": alg.basis_matrix(i + 1), "coords": e }))
                .collect();
            Output::json("lie-basis", json!({ "k": k, "basis": basis }))
        }
        LieCmd::Bracket { k, x, y } => {
            let (x, y) = (lie_element(*k, x)?, lie_element(*k, y)?);
            let z = bracket(&x, &y)?;
            Output::json(
                "lie-bracket",
                json!({ "k": k, "x": x, "y": y, "bracket": z, "matrix": z.matrix() }),
            )
        }
        LieCmd::ElashviliAdjoint(p) => {
            Output::json("adjoint-generic-stabilizer", elashvili_adjoint(&probe_point(p, global.bound)?))
        }
        LieCmd::Cartan(p) => Output::json(
            "cartan-subalgebras-commutative",
            cartan_certificate(&probe_point(p, global.bound)?),
        ),
        LieCmd::WeylCert(p) => Output::json(
            "adjoint-weyl-group-finite",
            weyl_finiteness_certificate(&probe_point(p, global.bound)?),
        ),
        LieCmd::Derived { k } => {
            positive("k", *k)?;
            let d = derived_subalgebra(*k);
            let whole = d.dim() == *k;
            Output::json(
                "derived-subalgebra",
                json!({
                    "k": k,
                    "dim": d.dim(),
                    "algebra_dim": k,
                    "equals_whole_algebra": whole,
                    "closed": d.is_closed(),
                    "subalgebra": d,
                }),
            )
        }
    })
}

fn run_jets(cmd: &JetsCmd, global: &Global) -> CliResult<Output> {
    Ok(match cmd {
        JetsCmd::Act { jet: j, coeffs } => {
            let t = jet(j)?;
            let moved = act(&t, &reparam(j.k, coeffs)?)?;
            Output::json("jet-action", json!({ "jet": t, "result": moved }))
        }
        JetsCmd::Orbit(j) => {
            let t = jet(j)?;
            let stab = stabilizer_algebra(&t);
            Output::json(
                "jet-orbit",
                json!({
                    "jet": t,
                    "regular": t.is_regular(),
                    "infinitesimal_action": infinitesimal_action(&t),
                    "orbit_dim": orbit_dim(&t),
                    "stabilizer_dim": stab.dim(),
                    "stabilizer": stab,
                }),
            )
        }
        JetsCmd::Elashvili(j) => Output::json("jet-action-generic-stabilizer", elashvili_jet(&jet(j)?)),
        JetsCmd::Trdeg(s) => {
            positive("k", s.k)?;
            positive("n", s.n)?;
            positive("samples", s.samples)?;
            Output::json(
                "rosenlicht-transcendence-degree",
                trdeg(s.k, s.n, s.samples, s.seed, global.bound)?,
            )
        }
        JetsCmd::Strata(s) => {
            positive("k", s.k)?;
            positive("n", s.n)?;
            positive("samples", s.samples)?;
            let r = strata_histogram(s.k, s.n, s.samples, s.seed, global.bound);
            let csv = r.to_csv();
            Output::json("orbit-strata", r).with_csv(csv)
        }
        JetsCmd::Codim { k, n } => {
            positive("k", *k)?;
            positive("n", *n)?;
            Output::json("singular-locus-codimension", singular_locus_codim(*k, *n))
        }
    })
}

fn read_poly(src: &str) -> CliResult<WeightedPoly> {
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        fs::read_to_string(src).map_err(|e| CliError::Usage(format!("cannot read {src}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad polynomial JSON: {e}")))
}

fn run_invariants(cmd: &InvCmd, global: &Global) -> CliResult<Output> {
    Ok(match cmd {
        InvCmd::Dim { k, n, mmax } => {
            positive("k", *k)?;
            positive("n", *n)?;
            positive("mmax", *mmax as usize)?;
            let t = dimension_table(*k, *n, *mmax, global.cap)?;
            let csv = t.to_csv();
            Output::json("invariant-dimensions", json!({ "rows": t.rows, "dims": t.dims() }))
                .with_csv(csv)
        }
        InvCmd::Basis { k, n, m } => {
            positive("k", *k)?;
            positive("n", *n)?;
            positive("m", *m as usize)?;
            let s = invariant_basis_capped(*k, *n, *m, global.cap)?;
            let display: Vec<String> = s.basis.iter().map(|p| p.to_string()).collect();
            Output::json(
                "invariant-basis",
                json!({ "k": k, "n": n, "m": m, "dim": s.dim(), "monomial_count": s.monomial_count, "basis": s.basis, "display": display }),
            )
        }
        InvCmd::Verify { k, n, m, poly, samples, seed } => {
            positive("k", *k)?;
            positive("n", *n)?;
            let polys = match (poly, m) {
                (Some(src), _) => {
                    let p = read_poly(src)?;
                    if (p.k(), p.n()) != (*k, *n) {
                        return Err(CliError::Usage(format!(
                            "polynomial is over k={}, n={}, flags say k={k}, n={n}",
                            p.k(),
                            p.n()
                        )));
                    }
                    vec![p]
                }
                (None, Some(m)) => {
                    positive("m", *m as usize)?;
                    invariant_basis_capped(*k, *n, *m, global.cap)?.basis
                }
                (None, None) => return Err(CliError::Usage("give --poly or --m".into())),
            };
            let mut sampler = Sampler::new(*seed, global.bound);
            let us: Vec<Reparam> = (0..*samples).map(|_| sampler.unipotent(*k)).collect();
            let mut results = Vec::new();
            for p in &polys {
                let mut passed = 0;
                for u in &us {
                    if verify_invariance(p, u)? {
                        passed += 1;
                    }
                }
                results.push(json!({
                    "poly": p,
                    "display": p.to_string(),
                    "annihilated_by_derivations": is_annihilated(p),
                    "trials": us.len(),
                    "passed": passed,
                    "invariant": passed == us.len(),
                }));
            }
            let all = results.iter().all(|r| r["invariant"] == true);
            Output::json("unipotent-invariance", json!({ "results": results, "all_invariant": all }))
        }
        InvCmd::Profile { k, n, mmax } => {
            positive("k", *k)?;
            positive("n", *n)?;
            positive("mmax", *mmax as usize)?;
            let p = generation_profile(*k, *n, *mmax, global.cap)?;
            let mut csv = String::from("m,invariant_dim,product_span_dim,new_generators\n");
            for r in &p.degrees {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    r.m, r.invariant_dim, r.product_span_dim, r.new_generators
                ));
            }
            Output::json("invariant-ring-generation", p).with_csv(csv)
        }
    })
}

fn run_embed(cmd: &EmbedCmd, global: &Global) -> CliResult<Output> {
    Ok(match cmd {
        EmbedCmd::Phi(j) => {
            let t = jet(j)?;
            Output::json("jet-embedding", json!({ "jet": t, "regular": t.is_regular(), "columns": phi(&t) }))
        }
        EmbedCmd::Plucker(j) => {
            let t = jet(j)?;
            let cols = phi(&t);
            let p = plucker(&cols)?;
            let membership = (!p.is_zero()).then(|| a_nk_membership(&p));
            Output::json(
                "jet-embedding",
                json!({ "jet": t, "regular": t.is_regular(), "plucker": p, "a_nk_member": membership }),
            )
        }
        EmbedCmd::Zpoint { n, k } => {
            positive("n", *n)?;
            positive("k", *k)?;
            let z = z_point(*n, *k)?;
            Output::json(
                "distinguished-point",
                json!({ "n": n, "k": k, "plucker": z, "a_nk_member": a_nk_membership(&z) }),
            )
        }
        EmbedCmd::CheckInvariance { k, n, samples, seed, jet: given } => {
            positive("k", *k)?;
            positive("n", *n)?;
            positive("samples", *samples)?;
            match given {
                Some(values) => {
                    let t = jet(&JetArgs { k: *k, n: *n, jet: values.clone() })?;
                    if !t.is_regular() {
                        return Err(CliError::Domain(Error::NonRegularJet));
                    }
                    let mut s = Sampler::new(*seed, global.bound);
                    let mut checks = Vec::new();
                    for _ in 0..*samples {
                        let g = s.reparam(*k);
                        let holds = jetinv::embed::invariance_check(&t, &g)?;
                        checks.push(json!({ "g": g, "holds": holds }));
                    }
                    let base = plucker_of_jet(&t)?;
                    let relations = plucker_relations(&base, *seed)?;
                    let all = checks.iter().all(|c| c["holds"] == true) && relations.holds();
                    Output::json(
                        "jet-embedding-invariant",
                        json!({ "jet": t, "checks": checks, "relations": relations, "all_hold": all }),
                    )
                }
                None => Output::json(
                    "jet-embedding-invariant",
                    embedding_census(*k, *n, *samples, *samples, *seed, global.bound)?,
                ),
            }
        }
    })
}

fn execute(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    if !eliminator_names().contains(&g.elim.as_str()) {
        return Err(CliError::Usage(format!(
            "unknown eliminator '{}' (known: {})",
            g.elim,
            eliminator_names().join(", ")
        )));
    }
    set_active_eliminator(&g.elim)?;
    if g.bound < 1 {
        return Err(CliError::Usage("--box must be >= 1".into()));
    }
    if g.cap == 0 {
        return Err(CliError::Usage("--cap must be > 0".into()));
    }

    let out = match &cli.command {
        Command::Group(c) => run_group(c)?,
        Command::Lie(c) => run_lie(c, g)?,
        Command::Jets(c) => run_jets(c, g)?,
        Command::Invariants(c) => run_invariants(c, g)?,
        Command::Embed(c) => run_embed(c, g)?,
    };

    let config = json!({
        "command": cli.command,
        "elim": g.elim,
        "box": g.bound,
        "cap": g.cap,
        "format": g.format,
    });
    let seed = config["command"]
        .as_object()
        .and_then(|o| o.values().next())
        .and_then(|v| v.as_object())
        .and_then(|o| o.values().next())
        .and_then(|v| v.get("seed").cloned())
        .unwrap_or(Value::Null);
    let provenance = json!({
        "command": command_path(&cli.command),
        "config": config,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
        "claim": out.claim,
    });

    match g.format {
        Format::Json => {
            let doc = json!({ "provenance": provenance, "result": out.json });
            Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
        }
        Format::Csv => {
            let csv = out.csv.ok_or_else(|| {
                CliError::Usage(format!(
                    "{} has no CSV form; use --format json",
                    command_path(&cli.command)
                ))
            })?;
            Ok(format!("# provenance: {provenance}\n{csv}"))
        }
    }
}

fn command_path(c: &Command) -> String {
    let v = serde_json::to_value(c).expect("serializable");
    let mut parts = Vec::new();
    let mut cur = &v;
    loop {
        match cur {
            Value::Object(o) if o.len() == 1 => {
                let (name, inner) = o.iter().next().expect("one entry");
                parts.push(name.clone());
                cur = inner;
            }
            Value::String(s) => {
                parts.push(s.clone());
                break;
            }
            _ => break,
        }
        if parts.len() == 2 {
            break;
        }
    }
    parts.join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(text) => {
            if let Some(path) = &cli.global.out {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::CapExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
