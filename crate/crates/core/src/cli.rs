//! Command-line front end and the JSON interchange format.

use std::collections::BTreeSet;
use std::io::Read;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bundle::{build_simplex_bundle, extract_twist, recognize_bundle, SimplexBundleSpec, SimplexTwist};
use crate::cohomology::{
    betti_numbers, bundle_ring, fh_transform, fh_vector, find_product_generators, is_ring_product, Direction,
};
use crate::constructors::{
    football, labeled_projective_space, product, simplex, weighted_projective_polytope, SPData, WeightVector,
};
use crate::labeled::{
    delzant_data, equivalent, orbifold_group_of_face, singularity_profile, EquivalenceMode, LabeledPolytope,
};
use crate::lattice::IntMatrix;
use crate::polytope::Halfspace;
use crate::quotient::{cover_polytope, covering_basis, quotient_polytope, subgroup_order, TorusSubgroup};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetDocument {
    pub conormal: Vec<i64>,
    pub offset: String,
    pub label: i64,
}

/// Serialized labeled polytope; facet order is significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeDocument {
    pub dim: usize,
    pub facets: Vec<FacetDocument>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {message}")]
    Usage { flag: String, message: String },
    #[error("{name}: {source}", name = .0.name(), source = .0)]
    Domain(#[from] Error),
}

impl CliError {
    fn usage(flag: &str, message: impl ToString) -> Self {
        CliError::Usage {
            flag: flag.to_string(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Domain(_) => 1,
        }
    }
}

fn big_to_i64(x: &BigInt, what: &str) -> Result<i64, CliError> {
    x.to_i64()
        .ok_or_else(|| CliError::usage(what, format!("{x} does not fit in 64 bits")))
}

impl PolytopeDocument {
    pub fn from_labeled(p: &LabeledPolytope) -> Result<Self, CliError> {
        let facets = (0..p.facet_count())
            .map(|i| {
                Ok(FacetDocument {
                    conormal: p
                        .conormal(i)
                        .iter()
                        .map(|x| big_to_i64(x, "conormal"))
                        .collect::<Result<_, _>>()?,
                    offset: p.offset(i).to_string(),
                    label: big_to_i64(p.label(i), "label")?,
                })
            })
            .collect::<Result<_, CliError>>()?;
        Ok(PolytopeDocument { dim: p.dim(), facets })
    }

    pub fn to_labeled(&self) -> Result<LabeledPolytope, CliError> {
        let mut hs = Vec::with_capacity(self.facets.len());
        let mut labels = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            let offset = parse_rational(&f.offset).map_err(|m| CliError::usage("offset", m))?;
            hs.push(Halfspace::new(
                f.conormal.iter().map(|&x| BigInt::from(x)).collect(),
                offset,
            ));
            labels.push(BigInt::from(f.label));
        }
        Ok(LabeledPolytope::new(self.dim, hs, labels).map_err(Error::from)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandReport {
    pub command: String,
    pub inputs_digest: String,
    pub results: Value,
    pub warnings: Vec<String>,
}

#[derive(Parser, Debug)]
#[command(
    name = "torb",
    version,
    about = "Exact computations with labeled polytopes of symplectic toric orbifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a standard labeled polytope.
    Construct(ConstructArgs),
    /// Face numbers, Betti numbers and isotropy data.
    Info {
        file: String,
        /// Facet indices cutting out a face, e.g. 0,2.
        #[arg(long)]
        face: Option<String>,
    },
    /// Decide equivalence of two labeled polytopes.
    Equiv {
        first: String,
        second: String,
        #[arg(long, value_enum, default_value_t = Mode::Unimodular)]
        mode: Mode,
    },
    /// Quotient by the finite torus subgroup generated by rational vectors.
    Quotient {
        file: String,
        /// Generator as comma-separated rationals; repeatable.
        #[arg(long = "gen", allow_hyphen_values = true, required = true)]
        generators: Vec<String>,
    },
    /// Cover corresponding to a sublattice.
    Cover {
        file: String,
        /// Basis columns as matrix rows, e.g. "2,0;0,1".
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
    },
    /// Bundles of labeled polytopes.
    #[command(subcommand)]
    Bundle(BundleCommand),
    /// Decide whether a simplex bundle has the cohomology ring of a product.
    Uniqueness {
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long, allow_hyphen_values = true)]
        twist: String,
        #[arg(long, default_value_t = 5)]
        bound: i64,
    },
    /// Delzant construction data.
    Delzant { file: String },
    /// Randomized self-checks; seeded by TORB_SEED.
    Selftest {
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("kind").required(true).multiple(false)))]
struct ConstructArgs {
    /// Labeled projective space with this slant conormal; needs --labels.
    #[arg(long, group = "kind", requires = "labels")]
    sp: Option<String>,
    /// Weighted projective space with these weights.
    #[arg(long, group = "kind")]
    wps: Option<String>,
    /// Football with labels p,q.
    #[arg(long, group = "kind")]
    football: Option<String>,
    /// Standard simplex of this dimension.
    #[arg(long, group = "kind")]
    simplex: Option<usize>,
    /// Product of two documents.
    #[arg(long, group = "kind", num_args = 2, value_names = ["A", "B"])]
    product: Option<Vec<String>>,
    /// Facet labels for --sp.
    #[arg(long)]
    labels: Option<String>,
}

#[derive(Subcommand, Debug)]
enum BundleCommand {
    /// Bundle of a simplex over a simplex.
    Build {
        #[arg(long)]
        fiber: String,
        #[arg(long)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        twist: String,
        /// Total-space labels over the base facets; defaults to the base labels.
        #[arg(long)]
        divisors: Option<String>,
        /// Fiber components of the base coordinate facet lifts, e.g. "-1;0".
        #[arg(long, allow_hyphen_values = true)]
        lifts: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        offsets: Option<String>,
    },
    /// Search for a bundle structure with the given fiber and base.
    Recognize {
        total: String,
        #[arg(long)]
        fiber: String,
        #[arg(long)]
        base: String,
    },
    /// Normalized twist of a simplex bundle over a simplex.
    Twist { total: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Translation,
    Unimodular,
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n.trim()).map_err(|_| format!("'{s}' is not a rational number"))?;
    let d = BigInt::from_str(d.trim()).map_err(|_| format!("'{s}' is not a rational number"))?;
    if d.is_zero() {
        return Err(format!("'{s}' has zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

fn int_list(flag: &str, s: &str) -> Result<Vec<BigInt>, CliError> {
    s.split(',')
        .map(|x| BigInt::from_str(x.trim()).map_err(|_| CliError::usage(flag, format!("'{x}' is not an integer"))))
        .collect()
}

fn rat_list(flag: &str, s: &str) -> Result<Vec<BigRational>, CliError> {
    s.split(',')
        .map(|x| parse_rational(x).map_err(|m| CliError::usage(flag, m)))
        .collect()
}

fn int_rows(flag: &str, s: &str) -> Result<Vec<Vec<BigInt>>, CliError> {
    s.split(';').map(|row| int_list(flag, row)).collect()
}

fn facet_set(flag: &str, s: &str) -> Result<BTreeSet<usize>, CliError> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::usage(flag, format!("'{x}' is not a facet index")))
        })
        .collect()
}

fn num(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn nums(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(num).collect())
}

fn rats(xs: &[BigRational]) -> Value {
    Value::Array(xs.iter().map(|x| json!(x.to_string())).collect())
}

fn matrix(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| nums(r)).collect())
}

fn sets(xs: &[BTreeSet<usize>]) -> Value {
    Value::Array(xs.iter().map(|s| json!(s.iter().collect::<Vec<_>>())).collect())
}

struct Session<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    hasher: Sha256,
}

impl Session<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        let mut text = String::new();
        if path == "-" {
            if self.stdin_used {
                return Err(CliError::usage("-", "standard input can be read only once"));
            }
            self.stdin_used = true;
            self.stdin
                .read_to_string(&mut text)
                .map_err(|e| CliError::usage("-", e))?;
        } else {
            text = std::fs::read_to_string(path).map_err(|e| CliError::usage(path, e))?;
        }
        Ok(text)
    }

    /// Loads a document, or the `polytope` result of a previous report.
    fn load(&mut self, path: &str) -> Result<LabeledPolytope, CliError> {
        let text = self.read(path)?;
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(path, e))?;
        let doc_value = match value.get("results").and_then(|r| r.get("polytope")) {
            Some(p) => p.clone(),
            None => value,
        };
        let doc: PolytopeDocument = serde_json::from_value(doc_value).map_err(|e| CliError::usage(path, e))?;
        self.hasher.update(doc.to_json().as_bytes());
        doc.to_labeled()
    }
}

fn polytope_result(p: &LabeledPolytope) -> Result<Value, CliError> {
    Ok(json!({ "polytope": PolytopeDocument::from_labeled(p)? }))
}

fn domain<T, E: Into<Error>>(r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Domain(e.into()))
}

fn construct(s: &mut Session<'_>, args: &ConstructArgs) -> Result<Value, CliError> {
    let p = if let Some(v) = &args.sp {
        let w = int_list("--labels", args.labels.as_deref().unwrap_or_default())?;
        let data = domain(SPData::new(int_list("--sp", v)?, w))?;
        domain(labeled_projective_space(&data))?
    } else if let Some(w) = &args.wps {
        let lambda = domain(WeightVector::new(int_list("--wps", w)?))?;
        domain(weighted_projective_polytope(&lambda))?
    } else if let Some(pq) = &args.football {
        let pq = int_list("--football", pq)?;
        if pq.len() != 2 {
            return Err(CliError::usage("--football", "expected two labels p,q"));
        }
        domain(football(&pq[0], &pq[1]))?
    } else if let Some(n) = args.simplex {
        if n == 0 {
            return Err(CliError::usage("--simplex", "dimension must be positive"));
        }
        domain(simplex(n))?
    } else if let Some(files) = &args.product {
        let a = s.load(&files[0])?;
        let b = s.load(&files[1])?;
        product(&a, &b)
    } else {
        unreachable!("clap enforces one constructor")
    };
    polytope_result(&p)
}

fn info(s: &mut Session<'_>, file: &str, face: Option<&str>) -> Result<Value, CliError> {
    let p = s.load(file)?;
    let fh = fh_vector(p.geometry());
    let profile = singularity_profile(&p);
    let mut out = json!({
        "dim": p.dim(),
        "facet_count": p.facet_count(),
        "vertices": Value::Array(p.vertices().iter().map(|v| rats(v)).collect()),
        "f_vector": nums(&fh.f),
        "h_vector": nums(&fh.h),
        "betti": nums(&betti_numbers(&p)),
        "volume": p.geometry().volume().to_string(),
        "singularity_profile": {
            "entries": Value::Array(profile.entries.iter().map(|e| json!({
                "face": e.face.iter().collect::<Vec<_>>(),
                "dim": e.dim,
                "order": num(&e.orbifold_order),
            })).collect()),
            "has_locally_maximal_singular_vertex": profile.has_locally_maximal_singular_vertex,
        },
    });
    if let Some(face) = face {
        let facets = facet_set("--face", face)?;
        let g = domain(orbifold_group_of_face(&p, &facets))?;
        out["face_group"] = json!({
            "facets": facets.iter().collect::<Vec<_>>(),
            "group": g.to_string(),
            "invariant_factors": nums(g.invariant_factors()),
            "order": g.order().as_ref().map(num),
        });
    }
    Ok(out)
}

fn equiv(s: &mut Session<'_>, a: &str, b: &str, mode: Mode) -> Result<Value, CliError> {
    let (p, q) = (s.load(a)?, s.load(b)?);
    let mode = match mode {
        Mode::Translation => EquivalenceMode::Translation,
        Mode::Unimodular => EquivalenceMode::Unimodular,
    };
    Ok(match equivalent(&p, &q, mode) {
        Some(e) => json!({
            "equivalent": true,
            "matrix": matrix(&e.matrix),
            "translation": rats(&e.translation),
            "facet_map": e.facet_map,
        }),
        None => json!({ "equivalent": false }),
    })
}

fn quotient(s: &mut Session<'_>, file: &str, generators: &[String]) -> Result<Value, CliError> {
    let p = s.load(file)?;
    let gens = generators
        .iter()
        .map(|g| rat_list("--gen", g))
        .collect::<Result<Vec<_>, _>>()?;
    let g = domain(TorusSubgroup::new(p.dim(), gens))?;
    let q = domain(quotient_polytope(&p, &g))?;
    let mut out = polytope_result(&q)?;
    out["order"] = num(&subgroup_order(&g));
    out["covering_basis"] = matrix(&covering_basis(&g));
    Ok(out)
}

fn cover(s: &mut Session<'_>, file: &str, basis: &str) -> Result<Value, CliError> {
    let p = s.load(file)?;
    let rows = int_rows("--basis", basis)?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(CliError::usage("--basis", "basis must be a square matrix"));
    }
    let c = domain(cover_polytope(&p, &IntMatrix::from_rows(&rows)))?;
    polytope_result(&c)
}

fn bundle(s: &mut Session<'_>, cmd: &BundleCommand) -> Result<Value, CliError> {
    match cmd {
        BundleCommand::Build {
            fiber,
            base,
            twist,
            divisors,
            lifts,
            offsets,
        } => {
            let (f, b) = (s.load(fiber)?, s.load(base)?);
            let twist = domain(SimplexTwist::new(f.dim(), b.dim(), int_list("--twist", twist)?))?;
            let mut spec = SimplexBundleSpec::new(&f, &b, twist);
            if let Some(d) = divisors {
                spec.label_divisors = int_list("--divisors", d)?;
            }
            if let Some(l) = lifts {
                spec.coordinate_lifts = int_rows("--lifts", l)?;
            }
            if let Some(o) = offsets {
                spec.offsets = Some(rat_list("--offsets", o)?);
            }
            polytope_result(&domain(build_simplex_bundle(&spec))?)
        }
        BundleCommand::Recognize { total, fiber, base } => {
            let (t, f, b) = (s.load(total)?, s.load(fiber)?, s.load(base)?);
            Ok(match recognize_bundle(&t, &f, &b) {
                Some(d) => json!({
                    "recognized": true,
                    "trivial": d.is_trivial(),
                    "iota": matrix(&d.iota),
                    "pi": matrix(&d.pi),
                    "base_facet_lifts": Value::Array(d.base_facet_lifts.iter().map(|l| json!({
                        "conormal": nums(&l.conormal),
                        "label": num(&l.label),
                        "base_label": num(&l.base_label),
                    })).collect()),
                    "facet_correspondence": d.facet_correspondence,
                }),
                None => json!({ "recognized": false }),
            })
        }
        BundleCommand::Twist { total } => {
            let t = s.load(total)?;
            let tw = domain(extract_twist(&t))?;
            Ok(json!({ "k1": tw.k1, "k2": tw.k2, "a": nums(&tw.a) }))
        }
    }
}

fn uniqueness(k1: usize, k2: usize, twist: &str, bound: i64, warnings: &mut Vec<String>) -> Result<Value, CliError> {
    if bound < 0 {
        return Err(CliError::usage("--bound", "must be nonnegative"));
    }
    let a = int_list("--twist", twist)?;
    let ring = domain(bundle_ring(k1, k2, &a))?;
    let generators = find_product_generators(&ring, bound);
    warnings.push(format!(
        "generator search limited to entries of absolute value at most {bound}"
    ));
    let mut out = json!({
        "k1": k1,
        "k2": k2,
        "twist": nums(&a),
        "sigma": nums(&ring.sigma),
        "bound": bound,
        "generators": generators.map(|(p, q, r, t)| vec![p, q, r, t]),
    });
    if k2 < 2 {
        warnings.push("k2 < 2: only the generator search applies".into());
        return Ok(out);
    }
    let report = domain(is_ring_product(k1, k2, &a))?;
    out["is_product"] = json!(report.is_product);
    out["case"] = json!(report.case.number());
    out["report"] = json!(report.to_string());
    out["agrees_with_search"] = json!(report.is_product == generators.is_some());
    Ok(out)
}

fn delzant(s: &mut Session<'_>, file: &str) -> Result<Value, CliError> {
    let p = s.load(file)?;
    let d = delzant_data(&p);
    Ok(json!({
        "beta": matrix(&d.beta),
        "kernel": Value::Array(d.kernel_basis.iter().map(|k| nums(k)).collect()),
        "fan_index_sets": sets(&d.fan_index_sets),
    }))
}

fn selftest(cases: usize, warnings: &mut Vec<String>) -> Result<Value, CliError> {
    let seed: u64 = match std::env::var("TORB_SEED") {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError::usage("TORB_SEED", format!("'{v}' is not an unsigned integer")))?,
        Err(_) => {
            warnings.push("TORB_SEED unset, using seed 0".into());
            0
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures: Vec<String> = Vec::new();
    for case in 0..cases {
        let n = rng.gen_range(1..=3);
        let v: Vec<i64> = loop {
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
            if crate::lattice::is_primitive(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()) {
                break v;
            }
        };
        let w: Vec<i64> = (0..=n).map(|_| rng.gen_range(1..=5)).collect();
        let p = domain(labeled_projective_space(&domain(SPData::from_i64(&v, &w))?))?;
        for i in 0..=n {
            let facets: BTreeSet<usize> = (0..=n).filter(|&j| j != i).collect();
            let order = domain(orbifold_group_of_face(&p, &facets))?.order();
            let slant = if i < n { v[i] } else { 1 };
            let expected: i64 = w
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, x)| x)
                .product::<i64>()
                * slant;
            if order != Some(BigInt::from(expected)) {
                failures.push(format!("case {case}: vertex {i} of SP(v={v:?}, w={w:?})"));
            }
        }

        let f = fh_vector(p.geometry()).f;
        let back = domain(fh_transform(
            &domain(fh_transform(&f, Direction::FToH))?.h,
            Direction::HToF,
        ))?;
        if back.f != f {
            failures.push(format!("case {case}: f/h round trip"));
        }

        let k = rng.gen_range(2..=4);
        let gen: Vec<BigRational> = (0..n)
            .map(|_| BigRational::new(rng.gen_range(0..k).into(), k.into()))
            .collect();
        let g = domain(TorusSubgroup::new(n, vec![gen]))?;
        let q = domain(quotient_polytope(&p, &g))?;
        let order = BigRational::from_integer(subgroup_order(&g));
        let back = domain(cover_polytope(&q, &covering_basis(&g)))?;
        if back != p || q.geometry().volume() * order != p.geometry().volume() * BigRational::one() {
            failures.push(format!("case {case}: quotient and cover"));
        }
    }
    Ok(json!({ "seed": seed, "cases": cases, "failures": failures }))
}

fn dispatch(command: &Command, s: &mut Session<'_>, warnings: &mut Vec<String>) -> Result<Value, CliError> {
    match command {
        Command::Construct(args) => construct(s, args),
        Command::Info { file, face } => info(s, file, face.as_deref()),
        Command::Equiv { first, second, mode } => equiv(s, first, second, *mode),
        Command::Quotient { file, generators } => quotient(s, file, generators),
        Command::Cover { file, basis } => cover(s, file, basis),
        Command::Bundle(cmd) => bundle(s, cmd),
        Command::Uniqueness { k1, k2, twist, bound } => uniqueness(*k1, *k2, twist, *bound, warnings),
        Command::Delzant { file } => delzant(s, file),
        Command::Selftest { cases } => selftest(*cases, warnings),
    }
}

/// Output of one invocation: what to print on each stream and the exit code.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub status: i32,
    pub report: Option<CommandReport>,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I, stdin: &mut dyn Read) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let status = if e.use_stderr() { 2 } else { 0 };
            return CommandOutcome {
                status,
                report: None,
                stdout: if status == 0 { text.clone() } else { String::new() },
                stderr: if status == 0 { String::new() } else { text },
            };
        }
    };
    let mut hasher = Sha256::new();
    for a in argv.iter().skip(1) {
        hasher.update(a.as_bytes());
        hasher.update([0u8]);
    }
    let mut session = Session {
        stdin,
        stdin_used: false,
        hasher,
    };
    let mut warnings = Vec::new();
    let result = dispatch(&cli.command, &mut session, &mut warnings);
    match result {
        Ok(results) => {
            let report = CommandReport {
                command: argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" "),
                inputs_digest: hex::encode(session.hasher.finalize()),
                results,
                warnings,
            };
            let failed = report
                .results
                .get("failures")
                .and_then(Value::as_array)
                .is_some_and(|f| !f.is_empty());
            CommandOutcome {
                status: if failed { 1 } else { 0 },
                stdout: serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
                report: Some(report),
                stderr: String::new(),
            }
        }
        Err(e) => CommandOutcome {
            status: e.exit_code(),
            report: None,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
