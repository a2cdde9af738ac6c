//! The `dk` command line: category inspection, integrator verification,
//! homology, and Dold–Kan checks.  Results go to the given writer, progress
//! to standard error.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::chains::{verify_homotopy, ChainComplex, ChainMap};
use crate::doldkan::{self, seeded};
use crate::homology::presheaf_homology;
use crate::integrators::{
    bousfield_kan, free_integrator, normalized_integrator, point_integrator, product_integrator, slice_integrator, theta_integrator,
    xi_contraction, Integrator, NormalizedKind, Orientation, Report,
};
use crate::presheaf::{constant_z, representable, AbPresheaf};
use crate::shapecat::{codim1_monos, is_mono, builtin_or_file, make_category, split_top_level, subobjects, CatRef, Obj};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "dk", version, about = "Homology of presheaves on shape categories and strict Dold–Kan correspondences")]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Truncation dimension of the categories involved
    #[arg(long, global = true, env = "DK_MAX_DIM", default_value_t = 3)]
    max_dim: usize,
    /// Worker threads for per-object checks (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect a category
    #[command(subcommand)]
    Cat(CatCmd),
    /// Check an integrator on the objects of dimension ≤ --max-dim
    Verify(VerifyArgs),
    /// Homology of a presheaf through an integrator
    Homology(HomologyArgs),
    /// Randomized and fixed Dold–Kan checks
    #[command(subcommand)]
    Doldkan(DkCmd),
}

#[derive(Subcommand, Debug)]
enum CatCmd {
    /// List Hom(from, to)
    Homset {
        #[arg(long)]
        category: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// List monomorphisms only
        #[arg(long)]
        mono_only: bool,
    },
    /// List objects of dimension ≤ --max-dim
    Objects {
        #[arg(long)]
        category: String,
    },
    /// Subobjects of an object, or only those of codimension 1
    Subobjects {
        #[arg(long)]
        category: String,
        #[arg(long)]
        object: String,
        #[arg(long)]
        codim1: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Orientation,
    Asphericity,
    Homotopy,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    check: Check,
    #[arg(long)]
    category: String,
    /// `standard` or a JSON orientation file
    #[arg(long, default_value = "standard")]
    orientation: String,
    /// Integrator to check (see `homology --integrator`)
    #[arg(long, default_value = "standard")]
    integrator: String,
    /// Complexes are built through this degree (default --max-dim + 1)
    #[arg(long)]
    max_deg: Option<usize>,
    /// Restrict to one object
    #[arg(long)]
    object: Option<String>,
}

#[derive(Args, Debug)]
struct HomologyArgs {
    #[arg(long)]
    category: String,
    /// standard | nonnormalized | normalized | bk | point | product
    #[arg(long, default_value = "standard")]
    integrator: String,
    /// `standard` or a JSON orientation file, for free integrators
    #[arg(long, default_value = "standard")]
    orientation: String,
    /// Presheaf JSON file
    #[arg(long, group = "input")]
    presheaf: Option<String>,
    /// The constant presheaf ℤ
    #[arg(long = "constant-Z", alias = "constant-z", group = "input")]
    constant_z: bool,
    /// A representable presheaf
    #[arg(long, group = "input")]
    representable: Option<String>,
    /// Homology is reported in degrees < max-deg (default --max-dim + 1)
    #[arg(long)]
    max_deg: Option<usize>,
    /// Skip the orientation and asphericity checks of the integrator
    #[arg(long)]
    no_verify: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DkFlavor {
    Simplicial,
    Cubical,
    Globular,
}

#[derive(Subcommand, Debug)]
enum DkCmd {
    /// Seeded roundtrip trials
    Roundtrip {
        #[arg(long, value_enum)]
        flavor: DkFlavor,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Eilenberg–Zilber on seeded random bisimplicial groups
    EzCheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// The graph of B⁻¹(ℤ ← ℤ) on a window of lattice points
    Whitehead {
        #[arg(long, default_value_t = 2)]
        window: i64,
    },
}

/// An input or usage error (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::error::Error> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<(Value, String, bool), UsageError>;

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let res = match &cli.cmd {
        Command::Cat(c) => cmd_cat(c, cli.max_dim),
        Command::Verify(v) => cmd_verify(v, cli.max_dim),
        Command::Homology(h) => cmd_homology(h, cli.max_dim),
        Command::Doldkan(d) => cmd_doldkan(d),
    };
    match res {
        Ok((v, text, ok)) => {
            let _ = if cli.json { writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()) } else { writeln!(out, "{text}") };
            if ok {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Err(UsageError(m)) => {
            let _ = if cli.json { writeln!(out, "{}", json!({ "error": m })) } else { writeln!(out, "error: {m}") };
            EXIT_USAGE
        }
    }
}

// ---------------------------------------------------------------- cat

fn cmd_cat(c: &CatCmd, max_dim: usize) -> Outcome {
    match c {
        CatCmd::Homset { category, from, to, mono_only } => {
            let cat = make_category(category, max_dim)?;
            let (a, b) = (cat.parse_object(from)?, cat.parse_object(to)?);
            let all = cat.hom(&a, &b);
            let monos: Vec<_> = all.iter().filter(|f| is_mono(cat.as_ref(), f, None)).collect();
            let shown: Vec<String> = if *mono_only { monos.iter().map(|f| cat.mor_name(f)).collect() } else { all.iter().map(|f| cat.mor_name(f)).collect() };
            let v = json!({
                "category": cat.name(), "from": cat.obj_name(&a), "to": cat.obj_name(&b),
                "count": all.len(), "monos": monos.len(), "morphisms": shown,
            });
            let mut text = format!("{} morphisms {} → {} in {} ({} mono)", all.len(), cat.obj_name(&a), cat.obj_name(&b), cat.name(), monos.len());
            for s in &shown {
                text.push_str(&format!("\n  {s}"));
            }
            Ok((v, text, true))
        }
        CatCmd::Objects { category } => {
            let cat = make_category(category, max_dim)?;
            let objs = cat.objects_upto(max_dim);
            let list: Vec<Value> = objs.iter().map(|a| json!({ "object": cat.obj_name(a), "dim": cat.dim(a) })).collect();
            let text = objs.iter().map(|a| format!("{}\t{}", cat.dim(a), cat.obj_name(a))).collect::<Vec<_>>().join("\n");
            Ok((json!({ "category": cat.name(), "max_dim": max_dim, "count": objs.len(), "objects": list }), text, true))
        }
        CatCmd::Subobjects { category, object, codim1 } => {
            // the object fixes the truncation it needs
            let probe = make_category(category, 64)?;
            let a = probe.parse_object(object)?;
            let cat = make_category(category, max_dim.max(probe.dim(&a)))?;
            let a = cat.parse_object(object)?;
            let subs = if *codim1 { codim1_monos(cat.as_ref(), &a)? } else { subobjects(cat.as_ref(), &a, None, None) };
            let list: Vec<Value> = subs
                .iter()
                .map(|f| {
                    let mut v = json!({ "source": cat.obj_name(&f.src), "dim": cat.dim(&f.src), "name": cat.mor_name(f) });
                    if let Some(s) = cat.standard_sign(f) {
                        v["sign"] = json!(s);
                    }
                    v
                })
                .collect();
            let kind = if *codim1 { "codimension-1 subobjects" } else { "subobjects" };
            let mut text = format!("{} has {} {kind} in {}", cat.obj_name(&a), subs.len(), cat.name());
            if *codim1 {
                for f in &subs {
                    let sign = cat.standard_sign(f).map(|s| format!(" sign {s:+}")).unwrap_or_default();
                    text.push_str(&format!("\n  {}{sign}", cat.mor_name(f)));
                }
            }
            Ok((json!({ "category": cat.name(), "object": cat.obj_name(&a), "codim1": codim1, "count": subs.len(), "subobjects": list }), text, true))
        }
    }
}

// ---------------------------------------------------------------- integrators

fn orientation(cat: CatRef, name: &str, top: usize) -> Result<Orientation, UsageError> {
    if name == "standard" {
        return Ok(Orientation::standard(cat, top)?);
    }
    let text = std::fs::read_to_string(name).map_err(|e| UsageError(format!("{name}: {e}")))?;
    let v: Value = serde_json::from_str(&text)?;
    Ok(Orientation::from_json(cat, top, &v)?)
}

/// Builds the named integrator through degree `top` on the category given by
/// `spec`, truncated at `trunc`.
pub fn build_integrator(spec: &str, name: &str, orient: &str, trunc: usize, top: usize) -> Result<Integrator, UsageError> {
    if let Some(rest) = spec.strip_prefix("slice:") {
        let i = rest.rfind(':').ok_or_else(|| UsageError(format!("slice needs slice:<cat>:<presheaf>, got {spec}")))?;
        let base = build_integrator(&rest[..i], name, orient, trunc, top)?;
        let f = builtin_or_file(base.base(), &rest[i + 1..])?;
        return Ok(slice_integrator(&base, f)?);
    }
    let cat = make_category(spec, trunc)?;
    match name {
        "standard" | "nonnormalized" | "free" => {
            if let Some(n) = cat.name().strip_prefix("theta").and_then(|s| s.parse::<usize>().ok()) {
                if n >= 2 {
                    return Ok(theta_integrator(n, top)?);
                }
            }
            Ok(free_integrator(cat.clone(), &orientation(cat, orient, top)?, top)?)
        }
        "normalized" => {
            let kind = match cat.name().as_str() {
                "delta" => NormalizedKind::Simplicial,
                "cube" => NormalizedKind::Cubical,
                "cube_c" => NormalizedKind::CubicalConnections,
                "globe_ref" => NormalizedKind::GlobularReflexive,
                other => return Err(UsageError(format!("no normalized integrator on {other}"))),
            };
            Ok(normalized_integrator(kind, top)?)
        }
        "bk" | "bousfield-kan" => Ok(bousfield_kan(cat, top)?),
        "point" => Ok(point_integrator(cat, top)?),
        "product" => {
            let rest = spec.strip_prefix("prod:").ok_or_else(|| UsageError("the product integrator needs a prod: category".into()))?;
            let parts = split_top_level(rest, ',');
            let mut acc = build_integrator(&parts[0], "standard", "standard", trunc, top)?;
            for p in &parts[1..] {
                acc = product_integrator(&acc, &build_integrator(p, "standard", "standard", trunc, top)?)?;
            }
            Ok(acc)
        }
        other => Err(UsageError(format!("unknown integrator {other}"))),
    }
}

fn report_text(r: &Report) -> String {
    let mut s = format!("{} of {} on {}: {}", r.check, r.integrator, r.category, if r.ok() { "pass" } else { "FAIL" });
    for c in &r.objects {
        if !c.ok {
            s.push_str(&format!("\n  {} (dim {}): {}", c.object, c.dim, c.detail));
        }
    }
    s.push_str(&format!("\n  {} objects checked, {} failed", r.objects.len(), r.failures().len()));
    s
}

fn only_object(r: Report, cat: &CatRef, object: &Option<String>) -> Result<Report, UsageError> {
    let Some(o) = object else { return Ok(r) };
    let name = cat.obj_name(&cat.parse_object(o)?);
    let objects: Vec<_> = r.objects.into_iter().filter(|c| c.object == name).collect();
    if objects.is_empty() {
        return Err(UsageError(format!("object {o} is outside the checked range")));
    }
    Ok(Report { objects, ..r })
}

fn cmd_verify(v: &VerifyArgs, max_dim: usize) -> Outcome {
    let top = v.max_deg.unwrap_or(max_dim + 1).max(1);
    let trunc = max_dim.max(top);
    if v.check == Check::Homotopy {
        return verify_homotopies(v, max_dim, trunc, top);
    }
    let i = build_integrator(&v.category, &v.integrator, &v.orientation, trunc, top)?;
    let dmax = match &v.object {
        Some(o) => i.base().dim(&i.base().parse_object(o)?),
        None => max_dim,
    };
    eprintln!("checking {} of {} on objects of dim ≤ {dmax}", if v.check == Check::Orientation { "orientation" } else { "asphericity" }, i.name());
    let r = match v.check {
        Check::Orientation => i.verify_orientation(dmax),
        _ => i.verify_asphericity(dmax),
    };
    let r = only_object(r, i.base(), &v.object)?;
    let ok = r.ok();
    Ok((r.to_json(), report_text(&r), ok))
}

/// Checks r∘s = id and dh + hd = id − s∘r for the Ξ contraction of each object.
fn verify_homotopies(v: &VerifyArgs, max_dim: usize, trunc: usize, top: usize) -> Outcome {
    let cat = make_category(&v.category, trunc)?;
    let objs = match &v.object {
        Some(o) => vec![cat.parse_object(o)?],
        None => cat.objects_upto(max_dim),
    };
    eprintln!("checking contractions of {} objects through degree {}", objs.len(), top - 1);
    let mut list = Vec::new();
    let mut text = String::new();
    let mut all = true;
    for t in &objs {
        let c = xi_contraction(cat.clone(), t, top)?;
        let point = ChainComplex::point();
        let rs = c.r.compose(&c.s) == ChainMap::identity(&point);
        let h = verify_homotopy(&c.h, &ChainMap::identity(&c.complex), &c.s.compose(&c.r), top - 1);
        let ok = rs && h.is_ok();
        all &= ok;
        let mut e = json!({ "object": cat.obj_name(t), "dim": cat.dim(t), "ok": ok });
        if let Err(n) = h {
            e["detail"] = json!(format!("homotopy identity fails in degree {n}"));
        } else if !rs {
            e["detail"] = json!("r∘s ≠ id");
        }
        if !ok {
            text.push_str(&format!("  {}: {}\n", cat.obj_name(t), e["detail"].as_str().unwrap_or("")));
        }
        list.push(e);
    }
    let head = format!("homotopy on {}: {}\n", cat.name(), if all { "pass" } else { "FAIL" });
    let tail = format!("  {} objects checked through degree {}", objs.len(), top - 1);
    let json = json!({ "check": "homotopy", "category": cat.name(), "ok": all, "objects": list });
    Ok((json, format!("{head}{text}{tail}"), all))
}

// ---------------------------------------------------------------- homology

fn cmd_homology(h: &HomologyArgs, max_dim: usize) -> Outcome {
    let top = h.max_deg.unwrap_or(max_dim + 1).max(1);
    let trunc = max_dim.max(top);
    let mut i = build_integrator(&h.category, &h.integrator, &h.orientation, trunc, top)?;
    let x: AbPresheaf = if let Some(path) = &h.presheaf {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{path}: {e}")))?;
        AbPresheaf::from_json(&serde_json::from_str(&text)?, Some(i.base().clone()))?
    } else if let Some(o) = &h.representable {
        let a: Obj = i.base().parse_object(o)?;
        representable(i.base().clone(), &a)
    } else {
        constant_z(i.base().clone())
    };
    if !h.no_verify {
        let dv = max_dim.min(top - 1);
        eprintln!("verifying {} on objects of dim ≤ {dv}", i.name());
        let (o, a) = i.verify(dv);
        for r in [&o, &a] {
            if !r.ok() {
                eprintln!("{}", report_text(r));
            }
        }
    }
    let t = presheaf_homology(&i, &x, top)?;
    let mut v = t.to_json();
    v["category"] = json!(i.base().name());
    v["integrator"] = json!(i.name());
    v["presheaf"] = json!(x.name());
    Ok((v, format!("{} via {}\n{t}", x.name(), i.name()), true))
}

// ---------------------------------------------------------------- Dold–Kan

fn tally(kind: &str, seed: u64, trials: usize, failures: Vec<usize>) -> (Value, String, bool) {
    let passed = trials - failures.len();
    let text = format!("{kind}: {passed}/{trials} pass (seed {seed})");
    let ok = failures.is_empty();
    (json!({ "check": kind, "seed": seed, "trials": trials, "passed": passed, "failures": failures }), text, ok)
}

/// One trial of the given flavor; Ok(false) is a failed check.
pub fn roundtrip_trial(flavor: &str, rng: &mut rand_chacha::ChaCha8Rng) -> Result<bool, doldkan::DkError> {
    match flavor {
        "simplicial" => {
            let c = doldkan::random_complex(rng, 5, 3);
            let n = doldkan::simplicial_n(&doldkan::simplicial_gamma(&c, 5), 5)?;
            Ok(n.ranks() == c.ranks() && (1..=5).all(|k| n.d(k) == c.d(k)))
        }
        "globular" => {
            let c = doldkan::random_complex(rng, 5, 3);
            let b = doldkan::bourn_b(&doldkan::bourn_binv(&c, 5)?, 5)?;
            let forward = b.ranks() == c.ranks() && (1..=5).all(|k| b.d(k) == c.d(k));
            let x = doldkan::random_globular_group(rng, 4);
            Ok(forward && doldkan::bourn_unit_check(&x, 4)?)
        }
        "cubical" => {
            let x = doldkan::random_cubical_group(rng, 3);
            let ranks = doldkan::brown_higgins_ranks(&x, 3)?;
            let with = doldkan::cubical_cn(&x, 3, true)?.homology_through(2)?;
            let without = doldkan::cubical_cn(&x, 3, false)?.homology_through(2)?;
            let n = doldkan::cubical_n(&x, 3)?.homology_through(2)?;
            Ok(ranks.iter().all(|r| r.decomposes()) && with == without && with == n)
        }
        _ => unreachable!("flavor names are fixed"),
    }
}

fn cmd_doldkan(c: &DkCmd) -> Outcome {
    match c {
        DkCmd::Roundtrip { flavor, seed, trials } => {
            let name = match flavor {
                DkFlavor::Simplicial => "simplicial",
                DkFlavor::Cubical => "cubical",
                DkFlavor::Globular => "globular",
            };
            let mut rng = seeded(*seed);
            let mut failures = Vec::new();
            for t in 0..*trials {
                if !roundtrip_trial(name, &mut rng)? {
                    failures.push(t);
                }
            }
            Ok(tally(&format!("{name} roundtrip"), *seed, *trials, failures))
        }
        DkCmd::EzCheck { seed, trials } => {
            let mut rng = seeded(*seed);
            let mut failures = Vec::new();
            for t in 0..*trials {
                let x = doldkan::random_bisimplicial_group(&mut rng, 4);
                if !doldkan::eilenberg_zilber_check(&x, 4)?.agree() {
                    failures.push(t);
                }
            }
            Ok(tally("Eilenberg–Zilber", *seed, *trials, failures))
        }
        DkCmd::Whitehead { window } => {
            let c = ChainComplex::new(vec![1, 1], vec![crate::intlinalg::IntMatrix::identity(1)])?;
            let x = doldkan::bourn_binv(&c, 5)?;
            let w = doldkan::whitehead_graph_check(&x, *window, 5)?;
            let text = format!(
                "homology trivial: {}; cycle rank: {}\n  {} vertices, {} edges, {} components",
                if w.b_exact { "yes" } else { "no" },
                w.cycle_rank,
                w.vertices,
                w.edges,
                w.components
            );
            let mut v = w.to_json();
            v["window"] = json!(window);
            Ok((v, text, true))
        }
    }
}
