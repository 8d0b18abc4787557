//! Command-line interface: closed-form elementary-move transforms, the
//! experiment sweeps with CSV output and run manifests, and randomized
//! self-checks against the holonomy oracle and the metric axioms.
//!
//! Exit codes: 0 success, 2 bad input / unknown experiment, 3 scientific
//! failure (an invariant or tolerance was violated by the computed data).

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::{
    run_lemma61, run_prop32, run_prop42, run_seq52, run_thm62_64, wolpert_battery, DualKind,
    ExperimentReport, SweepConfig, Thm6Mode,
};
use crate::holonomy_oracle::{measure_dual, MoveInput};
use crate::okai_transforms::{
    move_fn_point, sphere_move, torus_move, SphereMoveInput, TorusMoveInput,
};
use crate::pants_complex::{fn_distance, CurveId, CurveParams, FNPoint, PantsDecomposition};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_SCIENTIFIC: i32 = 3;

#[derive(Parser)]
#[command(name = "fnmetric", version, about = "Fenchel-Nielsen coordinates, distances and elementary-move transforms")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one elementary move in closed form and print the dual coordinates.
    Transform(TransformArgs),
    /// Run a named experiment; writes CSV rows and a run manifest.
    Experiment(ExperimentArgs),
    /// Randomized oracle-equivalence and metric-axiom checks.
    Check(CheckArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TransformArgs {
    /// One-holed torus move: needs --l0, --l, --tau.
    #[arg(long, conflicts_with = "sphere")]
    torus: bool,
    /// Four-holed sphere move: needs --holes l1,l2,l3,l4, --l, --tau.
    #[arg(long)]
    sphere: bool,
    /// Boundary length of the one-holed torus (0 = cusp).
    #[arg(long)]
    l0: Option<f64>,
    /// Hole lengths in cyclic order (alpha separates {l2,l3} from {l4,l1}).
    #[arg(long, value_delimiter = ',')]
    holes: Vec<f64>,
    /// Length of the curve being moved.
    #[arg(long)]
    l: Option<f64>,
    /// Twist of the curve being moved.
    #[arg(long)]
    tau: Option<f64>,
    /// JSON file holding an FN point (use with --surface and --curve).
    #[arg(long)]
    point: Option<PathBuf>,
    /// JSON file holding a pants decomposition.
    #[arg(long)]
    surface: Option<PathBuf>,
    /// Name of the curve to move.
    #[arg(long)]
    curve: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ExperimentArgs {
    /// One of: prop32, prop42, seq52, lemma61, thm62, thm64.
    #[arg(long)]
    name: String,
    /// CSV output path (default <name>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest output path (default <name>_manifest.json).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Twist amount t.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Dual-curve kind for seq52/thm62: torus or sphere.
    #[arg(long, default_value = "torus")]
    kind: String,
    /// Epsilon grid, e.g. "2^-1..2^-20", "1e-1..1e-6" or "0.1,0.01".
    #[arg(long)]
    eps: Option<String>,
    /// Length grid for the sweeps (same syntax as --eps).
    #[arg(long)]
    grid: Option<String>,
    /// Hole lengths of the ambient pants for prop32/prop42.
    #[arg(long, value_delimiter = ',')]
    holes: Vec<f64>,
    /// Upper bound L on hole lengths and |t|.
    #[arg(long, default_value_t = 2.0)]
    l_bound: f64,
    /// Small-length threshold for the asymptotic checks.
    #[arg(long, default_value_t = 1e-2)]
    eps0: f64,
    /// Seed for randomized configurations.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Ladder depth (thm64) or sample count (wolpert).
    #[arg(long, default_value_t = 20)]
    count: usize,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct CheckArgs {
    /// Number of oracle-equivalence samples (0 = vacuous pass).
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Number of random triples for the metric axioms.
    #[arg(long, default_value_t = 1000)]
    triples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Run the CLI on the process arguments; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Transform(a) => cmd_transform(&a),
        Command::Experiment(a) => cmd_experiment(&a),
        Command::Check(a) => cmd_check(&a),
    }
}

fn bad_input(msg: &str) -> i32 {
    let err = json!({ "code": "BadInput", "message": msg });
    eprintln!("{err}");
    EXIT_BAD_INPUT
}

// ---------------------------------------------------------------------------
// JSON output with 17 significant digits
// ---------------------------------------------------------------------------

fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no infinities; emit as strings
        format!("\"{x}\"")
    }
}

/// Serialize a JSON value with every float rendered to 17 significant digits.
pub fn json17(v: &Value) -> String {
    let mut out = String::new();
    write_json17(v, &mut out);
    out
}

fn write_json17(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&fmt17(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(xs) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json17(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push(':');
                write_json17(x, out);
            }
            out.push('}');
        }
    }
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

fn cmd_transform(a: &TransformArgs) -> i32 {
    if a.point.is_some() || a.surface.is_some() || a.curve.is_some() {
        let (Some(point), Some(surface), Some(curve)) = (&a.point, &a.surface, &a.curve) else {
            return bad_input("--point, --surface and --curve must be given together");
        };
        let read = |p: &PathBuf| std::fs::read_to_string(p);
        let (pj, sj) = match (read(point), read(surface)) {
            (Ok(p), Ok(s)) => (p, s),
            (Err(e), _) | (_, Err(e)) => return bad_input(&format!("cannot read input: {e}")),
        };
        let x: FNPoint = match serde_json::from_str(&pj) {
            Ok(v) => v,
            Err(e) => return bad_input(&format!("invalid FN point JSON: {e}")),
        };
        let p: PantsDecomposition = match serde_json::from_str(&sj) {
            Ok(v) => v,
            Err(e) => return bad_input(&format!("invalid surface JSON: {e}")),
        };
        match move_fn_point(&x, &p, &CurveId::new(curve.clone())) {
            Ok(moved) => {
                let v = serde_json::to_value(&serde_json::json!({
                    "point": moved.point,
                    "descriptor": moved.descriptor,
                    "result": moved.result,
                    "oracle_required": moved.oracle_required,
                }))
                .unwrap();
                println!("{}", json17(&v));
                EXIT_OK
            }
            Err(e) => bad_input(&e.to_string()),
        }
    } else if a.torus {
        let (Some(l), Some(tau)) = (a.l, a.tau) else {
            return bad_input("--torus needs --l and --tau");
        };
        let inp = TorusMoveInput { l0: a.l0.unwrap_or(0.0), l, tau };
        match torus_move(&inp) {
            Ok(r) => {
                let v = serde_json::to_value(&r).unwrap();
                println!("{}", json17(&v));
                EXIT_OK
            }
            Err(e) => bad_input(&e.to_string()),
        }
    } else if a.sphere {
        let (Some(l), Some(tau)) = (a.l, a.tau) else {
            return bad_input("--sphere needs --l and --tau");
        };
        if a.holes.len() != 4 {
            return bad_input("--sphere needs --holes l1,l2,l3,l4");
        }
        let inp = SphereMoveInput {
            l1: a.holes[0],
            l2: a.holes[1],
            l3: a.holes[2],
            l4: a.holes[3],
            l,
            tau,
        };
        match sphere_move(&inp) {
            Ok(r) => {
                let v = serde_json::to_value(&r).unwrap();
                println!("{}", json17(&v));
                EXIT_OK
            }
            Err(e) => bad_input(&e.to_string()),
        }
    } else {
        bad_input("choose --torus, --sphere, or --point/--surface/--curve")
    }
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

/// Grid syntax: "2^-a..2^-b" (dyadic), "1e-a..1e-b" (decades), or a
/// comma-separated descending list of floats.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let dyadic = |t: &str| -> Option<i32> {
            t.trim().strip_prefix("2^")?.parse::<i32>().ok()
        };
        if let (Some(a), Some(b)) = (dyadic(lo), dyadic(hi)) {
            if a <= b {
                return Err(format!("dyadic range must descend: 2^{a}..2^{b}"));
            }
            return Ok((b..=a).rev().map(|k| 2f64.powi(k)).collect());
        }
        let (a, b): (f64, f64) = match (lo.trim().parse(), hi.trim().parse()) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Err(format!("cannot parse grid range '{s}'")),
        };
        if !(a > b && b > 0.0) {
            return Err(format!("range must be descending and positive: {s}"));
        }
        let (ka, kb) = (a.log10().round() as i32, b.log10().round() as i32);
        return Ok((kb..=ka).rev().map(|k| 10f64.powi(k)).collect());
    }
    let vals: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    vals.map_err(|e| format!("cannot parse grid '{s}': {e}"))
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: Value,
    input_digests: BTreeMap<String, String>,
    version: String,
    seed: u64,
    timestamp: u64,
    threads: usize,
}

/// FNV-1a 64-bit content digest (hex).
fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

pub fn thread_budget() -> usize {
    std::env::var("FNMETRIC_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn cmd_experiment(a: &ExperimentArgs) -> i32 {
    let kind = match a.kind.as_str() {
        "torus" => DualKind::Torus,
        "sphere" => DualKind::Sphere,
        other => return bad_input(&format!("unknown kind '{other}'")),
    };
    let grid_of = |opt: &Option<String>, default: &str| -> Result<Vec<f64>, String> {
        parse_grid(opt.as_deref().unwrap_or(default))
    };
    let mk_cfg = |grid_default: &str| -> Result<SweepConfig, String> {
        Ok(SweepConfig {
            l_bound: a.l_bound,
            t: a.t,
            l_grid: grid_of(&a.grid, grid_default)?,
            eps0: a.eps0,
            seed: a.seed,
            holes: a.holes.clone(),
        })
    };
    let report: Result<ExperimentReport, String> = match a.name.as_str() {
        "prop32" => mk_cfg("1e-1..1e-6").and_then(|c| run_prop32(&c).map_err(|e| e.to_string())),
        "prop42" => mk_cfg("1e-1..1e-6").and_then(|c| run_prop42(&c).map_err(|e| e.to_string())),
        "seq52" => grid_of(&a.eps, "2^-1..2^-20")
            .and_then(|eps| run_seq52(kind, a.t, &eps).map_err(|e| e.to_string())),
        "lemma61" => mk_cfg("1e-1..1e-4").and_then(|c| run_lemma61(&c).map_err(|e| e.to_string())),
        "thm62" => run_thm62_64(&Thm6Mode::NotLipschitz { kind }, a.t).map_err(|e| e.to_string()),
        "thm64" => run_thm62_64(&Thm6Mode::NotContinuous { alpha_count: a.count }, a.t)
            .map_err(|e| e.to_string()),
        "wolpert" => wolpert_battery(a.count.max(100), a.seed).map_err(|e| e.to_string()),
        other => return bad_input(&format!("unknown experiment '{other}'")),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return bad_input(&e),
    };
    let csv = report.to_csv();
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", a.name)));
    if let Err(e) = std::fs::write(&out, &csv) {
        return bad_input(&format!("cannot write {}: {e}", out.display()));
    }
    let config = json!({
        "name": a.name, "t": a.t, "kind": a.kind, "eps": a.eps, "grid": a.grid,
        "holes": a.holes, "l_bound": a.l_bound, "eps0": a.eps0, "count": a.count,
    });
    let manifest = RunManifest {
        command: std::env::args().collect::<Vec<_>>().join(" "),
        config,
        input_digests: BTreeMap::from([(out.display().to_string(), digest(csv.as_bytes()))]),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: a.seed,
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        threads: thread_budget(),
    };
    let mpath = a
        .manifest
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}_manifest.json", a.name)));
    if let Err(e) = std::fs::write(&mpath, serde_json::to_string_pretty(&manifest).unwrap()) {
        return bad_input(&format!("cannot write {}: {e}", mpath.display()));
    }
    let mut stdout = std::io::stdout();
    let _ = writeln!(
        stdout,
        "{}",
        json17(&json!({
            "experiment": a.name,
            "rows": report.rows.len(),
            "passed": report.passed,
            "fitted_slopes": report.fitted_slopes,
            "notes": report.notes,
            "csv": out.display().to_string(),
            "manifest": mpath.display().to_string(),
        }))
    );
    if report.passed {
        EXIT_OK
    } else {
        EXIT_SCIENTIFIC
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Serialize)]
struct Offender {
    sample: usize,
    rel_err: f64,
    input: MoveInputEcho,
    closed_l_prime: f64,
    closed_tau_prime: f64,
    oracle_l_prime: f64,
    oracle_tau_prime: f64,
}

#[derive(Clone, Copy, Serialize)]
#[serde(untagged)]
enum MoveInputEcho {
    Torus(TorusMoveInput),
    Sphere(SphereMoveInput),
}

fn cmd_check(a: &CheckArgs) -> i32 {
    let mut warnings = Vec::new();
    if a.samples == 0 {
        warnings.push("samples = 0: oracle-equivalence check is vacuous".to_string());
    }
    // pre-generate the sample inputs deterministically, then evaluate them on
    // up to FNMETRIC_THREADS workers
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut inputs = Vec::with_capacity(a.samples);
    for i in 0..a.samples {
        let l = rng.gen_range(0.1..3.0);
        let tau = rng.gen_range(-2.0..2.0);
        if i % 2 == 0 {
            inputs.push(MoveInput::Torus(TorusMoveInput { l0: rng.gen_range(0.0..2.0), l, tau }));
        } else {
            inputs.push(MoveInput::Sphere(SphereMoveInput {
                l1: rng.gen_range(0.0..2.0),
                l2: rng.gen_range(0.0..2.0),
                l3: rng.gen_range(0.0..2.0),
                l4: rng.gen_range(0.0..2.0),
                l,
                tau,
            }));
        }
    }
    let eval = |i: usize, inp: &MoveInput| -> Result<Offender, String> {
        let (closed, echo) = match inp {
            MoveInput::Torus(t) => (
                torus_move(t).map_err(|e| e.to_string())?,
                MoveInputEcho::Torus(*t),
            ),
            MoveInput::Sphere(s) => (
                sphere_move(s).map_err(|e| e.to_string())?,
                MoveInputEcho::Sphere(*s),
            ),
        };
        let oracle = measure_dual(inp).map_err(|e| e.to_string())?;
        let el = (closed.l_prime - oracle.l_prime).abs() / closed.l_prime.abs().max(1e-300);
        let et = (closed.tau_prime - oracle.tau_prime).abs() / closed.tau_prime.abs().max(1.0);
        Ok(Offender {
            sample: i,
            rel_err: el.max(et),
            input: echo,
            closed_l_prime: closed.l_prime,
            closed_tau_prime: closed.tau_prime,
            oracle_l_prime: oracle.l_prime,
            oracle_tau_prime: oracle.tau_prime,
        })
    };
    let threads = thread_budget().min(inputs.len().max(1));
    let results: Vec<Result<Offender, String>> = if threads <= 1 {
        inputs.iter().enumerate().map(|(i, inp)| eval(i, inp)).collect()
    } else {
        let mut slots: Vec<Option<Result<Offender, String>>> = vec![None; inputs.len()];
        let chunks: Vec<&mut [Option<Result<Offender, String>>]> = {
            let per = inputs.len().div_ceil(threads);
            slots.chunks_mut(per).collect()
        };
        std::thread::scope(|scope| {
            let per = inputs.len().div_ceil(threads);
            for (w, chunk) in chunks.into_iter().enumerate() {
                let inputs = &inputs;
                let eval = &eval;
                scope.spawn(move || {
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        let i = w * per + k;
                        *slot = Some(eval(i, &inputs[i]));
                    }
                });
            }
        });
        slots.into_iter().map(|s| s.unwrap()).collect()
    };
    let mut worst: Option<Offender> = None;
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(off) => {
                if worst.as_ref().map_or(true, |w| off.rel_err > w.rel_err) {
                    worst = Some(off);
                }
            }
            Err(e) => failures.push(e),
        }
    }
    let oracle_ok =
        failures.is_empty() && worst.as_ref().map_or(true, |w| w.rel_err <= 1e-8);
    // metric axioms on random triples over the four-holed sphere
    let p = PantsDecomposition::four_holed_sphere();
    let mut metric_ok = true;
    let mut metric_msg = String::new();
    let rnd_point = |rng: &mut ChaCha8Rng| -> FNPoint {
        let mut base = BTreeMap::new();
        for c in p.curves.keys() {
            let l = rng.gen_range(0.05..3.0);
            let interior = matches!(
                p.curves[c],
                crate::pants_complex::CurveKind::Interior
            );
            base.insert(
                c.clone(),
                if interior {
                    CurveParams::interior(l, rng.gen_range(-2.0..2.0))
                } else {
                    CurveParams::boundary(l)
                },
            );
        }
        FNPoint::new(base)
    };
    for k in 0..a.triples {
        let (x, y, z) = (rnd_point(&mut rng), rnd_point(&mut rng), rnd_point(&mut rng));
        let d = |u: &FNPoint, v: &FNPoint| fn_distance(u, v, &p).unwrap();
        let (dxy, dyx, dxz, dyz, dxx) = (d(&x, &y), d(&y, &x), d(&x, &z), d(&y, &z), d(&x, &x));
        if dxx != 0.0 || dxy != dyx || dxy < 0.0 || dxz > dxy + dyz {
            metric_ok = false;
            metric_msg = format!(
                "triple {k}: d(x,x)={dxx} d(x,y)={dxy} d(y,x)={dyx} d(x,z)={dxz} d(x,y)+d(y,z)={}",
                dxy + dyz
            );
            break;
        }
    }
    let passed = oracle_ok && metric_ok;
    let summary = json!({
        "oracle_samples": a.samples,
        "threads": threads,
        "max_rel_err": worst.as_ref().map(|w| w.rel_err),
        "worst": worst,
        "oracle_failures": failures,
        "metric_triples": a.triples,
        "metric_ok": metric_ok,
        "metric_detail": if metric_msg.is_empty() { Value::Null } else { Value::String(metric_msg) },
        "warnings": warnings,
        "passed": passed,
    });
    println!("{}", json17(&summary));
    if passed {
        EXIT_OK
    } else {
        EXIT_SCIENTIFIC
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("2^-1..2^-4").unwrap();
        assert_eq!(g, vec![0.5, 0.25, 0.125, 0.0625]);
        let g = parse_grid("1e-1..1e-3").unwrap();
        assert_eq!(g, vec![0.1, 0.01, 0.001]);
        let g = parse_grid("0.3, 0.2, 0.1").unwrap();
        assert_eq!(g, vec![0.3, 0.2, 0.1]);
        assert!(parse_grid("2^-5..2^-2").is_err());
        assert!(parse_grid("abc").is_err());
    }

    #[test]
    fn json17_formats_floats() {
        let v = json!({ "x": 0.1, "n": 3, "s": "a", "arr": [1.5] });
        let s = json17(&v);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\":3"));
        assert!(s.contains("1.5000000000000000e0"));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(b"fnmetric"), digest(b"fnmetric"));
        assert_ne!(digest(b"a"), digest(b"b"));
    }
}
