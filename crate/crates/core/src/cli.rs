//! Command-line front door: build constructions, export demonstration
//! artifacts (CSV/JSON) and run the verification battery.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 when a
//! verification check fails, 4 for I/O failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::average::{
    blowup_rows, fmt17, grid_scan, riemann_sum, write_blowup_csv, write_scan_csv, TagRule,
    TaggedPartition,
};
use crate::block_index::{block_first, block_last};
use crate::construction::{ConstructionSpec, SpecConfig};
use crate::diagnostics::{self, verify_proof_inequalities};
use crate::error::Error;
use crate::moduli::extremal_witness;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "lpave",
    about = "Riemann averages of tent-sum functions with values in l_p, 0 < p <= 1",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub spec: SpecArgs,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Thm13,
    Thm14,
    Thm15,
    Custom,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Exponent p of the ambient space, in (0, 1].
    #[arg(long, global = true, default_value_t = 0.5)]
    pub p: f64,

    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Thm14)]
    pub variant: VariantArg,

    /// Mass decay exponent b (thm13); defaults to 2(1-p)/p + 1.
    #[arg(long, global = true)]
    pub b: Option<f64>,

    /// Maximum block index for explicit enumeration.
    #[arg(long, global = true)]
    pub q_cap: Option<u64>,

    /// Relative tolerance for comparisons.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Amplitude rule for the custom variant:
    /// inverse-modulus | inverse-sqrt-modulus | power:<e>.
    #[arg(long, global = true)]
    pub amplitude: Option<String>,

    /// Mass rule for the custom variant: geometric | power-tail:<b>.
    #[arg(long, global = true)]
    pub beta: Option<String>,

    /// JSON config file; values present in the file override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the resolved construction and its mass/integrability checks.
    Construct,
    /// CSV of the extremal half-block average norms per block.
    BlowupTable {
        /// Largest block to tabulate (must not exceed the cap).
        #[arg(long, default_value_t = 25)]
        q_max: u64,
    },
    /// CSV grid of average norms over a sub-square.
    Scan {
        /// Points per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Axis range for s as `lo,hi`.
        #[arg(long, default_value = "0,1", value_parser = parse_range)]
        s_range: (f64, f64),
        /// Axis range for t as `lo,hi`.
        #[arg(long, default_value = "0,1", value_parser = parse_range)]
        t_range: (f64, f64),
        /// Add exact block-boundary nodes to both axes.
        #[arg(long)]
        snap: bool,
    },
    /// CSV of Riemann-sum norms for dyadic meshes 2^-m, m = 1..=mesh_exp.
    Riemann {
        #[arg(long, default_value_t = 12)]
        mesh_exp: u32,
        /// Tag placement within each subinterval.
        #[arg(long, value_enum, default_value_t = TagArg::Midpoint)]
        tags: TagArg,
    },
    /// Run the verification battery; exits nonzero if any check fails.
    Verify {
        /// Sampled spans per inequality family.
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Depth of the per-block checks.
        #[arg(long, default_value_t = 30)]
        q_max: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TagArg {
    Left,
    Midpoint,
    Right,
}

impl From<TagArg> for TagRule {
    fn from(t: TagArg) -> Self {
        match t {
            TagArg::Left => TagRule::Left,
            TagArg::Midpoint => TagRule::Midpoint,
            TagArg::Right => TagRule::Right,
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi but got {s:?}"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((lo, hi))
}

/// Resolve the construction from flags and the optional config file;
/// fields present in the file win over the flags.
pub fn resolve_spec(args: &SpecArgs) -> Result<ConstructionSpec, Error> {
    let mut cfg = SpecConfig {
        p: args.p,
        variant: match args.variant {
            VariantArg::Thm13 => "thm13",
            VariantArg::Thm14 => "thm14",
            VariantArg::Thm15 => "thm15",
            VariantArg::Custom => "custom",
        }
        .to_string(),
        b: args.b,
        q_cap: args.q_cap,
        tol: args.tol,
        amplitude: args.amplitude.clone(),
        beta: args.beta.clone(),
    };
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
            Error::InvalidConfig(format!("cannot parse config {}: {e}", path.display()))
        })?;
        let get_f64 = |key: &str| v.get(key).and_then(|x| x.as_f64());
        if let Some(p) = get_f64("p") {
            cfg.p = p;
        }
        if let Some(variant) = v.get("variant").and_then(|x| x.as_str()) {
            cfg.variant = variant.to_string();
        }
        if let Some(b) = get_f64("b") {
            cfg.b = Some(b);
        }
        if let Some(q_cap) = v.get("q_cap").and_then(|x| x.as_u64()) {
            cfg.q_cap = Some(q_cap);
        }
        if let Some(tol) = get_f64("tol") {
            cfg.tol = Some(tol);
        }
        if let Some(a) = v.get("amplitude").and_then(|x| x.as_str()) {
            cfg.amplitude = Some(a.to_string());
        }
        if let Some(bt) = v.get("beta").and_then(|x| x.as_str()) {
            cfg.beta = Some(bt.to_string());
        }
    }
    ConstructionSpec::try_from(cfg)
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> std::io::Result<()> {
    match out {
        Some(path) => write_with_context(path, bytes),
        None => std::io::stdout().write_all(bytes),
    }
}

fn write_with_context(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    fs::write(path, bytes)
        .map_err(|e| std::io::Error::new(e.kind(), format!("writing {}: {e}", path.display())))
}

/// Execute a parsed invocation and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    let spec = match resolve_spec(&cli.spec) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match cli.command {
        Command::Construct => cmd_construct(&spec, &cli.out),
        Command::BlowupTable { q_max } => cmd_blowup_table(&spec, q_max, &cli.out),
        Command::Scan {
            grid,
            s_range,
            t_range,
            snap,
        } => cmd_scan(&spec, grid, s_range, t_range, snap, &cli.out),
        Command::Riemann { mesh_exp, tags } => cmd_riemann(&spec, mesh_exp, tags.into(), &cli.out),
        Command::Verify {
            trials,
            seed,
            q_max,
        } => {
            return match cmd_verify(&spec, trials, seed, q_max, &cli.out) {
                Ok(true) => EXIT_OK,
                Ok(false) => EXIT_VERIFY,
                Err(code) => code,
            };
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

fn config_err(e: impl std::fmt::Display) -> i32 {
    eprintln!("error: {e}");
    EXIT_CONFIG
}

fn io_err(e: impl std::fmt::Display) -> i32 {
    eprintln!("error: {e}");
    EXIT_IO
}

fn cmd_construct(spec: &ConstructionSpec, out: &Option<PathBuf>) -> Result<(), i32> {
    let config: SpecConfig = spec.clone().into();
    let integrability = spec.integrability();
    let summary = serde_json::json!({
        "config": config,
        "beta_mass": spec.beta_mass(),
        "beta_mass_error": (spec.beta_mass() - 0.5).abs(),
        "growth_exponent": spec.growth_exponent(),
        "amplitude_vanishes": spec.amplitude_vanishes(),
        "integrability": integrability,
        "classification": diagnostics::classify(spec),
    });
    let mut text = serde_json::to_string_pretty(&summary).expect("serializable summary");
    text.push('\n');
    emit(out, text.as_bytes()).map_err(io_err)
}

fn cmd_blowup_table(spec: &ConstructionSpec, q_max: u64, out: &Option<PathBuf>) -> Result<(), i32> {
    if q_max == 0 || q_max > spec.q_cap() {
        return Err(config_err(format!(
            "blowup table depth {q_max} outside [1, q_cap = {}]",
            spec.q_cap()
        )));
    }
    let rows = blowup_rows(spec, q_max).map_err(config_err)?;
    let mut buf = Vec::new();
    write_blowup_csv(&rows, &mut buf).map_err(io_err)?;
    emit(out, &buf).map_err(io_err)
}

fn cmd_scan(
    spec: &ConstructionSpec,
    grid: usize,
    s_range: (f64, f64),
    t_range: (f64, f64),
    snap: bool,
    out: &Option<PathBuf>,
) -> Result<(), i32> {
    let samples = grid_scan(spec, s_range, t_range, grid, snap).map_err(config_err)?;
    let mut buf = Vec::new();
    write_scan_csv(&samples, &mut buf).map_err(io_err)?;
    emit(out, &buf).map_err(io_err)
}

fn cmd_riemann(
    spec: &ConstructionSpec,
    mesh_exp: u32,
    tags: TagRule,
    out: &Option<PathBuf>,
) -> Result<(), i32> {
    if mesh_exp == 0 || mesh_exp > 24 {
        return Err(config_err(format!(
            "mesh exponent {mesh_exp} outside [1, 24]"
        )));
    }
    let mut buf = String::from("m,mesh,norm\n");
    for m in 1..=mesh_exp {
        let partition = TaggedPartition::uniform_dyadic(m, tags);
        let norm = riemann_sum(spec, &partition)
            .map_err(config_err)?
            .quasi_norm(spec.p());
        buf.push_str(&format!(
            "{m},{},{}\n",
            fmt17(partition.mesh()),
            fmt17(norm)
        ));
    }
    emit(out, buf.as_bytes()).map_err(io_err)
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn cmd_verify(
    spec: &ConstructionSpec,
    trials: u64,
    seed: u64,
    q_max: u64,
    out: &Option<PathBuf>,
) -> Result<bool, i32> {
    if q_max == 0 || q_max > spec.q_cap() {
        return Err(config_err(format!(
            "verification depth {q_max} outside [1, q_cap = {}]",
            spec.q_cap()
        )));
    }
    let mut checks: Vec<Check> = Vec::new();

    let mass = spec.beta_mass();
    checks.push(Check {
        name: "mass-sums-to-half",
        passed: (mass - 0.5).abs() <= 1e-12,
        detail: format!("sum beta = {}", fmt17(mass)),
    });

    let mut worst_block = 0.0f64;
    for q in 1..=q_max {
        let norm = spec
            .partial_sum(block_first(q), block_last(q))
            .map_err(config_err)?
            .quasi_norm(spec.p());
        worst_block = worst_block.max(norm);
    }
    checks.push(Check {
        name: "full-blocks-cancel",
        passed: worst_block <= 1e-12,
        detail: format!("max |block sum| = {} over q <= {q_max}", fmt17(worst_block)),
    });

    let mut witness_ok = true;
    for q in 1..=q_max.min(50) {
        if let Err(e) = extremal_witness(q, spec.p()).and_then(|w| w.validate(spec.p())) {
            witness_ok = false;
            checks.push(Check {
                name: "witness-families-valid",
                passed: false,
                detail: format!("q = {q}: {e}"),
            });
            break;
        }
    }
    if witness_ok {
        checks.push(Check {
            name: "witness-families-valid",
            passed: true,
            detail: format!("q <= {}", q_max.min(50)),
        });
    }

    let integrability = spec.integrability();
    checks.push(Check {
        name: "integrability-series-converges",
        passed: integrability.converges,
        detail: format!(
            "partial = {}, tail bound = {}",
            fmt17(integrability.partial),
            fmt17(integrability.tail_bound)
        ),
    });

    let whole = crate::average::integral(spec, 0.0, 1.0)
        .map_err(config_err)?
        .quasi_norm(spec.p());
    checks.push(Check {
        name: "unit-interval-integral-vanishes",
        passed: whole <= 1e-12,
        detail: format!("|integral(0,1)| = {}", fmt17(whole)),
    });

    let ineq = verify_proof_inequalities(spec, trials, seed).map_err(config_err)?;
    checks.push(Check {
        name: "span-inequalities",
        passed: ineq.all_hold(),
        detail: if ineq.all_hold() {
            format!("{} sampled spans, no violations", ineq.trials)
        } else {
            format!(
                "{} violations, first: {:?}",
                ineq.violations.len(),
                ineq.violations[0]
            )
        },
    });
    checks.push(Check {
        name: "half-block-mass-equality",
        passed: ineq.half_block_max_gap <= 1e-9,
        detail: format!("max relative gap = {}", fmt17(ineq.half_block_max_gap)),
    });

    let mut worst_rel = 0.0f64;
    for q in 1..=q_max {
        let lo = spec.node(q * q).map_err(config_err)?;
        let hi = spec.node(block_last(q)).map_err(config_err)?;
        let norm = crate::average::ave(spec, lo, hi).map_err(config_err)?.norm;
        let expect = spec.amplitude_modulus(q);
        worst_rel = worst_rel.max((norm - expect).abs() / expect);
    }
    checks.push(Check {
        name: "half-block-average-consistency",
        passed: worst_rel <= 1e-9,
        detail: format!("max relative deviation = {}", fmt17(worst_rel)),
    });

    let report = diagnostics::report(spec, q_max).map_err(config_err)?;
    let all_passed = checks.iter().all(|c| c.passed);

    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!(
            "{} {} ({})\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    text.push_str(&format!("classification: {}\n", report.classification));
    print!("{text}");

    if out.is_some() {
        let doc = serde_json::json!({
            "checks": checks
                .iter()
                .map(|c| serde_json::json!({
                    "name": c.name,
                    "passed": c.passed,
                    "detail": c.detail,
                }))
                .collect::<Vec<_>>(),
            "inequalities": ineq,
            "diagnostics": report,
        });
        let mut body = serde_json::to_string_pretty(&doc).expect("serializable report");
        body.push('\n');
        emit(out, body.as_bytes()).map_err(io_err)?;
    }
    Ok(all_passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn resolve_defaults_to_thm14() {
        let cli = Cli::try_parse_from(["lpave", "construct"]).unwrap();
        let spec = resolve_spec(&cli.spec).unwrap();
        assert_eq!(spec.variant().name(), "thm14");
        assert_eq!(spec.p().get(), 0.5);
    }

    #[test]
    fn thm13_default_b_is_filled_in() {
        let cli = Cli::try_parse_from(["lpave", "construct", "--variant", "thm13", "--p", "0.5"])
            .unwrap();
        let spec = resolve_spec(&cli.spec).unwrap();
        assert_eq!(
            spec.variant(),
            crate::construction::Variant::Thm13 { b: 3.0 }
        );
    }

    #[test]
    fn inadmissible_decay_is_rejected() {
        let cli = Cli::try_parse_from([
            "lpave",
            "construct",
            "--variant",
            "thm13",
            "--p",
            "0.5",
            "--b",
            "1.5",
        ])
        .unwrap();
        let err = resolve_spec(&cli.spec).unwrap_err();
        assert!(err.to_string().contains("b > 2(1-p)/p"));
    }

    #[test]
    fn config_file_overrides_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"variant": "thm15", "p": 0.5}"#).unwrap();
        let cli = Cli::try_parse_from([
            "lpave",
            "construct",
            "--variant",
            "thm14",
            "--p",
            "0.75",
            "--config",
            path.to_str().unwrap(),
        ])
        .unwrap();
        let spec = resolve_spec(&cli.spec).unwrap();
        assert_eq!(spec.variant().name(), "thm15");
        assert_eq!(spec.p().get(), 0.5);
    }

    #[test]
    fn range_parser() {
        assert_eq!(parse_range("0,1").unwrap(), (0.0, 1.0));
        assert_eq!(parse_range("0.25, 0.75").unwrap(), (0.25, 0.75));
        assert!(parse_range("0.25").is_err());
    }
}
