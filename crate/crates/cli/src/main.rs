use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use hkcoeff::chains::{
    chain_complex, compare_with_module, fm_system, halftree_h0, homology, invariants_complex, m_functor, RegionKind,
};
use hkcoeff::coeff::FaceCaches;
use hkcoeff::hecke::{parahoric_algebra, parse_ring, validate_module, ModuleJson};
use hkcoeff::verify::{run_suite, seeded_module, Suite, SuiteConfig};
use hkcoeff::{Face, GroupData, GroupKind, HeckeModule, PresentedModule, Zm};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hkcoeff", version, about = "Pro-p Iwahori-Hecke algebras and coefficient systems on rank-one trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct GroupArgs {
    /// sl2, pgl2 or gl2
    #[arg(long, default_value = "sl2")]
    group: GroupKind,
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Coefficient ring, written zmod:<m>
    #[arg(long, default_value = "zmod:2", value_parser = ring_arg)]
    ring: Zm,
}

impl GroupArgs {
    fn group(&self) -> Result<GroupData> {
        Ok(GroupData::new(self.group, self.q)?)
    }
}

fn ring_arg(s: &str) -> std::result::Result<Zm, String> {
    parse_ring(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Structure constants of a parahoric subalgebra.
    Algebra {
        #[command(flatten)]
        g: GroupArgs,
        /// x0, x1 or C
        #[arg(long, default_value = "C")]
        face: Face,
        /// Use the full stabilizer algebra
        #[arg(long)]
        dagger: bool,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        cases: usize,
    },
    /// Write a random H-module as JSON.
    Module {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// The diagram F(M) of a module file.
    Fm {
        #[arg(long)]
        module: PathBuf,
        #[arg(long, default_value_t = 1)]
        radius: usize,
    },
    /// Homology of F(M) on a region, with M(F(M)) on apartments.
    Homology {
        #[arg(long)]
        module: PathBuf,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// apartment, tree or halftree
        #[arg(long, default_value = "apartment")]
        region: RegionKind,
    },
    /// Half-tree H_0 of the invariants and the map M -> F(M) at t x0.
    Halftree {
        #[arg(long)]
        module: PathBuf,
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
}

fn read_module(path: &Path) -> Result<HeckeModule> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let j: ModuleJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    validate_module(&j).with_context(|| format!("validating {}", path.display()))
}

fn module_json(m: &PresentedModule) -> Value {
    json!({
        "rank": m.rank(),
        "relations": m.relations().to_rows(),
        "zero": m.is_zero(),
    })
}

fn checks_pass(v: &Value) -> bool {
    v["checks"].as_array().is_none_or(|cs| cs.iter().all(|c| c["pass"] == true))
}

/// Returns the JSON artifact and whether every embedded check passed.
fn run(cli: Cli) -> Result<(Value, bool)> {
    match cli.command {
        Command::Algebra { g, face, dagger } => {
            let gd = g.group()?;
            let alg = parahoric_algebra(gd, g.ring, face, dagger)?;
            let n = alg.rank();
            let basis: Vec<String> = alg.basis().iter().map(|w| gd.display(w)).collect();
            let table: Vec<Vec<Vec<u64>>> = (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| alg.structure_constant(i, j, k)).collect()).collect())
                .collect();
            Ok((
                json!({
                    "schema": 1,
                    "group": {"kind": gd.kind().name(), "q": gd.q()},
                    "ring": format!("zmod:{}", g.ring.modulus()),
                    "face": face.to_string(),
                    "dagger": dagger,
                    "rank": n,
                    "basis": basis,
                    "table": table,
                }),
                true,
            ))
        }
        Command::Verify { suite, g, radius, seed, cases } => {
            let cfg = SuiteConfig {
                suite,
                gd: g.group()?,
                ring: g.ring,
                radius,
                seed,
                cases,
            };
            let report = run_suite(&cfg)?;
            Ok((report.to_json(), report.passed()))
        }
        Command::Module { g, max_rank, seed } => {
            let m = seeded_module(g.group()?, g.ring, max_rank, seed)?;
            Ok((serde_json::to_value(m.to_json())?, true))
        }
        Command::Fm { module, radius } => {
            let m = read_module(&module)?;
            let caches = FaceCaches::new(m.gd, m.ring())?;
            let (fm, sys) = fm_system(&m, &caches, RegionKind::Apartment, radius)?;
            let report = fm.diagram.validate();
            Ok((
                json!({
                    "schema": 1,
                    "diagram": fm.diagram.to_json(),
                    "region": {"chambers": sys.region.chambers.len(), "vertices": sys.region.vertices.len()},
                    "valid": report.is_ok(),
                    "error": report.err().map(|e| e.to_string()),
                }),
                true,
            ))
        }
        Command::Homology { module, radius, region } => {
            let m = read_module(&module)?;
            let caches = FaceCaches::new(m.gd, m.ring())?;
            let (fm, sys) = fm_system(&m, &caches, region, radius)?;
            let k = chain_complex(&sys)?;
            let mut out = json!({
                "schema": 1,
                "region": {"kind": format!("{region:?}").to_lowercase(), "radius": radius,
                           "chambers": sys.region.chambers.len(), "vertices": sys.region.vertices.len()},
                "h0": module_json(&homology(&k, 0)?),
                "h1": module_json(&homology(&k, 1)?),
            });
            if region == RegionKind::Apartment {
                let (ki, _) = invariants_complex(&sys)?;
                out["invariants"] = json!({
                    "h0": module_json(&homology(&ki, 0)?),
                    "h1": module_json(&homology(&ki, 1)?),
                });
                let mf = m_functor(&sys)?;
                let (_, iso) = compare_with_module(&mf, &m, &fm)?;
                let mut checks = mf.checks.clone();
                checks.push(iso);
                out["m_functor"] = serde_json::to_value(mf.module.to_json())?;
                out["checks"] = serde_json::to_value(&checks)?;
            }
            let ok = checks_pass(&out);
            Ok((out, ok))
        }
        Command::Halftree { module, radius } => {
            let m = read_module(&module)?;
            if m.gd.kind() == GroupKind::Gl2 {
                bail!("half-tree computations need SL2 or PGL2");
            }
            let caches = FaceCaches::new(m.gd, m.ring())?;
            let r = halftree_h0(&m, &caches, radius)?;
            let out = json!({
                "schema": 1,
                "radius": radius,
                "h0": module_json(&r.h0),
                "phi_t": r.phi_t.to_rows(),
                "checks": r.checks,
            });
            let ok = checks_pass(&out);
            Ok((out, ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((value, ok)) => {
            let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
