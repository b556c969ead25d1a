//! Command-line front end for the minops workbench.
//!
//! Every subcommand prints one deterministic report to stdout — JSON by
//! default, or Markdown/CSV via `--format` — echoing a run manifest
//! alongside the result. Timing goes to stderr so repeated runs produce
//! bit-identical stdout. The exit code is 0 whenever a verdict was
//! computed (including negative verdicts), 1 when the self test fails,
//! and 2 on input or budget errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use minops::action::FiniteAction;
use minops::clones::{in_group_part, is_almost_minimal, GenBudget, Verdict};
use minops::constructions::{
    check_palfy_identities, default_palfy_base, exmin_minority, mstar, odd_majority, odd_malcev,
    palfy_op, rank_orbit_semiprojection, scan_quasi_majority_weak_osp, verify_palfy_closure,
    PalfyParams,
};
use minops::designs::{weight_determining_set, wd};
use minops::oep::{has_oep, BoundSet};
use minops::op::{
    is_g_quasi_minority, is_odd_majority, is_odd_malcev, orbit_semiprojection_witness,
    rosenberg_type, weak_orbit_semiprojection_witness, OpTable,
};
use minops::orbital::{
    blow_down, check_absorption, check_core_relations, member_family, overlapping_member,
    refute_binary_injective, wnu_tower, wnu_violation, xi2, InjectivityRefutation, Orbital,
    Window,
};
use minops::quasigroups::{
    brute_force_ginv_boolean, check_boolean, check_ginv_steiner, enumerate_ginv_boolean,
    ginv_boolean_count_formula, ginv_steiner_count_formula,
};

#[derive(Parser)]
#[command(name = "minops", version, about = "Workbench for minimal operations over permutation groups")]
struct Cli {
    /// Output format for the report on stdout.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Markdown => "markdown",
            Format::Csv => "csv",
        }
    }
}

/// How to obtain the group action: exactly one source must be given.
#[derive(Args, Clone)]
struct ActionArgs {
    /// Free action of an elementary abelian 2-group: S orbits, group (Z_2)^M.
    #[arg(long, num_args = 2, value_names = ["S", "M"])]
    free_boolean: Option<Vec<usize>>,
    /// Free action of a cyclic group: S orbits of the given order.
    #[arg(long, num_args = 2, value_names = ["S", "ORDER"])]
    free_cyclic: Option<Vec<usize>>,
    /// File holding an action in the textual exchange format.
    #[arg(long, value_name = "PATH")]
    action_file: Option<PathBuf>,
}

impl ActionArgs {
    fn resolve(&self) -> Result<FiniteAction, String> {
        let chosen = usize::from(self.free_boolean.is_some())
            + usize::from(self.free_cyclic.is_some())
            + usize::from(self.action_file.is_some());
        if chosen != 1 {
            return Err(
                "give exactly one of --free-boolean, --free-cyclic, --action-file".to_string()
            );
        }
        if let Some(sm) = &self.free_boolean {
            return FiniteAction::free_boolean(sm[0], sm[1]).map_err(|e| e.to_string());
        }
        if let Some(so) = &self.free_cyclic {
            return FiniteAction::free_cyclic(so[0], so[1]).map_err(|e| e.to_string());
        }
        let path = self.action_file.as_ref().expect("one source chosen");
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        FiniteAction::parse(&text).map_err(|e| e.to_string())
    }

    fn echo(&self) -> Value {
        json!({
            "free_boolean": self.free_boolean,
            "free_cyclic": self.free_cyclic,
            "action_file": self.action_file.as_ref().map(|p| p.display().to_string()),
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Exmin,
    RankOsp,
    OddMajority,
    OddMalcev,
    Palfy,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Exmin => "exmin",
            Family::RankOsp => "rank-osp",
            Family::OddMajority => "odd-majority",
            Family::OddMalcev => "odd-malcev",
            Family::Palfy => "palfy",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify an operation (or sweep all ternary operations on a
    /// two-point domain) against an action.
    Classify {
        #[command(flatten)]
        action: ActionArgs,
        /// File holding an operation table in the textual exchange format.
        #[arg(long, value_name = "PATH")]
        op_file: Option<PathBuf>,
        /// Operation table given inline.
        #[arg(long, value_name = "TEXT")]
        op_text: Option<String>,
        /// Classify every ternary operation on the domain (domain size 2 only).
        #[arg(long)]
        sweep_ternary: bool,
        /// Clone-generation budget: maximum distinct tables.
        #[arg(long, default_value_t = 2_000_000)]
        max_tables: usize,
        /// Clone-generation budget: maximum cell evaluations.
        #[arg(long, default_value_t = 100_000_000)]
        max_evals: u64,
    },
    /// Build one of the named operation families and verify its laws.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[command(flatten)]
        action: ActionArgs,
        /// Arity, where the family has one to choose.
        #[arg(long)]
        arity: Option<usize>,
        /// Base point of the two-parameter family.
        #[arg(long)]
        base: Option<usize>,
        /// First group-element index of the two-parameter family.
        #[arg(long, default_value_t = 0)]
        alpha: usize,
        /// Second group-element index of the two-parameter family.
        #[arg(long, default_value_t = 0)]
        beta: usize,
        /// Include the full operation table in the report.
        #[arg(long)]
        emit_table: bool,
    },
    /// Enumerate the invariant Boolean-quadruple operations of a free
    /// action of an elementary abelian 2-group.
    EnumerateSteiner {
        #[command(flatten)]
        action: ActionArgs,
        /// Also enumerate by brute force and compare.
        #[arg(long)]
        brute_force: bool,
        /// Also evaluate the counting formula and compare.
        #[arg(long)]
        count_check: bool,
        /// Include the operation tables in the report.
        #[arg(long)]
        emit_tables: bool,
    },
    /// Counting formulas for invariant quadruple operations, with
    /// enumeration cross-checks where feasible.
    CountCheck {
        #[command(flatten)]
        action: ActionArgs,
    },
    /// Verify the composition identities and clone closure of the
    /// two-parameter base-point family.
    PalfyVerify {
        #[command(flatten)]
        action: ActionArgs,
        #[arg(long)]
        arity: usize,
        /// Base point (default: least point of the least nontrivial orbit).
        #[arg(long)]
        base: Option<usize>,
    },
    /// Decide the orbital extension property for a forbidden-triangle set.
    OepCheck {
        /// File with one triangle per line (e.g. `C111`, `L212`).
        #[arg(long, value_name = "PATH")]
        bounds: Option<PathBuf>,
        /// A named preset: s3tilde, s4, or empty.
        #[arg(long, value_name = "NAME")]
        preset: Option<String>,
    },
    /// Orbital analysis demo on a two-part window: pattern table,
    /// near-unanimity towers, and injectivity refutations.
    DatalogDemo {
        /// Active points in part 0.
        #[arg(long, default_value_t = 3)]
        p: usize,
        /// Active points in part 1.
        #[arg(long, default_value_t = 3)]
        q: usize,
    },
    /// Run a quick battery over every module.
    Selftest,
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match run(&cli) {
        Ok((report, code)) => {
            print!("{}", render(&report, cli.format));
            code
        }
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    };
    eprintln!("elapsed: {}ms", start.elapsed().as_millis());
    std::process::exit(code);
}

fn run(cli: &Cli) -> Result<(Value, i32), String> {
    match &cli.command {
        Command::Classify { action, op_file, op_text, sweep_ternary, max_tables, max_evals } => {
            let budget = GenBudget { max_tables: *max_tables, max_evals: *max_evals };
            let act = action.resolve()?;
            let params = json!({
                "action": action.echo(),
                "op_file": op_file.as_ref().map(|p| p.display().to_string()),
                "sweep_ternary": sweep_ternary,
                "max_tables": max_tables,
                "max_evals": max_evals,
            });
            let result = if *sweep_ternary {
                if op_file.is_some() || op_text.is_some() {
                    return Err("--sweep-ternary excludes --op-file/--op-text".to_string());
                }
                sweep_ternary_report(&act, &budget)?
            } else {
                let text = match (op_file, op_text) {
                    (Some(path), None) => std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read {}: {e}", path.display()))?,
                    (None, Some(text)) => text.clone(),
                    _ => return Err("give exactly one of --op-file, --op-text".to_string()),
                };
                let op = OpTable::parse(&text).map_err(|e| e.to_string())?;
                classify_report(&act, &op, &budget)?
            };
            Ok((with_manifest("classify", cli.format, params, result), 0))
        }
        Command::Construct { family, action, arity, base, alpha, beta, emit_table } => {
            let act = action.resolve()?;
            let params = json!({
                "action": action.echo(),
                "family": family.name(),
                "arity": arity,
                "base": base,
                "alpha": alpha,
                "beta": beta,
            });
            let result = construct_report(&act, *family, *arity, *base, *alpha, *beta, *emit_table)?;
            Ok((with_manifest("construct", cli.format, params, result), 0))
        }
        Command::EnumerateSteiner { action, brute_force, count_check, emit_tables } => {
            let act = action.resolve()?;
            let params = json!({
                "action": action.echo(),
                "brute_force": brute_force,
                "count_check": count_check,
            });
            let result = enumerate_report(&act, *brute_force, *count_check, *emit_tables)?;
            Ok((with_manifest("enumerate-steiner", cli.format, params, result), 0))
        }
        Command::CountCheck { action } => {
            let act = action.resolve()?;
            let params = json!({ "action": action.echo() });
            let result = count_check_report(&act)?;
            Ok((with_manifest("count-check", cli.format, params, result), 0))
        }
        Command::PalfyVerify { action, arity, base } => {
            let act = action.resolve()?;
            let params = json!({ "action": action.echo(), "arity": arity, "base": base });
            let b = match base {
                Some(b) => *b,
                None => default_palfy_base(&act)
                    .ok_or_else(|| "every orbit is a fixed point; give --base".to_string())?,
            };
            let identities = check_palfy_identities(&act, *arity, b).map_err(|e| e.to_string())?;
            let closure = verify_palfy_closure(&act, *arity, b).map_err(|e| e.to_string())?;
            let result = json!({
                "arity": arity,
                "base_point": b,
                "identities": {
                    "profiles": identities.profiles,
                    "distinct_leading": identities.distinct_leading,
                    "collapsed_unary": identities.collapsed_unary,
                    "collapsed_family": identities.collapsed_family,
                    "evaluations": identities.evaluations,
                },
                "closure": {
                    "slice_size": closure.slice_size,
                    "essential_count": closure.essential_count,
                    "all_regenerate": closure.all_regenerate,
                    "forms": closure.forms.iter().map(|f| json!({
                        "alpha": f.alpha,
                        "beta": f.beta,
                        "leading_var": f.leading_var,
                    })).collect::<Vec<_>>(),
                },
            });
            Ok((with_manifest("palfy-verify", cli.format, params, result), 0))
        }
        Command::OepCheck { bounds, preset } => {
            let set = match (bounds, preset) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                    BoundSet::parse(&text).map_err(|e| e.to_string())?
                }
                (None, Some(name)) => match name.as_str() {
                    "s3tilde" => BoundSet::s3tilde(),
                    "s4" => BoundSet::s4(),
                    "empty" => BoundSet::empty(),
                    other => return Err(format!("unknown preset {other:?}")),
                },
                _ => return Err("give exactly one of --bounds, --preset".to_string()),
            };
            let params = json!({
                "bounds": bounds.as_ref().map(|p| p.display().to_string()),
                "preset": preset,
            });
            let report = has_oep(&set);
            let result = json!({
                "bounds": set.triangles().map(|t| t.to_string()).collect::<Vec<_>>(),
                "holds": report.holds,
                "conditional": report.conditional,
                "open_orbital": report.open_orbital.map(|o| o.to_string()),
                "single_attachment_witness": report.single_rho_witness.map(|o| o.to_string()),
                "orbitals": report.orbitals.iter().map(|s| json!({
                    "orbital": s.orbital.to_string(),
                    "blocked_by": s.blocked_by.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            Ok((with_manifest("oep-check", cli.format, params, result), 0))
        }
        Command::DatalogDemo { p, q } => {
            let params = json!({ "p": p, "q": q });
            let result = datalog_report(*p, *q)?;
            Ok((with_manifest("datalog-demo", cli.format, params, result), 0))
        }
        Command::Selftest => {
            let (result, all_pass) = selftest_report();
            let code = if all_pass { 0 } else { 1 };
            Ok((with_manifest("selftest", cli.format, json!({}), result), code))
        }
    }
}

fn with_manifest(command: &str, format: Format, parameters: Value, result: Value) -> Value {
    json!({
        "manifest": {
            "tool": "minops",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "format": format.name(),
            "parameters": parameters,
        },
        "result": result,
    })
}

fn verdict_value<W>(v: &Verdict<W>) -> Value {
    match v {
        Verdict::Holds => json!("holds"),
        Verdict::Fails(_) => json!("fails"),
        Verdict::Unknown(_) => json!("unknown"),
    }
}

fn classify_report(
    action: &FiniteAction,
    op: &OpTable,
    budget: &GenBudget,
) -> Result<Value, String> {
    if op.domain_size() != action.domain_size() {
        return Err(format!(
            "operation domain {} does not match action domain {}",
            op.domain_size(),
            action.domain_size()
        ));
    }
    let in_group = in_group_part(op, action);
    let rtype = if in_group {
        "group".to_string()
    } else {
        rosenberg_type(op, action).map_err(|e| e.to_string())?.to_string()
    };
    let almost_minimal = if in_group {
        json!("in-group")
    } else {
        verdict_value(&is_almost_minimal(action, op, budget).map_err(|e| e.to_string())?)
    };
    let osp = if op.arity() >= 2 {
        orbit_semiprojection_witness(op, action)
            .map_err(|e| e.to_string())?
            .map(|w| json!({ "coord": w.coord, "element": w.element }))
    } else {
        None
    };
    let weak = if op.arity() >= 2 {
        weak_orbit_semiprojection_witness(op, action)
            .map_err(|e| e.to_string())?
            .is_some()
    } else {
        false
    };
    Ok(json!({
        "arity": op.arity(),
        "domain_size": op.domain_size(),
        "type": rtype,
        "essential_coords": op.essential_coords(),
        "idempotent": op.is_idempotent(),
        "in_group_part": in_group,
        "almost_minimal": almost_minimal,
        "orbit_semiprojection": osp,
        "weak_orbit_semiprojection": weak,
    }))
}

fn sweep_ternary_report(action: &FiniteAction, budget: &GenBudget) -> Result<Value, String> {
    let n = action.domain_size();
    if n != 2 {
        return Err(format!("--sweep-ternary supports domain size 2, the action has {n}"));
    }
    let mut rows = Vec::new();
    let mut by_type: std::collections::BTreeMap<String, u64> = Default::default();
    let mut almost_minimal_count = 0u64;
    for index in 0..256usize {
        let values: Vec<usize> = (0..8).map(|cell| (index >> cell) & 1).collect();
        let op = OpTable::new(2, 3, values).map_err(|e| e.to_string())?;
        let in_group = in_group_part(&op, action);
        let rtype = if in_group {
            "group".to_string()
        } else {
            rosenberg_type(&op, action).map_err(|e| e.to_string())?.to_string()
        };
        *by_type.entry(rtype.clone()).or_insert(0) += 1;
        let am = if in_group {
            false
        } else {
            matches!(
                is_almost_minimal(action, &op, budget).map_err(|e| e.to_string())?,
                Verdict::Holds
            )
        };
        if am {
            almost_minimal_count += 1;
            let osp = orbit_semiprojection_witness(&op, action)
                .map_err(|e| e.to_string())?
                .is_some();
            rows.push(json!({
                "index": index,
                "type": rtype,
                "orbit_semiprojection": osp,
            }));
        }
    }
    Ok(json!({
        "op_count": 256,
        "almost_minimal_count": almost_minimal_count,
        "by_type": by_type,
        "almost_minimal_ops": rows,
    }))
}

fn construct_report(
    action: &FiniteAction,
    family: Family,
    arity: Option<usize>,
    base: Option<usize>,
    alpha: usize,
    beta: usize,
    emit_table: bool,
) -> Result<Value, String> {
    let (op, properties) = match family {
        Family::Exmin => {
            let op = exmin_minority(action).map_err(|e| e.to_string())?;
            let props = json!({
                "g_quasi_minority": is_g_quasi_minority(&op, action).map_err(|e| e.to_string())?,
                "idempotent": op.is_idempotent(),
            });
            (op, props)
        }
        Family::RankOsp => {
            let k = arity.ok_or_else(|| "--family rank-osp needs --arity".to_string())?;
            let op = rank_orbit_semiprojection(action, k).map_err(|e| e.to_string())?;
            let witness = orbit_semiprojection_witness(&op, action)
                .map_err(|e| e.to_string())?
                .map(|w| json!({ "coord": w.coord, "element": w.element }));
            (op, json!({ "orbit_semiprojection": witness }))
        }
        Family::OddMajority => {
            let op = odd_majority(action).map_err(|e| e.to_string())?;
            let props = json!({
                "odd_majority": is_odd_majority(&op, action).map_err(|e| e.to_string())?,
                "quasi_majority": op.is_quasi_majority(),
            });
            (op, props)
        }
        Family::OddMalcev => {
            let op = odd_malcev(action).map_err(|e| e.to_string())?;
            let props = json!({
                "odd_malcev": is_odd_malcev(&op, action).map_err(|e| e.to_string())?,
                "quasi_malcev": op.is_quasi_malcev(),
            });
            (op, props)
        }
        Family::Palfy => {
            let k = arity.unwrap_or(2);
            let b = match base {
                Some(b) => b,
                None => default_palfy_base(action)
                    .ok_or_else(|| "every orbit is a fixed point; give --base".to_string())?,
            };
            let params = PalfyParams::new(action, k, b, alpha, beta).map_err(|e| e.to_string())?;
            let op = palfy_op(&params);
            (op, json!({ "base_point": b, "alpha": alpha, "beta": beta }))
        }
    };
    let mut result = json!({
        "family": family.name(),
        "arity": op.arity(),
        "domain_size": op.domain_size(),
        "essential": op.is_essential(),
        "properties": properties,
    });
    if emit_table {
        result["table"] = json!(op.to_text());
    }
    Ok(result)
}

fn enumerate_report(
    action: &FiniteAction,
    brute_force: bool,
    count_check: bool,
    emit_tables: bool,
) -> Result<Value, String> {
    let ops = enumerate_ginv_boolean(action).map_err(|e| e.to_string())?;
    let mut result = json!({
        "orbit_count": action.orbit_count(),
        "group_order": action.order(),
        "domain_size": action.domain_size(),
        "count": ops.len(),
    });
    if count_check {
        let formula = ginv_boolean_count_formula(action.orbit_count(), action.order());
        result["formula"] = json!(formula);
        result["formula_matches"] = json!(formula == ops.len() as u64);
    }
    if brute_force {
        let mut brute = brute_force_ginv_boolean(action).map_err(|e| e.to_string())?;
        brute.sort();
        result["brute_force_count"] = json!(brute.len());
        result["brute_force_matches"] = json!(brute == ops);
    }
    if emit_tables {
        result["tables"] = json!(ops.iter().map(|o| o.to_text()).collect::<Vec<_>>());
    }
    Ok(result)
}

fn count_check_report(action: &FiniteAction) -> Result<Value, String> {
    let s = action.orbit_count();
    let order = action.order();
    let mut result = json!({
        "orbit_count": s,
        "group_order": order,
        "boolean_group": action.is_boolean(),
    });
    if action.is_boolean() {
        result["boolean_formula"] = json!(ginv_boolean_count_formula(s, order));
    }
    match ginv_steiner_count_formula(s, order) {
        Ok(count) => result["steiner_formula"] = json!(count),
        Err(e) => result["steiner_formula_note"] = json!(e.to_string()),
    }
    if action.is_boolean() && s <= 8 {
        let ops = enumerate_ginv_boolean(action).map_err(|e| e.to_string())?;
        result["enumerated_boolean"] = json!(ops.len());
        result["boolean_matches"] =
            json!(Some(ops.len() as u64) == result["boolean_formula"].as_u64());
    }
    Ok(result)
}

fn datalog_report(p: usize, q: usize) -> Result<Value, String> {
    let part0 = (p * p + 2 * p).max(16);
    let part1 = (q * q).max(16);
    let window = Window::new(p, q, part0, part1).map_err(|e| e.to_string())?;
    let family = member_family(window);
    let mut tables = Vec::new();
    let mut refutations = Vec::new();
    let mut canonical_count = 0usize;
    let mut members: Vec<_> = family.into_iter().map(|m| ("family", m)).collect();
    members.push(("overlapping", overlapping_member(window)));
    for (label, m) in &members {
        match xi2(&window, |x, y| m.eval(x, y)) {
            Ok(t) => {
                canonical_count += 1;
                tables.push(t);
            }
            Err(_) => {}
        }
        let refutation = refute_binary_injective(&window, |x, y| m.eval(x, y))
            .map_err(|e| e.to_string())?;
        let kind = match &refutation {
            InjectivityRefutation::EssentiallyUnary { .. } => "essentially-unary",
            InjectivityRefutation::NonInjective { .. } => "collision",
            InjectivityRefutation::InjectiveViolates(_) => "relation-violation",
        };
        refutations.push(json!({
            "member": label,
            "kind": kind,
            "witness": refutation.to_string(),
        }));
    }
    let shared = tables.first().ok_or("no canonical member in the demo family")?;
    if !tables.iter().all(|t| t == shared) {
        return Err("canonical members disagree on the pattern table".to_string());
    }
    let all = Orbital::all();
    let table_rows: Vec<Vec<String>> = all
        .iter()
        .map(|&a| all.iter().map(|&b| shared.get(a, b).to_string()).collect())
        .collect();
    let g = shared.as_op_table();
    let mut wnu_up_to = 2usize;
    for n in 3..=6 {
        let tower = wnu_tower(&g, n).map_err(|e| e.to_string())?;
        if wnu_violation(&tower).is_none() {
            wnu_up_to = n;
        }
    }
    let core_ok = members
        .iter()
        .filter(|(label, _)| *label == "family")
        .all(|(_, m)| check_core_relations(&window, |x, y| m.eval(x, y)).is_ok());
    Ok(json!({
        "window": { "p": p, "q": q, "part0_size": part0, "part1_size": part1 },
        "member_count": members.len(),
        "canonical_count": canonical_count,
        "orbital_names": all.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        "orbital_table": table_rows,
        "table_commutative": shared.is_commutative(),
        "table_idempotent": shared.is_idempotent(),
        "absorption": check_absorption(shared).is_ok(),
        "collapses_to_min": blow_down(shared).is_ok(),
        "wnu_up_to": wnu_up_to,
        "core_relations_ok": core_ok,
        "injectivity_refutations": refutations,
    }))
}

fn selftest_report() -> (Value, bool) {
    let budget = GenBudget::default();
    let checks: Vec<(&str, Box<dyn Fn() -> Result<bool, String>>)> = vec![
        (
            "collision minority equals the regular Klein-action sum",
            Box::new(|| {
                let action = FiniteAction::free_boolean(1, 2).map_err(|e| e.to_string())?;
                let m = exmin_minority(&action).map_err(|e| e.to_string())?;
                let mut ops = enumerate_ginv_boolean(&action).map_err(|e| e.to_string())?;
                Ok(ops.pop().as_ref() == Some(&m) && ops.is_empty())
            }),
        ),
        (
            "odd majority is recognized and almost minimal",
            Box::new({
                let budget = budget.clone();
                move || {
                    let action = FiniteAction::free_boolean(2, 1).map_err(|e| e.to_string())?;
                    let m = odd_majority(&action).map_err(|e| e.to_string())?;
                    let ok = is_odd_majority(&m, &action).map_err(|e| e.to_string())?
                        && matches!(
                            is_almost_minimal(&action, &m, &budget).map_err(|e| e.to_string())?,
                            Verdict::Holds
                        );
                    Ok(ok)
                }
            }),
        ),
        (
            "derived minority does not regenerate the odd majority",
            Box::new({
                let budget = budget.clone();
                move || {
                    let action = FiniteAction::free_boolean(2, 1).map_err(|e| e.to_string())?;
                    let m = odd_majority(&action).map_err(|e| e.to_string())?;
                    let star = mstar(&action, &m).map_err(|e| e.to_string())?;
                    let back = minops::clones::regenerates(&action, &star, &m, &budget)
                        .map_err(|e| e.to_string())?;
                    Ok(matches!(back, Verdict::Fails(())))
                }
            }),
        ),
        (
            "invariant Boolean operations count 2 at four orbits",
            Box::new(|| {
                let action = FiniteAction::free_boolean(4, 1).map_err(|e| e.to_string())?;
                let ops = enumerate_ginv_boolean(&action).map_err(|e| e.to_string())?;
                let formula = ginv_boolean_count_formula(4, 2);
                let mut all_good = ops.len() == 2 && formula == 2;
                for q in &ops {
                    all_good &= check_ginv_steiner(&action, q).map_err(|e| e.to_string())?.is_ok()
                        && check_boolean(q).map_err(|e| e.to_string())?.is_ok();
                }
                Ok(all_good)
            }),
        ),
        (
            "weight-determining set sizes are 1, 4, 11",
            Box::new(|| {
                Ok(wd(1) == 1
                    && wd(2) == 4
                    && wd(3) == 11
                    && weight_determining_set(2).map_err(|e| e.to_string())?.len() == 4)
            }),
        ),
        (
            "identity checker covers 72 binary profiles",
            Box::new(|| {
                let action = FiniteAction::free_boolean(3, 1).map_err(|e| e.to_string())?;
                let report = check_palfy_identities(&action, 2, 0).map_err(|e| e.to_string())?;
                Ok(report.profiles == 72)
            }),
        ),
        (
            "forbidden-triangle presets fail extension, empty bounds pass",
            Box::new(|| {
                Ok(!has_oep(&BoundSet::s3tilde()).holds
                    && !has_oep(&BoundSet::s4()).holds
                    && has_oep(&BoundSet::empty()).holds)
            }),
        ),
        (
            "window members share a canonical pattern table with towers",
            Box::new(|| {
                let window = Window::default();
                let family = member_family(window);
                let table = xi2(&window, |x, y| family[0].eval(x, y))
                    .map_err(|e| format!("{e}"))?;
                let same = family
                    .iter()
                    .all(|m| xi2(&window, |x, y| m.eval(x, y)).as_ref() == Ok(&table));
                let tower = wnu_tower(&table.as_op_table(), 4).map_err(|e| e.to_string())?;
                Ok(same && wnu_violation(&tower).is_none() && blow_down(&table).is_ok())
            }),
        ),
        (
            "quasi-majority scan finds the two twisted majorities",
            Box::new(|| {
                let action = FiniteAction::free_boolean(2, 1).map_err(|e| e.to_string())?;
                let scan = scan_quasi_majority_weak_osp(&action).map_err(|e| e.to_string())?;
                Ok(scan.candidates.len() == 2)
            }),
        ),
    ];
    let mut rows = Vec::new();
    let mut all_pass = true;
    for (name, check) in checks {
        let entry = match check() {
            Ok(true) => json!({ "name": name, "pass": true }),
            Ok(false) => {
                all_pass = false;
                json!({ "name": name, "pass": false })
            }
            Err(e) => {
                all_pass = false;
                json!({ "name": name, "pass": false, "error": e })
            }
        };
        rows.push(entry);
    }
    (json!({ "checks": rows, "all_pass": all_pass }), all_pass)
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
            text.push('\n');
            text
        }
        Format::Markdown => render_markdown(value),
        Format::Csv => render_csv(value),
    }
}

fn render_markdown(value: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = value {
        for (key, val) in map {
            out.push_str(&format!("## {key}\n\n"));
            markdown_body(&mut out, val, 0);
            out.push('\n');
        }
    } else {
        markdown_body(&mut out, value, 0);
    }
    out
}

fn markdown_scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => "—".to_string(),
        other => other.to_string(),
    }
}

fn markdown_body(out: &mut String, value: &Value, depth: usize) {
    let indent = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (key, val) in map {
                match val {
                    Value::Object(_) => {
                        out.push_str(&format!("{indent}- **{key}**:\n"));
                        markdown_body(out, val, depth + 1);
                    }
                    Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                        out.push_str(&format!("{indent}- **{key}**:\n\n"));
                        markdown_table(out, items);
                    }
                    Value::Array(_) => {
                        out.push_str(&format!(
                            "{indent}- **{key}**: {}\n",
                            markdown_inline(val)
                        ));
                    }
                    Value::String(s) if s.contains('\n') => {
                        out.push_str(&format!("{indent}- **{key}**:\n\n```\n{s}\n```\n"));
                    }
                    scalar => {
                        out.push_str(&format!(
                            "{indent}- **{key}**: {}\n",
                            markdown_scalar(scalar)
                        ));
                    }
                }
            }
        }
        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
            markdown_table(out, items);
        }
        other => {
            out.push_str(&format!("{indent}{}\n", markdown_inline(other)));
        }
    }
}

fn markdown_inline(value: &Value) -> String {
    match value {
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(markdown_inline).collect();
            format!("[{}]", parts.join(", "))
        }
        other => markdown_scalar(other),
    }
}

fn markdown_table(out: &mut String, items: &[Value]) {
    let mut columns: Vec<String> = Vec::new();
    for item in items {
        if let Value::Object(map) = item {
            for key in map.keys() {
                if !columns.contains(key) {
                    columns.push(key.clone());
                }
            }
        }
    }
    columns.sort();
    out.push_str(&format!("| {} |\n", columns.join(" | ")));
    out.push_str(&format!(
        "|{}\n",
        columns.iter().map(|_| " --- |").collect::<String>()
    ));
    for item in items {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| match item.get(c) {
                Some(v) => markdown_inline(v).replace('\n', " "),
                None => "—".to_string(),
            })
            .collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    out.push('\n');
}

fn render_csv(value: &Value) -> String {
    let mut rows = vec!["key,value".to_string()];
    csv_flatten("", value, &mut rows);
    let mut out = rows.join("\n");
    out.push('\n');
    out
}

fn csv_flatten(prefix: &str, value: &Value, rows: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (key, val) in map {
                let path = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                csv_flatten(&path, val, rows);
            }
        }
        Value::Array(items) => {
            for (idx, val) in items.iter().enumerate() {
                csv_flatten(&format!("{prefix}[{idx}]"), val, rows);
            }
        }
        leaf => {
            let text = match leaf {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            rows.push(format!("{},{}", csv_escape(prefix), csv_escape(&text)));
        }
    }
}

fn csv_escape(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
