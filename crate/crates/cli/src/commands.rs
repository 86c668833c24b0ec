use std::path::Path;

use mapsolve::audit::{
    envy_check, ipo_check, ipo_check_all, lorenz_dominance_test, manipulation_search,
    nonbossy_check, random_instance, Coverage, Notion, SearchOptions, Solution,
};
use mapsolve::competitive::{
    cce_find, cce_ipo_selection, cce_utility_range, cce_verify, Equilibrium, EquilibriumDoc,
    Extreme, Scope,
};
use mapsolve::egalitarian::{epo, es, es_star, priority, random_priority_profile};
use mapsolve::lottery::{binary_named, decompose};
use mapsolve::rational;
use mapsolve::{AssignmentMatrix, Caps, Instance, UtilityProfile};
use serde_json::{json, Map, Value};

use crate::table;
use crate::{CceAction, Command, Failure, Method, NotionArg, Outcome, Property, ScopeArg, SolutionArg};

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(Instance::from_json(&read(path)?)?)
}

/// An assignment document, either bare or inside an earlier report.
fn load_assignment(path: &Path) -> Result<EquilibriumDoc, Failure> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let candidates = [
        Some(&value),
        value.get("result"),
        value.get("result").and_then(|r| r.get("equilibrium")),
    ];
    let doc = candidates
        .into_iter()
        .flatten()
        .find(|v| v.get("assignment").is_some_and(Value::is_object))
        .ok_or_else(|| Failure::input(format!("{}: no assignment object found", path.display())))?;
    serde_json::from_value(doc.clone())
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn agent_indices(inst: &Instance, names: &[String]) -> Result<Vec<usize>, Failure> {
    names
        .iter()
        .map(|n| {
            inst.agent_index(n.trim())
                .ok_or_else(|| Failure::input(format!("unknown agent {n:?}")))
        })
        .collect()
}

fn named_profile(inst: &Instance, u: &UtilityProfile) -> Value {
    Value::Object(
        inst.agents()
            .iter()
            .cloned()
            .zip(u.to_strings().into_iter().map(Value::String))
            .collect::<Map<String, Value>>(),
    )
}

fn scope(s: ScopeArg) -> Scope {
    match s {
        ScopeArg::All => Scope::All,
        ScopeArg::SymmetricPrices => Scope::SymmetricPrices,
    }
}

fn equilibrium_json(inst: &Instance, eq: &Equilibrium) -> Value {
    json!({
        "equilibrium": eq.to_doc(inst),
        "utilities": named_profile(inst, &eq.utilities()),
        "conditions": eq.certificate.iter().map(|c| c.name()).collect::<Vec<_>>(),
    })
}

pub fn run(command: &Command) -> Result<Outcome, Failure> {
    let caps = Caps::from_env();
    match command {
        Command::Solve {
            instance,
            method,
            order,
        } => solve(&load_instance(instance)?, *method, order.as_deref(), &caps),
        Command::Cce {
            instance,
            action,
            equilibrium,
            scope: s,
        } => cce(&load_instance(instance)?, *action, equilibrium.as_deref(), scope(*s), &caps),
        Command::Audit {
            instance,
            property,
            solution,
            order,
            max_coalition,
            trials,
            seed,
            acceptors,
            notion,
            scope: s,
        } => {
            let inst = load_instance(instance)?;
            let solution = pick_solution(&inst, *solution, order.as_deref())?;
            let options = AuditOptions {
                max_coalition: *max_coalition,
                trials: *trials,
                seed: *seed,
                acceptors: acceptors.as_deref(),
                notion: match notion {
                    NotionArg::Weak => Notion::Weak,
                    NotionArg::Strong => Notion::Strong,
                },
                scope: scope(*s),
            };
            audit(inst, *property, solution, &options, &caps)
        }
        Command::Decompose {
            instance,
            ram,
            sample_seed,
        } => decompose_cmd(&load_instance(instance)?, ram, *sample_seed),
        Command::Random {
            agents,
            objects,
            density,
            seed,
        } => {
            let d = rational::parse(density).map_err(|e| Failure::input(e.to_string()))?;
            let inst = random_instance(*agents, *objects, &d, *seed)?;
            let result = serde_json::to_value(inst.to_doc()).expect("instance serializes");
            Ok(Outcome {
                table: table::acceptability(&inst),
                instance: Some(inst),
                result,
                status: 0,
            })
        }
    }
}

fn solve(
    inst: &Instance,
    method: Method,
    order: Option<&[String]>,
    caps: &Caps,
) -> Result<Outcome, Failure> {
    if order.is_some() != (method == Method::Priority) {
        return Err(Failure::input("--order is required with --method priority and only then"));
    }
    let (u, ram, extra) = match method {
        Method::Es => {
            let r = es(inst);
            let phases = serde_json::to_value(&r.phases).expect("phases serialize");
            (r.utilities, Some(r.ram), Some(("phases", phases)))
        }
        Method::EsStar => (es_star(inst), None, None),
        Method::Epo => (epo(inst), None, None),
        Method::Rp => (random_priority_profile(inst, caps)?, None, None),
        Method::Priority => {
            let order = agent_indices(inst, order.unwrap_or_default())?;
            let z = priority(inst, &order)?;
            (z.utilities(), Some(z), None)
        }
    };
    let name = match method {
        Method::Es => "es",
        Method::EsStar => "es-star",
        Method::Epo => "epo",
        Method::Priority => "priority",
        Method::Rp => "rp",
    };
    let mut result = json!({
        "method": name,
        "utilities": named_profile(inst, &u),
    });
    if let Some(z) = &ram {
        result["assignment"] = json!(z.to_named(inst));
    }
    if let Some((key, value)) = extra {
        result[key] = value;
    }
    Ok(Outcome {
        table: table::profile(inst, name, &u, ram.as_ref()),
        instance: Some(inst.clone()),
        result,
        status: 0,
    })
}

fn cce(
    inst: &Instance,
    action: CceAction,
    equilibrium: Option<&Path>,
    scope: Scope,
    caps: &Caps,
) -> Result<Outcome, Failure> {
    if equilibrium.is_some() != (action == CceAction::Verify) {
        return Err(Failure::input("--equilibrium is required with --action verify and only then"));
    }
    let done = |result: Value, table: String, status: u8| Outcome {
        instance: Some(inst.clone()),
        result,
        table,
        status,
    };
    match action {
        CceAction::Find | CceAction::IpoSelection => {
            let eq = if action == CceAction::Find {
                cce_find(inst, caps)?
            } else {
                cce_ipo_selection(inst, caps)?
            };
            Ok(done(equilibrium_json(inst, &eq), table::equilibrium(inst, &eq), 0))
        }
        CceAction::Verify => {
            let doc = load_assignment(equilibrium.expect("checked above"))?;
            let z = doc.parse_assignment(inst)?;
            let p = doc
                .parse_prices(inst)?
                .ok_or_else(|| Failure::input("the equilibrium document has no prices"))?;
            match cce_verify(inst, &z, &p) {
                Ok(eq) => {
                    let mut result = equilibrium_json(inst, &eq);
                    result["verified"] = json!(true);
                    let table = format!("{}\nverified: all conditions hold", table::equilibrium(inst, &eq));
                    Ok(done(result, table, 0))
                }
                Err(v) => {
                    let text = v.describe(inst);
                    let result = json!({
                        "verified": false,
                        "condition": v.condition.name(),
                        "detail": text,
                        "agents": v.agents.iter().map(|&i| inst.agents()[i].clone()).collect::<Vec<_>>(),
                        "objects": v.objects.iter().map(|&k| inst.objects()[k].clone()).collect::<Vec<_>>(),
                    });
                    Ok(done(result, format!("verification failed: {text}"), 4))
                }
            }
        }
        CceAction::Range => {
            let r = cce_utility_range(inst, caps, scope)?;
            let interval = |lo: &str, hi: &str| json!({ "lo": lo, "hi": hi });
            let agents: Map<String, Value> = inst
                .agents()
                .iter()
                .zip(&r.agents)
                .map(|(a, iv)| (a.clone(), interval(&iv.lo, &iv.hi)))
                .collect();
            let prices: Map<String, Value> = inst
                .objects()
                .iter()
                .zip(&r.prices)
                .map(|(o, iv)| (o.clone(), interval(&iv.lo, &iv.hi)))
                .collect();
            let free: Vec<Value> = r
                .free_parameters
                .iter()
                .map(|f| {
                    json!({
                        "object": inst.objects()[f.object],
                        "lo": f.interval.lo,
                        "hi": f.interval.hi,
                    })
                })
                .collect();
            let attaining: Vec<Value> = r
                .attaining
                .iter()
                .map(|(i, ext, eq)| {
                    json!({
                        "agent": inst.agents()[*i],
                        "extreme": match ext { Extreme::Min => "min", Extreme::Max => "max" },
                        "equilibrium": eq.to_doc(inst),
                    })
                })
                .collect();
            let result = json!({
                "scope": scope,
                "agents": agents,
                "prices": prices,
                "free_parameters": free,
                "attaining": attaining,
                "patterns_examined": r.patterns_examined,
                "patterns_feasible": r.patterns_feasible,
            });
            Ok(done(result, table::range(inst, &r), 0))
        }
    }
}

fn pick_solution(
    inst: &Instance,
    s: SolutionArg,
    order: Option<&[String]>,
) -> Result<Solution, Failure> {
    if order.is_some() != (s == SolutionArg::Priority) {
        return Err(Failure::input("--order is required with --solution priority and only then"));
    }
    Ok(match s {
        SolutionArg::Es => Solution::Es,
        SolutionArg::EsStar => Solution::EsStar,
        SolutionArg::Epo => Solution::Epo,
        SolutionArg::Cce => Solution::Cce,
        SolutionArg::CceIpoSelection => Solution::CceSelection,
        SolutionArg::Rp => Solution::RandomPriority,
        SolutionArg::Priority => Solution::Priority(agent_indices(inst, order.unwrap_or_default())?),
    })
}

struct AuditOptions<'a> {
    max_coalition: Option<usize>,
    trials: usize,
    seed: u64,
    acceptors: Option<&'a [String]>,
    notion: Notion,
    scope: Scope,
}

fn audit(
    inst: Instance,
    property: Property,
    solution: Solution,
    opts: &AuditOptions,
    caps: &Caps,
) -> Result<Outcome, Failure> {
    let single_valued = |what: &str| {
        if solution.is_set_valued() {
            Err(Failure::input(format!(
                "{what} needs a single-valued solution; use cce-ipo-selection for one equilibrium"
            )))
        } else {
            Ok(())
        }
    };
    let name = solution.name();
    let (result, lines, violated): (Value, Vec<String>, bool) = match property {
        Property::Lorenz => {
            single_valued("lorenz")?;
            let u = solution.utilities(&inst, caps)?;
            let rep = lorenz_dominance_test(&inst, &u, opts.trials, opts.seed)?;
            let examples: Vec<Value> = rep
                .counterexamples
                .iter()
                .take(10)
                .map(|c| named_profile(&inst, c))
                .collect();
            let mut lines = vec![format!(
                "{name}: {} of {} sampled efficient profiles not Lorenz dominated",
                rep.counterexamples.len(),
                rep.trials
            )];
            if let Some(c) = rep.counterexamples.first() {
                lines.push(format!("first counterexample: {}", c.to_strings().join(" ")));
            }
            let result = json!({
                "utilities": named_profile(&inst, &u),
                "trials": rep.trials,
                "seed": opts.seed,
                "counterexamples": rep.counterexamples.len(),
                "examples": examples,
            });
            (result, lines, !rep.passed())
        }
        Property::Envy => {
            single_valued("envy")?;
            let u = solution.utilities(&inst, caps)?;
            let v = envy_check(&inst, &u)?;
            let lines = if v.is_empty() {
                vec![format!("{name}: envy-free")]
            } else {
                v.iter()
                    .map(|e| {
                        format!(
                            "{} accepts a subset of {}'s objects but gets {} > {}",
                            inst.agents()[e.envious],
                            inst.agents()[e.envied],
                            e.envious_utility,
                            e.envied_utility
                        )
                    })
                    .collect()
            };
            let violations: Vec<Value> = v
                .iter()
                .map(|e| {
                    json!({
                        "agent": inst.agents()[e.envious],
                        "other": inst.agents()[e.envied],
                        "utility": e.envious_utility,
                        "other_utility": e.envied_utility,
                    })
                })
                .collect();
            let result = json!({ "utilities": named_profile(&inst, &u), "violations": violations });
            (result, lines, !v.is_empty())
        }
        Property::Ipo => {
            single_valued("ipo")?;
            let (checked, report) = match opts.acceptors {
                Some(names) => {
                    let set = agent_indices(&inst, names)?;
                    if set.is_empty() {
                        return Err(Failure::input("--acceptors must name at least one agent"));
                    }
                    let rep = ipo_check(&inst, &solution, &set, caps)?;
                    (1, (!rep.passed()).then_some(rep))
                }
                None => ipo_check_all(&inst, &solution, caps)?,
            };
            let lines = match &report {
                None => vec![format!("{name}: independent of perfect objects on {checked} acceptor sets")],
                Some(rep) => rep
                    .failures
                    .iter()
                    .map(|f| {
                        format!(
                            "perfect object accepted by {}: {} should get {} but gets {}",
                            mapsolve::competitive::group_names(inst.agents(), &rep.acceptors),
                            inst.agents()[f.agent],
                            f.expected,
                            f.actual
                        )
                    })
                    .collect(),
            };
            let result = json!({
                "acceptor_sets_checked": checked,
                "failure": report.as_ref().map(|rep| json!({
                    "acceptors": rep.acceptors.iter().map(|&i| inst.agents()[i].clone()).collect::<Vec<_>>(),
                    "agents": rep.failures.iter().map(|f| json!({
                        "agent": inst.agents()[f.agent],
                        "expected": f.expected,
                        "actual": f.actual,
                    })).collect::<Vec<_>>(),
                })),
            });
            (result, lines, report.is_some())
        }
        Property::Nonbossy => {
            if solution != Solution::Es {
                return Err(Failure::input("nonbossy is checked for --solution es"));
            }
            let rep = nonbossy_check(&inst, caps)?;
            let violations: Vec<Value> = rep
                .violations
                .iter()
                .map(|v| {
                    json!({
                        "agent": inst.agents()[v.agent],
                        "dropped": v.dropped.iter().map(|&k| inst.objects()[k].clone()).collect::<Vec<_>>(),
                        "before": named_profile(&inst, &v.before),
                        "after": named_profile(&inst, &v.after),
                    })
                })
                .collect();
            let lines = vec![format!(
                "es: {} violations in {} single-agent misreports",
                rep.violations.len(),
                rep.misreports
            )];
            let result = json!({ "misreports": rep.misreports, "violations": violations });
            (result, lines, !rep.violations.is_empty())
        }
        Property::Manipulate => {
            let options = SearchOptions {
                max_coalition: opts.max_coalition.unwrap_or(usize::MAX),
                notion: opts.notion,
                scope: opts.scope,
            };
            let out = manipulation_search(&inst, &solution, &options, caps)?;
            let mut lines = Vec::new();
            match &out.found {
                Some(r) => {
                    let dropped: Vec<String> = r
                        .coalition
                        .iter()
                        .zip(&r.dropped)
                        .map(|(&i, d)| {
                            let objs: Vec<&str> = d.iter().map(|&k| inst.objects()[k].as_str()).collect();
                            format!("{} drops {}", inst.agents()[i], if objs.is_empty() { "nothing".into() } else { objs.join("+") })
                        })
                        .collect();
                    lines.push(format!(
                        "{name}: coalition {} gains: {}",
                        mapsolve::competitive::group_names(inst.agents(), &r.coalition),
                        dropped.join(", ")
                    ));
                    for (k, &i) in r.coalition.iter().enumerate() {
                        lines.push(format!(
                            "  {}: truthful [{}, {}] manipulated [{}, {}]",
                            inst.agents()[i],
                            r.truthful[k].lo,
                            r.truthful[k].hi,
                            r.manipulated[k].lo,
                            r.manipulated[k].hi
                        ));
                    }
                    lines.push(format!("  witness utilities: {}", r.witness.to_strings().join(" ")));
                    if let Some(strong) = r.strong {
                        lines.push(format!("  strong notion violated: {strong}"));
                    }
                }
                None => lines.push(format!(
                    "{name}: no gainful misreport among {} coalitions ({} joint misreports, {} evaluated after pruning)",
                    out.coalitions, out.search_space, out.misreports
                )),
            }
            if let Coverage::Partial { reason } = &out.coverage {
                lines.push(format!("partial coverage: {reason}"));
            }
            let result = json!({
                "found": out.found.as_ref().map(|r| r.to_json(&inst)),
                "coalitions": out.coalitions,
                "misreports": out.misreports,
                "search_space": out.search_space.to_string(),
                "undetermined": out.undetermined,
                "coverage": out.coverage,
                "notion": options.notion,
                "scope": options.scope,
            });
            let partial = matches!(out.coverage, Coverage::Partial { .. });
            if out.found.is_none() && partial {
                return Ok(Outcome {
                    instance: Some(inst),
                    result,
                    table: lines.join("\n"),
                    status: 3,
                });
            }
            (result, lines, out.found.is_some())
        }
    };
    let mut result = result;
    result["property"] = json!(format!("{property:?}").to_lowercase());
    result["solution"] = json!(name);
    result["passed"] = json!(!violated);
    Ok(Outcome {
        instance: Some(inst),
        result,
        table: lines.join("\n"),
        status: if violated { 5 } else { 0 },
    })
}

fn decompose_cmd(inst: &Instance, ram: &Path, sample_seed: Option<u64>) -> Result<Outcome, Failure> {
    let z: AssignmentMatrix = load_assignment(ram)?.parse_assignment(inst)?;
    let lottery = decompose(inst, &z)?;
    lottery.validate(inst, &z)?;
    let ram_digest = |m: &AssignmentMatrix| {
        crate::sha256(&serde_json::to_string(&m.to_named(inst)).expect("assignment serializes"))
    };
    let expectation = lottery.expectation().expect("a lottery has components");
    let mut result = json!({
        "input_digest": ram_digest(&z),
        "reconstruction_digest": ram_digest(&expectation),
        "components": lottery.to_doc(inst),
        "count": lottery.len(),
        "bound": z.fractional_cells() + 1,
        "note": "every component respects capacities and acceptability; a component need not be efficient",
    });
    let mut table = table::lottery(inst, &lottery);
    if let Some(seed) = sample_seed {
        let b = lottery.sample(seed).expect("a lottery has components");
        result["sample"] = json!({ "seed": seed, "assignment": binary_named(inst, b) });
        table.push_str(&format!("\nsample (seed {seed}):\n{}", table::binary(inst, b)));
    }
    Ok(Outcome {
        instance: Some(inst.clone()),
        result,
        table,
        status: 0,
    })
}
