use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::beamforming::Architecture;
use crate::metrics::MetricReport;
use crate::optimizer::{
    exhaustive, objective, optimize, pareto_sweep, reference_point, ConfigSpace, Evaluator, GaConfig, ObjectiveSpec,
    RealizationSet,
};
use crate::scenario::ScenarioConfig;
use crate::tiling::{
    build_dictionary, count_domino, count_thinned, enumerate_exact_covers, sample_thinned, scientific_truncated, ArrayConfig,
    ArrayKind, ShapeSet,
};

use super::output::{json_file, line, num, sink, text, write_err};
use super::{CliError, Command, EXIT_DEGENERATE, EXIT_USAGE, MAX_SKIPPED_FRACTION};

const EXHAUSTIVE_LIMIT: u128 = 4096;

fn usage(msg: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: msg.into() }
}

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Count { kind, rows, cols, elements, digits } => count(kind, rows, cols, elements, digits),
        Command::Enumerate { kind, rows, cols, cap, seed, out } => enumerate(kind, rows, cols, cap, seed, out.as_deref()),
        Command::Sample { rows, cols, elements, count, seed, out } => sample(rows, cols, elements, count, seed, out.as_deref()),
        Command::Evaluate { scenario, config, arch, realizations, out } => {
            evaluate(scenario.as_deref(), &config, &arch, realizations, out)
        }
        Command::Optimize { scenario, kind, beta, arch, exhaustive, out } => {
            optimize_cmd(scenario.as_deref(), kind, beta, arch, exhaustive, out)
        }
        Command::Sweep { scenario, configs, arch, realizations, out } => {
            sweep(scenario.as_deref(), &configs, &arch, realizations, out.as_deref())
        }
    }
}

fn load_scenario(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    Ok(match path {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    })
}

fn load_config(path: &Path) -> Result<ArrayConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(ArrayConfig::from_json(text.trim())?)
}

fn count(kind: ArrayKind, rows: usize, cols: usize, elements: Option<usize>, digits: Option<usize>) -> Result<(), CliError> {
    let n = match (kind, elements) {
        (ArrayKind::Thinned, Some(s)) => count_thinned(rows, cols, s),
        (ArrayKind::Thinned, None) => return Err(usage("thinned counts need an element count")),
        (ArrayKind::Domino, None) => count_domino(rows, cols),
        (ArrayKind::Fpra, None) => 1u8.into(),
        (ArrayKind::Tetromino, None) => {
            let q = build_dictionary(rows, cols, &ShapeSet::tetromino())?;
            enumerate_exact_covers(&q, usize::MAX, 0).len().into()
        }
        (_, Some(_)) => return Err(usage(format!("{kind} counts take no element count"))),
    };
    match digits {
        Some(d) => println!("{n} ({})", scientific_truncated(&n, d)),
        None => println!("{n}"),
    }
    Ok(())
}

fn enumerate(kind: ArrayKind, rows: usize, cols: usize, cap: usize, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let family = kind
        .shape_family()
        .ok_or_else(|| usage(format!("{kind} layouts cannot be enumerated as tilings")))?;
    let q = build_dictionary(rows, cols, &ShapeSet::for_family(family))?;
    let configs = enumerate_exact_covers(&q, cap, seed);
    let mut w = sink(out)?;
    for c in &configs {
        writeln!(w, "{}", c.to_json()).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

fn sample(rows: usize, cols: usize, elements: usize, count: usize, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = sink(out)?;
    for i in 0..count as u64 {
        let c = sample_thinned(rows, cols, elements, seed.wrapping_add(i))?;
        writeln!(w, "{}", c.to_json()).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

fn check_skipped(reports: &[MetricReport]) -> Result<(), CliError> {
    if let Some(r) = reports.iter().find(|r| r.skipped_fraction() > MAX_SKIPPED_FRACTION) {
        return Err(CliError {
            code: EXIT_DEGENERATE,
            message: format!(
                "{} of {} realizations were degenerate for {} {}",
                r.skipped,
                r.skipped + r.realizations,
                r.kind,
                r.architecture
            ),
        });
    }
    Ok(())
}

fn architectures(requested: &[Architecture], scenario: &ScenarioConfig) -> Vec<Architecture> {
    if requested.is_empty() {
        scenario.architectures.clone()
    } else {
        requested.to_vec()
    }
}

fn opt_num(x: Option<f64>) -> Result<String, CliError> {
    x.map_or(Ok(String::new()), num)
}

fn evaluate(
    scenario_path: Option<&Path>,
    config_path: &Path,
    arch: &[Architecture],
    realizations: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario_path)?;
    let config = load_config(config_path)?;
    let n = realizations.unwrap_or(scenario.realizations);
    if n == 0 {
        return Err(usage("at least one realization is required"));
    }
    let ev = Evaluator::new(&scenario)?;
    let set = RealizationSet::draw(&scenario.channel_params(), scenario.seed, n)?;
    let mut reports = Vec::new();
    for a in architectures(arch, &scenario) {
        reports.push(ev.evaluate(&config, a, scenario.eta_db, &set, true)?);
    }

    let dir = out.unwrap_or_else(|| scenario.output_dir.clone());
    json_file(&dir.join("report.json"), &reports)?;
    let mut w = sink(Some(&dir.join("report.csv")))?;
    line(
        &mut *w,
        &[
            "kind", "config_index", "architecture", "eta_db", "realizations", "skipped", "mean_sum_se", "std_sum_se",
            "mean_sll_db", "mean_stream_sll_db",
        ]
        .map(String::from),
    )?;
    for r in &reports {
        line(
            &mut *w,
            &[
                text(&r.kind),
                r.config_index.map_or(String::new(), |i| i.to_string()),
                text(&r.architecture),
                num(r.eta_db)?,
                r.realizations.to_string(),
                r.skipped.to_string(),
                num(r.mean_sum_se)?,
                num(r.std_sum_se)?,
                opt_num(r.mean_sll_db)?,
                opt_num(r.mean_stream_sll_db)?,
            ],
        )?;
        println!(
            "{} {}: sum SE {:.4} b/s/Hz, SLL {:.2} dB ({} realizations, {} skipped)",
            r.kind,
            r.architecture,
            r.mean_sum_se,
            r.mean_sll_db.unwrap_or(f64::NAN),
            r.realizations,
            r.skipped
        );
    }
    w.flush().map_err(write_err)?;
    check_skipped(&reports)
}

#[derive(Serialize)]
struct ExhaustiveSummary {
    best_index: u128,
    objective: f64,
    ga_matches: bool,
}

#[derive(Serialize)]
struct OptimizeSummary {
    kind: ArrayKind,
    architecture: Architecture,
    beta: f64,
    r_ref: f64,
    phi_ref_db: f64,
    space_size: String,
    best_index: u128,
    mean_sum_se: f64,
    sll_db: f64,
    objective: f64,
    generations: usize,
    evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustive: Option<ExhaustiveSummary>,
}

fn optimize_cmd(
    scenario_path: Option<&Path>,
    kind: ArrayKind,
    beta: f64,
    arch: Architecture,
    run_exhaustive: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario_path)?;
    let ev = Evaluator::new(&scenario)?;
    let set = RealizationSet::draw(&scenario.channel_params(), scenario.seed, scenario.optimize_realizations)?;
    let (r_ref, phi_ref) = reference_point(&ev, &set)?;
    let spec = ObjectiveSpec::new(beta, r_ref, phi_ref)?;
    let space = ConfigSpace::for_scenario(&scenario, kind)?;
    let ga = GaConfig::from(&scenario.ga);
    let outcome = optimize(&ev, &space, arch, spec, &ga, &set)?;

    let mut samples = outcome.samples.clone();
    let mut exhaustive_summary = None;
    if run_exhaustive {
        if space.len() > EXHAUSTIVE_LIMIT {
            return Err(usage(format!("exhaustive search is limited to {EXHAUSTIVE_LIMIT} layouts, space has {}", space.len())));
        }
        let table = std::sync::Mutex::new(Vec::new());
        let (best, best_obj, _) = exhaustive(space.len(), |i| {
            let r = ev.evaluate(&space.get(i)?, arch, scenario.eta_db, &set, true)?;
            let sll = r.mean_sll_db.expect("SLL requested");
            table.lock().expect("sample table").push(crate::optimizer::ParetoSample { id: i, mean_se: r.mean_sum_se, sll_db: sll });
            Ok(objective(r.mean_sum_se, sll, &spec))
        })?;
        samples = table.into_inner().expect("sample table");
        samples.sort_by_key(|s| s.id);
        exhaustive_summary = Some(ExhaustiveSummary {
            best_index: best,
            objective: best_obj,
            ga_matches: (outcome.objective - best_obj).abs() <= 1e-12 * best_obj.abs().max(1.0),
        });
    }

    let dir = out.unwrap_or_else(|| scenario.output_dir.clone());
    json_file(&dir.join("best_config.json"), &outcome.best)?;

    let mut w = sink(Some(&dir.join("trace.csv")))?;
    line(&mut *w, &["generation".into(), "best_fitness".into()])?;
    for (g, f) in outcome.ga.trace.iter().enumerate() {
        line(&mut *w, &[g.to_string(), num(*f)?])?;
    }
    w.flush().map_err(write_err)?;

    let sweep = pareto_sweep(&samples, &scenario.betas, r_ref, phi_ref)?;
    let mut w = sink(Some(&dir.join("pareto.csv")))?;
    let mut header = vec!["config_index".to_string(), "mean_sum_se".into(), "sll_db".into(), "dominated".into()];
    header.extend(scenario.betas.iter().map(|b| format!("objective_beta_{b}")));
    line(&mut *w, &header)?;
    for p in &sweep.points {
        let mut row = vec![p.id.to_string(), num(p.mean_se)?, num(p.sll_db)?, p.dominated.to_string()];
        for o in &p.objective {
            row.push(num(*o)?);
        }
        line(&mut *w, &row)?;
    }
    w.flush().map_err(write_err)?;

    let mut w = sink(Some(&dir.join("pareto_winners.csv")))?;
    line(&mut *w, &["beta", "config_index", "mean_sum_se", "sll_db", "objective"].map(String::from))?;
    for (bi, &pi) in sweep.winners.iter().enumerate() {
        let p = &sweep.points[pi];
        line(&mut *w, &[num(sweep.betas[bi])?, p.id.to_string(), num(p.mean_se)?, num(p.sll_db)?, num(p.objective[bi])?])?;
    }
    w.flush().map_err(write_err)?;

    let summary = OptimizeSummary {
        kind,
        architecture: arch,
        beta,
        r_ref,
        phi_ref_db: phi_ref,
        space_size: outcome.space_size.to_string(),
        best_index: outcome.best_index,
        mean_sum_se: outcome.mean_se,
        sll_db: outcome.sll_db,
        objective: outcome.objective,
        generations: outcome.ga.generations,
        evaluations: outcome.ga.evaluations,
        exhaustive: exhaustive_summary,
    };
    json_file(&dir.join("summary.json"), &summary)?;
    println!(
        "best {} layout #{}: sum SE {:.4} b/s/Hz, SLL {:.2} dB, objective {:.4}",
        kind, outcome.best_index, outcome.mean_se, outcome.sll_db, outcome.objective
    );
    Ok(())
}

fn sweep(
    scenario_path: Option<&Path>,
    configs: &[PathBuf],
    arch: &[Architecture],
    realizations: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario_path)?;
    let loaded: Vec<(String, ArrayConfig)> = configs
        .iter()
        .map(|p| Ok((p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()), load_config(p)?)))
        .collect::<Result<_, CliError>>()?;
    let n = realizations.unwrap_or(scenario.sweep_realizations);
    if n == 0 {
        return Err(usage("at least one realization is required"));
    }
    let mut w = sink(out)?;
    line(
        &mut *w,
        &["config", "kind", "config_index", "architecture", "eta_db", "realizations", "skipped", "mean_sum_se", "ci95_sum_se"]
            .map(String::from),
    )?;
    if scenario.eta_sweep_db.is_empty() || loaded.is_empty() {
        return w.flush().map_err(write_err);
    }
    let ev = Evaluator::new(&scenario)?;
    let set = RealizationSet::draw(&scenario.channel_params(), scenario.seed, n)?;
    let mut all = Vec::new();
    for (name, cfg) in &loaded {
        for a in architectures(arch, &scenario) {
            let reports = ev.evaluate_multi(cfg, a, &scenario.eta_sweep_db, &set, false)?;
            for r in &reports {
                let ci = 1.96 * r.std_sum_se / (r.realizations.max(1) as f64).sqrt();
                line(
                    &mut *w,
                    &[
                        text(name),
                        text(&r.kind),
                        r.config_index.map_or(String::new(), |i| i.to_string()),
                        text(&r.architecture),
                        num(r.eta_db)?,
                        r.realizations.to_string(),
                        r.skipped.to_string(),
                        num(r.mean_sum_se)?,
                        num(ci)?,
                    ],
                )?;
            }
            all.extend(reports);
        }
    }
    w.flush().map_err(write_err)?;
    check_skipped(&all)
}
