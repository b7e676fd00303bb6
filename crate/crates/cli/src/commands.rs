use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use cpl_core::benchmarks::{analyzer_benchmark, utility_benchmark, ReferenceSource};
use cpl_core::calibration::{calibrate, calibrate_bisection, CalibrationEngine};
use cpl_core::fixtures;
use cpl_core::metrics::pairwise_metrics;
use cpl_core::{
    cpl_bound, cpl_exact, cpl_limit, cpl_matrix, empirical_conditional, is_max_attainable,
    load_csv, release, save_csv, schema_of, statistical_cpl, statistical_tpl, tcpl,
    transition_matrix, BudgetParams, CplEngine, CplError, Dataset, EstimationConfig, LeakagePair,
    MechanismKind, MechanismSpec, PairwiseConditionals, Result, SchemaHints,
};

use crate::{
    Analyze, AnalyzersArgs, Benchmark, BoundArgs, CalibrateArgs, CalibrationEngineArg, Cli,
    Command, DataArgs, EngineArg, EstimateArgs, ExactArgs, ExactMechanism, FixtureName,
    FixturesArgs, MatrixArgs, PairSelection, ReferenceArg, SearchMethod, UtilityArgs,
};

pub fn run(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Analyze(Analyze::Matrix(a)) => matrix(a),
        Command::Analyze(Analyze::Exact(a)) => exact(a),
        Command::Analyze(Analyze::Bound(a)) => bound(a),
        Command::Estimate(a) => estimate(a, cli.seed),
        Command::Benchmark(Benchmark::Analyzers(a)) => analyzers(a, cli.seed),
        Command::Benchmark(Benchmark::Utility(a)) => utility(a, cli.seed),
        Command::Calibrate(a) => calibration(a),
        Command::Fixtures(a) => write_fixtures(a, cli.seed),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn load(args: &DataArgs) -> Result<Dataset> {
    let hints: SchemaHints = match &args.schema {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CplError::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str(&text)?
        }
        None => SchemaHints::new(),
    };
    load_csv(&args.data, &hints)
}

fn resolve(d: &Dataset, key: &str) -> Result<usize> {
    if let Some(i) = d.attribute_index(key) {
        return Ok(i);
    }
    match key.parse::<usize>() {
        Ok(i) if i < d.n_attributes() => Ok(i),
        _ => Err(CplError::InvalidParameter(format!(
            "no attribute named {key:?}"
        ))),
    }
}

fn selected_pairs(d: &Dataset, sel: &PairSelection) -> Result<Vec<(usize, usize)>> {
    let targets = match &sel.target {
        Some(t) => vec![resolve(d, t)?],
        None => (0..d.n_attributes()).collect(),
    };
    let neighbor = sel.neighbor.as_deref().map(|n| resolve(d, n)).transpose()?;
    let mut pairs = Vec::new();
    for &t in &targets {
        for j in 0..d.n_attributes() {
            if j != t && neighbor.is_none_or(|n| n == j) {
                pairs.push((t, j));
            }
        }
    }
    if pairs.is_empty() {
        return Err(CplError::InvalidParameter(
            "selection contains no attribute pair".into(),
        ));
    }
    Ok(pairs)
}

fn engine(e: EngineArg) -> CplEngine {
    match e {
        EngineArg::Bound => CplEngine::Bound,
        EngineArg::ExactGrr => CplEngine::ExactGrr,
        EngineArg::ExactExp => CplEngine::ExactExp,
    }
}

fn matrix(a: &MatrixArgs) -> Result<Value> {
    let d = load(&a.data)?;
    let budget = BudgetParams::new(a.epsilon, a.delta)?;
    let conds = PairwiseConditionals::from_dataset(&d)?;
    let m = cpl_matrix(&conds, &budget, engine(a.engine))?;
    let own = LeakagePair::from_budget(&budget);
    let tpl = (0..m.len())
        .map(|i| m.tpl(i, own))
        .collect::<Result<Vec<_>>>()?;
    let names = d.names();
    let metrics: Vec<Value> = pairwise_metrics(&d)?
        .into_iter()
        .map(|pm| json!({"a": names[pm.a], "b": names[pm.b], "metrics": pm.report}))
        .collect();
    Ok(json!({
        "epsilon": a.epsilon,
        "delta": a.delta,
        "engine": a.engine,
        "matrix": m,
        "tpl": tpl,
        "tcpl": tcpl(&m)?,
        "metrics": metrics,
    }))
}

fn exact(a: &ExactArgs) -> Result<Value> {
    let d = load(&a.data)?;
    let kind = match a.mechanism {
        ExactMechanism::Grr => MechanismKind::Grr,
        ExactMechanism::Exp => MechanismKind::Exp,
    };
    let names = d.names();
    let mut out = Vec::new();
    for (t, j) in selected_pairs(&d, &a.pairs)? {
        let cond = empirical_conditional(&d, t, j)?;
        let trans = transition_matrix(&MechanismSpec::new(kind, a.epsilon, d.alphabet_size(j))?)?;
        let r = cpl_exact(&cond, &trans)?;
        out.push(json!({"target": names[t], "neighbor": names[j], "result": r}));
    }
    Ok(json!({"epsilon": a.epsilon, "mechanism": a.mechanism, "pairs": out}))
}

fn bound(a: &BoundArgs) -> Result<Value> {
    let d = load(&a.data)?;
    let budget = BudgetParams::new(a.epsilon, a.delta)?;
    let names = d.names();
    let mut out = Vec::new();
    for (t, j) in selected_pairs(&d, &a.pairs)? {
        let cond = empirical_conditional(&d, t, j)?;
        let r = cpl_bound(&cond, &budget)?;
        let limit = cpl_limit(&cond)?;
        out.push(json!({
            "target": names[t],
            "neighbor": names[j],
            "result": r,
            "limit": limit.is_finite().then_some(limit),
            "limit_infinite": limit.is_infinite(),
            "max_attainable": is_max_attainable(&cond),
        }));
    }
    Ok(json!({"epsilon": a.epsilon, "delta": a.delta, "pairs": out}))
}

fn estimate(a: &EstimateArgs, seed: u64) -> Result<Value> {
    let d = load(&a.data)?;
    let cfg = EstimationConfig {
        expansion: a.estimation.expansion,
        surrogates: a.estimation.surrogates,
        alpha: a.estimation.alpha,
        seed,
    };
    cfg.validate()?;
    let specs = (0..d.n_attributes())
        .map(|i| MechanismSpec::new(a.mechanism, a.epsilon, d.alphabet_size(i)))
        .collect::<Result<Vec<_>>>()?;
    let rel = release(&d, &specs, &cfg)?;
    let names = d.names();

    let targets = match &a.target {
        Some(t) => vec![resolve(&d, t)?],
        None => (0..d.n_attributes()).collect(),
    };
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    if a.neighbors.is_empty() {
        for &t in &targets {
            for j in (0..d.n_attributes()).filter(|&j| j != t) {
                groups.push((t, vec![j]));
            }
        }
    } else {
        let ns = a
            .neighbors
            .iter()
            .map(|n| resolve(&d, n))
            .collect::<Result<Vec<_>>>()?;
        for &t in &targets {
            groups.push((t, ns.clone()));
        }
    }

    let mut cpl = Vec::new();
    for (t, ns) in groups {
        let r = statistical_cpl(&rel.perturbed, &rel.original, t, &ns, &cfg)?;
        let ns: Vec<&str> = ns.iter().map(|&j| names[j].as_str()).collect();
        cpl.push(json!({"target": names[t], "neighbors": ns, "result": r}));
    }
    let mut result = json!({
        "mechanism": a.mechanism,
        "epsilon": a.epsilon,
        "config": cfg,
        "cpl": cpl,
    });
    if a.tpl {
        let tpl = targets
            .iter()
            .map(|&t| {
                let r = statistical_tpl(&rel.perturbed, &rel.original, t, &cfg)?;
                Ok(json!({"target": names[t], "result": r}))
            })
            .collect::<Result<Vec<_>>>()?;
        result["tpl"] = Value::Array(tpl);
    }
    Ok(result)
}

fn analyzers(a: &AnalyzersArgs, seed: u64) -> Result<Value> {
    let d = load(&a.data)?;
    let source = match a.reference {
        ReferenceArg::Bound => ReferenceSource::Bound,
        ReferenceArg::ExactGrr => ReferenceSource::ExactGrr,
        ReferenceArg::ExactExp => ReferenceSource::ExactExp,
        ReferenceArg::Statistical => ReferenceSource::Statistical,
    };
    let cfg = EstimationConfig {
        expansion: a.expansion,
        surrogates: 1,
        seed,
        ..Default::default()
    };
    let points = analyzer_benchmark(&d, &a.epsilons, source, &cfg)?;
    Ok(json!({"reference": source, "points": points}))
}

fn utility(a: &UtilityArgs, seed: u64) -> Result<Value> {
    let d = load(&a.data)?;
    let cfg = EstimationConfig {
        expansion: a.expansion,
        surrogates: 1,
        seed,
        ..Default::default()
    };
    to_value(&utility_benchmark(&d, &a.mechanisms, &a.epsilons, &cfg)?)
}

fn calibration(a: &CalibrateArgs) -> Result<Value> {
    let d = load(&a.data)?;
    let conds = PairwiseConditionals::from_dataset(&d)?;
    let engine = match a.engine {
        CalibrationEngineArg::Bound => CalibrationEngine::Bound,
        CalibrationEngineArg::ExactGrr => CalibrationEngine::ExactGrr,
    };
    let r = match a.method {
        SearchMethod::Stepwise => calibrate(&conds, a.budget, a.step, engine)?,
        SearchMethod::Bisection => calibrate_bisection(&conds, a.budget, a.step, engine)?,
    };
    let mut v = to_value(&r)?;
    v["worst_attribute_name"] = json!(d.names()[r.worst_attribute]);
    v["equal_split"] = json!(a.budget / d.n_attributes() as f64);
    Ok(v)
}

const ALL_FIXTURES: [FixtureName; 6] = [
    FixtureName::Saturating,
    FixtureName::Independent,
    FixtureName::Copy,
    FixtureName::Weak,
    FixtureName::Chain,
    FixtureName::Mixed,
];

fn fixture(name: FixtureName, rows: usize, seed: u64) -> Result<(&'static str, Dataset)> {
    Ok(match name {
        FixtureName::Saturating => ("saturating", fixtures::saturating_dataset(rows, seed)?),
        FixtureName::Independent => ("independent", fixtures::independent_pair(rows, 4, seed)?),
        FixtureName::Copy => ("copy", fixtures::perfect_copy(rows, 4, seed)?),
        FixtureName::Weak => ("weak", fixtures::weak_correlation(rows, seed)?),
        FixtureName::Chain => ("chain", fixtures::chain(rows, &[3, 2, 4, 2, 3], 0.6, seed)?),
        FixtureName::Mixed => ("mixed", fixtures::mixed_correlation(rows, seed)?),
    })
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    std::fs::write(path, text + "\n").map_err(|source| CplError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_fixtures(a: &FixturesArgs, seed: u64) -> Result<Value> {
    std::fs::create_dir_all(&a.out).map_err(|source| CplError::Io {
        path: a.out.clone(),
        source,
    })?;
    let names = if a.only.is_empty() {
        ALL_FIXTURES.to_vec()
    } else {
        a.only.clone()
    };
    let mut written = Vec::new();
    for name in names {
        let (stem, d) = fixture(name, a.rows, seed)?;
        let csv = a.out.join(format!("{stem}.csv"));
        let schema = a.out.join(format!("{stem}.schema.json"));
        save_csv(&d, &csv)?;
        // sorted so the file is byte-stable
        let hints: std::collections::BTreeMap<_, _> = schema_of(&d).into_iter().collect();
        write_json(&schema, &hints)?;
        written.push(json!({
            "name": stem,
            "csv": format!("{stem}.csv"),
            "schema": format!("{stem}.schema.json"),
            "rows": d.n_rows(),
            "attributes": d.names(),
        }));
    }
    Ok(json!({"seed": seed, "fixtures": written}))
}
