//! Subcommand implementations. Each resolves its parameters from flags and
//! the config file (flags win), runs the corresponding library routine, and
//! renders headered CSV or JSON.

use clap::Args;
use serde_json::{json, Value};

use mpf_core::experiments::{ising_magnetization_demo, IsingDemoParams, DEFAULT_INITIAL_TILT};
use mpf_core::hamiltonians::build_spin_boson;
use mpf_core::mpf::{
    search_sequences, solve_weights, ExponentSequence, SearchObjective, SequenceSearch,
    WeightReport,
};
use mpf_core::noise::{
    bernoulli_mpf_demo, zne_round_trip, DEFAULT_STRETCH_MAX, DEFAULT_STRETCH_MIN,
    DEFAULT_STRETCH_POINTS,
};
use mpf_core::propagators::ProductFormula;
use mpf_core::resources::{
    classical_cnot_count, lcu_cnot_count, lcu_gate_counts, mpf_depth_scaling,
    pf_repetitions_to_accuracy, ErrorMetric, GateCostTable, ScalingQuery,
};
use mpf_core::util::median;

use crate::config::Config;
use crate::{csv_banner, CliError, VERSION};

fn parse_k_list(raw: &str) -> Result<Vec<u64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::usage(format!("invalid Trotter exponent '{s}'")))
        })
        .collect()
}

fn parse_sequences(raw: &str) -> Result<Vec<Vec<u64>>, CliError> {
    raw.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_k_list)
        .collect()
}

fn parse_base(raw: &str) -> Result<ProductFormula, CliError> {
    raw.parse::<ProductFormula>().map_err(CliError::from)
}

fn json_envelope(seed: u64, command: &str, config_echo: Value, payload: Value) -> String {
    let mut doc = json!({
        "tool": "mpf-lab",
        "version": VERSION,
        "seed": seed,
        "command": command,
        "config": config_echo,
    });
    doc.as_object_mut()
        .expect("envelope is an object")
        .extend(payload.as_object().cloned().unwrap_or_default());
    let mut rendered = serde_json::to_string_pretty(&doc).expect("serializable output");
    rendered.push('\n');
    rendered
}

// --- weights ---------------------------------------------------------------

#[derive(Args)]
pub struct WeightsArgs {
    /// Comma-separated strictly increasing Trotter exponents, e.g. 1,2,7
    #[arg(long)]
    k: Option<String>,
    /// Base product formula: s1, s2, s4, ...
    #[arg(long)]
    base: Option<String>,
}

pub fn weights(args: WeightsArgs, config: &Config, seed: u64) -> Result<String, CliError> {
    config.restrict_to(&["seed", "k", "base"])?;
    let k_raw = args
        .k
        .or(config.get_raw("k").map(str::to_string))
        .ok_or_else(|| CliError::usage("--k is required"))?;
    let base_raw = args
        .base
        .or(config.get_raw("base").map(str::to_string))
        .unwrap_or_else(|| "s1".to_string());

    let k = parse_k_list(&k_raw)?;
    let base = parse_base(&base_raw)?;
    let seq = ExponentSequence::new(k, base)?;
    let w = solve_weights(&seq)?;
    let report = WeightReport::new(&seq, &w);

    Ok(json_envelope(
        seed,
        "weights",
        json!({ "k": k_raw, "base": base_raw }),
        json!({ "result": report }),
    ))
}

// --- ising-demo ------------------------------------------------------------

#[derive(Args)]
pub struct IsingDemoArgs {
    /// Number of spins in the chain
    #[arg(long)]
    n_spins: Option<usize>,
    /// Nearest-neighbour ZZ coupling J
    #[arg(long)]
    coupling: Option<f64>,
    /// Transverse field h
    #[arg(long)]
    field: Option<f64>,
    /// Evolution time t
    #[arg(long)]
    time: Option<f64>,
    /// Sweep Trotter exponents k = 1..=k_max
    #[arg(long)]
    k_max: Option<u64>,
    /// Injected sign-aligned perturbation magnitude
    #[arg(long)]
    eps_prime: Option<f64>,
    /// Per-qubit initial-state tilt angle (radians)
    #[arg(long)]
    tilt: Option<f64>,
    /// Semicolon-separated sequences, e.g. "1,2;1,3;6,7"
    #[arg(long)]
    sequences: Option<String>,
}

pub fn ising_demo(args: IsingDemoArgs, config: &Config, seed: u64) -> Result<String, CliError> {
    config.restrict_to(&[
        "seed",
        "n_spins",
        "coupling",
        "field",
        "time",
        "k_max",
        "eps_prime",
        "tilt",
        "sequences",
    ])?;
    let defaults = IsingDemoParams::default();
    let params = IsingDemoParams {
        n_spins: args
            .n_spins
            .or(config.get("n_spins")?)
            .unwrap_or(defaults.n_spins),
        coupling: args
            .coupling
            .or(config.get("coupling")?)
            .unwrap_or(defaults.coupling),
        field: args
            .field
            .or(config.get("field")?)
            .unwrap_or(defaults.field),
        time: args.time.or(config.get("time")?).unwrap_or(defaults.time),
        k_max: args
            .k_max
            .or(config.get("k_max")?)
            .unwrap_or(defaults.k_max),
        eps_prime: args
            .eps_prime
            .or(config.get("eps_prime")?)
            .unwrap_or(defaults.eps_prime),
        initial_tilt: args
            .tilt
            .or(config.get("tilt")?)
            .unwrap_or(DEFAULT_INITIAL_TILT),
        sequences: match args
            .sequences
            .or(config.get_raw("sequences").map(str::to_string))
        {
            Some(raw) => parse_sequences(&raw)?,
            None => defaults.sequences,
        },
    };

    let demo = ising_magnetization_demo(&params)?;

    let mut out = csv_banner(seed);
    out.push_str(&format!(
        "# ising-demo n_spins={} coupling={} field={} time={} k_max={} eps_prime={} tilt={}\n",
        params.n_spins,
        params.coupling,
        params.field,
        params.time,
        params.k_max,
        params.eps_prime,
        params.initial_tilt
    ));
    out.push_str(&format!(
        "# exact={:.12} s1_loglog_slope={}\n",
        demo.exact,
        demo.slope.map_or("n/a".to_string(), |s| format!("{s:.4}")),
    ));
    out.push_str("row,k,norm1,eps_prime,value,rel_error\n");
    for row in &demo.pf {
        out.push_str(&format!(
            "pf,{},,,{:.12},{:.6e}\n",
            row.k, row.expectation, row.rel_error
        ));
    }
    let mut mpf_rows = demo.mpf.clone();
    mpf_rows.sort_by(|a, b| {
        a.k.cmp(&b.k)
            .then(a.eps_prime.partial_cmp(&b.eps_prime).expect("finite eps"))
    });
    for row in &mpf_rows {
        let seq_label = row
            .k
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join("|");
        out.push_str(&format!(
            "mpf,{},{:.6},{},{:.12},{:.6e}\n",
            seq_label, row.norm1, row.eps_prime, row.combined, row.rel_error
        ));
    }
    Ok(out)
}

// --- bernoulli-demo --------------------------------------------------------

#[derive(Args)]
pub struct BernoulliArgs {
    /// Bernoulli success probability
    #[arg(long)]
    p: Option<f64>,
    /// Samples per extrapolation point
    #[arg(long)]
    samples: Option<u64>,
    /// Largest number of extrapolation points (l runs 1..=l_max)
    #[arg(long)]
    l_max: Option<usize>,
    /// Base product formula for the forced k_j = j weights
    #[arg(long)]
    base: Option<String>,
    /// Independent repetitions per l (seeds seed, seed+1, ...)
    #[arg(long)]
    repeats: Option<u64>,
}

pub fn bernoulli_demo(args: BernoulliArgs, config: &Config, seed: u64) -> Result<String, CliError> {
    config.restrict_to(&["seed", "p", "samples", "l_max", "base", "repeats"])?;
    let p = args.p.or(config.get("p")?).unwrap_or(0.3);
    let samples = args.samples.or(config.get("samples")?).unwrap_or(10_000);
    let l_max = args.l_max.or(config.get("l_max")?).unwrap_or(6);
    let base = parse_base(
        &args
            .base
            .or(config.get_raw("base").map(str::to_string))
            .unwrap_or_else(|| "s2".to_string()),
    )?;
    let repeats = args.repeats.or(config.get("repeats")?).unwrap_or(100);
    if repeats == 0 {
        return Err(CliError::usage("--repeats must be >= 1"));
    }

    let mut out = csv_banner(seed);
    out.push_str(&format!(
        "# bernoulli-demo p={p} samples={samples} l_max={l_max} base={} repeats={repeats}\n",
        base.name()
    ));
    out.push_str("l,norm1,median_abs_error,mean_abs_error,repeats\n");
    for l in 1..=l_max {
        let mut errs = Vec::with_capacity(repeats as usize);
        let mut norm1 = 0.0;
        for rep in 0..repeats {
            let demo = bernoulli_mpf_demo(p, samples, l, base, seed.wrapping_add(rep))?;
            errs.push(demo.error);
            norm1 = demo.norm1;
        }
        let med = median(&errs).expect("repeats >= 1");
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        out.push_str(&format!("{l},{norm1:.6},{med:.6e},{mean:.6e},{repeats}\n"));
    }
    Ok(out)
}

// --- zne-demo ---------------------------------------------------------------

#[derive(Args)]
pub struct ZneArgs {
    /// Noise-free expectation value the fit should recover
    #[arg(long)]
    e_ideal: Option<f64>,
    /// Synthetic exponential decay rate
    #[arg(long)]
    b: Option<f64>,
    /// Synthetic noise-floor asymptote
    #[arg(long)]
    d: Option<f64>,
    /// Logically equivalent circuits averaged per stretch point
    #[arg(long)]
    circuits: Option<u64>,
    /// Shots per circuit (total per point = circuits * shots_per_circuit)
    #[arg(long)]
    shots_per_circuit: Option<u64>,
    /// Number of stretch factors
    #[arg(long)]
    points: Option<usize>,
    /// Smallest stretch factor
    #[arg(long)]
    c_min: Option<f64>,
    /// Largest stretch factor
    #[arg(long)]
    c_max: Option<f64>,
    /// Emit the JSON fit summary instead of CSV points
    #[arg(long)]
    json: bool,
}

pub fn zne_demo(args: ZneArgs, config: &Config, seed: u64) -> Result<String, CliError> {
    config.restrict_to(&[
        "seed",
        "e_ideal",
        "b",
        "d",
        "circuits",
        "shots_per_circuit",
        "points",
        "c_min",
        "c_max",
    ])?;
    let e_ideal = args.e_ideal.or(config.get("e_ideal")?).unwrap_or(0.54);
    let b = args.b.or(config.get("b")?).unwrap_or(0.5);
    let d = args.d.or(config.get("d")?).unwrap_or(0.0);
    let circuits = args.circuits.or(config.get("circuits")?).unwrap_or(8);
    let shots_per_circuit = args
        .shots_per_circuit
        .or(config.get("shots_per_circuit")?)
        .unwrap_or(100_000 / 8);
    let points = args
        .points
        .or(config.get("points")?)
        .unwrap_or(DEFAULT_STRETCH_POINTS);
    let c_min = args
        .c_min
        .or(config.get("c_min")?)
        .unwrap_or(DEFAULT_STRETCH_MIN);
    let c_max = args
        .c_max
        .or(config.get("c_max")?)
        .unwrap_or(DEFAULT_STRETCH_MAX);
    if circuits == 0 {
        return Err(CliError::usage("--circuits must be >= 1"));
    }
    let shots_per_point = circuits.checked_mul(shots_per_circuit).ok_or_else(|| {
        CliError::usage("shot budget overflows: circuits * shots_per_circuit too large")
    })?;

    let fit = zne_round_trip(e_ideal, b, d, shots_per_point, points, c_min, c_max, seed)?;
    let config_echo = json!({
        "e_ideal": e_ideal, "b": b, "d": d,
        "circuits": circuits, "shots_per_circuit": shots_per_circuit,
        "points": points, "c_min": c_min, "c_max": c_max,
    });

    if args.json {
        return Ok(json_envelope(
            seed,
            "zne-demo",
            config_echo,
            json!({ "fit": fit, "abs_error": (fit.extrapolated - e_ideal).abs() }),
        ));
    }

    let mut out = csv_banner(seed);
    out.push_str(&format!(
        "# zne-demo e_ideal={e_ideal} b={b} d={d} circuits={circuits} \
         shots_per_circuit={shots_per_circuit} points={points} c_min={c_min} c_max={c_max}\n"
    ));
    out.push_str("c,y\n");
    for (c, y) in &fit.points {
        out.push_str(&format!("{c:.6},{y:.8}\n"));
    }
    out.push_str(&format!(
        "# fit a={:.8} b={:.8} d={:.8} extrapolated={:.8} degenerate={}\n",
        fit.a, fit.b, fit.d, fit.extrapolated, fit.degenerate
    ));
    Ok(out)
}

// --- lcu-cost ----------------------------------------------------------------

#[derive(Args)]
pub struct LcuCostArgs {
    /// Exactly three Trotter exponents, e.g. 1,2,7
    #[arg(long)]
    k: Option<String>,
    /// Spins in the chain (classical count uses n_spins - 1 bonds)
    #[arg(long)]
    n_spins: Option<usize>,
    /// Emit the gate-by-gate CSV breakdown instead of the JSON summary
    #[arg(long)]
    csv: bool,
}

pub fn lcu_cost(args: LcuCostArgs, config: &Config, seed: u64) -> Result<String, CliError> {
    config.restrict_to(&["seed", "k", "n_spins"])?;
    let k_raw = args
        .k
        .or(config.get_raw("k").map(str::to_string))
        .ok_or_else(|| CliError::usage("--k is required"))?;
    let n_spins = args.n_spins.or(config.get("n_spins")?).unwrap_or(5);
    let k = parse_k_list(&k_raw)?;

    let costs = GateCostTable::default();
    let lcu = lcu_cnot_count(&k, &costs)?;
    let classical = classical_cnot_count(&k, n_spins)?;
    let ratio = lcu as f64 / classical as f64;

    if args.csv {
        let counts = lcu_gate_counts(&k)?;
        let mut out = csv_banner(seed);
        out.push_str(&format!("# lcu-cost k={k_raw} n_spins={n_spins}\n"));
        out.push_str("gate,cnots_each,lcu_count,classical_count\n");
        out.push_str(&format!("rzz,{},0,{classical}\n", costs.rzz));
        out.push_str(&format!(
            "ctrl_rzz,{},{},0\n",
            costs.ctrl_rzz, counts.ctrl_rzz
        ));
        out.push_str(&format!(
            "ctrl_1q,{},{},0\n",
            costs.ctrl_single_qubit, counts.ctrl_single_qubit
        ));
        out.push_str(&format!(
            "cctrl_rzz,{},{},0\n",
            costs.double_ctrl_rzz, counts.double_ctrl_rzz
        ));
        out.push_str(&format!(
            "cctrl_rx,{},{},0\n",
            costs.double_ctrl_rx, counts.double_ctrl_rx
        ));
        out.push_str(&format!("total,,{lcu},{classical}\n"));
        return Ok(out);
    }

    Ok(json_envelope(
        seed,
        "lcu-cost",
        json!({ "k": k_raw, "n_spins": n_spins }),
        json!({
            "lcu": lcu,
            "classical": classical,
            "ratio": (ratio * 100.0).round() / 100.0,
        }),
    ))
}

// --- scaling -----------------------------------------------------------------

#[derive(Args)]
pub struct ScalingArgs {
    /// Qubit count N_q
    #[arg(long)]
    nq: Option<u64>,
    /// Target accuracy ε_t in (0, 1)
    #[arg(long)]
    eps: Option<f64>,
    /// Evolution time t (the rescaling α = t)
    #[arg(long)]
    t: Option<f64>,
}

pub fn scaling(args: ScalingArgs, config: &Config, seed: u64) -> Result<String, CliError> {
    config.restrict_to(&["seed", "nq", "eps", "t"])?;
    let nq = args
        .nq
        .or(config.get("nq")?)
        .ok_or_else(|| CliError::usage("--nq is required"))?;
    let eps = args
        .eps
        .or(config.get("eps")?)
        .ok_or_else(|| CliError::usage("--eps is required"))?;
    let t = args.t.or(config.get("t")?).unwrap_or(1.0);

    let scaling = mpf_depth_scaling(&ScalingQuery::new(nq, eps, t)?)?;
    Ok(json_envelope(
        seed,
        "scaling",
        json!({ "nq": nq, "eps": eps, "t": t }),
        json!({
            "l": scaling.l,
            "k_l": scaling.k_deepest,
            "l_lambert": scaling.l_lambert,
        }),
    ))
}

// --- repetitions ---------------------------------------------------------------

#[derive(Args)]
pub struct RepetitionsArgs {
    /// Spin-boson sizes as "M,n_max" pairs separated by ';', e.g. "1,1;1,2"
    #[arg(long)]
    models: Option<String>,
    /// Comma-separated target accuracies
    #[arg(long)]
    eps_list: Option<String>,
    /// Evolution time
    #[arg(long)]
    t: Option<f64>,
    /// Product formulas to compare, comma-separated
    #[arg(long)]
    formulas: Option<String>,
}

/// Repetition counts of the deepest circuit for spin-boson models, one CSV
/// row per (model, accuracy) cell.
pub fn repetitions(args: RepetitionsArgs, config: &Config, seed: u64) -> Result<String, CliError> {
    config.restrict_to(&["seed", "models", "eps_list", "t", "formulas"])?;
    let models_raw = args
        .models
        .or(config.get_raw("models").map(str::to_string))
        .unwrap_or_else(|| "1,1;1,2".to_string());
    let eps_raw = args
        .eps_list
        .or(config.get_raw("eps_list").map(str::to_string))
        .unwrap_or_else(|| "1e-2,1e-3".to_string());
    let t = args.t.or(config.get("t")?).unwrap_or(10.0);
    let formulas_raw = args
        .formulas
        .or(config.get_raw("formulas").map(str::to_string))
        .unwrap_or_else(|| "s1,s2".to_string());

    let models: Vec<(usize, usize)> = models_raw
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            pair.split_once(',')
                .and_then(|(m, n)| Some((m.trim().parse().ok()?, n.trim().parse().ok()?)))
                .ok_or_else(|| CliError::usage(format!("invalid model '{pair}' (want M,n_max)")))
        })
        .collect::<Result<_, _>>()?;
    let eps_list: Vec<f64> = eps_raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("invalid accuracy '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    let formulas: Vec<ProductFormula> = formulas_raw
        .split(',')
        .map(|s| parse_base(s.trim()))
        .collect::<Result<_, _>>()?;

    let mut out = csv_banner(seed);
    out.push_str(&format!(
        "# repetitions models={models_raw} eps_list={eps_raw} t={t} formulas={formulas_raw} \
         metric=operator-norm\n"
    ));
    let names: Vec<String> = formulas.iter().map(|f| f.name()).collect();
    out.push_str(&format!("modes,n_max,dim,eps,{}\n", names.join(",")));
    for &(modes, n_max) in &models {
        let h = build_spin_boson(modes, n_max, 1.0, -1.0, 0.0, 0.5)?;
        for &eps in &eps_list {
            let mut cells = Vec::with_capacity(formulas.len());
            for pf in &formulas {
                let reps = pf_repetitions_to_accuracy(&h, t, *pf, eps, &ErrorMetric::OperatorNorm)?;
                cells.push(reps.to_string());
            }
            out.push_str(&format!(
                "{modes},{n_max},{},{eps},{}\n",
                h.dim(),
                cells.join(",")
            ));
        }
    }
    Ok(out)
}

// --- search ------------------------------------------------------------------

#[derive(Args)]
pub struct SearchArgs {
    /// Number of extrapolation points l
    #[arg(long)]
    l: Option<usize>,
    /// Base product formula
    #[arg(long)]
    base: Option<String>,
    /// Exponent range as min:max, e.g. 1:5
    #[arg(long)]
    range: Option<String>,
    /// Condition-number acceptance threshold
    #[arg(long)]
    threshold: Option<f64>,
    /// Ranking objective: norm1 or depth
    #[arg(long)]
    objective: Option<String>,
    /// Keep at most this many ranked results
    #[arg(long)]
    limit: Option<usize>,
}

pub fn search(args: SearchArgs, config: &Config, seed: u64) -> Result<String, CliError> {
    config.restrict_to(&[
        "seed",
        "l",
        "base",
        "range",
        "threshold",
        "objective",
        "limit",
    ])?;
    let l = args
        .l
        .or(config.get("l")?)
        .ok_or_else(|| CliError::usage("--l is required"))?;
    let base = parse_base(
        &args
            .base
            .or(config.get_raw("base").map(str::to_string))
            .unwrap_or_else(|| "s1".to_string()),
    )?;
    let range_raw = args
        .range
        .or(config.get_raw("range").map(str::to_string))
        .ok_or_else(|| CliError::usage("--range is required (min:max)"))?;
    let (k_min, k_max) = range_raw
        .split_once(':')
        .and_then(|(a, b)| Some((a.trim().parse::<u64>().ok()?, b.trim().parse::<u64>().ok()?)))
        .ok_or_else(|| CliError::usage(format!("invalid range '{range_raw}' (want min:max)")))?;
    let threshold = args
        .threshold
        .or(config.get("threshold")?)
        .unwrap_or_else(|| {
            if base.is_symmetric() {
                mpf_core::experiments::S2_THRESHOLD
            } else {
                mpf_core::experiments::S1_THRESHOLD
            }
        });
    let objective = match args
        .objective
        .or(config.get_raw("objective").map(str::to_string))
    {
        Some(raw) => raw.parse::<SearchObjective>()?,
        None => SearchObjective::MinNorm1,
    };

    let results = search_sequences(&SequenceSearch {
        length: l,
        base,
        k_min,
        k_max,
        threshold,
        objective,
    })?;
    let limit = args.limit.or(config.get("limit")?).unwrap_or(usize::MAX);
    let reports: Vec<WeightReport> = results
        .iter()
        .take(limit)
        .map(|(seq, w)| WeightReport::new(seq, w))
        .collect();

    Ok(json_envelope(
        seed,
        "search",
        json!({
            "l": l, "base": base.name(), "range": range_raw,
            "threshold": threshold,
            "objective": match objective {
                SearchObjective::MinNorm1 => "norm1",
                SearchObjective::MinDepth => "depth",
            },
        }),
        json!({
            "count": reports.len(),
            "results": reports,
        }),
    ))
}
