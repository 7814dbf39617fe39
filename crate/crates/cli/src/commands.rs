use std::path::{Path, PathBuf};

use anyhow::anyhow;
use magnomech::figures::{figure_specs, FigurePanels};
use magnomech::optimize::optimize_squeezing_with;
use magnomech::oracle::{full_phonon_number, GaussianModel};
use magnomech::steady::{effective_params, solve_steady_state_with, SolveMode, SolverOptions};
use magnomech::sweep::{
    linspace, run_sweep, Metric, SqueezingMode, SweepResult, SweepSpec, DEFAULT_POINTS,
};
use magnomech::verify::{self, VerifyOptions};
use magnomech::{optimal_squeezing, scattering_rates, steady_phonon_number};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{
    Format, OutputBlock, RunConfig, SpectrumBlock, DEFAULT_OMEGA_POINTS, DEFAULT_OMEGA_RANGE,
};
use crate::exit::{self, Exit};
use crate::output::{emit, json_report, key_value_csv, sweep_csv};

/// Flags shared by the config-driven commands.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub precision: Option<usize>,
}

/// Loaded config with command-line overrides folded in, plus where to write.
struct Prepared {
    /// Echoed into reports; output path is not part of it.
    config: RunConfig,
    /// The same, in normalized units.
    norm: RunConfig,
    out: Option<PathBuf>,
    format: Format,
    precision: usize,
}

fn prepare(
    common: &Common,
    default_format: Format,
    tweak: impl FnOnce(&mut RunConfig),
) -> Result<Prepared, Exit> {
    let mut config = RunConfig::load(&common.config)?;
    let file_out = config.output.as_ref().and_then(|o| o.path.clone());
    let mut output = config.output.take().unwrap_or_default();
    output.path = None;
    if common.format.is_some() {
        output.format = common.format;
    }
    if common.precision.is_some() {
        output.precision = common.precision;
    }
    config.output = (output != OutputBlock::default()).then_some(output);
    tweak(&mut config);
    let precision = config.precision();
    if !(1..=17).contains(&precision) {
        return Err(Exit::config(anyhow!(
            "output.precision must be in 1..=17, got {precision}"
        )));
    }
    let norm = config.normalized().map_err(Exit::config)?;
    let format = config
        .output
        .as_ref()
        .and_then(|o| o.format)
        .unwrap_or(default_format);
    Ok(Prepared {
        config,
        norm,
        out: common.out.clone().or(file_out),
        format,
        precision,
    })
}

fn require<T>(v: anyhow::Result<T>) -> Result<T, Exit> {
    v.map_err(Exit::config)
}

fn write_report<T: Serialize>(command: &str, prep: &Prepared, result: &T) -> Result<(), Exit> {
    let text = match prep.format {
        Format::Json => json_report(command, &prep.config, result),
        Format::Csv => key_value_csv(command, &prep.config, result, prep.precision),
    }
    .map_err(Exit::config)?;
    emit(&text, prep.out.as_deref()).map_err(Exit::config)
}

fn write_sweep(
    command: &str,
    prep: &Prepared,
    result: &SweepResult,
    flags: bool,
) -> Result<(), Exit> {
    let text = match prep.format {
        Format::Json => json_report(command, &prep.config, result),
        Format::Csv => sweep_csv(command, result, prep.precision, flags),
    }
    .map_err(Exit::config)?;
    emit(&text, prep.out.as_deref()).map_err(Exit::config)
}

pub fn spectrum(common: &Common, oracle: bool) -> Result<i32, Exit> {
    let prep = prepare(common, Format::Csv, |c| {
        if oracle {
            c.spectrum.get_or_insert_with(SpectrumBlock::default).oracle = Some(true);
        }
    })?;
    let p = require(prep.norm.system())?;
    let block = prep.norm.spectrum.clone().unwrap_or_default();
    let mut metrics = vec![Metric::SOmega];
    if block.oracle == Some(true) {
        metrics.push(Metric::SOracle);
    }
    let spec = SweepSpec {
        label: "spectrum".into(),
        variable: "omega".into(),
        grid: linspace(
            block.omega_min.unwrap_or(DEFAULT_OMEGA_RANGE.0),
            block.omega_max.unwrap_or(DEFAULT_OMEGA_RANGE.1),
            block.points.unwrap_or(DEFAULT_OMEGA_POINTS),
        ),
        fixed: p,
        metrics,
        squeezing: prep.norm.squeezing.unwrap_or(SqueezingMode::None),
        notes: vec![],
    };
    let result = run_sweep(&spec)?;
    if let Some((row, err)) = result
        .rows
        .iter()
        .find_map(|r| r.error.as_ref().map(|e| (r, e)))
    {
        return Err(Exit::unstable(anyhow!("at omega = {}: {err}", row.x)));
    }
    write_sweep("spectrum", &prep, &result, false)?;
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
struct CoolResult {
    squeezing_mode: &'static str,
    zeta_abs: f64,
    phi: f64,
    s_minus: f64,
    s_plus: f64,
    a_plus: f64,
    a_minus: f64,
    gamma_net: f64,
    n_st: f64,
    n_full: f64,
    stable: bool,
    abscissa: f64,
    weak_coupling_ok: bool,
}

pub fn cool(common: &Common) -> Result<i32, Exit> {
    let prep = prepare(common, Format::Json, |_| {})?;
    let p = require(prep.norm.system())?;
    let mode = prep.norm.squeezing.unwrap_or(SqueezingMode::None);
    let sq = mode.resolve(&p)?;
    let st =
        GaussianModel::new(&p, Complex64::new(p.g_mag, 0.0), sq.to_complex())?.stability(p.omega_b);
    if !st.stable {
        return Err(magnomech::Error::Unstable {
            abscissa: st.abscissa,
        }
        .into());
    }
    let rates = scattering_rates(&p, &sq)?;
    let report = steady_phonon_number(&p, &sq)?;
    let result = CoolResult {
        squeezing_mode: mode.label(),
        zeta_abs: sq.zeta_abs,
        phi: sq.phi,
        s_minus: rates.s_minus,
        s_plus: rates.s_plus,
        a_plus: rates.a_plus,
        a_minus: rates.a_minus,
        gamma_net: report.gamma_net,
        n_st: report.n_st,
        n_full: full_phonon_number(&p, &sq)?,
        stable: st.stable,
        abscissa: st.abscissa,
        weak_coupling_ok: report.weak_coupling_ok,
    };
    write_report("cool", &prep, &result)?;
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
struct SteadyResult {
    mode: SolveMode,
    a_s: [f64; 2],
    b_s: [f64; 2],
    m_s: [f64; 2],
    delta_m_eff: f64,
    shift: f64,
    residual: f64,
    iterations_used: usize,
    converged: bool,
    other_branches: bool,
    g_eff: [f64; 2],
    g_abs: f64,
    zeta_abs: f64,
    phi: f64,
    /// Squeezing phase relative to the phase of `G`.
    phi_coupling_frame: f64,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn steady(common: &Common) -> Result<i32, Exit> {
    let prep = prepare(common, Format::Json, |_| {})?;
    let p = require(prep.norm.system())?;
    let d = require(
        prep.norm
            .drive
            .ok_or_else(|| anyhow!("missing [drive] block")),
    )?;
    let (mode, opts) = match &prep.norm.steady {
        Some(s) => (s.mode, s.solver_options()),
        None => (SolveMode::SelfConsistent, SolverOptions::default()),
    };
    let ss = solve_steady_state_with(&p, &d, mode, &opts)?;
    let eff = effective_params(&d, &ss);
    let result = SteadyResult {
        mode,
        a_s: pair(ss.a_s),
        b_s: pair(ss.b_s),
        m_s: pair(ss.m_s),
        delta_m_eff: ss.delta_m_eff,
        shift: ss.shift,
        residual: ss.residual,
        iterations_used: ss.iterations_used,
        converged: ss.converged,
        other_branches: ss.other_branches,
        g_eff: pair(eff.g_eff),
        g_abs: eff.g_eff.norm(),
        zeta_abs: eff.zeta_abs,
        phi: eff.phi,
        phi_coupling_frame: eff.coupling_frame_squeezing().phi,
    };
    write_report("steady", &prep, &result)?;
    Ok(exit::OK)
}

pub fn sweep(common: &Common) -> Result<i32, Exit> {
    let prep = prepare(common, Format::Csv, |_| {})?;
    let p = require(prep.norm.system())?;
    let block = require(
        prep.norm
            .sweep
            .clone()
            .ok_or_else(|| anyhow!("missing [sweep] block")),
    )?;
    let spec = SweepSpec {
        label: block.label.clone().unwrap_or_else(|| "sweep".into()),
        variable: block.variable.clone(),
        grid: require(block.grid())?,
        fixed: p,
        metrics: block.metrics.clone(),
        squeezing: prep.norm.squeezing.unwrap_or(SqueezingMode::None),
        notes: block.notes.clone(),
    };
    let result = run_sweep(&spec)?;
    write_sweep("sweep", &prep, &result, true)?;
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
struct OptimizeResult {
    objective: magnomech::optimize::Objective,
    zeta_abs: f64,
    phi: f64,
    n_st_min: f64,
    objective_value: f64,
    degenerate: bool,
    evaluations: usize,
    analytic_zeta_abs: f64,
    analytic_phi: f64,
    analytic_n_st: Option<f64>,
}

pub fn optimize(common: &Common) -> Result<i32, Exit> {
    let prep = prepare(common, Format::Json, |_| {})?;
    let p = require(prep.norm.system())?;
    let opts = prep.norm.optimizer.clone().unwrap_or_default().options();
    let num = optimize_squeezing_with(&p, &opts)?;
    let ana = optimal_squeezing(&p)?;
    let result = OptimizeResult {
        objective: opts.objective,
        zeta_abs: num.zeta_abs,
        phi: num.phi,
        n_st_min: num.n_st_min,
        objective_value: num.objective_value,
        degenerate: num.degenerate,
        evaluations: num.evaluations,
        analytic_zeta_abs: ana.zeta_abs,
        analytic_phi: ana.phi,
        analytic_n_st: steady_phonon_number(&p, &ana).ok().map(|r| r.n_st),
    };
    write_report("optimize", &prep, &result)?;
    Ok(exit::OK)
}

pub struct FiguresArgs {
    pub which: String,
    pub out: PathBuf,
    pub format: Format,
    pub precision: usize,
    pub points: Option<usize>,
}

pub fn figures(args: &FiguresArgs) -> Result<i32, Exit> {
    let panels: Vec<FigurePanels> = if args.which == "all" {
        FigurePanels::ALL.to_vec()
    } else {
        vec![args.which.parse()?]
    };
    if !(1..=17).contains(&args.precision) {
        return Err(Exit::config(anyhow!(
            "precision must be in 1..=17, got {}",
            args.precision
        )));
    }
    let config = RunConfig {
        output: Some(OutputBlock {
            path: None,
            format: Some(args.format),
            precision: Some(args.precision),
        }),
        ..RunConfig::default()
    };
    for panel in panels {
        for spec in figure_specs(panel, args.points.unwrap_or(DEFAULT_POINTS))? {
            let result = run_sweep(&spec)?;
            let (text, ext) = match args.format {
                Format::Csv => (sweep_csv("figures", &result, args.precision, true), "csv"),
                Format::Json => (json_report("figures", &config, &result), "json"),
            };
            let path = args.out.join(format!("{}.{ext}", result.label));
            emit(&text.map_err(Exit::config)?, Some(&path)).map_err(Exit::config)?;
        }
    }
    Ok(exit::OK)
}

pub fn verify(opts: &VerifyOptions, out: Option<&Path>) -> Result<i32, Exit> {
    let outcomes = verify::run(opts);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if let Some(path) = out {
        let text =
            serde_json::to_string_pretty(&outcomes).map_err(|e| Exit::config(e.into()))? + "\n";
        emit(&text, Some(path)).map_err(Exit::config)?;
    }
    Ok(if verify::all_passed(&outcomes) {
        exit::OK
    } else {
        exit::VERIFY_FAILED
    })
}
