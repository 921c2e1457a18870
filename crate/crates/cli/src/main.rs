//! Batch frontend: run simulations, fits, predictions, stability sweeps, and
//! convergence studies from JSON configs; write CSV and simple SVG plots.

mod config;
mod output;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use collapse_core::convergence::{refine_space, refine_time, Probe};
use collapse_core::fitting::{
    fit_ellipse, fit_hyperbola, fit_line, fit_parabola_vertex, select_fit_window, WindowMode,
};
use collapse_core::integrator::run;
use collapse_core::predictions::{
    empirical_line_law_q1, predict_parabola, profile_parabola, trajectory_q1,
};
use collapse_core::stability::{build_linearized_matrix, eigenvalues, von_neumann, StabilityContext, VnQuery};
use collapse_core::StopReason;

use config::{
    ConvergeConfig, FitConfig, FitterName, PredictConfig, SimulateConfig, StabilityConfig,
    VaryParameter, WindowConfig,
};
use output::{csv, fmt_sig, time_label, OutputDir};

const USAGE: &str = "\
collapse <command> --config PATH [--out DIR] [--force] [--svg] [--threads N]

commands:
  simulate   evolve a model; writes origin.csv and snapshots/snapshot_<t>.csv
  fit        least-squares fit of a prior output; writes fit.csv
  predict    closed-form or integrated collapse traces; writes predict.csv
  stability  linearization spectra and plane-wave growth; writes matrix_<i>.csv,
             spectrum.csv, vn.csv
  converge   refinement study against a reference run; writes table.csv

flags:
  --config PATH   JSON config (required)
  --out DIR       output directory (default .)
  --force         overwrite existing outputs
  --svg           also write SVG plots
  --threads N     worker threads for converge (default 1)
  --help          this text
";

/// Config or usage problems exit 1; runtime failures (non-finite states,
/// degenerate fits) exit 2.
enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

struct Cli {
    command: String,
    config_path: PathBuf,
    out_dir: PathBuf,
    force: bool,
    emit_svg: bool,
    threads: usize,
}

fn parse_args(args: &[String]) -> Result<Option<Cli>, CliError> {
    if args.is_empty() || args.iter().any(|a| a == "--help" || a == "-h") {
        return Ok(None);
    }
    let command = args[0].clone();
    if !["simulate", "fit", "predict", "stability", "converge"].contains(&command.as_str()) {
        return Err(CliError::Config(format!("unknown command `{command}`")));
    }
    let mut config_path = None;
    let mut out_dir = PathBuf::from(".");
    let mut force = false;
    let mut emit_svg = false;
    let mut threads = 1usize;
    let mut it = args[1..].iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                let v = it.next().ok_or_else(|| CliError::Config("--config needs a path".into()))?;
                config_path = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = it.next().ok_or_else(|| CliError::Config("--out needs a directory".into()))?;
                out_dir = PathBuf::from(v);
            }
            "--force" => force = true,
            "--svg" => emit_svg = true,
            "--threads" => {
                let v = it.next().ok_or_else(|| CliError::Config("--threads needs a count".into()))?;
                threads = v
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad thread count `{v}`")))?;
            }
            other => return Err(CliError::Config(format!("unknown flag `{other}`"))),
        }
    }
    let config_path =
        config_path.ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    Ok(Some(Cli { command, config_path, out_dir, force, emit_svg, threads }))
}

fn load_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
}

fn write(out: &OutputDir, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    out.write(name, contents).map_err(|e| CliError::Config(e.to_string()))
}

fn cmd_simulate(cli: &Cli) -> Result<(), CliError> {
    let spec: SimulateConfig = load_config(&cli.config_path)?;
    let config = spec.build().map_err(CliError::Config)?;
    for warning in config.validate().map_err(|e| CliError::Config(e.to_string()))? {
        eprintln!("warning: {warning:?}");
    }
    let result = run(&config).map_err(|e| CliError::Runtime(e.to_string()))?;

    let out = OutputDir::new(&cli.out_dir, cli.force).map_err(|e| CliError::Config(e.to_string()))?;
    let origin = csv(
        "t,f0_t",
        result.origin_trace.iter().map(|&(t, f)| vec![fmt_sig(t), fmt_sig(f)]),
    );
    write(&out, "origin.csv", &origin)?;
    for (snapshot, requested) in result.snapshots.iter().zip(&config.snapshot_times) {
        let rows = snapshot
            .samples
            .iter()
            .enumerate()
            .map(|(q, &f)| vec![fmt_sig(config.grid.radius(q)), fmt_sig(f)]);
        let name = format!("snapshots/snapshot_{}.csv", time_label(*requested));
        write(&out, &name, &csv("r,f", rows))?;
    }
    if cli.emit_svg {
        write(
            &out,
            "origin.svg",
            &svg::polyline_plot("origin height", &[("f(0,t)", &result.origin_trace)]),
        )?;
    }
    if result.stop_reason == StopReason::NonFinite {
        return Err(CliError::Runtime("state became non-finite before the horizon".into()));
    }
    Ok(())
}

fn read_two_column_csv(path: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue; // header
        }
        let mut cols = line.split(',');
        let x = cols.next().and_then(|v| v.parse::<f64>().ok());
        let y = cols.next().and_then(|v| v.parse::<f64>().ok());
        match (x, y) {
            (Some(x), Some(y)) => points.push((x, y)),
            _ => return Err(CliError::Config(format!("{path}:{}: not a numeric pair", i + 1))),
        }
    }
    Ok(points)
}

fn window_description(window: &Option<WindowConfig>) -> String {
    match window {
        None => "all".to_string(),
        Some(WindowConfig::AfterFraction { phi }) => format!("after_fraction({})", fmt_sig(*phi)),
        Some(WindowConfig::TimeRange { t1, t2 }) => {
            format!("time_range({},{})", fmt_sig(*t1), fmt_sig(*t2))
        }
        Some(WindowConfig::BeforeBoundaryHit { a_max }) => {
            format!("before_boundary_hit({})", fmt_sig(*a_max))
        }
    }
}

fn cmd_fit(cli: &Cli) -> Result<(), CliError> {
    let spec: FitConfig = load_config(&cli.config_path)?;
    let points = read_two_column_csv(&spec.input)?;
    let windowed = match &spec.window {
        None => points,
        Some(w) => {
            let mode = match *w {
                WindowConfig::AfterFraction { phi } => WindowMode::AfterFraction(phi),
                WindowConfig::TimeRange { t1, t2 } => WindowMode::TimeRange(t1, t2),
                WindowConfig::BeforeBoundaryHit { a_max } => WindowMode::BeforeBoundaryHit(a_max),
            };
            select_fit_window(&points, mode).map_err(|e| CliError::Runtime(e.to_string()))?
        }
    };
    let description = window_description(&spec.window);
    let mut rows: Vec<(String, f64)> = Vec::new();
    let (name, rms) = match spec.fitter {
        FitterName::Line => {
            let fit = fit_line(&windowed).map_err(|e| CliError::Runtime(e.to_string()))?;
            rows.push(("m".into(), fit.m));
            rows.push(("b".into(), fit.b));
            rows.push(("zero_crossing".into(), fit.zero_crossing()));
            ("line", fit.rms)
        }
        FitterName::Parabola => {
            let fit =
                fit_parabola_vertex(&windowed).map_err(|e| CliError::Runtime(e.to_string()))?;
            rows.push(("a".into(), fit.a));
            rows.push(("vertex".into(), fit.vertex));
            rows.push(("offset".into(), fit.offset));
            ("parabola", fit.rms)
        }
        FitterName::Ellipse => {
            let fit = fit_ellipse(&windowed).map_err(|e| CliError::Runtime(e.to_string()))?;
            rows.push(("a".into(), fit.a));
            rows.push(("b".into(), fit.b));
            rows.push(("k".into(), fit.k));
            ("ellipse", fit.rms)
        }
        FitterName::Hyperbola => {
            let fit = fit_hyperbola(&windowed).map_err(|e| CliError::Runtime(e.to_string()))?;
            rows.push(("a".into(), fit.a));
            rows.push(("b".into(), fit.b));
            rows.push(("k".into(), fit.k));
            rows.push(("asymptotic_slope".into(), fit.asymptotic_slope()));
            ("hyperbola", fit.rms)
        }
    };
    let out = OutputDir::new(&cli.out_dir, cli.force).map_err(|e| CliError::Config(e.to_string()))?;
    let mut all_rows: Vec<Vec<String>> = rows
        .into_iter()
        .map(|(param, value)| vec![name.to_string(), description.clone(), param, fmt_sig(value)])
        .collect();
    all_rows.push(vec![name.to_string(), description, "rms".into(), fmt_sig(rms)]);
    write(&out, "fit.csv", &csv("fitter,window,param,value", all_rows))?;
    Ok(())
}

fn cmd_predict(cli: &Cli) -> Result<(), CliError> {
    let spec: PredictConfig = load_config(&cli.config_path)?;
    let out = OutputDir::new(&cli.out_dir, cli.force).map_err(|e| CliError::Config(e.to_string()))?;
    let mut params: Vec<(String, f64)> = Vec::new();
    let (trace, header): (Vec<Vec<String>>, &str) = match &spec {
        PredictConfig::Parabola { model, f0, v0, times } => {
            let p = predict_parabola(model.kind(), *f0, *v0)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            params.push(("a".into(), p.a));
            params.push(("t_collapse".into(), p.t_collapse));
            (
                times
                    .times()
                    .iter()
                    .map(|&t| vec![fmt_sig(t), fmt_sig(p.evaluate(t))])
                    .collect(),
                "t,f",
            )
        }
        PredictConfig::Profile { f0, v0, t, radii } => {
            let p = profile_parabola(*f0, *v0).map_err(|e| CliError::Runtime(e.to_string()))?;
            params.push(("p".into(), p.p));
            params.push(("a".into(), p.a));
            params.push(("t_collapse".into(), p.t_collapse));
            (
                radii
                    .times()
                    .iter()
                    .map(|&r| vec![fmt_sig(r), fmt_sig(p.evaluate(r, *t))])
                    .collect(),
                "r,f",
            )
        }
        PredictConfig::TrajectoryQ1 { f0, c, r_eff, times } => {
            let traj = trajectory_q1(*f0, *c, *r_eff, &times.times())
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            params.push(("c".into(), traj.c));
            params.push(("r_eff".into(), traj.r_eff));
            (
                traj.points
                    .iter()
                    .map(|p| {
                        vec![fmt_sig(p.t), fmt_sig(p.f), if p.collapsed { "1" } else { "0" }.into()]
                    })
                    .collect(),
                "t,f,collapsed",
            )
        }
        PredictConfig::EmpiricalLineQ1 { f0, v0, times } => {
            let law = empirical_line_law_q1(*f0, *v0)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            params.push(("t_zero".into(), law.t_zero));
            params.push(("slope".into(), law.slope));
            let intercept = -law.slope * law.t_zero;
            (
                times
                    .times()
                    .iter()
                    .map(|&t| vec![fmt_sig(t), fmt_sig(intercept + law.slope * t)])
                    .collect(),
                "t,f",
            )
        }
    };
    write(&out, "predict.csv", &csv(header, trace.clone()))?;
    write(
        &out,
        "predict_params.csv",
        &csv(
            "param,value",
            params.into_iter().map(|(k, v)| vec![k, fmt_sig(v)]),
        ),
    )?;
    if cli.emit_svg {
        let pts: Vec<(f64, f64)> = trace
            .iter()
            .filter_map(|row| Some((row[0].parse().ok()?, row[1].parse().ok()?)))
            .collect();
        write(&out, "predict.svg", &svg::polyline_plot("prediction", &[("f", &pts)]))?;
    }
    Ok(())
}

fn cmd_stability(cli: &Cli) -> Result<(), CliError> {
    let spec: StabilityConfig = load_config(&cli.config_path)?;
    let out = OutputDir::new(&cli.out_dir, cli.force).map_err(|e| CliError::Config(e.to_string()))?;
    let mut spectrum_rows: Vec<Vec<String>> = Vec::new();
    for (i, ctx_spec) in spec.contexts.iter().enumerate() {
        let ctx = StabilityContext::new(
            ctx_spec.model.kind(),
            ctx_spec.n,
            ctx_spec.f0,
            ctx_spec.fdot0,
            ctx_spec.dr,
        );
        let matrix = build_linearized_matrix(&ctx).map_err(|e| CliError::Runtime(e.to_string()))?;
        let rows = (0..matrix.order()).flat_map(|r| {
            let matrix = &matrix;
            (r.saturating_sub(1)..(r + 2).min(matrix.order())).map(move |c| {
                vec![r.to_string(), c.to_string(), fmt_sig(matrix.at(r, c))]
            })
        });
        write(&out, &format!("matrix_{i}.csv"), &csv("row,col,value", rows))?;
        let spectrum = eigenvalues(&matrix).map_err(|e| CliError::Runtime(e.to_string()))?;
        for (j, z) in spectrum.eigenvalues.iter().enumerate() {
            spectrum_rows.push(vec![
                i.to_string(),
                ctx_spec.model.kind().name().to_string(),
                ctx_spec.n.to_string(),
                fmt_sig(ctx_spec.f0),
                fmt_sig(ctx_spec.fdot0),
                fmt_sig(ctx_spec.dr),
                j.to_string(),
                fmt_sig(z.re),
                fmt_sig(z.im),
            ]);
        }
    }
    if !spec.contexts.is_empty() {
        write(
            &out,
            "spectrum.csv",
            &csv("context,model,n,f0,fdot0,dr,index,re,im", spectrum_rows),
        )?;
    }
    if let Some(vn) = &spec.von_neumann {
        let mut rows = Vec::new();
        let mut plot: Vec<(f64, f64)> = Vec::new();
        for kappa in vn.kappa.times() {
            let result = von_neumann(&VnQuery {
                model: vn.model.kind(),
                kappa,
                r: vn.r,
                f0: vn.f0,
                dr: vn.dr,
                dt: vn.dt,
            })
            .map_err(|e| CliError::Runtime(e.to_string()))?;
            rows.push(vec![
                fmt_sig(kappa),
                fmt_sig(result.j.re),
                fmt_sig(result.j.im),
                fmt_sig(result.growth_plus),
                fmt_sig(result.growth_minus),
            ]);
            plot.push((kappa, result.growth_plus.max(result.growth_minus)));
        }
        write(&out, "vn.csv", &csv("kappa,re_j,im_j,growth_plus,growth_minus", rows))?;
        if cli.emit_svg {
            write(&out, "vn.svg", &svg::polyline_plot("per-step growth", &[("max |x|", &plot)]))?;
        }
    }
    Ok(())
}

fn cmd_converge(cli: &Cli) -> Result<(), CliError> {
    let spec: ConvergeConfig = load_config(&cli.config_path)?;
    let base = spec.base.build().map_err(CliError::Config)?;
    let probes: Vec<Probe<f64>> = spec
        .probes
        .iter()
        .map(|p| Probe { radius: p.radius, node_offset: p.node_offset, label: p.label.clone() })
        .collect();
    let table = match spec.vary {
        VaryParameter::Dt => {
            refine_time(&base, &spec.values, spec.reference, &probes, spec.t_probe, cli.threads)
        }
        VaryParameter::Dr => {
            refine_space(&base, &spec.values, spec.reference, &probes, spec.t_probe, cli.threads)
        }
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut header = String::from("h");
    for p in &table.probes {
        header.push_str(&format!(",E{}", p.label));
    }
    for p in &table.probes {
        header.push_str(&format!(",q{}", p.label));
    }
    let rows = table.rows.iter().map(|row| {
        let mut cols = vec![fmt_sig(row.h)];
        cols.extend(row.errors.iter().map(|&e| fmt_sig(e)));
        cols.extend(
            row.quotients
                .iter()
                .map(|q| q.map(fmt_sig).unwrap_or_default()),
        );
        cols
    });
    let out = OutputDir::new(&cli.out_dir, cli.force).map_err(|e| CliError::Config(e.to_string()))?;
    write(&out, "table.csv", &csv(&header, rows))?;
    if cli.emit_svg {
        let series: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.h, r.errors[0])).collect();
        write(
            &out,
            "table.svg",
            &svg::polyline_plot("refinement error", &[("E", &series)]),
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_args(&args) {
        Ok(Some(cli)) => cli,
        Ok(None) => {
            print!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            eprint!("{USAGE}");
            return ExitCode::from(e.code());
        }
    };
    let outcome = match cli.command.as_str() {
        "simulate" => cmd_simulate(&cli),
        "fit" => cmd_fit(&cli),
        "predict" => cmd_predict(&cli),
        "stability" => cmd_stability(&cli),
        "converge" => cmd_converge(&cli),
        _ => unreachable!("validated in parse_args"),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
