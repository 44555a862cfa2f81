//! One function per subcommand. Each reads inputs, calls the library,
//! and writes deterministic artifacts.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use rayon::prelude::*;

use aocc_core::ccc::{aocc_of_stream, sweep as sweep_curves, AoccResult, IntervalGrid};
use aocc_core::denoise::{
    dwf_denoise, oracle_scores, passthrough, threshold_denoise, DwfConfig, ScoredStream,
};
use aocc_core::esr::{esr, EventCountImage};
use aocc_core::frame::accumulate_frame;
use aocc_core::metrics::{confusion, report, roc as roc_curve};
use aocc_core::noise::{inject as inject_noise, NoiseConfig};
use aocc_core::synth::{
    moving_bar, rotating_edge, saturating_stream, MovingBarScene, RotatingEdgeScene,
};
use aocc_core::EventStream;

use crate::stream_files::{load_scores, load_stream, save_stream, write_bytes};
use crate::{
    usage_error, CccArgs, DenoiseArgs, EvalArgs, GridArgs, InjectArgs, MethodArg, PlotArgs,
    RocArgs, SceneKind, SweepArgs, SweepParam, SynthArgs,
};

fn ms_to_us(ms: u64, what: &str) -> Result<u64> {
    ms.checked_mul(1000)
        .with_context(|| format!("{what} of {ms} ms overflows"))
}

fn resolve_grid(args: &GridArgs) -> Result<(IntervalGrid, String)> {
    if let Some(span) = args.grid_us {
        let grid = IntervalGrid::uniform_us(span.start, span.end, span.step)?;
        return Ok((grid, format!("{}:{}:{}", span.start, span.end, span.step)));
    }
    let grid = match args.grid.as_str() {
        "standard" => IntervalGrid::standard(),
        "eventzoom" => IntervalGrid::eventzoom(),
        other => usage_error(&format!(
            "unknown grid preset {other:?} (standard, eventzoom)"
        )),
    };
    Ok((grid, args.grid.clone()))
}

fn scored_stream(
    stream: &EventStream,
    scores: Option<&str>,
    oracle_sigma: Option<f64>,
    oracle_seed: u64,
) -> Result<ScoredStream> {
    match (scores, oracle_sigma) {
        (Some(path), None) => {
            let scores = load_scores(path)?;
            Ok(ScoredStream::new(stream.clone(), scores)?)
        }
        (None, Some(sigma)) => Ok(oracle_scores(stream, sigma, oracle_seed)?),
        _ => usage_error("provide exactly one of --scores and --oracle-sigma"),
    }
}

fn curve_csv(a: &AoccResult, duration_us: u64, events: usize) -> String {
    let mut out = String::new();
    out.push_str("# schema: ccc.v1\n");
    let _ = writeln!(out, "# duration_us={duration_us}");
    let _ = writeln!(out, "# events={events}");
    let _ = writeln!(out, "# aocc_sum={}", a.aocc_sum);
    let _ = writeln!(out, "# aocc_trapezoid={}", a.aocc_trapezoid);
    out.push_str("dt_us,c_avg\n");
    for p in a.curve.points() {
        let _ = writeln!(out, "{},{}", p.dt_us, p.c_avg);
    }
    out
}

pub(crate) fn synth(args: SynthArgs) -> Result<()> {
    let duration = ms_to_us(args.duration_ms, "duration")?;
    let stream = match args.scene {
        SceneKind::Bar => {
            let mut scene = MovingBarScene::new(args.geometry, duration, args.seed);
            scene.traverse_us = ms_to_us(args.traverse_ms, "traverse")?;
            scene.bar_width_px = args.bar_width;
            if let Some(density) = args.density {
                scene.row_density = density;
            }
            if let Some(jitter) = args.jitter_us {
                scene.jitter_us = jitter;
            }
            moving_bar(&scene)?
        }
        SceneKind::Edge => {
            let mut scene = RotatingEdgeScene::new(args.geometry, duration, args.seed);
            scene.rotation_us = ms_to_us(args.rotation_ms, "rotation")?;
            if let Some(density) = args.density {
                scene.density = density;
            }
            if let Some(jitter) = args.jitter_us {
                scene.jitter_us = jitter;
            }
            rotating_edge(&scene)?
        }
        SceneKind::Saturating => {
            saturating_stream(args.geometry, duration, ms_to_us(args.period_ms, "period")?)?
        }
    };
    save_stream(&stream, &args.out.output, args.format)
}

pub(crate) fn inject(args: InjectArgs) -> Result<()> {
    let stream = load_stream(&args.src.input, args.src.format, args.src.geometry)?;
    let mut config = NoiseConfig::new(args.rate, args.seed);
    config.polarity_split = args.polarity_split;
    let noisy = inject_noise(&stream, &config)?;
    save_stream(&noisy, &args.out.output, args.src.format)
}

pub(crate) fn denoise(args: DenoiseArgs) -> Result<()> {
    let stream = load_stream(&args.src.input, args.src.format, args.src.geometry)?;
    let kept = match args.method {
        MethodArg::Passthrough => passthrough(&stream),
        MethodArg::Dwf => dwf_denoise(
            &stream,
            &DwfConfig {
                search_radius: args.radius,
                buffer_size: args.buffer,
                support_count: args.support,
                norm: args.norm.into(),
            },
        )?,
        MethodArg::Threshold => {
            let tau = args.tau.expect("enforced by clap");
            let scored = scored_stream(
                &stream,
                args.scores.as_deref(),
                args.oracle_sigma,
                args.oracle_seed,
            )?;
            threshold_denoise(&scored, tau)?
        }
    };
    save_stream(&kept, &args.out.output, args.src.format)
}

pub(crate) fn eval(args: EvalArgs) -> Result<()> {
    let stream = load_stream(&args.src.input, args.src.format, args.src.geometry)?;
    let mut out = String::new();
    if args.labeled {
        let kept = match &args.kept {
            Some(path) => load_stream(path, None, args.src.geometry)?,
            None => stream.clone(),
        };
        let counts = confusion(&stream, &kept)?;
        let m = report(counts);
        out.push_str("# schema: labeled-metrics.v1\n");
        writeln!(out, "# input_events={}", stream.len())?;
        writeln!(out, "# kept_events={}", kept.len())?;
        out.push_str("tp,fn,tn,fp,nerr,verr,snr_db,acc,tpr,fpr\n");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            counts.true_positives,
            counts.false_negatives,
            counts.true_negatives,
            counts.false_positives,
            m.nerr,
            m.verr,
            m.snr_db,
            m.acc,
            m.tpr,
            m.fpr
        )?;
    } else {
        out.push_str("# schema: esr.v1\n");
        match args.esr_window_ms {
            None => {
                let image = EventCountImage::from_stream(&stream);
                let b = esr(&image, args.esr_m)?;
                writeln!(out, "# esr_m={}", b.reference_count)?;
                out.push_str("ntss,ln,esr\n");
                writeln!(out, "{},{},{}", b.ntss, b.ln, b.esr)?;
            }
            Some(window_ms) => {
                // One row per window holding at least two events, matching
                // the library's windowed mean.
                let window = ms_to_us(window_ms, "window")?;
                let windowed = aocc_core::esr::esr_windowed(&stream, window, args.esr_m)?;
                match args.esr_m {
                    Some(m) => writeln!(out, "# esr_m={m}")?,
                    None => writeln!(out, "# esr_m=auto")?,
                }
                writeln!(out, "# window_us={window}")?;
                writeln!(out, "# windows_used={}", windowed.windows_used)?;
                writeln!(out, "# windows_total={}", windowed.windows_total)?;
                writeln!(out, "# mean_esr={}", windowed.mean_esr)?;
                out.push_str("ntss,ln,esr\n");
                for k in 0..windowed.windows_total {
                    let t0 = stream.t_start() + k * window;
                    let image = EventCountImage::from_window(&stream, t0, t0 + window)?;
                    if image.total_events() < 2 {
                        continue;
                    }
                    let b = esr(&image, args.esr_m)?;
                    writeln!(out, "{},{},{}", b.ntss, b.ln, b.esr)?;
                }
            }
        }
    }
    write_bytes(&args.out.output, out.as_bytes())
}

pub(crate) fn ccc(args: CccArgs) -> Result<()> {
    let stream = load_stream(&args.src.input, args.src.format, args.src.geometry)?;
    let (grid, _) = resolve_grid(&args.grid)?;
    grid.validate_for(&stream)?;
    if let Some(pgm_path) = &args.frame_pgm {
        let (t0, t1) = args.frame_window.expect("enforced by clap");
        let frame = accumulate_frame(&stream, t0, t1)?;
        let mut bytes = Vec::new();
        frame.write_pgm(&mut bytes)?;
        write_bytes(pgm_path, &bytes)?;
    }
    let a = aocc_of_stream(&stream, &grid)?;
    let out = curve_csv(&a, stream.duration_us(), stream.len());
    write_bytes(&args.out.output, out.as_bytes())
}

pub(crate) fn sweep(args: SweepArgs) -> Result<()> {
    let stream = load_stream(&args.src.input, args.src.format, args.src.geometry)?;
    let (grid, grid_name) = resolve_grid(&args.grid)?;
    grid.validate_for(&stream)?;

    // Parameter values both as compute inputs and as display strings.
    let (labels, streams): (Vec<String>, Vec<EventStream>) = match args.param {
        SweepParam::DwfRadius => {
            let radii = args
                .radii
                .values()
                .into_iter()
                .map(|r| u16::try_from(r).with_context(|| format!("radius {r} is too large")))
                .collect::<Result<Vec<u16>>>()?;
            let filtered = radii
                .par_iter()
                .map(|&radius| dwf_denoise(&stream, &DwfConfig::new(radius, args.buffer)))
                .collect::<aocc_core::Result<Vec<_>>>()?;
            (radii.iter().map(u16::to_string).collect(), filtered)
        }
        SweepParam::Threshold => {
            let scored = scored_stream(
                &stream,
                args.scores.as_deref(),
                args.oracle_sigma,
                args.oracle_seed,
            )?;
            let taus = args.taus.values();
            let filtered = taus
                .par_iter()
                .map(|&tau| threshold_denoise(&scored, tau))
                .collect::<aocc_core::Result<Vec<_>>>()?;
            (
                taus.iter().map(|&t| args.taus.format(t)).collect(),
                filtered,
            )
        }
    };

    let entries: Vec<(usize, EventStream)> = streams.into_iter().enumerate().collect();
    let outcome = sweep_curves(&entries, &grid)?;

    if let Some(dir) = &args.curves_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("create {dir}"))?;
        let prefix = match args.param {
            SweepParam::DwfRadius => "radius",
            SweepParam::Threshold => "tau",
        };
        for (i, (_, a)) in outcome.results().iter().enumerate() {
            let path = format!("{dir}/curve_{prefix}_{}.csv", labels[i]);
            let csv = curve_csv(a, stream.duration_us(), entries[i].1.len());
            write_bytes(&path, csv.as_bytes())?;
        }
    }

    let mut out = String::new();
    out.push_str("# schema: sweep.v1\n");
    let param_name = match args.param {
        SweepParam::DwfRadius => "dwf-radius",
        SweepParam::Threshold => "threshold",
    };
    writeln!(out, "# param={param_name}")?;
    if args.param == SweepParam::DwfRadius {
        writeln!(out, "# buffer={}", args.buffer)?;
    }
    writeln!(out, "# grid={grid_name}")?;
    let best = outcome.argmax_index();
    writeln!(out, "# argmax_param={}", labels[best])?;
    writeln!(
        out,
        "# argmax_aocc_sum={}",
        outcome.results()[best].1.aocc_sum
    )?;
    out.push_str("param,aocc_sum,aocc_trapezoid\n");
    for (i, (_, a)) in outcome.results().iter().enumerate() {
        writeln!(out, "{},{},{}", labels[i], a.aocc_sum, a.aocc_trapezoid)?;
    }
    write_bytes(&args.out.output, out.as_bytes())
}

pub(crate) fn roc(args: RocArgs) -> Result<()> {
    let stream = load_stream(&args.src.input, args.src.format, args.src.geometry)?;
    let scored = scored_stream(
        &stream,
        args.scores.as_deref(),
        args.oracle_sigma,
        args.oracle_seed,
    )?;
    let curve = roc_curve(&scored, &args.taus.values())?;
    let mut out = String::new();
    out.push_str("# schema: roc.v1\n");
    writeln!(out, "# auc={}", curve.auc())?;
    out.push_str("threshold,fpr,tpr\n");
    for p in curve.points() {
        writeln!(out, "{},{},{}", p.threshold, p.fpr, p.tpr)?;
    }
    write_bytes(&args.out.output, out.as_bytes())
}

pub(crate) fn plot(args: PlotArgs) -> Result<()> {
    let mut series = Vec::new();
    let mut axis_names: Option<(String, String)> = None;
    for path in &args.input {
        let table = crate::plot::read_table(path)?;
        let x = table.column(args.x_col.as_deref(), 0, path)?;
        let y = table.column(args.y_col.as_deref(), 1, path)?;
        axis_names.get_or_insert_with(|| (table.columns[x].clone(), table.columns[y].clone()));
        series.push(crate::plot::Series {
            name: table.name.clone(),
            points: table
                .rows
                .iter()
                .map(|row| (row[x], row[y]))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect(),
        });
    }
    let (x_label, y_label) = axis_names.unwrap_or_default();
    let svg = crate::plot::render(
        &series,
        &crate::plot::ChartOptions {
            width: args.size.0,
            height: args.size.1,
            title: args.title.clone(),
            x_label,
            y_label,
        },
    )?;
    write_bytes(&args.out.output, svg.as_bytes())
}
