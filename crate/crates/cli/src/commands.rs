use std::fs;
use std::path::Path;

use detta::experiment::{freeflight as run_freeflight, parse_grid, prepare, sweep as run_sweep};
use detta::metrics::clear::DEFAULT_IOU_THRESHOLD;
use detta::metrics::{clear_scenario, ChannelReport, ChannelSelector, EvalContext};
use detta::pipeline::{run as run_pipeline, RunConfig};
use detta::scenario::{read_scenario, write_scenario, Scenario};
use detta::simgen::{generate, preset, ScenarioSpec};
use detta::{Error, Result};

use crate::output::{float, prepare_dir, write_csv, write_text, Provenance};
use crate::{EvalArgs, FreeflightArgs, Input, RunArgs, SimulateArgs, SweepArgs};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn load_input(input: &Input, seed: u64, prov: &mut Provenance) -> Result<Scenario> {
    match (&input.scenario, &input.preset) {
        (Some(path), _) => {
            prov.scenario = Some(path.display().to_string());
            read_scenario(path)
        }
        (None, Some(name)) => {
            prov.preset = Some(name.clone());
            generate(&preset(name)?, seed)
        }
        (None, None) => Err(Error::Config("give --scenario or --preset".into())),
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_toml(&read_text(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn metric_name(sel: &ChannelSelector) -> &'static str {
    match sel {
        ChannelSelector::Head => "pco",
        ChannelSelector::Joints(..) => "pckh",
    }
}

fn unit(sel: &ChannelSelector) -> &'static str {
    match sel {
        ChannelSelector::Head => "deg",
        ChannelSelector::Joints(..) => "px",
    }
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let mut prov = Provenance::new("simulate", a.common.seed);
    let spec = match (&a.preset, &a.spec) {
        (Some(name), _) => {
            prov.preset = Some(name.clone());
            preset(name)?
        }
        (None, Some(path)) => {
            prov.spec = Some(path.display().to_string());
            ScenarioSpec::from_toml(&read_text(path)?)?
        }
        (None, None) => return Err(Error::Config("give --preset or --spec".into())),
    };
    let s = generate(&spec, a.common.seed)?;
    let dir = &a.common.out;
    prepare_dir(dir)?;
    write_scenario(&s, dir.join("scenario.txt"))?;
    write_text(dir, "spec.toml", &spec.to_toml())?;
    prov.write(dir)?;
    println!(
        "{} frames, {} persons, {} detections -> {}",
        s.frames,
        spec.persons.len(),
        s.detections.len(),
        dir.join("scenario.txt").display()
    );
    Ok(())
}

pub fn run(a: RunArgs) -> Result<()> {
    let mut prov = Provenance::new("run", a.common.seed);
    let config = load_config(a.config.as_deref())?;
    let s = load_input(&a.input, a.common.seed, &mut prov)?;
    let out = run_pipeline(&s, &config)?;

    let dir = &a.common.out;
    prepare_dir(dir)?;
    write_scenario(&out.scenario, dir.join("scenario.txt"))?;
    let t = out.throughput;
    let mut header = vec!["frames", "total_seconds", "effective_hz", "model_hz", "calls", "dropped_observations"];
    let mut row = vec![
        t.frames.to_string(),
        float(t.total_seconds),
        float(t.effective_hz),
        float(t.model_hz),
        t.calls.to_string(),
        out.dropped_observations.to_string(),
    ];
    if let Some(hz) = out.wall_clock_hz {
        header.push("wall_clock_hz");
        row.push(float(hz));
    }
    write_csv(dir, "throughput.csv", &header, &[row])?;
    prov.run = Some(config);
    prov.write(dir)?;
    println!(
        "{} track records, {} attribute records, {:.1} Hz (model {:.1} Hz)",
        out.scenario.tracks.len(),
        out.scenario.attrs.len(),
        t.effective_hz,
        t.model_hz
    );
    if let Some(hz) = out.wall_clock_hz {
        println!("wall clock: {hz:.1} Hz in module calls");
    }
    Ok(())
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    let mut prov = Provenance::new("sweep", a.common.seed);
    let config = load_config(a.config.as_deref())?;
    let selector: ChannelSelector = a.channel.parse()?;
    let g_grid = parse_grid(&a.g_grid)?;
    let h_grid = parse_grid(&a.h_grid)?;
    let s = load_input(&a.input, a.common.seed, &mut prov)?;
    let prepared = prepare(&s, &config)?;
    let result = run_sweep(&prepared, &config, &selector, &g_grid, &h_grid)?;

    let metric = metric_name(&selector);
    let rows: Vec<Vec<String>> = result
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                selector.to_string(),
                float(c.g),
                float(c.h),
                float(c.report.mean_offset),
                float(c.report.score),
                c.report.samples.to_string(),
                u8::from(i == result.best).to_string(),
            ]
        })
        .collect();
    let dir = &a.common.out;
    prepare_dir(dir)?;
    write_csv(dir, "sweep.csv", &["channel", "g", "h", "mean_offset", metric, "samples", "best"], &rows)?;
    prov.parameters.insert("channel".into(), selector.to_string());
    prov.parameters.insert("g_grid".into(), a.g_grid.clone());
    prov.parameters.insert("h_grid".into(), a.h_grid.clone());
    prov.run = Some(config);
    prov.write(dir)?;

    let best = &result.cells[result.best];
    println!("raw {metric} {:.4}, offset {:.3} {}", result.raw.score, result.raw.mean_offset, unit(&selector));
    println!(
        "best g={} h={}: {metric} {:.4}, offset {:.3} {}",
        best.g,
        best.h,
        best.report.score,
        best.report.mean_offset,
        unit(&selector)
    );
    Ok(())
}

pub fn freeflight(a: FreeflightArgs) -> Result<()> {
    let mut prov = Provenance::new("freeflight", a.common.seed);
    let config = load_config(a.config.as_deref())?;
    let selector: ChannelSelector = a.channel.parse()?;
    let s = load_input(&a.input, a.common.seed, &mut prov)?;
    let prepared = prepare(&s, &config)?;
    let rows = run_freeflight(&prepared, &config, &selector, &a.strides, &config.cost)?;

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.stride.to_string(),
                float(r.keep.score),
                float(r.predict.score),
                float(r.keep.mean_offset),
                float(r.predict.mean_offset),
                float(r.model_hz),
                float(r.measured_hz),
            ]
        })
        .collect();
    let dir = &a.common.out;
    prepare_dir(dir)?;
    write_csv(
        dir,
        "freeflight.csv",
        &["stride", "keep", "predict", "keep_offset", "predict_offset", "model_hz", "measured_hz"],
        &csv_rows,
    )?;
    prov.parameters.insert("channel".into(), selector.to_string());
    prov.parameters.insert("strides".into(), a.strides.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
    prov.run = Some(config);
    prov.write(dir)?;

    println!("stride  keep    predict  Hz");
    for r in &rows {
        println!("{:>6}  {:.4}  {:.4}   {:.1}", r.stride, r.keep.score, r.predict.score, r.measured_hz);
    }
    Ok(())
}

fn attr_row(r: &ChannelReport, metric: &str) -> Vec<String> {
    vec![
        r.selector.clone(),
        r.source.to_string(),
        float(r.mean_offset),
        metric.to_string(),
        float(r.score),
        r.samples.to_string(),
    ]
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let mut prov = Provenance::new("eval", a.common.seed);
    prov.scenario = Some(a.scenario.display().to_string());
    let s = read_scenario(&a.scenario)?;
    if s.tracks.is_empty() {
        return Err(Error::Data(format!("{} has no trk records; produce them with `detta run`", a.scenario.display())));
    }
    let dir = &a.common.out;
    prepare_dir(dir)?;
    prov.parameters.insert("iou_threshold".into(), DEFAULT_IOU_THRESHOLD.to_string());
    prov.write(dir)?;

    let outcome = clear_scenario(&s, DEFAULT_IOU_THRESHOLD)?;
    let c = outcome.report;
    write_csv(
        dir,
        "clear.csv",
        &["mota", "motp", "fp", "fn", "ids", "ids_rate", "matches", "total_gt"],
        &[vec![
            float(c.mota),
            float(c.motp),
            c.fp.to_string(),
            c.fn_.to_string(),
            c.ids.to_string(),
            float(c.ids_rate),
            c.matches.to_string(),
            c.total_gt.to_string(),
        ]],
    )?;
    println!(
        "MOTA {:.4}  MOTP {:.4}  FP {}  FN {}  IDS {} ({:.2}%)",
        c.mota,
        c.motp,
        c.fp,
        c.fn_,
        c.ids,
        100.0 * c.ids_rate
    );

    let selectors = ChannelSelector::standard();
    let report = EvalContext::new(&s, &outcome.correspondences)?.evaluate(&s.attrs)?.full_report(&selectors)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let metric = if r.selector == "head" { "pco" } else { "pckh" };
            attr_row(r, metric)
        })
        .collect();
    write_csv(dir, "attributes.csv", &["channel", "source", "mean_offset", "metric", "score", "samples"], &rows)?;
    println!("{:<16} {:<9} {:>10} {:>8} {:>8}", "channel", "source", "offset", "metric", "score");
    for r in &report.rows {
        let metric = if r.selector == "head" { "PCO" } else { "PCKh" };
        println!(
            "{:<16} {:<9} {:>10.3} {:>8} {:>7.2}%",
            r.selector,
            r.source.to_string(),
            r.mean_offset,
            metric,
            100.0 * r.score
        );
    }
    Ok(())
}
