use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use ranplan::capacity::CapacityReport;
use ranplan::measure::{ingest_csv, summarize, write_stats_csv};
use ranplan::placement::{export_heatmap, format_best_table, sweep_attenuation, PlacementProblem};
use ranplan::raytrace::build_channel_matrix;
use ranplan::scene::validate_scene;
use ranplan::slotsim::{export_pcap, simulate};
use ranplan::Scenario;

use crate::Command;

pub fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Plan {
            scenario,
            out,
            attenuation_sweep,
            combine,
        } => {
            let mut s = load(scenario.scenario.as_deref())?;
            if let Some(v) = attenuation_sweep {
                s.attenuation_sweep = v;
            }
            if let Some(c) = combine {
                s.trace.combine_mode = c;
            }
            s.validate()?;
            plan(&s, &out)
        }
        Command::Capacity { scenario, kv } => capacity(&load(scenario.scenario.as_deref())?, kv),
        Command::Simulate { scenario, out, seed } => {
            let mut s = load(scenario.scenario.as_deref())?;
            if let Some(seed) = seed {
                s.sim.seed = seed;
            }
            run_simulation(&s, &out)
        }
        Command::Analyze { inputs, out } => analyze(&inputs, out.as_deref()),
    }
}

fn load(path: Option<&Path>) -> Result<Scenario> {
    match path {
        Some(p) => Ok(Scenario::load(p)?),
        None => Ok(Scenario::default()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_file(path: PathBuf, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(&path)?;
    f(&mut w)
        .and_then(|()| w.flush())
        .with_context(|| format!("cannot write {}", path.display()))
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn att_tag(a: f64) -> String {
    format!("{a}").replace('.', "p")
}

fn plan(s: &Scenario, out: &Path) -> Result<()> {
    let scene = s.load_scene()?;
    for d in validate_scene(&scene) {
        warn!("scene facet {}: {:?}", d.facet, d.kind);
    }
    let ru = s.ru_points()?;
    let ue = s.ue_points()?;
    if ru.len() < 2 {
        anyhow::bail!(ranplan::Error::Config("need >= 2 locations for pair search".into()));
    }
    info!("tracing {} x {} links over {} facets", ru.len(), ue.len(), scene.facets.len());
    let channel = build_channel_matrix(&scene, &ru, &ue, &s.trace)?;
    let problem = PlacementProblem {
        channel: &channel,
        ru: s.ru,
        ue: s.ue,
        noise: s.noise,
        options: s.placement,
    };
    let sweep = sweep_attenuation(&problem, &s.attenuation_sweep)?;

    out_dir(out)?;
    write_file(out.join("channel.csv"), |w| channel.write_csv(w))?;
    for p in &sweep {
        let tag = att_tag(p.attenuation_db);
        write_file(out.join(format!("scores_{tag}dB.csv")), |w| p.table.write_csv(w))?;
        let heat = export_heatmap(&p.table, ru.len(), false)?;
        write_file(out.join(format!("heatmap_{tag}dB.csv")), |w| heat.write_csv(w))?;
        let norm = export_heatmap(&p.table, ru.len(), true)?;
        write_file(out.join(format!("heatmap_{tag}dB_norm.csv")), |w| norm.write_csv(w))?;
    }
    let table = format_best_table(&sweep);
    write_file(out.join("best_pairs.txt"), |w| w.write_all(table.as_bytes()))?;
    print!("{table}");
    Ok(())
}

fn capacity(s: &Scenario, kv: bool) -> Result<()> {
    let r = CapacityReport::compute(&s.carrier, &s.tdd, &s.link, &s.harq)?;
    print!("{}", if kv { r.to_kv() } else { r.to_table() });
    Ok(())
}

fn run_simulation(s: &Scenario, out: &Path) -> Result<()> {
    let result = simulate(&s.sim_config())?;
    out_dir(out)?;
    export_pcap(&result.trace, &out.join("trace.pcap"))?;
    let table = result.stats.to_table();
    write_file(out.join("stats.txt"), |w| w.write_all(table.as_bytes()))?;
    print!("{table}");
    Ok(())
}

fn analyze(inputs: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let mut rows = Vec::with_capacity(inputs.len());
    for path in inputs {
        let data = ingest_csv(path)?;
        let label = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        rows.push(summarize(&label, &data)?);
    }
    match out {
        Some(dir) => {
            out_dir(dir)?;
            write_file(dir.join("stats.csv"), |w| write_stats_csv(&rows, w))
        }
        None => Ok(write_stats_csv(&rows, std::io::stdout().lock())?),
    }
}
