use std::path::PathBuf;

use ranplan::capacity::CapacityReport;
use ranplan::measure::{parse_csv, summarize, Ingested};
use ranplan::placement::{export_heatmap, sweep_attenuation, PlacementProblem};
use ranplan::raytrace::build_channel_matrix;
use ranplan::slotsim::{run, run_threaded, MessageKind};
use ranplan::Scenario;

fn lab() -> Scenario {
    Scenario::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/lab.toml")).unwrap()
}

#[test]
fn lab_plan_end_to_end() {
    let s = lab();
    let scene = s.load_scene().unwrap();
    let (ru, ue) = (s.ru_points().unwrap(), s.ue_points().unwrap());
    let channel = build_channel_matrix(&scene, &ru, &ue, &s.trace).unwrap();
    assert_eq!((channel.n_tx(), channel.n_rx()), (24, 52));
    assert!(channel.entries().iter().all(|e| e.path_loss.is_finite()));

    let problem = PlacementProblem {
        channel: &channel,
        ru: s.ru,
        ue: s.ue,
        noise: s.noise,
        options: s.placement,
    };
    let sweep = sweep_attenuation(&problem, &s.attenuation_sweep).unwrap();
    assert_eq!(sweep.len(), 6);
    // frozen from the committed lab scene
    assert_eq!(sweep[0].best.deployment.ru_indices(), &[7, 21]);
    assert!((sweep[0].best.score_db - 16.29).abs() < 0.01, "{}", sweep[0].best.score_db);
    assert!((sweep[5].best.score_db - 11.53).abs() < 0.01, "{}", sweep[5].best.score_db);

    let heat = export_heatmap(&sweep[0].table, 24, true).unwrap();
    let (a, b) = (7, 21);
    assert_eq!(heat.get(a, b), Some(1.0));
    assert_eq!(heat.get(b, a), Some(1.0));
    assert_eq!(heat.get(a, a), None);
}

#[test]
fn lab_capacity_and_simulation_agree() {
    let s = lab();
    let cap = CapacityReport::compute(&s.carrier, &s.tdd, &s.link, &s.harq).unwrap();
    let cfg = s.sim_config();
    let out = run(&cfg).unwrap();
    assert_eq!(out.stats.slots, 10_000);
    assert!((out.stats.dl_bps / cap.rate.dl_bps - 1.0).abs() < 1e-5);
    assert!((out.stats.ul_bps / cap.rate.ul_bps - 1.0).abs() < 1e-2);
    assert_eq!(out.stats.deadline_misses, 0);
    assert_eq!(out.stats.error_indications, 0);
    assert_eq!(out.trace.count(MessageKind::ErrorIndication), 0);
    assert_eq!(run_threaded(&cfg).unwrap().trace, out.trace);
}

#[test]
fn measurement_csvs_summarize() {
    let series = parse_csv("timestamp,value\n0,10\n1,12\n2,11\n3,13\n", "tput", "t.csv".as_ref()).unwrap();
    let row = summarize("tput", &series).unwrap();
    assert_eq!(row.mean, 11.5);
    assert!(row.ci_lo < 11.5 && row.ci_hi > 11.5);

    let video = "event,start,duration,value\nsession,0,200\nsegment,0,4,5.5\nstall,10,6\nsegment,4,4,3.0\nstall,50,4\n";
    let data = parse_csv(video, "v", "v.csv".as_ref()).unwrap();
    let Ingested::Session(ref s) = data else { panic!("not a session") };
    assert_eq!(s.bitrate_samples(), &[5.5, 3.0]);
    let row = summarize("v", &data).unwrap();
    assert_eq!(row.label, "v:rebuffer_ratio");
    assert_eq!(row.mean, 0.05);
}
