use agsgr_core::abpr::{train, AdamConfig, ModelConfig, DEFAULT_NEG_RATIO};
use agsgr_core::pipeline::{new_model, training_set, Recommender};
use agsgr_core::synth::{planted, PlantedConfig};
use agsgr_core::Query;

#[test]
fn planted_group_is_recovered() {
    let mut ok = 0;
    for seed in 0..3 {
        let d = planted(&PlantedConfig { seed, ..PlantedConfig::default() });
        let set = training_set(&d.network, &d.events, None, DEFAULT_NEG_RATIO, seed);
        let mut model = new_model(&d.network, &ModelConfig { dim: 16, seed, ..ModelConfig::default() });
        train(&mut model, &set, &AdamConfig { epochs: 100, ..AdamConfig::default() }).unwrap();
        let r = Recommender::new(&d.network, model, None);
        let rec = r.recommend(&Query::new(d.target, 5, 3, 5).unwrap()).unwrap();
        let hit = rec.group.iter().filter(|u| d.group.contains(u)).count() as f64 / 5.0;
        let good = hit >= 0.9 && rec.topic == d.topic && rec.locations.ranked.first().map(|r| r.0) == Some(d.poi);
        ok += good as usize;
    }
    assert_eq!(ok, 3);
}
