use isac_fusion::fusion::fuse;
use isac_fusion::{synthesize_echo, FusionSettings, OfdmConfigF32, RangeDopplerSearch, ScenarioF32, SearchGridF32, Vec2};

#[test]
fn single_precision_pipeline_recovers_on_node_scene() {
    let cfg = OfdmConfigF32::standard();
    let search = RangeDopplerSearch::new(SearchGridF32::standard(), cfg).unwrap();
    let sc = ScenarioF32::new(
        vec![Vec2::new(200.0, 0.0), Vec2::new(-120.0, 160.0), Vec2::new(0.0, -150.0)],
        Vec2::new(0.0, 0.0),
        Vec2::new(10.0, -5.0),
        5,
    );
    for noiseless in [true, false] {
        let reports: Vec<_> = (0..3)
            .map(|w| search.report(&synthesize_echo(&cfg, &sc, w, -5.0, noiseless).unwrap()).unwrap())
            .collect();
        for (w, r) in reports.iter().enumerate() {
            assert!((r.range - sc.range(w).unwrap()).abs() <= 0.5, "station {w}: {}", r.range);
        }
        let (loc, vel) = fuse(&reports, &sc.stations, &cfg, &FusionSettings::standard()).unwrap();
        assert!(loc.position.norm() <= 0.1, "{:?}", loc.position);
        assert!((vel.velocity - sc.target_velocity).norm() <= 0.1, "{:?}", vel.velocity);
    }
}
