use std::collections::{BTreeMap, BTreeSet};

use metrohaul::demo::demo_topology;
use metrohaul::optical::{
    assign_channel, evaluate_feasibility, route_path, ChannelState, FormatCatalog, FormatName, ImpairmentParams,
    OpticalConfig, OpticalNetwork, SpectrumState,
};
use metrohaul::topology::{load_topology, Topology};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Line of `n` nodes with random amplifier variants, blockers and spans.
fn random_line(rng: &mut ChaCha8Rng, n: usize) -> Topology {
    let nodes: Vec<_> = (0..n)
        .map(|i| {
            let mcen = i == 0 || i == n - 1;
            json!({
                "id": format!("N{i:02}"),
                "kind": if mcen { "MCEN" } else { "AMEN" },
                "amp_variant": if rng.random_bool(0.3) { "SOA_LOSSLESS" } else { "EDFA" },
                "has_blocker": rng.random_bool(0.6),
                "transponders": [{"vendor": "B"}],
            })
        })
        .collect();
    let spans: Vec<_> = (1..n)
        .map(|i| {
            json!({"id": format!("S{i:02}"), "a": format!("N{:02}", i - 1), "z": format!("N{i:02}"),
                   "length_km": rng.random_range(20.0..200.0),
                   "loss_coeff_db_per_km": rng.random_range(0.18..0.3)})
        })
        .collect();
    load_topology(&json!({"nodes": nodes, "spans": spans}).to_string()).unwrap()
}

/// Every ACTIVE channel, checked pairwise from the channel records alone.
fn assert_no_overlap(net: &OpticalNetwork) {
    let mut owner: BTreeMap<(usize, usize), &str> = BTreeMap::new();
    for c in net.channels().values().filter(|c| c.state == ChannelState::Active) {
        for s in c.path.segments(net.topology()) {
            if let Some(other) = owner.insert((s, c.channel_index), &c.id) {
                panic!("{} and {} share index {} on segment {s}", other, c.id, c.channel_index);
            }
        }
    }
    let occupied: usize = (0..net.spectrum().segment_count()).map(|s| net.spectrum().occupied(s).len()).sum();
    assert_eq!(occupied, owner.len());
}

#[test]
fn spectrum_safety_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut net = OpticalNetwork::new(demo_topology(), OpticalConfig::default()).unwrap();
    let ids: Vec<_> = net.topology().nodes().iter().map(|n| n.id.clone()).collect();
    let mut live: Vec<String> = Vec::new();
    for _ in 0..3000 {
        if !live.is_empty() && rng.random_bool(0.4) {
            let id = live.swap_remove(rng.random_range(0..live.len()));
            net.release_media_channel(&id).unwrap();
        } else {
            let a = &ids[rng.random_range(0..ids.len())];
            let z = &ids[rng.random_range(0..ids.len())];
            if let Ok(c) = net.provision_media_channel(a, z, FormatName::DpQpsk, 0.0) {
                live.push(c.id);
            }
        }
        assert_no_overlap(&net);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn first_fit_is_lowest_free_index(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let segments = rng.random_range(1..6);
        let channels = rng.random_range(1..20);
        let density = rng.random_range(0.0..1.0);
        let mut state = SpectrumState::new(segments, channels);
        for s in 0..segments {
            for c in 0..channels {
                if rng.random_bool(density) {
                    state.set_occupied(s, c);
                }
            }
        }
        let touched: BTreeSet<usize> = (0..segments).filter(|_| rng.random_bool(0.5)).collect();
        let brute = (0..channels).find(|&c| touched.iter().all(|&s| !state.occupied(s).contains(&c)));
        match assign_channel(&state, &touched) {
            Ok(c) => prop_assert_eq!(Some(c), brute),
            Err(e) => {
                prop_assert_eq!(e.code(), "OPTICAL_BLOCKED");
                prop_assert_eq!(brute, None);
            }
        }
    }

    #[test]
    fn osnr_never_improves_with_length(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..10);
        let topo = random_line(&mut rng, n);
        let params = ImpairmentParams::<f64>::default();
        let formats = FormatCatalog::<f64>::default();
        let launch = rng.random_range(-3.0..3.0);
        let first = topo.nodes()[0].id.clone();
        let mut prev = f64::INFINITY;
        for k in 1..n {
            let path = route_path(&topo, &first, &topo.nodes()[k].id).unwrap();
            let reports: Vec<_> = formats.iter().map(|f| evaluate_feasibility(&topo, &path, f, launch, &params)).collect();
            let osnr = reports[0].osnr_db;
            prop_assert!(osnr <= prev, "OSNR rose from {} to {}", prev, osnr);
            prev = osnr;
            // QPSK ⊇ 16QAM ⊇ 64QAM
            for w in reports.windows(2) {
                prop_assert!(w[0].feasible || !w[1].feasible);
            }
        }
    }
}

#[test]
fn single_span_budget_in_f32() {
    let topo = load_topology(
        r#"{"nodes":[{"id":"M1","kind":"MCEN"},{"id":"M2","kind":"MCEN"}],
            "spans":[{"id":"S1","a":"M1","z":"M2","length_km":80}]}"#,
    )
    .unwrap();
    let path = route_path(&topo, &"M1".into(), &"M2".into()).unwrap();
    let formats = FormatCatalog::<f32>::default();
    let r = evaluate_feasibility(
        &topo,
        &path,
        formats.get(FormatName::DpQpsk),
        0.0f32,
        &ImpairmentParams::<f32>::default(),
    );
    // 58 - (16 + 3.5 + 7) - 5.5
    assert!((r.osnr_db - 26.0).abs() < 0.01, "{}", r.osnr_db);
    assert!(r.feasible);
}
