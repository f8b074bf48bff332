use twcq_wasm::{best_idle_symbol, mi_curve, Design};

#[test]
fn half_duplex_design_uses_all_indices_and_flat_decoders() {
    let d = Design::new("bm", false, 0.0, 2, 0.0, 0.0, 200).unwrap();
    assert_eq!(d.rate(), 2);
    assert_eq!(d.centers().len(), 200);
    let mut used: Vec<u32> = d.partition(1).unwrap();
    used.sort();
    used.dedup();
    assert_eq!(used, vec![0, 1, 2, 3]);
    for y in 0..4 {
        let col = d.codebook(2, y).unwrap();
        let spread = col.iter().cloned().fold(f64::MIN, f64::max) - col.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-9);
    }
    assert!(d.codebook(2, 4).is_err());
    assert!(d.partition(3).is_err());
}

#[test]
fn full_duplex_design_beats_matched_half_duplex() {
    for channel in ["ba", "bm"] {
        let half = Design::new(channel, false, 0.5, 1, 0.01, 0.05, 200).unwrap();
        let full = Design::new(channel, true, 0.5, 2, 0.01, 0.05, 200).unwrap();
        assert!(full.sdr_db() >= half.sdr_db() - 0.05, "{channel}");
        assert!(full.iterations() >= 1);
    }
}

#[test]
fn simulation_tracks_analytic_distortion() {
    for full in [false, true] {
        let d = Design::new("ba", full, 0.9, 2, 0.02, 0.02, 300).unwrap();
        let sim = d.simulate(200_000, 5).unwrap();
        assert!((sim.distortion - d.distortion()).abs() < 0.02 * d.distortion(), "{full}");
        assert_eq!(d.simulate(200_000, 5).unwrap().sdr_db, sim.sdr_db);
    }
    let d = Design::new("ba", true, 0.0, 1, 0.0, 0.0, 50).unwrap();
    assert!(d.simulate(0, 1).is_err());
}

#[test]
fn bad_arguments_are_reported() {
    assert!(Design::new("bsc", true, 0.0, 2, 0.0, 0.0, 100).is_err());
    assert!(Design::new("bm", true, 0.0, 3, 0.0, 0.0, 100).is_err());
    assert!(Design::new("ba", true, 1.0, 2, 0.0, 0.0, 100).is_err());
    assert!(Design::new("ba", true, 0.0, 2, 0.5, 0.0, 100).is_err());
    assert!(Design::new("ba", true, 0.0, 9, 0.0, 0.0, 100).is_err());
    assert!(mi_curve("ba", 0.1, 0.1, 1, 2, 10).is_err());
}

#[test]
fn mi_curve_peaks_at_reported_optimum() {
    for (channel, eps) in [("ba", (0.05, 0.1)), ("bm", (0.05, 0.1)), ("bm", (0.0, 0.0))] {
        for idle in [1, 2] {
            let best = best_idle_symbol(channel, eps.0, eps.1, idle).unwrap();
            let (symbol, mi) = (best[0] as u8, best[1]);
            for s in 0..2 {
                let curve = mi_curve(channel, eps.0, eps.1, idle, s, 101).unwrap();
                assert_eq!(curve.len(), 101);
                assert!(curve.iter().all(|&v| v <= mi + 1e-9));
                assert!(curve[0].abs() < 1e-12 && curve[100].abs() < 1e-12);
            }
            let peak = mi_curve(channel, eps.0, eps.1, idle, symbol, 101)
                .unwrap()
                .into_iter()
                .fold(0.0, f64::max);
            assert!(mi - peak < 1e-3);
        }
    }
    // BM idle symbol 0 blocks the channel entirely
    assert!(mi_curve("bm", 0.0, 0.0, 2, 0, 11).unwrap().iter().all(|&v| v < 1e-12));
    assert_eq!(best_idle_symbol("bm", 0.0, 0.0, 2).unwrap()[0], 1.0);
}
