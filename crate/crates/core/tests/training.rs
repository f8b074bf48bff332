use twcq::design::{anneal_full_duplex, anneal_half_duplex, seed_rate};
use twcq::quantizer::{evaluate_distortion, update_codebooks};
use twcq::trainer::{init_from_half_duplex_ba, init_padding_bm, init_uniform, train_full_duplex};
use twcq::{
    ChannelKind, NoisePair, SourceConfig, SourceGrid, Terminal, TrainConfig, TupleKernel,
    TwcKernel,
};

fn grid(rho: f64) -> SourceGrid {
    SourceGrid::build(SourceConfig::with_grid(rho, 8.0, 400)).unwrap()
}

fn schedule() -> Vec<NoisePair> {
    [(0.0, 0.0), (0.005, 0.01), (0.01, 0.05), (0.05, 0.10)]
        .map(|(a, b)| NoisePair::new(a, b).unwrap())
        .to_vec()
}

#[test]
fn padded_start_carries_both_half_duplex_designs() {
    for rho in [0.0, 0.7] {
        let g = grid(rho);
        let cfg = TrainConfig::default();
        let hd = anneal_half_duplex(&g, ChannelKind::BinaryMultiplying, 1, &cfg)
            .unwrap()
            .pop()
            .unwrap();
        let (p1, p2) = init_padding_bm(&hd.user1, &hd.user2).unwrap();
        let kernel = TwcKernel::new(ChannelKind::BinaryMultiplying, NoisePair::NOISELESS).unwrap();
        let ch = TupleKernel::new(&kernel, 2).unwrap();
        let (c1, c2) = update_codebooks(&p1, &p2, &ch, &g).unwrap();
        let start = evaluate_distortion(&p1, &p2, &c1, &c2, &ch, &g).unwrap();
        assert!((start.distortion - hd.report.distortion).abs() < 1e-9, "rho {rho}");
    }
}

#[test]
fn bootstrapped_start_is_bounded_by_the_variances() {
    for (rho, noise) in [(0.0, (0.0, 0.0)), (0.9, (0.01, 0.05)), (-0.4, (0.05, 0.1))] {
        let g = grid(rho);
        let noise = NoisePair::new(noise.0, noise.1).unwrap();
        let cfg = TrainConfig {
            anneal_schedule: vec![noise],
            ..TrainConfig::default()
        };
        let hd = anneal_half_duplex(&g, ChannelKind::BinaryAdditive, 2, &cfg)
            .unwrap()
            .pop()
            .unwrap();
        let (p1, p2) = init_from_half_duplex_ba(&hd.user1, &hd.user2).unwrap();
        let kernel = TwcKernel::new(ChannelKind::BinaryAdditive, noise).unwrap();
        let ch = TupleKernel::new(&kernel, 2).unwrap();
        let (c1, c2) = update_codebooks(&p1, &p2, &ch, &g).unwrap();
        let d = evaluate_distortion(&p1, &p2, &c1, &c2, &ch, &g).unwrap().distortion;
        assert!(d.is_finite() && d <= 2.0);
        // the first full-duplex sweep keeps the start as its baseline
        let fd = train_full_duplex(&g, &kernel, p1, p2, &cfg).unwrap();
        assert!(fd.report.distortion <= d + 1e-12);
    }
}

#[test]
fn exchangeable_setup_trains_identical_users() {
    let g = grid(0.0);
    let kernel = TwcKernel::new(ChannelKind::BinaryAdditive, NoisePair::new(0.02, 0.02).unwrap())
        .unwrap();
    let init = init_uniform(&g, 2).unwrap();
    let sys = train_full_duplex(&g, &kernel, init.clone(), init, &TrainConfig::default()).unwrap();
    assert_eq!(sys.p1, sys.p2);
    assert_eq!(sys.c1, sys.c2);
    let [a, b] = sys.report.user_error;
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn half_duplex_decoders_ignore_local_sample_without_correlation() {
    let g = grid(0.0);
    let cfg = TrainConfig {
        anneal_schedule: schedule(),
        ..TrainConfig::default()
    };
    for kind in [ChannelKind::BinaryAdditive, ChannelKind::BinaryMultiplying] {
        for point in anneal_half_duplex(&g, kind, 2, &cfg).unwrap() {
            let cb = point.user1.codebook(Terminal::Two);
            for y in 0..cb.tuples() {
                let col = cb.column(y);
                let spread = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - col.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(spread < 1e-9, "{kind:?} y {y}: {spread}");
            }
        }
    }
}

#[test]
fn annealed_designs_follow_the_schedule() {
    let g = grid(0.5);
    let cfg = TrainConfig {
        anneal_schedule: schedule(),
        ..TrainConfig::default()
    };
    for kind in [ChannelKind::BinaryAdditive, ChannelKind::BinaryMultiplying] {
        let fd = anneal_full_duplex(&g, kind, 2, &cfg, None).unwrap();
        assert_eq!(fd.len(), 4);
        for (sys, noise) in fd.iter().zip(schedule()) {
            assert_eq!(sys.noise, noise);
            assert_eq!(sys.rate_bits(), 2);
            assert!(sys.iterations() < cfg.max_iters);
            let again = sys.evaluate(&g).unwrap();
            assert!((again.distortion - sys.report.distortion).abs() < 1e-12);
        }
    }
}

#[test]
fn mismatched_seeds_are_rejected() {
    let g = grid(0.0);
    let cfg = TrainConfig {
        anneal_schedule: schedule(),
        ..TrainConfig::default()
    };
    let hd1 = anneal_half_duplex(&g, ChannelKind::BinaryAdditive, 1, &cfg).unwrap();
    // BA seeds must share the full-duplex rate
    assert!(anneal_full_duplex(&g, ChannelKind::BinaryAdditive, 2, &cfg, Some(&hd1)).is_err());
    // and cover every noise point
    assert!(anneal_full_duplex(&g, ChannelKind::BinaryMultiplying, 2, &cfg, Some(&hd1[..2])).is_err());
    assert!(seed_rate(ChannelKind::BinaryMultiplying, 3).is_err());
    assert_eq!(seed_rate(ChannelKind::BinaryAdditive, 3).unwrap(), 3);
}
