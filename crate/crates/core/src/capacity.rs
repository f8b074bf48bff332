//! Constant-symbol selection for half-duplex operation.
//!
//! While one user transmits, the idle user sends a fixed symbol. The best
//! symbol is the one maximizing the one-way information the active user can
//! push through the resulting marginal channel,
//! `max_s max_p I(X_active; Y_receiver | X_idle = s)`.

use crate::channel::{Terminal, TwcKernel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMiResult {
    /// Symbol the idle user transmits.
    pub symbol: u8,
    pub mi_bits: f64,
    /// Probability that the active user transmits 1 at the optimum.
    pub input_prob: f64,
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

fn entropy_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

/// `I(X_active; Y_receiver | X_clamped = symbol)` in bits, where the active
/// user sends 1 with probability `input_prob` and the receiver is the
/// clamped terminal.
pub fn conditional_mi(
    kernel: &TwcKernel,
    symbol: u8,
    clamped: Terminal,
    input_prob: f64,
) -> f64 {
    let p = input_prob.clamp(0.0, 1.0);
    let law = |x: u8| -> [f64; 2] {
        let (x1, x2) = match clamped {
            Terminal::Two => (x, symbol),
            Terminal::One => (symbol, x),
        };
        [
            kernel.marginal(clamped, x1, x2, 0),
            kernel.marginal(clamped, x1, x2, 1),
        ]
    };
    let (l0, l1) = (law(0), law(1));
    let out = [
        (1.0 - p) * l0[0] + p * l1[0],
        (1.0 - p) * l0[1] + p * l1[1],
    ];
    let h_cond = (1.0 - p) * entropy_bits(&l0) + p * entropy_bits(&l1);
    (entropy_bits(&out) - h_cond).max(0.0)
}

const GOLDEN_TOL: f64 = 1e-9;

/// Maximizes a concave function on `[0, 1]` by golden-section search.
fn golden_max<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    // endpoints can only win for degenerate (flat) channels
    [(x, f(x)), (0.0, f(0.0)), (1.0, f(1.0))]
        .into_iter()
        .fold((x, f64::NEG_INFINITY), |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        })
}

/// Best constant symbol for the idle user at `clamped`; ties go to symbol 0.
pub fn optimal_constant_symbol(kernel: &TwcKernel, clamped: Terminal) -> ConditionalMiResult {
    let mut best: Option<ConditionalMiResult> = None;
    for symbol in 0..2u8 {
        let (p, mi) = golden_max(|p| conditional_mi(kernel, symbol, clamped, p));
        let cand = ConditionalMiResult {
            symbol,
            mi_bits: mi,
            input_prob: p,
        };
        // strict improvement beyond search tolerance, otherwise keep the lower symbol
        best = match best {
            Some(b) if cand.mi_bits <= b.mi_bits + 1e-12 => Some(b),
            _ => Some(cand),
        };
    }
    best.expect("two candidates evaluated")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelKind, NoisePair};

    fn kernel(kind: ChannelKind, e1: f64, e2: f64) -> TwcKernel {
        TwcKernel::new(kind, NoisePair::new(e1, e2).unwrap()).unwrap()
    }

    fn scan_max(k: &TwcKernel, s: u8, t: Terminal) -> f64 {
        (0..=10_000)
            .map(|i| conditional_mi(k, s, t, i as f64 * 1e-4))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        // -0.1 log2 0.1 - 0.9 log2 0.9
        assert!((binary_entropy(0.1) - 0.468_995_593_589_281).abs() < 1e-12);
    }

    #[test]
    fn bm_clamped_zero_carries_nothing() {
        let k = kernel(ChannelKind::BinaryMultiplying, 0.05, 0.1);
        for p in [0.0, 0.2, 0.5, 0.9] {
            assert!(conditional_mi(&k, 0, Terminal::Two, p).abs() < 1e-15);
        }
    }

    #[test]
    fn bm_noiseless_clamped_one_is_one_bit() {
        let k = kernel(ChannelKind::BinaryMultiplying, 0.0, 0.0);
        assert!((conditional_mi(&k, 1, Terminal::Two, 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ba_bsc_capacity() {
        let k = kernel(ChannelKind::BinaryAdditive, 0.0, 0.10);
        let mi = conditional_mi(&k, 0, Terminal::Two, 0.5);
        assert!((mi - (1.0 - binary_entropy(0.10))).abs() < 1e-12);
        assert!((mi - 0.5310).abs() < 1e-4);
    }

    #[test]
    fn bm_selects_one() {
        for (e1, e2) in [(0.0, 0.0), (0.005, 0.01), (0.05, 0.1), (0.3, 0.45)] {
            let k = kernel(ChannelKind::BinaryMultiplying, e1, e2);
            for t in [Terminal::One, Terminal::Two] {
                let r = optimal_constant_symbol(&k, t);
                assert_eq!(r.symbol, 1);
                let eps = k.noise().at(t);
                assert!((r.mi_bits - (1.0 - binary_entropy(eps))).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ba_tie_prefers_zero() {
        let k = kernel(ChannelKind::BinaryAdditive, 0.01, 0.05);
        let r = optimal_constant_symbol(&k, Terminal::Two);
        assert_eq!(r.symbol, 0);
        assert!((r.mi_bits - (1.0 - binary_entropy(0.05))).abs() < 1e-6);
        assert!((r.input_prob - 0.5).abs() < 1e-4);
        let noiseless = kernel(ChannelKind::BinaryAdditive, 0.0, 0.0);
        let r = optimal_constant_symbol(&noiseless, Terminal::One);
        assert!((r.mi_bits - 1.0).abs() < 1e-12);
        assert!((r.input_prob - 0.5).abs() < 1e-4);
    }

    #[test]
    fn golden_section_agrees_with_grid_scan() {
        for kind in [ChannelKind::BinaryAdditive, ChannelKind::BinaryMultiplying] {
            for (e1, e2) in [(0.0, 0.0), (0.02, 0.2), (0.4, 0.1)] {
                let k = kernel(kind, e1, e2);
                for t in [Terminal::One, Terminal::Two] {
                    for s in 0..2 {
                        let (_, mi) = golden_max(|p| conditional_mi(&k, s, t, p));
                        assert!((mi - scan_max(&k, s, t)).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn ba_mi_invariant_to_clamped_symbol() {
        let k = kernel(ChannelKind::BinaryAdditive, 0.13, 0.27);
        for t in [Terminal::One, Terminal::Two] {
            for i in 0..=20 {
                let p = i as f64 / 20.0;
                let a = conditional_mi(&k, 0, t, p);
                let b = conditional_mi(&k, 1, t, 1.0 - p);
                assert!((a - b).abs() < 1e-12);
            }
            assert!((scan_max(&k, 0, t) - scan_max(&k, 1, t)).abs() < 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mi_is_concave(e1 in 0.0..0.49f64, e2 in 0.0..0.49f64, a in 0.0..1.0f64,
                             b in 0.0..1.0f64, bm in any::<bool>(), s in 0u8..2) {
                let kind = if bm { ChannelKind::BinaryMultiplying } else { ChannelKind::BinaryAdditive };
                let k = kernel(kind, e1, e2);
                for t in [Terminal::One, Terminal::Two] {
                    let mid = conditional_mi(&k, s, t, 0.5 * (a + b));
                    let avg = 0.5 * (conditional_mi(&k, s, t, a) + conditional_mi(&k, s, t, b));
                    prop_assert!(mid >= avg - 1e-12);
                    prop_assert!((0.0..=1.0).contains(&mid));
                }
            }
        }
    }
}
