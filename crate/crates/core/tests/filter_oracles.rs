//! Brute-force DFT oracles for the frequency-domain filter.

use eit_fbp_core::fbp::padded_len;
use eit_fbp_core::{filter_gain, filter_projection, FilterKind, Projection, Quantity, SliceGrid};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Gain formulas written out independently of the library.
fn oracle_gain(kind: FilterKind, f: f64) -> f64 {
    match kind {
        FilterKind::RamLak => f,
        FilterKind::SheppLogan => {
            if f == 0.0 {
                0.0
            } else {
                f * (PI * f / 2.0).sin() / (PI * f / 2.0)
            }
        }
        FilterKind::Cosine => f * (PI * f / 2.0).cos(),
        FilterKind::Hamming => f * (0.54 + 0.46 * (PI * f).cos()),
        FilterKind::Hann => f * 0.5 * (1.0 + (PI * f).cos()),
        FilterKind::None => 1.0,
    }
}

fn oracle_response(len: usize, kind: FilterKind) -> Vec<f64> {
    (0..len)
        .map(|k| {
            let folded = k.min(len - k) as f64;
            oracle_gain(kind, folded / (len as f64 / 2.0))
        })
        .collect()
}

/// O(P²) DFT → multiply → inverse DFT, truncated to the input length.
fn dft_filter(values: &[f64], kind: FilterKind) -> Vec<f64> {
    let len = padded_len(values.len());
    let gains = oracle_response(len, kind);
    let mut re = vec![0.0; len];
    let mut im = vec![0.0; len];
    for k in 0..len {
        for (n, &x) in values.iter().enumerate() {
            let phase = -2.0 * PI * (k * n) as f64 / len as f64;
            re[k] += x * phase.cos();
            im[k] += x * phase.sin();
        }
        re[k] *= gains[k];
        im[k] *= gains[k];
    }
    (0..values.len())
        .map(|n| {
            (0..len)
                .map(|k| {
                    let phase = 2.0 * PI * (k * n) as f64 / len as f64;
                    re[k] * phase.cos() - im[k] * phase.sin()
                })
                .sum::<f64>()
                / len as f64
        })
        .collect()
}

/// Direct circular convolution with the inverse-DFT kernel of the response.
fn kernel_filter(values: &[f64], kind: FilterKind) -> Vec<f64> {
    let len = padded_len(values.len());
    let gains = oracle_response(len, kind);
    let kernel: Vec<f64> = (0..len)
        .map(|m| {
            (0..len)
                .map(|k| gains[k] * (2.0 * PI * (k * m) as f64 / len as f64).cos())
                .sum::<f64>()
                / len as f64
        })
        .collect();
    (0..values.len())
        .map(|n| {
            values
                .iter()
                .enumerate()
                .map(|(j, &x)| x * kernel[(n + len - j) % len])
                .sum()
        })
        .collect()
}

fn projection(values: Vec<f64>) -> Projection<f64> {
    let n = values.len();
    Projection {
        values,
        angle: 0.0,
        quantity: Quantity::Conductance,
        grid: SliceGrid::new(n as f64 / 2.0, 1.0),
    }
}

#[test]
fn closed_form_gains() {
    #[rustfmt::skip]
    #[allow(clippy::approx_constant)]
    let table: [(f64, [f64; 5]); 5] = [
        (0.0,  [0.0, 0.0, 0.0, 0.0, 0.0]),
        (0.25, [0.25, 0.24362383960110817, 0.23096988312782168, 0.216317279836453, 0.21338834764831843]),
        (0.5,  [0.5, 0.45015815807855303, 0.3535533905932738, 0.27, 0.25]),
        (0.75, [0.75, 0.5881599776824028, 0.2870125742738174, 0.16104816049064116, 0.1098349570550447]),
        (1.0,  [1.0, 0.6366197723675814, 0.0, 0.08, 0.0]),
    ];
    for (f, expected) in table {
        for (kind, want) in FilterKind::RAMPS.into_iter().zip(expected) {
            let got = filter_gain(kind, f).unwrap();
            assert!((got - want).abs() < 1e-12, "{kind:?} at {f}: {got} vs {want}");
        }
    }
}

#[test]
fn impulse_matches_dft() {
    for n in [16usize, 33, 64, 80] {
        let mut values = vec![0.0; n];
        values[n / 2] = 1.0;
        for kind in FilterKind::RAMPS {
            let fast = filter_projection(&projection(values.clone()), kind).values;
            let slow = dft_filter(&values, kind);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9, "{kind:?} n={n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn ramlak_impulse_response_shape() {
    // the ramp's impulse response is positive at the center and negative
    // at the immediate neighbours
    let mut values = vec![0.0; 32];
    values[16] = 1.0;
    let out = filter_projection(&projection(values), FilterKind::RamLak).values;
    assert!(out[16] > 0.0);
    assert!(out[15] < 0.0 && out[17] < 0.0);
    assert!((out[15] - out[17]).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fft_matches_direct_convolution(values in prop::collection::vec(-10.0f64..10.0, 1..=64), k in 0usize..5) {
        let kind = FilterKind::RAMPS[k];
        let fast = filter_projection(&projection(values.clone()), kind).values;
        let slow = kernel_filter(&values, kind);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-9, "{:?}: {} vs {}", kind, a, b);
        }
    }
}

#[test]
fn smoother_filters_attenuate_more() {
    // Hann ≤ Hamming ≤ Cosine ≤ SheppLogan ≤ RamLak holds up to the
    // Hamming/Cosine crossover at f ≈ 0.94457; past it Hamming's 0.08
    // floor exceeds the cosine window.
    let crossover = 2.0 * (0.16f64 / 1.84).acos() / PI;
    assert!((crossover - 0.944_57).abs() < 1e-5);
    for i in 1..1000 {
        let f = i as f64 / 1000.0;
        let g = |k| filter_gain(k, f).unwrap();
        let (hann, hamming, cosine, shepp, ramp) = (
            g(FilterKind::Hann),
            g(FilterKind::Hamming),
            g(FilterKind::Cosine),
            g(FilterKind::SheppLogan),
            g(FilterKind::RamLak),
        );
        assert!(hann <= hamming + 1e-15, "f={f}");
        assert!(cosine <= shepp + 1e-15, "f={f}");
        assert!(shepp <= ramp + 1e-15, "f={f}");
        if f < crossover {
            assert!(hamming <= cosine + 1e-15, "f={f}");
        } else {
            assert!(hamming > cosine, "f={f}");
        }
    }
}
