//! Composite 8-point Gauss–Legendre quadrature.

use num_complex::Complex64;

use crate::sum::{ComplexSum, NeumaierSum};

/// Positive nodes of the 8-point Gauss–Legendre rule on `[-1, 1]`.
pub const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

/// Weights paired with [`GL8_NODES`].
pub const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Nodes per panel.
pub const GL8_POINTS: usize = 8;

/// Minimum quadrature nodes per oscillation period of an integrand.
pub const NODES_PER_PERIOD: f64 = 50.0;

/// Panels needed to put [`NODES_PER_PERIOD`] nodes on each of `cycles`
/// oscillations, never fewer than `min_panels`.
pub fn panels_for_cycles(cycles: f64, min_panels: usize) -> usize {
    let need = (cycles.abs() * NODES_PER_PERIOD / GL8_POINTS as f64).ceil();
    if need.is_finite() {
        (need as usize).max(min_panels)
    } else {
        min_panels
    }
}

/// Calls `visit(x, w)` for every node of `panels` equal panels on `[a, b]`.
#[inline]
pub fn for_each_node(a: f64, b: f64, panels: usize, mut visit: impl FnMut(f64, f64)) {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let half = 0.5 * h;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            visit(mid - half * x, half * w);
            visit(mid + half * x, half * w);
        }
    }
}

/// `∫_a^b f` with `panels` equal Gauss–Legendre panels.
pub fn integrate(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut acc = NeumaierSum::new();
    for_each_node(a, b, panels, |x, w| acc.add(w * f(x)));
    acc.value()
}

/// Complex-valued counterpart of [`integrate`].
pub fn integrate_complex(
    a: f64,
    b: f64,
    panels: usize,
    mut f: impl FnMut(f64) -> Complex64,
) -> Complex64 {
    let mut acc = ComplexSum::new();
    for_each_node(a, b, panels, |x, w| acc.add(f(x) * w));
    acc.value()
}
