//! One-dimensional golden-section search.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Minimises a unimodal `f` on `[lo, hi]` until the bracket is narrower than
/// `width_tol` or `max_iter` is reached.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, width_tol: f64, max_iter: usize) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > width_tol && iterations < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // The midpoint can be marginally worse than an interior probe.
    let (x, value) = [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold(
            (x, fx),
            |best, cand| if cand.1 < best.1 { cand } else { best },
        );
    Minimum {
        x,
        value,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let m = golden_section(|x| (x - 0.3).powi(2) + 2.0, -1.0, 2.0, 1e-12, 200);
        assert!((m.x - 0.3).abs() < 1e-6);
        assert!((m.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_bracket_and_edge_minimum() {
        let m = golden_section(|x| x, 1.0, 0.0, 1e-12, 200);
        assert!(m.x < 1e-11);
    }

    #[test]
    fn cosine_minimum() {
        let m = golden_section(f64::cos, 2.0, 4.5, 1e-12, 200);
        assert!((m.x - std::f64::consts::PI).abs() < 1e-6);
        assert!((m.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn iteration_cap() {
        let m = golden_section(|x| x * x, -1.0, 1.0, 0.0, 10);
        assert_eq!(m.iterations, 10);
    }
}
