//! Quadrature rules and one-dimensional search utilities.
//!
//! Gauss-Legendre nodes are generated by Newton iteration on the Legendre
//! recurrence, composite panels support integrands with known breakpoints
//! (cutoff supports), and golden-section search polishes extrema found by
//! sampling.

/// A one-dimensional quadrature rule: nodes and weights on some interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self.nodes.iter().map(|&x| f(x)).collect();
        dot(&vals, &self.weights)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Ordered (sequential) dot product so parallel callers that collect values
/// in node order reduce to bit-identical sums regardless of worker count.
pub fn dot(values: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let mut acc = 0.0;
    for (v, w) in values.iter().zip(weights) {
        acc += v * w;
    }
    acc
}

/// Gauss-Legendre rule with `n` nodes on [-1, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Rule {
    let base = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    Rule {
        nodes: base.nodes.iter().map(|&x| mid + half * x).collect(),
        weights: base.weights.iter().map(|&w| w * half).collect(),
    }
}

/// Composite Gauss-Legendre over consecutive panels `[x_0, x_1, ..., x_k]`,
/// distributing roughly `n` nodes proportionally to panel length with a
/// minimum of 4 per panel. Breakpoints let the radial rule stay exact across
/// the joins of piecewise-polynomial cutoffs.
pub fn gauss_legendre_panels(n: usize, breakpoints: &[f64]) -> Rule {
    assert!(breakpoints.len() >= 2);
    let total: f64 = breakpoints.windows(2).map(|w| w[1] - w[0]).sum();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breakpoints.windows(2) {
        let frac = (w[1] - w[0]) / total;
        let k = ((n as f64 * frac).round() as usize).max(4);
        let rule = gauss_legendre_on(k, w[0], w[1]);
        nodes.extend(rule.nodes);
        weights.extend(rule.weights);
    }
    Rule { nodes, weights }
}

/// Tensor-product rule on the unit disc in polar coordinates.
/// Weights carry the Jacobian r, so summing `f(x, y) * w` integrates over D.
#[derive(Debug, Clone)]
pub struct DiscRule {
    /// (x, y, r, theta) per node.
    pub nodes: Vec<(f64, f64, f64, f64)>,
    pub weights: Vec<f64>,
}

impl DiscRule {
    /// `radial_breaks` must start at 0 and end at 1.
    pub fn new(radial: usize, angular: usize, radial_breaks: &[f64]) -> Self {
        let r_rule = gauss_legendre_panels(radial, radial_breaks);
        let a_rule = gauss_legendre_on(angular, 0.0, 2.0 * std::f64::consts::PI);
        let mut nodes = Vec::with_capacity(r_rule.len() * a_rule.len());
        let mut weights = Vec::with_capacity(r_rule.len() * a_rule.len());
        for (&r, &wr) in r_rule.nodes.iter().zip(&r_rule.weights) {
            for (&th, &wa) in a_rule.nodes.iter().zip(&a_rule.weights) {
                nodes.push((r * th.cos(), r * th.sin(), r, th));
                weights.push(wr * wa * r);
            }
        }
        DiscRule { nodes, weights }
    }

    pub fn plain(radial: usize, angular: usize) -> Self {
        Self::new(radial, angular, &[0.0, 1.0])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of 1 over D, used as a sanity check (= pi).
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Golden-section search for the maximum of `f` on [a, b].
/// Returns (argmax, max, width of the final bracket).
pub fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x), hi - lo)
}

/// Central difference with one Richardson step: O(h^4) for smooth f.
pub fn richardson_derivative(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    let d_h = (f(x + h) - f(x - h)) / (2.0 * h);
    let d_h2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    (4.0 * d_h2 - d_h) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre_on(8, 0.0, 1.0);
        // degree 15 is the highest exact degree for 8 nodes
        let exact = 1.0 / 16.0;
        assert_relative_eq!(rule.integrate(|x| x.powi(15)), exact, max_relative = 1e-13);
    }

    #[test]
    fn gauss_legendre_smooth_convergence() {
        let rule = gauss_legendre_on(24, 0.0, 1.0);
        let val = rule.integrate(|x| (2.0 * std::f64::consts::PI * x).cos().exp());
        // I_0(1) = (1/2pi) * int exp(cos) over a period, scaled
        let bessel_i0_1 = 1.266_065_877_752_008_3;
        assert_relative_eq!(val, bessel_i0_1, max_relative = 1e-12);
    }

    #[test]
    fn disc_rule_mass_is_pi() {
        let rule = DiscRule::plain(16, 32);
        assert_relative_eq!(rule.mass(), std::f64::consts::PI, max_relative = 1e-12);
        let paneled = DiscRule::new(24, 32, &[0.0, 0.1, 0.9, 1.0]);
        assert_relative_eq!(paneled.mass(), std::f64::consts::PI, max_relative = 1e-12);
    }

    #[test]
    fn golden_finds_cosine_peak() {
        // the argmax is only sqrt(eps)-determined on a flat peak; the value
        // is machine-accurate
        let (x, v, _) = golden_max(|x| (x - 0.3).cos(), -1.0, 1.0, 60);
        assert_relative_eq!(x, 0.3, epsilon = 1e-7);
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn richardson_matches_analytic_derivative() {
        let d = richardson_derivative(|x| x.sin(), 0.7, 1e-3);
        assert_relative_eq!(d, 0.7f64.cos(), epsilon = 1e-12);
    }
}
