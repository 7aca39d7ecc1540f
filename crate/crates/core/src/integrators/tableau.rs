//! Fehlberg's six-stage tableau, fourth-order weight row.

/// Exact rational coefficient, converted to `f64` once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

const fn r(num: i64, den: i64) -> Ratio {
    Ratio { num, den }
}

impl Ratio {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Stage coefficients `b_ij` (rows 2..=6) and output weights `c_j`.
pub const FEHLBERG_STAGES: [&[Ratio]; 5] = [
    &[r(1, 4)],
    &[r(3, 32), r(9, 32)],
    &[r(1932, 2197), r(-7200, 2197), r(7296, 2197)],
    &[r(439, 216), r(-8, 1), r(3680, 513), r(-845, 4104)],
    &[r(-8, 27), r(2, 1), r(-3544, 2565), r(1859, 4104), r(-11, 40)],
];

pub const FEHLBERG_WEIGHTS: [Ratio; 6] = [
    r(25, 216),
    r(0, 1),
    r(1408, 2565),
    r(2197, 4104),
    r(-1, 5),
    r(0, 1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Rkf45Tableau {
    stages: [Vec<f64>; 5],
    weights: [f64; 6],
}

impl Rkf45Tableau {
    pub fn fehlberg() -> Self {
        Self {
            stages: std::array::from_fn(|i| FEHLBERG_STAGES[i].iter().map(|c| c.to_f64()).collect()),
            weights: FEHLBERG_WEIGHTS.map(Ratio::to_f64),
        }
    }

    /// Coefficients feeding stage `stage` (0-based, 1..=5) from earlier stages.
    pub fn stage_row(&self, stage: usize) -> &[f64] {
        &self.stages[stage - 1]
    }

    pub fn weights(&self) -> &[f64; 6] {
        &self.weights
    }
}

impl Default for Rkf45Tableau {
    fn default() -> Self {
        Self::fehlberg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    fn sum(ratios: &[Ratio]) -> (i128, i128) {
        ratios.iter().fold((0i128, 1i128), |(n, d), c| {
            let n = n * c.den as i128 + c.num as i128 * d;
            let d = d * c.den as i128;
            let g = gcd(n, d);
            (n / g, d / g)
        })
    }

    #[test]
    fn weights_sum_to_one_exactly() {
        assert_eq!(sum(&FEHLBERG_WEIGHTS), (1, 1));
    }

    #[test]
    fn stage_rows_sum_to_nodes() {
        // nodes 1/4, 3/8, 12/13, 1, 1/2
        let nodes = [(1, 4), (3, 8), (12, 13), (1, 1), (1, 2)];
        for (row, node) in FEHLBERG_STAGES.iter().zip(nodes) {
            assert_eq!(sum(row), node);
        }
    }

    #[test]
    fn fourth_order_conditions() {
        // sum c_j c-node_j^k = 1/(k+1) for k = 0..3, nodes including c_1 = 0
        let nodes: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
        let tab = Rkf45Tableau::fehlberg();
        for k in 0..4 {
            let s: f64 = tab
                .weights()
                .iter()
                .zip(nodes)
                .map(|(w, c)| w * c.powi(k))
                .sum();
            assert!((s - 1.0 / (k as f64 + 1.0)).abs() < 1e-15, "k = {k}: {s}");
        }
    }
}
