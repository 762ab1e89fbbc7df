/// Non-zero entries of each row, as `(column, value)`.
pub(crate) fn sparse_rows(x: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
    x.iter().map(|row| row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect()).collect()
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

/// First and second moment estimates for one parameter tensor.
#[derive(Clone, Debug)]
pub(crate) struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Moments {
    pub fn new(len: usize) -> Self {
        Moments { m: vec![0.0; len], v: vec![0.0; len] }
    }

    /// One bias-corrected Adam step at time `t` (starting from 1).
    pub fn step(&mut self, cfg: &AdamConfig, t: u64, params: &mut [f64], grads: &[f64]) {
        let c1 = 1.0 - cfg.beta1.powi(t as i32);
        let c2 = 1.0 - cfg.beta2.powi(t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g;
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let cfg = AdamConfig { lr: 0.001, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 };
        let mut m = Moments::new(2);
        let mut p = vec![1.0, -1.0];
        m.step(&cfg, 1, &mut p, &[0.5, -3.0]);
        assert!((p[0] - (1.0 - 0.001 * 0.5 / (0.5 + 1e-8))).abs() < 1e-15);
        assert!((p[1] - (-1.0 + 0.001 * 3.0 / (3.0 + 1e-8))).abs() < 1e-15);
    }

    #[test]
    fn sparse_rows_skip_zeros() {
        assert_eq!(sparse_rows(&[vec![0.0, 2.0, 0.0, -1.0]]), vec![vec![(1, 2.0), (3, -1.0)]]);
    }
}
