//! Small dense helpers.

/// LU factorization with partial pivoting, row-major storage.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    /// Smallest |pivot| relative to the largest, a cheap rank indicator.
    pub pivot_ratio: f64,
}

impl Lu {
    pub fn factor(n: usize, mut a: Vec<f64>) -> Option<Lu> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0_f64);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                .unwrap();
            if a[p * n + k] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = a[k * n + k];
            pmin = pmin.min(piv.abs());
            pmax = pmax.max(piv.abs());
            for i in (k + 1)..n {
                let m = a[i * n + k] / piv;
                a[i * n + k] = m;
                if m != 0.0 {
                    for j in (k + 1)..n {
                        a[i * n + j] -= m * a[k * n + j];
                    }
                }
            }
        }
        let pivot_ratio = if n == 0 { 1.0 } else { pmin / pmax };
        Some(Lu { n, lu: a, perm, pivot_ratio })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
