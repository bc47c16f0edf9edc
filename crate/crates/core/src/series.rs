//! Truncated formal power series in one and two variables.

use num_complex::Complex64 as C64;

/// `Σ c_k x^k` for `k ≤ order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub c: Vec<C64>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series { c: vec![C64::new(0.0, 0.0); order + 1] }
    }

    pub fn from_coeffs(mut c: Vec<C64>, order: usize) -> Self {
        c.resize(order + 1, C64::new(0.0, 0.0));
        Series { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.order().min(o.order());
        let mut r = Series::zero(n);
        for (i, a) in self.c.iter().enumerate().take(n + 1) {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(n + 1 - i) {
                r.c[i + j] += a * b;
            }
        }
        r
    }

    /// `log(1 + x)` for a series without constant term, via `L′ = x′/(1 + x)`.
    pub fn log1p(&self) -> Series {
        assert!(self.c[0].norm() == 0.0, "log1p needs a zero constant term");
        let n = self.order();
        // d = 1 + x, L' d = x'
        let mut l = Series::zero(n);
        let mut lp = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let xp = self.c[k + 1] * (k + 1) as f64;
            let mut s = xp;
            for j in 1..=k {
                s -= lp[k - j] * self.c[j];
            }
            lp[k] = s;
            l.c[k + 1] = s / (k + 1) as f64;
        }
        l
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.c.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }
}

/// `Σ c_{ij} u^i v^j` with `i, j ≤ order` (a rectangular truncation, closed
/// under multiplication).
#[derive(Clone, Debug, PartialEq)]
pub struct Series2 {
    pub n: usize,
    pub c: Vec<C64>,
}

impl Series2 {
    pub fn zero(n: usize) -> Self {
        Series2 { n, c: vec![C64::new(0.0, 0.0); (n + 1) * (n + 1)] }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.c[i * (self.n + 1) + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let n = self.n;
        self.c[i * (n + 1) + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: C64) {
        let n = self.n;
        self.c[i * (n + 1) + j] += v;
    }

    pub fn add(&self, o: &Series2) -> Series2 {
        let mut r = self.clone();
        r.c.iter_mut().zip(&o.c).for_each(|(a, b)| *a += b);
        r
    }

    pub fn scale(&self, k: C64) -> Series2 {
        Series2 { n: self.n, c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, o: &Series2) -> Series2 {
        let n = self.n;
        let mut r = Series2::zero(n);
        for i1 in 0..=n {
            for j1 in 0..=n {
                let a = self.get(i1, j1);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..=n - i1 {
                    for j2 in 0..=n - j1 {
                        let b = o.get(i2, j2);
                        if b != C64::new(0.0, 0.0) {
                            r.add_at(i1 + i2, j1 + j2, a * b);
                        }
                    }
                }
            }
        }
        r
    }

    /// `−log(1 − q) = Σ_{j≥1} q^j / j` for `q` without constant term,
    /// evaluated by Horner in `q`.
    pub fn neg_log_one_minus(q: &Series2) -> Series2 {
        assert!(q.get(0, 0).norm() == 0.0);
        let n = q.n;
        // q^j starts at total degree j·d, beyond the truncation once j·d > 2n
        let d = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| (i, j)))
            .filter(|&(i, j)| q.get(i, j).norm() > 0.0)
            .map(|(i, j)| i + j)
            .min()
            .unwrap_or(2 * n + 1);
        let terms = (2 * n / d).max(1);
        let mut acc = Series2::zero(n);
        acc.set(0, 0, C64::new(1.0 / terms as f64, 0.0));
        for j in (1..terms).rev() {
            acc = q.mul(&acc);
            acc.add_at(0, 0, C64::new(1.0 / j as f64, 0.0));
        }
        q.mul(&acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn log1p_of_geometric_matches_power_sum() {
        let x = Series::from_coeffs(vec![c(0.0, 0.0), c(0.3, 0.1)], 10);
        let l = x.log1p();
        let t = c(0.3, 0.1);
        for k in 1..=10 {
            let want = -(-t).powu(k as u32) / k as f64;
            assert!((l.c[k] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn bivariate_log_of_a_product_variable() {
        let n = 6;
        let mut q = Series2::zero(n);
        q.set(1, 1, c(0.4, 0.0));
        let l = Series2::neg_log_one_minus(&q);
        for i in 0..=n {
            for j in 0..=n {
                let want = if i == j && i > 0 { 0.4f64.powi(i as i32) / i as f64 } else { 0.0 };
                assert!((l.get(i, j) - want).norm() < 1e-15, "{i} {j}");
            }
        }
    }
}
