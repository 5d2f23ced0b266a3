use nalgebra::{DMatrix, DVector};

use super::{ChartMap, Jet};

/// Chart whose derivatives are central finite differences of the embedding,
/// with step `h = 1e-5·(1 + |q|)`.
pub struct FiniteDifferenceChart<F> {
    f: F,
}

impl<F> FiniteDifferenceChart<F>
where
    F: Fn(&[f64]) -> DVector<f64> + Send + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f }
    }

    fn eval_shifted(&self, q: &[f64], shifts: &[(usize, f64)]) -> DVector<f64> {
        let mut p = q.to_vec();
        for &(i, s) in shifts {
            p[i] += s;
        }
        (self.f)(&p)
    }
}

impl<F> ChartMap for FiniteDifferenceChart<F>
where
    F: Fn(&[f64]) -> DVector<f64> + Send + Sync,
{
    fn point(&self, q: &[f64]) -> DVector<f64> {
        (self.f)(q)
    }

    fn jet(&self, q: &[f64]) -> Jet {
        let n = q.len();
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = 1e-5 * (1.0 + norm);
        let center = (self.f)(q);
        let m = center.len();

        let plus: Vec<DVector<f64>> = (0..n).map(|i| self.eval_shifted(q, &[(i, h)])).collect();
        let minus: Vec<DVector<f64>> = (0..n).map(|i| self.eval_shifted(q, &[(i, -h)])).collect();

        let mut jacobian = DMatrix::zeros(m, n);
        for i in 0..n {
            jacobian.set_column(i, &((&plus[i] - &minus[i]) / (2.0 * h)));
        }

        let mut second = vec![DVector::zeros(m); n * n];
        for i in 0..n {
            second[i * n + i] = (&plus[i] - &center * 2.0 + &minus[i]) / (h * h);
            for j in (i + 1)..n {
                let pp = self.eval_shifted(q, &[(i, h), (j, h)]);
                let pm = self.eval_shifted(q, &[(i, h), (j, -h)]);
                let mp = self.eval_shifted(q, &[(i, -h), (j, h)]);
                let mm = self.eval_shifted(q, &[(i, -h), (j, -h)]);
                let v = (pp - pm - mp + mm) / (4.0 * h * h);
                second[j * n + i] = v.clone();
                second[i * n + j] = v;
            }
        }
        Jet {
            point: center,
            jacobian,
            second,
        }
    }
}
