use std::f64::consts::PI;

/// Orthonormal DCT-II as a dense `outputs x inputs` matrix.
#[derive(Debug, Clone)]
pub struct Dct {
    basis: Vec<Vec<f64>>,
}

impl Dct {
    /// Keeps coefficients `0..outputs` of an `inputs`-point transform.
    pub fn new(inputs: usize, outputs: usize) -> Self {
        assert!(outputs <= inputs);
        let n = inputs as f64;
        let basis = (0..outputs)
            .map(|k| {
                let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
                (0..inputs)
                    .map(|i| scale * (PI * k as f64 * (i as f64 + 0.5) / n).cos())
                    .collect()
            })
            .collect();
        Self { basis }
    }

    pub fn forward(&self, input: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.basis) {
            *o = row.iter().zip(input).map(|(b, x)| b * x).sum();
        }
    }

    /// Inverse of a full (square) transform. Truncated transforms are not
    /// invertible; the missing coefficients are treated as zero.
    pub fn inverse(&self, coeffs: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (c, row) in coeffs.iter().zip(&self.basis) {
            for (o, b) in out.iter_mut().zip(row) {
                *o += c * b;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_input_only_has_c0() {
        let dct = Dct::new(23, 23);
        let mut out = vec![0.0; 23];
        dct.forward(&[2.0; 23], &mut out);
        assert!((out[0] - 2.0 * 23f64.sqrt()).abs() < 1e-12);
        assert!(out[1..].iter().all(|c| c.abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn full_transform_round_trips(v in proptest::collection::vec(-30.0f64..5.0, 23)) {
            let dct = Dct::new(23, 23);
            let mut c = vec![0.0; 23];
            let mut back = vec![0.0; 23];
            dct.forward(&v, &mut c);
            dct.inverse(&c, &mut back);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let err = v.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(err / norm < 1e-10);
        }
    }
}
