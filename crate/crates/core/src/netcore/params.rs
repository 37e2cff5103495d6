use rand::Rng;

use crate::linalg::Matrix;
use crate::scalar::Real;

/// A named set of parameter arrays. Gradients reuse the same struct type as
/// the parameters they belong to, so shape congruence holds by construction.
pub trait ParamGroup<F: Real>: Clone {
    /// Arrays in a fixed, documented order (checkpoint and optimizer order).
    fn entries(&self) -> Vec<(&'static str, &Matrix<F>)>;
    fn entries_mut(&mut self) -> Vec<(&'static str, &mut Matrix<F>)>;

    fn zeros_like(&self) -> Self {
        let mut out = self.clone();
        for (_, m) in out.entries_mut() {
            m.fill(F::zero());
        }
        out
    }

    /// `self += a * other`, array by array.
    fn axpy(&mut self, a: F, other: &Self) {
        let src = other.entries();
        for ((_, dst), (_, s)) in self.entries_mut().into_iter().zip(src) {
            dst.axpy(a, s);
        }
    }

    fn scale(&mut self, a: F) {
        for (_, m) in self.entries_mut() {
            m.scale(a);
        }
    }

    fn all_finite(&self) -> bool {
        self.entries().iter().all(|(_, m)| m.all_finite())
    }

    fn all_zero(&self) -> bool {
        self.entries()
            .iter()
            .all(|(_, m)| m.as_slice().iter().all(|&x| x == F::zero()))
    }

    fn num_elements(&self) -> usize {
        self.entries().iter().map(|(_, m)| m.len()).sum()
    }
}

/// Fill a matrix with uniform(-scale, scale) draws.
pub fn init_uniform<F: Real, R: Rng>(m: &mut Matrix<F>, rng: &mut R, scale: f64) {
    for v in m.as_mut_slice() {
        *v = F::of(rng.gen_range(-scale..scale));
    }
}
