use crate::error::Result;
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct LinearGrads<F> {
    pub dw: Matrix<F>,
    pub db: Vec<F>,
    pub dx: Vec<F>,
}

/// `y = W x + b`.
pub fn linear_forward<F: Real>(w: &Matrix<F>, b: &[F], x: &[F]) -> Result<Vec<F>> {
    w.check_shape(b.len(), x.len())?;
    let mut y = w.matvec(x);
    for (yv, bv) in y.iter_mut().zip(b) {
        *yv += *bv;
    }
    Ok(y)
}

/// Gradients of `y = W x + b` given the upstream gradient `g = dL/dy`:
/// `dW = g x^T`, `db = g`, `dx = W^T g`.
pub fn linear_backward<F: Real>(w: &Matrix<F>, x: &[F], g: &[F]) -> Result<LinearGrads<F>> {
    w.check_shape(g.len(), x.len())?;
    let mut dw = w.zeros_like();
    dw.add_outer(g, x);
    Ok(LinearGrads {
        dw,
        db: g.to_vec(),
        dx: w.matvec_t(g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_forward() {
        let mut w = Matrix::<f64>::zeros(2, 2);
        w.set(0, 0, 1.0);
        w.set(1, 1, 1.0);
        let y = linear_forward(&w, &[0.0, 0.0], &[2.0, 3.0]).unwrap();
        assert_eq!(y, vec![2.0, 3.0]);
    }

    #[test]
    fn backward_outer_product() {
        let w = Matrix::<f64>::zeros(2, 2);
        let g = linear_backward(&w, &[2.0, 3.0], &[1.0, 0.0]).unwrap();
        assert_eq!(g.dw.row(0), &[2.0, 3.0]);
        assert_eq!(g.dw.row(1), &[0.0, 0.0]);
        assert_eq!(g.db, vec![1.0, 0.0]);
    }

    #[test]
    fn shape_mismatch_names_both_shapes() {
        let w = Matrix::<f64>::zeros(4, 3);
        let err = linear_forward(&w, &[0.0; 4], &[0.0; 2]).unwrap_err();
        assert!(err.to_string().contains("4x2"), "{err}");
    }
}
