//! LSTM cell and bidirectional LSTM with exact backpropagation through time.
//!
//! Gate equations (sigmoid gates, tanh candidate):
//!   i = sigm(W_xi x + W_hi h' + b_i)     f = sigm(W_xf x + W_hf h' + b_f)
//!   g = tanh(W_xg x + W_hg h' + b_g)     o = sigm(W_xo x + W_ho h' + b_o)
//!   c = f (.) c' + i (.) g               h = o (.) tanh(c)

use crate::error::{Error, Result};
use crate::linalg::{add_assign, Matrix};
use crate::netcore::params::ParamGroup;
use crate::scalar::Real;

/// 8 weight matrices plus 4 bias vectors of one LSTM direction.
#[derive(Debug, Clone)]
pub struct LstmParams<F> {
    pub w_xi: Matrix<F>,
    pub w_hi: Matrix<F>,
    pub w_xf: Matrix<F>,
    pub w_hf: Matrix<F>,
    pub w_xg: Matrix<F>,
    pub w_hg: Matrix<F>,
    pub w_xo: Matrix<F>,
    pub w_ho: Matrix<F>,
    pub b_i: Matrix<F>,
    pub b_f: Matrix<F>,
    pub b_g: Matrix<F>,
    pub b_o: Matrix<F>,
}

impl<F: Real> LstmParams<F> {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        LstmParams {
            w_xi: Matrix::zeros(hidden, input),
            w_hi: Matrix::zeros(hidden, hidden),
            w_xf: Matrix::zeros(hidden, input),
            w_hf: Matrix::zeros(hidden, hidden),
            w_xg: Matrix::zeros(hidden, input),
            w_hg: Matrix::zeros(hidden, hidden),
            w_xo: Matrix::zeros(hidden, input),
            w_ho: Matrix::zeros(hidden, hidden),
            b_i: Matrix::zero_vector(hidden),
            b_f: Matrix::zero_vector(hidden),
            b_g: Matrix::zero_vector(hidden),
            b_o: Matrix::zero_vector(hidden),
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_hi.rows()
    }

    pub fn input_size(&self) -> usize {
        self.w_xi.cols()
    }
}

impl<F: Real> ParamGroup<F> for LstmParams<F> {
    fn entries(&self) -> Vec<(&'static str, &Matrix<F>)> {
        vec![
            ("w_xi", &self.w_xi),
            ("w_hi", &self.w_hi),
            ("w_xf", &self.w_xf),
            ("w_hf", &self.w_hf),
            ("w_xg", &self.w_xg),
            ("w_hg", &self.w_hg),
            ("w_xo", &self.w_xo),
            ("w_ho", &self.w_ho),
            ("b_i", &self.b_i),
            ("b_f", &self.b_f),
            ("b_g", &self.b_g),
            ("b_o", &self.b_o),
        ]
    }

    fn entries_mut(&mut self) -> Vec<(&'static str, &mut Matrix<F>)> {
        vec![
            ("w_xi", &mut self.w_xi),
            ("w_hi", &mut self.w_hi),
            ("w_xf", &mut self.w_xf),
            ("w_hf", &mut self.w_hf),
            ("w_xg", &mut self.w_xg),
            ("w_hg", &mut self.w_hg),
            ("w_xo", &mut self.w_xo),
            ("w_ho", &mut self.w_ho),
            ("b_i", &mut self.b_i),
            ("b_f", &mut self.b_f),
            ("b_g", &mut self.b_g),
            ("b_o", &mut self.b_o),
        ]
    }
}

/// Everything the exact backward pass needs from one cell evaluation.
#[derive(Debug, Clone)]
pub struct LstmCache<F> {
    pub x: Vec<F>,
    pub h_prev: Vec<F>,
    pub c_prev: Vec<F>,
    pub i: Vec<F>,
    pub f: Vec<F>,
    pub g: Vec<F>,
    pub o: Vec<F>,
    pub tanh_c: Vec<F>,
}

fn sigmoid<F: Real>(x: F) -> F {
    F::one() / (F::one() + (-x).exp())
}

fn gate<F: Real>(wx: &Matrix<F>, wh: &Matrix<F>, b: &Matrix<F>, x: &[F], h: &[F]) -> Vec<F> {
    let mut z = wx.matvec(x);
    add_assign(&mut z, &wh.matvec(h));
    add_assign(&mut z, b.as_slice());
    z
}

pub fn lstm_cell_forward<F: Real>(
    p: &LstmParams<F>,
    x: &[F],
    h_prev: &[F],
    c_prev: &[F],
    step: usize,
) -> Result<(Vec<F>, Vec<F>, LstmCache<F>)> {
    let i: Vec<F> = gate(&p.w_xi, &p.w_hi, &p.b_i, x, h_prev)
        .into_iter()
        .map(sigmoid)
        .collect();
    let f: Vec<F> = gate(&p.w_xf, &p.w_hf, &p.b_f, x, h_prev)
        .into_iter()
        .map(sigmoid)
        .collect();
    let g: Vec<F> = gate(&p.w_xg, &p.w_hg, &p.b_g, x, h_prev)
        .into_iter()
        .map(|z| z.tanh())
        .collect();
    let o: Vec<F> = gate(&p.w_xo, &p.w_ho, &p.b_o, x, h_prev)
        .into_iter()
        .map(sigmoid)
        .collect();
    let n = i.len();
    let mut c = vec![F::zero(); n];
    let mut tanh_c = vec![F::zero(); n];
    let mut h = vec![F::zero(); n];
    for k in 0..n {
        c[k] = f[k] * c_prev[k] + i[k] * g[k];
        tanh_c[k] = c[k].tanh();
        h[k] = o[k] * tanh_c[k];
    }
    if !h.iter().chain(&c).all(|v| v.is_finite()) {
        return Err(Error::NumericOverflow { step });
    }
    let cache = LstmCache {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        c_prev: c_prev.to_vec(),
        i,
        f,
        g,
        o,
        tanh_c,
    };
    Ok((h, c, cache))
}

/// Backward through one cell. Accumulates parameter gradients into `grads`
/// and returns `(dx, dh_prev, dc_prev)`.
pub fn lstm_cell_backward<F: Real>(
    p: &LstmParams<F>,
    cache: &LstmCache<F>,
    dh: &[F],
    dc_in: &[F],
    grads: &mut LstmParams<F>,
) -> (Vec<F>, Vec<F>, Vec<F>) {
    let n = dh.len();
    let one = F::one();
    let mut da_i = vec![F::zero(); n];
    let mut da_f = vec![F::zero(); n];
    let mut da_g = vec![F::zero(); n];
    let mut da_o = vec![F::zero(); n];
    let mut dc_prev = vec![F::zero(); n];
    for k in 0..n {
        let do_k = dh[k] * cache.tanh_c[k];
        let dc = dc_in[k] + dh[k] * cache.o[k] * (one - cache.tanh_c[k] * cache.tanh_c[k]);
        let di = dc * cache.g[k];
        let df = dc * cache.c_prev[k];
        let dg = dc * cache.i[k];
        dc_prev[k] = dc * cache.f[k];
        da_i[k] = di * cache.i[k] * (one - cache.i[k]);
        da_f[k] = df * cache.f[k] * (one - cache.f[k]);
        da_g[k] = dg * (one - cache.g[k] * cache.g[k]);
        da_o[k] = do_k * cache.o[k] * (one - cache.o[k]);
    }
    grads.w_xi.add_outer(&da_i, &cache.x);
    grads.w_hi.add_outer(&da_i, &cache.h_prev);
    grads.w_xf.add_outer(&da_f, &cache.x);
    grads.w_hf.add_outer(&da_f, &cache.h_prev);
    grads.w_xg.add_outer(&da_g, &cache.x);
    grads.w_hg.add_outer(&da_g, &cache.h_prev);
    grads.w_xo.add_outer(&da_o, &cache.x);
    grads.w_ho.add_outer(&da_o, &cache.h_prev);
    add_assign(grads.b_i.as_mut_slice(), &da_i);
    add_assign(grads.b_f.as_mut_slice(), &da_f);
    add_assign(grads.b_g.as_mut_slice(), &da_g);
    add_assign(grads.b_o.as_mut_slice(), &da_o);

    let mut dx = p.w_xi.matvec_t(&da_i);
    add_assign(&mut dx, &p.w_xf.matvec_t(&da_f));
    add_assign(&mut dx, &p.w_xg.matvec_t(&da_g));
    add_assign(&mut dx, &p.w_xo.matvec_t(&da_o));
    let mut dh_prev = p.w_hi.matvec_t(&da_i);
    add_assign(&mut dh_prev, &p.w_hf.matvec_t(&da_f));
    add_assign(&mut dh_prev, &p.w_hg.matvec_t(&da_g));
    add_assign(&mut dh_prev, &p.w_ho.matvec_t(&da_o));
    (dx, dh_prev, dc_prev)
}

#[derive(Debug, Clone)]
pub struct BilstmCache<F> {
    fwd: Vec<LstmCache<F>>,
    bwd: Vec<LstmCache<F>>,
}

/// Run both directions over the first `true_len` inputs. Row `t` of the
/// result is `[h_fwd(t) ++ h_bwd(t)]`. Positions at or past `true_len` are
/// PAD and are never touched.
pub fn bilstm_forward<F: Real>(
    fwd: &LstmParams<F>,
    bwd: &LstmParams<F>,
    xs: &[Vec<F>],
    true_len: usize,
) -> Result<(Matrix<F>, BilstmCache<F>)> {
    if true_len == 0 {
        return Err(Error::InvalidConfig("bilstm over empty sequence".into()));
    }
    assert!(true_len <= xs.len());
    let u = fwd.hidden();
    assert_eq!(u, bwd.hidden(), "direction hidden sizes differ");

    let mut h_fwd_all = Vec::with_capacity(true_len);
    let mut caches_fwd = Vec::with_capacity(true_len);
    let mut h = vec![F::zero(); u];
    let mut c = vec![F::zero(); u];
    for (t, x) in xs.iter().take(true_len).enumerate() {
        let (h_t, c_t, cache) = lstm_cell_forward(fwd, x, &h, &c, t)?;
        h_fwd_all.push(h_t.clone());
        caches_fwd.push(cache);
        h = h_t;
        c = c_t;
    }

    let mut h_bwd_all = vec![Vec::new(); true_len];
    let mut caches_bwd_rev = Vec::with_capacity(true_len);
    let mut h = vec![F::zero(); u];
    let mut c = vec![F::zero(); u];
    for t in (0..true_len).rev() {
        let (h_t, c_t, cache) = lstm_cell_forward(bwd, &xs[t], &h, &c, t)?;
        h_bwd_all[t] = h_t.clone();
        caches_bwd_rev.push(cache);
        h = h_t;
        c = c_t;
    }
    caches_bwd_rev.reverse(); // index by position t

    let mut rows = Vec::with_capacity(true_len);
    for t in 0..true_len {
        let mut row = h_fwd_all[t].clone();
        row.extend_from_slice(&h_bwd_all[t]);
        rows.push(row);
    }
    Ok((
        Matrix::from_rows(&rows),
        BilstmCache {
            fwd: caches_fwd,
            bwd: caches_bwd_rev,
        },
    ))
}

/// Backward through both directions given `dH` (`true_len x 2u`). Returns
/// parameter gradients per direction and per-position input gradients.
pub fn bilstm_backward<F: Real>(
    fwd: &LstmParams<F>,
    bwd: &LstmParams<F>,
    cache: &BilstmCache<F>,
    dh_out: &Matrix<F>,
) -> Result<(LstmParams<F>, LstmParams<F>, Vec<Vec<F>>)> {
    let true_len = cache.fwd.len();
    let u = fwd.hidden();
    dh_out.check_shape(true_len, 2 * u)?;

    let mut grads_fwd = fwd.zeros_like();
    let mut grads_bwd = bwd.zeros_like();
    let input = fwd.input_size();
    let mut dxs = vec![vec![F::zero(); input]; true_len];

    // Forward direction: walk time in reverse.
    let mut dh_next = vec![F::zero(); u];
    let mut dc_next = vec![F::zero(); u];
    for t in (0..true_len).rev() {
        let mut dh: Vec<F> = dh_out.row(t)[..u].to_vec();
        add_assign(&mut dh, &dh_next);
        let (dx, dh_prev, dc_prev) =
            lstm_cell_backward(fwd, &cache.fwd[t], &dh, &dc_next, &mut grads_fwd);
        add_assign(&mut dxs[t], &dx);
        dh_next = dh_prev;
        dc_next = dc_prev;
    }

    // Backward direction: its "previous" step is position t+1, so walk
    // time forward.
    let mut dh_next = vec![F::zero(); u];
    let mut dc_next = vec![F::zero(); u];
    for t in 0..true_len {
        let mut dh: Vec<F> = dh_out.row(t)[u..].to_vec();
        add_assign(&mut dh, &dh_next);
        let (dx, dh_prev, dc_prev) =
            lstm_cell_backward(bwd, &cache.bwd[t], &dh, &dc_next, &mut grads_bwd);
        add_assign(&mut dxs[t], &dx);
        dh_next = dh_prev;
        dc_next = dc_prev;
    }

    Ok((grads_fwd, grads_bwd, dxs))
}
