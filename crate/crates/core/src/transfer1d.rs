//! The one-dimensional model through its 3×3 transfer matrix.
//!
//! The basis is (vacant, left end of a dimer, right end of a dimer) at a
//! vertex. Entry `T[next][prev]` carries the weight of the potentials
//! completed by the step, so `<0|T^(L+1)|0>` sweeps a segment of `L` vertices
//! between two vacant sentinels.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::enumerate::chain::{Chain, ChainBoundary};
use crate::model::ModelParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferError {
    #[error("characteristic polynomial has non-real roots at beta={beta}, lambda={lambda}, a={a}")]
    NonReal { beta: f64, lambda: f64, a: f64 },
    #[error("segment length must be even and at least {min}, got {len}")]
    BadLength { len: usize, min: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum1D {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    /// `|p(x_i)|` after polishing.
    pub residuals: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transfer1D {
    entries: [[f64; 3]; 3],
    params: ModelParams,
}

/// Coefficients `(c3, c2, c1, c0)` of the characteristic cubic.
pub fn char_poly(params: &ModelParams) -> [f64; 4] {
    let t = params.vacancy_weight();
    let eps = (-params.log_ell0()).exp();
    [1.0, -t, -1.0, t - eps]
}

fn eval(c: &[f64; 4], x: f64) -> f64 {
    ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
}

fn eval_deriv(c: &[f64; 4], x: f64) -> f64 {
    (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2]
}

impl Transfer1D {
    pub fn new(params: ModelParams) -> Self {
        let t = params.vacancy_weight();
        let mut m = [[0.0; 3]; 3];
        m[0][0] = t;
        m[0][2] = (-params.beta * (params.lambda + 2.0 * params.a) / 2.0).exp();
        m[1][0] = params.link_weight();
        m[1][2] = 1.0;
        m[2][1] = 1.0;
        Transfer1D { entries: m, params }
    }

    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.entries
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.entries[i][j])
    }

    pub fn char_poly(&self) -> [f64; 4] {
        char_poly(&self.params)
    }

    /// Eigenvalues from the companion matrix, each polished by two Newton
    /// steps on the cubic.
    pub fn spectrum(&self) -> Result<Spectrum1D, TransferError> {
        let c = self.char_poly();
        let companion = Matrix3::new(-c[1], -c[2], -c[3], 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        let raw = companion.complex_eigenvalues();
        let mut roots = Vec::with_capacity(3);
        for z in raw.iter() {
            if z.im.abs() > 1e-8 * z.re.abs().max(1.0) {
                let p = self.params;
                return Err(TransferError::NonReal { beta: p.beta, lambda: p.lambda, a: p.a });
            }
            let mut x = z.re;
            for _ in 0..2 {
                let d = eval_deriv(&c, x);
                if d != 0.0 {
                    x -= eval(&c, x) / d;
                }
            }
            roots.push(x);
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum1D {
            x1: roots[0],
            x2: roots[1],
            x3: roots[2],
            residuals: [eval(&c, roots[0]).abs(), eval(&c, roots[1]).abs(), eval(&c, roots[2]).abs()],
        })
    }

    /// `x1 - 1`, solved on the shifted cubic
    /// `δ(2+δ)(1+δ-t) - ε = 0` so that no precision is lost near 1.
    pub fn x1_minus_one(&self) -> Result<f64, TransferError> {
        let t = self.params.vacancy_weight();
        let eps = (-self.params.log_ell0()).exp();
        let mut d = self.spectrum()?.x1 - 1.0;
        for _ in 0..4 {
            let f = d * (2.0 + d) * (1.0 + d - t) - eps;
            let df = (2.0 + 2.0 * d) * (1.0 + d - t) + d * (2.0 + d);
            d -= f / df;
        }
        Ok(d)
    }

    fn power_apply(&self, steps: usize, v: Vector3<f64>) -> (Vector3<f64>, f64) {
        let m = self.matrix();
        let mut v = v;
        let mut log_scale = 0.0;
        for _ in 0..steps {
            v = m * v;
            let n = v.amax();
            if n > 0.0 && !(1e-100..1e100).contains(&n) {
                v /= n;
                log_scale += n.ln();
            }
        }
        (v, log_scale)
    }

    /// `log <0|T^(L+1)|0>`.
    pub fn log_z_vacant(&self, len: usize) -> f64 {
        let (v, s) = self.power_apply(len + 1, Vector3::new(1.0, 0.0, 0.0));
        v[0].ln() + s
    }

    pub fn z_vacant(&self, len: usize) -> f64 {
        self.log_z_vacant(len).exp()
    }

    /// `trace(T^L)`, the partition function of a ring of `L` vertices.
    pub fn z_periodic(&self, len: usize) -> f64 {
        let m = self.matrix();
        let mut p = Matrix3::identity();
        for _ in 0..len {
            p = m * p;
        }
        p.trace()
    }

    /// Probability that edge `m` (joining vertices `m` and `m+1`) is occupied
    /// in the vacant-boundary segment of `len` vertices.
    pub fn edge_marginal_vacant(&self, len: usize, m: usize) -> f64 {
        let (v, s1) = self.power_apply(m + 1, Vector3::new(1.0, 0.0, 0.0));
        let v = Vector3::new(0.0, v[1], 0.0);
        let (w, s2) = self.power_apply(len - m, v);
        (w[0].ln() + s1 + s2 - self.log_z_vacant(len)).exp()
    }

    /// `1 / log|x1/x3|`.
    pub fn correlation_length(&self) -> Result<f64, TransferError> {
        let s = self.spectrum()?;
        Ok(1.0 / (s.x1 / s.x3).abs().ln())
    }
}

pub fn z_vacant(len: usize, params: &ModelParams) -> Result<f64, TransferError> {
    if len < 2 || !len.is_multiple_of(2) {
        return Err(TransferError::BadLength { len, min: 2 });
    }
    Ok(Transfer1D::new(*params).z_vacant(len))
}

/// Exact partition function of the segment with the fully packed exterior.
pub fn z_fullpacked(len: usize, params: &ModelParams) -> Result<f64, TransferError> {
    if len < 4 || !len.is_multiple_of(2) {
        return Err(TransferError::BadLength { len, min: 4 });
    }
    Ok(Chain::new(len, ChainBoundary::FullyPacked).partition_function(params))
}

pub fn z_periodic_1d(len: usize, params: &ModelParams) -> f64 {
    Transfer1D::new(*params).z_periodic(len)
}

pub fn correlation_length(params: &ModelParams) -> Result<f64, TransferError> {
    Transfer1D::new(*params).correlation_length()
}

pub fn ell0(params: &ModelParams) -> f64 {
    params.ell0()
}
