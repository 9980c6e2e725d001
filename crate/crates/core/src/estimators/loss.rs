//! Training objectives and their analytic gradients.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::normal::{inverse_mills, log_cdf};
use crate::error::{invalid, Error, Result};
use crate::frontend::RealifiedSystem;

/// Weights and bias of the single-layer estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronParams {
    /// Realified channel `[Re H, Im H]`, `M_r × 2M_t`.
    pub h: DMatrix<f64>,
    /// Realified bias `[Re z, Im z]`, `M_r × 2`.
    pub z: DMatrix<f64>,
}

impl NeuronParams {
    pub fn zeros(m_r: usize, m_t: usize) -> Self {
        Self {
            h: DMatrix::zeros(m_r, 2 * m_t),
            z: DMatrix::zeros(m_r, 2),
        }
    }

    pub fn axpy(&self, alpha: f64, grad: &NeuronParams) -> NeuronParams {
        NeuronParams {
            h: &self.h + &grad.h * alpha,
            z: &self.z + &grad.z * alpha,
        }
    }
}

/// Output nonlinearity of the least-squares objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Tanh,
}

/// `H·X + z`, with bias column `c` added to every pilot column of parity `c`.
pub fn pre_activation(params: &NeuronParams, sys: &RealifiedSystem) -> DMatrix<f64> {
    let mut a = &params.h * &sys.x;
    for (j, mut col) in a.column_iter_mut().enumerate() {
        col += params.z.column(j % 2);
    }
    a
}

fn check_dims(params: &NeuronParams, sys: &RealifiedSystem) -> Result<()> {
    if params.h.ncols() != sys.x.nrows()
        || params.h.nrows() != sys.y.nrows()
        || params.z.shape() != (sys.y.nrows(), 2)
    {
        return Err(Error::Dimension(format!(
            "params {:?}/{:?} vs system x {:?}, y {:?}",
            params.h.shape(),
            params.z.shape(),
            sys.x.shape(),
            sys.y.shape()
        )));
    }
    Ok(())
}

fn bias_gradient(delta: &DMatrix<f64>) -> DMatrix<f64> {
    let mut gz = DMatrix::zeros(delta.nrows(), 2);
    for (j, col) in delta.column_iter().enumerate() {
        let mut target = gz.column_mut(j % 2);
        target += col;
    }
    gz
}

/// Regularized least squares `(1/N)·Σ_n ‖y_n − f(H x_n + z)‖² + λ‖H‖²`.
#[derive(Debug, Clone, Copy)]
pub struct LeastSquares<'a> {
    pub system: &'a RealifiedSystem,
    pub activation: Activation,
    pub lambda: f64,
}

impl LeastSquares<'_> {
    fn output(&self, a: f64) -> f64 {
        match self.activation {
            Activation::Linear => a,
            Activation::Tanh => a.tanh(),
        }
    }

    pub fn loss(&self, params: &NeuronParams) -> Result<f64> {
        check_dims(params, self.system)?;
        let a = pre_activation(params, self.system);
        let n = self.system.pilots() as f64;
        let data: f64 = a
            .iter()
            .zip(self.system.y.iter())
            .map(|(&a, &y)| (y - self.output(a)).powi(2))
            .sum();
        Ok(data / n + self.lambda * params.h.norm_squared())
    }

    pub fn gradient(&self, params: &NeuronParams) -> Result<NeuronParams> {
        check_dims(params, self.system)?;
        let a = pre_activation(params, self.system);
        let scale = 2.0 / self.system.pilots() as f64;
        let delta = a.zip_map(&self.system.y, |a, y| match self.activation {
            Activation::Linear => scale * (a - y),
            Activation::Tanh => {
                let t = a.tanh();
                scale * (t - y) * (1.0 - t * t)
            }
        });
        let h = &delta * self.system.x.transpose() + &params.h * (2.0 * self.lambda);
        Ok(NeuronParams {
            h,
            z: bias_gradient(&delta),
        })
    }
}

fn softplus(a: f64) -> f64 {
    a.max(0.0) + (-a.abs()).exp().ln_1p()
}

fn sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy of `σ(H x_n + z)` against targets mapped from ±1 to
/// {0, 1}, averaged over pilots, plus `λ‖H‖²`.
#[derive(Debug, Clone, Copy)]
pub struct CrossEntropy<'a> {
    pub system: &'a RealifiedSystem,
    pub lambda: f64,
}

impl CrossEntropy<'_> {
    pub fn loss(&self, params: &NeuronParams) -> Result<f64> {
        check_dims(params, self.system)?;
        let a = pre_activation(params, self.system);
        let n = self.system.pilots() as f64;
        let data: f64 = a
            .iter()
            .zip(self.system.y.iter())
            .map(|(&a, &y)| softplus(a) - 0.5 * (y + 1.0) * a)
            .sum();
        Ok(data / n + self.lambda * params.h.norm_squared())
    }

    pub fn gradient(&self, params: &NeuronParams) -> Result<NeuronParams> {
        check_dims(params, self.system)?;
        let a = pre_activation(params, self.system);
        let scale = 1.0 / self.system.pilots() as f64;
        let delta = a.zip_map(&self.system.y, |a, y| {
            scale * (sigmoid(a) - 0.5 * (y + 1.0))
        });
        let h = &delta * self.system.x.transpose() + &params.h * (2.0 * self.lambda);
        Ok(NeuronParams {
            h,
            z: bias_gradient(&delta),
        })
    }
}

fn check_loglik(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>, sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("noise std {sigma} must be positive")));
    }
    if x.shape() != y.shape() {
        return Err(Error::Dimension(format!(
            "X {:?} vs Y {:?}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(())
}

/// Probit log-likelihood of one-bit observations `y` given the noiseless
/// receive matrix `x`: `Σ ln Φ(y_re·x_re/σ) + ln Φ(y_im·x_im/σ)`.
pub fn loglik(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>, sigma: f64) -> Result<f64> {
    check_loglik(x, y, sigma)?;
    Ok(x.iter()
        .zip(y.iter())
        .map(|(x, y)| log_cdf(y.re * x.re / sigma) + log_cdf(y.im * x.im / sigma))
        .sum())
}

/// Gradient of [`loglik`], packed as `∂L/∂x_re + j·∂L/∂x_im`.
pub fn loglik_gradient(
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
    sigma: f64,
) -> Result<DMatrix<Complex64>> {
    check_loglik(x, y, sigma)?;
    Ok(x.zip_map(y, |x, y| {
        let part = |yv: f64, xv: f64| yv * inverse_mills(yv * xv / sigma) / sigma;
        Complex64::new(part(y.re, x.re), part(y.im, x.im))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{dft_pilots, quantize};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn system(m_r: usize, m_t: usize, n: usize, seed: u64) -> RealifiedSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = DMatrix::from_fn(m_r, m_t, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let p = dft_pilots(m_t, n).unwrap();
        let y = quantize(&(&h * &p.x)).unwrap();
        RealifiedSystem::new(&y, &p).unwrap()
    }

    #[test]
    fn zero_point_linear_loss() {
        let sys = system(3, 2, 4, 1);
        let all_plus = RealifiedSystem {
            y: DMatrix::from_element(3, 8, 1.0),
            x: sys.x.clone(),
        };
        let ls = LeastSquares {
            system: &all_plus,
            activation: Activation::Linear,
            lambda: 0.0,
        };
        assert_relative_eq!(
            ls.loss(&NeuronParams::zeros(3, 2)).unwrap(),
            6.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn penalty_is_additive() {
        let sys = system(3, 2, 4, 2);
        let mut p = NeuronParams::zeros(3, 2);
        p.h[(1, 2)] = 0.7;
        p.h[(0, 0)] = -0.2;
        for act in [Activation::Linear, Activation::Tanh] {
            let plain = LeastSquares {
                system: &sys,
                activation: act,
                lambda: 0.0,
            };
            let reg = LeastSquares {
                system: &sys,
                activation: act,
                lambda: 0.3,
            };
            let diff = reg.loss(&p).unwrap() - plain.loss(&p).unwrap();
            assert_relative_eq!(diff, 0.3 * p.h.norm_squared(), max_relative = 1e-12);
            let gdiff = reg.gradient(&p).unwrap().h - plain.gradient(&p).unwrap().h;
            assert!((gdiff - &p.h * 0.6).norm() < 1e-14);
        }
    }

    #[test]
    fn tanh_saturation() {
        let sys = system(2, 2, 2, 3);
        // z huge with the sign of every target column makes the data term vanish
        let y = DMatrix::from_fn(2, 4, |i, _| if i == 0 { 1.0 } else { -1.0 });
        let sat = RealifiedSystem {
            y,
            x: sys.x.clone(),
        };
        let mut p = NeuronParams::zeros(2, 2);
        p.z = DMatrix::from_fn(2, 2, |i, _| if i == 0 { 50.0 } else { -50.0 });
        let ls = LeastSquares {
            system: &sat,
            activation: Activation::Tanh,
            lambda: 0.0,
        };
        assert!(ls.loss(&p).unwrap() < 1e-30);
    }

    #[test]
    fn balanced_targets_give_zero_bias_gradient() {
        let sys = system(2, 2, 2, 4);
        let y = DMatrix::from_fn(2, 4, |_, j| if j < 2 { 1.0 } else { -1.0 });
        let bal = RealifiedSystem {
            y,
            x: sys.x.clone(),
        };
        for act in [Activation::Linear, Activation::Tanh] {
            let ls = LeastSquares {
                system: &bal,
                activation: act,
                lambda: 0.0,
            };
            let g = ls.gradient(&NeuronParams::zeros(2, 2)).unwrap();
            assert!(g.z.norm() < 1e-15);
        }
    }

    #[test]
    fn loglik_values() {
        let y = DMatrix::from_element(3, 2, Complex64::new(1.0, -1.0));
        let x = DMatrix::zeros(3, 2);
        assert_relative_eq!(
            loglik(&x, &y, 1.0).unwrap(),
            12.0 * 0.5f64.ln(),
            max_relative = 1e-14
        );
        let g = loglik_gradient(
            &DMatrix::zeros(1, 1),
            &DMatrix::from_element(1, 1, Complex64::new(1.0, 1.0)),
            1.0,
        )
        .unwrap();
        assert_relative_eq!(g[(0, 0)].re, 0.797_884_56, max_relative = 1e-8);
        assert!(loglik(&x, &y, 0.0).is_err());
        assert!(loglik_gradient(&x, &y, -1.0).is_err());
    }

    #[test]
    fn dimension_errors() {
        let sys = system(3, 2, 4, 5);
        let bad = NeuronParams::zeros(3, 3);
        let ls = LeastSquares {
            system: &sys,
            activation: Activation::Tanh,
            lambda: 0.0,
        };
        assert!(ls.loss(&bad).is_err());
        assert!(CrossEntropy {
            system: &sys,
            lambda: 0.0
        }
        .gradient(&bad)
        .is_err());
    }
}
