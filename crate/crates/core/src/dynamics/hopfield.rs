use crate::error::{dimension, domain, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Neuron activation `φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Activation<S> {
    /// `a · tanh(b z)`
    Tanh { a: S, b: S },
    /// `a / (1 + exp(-b z))`
    Logistic { a: S, b: S },
}

impl<S: Real> Activation<S> {
    pub fn tanh() -> Self {
        Activation::Tanh {
            a: S::one(),
            b: S::one(),
        }
    }

    pub fn eval(&self, z: S) -> S {
        match *self {
            Activation::Tanh { a, b } => a * (b * z).tanh(),
            Activation::Logistic { a, b } => a / (S::one() + (-b * z).exp()),
        }
    }

    pub fn derivative(&self, z: S) -> S {
        match *self {
            Activation::Tanh { a, b } => {
                let t = (b * z).tanh();
                a * b * (S::one() - t * t)
            }
            Activation::Logistic { a, b } => {
                let s = S::one() / (S::one() + (-b * z).exp());
                a * b * s * (S::one() - s)
            }
        }
    }

    /// `(m, M)` with `m ≤ |φ'(z)| ≤ M` for all real `z`.
    pub fn derivative_bounds(&self) -> (S, S) {
        match *self {
            Activation::Tanh { a, b } => (S::zero(), (a * b).abs()),
            Activation::Logistic { a, b } => (S::zero(), (a * b).abs() * S::lit(0.25)),
        }
    }

    /// True when `φ' ≥ 0` everywhere.
    pub fn is_nondecreasing(&self) -> bool {
        match *self {
            Activation::Tanh { a, b } | Activation::Logistic { a, b } => a * b >= S::zero(),
        }
    }
}

/// `ẋ_i = -x_i / r_i + Σ_j w_ij φ_j(x_j) + u_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct HopfieldModel<S> {
    r: Vec<S>,
    w: Matrix<S>,
    u: Vec<S>,
    activations: Vec<Activation<S>>,
    bounds: Vec<(S, S)>,
}

impl<S: Real> HopfieldModel<S> {
    pub fn new(r: Vec<S>, w: Matrix<S>, u: Vec<S>, activations: Vec<Activation<S>>) -> Result<Self> {
        let n = w.require_square("weight matrix")?;
        if r.len() != n || u.len() != n || activations.len() != n {
            return Err(dimension(format!(
                "W is {n}x{n} but r, u, activations have lengths {}, {}, {}",
                r.len(),
                u.len(),
                activations.len()
            )));
        }
        if let Some(bad) = r.iter().find(|ri| !(**ri > S::zero()) || !ri.is_finite()) {
            return Err(domain(format!("time constant {bad} is not positive")));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(domain("input u has a non-finite entry"));
        }
        let bounds = activations.iter().map(|a| a.derivative_bounds()).collect();
        Ok(Self {
            r,
            w,
            u,
            activations,
            bounds,
        })
    }

    /// Same time constant and activation for every neuron, zero input.
    pub fn uniform(r: S, w: Matrix<S>, activation: Activation<S>) -> Result<Self> {
        let n = w.rows();
        Self::new(vec![r; n], w, vec![S::zero(); n], vec![activation; n])
    }

    /// Three neurons, all weights 1, `tanh` activations, zero input.
    pub fn three_neuron_example(r: S) -> Result<Self> {
        Self::uniform(r, Matrix::from_fn(3, 3, |_, _| S::one()), Activation::tanh())
    }

    /// Overrides the derivative bounds `(m_i, M_i)`; requires `0 ≤ m_i ≤ M_i`.
    pub fn with_bounds(mut self, bounds: Vec<(S, S)>) -> Result<Self> {
        if bounds.len() != self.n() {
            return Err(dimension(format!("{} bounds for {} neurons", bounds.len(), self.n())));
        }
        if let Some((m, big_m)) = bounds.iter().find(|(m, big_m)| !(*m >= S::zero() && m <= big_m)) {
            return Err(domain(format!("derivative bounds ({m}, {big_m}) violate 0 <= m <= M")));
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[S] {
        &self.r
    }

    pub fn weights(&self) -> &Matrix<S> {
        &self.w
    }

    pub fn input(&self) -> &[S] {
        &self.u
    }

    pub fn activations(&self) -> &[Activation<S>] {
        &self.activations
    }

    pub fn derivative_bounds(&self) -> &[(S, S)] {
        &self.bounds
    }

    pub fn field(&self, x: &[S]) -> Vec<S> {
        let phi: Vec<S> = x.iter().zip(&self.activations).map(|(&xi, a)| a.eval(xi)).collect();
        let wphi = self.w.mul_vec(&phi);
        (0..self.n())
            .map(|i| -x[i] / self.r[i] + wphi[i] + self.u[i])
            .collect()
    }

    /// `J(x) = -diag(1/r) + W diag(φ'(x))`.
    pub fn jacobian(&self, x: &[S]) -> Matrix<S> {
        let n = self.n();
        let dphi: Vec<S> = x
            .iter()
            .zip(&self.activations)
            .map(|(&xi, a)| a.derivative(xi))
            .collect();
        Matrix::from_fn(n, n, |i, j| {
            let v = self.w[(i, j)] * dphi[j];
            if i == j {
                v - self.r[i].recip()
            } else {
                v
            }
        })
    }
}

/// Free-function form of [`HopfieldModel::field`].
pub fn hopfield_field<S: Real>(model: &HopfieldModel<S>, x: &[S]) -> Vec<S> {
    model.field(x)
}

/// Free-function form of [`HopfieldModel::jacobian`].
pub fn hopfield_jacobian<S: Real>(model: &HopfieldModel<S>, x: &[S]) -> Matrix<S> {
    model.jacobian(x)
}
