//! Differentiable real-valued functions of a joint strategy profile.

use std::fmt;
use std::sync::Arc;

use super::strategy::StrategyProfile;

/// A real-valued function of the joint profile with an analytic gradient.
///
/// `partial_grad(x, i)` must equal `grad(x)` restricted to player `i`'s block
/// exactly. The default implementation guarantees this by slicing; overrides
/// must keep it (e.g. by building `grad` from the partials).
pub trait DifferentiableFn: Send + Sync {
    fn eval(&self, x: &StrategyProfile) -> f64;

    fn grad(&self, x: &StrategyProfile) -> Vec<f64>;

    fn partial_grad(&self, x: &StrategyProfile, player: usize) -> Vec<f64> {
        self.grad(x)[x.block_range(player)].to_vec()
    }
}

pub type SharedFn = Arc<dyn DifferentiableFn>;

type EvalClosure = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradClosure = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Function given by closures over the flat joint vector.
#[derive(Clone)]
pub struct ClosureFn {
    eval: Arc<EvalClosure>,
    grad: Arc<GradClosure>,
}

impl ClosureFn {
    pub fn new<E, G>(eval: E, grad: G) -> Self
    where
        E: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        ClosureFn {
            eval: Arc::new(eval),
            grad: Arc::new(grad),
        }
    }

    pub fn shared(self) -> SharedFn {
        Arc::new(self)
    }
}

impl fmt::Debug for ClosureFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ClosureFn")
    }
}

impl DifferentiableFn for ClosureFn {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        (self.eval)(x.as_slice())
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        (self.grad)(x.as_slice())
    }
}

/// `f(x) = <coeffs, x> + constant`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFn {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl LinearFn {
    pub fn new(coeffs: Vec<f64>, constant: f64) -> Self {
        LinearFn { coeffs, constant }
    }
}

impl DifferentiableFn for LinearFn {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        self.constant
            + self
                .coeffs
                .iter()
                .zip(x.as_slice())
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    fn grad(&self, _x: &StrategyProfile) -> Vec<f64> {
        self.coeffs.clone()
    }
}

/// Constant function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantFn(pub f64);

impl DifferentiableFn for ConstantFn {
    fn eval(&self, _x: &StrategyProfile) -> f64 {
        self.0
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        vec![0.0; x.dim()]
    }
}

/// `-f`; used to store upper-bound constraints in lower-bound form.
#[derive(Clone)]
pub struct Negated(pub SharedFn);

impl DifferentiableFn for Negated {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        -self.0.eval(x)
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        self.0.grad(x).into_iter().map(|g| -g).collect()
    }

    fn partial_grad(&self, x: &StrategyProfile, player: usize) -> Vec<f64> {
        self.0.partial_grad(x, player).into_iter().map(|g| -g).collect()
    }
}

/// Univariate polynomial with coefficients listed lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != 0.0)
            .unwrap_or(0)
    }
}
