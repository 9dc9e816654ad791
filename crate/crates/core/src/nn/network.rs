use rand::Rng;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Affine map `y = W x + b` with `W` stored `(out_dim, in_dim)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    in_dim: usize,
    out_dim: usize,
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Real> Dense<T> {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Dense {
            in_dim,
            out_dim,
            weights: vec![T::zero(); in_dim * out_dim],
            bias: vec![T::zero(); out_dim],
        }
    }

    /// Fan-in scaled uniform init, `U(-1/sqrt(in), 1/sqrt(in))` for weights and biases.
    pub fn fan_in_uniform<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (in_dim.max(1) as f64).sqrt();
        let mut draw = || T::lit(rng.random_range(-bound..=bound));
        let weights = (0..in_dim * out_dim).map(|_| draw()).collect();
        let bias = (0..out_dim).map(|_| draw()).collect();
        Dense {
            in_dim,
            out_dim,
            weights,
            bias,
        }
    }

    pub fn from_parts(in_dim: usize, out_dim: usize, weights: Vec<T>, bias: Vec<T>) -> Result<Self> {
        if weights.len() != in_dim * out_dim || bias.len() != out_dim {
            return Err(Error::domain(format!(
                "dense {in_dim}->{out_dim} needs {} weights and {out_dim} biases, got {} and {}",
                in_dim * out_dim,
                weights.len(),
                bias.len()
            )));
        }
        Ok(Dense {
            in_dim,
            out_dim,
            weights,
            bias,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn forward(&self, x: &Matrix<T>) -> Matrix<T> {
        assert_eq!(x.cols(), self.in_dim, "dense input width");
        let mut out = Matrix::zeros(x.rows(), self.out_dim);
        for b in 0..x.rows() {
            let xr = x.row(b);
            let orow = out.row_mut(b);
            for (o, slot) in orow.iter_mut().enumerate() {
                let w = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
                let mut acc = self.bias[o];
                for (wi, xi) in w.iter().zip(xr) {
                    acc += *wi * *xi;
                }
                *slot = acc;
            }
        }
        out
    }

    /// Returns `(dW, db, dX)` for upstream gradient `dy` at input `x`.
    pub fn backward(&self, x: &Matrix<T>, dy: &Matrix<T>) -> (Vec<T>, Vec<T>, Matrix<T>) {
        let mut dw = vec![T::zero(); self.weights.len()];
        let mut db = vec![T::zero(); self.out_dim];
        let mut dx = Matrix::zeros(x.rows(), self.in_dim);
        for b in 0..x.rows() {
            let xr = x.row(b);
            let dyr = dy.row(b);
            let dxr = dx.row_mut(b);
            for (o, &g) in dyr.iter().enumerate() {
                if g == T::zero() {
                    continue;
                }
                db[o] += g;
                let w = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
                let dwr = &mut dw[o * self.in_dim..(o + 1) * self.in_dim];
                for i in 0..self.in_dim {
                    dwr[i] += g * xr[i];
                    dxr[i] += g * w[i];
                }
            }
        }
        (dw, db, dx)
    }
}

#[derive(Debug, Clone)]
struct Tape<T> {
    /// Input to each layer.
    inputs: Vec<Matrix<T>>,
    /// Pre-activation output of each layer.
    pre: Vec<Matrix<T>>,
}

/// Gradients of the backbone, `(dW, db)` per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGrads<T> {
    pub layers: Vec<(Vec<T>, Vec<T>)>,
    pub input: Matrix<T>,
}

/// Multilayer perceptron backbone with ReLU after every layer.
///
/// The output is the last hidden representation; heads attach on top. With no
/// hidden layers the backbone is the identity.
#[derive(Debug, Clone)]
pub struct Network<T> {
    input_dim: usize,
    layers: Vec<Dense<T>>,
    tape: Option<Tape<T>>,
}

impl<T: PartialEq> PartialEq for Network<T> {
    fn eq(&self, other: &Self) -> bool {
        self.input_dim == other.input_dim && self.layers == other.layers
    }
}

impl<T: Real> Network<T> {
    pub fn new<R: Rng + ?Sized>(input_dim: usize, hidden: &[usize], rng: &mut R) -> Result<Self> {
        if input_dim == 0 || hidden.contains(&0) {
            return Err(Error::domain("layer widths must be positive"));
        }
        let mut layers = Vec::with_capacity(hidden.len());
        let mut prev = input_dim;
        for &h in hidden {
            layers.push(Dense::fan_in_uniform(prev, h, rng));
            prev = h;
        }
        Ok(Network {
            input_dim,
            layers,
            tape: None,
        })
    }

    pub fn from_layers(input_dim: usize, layers: Vec<Dense<T>>) -> Result<Self> {
        let mut prev = input_dim;
        for (i, l) in layers.iter().enumerate() {
            if l.in_dim() != prev {
                return Err(Error::domain(format!(
                    "layer {i} expects width {}, previous layer gives {prev}",
                    l.in_dim()
                )));
            }
            prev = l.out_dim();
        }
        Ok(Network {
            input_dim,
            layers,
            tape: None,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, Dense::out_dim)
    }

    pub fn layers(&self) -> &[Dense<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense<T>] {
        &mut self.layers
    }

    fn check_width(&self, x: &Matrix<T>) -> Result<()> {
        if x.cols() != self.input_dim {
            return Err(Error::domain(format!(
                "batch has {} columns, network expects {}",
                x.cols(),
                self.input_dim
            )));
        }
        Ok(())
    }

    /// Penultimate activations without recording anything.
    pub fn forward(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_width(x)?;
        let mut h = x.clone();
        for layer in &self.layers {
            h = layer.forward(&h);
            relu_in_place(&mut h);
        }
        Ok(h)
    }

    /// Forward pass that keeps what [`Network::backward`] needs.
    pub fn forward_recorded(&mut self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_width(x)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut h = x.clone();
        for layer in &self.layers {
            let z = layer.forward(&h);
            inputs.push(h);
            h = z.clone();
            relu_in_place(&mut h);
            pre.push(z);
        }
        // identity backbone still needs its input for the input gradient shape
        if self.layers.is_empty() {
            inputs.push(x.clone());
        }
        self.tape = Some(Tape { inputs, pre });
        Ok(h)
    }

    /// Backpropagate `grad_out` (gradient w.r.t. the forward output).
    ///
    /// Consumes the recorded tape; a second call without a new forward pass fails.
    pub fn backward(&mut self, grad_out: &Matrix<T>) -> Result<NetworkGrads<T>> {
        let tape = self
            .tape
            .take()
            .ok_or_else(|| Error::State("backward called without a recorded forward pass".into()))?;
        let rows = tape.inputs[0].rows();
        if grad_out.rows() != rows || grad_out.cols() != self.output_dim() {
            return Err(Error::domain(format!(
                "gradient is {}x{}, forward output was {}x{}",
                grad_out.rows(),
                grad_out.cols(),
                rows,
                self.output_dim()
            )));
        }
        let mut grads = vec![(Vec::new(), Vec::new()); self.layers.len()];
        let mut g = grad_out.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            for (gv, zv) in g.as_mut_slice().iter_mut().zip(tape.pre[i].as_slice()) {
                if *zv <= T::zero() {
                    *gv = T::zero();
                }
            }
            let (dw, db, dx) = layer.backward(&tape.inputs[i], &g);
            grads[i] = (dw, db);
            g = dx;
        }
        Ok(NetworkGrads {
            layers: grads,
            input: g,
        })
    }

    /// Sign of every ReLU pre-activation for `x`.
    ///
    /// Finite-difference checks compare patterns to skip coordinates that straddle a kink.
    pub fn activation_pattern(&self, x: &Matrix<T>) -> Result<Vec<bool>> {
        self.check_width(x)?;
        let mut pattern = Vec::new();
        let mut h = x.clone();
        for layer in &self.layers {
            h = layer.forward(&h);
            pattern.extend(h.as_slice().iter().map(|v| *v > T::zero()));
            relu_in_place(&mut h);
        }
        Ok(pattern)
    }

    pub fn params(&self) -> Vec<&[T]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut [T]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }
}

fn relu_in_place<T: Real>(m: &mut Matrix<T>) {
    for v in m.as_mut_slice() {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_backbone() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = Network::<f64>::new(3, &[], &mut rng).unwrap();
        let x = Matrix::from_vec(2, 3, vec![1.0, -2.0, 0.5, 0.0, 3.0, -1.0]).unwrap();
        assert_eq!(net.forward(&x).unwrap(), x);
    }

    #[test]
    fn batch_shape_and_determinism() {
        let x = Matrix::from_vec(4, 2, vec![0.1, 0.2, 0.3, -0.4, 1.0, 2.0, -1.0, 0.0]).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            Network::<f64>::new(2, &[5, 3], &mut rng)
                .unwrap()
                .forward(&x)
                .unwrap()
        };
        let a = run();
        assert_eq!((a.rows(), a.cols()), (4, 3));
        let b = run();
        let bits = |m: &Matrix<f64>| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn width_mismatch_is_domain_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = Network::<f64>::new(3, &[4], &mut rng).unwrap();
        let x = Matrix::zeros(2, 2);
        assert!(matches!(net.forward(&x), Err(Error::Domain(_))));
    }

    #[test]
    fn backward_needs_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = Network::<f64>::new(2, &[2], &mut rng).unwrap();
        let g = Matrix::zeros(1, 2);
        assert!(matches!(net.backward(&g), Err(Error::State(_))));
        net.forward_recorded(&Matrix::zeros(1, 2)).unwrap();
        assert!(net.backward(&g).is_ok());
        assert!(matches!(net.backward(&g), Err(Error::State(_))));
    }

    #[test]
    fn linear_layer_squared_loss_closed_form() {
        // L = 1/B * sum (x.w - y)^2  =>  dL/dw = 2/B * X^T (Xw - y)
        let x = Matrix::from_vec(3, 2, vec![1.0, 2.0, -1.0, 0.5, 0.0, 3.0]).unwrap();
        let y = [1.0, -2.0, 0.5];
        let w = vec![0.3, -0.7];
        let layer = Dense::from_parts(2, 1, w.clone(), vec![0.0]).unwrap();
        let out = layer.forward(&x);
        let b = 3.0;
        let dy = Matrix::from_vec(3, 1, (0..3).map(|i| 2.0 * (out.get(i, 0) - y[i]) / b).collect()).unwrap();
        let (dw, _, _) = layer.backward(&x, &dy);
        for (j, got) in dw.iter().enumerate() {
            let expected: f64 = (0..3)
                .map(|i| x.get(i, j) * (x.get(i, 0) * w[0] + x.get(i, 1) * w[1] - y[i]))
                .sum::<f64>()
                * 2.0
                / b;
            assert!((got - expected).abs() < 1e-12);
        }
    }
}
