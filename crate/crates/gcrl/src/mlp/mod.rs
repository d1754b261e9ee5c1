//! Minimal dense-network core: forward pass, backpropagation, Adam, Huber loss.
//!
//! Two fixed Q-network architectures are built on top of a generic layer
//! stack: a plain 3x256 MLP and a residual network of four blocks (each block
//! is four 256-wide dense layers with an additive skip from block input to
//! block output). The stack is generic over the scalar type: production code
//! runs `f32`, gradient-check oracles instantiate the identical code at `f64`.
//!
//! Parameters are exposed as one flat vector (layer by layer, weights
//! row-major then bias) — the optimizer and the checkpoint format both work
//! on that view.
//!
//! Shape mismatches are programmer errors and panic; numerical divergence
//! (non-finite gradients) is reported as [`Error::Diverged`] so the harness
//! can abort a run cleanly.

mod adam;
mod checkpoint;
mod loss;

pub use adam::AdamState;
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use loss::huber_loss;

use ndarray::{Array1, Array2, Axis, Zip};
use num_traits::{Float, FromPrimitive};
use rand::distributions::uniform::SampleUniform;
use rand::Rng;

use crate::error::{Error, Result};

/// Hidden width shared by both architectures.
pub const HIDDEN_WIDTH: usize = 256;

/// Scalar type the network math is generic over.
pub trait Scalar:
    Float
    + FromPrimitive
    + ndarray::LinalgScalar
    + SampleUniform
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[inline]
fn c<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("constant representable")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply<F: Scalar>(self, z: &Array2<F>) -> Array2<F> {
        match self {
            Activation::Relu => z.mapv(|v| if v > F::zero() { v } else { F::zero() }),
            Activation::Identity => z.clone(),
        }
    }
}

/// One fully connected layer: `act(x · Wᵀ + b)` with `W` shaped `[out × in]`.
#[derive(Clone, Debug)]
pub struct DenseLayer<F: Scalar> {
    pub weights: Array2<F>,
    pub bias: Array1<F>,
    pub activation: Activation,
}

impl<F: Scalar> DenseLayer<F> {
    /// Kaiming-uniform fan-in init (`U(±sqrt(6/fan_in))`), zero bias.
    pub fn kaiming(in_width: usize, out_width: usize, activation: Activation, rng: &mut impl Rng) -> Self {
        let bound: F = c::<F>((6.0 / in_width as f64).sqrt());
        let weights = Array2::from_shape_fn((out_width, in_width), |_| rng.gen_range(-bound..bound));
        DenseLayer {
            weights,
            bias: Array1::zeros(out_width),
            activation,
        }
    }

    pub fn zeros(in_width: usize, out_width: usize, activation: Activation) -> Self {
        DenseLayer {
            weights: Array2::zeros((out_width, in_width)),
            bias: Array1::zeros(out_width),
            activation,
        }
    }

    pub fn in_width(&self) -> usize {
        self.weights.ncols()
    }

    pub fn out_width(&self) -> usize {
        self.weights.nrows()
    }

    pub fn param_count(&self) -> usize {
        self.out_width() * (self.in_width() + 1)
    }

    fn preactivation(&self, x: &Array2<F>) -> Array2<F> {
        assert_eq!(
            x.ncols(),
            self.in_width(),
            "dense layer fed batch of width {} (expected {})",
            x.ncols(),
            self.in_width()
        );
        x.dot(&self.weights.t()) + &self.bias
    }

    pub fn forward(&self, x: &Array2<F>) -> Array2<F> {
        self.activation.apply(&self.preactivation(x))
    }

    /// Single-sample forward; the mat-vec path is much cheaper than a
    /// batch-of-one GEMM and dominates acting time in the training loop.
    fn forward_one(&self, x: &Array1<F>) -> Array1<F> {
        let mut z = self.weights.dot(x) + &self.bias;
        if self.activation == Activation::Relu {
            z.mapv_inplace(|v| if v > F::zero() { v } else { F::zero() });
        }
        z
    }
}

/// Four 256-wide dense layers with an additive identity skip: `out = inner(x) + x`.
///
/// The final inner layer is linear, so zeroing the inner parameters turns the
/// block into the identity map exactly.
#[derive(Clone, Debug)]
pub struct ResidualBlock<F: Scalar> {
    pub layers: Vec<DenseLayer<F>>,
}

impl<F: Scalar> ResidualBlock<F> {
    /// Kaiming init for the three ReLU layers; the final linear layer starts
    /// at zero so a fresh block is the identity map and stacking blocks does
    /// not inflate the output scale.
    pub fn kaiming(width: usize, rng: &mut impl Rng) -> Self {
        let mut layers: Vec<DenseLayer<F>> = (0..3)
            .map(|_| DenseLayer::kaiming(width, width, Activation::Relu, rng))
            .collect();
        layers.push(DenseLayer::zeros(width, width, Activation::Identity));
        ResidualBlock { layers }
    }

    pub fn width(&self) -> usize {
        self.layers[0].in_width()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.param_count()).sum()
    }

    /// Zero every inner parameter, making the block the identity map.
    pub fn zero_inner(&mut self) {
        for layer in &mut self.layers {
            layer.weights.fill(F::zero());
            layer.bias.fill(F::zero());
        }
    }

    pub fn forward(&self, x: &Array2<F>) -> Array2<F> {
        let mut h = self.layers[0].forward(x);
        for layer in &self.layers[1..] {
            h = layer.forward(&h);
        }
        h + x
    }
}

#[derive(Clone, Debug)]
pub enum Block<F: Scalar> {
    Dense(DenseLayer<F>),
    Residual(ResidualBlock<F>),
}

impl<F: Scalar> Block<F> {
    fn out_width(&self) -> usize {
        match self {
            Block::Dense(l) => l.out_width(),
            Block::Residual(b) => b.width(),
        }
    }

    fn param_count(&self) -> usize {
        match self {
            Block::Dense(l) => l.param_count(),
            Block::Residual(b) => b.param_count(),
        }
    }
}

/// Activations cached by [`Network::forward_cached`]; consumed by
/// [`Network::backward`]. Holding one is proof the forward pass ran.
pub struct ForwardCache<F: Scalar> {
    /// `(input, preactivation)` per dense layer, in forward order.
    steps: Vec<(Array2<F>, Array2<F>)>,
    batch: usize,
}

/// A stack of dense layers and residual blocks.
#[derive(Clone, Debug)]
pub struct Network<F: Scalar> {
    pub blocks: Vec<Block<F>>,
    input_width: usize,
}

impl<F: Scalar> Network<F> {
    pub fn new(input_width: usize) -> Self {
        assert!(input_width > 0, "network input width must be positive");
        Network {
            blocks: Vec::new(),
            input_width,
        }
    }

    fn current_width(&self) -> usize {
        self.blocks.last().map_or(self.input_width, |b| b.out_width())
    }

    pub fn push_dense(&mut self, out_width: usize, activation: Activation, rng: &mut impl Rng) {
        let layer = DenseLayer::kaiming(self.current_width(), out_width, activation, rng);
        self.blocks.push(Block::Dense(layer));
    }

    pub fn push_dense_layer(&mut self, layer: DenseLayer<F>) {
        assert_eq!(layer.in_width(), self.current_width(), "layer width mismatch");
        self.blocks.push(Block::Dense(layer));
    }

    pub fn push_residual(&mut self, rng: &mut impl Rng) {
        let block = ResidualBlock::kaiming(self.current_width(), rng);
        self.blocks.push(Block::Residual(block));
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.current_width()
    }

    pub fn param_count(&self) -> usize {
        self.blocks.iter().map(|b| b.param_count()).sum()
    }

    /// Dense layers in forward order, flattened through residual blocks.
    fn dense_layers(&self) -> Vec<&DenseLayer<F>> {
        let mut out = Vec::new();
        for block in &self.blocks {
            match block {
                Block::Dense(l) => out.push(l),
                Block::Residual(b) => out.extend(b.layers.iter()),
            }
        }
        out
    }

    fn dense_layers_mut(&mut self) -> Vec<&mut DenseLayer<F>> {
        let mut out = Vec::new();
        for block in &mut self.blocks {
            match block {
                Block::Dense(l) => out.push(l),
                Block::Residual(b) => out.extend(b.layers.iter_mut()),
            }
        }
        out
    }

    pub fn forward(&self, x: &Array2<F>) -> Array2<F> {
        assert_eq!(x.ncols(), self.input_width, "batch width mismatch");
        let mut h = x.clone();
        for block in &self.blocks {
            h = match block {
                Block::Dense(l) => l.forward(&h),
                Block::Residual(b) => b.forward(&h),
            };
        }
        h
    }

    /// Forward a single input through the mat-vec path.
    pub fn forward_one(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.input_width, "input width mismatch");
        let mut h = Array1::from_iter(x.iter().copied());
        for block in &self.blocks {
            match block {
                Block::Dense(l) => h = l.forward_one(&h),
                Block::Residual(b) => {
                    let mut inner = b.layers[0].forward_one(&h);
                    for l in &b.layers[1..] {
                        inner = l.forward_one(&inner);
                    }
                    h = inner + &h;
                }
            }
        }
        h.to_vec()
    }

    /// Forward pass that records the per-layer activations needed by
    /// [`Network::backward`].
    pub fn forward_cached(&self, x: &Array2<F>) -> (Array2<F>, ForwardCache<F>) {
        assert_eq!(x.ncols(), self.input_width, "batch width mismatch");
        let mut steps = Vec::new();
        let mut h = x.clone();
        for block in &self.blocks {
            match block {
                Block::Dense(l) => {
                    let z = l.preactivation(&h);
                    let y = l.activation.apply(&z);
                    steps.push((h, z));
                    h = y;
                }
                Block::Residual(b) => {
                    let block_in = h.clone();
                    let mut inner = h;
                    for l in &b.layers {
                        let z = l.preactivation(&inner);
                        let y = l.activation.apply(&z);
                        steps.push((inner, z));
                        inner = y;
                    }
                    h = inner + &block_in;
                }
            }
        }
        let batch = x.nrows();
        (h, ForwardCache { steps, batch })
    }

    /// dLoss/dParameters as a flat vector, given dLoss/dOutput for the batch
    /// that produced `cache`.
    pub fn backward(&self, cache: &ForwardCache<F>, loss_grad: &Array2<F>) -> Vec<F> {
        assert_eq!(loss_grad.nrows(), cache.batch, "loss grad batch mismatch");
        assert_eq!(loss_grad.ncols(), self.output_width(), "loss grad width mismatch");

        let layers = self.dense_layers();
        assert_eq!(layers.len(), cache.steps.len(), "cache does not match network");

        // Flat offsets per dense layer, forward order.
        let mut offsets = Vec::with_capacity(layers.len());
        let mut off = 0;
        for l in &layers {
            offsets.push(off);
            off += l.param_count();
        }
        let mut grad = vec![F::zero(); off];

        let mut d_out = loss_grad.clone();
        let mut step = cache.steps.len();
        for block in self.blocks.iter().rev() {
            match block {
                Block::Dense(_) => {
                    step -= 1;
                    d_out = backprop_dense(layers[step], &cache.steps[step], &d_out, &mut grad[offsets[step]..]);
                }
                Block::Residual(b) => {
                    let skip = d_out.clone();
                    for _ in 0..b.layers.len() {
                        step -= 1;
                        d_out = backprop_dense(layers[step], &cache.steps[step], &d_out, &mut grad[offsets[step]..]);
                    }
                    d_out = d_out + &skip;
                }
            }
        }
        grad
    }

    /// All parameters as one flat vector: layer by layer in forward order,
    /// weights row-major then bias.
    pub fn params_flat(&self) -> Vec<F> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in self.dense_layers() {
            out.extend(l.weights.iter().copied());
            out.extend(l.bias.iter().copied());
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[F]) {
        assert_eq!(params.len(), self.param_count(), "flat parameter length mismatch");
        let mut off = 0;
        for l in self.dense_layers_mut() {
            let nw = l.weights.len();
            l.weights
                .as_slice_mut()
                .expect("weights contiguous")
                .copy_from_slice(&params[off..off + nw]);
            off += nw;
            let nb = l.bias.len();
            l.bias
                .as_slice_mut()
                .expect("bias contiguous")
                .copy_from_slice(&params[off..off + nb]);
            off += nb;
        }
    }
}

/// Backprop through one dense layer; writes dW and db into `grad_slice` and
/// returns dLoss/dInput.
fn backprop_dense<F: Scalar>(
    layer: &DenseLayer<F>,
    step: &(Array2<F>, Array2<F>),
    d_out: &Array2<F>,
    grad_slice: &mut [F],
) -> Array2<F> {
    let (input, preact) = step;
    let dz = match layer.activation {
        Activation::Identity => d_out.clone(),
        Activation::Relu => {
            let mut dz = d_out.clone();
            Zip::from(&mut dz).and(preact).for_each(|d, &z| {
                if z <= F::zero() {
                    *d = F::zero();
                }
            });
            dz
        }
    };
    let dw = dz.t().dot(input);
    let db = dz.sum_axis(Axis(0));
    let nw = dw.len();
    grad_slice[..nw].copy_from_slice(dw.as_slice().expect("dw contiguous"));
    for (dst, src) in grad_slice[nw..nw + db.len()].iter_mut().zip(db.iter()) {
        *dst = *src;
    }
    dz.dot(&layer.weights)
}

/// The two fixed Q-network architectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arch {
    Simple3x256,
    Residual4Blocks,
}

impl Arch {
    pub fn name(self) -> &'static str {
        match self {
            Arch::Simple3x256 => "simple3x256",
            Arch::Residual4Blocks => "residual4blocks",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "simple3x256" => Ok(Arch::Simple3x256),
            "residual4blocks" => Ok(Arch::Residual4Blocks),
            other => Err(Error::Config(format!("unknown architecture '{other}'"))),
        }
    }

    pub fn param_count(self, input_width: usize, output_width: usize) -> usize {
        let dense = |i: usize, o: usize| o * (i + 1);
        match self {
            Arch::Simple3x256 => {
                dense(input_width, HIDDEN_WIDTH)
                    + 2 * dense(HIDDEN_WIDTH, HIDDEN_WIDTH)
                    + dense(HIDDEN_WIDTH, output_width)
            }
            Arch::Residual4Blocks => {
                dense(input_width, HIDDEN_WIDTH)
                    + 16 * dense(HIDDEN_WIDTH, HIDDEN_WIDTH)
                    + dense(HIDDEN_WIDTH, output_width)
            }
        }
    }
}

/// Action-value network: encoded observation (+ encoded goal) in, one Q-value
/// per discrete action out. The output layer is always linear.
#[derive(Clone, Debug)]
pub struct QNetwork<F: Scalar> {
    pub arch: Arch,
    pub net: Network<F>,
}

impl<F: Scalar> QNetwork<F> {
    pub fn new(arch: Arch, input_width: usize, n_actions: usize, rng: &mut impl Rng) -> Self {
        let mut net = Network::new(input_width);
        match arch {
            Arch::Simple3x256 => {
                net.push_dense(HIDDEN_WIDTH, Activation::Relu, rng);
                net.push_dense(HIDDEN_WIDTH, Activation::Relu, rng);
                net.push_dense(HIDDEN_WIDTH, Activation::Relu, rng);
            }
            Arch::Residual4Blocks => {
                net.push_dense(HIDDEN_WIDTH, Activation::Relu, rng);
                for _ in 0..4 {
                    net.push_residual(rng);
                }
            }
        }
        net.push_dense(n_actions, Activation::Identity, rng);
        debug_assert_eq!(net.param_count(), arch.param_count(input_width, n_actions));
        QNetwork { arch, net }
    }

    pub fn input_width(&self) -> usize {
        self.net.input_width()
    }

    pub fn output_width(&self) -> usize {
        self.net.output_width()
    }

    pub fn param_count(&self) -> usize {
        self.net.param_count()
    }

    pub fn forward(&self, x: &Array2<F>) -> Array2<F> {
        self.net.forward(x)
    }

    pub fn forward_one(&self, x: &[F]) -> Vec<F> {
        self.net.forward_one(x)
    }

    pub fn forward_cached(&self, x: &Array2<F>) -> (Array2<F>, ForwardCache<F>) {
        self.net.forward_cached(x)
    }

    pub fn backward(&self, cache: &ForwardCache<F>, loss_grad: &Array2<F>) -> Vec<F> {
        self.net.backward(cache, loss_grad)
    }

    pub fn params_flat(&self) -> Vec<F> {
        self.net.params_flat()
    }

    pub fn set_params_flat(&mut self, params: &[F]) {
        self.net.set_params_flat(params)
    }
}
