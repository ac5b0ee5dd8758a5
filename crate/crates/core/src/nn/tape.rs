//! Reverse-mode differentiation over dense matrix operations.
//!
//! Every node stores its forward value eagerly. [`Tape::grad`] builds the
//! backward pass out of ordinary tape operations, so a gradient is itself a
//! differentiable expression: differentiating it again gives second-order
//! terms such as the parameter gradient of a gradient penalty.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use super::matrix::Matrix;
use super::NnError;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Div(Var, Var),
    Scale(Var, f64),
    OneMinus(Var),
    Tanh(Var),
    Sigmoid(Var),
    Softplus(Var),
    Sqrt(Var),
    Softmax(Var),
    LogSumExp(Var),
    Transpose(Var),
    ConcatCols(Vec<Var>),
    SliceCols { src: Var, start: usize, len: usize },
    PadCols { src: Var, start: usize, total: usize },
    SumAll(Var),
    SumRows(Var),
    SumCols(Var),
    BroadcastScalar { src: Var, rows: usize, cols: usize },
    BroadcastRows { src: Var, rows: usize },
    BroadcastCols { src: Var, cols: usize },
}

#[derive(Debug, Clone)]
struct Node {
    op: Op,
    value: Matrix,
    requires_grad: bool,
}

trait Values {
    fn val(&self, v: Var) -> &Matrix;
}

impl Values for [Node] {
    fn val(&self, v: Var) -> &Matrix {
        &self[v.0].value
    }
}

impl Values for [Matrix] {
    fn val(&self, v: Var) -> &Matrix {
        &self[v.0]
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn softmax_rows(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    let cols = m.cols();
    for r in 0..m.rows() {
        let row = &mut out.data_mut()[r * cols..(r + 1) * cols];
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for x in row.iter_mut() {
            *x = (*x - max).exp();
            total += *x;
        }
        for x in row.iter_mut() {
            *x /= total;
        }
    }
    out
}

fn logsumexp_rows(m: &Matrix) -> Matrix {
    let out: Vec<f64> = (0..m.rows())
        .map(|r| {
            let row = m.row_slice(r);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            max + row.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
        })
        .collect();
    Matrix::from_vec(m.rows(), 1, out)
}

fn eval_op<V: Values + ?Sized>(op: &Op, vals: &V) -> Matrix {
    match *op {
        Op::Leaf => unreachable!("leaves carry their own value"),
        Op::MatMul(a, b) => vals.val(a).matmul(vals.val(b)),
        Op::Add(a, b) => vals.val(a).zip_map(vals.val(b), |x, y| x + y),
        Op::Sub(a, b) => vals.val(a).zip_map(vals.val(b), |x, y| x - y),
        Op::Mul(a, b) => vals.val(a).zip_map(vals.val(b), |x, y| x * y),
        Op::Div(a, b) => vals.val(a).zip_map(vals.val(b), |x, y| x / y),
        Op::Scale(a, c) => vals.val(a).map(|x| x * c),
        Op::OneMinus(a) => vals.val(a).map(|x| 1.0 - x),
        Op::Tanh(a) => vals.val(a).map(|x| x.tanh()),
        Op::Sigmoid(a) => vals.val(a).map(sigmoid),
        Op::Softplus(a) => vals.val(a).map(softplus),
        Op::Sqrt(a) => vals.val(a).map(|x| x.sqrt()),
        Op::Softmax(a) => softmax_rows(vals.val(a)),
        Op::LogSumExp(a) => logsumexp_rows(vals.val(a)),
        Op::Transpose(a) => vals.val(a).transpose(),
        Op::ConcatCols(ref parts) => {
            let refs: Vec<&Matrix> = parts.iter().map(|&p| vals.val(p)).collect();
            Matrix::concat_cols(&refs)
        }
        Op::SliceCols { src, start, len } => vals.val(src).slice_cols(start, len),
        Op::PadCols { src, start, total } => {
            let m = vals.val(src);
            let mut out = Matrix::zeros(m.rows(), total);
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    out.set(r, start + c, m.get(r, c));
                }
            }
            out
        }
        Op::SumAll(a) => Matrix::scalar(vals.val(a).sum()),
        Op::SumRows(a) => {
            let m = vals.val(a);
            let mut out = vec![0.0; m.cols()];
            for r in 0..m.rows() {
                for (o, &x) in out.iter_mut().zip(m.row_slice(r)) {
                    *o += x;
                }
            }
            Matrix::from_vec(1, m.cols(), out)
        }
        Op::SumCols(a) => {
            let m = vals.val(a);
            let out = (0..m.rows()).map(|r| m.row_slice(r).iter().sum()).collect();
            Matrix::from_vec(m.rows(), 1, out)
        }
        Op::BroadcastScalar { src, rows, cols } => Matrix::filled(rows, cols, vals.val(src).item()),
        Op::BroadcastRows { src, rows } => {
            let m = vals.val(src);
            let mut out = Vec::with_capacity(rows * m.cols());
            for _ in 0..rows {
                out.extend_from_slice(m.data());
            }
            Matrix::from_vec(rows, m.cols(), out)
        }
        Op::BroadcastCols { src, cols } => {
            let m = vals.val(src);
            let mut out = Vec::with_capacity(m.rows() * cols);
            for &x in m.data() {
                out.extend(core::iter::repeat_n(x, cols));
            }
            Matrix::from_vec(m.rows(), cols, out)
        }
    }
}

fn op_inputs(op: &Op) -> Vec<Var> {
    match *op {
        Op::Leaf => Vec::new(),
        Op::MatMul(a, b) | Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) | Op::Div(a, b) => {
            vec![a, b]
        }
        Op::Scale(a, _)
        | Op::OneMinus(a)
        | Op::Tanh(a)
        | Op::Sigmoid(a)
        | Op::Softplus(a)
        | Op::Sqrt(a)
        | Op::Softmax(a)
        | Op::LogSumExp(a)
        | Op::Transpose(a)
        | Op::SumAll(a)
        | Op::SumRows(a)
        | Op::SumCols(a) => vec![a],
        Op::ConcatCols(ref parts) => parts.clone(),
        Op::SliceCols { src, .. }
        | Op::PadCols { src, .. }
        | Op::BroadcastScalar { src, .. }
        | Op::BroadcastRows { src, .. }
        | Op::BroadcastCols { src, .. } => vec![src],
    }
}

/// Recorded computation. Single-writer; independent tapes may be evaluated
/// in parallel.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// A leaf that gradients may be taken with respect to.
    pub fn variable(&mut self, value: Matrix) -> Var {
        self.push_leaf(value, true)
    }

    /// A leaf treated as a constant.
    pub fn constant(&mut self, value: Matrix) -> Var {
        self.push_leaf(value, false)
    }

    fn push_leaf(&mut self, value: Matrix, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            op: Op::Leaf,
            value,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn push(&mut self, op: Op) -> Var {
        let value = eval_op(&op, self.nodes.as_slice());
        let requires_grad = op_inputs(&op)
            .iter()
            .any(|v| self.nodes[v.0].requires_grad);
        self.nodes.push(Node {
            op,
            value,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].value.shape()
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a).1, self.shape(b).0, "matmul shape mismatch");
        self.push(Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a), self.shape(b), "add shape mismatch");
        self.push(Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a), self.shape(b), "sub shape mismatch");
        self.push(Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a), self.shape(b), "mul shape mismatch");
        self.push(Op::Mul(a, b))
    }

    pub fn div(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a), self.shape(b), "div shape mismatch");
        self.push(Op::Div(a, b))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        self.push(Op::Scale(a, c))
    }

    /// `1 - a`, elementwise.
    pub fn one_minus(&mut self, a: Var) -> Var {
        self.push(Op::OneMinus(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        self.push(Op::Tanh(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        self.push(Op::Sigmoid(a))
    }

    pub fn softplus(&mut self, a: Var) -> Var {
        self.push(Op::Softplus(a))
    }

    pub fn sqrt(&mut self, a: Var) -> Var {
        self.push(Op::Sqrt(a))
    }

    /// Row-wise softmax.
    pub fn softmax(&mut self, a: Var) -> Var {
        self.push(Op::Softmax(a))
    }

    /// Row-wise log-sum-exp, n×k → n×1.
    pub fn logsumexp(&mut self, a: Var) -> Var {
        self.push(Op::LogSumExp(a))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        self.push(Op::Transpose(a))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "concat of nothing");
        if parts.len() == 1 {
            return parts[0];
        }
        let rows = self.shape(parts[0]).0;
        assert!(parts.iter().all(|&p| self.shape(p).0 == rows), "concat row mismatch");
        self.push(Op::ConcatCols(parts.to_vec()))
    }

    pub fn slice_cols(&mut self, src: Var, start: usize, len: usize) -> Var {
        assert!(start + len <= self.shape(src).1, "slice out of range");
        self.push(Op::SliceCols { src, start, len })
    }

    fn pad_cols(&mut self, src: Var, start: usize, total: usize) -> Var {
        self.push(Op::PadCols { src, start, total })
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        self.push(Op::SumAll(a))
    }

    /// Column sums, n×k → 1×k.
    pub fn sum_rows(&mut self, a: Var) -> Var {
        self.push(Op::SumRows(a))
    }

    /// Row sums, n×k → n×1.
    pub fn sum_cols(&mut self, a: Var) -> Var {
        self.push(Op::SumCols(a))
    }

    pub fn mean_all(&mut self, a: Var) -> Var {
        let (r, c) = self.shape(a);
        let s = self.sum_all(a);
        self.scale(s, 1.0 / (r * c) as f64)
    }

    pub fn broadcast_scalar(&mut self, src: Var, rows: usize, cols: usize) -> Var {
        assert_eq!(self.shape(src), (1, 1));
        self.push(Op::BroadcastScalar { src, rows, cols })
    }

    /// Repeat a 1×k row `rows` times.
    pub fn broadcast_rows(&mut self, src: Var, rows: usize) -> Var {
        assert_eq!(self.shape(src).0, 1);
        self.push(Op::BroadcastRows { src, rows })
    }

    /// Repeat an n×1 column `cols` times.
    pub fn broadcast_cols(&mut self, src: Var, cols: usize) -> Var {
        assert_eq!(self.shape(src).1, 1);
        self.push(Op::BroadcastCols { src, cols })
    }

    /// `x + 1ᵀb` for a 1×k bias row.
    pub fn add_row(&mut self, x: Var, bias: Var) -> Var {
        let rows = self.shape(x).0;
        let b = self.broadcast_rows(bias, rows);
        self.add(x, b)
    }

    pub fn square(&mut self, a: Var) -> Var {
        self.mul(a, a)
    }

    /// Gradients of the scalar `output` with respect to each of `wrt`.
    ///
    /// The returned handles are ordinary tape nodes and can be
    /// differentiated again.
    pub fn grad(&mut self, output: Var, wrt: &[Var]) -> Result<Vec<Var>, NnError> {
        let (r, c) = self.shape(output);
        if (r, c) != (1, 1) {
            return Err(NnError::NonScalar { rows: r, cols: c });
        }
        let mut grads: Vec<Option<Var>> = vec![None; output.0 + 1];
        grads[output.0] = Some(self.constant(Matrix::scalar(1.0)));

        for i in (0..=output.0).rev() {
            let Some(g) = grads[i] else { continue };
            if !self.nodes[i].requires_grad {
                continue;
            }
            let op = self.nodes[i].op.clone();
            let out = Var(i);
            let contributions: Vec<(Var, Var)> = match op {
                Op::Leaf => Vec::new(),
                Op::MatMul(a, b) => {
                    let mut v = Vec::new();
                    if self.nodes[a.0].requires_grad {
                        let bt = self.transpose(b);
                        v.push((a, self.matmul(g, bt)));
                    }
                    if self.nodes[b.0].requires_grad {
                        let at = self.transpose(a);
                        v.push((b, self.matmul(at, g)));
                    }
                    v
                }
                Op::Add(a, b) => vec![(a, g), (b, g)],
                Op::Sub(a, b) => {
                    let neg = self.scale(g, -1.0);
                    vec![(a, g), (b, neg)]
                }
                Op::Mul(a, b) => {
                    let mut v = Vec::new();
                    if self.nodes[a.0].requires_grad {
                        v.push((a, self.mul(g, b)));
                    }
                    if self.nodes[b.0].requires_grad {
                        v.push((b, self.mul(g, a)));
                    }
                    v
                }
                Op::Div(a, b) => {
                    let mut v = Vec::new();
                    if self.nodes[a.0].requires_grad {
                        v.push((a, self.div(g, b)));
                    }
                    if self.nodes[b.0].requires_grad {
                        let go = self.mul(g, out);
                        let q = self.div(go, b);
                        v.push((b, self.scale(q, -1.0)));
                    }
                    v
                }
                Op::Scale(a, k) => vec![(a, self.scale(g, k))],
                Op::OneMinus(a) => vec![(a, self.scale(g, -1.0))],
                Op::Tanh(a) => {
                    let t2 = self.square(out);
                    let d = self.one_minus(t2);
                    vec![(a, self.mul(g, d))]
                }
                Op::Sigmoid(a) => {
                    let om = self.one_minus(out);
                    let d = self.mul(out, om);
                    vec![(a, self.mul(g, d))]
                }
                Op::Softplus(a) => {
                    let s = self.sigmoid(a);
                    vec![(a, self.mul(g, s))]
                }
                Op::Sqrt(a) => {
                    let two_r = self.scale(out, 2.0);
                    vec![(a, self.div(g, two_r))]
                }
                Op::Softmax(a) => {
                    let cols = self.shape(a).1;
                    let gy = self.mul(g, out);
                    let dot = self.sum_cols(gy);
                    let dot_b = self.broadcast_cols(dot, cols);
                    let centered = self.sub(g, dot_b);
                    vec![(a, self.mul(out, centered))]
                }
                Op::LogSumExp(a) => {
                    let cols = self.shape(a).1;
                    let p = self.softmax(a);
                    let gb = self.broadcast_cols(g, cols);
                    vec![(a, self.mul(p, gb))]
                }
                Op::Transpose(a) => vec![(a, self.transpose(g))],
                Op::ConcatCols(parts) => {
                    let mut offset = 0;
                    let mut v = Vec::with_capacity(parts.len());
                    for p in parts {
                        let w = self.shape(p).1;
                        if self.nodes[p.0].requires_grad {
                            v.push((p, self.slice_cols(g, offset, w)));
                        }
                        offset += w;
                    }
                    v
                }
                Op::SliceCols { src, start, .. } => {
                    let total = self.shape(src).1;
                    vec![(src, self.pad_cols(g, start, total))]
                }
                Op::PadCols { src, start, .. } => {
                    let w = self.shape(src).1;
                    vec![(src, self.slice_cols(g, start, w))]
                }
                Op::SumAll(a) => {
                    let (r, c) = self.shape(a);
                    vec![(a, self.broadcast_scalar(g, r, c))]
                }
                Op::SumRows(a) => {
                    let r = self.shape(a).0;
                    vec![(a, self.broadcast_rows(g, r))]
                }
                Op::SumCols(a) => {
                    let c = self.shape(a).1;
                    vec![(a, self.broadcast_cols(g, c))]
                }
                Op::BroadcastScalar { src, .. } => vec![(src, self.sum_all(g))],
                Op::BroadcastRows { src, .. } => vec![(src, self.sum_rows(g))],
                Op::BroadcastCols { src, .. } => vec![(src, self.sum_cols(g))],
            };
            for (input, contribution) in contributions {
                if !self.nodes[input.0].requires_grad {
                    continue;
                }
                grads[input.0] = Some(match grads[input.0] {
                    None => contribution,
                    Some(prev) => self.add(prev, contribution),
                });
            }
        }

        Ok(wrt
            .iter()
            .map(|&w| match grads.get(w.0).copied().flatten() {
                Some(g) => g,
                None => {
                    let (r, c) = self.shape(w);
                    self.constant(Matrix::zeros(r, c))
                }
            })
            .collect())
    }

    /// Recompute every non-leaf node from the leaves.
    pub fn replay(&self) -> Vec<Matrix> {
        let mut values: Vec<Matrix> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node.op {
                Op::Leaf => node.value.clone(),
                ref op => eval_op(op, values.as_slice()),
            };
            values.push(v);
        }
        values
    }

    /// True when [`Tape::replay`] reproduces every stored value bit-for-bit.
    pub fn replay_matches(&self) -> bool {
        self.replay()
            .iter()
            .zip(&self.nodes)
            .all(|(a, n)| a.data().iter().zip(n.value.data()).all(|(x, y)| x.to_bits() == y.to_bits()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::from_vec(r, c, (0..r * c).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    /// Value of a scalar expression built by `f` from a single input matrix.
    fn eval_scalar(x: &Matrix, f: &dyn Fn(&mut Tape, Var) -> Var) -> f64 {
        let mut t = Tape::new();
        let v = t.variable(x.clone());
        let out = f(&mut t, v);
        t.value(out).item()
    }

    fn check_fd(x: &Matrix, f: &dyn Fn(&mut Tape, Var) -> Var) {
        let mut t = Tape::new();
        let v = t.variable(x.clone());
        let out = f(&mut t, v);
        let g = t.grad(out, &[v]).unwrap()[0];
        let analytic = t.value(g).clone();
        let h = 1e-6;
        for i in 0..x.data().len() {
            let mut xp = x.clone();
            xp.data_mut()[i] += h;
            let mut xm = x.clone();
            xm.data_mut()[i] -= h;
            let fd = (eval_scalar(&xp, f) - eval_scalar(&xm, f)) / (2.0 * h);
            let a = analytic.data()[i];
            assert!(
                (a - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                "coordinate {i}: analytic {a} vs fd {fd}"
            );
        }
    }

    #[test]
    fn elementwise_ops_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random(&mut rng, 3, 4);
        check_fd(&x, &|t, v| {
            let a = t.tanh(v);
            let b = t.sigmoid(v);
            let c = t.mul(a, b);
            let d = t.softplus(c);
            let e = t.one_minus(d);
            let sq = t.square(e);
            let one = t.constant(Matrix::filled(3, 4, 2.0));
            let s = t.add(sq, one);
            let r = t.sqrt(s);
            let q = t.div(r, s);
            t.sum_all(q)
        });
    }

    #[test]
    fn structural_ops_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random(&mut rng, 3, 4);
        let w = random(&mut rng, 4, 2);
        check_fd(&x, &|t, v| {
            let wv = t.constant(w.clone());
            let h = t.matmul(v, wv);
            let left = t.slice_cols(v, 1, 2);
            let cat = t.concat_cols(&[h, left]);
            let sm = t.softmax(cat);
            let lse = t.logsumexp(cat);
            let lb = t.broadcast_cols(lse, 4);
            let z = t.mul(sm, lb);
            let cs = t.sum_rows(z);
            let tr = t.transpose(cs);
            let rs = t.sum_cols(v);
            let m = t.matmul(rs, cs);
            let mm = t.mean_all(m);
            let tot = t.sum_all(tr);
            t.add(tot, mm)
        });
    }

    #[test]
    fn matmul_gradient_is_input_sum_for_linear_sum() {
        let mut t = Tape::new();
        let x = t.constant(Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]));
        let w = t.variable(Matrix::zeros(2, 3));
        let y = t.matmul(x, w);
        let s = t.sum_all(y);
        let g = t.grad(s, &[w]).unwrap()[0];
        // d/dW_ij = sum over rows of x_i
        assert_eq!(t.value(g).data(), &[4.0, 4.0, 4.0, 6.0, 6.0, 6.0]);
    }

    #[test]
    fn constant_output_has_zero_gradient() {
        let mut t = Tape::new();
        let w = t.variable(Matrix::filled(2, 2, 0.3));
        let c = t.constant(Matrix::scalar(5.0));
        let g = t.grad(c, &[w]).unwrap()[0];
        assert!(t.value(g).data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn non_scalar_output_is_rejected() {
        let mut t = Tape::new();
        let w = t.variable(Matrix::zeros(2, 2));
        assert!(matches!(t.grad(w, &[w]), Err(NnError::NonScalar { rows: 2, cols: 2 })));
    }

    #[test]
    fn second_order_of_cubic() {
        // f(x) = x^3, f' = 3x^2, f'' = 6x
        let mut t = Tape::new();
        let x = t.variable(Matrix::scalar(1.5));
        let x2 = t.square(x);
        let x3 = t.mul(x2, x);
        let g = t.grad(x3, &[x]).unwrap()[0];
        assert!((t.value(g).item() - 6.75).abs() < 1e-12);
        let gg = t.grad(g, &[x]).unwrap()[0];
        assert!((t.value(gg).item() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn replay_is_bitwise_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = Tape::new();
        let x = t.variable(random(&mut rng, 5, 3));
        let w = t.variable(random(&mut rng, 3, 2));
        let h = t.matmul(x, w);
        let a = t.tanh(h);
        let s = t.sum_all(a);
        let _ = t.grad(s, &[x, w]).unwrap();
        assert!(t.replay_matches());
    }
}
