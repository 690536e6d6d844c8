//! Per-round convex losses.

/// A convex loss revealed after a round's decision has been committed.
///
/// `gradient` returns the gradient of the smooth part of the loss only. An
/// `l1` regularizer carried by the step configuration is applied inside the
/// proximal update and must not be added here; `evaluate` on the other hand
/// returns the complete round loss.
pub trait LossOracle {
    fn dim(&self) -> usize;

    fn evaluate(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Upper bound on `||grad f(x)||_1` over the unit box.
    fn lipschitz_l1(&self) -> f64;

    /// Upper bound on `||grad f(x)||_2` over the unit box.
    fn lipschitz_l2(&self) -> f64;

    /// Weight of an `l1` term that `evaluate` includes but `gradient` leaves
    /// out.
    fn l1_weight(&self) -> f64 {
        0.0
    }
}

/// Gradient of the complete loss on the box, where `||x||_1 = sum x(i)`.
pub fn full_gradient<L: LossOracle + ?Sized>(oracle: &L, x: &[f64]) -> Vec<f64> {
    let w = oracle.l1_weight();
    let mut g = oracle.gradient(x);
    if w != 0.0 {
        g.iter_mut().for_each(|gi| *gi += w);
    }
    g
}

impl<L: LossOracle + ?Sized> LossOracle for &L {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn lipschitz_l1(&self) -> f64 {
        (**self).lipschitz_l1()
    }
    fn lipschitz_l2(&self) -> f64 {
        (**self).lipschitz_l2()
    }
    fn l1_weight(&self) -> f64 {
        (**self).l1_weight()
    }
}

impl<L: LossOracle + ?Sized> LossOracle for Box<L> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn lipschitz_l1(&self) -> f64 {
        (**self).lipschitz_l1()
    }
    fn lipschitz_l2(&self) -> f64 {
        (**self).lipschitz_l2()
    }
    fn l1_weight(&self) -> f64 {
        (**self).l1_weight()
    }
}

pub(crate) fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `f(x) = c^T x + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLoss {
    coeffs: Vec<f64>,
    offset: f64,
}

impl LinearLoss {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs, offset: 0.0 }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl LossOracle for LinearLoss {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.offset + self.coeffs.iter().zip(x).map(|(c, x)| c * x).sum::<f64>()
    }

    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.coeffs.clone()
    }

    fn lipschitz_l1(&self) -> f64 {
        norm1(&self.coeffs)
    }

    fn lipschitz_l2(&self) -> f64 {
        norm2(&self.coeffs)
    }
}

/// Largest dimension for which quadratic Lipschitz constants are computed by
/// visiting every vertex of the box.
const VERTEX_ENUMERATION_LIMIT: usize = 16;

/// `f(x) = 1/2 x^T Q x + b^T x + k` with `Q` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLoss {
    n: usize,
    /// Row-major `n x n`.
    q: Vec<f64>,
    b: Vec<f64>,
    k: f64,
    l1: f64,
    l2: f64,
}

impl QuadraticLoss {
    /// # Panics
    /// If `q` is not `n x n` with `n = b.len()`.
    pub fn new(q: Vec<f64>, b: Vec<f64>, k: f64) -> Self {
        let n = b.len();
        assert_eq!(q.len(), n * n, "Q must be n x n");
        let mut loss = Self {
            n,
            q,
            b,
            k,
            l1: 0.0,
            l2: 0.0,
        };
        let (l1, l2) = loss.gradient_norm_maxima();
        loss.l1 = l1;
        loss.l2 = l2;
        loss
    }

    /// `f(x) = 1/2 (x - c)^T Q (x - c)`.
    pub fn centered(q: Vec<f64>, center: &[f64]) -> Self {
        let n = center.len();
        assert_eq!(q.len(), n * n, "Q must be n x n");
        let qc: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| q[i * n + j] * center[j]).sum())
            .collect();
        let k = 0.5 * center.iter().zip(&qc).map(|(c, v)| c * v).sum::<f64>();
        let b = qc.into_iter().map(|v| -v).collect();
        Self::new(q, b, k)
    }

    pub fn hessian(&self) -> &[f64] {
        &self.q
    }

    pub fn linear_term(&self) -> &[f64] {
        &self.b
    }

    // The gradient is affine, so each gradient norm is convex in x and its
    // maximum over the box is attained at a vertex.
    fn gradient_norm_maxima(&self) -> (f64, f64) {
        let n = self.n;
        if n <= VERTEX_ENUMERATION_LIMIT {
            let mut x = vec![0.0; n];
            let (mut l1, mut l2) = (0.0f64, 0.0f64);
            for code in 0u64..(1u64 << n) {
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = ((code >> i) & 1) as f64;
                }
                let g = self.gradient(&x);
                l1 = l1.max(norm1(&g));
                l2 = l2.max(norm2(&g));
            }
            (l1, l2)
        } else {
            let mut l1 = norm1(&self.b);
            let mut l2 = norm2(&self.b);
            for j in 0..n {
                let col: Vec<f64> = (0..n).map(|i| self.q[i * n + j]).collect();
                l1 += norm1(&col);
                l2 += norm2(&col);
            }
            (l1, l2)
        }
    }
}

impl LossOracle for QuadraticLoss {
    fn dim(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut quad = 0.0;
        for i in 0..n {
            let row = &self.q[i * n..(i + 1) * n];
            quad += x[i] * row.iter().zip(x).map(|(q, x)| q * x).sum::<f64>();
        }
        0.5 * quad + self.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>() + self.k
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let row = &self.q[i * n..(i + 1) * n];
                row.iter().zip(x).map(|(q, x)| q * x).sum::<f64>() + self.b[i]
            })
            .collect()
    }

    fn lipschitz_l1(&self) -> f64 {
        self.l1
    }

    fn lipschitz_l2(&self) -> f64 {
        self.l2
    }
}
