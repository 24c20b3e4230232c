//! The real centrosymmetric ensemble.
//!
//! A matrix is centrosymmetric when its entry grid is invariant under a
//! half-turn, `m[i][j] == m[n-1-i][n-1-j]`, equivalently `J M J = M` for the
//! exchange matrix `J`. Sampled matrices draw one i.i.d. standardised value
//! per reflection class and scale it by `1/sqrt(n)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal, Uniform};

use crate::eig;
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Law of the raw (unscaled) entry variables. Both are mean zero, unit
/// variance and have a bounded density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntryDist {
    /// Standard normal.
    Gaussian,
    /// Uniform on `(-sqrt 3, sqrt 3)`.
    Uniform,
}

impl EntryDist {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntryDist::Gaussian => "gaussian",
            EntryDist::Uniform => "uniform",
        }
    }
}

impl fmt::Display for EntryDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntryDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(EntryDist::Gaussian),
            "uniform" => Ok(EntryDist::Uniform),
            "rademacher" | "sign" | "signs" | "bernoulli" => Err(Error::Config(format!(
                "entry distribution '{s}' is discrete; only laws with a bounded density \
                 are supported (gaussian, uniform)"
            ))),
            other => Err(Error::Config(format!(
                "unsupported entry distribution '{other}' (expected gaussian or uniform)"
            ))),
        }
    }
}

/// Reflection class of a cell under `(i, j) -> (n-1-i, n-1-j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntryClass {
    /// Lexicographically smaller cell of the pair.
    pub rep: (usize, usize),
    /// The cell is its own reflection (centre of an odd-order matrix).
    pub self_paired: bool,
}

pub fn entry_class(n: usize, i: usize, j: usize) -> Result<EntryClass> {
    if i >= n || j >= n {
        return Err(Error::InvalidIndex { n, i, j });
    }
    let mirror = (n - 1 - i, n - 1 - j);
    Ok(EntryClass {
        rep: (i, j).min(mirror),
        self_paired: (i, j) == mirror,
    })
}

/// Index of the class of row-major cell `p` among the `ceil(n^2/2)` classes.
///
/// Cell `p` reflects to `n^2 - 1 - p`, so the representatives are exactly the
/// first half of the row-major order.
#[inline]
pub fn class_index(n: usize, p: usize) -> usize {
    p.min(n * n - 1 - p)
}

pub fn class_count(n: usize) -> usize {
    (n * n).div_ceil(2)
}

/// Exchange matrix `J`: ones on the anti-diagonal.
pub fn counter_identity(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("counter identity of order 0".into()));
    }
    let mut j = Matrix::zeros(n);
    for i in 0..n {
        j[(i, n - 1 - i)] = 1.0;
    }
    Ok(j)
}

pub fn assert_centrosymmetric(mat: &Matrix, tol: f64) -> bool {
    let data = mat.as_slice();
    let last = data.len().saturating_sub(1);
    (0..data.len()).all(|p| (data[p] - data[last - p]).abs() <= tol)
}

/// Raw class draws for `(n, dist, seed)`, one per class in row-major order of
/// the representatives.
pub fn sample_class_draws(n: usize, dist: EntryDist, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = class_count(n);
    match dist {
        EntryDist::Gaussian => (0..count).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
        EntryDist::Uniform => {
            let half_width = 3f64.sqrt();
            let law = Uniform::new(-half_width, half_width).expect("finite non-empty range");
            (0..count).map(|_| law.sample(&mut rng)).collect()
        }
    }
}

/// A sampled (or validated) centrosymmetric matrix with its provenance.
#[derive(Clone, Debug)]
pub struct CentroMatrix {
    matrix: Matrix,
    seed: u64,
    dist: EntryDist,
}

impl CentroMatrix {
    /// Wraps an existing matrix, requiring exact centrosymmetry.
    pub fn new(matrix: Matrix, seed: u64, dist: EntryDist) -> Result<Self> {
        if matrix.order() == 0 {
            return Err(Error::InvalidDimension("matrix order must be positive".into()));
        }
        if !assert_centrosymmetric(&matrix, 0.0) {
            return Err(Error::InvalidInput("matrix is not centrosymmetric".into()));
        }
        Ok(Self { matrix, seed, dist })
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dist(&self) -> EntryDist {
        self.dist
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

pub fn sample_centro(n: usize, dist: EntryDist, seed: u64) -> Result<CentroMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("matrix order must be positive".into()));
    }
    let draws = sample_class_draws(n, dist, seed);
    let scale = 1.0 / (n as f64).sqrt();
    let total = n * n;
    let mut data = vec![0.0; total];
    for (p, x) in draws.iter().enumerate() {
        let v = x * scale;
        data[p] = v;
        data[total - 1 - p] = v;
    }
    Ok(CentroMatrix {
        matrix: Matrix::from_row_major(n, data)?,
        seed,
        dist,
    })
}

/// The two diagonal blocks of the orthogonal block-diagonalisation.
#[derive(Clone, Debug)]
pub struct WeaverBlocks {
    /// `A + J C`, bordered by the middle row and column when `n` is odd.
    pub plus: Matrix,
    /// `A - J C`.
    pub minus: Matrix,
}

impl WeaverBlocks {
    pub fn order(&self) -> usize {
        self.plus.order() + self.minus.order()
    }

    pub fn block_diag(&self) -> Matrix {
        Matrix::block_diag(&self.plus, &self.minus)
    }

    /// `Tr(M^k)` for `k = 1..=k_max`, as the sum over both blocks.
    pub fn trace_powers(&self, k_max: usize) -> Vec<f64> {
        let plus = eig::trace_powers(&self.plus, k_max);
        let minus = eig::trace_powers(&self.minus, k_max);
        plus.iter().zip(&minus).map(|(a, b)| a + b).collect()
    }
}

/// Splits `m` into the blocks of `Q^T M Q` for the orthogonal `Q` of
/// [`weaver_q`].
///
/// With `h = floor(n/2)`, `A` the top-left and `C` the bottom-left `h x h`
/// blocks, `plus = A + J C` and `minus = A - J C`. For odd `n` the middle row
/// `[p^T, q, r^T]` and column `[u; q; v]` border `plus` as
/// `[[A + J C, sqrt2 u], [sqrt2 p^T, q]]`.
pub fn weaver_blocks(m: &CentroMatrix) -> WeaverBlocks {
    let mat = m.matrix();
    let n = mat.order();
    let h = n / 2;
    let odd = n % 2 == 1;
    let c_row = h + usize::from(odd);
    // (J C)[i][j] = C[h-1-i][j]
    let jc = |i: usize, j: usize| mat[(c_row + h - 1 - i, j)];
    let minus = Matrix::from_fn(h, |i, j| mat[(i, j)] - jc(i, j));
    let plus = if odd {
        let s2 = std::f64::consts::SQRT_2;
        Matrix::from_fn(h + 1, |i, j| match (i < h, j < h) {
            (true, true) => mat[(i, j)] + jc(i, j),
            (true, false) => s2 * mat[(i, h)],
            (false, true) => s2 * mat[(h, j)],
            (false, false) => mat[(h, h)],
        })
    } else {
        Matrix::from_fn(h, |i, j| mat[(i, j)] + jc(i, j))
    };
    WeaverBlocks { plus, minus }
}

/// Orthogonal `Q` whose column blocks are `(1/sqrt2)[I; 0; J]`, `[0; 1; 0]`
/// (odd `n` only) and `(1/sqrt2)[I; 0; -J]`.
pub fn weaver_q(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("order must be positive".into()));
    }
    let h = n / 2;
    let odd = n % 2 == 1;
    let c_row = h + usize::from(odd);
    let plus_order = h + usize::from(odd);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut q = Matrix::zeros(n);
    for i in 0..h {
        q[(i, i)] = r;
        q[(c_row + h - 1 - i, i)] = r;
        q[(i, plus_order + i)] = r;
        q[(c_row + h - 1 - i, plus_order + i)] = -r;
    }
    if odd {
        q[(h, h)] = 1.0;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn counter_identity_small() {
        assert_eq!(counter_identity(1).unwrap().as_slice(), &[1.0]);
        assert_eq!(counter_identity(2).unwrap().as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        let j = counter_identity(5).unwrap();
        assert_eq!(j.matmul(&j), Matrix::identity(5));
        assert!(matches!(counter_identity(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn entry_class_examples() {
        assert_eq!(entry_class(5, 0, 4).unwrap().rep, (0, 4));
        assert_eq!(entry_class(5, 4, 0).unwrap().rep, (0, 4));
        assert!(entry_class(5, 2, 2).unwrap().self_paired);
        assert!(!entry_class(4, 1, 2).unwrap().self_paired);
        assert!(matches!(entry_class(3, 3, 0), Err(Error::InvalidIndex { .. })));
    }

    // Union-find over reflection pairs, independent of the closed form.
    fn classes_by_union_find(n: usize) -> usize {
        let cells = n * n;
        let mut parent: Vec<usize> = (0..cells).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for i in 0..n {
            for j in 0..n {
                let a = find(&mut parent, i * n + j);
                let b = find(&mut parent, (n - 1 - i) * n + (n - 1 - j));
                parent[a] = b;
            }
        }
        (0..cells).filter(|&c| find(&mut parent, c) == c).count()
    }

    #[test]
    fn class_counts() {
        assert_eq!(classes_by_union_find(4), 8);
        for n in 1..=12 {
            let reps: std::collections::HashSet<_> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| entry_class(n, i, j).unwrap())
                .collect();
            assert_eq!(reps.len(), classes_by_union_find(n));
            assert_eq!(reps.len(), class_count(n));
            for i in 0..n {
                for j in 0..n {
                    let c = entry_class(n, i, j).unwrap();
                    assert_eq!(c, entry_class(n, n - 1 - i, n - 1 - j).unwrap());
                    assert_eq!(class_index(n, i * n + j), c.rep.0 * n + c.rep.1);
                }
            }
        }
    }

    #[test]
    fn unsupported_distributions() {
        assert!(matches!("rademacher".parse::<EntryDist>(), Err(Error::Config(_))));
        assert!(matches!("cauchy".parse::<EntryDist>(), Err(Error::Config(_))));
        assert_eq!("Gaussian".parse::<EntryDist>().unwrap(), EntryDist::Gaussian);
    }

    #[test]
    fn sampling_is_deterministic_and_symmetric() {
        for dist in [EntryDist::Gaussian, EntryDist::Uniform] {
            let a = sample_centro(9, dist, 7).unwrap();
            let b = sample_centro(9, dist, 7).unwrap();
            assert_eq!(a.matrix(), b.matrix());
            assert!(assert_centrosymmetric(a.matrix(), 0.0));
            let c = sample_centro(9, dist, 8).unwrap();
            assert_ne!(a.matrix(), c.matrix());
        }
        assert!(sample_centro(0, EntryDist::Gaussian, 1).is_err());
    }

    #[test]
    fn uniform_draws_in_range() {
        let xs = sample_class_draws(40, EntryDist::Uniform, 3);
        assert!(xs.iter().all(|x| x.abs() < 3f64.sqrt()));
    }

    #[test]
    fn large_sample_mean_near_zero() {
        let xs = sample_class_draws(1000, EntryDist::Gaussian, 11);
        assert_eq!(xs.len(), 500_000);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn per_class_variance_over_seeds() {
        // n = 3 has 5 classes; track each over 10^4 seeds.
        for dist in [EntryDist::Gaussian, EntryDist::Uniform] {
            let mut sums: HashMap<usize, (f64, f64)> = HashMap::new();
            let trials = 10_000;
            for seed in 0..trials {
                for (c, x) in sample_class_draws(3, dist, seed).into_iter().enumerate() {
                    let e = sums.entry(c).or_default();
                    e.0 += x;
                    e.1 += x * x;
                }
            }
            for (c, (s, s2)) in sums {
                let t = trials as f64;
                let mean = s / t;
                let var = (s2 - t * mean * mean) / (t - 1.0);
                assert!((var - 1.0).abs() < 0.05, "{dist} class {c}: var {var}");
            }
        }
    }

    #[test]
    fn assert_centrosymmetric_examples() {
        assert!(assert_centrosymmetric(&Matrix::identity(3), 0.0));
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(!assert_centrosymmetric(&m, 0.0));
        assert!(assert_centrosymmetric(&m, 1.0));
    }

    #[test]
    fn weaver_of_scaled_identity() {
        let m = CentroMatrix::new(Matrix::from_fn(6, |i, j| if i == j { 2.5 } else { 0.0 }), 0, EntryDist::Gaussian)
            .unwrap();
        let w = weaver_blocks(&m);
        let expect = Matrix::from_fn(3, |i, j| if i == j { 2.5 } else { 0.0 });
        assert_eq!(w.plus, expect);
        assert_eq!(w.minus, expect);
    }

    #[test]
    fn weaver_matches_explicit_conjugation() {
        for n in 1..=11 {
            let m = sample_centro(n, EntryDist::Gaussian, 100 + n as u64).unwrap();
            let q = weaver_q(n).unwrap();
            let qtq = q.transpose().matmul(&q);
            assert!(qtq.sub(&Matrix::identity(n)).max_abs() <= 1e-12);
            let conj = q.transpose().matmul(m.matrix()).matmul(&q);
            let w = weaver_blocks(&m);
            assert_eq!(w.order(), n);
            let diff = conj.sub(&w.block_diag()).max_abs();
            assert!(diff <= 1e-12 * m.matrix().max_abs(), "n={n}: {diff}");
        }
    }
}
