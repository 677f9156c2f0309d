//! Dense complex helpers: matrix exponential, block-aware Hermitian
//! spectra, and Hermitian matrix functions.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Padé(13,13) numerator coefficients.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which Padé(13) meets double precision without scaling.
const THETA13: f64 = 5.371_920_351_148_152;

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Padé(13) approximant.
///
/// # Panics
/// Panics if `a` is not square.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a * Complex64::new(2f64.powi(-squarings), 0.0);

    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let ident = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &ident * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &ident * b(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for a scaled argument");

    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Groups indices into the connected components of the nonzero pattern of
/// `m` (treating it as an undirected graph). Exact zeros separate blocks.
pub fn nonzero_blocks(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for j in 0..n {
        for i in 0..j {
            let z = m[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

fn submatrix(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The matrix is split along the connected components of its nonzero
/// pattern first, so charge-conserving operators with thousands of rows
/// decompose into small independent blocks.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows());
    for block in nonzero_blocks(m) {
        if block.len() == 1 {
            out.push(m[(block[0], block[0])].re);
            continue;
        }
        let sub = submatrix(m, &block);
        out.extend(sub.symmetric_eigenvalues().iter().copied());
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(
    m: &DMatrix<Complex64>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<Complex64> {
    let eig = m.clone().symmetric_eigen();
    let vecs = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, j| {
        vecs[(i, j)] * f(eig.eigenvalues[j])
    });
    scaled * vecs.adjoint()
}

/// Largest elementwise modulus of `a - a†`.
pub fn hermiticity_defect(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
