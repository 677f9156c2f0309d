//! Two-mode quadratic exponentials in a truncated Fock space.
//!
//! Both generators conserve a charge (total number for the beamsplitter,
//! number difference for the squeezer), so the exponential is assembled
//! sector by sector. Each sector is exponentiated in an enlarged space and
//! then restricted to the truncation: amplitude that would leave the
//! truncated space is dropped rather than reflected, which is what makes
//! the leak measurable as lost trace.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeSet;

use super::ModeDims;
use crate::linalg::expm;

/// Quadratic two-mode generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `U = exp(-iθ(a†b + ab†))`.
    BeamSplitter,
    /// `U = exp(-ir(a†b† + ab))`.
    TwoModeSqueeze,
}

/// Extra levels per mode used when exponentiating a squeezer sector.
fn squeeze_padding(da: usize, db: usize) -> usize {
    (da.max(db) / 2).max(48)
}

impl Generator {
    fn sector(self, ia: usize, ib: usize) -> i64 {
        match self {
            Generator::BeamSplitter => (ia + ib) as i64,
            Generator::TwoModeSqueeze => ia as i64 - ib as i64,
        }
    }
}

struct Block {
    /// Local indices `ia * db + ib` of the retained sector states.
    local: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

/// Sector-blocked restriction of a two-mode exponential to a truncation.
pub(crate) struct TwoModeOp {
    db: usize,
    blocks: Vec<Block>,
}

impl TwoModeOp {
    /// Builds only the sectors that intersect `support` (a mask over local
    /// indices `ia * db + ib`).
    pub(crate) fn build(
        generator: Generator,
        angle: f64,
        da: usize,
        db: usize,
        support: &[bool],
    ) -> Self {
        let sectors: BTreeSet<i64> = support
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(l, _)| generator.sector(l / db, l % db))
            .collect();

        let blocks = sectors
            .into_iter()
            .map(|s| match generator {
                Generator::BeamSplitter => beamsplitter_block(s as usize, angle, da, db),
                Generator::TwoModeSqueeze => squeeze_block(s, angle, da, db),
            })
            .filter(|b| !b.local.is_empty())
            .collect();
        Self { db, blocks }
    }
}

fn beamsplitter_block(total: usize, theta: f64, da: usize, db: usize) -> Block {
    // Sector states |k, total-k⟩ for k = 0..=total; complete in any space
    // holding `total` quanta per mode, so the exponential is exact here.
    let size = total + 1;
    let mut h = DMatrix::<f64>::zeros(size, size);
    for k in 0..total {
        let v = (((k + 1) * (total - k)) as f64).sqrt();
        h[(k + 1, k)] = v;
        h[(k, k + 1)] = v;
    }
    let eig = h.symmetric_eigen();
    let keep: Vec<usize> = (0..size).filter(|&k| k < da && total - k < db).collect();

    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -theta * l))
        .collect();
    let v = &eig.eigenvectors;
    let matrix = DMatrix::from_fn(keep.len(), keep.len(), |i, j| {
        let (ki, kj) = (keep[i], keep[j]);
        (0..size)
            .map(|e| phases[e] * (v[(ki, e)] * v[(kj, e)]))
            .sum()
    });
    Block {
        local: keep.iter().map(|&k| k * db + (total - k)).collect(),
        matrix,
    }
}

fn squeeze_block(diff: i64, r: f64, da: usize, db: usize) -> Block {
    let pad = squeeze_padding(da, db);
    let (ea, eb) = (da + pad, db + pad);
    let k0 = if diff < 0 { (-diff) as usize } else { 0 };
    let states: Vec<(usize, usize)> = (k0..)
        .map(|k| ((k as i64 + diff) as usize, k))
        .take_while(|&(ia, ib)| ia < ea && ib < eb)
        .collect();
    let size = states.len();

    let mut gen = DMatrix::<Complex64>::zeros(size, size);
    for j in 0..size.saturating_sub(1) {
        let (ia, ib) = states[j];
        let v = Complex64::new(0.0, -r * (((ia + 1) * (ib + 1)) as f64).sqrt());
        gen[(j + 1, j)] = v;
        gen[(j, j + 1)] = v;
    }
    let full = expm(&gen);

    // Truncated states are a leading run of the sector ordering.
    let kept = states
        .iter()
        .take_while(|&&(ia, ib)| ia < da && ib < db)
        .count();
    Block {
        local: states[..kept].iter().map(|&(ia, ib)| ia * db + ib).collect(),
        matrix: full.view((0, 0), (kept, kept)).into_owned(),
    }
}

/// Mask over local two-mode indices that carry any nonzero row of `src`.
pub(crate) fn local_support(
    dims: &ModeDims,
    a: usize,
    b: usize,
    src: &[Complex64],
    ncols: usize,
) -> Vec<bool> {
    let nrows = dims.total();
    let db = dims.dim(b);
    let mut mask = vec![false; dims.dim(a) * db];
    for j in 0..ncols {
        let col = &src[j * nrows..(j + 1) * nrows];
        for (row, z) in col.iter().enumerate() {
            if z.re != 0.0 || z.im != 0.0 {
                mask[dims.digit(row, a) * db + dims.digit(row, b)] = true;
            }
        }
    }
    mask
}

/// Left-multiplies every column of the column-major `src` by `op` acting on
/// modes `(a, b)`.
pub(crate) fn apply_two_mode_columns(
    op: &TwoModeOp,
    dims: &ModeDims,
    a: usize,
    b: usize,
    src: &[Complex64],
    ncols: usize,
) -> Vec<Complex64> {
    let nrows = dims.total();
    let (sa, sb) = (dims.stride(a), dims.stride(b));
    let offset = |l: usize| (l / op.db) * sa + (l % op.db) * sb;
    let bases = dims.bases_without(&[a, b]);
    let offsets: Vec<Vec<usize>> = op
        .blocks
        .iter()
        .map(|blk| blk.local.iter().map(|&l| offset(l)).collect())
        .collect();

    let mut out = vec![Complex64::new(0.0, 0.0); nrows * ncols];
    let mut gather = Vec::new();
    for j in 0..ncols {
        let col = &src[j * nrows..(j + 1) * nrows];
        let dst = &mut out[j * nrows..(j + 1) * nrows];
        for &base in &bases {
            for (blk, offs) in op.blocks.iter().zip(&offsets) {
                gather.clear();
                gather.extend(offs.iter().map(|&o| col[base + o]));
                if gather.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                for (i, &oi) in offs.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, g) in gather.iter().enumerate() {
                        acc += blk.matrix[(i, k)] * g;
                    }
                    dst[base + oi] = acc;
                }
            }
        }
    }
    out
}

/// Left-multiplies every column of `src` by a single-mode operator on `mode`.
pub(crate) fn apply_single_mode_columns(
    op: &DMatrix<Complex64>,
    dims: &ModeDims,
    mode: usize,
    src: &[Complex64],
    ncols: usize,
) -> Vec<Complex64> {
    let nrows = dims.total();
    let d = dims.dim(mode);
    let stride = dims.stride(mode);
    let bases = dims.bases_without(&[mode]);
    let mut out = vec![Complex64::new(0.0, 0.0); nrows * ncols];
    let mut gather = vec![Complex64::new(0.0, 0.0); d];
    for j in 0..ncols {
        let col = &src[j * nrows..(j + 1) * nrows];
        let dst = &mut out[j * nrows..(j + 1) * nrows];
        for &base in &bases {
            for (n, g) in gather.iter_mut().enumerate() {
                *g = col[base + n * stride];
            }
            for n in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, g) in gather.iter().enumerate() {
                    acc += op[(n, k)] * g;
                }
                dst[base + n * stride] = acc;
            }
        }
    }
    out
}
