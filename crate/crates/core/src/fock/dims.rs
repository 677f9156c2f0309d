use crate::error::{Error, Result};

/// Per-mode truncation dimensions of a joint Fock space.
///
/// Basis states are laid out row-major: the last mode varies fastest, so
/// `|n_0, n_1⟩` in `[d_0, d_1]` sits at index `n_0 * d_1 + n_1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeDims(Vec<usize>);

impl ModeDims {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::NoModes);
        }
        if let Some((mode, &dim)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::InvalidDim { mode, dim });
        }
        Ok(Self(dims))
    }

    pub fn uniform(modes: usize, dim: usize) -> Result<Self> {
        Self::new(vec![dim; modes])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn dim(&self, mode: usize) -> usize {
        self.0[mode]
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.0[mode + 1..].iter().product()
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes() {
            Ok(())
        } else {
            Err(Error::ModeIndex {
                index: mode,
                modes: self.modes(),
            })
        }
    }

    pub fn check_distinct(&self, a: usize, b: usize) -> Result<()> {
        self.check_mode(a)?;
        self.check_mode(b)?;
        if a == b {
            Err(Error::RepeatedMode(a))
        } else {
            Ok(())
        }
    }

    /// Flat index of a multi-index of occupations.
    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes() {
            return Err(Error::DimMismatch {
                expected: self.modes(),
                found: occupations.len(),
            });
        }
        let mut idx = 0;
        for (mode, (&n, &d)) in occupations.iter().zip(&self.0).enumerate() {
            if n >= d {
                return Err(Error::Occupation {
                    mode,
                    occupation: n,
                    dim: d,
                });
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    /// Occupation of `mode` in the basis state at flat `index`.
    pub fn digit(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.0[mode]
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.modes()).map(|m| self.digit(index, m)).collect()
    }

    pub fn concat(&self, other: &ModeDims) -> ModeDims {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        ModeDims(dims)
    }

    /// Dims with the listed modes removed; `None` if nothing would remain.
    pub fn without(&self, modes: &[usize]) -> Option<ModeDims> {
        let kept: Vec<usize> = (0..self.modes())
            .filter(|m| !modes.contains(m))
            .map(|m| self.0[m])
            .collect();
        (!kept.is_empty()).then_some(ModeDims(kept))
    }

    /// Flat index into `self` for every basis state of `self` with the
    /// listed modes set to zero, enumerated in order of the reduced space.
    pub(crate) fn bases_without(&self, modes: &[usize]) -> Vec<usize> {
        let mut bases = vec![0usize];
        for m in 0..self.modes() {
            if modes.contains(&m) {
                continue;
            }
            let stride = self.stride(m);
            bases = bases
                .iter()
                .flat_map(|&b| (0..self.0[m]).map(move |n| b + n * stride))
                .collect();
        }
        bases
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_indexing() {
        let d = ModeDims::new(vec![3, 3]).unwrap();
        assert_eq!(d.index(&[1, 2]).unwrap(), 5);
        assert_eq!(d.occupations(5), vec![1, 2]);
        assert_eq!(d.total(), 9);
    }

    #[test]
    fn rejects_small_dims() {
        assert!(matches!(
            ModeDims::new(vec![3, 1]),
            Err(Error::InvalidDim { mode: 1, dim: 1 })
        ));
        assert_eq!(ModeDims::new(Vec::<usize>::new()), Err(Error::NoModes));
    }

    #[test]
    fn occupation_outside_truncation() {
        let d = ModeDims::new(vec![2]).unwrap();
        assert!(matches!(d.index(&[2]), Err(Error::Occupation { .. })));
    }

    #[test]
    fn bases_skip_removed_modes() {
        let d = ModeDims::new(vec![2, 3, 2]).unwrap();
        let b = d.bases_without(&[1]);
        assert_eq!(b, vec![0, 1, 6, 7]);
    }
}
