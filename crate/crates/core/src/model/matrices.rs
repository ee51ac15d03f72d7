//! Dense pairwise relation matrices.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Number of translation directions (+x, +y, +z, -x, -y, -z).
pub const TRANSLATIONS: usize = 6;
/// Number of constraint directions: 6 translations then rotations
/// (+rx, +ry, +rz, -rx, -ry, -rz).
pub const CONSTRAINT_DIRECTIONS: usize = 12;

/// Dense row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default + PartialEq> SquareMatrix<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n],
        }
    }

    pub fn filled(n: usize, value: T) -> Self {
        Self {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, usize> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(r);
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> T {
        self.data[i * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, value: T) {
        self.data[i * self.n + k] = value;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                t.set(k, i, self.get(i, k));
            }
        }
        t
    }

    /// First `(i, k)` with `self(i,k) != self(k,i)`.
    pub fn first_asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |k| (i, k)))
            .find(|&(i, k)| self.get(i, k) != self.get(k, i))
    }
}

/// All relation matrices of a product over its non-ignored parts.
///
/// Entry `(i, k)` of a directional layer describes part `k` moving
/// relative to part `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMatrices {
    pub x_if: Vec<SquareMatrix<u8>>,
    pub x_cf: Vec<SquareMatrix<u8>>,
    pub x_ct: SquareMatrix<u8>,
    pub x_cs: SquareMatrix<u8>,
}

/// Constraint degree: `12 - sum_j x_cf_j(i,k)` with a zero diagonal.
pub fn derive_constraint_degree(x_cf: &[SquareMatrix<u8>]) -> SquareMatrix<u8> {
    let n = x_cf.first().map_or(0, SquareMatrix::size);
    let mut cs = SquareMatrix::new(n);
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            let free: u8 = x_cf.iter().map(|layer| layer.get(i, k)).sum();
            cs.set(i, k, (CONSTRAINT_DIRECTIONS as u8).saturating_sub(free));
        }
    }
    cs
}

impl RelationMatrices {
    /// Builds the matrix set, deriving `x_cs` from the constraint-free layers.
    pub fn from_layers(
        x_if: Vec<SquareMatrix<u8>>,
        x_cf: Vec<SquareMatrix<u8>>,
        x_ct: SquareMatrix<u8>,
    ) -> Result<Self, ModelError> {
        let x_cs = derive_constraint_degree(&x_cf);
        let m = Self {
            x_if,
            x_cf,
            x_ct,
            x_cs,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.x_ct.size()
    }

    /// Checks every structural invariant, reporting the first violation
    /// with 0-based matrix indices.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.size();
        if self.x_if.len() != TRANSLATIONS {
            return Err(ModelError::LayerCount {
                matrix: "x_if",
                expected: TRANSLATIONS,
                found: self.x_if.len(),
            });
        }
        if self.x_cf.len() != CONSTRAINT_DIRECTIONS {
            return Err(ModelError::LayerCount {
                matrix: "x_cf",
                expected: CONSTRAINT_DIRECTIONS,
                found: self.x_cf.len(),
            });
        }
        let named = self
            .x_if
            .iter()
            .enumerate()
            .map(|(j, m)| ("x_if", Some(j), m))
            .chain(self.x_cf.iter().enumerate().map(|(j, m)| ("x_cf", Some(j), m)))
            .chain(std::iter::once(("x_ct", None, &self.x_ct)));
        for (matrix, layer, m) in named {
            if m.size() != n {
                return Err(ModelError::Dimension {
                    matrix,
                    expected: n,
                    found: m.size(),
                });
            }
            for i in 0..n {
                for k in 0..n {
                    let value = m.get(i, k);
                    if value > 1 {
                        return Err(ModelError::NonBinary {
                            matrix,
                            layer,
                            i,
                            k,
                            value,
                        });
                    }
                }
            }
        }
        for (matrix, layers) in [("x_if", &self.x_if), ("x_cf", &self.x_cf)] {
            for j in 0..3 {
                let (pos, neg) = (&layers[j], &layers[j + 3]);
                for i in 0..n {
                    for k in 0..n {
                        if i != k && neg.get(i, k) != pos.get(k, i) {
                            return Err(ModelError::TransposeViolation {
                                matrix,
                                layer: j + 3,
                                i,
                                k,
                            });
                        }
                    }
                }
            }
        }
        if self.x_cs.size() != n {
            return Err(ModelError::Dimension {
                matrix: "x_cs",
                expected: n,
                found: self.x_cs.size(),
            });
        }
        for (matrix, m) in [("x_ct", &self.x_ct), ("x_cs", &self.x_cs)] {
            if let Some(i) = (0..n).find(|&i| m.get(i, i) != 0) {
                return Err(ModelError::NonZeroDiagonal { matrix, i });
            }
            if let Some((i, k)) = m.first_asymmetry() {
                return Err(ModelError::Asymmetric { matrix, i, k });
            }
        }
        let derived = derive_constraint_degree(&self.x_cf);
        for i in 0..n {
            for k in 0..n {
                if derived.get(i, k) != self.x_cs.get(i, k) {
                    return Err(ModelError::ConstraintDegreeMismatch {
                        i,
                        k,
                        expected: derived.get(i, k),
                        found: self.x_cs.get(i, k),
                    });
                }
                if self.x_ct.get(i, k) == 1 && self.x_cs.get(i, k) == 0 {
                    return Err(ModelError::ContactWithoutConstraint { i, k });
                }
            }
        }
        Ok(())
    }
}
