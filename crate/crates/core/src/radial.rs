//! Radial functions as finite level sequences with explicit extension models.
//!
//! A radial function `u = u(|x|)` is stored on the window `[n_min, n_max]` of
//! levels `|x| = q^n`. Below the window it is extended by the constant
//! `value_at_zero` (the continuity-at-zero model), above it by the tail
//! model. Both extensions keep every head/tail sum used by the operators in
//! closed form, so evaluation is total on the integers.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, Scalar, C};

/// Level index: the sphere `|x| = q^n` or ball `|x| <= q^n`.
pub type Level = i32;

/// Finite window of levels `[n_min, n_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelGrid {
    n_min: Level,
    n_max: Level,
}

impl LevelGrid {
    pub fn new(n_min: Level, n_max: Level) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::InvalidGrid { n_min, n_max });
        }
        Ok(Self { n_min, n_max })
    }

    pub fn n_min(&self) -> Level {
        self.n_min
    }

    pub fn n_max(&self) -> Level {
        self.n_max
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: Level) -> bool {
        n >= self.n_min && n <= self.n_max
    }

    /// Index of level `n` into the value array.
    pub fn index_of(&self, n: Level) -> Option<usize> {
        self.contains(n).then(|| (n - self.n_min) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = Level> {
        self.n_min..=self.n_max
    }

    /// True when `other` covers this grid.
    pub fn is_subgrid_of(&self, other: &LevelGrid) -> bool {
        other.n_min <= self.n_min && other.n_max >= self.n_max
    }
}

/// Extension model above the grid window.
///
/// Both variants keep `Σ_{l > n_max} q^(-alpha l) |u(q^l)|` finite for every
/// positive order, which is what the hypersingular sums require.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel<T: Scalar> {
    /// `u(q^l) = 0` beyond the window.
    Zero,
    /// `u(q^l) = c` beyond the window.
    Constant(C<T>),
}

impl<T: Scalar> TailModel<T> {
    pub fn value(&self) -> C<T> {
        match self {
            TailModel::Zero => Complex::new(T::zero(), T::zero()),
            TailModel::Constant(c) => *c,
        }
    }

    pub fn is_effectively_zero(&self) -> bool {
        match self {
            TailModel::Zero => true,
            TailModel::Constant(c) => c.re == T::zero() && c.im == T::zero(),
        }
    }
}

/// Complex-valued radial function on a level grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction<T: Scalar> {
    grid: LevelGrid,
    values: Vec<C<T>>,
    value_at_zero: C<T>,
    tail: TailModel<T>,
}

impl<T: Scalar> RadialFunction<T> {
    /// Validated constructor.
    pub fn new(
        grid: LevelGrid,
        values: Vec<C<T>>,
        value_at_zero: C<T>,
        tail: TailModel<T>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !is_finite_c(v)) {
            return Err(Error::NonFinite {
                what: format!("value at level {}", grid.n_min() + i as Level),
            });
        }
        if !is_finite_c(&value_at_zero) {
            return Err(Error::NonFinite {
                what: "value_at_zero".into(),
            });
        }
        if let TailModel::Constant(c) = &tail {
            if !is_finite_c(c) {
                return Err(Error::NonFinite {
                    what: "tail constant".into(),
                });
            }
        }
        Ok(Self {
            grid,
            values,
            value_at_zero,
            tail,
        })
    }

    /// The function identically equal to `c` (head, window and tail).
    pub fn constant(grid: LevelGrid, c: C<T>) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
            value_at_zero: c,
            tail: TailModel::Constant(c),
        }
    }

    /// All-zero function with tail `Zero`.
    pub fn zero(grid: LevelGrid) -> Self {
        Self {
            grid,
            values: vec![Complex::new(T::zero(), T::zero()); grid.len()],
            value_at_zero: Complex::new(T::zero(), T::zero()),
            tail: TailModel::Zero,
        }
    }

    /// Indicator of the single sphere `|x| = q^level`.
    pub fn sphere_indicator(grid: LevelGrid, level: Level) -> Result<Self> {
        let mut values = vec![Complex::new(T::zero(), T::zero()); grid.len()];
        match grid.index_of(level) {
            Some(i) => values[i] = Complex::new(T::one(), T::zero()),
            None => {
                return Err(Error::GridMismatch {
                    context: format!("indicator level {level} outside grid"),
                })
            }
        }
        Self::new(grid, values, Complex::new(T::zero(), T::zero()), TailModel::Zero)
    }

    pub fn grid(&self) -> LevelGrid {
        self.grid
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn value_at_zero(&self) -> C<T> {
        self.value_at_zero
    }

    pub fn tail(&self) -> TailModel<T> {
        self.tail
    }

    /// Total evaluation: stored value inside the window, `value_at_zero`
    /// below it, tail model above it.
    pub fn eval_at_level(&self, n: Level) -> C<T> {
        match self.grid.index_of(n) {
            Some(i) => self.values[i],
            None if n < self.grid.n_min() => self.value_at_zero,
            None => self.tail.value(),
        }
    }

    /// Pointwise sum; grids must coincide.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                context: "pointwise add requires equal grids".into(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        let tail = match (self.tail, other.tail) {
            (TailModel::Zero, TailModel::Zero) => TailModel::Zero,
            (a, b) => TailModel::Constant(a.value() + b.value()),
        };
        Self::new(self.grid, values, self.value_at_zero + other.value_at_zero, tail)
    }

    /// Pointwise scalar multiple.
    pub fn scale(&self, factor: C<T>) -> Self {
        let tail = match self.tail {
            TailModel::Zero => TailModel::Zero,
            TailModel::Constant(c) => TailModel::Constant(c * factor),
        };
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            value_at_zero: self.value_at_zero * factor,
            tail,
        }
    }

    /// Add a constant everywhere (head, window and tail).
    pub fn add_constant(&self, c: C<T>) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v + c).collect(),
            value_at_zero: self.value_at_zero + c,
            tail: TailModel::Constant(self.tail.value() + c),
        }
    }

    /// Level shift: the result evaluates at `n` to `self` at `n + j`.
    ///
    /// The shifted window is `[n_min - j, n_max - j]`; head and tail models
    /// carry over unchanged, so the identity holds at every integer.
    pub fn shift(&self, j: Level) -> Self {
        Self {
            grid: LevelGrid {
                n_min: self.grid.n_min - j,
                n_max: self.grid.n_max - j,
            },
            values: self.values.clone(),
            value_at_zero: self.value_at_zero,
            tail: self.tail,
        }
    }

    /// Materialize the extension models onto a wider grid. Evaluation is
    /// unchanged at every level; only the window grows.
    pub fn extend_to_grid(&self, grid: LevelGrid) -> Result<Self> {
        if !self.grid.is_subgrid_of(&grid) {
            return Err(Error::GridMismatch {
                context: format!(
                    "extension target [{}, {}] does not cover [{}, {}]",
                    grid.n_min, grid.n_max, self.grid.n_min, self.grid.n_max
                ),
            });
        }
        let values = grid.iter().map(|n| self.eval_at_level(n)).collect();
        Self::new(grid, values, self.value_at_zero, self.tail)
    }
}

/// Tail model for vector- and matrix-valued functions (entrywise constant).
#[derive(Debug, Clone, PartialEq)]
pub enum BlockTailModel<T: Scalar> {
    Zero,
    Constant(Vec<C<T>>),
}

/// Vector-valued radial function (dimension `d` per level).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorRadialFunction<T: Scalar> {
    grid: LevelGrid,
    dim: usize,
    /// One length-`d` vector per level.
    values: Vec<Vec<C<T>>>,
    value_at_zero: Vec<C<T>>,
    tail: BlockTailModel<T>,
}

impl<T: Scalar> VectorRadialFunction<T> {
    pub fn new(
        grid: LevelGrid,
        dim: usize,
        values: Vec<Vec<C<T>>>,
        value_at_zero: Vec<C<T>>,
        tail: BlockTailModel<T>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                context: "vector dimension must be >= 1".into(),
            });
        }
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| v.len() != dim) || value_at_zero.len() != dim {
            return Err(Error::DimensionMismatch {
                context: format!("vector entries must have dimension {dim}"),
            });
        }
        if let BlockTailModel::Constant(c) = &tail {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: format!("tail constant must have dimension {dim}"),
                });
            }
        }
        let finite = values
            .iter()
            .flat_map(|v| v.iter())
            .chain(value_at_zero.iter())
            .all(is_finite_c);
        if !finite {
            return Err(Error::NonFinite {
                what: "vector radial function".into(),
            });
        }
        Ok(Self {
            grid,
            dim,
            values,
            value_at_zero,
            tail,
        })
    }

    pub fn grid(&self) -> LevelGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Vec<C<T>>] {
        &self.values
    }

    pub fn value_at_zero(&self) -> &[C<T>] {
        &self.value_at_zero
    }

    pub fn tail(&self) -> &BlockTailModel<T> {
        &self.tail
    }

    /// Extract component `j` as a scalar radial function.
    pub fn component(&self, j: usize) -> Result<RadialFunction<T>> {
        if j >= self.dim {
            return Err(Error::DimensionMismatch {
                context: format!("component {j} of a dimension-{} function", self.dim),
            });
        }
        let tail = match &self.tail {
            BlockTailModel::Zero => TailModel::Zero,
            BlockTailModel::Constant(c) => TailModel::Constant(c[j]),
        };
        RadialFunction::new(
            self.grid,
            self.values.iter().map(|v| v[j]).collect(),
            self.value_at_zero[j],
            tail,
        )
    }

    /// Assemble from `d` scalar components sharing one grid.
    pub fn from_components(components: &[RadialFunction<T>]) -> Result<Self> {
        let dim = components.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                context: "need at least one component".into(),
            });
        }
        let grid = components[0].grid();
        if components.iter().any(|c| c.grid() != grid) {
            return Err(Error::GridMismatch {
                context: "components must share one grid".into(),
            });
        }
        let values = (0..grid.len())
            .map(|i| components.iter().map(|c| c.values()[i]).collect())
            .collect();
        let value_at_zero = components.iter().map(|c| c.value_at_zero()).collect();
        let all_zero_tails = components.iter().all(|c| matches!(c.tail(), TailModel::Zero));
        let tail = if all_zero_tails {
            BlockTailModel::Zero
        } else {
            BlockTailModel::Constant(components.iter().map(|c| c.tail().value()).collect())
        };
        Self::new(grid, dim, values, value_at_zero, tail)
    }
}

/// Matrix-valued radial function: a `d x d` complex matrix per level,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRadialFunction<T: Scalar> {
    grid: LevelGrid,
    dim: usize,
    /// One row-major `d*d` matrix per level.
    values: Vec<Vec<C<T>>>,
    value_at_zero: Vec<C<T>>,
    tail: BlockTailModel<T>,
}

impl<T: Scalar> MatrixRadialFunction<T> {
    pub fn new(
        grid: LevelGrid,
        dim: usize,
        values: Vec<Vec<C<T>>>,
        value_at_zero: Vec<C<T>>,
        tail: BlockTailModel<T>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                context: "matrix dimension must be >= 1".into(),
            });
        }
        let dd = dim * dim;
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|m| m.len() != dd) || value_at_zero.len() != dd {
            return Err(Error::DimensionMismatch {
                context: format!("matrix entries must be square of dimension {dim}"),
            });
        }
        if let BlockTailModel::Constant(c) = &tail {
            if c.len() != dd {
                return Err(Error::DimensionMismatch {
                    context: format!("tail constant must be a {dim}x{dim} matrix"),
                });
            }
        }
        let finite = values
            .iter()
            .flat_map(|v| v.iter())
            .chain(value_at_zero.iter())
            .all(is_finite_c);
        if !finite {
            return Err(Error::NonFinite {
                what: "matrix radial function".into(),
            });
        }
        Ok(Self {
            grid,
            dim,
            values,
            value_at_zero,
            tail,
        })
    }

    pub fn grid(&self) -> LevelGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Vec<C<T>>] {
        &self.values
    }

    pub fn value_at_zero(&self) -> &[C<T>] {
        &self.value_at_zero
    }

    pub fn tail(&self) -> &BlockTailModel<T> {
        &self.tail
    }

    /// Row-major matrix at level `n` (extension models apply outside the window).
    pub fn eval_at_level(&self, n: Level) -> Vec<C<T>> {
        match self.grid.index_of(n) {
            Some(i) => self.values[i].clone(),
            None if n < self.grid.n_min() => self.value_at_zero.clone(),
            None => match &self.tail {
                BlockTailModel::Zero => {
                    vec![Complex::new(T::zero(), T::zero()); self.dim * self.dim]
                }
                BlockTailModel::Constant(c) => c.clone(),
            },
        }
    }

    /// Wrap a scalar radial function as a 1x1 matrix function.
    pub fn from_scalar(f: &RadialFunction<T>) -> Self {
        let tail = match f.tail() {
            TailModel::Zero => BlockTailModel::Zero,
            TailModel::Constant(c) => BlockTailModel::Constant(vec![c]),
        };
        Self {
            grid: f.grid(),
            dim: 1,
            values: f.values().iter().map(|v| vec![*v]).collect(),
            value_at_zero: vec![f.value_at_zero()],
            tail,
        }
    }
}
