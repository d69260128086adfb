//! Self-describing JSON documents for radial functions.
//!
//! Scalar format:
//! `{"q": int, "alpha": real?, "n_min": int, "n_max": int,
//!   "values": [[re, im], ...], "value_at_zero": [re, im],
//!   "tail": {"kind": "zero" | "constant", "c": [re, im]?}}`
//!
//! The vector and matrix variants add `"dim"` and store one flat row-major
//! array of `[re, im]` pairs per level (`d` entries for vectors, `d*d` for
//! matrices). `q` and `alpha` ride along so emitted files are
//! self-describing; `alpha` is optional on input.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_field::FieldParams;
use crate::radial::{
    BlockTailModel, Level, LevelGrid, MatrixRadialFunction, RadialFunction, TailModel,
    VectorRadialFunction,
};
use crate::scalar::{Scalar, C};

type Pair = [f64; 2];

fn pair_from<T: Scalar>(z: &C<T>) -> Result<Pair> {
    let re = z.re.to_f64().filter(|x| x.is_finite());
    let im = z.im.to_f64().filter(|x| x.is_finite());
    match (re, im) {
        (Some(re), Some(im)) => Ok([re, im]),
        _ => Err(Error::NonFinite {
            what: "serialized value".into(),
        }),
    }
}

fn pair_into<T: Scalar>(p: &Pair) -> Result<C<T>> {
    if !p[0].is_finite() || !p[1].is_finite() {
        return Err(Error::Document("non-finite value in document".into()));
    }
    match (T::from_f64(p[0]), T::from_f64(p[1])) {
        (Some(re), Some(im)) => Ok(Complex::new(re, im)),
        _ => Err(Error::Document("value outside scalar range".into())),
    }
}

/// Tail model as serialized: `{"kind": "zero"}` or
/// `{"kind": "constant", "c": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TailDoc<Carrier> {
    Zero,
    Constant { c: Carrier },
}

/// Scalar radial-function document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialDoc {
    pub q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub n_min: Level,
    pub n_max: Level,
    pub values: Vec<Pair>,
    pub value_at_zero: Pair,
    pub tail: TailDoc<Pair>,
}

impl RadialDoc {
    pub fn from_function<T: Scalar>(
        u: &RadialFunction<T>,
        fp: FieldParams,
        alpha: Option<T>,
    ) -> Result<Self> {
        Ok(Self {
            q: fp.q(),
            alpha: match alpha {
                Some(a) => Some(a.to_f64().ok_or_else(|| Error::NonFinite {
                    what: "alpha".into(),
                })?),
                None => None,
            },
            n_min: u.grid().n_min(),
            n_max: u.grid().n_max(),
            values: u.values().iter().map(pair_from).collect::<Result<_>>()?,
            value_at_zero: pair_from(&u.value_at_zero())?,
            tail: match u.tail() {
                TailModel::Zero => TailDoc::Zero,
                TailModel::Constant(c) => TailDoc::Constant { c: pair_from(&c)? },
            },
        })
    }

    pub fn to_function<T: Scalar>(&self) -> Result<(RadialFunction<T>, FieldParams)> {
        let fp = FieldParams::new(self.q)?;
        let grid = LevelGrid::new(self.n_min, self.n_max)?;
        let values = self.values.iter().map(pair_into).collect::<Result<_>>()?;
        let tail = match &self.tail {
            TailDoc::Zero => TailModel::Zero,
            TailDoc::Constant { c } => TailModel::Constant(pair_into(c)?),
        };
        let f = RadialFunction::new(grid, values, pair_into(&self.value_at_zero)?, tail)?;
        Ok((f, fp))
    }
}

/// Vector radial-function document (`dim` entries per level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorRadialDoc {
    pub q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub dim: usize,
    pub n_min: Level,
    pub n_max: Level,
    pub values: Vec<Vec<Pair>>,
    pub value_at_zero: Vec<Pair>,
    pub tail: TailDoc<Vec<Pair>>,
}

/// Matrix radial-function document (`dim * dim` row-major entries per level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRadialDoc {
    pub q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub dim: usize,
    pub n_min: Level,
    pub n_max: Level,
    pub values: Vec<Vec<Pair>>,
    pub value_at_zero: Vec<Pair>,
    pub tail: TailDoc<Vec<Pair>>,
}

fn block_values_from<T: Scalar>(values: &[Vec<C<T>>]) -> Result<Vec<Vec<Pair>>> {
    values
        .iter()
        .map(|level| level.iter().map(pair_from).collect())
        .collect()
}

fn block_values_into<T: Scalar>(values: &[Vec<Pair>]) -> Result<Vec<Vec<C<T>>>> {
    values
        .iter()
        .map(|level| level.iter().map(pair_into).collect())
        .collect()
}

fn block_tail_from<T: Scalar>(tail: &BlockTailModel<T>) -> Result<TailDoc<Vec<Pair>>> {
    Ok(match tail {
        BlockTailModel::Zero => TailDoc::Zero,
        BlockTailModel::Constant(c) => TailDoc::Constant {
            c: c.iter().map(pair_from).collect::<Result<_>>()?,
        },
    })
}

fn block_tail_into<T: Scalar>(tail: &TailDoc<Vec<Pair>>) -> Result<BlockTailModel<T>> {
    Ok(match tail {
        TailDoc::Zero => BlockTailModel::Zero,
        TailDoc::Constant { c } => {
            BlockTailModel::Constant(c.iter().map(pair_into).collect::<Result<_>>()?)
        }
    })
}

impl VectorRadialDoc {
    pub fn from_function<T: Scalar>(
        u: &VectorRadialFunction<T>,
        fp: FieldParams,
        alpha: Option<T>,
    ) -> Result<Self> {
        Ok(Self {
            q: fp.q(),
            alpha: alpha.and_then(|a| a.to_f64()),
            dim: u.dim(),
            n_min: u.grid().n_min(),
            n_max: u.grid().n_max(),
            values: block_values_from(u.values())?,
            value_at_zero: u.value_at_zero().iter().map(pair_from).collect::<Result<_>>()?,
            tail: block_tail_from(u.tail())?,
        })
    }

    pub fn to_function<T: Scalar>(&self) -> Result<(VectorRadialFunction<T>, FieldParams)> {
        let fp = FieldParams::new(self.q)?;
        let grid = LevelGrid::new(self.n_min, self.n_max)?;
        let f = VectorRadialFunction::new(
            grid,
            self.dim,
            block_values_into(&self.values)?,
            self.value_at_zero
                .iter()
                .map(pair_into)
                .collect::<Result<_>>()?,
            block_tail_into(&self.tail)?,
        )?;
        Ok((f, fp))
    }
}

impl MatrixRadialDoc {
    pub fn from_function<T: Scalar>(
        u: &MatrixRadialFunction<T>,
        fp: FieldParams,
        alpha: Option<T>,
    ) -> Result<Self> {
        Ok(Self {
            q: fp.q(),
            alpha: alpha.and_then(|a| a.to_f64()),
            dim: u.dim(),
            n_min: u.grid().n_min(),
            n_max: u.grid().n_max(),
            values: block_values_from(u.values())?,
            value_at_zero: u.value_at_zero().iter().map(pair_from).collect::<Result<_>>()?,
            tail: block_tail_from(u.tail())?,
        })
    }

    pub fn to_function<T: Scalar>(&self) -> Result<(MatrixRadialFunction<T>, FieldParams)> {
        let fp = FieldParams::new(self.q)?;
        let grid = LevelGrid::new(self.n_min, self.n_max)?;
        let f = MatrixRadialFunction::new(
            grid,
            self.dim,
            block_values_into(&self.values)?,
            self.value_at_zero
                .iter()
                .map(pair_into)
                .collect::<Result<_>>()?,
            block_tail_into(&self.tail)?,
        )?;
        Ok((f, fp))
    }
}

/// Serialize a radial function (with its field parameters and optionally the
/// order it is meant for) as a JSON document.
pub fn serialize<T: Scalar>(
    u: &RadialFunction<T>,
    fp: FieldParams,
    alpha: Option<T>,
) -> Result<String> {
    let doc = RadialDoc::from_function(u, fp, alpha)?;
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Document(e.to_string()))
}

/// Parse a JSON document back into a radial function and its parameters.
pub fn deserialize<T: Scalar>(
    text: &str,
) -> Result<(RadialFunction<T>, FieldParams, Option<T>)> {
    let doc: RadialDoc =
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    let alpha = match doc.alpha {
        Some(a) => Some(T::from_f64(a).ok_or_else(|| {
            Error::Document("alpha outside scalar range".into())
        })?),
        None => None,
    };
    let (f, fp) = doc.to_function()?;
    Ok((f, fp, alpha))
}
