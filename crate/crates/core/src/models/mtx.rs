//! Matrix Market (`.mtx`) reader for `array` and `coordinate` files with
//! `real`, `integer` or `complex` fields.

use std::path::Path;

use super::state_space::{SparseMatrix, StateSpaceModel, SystemMatrix};
use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

#[derive(Debug, Clone)]
pub struct MatrixMarket {
    pub layout: Layout,
    pub nrows: usize,
    pub ncols: usize,
    /// Zero-based `(row, col, value)`, symmetric halves expanded.
    pub entries: Vec<(usize, usize, C64)>,
}

impl MatrixMarket {
    pub fn to_dense(&self) -> linalg::CMat {
        let mut a = linalg::zeros(self.nrows, self.ncols);
        for &(i, j, v) in &self.entries {
            a[(i, j)] += v;
        }
        a
    }

    fn column(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.nrows];
        for &(i, _, x) in &self.entries {
            v[i] += x;
        }
        v
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MatrixMarket> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_matrix_market(&text, &path.display().to_string())
}

pub fn parse_matrix_market(text: &str, origin: &str) -> Result<MatrixMarket> {
    let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (ln, banner) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let toks: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(err(ln, format!("bad banner `{banner}`")));
    }
    let layout = match toks[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(err(ln, format!("unsupported format `{other}`"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        other => return Err(err(ln, format!("unsupported field `{other}`"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(err(ln, format!("unsupported symmetry `{other}`"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (ln, size) = data.next().ok_or_else(|| err(ln, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| err(ln, format!("bad size `{t}`: {e}"))))
        .collect::<Result<_>>()?;
    let expected_dims = if layout == Layout::Coordinate { 3 } else { 2 };
    if dims.len() != expected_dims {
        return Err(err(ln, format!("expected {expected_dims} size fields, found {}", dims.len())));
    }
    let (nrows, ncols) = (dims[0], dims[1]);

    let parse_value = |ln: usize, toks: &[&str]| -> Result<C64> {
        let f = |t: &str| t.parse::<f64>().map_err(|e| err(ln, format!("bad number `{t}`: {e}")));
        match (field, toks.len()) {
            (Field::Complex, 2) => Ok(C64::new(f(toks[0])?, f(toks[1])?)),
            (Field::Real | Field::Integer, 1) => Ok(C64::new(f(toks[0])?, 0.0)),
            _ => Err(err(ln, format!("wrong number of value fields ({})", toks.len()))),
        }
    };

    let mut entries = Vec::new();
    let push_mirrored = |entries: &mut Vec<(usize, usize, C64)>, i: usize, j: usize, v: C64| {
        entries.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => entries.push((j, i, v)),
                Symmetry::SkewSymmetric => entries.push((j, i, -v)),
                Symmetry::Hermitian => entries.push((j, i, v.conj())),
            }
        }
    };

    match layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            for _ in 0..nnz {
                let (ln, line) = data.next().ok_or_else(|| err(0, format!("expected {nnz} entries, file ended")))?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() < 3 {
                    return Err(err(ln, "entry needs row, column and value".into()));
                }
                let idx = |t: &str| t.parse::<usize>().map_err(|e| err(ln, format!("bad index `{t}`: {e}")));
                let (i, j) = (idx(toks[0])?, idx(toks[1])?);
                if i == 0 || j == 0 || i > nrows || j > ncols {
                    return Err(err(ln, format!("index ({i}, {j}) out of range for {nrows}x{ncols}")));
                }
                let v = parse_value(ln, &toks[2..])?;
                push_mirrored(&mut entries, i - 1, j - 1, v);
            }
        }
        Layout::Array => {
            // column-major; symmetric variants store the lower triangle only
            let cells: Vec<(usize, usize)> = (0..ncols)
                .flat_map(|j| (0..nrows).map(move |i| (i, j)))
                .filter(|&(i, j)| match symmetry {
                    Symmetry::General => true,
                    Symmetry::SkewSymmetric => i > j,
                    _ => i >= j,
                })
                .collect();
            for (i, j) in cells {
                let (ln, line) = data
                    .next()
                    .ok_or_else(|| err(0, format!("array data ended before entry ({}, {})", i + 1, j + 1)))?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                let v = parse_value(ln, &toks)?;
                if v != C64::new(0.0, 0.0) {
                    push_mirrored(&mut entries, i, j, v);
                }
            }
        }
    }
    if let Some((ln, _)) = data.next() {
        return Err(err(ln, "trailing data after declared entries".into()));
    }
    Ok(MatrixMarket { layout, nrows, ncols, entries })
}

/// Assemble `G(z) = c^* (zI - A)^{-1} b + d` from three Matrix Market
/// files. Coordinate-format `A` is kept sparse.
pub fn load_matrix_market(
    path_a: impl AsRef<Path>,
    path_b: impl AsRef<Path>,
    path_c: impl AsRef<Path>,
    d: C64,
) -> Result<StateSpaceModel> {
    let a = read_matrix_market(&path_a)?;
    let b = read_matrix_market(&path_b)?;
    let c = read_matrix_market(&path_c)?;
    assemble(&a, &b, &c, d)
}

pub fn assemble(a: &MatrixMarket, b: &MatrixMarket, c: &MatrixMarket, d: C64) -> Result<StateSpaceModel> {
    if a.nrows != a.ncols {
        return Err(Error::DimensionMismatch(format!("A is {}x{}", a.nrows, a.ncols)));
    }
    let n = a.nrows;
    for (name, m) in [("B", b), ("C", c)] {
        if m.nrows != n || m.ncols != 1 {
            return Err(Error::DimensionMismatch(format!("{name} is {}x{}, expected {n}x1", m.nrows, m.ncols)));
        }
    }
    let sys = match a.layout {
        Layout::Coordinate => SystemMatrix::Sparse(SparseMatrix::from_triplets(n, &a.entries)?),
        Layout::Array => SystemMatrix::Dense(a.to_dense()),
    };
    Ok(StateSpaceModel::new(sys, b.column(), c.column(), d)?.with_name("matrix-market"))
}
