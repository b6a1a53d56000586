//! Two-dimensional PCA over image matrices, in four presentation spaces.
//!
//! Images are never flattened: the image covariance is `n x n` where `n` is
//! the column count, and each image is projected row by row onto the top
//! eigen-axes. The four orientations differ only in the pre-transform applied
//! to each image before fitting or projecting:
//!
//! | orientation | pre-transform                              |
//! |-------------|--------------------------------------------|
//! | `Column`    | none                                       |
//! | `Row`       | transpose                                  |
//! | `Diagonal`  | [`diagonal_image`] (cyclic shifts)         |
//! | `Block`     | [`block_rearrange`] (blocks stacked)       |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigen::{jacobi_eigh, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Column,
    Row,
    Diagonal,
    Block,
}

impl Orientation {
    /// Feature-space order: V1 = column, V2 = row, V3 = diagonal, V4 = block.
    pub const ALL: [Orientation; 4] = [
        Orientation::Column,
        Orientation::Row,
        Orientation::Diagonal,
        Orientation::Block,
    ];

    pub fn index(self) -> usize {
        match self {
            Orientation::Column => 0,
            Orientation::Row => 1,
            Orientation::Diagonal => 2,
            Orientation::Block => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Orientation::Column => "column",
            Orientation::Row => "row",
            Orientation::Diagonal => "diagonal",
            Orientation::Block => "block",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Block partition used by the block orientation: `rows x cols` equal blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGrid {
    pub rows: usize,
    pub cols: usize,
}

impl Default for BlockGrid {
    fn default() -> Self {
        BlockGrid { rows: 2, cols: 2 }
    }
}

impl fmt::Display for BlockGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl FromStr for BlockGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |part: &str| part.trim().parse::<usize>().ok().filter(|&v| v > 0);
        match s.split_once(['x', 'X']) {
            Some((r, c)) => match (parse(r), parse(c)) {
                (Some(rows), Some(cols)) => Ok(BlockGrid { rows, cols }),
                _ => Err(Error::param(format!("invalid block grid '{s}'"))),
            },
            None => Err(Error::param(format!(
                "invalid block grid '{s}', expected ROWSxCOLS"
            ))),
        }
    }
}

/// Elementwise mean of a non-empty list of equally shaped images.
pub fn mean_image(images: &[Matrix]) -> Result<Matrix> {
    let first = images
        .first()
        .ok_or_else(|| Error::EmptyDataset("no images to average".into()))?;
    check_uniform(images)?;
    let mut sum = vec![0.0; first.rows() * first.cols()];
    for img in images {
        for (s, v) in sum.iter_mut().zip(img.as_slice()) {
            *s += v;
        }
    }
    let n = images.len() as f64;
    Matrix::new(
        first.rows(),
        first.cols(),
        sum.into_iter().map(|s| s / n).collect(),
    )
}

fn check_uniform(images: &[Matrix]) -> Result<()> {
    let shape = images[0].shape();
    if let Some((i, img)) = images.iter().enumerate().find(|(_, m)| m.shape() != shape) {
        return Err(Error::shape(format!(
            "image {i} is {}x{}, expected {}x{}",
            img.rows(),
            img.cols(),
            shape.0,
            shape.1
        )));
    }
    Ok(())
}

/// `C = (1/N) Σ (X_i - X̄)ᵀ (X_i - X̄)`.
///
/// Only the upper triangle is accumulated and then mirrored, so the result is
/// exactly symmetric.
pub fn image_covariance(images: &[Matrix], mean: &Matrix) -> Result<Matrix> {
    if images.is_empty() {
        return Err(Error::EmptyDataset("no images for covariance".into()));
    }
    check_uniform(images)?;
    if images[0].shape() != mean.shape() {
        return Err(Error::shape(format!(
            "mean image is {}x{}, images are {}x{}",
            mean.rows(),
            mean.cols(),
            images[0].rows(),
            images[0].cols()
        )));
    }
    let n = mean.cols();
    let mut cov = Matrix::zeros(n, n);
    for img in images {
        let dev = img.sub(mean)?;
        for r in 0..dev.rows() {
            let row = dev.row(r);
            for j in 0..n {
                if row[j] == 0.0 {
                    continue;
                }
                for k in j..n {
                    cov[(j, k)] += row[j] * row[k];
                }
            }
        }
    }
    let scale = 1.0 / images.len() as f64;
    for j in 0..n {
        for k in j..n {
            let v = cov[(j, k)] * scale;
            cov[(j, k)] = v;
            cov[(k, j)] = v;
        }
    }
    Ok(cov)
}

/// Diagonal image used by the diagonal orientation.
///
/// With `rows <= cols`, row `i` is cyclically shifted left by `i`:
/// `out[i][j] = in[i][(i + j) mod cols]`. Otherwise column `j` is shifted up
/// by `j`: `out[i][j] = in[(i + j) mod rows][j]`. Either way the main diagonal
/// of the input ends up in the first row or column of the output.
pub fn diagonal_image(image: &Matrix) -> Matrix {
    let (rows, cols) = image.shape();
    if rows <= cols {
        Matrix::from_fn(rows, cols, |i, j| image[(i, (i + j) % cols)])
    } else {
        Matrix::from_fn(rows, cols, |i, j| image[((i + j) % rows, j)])
    }
}

/// Inverse of [`diagonal_image`]: shifts rows right (or columns down) again.
pub fn undo_diagonal_image(image: &Matrix) -> Matrix {
    let (rows, cols) = image.shape();
    if rows <= cols {
        Matrix::from_fn(rows, cols, |i, k| image[(i, (k + cols - i % cols) % cols)])
    } else {
        Matrix::from_fn(rows, cols, |k, j| image[((k + rows - j % rows) % rows, j)])
    }
}

/// Cuts the image into `grid.rows x grid.cols` equal blocks and stacks them
/// vertically in row-major block order, giving a
/// `(rows * grid.cols) x (cols / grid.cols)` matrix.
pub fn block_rearrange(image: &Matrix, grid: BlockGrid) -> Result<Matrix> {
    let (rows, cols) = image.shape();
    check_grid(rows, cols, grid)?;
    let (bh, bw) = (rows / grid.rows, cols / grid.cols);
    Ok(Matrix::from_fn(rows * grid.cols, bw, |r, c| {
        let (block, within) = (r / bh, r % bh);
        let (br, bc) = (block / grid.cols, block % grid.cols);
        image[(br * bh + within, bc * bw + c)]
    }))
}

/// Inverse of [`block_rearrange`].
pub fn undo_block_rearrange(stacked: &Matrix, grid: BlockGrid) -> Result<Matrix> {
    if grid.rows == 0 || grid.cols == 0 || !stacked.rows().is_multiple_of(grid.cols) {
        return Err(Error::BlockGrid {
            rows: stacked.rows(),
            cols: stacked.cols(),
            grid_rows: grid.rows,
            grid_cols: grid.cols,
        });
    }
    let (rows, cols) = (stacked.rows() / grid.cols, stacked.cols() * grid.cols);
    check_grid(rows, cols, grid)?;
    let (bh, bw) = (rows / grid.rows, cols / grid.cols);
    Ok(Matrix::from_fn(rows, cols, |i, j| {
        let (br, bc) = (i / bh, j / bw);
        let block = br * grid.cols + bc;
        stacked[(block * bh + i % bh, j % bw)]
    }))
}

fn check_grid(rows: usize, cols: usize, grid: BlockGrid) -> Result<()> {
    if grid.rows == 0
        || grid.cols == 0
        || !rows.is_multiple_of(grid.rows)
        || !cols.is_multiple_of(grid.cols)
    {
        return Err(Error::BlockGrid {
            rows,
            cols,
            grid_rows: grid.rows,
            grid_cols: grid.cols,
        });
    }
    Ok(())
}

/// Applies the orientation's pre-transform. `grid` is only used for `Block`.
pub fn pre_transform(image: &Matrix, orientation: Orientation, grid: BlockGrid) -> Result<Matrix> {
    Ok(match orientation {
        Orientation::Column => image.clone(),
        Orientation::Row => image.transpose(),
        Orientation::Diagonal => diagonal_image(image),
        Orientation::Block => block_rearrange(image, grid)?,
    })
}

fn undo_pre_transform(m: &Matrix, orientation: Orientation, grid: BlockGrid) -> Result<Matrix> {
    Ok(match orientation {
        Orientation::Column => m.clone(),
        Orientation::Row => m.transpose(),
        Orientation::Diagonal => undo_diagonal_image(m),
        Orientation::Block => undo_block_rearrange(m, grid)?,
    })
}

/// A fitted 2D-PCA model for one orientation.
///
/// `mean` is the mean of the pre-transformed training images and is kept for
/// diagnostics only: projection is uncentered. `axes` holds the top `d`
/// eigenvectors of the image covariance as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionBasis {
    pub orientation: Orientation,
    pub mean: Matrix,
    pub axes: Matrix,
    pub eigenvalues: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_grid: Option<BlockGrid>,
}

impl ProjectionBasis {
    /// Number of projection axes.
    pub fn d(&self) -> usize {
        self.axes.cols()
    }

    /// Column count of the pre-transformed images.
    pub fn n_eff(&self) -> usize {
        self.axes.rows()
    }

    /// Row count of the pre-transformed images.
    pub fn rows_eff(&self) -> usize {
        self.mean.rows()
    }

    pub fn feature_len(&self) -> usize {
        self.rows_eff() * self.d()
    }

    /// Shape of the original images this basis accepts.
    pub fn image_shape(&self) -> (usize, usize) {
        let (r, c) = self.mean.shape();
        match self.orientation {
            Orientation::Column | Orientation::Diagonal => (r, c),
            Orientation::Row => (c, r),
            Orientation::Block => {
                let g = self.grid();
                (r / g.cols, c * g.cols)
            }
        }
    }

    fn grid(&self) -> BlockGrid {
        self.block_grid.unwrap_or_default()
    }

    /// Checks the structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| {
            Err(Error::Configuration(format!(
                "{} basis: {msg}",
                self.orientation
            )))
        };
        if self.mean.cols() != self.axes.rows() {
            return bad(format!(
                "axes have {} rows but the mean image has {} columns",
                self.axes.rows(),
                self.mean.cols()
            ));
        }
        if self.eigenvalues.len() != self.d() {
            return bad(format!(
                "{} eigenvalues for {} axes",
                self.eigenvalues.len(),
                self.d()
            ));
        }
        if self.eigenvalues.iter().any(|v| !v.is_finite()) {
            return bad("non-finite eigenvalue".into());
        }
        if self.eigenvalues.windows(2).any(|w| w[1] > w[0]) {
            return bad("eigenvalues are not sorted non-increasing".into());
        }
        match (self.orientation, self.block_grid) {
            (Orientation::Block, None) => return bad("missing block grid".into()),
            (Orientation::Block, Some(g)) => {
                if g.rows == 0 || g.cols == 0 || !self.mean.rows().is_multiple_of(g.cols) {
                    return bad(format!("block grid {g} does not fit the mean image"));
                }
                let (r, c) = self.image_shape();
                if r % g.rows != 0 || c % g.cols != 0 {
                    return bad(format!("block grid {g} does not divide {r}x{c}"));
                }
            }
            (_, Some(_)) => return bad("block grid on a non-block orientation".into()),
            (_, None) => {}
        }
        let gram = self.axes.transpose().mat_mul(&self.axes)?;
        if gram.max_abs_diff(&Matrix::identity(self.d())) > 1e-8 {
            return bad("axes are not orthonormal".into());
        }
        Ok(())
    }
}

/// Fits a 2D-PCA basis with `d` axes in the given orientation.
///
/// `block_grid` only applies to [`Orientation::Block`] and defaults to 2x2.
pub fn fit_2dpca(
    images: &[Matrix],
    d: usize,
    orientation: Orientation,
    block_grid: Option<BlockGrid>,
) -> Result<ProjectionBasis> {
    if images.is_empty() {
        return Err(Error::EmptyDataset("no images to fit a basis on".into()));
    }
    check_uniform(images)?;
    let grid = block_grid.unwrap_or_default();
    let transformed = images
        .iter()
        .map(|img| pre_transform(img, orientation, grid))
        .collect::<Result<Vec<_>>>()?;
    let n_eff = transformed[0].cols();
    if d == 0 || d > n_eff {
        return Err(Error::param(format!(
            "d must be in 1..={n_eff} for the {orientation} orientation, got {d}"
        )));
    }
    let mean = mean_image(&transformed)?;
    let cov = image_covariance(&transformed, &mean)?;
    let eig = jacobi_eigh(&cov, DEFAULT_TOLERANCE)?;
    let axes = Matrix::from_fn(n_eff, d, |i, j| eig.vectors[(i, j)]);
    Ok(ProjectionBasis {
        orientation,
        mean,
        axes,
        eigenvalues: eig.values[..d].to_vec(),
        block_grid: (orientation == Orientation::Block).then_some(grid),
    })
}

/// Flattened 2D-PCA features of one image in one orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub orientation: Orientation,
    pub values: Vec<f64>,
}

/// Projects `image` onto the basis: `F = A · axes`, flattened row-major,
/// where `A` is the pre-transformed (uncentered) image.
pub fn project_2dpca(image: &Matrix, basis: &ProjectionBasis) -> Result<FeatureVector> {
    let expected = basis.image_shape();
    if image.shape() != expected {
        return Err(Error::shape(format!(
            "image is {}x{}, the {} basis expects {}x{}",
            image.rows(),
            image.cols(),
            basis.orientation,
            expected.0,
            expected.1
        )));
    }
    let a = pre_transform(image, basis.orientation, basis.grid())?;
    let f = a.mat_mul(&basis.axes)?;
    Ok(FeatureVector {
        orientation: basis.orientation,
        values: f.into_vec(),
    })
}

/// Rebuilds an image from its features: `A_rec = F · axesᵀ`, then undoes the
/// orientation pre-transform.
pub fn reconstruct(feature: &FeatureVector, basis: &ProjectionBasis) -> Result<Matrix> {
    if feature.values.len() != basis.feature_len() {
        return Err(Error::shape(format!(
            "feature has {} values, the {} basis produces {}",
            feature.values.len(),
            basis.orientation,
            basis.feature_len()
        )));
    }
    let f = Matrix::new(basis.rows_eff(), basis.d(), feature.values.clone())?;
    let a_rec = f.mat_mul(&basis.axes.transpose())?;
    undo_pre_transform(&a_rec, basis.orientation, basis.grid())
}

/// The four feature vectors of one image, V1..V4.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub column: FeatureVector,
    pub row: FeatureVector,
    pub diagonal: FeatureVector,
    pub block: FeatureVector,
}

impl FeatureSet {
    pub fn get(&self, orientation: Orientation) -> &FeatureVector {
        match orientation {
            Orientation::Column => &self.column,
            Orientation::Row => &self.row,
            Orientation::Diagonal => &self.diagonal,
            Orientation::Block => &self.block,
        }
    }

    /// Feature values in V1..V4 order.
    pub fn spaces(&self) -> [&[f64]; 4] {
        Orientation::ALL.map(|o| self.get(o).values.as_slice())
    }
}

/// Returns the bases reordered as column, row, diagonal, block, or a
/// configuration error if any orientation is missing or repeated.
pub fn order_bases(bases: &[ProjectionBasis]) -> Result<[&ProjectionBasis; 4]> {
    let mut slots: [Option<&ProjectionBasis>; 4] = [None; 4];
    for b in bases {
        let slot = &mut slots[b.orientation.index()];
        if slot.is_some() {
            return Err(Error::Configuration(format!(
                "duplicate {} basis",
                b.orientation
            )));
        }
        *slot = Some(b);
    }
    for (o, s) in Orientation::ALL.iter().zip(&slots) {
        if s.is_none() {
            return Err(Error::Configuration(format!("missing {o} basis")));
        }
    }
    Ok(slots.map(|s| s.unwrap()))
}

/// Projects one image into all four presentation spaces.
pub fn extract_feature_set(image: &Matrix, bases: &[ProjectionBasis]) -> Result<FeatureSet> {
    let [c, r, d, b] = order_bases(bases)?;
    Ok(FeatureSet {
        column: project_2dpca(image, c)?,
        row: project_2dpca(image, r)?,
        diagonal: project_2dpca(image, d)?,
        block: project_2dpca(image, b)?,
    })
}

/// Per-orientation settings for fitting the four bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureConfig {
    /// Axes kept per orientation, in column, row, diagonal, block order.
    pub d: [usize; 4],
    pub block_grid: BlockGrid,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            d: [8; 4],
            block_grid: BlockGrid::default(),
        }
    }
}

impl FeatureConfig {
    /// Checks, without fitting anything, that images of this shape can be
    /// pre-transformed and that every `d` is in range.
    pub fn check_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape(format!("empty image shape {rows}x{cols}")));
        }
        check_grid(rows, cols, self.block_grid)?;
        for o in Orientation::ALL {
            let n_eff = match o {
                Orientation::Column | Orientation::Diagonal => cols,
                Orientation::Row => rows,
                Orientation::Block => cols / self.block_grid.cols,
            };
            let d = self.d[o.index()];
            if d == 0 || d > n_eff {
                return Err(Error::param(format!(
                    "d must be in 1..={n_eff} for the {o} orientation, got {d}"
                )));
            }
        }
        Ok(())
    }
}

/// Fits all four bases on the same training images, in V1..V4 order.
pub fn fit_bases(images: &[Matrix], cfg: &FeatureConfig) -> Result<Vec<ProjectionBasis>> {
    Orientation::ALL
        .iter()
        .map(|&o| fit_2dpca(images, cfg.d[o.index()], o, Some(cfg.block_grid)))
        .collect()
}
