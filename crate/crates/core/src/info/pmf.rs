use alloc::{string::String, vec, vec::Vec};

use super::scalar::plogp;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// A named finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    name: String,
    size: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Axis { name: name.into(), size }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

fn check_axes(axes: &[Axis]) -> Result<usize> {
    let mut len = 1usize;
    for (i, axis) in axes.iter().enumerate() {
        if axis.size == 0 {
            return Err(Error::InvalidConfig(alloc::format!("axis `{}` is empty", axis.name)));
        }
        if axes[..i].iter().any(|a| a.name == axis.name) {
            return Err(Error::DuplicateAxis(axis.name.clone()));
        }
        len *= axis.size;
    }
    Ok(len)
}

/// Row-major strides, last axis fastest.
fn strides(axes: &[Axis]) -> Vec<usize> {
    let mut s = vec![1usize; axes.len()];
    for i in (0..axes.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * axes[i + 1].size;
    }
    s
}

/// Advances a multi-index in row-major order. Returns false after the last
/// index has been visited.
#[inline]
pub(crate) fn advance(idx: &mut [usize], sizes: &[usize]) -> bool {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < sizes[d] {
            return true;
        }
        idx[d] = 0;
    }
    false
}

/// A dense joint distribution over a product of named finite alphabets.
///
/// Entries are stored row-major with the last axis varying fastest. The table
/// is validated on construction: entries are non-negative and sum to one
/// within `1e-12`. Nothing is renormalized.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FinitePmf {
    axes: Vec<Axis>,
    table: Vec<f64>,
}

impl FinitePmf {
    pub fn new(axes: Vec<Axis>, table: Vec<f64>) -> Result<Self> {
        let len = check_axes(&axes)?;
        if table.len() != len {
            return Err(Error::ShapeMismatch { expected: len, got: table.len() });
        }
        let mut sum = 0.0;
        for (index, &value) in table.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeEntry { index, value });
            }
            sum += value;
        }
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(FinitePmf { axes, table })
    }

    /// Builds a table from a function of the multi-index, then validates it.
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = check_axes(&axes)?;
        let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
        let mut idx = vec![0usize; axes.len()];
        let mut table = Vec::with_capacity(len);
        loop {
            table.push(f(&idx));
            if !advance(&mut idx, &sizes) {
                break;
            }
        }
        FinitePmf::new(axes, table)
    }

    pub fn uniform(axes: Vec<Axis>) -> Result<Self> {
        let len = check_axes(&axes)?;
        FinitePmf::new(axes, vec![1.0 / len as f64; len])
    }

    /// Internal constructor for tables derived from validated inputs
    /// (marginals, products, kernel extensions).
    pub(crate) fn from_parts(axes: Vec<Axis>, table: Vec<f64>) -> Self {
        debug_assert_eq!(table.len(), axes.iter().map(|a| a.size).product::<usize>());
        FinitePmf { axes, table }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.size).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes.iter().position(|a| a.name == name).ok_or_else(|| Error::UnknownAxis(name.into()))
    }

    pub fn axis(&self, name: &str) -> Result<&Axis> {
        self.axis_index(name).map(|i| &self.axes[i])
    }

    /// Probability of a full multi-index.
    pub fn get(&self, idx: &[usize]) -> f64 {
        let s = strides(&self.axes);
        self.table[idx.iter().zip(&s).map(|(i, s)| i * s).sum::<usize>()]
    }

    /// Marginal onto the named axes, in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<FinitePmf> {
        let mut keep = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateAxis((*name).into()));
            }
            keep.push(self.axis_index(name)?);
        }
        let out_axes: Vec<Axis> = keep.iter().map(|&i| self.axes[i].clone()).collect();
        let out_strides = strides(&out_axes);
        // Stride of each source axis inside the output table (0 if summed out).
        let mut map = vec![0usize; self.axes.len()];
        for (pos, &src) in keep.iter().enumerate() {
            map[src] = out_strides[pos];
        }
        let out_len = out_axes.iter().map(|a| a.size).product();
        let mut out = vec![0.0; out_len];
        let sizes = self.sizes();
        let mut idx = vec![0usize; sizes.len()];
        let mut target = 0usize;
        for &p in &self.table {
            out[target] += p;
            // Odometer step that keeps `target` in sync.
            for d in (0..idx.len()).rev() {
                idx[d] += 1;
                target += map[d];
                if idx[d] < sizes[d] {
                    break;
                }
                target -= map[d] * sizes[d];
                idx[d] = 0;
            }
        }
        Ok(FinitePmf::from_parts(out_axes, out))
    }

    /// Shannon entropy of the whole table in bits.
    pub fn entropy(&self) -> f64 {
        -self.table.iter().map(|&p| plogp(p)).sum::<f64>()
    }

    /// Joint entropy of the named axes.
    pub fn entropy_of(&self, names: &[&str]) -> Result<f64> {
        Ok(self.marginal(names)?.entropy())
    }

    /// Independent product `p(self) p(other)`.
    pub fn product(&self, other: &FinitePmf) -> Result<FinitePmf> {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        check_axes(&axes)?;
        let mut table = Vec::with_capacity(self.table.len() * other.table.len());
        for &p in &self.table {
            table.extend(other.table.iter().map(|&q| p * q));
        }
        Ok(FinitePmf::from_parts(axes, table))
    }

    /// Appends the kernel's child axes: `p(self) p(children | parents)`.
    pub fn extend(&self, kernel: &Kernel) -> Result<FinitePmf> {
        let own_strides = strides(&self.axes);
        let parent_strides = strides(&kernel.parents);
        // Contribution of each own axis to the kernel row index.
        let mut map = vec![0usize; self.axes.len()];
        for (k, parent) in kernel.parents.iter().enumerate() {
            let i = self.axis_index(&parent.name)?;
            if self.axes[i].size != parent.size {
                return Err(Error::ShapeMismatch { expected: self.axes[i].size, got: parent.size });
            }
            map[i] = parent_strides[k];
        }
        let mut axes = self.axes.clone();
        axes.extend(kernel.children.iter().cloned());
        check_axes(&axes)?;
        let cc = kernel.child_len();
        let mut table = Vec::with_capacity(self.table.len() * cc);
        for (flat, &p) in self.table.iter().enumerate() {
            let mut row = 0usize;
            let mut rem = flat;
            for (d, s) in own_strides.iter().enumerate() {
                row += (rem / s) * map[d];
                rem %= s;
            }
            table.extend(kernel.row(row).iter().map(|&k| p * k));
        }
        Ok(FinitePmf::from_parts(axes, table))
    }
}

/// A conditional distribution `p(children | parents)` stored as a dense
/// row-stochastic table: one row per parent configuration (row-major over the
/// parents), each row row-major over the children.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Kernel {
    parents: Vec<Axis>,
    children: Vec<Axis>,
    table: Vec<f64>,
}

impl Kernel {
    pub fn new(parents: Vec<Axis>, children: Vec<Axis>, table: Vec<f64>) -> Result<Self> {
        let mut all = parents.clone();
        all.extend(children.iter().cloned());
        check_axes(&all)?;
        let rows: usize = parents.iter().map(|a| a.size).product();
        let cols: usize = children.iter().map(|a| a.size).product();
        if table.len() != rows * cols {
            return Err(Error::ShapeMismatch { expected: rows * cols, got: table.len() });
        }
        for (row, chunk) in table.chunks(cols).enumerate() {
            let mut sum = 0.0;
            for (j, &v) in chunk.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::NegativeEntry { index: row * cols + j, value: v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > NORM_TOL {
                return Err(Error::NotStochastic { row, sum });
            }
        }
        Ok(Kernel { parents, children, table })
    }

    /// Internal constructor for tables kept stochastic by construction.
    pub(crate) fn from_parts(parents: Vec<Axis>, children: Vec<Axis>, table: Vec<f64>) -> Self {
        debug_assert_eq!(table.len(), parents.iter().chain(&children).map(|a| a.size).product::<usize>());
        Kernel { parents, children, table }
    }

    /// Builds the table from `f(parent_index, child_index)`.
    pub fn from_fn(
        parents: Vec<Axis>,
        children: Vec<Axis>,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let psizes: Vec<usize> = parents.iter().map(|a| a.size).collect();
        let csizes: Vec<usize> = children.iter().map(|a| a.size).collect();
        let mut table = Vec::new();
        let mut pi = vec![0usize; psizes.len()];
        loop {
            let mut ci = vec![0usize; csizes.len()];
            loop {
                table.push(f(&pi, &ci));
                if !advance(&mut ci, &csizes) {
                    break;
                }
            }
            if !advance(&mut pi, &psizes) {
                break;
            }
        }
        Kernel::new(parents, children, table)
    }

    /// Deterministic kernel `child = f(parents)` with a single child axis.
    pub fn deterministic(parents: Vec<Axis>, child: Axis, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        Kernel::from_fn(parents, alloc::vec![child], |p, c| if f(p) == c[0] { 1.0 } else { 0.0 })
    }

    /// Binary symmetric channel with crossover `p` from `parent` to `child`.
    pub fn bsc(parent: &str, child: &str, p: f64) -> Result<Self> {
        Kernel::new(
            alloc::vec![Axis::new(parent, 2)],
            alloc::vec![Axis::new(child, 2)],
            alloc::vec![1.0 - p, p, p, 1.0 - p],
        )
    }

    pub fn parents(&self) -> &[Axis] {
        &self.parents
    }

    pub fn children(&self) -> &[Axis] {
        &self.children
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row_len(&self) -> usize {
        self.parents.iter().map(|a| a.size).product()
    }

    pub fn child_len(&self) -> usize {
        self.children.iter().map(|a| a.size).product()
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        let cc = self.child_len();
        &self.table[row * cc..(row + 1) * cc]
    }

    /// Same table with renamed axes.
    pub fn renamed(&self, parents: &[&str], children: &[&str]) -> Result<Kernel> {
        if parents.len() != self.parents.len() || children.len() != self.children.len() {
            return Err(Error::ShapeMismatch { expected: self.parents.len(), got: parents.len() });
        }
        let p = self.parents.iter().zip(parents).map(|(a, n)| Axis::new(*n, a.size)).collect();
        let c = self.children.iter().zip(children).map(|(a, n)| Axis::new(*n, a.size)).collect();
        Kernel::new(p, c, self.table.clone())
    }
}

/// Conditional mutual information `I(X; Y | Z)` in bits, where each of
/// `X`, `Y`, `Z` is a group of axes of `pmf`.
///
/// `z` may be empty (plain mutual information). Returns exactly zero when `x`
/// or `y` is empty. Terms with zero probability contribute nothing.
pub fn cond_mutual_info(pmf: &FinitePmf, x: &[&str], y: &[&str], z: &[&str]) -> Result<f64> {
    let groups = [x, y, z];
    for (gi, group) in groups.iter().enumerate() {
        for (i, name) in group.iter().enumerate() {
            pmf.axis_index(name)?;
            let repeated = group[..i].contains(name) || groups[gi + 1..].iter().any(|g| g.contains(name));
            if repeated {
                return Err(Error::OverlappingAxes((*name).into()));
            }
        }
    }
    if x.is_empty() || y.is_empty() {
        return Ok(0.0);
    }
    let names: Vec<&str> = x.iter().chain(y).chain(z).copied().collect();
    let joint = pmf.marginal(&names)?;
    let size = |g: &[&str]| -> usize { g.iter().map(|n| pmf.axis(n).map_or(1, |a| a.size)).product() };
    let (nx, ny, nz) = (size(x), size(y), size(z));
    let t = joint.table();

    let mut p_xz = vec![0.0; nx * nz];
    let mut p_yz = vec![0.0; ny * nz];
    let mut p_z = vec![0.0; nz];
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let p = t[(i * ny + j) * nz + k];
                p_xz[i * nz + k] += p;
                p_yz[j * nz + k] += p;
                p_z[k] += p;
            }
        }
    }
    let mut acc = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let p = t[(i * ny + j) * nz + k];
                if p > 0.0 {
                    acc += p * libm::log2(p * p_z[k] / (p_xz[i * nz + k] * p_yz[j * nz + k]));
                }
            }
        }
    }
    Ok(acc)
}
