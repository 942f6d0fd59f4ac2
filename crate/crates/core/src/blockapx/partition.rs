//! Partitions of index sets and blockwise averaging.

use crate::error::{Error, Result};
use crate::matcore::DenseMatrix;
use crate::scalar::Real;

/// A partition of `0..ground` into non-empty, disjoint, covering classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
    ground: usize,
}

impl Partition {
    pub fn new(classes: Vec<Vec<usize>>, ground: usize) -> Result<Self> {
        let mut seen = vec![false; ground];
        let mut covered = 0usize;
        for class in &classes {
            if class.is_empty() {
                return Err(Error::InvalidInput("empty partition class".into()));
            }
            for &i in class {
                if i >= ground || seen[i] {
                    return Err(Error::InvalidInput(format!(
                        "index {i} repeated or outside 0..{ground}"
                    )));
                }
                seen[i] = true;
                covered += 1;
            }
        }
        if covered != ground {
            return Err(Error::InvalidInput(format!(
                "classes cover {covered} of {ground} indices"
            )));
        }
        Ok(Self { classes, ground })
    }

    /// One class per index.
    pub fn singletons(ground: usize) -> Self {
        Self {
            classes: (0..ground).map(|i| vec![i]).collect(),
            ground,
        }
    }

    /// A single class holding everything.
    pub fn whole(ground: usize) -> Result<Self> {
        Self::new(vec![(0..ground).collect()], ground)
    }

    /// Consecutive intervals of the given sizes.
    pub fn intervals(sizes: &[usize]) -> Result<Self> {
        let ground = sizes.iter().sum();
        let mut classes = Vec::with_capacity(sizes.len());
        let mut next = 0usize;
        for &s in sizes {
            classes.push((next..next + s).collect());
            next += s;
        }
        Self::new(classes, ground)
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// `assignment()[i]` is the class index containing `i`.
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.ground];
        for (c, class) in self.classes.iter().enumerate() {
            for &i in class {
                out[i] = c;
            }
        }
        out
    }

    /// True iff every class of `self` is contained in a single class of
    /// `coarse`.
    pub fn refines(&self, coarse: &Partition) -> bool {
        if self.ground != coarse.ground {
            return false;
        }
        let coarse_of = coarse.assignment();
        self.classes
            .iter()
            .all(|class| class.iter().all(|&i| coarse_of[i] == coarse_of[class[0]]))
    }
}

/// Row and column partitions taken together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPair {
    pub rows: Partition,
    pub cols: Partition,
}

impl PartitionPair {
    pub fn new(rows: Partition, cols: Partition) -> Self {
        Self { rows, cols }
    }

    /// Total number of blocks.
    pub fn block_count(&self) -> usize {
        self.rows.num_classes() * self.cols.num_classes()
    }

    pub fn matches<T: Real>(&self, a: &DenseMatrix<T>) -> bool {
        self.rows.ground() == a.rows() && self.cols.ground() == a.cols()
    }
}

/// Replaces every block by its mean value. The overall matrix mean is
/// preserved exactly (up to roundoff) because each block keeps its mass.
pub fn block_average<T: Real>(a: &DenseMatrix<T>, part: &PartitionPair) -> Result<DenseMatrix<T>> {
    if !part.matches(a) {
        return Err(Error::DimensionMismatch(format!(
            "partition over {}x{} applied to {}x{} matrix",
            part.rows.ground(),
            part.cols.ground(),
            a.rows(),
            a.cols()
        )));
    }
    let mut data = vec![T::zero(); a.rows() * a.cols()];
    for rclass in part.rows.classes() {
        for cclass in part.cols.classes() {
            // An already-constant block keeps its value bit-for-bit, which
            // makes averaging exactly idempotent.
            let rep = a.get(rclass[0], cclass[0]);
            let mut constant = true;
            let mut acc = T::zero();
            for &i in rclass {
                for &j in cclass {
                    let v = a.get(i, j);
                    constant = constant && v == rep;
                    acc += v;
                }
            }
            let mean = if constant {
                rep
            } else {
                acc / T::of_usize(rclass.len() * cclass.len())
            };
            for &i in rclass {
                for &j in cclass {
                    data[i * a.cols() + j] = mean;
                }
            }
        }
    }
    DenseMatrix::from_vec(a.rows(), a.cols(), data)
}

/// Largest deviation of any entry from its block's representative (the
/// entry at the first listed row and column of the block); zero iff `a`
/// is exactly constant on every block of `part`.
pub fn max_block_deviation<T: Real>(a: &DenseMatrix<T>, part: &PartitionPair) -> Result<T> {
    if !part.matches(a) {
        return Err(Error::DimensionMismatch(format!(
            "partition over {}x{} applied to {}x{} matrix",
            part.rows.ground(),
            part.cols.ground(),
            a.rows(),
            a.cols()
        )));
    }
    let mut worst = T::zero();
    for rclass in part.rows.classes() {
        for cclass in part.cols.classes() {
            let rep = a.get(rclass[0], cclass[0]);
            for &i in rclass {
                for &j in cclass {
                    worst = worst.max((a.get(i, j) - rep).abs());
                }
            }
        }
    }
    Ok(worst)
}
