//! Dynamic pivot selection: a total order on index-tagged step weights,
//! weight sorting, and the greedy construction of the index-disjoint pivot
//! batch executed as one multi-step.
//!
//! Heavier weights sort first, so the batch always opens with the pivot
//! whose step drops the off-diagonal norm the most.  `NaN` marks a pair
//! that needs no transformation (or cannot be assessed) and `-∞` marks an
//! undefined hyperbolic kernel; both are removed before selection.

use std::cmp::Ordering as CmpOrdering;

use rayon::prelude::*;

/// A step weight tagged with its pivot indices (zero-based, `p < q`).
///
/// The derived equality is componentwise on the raw `f64`, so two `NaN`
/// weights compare unequal; use [`weight_cmp`] for the total order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugWeight {
    /// The prospective off-norm drop; `NaN` when no step is wanted, `-∞`
    /// when the hyperbolic kernel is undefined at the current `υ`.
    pub w: f64,
    pub p: usize,
    pub q: usize,
}

impl AugWeight {
    pub fn new(w: f64, p: usize, q: usize) -> AugWeight {
        assert!(p < q, "pivot indices must satisfy p < q");
        AugWeight { w, p, q }
    }

    /// The band `q − p` used as the first tie-breaker.
    #[inline]
    pub fn band(&self) -> usize {
        self.q - self.p
    }
}

/// Total order on bare weight values: `NaN < -∞ < finite ascending < +∞`,
/// with every `NaN` equal to every other `NaN`.
fn w_order(a: f64, b: f64) -> CmpOrdering {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => CmpOrdering::Equal,
        (true, false) => CmpOrdering::Less,
        (false, true) => CmpOrdering::Greater,
        (false, false) => a.partial_cmp(&b).expect("both values are ordered"),
    }
}

/// The total order `⪯` on augmented weights.
///
/// `a ⪯ b` when `a` is the more urgent pivot: its weight is larger (`NaN`
/// weights are the least urgent of all), or the weights tie and `a` spans
/// the wider band `q − p`, or both tie and `a.q` is larger.  Two weights
/// are equal only when weight value, band and `q` all agree — distinct
/// pairs therefore never compare equal.
pub fn weight_cmp(a: &AugWeight, b: &AugWeight) -> CmpOrdering {
    w_order(b.w, a.w)
        .then_with(|| b.band().cmp(&a.band()))
        .then_with(|| b.q.cmp(&a.q))
}

/// Drops `NaN` weights (nothing to do) and `-∞` weights (undefined
/// kernels), then sorts the rest `⪯`-ascendingly.  The output is the
/// unique sorted arrangement because `⪯` is total and distinct entries
/// never tie.
pub fn sort_weights(weights: &[AugWeight]) -> Vec<AugWeight> {
    let mut kept: Vec<AugWeight> = weights
        .iter()
        .filter(|a| !a.w.is_nan() && a.w != f64::NEG_INFINITY)
        .copied()
        .collect();
    kept.sort_by(weight_cmp);
    kept
}

/// A greedy `⪯`-ascending selection of pairwise index-disjoint pivots —
/// the contents of one multi-step.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotOrdering {
    /// Selected weights, `⪯`-ascending.
    pub entries: Vec<AugWeight>,
    /// Zero-based positions of the selections within the sorted array.
    pub source_indices: Vec<usize>,
}

impl PivotOrdering {
    /// The selected `(p, q)` pairs in selection order.
    pub fn pivots(&self) -> Vec<(usize, usize)> {
        self.entries.iter().map(|a| (a.p, a.q)).collect()
    }
}

/// Greedy scan over `sorted[start..]` keeping every entry whose indices are
/// disjoint from all entries kept so far, until `target_len` pivots are
/// selected or the array runs out.  `n` is the matrix order (bounds the
/// occupancy bookkeeping).
pub fn build_ordering_seq(
    sorted: &[AugWeight],
    target_len: usize,
    start: usize,
    n: usize,
) -> PivotOrdering {
    let mut used = vec![false; n];
    let mut entries = Vec::with_capacity(target_len);
    let mut source_indices = Vec::with_capacity(target_len);
    for (k, a) in sorted.iter().enumerate().skip(start) {
        if entries.len() == target_len {
            break;
        }
        if !used[a.p] && !used[a.q] {
            used[a.p] = true;
            used[a.q] = true;
            entries.push(*a);
            source_indices.push(k);
        }
    }
    PivotOrdering {
        entries,
        source_indices,
    }
}

/// Parallel formulation of the same greedy scan: after each selection the
/// colliding survivors are killed concurrently, and the next selection is
/// the minimum surviving index — an associative reduction, so the result
/// is identical to [`build_ordering_seq`] for every task count.
pub fn build_ordering_par(
    sorted: &[AugWeight],
    target_len: usize,
    start: usize,
    n: usize,
) -> PivotOrdering {
    let _ = n;
    let mut alive = vec![true; sorted.len()];
    let mut entries = Vec::with_capacity(target_len);
    let mut source_indices = Vec::with_capacity(target_len);
    let mut cursor = start;
    while entries.len() < target_len && cursor < sorted.len() {
        let next = alive[cursor..]
            .par_iter()
            .enumerate()
            .filter_map(|(i, &keep)| keep.then_some(cursor + i))
            .min();
        let Some(k) = next else { break };
        let sel = sorted[k];
        entries.push(sel);
        source_indices.push(k);
        cursor = k + 1;
        alive[cursor..]
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, keep)| {
                let a = &sorted[cursor + i];
                if a.p == sel.p || a.p == sel.q || a.q == sel.p || a.q == sel.q {
                    *keep = false;
                }
            });
    }
    PivotOrdering {
        entries,
        source_indices,
    }
}
