//! Multi-index sets over tensor Hermite bases.
//!
//! An [`IndexSet`] is an immutable, lexicographically ordered collection of
//! multi-indices `k = (k_1, ..., k_N)` together with the bijection between
//! indices and storage ordinals. Two families are built directly: the full
//! cube `0 <= k_l <= K` and the hyperbolic cross `prod (1 + k_l) <= K + 1`.
//! Any other downward-closed set can be supplied through
//! [`IndexSet::from_indices`].
//!
//! Axes are 0-based throughout the Rust API.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;
use std::sync::Arc;

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};

/// Marker stored in neighbor tables for an index that is not in the set.
pub const ABSENT: u32 = u32::MAX;

/// A multi-index `(k_1, ..., k_N)` of non-negative basis orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        MultiIndex(components)
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit vector `e_axis` in `dim` dimensions.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut k = vec![0; dim];
        k[axis] = 1;
        MultiIndex(k)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|k| = sum_l k_l`
    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&k| u64::from(k)).sum()
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

impl Deref for MultiIndex {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl Borrow<[u32]> for MultiIndex {
    fn borrow(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(v: &[u32]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    Full,
    Hyperbolic,
    /// A validated downward-closed set supplied by the caller.
    Custom,
}

impl SetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SetKind::Full => "full",
            SetKind::Hyperbolic => "hyperbolic",
            SetKind::Custom => "custom",
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SetKind::Full),
            "hyperbolic" => Ok(SetKind::Hyperbolic),
            "custom" => Ok(SetKind::Custom),
            other => Err(Error::Parse(format!("unknown set kind '{other}'"))),
        }
    }
}

/// Immutable multi-index set with canonical lexicographic ordering.
#[derive(Clone)]
pub struct IndexSet {
    dim: usize,
    bound: u32,
    kind: SetKind,
    /// Row-major `len * dim` components in canonical order.
    flat: Vec<u32>,
    positions: HashMap<MultiIndex, u32>,
    /// Per axis: ordinal of `j - e_l` (or [`ABSENT`]).
    down: Vec<Vec<u32>>,
    /// Per axis: ordinal of `j + e_l` (or [`ABSENT`]).
    up: Vec<Vec<u32>>,
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IndexSet")
            .field("dim", &self.dim)
            .field("bound", &self.bound)
            .field("kind", &self.kind)
            .field("len", &self.len())
            .finish()
    }
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.bound == other.bound && self.flat == other.flat
    }
}

fn check_args(dim: usize, bound: usize) -> Result<u32> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    u32::try_from(bound)
        .ok()
        .filter(|&b| b < u32::MAX)
        .ok_or(Error::SetTooLarge { dim, bound })
}

impl IndexSet {
    /// Full cube `{k : 0 <= k_l <= bound}` of size `(bound + 1)^dim`.
    pub fn full(dim: usize, bound: usize) -> Result<Self> {
        let b = check_args(dim, bound)?;
        let size = (0..dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(bound + 1))
            .filter(|&s| s < ABSENT as usize)
            .ok_or(Error::SetTooLarge { dim, bound })?;
        size.checked_mul(dim)
            .ok_or(Error::SetTooLarge { dim, bound })?;

        let mut flat = Vec::with_capacity(size * dim);
        let mut k = vec![0u32; dim];
        for _ in 0..size {
            flat.extend_from_slice(&k);
            // odometer, last axis fastest
            for l in (0..dim).rev() {
                if k[l] < b {
                    k[l] += 1;
                    break;
                }
                k[l] = 0;
            }
        }
        Ok(Self::from_sorted_flat(dim, b, SetKind::Full, flat))
    }

    /// Hyperbolic cross `{k : prod_l (1 + k_l) <= bound + 1}`.
    pub fn hyperbolic(dim: usize, bound: usize) -> Result<Self> {
        let b = check_args(dim, bound)?;
        let mut flat = Vec::new();
        let mut k = vec![0u32; dim];
        hyperbolic_rec(&mut flat, &mut k, 0, u64::from(b) + 1, dim, bound)?;
        Ok(Self::from_sorted_flat(dim, b, SetKind::Hyperbolic, flat))
    }

    /// Validating constructor for an arbitrary downward-closed set.
    ///
    /// Indices may be given in any order; duplicates are rejected.
    pub fn from_indices(dim: usize, indices: Vec<MultiIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if indices.is_empty() {
            return Err(Error::InvalidArgument("index set must not be empty".into()));
        }
        let mut indices = indices;
        for k in &indices {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: k.dim() });
            }
        }
        indices.sort();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("duplicate index {}", w[0])));
        }
        if indices.len() >= ABSENT as usize {
            return Err(Error::SetTooLarge { dim, bound: 0 });
        }
        let bound = indices
            .iter()
            .flat_map(|k| k.iter().copied())
            .max()
            .unwrap_or(0);
        let flat: Vec<u32> = indices.iter().flat_map(|k| k.iter().copied()).collect();
        let set = Self::from_sorted_flat(dim, bound, SetKind::Custom, flat);
        set.check_downward_closed()?;
        Ok(set)
    }

    fn from_sorted_flat(dim: usize, bound: u32, kind: SetKind, flat: Vec<u32>) -> Self {
        let len = flat.len() / dim;
        let mut positions = HashMap::with_capacity(len);
        for (i, k) in flat.chunks_exact(dim).enumerate() {
            positions.insert(MultiIndex::from(k), i as u32);
        }
        let mut down = vec![vec![ABSENT; len]; dim];
        let mut up = vec![vec![ABSENT; len]; dim];
        let mut probe = vec![0u32; dim];
        for (i, k) in flat.chunks_exact(dim).enumerate() {
            probe.copy_from_slice(k);
            for l in 0..dim {
                if k[l] > 0 {
                    probe[l] = k[l] - 1;
                    if let Some(&p) = positions.get(probe.as_slice()) {
                        down[l][i] = p;
                    }
                }
                probe[l] = k[l] + 1;
                if let Some(&p) = positions.get(probe.as_slice()) {
                    up[l][i] = p;
                }
                probe[l] = k[l];
            }
        }
        IndexSet { dim, bound, kind, flat, positions, down, up }
    }

    fn check_downward_closed(&self) -> Result<()> {
        for (i, k) in self.iter().enumerate() {
            for l in 0..self.dim {
                if k[l] > 0 && self.down[l][i] == ABSENT {
                    let mut missing = k.to_vec();
                    missing[l] -= 1;
                    return Err(Error::NotDownwardClosed { index: k.to_vec(), missing });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maximal univariate order `K`.
    pub fn bound(&self) -> usize {
        self.bound as usize
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    /// Multi-index stored at `ordinal`.
    pub fn index(&self, ordinal: usize) -> &[u32] {
        &self.flat[ordinal * self.dim..(ordinal + 1) * self.dim]
    }

    pub fn ordinal(&self, k: &[u32]) -> Option<usize> {
        self.positions.get(k).map(|&p| p as usize)
    }

    pub fn contains(&self, k: &[u32]) -> bool {
        self.positions.contains_key(k)
    }

    /// Indices in canonical order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.flat.chunks_exact(self.dim)
    }

    /// Ordinal of `j + delta * e_axis`, or `None` if that index is not in the
    /// set (including the `j_l = 0, delta = -1` boundary).
    pub fn neighbor(&self, j: &[u32], axis: usize, delta: i32) -> Result<Option<usize>> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        if delta != 1 && delta != -1 {
            return Err(Error::InvalidArgument(format!("delta must be +1 or -1, got {delta}")));
        }
        let i = self.ordinal(j).ok_or_else(|| Error::NotInSet(j.to_vec()))?;
        let table = if delta > 0 { &self.up[axis] } else { &self.down[axis] };
        Ok(match table[i] {
            ABSENT => None,
            p => Some(p as usize),
        })
    }

    /// Precomputed `(down, up)` neighbor ordinals along `axis`, with
    /// [`ABSENT`] marking missing neighbors.
    pub fn neighbor_tables(&self, axis: usize) -> (&[u32], &[u32]) {
        (&self.down[axis], &self.up[axis])
    }

    /// Whether every index of `self` lies in `other` (same dimension).
    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.dim == other.dim && self.iter().all(|k| other.contains(k))
    }

    /// Text serialization: a `dim K kind size` header line followed by one
    /// index per line, components separated by single spaces.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.dim, self.bound, self.kind, self.len());
        for k in self.iter() {
            let line: Vec<String> = k.iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty index set text".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("bad header '{header}'")));
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad header field '{s}': {e}")))
        };
        let dim = parse_usize(fields[0])?;
        let bound = parse_usize(fields[1])?;
        let kind: SetKind = fields[2].parse()?;
        let size = parse_usize(fields[3])?;

        let mut indices = Vec::with_capacity(size);
        for line in lines {
            let k = line
                .split_whitespace()
                .map(|s| s.parse::<u32>().map_err(|e| Error::Parse(format!("bad index '{line}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            indices.push(MultiIndex::new(k));
        }
        if indices.len() != size {
            return Err(Error::Parse(format!("header says {size} indices, found {}", indices.len())));
        }
        let set = match kind {
            SetKind::Full => IndexSet::full(dim, bound)?,
            SetKind::Hyperbolic => IndexSet::hyperbolic(dim, bound)?,
            SetKind::Custom => IndexSet::from_indices(dim, indices.clone())?,
        };
        let listed: Vec<u32> = indices.into_iter().flat_map(MultiIndex::into_vec).collect();
        if listed != set.flat {
            return Err(Error::Parse(format!("listed indices do not match a {kind} set")));
        }
        Ok(set)
    }
}

fn hyperbolic_rec(
    flat: &mut Vec<u32>,
    k: &mut [u32],
    axis: usize,
    budget: u64,
    dim: usize,
    bound: usize,
) -> Result<()> {
    if axis == k.len() {
        if flat.len() / dim + 1 >= ABSENT as usize {
            return Err(Error::SetTooLarge { dim, bound });
        }
        flat.extend_from_slice(k);
        return Ok(());
    }
    // 1 + k_axis <= budget
    for ka in 0..budget {
        k[axis] = ka as u32;
        hyperbolic_rec(flat, k, axis + 1, budget / (ka + 1), dim, bound)?;
    }
    k[axis] = 0;
    Ok(())
}

/// Restriction `Ω`: keep the components of a full-set vector that lie in `set`.
pub fn restrict(v_full: &CoeffVector, set: &Arc<IndexSet>) -> Result<CoeffVector> {
    check_embedding(set, v_full.set())?;
    let full = v_full.set();
    let data = set
        .iter()
        .map(|k| v_full.data()[full.ordinal(k).expect("subset checked")])
        .collect();
    CoeffVector::from_vec(Arc::clone(set), data)
}

/// Extension `Ω₊`: zero-pad a reduced vector onto the full set.
pub fn extend(v: &CoeffVector, full: &Arc<IndexSet>) -> Result<CoeffVector> {
    check_embedding(v.set(), full)?;
    let mut out = CoeffVector::zeros(Arc::clone(full));
    for (k, &c) in v.set().iter().zip(v.data()) {
        out.data_mut()[full.ordinal(k).expect("subset checked")] = c;
    }
    Ok(out)
}

fn check_embedding(set: &IndexSet, full: &IndexSet) -> Result<()> {
    if full.kind() != SetKind::Full {
        return Err(Error::SetMismatch(format!("expected a full set, got a {} set", full.kind())));
    }
    if set.dim() != full.dim() {
        return Err(Error::DimensionMismatch { expected: full.dim(), got: set.dim() });
    }
    if set.bound() > full.bound() {
        return Err(Error::SetMismatch(format!(
            "set bound {} exceeds full-set bound {}",
            set.bound(),
            full.bound()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn brute_force_hyperbolic(dim: usize, bound: usize) -> Vec<Vec<u32>> {
        let full = IndexSet::full(dim, bound).unwrap();
        full.iter()
            .filter(|k| k.iter().map(|&x| x as usize + 1).product::<usize>() <= bound + 1)
            .map(<[u32]>::to_vec)
            .collect()
    }

    #[test]
    fn full_sizes() {
        assert_eq!(IndexSet::full(1, 5).unwrap().len(), 6);
        assert_eq!(IndexSet::full(2, 3).unwrap().len(), 16);
        assert_eq!(IndexSet::full(3, 16).unwrap().len(), 4913);
    }

    #[test]
    fn hyperbolic_small_cases() {
        assert_eq!(IndexSet::hyperbolic(1, 5).unwrap().len(), 6);
        let h = IndexSet::hyperbolic(2, 3).unwrap();
        let got: Vec<Vec<u32>> = h.iter().map(<[u32]>::to_vec).collect();
        let want = vec![
            vec![0, 0],
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 0],
            vec![1, 1],
            vec![2, 0],
            vec![3, 0],
        ];
        assert_eq!(got, want);
        assert_eq!(got, brute_force_hyperbolic(2, 3));

        let h = IndexSet::hyperbolic(2, 32).unwrap();
        assert!(h.contains(&[0, 32]));
        assert!(!h.contains(&[1, 32]));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(IndexSet::full(0, 3).is_err());
        assert!(IndexSet::hyperbolic(0, 3).is_err());
        assert!(matches!(IndexSet::full(64, 1000), Err(Error::SetTooLarge { .. })));
    }

    #[test]
    fn neighbors() {
        let h = IndexSet::hyperbolic(2, 3).unwrap();
        assert_eq!(h.neighbor(&[1, 1], 0, 1).unwrap(), None);
        let f = IndexSet::full(2, 3).unwrap();
        assert_eq!(f.neighbor(&[0, 0], 1, -1).unwrap(), None);
        assert_eq!(f.neighbor(&[1, 1], 0, 1).unwrap(), f.ordinal(&[2, 1]));
        assert!(matches!(f.neighbor(&[1, 1], 2, 1), Err(Error::AxisOutOfRange { .. })));
        assert!(matches!(h.neighbor(&[2, 2], 0, 1), Err(Error::NotInSet(_))));
    }

    #[test]
    fn exhaustive_membership_and_closure() {
        for dim in 1..=4 {
            for bound in [0, 1, 2, 5, 9] {
                let h = IndexSet::hyperbolic(dim, bound).unwrap();
                let want = brute_force_hyperbolic(dim, bound);
                assert_eq!(h.len(), want.len());
                for (i, k) in h.iter().enumerate() {
                    assert_eq!(h.ordinal(k), Some(i));
                    for l in 0..dim {
                        if k[l] > 0 {
                            let mut d = k.to_vec();
                            d[l] -= 1;
                            assert!(h.contains(&d));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hyperbolic_size_monotone() {
        for dim in 1..=3 {
            let mut last = 0;
            for bound in 0..40 {
                let n = IndexSet::hyperbolic(dim, bound).unwrap().len();
                assert!(n >= last);
                if dim == 1 {
                    assert_eq!(n, bound + 1);
                }
                last = n;
            }
        }
    }

    #[test]
    fn custom_sets_are_validated() {
        let ok = IndexSet::from_indices(
            2,
            vec![vec![1, 0].into(), vec![0, 0].into(), vec![0, 1].into()],
        )
        .unwrap();
        assert_eq!(ok.kind(), SetKind::Custom);
        assert_eq!(ok.index(0), &[0, 0]);
        let bad = IndexSet::from_indices(2, vec![vec![0, 0].into(), vec![1, 1].into()]);
        assert!(matches!(bad, Err(Error::NotDownwardClosed { .. })));
        let dup = IndexSet::from_indices(1, vec![vec![0].into(), vec![0].into()]);
        assert!(dup.is_err());
    }

    #[test]
    fn text_round_trip() {
        for set in [
            IndexSet::full(2, 3).unwrap(),
            IndexSet::hyperbolic(3, 7).unwrap(),
            IndexSet::from_indices(2, vec![vec![0, 0].into(), vec![0, 1].into()]).unwrap(),
        ] {
            let text = set.to_text();
            assert!(text.starts_with(&format!("{} {} {} {}\n", set.dim(), set.bound(), set.kind(), set.len())));
            assert_eq!(IndexSet::from_text(&text).unwrap(), set);
        }
        assert!(IndexSet::from_text("2 3 full 15\n").is_err());
    }

    #[test]
    fn extend_and_restrict() {
        let h = Arc::new(IndexSet::hyperbolic(2, 3).unwrap());
        let f = Arc::new(IndexSet::full(2, 3).unwrap());
        let ones = CoeffVector::from_vec(h.clone(), vec![Complex64::new(1.0, 0.0); h.len()]).unwrap();
        let e = extend(&ones, &f).unwrap();
        assert_eq!(e.data().iter().filter(|c| c.norm() > 0.0).count(), 8);
        assert_eq!(restrict(&e, &h).unwrap().data(), ones.data());

        let mut ind = CoeffVector::zeros(f.clone());
        ind.data_mut()[f.ordinal(&[2, 2]).unwrap()] = Complex64::new(1.0, 0.0);
        assert!(restrict(&ind, &h).unwrap().data().iter().all(|c| c.norm() == 0.0));

        let zero = CoeffVector::zeros(h.clone());
        assert!(extend(&zero, &f).unwrap().data().iter().all(|c| c.norm() == 0.0));
        // wrong embedding
        assert!(extend(&ones, &h).is_err());
        let small = Arc::new(IndexSet::full(2, 2).unwrap());
        assert!(extend(&ones, &small).is_err());
    }

    proptest! {
        #[test]
        fn extend_preserves_inner_products(
            seed_u in proptest::collection::vec(-1.0f64..1.0, 2 * 29),
            seed_v in proptest::collection::vec(-1.0f64..1.0, 2 * 29),
        ) {
            let h = Arc::new(IndexSet::hyperbolic(2, 10).unwrap());
            let f = Arc::new(IndexSet::full(2, 10).unwrap());
            let mk = |s: &[f64]| {
                let d = s.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
                CoeffVector::from_vec(h.clone(), d).unwrap()
            };
            let (u, v) = (mk(&seed_u), mk(&seed_v));
            let (eu, ev) = (extend(&u, &f).unwrap(), extend(&v, &f).unwrap());
            prop_assert!((eu.dot(&ev) - u.dot(&v)).norm() < 1e-12);
            let back = restrict(&eu, &h).unwrap();
            prop_assert_eq!(back.data(), u.data());
        }
    }
}
