//! Grid partitioning: the uniform grid `x_j = -j pi / n`, classification of
//! intervals by derivative size, packs of steep intervals, the W1/W2 groups,
//! the dilated flat regions M, M*, M**, Omega, and the breakpoint
//! neighborhoods O with the safe index set H.
//!
//! The grid index decreases as `x` increases; all index sets live on the
//! fundamental window of `2n` residues and are queried modulo `2n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{inum, lit, num, Real};
use crate::trigpoly::BreakpointSet;

/// Uniform grid `x_j = -j pi / n` with intervals `I_j = [x_j, x_{j-1}]`.
#[derive(Debug, Clone, Copy)]
pub struct UniformGrid<T> {
    pub n: usize,
    pub h: T,
}

impl<T: Real> UniformGrid<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        UniformGrid {
            n,
            h: T::PI() / num(n),
        }
    }

    pub fn x(&self, j: i64) -> T {
        -inum::<T>(j) * self.h
    }

    /// Midpoint of `I_j`.
    pub fn midpoint(&self, j: i64) -> T {
        (self.x(j) + self.x(j - 1)) * lit(0.5)
    }

    /// Index `j` with `x in I_j = [x_j, x_{j-1}]`; grid points resolve to the
    /// interval having them as left endpoint.
    pub fn interval_index(&self, x: T) -> i64 {
        let raw = -x / self.h;
        let j = raw.ceil();
        // guard against x sitting a rounding error above a grid point
        let j = if (raw - j + T::one()).abs() < lit(1e-12) {
            j - T::one()
        } else {
            j
        };
        j.to_f64().expect("grid index out of range") as i64
    }

    pub fn residues(&self) -> usize {
        2 * self.n
    }

    pub fn residue(&self, j: i64) -> usize {
        j.rem_euclid(2 * self.n as i64) as usize
    }
}

/// Interval classification by sampled derivative size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexType {
    /// `|f'| <= c1 h^{r-1}` throughout the interval.
    Flat,
    /// not flat, and `|f'| >= h^{r-1}` throughout.
    Steep,
    /// everything else.
    Borderline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    W1,
    W2,
    Pack,
}

/// Minimum run length for a pack of steep indices.
pub const PACK_MIN_LEN: usize = 7;

/// The constant bounding `|g|` on a union of intervals holding small samples:
/// `(2r-3)^{r-1}/(r-1)! + (r-1)(2r-3)^{r-2}`.
pub fn classification_constant<T: Real>(r: usize) -> T {
    assert!(r >= 2);
    let base = num::<T>(2 * r - 3);
    let mut fact = T::one();
    for k in 2..r {
        fact *= num::<T>(k);
    }
    base.powi(r as i32 - 1) / fact + num::<T>(r - 1) * base.powi(r as i32 - 2)
}

/// Classify every residue of the fundamental window by dense sampling of
/// the derivative on its interval. Ties at the flat threshold stay flat.
pub fn classify<T: Real>(
    fprime: impl Fn(T) -> T,
    r: usize,
    grid: &UniformGrid<T>,
    c1: T,
    samples_per_interval: usize,
) -> Vec<IndexType> {
    assert!(r >= 2 && samples_per_interval >= 2);
    let threshold_hi = c1 * grid.h.powi(r as i32 - 1);
    let threshold_lo = grid.h.powi(r as i32 - 1);
    let m = grid.residues();
    let mut types = Vec::with_capacity(m);
    for res in 0..m {
        // representative j in (-n, n]
        let j = if res > grid.n {
            res as i64 - m as i64
        } else {
            res as i64
        };
        let left = grid.x(j);
        let mut max_abs = T::zero();
        let mut min_abs = T::infinity();
        for k in 0..samples_per_interval {
            let x = left + grid.h * num::<T>(k) / num(samples_per_interval - 1);
            let v = fprime(x).abs();
            max_abs = max_abs.max(v);
            min_abs = min_abs.min(v);
        }
        let t = if max_abs <= threshold_hi {
            IndexType::Flat
        } else if min_abs >= threshold_lo {
            IndexType::Steep
        } else {
            IndexType::Borderline
        };
        types.push(t);
    }
    types
}

/// Enforce the smoothness consequence: no more than `2r - 4` consecutive
/// borderline indices (circularly).
pub fn validate_borderline_runs(types: &[IndexType], r: usize) -> Result<()> {
    let m = types.len();
    let max_run = 2 * r - 4;
    // longest circular run of Borderline
    let mut longest = 0usize;
    let mut run = 0usize;
    for k in 0..2 * m {
        if types[k % m] == IndexType::Borderline {
            run += 1;
            longest = longest.max(run.min(m));
        } else {
            run = 0;
        }
    }
    if longest > max_run {
        return Err(Error::BorderlineRunTooLong {
            run: longest,
            max: max_run,
        });
    }
    Ok(())
}

/// Maximal circular runs of at least [`PACK_MIN_LEN`] steep indices,
/// as `(start_residue, length)`.
pub fn find_packs(types: &[IndexType]) -> Vec<(usize, usize)> {
    let m = types.len();
    if types.iter().all(|&t| t == IndexType::Steep) {
        return vec![(0, m)];
    }
    let anchor = types
        .iter()
        .position(|&t| t != IndexType::Steep)
        .expect("non-steep index exists");
    let mut packs = Vec::new();
    let mut k = anchor + 1;
    while k <= anchor + m {
        if types[k % m] == IndexType::Steep {
            let start = k;
            let mut len = 0usize;
            while k <= anchor + m && types[k % m] == IndexType::Steep {
                len += 1;
                k += 1;
            }
            if len >= PACK_MIN_LEN {
                packs.push((start % m, len));
            }
        } else {
            k += 1;
        }
    }
    packs.sort();
    packs
}

/// Assign each non-pack residue to W1 or W2: a stretch between adjacent
/// packs goes to W2 when it contains no flat index, otherwise to W1.
/// With no packs at all, everything is W1.
pub fn assign_groups(types: &[IndexType], packs: &[(usize, usize)]) -> Vec<Group> {
    let m = types.len();
    let mut groups = vec![Group::W1; m];
    if packs.is_empty() {
        return groups;
    }
    for &(start, len) in packs {
        for k in 0..len {
            groups[(start + k) % m] = Group::Pack;
        }
    }
    // walk the gaps between consecutive packs in circular order
    for (idx, &(start, len)) in packs.iter().enumerate() {
        let gap_start = (start + len) % m;
        let (next_start, _) = packs[(idx + 1) % packs.len()];
        let gap_len = (next_start + m - gap_start) % m;
        let has_flat = (0..gap_len).any(|k| types[(gap_start + k) % m] == IndexType::Flat);
        let group = if has_flat { Group::W1 } else { Group::W2 };
        for k in 0..gap_len {
            groups[(gap_start + k) % m] = group;
        }
    }
    groups
}

/// Dilate an interval-index set by one interval on each side (circularly).
pub fn dilate(set: &[bool]) -> Vec<bool> {
    let m = set.len();
    let mut out = vec![false; m];
    for k in 0..m {
        if set[k] {
            out[k] = true;
            out[(k + 1) % m] = true;
            out[(k + m - 1) % m] = true;
        }
    }
    out
}

/// Breakpoint neighborhoods and the safe index set built from them.
#[derive(Debug, Clone)]
pub struct BreakpointLayout {
    /// For each breakpoint in the fundamental window, the grid index `j`
    /// with `y_i in [x_j, x_{j-1})`.
    pub locations: Vec<i64>,
    /// Residues whose interval lies inside some neighborhood `O_i`.
    pub excluded: Vec<bool>,
    /// Safe window indices: `j` in the window with `I_j` not inside `O`.
    pub h_indices: Vec<i64>,
}

impl BreakpointLayout {
    pub fn is_safe(&self, residue: usize) -> bool {
        !self.excluded[residue]
    }
}

/// Build the neighborhoods `O_i` (three intervals around each breakpoint)
/// and the index set H over the window `(window_start, window_start + 2n]`.
/// Fails when the neighborhoods overlap (grid too coarse).
pub fn breakpoint_neighborhoods<T: Real>(
    y: &BreakpointSet<T>,
    grid: &UniformGrid<T>,
    window_start: i64,
) -> Result<BreakpointLayout> {
    let m = grid.residues();
    let mut excluded = vec![false; m];
    let mut locations = Vec::with_capacity(y.count());
    for &point in y.points() {
        let j = grid.interval_index(point);
        locations.push(j);
        for dj in -1..=1i64 {
            let res = grid.residue(j + dj);
            if excluded[res] {
                return Err(Error::GridTooCoarse {
                    n: grid.n,
                    required: find_n1(y),
                });
            }
            excluded[res] = true;
        }
    }
    let h_indices = (window_start + 1..=window_start + m as i64)
        .filter(|&j| !excluded[grid.residue(j)])
        .collect();
    Ok(BreakpointLayout {
        locations,
        excluded,
        h_indices,
    })
}

/// Smallest `N` such that some arc of radius `pi/N` keeps the sign
/// polynomial nonnegative throughout and another keeps it nonpositive.
/// Also returns the witness centers `(x_plus, x_minus)`.
pub fn find_n<T: Real>(y: &BreakpointSet<T>) -> (usize, T, T) {
    let two = lit::<T>(2.0);
    let count = y.count() as i64;
    let mut best_pos: Option<(T, T)> = None; // (radius, center)
    let mut best_neg: Option<(T, T)> = None;
    for i in 1..=count {
        // gap between consecutive breakpoints y_{i} < y_{i-1}
        let lo = y.y(i);
        let hi = y.y(i - 1);
        let center = (lo + hi) / two;
        let radius = (hi - lo) / two;
        let sign = y.pi_eval(center);
        let slot = if sign >= T::zero() {
            &mut best_pos
        } else {
            &mut best_neg
        };
        if slot.map_or(true, |(r, _)| radius > r) {
            *slot = Some((radius, center));
        }
    }
    let (rp, xp) = best_pos.expect("sign polynomial takes nonnegative values");
    let (rn, xn) = best_neg.expect("sign polynomial takes nonpositive values");
    let rmin = rp.min(rn);
    let ratio = (T::PI() / rmin).to_f64().expect("finite radius");
    ((ratio - 1e-12).ceil().max(1.0) as usize, xp, xn)
}

/// Smallest `n` with every breakpoint gap larger than `6 pi / n`.
pub fn find_n1<T: Real>(y: &BreakpointSet<T>) -> usize {
    let count = y.count() as i64;
    let mut min_gap = T::infinity();
    for i in 1..=count {
        min_gap = min_gap.min(y.y(i - 1) - y.y(i));
    }
    let ratio = (lit::<T>(6.0) * T::PI() / min_gap)
        .to_f64()
        .expect("finite gap");
    (ratio + 1e-12).floor() as usize + 1
}

/// The assembled partition of one grid.
#[derive(Debug, Clone)]
pub struct PartitionState<T> {
    pub grid: UniformGrid<T>,
    pub types: Vec<IndexType>,
    pub packs: Vec<(usize, usize)>,
    pub groups: Vec<Group>,
    pub m: Vec<bool>,
    pub m_star: Vec<bool>,
    pub m_2star: Vec<bool>,
    pub omega: Vec<bool>,
    /// Window is `(window_start, window_start + 2n]`; rotated so that the
    /// circular seam falls inside a pack when packs exist.
    pub window_start: i64,
}

impl<T: Real> PartitionState<T> {
    pub fn build(
        fprime: impl Fn(T) -> T,
        r: usize,
        grid: UniformGrid<T>,
        samples_per_interval: usize,
    ) -> Result<Self> {
        let c1 = classification_constant::<T>(r);
        let types = classify(&fprime, r, &grid, c1, samples_per_interval);
        validate_borderline_runs(&types, r)?;
        let packs = find_packs(&types);
        let groups = assign_groups(&types, &packs);
        let m: Vec<bool> = groups.iter().map(|&g| g == Group::W1).collect();
        let m_star = dilate(&m);
        let m_2star = dilate(&m_star);
        let omega = dilate(&m_2star);
        let n = grid.n as i64;
        let window_start = match packs.first() {
            Some(&(start, len)) => {
                let mid = (start + len / 2) % grid.residues();
                if mid as i64 > n {
                    mid as i64 - 2 * n
                } else {
                    mid as i64
                }
            }
            None => -n,
        };
        Ok(PartitionState {
            grid,
            types,
            packs,
            groups,
            m,
            m_star,
            m_2star,
            omega,
            window_start,
        })
    }

    pub fn type_of(&self, j: i64) -> IndexType {
        self.types[self.grid.residue(j)]
    }

    pub fn group_of(&self, j: i64) -> Group {
        self.groups[self.grid.residue(j)]
    }

    pub fn window(&self) -> impl Iterator<Item = i64> + '_ {
        self.window_start + 1..=self.window_start + self.grid.residues() as i64
    }

    fn point_in(&self, set: &[bool], x: T) -> bool {
        let j = self.grid.interval_index(x);
        if set[self.grid.residue(j)] {
            return true;
        }
        // shared endpoints belong to both intervals
        let eps = self.grid.h * lit(1e-12);
        if (x - self.grid.x(j)).abs() <= eps && set[self.grid.residue(j + 1)] {
            return true;
        }
        if (x - self.grid.x(j - 1)).abs() <= eps && set[self.grid.residue(j - 1)] {
            return true;
        }
        false
    }

    pub fn in_m(&self, x: T) -> bool {
        self.point_in(&self.m, x)
    }
    pub fn in_m_star(&self, x: T) -> bool {
        self.point_in(&self.m_star, x)
    }
    pub fn in_m_2star(&self, x: T) -> bool {
        self.point_in(&self.m_2star, x)
    }
    pub fn in_omega(&self, x: T) -> bool {
        self.point_in(&self.omega, x)
    }

    pub fn has_packs(&self) -> bool {
        !self.packs.is_empty()
    }

    /// Largest sampled `|f'| / h^{r-1}` over the flat-dilated region Omega
    /// (the empirical constant in the smoothness bound there).
    pub fn fitted_derivative_constant(
        &self,
        fprime: impl Fn(T) -> T,
        r: usize,
        samples_per_interval: usize,
    ) -> T {
        let mut worst = T::zero();
        for res in 0..self.grid.residues() {
            if !self.omega[res] {
                continue;
            }
            let j = res as i64;
            let left = self.grid.x(j);
            for k in 0..samples_per_interval {
                let x = left + self.grid.h * num::<T>(k) / num(samples_per_interval - 1);
                worst = worst.max(fprime(x).abs());
            }
        }
        worst / self.grid.h.powi(r as i32 - 1)
    }
}

/// One row of the diagnostic dump (consumed by the CLI `--dump-partition`).
#[derive(Debug, Serialize)]
pub struct PartitionDumpRow {
    pub j: i64,
    pub x_left: f64,
    pub x_right: f64,
    pub index_type: IndexType,
    pub group: Group,
    pub m: bool,
    pub m_star: bool,
    pub m_2star: bool,
    pub omega: bool,
    pub in_o: bool,
    pub in_h: bool,
}

impl<T: Real> PartitionState<T> {
    pub fn dump(&self, layout: &BreakpointLayout) -> Vec<PartitionDumpRow> {
        self.window()
            .map(|j| {
                let res = self.grid.residue(j);
                PartitionDumpRow {
                    j,
                    x_left: self.grid.x(j).to_f64().unwrap(),
                    x_right: self.grid.x(j - 1).to_f64().unwrap(),
                    index_type: self.types[res],
                    group: self.groups[res],
                    m: self.m[res],
                    m_star: self.m_star[res],
                    m_2star: self.m_2star[res],
                    omega: self.omega[res],
                    in_o: layout.excluded[res],
                    in_h: layout.h_indices.contains(&j),
                }
            })
            .collect()
    }
}
