//! Voxel sets on the cube `Q_L = [−L/2, L/2]³` and their geometric
//! functionals.

mod io;
mod localize;
mod moments;

pub use io::{read_vox, write_vox};
pub use localize::{cut_pair_counts, localize, mu_to_offset, offset_to_mu, shift_offsets, CutCounts};
pub use moments::{moments, Background, MultipoleMoments};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub l: f64,
}

impl DomainBox {
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::OutOfRange(format!("box side must be positive, got {l}")));
        }
        Ok(DomainBox { l })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuboidSpec {
    pub sides: Vec3,
    pub center: Vec3,
}

impl CuboidSpec {
    pub fn new(sides: Vec3, center: Vec3) -> Result<Self> {
        if sides.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::OutOfRange(format!("cuboid sides must be positive, got {sides:?}")));
        }
        Ok(CuboidSpec { sides, center })
    }

    pub fn cube(l: f64, center: Vec3) -> Result<Self> {
        Self::new([l; 3], center)
    }

    pub fn volume(&self) -> f64 {
        self.sides[0] * self.sides[1] * self.sides[2]
    }

    pub fn contains_box(&self, lo: Vec3, hi: Vec3, tol: f64) -> bool {
        (0..3).all(|i| {
            lo[i] >= self.center[i] - 0.5 * self.sides[i] - tol
                && hi[i] <= self.center[i] + 0.5 * self.sides[i] + tol
        })
    }
}

/// Occupancy of the `n³` cells of `Q_L`, x-fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoxelSet {
    l: u64,
    n: usize,
    occ: Vec<bool>,
}

impl VoxelSet {
    pub fn empty(l: f64, n: usize) -> Result<Self> {
        DomainBox::new(l)?;
        if n == 0 {
            return Err(Error::OutOfRange("grid needs at least one cell per side".into()));
        }
        Ok(VoxelSet { l: l.to_bits(), n, occ: vec![false; n * n * n] })
    }

    pub fn full(l: f64, n: usize) -> Result<Self> {
        let mut s = Self::empty(l, n)?;
        s.occ.fill(true);
        Ok(s)
    }

    pub fn from_occupancy(l: f64, n: usize, occ: Vec<bool>) -> Result<Self> {
        let mut s = Self::empty(l, n)?;
        if occ.len() != n * n * n {
            return Err(Error::Precondition(format!(
                "occupancy has {} entries, expected {}",
                occ.len(),
                n * n * n
            )));
        }
        s.occ = occ;
        Ok(s)
    }

    /// Cells whose centers satisfy `inside`.
    pub fn voxelize<F: Fn(Vec3) -> bool>(l: f64, n: usize, inside: F) -> Result<Self> {
        let mut s = Self::empty(l, n)?;
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    if inside(s.center([i, j, k])) {
                        let idx = s.index([i, j, k]);
                        s.occ[idx] = true;
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn ball(l: f64, n: usize, center: Vec3, radius: f64) -> Result<Self> {
        Self::voxelize(l, n, |x| {
            let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
            d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= radius * radius
        })
    }

    /// Exactly `count` cells chosen uniformly at random.
    pub fn random_with_count<R: Rng>(l: f64, n: usize, count: usize, rng: &mut R) -> Result<Self> {
        let mut s = Self::empty(l, n)?;
        let total = n * n * n;
        if count > total {
            return Err(Error::OutOfRange(format!("{count} cells requested on a grid of {total}")));
        }
        for idx in sample(rng, total, count).into_iter() {
            s.occ[idx] = true;
        }
        Ok(s)
    }

    /// Random set with `round(theta·n³)` cells, neutral to within half a voxel.
    pub fn random_neutral<R: Rng>(l: f64, n: usize, theta: f64, rng: &mut R) -> Result<Self> {
        let count = (theta * (n * n * n) as f64).round() as usize;
        Self::random_with_count(l, n, count, rng)
    }

    pub fn l(&self) -> f64 {
        f64::from_bits(self.l)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.l() / self.n as f64
    }

    pub fn domain(&self) -> DomainBox {
        DomainBox { l: self.l() }
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occ
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.n * (c[1] + self.n * c[2])
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        [idx % self.n, (idx / self.n) % self.n, idx / (self.n * self.n)]
    }

    pub fn get(&self, c: [usize; 3]) -> bool {
        self.occ[self.index(c)]
    }

    pub fn set(&mut self, c: [usize; 3], value: bool) {
        let idx = self.index(c);
        self.occ[idx] = value;
    }

    pub fn center(&self, c: [usize; 3]) -> Vec3 {
        let h = self.h();
        let half = 0.5 * self.l();
        [
            -half + (c[0] as f64 + 0.5) * h,
            -half + (c[1] as f64 + 0.5) * h,
            -half + (c[2] as f64 + 0.5) * h,
        ]
    }

    pub fn count(&self) -> usize {
        self.occ.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.occ.iter().any(|b| *b)
    }

    /// Indices of occupied cells in increasing order.
    pub fn occupied(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.occ
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| self.coords(i))
    }

    pub fn same_grid(&self, other: &VoxelSet) -> bool {
        self.l == other.l && self.n == other.n
    }

    pub fn union(&self, other: &VoxelSet) -> Result<VoxelSet> {
        if !self.same_grid(other) {
            return Err(Error::Precondition("union of sets on different grids".into()));
        }
        let occ = self.occ.iter().zip(&other.occ).map(|(a, b)| *a || *b).collect();
        Ok(VoxelSet { l: self.l, n: self.n, occ })
    }

    pub fn is_disjoint(&self, other: &VoxelSet) -> bool {
        self.same_grid(other) && !self.occ.iter().zip(&other.occ).any(|(a, b)| *a && *b)
    }

    /// Image under a symmetry of the cube: coordinate permutation `perm`
    /// followed by reflections `flip`.
    pub fn transformed(&self, perm: [usize; 3], flip: [bool; 3]) -> VoxelSet {
        let mut out = VoxelSet { l: self.l, n: self.n, occ: vec![false; self.occ.len()] };
        let n = self.n;
        for c in self.occupied() {
            let mut d = [c[perm[0]], c[perm[1]], c[perm[2]]];
            for a in 0..3 {
                if flip[a] {
                    d[a] = n - 1 - d[a];
                }
            }
            out.set(d, true);
        }
        out
    }

    /// Occupied-to-free faces, counting the box boundary as free.
    pub fn perimeter_faces(&self) -> usize {
        self.perimeter_faces_by_axis().iter().sum()
    }

    /// Occupied-to-free faces split by the axis normal to the face.
    pub fn perimeter_faces_by_axis(&self) -> [usize; 3] {
        let n = self.n;
        let mut faces = [0usize; 3];
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    if !self.get([i, j, k]) {
                        continue;
                    }
                    let c = [i, j, k];
                    for a in 0..3 {
                        for step in [-1i64, 1] {
                            let x = c[a] as i64 + step;
                            let free = if x < 0 || x >= n as i64 {
                                true
                            } else {
                                let mut d = c;
                                d[a] = x as usize;
                                !self.get(d)
                            };
                            if free {
                                faces[a] += 1;
                            }
                        }
                    }
                }
            }
        }
        faces
    }

    /// Occupied cell faces lying on `∂Q_L`.
    pub fn box_faces(&self) -> usize {
        let n = self.n;
        let mut faces = 0;
        for c in self.occupied() {
            for a in 0..3 {
                if c[a] == 0 {
                    faces += 1;
                }
                if c[a] == n - 1 {
                    faces += 1;
                }
            }
        }
        faces
    }
}

pub fn volume(set: &VoxelSet) -> f64 {
    let h = set.h();
    h * h * h * set.count() as f64
}

/// Face-counting (ℓ¹-anisotropic) perimeter.
pub fn perimeter(set: &VoxelSet) -> f64 {
    let h = set.h();
    h * h * set.perimeter_faces() as f64
}

/// Area of the occupied cell faces on `∂Q_L`.
pub fn box_face_area(set: &VoxelSet) -> f64 {
    let h = set.h();
    h * h * set.box_faces() as f64
}

/// Largest center distance plus one cell diagonal.
pub fn diameter(set: &VoxelSet) -> Result<f64> {
    let cells: Vec<[usize; 3]> = set.occupied().collect();
    if cells.is_empty() {
        return Err(Error::EmptySet);
    }
    let hull = extreme_cells(&cells);
    let mut best = 0i64;
    for a in &hull {
        for b in &hull {
            let d: i64 = (0..3).map(|i| (a[i] as i64 - b[i] as i64).pow(2)).sum();
            best = best.max(d);
        }
    }
    let h = set.h();
    Ok(h * (best as f64).sqrt() + 3f64.sqrt() * h)
}

/// Cells that are extreme along some axis-aligned row; the farthest pair
/// always lies among them.
fn extreme_cells(cells: &[[usize; 3]]) -> Vec<[usize; 3]> {
    use std::collections::BTreeMap;
    let mut rows: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for c in cells {
        let e = rows.entry((c[1], c[2])).or_insert((c[0], c[0]));
        e.0 = e.0.min(c[0]);
        e.1 = e.1.max(c[0]);
    }
    let mut out = Vec::with_capacity(rows.len() * 2);
    for ((j, k), (lo, hi)) in rows {
        out.push([lo, j, k]);
        if hi != lo {
            out.push([hi, j, k]);
        }
    }
    out
}

pub fn complement_in_box(set: &VoxelSet) -> VoxelSet {
    VoxelSet { l: set.l, n: set.n, occ: set.occ.iter().map(|b| !b).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn volume_examples() {
        assert_eq!(volume(&VoxelSet::empty(3.0, 5).unwrap()), 0.0);
        assert_eq!(volume(&VoxelSet::full(2.0, 4).unwrap()), 8.0);
    }

    #[test]
    fn ball_volume_converges() {
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        let mut errs = vec![];
        for n in [16usize, 32, 64] {
            let b = VoxelSet::ball(2.5, n, [0.0; 3], 1.0).unwrap();
            errs.push((volume(&b) - exact).abs() / exact);
        }
        assert!(errs[2] < 0.01, "{errs:?}");
        assert!(errs[2] < errs[0]);
    }

    #[test]
    fn perimeter_examples() {
        let mut s = VoxelSet::empty(5.0, 5).unwrap();
        s.set([2, 2, 2], true);
        assert_eq!(perimeter(&s), 6.0);
        s.set([0, 0, 0], true);
        assert_eq!(perimeter(&s), 12.0);
        s.set([1, 0, 0], true);
        assert_eq!(perimeter(&s), 16.0);
    }

    #[test]
    fn ball_perimeter_tends_to_l1_value() {
        let target = 6.0 * std::f64::consts::PI;
        let b = VoxelSet::ball(2.5, 96, [0.0; 3], 1.0).unwrap();
        let p = perimeter(&b);
        assert!((p - target).abs() / target < 0.02, "{p}");
        assert!((p - 4.0 * std::f64::consts::PI).abs() > 5.0);
    }

    #[test]
    fn diameter_examples() {
        let mut s = VoxelSet::empty(10.0, 10).unwrap();
        assert!(matches!(diameter(&s), Err(Error::EmptySet)));
        s.set([4, 4, 4], true);
        assert!((diameter(&s).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let mut t = VoxelSet::empty(10.0, 10).unwrap();
        t.set([0, 0, 0], true);
        t.set([9, 9, 9], true);
        assert!((diameter(&t).unwrap() - 10.0 * 3f64.sqrt()).abs() < 1e-12);
        let b = VoxelSet::ball(2.5, 80, [0.0; 3], 1.0).unwrap();
        let d = diameter(&b).unwrap();
        assert!(d >= 2.0 - 1e-12 && d < 2.0 + 4.0 * b.h(), "{d}");
    }

    #[test]
    fn diameter_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let s = VoxelSet::random_with_count(1.0, 7, 30, &mut rng).unwrap();
            let cells: Vec<_> = s.occupied().collect();
            let mut best = 0.0f64;
            for a in &cells {
                for b in &cells {
                    let d: f64 = (0..3).map(|i| (a[i] as f64 - b[i] as f64).powi(2)).sum::<f64>().sqrt();
                    best = best.max(d);
                }
            }
            let want = s.h() * (best + 3f64.sqrt());
            assert!((diameter(&s).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn complement_examples() {
        let e = VoxelSet::empty(2.0, 3).unwrap();
        assert_eq!(complement_in_box(&e), VoxelSet::full(2.0, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = VoxelSet::random_with_count(2.0, 6, 50, &mut rng).unwrap();
        assert_eq!(complement_in_box(&complement_in_box(&s)), s);
        assert!((volume(&complement_in_box(&s)) - (8.0 - volume(&s))).abs() < 1e-12);
    }

    #[test]
    fn complement_perimeter_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.gen_range(2..9);
            let count = rng.gen_range(0..=n * n * n);
            let s = VoxelSet::random_with_count(n as f64, n, count, &mut rng).unwrap();
            let c = complement_in_box(&s);
            let lhs = c.perimeter_faces() as i64 - s.perimeter_faces() as i64;
            let rhs = 6 * (n * n) as i64 - 2 * s.box_faces() as i64;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn random_neutral_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = VoxelSet::random_neutral(1.0, 16, 0.3, &mut rng).unwrap();
        assert_eq!(s.count(), (0.3f64 * 4096.0).round() as usize);
    }

    #[test]
    fn symmetry_preserves_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = VoxelSet::random_with_count(1.0, 6, 40, &mut rng).unwrap();
        let t = s.transformed([2, 0, 1], [true, false, true]);
        assert_eq!(t.count(), 40);
        assert_eq!(t.perimeter_faces(), s.perimeter_faces());
    }
}
