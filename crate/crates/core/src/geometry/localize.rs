use std::collections::BTreeMap;

use super::VoxelSet;
use crate::error::{Error, Result};
use crate::linalg::Vec3;

/// Number of cells `k` with `R = k·h`.
pub fn shift_offsets(set: &VoxelSet, r: f64) -> Result<usize> {
    let h = set.h();
    let k = (r / h).round();
    if !(r > 0.0) || k < 1.0 || (r / h - k).abs() > 1e-9 * k.max(1.0) {
        return Err(Error::OffGrid { length: r, h });
    }
    Ok(k as usize)
}

/// Cut offset per axis for the shift `mu`: cut planes sit on faces whose index
/// is congruent to the offset modulo `k`.
pub fn mu_to_offset(mu: Vec3, k: usize, n: usize) -> Result<[usize; 3]> {
    let mut o = [0usize; 3];
    for a in 0..3 {
        if !(-0.5..0.5).contains(&mu[a]) {
            return Err(Error::OutOfRange(format!("shift components must lie in [-1/2, 1/2), got {mu:?}")));
        }
        let f = k as f64 * (mu[a] + 0.5) + 0.5 * n as f64;
        let fr = f.round();
        if (f - fr).abs() > 1e-9 * f.abs().max(1.0) {
            return Err(Error::Precondition(format!("shift {mu:?} is not on the voxel grid")));
        }
        o[a] = (fr as i64).rem_euclid(k as i64) as usize;
    }
    Ok(o)
}

/// Inverse of [`mu_to_offset`], wrapped into `[−1/2, 1/2)`.
pub fn offset_to_mu(o: [usize; 3], k: usize, n: usize) -> Vec3 {
    let mut mu = [0.0; 3];
    for a in 0..3 {
        let raw = (o[a] as f64 - 0.5 * n as f64) / k as f64 - 0.5;
        let mut m = raw - raw.floor();
        if m >= 0.5 {
            m -= 1.0;
        }
        mu[a] = m;
    }
    mu
}

/// Pieces `Ω ∩ Q_R(m + μ)`, nonempty ones only, ordered by block index.
pub fn localize(set: &VoxelSet, r: f64, mu: Vec3) -> Result<Vec<VoxelSet>> {
    let k = shift_offsets(set, r)?;
    let o = mu_to_offset(mu, k, set.n())?;
    let mut blocks: BTreeMap<[i64; 3], VoxelSet> = BTreeMap::new();
    for c in set.occupied() {
        let b = [
            (c[2] as i64 - o[2] as i64).div_euclid(k as i64),
            (c[1] as i64 - o[1] as i64).div_euclid(k as i64),
            (c[0] as i64 - o[0] as i64).div_euclid(k as i64),
        ];
        let piece = blocks
            .entry(b)
            .or_insert_with(|| VoxelSet::empty(set.l(), set.n()).expect("valid grid"));
        piece.set(c, true);
    }
    Ok(blocks.into_values().collect())
}

/// Occupied neighbour pairs across each interior face plane, grouped by the
/// plane index modulo `k`.
#[derive(Debug, Clone)]
pub struct CutCounts {
    pub k: usize,
    pub per_axis: [Vec<usize>; 3],
}

impl CutCounts {
    /// Occupied pairs separated by the cut planes of offset `o`.
    pub fn crossing(&self, o: [usize; 3]) -> usize {
        (0..3).map(|a| self.per_axis[a][o[a]]).sum()
    }

    pub fn total_pairs(&self) -> usize {
        self.per_axis.iter().map(|v| v.iter().sum::<usize>()).sum()
    }
}

pub fn cut_pair_counts(set: &VoxelSet, k: usize) -> CutCounts {
    let n = set.n();
    let mut per_axis = [vec![0usize; k], vec![0usize; k], vec![0usize; k]];
    for c in set.occupied() {
        for a in 0..3 {
            if c[a] + 1 < n {
                let mut d = c;
                d[a] += 1;
                if set.get(d) {
                    per_axis[a][(c[a] + 1) % k] += 1;
                }
            }
        }
    }
    CutCounts { k, per_axis }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{diameter, volume};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn large_box_gives_one_piece() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = VoxelSet::random_with_count(4.0, 8, 100, &mut rng).unwrap();
        let r = 4.0 + 2.0 * diameter(&s).unwrap();
        let mut k = (r / s.h()).ceil() as usize;
        if (k + s.n()) % 2 == 1 {
            k += 1;
        }
        let r = k as f64 * s.h();
        let pieces = localize(&s, r, [0.0; 3]).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0], s);
    }

    #[test]
    fn full_box_splits_into_octants() {
        // cut planes through the origin: μ = −1/2
        let s = VoxelSet::full(4.0, 4).unwrap();
        let pieces = localize(&s, 2.0, [-0.5; 3]).unwrap();
        assert_eq!(pieces.len(), 8);
        assert!(pieces.iter().all(|p| volume(p) == 8.0));
        // μ = 0 puts the cut planes at ±1
        let pieces = localize(&s, 2.0, [0.0; 3]).unwrap();
        assert_eq!(pieces.len(), 27);
    }

    #[test]
    fn off_grid_radius_is_rejected() {
        let s = VoxelSet::full(4.0, 4).unwrap();
        assert!(matches!(localize(&s, 1.5, [0.0; 3]), Err(Error::OffGrid { .. })));
        assert!(localize(&s, 2.0, [0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn offsets_round_trip() {
        for (k, n) in [(2usize, 8usize), (4, 16), (3, 9), (5, 12)] {
            for o0 in 0..k {
                let mu = offset_to_mu([o0, 0, k - 1], k, n);
                assert_eq!(mu_to_offset(mu, k, n).unwrap(), [o0, 0, k - 1]);
            }
        }
    }

    #[test]
    fn partition_and_piece_perimeters() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = rng.gen_range(4..12);
            let count = rng.gen_range(1..n * n * n);
            let s = VoxelSet::random_with_count(n as f64, n, count, &mut rng).unwrap();
            let k = rng.gen_range(1..=n);
            let o = [rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k)];
            let mu = offset_to_mu(o, k, n);
            let pieces = localize(&s, k as f64 * s.h(), mu).unwrap();
            let mut seen = VoxelSet::empty(s.l(), n).unwrap();
            let mut total = 0usize;
            for p in &pieces {
                assert!(p.is_disjoint(&seen));
                seen = seen.union(p).unwrap();
                total += p.perimeter_faces();
            }
            assert_eq!(seen, s);
            let counts = cut_pair_counts(&s, k);
            assert_eq!(total, s.perimeter_faces() + 2 * counts.crossing(o));
            let vsum: f64 = pieces.iter().map(volume).sum();
            assert!((vsum - volume(&s)).abs() < 1e-9);
        }
    }
}
