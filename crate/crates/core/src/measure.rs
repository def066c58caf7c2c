//! Transverse and tangential measures on tracks.
//!
//! A transverse measure assigns a nonnegative weight to every branch so that
//! at each switch the two sides carry equal total weight.  A tangential
//! measure assigns lengths to branches instead; its constraints live on the
//! complementary regions: the two sides of a bigon have equal length, and the
//! sides of a trigon satisfy the triangle inequalities.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::track::{BranchId, Dart, TrainTrack};
use crate::{Error, Rational, Result};

/// Weight function on branches; missing entries are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransverseMeasure {
    pub weights: BTreeMap<BranchId, Rational>,
}

impl TransverseMeasure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_weights<I: IntoIterator<Item = (BranchId, Rational)>>(w: I) -> Self {
        let mut weights = BTreeMap::new();
        for (b, v) in w {
            if !v.is_zero() {
                weights.insert(b, v);
            }
        }
        TransverseMeasure { weights }
    }

    pub fn weight(&self, b: BranchId) -> Rational {
        self.weights.get(&b).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, b: BranchId, v: Rational) {
        if v.is_zero() {
            self.weights.remove(&b);
        } else {
            self.weights.insert(b, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    /// Pointwise sum.
    pub fn add(&self, other: &TransverseMeasure) -> TransverseMeasure {
        let mut out = self.clone();
        for (b, v) in &other.weights {
            let w = out.weight(*b) + v;
            out.set(*b, w);
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> TransverseMeasure {
        TransverseMeasure::from_weights(
            self.weights.iter().map(|(b, v)| (*b, v * s)),
        )
    }

    /// Check nonnegativity, the switch conditions, and that the support
    /// consists of branches of the track.
    pub fn validate(&self, track: &TrainTrack) -> Result<()> {
        for (b, v) in &self.weights {
            if !track.has_branch(*b) {
                return Err(Error::InvalidMeasure(format!("weight on missing branch b{b}")));
            }
            if v < &Rational::zero() {
                return Err(Error::InvalidMeasure(format!("negative weight on b{b}")));
            }
        }
        for (v, data) in track.switches() {
            let total = |ends: &[crate::track::EndId]| -> Rational {
                ends.iter().map(|e| self.weight(e.branch)).sum()
            };
            if total(&data.sides[0]) != total(&data.sides[1]) {
                return Err(Error::InvalidMeasure(format!(
                    "switch condition fails at switch {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_positive_on(&self, track: &TrainTrack) -> bool {
        track.branch_ids().all(|b| self.weight(b) > Rational::zero())
    }

    /// Support: branches with positive weight.
    pub fn support(&self) -> impl Iterator<Item = BranchId> + '_ {
        self.weights.iter().filter(|(_, v)| !v.is_zero()).map(|(b, _)| *b)
    }
}

/// Length function on branches; missing entries are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TangentialMeasure {
    pub weights: BTreeMap<BranchId, Rational>,
}

impl TangentialMeasure {
    pub fn from_weights<I: IntoIterator<Item = (BranchId, Rational)>>(w: I) -> Self {
        let mut weights = BTreeMap::new();
        for (b, v) in w {
            if !v.is_zero() {
                weights.insert(b, v);
            }
        }
        TangentialMeasure { weights }
    }

    pub fn weight(&self, b: BranchId) -> Rational {
        self.weights.get(&b).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn side_length(&self, side: &[Dart]) -> Rational {
        side.iter().map(|d| self.weight(d.branch)).sum()
    }

    /// Check the region constraints: equal sides on every bigon and the
    /// triangle inequalities (strict if requested) on every trigon.
    pub fn validate(&self, track: &TrainTrack, strict: bool) -> Result<()> {
        for (b, v) in &self.weights {
            if !track.has_branch(*b) {
                return Err(Error::InvalidMeasure(format!("length on missing branch b{b}")));
            }
            if v < &Rational::zero() {
                return Err(Error::InvalidMeasure(format!("negative length on b{b}")));
            }
        }
        for (ri, region) in track.regions().iter().enumerate() {
            let sides = region_sides(track, ri);
            if region.is_bigon() {
                let a = self.side_length(&sides[0]);
                let b = self.side_length(&sides[1]);
                if a != b {
                    return Err(Error::InvalidMeasure(format!(
                        "bigon region {ri} has sides of different length"
                    )));
                }
            }
            if region.is_trigon() {
                for i in 0..3 {
                    let a = self.side_length(&sides[i]);
                    let b = self.side_length(&sides[(i + 1) % 3]);
                    let c = self.side_length(&sides[(i + 2) % 3]);
                    let ok = if strict { a < b + c } else { a <= b + c };
                    if !ok {
                        return Err(Error::InvalidMeasure(format!(
                            "triangle inequality fails on trigon region {ri}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The sides of a region: maximal cusp-free runs of its boundary walks.  A
/// walk without cusps contributes a single closed smooth side.
pub fn region_sides(track: &TrainTrack, region_index: usize) -> Vec<Vec<Dart>> {
    let region = &track.regions()[region_index];
    let mut sides = Vec::new();
    for &wi in &region.walks {
        let walk = &track.walks()[wi];
        let n = walk.darts.len();
        let cusp_positions: Vec<usize> =
            (0..n).filter(|&i| walk.cusp_after[i]).collect();
        if cusp_positions.is_empty() {
            sides.push(walk.darts.clone());
            continue;
        }
        // A side starts right after a cusp and runs to the next cusp.
        for (ci, &start) in cusp_positions.iter().enumerate() {
            let end = cusp_positions[(ci + 1) % cusp_positions.len()];
            let mut side = Vec::new();
            let mut i = (start + 1) % n;
            loop {
                side.push(walk.darts[i]);
                if i == end {
                    break;
                }
                i = (i + 1) % n;
            }
            sides.push(side);
        }
    }
    sides
}

/// Deterministic split-direction fallback for oracle chains that tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    AlwaysRight,
    AlwaysLeft,
}

/// A lexicographic chain of transverse measures standing in for a carried
/// lamination: the primary measure decides splits, tie-breakers refine, and
/// the fallback rule keeps resolution total.
#[derive(Debug, Clone)]
pub struct SplitOracle {
    pub primary: TransverseMeasure,
    pub tie_breakers: Vec<TransverseMeasure>,
    pub fallback: Fallback,
}

impl SplitOracle {
    pub fn new(primary: TransverseMeasure, fallback: Fallback) -> Self {
        SplitOracle { primary, tie_breakers: Vec::new(), fallback }
    }

    pub fn with_tie_breakers(mut self, tie_breakers: Vec<TransverseMeasure>) -> Self {
        self.tie_breakers = tie_breakers;
        self
    }

    pub fn measures(&self) -> impl Iterator<Item = &TransverseMeasure> {
        std::iter::once(&self.primary).chain(self.tie_breakers.iter())
    }

    pub fn validate(&self, track: &TrainTrack) -> Result<()> {
        for m in self.measures() {
            m.validate(track)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Surface;
    use crate::track::{EndId, TrackBuilder, TrackKind};
    use crate::rat;

    #[test]
    fn circle_measure_is_valid() {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(0, 1)]);
        b.add_region(vec![Dart::new(0, true), Dart::new(0, false)], 0, 1);
        let t = b.freeze().unwrap();
        let mu = TransverseMeasure::from_weights([(0, rat(5))]);
        assert!(mu.validate(&t).is_ok());
        assert!(mu.is_positive_on(&t));
        let bad = TransverseMeasure::from_weights([(0, rat(-1))]);
        assert!(bad.validate(&t).is_err());
    }

    #[test]
    fn sides_of_a_smooth_walk() {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(0, 1)]);
        b.add_region(vec![Dart::new(0, true), Dart::new(0, false)], 0, 1);
        let t = b.freeze().unwrap();
        let sides = region_sides(&t, 0);
        assert_eq!(sides.len(), 2);
        assert_eq!(sides[0].len(), 1);
    }
}
