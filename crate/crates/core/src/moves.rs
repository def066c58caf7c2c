//! Elementary moves: shifts, splits, collisions, and puncture extension.
//!
//! Every move rewires a small neighborhood of its site and keeps all other
//! branch and switch ids fixed, so the natural correspondence between the
//! tracks before and after is the identity on ids wherever both sides have
//! them.  Region records are transported by a vote: each boundary walk of the
//! result pulls its darts back through the move and inherits the topology of
//! the region(s) that owned them, with exact Euler-characteristic arithmetic
//! when a deleted branch merges two regions.  The workspace-wide Euler check
//! in the track validator then certifies the result.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::measure::{Fallback, SplitOracle, TransverseMeasure};
use crate::track::{
    BranchClass, BranchId, Dart, EndId, RegionSpec, Smoothing, SwitchId, TrackBuilder,
    TrainTrack,
};
use crate::{Error, Rational, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitDir {
    Right,
    Left,
}

impl SplitDir {
    pub fn opposite(self) -> SplitDir {
        match self {
            SplitDir::Right => SplitDir::Left,
            SplitDir::Left => SplitDir::Right,
        }
    }
}

/// The local picture at a large branch `e` with trivalent endpoints: the
/// counterclockwise cycles are `(e.0, a, b)` at `v1` and `(e.1, c, d)` at
/// `v2`.  A right split makes `a` and `c` the winners, a left split makes
/// `b` and `d` the winners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitFrame {
    pub e: BranchId,
    pub v1: SwitchId,
    pub v2: SwitchId,
    pub a: EndId,
    pub b: EndId,
    pub c: EndId,
    pub d: EndId,
}

/// The local picture at a mixed branch `b` running from the switch `v` of
/// its large end to the switch `w` of its small end.  At `w` the cycle is
/// `(d, r, b.small)` or `(d, b.small, r)`; `target` is the end at `v` that
/// the sliding branch `r` lands next to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftFrame {
    pub b: BranchId,
    pub v: SwitchId,
    pub w: SwitchId,
    pub large: EndId,
    pub small: EndId,
    pub d: EndId,
    pub r: EndId,
    pub q: EndId,
    pub c: EndId,
    /// True when the cycle at `w` is `(d, b.small, r)`.
    pub small_before_r: bool,
    pub target: EndId,
}

#[derive(Debug, Clone)]
pub enum MoveData {
    Shift(ShiftFrame),
    Split(SplitFrame, SplitDir),
    Collision(SplitFrame),
}

/// A move together with its branch correspondence.  `branch_map` sends every
/// surviving domain branch to its image; the collision diagonal is absent
/// from the domain.
#[derive(Debug, Clone)]
pub struct Move {
    pub data: MoveData,
    pub branch_map: BTreeMap<BranchId, BranchId>,
}

impl Move {
    pub fn kind_str(&self) -> String {
        match &self.data {
            MoveData::Shift(f) => format!("shift b{}", f.b),
            MoveData::Split(f, SplitDir::Right) => format!("split R e{}", f.e),
            MoveData::Split(f, SplitDir::Left) => format!("split L e{}", f.e),
            MoveData::Collision(f) => format!("collision e{}", f.e),
        }
    }

    pub fn site(&self) -> BranchId {
        match &self.data {
            MoveData::Shift(f) => f.b,
            MoveData::Split(f, _) | MoveData::Collision(f) => f.e,
        }
    }
}

/// Compose branch correspondences along consecutive moves.
pub fn compose_branch_maps(
    first: &BTreeMap<BranchId, BranchId>,
    second: &BTreeMap<BranchId, BranchId>,
) -> BTreeMap<BranchId, BranchId> {
    first
        .iter()
        .filter_map(|(&x, &y)| second.get(&y).map(|&z| (x, z)))
        .collect()
}

pub fn split_frame(track: &TrainTrack, e: BranchId) -> Result<SplitFrame> {
    if !track.has_branch(e) {
        return Err(Error::InvalidMove(format!("no branch b{e}")));
    }
    if track.branch_class(e) != BranchClass::Large {
        return Err(Error::InvalidMove(format!("branch b{e} is not large")));
    }
    let e0 = EndId::new(e, 0);
    let e1 = EndId::new(e, 1);
    let v1 = track.loc(e0).switch;
    let v2 = track.loc(e1).switch;
    if track.switch(v1).valence() != 3 || track.switch(v2).valence() != 3 {
        return Err(Error::InvalidMove(format!(
            "branch b{e} does not run between trivalent switches"
        )));
    }
    let a = track.next_ccw(e0);
    let b = track.next_ccw(a);
    let c = track.next_ccw(e1);
    let d = track.next_ccw(c);
    Ok(SplitFrame { e, v1, v2, a, b, c, d })
}

/// Rebuild the region specs of a surgered builder by pulling every new walk
/// back through the move.  `smoothings` record branch merges; each entry of
/// `deleted_flanks` names the two old regions flanking one deleted branch
/// (they merge, costing one unit of Euler characteristic).
fn rebuild_regions(
    old: &TrainTrack,
    builder: &mut TrackBuilder,
    smoothings: &[Smoothing],
    deleted_flanks: &[(usize, usize)],
) -> Result<()> {
    let walks = builder.compute_walks()?;

    let pre_images = |d: Dart| -> Vec<Dart> {
        let mut set = vec![d];
        for sm in smoothings.iter().rev() {
            let mut extra = Vec::new();
            for x in &set {
                if x.branch == sm.kept {
                    let fwd =
                        if x.forward { sm.gone_forward_under_kept_forward } else { !sm.gone_forward_under_kept_forward };
                    extra.push(Dart::new(sm.gone, fwd));
                }
            }
            set.extend(extra);
        }
        set
    };

    // Union-find over old regions and new walks.
    let nr = old.regions().len();
    let total = nr + walks.len();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    };

    for (wi, walk) in walks.iter().enumerate() {
        let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
        for &d in &walk.darts {
            for p in pre_images(d) {
                if old.try_loc(p.head()).is_some() {
                    *tally.entry(old.region_of_dart(p)).or_insert(0) += 1;
                }
            }
        }
        // Majority of the walk's darts lay on the boundary of one old
        // region; that region owns the walk.  Ties would mean the local
        // picture of the move failed to dominate, which the frozen move
        // tables rule out.
        let owner = tally
            .iter()
            .max_by_key(|&(ri, n)| (*n, std::cmp::Reverse(*ri)))
            .map(|(&ri, _)| ri)
            .ok_or_else(|| {
                Error::Internal(format!(
                    "walk at {} has no ancestry under the move",
                    walk.anchor()
                ))
            })?;
        union(&mut parent, nr + wi, owner);
    }
    for &(f1, f2) in deleted_flanks {
        union(&mut parent, f1, f2);
    }

    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for ri in 0..nr {
        let root = find(&mut parent, ri);
        groups.entry(root).or_default().0.push(ri);
    }
    for wi in 0..walks.len() {
        let root = find(&mut parent, nr + wi);
        groups.entry(root).or_default().1.push(wi);
    }

    let mut specs = Vec::new();
    for (_, (old_regions, new_walks)) in groups {
        if new_walks.is_empty() {
            return Err(Error::Internal(
                "a region lost its entire boundary under the move".into(),
            ));
        }
        let punctures: u32 = old_regions.iter().map(|&ri| old.regions()[ri].punctures).sum();
        let chi_old: i64 = old_regions
            .iter()
            .map(|&ri| {
                let r = &old.regions()[ri];
                2 - 2 * r.genus as i64 - r.walks.len() as i64 - r.punctures as i64
            })
            .sum();
        let merges = deleted_flanks
            .iter()
            .filter(|&&(f1, _)| old_regions.contains(&f1))
            .count() as i64;
        let chi = chi_old - merges;
        let b = new_walks.len() as i64;
        let num = 2 - b - punctures as i64 - chi;
        if num < 0 || num % 2 != 0 {
            return Err(Error::Internal(format!(
                "region surgery left impossible Euler data (chi {chi}, {b} walks)"
            )));
        }
        specs.push(RegionSpec {
            anchors: new_walks.iter().map(|&wi| walks[wi].anchor()).collect(),
            genus: (num / 2) as u32,
            punctures,
        });
    }
    builder.set_regions(specs);
    Ok(())
}

/// Split the large branch `e`.  The diagonal of the split keeps the id `e`
/// and is small in the result; all other ids are fixed.
pub fn split(track: &TrainTrack, e: BranchId, dir: SplitDir) -> Result<(TrainTrack, Move)> {
    let f = split_frame(track, e)?;
    let mut builder = track.to_builder();
    let e0 = EndId::new(e, 0);
    let e1 = EndId::new(e, 1);
    match dir {
        SplitDir::Right => {
            builder.add_switch(f.v1, vec![f.a], vec![e0, f.d]);
            builder.add_switch(f.v2, vec![f.c], vec![e1, f.b]);
        }
        SplitDir::Left => {
            builder.add_switch(f.v1, vec![f.b], vec![f.c, e0]);
            builder.add_switch(f.v2, vec![f.d], vec![f.a, e1]);
        }
    }
    rebuild_regions(track, &mut builder, &[], &[])?;
    let out = builder.freeze().map_err(internal_if_invalid)?;
    let branch_map = track.branch_ids().map(|b| (b, b)).collect();
    Ok((out, Move { data: MoveData::Split(f, dir), branch_map }))
}

/// Shift along the mixed branch `b`: the branch sharing a side with its
/// small end slides past the switch of its large end.
pub fn shift(track: &TrainTrack, b: BranchId) -> Result<(TrainTrack, Move)> {
    if !track.has_branch(b) {
        return Err(Error::InvalidMove(format!("no branch b{b}")));
    }
    if track.branch_class(b) != BranchClass::Mixed {
        return Err(Error::InvalidMove(format!("branch b{b} is not mixed")));
    }
    let (large, small) = {
        let b0 = EndId::new(b, 0);
        if track.end_is_large(b0) { (b0, b0.mate()) } else { (b0.mate(), b0) }
    };
    let v = track.loc(large).switch;
    let w = track.loc(small).switch;
    if v == w {
        return Err(Error::InvalidMove(format!(
            "branch b{b} is a loop; shifting is not defined"
        )));
    }
    if track.switch(v).valence() != 3 || track.switch(w).valence() != 3 {
        return Err(Error::InvalidMove(format!(
            "branch b{b} does not run between trivalent switches"
        )));
    }
    let q = track.next_ccw(large);
    let c = track.next_ccw(q);
    let d_end = track.next_ccw(small);
    let (d, r, small_before_r) = if track.loc(d_end).side != track.loc(small).side {
        // Cycle (small, d, r): d is the lone end, r precedes small.
        (d_end, track.next_ccw(d_end), false)
    } else {
        // Cycle (small, r, d): r follows small.
        (track.next_ccw(d_end), d_end, true)
    };
    debug_assert!(track.end_is_large(d));

    let mut builder = track.to_builder();
    let target = if small_before_r {
        // Cusp (small, r) at w, so r slides next to the end following the
        // large end's counterclockwise predecessor: cycle (d, q, b) forms.
        builder.add_switch(w, vec![small], vec![c, r]);
        builder.add_switch(v, vec![d], vec![q, large]);
        c
    } else {
        // Cusp (r, small) at w: cycle (b, r, q) and (d, b, c) form.
        builder.add_switch(w, vec![small], vec![r, q]);
        builder.add_switch(v, vec![d], vec![large, c]);
        q
    };
    rebuild_regions(track, &mut builder, &[], &[])?;
    let out = builder.freeze().map_err(internal_if_invalid)?;
    let branch_map = track.branch_ids().map(|x| (x, x)).collect();
    let frame = ShiftFrame { b, v, w, large, small, d, r, q, c, small_before_r, target };
    Ok((out, Move { data: MoveData::Shift(frame), branch_map }))
}

/// Split at `e` and delete the diagonal, smoothing the two switches that
/// become bivalent.  The result does not depend on the split direction.
pub fn collision(track: &TrainTrack, e: BranchId) -> Result<(TrainTrack, Move)> {
    let f = split_frame(track, e)?;
    let mut builder = track.to_builder();
    // Right-split wiring with the diagonal left out; its ends disappear
    // with the rewiring, deleting the branch.
    builder.add_switch(f.v1, vec![f.a], vec![f.d]);
    builder.add_switch(f.v2, vec![f.c], vec![f.b]);
    let mut smoothings = Vec::new();
    for v in [f.v1, f.v2] {
        if let Some(sm) = builder.smooth_bivalent(v)? {
            smoothings.push(sm);
        }
    }
    let flank1 = track.region_of_dart(Dart::arriving(f.b));
    let flank2 = track.region_of_dart(Dart::arriving(f.d));
    rebuild_regions(track, &mut builder, &smoothings, &[(flank1, flank2)])?;
    let out = builder.freeze()?;
    let mut branch_map: BTreeMap<BranchId, BranchId> =
        track.branch_ids().filter(|&x| x != e).map(|x| (x, x)).collect();
    for sm in &smoothings {
        branch_map.insert(sm.gone, sm.kept);
    }
    Ok((out, Move { data: MoveData::Collision(f), branch_map }))
}

fn internal_if_invalid(e: Error) -> Error {
    match e {
        Error::InvalidTrack(msg) => {
            Error::Internal(format!("move produced an invalid track: {msg}"))
        }
        other => other,
    }
}

/// Weight difference deciding a split direction: positive means only a right
/// split carries the measure, negative only a left split, zero means both
/// (the measure also survives the collision).
pub fn split_balance(mu: &TransverseMeasure, f: &SplitFrame) -> Rational {
    mu.weight(f.a.branch) - mu.weight(f.d.branch)
}

/// Transport weights through a move without checking carriability.  Used for
/// the signed refinement measures of an oracle once a direction is fixed.
fn transport_linear(mu: &TransverseMeasure, m: &Move) -> TransverseMeasure {
    match &m.data {
        MoveData::Shift(f) => {
            let mut out = mu.clone();
            out.set(f.b, mu.weight(f.target.branch) + mu.weight(f.r.branch));
            out
        }
        MoveData::Split(f, dir) => {
            let mut out = mu.clone();
            let balance = split_balance(mu, f);
            let w = match dir {
                SplitDir::Right => balance,
                SplitDir::Left => -balance,
            };
            out.set(f.e, w);
            out
        }
        MoveData::Collision(_) => {
            let mut out = TransverseMeasure::new();
            for (&x, &y) in &m.branch_map {
                let v = mu.weight(x);
                if !v.is_zero() {
                    out.set(y, v);
                }
            }
            out
        }
    }
}

/// Transport a measure through a move.  Returns `None` when the image track
/// does not carry the measure: a split direction fought by the weights, or a
/// collision with unequal competing weights.
pub fn transport_measure(mu: &TransverseMeasure, m: &Move) -> Option<TransverseMeasure> {
    match &m.data {
        MoveData::Shift(_) => Some(transport_linear(mu, m)),
        MoveData::Split(f, dir) => {
            let balance = split_balance(mu, f);
            let ok = match dir {
                SplitDir::Right => !balance.is_negative(),
                SplitDir::Left => balance.is_negative() || balance.is_zero(),
            };
            if ok {
                Some(transport_linear(mu, m))
            } else {
                None
            }
        }
        MoveData::Collision(f) => {
            if split_balance(mu, f).is_zero() {
                Some(transport_linear(mu, m))
            } else {
                None
            }
        }
    }
}

/// How an oracle settled a split demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleResolution {
    Decided(SplitDir),
    /// Every measure in the chain vanishes on the branch; the deterministic
    /// fallback chose the direction.
    Fallback(SplitDir),
    /// The whole chain ties with weight present: the oracle demands the
    /// collision.
    TieCollision,
}

pub fn resolve_split(
    oracle: &SplitOracle,
    track: &TrainTrack,
    e: BranchId,
) -> Result<(SplitFrame, OracleResolution)> {
    let f = split_frame(track, e)?;
    for mu in oracle.measures() {
        let balance = split_balance(mu, &f);
        if balance.is_positive() {
            return Ok((f, OracleResolution::Decided(SplitDir::Right)));
        }
        if balance.is_negative() {
            return Ok((f, OracleResolution::Decided(SplitDir::Left)));
        }
    }
    let all_zero = oracle.measures().all(|mu| mu.weight(e).is_zero());
    if all_zero {
        let dir = match oracle.fallback {
            Fallback::AlwaysRight => SplitDir::Right,
            Fallback::AlwaysLeft => SplitDir::Left,
        };
        Ok((f, OracleResolution::Fallback(dir)))
    } else {
        Ok((f, OracleResolution::TieCollision))
    }
}

/// Result of an oracle-driven split.
#[derive(Debug, Clone)]
pub struct LambdaSplit {
    pub track: TrainTrack,
    pub mv: Move,
    pub oracle: SplitOracle,
    pub resolution: OracleResolution,
}

/// Perform the unique oracle-compatible split at `e`, or the collision when
/// the oracle's whole chain ties with weight on `e`.  The oracle's measures
/// are transported onto the result.
pub fn lambda_split(track: &TrainTrack, e: BranchId, oracle: &SplitOracle) -> Result<LambdaSplit> {
    let (_, resolution) = resolve_split(oracle, track, e)?;
    let (out, mv) = match resolution {
        OracleResolution::Decided(dir) | OracleResolution::Fallback(dir) => split(track, e, dir)?,
        OracleResolution::TieCollision => collision(track, e)?,
    };
    let primary = transport_measure(&oracle.primary, &mv).ok_or_else(|| {
        Error::Internal("oracle-chosen direction does not carry the primary measure".into())
    })?;
    let tie_breakers = oracle.tie_breakers.iter().map(|t| transport_linear(t, &mv)).collect();
    let oracle = SplitOracle {
        primary,
        tie_breakers,
        fallback: oracle.fallback,
    };
    Ok(LambdaSplit { track: out, mv, oracle, resolution })
}

/// Subdivide the branch under `d` at a fresh switch, returning the switch
/// and the two half-branch ends there ordered against and along the walk
/// direction of `d`.  Wiring a chord end after the second slot puts the new
/// cusp on the walk-forward side.
fn tangent_prepare(builder: &mut TrackBuilder, d: Dart) -> Result<(SwitchId, EndId, EndId)> {
    let (switch, h) = builder.subdivide_branch(d.branch)?;
    let f1 = EndId::new(d.branch, 1);
    let h0 = EndId::new(h, 0);
    let (w, z) = if d.forward { (f1, h0) } else { (h0, f1) };
    Ok((switch, w, z))
}

/// Grow a complete track on (g, m) into one on (g, m+1) by planting a new
/// puncture inside a trigon region: a loop around the puncture, a connector
/// to a subdivided side, and a chord retriangulating the region behind that
/// side.  The original track survives as a subtrack.
pub fn puncture_extend(track: &TrainTrack, region_index: usize) -> Result<TrainTrack> {
    let region = track
        .regions()
        .get(region_index)
        .ok_or_else(|| Error::InvalidMove(format!("no region {region_index}")))?;
    if !region.is_trigon() {
        return Err(Error::InvalidMove(format!("region {region_index} is not a trigon")));
    }
    let walk = &track.walks()[region.walks[0]];
    // The side we subdivide must back onto a different trigon, which the
    // chord will retriangulate.
    let delta = walk
        .darts
        .iter()
        .copied()
        .filter(|d| {
            let back = track.region_of_dart(d.reversed());
            back != region_index && track.regions()[back].is_trigon()
        })
        .min()
        .ok_or_else(|| {
            Error::InvalidMove(format!(
                "region {region_index} has no neighboring trigon to retriangulate"
            ))
        })?;
    let back_region = track.region_of_dart(delta.reversed());

    let surface = crate::Surface::new(track.surface().genus(), track.surface().punctures() + 1)?;
    let mut builder = track.to_builder();
    builder.surface = surface;

    // Keep every region record away from the two we are about to rebuild.
    let mut specs: Vec<RegionSpec> = Vec::new();
    for (ri, r) in track.regions().iter().enumerate() {
        if ri != region_index && ri != back_region {
            specs.push(RegionSpec {
                anchors: r.walks.iter().map(|&wi| track.walks()[wi].anchor()).collect(),
                genus: r.genus,
                punctures: r.punctures,
            });
        }
    }

    // Loop and connector inside the trigon.
    let f = delta.branch;
    let (v1, g) = builder.subdivide_branch(f)?;
    let b1 = builder.next_branch_id();
    let b2 = b1 + 1;
    let v2 = builder.next_switch_id();
    let (west, east) = if delta.forward {
        (EndId::new(f, 1), EndId::new(g, 0))
    } else {
        (EndId::new(g, 0), EndId::new(f, 1))
    };
    builder.add_switch(v1, vec![EndId::new(b1, 0)], vec![west, east]);
    builder.add_switch(v2, vec![EndId::new(b1, 1)], vec![EndId::new(b2, 0), EndId::new(b2, 1)]);
    specs.push(RegionSpec { anchors: vec![Dart::new(b2, true)], genus: 0, punctures: 1 });
    specs.push(RegionSpec { anchors: vec![delta], genus: 0, punctures: 0 });

    // The region behind the subdivided branch gained the cusp at v1 and is
    // now a fourgon.  A chord between the side containing the subdivided
    // branch and the opposite side cuts it into two trigons.  The first
    // chord end goes right after the new cusp: onto the half of the
    // subdivided branch away from v1 along the back walk.
    let back_dart = if delta.forward { Dart::new(f, false) } else { Dart::new(g, true) };

    // Second chord end: the second full side of the old trigon behind,
    // counting walk-forward from the side holding the subdivided branch.
    let sides = crate::measure::region_sides(track, back_region);
    let back_side = sides
        .iter()
        .position(|s| s.contains(&delta.reversed()))
        .ok_or_else(|| Error::Internal("subdivided branch missing from back region".into()))?;
    let q_dart = sides[(back_side + 2) % 3][0];
    if q_dart.branch == f {
        return Err(Error::Internal(
            "fourgon sides degenerate; opposite side revisits the subdivided branch".into(),
        ));
    }

    let (p_switch, p_back, p_fwd) = tangent_prepare(&mut builder, back_dart)?;
    let (q_switch, q_back, q_fwd) = tangent_prepare(&mut builder, q_dart)?;
    let b3 = builder.next_branch_id();
    builder.add_switch(p_switch, vec![p_back], vec![p_fwd, EndId::new(b3, 0)]);
    builder.add_switch(q_switch, vec![q_back], vec![q_fwd, EndId::new(b3, 1)]);

    specs.push(RegionSpec { anchors: vec![Dart::new(b3, false)], genus: 0, punctures: 0 });
    specs.push(RegionSpec { anchors: vec![Dart::new(b3, true)], genus: 0, punctures: 0 });

    builder.set_regions(specs);
    let out = builder.freeze().map_err(internal_if_invalid)?;
    if !out.is_maximal_generic() {
        return Err(Error::Internal("puncture extension lost maximality".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::theta;
    use crate::measure::TransverseMeasure;
    use crate::rat;
    use crate::track::Walk;

    fn walk_with(t: &TrainTrack, d: Dart) -> &Walk {
        &t.walks()[t.walk_of_dart(d)]
    }

    #[test]
    fn theta_is_a_bigon_track() {
        let t = theta();
        assert_eq!(t.branch_count(), 3);
        assert_eq!(t.regions().len(), 3);
        assert_eq!(walk_with(&t, Dart::new(1, true)).cusps(), 2);
        assert_eq!(t.branch_class(0), BranchClass::Large);
        assert_eq!(t.branch_class(1), BranchClass::Small);
    }

    #[test]
    fn split_theta_both_ways() {
        let t = theta();
        let (r, mv) = split(&t, 0, SplitDir::Right).unwrap();
        assert_eq!(r.branch_count(), 3);
        assert_eq!(r.regions().len(), 3);
        assert_eq!(mv.branch_map.len(), 3);
        // The diagonal is small in the result.
        assert_eq!(r.branch_class(0), BranchClass::Small);
        let (l, _) = split(&t, 0, SplitDir::Left).unwrap();
        assert_eq!(l.branch_count(), 3);
        // Right and left split results are mirror images with opposite
        // handedness at both switches, so no orientation-preserving
        // isomorphism relates them, and neither matches the original.
        assert!(!crate::canonical::isomorphic(&r, &l));
        assert!(!crate::canonical::isomorphic(&r, &t));
    }

    #[test]
    fn measure_transport_through_theta_split() {
        let t = theta();
        let mu = TransverseMeasure::from_weights([(0, rat(4)), (1, rat(3)), (2, rat(1))]);
        mu.validate(&t).unwrap();
        let (r, mv) = split(&t, 0, SplitDir::Right).unwrap();
        // Ends a and d belong to the same branch here, so the competition
        // ties and both directions carry the measure with a zero diagonal.
        let out = transport_measure(&mu, &mv).unwrap();
        out.validate(&r).unwrap();
        assert_eq!(out.weight(0), rat(0));
        assert_eq!(out.weight(1), rat(3));
        assert_eq!(out.weight(2), rat(1));
    }

    #[test]
    fn collision_of_theta_is_parallel_circles_and_rejected() {
        let t = theta();
        // Both loops after the collision encircle the same pair of
        // punctures; the middle region becomes a smooth annulus, which the
        // validator refuses.
        match collision(&t, 0) {
            Err(Error::InvalidTrack(_)) => {}
            other => panic!("expected invalid-track rejection, got {other:?}"),
        }
    }

    #[test]
    fn split_requires_a_large_branch() {
        let t = theta();
        assert!(matches!(split(&t, 1, SplitDir::Right), Err(Error::InvalidMove(_))));
        assert!(matches!(shift(&t, 0), Err(Error::InvalidMove(_))));
    }
}
