//! Ribbon-structure model of train tracks and bigon tracks.
//!
//! A track is a finite collection of switches and branches.  Every switch
//! carries two ordered sides, A and B; each side is a nonempty list of branch
//! ends.  Listing side A and then side B gives the full counterclockwise
//! cyclic order of ends around the switch, so exchanging the two side labels
//! rotates the cycle and describes the same geometric switch.  A corner
//! between two counterclockwise-adjacent ends on the same side is a cusp; the
//! two corners that straddle the sides are smooth.
//!
//! Complementary regions are stored explicitly.  Each region knows its genus,
//! the number of punctures it contains, and its boundary walks; a walk is an
//! orbit of oriented branches (darts) under the rule "arrive at an end, leave
//! through its counterclockwise predecessor".  Every dart keeps its region on
//! the left, so the walks partition the darts and exact Euler bookkeeping is
//! possible: a region of genus `g` with `b` walks, `p` punctures and `k`
//! cusps contributes `2(2 - 2g - b - p) - k` to twice the Euler
//! characteristic of the surface.

use std::collections::{BTreeMap, BTreeSet};

use crate::{Error, Result, Surface};

pub type BranchId = u32;
pub type SwitchId = u32;

/// One of the two sides of a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }

    pub fn from_index(i: usize) -> Side {
        if i == 0 {
            Side::A
        } else {
            Side::B
        }
    }
}

/// One of the two ends of a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EndId {
    pub branch: BranchId,
    pub end: u8,
}

impl EndId {
    pub fn new(branch: BranchId, end: u8) -> Self {
        debug_assert!(end < 2);
        EndId { branch, end }
    }

    /// The other end of the same branch.
    pub fn mate(self) -> Self {
        EndId { branch: self.branch, end: 1 - self.end }
    }
}

impl std::fmt::Display for EndId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "b{}.{}", self.branch, self.end)
    }
}

/// An oriented branch.  `forward` means the traversal from end 0 to end 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub branch: BranchId,
    pub forward: bool,
}

impl Dart {
    pub fn new(branch: BranchId, forward: bool) -> Self {
        Dart { branch, forward }
    }

    pub fn reversed(self) -> Self {
        Dart { branch: self.branch, forward: !self.forward }
    }

    /// The end the dart runs into.
    pub fn head(self) -> EndId {
        EndId::new(self.branch, if self.forward { 1 } else { 0 })
    }

    /// The end the dart leaves from.
    pub fn tail(self) -> EndId {
        EndId::new(self.branch, if self.forward { 0 } else { 1 })
    }

    /// The dart leaving a switch through the given end.
    pub fn leaving(end: EndId) -> Self {
        Dart { branch: end.branch, forward: end.end == 0 }
    }

    /// The dart arriving at a switch through the given end.
    pub fn arriving(end: EndId) -> Self {
        Dart { branch: end.branch, forward: end.end == 1 }
    }
}

impl std::fmt::Display for Dart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "b{}{}", self.branch, if self.forward { "+" } else { "-" })
    }
}

/// Where an end sits: switch, side, and position within the side list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Loc {
    pub switch: SwitchId,
    pub side: Side,
    pub index: usize,
}

/// The ordered sides of one switch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchData {
    pub sides: [Vec<EndId>; 2],
}

impl SwitchData {
    pub fn new(side_a: Vec<EndId>, side_b: Vec<EndId>) -> Self {
        SwitchData { sides: [side_a, side_b] }
    }

    pub fn side(&self, s: Side) -> &[EndId] {
        &self.sides[s.index()]
    }

    pub fn valence(&self) -> usize {
        self.sides[0].len() + self.sides[1].len()
    }

    /// Full counterclockwise cyclic order: side A in order, then side B.
    pub fn ccw_cycle(&self) -> Vec<EndId> {
        let mut c = self.sides[0].clone();
        c.extend_from_slice(&self.sides[1]);
        c
    }

    /// Number of cusps at this switch: same-side adjacencies.
    pub fn cusp_count(&self) -> usize {
        self.sides[0].len() + self.sides[1].len() - 2
    }
}

/// A cusp wedge between two counterclockwise-adjacent ends of one side.
/// `ccw` is the counterclockwise successor of `cw`; a boundary walk enters
/// the wedge along `ccw` and leaves along `cw`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cusp {
    pub switch: SwitchId,
    pub cw: EndId,
    pub ccw: EndId,
}

/// One boundary walk of a complementary region.  Darts are listed in order
/// with the region on the left; the rotation starts at the smallest dart.
/// `cusp_after[i]` records whether the corner between `darts[i]` and the next
/// dart is a cusp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub darts: Vec<Dart>,
    pub cusp_after: Vec<bool>,
}

impl Walk {
    pub fn anchor(&self) -> Dart {
        self.darts[0]
    }

    pub fn cusps(&self) -> usize {
        self.cusp_after.iter().filter(|c| **c).count()
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

/// A complementary region: genus, punctures inside it, and boundary walks
/// (indices into the track's walk list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub genus: u32,
    pub punctures: u32,
    pub walks: Vec<usize>,
    pub cusps: usize,
    /// `2 * chi0 - cusps` where `chi0 = 2 - 2 genus - walks - punctures`.
    pub doubled_chi: i64,
}

impl Region {
    /// A trigon: disc with three cusps.
    pub fn is_trigon(&self) -> bool {
        self.is_disc() && self.cusps == 3
    }

    /// A bigon: disc with two cusps.
    pub fn is_bigon(&self) -> bool {
        self.is_disc() && self.cusps == 2
    }

    pub fn is_disc(&self) -> bool {
        self.genus == 0 && self.punctures == 0 && self.walks.len() == 1
    }

    /// A once-punctured monogon: punctured disc with one cusp.
    pub fn is_punctured_monogon(&self) -> bool {
        self.genus == 0 && self.punctures == 1 && self.walks.len() == 1 && self.cusps == 1
    }
}

/// Whether bigon regions are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrackKind {
    Train,
    Bigon,
}

/// Classification of a branch by its two ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchClass {
    Large,
    Mixed,
    Small,
}

/// Region description used while building: any dart on each boundary walk,
/// plus the topology of the region.
#[derive(Debug, Clone)]
pub struct RegionSpec {
    pub anchors: Vec<Dart>,
    pub genus: u32,
    pub punctures: u32,
}

/// Mutable track under construction.  `freeze` validates and produces an
/// immutable [`TrainTrack`].
#[derive(Debug, Clone)]
pub struct TrackBuilder {
    pub surface: Surface,
    pub kind: TrackKind,
    pub switches: BTreeMap<SwitchId, SwitchData>,
    pub regions: Vec<RegionSpec>,
}

/// Record of smoothing away a bivalent switch: branch `gone` was absorbed
/// into branch `kept`.  The forward dart of `kept` now also covers the dart
/// of `gone` given by `gone_forward_under_kept_forward`.
#[derive(Debug, Clone, Copy)]
pub struct Smoothing {
    pub kept: BranchId,
    pub gone: BranchId,
    pub gone_forward_under_kept_forward: bool,
}

impl TrackBuilder {
    pub fn new(surface: Surface, kind: TrackKind) -> Self {
        TrackBuilder { surface, kind, switches: BTreeMap::new(), regions: Vec::new() }
    }

    pub fn add_switch(&mut self, id: SwitchId, side_a: Vec<EndId>, side_b: Vec<EndId>) {
        self.switches.insert(id, SwitchData::new(side_a, side_b));
    }

    pub fn next_switch_id(&self) -> SwitchId {
        self.switches.keys().next_back().map_or(0, |k| k + 1)
    }

    pub fn next_branch_id(&self) -> BranchId {
        self.switches
            .values()
            .flat_map(|s| s.sides.iter().flatten())
            .map(|e| e.branch)
            .max()
            .map_or(0, |b| b + 1)
    }

    pub fn add_region(&mut self, anchors: Vec<Dart>, genus: u32, punctures: u32) {
        self.regions.push(RegionSpec { anchors, genus, punctures });
    }

    pub fn set_regions(&mut self, regions: Vec<RegionSpec>) {
        self.regions = regions;
    }

    /// Locate an end by scanning the side lists.
    pub fn find_end(&self, end: EndId) -> Option<Loc> {
        for (&switch, data) in &self.switches {
            for (si, side) in data.sides.iter().enumerate() {
                if let Some(index) = side.iter().position(|e| *e == end) {
                    return Some(Loc { switch, side: Side::from_index(si), index });
                }
            }
        }
        None
    }

    /// Remove an end from whatever side list holds it.
    pub fn detach_end(&mut self, end: EndId) -> Result<Loc> {
        let loc = self
            .find_end(end)
            .ok_or_else(|| Error::InvalidMove(format!("end {end} is not attached")))?;
        self.switches.get_mut(&loc.switch).unwrap().sides[loc.side.index()].remove(loc.index);
        Ok(loc)
    }

    /// Insert an end into a side list at the given position.
    pub fn attach_end(&mut self, end: EndId, at: Loc) -> Result<()> {
        let data = self
            .switches
            .get_mut(&at.switch)
            .ok_or_else(|| Error::InvalidMove(format!("no switch {}", at.switch)))?;
        let side = &mut data.sides[at.side.index()];
        if at.index > side.len() {
            return Err(Error::InvalidMove(format!(
                "position {} out of range on switch {} side {:?}",
                at.index, at.switch, at.side
            )));
        }
        side.insert(at.index, end);
        Ok(())
    }

    /// Delete a branch, removing both ends from their side lists.
    pub fn delete_branch(&mut self, branch: BranchId) -> Result<()> {
        self.detach_end(EndId::new(branch, 0))?;
        self.detach_end(EndId::new(branch, 1))?;
        Ok(())
    }

    /// Subdivide a branch by a new bivalent switch.  The end-0 half keeps the
    /// branch id; the end-1 half becomes a new branch running from the new
    /// switch to the old end-1 position.  Returns (new switch, new branch).
    pub fn subdivide_branch(&mut self, branch: BranchId) -> Result<(SwitchId, BranchId)> {
        let new_switch = self.next_switch_id();
        let new_branch = self.next_branch_id();
        let old_end = EndId::new(branch, 1);
        let loc = self
            .find_end(old_end)
            .ok_or_else(|| Error::InvalidMove(format!("end {old_end} is not attached")))?;
        self.switches.get_mut(&loc.switch).unwrap().sides[loc.side.index()][loc.index] =
            EndId::new(new_branch, 1);
        self.add_switch(
            new_switch,
            vec![EndId::new(branch, 1)],
            vec![EndId::new(new_branch, 0)],
        );
        Ok((new_switch, new_branch))
    }

    /// Smooth away a bivalent switch by merging its two branches.  The branch
    /// with the smaller id survives.  Returns `None` (and leaves the switch
    /// alone) when the two ends belong to one branch, which happens exactly on
    /// a one-switch circle component.
    pub fn smooth_bivalent(&mut self, switch: SwitchId) -> Result<Option<Smoothing>> {
        let data = self
            .switches
            .get(&switch)
            .ok_or_else(|| Error::InvalidMove(format!("no switch {switch}")))?;
        if data.sides[0].len() != 1 || data.sides[1].len() != 1 {
            return Err(Error::InvalidMove(format!("switch {switch} is not bivalent")));
        }
        let x = data.sides[0][0];
        let y = data.sides[1][0];
        if x.branch == y.branch {
            return Ok(None);
        }
        let (kept_near, gone_near) = if x.branch < y.branch { (x, y) } else { (y, x) };
        let kept = kept_near.branch;
        let gone = gone_near.branch;
        let gone_far = gone_near.mate();
        let far_loc = self
            .find_end(gone_far)
            .ok_or_else(|| Error::InvalidMove(format!("end {gone_far} is not attached")))?;
        // The freed near end of the kept branch takes over the far slot of
        // the vanished branch.
        self.switches.get_mut(&far_loc.switch).unwrap().sides[far_loc.side.index()]
            [far_loc.index] = kept_near;
        self.switches.remove(&switch);
        // Forward on the kept branch runs from its untouched far end through
        // the old switch onto the vanished branch towards that branch's far
        // end.  It covers the vanished branch's near-to-far traversal when
        // the kept branch's near end is end 1.
        let forward_covers = if kept_near.end == 1 {
            gone_near.end == 0
        } else {
            gone_near.end == 1
        };
        Ok(Some(Smoothing { kept, gone, gone_forward_under_kept_forward: forward_covers }))
    }

    /// End locations, validating that every mentioned branch has exactly its
    /// two ends placed, each exactly once.
    pub fn end_locations(&self) -> Result<BTreeMap<EndId, Loc>> {
        let mut locs = BTreeMap::new();
        for (&switch, data) in &self.switches {
            for (si, side) in data.sides.iter().enumerate() {
                for (index, &end) in side.iter().enumerate() {
                    let loc = Loc { switch, side: Side::from_index(si), index };
                    if locs.insert(end, loc).is_some() {
                        return Err(Error::InvalidTrack(format!("end {end} placed twice")));
                    }
                }
            }
        }
        let branches: BTreeSet<BranchId> = locs.keys().map(|e| e.branch).collect();
        for b in branches {
            for end in [EndId::new(b, 0), EndId::new(b, 1)] {
                if !locs.contains_key(&end) {
                    return Err(Error::InvalidTrack(format!("end {end} is missing")));
                }
            }
        }
        Ok(locs)
    }

    /// Compute the boundary walks without region data.  Validates the branch
    /// end pairing and that no side is empty.
    pub fn compute_walks(&self) -> Result<Vec<Walk>> {
        let locs = self.end_locations()?;
        if locs.is_empty() {
            return Err(Error::InvalidTrack("track has no branches".into()));
        }
        for (&switch, data) in &self.switches {
            if data.sides[0].is_empty() || data.sides[1].is_empty() {
                return Err(Error::InvalidTrack(format!("switch {switch} has an empty side")));
            }
        }
        let cycles: BTreeMap<SwitchId, Vec<EndId>> =
            self.switches.iter().map(|(&v, d)| (v, d.ccw_cycle())).collect();
        let positions: BTreeMap<EndId, (SwitchId, usize)> = cycles
            .iter()
            .flat_map(|(&v, c)| c.iter().enumerate().map(move |(i, &e)| (e, (v, i))))
            .collect();

        let step = |d: Dart| -> (Dart, bool) {
            let head = d.head();
            let (v, i) = positions[&head];
            let cycle = &cycles[&v];
            let prev = cycle[(i + cycle.len() - 1) % cycle.len()];
            let cusp = locs[&head].side == locs[&prev].side;
            (Dart::leaving(prev), cusp)
        };

        let mut all_darts: Vec<Dart> = locs
            .keys()
            .filter(|e| e.end == 0)
            .flat_map(|e| [Dart::new(e.branch, true), Dart::new(e.branch, false)])
            .collect();
        all_darts.sort();
        let mut seen: BTreeSet<Dart> = BTreeSet::new();
        let mut walks = Vec::new();
        for &start in &all_darts {
            if seen.contains(&start) {
                continue;
            }
            let mut darts = Vec::new();
            let mut cusp_after = Vec::new();
            let mut d = start;
            loop {
                seen.insert(d);
                let (next, cusp) = step(d);
                darts.push(d);
                cusp_after.push(cusp);
                d = next;
                if d == start {
                    break;
                }
                if seen.contains(&d) {
                    return Err(Error::Internal(format!(
                        "walk from {start} re-entered at {d} without closing"
                    )));
                }
            }
            walks.push(Walk { darts, cusp_after });
        }
        Ok(walks)
    }

    /// Validate everything and produce the immutable track.
    pub fn freeze(&self) -> Result<TrainTrack> {
        let end_loc = self.end_locations()?;
        let walks = self.compute_walks()?;

        let walk_of_dart: BTreeMap<Dart, usize> = walks
            .iter()
            .enumerate()
            .flat_map(|(wi, w)| w.darts.iter().map(move |&d| (d, wi)))
            .collect();

        let mut region_of_walk = vec![usize::MAX; walks.len()];
        let mut regions = Vec::new();
        for (ri, spec) in self.regions.iter().enumerate() {
            if spec.anchors.is_empty() {
                return Err(Error::InvalidTrack(format!("region {ri} has no anchors")));
            }
            let mut walk_ids = Vec::new();
            for anchor in &spec.anchors {
                let wi = *walk_of_dart.get(anchor).ok_or_else(|| {
                    Error::InvalidTrack(format!("region anchor {anchor} is not a dart"))
                })?;
                if region_of_walk[wi] != usize::MAX {
                    return Err(Error::InvalidTrack(format!(
                        "walk at {} claimed twice",
                        walks[wi].anchor()
                    )));
                }
                region_of_walk[wi] = ri;
                walk_ids.push(wi);
            }
            walk_ids.sort_unstable();
            let cusps: usize = walk_ids.iter().map(|&wi| walks[wi].cusps()).sum();
            let chi0 = 2 - 2 * spec.genus as i64 - walk_ids.len() as i64 - spec.punctures as i64;
            regions.push(Region {
                genus: spec.genus,
                punctures: spec.punctures,
                walks: walk_ids,
                cusps,
                doubled_chi: 2 * chi0 - cusps as i64,
            });
        }
        for (wi, &ri) in region_of_walk.iter().enumerate() {
            if ri == usize::MAX {
                return Err(Error::InvalidTrack(format!(
                    "walk at {} belongs to no region",
                    walks[wi].anchor()
                )));
            }
        }

        for (ri, region) in regions.iter().enumerate() {
            let legal = region.doubled_chi < 0
                || (self.kind == TrackKind::Bigon && region.is_bigon());
            if !legal {
                return Err(Error::InvalidTrack(format!(
                    "region {ri} (genus {}, punctures {}, {} walks, {} cusps) is not allowed",
                    region.genus,
                    region.punctures,
                    region.walks.len(),
                    region.cusps
                )));
            }
        }

        let sum: i64 = regions.iter().map(|r| r.doubled_chi).sum();
        if sum != self.surface.euler_doubled() {
            return Err(Error::InvalidTrack(format!(
                "regions sum to doubled Euler characteristic {sum}, surface {} needs {}",
                self.surface,
                self.surface.euler_doubled()
            )));
        }
        let punctures: u32 = regions.iter().map(|r| r.punctures).sum();
        if punctures != self.surface.punctures() {
            return Err(Error::InvalidTrack(format!(
                "regions contain {punctures} punctures, surface {} has {}",
                self.surface,
                self.surface.punctures()
            )));
        }

        let track = TrainTrack {
            surface: self.surface,
            kind: self.kind,
            switches: self.switches.clone(),
            end_loc,
            walks,
            walk_of_dart,
            regions,
            region_of_walk,
        };
        track.check_bivalent_switches()?;
        track.check_connected_surface()?;
        Ok(track)
    }
}

/// An immutable, validated track.
#[derive(Debug, Clone)]
pub struct TrainTrack {
    surface: Surface,
    kind: TrackKind,
    switches: BTreeMap<SwitchId, SwitchData>,
    end_loc: BTreeMap<EndId, Loc>,
    walks: Vec<Walk>,
    walk_of_dart: BTreeMap<Dart, usize>,
    regions: Vec<Region>,
    region_of_walk: Vec<usize>,
}

impl TrainTrack {
    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn kind(&self) -> TrackKind {
        self.kind
    }

    pub fn switches(&self) -> impl Iterator<Item = (SwitchId, &SwitchData)> {
        self.switches.iter().map(|(&v, d)| (v, d))
    }

    pub fn switch(&self, v: SwitchId) -> &SwitchData {
        &self.switches[&v]
    }

    pub fn switch_ids(&self) -> impl Iterator<Item = SwitchId> + '_ {
        self.switches.keys().copied()
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn branch_ids(&self) -> impl Iterator<Item = BranchId> + '_ {
        self.end_loc.keys().filter(|e| e.end == 0).map(|e| e.branch)
    }

    pub fn branch_count(&self) -> usize {
        self.end_loc.len() / 2
    }

    pub fn has_branch(&self, b: BranchId) -> bool {
        self.end_loc.contains_key(&EndId::new(b, 0))
    }

    pub fn loc(&self, end: EndId) -> Loc {
        self.end_loc[&end]
    }

    pub fn try_loc(&self, end: EndId) -> Option<Loc> {
        self.end_loc.get(&end).copied()
    }

    pub fn ccw_cycle(&self, v: SwitchId) -> Vec<EndId> {
        self.switches[&v].ccw_cycle()
    }

    /// Counterclockwise successor of an end around its switch.
    pub fn next_ccw(&self, end: EndId) -> EndId {
        let cycle = self.ccw_cycle(self.loc(end).switch);
        let i = cycle.iter().position(|e| *e == end).unwrap();
        cycle[(i + 1) % cycle.len()]
    }

    /// Counterclockwise predecessor of an end around its switch.
    pub fn prev_ccw(&self, end: EndId) -> EndId {
        let cycle = self.ccw_cycle(self.loc(end).switch);
        let i = cycle.iter().position(|e| *e == end).unwrap();
        cycle[(i + cycle.len() - 1) % cycle.len()]
    }

    /// Following a region boundary: arrive through the head of `d`, leave
    /// through its counterclockwise predecessor.
    pub fn next_dart(&self, d: Dart) -> Dart {
        Dart::leaving(self.prev_ccw(d.head()))
    }

    pub fn walks(&self) -> &[Walk] {
        &self.walks
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn walk_of_dart(&self, d: Dart) -> usize {
        self.walk_of_dart[&d]
    }

    pub fn region_of_walk(&self, wi: usize) -> usize {
        self.region_of_walk[wi]
    }

    /// Region on the left of the dart.
    pub fn region_of_dart(&self, d: Dart) -> usize {
        self.region_of_walk[self.walk_of_dart[&d]]
    }

    /// An end is large when it is alone on its side: every train running
    /// through the switch traverses it.
    pub fn end_is_large(&self, end: EndId) -> bool {
        let loc = self.loc(end);
        self.switches[&loc.switch].sides[loc.side.index()].len() == 1
    }

    pub fn branch_class(&self, b: BranchId) -> BranchClass {
        let l0 = self.end_is_large(EndId::new(b, 0));
        let l1 = self.end_is_large(EndId::new(b, 1));
        match (l0, l1) {
            (true, true) => BranchClass::Large,
            (false, false) => BranchClass::Small,
            _ => BranchClass::Mixed,
        }
    }

    /// All switches have valence at most three.
    pub fn is_generic(&self) -> bool {
        self.switches.values().all(|s| s.valence() <= 3)
    }

    /// Maximal and generic: every switch trivalent or bivalent-on-a-circle,
    /// and every region a trigon or a once-punctured monogon.  This forces
    /// the maximal branch count.  Completeness additionally demands
    /// birecurrence; see the recurrence module.
    pub fn is_maximal_generic(&self) -> bool {
        self.is_generic()
            && self
                .regions
                .iter()
                .all(|r| r.is_trigon() || r.is_punctured_monogon())
    }

    pub fn cusps_at(&self, v: SwitchId) -> Vec<Cusp> {
        let data = &self.switches[&v];
        let mut cusps = Vec::new();
        for side in &data.sides {
            for pair in side.windows(2) {
                cusps.push(Cusp { switch: v, cw: pair[0], ccw: pair[1] });
            }
        }
        cusps
    }

    pub fn cusps(&self) -> Vec<Cusp> {
        self.switch_ids().flat_map(|v| self.cusps_at(v)).collect()
    }

    /// Connected components of the track, as branch sets.
    pub fn components(&self) -> Vec<BTreeSet<BranchId>> {
        let mut comp: BTreeMap<SwitchId, usize> = BTreeMap::new();
        let mut reps: Vec<SwitchId> = Vec::new();
        let mut stack = Vec::new();
        for v in self.switch_ids() {
            if comp.contains_key(&v) {
                continue;
            }
            let c = reps.len();
            reps.push(v);
            stack.push(v);
            comp.insert(v, c);
            while let Some(u) = stack.pop() {
                for &end in self.switches[&u].ccw_cycle().iter() {
                    let other = self.loc(end.mate()).switch;
                    if let std::collections::btree_map::Entry::Vacant(e) = comp.entry(other) {
                        e.insert(c);
                        stack.push(other);
                    }
                }
            }
        }
        let mut out = vec![BTreeSet::new(); reps.len()];
        for b in self.branch_ids() {
            let v = self.loc(EndId::new(b, 0)).switch;
            out[comp[&v]].insert(b);
        }
        out
    }

    /// A component is a closed curve when all its switches are bivalent.
    pub fn component_is_circle(&self, branches: &BTreeSet<BranchId>) -> bool {
        branches.iter().all(|&b| {
            [0, 1].into_iter().all(|e| {
                self.switches[&self.loc(EndId::new(b, e)).switch].valence() == 2
            })
        })
    }

    /// Equality on the nose: same labels, same wiring, same region data.
    /// Walk and region list order is ignored; what must agree is which
    /// region each dart borders and what that region looks like.
    pub fn same_as(&self, other: &TrainTrack) -> bool {
        if self.surface != other.surface
            || self.kind != other.kind
            || self.switches != other.switches
        {
            return false;
        }
        self.walk_of_dart.keys().all(|&d| {
            let a = &self.regions[self.region_of_dart(d)];
            let b = &other.regions[other.region_of_dart(d)];
            (a.genus, a.punctures, a.walks.len(), a.cusps)
                == (b.genus, b.punctures, b.walks.len(), b.cusps)
        })
    }

    /// Consecutive darts must enter and leave through opposite sides.
    pub fn is_trainpath(&self, darts: &[Dart]) -> bool {
        if darts.is_empty() {
            return false;
        }
        darts.windows(2).all(|pair| {
            let head = self.loc(pair[0].head());
            let tail = self.loc(pair[1].tail());
            head.switch == tail.switch && head.side != tail.side
        })
    }

    pub fn to_builder(&self) -> TrackBuilder {
        TrackBuilder {
            surface: self.surface,
            kind: self.kind,
            switches: self.switches.clone(),
            regions: self
                .regions
                .iter()
                .map(|r| RegionSpec {
                    anchors: r.walks.iter().map(|&wi| self.walks[wi].anchor()).collect(),
                    genus: r.genus,
                    punctures: r.punctures,
                })
                .collect(),
        }
    }

    fn check_bivalent_switches(&self) -> Result<()> {
        let components = self.components();
        for v in self.switch_ids() {
            if self.switches[&v].valence() == 2 {
                let b = self.switches[&v].sides[0][0].branch;
                let comp = components.iter().find(|c| c.contains(&b)).unwrap();
                if !self.component_is_circle(comp) {
                    return Err(Error::InvalidTrack(format!(
                        "bivalent switch {v} sits on a component that is not a closed curve"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_connected_surface(&self) -> Result<()> {
        // Track components are glued into one surface through shared regions.
        let components = self.components();
        if components.len() <= 1 {
            return Ok(());
        }
        let comp_of_branch: BTreeMap<BranchId, usize> = components
            .iter()
            .enumerate()
            .flat_map(|(ci, c)| c.iter().map(move |&b| (b, ci)))
            .collect();
        let mut parent: Vec<usize> = (0..components.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for region in &self.regions {
            let mut first: Option<usize> = None;
            for &wi in &region.walks {
                for d in &self.walks[wi].darts {
                    let c = comp_of_branch[&d.branch];
                    match first {
                        None => first = Some(c),
                        Some(f) => {
                            let (a, b) = (find(&mut parent, f), find(&mut parent, c));
                            if a != b {
                                parent[a] = b;
                            }
                        }
                    }
                }
            }
        }
        let root = find(&mut parent, 0);
        for i in 1..components.len() {
            if find(&mut parent, i) != root {
                return Err(Error::InvalidTrack(
                    "track and regions do not assemble into a connected surface".into(),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_on_torus() -> TrainTrack {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(0, 1)]);
        b.add_region(vec![Dart::new(0, true), Dart::new(0, false)], 0, 1);
        b.freeze().unwrap()
    }

    #[test]
    fn circle_component_is_valid() {
        let t = circle_on_torus();
        assert_eq!(t.branch_count(), 1);
        assert_eq!(t.walks().len(), 2);
        assert_eq!(t.regions().len(), 1);
        assert_eq!(t.regions()[0].doubled_chi, -2);
        assert!(t.component_is_circle(&t.components()[0]));
        assert!(!t.is_maximal_generic());
    }

    #[test]
    fn missing_end_is_rejected() {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(1, 0)]);
        assert!(matches!(b.freeze(), Err(Error::InvalidTrack(_))));
    }

    #[test]
    fn wrong_region_topology_is_rejected() {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(0, 1)]);
        b.add_region(vec![Dart::new(0, true), Dart::new(0, false)], 1, 1);
        assert!(matches!(b.freeze(), Err(Error::InvalidTrack(_))));
    }

    #[test]
    fn uncovered_walk_is_rejected() {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(0, 1)]);
        b.add_region(vec![Dart::new(0, true)], 0, 1);
        assert!(matches!(b.freeze(), Err(Error::InvalidTrack(_))));
    }

    #[test]
    fn subdivide_and_smooth_round_trip() {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(0, 1)]);
        let (s, nb) = b.subdivide_branch(0).unwrap();
        assert_eq!((s, nb), (1, 1));
        // Circle now has two switches; both walks are smooth.
        b.regions.clear();
        b.add_region(vec![Dart::new(0, true), Dart::new(0, false)], 0, 1);
        let t = b.freeze().unwrap();
        assert_eq!(t.branch_count(), 2);
        assert_eq!(t.switch_count(), 2);
        let mut b2 = t.to_builder();
        let sm = b2.smooth_bivalent(1).unwrap().unwrap();
        assert_eq!(sm.kept, 0);
        assert_eq!(sm.gone, 1);
        b2.regions.clear();
        b2.add_region(vec![Dart::new(0, true), Dart::new(0, false)], 0, 1);
        let t2 = b2.freeze().unwrap();
        assert_eq!(t2.branch_count(), 1);
    }
}
