//! Canonical forms for tracks, up to orientation-preserving isomorphism.
//!
//! A track is serialized from a sequence of starting darts, one per connected
//! component: darts are numbered in breadth-first discovery order, and each
//! dart contributes the view of its head switch (valence, how the
//! counterclockwise cycle splits into the two sides relative to the arriving
//! end, the number of its own reversal, and the numbers of the darts leaving
//! through the other ends).  Region
//! topology is appended once the whole numbering is known.  Since the view
//! never names a side, exchanging side labels leaves the code unchanged.  The
//! canonical code is the lexicographic minimum over all start sequences, so
//! it is independent of branch and switch labels even for disconnected
//! tracks; matching discovery numberings realize an isomorphism.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::track::{BranchId, Dart, TrackKind, TrainTrack};

/// Canonical code of a track.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Canonical {
    pub code: Vec<i64>,
}

/// Dart numbering realizing a code: `order[k]` is the dart numbered `k`.
#[derive(Debug, Clone)]
pub struct Numbering {
    pub order: Vec<Dart>,
}

impl Numbering {
    pub fn number_of(&self, d: Dart) -> Option<usize> {
        self.order.iter().position(|x| *x == d)
    }

    /// Branches in first-appearance order of their darts.
    pub fn branch_order(&self) -> Vec<BranchId> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for d in &self.order {
            if seen.insert(d.branch) {
                out.push(d.branch);
            }
        }
        out
    }
}

struct Serializer<'a> {
    track: &'a TrainTrack,
    number: BTreeMap<Dart, usize>,
    order: Vec<Dart>,
    code: Vec<i64>,
}

impl<'a> Serializer<'a> {
    fn new(track: &'a TrainTrack) -> Self {
        Serializer { track, number: BTreeMap::new(), order: Vec::new(), code: Vec::new() }
    }

    fn assign(&mut self, d: Dart, queue: &mut VecDeque<Dart>) -> usize {
        if let Some(&n) = self.number.get(&d) {
            n
        } else {
            let n = self.order.len();
            self.number.insert(d, n);
            self.order.push(d);
            queue.push_back(d);
            n
        }
    }

    fn run_component(&mut self, start: Dart) {
        let mut queue = VecDeque::new();
        self.assign(start, &mut queue);
        while let Some(d) = queue.pop_front() {
            let x = d.head();
            let loc = self.track.loc(x);
            let cycle = self.track.ccw_cycle(loc.switch);
            let n = cycle.len();
            let pos = cycle.iter().position(|e| *e == x).unwrap();
            let my_side = loc.side;
            let mut ccw_after = 0usize;
            while ccw_after + 1 < n
                && self.track.loc(cycle[(pos + 1 + ccw_after) % n]).side == my_side
            {
                ccw_after += 1;
            }
            let side_size = self.track.switch(loc.switch).sides[my_side.index()].len();
            self.code.push(n as i64);
            self.code.push(side_size as i64);
            self.code.push(ccw_after as i64);
            let rev = self.assign(d.reversed(), &mut queue);
            self.code.push(rev as i64);
            for j in 1..n {
                let e = cycle[(pos + j) % n];
                let partner = self.assign(Dart::leaving(e), &mut queue);
                self.code.push(partner as i64);
            }
        }
    }

    fn finish(mut self) -> (Vec<i64>, Numbering) {
        let mut region_codes: Vec<Vec<i64>> = self
            .track
            .regions()
            .iter()
            .map(|r| {
                let mut walk_ids: Vec<i64> = r
                    .walks
                    .iter()
                    .map(|&wi| {
                        self.track.walks()[wi]
                            .darts
                            .iter()
                            .map(|d| self.number[d] as i64)
                            .min()
                            .unwrap()
                    })
                    .collect();
                walk_ids.sort_unstable();
                let mut rc = vec![r.genus as i64, r.punctures as i64, walk_ids.len() as i64];
                rc.extend(walk_ids);
                rc
            })
            .collect();
        region_codes.sort();
        self.code.push(-2);
        for rc in region_codes {
            self.code.extend(rc);
            self.code.push(-3);
        }
        (self.code, Numbering { order: self.order })
    }
}

fn serialize(track: &TrainTrack, starts: &[Dart]) -> (Vec<i64>, Numbering) {
    let mut s = Serializer::new(track);
    for (i, &start) in starts.iter().enumerate() {
        if i > 0 {
            s.code.push(-1);
        }
        s.run_component(start);
    }
    s.finish()
}

fn header(track: &TrainTrack) -> Vec<i64> {
    vec![
        track.surface().genus() as i64,
        track.surface().punctures() as i64,
        match track.kind() {
            TrackKind::Train => 0,
            TrackKind::Bigon => 1,
        },
        track.branch_count() as i64,
        track.switch_count() as i64,
    ]
}

/// Canonical code together with every numbering that achieves it (one per
/// automorphism of the track).
pub fn canonical_with_certificates(track: &TrainTrack) -> (Canonical, Vec<Numbering>) {
    let components = track.components();
    let comp_darts: Vec<Vec<Dart>> = components
        .iter()
        .map(|c| c.iter().flat_map(|&b| [Dart::new(b, true), Dart::new(b, false)]).collect())
        .collect();

    let mut best: Option<(Vec<i64>, Vec<Numbering>)> = None;
    let mut starts: Vec<Dart> = Vec::new();
    let mut used = vec![false; components.len()];

    fn rec(
        track: &TrainTrack,
        comp_darts: &[Vec<Dart>],
        used: &mut [bool],
        starts: &mut Vec<Dart>,
        best: &mut Option<(Vec<i64>, Vec<Numbering>)>,
    ) {
        if starts.len() == comp_darts.len() {
            let (code, numbering) = serialize(track, starts);
            match best {
                None => *best = Some((code, vec![numbering])),
                Some((bc, certs)) => {
                    if code < *bc {
                        *bc = code;
                        *certs = vec![numbering];
                    } else if code == *bc {
                        certs.push(numbering);
                    }
                }
            }
            return;
        }
        for ci in 0..comp_darts.len() {
            if used[ci] {
                continue;
            }
            used[ci] = true;
            for &d in &comp_darts[ci] {
                starts.push(d);
                rec(track, comp_darts, used, starts, best);
                starts.pop();
            }
            used[ci] = false;
        }
    }
    rec(track, &comp_darts, &mut used, &mut starts, &mut best);

    let (body, certs) = best.expect("track has at least one branch");
    let mut code = header(track);
    code.extend(body);
    (Canonical { code }, certs)
}

pub fn canonical(track: &TrainTrack) -> Canonical {
    canonical_with_certificates(track).0
}

pub fn isomorphic(a: &TrainTrack, b: &TrainTrack) -> bool {
    canonical(a) == canonical(b)
}

/// An isomorphism as a branch-to-branch map, when one exists.
pub fn isomorphism(a: &TrainTrack, b: &TrainTrack) -> Option<BTreeMap<BranchId, BranchId>> {
    let (ca, certs_a) = canonical_with_certificates(a);
    let (cb, certs_b) = canonical_with_certificates(b);
    if ca != cb {
        return None;
    }
    let na = &certs_a[0];
    let nb = &certs_b[0];
    let mut map = BTreeMap::new();
    for (da, db) in na.order.iter().zip(nb.order.iter()) {
        map.insert(da.branch, db.branch);
    }
    Some(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Surface;
    use crate::track::{EndId, TrackBuilder, TrackKind};

    fn circle(ids: (u32, u32)) -> TrainTrack {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        let (sw, br) = ids;
        b.add_switch(sw, vec![EndId::new(br, 0)], vec![EndId::new(br, 1)]);
        b.add_region(vec![Dart::new(br, true), Dart::new(br, false)], 0, 1);
        b.freeze().unwrap()
    }

    #[test]
    fn relabeled_circles_are_isomorphic() {
        let t1 = circle((0, 0));
        let t2 = circle((7, 3));
        assert!(isomorphic(&t1, &t2));
        let map = isomorphism(&t1, &t2).unwrap();
        assert_eq!(map[&0], 3);
    }

    #[test]
    fn side_swap_is_invisible() {
        let surface = Surface::new(1, 1).unwrap();
        let mut b = TrackBuilder::new(surface, TrackKind::Train);
        b.add_switch(0, vec![EndId::new(0, 1)], vec![EndId::new(0, 0)]);
        b.add_region(vec![Dart::new(0, true), Dart::new(0, false)], 0, 1);
        let swapped = b.freeze().unwrap();
        assert!(isomorphic(&circle((0, 0)), &swapped));
    }

    #[test]
    fn disjoint_circles_canonicalize_without_labels() {
        let surface = Surface::new(0, 5).unwrap();
        // Two disjoint circles cutting off two punctures each; the middle
        // annulus keeps the fifth.  Swapping ids must not change the code.
        let build = |first: u32| {
            let a = first;
            let b_id = 1 - first;
            let mut b = TrackBuilder::new(surface, TrackKind::Train);
            b.add_switch(0, vec![EndId::new(a, 0)], vec![EndId::new(a, 1)]);
            b.add_switch(1, vec![EndId::new(b_id, 0)], vec![EndId::new(b_id, 1)]);
            b.add_region(vec![Dart::new(a, true)], 0, 2);
            b.add_region(vec![Dart::new(a, false), Dart::new(b_id, true)], 0, 1);
            b.add_region(vec![Dart::new(b_id, false)], 0, 2);
            b.freeze().unwrap()
        };
        let t1 = build(0);
        let t2 = build(1);
        assert!(isomorphic(&t1, &t2));
    }
}
