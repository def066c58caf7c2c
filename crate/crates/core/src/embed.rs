//! Subtracks and subtrack embeddings.
//!
//! A subtrack arises from a subset of branches by restricting every switch
//! to the surviving ends and smoothing away the bivalent switches that are
//! not circle components.  The embedding certificate records where each
//! switch went and which dart path of the ambient track each branch
//! traverses; `find_embedding` searches for such a certificate between two
//! independently given tracks.

use std::collections::{BTreeMap, BTreeSet};

use crate::canonical;
use crate::track::{BranchId, Dart, EndId, RegionSpec, SwitchId, TrackBuilder, TrainTrack};
use crate::{Error, Result};

/// Certificate that one track sits inside another: switches map injectively,
/// and every branch maps to a smooth dart path of the ambient track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtrackEmbedding {
    pub switch_map: BTreeMap<SwitchId, SwitchId>,
    pub branch_paths: BTreeMap<BranchId, Vec<Dart>>,
}

impl SubtrackEmbedding {
    /// The ambient branches used by the embedding.
    pub fn used_branches(&self) -> BTreeSet<BranchId> {
        self.branch_paths.values().flatten().map(|d| d.branch).collect()
    }

    /// The ambient end a subtrack end lands on.
    pub fn end_image(&self, end: EndId) -> Option<EndId> {
        let path = self.branch_paths.get(&end.branch)?;
        Some(if end.end == 0 {
            path.first()?.reversed().head()
        } else {
            path.last()?.head()
        })
    }

    /// Check the certificate against both tracks: paths must be smooth,
    /// pairwise disjoint, respect the side structure at image switches, pass
    /// only through switches the subtrack has forgotten, and the restriction
    /// of the ambient track to the used branches must reproduce the subtrack
    /// up to isomorphism (which pins the complementary regions).
    pub fn verify(&self, sigma: &TrainTrack, tau: &TrainTrack) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidTrack(msg));
        if sigma.surface() != tau.surface() {
            return fail("subtrack lives on a different surface".into());
        }

        let sigma_switches: BTreeSet<SwitchId> = sigma.switch_ids().collect();
        if self.switch_map.keys().copied().collect::<BTreeSet<_>>() != sigma_switches {
            return fail("switch map does not cover the subtrack".into());
        }
        let tau_switches: BTreeSet<SwitchId> = tau.switch_ids().collect();
        let mut images = BTreeSet::new();
        for (&v, &img) in &self.switch_map {
            if !tau_switches.contains(&img) {
                return fail(format!("switch s{v} maps to missing switch s{img}"));
            }
            if !images.insert(img) {
                return fail(format!("two switches map to s{img}"));
            }
        }

        let sigma_branches: BTreeSet<BranchId> = sigma.branch_ids().collect();
        if self.branch_paths.keys().copied().collect::<BTreeSet<_>>() != sigma_branches {
            return fail("branch paths do not cover the subtrack".into());
        }

        let mut used_branch: BTreeSet<BranchId> = BTreeSet::new();
        let mut interior: BTreeSet<SwitchId> = BTreeSet::new();
        for (&b, path) in &self.branch_paths {
            if path.is_empty() {
                return fail(format!("branch b{b} has an empty path"));
            }
            for d in path {
                if tau.try_loc(d.head()).is_none() {
                    return fail(format!("path of b{b} uses a missing branch"));
                }
                if !used_branch.insert(d.branch) {
                    return fail(format!("two paths share branch b{}", d.branch));
                }
            }
            let tail = tau.loc(path[0].reversed().head()).switch;
            let head = tau.loc(path[path.len() - 1].head()).switch;
            if self.switch_map.get(&sigma.loc(EndId::new(b, 0)).switch) != Some(&tail) {
                return fail(format!("path of b{b} starts at the wrong switch"));
            }
            if self.switch_map.get(&sigma.loc(EndId::new(b, 1)).switch) != Some(&head) {
                return fail(format!("path of b{b} ends at the wrong switch"));
            }
            for pair in path.windows(2) {
                let arrive = pair[0].head();
                let depart = pair[1].reversed().head();
                let la = tau.loc(arrive);
                let ld = tau.loc(depart);
                if la.switch != ld.switch {
                    return fail(format!("path of b{b} is not connected"));
                }
                if la.side == ld.side {
                    return fail(format!("path of b{b} turns back at s{}", la.switch));
                }
                if images.contains(&la.switch) {
                    return fail(format!(
                        "path of b{b} passes through retained switch s{}",
                        la.switch
                    ));
                }
                if !interior.insert(la.switch) {
                    return fail(format!("two path interiors cross s{}", la.switch));
                }
            }
        }

        // Side structure: the images of one side's ends must appear in
        // order inside a single side of the image switch, with the two
        // sides landing on different sides.
        for (&v, &img) in &self.switch_map {
            let data = sigma.switch(v);
            let mut image_sides = [0usize; 2];
            for (si, side) in data.sides.iter().enumerate() {
                let ends: Vec<EndId> = side
                    .iter()
                    .map(|&e| self.end_image(e).ok_or_else(|| {
                        Error::InvalidTrack(format!("end {e} has no image"))
                    }))
                    .collect::<Result<_>>()?;
                let target = tau.switch(img);
                let on = [0, 1].into_iter().find(|&ti| {
                    is_subsequence(&ends, &target.sides[ti])
                });
                match on {
                    Some(ti) => image_sides[si] = ti,
                    None => {
                        return fail(format!(
                            "side of s{v} does not embed in order at s{img}"
                        ))
                    }
                }
            }
            if image_sides[0] == image_sides[1] {
                return fail(format!("both sides of s{v} land on one side of s{img}"));
            }
        }

        // The used subset must reproduce the subtrack.
        let (reconstructed, _) = subtrack(tau, &used_branch)?;
        if !canonical::isomorphic(&reconstructed, sigma) {
            return fail("used branches do not reconstruct the subtrack".into());
        }
        Ok(())
    }
}

fn is_subsequence(needle: &[EndId], hay: &[EndId]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

/// Restrict a track to a subset of branches and smooth the bivalent
/// switches this creates, keeping one switch per circle component.  Region
/// data is carried over exactly: deleting a branch merges its two flanking
/// regions and costs one unit of Euler characteristic.
pub fn subtrack(
    track: &TrainTrack,
    keep: &BTreeSet<BranchId>,
) -> Result<(TrainTrack, SubtrackEmbedding)> {
    if keep.is_empty() {
        return Err(Error::InvalidTrack("empty branch subset has no subtrack".into()));
    }
    for &b in keep {
        if !track.has_branch(b) {
            return Err(Error::InvalidTrack(format!("no branch b{b} to keep")));
        }
    }

    let mut builder = TrackBuilder::new(track.surface(), track.kind());
    for (v, data) in track.switches() {
        let filter = |side: &[EndId]| -> Vec<EndId> {
            side.iter().copied().filter(|e| keep.contains(&e.branch)).collect()
        };
        let a = filter(&data.sides[0]);
        let b = filter(&data.sides[1]);
        match (a.is_empty(), b.is_empty()) {
            (true, true) => {}
            (false, false) => builder.add_switch(v, a, b),
            _ => {
                return Err(Error::InvalidTrack(format!(
                    "subset leaves a one-sided stop at switch s{v}"
                )))
            }
        }
    }

    // Region classes: each deleted branch merges its two flanks.
    let nr = track.regions().len();
    let mut parent: Vec<usize> = (0..nr).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let deleted: Vec<BranchId> = track.branch_ids().filter(|b| !keep.contains(b)).collect();
    for &d in &deleted {
        let f1 = track.region_of_dart(Dart::new(d, true));
        let f2 = track.region_of_dart(Dart::new(d, false));
        let (r1, r2) = (find(&mut parent, f1), find(&mut parent, f2));
        if r1 != r2 {
            parent[r1] = r2;
        }
    }

    // Smooth bivalent switches, tracking the dart path each surviving
    // branch traverses in the ambient track.
    let mut paths: BTreeMap<BranchId, Vec<Dart>> =
        keep.iter().map(|&b| (b, vec![Dart::new(b, true)])).collect();
    let bivalent: Vec<SwitchId> = builder
        .switches
        .iter()
        .filter(|(_, d)| d.valence() == 2)
        .map(|(&v, _)| v)
        .collect();
    for v in bivalent {
        let data = match builder.switches.get(&v) {
            Some(d) if d.valence() == 2 => d,
            _ => continue,
        };
        let x = data.sides[0][0];
        let y = data.sides[1][0];
        if x.branch == y.branch {
            continue;
        }
        let kept_near = if x.branch < y.branch { x } else { y };
        let sm = builder
            .smooth_bivalent(v)?
            .ok_or_else(|| Error::Internal("expected a two-branch smoothing".into()))?;
        let gone_path = paths.remove(&sm.gone).expect("gone branch tracked");
        let oriented = if sm.gone_forward_under_kept_forward {
            gone_path
        } else {
            gone_path.into_iter().rev().map(Dart::reversed).collect()
        };
        let kept_path = paths.get_mut(&sm.kept).expect("kept branch tracked");
        if kept_near.end == 1 {
            kept_path.extend(oriented);
        } else {
            let mut joined = oriented;
            joined.extend(kept_path.iter().copied());
            *kept_path = joined;
        }
    }

    // Walks of the restricted track, pulled back to region classes.
    let walks = builder.compute_walks()?;
    let dart_expand = |d: Dart| -> Vec<Dart> {
        let path = &paths[&d.branch];
        if d.forward {
            path.clone()
        } else {
            path.iter().rev().map(|x| x.reversed()).collect()
        }
    };
    let mut class_walks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (wi, walk) in walks.iter().enumerate() {
        let first = dart_expand(walk.darts[0])[0];
        let class = find(&mut parent, track.region_of_dart(first));
        debug_assert!(walk.darts.iter().all(|&d| {
            dart_expand(d)
                .iter()
                .all(|&p| find(&mut parent.clone(), track.region_of_dart(p)) == class)
        }));
        class_walks.entry(class).or_default().push(wi);
    }

    let mut specs = Vec::new();
    for (class, wids) in &class_walks {
        let members: Vec<usize> =
            (0..nr).filter(|&ri| find(&mut parent, ri) == *class).collect();
        let punctures: u32 = members.iter().map(|&ri| track.regions()[ri].punctures).sum();
        let chi_old: i64 = members
            .iter()
            .map(|&ri| {
                let r = &track.regions()[ri];
                2 - 2 * r.genus as i64 - r.walks.len() as i64 - r.punctures as i64
            })
            .sum();
        let cost = deleted
            .iter()
            .filter(|&&d| {
                find(&mut parent, track.region_of_dart(Dart::new(d, true))) == *class
            })
            .count() as i64;
        let chi = chi_old - cost;
        let b = wids.len() as i64;
        let num = 2 - b - punctures as i64 - chi;
        if num < 0 || num % 2 != 0 {
            return Err(Error::Internal(format!(
                "deletion left impossible region data (chi {chi}, {b} walks)"
            )));
        }
        specs.push(RegionSpec {
            anchors: wids.iter().map(|&wi| walks[wi].anchor()).collect(),
            genus: (num / 2) as u32,
            punctures,
        });
    }
    builder.set_regions(specs);
    let out = builder.freeze()?;

    let switch_map = out.switch_ids().map(|v| (v, v)).collect();
    let embedding = SubtrackEmbedding { switch_map, branch_paths: paths };
    Ok((out, embedding))
}

struct Search<'a> {
    sigma: &'a TrainTrack,
    tau: &'a TrainTrack,
    order: Vec<BranchId>,
    budget: u64,
    steps: u64,
}

#[derive(Debug, Clone, Default)]
struct State {
    switch_map: BTreeMap<SwitchId, SwitchId>,
    images: BTreeSet<SwitchId>,
    used: BTreeSet<BranchId>,
    interior: BTreeSet<SwitchId>,
    paths: BTreeMap<BranchId, Vec<Dart>>,
}

impl<'a> Search<'a> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(Error::Budget(format!(
                "embedding search exceeded {} steps",
                self.budget
            )))
        } else {
            Ok(())
        }
    }

    fn run(&mut self, state: &mut State) -> Result<Option<SubtrackEmbedding>> {
        let Some(&b) = self.order.get(state.paths.len()) else {
            let cand = SubtrackEmbedding {
                switch_map: state.switch_map.clone(),
                branch_paths: state.paths.clone(),
            };
            return Ok(match cand.verify(self.sigma, self.tau) {
                Ok(()) => Some(cand),
                Err(Error::Budget(msg)) => return Err(Error::Budget(msg)),
                Err(_) => None,
            });
        };
        let v0 = self.sigma.loc(EndId::new(b, 0)).switch;
        let starts: Vec<(Dart, Option<SwitchId>)> = match state.switch_map.get(&v0) {
            Some(&img) => self
                .tau
                .switch(img)
                .ccw_cycle()
                .into_iter()
                .filter(|e| !state.used.contains(&e.branch))
                .map(|e| (Dart::leaving(e), None))
                .collect(),
            None => {
                let mut out = Vec::new();
                for w in self.tau.switch_ids() {
                    if state.images.contains(&w) || state.interior.contains(&w) {
                        continue;
                    }
                    for e in self.tau.switch(w).ccw_cycle() {
                        if !state.used.contains(&e.branch) {
                            out.push((Dart::leaving(e), Some(w)));
                        }
                    }
                }
                out
            }
        };
        for (d, claim) in starts {
            self.tick()?;
            if let Some(w) = claim {
                state.switch_map.insert(v0, w);
                state.images.insert(w);
            }
            let found = self.extend(state, b, vec![d])?;
            if let Some(w) = claim {
                state.switch_map.remove(&v0);
                state.images.remove(&w);
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn extend(
        &mut self,
        state: &mut State,
        b: BranchId,
        path: Vec<Dart>,
    ) -> Result<Option<SubtrackEmbedding>> {
        self.tick()?;
        let head = path[path.len() - 1].head();
        let at = self.tau.loc(head).switch;
        let v1 = self.sigma.loc(EndId::new(b, 1)).switch;

        // Option: stop here, making `at` the image of v1.
        let stop_ok = match state.switch_map.get(&v1) {
            Some(&img) => img == at,
            None => !state.images.contains(&at) && !state.interior.contains(&at),
        };
        if stop_ok {
            let claim = !state.switch_map.contains_key(&v1);
            if claim {
                state.switch_map.insert(v1, at);
                state.images.insert(at);
            }
            for d in &path {
                state.used.insert(d.branch);
            }
            state.paths.insert(b, path.clone());
            let found = self.run(state)?;
            state.paths.remove(&b);
            for d in &path {
                state.used.remove(&d.branch);
            }
            if claim {
                state.switch_map.remove(&v1);
                state.images.remove(&at);
            }
            if found.is_some() {
                return Ok(found);
            }
        }

        // Option: pass smoothly through `at`, if the subtrack forgot it.
        if !state.images.contains(&at) && !state.interior.contains(&at) {
            let my_side = self.tau.loc(head).side;
            let data = self.tau.switch(at);
            for &e in &data.sides[my_side.flip().index()] {
                if state.used.contains(&e.branch)
                    || path.iter().any(|d| d.branch == e.branch)
                {
                    continue;
                }
                state.interior.insert(at);
                let mut longer = path.clone();
                longer.push(Dart::leaving(e));
                let found = self.extend(state, b, longer)?;
                state.interior.remove(&at);
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        Ok(None)
    }
}

/// Search for an embedding of `sigma` into `tau`.  `Ok(None)` means none
/// exists; the budget bounds the number of search steps.
pub fn find_embedding(
    sigma: &TrainTrack,
    tau: &TrainTrack,
    budget: u64,
) -> Result<Option<SubtrackEmbedding>> {
    if sigma.surface() != tau.surface() || sigma.branch_count() > tau.branch_count() {
        return Ok(None);
    }
    let mut search = Search {
        sigma,
        tau,
        order: sigma.branch_ids().collect(),
        budget,
        steps: 0,
    };
    let mut state = State::default();
    search.run(&mut state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::theta;

    #[test]
    fn circle_subtrack_of_theta() {
        let t = theta();
        let keep: BTreeSet<BranchId> = [0, 1].into_iter().collect();
        let (sub, emb) = subtrack(&t, &keep).unwrap();
        assert_eq!(sub.branch_count(), 1);
        assert_eq!(sub.switch_count(), 1);
        // The surviving branch is the smaller id and traverses both kept
        // branches of the ambient track.
        assert_eq!(emb.branch_paths[&0].len(), 2);
        emb.verify(&sub, &t).unwrap();
        // Region check: the circle splits the punctures two and two.
        let p: Vec<u32> = sub.regions().iter().map(|r| r.punctures).collect();
        assert_eq!(p.iter().sum::<u32>(), 4);
    }

    #[test]
    fn one_sided_stop_is_rejected() {
        let t = theta();
        let keep: BTreeSet<BranchId> = [0].into_iter().collect();
        assert!(matches!(subtrack(&t, &keep), Err(Error::InvalidTrack(_))));
    }

    #[test]
    fn embedding_search_recovers_circle() {
        let t = theta();
        let keep: BTreeSet<BranchId> = [0, 2].into_iter().collect();
        let (sub, _) = subtrack(&t, &keep).unwrap();
        let emb = find_embedding(&sub, &t, 100_000).unwrap().unwrap();
        emb.verify(&sub, &t).unwrap();
        let used = emb.used_branches();
        // Either two-branch circle of the theta graph embeds it.
        assert_eq!(used.len(), 2);
        assert!(used.contains(&0));
    }

    #[test]
    fn no_embedding_into_smaller_track() {
        let t = theta();
        let keep: BTreeSet<BranchId> = [0, 1].into_iter().collect();
        let (sub, _) = subtrack(&t, &keep).unwrap();
        assert!(find_embedding(&t, &sub, 100_000).unwrap().is_none());
    }
}
