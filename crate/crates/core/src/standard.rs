//! Standard tracks assembled from pants decompositions.
//!
//! A pants decomposition cuts the surface into three-holed spheres along
//! disjoint curves.  Every curve gets a connector: a two-branch core circle
//! with one arm per side running to a fork that offers two stop slots to
//! the neighboring pants.  Every pants gets a model: a pairing of its stop
//! slots by switchless arcs.  Gluing arcs into slots yields a trivalent
//! track whose branch count is exactly six per curve, the complete-track
//! budget of the surface; which model and connector choices actually give
//! complete tracks is decided by the recurrence solver, not assumed.
//!
//! Twisting about a pants curve is a split at the large core branch chosen
//! so the core circle survives; connectors without a large core branch
//! cannot twist, and the opposite direction is obtained by rebuilding with
//! the reversed connector.

use std::collections::BTreeMap;

use crate::canonical;
use crate::measure::TransverseMeasure;
use crate::moves::{self, SplitDir};
use crate::recurrence;
use crate::surface::Surface;
use crate::track::{BranchId, Dart, EndId, SwitchId, TrackBuilder, TrackKind, TrainTrack};
use crate::word::{MoveWord, Step};
use crate::{rat, Error, Result};

/// A hole of a pants: `(pants index, hole index 0..3)`.
pub type HoleRef = (usize, u8);

/// Pants decomposition given by which holes each curve glues together.
/// Holes not referenced by any curve are punctures; within each pants the
/// glued holes must come first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PantsDecomposition {
    pants: usize,
    curves: Vec<[HoleRef; 2]>,
}

impl PantsDecomposition {
    pub fn new(pants: usize, curves: Vec<[HoleRef; 2]>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMarking(msg));
        if pants == 0 {
            return bad("a decomposition needs at least one pants".into());
        }
        let mut used: BTreeMap<HoleRef, usize> = BTreeMap::new();
        for (k, sides) in curves.iter().enumerate() {
            for &(p, h) in sides {
                if p >= pants || h >= 3 {
                    return bad(format!("curve {k} references missing hole {p}.{h}"));
                }
                if let Some(other) = used.insert((p, h), k) {
                    return bad(format!(
                        "hole {p}.{h} is glued by curves {other} and {k}"
                    ));
                }
            }
            if sides[0] == sides[1] {
                return bad(format!("curve {k} glues hole {:?} to itself", sides[0]));
            }
        }
        for p in 0..pants {
            let glued: Vec<bool> =
                (0..3).map(|h| used.contains_key(&(p, h))).collect();
            if let Some(first_gap) = glued.iter().position(|g| !g) {
                if glued[first_gap..].iter().any(|g| *g) {
                    return bad(format!(
                        "pants {p}: glued holes must precede punctures"
                    ));
                }
            }
            if glued.iter().all(|g| !g) && pants > 1 {
                return bad(format!("pants {p} is disconnected from the curves"));
            }
        }
        let d = PantsDecomposition { pants, curves };
        // The pants graph must be connected and the counts must describe a
        // real surface; Surface::new enforces 3g-3+m >= 1.
        d.check_connected()?;
        d.surface()?;
        Ok(d)
    }

    fn check_connected(&self) -> Result<()> {
        let mut seen = vec![false; self.pants];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for sides in &self.curves {
                let [a, b] = [sides[0].0, sides[1].0];
                for (x, y) in [(a, b), (b, a)] {
                    if x == p && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if seen.iter().all(|s| *s) {
            Ok(())
        } else {
            Err(Error::InvalidMarking("pants graph is disconnected".into()))
        }
    }

    pub fn pants_count(&self) -> usize {
        self.pants
    }

    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }

    pub fn curves(&self) -> &[[HoleRef; 2]] {
        &self.curves
    }

    /// Number of glued holes of one pants.
    pub fn glued_holes(&self, p: usize) -> u8 {
        (0..3)
            .filter(|&h| {
                self.curves.iter().any(|s| s.contains(&(p, h)))
            })
            .count() as u8
    }

    pub fn punctures_in(&self, p: usize) -> u8 {
        3 - self.glued_holes(p)
    }

    /// The glued surface: each pants has Euler characteristic -1, punctures
    /// are the unglued holes.
    pub fn surface(&self) -> Result<Surface> {
        let p = self.pants as i64;
        let c = self.curves.len() as i64;
        let m = 3 * p - 2 * c;
        if m < 0 {
            return Err(Error::InvalidMarking("more curve sides than holes".into()));
        }
        let two_g = 2 - m + p;
        if two_g < 0 || two_g % 2 != 0 {
            return Err(Error::InvalidMarking(format!(
                "{p} pants and {c} curves do not close up ({two_g}/2 handles)"
            )));
        }
        Surface::new((two_g / 2) as u32, m as u32)
    }

    /// The curve side attached to a hole, if any.
    fn side_of_hole(&self, hole: HoleRef) -> Option<(usize, usize)> {
        for (k, sides) in self.curves.iter().enumerate() {
            for (s, &h) in sides.iter().enumerate() {
                if h == hole {
                    return Some((k, s));
                }
            }
        }
        None
    }
}

/// Marking: a decomposition with a model per pants, a connector per curve,
/// and a twist offset per curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkingData {
    pub decomposition: PantsDecomposition,
    pub models: Vec<u8>,
    pub connectors: Vec<u8>,
    pub offsets: Vec<i64>,
}

impl MarkingData {
    pub fn plain(decomposition: PantsDecomposition) -> MarkingData {
        let models = vec![0; decomposition.pants_count()];
        let connectors = vec![0; decomposition.curve_count()];
        let offsets = vec![0; decomposition.curve_count()];
        MarkingData { decomposition, models, connectors, offsets }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMarking(msg));
        let d = &self.decomposition;
        if self.models.len() != d.pants_count() {
            return bad("one model per pants required".into());
        }
        if self.connectors.len() != d.curve_count() || self.offsets.len() != d.curve_count()
        {
            return bad("one connector and offset per curve required".into());
        }
        for (p, &m) in self.models.iter().enumerate() {
            let allowed = model_count(d.punctures_in(p));
            if m >= allowed {
                return bad(format!(
                    "pants {p} with {} punctures has {allowed} models, got {m}",
                    d.punctures_in(p)
                ));
            }
        }
        for (k, &c) in self.connectors.iter().enumerate() {
            if c >= 4 {
                return bad(format!("curve {k}: connector must be 0..4, got {c}"));
            }
            if self.offsets[k] != 0 && !connector_twists(effective_connector(c, self.offsets[k]))
            {
                return bad(format!(
                    "curve {k}: connector {c} has no large core branch to twist"
                ));
            }
        }
        Ok(())
    }
}

/// Text format: `marking 1`, `pants <count>`, `curve <id> <p.h> <p.h>`,
/// `model <pants> <id>`, `connector <curve> <id>`, `offset <curve> <k>`.
pub fn write_marking(m: &MarkingData) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(out, "marking 1");
    let _ = writeln!(out, "pants {}", m.decomposition.pants_count());
    for (k, sides) in m.decomposition.curves().iter().enumerate() {
        let _ = writeln!(
            out,
            "curve {k} {}.{} {}.{}",
            sides[0].0, sides[0].1, sides[1].0, sides[1].1
        );
    }
    for (p, &model) in m.models.iter().enumerate() {
        let _ = writeln!(out, "model {p} {model}");
    }
    for (k, &c) in m.connectors.iter().enumerate() {
        let _ = writeln!(out, "connector {k} {c}");
    }
    for (k, &o) in m.offsets.iter().enumerate() {
        let _ = writeln!(out, "offset {k} {o}");
    }
    out
}

pub fn read_marking(text: &str) -> Result<MarkingData> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut pants: Option<usize> = None;
    let mut curves: Vec<(usize, [HoleRef; 2])> = Vec::new();
    let mut models: Vec<(usize, u8)> = Vec::new();
    let mut connectors: Vec<(usize, u8)> = Vec::new();
    let mut offsets: Vec<(usize, i64)> = Vec::new();
    let mut saw_header = false;
    let parse_hole = |line: usize, tok: &str| -> Result<HoleRef> {
        let (p, h) = tok
            .split_once('.')
            .ok_or_else(|| perr(line, format!("expected p.h, got {tok:?}")))?;
        Ok((
            p.parse().map_err(|_| perr(line, format!("bad pants index in {tok:?}")))?,
            h.parse().map_err(|_| perr(line, format!("bad hole index in {tok:?}")))?,
        ))
    };
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !saw_header {
            if tokens != ["marking", "1"] {
                return Err(perr(ln, "expected header `marking 1`".into()));
            }
            saw_header = true;
            continue;
        }
        let num = |j: usize| -> Result<usize> {
            tokens
                .get(j)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr(ln, "bad number".into()))
        };
        match tokens[0] {
            "pants" => pants = Some(num(1)?),
            "curve" => {
                if tokens.len() != 4 {
                    return Err(perr(ln, "curve line needs id and two holes".into()));
                }
                curves.push((num(1)?, [parse_hole(ln, tokens[2])?, parse_hole(ln, tokens[3])?]));
            }
            "model" => models.push((num(1)?, num(2)? as u8)),
            "connector" => connectors.push((num(1)?, num(2)? as u8)),
            "offset" => {
                let o = tokens
                    .get(2)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| perr(ln, "bad offset".into()))?;
                offsets.push((num(1)?, o));
            }
            other => return Err(perr(ln, format!("unrecognized line kind {other:?}"))),
        }
    }
    let pants = pants.ok_or_else(|| perr(1, "missing pants line".into()))?;
    let assemble = |mut items: Vec<(usize, HoleRef, HoleRef)>| -> Result<Vec<[HoleRef; 2]>> {
        items.sort_by_key(|x| x.0);
        for (i, item) in items.iter().enumerate() {
            if item.0 != i {
                return Err(Error::InvalidMarking(format!("curve ids must be 0..n, missing {i}")));
            }
        }
        Ok(items.into_iter().map(|(_, a, b)| [a, b]).collect())
    };
    let curves =
        assemble(curves.into_iter().map(|(k, [a, b])| (k, a, b)).collect())?;
    let decomposition = PantsDecomposition::new(pants, curves)?;
    let mut m = MarkingData::plain(decomposition);
    for (p, model) in models {
        *m.models.get_mut(p).ok_or_else(|| {
            Error::InvalidMarking(format!("model line for missing pants {p}"))
        })? = model;
    }
    for (k, c) in connectors {
        *m.connectors.get_mut(k).ok_or_else(|| {
            Error::InvalidMarking(format!("connector line for missing curve {k}"))
        })? = c;
    }
    for (k, o) in offsets {
        *m.offsets.get_mut(k).ok_or_else(|| {
            Error::InvalidMarking(format!("offset line for missing curve {k}"))
        })? = o;
    }
    m.validate()?;
    Ok(m)
}

/// Branch ids of a curve's core circle in the built track.
pub fn core_branches(curve: usize) -> [BranchId; 2] {
    [4 * curve as BranchId, 4 * curve as BranchId + 1]
}

fn connector_switches(curve: usize) -> [SwitchId; 4] {
    let base = 4 * curve as SwitchId;
    [base, base + 1, base + 2, base + 3]
}

/// Arm configurations of the four connectors: how each arm sits beside
/// the core at its switch.  Config 0 and 1 put the arm on the outgoing
/// core end's side (before or after it counterclockwise), 2 and 3 on the
/// incoming end's side.
const CONNECTORS: [(u8, u8); 4] = [(0, 0), (2, 0), (0, 2), (2, 2)];

fn connector_configs(variant: u8) -> (u8, u8) {
    if variant < 4 {
        CONNECTORS[variant as usize]
    } else {
        // Raw probe encoding used by development tests only.
        (((variant - 4) >> 2) & 3, (variant - 4) & 3)
    }
}

/// Whether a connector variant has a large core branch.  An arm beside the
/// outgoing core end leaves the incoming end alone on its side; when both
/// arms spare the same core branch it is large at both ends.
fn connector_twists(variant: u8) -> bool {
    let (a, b) = connector_configs(variant);
    (a < 2) == (b < 2)
}

/// Reversing a connector swaps both leans.
pub fn reversed_connector(variant: u8) -> u8 {
    3 - variant
}

fn effective_connector(variant: u8, offset: i64) -> u8 {
    if offset < 0 {
        reversed_connector(variant)
    } else {
        variant
    }
}

fn model_count(punctures: u8) -> u8 {
    match punctures {
        0 => 4,
        1 => 2,
        2 => 1,
        _ => 0,
    }
}

/// An internal edge of a pants model, between the leg switches of two
/// glued holes (or a loop at one of them).
struct EdgeSpec {
    from: u8,
    to: u8,
}

/// Where a model keeps its punctures: an anchor dart on one of its edges,
/// placed so the region left of the dart holds the puncture.
struct PunctureSpec {
    edge: usize,
    forward: bool,
}

/// Ribbon data of a leg switch: the leg end plus the two internal edge
/// ends `p, q` (in edge-list order, reversed by `swap`).  `alone` picks
/// which end sits on a side by itself out of the fixed cycle `[leg, p, q]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct LegShape {
    swap: bool,
    alone: u8,
}

const FAN: LegShape = LegShape { swap: false, alone: 0 };

struct ModelSpec {
    edges: Vec<EdgeSpec>,
    punctures: Vec<PunctureSpec>,
    legs: [LegShape; 3],
}

fn edge(from: u8, to: u8) -> EdgeSpec {
    EdgeSpec { from, to }
}

/// The model table.  Each glued hole owns one leg switch inside the
/// pants where the connector's arm ends; the model wires those switches
/// with one internal branch per hole.
fn model_spec(punctures: u8, model: u8) -> Result<ModelSpec> {
    let spec = match (punctures, model) {
        // Three glued holes: a triangle between the legs, or a loop at
        // one hole with a double edge between the other two.
        (0, 0) => ModelSpec {
            edges: vec![edge(0, 1), edge(1, 2), edge(2, 0)],
            punctures: vec![],
            legs: [FAN; 3],
        },
        (0, n @ 1..=3) => {
            let s = n - 1;
            let j = (s + 1) % 3;
            let k = (s + 2) % 3;
            ModelSpec {
                edges: vec![edge(s, s), edge(j, k), edge(j, k)],
                punctures: vec![],
                legs: [FAN; 3],
            }
        }
        // Two glued holes, one puncture: a double edge with the puncture
        // between the strands, or two loops with the puncture between.
        (1, 0) => ModelSpec {
            edges: vec![edge(0, 1), edge(0, 1)],
            punctures: vec![PunctureSpec { edge: 1, forward: true }],
            legs: [FAN; 3],
        },
        (1, 1) => ModelSpec {
            edges: vec![edge(0, 0), edge(1, 1)],
            punctures: vec![PunctureSpec { edge: 0, forward: false }],
            legs: [FAN; 3],
        },
        // One glued hole, two punctures: a loop separating them.
        (2, 0) => ModelSpec {
            edges: vec![edge(0, 0)],
            punctures: vec![
                PunctureSpec { edge: 0, forward: true },
                PunctureSpec { edge: 0, forward: false },
            ],
            legs: [FAN; 3],
        },
        _ => {
            return Err(Error::InvalidMarking(format!(
                "no model {model} for a pants with {punctures} punctures"
            )))
        }
    };
    Ok(spec)
}

/// Build the track of a marking.  Nonzero offsets twist after gluing; a
/// negative offset uses the reversed connector.
pub fn build_standard_track(m: &MarkingData) -> Result<TrainTrack> {
    let (builder, _) = assemble(m)?;
    let mut track = builder.freeze()?;
    for k in 0..m.decomposition.curve_count() {
        if m.offsets[k] != 0 {
            let (twisted, _) = twist(&track, core_branches(k)[0], m.offsets[k].abs())?;
            track = twisted;
        }
    }
    Ok(track)
}

fn assemble(m: &MarkingData) -> Result<(TrackBuilder, Vec<(Dart, u32)>)> {
    m.validate()?;
    assemble_with(m, &model_spec)
}

fn assemble_with(
    m: &MarkingData,
    spec_of: &dyn Fn(u8, u8) -> Result<ModelSpec>,
) -> Result<(TrackBuilder, Vec<(Dart, u32)>)> {
    let d = &m.decomposition;
    let surface = d.surface()?;
    let n_curves = d.curve_count();
    let mut builder = TrackBuilder::new(surface, TrackKind::Train);

    // Slot occupants: arcs register their ends here, forks read them back.
    let mut slots: BTreeMap<(usize, usize, u8), EndId> = BTreeMap::new();
    let mut combings: BTreeMap<(usize, usize), ForkShape> = BTreeMap::new();
    let mut next_arc: BranchId = 4 * n_curves as BranchId;
    let mut puncture_anchors: Vec<(Dart, u32)> = Vec::new();

    for p in 0..d.pants_count() {
        let spec = spec_of(d.punctures_in(p), m.models[p])?;
        let mut arc_ids = Vec::new();
        for a in &spec.arcs {
            let id = next_arc;
            next_arc += 1;
            arc_ids.push(id);
            for (end, &(h, s)) in [(0u8, &a.from), (1u8, &a.to)] {
                let (curve, side) = d.side_of_hole((p, h)).ok_or_else(|| {
                    Error::InvalidMarking(format!(
                        "model arc touches puncture hole {p}.{h}"
                    ))
                })?;
                if slots.insert((curve, side, s), EndId::new(id, end)).is_some() {
                    return Err(Error::InvalidMarking(format!(
                        "two arc ends claim slot {s} of curve {curve} side {side}"
                    )));
                }
                combings.insert((curve, side), spec.combing[h as usize]);
            }
        }
        for pu in &spec.punctures {
            puncture_anchors.push((Dart::new(arc_ids[pu.arc], pu.forward), 1));
        }
    }

    for k in 0..n_curves {
        let [c1, c2] = core_branches(k);
        let a1 = c1 + 2;
        let a2 = c1 + 3;
        let [v1, v2, f1, f2] = connector_switches(k);
        let variant = effective_connector(m.connectors[k], m.offsets[k]);
        let (cfg1, cfg2) = connector_configs(variant);
        // An arm sits beside one of the core ends, on either switch side
        // and in either counterclockwise position.
        let core_switch = |builder: &mut TrackBuilder,
                           v: SwitchId,
                           cfg: u8,
                           c_out: EndId,
                           c_in: EndId,
                           arm: EndId| {
            match cfg {
                0 => builder.add_switch(v, vec![c_out, arm], vec![c_in]),
                1 => builder.add_switch(v, vec![arm, c_out], vec![c_in]),
                2 => builder.add_switch(v, vec![c_out], vec![arm, c_in]),
                _ => builder.add_switch(v, vec![c_out], vec![c_in, arm]),
            }
        };
        core_switch(
            &mut builder,
            v1,
            cfg1,
            EndId::new(c1, 0),
            EndId::new(c2, 1),
            EndId::new(a1, 0),
        );
        core_switch(
            &mut builder,
            v2,
            cfg2,
            EndId::new(c1, 1),
            EndId::new(c2, 0),
            EndId::new(a2, 0),
        );
        let slot = |side: usize, s: u8| -> Result<EndId> {
            slots.get(&(k, side, s)).copied().ok_or_else(|| {
                Error::InvalidMarking(format!(
                    "curve {k} side {side} slot {s} was never filled"
                ))
            })
        };
        for (side, fork, arm) in [(0usize, f1, a1), (1usize, f2, a2)] {
            let shape = combings.get(&(k, side)).copied().unwrap_or(FAN);
            let arm_end = EndId::new(arm, 1);
            let (p, q) = if shape.swap {
                (slot(side, 1)?, slot(side, 0)?)
            } else {
                (slot(side, 0)?, slot(side, 1)?)
            };
            // Three side partitions of the fixed cycle [arm, p, q].
            match shape.alone {
                0 => builder.add_switch(fork, vec![arm_end], vec![p, q]),
                1 => builder.add_switch(fork, vec![arm_end, p], vec![q]),
                _ => builder.add_switch(fork, vec![q, arm_end], vec![p]),
            }
        }
    }

    // Regions: one disc per boundary walk, with the punctures the models
    // placed; anything else fails validation instead of being guessed.
    let walks = builder.compute_walks()?;
    let mut punctures_of_walk = vec![0u32; walks.len()];
    for (anchor, n) in &puncture_anchors {
        let wi = walks
            .iter()
            .position(|w| w.darts.contains(anchor))
            .ok_or_else(|| Error::Internal(format!("anchor {anchor} on no walk")))?;
        punctures_of_walk[wi] += n;
    }
    for (wi, walk) in walks.iter().enumerate() {
        builder.add_region(vec![walk.anchor()], 0, punctures_of_walk[wi]);
    }
    Ok((builder, puncture_anchors))
}

/// The counting measure of the pants curves: weight one on every core
/// branch of the untwisted standard track.
pub fn pants_curve_measure(d: &PantsDecomposition) -> TransverseMeasure {
    TransverseMeasure::from_weights(
        (0..d.curve_count()).flat_map(|k| core_branches(k).map(|b| (b, rat(1)))),
    )
}

/// Locate the twist site through one core branch: the partner branch that
/// completes a two-branch embedded smooth circle, and which of the two is
/// large.
fn twist_frame(track: &TrainTrack, b: BranchId) -> Result<(BranchId, BranchId)> {
    let not_core = || {
        Error::InvalidMove(format!(
            "branch b{b} is not part of a twistable core circle"
        ))
    };
    if !track.has_branch(b) {
        return Err(not_core());
    }
    let v0 = track.loc(EndId::new(b, 0)).switch;
    let v1 = track.loc(EndId::new(b, 1)).switch;
    if v0 == v1 {
        return Err(not_core());
    }
    let partner = track
        .branch_ids()
        .find(|&f| {
            f != b
                && track.loc(EndId::new(f, 0)).switch.min(track.loc(EndId::new(f, 1)).switch)
                    == v0.min(v1)
                && track.loc(EndId::new(f, 0)).switch.max(track.loc(EndId::new(f, 1)).switch)
                    == v0.max(v1)
                && {
                    // Smooth through both switches: opposite sides there.
                    let smooth = |v: SwitchId| {
                        let eb = [EndId::new(b, 0), EndId::new(b, 1)]
                            .into_iter()
                            .find(|&e| track.loc(e).switch == v)
                            .unwrap();
                        let ef = [EndId::new(f, 0), EndId::new(f, 1)]
                            .into_iter()
                            .find(|&e| track.loc(e).switch == v)
                            .unwrap();
                        track.loc(eb).side != track.loc(ef).side
                    };
                    smooth(v0) && smooth(v1)
                }
        })
        .ok_or_else(not_core)?;
    let large = [b, partner]
        .into_iter()
        .find(|&x| track.branch_class(x) == crate::track::BranchClass::Large)
        .ok_or_else(|| {
            Error::InvalidMove(format!(
                "core circle at b{b} has no large branch; rebuild with the reversed connector"
            ))
        })?;
    let small = if large == b { partner } else { b };
    Ok((large, small))
}

/// Twist `k` times about the core circle through branch `b`: repeated
/// splits at the large core branch, directed so the core survives.  The
/// connector's own direction is the positive one; ask for the mirror image
/// by rebuilding with the reversed connector.
pub fn twist(track: &TrainTrack, b: BranchId, k: i64) -> Result<(TrainTrack, MoveWord)> {
    if k < 0 {
        return Err(Error::InvalidMove(
            "negative twist: rebuild the marking with the reversed connector".into(),
        ));
    }
    let mut word = MoveWord::empty(track);
    // Validate the site even for the empty twist.
    let (mut large, mut small) = twist_frame(track, b)?;
    for _ in 0..k {
        let frame = moves::split_frame(&word.end, large)?;
        let dir = if [frame.a, frame.c].iter().any(|&e| e.branch == small) {
            SplitDir::Right
        } else if [frame.b, frame.d].iter().any(|&e| e.branch == small) {
            SplitDir::Left
        } else {
            return Err(Error::Internal(
                "core partner is not adjacent to the large branch".into(),
            ));
        };
        word.push(Step::Split(large, dir))?;
        let (l, s) = twist_frame(&word.end, large)?;
        large = l;
        small = s;
    }
    Ok((word.end.clone(), word))
}

/// One enumerated model and connector combination.
#[derive(Debug, Clone)]
pub struct Enumerated {
    pub marking: MarkingData,
    pub track: TrainTrack,
    pub complete: bool,
}

/// All model and connector combinations at offset zero, deduplicated by
/// canonical form, each with its completeness verdict.
pub fn enumerate_standard_tracks(d: &PantsDecomposition) -> Result<Vec<Enumerated>> {
    let model_ranges: Vec<u8> =
        (0..d.pants_count()).map(|p| model_count(d.punctures_in(p))).collect();
    let mut out: Vec<Enumerated> = Vec::new();
    let mut seen: Vec<canonical::Canonical> = Vec::new();
    let mut models = vec![0u8; d.pants_count()];
    let mut connectors = vec![0u8; d.curve_count()];
    loop {
        let marking = MarkingData {
            decomposition: d.clone(),
            models: models.clone(),
            connectors: connectors.clone(),
            offsets: vec![0; d.curve_count()],
        };
        // Combinations whose complement is not a union of discs and
        // punctured discs have no region data here; they cannot be
        // complete, so they are left out.
        if let Ok(track) = build_standard_track(&marking) {
            let code = canonical::canonical(&track);
            if !seen.contains(&code) {
                seen.push(code);
                let complete = recurrence::is_complete(&track);
                out.push(Enumerated { marking, track, complete });
            }
        }
        // Odometer over models then connectors.
        let mut carried = false;
        for (p, m) in models.iter_mut().enumerate() {
            if *m + 1 < model_ranges[p] {
                *m += 1;
                carried = true;
                break;
            }
            *m = 0;
        }
        if !carried {
            for c in connectors.iter_mut() {
                if *c + 1 < 4 {
                    *c += 1;
                    carried = true;
                    break;
                }
                *c = 0;
            }
        }
        if !carried {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::isomorphic;
    use crate::recurrence::{is_complete, is_recurrent, recurrent_subtrack};

    fn s04() -> PantsDecomposition {
        PantsDecomposition::new(2, vec![[(0, 0), (1, 0)]]).unwrap()
    }

    fn s11() -> PantsDecomposition {
        PantsDecomposition::new(1, vec![[(0, 0), (0, 1)]]).unwrap()
    }

    fn s05() -> PantsDecomposition {
        PantsDecomposition::new(3, vec![[(0, 0), (1, 0)], [(1, 1), (2, 0)]]).unwrap()
    }

    fn s20() -> PantsDecomposition {
        PantsDecomposition::new(
            2,
            vec![[(0, 0), (1, 0)], [(0, 1), (1, 1)], [(0, 2), (1, 2)]],
        )
        .unwrap()
    }

    fn try_combo(
        d: &PantsDecomposition,
        connectors: Vec<u8>,
        spec_of: &dyn Fn(u8, u8) -> Result<ModelSpec>,
    ) -> Option<(bool, TrainTrack)> {
        let mut m = MarkingData::plain(d.clone());
        m.connectors = connectors;
        let (builder, _) = assemble_with(&m, spec_of).ok()?;
        let track = builder.freeze().ok()?;
        Some((is_complete(&track), track))
    }

    fn shapes() -> Vec<ForkShape> {
        let mut v = Vec::new();
        for swap in [false, true] {
            for alone in 0..3u8 {
                v.push(ForkShape { swap, alone });
            }
        }
        v
    }

    #[test]
    fn dev_probe() {
        // One-punctured pants: every stop pairing, anchor, fork shape and
        // connector on the once-punctured torus.
        let pairings: [(&str, [ArcSpec; 2]); 3] = [
            ("par ", [arc(0, 0, 1, 0), arc(0, 1, 1, 1)]),
            ("anti", [arc(0, 1, 1, 0), arc(0, 0, 1, 1)]),
            ("self", [arc(0, 0, 0, 1), arc(1, 0, 1, 1)]),
        ];
        for (name, arcs) in &pairings {
            for anchor_arc in 0..2usize {
                for fwd in [true, false] {
                    for sh0 in shapes() {
                        for sh1 in shapes() {
                            let spec = move |_p: u8, _m: u8| -> Result<ModelSpec> {
                                Ok(ModelSpec {
                                    arcs: arcs
                                        .iter()
                                        .map(|a| ArcSpec { from: a.from, to: a.to })
                                        .collect(),
                                    punctures: vec![PunctureSpec {
                                        arc: anchor_arc,
                                        forward: fwd,
                                    }],
                                    combing: [sh0, sh1, FAN],
                                })
                            };
                            let mut ok = Vec::new();
                            for cfg1 in 0..4u8 {
                                for cfg2 in 0..4u8 {
                                    let conn = 4 + cfg1 * 4 + cfg2;
                                    if let Some((c, _)) = try_combo(&s11(), vec![conn], &spec) {
                                        if c {
                                            ok.push((cfg1, cfg2));
                                        }
                                    }
                                }
                            }
                            if !ok.is_empty() {
                                eprintln!(
                                    "s11 {name} anchor=({anchor_arc},{fwd}) sh0={sh0:?} sh1={sh1:?}: {ok:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn decomposition_counts_and_validation() {
        assert_eq!(s04().surface().unwrap(), Surface::new(0, 4).unwrap());
        assert_eq!(s11().surface().unwrap(), Surface::new(1, 1).unwrap());
        assert_eq!(s05().surface().unwrap(), Surface::new(0, 5).unwrap());
        assert_eq!(s20().surface().unwrap(), Surface::new(2, 0).unwrap());
        // Double-glued hole.
        assert!(PantsDecomposition::new(2, vec![[(0, 0), (1, 0)], [(0, 0), (1, 1)]])
            .is_err());
        // Punctures before glued holes.
        assert!(PantsDecomposition::new(2, vec![[(0, 1), (1, 0)]]).is_err());
    }

    #[test]
    fn four_punctured_sphere_standard_track() {
        let m = MarkingData::plain(s04());
        let t = build_standard_track(&m).unwrap();
        assert_eq!(t.branch_count(), 6);
        assert_eq!(t.switch_count(), 4);
        assert!(t.regions().iter().all(|r| r.is_punctured_monogon()));
        assert!(is_complete(&t));
    }

    #[test]
    fn budgets_match_the_complete_count() {
        for d in [s04(), s11(), s05(), s20()] {
            let surface = d.surface().unwrap();
            let budget =
                18 * surface.genus() as i64 - 18 + 6 * surface.punctures() as i64;
            assert_eq!(6 * d.curve_count() as i64, budget);
            let t = build_standard_track(&MarkingData::plain(d)).unwrap();
            assert_eq!(t.branch_count() as i64, budget);
        }
    }

    #[test]
    fn enumerations_find_complete_tracks() {
        for d in [s04(), s11(), s05(), s20()] {
            let all = enumerate_standard_tracks(&d).unwrap();
            assert!(all.iter().any(|e| e.complete), "no complete track on {d:?}");
        }
    }

    #[test]
    fn some_gluing_fails_recurrence() {
        let mut found = false;
        for d in [s05(), s20()] {
            for e in enumerate_standard_tracks(&d).unwrap() {
                if !is_recurrent(&e.track).0 {
                    found = true;
                }
            }
        }
        assert!(found, "every enumerated gluing was recurrent");
    }

    #[test]
    fn pants_curves_are_carried_and_span_circles() {
        let d = s05();
        let m = MarkingData::plain(d.clone());
        let t = build_standard_track(&m).unwrap();
        let mu = pants_curve_measure(&d);
        mu.validate(&t).unwrap();
        let s = recurrent_subtrack(&t, &mu).unwrap().unwrap();
        // The support is the disjoint union of the two core circles.
        assert_eq!(s.track.branch_count(), 2);
        assert_eq!(s.track.switch_count(), 2);
        assert!(s.track.components().len() == 2);
    }

    #[test]
    fn twist_matches_offset_semantics() {
        let d = s04();
        let base = build_standard_track(&MarkingData::plain(d.clone())).unwrap();
        let mut offset1 = MarkingData::plain(d.clone());
        offset1.offsets[0] = 1;
        let built = build_standard_track(&offset1).unwrap();
        let (twisted, word) = twist(&base, core_branches(0)[0], 1).unwrap();
        assert_eq!(word.len(), 1);
        assert!(isomorphic(&twisted, &built));
        // Additivity.
        let (two_steps, _) = twist(&twisted, core_branches(0)[0], 1).unwrap();
        let (two_at_once, word2) = twist(&base, core_branches(0)[0], 2).unwrap();
        assert_eq!(word2.len(), 2);
        assert!(isomorphic(&two_steps, &two_at_once));
        // A twist image is a standard track again, never the base.
        assert!(!isomorphic(&twisted, &base));
    }

    #[test]
    fn twists_about_disjoint_curves_commute() {
        let d = s05();
        let base = build_standard_track(&MarkingData::plain(d)).unwrap();
        let (ab, _) = twist(&base, core_branches(0)[0], 2).unwrap();
        let (ab, _) = twist(&ab, core_branches(1)[0], 3).unwrap();
        let (ba, _) = twist(&base, core_branches(1)[0], 3).unwrap();
        let (ba, _) = twist(&ba, core_branches(0)[0], 2).unwrap();
        assert!(ab.same_as(&ba));
    }

    #[test]
    fn neutral_connectors_cannot_twist() {
        let d = s04();
        let mut m = MarkingData::plain(d);
        m.connectors[0] = 1;
        let t = build_standard_track(&m).unwrap();
        assert!(matches!(
            twist(&t, core_branches(0)[0], 1),
            Err(Error::InvalidMove(_))
        ));
        m.offsets[0] = 2;
        assert!(m.validate().is_err());
    }

    #[test]
    fn negative_offsets_reverse_the_connector() {
        let d = s04();
        let mut m = MarkingData::plain(d.clone());
        m.offsets[0] = -1;
        let t = build_standard_track(&m).unwrap();
        // Same as building the reversed connector and twisting once.
        let mut r = MarkingData::plain(d);
        r.connectors[0] = reversed_connector(0);
        let rt = build_standard_track(&r).unwrap();
        let (expected, _) = twist(&rt, core_branches(0)[0], 1).unwrap();
        assert!(isomorphic(&t, &expected));
    }

    #[test]
    fn marking_text_round_trips() {
        let mut m = MarkingData::plain(s05());
        m.models[1] = 1;
        m.connectors[1] = 3;
        m.offsets[0] = 2;
        let text = write_marking(&m);
        let back = read_marking(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(write_marking(&back), text);
    }
}
