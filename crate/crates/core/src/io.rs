//! Line-oriented text formats and exports.
//!
//! Every format is versioned, UTF-8, and written in a fixed order so equal
//! values produce byte-identical files.  Measures and words carry the hash
//! of the track they belong to; readers that know the track check it.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::canonical;
use crate::measure::{TangentialMeasure, TransverseMeasure};
use crate::surface::Surface;
use crate::track::{BranchId, Dart, EndId, TrackBuilder, TrackKind, TrainTrack};
use crate::word::{MoveWord, Step};
use crate::{Error, Rational, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Hash of the canonical code, stable across relabelings.
pub fn track_hash(track: &TrainTrack) -> String {
    let code = canonical::canonical(track).code;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in code {
        for byte in v.to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

fn write_end(out: &mut String, e: EndId) {
    let _ = write!(out, "b{}.{}", e.branch, e.end);
}

fn parse_end(line: usize, tok: &str) -> Result<EndId> {
    let body = tok
        .strip_prefix('b')
        .ok_or_else(|| perr(line, format!("expected an end like b3.0, got {tok:?}")))?;
    let (b, e) = body
        .split_once('.')
        .ok_or_else(|| perr(line, format!("expected an end like b3.0, got {tok:?}")))?;
    let branch: BranchId =
        b.parse().map_err(|_| perr(line, format!("bad branch number in {tok:?}")))?;
    match e {
        "0" => Ok(EndId::new(branch, 0)),
        "1" => Ok(EndId::new(branch, 1)),
        _ => Err(perr(line, format!("end index in {tok:?} must be 0 or 1"))),
    }
}

fn parse_dart(line: usize, tok: &str) -> Result<Dart> {
    let body = tok
        .strip_prefix('b')
        .ok_or_else(|| perr(line, format!("expected a dart like b3+, got {tok:?}")))?;
    let (num, forward) = if let Some(n) = body.strip_suffix('+') {
        (n, true)
    } else if let Some(n) = body.strip_suffix('-') {
        (n, false)
    } else {
        return Err(perr(line, format!("dart {tok:?} must end in + or -")));
    };
    let branch: BranchId =
        num.parse().map_err(|_| perr(line, format!("bad branch number in {tok:?}")))?;
    Ok(Dart::new(branch, forward))
}

fn parse_rational(line: usize, tok: &str) -> Result<Rational> {
    tok.parse().map_err(|_| perr(line, format!("bad rational {tok:?}, expected p/q")))
}

fn format_rational(v: &Rational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Track text format.  Lines: `ttk 1`, `surface g m`, `kind train|bigon`,
/// one `switch` line per switch (side A, a bar, side B, both in
/// counterclockwise order), one `branch` line per branch, and one `region`
/// line per region (`chi0 genus cusps punctures anchors...`).
pub fn write_track(track: &TrainTrack) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ttk 1");
    let _ = writeln!(out, "surface {} {}", track.surface().genus(), track.surface().punctures());
    let _ = writeln!(
        out,
        "kind {}",
        match track.kind() {
            TrackKind::Train => "train",
            TrackKind::Bigon => "bigon",
        }
    );
    for (v, data) in track.switches() {
        let _ = write!(out, "switch {v} :");
        for &e in &data.sides[0] {
            out.push(' ');
            write_end(&mut out, e);
        }
        out.push_str(" |");
        for &e in &data.sides[1] {
            out.push(' ');
            write_end(&mut out, e);
        }
        out.push('\n');
    }
    for b in track.branch_ids() {
        let _ = writeln!(out, "branch {b}");
    }
    for region in track.regions() {
        let chi0 = (region.doubled_chi + region.cusps as i64) / 2;
        let _ = write!(
            out,
            "region {chi0} {} {} {}",
            region.genus, region.cusps, region.punctures
        );
        for &wi in &region.walks {
            let _ = write!(out, " {}", track.walks()[wi].anchor());
        }
        out.push('\n');
    }
    out
}

pub fn read_track(text: &str) -> Result<TrainTrack> {
    let mut surface: Option<Surface> = None;
    let mut kind: Option<TrackKind> = None;
    let mut builder: Option<TrackBuilder> = None;
    let mut listed_branches: BTreeSet<BranchId> = BTreeSet::new();
    // chi0 and cusp counts from region lines, checked after freezing.
    let mut region_claims: Vec<(usize, i64, usize)> = Vec::new();
    let mut saw_header = false;

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !saw_header {
            if tokens != ["ttk", "1"] {
                return Err(perr(ln, "expected header `ttk 1`"));
            }
            saw_header = true;
            continue;
        }
        match tokens[0] {
            "surface" => {
                if tokens.len() != 3 {
                    return Err(perr(ln, "surface line needs genus and punctures"));
                }
                let g = tokens[1].parse().map_err(|_| perr(ln, "bad genus"))?;
                let m = tokens[2].parse().map_err(|_| perr(ln, "bad puncture count"))?;
                surface = Some(Surface::new(g, m).map_err(|e| perr(ln, e.to_string()))?);
            }
            "kind" => {
                kind = Some(match tokens.get(1) {
                    Some(&"train") => TrackKind::Train,
                    Some(&"bigon") => TrackKind::Bigon,
                    _ => return Err(perr(ln, "kind must be train or bigon")),
                });
            }
            "switch" => {
                let (Some(sf), Some(k)) = (surface, kind) else {
                    return Err(perr(ln, "switch lines must follow surface and kind"));
                };
                let b = builder.get_or_insert_with(|| TrackBuilder::new(sf, k));
                let id = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| perr(ln, "bad switch id"))?;
                if tokens.get(2) != Some(&":") {
                    return Err(perr(ln, "switch line needs `:` after the id"));
                }
                let bar = tokens
                    .iter()
                    .position(|t| *t == "|")
                    .ok_or_else(|| perr(ln, "switch line needs `|` between sides"))?;
                let side_a = tokens[3..bar]
                    .iter()
                    .map(|t| parse_end(ln, t))
                    .collect::<Result<Vec<_>>>()?;
                let side_b = tokens[bar + 1..]
                    .iter()
                    .map(|t| parse_end(ln, t))
                    .collect::<Result<Vec<_>>>()?;
                if side_a.is_empty() || side_b.is_empty() {
                    return Err(perr(ln, "both switch sides must be nonempty"));
                }
                b.add_switch(id, side_a, side_b);
            }
            "branch" => {
                let id = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| perr(ln, "bad branch id"))?;
                if !listed_branches.insert(id) {
                    return Err(perr(ln, format!("branch b{id} listed twice")));
                }
            }
            "region" => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| perr(ln, "region lines must follow switch lines"))?;
                if tokens.len() < 6 {
                    return Err(perr(
                        ln,
                        "region line needs chi0, genus, cusps, punctures, anchors",
                    ));
                }
                let chi0: i64 = tokens[1].parse().map_err(|_| perr(ln, "bad chi0"))?;
                let genus = tokens[2].parse().map_err(|_| perr(ln, "bad genus"))?;
                let cusps: usize = tokens[3].parse().map_err(|_| perr(ln, "bad cusp count"))?;
                let punctures =
                    tokens[4].parse().map_err(|_| perr(ln, "bad puncture count"))?;
                let anchors = tokens[5..]
                    .iter()
                    .map(|t| parse_dart(ln, t))
                    .collect::<Result<Vec<_>>>()?;
                b.add_region(anchors, genus, punctures);
                region_claims.push((ln, chi0, cusps));
            }
            other => return Err(perr(ln, format!("unrecognized line kind {other:?}"))),
        }
    }

    if !saw_header {
        return Err(perr(1, "empty track file"));
    }
    let builder = builder.ok_or_else(|| perr(1, "track file has no switches"))?;
    let track = builder.freeze().map_err(|e| perr(1, e.to_string()))?;
    if !listed_branches.is_empty() {
        let actual: BTreeSet<BranchId> = track.branch_ids().collect();
        if listed_branches != actual {
            return Err(perr(1, "branch lines do not match the switch wiring"));
        }
    }
    for ((ln, chi0, cusps), region) in region_claims.iter().zip(track.regions()) {
        let actual_chi0 = (region.doubled_chi + region.cusps as i64) / 2;
        if *chi0 != actual_chi0 || *cusps != region.cusps {
            return Err(perr(
                *ln,
                format!(
                    "region claims chi0 {chi0} with {cusps} cusps, wiring gives {} with {}",
                    actual_chi0, region.cusps
                ),
            ));
        }
    }
    Ok(track)
}

/// Measure format: `measure <track-hash>` then `w <branch> <p>/<q>` lines
/// in branch order.
pub fn write_measure(track: &TrainTrack, mu: &TransverseMeasure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "measure {}", track_hash(track));
    for (b, v) in &mu.weights {
        let _ = writeln!(out, "w {b} {}", format_rational(v));
    }
    out
}

/// Tangential length format: `tangential <track-hash>` then `l <branch>
/// <p>/<q>` lines.
pub fn write_tangential(track: &TrainTrack, nu: &TangentialMeasure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tangential {}", track_hash(track));
    for (b, v) in &nu.weights {
        let _ = writeln!(out, "l {b} {}", format_rational(v));
    }
    out
}

fn read_weight_lines(
    text: &str,
    header: &str,
    entry: &str,
) -> Result<(String, Vec<(BranchId, Rational)>)> {
    let mut hash = None;
    let mut weights = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if hash.is_none() {
            if tokens.len() != 2 || tokens[0] != header {
                return Err(perr(ln, format!("expected header `{header} <track-hash>`")));
            }
            hash = Some(tokens[1].to_string());
            continue;
        }
        if tokens.len() != 3 || tokens[0] != entry {
            return Err(perr(ln, format!("expected `{entry} <branch> <p>/<q>`")));
        }
        let b = tokens[1].parse().map_err(|_| perr(ln, "bad branch id"))?;
        let v = parse_rational(ln, tokens[2])?;
        weights.push((b, v));
    }
    let hash = hash.ok_or_else(|| perr(1, format!("empty {header} file")))?;
    Ok((hash, weights))
}

pub fn read_measure(text: &str) -> Result<(String, TransverseMeasure)> {
    let (hash, weights) = read_weight_lines(text, "measure", "w")?;
    Ok((hash, TransverseMeasure::from_weights(weights)))
}

/// Read a measure and insist it belongs to the given track.
pub fn read_measure_for(track: &TrainTrack, text: &str) -> Result<TransverseMeasure> {
    let (hash, mu) = read_measure(text)?;
    if hash != track_hash(track) {
        return Err(Error::InvalidMeasure(format!(
            "measure belongs to track {hash}, not this one"
        )));
    }
    mu.validate(track)?;
    Ok(mu)
}

pub fn read_tangential(text: &str) -> Result<(String, TangentialMeasure)> {
    let (hash, weights) = read_weight_lines(text, "tangential", "l")?;
    Ok((hash, TangentialMeasure::from_weights(weights)))
}

/// Word format: `word 1`, `base <track-hash>`, then one move per line.
pub fn write_word(word: &MoveWord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "word 1");
    let _ = writeln!(out, "base {}", track_hash(&word.base));
    for s in &word.steps {
        let _ = writeln!(out, "{s}");
    }
    out
}

pub fn read_word_steps(text: &str) -> Result<(Option<String>, Vec<Step>)> {
    let mut saw_header = false;
    let mut base = None;
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "word 1" {
                return Err(perr(ln, "expected header `word 1`"));
            }
            saw_header = true;
            continue;
        }
        if let Some(h) = line.strip_prefix("base ") {
            if base.is_some() || !steps.is_empty() {
                return Err(perr(ln, "base line must come right after the header"));
            }
            base = Some(h.trim().to_string());
            continue;
        }
        steps.push(line.parse::<Step>().map_err(|e| perr(ln, e))?);
    }
    if !saw_header {
        return Err(perr(1, "empty word file"));
    }
    Ok((base, steps))
}

/// Read a word and replay it from the given base track, checking the hash
/// when the file names one.
pub fn read_word_for(track: &TrainTrack, text: &str) -> Result<MoveWord> {
    let (base, steps) = read_word_steps(text)?;
    if let Some(h) = base {
        if h != track_hash(track) {
            return Err(Error::InvalidMove(format!(
                "word starts at track {h}, not this one"
            )));
        }
    }
    MoveWord::replay(track, &steps)
}

/// DOT export of the ribbon graph: one node per switch showing its ordered
/// sides and cusp count, one edge per branch.
pub fn write_dot(track: &TrainTrack) -> String {
    let mut out = String::new();
    out.push_str("graph track {\n");
    let _ = writeln!(out, "  // {}", track.surface());
    for (v, data) in track.switches() {
        let fmt_side = |side: &[EndId]| -> String {
            side.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(
            out,
            "  s{v} [label=\"s{v}|A: {}|B: {}|cusps {}\" shape=record];",
            fmt_side(&data.sides[0]),
            fmt_side(&data.sides[1]),
            data.cusp_count()
        );
    }
    for b in track.branch_ids() {
        let v0 = track.loc(EndId::new(b, 0)).switch;
        let v1 = track.loc(EndId::new(b, 1)).switch;
        let _ = writeln!(out, "  s{v0} -- s{v1} [label=\"b{b}\"];");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{barbell, theta, two_thetas};
    use crate::moves::SplitDir;
    use crate::{rat, ratio};

    #[test]
    fn track_files_round_trip() {
        for t in [theta(), barbell(), two_thetas()] {
            let text = write_track(&t);
            let back = read_track(&text).unwrap();
            assert!(back.same_as(&t));
            assert_eq!(write_track(&back), text);
        }
    }

    #[test]
    fn track_parse_errors_carry_line_numbers() {
        let missing = "surface 0 4\n";
        assert!(matches!(read_track(missing), Err(Error::Parse { line: 1, .. })));
        let mut text = write_track(&theta());
        text = text.replace("region 1 0 2 0", "region 0 0 2 0");
        match read_track(&text) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("chi0")),
            other => panic!("expected a chi0 mismatch, got {other:?}"),
        }
    }

    #[test]
    fn measure_files_round_trip_and_check_hashes() {
        let t = theta();
        let mu = TransverseMeasure::from_weights([
            (0, ratio(7, 2)),
            (1, rat(3)),
            (2, ratio(1, 2)),
        ]);
        let text = write_measure(&t, &mu);
        assert!(text.contains("w 2 1/2"));
        let back = read_measure_for(&t, &text).unwrap();
        assert_eq!(back, mu);
        let other = barbell();
        assert!(matches!(
            read_measure_for(&other, &text),
            Err(Error::InvalidMeasure(_))
        ));
    }

    #[test]
    fn word_files_round_trip() {
        let t = two_thetas();
        let word = MoveWord::replay(
            &t,
            &[Step::Split(0, SplitDir::Right), Step::Split(3, SplitDir::Left)],
        )
        .unwrap();
        let text = write_word(&word);
        let back = read_word_for(&t, &text).unwrap();
        assert_eq!(back.steps, word.steps);
        assert!(back.end.same_as(&word.end));
        assert!(matches!(
            read_word_for(&theta(), &text),
            Err(Error::InvalidMove(_))
        ));
    }

    #[test]
    fn hashes_are_label_independent() {
        let t = theta();
        // Relabel by swapping branch ids 1 and 2 and the switch ids.
        let mut b = TrackBuilder::new(t.surface(), t.kind());
        b.add_switch(5, vec![EndId::new(7, 0)], vec![EndId::new(9, 0), EndId::new(8, 0)]);
        b.add_switch(2, vec![EndId::new(7, 1)], vec![EndId::new(8, 1), EndId::new(9, 1)]);
        b.add_region(vec![Dart::new(7, true)], 0, 2);
        b.add_region(vec![Dart::new(7, false)], 0, 2);
        b.add_region(vec![Dart::new(9, true)], 0, 0);
        let relabeled = b.freeze().unwrap();
        assert_eq!(track_hash(&t), track_hash(&relabeled));
        assert_ne!(track_hash(&t), track_hash(&barbell()));
    }

    #[test]
    fn dot_output_is_stable() {
        let dot = write_dot(&theta());
        assert!(dot.contains("s0 -- s1 [label=\"b0\"];"));
        assert_eq!(dot, write_dot(&theta()));
    }
}
