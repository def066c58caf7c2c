//! Recurrence and transverse recurrence, decided by exact feasibility.
//!
//! A track is recurrent when some transverse measure is positive on every
//! branch, and transversely recurrent when some tangential length function
//! is positive and satisfies the region constraints.  Both are cones over
//! the rationals, so positivity normalizes to "at least one" and strictness
//! to "slack at least one", and a small exact simplex decides everything
//! and hands back a witness that substitutes into its defining system.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use crate::embed::{self, SubtrackEmbedding};
use crate::lp::{Cmp, LinearProgram};
use crate::measure::{region_sides, TangentialMeasure, TransverseMeasure};
use crate::track::{BranchId, TrainTrack};
use crate::{rat, Error, Rational, Result};

fn branch_order(track: &TrainTrack) -> (Vec<BranchId>, BTreeMap<BranchId, usize>) {
    let order: Vec<BranchId> = track.branch_ids().collect();
    let index = order.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    (order, index)
}

/// Switch conditions as equality rows: on each switch the two sides carry
/// the same total weight.
fn switch_conditions(track: &TrainTrack, index: &BTreeMap<BranchId, usize>) -> LinearProgram {
    let mut lp = LinearProgram::new(index.len());
    for (_, data) in track.switches() {
        let mut coeffs = Vec::new();
        for &e in &data.sides[0] {
            coeffs.push((index[&e.branch], rat(1)));
        }
        for &e in &data.sides[1] {
            coeffs.push((index[&e.branch], rat(-1)));
        }
        lp.constrain(coeffs, Cmp::Eq, rat(0));
    }
    lp
}

/// Decide whether the track carries a transverse measure positive on every
/// branch, returning one such witness.
pub fn is_recurrent(track: &TrainTrack) -> (bool, Option<TransverseMeasure>) {
    let (order, index) = branch_order(track);
    let mut lp = switch_conditions(track, &index);
    for i in 0..order.len() {
        lp.constrain(vec![(i, rat(1))], Cmp::Ge, rat(1));
    }
    match lp.feasible() {
        Some(x) => {
            let mu = TransverseMeasure::from_weights(
                order.iter().copied().zip(x.iter().cloned()),
            );
            debug_assert!(mu.validate(track).is_ok());
            (true, Some(mu))
        }
        None => (false, None),
    }
}

/// Decide whether the track carries a positive tangential length function
/// with equal bigon sides and the triangle inequalities on trigons.  In
/// strict mode the inequalities must hold strictly, which is meaningful
/// only on maximal generic tracks; anything else is rejected.
pub fn is_transversely_recurrent(
    track: &TrainTrack,
    strict: bool,
) -> Result<(bool, Option<TangentialMeasure>)> {
    if strict && !track.is_maximal_generic() {
        return Err(Error::InvalidTrack(
            "strict transverse recurrence is defined on maximal generic tracks".into(),
        ));
    }
    let (order, index) = branch_order(track);
    let mut lp = LinearProgram::new(order.len());
    for i in 0..order.len() {
        lp.constrain(vec![(i, rat(1))], Cmp::Ge, rat(1));
    }
    for (ri, region) in track.regions().iter().enumerate() {
        let sides = region_sides(track, ri);
        let side_coeffs = |si: usize, sign: i64| -> Vec<(usize, Rational)> {
            sides[si].iter().map(|d| (index[&d.branch], rat(sign))).collect()
        };
        if region.is_bigon() {
            let mut coeffs = side_coeffs(0, 1);
            coeffs.extend(side_coeffs(1, -1));
            lp.constrain(coeffs, Cmp::Eq, rat(0));
        }
        if region.is_trigon() {
            for i in 0..3 {
                let mut coeffs = side_coeffs((i + 1) % 3, 1);
                coeffs.extend(side_coeffs((i + 2) % 3, 1));
                coeffs.extend(side_coeffs(i, -1));
                lp.constrain(coeffs, Cmp::Ge, rat(if strict { 1 } else { 0 }));
            }
        }
    }
    Ok(match lp.feasible() {
        Some(x) => {
            let nu = TangentialMeasure::from_weights(
                order.iter().copied().zip(x.iter().cloned()),
            );
            debug_assert!(nu.validate(track, strict).is_ok());
            (true, Some(nu))
        }
        None => (false, None),
    })
}

/// Generic, maximal, recurrent, and strictly transversely recurrent.
pub fn is_complete(track: &TrainTrack) -> bool {
    track.is_maximal_generic()
        && is_recurrent(track).0
        && matches!(is_transversely_recurrent(track, true), Ok((true, _)))
}

/// A subtrack cut out by a measure, with its embedding certificate and the
/// measure transported onto it.
#[derive(Debug, Clone)]
pub struct SupportSubtrack {
    pub track: TrainTrack,
    pub embedding: SubtrackEmbedding,
    pub measure: TransverseMeasure,
}

/// The support of a transverse measure as a subtrack.  Every branch of the
/// result carries positive weight, so the result is recurrent.  A zero
/// measure has no support and yields `None`.
pub fn recurrent_subtrack(
    track: &TrainTrack,
    mu: &TransverseMeasure,
) -> Result<Option<SupportSubtrack>> {
    mu.validate(track)?;
    if mu.is_zero() {
        return Ok(None);
    }
    let keep: BTreeSet<BranchId> = mu.support().collect();
    // The switch conditions leave no one-sided stops in a support, so any
    // construction failure is a bookkeeping breach.
    let (sub, embedding) = embed::subtrack(track, &keep)
        .map_err(|e| Error::Internal(format!("support subtrack failed: {e}")))?;
    let mut weights = Vec::new();
    for (&b, path) in &embedding.branch_paths {
        let v = mu.weight(path[0].branch);
        debug_assert!(
            path.iter().all(|d| mu.weight(d.branch) == v),
            "support chains must carry one weight"
        );
        weights.push((b, v));
    }
    let measure = TransverseMeasure::from_weights(weights);
    measure
        .validate(&sub)
        .map_err(|e| Error::Internal(format!("transported support measure invalid: {e}")))?;
    Ok(Some(SupportSubtrack { track: sub, embedding, measure }))
}

const EMBED_BUDGET: u64 = 5_000_000;

/// Whether the measure runs with positive weight over all of `sigma`.  The
/// candidate must embed into the measured track at all; filling then means
/// it also embeds through positive branches only.
pub fn fills(track: &TrainTrack, mu: &TransverseMeasure, sigma: &TrainTrack) -> Result<bool> {
    mu.validate(track)?;
    let Some(emb) = embed::find_embedding(sigma, track, EMBED_BUDGET)? else {
        return Err(Error::InvalidTrack(
            "the candidate is not a subtrack of the measured track".into(),
        ));
    };
    if emb.used_branches().iter().all(|&b| mu.weight(b).is_positive()) {
        return Ok(true);
    }
    let Some(supp) = recurrent_subtrack(track, mu)? else {
        return Ok(false);
    };
    Ok(embed::find_embedding(sigma, &supp.track, EMBED_BUDGET)?.is_some())
}

/// The union of the supports of all transverse measures, as a subtrack.
/// Branch by branch, a relaxed feasibility problem asks for a measure
/// positive there; the witnesses sum to a measure whose support is the
/// whole union.  Tracks with no measure at all yield `None`.
pub fn largest_recurrent_subtrack(track: &TrainTrack) -> Result<Option<SupportSubtrack>> {
    let (order, index) = branch_order(track);
    let mut total = TransverseMeasure::new();
    for (i, &b) in order.iter().enumerate() {
        if total.weight(b).is_positive() {
            continue;
        }
        let mut lp = switch_conditions(track, &index);
        lp.constrain(vec![(i, rat(1))], Cmp::Ge, rat(1));
        if let Some(x) = lp.feasible() {
            let w = TransverseMeasure::from_weights(
                order.iter().copied().zip(x.iter().cloned()),
            );
            total = total.add(&w);
        }
    }
    if total.is_zero() {
        return Ok(None);
    }
    recurrent_subtrack(track, &total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{barbell, theta};
    use crate::ratio;

    #[test]
    fn theta_is_recurrent_with_witness() {
        let t = theta();
        let (yes, witness) = is_recurrent(&t);
        assert!(yes);
        let mu = witness.unwrap();
        mu.validate(&t).unwrap();
        assert!(mu.is_positive_on(&t));
    }

    #[test]
    fn barbell_is_not_recurrent() {
        let t = barbell();
        let (yes, witness) = is_recurrent(&t);
        assert!(!yes);
        assert!(witness.is_none());
    }

    #[test]
    fn theta_is_transversely_recurrent_but_not_strictly_testable() {
        let t = theta();
        let (yes, nu) = is_transversely_recurrent(&t, false).unwrap();
        assert!(yes);
        nu.unwrap().validate(&t, false).unwrap();
        // The bigon region makes the track non-maximal, so strict mode
        // refuses it, and completeness fails.
        assert!(is_transversely_recurrent(&t, true).is_err());
        assert!(!is_complete(&t));
    }

    #[test]
    fn support_subtrack_of_a_partial_measure() {
        let t = theta();
        let mu = TransverseMeasure::from_weights([(0, rat(1)), (1, rat(1))]);
        let s = recurrent_subtrack(&t, &mu).unwrap().unwrap();
        assert_eq!(s.track.branch_count(), 1);
        s.embedding.verify(&s.track, &t).unwrap();
        assert_eq!(s.measure.weight(0), rat(1));
        assert!(is_recurrent(&s.track).0);
        assert!(recurrent_subtrack(&t, &TransverseMeasure::new()).unwrap().is_none());
    }

    #[test]
    fn fills_picks_any_positive_route() {
        let t = theta();
        let full = TransverseMeasure::from_weights([
            (0, rat(2)),
            (1, rat(1)),
            (2, rat(1)),
        ]);
        assert!(fills(&t, &full, &t).unwrap());
        let partial = TransverseMeasure::from_weights([(0, rat(1)), (1, rat(1))]);
        // The circle subtrack embeds along the unweighted route too, but
        // filling only needs the weighted one.
        let circle = recurrent_subtrack(&t, &partial).unwrap().unwrap().track;
        assert!(fills(&t, &partial, &circle).unwrap());
        assert!(!fills(&t, &partial, &t).unwrap());
    }

    #[test]
    fn fills_rejects_non_subtracks() {
        let t = theta();
        let stranger = barbell();
        let mu = TransverseMeasure::from_weights([
            (0, rat(2)),
            (1, rat(1)),
            (2, rat(1)),
        ]);
        assert!(matches!(
            fills(&t, &mu, &stranger),
            Err(Error::InvalidTrack(_))
        ));
    }

    #[test]
    fn largest_recurrent_subtrack_drops_the_dead_arc() {
        let t = barbell();
        let s = largest_recurrent_subtrack(&t).unwrap().unwrap();
        assert_eq!(s.track.branch_count(), 2);
        assert_eq!(s.track.switch_count(), 2);
        s.embedding.verify(&s.track, &t).unwrap();
        assert!(is_recurrent(&s.track).0);
        // On a recurrent track the operator is the identity.
        let th = theta();
        let again = largest_recurrent_subtrack(&th).unwrap().unwrap();
        assert_eq!(again.track.branch_count(), 3);
        assert!(crate::canonical::isomorphic(&again.track, &th));
    }

    #[test]
    fn witnesses_scale_within_the_cone() {
        let t = theta();
        let (_, witness) = is_recurrent(&t);
        let mu = witness.unwrap();
        let doubled = mu.scale(&ratio(2, 1));
        doubled.validate(&t).unwrap();
        assert!(doubled.is_positive_on(&t));
    }
}
