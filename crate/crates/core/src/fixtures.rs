//! Small hand-wired tracks shared across module tests.

use crate::surface::Surface;
use crate::track::{Dart, EndId, TrackBuilder, TrackKind, TrainTrack};

/// Two trivalent switches joined by three branches on the four-punctured
/// sphere.  Branch 0 is large, branches 1 and 2 bound a bigon, and the two
/// smooth regions hold two punctures each.
pub fn theta() -> TrainTrack {
    let surface = Surface::new(0, 4).unwrap();
    let mut b = TrackBuilder::new(surface, TrackKind::Bigon);
    b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(1, 0), EndId::new(2, 0)]);
    b.add_switch(1, vec![EndId::new(0, 1)], vec![EndId::new(2, 1), EndId::new(1, 1)]);
    b.add_region(vec![Dart::new(0, true)], 0, 2);
    b.add_region(vec![Dart::new(0, false)], 0, 2);
    b.add_region(vec![Dart::new(1, true)], 0, 0);
    b.freeze().unwrap()
}

/// Two circles around puncture pairs joined by an arc that any train would
/// have to leave again on the side it entered, so the switch conditions
/// force weight zero on the arc.  Not recurrent.
pub fn barbell() -> TrainTrack {
    let surface = Surface::new(0, 5).unwrap();
    let mut b = TrackBuilder::new(surface, TrackKind::Train);
    b.add_switch(0, vec![EndId::new(0, 0), EndId::new(2, 0)], vec![EndId::new(0, 1)]);
    b.add_switch(1, vec![EndId::new(1, 0), EndId::new(2, 1)], vec![EndId::new(1, 1)]);
    b.add_region(vec![Dart::new(0, false)], 0, 2);
    b.add_region(vec![Dart::new(1, false)], 0, 2);
    b.add_region(vec![Dart::new(0, true)], 0, 1);
    b.freeze().unwrap()
}

/// Two disjoint copies of [`theta`] on the seven-punctured sphere, with the
/// back regions of both merged into one three-punctured region.  Branches 0
/// and 3 are large and their splits commute.
pub fn two_thetas() -> TrainTrack {
    let surface = Surface::new(0, 7).unwrap();
    let mut b = TrackBuilder::new(surface, TrackKind::Bigon);
    b.add_switch(0, vec![EndId::new(0, 0)], vec![EndId::new(1, 0), EndId::new(2, 0)]);
    b.add_switch(1, vec![EndId::new(0, 1)], vec![EndId::new(2, 1), EndId::new(1, 1)]);
    b.add_switch(2, vec![EndId::new(3, 0)], vec![EndId::new(4, 0), EndId::new(5, 0)]);
    b.add_switch(3, vec![EndId::new(3, 1)], vec![EndId::new(5, 1), EndId::new(4, 1)]);
    b.add_region(vec![Dart::new(0, true)], 0, 2);
    b.add_region(vec![Dart::new(1, true)], 0, 0);
    b.add_region(vec![Dart::new(3, true)], 0, 2);
    b.add_region(vec![Dart::new(4, true)], 0, 0);
    b.add_region(vec![Dart::new(0, false), Dart::new(3, false)], 0, 3);
    b.freeze().unwrap()
}
