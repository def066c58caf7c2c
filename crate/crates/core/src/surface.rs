//! Oriented surfaces of finite type.

use crate::{Error, Result};

/// An oriented surface of genus `g` with `m` punctures.
///
/// Only hyperbolic surfaces with at least one essential curve are admitted:
/// `3g - 3 + m >= 1` and, when `g == 0`, at least four punctures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Surface {
    genus: u32,
    punctures: u32,
}

impl Surface {
    pub fn new(genus: u32, punctures: u32) -> Result<Self> {
        let g = genus as i64;
        let m = punctures as i64;
        if 3 * g - 3 + m < 1 {
            return Err(Error::InvalidTrack(format!(
                "surface ({genus},{punctures}) carries no essential curve system"
            )));
        }
        Ok(Surface { genus, punctures })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn punctures(&self) -> u32 {
        self.punctures
    }

    /// Euler characteristic of the punctured surface.
    pub fn euler(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }

    /// Doubled Euler characteristic, the unit used for region bookkeeping.
    pub fn euler_doubled(&self) -> i64 {
        2 * self.euler()
    }

    /// Number of curves in a pants decomposition.
    pub fn pants_curves(&self) -> usize {
        (3 * self.genus as usize + self.punctures as usize).saturating_sub(3)
    }

    /// Number of pairs of pants in a pants decomposition.
    pub fn pants_count(&self) -> usize {
        (2 * self.genus as usize + self.punctures as usize).saturating_sub(2)
    }

    /// Branch count of a maximal generic track: `18g - 18 + 6m`.
    pub fn max_branches(&self) -> usize {
        (18 * self.genus as usize + 6 * self.punctures as usize).saturating_sub(18)
    }

    /// Switch count of a maximal generic track: `12g - 12 + 4m`.
    pub fn max_switches(&self) -> usize {
        (12 * self.genus as usize + 4 * self.punctures as usize).saturating_sub(12)
    }
}

impl std::fmt::Display for Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S_{{{},{}}}", self.genus, self.punctures)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_surfaces() {
        assert!(Surface::new(0, 4).is_ok());
        assert!(Surface::new(0, 5).is_ok());
        assert!(Surface::new(1, 1).is_ok());
        assert!(Surface::new(2, 0).is_ok());
        assert!(Surface::new(0, 3).is_err());
        assert!(Surface::new(1, 0).is_err());
        assert!(Surface::new(0, 0).is_err());
    }

    #[test]
    fn counts() {
        let s = Surface::new(0, 5).unwrap();
        assert_eq!(s.max_branches(), 12);
        assert_eq!(s.max_switches(), 8);
        assert_eq!(s.pants_curves(), 2);
        assert_eq!(s.pants_count(), 3);
        assert_eq!(s.euler_doubled(), -6);

        let s = Surface::new(1, 1).unwrap();
        assert_eq!(s.max_branches(), 6);
        assert_eq!(s.max_switches(), 4);

        let s = Surface::new(2, 0).unwrap();
        assert_eq!(s.max_branches(), 18);
        assert_eq!(s.max_switches(), 12);
        assert_eq!(s.pants_count(), 2);

        let s = Surface::new(1, 2).unwrap();
        assert_eq!(s.max_branches(), 12);
        assert_eq!(s.pants_curves(), 2);
    }
}
