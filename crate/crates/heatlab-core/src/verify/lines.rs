//! Chord scan through a disk: how much of some set A can a straight
//! probe line see. Degenerate grazing chords are discarded below a length
//! floor, so a set missing a fixed fraction of every admissible chord
//! cannot hide behind a tangent line.

use serde::Serialize;

use crate::domain::{Direction, Point};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineScan {
    /// Signed perpendicular offset of the best chord from the center.
    pub best_offset: f64,
    /// Largest fraction of an admissible chord covered by A.
    pub best_fraction: f64,
    /// Length of that chord.
    pub chord_len: f64,
    pub admissible_lines: usize,
}

/// Scan `resolution` parallel lines in direction `nu0` across the ball of
/// the given center and radius, dropping chords shorter than c4 * radius,
/// and sample each admissible chord at `resolution` midpoints against the
/// indicator `a`.
pub fn line_fraction_scan(
    center: &Point,
    radius: f64,
    nu0: &Direction,
    c4: f64,
    resolution: usize,
    a: impl Fn(&Point) -> bool,
) -> LineScan {
    assert!(radius > 0.0 && resolution > 0);
    assert_eq!(center.dim(), 2, "chord scan is a planar probe");
    let perp = Direction::x2(-nu0.get(1), nu0.get(0));
    let mut best = LineScan {
        best_offset: 0.0,
        best_fraction: 0.0,
        chord_len: 0.0,
        admissible_lines: 0,
    };
    for i in 0..resolution {
        let o = radius * (2.0 * (i as f64 + 0.5) / resolution as f64 - 1.0);
        let half_sq = radius * radius - o * o;
        if half_sq <= 0.0 {
            continue;
        }
        let half = half_sq.sqrt();
        let chord = 2.0 * half;
        if chord < c4 * radius {
            continue;
        }
        best.admissible_lines += 1;
        let foot = center.offset(&perp, o);
        let mut hits = 0usize;
        for j in 0..resolution {
            let s = -half + chord * (j as f64 + 0.5) / resolution as f64;
            if a(&foot.offset(nu0, s)) {
                hits += 1;
            }
        }
        let fraction = hits as f64 / resolution as f64;
        if fraction > best.best_fraction {
            best.best_fraction = fraction;
            best.best_offset = o;
            best.chord_len = chord;
        }
    }
    best
}
