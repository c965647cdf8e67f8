//! The bundled reference instance and the published values it is checked against.

use num_rational::BigRational;

use crate::geometry::{MotionGroup, MotionRep, RepKind};
use crate::instance::{GivenPose, ManipulatorInstance, Point2};

/// Generic rational instance used for the solution-count reproduction. Its
/// given pose has the platform centroid at (11/6, 17/6).
pub fn reference_instance() -> ManipulatorInstance {
    let r = |n: i64| BigRational::from_integer(n.into());
    ManipulatorInstance::new(
        [Point2::from_ratios((0, 1), (0, 1)), Point2::from_ratios((7, 1), (0, 1)), Point2::from_ratios((3, 1), (5, 1))],
        [Point2::from_ratios((0, 1), (0, 1)), Point2::from_ratios((2, 1), (0, 1)), Point2::from_ratios((1, 1), (3, 2))],
        GivenPose::Motion { cos: r(0), sin: r(1), translation: Point2::from_ratios((7, 3), (11, 6)) },
    )
    .expect("reference instance is valid")
}

/// One row of the Bézout comparison tables.
#[derive(Clone, Debug)]
pub struct BezoutRow {
    pub rep: MotionRep,
    pub b_min: u128,
    /// `None` where only one grouping exists.
    pub b_max: Option<u128>,
    pub best: &'static [&'static str],
    pub worst: &'static [&'static str],
    /// Degree of the Lagrange function as (numerator, denominator).
    pub dol: (u32, u32),
}

const fn rep(kind: RepKind, group: MotionGroup) -> MotionRep {
    MotionRep { kind, group }
}

/// Published minimal/maximal Bézout numbers, listed groupings and DOL.
pub fn bezout_table() -> Vec<BezoutRow> {
    use MotionGroup::{Se2, S2};
    use RepKind::*;
    vec![
        BezoutRow {
            rep: rep(Pbr, Se2),
            b_min: 144,
            b_max: Some(8448),
            best: &["x1a,y1a,x2a,y2a;l,m"],
            worst: &["x1a;x2a,m;y1a,l;y2a", "x1a,m;y2a,l;x2a;y1a"],
            dol: (4, 0),
        },
        BezoutRow {
            rep: rep(Perr, Se2),
            b_min: 360,
            b_max: Some(50992),
            best: &["a1,a2;a3,a4;l,m", "a1,a2,a4;a3;l,m"],
            worst: &["a1,l,a3;a2,m,a4", "a1,m,a4;a2,l,a3"],
            dol: (6, 0),
        },
        BezoutRow {
            rep: rep(Icr, Se2),
            b_min: 136,
            b_max: Some(2187),
            best: &["k;kt;l;m;tau,taut"],
            worst: &["k,taut;kt,m,tau,l", "k,m,l,taut;kt,tau"],
            dol: (4, 0),
        },
        BezoutRow { rep: rep(Bgr, Se2), b_min: 300, b_max: None, best: &["h:e0,e3,t1,t2;l"], worst: &[], dol: (5, 4) },
        BezoutRow {
            rep: rep(Dckr, Se2),
            b_min: 300,
            b_max: None,
            best: &["h:th,tht,si,sit;l"],
            worst: &[],
            dol: (5, 4),
        },
        BezoutRow {
            rep: rep(Pbr, S2),
            b_min: 96,
            b_max: Some(1296),
            best: &["x1a,y1a,x2a,y2a;l"],
            worst: &["x1a,y1a;x2a,y2a,l", "x1a,y2a;y1a,x2a,l"],
            dol: (4, 0),
        },
        BezoutRow {
            rep: rep(Perr, S2),
            b_min: 828,
            b_max: Some(14025),
            best: &["a1,a2;a3,a4;l"],
            // the second published worst grouping repeats a₃; a₄ is meant in the second group
            worst: &["a1,a2;a3,a4,l", "a2,a3;a1,a4,l"],
            dol: (6, 0),
        },
        BezoutRow {
            rep: rep(Icr, S2),
            b_min: 96,
            b_max: Some(1296),
            best: &["k,kt,tau,taut;l"],
            worst: &["kt,tau;k,taut,l", "k,taut;tau,kt,l"],
            dol: (4, 0),
        },
        BezoutRow {
            rep: rep(Dhr, S2),
            b_min: 165240,
            b_max: Some(194400),
            best: &["h:e0,e3,t0,t1,t2,t3;l,m"],
            worst: &["h:e0,e3,t0,t1,t2,t3;l;m"],
            dol: (11, 10),
        },
        BezoutRow {
            rep: rep(Qbr, S2),
            b_min: 41160,
            b_max: Some(82320),
            best: &["h:e0,e3,f0,f3,t1,t2;l,m"],
            worst: &["h:e0,e3,f0,f3,t1,t2;l;m"],
            dol: (7, 6),
        },
    ]
}

/// Published solution counts, with multiplicity, for the non-homogeneous runs.
pub fn solution_counts() -> Vec<(MotionRep, usize)> {
    use MotionGroup::{Se2, S2};
    use RepKind::*;
    vec![
        (rep(Pbr, Se2), 32),
        (rep(Icr, Se2), 32),
        (rep(Perr, Se2), 64),
        (rep(Pbr, S2), 19),
        (rep(Icr, S2), 19),
        (rep(Perr, S2), 86),
    ]
}

/// PERR S(2) solutions on the quadric `a₁² + a₂² = 0`.
pub const PERR_S2_ON_QUADRIC: usize = 10;
/// Finite endpoints of the squared-up BGR and DCKR runs.
pub const HOMOGENEOUS_FINITE: usize = 162;
/// Genuine solutions among them.
pub const HOMOGENEOUS_GENUINE: usize = 32;
/// Points on the two conics of the vanishing denominator.
pub const HOMOGENEOUS_ON_CONICS: usize = 2;
/// Squaring artifacts plus members of the 2-dimensional set.
pub const HOMOGENEOUS_REST: usize = 128;
/// Number of groupings of five and six variables.
pub const BELL_5: usize = 52;
pub const BELL_6: usize = 203;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bezout::VariableGrouping;

    #[test]
    fn listed_groupings_parse() {
        for row in bezout_table() {
            let names: Vec<String> = row.rep.variable_names().iter().map(|s| s.to_string()).collect();
            for spec in row.best.iter().chain(row.worst) {
                let g = VariableGrouping::parse(&names, spec).unwrap();
                assert_eq!(g.total_dim(), names.len() - usize::from(row.rep.kind.is_homogeneous()), "{spec}");
            }
        }
    }

    #[test]
    fn centroid_of_the_given_pose() {
        let c = reference_instance().given_centroid();
        assert_eq!(c, Point2::from_ratios((11, 6), (17, 6)));
    }
}
