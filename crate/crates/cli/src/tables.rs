//! Regeneration of the Bézout and solution-count tables.

use singdist_core::analysis::{self, CountRow, PipelineConfig, SolutionTag};
use singdist_core::bezout::{self, VariableGrouping};
use singdist_core::geometry::{MotionGroup, MotionRep, RepKind};
use singdist_core::instance::ManipulatorInstance;
use singdist_core::polysys;
use singdist_core::reference::{self, BezoutRow};
use singdist_core::Result;

fn fmt_opt(v: Option<u128>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One computed Bézout row, the mismatches against its published counterpart
/// and notes on listed worst groupings that do not attain the maximum.
fn bezout_row(inst: &ManipulatorInstance, row: &BezoutRow) -> Result<(String, Vec<String>, Vec<String>)> {
    let coeffs = polysys::default_coeffs(row.rep.kind, true, 7);
    let (lag, sys) = polysys::build_system(inst, &row.rep, &coeffs)?;
    let search = bezout::search_groupings(&sys)?;
    let names: Vec<String> = sys.vars().to_vec();
    let single = search.rows.len() == 1;
    let b_max = (!single).then_some(search.max);
    let dol = lag.total_degrees();
    let mut diff = Vec::new();
    let rep = row.rep;
    if search.min != row.b_min {
        diff.push(format!("{rep}: B_min {} (published {})", search.min, row.b_min));
    }
    if row.b_max.is_some() && b_max != row.b_max {
        diff.push(format!("{rep}: B_max {} (published {})", fmt_opt(b_max), fmt_opt(row.b_max)));
    }
    for spec in row.best {
        let got = bezout::bezout_number(&sys, &VariableGrouping::parse(&names, spec)?)?;
        if got != row.b_min {
            diff.push(format!("{rep}: grouping {spec} gives {got} (published {})", row.b_min));
        }
    }
    let mut notes = Vec::new();
    for spec in row.worst {
        let got = bezout::bezout_number(&sys, &VariableGrouping::parse(&names, spec)?)?;
        if Some(got) != row.b_max {
            notes.push(format!("note: {rep}: listed worst grouping {spec} gives {got}"));
        }
    }
    if dol != row.dol {
        diff.push(format!("{rep}: DOL {}/{} (published {}/{})", dol.0, dol.1, row.dol.0, row.dol.1));
    }
    let best: Vec<String> = search.best_groupings().map(|g| g.spec()).collect();
    let line = format!(
        "{},{},{},{},{},{},{}/{},\"{}\"\n",
        rep.kind,
        rep.group,
        search.min,
        fmt_opt(b_max),
        row.b_min,
        fmt_opt(row.b_max),
        dol.0,
        dol.1,
        best.join(" | ")
    );
    Ok((line, diff, notes))
}

const BEZOUT_HEADER: &str = "representation,mode,b_min,b_max,published_min,published_max,dol,best_groupings\n";

/// The SE(2) table, the S(2) table (including the homogeneous rows), the diff lines and notes.
pub fn bezout_tables(inst: &ManipulatorInstance) -> Result<(String, String, Vec<String>, Vec<String>)> {
    let (mut t1, mut t2) = (BEZOUT_HEADER.to_string(), BEZOUT_HEADER.to_string());
    let (mut diff, mut notes) = (Vec::new(), Vec::new());
    for row in reference::bezout_table() {
        let (line, d, n) = bezout_row(inst, &row)?;
        notes.extend(n);
        let in_se2 = row.rep.group == MotionGroup::Se2 && !matches!(row.rep.kind, RepKind::Dhr | RepKind::Qbr);
        if in_se2 { &mut t1 } else { &mut t2 }.push_str(&line);
        diff.extend(d);
    }
    Ok((t1, t2, diff, notes))
}

/// Tracks every non-homogeneous representation plus BGR and DCKR.
pub fn count_table(inst: &ManipulatorInstance, seed: u64) -> Result<(String, Vec<String>)> {
    let published = reference::solution_counts();
    let mut reps: Vec<MotionRep> = published.iter().map(|(r, _)| *r).collect();
    reps.push(MotionRep::natural(RepKind::Bgr));
    reps.push(MotionRep::natural(RepKind::Dckr));
    let cfg = PipelineConfig::with_seed(seed);
    let mut rows = Vec::new();
    let mut diff = Vec::new();
    for rep in reps {
        let solved = analysis::solve(inst, &rep, &cfg)?;
        let report = analysis::report(inst, &solved)?;
        let row = CountRow::from_report(&report);
        let genuine = report.counts.get(SolutionTag::Genuine.name()).copied().unwrap_or(0);
        match published.iter().find(|(r, _)| *r == rep) {
            Some((_, want)) if row.finite != *want => {
                diff.push(format!("{rep}: {} finite solutions (published {want})", row.finite))
            }
            None => {
                if row.finite != reference::HOMOGENEOUS_FINITE {
                    diff.push(format!("{rep}: {} finite solutions (published {})", row.finite, reference::HOMOGENEOUS_FINITE));
                }
                if genuine != reference::HOMOGENEOUS_GENUINE {
                    diff.push(format!("{rep}: {genuine} genuine solutions (published {})", reference::HOMOGENEOUS_GENUINE));
                }
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok((analysis::count_table_csv(&rows), diff))
}
