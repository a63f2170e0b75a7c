//! Scan the m-plane for points where the two l-sheets of the figure-eight
//! curve come together: a coarse pass with a loose threshold, then a fine
//! grid around each cluster of hits.

use apoly::knots::KnotDb;
use apoly::tracker::{probe_branch_points, BranchCandidate, Grid};

fn clusters(hits: Vec<BranchCandidate>, radius: f64) -> Vec<BranchCandidate> {
    let mut best: Vec<BranchCandidate> = Vec::new();
    for h in hits {
        match best.iter_mut().find(|g| (g.m - h.m).norm() < radius) {
            Some(g) if h.relative_dadl < g.relative_dadl => *g = h,
            Some(_) => {}
            None => best.push(h),
        }
    }
    best
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = KnotDb::builtin().get("figure-eight")?.polynomial()?;
    let coarse = Grid {
        re_min: -2.0,
        re_max: 2.0,
        im_min: -2.0,
        im_max: 2.0,
        nx: 201,
        ny: 201,
    };
    let rough = clusters(probe_branch_points(&a, &coarse, 0.3)?, 0.15);
    println!("{} clusters on the coarse grid", rough.len());

    let mut found = Vec::new();
    for g in rough {
        let h = 0.02;
        let fine = Grid {
            re_min: g.m.re - h,
            re_max: g.m.re + h,
            im_min: g.m.im - h,
            im_max: g.m.im + h,
            nx: 201,
            ny: 201,
        };
        found.extend(clusters(probe_branch_points(&a, &fine, 0.02)?, 0.05));
    }
    found.sort_by(|x, y| x.m.arg().total_cmp(&y.m.arg()));
    for b in &found {
        println!(
            "m ~ {:>18.4}  |m| = {:.4}  arg m / pi = {:>7.4}  l ~ {:.4}  |l dA/dl| / scale = {:.1e}",
            b.m,
            b.m.norm(),
            b.m.arg() / std::f64::consts::PI,
            b.l,
            b.relative_dadl
        );
    }
    Ok(())
}
