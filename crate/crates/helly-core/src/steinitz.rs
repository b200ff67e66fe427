//! Quantitative Steinitz sparsification: from a vertex set whose hull
//! contains the unit ball, keep at most `2d` vertices whose hull still
//! contains the `1/(6 d^2)` ball. Selection is exhaustive at desk scale and
//! greedy-plus-swap beyond, always followed by verification.

use thiserror::Error;

use crate::geometry::{dot, hull_inradius_origin, GeometryError, VPolytope};
use crate::parallel;
use crate::witness::deterministic_sphere_grid;

#[derive(Debug, Error)]
pub enum SteinitzError {
    #[error("unit ball not contained in the hull: support {support} < 1 in direction {direction:?}")]
    BallNotContained { direction: Vec<f64>, support: f64 },
    #[error("no subset of the guaranteed size reaches the inradius threshold (best {best}, threshold {threshold}); this would contradict the sparsification guarantee")]
    CounterexampleCandidate { best: f64, threshold: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The guaranteed inradius `1/(6 d^2)` of the sparsified hull.
pub fn steinitz_threshold(d: usize) -> f64 {
    1.0 / (6.0 * (d * d) as f64)
}

/// Exhaustive search is used up to this many input vertices.
pub const EXHAUSTIVE_VERTEX_CAP: usize = 12;

/// Verify `B^d` is contained in the hull via support probes in `100 d`
/// directions; returns the first violating direction.
pub fn verify_ball_containment(q: &VPolytope) -> Result<(), SteinitzError> {
    let d = q.dim();
    for v in deterministic_sphere_grid(d, 100 * d) {
        let s = q.support(&v);
        if s < 1.0 - 1e-9 {
            return Err(SteinitzError::BallNotContained {
                direction: v,
                support: s,
            });
        }
    }
    Ok(())
}

fn subset_inradius(q: &VPolytope, idx: &[usize]) -> f64 {
    let pts: Vec<Vec<f64>> = idx.iter().map(|&i| q.vertices()[i].clone()).collect();
    match VPolytope::new(pts) {
        Ok(sub) => hull_inradius_origin(&sub),
        Err(_) => 0.0,
    }
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut subset = Vec::new();
    fn rec(n: usize, k: usize, start: usize, subset: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !subset.is_empty() {
            out.push(subset.clone());
        }
        if subset.len() == k {
            return;
        }
        for i in start..n {
            subset.push(i);
            rec(n, k, i + 1, subset, out);
            subset.pop();
        }
    }
    rec(n, k, 0, &mut subset, &mut out);
    out
}

/// Exhaustive argmax of the hull inradius over all subsets of at most `2d`
/// vertices; lexicographic tie-break.
pub fn sparsify_exhaustive(q: &VPolytope) -> Vec<usize> {
    let d = q.dim();
    let n = q.vertices().len();
    let subsets = all_subsets(n, (2 * d).min(n));
    let scores = parallel::map_slice(&subsets, |idx| subset_inradius(q, idx));
    let mut best = 0usize;
    for i in 1..subsets.len() {
        if scores[i] > scores[best] + 1e-15 {
            best = i;
        }
    }
    subsets[best].clone()
}

/// Greedy growth plus pairwise swap local search, restarted from each
/// forced first pick; used above desk scale.
pub fn sparsify_greedy(q: &VPolytope) -> Vec<usize> {
    let n = q.vertices().len();
    let starts: Vec<usize> = (0..n.min(16)).collect();
    let runs = parallel::map_slice(&starts, |&s| {
        let idx = greedy_from(q, s);
        (subset_inradius(q, &idx), idx)
    });
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (r, idx) in runs {
        let better = match &best {
            None => true,
            Some((br, bidx)) => r > br + 1e-15 || ((r - br).abs() <= 1e-15 && idx < *bidx),
        };
        if better {
            best = Some((r, idx));
        }
    }
    best.expect("at least one start").1
}

fn greedy_from(q: &VPolytope, first: usize) -> Vec<usize> {
    let d = q.dim();
    let n = q.vertices().len();
    let cap = (2 * d).min(n);
    let probes = deterministic_sphere_grid(d, 50 * d);
    // Secondary greedy key before the origin is enclosed: worst support of
    // the subset hull over the probe directions.
    let min_support = |idx: &[usize]| -> f64 {
        probes
            .iter()
            .map(|v| {
                idx.iter()
                    .map(|&i| dot(&q.vertices()[i], v))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut chosen: Vec<usize> = vec![first];
    while chosen.len() < cap {
        let mut best: Option<(usize, f64, f64)> = None;
        for cand in 0..n {
            if chosen.contains(&cand) {
                continue;
            }
            let mut idx = chosen.clone();
            idx.push(cand);
            let r = subset_inradius(q, &idx);
            let s = min_support(&idx);
            let better = match best {
                None => true,
                Some((_, br, bs)) => r > br + 1e-15 || ((r - br).abs() <= 1e-15 && s > bs + 1e-15),
            };
            if better {
                best = Some((cand, r, s));
            }
        }
        chosen.push(best.expect("candidates remain").0);
    }
    chosen.sort_unstable();

    // Pairwise swaps, best-improvement accepted, until a pass stalls.
    for _ in 0..60 {
        let current = subset_inradius(q, &chosen);
        let mut best_swap: Option<(Vec<usize>, f64)> = None;
        for slot in 0..chosen.len() {
            for cand in 0..n {
                if chosen.contains(&cand) {
                    continue;
                }
                let mut idx = chosen.clone();
                idx[slot] = cand;
                idx.sort_unstable();
                let r = subset_inradius(q, &idx);
                if r > current + 1e-12 && best_swap.as_ref().map_or(true, |(_, br)| r > *br) {
                    best_swap = Some((idx, r));
                }
            }
        }
        match best_swap {
            Some((idx, _)) => chosen = idx,
            None => break,
        }
    }
    chosen
}

/// Select at most `2d` vertex indices whose hull keeps the
/// `1/(6 d^2)` ball. Verifies the ball precondition and the output bound.
pub fn sparsify(q: &VPolytope) -> Result<Vec<usize>, SteinitzError> {
    verify_ball_containment(q)?;
    let d = q.dim();
    let idx = if q.vertices().len() <= EXHAUSTIVE_VERTEX_CAP {
        sparsify_exhaustive(q)
    } else {
        sparsify_greedy(q)
    };
    let r = subset_inradius(q, &idx);
    let threshold = steinitz_threshold(d);
    if r + 1e-9 < threshold {
        return Err(SteinitzError::CounterexampleCandidate {
            best: r,
            threshold,
        });
    }
    Ok(idx)
}

/// Inradius of `conv(S)` about the origin and the pass flag against the
/// `1/(6 d^2)` threshold.
pub fn verify_sparsification(s: &VPolytope, d: usize) -> (f64, bool) {
    let r = hull_inradius_origin(s);
    (r, r >= steinitz_threshold(d) - 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_points(n: usize, radius: f64, phase: f64) -> VPolytope {
        VPolytope::new(
            (0..n)
                .map(|k| {
                    let th = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + phase;
                    vec![radius * th.cos(), radius * th.sin()]
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn square_keeps_all_four_vertices() {
        let q = VPolytope::new(vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ])
        .unwrap();
        let idx = sparsify(&q).unwrap();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        let (r, pass) = verify_sparsification(&q, 2);
        assert!(pass);
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hexagon_best_four_subset() {
        // Regular hexagon with inradius 1 (circumradius 2/sqrt(3)).
        let q = circle_points(6, 2.0 / 3.0f64.sqrt(), 0.1);
        let idx = sparsify(&q).unwrap();
        assert!(idx.len() <= 4);
        let pts: Vec<Vec<f64>> = idx.iter().map(|&i| q.vertices()[i].clone()).collect();
        let sub = VPolytope::new(pts).unwrap();
        let (r, pass) = verify_sparsification(&sub, 2);
        assert!(pass, "inradius {r}");
        // Exhaustive oracle over all 4-subsets agrees with the selection.
        let mut best = 0.0f64;
        for a in 0..6 {
            for b in (a + 1)..6 {
                for c in (b + 1)..6 {
                    for e in (c + 1)..6 {
                        best = best.max(subset_inradius(&q, &[a, b, c, e]));
                    }
                }
            }
        }
        assert!((r - best).abs() < 1e-9);
    }

    #[test]
    fn twelve_boundary_points() {
        let q = circle_points(12, 1.05, 0.35);
        let idx = sparsify(&q).unwrap();
        assert!(idx.len() <= 4);
        let pts: Vec<Vec<f64>> = idx.iter().map(|&i| q.vertices()[i].clone()).collect();
        let (r, pass) = verify_sparsification(&VPolytope::new(pts).unwrap(), 2);
        assert!(pass && r >= steinitz_threshold(2));
    }

    #[test]
    fn verification_examples() {
        let cross = VPolytope::new(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ])
        .unwrap();
        let (r, pass) = verify_sparsification(&cross, 2);
        assert!(pass);
        assert!((r - 1.0 / 2.0f64.sqrt()).abs() < 1e-9);

        let boundary = VPolytope::new(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
        ])
        .unwrap();
        let (r, pass) = verify_sparsification(&boundary, 2);
        assert_eq!(r, 0.0);
        assert!(!pass);
    }

    #[test]
    fn containment_precondition_is_checked() {
        let small = circle_points(8, 0.5, 0.0);
        match sparsify(&small) {
            Err(SteinitzError::BallNotContained { support, .. }) => assert!(support < 1.0),
            other => panic!("expected containment failure, got {other:?}"),
        }
    }

    #[test]
    fn greedy_tracks_exhaustive_quality() {
        for seed in 0..20u64 {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Random points on radii [1.02, 1.6]: hull strictly contains B^2.
            let pts: Vec<Vec<f64>> = (0..10)
                .map(|k| {
                    let th = 2.0 * std::f64::consts::PI * (k as f64) / 10.0
                        + rng.gen_range(-0.15..0.15);
                    let r = rng.gen_range(1.05..1.6) / (std::f64::consts::PI / 10.0).cos();
                    vec![r * th.cos(), r * th.sin()]
                })
                .collect();
            let q = VPolytope::new(pts).unwrap();
            if verify_ball_containment(&q).is_err() {
                continue;
            }
            let ex = subset_inradius(&q, &sparsify_exhaustive(&q));
            let gr = subset_inradius(&q, &sparsify_greedy(&q));
            assert!(gr >= 0.9 * ex, "seed {seed}: greedy {gr} exhaustive {ex}");
            assert!(ex >= steinitz_threshold(2));
        }
    }

    #[test]
    fn output_size_is_bounded() {
        for n in [4usize, 7, 12] {
            // Circumradius padded so the inscribed n-gon still contains B^2.
            let r = 1.1 / (std::f64::consts::PI / n as f64).cos();
            let q = circle_points(n, r, 0.05);
            let idx = sparsify(&q).unwrap();
            assert!(idx.len() <= 4);
        }
    }
}
