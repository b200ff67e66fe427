//! Colorful quantitative diameter selection over 2d color classes, with the
//! proof-side pigeonhole pipeline available as a diagnostic trace.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{diameter, intersect, width, Direction, GeometryError, HPolytope};
use crate::parallel;
use crate::witness::{diameter_certificate, DiameterCertificate, WitnessError, WitnessSample};

#[derive(Debug, Error)]
pub enum DiameterHellyError {
    #[error("expected {expected} color classes, got {got}")]
    WrongClassCount { expected: usize, got: usize },
    #[error("color class {0} is empty")]
    EmptyClass(usize),
    #[error("dimension mismatch inside class {0}")]
    DimensionMismatch(usize),
    #[error("precondition violated: measured diameter {measured} is not below {threshold}")]
    PreconditionViolated { measured: f64, threshold: f64 },
    #[error("desk-scale limit exceeded: {0}")]
    DeskScaleExceeded(String),
    #[error("no qualifying output exists; this instance would contradict the guarantee: {0}")]
    CounterexampleCandidate(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// Exactly `2d` nonempty color classes of convex bodies in `R^d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColorFamilies {
    #[serde(rename = "d")]
    pub dim: usize,
    pub families: Vec<Vec<HPolytope>>,
}

impl ColorFamilies {
    pub fn new(dim: usize, families: Vec<Vec<HPolytope>>) -> Result<Self, DiameterHellyError> {
        if families.len() != 2 * dim {
            return Err(DiameterHellyError::WrongClassCount {
                expected: 2 * dim,
                got: families.len(),
            });
        }
        for (i, class) in families.iter().enumerate() {
            if class.is_empty() {
                return Err(DiameterHellyError::EmptyClass(i));
            }
            if class.iter().any(|p| p.dim() != dim) {
                return Err(DiameterHellyError::DimensionMismatch(i));
            }
        }
        Ok(ColorFamilies { dim, families })
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.families.iter().map(|c| c.len()).collect()
    }

    pub fn rainbow_count(&self) -> u128 {
        self.families.iter().map(|c| c.len() as u128).product()
    }
}

/// One member index per class, in class order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowSelection {
    pub picks: Vec<usize>,
}

/// Decode the `idx`-th rainbow selection in lexicographic order (first class
/// most significant).
pub fn decode_rainbow(sizes: &[usize], mut idx: u128) -> RainbowSelection {
    let mut picks = vec![0usize; sizes.len()];
    for i in (0..sizes.len()).rev() {
        let s = sizes[i] as u128;
        picks[i] = (idx % s) as usize;
        idx /= s;
    }
    RainbowSelection { picks }
}

/// Small-diameter threshold `1/(2 d^2)` of the non-colorful core step.
pub fn core_diameter_threshold(d: usize) -> f64 {
    1.0 / (2.0 * (d * d) as f64)
}

/// Rainbow hypothesis threshold `(2d)^{2d}`.
pub fn rainbow_hypothesis_threshold(d: usize) -> f64 {
    (2.0 * d as f64).powi(2 * d as i32)
}

/// The guaranteed class diameter `1/(2 d^2 (2d)^{2d})` under the plain
/// unit-diameter hypothesis.
pub fn colorful_diameter_guarantee(d: usize) -> f64 {
    1.0 / (2.0 * (d * d) as f64 * rainbow_hypothesis_threshold(d))
}

fn intersection_of(sets: &[&HPolytope]) -> Result<HPolytope, GeometryError> {
    let owned: Vec<HPolytope> = sets.iter().map(|&p| p.clone()).collect();
    intersect(&owned)
}

fn rainbow_intersection(
    f: &ColorFamilies,
    sel: &RainbowSelection,
) -> Result<HPolytope, GeometryError> {
    let refs: Vec<&HPolytope> = f
        .families
        .iter()
        .zip(&sel.picks)
        .map(|(class, &i)| &class[i])
        .collect();
    intersection_of(&refs)
}

/// Width treating an empty intersection as zero.
fn width_or_zero(p: &HPolytope, u: &Direction) -> Result<f64, GeometryError> {
    match width(p, u) {
        Ok(w) => Ok(w),
        Err(GeometryError::Infeasible) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Diameter treating an empty intersection as zero.
fn diameter_or_zero(p: &HPolytope) -> Result<f64, GeometryError> {
    match diameter(p) {
        Ok(d) => Ok(d.value()),
        Err(GeometryError::Infeasible) => Ok(0.0),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DirectionalCheck {
    /// A class whose full intersection has width at least one in `u`.
    Class { index: usize, width: f64 },
    /// A rainbow selection whose intersection has width below one in `u`.
    Violation {
        selection: RainbowSelection,
        width: f64,
    },
}

/// The directional step: wide classes are found on the cheap path first;
/// only when every class is narrow does the rainbow search run, and it must
/// then produce a sub-unit selection.
pub fn directional_colorful_check(
    f: &ColorFamilies,
    u: &Direction,
) -> Result<DirectionalCheck, DiameterHellyError> {
    for (i, class) in f.families.iter().enumerate() {
        let refs: Vec<&HPolytope> = class.iter().collect();
        let w = width_or_zero(&intersection_of(&refs)?, u)?;
        if w >= 1.0 - 1e-9 {
            return Ok(DirectionalCheck::Class { index: i, width: w });
        }
    }
    let sizes = f.class_sizes();
    let total = f.rainbow_count();
    if total > RAINBOW_ENUMERATION_CAP {
        return Err(DiameterHellyError::DeskScaleExceeded(format!(
            "{total} rainbow selections"
        )));
    }
    let widths = parallel::map_range(total as usize, |idx| {
        let sel = decode_rainbow(&sizes, idx as u128);
        let w = rainbow_intersection(f, &sel).and_then(|p| width_or_zero(&p, u));
        (sel, w)
    });
    for (sel, w) in widths {
        let w = w?;
        if w < 1.0 {
            return Ok(DirectionalCheck::Violation {
                selection: sel,
                width: w,
            });
        }
    }
    Err(DiameterHellyError::CounterexampleCandidate(
        "all rainbow widths at least one yet no class reaches width one".into(),
    ))
}

/// Exhaustive search for a subfamily of at most `2d` members whose
/// intersection has diameter below one; smallest-diameter-first tie-break.
/// Requires the full intersection to have diameter below `1/(2 d^2)`.
pub fn qhd_core_subfamily(
    family: &[HPolytope],
    d: usize,
) -> Result<Vec<usize>, DiameterHellyError> {
    if family.is_empty() {
        return Err(DiameterHellyError::EmptyClass(0));
    }
    if family.len() > 12 {
        return Err(DiameterHellyError::DeskScaleExceeded(format!(
            "family of {} members",
            family.len()
        )));
    }
    let refs: Vec<&HPolytope> = family.iter().collect();
    let full = diameter_or_zero(&intersection_of(&refs)?)?;
    let threshold = core_diameter_threshold(d);
    if full >= threshold {
        return Err(DiameterHellyError::PreconditionViolated {
            measured: full,
            threshold,
        });
    }
    let cap = (2 * d).min(family.len());
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut subset: Vec<usize> = Vec::new();
    search_subsets(family.len(), cap, 0, &mut subset, &mut |idx| {
        let refs: Vec<&HPolytope> = idx.iter().map(|&i| &family[i]).collect();
        let dia = match intersection_of(&refs).and_then(|p| diameter_or_zero(&p)) {
            Ok(v) => v,
            Err(_) => return,
        };
        let better = match &best {
            None => true,
            Some((bd, bidx)) => {
                dia < bd - 1e-15 || ((dia - bd).abs() <= 1e-15 && idx < &bidx[..])
            }
        };
        if better {
            best = Some((dia, idx.to_vec()));
        }
    });
    match best {
        Some((dia, idx)) if dia < 1.0 => Ok(idx),
        _ => Err(DiameterHellyError::CounterexampleCandidate(
            "no subfamily of the guaranteed size has sub-unit diameter".into(),
        )),
    }
}

fn search_subsets(
    n: usize,
    cap: usize,
    start: usize,
    subset: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if !subset.is_empty() {
        f(subset);
    }
    if subset.len() == cap {
        return;
    }
    for i in start..n {
        subset.push(i);
        search_subsets(n, cap, i + 1, subset, f);
        subset.pop();
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SelectionOutcome {
    /// A class whose full intersection is wide, with its exact diameter.
    Class { index: usize, diameter: f64 },
    /// A rainbow selection failing the hypothesis, with its exact diameter.
    HypothesisViolation {
        selection: RainbowSelection,
        diameter: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionReport {
    pub outcome: SelectionOutcome,
    /// True when the hypothesis was only sampled, not enumerated.
    pub hypothesis_sampled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<DiagnosticTrace>,
}

/// Hypothesis scan cap before switching to seeded sampling.
pub const RAINBOW_ENUMERATION_CAP: u128 = 1_000_000;

/// The colorful diameter selector. The theorem is existential, so the
/// selector measures class diameters directly; the pigeonhole proof pipeline
/// is a separate diagnostic ([`pigeonhole_diagnostic`]).
pub fn colorful_diameter_select(
    f: &ColorFamilies,
    seed: u64,
) -> Result<SelectionReport, DiameterHellyError> {
    let d = f.dim;
    let sizes = f.class_sizes();
    let threshold = rainbow_hypothesis_threshold(d);
    let total = f.rainbow_count();
    let sampled = total > RAINBOW_ENUMERATION_CAP;

    let indices: Vec<u128> = if sampled {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..RAINBOW_ENUMERATION_CAP as usize)
            .map(|_| rng.gen_range(0..total))
            .collect()
    } else {
        (0..total).collect()
    };
    let diameters = parallel::map_slice(&indices, |&idx| {
        let sel = decode_rainbow(&sizes, idx);
        let dia = rainbow_intersection(f, &sel).and_then(|p| diameter_or_zero(&p));
        (sel, dia)
    });
    for (sel, dia) in diameters {
        let dia = dia?;
        if dia <= threshold {
            return Ok(SelectionReport {
                outcome: SelectionOutcome::HypothesisViolation {
                    selection: sel,
                    diameter: dia,
                },
                hypothesis_sampled: sampled,
                diagnostic: None,
            });
        }
    }

    let class_diams = parallel::map_slice(&f.families, |class| {
        let refs: Vec<&HPolytope> = class.iter().collect();
        intersection_of(&refs).and_then(|p| diameter_or_zero(&p))
    });
    let mut best: Option<(usize, f64)> = None;
    for (i, dia) in class_diams.into_iter().enumerate() {
        let dia = dia?;
        if best.map_or(true, |(_, b)| dia > b) {
            best = Some((i, dia));
        }
    }
    let (index, dia) = best.expect("at least one class");
    if dia > core_diameter_threshold(d) {
        Ok(SelectionReport {
            outcome: SelectionOutcome::Class {
                index,
                diameter: dia,
            },
            hypothesis_sampled: sampled,
            diagnostic: None,
        })
    } else {
        Err(DiameterHellyError::CounterexampleCandidate(format!(
            "hypothesis holds but the widest class has diameter {dia}"
        )))
    }
}

/// Trace of the proof-side pipeline run on an instance whose classes all
/// have small intersections: core subfamilies, the scaled witness-set cover
/// of the sphere, the pigeonhole winner and its certified diameter bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticTrace {
    pub lambda: f64,
    pub core_subfamilies: Vec<Vec<usize>>,
    pub directions: usize,
    pub covered: bool,
    pub winner: RainbowSelection,
    pub sampled_measure: f64,
    pub pigeonhole_floor: f64,
    pub zone_half_width: f64,
    pub certified_bound: f64,
    pub winner_diameter: f64,
}

/// Run the contradiction pipeline: requires every class intersection to have
/// diameter below `1/(2 d^2)` (the synthetic-contradiction setting).
pub fn pigeonhole_diagnostic(
    f: &ColorFamilies,
    n_directions: usize,
    seed: u64,
) -> Result<DiagnosticTrace, DiameterHellyError> {
    let d = f.dim;
    let cores: Vec<Vec<usize>> = f
        .families
        .iter()
        .map(|class| qhd_core_subfamily(class, d))
        .collect::<Result<_, _>>()?;

    let core_intersections: Vec<HPolytope> = f
        .families
        .iter()
        .zip(&cores)
        .map(|(class, idx)| {
            let refs: Vec<&HPolytope> = idx.iter().map(|&i| &class[i]).collect();
            intersection_of(&refs)
        })
        .collect::<Result<_, _>>()?;
    let mut lambda = 0.0f64;
    for p in &core_intersections {
        lambda = lambda.max(diameter_or_zero(p)?);
    }

    let core_sizes: Vec<usize> = cores.iter().map(|c| c.len()).collect();
    let total: u128 = core_sizes.iter().map(|&s| s as u128).product();
    if total > RAINBOW_ENUMERATION_CAP {
        return Err(DiameterHellyError::DeskScaleExceeded(format!(
            "{total} primed rainbow selections"
        )));
    }
    let primed: Vec<HPolytope> = (0..total)
        .map(|idx| {
            let sel = decode_rainbow(&core_sizes, idx);
            let refs: Vec<&HPolytope> = f
                .families
                .iter()
                .zip(&cores)
                .zip(&sel.picks)
                .map(|((class, core), &j)| &class[core[j]])
                .collect();
            intersection_of(&refs)
        })
        .collect::<Result<_, _>>()?;

    // Assign each sampled direction to the first primed selection whose
    // intersection is thin in it; the union must cover the sphere.
    let dirs = crate::witness::sample_unit_sphere(d, n_directions, seed);
    let assignment = parallel::map_slice(&dirs, |u| {
        let dir = Direction::normalize(u).expect("sampled directions are unit");
        for (r, p) in primed.iter().enumerate() {
            match width_or_zero(p, &dir) {
                Ok(w) if w <= lambda + 1e-9 => return Ok(Some(r)),
                Ok(_) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    });
    let mut counts = vec![0usize; primed.len()];
    let mut covered = true;
    let mut assigned: Vec<Option<usize>> = Vec::with_capacity(dirs.len());
    for a in assignment {
        let a = a?;
        match a {
            Some(r) => counts[r] += 1,
            None => covered = false,
        }
        assigned.push(a);
    }
    let mut winner = 0usize;
    for (r, &c) in counts.iter().enumerate() {
        if c > counts[winner] {
            winner = r;
        }
    }
    let sampled_measure = counts[winner] as f64 / dirs.len() as f64;

    let winner_dirs: Vec<Vec<f64>> = dirs
        .iter()
        .zip(&assigned)
        .filter(|(_, a)| **a == Some(winner))
        .flat_map(|(u, _)| {
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            [u.clone(), neg]
        })
        .collect();
    let sample = WitnessSample {
        lambda,
        directions: winner_dirs,
    };
    let (zone_half_width, certified_bound) =
        match diameter_certificate(&primed[winner], lambda, &sample)? {
            DiameterCertificate::Certified { omega, bound, .. } => (omega, bound),
            DiameterCertificate::NoCertificate => (0.0, f64::INFINITY),
        };
    let winner_diameter = diameter_or_zero(&primed[winner])?;

    Ok(DiagnosticTrace {
        lambda,
        core_subfamilies: cores,
        directions: dirs.len(),
        covered,
        winner: decode_rainbow(&core_sizes, winner as u128),
        sampled_measure,
        pigeonhole_floor: 1.0 / rainbow_hypothesis_threshold(d),
        zone_half_width,
        certified_bound,
        winner_diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: f64, hi: f64) -> HPolytope {
        HPolytope::from_box(&[lo], &[hi]).unwrap()
    }

    #[test]
    fn constants_table() {
        assert_eq!(core_diameter_threshold(1), 0.5);
        assert_eq!(core_diameter_threshold(2), 0.125);
        assert_eq!(rainbow_hypothesis_threshold(1), 4.0);
        assert_eq!(rainbow_hypothesis_threshold(2), 256.0);
        assert!((colorful_diameter_guarantee(1) - 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn directional_check_on_overlapping_intervals() {
        // Two classes of intervals; every rainbow pair overlaps in length
        // at least one, so some class must be long in the only direction.
        let f = ColorFamilies::new(
            1,
            vec![
                vec![interval(0.0, 3.0), interval(1.0, 4.0)],
                vec![interval(0.5, 3.5), interval(1.5, 4.5)],
            ],
        )
        .unwrap();
        let u = Direction::axis(1, 0);
        // Oracle: exhaustive rainbow widths.
        for sel in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let refs = vec![
                f.families[0][sel[0]].clone(),
                f.families[1][sel[1]].clone(),
            ];
            let w = width(&intersect(&refs).unwrap(), &u).unwrap();
            assert!(w >= 1.0);
        }
        match directional_colorful_check(&f, &u).unwrap() {
            DirectionalCheck::Class { width: w, .. } => assert!(w >= 1.0 - 1e-9),
            other => panic!("expected class, got {other:?}"),
        }
    }

    #[test]
    fn directional_check_single_sets() {
        let f = ColorFamilies::new(
            1,
            vec![vec![interval(0.0, 2.0)], vec![interval(0.0, 2.0)]],
        )
        .unwrap();
        match directional_colorful_check(&f, &Direction::axis(1, 0)).unwrap() {
            DirectionalCheck::Class { width: w, .. } => assert!((w - 2.0).abs() < 1e-9),
            other => panic!("expected class, got {other:?}"),
        }
    }

    #[test]
    fn directional_check_reports_empty_rainbow() {
        let f = ColorFamilies::new(
            1,
            vec![vec![interval(0.0, 0.4)], vec![interval(0.6, 0.9)]],
        )
        .unwrap();
        match directional_colorful_check(&f, &Direction::axis(1, 0)).unwrap() {
            DirectionalCheck::Violation { width: w, .. } => assert_eq!(w, 0.0),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn core_subfamily_of_three_intervals() {
        // Tiny common intersection; some pair already has diameter < 1.
        let family = vec![
            interval(0.0, 1.2),
            interval(0.9, 2.0),
            interval(0.85, 1.1),
        ];
        let idx = qhd_core_subfamily(&family, 1).unwrap();
        assert!(idx.len() <= 2);
        let refs: Vec<HPolytope> = idx.iter().map(|&i| family[i].clone()).collect();
        let dia = diameter(&intersect(&refs).unwrap()).unwrap().value();
        assert!(dia < 1.0);
    }

    #[test]
    fn core_subfamily_returns_whole_family_when_small() {
        let family = vec![interval(0.0, 0.3), interval(0.1, 0.4)];
        let idx = qhd_core_subfamily(&family, 1).unwrap();
        assert_eq!(idx, vec![0, 1]);
    }

    #[test]
    fn core_subfamily_point_intersection() {
        let family = vec![
            interval(-2.0, 0.0),
            interval(0.0, 2.0),
            interval(-1.0, 1.0),
        ];
        let idx = qhd_core_subfamily(&family, 1).unwrap();
        assert!(idx.len() <= 2);
        let refs: Vec<HPolytope> = idx.iter().map(|&i| family[i].clone()).collect();
        let dia = diameter(&intersect(&refs).unwrap()).unwrap().value();
        assert!(dia < 1.0);
    }

    #[test]
    fn core_subfamily_checks_precondition() {
        let family = vec![interval(0.0, 5.0)];
        match qhd_core_subfamily(&family, 1) {
            Err(DiameterHellyError::PreconditionViolated { measured, .. }) => {
                assert!((measured - 5.0).abs() < 1e-9)
            }
            other => panic!("expected precondition violation, got {other:?}"),
        }
    }

    #[test]
    fn selector_on_long_intervals() {
        let f = ColorFamilies::new(
            1,
            vec![vec![interval(0.0, 100.0)], vec![interval(0.0, 100.0)]],
        )
        .unwrap();
        let report = colorful_diameter_select(&f, 0).unwrap();
        match report.outcome {
            SelectionOutcome::Class { diameter: dia, .. } => {
                assert!((dia - 100.0).abs() < 1e-9);
                assert!(dia > core_diameter_threshold(1));
            }
            other => panic!("expected class, got {other:?}"),
        }
        assert!(!report.hypothesis_sampled);
    }

    #[test]
    fn selector_flags_hypothesis_violation() {
        let f = ColorFamilies::new(
            1,
            vec![vec![interval(0.0, 10.0)], vec![interval(5.0, 6.0)]],
        )
        .unwrap();
        let report = colorful_diameter_select(&f, 0).unwrap();
        match report.outcome {
            SelectionOutcome::HypothesisViolation {
                selection,
                diameter: dia,
            } => {
                assert_eq!(selection.picks, vec![0, 0]);
                assert!((dia - 1.0).abs() < 1e-9);
                assert!(dia <= rainbow_hypothesis_threshold(1) + 1e-9);
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn selector_on_planar_boxes() {
        // Four classes of large boxes all containing a huge common box.
        let big = rainbow_hypothesis_threshold(2) * 1.5;
        let mk =
            |dx: f64, dy: f64| HPolytope::from_box(&[-dx, -dy], &[big + dx, big + dy]).unwrap();
        let f = ColorFamilies::new(
            2,
            vec![
                vec![mk(1.0, 2.0), mk(3.0, 0.5)],
                vec![mk(0.0, 0.0)],
                vec![mk(2.0, 2.0), mk(0.3, 1.7)],
                vec![mk(1.1, 0.2)],
            ],
        )
        .unwrap();
        let report = colorful_diameter_select(&f, 0).unwrap();
        match report.outcome {
            SelectionOutcome::Class {
                index,
                diameter: dia,
            } => {
                // Exhaustive verification of the returned class.
                let refs: Vec<&HPolytope> = f.families[index].iter().collect();
                let d2 = diameter(&intersection_of(&refs).unwrap()).unwrap().value();
                assert!((d2 - dia).abs() < 1e-9);
                assert!(dia > core_diameter_threshold(2) - 1e-9);
            }
            other => panic!("expected class, got {other:?}"),
        }
    }

    #[test]
    fn diagnostic_trace_finds_heavy_witness_set() {
        // All classes have tiny intersections: the synthetic-contradiction
        // setting. The trace must cover the sphere and exhibit a selection
        // with sampled measure at least the pigeonhole floor.
        let f = ColorFamilies::new(
            1,
            vec![
                vec![interval(0.0, 0.3), interval(0.2, 0.5)],
                vec![interval(0.1, 0.45), interval(0.25, 0.6)],
            ],
        )
        .unwrap();
        let trace = pigeonhole_diagnostic(&f, 64, 5).unwrap();
        assert!(trace.lambda < 1.0);
        assert!(trace.covered);
        assert!(trace.sampled_measure >= trace.pigeonhole_floor);
        assert!(trace.winner_diameter <= trace.certified_bound + 1e-9);
        assert!(trace.certified_bound < rainbow_hypothesis_threshold(1));
    }
}
