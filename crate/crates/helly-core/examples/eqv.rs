use helly_core::logconcave::*;
use helly_core::geometry::HPolytope;

fn tent(peak: f64, v: f64, s1: f64, s2: f64) -> LogConcaveFn {
    LogConcaveFn::poly_log_linear(
        vec![
            LogLinearPiece { slope: vec![s1], intercept: -s1 * peak - v.ln() },
            LogLinearPiece { slope: vec![-s2], intercept: s2 * peak - v.ln() },
        ],
        HPolytope::centered_cube(1, 25.0),
        None,
    ).unwrap()
}

fn main() {
    let instances: Vec<LogConcaveFn> = vec![
        pointwise_min(vec![
            tent(0.3, 1.2, 0.9, 1.4),
            tent(-0.5, 0.8, 1.1, 0.7),
            LogConcaveFn::Const { level: 1.0, bbox: BoundingBox::cube(1, 25.0) },
        ]).unwrap(),
        pointwise_min(vec![tent(0.0, 1.0, 1.0, 1.0)]).unwrap(),
        pointwise_min(vec![
            tent(1.2, 1.5, 0.8, 0.9),
            tent(-0.8, 1.1, 1.3, 1.2),
        ]).unwrap(),
        LogConcaveFn::profile(1),
        LogConcaveFn::plateau(1.0, HPolytope::centered_cube(1, 1.0)).unwrap(),
        pointwise_min(vec![
            tent(0.7, 2.0, 1.2, 0.6),
            LogConcaveFn::Const { level: 0.9, bbox: BoundingBox::cube(1, 25.0) },
        ]).unwrap(),
    ];
    let opts = JohnSolverOptions::default();
    let t0 = std::time::Instant::now();
    let mut ncert = 0;
    for (i, f) in instances.iter().enumerate() {
        let r = john_function(f, &opts).unwrap();
        if r.certified { ncert += 1; }
        println!("#{i}: integral {:.6} res {:.2e} certified {} ncontacts {}",
            r.g.integral(), r.residuals.max(), r.certified, r.contacts.len());
    }
    println!("certified {}/{}  total {:?}", ncert, instances.len(), t0.elapsed());
}
