//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::time::{Duration, Instant};

use baseparam::analysis::{analyze, validate, Validation, ValidateOptions};
use baseparam::kinematics::Kinematics;
use baseparam::model::RobotModel;
use baseparam::nullspace::drng;
use baseparam::pga::{blade, Line, Motor, Multivector, Plane, Point};
use baseparam::regressor::{dr, parameter_vector, random_samples};
use baseparam::rigid_body::{bar, classical, hat, point_kinematics, tp_wrench, unhat, PseudoInertia, TetrahedralPoints};
use baseparam::robots;
use baseparam::tolerance;
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

const ROBOTS: [(&str, usize); 4] = [("puma560", 24), ("go2", 36), ("2rru1rrs", 45), ("2prs1psr", 47)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn load(name: &str) -> RobotModel {
    robots::bundled(name).expect("bundled robot").expect("bundled robot parses")
}

fn criterion1() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut total = Duration::ZERO;
    for (name, want) in ROBOTS {
        let model = load(name);
        let t = Instant::now();
        let d = analyze(&model).map(|a| a.report.d).unwrap_or(usize::MAX);
        total += t.elapsed();
        pass &= d == want;
        parts.push(format!("{name} d={d} (want {want})"));
    }
    pass &= total < Duration::from_secs(1);
    Outcome { pass, detail: format!("{}; total {:.1} ms (limit 1 s)", parts.join(", "), total.as_secs_f64() * 1e3) }
}

fn criterion2() -> Outcome {
    let model = load("puma560").with_gravity(Vector3::new(9.81, 0.0, 0.0));
    let d = analyze(&model).map(|a| a.report.d).unwrap_or(usize::MAX);
    Outcome { pass: d == 22, detail: format!("puma560 with gravity along x: d={d} (want 22)") }
}

/// Validates with enough requested samples to reach 100 accepted ones.
fn validate_100(model: &RobotModel) -> (Validation, Duration) {
    let t = Instant::now();
    let mut requested = 100;
    loop {
        let opts = ValidateOptions { samples: requested, seed: 1, ..Default::default() };
        let v = validate(model, &opts).expect("validation runs");
        if v.report.samples.accepted >= 100 || requested >= 400 {
            return (v, t.elapsed());
        }
        requested += 100 - v.report.samples.accepted.min(100) + 10;
    }
}

fn criterion3(runs: &[(Validation, Duration)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (v, dt) in runs {
        let r = &v.report;
        let ok = r.samples.accepted >= 100 && r.criteria.residual_ok && *dt < Duration::from_secs(30);
        pass &= ok;
        parts.push(format!(
            "{} {}/{} accepted, rel residual {:.1e}, {:.2} s",
            r.robot,
            r.samples.accepted,
            r.samples.requested,
            r.criteria.residual_rel,
            dt.as_secs_f64()
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion4(runs: &[(Validation, Duration)]) -> Outcome {
    // Numerical ranks are required for all robots but 2RRU-1RRS, whose
    // pivot report is surfaced instead.
    let expected_rank = [Some(36), Some(94), None, Some(23)];
    let mut pass = true;
    let mut parts = Vec::new();
    for ((v, _), want) in runs.iter().zip(expected_rank) {
        let r = &v.report;
        let num = &r.numerical;
        let kept = num.pivots[..num.rank].last().copied().unwrap_or(0.0);
        let dropped = num.pivots.get(num.rank).copied().unwrap_or(0.0);
        let rank_match = want.map_or(true, |w| num.rank == w);
        pass &= r.criteria.rank_ok && r.criteria.residual_ok && rank_match;
        let near = if num.has_near_threshold() {
            format!("near-threshold pivots at {:?}", num.near_threshold)
        } else {
            format!("no pivots within {:.0e}x of the threshold", tolerance::NEAR_THRESHOLD_BAND)
        };
        parts.push(format!(
            "{} rank(YB)={} rank(B)={}, QR rank {}{}, smallest kept pivot {:.1e}, largest dropped {:.1e}, {near}, Frobenius {}",
            r.robot,
            r.criteria.rank_yb,
            r.criteria.rank_b,
            num.rank,
            want.map_or(String::new(), |w| format!(" (want {w})")),
            kept,
            dropped,
            if r.criteria.residual_ok { "PASS" } else { "FAIL" }
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn random_line(rng: &mut impl Rng) -> Line {
    Line::new(
        Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    )
}

fn random_motor(rng: &mut impl Rng) -> (Motor, Matrix3<f64>, Vector3<f64>) {
    let r = random_rotation(rng);
    let p = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut t = Matrix4::identity();
    t.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    t.fixed_view_mut::<3, 1>(0, 3).copy_from(&p);
    (Motor::from_homogeneous(&t).expect("rigid"), r, p)
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = Line::ideal(Vector3::new(0.0, 0.0, 9.81));
    let mut worst_body: f64 = 0.0;
    for _ in 0..1000 {
        let body = random_body(&mut rng);
        let (m, r, p) = random_motor(&mut rng);
        let (v, vdot) = (random_line(&mut rng), random_line(&mut rng));
        let n = PseudoInertia::new(body.pseudo_inertia()).expect("symmetric");
        let w = tp_wrench(&n, &TetrahedralPoints::moving(&m, &v, &vdot, &g));
        let got = classical::wrench_to_force(&w);
        let i6 = body.spatial_inertia(&r, &p);
        let want = newton_euler(&i6, &classical::twist_to_motion(&v), &classical::twist_to_motion(&(vdot + g)));
        worst_body = worst_body.max(rel_err(got.as_slice(), want.as_slice()));
    }

    let model = load("puma560");
    let kin = Kinematics::new(&model);
    let links: Vec<ClassicalBody> = (0..6).map(|_| random_body(&mut rng)).collect();
    let zero = dh_poses(&robots::PUMA560_DH, &[0.0; 6]);
    let inertias: Vec<PseudoInertia> = links
        .iter()
        .zip(&zero)
        .map(|(b, t)| PseudoInertia::new(t * b.pseudo_inertia() * t.transpose()).expect("symmetric"))
        .collect();
    let theta = parameter_vector(&inertias);
    let mut worst_robot: f64 = 0.0;
    for _ in 0..100 {
        let q: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let qd: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let qdd: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let state = kin.body_states(&q, &qd, &qdd, None).expect("tree state");
        let tau = dr(&state.bodies, &model.g) * &theta;
        let want = rnea_dh(&robots::PUMA560_DH, &links, &q, &qd, &qdd, Vector3::new(0.0, 0.0, 9.81));
        worst_robot = worst_robot.max(rel_err(tau.as_slice(), &want));
    }
    Outcome {
        pass: worst_body <= 1e-9 && worst_robot <= 1e-8,
        detail: format!(
            "1000 bodies vs spatial Newton-Euler: max rel {worst_body:.1e} (tol 1e-9); puma560 Y theta vs DH RNEA over 100 states: max rel {worst_robot:.1e} (tol 1e-8)"
        ),
    }
}

fn criterion6() -> Outcome {
    // Fourth-order central stencils over the actuated path
    // `q_a + qd_a t + qdd_a t^2 / 2`.
    const H: f64 = 1e-3;
    let zero = Line::ZERO;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, _) in ROBOTS {
        let model = load(name);
        let kin = Kinematics::new(&model);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (mut ev, mut ea, mut states) = (0.0f64, 0.0f64, 0);
        for s in random_samples(&model, 40, 6) {
            // Same acceptance rule as the stacked regressor.
            let Ok(center) = kin.body_states(&s.q_a, &s.qd_a, &s.qdd_a, None) else { continue };
            if center.cond > tolerance::DEFAULT_COND_GATE {
                continue;
            }
            let at = |t: f64| -> Option<Vec<Motor>> {
                let q: Vec<f64> = (0..s.q_a.len()).map(|k| s.q_a[k] + s.qd_a[k] * t + 0.5 * s.qdd_a[k] * t * t).collect();
                let z = vec![0.0; q.len()];
                kin.body_states(&q, &z, &z, Some(&center.q)).ok().map(|st| st.bodies.iter().map(|b| b.m).collect())
            };
            let (Some(p2), Some(p1), Some(m1), Some(m2)) = (at(2.0 * H), at(H), at(-H), at(-2.0 * H)) else { continue };
            states += 1;
            for (i, b) in center.bodies.iter().enumerate() {
                let p0 = Point::euclidean(Vector3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
                let (p, pd, pdd) = point_kinematics(&p0, &b.m, &b.v, &b.vdot, &zero);
                let x = |m: &Motor| m.apply_point(&p0).coords().xyz();
                let (xp2, xp1, x0, xm1, xm2) = (x(&p2[i]), x(&p1[i]), p.coords().xyz(), x(&m1[i]), x(&m2[i]));
                let fd_v = (-xp2 + xp1 * 8.0 - xm1 * 8.0 + xm2) / (12.0 * H);
                let fd_a = (-xp2 + xp1 * 16.0 - x0 * 30.0 + xm1 * 16.0 - xm2) / (12.0 * H * H);
                let v = pd.coords().xyz();
                let a = pdd.coords().xyz();
                ev = ev.max((fd_v - v).norm() / v.norm().max(1.0));
                ea = ea.max((fd_a - a).norm() / a.norm().max(1.0));
            }
        }
        let ok = states >= 20 && ev <= 1e-6 && ea <= 1e-5;
        pass &= ok;
        parts.push(format!("{name} {states} states, velocity {ev:.1e}, acceleration {ea:.1e}"));
    }
    Outcome { pass, detail: format!("{} (tol 1e-6 / 1e-5 relative)", parts.join("; ")) }
}

fn e0123(x: &Multivector) -> f64 {
    x.0[blade::E0123]
}

fn criterion7() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = |rng: &mut ChaCha8Rng| Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let tol = tolerance::ALGEBRAIC * 64.0;
    let mut failures: Vec<&str> = Vec::new();
    let mut check = |ok: bool, what: &'static str| {
        if !ok && !failures.contains(&what) {
            failures.push(what);
        }
    };
    for _ in 0..CASES {
        let pl = |rng: &mut ChaCha8Rng| Plane::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (a, b, c) = (pl(&mut rng), pl(&mut rng), pl(&mut rng));
        let ab = a.to_mv().wedge(&b.to_mv());
        check((ab + b.to_mv().wedge(&a.to_mv())).max_abs() <= tol, "antisymmetry");

        let l1 = a.to_mv().wedge(&b.to_mv());
        let l2 = a.to_mv().wedge(&c.to_mv());
        check(e0123(&l1.wedge(&l2)).abs() <= tol, "theorem 1 (coplanar)");

        let (p, q) = (u(&mut rng), u(&mut rng));
        let d = u(&mut rng).normalize();
        let e = u(&mut rng).normalize();
        let gap = (q - p).dot(&d.cross(&e));
        let w = e0123(&Line::rotation_axis(d, p).to_mv().wedge(&Line::rotation_axis(e, q).to_mv()));
        check((w.abs() - gap.abs()).abs() <= tol, "theorem 1 (skew)");

        let (r, s) = (Point::euclidean(u(&mut rng)), Point::euclidean(u(&mut rng)));
        let line = Point::euclidean(p).vee(&r);
        let t: f64 = rng.gen_range(-3.0..3.0);
        let on = Point::euclidean(p) * (1.0 - t) + r * t;
        check(e0123(&line.to_mv().wedge(&on.vee(&s).to_mv())).abs() <= tol, "corollary (point on line)");

        let dir = |rng: &mut ChaCha8Rng| Point::direction(Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let inf = dir(&mut rng).vee(&dir(&mut rng));
        check(e0123(&inf.to_mv().wedge(&dir(&mut rng).vee(&dir(&mut rng)).to_mv())).abs() <= tol, "corollary (infinite)");

        let (m1, _, _) = random_motor(&mut rng);
        let (m2, _, _) = random_motor(&mut rng);
        let (m3, _, _) = random_motor(&mut rng);
        let (scalar, pseudo) = m1.then(&m2).then(&m3).unit_defect();
        check((scalar - 1.0).abs() <= tolerance::MOTOR_UNIT && pseudo.abs() <= tolerance::MOTOR_UNIT, "motor unitarity");

        let nmat = random_body(&mut rng).pseudo_inertia();
        check(unhat(&hat(&nmat)) == nmat, "hat/unhat");

        let rmat = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let lhs: f64 = bar(&rmat).iter().zip(hat(&nmat)).map(|(x, y)| x * y).sum();
        let rhs: f64 = rmat.component_mul(&nmat).sum();
        check((lhs - rhs).abs() <= tolerance::ALGEBRAIC * (1.0 + rhs.abs()), "bar contraction");

        let c4 = Vector4::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 1.0);
        check(unhat(&hat(&(c4 * c4.transpose()))) == c4 * c4.transpose(), "hat/unhat");
    }
    let pass = failures.is_empty();
    let detail = if pass {
        format!("{CASES} cases each: antisymmetry, theorem 1, corollaries, motor unitarity, hat/unhat, bar contraction")
    } else {
        format!("failed: {}", failures.join(", "))
    };
    Outcome { pass, detail }
}

fn criterion8() -> Outcome {
    let sizes = [6usize, 12, 24, 48];
    let mut times = Vec::new();
    for &n in &sizes {
        let model = robots::serial_chain(n);
        let best = (0..7)
            .map(|_| {
                let t = Instant::now();
                for _ in 0..5 {
                    std::hint::black_box(drng(std::hint::black_box(&model)));
                }
                t.elapsed().as_secs_f64() / 5.0
            })
            .fold(f64::INFINITY, f64::min);
        times.push(best);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();

    // The nullspace takes no samples; bases from validations with different
    // sample counts must be identical.
    let model = load("puma560");
    let few = validate(&model, &ValidateOptions { samples: 20, ..Default::default() }).expect("validation");
    let many = validate(&model, &ValidateOptions { samples: 200, ..Default::default() }).expect("validation");
    let same = few.analysis.b_null == many.analysis.b_null;

    let timing = sizes
        .iter()
        .zip(&times)
        .map(|(n, t)| format!("n={n} {:.3} ms", t * 1e3))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome {
        pass: slope <= 1.3 && same,
        detail: format!(
            "{timing}; log-log slope {slope:.2} (limit 1.3); nullspace identical for 20 and 200 samples: {same}"
        ),
    }
}

fn main() {
    let runs: Vec<(Validation, Duration)> = ROBOTS.iter().map(|(name, _)| validate_100(&load(name))).collect();
    let results = [
        ("1 nullspace dimensions", criterion1()),
        ("2 gravity dependence", criterion2()),
        ("3 nullspace membership", criterion3(&runs)),
        ("4 rank cross-validation", criterion4(&runs)),
        ("5 dynamics against classical oracles", criterion5()),
        ("6 kinematics against finite differences", criterion6()),
        ("7 algebraic identities", criterion7()),
        ("8 nullspace scaling", criterion8()),
    ];
    let mut all = true;
    for (name, o) in &results {
        all &= o.pass;
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
