//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Set `MULTIFILT_BLESS=1` to rewrite the golden reports instead of
//! comparing against them.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multifilt_core::exactlin::Subspace;
use multifilt_core::multifilt::{Comparison, Filtration, GradeOutcome, Grading, Multifiltration, Window};
use multifilt_core::oracle::{materialize, oracle_check, OracleConfig, OracleProperty};
use multifilt_core::ordered_group::{Cone, LatticeMap, Point};
use multifilt_core::solvable::{rep_multifilt, rep_multifilt_normalized, sl_root_embedding, weight_cone, WeightData};
use multifilt_core::toric::{classify, family_from_system, pullback, system_from_family, Fan, SigmaFamily};
use multifilt_core::wire::{FamilyDoc, FanDoc};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

// ---------------------------------------------------------------------------
// Random instances

/// Index cones with their facet normals written out by hand, so that the
/// order used by the checks below does not come from the library.
struct PoolCone {
    cone: Cone,
    facets: Vec<Vec<i64>>,
}

impl PoolCone {
    fn leq(&self, a: &[i64], b: &[i64]) -> bool {
        self.facets
            .iter()
            .all(|f| f.iter().zip(b.iter().zip(a)).map(|(c, (y, x))| c * (y - x)).sum::<i64>() >= 0)
    }
}

fn cone_pool() -> Vec<PoolCone> {
    vec![
        PoolCone {
            cone: Cone::orthant(2),
            facets: vec![vec![1, 0], vec![0, 1]],
        },
        PoolCone {
            cone: Cone::orthant(3),
            facets: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        },
        PoolCone {
            cone: Cone::from_generators(2, &[vec![0, 1], vec![1, 1], vec![2, 1]]).unwrap(),
            facets: vec![vec![1, 0], vec![-1, 2]],
        },
    ]
}

fn random_point(rng: &mut ChaCha8Rng, rank: usize, r: i64) -> Point {
    (0..rank).map(|_| rng.gen_range(-r..=r)).collect()
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<i64> {
    (0..d).map(|_| rng.gen_range(-2..=2)).collect()
}

/// A random basis of `Q^d`, as integer rows.
fn random_basis(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<i64>> {
    loop {
        let rows: Vec<Vec<i64>> = (0..d).map(|_| random_vector(rng, d)).collect();
        if Subspace::from_int_vectors(d, &rows).unwrap().dim() == d {
            return rows;
        }
    }
}

fn random_subspace(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Subspace {
    loop {
        let rows: Vec<Vec<i64>> = (0..k).map(|_| random_vector(rng, d)).collect();
        let s = Subspace::from_int_vectors(d, &rows).unwrap();
        if s.dim() == k {
            return s;
        }
    }
}

/// A random grading of `Q^d` by distinct points of `[-r, r]^rank`.
fn random_grading(rng: &mut ChaCha8Rng, d: usize, rank: usize, r: i64) -> Grading {
    let basis = random_basis(rng, d);
    let pieces_count = rng.gen_range(1..=d);
    let mut cuts: Vec<usize> = (1..d).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(pieces_count - 1).collect();
    cuts.push(0);
    cuts.push(d);
    cuts.sort();
    let mut points = BTreeSet::new();
    while points.len() < pieces_count {
        points.insert(random_point(rng, rank, r));
    }
    let pieces = cuts
        .windows(2)
        .zip(points)
        .map(|(w, p)| (p, Subspace::from_int_vectors(d, &basis[w[0]..w[1]]).unwrap()))
        .collect();
    Grading::new(d, pieces).unwrap()
}

/// An exhaustive filtration over the quadrant built from random subspaces.
fn random_quadrant_filtration(rng: &mut ChaCha8Rng, d: usize, gens: usize, r: i64) -> Multifiltration {
    let mut pairs: Vec<(Point, Subspace)> = (0..gens)
        .map(|_| {
            let k = rng.gen_range(1..=d);
            (random_point(rng, 2, r), random_subspace(rng, d, k))
        })
        .collect();
    let span = Subspace::sum_all(d, pairs.iter().map(|(_, s)| s)).unwrap();
    if !span.is_full() {
        pairs.push((random_point(rng, 2, r), Subspace::full(d)));
    }
    Multifiltration::new(Cone::orthant(2), d, pairs).unwrap()
}

/// A random filtration over the quadrant: graded half of the time.
fn mixed_quadrant_filtration(rng: &mut ChaCha8Rng, i: usize) -> Multifiltration {
    let d = rng.gen_range(1..=4);
    if i.is_multiple_of(2) {
        let g = random_grading(rng, d, 2, 3);
        Multifiltration::from_grading(&g, &Cone::orthant(2)).unwrap()
    } else {
        let n = rng.gen_range(1..=4);
        random_quadrant_filtration(rng, d, n, 3)
    }
}

// ---------------------------------------------------------------------------
// Criterion 1

fn direct_sum_above(pool: &PoolCone, g: &Grading, lambda: &[i64]) -> Subspace {
    Subspace::sum_all(
        g.ambient_dim(),
        g.pieces().iter().filter(|(p, _)| pool.leq(lambda, p)).map(|(_, s)| s),
    )
    .unwrap()
}

fn criterion_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pool = cone_pool();
    let instances = 200;
    for i in 0..instances {
        let pc = &pool[i % pool.len()];
        let rank = pc.cone.rank();
        let d = rng.gen_range(1..=6);
        let g = random_grading(&mut rng, d, rank, 3);
        let f = Multifiltration::from_grading(&g, &pc.cone).map_err(err)?;
        let h = match f.grade().map_err(err)? {
            GradeOutcome::Graded(h) => h,
            GradeOutcome::NotRegular(w) => return Err(format!("instance {i}: graded input reported not regular: {w:?}")),
        };
        let expected: Vec<(Point, usize)> = g.pieces().iter().map(|(p, s)| (p.clone(), s.dim())).collect();
        let found: Vec<(Point, usize)> = h.pieces().iter().map(|(p, s)| (p.clone(), s.dim())).collect();
        ensure(expected == found, || format!("instance {i}: pieces {found:?}, expected {expected:?}"))?;
        let jumps = f.jump_points().map_err(err)?;
        ensure(jumps == expected, || format!("instance {i}: jump points {jumps:?}"))?;
        for _ in 0..100 {
            let lambda = random_point(&mut rng, rank, 5);
            let want = direct_sum_above(pc, &g, &lambda);
            ensure(f.eval(&lambda).map_err(err)? == want, || format!("instance {i}: value at {lambda:?}"))?;
            ensure(direct_sum_above(pc, &h, &lambda) == want, || {
                format!("instance {i}: recovered grading differs at {lambda:?}")
            })?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{instances} gradings recovered exactly, 100 evaluations each, {secs:.1}s"))
}

// ---------------------------------------------------------------------------
// Criterion 2

fn line(d: usize, v: &[i64]) -> Subspace {
    Subspace::from_int_vectors(d, &[v.to_vec()]).unwrap()
}

fn span(d: usize, rows: &[&[i64]]) -> Subspace {
    let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
    Subspace::from_int_vectors(d, &rows).unwrap()
}

/// `F^{K1} ∩ F^{K2}` and `F^{K̃1 ∩ K̃2}`, the latter summed over every box
/// point lying above some point of each set.
fn brute_force_pair(f: &dyn Filtration, order: &PoolCone, region: &Window, k1: &[Point], k2: &[Point]) -> (Subspace, Subspace) {
    let d = f.ambient_dim();
    let value = |k: &[Point]| Subspace::sum_all(d, k.iter().map(|p| f.eval(p).unwrap()).collect::<Vec<_>>().iter()).unwrap();
    let lhs = value(k1).intersect(&value(k2)).unwrap();
    let above = |k: &[Point], x: &[i64]| k.iter().any(|p| order.leq(p, x));
    let both: Vec<Point> = region.points().into_iter().filter(|x| above(k1, x) && above(k2, x)).collect();
    (lhs, value(&both))
}

struct NegativeCase {
    name: &'static str,
    filtration: Box<dyn Filtration>,
    order: PoolCone,
    region: Window,
    stated: (Vec<Point>, Vec<Point>),
}

fn negative_cases() -> Vec<NegativeCase> {
    let pool = cone_pool();
    let [quadrant, octant, wedge]: [PoolCone; 3] = pool.try_into().ok().unwrap();
    let uv = Multifiltration::new(
        quadrant.cone.clone(),
        2,
        vec![(vec![1, 0], line(2, &[1, 0])), (vec![0, 1], line(2, &[0, 1]))],
    )
    .unwrap();
    let wedge_uv = Multifiltration::new(
        wedge.cone.clone(),
        2,
        vec![(vec![0, 0], line(2, &[1, 0])), (vec![-1, 0], line(2, &[0, 1]))],
    )
    .unwrap();
    let uvw = Multifiltration::new(
        octant.cone.clone(),
        3,
        vec![
            (vec![-1, 0, 0], line(3, &[1, 0, 0])),
            (vec![0, -1, 0], line(3, &[0, 1, 0])),
            (vec![0, 0, -1], line(3, &[0, 0, 1])),
        ],
    )
    .unwrap();
    vec![
        NegativeCase {
            name: "quotient on the quadrant",
            filtration: Box::new(uv.quotient_filtration(&line(2, &[1, 1])).unwrap()),
            order: quadrant,
            region: Window::cube(2, -1, 2).unwrap(),
            stated: (vec![vec![1, 0]], vec![vec![0, 1]]),
        },
        NegativeCase {
            name: "sub-filtration on cone{(0,1),(1,1),(2,1)}",
            filtration: Box::new(wedge_uv.sub_filtration(&line(2, &[1, 1])).unwrap()),
            order: wedge,
            region: Window::new(vec![-5, -3], vec![1, 1]).unwrap(),
            stated: (vec![vec![-2, -1]], vec![vec![-1, -1]]),
        },
        NegativeCase {
            name: "sub-filtration on the octant",
            filtration: Box::new(uvw.sub_filtration(&span(3, &[&[1, -1, 0], &[0, 1, -1]])).unwrap()),
            order: octant,
            region: Window::cube(3, -2, 1).unwrap(),
            stated: (vec![vec![-1, -1, 0], vec![-1, 0, -1]], vec![vec![0, -1, -1]]),
        },
    ]
}

fn criterion_negative_fixtures() -> Outcome {
    let mut notes = Vec::new();
    for (i, case) in negative_cases().into_iter().enumerate() {
        let f = materialize(case.filtration.as_ref(), &case.region).map_err(err)?;
        for p in case.region.points() {
            ensure(f.eval(&p).map_err(err)? == case.filtration.eval(&p).map_err(err)?, || {
                format!("{}: generated form differs from the evaluator at {p:?}", case.name)
            })?;
        }
        let (regular, witness) = f.is_regular().map_err(err)?;
        ensure(!regular, || format!("{}: reported regular", case.name))?;
        let w = witness.ok_or_else(|| format!("{}: no witness", case.name))?;
        let (lhs, rhs) = brute_force_pair(case.filtration.as_ref(), &case.order, &case.region.padded(2), &w.k1, &w.k2);
        ensure(lhs == w.lhs && rhs == w.rhs && lhs != rhs, || {
            format!("{}: witness {:?} does not validate", case.name, (&w.k1, &w.k2))
        })?;
        let (pk1, pk2) = &case.stated;
        let (plhs, prhs) = brute_force_pair(case.filtration.as_ref(), &case.order, &case.region.padded(2), pk1, pk2);
        ensure(plhs != prhs, || format!("{}: the stated pair is not a violation", case.name))?;
        let lib = f.check_pair(pk1, pk2).map_err(err)?;
        ensure(lib.lhs == plhs && lib.rhs == prhs, || format!("{}: library disagrees on the stated pair", case.name))?;
        if i == 0 {
            let got: BTreeSet<Vec<Point>> = [w.k1.clone(), w.k2.clone()].into_iter().collect();
            let want: BTreeSet<Vec<Point>> = [pk1.clone(), pk2.clone()].into_iter().collect();
            ensure(got == want, || format!("{}: witness {got:?} is not {want:?}", case.name))?;
        }
        notes.push(format!("{:?}|{:?}", w.k1, w.k2));
    }
    Ok(format!("three constructions not regular; witnesses {}", notes.join(", ")))
}

// ---------------------------------------------------------------------------
// Criterion 3

fn criterion_oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let window = Window::cube(2, -5, 5).unwrap();
    let instances = 60;
    let mut regular_count = 0;
    for i in 0..instances {
        let f = mixed_quadrant_filtration(&mut rng, i);
        let (by_grade, _) = f.is_regular().map_err(err)?;
        let by_pairs = f.subset_pair_test().map_err(err)?.is_none();
        let by_oracle = oracle_check(&f, &window, OracleProperty::Regular, OracleConfig::default())
            .map_err(err)?
            .holds;
        ensure(by_grade == by_pairs && by_pairs == by_oracle, || {
            format!("instance {i}: grade {by_grade}, subset pairs {by_pairs}, oracle {by_oracle}; {f:?}")
        })?;
        regular_count += usize::from(by_grade);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.1}s"))?;
    ensure(regular_count > 0 && regular_count < instances, || {
        format!("degenerate sample: {regular_count} of {instances} regular")
    })?;
    Ok(format!(
        "{instances} filtrations, {regular_count} regular, all three deciders agree, {secs:.1}s"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 4

fn same(a: &Multifiltration, b: &Multifiltration) -> Result<bool, String> {
    Ok(a.compare(b).map_err(err)? == Comparison::Equal)
}

fn nonnegative_map(rng: &mut ChaCha8Rng, source: usize, target: usize) -> LatticeMap {
    let m = (0..target).map(|_| (0..source).map(|_| rng.gen_range(0..=2)).collect()).collect();
    LatticeMap::new(source, target, m).unwrap()
}

fn flags(f: &Multifiltration) -> Result<(bool, bool, bool), String> {
    let exhaustive = f.is_exhaustive();
    let separated = f.is_separated().map_err(err)?.holds;
    let regular = f.subset_pair_test().map_err(err)?.is_none();
    Ok((exhaustive, separated, regular))
}

fn random_family(rng: &mut ChaCha8Rng, fan: &Fan, d: usize) -> SigmaFamily {
    let g = random_grading(rng, d, fan.n_rank(), 2);
    let cones = (0..fan.max_cone_count())
        .map(|k| {
            let q = &fan.max_cone(k).quotient;
            let graded = Multifiltration::from_grading(&g, &q.dual).unwrap();
            graded.ind(&q.pi, &q.cone).unwrap()
        })
        .collect();
    SigmaFamily::new(fan, d, cones).unwrap()
}

fn criterion_functor_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 30;
    let ray = Cone::orthant(1);
    let quadrant = Cone::orthant(2);
    for i in 0..n {
        let f = mixed_quadrant_filtration(&mut rng, i);
        let phi = nonnegative_map(&mut rng, 2, 2);
        let psi = nonnegative_map(&mut rng, 2, 1);
        let lhs = f.ind(&psi.compose(&phi).map_err(err)?, &ray).map_err(err)?;
        let rhs = f.ind(&phi, &quadrant).map_err(err)?.ind(&psi, &ray).map_err(err)?;
        ensure(same(&lhs, &rhs)?, || format!("composition fails on instance {i}"))?;
    }

    let half_plane = Cone::from_generators(2, &[vec![1, 0], vec![-1, 0], vec![1, 1]]).map_err(err)?;
    let wide = Cone::from_generators(3, &[vec![1, 0, 0], vec![-1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).map_err(err)?;
    for i in 0..n {
        let c = if i % 2 == 0 { &half_plane } else { &wide };
        let d = rng.gen_range(1..=3);
        let pairs = (0..rng.gen_range(1..=4))
            .map(|_| {
                let k = rng.gen_range(1..=d);
                (random_point(&mut rng, c.rank(), 3), random_subspace(&mut rng, d, k))
            })
            .collect();
        let f = Multifiltration::new(c.clone(), d, pairs).map_err(err)?;
        let qz = c.quasi_zero_quotient().map_err(err)?;
        let down = f.ind(&qz.q, &qz.quotient).map_err(err)?;
        let back = down.res_surjective(&qz.q, c).map_err(err)?;
        ensure(same(&back, &f)?, || format!("Res(Ind F) != F on instance {i}"))?;
        let g = random_quadrant_filtration(&mut rng, d, 3, 3);
        let g = Multifiltration::new(qz.quotient.clone(), d, g.generators().iter().map(|(p, s)| (p[..qz.quotient.rank()].to_vec(), s.clone())).collect()).map_err(err)?;
        let up = g.res_surjective(&qz.q, c).map_err(err)?;
        ensure(same(&up.ind(&qz.q, &qz.quotient).map_err(err)?, &g)?, || format!("Ind(Res G) != G on instance {i}"))?;
    }
    let fans = toric_fans()?;
    let mut toric_trips = 0;
    for (name, fan) in &fans {
        for _ in 0..n / fans.len() + 1 {
            let d = rng.gen_range(1..=3);
            let fam = random_family(&mut rng, fan, d);
            let sys = system_from_family(fan, &fam).map_err(err)?;
            let fam2 = family_from_system(fan, &sys).map_err(err)?;
            let sys2 = system_from_family(fan, &fam2).map_err(err)?;
            for k in 0..fan.max_cone_count() {
                ensure(same(&fam.cones()[k], &fam2.cones()[k])?, || format!("{name}: family round trip"))?;
                ensure(same(&sys.cones()[k], &sys2.cones()[k])?, || format!("{name}: system round trip"))?;
            }
            toric_trips += 1;
        }
    }

    for i in 0..n {
        let f = mixed_quadrant_filtration(&mut rng, i);
        let base = flags(&f)?;
        let lambda = random_point(&mut rng, 2, 3);
        let shifted = flags(&f.shift(&lambda).map_err(err)?)?;
        ensure(base == shifted, || format!("shift changes flags on instance {i}: {base:?} vs {shifted:?}"))?;
        let phi = loop {
            let m = nonnegative_map(&mut rng, 2, 2);
            if m.smith_diagonal().len() == 2 {
                break m;
            }
        };
        let pushed = flags(&f.ind(&phi, &quadrant).map_err(err)?)?;
        ensure(!base.0 || pushed.0, || format!("ind loses exhaustiveness on instance {i}"))?;
        ensure(!base.1 || pushed.1, || format!("ind loses separatedness on instance {i}"))?;
        ensure(!base.2 || pushed.2, || format!("ind loses regularity on instance {i}"))?;
    }
    Ok(format!(
        "{n} composition, {n} quasi-zero round-trip, {toric_trips} toric round-trip and {n} preservation instances"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 5

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn load_fan(name: &str) -> Result<Fan, String> {
    let text = fs::read_to_string(fixtures_dir().join(name)).map_err(err)?;
    serde_json::from_str::<FanDoc>(&text).map_err(err)?.from_value().map_err(err)
}

fn load_family(fan: &Fan, name: &str) -> Result<SigmaFamily, String> {
    let text = fs::read_to_string(fixtures_dir().join(name)).map_err(err)?;
    serde_json::from_str::<FamilyDoc>(&text).map_err(err)?.from_value(fan).map_err(err)
}

fn toric_fans() -> Result<Vec<(&'static str, Fan)>, String> {
    Ok(vec![
        ("A3", load_fan("a3.json")?),
        ("singular surface", load_fan("singular.json")?),
        ("two cones", load_fan("two_cones.json")?),
        ("A2", load_fan("a2.json")?),
    ])
}

fn flags_of(fan: &Fan, fam: &SigmaFamily) -> Result<(bool, Option<bool>, Option<bool>), String> {
    let c = classify(fan, fam).map_err(err)?;
    Ok((c.torsion_free, c.reflexive, c.locally_free))
}

fn criterion_toric() -> Outcome {
    let a3 = load_fan("a3.json")?;
    let singular = load_fan("singular.json")?;
    let sub_flags = (true, Some(true), Some(false));
    let free_flags = (true, Some(true), Some(true));
    let cases = [
        (&singular, "singular_sub.json", sub_flags),
        (&singular, "singular_free.json", free_flags),
        (&a3, "octant_sheaf_sub.json", sub_flags),
        (&a3, "octant_sheaf_free.json", free_flags),
        (&a3, "structure_a3.json", free_flags),
    ];
    for (fan, file, want) in cases {
        let fam = load_family(fan, file)?;
        let got = flags_of(fan, &fam)?;
        ensure(got == want, || format!("{file}: {got:?}, expected {want:?}"))?;
        let sys = system_from_family(fan, &fam).map_err(err)?;
        let back = family_from_system(fan, &sys).map_err(err)?;
        ensure(back == fam, || format!("{file}: system round trip"))?;
    }
    for fan in [&a3, &singular] {
        let s = SigmaFamily::structure_sheaf(fan, 2).map_err(err)?;
        ensure(flags_of(fan, &s)? == free_flags, || "structure sheaf not locally free".into())?;
        ensure(pullback(&LatticeMap::identity(fan.n_rank()), fan, fan, &s).map_err(err)? == s, || {
            "identity pullback".into()
        })?;
    }

    let a2 = load_fan("a2.json")?;
    let a1 = load_fan("a1.json")?;
    let phi = LatticeMap::new(2, 2, vec![vec![1, 0], vec![1, 1]]).map_err(err)?;
    let psi = LatticeMap::new(2, 1, vec![vec![1, 1]]).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let d = rng.gen_range(1..=3);
        let g = random_grading(&mut rng, d, 1, 3);
        let f = SigmaFamily::new(&a1, d, vec![Multifiltration::from_grading(&g, &Cone::orthant(1)).map_err(err)?]).map_err(err)?;
        ensure(flags_of(&a1, &f)?.2 == Some(true), || "random A1 family not locally free".into())?;
        let once = pullback(&psi.compose(&phi).map_err(err)?, &a2, &a1, &f).map_err(err)?;
        let twice = pullback(&phi, &a2, &a2, &pullback(&psi, &a2, &a1, &f).map_err(err)?).map_err(err)?;
        ensure(same(&once.cones()[0], &twice.cones()[0])?, || "pullback does not respect composition".into())?;
        ensure(pullback(&LatticeMap::identity(1), &a1, &a1, &f).map_err(err)? == f, || "identity pullback on A1".into())?;
    }
    Ok("sub-sheaves on the singular surface and on A3 reflexive but not locally free, ambient and structure sheaves locally free, conversions and pullbacks consistent".into())
}

// ---------------------------------------------------------------------------
// Criterion 6

fn criterion_solvable() -> Outcome {
    let direct = weight_cone(&WeightData::new(2, vec![]).map_err(err)?).map_err(err)?;
    ensure(direct == Cone::zero(2), || format!("direct product cone {direct:?}"))?;
    let line_cone = weight_cone(&WeightData::new(1, vec![vec![-1], vec![1]]).map_err(err)?).map_err(err)?;
    ensure(line_cone == Cone::full(1), || format!("SL2 line cone {line_cone:?}"))?;
    let borel = weight_cone(&WeightData::borel_sl(3).map_err(err)?).map_err(err)?;
    let emb = sl_root_embedding(3).map_err(err)?;
    let rays = Cone::from_facets(2, borel.facets()).map_err(err)?;
    let images: BTreeSet<Point> = rays.generators().iter().map(|g| emb.apply(g).unwrap()).collect();
    let want: BTreeSet<Point> = [vec![1, -1, 0], vec![0, 1, -1]].into_iter().collect();
    ensure(images == want && borel.is_strict(), || format!("SL3 Borel cone rays {images:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let instances = 50;
    for i in 0..instances {
        let rank = rng.gen_range(1..=3);
        let count = rng.gen_range(0..=4);
        let weights: Vec<Point> = (0..count).map(|_| random_point(&mut rng, rank, 2)).collect();
        let w = WeightData::new(rank, weights).map_err(err)?;
        let d = rng.gen_range(1..=5);
        let g = random_grading(&mut rng, d, rank, 3);
        let f = rep_multifilt(&w, &g).map_err(err)?;
        for _ in 0..5 {
            let m = random_point(&mut rng, rank, 4);
            let c = f.index();
            let want = Subspace::sum_all(d, g.pieces().iter().filter(|(p, _)| c.leq(&m, p).unwrap()).map(|(_, s)| s)).map_err(err)?;
            ensure(f.eval(&m).map_err(err)? == want, || format!("representation {i}: value at {m:?}"))?;
        }
        let n = rep_multifilt_normalized(&w, &g).map_err(err)?.filtration;
        ensure(n.is_exhaustive(), || format!("representation {i}: not exhaustive"))?;
        ensure(n.is_separated().map_err(err)?.holds, || format!("representation {i}: not separated"))?;
        ensure(matches!(n.grade().map_err(err)?, GradeOutcome::Graded(_)), || {
            format!("representation {i}: grade failed")
        })?;
    }
    Ok(format!("C={{0}}, C=Z and the SL3 Borel cone exact; {instances} random representations graded after normalizing"))
}

// ---------------------------------------------------------------------------
// Criterion 7

struct CliCase {
    name: &'static str,
    args: &'static [&'static str],
    code: i32,
}

const CLI_CASES: &[CliCase] = &[
    CliCase { name: "check_regular_quotient", args: &["check", "--property", "regular", "--in", "quotient_lines.json"], code: 2 },
    CliCase { name: "check_regular_wedge_sub", args: &["check", "--property", "regular", "--in", "wedge_sub.json"], code: 2 },
    CliCase { name: "check_regular_octant_sub", args: &["check", "--property", "regular", "--in", "octant_sub.json"], code: 2 },
    CliCase { name: "check_regular_graded", args: &["check", "--property", "regular", "--in", "graded.json"], code: 0 },
    CliCase { name: "check_separated_graded", args: &["check", "--property", "separated", "--in", "graded.json"], code: 0 },
    CliCase { name: "check_chain_separated_graded", args: &["check", "--property", "chain-separated", "--in", "graded.json"], code: 0 },
    CliCase { name: "check_exhaustive_partial", args: &["check", "--property", "exhaustive", "--in", "not_exhaustive.json"], code: 2 },
    CliCase { name: "grade_graded", args: &["grade", "--in", "graded.json"], code: 0 },
    CliCase { name: "grade_graded_text", args: &["grade", "--in", "graded.json", "--format", "text"], code: 0 },
    CliCase { name: "grade_quotient", args: &["grade", "--in", "quotient_lines.json"], code: 2 },
    CliCase { name: "grade_partial", args: &["grade", "--in", "not_exhaustive.json"], code: 2 },
    CliCase { name: "ind_sum", args: &["ind", "--in", "graded.json", "--map", "sum_map.json", "--cone", "ray_cone.json"], code: 0 },
    CliCase { name: "res_identity", args: &["res", "--in", "graded.json", "--map", "identity2.json", "--cone", "quadrant.json"], code: 0 },
    CliCase { name: "res_diagonal_window", args: &["res", "--in", "graded.json", "--map", "diag_map.json", "--cone", "ray_cone.json", "--window", "-3:3"], code: 0 },
    CliCase { name: "res_diagonal_no_window", args: &["res", "--in", "graded.json", "--map", "diag_map.json", "--cone", "ray_cone.json"], code: 1 },
    CliCase { name: "shift_graded", args: &["shift", "--in", "graded.json", "--by", "1,-1"], code: 0 },
    CliCase { name: "compare_graded_trivial", args: &["compare", "--in", "graded.json", "--other", "trivial3.json"], code: 0 },
    CliCase { name: "toric_check_compatible", args: &["toric-check", "--fan", "two_cones.json", "--family", "two_cones_compatible.json"], code: 0 },
    CliCase { name: "toric_check_incompatible", args: &["toric-check", "--fan", "two_cones.json", "--family", "two_cones_incompatible.json"], code: 2 },
    CliCase { name: "toric_classify_octant_sub", args: &["toric-classify", "--fan", "a3.json", "--family", "octant_sheaf_sub.json"], code: 0 },
    CliCase { name: "toric_classify_octant_free", args: &["toric-classify", "--fan", "a3.json", "--family", "octant_sheaf_free.json"], code: 0 },
    CliCase { name: "toric_classify_singular_sub", args: &["toric-classify", "--fan", "singular.json", "--family", "singular_sub.json"], code: 0 },
    CliCase { name: "toric_classify_singular_free", args: &["toric-classify", "--fan", "singular.json", "--family", "singular_free.json"], code: 0 },
    CliCase { name: "toric_classify_structure", args: &["toric-classify", "--fan", "a3.json", "--family", "structure_a3.json"], code: 0 },
    CliCase { name: "toric_pullback_sum", args: &["toric-pullback", "--map", "sum_map.json", "--fan", "a2.json", "--target-fan", "a1.json", "--family", "a1_family.json"], code: 0 },
    CliCase { name: "solvable_cone_direct", args: &["solvable-cone", "--weights", "weights_direct.json"], code: 0 },
    CliCase { name: "solvable_cone_line", args: &["solvable-cone", "--weights", "weights_line.json"], code: 0 },
    CliCase { name: "solvable_cone_sl3", args: &["solvable-cone", "--weights", "weights_sl3.json"], code: 0 },
    CliCase { name: "solvable_rep_direct", args: &["solvable-rep", "--weights", "weights_direct.json", "--rep", "rep_direct.json"], code: 0 },
    CliCase { name: "solvable_rep_line", args: &["solvable-rep", "--weights", "weights_line.json", "--rep", "rep_line.json"], code: 0 },
    CliCase { name: "solvable_rep_sl3", args: &["solvable-rep", "--weights", "weights_sl3.json", "--rep", "rep_sl3.json"], code: 0 },
    CliCase { name: "oracle_regular_quotient", args: &["oracle", "--property", "regular", "--in", "quotient_lines.json", "--window", "-2,-2:2,2"], code: 2 },
    CliCase { name: "oracle_separated_graded", args: &["oracle", "--property", "separated", "--in", "graded.json", "--window", "-2,-2:2,2"], code: 0 },
    CliCase { name: "malformed_input", args: &["check", "--property", "regular", "--in", "malformed.json"], code: 1 },
    CliCase { name: "bad_rational", args: &["check", "--property", "regular", "--in", "bad_rational.json"], code: 1 },
    CliCase { name: "missing_file", args: &["grade", "--in", "no_such_file.json"], code: 1 },
];

const FILE_FLAGS: &[&str] = &["--in", "--map", "--cone", "--other", "--fan", "--family", "--target-fan", "--weights", "--rep"];

fn run_cli(case: &CliCase, threads: Option<&str>) -> Result<(i32, String), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_multifilt"));
    cmd.current_dir(fixtures_dir());
    cmd.args(case.args);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t);
    }
    let out = cmd.output().map_err(err)?;
    let code = out.status.code().ok_or("terminated by a signal")?;
    Ok((code, String::from_utf8(out.stdout).map_err(err)?))
}

fn criterion_cli() -> Outcome {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("MULTIFILT_BLESS").is_some();
    let mut names = BTreeSet::new();
    for case in CLI_CASES {
        ensure(names.insert(case.name), || format!("duplicate case {}", case.name))?;
        for w in case.args.windows(2) {
            if FILE_FLAGS.contains(&w[0]) && w[1] != "no_such_file.json" {
                ensure(fixtures_dir().join(w[1]).exists(), || format!("{}: missing fixture {}", case.name, w[1]))?;
            }
        }
        let (code, stdout) = run_cli(case, None)?;
        ensure(code == case.code, || format!("{}: exit {code}, expected {}", case.name, case.code))?;
        let path = golden.join(format!("{}.out", case.name));
        if bless {
            fs::write(&path, &stdout).map_err(err)?;
        } else {
            let want = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            ensure(want == stdout, || format!("{}: report differs from {}", case.name, path.display()))?;
        }
        let (code1, serial) = run_cli(case, Some("1"))?;
        ensure(code1 == code && serial == stdout, || format!("{}: report depends on thread count", case.name))?;
    }
    Ok(format!("{} reports match their golden files byte for byte with the expected exit codes", CLI_CASES.len()))
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [Criterion; 7] = [
        ("theorem round-trip", criterion_round_trip),
        ("negative fixtures", criterion_negative_fixtures),
        ("oracle agreement", criterion_oracle_agreement),
        ("functor laws", criterion_functor_laws),
        ("toric fixtures", criterion_toric),
        ("solvable fixtures", criterion_solvable),
        ("command line", criterion_cli),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} acceptance criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", criteria.len());
}
