//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use storage_codes::bounds::{
    cutset_bound, mbr_point, msr_point, theorem1_bound, theorem2_bound, Theorem1Case,
};
use storage_codes::constructions::{
    example1, example3_initial, example3_spec, parity_code, rbt_mbr,
};
use storage_codes::flowgame::{scripted_cutset_check, verify_theorem, GameCase, DEFAULT_MEMO_CAP};
use storage_codes::sim::{encode, encode_functional, random_script, Step};
use storage_codes::BitVector;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bits(s: &str) -> BitVector {
    s.parse().unwrap()
}

fn example1_end_to_end() -> Outcome {
    let named = example1();
    let plan0 = named.repair_plans.as_ref().unwrap()[0].clone();
    for w in 0..16u64 {
        let x = BitVector::from_word(4, w);
        let mut st = encode(&named.code, &x).map_err(|e| e.to_string())?;
        let want = BitVector::from_bools(&[x.get(0), x.get(2) ^ x.get(3)]);
        ensure(st.stored(0) == Some(&want), || {
            format!("node 0 stores {:?} for x={x}", st.stored(0))
        })?;

        let out = st.exact_repair(&plan0).map_err(|e| e.to_string())?;
        let sent: Vec<(usize, Vec<BitVector>, bool)> = out
            .transfers
            .iter()
            .map(|t| (t.helper, t.vectors.clone(), t.symbols.get(0)))
            .collect();
        let expected = vec![
            (1, vec![bits("1001")], x.get(0) ^ x.get(3)),
            (2, vec![bits("0010")], x.get(2)),
            (3, vec![bits("0001")], x.get(3)),
        ];
        ensure(sent == expected, || {
            format!("repair of node 0 for x={x} sent {sent:?}")
        })?;
        ensure(out.stored == want, || {
            format!("repaired block {} for x={x}", out.stored)
        })?;

        for pair in (0..4).combinations(2) {
            let got = st.collect(&pair).map_err(|e| e.to_string())?;
            ensure(got == Some(x), || {
                format!("{pair:?} decoded {got:?} for x={x}")
            })?;
        }
    }
    Ok("16 messages, 3 repair symbols each, 6 pairs decode".into())
}

fn rbt_mbr_family() -> Outcome {
    for n in 3..=7 {
        let c = rbt_mbr(n).map_err(|e| e.to_string())?;
        let p = c
            .code
            .params(1)
            .map_err(|e| e.to_string())?
            .ok_or("not repairable")?;
        let s = n - 1;
        ensure((p.k, p.r, p.alpha, p.beta) == (s, s, s, 1), || {
            format!("n={n}: params {p}")
        })?;
        ensure(p.rate() == Ratio::new(1, 2), || {
            format!("n={n}: rate {}", p.rate())
        })?;
        let (k, r) = (p.k as u64, p.r as u64);
        let (mbr_alpha, mbr_m) = mbr_point(k, r, 1).map_err(|e| e.to_string())?;
        ensure((mbr_alpha, mbr_m) == (p.alpha as u64, p.m as u64), || {
            format!(
                "n={n}: MBR point ({mbr_alpha}, {mbr_m}) vs code ({}, {})",
                p.alpha, p.m
            )
        })?;
        let cut = cutset_bound(k, r, p.alpha as u64, 1).map_err(|e| e.to_string())?;
        ensure(cut == p.m as u64, || {
            format!("n={n}: m={} but cutset {cut}", p.m)
        })?;
    }
    Ok("n=3..7 on the MBR point with m = cutset".into())
}

fn example3_functional() -> Outcome {
    let spec = example3_spec();
    let rounds = 1000;
    let script = random_script(4, rounds, 2024);
    let mut states = (0..32u64)
        .map(|w| encode_functional(&spec, example3_initial(), &BitVector::from_word(5, w)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let mut checks = 0;
    for step in &script {
        let Step::Fail(node) = step else { continue };
        for st in &mut states {
            st.functional_repair(*node).map_err(|e| e.to_string())?;
        }
        let lead = &states[0];
        let violations = spec.check(&lead.spaces());
        ensure(violations.is_empty(), || {
            format!("epoch {}: {}", lead.epoch(), violations.join("; "))
        })?;
        ensure(states.iter().all(|s| s.spaces() == lead.spaces()), || {
            "message-independent repair diverged".to_string()
        })?;
        if lead.epoch() % 50 == 0 {
            for st in &mut states {
                let x = *st.message();
                for set in (0..4).combinations(3) {
                    let got = st.collect(&set).map_err(|e| e.to_string())?;
                    ensure(got == Some(x), || {
                        format!("epoch {}: {set:?} decoded {got:?}", st.epoch())
                    })?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!(
        "{rounds} rounds, functional spec held every epoch, {checks} decodes"
    ))
}

fn cutset_reproduction() -> Outcome {
    let mut points = 0;
    for n in 2..=5usize {
        for r in 1..n.min(5) {
            for k in 1..=r {
                for (a, b) in (1..=3u64).cartesian_product(1..=3u64) {
                    let (game, formula) =
                        scripted_cutset_check(n, k, r, a, b).map_err(|e| e.to_string())?;
                    ensure(game == formula, || {
                        format!(
                            "n={n} k={k} r={r} alpha={a} beta={b}: flow {game} vs bound {formula}"
                        )
                    })?;
                    points += 1;
                }
            }
        }
    }
    Ok(format!("{points} grid points exact"))
}

fn theorem1() -> Outcome {
    let mut lines = Vec::new();
    let cases = [
        (GameCase::AlphaEqBeta, 3, 2, 1, 1),
        (GameCase::AlphaEqBeta, 3, 2, 2, 2),
        (GameCase::AlphaEqBeta, 4, 3, 1, 1),
        (GameCase::AlphaEqBeta, 4, 3, 2, 2),
        (GameCase::AlphaEqRBeta, 3, 2, 2, 1),
        (GameCase::AlphaEqRBeta, 4, 3, 3, 1),
    ];
    for (case, n, r, a, b) in cases {
        let t = Instant::now();
        let rep =
            verify_theorem(case, n, r, a, b, 2 * n, DEFAULT_MEMO_CAP).map_err(|e| e.to_string())?;
        ensure(t.elapsed() < Duration::from_secs(300), || {
            format!("{case} n={n} took {:?}", t.elapsed())
        })?;
        ensure(rep.holds(), || format!("bound violated: {rep}"))?;
        ensure(rep.game.horizon == 2 * n, || {
            format!("search stopped early: {rep}")
        })?;
        // n = r + 1: bundled codes meet the bound, so the game must too
        ensure(rep.tight(), || format!("no equality at n = r + 1: {rep}"))?;
        let witness_m = match case {
            GameCase::AlphaEqBeta => {
                parity_code(r)
                    .map_err(|e| e.to_string())?
                    .code
                    .message_dim() as u64
                    * a
            }
            _ => rbt_mbr(n).map_err(|e| e.to_string())?.code.message_dim() as u64,
        };
        ensure(witness_m == rep.formula, || {
            format!("witness stores {witness_m}: {rep}")
        })?;
        lines.push(format!("{case}({n},{r},{a},{b})={}", rep.game.value));
    }
    Ok(lines.join(" "))
}

fn theorem2() -> Outcome {
    let mut lines = Vec::new();
    for n in 3..=6 {
        for (a, b) in [(1, 1), (2, 1)] {
            let rep = verify_theorem(GameCase::LocalityTwo, n, 2, a, b, 2 * n, DEFAULT_MEMO_CAP)
                .map_err(|e| e.to_string())?;
            ensure(rep.holds(), || format!("bound violated: {rep}"))?;
            lines.push(format!(
                "n={n},a={a},b={b}:{}<={}{}",
                rep.game.value,
                rep.formula,
                if rep.game.capped { "(partial)" } else { "" }
            ));
        }
    }
    Ok(lines.join(" "))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..200 {
        let (g, sinks) = common::random_flow_graph(&mut rng, 6);
        ensure(g.vertex_count() < 14, || format!("graph {i} too large"))?;
        let flow = g.collector_value_on(&sinks).map_err(|e| e.to_string())?;
        let cut = common::brute_force_min_cut(&g, &sinks);
        ensure(flow == cut, || {
            format!("graph {i}: max flow {flow}, min cut {cut}")
        })?;
    }
    for i in 0..1000 {
        let a = common::random_subspace(&mut rng, 8);
        let b = common::random_subspace(&mut rng, 8);
        if let Some(msg) = common::check_subspace_pair(&a, &b) {
            return Err(format!("pair {i}: {msg}"));
        }
    }
    Ok("200 graphs, 1000 subspace pairs".into())
}

fn bound_consistency() -> Outcome {
    for r in 1..=6 {
        for k in 1..=r {
            for beta in 1..=3 {
                for (name, (alpha, m)) in [
                    ("msr", msr_point(k, r, beta)),
                    ("mbr", mbr_point(k, r, beta)),
                ]
                .map(|(n, p)| (n, p.unwrap()))
                {
                    let cut = cutset_bound(k, r, alpha, beta).map_err(|e| e.to_string())?;
                    ensure(cut == m, || {
                        format!("{name} k={k} r={r} beta={beta}: m={m}, cutset {cut}")
                    })?;
                }
            }
        }
    }
    for n in (3..=30).step_by(3) {
        for alpha in 1..=5 {
            let t2 = theorem2_bound(n, alpha, alpha)
                .map_err(|e| e.to_string())?
                .max_m;
            let t1 = theorem1_bound(Theorem1Case::AlphaEqBeta, n, 2, alpha)
                .map_err(|e| e.to_string())?;
            ensure(t1 == t2, || format!("n={n} alpha={alpha}: {t1} vs {t2}"))?;
        }
    }
    Ok("regenerating points on the cutset, locality-2 forms agree".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "example1-end-to-end",
            Duration::from_secs(1),
            example1_end_to_end,
        ),
        ("rbt-mbr-family", Duration::from_secs(5), rbt_mbr_family),
        (
            "example3-functional-repair",
            Duration::from_secs(30),
            example3_functional,
        ),
        (
            "cutset-reproduction",
            Duration::from_secs(60),
            cutset_reproduction,
        ),
        ("theorem1-game", Duration::from_secs(30 * 60), theorem1),
        ("theorem2-game", Duration::from_secs(60 * 60), theorem2),
        (
            "oracle-equivalence",
            Duration::from_secs(120),
            oracle_equivalence,
        ),
        (
            "bound-consistency",
            Duration::from_secs(5),
            bound_consistency,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let result = run();
        let took = t.elapsed();
        let (status, detail) = match result {
            Ok(_) if took > limit => ("FAIL", format!("took {took:.2?}, limit {limit:?}")),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {} {name} ({took:.2?}): {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
