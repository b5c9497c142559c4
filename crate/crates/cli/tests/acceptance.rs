//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Every comparison is exact rational equality; there is no tolerance.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use powerdex::converse::{ConverseSystem, EngineOracle};
use powerdex::gen::{self, Fixture};
use powerdex::indices::{interpolated_index, marginal_index};
use powerdex::interaction::{
    compute_interaction_bernoulli, compute_interaction_simple, compute_interaction_simple_with,
    BernoulliInteractionWeights, BivariateGrid, InteractionScheme, InteractionWeights, Prefactor,
};
use powerdex::oracle::CoalitionTable;
use powerdex::rational::binomial;
use powerdex::{
    attribute_all, compute_bernoulli_index, compute_simple_index, BernoulliWeights, Coalition, CountingModel,
    EnsembleModel, Error, IndexPreset, Model, Rational, Scheme, SimpleWeights, TableModel,
};
use rand::Rng;
use rayon::prelude::*;

/// Index values are compared with `==` on exact rationals.
const TOLERANCE: &str = "exact equality, tolerance 0";
const CORPUS_SEED: u64 = 0x5eed_2024;
const CORPUS_SIZE: usize = 200;
const RANDOM_WEIGHT_VECTORS: usize = 20;
const CONVERSE_MODELS: usize = 100;
const CONVERSE_WEIGHTS: usize = 10;
const MAX_SET: usize = 3;
const C1_TIME_LIMIT: Duration = Duration::from_secs(60);

struct Case {
    fx: Fixture,
    table: CoalitionTable,
}

impl Case {
    fn n(&self) -> usize {
        self.fx.model.space().n()
    }
}

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn small_sets(n: usize) -> Vec<Coalition> {
    (1u64..1 << n)
        .map(Coalition::from_mask)
        .filter(|s| s.len() <= MAX_SET)
        .collect()
}

/// 20 random weight vectors for each feature count.
fn weight_bank(seed: u64, positive_first: bool) -> Vec<Vec<SimpleWeights>> {
    let mut rng = gen::rng(seed);
    (0..=8)
        .map(|n| {
            if n == 0 {
                return Vec::new();
            }
            (0..RANDOM_WEIGHT_VECTORS)
                .map(|_| gen::random_simple_weights(&mut rng, n, positive_first))
                .collect()
        })
        .collect()
}

fn grid_theta(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| Rational::new(rng.gen_range(0..=4), 4)).collect()
}

fn presets(n: usize) -> Vec<(String, SimpleWeights)> {
    [
        IndexPreset::Shapley,
        IndexPreset::Banzhaf,
        IndexPreset::Binomial(Rational::new(1, 3)),
        IndexPreset::Dictatorial,
        IndexPreset::Marginal,
    ]
    .iter()
    .map(|p| (p.name().to_string(), p.weights(n).unwrap()))
    .collect()
}

fn criterion_1(cases: &[Case]) -> Check {
    let bank = weight_bank(101, false);
    let start = Instant::now();
    let compared: usize = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let n = c.n();
            let mut schemes = presets(n);
            schemes.extend(
                bank[n]
                    .iter()
                    .enumerate()
                    .map(|(j, w)| (format!("random#{j}"), w.clone())),
            );
            let mut count = 0;
            for (name, w) in &schemes {
                for a in 0..n {
                    let fast = compute_simple_index(&c.fx.model, &c.fx.dist, &c.fx.instance, a, w)
                        .map_err(|e| e.to_string())?;
                    let brute = c.table.simple_index(a, w).map_err(|e| e.to_string())?;
                    ensure(fast == brute, || {
                        format!("fixture {i}, {name}, feature {a}: {fast} != {brute}")
                    })?;
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<usize>, String>>()?
        .into_iter()
        .sum();
    let elapsed = start.elapsed();
    ensure(elapsed <= C1_TIME_LIMIT, || {
        format!("took {elapsed:.1?}, limit {C1_TIME_LIMIT:?}")
    })?;
    Ok(format!(
        "{} trees, 5 presets + {RANDOM_WEIGHT_VECTORS} random weight vectors, {compared} indices equal, {elapsed:.1?}",
        cases.len()
    ))
}

fn criterion_2(cases: &[Case]) -> Check {
    let compared: usize = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let n = c.n();
            let mut rng = gen::rng(2000 + i as u64);
            let mut count = 0;
            for _ in 0..2 {
                let w = BernoulliWeights::new(grid_theta(&mut rng, n)).unwrap();
                for a in 0..n {
                    let counted = CountingModel::new(&c.fx.model);
                    let fast = compute_bernoulli_index(&counted, &c.fx.dist, &c.fx.instance, a, &w)
                        .map_err(|e| e.to_string())?;
                    let calls = counted.expectation_calls();
                    ensure(calls == 2, || {
                        format!("fixture {i}, feature {a}: {calls} expectation calls")
                    })?;
                    let brute = c.table.bernoulli_index(a, &w).map_err(|e| e.to_string())?;
                    ensure(fast == brute, || {
                        format!("fixture {i}, feature {a}, theta {:?}: {fast} != {brute}", w.theta())
                    })?;
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<usize>, String>>()?
        .into_iter()
        .sum();
    Ok(format!(
        "{compared} indices equal, each from exactly 2 expected-value calls"
    ))
}

fn criterion_3(cases: &[Case]) -> Check {
    cases.par_iter().enumerate().try_for_each(|(i, c)| {
        let report = attribute_all(
            &c.fx.model,
            &c.fx.dist,
            &c.fx.instance,
            &Scheme::Preset(IndexPreset::Shapley),
        )
        .map_err(|e| e.to_string())?;
        let total: Rational = report.values.iter().sum();
        let at_e = c.fx.model.evaluate(&c.fx.instance).map_err(|e| e.to_string())?;
        let gap = at_e - &c.table.coalition_sums()[0];
        ensure(total == gap, || {
            format!("fixture {i}: sum {total} != F(e) - E[F] = {gap}")
        })
    })?;
    Ok(format!(
        "sum of Shapley values equals F(e) - E[F] on all {} trees",
        cases.len()
    ))
}

fn criterion_4(cases: &[Case]) -> Check {
    let bank = weight_bank(404, true);
    let subset = &cases[..CONVERSE_MODELS];
    let runs: usize = subset
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let n = c.n();
            let (m, d, e) = (&c.fx.model, &c.fx.dist, &c.fx.instance);
            let top = m.evaluate(e).map_err(|e| e.to_string())?;
            let direct = m.expected_value(d).map_err(|e| e.to_string())?;
            let sums = c.table.coalition_sums();
            for w in bank[n].iter().take(CONVERSE_WEIGHTS) {
                let oracle = EngineOracle::new(m, e, w.clone());
                let diag = ConverseSystem::new(w.clone())
                    .recover_expectation(&oracle, d, e, &top)
                    .map_err(|e| format!("fixture {i}: {e}"))?;
                ensure(diag.expectation == direct, || {
                    format!("fixture {i}: recovered {} != {direct}", diag.expectation)
                })?;
                ensure(diag.coefficients[..] == sums[..n], || {
                    format!("fixture {i}: coalition sums differ")
                })?;
            }
            let marginal = SimpleWeights::marginal(n);
            let oracle = EngineOracle::new(m, e, marginal.clone());
            let refused = ConverseSystem::new(marginal).recover_expectation(&oracle, d, e, &top);
            ensure(refused == Err(Error::ConverseInapplicable), || {
                format!("fixture {i}: marginal weights gave {refused:?}")
            })?;
            Ok(CONVERSE_WEIGHTS)
        })
        .collect::<Result<Vec<usize>, String>>()?
        .into_iter()
        .sum();
    Ok(format!(
        "{runs} round trips on {CONVERSE_MODELS} trees recover E[F] and every c_l; marginal weights refused"
    ))
}

fn criterion_5(cases: &[Case]) -> Check {
    let results = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let n = c.n();
            let (m, d, e) = (&c.fx.model, &c.fx.dist, &c.fx.instance);
            let mut rng = gen::rng(5000 + i as u64);
            let shapley = InteractionWeights::preset(&IndexPreset::Shapley, n).unwrap();
            let mut random = InteractionWeights::empty(n);
            for size in 1..=n.min(MAX_SET) {
                let raw = gen::random_simple_weights(&mut rng, n - size + 1, false);
                random = random.with_row(size, raw.q().to_vec()).unwrap();
            }
            let (mut count, mut literal_failures) = (0, 0);
            for set in small_sets(n) {
                let size = set.len();
                for w in [&shapley, &random] {
                    let counted = CountingModel::new(m);
                    let fast = compute_interaction_simple(&counted, d, e, &set, w).map_err(|e| e.to_string())?;
                    let calls = counted.expectation_calls();
                    let expected_calls = (n - size + 1) * (size + 1);
                    ensure(calls == expected_calls, || {
                        format!("fixture {i}, set {set:?}: {calls} calls, expected {expected_calls}")
                    })?;
                    let brute = c
                        .table
                        .interaction_index(&set, &InteractionScheme::Simple(w.clone()))
                        .map_err(|e| e.to_string())?;
                    ensure(fast == brute, || format!("fixture {i}, set {set:?}: {fast} != {brute}"))?;
                    count += 1;
                    if size < n {
                        let grid = BivariateGrid::standard(n, size);
                        let literal = compute_interaction_simple_with(m, d, e, &set, w, &grid, Prefactor::Literal)
                            .map_err(|e| e.to_string())?;
                        if literal != brute {
                            literal_failures += 1;
                        }
                    }
                }
            }
            Ok((count, literal_failures))
        })
        .collect::<Result<Vec<(usize, usize)>, String>>()?;
    let count: usize = results.iter().map(|r| r.0).sum();
    let literal: usize = results.iter().map(|r| r.1).sum();
    ensure(literal >= 1, || {
        "the (1+z)^n prefactor variant never disagreed with enumeration".to_string()
    })?;
    Ok(format!(
        "{count} interaction indices (|A| <= {MAX_SET}) equal with (n-m+1)(m+1) calls each; (1+z)^n variant wrong on {literal}"
    ))
}

fn criterion_6(cases: &[Case]) -> Check {
    let compared: usize = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let n = c.n();
            let mut rng = gen::rng(6000 + i as u64);
            let w = BernoulliInteractionWeights::new(grid_theta(&mut rng, n)).unwrap();
            let mut count = 0;
            for set in small_sets(n) {
                let counted = CountingModel::new(&c.fx.model);
                let fast = compute_interaction_bernoulli(&counted, &c.fx.dist, &c.fx.instance, &set, &w)
                    .map_err(|e| e.to_string())?;
                let calls = counted.expectation_calls();
                ensure(calls == 1 << set.len(), || {
                    format!("fixture {i}, set {set:?}: {calls} calls")
                })?;
                let brute = c
                    .table
                    .interaction_index(&set, &InteractionScheme::Bernoulli(w.clone()))
                    .map_err(|e| e.to_string())?;
                ensure(fast == brute, || format!("fixture {i}, set {set:?}: {fast} != {brute}"))?;
                count += 1;
            }
            Ok(count)
        })
        .collect::<Result<Vec<usize>, String>>()?
        .into_iter()
        .sum();
    Ok(format!(
        "{compared} Bernoulli interaction indices equal with 2^|A| calls each"
    ))
}

fn criterion_7(cases: &[Case]) -> Check {
    let compared: usize = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let n = c.n();
            let (m, d, e) = (&c.fx.model, &c.fx.dist, &c.fx.instance);
            let err = |x: Error| x.to_string();
            let third = Rational::new(1, 3);
            let half = BernoulliWeights::uniform(n, Rational::new(1, 2)).unwrap();
            let bern_third = BernoulliWeights::uniform(n, third.clone()).unwrap();
            let binom = SimpleWeights::binomial(n, &third).unwrap();
            let shapley = SimpleWeights::shapley(n);
            let ishapley = InteractionWeights::preset(&IndexPreset::Shapley, n).unwrap();
            let ihalf = BernoulliInteractionWeights::uniform(n, Rational::new(1, 2)).unwrap();
            let mut count = 0;
            for a in 0..n {
                let banzhaf_interp = interpolated_index(m, d, e, a, &SimpleWeights::banzhaf(n)).map_err(err)?;
                let banzhaf_direct = compute_bernoulli_index(m, d, e, a, &half).map_err(err)?;
                ensure(banzhaf_interp == banzhaf_direct, || {
                    format!("fixture {i}, feature {a}: Banzhaf paths differ")
                })?;
                let binom_interp = interpolated_index(m, d, e, a, &binom).map_err(err)?;
                let binom_direct = compute_bernoulli_index(m, d, e, a, &bern_third).map_err(err)?;
                ensure(binom_interp == binom_direct, || {
                    format!("fixture {i}, feature {a}: binomial paths differ")
                })?;
                let marg_interp = interpolated_index(m, d, e, a, &SimpleWeights::marginal(n)).map_err(err)?;
                ensure(marg_interp == marginal_index(m, d, e, a).map_err(err)?, || {
                    format!("fixture {i}, feature {a}: marginal paths differ")
                })?;
                let set = Coalition::singleton(a);
                let single = compute_simple_index(m, d, e, a, &shapley).map_err(err)?;
                let collapsed = compute_interaction_simple(m, d, e, &set, &ishapley).map_err(err)?;
                ensure(single == collapsed, || {
                    format!("fixture {i}, feature {a}: |A|=1 simple collapse differs")
                })?;
                let collapsed_b = compute_interaction_bernoulli(m, d, e, &set, &ihalf).map_err(err)?;
                ensure(banzhaf_direct == collapsed_b, || {
                    format!("fixture {i}, feature {a}: |A|=1 Bernoulli collapse differs")
                })?;
                count += 1;
            }
            Ok(count)
        })
        .collect::<Result<Vec<usize>, String>>()?
        .into_iter()
        .sum();
    Ok(format!(
        "{compared} features: Banzhaf, binomial(1/3), marginal and |A|=1 paths agree"
    ))
}

fn criterion_8(cases: &[Case]) -> Check {
    let mut dummies = 0;
    for (i, c) in cases.iter().enumerate() {
        let table = TableModel::from_model(&c.fx.model).map_err(|e| e.to_string())?;
        let n = c.n();
        let ignored: Vec<usize> = (0..n).filter(|&a| table.ignores_feature(a)).collect();
        if ignored.is_empty() {
            continue;
        }
        let mut rng = gen::rng(8000 + i as u64);
        let schemes = [
            Scheme::Preset(IndexPreset::Shapley),
            Scheme::Preset(IndexPreset::Banzhaf),
            Scheme::Preset(IndexPreset::Dictatorial),
            Scheme::Preset(IndexPreset::Marginal),
            Scheme::Simple(gen::random_simple_weights(&mut rng, n, false)),
            Scheme::Bernoulli(BernoulliWeights::new(grid_theta(&mut rng, n)).unwrap()),
        ];
        for scheme in &schemes {
            let values = attribute_all(&c.fx.model, &c.fx.dist, &c.fx.instance, scheme)
                .map_err(|e| e.to_string())?
                .values;
            for &a in &ignored {
                ensure(values[a].is_zero(), || {
                    format!("fixture {i}: dummy feature {a} got {}", values[a])
                })?;
                dummies += 1;
            }
        }
    }
    ensure(dummies > 0, || "corpus produced no dummy features".to_string())?;

    let mut rng = gen::rng(8888);
    let mut pairs = 0;
    for _ in 0..50 {
        let space = gen::random_space(&mut rng, 2..=7, 2..=3);
        let f = gen::random_additive(&mut rng, &space);
        let d = gen::random_distribution(&mut rng, &space);
        let e = gen::random_instance(&mut rng, &space);
        let n = space.n();
        let simple = InteractionWeights::preset(&IndexPreset::Shapley, n).unwrap();
        let bern = BernoulliInteractionWeights::new(grid_theta(&mut rng, n)).unwrap();
        for set in small_sets(n).into_iter().filter(|s| s.len() >= 2) {
            let a = compute_interaction_simple(&f, &d, &e, &set, &simple).map_err(|e| e.to_string())?;
            let b = compute_interaction_bernoulli(&f, &d, &e, &set, &bern).map_err(|e| e.to_string())?;
            ensure(a.is_zero() && b.is_zero(), || {
                format!("additive model: set {set:?} gave {a}, {b}")
            })?;
            pairs += 1;
        }
    }

    let mut linear = 0;
    for (i, c) in cases.iter().take(50).enumerate() {
        let space = c.fx.model.space().clone();
        let mut rng = gen::rng(8100 + i as u64);
        let g = gen::random_tree_on(&mut rng, &space);
        let (alpha, beta) = (gen::random_rational(&mut rng), gen::random_rational(&mut rng));
        let f_arc: Arc<dyn Model> = Arc::new(c.fx.model.clone());
        let g_arc: Arc<dyn Model> = Arc::new(g.clone());
        let mix = EnsembleModel::new(space, vec![(alpha.clone(), f_arc), (beta.clone(), g_arc)])
            .map_err(|e| e.to_string())?;
        for scheme in [
            Scheme::Preset(IndexPreset::Shapley),
            Scheme::Preset(IndexPreset::Banzhaf),
            Scheme::Simple(gen::random_simple_weights(&mut rng, c.n(), false)),
        ] {
            let run = |m: &dyn Model| attribute_all(m, &c.fx.dist, &c.fx.instance, &scheme).map(|r| r.values);
            let (vf, vg, vm) = (run(&c.fx.model), run(&g), run(&mix));
            let (vf, vg, vm) = (
                vf.map_err(|e| e.to_string())?,
                vg.map_err(|e| e.to_string())?,
                vm.map_err(|e| e.to_string())?,
            );
            for a in 0..c.n() {
                let combined = &alpha * &vf[a] + &beta * &vg[a];
                ensure(combined == vm[a], || {
                    format!("fixture {i}, feature {a}: ensemble not linear")
                })?;
                linear += 1;
            }
        }
    }
    Ok(format!(
        "{dummies} dummy indices are 0, {pairs} additive interactions are 0, {linear} ensemble indices are linear"
    ))
}

fn criterion_9() -> Check {
    let mut rng = gen::rng(909);
    let mut checked = 0;
    for n in 1..=10 {
        for trial in 0..30 {
            // one third of the trials allow q_0 = 0
            let w = gen::random_simple_weights(&mut rng, n, trial % 3 != 0);
            let sys = ConverseSystem::new(w.clone());
            for l in 0..n {
                let coeffs = sys.p_coefficients(l);
                let closed: Rational = Rational::from(l as i64 - n as i64)
                    * (0..=l).map(|k| binomial(l, k) * w.weight(k)).sum::<Rational>();
                ensure(coeffs[l] == closed, || {
                    format!("n={n}, l={l}: leading {} != {closed}", coeffs[l])
                })?;
                if w.weight(0).is_positive() {
                    ensure(coeffs[l].is_negative(), || {
                        format!("n={n}, l={l}: leading coefficient not negative")
                    })?;
                }
                checked += 1;
            }
            let top = sys.p_coefficients(n);
            ensure(top[n].is_zero(), || {
                format!("n={n}: z^n coefficient of P_n is {}", top[n])
            })?;
        }
    }
    Ok(format!(
        "{checked} leading coefficients match (l-n) sum C(l,k) q_k; P_n has no z^n term for n <= 10"
    ))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn criterion_10() -> Check {
    let dir = fixtures_dir();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_powerdex"))
            .current_dir(&dir)
            .args([
                "attribute",
                "--model",
                "and_model.json",
                "--dist",
                "and_dist.json",
                "--instance",
                "and_instance.json",
                "--scheme",
                "shapley.json",
            ])
            .output()
            .map_err(|e| e.to_string())
    };
    let first = run()?;
    let second = run()?;
    ensure(first.status.success(), || format!("exit status {}", first.status))?;
    let golden = std::fs::read(dir.join("and_shapley.golden.json")).map_err(|e| e.to_string())?;
    ensure(first.stdout == golden, || {
        "output differs from the golden file".to_string()
    })?;
    ensure(first.stdout == second.stdout, || "repeated runs differ".to_string())?;
    let text = String::from_utf8(golden).map_err(|e| e.to_string())?;
    ensure(text.contains("\"3/8\",\n    \"3/8\""), || {
        "golden file lacks the 3/8 values".to_string()
    })?;

    // the golden values themselves come from enumeration
    let model = powerdex::io::parse_model(&std::fs::read_to_string(dir.join("and_model.json")).unwrap()).unwrap();
    let space = model.space().clone();
    let dist =
        powerdex::io::parse_distribution(&std::fs::read_to_string(dir.join("and_dist.json")).unwrap(), &space).unwrap();
    let e =
        powerdex::io::parse_instance(&std::fs::read_to_string(dir.join("and_instance.json")).unwrap(), &space).unwrap();
    let table = CoalitionTable::enumerate(&model, &dist, &e).map_err(|e| e.to_string())?;
    for a in 0..2 {
        let brute = table
            .simple_index(a, &SimpleWeights::shapley(2))
            .map_err(|e| e.to_string())?;
        ensure(brute == Rational::new(3, 8), || {
            format!("oracle gives {brute} for feature {a}")
        })?;
    }
    Ok(format!(
        "{} bytes, byte-identical to the golden file across runs",
        first.stdout.len()
    ))
}

fn main() {
    let start = Instant::now();
    let cases: Vec<Case> = gen::corpus(CORPUS_SEED, CORPUS_SIZE, 2..=8, 2..=3)
        .into_par_iter()
        .map(|fx| {
            let table = CoalitionTable::enumerate(&fx.model, &fx.dist, &fx.instance).expect("corpus is within budget");
            Case { fx, table }
        })
        .collect();
    let sizes: Vec<usize> = cases.iter().map(Case::n).collect();
    println!(
        "acceptance: {} trees, n in {}..={}, comparisons use {TOLERANCE}",
        cases.len(),
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap()
    );

    let criteria: Vec<Criterion<'_>> = vec![
        ("1 oracle equivalence, single feature", Box::new(|| criterion_1(&cases))),
        ("2 Bernoulli path, two expectations", Box::new(|| criterion_2(&cases))),
        ("3 Shapley efficiency", Box::new(|| criterion_3(&cases))),
        ("4 converse round trip", Box::new(|| criterion_4(&cases))),
        ("5 simple interaction path", Box::new(|| criterion_5(&cases))),
        ("6 Bernoulli interaction path", Box::new(|| criterion_6(&cases))),
        ("7 cross-path consistency", Box::new(|| criterion_7(&cases))),
        ("8 structural laws", Box::new(|| criterion_8(&cases))),
        ("9 converse polynomial facts", Box::new(criterion_9)),
        ("10 CLI determinism", Box::new(criterion_10)),
    ];

    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{:.1?}]", t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why} [{:.1?}]", t.elapsed());
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1?}",
        criteria.len() - failed,
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
