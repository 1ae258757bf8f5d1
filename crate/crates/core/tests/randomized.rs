use majority_core::certify::{audit, brute_force_majority, same_verdict};
use majority_core::instance::generate;
use majority_core::randomized::{self, Branch, Params};
use majority_core::{CountingOracle, DistributionSpec, Instance, RandomStream};

fn colorings(n: usize, k: u64) -> impl Iterator<Item = Vec<u64>> {
    let total = k.pow(n as u32);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let c = code % k;
                code /= k;
                c
            })
            .collect()
    })
}

fn run_checked(inst: &Instance, params: &Params, seed: u64) -> randomized::Outcome {
    let balls: Vec<usize> = (0..inst.len()).collect();
    let mut oracle = CountingOracle::recording(inst);
    let mut rng = RandomStream::new(seed, "test", 0);
    let out = randomized::majority(&mut oracle, &balls, params, &mut rng).unwrap();
    let truth = brute_force_majority(inst);
    assert!(same_verdict(inst, &out.answer, &truth), "{:?}: {:?} vs {:?}", inst.colors(), out.answer, truth);
    audit(&out.answer, &out.certificate, oracle.transcript().unwrap(), inst.len(), &balls)
        .unwrap_or_else(|e| panic!("{:?}: {:?} {:?} {:?}", inst.colors(), out.answer, out.certificate, e));
    assert_eq!(out.stats.comparisons, oracle.comparisons());
    let per_level: u64 = out.stats.levels.iter().map(|l| l.comparisons).sum();
    assert_eq!(per_level, out.stats.comparisons);
    assert!(out.stats.comparisons <= 8 * inst.len() as u64);
    out
}

#[test]
fn exhaustive_small_with_every_branch_forced() {
    let variants = [
        Params::default().with_cutoff(2).with_epsilon_scale(0.0),
        Params::default().with_cutoff(2).with_epsilon_scale(0.05),
        Params::default().with_cutoff(3),
    ];
    for n in 1..=7 {
        for colors in colorings(n, 3) {
            let inst = Instance::new(colors).unwrap();
            for p in &variants {
                for seed in 0..3 {
                    run_checked(&inst, p, seed);
                }
            }
        }
    }
}

#[test]
fn subprocedures_called_directly_are_exact() {
    let p = Params::default().with_cutoff(2);
    for n in 1..=7 {
        for colors in colorings(n, 3) {
            let inst = Instance::new(colors).unwrap();
            let balls: Vec<usize> = (0..n).collect();
            let truth = brute_force_majority(&inst);
            for seed in 0..2 {
                for which in 0..3 {
                    let mut o = CountingOracle::recording(&inst);
                    let mut rng = RandomStream::from_seed(seed);
                    let out = match which {
                        0 => randomized::balanced(&mut o, &balls, &p, &mut rng),
                        1 => randomized::light(&mut o, &balls, &p, &mut rng),
                        _ => randomized::heavy(&mut o, &balls, (seed as usize) % n, &p, &mut rng),
                    }
                    .unwrap();
                    assert!(same_verdict(&inst, &out.answer, &truth));
                    audit(&out.answer, &out.certificate, o.transcript().unwrap(), n, &balls).unwrap();
                }
            }
        }
    }
}

#[test]
fn larger_random_instances_reach_all_branches() {
    let p = Params::default().with_cutoff(16).with_epsilon_scale(0.02);
    let specs = ["binary:p=0.5", "profile:0.48,rest=20", "profile:0.25,0.25,0.25,0.25", "profile:0.6,rest=5", "distinct", "uniform:k=3"];
    let mut seen = std::collections::HashSet::new();
    for (i, s) in specs.iter().enumerate() {
        let spec: DistributionSpec = s.parse().unwrap();
        for trial in 0..20u64 {
            let mut rng = RandomStream::new(11, "instance", trial * 10 + i as u64);
            let n = 200 + (trial as usize * 37) % 900;
            let inst = generate(&spec, n, &mut rng).unwrap();
            let out = run_checked(&inst, &p, trial);
            seen.extend(out.stats.branch_trace());
        }
    }
    for b in [Branch::Base, Branch::Balanced, Branch::Heavy, Branch::Light] {
        assert!(seen.contains(&b), "{b} never taken");
    }
}

#[test]
fn depth_is_logarithmic() {
    let p = Params::default().with_cutoff(2).with_epsilon_scale(0.0);
    let inst = Instance::new(vec![7; 4096]).unwrap();
    let out = run_checked(&inst, &p, 1);
    assert!(out.stats.depth() <= 13);
}
