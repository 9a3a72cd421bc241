use hyperzeta::budget::Budget;
use hyperzeta::zerostats::*;
use std::time::Instant;

fn main() {
    let b = Budget::default();
    let t0 = Instant::now();
    let table = hyperzeta::ffpoly::primes::PrimeTable::shared(3, 16, &b).unwrap();
    let n16 = table.count(16);
    println!("prime table to deg 16 built in {:.2?} ({} primes of deg 16)", t0.elapsed(), n16);

    let config = ExperimentConfig {
        q: 3,
        g_list: vec![16],
        beta: 0.3,
        k_rule: KRule::Auto,
        samples: 8,
        seed: 7,
        workers: None,
        budget: b,
    };
    let t1 = Instant::now();
    let r = run_moment_experiment(&config).unwrap();
    let dt = t1.elapsed();
    println!("8 samples at g=16 in {:.2?} -> {:.2?}/sample (2 threads)", dt, dt / 8);
    println!("K = {}", r.per_g[0].k);
    println!("N_I values: {:?}", r.per_g[0].records.iter().map(|x| x.n_i).collect::<Vec<_>>());
    println!("est for 2000 samples: {:.1} min", dt.as_secs_f64() / 8.0 * 2000.0 / 60.0);
}
