use scoreng::constraints::assemble;
use scoreng::data::{generate_synthetic, SynthOptions};
use scoreng::fixtures::*;
use scoreng::layout::build_index_map;
use scoreng::problems::*;

fn main() {
    let layout = fraud_layout();
    for seed in [1u64, 2, 3] {
        let t0 = std::time::Instant::now();
        let ds = generate_synthetic(&layout, &SynthOptions { n: 9907, seed, ..Default::default() }).unwrap();
        let (dev, val) = ds.split(&FRAUD_VALIDATION_KEYS);
        let m = dev.moments().unwrap();
        let cs = assemble(&fraud_spec(), &m, &build_index_map(&layout)).unwrap();
        let csc = cs.without_inweights();
        match solve_classic(&m, &csc, FRAUD_DELTA) {
            Ok(mut sol) => {
                sol.set_validation(&val.moments().unwrap()).unwrap();
                println!("seed {seed}: classic div_dev={:.4} div_val={:.4} in {:?}", sol.div_dev, sol.div_val.unwrap(), t0.elapsed());
                let fails = verify_solution(&sol, &m, &csc);
                println!("  verify: {fails:?}");
                let t1 = std::time::Instant::now();
                match solve_inweight(&m, &cs, FRAUD_LAMBDA, None) {
                    Ok(iw) => println!("  inweight div={:.4} phi*={:?} evals={} in {:?}", iw.div_dev, iw.phi_star, iw.trace.len(), t1.elapsed()),
                    Err(e) => println!("  inweight ERR: {e}"),
                }
                let t2 = std::time::Instant::now();
                let floor = 0.8 * sol.div_dev;
                match solve_range(&m, &cs, FRAUD_LAMBDA, &fraud_range_targets(), floor, None) {
                    Ok(r) => println!("  range div={:.4} floor={:.4} phi*={:?} in {:?}", r.div_dev, floor, r.phi_star, t2.elapsed()),
                    Err(e) => println!("  range ERR: {e}"),
                }
            }
            Err(e) => println!("seed {seed}: classic ERR: {e}"),
        }
    }
}
