//! The multi-world flow as an explicit sum over replica pairs against its
//! resummed closed form, for integer orders.

use entroflow::random::{random_bath, random_coherent};
use entroflow::rflow::{multi_world_flow_closed, multi_world_flow_diagram_sum, RenyiOrder};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> entroflow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bath = random_bath(&mut rng, 2);
    let y = random_coherent(&mut rng, 2);
    println!("β = {:.4}, {} coherent lines", bath.beta.get(), y.len());
    for m in 2..=10u32 {
        let order = RenyiOrder::new(f64::from(m))?;
        let sum = multi_world_flow_diagram_sum(&bath, order, &y)?;
        let closed = multi_world_flow_closed(&bath, order, &y)?;
        println!("M = {m:>2}: sum {sum:>22.15e}  closed {closed:>22.15e}  rel {:.1e}", (sum - closed).abs() / closed.abs());
    }
    Ok(())
}
