#![allow(dead_code)]

use ftevolve_core::evo::{crossover, Operator, OperatorContext};
use ftevolve_core::synth::{generate_ft, GenSpec, KindTag};
use ftevolve_core::{Dataset, FaultTree, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LAMP_CSV: &str = "OF,CF,LB1,LB2,T,count
0,0,0,0,0,900
0,0,0,1,0,15
0,0,1,0,0,5
0,0,1,1,1,25
0,1,0,1,1,5
0,1,1,0,1,5
1,0,0,0,1,35
1,0,1,0,1,5
1,1,0,0,1,3
1,1,1,0,1,2
";

pub fn lamp_data() -> Dataset {
    Dataset::from_csv(LAMP_CSV, "T").unwrap()
}

pub fn lamp_tree() -> FaultTree {
    FaultTree::builder("T")
        .or("T", ["G1", "G2"])
        .or("G1", ["OF", "CF"])
        .and("G2", ["LB1", "LB2"])
        .build()
        .unwrap()
}

/// Context over `B1..Bn` with top `T`.
pub fn context(n: usize, kn: bool) -> OperatorContext {
    OperatorContext::new((1..=n).map(|i| NodeId::new(&format!("B{i}"))), &NodeId::new("T"), kn)
}

/// A valid random tree over at most `max_bes` events, roughened by a few
/// random operator applications so shared events, small gates and
/// `AtLeast` gates all occur.
pub fn random_tree(seed: u64, max_bes: usize) -> FaultTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bes = rng.gen_range(2..=max_bes);
    let gates = rng.gen_range(1..bes);
    let mut spec = GenSpec::new(bes, gates, rng.gen());
    spec.kinds = vec![KindTag::And, KindTag::Or, KindTag::AtLeast];
    let mut ft = generate_ft(&spec).unwrap();
    let other = generate_ft(&GenSpec { seed: rng.gen(), ..spec.clone() }).unwrap();
    let ctx = context(bes, true);
    for _ in 0..rng.gen_range(0..6) {
        let op = Operator::ALL[rng.gen_range(0..Operator::ALL.len())];
        let next = if op == Operator::Crossover {
            crossover(&ft, &other, &ctx, &mut rng).map(|(a, _)| a)
        } else {
            op.apply(&ft, &ctx, &mut rng)
        };
        if let Some(t) = next {
            if t.basic_events().len() <= max_bes {
                ft = t;
            }
        }
    }
    ft
}
