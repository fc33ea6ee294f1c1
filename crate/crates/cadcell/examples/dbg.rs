// debug scratch — examine certification on the W section
use cadcell::cell::{Cell, CellIndex};
use cadcell::expr::{parse, ScalarExpr};
use cadcell::interval::Interval;
use cadcell::oracle::{certify, closure_contains, CertifyMode, OracleConfig};
use rand::SeedableRng;
use std::sync::Arc;

fn c311() -> Arc<Cell> {
    let l1 = Arc::new(Cell::interval1d(Some(ScalarExpr::constant(0)), None).with_index(CellIndex::new(vec![3])));
    let l2 = Arc::new(Cell::sector(l1, None, None).unwrap().with_index(CellIndex::new(vec![3,1])));
    Arc::new(Cell::sector(l2, None, None).unwrap().with_index(CellIndex::new(vec![3,1,1])))
}

fn main() {
    let f = parse("-(x2^2+x3^2)/x1 + 0", 3).unwrap();
    let c3112 = Cell::section(c311(), f).unwrap();
    let cfg = OracleConfig::default();
    let p = [0.0, 0.0, 0.0, 1.0];

    let bx: Vec<Interval<f64>> = p.iter().map(|&c| Interval::new(c - 0.5, c + 0.5)).collect();
    println!("box_empty(root) = {}", certify::box_empty(&c3112, &bx));
    println!("ball_empty rho=0.5: {:?}", certify::ball_empty(&c3112, &p, 0.5, &cfg));
    println!("ball_empty rho=0.25: {:?}", certify::ball_empty(&c3112, &p, 0.25, &cfg));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let v = closure_contains(&c3112, &p, &cfg, CertifyMode::Fast, &mut rng);
    println!("verdict: {:?} sep={:?} chain_len={}", v.kind, v.separation, v.witness_chain.len());
    if let Some((e, w)) = v.witness_chain.last() { println!("last witness eps={e} w={w:?}"); }
}
