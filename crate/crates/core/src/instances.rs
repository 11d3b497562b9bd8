//! Deterministic instance generators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GenError;
use crate::graph::{Ring, RootedTree};
use crate::weight::Weight;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with row coordinates so sweep rows get independent streams.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut rng = seeded_rng(seed ^ a.rotate_left(32) ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.gen()
}

/// `(1, q, 1)`: the ring where greedy on-line exploration pays almost twice the optimum.
pub fn c_prime(q: Weight) -> Result<Ring, GenError> {
    if q.is_zero() {
        return Err(GenError::InvalidParameter("q must be positive".into()));
    }
    Ok(Ring::new(
        vec![Weight::from_int(1), q, Weight::from_int(1)],
        0,
    )?)
}

/// Ring of order `n` with integer weights drawn uniformly from `1..=max_weight`.
pub fn random_ring(rng: &mut impl Rng, n: usize, max_weight: u64) -> Result<Ring, GenError> {
    if max_weight < 1 {
        return Err(GenError::InvalidParameter(
            "max weight must be positive".into(),
        ));
    }
    let weights = (0..n)
        .map(|_| rng.gen_range(1..=max_weight))
        .collect::<Vec<_>>();
    Ok(Ring::from_ints(&weights, 0)?)
}

/// Random recursive tree: vertex `i` hangs below a uniform earlier vertex.
pub fn random_tree(rng: &mut impl Rng, n: usize, max_weight: u64) -> Result<RootedTree, GenError> {
    if n < 1 {
        return Err(GenError::InvalidParameter("a tree needs a vertex".into()));
    }
    if max_weight < 1 {
        return Err(GenError::InvalidParameter(
            "max weight must be positive".into(),
        ));
    }
    let mut parent = vec![None];
    let mut weights = vec![Weight::ZERO];
    for i in 1..n {
        parent.push(Some(rng.gen_range(0..i)));
        weights.push(Weight::from_int(rng.gen_range(1..=max_weight)));
    }
    Ok(RootedTree::from_parents(0, parent, weights)?)
}

/// Root joined to `leaves` leaves by edges of weight `weight`.
pub fn star(leaves: usize, weight: Weight) -> Result<RootedTree, GenError> {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v, weight)).collect();
    Ok(RootedTree::from_edges(leaves + 1, 0, &edges)?)
}

/// Path `0 - 1 - … - (n-1)` rooted at 0.
pub fn path(n: usize, weight: Weight) -> Result<RootedTree, GenError> {
    if n < 1 {
        return Err(GenError::InvalidParameter("a path needs a vertex".into()));
    }
    let parent = (0..n).map(|v| v.checked_sub(1)).collect();
    let mut weights = vec![weight; n];
    weights[0] = Weight::ZERO;
    Ok(RootedTree::from_parents(0, parent, weights)?)
}

/// Unit-weight legs of the given lengths joined at the root; legs numbered in order.
pub fn spider(legs: &[usize]) -> Result<RootedTree, GenError> {
    let mut parent = vec![None];
    for &len in legs {
        if len == 0 {
            return Err(GenError::InvalidParameter(
                "legs need at least one edge".into(),
            ));
        }
        let mut above = 0;
        for _ in 0..len {
            parent.push(Some(above));
            above = parent.len() - 1;
        }
    }
    let mut weights = vec![Weight::from_int(1); parent.len()];
    weights[0] = Weight::ZERO;
    Ok(RootedTree::from_parents(0, parent, weights)?)
}

/// Ring of order `n`, every edge `weight`.
pub fn uniform_ring(n: usize, weight: Weight) -> Result<Ring, GenError> {
    Ok(Ring::new(vec![weight; n], 0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Topology;

    #[test]
    fn seeded_generators_repeat() {
        let a = random_ring(&mut seeded_rng(7), 20, 9).unwrap();
        let b = random_ring(&mut seeded_rng(7), 20, 9).unwrap();
        assert_eq!(a, b);
        let t1 = random_tree(&mut seeded_rng(3), 50, 4).unwrap();
        let t2 = random_tree(&mut seeded_rng(3), 50, 4).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.len(), 50);
        assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
    }

    #[test]
    fn shapes() {
        assert_eq!(
            star(3, Weight::from_int(2)).unwrap().leaves(),
            vec![1, 2, 3]
        );
        let p = path(4, Weight::from_int(2)).unwrap();
        assert_eq!(p.height(), Weight::from_int(6));
        let s = spider(&[3, 1, 1]).unwrap();
        assert_eq!(s.leaves(), vec![3, 4, 5]);
        assert_eq!(s.total_weight(), Weight::from_int(5));
        assert!(spider(&[0]).is_err());
        assert_eq!(
            c_prime(Weight::from_int(4)).unwrap().weight(1),
            Weight::from_int(4)
        );
        assert!(uniform_ring(2, Weight::from_int(1)).is_err());
    }
}
