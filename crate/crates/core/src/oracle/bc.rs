use super::OracleError;
use crate::scalar::{approx_eq, definitely_less, Scalar};
use crate::topology::Topology;

/// Largest topology accepted by [`bc_bruteforce`].
pub const BC_MAX_ZONES: usize = 8;

fn simple_paths<T: Scalar>(topo: &Topology<T>, weights: &[T], at: usize, target: usize, seen: &mut Vec<bool>, trail: &mut Vec<usize>, len: T, out: &mut Vec<(T, Vec<usize>)>) {
    if at == target {
        out.push((len, trail.clone()));
        return;
    }
    for &e in topo.out_edges(at) {
        let next = topo.edges()[e].to;
        if seen[next] {
            continue;
        }
        seen[next] = true;
        trail.push(next);
        simple_paths(topo, weights, next, target, seen, trail, len + weights[e], out);
        trail.pop();
        seen[next] = false;
    }
}

/// Betweenness by listing every simple path of every zone pair and keeping
/// the minimum-weight ones.
pub fn bc_bruteforce<T: Scalar>(topo: &Topology<T>, weights: &[T]) -> Result<Vec<T>, OracleError> {
    let n = topo.zone_count();
    if n > BC_MAX_ZONES {
        return Err(OracleError::Limit(format!("{n} zones, brute-force betweenness handles at most {BC_MAX_ZONES}")));
    }
    let mut bc = vec![T::zero(); n];
    for s in 0..n {
        for t in s + 1..n {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut paths = Vec::new();
            simple_paths(topo, weights, s, t, &mut seen, &mut vec![s], T::zero(), &mut paths);
            let best = paths.iter().map(|p| p.0).fold(T::infinity(), |a, b| if definitely_less(b, a) { b } else { a });
            let shortest: Vec<&Vec<usize>> = paths.iter().filter(|p| approx_eq(p.0, best)).map(|p| &p.1).collect();
            let total = T::from_usize(shortest.len()).unwrap();
            for (v, slot) in bc.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let through = shortest.iter().filter(|p| p.contains(&v)).count();
                *slot = *slot + T::from_usize(through).unwrap() / total;
            }
        }
    }
    Ok(bc)
}
