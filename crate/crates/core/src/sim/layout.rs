use super::circuit::Circuit;

/// True iff every two-qubit gate acts on a pair listed in `adjacency`
/// (in either orientation).
pub fn check_line_layout(circuit: &Circuit, adjacency: &[(usize, usize)]) -> bool {
    circuit
        .gates()
        .iter()
        .filter(|g| g.is_two_qubit())
        .all(|g| {
            let t = g.targets();
            adjacency
                .iter()
                .any(|&(a, b)| (a, b) == (t[0], t[1]) || (b, a) == (t[0], t[1]))
        })
}

/// Nearest-neighbour pairs of a line visiting `order` left to right.
pub fn line_adjacency(order: &[usize]) -> Vec<(usize, usize)> {
    order.windows(2).map(|w| (w[0], w[1])).collect()
}
