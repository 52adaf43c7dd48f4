use super::InteractionGraph;

/// Strongly connected components by iterative Tarjan.
///
/// Returns a component id per vertex; ids are assigned in the order the
/// components are completed.
pub fn strongly_connected_components(g: &InteractionGraph) -> Vec<usize> {
    const UNVISITED: usize = usize::MAX;
    let n = g.user_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut component = vec![UNVISITED; n];
    let mut stack: Vec<usize> = Vec::new();
    // (vertex, position of the next out-edge to explore)
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_component = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, pos)) = call.last() {
            if pos == 0 && index[v] == UNVISITED {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let start = g.offsets[v];
            let end = g.offsets[v + 1];
            let mut next = pos;
            let mut child = None;
            while start + next < end {
                let w = g.targets[start + next] as usize;
                next += 1;
                if index[w] == UNVISITED {
                    child = Some(w);
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if let Some(top) = call.last_mut() {
                top.1 = next;
            }
            if let Some(w) = child {
                call.push((w, 0));
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component[w] = next_component;
                    if w == v {
                        break;
                    }
                }
                next_component += 1;
            }
        }
    }
    component
}

/// The giant strongly connected component and the sizes around it.
#[derive(Clone, Debug)]
pub struct GsccReport {
    pub graph: InteractionGraph,
    /// Original indices of the kept users, ascending.
    pub members: Vec<usize>,
    pub largest: usize,
    /// Size of the runner-up component, 0 if there is only one.
    pub second: usize,
    pub component_count: usize,
}

/// Subgraph induced by the largest SCC by vertex count. Ties go to the
/// component holding the smallest user id.
pub fn extract_gscc(g: &InteractionGraph) -> GsccReport {
    let component = strongly_connected_components(g);
    let count = component.iter().copied().max().map_or(0, |m| m + 1);
    let mut size = vec![0usize; count];
    // vertices are visited in ascending index (= id) order, so the first
    // vertex seen per component is its smallest id
    let mut smallest = vec![usize::MAX; count];
    for (v, &c) in component.iter().enumerate() {
        size[c] += 1;
        smallest[c] = smallest[c].min(v);
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| size[b].cmp(&size[a]).then(smallest[a].cmp(&smallest[b])));
    let giant = order.first().copied();
    let keep: Vec<bool> = component.iter().map(|&c| Some(c) == giant).collect();
    let members = (0..g.user_count()).filter(|&v| keep[v]).collect();
    GsccReport {
        graph: g.induced_subgraph(&keep),
        members,
        largest: giant.map_or(0, |c| size[c]),
        second: order.get(1).map_or(0, |&c| size[c]),
        component_count: count,
    }
}
