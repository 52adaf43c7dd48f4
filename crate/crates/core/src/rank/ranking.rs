use super::RankError;

/// A total order of users by credit, highest first, ties by ascending index
/// (which is ascending user id).
#[derive(Clone, Debug, PartialEq)]
pub struct RankedList {
    order: Vec<usize>,
    /// 1-based position of every user.
    position: Vec<usize>,
    credits: Vec<f64>,
}

impl RankedList {
    pub fn from_credits(credits: &[f64]) -> Self {
        let order: Vec<usize> = (0..credits.len()).collect();
        Self::sorted(order, credits.to_vec())
    }

    /// Re-ranks new credits, starting the sort from this list's order, which
    /// is nearly sorted between consecutive iterations.
    pub fn rerank(&self, credits: &[f64]) -> Self {
        assert_eq!(credits.len(), self.order.len());
        Self::sorted(self.order.clone(), credits.to_vec())
    }

    fn sorted(mut order: Vec<usize>, credits: Vec<f64>) -> Self {
        order.sort_by(|&a, &b| credits[b].total_cmp(&credits[a]).then(a.cmp(&b)));
        let mut position = vec![0; order.len()];
        for (p, &u) in order.iter().enumerate() {
            position[u] = p + 1;
        }
        Self { order, position, credits }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Users from first to last place.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The first `min(k, len)` users.
    pub fn top(&self, k: usize) -> &[usize] {
        &self.order[..k.min(self.order.len())]
    }

    /// 1-based rank of `user`.
    pub fn rank(&self, user: usize) -> usize {
        self.position[user]
    }

    pub fn credit(&self, user: usize) -> f64 {
        self.credits[user]
    }

    pub fn credits(&self) -> &[f64] {
        &self.credits
    }

    /// `(user, credit)` pairs in rank order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.order.iter().map(|&u| (u, self.credits[u]))
    }
}

/// Sum of absolute rank changes over the union of both top-`k` sets, with
/// ranks taken from the full orderings.
pub fn ranking_distance(prev: &RankedList, curr: &RankedList, k: usize) -> Result<usize, RankError> {
    if prev.len() != curr.len() {
        return Err(RankError::MismatchedUsers { left: prev.len(), right: curr.len() });
    }
    let k = k.min(curr.len());
    let moved = |u: usize| curr.rank(u).abs_diff(prev.rank(u));
    let mut distance: usize = curr.top(k).iter().map(|&u| moved(u)).sum();
    distance += prev.top(k).iter().filter(|&&u| curr.rank(u) > k).map(|&u| moved(u)).sum::<usize>();
    Ok(distance)
}
