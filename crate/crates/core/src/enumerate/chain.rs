//! The one-dimensional model on the segment with vertices `0..L`.
//!
//! Edge `m` joins vertices `m` and `m + 1`. The closed window spans
//! `[-1/2, L - 1/2]`, so the counted potentials are the vacancy potentials at
//! vertices `-1..=L` and the broken-link potentials centred at edges
//! `-2..=L`.

use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainBoundary {
    /// Every vertex outside the segment is vacant.
    Vacant,
    /// Outside the window, edges `2k` (joining `2k` and `2k + 1`) are occupied.
    FullyPacked,
}

#[derive(Debug, Clone)]
pub struct Chain {
    len: i64,
    boundary: ChainBoundary,
}

impl Chain {
    pub fn new(len: usize, boundary: ChainBoundary) -> Self {
        Chain { len: len as i64, boundary }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Edges whose occupancy is not fixed by the boundary.
    pub fn free_edges(&self) -> std::ops::RangeInclusive<i64> {
        match self.boundary {
            ChainBoundary::Vacant => 0..=self.len - 2,
            ChainBoundary::FullyPacked => -1..=self.len - 1,
        }
    }

    fn exterior(&self, m: i64) -> bool {
        match self.boundary {
            ChainBoundary::Vacant => false,
            ChainBoundary::FullyPacked => m.rem_euclid(2) == 0,
        }
    }

    /// Every valid occupancy of the free edges, as the list of occupied
    /// edges, in lexicographic backtracking order.
    pub fn configs(&self) -> Vec<Vec<i64>> {
        let free: Vec<i64> = self.free_edges().collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.extend(&free, 0, &mut chosen, &mut out);
        out
    }

    fn occupied_in(&self, chosen: &[i64], m: i64) -> bool {
        if self.free_edges().contains(&m) {
            chosen.contains(&m)
        } else {
            self.exterior(m)
        }
    }

    fn extend(&self, free: &[i64], i: usize, chosen: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == free.len() {
            out.push(chosen.clone());
            return;
        }
        self.extend(free, i + 1, chosen, out);
        let m = free[i];
        let blocked = self.occupied_in(chosen, m - 1) || self.occupied_in(chosen, m + 1);
        if !blocked {
            chosen.push(m);
            self.extend(free, i + 1, chosen, out);
            chosen.pop();
        }
    }

    /// Numbers of counted vacancies and broken links of a configuration.
    pub fn defects(&self, occupied: &[i64]) -> (i64, i64) {
        let occ = |m: i64| self.occupied_in(occupied, m);
        let vac = (-1..=self.len).filter(|&v| !occ(v - 1) && !occ(v)).count() as i64;
        let links = (-2..=self.len).filter(|&m| occ(m - 1) != occ(m + 1)).count() as i64;
        (vac, links)
    }

    pub fn log_weight(&self, occupied: &[i64], params: &ModelParams) -> f64 {
        let (v, b) = self.defects(occupied);
        -params.beta * params.energy_of(v, b)
    }

    pub fn log_partition_function(&self, params: &ModelParams) -> f64 {
        let logs = self.configs().iter().map(|c| self.log_weight(c, params)).collect();
        super::log_sum_exp(logs)
    }

    pub fn partition_function(&self, params: &ModelParams) -> f64 {
        self.log_partition_function(params).exp()
    }

    /// Probability that edge `m` is occupied.
    pub fn edge_marginal(&self, m: i64, params: &ModelParams) -> f64 {
        let log_z = self.log_partition_function(params);
        self.configs().iter().filter(|c| c.contains(&m)).map(|c| (self.log_weight(c, params) - log_z).exp()).sum()
    }
}
