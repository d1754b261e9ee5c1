//! Goal-selection strategies and the grid statistics behind them.
//!
//! A grid over the observation space tracks, per cell, how many steps landed
//! there (visits), how often the cell was targeted as a goal, and how often a
//! targeted goal succeeded. Discrete spaces get one cell per state; box
//! spaces a uniform per-dimension binning.
//!
//! Cell weights:
//!
//! - novelty:       `w_N = 1 / (p_v + eps)^n` with `p_v` the cell's share of
//!   all steps — rarely visited cells are preferred;
//! - intermediate:  `w_S = 1 / (|p_s - p_st| + eps)^n` with `p_s` the cell's
//!   goal success rate — cells near the target rate `p_st` are preferred.
//!
//! Every strategy is mixed with a slice of uniform sampling over the whole
//! space so no region ever starves.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Observation, SpaceDescriptor};
use crate::error::{Error, Result};
use crate::goal::GoalSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Uniform,
    Novelty,
    Intermediate,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::Novelty => "novelty",
            Strategy::Intermediate => "intermediate",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(Strategy::Uniform),
            "novelty" => Ok(Strategy::Novelty),
            "intermediate" => Ok(Strategy::Intermediate),
            other => Err(Error::Config(format!(
                "unknown strategy '{other}' (expected uniform | novelty | intermediate)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SelectionParams {
    /// Pole guard in both weight formulas.
    pub epsilon: f64,
    /// Decay exponent `n`.
    pub exponent: f64,
    /// Target success rate `p_st` for the intermediate strategy.
    pub target_success: f64,
    /// Probability of ignoring the strategy and sampling uniformly over the
    /// whole observation space.
    pub uniform_mix: f64,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            epsilon: 0.01,
            exponent: 2.0,
            target_success: 0.75,
            uniform_mix: 0.1,
        }
    }
}

pub fn novelty_weight(p_v: f64, params: &SelectionParams) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_v));
    (p_v + params.epsilon).powf(-params.exponent)
}

pub fn intermediate_weight(p_s: f64, params: &SelectionParams) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_s));
    ((p_s - params.target_success).abs() + params.epsilon).powf(-params.exponent)
}

/// Cell layout of the statistics grid.
#[derive(Clone, Debug)]
pub enum GridLayout {
    /// One cell per discrete state.
    PerState { n: usize },
    /// Uniform binning of a box space, `bins` cells per dimension.
    Binned {
        low: Vec<f64>,
        high: Vec<f64>,
        bins: Vec<usize>,
    },
}

impl GridLayout {
    /// Grid matching a space: identity for discrete, `bins_per_dim` uniform
    /// bins per dimension for box (100 per dimension gives the 10,000-cell
    /// grid used for Pathological Mountain Car).
    pub fn for_space(space: &SpaceDescriptor, bins_per_dim: usize) -> Self {
        match space {
            SpaceDescriptor::Discrete { n } => GridLayout::PerState { n: *n },
            SpaceDescriptor::Box { low, high } => GridLayout::Binned {
                low: low.clone(),
                high: high.clone(),
                bins: vec![bins_per_dim; low.len()],
            },
        }
    }

    pub fn n_cells(&self) -> usize {
        match self {
            GridLayout::PerState { n } => *n,
            GridLayout::Binned { bins, .. } => bins.iter().product(),
        }
    }

    /// Cell index of an in-space observation.
    pub fn cell_of(&self, obs: &Observation) -> usize {
        match (self, obs) {
            (GridLayout::PerState { n }, Observation::Discrete(i)) => {
                assert!(i < n, "state {i} out of range");
                *i
            }
            (GridLayout::Binned { low, high, bins }, Observation::Continuous(v)) => {
                let mut idx = 0;
                for (d, x) in v.iter().enumerate() {
                    let frac = (x - low[d]) / (high[d] - low[d]);
                    let b = ((frac * bins[d] as f64) as usize).min(bins[d] - 1);
                    idx = idx * bins[d] + b;
                }
                idx
            }
            _ => panic!("observation does not match the grid layout"),
        }
    }

    /// A point drawn uniformly within a cell: for discrete layouts the state
    /// itself; for binned layouts a uniform point in the cell's rectangle.
    pub fn sample_within(&self, cell: usize, rng: &mut impl Rng) -> Observation {
        match self {
            GridLayout::PerState { n } => {
                assert!(cell < *n);
                Observation::Discrete(cell)
            }
            GridLayout::Binned { low, high, bins } => {
                let mut idx = cell;
                let mut coords = vec![0usize; bins.len()];
                for d in (0..bins.len()).rev() {
                    coords[d] = idx % bins[d];
                    idx /= bins[d];
                }
                let point = coords
                    .iter()
                    .enumerate()
                    .map(|(d, &b)| {
                        let width = (high[d] - low[d]) / bins[d] as f64;
                        let lo = low[d] + b as f64 * width;
                        rng.gen_range(lo..lo + width)
                    })
                    .collect();
                Observation::Continuous(point)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct CellStats {
    visits: u64,
    targeted: u64,
    succeeded: u64,
}

/// Per-cell visitation and goal-outcome counters over the observation space.
#[derive(Clone, Debug)]
pub struct GridStats {
    layout: GridLayout,
    cells: Vec<CellStats>,
    total_steps: u64,
}

impl GridStats {
    pub fn new(layout: GridLayout) -> Self {
        let n = layout.n_cells();
        GridStats {
            layout,
            cells: vec![CellStats::default(); n],
            total_steps: 0,
        }
    }

    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    /// Count one environment step landing on `obs`.
    pub fn record_step(&mut self, obs: &Observation) {
        let cell = self.layout.cell_of(obs);
        self.cells[cell].visits += 1;
        self.total_steps += 1;
    }

    /// Count a targeted goal and whether the episode reached it.
    pub fn record_goal_outcome(&mut self, goal: &GoalSpec, success: bool) {
        let cell = self.layout.cell_of(&goal.point);
        self.cells[cell].targeted += 1;
        if success {
            self.cells[cell].succeeded += 1;
        }
    }

    pub fn visits(&self, cell: usize) -> u64 {
        self.cells[cell].visits
    }

    pub fn targeted(&self, cell: usize) -> u64 {
        self.cells[cell].targeted
    }

    pub fn succeeded(&self, cell: usize) -> u64 {
        self.cells[cell].succeeded
    }

    /// Share of all steps spent in this cell (`p_v`); 0 before any step.
    pub fn visit_fraction(&self, cell: usize) -> f64 {
        if self.total_steps == 0 {
            0.0
        } else {
            self.cells[cell].visits as f64 / self.total_steps as f64
        }
    }

    /// Goal success rate of this cell (`p_s`); undefined until targeted.
    pub fn success_rate(&self, cell: usize) -> Option<f64> {
        let c = &self.cells[cell];
        if c.targeted == 0 {
            None
        } else {
            Some(c.succeeded as f64 / c.targeted as f64)
        }
    }
}

/// A selected goal plus whether the strategy had to fall back to uniform
/// sampling because it had no statistics to work from.
#[derive(Clone, Debug)]
pub struct SelectedGoal {
    pub goal: GoalSpec,
    pub fallback: bool,
}

/// Pick a goal for the next episode. The current state is deliberately not an
/// input: start conditions vary only slightly and episodes end on success, so
/// strategies ignore it.
pub fn select_goal<R: Rng>(
    strategy: Strategy,
    stats: &GridStats,
    params: &SelectionParams,
    space: &SpaceDescriptor,
    tolerance: f64,
    rng: &mut R,
) -> SelectedGoal {
    let uniform = |rng: &mut R, fallback: bool| SelectedGoal {
        goal: GoalSpec::new(space.sample_uniform(rng), tolerance),
        fallback,
    };

    if rng.gen::<f64>() < params.uniform_mix {
        return uniform(rng, false);
    }

    match strategy {
        Strategy::Uniform => uniform(rng, false),
        Strategy::Novelty => {
            if stats.total_steps() == 0 {
                return uniform(rng, true);
            }
            let weights: Vec<f64> = (0..stats.n_cells())
                .map(|c| novelty_weight(stats.visit_fraction(c), params))
                .collect();
            let dist = WeightedIndex::new(&weights).expect("novelty weights are positive");
            let cell = dist.sample(rng);
            SelectedGoal {
                goal: GoalSpec::new(stats.layout().sample_within(cell, rng), tolerance),
                fallback: false,
            }
        }
        Strategy::Intermediate => {
            let visited: Vec<usize> = (0..stats.n_cells()).filter(|&c| stats.visits(c) > 0).collect();
            if visited.is_empty() {
                return uniform(rng, true);
            }
            let untargeted: Vec<usize> = visited
                .iter()
                .copied()
                .filter(|&c| stats.targeted(c) == 0)
                .collect();
            let frac_untargeted = untargeted.len() as f64 / visited.len() as f64;
            if !untargeted.is_empty() && rng.gen::<f64>() < frac_untargeted {
                let cell = untargeted[rng.gen_range(0..untargeted.len())];
                return SelectedGoal {
                    goal: GoalSpec::new(stats.layout().sample_within(cell, rng), tolerance),
                    fallback: false,
                };
            }
            let targeted: Vec<usize> = (0..stats.n_cells()).filter(|&c| stats.targeted(c) > 0).collect();
            if targeted.is_empty() {
                return uniform(rng, true);
            }
            let weights: Vec<f64> = targeted
                .iter()
                .map(|&c| intermediate_weight(stats.success_rate(c).unwrap(), params))
                .collect();
            let dist = WeightedIndex::new(&weights).expect("intermediate weights are positive");
            let cell = targeted[dist.sample(rng)];
            SelectedGoal {
                goal: GoalSpec::new(stats.layout().sample_within(cell, rng), tolerance),
                fallback: false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::{prop_assert, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> SelectionParams {
        SelectionParams::default()
    }

    #[test]
    fn fresh_stats_count_a_single_step() {
        let mut stats = GridStats::new(GridLayout::PerState { n: 4 });
        stats.record_step(&Observation::Discrete(2));
        assert_eq!(stats.visits(2), 1);
        assert_eq!(stats.total_steps(), 1);
        assert_eq!(stats.visit_fraction(2), 1.0);
    }

    #[test]
    fn all_steps_in_one_cell_give_full_fraction() {
        let mut stats = GridStats::new(GridLayout::PerState { n: 3 });
        for _ in 0..100 {
            stats.record_step(&Observation::Discrete(1));
        }
        assert_eq!(stats.visit_fraction(1), 1.0);
        assert_eq!(stats.visit_fraction(0), 0.0);
    }

    #[test]
    fn even_split_gives_half_each() {
        let mut stats = GridStats::new(GridLayout::PerState { n: 2 });
        for i in 0..100 {
            stats.record_step(&Observation::Discrete(i % 2));
        }
        assert_eq!(stats.visit_fraction(0), 0.5);
        assert_eq!(stats.visit_fraction(1), 0.5);
    }

    #[test]
    fn goal_outcomes_track_success_rate() {
        let mut stats = GridStats::new(GridLayout::PerState { n: 4 });
        let goal = GoalSpec::new(Observation::Discrete(3), 0.1);
        for success in [true, true, true, false] {
            stats.record_goal_outcome(&goal, success);
        }
        assert_eq!(stats.success_rate(3), Some(0.75));
        assert_eq!(stats.success_rate(0), None, "untargeted cell has no rate");
    }

    #[test]
    fn novelty_weight_hand_values() {
        let p = params();
        assert_relative_eq!(novelty_weight(0.0, &p), 10_000.0, max_relative = 1e-9);
        assert_relative_eq!(novelty_weight(0.5, &p), 1.0 / 0.2601, max_relative = 1e-9);
        assert_relative_eq!(novelty_weight(0.5, &p), 3.844675125, max_relative = 1e-6);
        assert_eq!(novelty_weight(0.25, &p), novelty_weight(0.25, &p));
    }

    #[test]
    fn intermediate_weight_hand_values() {
        let p = SelectionParams {
            target_success: 0.9,
            ..params()
        };
        assert_relative_eq!(intermediate_weight(0.9, &p), 10_000.0, max_relative = 1e-9);
        let p = SelectionParams {
            target_success: 0.0,
            ..params()
        };
        assert_relative_eq!(intermediate_weight(0.99, &p), 1.0, max_relative = 1e-9);
        // symmetric around the target
        let p = SelectionParams {
            target_success: 0.5,
            ..params()
        };
        assert_relative_eq!(
            intermediate_weight(0.3, &p),
            intermediate_weight(0.7, &p),
            max_relative = 1e-12
        );
    }

    #[test]
    fn novelty_with_no_visits_falls_back_to_uniform() {
        let stats = GridStats::new(GridLayout::PerState { n: 48 });
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let space = SpaceDescriptor::discrete(48);
        let picked = select_goal(Strategy::Novelty, &stats, &params(), &space, 0.1, &mut rng);
        assert!(picked.fallback);
        assert!(space.contains(&picked.goal.point));
    }

    #[test]
    fn selected_discrete_goals_are_valid_state_indices() {
        let mut stats = GridStats::new(GridLayout::PerState { n: 16 });
        let space = SpaceDescriptor::discrete(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..200 {
            stats.record_step(&Observation::Discrete(i % 16));
        }
        for strategy in [Strategy::Uniform, Strategy::Novelty, Strategy::Intermediate] {
            for _ in 0..200 {
                let picked = select_goal(strategy, &stats, &params(), &space, 0.1, &mut rng);
                assert!(space.contains(&picked.goal.point));
            }
        }
    }

    #[test]
    fn intermediate_mixes_in_untargeted_cells() {
        // two visited cells, one targeted: the untargeted one must be picked
        // roughly half the time (modulo the uniform mix).
        let mut stats = GridStats::new(GridLayout::PerState { n: 2 });
        for _ in 0..50 {
            stats.record_step(&Observation::Discrete(0));
            stats.record_step(&Observation::Discrete(1));
        }
        let goal0 = GoalSpec::new(Observation::Discrete(0), 0.1);
        for _ in 0..10 {
            stats.record_goal_outcome(&goal0, true);
        }
        let space = SpaceDescriptor::discrete(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 20_000;
        let mut hit1 = 0;
        for _ in 0..n {
            let picked = select_goal(Strategy::Intermediate, &stats, &params(), &space, 0.1, &mut rng);
            if picked.goal.point == Observation::Discrete(1) {
                hit1 += 1;
            }
        }
        // expected: 0.9 * 0.5 + 0.1 * 0.5 = 0.5
        let frac = hit1 as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "untargeted fraction {frac}");
    }

    #[test]
    fn binned_layout_round_trips_cells() {
        let layout = GridLayout::Binned {
            low: vec![-1.8, -0.07],
            high: vec![0.6, 0.07],
            bins: vec![100, 100],
        };
        assert_eq!(layout.n_cells(), 10_000);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for cell in [0, 57, 9_999, 4_242] {
            let point = layout.sample_within(cell, &mut rng);
            assert_eq!(layout.cell_of(&point), cell);
        }
    }

    #[test]
    fn boundary_observation_lands_in_the_last_bin() {
        let layout = GridLayout::Binned {
            low: vec![0.0],
            high: vec![1.0],
            bins: vec![10],
        };
        assert_eq!(layout.cell_of(&Observation::Continuous(vec![1.0])), 9);
        assert_eq!(layout.cell_of(&Observation::Continuous(vec![0.0])), 0);
    }

    proptest! {
        #[test]
        fn weights_are_positive_and_monotone(p1 in 0.0f64..1.0, p2 in 0.0f64..1.0) {
            let p = params();
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            prop_assert!(novelty_weight(lo, &p) > 0.0);
            prop_assert!(novelty_weight(lo, &p) >= novelty_weight(hi, &p));

            let d1 = (p1 - p.target_success).abs();
            let d2 = (p2 - p.target_success).abs();
            let (wlo, whi) = (intermediate_weight(p1, &p), intermediate_weight(p2, &p));
            prop_assert!(wlo > 0.0 && whi > 0.0);
            if d1 < d2 {
                prop_assert!(wlo >= whi);
            }
        }
    }
}
