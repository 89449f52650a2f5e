//! Occupancy-grid mapping and sequential deployment planning.
//!
//! The environment is decomposed into a 35 by 35 grid. Deployments mark
//! cells as occupied (wall contacts) or free (swept area and the body
//! corridor); a belief grid combines the cumulative evidence with a prior
//! of one third. The planner samples candidate environments from the
//! belief, simulates the whole action space against each, and sends the
//! action with the best combined score into the real environment.

use crate::environment::Environment;
use crate::geometry::{Point2, PointLocation, Segment};
use crate::simulator::{
    simulate_on_graph, DeploymentAction, DeploymentResult, SimParams, Termination, TurnSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Square grid resolution used for every environment.
pub const GRID_DIM: usize = 35;

/// Occupancy prior: mostly empty space.
pub const PRIOR: f64 = 1.0 / 3.0;

const CELLS: usize = GRID_DIM * GRID_DIM;

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("score undefined: the prior matches the rubric exactly")]
    UndefinedScore,
}

/// Real-valued grid over the bounds square, row-major from the minimum
/// corner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub cells: Vec<f64>,
}

impl Grid {
    pub fn fill(value: f64) -> Self {
        Self {
            cells: vec![value; CELLS],
        }
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.cells[row * GRID_DIM + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.cells[row * GRID_DIM + col] = v;
    }

    pub fn mean(&self) -> f64 {
        self.cells.iter().sum::<f64>() / CELLS as f64
    }
}

/// Binary grid (hit, miss, rubric layers).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoolGrid {
    pub cells: Vec<bool>,
}

impl BoolGrid {
    pub fn empty() -> Self {
        Self {
            cells: vec![false; CELLS],
        }
    }

    pub fn at(&self, row: usize, col: usize) -> bool {
        self.cells[row * GRID_DIM + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: bool) {
        self.cells[row * GRID_DIM + col] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Element-wise OR into self.
    pub fn or_assign(&mut self, other: &BoolGrid) {
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a = *a || *b;
        }
    }

    pub fn as_grid(&self) -> Grid {
        Grid {
            cells: self.cells.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// Placement of the grid over an environment's bounds square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub origin: Point2,
    pub cell_size: f64,
}

impl GridGeometry {
    pub fn for_env(env: &Environment) -> Self {
        let b = env.bounds();
        Self {
            origin: b.min,
            cell_size: b.size / GRID_DIM as f64,
        }
    }

    /// Center of a cell.
    pub fn center(&self, row: usize, col: usize) -> Point2 {
        self.origin
            + Point2::new(
                (col as f64 + 0.5) * self.cell_size,
                (row as f64 + 0.5) * self.cell_size,
            )
    }

    /// The four corner points of a cell.
    pub fn corners(&self, row: usize, col: usize) -> [Point2; 4] {
        let base = self.origin + Point2::new(col as f64 * self.cell_size, row as f64 * self.cell_size);
        [
            base,
            base + Point2::new(self.cell_size, 0.0),
            base + Point2::new(self.cell_size, self.cell_size),
            base + Point2::new(0.0, self.cell_size),
        ]
    }
}

/// Which half of the sensed information a campaign may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfoMode {
    Full,
    /// Swept area and body corridor only: no wall contacts.
    AreaOnly,
    /// Wall contacts only: no free-space evidence.
    WallOnly,
}

/// Cumulative occupancy belief.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Belief {
    pub belief: Grid,
    pub hit: BoolGrid,
    pub miss: BoolGrid,
    pub prior: f64,
}

impl Belief {
    pub fn new() -> Self {
        Self {
            belief: Grid::fill(PRIOR),
            hit: BoolGrid::empty(),
            miss: BoolGrid::empty(),
            prior: PRIOR,
        }
    }
}

impl Default for Belief {
    fn default() -> Self {
        Self::new()
    }
}

/// Mark the grid cells a deployment observed: hit cells overlap a
/// contacted wall (with robot-radius thickness), miss cells overlap the
/// swept area or the body corridor. Coverage is decided by 4x4
/// supersampling per cell.
///
/// Recorded wall segments run along the inflated obstacle boundary where
/// the robot centerline slid; the physical wall sits one robot radius
/// toward the obstacle (the right-hand side of the segment), so the hit
/// brush is applied there.
pub fn rasterize(
    result: &DeploymentResult,
    geom: &GridGeometry,
    radius: f64,
    mode: InfoMode,
) -> (BoolGrid, BoolGrid) {
    let mut hit = BoolGrid::empty();
    let mut miss = BoolGrid::empty();
    let use_walls = mode != InfoMode::AreaOnly;
    let use_area = mode != InfoMode::WallOnly;
    let shape_pts: Vec<Point2> = result.shape.points().collect();
    let corridor: Vec<Segment> = shape_pts
        .windows(2)
        .filter(|w| w[0].dist(w[1]) > 1e-12)
        .map(|w| Segment::new(w[0], w[1]))
        .collect();
    let walls: Vec<Segment> = result
        .walls_hit
        .iter()
        .map(|w| {
            let inward = -(w.b - w.a).normalized().perp();
            Segment::new(w.a + inward * radius, w.b + inward * radius)
        })
        .collect();
    let thickness = radius.max(1e-4);

    for row in 0..GRID_DIM {
        for col in 0..GRID_DIM {
            let base =
                geom.origin + Point2::new(col as f64 * geom.cell_size, row as f64 * geom.cell_size);
            let mut cell_hit = false;
            let mut cell_miss = false;
            'samples: for i in 0..4 {
                for j in 0..4 {
                    let p = base
                        + Point2::new(
                            (i as f64 + 0.5) / 4.0 * geom.cell_size,
                            (j as f64 + 0.5) / 4.0 * geom.cell_size,
                        );
                    if use_walls && !cell_hit {
                        cell_hit = walls.iter().any(|w| w.distance_to(p) <= thickness);
                    }
                    if use_area && !cell_miss {
                        cell_miss = corridor.iter().any(|s| s.distance_to(p) <= thickness)
                            || result
                                .swept_area
                                .iter()
                                .any(|poly| poly.locate(p) != PointLocation::Outside);
                    }
                    if (cell_hit || !use_walls) && (cell_miss || !use_area) {
                        break 'samples;
                    }
                }
            }
            hit.set(row, col, cell_hit);
            miss.set(row, col, cell_miss);
        }
    }
    (hit, miss)
}

/// Drop the halves of a result the information mode forbids. The body
/// corridor is derived from the shape at rasterization time, so campaigns
/// pass the mode to [`rasterize`] as well.
pub fn restrict_information(result: &DeploymentResult, mode: InfoMode) -> DeploymentResult {
    let mut out = result.clone();
    match mode {
        InfoMode::Full => {}
        InfoMode::AreaOnly => out.walls_hit.clear(),
        InfoMode::WallOnly => out.swept_area.clear(),
    }
    out
}

/// Fold a new observation into the belief: cumulative OR on the binary
/// grids, then the per-cell combination of prior and evidence.
pub fn update_belief(belief: &mut Belief, hit: &BoolGrid, miss: &BoolGrid) {
    belief.hit.or_assign(hit);
    belief.miss.or_assign(miss);
    for i in 0..CELLS {
        let h = belief.hit.cells[i];
        let m = belief.miss.cells[i];
        belief.belief.cells[i] = match (h, m) {
            (false, false) => belief.prior,
            (true, false) => 1.0,
            (false, true) => 0.0,
            (true, true) => 0.5,
        };
    }
}

/// Unweighted similarity score of a grid against the rubric, 0 to 100.
pub fn unweighted_score(x: &Grid, rubric: &BoolGrid) -> f64 {
    let mut acc = 0.0;
    for i in 0..CELLS {
        let r = if rubric.cells[i] { 1.0 } else { 0.0 };
        acc += 1.0 - (x.cells[i] - r).abs();
    }
    100.0 * acc / CELLS as f64
}

/// Weighted score: 0 for the prior, 100 for the rubric.
pub fn score(x: &Grid, rubric: &BoolGrid, prior: f64) -> Result<f64, MappingError> {
    let prior_grid = Grid::fill(prior);
    let s_p = unweighted_score(&prior_grid, rubric);
    if (100.0 - s_p).abs() < 1e-12 {
        return Err(MappingError::UndefinedScore);
    }
    let s_x = unweighted_score(x, rubric);
    Ok(100.0 * (s_x - s_p) / (100.0 - s_p))
}

/// Ground-truth occupancy of an environment: a cell is occupied when any
/// supersample point touches an obstacle.
pub fn rubric_of(env: &Environment, geom: &GridGeometry) -> BoolGrid {
    let mut rubric = BoolGrid::empty();
    for row in 0..GRID_DIM {
        for col in 0..GRID_DIM {
            let base =
                geom.origin + Point2::new(col as f64 * geom.cell_size, row as f64 * geom.cell_size);
            let mut occ = false;
            'outer: for i in 0..4 {
                for j in 0..4 {
                    let p = base
                        + Point2::new(
                            (i as f64 + 0.5) / 4.0 * geom.cell_size,
                            (j as f64 + 0.5) / 4.0 * geom.cell_size,
                        );
                    if env
                        .obstacles()
                        .iter()
                        .any(|o| o.locate(p) != PointLocation::Outside)
                    {
                        occ = true;
                        break 'outer;
                    }
                }
            }
            rubric.set(row, col, occ);
        }
    }
    rubric
}

/// Draw a candidate environment from the belief: Bernoulli occupancy per
/// cell, 8-connected grouping, the largest 6 to 8 groups kept (always
/// including every hit cell), and a convex hull per group.
pub fn sample_environment<R: Rng>(
    belief: &Belief,
    proto: &Environment,
    rng: &mut R,
) -> Environment {
    let geom = GridGeometry::for_env(proto);
    let keep = rng.gen_range(6..=8usize);
    let mut occupied = vec![false; CELLS];
    for i in 0..CELLS {
        occupied[i] = rng.gen_range(0.0..1.0) < belief.belief.cells[i];
    }
    // 8-connected component labeling.
    let mut label = vec![usize::MAX; CELLS];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..CELLS {
        if !occupied[start] || label[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut queue = vec![start];
        let mut members = Vec::new();
        label[start] = id;
        while let Some(i) = queue.pop() {
            members.push(i);
            let (r, c) = (i / GRID_DIM, i % GRID_DIM);
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if nr < 0 || nc < 0 || nr >= GRID_DIM as i64 || nc >= GRID_DIM as i64 {
                        continue;
                    }
                    let ni = nr as usize * GRID_DIM + nc as usize;
                    if occupied[ni] && label[ni] == usize::MAX {
                        label[ni] = id;
                        queue.push(ni);
                    }
                }
            }
        }
        groups.push(members);
    }
    // Keep the largest groups; order ties by first cell index so the
    // draw is deterministic.
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&g| (std::cmp::Reverse(groups[g].len()), groups[g][0]));
    let kept: Vec<usize> = order.into_iter().take(keep).collect();

    // Hit cells must always be contained in an obstacle: reassign any
    // dropped hit cell to the nearest kept group.
    let mut final_groups: Vec<Vec<usize>> = kept.iter().map(|&g| groups[g].clone()).collect();
    for i in 0..CELLS {
        if !belief.hit.cells[i] {
            continue;
        }
        let in_kept = label[i] != usize::MAX && kept.contains(&label[i]);
        if in_kept {
            continue;
        }
        let (r, c) = (i / GRID_DIM, i % GRID_DIM);
        let p = geom.center(r, c);
        if final_groups.is_empty() {
            final_groups.push(vec![i]);
            continue;
        }
        let nearest = final_groups
            .iter_mut()
            .min_by(|a, b| {
                let da = group_distance(a, &geom, p);
                let db = group_distance(b, &geom, p);
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        nearest.push(i);
    }

    let mut obstacles = Vec::new();
    for members in &final_groups {
        let mut pts = Vec::with_capacity(members.len() * 4);
        for &i in members {
            let (r, c) = (i / GRID_DIM, i % GRID_DIM);
            pts.extend_from_slice(&geom.corners(r, c));
        }
        if let Ok(hull) = crate::geometry::convex_hull(&pts) {
            obstacles.push(hull);
        }
    }
    Environment::new_sampled(
        obstacles,
        proto.bounds(),
        proto.launch_points().to_vec(),
        proto.robot_radius(),
    )
}

fn group_distance(members: &[usize], geom: &GridGeometry, p: Point2) -> f64 {
    members
        .iter()
        .map(|&i| geom.center(i / GRID_DIM, i % GRID_DIM).dist(p))
        .fold(f64::INFINITY, f64::min)
}

/// Which action space to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionSpaceKind {
    Straight,
    Turning,
}

/// Discretized action space: 50 launch angles per position for the
/// straight space; 15 angles crossed with three turn locations and six
/// nonzero turn angles (plus the straight action) for the turning space.
pub fn generate_action_space(
    kind: ActionSpaceKind,
    env: &Environment,
    max_length: f64,
) -> Vec<DeploymentAction> {
    let mut actions = Vec::new();
    let turn_fractions = [0.2, 0.4, 0.6];
    let turn_angles_deg: [f64; 6] = [-60.0, -40.0, -20.0, 20.0, 40.0, 60.0];
    for lp in env.launch_points() {
        let inward = env.inward_angle(lp);
        match kind {
            ActionSpaceKind::Straight => {
                for i in 0..50 {
                    let angle = inward - std::f64::consts::FRAC_PI_2
                        + std::f64::consts::PI * (i as f64 + 0.5) / 50.0;
                    actions.push(DeploymentAction::straight(&lp.id, angle, max_length));
                }
            }
            ActionSpaceKind::Turning => {
                for i in 0..15 {
                    let angle = inward - std::f64::consts::FRAC_PI_2
                        + std::f64::consts::PI * (i as f64 + 0.5) / 15.0;
                    actions.push(DeploymentAction::straight(&lp.id, angle, max_length));
                    for &frac in &turn_fractions {
                        for &tdeg in &turn_angles_deg {
                            actions.push(DeploymentAction {
                                launch_id: lp.id.clone(),
                                launch_angle: angle,
                                turn: Some(TurnSpec {
                                    fraction: frac,
                                    angle: tdeg.to_radians(),
                                }),
                                max_length,
                            });
                        }
                    }
                }
            }
        }
    }
    actions
}

/// Planner configuration; all randomness flows from `seed`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub seed: u64,
    pub budget: usize,
    pub mc_envs: usize,
    pub info_mode: InfoMode,
    pub sim: SimParams,
}

impl PlannerConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            budget: 20,
            mc_envs: 5,
            info_mode: InfoMode::Full,
            sim: SimParams::default(),
        }
    }
}

/// Deterministic substream: one generator per (namespace, index) pair.
fn substream(seed: u64, namespace: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((namespace << 32) | index);
    rng
}

const NS_MC_ENV: u64 = 1;
const NS_RANDOM: u64 = 2;

/// Mutable planner state across a campaign.
#[derive(Clone, Debug)]
pub struct PlannerState {
    pub belief: Belief,
    pub history: Vec<LoopRecord>,
    pub cfg: PlannerConfig,
}

impl PlannerState {
    pub fn new(cfg: PlannerConfig) -> Self {
        Self {
            belief: Belief::new(),
            history: Vec::new(),
            cfg,
        }
    }
}

/// One committed deployment in a campaign.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopRecord {
    pub action_index: usize,
    pub score: f64,
    pub termination: Termination,
}

/// Pick the next action: draw Monte Carlo environments from the belief,
/// simulate every action in each, score the hypothetically updated belief
/// against each sampled environment's own rubric, and return the action
/// maximizing the summed score. Ties break toward the lowest index.
pub fn plan_next(state: &PlannerState, proto: &Environment, space: &[DeploymentAction]) -> usize {
    let cfg = &state.cfg;
    let loop_idx = state.history.len() as u64;
    let geom = GridGeometry::for_env(proto);

    struct McEnv {
        env: Environment,
        graph: crate::visibility::VisibilityGraph,
        rubric: BoolGrid,
        baseline: f64,
    }
    let mc: Vec<McEnv> = (0..cfg.mc_envs)
        .map(|k| {
            let mut rng = substream(cfg.seed, NS_MC_ENV, loop_idx * 64 + k as u64);
            let env = sample_environment(&state.belief, proto, &mut rng);
            let graph = env.visibility_graph().unwrap_or_else(|_| {
                crate::visibility::VisibilityGraph::build(&[], &[]).unwrap()
            });
            let rubric = rubric_of(&env, &geom);
            let baseline =
                score(&state.belief.belief, &rubric, state.belief.prior).unwrap_or(0.0);
            McEnv {
                env,
                graph,
                rubric,
                baseline,
            }
        })
        .collect();

    let scores: Vec<f64> = space
        .par_iter()
        .map(|action| {
            let mut total = 0.0;
            for m in &mc {
                let outcome = simulate_on_graph(&m.env, &m.graph, action, &cfg.sim);
                let Ok((result, _)) = outcome else {
                    total += m.baseline;
                    continue;
                };
                if result.termination == Termination::LoopLimit {
                    // Flagged nontermination: excluded from planning.
                    total += m.baseline;
                    continue;
                }
                let (hit, miss) = rasterize(&result, &geom, proto.robot_radius(), cfg.info_mode);
                let mut hypothetical = state.belief.clone();
                update_belief(&mut hypothetical, &hit, &miss);
                total += score(&hypothetical.belief, &m.rubric, hypothetical.prior).unwrap_or(0.0);
            }
            total
        })
        .collect();

    let mut best = 0usize;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// How a campaign chooses its deployments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Policy {
    MonteCarlo,
    Ideal,
    Random,
}

/// Aggregate statistics for the random policy (100 repetitions).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomStats {
    pub repetitions: usize,
    pub mean_final: f64,
    pub std_final: f64,
    pub per_loop_mean: Vec<f64>,
}

/// Outcome of one campaign.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignResult {
    pub policy: Policy,
    pub loops: Vec<LoopRecord>,
    pub final_score: f64,
    pub final_belief: Belief,
    pub random_stats: Option<RandomStats>,
}

/// Run a mapping campaign against the true environment.
///
/// Monte Carlo plans each deployment from the belief; Ideal greedily
/// selects the best next action using full knowledge of the true
/// environment; Random reports the mean and standard deviation over 100
/// uniformly sampled deployment sets (without replacement).
pub fn run_campaign(
    true_env: &Environment,
    space: &[DeploymentAction],
    cfg: &PlannerConfig,
    policy: Policy,
) -> CampaignResult {
    let geom = GridGeometry::for_env(true_env);
    let rubric = rubric_of(true_env, &geom);
    let graph = true_env
        .visibility_graph()
        .expect("true environment graph");
    // Every policy replays deployments from the same cached results.
    let outcomes: Vec<DeploymentResult> = space
        .par_iter()
        .map(|a| {
            simulate_on_graph(true_env, &graph, a, &cfg.sim)
                .map(|(r, _)| r)
                .expect("valid action")
        })
        .collect();
    let commit = |belief: &mut Belief, idx: usize| -> LoopRecord {
        let result = &outcomes[idx];
        let (hit, miss) = rasterize(result, &geom, true_env.robot_radius(), cfg.info_mode);
        update_belief(belief, &hit, &miss);
        let s = score(&belief.belief, &rubric, belief.prior).unwrap_or(0.0);
        LoopRecord {
            action_index: idx,
            score: s,
            termination: result.termination,
        }
    };

    match policy {
        Policy::MonteCarlo => {
            let mut state = PlannerState::new(*cfg);
            for _ in 0..cfg.budget {
                let idx = plan_next(&state, true_env, space);
                let rec = commit(&mut state.belief, idx);
                state.history.push(rec);
            }
            let final_score = state.history.last().map(|r| r.score).unwrap_or(0.0);
            CampaignResult {
                policy,
                loops: state.history,
                final_score,
                final_belief: state.belief,
                random_stats: None,
            }
        }
        Policy::Ideal => {
            let mut belief = Belief::new();
            let mut loops = Vec::new();
            for _ in 0..cfg.budget {
                // Best next action with full knowledge of the truth.
                let scores: Vec<f64> = outcomes
                    .par_iter()
                    .map(|result| {
                        if result.termination == Termination::LoopLimit {
                            return f64::MIN;
                        }
                        let (hit, miss) =
                            rasterize(result, &geom, true_env.robot_radius(), cfg.info_mode);
                        let mut hyp = belief.clone();
                        update_belief(&mut hyp, &hit, &miss);
                        score(&hyp.belief, &rubric, hyp.prior).unwrap_or(0.0)
                    })
                    .collect();
                let mut best = 0usize;
                for (i, s) in scores.iter().enumerate() {
                    if *s > scores[best] {
                        best = i;
                    }
                }
                loops.push(commit(&mut belief, best));
            }
            let final_score = loops.last().map(|r| r.score).unwrap_or(0.0);
            CampaignResult {
                policy,
                loops,
                final_score,
                final_belief: belief,
                random_stats: None,
            }
        }
        Policy::Random => {
            let reps = 100usize;
            let finals: Vec<(Vec<f64>, f64)> = (0..reps)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = substream(cfg.seed, NS_RANDOM, rep as u64);
                    let picks =
                        rand::seq::index::sample(&mut rng, space.len(), cfg.budget.min(space.len()))
                            .into_vec();
                    let mut belief = Belief::new();
                    let mut trace = Vec::with_capacity(picks.len());
                    for idx in picks {
                        let rec = commit(&mut belief, idx);
                        trace.push(rec.score);
                    }
                    let last = trace.last().copied().unwrap_or(0.0);
                    (trace, last)
                })
                .collect();
            let mean = finals.iter().map(|(_, f)| *f).sum::<f64>() / reps as f64;
            let var = finals
                .iter()
                .map(|(_, f)| (*f - mean) * (*f - mean))
                .sum::<f64>()
                / reps as f64;
            let mut per_loop_mean = vec![0.0; cfg.budget];
            for (trace, _) in &finals {
                for (i, s) in trace.iter().enumerate() {
                    per_loop_mean[i] += *s / reps as f64;
                }
            }
            // A representative single run (first repetition) fills the
            // loop records; the statistics carry the aggregate.
            let mut rng = substream(cfg.seed, NS_RANDOM, 0);
            let picks =
                rand::seq::index::sample(&mut rng, space.len(), cfg.budget.min(space.len()))
                    .into_vec();
            let mut belief = Belief::new();
            let loops: Vec<LoopRecord> = picks.into_iter().map(|i| commit(&mut belief, i)).collect();
            CampaignResult {
                policy,
                loops,
                final_score: mean,
                final_belief: belief,
                random_stats: Some(RandomStats {
                    repetitions: reps,
                    mean_final: mean,
                    std_final: var.sqrt(),
                    per_loop_mean,
                }),
            }
        }
    }
}
