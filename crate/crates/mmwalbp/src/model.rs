//! Domain types for tasks, work zones and mixed-model data, plus the
//! mean-model reduction that turns a mixed-model problem into a single
//! virtual-model instance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::TIME_EPS;

/// Work zone label. The workstation is a fixed 3x3 grid of zones around
/// the product; zone 4 is the product interior and is never assigned to
/// a task.
pub type Zone = u8;

/// The product-interior zone. Present in the displacement matrix, never
/// carried by a task.
pub const INTERIOR_ZONE: Zone = 4;

/// The eight zones a task may be assigned to.
pub const TASK_ZONES: [Zone; 8] = [0, 1, 2, 3, 5, 6, 7, 8];

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("task {id}: zone {zone} is not a valid work zone")]
    InvalidZone { id: usize, zone: Zone },
    #[error("task {id}: negative duration {time}")]
    NegativeTime { id: usize, time: f64 },
    #[error("task {id}: duration {time} exceeds cycle time {cycle_time}")]
    TimeExceedsCycle { id: usize, time: f64, cycle_time: f64 },
    #[error("task ids must be contiguous 1..=n, found {found} at index {index}")]
    NonContiguousIds { index: usize, found: usize },
    #[error("cycle time must be positive, got {0}")]
    NonPositiveCycleTime(f64),
    #[error("max workplaces per workstation must be in 1..=8, got {0}")]
    InvalidMaxWorkplaces(usize),
    #[error("precedence edge ({0}, {1}) references an unknown task")]
    EdgeOutOfRange(usize, usize),
    #[error("precedence graph contains a cycle")]
    CyclicPrecedence,
    #[error("joint precedence graph contains a cycle")]
    JointPrecedenceCycle,
    #[error("production plan has zero total demand")]
    EmptyPlan,
    #[error("production plan entry for model {0} must be at least 1")]
    ZeroPlanEntry(usize),
    #[error("model matrix row {0} has wrong width (expected {1} models)")]
    BadMatrixWidth(usize, usize),
    #[error("displacement matrix: {0}")]
    BadDisplacement(String),
}

/// A single assembly task of the (virtual) single-model instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    /// 1-based task index.
    pub id: usize,
    /// Duration in abstract time units (after mean-model reduction).
    pub base_time: f64,
    /// Work zone the task natively belongs to.
    pub zone: Zone,
}

/// Displacement times between work zones: `cost[from][to]` is the time
/// an operator needs to move from one zone to another within the same
/// workstation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementMatrix {
    cost: [[f64; 9]; 9],
}

impl DisplacementMatrix {
    /// Validates symmetry, zero diagonal, a zero interior row/column and
    /// non-negativity.
    pub fn new(cost: [[f64; 9]; 9]) -> Result<Self, ModelError> {
        for (i, row) in cost.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c < 0.0 {
                    return Err(ModelError::BadDisplacement(format!(
                        "negative entry at ({i}, {j})"
                    )));
                }
                if (c - cost[j][i]).abs() > TIME_EPS {
                    return Err(ModelError::BadDisplacement(format!(
                        "asymmetric at ({i}, {j})"
                    )));
                }
            }
            if cost[i][i].abs() > TIME_EPS {
                return Err(ModelError::BadDisplacement(format!(
                    "nonzero diagonal at {i}"
                )));
            }
            let interior = INTERIOR_ZONE as usize;
            if cost[i][interior].abs() > TIME_EPS || cost[interior][i].abs() > TIME_EPS {
                return Err(ModelError::BadDisplacement(format!(
                    "interior zone row/column must be zero (row {i})"
                )));
            }
        }
        Ok(Self { cost })
    }

    /// The displacement matrix used by the benchmark instances: adjacent
    /// zones on the same side cost 27, crossing to the far corner 54,
    /// the nearest opposite-side zone 13.5, and so on.
    pub fn standard() -> Self {
        let m = [
            [0.0, 54.0, 27.0, 27.0, 0.0, 13.5, 13.5, 40.5, 40.5],
            [54.0, 0.0, 27.0, 27.0, 0.0, 40.5, 40.5, 13.5, 13.5],
            [27.0, 27.0, 0.0, 54.0, 0.0, 13.5, 40.5, 13.5, 40.5],
            [27.0, 27.0, 54.0, 0.0, 0.0, 40.5, 13.5, 40.5, 13.5],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [13.5, 40.5, 13.5, 40.5, 0.0, 0.0, 27.0, 27.0, 54.0],
            [13.5, 40.5, 40.5, 13.5, 0.0, 27.0, 0.0, 54.0, 27.0],
            [40.5, 13.5, 13.5, 40.5, 0.0, 27.0, 54.0, 0.0, 27.0],
            [40.5, 13.5, 40.5, 13.5, 0.0, 54.0, 27.0, 27.0, 0.0],
        ];
        Self::new(m).expect("standard matrix is valid")
    }

    /// Time cost for an operator to move from zone `from` to zone `to`.
    pub fn time(&self, from: Zone, to: Zone) -> f64 {
        self.cost[from as usize][to as usize]
    }

    pub fn raw(&self) -> &[[f64; 9]; 9] {
        &self.cost
    }
}

/// Mixed-model problem data: per-model task durations, task-model
/// incidence, demanded quantities and one precedence edge list per model.
#[derive(Debug, Clone)]
pub struct MixedModelSpec {
    model_times: Vec<Vec<f64>>,
    incidence: Vec<Vec<bool>>,
    plan: Vec<u64>,
    per_model_edges: Vec<Vec<(usize, usize)>>,
}

impl MixedModelSpec {
    pub fn new(
        model_times: Vec<Vec<f64>>,
        incidence: Vec<Vec<bool>>,
        plan: Vec<u64>,
        per_model_edges: Vec<Vec<(usize, usize)>>,
    ) -> Result<Self, ModelError> {
        let n = model_times.len();
        let models = plan.len();
        for (m, &q) in plan.iter().enumerate() {
            if q == 0 {
                return Err(ModelError::ZeroPlanEntry(m));
            }
        }
        if incidence.len() != n || per_model_edges.len() != models {
            return Err(ModelError::BadMatrixWidth(0, models));
        }
        for (j, row) in model_times.iter().enumerate() {
            if row.len() != models || incidence[j].len() != models {
                return Err(ModelError::BadMatrixWidth(j + 1, models));
            }
            for &t in row {
                if t < 0.0 {
                    return Err(ModelError::NegativeTime { id: j + 1, time: t });
                }
            }
        }
        for edges in &per_model_edges {
            for &(a, b) in edges {
                if a == 0 || b == 0 || a > n || b > n {
                    return Err(ModelError::EdgeOutOfRange(a, b));
                }
            }
        }
        Ok(Self {
            model_times,
            incidence,
            plan,
            per_model_edges,
        })
    }

    pub fn task_count(&self) -> usize {
        self.model_times.len()
    }

    pub fn model_count(&self) -> usize {
        self.plan.len()
    }

    pub fn plan(&self) -> &[u64] {
        &self.plan
    }

    pub fn incidence(&self) -> &[Vec<bool>] {
        &self.incidence
    }

    pub fn model_times(&self) -> &[Vec<f64>] {
        &self.model_times
    }

    pub fn per_model_edges(&self) -> &[Vec<(usize, usize)>] {
        &self.per_model_edges
    }
}

/// Demand-weighted mean-model reduction: virtual task times
/// `mean[j] = sum_m share_m * time[j][m] * incidence[j][m]` with
/// `share_m = plan_m / total demand`, plus the joint precedence graph
/// (deduplicated union of the per-model edge sets).
pub fn build_mean_model(
    spec: &MixedModelSpec,
) -> Result<(Vec<f64>, Vec<(usize, usize)>), ModelError> {
    let total: u64 = spec.plan.iter().sum();
    if total == 0 {
        return Err(ModelError::EmptyPlan);
    }
    let total = total as f64;
    let mean_times = (0..spec.task_count())
        .map(|j| {
            spec.plan
                .iter()
                .enumerate()
                .filter(|&(m, _)| spec.incidence[j][m])
                .map(|(m, &q)| q as f64 / total * spec.model_times[j][m])
                .sum()
        })
        .collect();

    let mut joint: Vec<(usize, usize)> = Vec::new();
    for edges in &spec.per_model_edges {
        for &e in edges {
            if !joint.contains(&e) {
                joint.push(e);
            }
        }
    }
    joint.sort_unstable();
    if is_cyclic(spec.task_count(), &joint) {
        return Err(ModelError::JointPrecedenceCycle);
    }
    Ok((mean_times, joint))
}

/// Kahn-style cycle check over 1-based edges.
fn is_cyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n + 1];
    let mut succ = vec![Vec::new(); n + 1];
    for &(a, b) in edges {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut ready: Vec<usize> = (1..=n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(w);
            }
        }
    }
    seen < n
}

/// A single-model MMWALBP-1 instance: tasks with zone labels, a direct
/// precedence graph, the cycle time, the displacement matrix and the
/// per-workstation workplace cap. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Instance {
    tasks: Vec<Task>,
    edges: Vec<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    cycle_time: f64,
    displacement: DisplacementMatrix,
    max_workplaces: usize,
}

impl Instance {
    pub fn new(
        tasks: Vec<Task>,
        mut edges: Vec<(usize, usize)>,
        cycle_time: f64,
        displacement: DisplacementMatrix,
        max_workplaces: usize,
    ) -> Result<Self, ModelError> {
        if !(cycle_time > 0.0) {
            return Err(ModelError::NonPositiveCycleTime(cycle_time));
        }
        if !(1..=8).contains(&max_workplaces) {
            return Err(ModelError::InvalidMaxWorkplaces(max_workplaces));
        }
        let n = tasks.len();
        for (i, t) in tasks.iter().enumerate() {
            if t.id != i + 1 {
                return Err(ModelError::NonContiguousIds {
                    index: i,
                    found: t.id,
                });
            }
            if !TASK_ZONES.contains(&t.zone) {
                return Err(ModelError::InvalidZone {
                    id: t.id,
                    zone: t.zone,
                });
            }
            if t.base_time < 0.0 {
                return Err(ModelError::NegativeTime {
                    id: t.id,
                    time: t.base_time,
                });
            }
            if t.base_time > cycle_time + TIME_EPS {
                return Err(ModelError::TimeExceedsCycle {
                    id: t.id,
                    time: t.base_time,
                    cycle_time,
                });
            }
        }
        edges.sort_unstable();
        edges.dedup();
        for &(a, b) in &edges {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(ModelError::EdgeOutOfRange(a, b));
            }
        }
        if is_cyclic(n, &edges) {
            return Err(ModelError::CyclicPrecedence);
        }
        let mut preds = vec![Vec::new(); n + 1];
        for &(a, b) in &edges {
            preds[b].push(a);
        }
        Ok(Self {
            tasks,
            edges,
            preds,
            cycle_time,
            displacement,
            max_workplaces,
        })
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// Task by 1-based id.
    pub fn task(&self, id: usize) -> &Task {
        &self.tasks[id - 1]
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Direct predecessors of a task (1-based id).
    pub fn direct_preds(&self, id: usize) -> &[usize] {
        &self.preds[id]
    }

    pub fn cycle_time(&self) -> f64 {
        self.cycle_time
    }

    pub fn displacement(&self) -> &DisplacementMatrix {
        &self.displacement
    }

    pub fn max_workplaces(&self) -> usize {
        self.max_workplaces
    }

    /// Sum of all base times.
    pub fn total_base_time(&self) -> f64 {
        self.tasks.iter().map(|t| t.base_time).sum()
    }

    /// `ceil(total base time / cycle time)`: no solution can open fewer
    /// workplaces than this.
    pub fn workplace_lower_bound(&self) -> usize {
        let lb = (self.total_base_time() / self.cycle_time - TIME_EPS).ceil();
        (lb.max(0.0)) as usize
    }
}

/// Displacement time from one zone to another.
pub fn displacement_time(matrix: &DisplacementMatrix, from: Zone, to: Zone) -> f64 {
    matrix.time(from, to)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn task(id: usize, time: f64, zone: Zone) -> Task {
        Task {
            id,
            base_time: time,
            zone,
        }
    }

    #[test]
    fn standard_matrix_entries() {
        let m = DisplacementMatrix::standard();
        assert_eq!(m.time(0, 0), 0.0);
        assert_eq!(m.time(0, 1), 54.0);
        assert_eq!(m.time(5, 8), 54.0);
        assert_relative_eq!(m.time(0, 5), 13.5);
    }

    #[test]
    fn standard_matrix_symmetry_and_interior() {
        let m = DisplacementMatrix::standard();
        for a in 0..9u8 {
            for b in 0..9u8 {
                assert_eq!(m.time(a, b), m.time(b, a));
                assert!(m.time(a, b) >= 0.0);
            }
            assert_eq!(m.time(a, a), 0.0);
            assert_eq!(m.time(a, INTERIOR_ZONE), 0.0);
            assert_eq!(m.time(INTERIOR_ZONE, a), 0.0);
        }
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let mut raw = *DisplacementMatrix::standard().raw();
        raw[0][1] = 10.0;
        assert!(DisplacementMatrix::new(raw).is_err());
    }

    #[test]
    fn single_model_mean_is_identity() {
        let spec = MixedModelSpec::new(
            vec![vec![5.0]],
            vec![vec![true]],
            vec![200],
            vec![vec![]],
        )
        .unwrap();
        let (mean, edges) = build_mean_model(&spec).unwrap();
        assert_eq!(mean, vec![5.0]);
        assert!(edges.is_empty());
    }

    #[test]
    fn two_model_halving() {
        // task runs on model 1 only, equal demand: mean time is half
        let spec = MixedModelSpec::new(
            vec![vec![10.0, 10.0]],
            vec![vec![true, false]],
            vec![1, 1],
            vec![vec![], vec![]],
        )
        .unwrap();
        let (mean, _) = build_mean_model(&spec).unwrap();
        assert_relative_eq!(mean[0], 5.0);
    }

    #[test]
    fn mean_model_plan_scale_invariance() {
        let times = vec![vec![4.0, 8.0, 2.0], vec![6.0, 0.0, 3.0]];
        let inc = vec![vec![true, true, false], vec![true, false, true]];
        let mk = |plan: Vec<u64>| {
            let spec = MixedModelSpec::new(
                times.clone(),
                inc.clone(),
                plan,
                vec![vec![], vec![], vec![]],
            )
            .unwrap();
            build_mean_model(&spec).unwrap().0
        };
        let a = mk(vec![2, 3, 5]);
        let b = mk(vec![20, 30, 50]);
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn mean_model_bounds() {
        let spec = MixedModelSpec::new(
            vec![vec![3.0, 9.0]],
            vec![vec![true, true]],
            vec![7, 3],
            vec![vec![], vec![]],
        )
        .unwrap();
        let (mean, _) = build_mean_model(&spec).unwrap();
        assert!(mean[0] >= 3.0 && mean[0] <= 9.0);
    }

    #[test]
    fn joint_edges_union_without_duplicates() {
        let spec = MixedModelSpec::new(
            vec![vec![1.0, 1.0]; 3],
            vec![vec![true, true]; 3],
            vec![1, 1],
            vec![vec![(1, 2), (2, 3)], vec![(1, 2)]],
        )
        .unwrap();
        let (_, joint) = build_mean_model(&spec).unwrap();
        assert_eq!(joint, vec![(1, 2), (2, 3)]);
    }

    #[test]
    fn joint_cycle_detected() {
        let spec = MixedModelSpec::new(
            vec![vec![1.0, 1.0]; 2],
            vec![vec![true, true]; 2],
            vec![1, 1],
            vec![vec![(1, 2)], vec![(2, 1)]],
        )
        .unwrap();
        assert!(matches!(
            build_mean_model(&spec),
            Err(ModelError::JointPrecedenceCycle)
        ));
    }

    #[test]
    fn instance_rejects_oversized_task() {
        let err = Instance::new(
            vec![task(1, 20.0, 0)],
            vec![],
            10.0,
            DisplacementMatrix::standard(),
            3,
        );
        assert!(matches!(err, Err(ModelError::TimeExceedsCycle { .. })));
    }

    #[test]
    fn instance_rejects_cycle_and_zone_4() {
        let tasks = vec![task(1, 1.0, 0), task(2, 1.0, 1)];
        let err = Instance::new(
            tasks.clone(),
            vec![(1, 2), (2, 1)],
            10.0,
            DisplacementMatrix::standard(),
            3,
        );
        assert!(matches!(err, Err(ModelError::CyclicPrecedence)));
        let err = Instance::new(
            vec![task(1, 1.0, 4)],
            vec![],
            10.0,
            DisplacementMatrix::standard(),
            3,
        );
        assert!(matches!(err, Err(ModelError::InvalidZone { .. })));
    }

    #[test]
    fn lower_bound_rounds_up() {
        let inst = Instance::new(
            vec![task(1, 6.0, 0), task(2, 5.0, 1)],
            vec![],
            10.0,
            DisplacementMatrix::standard(),
            3,
        )
        .unwrap();
        assert_eq!(inst.workplace_lower_bound(), 2);
    }
}
