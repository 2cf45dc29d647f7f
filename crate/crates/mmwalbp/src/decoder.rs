//! Maps a continuous position vector to a feasible balancing solution:
//! random-keys ranking, precedence repair, then a workplace-aware
//! assignment with displacement-time correction and idle-time
//! propagation between parallel workplaces of a workstation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, Zone};
use crate::objective::{self, FitnessValue};
use crate::precedence::{correct_sequence, CompletePrecedenceMatrix};
use crate::TIME_EPS;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("position vector contains NaN at dimension {0}")]
    InvalidPosition(usize),
    #[error("position vector has {got} dimensions, instance has {expected} tasks")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("task {task} fits no workplace of a fresh workstation (needs {needed} > cycle time {cycle_time})")]
    InfeasibleTask {
        task: usize,
        needed: f64,
        cycle_time: f64,
    },
}

/// A task placed on a workplace, with its station-local schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduledTask {
    pub task_id: usize,
    /// 0-based workstation index.
    pub workstation: usize,
    /// Home zone of the workplace the task landed on.
    pub workplace_zone: Zone,
    pub start: f64,
    pub end: f64,
    /// Base time plus any displacement increment.
    pub corrected_duration: f64,
    pub displacement_added: f64,
}

/// An open operator position within a workstation, anchored to a zone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workplace {
    pub zone: Zone,
    pub tasks: Vec<ScheduledTask>,
    /// Sum of corrected durations (idle excluded).
    pub workload: f64,
    /// Gap before the first task plus gaps between consecutive tasks.
    pub idle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workstation {
    pub workplaces: Vec<Workplace>,
}

/// A complete assignment of all tasks to workplaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancingSolution {
    pub stations: Vec<Workstation>,
    /// Total number of open (non-empty) workplaces.
    pub open_workplaces: usize,
    /// Sum of corrected durations over all workplaces.
    pub total_workload: f64,
    pub fitness: FitnessValue,
}

impl BalancingSolution {
    /// All open workplaces across stations, in station order.
    pub fn workplaces(&self) -> impl Iterator<Item = &Workplace> {
        self.stations.iter().flat_map(|s| s.workplaces.iter())
    }

    /// All scheduled tasks in schedule order.
    pub fn scheduled_tasks(&self) -> impl Iterator<Item = &ScheduledTask> {
        self.workplaces().flat_map(|wp| wp.tasks.iter())
    }
}

/// Rank transform: the smallest coordinate maps to task 1, the second
/// smallest to 2, and so on; ties break towards the lower dimension.
/// The resulting vector, read left to right, is the task sequence.
pub fn random_keys(position: &[f64], n: usize) -> Result<Vec<usize>, DecodeError> {
    debug_assert_eq!(position.len(), n);
    for (d, x) in position.iter().enumerate() {
        if x.is_nan() {
            return Err(DecodeError::InvalidPosition(d));
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| {
        position[a]
            .partial_cmp(&position[b])
            .expect("NaN excluded above")
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0usize; n];
    for (rank, &dim) in idx.iter().enumerate() {
        ranks[dim] = rank + 1;
    }
    Ok(ranks)
}

/// Decodes a position: random keys, precedence repair, assignment.
/// Deterministic for fixed inputs.
pub fn decode(
    position: &[f64],
    inst: &Instance,
    matrix: &CompletePrecedenceMatrix,
) -> Result<BalancingSolution, DecodeError> {
    let n = inst.task_count();
    if position.len() != n {
        return Err(DecodeError::DimensionMismatch {
            got: position.len(),
            expected: n,
        });
    }
    let seq = random_keys(position, n)?;
    let order = correct_sequence(&seq, matrix);
    let sol = assign(&order, inst)?;
    debug_assert!(sol.open_workplaces >= inst.workplace_lower_bound());
    Ok(sol)
}

/// Mutable build state of one workplace while its station is open.
struct OpenWorkplace {
    zone: Zone,
    end: f64,
    tasks: Vec<ScheduledTask>,
}

/// Assigns a precedence-feasible task order to workstations.
///
/// Stations are built left to right. Per station: take the longest
/// prefix of the remaining order whose summed base times fit
/// `max_workplaces * cycle_time`; rank the zones present in it by total
/// base time (descending, then ascending zone index); open one
/// workplace per top-ranked zone; then place the prefix tasks in order,
/// preferring the home-zone workplace and otherwise the open workplace
/// with the smallest displacement cost. A task's start time is pushed
/// behind its same-station predecessors; a task that fits no open
/// workplace closes the station and returns the unplaced tail to the
/// pool. Workplaces that stay empty are discarded.
pub fn assign(order: &[usize], inst: &Instance) -> Result<BalancingSolution, DecodeError> {
    let cycle = inst.cycle_time();
    let capacity = inst.max_workplaces() as f64 * cycle;
    let n = inst.task_count();

    let mut pool: std::collections::VecDeque<usize> = order.iter().copied().collect();
    let mut stations: Vec<Workstation> = Vec::new();
    // station-local end times, reset per station
    let mut end_in_station: Vec<f64> = vec![f64::NAN; n + 1];

    while !pool.is_empty() {
        let station_index = stations.len();

        // Step 1: longest prefix by base time.
        let mut prefix_len = 0;
        let mut acc = 0.0;
        for &t in pool.iter() {
            let b = inst.task(t).base_time;
            if acc + b > capacity + TIME_EPS {
                break;
            }
            acc += b;
            prefix_len += 1;
        }
        debug_assert!(prefix_len > 0, "base_time <= cycle_time is an instance invariant");

        // Step 2: rank zones present in the prefix by total base time.
        let mut zone_total = [0.0f64; 9];
        let mut zone_seen = [false; 9];
        for &t in pool.iter().take(prefix_len) {
            let task = inst.task(t);
            zone_total[task.zone as usize] += task.base_time;
            zone_seen[task.zone as usize] = true;
        }
        let mut zones: Vec<Zone> = (0..9u8).filter(|&z| zone_seen[z as usize]).collect();
        zones.sort_by(|&a, &b| {
            zone_total[b as usize]
                .partial_cmp(&zone_total[a as usize])
                .unwrap()
                .then(a.cmp(&b))
        });

        // Step 3: open workplaces at the highest-ranked zones.
        zones.truncate(inst.max_workplaces());
        let mut open: Vec<OpenWorkplace> = zones
            .into_iter()
            .map(|zone| OpenWorkplace {
                zone,
                end: 0.0,
                tasks: Vec::new(),
            })
            .collect();

        // Steps 4-5: place prefix tasks in order.
        let mut assigned = 0;
        let mut station_tasks: Vec<usize> = Vec::new();
        for &t in pool.iter().take(prefix_len) {
            let task = inst.task(t);
            let mut candidates: Vec<usize> = (0..open.len()).collect();
            candidates.sort_by(|&a, &b| {
                let da = inst.displacement().time(open[a].zone, task.zone);
                let db = inst.displacement().time(open[b].zone, task.zone);
                da.partial_cmp(&db).unwrap().then(open[a].zone.cmp(&open[b].zone))
            });
            let pred_end = inst
                .direct_preds(t)
                .iter()
                .map(|&p| end_in_station[p])
                .filter(|e| !e.is_nan())
                .fold(0.0f64, f64::max);
            let mut placed = false;
            for wi in candidates {
                let displacement = inst.displacement().time(open[wi].zone, task.zone);
                let corrected = task.base_time + displacement;
                let start = open[wi].end.max(pred_end);
                if start + corrected <= cycle + TIME_EPS {
                    let end = start + corrected;
                    let workplace_zone = open[wi].zone;
                    open[wi].tasks.push(ScheduledTask {
                        task_id: t,
                        workstation: station_index,
                        workplace_zone,
                        start,
                        end,
                        corrected_duration: corrected,
                        displacement_added: displacement,
                    });
                    open[wi].end = end;
                    end_in_station[t] = end;
                    station_tasks.push(t);
                    placed = true;
                    break;
                }
            }
            if !placed {
                if assigned == 0 {
                    // fresh station and the very first task fits nowhere
                    let min_disp = open
                        .iter()
                        .map(|wp| inst.displacement().time(wp.zone, task.zone))
                        .fold(f64::INFINITY, f64::min);
                    return Err(DecodeError::InfeasibleTask {
                        task: t,
                        needed: task.base_time + min_disp,
                        cycle_time: cycle,
                    });
                }
                break;
            }
            assigned += 1;
        }

        for _ in 0..assigned {
            pool.pop_front();
        }
        for &t in &station_tasks {
            end_in_station[t] = f64::NAN;
        }

        let workplaces: Vec<Workplace> = open
            .into_iter()
            .filter(|wp| !wp.tasks.is_empty())
            .map(|wp| {
                let workload: f64 = wp.tasks.iter().map(|t| t.corrected_duration).sum();
                let mut idle = wp.tasks[0].start;
                for w in wp.tasks.windows(2) {
                    idle += w[1].start - w[0].end;
                }
                Workplace {
                    zone: wp.zone,
                    tasks: wp.tasks,
                    workload,
                    idle,
                }
            })
            .collect();
        stations.push(Workstation { workplaces });
    }

    let open_workplaces = stations.iter().map(|s| s.workplaces.len()).sum();
    let workloads: Vec<f64> = stations
        .iter()
        .flat_map(|s| s.workplaces.iter().map(|wp| wp.workload))
        .collect();
    let total_workload = workloads.iter().sum();
    let primary = objective::primary_from_workloads(&workloads, cycle)
        .expect("assignment never exceeds the cycle time");
    Ok(BalancingSolution {
        stations,
        open_workplaces,
        total_workload,
        fitness: FitnessValue {
            primary,
            workload: total_workload,
            open: open_workplaces,
        },
    })
}

/// Plain-text Gantt chart: one row per workplace, idle marked with dots.
pub fn render_gantt(sol: &BalancingSolution, inst: &Instance) -> String {
    const WIDTH: usize = 64;
    let cycle = inst.cycle_time();
    let scale = |t: f64| ((t / cycle) * WIDTH as f64).round() as usize;
    let mut out = String::new();
    for (si, station) in sol.stations.iter().enumerate() {
        out.push_str(&format!("workstation {}\n", si + 1));
        for wp in &station.workplaces {
            let mut bar = vec![b'.'; WIDTH];
            for task in &wp.tasks {
                let a = scale(task.start).min(WIDTH);
                let b = scale(task.end).clamp(a + 1, WIDTH);
                let label = task.task_id.to_string();
                for (k, slot) in bar[a..b].iter_mut().enumerate() {
                    *slot = label.as_bytes().get(k).copied().unwrap_or(b'#');
                }
            }
            out.push_str(&format!(
                "  zone {} |{}| load {:.1} idle {:.1}\n",
                wp.zone,
                String::from_utf8_lossy(&bar),
                wp.workload,
                wp.idle
            ));
            for task in &wp.tasks {
                out.push_str(&format!(
                    "    task {:>3}  {:>9.2} .. {:<9.2} (+{} displacement)\n",
                    task.task_id, task.start, task.end, task.displacement_added
                ));
            }
        }
    }
    out.push_str(&format!(
        "open workplaces: {}   total workload: {:.2}   fitness: {:.4}\n",
        sol.open_workplaces, sol.total_workload, sol.fitness.primary
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DisplacementMatrix, Task};
    use crate::precedence::build_complete_matrix;
    use proptest::prelude::*;

    fn inst(tasks: Vec<(f64, Zone)>, edges: Vec<(usize, usize)>, cycle: f64, kmax: usize) -> Instance {
        let tasks = tasks
            .into_iter()
            .enumerate()
            .map(|(i, (base_time, zone))| Task {
                id: i + 1,
                base_time,
                zone,
            })
            .collect();
        Instance::new(tasks, edges, cycle, DisplacementMatrix::standard(), kmax).unwrap()
    }

    #[test]
    fn rank_transform_example() {
        let ranks = random_keys(&[0.3, -1.2, 7.0, 0.0, 2.5], 5).unwrap();
        assert_eq!(ranks, vec![3, 1, 5, 2, 4]);
    }

    #[test]
    fn increasing_vector_is_identity() {
        let ranks = random_keys(&[1.0, 2.0, 3.0, 4.0], 4).unwrap();
        assert_eq!(ranks, vec![1, 2, 3, 4]);
    }

    #[test]
    fn ties_break_by_dimension() {
        let ranks = random_keys(&[5.0; 5], 5).unwrap();
        assert_eq!(ranks, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn nan_rejected() {
        assert!(matches!(
            random_keys(&[0.0, f64::NAN], 2),
            Err(DecodeError::InvalidPosition(1))
        ));
    }

    #[test]
    fn single_task_instance() {
        let inst = inst(vec![(5.0, 3)], vec![], 10.0, 3);
        let m = build_complete_matrix(inst.edges(), 1).unwrap();
        let sol = decode(&[0.42], &inst, &m).unwrap();
        assert_eq!(sol.stations.len(), 1);
        assert_eq!(sol.open_workplaces, 1);
        assert_eq!(sol.fitness.open, 1);
    }

    #[test]
    fn decode_is_pure() {
        let inst = inst(
            vec![(300.0, 0), (400.0, 1), (200.0, 5), (500.0, 0)],
            vec![(1, 2), (2, 4)],
            1000.0,
            2,
        );
        let m = build_complete_matrix(inst.edges(), 4).unwrap();
        let p = [0.7, -0.3, 0.1, 0.9];
        assert_eq!(decode(&p, &inst, &m).unwrap(), decode(&p, &inst, &m).unwrap());
    }

    #[test]
    fn single_zone_line_has_no_displacement_or_idle() {
        let inst = inst(vec![(3.0, 2), (4.0, 2), (2.0, 2)], vec![], 10.0, 3);
        let sol = assign(&[1, 2, 3], &inst).unwrap();
        assert_eq!(sol.stations.len(), 1);
        assert_eq!(sol.open_workplaces, 1);
        let wp = &sol.stations[0].workplaces[0];
        assert_eq!(wp.idle, 0.0);
        assert_eq!(sol.total_workload, 9.0);
        assert!(sol.scheduled_tasks().all(|t| t.displacement_added == 0.0));
    }

    /// Chained tasks split across parallel workplaces: successors start
    /// exactly at their predecessor's end and the waiting workplace
    /// shows the gap as idle time.
    #[test]
    fn idle_time_propagation_across_workplaces() {
        let inst = inst(
            vec![(40.0, 0), (30.0, 0), (50.0, 1), (40.0, 2)],
            vec![(2, 3), (3, 4)],
            200.0,
            3,
        );
        let sol = assign(&[1, 2, 3, 4], &inst).unwrap();
        assert_eq!(sol.stations.len(), 1);
        let find = |id: usize| *sol.scheduled_tasks().find(|t| t.task_id == id).unwrap();
        let (t2, t3, t4) = (find(2), find(3), find(4));
        assert_eq!(t3.start, t2.end);
        assert_eq!(t4.start, t3.end);
        let wp_z1 = sol.workplaces().find(|wp| wp.zone == 1).unwrap();
        assert_eq!(wp_z1.idle, t3.start);
        assert!(wp_z1.idle > 0.0);
    }

    #[test]
    fn off_zone_task_pays_displacement() {
        // two tasks, two zones, cap of one workplace per station but both
        // fit in one station only if the second pays the displacement
        let inst = inst(vec![(50.0, 0), (30.0, 5)], vec![], 100.0, 1);
        let sol = assign(&[1, 2], &inst).unwrap();
        assert_eq!(sol.stations.len(), 1);
        let t2 = sol.scheduled_tasks().find(|t| t.task_id == 2).unwrap();
        assert_eq!(t2.displacement_added, 13.5);
        assert_eq!(t2.corrected_duration, 43.5);
        assert_eq!(sol.total_workload, 50.0 + 43.5);
    }

    #[test]
    fn station_closes_when_task_fits_nowhere() {
        // both tasks share a zone, so only one workplace opens; the
        // second task does not fit behind the first and the station
        // closes around it
        let inst = inst(vec![(70.0, 0), (60.0, 0)], vec![], 100.0, 2);
        let sol = assign(&[1, 2], &inst).unwrap();
        assert_eq!(sol.stations.len(), 2);
        assert_eq!(sol.open_workplaces, 2);
    }

    #[test]
    fn infeasible_task_reported() {
        // zone 1 outranks zone 0 and is the only opened workplace;
        // 48 + 54 displacement exceeds the cycle time even when fresh
        let inst = inst(vec![(48.0, 0), (49.0, 1)], vec![], 100.0, 1);
        match assign(&[1, 2], &inst) {
            Err(DecodeError::InfeasibleTask {
                task,
                needed,
                cycle_time,
            }) => {
                assert_eq!(task, 1);
                assert_eq!(needed, 102.0);
                assert_eq!(cycle_time, 100.0);
            }
            other => panic!("expected InfeasibleTask, got {other:?}"),
        }
    }

    #[test]
    fn empty_workplaces_are_discarded() {
        // zone 5 opens in station 1 but its only task is pushed behind
        // the closure; the untouched workplace must not count
        let inst = inst(vec![(60.0, 0), (95.0, 0), (30.0, 5)], vec![], 100.0, 2);
        let sol = assign(&[1, 2, 3], &inst).unwrap();
        assert_eq!(sol.stations.len(), 2);
        assert_eq!(sol.stations[0].workplaces.len(), 1);
        assert_eq!(sol.stations[0].workplaces[0].zone, 0);
        assert_eq!(sol.open_workplaces, 3);
    }

    #[test]
    fn gantt_contains_rows() {
        let inst = inst(vec![(40.0, 0), (30.0, 5)], vec![], 100.0, 2);
        let m = build_complete_matrix(inst.edges(), 2).unwrap();
        let sol = decode(&[0.1, 0.2], &inst, &m).unwrap();
        let g = render_gantt(&sol, &inst);
        assert!(g.contains("workstation 1"));
        assert!(g.contains("zone 0"));
        assert!(g.contains("open workplaces: 2"));
    }

    proptest! {
        /// random_keys always yields a permutation of 1..=n.
        #[test]
        fn rank_transform_is_permutation(pos in proptest::collection::vec(-100.0f64..100.0, 1..40)) {
            let n = pos.len();
            let mut ranks = random_keys(&pos, n).unwrap();
            ranks.sort_unstable();
            prop_assert_eq!(ranks, (1..=n).collect::<Vec<_>>());
        }
    }
}
