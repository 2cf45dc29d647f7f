//! Independent feasibility checker for decoded solutions.
//!
//! This module deliberately shares no logic with the decoder: it derives
//! reachability, workloads and the fitness value from scratch so it can
//! serve as an internal oracle for everything the assignment produces.

use std::collections::HashMap;

use crate::decoder::BalancingSolution;
use crate::model::Instance;
use crate::TIME_EPS;

/// One broken invariant, with enough context to debug it.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation(pub String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! fail {
    ($v:expr, $($arg:tt)*) => { $v.push(Violation(format!($($arg)*))) };
}

/// Checks every solution invariant against the instance. Returns the
/// full list of violations; an empty list means the solution is valid.
pub fn check(inst: &Instance, sol: &BalancingSolution) -> Vec<Violation> {
    let mut v = Vec::new();
    let n = inst.task_count();
    let cycle = inst.cycle_time();

    // every task exactly once
    let mut seen = vec![0usize; n + 1];
    for t in sol.scheduled_tasks() {
        if t.task_id == 0 || t.task_id > n {
            fail!(v, "unknown task id {}", t.task_id);
        } else {
            seen[t.task_id] += 1;
        }
    }
    for (id, &count) in seen.iter().enumerate().skip(1) {
        if count != 1 {
            fail!(v, "task {id} is scheduled {count} times (expected 1)");
        }
    }
    let tasks_complete = seen.iter().skip(1).all(|&c| c == 1);

    // per-station structure
    let mut open_count = 0;
    let mut total_workload = 0.0;
    let mut workloads = Vec::new();
    for (si, station) in sol.stations.iter().enumerate() {
        if station.workplaces.len() > inst.max_workplaces() {
            fail!(
                v,
                "workstation {si} opens {} workplaces (cap {})",
                station.workplaces.len(),
                inst.max_workplaces()
            );
        }
        for wp in &station.workplaces {
            if wp.tasks.is_empty() {
                fail!(v, "workstation {si} zone {} is open but empty", wp.zone);
                continue;
            }
            open_count += 1;
            let mut load = 0.0;
            let mut prev_end = 0.0;
            let mut idle = 0.0;
            for t in &wp.tasks {
                if t.workstation != si {
                    fail!(v, "task {} carries station {} but sits in {si}", t.task_id, t.workstation);
                }
                if t.workplace_zone != wp.zone {
                    fail!(v, "task {} carries zone {} in a zone-{} workplace", t.task_id, t.workplace_zone, wp.zone);
                }
                let task = inst.task(t.task_id);
                let expected =
                    task.base_time + inst.displacement().time(wp.zone, task.zone);
                if (t.corrected_duration - expected).abs() > TIME_EPS {
                    fail!(
                        v,
                        "task {}: corrected duration {} differs from base {} + displacement {}",
                        t.task_id,
                        t.corrected_duration,
                        task.base_time,
                        inst.displacement().time(wp.zone, task.zone)
                    );
                }
                if (t.end - t.start - t.corrected_duration).abs() > TIME_EPS {
                    fail!(v, "task {}: end {} != start {} + duration {}", t.task_id, t.end, t.start, t.corrected_duration);
                }
                if t.start < -TIME_EPS || t.end > cycle + TIME_EPS {
                    fail!(v, "task {}: [{}, {}] leaves the cycle window [0, {cycle}]", t.task_id, t.start, t.end);
                }
                if t.start < prev_end - TIME_EPS {
                    fail!(v, "task {} overlaps its workplace predecessor (start {} < previous end {})", t.task_id, t.start, prev_end);
                }
                idle += (t.start - prev_end).max(0.0);
                prev_end = t.end;
                load += t.corrected_duration;
            }
            if (load - wp.workload).abs() > 1e-6 {
                fail!(v, "workstation {si} zone {}: stored workload {} != recomputed {load}", wp.zone, wp.workload);
            }
            if (idle - wp.idle).abs() > 1e-6 {
                fail!(v, "workstation {si} zone {}: stored idle {} != recomputed {idle}", wp.zone, wp.idle);
            }
            if load + idle > cycle + 1e-6 {
                fail!(v, "workstation {si} zone {}: workload {load} + idle {idle} exceeds the cycle time", wp.zone);
            }
            workloads.push(load);
            total_workload += load;
        }
    }

    if open_count != sol.open_workplaces {
        fail!(v, "stored open workplace count {} != recomputed {open_count}", sol.open_workplaces);
    }
    if (total_workload - sol.total_workload).abs() > 1e-6 {
        fail!(v, "stored total workload {} != recomputed {total_workload}", sol.total_workload);
    }
    if total_workload + TIME_EPS < inst.total_base_time() - 1e-6 {
        fail!(v, "total workload {total_workload} below the sum of base times {}", inst.total_base_time());
    }
    if tasks_complete && open_count < inst.workplace_lower_bound() {
        fail!(v, "open workplaces {open_count} below the lower bound {}", inst.workplace_lower_bound());
    }

    // fitness from scratch
    let m = workloads.len() as f64;
    let radical: f64 = workloads.iter().map(|t| (cycle - t) * (cycle - t)).sum::<f64>().sqrt();
    let primary = m * radical;
    if (primary - sol.fitness.primary).abs() > 1e-6 * primary.max(1.0) {
        fail!(v, "stored fitness {} != recomputed {primary}", sol.fitness.primary);
    }

    // precedence, with reachability derived here by BFS over the direct
    // edges (not via the precedence module)
    let mut position: HashMap<usize, (usize, f64, f64)> = HashMap::new();
    for t in sol.scheduled_tasks() {
        position.insert(t.task_id, (t.workstation, t.start, t.end));
    }
    let mut succ = vec![Vec::new(); n + 1];
    for &(a, b) in inst.edges() {
        succ[a].push(b);
    }
    for start in 1..=n {
        // BFS from start over direct successors
        let mut stack = succ[start].clone();
        let mut visited = vec![false; n + 1];
        while let Some(node) = stack.pop() {
            if visited[node] {
                continue;
            }
            visited[node] = true;
            stack.extend_from_slice(&succ[node]);
            let (Some(&(sa, _, ea)), Some(&(sb, sb_start, _))) =
                (position.get(&start), position.get(&node))
            else {
                continue;
            };
            if sa > sb {
                fail!(v, "task {start} precedes {node} but sits in a later workstation ({sa} > {sb})");
            } else if sa == sb && ea > sb_start + TIME_EPS {
                fail!(v, "task {start} precedes {node} in workstation {sa} but ends at {ea} after its start {sb_start}");
            }
        }
    }
    v
}
