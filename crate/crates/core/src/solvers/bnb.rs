use crate::evaluation::{Problem, MAX_SCORE};

use super::{finish, prepare, unpinned, SolveError, SolveRequest, SolveResult};

/// Depth-first branch and bound over the unpinned components.
///
/// Components are branched on in order of descending `ram_mb + cpu_units`
/// (ties by id), ECUs tried in id order. A node is cut when its partial
/// assignment already breaks a constraint, or when its score, which bounds
/// every completion from above, cannot beat the incumbent.
pub fn solve_branch_and_bound(req: &SolveRequest<'_>) -> Result<SolveResult, SolveError> {
    let (problem, mut assignment) = prepare(req)?;
    let mut order = unpinned(&assignment);
    order.sort_by(|&a, &b| {
        problem
            .component_demand(b)
            .total_cmp(&problem.component_demand(a))
            .then(problem.component_id(a).cmp(problem.component_id(b)))
    });

    let mut search = Search {
        problem: &problem,
        order: &order,
        incumbent: None,
        explored: 1,
    };
    let root = problem.score(&assignment);
    if root >= 0 {
        search.descend(&mut assignment, 0, root);
    }
    let Search {
        incumbent,
        explored,
        ..
    } = search;
    Ok(finish(&problem, incumbent, explored))
}

struct Search<'p, 'a> {
    problem: &'p Problem<'a>,
    order: &'p [usize],
    incumbent: Option<(i64, Vec<Option<usize>>)>,
    explored: u64,
}

impl Search<'_, '_> {
    fn incumbent_score(&self) -> i64 {
        self.incumbent.as_ref().map_or(-1, |(s, _)| *s)
    }

    /// `bound` is the score of `assignment`, already known to be feasible
    /// so far and to beat the incumbent.
    fn descend(&mut self, assignment: &mut Vec<Option<usize>>, depth: usize, bound: i64) {
        if depth == self.order.len() {
            self.incumbent = Some((bound, assignment.clone()));
            return;
        }
        let c = self.order[depth];
        for e in 0..self.problem.num_ecus() {
            if self.incumbent_score() >= MAX_SCORE {
                break;
            }
            assignment[c] = Some(e);
            self.explored += 1;
            let score = self.problem.score(assignment);
            if score >= 0 && score > self.incumbent_score() {
                self.descend(assignment, depth + 1, score);
            }
        }
        assignment[c] = None;
    }
}

