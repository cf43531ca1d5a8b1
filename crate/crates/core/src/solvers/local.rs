use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evaluation::{Problem, MAX_SCORE};

use super::{finish, prepare, unpinned, SolveError, SolveRequest, SolveResult};

/// Multi-restart steepest-ascent hill climbing.
///
/// Each restart draws a uniform random assignment of the unpinned
/// components, then repeatedly applies the best single-component move
/// until none improves or `max_iters` moves have been made. Infeasible
/// states are scored `-1000 * violations` so any feasible state beats them.
/// Only feasible mappings are ever returned.
pub fn solve_local_search(req: &SolveRequest<'_>) -> Result<SolveResult, SolveError> {
    let params = req.params;
    if params.restarts == 0 {
        return Err(SolveError::InvalidParameter("restarts must be positive".into()));
    }
    if params.max_iters == 0 {
        return Err(SolveError::InvalidParameter("max_iters must be positive".into()));
    }
    let (problem, pinned) = prepare(req)?;
    let free = unpinned(&pinned);
    let ne = problem.num_ecus();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut best: Option<(i64, Vec<Option<usize>>)> = None;
    let mut explored = 0u64;
    for _ in 0..params.restarts {
        let mut current = pinned.clone();
        for &c in &free {
            current[c] = Some(rng.gen_range(0..ne));
        }
        let mut value = objective(&problem, &current);
        explored += 1;

        for _ in 0..params.max_iters {
            let mut step: Option<(usize, usize, i64)> = None;
            for &c in &free {
                let here = current[c];
                for e in 0..ne {
                    if Some(e) == here {
                        continue;
                    }
                    current[c] = Some(e);
                    let v = objective(&problem, &current);
                    explored += 1;
                    if v > step.map_or(value, |(_, _, s)| s) {
                        step = Some((c, e, v));
                    }
                }
                current[c] = here;
            }
            match step {
                Some((c, e, v)) => {
                    current[c] = Some(e);
                    value = v;
                }
                None => break,
            }
        }

        if value >= 0 && best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, current));
        }
    }
    Ok(finish(&problem, best, explored))
}

fn objective(problem: &Problem<'_>, assignment: &[Option<usize>]) -> i64 {
    let score = problem.score(assignment);
    if score >= 0 {
        score
    } else {
        MAX_SCORE * score
    }
}
