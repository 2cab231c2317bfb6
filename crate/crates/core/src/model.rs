//! Problem data model and route evaluation.
//!
//! Vertex `0` is the depot; targets are vertices `1..=n` and a target's id is
//! its vertex index. Distances are Euclidean between stored positions.
//!
//! A UAV walks its route from the depot, paying `d / speed` to travel and the
//! target's service time on arrival. A target is collected when its service
//! completes no later than `t_max`. The walk stops at the first target that
//! cannot be completed in time: that target and everything after it in the
//! route is neither visited nor collected. Routes are open, so no return leg
//! is charged.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gen::GenParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub id: usize,
    pub position: Point,
    pub reward: f64,
    pub service_time: f64,
}

impl Target {
    pub fn new(id: usize, position: Point, reward: f64, service_time: f64) -> Self {
        Self {
            id,
            position,
            reward,
            service_time,
        }
    }
}

/// Provenance recorded by the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GenParams>,
}

/// A complete problem. Immutable once built; [`Instance::new`] checks every
/// invariant and precomputes the distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct Instance {
    depot: Point,
    targets: Vec<Target>,
    speeds: Vec<f64>,
    t_max: f64,
    meta: Option<InstanceMeta>,
    dist: Vec<f64>,
}

impl Instance {
    pub fn new(depot: Point, targets: Vec<Target>, speeds: Vec<f64>, t_max: f64) -> Result<Self> {
        let finite = |p: &Point| p.x.is_finite() && p.y.is_finite();
        if !finite(&depot) {
            return Err(Error::InvalidInstance(
                "depot position is not finite".into(),
            ));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        if speeds.is_empty() {
            return Err(Error::InvalidInstance(
                "fleet needs at least one UAV".into(),
            ));
        }
        if let Some((k, s)) = speeds
            .iter()
            .enumerate()
            .find(|(_, s)| !(s.is_finite() && **s > 0.0))
        {
            return Err(Error::InvalidInstance(format!(
                "speed of UAV {k} must be positive, got {s}"
            )));
        }
        for (i, t) in targets.iter().enumerate() {
            if t.id != i + 1 {
                return Err(Error::InvalidInstance(format!(
                    "target ids must be 1..n in order; position {i} holds id {}",
                    t.id
                )));
            }
            if !finite(&t.position) {
                return Err(Error::InvalidInstance(format!(
                    "target {} position is not finite",
                    t.id
                )));
            }
            if !(t.reward.is_finite() && t.reward > 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "target {} reward must be positive, got {}",
                    t.id, t.reward
                )));
            }
            if !(t.service_time.is_finite() && t.service_time >= 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "target {} service time must be non-negative, got {}",
                    t.id, t.service_time
                )));
            }
        }

        let vertices: Vec<Point> = std::iter::once(depot)
            .chain(targets.iter().map(|t| t.position))
            .collect();
        let size = vertices.len();
        let mut dist = vec![0.0; size * size];
        for i in 0..size {
            for j in (i + 1)..size {
                let d = vertices[i].distance(&vertices[j]);
                dist[i * size + j] = d;
                dist[j * size + i] = d;
            }
        }

        Ok(Self {
            depot,
            targets,
            speeds,
            t_max,
            meta: None,
            dist,
        })
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn depot(&self) -> Point {
        self.depot
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    /// Target by id (1-based).
    pub fn target(&self, id: usize) -> Option<&Target> {
        id.checked_sub(1).and_then(|i| self.targets.get(i))
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn meta(&self) -> Option<&InstanceMeta> {
        self.meta.as_ref()
    }

    pub fn n_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn n_uavs(&self) -> usize {
        self.speeds.len()
    }

    pub fn position(&self, vertex: usize) -> Option<Point> {
        if vertex == 0 {
            Some(self.depot)
        } else {
            self.target(vertex).map(|t| t.position)
        }
    }

    /// Euclidean distance between two vertices (0 is the depot).
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let size = self.targets.len() + 1;
        if i >= size || j >= size {
            return Err(Error::InvalidArgument(format!(
                "vertex pair ({i}, {j}) out of range 0..={}",
                size - 1
            )));
        }
        Ok(self.dist(i, j))
    }

    #[inline]
    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * (self.targets.len() + 1) + j]
    }

    /// Time at which `uav`, standing at `from` at time `elapsed`, finishes
    /// serving target `to`. Every code path that checks the deadline goes
    /// through here so the floating-point result is identical everywhere.
    #[inline]
    pub(crate) fn completion_time(&self, uav: usize, from: usize, elapsed: f64, to: usize) -> f64 {
        elapsed + self.dist(from, to) / self.speeds[uav] + self.targets[to - 1].service_time
    }

    /// Sum of all target rewards.
    pub fn upper_bound_reward(&self) -> f64 {
        self.targets.iter().fold(0.0, |acc, t| acc + t.reward)
    }

    /// Sum of rewards of flagged targets, in id order. `collected[i]` refers
    /// to target `i + 1`.
    pub(crate) fn sum_collected(&self, collected: &[bool]) -> f64 {
        self.targets
            .iter()
            .zip(collected)
            .filter(|(_, c)| **c)
            // fold from +0.0: `Sum` starts at -0.0, which would leak into empty results
            .fold(0.0, |acc, (t, _)| acc + t.reward)
    }

    /// Walks one route without validation. Returns the collected prefix
    /// length and the completion time of its last target.
    pub(crate) fn walk_route(
        &self,
        uav: usize,
        route: &[usize],
        collected: &mut [bool],
    ) -> (usize, f64) {
        let mut at = 0;
        let mut time = 0.0;
        for (idx, &id) in route.iter().enumerate() {
            let done = self.completion_time(uav, at, time, id);
            if done > self.t_max {
                return (idx, time);
            }
            time = done;
            at = id;
            collected[id - 1] = true;
        }
        (route.len(), time)
    }

    pub fn validate_solution(&self, solution: &Solution) -> Result<()> {
        if solution.routes.len() != self.n_uavs() {
            return Err(Error::InvalidSolution(format!(
                "expected {} routes (one per UAV), got {}",
                self.n_uavs(),
                solution.routes.len()
            )));
        }
        let n = self.n_targets();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for (k, route) in solution.routes.iter().enumerate() {
            for &id in route {
                if id == 0 || id > n {
                    return Err(Error::InvalidArgument(format!(
                        "route {k} references unknown target {id} (instance has 1..={n})"
                    )));
                }
                if let Some(prev) = owner[id - 1] {
                    return Err(Error::InvalidSolution(format!(
                        "target {id} appears more than once (routes {prev} and {k})"
                    )));
                }
                owner[id - 1] = Some(k);
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, solution: &Solution) -> Result<Evaluation> {
        self.validate_solution(solution)?;
        let mut collected = vec![false; self.n_targets()];
        let mut per_uav_time = Vec::with_capacity(self.n_uavs());
        let mut truncated_at = Vec::with_capacity(self.n_uavs());
        for (k, route) in solution.routes.iter().enumerate() {
            let (kept, time) = self.walk_route(k, route, &mut collected);
            per_uav_time.push(time);
            truncated_at.push((kept < route.len()).then_some(kept));
        }
        Ok(Evaluation {
            total_reward: self.sum_collected(&collected),
            per_uav_time,
            collected,
            truncated_at,
        })
    }

    pub fn decode(&self, encoding: &Encoding) -> Result<Solution> {
        encoding.validate(self.n_targets(), self.n_uavs())?;
        Ok(Solution {
            routes: encoding.segments().map(<[usize]>::to_vec).collect(),
        })
    }

    pub fn encode(&self, solution: &Solution) -> Result<Encoding> {
        self.validate_solution(solution)?;
        let routed: usize = solution.routes.iter().map(Vec::len).sum();
        if routed != self.n_targets() {
            return Err(Error::NotEncodable(format!(
                "only {routed} of {} targets are routed",
                self.n_targets()
            )));
        }
        let perm = solution.routes.concat();
        let breaks = solution
            .routes
            .iter()
            .take(self.n_uavs() - 1)
            .scan(0, |acc, r| {
                *acc += r.len();
                Some(*acc)
            })
            .collect();
        Ok(Encoding { perm, breaks })
    }

    /// Total reward of the decoded encoding; bit-identical to
    /// `evaluate(decode(encoding)).total_reward`. The encoding must be valid.
    pub(crate) fn encoding_reward(&self, encoding: &Encoding) -> f64 {
        let mut collected = vec![false; self.n_targets()];
        for (k, seg) in encoding.segments().enumerate() {
            self.walk_route(k, seg, &mut collected);
        }
        self.sum_collected(&collected)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Vec<usize>>,
}

impl Solution {
    pub fn new(routes: Vec<Vec<usize>>) -> Self {
        Self { routes }
    }

    pub fn empty(n_uavs: usize) -> Self {
        Self {
            routes: vec![Vec::new(); n_uavs],
        }
    }

    /// Drops every target past each route's truncation point, so the result
    /// has the same reward and no truncation.
    pub fn collected_prefix(&self, evaluation: &Evaluation) -> Solution {
        let routes = self
            .routes
            .iter()
            .zip(&evaluation.truncated_at)
            .map(|(r, cut)| match cut {
                Some(c) => r[..*c].to_vec(),
                None => r.clone(),
            })
            .collect();
        Solution { routes }
    }
}

/// Chromosome shared by the GA and PSO: a permutation of all targets split
/// into `|K|` consecutive segments by `|K| - 1` sorted break points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Encoding {
    pub perm: Vec<usize>,
    pub breaks: Vec<usize>,
}

impl Encoding {
    pub fn new(perm: Vec<usize>, breaks: Vec<usize>) -> Self {
        Self { perm, breaks }
    }

    /// Uniform random permutation with uniform sorted break points.
    pub fn random<R: Rng + ?Sized>(n: usize, n_uavs: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(rng);
        let mut breaks: Vec<usize> = (0..n_uavs.saturating_sub(1))
            .map(|_| rng.random_range(0..=n))
            .collect();
        breaks.sort_unstable();
        Self { perm, breaks }
    }

    pub fn validate(&self, n: usize, n_uavs: usize) -> Result<()> {
        if self.perm.len() != n {
            return Err(Error::InvalidEncoding(format!(
                "permutation has length {}, expected {n}",
                self.perm.len()
            )));
        }
        let mut seen = vec![false; n];
        for &id in &self.perm {
            if id == 0 || id > n || std::mem::replace(&mut seen[id - 1], true) {
                return Err(Error::InvalidEncoding(format!(
                    "permutation is not a permutation of 1..={n} (bad entry {id})"
                )));
            }
        }
        if self.breaks.len() + 1 != n_uavs {
            return Err(Error::InvalidEncoding(format!(
                "expected {} break points, got {}",
                n_uavs.saturating_sub(1),
                self.breaks.len()
            )));
        }
        if self.breaks.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidEncoding("break points are not sorted".into()));
        }
        if let Some(b) = self.breaks.iter().find(|&&b| b > n) {
            return Err(Error::InvalidEncoding(format!(
                "break point {b} exceeds {n}"
            )));
        }
        Ok(())
    }

    /// Route slices, one per UAV.
    pub fn segments(&self) -> impl Iterator<Item = &[usize]> + '_ {
        let n = self.perm.len();
        let bounds = std::iter::once(0)
            .chain(self.breaks.iter().copied())
            .zip(self.breaks.iter().copied().chain(std::iter::once(n)));
        bounds.map(move |(lo, hi)| &self.perm[lo..hi])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub total_reward: f64,
    /// Completion time of each UAV's collected prefix.
    pub per_uav_time: Vec<f64>,
    /// `collected[i]` is the flag for target `i + 1`.
    pub collected: Vec<bool>,
    /// Index into each route of the first target that could not be served.
    pub truncated_at: Vec<Option<usize>>,
}

impl Evaluation {
    /// True when every listed target is served in time.
    pub fn is_feasible(&self) -> bool {
        self.truncated_at.iter().all(Option::is_none)
    }

    pub fn collected_count(&self) -> usize {
        self.collected.iter().filter(|c| **c).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetRecord {
    id: usize,
    x: f64,
    y: f64,
    reward: f64,
    service_time: f64,
}

/// On-disk JSON layout of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    depot: Point,
    targets: Vec<TargetRecord>,
    speeds: Vec<f64>,
    t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<InstanceMeta>,
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let targets = file
            .targets
            .into_iter()
            .map(|t| Target::new(t.id, Point::new(t.x, t.y), t.reward, t.service_time))
            .collect();
        let instance = Instance::new(file.depot, targets, file.speeds, file.t_max)?;
        Ok(match file.meta {
            Some(meta) => instance.with_meta(meta),
            None => instance,
        })
    }
}

impl From<Instance> for InstanceFile {
    fn from(instance: Instance) -> Self {
        InstanceFile {
            depot: instance.depot,
            targets: instance
                .targets
                .into_iter()
                .map(|t| TargetRecord {
                    id: t.id,
                    x: t.position.x,
                    y: t.position.y,
                    reward: t.reward,
                    service_time: t.service_time,
                })
                .collect(),
            speeds: instance.speeds,
            t_max: instance.t_max,
            meta: instance.meta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single(t_max: f64) -> Instance {
        Instance::new(
            Point::new(0.0, 0.0),
            vec![Target::new(1, Point::new(3.0, 4.0), 10.0, 2.0)],
            vec![1.0],
            t_max,
        )
        .unwrap()
    }

    fn three_targets(k: usize) -> Instance {
        let targets = (1..=3)
            .map(|i| Target::new(i, Point::new(i as f64, 0.0), [5.0, 7.0, 8.0][i - 1], 0.5))
            .collect();
        Instance::new(Point::new(0.0, 0.0), targets, vec![1.0; k], 100.0).unwrap()
    }

    #[test]
    fn distance_three_four_five() {
        let inst = single(7.0);
        assert_eq!(inst.distance(0, 1).unwrap(), 5.0);
        assert_eq!(inst.distance(1, 0).unwrap(), 5.0);
        assert_eq!(inst.distance(1, 1).unwrap(), 0.0);
        assert!(matches!(
            inst.distance(0, 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn evaluate_exactly_at_deadline() {
        let inst = single(7.0);
        let ev = inst.evaluate(&Solution::new(vec![vec![1]])).unwrap();
        assert_eq!(ev.total_reward, 10.0);
        assert_eq!(ev.per_uav_time, vec![7.0]);
        assert!(ev.is_feasible());
    }

    #[test]
    fn evaluate_just_past_deadline() {
        let inst = single(6.9);
        let ev = inst.evaluate(&Solution::new(vec![vec![1]])).unwrap();
        assert_eq!(ev.total_reward, 0.0);
        assert_eq!(ev.truncated_at, vec![Some(0)]);
        assert_eq!(ev.per_uav_time, vec![0.0]);
        assert!(!ev.collected[0]);
    }

    #[test]
    fn truncation_stops_the_route() {
        // 1 -> 2 is far; 3 is next to 1 but listed after 2.
        let targets = vec![
            Target::new(1, Point::new(1.0, 0.0), 1.0, 0.0),
            Target::new(2, Point::new(50.0, 0.0), 1.0, 0.0),
            Target::new(3, Point::new(1.5, 0.0), 1.0, 0.0),
        ];
        let inst = Instance::new(Point::new(0.0, 0.0), targets, vec![1.0], 10.0).unwrap();
        let ev = inst.evaluate(&Solution::new(vec![vec![1, 2, 3]])).unwrap();
        assert_eq!(ev.total_reward, 1.0);
        assert_eq!(ev.truncated_at, vec![Some(1)]);
        assert_eq!(ev.collected, vec![true, false, false]);
    }

    #[test]
    fn evaluate_rejects_bad_solutions() {
        let inst = three_targets(2);
        let dup = Solution::new(vec![vec![1, 2], vec![2]]);
        assert!(matches!(
            inst.evaluate(&dup),
            Err(Error::InvalidSolution(_))
        ));
        let unknown = Solution::new(vec![vec![4], vec![]]);
        assert!(matches!(
            inst.evaluate(&unknown),
            Err(Error::InvalidArgument(_))
        ));
        let zero = Solution::new(vec![vec![0], vec![]]);
        assert!(matches!(
            inst.evaluate(&zero),
            Err(Error::InvalidArgument(_))
        ));
        let wrong_count = Solution::new(vec![vec![1]]);
        assert!(matches!(
            inst.evaluate(&wrong_count),
            Err(Error::InvalidSolution(_))
        ));
    }

    #[test]
    fn decode_examples() {
        let inst = three_targets(2);
        let s = inst.decode(&Encoding::new(vec![2, 1, 3], vec![1])).unwrap();
        assert_eq!(s.routes, vec![vec![2], vec![1, 3]]);
        let s = inst.decode(&Encoding::new(vec![1, 2, 3], vec![3])).unwrap();
        assert_eq!(s.routes, vec![vec![1, 2, 3], vec![]]);

        let targets = (1..=5)
            .map(|i| Target::new(i, Point::new(0.0, i as f64), 1.0, 0.0))
            .collect();
        let inst5 = Instance::new(Point::new(0.0, 0.0), targets, vec![1.0; 3], 10.0).unwrap();
        let s = inst5
            .decode(&Encoding::new(vec![4, 1, 5, 2, 3], vec![2, 2]))
            .unwrap();
        assert_eq!(s.routes, vec![vec![4, 1], vec![], vec![5, 2, 3]]);
    }

    #[test]
    fn decode_rejects_malformed() {
        let inst = three_targets(2);
        for enc in [
            Encoding::new(vec![1, 1, 3], vec![1]),
            Encoding::new(vec![1, 2], vec![1]),
            Encoding::new(vec![1, 2, 4], vec![1]),
            Encoding::new(vec![1, 2, 3], vec![]),
            Encoding::new(vec![1, 2, 3], vec![4]),
        ] {
            assert!(
                matches!(inst.decode(&enc), Err(Error::InvalidEncoding(_))),
                "{enc:?}"
            );
        }
        let inst3 = three_targets(3);
        let unsorted = Encoding::new(vec![1, 2, 3], vec![2, 1]);
        assert!(matches!(
            inst3.decode(&unsorted),
            Err(Error::InvalidEncoding(_))
        ));
    }

    #[test]
    fn encode_examples() {
        let inst = three_targets(2);
        let e = inst
            .encode(&Solution::new(vec![vec![2], vec![1, 3]]))
            .unwrap();
        assert_eq!(e, Encoding::new(vec![2, 1, 3], vec![1]));
        let e = inst
            .encode(&Solution::new(vec![vec![1, 2, 3], vec![]]))
            .unwrap();
        assert_eq!(e, Encoding::new(vec![1, 2, 3], vec![3]));
        let partial = Solution::new(vec![vec![1], vec![3]]);
        assert!(matches!(inst.encode(&partial), Err(Error::NotEncodable(_))));
    }

    #[test]
    fn upper_bound_is_reward_sum() {
        assert_eq!(three_targets(1).upper_bound_reward(), 20.0);
        let empty = Instance::new(Point::new(0.0, 0.0), vec![], vec![1.0], 1.0).unwrap();
        assert_eq!(empty.upper_bound_reward().to_bits(), 0.0f64.to_bits());
        let ev = empty.evaluate(&Solution::empty(1)).unwrap();
        assert_eq!(ev.total_reward.to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn instance_invariants_enforced() {
        let p = Point::new(0.0, 0.0);
        let t = |id, r, s| Target::new(id, p, r, s);
        assert!(Instance::new(p, vec![t(1, 0.0, 0.0)], vec![1.0], 1.0).is_err());
        assert!(Instance::new(p, vec![t(1, 1.0, -1.0)], vec![1.0], 1.0).is_err());
        assert!(Instance::new(p, vec![t(2, 1.0, 0.0)], vec![1.0], 1.0).is_err());
        assert!(Instance::new(p, vec![t(1, 1.0, 0.0)], vec![], 1.0).is_err());
        assert!(Instance::new(p, vec![t(1, 1.0, 0.0)], vec![0.0], 1.0).is_err());
        assert!(Instance::new(p, vec![t(1, 1.0, 0.0)], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn json_round_trip_and_layout() {
        let inst = three_targets(2).with_meta(InstanceMeta {
            seed: Some(9),
            scale: Some("small".into()),
            params: None,
        });
        let text = serde_json::to_string(&inst).unwrap();
        assert!(text.contains("\"service_time\""));
        assert!(text.contains("\"t_max\""));
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);

        let bad = text.replace("\"reward\":5.0", "\"reward\":-5.0");
        assert!(serde_json::from_str::<Instance>(&bad).is_err());
    }

    fn random_instance(seed: u64, n: usize, k: usize) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let targets = (1..=n)
            .map(|id| {
                Target::new(
                    id,
                    Point::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)),
                    rng.random_range(1.0..10.0),
                    rng.random_range(0.0..2.0),
                )
            })
            .collect();
        let speeds = (0..k).map(|_| rng.random_range(0.5..1.5)).collect();
        Instance::new(
            Point::new(50.0, 50.0),
            targets,
            speeds,
            rng.random_range(20.0..200.0),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn decode_encode_round_trip(seed in any::<u64>(), n in 0usize..20, k in 1usize..5) {
            let inst = random_instance(seed, n, k);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let enc = Encoding::random(n, k, &mut rng);
            let sol = inst.decode(&enc).unwrap();
            prop_assert_eq!(sol.routes.concat(), enc.perm.clone());
            let back = inst.encode(&sol).unwrap();
            prop_assert_eq!(inst.decode(&back).unwrap(), sol);
        }

        #[test]
        fn evaluate_properties(seed in any::<u64>(), n in 0usize..15, k in 1usize..4) {
            let inst = random_instance(seed, n, k);
            let mut rng = ChaCha8Rng::seed_from_u64(!seed);
            let enc = Encoding::random(n, k, &mut rng);
            let sol = inst.decode(&enc).unwrap();
            let ev = inst.evaluate(&sol).unwrap();
            prop_assert_eq!(&ev, &inst.evaluate(&sol).unwrap());
            prop_assert_eq!(ev.total_reward.to_bits(), inst.encoding_reward(&enc).to_bits());
            prop_assert!(ev.total_reward <= inst.upper_bound_reward());
            prop_assert!(ev.per_uav_time.iter().all(|t| *t <= inst.t_max()));
            let trimmed = sol.collected_prefix(&ev);
            let ev2 = inst.evaluate(&trimmed).unwrap();
            prop_assert!(ev2.is_feasible());
            prop_assert_eq!(ev2.total_reward.to_bits(), ev.total_reward.to_bits());
        }
    }
}
