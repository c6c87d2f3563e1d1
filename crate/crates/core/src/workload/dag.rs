use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Operator type of a job in the multimodal graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    Embed,
    Enc1,
    Enc2,
    Enc3,
    Proj,
    Align,
    Fusion,
    Classifier,
    Output,
}

impl OperatorKind {
    /// Whether this kind belongs to a per-modality encoder chain.
    pub fn is_slice_local(self) -> bool {
        matches!(
            self,
            OperatorKind::Embed
                | OperatorKind::Enc1
                | OperatorKind::Enc2
                | OperatorKind::Enc3
                | OperatorKind::Proj
        )
    }

    pub const CHAIN: [OperatorKind; 5] = [
        OperatorKind::Embed,
        OperatorKind::Enc1,
        OperatorKind::Enc2,
        OperatorKind::Enc3,
        OperatorKind::Proj,
    ];
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: usize,
    pub kind: OperatorKind,
    /// Modality index, present only for slice-local jobs.
    pub slice: Option<usize>,
}

impl Job {
    pub fn slice_local(id: usize, kind: OperatorKind, slice: usize) -> Self {
        Job { id, kind, slice: Some(slice) }
    }

    pub fn cross(id: usize, kind: OperatorKind) -> Self {
        Job { id, kind, slice: None }
    }
}

/// A validated, acyclic job graph with a single sink.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    jobs: Vec<Job>,
    edges: Vec<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    topo: Vec<usize>,
    output_id: usize,
    modality_count: usize,
}

impl Dag {
    /// Builds a graph from jobs (ids must be `0..n` in order) and edges.
    ///
    /// Rejects cycles, dangling edges, duplicate edges, slice indices outside
    /// `0..modality_count` and graphs without exactly one sink.
    pub fn new(jobs: Vec<Job>, edges: Vec<(usize, usize)>, modality_count: usize) -> Result<Self> {
        let n = jobs.len();
        if n == 0 {
            return Err(Error::structural("graph has no jobs"));
        }
        for (i, job) in jobs.iter().enumerate() {
            if job.id != i {
                return Err(Error::structural(format!("job at position {i} has id {}", job.id)));
            }
            match job.slice {
                Some(k) if k >= modality_count => {
                    return Err(Error::structural(format!(
                        "job {i} references slice {k} but only {modality_count} modalities exist"
                    )));
                }
                Some(_) if !job.kind.is_slice_local() => {
                    return Err(Error::structural(format!("cross-modality job {i} carries a slice")));
                }
                None if job.kind.is_slice_local() => {
                    return Err(Error::structural(format!("slice-local job {i} has no slice")));
                }
                _ => {}
            }
        }

        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::structural(format!("edge {u}->{v} references a missing job")));
            }
            if u == v {
                return Err(Error::structural(format!("self loop on job {u}")));
            }
            if succs[u].contains(&v) {
                return Err(Error::structural(format!("duplicate edge {u}->{v}")));
            }
            succs[u].push(v);
            preds[v].push(u);
        }

        // Kahn's algorithm; lowest id first so the order is deterministic.
        let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            topo.push(u);
            for &v in &succs[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if topo.len() != n {
            let stuck: Vec<usize> = (0..n).filter(|&v| indeg[v] > 0).collect();
            return Err(Error::structural(format!("cycle detected among jobs {stuck:?}")));
        }

        let sinks: Vec<usize> = (0..n).filter(|&v| succs[v].is_empty()).collect();
        if sinks.len() != 1 {
            return Err(Error::structural(format!("expected exactly one sink, found {sinks:?}")));
        }

        Ok(Dag { jobs, edges, preds, succs, topo, output_id: sinks[0], modality_count })
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: usize) -> &Job {
        &self.jobs[id]
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn preds(&self, v: usize) -> &[usize] {
        &self.preds[v]
    }

    pub fn succs(&self, v: usize) -> &[usize] {
        &self.succs[v]
    }

    /// Jobs in topological order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn output_id(&self) -> usize {
        self.output_id
    }

    pub fn modality_count(&self) -> usize {
        self.modality_count
    }

    /// The Embed job(s) gated by slice `k`.
    pub fn entry_jobs(&self, k: usize) -> impl Iterator<Item = &Job> + '_ {
        self.jobs
            .iter()
            .filter(move |j| j.kind == OperatorKind::Embed && j.slice == Some(k))
    }

    /// One "pred succ" pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Builds the two-level multimodal graph for `k` modalities.
///
/// Ids are modality-major (`Embed_0..Proj_0, Embed_1..`), followed by
/// `Align_1, Align_2, Fusion, Classifier, Output`. `Align_1` waits for the
/// projections of modalities `0..k/2`, `Align_2` for the rest.
pub fn build_multimodal_dag(k: usize) -> Result<Dag> {
    if k < 2 {
        return Err(Error::config(format!(
            "K must be at least 2 for the two-way align split, got {k}"
        )));
    }
    let mut jobs = Vec::with_capacity(5 * k + 5);
    let mut edges = Vec::with_capacity(5 * k + 4);
    for slice in 0..k {
        for (i, kind) in OperatorKind::CHAIN.iter().enumerate() {
            let id = jobs.len();
            jobs.push(Job::slice_local(id, *kind, slice));
            if i > 0 {
                edges.push((id - 1, id));
            }
        }
    }
    let align1 = jobs.len();
    let align2 = align1 + 1;
    let fusion = align1 + 2;
    let classifier = align1 + 3;
    let output = align1 + 4;
    jobs.push(Job::cross(align1, OperatorKind::Align));
    jobs.push(Job::cross(align2, OperatorKind::Align));
    jobs.push(Job::cross(fusion, OperatorKind::Fusion));
    jobs.push(Job::cross(classifier, OperatorKind::Classifier));
    jobs.push(Job::cross(output, OperatorKind::Output));

    let half = k / 2;
    for slice in 0..k {
        let proj = slice * 5 + 4;
        edges.push((proj, if slice < half { align1 } else { align2 }));
    }
    edges.push((align1, fusion));
    edges.push((align2, fusion));
    edges.push((fusion, classifier));
    edges.push((classifier, output));

    Dag::new(jobs, edges, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn align_preds(dag: &Dag, which: usize) -> Vec<usize> {
        let id = 5 * dag.modality_count() + which;
        let mut p: Vec<usize> = dag
            .preds(id)
            .iter()
            .map(|&u| dag.job(u).slice.unwrap())
            .collect();
        p.sort_unstable();
        p
    }

    #[test]
    fn six_modalities() {
        let dag = build_multimodal_dag(6).unwrap();
        assert_eq!(dag.len(), 35);
        assert_eq!(dag.edges().len(), 34);
        assert_eq!(align_preds(&dag, 0), vec![0, 1, 2]);
        assert_eq!(align_preds(&dag, 1), vec![3, 4, 5]);
        assert_eq!(dag.job(dag.output_id()).kind, OperatorKind::Output);
        assert_eq!(dag.output_id(), 34);
    }

    #[test]
    fn two_and_three_modalities() {
        let dag = build_multimodal_dag(2).unwrap();
        assert_eq!((dag.len(), dag.edges().len()), (15, 14));
        assert_eq!(align_preds(&dag, 0), vec![0]);
        assert_eq!(align_preds(&dag, 1), vec![1]);

        let dag = build_multimodal_dag(3).unwrap();
        assert_eq!(dag.len(), 20);
        assert_eq!(align_preds(&dag, 0), vec![0]);
        assert_eq!(align_preds(&dag, 1), vec![1, 2]);
    }

    #[test]
    fn rejects_single_modality() {
        assert!(matches!(build_multimodal_dag(1), Err(Error::Config(_))));
        assert!(matches!(build_multimodal_dag(0), Err(Error::Config(_))));
    }

    #[test]
    fn node_and_edge_counts_for_many_k() {
        for k in 2..40 {
            let dag = build_multimodal_dag(k).unwrap();
            assert_eq!(dag.len(), 5 * k + 5);
            assert_eq!(dag.edges().len(), 5 * k + 4);
            let kinds = |kind| dag.jobs().iter().filter(|j| j.kind == kind).count();
            assert_eq!(kinds(OperatorKind::Align), 2);
            assert_eq!(kinds(OperatorKind::Fusion), 1);
            assert_eq!(kinds(OperatorKind::Classifier), 1);
            assert_eq!(kinds(OperatorKind::Output), 1);
            assert_eq!(kinds(OperatorKind::Embed), k);
            for j in dag.jobs() {
                assert_eq!(j.slice.is_some(), j.kind.is_slice_local());
            }
        }
    }

    #[test]
    fn rejects_cycles_and_multiple_sinks() {
        let jobs = vec![
            Job::cross(0, OperatorKind::Align),
            Job::cross(1, OperatorKind::Fusion),
            Job::cross(2, OperatorKind::Output),
        ];
        let err = Dag::new(jobs.clone(), vec![(0, 1), (1, 0), (1, 2)], 0).unwrap_err();
        assert!(matches!(err, Error::Structural(ref m) if m.contains("cycle")));
        let err = Dag::new(jobs, vec![(0, 1)], 0).unwrap_err();
        assert!(matches!(err, Error::Structural(ref m) if m.contains("sink")));
    }

    #[test]
    fn edge_list_export() {
        let dag = build_multimodal_dag(2).unwrap();
        let text = dag.to_edge_list();
        assert_eq!(text.lines().count(), 14);
        assert_eq!(text.lines().next(), Some("0 1"));
        assert!(text.lines().any(|l| l == "13 14"));
    }
}
