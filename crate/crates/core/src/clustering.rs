//! Opinion clusters on the real line, and target states built from a
//! requested partition.
//!
//! A cluster is a maximal run of sorted opinions whose adjacent gaps are all
//! at most the tolerance (single linkage in one dimension).

use alloc::vec::Vec;

use nalgebra::DVector;

use crate::error::ClusterError;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGroup {
    /// 1-based node ids, ascending.
    pub nodes: Vec<usize>,
    /// Mean opinion of the group.
    pub value: f64,
}

/// Groups ordered by ascending value.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPartition {
    pub groups: Vec<ClusterGroup>,
    pub tolerance: f64,
}

impl ClusterPartition {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn is_consensus(&self) -> bool {
        self.groups.len() == 1
    }

    pub fn is_polarised(&self) -> bool {
        self.groups.len() == 2
    }

    /// Group index of every node (0-based node order).
    pub fn assignment(&self, n: usize) -> Vec<usize> {
        let mut a = alloc::vec![0; n];
        for (g, group) in self.groups.iter().enumerate() {
            for &node in &group.nodes {
                a[node - 1] = g;
            }
        }
        a
    }
}

/// Splits sorted opinions wherever two neighbours differ by more than `tol`.
///
/// # Panics
///
/// If `tol` is not a positive number.
pub fn detect_clusters(x: &[f64], tol: f64) -> ClusterPartition {
    assert!(tol > 0.0, "cluster tolerance must be positive");
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));

    let mut groups = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if k > 0 && x[i] - x[order[k - 1]] > tol {
            groups.push(close_group(core::mem::take(&mut current), x));
        }
        current.push(i);
    }
    if !current.is_empty() {
        groups.push(close_group(current, x));
    }
    ClusterPartition {
        groups,
        tolerance: tol,
    }
}

fn close_group(mut members: Vec<usize>, x: &[f64]) -> ClusterGroup {
    let value = members.iter().map(|&i| x[i]).sum::<f64>() / members.len() as f64;
    members.sort_unstable();
    ClusterGroup {
        nodes: members.into_iter().map(|i| i + 1).collect(),
        value,
    }
}

/// Target state with `x_d[i] = values[assignment[i]]`.
pub fn cluster_target(assignment: &[usize], values: &[f64]) -> Result<DVector<f64>, ClusterError> {
    for (i, a) in values.iter().enumerate() {
        if let Some(j) = values[i + 1..].iter().position(|b| b == a) {
            return Err(ClusterError::DuplicateGroupValue {
                first: i,
                second: i + 1 + j,
            });
        }
    }
    assignment
        .iter()
        .enumerate()
        .map(|(node, &group)| {
            values.get(group).copied().ok_or(ClusterError::IncompleteAssignment {
                node: node + 1,
                group,
            })
        })
        .collect::<Result<Vec<f64>, _>>()
        .map(DVector::from_vec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn four_clusters() {
        let p = detect_clusters(&[-14.0, 1.0, 6.0, -14.0, 6.0, 11.0], 0.5);
        assert_eq!(p.len(), 4);
        let nodes: Vec<_> = p.groups.iter().map(|g| g.nodes.clone()).collect();
        assert_eq!(nodes, vec![vec![1, 4], vec![2], vec![3, 5], vec![6]]);
        let values: Vec<_> = p.groups.iter().map(|g| g.value).collect();
        assert_eq!(values, vec![-14.0, 1.0, 6.0, 11.0]);
    }

    #[test]
    fn polarisation_and_consensus() {
        let p = detect_clusters(&[-10.0, 10.0, 10.0, -10.0, 10.0, -10.0], 0.5);
        assert!(p.is_polarised());
        assert_eq!(p.groups[0].value, -10.0);
        assert_eq!(p.groups[1].value, 10.0);
        assert!(detect_clusters(&[3.0; 5], 0.5).is_consensus());
    }

    #[test]
    fn single_linkage_chains() {
        let p = detect_clusters(&[0.0, 0.4, 0.8, 2.0], 0.5);
        assert_eq!(p.len(), 2);
        assert_eq!(p.groups[0].nodes, vec![1, 2, 3]);
    }

    #[test]
    fn empty_input() {
        assert!(detect_clusters(&[], 1.0).is_empty());
    }

    #[test]
    #[should_panic]
    fn zero_tolerance_panics() {
        detect_clusters(&[1.0], 0.0);
    }

    #[test]
    fn target_from_groups() {
        let x = cluster_target(&[0, 0, 1, 1], &[5.0, -5.0]).unwrap();
        assert_eq!(x.as_slice(), &[5.0, 5.0, -5.0, -5.0]);
        let x = cluster_target(&[0, 0, 0], &[2.5]).unwrap();
        assert_eq!(x.as_slice(), &[2.5; 3]);
    }

    #[test]
    fn target_errors() {
        assert_eq!(
            cluster_target(&[0, 2], &[1.0, 2.0]),
            Err(ClusterError::IncompleteAssignment { node: 2, group: 2 })
        );
        assert_eq!(
            cluster_target(&[0, 1], &[1.0, 1.0]),
            Err(ClusterError::DuplicateGroupValue { first: 0, second: 1 })
        );
    }
}
