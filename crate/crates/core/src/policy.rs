//! Jumping policies.
//!
//! A policy is consulted once per remote fault with a read-only view of the
//! process and decides whether execution should move. Policies take `&self`
//! and see nothing but the view, so identical views give identical answers.

use std::fmt;

use crate::error::{Result, SimError};
use crate::model::NodeId;

/// What the policy can see when a remote fault has just been serviced.
#[derive(Debug, Clone, Copy)]
pub struct StateView<'a> {
    pub exec_node: NodeId,
    pub home_node: NodeId,
    /// Pulls since the last jump.
    pub remote_fault_counter: u64,
    /// Pulls since the last jump, per source node (indexed by node id).
    pub fault_tally: &'a [u64],
    /// Nodes the process has been stretched to.
    pub span: &'a [NodeId],
    pub jumps_taken: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyDecision {
    Stay,
    JumpTo(NodeId),
}

pub trait JumpPolicy: Send + Sync {
    fn on_remote_fault(&self, view: &StateView<'_>) -> PolicyDecision;
}

/// Node that served the most remote faults since the last reset. Ties go
/// to the lowest id.
pub fn preferred_node(view: &StateView<'_>) -> Result<NodeId> {
    let mut best: Option<(u64, usize)> = None;
    for (i, &count) in view.fault_tally.iter().enumerate() {
        if count > 0 && best.is_none_or(|(c, _)| count > c) {
            best = Some((count, i));
        }
    }
    best.map(|(_, i)| NodeId(i as u16)).ok_or(SimError::NoPreference)
}

/// Jumps to the preferred node once the remote-fault counter reaches the
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdPolicy {
    pub threshold: u64,
}

impl ThresholdPolicy {
    pub fn new(threshold: u64) -> Result<Self> {
        if threshold == 0 {
            return Err(SimError::InvalidConfig("jump threshold must be at least 1".into()));
        }
        Ok(Self { threshold })
    }
}

impl JumpPolicy for ThresholdPolicy {
    fn on_remote_fault(&self, view: &StateView<'_>) -> PolicyDecision {
        if view.remote_fault_counter < self.threshold {
            return PolicyDecision::Stay;
        }
        match preferred_node(view) {
            Ok(n) if n != view.exec_node => PolicyDecision::JumpTo(n),
            _ => PolicyDecision::Stay,
        }
    }
}

/// Never jumps: execution stays pinned to the home node (network swap).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NeverJump;

impl JumpPolicy for NeverJump {
    fn on_remote_fault(&self, _view: &StateView<'_>) -> PolicyDecision {
        PolicyDecision::Stay
    }
}

/// Policy selection by name and parameters, as written in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicySpec {
    Never,
    /// `u64::MAX` acts as an infinite threshold.
    Threshold(u64),
}

impl PolicySpec {
    pub const INFINITE: PolicySpec = PolicySpec::Threshold(u64::MAX);

    pub fn build(self) -> Result<Box<dyn JumpPolicy>> {
        Ok(match self {
            PolicySpec::Never => Box::new(NeverJump),
            PolicySpec::Threshold(t) => Box::new(ThresholdPolicy::new(t)?),
        })
    }

    pub fn threshold(self) -> Option<u64> {
        match self {
            PolicySpec::Never => None,
            PolicySpec::Threshold(t) => Some(t),
        }
    }

    /// Parses `never`, `threshold:<n>` or a bare count; counts accept K/M
    /// suffixes (powers of 1024) and `inf`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("never") {
            return Ok(PolicySpec::Never);
        }
        let count = s.strip_prefix("threshold:").unwrap_or(s);
        parse_count(count).map(PolicySpec::Threshold)
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Never => f.write_str("never"),
            PolicySpec::Threshold(u64::MAX) => f.write_str("inf"),
            PolicySpec::Threshold(t) => write!(f, "{t}"),
        }
    }
}

/// Parses a count such as `512`, `8K` or `4M`; `inf` maps to `u64::MAX`.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(u64::MAX);
    }
    let (digits, mult) = match s.chars().last() {
        Some('k' | 'K') => (&s[..s.len() - 1], 1u64 << 10),
        Some('m' | 'M') => (&s[..s.len() - 1], 1u64 << 20),
        Some('g' | 'G') => (&s[..s.len() - 1], 1u64 << 30),
        _ => (s, 1),
    };
    digits
        .parse::<u64>()
        .ok()
        .and_then(|n| n.checked_mul(mult))
        .filter(|n| *n > 0)
        .ok_or_else(|| SimError::InvalidConfig(format!("bad count {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view<'a>(exec: u16, counter: u64, tally: &'a [u64], span: &'a [NodeId]) -> StateView<'a> {
        StateView {
            exec_node: NodeId(exec),
            home_node: NodeId(0),
            remote_fault_counter: counter,
            fault_tally: tally,
            span,
            jumps_taken: 0,
        }
    }

    #[test]
    fn threshold_reached_jumps() {
        let p = ThresholdPolicy::new(32).unwrap();
        let span = [NodeId(1)];
        assert_eq!(p.on_remote_fault(&view(0, 32, &[0, 32], &span)), PolicyDecision::JumpTo(NodeId(1)));
    }

    #[test]
    fn one_below_threshold_stays() {
        let p = ThresholdPolicy::new(32).unwrap();
        let span = [NodeId(1)];
        assert_eq!(p.on_remote_fault(&view(0, 31, &[0, 31], &span)), PolicyDecision::Stay);
    }

    #[test]
    fn infinite_threshold_never_jumps() {
        let p = PolicySpec::INFINITE.build().unwrap();
        let span = [NodeId(1)];
        let tally = [0, u64::MAX - 1];
        assert_eq!(p.on_remote_fault(&view(0, u64::MAX - 1, &tally, &span)), PolicyDecision::Stay);
        assert_eq!(NeverJump.on_remote_fault(&view(0, 1 << 40, &tally, &span)), PolicyDecision::Stay);
    }

    #[test]
    fn zero_threshold_rejected() {
        assert!(ThresholdPolicy::new(0).is_err());
    }

    #[test]
    fn preferred_node_cases() {
        let span = [NodeId(1), NodeId(2)];
        assert_eq!(preferred_node(&view(0, 4, &[0, 4], &span[..1])), Ok(NodeId(1)));
        assert_eq!(preferred_node(&view(0, 10, &[0, 5, 5], &span)), Ok(NodeId(1)));
        assert_eq!(preferred_node(&view(0, 10, &[0, 3, 7], &span)), Ok(NodeId(2)));
        assert_eq!(preferred_node(&view(0, 0, &[0, 0, 0], &span)), Err(SimError::NoPreference));
    }

    #[test]
    fn parse_specs() {
        assert_eq!(PolicySpec::parse("never").unwrap(), PolicySpec::Never);
        assert_eq!(PolicySpec::parse("32").unwrap(), PolicySpec::Threshold(32));
        assert_eq!(PolicySpec::parse("threshold:8K").unwrap(), PolicySpec::Threshold(8192));
        assert_eq!(PolicySpec::parse("4M").unwrap(), PolicySpec::Threshold(4_194_304));
        assert_eq!(PolicySpec::parse("inf").unwrap(), PolicySpec::INFINITE);
        assert!(PolicySpec::parse("0").is_err());
        assert!(PolicySpec::parse("x12").is_err());
        assert_eq!(PolicySpec::parse(&PolicySpec::INFINITE.to_string()).unwrap(), PolicySpec::INFINITE);
    }

    proptest::proptest! {
        #[test]
        fn decisions_are_pure(counter in 0u64..100, t in 1u64..100, a in 0u64..50, b in 0u64..50) {
            let p = ThresholdPolicy::new(t).unwrap();
            let span = [NodeId(1), NodeId(2)];
            let tally = [0, a, b];
            let v = view(0, counter, &tally, &span);
            let first = p.on_remote_fault(&v);
            proptest::prop_assert_eq!(first, p.on_remote_fault(&v));
            if let PolicyDecision::JumpTo(n) = first {
                proptest::prop_assert_ne!(n, NodeId(0));
                proptest::prop_assert!(counter >= t);
            }
        }
    }
}
