use super::{BtError, BtNode, DecoratorKind};
use crate::geometry::{format_vec3, Vec3};

/// Explore while watching for fire; once a fire is confirmed, approach and
/// extinguish it. The body is wrapped in `ForceSuccess` under a time limit
/// so the robot always heads home afterwards.
pub fn build_fire_mission_tree(
    role: &str,
    waypoints: &[Vec3],
    home: &Vec3,
    timeout_ticks: u64,
) -> Result<BtNode, BtError> {
    if waypoints.is_empty() {
        return Err(BtError::Arity("mission needs at least one exploration waypoint".into()));
    }
    let wps: Vec<String> = waypoints.iter().map(format_vec3).collect();
    let explore = BtNode::Leaf { task: "explore".into(), args: wps };
    let detect = BtNode::leaf("detect_fire", &[role]);
    let body = BtNode::Sequence(vec![
        BtNode::Parallel { threshold: 1, children: vec![explore, detect] },
        BtNode::leaf("check_fire_found", &[]),
        BtNode::leaf("approach_fire", &[]),
        BtNode::leaf("extinguish", &[]),
    ]);
    let guarded = BtNode::decorate(
        DecoratorKind::ForceSuccess,
        BtNode::decorate(DecoratorKind::Timeout(timeout_ticks), body),
    );
    let root = BtNode::Sequence(vec![guarded, BtNode::leaf("go_home", &[&format_vec3(home)])]);
    root.validate()?;
    Ok(root)
}
