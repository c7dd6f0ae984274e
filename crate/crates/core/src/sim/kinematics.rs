use crate::geometry::{angle_diff, normalize_angle, rotation_yaw, Pose, Vec3};

/// Ground robots follow unicycle kinematics; aerial robots translate in any
/// direction and yaw independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionLimits {
    pub max_speed: f64,
    pub max_yaw_rate: f64,
    pub holonomic: bool,
}

impl MotionLimits {
    pub fn ugv() -> Self {
        Self { max_speed: 0.7, max_yaw_rate: 1.0, holonomic: false }
    }

    pub fn uav() -> Self {
        Self { max_speed: 1.5, max_yaw_rate: 1.0, holonomic: true }
    }
}

/// Body-frame velocity command. Ground robots ignore `vy` and `vz`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Command {
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub yaw_rate: f64,
}

/// Tilt an aerial robot shows per m/s of body velocity.
const TILT_PER_SPEED: f64 = 0.03;

/// Advances the true pose by one step of length `dt` with the command
/// clamped to the limits. The displacement never exceeds `max_speed * dt`.
pub fn step(pose: &Pose, cmd: &Command, lim: &MotionLimits, dt: f64) -> Pose {
    let w = cmd.yaw_rate.clamp(-lim.max_yaw_rate, lim.max_yaw_rate);
    if lim.holonomic {
        let mut v = Vec3::new(cmd.vx, cmd.vy, cmd.vz);
        let n = v.norm();
        if n > lim.max_speed {
            v *= lim.max_speed / n;
        }
        let d = rotation_yaw(pose.yaw) * Vec3::new(v.x, v.y, 0.0) * dt;
        Pose::new(
            pose.x + d.x,
            pose.y + d.y,
            pose.z + v.z * dt,
            -TILT_PER_SPEED * v.y,
            TILT_PER_SPEED * v.x,
            pose.yaw + w * dt,
        )
    } else {
        let v = cmd.vx.clamp(-lim.max_speed, lim.max_speed);
        let mid = pose.yaw + 0.5 * w * dt;
        Pose::new(
            pose.x + v * mid.cos() * dt,
            pose.y + v * mid.sin() * dt,
            pose.z,
            0.0,
            0.0,
            pose.yaw + w * dt,
        )
    }
}

/// Progress along a polyline, tracked from the estimated position.
#[derive(Debug, Clone, PartialEq)]
pub struct Pursuit {
    pub path: Vec<Vec3>,
    segment: usize,
}

impl Pursuit {
    pub fn new(path: Vec<Vec3>) -> Self {
        Self { path, segment: 0 }
    }

    pub fn goal(&self) -> Option<Vec3> {
        self.path.last().copied()
    }

    fn project_on(&self, p: &Vec3, s: usize) -> f64 {
        let (a, b) = (self.path[s], self.path[s + 1]);
        let ab = b - a;
        let l2 = ab.norm_squared();
        if l2 == 0.0 {
            1.0
        } else {
            ((p - a).dot(&ab) / l2).clamp(0.0, 1.0)
        }
    }

    /// Remaining polyline from the closest point onward.
    pub fn remaining(&mut self, p: &Vec3) -> Vec<Vec3> {
        if self.path.len() < 2 {
            return self.path.clone();
        }
        self.advance(p);
        let s = self.segment;
        let t = self.project_on(p, s);
        let a = self.path[s] + (self.path[s + 1] - self.path[s]) * t;
        std::iter::once(a).chain(self.path[s + 1..].iter().copied()).collect()
    }

    fn advance(&mut self, p: &Vec3) {
        while self.segment + 2 < self.path.len() && self.project_on(p, self.segment) >= 1.0 {
            self.segment += 1;
        }
    }

    /// Point `lookahead` metres along the path beyond the projection of `p`.
    pub fn carrot(&mut self, p: &Vec3, lookahead: f64) -> Vec3 {
        if self.path.len() < 2 {
            return self.path.first().copied().unwrap_or(*p);
        }
        let rem = self.remaining(p);
        let mut left = lookahead;
        for w in rem.windows(2) {
            let l = (w[1] - w[0]).norm();
            if l >= left {
                return w[0] + (w[1] - w[0]) * (left / l.max(1e-12));
            }
            left -= l;
        }
        *rem.last().expect("non-empty")
    }
}

/// Velocity command steering the estimated pose toward `carrot`, slowing
/// down within `brake` metres of the final goal.
pub fn pursue(est: &Pose, carrot: &Vec3, goal: &Vec3, lim: &MotionLimits, brake: f64) -> Command {
    let to = carrot - est.position();
    let speed = lim.max_speed.min(lim.max_speed * (goal - est.position()).norm() / brake.max(1e-9));
    let horiz = (to.x * to.x + to.y * to.y).sqrt();
    let heading = if horiz > 1e-3 { to.y.atan2(to.x) } else { est.yaw };
    let err = angle_diff(heading, est.yaw);
    let yaw_rate = (2.0 * err).clamp(-lim.max_yaw_rate, lim.max_yaw_rate);
    if lim.holonomic {
        let body = rotation_yaw(-est.yaw) * to;
        let n = body.norm();
        let v = if n > 1e-9 { body * (speed / n) } else { Vec3::zeros() };
        Command { vx: v.x, vy: v.y, vz: v.z, yaw_rate }
    } else if err.abs() > 60f64.to_radians() {
        Command { yaw_rate, ..Default::default() }
    } else {
        let v = speed * err.cos().max(0.0);
        let curv = if horiz > 1e-6 { 2.0 * err.sin() / horiz } else { 0.0 };
        let w = (v * curv).clamp(-lim.max_yaw_rate, lim.max_yaw_rate);
        Command { vx: v, yaw_rate: if v > 1e-6 { w } else { yaw_rate }, ..Default::default() }
    }
}

/// Turn-in-place command toward `target`.
pub fn face(est: &Pose, target: &Vec3, lim: &MotionLimits) -> (Command, f64) {
    let d = target - est.position();
    let err = angle_diff(d.y.atan2(d.x), est.yaw);
    let cmd = Command { yaw_rate: (2.0 * err).clamp(-lim.max_yaw_rate, lim.max_yaw_rate), ..Default::default() };
    (cmd, err)
}

/// Scripted motion on ground truth: turn toward the next waypoint at the
/// yaw-rate limit, then fly straight at `speed`.
pub fn scripted_step(pose: &Pose, target: &Vec3, speed: f64, lim: &MotionLimits, dt: f64) -> Pose {
    let d = target - pose.position();
    let horiz = (d.x * d.x + d.y * d.y).sqrt();
    if horiz > 1e-9 {
        let err = angle_diff(d.y.atan2(d.x), pose.yaw);
        let max_turn = lim.max_yaw_rate * dt;
        if err.abs() > 1e-9 {
            let turn = err.clamp(-max_turn, max_turn);
            return Pose::new(pose.x, pose.y, pose.z, 0.0, 0.0, normalize_angle(pose.yaw + turn));
        }
    }
    let n = d.norm();
    let s = speed.min(lim.max_speed) * dt;
    let p = if n <= s { *target } else { pose.position() + d * (s / n) };
    Pose::new(p.x, p.y, p.z, 0.0, 0.0, pose.yaw)
}
