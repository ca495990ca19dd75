//! Frictionless single-pole cart with bang-bang force.

use std::ops::Neg;

use rand::Rng;

/// Track half-length; `|x|` beyond this is a failure.
pub const X_LIMIT: f64 = 2.4;
/// Pole angle limit in degrees; `|θ|` beyond this is a failure.
pub const THETA_LIMIT_DEG: f64 = 12.0;

/// A closed interval of one state variable, in the units a user sees
/// (metres, degrees, m/s, degrees/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarRange {
    pub min: f64,
    pub max: f64,
}

impl VarRange {
    pub const fn symmetric(half: f64) -> Self {
        VarRange { min: -half, max: half }
    }

    /// `min + t·(max − min)`.
    pub fn denormalize(&self, t: f64) -> f64 {
        self.min + t * (self.max - self.min)
    }

    /// `(v − min)/(max − min)`, after clamping `v` into the range.
    pub fn normalize(&self, v: f64) -> f64 {
        (v.clamp(self.min, self.max) - self.min) / (self.max - self.min)
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.min..=self.max).contains(&v)
    }
}

/// Ranges of (x, θ, ẋ, θ̇) used for random starts, input scaling and the
/// generalization grid. Angles are in degrees here.
pub const STATE_RANGES: [VarRange; 4] = [
    VarRange::symmetric(2.4),
    VarRange::symmetric(12.0),
    VarRange::symmetric(1.0),
    VarRange::symmetric(1.5),
];

/// Cart position/velocity and pole angle/angular velocity (radians).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartState {
    pub x: f64,
    pub theta: f64,
    pub x_dot: f64,
    pub theta_dot: f64,
}

impl CartState {
    /// Builds a state from (m, degrees, m/s, degrees/s).
    pub fn from_display(values: [f64; 4]) -> Self {
        CartState {
            x: values[0],
            theta: values[1].to_radians(),
            x_dot: values[2],
            theta_dot: values[3].to_radians(),
        }
    }

    /// (m, degrees, m/s, degrees/s).
    pub fn to_display(&self) -> [f64; 4] {
        [self.x, self.theta.to_degrees(), self.x_dot, self.theta_dot.to_degrees()]
    }

    pub fn is_failure(&self) -> bool {
        self.x.abs() > X_LIMIT || self.theta.abs() > THETA_LIMIT_DEG.to_radians()
    }

    /// Uniform draw over [`STATE_RANGES`].
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut v = [0.0; 4];
        for (slot, range) in v.iter_mut().zip(STATE_RANGES) {
            *slot = rng.gen_range(range.min..=range.max);
        }
        CartState::from_display(v)
    }
}

impl Neg for CartState {
    type Output = CartState;

    fn neg(self) -> CartState {
        CartState {
            x: -self.x,
            theta: -self.theta,
            x_dot: -self.x_dot,
            theta_dot: -self.theta_dot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Left,
    Right,
}

impl Action {
    pub fn mirror(self) -> Action {
        match self {
            Action::Left => Action::Right,
            Action::Right => Action::Left,
        }
    }

    pub fn force(self, params: &CartParams) -> f64 {
        match self {
            Action::Left => -params.force_mag,
            Action::Right => params.force_mag,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Action::Left => 'L',
            Action::Right => 'R',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartParams {
    pub gravity: f64,
    /// Half the pole length.
    pub half_length: f64,
    pub pole_mass: f64,
    pub cart_mass: f64,
    pub force_mag: f64,
    pub dt: f64,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            gravity: 9.8,
            half_length: 0.5,
            pole_mass: 0.1,
            cart_mass: 1.0,
            force_mag: 10.0,
            dt: 0.02,
        }
    }
}

impl CartParams {
    pub fn validate(&self) -> crate::Result<()> {
        let fields = [
            ("gravity", self.gravity),
            ("pole half-length", self.half_length),
            ("pole mass", self.pole_mass),
            ("cart mass", self.cart_mass),
            ("force", self.force_mag),
            ("dt", self.dt),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Angular and linear accelerations `(θ̈, ẍ)` under horizontal force `force`.
    pub fn accelerations(&self, s: &CartState, force: f64) -> (f64, f64) {
        let total = self.cart_mass + self.pole_mass;
        let pml = self.pole_mass * self.half_length;
        let (sin, cos) = s.theta.sin_cos();
        let temp = (force + pml * s.theta_dot * s.theta_dot * sin) / total;
        let theta_acc =
            (self.gravity * sin - cos * temp) / (self.half_length * (4.0 / 3.0 - self.pole_mass * cos * cos / total));
        let x_acc = temp - pml * theta_acc * cos / total;
        (theta_acc, x_acc)
    }

    /// One explicit Euler step of length `dt`; positions advance with the
    /// pre-step velocities.
    pub fn step(&self, s: &CartState, action: Action) -> CartState {
        let (theta_acc, x_acc) = self.accelerations(s, action.force(self));
        CartState {
            x: s.x + self.dt * s.x_dot,
            x_dot: s.x_dot + self.dt * x_acc,
            theta: s.theta + self.dt * s.theta_dot,
            theta_dot: s.theta_dot + self.dt * theta_acc,
        }
    }
}
