//! Points, directions, angle algebra and isometries over Q(sqrt 3).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("zero direction pair")]
    ZeroTurn,
    #[error("rotation pair does not satisfy c^2 + s^2 = 1")]
    NotUnit,
    #[error("segments have different lengths")]
    LengthMismatch,
    #[error("degenerate polygon: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

/// Displacements share the point representation.
pub type Vector = Point;

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point::new(Scalar::int(x), Scalar::int(y))
    }

    pub fn frac(x: (i64, i64), y: (i64, i64)) -> Self {
        Point::new(Scalar::frac(x.0, x.1), Scalar::frac(y.0, y.1))
    }

    pub fn origin() -> Self {
        Point::default()
    }

    pub fn dot(&self, o: &Point) -> Scalar {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point) -> Scalar {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> Scalar {
        self.dot(self)
    }

    pub fn dist2(&self, o: &Point) -> Scalar {
        (o - self).norm2()
    }

    pub fn scale(&self, k: &Scalar) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    /// Left normal `(-y, x)`.
    pub fn perp(&self) -> Point {
        Point::new(-&self.y, self.x.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn midpoint(&self, o: &Point) -> Point {
        Point::new((&self.x + &o.x).half(), (&self.y + &o.y).half())
    }

    pub fn lerp(&self, o: &Point, t: &Scalar) -> Point {
        self + &(o - self).scale(t)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl<'a> Add<&'a Point> for &'a Point {
    type Output = Point;
    fn add(self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a Point> for &'a Point {
    type Output = Point;
    fn sub(self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        &self + &o
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        &self - &o
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-&self.x, -&self.y)
    }
}

/// Orientation of the triple `(a, b, c)`: sign of `(b - a) x (c - a)`.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Ordering {
    (b - a).cross(&(c - a)).signum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnClass {
    Zero,
    Ccw,
    Straight,
    Cw,
}

/// An angle held as an unnormalised direction pair `(dot, cross)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Turn {
    dot: Scalar,
    cross: Scalar,
}

impl fmt::Debug for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Turn({:.6} deg)", self.degrees_f64())
    }
}

impl Turn {
    pub fn new(dot: Scalar, cross: Scalar) -> Result<Self, GeometryError> {
        if dot.is_zero() && cross.is_zero() {
            return Err(GeometryError::ZeroTurn);
        }
        Ok(Turn { dot, cross })
    }

    pub fn zero() -> Self {
        Turn { dot: Scalar::one(), cross: Scalar::zero() }
    }

    pub fn straight() -> Self {
        Turn { dot: Scalar::int(-1), cross: Scalar::zero() }
    }

    pub fn quarter() -> Self {
        Turn { dot: Scalar::zero(), cross: Scalar::one() }
    }

    /// Direction of a vector measured from the positive x axis.
    pub fn of_vector(v: &Vector) -> Result<Self, GeometryError> {
        Turn::new(v.x.clone(), v.y.clone())
    }

    /// Counter-clockwise angle carrying direction `u` onto direction `v`.
    pub fn between(u: &Vector, v: &Vector) -> Result<Self, GeometryError> {
        if u.is_zero() || v.is_zero() {
            return Err(GeometryError::ZeroTurn);
        }
        Turn::new(u.dot(v), u.cross(v))
    }

    pub fn dot(&self) -> &Scalar {
        &self.dot
    }

    pub fn cross(&self) -> &Scalar {
        &self.cross
    }

    pub fn as_vector(&self) -> Vector {
        Point::new(self.dot.clone(), self.cross.clone())
    }

    /// Angle addition: the complex product of the two pairs.
    pub fn add(&self, o: &Turn) -> Turn {
        Turn {
            dot: &self.dot * &o.dot - &self.cross * &o.cross,
            cross: &self.dot * &o.cross + &self.cross * &o.dot,
        }
    }

    pub fn negate(&self) -> Turn {
        Turn { dot: self.dot.clone(), cross: -&self.cross }
    }

    pub fn sub(&self, o: &Turn) -> Turn {
        self.add(&o.negate())
    }

    /// `180 deg - self`.
    pub fn supplement(&self) -> Turn {
        Turn::straight().sub(self)
    }

    pub fn classify(&self) -> TurnClass {
        match self.cross.signum() {
            Ordering::Greater => TurnClass::Ccw,
            Ordering::Less => TurnClass::Cw,
            Ordering::Equal => {
                if self.dot.is_positive() {
                    TurnClass::Zero
                } else {
                    TurnClass::Straight
                }
            }
        }
    }

    /// Equality of angles modulo a full turn.
    pub fn same_angle(&self, o: &Turn) -> bool {
        let c = &self.dot * &o.cross - &self.cross * &o.dot;
        c.is_zero() && (&self.dot * &o.dot + &self.cross * &o.cross).is_positive()
    }

    fn upper(&self) -> bool {
        self.cross.is_positive() || (self.cross.is_zero() && self.dot.is_positive())
    }

    pub fn degrees_f64(&self) -> f64 {
        let a = self.cross.to_f64().atan2(self.dot.to_f64()).to_degrees();
        if a < 0.0 {
            a + 360.0
        } else {
            a
        }
    }

    /// Orders angles in `[0, 360)`. A float comparison settles clearly
    /// separated cases; near ties fall back to the exact half-plane test.
    pub fn cmp_angle(&self, o: &Turn) -> Ordering {
        let (a, b) = (self.degrees_f64(), o.degrees_f64());
        if (a - b).abs() > 1e-7 && a.is_finite() && b.is_finite() {
            return a.partial_cmp(&b).unwrap_or(Ordering::Equal);
        }
        self.cmp_angle_exact(o)
    }

    pub fn cmp_angle_exact(&self, o: &Turn) -> Ordering {
        match (self.upper(), o.upper()) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => {
                let c = &self.dot * &o.cross - &self.cross * &o.dot;
                match c.signum() {
                    Ordering::Greater => Ordering::Less,
                    Ordering::Less => Ordering::Greater,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Squared cosine of the angle as an exact field element.
    pub fn cos2(&self) -> Scalar {
        let d2 = self.dot.square();
        d2.checked_div(&(&d2 + &self.cross.square())).expect("nonzero turn")
    }
}

/// A non-negative angle total: whole windings plus a residual in `[0, 360)`.
#[derive(Clone, Debug)]
pub struct AngleSum {
    pub windings: u32,
    pub residual: Turn,
}

impl Default for AngleSum {
    fn default() -> Self {
        AngleSum { windings: 0, residual: Turn::zero() }
    }
}

impl AngleSum {
    pub fn of(t: &Turn) -> Self {
        AngleSum { windings: 0, residual: t.clone() }
    }

    /// Adds an angle taken in `[0, 360)`.
    pub fn add(&self, t: &Turn) -> AngleSum {
        let r = self.residual.add(t);
        let wrapped = r.cmp_angle(&self.residual) == Ordering::Less;
        AngleSum { windings: self.windings + wrapped as u32, residual: r }
    }

    pub fn add_sum(&self, o: &AngleSum) -> AngleSum {
        let mut s = self.add(&o.residual);
        s.windings += o.windings;
        s
    }

    pub fn is_full(&self) -> bool {
        self.windings == 1 && self.residual.classify() == TurnClass::Zero
    }

    pub fn is_half(&self) -> bool {
        self.windings == 0 && self.residual.classify() == TurnClass::Straight
    }

    pub fn equals(&self, o: &AngleSum) -> bool {
        self.windings == o.windings && self.residual.same_angle(&o.residual)
    }

    pub fn cmp(&self, o: &AngleSum) -> Ordering {
        self.windings.cmp(&o.windings).then_with(|| self.residual.cmp_angle(&o.residual))
    }

    pub fn degrees_f64(&self) -> f64 {
        360.0 * self.windings as f64 + self.residual.degrees_f64()
    }
}

/// `p -> R(c, s) * F(p) + t`, where `F` mirrors in the x axis when `reflected`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub c: Scalar,
    pub s: Scalar,
    pub t: Vector,
    pub reflected: bool,
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Iso(c={}, s={}, t={:?}, refl={})", self.c, self.s, self.t, self.reflected)
    }
}

impl Default for Isometry {
    fn default() -> Self {
        Isometry::identity()
    }
}

impl Isometry {
    pub fn new(c: Scalar, s: Scalar, t: Vector, reflected: bool) -> Result<Self, GeometryError> {
        let g = Isometry { c, s, t, reflected };
        if !g.is_valid() {
            return Err(GeometryError::NotUnit);
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        Isometry { c: Scalar::one(), s: Scalar::zero(), t: Point::origin(), reflected: false }
    }

    pub fn translation(t: Vector) -> Self {
        Isometry { t, ..Isometry::identity() }
    }

    /// Rotation about the origin by a unit direction pair.
    pub fn rotation(c: Scalar, s: Scalar) -> Result<Self, GeometryError> {
        Isometry::new(c, s, Point::origin(), false)
    }

    /// Rotation by `k * 30` degrees about `centre`.
    pub fn rotation_30(k: i64, centre: &Point) -> Self {
        let (c, s) = rot30(k);
        let r = Isometry { c, s, t: Point::origin(), reflected: false };
        Isometry::translation(centre.clone())
            .compose(&r)
            .compose(&Isometry::translation(-centre))
    }

    pub fn mirror_x() -> Self {
        Isometry { reflected: true, ..Isometry::identity() }
    }

    pub fn is_valid(&self) -> bool {
        (&self.c.square() + &self.s.square()) == Scalar::one()
    }

    pub fn linear(&self, p: &Vector) -> Vector {
        let y = if self.reflected { -&p.y } else { p.y.clone() };
        Point::new(&self.c * &p.x - &self.s * &y, &self.s * &p.x + &self.c * &y)
    }

    pub fn apply(&self, p: &Point) -> Point {
        &self.linear(p) + &self.t
    }

    /// `self o other`: apply `other` first.
    pub fn compose(&self, o: &Isometry) -> Isometry {
        let os = if self.reflected { -&o.s } else { o.s.clone() };
        Isometry {
            c: &self.c * &o.c - &self.s * &os,
            s: &self.s * &o.c + &self.c * &os,
            t: self.apply(&o.t),
            reflected: self.reflected ^ o.reflected,
        }
    }

    pub fn inverse(&self) -> Isometry {
        let (c, s) = if self.reflected {
            (self.c.clone(), self.s.clone())
        } else {
            (self.c.clone(), -&self.s)
        };
        let lin = Isometry { c, s, t: Point::origin(), reflected: self.reflected };
        let t = -&lin.apply(&self.t);
        Isometry { t, ..lin }
    }

    /// The isometry carrying segment `a0 a1` onto `b0 b1` (equal lengths
    /// required), optionally reflecting first.
    pub fn align(a0: &Point, a1: &Point, b0: &Point, b1: &Point, reflected: bool) -> Result<Self, GeometryError> {
        let f = Isometry { reflected, ..Isometry::identity() };
        let u = f.linear(&(a1 - a0));
        let v = b1 - b0;
        let l2 = u.norm2();
        if l2.is_zero() {
            return Err(GeometryError::ZeroTurn);
        }
        if l2 != v.norm2() {
            return Err(GeometryError::LengthMismatch);
        }
        let c = u.dot(&v).checked_div(&l2)?;
        let s = u.cross(&v).checked_div(&l2)?;
        let lin = Isometry { c, s, t: Point::origin(), reflected };
        let t = b0 - &lin.apply(a0);
        Ok(Isometry { t, ..lin })
    }
}

/// `(cos, sin)` of `k * 30` degrees.
pub fn rot30(k: i64) -> (Scalar, Scalar) {
    let half = Scalar::frac(1, 2);
    let r3h = Scalar::quad((0, 1), (1, 2));
    let table = [
        (Scalar::one(), Scalar::zero()),
        (r3h.clone(), half.clone()),
        (half.clone(), r3h.clone()),
        (Scalar::zero(), Scalar::one()),
    ];
    let k = k.rem_euclid(12) as usize;
    let (c, s) = table[k % 3].clone();
    // rotate by 90 * (k / 3)
    match k / 3 {
        0 => (c, s),
        1 => (-&s, c),
        2 => (-&c, -&s),
        _ => (s, -&c),
    }
}

/// Rotate `p` about `centre` by the unit pair `(c, s)`.
pub fn rotate_about(p: &Point, centre: &Point, c: &Scalar, s: &Scalar) -> Point {
    let d = p - centre;
    let r = Point::new(c * &d.x - s * &d.y, s * &d.x + c * &d.y);
    &r + centre
}
