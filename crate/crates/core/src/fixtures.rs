//! Small maps and diagrams with known homology, used by tests, examples and
//! the command line.

use crate::cylinder::{SemialgebraicMapDesc, ZigzagDiagramDesc};
use crate::error::Result;
use crate::formula::Formula;
use crate::parse::parse_formula;
use crate::vars::VarList;

fn over(text: &str, vars: &VarList) -> Result<Formula> {
    parse_formula(text, vars)
}

/// `f(x) = y` over the standard names `x1..xk, y1..ym`.
pub fn map_desc(k: usize, m: usize, phi_s: &str, phi_t: &str, phi_f: &str) -> Result<SemialgebraicMapDesc> {
    let xs = VarList::numbered("x", k);
    let ys = VarList::numbered("y", m);
    let xy = xs.concat(&ys);
    SemialgebraicMapDesc::new(k, m, over(phi_s, &xs)?, over(phi_t, &ys)?, over(phi_f, &xy)?)
}

/// A zigzag over `x1..xk`, graphs over `x1..xk, y1..yk`.
pub fn diagram_desc(k: usize, phi: &[&str], psi: &[&str]) -> Result<ZigzagDiagramDesc> {
    let xs = VarList::numbered("x", k);
    let xy = xs.concat(&VarList::numbered("y", k));
    let phi = phi.iter().map(|t| over(t, &xs)).collect::<Result<Vec<_>>>()?;
    let psi = psi.iter().map(|t| over(t, &xy)).collect::<Result<Vec<_>>>()?;
    ZigzagDiagramDesc::new(k, phi, psi)
}

pub const CIRCLE: &str = "x1^2 + x2^2 - 1 = 0";
pub const DISK: &str = "x1^2 + x2^2 - 1 <= 0";
pub const IDENTITY_2: &str = "y1 - x1 = 0 and y2 - x2 = 0";

/// The identity of the one-point set `{0}`.
pub fn point_identity() -> Result<SemialgebraicMapDesc> {
    map_desc(1, 1, "x1 = 0", "y1 = 0", "x1 = 0 and y1 - x1 = 0")
}

/// The unit circle included in the closed unit disk.
pub fn circle_to_disk() -> Result<SemialgebraicMapDesc> {
    map_desc(2, 2, CIRCLE, "y1^2 + y2^2 - 1 <= 0", IDENTITY_2)
}

/// The unit circle mapped to the point `0` of the line.
pub fn circle_to_point() -> Result<SemialgebraicMapDesc> {
    map_desc(2, 1, CIRCLE, "y1 = 0", "y1 = 0")
}

/// The projection `(x, y, z) -> (x, y)` restricted to the blow-up surface
/// `y = z x` with `0 <= x <= 1`, `|z| <= 1`, onto the wedge `|y| <= x <= 1`.
/// Both sides are contractible but the fibre over the origin is a segment.
pub fn blow_down() -> Result<SemialgebraicMapDesc> {
    map_desc(
        3,
        2,
        "x2 - x3*x1 = 0 and x1 >= 0 and x1 - 1 <= 0 and x3^2 - 1 <= 0",
        "y1 - 1 <= 0 and y2 - y1 <= 0 and y2 + y1 >= 0",
        "y1 - x1 = 0 and y2 - x2 = 0",
    )
}

/// `circle <-id- circle -incl-> disk`.
pub fn circle_circle_disk() -> Result<ZigzagDiagramDesc> {
    diagram_desc(2, &[CIRCLE, CIRCLE, DISK], &[IDENTITY_2, IDENTITY_2])
}

/// `point <- point -> point` on the line.
pub fn point_zigzag() -> Result<ZigzagDiagramDesc> {
    diagram_desc(1, &["x1 = 0", "x1 = 0", "x1 = 0"], &["x1 = 0 and y1 = 0", "x1 = 0 and y1 = 0"])
}

/// `n` identities of the unit circle.
pub fn circle_identities(n: usize) -> Result<ZigzagDiagramDesc> {
    diagram_desc(2, &vec![CIRCLE; n + 1], &vec![IDENTITY_2; n])
}

/// Two points on the line, `{-1, 1} <- {-1, 1} -> {0}` (the right map merges
/// them), padded by identities of `{0}` up to length `n >= 2`.
pub fn merging_points(n: usize) -> Result<ZigzagDiagramDesc> {
    let two = "x1^2 - 1 = 0";
    let one = "x1 = 0";
    let mut phi = vec![two, two];
    phi.resize(n + 1, one);
    let mut psi = vec!["y1 - x1 = 0", "y1 = 0"];
    psi.resize(n, "y1 - x1 = 0");
    diagram_desc(1, &phi, &psi)
}
