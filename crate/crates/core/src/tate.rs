//! Tate's algorithm over Q, at a single prime, for integral Weierstrass
//! models. Implemented in full generality of the coefficient vector
//! `[a1, a2, a3, a4, a6]` (the translations in the middle steps leave the
//! short shape), but only ever driven with curves `y^2 = x^3 + D`.
//!
//! Normalizing translations are found by closed form at odd primes and by
//! exhaustive residue search at `p = 2`; every claimed exact division is
//! checked.

use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    /// Number of irreducible components of the special fiber, as in the
    /// conductor formula of Ogg–Saito.
    pub fn components(&self) -> u32 {
        match self {
            Kodaira::I0 => 1,
            Kodaira::In(m) => *m,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::I0Star => 5,
            Kodaira::InStar(m) => 5 + m,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }
}

impl std::fmt::Display for Kodaira {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::In(m) => write!(f, "I{m}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::InStar(m) => write!(f, "I{m}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TateOutcome {
    pub kodaira: Kodaira,
    pub tamagawa: u32,
    pub conductor_exp: u32,
    pub v_disc_min: u32,
    /// How many times the model was unscaled by `u = p`.
    pub scaling_steps: u32,
}

struct Model {
    a: [BigInt; 5], // a1, a2, a3, a4, a6
}

impl Model {
    fn b_values(&self) -> (BigInt, BigInt, BigInt, BigInt, BigInt) {
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2: BigInt = a1 * a1 + 4 * a2;
        let b4: BigInt = 2 * a4 + a1 * a3;
        let b6: BigInt = a3 * a3 + 4 * a6;
        let b8: BigInt = a1 * a1 * a6 + 4 * (a2 * a6) - a1 * a3 * a4 + a2 * (a3 * a3) - a4 * a4;
        let disc: BigInt =
            -(&b2 * &b2 * &b8) - 8 * b4.pow(3) - 27 * (&b6 * &b6) + 9 * (&b2 * &b4 * &b6);
        (b2, b4, b6, b8, disc)
    }

    /// Coordinate change x = x' + r, y = y' + s x' + t.
    fn translate(&mut self, r: &BigInt, s: &BigInt, t: &BigInt) {
        let [a1, a2, a3, a4, a6] = self.a.clone();
        self.a[0] = &a1 + 2 * s;
        self.a[1] = &a2 - s * &a1 + 3 * r - s * s;
        self.a[2] = &a3 + r * &a1 + 2 * t;
        self.a[3] = &a4 - s * &a3 + 2 * (r * &a2) - (t + r * s) * &a1 + 3 * (r * r) - 2 * (s * t);
        self.a[4] = &a6 + r * &a4 + r * r * &a2 + r.pow(3) - t * &a3 - t * t - r * (t * &a1);
    }

    /// Unscale by u = p; panics if the model is not divisible accordingly.
    fn unscale(&mut self, p: u64) {
        let pb = BigInt::from(p);
        for (i, e) in [1u32, 2, 3, 4, 6].iter().enumerate() {
            let d = pb.pow(*e);
            let (q, r) = num_integer::Integer::div_rem(&self.a[i], &d);
            assert!(r.is_zero(), "non-minimal unscaling failed");
            self.a[i] = q;
        }
    }
}

fn vp(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        return u32::MAX; // zero counts as divisible by everything
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&y, &pb);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

fn modp(x: &BigInt, p: u64) -> u64 {
    num_integer::Integer::mod_floor(x, &BigInt::from(p))
        .to_u64()
        .unwrap()
}

fn div_exact(x: &BigInt, p: u64, e: u32) -> BigInt {
    let d = BigInt::from(p).pow(e);
    let (q, r) = num_integer::Integer::div_rem(x, &d);
    assert!(r.is_zero(), "expected p^{e} to divide");
    q
}

/// Roots over `F_p` of the monic cubic `T^3 + c2 T^2 + c1 T + c0`, plus a
/// multiple root with its multiplicity when one exists.
fn cubic_roots_modp(c2: u64, c1: u64, c0: u64, p: u64) -> (Vec<u64>, Option<(u64, u32)>) {
    use crate::intutil::mul_mod_u64 as mm;
    let eval = |t: u64| (mm(t, mm(t, t, p), p) + mm(c2 % p, mm(t, t, p), p) + mm(c1 % p, t, p) + c0 % p) % p;
    let mut roots = Vec::new();
    for t in 0..p {
        if eval(t) == 0 {
            roots.push(t);
        }
    }
    // triple root t0 iff the cubic equals (T - t0)^3
    for &t0 in &roots {
        let neg = |x: u64| (p - x % p) % p;
        let e2 = neg(mm(3 % p, t0, p));
        let e1 = mm(3 % p, mm(t0, t0, p), p);
        let e0 = neg(mm(t0, mm(t0, t0, p), p));
        if (c2 % p, c1 % p, c0 % p) == (e2, e1, e0) {
            return (roots, Some((t0, 3)));
        }
    }
    // double root: the derivative 3T^2 + 2 c2 T + c1 also vanishes
    for &t0 in &roots {
        let d = (mm(3 % p, mm(t0, t0, p), p) + mm((2 * (c2 % p)) % p, t0, p) + c1 % p) % p;
        if d == 0 {
            return (roots, Some((t0, 2)));
        }
    }
    (roots, None)
}

/// First root over `F_p` of `a Y^2 + b Y + c`, if any.
fn quadratic_root_modp(a: u64, b: u64, c: u64, p: u64) -> Option<u64> {
    use crate::intutil::mul_mod_u64 as mm;
    (0..p).find(|&y| (mm(a % p, mm(y, y, p), p) + mm(b % p, y, p) + c % p) % p == 0)
}

/// Whether `a Y^2 + b Y + c` has distinct roots over the algebraic closure
/// of `F_p`.
fn quadratic_separable(a: u64, b: u64, c: u64, p: u64) -> bool {
    if p == 2 {
        return b % 2 != 0; // char 2: inseparable iff linear term vanishes
    }
    let disc = ((b % p) as i128) * ((b % p) as i128) - 4 * ((a % p) as i128) * ((c % p) as i128);
    disc.rem_euclid(p as i128) != 0
}

/// Full Tate's algorithm for the model `[a1, a2, a3, a4, a6]` at `p`.
pub fn tate_local(a_in: [BigInt; 5], p: u64) -> Result<TateOutcome> {
    let mut model = Model { a: a_in };
    let mut scaling_steps = 0u32;
    loop {
        let (_, _, _, _, disc) = model.b_values();
        if disc.is_zero() {
            return Err(Error::InvalidInput("singular curve (disc = 0)".into()));
        }
        let n = vp(&disc, p);
        if n == 0 {
            return Ok(TateOutcome {
                kodaira: Kodaira::I0,
                tamagawa: 1,
                conductor_exp: 0,
                v_disc_min: 0,
                scaling_steps,
            });
        }

        // Step 2: move the singular point of the reduction to the origin.
        move_singular_to_origin(&mut model, p)?;
        let (b2, _, b6, b8, _) = model.b_values();

        if vp(&b2, p) == 0 {
            // multiplicative: type I_n; split iff T^2 + a1 T - a2 splits
            let a1 = modp(&model.a[0], p);
            let a2 = modp(&model.a[1], p);
            let split = if p == 2 {
                a2 % 2 == 0 || (1 + a1 + a2) % 2 == 0
            } else {
                let d = (((a1 as i128) * (a1 as i128) + 4 * a2 as i128) % p as i128) as i64;
                crate::intutil::kronecker(d, p as i64) >= 0
            };
            let c = if split {
                n
            } else if n % 2 == 0 {
                2
            } else {
                1
            };
            return Ok(TateOutcome {
                kodaira: Kodaira::In(n),
                tamagawa: c,
                conductor_exp: 1,
                v_disc_min: n,
                scaling_steps,
            });
        }

        // additive from here on
        if vp(&model.a[4], p) < 2 {
            return Ok(TateOutcome {
                kodaira: Kodaira::II,
                tamagawa: 1,
                conductor_exp: n,
                v_disc_min: n,
                scaling_steps,
            });
        }
        if vp(&b8, p) < 3 {
            return Ok(TateOutcome {
                kodaira: Kodaira::III,
                tamagawa: 2,
                conductor_exp: n - 1,
                v_disc_min: n,
                scaling_steps,
            });
        }
        if vp(&b6, p) < 3 {
            // IV: Y^2 + (a3/p) Y - a6/p^2
            let qb = modp(&div_exact(&model.a[2], p, 1), p);
            let qc = modp(&-div_exact(&model.a[4], p, 2), p);
            let has_root = quadratic_root_modp(1, qb, qc, p).is_some();
            return Ok(TateOutcome {
                kodaira: Kodaira::IV,
                tamagawa: if has_root { 3 } else { 1 },
                conductor_exp: n - 2,
                v_disc_min: n,
                scaling_steps,
            });
        }

        // Step 7 preparation: p | a1, a2; p^2 | a3, a4; p^3 | a6.
        normalize_step7(&mut model, p)?;

        let c2 = modp(&div_exact(&model.a[1], p, 1), p);
        let c1 = modp(&div_exact(&model.a[3], p, 2), p);
        let c0 = modp(&div_exact(&model.a[4], p, 3), p);
        let (roots, multiple) = cubic_roots_modp(c2, c1, c0, p);
        match multiple {
            None => {
                return Ok(TateOutcome {
                    kodaira: Kodaira::I0Star,
                    tamagawa: 1 + roots.len() as u32,
                    conductor_exp: n - 4,
                    v_disc_min: n,
                    scaling_steps,
                });
            }
            Some((t0, 2)) => {
                // move the double root to zero, then the I_m* ladder
                model.translate(
                    &(BigInt::from(p) * BigInt::from(t0)),
                    &BigInt::zero(),
                    &BigInt::zero(),
                );
                return in_star_loop(&mut model, p, n, scaling_steps);
            }
            Some((t0, _)) => {
                // triple root
                model.translate(
                    &(BigInt::from(p) * BigInt::from(t0)),
                    &BigInt::zero(),
                    &BigInt::zero(),
                );
                // Step 8: Y^2 + (a3/p^2) Y - a6/p^4
                let qb = modp(&div_exact(&model.a[2], p, 2), p);
                let qc = modp(&-div_exact(&model.a[4], p, 4), p);
                if quadratic_separable(1, qb, qc, p) {
                    let has_root = quadratic_root_modp(1, qb, qc, p).is_some();
                    return Ok(TateOutcome {
                        kodaira: Kodaira::IVStar,
                        tamagawa: if has_root { 3 } else { 1 },
                        conductor_exp: n - 6,
                        v_disc_min: n,
                        scaling_steps,
                    });
                }
                // double root: move it to zero
                let y0 = double_root_of_monic_quadratic(qb, qc, p);
                model.translate(
                    &BigInt::zero(),
                    &BigInt::zero(),
                    &(BigInt::from(p).pow(2) * BigInt::from(y0)),
                );
                // Step 9
                if vp(&model.a[3], p) < 4 {
                    return Ok(TateOutcome {
                        kodaira: Kodaira::IIIStar,
                        tamagawa: 2,
                        conductor_exp: n - 7,
                        v_disc_min: n,
                        scaling_steps,
                    });
                }
                // Step 10
                if vp(&model.a[4], p) < 6 {
                    return Ok(TateOutcome {
                        kodaira: Kodaira::IIStar,
                        tamagawa: 1,
                        conductor_exp: n - 8,
                        v_disc_min: n,
                        scaling_steps,
                    });
                }
                // Step 11: not minimal; unscale and restart
                model.unscale(p);
                scaling_steps += 1;
            }
        }
    }
}

/// Double root of the monic quadratic `Y^2 + b Y + c` mod p (must exist).
fn double_root_of_monic_quadratic(b: u64, c: u64, p: u64) -> u64 {
    if p == 2 {
        for y in 0..2u64 {
            if (y * y + (b % 2) * y + c % 2) % 2 == 0 {
                return y;
            }
        }
        unreachable!("inseparable quadratic without a root");
    }
    let inv2 = crate::intutil::pow_mod_u64(2, p - 2, p);
    crate::intutil::mul_mod_u64((p - b % p) % p, inv2, p)
}

fn move_singular_to_origin(model: &mut Model, p: u64) -> Result<()> {
    let ok = |m: &Model| vp(&m.a[2], p) >= 1 && vp(&m.a[3], p) >= 1 && vp(&m.a[4], p) >= 1;
    if ok(model) {
        return Ok(());
    }
    if p == 2 {
        for r in 0..2i64 {
            for t in 0..2i64 {
                let mut m2 = Model { a: model.a.clone() };
                m2.translate(&BigInt::from(r), &BigInt::zero(), &BigInt::from(t));
                if ok(&m2) {
                    *model = m2;
                    return Ok(());
                }
            }
        }
    } else {
        // the y-coordinate of the singular point follows from x:
        // t = -(a1 r + a3)/2 mod p
        let inv2 = BigInt::from(crate::intutil::pow_mod_u64(2, p - 2, p));
        for r in 0..p {
            let rb = BigInt::from(r);
            let t = num_integer::Integer::mod_floor(
                &(-(&model.a[0] * &rb + &model.a[2]) * &inv2),
                &BigInt::from(p),
            );
            let mut m2 = Model { a: model.a.clone() };
            m2.translate(&rb, &BigInt::zero(), &t);
            if ok(&m2) {
                *model = m2;
                return Ok(());
            }
        }
    }
    Err(Error::InternalDisagreement {
        p,
        detail: "no translation moves the singular point to the origin".into(),
    })
}

fn normalize_step7(model: &mut Model, p: u64) -> Result<()> {
    let ok = |m: &Model| {
        vp(&m.a[0], p) >= 1
            && vp(&m.a[1], p) >= 1
            && vp(&m.a[2], p) >= 2
            && vp(&m.a[3], p) >= 2
            && vp(&m.a[4], p) >= 3
    };
    if ok(model) {
        return Ok(());
    }
    if p <= 3 {
        let p2 = (p * p) as i64;
        for s in 0..p as i64 {
            for r in 0..p2 {
                for t in 0..p2 {
                    let mut m2 = Model { a: model.a.clone() };
                    m2.translate(&BigInt::from(r), &BigInt::from(s), &BigInt::from(t));
                    if ok(&m2) {
                        *model = m2;
                        return Ok(());
                    }
                }
            }
        }
    } else {
        // kill a1 with s, then a3 with t mod p^2
        let pb = BigInt::from(p);
        let inv2 = BigInt::from(crate::intutil::pow_mod_u64(2, p - 2, p));
        let s = num_integer::Integer::mod_floor(&(-&model.a[0] * &inv2), &pb);
        model.translate(&BigInt::zero(), &s, &BigInt::zero());
        let p2b = &pb * &pb;
        let p2 = p * p;
        let inv2_p2 = BigInt::from(crate::intutil::pow_mod_u64(2, phi(p2) - 1, p2));
        let t = num_integer::Integer::mod_floor(&(-&model.a[2] * &inv2_p2), &p2b);
        model.translate(&BigInt::zero(), &BigInt::zero(), &t);
        if ok(model) {
            return Ok(());
        }
    }
    Err(Error::InternalDisagreement {
        p,
        detail: "step-7 normalization failed".into(),
    })
}

fn phi(p2: u64) -> u64 {
    // Euler phi of p^2 for prime p
    let p = (p2 as f64).sqrt().round() as u64;
    p2 - p
}

/// The alternating sub-algorithm deciding `I_m*`.
fn in_star_loop(model: &mut Model, p: u64, n: u32, scaling_steps: u32) -> Result<TateOutcome> {
    let pb = BigInt::from(p);
    let mut mx = 2u32;
    let mut my = 2u32;
    let mut m = 1u32;
    loop {
        // quadratic in Y: Y^2 + (a3 / p^my) Y - a6 / p^(mx+my)
        let b = modp(&div_exact(&model.a[2], p, my), p);
        let c = modp(&-div_exact(&model.a[4], p, mx + my), p);
        if quadratic_separable(1, b, c, p) {
            let has_root = quadratic_root_modp(1, b, c, p).is_some();
            return Ok(TateOutcome {
                kodaira: Kodaira::InStar(m),
                tamagawa: if has_root { 4 } else { 2 },
                conductor_exp: n - 4 - m,
                v_disc_min: n,
                scaling_steps,
            });
        }
        let y0 = double_root_of_monic_quadratic(b, c, p);
        model.translate(
            &BigInt::zero(),
            &BigInt::zero(),
            &(pb.pow(my) * BigInt::from(y0)),
        );
        my += 1;
        m += 1;

        // quadratic in X: (a2/p) X^2 + (a4 / p^(mx+1)) X + a6 / p^(mx+my)
        let qa = modp(&div_exact(&model.a[1], p, 1), p);
        let qb = modp(&div_exact(&model.a[3], p, mx + 1), p);
        let qc = modp(&div_exact(&model.a[4], p, mx + my), p);
        if quadratic_separable(qa, qb, qc, p) {
            let has_root = quadratic_root_modp(qa, qb, qc, p).is_some();
            return Ok(TateOutcome {
                kodaira: Kodaira::InStar(m),
                tamagawa: if has_root { 4 } else { 2 },
                conductor_exp: n - 4 - m,
                v_disc_min: n,
                scaling_steps,
            });
        }
        let x0 = if p == 2 {
            (0..2u64)
                .find(|&x| (qa * x * x + qb * x + qc) % 2 == 0)
                .ok_or(Error::InternalDisagreement {
                    p,
                    detail: "inseparable X-quadratic with no root".into(),
                })?
        } else {
            let inv = crate::intutil::pow_mod_u64((2 * qa) % p, p - 2, p);
            crate::intutil::mul_mod_u64((p - qb % p) % p, inv, p)
        };
        model.translate(
            &(pb.pow(mx) * BigInt::from(x0)),
            &BigInt::zero(),
            &BigInt::zero(),
        );
        mx += 1;
        m += 1;
        if m > 10_000 {
            return Err(Error::InternalDisagreement {
                p,
                detail: "runaway I_m* ladder".into(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(d: i64) -> [BigInt; 5] {
        [
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::from(d),
        ]
    }

    #[test]
    fn good_reduction_off_disc() {
        let out = tate_local(short(1), 5).unwrap();
        assert_eq!(out.kodaira, Kodaira::I0);
        assert_eq!(out.tamagawa, 1);
        assert_eq!(out.conductor_exp, 0);
    }

    #[test]
    fn ogg_formula_holds_everywhere() {
        // f = v(disc_min) + 1 - components, for every type reached
        for d in -400..=400i64 {
            if d == 0 {
                continue;
            }
            for p in [2u64, 3, 5, 7] {
                let out = tate_local(short(d), p).unwrap();
                if out.kodaira == Kodaira::I0 {
                    assert_eq!(out.conductor_exp, 0, "d={d} p={p}");
                    continue;
                }
                assert_eq!(
                    out.conductor_exp,
                    out.v_disc_min + 1 - out.kodaira.components(),
                    "d={d} p={p} type={}",
                    out.kodaira
                );
            }
        }
    }

    #[test]
    fn model_with_hidden_minimality_at_2() {
        // y^2 = x^3 + 16 is y^2 + y = x^3 in disguise: good reduction at 2
        let out = tate_local(short(16), 2).unwrap();
        assert_eq!(out.kodaira, Kodaira::I0);
        assert_eq!(out.conductor_exp, 0);
        assert_eq!(out.scaling_steps, 1);
    }

    #[test]
    fn known_additive_examples() {
        // y^2 = x^3 - 432 has additive reduction at 3 and good reduction at 2
        let out = tate_local(short(-432), 3).unwrap();
        assert!(out.conductor_exp >= 2, "f3 = {}", out.conductor_exp);
        let out2 = tate_local(short(-432), 2).unwrap();
        assert_eq!(out2.conductor_exp, 0, "type {}", out2.kodaira);
    }
}
