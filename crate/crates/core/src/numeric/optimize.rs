/// Location and value of a 1-D extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization on `[a, b]`, stopping at bracket width
/// `tol * max(1, |x|)`. Non-finite objective values count as `+inf`.
pub fn golden_min<F>(mut f: F, a: f64, b: f64, tol: f64) -> Extremum
where
    F: FnMut(f64) -> f64,
{
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    for _ in 0..300 {
        if (b - a) <= tol * c.abs().max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    if fc <= fd {
        Extremum { x: c, value: fc }
    } else {
        Extremum { x: d, value: fd }
    }
}

/// Golden-section maximization on `[a, b]`.
pub fn golden_max<F>(mut f: F, a: f64, b: f64, tol: f64) -> Extremum
where
    F: FnMut(f64) -> f64,
{
    let e = golden_min(
        |x| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                -v
            }
        },
        a,
        b,
        tol,
    );
    Extremum {
        x: e.x,
        value: -e.value,
    }
}

/// Global-to-grid-resolution minimization for objectives that need not be
/// unimodal: evaluate `points` equispaced nodes (endpoints included), then
/// refine by golden section over the two cells around the best node.
/// Ties on the grid resolve to the later node.
pub fn scan_then_golden<F>(mut f: F, a: f64, b: f64, points: usize, tol: f64) -> Extremum
where
    F: FnMut(f64) -> f64,
{
    let points = points.max(2);
    if b <= a {
        return Extremum { x: a, value: f(a) };
    }
    let step = (b - a) / (points - 1) as f64;
    let node = |i: usize| if i + 1 == points { b } else { a + step * i as f64 };
    let mut best = Extremum {
        x: a,
        value: f64::INFINITY,
    };
    let mut best_i = 0;
    for i in 0..points {
        let x = node(i);
        let v = f(x);
        if !v.is_nan() && v <= best.value {
            best = Extremum { x, value: v };
            best_i = i;
        }
    }
    let lo = node(best_i.saturating_sub(1));
    let hi = node((best_i + 1).min(points - 1));
    let refined = golden_min(&mut f, lo, hi, tol);
    if refined.value < best.value {
        refined
    } else {
        best
    }
}
