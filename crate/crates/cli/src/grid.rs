//! Parsers for numeric grids given on the command line.

/// Parses `start:stop:step` into an inclusive grid. `stop` is included when
/// it is reached within 1e-12; each point is snapped to 12 decimals so that
/// `0.05:0.95:0.05` yields `0.15` rather than `0.15000000000000002`.
pub fn parse_p_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(format!("grid {s:?} must look like start:stop:step"));
    };
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad grid number {t:?}"))
            .and_then(|x| {
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(format!("grid number {t:?} is not finite"))
                }
            })
    };
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if step <= 0.0 {
        return Err(format!("grid step must be positive, got {step}"));
    }
    if b < a {
        return Err(format!("grid stop {b} is below start {a}"));
    }
    let count = ((b - a) / step + 1e-12 / step).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("grid {s:?} has more than a million points"));
    }
    Ok((0..count)
        .map(|k| snap(a + k as f64 * step))
        .collect())
}

fn snap(x: f64) -> f64 {
    let scaled = (x * 1e12).round() / 1e12;
    if (scaled - x).abs() <= 1e-12 {
        scaled
    } else {
        x
    }
}

/// Parses an integer grid: either a comma-separated list (`100,1000,10000`)
/// or an inclusive arithmetic range `start:stop:step`.
pub fn parse_n_grid(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| {
        let t = t.trim();
        // Accept scientific shorthand such as 1e5 for exact integers.
        t.parse::<usize>().or_else(|_| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.fract() == 0.0 && *x >= 0.0 && *x < 1e15)
                .map(|x| x as usize)
                .ok_or_else(|| format!("bad integer {t:?}"))
        })
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(format!("grid {s:?} must look like start:stop:step"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step == 0 || b < a {
            return Err(format!("grid {s:?} is empty or has a zero step"));
        }
        Ok((a..=b).step_by(step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

/// Parses a comma-separated vertex list such as `0,3,4`.
pub fn parse_vertices(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad vertex {t:?}")))
        .collect()
}
