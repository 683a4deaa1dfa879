use anyhow::{bail, Context, Result};

/// Parses `start:stop:step` (inclusive of `stop` up to rounding) or a
/// comma-separated list. Values come back sorted and deduplicated.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let mut out = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("grid range must look like start:stop:step, got `{s}`");
        }
        let [start, stop, step] = [parts[0], parts[1], parts[2]].map(parse_num);
        let (start, stop, step) = (start?, stop?, step?);
        if !(step > 0.0) || stop < start {
            bail!("grid range `{s}` needs step > 0 and stop >= start");
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + step * i as f64).collect()
    } else {
        parse_list(s)?
    };
    if out.is_empty() {
        bail!("empty grid");
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_num).collect()
}

fn parse_num(t: &str) -> Result<f64> {
    let v: f64 = t.trim().parse().with_context(|| format!("`{t}` is not a number"))?;
    if !v.is_finite() {
        bail!("`{t}` is not finite");
    }
    Ok(v)
}
