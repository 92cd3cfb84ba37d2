use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// Writes every `stride`-th sample as `t,y1..yn,v1..vn`. The final sample is
/// always included.
pub fn write_trajectory<W: Write>(traj: &Trajectory, stride: usize, mut out: W) -> Result<()> {
    if stride == 0 {
        return Err(Error::param("stride", "must be at least 1"));
    }
    let io = |e| Error::io("<trajectory>", e);
    let n = traj.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("y{i}")));
    header.extend((1..=n).map(|i| format!("v{i}")));
    writeln!(out, "{}", header.join(",")).map_err(io)?;

    let last = traj.len() - 1;
    let rows = (0..traj.len())
        .step_by(stride)
        .chain((!last.is_multiple_of(stride)).then_some(last));
    for k in rows {
        let mut line = format!("{:.16e}", traj.times()[k]);
        for v in traj.positions()[k].iter().chain(traj.velocities()[k].iter()) {
            line.push_str(&format!(",{v:.16e}"));
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

pub fn export_trajectory(traj: &Trajectory, path: impl AsRef<Path>, stride: usize) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_trajectory(traj, stride, &mut buf)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Gnuplot script plotting the position columns of a trajectory CSV. Planar
/// trajectories are drawn as a path, others against time.
pub fn gnuplot_script(csv_path: &Path, dim: usize) -> String {
    let file = csv_path.display().to_string().replace('\'', "''");
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
    if dim == 2 {
        s.push_str("set size ratio -1\nset xlabel 'y1'\nset ylabel 'y2'\n");
        s.push_str(&format!("plot '{file}' using 2:3 with lines\n"));
    } else {
        s.push_str("set xlabel 't'\n");
        let series: Vec<String> = (0..dim)
            .map(|i| format!("'{file}' using 1:{} with lines", i + 2))
            .collect();
        s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
    }
    s
}
