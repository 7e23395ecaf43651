//! Essential spectrum: the three branches lambda_j(ik) for the fast wave.

use relaxwave::evans::lambda_curves;
use relaxwave::numeric::linspace;
use relaxwave::poly::ModelParams;

fn main() -> relaxwave::Result<()> {
    let p = ModelParams::new(0.5, 1.5, 0.1, 0.1)?;
    let curves = lambda_curves(&p, &linspace(-10.0, 10.0, 401))?;
    println!("max Re lambda = {:.3e}", curves.max_real_part());
    for (i, k) in curves.k_grid.iter().enumerate().step_by(40) {
        let row: Vec<String> = curves.branches.iter().map(|b| format!("{:>9.4} {:+9.4}i", b[i][0], b[i][1])).collect();
        println!("k = {k:>6.2}  {}", row.join("  "));
    }
    Ok(())
}
