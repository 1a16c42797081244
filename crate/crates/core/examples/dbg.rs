use starspec_core::numerics::tridiag::{Tridiag, TridiagLu};
use starspec_core::*;

fn main() {
    let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
    let p = solve_profile(&eos, 1.0, 1e-10).unwrap();
    let n = 400usize;
    let a = 1e-6;
    // FD sim with a velocity kick
    let cfg = RunConfig::new(n, 0.1, 0.1, Perturbation::Velocity { amplitude: a }, 30.0, 1e-3);
    let ts = run(&p, &cfg).unwrap();

    // FEM evolve on the same uniform grid
    let grid: Vec<f64> = (0..=n).map(|i| p.r_mu() * i as f64 / n as f64).collect();
    let t = assemble_eulerian_on(&p, 0.1, 0.1, &grid).unwrap();
    let u0 = vec![0.0; t.n()];
    let v0: Vec<f64> = grid[1..].iter().map(|&r| a * r).collect();
    let dt = 1e-3;
    let a_plus = t.mmat.scaled_add(1.0, &t.dmat, 0.5 * dt).scaled_add(1.0, &t.kmat, 0.25 * dt * dt);
    let a_minus = t.mmat.scaled_add(1.0, &t.dmat, -0.5 * dt).scaled_add(1.0, &t.kmat, -0.25 * dt * dt);
    let lu = TridiagLu::factor(&Tridiag::from_sym(&a_plus)).unwrap();
    let mut u = u0;
    let mut v = v0;
    let mut fem_sup = vec![0.0f64];
    for step in 1..=(30.0f64 / dt) as usize {
        let mut rhs_vec = a_minus.matvec(&v);
        let ku = t.kmat.matvec(&u);
        for i in 0..u.len() {
            rhs_vec[i] -= dt * ku[i];
        }
        let v_new = lu.solve(&rhs_vec);
        for i in 0..u.len() {
            u[i] += 0.5 * dt * (v[i] + v_new[i]);
        }
        v = v_new;
        if step % 100 == 0 {
            fem_sup.push(u.iter().map(|x| x.abs()).fold(0.0, f64::max));
        }
    }
    // compare at matching record times (rows every 0.1)
    println!("t  sim_sup  fem_sup  rel_diff");
    let mut peak: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for (k, row) in ts.rows.iter().enumerate() {
        if k == 0 || k >= fem_sup.len() {
            continue;
        }
        let rel = (row.sup_r_err - fem_sup[k]).abs() / fem_sup[k].max(1e-300);
        peak = peak.max(row.sup_r_err);
        if row.sup_r_err > 0.1 * peak {
            worst = worst.max(rel);
        }
        if k % 30 == 0 {
            println!("{:6.1} {:.4e} {:.4e} {:.3}", row.t, row.sup_r_err, fem_sup[k], rel);
        }
    }
    println!("worst relative difference above 10% of peak: {worst:.4}");
}
