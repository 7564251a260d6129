// temporary benchmark for the stiff gauge-equivalence cases
use cavity_lab::coupling::{dressed_params, PhysicalParams};
use cavity_lab::grid::{AxisGrid, AxisLabel, ProductGrid};
use cavity_lab::hamiltonian::{build, Gauge, HamiltonianSpec};
use cavity_lab::potential::PotentialModel;
use cavity_lab::spectra::{eigen, EigenOptions};
use std::time::Instant;

fn main() {
    let eps = 50.0;
    let p = PhysicalParams::new(1.0, 1.0, 1.0, eps).unwrap();
    let d = dressed_params(&p).unwrap();
    eprintln!("eps={eps}: M={:.4} zeta={:.6} Omega={:.4} hbar_eff={:.6} sigma_q={:.4}",
        d.big_m, d.zeta, d.omega_dressed, d.hbar_eff, (1.0/(2.0*d.mu.sqrt())).sqrt());

    // double well V_b=1 a=1
    let pot = PotentialModel::QuarticDoubleWell { barrier: 1.0, minimum: 1.0 };

    for (label, gauge, nx, hx, nq) in [
        ("MG", Gauge::Mg, 128usize, 2.0, 64usize),
        ("AG", Gauge::Ag, 128, 2.0, 64),
    ] {
        let mx = AxisGrid::symmetric(AxisLabel::MatterX, hx, nx).unwrap();
        let cq = AxisGrid::cavity_q_auto(&d, 1.0, 1.0, nq, 7.0).unwrap();
        eprintln!("{label}: cavity half-extent {:.2}, dq={:.3}, pmax_c={:.3}", cq.max, cq.dx, std::f64::consts::PI/cq.dx);
        let g = ProductGrid::new(mx, cq, 1.0).unwrap();
        let spec = HamiltonianSpec::new(gauge, p, pot.clone(), g).unwrap();
        let op = build(&spec).unwrap();
        eprintln!("{label}: dim {} bounds [{:.3}, {:.3}]", op.grid.len(), op.lower_bound(), op.upper_bound());
        let t0 = Instant::now();
        let mut o = EigenOptions::krylov(20).with_tol(1e-10);
        o.max_cycles = 200;
        match eigen(&op, &o) {
            Ok(r) => {
                eprintln!("{label}: {} cycles, {:.2?}", r.iterations, t0.elapsed());
                eprintln!("  evals[0..6] {:?}", &r.eigenvalues[..6]);
                eprintln!("  evals[18..20] {:?}", &r.eigenvalues[18..20]);
                eprintln!("  max resid {:.2e}", r.residual_norms.iter().cloned().fold(0.0f64, f64::max));
            }
            Err(e) => eprintln!("{label} FAILED after {:.2?}: {e}", t0.elapsed()),
        }
    }
}
