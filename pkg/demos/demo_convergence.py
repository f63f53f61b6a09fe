"""Node-refinement study on the three built-in benchmarks.

Example 2's closed-form pair satisfies every boundary condition of the
optimality system, so its errors decrease cleanly under refinement.
Examples 1 and 3 ship an adjoint whose lateral boundary trace is not
zero, while the trial space (correctly) enforces p = 0 there; their
errors therefore bottom out at an nu-scaled floor that no amount of
refinement can cross.  This script makes both behaviors visible.
"""

import numpy as np

import rkheat as rk


def sweep(example_id, nu=1e-2, sizes=(4, 8, 12, 16)):
    problem, exact = rk.builtin_example(example_id, nu=nu)
    hom = rk.homogenize(problem)
    kernels = rk.standard_kernels(problem.interval, problem.T)
    rows = []
    for n in sizes:
        nodes = rk.generate_nodes(n, n, (problem.interval, problem.T))
        sol = rk.solve(rk.assemble(hom, nodes, kernels))
        norms = rk.error_norms(sol, exact, eval_grid=(101, 101))
        rows.append((n * n, norms["linf_y"], norms["l2_y"], norms["linf_p"]))
    return rows


def main():
    for example_id, note in (
            (2, "fully consistent pair -> errors fall monotonically"),
            (1, "adjoint trace defect -> errors plateau at the nu-floor"),
            (3, "adjoint trace defect -> errors rebound past the floor")):
        print(f"Example {example_id}: {note}")
        print(f"  {'nodes':>6s} {'linf_y':>11s} {'l2_y':>11s} {'linf_p':>11s}")
        for total, linf_y, l2_y, linf_p in sweep(example_id):
            print(f"  {total:6d} {linf_y:11.4e} {l2_y:11.4e} {linf_p:11.4e}")
        print()

    nu = 1e-2
    problem, exact = rk.builtin_example(1, nu=nu)
    trace = max(abs(exact.p_exact(problem.a, t))
                for t in np.linspace(0.0, problem.T, 1001))
    print(f"Example 1 adjoint lateral trace max |p(a, t)| = {trace:.4e} "
          f"(= nu * 0.06912)")
    print("which matches the linf_p plateau above: the computed adjoint")
    print("honors p = 0 on the boundary, so it cannot track the printed pair")
    print("any closer than this trace.")


if __name__ == "__main__":
    main()
