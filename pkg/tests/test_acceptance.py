"""Acceptance suite: quantitative gates on the whole pipeline.

One test per criterion (two are split into sub-checks), each printing a
PASS/FAIL line; run with ``pytest tests/test_acceptance.py -s`` to see them
all.  Tolerances are fixed here and nowhere else.
"""

import math
import time

import numpy as np
import pytest

from aoilab import (
    ChurnEvent,
    GameConfig,
    NodeParams,
    age_sequence,
    age_stationary_pmf,
    best_response,
    best_response_map,
    contraction_bound,
    derive_params,
    expected_age,
    optimize_system,
    price_of_anarchy,
    run_learning,
    simulate_frame,
    simulate_rr,
    solve_ne,
    system_gradient,
    system_utility,
    utility,
    utility_gradient,
)
from aoilab.channel import draw_transmissions
from aoilab.harness import parse_config, run_scenario
from aoilab.model import substream


def report(criterion, passed, detail):
    print(f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, f"{criterion}: {detail}"


@pytest.fixture(scope="module")
def params():
    return derive_params(1.0, 0.05)


def test_c01_frame_statistics_match_closed_forms(params):
    started = time.perf_counter()
    m = 100_000
    probs = np.array([0.4, 0.4])
    streams = [substream(7, 0, 1, pos) for pos in range(2)]
    obs = simulate_frame(probs, [params] * 2, m, streams)
    elapsed = time.perf_counter() - started
    target_age = 19.0 / 6.0
    cost_err = max(abs(o.avg_cost - 0.4) for o in obs)
    age_err = max(abs(o.avg_age - target_age) / target_age for o in obs)
    report(
        "1 frame statistics vs large-frame limits",
        cost_err <= 0.01 and age_err <= 0.02 and elapsed < 1.0,
        f"cost err {cost_err:.4f} <= 0.01, age rel err {age_err:.4f} <= 0.02, "
        f"{elapsed:.2f}s < 1s",
    )


def test_c02_stationary_age_law(params):
    started = time.perf_counter()
    m = 1_000_000
    nu = 0.3
    tx = draw_transmissions(np.array([nu]), m, [substream(11, 0, 1, 0)])
    ages = age_sequence(tx[0])
    emp = np.bincount(ages) / m
    pmf = age_stationary_pmf(nu, np.arange(emp.size))
    tv = 0.5 * (np.abs(emp - pmf).sum() + (1.0 - pmf.sum()))
    elapsed = time.perf_counter() - started
    report(
        "2 empirical age law vs geometric",
        tv <= 0.01 and elapsed < 5.0,
        f"TV distance {tv:.5f} <= 0.01, {elapsed:.2f}s < 5s",
    )


def test_c03_gradients_match_finite_differences(params):
    rng = np.random.default_rng(33)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        p = rng.uniform(0.05, 0.95)
        alpha = rng.uniform(0.2, 4.0)
        b = rng.uniform(1.0, 50.0)
        exact = utility_gradient(p, alpha, b)
        fd = (utility(p + h, alpha, b) - utility(p - h, alpha, b)) / (2 * h)
        worst = max(worst, abs(fd - exact) / abs(exact))
    for _ in range(100):
        n = int(rng.integers(2, 8))
        nodes = [params] * n
        probs = rng.uniform(0.06, 0.94, size=n)
        j = int(rng.integers(0, n))
        exact = system_gradient(probs, j, nodes)

        def u_of(x, j=j, probs=probs, nodes=nodes):
            shifted = probs.copy()
            shifted[j] = x
            return system_utility(shifted, nodes)

        fd = (u_of(probs[j] + h) - u_of(probs[j] - h)) / (2 * h)
        worst = max(worst, abs(fd - exact) / abs(exact))
    report("3 analytic gradients vs central differences", worst <= 1e-6, f"worst rel err {worst:.2e}")


def test_c04_best_response_bounds_and_residuals():
    rng = np.random.default_rng(44)
    ok = True
    worst_res = 0.0
    for _ in range(200):
        alpha = rng.uniform(0.3, 3.0)
        cost = rng.uniform(0.5, 2.0)
        p_min = math.exp(-alpha) / 2.0 * rng.uniform(0.1, 1.0)
        node = NodeParams(cost=cost, rho1=alpha / cost, rho2=rng.uniform(0.05, 3.0), p_min=p_min)
        others = rng.uniform(p_min, 0.9, size=int(rng.integers(0, 10)))
        root = best_response(others, node)
        ok = ok and (math.exp(-alpha) / 2.0 - 1e-12 <= root < 1.0)
        b = math.exp(node.rho2) / float(np.prod(1.0 - others))
        worst_res = max(worst_res, abs(utility_gradient(root, alpha, b)))
    report(
        "4 best response in [exp(-a)/2, 1) with tiny residual",
        ok and worst_res <= 1e-10,
        f"bounds {'ok' if ok else 'violated'}, worst residual {worst_res:.2e}",
    )


def test_c05_contraction_certificate(params):
    worst = max(contraction_bound(n, [params], 0.05) for n in range(1, 201))
    nodes = [params] * 10
    bound = contraction_bound(10, nodes, 0.05)
    rng = np.random.default_rng(55)
    tol = 1e-10
    a = solve_ne(nodes, tol=tol, start=rng.uniform(0.05, 0.99, 10))
    b = solve_ne(nodes, tol=tol, start=rng.uniform(0.05, 0.99, 10))
    agreement = float(np.max(np.abs(a.probabilities - b.probabilities)))

    target = solve_ne(nodes, tol=1e-13).probabilities
    probs = rng.uniform(0.05, 0.99, size=10)
    worst_factor = 0.0
    while True:
        dist = float(np.max(np.abs(probs - target)))
        if dist < 1e-8:
            break
        probs = best_response_map(probs, nodes)
        worst_factor = max(worst_factor, float(np.max(np.abs(probs - target))) / dist)
    report(
        "5 contraction certified and observed",
        worst < 1.0 and agreement <= 1e-9 and worst_factor <= bound + 1e-6,
        f"max bound {worst:.5f} < 1, starts agree {agreement:.2e} <= 1e-9, "
        f"factor {worst_factor:.5f} <= {bound:.5f} + 1e-6",
    )


def test_c06a_stochastic_learning_reaches_equilibrium(params):
    started = time.perf_counter()
    nodes = (params,) * 10
    config = GameConfig(nodes=nodes, frame_length=10_000, seed=6)
    run = run_learning(config, 200)
    target = solve_ne(nodes, tol=1e-12).probabilities
    gap = float(np.max(np.abs(run.final_probs - target)))
    elapsed = time.perf_counter() - started
    report(
        "6a stochastic endpoint near equilibrium",
        gap <= 0.02 and elapsed < 60.0,
        f"sup gap {gap:.4f} <= 0.02, {elapsed:.1f}s < 60s",
    )


def test_c06b_expected_dynamics_reach_equilibrium(params):
    nodes = (params,) * 10
    config = GameConfig(nodes=nodes, frame_length=10_000, seed=6)
    run = run_learning(config, 200, mode="expected")
    target = solve_ne(nodes, tol=1e-12).probabilities
    gap = float(np.max(np.abs(run.final_probs - target)))
    report("6b expected endpoint near equilibrium", gap <= 1e-6, f"sup gap {gap:.2e} <= 1e-6")


def test_c07_churn_recovery(params):
    churn = (
        ChurnEvent(frame=20, add=(params,) * 7),
        ChurnEvent(frame=80, remove=7),
    )
    config = GameConfig(nodes=(params,) * 3, frame_length=10_000, seed=77, churn_events=churn)
    run = run_learning(config, 120, reinit_on_churn=True)
    ne10 = solve_ne([params] * 10, tol=1e-12).probabilities
    ne3 = solve_ne([params] * 3, tol=1e-12).probabilities
    gap_high = float(np.max(np.abs(run.records[59].probs - ne10)))
    gap_low = float(np.max(np.abs(run.records[119].probs - ne3)))
    report(
        "7 churn recovery within 40 frames",
        gap_high <= 0.03 and gap_low <= 0.03,
        f"after join {gap_high:.4f} <= 0.03, after leave {gap_low:.4f} <= 0.03",
    )


def test_c08_price_of_anarchy_shape(params):
    poas = []
    externality = []
    for n in range(1, 26):
        nodes = [params] * n
        poas.append(price_of_anarchy(nodes, seed=800 + n).poa)
        p_ne = solve_ne(nodes, tol=1e-12).probabilities
        externality.append(system_gradient(p_ne, 0, nodes))
    poas = np.array(poas)
    peak = int(np.argmax(poas))
    rising = np.all(np.diff(poas[: peak + 1]) >= -1e-12)
    falling = np.all(np.diff(poas[peak:]) <= 1e-12)
    ext_ok = all(e > 0.0 for e in externality[1:]) and all(
        a > b for a, b in zip(externality[peak:], externality[peak + 1:])
    )
    report(
        "8 price-of-anarchy curve shape",
        abs(poas[0] - 1.0) <= 1e-9
        and np.all(poas >= 1.0 - 1e-9)
        and rising
        and falling
        and (poas[-1] - 1.0) < (poas[peak] - 1.0)
        and ext_ok,
        f"poa(1)-1 = {poas[0]-1:.1e}, peak at n={peak+1} ({poas[peak]-1:.2e}), "
        f"final {poas[-1]-1:.2e}, externality positive and decreasing past peak: {ext_ok}",
    )


def test_c09_two_node_optimum_matches_grid(params):
    nodes = [params] * 2
    opt = optimize_system(nodes, tol=1e-11, seed=9)
    grid = np.linspace(params.p_min, 1.0, 400)
    p1, p2 = np.meshgrid(grid, grid, indexing="ij")
    alpha = params.alpha
    const = (1.0 + alpha) / alpha
    inv1 = math.exp(-params.rho2) * (1.0 - p2)
    inv2 = math.exp(-params.rho2) * (1.0 - p1)
    u = (
        -np.exp(-alpha * p1) / alpha - 0.5 * p1**2 * (1.0 + inv1) + const
        - np.exp(-alpha * p2) / alpha - 0.5 * p2**2 * (1.0 + inv2) + const
    )
    i, j = np.unravel_index(np.argmax(u), u.shape)
    cell = grid[1] - grid[0]
    within = abs(opt[0] - grid[i]) <= cell + 1e-12 and abs(opt[1] - grid[j]) <= cell + 1e-12
    dominates = system_utility(opt, nodes) >= u[i, j] - 1e-8
    report(
        "9 welfare optimum vs 400x400 grid",
        within and dominates,
        f"offset ({abs(opt[0]-grid[i]):.2e}, {abs(opt[1]-grid[j]):.2e}) <= cell {cell:.2e}, "
        f"utility margin {system_utility(opt, nodes) - u[i, j]:.2e} >= -1e-8",
    )


@pytest.fixture(scope="module")
def rr_runs(params):
    runs = {}
    for n in (5, 10, 20):
        config = GameConfig(nodes=(params,) * n, frame_length=10_000, seed=1000 + n)
        runs[n] = simulate_rr(config, 250)
    return runs


def test_c10a_round_robin_never_collides(rr_runs):
    clean = all(
        obs.successes == obs.transmissions
        for run in rr_runs.values()
        for record in run.records
        for obs in record.observations
    )
    report("10a round-robin has no collisions", clean, "every transmission delivered")


def test_c10b_round_robin_age_near_claimed_rate(rr_runs):
    run = rr_runs[20]
    p_hat = float(np.mean(run.final_probs))
    measured = float(
        np.mean([obs.avg_age for record in run.records[-50:] for obs in record.observations])
    )
    claimed = 20.0 / (2.0 * p_hat)
    deviation = abs(measured - claimed) / claimed
    report(
        "10b round-robin age within 5% of n*E[slots-per-delivery]/2",
        deviation <= 0.05,
        f"measured {measured:.3f} vs claimed {claimed:.3f}, deviation {deviation:.1%} <= 5%",
    )


def test_c10c_round_robin_transmits_more_than_equilibrium(rr_runs, params):
    margins = {}
    ok = True
    for n, run in rr_runs.items():
        ne = solve_ne([params] * n, tol=1e-10).probabilities
        margins[n] = float(run.final_probs.min() - ne.max())
        ok = ok and margins[n] > 0.0
    report(
        "10c round-robin probability exceeds equilibrium",
        ok,
        "margins " + ", ".join(f"n={n}: {m:.3f}" for n, m in margins.items()),
    )


def test_c11_byte_identical_reruns(tmp_path):
    texts = {
        "convergence": "[global]\nseed = 5\nframe_length = 500\n\n[scenario]\nkind = convergence\nn = 3\nframes = 25\n",
        "sweep_prob_vs_n": "[global]\nseed = 3\nframe_length = 400\n\n[scenario]\nkind = sweep_prob_vs_n\nn_min = 2\nn_max = 3\nframes = 20\nreplicates = 2\n",
    }
    identical = True
    for kind, text in texts.items():
        outs = []
        for label in ("a", "b"):
            out = tmp_path / f"{kind}_{label}"
            config, scenario = parse_config(text)
            run_scenario(config, scenario, out, config_text=text)
            outs.append(out)
        for fname in (f"{kind}.csv", "manifest.json"):
            identical = identical and (
                (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()
            )
    report("11 identical seeds give byte-identical tables", identical, "all files compared equal")
