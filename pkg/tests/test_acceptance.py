"""Exit criteria. Each test logs one PASS/FAIL line to the terminal summary."""

import json
import math

import numpy as np

from aerts_machines import bell_harness as bh
from aerts_machines import cli
from aerts_machines import quantum_core as qc
from aerts_machines import sqm_engine as sqm
from aerts_machines.stats import z_check

SEED = 42
Z = 3.0
U = qc.Z_HAT
CRITERION_1_GAMMAS = [0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2, 2 * math.pi / 3, 3 * math.pi / 4, math.pi]


def test_criterion_1_sqm_probability_law(record_criterion):
    failures = []
    for k, g in enumerate(CRITERION_1_GAMMAS):
        v = sqm.direction_at_angle(U, g)
        est = sqm.plus_frequency(v, U, sqm.Uniform(), 10**6, SEED, key=(k,))
        p_exact = math.cos(g / 2) ** 2
        # degenerate endpoints: cos^2(0) = 1 and cos^2(pi/2) ~ 1e-33 are compared to the
        # engine's own exact analytic value, which is what the sampler realizes
        p_analytic = sqm.analytic_probability(v, U)[0]
        if abs(p_analytic - p_exact) > 1e-12:
            failures.append(f"gamma={g}: analytic {p_analytic} vs cos^2 {p_exact}")
        born = qc.born_probability(qc.state_from_direction(v), U)
        if abs(p_analytic - born) > 1e-12:
            failures.append(f"gamma={g}: analytic {p_analytic} vs born {born}")
        if not z_check(est, p_analytic, Z):
            failures.append(f"gamma={g}: MC {est.p_hat} vs {p_analytic}")
    record_criterion(1, "SQM probability law", not failures, "; ".join(failures))
    assert not failures


def test_criterion_2_epsilon_piecewise_law(record_criterion):
    cosines = np.linspace(-0.95, 0.95, 10)
    epsilons = np.linspace(0.1, 1.0, 10)
    failures = []
    for i, c in enumerate(cosines):
        v = sqm.direction_at_angle(U, math.acos(c))
        for j, eps in enumerate(epsilons):
            p = sqm.analytic_epsilon_probability(v, U, eps)[0]
            # independent evaluation of the three-case law
            x = sqm.land_on_chord(v, U)
            ref = 1.0 if x >= eps else 0.0 if x <= -eps else (eps + x) / (2 * eps)
            if abs(p - ref) > 1e-12:
                failures.append(f"analytic c={c:.3f} eps={eps:.2f}")
            est = sqm.plus_frequency(v, U, sqm.Epsilon(float(eps)), 10**5, SEED, key=(i, j))
            if not z_check(est, p, Z):
                failures.append(f"MC c={c:.3f} eps={eps:.2f}: {est.p_hat} vs {p}")
    for g in CRITERION_1_GAMMAS:
        v = sqm.direction_at_angle(U, g)
        if sqm.analytic_epsilon_probability(v, U, 1.0) != sqm.analytic_probability(v, U):
            failures.append(f"eps=1 column differs at gamma={g}")
    for c in cosines:
        v = sqm.direction_at_angle(U, math.acos(c))
        if sqm.analytic_epsilon_probability(v, U, 1.0) != sqm.analytic_probability(v, U):
            failures.append(f"eps=1 column differs at cos={c}")
    record_criterion(2, "eps-model piecewise law", not failures, "; ".join(failures))
    assert not failures


def test_criterion_3_hidden_measurement_equivalence(record_criterion):
    rng = np.random.default_rng(SEED)
    gammas = rng.uniform(0, math.pi, 10)
    n = 10**6
    failures = []
    for k, g in enumerate(gammas):
        v = sqm.direction_at_angle(U, g)
        mix = sqm.hidden_measurement_frequency(v, U, n, SEED, key=(0, k))
        uni = sqm.plus_frequency(v, U, sqm.Uniform(), n, SEED, key=(1, k))
        p = sqm.analytic_probability(v, U)[0]
        # two independent binomial estimates of the same p
        pooled = Z * math.sqrt(2 * p * (1 - p) / n)
        if abs(mix.p_hat - uni.p_hat) > pooled:
            failures.append(f"gamma={g:.3f}: mix {mix.p_hat} vs uniform {uni.p_hat}")
        if not (z_check(mix, p, Z) and z_check(uni, p, Z)):
            failures.append(f"gamma={g:.3f}: off the cos^2 law")
    record_criterion(3, "hidden-measurement equivalence", not failures, "; ".join(failures))
    assert not failures


def test_criterion_4_chsh_landmarks(record_criterion):
    values = {
        "uniform": bh.chsh_scenario(bh.UniformBand(), 0).s_value,
        "fixed": bh.chsh_scenario(bh.FixedBreakBand(break_at=1 / 3), 0).s_value,
        "prebroken": bh.chsh_scenario(bh.PreBrokenBand(left=1 / 3), 0).s_value,
        "singlet": bh.chsh_scenario(bh.QuantumSinglet(), 0).s_value,
    }
    ok = (
        values["uniform"] == 4.0
        and values["fixed"] == 4.0
        and values["prebroken"] == 2.0
        and abs(values["singlet"] - 2 * math.sqrt(2)) <= 1e-12
    )
    record_criterion(4, "CHSH landmark values", ok, str(values))
    assert ok


def test_criterion_5_chsh_monte_carlo(record_criterion):
    rep = bh.chsh_scenario(bh.QuantumSinglet(), 10**6, SEED)
    se = rep.combined_standard_error
    singlet_ok = abs(rep.s_value - 2 * math.sqrt(2)) <= Z * se
    band = bh.chsh_scenario(bh.UniformBand(), 10**6, SEED)
    band_ok = band.s_value == 4.0 and band.combined_standard_error == 0.0
    ok = singlet_ok and band_ok
    record_criterion(
        5,
        "CHSH Monte Carlo",
        ok,
        f"S_singlet={rep.s_value:.6f} (3se={Z * se:.6f}) S_band={band.s_value}",
    )
    assert ok


def test_criterion_6_lhv_oracle(record_criterion):
    strategies = bh.lhv_strategies()
    values = [s.s_value for s in strategies]
    ok = len(strategies) == 16 and max(values) == 2.0 and all(v <= 2.0 for v in values)
    ok = ok and bh.lhv_maximum() == 2.0
    record_criterion(6, "LHV oracle", ok, f"max={max(values)}")
    assert ok


def test_criterion_7_quantum_core_identities(record_criterion):
    rng = np.random.default_rng(SEED)
    bad = {"round_trip": 0, "projector": 0, "unitary": 0, "rotation": 0, "singlet": 0}
    for _ in range(1000):
        v = qc.random_direction(rng)
        s = qc.random_state(rng)
        back = qc.pauli_map(qc.state_from_direction(v))
        if np.max(np.abs(back.as_array() - v.as_array())) > 1e-10:
            bad["round_trip"] += 1
        if not qc.state_from_direction(qc.pauli_map(s)).ray_equal(s):
            bad["round_trip"] += 1

        p, q = qc.projector(v), qc.projector(-v)
        if not ((p @ p).allclose(p) and p.allclose(p.dagger()) and (p + q).allclose(qc.IDENTITY)):
            bad["projector"] += 1

        r = qc.rotation_operator(qc.random_direction(rng), rng.uniform(-4 * math.pi, 4 * math.pi))
        if not (r.dagger() @ r).allclose(qc.IDENTITY):
            bad["unitary"] += 1

        u, w = qc.random_direction(rng), qc.random_direction(rng)
        n, gamma = qc.rotation_between(u, w)
        rotated = qc.SpinState.from_array(qc.rotation_operator(n, gamma).apply(qc.state_from_direction(u)))
        if not rotated.ray_equal(qc.state_from_direction(w)):
            bad["rotation"] += 1

        c, d = qc.random_direction(rng), qc.random_direction(rng)
        if abs(qc.singlet_expectation_bruteforce(c, d) - qc.singlet_expectation(c, d)) > 1e-12:
            bad["singlet"] += 1
    ok = not any(bad.values())
    record_criterion(7, "quantum-core identities", ok, str(bad))
    assert ok


def test_criterion_8_noncommutativity_and_repeatability(record_criterion):
    rng = np.random.default_rng(SEED)
    u = qc.UnitVector3.normalized(1.0, 0.0, 1.0)
    w = qc.UnitVector3.normalized(0.0, 1.0, -0.3)
    supports_uw, supports_wu = set(), set()
    repeat_fail = 0
    for _ in range(10**4):
        v0 = qc.random_direction(rng)
        supports_uw.add(sqm.run_sequence(v0, [u, w], sqm.Uniform(), rng)[-1].direction)
        supports_wu.add(sqm.run_sequence(v0, [w, u], sqm.Uniform(), rng)[-1].direction)
        first, second = sqm.run_sequence(v0, [u, u], sqm.Uniform(), rng)
        if second.direction != first.direction:
            repeat_fail += 1
    ok = (
        supports_uw == {w, -w}
        and supports_wu == {u, -u}
        and not supports_uw & supports_wu
        and repeat_fail == 0
    )
    record_criterion(8, "non-commutativity and repeatability", ok, f"repeat failures={repeat_fail}")
    assert ok


def _cli_bytes(argv, capsysbinary):
    code = cli.main(argv)
    out, _ = capsysbinary.readouterr()
    assert code == 0
    return out


def test_criterion_9_cli_determinism(record_criterion, capsysbinary):
    runs = [
        ["bell", "--scenario", "quantum-singlet", "--trials", "1000000", "--seed", "42", "--format", "json"],
        ["sqm", "--gamma", "0:3.141592653589793:8", "--trials", "1000000", "--seed", "42", "--format", "json"],
        ["epsilon", "--epsilon", "0.4", "--gamma", "0.5:2.5:5", "--trials", "300000", "--format", "json"],
    ]
    ok = True
    for argv in runs:
        a = _cli_bytes(argv + ["--workers", "1"], capsysbinary)
        b = _cli_bytes(argv + ["--workers", "1"], capsysbinary)
        c = _cli_bytes(argv + ["--workers", "4"], capsysbinary)
        json.loads(a)
        ok = ok and a == b == c
    record_criterion(9, "CLI determinism", ok)
    assert ok
