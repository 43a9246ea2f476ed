import math

import numpy as np
import pytest

from ftakit.ctmc import build_ctmc, transient_failure_prob, write_ctmc
from ftakit.errors import InputError, StateCapExceeded
from ftakit.model import (
    AND,
    OR,
    PAND,
    POR,
    SEQ,
    Exponential,
    FixedProbability,
    make_fault_tree,
    pdep,
    spare,
)
from ftakit.analysis import probabilities_at, unreliability
from ftakit.translate import translate

from oracles import (
    mc_pand2,
    mc_pdep_and2,
    mc_por2,
    mc_seq_and2,
    mc_sigma,
    mc_spare2,
    random_sft,
)

MC_SAMPLES = 10**6


def test_single_be_chain():
    ft = make_fault_tree("b", {}, {"b": Exponential(3.0)})
    chain = build_ctmc(ft)
    assert chain.num_states == 2
    assert chain.rate.tolist() == [3.0]
    curve = transient_failure_prob(chain, [1.0])
    assert curve.values[0] == pytest.approx(1 - math.exp(-3), abs=1e-10)


def test_single_be_analytic_value():
    ft = make_fault_tree("b", {}, {"b": Exponential(1.0)})
    chain = build_ctmc(ft)
    got = transient_failure_prob(chain, [1.0]).values[0]
    assert got == pytest.approx(1 - math.exp(-1), abs=1e-10)


def test_pand_state_space():
    ft = make_fault_tree(
        "T", {"T": (PAND, ["C", "D"])},
        {"C": Exponential(1.0), "D": Exponential(1.0)},
    )
    chain = build_ctmc(ft)
    # initial; C failed; D-first (fail-safe); C,D in order (failed);
    # C after D with the gate fail-safe
    assert chain.num_states == 5
    assert int(chain.failed.sum()) == 1


def test_pand_closed_form():
    ft = make_fault_tree(
        "T", {"T": (PAND, ["C", "D"])},
        {"C": Exponential(1.0), "D": Exponential(1.0)},
    )
    chain = build_ctmc(ft)
    got = transient_failure_prob(chain, [1.0]).values[0]
    expected = (1 - math.exp(-2)) / 2 - math.exp(-1) * (1 - math.exp(-1))
    assert got == pytest.approx(expected, abs=1e-8)


def test_time_zero_is_zero():
    ft = make_fault_tree(
        "T", {"T": (PAND, ["C", "D"])},
        {"C": Exponential(1.0), "D": Exponential(1.0)},
    )
    chain = build_ctmc(ft)
    assert transient_failure_prob(chain, [0.0]).values[0] == 0.0


def test_cold_spare_cannot_fail_dormant():
    ft = make_fault_tree(
        "S", {"S": (spare("csp"), ["E", "F"])},
        {"E": Exponential(1.0), "F": Exponential(2.0, dormancy=0.0)},
    )
    chain = build_ctmc(ft)
    assert chain.num_states == 3  # all-up -> E failed/F active -> both failed
    t = 1.0
    expected = 1 - (2 * math.exp(-t) - math.exp(-2 * t))
    got = transient_failure_prob(chain, [t]).values[0]
    assert got == pytest.approx(expected, abs=1e-8)


def test_probability_conservation():
    ft = make_fault_tree(
        "T", {"T": (OR, ["G", "x"]), "G": (PAND, ["a", "b"])},
        {n: Exponential(0.8) for n in ("a", "b", "x")},
    )
    chain = build_ctmc(ft)
    import scipy.sparse as sp

    exit_rates = chain.exit_rates()
    lam = exit_rates.max()
    n = chain.num_states
    p_t = sp.coo_matrix(
        (np.concatenate([chain.rate / lam, 1.0 - exit_rates / lam]),
         (np.concatenate([chain.tgt, np.arange(n)]),
          np.concatenate([chain.src, np.arange(n)]))),
        shape=(n, n)).tocsr()
    pi = np.zeros(n)
    pi[chain.initial] = 1.0
    for _ in range(200):
        pi = p_t @ pi
        assert pi.sum() == pytest.approx(1.0, abs=1e-9)


def test_monotone_curve_and_pand_below_and():
    bes = {"a": Exponential(1.3), "b": Exponential(0.7)}
    pand_tree = make_fault_tree("T", {"T": (PAND, ["a", "b"])}, bes)
    and_tree = make_fault_tree("T", {"T": (AND, ["a", "b"])}, bes)
    times = np.linspace(0.1, 4.0, 40)
    pand_curve = transient_failure_prob(build_ctmc(pand_tree), times)
    and_curve = transient_failure_prob(build_ctmc(and_tree), times)
    assert np.all(np.diff(pand_curve.values) >= 0)
    assert np.all(pand_curve.values <= and_curve.values + 1e-12)


def test_static_module_matches_bdd():
    import random

    for seed in range(5):
        rng = random.Random(1500 + seed)
        ft = random_sft(rng, rng.randint(2, 6), share_prob=0.0)
        chain = build_ctmc(ft)
        got = transient_failure_prob(chain, [0.5, 1.0, 2.0])
        result = translate(ft)
        for t, v in zip(got.times, got.values):
            probs = probabilities_at(ft.distributions, float(t))
            assert v == pytest.approx(unreliability(result.root, probs), abs=1e-8)


def test_state_cap():
    ft = make_fault_tree(
        "T", {"T": (AND, [f"b{i}" for i in range(8)])},
        {f"b{i}": Exponential(1.0) for i in range(8)},
    )
    with pytest.raises(StateCapExceeded):
        build_ctmc(ft, state_cap=10)


def test_non_exponential_rejected():
    ft = make_fault_tree(
        "T", {"T": (AND, ["a", "b"])},
        {"a": Exponential(1.0), "b": FixedProbability(0.2)},
    )
    with pytest.raises(InputError, match="exponential"):
        build_ctmc(ft)


def test_empty_times_rejected():
    ft = make_fault_tree("b", {}, {"b": Exponential(1.0)})
    chain = build_ctmc(ft)
    with pytest.raises(InputError):
        transient_failure_prob(chain, [])


# -- Monte-Carlo agreement, one fixture per dynamic gate type ----------------


def test_mc_pand():
    lam_c, lam_d, t = 1.0, 0.8, 1.2
    ft = make_fault_tree(
        "T", {"T": (PAND, ["C", "D"])},
        {"C": Exponential(lam_c), "D": Exponential(lam_d)},
    )
    exact = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    est = mc_pand2(11, lam_c, lam_d, t, MC_SAMPLES)
    assert abs(exact - est) <= 3 * mc_sigma(est, MC_SAMPLES)


def test_mc_por():
    lam_a, lam_b, t = 0.9, 1.4, 1.0
    ft = make_fault_tree(
        "T", {"T": (POR, ["A", "B"])},
        {"A": Exponential(lam_a), "B": Exponential(lam_b)},
    )
    exact = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    est = mc_por2(12, lam_a, lam_b, t, MC_SAMPLES)
    assert abs(exact - est) <= 3 * mc_sigma(est, MC_SAMPLES)


@pytest.mark.parametrize("dormancy", [0.0, 0.4, 1.0])
def test_mc_spare(dormancy):
    lam_p, lam_s, t = 1.1, 0.9, 1.3
    ft = make_fault_tree(
        "S", {"S": (spare("wsp"), ["P", "Q"])},
        {"P": Exponential(lam_p), "Q": Exponential(lam_s, dormancy=dormancy)},
    )
    exact = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    est = mc_spare2(13, lam_p, lam_s, dormancy, t, MC_SAMPLES)
    assert abs(exact - est) <= 3 * mc_sigma(est, MC_SAMPLES)


def test_mc_seq():
    lam_a, lam_b, t = 1.0, 1.5, 1.4
    ft = make_fault_tree(
        "T", {"T": (AND, ["a", "b"]), "s": (SEQ, ["a", "b"])},
        {"a": Exponential(lam_a), "b": Exponential(lam_b)},
    )
    exact = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    est = mc_seq_and2(14, lam_a, lam_b, t, MC_SAMPLES)
    assert abs(exact - est) <= 3 * mc_sigma(est, MC_SAMPLES)


@pytest.mark.parametrize("p", [1.0, 0.6])
def test_mc_pdep(p):
    lam_t, lam_d, t = 0.8, 1.0, 1.1
    ft = make_fault_tree(
        "T", {"T": (AND, ["trig", "dep"]), "d": (pdep(p), ["trig", "dep"])},
        {"trig": Exponential(lam_t), "dep": Exponential(lam_d)},
    )
    exact = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    est = mc_pdep_and2(15, lam_t, lam_d, p, t, MC_SAMPLES)
    assert abs(exact - est) <= 3 * mc_sigma(est, MC_SAMPLES)


def test_fdep_exact_value():
    """AND(t, d) with an unconditional dependency t -> d fails exactly
    when the trigger does."""
    ft = make_fault_tree(
        "T", {"T": (AND, ["trig", "dep"]), "d": (pdep(1.0), ["trig", "dep"])},
        {"trig": Exponential(0.8), "dep": Exponential(1.0)},
    )
    chain = build_ctmc(ft)
    t = 1.3
    got = transient_failure_prob(chain, [t]).values[0]
    # failed iff trig failed and (dep failed on its own or via the dependency)
    # = failed iff trig failed (dependency fires immediately)... except dep
    # may fail first, then trig: still both failed at trig's time
    expected = 1 - math.exp(-0.8 * t)
    assert got == pytest.approx(expected, abs=1e-10)


def test_seq_blocks_out_of_order():
    ft = make_fault_tree(
        "T", {"T": (AND, ["a", "b"]), "s": (SEQ, ["a", "b"])},
        {"a": Exponential(1.0), "b": Exponential(1.0)},
    )
    chain = build_ctmc(ft)
    # states: all-up, a failed, both failed; b-first is never generated
    assert chain.num_states == 3


def test_hot_spare_over_gate_children_is_conjunction():
    """With dormancy 1.0 everywhere, a spare over gate subtrees fails
    exactly when primary and spare subtree have both failed."""
    lam_p, lam_1, lam_2, t = 0.9, 1.2, 0.7, 1.4
    ft = make_fault_tree(
        "S", {"S": (spare("hsp"), ["P", "W"]), "W": (AND, ["w1", "w2"])},
        {"P": Exponential(lam_p), "w1": Exponential(lam_1),
         "w2": Exponential(lam_2)},
    )
    got = transient_failure_prob(build_ctmc(ft), [t]).values[0]

    def cdf(lam):
        return 1 - math.exp(-lam * t)

    assert got == pytest.approx(cdf(lam_p) * cdf(lam_1) * cdf(lam_2), abs=1e-8)


def test_cold_spare_gate_child_claim_starts_its_clock():
    """Primary OR(a, b); one cold spare gate child claimed at the primary's
    death, after which it races at full rate: hypoexponential closed form."""
    lam_a, lam_b, lam_c, t = 0.8, 0.5, 1.1, 1.6
    ft = make_fault_tree(
        "S",
        {"S": (spare("csp"), ["W", "C"]), "W": (OR, ["a", "b"])},
        {"a": Exponential(lam_a), "b": Exponential(lam_b),
         "C": Exponential(lam_c, dormancy=0.0)},
    )
    got = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    l1 = lam_a + lam_b  # OR of hot exponentials dies at the first failure
    l2 = lam_c
    expected = 1 - (l2 * math.exp(-l1 * t) - l1 * math.exp(-l2 * t)) / (l2 - l1)
    assert got == pytest.approx(expected, abs=1e-8)


def test_pand_over_gate_children():
    """PAND(OR(a, b), c) fails iff the OR dies before c, by time t."""
    lam_a, lam_b, lam_c, t = 1.0, 0.6, 0.9, 1.2
    ft = make_fault_tree(
        "T", {"T": (PAND, ["G", "c"]), "G": (OR, ["a", "b"])},
        {"a": Exponential(lam_a), "b": Exponential(lam_b),
         "c": Exponential(lam_c)},
    )
    got = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    rng = np.random.default_rng(77)
    n = 10**6
    tg = np.minimum(rng.exponential(1 / lam_a, n), rng.exponential(1 / lam_b, n))
    tc = rng.exponential(1 / lam_c, n)
    est = float(np.mean((tg <= tc) & (tc <= t)))
    assert abs(got - est) <= 3 * mc_sigma(est, n)


def test_composite_or_of_pand_and_be():
    """OR(PAND(a, b), c): failure-time composition against simulation."""
    la, lb, lc, t = 1.0, 0.7, 0.4, 1.5
    ft = make_fault_tree(
        "T", {"T": (OR, ["P", "c"]), "P": (PAND, ["a", "b"])},
        {"a": Exponential(la), "b": Exponential(lb), "c": Exponential(lc)},
    )
    got = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    rng = np.random.default_rng(81)
    n = 10**6
    ta = rng.exponential(1 / la, n)
    tb = rng.exponential(1 / lb, n)
    tc = rng.exponential(1 / lc, n)
    pand_time = np.where(ta <= tb, tb, np.inf)
    est = float(np.mean(np.minimum(pand_time, tc) <= t))
    assert abs(got - est) <= 3 * mc_sigma(est, n)


def test_composite_and_of_spare_and_be():
    """AND(SPARE(p, cold s), d): failure-time composition against simulation."""
    lp, ls, ld, t = 0.9, 1.2, 0.6, 2.0
    ft = make_fault_tree(
        "T", {"T": (AND, ["S", "d"]), "S": (spare("csp"), ["p", "s"])},
        {"p": Exponential(lp), "s": Exponential(ls, dormancy=0.0),
         "d": Exponential(ld)},
    )
    got = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    rng = np.random.default_rng(82)
    n = 10**6
    spare_time = rng.exponential(1 / lp, n) + rng.exponential(1 / ls, n)
    td = rng.exponential(1 / ld, n)
    est = float(np.mean(np.maximum(spare_time, td) <= t))
    assert abs(got - est) <= 3 * mc_sigma(est, n)


def test_composite_voting_over_dynamic_gates():
    """2-of-3 over PAND, POR and a BE: the second-earliest gate failure."""
    from ftakit.model import vot

    la, lb, lx, ly, lz, t = 1.1, 0.8, 0.9, 1.3, 0.5, 1.6
    ft = make_fault_tree(
        "T",
        {"T": (vot(2), ["P", "Q", "z"]),
         "P": (PAND, ["a", "b"]),
         "Q": (POR, ["x", "y"])},
        {"a": Exponential(la), "b": Exponential(lb), "x": Exponential(lx),
         "y": Exponential(ly), "z": Exponential(lz)},
    )
    got = transient_failure_prob(build_ctmc(ft), [t]).values[0]
    rng = np.random.default_rng(83)
    n = 10**6
    ta = rng.exponential(1 / la, n)
    tb = rng.exponential(1 / lb, n)
    tx = rng.exponential(1 / lx, n)
    ty = rng.exponential(1 / ly, n)
    tz = rng.exponential(1 / lz, n)
    pand_time = np.where(ta <= tb, tb, np.inf)
    por_time = np.where(tx <= ty, tx, np.inf)
    stacked = np.sort(np.stack([pand_time, por_time, tz]), axis=0)
    est = float(np.mean(stacked[1] <= t))  # second failure fires the 2-of-3
    assert abs(got - est) <= 3 * mc_sigma(est, n)


def test_ctmc_dump(tmp_path):
    ft = make_fault_tree(
        "T", {"T": (PAND, ["C", "D"])},
        {"C": Exponential(1.0), "D": Exponential(1.0)},
    )
    chain = build_ctmc(ft)
    path = tmp_path / "chain.txt"
    with open(path, "w") as handle:
        write_ctmc(chain, handle)
    text = path.read_text()
    assert "# state 0" in text
    assert "FAILED" in text
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert len(lines) == len(chain.rate)
