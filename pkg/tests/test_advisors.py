import numpy as np
import pytest

from tvrobust import (
    BayesNet,
    Cpt,
    DomainError,
    ProbVec,
    Variable,
    amalgamate_levels,
    amalgamation_suggest,
    delete_edge,
    diameter,
    edge_deletion_report,
    elicitation_priority,
    joint_mass,
    marginal,
    parent_diameter,
    parent_index,
    table_tv,
    validate,
)
from tvrobust.advisors import counterpart_cost

from conftest import RAINFALL_LEVELS, TREE_LEVELS, random_net, tree_cpt


def test_edge_report_fragment_order_and_values(fragment):
    report = edge_deletion_report(fragment)
    got = [(r.parent, r.child, r.delta) for r in report.records]
    assert [(p, c) for p, c, _ in got] == [
        ("Drought", "TreeCondition"), ("Rainfall", "TreeCondition")]
    assert abs(got[0][2] - 0.6) <= 1e-12
    assert abs(got[1][2] - 0.2) <= 1e-12


def test_edge_report_covers_every_edge(ten_node):
    report = edge_deletion_report(ten_node)
    assert len(report.records) == 11
    assert {(r.parent, r.child) for r in report.records} == set(
        ten_node.edges())
    deltas = [r.delta for r in report.records]
    assert deltas == sorted(deltas, reverse=True)
    for r in report.records:
        t = ten_node.cpt(r.child)
        assert r.delta == parent_diameter(t, parent_index(t, r.parent))


def test_edge_report_zero_for_irrelevant_parent():
    rows = [ProbVec(("x", "y"), (0.3, 0.7)), ProbVec(("x", "y"), (0.3, 0.7))]
    net = BayesNet.of(
        (Variable("A", ("t", "f")), Variable("B", ("x", "y"))),
        (Cpt.of("A", ("t", "f"), (), (), (ProbVec(("t", "f"), (0.5, 0.5)),)),
         Cpt.of("B", ("x", "y"), ("A",), (("t", "f"),), rows)))
    report = edge_deletion_report(net)
    assert report.records[0].delta == 0.0


def test_edge_report_rejects_invalid_net():
    bad = BayesNet(
        (Variable("A", ("t", "f")),),
        (Cpt("A", ("t", "f"), (), (), (ProbVec(("t", "f"), (0.5, 0.6)),)),))
    with pytest.raises(DomainError):
        edge_deletion_report(bad)


def test_delete_edge_fragment_rows_and_cost(fragment):
    new, cost = delete_edge(fragment, "Rainfall", "TreeCondition")
    assert abs(cost - 0.1) <= 1e-12
    t = new.cpt("TreeCondition")
    assert t.parents == ("Drought",)
    assert np.allclose(t.rows[0].mass, (0.25, 0.6, 0.15), atol=1e-12)
    assert np.allclose(t.rows[1].mass,
                       (0.8, 0.52 / 3, 0.08 / 3), atol=1e-12)
    assert validate(new) == []
    assert ("Rainfall", "TreeCondition") not in new.edges()


def test_delete_edge_unknown_edge(fragment):
    with pytest.raises(DomainError):
        delete_edge(fragment, "Drought", "Rainfall")
    with pytest.raises(DomainError):
        delete_edge(fragment, "TreeCondition", "Drought")


def test_delete_zero_cost_edge_keeps_margins():
    rows = [ProbVec(("x", "y"), (0.3, 0.7)), ProbVec(("x", "y"), (0.3, 0.7))]
    net = BayesNet.of(
        (Variable("A", ("t", "f")), Variable("B", ("x", "y"))),
        (Cpt.of("A", ("t", "f"), (), (), (ProbVec(("t", "f"), (0.5, 0.5)),)),
         Cpt.of("B", ("x", "y"), ("A",), (("t", "f"),), rows)))
    new, cost = delete_edge(net, "A", "B")
    assert cost == 0.0
    assert table_tv(marginal(net, ("B",)), marginal(new, ("B",))) == 0.0


def test_delete_edge_cost_zero_iff_parent_irrelevant():
    rng = np.random.default_rng(31)
    for _ in range(25):
        net = random_net(rng)
        report = edge_deletion_report(net)
        for r in report.records[:2]:
            _, cost = delete_edge(net, r.parent, r.child)
            assert (cost == 0.0) == (r.delta == 0.0)
            # averaging rows can never cost more than the spread
            assert cost <= r.delta + 1e-12


def test_delete_edge_cost_bounds_margin_shift(fragment):
    new, cost = delete_edge(fragment, "Rainfall", "TreeCondition")
    shift = table_tv(marginal(fragment, ("TreeCondition",)),
                     marginal(new, ("TreeCondition",)))
    assert shift <= cost + 1e-12


def test_suggest_fragment_ties_keep_earlier_pair(fragment):
    got = amalgamation_suggest(fragment, "Rainfall")
    assert [pair for pair, _ in got] == [
        ("below average", "average"), ("average", "above average")]
    assert abs(got[0][1] - 0.1) <= 1e-12
    assert abs(got[1][1] - 0.1) <= 1e-12


def test_suggest_binary_variable_single_candidate(fragment):
    got = amalgamation_suggest(fragment, "Drought")
    assert len(got) == 1
    assert got[0][0] == ("yes", "no")


def test_suggest_puts_identical_pair_first():
    rows = [ProbVec(("x", "y"), (0.3, 0.7)), ProbVec(("x", "y"), (0.9, 0.1)),
            ProbVec(("x", "y"), (0.9, 0.1))]
    net = BayesNet.of(
        (Variable("A", ("a", "b", "c")), Variable("B", ("x", "y"))),
        (Cpt.of("A", ("a", "b", "c"), (), (),
                (ProbVec(("a", "b", "c"), (0.2, 0.3, 0.5)),)),
         Cpt.of("B", ("x", "y"), ("A",), (("a", "b", "c"),), rows)))
    got = amalgamation_suggest(net, "A")
    assert got[0][0] == ("b", "c")
    assert got[0][1] == 0.0
    assert got[1][1] > 0.0


def test_suggest_rejects_single_level():
    net = BayesNet.of(
        (Variable("A", ("only",)),),
        (Cpt.of("A", ("only",), (), (), (ProbVec(("only",), (1.0,)),)),))
    with pytest.raises(DomainError):
        amalgamation_suggest(net, "A")


def test_amalgamate_fragment_below_plus_average(fragment):
    new, costs = amalgamate_levels(fragment, "Rainfall",
                                   ("below average", "average"))
    assert new.variable("Rainfall").levels == (
        "below average+average", "above average")
    # prior columns summed
    assert np.allclose(new.cpt("Rainfall").rows[0].mass, (0.9, 0.1),
                       atol=1e-15)
    t = new.cpt("TreeCondition")
    assert t.parent_levels[1] == ("below average+average", "above average")
    expected = ((0.225, 0.60, 0.175), (0.30, 0.60, 0.10),
                (0.75, 0.215, 0.035), (0.90, 0.09, 0.01))
    for row, want in zip(t.rows, expected):
        assert np.allclose(row.mass, want, atol=1e-12)
    assert set(costs) == {"TreeCondition"}
    assert abs(costs["TreeCondition"] - 0.05) <= 1e-12
    assert validate(new) == []


def test_amalgamate_rejects_nonconsecutive_unless_nominal(fragment):
    with pytest.raises(DomainError):
        amalgamate_levels(fragment, "Rainfall",
                          ("below average", "above average"))
    new, costs = amalgamate_levels(fragment, "Rainfall",
                                   ("below average", "above average"),
                                   allow_nonconsecutive=True)
    assert new.variable("Rainfall").levels == (
        "below average+above average", "average")
    assert validate(new) == []


def test_amalgamate_size_one_group_is_identity(fragment):
    new, costs = amalgamate_levels(fragment, "Rainfall", ("average",))
    assert costs == {"TreeCondition": 0.0}
    assert new.variable("Rainfall").levels == RAINFALL_LEVELS
    for a, b in zip(new.cpts, fragment.cpts):
        for ra, rb in zip(a.rows, b.rows):
            assert ra.mass == rb.mass


def test_amalgamate_all_levels_zeroes_parent_delta(fragment):
    new, _ = amalgamate_levels(fragment, "Rainfall", RAINFALL_LEVELS)
    assert new.variable("Rainfall").levels == (
        "below average+average+above average",)
    t = new.cpt("TreeCondition")
    assert parent_diameter(t, parent_index(t, "Rainfall")) == 0.0
    assert abs(joint_mass(new).total() - 1.0) <= 1e-12


def test_amalgamate_never_increases_diameters():
    rng = np.random.default_rng(37)
    for _ in range(25):
        net = random_net(rng)
        # pick a variable that is someone's parent and has 3 levels
        cands = [v.name for v in net.variables
                 if len(v.levels) == 3 and net.children_of(v.name)]
        if not cands:
            continue
        name = cands[0]
        levels = net.variable(name).levels
        new, costs = amalgamate_levels(net, name, levels[:2])
        assert validate(new) == []
        for child in net.children_of(name):
            assert diameter(new.cpt(child)) <= diameter(net.cpt(child)) + 1e-12
        assert diameter(new.cpt(name)) <= diameter(net.cpt(name)) + 1e-12


def test_counterpart_cost_against_externally_given_table(fragment):
    """Pricing a merged table someone else supplies, not our average."""
    merged_levels = ("below average+average", "above average")
    given_rows = ((0.225, 0.60, 0.175), (0.30, 0.60, 0.10),
                  (0.725, 0.215, 0.06), (0.90, 0.09, 0.01))
    supplied = Cpt.of(
        "TreeCondition", TREE_LEVELS, ("Drought", "Rainfall"),
        (("yes", "no"), merged_levels),
        [ProbVec(TREE_LEVELS, r) for r in given_rows])
    cost = counterpart_cost(tree_cpt(), supplied, "Rainfall",
                            ("below average", "average"))
    assert abs(cost - 0.075) <= 1e-12


def test_priority_fragment_all_share_target_clique(fragment):
    got = elicitation_priority(fragment, ("TreeCondition",))
    assert [r.variable for r in got] == ["Drought", "Rainfall",
                                         "TreeCondition"]
    for r in got:
        assert r.score == 1.0
        assert r.note == "family shares the target clique"


def test_priority_demo_target_x9(ten_node):
    got = elicitation_priority(ten_node, ("X9",))
    by_name = {r.variable: r for r in got}
    assert got[0].variable == "X9"
    assert got[0].score == 1.0
    noted = {r.variable for r in got if r.score is None}
    assert noted == {"X8", "X10"}
    # scoreless entries sort last
    assert [r.variable for r in got[-2:]] == ["X8", "X10"]
    d = {n: diameter(ten_node.cpt(n)) for n in by_name}
    # X6's family rides the {X5, X6, X7} clique, where the first factor
    # P(X7 | X5, X6) repeats the rows of P(X7 | X5), so its score lands
    # on exactly the same float as X7's
    assert by_name["X6"].score == by_name["X7"].score
    assert by_name["X7"].score == pytest.approx(d["X7"] * d["X9"], abs=1e-12)
    assert by_name["X5"].score == pytest.approx(
        d["X5"] * d["X7"] * d["X9"], abs=1e-12)
    assert by_name["X3"].score == pytest.approx(by_name["X4"].score,
                                                abs=1e-15)
    assert by_name["X1"].score == pytest.approx(by_name["X2"].score,
                                                abs=1e-15)
    assert by_name["X1"].score == pytest.approx(
        d["X2"] * d["X4"] * d["X5"] * d["X7"] * d["X9"], abs=1e-12)
    # attenuation only shrinks scores walking away from the target
    chain = [by_name[n].score for n in ("X1", "X4", "X5", "X7", "X9")]
    assert chain == sorted(chain)


def test_priority_disconnected_family_scores_zero():
    net = BayesNet.of(
        (Variable("A", ("t", "f")), Variable("B", ("t", "f")),
         Variable("C", ("t", "f"))),
        (Cpt.of("A", ("t", "f"), (), (), (ProbVec(("t", "f"), (0.5, 0.5)),)),
         Cpt.of("B", ("t", "f"), ("A",), (("t", "f"),),
                (ProbVec(("t", "f"), (0.3, 0.7)),
                 ProbVec(("t", "f"), (0.6, 0.4)))),
         Cpt.of("C", ("t", "f"), (), (), (ProbVec(("t", "f"), (0.2, 0.8)),))))
    got = elicitation_priority(net, ("C",))
    by_name = {r.variable: r for r in got}
    assert by_name["A"].score == 0.0
    assert by_name["A"].note == "no influence path to the target"
    assert by_name["C"].score == 1.0
    # zero-scored families still outrank scoreless ones, of which
    # this net has none
    assert got[-1].score == 0.0


def test_priority_rejects_unknown_target(fragment):
    with pytest.raises(DomainError):
        elicitation_priority(fragment, ("Pollinators",))
