import pathlib

import numpy as np
import pytest

from tvrobust import BayesNet, Cpt, ProbVec, Variable
from tvrobust.cli_io import parse_model
from tvrobust.exact_oracle import JointTable

TESTS_DIR = pathlib.Path(__file__).parent
MODELS_DIR = TESTS_DIR / "models"
GOLDEN_DIR = TESTS_DIR / "golden"

DROUGHT_LEVELS = ("yes", "no")
RAINFALL_LEVELS = ("below average", "average", "above average")
TREE_LEVELS = ("good", "damaged", "dead")

# the worked example tables: P is the elicited Tree Condition CPT, Q a
# second elicitation of the same table
P_ROWS = (
    (0.20, 0.60, 0.20),
    (0.25, 0.60, 0.15),
    (0.30, 0.60, 0.10),
    (0.70, 0.25, 0.05),
    (0.80, 0.18, 0.02),
    (0.90, 0.09, 0.01),
)
Q_ROWS = (
    (0.20, 0.60, 0.20),
    (0.30, 0.50, 0.20),
    (0.30, 0.60, 0.10),
    (0.65, 0.25, 0.10),
    (0.80, 0.18, 0.02),
    (0.90, 0.10, 0.00),
)

TEN_NODE_EDGES = (
    ("X1", "X2"), ("X2", "X3"), ("X2", "X4"), ("X3", "X4"), ("X3", "X10"),
    ("X4", "X5"), ("X5", "X6"), ("X5", "X7"), ("X6", "X8"), ("X7", "X8"),
    ("X7", "X9"),
)


def tree_cpt(rows=P_ROWS) -> Cpt:
    return Cpt.of(
        "TreeCondition", TREE_LEVELS, ("Drought", "Rainfall"),
        (DROUGHT_LEVELS, RAINFALL_LEVELS),
        [ProbVec(TREE_LEVELS, r) for r in rows],
    )


def load_model(name: str) -> BayesNet:
    return parse_model((MODELS_DIR / f"{name}.json").read_text())


@pytest.fixture
def fragment() -> BayesNet:
    return load_model("native_fish_fragment")


@pytest.fixture
def variant() -> BayesNet:
    return load_model("native_fish_variant")


@pytest.fixture
def ten_node() -> BayesNet:
    return load_model("ten_node_demo")


def random_vector(rng, k: int) -> ProbVec:
    w = rng.uniform(0.05, 1.0, size=k)
    w = w / w.sum()
    return ProbVec(tuple(f"l{j}" for j in range(k)), tuple(float(x) for x in w))


def random_net(rng, n_min: int = 5, n_max: int = 7) -> BayesNet:
    """A random small net with strictly positive CPTs.

    Declaration order is a topological order; each variable picks up to
    two earlier parents and 2 or 3 levels.
    """
    n = int(rng.integers(n_min, n_max + 1))
    names = [f"V{i}" for i in range(n)]
    variables: list[Variable] = []
    cpts: list[Cpt] = []
    for i, name in enumerate(names):
        k = int(rng.integers(2, 4))
        levels = tuple(f"l{j}" for j in range(k))
        pool = list(range(i))
        rng.shuffle(pool)
        n_par = min(len(pool), int(rng.integers(0, 3)))
        ps = tuple(names[j] for j in sorted(pool[:n_par]))
        plevels = tuple(variables[names.index(p)].levels for p in ps)
        n_rows = 1
        for ls in plevels:
            n_rows *= len(ls)
        rows = []
        for _ in range(n_rows):
            w = rng.uniform(0.05, 1.0, size=k)
            w = w / w.sum()
            rows.append(ProbVec(levels, tuple(float(x) for x in w)))
        variables.append(Variable(name, levels))
        cpts.append(Cpt.of(name, levels, ps, plevels, rows))
    return BayesNet.of(variables, cpts)


def reweight_joint(joint: JointTable, sub: JointTable,
                   fresh: np.ndarray) -> JointTable:
    """The joint with the margin over ``sub.scope`` replaced by ``fresh``.

    Every conditional of the rest given ``sub.scope`` is untouched:
    q(x) = p(x) * fresh(u(x)) / p(u(x)).  The original margin must be
    strictly positive.
    """
    shape = [1] * len(joint.scope)
    for ax, name in enumerate(sub.scope):
        shape[joint.scope.index(name)] = sub.cards[ax]
    ratio = (fresh / sub.mass).reshape(shape)
    grid = joint.grid() * ratio
    return JointTable(joint.scope, joint.cards, grid.reshape(-1))
