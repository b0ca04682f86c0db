import itertools

from hypothesis import strategies as st

from spintest.graph import Multigraph


@st.composite
def multigraphs(draw, min_n=2, max_n=7, max_mult=3, simple=False):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    top = 1 if simple else max_mult
    return Multigraph(n, {p: draw(st.integers(1, top)) for p in chosen})


@st.composite
def graph_and_side(draw, **kw):
    G = draw(multigraphs(**kw))
    side = draw(st.sets(st.integers(0, G.n - 1), min_size=1, max_size=G.n - 1))
    return G, side


@st.composite
def spin_samples(draw, max_n=6, max_L=12):
    n = draw(st.integers(1, max_n))
    L = draw(st.integers(1, max_L))
    return draw(st.lists(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n), min_size=L, max_size=L))
