from hypothesis import strategies as st

from starfactor import E, R


def _elem(pair, sign):
    return E(pair[0], pair[1], sign)


INDEX_PAIRS = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]
PERM_TRIPLES = [(3, 2, 1), (2, 3, 1)]

elem_letters = st.builds(_elem, st.sampled_from(INDEX_PAIRS), st.sampled_from([1, -1]))
perm_letters = st.sampled_from([R(*t) for t in PERM_TRIPLES])
letters = st.one_of(elem_letters, perm_letters)


def words(max_size=10, alphabet=letters):
    return st.lists(alphabet, max_size=max_size).map(tuple)


def elem_words(max_size=10):
    return words(max_size, elem_letters)
